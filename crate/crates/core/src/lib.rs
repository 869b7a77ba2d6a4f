pub mod chow;
pub mod cone;
pub mod exec;
pub mod matrix;
pub mod lorentz;
pub mod matroid;
pub mod pol;
pub mod poly;
pub mod poset;
pub mod rational;
pub mod sampling;
pub mod subset;
pub mod unipoly;
