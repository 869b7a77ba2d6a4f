//! Exit-code classification of library errors.
//!
//! 2: invalid input, 3: a check failed, 4: size guard.

use std::fmt::Debug;

use flatpol::chow::ChowError;
use flatpol::cone::ConeError;
use flatpol::lorentz::LorentzError;
use flatpol::matroid::MatroidError;
use flatpol::pol::PolError;
use flatpol::poly::PolyError;
use flatpol::poset::PosetError;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn input(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: kind.into(),
            message: message.into(),
        }
    }
}

fn leaf<E: Debug + std::fmt::Display>(code: u8, e: &E) -> Failure {
    let debug = format!("{e:?}");
    let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
    Failure {
        code,
        kind,
        message: e.to_string(),
    }
}

pub fn poset(e: &PosetError) -> Failure {
    leaf(2, e)
}

pub fn poly(e: &PolyError) -> Failure {
    leaf(2, e)
}

pub fn cone(e: &ConeError) -> Failure {
    match e {
        ConeError::TooLarge(_) => leaf(4, e),
        ConeError::FeasibilityFailure => leaf(3, e),
        _ => leaf(2, e),
    }
}

pub fn matroid(e: &MatroidError) -> Failure {
    match e {
        MatroidError::Poset(p) => poset(p),
        MatroidError::DivisibilityFailure | MatroidError::ElementDependence(..) | MatroidError::InternalAxiomFailure(_) => {
            leaf(3, e)
        }
        _ => leaf(2, e),
    }
}

pub fn pol(e: &PolError) -> Failure {
    match e {
        PolError::Poset(p) => poset(p),
        PolError::Cone(c) => cone(c),
        PolError::Poly(p) => poly(p),
        PolError::Matroid(m) => matroid(m),
        PolError::BridgeMismatch { .. } | PolError::MismatchWithDirectComputation { .. } => leaf(3, e),
        _ => leaf(2, e),
    }
}

pub fn lorentz(e: &LorentzError) -> Failure {
    match e {
        LorentzError::Pol(p) => pol(p),
        LorentzError::Poly(p) => poly(p),
        LorentzError::CertificationFailure(_) => leaf(3, e),
        _ => leaf(2, e),
    }
}

pub fn chow(e: &ChowError) -> Failure {
    match e {
        ChowError::Pol(p) => pol(p),
        ChowError::SizeLimitExceeded { .. } => leaf(4, e),
        ChowError::TopDegreeNotOneDimensional(_) | ChowError::FlagInconsistency(..) => leaf(3, e),
        _ => leaf(2, e),
    }
}

macro_rules! from_error {
    ($($ty:ty => $f:ident),* $(,)?) => {
        $(impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                $f(&e)
            }
        })*
    };
}

from_error!(
    PosetError => poset,
    PolyError => poly,
    ConeError => cone,
    MatroidError => matroid,
    PolError => pol,
    LorentzError => lorentz,
    ChowError => chow,
);
