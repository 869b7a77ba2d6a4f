//! Exact rational symmetric matrices.

use thiserror::Error;

use num_traits::{One, Zero};

use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<Q>,
}

impl SymMatrix {
    /// Row-major entries; rejects asymmetric input.
    pub fn new(n: usize, entries: Vec<Q>) -> Result<Self, MatrixError> {
        if entries.len() != n * n {
            return Err(MatrixError::Shape {
                expected: n * n,
                got: entries.len(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(MatrixError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SymMatrix { n, entries })
    }

    pub(crate) fn from_symmetric_entries(n: usize, entries: Vec<Q>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        SymMatrix { n, entries }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Q) -> Result<Self, MatrixError> {
        Self::new(n, (0..n * n).map(|k| f(k / n, k % n)).collect())
    }

    pub fn diagonal(values: &[Q]) -> Self {
        let n = values.len();
        let mut entries = vec![Q::default(); n * n];
        for (i, v) in values.iter().enumerate() {
            entries[i * n + i] = v.clone();
        }
        SymMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Q] {
        &self.entries
    }

    pub fn scale(&self, c: &Q) -> SymMatrix {
        SymMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    /// Coefficients of `det(λI − A)`, leading coefficient first, by
    /// Berkowitz's division-free recursion over leading principal blocks.
    pub fn characteristic_polynomial(&self) -> Vec<Q> {
        let mut p = vec![Q::one()];
        for k in 0..self.n {
            // A_k = [[A_{k-1}, C], [R, a_kk]]
            let col: Vec<Q> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let row: Vec<Q> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let mut toeplitz = Vec::with_capacity(k + 2);
            toeplitz.push(Q::one());
            toeplitz.push(-self.get(k, k).clone());
            let mut v = col;
            for _ in 0..k {
                toeplitz.push(-dot(&row, &v));
                v = (0..k).map(|i| dot_row(self, i, k, &v)).collect();
            }
            let mut next = vec![Q::zero(); k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, pj) in p.iter().enumerate().take(i + 1) {
                    if !pj.is_zero() && !toeplitz[i - j].is_zero() {
                        *slot += &toeplitz[i - j] * pj;
                    }
                }
            }
            p = next;
        }
        p
    }

    /// `self − c · u uᵀ`.
    pub fn minus_rank_one(&self, c: &Q, u: &[Q]) -> SymMatrix {
        assert_eq!(u.len(), self.n);
        let n = self.n;
        SymMatrix {
            n,
            entries: (0..n * n).map(|k| &self.entries[k] - c * &u[k / n] * &u[k % n]).collect(),
        }
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Row `i` of the leading `k × k` block times `v`.
fn dot_row(m: &SymMatrix, i: usize, k: usize, v: &[Q]) -> Q {
    (0..k).map(|j| m.get(i, j) * &v[j]).sum()
}
