//! Pauli strings as dense operators.
//!
//! Sites are 1-based, matching the chain indexing used throughout the
//! crate; site `i` occupies bit `n - i` of the basis index (site 1 is the
//! most significant bit, bit value 0 means spin up).

use crate::matrix::CMat;
use crate::operator::{Operator, OperatorError};
use num_complex::Complex64 as C64;

/// Single-site Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A product of single-site Pauli factors (identity elsewhere).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    factors: Vec<(usize, Axis)>,
}

impl PauliTerm {
    /// Build from (1-based site, axis) pairs; rejects duplicates.
    pub fn new(factors: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self, OperatorError> {
        let mut factors: Vec<(usize, Axis)> = factors.into_iter().collect();
        factors.sort_by_key(|(site, _)| *site);
        for pair in factors.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(OperatorError::DuplicateSite { site: pair[0].0 });
            }
        }
        Ok(Self { factors })
    }

    /// The (site, axis) factors, sorted by site.
    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }
}

/// Bit of `basis` holding the state of 1-based `site` out of `n`.
#[inline]
pub(crate) fn site_bit(basis: usize, site: usize, n: usize) -> usize {
    (basis >> (n - site)) & 1
}

/// `sigma^z` eigenvalue (+1 for up, -1 for down) of `site` in `basis`.
#[inline]
pub(crate) fn z_sign(basis: usize, site: usize, n: usize) -> f64 {
    1.0 - 2.0 * site_bit(basis, site, n) as f64
}

/// Dense matrix of a Pauli string on `n` spins.
///
/// The result is simultaneously Hermitian, unitary and involutive.
pub fn pauli_string(n: usize, factors: &[(usize, Axis)]) -> Result<Operator, OperatorError> {
    let term = PauliTerm::new(factors.iter().copied())?;
    pauli_term_operator(n, &term)
}

pub(crate) fn pauli_term_operator(n: usize, term: &PauliTerm) -> Result<Operator, OperatorError> {
    if n == 0 || n > crate::operator::MAX_SITES {
        return Err(OperatorError::TooManySites { sites: n });
    }
    for &(site, _) in term.factors() {
        if site == 0 || site > n {
            return Err(OperatorError::SiteOutOfRange { site, n });
        }
    }
    let dim = 1usize << n;
    let mut flip_mask = 0usize;
    for &(site, axis) in term.factors() {
        if matches!(axis, Axis::X | Axis::Y) {
            flip_mask |= 1 << (n - site);
        }
    }
    let mut mat = CMat::zeros(dim, dim);
    for col in 0..dim {
        let row = col ^ flip_mask;
        let mut phase = C64::new(1.0, 0.0);
        for &(site, axis) in term.factors() {
            let bit = site_bit(col, site, n);
            phase *= match (axis, bit) {
                (Axis::X, _) => C64::new(1.0, 0.0),
                // sigma^y |up> = i |down>,  sigma^y |down> = -i |up>
                (Axis::Y, 0) => C64::new(0.0, 1.0),
                (Axis::Y, _) => C64::new(0.0, -1.0),
                (Axis::Z, 0) => C64::new(1.0, 0.0),
                (Axis::Z, _) => C64::new(-1.0, 0.0),
            };
        }
        mat[(row, col)] = phase;
    }
    Operator::hermitian(mat, n)
}
