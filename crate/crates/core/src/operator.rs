//! Dense operators and unitaries on the N-spin Hilbert space.
//!
//! # Basis convention
//!
//! Site 1 is the most significant qubit.  Each site contributes a factor
//! ordered as (|up>, |down>), with `sigma^z |up> = +|up>`.  A computational
//! basis index therefore reads, bit by bit from the most significant,
//! site 1 down to site N, with bit 0 meaning spin up.  For two sites the
//! ordering is |uu>, |ud>, |du>, |dd>.
//!
//! Operators are dimensionless; a Hamiltonian carries its rad/s scale into
//! the `exp(-i H t)` product at evolution time.  The site count is capped
//! at [`MAX_SITES`]: dense matrices on more spins are not representable at
//! desk scale.

use crate::matrix::{
    dagger, hermitian_eigen, hermiticity_defect, inner_trace, max_abs, max_abs_diff,
    spectral_norm, CMat,
};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Hard cap on the number of spins for dense representations.
pub const MAX_SITES: usize = 14;

/// Relative Hermiticity tolerance enforced at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Unitarity tolerance (`||U^dag U - 1||_2`) for checked constructions.
pub const UNITARITY_TOL: f64 = 1e-10;

fn check_sites(sites: usize) -> Result<(), OperatorError> {
    if sites == 0 || sites > MAX_SITES {
        return Err(OperatorError::TooManySites { sites });
    }
    Ok(())
}

/// A Hermitian operator on `2^sites` dimensions.
#[derive(Debug, Clone)]
pub struct Operator {
    mat: CMat,
    sites: usize,
}

impl Operator {
    /// Wrap a matrix, enforcing the Hermiticity invariant.
    pub fn hermitian(mat: CMat, sites: usize) -> Result<Self, OperatorError> {
        check_sites(sites)?;
        assert_eq!(mat.nrows(), 1 << sites);
        assert_eq!(mat.ncols(), 1 << sites);
        let scale = max_abs(&mat);
        let defect = hermiticity_defect(&mat);
        if scale > 0.0 && defect > HERMITICITY_TOL * scale {
            return Err(OperatorError::NotHermitian { defect });
        }
        Ok(Self { mat, sites })
    }

    /// Zero operator.
    pub fn zeros(sites: usize) -> Result<Self, OperatorError> {
        check_sites(sites)?;
        let dim = 1 << sites;
        Ok(Self {
            mat: CMat::zeros(dim, dim),
            sites,
        })
    }

    /// Build from an entry generator; the Hermiticity invariant is
    /// enforced on the result.
    pub fn from_fn(
        sites: usize,
        entry: impl Fn(usize, usize) -> C64,
    ) -> Result<Self, OperatorError> {
        check_sites(sites)?;
        let dim = 1 << sites;
        let mat = CMat::from_fn(dim, dim, entry);
        Self::hermitian(mat, sites)
    }

    pub(crate) fn from_parts_unchecked(mat: CMat, sites: usize) -> Self {
        Self { mat, sites }
    }

    /// Number of spins.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Hilbert-space dimension `2^sites`.
    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Matrix entry (row, column), 0-based.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    /// Reinterpret as a unitary, validating the unitarity invariant
    /// (Pauli strings and other involutions qualify).
    pub fn into_unitary(self) -> Result<Unitary, OperatorError> {
        Unitary::checked(self.mat, self.sites)
    }

    /// Largest absolute off-diagonal entry; zero means the operator is
    /// diagonal in the computational basis.
    pub fn max_offdiag(&self) -> f64 {
        let dim = self.dim();
        let mut m = 0.0f64;
        for j in 0..dim {
            for i in 0..dim {
                if i != j {
                    let v = self.mat[(i, j)].norm();
                    if v > m {
                        m = v;
                    }
                }
            }
        }
        m
    }

    /// Real diagonal of the operator.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Eigendecomposition, reusable across several evolution times.
    pub fn eigensystem(&self) -> Eigensystem {
        let (evals, vecs) = hermitian_eigen(&self.mat);
        Eigensystem {
            evals,
            vecs,
            sites: self.sites,
        }
    }

    /// `exp(-i H t)`.
    ///
    /// Diagonal operators exponentiate entrywise; general Hermitian
    /// operators go through the eigendecomposition.
    pub fn expm(&self, t: f64) -> Unitary {
        if self.max_offdiag() == 0.0 {
            let dim = self.dim();
            let mut u = CMat::zeros(dim, dim);
            for i in 0..dim {
                u[(i, i)] = (-C64::i() * self.mat[(i, i)].re * t).exp();
            }
            return Unitary {
                mat: u,
                sites: self.sites,
            };
        }
        self.eigensystem().evolve(t)
    }

    /// `max |(AB - BA)_ij|`, a cheap commutation witness.
    pub fn commutator_max_norm(&self, other: &Operator) -> f64 {
        let ab = &self.mat * &other.mat;
        let ba = &other.mat * &self.mat;
        max_abs_diff(&ab, &ba)
    }

    /// `max |(HU - UH)_ij|` against a unitary.
    pub fn commutator_with_unitary_max_norm(&self, u: &Unitary) -> f64 {
        let hu = &self.mat * &u.mat;
        let uh = &u.mat * &self.mat;
        max_abs_diff(&hu, &uh)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }

    /// Conjugate the operator: `U H U^dagger`.
    pub fn conjugated_by(&self, u: &Unitary) -> Operator {
        let m = &u.mat * &self.mat * dagger(&u.mat);
        Operator {
            mat: m,
            sites: self.sites,
        }
    }
}

impl std::ops::Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.sites, rhs.sites);
        Operator {
            mat: &self.mat + &rhs.mat,
            sites: self.sites,
        }
    }
}

impl std::ops::Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.sites, rhs.sites);
        Operator {
            mat: &self.mat - &rhs.mat,
            sites: self.sites,
        }
    }
}

impl std::ops::Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator {
            mat: faer::Scale(C64::new(rhs, 0.0)) * &self.mat,
            sites: self.sites,
        }
    }
}

/// Cached Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    evals: Vec<f64>,
    vecs: CMat,
    sites: usize,
}

impl Eigensystem {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.evals
    }

    /// `exp(-i H t)` from the cached decomposition.
    pub fn evolve(&self, t: f64) -> Unitary {
        let dim = self.evals.len();
        // V * diag(exp(-i lambda t)) — scale columns, then multiply by V^dagger.
        let mut scaled = self.vecs.clone();
        for (k, &lambda) in self.evals.iter().enumerate() {
            let phase = (-C64::i() * lambda * t).exp();
            for i in 0..dim {
                scaled[(i, k)] *= phase;
            }
        }
        Unitary {
            mat: &scaled * dagger(&self.vecs),
            sites: self.sites,
        }
    }
}

/// A unitary on `2^sites` dimensions.
#[derive(Debug, Clone)]
pub struct Unitary {
    mat: CMat,
    sites: usize,
}

impl Unitary {
    /// Identity.
    pub fn identity(sites: usize) -> Result<Self, OperatorError> {
        check_sites(sites)?;
        let dim = 1 << sites;
        Ok(Self {
            mat: CMat::identity(dim, dim),
            sites,
        })
    }

    /// Wrap a matrix, enforcing the unitarity invariant.
    pub fn checked(mat: CMat, sites: usize) -> Result<Self, OperatorError> {
        check_sites(sites)?;
        let u = Self { mat, sites };
        let defect = u.unitarity_defect();
        if defect > UNITARITY_TOL {
            return Err(OperatorError::NotUnitary { defect });
        }
        Ok(u)
    }

    pub(crate) fn from_parts_unchecked(mat: CMat, sites: usize) -> Self {
        Self { mat, sites }
    }

    /// Number of spins.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Matrix entry (row, column), 0-based.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub(crate) fn mat(&self) -> &CMat {
        &self.mat
    }

    /// `||U^dagger U - 1||_2`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = dagger(&self.mat) * &self.mat;
        let dim = self.dim();
        let id = CMat::identity(dim, dim);
        spectral_norm(&(&gram - &id))
    }

    /// Inverse (conjugate transpose).
    pub fn dagger(&self) -> Unitary {
        Unitary {
            mat: dagger(&self.mat),
            sites: self.sites,
        }
    }

    /// Apply to a state vector.
    pub fn apply(&self, state: &[C64]) -> Vec<C64> {
        let dim = self.dim();
        assert_eq!(state.len(), dim);
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (j, &s) in state.iter().enumerate() {
            if s != C64::new(0.0, 0.0) {
                for (i, o) in out.iter_mut().enumerate() {
                    *o += self.mat[(i, j)] * s;
                }
            }
        }
        out
    }

    /// Multiply by a global phase `exp(i phi)`.
    pub fn phased(&self, phi: f64) -> Unitary {
        let phase = C64::new(0.0, phi).exp();
        Unitary {
            mat: faer::Scale(phase) * &self.mat,
            sites: self.sites,
        }
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, exponent: usize) -> Unitary {
        let mut acc = CMat::identity(self.dim(), self.dim());
        for _ in 0..exponent {
            acc = &self.mat * &acc;
        }
        Unitary {
            mat: acc,
            sites: self.sites,
        }
    }

    /// Largest absolute deviation from another unitary, entrywise.
    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        max_abs_diff(&self.mat, &other.mat)
    }
}

impl std::ops::Mul<&Unitary> for &Unitary {
    type Output = Unitary;
    fn mul(self, rhs: &Unitary) -> Unitary {
        assert_eq!(self.sites, rhs.sites);
        Unitary {
            mat: &self.mat * &rhs.mat,
            sites: self.sites,
        }
    }
}

/// Operator-norm distance `||U - V||_2` between unitaries.
///
/// With `phase_optimized`, the distance is minimized over a global phase:
/// the optimum of the Frobenius surrogate `phi* = arg tr(U^dagger V)` is
/// applied, followed by one exact re-evaluation of the 2-norm.
pub fn spectral_distance(
    u: &Unitary,
    v: &Unitary,
    phase_optimized: bool,
) -> Result<f64, OperatorError> {
    if u.sites != v.sites {
        return Err(OperatorError::DimMismatch {
            a: u.dim(),
            b: v.dim(),
        });
    }
    if phase_optimized {
        let tr = inner_trace(&u.mat, &v.mat);
        let phi = if tr.norm() == 0.0 { 0.0 } else { -tr.arg() };
        let shifted = v.phased(phi);
        Ok(spectral_norm(&(&u.mat - &shifted.mat)))
    } else {
        Ok(spectral_norm(&(&u.mat - &v.mat)))
    }
}

/// Raw and phase-optimized distances in one pass.
pub fn distance_pair(u: &Unitary, v: &Unitary) -> Result<(f64, f64), OperatorError> {
    Ok((
        spectral_distance(u, v, false)?,
        spectral_distance(u, v, true)?,
    ))
}

/// Errors from operator construction and algebra.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("site {site} out of range for {n} spins")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("duplicate site {site} in Pauli factor list")]
    DuplicateSite { site: usize },
    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("dimension mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("hamiltonian spec inconsistent with couplings: {detail}")]
    SpecMismatch { detail: String },
    #[error("{sites} spins exceed the dense-representation cap of {max}", max = MAX_SITES)]
    TooManySites { sites: usize },
}
