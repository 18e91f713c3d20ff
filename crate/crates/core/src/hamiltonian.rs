//! Spin-Hamiltonian builders.
//!
//! Every builder returns a Hermitian [`Operator`] in units of rad/s.  The
//! available shapes mirror the effective models of the trapped-electron
//! chain:
//!
//! * `FullSpin` — per-site precession plus the full long-range coupling,
//!   `sum_i (omega_s,i/2) sigma^z_i + (1/2) sum_{i>j} (2 J^z sigma^z sigma^z
//!   - J^xy sigma^x sigma^x - J^xy sigma^y sigma^y)`;
//! * `IsingZ` — the interaction-picture longitudinal part
//!   `sum_{i>j} J^z_{i,j} sigma^z_i sigma^z_j`;
//! * `TransverseDrive` — the steady-drive effective field `eta sum sigma^x`;
//! * `NeighborBand` — one coupling band `sum_i J_{i,i+n} sigma^z sigma^z`;
//! * `MixedXYZ` — the tunable model `tau_1 eta sum sigma^x + tau_1 zz +
//!   tau_2 xx + tau_3 yy` with all couplings drawn from `J^z`;
//! * `Custom` — an arbitrary real combination of Pauli strings.

use crate::matrix::CMat;
use crate::operator::{Operator, OperatorError};
use crate::pauli::{pauli_term_operator, site_bit, z_sign, Axis, PauliTerm};
use crate::physics::CouplingMatrix;
use num_complex::Complex64 as C64;

/// Hamiltonian shape selector.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    FullSpin,
    IsingZ,
    TransverseDrive { eta: f64 },
    NeighborBand { band: usize },
    MixedXYZ { tau: [f64; 3], eta: f64 },
    Custom(Vec<(f64, PauliTerm)>),
}

/// Build the dense Hamiltonian for `kind` over the chain described by `c`.
pub fn build_hamiltonian(
    kind: &HamiltonianKind,
    c: &CouplingMatrix,
) -> Result<Operator, OperatorError> {
    let n = c.len();
    if n == 0 || n > crate::operator::MAX_SITES {
        return Err(OperatorError::TooManySites { sites: n });
    }
    match kind {
        HamiltonianKind::FullSpin => build_full_spin(c),
        HamiltonianKind::IsingZ => {
            let weights = vec![1.0; n.saturating_sub(1)];
            Ok(banded_hz(c, &weights))
        }
        HamiltonianKind::TransverseDrive { eta } => Ok(transverse_drive(n, *eta)),
        HamiltonianKind::NeighborBand { band } => {
            if *band == 0 || *band >= n {
                return Err(OperatorError::SpecMismatch {
                    detail: format!("band {band} outside 1..={}", n - 1),
                });
            }
            let mut weights = vec![0.0; n - 1];
            weights[band - 1] = 1.0;
            Ok(banded_hz(c, &weights))
        }
        HamiltonianKind::MixedXYZ { tau, eta } => {
            if tau.iter().any(|t| *t < 0.0) {
                return Err(OperatorError::SpecMismatch {
                    detail: "negative time fraction".into(),
                });
            }
            if tau.iter().sum::<f64>() > 1.0 + 1e-9 {
                return Err(OperatorError::SpecMismatch {
                    detail: "time fractions exceed 1".into(),
                });
            }
            build_mixed_xyz(c, *tau, *eta)
        }
        HamiltonianKind::Custom(terms) => {
            let mut acc = Operator::zeros(n)?;
            for (coeff, term) in terms {
                let op = pauli_term_operator(n, term)?;
                acc = &acc + &(&op * *coeff);
            }
            Ok(acc)
        }
    }
}

/// `sum_n w_n H^z_n` with `H^z_n = sum_i J^z_{i,i+n} sigma^z_i sigma^z_{i+n}`.
///
/// Diagonal in the computational basis; `weights[k]` scales band `k + 1`.
pub fn banded_hz(c: &CouplingMatrix, weights: &[f64]) -> Operator {
    let n = c.len();
    let dim = 1usize << n;
    let mut mat = CMat::zeros(dim, dim);
    for b in 0..dim {
        let mut e = 0.0;
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let band = k + 1;
            for i in 1..=(n - band) {
                e += w * c.jz(i, i + band) * z_sign(b, i, n) * z_sign(b, i + band, n);
            }
        }
        mat[(b, b)] = C64::new(e, 0.0);
    }
    Operator::from_parts_unchecked(mat, n)
}

/// `sum_{i>j} J^z_{i,j} sigma^a_i sigma^a_j` for a chosen axis.
///
/// The coupling magnitudes always come from `J^z`; the axis only selects
/// the operator direction (the rotated-coupling building block).
pub fn coupling_sum(c: &CouplingMatrix, axis: Axis) -> Operator {
    let n = c.len();
    let dim = 1usize << n;
    let mut mat = CMat::zeros(dim, dim);
    match axis {
        Axis::Z => {
            for b in 0..dim {
                let mut e = 0.0;
                for i in 1..=n {
                    for j in (i + 1)..=n {
                        e += c.jz(i, j) * z_sign(b, i, n) * z_sign(b, j, n);
                    }
                }
                mat[(b, b)] = C64::new(e, 0.0);
            }
        }
        Axis::X | Axis::Y => {
            for b in 0..dim {
                for i in 1..=n {
                    for j in (i + 1)..=n {
                        let flip = (1 << (n - i)) | (1 << (n - j));
                        let row = b ^ flip;
                        let phase = match axis {
                            Axis::X => 1.0,
                            // sigma^y sigma^y: -1 when the two bits agree,
                            // +1 when they differ.
                            Axis::Y => {
                                if site_bit(b, i, n) == site_bit(b, j, n) {
                                    -1.0
                                } else {
                                    1.0
                                }
                            }
                            Axis::Z => unreachable!(),
                        };
                        mat[(row, b)] += C64::new(c.jz(i, j) * phase, 0.0);
                    }
                }
            }
        }
    }
    Operator::from_parts_unchecked(mat, n)
}

/// `eta sum_i sigma^x_i`.
pub fn transverse_drive(n: usize, eta: f64) -> Operator {
    let dim = 1usize << n;
    let mut mat = CMat::zeros(dim, dim);
    for b in 0..dim {
        for i in 1..=n {
            let row = b ^ (1 << (n - i));
            mat[(row, b)] += C64::new(eta, 0.0);
        }
    }
    Operator::from_parts_unchecked(mat, n)
}

/// `sum_i (omega_i / 2) sigma^z_i` for per-site frequencies.
pub fn precession(omegas: &[f64]) -> Operator {
    let n = omegas.len();
    let dim = 1usize << n;
    let mut mat = CMat::zeros(dim, dim);
    for b in 0..dim {
        let mut e = 0.0;
        for i in 1..=n {
            e += 0.5 * omegas[i - 1] * z_sign(b, i, n);
        }
        mat[(b, b)] = C64::new(e, 0.0);
    }
    Operator::from_parts_unchecked(mat, n)
}

fn build_full_spin(c: &CouplingMatrix) -> Result<Operator, OperatorError> {
    let n = c.len();
    let dim = 1usize << n;
    let mut mat = CMat::zeros(dim, dim);
    for b in 0..dim {
        let mut e = 0.0;
        for i in 1..=n {
            e += 0.5 * c.omega_s[i - 1] * z_sign(b, i, n);
            for j in (i + 1)..=n {
                e += c.jz(i, j) * z_sign(b, i, n) * z_sign(b, j, n);
            }
        }
        mat[(b, b)] = C64::new(e, 0.0);
    }
    // Transverse part: -(1/2) J^xy (sigma^x sigma^x + sigma^y sigma^y)
    // couples |..up..down..> with |..down..up..> with matrix element -J^xy.
    for b in 0..dim {
        for i in 1..=n {
            for j in (i + 1)..=n {
                if site_bit(b, i, n) != site_bit(b, j, n) {
                    let row = b ^ ((1 << (n - i)) | (1 << (n - j)));
                    mat[(row, b)] += C64::new(-c.jxy(i, j), 0.0);
                }
            }
        }
    }
    Ok(Operator::from_parts_unchecked(mat, n))
}

fn build_mixed_xyz(c: &CouplingMatrix, tau: [f64; 3], eta: f64) -> Result<Operator, OperatorError> {
    let n = c.len();
    let drive = transverse_drive(n, tau[0] * eta);
    let zz = &coupling_sum(c, Axis::Z) * tau[0];
    let xx = &coupling_sum(c, Axis::X) * tau[1];
    let yy = &coupling_sum(c, Axis::Y) * tau[2];
    Ok(&(&(&drive + &zz) + &xx) + &yy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::spectral_distance;

    #[test]
    fn two_spin_ising_spectrum() {
        let j = 4.2;
        let c = CouplingMatrix::uniform_chain(2, j, 0.0);
        let h = build_hamiltonian(&HamiltonianKind::IsingZ, &c).unwrap();
        let mut evals: Vec<f64> = h.diagonal();
        evals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in evals.iter().zip([-j, -j, j, j]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn three_site_bands_follow_dipole_ratio() {
        let c = CouplingMatrix::uniform_chain(3, 8.0, 0.0);
        let h = build_hamiltonian(&HamiltonianKind::IsingZ, &c).unwrap();
        let h1 = build_hamiltonian(&HamiltonianKind::NeighborBand { band: 1 }, &c).unwrap();
        let h2 = build_hamiltonian(&HamiltonianKind::NeighborBand { band: 2 }, &c).unwrap();
        let sum = &h1 + &h2;
        assert!(h.commutator_max_norm(&sum) == 0.0);
        for b in 0..h.dim() {
            assert!((h.entry(b, b) - sum.entry(b, b)).norm() < 1e-12);
        }
        // Band coefficients 8 : 1.
        assert_eq!(c.jz(1, 2) / c.jz(1, 3), 8.0);
    }

    #[test]
    fn full_spin_preserves_total_magnetization() {
        // A chain with transverse-coupling weight alongside the
        // longitudinal part.
        let c = CouplingMatrix::from_parts(
            4,
            (1..=4)
                .flat_map(|i| (1..=4).map(move |j| if i == j { 0.0 } else { 5.0 }))
                .collect(),
            (1..=4)
                .flat_map(|i| (1..=4).map(move |j| if i == j { 0.0 } else { 0.7 }))
                .collect(),
            vec![100.0; 4],
        );
        let h = build_hamiltonian(&HamiltonianKind::FullSpin, &c).unwrap();
        let total_z = build_hamiltonian(
            &HamiltonianKind::Custom(vec![
                (1.0, PauliTerm::new([(1, Axis::Z)]).unwrap()),
                (1.0, PauliTerm::new([(2, Axis::Z)]).unwrap()),
                (1.0, PauliTerm::new([(3, Axis::Z)]).unwrap()),
                (1.0, PauliTerm::new([(4, Axis::Z)]).unwrap()),
            ]),
            &c,
        )
        .unwrap();
        assert!(h.commutator_max_norm(&total_z) < 1e-12 * h.max_abs());
    }

    #[test]
    fn mixed_model_reduces_to_its_pieces() {
        let c = CouplingMatrix::uniform_chain(3, 2.0, 0.0);
        let eta = 1.3;
        let h = build_hamiltonian(
            &HamiltonianKind::MixedXYZ {
                tau: [1.0, 0.0, 0.0],
                eta,
            },
            &c,
        )
        .unwrap();
        let drive = transverse_drive(3, eta);
        let zz = coupling_sum(&c, Axis::Z);
        let expected = &drive + &zz;
        let t = 0.11;
        assert!(spectral_distance(&h.expm(t), &expected.expm(t), false).unwrap() < 1e-12);
    }

    #[test]
    fn rotated_coupling_sums_match_pauli_strings() {
        let c = CouplingMatrix::uniform_chain(3, 1.7, 0.0);
        for axis in [Axis::X, Axis::Y] {
            let fast = coupling_sum(&c, axis);
            let mut slow = Operator::zeros(3).unwrap();
            for i in 1..=3usize {
                for j in (i + 1)..=3 {
                    let term = PauliTerm::new([(i, axis), (j, axis)]).unwrap();
                    let op = pauli_term_operator(3, &term).unwrap();
                    slow = &slow + &(&op * c.jz(i, j));
                }
            }
            for b in 0..fast.dim() {
                for a in 0..fast.dim() {
                    assert!((fast.entry(a, b) - slow.entry(a, b)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn invalid_band_rejected() {
        let c = CouplingMatrix::uniform_chain(3, 1.0, 0.0);
        assert!(build_hamiltonian(&HamiltonianKind::NeighborBand { band: 3 }, &c).is_err());
        assert!(build_hamiltonian(&HamiltonianKind::NeighborBand { band: 0 }, &c).is_err());
    }

    #[test]
    fn invalid_time_fractions_rejected() {
        let c = CouplingMatrix::uniform_chain(2, 1.0, 0.0);
        assert!(build_hamiltonian(
            &HamiltonianKind::MixedXYZ {
                tau: [0.8, 0.4, 0.0],
                eta: 1.0
            },
            &c
        )
        .is_err());
    }
}
