//! Effective per-band coupling extraction for longitudinal schedules.
//!
//! Subset flips conjugate each `sigma^z_i sigma^z_j` term by the product
//! of the endpoint flip signs, and every longitudinal term commutes with
//! every other, so a drive-free schedule of subset flips and free
//! intervals composes exactly to `exp(-i sum_{i<j} a_{i,j} sigma^z_i
//! sigma^z_j)` with accumulated angles
//!
//! `a_{i,j} = sum_(free intervals) seconds * sign_M(i) * sign_M(j) * J_{i,j}`
//!
//! where `M` is the running xor of the flip masks.  Tracking the signs is
//! exact integer algebra, free of the modulo-2pi ambiguity a diagonal
//! phase readout would have; the matrix route stays available in tests as
//! an independent oracle.

use crate::physics::CouplingMatrix;
use crate::pulse::PulseKind;
use crate::schedule::{DriveToggle, PulseSchedule, ScheduleError, Step};

/// Relative tolerance for the per-band uniformity check.
const BAND_UNIFORMITY_TOL: f64 = 1e-9;

/// Effective coupling per band `n = 1..N-1`, normalized to the schedule's
/// total nominal span (`iterations * span`).
///
/// Requires a longitudinal schedule: subset-flip pulses and drive-off
/// frees only, with the flips cancelling overall.  Errors otherwise.
pub fn effective_neighbor_strengths(
    schedule: &PulseSchedule,
    c: &CouplingMatrix,
) -> Result<Vec<f64>, ScheduleError> {
    let n = schedule.meta.n;
    if n != c.len() {
        return Err(ScheduleError::SizeMismatch {
            schedule: n,
            couplings: c.len(),
        });
    }
    let mut mask = 0usize;
    let mut accumulated = vec![0.0f64; n * n];
    for (idx, step) in schedule.steps.iter().enumerate() {
        match step {
            Step::Pulse(spec) => match &spec.kind {
                PulseKind::SubsetFlipX(subset) => {
                    mask ^= subset.mask(n).map_err(ScheduleError::Pulse)?;
                }
                other => {
                    return Err(ScheduleError::NonDiagonalSchedule {
                        detail: format!("step {}: pulse {other:?} is not a subset flip", idx + 1),
                    })
                }
            },
            Step::Free { seconds, drive } => {
                if *drive != DriveToggle::Off {
                    return Err(ScheduleError::NonDiagonalSchedule {
                        detail: format!("step {}: the transverse drive is on", idx + 1),
                    });
                }
                for i in 1..=n {
                    let si = if mask & (1 << (n - i)) != 0 { -1.0 } else { 1.0 };
                    for j in (i + 1)..=n {
                        let sj = if mask & (1 << (n - j)) != 0 { -1.0 } else { 1.0 };
                        accumulated[(i - 1) * n + (j - 1)] += seconds * si * sj * c.jz(i, j);
                    }
                }
            }
        }
    }
    if mask != 0 {
        return Err(ScheduleError::NonDiagonalSchedule {
            detail: "subset flips do not cancel over the program".into(),
        });
    }

    let norm = schedule.meta.target.span * schedule.meta.target.iterations as f64;
    let reference = c.nn_jz().abs().max(f64::MIN_POSITIVE);
    let mut bands = Vec::with_capacity(n - 1);
    for band in 1..n {
        let value = accumulated[band] / norm; // pair (1, 1+band)
        for i in 2..=(n - band) {
            let v = accumulated[(i - 1) * n + (i - 1 + band)] / norm;
            if (v - value).abs() > BAND_UNIFORMITY_TOL * reference {
                return Err(ScheduleError::NonUniformBand { band });
            }
        }
        bands.push(value);
    }
    Ok(bands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{banded_weights, compile};
    use crate::schedule::{TargetKind, TargetSpec};

    fn chain(n: usize) -> CouplingMatrix {
        CouplingMatrix::uniform_chain(n, 4.0, 0.0)
    }

    fn bands_for(kind: TargetKind, n: usize, m: usize) -> Vec<f64> {
        let target = TargetSpec::new(kind, 1, 0.01, m);
        let c = chain(n);
        let s = compile(&target, &c).unwrap();
        effective_neighbor_strengths(&s, &c).unwrap()
    }

    #[test]
    fn equal_first_second_bands_match_two_ninths() {
        let c = chain(6);
        let bands = bands_for(TargetKind::EqualFirstSecond, 6, 3);
        let expect = 2.0 / 9.0 * c.nn_jz();
        assert!((bands[0] - expect).abs() < 1e-12 * c.nn_jz());
        assert!((bands[1] - expect).abs() < 1e-12 * c.nn_jz());
    }

    #[test]
    fn sign_inversion_negates_first_three_bands() {
        let c = chain(8);
        let bands = bands_for(TargetKind::SignInverted, 8, 1);
        for band in 1..=3usize {
            let bare = c.jz(1, 1 + band);
            assert!((bands[band - 1] + bare).abs() < 1e-12 * c.nn_jz(), "band {band}");
        }
        // Band four comes back with weight +3.
        assert!((bands[3] - 3.0 * c.jz(1, 5)).abs() < 1e-12 * c.nn_jz());
    }

    #[test]
    fn suppress2_zeroes_the_second_band() {
        let c = chain(6);
        let bands = bands_for(TargetKind::Suppress2, 6, 2);
        assert!((bands[0] - c.jz(1, 2)).abs() < 1e-12 * c.nn_jz());
        assert!(bands[1].abs() < 1e-12 * c.nn_jz());
        assert!((bands[2] - c.jz(1, 4)).abs() < 1e-12 * c.nn_jz());
    }

    #[test]
    fn all_band_tables_agree_with_sign_tracking() {
        for n in [4usize, 5, 6, 7, 8] {
            let c = chain(n);
            for kind in [
                TargetKind::OddInverted,
                TargetKind::EvenFlip,
                TargetKind::Suppress2,
                TargetKind::EqualFirstSecond,
                TargetKind::SignInverted,
                TargetKind::Suppress23,
                TargetKind::Suppress2to6,
            ] {
                let weights = banded_weights(&kind, n).unwrap();
                let bands = bands_for(kind.clone(), n, 1);
                for band in 1..n {
                    let expect = weights[band - 1] * c.jz(1, 1 + band);
                    assert!(
                        (bands[band - 1] - expect).abs() < 1e-11 * c.nn_jz(),
                        "{kind:?} N={n} band {band}: {} vs {expect}",
                        bands[band - 1]
                    );
                }
            }
        }
    }

    #[test]
    fn bare_evolution_reproduces_dipole_ratios() {
        let c = chain(5);
        // A zero-strength drive is no drive at all.
        let target = TargetSpec::new(TargetKind::IsingDipole { eta: 0.0 }, 1, 0.02, 1);
        let s = compile(&target, &c).unwrap();
        let bands = effective_neighbor_strengths(&s, &c).unwrap();
        assert!((bands[0] / bands[1] - 8.0).abs() < 1e-9);
        assert!((bands[0] / bands[2] - 27.0).abs() < 1e-9);
    }

    #[test]
    fn driven_schedule_is_rejected() {
        let c = chain(4);
        let target = TargetSpec::new(TargetKind::IsingDipole { eta: 1.0 }, 1, 0.02, 1);
        let s = compile(&target, &c).unwrap();
        assert!(matches!(
            effective_neighbor_strengths(&s, &c),
            Err(ScheduleError::NonDiagonalSchedule { .. })
        ));
    }

    #[test]
    fn hadamard_schedule_is_rejected() {
        let c = chain(4);
        let target = TargetSpec::new(
            TargetKind::MixedXYZ {
                tau: [0.4, 0.3, 0.3],
                eta: 0.5,
            },
            1,
            0.02,
            1,
        );
        let s = compile(&target, &c).unwrap();
        assert!(matches!(
            effective_neighbor_strengths(&s, &c),
            Err(ScheduleError::NonDiagonalSchedule { .. })
        ));
    }
}
