//! First- and fourth-order split-operator composition.
//!
//! The target evolution `exp(-i sum_i tau_i A_i t)` with `tau_i = t_i / t`,
//! `t = sum_i t_i` is approximated by ordered products of single-block
//! exponentials:
//!
//! * first order — one forward sweep `prod_i exp(-i A_i t_i)`, error O(t^2);
//! * fourth order — an 18-block pattern of forward (`S_k`) and reversed
//!   (`Sbar_k`) sweeps with step scale `k/12`, including two negative-scale
//!   blocks, error O(t^5).
//!
//! The blocks are evaluated as exact exponentials from cached
//! eigendecompositions, which is the reference point for the error-scaling
//! analysis; how a negative-scale block maps onto hardware pulses is the
//! schedule compiler's concern, not this module's.

use crate::operator::{Eigensystem, Operator, Unitary};

/// Sweep direction within one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sweep {
    Forward,
    Reversed,
}

/// The fourth-order block pattern: (direction, step scale numerator k),
/// with each block stepping `k/12` of the nominal block times.  Read left
/// to right as an operator product (the rightmost factor acts first).
const FOURTH_ORDER_PATTERN: [(Sweep, i32); 18] = [
    (Sweep::Reversed, 1),
    (Sweep::Forward, 1),
    (Sweep::Reversed, 1),
    (Sweep::Forward, -2),
    (Sweep::Reversed, 1),
    (Sweep::Reversed, 1),
    (Sweep::Reversed, 1),
    (Sweep::Reversed, 1),
    (Sweep::Forward, 1),
    (Sweep::Reversed, 1),
    (Sweep::Forward, 1),
    (Sweep::Forward, 1),
    (Sweep::Forward, 1),
    (Sweep::Forward, 1),
    (Sweep::Reversed, -2),
    (Sweep::Forward, 1),
    (Sweep::Reversed, 1),
    (Sweep::Forward, 1),
];

/// A set of non-commuting blocks `(A_i, t_i)` to interleave.
pub struct BlockSet {
    eigs: Vec<Eigensystem>,
    times: Vec<f64>,
    sites: usize,
    target: Eigensystem,
    total: f64,
}

impl BlockSet {
    /// Precompute eigendecompositions for the blocks and for the target
    /// `sum_i tau_i A_i`.
    pub fn new(blocks: &[(Operator, f64)]) -> Self {
        assert!(!blocks.is_empty());
        let sites = blocks[0].0.sites();
        let total: f64 = blocks.iter().map(|(_, t)| t).sum();
        assert!(total > 0.0, "block times must have positive total");
        let mut target = Operator::zeros(sites).expect("valid site count");
        for (op, t) in blocks {
            assert_eq!(op.sites(), sites);
            target = &target + &(op * (t / total));
        }
        Self {
            eigs: blocks.iter().map(|(op, _)| op.eigensystem()).collect(),
            times: blocks.iter().map(|(_, t)| *t).collect(),
            sites,
            target: target.eigensystem(),
            total,
        }
    }

    /// Total block time `t`.
    pub fn span(&self) -> f64 {
        self.total
    }

    /// The ideal evolution `exp(-i sum tau_i A_i t)`.
    pub fn target_unitary(&self) -> Unitary {
        self.target.evolve(self.total)
    }

    /// Same target over an arbitrary span (for iterated comparisons).
    pub fn target_unitary_for(&self, span: f64) -> Unitary {
        self.target.evolve(span)
    }

    /// One forward sweep `prod_i exp(-i A_i t_i)` (first-order splitting).
    pub fn first_order_unitary(&self) -> Unitary {
        let mut acc = Unitary::identity(self.sites).expect("valid site count");
        // Product A_1 ... A_n: rightmost acts first, so accumulate from the
        // last block.
        for (eig, &t) in self.eigs.iter().zip(&self.times).rev() {
            acc = &eig.evolve(t) * &acc;
        }
        acc
    }

    /// The fourth-order 18-block composition.
    pub fn fourth_order_unitary(&self) -> Unitary {
        let step = |idx: usize, k: i32| self.eigs[idx].evolve(k as f64 / 12.0 * self.times[idx]);
        // Cache the four distinct step kinds per block: k = 1 and k = -2.
        let fwd1: Vec<Unitary> = (0..self.eigs.len()).map(|i| step(i, 1)).collect();
        let fwd_neg2: Vec<Unitary> = (0..self.eigs.len()).map(|i| step(i, -2)).collect();

        let mut acc = Unitary::identity(self.sites).expect("valid site count");
        for &(sweep, k) in FOURTH_ORDER_PATTERN.iter().rev() {
            let steps = if k == 1 { &fwd1 } else { &fwd_neg2 };
            match sweep {
                Sweep::Forward => {
                    for u in steps.iter().rev() {
                        acc = u * &acc;
                    }
                }
                Sweep::Reversed => {
                    for u in steps.iter() {
                        acc = u * &acc;
                    }
                }
            }
        }
        acc
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Standard error of the slope from [`linear_fit`] residuals.
pub fn slope_stderr(x: &[f64], y: &[f64]) -> f64 {
    let (slope, intercept) = linear_fit(x, y);
    let n = x.len();
    if n <= 2 {
        return f64::INFINITY;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let mut ss_res = 0.0;
    let mut sxx = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let r = yi - (slope * xi + intercept);
        ss_res += r * r;
        sxx += (xi - mx) * (xi - mx);
    }
    (ss_res / ((n - 2) as f64) / sxx).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{coupling_sum, transverse_drive};
    use crate::operator::spectral_distance;
    use crate::pauli::Axis;
    use crate::physics::CouplingMatrix;

    fn xy_blocks(n: usize, jz: f64, eta: f64, t: f64) -> BlockSet {
        let c = CouplingMatrix::uniform_chain(n, jz, 0.0);
        let a1 = &transverse_drive(n, eta / 2.0) + &coupling_sum(&c, Axis::Z);
        let a2 = &transverse_drive(n, eta / 2.0) + &coupling_sum(&c, Axis::Y);
        BlockSet::new(&[(a1, t / 2.0), (a2, t / 2.0)])
    }

    #[test]
    fn first_order_error_scales_quadratically() {
        let jz = 1.0;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for jt in [0.05, 0.08, 0.125, 0.2, 0.32] {
            let set = xy_blocks(4, jz, jz, jt / jz);
            let err = spectral_distance(&set.target_unitary(), &set.first_order_unitary(), true)
                .unwrap();
            xs.push(jt.ln());
            ys.push(err.ln());
        }
        let (slope, _) = linear_fit(&xs, &ys);
        assert!((slope - 2.0).abs() < 0.3, "slope = {slope}");
    }

    #[test]
    fn fourth_order_error_scales_as_fifth_power() {
        let jz = 1.0;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for jt in [0.05, 0.08, 0.125, 0.2, 0.32] {
            let set = xy_blocks(4, jz, jz, jt / jz);
            let err = spectral_distance(&set.target_unitary(), &set.fourth_order_unitary(), true)
                .unwrap();
            xs.push(jt.ln());
            ys.push(err.ln());
        }
        let (slope, _) = linear_fit(&xs, &ys);
        assert!((slope - 5.0).abs() < 0.3, "slope = {slope}");
    }

    #[test]
    fn step_scales_sum_to_the_full_span() {
        // Sixteen scale-1 blocks and two scale-(-2) blocks add up to 12/12.
        let total: i32 = FOURTH_ORDER_PATTERN.iter().map(|(_, k)| *k).sum();
        assert_eq!(total, 12);
    }

    #[test]
    fn commuting_blocks_compose_exactly() {
        let c = CouplingMatrix::uniform_chain(3, 2.0, 0.0);
        let a1 = coupling_sum(&c, Axis::Z);
        let a2 = coupling_sum(&c, Axis::Z);
        let set = BlockSet::new(&[(a1, 0.2), (a2, 0.3)]);
        for u in [set.first_order_unitary(), set.fourth_order_unitary()] {
            assert!(spectral_distance(&set.target_unitary(), &u, true).unwrap() < 1e-11);
        }
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (slope, intercept) = linear_fit(&x, &y);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
    }
}
