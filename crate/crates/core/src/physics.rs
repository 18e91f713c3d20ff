//! Trap parameters, motional frequencies and effective spin-spin couplings.
//!
//! An array of electrons in micro-Penning traps maps onto an interacting
//! spin chain.  This module derives, from the trap fields and geometry:
//!
//! * the motional frequencies (axial, cyclotron, magnetron) and the spin
//!   precession frequencies,
//! * the dimensionless gradient coupling `epsilon` between spin and axial
//!   motion,
//! * the pairwise couplings `J^z` and `J^xy` of the effective spin
//!   Hamiltonian, with the dipole-like `1/d^3` dependence,
//! * the residual error budget of the canonical transformation that
//!   decouples spins from the motion.
//!
//! Everything is stored as an angular frequency (rad/s).  All functions are
//! pure; the constants table is passed explicitly.

use crate::constants::Constants;
use thiserror::Error;

/// Inter-trap spacing specification.
#[derive(Debug, Clone, PartialEq)]
pub enum Spacing {
    /// Equidistant traps: `d_{i,j} = |i - j| * d`.
    Uniform(f64),
    /// Explicit trap-center positions along the array axis (meters).
    Positions(Vec<f64>),
}

/// Direct frequency overrides bypassing the electrode/field geometry.
///
/// When present, `omega_z` and per-site `omega_s` take precedence over
/// `electrode_voltage`, `trap_length` and `b0`.  The bare cyclotron
/// frequency is recovered from the spin frequency through the gyromagnetic
/// factor (`omega_s = (g/2) |e| B0 / m_e`).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectFrequencies {
    /// Axial angular frequency (rad/s), common to all traps.
    pub omega_z: f64,
    /// Spin precession angular frequency per site (rad/s).
    pub omega_s: Vec<f64>,
}

/// Physical inputs describing the trap array.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapParams {
    /// Number of trapped electrons.
    pub n: usize,
    /// Static trapping field per site (tesla).
    pub b0: Vec<f64>,
    /// Linear magnetic gradient `b` (tesla/meter); zero disables the
    /// spin-motion coupling and with it every spin-spin coupling.
    pub gradient: f64,
    /// Electrode potential difference `V0` (volt).
    pub electrode_voltage: Option<f64>,
    /// Characteristic trap length (meter).
    pub trap_length: Option<f64>,
    /// Inter-trap spacing.
    pub spacing: Spacing,
    /// Gyromagnetic factor.
    pub g_factor: f64,
    /// Optional direct frequency overrides.
    pub overrides: Option<DirectFrequencies>,
}

impl TrapParams {
    /// Convenience constructor for a uniform chain defined by geometry.
    pub fn uniform(
        n: usize,
        b0: f64,
        gradient: f64,
        electrode_voltage: f64,
        trap_length: f64,
        spacing: f64,
    ) -> Self {
        Self {
            n,
            b0: vec![b0; n],
            gradient,
            electrode_voltage: Some(electrode_voltage),
            trap_length: Some(trap_length),
            spacing: Spacing::Uniform(spacing),
            g_factor: crate::constants::DEFAULT_G_FACTOR,
            overrides: None,
        }
    }

    /// Convenience constructor for a uniform chain defined by measured
    /// frequencies instead of geometry.
    pub fn from_frequencies(
        n: usize,
        omega_z: f64,
        omega_s: f64,
        gradient: f64,
        spacing: f64,
    ) -> Self {
        Self {
            n,
            b0: Vec::new(),
            gradient,
            electrode_voltage: None,
            trap_length: None,
            spacing: Spacing::Uniform(spacing),
            g_factor: crate::constants::DEFAULT_G_FACTOR,
            overrides: Some(DirectFrequencies {
                omega_z,
                omega_s: vec![omega_s; n],
            }),
        }
    }

    /// Distance between trap centers `i` and `j` (1-based sites).
    pub fn spacing_between(&self, i: usize, j: usize) -> f64 {
        match &self.spacing {
            Spacing::Uniform(d) => (i as f64 - j as f64).abs() * d,
            Spacing::Positions(x) => (x[i - 1] - x[j - 1]).abs(),
        }
    }

    fn validate(&self) -> Result<(), PhysicsError> {
        if self.n < 2 {
            return Err(PhysicsError::NonPositiveInput {
                name: "n",
                detail: "at least two traps are required".into(),
            });
        }
        if !(self.gradient >= 0.0 && self.gradient.is_finite()) {
            return Err(PhysicsError::NonPositiveInput {
                name: "gradient",
                detail: "must be finite and >= 0".into(),
            });
        }
        if self.g_factor <= 0.0 {
            return Err(PhysicsError::NonPositiveInput {
                name: "g_factor",
                detail: "must be > 0".into(),
            });
        }
        match &self.spacing {
            Spacing::Uniform(d) if *d > 0.0 => {}
            Spacing::Uniform(_) => {
                return Err(PhysicsError::NonPositiveInput {
                    name: "spacing",
                    detail: "must be > 0".into(),
                })
            }
            Spacing::Positions(x) => {
                if x.len() != self.n {
                    return Err(PhysicsError::NonPositiveInput {
                        name: "spacing",
                        detail: format!("expected {} positions, got {}", self.n, x.len()),
                    });
                }
            }
        }
        if let Some(over) = &self.overrides {
            if over.omega_z <= 0.0 {
                return Err(PhysicsError::NonPositiveInput {
                    name: "omega_z",
                    detail: "must be > 0".into(),
                });
            }
            if over.omega_s.len() != self.n || over.omega_s.iter().any(|w| *w <= 0.0) {
                return Err(PhysicsError::NonPositiveInput {
                    name: "omega_s",
                    detail: "one positive value per site required".into(),
                });
            }
        } else {
            let v0 = self.electrode_voltage.ok_or(PhysicsError::MissingParameters {
                name: "electrode_voltage",
            })?;
            let ell = self.trap_length.ok_or(PhysicsError::MissingParameters {
                name: "trap_length",
            })?;
            if v0 <= 0.0 {
                return Err(PhysicsError::NonPositiveInput {
                    name: "electrode_voltage",
                    detail: "must be > 0".into(),
                });
            }
            if ell <= 0.0 {
                return Err(PhysicsError::NonPositiveInput {
                    name: "trap_length",
                    detail: "must be > 0".into(),
                });
            }
            if self.b0.len() != self.n || self.b0.iter().any(|b| *b <= 0.0) {
                return Err(PhysicsError::NonPositiveInput {
                    name: "b0",
                    detail: "one positive field per site required".into(),
                });
            }
        }
        Ok(())
    }
}

/// Derived motional and spin frequencies (all angular, rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    /// Axial frequency, common to all traps.
    pub omega_z: f64,
    /// Shifted cyclotron frequency per site.
    pub omega_c: Vec<f64>,
    /// Magnetron frequency per site.
    pub omega_m: Vec<f64>,
    /// Spin precession frequency per site.
    pub omega_s: Vec<f64>,
    /// Anomaly frequency `omega_s - omega_c` per site.
    pub omega_a: Vec<f64>,
    /// Dimensionless gradient coupling between spin and axial motion.
    pub epsilon: f64,
}

impl FrequencySet {
    /// Number of sites.
    pub fn len(&self) -> usize {
        self.omega_c.len()
    }

    /// True when the set is empty (never the case for a valid derivation).
    pub fn is_empty(&self) -> bool {
        self.omega_c.is_empty()
    }

    /// Human-readable soft warnings (hierarchy margins, large epsilon).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.epsilon > 0.1 {
            out.push(format!(
                "gradient coupling epsilon = {} exceeds 0.1; perturbative derivation degrades",
                self.epsilon
            ));
        }
        out
    }
}

/// Relative hierarchy bound required between successive motional
/// frequencies (`omega_m << omega_z << omega_c`).
pub const HIERARCHY_LIMIT: f64 = 1e-2;

const CYCLOTRON_FIXED_POINT_TOL: f64 = 1e-12;

/// Derive the motional/spin frequency set from trap parameters.
pub fn derive_frequencies(
    params: &TrapParams,
    consts: &Constants,
) -> Result<FrequencySet, PhysicsError> {
    params.validate()?;
    let e = consts.elementary_charge;
    let m = consts.electron_mass;

    // Axial frequency and per-site bare cyclotron frequency, either from
    // geometry or from direct overrides.
    let (omega_z, omega_c0, omega_s): (f64, Vec<f64>, Vec<f64>) = match &params.overrides {
        Some(over) => {
            let omega_c0 = over
                .omega_s
                .iter()
                .map(|ws| 2.0 * ws / params.g_factor)
                .collect();
            (over.omega_z, omega_c0, over.omega_s.clone())
        }
        None => {
            let v0 = params.electrode_voltage.expect("validated");
            let ell = params.trap_length.expect("validated");
            let omega_z = (2.0 * e * v0 / (m * ell * ell)).sqrt();
            let omega_c0: Vec<f64> = params.b0.iter().map(|b0| e * b0 / m).collect();
            let omega_s = params
                .b0
                .iter()
                .map(|b0| params.g_factor * e * b0 / (2.0 * m))
                .collect();
            (omega_z, omega_c0, omega_s)
        }
    };

    // Shifted cyclotron and magnetron frequencies solve the coupled pair
    //   omega_c = omega_c0 - omega_m,  omega_m = omega_z^2 / (2 omega_c)
    // by fixed-point iteration from omega_c = omega_c0.
    let mut omega_c = Vec::with_capacity(params.n);
    let mut omega_m = Vec::with_capacity(params.n);
    for &wc0 in &omega_c0 {
        let mut wc = wc0;
        let mut converged = false;
        for _ in 0..64 {
            let next = wc0 - omega_z * omega_z / (2.0 * wc);
            if next <= 0.0 || !next.is_finite() {
                return Err(PhysicsError::HierarchyViolation {
                    detail: "cyclotron fixed point left the physical branch".into(),
                });
            }
            let rel = ((next - wc) / next).abs();
            wc = next;
            if rel < CYCLOTRON_FIXED_POINT_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(PhysicsError::Convergence {
                detail: "cyclotron/magnetron fixed point did not converge".into(),
            });
        }
        omega_c.push(wc);
        omega_m.push(omega_z * omega_z / (2.0 * wc));
    }

    for i in 0..params.n {
        let m_over_z = omega_m[i] / omega_z;
        let z_over_c = omega_z / omega_c[i];
        if m_over_z >= HIERARCHY_LIMIT || z_over_c >= HIERARCHY_LIMIT {
            return Err(PhysicsError::HierarchyViolation {
                detail: format!(
                    "site {}: omega_m/omega_z = {m_over_z:.3e}, omega_z/omega_c = {z_over_c:.3e} \
                     (each must stay below {HIERARCHY_LIMIT:e})",
                    i + 1
                ),
            });
        }
    }

    let omega_a = omega_s
        .iter()
        .zip(&omega_c)
        .map(|(ws, wc)| ws - wc)
        .collect();

    // epsilon = |e| b / (m omega_z) * sqrt(hbar / (2 m omega_z))
    let epsilon =
        e * params.gradient / (m * omega_z) * (consts.hbar / (2.0 * m * omega_z)).sqrt();

    Ok(FrequencySet {
        omega_z,
        omega_c,
        omega_m,
        omega_s,
        omega_a,
        epsilon,
    })
}

/// Pairwise effective couplings and per-site spin frequencies.
///
/// `jz` and `jxy` are symmetric with zero diagonal, in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    jz: Vec<f64>,
    jxy: Vec<f64>,
    /// Spin precession frequency per site (rad/s).
    pub omega_s: Vec<f64>,
}

impl CouplingMatrix {
    /// Number of sites.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the chain is empty (never produced by constructors).
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Longitudinal coupling between 1-based sites `i` and `j`.
    pub fn jz(&self, i: usize, j: usize) -> f64 {
        self.jz[(i - 1) * self.n + (j - 1)]
    }

    /// Transverse coupling between 1-based sites `i` and `j`.
    pub fn jxy(&self, i: usize, j: usize) -> f64 {
        self.jxy[(i - 1) * self.n + (j - 1)]
    }

    /// Nearest-neighbor longitudinal coupling `J^z_{1,2}`.
    pub fn nn_jz(&self) -> f64 {
        self.jz(1, 2)
    }

    /// Synthetic uniform chain with a dipole-like coupling profile
    /// `J^z_{i,j} = jz_nn / |i-j|^3`, vanishing transverse coupling and a
    /// common spin frequency.  Used for sweeps where only the coupling
    /// topology matters.
    pub fn uniform_chain(n: usize, jz_nn: f64, omega_s: f64) -> Self {
        let mut jz = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let sep = (i as f64 - j as f64).abs();
                    jz[i * n + j] = jz_nn / (sep * sep * sep);
                }
            }
        }
        Self {
            n,
            jz,
            jxy: vec![0.0; n * n],
            omega_s: vec![omega_s; n],
        }
    }

    /// Build directly from explicit matrices (row-major, `n * n` entries).
    pub fn from_parts(n: usize, jz: Vec<f64>, jxy: Vec<f64>, omega_s: Vec<f64>) -> Self {
        assert_eq!(jz.len(), n * n);
        assert_eq!(jxy.len(), n * n);
        assert_eq!(omega_s.len(), n);
        Self { n, jz, jxy, omega_s }
    }
}

/// Compute the coupling matrices from a frequency set and trap geometry.
pub fn coupling_constants(
    freqs: &FrequencySet,
    params: &TrapParams,
    consts: &Constants,
) -> Result<CouplingMatrix, PhysicsError> {
    params.validate()?;
    let n = params.n;
    let e = consts.elementary_charge;
    let m = consts.electron_mass;
    let eps0 = consts.vacuum_permittivity;
    let half_g_sq = (params.g_factor / 2.0) * (params.g_factor / 2.0);
    let eps_sq = freqs.epsilon * freqs.epsilon;

    let mut jz = vec![0.0; n * n];
    let mut jxy = vec![0.0; n * n];
    for i in 1..=n {
        for j in (i + 1)..=n {
            let d = params.spacing_between(i, j);
            if d == 0.0 {
                return Err(PhysicsError::ZeroSpacing { i, j });
            }
            // Coulomb-mediated axial coupling strength.
            let xi = e * e / (8.0 * std::f64::consts::PI * eps0 * m * freqs.omega_z * d * d * d);
            let jz_ij = half_g_sq * xi * eps_sq;
            // Transverse coupling, suppressed by the frequency hierarchy.
            // Uses both sites' anomaly/cyclotron frequencies so the matrix
            // stays symmetric for site-dependent fields.
            let wz4 = freqs.omega_z.powi(4);
            let denom =
                4.0 * freqs.omega_a[i - 1] * freqs.omega_a[j - 1] * freqs.omega_c[i - 1]
                    * freqs.omega_c[j - 1];
            let jxy_ij = jz_ij * wz4 / denom;
            jz[(i - 1) * n + (j - 1)] = jz_ij;
            jz[(j - 1) * n + (i - 1)] = jz_ij;
            jxy[(i - 1) * n + (j - 1)] = jxy_ij;
            jxy[(j - 1) * n + (i - 1)] = jxy_ij;
        }
    }

    Ok(CouplingMatrix {
        n,
        jz,
        jxy,
        omega_s: freqs.omega_s.clone(),
    })
}

/// Residual error bound of the spin-motion decoupling transformation:
/// `N (kbar + 1/2) epsilon^2` with `kbar` the mean axial excitation.
pub fn canonical_error_bound(n: usize, kbar: f64, epsilon: f64) -> f64 {
    n as f64 * (kbar + 0.5) * epsilon * epsilon
}

/// Errors from the physical model.
#[derive(Debug, Error)]
pub enum PhysicsError {
    #[error("invalid input `{name}`: {detail}")]
    NonPositiveInput { name: &'static str, detail: String },
    #[error("missing parameter `{name}` (required without direct overrides)")]
    MissingParameters { name: &'static str },
    #[error("frequency hierarchy violated: {detail}")]
    HierarchyViolation { detail: String },
    #[error("zero spacing between sites {i} and {j}")]
    ZeroSpacing { i: usize, j: usize },
    #[error("{detail}")]
    Convergence { detail: String },
}
