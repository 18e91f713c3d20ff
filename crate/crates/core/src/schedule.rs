//! The pulse-program intermediate representation.
//!
//! A [`PulseSchedule`] is an ordered program of instantaneous pulses and
//! free-evolution intervals, repeated `iterations` times.  Free intervals
//! evolve under the longitudinal coupling Hamiltonian (interaction
//! picture) or the full spin Hamiltonian (lab frame), optionally with the
//! steady transverse drive switched on; pulses are the ideal unitaries of
//! [`crate::pulse`].
//!
//! The text format is line oriented and round-trips bit-exactly:
//!
//! ```text
//! SCHEDULE v1
//! N 6
//! JZ 8.9
//! FRAME IP
//! DRIVE_ETA 4.45
//! TARGET SUPPRESS2 order=1 span=0.01 iterations=2
//! STEPS 12
//! FREE 0.01 0
//! PULSE FLIPX C1
//! ...
//! END
//! ```
//!
//! Durations are non-negative; all floating-point fields use the shortest
//! decimal form that parses back to the identical bits.

use crate::hamiltonian::{banded_hz, build_hamiltonian, transverse_drive, HamiltonianKind};
use crate::matrix::CMat;
use crate::operator::{OperatorError, Unitary};
use crate::physics::CouplingMatrix;
use crate::pulse::{DriveField, Frame, PulseError, PulseKind, PulseSpec, Subset};
use num_complex::Complex64 as C64;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

/// Steady-drive state during a free interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveToggle {
    Off,
    On,
    /// Drive with the field phase shifted by pi (sign-inverted transverse
    /// term); used only inside realized negative-time blocks.
    Inverted,
}

impl DriveToggle {
    fn token(self) -> &'static str {
        match self {
            DriveToggle::Off => "0",
            DriveToggle::On => "1",
            DriveToggle::Inverted => "-1",
        }
    }

    /// Sign of the transverse term (0 when off).
    pub fn sign(self) -> f64 {
        match self {
            DriveToggle::Off => 0.0,
            DriveToggle::On => 1.0,
            DriveToggle::Inverted => -1.0,
        }
    }
}

/// One program step.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Pulse(PulseSpec),
    Free { seconds: f64, drive: DriveToggle },
}

/// Compilation target selector.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetKind {
    /// Scale the uniform precession term by `ratio` in [-1, 1].
    FieldScaled { ratio: f64 },
    /// Tunable mixed model with time fractions `tau` and drive `eta`.
    MixedXYZ { tau: [f64; 3], eta: f64 },
    /// Dipole-coupled Ising model in a transverse field; no pulses.
    IsingDipole { eta: f64 },
    /// XY model in the rotated basis (zz + yy couplings, x field).
    XYRotated { eta: f64 },
    /// Nearest-neighbor Ising model via second-band subtraction.
    NNIsing { eta: f64 },
    /// First- and second-neighbor couplings made equal.
    EqualFirstSecond,
    /// Coupling sign inverted through the third band.
    SignInverted,
    /// Second-neighbor band removed.
    Suppress2,
    /// Second and third bands removed.
    Suppress23,
    /// Bands two through six removed.
    Suppress2to6,
    /// Odd bands inverted.
    OddInverted,
    /// Odd bands removed, even bands alternated in sign.
    EvenFlip,
}

impl TargetKind {
    fn token(&self) -> String {
        match self {
            TargetKind::FieldScaled { ratio } => format!("FIELD_SCALED ratio={ratio}"),
            TargetKind::MixedXYZ { tau, eta } => format!(
                "MIXED_XYZ tau1={} tau2={} tau3={} eta={}",
                tau[0], tau[1], tau[2], eta
            ),
            TargetKind::IsingDipole { eta } => format!("ISING_DIPOLE eta={eta}"),
            TargetKind::XYRotated { eta } => format!("XY_ROTATED eta={eta}"),
            TargetKind::NNIsing { eta } => format!("NN_ISING eta={eta}"),
            TargetKind::EqualFirstSecond => "EQUAL_FIRST_SECOND".into(),
            TargetKind::SignInverted => "SIGN_INVERTED".into(),
            TargetKind::Suppress2 => "SUPPRESS2".into(),
            TargetKind::Suppress23 => "SUPPRESS23".into(),
            TargetKind::Suppress2to6 => "SUPPRESS2TO6".into(),
            TargetKind::OddInverted => "ODD_INVERTED".into(),
            TargetKind::EvenFlip => "EVEN_FLIP".into(),
        }
    }
}

/// A target plus its Trotterization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    /// Splitting order: 1 or 4.
    pub trotter_order: u8,
    /// Per-iteration span `t` (seconds).
    pub span: f64,
    /// Iteration count `m`.
    pub iterations: usize,
}

impl TargetSpec {
    pub fn new(kind: TargetKind, trotter_order: u8, span: f64, iterations: usize) -> Self {
        Self {
            kind,
            trotter_order,
            span,
            iterations,
        }
    }

    /// Single-iteration copy with a different span (sweep helper).
    pub fn with_span(&self, span: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            trotter_order: self.trotter_order,
            span,
            iterations: 1,
        }
    }
}

/// Schedule-wide metadata echoed into the export header.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleMeta {
    /// Chain length.
    pub n: usize,
    /// Nearest-neighbor longitudinal coupling (rad/s) used at compile time.
    pub nn_jz: f64,
    /// Frame of the free intervals and flip pulses.
    pub frame: Frame,
    /// Transverse-drive coefficient the schedule expects during driven
    /// frees (rad/s); the drive amplitude knob realizes it.
    pub drive_eta: f64,
    /// What the schedule was compiled for.
    pub target: TargetSpec,
    /// Soft compile-time warnings.
    pub warnings: Vec<String>,
}

/// A compiled pulse program.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub steps: Vec<Step>,
    pub meta: ScheduleMeta,
}

impl PulseSchedule {
    /// Number of pulses (the program is stored fusion-normalized).
    pub fn pulse_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Pulse(_)))
            .count()
    }

    /// Total wall-clock span: the sum of free-interval durations.
    pub fn total_span(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Free { seconds, .. } => *seconds,
                Step::Pulse(_) => 0.0,
            })
            .sum()
    }

    /// Fuse adjacent pulses and merge adjacent free intervals in place.
    ///
    /// Adjacent subset flips combine into a single multi-frequency flip on
    /// the symmetric difference of their site sets (dropped when empty);
    /// adjacent inverse pulse pairs cancel; zero-length frees vanish and
    /// equal-drive neighbors merge.  Physical-phase subset flips are left
    /// alone since fusing them would change the global phase bookkeeping.
    pub fn fuse(&mut self) {
        let n = self.meta.n;
        loop {
            let mut changed = false;
            let mut out: Vec<Step> = Vec::with_capacity(self.steps.len());
            for step in self.steps.drain(..) {
                match (&step, out.last()) {
                    (Step::Free { seconds, .. }, _) if *seconds == 0.0 => {
                        changed = true;
                    }
                    (
                        Step::Free { seconds, drive },
                        Some(Step::Free {
                            seconds: prev,
                            drive: prev_drive,
                        }),
                    ) if drive == prev_drive => {
                        let merged = prev + seconds;
                        out.pop();
                        out.push(Step::Free {
                            seconds: merged,
                            drive: *drive,
                        });
                        changed = true;
                    }
                    (Step::Pulse(spec), Some(Step::Pulse(prev))) => {
                        if let Some(fused) = fuse_pulses(prev, spec, n) {
                            out.pop();
                            if let Some(spec) = fused {
                                out.push(Step::Pulse(spec));
                            }
                            changed = true;
                        } else {
                            out.push(step);
                        }
                    }
                    _ => out.push(step),
                }
            }
            self.steps = out;
            if !changed {
                break;
            }
        }
    }

    /// Serialize to the line-oriented text format.
    pub fn export(&self) -> String {
        let mut out = String::new();
        out.push_str("SCHEDULE v1\n");
        let _ = writeln!(out, "N {}", self.meta.n);
        let _ = writeln!(out, "JZ {}", self.meta.nn_jz);
        let frame = match self.meta.frame {
            Frame::Interaction => "IP",
            Frame::Lab => "LAB",
        };
        let _ = writeln!(out, "FRAME {frame}");
        let _ = writeln!(out, "DRIVE_ETA {}", self.meta.drive_eta);
        let _ = writeln!(
            out,
            "TARGET {} order={} span={} iterations={}",
            self.meta.target.kind.token(),
            self.meta.target.trotter_order,
            self.meta.target.span,
            self.meta.target.iterations
        );
        for w in &self.meta.warnings {
            let _ = writeln!(out, "WARN {w}");
        }
        let _ = writeln!(out, "STEPS {}", self.steps.len());
        for step in &self.steps {
            match step {
                Step::Free { seconds, drive } => {
                    let _ = writeln!(out, "FREE {} {}", seconds, drive.token());
                }
                Step::Pulse(spec) => {
                    let _ = writeln!(out, "PULSE {}", pulse_token(spec));
                }
            }
        }
        out.push_str("END\n");
        out
    }

    /// Parse the text format; errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate();
        let mut next = |expect: &str| -> Result<(usize, String), ParseError> {
            lines
                .next()
                .map(|(i, l)| (i + 1, l.to_string()))
                .ok_or_else(|| ParseError {
                    line: text.lines().count() + 1,
                    detail: format!("unexpected end of file, expected {expect}"),
                })
        };

        let (line, header) = next("SCHEDULE header")?;
        if header.trim() != "SCHEDULE v1" {
            return Err(ParseError {
                line,
                detail: "expected `SCHEDULE v1`".into(),
            });
        }
        let n = parse_field(&mut next, "N")?.parse::<usize>().map_err(|_| ParseError {
            line: 2,
            detail: "bad N".into(),
        })?;
        let nn_jz = parse_f64_line(&mut next, "JZ")?;
        let (line, frame_line) = next("FRAME")?;
        let frame = match frame_line.trim().strip_prefix("FRAME ") {
            Some("IP") => Frame::Interaction,
            Some("LAB") => Frame::Lab,
            _ => {
                return Err(ParseError {
                    line,
                    detail: "expected `FRAME IP|LAB`".into(),
                })
            }
        };
        let drive_eta = parse_f64_line(&mut next, "DRIVE_ETA")?;
        let (line, target_line) = next("TARGET")?;
        let target = parse_target(&target_line).map_err(|detail| ParseError { line, detail })?;

        let mut warnings = Vec::new();
        let (steps_line, steps_decl) = loop {
            let (line, l) = next("STEPS")?;
            if let Some(w) = l.strip_prefix("WARN ") {
                warnings.push(w.to_string());
            } else {
                break (line, l);
            }
        };
        let count: usize = steps_decl
            .trim()
            .strip_prefix("STEPS ")
            .and_then(|v| v.parse().ok())
            .ok_or(ParseError {
                line: steps_line,
                detail: "expected `STEPS <count>`".into(),
            })?;

        let mut steps = Vec::with_capacity(count);
        for idx in 0..count {
            let (line, l) = next("a step line")?;
            let l = l.trim();
            if let Some(rest) = l.strip_prefix("FREE ") {
                let mut parts = rest.split_whitespace();
                let seconds: f64 = parts
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or(ParseError {
                        line,
                        detail: format!("step {}: bad FREE duration", idx + 1),
                    })?;
                if !seconds.is_finite() || seconds < 0.0 {
                    return Err(ParseError {
                        line,
                        detail: format!(
                            "step {}: negative or non-finite FREE duration {seconds}",
                            idx + 1
                        ),
                    });
                }
                let drive = match parts.next() {
                    Some("0") => DriveToggle::Off,
                    Some("1") => DriveToggle::On,
                    Some("-1") => DriveToggle::Inverted,
                    _ => {
                        return Err(ParseError {
                            line,
                            detail: format!("step {}: bad drive token", idx + 1),
                        })
                    }
                };
                steps.push(Step::Free { seconds, drive });
            } else if let Some(rest) = l.strip_prefix("PULSE ") {
                let spec = parse_pulse(rest, frame).map_err(|detail| ParseError {
                    line,
                    detail: format!("step {}: {detail}", idx + 1),
                })?;
                steps.push(Step::Pulse(spec));
            } else {
                return Err(ParseError {
                    line,
                    detail: format!("step {}: expected FREE or PULSE", idx + 1),
                });
            }
        }
        let (line, end) = next("END")?;
        if end.trim() != "END" {
            return Err(ParseError {
                line,
                detail: "expected END".into(),
            });
        }
        Ok(PulseSchedule {
            steps,
            meta: ScheduleMeta {
                n,
                nn_jz,
                frame,
                drive_eta,
                target,
                warnings,
            },
        })
    }
}

fn fuse_pulses(a: &PulseSpec, b: &PulseSpec, n: usize) -> Option<Option<PulseSpec>> {
    use PulseKind::*;
    // Inverse named pairs cancel outright.
    let inverse = matches!(
        (&a.kind, &b.kind),
        (Flip, FlipInv)
            | (FlipInv, Flip)
            | (PseudoHadamardX, PseudoHadamardXDag)
            | (PseudoHadamardXDag, PseudoHadamardX)
            | (PseudoHadamardY, PseudoHadamardYDag)
            | (PseudoHadamardYDag, PseudoHadamardY)
    );
    if inverse && a.frame == b.frame && a.physical_phases == b.physical_phases {
        return Some(None);
    }
    // Adjacent subset flips combine on the symmetric difference.
    if let (SubsetFlipX(sa), SubsetFlipX(sb)) = (&a.kind, &b.kind) {
        if a.physical_phases || b.physical_phases || a.frame != b.frame {
            return None;
        }
        let (ma, mb) = (sa.mask(n).ok()?, sb.mask(n).ok()?);
        let xor = ma ^ mb;
        if xor == 0 {
            return Some(None);
        }
        let sites: Vec<usize> = (1..=n).filter(|i| xor & (1 << (n - i)) != 0).collect();
        return Some(Some(PulseSpec {
            kind: SubsetFlipX(Subset::Explicit(sites)),
            frame: a.frame,
            physical_phases: false,
        }));
    }
    None
}

fn pulse_token(spec: &PulseSpec) -> String {
    let mut token = match &spec.kind {
        PulseKind::Flip => "F".to_string(),
        PulseKind::FlipInv => "FINV".to_string(),
        PulseKind::PseudoHadamardX => "GX".to_string(),
        PulseKind::PseudoHadamardXDag => "GXDAG".to_string(),
        PulseKind::PseudoHadamardY => "GY".to_string(),
        PulseKind::PseudoHadamardYDag => "GYDAG".to_string(),
        PulseKind::SubsetFlipX(subset) => format!("FLIPX {}", subset_token(subset)),
    };
    if spec.physical_phases {
        token.push_str(" PHYS");
    }
    token
}

fn subset_token(subset: &Subset) -> String {
    match subset {
        Subset::Odd => "ODD".to_string(),
        Subset::PairClass(k) => format!("C{k}"),
        Subset::TripleClass(k) => format!("T{k}"),
        Subset::QuadClass(k) => format!("Q{k}"),
        Subset::Explicit(sites) => format!(
            "SITES {}",
            sites
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}

fn parse_pulse(rest: &str, frame: Frame) -> Result<PulseSpec, String> {
    let mut tokens: Vec<&str> = rest.split_whitespace().collect();
    let physical_phases = if tokens.last() == Some(&"PHYS") {
        tokens.pop();
        true
    } else {
        false
    };
    let kind = match tokens.as_slice() {
        ["F"] => PulseKind::Flip,
        ["FINV"] => PulseKind::FlipInv,
        ["GX"] => PulseKind::PseudoHadamardX,
        ["GXDAG"] => PulseKind::PseudoHadamardXDag,
        ["GY"] => PulseKind::PseudoHadamardY,
        ["GYDAG"] => PulseKind::PseudoHadamardYDag,
        ["FLIPX", subset @ ..] => PulseKind::SubsetFlipX(parse_subset(subset)?),
        _ => return Err(format!("unknown pulse `{rest}`")),
    };
    Ok(PulseSpec {
        kind,
        frame,
        physical_phases,
    })
}

fn parse_subset(tokens: &[&str]) -> Result<Subset, String> {
    match tokens {
        ["ODD"] => Ok(Subset::Odd),
        [single] if single.len() == 2 => {
            let class: u8 = single[1..].parse().map_err(|_| format!("bad subset {single}"))?;
            match &single[..1] {
                "C" => Ok(Subset::PairClass(class)),
                "T" => Ok(Subset::TripleClass(class)),
                "Q" => Ok(Subset::QuadClass(class)),
                _ => Err(format!("unknown subset `{single}`")),
            }
        }
        ["SITES", list] => {
            let sites = list
                .split(',')
                .map(|s| s.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| format!("bad site list `{list}`"))?;
            Ok(Subset::Explicit(sites))
        }
        _ => Err(format!("unknown subset `{}`", tokens.join(" "))),
    }
}

fn parse_target(line: &str) -> Result<TargetSpec, String> {
    let rest = line
        .trim()
        .strip_prefix("TARGET ")
        .ok_or("expected TARGET line")?;
    let mut tokens = rest.split_whitespace();
    let name = tokens.next().ok_or("missing target name")?;
    let mut params: HashMap<&str, &str> = HashMap::new();
    for tok in tokens {
        let (k, v) = tok.split_once('=').ok_or(format!("bad parameter `{tok}`"))?;
        params.insert(k, v);
    }
    let get = |key: &str| -> Result<f64, String> {
        params
            .get(key)
            .ok_or(format!("missing `{key}`"))?
            .parse()
            .map_err(|_| format!("bad `{key}`"))
    };
    let kind = match name {
        "FIELD_SCALED" => TargetKind::FieldScaled { ratio: get("ratio")? },
        "MIXED_XYZ" => TargetKind::MixedXYZ {
            tau: [get("tau1")?, get("tau2")?, get("tau3")?],
            eta: get("eta")?,
        },
        "ISING_DIPOLE" => TargetKind::IsingDipole { eta: get("eta")? },
        "XY_ROTATED" => TargetKind::XYRotated { eta: get("eta")? },
        "NN_ISING" => TargetKind::NNIsing { eta: get("eta")? },
        "EQUAL_FIRST_SECOND" => TargetKind::EqualFirstSecond,
        "SIGN_INVERTED" => TargetKind::SignInverted,
        "SUPPRESS2" => TargetKind::Suppress2,
        "SUPPRESS23" => TargetKind::Suppress23,
        "SUPPRESS2TO6" => TargetKind::Suppress2to6,
        "ODD_INVERTED" => TargetKind::OddInverted,
        "EVEN_FLIP" => TargetKind::EvenFlip,
        other => return Err(format!("unknown target `{other}`")),
    };
    Ok(TargetSpec {
        kind,
        trotter_order: get("order")? as u8,
        span: get("span")?,
        iterations: get("iterations")? as usize,
    })
}

fn parse_field(
    next: &mut impl FnMut(&str) -> Result<(usize, String), ParseError>,
    key: &'static str,
) -> Result<String, ParseError> {
    let (line, l) = next(key)?;
    l.trim()
        .strip_prefix(key)
        .map(|v| v.trim().to_string())
        .ok_or(ParseError {
            line,
            detail: format!("expected `{key} <value>`"),
        })
}

fn parse_f64_line(
    next: &mut impl FnMut(&str) -> Result<(usize, String), ParseError>,
    key: &'static str,
) -> Result<f64, ParseError> {
    let (line, l) = next(key)?;
    l.trim()
        .strip_prefix(key)
        .and_then(|v| v.trim().parse().ok())
        .ok_or(ParseError {
            line,
            detail: format!("expected `{key} <number>`"),
        })
}

/// Compose the program unitary: step unitaries are multiplied in time
/// order (the first program step acts first on the state).
///
/// Interaction-picture frees evolve under `H^z` (plus `drive.eta *
/// sum sigma^x` when the drive is on); lab-frame frees evolve under the
/// full spin Hamiltonian.  Flip pulses in the lab frame carry precession
/// phases `omega_s * tbar / 2` with `tbar` from the drive field.
pub fn schedule_unitary(
    schedule: &PulseSchedule,
    c: &CouplingMatrix,
    drive: &DriveField,
) -> Result<Unitary, ScheduleError> {
    let n = schedule.meta.n;
    if n != c.len() {
        return Err(ScheduleError::SizeMismatch {
            schedule: n,
            couplings: c.len(),
        });
    }
    let dim = 1usize << n;

    // Diagonal of the free generator in the chosen frame.
    let (free_diag, lab_full): (Vec<f64>, Option<crate::operator::Eigensystem>) =
        match schedule.meta.frame {
            Frame::Interaction => {
                let weights = vec![1.0; n - 1];
                (banded_hz(c, &weights).diagonal(), None)
            }
            Frame::Lab => {
                let full = build_hamiltonian(&HamiltonianKind::FullSpin, c)
                    .map_err(ScheduleError::Operator)?;
                if full.max_offdiag() == 0.0 {
                    (full.diagonal(), None)
                } else {
                    (Vec::new(), Some(full.eigensystem()))
                }
            }
        };

    // Cached eigendecompositions of the driven generators.
    let mut driven: HashMap<i8, crate::operator::Eigensystem> = HashMap::new();
    let mut driven_steps: HashMap<(i8, u64), CMat> = HashMap::new();

    let mut acc = CMat::identity(dim, dim);
    for step in &schedule.steps {
        match step {
            Step::Free { seconds, drive: toggle } => {
                if let Some(full) = &lab_full {
                    let u = full.evolve(*seconds);
                    acc = u.mat() * &acc;
                    continue;
                }
                match toggle {
                    DriveToggle::Off => {
                        apply_diag_left(&free_diag, *seconds, &mut acc);
                    }
                    DriveToggle::On | DriveToggle::Inverted => {
                        if schedule.meta.frame == Frame::Lab {
                            return Err(ScheduleError::UnsupportedVariant {
                                detail: "driven frees are interaction-picture only".into(),
                            });
                        }
                        let sign = if *toggle == DriveToggle::On { 1i8 } else { -1 };
                        let key = (sign, seconds.to_bits());
                        let u = driven_steps.entry(key).or_insert_with(|| {
                            let eig = driven.entry(sign).or_insert_with(|| {
                                let hz = banded_hz(c, &vec![1.0; n - 1]);
                                let hx = transverse_drive(n, sign as f64 * drive.eta);
                                (&hz + &hx).eigensystem()
                            });
                            eig.evolve(*seconds).mat().clone()
                        });
                        acc = &*u * &acc;
                    }
                }
            }
            Step::Pulse(spec) => match &spec.kind {
                PulseKind::SubsetFlipX(subset) => {
                    let mask = subset.mask(n).map_err(ScheduleError::Pulse)?;
                    let phase = if spec.physical_phases {
                        C64::new(0.0, -1.0).powu(mask.count_ones())
                    } else {
                        C64::new(1.0, 0.0)
                    };
                    apply_perm_left(mask, phase, &mut acc);
                }
                _ => {
                    let u = if spec.frame == Frame::Lab {
                        if !(drive.chi.is_finite() && drive.chi > 0.0) {
                            return Err(ScheduleError::InvalidDrive {
                                detail: "lab-frame pulses need a positive pulse rate".into(),
                            });
                        }
                        let tbar = drive.flip_duration();
                        let alphas: Vec<f64> =
                            c.omega_s.iter().map(|w| 0.5 * w * tbar).collect();
                        crate::pulse::pulse_unitary_with_phases(spec, n, Some(&alphas))
                            .map_err(ScheduleError::Pulse)?
                    } else {
                        crate::pulse::pulse_unitary(spec, n).map_err(ScheduleError::Pulse)?
                    };
                    acc = u.mat() * &acc;
                }
            },
        }
    }
    Ok(Unitary::from_parts_unchecked(acc, n))
}

fn apply_diag_left(diag: &[f64], seconds: f64, acc: &mut CMat) {
    let dim = acc.nrows();
    for i in 0..dim {
        let phase = (-C64::i() * diag[i] * seconds).exp();
        for j in 0..dim {
            acc[(i, j)] *= phase;
        }
    }
}

fn apply_perm_left(mask: usize, phase: C64, acc: &mut CMat) {
    let dim = acc.nrows();
    // Rows i and i^mask swap; visit each orbit once.
    for i in 0..dim {
        let partner = i ^ mask;
        if partner > i {
            for j in 0..dim {
                let a = acc[(i, j)];
                let b = acc[(partner, j)];
                acc[(i, j)] = phase * b;
                acc[(partner, j)] = phase * a;
            }
        } else if partner == i {
            for j in 0..dim {
                acc[(i, j)] *= phase;
            }
        }
    }
}

/// Parse failure with a 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {detail}")]
pub struct ParseError {
    pub line: usize,
    pub detail: String,
}

/// Errors from schedule construction and evaluation.
#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("unsupported target variant: {detail}")]
    UnsupportedVariant { detail: String },
    #[error("schedule is for {schedule} spins but couplings describe {couplings}")]
    SizeMismatch { schedule: usize, couplings: usize },
    #[error("schedule does not compose to a diagonal unitary: {detail}")]
    NonDiagonalSchedule { detail: String },
    #[error("band {band} has position-dependent effective coupling")]
    NonUniformBand { band: usize },
    #[error("invalid drive configuration: {detail}")]
    InvalidDrive { detail: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
}
