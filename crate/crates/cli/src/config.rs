//! Scenario configuration: a flat, sectioned key-value text format.
//!
//! Three sections describe a run: `[trap]` (physical inputs), `[target]`
//! (what to compile) and `[verify]` (sweeps, bounds, output checks).  See
//! the bundled files under `configs/` for complete examples.

use crate::units::{parse_list, parse_quantity, Dimension};
use std::collections::BTreeMap;
use trapspin_core::physics::{DirectFrequencies, Spacing, TrapParams};
use trapspin_core::schedule::{TargetKind, TargetSpec};

/// Configuration error naming the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub detail: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.detail)
    }
}

impl std::error::Error for ConfigError {}

fn err(field: &str, detail: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        detail: detail.into(),
    }
}

/// Target selection before coupling-dependent resolution.
#[derive(Debug, Clone)]
pub struct TargetConfig {
    pub variant: String,
    pub order: u8,
    /// Direct span in seconds, or...
    pub span: Option<f64>,
    /// ...span as a dimensionless multiple of `1/J^z`.
    pub jz_span: Option<f64>,
    /// Explicit iteration count; `None` means derive from the bound.
    pub iterations: Option<usize>,
    /// Drive strength in rad/s, or...
    pub eta: Option<f64>,
    /// ...as a multiple of `J^z`.
    pub eta_over_jz: Option<f64>,
    pub ratio: Option<f64>,
    pub tau: Option<[f64; 3]>,
}

impl TargetConfig {
    /// Resolve into a [`TargetSpec`] once the coupling scale is known.
    ///
    /// `default_span` is the fallback per-iteration span `T / m` from the
    /// configured total time and the iteration bound.
    pub fn resolve(
        &self,
        jz: f64,
        bound_m: usize,
        default_span: Option<f64>,
    ) -> Result<TargetSpec, ConfigError> {
        let eta = match (self.eta, self.eta_over_jz) {
            (Some(e), _) => e,
            (None, Some(r)) => r * jz,
            (None, None) => jz,
        };
        let span = match (self.span, self.jz_span, default_span) {
            (Some(s), _, _) => s,
            (None, Some(r), _) => r / jz,
            (None, None, Some(s)) => s,
            (None, None, None) => {
                return Err(err("target.span", "give `span` or `jz_span`"))
            }
        };
        let iterations = self.iterations.unwrap_or(bound_m);
        let kind = match self.variant.as_str() {
            "field_scaled" => TargetKind::FieldScaled {
                ratio: self
                    .ratio
                    .ok_or_else(|| err("target.ratio", "required for field_scaled"))?,
            },
            "mixed_xyz" => TargetKind::MixedXYZ {
                tau: self
                    .tau
                    .ok_or_else(|| err("target.tau", "required for mixed_xyz"))?,
                eta,
            },
            "ising_dipole" => TargetKind::IsingDipole { eta },
            "xy_rotated" => TargetKind::XYRotated { eta },
            "nn_ising" => TargetKind::NNIsing { eta },
            "equal_first_second" => TargetKind::EqualFirstSecond,
            "sign_inverted" => TargetKind::SignInverted,
            "suppress2" => TargetKind::Suppress2,
            "suppress23" => TargetKind::Suppress23,
            "suppress2to6" => TargetKind::Suppress2to6,
            "odd_inverted" => TargetKind::OddInverted,
            "even_flip" => TargetKind::EvenFlip,
            other => return Err(err("target.variant", format!("unknown variant `{other}`"))),
        };
        Ok(TargetSpec::new(kind, self.order, span, iterations))
    }

    /// The bound-coefficient family for this variant at array size n.
    pub fn bound_f(&self, n: usize) -> f64 {
        match self.variant.as_str() {
            "nn_ising" => trapspin_core::verify::nn_ising_bound_coefficient(n),
            _ => trapspin_core::verify::xy_bound_coefficient(n),
        }
    }
}

/// Verification sweep configuration.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Per-iteration spans to sweep, as `J^z t` multiples.
    pub jz_t_values: Vec<f64>,
    /// Chain sizes for the size-scaling fit (empty disables it).
    pub fn_n_values: Vec<usize>,
    /// Iteration counts for accumulation checks (empty disables).
    pub accumulation_m: Vec<usize>,
    /// Array size entering the iteration bound and error budget.
    pub bound_n: usize,
    /// `J^z T` for the iteration bound.
    pub bound_jz_total: f64,
    /// Target total error for the bound.
    pub error_target: f64,
    /// Mean axial excitation for the budget.
    pub budget_kbar: f64,
    /// Expected error-scaling exponent and tolerance (strict checking).
    pub expect_exponent: Option<(f64, f64)>,
    /// Sweep-size cap.
    pub max_n: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            jz_t_values: Vec::new(),
            fn_n_values: Vec::new(),
            accumulation_m: Vec::new(),
            bound_n: 50,
            bound_jz_total: 10.0,
            error_target: 0.01,
            budget_kbar: 0.0,
            expect_exponent: None,
            max_n: 12,
        }
    }
}

/// A parsed scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub trap: TrapParams,
    pub target: TargetConfig,
    pub verify: VerifyConfig,
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn split_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            err(
                &format!("line {}", idx + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        if current.is_empty() {
            return Err(err(
                &format!("line {}", idx + 1),
                "key outside any [section]",
            ));
        }
        sections
            .get_mut(&current)
            .expect("section exists")
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'static str,
    entries: &'a BTreeMap<String, String>,
}

fn section<'a>(sections: &'a Sections, name: &'static str) -> Result<Section<'a>, ConfigError> {
    sections
        .get(name)
        .map(|entries| Section { name, entries })
        .ok_or_else(|| err(name, "missing section"))
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Option<&'a str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    fn quantity(&self, key: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|v| parse_quantity(v, dim).map_err(|e| err(&format!("{}.{key}", self.name), e)))
            .transpose()
    }

    fn required(&self, key: &str, dim: Dimension) -> Result<f64, ConfigError> {
        self.quantity(key, dim)?
            .ok_or_else(|| err(&format!("{}.{key}", self.name), "missing"))
    }

    fn integer(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| err(&format!("{}.{key}", self.name), "expected an integer"))
            })
            .transpose()
    }

    fn list(&self, key: &str, dim: Dimension) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some("") => Ok(Vec::new()),
            Some(v) => parse_list(v, dim).map_err(|e| err(&format!("{}.{key}", self.name), e)),
        }
    }

    fn int_list(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        Ok(self
            .list(key, Dimension::Dimensionless)?
            .into_iter()
            .map(|v| v as usize)
            .collect())
    }
}

/// Parse a scenario config file.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let sections = split_sections(text)?;

    // [trap]
    let trap_s = section(&sections, "trap")?;
    let n = trap_s
        .integer("n")?
        .ok_or_else(|| err("trap.n", "missing"))?;
    let gradient = trap_s.required("gradient", Dimension::Gradient)?;
    let g_factor = trap_s
        .quantity("g", Dimension::Dimensionless)?
        .unwrap_or(trapspin_core::constants::DEFAULT_G_FACTOR);
    let spacing = match (trap_s.get("spacing"), trap_s.get("positions")) {
        (Some(_), Some(_)) => {
            return Err(err("trap.spacing", "give either spacing or positions"))
        }
        (Some(v), None) => Spacing::Uniform(
            parse_quantity(v, Dimension::Length).map_err(|e| err("trap.spacing", e))?,
        ),
        (None, Some(v)) => Spacing::Positions(
            parse_list(v, Dimension::Length).map_err(|e| err("trap.positions", e))?,
        ),
        (None, None) => return Err(err("trap.spacing", "missing")),
    };
    let omega_z = trap_s.quantity("omega_z", Dimension::Frequency)?;
    let omega_s = match trap_s.get("omega_s") {
        Some(v) => Some(parse_list(v, Dimension::Frequency).map_err(|e| err("trap.omega_s", e))?),
        None => None,
    };
    let overrides = match (omega_z, omega_s) {
        (Some(omega_z), Some(ws)) => {
            let omega_s = if ws.len() == 1 {
                vec![ws[0]; n]
            } else if ws.len() == n {
                ws
            } else {
                return Err(err(
                    "trap.omega_s",
                    format!("expected 1 or {n} values, got {}", ws.len()),
                ));
            };
            Some(DirectFrequencies { omega_z, omega_s })
        }
        (None, None) => None,
        _ => {
            return Err(err(
                "trap.omega_z",
                "direct overrides need both omega_z and omega_s",
            ))
        }
    };
    let b0 = match trap_s.get("b0") {
        Some(v) => {
            let list = parse_list(v, Dimension::Field).map_err(|e| err("trap.b0", e))?;
            if list.len() == 1 {
                vec![list[0]; n]
            } else if list.len() == n {
                list
            } else {
                return Err(err(
                    "trap.b0",
                    format!("expected 1 or {n} values, got {}", list.len()),
                ));
            }
        }
        None => Vec::new(),
    };
    let trap = TrapParams {
        n,
        b0,
        gradient,
        electrode_voltage: trap_s.quantity("voltage", Dimension::Voltage)?,
        trap_length: trap_s.quantity("length", Dimension::Length)?,
        spacing,
        g_factor,
        overrides,
    };

    // [target]
    let target_s = section(&sections, "target")?;
    let variant = target_s
        .get("variant")
        .ok_or_else(|| err("target.variant", "missing"))?
        .to_string();
    let order = target_s.integer("order")?.unwrap_or(1) as u8;
    let iterations = match target_s.get("iterations") {
        None | Some("auto") => None,
        Some(v) => Some(
            v.parse::<usize>()
                .map_err(|_| err("target.iterations", "expected an integer or `auto`"))?,
        ),
    };
    let tau = match target_s.get("tau") {
        Some(v) => {
            let list = parse_list(v, Dimension::Dimensionless).map_err(|e| err("target.tau", e))?;
            if list.len() != 3 {
                return Err(err("target.tau", "expected three comma-separated fractions"));
            }
            Some([list[0], list[1], list[2]])
        }
        None => None,
    };
    let target = TargetConfig {
        variant,
        order,
        span: target_s.quantity("span", Dimension::Time)?,
        jz_span: target_s.quantity("jz_span", Dimension::Dimensionless)?,
        iterations,
        eta: target_s.quantity("eta", Dimension::Frequency)?,
        eta_over_jz: target_s.quantity("eta_over_jz", Dimension::Dimensionless)?,
        ratio: target_s.quantity("ratio", Dimension::Dimensionless)?,
        tau,
    };

    // [verify] (optional)
    let mut verify = VerifyConfig::default();
    if let Some(entries) = sections.get("verify") {
        let s = Section {
            name: "verify",
            entries,
        };
        verify.jz_t_values = s.list("jz_t_values", Dimension::Dimensionless)?;
        verify.fn_n_values = s.int_list("fn_n_values")?;
        verify.accumulation_m = s.int_list("accumulation_m")?;
        if let Some(v) = s.integer("bound_n")? {
            verify.bound_n = v;
        }
        if let Some(v) = s.quantity("bound_jz_total", Dimension::Dimensionless)? {
            verify.bound_jz_total = v;
        }
        if let Some(v) = s.quantity("error_target", Dimension::Dimensionless)? {
            verify.error_target = v;
        }
        if let Some(v) = s.quantity("budget_kbar", Dimension::Dimensionless)? {
            verify.budget_kbar = v;
        }
        if let Some(v) = s.get("expect_exponent") {
            let parts = parse_list(v, Dimension::Dimensionless)
                .map_err(|e| err("verify.expect_exponent", e))?;
            if parts.len() != 2 {
                return Err(err(
                    "verify.expect_exponent",
                    "expected `value, tolerance`",
                ));
            }
            verify.expect_exponent = Some((parts[0], parts[1]));
        }
        if let Some(v) = s.integer("max_n")? {
            verify.max_n = v;
        }
    }

    Ok(ScenarioConfig {
        trap,
        target,
        verify,
    })
}
