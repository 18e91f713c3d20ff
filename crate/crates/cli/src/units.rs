//! Unit-suffixed quantity parsing.
//!
//! Every physical quantity in a scenario config carries an explicit unit
//! suffix (`omega_z = 160 MHz`, `b = 200 T/m`, `spacing = 100 um`).
//! Frequencies given in hertz multiples are cyclic and convert to angular
//! rad/s on parse; `rad/s` multiples are taken as is.  Dimensionless
//! numbers carry no suffix.

use std::f64::consts::TAU;

/// Dimension expected for a config value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Angular frequency, rad/s (accepts Hz-family and rad/s-family).
    Frequency,
    /// Magnetic field, tesla.
    Field,
    /// Field gradient, tesla per meter.
    Gradient,
    /// Electric potential, volt.
    Voltage,
    /// Length, meter.
    Length,
    /// Time, second.
    Time,
    /// Bare number.
    Dimensionless,
}

impl Dimension {
    pub fn describe(self) -> &'static str {
        match self {
            Dimension::Frequency => "a frequency (Hz/kHz/MHz/GHz or rad/s, krad/s, ...)",
            Dimension::Field => "a magnetic field (T, mT, uT)",
            Dimension::Gradient => "a field gradient (T/m)",
            Dimension::Voltage => "a voltage (V, mV, kV)",
            Dimension::Length => "a length (m, mm, um, nm)",
            Dimension::Time => "a time (s, ms, us, ns)",
            Dimension::Dimensionless => "a bare number",
        }
    }
}

/// Parse `"<number> [unit]"` into SI (angular for frequencies).
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, String> {
    let text = text.trim();
    let (num_str, unit) = match text.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
    {
        Some(pos) => (&text[..pos], text[pos..].trim()),
        None => (text, ""),
    };
    let value: f64 = num_str
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` does not start with a number"))?;
    let scale = unit_scale(unit, dim)
        .ok_or_else(|| format!("`{unit}` is not {}", dim.describe()))?;
    Ok(value * scale)
}

fn unit_scale(unit: &str, dim: Dimension) -> Option<f64> {
    match dim {
        Dimension::Frequency => match unit {
            "Hz" => Some(TAU),
            "kHz" => Some(TAU * 1e3),
            "MHz" => Some(TAU * 1e6),
            "GHz" => Some(TAU * 1e9),
            "rad/s" => Some(1.0),
            "krad/s" => Some(1e3),
            "Mrad/s" => Some(1e6),
            "Grad/s" => Some(1e9),
            _ => None,
        },
        Dimension::Field => match unit {
            "T" => Some(1.0),
            "mT" => Some(1e-3),
            "uT" | "µT" => Some(1e-6),
            _ => None,
        },
        Dimension::Gradient => match unit {
            "T/m" => Some(1.0),
            "mT/m" => Some(1e-3),
            _ => None,
        },
        Dimension::Voltage => match unit {
            "V" => Some(1.0),
            "mV" => Some(1e-3),
            "kV" => Some(1e3),
            _ => None,
        },
        Dimension::Length => match unit {
            "m" => Some(1.0),
            "mm" => Some(1e-3),
            "um" | "µm" => Some(1e-6),
            "nm" => Some(1e-9),
            _ => None,
        },
        Dimension::Time => match unit {
            "s" => Some(1.0),
            "ms" => Some(1e-3),
            "us" | "µs" => Some(1e-6),
            "ns" => Some(1e-9),
            _ => None,
        },
        Dimension::Dimensionless => {
            if unit.is_empty() {
                Some(1.0)
            } else {
                None
            }
        }
    }
}

/// Parse a comma-separated list of quantities.
pub fn parse_list(text: &str, dim: Dimension) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|part| parse_quantity(part, dim))
        .collect()
}
