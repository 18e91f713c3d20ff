//! Physical constants used by the trap model.
//!
//! All derived quantities in this crate are pinned to a single constants
//! table so that identical inputs always reproduce identical outputs.  The
//! default table holds the CODATA 2018 recommended values; an alternative
//! table can be loaded from a `key = value` text file (see
//! [`Constants::from_table`]).

use thiserror::Error;

/// Free-electron gyromagnetic factor used when a trap config does not
/// override it.
pub const DEFAULT_G_FACTOR: f64 = 2.002;

/// Fundamental constants entering the trap frequencies and couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    /// Elementary charge magnitude `|e|` in coulomb.
    pub elementary_charge: f64,
    /// Electron mass in kilogram.
    pub electron_mass: f64,
    /// Reduced Planck constant in joule second.
    pub hbar: f64,
    /// Vacuum permittivity in farad per meter.
    pub vacuum_permittivity: f64,
}

impl Constants {
    /// CODATA 2018 recommended values.
    pub const fn codata2018() -> Self {
        Self {
            elementary_charge: 1.602_176_634e-19,
            electron_mass: 9.109_383_701_5e-31,
            hbar: 1.054_571_817e-34,
            vacuum_permittivity: 8.854_187_812_8e-12,
        }
    }

    /// Parse an override table.
    ///
    /// One `key = value` pair per line; `#` starts a comment.  Recognized
    /// keys: `elementary_charge`, `electron_mass`, `hbar`,
    /// `vacuum_permittivity`.  Unlisted keys keep their CODATA value.
    pub fn from_table(text: &str) -> Result<Self, ConstantsError> {
        let mut table = Self::codata2018();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConstantsError::MissingEquals { line: idx + 1 })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| ConstantsError::BadNumber { line: idx + 1 })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(ConstantsError::BadNumber { line: idx + 1 });
            }
            match key.trim() {
                "elementary_charge" => table.elementary_charge = value,
                "electron_mass" => table.electron_mass = value,
                "hbar" => table.hbar = value,
                "vacuum_permittivity" => table.vacuum_permittivity = value,
                other => {
                    return Err(ConstantsError::UnknownKey {
                        line: idx + 1,
                        key: other.to_string(),
                    })
                }
            }
        }
        Ok(table)
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Errors from parsing a constants override table.
#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("line {line}: expected `key = value`")]
    MissingEquals { line: usize },
    #[error("line {line}: value is not a positive finite number")]
    BadNumber { line: usize },
    #[error("line {line}: unknown constant `{key}`")]
    UnknownKey { line: usize, key: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_table_replaces_selected_entries() {
        let table = Constants::from_table("hbar = 1.0\n# comment\n").unwrap();
        assert_eq!(table.hbar, 1.0);
        assert_eq!(
            table.electron_mass,
            Constants::codata2018().electron_mass
        );
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        let err = Constants::from_table("\nplanck = 2\n").unwrap_err();
        match err {
            ConstantsError::UnknownKey { line, key } => {
                assert_eq!(line, 2);
                assert_eq!(key, "planck");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
