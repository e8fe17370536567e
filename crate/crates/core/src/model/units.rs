//! Parsing of unit-suffixed quantities into SI values.
//!
//! Configuration files mix the unit systems the device literature uses
//! (inches, GPa, kN/m, mm), so every physical input is a string with an
//! explicit unit suffix, e.g. `"12 in"`, `"16.18 kN/m"`, `"0.04125 mm"`.
//! Conversions are applied as exact rational factors where possible so that
//! `"12 in"` parses to exactly `0.3048` m.

use crate::error::{Error, Result};

/// Physical dimension a quantity string is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Pressure,
    Density,
    Stiffness,
    Mass,
    DampingCoefficient,
    Frequency,
    Force,
    Acceleration,
}

/// A length that may be given relative to the beam length, e.g. `"0.16 L"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthSpec {
    Meters(f64),
    FractionOfLength(f64),
}

impl LengthSpec {
    /// Resolve against a concrete beam length.
    pub fn resolve(self, beam_length: f64) -> f64 {
        match self {
            LengthSpec::Meters(x) => x,
            LengthSpec::FractionOfLength(f) => f * beam_length,
        }
    }
}

/// `(numerator, denominator)` multipliers to SI for each accepted suffix.
fn factor(dimension: Dimension, unit: &str) -> Option<(f64, f64)> {
    use Dimension::*;
    let f = match (dimension, unit) {
        (Length, "m") => (1.0, 1.0),
        (Length, "cm") => (1.0, 100.0),
        (Length, "mm") => (1.0, 1000.0),
        (Length, "um") | (Length, "µm") => (1.0, 1e6),
        (Length, "in") => (254.0, 10000.0),

        (Pressure, "Pa") => (1.0, 1.0),
        (Pressure, "kPa") => (1e3, 1.0),
        (Pressure, "MPa") => (1e6, 1.0),
        (Pressure, "GPa") => (1e9, 1.0),

        (Density, "kg/m^3") | (Density, "kg/m³") => (1.0, 1.0),
        (Density, "g/cm^3") | (Density, "g/cm³") => (1000.0, 1.0),

        (Stiffness, "N/m") => (1.0, 1.0),
        (Stiffness, "kN/m") => (1e3, 1.0),
        (Stiffness, "MN/m") => (1e6, 1.0),
        (Stiffness, "N/mm") => (1e3, 1.0),

        (Mass, "kg") => (1.0, 1.0),
        (Mass, "g") => (1.0, 1000.0),
        (Mass, "mg") => (1.0, 1e6),

        (DampingCoefficient, "N*s/m") | (DampingCoefficient, "N·s/m") | (DampingCoefficient, "Ns/m") | (DampingCoefficient, "kg/s") => (1.0, 1.0),

        (Frequency, "Hz") => (1.0, 1.0),
        (Frequency, "kHz") => (1e3, 1.0),

        (Force, "N") => (1.0, 1.0),
        (Force, "mN") => (1.0, 1000.0),
        (Force, "kN") => (1e3, 1.0),

        (Acceleration, "m/s^2") | (Acceleration, "m/s²") => (1.0, 1.0),
        (Acceleration, "g") => (9.80665, 1.0),

        _ => return None,
    };
    Some(f)
}

fn split_value_unit(input: &str) -> Result<(f64, &str)> {
    let s = input.trim();
    let end = s
        .char_indices()
        .take_while(|(_, c)| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
        .map(|(i, c)| i + c.len_utf8())
        .last()
        .unwrap_or(0);
    let (num, unit) = s.split_at(end);
    let value: f64 = num.trim().parse().map_err(|_| Error::InvalidQuantity {
        input: input.to_string(),
        reason: "missing or malformed numeric part".to_string(),
    })?;
    if !value.is_finite() {
        return Err(Error::InvalidQuantity {
            input: input.to_string(),
            reason: "value is not finite".to_string(),
        });
    }
    Ok((value, unit.trim()))
}

/// Parse a quantity string with a required unit suffix into SI units.
pub fn parse_quantity(input: &str, dimension: Dimension) -> Result<f64> {
    let (value, unit) = split_value_unit(input)?;
    if unit.is_empty() {
        return Err(Error::InvalidQuantity {
            input: input.to_string(),
            reason: format!("unit suffix is required for {dimension:?}"),
        });
    }
    let (num, den) = factor(dimension, unit).ok_or_else(|| Error::InvalidQuantity {
        input: input.to_string(),
        reason: format!("unknown {dimension:?} unit `{unit}`"),
    })?;
    Ok(value * num / den)
}

/// Parse a length that may use the `L` suffix for a fraction of beam length.
pub fn parse_length(input: &str) -> Result<LengthSpec> {
    let (value, unit) = split_value_unit(input)?;
    if unit == "L" {
        return Ok(LengthSpec::FractionOfLength(value));
    }
    parse_quantity(input, Dimension::Length).map(LengthSpec::Meters)
}
