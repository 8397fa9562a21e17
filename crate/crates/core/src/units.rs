//! Unit-suffixed quantities accepted at the command line and in data files.
//! Everything is converted to SI on entry.

use crate::constants::{E_CHARGE, HBAR};
use crate::error::{Error, Result};

/// How a unit converts to SI. Decimal prefixes shift the decimal exponent of
/// the literal before it is parsed, so `0.1um` gives the double nearest 1e-7.
#[derive(Clone, Copy)]
enum Scale {
    Pow10(i32),
    Mul(f64),
}

impl Scale {
    fn apply(self, literal: &str) -> Option<f64> {
        match self {
            Scale::Pow10(k) => {
                let (mantissa, exp) = match literal.find(['e', 'E']) {
                    Some(i) => (&literal[..i], literal[i + 1..].parse::<i32>().ok()?),
                    None => (literal, 0),
                };
                format!("{mantissa}e{}", exp.checked_add(k)?).parse().ok()
            }
            Scale::Mul(m) => Some(literal.parse::<f64>().ok()? * m),
        }
    }
}

const LENGTH: &[(&str, Scale)] = &[
    ("nm", Scale::Pow10(-9)),
    ("um", Scale::Pow10(-6)),
    ("μm", Scale::Pow10(-6)),
    ("µm", Scale::Pow10(-6)),
    ("mm", Scale::Pow10(-3)),
    ("m", Scale::Pow10(0)),
];

const FORCE: &[(&str, Scale)] = &[
    ("pN", Scale::Pow10(-12)),
    ("nN", Scale::Pow10(-9)),
    ("uN", Scale::Pow10(-6)),
    ("μN", Scale::Pow10(-6)),
    ("N", Scale::Pow10(0)),
];

const RESISTIVITY: &[(&str, Scale)] = &[
    ("uOhmcm", Scale::Pow10(-8)),
    ("uohmcm", Scale::Pow10(-8)),
    ("μΩcm", Scale::Pow10(-8)),
    ("μΩ·cm", Scale::Pow10(-8)),
    ("µΩ·cm", Scale::Pow10(-8)),
    ("Ohmm", Scale::Pow10(0)),
    ("Ohm_m", Scale::Pow10(0)),
    ("Ω·m", Scale::Pow10(0)),
];

const TEMPERATURE: &[(&str, Scale)] = &[("K", Scale::Pow10(0))];

/// `value` followed by one of `units`; a bare number is taken as SI.
fn parse_with(s: &str, units: &[(&str, Scale)], what: &str) -> Result<f64> {
    let s = s.trim();
    let split = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-')
                && !((c == 'e' || c == 'E') && s[i + 1..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+'))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let bad = || Error::Input(format!("cannot parse {what} '{s}'"));
    num.parse::<f64>().map_err(|_| bad())?;
    let unit = unit.trim();
    let scale = if unit.is_empty() {
        Scale::Pow10(0)
    } else {
        units
            .iter()
            .find(|(u, _)| *u == unit)
            .map(|(_, f)| *f)
            .ok_or_else(|| Error::Input(format!("unknown {what} unit '{unit}' in '{s}'")))?
    };
    scale.apply(num).ok_or_else(bad)
}

/// Length in m (`100nm`, `2um`, `1e-7`).
pub fn parse_length(s: &str) -> Result<f64> {
    parse_with(s, LENGTH, "length")
}

/// Force in N (`50pN`).
pub fn parse_force(s: &str) -> Result<f64> {
    parse_with(s, FORCE, "force")
}

/// Resistivity in Ω·m (`2.25uOhmcm`).
pub fn parse_resistivity(s: &str) -> Result<f64> {
    parse_with(s, RESISTIVITY, "resistivity")
}

/// Temperature in K.
pub fn parse_temperature(s: &str) -> Result<f64> {
    parse_with(s, TEMPERATURE, "temperature")
}

/// Angular frequency in rad/s; `eV` is converted through ħω = E.
pub fn parse_frequency(s: &str) -> Result<f64> {
    parse_with(
        s,
        &[("eV", Scale::Mul(E_CHARGE / HBAR)), ("rad/s", Scale::Pow10(0))],
        "frequency",
    )
}
