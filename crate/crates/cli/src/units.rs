//! Quantities with unit suffixes at the command-line boundary.
//!
//! `61.48km`, `69bar`, `15 °C` and so on are converted to SI. A bare number
//! is read in the flag's default unit.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Pressure,
    Temperature,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Pressure => "pressure",
            Dimension::Temperature => "temperature",
        }
    }
}

fn to_si(dimension: Dimension, value: f64, unit: &str) -> Option<f64> {
    let scale = match (dimension, unit) {
        (Dimension::Length, "m") => 1.0,
        (Dimension::Length, "km") => 1e3,
        (Dimension::Length, "mm") => 1e-3,
        (Dimension::Pressure, "Pa") => 1.0,
        (Dimension::Pressure, "kPa") => 1e3,
        (Dimension::Pressure, "MPa") => 1e6,
        (Dimension::Pressure, "bar") => 1e5,
        (Dimension::Pressure, "mbar") => 1e2,
        (Dimension::Temperature, "K") => return Some(value),
        (Dimension::Temperature, "°C" | "degC" | "C") => return Some(value + 273.15),
        _ => return None,
    };
    Some(value * scale)
}

/// Parses `text` as a quantity of `dimension`, using `default_unit` when no
/// suffix is given. Returns SI units.
pub fn parse_quantity(text: &str, dimension: Dimension, default_unit: &str) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .char_indices()
        .map(|(i, _)| i)
        .chain([text.len()])
        .rev()
        .find(|&i| i > 0 && text[..i].trim_end().parse::<f64>().is_ok())
        .ok_or_else(|| format!("'{text}' does not start with a number"))?;
    let value: f64 = text[..split].trim_end().parse().expect("checked above");
    if !value.is_finite() {
        return Err(format!("'{text}' is not a finite number"));
    }
    let unit = match text[split..].trim() {
        "" => default_unit,
        u => u,
    };
    to_si(dimension, value, unit).ok_or_else(|| format!("unknown {} unit '{unit}' in '{text}'", dimension.name()))
}
