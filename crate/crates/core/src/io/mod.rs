//! The `.wfts` text format and built-in model generators.

pub mod generators;
mod parser;

use std::fmt::Write;

use num_integer::Integer;

pub use parser::{parse, ParseError, ParseErrorKind};

use crate::feature::FeatureExpr;
use crate::model::{Weight, Wfts, DEFAULT_ACTION};

/// Decimal when the denominator divides a power of ten, `p/q` otherwise.
pub fn format_weight(w: Weight) -> String {
    let (numer, denom) = (*w.numer() as i128, *w.denom() as i128);
    let (mut rest, mut twos, mut fives) = (denom, 0u32, 0u32);
    while rest.is_even() {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 || twos.max(fives) > 18 {
        return format!("{numer}/{denom}");
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return numer.to_string();
    }
    let scaled = numer * 10i128.pow(digits) / denom;
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.unsigned_abs();
    let unit = 10u128.pow(digits);
    format!("{sign}{}.{:0width$}", abs / unit, abs % unit, width = digits as usize)
}

/// Canonical text of a model; `parse(&serialize(w)) == w`.
pub fn serialize(w: &Wfts) -> String {
    let fm = w.feature_model();
    let mut out = String::new();
    let _ = writeln!(out, "features {{ {} }}", fm.features().join(", "));
    if !fm.constraint().is_true() {
        let _ = writeln!(out, "constraint {}", fm.constraint());
    }
    let _ = writeln!(out, "states {{ {} }}", w.states().join(", "));
    let init: Vec<&str> = w.initial().iter().map(|s| w.state_name(*s)).collect();
    let _ = writeln!(out, "init {{ {} }}", init.join(", "));
    for t in w.transitions() {
        let _ = write!(out, "trans {} -> {}", w.state_name(t.source), w.state_name(t.target));
        if t.guard != FeatureExpr::True {
            let _ = write!(out, " [{}]", t.guard);
        }
        if t.action != DEFAULT_ACTION {
            let _ = write!(out, " action={}", t.action);
        }
        let _ = write!(out, " weight={}", format_weight(t.weight));
        if t.length != 1 {
            let _ = write!(out, " length={}", t.length);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_rendering() {
        assert_eq!(format_weight(Weight::from_integer(-5)), "-5");
        assert_eq!(format_weight(Weight::new(27, 2)), "13.5");
        assert_eq!(format_weight(Weight::new(-1, 20)), "-0.05");
        assert_eq!(format_weight(Weight::new(73, 6)), "73/6");
    }

    #[test]
    fn generated_models_round_trip() {
        for w in [generators::taxi(1), generators::grant_request(), generators::minepump_lite()] {
            let text = serialize(&w);
            assert_eq!(parse(&text).unwrap(), w, "{text}");
        }
    }

    #[test]
    fn serialize_taxi_first_lines() {
        let text = serialize(&generators::taxi(1));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("features { S, T, L1 }"));
        assert_eq!(lines.next(), Some("states { P1, R1, P2, R2, AP, AR, Pe1, Re1 }"));
        assert_eq!(lines.next(), Some("init { AP }"));
        assert_eq!(lines.next(), Some("trans P1 -> AR action=airport weight=40 length=3"));
    }
}
