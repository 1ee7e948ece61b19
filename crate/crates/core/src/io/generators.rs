//! Built-in example systems, addressable as `name` or `name:param`.

use std::fmt;
use std::ops::RangeInclusive;

use crate::feature::FeatureExpr;
use crate::model::{Wfts, WftsBuilder};

/// Which built-in model to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Taxi(u32),
    GrantRequest,
    MinepumpLite,
}

impl Generator {
    pub fn build(self) -> Wfts {
        match self {
            Generator::Taxi(n) => taxi(n),
            Generator::GrantRequest => grant_request(),
            Generator::MinepumpLite => minepump_lite(),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Taxi(n) => write!(f, "taxi:{n}"),
            Generator::GrantRequest => f.write_str("grantrequest"),
            Generator::MinepumpLite => f.write_str("minepump"),
        }
    }
}

/// Parses `taxi:N`, `grantrequest` or `minepump`.
pub fn parse_generator(text: &str) -> Result<Generator, String> {
    match parse_generators(text)?.as_slice() {
        [g] => Ok(*g),
        _ => Err(format!("`{text}` names a range, expected a single model")),
    }
}

/// Like [`parse_generator`] but also accepts `taxi:A..B` (inclusive).
pub fn parse_generators(text: &str) -> Result<Vec<Generator>, String> {
    let (name, param) = match text.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (text, None),
    };
    let bad = || format!("unknown generator `{text}`");
    match (name, param) {
        ("taxi", Some(p)) => {
            let range: RangeInclusive<u32> = match p.split_once("..") {
                Some((a, b)) => a.parse().map_err(|_| bad())?..=b.parse().map_err(|_| bad())?,
                None => {
                    let n = p.parse().map_err(|_| bad())?;
                    n..=n
                }
            };
            if range.is_empty() || *range.end() > 18 {
                return Err(bad());
            }
            Ok(range.map(Generator::Taxi).collect())
        }
        ("grantrequest", None) => Ok(vec![Generator::GrantRequest]),
        ("minepump", None) | ("minepump-lite", None) => Ok(vec![Generator::MinepumpLite]),
        _ => Err(bad()),
    }
}

fn v(name: &str) -> FeatureExpr {
    FeatureExpr::var(name)
}

/// The taxi-shuttle product line with `licenses` extra-license features.
///
/// Features are `S` (shuttle), `T` (taxi) and `L1..Ln`. States are the city
/// locations `P1 R1 P2 R2`, the airport `AP AR`, then `Pe_i Re_i` per license.
/// Airport trips carry their lengths; every ext-transition is guarded by its
/// license feature.
pub fn taxi(licenses: u32) -> Wfts {
    let t = FeatureExpr::True;
    let mut b = WftsBuilder::new().feature("S").feature("T");
    for i in 1..=licenses {
        b = b.feature(format!("L{i}"));
    }
    for s in ["P1", "R1", "P2", "R2", "AP", "AR"] {
        b = b.state(s);
    }
    for i in 1..=licenses {
        b = b.state(format!("Pe{i}")).state(format!("Re{i}"));
    }
    b = b
        .initial("AP")
        .transition("P1", "airport", "AR", t.clone(), 40, 3)
        .transition("AP", "airport", "R1", t.clone(), 50, 3)
        .transition("P2", "airport", "AR", t.clone(), 35, 2)
        .transition("AP", "airport", "R2", t.clone(), 45, 2)
        .transition("R1", "reposition", "P1", t.clone(), -2, 1)
        .transition("R2", "reposition", "P2", t.clone(), -2, 1)
        .transition("AR", "reposition", "AP", t, -5, 1)
        .transition("P1", "shuttle", "P2", v("S"), 15, 1)
        .transition("R2", "shuttle", "R1", v("S"), 15, 1)
        .transition("P1", "taxi", "R2", v("T"), 30, 1)
        .transition("P2", "taxi", "R1", v("T"), 30, 1);
    for i in 1..=licenses {
        let l = v(&format!("L{i}"));
        let (pe, re) = (format!("Pe{i}"), format!("Re{i}"));
        b = b
            .transition(&pe, "airport", "AR", l.clone(), 50, 4)
            .transition("AP", "airport", &re, l.clone(), 60, 4)
            .transition(&re, "reposition", &pe, l.clone(), -2, 1)
            .transition(&pe, "shuttle", "P1", v("S") & l.clone(), 15, 1)
            .transition("R1", "shuttle", &re, v("S") & l.clone(), 15, 1)
            .transition(&pe, "taxi", "R1", v("T") & l.clone(), 30, 1)
            .transition(&pe, "taxi", "R2", v("T") & l.clone(), 30, 1)
            .transition("P1", "taxi", &re, v("T") & l.clone(), 30, 1)
            .transition("P2", "taxi", &re, v("T") & l, 30, 1);
    }
    b.build().expect("taxi model is well-formed")
}

/// The four-state arbiter with optional always-grant (`G`) and alternating
/// (`A`) features. `s0`'s `request` edge precedes its `grant` edge.
pub fn grant_request() -> Wfts {
    let t = FeatureExpr::True;
    let g_or_a = || v("G") | v("A");
    WftsBuilder::new()
        .feature("G")
        .feature("A")
        .state("s0")
        .state("s1")
        .state("s2")
        .state("s3")
        .initial("s0")
        .transition("s0", "request", "s1", t.clone(), 0, 1)
        .transition("s0", "grant", "s2", g_or_a(), -1, 1)
        .transition("s1", "grant", "s3", t.clone(), 0, 1)
        .transition("s2", "grant", "s2", v("G"), -1, 1)
        .transition("s2", "clean", "s0", v("A"), 0, 1)
        .transition("s2", "request", "s3", g_or_a(), 0, 1)
        .transition("s3", "serve", "s0", t, 0, 1)
        .build()
        .expect("grant/request model is well-formed")
}

/// A small abstraction of a mine pump controller with an optional command
/// module (`C`) and methane sensor (`M`). Weights model energy use per step.
pub fn minepump_lite() -> Wfts {
    let t = FeatureExpr::True;
    let (c, m) = (v("C"), v("M"));
    let mut b = WftsBuilder::new().feature("C").feature("M");
    for s in [
        "Idle",
        "WaterRising",
        "HighWater",
        "PumpOn",
        "Draining",
        "LowWater",
        "PumpOff",
        "MethaneCheck",
        "MethaneAlarm",
        "Shutdown",
        "Vent",
        "CmdWait",
        "CmdStart",
        "CmdStop",
        "Manual",
    ] {
        b = b.state(s);
    }
    b.initial("Idle")
        .transition("Idle", "rise", "WaterRising", t.clone(), 1, 1)
        .transition("WaterRising", "rise", "HighWater", t.clone(), 1, 1)
        .transition("WaterRising", "evaporate", "Idle", t.clone(), 0, 1)
        .transition("HighWater", "autostart", "PumpOn", !c.clone(), 2, 1)
        .transition("HighWater", "request", "CmdWait", c.clone(), 1, 1)
        .transition("CmdWait", "start", "CmdStart", c.clone(), 2, 1)
        .transition("CmdWait", "override", "Manual", c.clone(), 1, 2)
        .transition("Manual", "start", "PumpOn", c.clone(), 3, 1)
        .transition("Manual", "cancel", "CmdWait", c.clone(), 0, 1)
        .transition("CmdStart", "pump_on", "PumpOn", c.clone(), 1, 1)
        .transition("PumpOn", "sense", "MethaneCheck", m.clone(), 1, 1)
        .transition("PumpOn", "drain", "Draining", !m.clone(), 6, 3)
        .transition("MethaneCheck", "clear", "Draining", m.clone(), 6, 3)
        .transition("MethaneCheck", "alarm", "MethaneAlarm", m.clone(), 2, 1)
        .transition("MethaneAlarm", "stop", "Shutdown", m.clone(), 0, 1)
        .transition("Shutdown", "vent", "Vent", m.clone(), 4, 2)
        .transition("Vent", "reset", "Idle", m.clone(), 1, 1)
        .transition("Vent", "recheck", "HighWater", m, 2, 1)
        .transition("Draining", "drained", "LowWater", t.clone(), 5, 1)
        .transition("LowWater", "autostop", "PumpOff", !c.clone(), 1, 1)
        .transition("LowWater", "report", "CmdStop", c.clone(), 1, 1)
        .transition("CmdStop", "stop", "PumpOff", c, 1, 1)
        .transition("PumpOff", "rest", "Idle", t, 0, 1)
        .build()
        .expect("minepump model is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::serialize;

    #[test]
    fn taxi_sizes() {
        for n in 0..=11u32 {
            let w = taxi(n);
            assert_eq!(w.feature_model().features().len() as u32, n + 2);
            assert_eq!(w.feature_model().product_count(), 1 << (n + 2));
            assert_eq!(w.state_count() as u32, 6 + 2 * n);
        }
        assert_eq!(taxi(1).transitions().len(), 20);
    }

    #[test]
    fn taxi_expanded_sizes() {
        // expanded states plus expanded unit transitions reproduce the
        // published state column 52, 75, ..., 282
        for n in 1..=11u32 {
            let x = taxi(n).expand_lengths();
            assert_eq!(x.state_count() as u32, 12 + 8 * n);
            assert_eq!((x.state_count() + x.transitions().len()) as u32, 29 + 23 * n);
        }
    }

    #[test]
    fn grant_request_shape() {
        let w = grant_request();
        assert_eq!(w.state_count(), 4);
        assert_eq!(w.transitions().len(), 7);
        let s2 = w.state_id("s2").unwrap();
        let self_loop = w
            .transitions()
            .iter()
            .find(|t| t.source == s2 && t.target == s2)
            .unwrap();
        assert_eq!(self_loop.guard, v("G"));
        assert_eq!(*self_loop.weight.numer(), -1);
        let serve = w.transitions().last().unwrap();
        assert_eq!((w.state_name(serve.source), w.state_name(serve.target)), ("s3", "s0"));
        assert_eq!(serve.guard, FeatureExpr::True);
        assert_eq!(*serve.weight.numer(), 0);
    }

    #[test]
    fn minepump_is_fixed() {
        let w = minepump_lite();
        assert_eq!(w.feature_model().product_count(), 4);
        assert_eq!(serialize(&w), serialize(&minepump_lite()));
    }

    #[test]
    fn generator_names() {
        assert_eq!(parse_generator("taxi:5"), Ok(Generator::Taxi(5)));
        assert_eq!(parse_generator("grantrequest"), Ok(Generator::GrantRequest));
        assert_eq!(parse_generator("minepump"), Ok(Generator::MinepumpLite));
        assert!(parse_generator("taxi").is_err());
        assert!(parse_generator("taxi:1..3").is_err());
        assert_eq!(parse_generators("taxi:1..3").unwrap().len(), 3);
        assert!(parse_generators("taxi:3..1").is_err());
        assert!(parse_generator("nope").is_err());
    }
}
