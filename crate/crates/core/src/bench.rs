//! Wall-clock comparison of the two strategies.

use std::fmt::Write;
use std::time::Instant;

use serde::Serialize;

use crate::analysis::{family_values, product_values};
use crate::mean_cycle::Mode;
use crate::model::Wfts;

/// Mean seconds and sample standard deviation as a percentage of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub mean_s: f64,
    pub stddev_pct: f64,
}

impl Stats {
    pub fn of(samples: &[f64]) -> Stats {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 || mean == 0.0 {
            return Stats {
                mean_s: mean,
                stddev_pct: 0.0,
            };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Stats {
            mean_s: mean,
            stddev_pct: var.sqrt() / mean * 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub model: String,
    pub features: usize,
    pub products: usize,
    /// After length expansion.
    pub states: usize,
    pub transitions: usize,
    pub family: Stats,
    pub product: Stats,
    /// Product-based mean over family-based mean.
    pub speedup: f64,
    /// Whether both strategies returned the same values.
    pub agree: bool,
}

fn time<T>(f: impl Fn() -> T, reps: usize) -> (T, Vec<f64>) {
    let first = f();
    let samples = (0..reps)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed().as_secs_f64()
        })
        .collect();
    (first, samples)
}

/// Times both strategies on the expanded model: one untimed warm-up run
/// each, then `reps` timed runs.
pub fn bench_model(name: &str, w: &Wfts, mode: Mode, reps: usize, parallel: bool) -> BenchRow {
    let reps = reps.max(1);
    let x = w.expand_lengths();
    let (fam, fam_t) = time(|| family_values(&x, mode, parallel), reps);
    let (prod, prod_t) = time(|| product_values(&x, mode, parallel), reps);
    let family = Stats::of(&fam_t);
    let product = Stats::of(&prod_t);
    BenchRow {
        model: name.to_string(),
        features: x.feature_model().features().len(),
        products: x.feature_model().product_count(),
        states: x.state_count(),
        transitions: x.transitions().len(),
        speedup: product.mean_s / family.mean_s,
        family,
        product,
        agree: fam == prod,
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "model,features,products,states,transitions,family_mean_s,family_stddev_pct,product_mean_s,product_stddev_pct,speedup,agree\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.2},{:.6},{:.2},{:.3},{}",
            r.model,
            r.features,
            r.products,
            r.states,
            r.transitions,
            r.family.mean_s,
            r.family.stddev_pct,
            r.product.mean_s,
            r.product.stddev_pct,
            r.speedup,
            r.agree
        );
    }
    out
}

pub fn rows_to_json(rows: &[BenchRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

pub fn rows_to_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<14} {:>8} {:>8} {:>7} {:>20} {:>20} {:>8}\n",
        "model", "features", "products", "states", "family (s)", "product (s)", "speedup"
    );
    for r in rows {
        let cell = |s: Stats| format!("{:.4} ± {:.1}%", s.mean_s, s.stddev_pct);
        let _ = writeln!(
            out,
            "{:<14} {:>8} {:>8} {:>7} {:>20} {:>20} {:>7.2}x{}",
            r.model,
            r.features,
            r.products,
            r.states,
            cell(r.family),
            cell(r.product),
            r.speedup,
            if r.agree { "" } else { "  MISMATCH" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::grant_request;

    #[test]
    fn stats() {
        assert_eq!(Stats::of(&[2.0]).stddev_pct, 0.0);
        let s = Stats::of(&[1.0, 3.0]);
        assert_eq!(s.mean_s, 2.0);
        assert!((s.stddev_pct - 70.710678).abs() < 1e-4);
    }

    #[test]
    fn single_rep_row() {
        let row = bench_model("grantrequest", &grant_request(), Mode::Max, 1, false);
        assert!(row.agree);
        assert_eq!(row.family.stddev_pct, 0.0);
        assert_eq!((row.features, row.products, row.states), (2, 4, 4));
        assert_eq!(rows_to_csv(std::slice::from_ref(&row)).lines().count(), 2);
        assert!(rows_to_table(&[row]).contains("grantrequest"));
    }
}
