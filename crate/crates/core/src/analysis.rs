//! Per-product limit-average values, computed family-wide or one product at
//! a time, and their rendering.

use std::fmt::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::feature::{FeatureExpr, Product, ProductSet};
use crate::graph::{is_cyclic_component, kosaraju};
use crate::mean_cycle::{classic_karp, witness_cycle, Bound, Mode, PartitionedValue};
use crate::model::{FamilyGraph, Weight, Wfts};
use crate::scc::symbolic_sccs;
use crate::search::{build_finishing_times_tree, dfs_fts};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Family,
    Product,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Attach an optimal cycle to every defined product value.
    pub witnesses: bool,
    /// Spread independent components or products over threads.
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductResult {
    pub product: Product,
    pub features: Vec<String>,
    /// `None` when no cycle is reachable.
    pub value: Option<Weight>,
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyResult {
    pub products: ProductSet,
    pub expr: FeatureExpr,
    pub value: Option<Weight>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timing {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitAverageReport {
    pub mode: Mode,
    pub products: Vec<ProductResult>,
    /// Products grouped by value, in order of first appearance.
    pub families: Vec<FamilyResult>,
    pub timing: Timing,
}

/// Per-product values in product order, by the family-wide pipeline.
/// `w` must have unit lengths.
pub fn family_values(w: &Wfts, mode: Mode, parallel: bool) -> Vec<Option<Weight>> {
    let g = FamilyGraph::new(w);
    let fm = w.feature_model();
    let tree = build_finishing_times_tree(&dfs_fts(&g), fm);
    let sccs = symbolic_sccs(&tree, &g);
    let reach = g.reachable();
    let weights: Vec<Weight> = w.transitions().iter().map(|t| mode.orient(t.weight)).collect();

    let cyclic: Vec<_> = sccs.all().filter(|s| !s.is_trivial(&g)).collect();
    let solve = |scc: &&crate::scc::SymbolicScc| crate::mean_cycle::oriented_mean_cycle(scc, &g, &weights);
    let values: Vec<PartitionedValue> = if parallel {
        cyclic.par_iter().map(solve).collect()
    } else {
        cyclic.iter().map(solve).collect()
    };

    let mut best = PartitionedValue::uniform(fm.all(), Bound::NegInf);
    for (scc, c) in cyclic.iter().zip(&values) {
        let mut reachable = fm.none();
        for (r, re) in scc.r.iter().zip(&reach) {
            reachable.union_with(&(r & re));
        }
        let candidates: Vec<_> = c
            .cells()
            .iter()
            .filter(|(_, v)| matches!(v, Bound::Finite(_)))
            .map(|(cell, v)| (cell & &reachable, *v))
            .filter(|(cell, _)| !cell.is_empty())
            .collect();
        best.improve(&candidates, |a, b| a > b);
    }
    (0..fm.product_count())
        .map(|p| best.value_at(p).and_then(Bound::finite).map(|x| mode.orient(x)))
        .collect()
}

/// Value of one product by classic algorithms on its projection.
/// `w` must have unit lengths.
pub fn product_value(w: &Wfts, product: Product, mode: Mode) -> Option<Weight> {
    let proj = w.project(product).expect("product of the model");
    let reach = proj.reachable();
    let mut best = None;
    for comp in kosaraju(&proj) {
        if !reach[comp[0].0] || !is_cyclic_component(&proj, &comp) {
            continue;
        }
        let mut keep = vec![false; proj.state_count];
        for s in &comp {
            keep[s.0] = true;
        }
        best = mode.best(best, classic_karp(&proj.restrict(&keep), mode));
    }
    best
}

/// Per-product values in product order, one projection at a time.
pub fn product_values(w: &Wfts, mode: Mode, parallel: bool) -> Vec<Option<Weight>> {
    let products = w.feature_model().products();
    if parallel {
        products.par_iter().map(|&p| product_value(w, p, mode)).collect()
    } else {
        products.iter().map(|&p| product_value(w, p, mode)).collect()
    }
}

/// An optimal cycle of `product` as original state names.
pub fn witness(w: &Wfts, product: Product, value: Weight, mode: Mode) -> Option<Vec<String>> {
    let x = w.expand_lengths();
    let proj = x.project(product).ok()?;
    let cycle = witness_cycle(&proj.restrict(&proj.reachable()), value, mode)?;
    Some(
        cycle
            .into_iter()
            .filter(|&s| !x.is_intermediate(s))
            .map(|s| x.state_name(s).to_string())
            .collect(),
    )
}

fn analyze(w: &Wfts, mode: Mode, strategy: Strategy, opts: AnalysisOptions) -> LimitAverageReport {
    let x = w.expand_lengths();
    let start = Instant::now();
    let values = match strategy {
        Strategy::Family => family_values(&x, mode, opts.parallel),
        Strategy::Product => product_values(&x, mode, opts.parallel),
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let timing = match strategy {
        Strategy::Family => Timing {
            family_ms: Some(ms),
            product_ms: None,
        },
        Strategy::Product => Timing {
            family_ms: None,
            product_ms: Some(ms),
        },
    };
    LimitAverageReport::new(w, mode, values, opts.witnesses, timing)
}

/// Family-based analysis; lengths are expanded first.
pub fn analyze_family(w: &Wfts, mode: Mode, opts: AnalysisOptions) -> LimitAverageReport {
    analyze(w, mode, Strategy::Family, opts)
}

/// Product-based analysis; lengths are expanded first.
pub fn analyze_product_based(w: &Wfts, mode: Mode, opts: AnalysisOptions) -> LimitAverageReport {
    analyze(w, mode, Strategy::Product, opts)
}

/// Two-decimal rendering, rounding halves up.
pub fn round2(x: Weight) -> String {
    let hundredths = (x * Weight::from_integer(100) + Weight::new(1, 2)).floor().to_integer();
    let sign = if hundredths < 0 { "-" } else { "" };
    let a = hundredths.unsigned_abs();
    format!("{sign}{}.{:02}", a / 100, a % 100)
}

fn exact(value: Option<Weight>) -> String {
    value.map_or_else(|| "undefined".to_string(), |v| v.to_string())
}

#[derive(Serialize)]
struct ProductJson<'a> {
    features: &'a [String],
    value: String,
    decimal: Option<String>,
    witness: Option<&'a [String]>,
}

#[derive(Serialize)]
struct FamilyJson {
    expr: String,
    value: String,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    mode: Mode,
    products: Vec<ProductJson<'a>>,
    families: Vec<FamilyJson>,
    timing: Timing,
}

impl LimitAverageReport {
    pub fn new(w: &Wfts, mode: Mode, values: Vec<Option<Weight>>, witnesses: bool, timing: Timing) -> Self {
        let fm = w.feature_model();
        let products: Vec<ProductResult> = fm
            .products()
            .iter()
            .zip(&values)
            .map(|(&p, &value)| ProductResult {
                product: p,
                features: fm.product_features(p).into_iter().map(String::from).collect(),
                value,
                witness: value.filter(|_| witnesses).and_then(|v| witness(w, p, v, mode)),
            })
            .collect();
        let mut families: Vec<FamilyResult> = Vec::new();
        for (i, r) in products.iter().enumerate() {
            match families.iter_mut().find(|f| f.value == r.value) {
                Some(f) => f.products.insert(i),
                None => families.push(FamilyResult {
                    products: fm.singleton(i),
                    expr: FeatureExpr::True,
                    value: r.value,
                }),
            }
        }
        for f in &mut families {
            f.expr = fm.render(&f.products);
        }
        LimitAverageReport {
            mode,
            products,
            families,
            timing,
        }
    }

    pub fn values(&self) -> Vec<Option<Weight>> {
        self.products.iter().map(|p| p.value).collect()
    }

    /// The value of the product with exactly these features.
    pub fn value_of(&self, features: &[&str]) -> Option<Option<Weight>> {
        let mut wanted: Vec<&str> = features.to_vec();
        wanted.sort_unstable();
        self.products
            .iter()
            .find(|p| {
                let mut have: Vec<&str> = p.features.iter().map(String::as_str).collect();
                have.sort_unstable();
                have == wanted
            })
            .map(|p| p.value)
    }

    /// Human-readable differences in per-product values.
    pub fn mismatches(&self, other: &LimitAverageReport) -> Vec<String> {
        if self.products.len() != other.products.len() {
            return vec![format!(
                "{} products versus {}",
                self.products.len(),
                other.products.len()
            )];
        }
        self.products
            .iter()
            .zip(&other.products)
            .filter(|(a, b)| a.value != b.value)
            .map(|(a, b)| format!("{{{}}}: {} versus {}", a.features.join(", "), exact(a.value), exact(b.value)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let view = ReportJson {
            mode: self.mode,
            products: self
                .products
                .iter()
                .map(|p| ProductJson {
                    features: &p.features,
                    value: exact(p.value),
                    decimal: p.value.map(round2),
                    witness: p.witness.as_deref(),
                })
                .collect(),
            families: self
                .families
                .iter()
                .map(|f| FamilyJson {
                    expr: f.expr.to_string(),
                    value: exact(f.value),
                })
                .collect(),
            timing: self.timing,
        };
        serde_json::to_string_pretty(&view).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("features,value,decimal,witness\n");
        for p in &self.products {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.features.join(";"),
                exact(p.value),
                p.value.map(round2).unwrap_or_default(),
                p.witness.as_ref().map(|c| c.join(";")).unwrap_or_default()
            );
        }
        out
    }

    /// Aligned text table; `color` adds ANSI bold to the header.
    pub fn to_table(&self, color: bool) -> String {
        let rows: Vec<[String; 4]> = self
            .products
            .iter()
            .map(|p| {
                let cycle = p.witness.as_ref().map_or(String::new(), |c| {
                    let mut c = c.clone();
                    c.push(c[0].clone());
                    c.join(" -> ")
                });
                [
                    format!("{{{}}}", p.features.join(", ")),
                    p.value.map_or_else(|| "undefined".to_string(), round2),
                    exact(p.value),
                    cycle,
                ]
            })
            .collect();
        let header = ["product".to_string(), self.mode.to_string(), "exact".into(), "cycle".into()];
        let mut width = [0; 4];
        for row in rows.iter().chain([&header]) {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |row: &[String; 4]| {
            let cells: Vec<String> = row
                .iter()
                .zip(width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            cells.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        if color {
            let _ = writeln!(out, "\x1b[1m{}\x1b[0m", line(&header));
        } else {
            let _ = writeln!(out, "{}", line(&header));
        }
        for row in &rows {
            let _ = writeln!(out, "{}", line(row));
        }
        out.push_str("\nfamilies:\n");
        for f in &self.families {
            let _ = writeln!(out, "  {}: {}", f.expr, exact(f.value));
        }
        out
    }
}
