//! Cross-checks between independent computations of the same facts.

use std::fmt;

use serde_json::Value;

use crate::analysis::{family_values, product_values, LimitAverageReport};
use crate::graph::kosaraju;
use crate::io::serialize;
use crate::mean_cycle::{brute_force_mean_cycle, Mode};
use crate::model::{FamilyGraph, Weight, Wfts};
use crate::random::{random_corpus, RandomShape};
use crate::scc::symbolic_sccs;
use crate::search::{build_finishing_times_tree, check_tree, dfs_fts};

/// One failed check, with enough context to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    /// The model in `.wfts` syntax (empty for golden comparisons).
    pub model: String,
    pub product: Option<String>,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.check)?;
        if let Some(p) = &self.product {
            write!(f, " product {p}")?;
        }
        write!(f, ": expected {}, got {}", self.expected, self.got)?;
        if !self.model.is_empty() {
            write!(f, "\n--- model ---\n{}-------------", self.model)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub models: usize,
    pub products: usize,
    pub violations: Vec<Violation>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn absorb(&mut self, w: &Wfts) {
        self.models += 1;
        self.products += w.feature_model().product_count();
        self.violations.extend(check_model(w));
    }
}

fn show(v: Option<Weight>) -> String {
    v.map_or_else(|| "undefined".into(), |v| v.to_string())
}

/// Finishing-times tree conditions, symbolic components versus Kosaraju,
/// and family versus product versus cycle enumeration in both modes.
/// Enumeration runs on the unexpanded model, weighting means by length.
pub fn check_model(w: &Wfts) -> Vec<Violation> {
    let x = w.expand_lengths();
    let fm = x.feature_model();
    let text = serialize(w);
    let mut out = Vec::new();
    let mut fail = |check, product: Option<String>, expected: String, got: String| {
        out.push(Violation {
            check,
            model: text.clone(),
            product,
            expected,
            got,
        })
    };

    let g = FamilyGraph::new(&x);
    let tree = build_finishing_times_tree(&dfs_fts(&g), fm);
    for v in check_tree(&tree, &x) {
        fail("tree", None, "no violations".into(), v);
    }
    let sccs = symbolic_sccs(&tree, &g);
    if sccs.pushes != sccs.pops {
        fail("scc-stacks", None, format!("{} pops", sccs.pushes), format!("{} pops", sccs.pops));
    }
    for (p, &product) in fm.products().iter().enumerate() {
        let mut expected = kosaraju(&x.project(product).expect("valid"));
        let mut got = sccs.partition_at(&tree, p);
        expected.sort();
        got.sort();
        if expected != got {
            fail(
                "scc",
                Some(fm.format_product(product)),
                format!("{expected:?}"),
                format!("{got:?}"),
            );
        }
    }

    for mode in [Mode::Max, Mode::Min] {
        let family = family_values(&x, mode, false);
        let product = product_values(&x, mode, false);
        for (p, &prod) in fm.products().iter().enumerate() {
            let proj = w.project(prod).expect("valid");
            let oracle = match brute_force_mean_cycle(&proj.restrict(&proj.reachable()), mode) {
                Ok(v) => v,
                Err(e) => {
                    fail("oracle", Some(fm.format_product(prod)), "a result".into(), e.to_string());
                    continue;
                }
            };
            let name = || Some(format!("{} ({mode})", fm.format_product(prod)));
            if family[p] != oracle {
                fail("family", name(), show(oracle), show(family[p]));
            }
            if product[p] != oracle {
                fail("product", name(), show(oracle), show(product[p]));
            }
        }
    }
    out
}

/// Runs [`check_model`] over a list of models.
pub fn check_models<'a>(models: impl IntoIterator<Item = &'a Wfts>) -> Summary {
    let mut summary = Summary::default();
    for w in models {
        summary.absorb(w);
    }
    summary
}

/// Runs [`check_model`] over `count` seeded random models.
pub fn check_random(seed: u64, count: usize) -> Summary {
    check_models(&random_corpus(seed, count, RandomShape::default()))
}

/// Compares per-product values of `report` against a JSON report of the
/// same shape. Products are matched by feature set.
pub fn compare_with_golden(report: &LimitAverageReport, golden: &str) -> Result<Vec<Violation>, String> {
    let golden: Value = serde_json::from_str(golden).map_err(|e| format!("golden file: {e}"))?;
    let mut out = Vec::new();
    let diff = |product: Option<String>, expected: String, got: String| Violation {
        check: "golden",
        model: String::new(),
        product,
        expected,
        got,
    };
    let mode = golden["mode"].as_str().ok_or("golden file: missing mode")?;
    if mode != report.mode.to_string() {
        out.push(diff(None, format!("mode {mode}"), format!("mode {}", report.mode)));
    }
    let entries = golden["products"].as_array().ok_or("golden file: missing products")?;
    let mut seen = 0;
    for entry in entries {
        let mut features: Vec<&str> = entry["features"]
            .as_array()
            .ok_or("golden file: product without features")?
            .iter()
            .map(|f| f.as_str().ok_or("golden file: feature is not a string"))
            .collect::<Result<_, _>>()?;
        features.sort_unstable();
        let expected = entry["value"].as_str().ok_or("golden file: product without value")?;
        let label = Some(format!("{{{}}}", features.join(", ")));
        match report.value_of(&features) {
            None => out.push(diff(label, expected.into(), "no such product".into())),
            Some(v) => {
                seen += 1;
                if show(v) != expected {
                    out.push(diff(label, expected.into(), show(v)));
                }
            }
        }
    }
    if seen != report.products.len() {
        out.push(diff(
            None,
            format!("{} products", entries.len()),
            format!("{} products", report.products.len()),
        ));
    }
    Ok(out)
}
