//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if a hard criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use wfts_core::analysis::{family_values, product_values};
use wfts_core::graph::kosaraju;
use wfts_core::io::generators::{grant_request, minepump_lite, taxi};
use wfts_core::mean_cycle::{brute_force_mean_cycle, classic_karp};
use wfts_core::model::FamilyGraph;
use wfts_core::random::{random_corpus, RandomShape};
use wfts_core::scc::symbolic_sccs;
use wfts_core::search::{build_finishing_times_tree, check_tree, dfs_fts};
use wfts_core::{parse, serialize, FeatureExpr, Mode, StateId, Weight, Wfts};

/// Largest allowed gap between a rendered decimal and the exact value.
const DECIMAL_TOLERANCE: (i64, i64) = (5, 1000);
/// Wall-clock budget for the taxi table, binary start to exit.
const TABLE_BUDGET: Duration = Duration::from_secs(1);
/// Wall-clock budget for the whole cross-check corpus.
const TRIANGLE_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_MODELS: usize = 500;
const RANDOM_SEED: u64 = 20_240_601;

enum Verdict {
    Pass(String),
    Fail(String),
    /// A soft criterion that did not hold; reported, never fatal.
    Warn(String),
}

fn wfts(args: &[&str]) -> (Option<i32>, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_wfts"))
        .args(args)
        .env("WFTS_COLOR", "0")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned(), elapsed)
}

fn ratio(n: i64, d: i64) -> Weight {
    Weight::new(n, d)
}

/// `"12.88"` as the exact rational 1288/100.
fn decimal(text: &str) -> Option<Weight> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    Some(Weight::new(digits, 10i64.pow(frac.len() as u32)))
}

fn golden_table() -> Verdict {
    let expected: [(&[&str], Weight, &str); 8] = [
        (&[], ratio(73, 6), "12.17"),
        (&["L1"], ratio(73, 6), "12.17"),
        (&["S"], ratio(103, 8), "12.88"),
        (&["T"], ratio(14, 1), "14.00"),
        (&["S", "L1"], ratio(133, 10), "13.30"),
        (&["T", "L1"], ratio(14, 1), "14.00"),
        (&["S", "T"], ratio(43, 3), "14.33"),
        (&["S", "T", "L1"], ratio(73, 5), "14.60"),
    ];
    let (code, out, elapsed) = wfts(&["analyze", "--generate", "taxi:1", "--mode", "max", "--format", "json"]);
    if code != Some(0) {
        return Verdict::Fail(format!("exit {code:?}"));
    }
    let json: serde_json::Value = serde_json::from_str(&out).expect("json report");
    let products = json["products"].as_array().expect("products");
    let mut problems = Vec::new();
    if products.len() != expected.len() {
        problems.push(format!("{} products", products.len()));
    }
    for (features, exact, rendered) in expected {
        let mut want: Vec<&str> = features.to_vec();
        want.sort_unstable();
        let entry = products.iter().find(|p| {
            let mut have: Vec<&str> = p["features"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
            have.sort_unstable();
            have == want
        });
        let Some(entry) = entry else {
            problems.push(format!("{features:?} missing"));
            continue;
        };
        let value: Weight = entry["value"].as_str().unwrap().parse().expect("rational value");
        let shown = entry["decimal"].as_str().and_then(decimal);
        if value != exact {
            problems.push(format!("{features:?}: {value} != {exact}"));
        }
        let tolerance = ratio(DECIMAL_TOLERANCE.0, DECIMAL_TOLERANCE.1);
        let close = shown.is_some_and(|x| x - exact <= tolerance && exact - x <= tolerance);
        if !close || entry["decimal"] != rendered {
            problems.push(format!("{features:?}: rendered {}, expected {rendered}", entry["decimal"]));
        }
    }
    if elapsed >= TABLE_BUDGET {
        problems.push(format!("took {elapsed:?}"));
    }
    if problems.is_empty() {
        Verdict::Pass(format!("8 products exact, decimals within {}/{}, {elapsed:.2?}", DECIMAL_TOLERANCE.0, DECIMAL_TOLERANCE.1))
    } else {
        Verdict::Fail(problems.join("; "))
    }
}

/// The taxi model cut down to the transitions of one cycle, given as a state
/// sequence, then analysed as a single plain graph.
fn cycle_mean(states: &[&str]) -> Option<Weight> {
    let full = taxi(1);
    let text = serialize(&full);
    let on_cycle = |line: &str| {
        states.iter().zip(states.iter().cycle().skip(1)).any(|(a, b)| line.starts_with(&format!("trans {a} -> {b} ")))
    };
    let kept: String = text
        .lines()
        .filter(|l| !l.starts_with("trans ") || on_cycle(l))
        .map(|l| format!("{l}\n"))
        .collect();
    let cut = parse(&kept).ok()?;
    if cut.transitions().len() != states.len() {
        return None;
    }
    let all = cut.feature_model().product_from_names(&["S", "T", "L1"]).ok()?;
    classic_karp(&cut.expand_lengths().project(all).ok()?, Mode::Max)
}

fn cycle_spot_checks() -> Verdict {
    let cycles: [(&[&str], Weight); 6] = [
        (&["AP", "R1", "P1", "AR"], ratio(83, 8)),
        (&["AP", "R2", "P2", "AR"], ratio(73, 6)),
        (&["AP", "Re1", "Pe1", "AR"], ratio(103, 10)),
        (&["AP", "R2", "R1", "P1", "AR"], ratio(93, 8)),
        (&["AP", "R1", "P1", "P2", "AR"], ratio(93, 8)),
        (&["AP", "R2", "R1", "P1", "P2", "AR"], ratio(103, 8)),
    ];
    let wrong: Vec<String> = cycles
        .iter()
        .filter_map(|(c, want)| {
            let got = cycle_mean(c);
            (got != Some(*want)).then(|| format!("{}: {got:?} != {want}", c.join("->")))
        })
        .collect();
    if wrong.is_empty() {
        Verdict::Pass("83/8, 73/6, 103/10, 93/8 twice, 103/8".into())
    } else {
        Verdict::Fail(wrong.join("; "))
    }
}

fn corpus() -> Vec<Wfts> {
    let mut models = vec![taxi(1), grant_request(), minepump_lite()];
    models.extend(random_corpus(RANDOM_SEED, RANDOM_MODELS, RandomShape::default()));
    models
}

struct CorpusFindings {
    triangle: Vec<String>,
    products: usize,
    trees: Vec<String>,
    tree_count: usize,
    components: Vec<String>,
    elapsed: Duration,
}

fn run_corpus(models: &[Wfts]) -> CorpusFindings {
    let start = Instant::now();
    let mut f = CorpusFindings {
        triangle: Vec::new(),
        products: 0,
        trees: Vec::new(),
        tree_count: 0,
        components: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for (i, w) in models.iter().enumerate() {
        let x = w.expand_lengths();
        let fm = x.feature_model();
        let g = FamilyGraph::new(&x);
        let tree = build_finishing_times_tree(&dfs_fts(&g), fm);
        f.tree_count += 1;
        f.trees.extend(check_tree(&tree, &x).into_iter().map(|v| format!("model {i}: {v}")));
        let sccs = symbolic_sccs(&tree, &g);
        for (p, &product) in fm.products().iter().enumerate() {
            let mut want = kosaraju(&x.project(product).unwrap());
            let mut got = sccs.partition_at(&tree, p);
            for c in want.iter_mut().chain(got.iter_mut()) {
                c.sort();
            }
            want.sort();
            got.sort();
            if want != got {
                f.components.push(format!("model {i} product {p}"));
            }
        }
        for mode in [Mode::Max, Mode::Min] {
            let family = family_values(&x, mode, false);
            let product = product_values(&x, mode, false);
            for (p, &prod) in fm.products().iter().enumerate() {
                let proj = w.project(prod).unwrap();
                let oracle = brute_force_mean_cycle(&proj.restrict(&proj.reachable()), mode);
                match oracle {
                    Ok(o) if o == family[p] && o == product[p] => {}
                    other => f.triangle.push(format!(
                        "model {i} product {p} {mode}: family {:?} product {:?} oracle {other:?}",
                        family[p], product[p]
                    )),
                }
            }
        }
        f.products += fm.product_count();
    }
    f.elapsed = start.elapsed();
    f
}

fn verdict(problems: &[String], ok: String) -> Verdict {
    match problems.first() {
        None => Verdict::Pass(ok),
        Some(first) => Verdict::Fail(format!("{} failures, first: {first}", problems.len())),
    }
}

fn grant_request_tree() -> Verdict {
    let w = grant_request();
    let g = FamilyGraph::new(&w);
    let fm = w.feature_model();
    let tree = build_finishing_times_tree(&dfs_fts(&g), fm);
    let g_or_a = fm.denote(&(FeatureExpr::var("G") | FeatureExpr::var("A"))).unwrap();
    let mut labels: Vec<_> = tree.node(tree.root()).children.iter().map(|&c| tree.node(c).label.clone()).collect();
    labels.sort_by_key(|l| l.iter().collect::<Vec<_>>());
    let mut want = vec![g_or_a.clone(), !&g_or_a];
    want.sort_by_key(|l| l.iter().collect::<Vec<_>>());
    let names = |states: Vec<StateId>| states.into_iter().map(|s| w.state_name(s).to_string()).collect::<Vec<_>>();
    let mut problems = Vec::new();
    if labels != want {
        problems.push("root split differs".to_string());
    }
    for p in 0..fm.product_count() {
        let order = names(tree.states_of(p));
        let want: &[&str] = if g_or_a.contains(p) { &["s0", "s2", "s1", "s3"] } else { &["s2", "s0", "s1", "s3"] };
        if order != want {
            problems.push(format!("{}: {order:?}", fm.format_product(fm.products()[p])));
        }
    }
    verdict(&problems, "root split {G || A, !(G || A)}, orders (s0,s2,s1,s3) and (s2,s0,s1,s3)".into())
}

fn scaling_and_shift(models: &[Wfts]) -> Verdict {
    let c = ratio(7, 3);
    let shift = ratio(-5, 2);
    let mut problems = Vec::new();
    let unit = RandomShape {
        max_length: 1,
        ..RandomShape::default()
    };
    let unit_models = random_corpus(RANDOM_SEED + 1, RANDOM_MODELS, unit);
    for mode in [Mode::Max, Mode::Min] {
        for (i, w) in models.iter().enumerate() {
            let before = family_values(&w.expand_lengths(), mode, false);
            let after = family_values(&w.map_weights(|x| x * c).expand_lengths(), mode, false);
            if after != before.iter().map(|v| v.map(|x| x * c)).collect::<Vec<_>>() {
                problems.push(format!("scaling, model {i}, {mode}"));
            }
        }
        for (i, w) in unit_models.iter().enumerate() {
            let before = family_values(w, mode, false);
            let after = family_values(&w.map_weights(|x| x + shift), mode, false);
            if after != before.iter().map(|v| v.map(|x| x + shift)).collect::<Vec<_>>() {
                problems.push(format!("shift, model {i}, {mode}"));
            }
        }
    }
    verdict(&problems, format!("scale by {c} and shift by {shift}, both modes, exact"))
}

fn bench_rows(args: &[&str]) -> Result<Vec<serde_json::Value>, String> {
    let (code, out, _) = wfts(args);
    if code != Some(0) {
        return Err(format!("exit {code:?}"));
    }
    let rows: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    Ok(rows.as_array().cloned().unwrap_or_default())
}

fn speedup_trend() -> Verdict {
    let rows = match bench_rows(&["bench", "--generate", "taxi:1..6", "--reps", "5", "--format", "json"]) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e),
    };
    if rows.len() != 6 || rows.iter().any(|r| r["agree"] != true) {
        return Verdict::Fail("expected six agreeing rows".into());
    }
    let slower: Vec<String> = rows
        .iter()
        .filter(|r| r["features"].as_u64().unwrap() >= 4)
        .filter(|r| r["family"]["mean_s"].as_f64() >= r["product"]["mean_s"].as_f64())
        .map(|r| format!("{} {:.2}x", r["model"].as_str().unwrap(), r["speedup"].as_f64().unwrap()))
        .collect();
    if slower.is_empty() {
        Verdict::Pass("family-based faster for every row with at least 4 features".into())
    } else {
        Verdict::Warn(format!("family-based not faster on {}", slower.join(", ")))
    }
}

fn minepump_reported() -> Verdict {
    let rows = match bench_rows(&["bench", "--generate", "minepump", "--reps", "5", "--format", "json"]) {
        Ok(r) => r,
        Err(e) => return Verdict::Fail(e),
    };
    let [row] = rows.as_slice() else {
        return Verdict::Fail(format!("{} rows", rows.len()));
    };
    let (f, p) = (row["family"]["mean_s"].as_f64(), row["product"]["mean_s"].as_f64());
    match (f, p) {
        (Some(f), Some(p)) if f > 0.0 && p > 0.0 && row["agree"] == true => {
            Verdict::Pass(format!("family {f:.6} s, product {p:.6} s, speedup {:.2}x", p / f))
        }
        _ => Verdict::Fail(format!("incomplete row {row}")),
    }
}

fn main() {
    let models = corpus();
    let findings = run_corpus(&models);
    let mut triangle = findings.triangle.clone();
    if findings.elapsed >= TRIANGLE_BUDGET {
        triangle.push(format!("took {:?}", findings.elapsed));
    }
    let results: Vec<(&str, Verdict)> = vec![
        ("golden taxi table", golden_table()),
        ("cycle-mean spot checks", cycle_spot_checks()),
        (
            "oracle triangle",
            verdict(
                &triangle,
                format!(
                    "{} models, {} products, both modes, {:.1?}",
                    models.len(),
                    findings.products,
                    findings.elapsed
                ),
            ),
        ),
        (
            "finishing-times tree conditions",
            verdict(&findings.trees, format!("{} trees, five conditions each", findings.tree_count)),
        ),
        (
            "symbolic components versus Kosaraju",
            verdict(&findings.components, format!("{} products", findings.products)),
        ),
        ("grant/request tree", grant_request_tree()),
        ("scaling and shift", scaling_and_shift(&models)),
        ("speedup trend (soft)", speedup_trend()),
        ("minepump timing reported", minepump_reported()),
    ];
    let mut failed = false;
    for (i, (name, v)) in results.iter().enumerate() {
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed = true;
                ("FAIL", d)
            }
            Verdict::Warn(d) => ("FAIL", d),
        };
        let note = if matches!(v, Verdict::Warn(_)) { " (warning only)" } else { "" };
        println!("{tag} {} {name}: {detail}{note}", i + 1);
    }
    if failed {
        std::process::exit(1);
    }
}
