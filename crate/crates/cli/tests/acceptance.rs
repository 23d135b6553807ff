//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p ccn-fib --test acceptance -- --nocapture`

use std::path::Path;
use std::thread;

use ccn_fib::dump::{parse_dump, profile, recommend, Mapping, Requirements};
use ccn_fib::experiments::{run_collisions, run_fpr, run_oracle, OracleReport};
use ccn_fib::tables::Table;
use ccn_fib::workload::InstanceParams;
use ccn_fib_core::size_model::{model_sizes, size_ratio};
use ccn_fib_core::{ModelConfig, Variant};

const SEED: u64 = 20_160_901;

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(id: u8, title: &'static str, pass: bool, detail: String) -> Self {
        Outcome {
            id,
            title,
            pass,
            detail,
        }
    }
}

fn golden(n: u8) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/table{n}.csv"));
    std::fs::read_to_string(path).unwrap()
}

/// Cell-by-cell comparison of a rendered table against its golden file.
/// Returns (matching cells, total cells, first mismatch).
fn compare_exact(n: u8) -> (usize, usize, Option<String>) {
    let got = Table::from_number(n).unwrap().render().unwrap();
    let want = golden(n);
    let mut ok = 0;
    let mut total = 0;
    let mut first = None;
    for (g, w) in got.lines().skip(1).zip(want.lines().skip(1)) {
        total += 1;
        if g == w {
            ok += 1;
        } else if first.is_none() {
            first = Some(format!("got {g}, want {w}"));
        }
    }
    if got.lines().count() != want.lines().count() {
        first.get_or_insert_with(|| "row count differs".into());
        total = total.max(want.lines().count() - 1);
    }
    (ok, total, first)
}

fn exact_table(id: u8, title: &'static str, n: u8) -> Outcome {
    let (ok, total, first) = compare_exact(n);
    let mut detail = format!("{ok}/{total} cells exact");
    if let Some(m) = first {
        detail += &format!("; {m}");
    }
    Outcome::new(id, title, ok == total && total > 0, detail)
}

fn table8() -> Outcome {
    // Reference ratios at two or three decimals; rows are (N=30,F=10), (N=50,F=15), (N=50,F=10) and
    // columns L = 4, 6, 8, 10 bytes.
    let reference = [
        0.69, 0.5, 0.392, 0.322, 0.74, 0.552, 0.44, 0.366, 0.686, 0.497, 0.389, 0.32,
    ];
    let mut got = Vec::new();
    for (n, f) in [(30, 10), (50, 15), (50, 10)] {
        for l in [4, 6, 8, 10] {
            let cfg = ModelConfig::new(n, f, l, 1e-6);
            got.push(size_ratio(&cfg, Variant::FibBf).unwrap());
        }
    }
    let worst = got
        .iter()
        .zip(reference)
        .map(|(g, p)| (g - p).abs())
        .fold(0.0, f64::max);
    let within = got.len() == reference.len()
        && got
            .iter()
            .zip(reference)
            .all(|(g, p)| (g - p).abs() <= 0.001);
    Outcome::new(
        5,
        "table 8 ratios",
        within,
        format!(
            "{} cells, worst deviation {worst:.4} (tolerance 0.001)",
            got.len()
        ),
    )
}

fn collisions() -> Outcome {
    let r = run_collisions(1 << 16, 10_000_000, SEED);
    let rate = r.rate();
    Outcome::new(
        6,
        "32-bit prefix hash false-match rate",
        (0.5e-5..=3e-5).contains(&rate),
        format!(
            "{} / {} probes = {rate:.3e} (expected {:.3e}, window [5e-6, 3e-5])",
            r.false_matches,
            r.probes,
            r.expected()
        ),
    )
}

fn fpr() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for variant in [Variant::FibBf, Variant::FibCbf] {
        for fpp in [0.01, 0.001] {
            let r = run_fpr(variant, 1000, fpp, 1000, 1_000_000, SEED).unwrap();
            pass &= r.rate() <= 2.0 * fpp;
            parts.push(format!("{variant}@{fpp}: {:.3e}", r.rate()));
        }
    }
    Outcome::new(
        7,
        "filter FPR at capacity <= 2 x target",
        pass,
        parts.join(", "),
    )
}

/// Smallest `q` with `P(Poisson(lambda) <= q) >= 0.999`.
fn poisson_q999(lambda: f64) -> u64 {
    let mut term = (-lambda).exp();
    let mut cdf = term;
    let mut q = 0;
    while cdf < 0.999 {
        q += 1;
        term *= lambda / q as f64;
        cdf += term;
    }
    q
}

fn oracle_laws(hash: &OracleReport, bf: &OracleReport, cbf: &OracleReport) -> Outcome {
    let trials = hash.counts.trials;
    let hash_ok =
        hash.counts.violations == 0 && (hash.counts.depth_inflations as f64) < 1e-4 * trials as f64;

    let filter_ok = |r: &OracleReport| {
        r.counts.violations == 0
            && r.expected_supersets < 1.0
            && r.counts.face_supersets <= poisson_q999(r.expected_supersets)
    };
    let pass = hash_ok && filter_ok(bf) && filter_ok(cbf) && trials >= 100_000;

    let filter_detail = |r: &OracleReport| {
        format!(
            "{}: violations {}, supersets {} (expected {:.2}), inflations {} (expected {:.2})",
            r.variant,
            r.counts.violations,
            r.counts.face_supersets,
            r.expected_supersets,
            r.counts.depth_inflations,
            r.expected_inflations
        )
    };
    Outcome::new(
        8,
        "oracle laws over 1e5 trials",
        pass,
        format!(
            "FIB-Hash: violations {}, inflations {}, build collisions {}; {}; {}, round-trip skips {}",
            hash.counts.violations,
            hash.counts.depth_inflations,
            hash.counts.insert_collisions,
            filter_detail(bf),
            filter_detail(cbf),
            cbf.counts.saturated_skips
        ),
    )
}

fn archetypes() -> Outcome {
    let cases = [
        ("one_to_one", Mapping::OneToOne, None),
        ("one_to_n", Mapping::OneToN, None),
        ("n_to_one", Mapping::NToOne, None),
        ("iot_nodes", Mapping::OneToOne, Some(Variant::FibHash)),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (fixture, mapping, variant) in cases {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("fixtures/{fixture}.dump"));
        let dump = parse_dump(&std::fs::read_to_string(path).unwrap()).unwrap();
        let p = profile(&dump);
        let rec = recommend(&p, &Requirements::default());
        pass &= p.mapping == mapping;
        if let Some(v) = variant {
            pass &= rec.variant == v;
        }
        parts.push(format!("{fixture} -> {} / {}", p.mapping, rec.variant));
    }
    Outcome::new(9, "mapping archetypes", pass, parts.join(", "))
}

fn compression() -> Outcome {
    let cfg = ModelConfig::new(50, 10, 15, 1e-6);
    let s = model_sizes(&cfg).unwrap();
    let fib = s.fib_bits as f64;
    let hash = s.fib_hash_bits as f64 / fib;
    let bf = s.fib_bf_bits as f64 / fib;
    let pass = cfg.filter_capacity() == 5
        && (hash - 0.323).abs() <= 0.0005
        && (bf - 0.222).abs() <= 0.0005
        && (hash - 1.0 / 3.0).abs() <= 0.12
        && (bf - 0.25).abs() <= 0.12;
    Outcome::new(
        10,
        "compression ratios at N=50, F=10, L=15",
        pass,
        format!("FIB-Hash/FIB {hash:.3}, FIB-BF/FIB {bf:.3}"),
    )
}

#[test]
fn acceptance() {
    let params = InstanceParams::default();
    let (oracles, coll, rates) = thread::scope(|s| {
        let oracles: Vec<_> = [Variant::FibHash, Variant::FibBf, Variant::FibCbf]
            .into_iter()
            .map(|v| s.spawn(move || run_oracle(v, params, 1e-6, 100_000, SEED).unwrap()))
            .collect();
        let coll = s.spawn(collisions);
        let rates = s.spawn(fpr);
        (
            oracles
                .into_iter()
                .map(|h| h.join().unwrap())
                .collect::<Vec<_>>(),
            coll.join().unwrap(),
            rates.join().unwrap(),
        )
    });

    let outcomes = vec![
        exact_table(1, "table 4 sizes", 4),
        exact_table(2, "table 5 size differences", 5),
        exact_table(3, "table 6 sizes by filter capacity", 6),
        exact_table(4, "table 7 break-even prefix lengths", 7),
        table8(),
        coll,
        rates,
        oracle_laws(&oracles[0], &oracles[1], &oracles[2]),
        archetypes(),
        compression(),
    ];

    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] AC{:<2} {}: {}", o.id, o.title, o.detail);
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
