//! Acceptance suite: one test per published reproduction target, each
//! printing a single pass/fail line (run with `--nocapture` to see the
//! lines for passing criteria; failures carry the same detail in the
//! panic message).
//!
//! Every tolerance is pinned here. Three sub-checks reproduce published
//! numbers that the implementation disputes (see "Reproduction notes" in
//! the README); they are asserted as published on purpose and fail with
//! the measured value in the message.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::OnceLock;
use std::time::Instant;

use qunit_bell::{
    bell_max, classical_limit_scan, correlation, correlation_poly, distinct_correlations,
    enumerate_independent, sample_survey, survey, unique_element_count, wigner_d, wigner_d_squared,
    MaskFamily, ParityMask, SampleSpec, SpinLabel, SurveyReport, DEFAULT_GRID_POINTS,
    DEFAULT_REFINE_TOL, TSIRELSON_BOUND,
};

fn spin(two_s: u32) -> SpinLabel {
    SpinLabel::from_two_s(two_s).unwrap()
}

fn mask(two_s: u32, p: u64) -> ParityMask {
    ParityMask::from_integer(spin(two_s), p).unwrap()
}

/// The published survey ladder s in {1, 3/2, 2, 5/2, 3, 4, 5}.
const LADDER: [u32; 7] = [2, 3, 4, 5, 6, 8, 10];

struct LadderSurveys {
    reports: BTreeMap<u32, SurveyReport>,
    wall_s5: f64,
}

fn ladder_surveys() -> &'static LadderSurveys {
    static SURVEYS: OnceLock<LadderSurveys> = OnceLock::new();
    SURVEYS.get_or_init(|| {
        let mut reports = BTreeMap::new();
        let mut wall_s5 = 0.0;
        for two_s in LADDER {
            let start = Instant::now();
            let report = survey(spin(two_s), DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL)
                .expect("ladder survey");
            if two_s == 10 {
                wall_s5 = start.elapsed().as_secs_f64();
            }
            reports.insert(two_s, report);
        }
        LadderSurveys { reports, wall_s5 }
    })
}

fn check(criterion: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("[acceptance] {criterion}: PASS");
    } else {
        println!("[acceptance] {criterion}: FAIL: {}", failures.join("; "));
        panic!("{criterion}: {}", failures.join("; "));
    }
}

#[test]
fn criterion_01_distinct_table() {
    let start = Instant::now();
    let mut failures = Vec::new();
    // (two_s, N_D, independent, N_C)
    let rows: [(u32, u64, u64, usize); 9] = [
        (2, 2, 3, 2),
        (3, 4, 7, 5),
        (4, 6, 15, 9),
        (5, 9, 31, 19),
        (6, 12, 63, 35),
        (7, 16, 127, 71),
        (8, 20, 255, 135),
        (9, 25, 511, 271),
        (10, 30, 1023, 527),
    ];
    for (two_s, n_d, independent, n_c) in rows {
        let s = spin(two_s);
        let got_nd = unique_element_count(s);
        if got_nd != n_d {
            failures.push(format!("s={s}: N_D {got_nd} != {n_d}"));
        }
        let got_v = enumerate_independent(s).count() as u64;
        if got_v != independent {
            failures.push(format!("s={s}: independent {got_v} != {independent}"));
        }
        let groups = distinct_correlations(s).expect("dedup");
        if groups.distinct_count() != n_c {
            failures.push(format!(
                "s={s}: distinct {} != {n_c}",
                groups.distinct_count()
            ));
        }
    }
    let wall = start.elapsed().as_secs_f64();
    if wall > 120.0 {
        failures.push(format!("runtime {wall:.1}s exceeds 2 minutes"));
    }
    check("criterion 1 (distinct-count table, exact)", failures);
}

#[test]
fn criterion_02_small_spin_maxima() {
    let mut failures = Vec::new();
    let cases: [(u32, u64, f64); 7] = [
        (2, 6, 2.48),
        (2, 4, 2.48),
        (2, 5, 2.55),
        (3, 14, 2.348),
        (3, 13, 2.401),
        (3, 12, 2.349),
        (3, 10, 2.51),
    ];
    for (two_s, p, want) in cases {
        let got = bell_max(&mask(two_s, p), DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL)
            .unwrap()
            .b_max;
        if (got - want).abs() > 0.01 {
            failures.push(format!("s={}, P={p}: {got:.4} vs {want}", spin(two_s)));
        }
    }
    // mirror partners share the value exactly
    for (two_s, a, b) in [(3u32, 14u64, 8u64), (3, 13, 11)] {
        let va = bell_max(&mask(two_s, a), 512, 1e-9).unwrap().b_max;
        let vb = bell_max(&mask(two_s, b), 512, 1e-9).unwrap().b_max;
        if (va - vb).abs() > 1e-9 {
            failures.push(format!("mirror pair {a}/{b} differ: {va} vs {vb}"));
        }
    }
    let strongest = bell_max(&mask(3, 9), DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL)
        .unwrap()
        .b_max;
    if (strongest - 2.62).abs() > 0.01 {
        failures.push(format!("s=3/2, P=9: {strongest:.4} vs 2.62"));
    }
    check(
        "criterion 2 (spin-1 and spin-3/2 maxima, +/-0.01)",
        failures,
    );
}

#[test]
fn criterion_03_per_spin_maxima_table() {
    let mut failures = Vec::new();
    let surveys = ladder_surveys();
    // published (two_s, argmax P, B_max)
    let rows: [(u32, u64, f64); 5] = [
        (4, 17, 2.53),
        (5, 54, 2.56),
        (6, 77, 2.51),
        (8, 306, 2.51),
        (10, 1212, 2.51),
    ];
    for (two_s, want_p, want_b) in rows {
        let report = &surveys.reports[&two_s];
        let max_b = report.totals.max_b_max;
        if (max_b - want_b).abs() > 0.01 {
            failures.push(format!("s={}: max {max_b:.4} vs {want_b}", spin(two_s)));
        }
        let argmax_group: Vec<u64> = report
            .records
            .iter()
            .filter(|r| r.b_max == max_b)
            .map(|r| r.p)
            .collect();
        if !argmax_group.contains(&want_p) {
            failures.push(format!(
                "s={}: argmax group {argmax_group:?} does not contain published P={want_p} \
                 (bell_max({want_p}) = {:.4})",
                spin(two_s),
                report
                    .records
                    .iter()
                    .find(|r| r.p == want_p)
                    .map(|r| r.b_max)
                    .unwrap_or(f64::NAN),
            ));
        }
    }
    if surveys.wall_s5 > 300.0 {
        failures.push(format!(
            "s=5 survey took {:.1}s (> 5 minutes)",
            surveys.wall_s5
        ));
    }
    check(
        "criterion 3 (per-spin maxima with matching argmax P)",
        failures,
    );
}

#[test]
fn criterion_04_large_spin_samples() {
    let mut failures = Vec::new();
    let rows: [(u32, u64, f64); 4] = [
        (12, 4097, 2.20),
        (12, 5461, 2.47),
        (20, 524289, 2.12),
        (20, 1398101, 2.47),
    ];
    for (two_s, p, want) in rows {
        let got = bell_max(&mask(two_s, p), DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL)
            .unwrap()
            .b_max;
        if (got - want).abs() > 0.01 {
            failures.push(format!("s={}, P={p}: {got:.4} vs {want}", spin(two_s)));
        }
    }
    // the sampled-survey surface reproduces the same numbers
    let spec = SampleSpec {
        count: 0,
        seed: 0,
        include: vec![4097, 5461],
    };
    let report = sample_survey(spin(12), &spec, DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL).unwrap();
    for (p, want) in [(4097u64, 2.20f64), (5461, 2.47)] {
        let got = report.records.iter().find(|r| r.p == p).unwrap().b_max;
        if (got - want).abs() > 0.01 {
            failures.push(format!("sampled s=6, P={p}: {got:.4} vs {want}"));
        }
    }
    check(
        "criterion 4 (spin-6 and spin-10 samples, +/-0.01)",
        failures,
    );
}

#[test]
fn criterion_05_cumulative_totals() {
    let mut failures = Vec::new();
    let surveys = ladder_surveys();
    let independent: u64 = surveys.reports.values().map(|r| r.totals.independent).sum();
    let distinct: usize = surveys.reports.values().map(|r| r.totals.distinct).sum();
    if independent != 1397 {
        failures.push(format!("cumulative independent {independent} != 1397"));
    }
    if distinct != 732 {
        failures.push(format!("cumulative distinct {distinct} != 732"));
    }
    check("criterion 5 (cumulative totals 1397/732, exact)", failures);
}

#[test]
fn criterion_06_every_group_violates() {
    let mut failures = Vec::new();
    let surveys = ladder_surveys();
    for (two_s, report) in &surveys.reports {
        let non_violating = report.records.iter().filter(|r| !r.violates).count();
        if non_violating > 0 {
            failures.push(format!(
                "s={}: {non_violating} records with B_max <= 2 (min {:.4})",
                spin(*two_s),
                report.totals.min_b_max
            ));
        }
    }
    check(
        "criterion 6 (no non-violating correlation through s=5)",
        failures,
    );
}

#[test]
fn criterion_07_near_identity_decay() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let ladder: Vec<SpinLabel> = [3u32, 9, 19, 29, 39, 49].iter().map(|&t| spin(t)).collect();
    let records = classical_limit_scan(
        MaskFamily::NearIdentity,
        &ladder,
        DEFAULT_GRID_POINTS,
        DEFAULT_REFINE_TOL,
    )
    .unwrap();
    let values: Vec<(usize, f64)> = records.iter().map(|r| (r.dimension, r.b_max)).collect();
    for pair in values.windows(2) {
        if pair[1].1 >= pair[0].1 {
            failures.push(format!(
                "not strictly decreasing: B(N={}) = {:.6} >= B(N={}) = {:.6}",
                pair[1].0, pair[1].1, pair[0].0, pair[0].1
            ));
        }
    }
    let at_50 = values.last().unwrap().1;
    if at_50 >= 2.0 {
        failures.push(format!("B_max(N=50) = {at_50:.6}, published as < 2"));
    }
    let wall = start.elapsed().as_secs_f64();
    if wall > 600.0 {
        failures.push(format!("runtime {wall:.1}s exceeds 10 minutes"));
    }
    check(
        "criterion 7 (near-identity family decay, < 2 at N=50)",
        failures,
    );
}

#[test]
fn criterion_08_tsirelson_margin() {
    let mut failures = Vec::new();
    let surveys = ladder_surveys();
    let global_max = surveys
        .reports
        .values()
        .map(|r| r.totals.max_b_max)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = TSIRELSON_BOUND - global_max;
    println!(
        "[acceptance] criterion 8 detail: global max {global_max:.9}, margin to 2*sqrt(2) = {margin:.6}"
    );
    if global_max >= TSIRELSON_BOUND - 1e-3 {
        failures.push(format!(
            "global max {global_max:.6} reaches the ceiling {TSIRELSON_BOUND:.6} (margin {margin:.2e})"
        ));
    }
    check("criterion 8 (ceiling 2*sqrt(2) not attained)", failures);
}

#[test]
fn criterion_09_oracle_and_wigner_suites() {
    let mut failures = Vec::new();
    // correlation vs dense tensor-product oracle, all canonical masks s <= 5/2
    let mut worst: f64 = 0.0;
    for two_s in 1..=5u32 {
        for canonical in enumerate_independent(spin(two_s)) {
            for idx in 0..25u64 {
                let theta = TAU
                    * common::keyed_random_f64(
                        0xACCE97 ^ u64::from(two_s),
                        canonical.p() * 31 + idx,
                    );
                let got = correlation(&canonical.mask(), theta).unwrap();
                let want = common::singlet_expectation(two_s, canonical.p(), theta);
                worst = worst.max((got - want).abs());
            }
        }
    }
    if worst > 1e-10 {
        failures.push(format!("oracle deviation {worst:.2e} > 1e-10"));
    }

    // unitarity to N = 50
    for two_s in [2u32, 9, 20, 35, 49] {
        let s = spin(two_s);
        let tol = if s.dimension() <= 21 { 1e-12 } else { 1e-9 };
        for idx in 0..4u64 {
            let theta = TAU * common::keyed_random_f64(0x0111 + u64::from(two_s), idx);
            let table = wigner_d_squared(s, theta).unwrap();
            for r in 0..s.dimension() {
                let row: f64 = (0..s.dimension()).map(|c| table.entry(r, c)).sum();
                let col: f64 = (0..s.dimension()).map(|c| table.entry(c, r)).sum();
                if (row - 1.0).abs() > tol || (col - 1.0).abs() > tol {
                    failures.push(format!(
                        "s={s}: row/col sum off by {:.2e}",
                        (row - 1.0).abs().max((col - 1.0).abs())
                    ));
                }
            }
        }
    }

    // index symmetries to N = 50
    for two_s in [3u32, 10, 49] {
        let s = spin(two_s);
        let n = s.dimension();
        let table = wigner_d_squared(s, 1.77).unwrap();
        for r in 0..n {
            for c in 0..n {
                let v = table.entry(r, c);
                let dev = (v - table.entry(n - 1 - r, n - 1 - c))
                    .abs()
                    .max((v - table.entry(c, r)).abs());
                if dev > 1e-10 {
                    failures.push(format!("s={s}: symmetry broken by {dev:.2e} at ({r},{c})"));
                }
            }
        }
    }

    // composition of the signed matrix, N <= 21
    for two_s in [2u32, 7, 14, 20] {
        let s = spin(two_s);
        for idx in 0..3u64 {
            let t1 = TAU * common::keyed_random_f64(0xC0, idx * 2);
            let t2 = TAU * common::keyed_random_f64(0xC0, idx * 2 + 1);
            let err = (wigner_d(s, t1).unwrap() * wigner_d(s, t2).unwrap()
                - wigner_d(s, t1 + t2).unwrap())
            .amax();
            if err > 1e-9 {
                failures.push(format!("s={s}: composition error {err:.2e}"));
            }
        }
    }
    check(
        "criterion 9 (oracle equivalence and Wigner suites)",
        failures,
    );
}

#[test]
fn criterion_10_peres_polynomial() {
    let mut failures = Vec::new();
    let poly = correlation_poly(&mask(2, 5)).unwrap();
    let want = [-1.0 / 3.0, 0.0, 4.0 / 3.0];
    for (k, (&got, &want)) in poly.coeffs.iter().zip(want.iter()).enumerate() {
        if (got - want).abs() > 1e-10 {
            failures.push(format!("c[{k}] = {got:.12} vs {want:.12}"));
        }
    }
    check(
        "criterion 10 (spin-1 alternating-mask polynomial)",
        failures,
    );
}
