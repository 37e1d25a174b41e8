//! Acceptance suite: one pass/fail line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use iaa_core::attributes::{agreement_ratio, area};
use iaa_core::curve::build_curve;
use iaa_core::demo::{self, CONVENTION_FREE_CELLS, PUBLISHED_CRITICS};
use iaa_core::similarity::{
    feature_vector, fuzzy_numbers, resolve_range, similarity, similarity_matrix,
};
use iaa_core::weights::{
    eigen_residual, first_principal_component, generate_population, learn_weights, scatter_matrix,
    GeneratorConfig, LearnConfig,
};
use iaa_core::{
    AgreementLoop, AttributeOptions, Execution, FeatureVector, FuzzyNumber, RangeSpec, WeightVector,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Pairs = Vec<(f64, f64)>;
type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn fnum(label: &str, pairs: &[(f64, f64)]) -> FuzzyNumber {
    FuzzyNumber::new(set(label, pairs), AttributeOptions::default()).unwrap()
}

fn ar(pairs: &[(f64, f64)]) -> f64 {
    let s = set("s", pairs);
    agreement_ratio(&s, &build_curve(&s), AgreementLoop::To2)
}

fn agreement_oracle() -> Outcome {
    let a = ar(&[(1.0, 2.0), (2.0, 3.0)]);
    let b = ar(&[(1.0, 2.0), (1.9, 3.0)]);
    let c = ar(&[(4.0, 7.0)]);
    let ok = a == 0.0 && (b - 0.05).abs() <= 1e-12 && c == 1.0;
    outcome(ok, format!("touching {a}, overlapping {b}, singleton {c}"))
}

fn crisp_cells() -> Outcome {
    let report = demo::run_demo(&[], &WeightVector::DEFAULT, Execution::default()).unwrap();
    let cmp = &report.best_run().comparison;
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b) in CONVENTION_FREE_CELLS {
        let c = cmp.cell(a, b).unwrap();
        ok &= c.deviation.abs() <= 5e-5;
        parts.push(format!("({a},{b}) {:.6} vs {:.4}", c.computed, c.published));
    }
    outcome(ok, parts.join("; "))
}

fn matrix_reproduction() -> Outcome {
    let report = demo::run_demo(
        &AttributeOptions::all(),
        &WeightVector::DEFAULT,
        Execution::default(),
    )
    .unwrap();
    let best = report.best_run();
    let text = demo::render_text(&report);
    let over: Vec<_> = best.comparison.exceeding(demo::REPORT_THRESHOLD).collect();
    let listed = text.contains(&format!("Best combination: {}", best.options))
        && over
            .iter()
            .all(|c| text.contains(&format!("({}, {})", c.row, c.col)));
    let worst = best
        .comparison
        .cells
        .iter()
        .max_by(|a, b| a.deviation.abs().total_cmp(&b.deviation.abs()))
        .unwrap();
    let within = best
        .comparison
        .cells
        .iter()
        .all(|c| c.deviation.abs() <= 0.02);
    outcome(
        within && listed,
        format!(
            "best {}: max |dev| {:.4} at ({}, {}), {} of 45 cells beyond 0.02, {} beyond 0.01",
            best.options,
            best.comparison.max_deviation,
            worst.row,
            worst.col,
            best.comparison.exceeding(0.02).count(),
            over.len()
        ),
    )
}

fn ordinal() -> Outcome {
    let report = demo::run_demo(&[], &WeightVector::DEFAULT, Execution::default()).unwrap();
    let m = &report.best_run().matrix;
    let ranked = m.ranked_pairs();
    let name = |k: usize| {
        let (i, j, v) = ranked[k];
        (m.labels[i].clone(), m.labels[j].clone(), v)
    };
    let top = name(0);
    let second = name(1);
    let bottom = name(ranked.len() - 1);
    let critics = &report.critics[0].matrix;
    let (ci, cj, cv) = critics.ranked_pairs()[0];
    let checks = [
        (top.0 == "Film C" && top.1 == "Film E"),
        (second.0 == "Film I" && second.1 == "Film J"),
        (bottom.0 == "Film C" && bottom.1 == "Film J"),
        (critics.labels[ci] == "Critic 2" && critics.labels[cj] == "Critic 4"),
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "max ({}, {}) {:.4}; second ({}, {}) {:.4}; min ({}, {}) {:.4} [expected Film C, Film J]; critics max ({}, {}) {:.4} (published {:.4})",
            top.0, top.1, top.2, second.0, second.1, second.2, bottom.0, bottom.1, bottom.2,
            critics.labels[ci], critics.labels[cj], cv, PUBLISHED_CRITICS[1][3]
        ),
    )
}

fn random_sets() -> Vec<Vec<(f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200).map(|_| random_pairs(&mut rng, 12, 0.2)).collect()
}

fn membership_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut probes_checked = 0usize;
    for pairs in random_sets() {
        let c = build_curve(&set("s", &pairs));
        let endpoints: Vec<f64> = pairs.iter().flat_map(|&(l, r)| [l, r]).collect();
        for k in 0..1000 {
            let x = if k % 2 == 0 {
                *endpoints.choose(&mut rng).unwrap()
            } else {
                rng.gen_range(-0.5..=10.5)
            };
            let want = count_containing(&pairs, x);
            let got = (c.membership(x) * pairs.len() as f64).round() as usize;
            if got != want {
                return outcome(
                    false,
                    format!("x = {x}: curve count {got}, direct count {want} in {pairs:?}"),
                );
            }
            probes_checked += 1;
        }
    }
    outcome(true, format!("{probes_checked} probes over 200 sets agree"))
}

fn area_integration() -> Outcome {
    let mut worst = 0.0_f64;
    for pairs in random_sets() {
        let c = build_curve(&set("s", &pairs));
        let (lo, hi) = c.support();
        let err = (area(&c) - midpoint_area(&pairs)).abs();
        let tol = 1e-6 * (hi - lo);
        if err > tol && err > 0.0 {
            return outcome(
                false,
                format!("error {err:e} over span {} for {pairs:?}", hi - lo),
            );
        }
        worst = worst.max(err);
    }
    outcome(true, format!("max |area - midpoint| {worst:e}"))
}

fn random_pair_sets(rng: &mut ChaCha8Rng, k: usize) -> (Pairs, Pairs) {
    match k % 10 {
        // all-crisp stacks, including the same point twice (zero local range)
        0 => {
            let x = rng.gen_range(0..=10) as f64;
            (vec![(x, x); 3], vec![(x, x); 5])
        }
        1 => {
            let n = rng.gen_range(1..=6);
            let a = (0..n)
                .map(|_| rng.gen_range(0.0..=10.0))
                .map(|v| (v, v))
                .collect();
            let b = (0..n)
                .map(|_| rng.gen_range(0.0..=10.0))
                .map(|v| (v, v))
                .collect();
            (a, b)
        }
        _ => (random_pairs(rng, 12, 0.2), random_pairs(rng, 12, 0.2)),
    }
}

fn similarity_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = WeightVector::DEFAULT;
    for k in 0..1000 {
        let (p, q) = random_pair_sets(&mut rng, k);
        let (a, b) = (fnum("a", &p), fnum("b", &q));
        for spec in [
            RangeSpec::Local,
            RangeSpec::Global {
                min: 0.0,
                max: 10.0,
            },
        ] {
            let s = similarity(&a, &b, &w, spec);
            let f = feature_vector(&a, &b, resolve_range(&a, &b, spec)).as_array();
            let fine = similarity(&a, &a, &w, spec) == 1.0
                && similarity(&b, &b, &w, spec) == 1.0
                && s == similarity(&b, &a, &w, spec)
                && s.is_finite()
                && (0.0..=1.0).contains(&s)
                && f.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v));
            if !fine {
                return outcome(
                    false,
                    format!("pair {k} under {spec}: S = {s}, features {f:?}"),
                );
            }
        }
    }
    outcome(true, "1000 pairs under local and global ranges")
}

fn invariances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let base = WeightVector::DEFAULT.as_array();
    for k in 0..500 {
        let (p, q) = random_pair_sets(&mut rng, k);
        let (a, b) = (fnum("a", &p), fnum("b", &q));
        let s = similarity(&a, &b, &WeightVector::DEFAULT, RangeSpec::Local);
        for i in 0..6 {
            let mut flipped = base;
            flipped[i] = -flipped[i];
            let w = WeightVector::new(flipped).unwrap();
            if similarity(&a, &b, &w, RangeSpec::Local) != s {
                return outcome(false, format!("negating weight {i} changed S on pair {k}"));
            }
        }
        let mut shuffled = p.clone();
        shuffled.shuffle(&mut rng);
        let a2 = fnum("a", &shuffled);
        if a2.curve() != a.curve()
            || a2.attributes() != a.attributes()
            || similarity(&a2, &b, &WeightVector::DEFAULT, RangeSpec::Local) != s
        {
            return outcome(
                false,
                format!("permuting intervals changed the result on pair {k}"),
            );
        }
    }
    outcome(
        true,
        "500 pairs, every single-weight negation and a random permutation",
    )
}

fn pca_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst_norm = 0.0_f64;
    let mut worst_residual = 0.0_f64;
    let mut worst_oracle = 0.0_f64;
    for _ in 0..100 {
        let rows: Vec<[f64; 6]> = (0..3)
            .map(|_| std::array::from_fn(|_| rng.gen::<f64>()))
            .collect();
        let fv: Vec<FeatureVector> = rows
            .iter()
            .copied()
            .map(FeatureVector::from_array)
            .collect();
        let pc = first_principal_component(&fv, false).unwrap();
        let w = pc.loadings.as_array();
        worst_norm = worst_norm.max((w.iter().map(|v| v * v).sum::<f64>() - 1.0).abs());
        let c = scatter_matrix(&fv, false).unwrap();
        worst_residual = worst_residual.max(eigen_residual(&c, &pc) / pc.eigenvalue);
        let cov = covariance(&rows);
        let v = null_vector(&cov, largest_eigenvalue(&cov));
        worst_oracle = worst_oracle.max(
            w.iter()
                .zip(v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    ok &= worst_norm <= 1e-9 && worst_residual <= 1e-8 && worst_oracle <= 1e-6;
    notes.push(format!(
        "norm err {worst_norm:.1e}, residual/lambda {worst_residual:.1e}, brute-force gap {worst_oracle:.1e}"
    ));

    let learned = learn_weights(&LearnConfig::default(), Execution::default()).unwrap();
    let max_std = learned.std_abs.iter().copied().fold(0.0, f64::max);
    ok &= max_std < 0.05;
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&i, &j| learned.mean_abs[i].total_cmp(&learned.mean_abs[j]));
    let area_rank = order.iter().position(|&i| i == 2).unwrap();
    ok &= area_rank < 2;
    notes.push(format!(
        "max |loading| std {max_std:.4}; |area| mean {:.4} ranks {} of 6 by size (need 1 or 2)",
        learned.mean_abs[2],
        area_rank + 1
    ));
    outcome(ok, notes.join("; "))
}

fn performance() -> Outcome {
    let start = Instant::now();
    let report = demo::run_demo(
        &AttributeOptions::all(),
        &WeightVector::DEFAULT,
        Execution::default(),
    )
    .unwrap();
    let _ = demo::render_text(&report);
    let demo_time = start.elapsed();

    let cfg = GeneratorConfig {
        set_count: 1000,
        min_intervals: 10,
        max_intervals: 10,
        ..GeneratorConfig::default()
    };
    let sets = generate_population(&cfg).unwrap();
    let start = Instant::now();
    let items = fuzzy_numbers(&sets, AttributeOptions::default(), Execution::default()).unwrap();
    let m = similarity_matrix(
        &items,
        &WeightVector::DEFAULT,
        cfg.global_range(),
        Execution::default(),
    );
    let matrix_time = start.elapsed();
    assert_eq!(m.len(), 1000);
    outcome(
        demo_time < Duration::from_secs(5) && matrix_time < Duration::from_secs(60),
        format!(
            "demo (all variants) {:.3}s, 1000-curve matrix {:.3}s",
            demo_time.as_secs_f64(),
            matrix_time.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("agreement-ratio oracle", agreement_oracle),
        ("convention-free film cells", crisp_cells),
        ("film matrix within 0.02", matrix_reproduction),
        ("ordinal reproduction", ordinal),
        ("membership oracle", membership_oracle),
        ("area integration", area_integration),
        ("similarity axioms", similarity_axioms),
        ("weight-sign and permutation invariance", invariances),
        ("PCA properties", pca_properties),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {:>2}. {name} ({:.2}s): {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
