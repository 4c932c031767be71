// SPDX-License-Identifier: MIT
//! Exit criteria. Each test prints one `ACCEPTANCE <k> PASS|FAIL` line.

use std::time::{Duration, Instant};

use mnarfci::config::{ExperimentConfig, Missingness};
use mnarfci::experiment::{run_experiment, summarize};
use mnarfci::verify::{verify_soundness, VerifyConfig};
use mnarfci_core::citest::{covariance, partial_correlation};
use mnarfci_core::dsep::{d_separated, oracle_ci};
use mnarfci_core::metrics::{shd, skeleton_shd};
use mnarfci_core::subsets::subsets_up_to;
use mnarfci_core::synth::{analytic_cov, generate_dag, sample_sem, GenConfig, Mechanism, MissingnessPlan};
use mnarfci_core::testkit::{d_separated_by_paths, random_dag, random_mixed_graph, regression_partial_correlation};
use mnarfci_core::{Dataset, Mode, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: &str, pass: bool, detail: String) {
    println!("ACCEPTANCE {id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn soundness(id: &str, mechanism: Mechanism) {
    let start = Instant::now();
    let cfg = VerifyConfig { n_systems: 100, p_min: 6, p_max: 10, mechanism, seed: 2024, ..VerifyConfig::default() };
    let r = verify_soundness(&cfg).unwrap();
    let t = start.elapsed();
    report(
        id,
        r.passed() && within(t, 120),
        format!("{} systems, {} mismatches, {:.1}s", r.checked, r.counterexamples.len(), t.as_secs_f64()),
    );
}

#[test]
fn criterion_1_wrapper_oracle_matches_listwise_oracle() {
    soundness("1", Mechanism::Mnar);
}

#[test]
fn criterion_2_heuristic_oracle_matches_selection_oracle_under_mcar() {
    soundness("2", Mechanism::Mcar);
}

#[test]
fn criterion_3_testwise_connection_implies_listwise_connection() {
    let start = Instant::now();
    let (mut checked, mut violations) = (0usize, 0usize);
    for k in 0..200u64 {
        let p = 6 + (k % 3) as usize;
        let mechanism = if k % 2 == 0 { Mechanism::Mnar } else { Mechanism::Mar };
        let gen = GenConfig { p, n_latent_confounders: 0..=(p - 5).min(4), seed: 7_000 + k, ..GenConfig::default() };
        let mut rng = gen.rng();
        let m = generate_dag(&gen, &mut rng).unwrap();
        let sys = MissingnessPlan::draw(mechanism, &m, &gen, &mut rng).unwrap().system(&m);
        assert!(sys.check_assumption1());
        let obs = sys.observed().to_vec();
        let sl = sys.list_wise_selection();
        for (a, &oi) in obs.iter().enumerate() {
            for &oj in &obs[a + 1..] {
                let rest: Vec<usize> = obs.iter().copied().filter(|&v| v != oi && v != oj).collect();
                for w in subsets_up_to(&rest, 2) {
                    let vars: Vec<usize> = [oi, oj].into_iter().chain(w.iter().copied()).collect();
                    let connected_tw = !oracle_ci(&sys, oi, oj, &w, &sys.selection_for(&vars)).unwrap();
                    let connected_lw = !oracle_ci(&sys, oi, oj, &w, &sl).unwrap();
                    checked += 1;
                    violations += usize::from(connected_tw && !connected_lw);
                }
            }
        }
    }
    let t = start.elapsed();
    report(
        "3",
        violations == 0 && within(t, 300),
        format!("200 systems, {checked} queries, {violations} violations, {:.1}s", t.as_secs_f64()),
    );
}

#[test]
fn criterion_4_reachability_matches_path_enumeration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut checked, mut disagreements) = (0usize, 0usize);
    // every disjoint (A, B, C) with A, B nonempty, by assigning each vertex
    // to A, B, C or none
    let mut small = |dag: &mnarfci_core::Dag| {
        let n = dag.vertex_count();
        for code in 0..4usize.pow(n as u32) {
            let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
            let mut rest = code;
            for v in 0..n {
                match rest % 4 {
                    0 => a.push(v),
                    1 => b.push(v),
                    2 => c.push(v),
                    _ => {}
                }
                rest /= 4;
            }
            if a.is_empty() || b.is_empty() {
                continue;
            }
            checked += 1;
            disagreements += usize::from(d_separated(dag, &a, &b, &c).unwrap() != d_separated_by_paths(dag, &a, &b, &c));
        }
    };
    for _ in 0..10_000 {
        let n = rng.random_range(2..=5);
        let prob = rng.random_range(0.1..0.9);
        small(&random_dag(n, prob, &mut rng));
    }
    for _ in 0..200 {
        let prob = rng.random_range(0.15..0.6);
        let dag = random_dag(8, prob, &mut rng);
        for x in 0..8 {
            for y in x + 1..8 {
                let rest: Vec<usize> = (0..8).filter(|&v| v != x && v != y).collect();
                for c in subsets_up_to(&rest, rest.len()) {
                    checked += 1;
                    disagreements +=
                        usize::from(d_separated(&dag, &[x], &[y], &c).unwrap() != d_separated_by_paths(&dag, &[x], &[y], &c));
                }
            }
        }
    }
    let t = start.elapsed();
    report(
        "4",
        disagreements == 0 && within(t, 180),
        format!("{checked} queries, {disagreements} disagreements, {:.1}s", t.as_secs_f64()),
    );
}

#[test]
fn criterion_5_sample_covariance_matches_closed_form() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let gen = GenConfig { seed: 500 + seed, ..GenConfig::default() };
        let mut rng = gen.rng();
        let m = generate_dag(&gen, &mut rng).unwrap();
        let data = sample_sem(&m, 100_000, &mut rng).unwrap();
        let p = m.p();
        let cols: Vec<Vec<f64>> = (0..p).map(|c| (0..data.n_rows()).map(|r| data.get(r, c).unwrap()).collect()).collect();
        let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
        let sigma = analytic_cov(&m);
        for a in 0..p {
            for b in a..p {
                let emp = cols[a].iter().zip(&cols[b]).map(|(x, y)| (x - means[a]) * (y - means[b])).sum::<f64>()
                    / (data.n_rows() - 1) as f64;
                worst = worst.max((emp - sigma[(a, b)]).abs());
            }
        }
    }
    let t = start.elapsed();
    report(
        "5",
        worst <= 0.05 && within(t, 60),
        format!("20 models, max entrywise error {worst:.4}, {:.1}s", t.as_secs_f64()),
    );
}

#[test]
fn criterion_6_inversion_matches_regression_residuals() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let k = rng.random_range(2..=7);
        let n = rng.random_range(20..=400);
        let mix: Vec<f64> = (0..k * k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut values = vec![0.0; n * k];
        for r in 0..n {
            for c in 0..k {
                let noise: f64 = rng.random_range(-1.0..1.0);
                let s: f64 = (0..c).map(|q| mix[c * k + q] * values[r * k + q]).sum();
                values[r * k + c] = s + noise;
            }
        }
        let data = Dataset::complete(n, k, values).unwrap();
        let mut order: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let (i, j) = (order[0], order[1]);
        let w_len = rng.random_range(0..=k - 2);
        let mut w = order[2..2 + w_len].to_vec();
        w.sort_unstable();
        let cov = covariance(&data, &(0..n).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>());
        let r = partial_correlation(&cov, i, j, &w);
        worst = worst.max((r - regression_partial_correlation(&data, i, j, &w)).abs());
    }
    let t = start.elapsed();
    report("6", worst <= 1e-8 && within(t, 10), format!("500 instances, max error {worst:.2e}, {:.2}s", t.as_secs_f64()));
}

fn desk_config(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        p: 10,
        expected_neighbors: 2.0,
        seed: 0,
        sample_sizes: vec![100, 500],
        n_replicates: 50,
        missingness: Missingness::Mnar,
        algorithms: vec![Mode::Fci, Mode::Rfci],
        strategies: vec![Strategy::Wrapper, Strategy::ListWise],
        alpha: 0.01,
        emit_truth: false,
        output_dir: dir.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn criterion_7_desk_scale_mnar_replication() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let records = run_experiment(&desk_config(dir.path())).unwrap();
    let t = start.elapsed();
    assert!(records.iter().all(|r| r.outcome.is_ok()));
    let summary = summarize(&records);
    let pooled = |mode: Mode, strategy: Strategy, f: &dyn Fn(&mnarfci::SummaryRow) -> Option<f64>| {
        let xs: Vec<f64> = summary.iter().filter(|s| s.algorithm == mode && s.strategy == strategy).filter_map(f).collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let mut shd_ok = true;
    let mut gain_ok = true;
    let (mut shd_detail, mut gain_detail) = (Vec::new(), Vec::new());
    for mode in [Mode::Fci, Mode::Rfci] {
        let wrapper = pooled(mode, Strategy::Wrapper, &|s| Some(s.mean_shd));
        let listwise = pooled(mode, Strategy::ListWise, &|s| Some(s.mean_shd));
        let gain = pooled(mode, Strategy::Wrapper, &|s| s.mean_pct_sample_gain);
        shd_ok &= wrapper <= listwise;
        gain_ok &= gain >= 10.0;
        shd_detail.push(format!("{} wrapper {wrapper:.3} vs list-wise {listwise:.3}", mode.name()));
        gain_detail.push(format!("{} {gain:.2}%", mode.name()));
    }
    let timed = within(t, 900);
    println!(
        "ACCEPTANCE 7a {}: mean shd {}, {:.1}s",
        if shd_ok && timed { "PASS" } else { "FAIL" },
        shd_detail.join(", "),
        t.as_secs_f64()
    );
    println!(
        "ACCEPTANCE 7b {}: per-test sample gain {} (needs > 0 and >= 10)",
        if gain_ok { "PASS" } else { "FAIL" },
        gain_detail.join(", ")
    );
    assert!(shd_ok && timed, "criterion 7a failed");
    assert!(gain_ok, "criterion 7b failed: gain {}", gain_detail.join(", "));
}

#[test]
fn criterion_8_rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&desk_config(a.path())).unwrap();
    run_experiment(&desk_config(b.path())).unwrap();
    let ra = std::fs::read(a.path().join("results.csv")).unwrap();
    let rb = std::fs::read(b.path().join("results.csv")).unwrap();
    report("8", !ra.is_empty() && ra == rb, format!("results.csv {} bytes, identical: {}", ra.len(), ra == rb));
}

#[test]
fn criterion_9_shd_metric_sanity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0usize;
    for _ in 0..1000 {
        let n = rng.random_range(2..=10);
        let prob = rng.random_range(0.1..0.9);
        let g: Vec<_> = (0..3).map(|_| random_mixed_graph(n, prob, &mut rng)).collect();
        let d = |x: usize, y: usize| shd(&g[x], &g[y]).unwrap();
        let ok = d(0, 0) == 0
            && (0..3).all(|x| (0..3).all(|y| skeleton_shd(&g[x], &g[y]).unwrap() <= d(x, y)))
            && d(0, 2) <= d(0, 1) + d(1, 2)
            && d(0, 1) <= d(0, 2) + d(2, 1)
            && d(1, 2) <= d(1, 0) + d(0, 2);
        failures += usize::from(!ok);
    }
    report("9", failures == 0, format!("1000 triples, {failures} failures"));
}
