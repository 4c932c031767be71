// SPDX-License-Identifier: MIT
use mnarfci_core::citest::{Deletion, Outcome};
use mnarfci_core::discovery::{possible_dsep, search};
use mnarfci_core::dsep::{dag_to_mag, has_inducing_path};
use mnarfci_core::subsets::subsets_up_to;
use mnarfci_core::synth::{generate_dag, GenConfig, Mechanism, MissingnessPlan};
use mnarfci_core::testkit::{random_dag, reference_pag};
use mnarfci_core::{
    fci, rfci, CITester, CausalSystem, CiSource, Dag, EndpointMark, MixedGraph, Mode, Role, RuleSet, SearchOptions,
    Strategy, SystemOracle,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use EndpointMark::{Arrow, Circle, Tail};

fn oracle(sys: &CausalSystem) -> CITester<SystemOracle<'_>> {
    CITester::new(SystemOracle::selection_only(sys), Strategy::Oracle).unwrap()
}

fn observed_dag(n: usize, edges: &[(usize, usize)]) -> CausalSystem {
    CausalSystem::fully_observed(Dag::from_edges(n, edges).unwrap())
}

/// DAG over `n` vertices of which the first `latent` in a random order are
/// hidden; no selection.
fn latent_system(seed: u64, n: usize, latent: usize, prob: f64) -> CausalSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dag = random_dag(n, prob, &mut rng);
    let mut roles = vec![Role::Observed; n];
    let mut picked = 0;
    while picked < latent {
        let v = rng.random_range(0..n);
        if roles[v] == Role::Observed {
            roles[v] = Role::Latent;
            picked += 1;
        }
    }
    CausalSystem::new(dag, roles, vec![Vec::new(); n]).unwrap()
}

fn mnar_system(seed: u64, p: usize, mechanism: Mechanism) -> CausalSystem {
    let cfg = GenConfig { p, n_latent_confounders: 0..=(p - 5).min(4), seed, ..GenConfig::default() };
    let mut rng = cfg.rng();
    let m = generate_dag(&cfg, &mut rng).unwrap();
    MissingnessPlan::draw(mechanism, &m, &cfg, &mut rng).unwrap().system(&m)
}

/// Relabels the variables of another source: query `(i, j)` here asks
/// `(perm[i], perm[j])` there.
struct Permuted<S> {
    inner: S,
    perm: Vec<usize>,
}

impl<S: CiSource> CiSource for Permuted<S> {
    fn n_vars(&self) -> usize {
        self.inner.n_vars()
    }
    fn is_oracle(&self) -> bool {
        self.inner.is_oracle()
    }
    fn query(&self, i: usize, j: usize, w: &[usize], deletion: Deletion) -> Outcome {
        let (a, b) = (self.perm[i].min(self.perm[j]), self.perm[i].max(self.perm[j]));
        let mut pw: Vec<usize> = w.iter().map(|&v| self.perm[v]).collect();
        pw.sort_unstable();
        self.inner.query(a, b, &pw, deletion)
    }
}

#[test]
fn chain_and_collider_skeletons() {
    let chain = observed_dag(3, &[(0, 1), (1, 2)]);
    let pag = fci(&mut oracle(&chain), &SearchOptions::fci());
    assert_eq!(pag.sepsets.get(0, 2), Some(&[1][..]));
    assert!(pag.graph.edges().all(|e| e.mark_first == Circle && e.mark_second == Circle));
    assert_eq!(pag.graph.edge_count(), 2);

    let collider = observed_dag(3, &[(0, 1), (2, 1)]);
    let pag = fci(&mut oracle(&collider), &SearchOptions::fci());
    assert_eq!(pag.sepsets.get(0, 2), Some(&[][..]));
    assert_eq!(pag.graph.edge_marks(0, 1), Some((Circle, Arrow)));
    assert_eq!(pag.graph.edge_marks(2, 1), Some((Circle, Arrow)));
}

#[test]
fn income_example_adjacencies() {
    // X1 -> X2, X4 -> X5, X1 -> X5 with X3 isolated
    let sys = observed_dag(5, &[(0, 1), (3, 4), (0, 4)]);
    for mode in [Mode::Fci, Mode::Rfci] {
        let opts = SearchOptions { mode, ..SearchOptions::fci() };
        let pag = search(&mut oracle(&sys), &opts);
        let mut adj: Vec<(usize, usize)> = pag.graph.edges().map(|e| (e.first, e.second)).collect();
        adj.sort_unstable();
        assert_eq!(adj, vec![(0, 1), (0, 4), (3, 4)]);
        assert_eq!(pag.graph.edge_marks(0, 4), Some((Circle, Arrow)));
        assert_eq!(pag.graph.edge_marks(3, 4), Some((Circle, Arrow)));
    }
}

#[test]
fn first_rule_orients_away_from_collider() {
    // 0 -> 1 <- 3 and 1 -> 2: the v-structure fixes 1, the first rule then 1 -> 2
    let sys = observed_dag(4, &[(0, 1), (3, 1), (1, 2)]);
    let pag = fci(&mut oracle(&sys), &SearchOptions::fci());
    assert_eq!(pag.graph.edge_marks(1, 2), Some((Tail, Arrow)));
    assert_eq!(pag.graph.edge_marks(0, 1), Some((Circle, Arrow)));
}

#[test]
fn fixpoint_is_stable() {
    for seed in 0..20 {
        let sys = mnar_system(seed, 8, Mechanism::Mnar);
        let mut ci = CITester::new(SystemOracle::list_wise(&sys), Strategy::Oracle).unwrap();
        let opts = SearchOptions::fci();
        let mut pag = fci(&mut ci, &opts);
        let before = pag.graph.clone();
        mnarfci_core::discovery::orientation_rules(&mut pag, &mut ci, &opts);
        assert_eq!(pag.graph, before);
    }
}

#[test]
fn fci_matches_brute_force_pag() {
    let mut checked = 0;
    for seed in 0..400u64 {
        let sys = latent_system(seed, 7 + (seed % 2) as usize, 1 + (seed % 2) as usize, 0.35);
        let mag = dag_to_mag(&sys);
        if mag.edge_count() > 9 || mag.edge_count() < 2 {
            continue;
        }
        let want = reference_pag(&mag);
        let got = fci(&mut oracle(&sys), &SearchOptions::fci());
        assert_eq!(got.graph, want, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} instances");
}

#[test]
fn fci_matches_brute_force_pag_with_selection() {
    let mut checked = 0;
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 7;
        let dag = random_dag(n, 0.35, &mut rng);
        let sel = rng.random_range(0..n);
        // selection vertex must have a parent to matter
        if dag.parents(sel).is_empty() {
            continue;
        }
        let mut roles = vec![Role::Observed; n];
        roles[sel] = Role::Selection;
        let lat = (sel + 1 + rng.random_range(0..n - 1)) % n;
        roles[lat] = Role::Latent;
        let sys = CausalSystem::new(dag, roles, vec![Vec::new(); n]).unwrap();
        let mag = dag_to_mag(&sys);
        if mag.edge_count() > 8 || mag.edge_count() < 2 {
            continue;
        }
        let want = reference_pag(&mag);
        let opts = SearchOptions { rules: RuleSet { r5_r7: true, r8_r10: true }, ..SearchOptions::fci() };
        let got = fci(&mut oracle(&sys), &opts);
        assert_eq!(got.graph, want, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 40, "only {checked} instances");
}

#[test]
fn fci_adjacencies_are_inducing_paths() {
    for seed in 0..60 {
        let sys = latent_system(seed, 8, 2, 0.4);
        let pag = fci(&mut oracle(&sys), &SearchOptions::fci());
        let obs = sys.observed();
        for a in 0..obs.len() {
            for b in a + 1..obs.len() {
                assert_eq!(pag.graph.is_adjacent(a, b), has_inducing_path(&sys, obs[a], obs[b]).unwrap(), "seed {seed}");
            }
        }
    }
}

#[test]
fn rfci_keeps_every_fci_edge() {
    for seed in 0..60 {
        let sys = mnar_system(seed, 8, Mechanism::Mnar);
        let mut ci = CITester::new(SystemOracle::list_wise(&sys), Strategy::Oracle).unwrap();
        let f = fci(&mut ci, &SearchOptions::fci());
        let r = rfci(&mut ci, &SearchOptions::rfci());
        for e in f.graph.edges() {
            assert!(r.graph.is_adjacent(e.first, e.second), "seed {seed}");
        }
    }
}

#[test]
fn absent_edges_have_witnesses_present_rfci_edges_have_none() {
    for seed in 0..40 {
        let sys = mnar_system(seed, 8, Mechanism::Mnar);
        let mut ci = CITester::new(SystemOracle::missingness(&sys), Strategy::Wrapper).unwrap();
        let k = ci.n_vars();
        let f = fci(&mut ci, &SearchOptions::fci());
        let r = rfci(&mut ci, &SearchOptions::rfci());
        for i in 0..k {
            for j in i + 1..k {
                if !f.graph.is_adjacent(i, j) {
                    let w = f.sepsets.get(i, j).expect("witness recorded").to_vec();
                    assert!(ci.is_independent(i, j, &w));
                }
                if r.graph.is_adjacent(i, j) {
                    for (x, y) in [(i, j), (j, i)] {
                        let adj: Vec<usize> = r.graph.neighbors(x).filter(|&v| v != y).collect();
                        for w in subsets_up_to(&adj, adj.len()) {
                            assert!(!ci.is_independent(i, j, &w), "seed {seed}");
                        }
                    }
                }
            }
        }
    }
}

fn almost_directed_cycle(g: &MixedGraph) -> bool {
    g.edges().any(|e| {
        e.mark_first == Arrow && e.mark_second == Arrow && {
            let anc = g.ancestor_mask(&[e.second]);
            let anc2 = g.ancestor_mask(&[e.first]);
            anc[e.first] || anc2[e.second]
        }
    })
}

#[test]
fn no_directed_or_almost_directed_cycles() {
    for seed in 0..80 {
        let sys = mnar_system(seed, 6 + (seed % 5) as usize, Mechanism::Mnar);
        let mut ci = CITester::new(SystemOracle::list_wise(&sys), Strategy::Oracle).unwrap();
        for opts in [SearchOptions::fci(), SearchOptions::rfci()] {
            let pag = search(&mut ci, &opts);
            assert!(!pag.graph.has_directed_cycle(), "seed {seed}");
            assert!(!almost_directed_cycle(&pag.graph), "seed {seed}");
        }
    }
}

#[test]
fn relabeling_commutes_with_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..30 {
        let sys = mnar_system(seed, 8, Mechanism::Mnar);
        let k = sys.observed().len();
        let mut perm: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        for opts in [SearchOptions::fci(), SearchOptions::rfci()] {
            let base = search(&mut CITester::new(SystemOracle::list_wise(&sys), Strategy::Oracle).unwrap(), &opts);
            let src = Permuted { inner: SystemOracle::list_wise(&sys), perm: perm.clone() };
            let relabeled = search(&mut CITester::new(src, Strategy::Oracle).unwrap(), &opts);
            // vertex v of the relabeled run is vertex perm[v] of the base run
            assert_eq!(relabeled.graph.permuted(&perm), base.graph, "seed {seed}");
        }
    }
}

#[test]
fn wrapper_oracle_reproduces_listwise_oracle() {
    for seed in 0..30 {
        let sys = mnar_system(seed, 6 + (seed % 5) as usize, Mechanism::Mnar);
        for opts in [SearchOptions::fci(), SearchOptions::rfci()] {
            let a = search(&mut CITester::new(SystemOracle::missingness(&sys), Strategy::Wrapper).unwrap(), &opts);
            let b = search(&mut CITester::new(SystemOracle::list_wise(&sys), Strategy::Oracle).unwrap(), &opts);
            assert_eq!(a.graph, b.graph, "seed {seed}");
        }
    }
}

#[test]
fn heuristic_oracle_under_mcar_reproduces_selection_oracle() {
    for seed in 0..30 {
        let sys = mnar_system(seed, 8, Mechanism::Mcar);
        for opts in [SearchOptions::fci(), SearchOptions::rfci()] {
            let a = search(&mut CITester::new(SystemOracle::missingness(&sys), Strategy::Heuristic).unwrap(), &opts);
            let b = search(&mut CITester::new(SystemOracle::selection_only(&sys), Strategy::Oracle).unwrap(), &opts);
            assert_eq!(a.graph, b.graph, "seed {seed}");
        }
    }
}

#[test]
fn possible_dsep_contains_neighbors() {
    let g = MixedGraph::complete_circle(5);
    for x in 0..5 {
        let pd = possible_dsep(&g, x);
        for v in g.neighbors(x) {
            assert!(pd.contains(&v));
        }
        assert!(!pd.contains(&x));
    }
}

#[test]
fn bounded_conditioning_keeps_more_edges() {
    for seed in 0..20 {
        let sys = latent_system(seed, 8, 1, 0.5);
        let full = fci(&mut oracle(&sys), &SearchOptions::fci());
        let opts = SearchOptions { max_cond_size: Some(1), ..SearchOptions::fci() };
        let small = fci(&mut oracle(&sys), &opts);
        for e in full.graph.edges() {
            assert!(small.graph.is_adjacent(e.first, e.second));
        }
        assert!(small.sepsets.iter().all(|(_, w)| w.len() <= 1));
    }
}
