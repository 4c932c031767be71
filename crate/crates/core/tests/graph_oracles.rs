// SPDX-License-Identifier: MIT
use mnarfci_core::dsep::{
    ancestors, d_separated, dag_to_mag, dag_to_mag_given, has_inducing_path, has_inducing_path_given,
};
use mnarfci_core::subsets::subsets_up_to;
use mnarfci_core::synth::{generate_dag, GenConfig, Mechanism, MissingnessPlan};
use mnarfci_core::testkit::{d_separated_by_paths, inducing_path_by_separation, m_separated_by_paths, random_dag};
use mnarfci_core::{CausalSystem, Dag, EndpointMark, Role};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mnar_system(seed: u64, p: usize) -> CausalSystem {
    let cfg = GenConfig { p, n_latent_confounders: 0..=2, seed, ..GenConfig::default() };
    let mut rng = cfg.rng();
    let m = generate_dag(&cfg, &mut rng).unwrap();
    MissingnessPlan::draw(Mechanism::Mnar, &m, &cfg, &mut rng).unwrap().system(&m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reachability_matches_path_enumeration(seed in any::<u64>(), n in 2usize..=6, dens in 0.1f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = random_dag(n, dens, &mut rng);
        for x in 0..n {
            for y in x + 1..n {
                let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                for c in subsets_up_to(&rest, rest.len()) {
                    prop_assert_eq!(
                        d_separated(&dag, &[x], &[y], &c).unwrap(),
                        d_separated_by_paths(&dag, &[x], &[y], &c)
                    );
                }
            }
        }
    }

    #[test]
    fn ancestors_contain_seed_and_parents(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = random_dag(n, 0.4, &mut rng);
        for v in 0..n {
            let an = ancestors(&dag, &[v]).unwrap();
            prop_assert!(an.contains(&v));
            for p in dag.parents(v) {
                prop_assert!(an.contains(p));
            }
        }
    }
}

#[test]
fn set_queries_reject_bad_input() {
    let dag = Dag::from_edges(3, &[(0, 1)]).unwrap();
    assert!(d_separated(&dag, &[0], &[1], &[1]).is_err());
    assert!(d_separated(&dag, &[0], &[5], &[]).is_err());
    assert!(d_separated(&dag, &[0, 2], &[1], &[]).is_ok());
}

#[test]
fn inducing_paths_match_separation_oracle() {
    for seed in 0..60 {
        let sys = mnar_system(seed, 7);
        let sel = sys.list_wise_selection();
        let obs = sys.observed().to_vec();
        for (a, &oi) in obs.iter().enumerate() {
            for &oj in &obs[a + 1..] {
                assert_eq!(
                    has_inducing_path_given(&sys, oi, oj, &sel).unwrap(),
                    inducing_path_by_separation(&sys, oi, oj, &sel),
                    "seed {seed}, pair ({oi}, {oj})"
                );
                assert_eq!(
                    has_inducing_path(&sys, oi, oj).unwrap(),
                    inducing_path_by_separation(&sys, oi, oj, sys.selection()),
                );
            }
        }
    }
}

#[test]
fn projected_mags_are_ancestral_and_faithful() {
    for seed in 0..40 {
        let sys = mnar_system(seed, 7);
        let sel = sys.list_wise_selection();
        let mag = dag_to_mag_given(&sys, &sel).unwrap();
        assert!(mag.is_ancestral(), "seed {seed}");
        let obs = sys.observed();
        let k = obs.len();
        // m-separation in the MAG equals d-separation given the selection in the DAG
        for x in 0..k {
            for y in x + 1..k {
                let rest: Vec<usize> = (0..k).filter(|&v| v != x && v != y).collect();
                for w in subsets_up_to(&rest, 2) {
                    let mut cond: Vec<usize> = w.iter().map(|&v| obs[v]).collect();
                    cond.extend_from_slice(&sel);
                    let in_dag = d_separated(sys.dag(), &[obs[x]], &[obs[y]], &cond).unwrap();
                    assert_eq!(m_separated_by_paths(&mag, x, y, &w), in_dag, "seed {seed}");
                }
            }
        }
    }
}

#[test]
fn fully_observed_mag_is_the_dag() {
    let dag = Dag::from_edges(4, &[(0, 1), (1, 2), (3, 2)]).unwrap();
    let sys = CausalSystem::fully_observed(dag.clone());
    assert_eq!(&dag_to_mag(&sys), dag.graph());
}

#[test]
fn latent_confounder_gives_bidirected_edge() {
    let dag = Dag::from_edges(3, &[(2, 0), (2, 1)]).unwrap();
    let sys = CausalSystem::new(dag, vec![Role::Observed, Role::Observed, Role::Latent], vec![vec![]; 3]).unwrap();
    let mag = dag_to_mag(&sys);
    assert_eq!(mag.edge_marks(0, 1), Some((EndpointMark::Arrow, EndpointMark::Arrow)));
}
