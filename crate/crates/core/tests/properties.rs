use graphon_core::analytic::AnalyticGraphon;
use graphon_core::constructions::{appendix_graphon, appendix_spec, appendix_value, min_graphon_fixed_point};
use graphon_core::finite::{graph_decompose, graph_to_graphon, k_core, sample_graph, FiniteGraph};
use graphon_core::graphon::common_refinement;
use graphon_core::kcore::{decompose, kappa_core};
use graphon_core::random::step_graphon;
use graphon_core::{ActiveSet, Kernel, StepGraphon, TOL};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graphon_strategy(max_blocks: usize) -> impl Strategy<Value = StepGraphon> {
    (1..=max_blocks, any::<u64>())
        .prop_map(|(m, seed)| step_graphon(&mut ChaCha8Rng::seed_from_u64(seed), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn restricted_degrees_are_bounded_and_additive(g in graphon_strategy(8), mask in any::<u32>()) {
        let m = g.block_count();
        let k = ActiveSet::from_blocks(&g, (0..m).filter(|i| mask >> i & 1 == 1)).unwrap();
        let rest = ActiveSet::from_blocks(&g, (0..m).filter(|i| mask >> i & 1 == 0)).unwrap();
        for i in 0..m {
            let (dk, dr, d) = (
                g.restricted_degree(i, &k).unwrap(),
                g.restricted_degree(i, &rest).unwrap(),
                g.degree(i).unwrap(),
            );
            prop_assert!(0.0 <= dk && dk <= d + 1e-15 && d <= 1.0 + 1e-15);
            prop_assert!((dk + dr - d).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_preserves_degeneracy(a in graphon_strategy(6), b in graphon_strategy(6)) {
        let (ra, _) = common_refinement(&a, &b);
        prop_assert!((decompose(&ra).degeneracy - decompose(&a).degeneracy).abs() < 1e-9);
        prop_assert!((ra.edge_density() - a.edge_density()).abs() < 1e-9);
    }

    #[test]
    fn stages_are_nested_and_bounded(g in graphon_strategy(10), kappa in 0.0f64..=1.0) {
        let trace = kappa_core(&g, kappa).unwrap();
        prop_assert!(trace.stages.len() <= g.block_count() + 1);
        for w in trace.stages.windows(2) {
            prop_assert!(w[1].is_subset_of(&w[0]));
        }
        prop_assert_eq!(trace.stages.last().unwrap(), &trace.terminal);
        let shells = decompose(&g).shells;
        let dual: Vec<bool> = shells.iter().map(|&s| s >= kappa - TOL).collect();
        prop_assert_eq!(trace.terminal.membership(), dual.as_slice());
    }

    #[test]
    fn graph_embedding_scales_degeneracy(seed in any::<u64>(), n in 1usize..25) {
        let g = sample_graph(&AnalyticGraphon::Constant(0.5), n, seed);
        let w = graph_to_graphon(&g).unwrap();
        let d = graph_decompose(&g).degeneracy;
        prop_assert!((decompose(&w).degeneracy - d as f64 / n as f64).abs() < 1e-9);
        // k-cores agree with the shell numbers
        let shells = graph_decompose(&g).shells;
        for k in 0..=d + 1 {
            let expected: Vec<usize> = (0..n).filter(|&v| shells[v] >= k).collect();
            prop_assert_eq!(k_core(&g, k), expected);
        }
    }

    #[test]
    fn appendix_case_table_matches_steps(x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let spec = appendix_spec(20).unwrap();
        let g = appendix_graphon(&spec);
        prop_assert_eq!(appendix_value(&spec, x, y), g.value(x, y));
    }
}

#[test]
fn constant_discretization_has_exact_density() {
    for a in [0.0, 0.3, 0.7, 1.0] {
        for m in [1, 3, 17] {
            let g = AnalyticGraphon::Constant(a).discretize(m).unwrap();
            assert_eq!(g.block_count(), m);
            assert!((g.edge_density() - a).abs() < 1e-15);
        }
    }
}

#[test]
fn min_graphon_cores_are_suffix_intervals() {
    for m in [16, 64, 200] {
        let g = AnalyticGraphon::Min.discretize(m).unwrap();
        for kappa in [0.01, 0.1, 0.2, 0.24] {
            let members: Vec<usize> = kappa_core(&g, kappa).unwrap().terminal.members().collect();
            let first = members[0];
            assert_eq!(members, (first..m).collect::<Vec<_>>(), "m = {m}, κ = {kappa}");
            let k = min_graphon_fixed_point(kappa).unwrap();
            assert!((g.boundaries()[first] - k).abs() <= 2.0 / m as f64, "m = {m}, κ = {kappa}");
        }
    }
}

#[test]
fn sampled_degeneracy_approaches_graphon_degeneracy() {
    // a trend, not a rate: the error at n = 400 is below the error at n = 20
    let w = AnalyticGraphon::Min;
    let err = |n: usize| {
        let total: f64 = (0..5)
            .map(|seed| {
                let d = graph_decompose(&sample_graph(&w, n, seed)).degeneracy;
                (d as f64 / n as f64 - 0.25).abs()
            })
            .sum();
        total / 5.0
    };
    assert!(err(400) < err(20));
}

#[test]
fn finite_graph_degeneracy_bounded_by_max_degree() {
    for seed in 0..50 {
        let g = sample_graph(&AnalyticGraphon::Min, 30, seed);
        assert!(graph_decompose(&g).degeneracy <= g.max_degree());
    }
    assert_eq!(graph_decompose(&FiniteGraph::star(6)).degeneracy, 1);
}

#[test]
fn discretized_min_degeneracy_error_shrinks_like_one_over_m() {
    let mut previous = f64::INFINITY;
    for m in [64, 128, 256, 512, 1024] {
        let g = AnalyticGraphon::Min.discretize(m).unwrap();
        let err = (decompose(&g).degeneracy - 0.25).abs();
        assert!(err <= 0.3 / m as f64, "m = {m}: {err}");
        assert!(err < previous);
        previous = err;
    }
}
