mod common;

use hyperwalk::equivalence::{check_random_instance, randomized_suite, Horizon, SuiteConfig, Verdict};
use hyperwalk::random::{random_graph, random_hypergraph, random_state, random_tessellation, random_unitary, random_walk, SizeBounds};
use hyperwalk::state::{measure_vertices, unitarity_deviation, COMPOSITION_TOLERANCE};
use hyperwalk::structures::validate_tessellation;
use hyperwalk::transforms::{apply_transform, coined_from_szegedy, generalized_hyperwalk_from_staggered, szegedy_from_coined};
use hyperwalk::walks::build_scattering_rt;
use hyperwalk::{run, BasisMap, CMatrix, ModelKind, UnitaryOperator, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODELS: [ModelKind; 5] =
    [ModelKind::CoinedLine, ModelKind::ScatteringCoined, ModelKind::Szegedy, ModelKind::Staggered, ModelKind::Hyperwalk];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn opaque_basis(n: usize) -> std::sync::Arc<BasisMap> {
    hyperwalk::walks::vertex_basis(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incidence_pairs_count_edge_sizes(seed in any::<u64>()) {
        let h = random_hypergraph(&mut rng(seed), 8, 6).unwrap();
        let total: usize = h.edges().iter().map(Vec::len).sum();
        prop_assert_eq!(h.incidence_pairs().len(), total);
        let degrees: usize = (0..h.vertex_count()).map(|v| h.degree(v)).sum();
        prop_assert_eq!(degrees, total);
    }

    #[test]
    fn greedy_tessellations_validate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 9, 20).unwrap();
        let t = random_tessellation(&g, &mut r);
        prop_assert!(validate_tessellation(&t, &g).unwrap().is_valid());
    }

    #[test]
    fn certified_operators_preserve_norm(seed in any::<u64>(), d in 1usize..12) {
        let mut r = rng(seed);
        let basis = opaque_basis(d);
        let u = UnitaryOperator::certify(random_unitary(d, &mut r), basis.clone()).unwrap();
        let s = random_state(basis, &mut r);
        prop_assert!((u.apply(&s).unwrap().norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn composition_recertifies(seed in any::<u64>(), d in 1usize..10) {
        let mut r = rng(seed);
        let basis = opaque_basis(d);
        let a = UnitaryOperator::certify(random_unitary(d, &mut r), basis.clone()).unwrap();
        let b = UnitaryOperator::certify(random_unitary(d, &mut r), basis).unwrap();
        let ab = a.compose(&b).unwrap();
        prop_assert!(ab.deviation() <= COMPOSITION_TOLERANCE);
    }

    #[test]
    fn measurement_ignores_global_phase(seed in any::<u64>(), phase in 0.0f64..std::f64::consts::TAU) {
        let mut r = rng(seed);
        let w = random_walk(MODELS[(seed % 5) as usize], &mut r, &SizeBounds::default()).unwrap();
        let s = random_state(w.basis().clone(), &mut r);
        let m = w.measurement_at(0);
        let p = measure_vertices(&s, m).unwrap();
        let q = measure_vertices(&s.clone().with_global_phase(phase), m).unwrap();
        prop_assert!(common::max_abs_diff(&p, &q) < 1e-14);
        // independent grouping by basis label
        let oracle = common::group_probabilities(w.basis(), s.amplitudes(), w.measured_vertices(), common::first_index);
        prop_assert!(common::max_abs_diff(&p, &oracle) < 1e-14);
    }

    #[test]
    fn every_built_stage_is_certified(seed in any::<u64>()) {
        let mut r = rng(seed);
        for model in MODELS {
            let w = random_walk(model, &mut r, &SizeBounds::new(8, 8, 3)).unwrap();
            for s in w.stages() {
                prop_assert!(unitarity_deviation(s.matrix()) <= 1e-10);
                prop_assert_eq!(s.basis().len(), w.basis().len());
            }
        }
    }

    #[test]
    fn a_full_cycle_preserves_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_walk(MODELS[(seed % 5) as usize], &mut r, &SizeBounds::new(8, 8, 4)).unwrap();
        let s = random_state(w.basis().clone(), &mut r);
        let n = 3 * w.cycle_length();
        let t = run(&w, &s, n).unwrap();
        for (k, st) in t.states.iter().enumerate() {
            prop_assert!((st.norm() - 1.0).abs() <= (k.max(1) as f64) * 1e-12);
        }
        prop_assert_eq!(t.cycle_boundaries.iter().filter(|b| **b).count(), 4);
    }

    #[test]
    fn full_reflection_squares_to_identity(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed), 7, 10).unwrap();
        let w = build_scattering_rt(&g, &vec![(C64::new(1.0, 0.0), C64::new(0.0, 0.0)); g.vertex_count()]).unwrap();
        let u = w.stages()[0].matrix();
        prop_assert_eq!(u * u, CMatrix::identity(u.nrows(), u.ncols()));
    }

    #[test]
    fn deviation_matches_the_dense_gram_matrix(seed in any::<u64>(), d in 1usize..10, holes in 0usize..20) {
        let mut r = rng(seed);
        let mut m = random_unitary(d, &mut r);
        for h in 0..holes {
            m[((seed as usize + 7 * h) % d, (h * 3) % d)] = C64::new(0.0, 0.0);
        }
        let dense = (m.adjoint() * &m - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((unitarity_deviation(&m) - dense).abs() <= 1e-12);
    }

    #[test]
    fn staggered_to_hyperwalk_never_grows_the_basis(seed in any::<u64>()) {
        let w = random_walk(ModelKind::Staggered, &mut rng(seed), &SizeBounds::new(9, 20, 4)).unwrap();
        let r = generalized_hyperwalk_from_staggered(&w).unwrap();
        prop_assert!(r.target.basis().len() <= w.basis().len());
        prop_assert!(r.step_map.is_identity());
    }

    #[test]
    fn szegedy_round_trip_is_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_walk(ModelKind::Szegedy, &mut r, &SizeBounds::new(6, 8, 2)).unwrap();
        let c = coined_from_szegedy(&w).unwrap();
        let s = szegedy_from_coined(&c.target).unwrap();
        let (hyperwalk::ModelParts::Szegedy { reflections: a, .. }, hyperwalk::ModelParts::Szegedy { reflections: b, .. }) =
            (w.parts(), s.target.parts()) else { unreachable!() };
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every conversion reproduces the source distributions for at least
    /// five cycles on small instances.
    #[test]
    fn conversions_agree_for_five_cycles(seed in any::<u64>(), which in 0usize..7) {
        let kind = hyperwalk::TransformKind::ALL[which];
        let mut r = rng(seed);
        let bounds = SizeBounds::new(5, 5, 3);
        let w = hyperwalk::equivalence::random_source(kind, &mut r, &bounds).unwrap();
        prop_assume!(w.basis().len() <= 32);
        let psi = random_state(w.basis().clone(), &mut r);
        let res = apply_transform(kind, &w).unwrap();
        let rep = hyperwalk::equivalence::check_cycles(&w, &psi, &res, 5, 1e-10).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::Pass, "{} deviation {}", kind, rep.max_deviation);
    }

    #[test]
    fn random_checks_are_deterministic(seed in any::<u64>(), which in 0usize..7) {
        let kind = hyperwalk::TransformKind::ALL[which];
        let cfg = SuiteConfig { bounds: SizeBounds::new(5, 5, 2), horizon: Horizon::Steps(4), tolerance: 1e-10 };
        let a = check_random_instance(kind, &cfg, seed).unwrap();
        let b = check_random_instance(kind, &cfg, seed).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn nan_entries_never_certify() {
    let mut m = CMatrix::identity(3, 3);
    m[(1, 2)] = C64::new(f64::NAN, 0.0);
    assert_eq!(unitarity_deviation(&m), f64::INFINITY);
}

#[test]
fn suites_are_order_independent() {
    let kind = hyperwalk::TransformKind::HyperwalkToCoined;
    let cfg = SuiteConfig::new(kind, SizeBounds::new(5, 4, 2));
    let a = randomized_suite(kind, 12, &cfg, 9).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| randomized_suite(kind, 12, &cfg, 9).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.verdict, Verdict::Pass);
}
