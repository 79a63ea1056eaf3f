//! Acceptance run: every criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails or overruns its time budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperwalk::equivalence::{randomized_suite, Horizon, SuiteConfig, SuiteReport};
use hyperwalk::random::{random_two_regular_hypergraph, random_walk, SizeBounds};
use hyperwalk::state::unitarity_deviation;
use hyperwalk::transforms::{
    coined_from_szegedy, szegedy_from_coined, transform_chain_size, StateMap, StepMap,
    HYPERWALK_TO_SZEGEDY_CHAIN,
};
use hyperwalk::walks::presets::permutation;
use hyperwalk::walks::{build_directed_shift, build_scattering_rt, HyperwalkStep};
use hyperwalk::{
    check_instance, run, BasisLabel, CMatrix, Hypergraph, ModelKind, ModelParts, StateVector, TransformKind,
    TransformResult, WalkInstance, WalkSpec, C64,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn suite_outcome(rep: &SuiteReport, strong: bool) -> Outcome {
    let ok = if strong { rep.strong_passed == rep.instances } else { rep.passed == rep.instances };
    let msg = format!(
        "{}/{} pass ({} strong), worst deviation {:.3e}",
        rep.passed, rep.instances, rep.strong_passed, rep.worst_deviation
    );
    if ok { Ok(msg) } else { Err(msg) }
}

fn unitarity_suite() -> Outcome {
    let bounds = SizeBounds::new(10, 6, 3);
    let mut worst: f64 = 0.0;
    let mut stages = 0;
    let models = [ModelKind::CoinedLine, ModelKind::ScatteringCoined, ModelKind::Szegedy, ModelKind::Staggered, ModelKind::Hyperwalk];
    for (m, model) in models.into_iter().enumerate() {
        for i in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * m as u64 + i);
            let w = random_walk(model, &mut rng, &bounds).map_err(|e| format!("{model} #{i}: {e}"))?;
            for s in w.stages() {
                worst = worst.max(unitarity_deviation(s.matrix()));
                stages += 1;
            }
        }
    }
    let msg = format!("{stages} stages over 500 instances, worst |U^dagger U - I| = {worst:.3e}");
    if worst <= 1e-10 { Ok(msg) } else { Err(msg) }
}

fn chain_size_accounting() -> Outcome {
    let spec = WalkSpec::from_json(
        r#"{"model": "hyperwalk",
            "structure": {"vertices": 4, "labels": ["A","B","C","D"], "edges": [[0,1,2],[0,1],[2,3]]},
            "coins": {"default": "grover"}, "shifts": {"default": "grover"},
            "repetitions": 2}"#,
    )
    .map_err(|e| e.to_string())?;
    let links = transform_chain_size(&spec, &HYPERWALK_TO_SZEGEDY_CHAIN).map_err(|e| e.to_string())?;
    let got = (
        links[1].sizes.vertices,
        links[2].sizes.vertices,
        links[2].sizes.operators,
        links[3].sizes.vertices,
        links[4].sizes.vertices,
    );
    let msg = format!(
        "staggered {} / generalized coined {} with {} coins / coined {} / Szegedy {}",
        got.0, got.1, got.2, got.3, got.4
    );
    if got == (7, 21, 8, 168, 336) { Ok(msg) } else { Err(msg) }
}

fn suite(kind: TransformKind, count: usize, bounds: SizeBounds, horizon: Horizon, tol: f64, strong: bool) -> Outcome {
    let cfg = SuiteConfig { bounds, horizon, tolerance: tol };
    let rep = randomized_suite(kind, count, &cfg, 42).map_err(|e| e.to_string())?;
    suite_outcome(&rep, strong)
}

/// Szegedy <-> coined in both directions, plus the round trip composed into
/// a single check against the original coined walk.
fn szegedy_round_trip() -> Outcome {
    let bounds = SizeBounds::new(6, 8, 2);
    let there = suite(TransformKind::CoinedToSzegedy, 25, bounds, Horizon::Steps(10), 1e-10, false)?;
    let back = suite(TransformKind::SzegedyToCoined, 25, bounds, Horizon::Steps(10), 1e-10, false)?;
    let mut worst: f64 = 0.0;
    for i in 0..25u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + i);
        let k = rng.random_range(1..=2);
        let w = hyperwalk::random::random_coined_walk_with(&mut rng, &bounds, k).map_err(|e| e.to_string())?;
        let psi = hyperwalk::random::random_state(w.basis().clone(), &mut rng);
        let s = szegedy_from_coined(&w).map_err(|e| e.to_string())?;
        let c = coined_from_szegedy(&s.target).map_err(|e| e.to_string())?;
        let image: Vec<usize> = s.state_map.image().iter().map(|&j| c.state_map.image()[j]).collect();
        let composed = TransformResult {
            kind: None,
            state_map: StateMap::new(w.basis().clone(), c.target.basis().clone(), image).map_err(|e| e.to_string())?,
            measurements: c.measurements.clone(),
            target: c.target,
            step_map: StepMap::IDENTITY,
        };
        let rep = check_instance(&w, &psi, &composed, 10, 1e-10).map_err(|e| e.to_string())?;
        worst = worst.max(rep.max_deviation);
    }
    let msg = format!("coined->Szegedy {there}; Szegedy->coined {back}; round trip worst {worst:.3e}");
    if worst <= 1e-10 { Ok(msg) } else { Err(msg) }
}

fn two_regular_reduction() -> Outcome {
    let want = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)]);
    let sigma_x = permutation(&[1, 0]);
    let mut blocks = 0;
    for i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(8000 + i);
        let h = random_two_regular_hypergraph(&mut rng, 8, 10).map_err(|e| e.to_string())?;
        let step = HyperwalkStep::grover(&h);
        for (e, s) in step.shifts.iter().enumerate() {
            if (s - &want).camax() > 1e-15 {
                return Err(format!("instance {i}: S_{e} = {s}"));
            }
            blocks += 1;
        }
        let g = h.to_graph().map_err(|e| e.to_string())?;
        let w = build_scattering_rt(&g, &vec![(C64::new(1.0, 0.0), C64::new(0.0, 0.0)); g.vertex_count()])
            .map_err(|e| e.to_string())?;
        let u = w.stages()[0].matrix();
        for &(a, b) in g.edges() {
            let idx = [
                w.basis().require(&BasisLabel::Arc { from: a, to: b }).unwrap(),
                w.basis().require(&BasisLabel::Arc { from: b, to: a }).unwrap(),
            ];
            let sub = CMatrix::from_fn(2, 2, |r, c| u[(idx[r], idx[c])]);
            // the edge subspace is invariant and U acts on it as sigma_x
            let leak: f64 = idx.iter().map(|&c| u.column(c).norm_squared()).sum::<f64>() - sub.norm_squared();
            if (sub - &sigma_x).camax() > 1e-15 || leak.abs() > 1e-15 {
                return Err(format!("instance {i}: r=1 walk is not sigma_x on edge ({a},{b})"));
            }
        }
    }
    Ok(format!("{blocks} Grover edge shifts equal [[0,-1],[-1,0]]; r=1 walk is sigma_x on every edge"))
}

fn directed_shift_cyclicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for l in 2..=6usize {
        let mut order: Vec<usize> = (0..8).collect();
        order.shuffle(&mut rng);
        let h = Hypergraph::directed(8, vec![order[..l].to_vec()]).map_err(|e| e.to_string())?;
        let s = &build_directed_shift(&h).map_err(|e| e.to_string())?[0];
        let mut p = CMatrix::identity(l, l);
        for k in 1..=l {
            p = s * p;
            let is_identity = p == CMatrix::identity(l, l);
            if is_identity != (k == l) {
                return Err(format!("l={l}: S^{k} identity = {is_identity}"));
            }
        }
        if l == 2 && *s != permutation(&[1, 0]) {
            return Err("l=2 shift is not the swap".into());
        }
    }
    Ok("S_e^l = I exactly (and no smaller power) for l = 2..6; l = 2 is the swap".into())
}

/// `U^n psi` by binary exponentiation of a matrix assembled here from the
/// model parts, independent of the walk's own stage operators.
fn oracle_power(w: &WalkInstance, psi: &StateVector, n: usize) -> CMatrix {
    let basis = w.basis();
    let d = basis.len();
    let u = match w.parts() {
        ModelParts::CoinedLine { positions, coin } => {
            let mut u = CMatrix::zeros(d, d);
            for (j, l) in basis.labels().iter().enumerate() {
                let BasisLabel::Line { coin: c, position: p } = *l else { unreachable!() };
                for c2 in 0..2 {
                    let q = if c2 == 0 { (p + positions - 1) % positions } else { (p + 1) % positions };
                    let i = basis.index_of(&BasisLabel::Line { coin: c2, position: q }).unwrap();
                    u[(i, j)] += coin[(c2, c)];
                }
            }
            u
        }
        ModelParts::Coined { coins, .. } => {
            let mut shift = CMatrix::zeros(d, d);
            for (j, l) in basis.labels().iter().enumerate() {
                let BasisLabel::Arc { from, to } = *l else { unreachable!() };
                shift[(basis.index_of(&BasisLabel::Arc { from: to, to: from }).unwrap(), j)] = C64::new(1.0, 0.0);
            }
            shift * &coins[0]
        }
        ModelParts::Staggered { stages, .. } => stages[0].clone(),
        _ => unreachable!(),
    };
    let mut result = CMatrix::identity(d, d);
    let mut base = u;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    result * CMatrix::from_column_slice(d, 1, psi.amplitudes().as_slice())
}

fn oracle_equivalence() -> Outcome {
    let bounds = SizeBounds::new(8, 10, 1);
    let models = [ModelKind::CoinedLine, ModelKind::ScatteringCoined, ModelKind::Staggered];
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + i);
        let model = models[i as usize % models.len()];
        let w = random_walk(model, &mut rng, &bounds).map_err(|e| e.to_string())?;
        assert_eq!(w.cycle_length(), 1);
        let psi = hyperwalk::random::random_state(w.basis().clone(), &mut rng);
        let n = rng.random_range(1..=50);
        let traj = run(&w, &psi, n).map_err(|e| e.to_string())?;
        let want = oracle_power(&w, &psi, n);
        let got = traj.final_state().amplitudes();
        worst = worst.max((got - want.column(0)).camax());
    }
    let msg = format!("20 single-stage walks, worst amplitude deviation {worst:.3e}");
    if worst <= 1e-11 { Ok(msg) } else { Err(msg) }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("unitarity suite", secs(10), Box::new(unitarity_suite)),
        ("three-edge chain accounting", secs(1), Box::new(chain_size_accounting)),
        (
            "hyperwalk -> coined",
            secs(30),
            Box::new(|| suite(TransformKind::HyperwalkToCoined, 50, SizeBounds::new(6, 4, 3), Horizon::Steps(10), 1e-10, false)),
        ),
        (
            "staggered -> generalized coined",
            secs(30),
            Box::new(|| {
                suite(TransformKind::StaggeredToGeneralizedCoined, 25, SizeBounds::new(8, 28, 3), Horizon::Cycles(5), 1e-10, false)
            }),
        ),
        (
            "generalized coined -> coined",
            secs(30),
            Box::new(|| suite(TransformKind::GeneralizedCoinedToCoined, 25, SizeBounds::new(6, 15, 4), Horizon::Steps(12), 1e-10, false)),
        ),
        (
            "staggered -> generalized hyperwalk (strong)",
            secs(15),
            Box::new(|| suite(TransformKind::StaggeredToHyperwalk, 50, SizeBounds::new(10, 20, 4), Horizon::Steps(10), 1e-12, true)),
        ),
        ("Szegedy <-> coined round trip", secs(15), Box::new(szegedy_round_trip)),
        ("2-regular reduction", secs(5), Box::new(two_regular_reduction)),
        ("directed shift cyclicity", secs(1), Box::new(directed_shift_cyclicity)),
        ("oracle equivalence", secs(10), Box::new(oracle_equivalence)),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(m) if elapsed <= *budget => (true, m),
            Ok(m) => (false, format!("{m}; over time budget")),
            Err(m) => (false, m),
        };
        failures += usize::from(!ok);
        println!(
            "[{}] {:>2}. {name}: {detail} ({:.3}s / {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
