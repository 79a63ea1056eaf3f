//! Instance checks: does a converted walk reproduce the source's vertex
//! distributions at the corresponding step counts?

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::{random_coined_walk_with, random_hyperwalk, random_staggered_walk, random_state, random_szegedy_walk, SizeBounds};
use crate::state::{measure_vertices, same_basis, StateVector};
use crate::transforms::{apply_transform, TransformKind, TransformResult};
use crate::walks::WalkInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Self::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// `(n_source, n_target)` pairs that were compared.
    pub checked_steps: Vec<(usize, usize)>,
    /// `(source, target)` basis sizes.
    pub basis_sizes: (usize, usize),
    /// Target basis no larger than the source basis.
    pub strong: bool,
    /// Source step and vertex where `max_deviation` was attained.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<(usize, usize)>,
}

/// Compares the source distribution after `n` steps with the target
/// distribution after `step_map(n)` steps, for every `n <= n_max`.
pub fn check_instance(
    source: &WalkInstance,
    psi: &StateVector,
    result: &TransformResult,
    n_max: usize,
    tol: f64,
) -> Result<EquivalenceReport> {
    check_steps(source, psi, result, &(0..=n_max).collect::<Vec<_>>(), tol)
}

/// As [`check_instance`], restricted to source step counts that complete
/// whole cycles of the source schedule, up to `cycles` cycles.
pub fn check_cycles(
    source: &WalkInstance,
    psi: &StateVector,
    result: &TransformResult,
    cycles: usize,
    tol: f64,
) -> Result<EquivalenceReport> {
    let c = source.cycle_length();
    check_steps(source, psi, result, &(0..=cycles).map(|i| i * c).collect::<Vec<_>>(), tol)
}

/// Pass additionally requires the target basis to be no larger than the
/// source basis and the step map to be the identity.
pub fn check_strong_instance(
    source: &WalkInstance,
    psi: &StateVector,
    result: &TransformResult,
    n_max: usize,
    tol: f64,
) -> Result<EquivalenceReport> {
    let mut report = check_instance(source, psi, result, n_max, tol)?;
    if !(report.strong && result.step_map.is_identity()) {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}

fn check_steps(
    source: &WalkInstance,
    psi: &StateVector,
    result: &TransformResult,
    steps: &[usize],
    tol: f64,
) -> Result<EquivalenceReport> {
    if !same_basis(psi.basis(), source.basis()) || !same_basis(result.state_map.source(), source.basis()) {
        return Err(Error::BasisMismatch("initial state, source walk and state map disagree on the basis".into()));
    }
    let vertices = source.measured_vertices();
    if result.measurements.iter().any(|m| m.vertex_count() != vertices) {
        return Err(Error::DimensionMismatch {
            context: "target measurement vs source vertices".into(),
            expected: vertices,
            found: result.measurements[0].vertex_count(),
        });
    }
    let phi = result.state_map.map_state(psi)?;
    let mut src = psi.clone();
    let mut tgt = phi;
    let (mut n_src, mut n_tgt) = (0, 0);
    let mut max_deviation: f64 = 0.0;
    let mut worst = None;
    let mut checked_steps = Vec::with_capacity(steps.len());
    for &n in steps {
        let m = result.step_map.apply(n);
        while n_src < n {
            src = source.apply_step(&src, n_src)?;
            n_src += 1;
        }
        while n_tgt < m {
            tgt = result.target.apply_step(&tgt, n_tgt)?;
            n_tgt += 1;
        }
        let p = source.distribution(&src, n)?;
        let q = measure_vertices(&tgt, result.measurement_at(m))?;
        for (v, (a, b)) in p.iter().zip(&q).enumerate() {
            let d = (a - b).abs();
            // NaN never passes
            if !(d <= max_deviation) {
                max_deviation = if d.is_nan() { f64::INFINITY } else { d };
                worst = Some((n, v));
            }
        }
        checked_steps.push((n, m));
    }
    let basis_sizes = (source.basis().len(), result.target.basis().len());
    Ok(EquivalenceReport {
        verdict: if max_deviation <= tol { Verdict::Pass } else { Verdict::Fail },
        max_deviation,
        tolerance: tol,
        checked_steps,
        basis_sizes,
        strong: basis_sizes.1 <= basis_sizes.0,
        worst,
    })
}

/// How far each random instance is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizon {
    /// Every source step up to `n`.
    Steps(usize),
    /// Whole-cycle boundaries up to this many cycles.
    Cycles(usize),
}

impl Horizon {
    /// Default horizon for each conversion.
    pub fn default_for(kind: TransformKind) -> Self {
        match kind {
            TransformKind::StaggeredToGeneralizedCoined => Self::Cycles(5),
            TransformKind::GeneralizedCoinedToCoined => Self::Steps(12),
            _ => Self::Steps(10),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub bounds: SizeBounds,
    pub horizon: Horizon,
    pub tolerance: f64,
}

impl SuiteConfig {
    pub fn new(kind: TransformKind, bounds: SizeBounds) -> Self {
        Self { bounds, horizon: Horizon::default_for(kind), tolerance: crate::state::DEFAULT_UNITARITY_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub transform: TransformKind,
    pub seed: u64,
    pub instances: usize,
    pub passed: usize,
    /// Instances that passed with a target basis no larger than the source.
    pub strong_passed: usize,
    pub worst_deviation: f64,
    pub verdict: Verdict,
    pub reports: Vec<EquivalenceReport>,
}

/// Random source walk suitable for `kind`.
pub fn random_source(kind: TransformKind, rng: &mut ChaCha8Rng, bounds: &SizeBounds) -> Result<WalkInstance> {
    use rand::Rng;
    match kind {
        TransformKind::HyperwalkToCoined | TransformKind::HyperwalkToStaggered => random_hyperwalk(rng, bounds),
        TransformKind::StaggeredToGeneralizedCoined | TransformKind::StaggeredToHyperwalk => {
            random_staggered_walk(rng, bounds)
        }
        TransformKind::GeneralizedCoinedToCoined => {
            let k = rng.random_range(1..=bounds.max_schedule.max(1));
            random_coined_walk_with(rng, bounds, k)
        }
        TransformKind::CoinedToSzegedy => {
            let k = rng.random_range(1..=bounds.max_schedule.clamp(1, 2));
            random_coined_walk_with(rng, bounds, k)
        }
        TransformKind::SzegedyToCoined => random_szegedy_walk(rng, bounds),
    }
}

/// Seed of instance `i` in a suite seeded with `seed`.
pub fn instance_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One random source walk, random initial state, conversion and check.
pub fn check_random_instance(kind: TransformKind, config: &SuiteConfig, seed: u64) -> Result<EquivalenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = random_source(kind, &mut rng, &config.bounds)?;
    let psi = random_state(source.basis().clone(), &mut rng);
    let result = apply_transform(kind, &source)?;
    match config.horizon {
        Horizon::Steps(n) if kind.is_strong() => check_strong_instance(&source, &psi, &result, n, config.tolerance),
        Horizon::Steps(n) => check_instance(&source, &psi, &result, n, config.tolerance),
        Horizon::Cycles(c) => check_cycles(&source, &psi, &result, c, config.tolerance),
    }
}

/// Runs `count` independent random checks (in parallel). The report is
/// identical for identical arguments regardless of thread count.
pub fn randomized_suite(kind: TransformKind, count: usize, config: &SuiteConfig, seed: u64) -> Result<SuiteReport> {
    config.bounds.check(kind.source_model())?;
    let reports = (0..count)
        .into_par_iter()
        .map(|i| check_random_instance(kind, config, instance_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().filter(|r| r.verdict.is_pass()).count();
    let strong_passed = reports.iter().filter(|r| r.verdict.is_pass() && r.strong).count();
    let worst_deviation = reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    Ok(SuiteReport {
        transform: kind,
        seed,
        instances: count,
        passed,
        strong_passed,
        worst_deviation,
        verdict: if passed == count { Verdict::Pass } else { Verdict::Fail },
        reports,
    })
}
