use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use hyperwalk::equivalence::{
    check_cycles, check_instance, check_strong_instance, randomized_suite, EquivalenceReport, Horizon, SuiteConfig,
};
use hyperwalk::random::SizeBounds;
use hyperwalk::state::set_unitarity_tolerance;
use hyperwalk::transforms::{apply_chain, apply_transform, parse_chain, TransformDoc, TransformKind, TransformResult};
use hyperwalk::walks::spec::{default_initial_state, InitialStateDoc, WalkSpec};
use hyperwalk::{run, Error, StateVector, WalkInstance};

use crate::{Format, RunConfig};

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Inapplicable(String),
    #[error("{0}")]
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(_) | Error::UnknownPreset(_) => Failure::Parse(e.to_string()),
            Error::InapplicableTransform(_) => Failure::Inapplicable(e.to_string()),
            other => Failure::Invariant(other.to_string()),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

pub struct VerifyOptions {
    pub result: Option<PathBuf>,
    pub random: Option<usize>,
    pub cycles: Option<usize>,
    pub strong: bool,
    pub bounds: SizeBounds,
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

fn prepare(config: &RunConfig) -> Outcome {
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        return Err(Failure::Parse(format!("tolerance must be positive, got {}", config.tol)));
    }
    set_unitarity_tolerance(config.tol);
    Ok(())
}

fn load_spec(config: &RunConfig) -> Outcome<WalkSpec> {
    let path = config.spec.as_ref().ok_or_else(|| Failure::Parse("--spec is required".into()))?;
    Ok(WalkSpec::from_json(&read(path)?)?)
}

fn load_walk(config: &RunConfig) -> Outcome<WalkInstance> {
    Ok(load_spec(config)?.build()?)
}

fn load_state(config: &RunConfig, walk: &WalkInstance) -> Outcome<StateVector> {
    let Some(arg) = &config.state else {
        return Ok(default_initial_state(walk));
    };
    let text = if Path::new(arg).is_file() { read(Path::new(arg))? } else { arg.clone() };
    let doc: InitialStateDoc =
        serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("initial state: {e}")))?;
    Ok(doc.resolve(walk)?)
}

fn transforms(config: &RunConfig) -> Outcome<Vec<TransformKind>> {
    let names = config.transform.as_deref().ok_or_else(|| Failure::Parse("--transform is required".into()))?;
    let chain = parse_chain(names)?;
    if chain.is_empty() {
        return Err(Failure::Parse("--transform names no transform".into()));
    }
    Ok(chain)
}

fn single_transform(config: &RunConfig) -> Outcome<TransformKind> {
    match transforms(config)?.as_slice() {
        [kind] => Ok(*kind),
        _ => Err(Failure::Parse("this command takes a single transform".into())),
    }
}

fn emit(config: &RunConfig, text: &str) -> Outcome {
    match &config.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Parse(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Parse(format!("cannot write output: {e}"))),
    }
}

fn emit_json(config: &RunConfig, value: &impl Serialize) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    emit(config, &text)
}

pub fn simulate(config: &RunConfig) -> Outcome {
    prepare(config)?;
    let walk = load_walk(config)?;
    let psi = load_state(config, &walk)?;
    let trajectory = run(&walk, &psi, config.steps)?;
    let distributions = trajectory.distributions(&walk)?;
    match config.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(
            config,
            &json!({
                "model": walk.model(),
                "measurement": measurement_kind(&walk),
                "distributions": distributions,
            }),
        ),
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# measurement={}", measurement_kind(&walk)).expect("in-memory write");
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["step", "vertex", "probability"]).expect("in-memory write");
            for (step, p) in distributions.iter().enumerate() {
                for (vertex, prob) in p.iter().enumerate() {
                    w.serialize((step, vertex, prob)).expect("in-memory write");
                }
            }
            let bytes = w.into_inner().expect("in-memory write");
            emit(config, &String::from_utf8(bytes).expect("ascii output"))
        }
    }
}

/// Whether every basis state is observed (rows sum to one) or only some are.
fn measurement_kind(walk: &WalkInstance) -> &'static str {
    if walk.measurements().iter().all(|m| m.is_total()) {
        "total"
    } else {
        "partial"
    }
}

#[derive(Serialize)]
struct ChainLinkReport {
    transform: TransformKind,
    step_map: hyperwalk::StepMap,
    sizes: hyperwalk::walks::SizeReport,
}

pub fn transform(config: &RunConfig) -> Outcome {
    prepare(config)?;
    let walk = load_walk(config)?;
    let chain = transforms(config)?;
    if let [kind] = chain.as_slice() {
        return emit_json(config, &apply_transform(*kind, &walk)?.to_doc());
    }
    // chains report each link; the intermediate matrices are not written
    let results = apply_chain(&walk, &chain)?;
    let links: Vec<ChainLinkReport> = results
        .iter()
        .zip(&chain)
        .map(|(r, &transform)| ChainLinkReport { transform, step_map: r.step_map, sizes: r.size_report() })
        .collect();
    emit_json(config, &json!({ "source": walk.size_report(), "links": links }))
}

pub fn chain_size(config: &RunConfig) -> Outcome {
    prepare(config)?;
    let spec = load_spec(config)?;
    let chain = transforms(config)?;
    emit_json(config, &hyperwalk::transform_chain_size(&spec, &chain)?)
}

pub fn info(config: &RunConfig) -> Outcome {
    prepare(config)?;
    let walk = load_walk(config)?;
    let worst = walk.stages().iter().map(|s| s.deviation()).fold(0.0, f64::max);
    emit_json(
        config,
        &json!({
            "sizes": walk.size_report(),
            "stages": walk.stages().len(),
            "stages_per_step": walk.stages_per_step(),
            "cycle_length": walk.cycle_length(),
            "measured_vertices": walk.measured_vertices(),
            "measurement": measurement_kind(&walk),
            "max_unitarity_deviation": worst,
        }),
    )
}

pub fn verify(config: &RunConfig, opts: &VerifyOptions) -> Outcome {
    prepare(config)?;
    if let Some(count) = opts.random {
        let kind = single_transform(config)?;
        let horizon = opts.cycles.map_or(Horizon::Steps(config.steps), Horizon::Cycles);
        let suite = SuiteConfig { bounds: opts.bounds, horizon, tolerance: config.tol };
        let report = randomized_suite(kind, count, &suite, config.seed)?;
        emit_json(config, &report)?;
        let needed = if opts.strong { report.strong_passed } else { report.passed };
        if needed != report.instances {
            return Err(Failure::Verification(format!(
                "{kind}: {needed} of {} instances passed (worst deviation {:e})",
                report.instances, report.worst_deviation
            )));
        }
        return Ok(());
    }
    let walk = load_walk(config)?;
    let psi = load_state(config, &walk)?;
    let result: TransformResult = match &opts.result {
        Some(path) => {
            let doc: TransformDoc =
                serde_json::from_str(&read(path)?).map_err(|e| Failure::Parse(format!("result document: {e}")))?;
            doc.into_result(&walk)?
        }
        None => apply_transform(single_transform(config)?, &walk)?,
    };
    let strong = opts.strong || result.kind.is_some_and(TransformKind::is_strong);
    let report: EquivalenceReport = match opts.cycles {
        Some(c) => check_cycles(&walk, &psi, &result, c, config.tol)?,
        None if strong => check_strong_instance(&walk, &psi, &result, config.steps, config.tol)?,
        None => check_instance(&walk, &psi, &result, config.steps, config.tol)?,
    };
    emit_json(config, &json!({ "strong_check": strong, "report": report }))?;
    if report.verdict.is_pass() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "verification failed: max deviation {:e} (tolerance {:e}){}",
            report.max_deviation,
            config.tol,
            if strong && !report.strong { ", target basis is larger than the source" } else { "" }
        )))
    }
}
