use std::path::{Path, PathBuf};

use gevrey_flow::diagnostics::{
    bilinear_bound_suite, decay_envelope_check, embedding_suite, fit_decay, monotonicity_check,
    random_zero_mean_field, rescale_equivalence_check,
};
use gevrey_flow::dynamics::{picard_solve, simulate, PicardOptions, SimOutput, Termination};
use gevrey_flow::model::{check_admissibility, compute_derived, compute_zeta, AdmissibilityInput, ModelConfig};
use gevrey_flow::spectral::{ConvolutionPath, SpectralField};
use gevrey_flow::stochastic::{omega_probability_mc, sample_omega_paths, BrownianPath};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{PathKind, RunConfig};
use crate::output::{write_field_dump, write_json, write_series_csv};
use crate::{Artifact, CliError, Metadata};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Params,
    OmegaMc,
    Simulate,
    VerifyDecay,
    PropertySuite,
    PicardCompare,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Params => "params",
            Self::OmegaMc => "omega-mc",
            Self::Simulate => "simulate",
            Self::VerifyDecay => "verify-decay",
            Self::PropertySuite => "property-suite",
            Self::PicardCompare => "picard-compare",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: Command,
    pub passed: bool,
    pub failures: Vec<String>,
    pub report: Value,
    /// Files written, the JSON report first.
    pub artifacts: Vec<PathBuf>,
}

struct Checks {
    failures: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self { failures: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) -> bool {
        if !ok {
            self.failures.push(what());
        }
        ok
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Runs `command` and writes its artifacts into `out_dir`.
pub fn run(command: Command, cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)
        .map_err(|source| CliError::Io { path: out_dir.display().to_string(), source })?;
    let mut checks = Checks::new();
    let mut files = Vec::new();
    let report = match command {
        Command::Params => params(cfg, &mut checks)?,
        Command::OmegaMc => omega_mc(cfg, &mut checks)?,
        Command::Simulate => simulate_paths(cfg, out_dir, &mut checks, &mut files, false)?,
        Command::VerifyDecay => simulate_paths(cfg, out_dir, &mut checks, &mut files, true)?,
        Command::PropertySuite => property_suite(cfg, &mut checks)?,
        Command::PicardCompare => picard_compare(cfg, &mut checks)?,
    };
    let passed = checks.failures.is_empty();
    let json_path = out_dir.join(cfg.json.clone().unwrap_or_else(|| format!("{}.json", command.name())));
    let artifact = Artifact {
        metadata: Metadata { command: command.name().into(), version: env!("CARGO_PKG_VERSION") },
        config: cfg,
        passed,
        failures: &checks.failures,
        report: &report,
    };
    write_json(&json_path, &artifact)?;
    files.insert(0, json_path);
    Ok(Outcome { command, passed, failures: checks.failures, report, artifacts: files })
}

fn params(cfg: &RunConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let model = cfg.model()?;
    let initial_norm = cfg.initial_field(&model).ok().and_then(|f| cfg.theorem_norm(&model).evaluate(&f, 0.0, &model).ok());
    let input = AdmissibilityInput { sigma: cfg.sigma, r: cfg.r, smallness_constant: cfg.smallness_constant, initial_norm };
    let admissibility = check_admissibility(&model, &input);
    let derived = match compute_derived(&model, 1e-9) {
        Ok(d) => to_value(&d),
        Err(e) => {
            checks.require(false, || format!("derived parameters: {e}"));
            Value::Null
        }
    };
    Ok(json!({
        "derived": derived,
        "matrix_symmetry": to_value(&model.matrix.symmetry()),
        "admissible": admissibility.admissible(),
        "admissibility": to_value(&admissibility),
    }))
}

fn omega_mc(cfg: &RunConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let r = omega_probability_mc(cfg.alpha, cfg.beta, cfg.nu, cfg.mc_paths, cfg.mc_horizon, cfg.mc_dt, cfg.seed)
        .map_err(|e| CliError::Config(format!("omega-mc: {e}")))?;
    let dev = (r.estimate - r.closed_form).abs();
    checks.require(dev <= 3.0 * r.se, || {
        format!("omega estimate {} differs from 1 - exp(-2αβ/ν²) = {} by {dev} > 3 SE = {}", r.estimate, r.closed_form, 3.0 * r.se)
    });
    Ok(json!({ "result": to_value(&r), "deviation": dev, "deviation_in_se": dev / r.se }))
}

fn driving_paths(cfg: &RunConfig, model: &ModelConfig, horizon: f64) -> Result<Vec<(u64, BrownianPath)>, CliError> {
    match cfg.path {
        PathKind::Zero => Ok(vec![(0, BrownianPath::zero(horizon, cfg.dt)?)]),
        PathKind::Brownian if cfg.condition_on_omega => {
            if !(model.alpha > 0.0 && model.beta > 0.0 && model.nu > 0.0) {
                return Err(CliError::Config("condition_on_omega needs alpha, beta, nu > 0".into()));
            }
            let found = sample_omega_paths(
                model.alpha,
                model.beta,
                model.nu,
                horizon,
                cfg.omega_check_horizon,
                cfg.dt,
                cfg.seed,
                cfg.n_paths,
                cfg.max_path_attempts,
            )?;
            Ok(found.into_iter().map(|c| (c.stream, c.path)).collect())
        }
        PathKind::Brownian => (0..cfg.n_paths as u64)
            .map(|i| Ok((i, BrownianPath::sample_stream(horizon, cfg.dt, cfg.seed, i)?)))
            .collect(),
    }
}

#[derive(Debug, Serialize)]
struct PathSummary {
    index: usize,
    stream: u64,
    termination: Termination,
    barrier_violation: Option<f64>,
    steps: usize,
    final_t: f64,
    norm_labels: Vec<String>,
    initial_norms: Vec<f64>,
    final_norms: Vec<f64>,
    max_zero_mode: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay: Option<Value>,
}

fn summarize(index: usize, stream: u64, out: &SimOutput) -> PathSummary {
    PathSummary {
        index,
        stream,
        termination: out.termination.clone(),
        barrier_violation: out.barrier_violation,
        steps: out.steps,
        final_t: out.last().t,
        norm_labels: out.series.iter().map(|s| s.label.clone()).collect(),
        initial_norms: out.series.iter().map(|s| s.values.first().copied().unwrap_or(f64::NAN)).collect(),
        final_norms: out.series.iter().map(|s| s.values.last().copied().unwrap_or(f64::NAN)).collect(),
        max_zero_mode: out.snapshots.iter().map(|s| s.rho.zero_mode().norm()).fold(0.0, f64::max),
        decay: None,
    }
}

fn simulate_paths(
    cfg: &RunConfig,
    out_dir: &Path,
    checks: &mut Checks,
    files: &mut Vec<PathBuf>,
    verify: bool,
) -> Result<Value, CliError> {
    let model = cfg.model()?;
    let rho0 = cfg.initial_field(&model)?;
    let icfg = cfg.integrator();
    let opts = cfg.sim_options(&model);
    let mut header = json!({});

    let zeta = if verify {
        let zeta = compute_zeta(&model, 1e-9).ok();
        let initial_norm = cfg.theorem_norm(&model).evaluate(&rho0, 0.0, &model)?;
        let input = AdmissibilityInput {
            sigma: cfg.sigma,
            r: cfg.r,
            smallness_constant: cfg.smallness_constant,
            initial_norm: Some(initial_norm),
        };
        let adm = check_admissibility(&model, &input);
        for name in ["zeta_positive", "smallness"] {
            if let Some(c) = adm.condition(name) {
                checks.require(c.passed(), || format!("hypothesis {name} does not hold: {}", c.detail));
            }
        }
        header = json!({ "zeta": to_value(&zeta), "admissibility": to_value(&adm), "initial_norm": initial_norm });
        zeta.filter(|z| z.value > 0.0)
    } else {
        None
    };

    let paths = driving_paths(cfg, &model, cfg.horizon)?;
    let runs: Vec<SimOutput> = paths
        .par_iter()
        .map(|(_, p)| simulate(&rho0, p, cfg.horizon, &icfg, &model, &opts))
        .collect::<gevrey_flow::Result<_>>()?;

    let mut summaries = Vec::with_capacity(runs.len());
    for (index, ((stream, path), out)) in paths.iter().zip(&runs).enumerate() {
        let csv_path = out_dir.join(format!("{}_{index}.csv", cfg.csv));
        write_series_csv(&csv_path, out, path)?;
        files.push(csv_path);
        if cfg.dump_stride > 0 {
            let dump_path = out_dir.join(format!("{}_{index}.bin", cfg.csv));
            write_field_dump(&dump_path, out, path, cfg.dump_stride)?;
            files.push(dump_path);
        }
        let mut summary = summarize(index, *stream, out);
        checks.require(out.completed(), || format!("path {index}: run stopped early: {:?}", out.termination));
        if verify && out.completed() {
            if let Some(z) = zeta {
                let series = &out.series[0];
                let envelope = decay_envelope_check(series, z.value, cfg.envelope_tol);
                let monotone = monotonicity_check(series);
                let bound = -0.5 * z.value + cfg.rate_slack * z.value;
                let fit = fit_decay(series, (0.0, out.last().t));
                checks.require(envelope.holds, || {
                    format!(
                        "path {index}: norm exceeds e^(-ζt/2)·norm(0)·(1 + {}) by ratio {} at t = {}",
                        cfg.envelope_tol, envelope.max_ratio, envelope.worst_time
                    )
                });
                checks.require(monotone.monotone, || {
                    format!("path {index}: norm increases at {:?}", monotone.first_violation)
                });
                match &fit {
                    Ok(f) => {
                        checks.require(f.rate <= bound, || format!("path {index}: fitted rate {} > -ζ/2 + slack = {bound}", f.rate));
                    }
                    Err(e) => {
                        checks.require(false, || format!("path {index}: decay fit failed: {e}"));
                    }
                }
                summary.decay = Some(json!({
                    "envelope": to_value(&envelope),
                    "monotonicity": to_value(&monotone),
                    "fit": fit.as_ref().ok().map(to_value),
                    "rate_bound": bound,
                }));
            }
        }
        summaries.push(summary);
    }
    header["paths"] = to_value(&summaries);
    Ok(header)
}

fn property_suite(cfg: &RunConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let model = cfg.model()?;
    let lattice = cfg.lattice()?;

    let embedding = embedding_suite(cfg.n_fields, cfg.seed)?;
    for c in &embedding.checks {
        checks.require(c.violations == 0, || {
            format!("embedding {}: {} of {} samples violate the inequality", c.name, c.violations, c.samples)
        });
    }

    let bound = bilinear_bound_suite(&model, lattice, cfg.bound_samples, cfg.seed)?;
    checks.require(bound.within_derived(), || {
        format!("bilinear bound ratio {} exceeds the derived constant {}", bound.max_ratio, bound.derived_bound)
    });

    let op = gevrey_flow::dynamics::BilinearOperator::new(lattice, &model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fields: Vec<SpectralField> = (0..cfg.oracle_fields)
        .map(|i| random_zero_mean_field(lattice, model.s, 0.05 * (i % 10) as f64, &mut rng))
        .collect();
    let oracle = fields
        .par_iter()
        .map(|f| {
            let mut worst: f64 = 0.0;
            for tau in [-0.5, 0.0, 0.5] {
                let direct = op.apply(f, f, tau, ConvolutionPath::Direct, cfg.overflow_cap)?;
                let fast = op.apply(f, f, tau, ConvolutionPath::Fast { dealias: false }, cfg.overflow_cap)?;
                let scale = direct.max_abs();
                if scale > 0.0 {
                    worst = worst.max(fast.max_abs_diff(&direct)? / scale);
                }
            }
            Ok(worst)
        })
        .collect::<gevrey_flow::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.require(oracle <= cfg.oracle_tol, || {
        format!("fast and direct bilinear terms differ by {oracle} > {}", cfg.oracle_tol)
    });

    let m = cfg.rescale_factor;
    let heavy = ModelConfig { mass: model.mass * m, ..model.clone() };
    let rho0 = cfg.initial_field(&model)?;
    let path = BrownianPath::sample(cfg.rescale_horizon / m, cfg.dt, cfg.seed)?;
    let rescale =
        rescale_equivalence_check(&heavy, m, &path, &rho0, cfg.rescale_horizon, &cfg.integrator(), cfg.snapshot_stride)?;
    checks.require(rescale.relative_discrepancy <= cfg.rescale_tol, || {
        format!("mass-rescaled runs differ by {} > {}", rescale.relative_discrepancy, cfg.rescale_tol)
    });

    Ok(json!({
        "embedding": to_value(&embedding),
        "bilinear_bound": to_value(&bound),
        "convolution_oracle": { "fields": cfg.oracle_fields, "max_relative_diff": oracle },
        "rescaling": {
            "factor": rescale.factor,
            "max_discrepancy": rescale.max_discrepancy,
            "relative_discrepancy": rescale.relative_discrepancy,
            "comparisons": rescale.times.len(),
        },
    }))
}

fn picard_compare(cfg: &RunConfig, checks: &mut Checks) -> Result<Value, CliError> {
    let model = cfg.model()?;
    let rho0 = cfg.initial_field(&model)?;
    let horizon = cfg.picard_horizon;
    let fine = horizon / cfg.picard_quad as f64;
    let path = match cfg.path {
        PathKind::Zero => BrownianPath::zero(horizon, fine)?,
        PathKind::Brownian => BrownianPath::sample(horizon, fine, cfg.seed)?,
    };
    let opts = PicardOptions {
        n_iter: cfg.picard_iter,
        quad_points: cfg.picard_quad,
        convolution: cfg.integrator().convolution,
        overflow_cap: cfg.overflow_cap,
        suppress_nonlinear: false,
    };
    let picard = picard_solve(&rho0, &path, horizon, &opts, &model)?;
    let sim_opts = gevrey_flow::dynamics::SimOptions { snapshot_stride: usize::MAX, ..Default::default() };
    let run = simulate(&rho0, &path, horizon, &cfg.integrator(), &model, &sim_opts)?;
    let diff = run.last().rho.max_abs_diff(&picard.terminal)?;
    checks.require(run.completed(), || format!("integrator stopped early: {:?}", run.termination));
    checks.require(diff <= cfg.picard_tol, || format!("terminal states differ by {diff} > {}", cfg.picard_tol));
    Ok(json!({
        "horizon": horizon,
        "quad_points": cfg.picard_quad,
        "dt": cfg.dt,
        "terminal_diff": diff,
        "picard_distances": picard.distances,
        "picard_max_ratio": picard.max_ratio,
        "picard_contraction": picard.contraction,
    }))
}
