use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bilinear::BilinearOperator;
use super::linear::{apply_factors, LinearFlow, DEFAULT_OVERFLOW_CAP};
use crate::diagnostics::{NormSchedule, NormSeries};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::spectral::{fourier_lebesgue_norm, ConvolutionPath, Lattice, SpectralField, Summability};
use crate::stochastic::BrownianPath;

/// Default growth factor of the monitored norms that stops a simulation.
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `ϱ⁺ = E(dt)[ϱ − dt B_n(ϱ)]`.
    ExpEuler,
    /// Predictor `ϱ*` by the Euler step, then `ϱ⁺ = E(dt)ϱ − dt/2 [E(dt) B_n(ϱ) + B_{n+1}(ϱ*)]`.
    #[default]
    ExpHeun,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// Evaluation path of the bilinear term; the fast path carries the dealiasing flag.
    pub convolution: ConvolutionPath,
    /// Largest exponent of `e` the bilinear term may form.
    pub overflow_cap: f64,
    /// Reset the mean mode to zero after every step.
    pub enforce_zero_mode: bool,
    /// Drop the bilinear term (linear dynamics only).
    pub suppress_nonlinear: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            scheme: Scheme::ExpHeun,
            convolution: ConvolutionPath::Direct,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
            enforce_zero_mode: true,
            suppress_nonlinear: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.overflow_cap > 0.0) {
            return Err(Error::InvalidParameter("overflow cap must be > 0".into()));
        }
        Ok(())
    }
}

/// State of the transformed equation at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    /// Zero-mean perturbation `ϱ = μ − mass`.
    pub rho: SpectralField,
    /// `ν W(t)`.
    pub nu_w: f64,
    /// `φ(t) = α + β t`.
    pub phi: f64,
}

impl SimState {
    pub fn new(t: f64, rho: SpectralField, path: &BrownianPath, cfg: &ModelConfig) -> Result<Self> {
        Ok(Self { t, nu_w: cfg.nu * path.value_at(t)?, phi: cfg.phi(t), rho })
    }

    /// `φ(t) − νW(t)`, nonnegative on paths of the barrier event.
    pub fn barrier_gap(&self) -> f64 {
        self.phi - self.nu_w
    }
}

/// Exponential time differencing for the transformed equation on one lattice.
#[derive(Debug, Clone)]
pub struct Integrator {
    cfg: ModelConfig,
    icfg: IntegratorConfig,
    bilinear: BilinearOperator,
    flow: LinearFlow,
    propagator: Vec<Complex64>,
}

impl Integrator {
    pub fn new(lattice: Lattice, cfg: &ModelConfig, icfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        icfg.validate()?;
        let flow = LinearFlow::new(lattice, cfg);
        Ok(Self {
            cfg: cfg.clone(),
            icfg: *icfg,
            bilinear: BilinearOperator::new(lattice, cfg)?,
            propagator: flow.propagator(icfg.dt),
            flow,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn integrator_config(&self) -> &IntegratorConfig {
        &self.icfg
    }

    pub fn lattice(&self) -> &Lattice {
        self.flow.lattice()
    }

    pub fn flow(&self) -> &LinearFlow {
        &self.flow
    }

    pub fn bilinear(&self) -> &BilinearOperator {
        &self.bilinear
    }

    /// `B^t(ϱ, ϱ)` at `tau = νW(t)`, or zero when the nonlinearity is suppressed.
    pub fn nonlinear(&self, rho: &SpectralField, tau: f64) -> Result<SpectralField> {
        if self.icfg.suppress_nonlinear {
            return Ok(SpectralField::zeros(*rho.lattice()));
        }
        self.bilinear.apply(rho, rho, tau, self.icfg.convolution, self.icfg.overflow_cap)
    }

    /// Advances one step of size `dt` along the path grid.
    pub fn step(&self, state: &SimState, path: &BrownianPath) -> Result<SimState> {
        let dt = self.icfg.dt;
        let t1 = state.t + dt;
        let tau0 = self.cfg.nu * path.value_at(state.t)?;
        let tau1 = self.cfg.nu * path.value_at(t1)?;
        let rho = &state.rho;
        let b0 = self.nonlinear(rho, tau0)?;
        let euler = apply_factors(&rho.add_scaled(&b0, -dt)?, &self.propagator);
        let mut next = match self.icfg.scheme {
            Scheme::ExpEuler => euler,
            Scheme::ExpHeun => {
                let b1 = self.nonlinear(&euler, tau1)?;
                let eb0 = apply_factors(&b0, &self.propagator);
                apply_factors(rho, &self.propagator).add_scaled(&eb0.add_scaled(&b1, 1.0)?, -0.5 * dt)?
            }
        };
        if self.icfg.enforce_zero_mode {
            let z = next.lattice().zero_index();
            next.coeffs_mut()[z] = Complex64::new(0.0, 0.0);
        }
        Ok(SimState { t: t1, rho: next, nu_w: tau1, phi: self.cfg.phi(t1) })
    }
}

/// One step from `state`; builds the operator tables on every call.
pub fn etd_step(state: &SimState, path: &BrownianPath, icfg: &IntegratorConfig, cfg: &ModelConfig) -> Result<SimState> {
    Integrator::new(*state.rho.lattice(), cfg, icfg)?.step(state, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Keep every `snapshot_stride`-th state (the initial and final states are always kept).
    pub snapshot_stride: usize,
    pub schedules: Vec<NormSchedule>,
    /// Stop when the l¹ coefficient norm or a tracked norm grows by this factor.
    pub blowup_factor: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { snapshot_stride: 1, schedules: Vec::new(), blowup_factor: DEFAULT_BLOWUP_FACTOR }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// A monitored norm exceeded the blowup factor (or stopped being finite) at time `t`.
    Blowup { t: f64, growth: f64, norm: String },
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub snapshots: Vec<SimState>,
    /// One series per requested schedule, sampled at the snapshots.
    pub series: Vec<NormSeries>,
    pub termination: Termination,
    /// First grid time where `φ − νW < 0`, if any.
    pub barrier_violation: Option<f64>,
    pub steps: usize,
}

impl SimOutput {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    pub fn last(&self) -> &SimState {
        self.snapshots.last().expect("at least the initial state")
    }
}

/// Number of steps of size `dt` that exactly reach `horizon`.
pub fn steps_to(horizon: f64, dt: f64) -> Result<usize> {
    let n = (horizon / dt).round();
    if !(horizon >= 0.0) || (n * dt - horizon).abs() > 1e-9 * horizon.max(dt) {
        return Err(Error::InvalidParameter(format!("horizon {horizon} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

fn l1(rho: &SpectralField) -> f64 {
    fourier_lebesgue_norm(rho, 0.0, Summability::Finite(1.0)).unwrap_or(f64::INFINITY)
}

/// Integrates from `rho0` at `t = 0` to `horizon` along `path`.
pub fn simulate(
    rho0: &SpectralField,
    path: &BrownianPath,
    horizon: f64,
    icfg: &IntegratorConfig,
    cfg: &ModelConfig,
    opts: &SimOptions,
) -> Result<SimOutput> {
    let integrator = Integrator::new(*rho0.lattice(), cfg, icfg)?;
    simulate_with(&integrator, rho0, path, horizon, opts)
}

/// [`simulate`] with a prepared integrator.
pub fn simulate_with(
    integrator: &Integrator,
    rho0: &SpectralField,
    path: &BrownianPath,
    horizon: f64,
    opts: &SimOptions,
) -> Result<SimOutput> {
    let cfg = integrator.config();
    let dt = integrator.integrator_config().dt;
    if rho0.zero_mode().norm() != 0.0 {
        return Err(Error::InvalidParameter("initial perturbation must have zero mean".into()));
    }
    if rho0.lattice() != integrator.lattice() {
        return Err(Error::LatticeMismatch {
            left: format!("{:?}", rho0.lattice()),
            right: format!("{:?}", integrator.lattice()),
        });
    }
    let n = steps_to(horizon, dt)?;
    if path.horizon() < horizon * (1.0 - 1e-12) {
        return Err(Error::PathTooShort(horizon));
    }
    let stride = opts.snapshot_stride.max(1);
    let mut series: Vec<NormSeries> = opts.schedules.iter().map(NormSeries::for_schedule).collect();
    let mut state = SimState::new(0.0, rho0.clone(), path, cfg)?;
    let base0 = l1(rho0);
    let mut initial_norms = Vec::with_capacity(series.len());
    for (sched, ser) in opts.schedules.iter().zip(series.iter_mut()) {
        let v = sched.evaluate(&state.rho, state.t, cfg)?;
        ser.push(state.t, v);
        initial_norms.push(v);
    }
    let mut snapshots = vec![state.clone()];
    let mut barrier_violation = (state.barrier_gap() < 0.0).then_some(0.0);
    let mut termination = Termination::Completed;
    let mut steps = 0;
    for step in 1..=n {
        let mut next = integrator.step(&state, path)?;
        next.t = step as f64 * dt;
        steps = step;
        if barrier_violation.is_none() && next.barrier_gap() < 0.0 {
            barrier_violation = Some(next.t);
        }
        let base = l1(&next.rho);
        let mut blown = None;
        if !base.is_finite() || (base0 > 0.0 && base > opts.blowup_factor * base0) {
            blown = Some((base / base0, "l1".to_string()));
        }
        let keep = step % stride == 0 || step == n || blown.is_some();
        if keep {
            for ((sched, ser), &v0) in opts.schedules.iter().zip(series.iter_mut()).zip(&initial_norms) {
                let v = match sched.evaluate(&next.rho, next.t, cfg) {
                    Ok(v) => v,
                    Err(Error::OverflowRisk { .. }) if blown.is_some() => continue,
                    Err(e) => return Err(e),
                };
                ser.push(next.t, v);
                if blown.is_none() && (!v.is_finite() || (v0 > 0.0 && v > opts.blowup_factor * v0)) {
                    blown = Some((v / v0, ser.label.clone()));
                }
            }
            snapshots.push(next.clone());
        }
        state = next;
        if let Some((growth, norm)) = blown {
            termination = Termination::Blowup { t: state.t, growth, norm };
            break;
        }
    }
    Ok(SimOutput { snapshots, series, termination, barrier_violation, steps })
}
