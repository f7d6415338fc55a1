use std::path::Path;

use gevrey_flow::diagnostics::NormSchedule;
use gevrey_flow::dynamics::{IntegratorConfig, Scheme, SimOptions, DEFAULT_OVERFLOW_CAP};
use gevrey_flow::model::{compute_zeta, InteractionKernel, InteractionMatrix, ModelConfig};
use gevrey_flow::spectral::{ConvolutionPath, Lattice, SpectralField, Summability};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convolution {
    Direct,
    Fast,
    FastDealiased,
}

impl From<Convolution> for ConvolutionPath {
    fn from(c: Convolution) -> Self {
        match c {
            Convolution::Direct => ConvolutionPath::Direct,
            Convolution::Fast => ConvolutionPath::Fast { dealias: false },
            Convolution::FastDealiased => ConvolutionPath::Fast { dealias: true },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialProfile {
    /// `Σ e^{-|k|} (cos k·x + ½ sin k_1 x_1)` over the lattice.
    Analytic,
    /// `cos x_1`.
    SingleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Brownian,
    /// `W ≡ 0`.
    Zero,
}

/// Flat run configuration. Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    /// Lattice cutoff `K`, modes `|k|_inf <= K`.
    pub cutoff: i64,
    pub s: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub mass: f64,
    /// Kernel `amplitude · |k|^{-gamma}`.
    pub gamma: f64,
    pub kernel_amplitude: f64,
    /// Rows of the interaction matrix.
    pub matrix: Vec<Vec<f64>>,

    pub dt: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    pub convolution: Convolution,
    pub overflow_cap: f64,
    pub enforce_zero_mode: bool,
    pub blowup_factor: f64,
    pub snapshot_stride: usize,

    /// Tracked norms, `<radius>:<kappa>:<r>` with radius a number, `phi` or `phi+<shift>`.
    pub norms: Vec<NormSchedule>,
    /// Regularity index of the decay statement's norm.
    pub sigma: f64,
    pub r: Summability,
    pub smallness_constant: f64,

    pub initial_profile: InitialProfile,
    /// Norm of the initial data in the decay statement's norm; defaults to `0.1 ζ / (C |M|)`.
    pub initial_norm: Option<f64>,

    pub seed: u64,
    pub n_paths: usize,
    pub path: PathKind,
    /// Keep only paths that stay below the barrier up to `omega_check_horizon`.
    pub condition_on_omega: bool,
    pub omega_check_horizon: f64,
    pub max_path_attempts: u64,
    pub mc_paths: usize,
    pub mc_dt: f64,
    pub mc_horizon: f64,

    pub envelope_tol: f64,
    /// Allowed excess of the fitted rate over `-ζ/2`, in units of `ζ`.
    pub rate_slack: f64,
    pub picard_iter: usize,
    pub picard_quad: usize,
    pub picard_horizon: f64,
    pub picard_tol: f64,
    pub n_fields: usize,
    pub bound_samples: usize,
    pub oracle_fields: usize,
    pub oracle_tol: f64,
    pub rescale_factor: f64,
    pub rescale_horizon: f64,
    pub rescale_tol: f64,

    /// Report file name inside the output directory; defaults to `<command>.json`.
    pub json: Option<String>,
    /// Prefix of the per-path CSV files.
    pub csv: String,
    /// Write every `dump_stride`-th snapshot to a binary field dump; 0 disables dumps.
    pub dump_stride: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 1,
            cutoff: 32,
            s: 1.0,
            nu: 1.0,
            alpha: 0.1,
            beta: 0.1,
            epsilon: 0.05,
            mass: 1.0,
            gamma: 2.0,
            kernel_amplitude: 1.0,
            matrix: vec![vec![-1.0]],
            dt: 1e-3,
            horizon: 10.0,
            scheme: Scheme::ExpHeun,
            convolution: Convolution::Direct,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
            enforce_zero_mode: true,
            blowup_factor: 1e8,
            snapshot_stride: 100,
            norms: vec![],
            sigma: 0.9,
            r: Summability::Finite(1.0),
            smallness_constant: 1.0,
            initial_profile: InitialProfile::Analytic,
            initial_norm: None,
            seed: 0,
            n_paths: 20,
            path: PathKind::Brownian,
            condition_on_omega: true,
            omega_check_horizon: 240.0,
            max_path_attempts: 1_000_000,
            mc_paths: 20_000,
            mc_dt: 1e-3,
            mc_horizon: 1.0,
            envelope_tol: 0.05,
            rate_slack: 0.05,
            picard_iter: 12,
            picard_quad: 4000,
            picard_horizon: 0.1,
            picard_tol: 1e-6,
            n_fields: 1000,
            bound_samples: 500,
            oracle_fields: 100,
            oracle_tol: 1e-10,
            rescale_factor: 4.0,
            rescale_horizon: 2.0,
            rescale_tol: 1e-5,
            json: None,
            csv: "series".into(),
            dump_stride: 0,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => bad(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks every derived sub-configuration.
    pub fn validate(&self) -> Result<(), CliError> {
        self.model()?;
        self.lattice()?;
        self.integrator().validate().map_err(|e| bad(format!("integrator: {e}")))?;
        let positive = [
            ("horizon", self.horizon),
            ("mc_dt", self.mc_dt),
            ("mc_horizon", self.mc_horizon),
            ("picard_horizon", self.picard_horizon),
            ("rescale_factor", self.rescale_factor),
            ("rescale_horizon", self.rescale_horizon),
            ("blowup_factor", self.blowup_factor - 1.0),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(format!("{key} must be positive and finite")));
            }
        }
        if self.snapshot_stride == 0 || self.n_paths == 0 || self.picard_quad == 0 {
            return Err(bad("snapshot_stride, n_paths and picard_quad must be >= 1"));
        }
        if self.omega_check_horizon < self.horizon {
            return Err(bad("omega_check_horizon must be >= horizon"));
        }
        if let Some(n) = self.initial_norm {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(bad("initial_norm must be >= 0"));
            }
        }
        if self.csv.is_empty() || self.csv.contains(['/', '\\']) {
            return Err(bad("csv must be a plain file prefix"));
        }
        if let Some(j) = &self.json {
            if j.is_empty() || j.contains(['/', '\\']) {
                return Err(bad("json must be a plain file name"));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<ModelConfig, CliError> {
        let matrix = InteractionMatrix::new(self.d, &self.matrix).map_err(|e| bad(format!("matrix: {e}")))?;
        let kernel = InteractionKernel::power_law_scaled(self.gamma, self.kernel_amplitude)
            .map_err(|e| bad(format!("gamma/kernel_amplitude: {e}")))?;
        let cfg = ModelConfig {
            d: self.d,
            s: self.s,
            nu: self.nu,
            alpha: self.alpha,
            beta: self.beta,
            epsilon: self.epsilon,
            mass: self.mass,
            matrix,
            kernel,
        };
        cfg.validate().map_err(|e| bad(format!("model: {e}")))?;
        Ok(cfg)
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        Lattice::new(self.d, self.cutoff).map_err(|e| bad(format!("d/cutoff: {e}")))
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt,
            scheme: self.scheme,
            convolution: self.convolution.into(),
            overflow_cap: self.overflow_cap,
            enforce_zero_mode: self.enforce_zero_mode,
            suppress_nonlinear: false,
        }
    }

    /// The norm of the decay statement, radius `φ(t) + ε`.
    pub fn theorem_norm(&self, model: &ModelConfig) -> NormSchedule {
        NormSchedule::theorem(model, self.sigma, self.r)
    }

    /// The decay statement's norm followed by the user's extra norms.
    pub fn schedules(&self, model: &ModelConfig) -> Vec<NormSchedule> {
        let theorem = self.theorem_norm(model);
        std::iter::once(theorem).chain(self.norms.iter().copied().filter(|n| *n != theorem)).collect()
    }

    pub fn sim_options(&self, model: &ModelConfig) -> SimOptions {
        SimOptions {
            snapshot_stride: self.snapshot_stride,
            schedules: self.schedules(model),
            blowup_factor: self.blowup_factor,
        }
    }

    /// Target norm of the initial data.
    pub fn initial_target(&self, model: &ModelConfig) -> Result<f64, CliError> {
        if let Some(n) = self.initial_norm {
            return Ok(n);
        }
        let zeta = compute_zeta(model, 1e-9)
            .map_err(|e| bad(format!("initial_norm not given and ζ unavailable: {e}")))?;
        let m = model.matrix_norm();
        if !(zeta.value > 0.0) || m == 0.0 {
            return Err(bad(format!("initial_norm not given and 0.1 ζ/(C|M|) is not positive (ζ = {})", zeta.value)));
        }
        Ok(0.1 * zeta.value / (self.smallness_constant * m))
    }

    /// Zero-mean initial perturbation scaled to [`Self::initial_target`].
    pub fn initial_field(&self, model: &ModelConfig) -> Result<SpectralField, CliError> {
        let lattice = self.lattice()?;
        let target = self.initial_target(model)?;
        let base = match self.initial_profile {
            InitialProfile::Analytic => SpectralField::from_fn(lattice, true, |k| {
                let n = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
                if n == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(1.0, -0.25 * k[0].signum() as f64) * (-n).exp()
                }
            }),
            InitialProfile::SingleMode => SpectralField::from_fn(lattice, true, |k| {
                if k[0].abs() == 1 && k[1] == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
        .map_err(|e| bad(format!("initial data: {e}")))?;
        let norm = self.theorem_norm(model).evaluate(&base, 0.0, model).map_err(|e| bad(format!("initial data: {e}")))?;
        Ok(base.scaled(target / norm))
    }
}
