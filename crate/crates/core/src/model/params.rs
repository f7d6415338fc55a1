use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ModelConfig;
use crate::error::{Error, Result};
use crate::spectral::{mode_norm, Mode};

/// Default certified bracket width for `ζ`.
pub const DEFAULT_ZETA_TOL: f64 = 1e-9;

/// Sign with which the kernel term enters the `ζ` infimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSign {
    /// `ν²/2 - β|k|^{-s} - Re(g^(k) |k|^{-2s} (k·Mk))`, matching the per-mode
    /// dissipation estimate. This is the default everywhere.
    Minus,
    /// The same expression with `+` in front of the kernel term.
    Plus,
}

/// Certified enclosure of `ζ = inf_{k != 0} (...)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaBracket {
    /// Point value: the smallest enumerated value, or the large-`|k|` limit `ν²/2` if smaller.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Smallest `|k|` at which `value` is attained on the lattice, if it is.
    pub attained_at: Option<f64>,
    /// Euclidean enumeration radius `K*`.
    pub radius: i64,
}

impl ZetaBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Derived scalar parameters of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub zeta: ZetaBracket,
    /// `ζ` with the opposite sign convention for the kernel term, reported for comparison.
    pub zeta_alt_sign: ZetaBracket,
    pub lambda: f64,
    pub k0: f64,
    /// `P(Ω_{α,β,ν})`, absent when one of `α, β, ν` is not positive.
    pub omega_prob: Option<f64>,
    /// Enumeration radius `K*` used for `ζ`.
    pub search_radius: i64,
}

/// `ζ` summand at a nonzero mode.
#[inline]
pub fn zeta_summand(cfg: &ModelConfig, k: Mode, sign: KernelSign) -> f64 {
    let norm = mode_norm(k);
    let kernel = cfg.kernel_term(k).re * norm.powf(-2.0 * cfg.s);
    let base = 0.5 * cfg.nu * cfg.nu - cfg.beta * norm.powf(-cfg.s);
    match sign {
        KernelSign::Minus => base - kernel,
        KernelSign::Plus => base + kernel,
    }
}

/// `β|k|^s + Re(g^(k) (Mk·k)) - ν²|k|^{2s}/2`, the growth exponent of a
/// Gevrey-weighted mode under the linear flow.
#[inline]
pub fn weighted_growth(cfg: &ModelConfig, k: Mode) -> f64 {
    if k == [0, 0] {
        return 0.0;
    }
    let ks = mode_norm(k).powf(cfg.s);
    cfg.beta * ks + cfg.kernel_term(k).re - 0.5 * cfg.nu * cfg.nu * ks * ks
}

fn tail_exponent(cfg: &ModelConfig) -> Result<f64> {
    let e = 2.0 * cfg.s - 2.0 + cfg.kernel.gamma();
    if e > 0.0 {
        Ok(e)
    } else {
        Err(Error::TailNotControllable { two_s: 2.0 * cfg.s, required: 2.0 - cfg.kernel.gamma() })
    }
}

/// `C_g · mass · |M_sym|`, bounding `|Re g^(k) (k·Mk)| <= coeff · |k|^{2-γ}`.
fn kernel_tail_coeff(cfg: &ModelConfig) -> f64 {
    cfg.kernel.bound_constant() * cfg.mass * cfg.matrix.symmetric_part_norm()
}

/// Minimum of `f` over `0 < |k| <= radius`, with the smallest `|k|` attaining it.
fn ball_min(cfg: &ModelConfig, radius: i64, f: impl Fn(Mode) -> f64 + Sync) -> (f64, f64) {
    let r2 = radius * radius;
    let rows: Vec<i64> = (-radius..=radius).collect();
    let inner = if cfg.d == 1 { 0 } else { radius };
    rows.par_iter()
        .map(|&a| {
            let mut best = (f64::INFINITY, f64::INFINITY);
            for b in -inner..=inner {
                if (a == 0 && b == 0) || a * a + b * b > r2 {
                    continue;
                }
                let k = [a, b];
                let v = f(k);
                let n = mode_norm(k);
                if v < best.0 || (v == best.0 && n < best.1) {
                    best = (v, n);
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, f64::INFINITY),
            |x, y| if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
        )
}

/// Bracket for `ζ` from exact enumeration of `0 < |k| <= radius` plus the tail bound
/// `β|k|^{-s} + C_g|M_sym||k|^{-(2s-2+γ)}` beyond it.
pub fn zeta_with_radius(cfg: &ModelConfig, radius: i64, sign: KernelSign) -> Result<ZetaBracket> {
    cfg.validate()?;
    let tail_exp = tail_exponent(cfg)?;
    if radius < 1 {
        return Err(Error::InvalidParameter("search radius must be >= 1".into()));
    }
    if let Some(r) = cfg.kernel.evaluable_radius() {
        if radius > r {
            return Err(Error::InvalidParameter(format!("search radius {radius} exceeds kernel table radius {r}")));
        }
    }
    let (m_fin, at) = ball_min(cfg, radius, |k| zeta_summand(cfg, k, sign));
    let rf = radius as f64;
    let limit = 0.5 * cfg.nu * cfg.nu;
    let tail_lower = limit - cfg.beta * rf.powf(-cfg.s) - kernel_tail_coeff(cfg) * rf.powf(-tail_exp);
    let (lower, upper) = if tail_lower >= m_fin {
        (m_fin, m_fin)
    } else {
        (m_fin.min(tail_lower), m_fin.min(limit))
    };
    let attained_at = if upper == m_fin { Some(at) } else { None };
    Ok(ZetaBracket { value: upper, lower, upper, attained_at, radius })
}

fn max_radius(cfg: &ModelConfig) -> i64 {
    if let Some(r) = cfg.kernel.evaluable_radius() {
        return r;
    }
    if cfg.d == 1 {
        1 << 24
    } else {
        1 << 12
    }
}

/// `ζ` with a certified bracket of width at most `tol`.
pub fn compute_zeta(cfg: &ModelConfig, tol: f64) -> Result<ZetaBracket> {
    compute_zeta_signed(cfg, tol, KernelSign::Minus)
}

pub fn compute_zeta_signed(cfg: &ModelConfig, tol: f64, sign: KernelSign) -> Result<ZetaBracket> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be > 0")));
    }
    tail_exponent(cfg)?;
    let cap = max_radius(cfg);
    let mut radius = 8.min(cap);
    loop {
        let bracket = zeta_with_radius(cfg, radius, sign)?;
        if bracket.width() <= tol {
            return Ok(bracket);
        }
        if radius >= cap {
            return Err(Error::BracketNotCertified { width: bracket.width(), tol, radius });
        }
        radius = (radius * 2).min(cap);
    }
}

/// `λ = sup_k (β|k|^s + Re(g^(k) Mk·k) - ν²|k|^{2s}/2)` and `|k0|`, the largest
/// `|k|` at which that expression is nonnegative. Both include `k = 0`.
pub fn compute_lambda_k0(cfg: &ModelConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let tail_exp = tail_exponent(cfg)?;
    if !(cfg.s > 0.0) || cfg.nu == 0.0 {
        return Err(Error::TailNotControllable { two_s: 2.0 * cfg.s, required: cfg.s.max(2.0 - cfg.kernel.gamma()) });
    }
    let coeff = kernel_tail_coeff(cfg);
    let half_nu2 = 0.5 * cfg.nu * cfg.nu;
    // h(R)/R^{2s} is decreasing in R, so negativity at R certifies every |k| > R.
    let ratio = |r: f64| cfg.beta * r.powf(-cfg.s) + coeff * r.powf(-tail_exp) - half_nu2;
    let cap = max_radius(cfg);
    let mut radius = 1i64;
    while ratio(radius as f64) >= 0.0 {
        if radius >= cap {
            return Err(Error::TailNotControllable { two_s: 2.0 * cfg.s, required: 2.0 - cfg.kernel.gamma() });
        }
        radius = (radius * 2).min(cap);
    }
    let r2 = radius * radius;
    let inner = if cfg.d == 1 { 0 } else { radius };
    let mut lambda = 0.0f64;
    let mut k0 = 0.0f64;
    for a in -radius..=radius {
        for b in -inner..=inner {
            if a * a + b * b > r2 {
                continue;
            }
            let v = weighted_growth(cfg, [a, b]);
            lambda = lambda.max(v);
            if v >= 0.0 {
                k0 = k0.max(mode_norm([a, b]));
            }
        }
    }
    Ok((lambda, k0))
}

/// `P(Ω_{α,β,ν}) = 1 - exp(-2αβ/ν²)`.
pub fn omega_probability_closed_form(alpha: f64, beta: f64, nu: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("nu", nu)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
        }
    }
    Ok(-(-2.0 * alpha * beta / (nu * nu)).exp_m1())
}

pub fn compute_derived(cfg: &ModelConfig, tol: f64) -> Result<DerivedParams> {
    let zeta = compute_zeta(cfg, tol)?;
    let zeta_alt_sign = compute_zeta_signed(cfg, tol, KernelSign::Plus)?;
    let (lambda, k0) = compute_lambda_k0(cfg)?;
    Ok(DerivedParams {
        search_radius: zeta.radius,
        zeta,
        zeta_alt_sign,
        lambda,
        k0,
        omega_prob: omega_probability_closed_form(cfg.alpha, cfg.beta, cfg.nu).ok(),
    })
}
