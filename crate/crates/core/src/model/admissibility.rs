use serde::{Deserialize, Serialize};

use super::config::ModelConfig;
use super::params::{compute_zeta, ZetaBracket, DEFAULT_ZETA_TOL};
use crate::spectral::Summability;

/// Number of interior grid points searched for the auxiliary exponent `p`.
pub const P_GRID_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Pass,
    Fail,
    NotEvaluated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub status: ConditionStatus,
    pub detail: String,
}

impl Condition {
    fn check(name: &str, ok: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            status: if ok { ConditionStatus::Pass } else { ConditionStatus::Fail },
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == ConditionStatus::Pass
    }
}

/// Inputs of the admissibility check that are not part of [`ModelConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityInput {
    /// Regularity index `σ` of the solution space.
    pub sigma: f64,
    pub r: Summability,
    /// Constant `C` in the smallness requirement `||ϱ⁰|| < ζ / (C |M|)`.
    pub smallness_constant: f64,
    /// Gevrey norm of the initial perturbation, if known.
    pub initial_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub conditions: Vec<Condition>,
    pub zeta: Option<ZetaBracket>,
}

impl AdmissibilityReport {
    /// True when no evaluated condition failed.
    pub fn admissible(&self) -> bool {
        self.conditions.iter().all(|c| c.status != ConditionStatus::Fail)
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Conditions that depend only on `(d, γ, s, σ, r)`.
    pub fn structural_pass(&self) -> bool {
        ["s_window", "sigma_window", "lwp2", "lwp3"]
            .iter()
            .all(|n| self.condition(n).is_some_and(Condition::passed))
    }
}

/// Branch (a)-(d) of the summability condition, returning the branch that holds.
fn lwp2_branch(d: f64, gamma: f64, sigma_s: f64, r: Summability) -> Option<String> {
    let low = 1.0 - gamma <= sigma_s;
    let inv_r = match r {
        Summability::Finite(1.0) => return low.then(|| "r = 1".to_string()),
        Summability::Finite(r) => 1.0 / r,
        Summability::Infinity => 0.0,
    };
    if d * (1.0 - inv_r) < sigma_s && low {
        return Some("p = 1".into());
    }
    if 1.0 - gamma + d * (1.0 - inv_r) < sigma_s {
        return Some("p = r".into());
    }
    // 1/p on an interior grid of (1/r, 1)
    (1..=P_GRID_POINTS).find_map(|i| {
        let inv_p = 1.0 - (1.0 - inv_r) * i as f64 / (P_GRID_POINTS + 1) as f64;
        let a = d * (inv_p - inv_r) < sigma_s;
        let b = 1.0 - gamma + d * (1.0 - inv_p) < sigma_s;
        (a && b).then(|| format!("p = {:.6}", 1.0 / inv_p))
    })
}

/// Evaluates every checkable hypothesis of the well-posedness and decay statements.
pub fn check_admissibility(cfg: &ModelConfig, input: &AdmissibilityInput) -> AdmissibilityReport {
    let s = cfg.s;
    let gamma = cfg.kernel.gamma();
    let sigma = input.sigma;
    let sigma_s = sigma * s;
    let mut conditions = Vec::new();

    let lo = cfg.s_lower_bound();
    conditions.push(Condition::check(
        "s_window",
        cfg.in_s_window(),
        format!("max(1/2, (2-γ)/2) = {lo} < s = {s} <= 1"),
    ));

    let sigma_hi = (2.0 * s - 1.0) / s;
    conditions.push(Condition::check(
        "sigma_window",
        sigma > 0.0 && sigma < sigma_hi && 1.0 - gamma <= sigma_s,
        format!("0 < σ = {sigma} < (2s-1)/s = {sigma_hi}, 1-γ = {} <= σs = {sigma_s}", 1.0 - gamma),
    ));

    let branch = lwp2_branch(cfg.d as f64, gamma, sigma_s, input.r);
    conditions.push(Condition::check(
        "lwp2",
        branch.is_some(),
        match &branch {
            Some(b) => format!("r = {}: holds with {b}", input.r),
            None => format!("r = {}: no admissible p", input.r),
        },
    ));

    let lwp3 = (sigma_s + 1.0) / (2.0 * s);
    conditions.push(Condition::check("lwp3", lwp3 < 1.0, format!("(σs + 1)/(2s) = {lwp3} < 1")));

    let zeta = compute_zeta(cfg, DEFAULT_ZETA_TOL);
    let zeta_ok = zeta.as_ref().ok().copied();
    conditions.push(match &zeta {
        Ok(z) => Condition::check(
            "zeta_positive",
            z.lower > 0.0,
            format!("ζ ∈ [{}, {}]", z.lower, z.upper),
        ),
        Err(e) => Condition::check("zeta_positive", false, e.to_string()),
    });

    let m_norm = cfg.matrix_norm();
    conditions.push(match (input.initial_norm, zeta_ok) {
        (Some(n), Some(z)) => {
            let threshold = if m_norm > 0.0 { z.lower / (input.smallness_constant * m_norm) } else { f64::INFINITY };
            Condition::check(
                "smallness",
                n < threshold,
                format!("||ϱ⁰|| = {n} < ζ/(C|M|) = {threshold} with C = {}", input.smallness_constant),
            )
        }
        _ => Condition {
            name: "smallness".into(),
            status: ConditionStatus::NotEvaluated,
            detail: "initial norm or ζ unavailable".into(),
        },
    });

    AdmissibilityReport { conditions, zeta: zeta_ok }
}
