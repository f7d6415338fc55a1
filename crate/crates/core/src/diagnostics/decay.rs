use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::series::NormSeries;
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::spectral::{gevrey_norm, GevreyNormSpec, SpectralField};

/// Minimum number of samples for a decay fit.
pub const MIN_FIT_SAMPLES: usize = 10;
/// Relative slack of the monotonicity check.
pub const MONOTONE_REL_TOL: f64 = 1e-10;
/// Confidence level of the reported rate interval.
pub const FIT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Least-squares slope of `ln(norm)` against time.
    pub rate: f64,
    pub intercept: f64,
    pub std_error: f64,
    /// Two-sided Student-t interval for the slope.
    pub ci: (f64, f64),
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fits `ln(norm(t)) ≈ intercept + rate · t` on the samples with `t ∈ [lo, hi]`.
pub fn fit_decay(series: &NormSeries, window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    let (first, last) = match (series.times.first(), series.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::InsufficientSamples { found: 0, required: MIN_FIT_SAMPLES }),
    };
    if !(lo <= hi) || lo < first - 1e-12 || hi > last + 1e-12 {
        return Err(Error::InvalidParameter(format!("window [{lo}, {hi}] outside series range [{first}, {last}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(&series.values) {
        if t < lo || t > hi {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveNorm { t });
        }
        xs.push(t);
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples { found: n, required: MIN_FIT_SAMPLES });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - rate * x).powi(2)).sum();
    let std_error = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .inverse_cdf(0.5 + FIT_CONFIDENCE / 2.0);
    Ok(DecayFit {
        rate,
        intercept,
        std_error,
        ci: (rate - t * std_error, rate + t * std_error),
        window,
        samples: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    pub previous: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityVerdict {
    pub monotone: bool,
    pub first_violation: Option<Violation>,
}

/// Nonincreasing up to relative slack [`MONOTONE_REL_TOL`].
pub fn monotonicity_check(series: &NormSeries) -> MonotonicityVerdict {
    for i in 1..series.len() {
        let (prev, v) = (series.values[i - 1], series.values[i]);
        if !(v <= prev * (1.0 + MONOTONE_REL_TOL)) {
            return MonotonicityVerdict {
                monotone: false,
                first_violation: Some(Violation { t: series.times[i], previous: prev, value: v }),
            };
        }
    }
    MonotonicityVerdict { monotone: true, first_violation: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeVerdict {
    pub holds: bool,
    /// Largest `norm(t) / (e^{-ζt/2} norm(0))`.
    pub max_ratio: f64,
    pub worst_time: f64,
}

/// Checks `norm(t) <= e^{-ζ t / 2} norm(0) (1 + tol)` at every sample.
pub fn decay_envelope_check(series: &NormSeries, zeta: f64, tol: f64) -> EnvelopeVerdict {
    let (t0, n0) = match (series.times.first(), series.values.first()) {
        (Some(&t), Some(&v)) => (t, v),
        _ => return EnvelopeVerdict { holds: true, max_ratio: 0.0, worst_time: 0.0 },
    };
    let mut max_ratio: f64 = 0.0;
    let mut worst_time = t0;
    for (&t, &v) in series.times.iter().zip(&series.values) {
        let bound = (-0.5 * zeta * (t - t0)).exp() * n0;
        let ratio = if bound > 0.0 { v / bound } else if v == 0.0 { 0.0 } else { f64::INFINITY };
        if ratio > max_ratio || ratio.is_nan() {
            max_ratio = ratio;
            worst_time = t;
        }
    }
    EnvelopeVerdict { holds: max_ratio <= 1.0 + tol, max_ratio, worst_time }
}

/// `ζ / (2 C |M|) − ||e^{a A^{1/2}} ϱ||`, positive inside the persistence regime.
pub fn smallness_margin(
    rho: &SpectralField,
    spec: &GevreyNormSpec,
    cfg: &ModelConfig,
    zeta: f64,
    smallness_constant: f64,
) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::InvalidParameter(format!("smallness margin needs zeta > 0, got {zeta}")));
    }
    if !(smallness_constant > 0.0) {
        return Err(Error::InvalidParameter("smallness constant must be > 0".into()));
    }
    Ok(smallness_threshold(cfg, zeta, smallness_constant) - gevrey_norm(rho, spec)?)
}

/// `ζ / (2 C |M|)`.
pub fn smallness_threshold(cfg: &ModelConfig, zeta: f64, smallness_constant: f64) -> f64 {
    zeta / (2.0 * smallness_constant * cfg.matrix_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::config;
    use crate::model::InteractionMatrix;
    use crate::spectral::{Lattice, Summability};

    fn synthetic(rate: f64, c: f64) -> NormSeries {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let values = times.iter().map(|t| c * (rate * t).exp()).collect();
        NormSeries::from_parts("s", times, values).unwrap()
    }

    #[test]
    fn exact_exponential() {
        let fit = fit_decay(&synthetic(-0.2, 3.0), (0.0, 9.8)).unwrap();
        assert!((fit.rate + 0.2).abs() < 1e-12);
        assert!(fit.ci.0 <= fit.rate && fit.rate <= fit.ci.1);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        let mut s = synthetic(-0.2, 1.0);
        assert!(matches!(fit_decay(&s, (0.0, 1.0)), Err(Error::InsufficientSamples { .. })));
        s.values[3] = 0.0;
        assert!(matches!(fit_decay(&s, (0.0, 9.8)), Err(Error::NonPositiveNorm { .. })));
        assert!(fit_decay(&s, (0.0, 20.0)).is_err());
    }

    #[test]
    fn monotonicity() {
        let zero = NormSeries::from_parts("z", vec![0.0, 1.0, 2.0], vec![0.0; 3]).unwrap();
        assert!(monotonicity_check(&zero).monotone);
        assert!(monotonicity_check(&synthetic(-0.1, 1.0)).monotone);
        let up = NormSeries::from_parts("u", vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.7]).unwrap();
        let v = monotonicity_check(&up);
        assert!(!v.monotone);
        assert_eq!(v.first_violation.unwrap().t, 2.0);
    }

    #[test]
    fn envelope() {
        let s = synthetic(-0.3, 2.0);
        assert!(decay_envelope_check(&s, 0.5, 0.0).holds);
        assert!(!decay_envelope_check(&s, 0.7, 0.05).holds);
    }

    #[test]
    fn margin_formula() {
        let cfg = config(1, InteractionMatrix::scalar(-2.0), 2.0, 1.0, 1.0, 0.1);
        let lat = Lattice::new(1, 4).unwrap();
        let spec = GevreyNormSpec::new(0.1, 0.9, Summability::Finite(1.0), 1.0).unwrap();
        let zero = SpectralField::zeros(lat);
        let m1 = smallness_margin(&zero, &spec, &cfg, 0.5, 1.0).unwrap();
        assert!((m1 - 0.125).abs() < 1e-15);
        let m2 = smallness_margin(&zero, &spec, &cfg, 0.5, 2.0).unwrap();
        assert_eq!(m2, m1 / 2.0);
        assert!(smallness_margin(&zero, &spec, &cfg, -0.5, 1.0).is_err());
    }
}
