use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{SpectralField, HERMITIAN_TOL};
use super::lattice::{mode_norm, Mode};
use crate::error::{Error, Result};

/// Largest admissible exponent of `e` in any weight or multiplier.
pub const EXP_GUARD: f64 = 700.0;

/// Summability exponent `r` of an `l^r` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Summability {
    Finite(f64),
    Infinity,
}

impl Summability {
    pub fn finite(r: f64) -> Result<Self> {
        if r.is_finite() && r >= 1.0 {
            Ok(Self::Finite(r))
        } else {
            Err(Error::InvalidParameter(format!("summability exponent {r} must be in [1, inf)")))
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Self::Finite(r) => *r,
            Self::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Summability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(r) => write!(f, "{r}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Summability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinity),
            other => {
                let r: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad summability exponent {other:?}")))?;
                Self::finite(r)
            }
        }
    }
}

impl Serialize for Summability {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(r) => serializer.serialize_f64(*r),
            Self::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Summability {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(r) => Summability::finite(r).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Parameters of the Gevrey norm `|| e^{a |∇|^s} f ||` in `W^{κ s, r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyNormSpec {
    pub a: f64,
    pub kappa: f64,
    pub r: Summability,
    pub s: f64,
}

impl GevreyNormSpec {
    pub fn new(a: f64, kappa: f64, r: Summability, s: f64) -> Result<Self> {
        let spec = Self { a, kappa, r, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter(format!("Gevrey radius a = {} must be >= 0", self.a)));
        }
        if !self.kappa.is_finite() {
            return Err(Error::InvalidParameter("kappa must be finite".into()));
        }
        if !(self.s > 0.5 && self.s <= 1.0) {
            return Err(Error::InvalidParameter(format!("fractional order s = {} not in (1/2, 1]", self.s)));
        }
        if let Summability::Finite(r) = self.r {
            Summability::finite(r)?;
        }
        Ok(())
    }
}

/// `|k|^exponent` with the zero-mode convention `|0|^0 = 1`, `|0|^{>0} = 0`.
/// Returns `None` for a negative exponent at `k = 0`.
#[inline]
pub fn symbol_power(k: Mode, exponent: f64) -> Option<f64> {
    if k == [0, 0] {
        if exponent > 0.0 {
            Some(0.0)
        } else if exponent == 0.0 {
            Some(1.0)
        } else {
            None
        }
    } else {
        Some(mode_norm(k).powf(exponent))
    }
}

/// `l^r` norm of nonnegative terms, rescaled by the largest term so large `r` cannot overflow.
pub(crate) fn lr_norm(terms: &[f64], r: Summability) -> f64 {
    let max = terms.iter().copied().fold(0.0, f64::max);
    match r {
        Summability::Infinity => max,
        Summability::Finite(_) if max == 0.0 => 0.0,
        Summability::Finite(1.0) => terms.iter().sum(),
        Summability::Finite(r) => max * terms.iter().map(|t| (t / max).powf(r)).sum::<f64>().powf(1.0 / r),
    }
}

fn weighted_norm(f: &SpectralField, exponent: f64, r: Summability, radius: f64, s: f64) -> Result<f64> {
    let lat = f.lattice();
    let mut terms = Vec::with_capacity(lat.len());
    for (i, c) in f.coeffs().iter().enumerate() {
        let k = lat.mode(i);
        let w = match symbol_power(k, exponent) {
            Some(w) => w,
            None if c.norm() == 0.0 => 0.0,
            None => return Err(Error::ZeroModeSingularity { exponent }),
        };
        let gevrey = if radius == 0.0 { 1.0 } else { (radius * mode_norm(k).powf(s)).exp() };
        terms.push(w * gevrey * c.norm());
    }
    Ok(lr_norm(&terms, r))
}

/// Fourier-Lebesgue norm `|| |k|^exponent f^(k) ||_{l^r}`.
pub fn fourier_lebesgue_norm(f: &SpectralField, exponent: f64, r: Summability) -> Result<f64> {
    weighted_norm(f, exponent, r, 0.0, 1.0)
}

/// Gevrey norm `|| e^{a |k|^s} f^(k) ||` in the Fourier-Lebesgue space of order `κ s`.
pub fn gevrey_norm(f: &SpectralField, spec: &GevreyNormSpec) -> Result<f64> {
    spec.validate()?;
    let exponent = spec.a * f.lattice().max_norm().powf(spec.s);
    if exponent > EXP_GUARD {
        return Err(Error::OverflowRisk { exponent, cap: EXP_GUARD });
    }
    weighted_norm(f, spec.kappa * spec.s, spec.r, spec.a, spec.s)
}

/// Pointwise product with a Fourier symbol.
///
/// The output is flagged real when the input is and the symbol satisfies
/// `m(-k) = conj(m(k))` on the lattice.
pub fn apply_multiplier(f: &SpectralField, m: impl Fn(Mode) -> Complex64) -> Result<SpectralField> {
    let lat = *f.lattice();
    let symbols: Vec<Complex64> = lat.modes().map(&m).collect();
    for (i, v) in symbols.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite { mode: lat.mode(i) });
        }
    }
    let coeffs = f.coeffs().iter().zip(&symbols).map(|(c, v)| c * v).collect();
    let real = f.is_real() && {
        let scale = symbols.iter().map(|v| v.norm()).fold(f64::MIN_POSITIVE, f64::max);
        (0..lat.len()).all(|i| (symbols[i] - symbols[lat.neg_index(i)].conj()).norm() <= HERMITIAN_TOL * scale)
    };
    Ok(SpectralField::from_raw(lat, coeffs, real))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Lattice;
    use std::f64::consts::{E, PI};

    fn cosine() -> SpectralField {
        let mut f = SpectralField::zeros(Lattice::new(1, 3).unwrap());
        f.set_coeff([1, 0], Complex64::new(PI, 0.0)).unwrap();
        f
    }

    #[test]
    fn constant_has_zero_positive_order_norm() {
        let f = SpectralField::constant(Lattice::new(2, 3).unwrap(), 1.0);
        assert_eq!(fourier_lebesgue_norm(&f, 1.0, Summability::Finite(1.0)).unwrap(), 0.0);
        let spec = GevreyNormSpec::new(0.7, 0.5, Summability::Finite(2.0), 1.0).unwrap();
        assert_eq!(gevrey_norm(&f, &spec).unwrap(), 0.0);
        assert!((fourier_lebesgue_norm(&f, 0.0, Summability::Finite(1.0)).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn cosine_norms() {
        let f = cosine();
        let n = fourier_lebesgue_norm(&f, 0.0, Summability::Finite(1.0)).unwrap();
        assert!((n - 2.0 * PI).abs() < 1e-14);
        let spec = GevreyNormSpec::new(1.0, 0.0, Summability::Finite(1.0), 1.0).unwrap();
        let g = gevrey_norm(&f, &spec).unwrap();
        assert!((g - 2.0 * PI * E).abs() < 1e-12);
        assert!((g - 17.07946844).abs() < 1e-7);
        assert!((fourier_lebesgue_norm(&f, 3.0, Summability::Infinity).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn negative_exponent_needs_zero_mean() {
        let f = SpectralField::constant(Lattice::new(1, 2).unwrap(), 1.0);
        assert!(matches!(
            fourier_lebesgue_norm(&f, -0.5, Summability::Finite(2.0)),
            Err(Error::ZeroModeSingularity { .. })
        ));
        assert!(fourier_lebesgue_norm(&cosine(), -0.5, Summability::Finite(2.0)).is_ok());
    }

    #[test]
    fn overflow_guard() {
        let f = SpectralField::zeros(Lattice::new(1, 100).unwrap());
        let spec = GevreyNormSpec::new(7.5, 0.0, Summability::Finite(1.0), 1.0).unwrap();
        assert!(matches!(gevrey_norm(&f, &spec), Err(Error::OverflowRisk { .. })));
    }

    #[test]
    fn multiplier_identity_and_modulus() {
        let f = cosine();
        let id = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(id, f);
        let grad = apply_multiplier(&f, |k| Complex64::new(mode_norm(k), 0.0)).unwrap();
        assert_eq!(grad.coeff([1, 0]).unwrap().norm(), PI);
        assert!(grad.is_real());
        let odd = apply_multiplier(&f, |k| Complex64::new(0.0, k[0] as f64)).unwrap();
        assert!(odd.is_real(), "i k is a Hermitian symbol");
        let skew = apply_multiplier(&f, |k| Complex64::new(k[0] as f64, 0.0)).unwrap();
        assert!(!skew.is_real());
    }

    #[test]
    fn summability_parsing() {
        assert_eq!("inf".parse::<Summability>().unwrap(), Summability::Infinity);
        assert_eq!("2".parse::<Summability>().unwrap(), Summability::Finite(2.0));
        assert!("0.5".parse::<Summability>().is_err());
        let v: Summability = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(v, Summability::Infinity);
        let v: Summability = serde_json::from_str("1.5").unwrap();
        assert_eq!(v, Summability::Finite(1.5));
    }
}
