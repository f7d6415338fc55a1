use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::spectral::{gevrey_norm, GevreyNormSpec, SpectralField, Summability};

/// Gevrey radius as a function of time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusRule {
    Fixed(f64),
    /// `φ(t) + shift`.
    Barrier { shift: f64 },
}

impl RadiusRule {
    pub fn at(&self, t: f64, cfg: &ModelConfig) -> f64 {
        match *self {
            Self::Fixed(a) => a,
            Self::Barrier { shift } => cfg.phi(t) + shift,
        }
    }
}

impl fmt::Display for RadiusRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(a) => write!(f, "{a}"),
            Self::Barrier { shift } if *shift == 0.0 => f.write_str("phi"),
            Self::Barrier { shift } => write!(f, "phi+{shift}"),
        }
    }
}

impl FromStr for RadiusRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("bad Gevrey radius rule {s:?}"));
        if let Some(rest) = s.strip_prefix("phi") {
            let rest = rest.trim();
            if rest.is_empty() {
                return Ok(Self::Barrier { shift: 0.0 });
            }
            let shift: f64 = rest.strip_prefix('+').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            if !(shift >= 0.0) {
                return Err(bad());
            }
            return Ok(Self::Barrier { shift });
        }
        let a: f64 = s.parse().map_err(|_| bad())?;
        if !(a >= 0.0 && a.is_finite()) {
            return Err(bad());
        }
        Ok(Self::Fixed(a))
    }
}

/// A Gevrey norm tracked along a simulation, written `<radius>:<kappa>:<r>`,
/// e.g. `phi+0.05:0.9:1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSchedule {
    pub radius: RadiusRule,
    pub kappa: f64,
    pub r: Summability,
}

impl NormSchedule {
    pub fn new(radius: RadiusRule, kappa: f64, r: Summability) -> Self {
        Self { radius, kappa, r }
    }

    /// The norm of the decay statement, radius `φ(t) + ε`.
    pub fn theorem(cfg: &ModelConfig, kappa: f64, r: Summability) -> Self {
        Self::new(RadiusRule::Barrier { shift: cfg.epsilon }, kappa, r)
    }

    pub fn spec_at(&self, t: f64, cfg: &ModelConfig) -> Result<GevreyNormSpec> {
        GevreyNormSpec::new(self.radius.at(t, cfg), self.kappa, self.r, cfg.s)
    }

    pub fn evaluate(&self, rho: &SpectralField, t: f64, cfg: &ModelConfig) -> Result<f64> {
        gevrey_norm(rho, &self.spec_at(t, cfg)?)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NormSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.radius, self.kappa, self.r)
    }
}

impl FromStr for NormSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParameter(format!("norm schedule {s:?} must read <radius>:<kappa>:<r>")));
        }
        let kappa: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad kappa in norm schedule {s:?}")))?;
        Ok(Self { radius: parts[0].parse()?, kappa, r: parts[2].parse()? })
    }
}

impl Serialize for NormSchedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NormSchedule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Values of one norm schedule along a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl NormSeries {
    pub fn new(label: impl Into<String>) -> Self {
        Self { label: label.into(), times: Vec::new(), values: Vec::new() }
    }

    pub fn for_schedule(schedule: &NormSchedule) -> Self {
        Self::new(schedule.label())
    }

    pub fn from_parts(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidParameter("series times and values differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("series times must increase strictly".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("series values must be >= 0".into()));
        }
        Ok(Self { label: label.into(), times, values })
    }

    pub fn push(&mut self, t: f64, value: f64) {
        self.times.push(t);
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { label: self.label.clone(), times: self.times.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}
