//! Cooling schedules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::NumericError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleKind {
    Constant,
    Geometric,
}

/// Temperature trajectory `T(k)` for `k` in `0..total_steps`.
///
/// Geometric schedules interpolate exponentially between the end points,
/// `T(k) = t_start * (t_end / t_start)^(k / (total_steps - 1))`, so both end
/// points are hit exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingSchedule {
    kind: ScheduleKind,
    t_start: f64,
    t_end: f64,
    total_steps: usize,
}

impl CoolingSchedule {
    pub fn constant(temperature: f64, total_steps: usize) -> Result<Self, NumericError> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(NumericError::InvalidSchedule(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        if total_steps == 0 {
            return Err(NumericError::InvalidSchedule(
                "schedule needs at least one step".into(),
            ));
        }
        Ok(Self {
            kind: ScheduleKind::Constant,
            t_start: temperature,
            t_end: temperature,
            total_steps,
        })
    }

    pub fn geometric(t_start: f64, t_end: f64, total_steps: usize) -> Result<Self, NumericError> {
        for t in [t_start, t_end] {
            if !(t.is_finite() && t > 0.0) {
                return Err(NumericError::InvalidSchedule(format!(
                    "temperatures must be positive and finite, got {t}"
                )));
            }
        }
        if t_start < t_end {
            return Err(NumericError::InvalidSchedule(format!(
                "schedule must be non-increasing, got {t_start} -> {t_end}"
            )));
        }
        if total_steps < 2 {
            return Err(NumericError::InvalidSchedule(
                "geometric schedule needs at least two steps".into(),
            ));
        }
        Ok(Self {
            kind: ScheduleKind::Geometric,
            t_start,
            t_end,
            total_steps,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    pub fn temperature_at(&self, k: usize) -> Result<f64, NumericError> {
        if k >= self.total_steps {
            return Err(NumericError::StepOutOfRange {
                step: k,
                total: self.total_steps,
            });
        }
        Ok(match self.kind {
            ScheduleKind::Constant => self.t_start,
            ScheduleKind::Geometric => {
                if k == self.total_steps - 1 {
                    return Ok(self.t_end);
                }
                let frac = k as f64 / (self.total_steps - 1) as f64;
                self.t_start * (self.t_end / self.t_start).powf(frac)
            }
        })
    }
}

/// A schedule shape without a step count, e.g. `constant:1` or
/// `geometric:10:0.1`. Drivers attach the step count once the run length is
/// known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleSpec {
    Constant { temperature: f64 },
    Geometric { start: f64, end: f64 },
}

impl ScheduleSpec {
    /// Builds a concrete schedule covering `steps` iterations. Runs of length
    /// zero or one still get a valid schedule.
    pub fn with_steps(&self, steps: usize) -> Result<CoolingSchedule, NumericError> {
        match *self {
            ScheduleSpec::Constant { temperature } => {
                CoolingSchedule::constant(temperature, steps.max(1))
            }
            ScheduleSpec::Geometric { start, end } => {
                CoolingSchedule::geometric(start, end, steps.max(2))
            }
        }
    }
}

impl fmt::Display for ScheduleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleSpec::Constant { temperature } => write!(f, "constant:{temperature}"),
            ScheduleSpec::Geometric { start, end } => write!(f, "geometric:{start}:{end}"),
        }
    }
}

impl FromStr for ScheduleSpec {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NumericError::InvalidSchedule(format!("cannot parse schedule '{s}'"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
        let spec = match parts.as_slice() {
            ["constant", t] => ScheduleSpec::Constant { temperature: num(t)? },
            ["geometric", a, b] => ScheduleSpec::Geometric {
                start: num(a)?,
                end: num(b)?,
            },
            _ => return Err(bad()),
        };
        // validate the temperatures once, with a dummy length
        spec.with_steps(2)?;
        Ok(spec)
    }
}

impl TryFrom<String> for ScheduleSpec {
    type Error = NumericError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<ScheduleSpec> for String {
    fn from(value: ScheduleSpec) -> Self {
        value.to_string()
    }
}

impl Serialize for ScheduleSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScheduleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_is_flat() {
        let s = CoolingSchedule::constant(1.0, 1000).unwrap();
        assert_eq!(s.temperature_at(999).unwrap(), 1.0);
        assert_eq!(s.temperature_at(0).unwrap(), 1.0);
    }

    #[test]
    fn geometric_end_points_and_midpoint() {
        let s = CoolingSchedule::geometric(10.0, 0.1, 1001).unwrap();
        assert_eq!(s.temperature_at(0).unwrap(), 10.0);
        assert_eq!(s.temperature_at(1000).unwrap(), 0.1);
        assert!((s.temperature_at(500).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_step() {
        let s = CoolingSchedule::geometric(10.0, 0.1, 10).unwrap();
        assert_eq!(
            s.temperature_at(10),
            Err(NumericError::StepOutOfRange { step: 10, total: 10 })
        );
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(CoolingSchedule::geometric(0.1, 10.0, 10).is_err());
        assert!(CoolingSchedule::geometric(10.0, 0.1, 1).is_err());
        assert!(CoolingSchedule::geometric(10.0, 0.0, 10).is_err());
        assert!(CoolingSchedule::constant(-1.0, 10).is_err());
        assert!(CoolingSchedule::constant(1.0, 0).is_err());
    }

    #[test]
    fn spec_grammar() {
        let g: ScheduleSpec = "geometric:10:0.1".parse().unwrap();
        assert_eq!(g, ScheduleSpec::Geometric { start: 10.0, end: 0.1 });
        assert_eq!(g.to_string(), "geometric:10:0.1");
        let c: ScheduleSpec = "constant:1".parse().unwrap();
        assert_eq!(c.to_string(), "constant:1");
        assert!("linear:1:2".parse::<ScheduleSpec>().is_err());
        assert!("constant:0".parse::<ScheduleSpec>().is_err());
        assert!("geometric:0.1:10".parse::<ScheduleSpec>().is_err());
    }

    proptest! {
        #[test]
        fn geometric_is_positive_and_non_increasing(
            t_end in 0.001f64..5.0,
            ratio in 1.0f64..1000.0,
            steps in 2usize..500,
        ) {
            let s = CoolingSchedule::geometric(t_end * ratio, t_end, steps).unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..steps {
                let t = s.temperature_at(k).unwrap();
                prop_assert!(t > 0.0);
                prop_assert!(t <= prev * (1.0 + 1e-12));
                prev = t;
            }
        }
    }
}
