//! Sup-over-time check of `‖U‖_{H³} + ‖B‖_{H³}` against a threshold.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonitorSample {
    pub t: f64,
    pub u_h3: f64,
    pub b_h3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonitorStatus {
    /// Strictly below the threshold.
    Pass,
    /// Within `1e-12` relative of the threshold.
    Boundary,
    Fail,
}

impl MonitorStatus {
    pub fn name(self) -> &'static str {
        match self {
            MonitorStatus::Pass => "pass",
            MonitorStatus::Boundary => "boundary",
            MonitorStatus::Fail => "fail",
        }
    }

    fn classify(value: f64, threshold: f64) -> Self {
        if (value - threshold).abs() <= 1e-12 * threshold.abs() {
            MonitorStatus::Boundary
        } else if value < threshold {
            MonitorStatus::Pass
        } else {
            MonitorStatus::Fail
        }
    }

    pub fn acceptable(self) -> bool {
        self != MonitorStatus::Fail
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonitorVerdict {
    pub sup: f64,
    pub t_of_sup: f64,
    /// `M0^{-1/2}`.
    pub reference: f64,
    pub reference_status: MonitorStatus,
    /// The configured threshold the verdict is taken against.
    pub budget: f64,
    pub status: MonitorStatus,
    pub samples: usize,
    pub t_last: f64,
}

/// `budget` defaults to `M0^{-1/2}`.
pub fn theorem_monitor(samples: &[MonitorSample], m0: f64, budget: Option<f64>) -> Result<MonitorVerdict> {
    if samples.is_empty() {
        return Err(Error::EmptyStream);
    }
    let reference = m0.powf(-0.5);
    let budget = budget.unwrap_or(reference);
    let mut sup = f64::NEG_INFINITY;
    let mut t_of_sup = samples[0].t;
    for s in samples {
        let v = s.u_h3 + s.b_h3;
        if !v.is_finite() {
            sup = f64::INFINITY;
            t_of_sup = s.t;
            break;
        }
        if v > sup {
            sup = v;
            t_of_sup = s.t;
        }
    }
    Ok(MonitorVerdict {
        sup,
        t_of_sup,
        reference,
        reference_status: MonitorStatus::classify(sup, reference),
        budget,
        status: MonitorStatus::classify(sup, budget),
        samples: samples.len(),
        t_last: samples.last().unwrap().t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: f64, u: f64, b: f64) -> MonitorSample {
        MonitorSample { t, u_h3: u, b_h3: b }
    }

    #[test]
    fn zero_stream_passes() {
        let v = theorem_monitor(&[s(0.0, 0.0, 0.0), s(1.0, 0.0, 0.0)], 4.0, None).unwrap();
        assert_eq!(v.sup, 0.0);
        assert_eq!(v.status, MonitorStatus::Pass);
    }

    #[test]
    fn boundary_and_failure() {
        let v = theorem_monitor(&[s(0.0, 0.25, 0.25), s(1.0, 0.2, 0.1)], 4.0, None).unwrap();
        assert_eq!(v.status, MonitorStatus::Boundary);
        assert_eq!(v.t_of_sup, 0.0);
        let v = theorem_monitor(&[s(0.0, 0.1, 0.1), s(2.0, 0.6, 0.1)], 4.0, Some(1.0)).unwrap();
        assert_eq!(v.status, MonitorStatus::Pass);
        assert_eq!(v.reference_status, MonitorStatus::Fail);
        assert_eq!(v.t_of_sup, 2.0);
        assert!(theorem_monitor(&[], 4.0, None).is_err());
    }
}
