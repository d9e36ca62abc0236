//! The differentiability-loss probe: raise the highest basic invariant to a
//! fractional power s+α and fit the decay exponents of its derivatives
//! along a ray. The fitted slope at order k should match h·(s+α) − k, so
//! orders up to h·s tend to zero and order h·s + 1 blows up when α < 1/h.

use serde::Serialize;

use crate::chevalley::{ChevalleyError, ChevalleyMap};
use crate::coxeter::Family;

use super::faa::{faa_di_bruno_univariate, restrict_to_ray};
use super::{least_squares_slope, WhitneyError};

/// Deadband around zero for slope verdicts.
pub const SLOPE_DEADBAND: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub s: u32,
    pub alpha: f64,
    /// Ray direction; defaults to the normalized all-ones vector.
    pub ray: Option<Vec<f64>>,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// D-family probes must opt in to the power-sum highest invariant.
    pub dn_alternative_highest: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            s: 1,
            alpha: 0.2,
            ray: None,
            t_min: 1e-3,
            t_max: 1e-1,
            samples: 25,
            dn_alternative_highest: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeVerdict {
    TendsToZero,
    BlowsUp,
    Inconclusive,
}

impl SlopeVerdict {
    pub fn from_slope(slope: f64) -> SlopeVerdict {
        if slope > SLOPE_DEADBAND {
            SlopeVerdict::TendsToZero
        } else if slope < -SLOPE_DEADBAND {
            SlopeVerdict::BlowsUp
        } else {
            SlopeVerdict::Inconclusive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SlopeVerdict::TendsToZero => "to_zero",
            SlopeVerdict::BlowsUp => "blow_up",
            SlopeVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub k: u32,
    pub slope: f64,
    pub residual: f64,
    pub verdict: SlopeVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub group: String,
    pub s: u32,
    pub alpha: f64,
    pub ray: Vec<f64>,
    /// h·(s+α): the slope at order k should be this minus k.
    pub expected_exponent_base: f64,
    pub orders: Vec<OrderFit>,
    pub max_order_tending_to_zero: Option<u32>,
    pub first_blowup_order: Option<u32>,
    /// "C{a} not C{b}", or "inconclusive" near integer boundaries.
    pub class_verdict: String,
    pub boundary_case: bool,
}

/// Fit log|D^k(pₙ^{s+α})| against log t along the ray for k = 0 … h·s + 1.
pub fn counterexample_probe(
    map: &ChevalleyMap,
    config: &ProbeConfig,
) -> Result<ProbeReport, WhitneyError> {
    let spec = map.group().spec();
    if spec.family == Family::D && !config.dn_alternative_highest {
        return Err(WhitneyError::Chevalley(
            ChevalleyError::UnsupportedGroupForProbe(format!(
                "{spec}: the probe needs the power-sum highest invariant"
            )),
        ));
    }
    let invariant = map.probe_invariant().map_err(WhitneyError::Chevalley)?;
    let h = map.coxeter_number();
    let n = map.dim();
    let ray = match &config.ray {
        Some(v) => {
            assert_eq!(v.len(), n, "ray dimension");
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / norm).collect::<Vec<f64>>()
        }
        None => {
            let norm = (n as f64).sqrt();
            vec![1.0 / norm; n]
        }
    };
    // ψ(t) = pₙ(t·v) = pₙ(v)·t^h; the invariant must not degenerate
    let coeffs = restrict_to_ray(&invariant, &vec![0.0; n], &ray);
    if coeffs.iter().all(|c| c.abs() < 1e-12) {
        return Err(WhitneyError::RayOnMirror);
    }
    let beta = config.s as f64 + config.alpha;
    if config.samples < 5 || config.t_max <= config.t_min || config.t_min <= 0.0 {
        return Err(WhitneyError::InvalidSamplingPlan(
            "probe grid must be a positive increasing range with at least 5 samples".into(),
        ));
    }
    let ts: Vec<f64> = (0..config.samples)
        .map(|i| {
            let lo = config.t_min.ln();
            let hi = config.t_max.ln();
            (lo + (hi - lo) * i as f64 / (config.samples - 1) as f64).exp()
        })
        .collect();
    let boundary_case = {
        let ha = h as f64 * config.alpha;
        (ha - ha.round()).abs() < 1e-9
    };
    let k_max = h * config.s + 1;
    let mut orders = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &t in &ts {
            let v = faa_di_bruno_univariate(&coeffs, beta, k, t)?;
            if v.abs() > 0.0 && v.is_finite() {
                xs.push(t.ln());
                ys.push(v.abs().ln());
            }
        }
        let (slope, residual) = if xs.len() >= 5 {
            least_squares_slope(&xs, &ys)
        } else {
            (f64::NAN, f64::NAN)
        };
        let verdict = if slope.is_nan() || boundary_case {
            SlopeVerdict::Inconclusive
        } else {
            SlopeVerdict::from_slope(slope)
        };
        orders.push(OrderFit {
            k,
            slope,
            residual,
            verdict,
        });
    }
    let mut max_zero = None;
    for fit in &orders {
        if fit.verdict == SlopeVerdict::TendsToZero {
            max_zero = Some(fit.k);
        } else {
            break;
        }
    }
    let first_blowup = orders
        .iter()
        .find(|f| f.verdict == SlopeVerdict::BlowsUp)
        .map(|f| f.k);
    let class_verdict = match (boundary_case, max_zero, first_blowup) {
        (true, _, _) => "inconclusive".to_string(),
        (false, Some(m), Some(b)) if b == m + 1 => format!("C{m} not C{b}"),
        _ => "inconclusive".to_string(),
    };
    Ok(ProbeReport {
        group: spec.to_string(),
        s: config.s,
        alpha: config.alpha,
        ray,
        expected_exponent_base: h as f64 * beta,
        orders,
        max_order_tending_to_zero: max_zero,
        first_blowup_order: first_blowup,
        class_verdict,
        boundary_case,
    })
}
