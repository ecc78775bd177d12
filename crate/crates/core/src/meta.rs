//! Metastability certificates and pseudo-mixing measurements.
//!
//! A distribution `mu` is `(eps, T)`-metastable when `||mu P^t - mu|| <=
//! eps` for all `t <= T`. In the dense regime the whole drift curve is
//! computed by iterated evolution; beyond it, a one-step drift amplifies
//! linearly (drift is subadditive because evolution contracts TV), giving
//! an `(eps * T, T)` certificate without iteration.

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::{tv_slices, Distribution};
use crate::error::{Error, Result};
use crate::matrix::TransitionKernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateMode {
    Exact,
    Amplified,
}

/// Evidence that a distribution stays within `epsilon_tv` of itself for
/// `horizon` steps.
#[derive(Debug, Clone, Serialize)]
pub struct MetastabilityCertificate {
    /// Identifier of the certified distribution (caller-chosen).
    pub mu: String,
    pub epsilon_tv: f64,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub mode: CertificateMode,
    /// Largest drift over the certified window.
    #[serde(rename = "driftMax")]
    pub drift_max: f64,
    /// `||mu P^t - mu||` for `t = 0..=horizon` (exact mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_curve: Option<Vec<f64>>,
    /// One-step drift backing an amplified certificate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_step_drift: Option<f64>,
    /// Whether every checked drift stayed within budget.
    pub valid: bool,
    /// First time the budget was exceeded, when invalid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<u64>,
    /// Written by the CLI when the curve is exported.
    #[serde(rename = "curveFile", skip_serializing_if = "Option::is_none")]
    pub curve_file: Option<String>,
}

impl MetastabilityCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Compute the full drift curve of `mu` and certify it against `epsilon`.
/// The curve is always completed up to `horizon` (the certificate reports
/// the first violation if the budget is exhausted midway).
pub fn certify_exact<K: TransitionKernel>(
    mu_id: &str,
    mu: &Distribution,
    kernel: &K,
    epsilon_tv: f64,
    horizon: u64,
) -> Result<MetastabilityCertificate> {
    if mu.len() != kernel.dim() {
        return Err(Error::DimensionMismatch(format!(
            "distribution of {} states against kernel of {}",
            mu.len(),
            kernel.dim()
        )));
    }
    let base = mu.as_slice();
    let mut cur = base.to_vec();
    let mut buf = vec![0.0; cur.len()];
    let mut curve = Vec::with_capacity(horizon as usize + 1);
    curve.push(0.0);
    let mut drift_max = 0.0f64;
    let mut first_violation = None;
    for t in 1..=horizon {
        kernel.apply_into(&cur, &mut buf);
        std::mem::swap(&mut cur, &mut buf);
        let drift = tv_slices(&cur, base);
        drift_max = drift_max.max(drift);
        if drift > epsilon_tv && first_violation.is_none() {
            first_violation = Some(t);
        }
        curve.push(drift);
    }
    Ok(MetastabilityCertificate {
        mu: mu_id.to_string(),
        epsilon_tv,
        horizon,
        mode: CertificateMode::Exact,
        drift_max,
        drift_curve: Some(curve),
        one_step_drift: None,
        valid: first_violation.is_none(),
        first_violation,
        curve_file: None,
    })
}

/// Budget certified at horizon `T` from a one-step drift: `drift * T`.
pub fn amplify(one_step_drift: f64, horizon: u64) -> f64 {
    one_step_drift * horizon as f64
}

/// Amplified certificate from a measured one-step drift.
pub fn certificate_from_one_step(
    mu_id: &str,
    one_step_drift: f64,
    horizon: u64,
) -> MetastabilityCertificate {
    let budget = amplify(one_step_drift, horizon);
    MetastabilityCertificate {
        mu: mu_id.to_string(),
        epsilon_tv: budget,
        horizon,
        mode: CertificateMode::Amplified,
        drift_max: budget,
        drift_curve: None,
        one_step_drift: Some(one_step_drift),
        valid: true,
        first_violation: None,
        curve_file: None,
    }
}

/// Outcome of a pseudo-mixing measurement: the first time every start in
/// the set is within `epsilon_tv` of the target, if reached within `cap`.
#[derive(Debug, Clone, Serialize)]
pub struct PseudoMixReport {
    pub mu: String,
    pub starts: Vec<usize>,
    pub epsilon_tv: f64,
    pub cap: u64,
    /// First qualifying time, or `None` if the cap was reached first.
    pub t_found: Option<u64>,
    /// Worst-start TV at `t_found` (or at the cap when not found).
    pub max_tv_at_end: f64,
}

impl PseudoMixReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Measure `t_mu^S(eps)`: evolve every start's row simultaneously and
/// report the first `t` at which the worst TV to `mu` is within budget.
pub fn pseudo_mix_time<K: TransitionKernel>(
    mu_id: &str,
    mu: &Distribution,
    kernel: &K,
    starts: &[usize],
    epsilon_tv: f64,
    cap: u64,
) -> Result<PseudoMixReport> {
    if starts.is_empty() {
        return Err(Error::EmptySubset(
            "pseudo-mixing needs start states".into(),
        ));
    }
    let dim = kernel.dim();
    if mu.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "distribution of {} states against kernel of {}",
            mu.len(),
            dim
        )));
    }
    for &s in starts {
        if s >= dim {
            return Err(Error::DimensionMismatch(format!(
                "start {s} outside 0..{dim}"
            )));
        }
    }
    let target = mu.as_slice();
    let mut rows: Vec<Vec<f64>> = starts
        .iter()
        .map(|&s| {
            let mut v = vec![0.0; dim];
            v[s] = 1.0;
            v
        })
        .collect();
    let max_tv = |rows: &[Vec<f64>]| -> f64 {
        rows.par_iter()
            .map(|r| tv_slices(r, target))
            .reduce(|| 0.0, f64::max)
    };
    let mut worst = max_tv(&rows);
    if worst <= epsilon_tv {
        return Ok(PseudoMixReport {
            mu: mu_id.to_string(),
            starts: starts.to_vec(),
            epsilon_tv,
            cap,
            t_found: Some(0),
            max_tv_at_end: worst,
        });
    }
    for t in 1..=cap {
        rows.par_iter_mut().for_each(|row| {
            let mut buf = vec![0.0; dim];
            kernel.apply_into(row, &mut buf);
            *row = buf;
        });
        worst = max_tv(&rows);
        if worst <= epsilon_tv {
            return Ok(PseudoMixReport {
                mu: mu_id.to_string(),
                starts: starts.to_vec(),
                epsilon_tv,
                cap,
                t_found: Some(t),
                max_tv_at_end: worst,
            });
        }
    }
    Ok(PseudoMixReport {
        mu: mu_id.to_string(),
        starts: starts.to_vec(),
        epsilon_tv,
        cap,
        t_found: None,
        max_tv_at_end: worst,
    })
}

/// Guaranteed approximation window combining a pseudo-mixing time with a
/// metastability certificate: for `t` in `[t_found, t_found + T]` every
/// start's law is within `2 eps` of `mu`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GuaranteedWindow {
    pub start: u64,
    pub end: u64,
    pub budget: f64,
}

pub fn extend_window(
    cert: &MetastabilityCertificate,
    report: &PseudoMixReport,
) -> Result<GuaranteedWindow> {
    if cert.mu != report.mu {
        return Err(Error::Incompatible(format!(
            "certificate for `{}` against report for `{}`",
            cert.mu, report.mu
        )));
    }
    if !cert.valid {
        return Err(Error::Incompatible(
            "certificate does not hold at its own budget".into(),
        ));
    }
    if (cert.epsilon_tv - report.epsilon_tv).abs() > 1e-12 {
        return Err(Error::Incompatible(format!(
            "budgets differ: certificate {} vs report {}",
            cert.epsilon_tv, report.epsilon_tv
        )));
    }
    let t0 = report.t_found.ok_or_else(|| {
        Error::Incompatible("pseudo-mixing did not conclude below its cap".into())
    })?;
    Ok(GuaranteedWindow {
        start: t0,
        end: t0 + cert.horizon,
        budget: 2.0 * cert.epsilon_tv,
    })
}

/// Bound curve `eps + (1 - eps) * Prob(tau_y > t)` valid against a
/// distribution concentrated at the hitting target: entry `t` bounds
/// `||P^t(x,.) - delta_y||` given `delta_y` is `(eps, T)`-metastable.
pub fn tv_bound_via_hitting(epsilon_tv: f64, hit_cdf: &[f64]) -> Vec<f64> {
    hit_cdf
        .iter()
        .map(|&c| epsilon_tv + (1.0 - epsilon_tv) * (1.0 - c))
        .collect()
}

/// Bound curve `eps + tail(t)` from a coupling tail
/// `tail(t) >= max_{x,y in S} Prob(tau_couple > t)`, valid against a
/// metastable `mu` supported on `S`.
pub fn tv_bound_via_coupling(epsilon_tv: f64, coupling_tail: &[f64]) -> Vec<f64> {
    coupling_tail.iter().map(|&c| epsilon_tv + c).collect()
}
