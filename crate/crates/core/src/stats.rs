//! Power-law fitting, empirical variance, and the analytic
//! variance/sampling-complexity formulas.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::policy::policy;

/// Summary statistics of a sampling run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub count: usize,
    /// E over paths of weight² (Π Z·sign squared); None when the samples
    /// carry no quasi-probability weights.
    pub z_product_mean_square: Option<f64>,
}

impl EstimateSummary {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples(samples.len()));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let ss = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>();
        Ok(Self {
            mean,
            variance: ss / (n - 1.0),
            count: samples.len(),
            z_product_mean_square: None,
        })
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Unbiased sample variance with mean and count.
pub fn empirical_variance(samples: &[f64]) -> Result<EstimateSummary> {
    EstimateSummary::from_samples(samples)
}

/// Result of an ordinary least-squares fit on (ln t, ln error).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// The log-log slope.
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// (t_min, t_max) actually used after the noise-floor filter.
    pub window: (f64, f64),
    pub points_used: usize,
}

/// OLS power-law fit. Points with t ≤ 0 or error at or below the noise
/// floor (round-off territory) are excluded; at least 4 usable points are
/// required.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    let floor = policy().noise_floor;
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(t, e)| *t > 0.0 && *e > floor)
        .collect();
    if usable.len() < 4 {
        return Err(Error::TooFewFitPoints {
            usable: usable.len(),
            total: points.len(),
        });
    }
    let logs: Vec<(f64, f64)> = usable.iter().map(|(t, e)| (t.ln(), e.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx = logs.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum::<f64>();
    let sxy = logs
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>();
    let syy = logs.iter().map(|(_, y)| (y - mean_y) * (y - mean_y)).sum::<f64>();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = logs
        .iter()
        .map(|(x, y)| {
            let fit = intercept + slope * x;
            (y - fit) * (y - fit)
        })
        .sum::<f64>();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let t_min = usable.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min);
    let t_max = usable.iter().map(|(t, _)| *t).fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        exponent: slope,
        intercept,
        r_squared,
        window: (t_min, t_max),
        points_used: usable.len(),
    })
}

/// Leading single-round variance law (Z² − 1)·<Q>², valid for N = r
/// up to an O(t) remainder.
pub fn qshift_variance_prediction(z_total: f64, q_expectation: f64) -> Result<f64> {
    if z_total < 1.0 {
        return Err(Error::InvalidZ(z_total));
    }
    Ok((z_total * z_total - 1.0) * q_expectation * q_expectation)
}

/// Protocol selector for the complexity formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProtocolKind {
    Trotter1,
    Trotter2,
    /// (2k)-th order product formula; only the formula is evaluated here.
    Trotter2k { k: usize },
    Qdrift,
    Qshift,
}

/// Optional inputs for the complexity formulas; only what a protocol needs
/// must be present.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ComplexityExtras {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub z: Option<f64>,
    pub q_expectation: Option<f64>,
}

/// Evaluated gate/sampling complexity expressions with inputs echoed
/// verbatim for provenance. These are formula evaluations only; no
/// asymptotic claim is verified here.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexityReport {
    pub protocol: ProtocolKind,
    pub lambda: f64,
    pub big_lambda: f64,
    pub l_terms: usize,
    pub t: f64,
    pub epsilon: f64,
    pub extras: ComplexityExtras,
    pub h_spectral_norm: Option<f64>,
    pub gate_complexity: f64,
    pub sampling_complexity: f64,
    /// Which variance branch was used for adaptive sampling (all-positive
    /// rounds behave like the fixed-distribution baseline).
    pub sampling_branch: &'static str,
}

/// Evaluate the per-protocol gate and sampling complexity expressions.
pub fn sampling_complexity_report(
    protocol: ProtocolKind,
    h: &Hamiltonian,
    t: f64,
    epsilon: f64,
    extras: ComplexityExtras,
) -> Result<ComplexityReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let lambda = h.lambda();
    let big_lambda = h.big_lambda();
    let l = h.n_terms() as f64;
    let mut h_norm = None;

    let (gate, sampling, branch) = match protocol {
        ProtocolKind::Trotter1 => (
            l.powi(3) * (big_lambda * t).powi(2) / epsilon,
            1.0,
            "deterministic",
        ),
        ProtocolKind::Trotter2 => (
            l.powf(2.5) * (big_lambda * t).powf(1.5) / epsilon.sqrt(),
            1.0,
            "deterministic",
        ),
        ProtocolKind::Trotter2k { k } => {
            if k == 0 {
                return Err(Error::InvalidParams("2k-th order needs k >= 1".into()));
            }
            let inv = 1.0 / (2.0 * k as f64);
            (
                l.powf(2.0 + inv) * (big_lambda * t).powf(1.0 + inv) / epsilon.powf(inv),
                1.0,
                "deterministic",
            )
        }
        ProtocolKind::Qdrift => {
            let n = extras
                .n
                .ok_or_else(|| Error::InvalidParams("qdrift complexity needs N".into()))?
                as f64;
            (
                (lambda * t).powi(2) / epsilon,
                (lambda * t / n).powi(2) / (epsilon * epsilon),
                "fixed-distribution",
            )
        }
        ProtocolKind::Qshift => {
            let r = extras
                .r
                .ok_or_else(|| Error::InvalidParams("adaptive complexity needs r".into()))?
                as f64;
            let gate = (lambda * t).powf(1.0 + 1.0 / r) / epsilon.powf(1.0 / r);
            let z = extras.z.unwrap_or(1.0);
            if z < 1.0 {
                return Err(Error::InvalidZ(z));
            }
            if z > 1.0 {
                let qv = extras.q_expectation.ok_or_else(|| {
                    Error::InvalidParams("Z > 1 sampling complexity needs <Q>".into())
                })?;
                (
                    gate,
                    (z * z - 1.0) * qv * qv / (epsilon * epsilon),
                    "quasi-probability",
                )
            } else {
                let norm = h.total_matrix()?.spectral_norm();
                h_norm = Some(norm);
                (
                    gate,
                    norm * norm * t * t / (epsilon * epsilon),
                    "all-positive",
                )
            }
        }
    };

    Ok(ComplexityReport {
        protocol,
        lambda,
        big_lambda,
        l_terms: h.n_terms(),
        t,
        epsilon,
        extras,
        h_spectral_norm: h_norm,
        gate_complexity: gate,
        sampling_complexity: sampling,
        sampling_branch: branch,
    })
}
