//! Power-law fitting of the cited tail of a citation histogram.
//!
//! The model is `φ(n) = C / n^α` over positive citation counts: C is the
//! single-citation proportion and α ≥ 1 the decay exponent. The default
//! estimator is a least-squares line fit of `ln p` against `ln n` over the
//! occupied tail bins (the straight line such distributions draw on a
//! log-log plot). For count-backed histograms each bin enters the fit
//! weighted by its observation count, since the sampling noise of `ln p̂ᵢ`
//! shrinks as 1/√countᵢ; probability-backed histograms fit unweighted. A
//! maximum-likelihood estimator over the truncated support is selectable.
//! The zero-citation bin is never fitted.

use serde::Serialize;
use thiserror::Error;

use crate::histogram::CitationHistogram;

#[derive(Debug, Error)]
pub enum LotkaError {
    #[error("need at least 2 usable tail bins, found {0}")]
    InsufficientTail(usize),
    #[error("prediction requires n >= 1")]
    ZeroN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitMethod {
    #[serde(rename = "log-log-least-squares")]
    LogLogLeastSquares,
    #[serde(rename = "maximum-likelihood")]
    MaximumLikelihood,
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub method: FitMethod,
    /// Tail bins holding fewer observations are skipped (count-backed
    /// histograms only). Raising it trades tail reach for noise.
    pub min_count: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            method: FitMethod::LogLogLeastSquares,
            min_count: 1,
        }
    }
}

/// Fitted constants of `φ(n) = C / n^α` plus goodness of fit.
#[derive(Debug, Clone, Serialize)]
pub struct LotkaFit {
    /// Regression value of C (the model's φ(1)).
    pub c: f64,
    pub alpha: f64,
    /// Root-mean-square error in log space over the fitted points.
    pub fit_error: f64,
    pub n_points: usize,
    pub method: FitMethod,
    /// Set instead of clamping when the estimate falls below 1.
    pub alpha_below_one: bool,
    /// Observed p(1), reported alongside the regression C when the
    /// histogram has a unit bin at n = 1.
    pub c_anchored: Option<f64>,
}

/// One row of the per-bin fit report.
#[derive(Debug, Clone, Serialize)]
pub struct FitReportRow {
    pub n: u64,
    pub observed: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// `(n, p, fit_weight)` per usable tail bin.
fn tail_points(hist: &CitationHistogram, options: &FitOptions) -> Vec<(f64, f64, f64)> {
    let probs = hist.probabilities();
    let mut points = Vec::new();
    for (i, &p) in probs.iter().enumerate() {
        let edge = hist.edge(i);
        if edge == 0 || p <= 0.0 {
            continue;
        }
        if hist.is_count_backed() && hist.weight(i) + 0.5 < options.min_count as f64 {
            continue;
        }
        let fit_weight = if hist.is_count_backed() {
            hist.weight(i)
        } else {
            1.0
        };
        points.push((edge as f64, p, fit_weight));
    }
    points
}

/// Fit the Lotka tail with default options (log-log least squares,
/// min_count 1).
pub fn fit_lotka(hist: &CitationHistogram) -> Result<LotkaFit, LotkaError> {
    fit_lotka_with(hist, &FitOptions::default())
}

pub fn fit_lotka_with(
    hist: &CitationHistogram,
    options: &FitOptions,
) -> Result<LotkaFit, LotkaError> {
    let points = tail_points(hist, options);
    if points.len() < 2 {
        return Err(LotkaError::InsufficientTail(points.len()));
    }
    let (c, alpha) = match options.method {
        FitMethod::LogLogLeastSquares => least_squares(&points),
        FitMethod::MaximumLikelihood => max_likelihood(hist, &points),
    };
    let fit_error = log_rmse(&points, c, alpha);
    let c_anchored = if hist.bin_width() == 1 && hist.first_edge() <= 1 {
        let idx = (1 - hist.first_edge()) as usize;
        (idx < hist.num_bins()).then(|| hist.probabilities()[idx])
    } else {
        None
    };
    Ok(LotkaFit {
        c,
        alpha,
        fit_error,
        n_points: points.len(),
        method: options.method,
        alpha_below_one: alpha < 1.0,
        c_anchored,
    })
}

fn least_squares(points: &[(f64, f64, f64)]) -> (f64, f64) {
    let w_sum: f64 = points.iter().map(|(_, _, w)| w).sum();
    let xs: Vec<f64> = points.iter().map(|(n, _, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, p, _)| p.ln()).collect();
    let x_mean: f64 = points
        .iter()
        .zip(&xs)
        .map(|((_, _, w), x)| w * x)
        .sum::<f64>()
        / w_sum;
    let y_mean: f64 = points
        .iter()
        .zip(&ys)
        .map(|((_, _, w), y)| w * y)
        .sum::<f64>()
        / w_sum;
    let mut cov = 0.0;
    let mut var = 0.0;
    for ((_, _, w), (x, y)) in points.iter().zip(xs.iter().zip(ys.iter())) {
        cov += w * (x - x_mean) * (y - y_mean);
        var += w * (x - x_mean) * (x - x_mean);
    }
    let slope = cov / var;
    let intercept = y_mean - slope * x_mean;
    (intercept.exp(), -slope)
}

/// Maximum-likelihood α over the truncated support [1, N] with N the last
/// tail edge, solved by bisection on the score equation. C then matches the
/// observed tail mass so that Σ φ(n) over the support equals it.
fn max_likelihood(hist: &CitationHistogram, points: &[(f64, f64, f64)]) -> (f64, f64) {
    let top = points.last().map(|(n, _, _)| *n as u64).unwrap_or(1);
    let support: Vec<f64> = (1..=top).map(|n| n as f64).collect();
    let w_total: f64 = points.iter().map(|(_, p, _)| p).sum();
    let mean_log: f64 = points.iter().map(|(n, p, _)| p * n.ln()).sum::<f64>() / w_total;

    // expected ln n under the truncated model minus the observed mean;
    // strictly decreasing in alpha
    let score = |alpha: f64| -> f64 {
        let mut h = 0.0;
        let mut h_log = 0.0;
        for n in &support {
            let z = n.powf(-alpha);
            h += z;
            h_log += n.ln() * z;
        }
        h_log / h - mean_log
    };

    let mut lo = 1e-6;
    let mut hi = 32.0;
    if score(lo) < 0.0 {
        // observed tail heavier than any admissible model; fall back to the
        // boundary
        return normalize_c(hist, &support, lo);
    }
    if score(hi) > 0.0 {
        return normalize_c(hist, &support, hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    normalize_c(hist, &support, 0.5 * (lo + hi))
}

fn normalize_c(hist: &CitationHistogram, support: &[f64], alpha: f64) -> (f64, f64) {
    let h: f64 = support.iter().map(|n| n.powf(-alpha)).sum();
    let tail_mass: f64 = hist
        .bins()
        .iter()
        .filter(|(edge, _)| *edge >= 1)
        .map(|(_, p)| p)
        .sum();
    (tail_mass / h, alpha)
}

fn log_rmse(points: &[(f64, f64, f64)], c: f64, alpha: f64) -> f64 {
    let ln_c = c.ln();
    let sum_sq: f64 = points
        .iter()
        .map(|(n, p, _)| {
            let r = p.ln() - (ln_c - alpha * n.ln());
            r * r
        })
        .sum();
    (sum_sq / points.len() as f64).sqrt()
}

/// Evaluate the fitted model at n.
pub fn lotka_predict(fit: &LotkaFit, n: u64) -> Result<f64, LotkaError> {
    if n == 0 {
        return Err(LotkaError::ZeroN);
    }
    Ok(fit.c / (n as f64).powf(fit.alpha))
}

/// Per-bin comparison of observed tail probabilities against the fitted
/// model, one row per tail bin.
pub fn fit_report(hist: &CitationHistogram, fit: &LotkaFit) -> Vec<FitReportRow> {
    hist.bins()
        .into_iter()
        .filter(|(edge, _)| *edge >= 1)
        .map(|(edge, observed)| {
            let predicted = fit.c / (edge as f64).powf(fit.alpha);
            FitReportRow {
                n: edge,
                observed,
                predicted,
                residual: observed - predicted,
            }
        })
        .collect()
}

/// Delimited export of a fit report.
pub fn report_table(rows: &[FitReportRow]) -> String {
    let mut out = String::from("n,observed,predicted,residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n, r.observed, r.predicted, r.residual
        ));
    }
    out
}
