//! Smooth reference decay for a rank-citation curve.
//!
//! The primary model is a power law `c(r) = C * r^-beta` fitted by least
//! squares in log-log space over cited ranks, leaving out a window of ranks
//! around the h-paper so a bulge there cannot drag its own baseline up. When
//! the log-log fit is poor (or the curve is flat) the fallback is a
//! non-increasing convex regression on the raw counts.

use serde::{Deserialize, Serialize};

use crate::config::AnomalyConfig;
use crate::error::FitError;
use crate::metrics::{h_index, median, RankCitationCurve};

/// Scale factor that turns a median absolute deviation into a normal sigma.
pub const MAD_TO_SIGMA: f64 = 1.4826;
/// Lower bound on the residual scale, keeps z-scores finite on exact fits.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineModel {
    PowerLaw,
    IsotonicConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawParams {
    pub coefficient: f64,
    pub exponent: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineFit {
    pub model: BaselineModel,
    /// Power-law parameters; also kept when a poor fit was rejected.
    pub params: Option<PowerLawParams>,
    /// Expected citations per rank, same length as the curve.
    pub fitted: Vec<f64>,
    pub residual_sigma: f64,
    /// Inclusive rank interval left out of fitting.
    pub excluded_window: (usize, usize),
    /// Number of ranks the model was fitted on.
    pub fitted_points: usize,
    pub fallback_reason: Option<String>,
}

fn excluded_window(h: usize, w: usize) -> (usize, usize) {
    (h.saturating_sub(w).max(1), h + w)
}

fn robust_sigma(residuals: &[f64]) -> f64 {
    let mut r = residuals.to_vec();
    let Some(med) = median(&mut r) else {
        return SIGMA_FLOOR;
    };
    let mut dev: Vec<f64> = residuals.iter().map(|v| (v - med).abs()).collect();
    let mad = median(&mut dev).unwrap_or(0.0);
    (MAD_TO_SIGMA * mad).max(SIGMA_FLOOR)
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r2)`.
/// `None` when x or y has no spread.
pub(crate) fn least_squares(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    Some((a, b, 1.0 - ss_res / syy))
}

/// Fits the baseline using the config's window, point minimum and R² floor.
pub fn fit_baseline(
    curve: &RankCitationCurve,
    cfg: &AnomalyConfig,
) -> Result<BaselineFit, FitError> {
    let counts = curve.citations();
    if counts.iter().all(|&c| c == 0) {
        return Err(FitError::DegenerateFit(
            "every publication has zero citations".into(),
        ));
    }
    let cited = counts.iter().filter(|&&c| c >= 1).count();
    if cited < cfg.min_points {
        return Err(FitError::TooFewPoints {
            needed: cfg.min_points,
            found: cited,
        });
    }

    let h = h_index(curve);
    let window = excluded_window(h, cfg.exclude_window);
    let mut ranks = Vec::new();
    let mut values = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        let rank = i + 1;
        if c >= 1 && !(window.0..=window.1).contains(&rank) {
            ranks.push(rank);
            values.push(c as f64);
        }
    }
    // The window can swallow a short curve; fit on everything cited instead.
    if ranks.len() < 2 {
        ranks.clear();
        values.clear();
        for (i, &c) in counts.iter().enumerate().filter(|(_, &c)| c >= 1) {
            ranks.push(i + 1);
            values.push(c as f64);
        }
    }

    let x: Vec<f64> = ranks.iter().map(|&r| (r as f64).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (params, reason) = match least_squares(&x, &y) {
        None => (
            None,
            "log-log fit is degenerate (no spread in counts)".to_string(),
        ),
        Some((a, b, r2)) => {
            let params = PowerLawParams {
                coefficient: a.exp(),
                exponent: -b,
                r2,
            };
            if params.exponent <= 0.0 {
                (
                    Some(params),
                    format!("fitted exponent {:.4} is not a decay", params.exponent),
                )
            } else if r2 < cfg.min_r2 {
                (
                    Some(params),
                    format!("log-log R² {r2:.4} below {}", cfg.min_r2),
                )
            } else {
                let fitted: Vec<f64> = (1..=counts.len())
                    .map(|r| params.coefficient * (r as f64).powf(-params.exponent))
                    .collect();
                let residuals: Vec<f64> = ranks
                    .iter()
                    .zip(&values)
                    .map(|(&r, v)| v.ln() - fitted[r - 1].ln())
                    .collect();
                return Ok(BaselineFit {
                    model: BaselineModel::PowerLaw,
                    params: Some(params),
                    fitted,
                    residual_sigma: robust_sigma(&residuals),
                    excluded_window: window,
                    fitted_points: ranks.len(),
                    fallback_reason: None,
                });
            }
        }
    };

    let xs: Vec<f64> = ranks.iter().map(|&r| r as f64).collect();
    let smooth = convex_nonincreasing_fit(&xs, &values);
    let fitted = interpolate_hold(&xs, &smooth, counts.len());
    let residuals: Vec<f64> = ranks
        .iter()
        .zip(&values)
        .map(|(&r, v)| v.ln() - fitted[r - 1].max(f64::MIN_POSITIVE).ln())
        .collect();
    Ok(BaselineFit {
        model: BaselineModel::IsotonicConvex,
        params,
        fitted,
        residual_sigma: robust_sigma(&residuals),
        excluded_window: window,
        fitted_points: ranks.len(),
        fallback_reason: Some(reason),
    })
}

/// Piecewise-linear interpolation of `(xs, ys)` at ranks `1..=len`, holding
/// the end values outside the fitted range.
fn interpolate_hold(xs: &[f64], ys: &[f64], len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut j = 0;
    for r in 1..=len {
        let x = r as f64;
        if x <= xs[0] {
            out.push(ys[0]);
            continue;
        }
        if x >= xs[xs.len() - 1] {
            out.push(ys[ys.len() - 1]);
            continue;
        }
        while xs[j + 1] < x {
            j += 1;
        }
        let t = (x - xs[j]) / (xs[j + 1] - xs[j]);
        out.push(ys[j] + t * (ys[j + 1] - ys[j]));
    }
    out
}

/// Least-squares fit of a convex, non-increasing sequence to `ys` at strictly
/// increasing abscissae `xs`.
///
/// Every such sequence is `a + sum_k theta_k * (x_k - x)_+` with `theta >= 0`
/// and knots at the data points, so the fit is a non-negative least squares
/// problem with a free intercept, solved exactly by Lawson-Hanson active sets.
/// Real fits have few knots, which keeps the inner solves small.
pub fn convex_nonincreasing_fit(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = ys.len();
    if n <= 1 {
        return ys.to_vec();
    }
    let scale = ys.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let span = (xs[n - 1] - xs[0]).max(1.0);
    let tol = 1e-10 * scale * span * n as f64;
    let hinge = |k: usize, i: usize| (xs[k] - xs[i]).max(0.0);

    // passive knots (1..n) and their coefficients
    let mut passive: Vec<usize> = Vec::new();
    let mut theta: Vec<f64> = Vec::new();
    let mut fitted = vec![ys.iter().sum::<f64>() / n as f64; n];

    for _outer in 0..3 * n {
        // gradient of the objective w.r.t. each knot, via prefix sums
        let mut best = None;
        let (mut r_sum, mut xr_sum) = (0.0, 0.0);
        for k in 0..n {
            if k > 0 && !passive.contains(&k) {
                let w = xs[k] * r_sum - xr_sum;
                if w > tol && best.is_none_or(|(_, bw)| w > bw) {
                    best = Some((k, w));
                }
            }
            let r = ys[k] - fitted[k];
            r_sum += r;
            xr_sum += xs[k] * r;
        }
        let Some((knot, _)) = best else { break };
        passive.push(knot);
        theta.push(0.0);

        loop {
            let (intercept, z) = solve_hinge_ls(ys, &passive, &hinge);
            if z.iter().all(|&v| v > 0.0) {
                theta = z;
                fitted = (0..n)
                    .map(|i| {
                        intercept
                            + passive
                                .iter()
                                .zip(&theta)
                                .map(|(&k, t)| t * hinge(k, i))
                                .sum::<f64>()
                    })
                    .collect();
                break;
            }
            let mut alpha = 1.0f64;
            for (t, v) in theta.iter().zip(&z) {
                if *v <= 0.0 {
                    alpha = alpha.min(t / (t - v));
                }
            }
            for (t, v) in theta.iter_mut().zip(&z) {
                *t += alpha * (v - *t);
            }
            let mut j = 0;
            while j < passive.len() {
                if theta[j] <= 1e-14 * scale {
                    passive.swap_remove(j);
                    theta.swap_remove(j);
                } else {
                    j += 1;
                }
            }
            if passive.is_empty() {
                fitted = vec![ys.iter().sum::<f64>() / n as f64; n];
                break;
            }
        }
    }
    fitted
}

/// Unconstrained least squares on `[1, hinge(k, .) for k in knots]`.
/// Returns the intercept and the knot coefficients.
fn solve_hinge_ls(
    ys: &[f64],
    knots: &[usize],
    hinge: &dyn Fn(usize, usize) -> f64,
) -> (f64, Vec<f64>) {
    let m = knots.len() + 1;
    let col = |j: usize, i: usize| if j == 0 { 1.0 } else { hinge(knots[j - 1], i) };
    let mut a = vec![vec![0.0; m + 1]; m];
    for (i, &y) in ys.iter().enumerate() {
        let row: Vec<f64> = (0..m).map(|j| col(j, i)).collect();
        for p in 0..m {
            if row[p] == 0.0 {
                continue;
            }
            for q in 0..m {
                a[p][q] += row[p] * row[q];
            }
            a[p][m] += row[p] * y;
        }
    }
    // Gaussian elimination with partial pivoting
    for c in 0..m {
        let piv = (c..m)
            .max_by(|&u, &v| a[u][c].abs().total_cmp(&a[v][c].abs()))
            .unwrap_or(c);
        a.swap(c, piv);
        let pivot = a[c].clone();
        if pivot[c].abs() < 1e-300 {
            continue;
        }
        for (r, row) in a.iter_mut().enumerate() {
            let f = row[c] / pivot[c];
            if r != c && f != 0.0 {
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let sol: Vec<f64> = (0..m)
        .map(|j| {
            if a[j][j].abs() < 1e-300 {
                0.0
            } else {
                a[j][m] / a[j][j]
            }
        })
        .collect();
    (sol[0], sol[1..].to_vec())
}
