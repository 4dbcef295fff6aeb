use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DistanceField, ScalarField};
use crate::norms::golden_max;
use crate::pde::{ProblemSpec, Regime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// `log u = log C₀ − α log d`.
    PowerLaw,
    /// `u = C₀ log(1/d) + c`.
    Logarithmic,
}

impl FitMode {
    /// Logarithmic iff `q = 2` and the source is not in the fast regime.
    pub fn for_problem(problem: &ProblemSpec) -> Self {
        if problem.q == 2.0 && problem.regime() != Regime::Fast {
            FitMode::Logarithmic
        } else {
            FitMode::PowerLaw
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupFit {
    pub alpha_fit: f64,
    pub c0_fit: f64,
    pub band: (f64, f64),
    pub r_squared: f64,
    pub mode: FitMode,
    pub nodes: usize,
}

/// Minimum band population.
pub const MIN_BAND_NODES: usize = 30;

/// Default band `[5h, min(δ₀, 0.2·inradius)]`.
pub fn default_band(dist: &DistanceField, delta0: f64) -> (f64, f64) {
    (5.0 * dist.grid().h, delta0.min(0.2 * dist.inradius()))
}

fn band_samples(u: &ScalarField, dist: &DistanceField, band: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let h = dist.grid().h;
    if band.0 < 3.0 * h * (1.0 - 1e-12) || !(band.1 > band.0) {
        return Err(Error::InvalidArgument(format!(
            "fit band {band:?} must satisfy 3h = {} <= d_min < d_max",
            3.0 * h
        )));
    }
    let grid = u.grid();
    let samples: Vec<(f64, f64)> = (0..grid.len())
        .filter(|&k| grid.is_interior(k))
        .filter_map(|k| {
            let d = dist.signed(k);
            (d >= band.0 && d <= band.1).then_some(())?;
            u.get(k).map(|v| (d, v))
        })
        .collect();
    if samples.len() < MIN_BAND_NODES {
        return Err(Error::InsufficientBand {
            found: samples.len(),
            required: MIN_BAND_NODES,
        });
    }
    Ok(samples)
}

/// Least squares `y = a + b·x`; returns `(a, b, r²)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (a, b, r2)
}

/// Leading-order rate from nodes with `band.0 ≤ d_H ≤ band.1`; the mode is
/// logarithmic iff `q = 2`.
pub fn fit_blowup_rate(u: &ScalarField, dist: &DistanceField, q: f64, band: (f64, f64)) -> Result<BlowupFit> {
    let mode = if q == 2.0 { FitMode::Logarithmic } else { FitMode::PowerLaw };
    fit_blowup_rate_with_mode(u, dist, mode, band)
}

pub fn fit_blowup_rate_with_mode(
    u: &ScalarField,
    dist: &DistanceField,
    mode: FitMode,
    band: (f64, f64),
) -> Result<BlowupFit> {
    let samples = band_samples(u, dist, band)?;
    let (alpha_fit, c0_fit, r_squared) = match mode {
        FitMode::PowerLaw => {
            if let Some(&(_, v)) = samples.iter().find(|(_, v)| *v <= 0.0) {
                return Err(Error::InvalidArgument(format!("power-law fit needs u > 0, found {v}")));
            }
            let xs: Vec<f64> = samples.iter().map(|(d, _)| d.ln()).collect();
            let ys: Vec<f64> = samples.iter().map(|(_, v)| v.ln()).collect();
            let (a, b, r2) = linear_fit(&xs, &ys);
            (-b, a.exp(), r2)
        }
        FitMode::Logarithmic => {
            let xs: Vec<f64> = samples.iter().map(|(d, _)| -d.ln()).collect();
            let ys: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
            let (_, b, r2) = linear_fit(&xs, &ys);
            (0.0, b, r2)
        }
    };
    Ok(BlowupFit {
        alpha_fit,
        c0_fit,
        band,
        r_squared,
        mode,
        nodes: samples.len(),
    })
}

/// Three-parameter fit `u ≈ C₀ d^{−α} + b`, separating the leading term
/// from the bounded part of the solution. Diagnostic only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineFit {
    pub alpha_fit: f64,
    pub c0_fit: f64,
    pub constant: f64,
    pub rms: f64,
}

pub fn fit_power_with_constant(u: &ScalarField, dist: &DistanceField, band: (f64, f64)) -> Result<AffineFit> {
    let samples = band_samples(u, dist, band)?;
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let solve = |alpha: f64| {
        let xs: Vec<f64> = samples.iter().map(|(d, _)| d.powf(-alpha)).collect();
        let (b, c, _) = linear_fit(&xs, &ys);
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (b + c * x - y).powi(2)).sum();
        (b, c, rss)
    };
    let (alpha, _) = golden_max(|a| -solve(a).2, 0.05, 4.0, 80);
    let (b, c, rss) = solve(alpha);
    Ok(AffineFit {
        alpha_fit: alpha,
        c0_fit: c,
        constant: b,
        rms: (rss / samples.len() as f64).sqrt(),
    })
}
