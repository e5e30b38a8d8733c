//! Log-log rate fits and the rate checks built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::MovingFrameNorms;

pub const MIN_SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares slope of `log v` against `log t` over samples with `t` in `window`.
pub fn fit_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= window.0 && *t <= window.1).collect();
    if pts.len() < MIN_SAMPLES {
        return Err(Error::Fit(format!("{} samples in window {:?}, need {MIN_SAMPLES}", pts.len(), window)));
    }
    let (lo, hi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), (t, _)| (a.min(*t), b.max(*t)));
    if !(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Fit(format!("samples span [{lo}, {hi}], less than a decade")));
    }
    if let Some((t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Fit(format!("nonpositive value {v} at t = {t}")));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icept - slope * x).powi(2)).sum();
    let stderr = if pts.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RateFit { exponent: slope, stderr, window, r_squared, samples: pts.len() })
}

/// `n` log-spaced times from `t0` to `t1` inclusive.
pub fn log_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t1];
    }
    let (a, b) = (t0.ln(), t1.ln());
    (0..n).map(|i| if i + 1 == n { t1 } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTargets {
    /// Upper bound for the acoustic-energy exponent.
    pub acoustic_max: f64,
    /// Upper bounds for the `‖P1‖` and `‖P2‖` exponents.
    pub p1_max: f64,
    pub p2_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub acoustic: RateFit,
    pub p1: RateFit,
    pub p2: RateFit,
    pub targets: RateTargets,
    pub acoustic_ok: bool,
    pub p1_ok: bool,
    pub p2_ok: bool,
}

impl RateReport {
    pub fn passed(&self) -> bool {
        self.acoustic_ok && self.p1_ok && self.p2_ok
    }
}

/// Fits `‖Q‖² + M⁻²‖ρ‖²`, `‖P1‖`, `‖P2‖` over `window` and compares against `targets`.
pub fn theorem_checks(times: &[f64], norms: &[MovingFrameNorms], mach: f64, window: (f64, f64), targets: RateTargets) -> Result<RateReport> {
    if times.len() != norms.len() {
        return Err(Error::GridMismatch("times and norms differ in length".into()));
    }
    let m2 = 1.0 / (mach * mach);
    let series = |f: &dyn Fn(&MovingFrameNorms) -> f64| -> Vec<(f64, f64)> { times.iter().zip(norms).map(|(t, n)| (*t, f(n))).collect() };
    let acoustic = fit_rate(&series(&|n| n.q_energy + m2 * n.rho_norm * n.rho_norm), window)?;
    let p1 = fit_rate(&series(&|n| n.p1_norm), window)?;
    let p2 = fit_rate(&series(&|n| n.p2_norm), window)?;
    Ok(RateReport {
        acoustic_ok: acoustic.exponent <= targets.acoustic_max,
        p1_ok: p1.exponent <= targets.p1_max,
        p2_ok: p2.exponent <= targets.p2_max,
        acoustic,
        p1,
        p2,
        targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law() {
        let s: Vec<(f64, f64)> = log_times(1.0, 100.0, 40).into_iter().map(|t| (t, 3.0 * t * t)).collect();
        let f = fit_rate(&s, (1.0, 100.0)).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-10);
        assert!(f.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn constant() {
        let s: Vec<(f64, f64)> = log_times(1.0, 100.0, 40).into_iter().map(|t| (t, 5.0)).collect();
        assert!(fit_rate(&s, (1.0, 100.0)).unwrap().exponent.abs() < 1e-12);
    }

    #[test]
    fn japanese_bracket() {
        let s: Vec<(f64, f64)> = log_times(20.0, 500.0, 60).into_iter().map(|t| (t, (1.0 + t * t).sqrt())).collect();
        assert!((fit_rate(&s, (20.0, 500.0)).unwrap().exponent - 1.0).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_windows() {
        let s: Vec<(f64, f64)> = log_times(20.0, 50.0, 60).into_iter().map(|t| (t, t)).collect();
        assert!(fit_rate(&s, (20.0, 50.0)).is_err());
        let s: Vec<(f64, f64)> = log_times(1.0, 100.0, 10).into_iter().map(|t| (t, t)).collect();
        assert!(fit_rate(&s, (1.0, 100.0)).is_err());
        let s: Vec<(f64, f64)> = log_times(1.0, 100.0, 30).into_iter().map(|t| (t, t - 2.0)).collect();
        assert!(fit_rate(&s, (1.0, 100.0)).is_err());
    }
}
