//! Closed-form weights and multipliers, with sampled audits of their commutation bounds.
//!
//! `m` and `z` follow their defining ODEs `∂_t m = N k²/p·m`, `∂_t z = |k|/p·z` with unit initial
//! value, so both increase in time.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::japanese;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub eps_tilde: f64,
    pub big_n: f64,
    pub c_exp: f64,
    pub mach: f64,
}

impl WeightParams {
    /// Defaults `N = 32`, `c = 1/4 − ε̃`.
    pub fn new(eps_tilde: f64, mach: f64) -> Result<Self> {
        Self::with(eps_tilde, 32.0, 0.25 - eps_tilde, mach)
    }

    pub fn with(eps_tilde: f64, big_n: f64, c_exp: f64, mach: f64) -> Result<Self> {
        if !(eps_tilde >= 0.0 && eps_tilde < 1.0 / 16.0) {
            return Err(Error::Domain(format!("eps_tilde must lie in [0, 1/16), got {eps_tilde}")));
        }
        if !(big_n > 0.0) {
            return Err(Error::Domain(format!("N must be positive, got {big_n}")));
        }
        if !(c_exp >= 0.0 && c_exp <= 1.0) {
            return Err(Error::Domain(format!("c must lie in [0, 1], got {c_exp}")));
        }
        if !(mach > 0.0) {
            return Err(Error::Domain(format!("Mach number must be positive, got {mach}")));
        }
        Ok(Self { eps_tilde, big_n, c_exp, mach })
    }

    /// Whether `c < 8/(25(1+ε̃))`, the range where `h ≤ (4/5)m⁻¹w^{−(1−c)}`.
    pub fn h_bound_admissible(&self) -> bool {
        self.c_exp < 8.0 / (25.0 * (1.0 + self.eps_tilde))
    }
}

fn nonzero(k: f64) -> Result<()> {
    if k == 0.0 {
        Err(Error::ZeroWavenumber)
    } else {
        Ok(())
    }
}

/// `(p, p′) = (k² + (η−kt)², −2k(η−kt))`.
pub fn p_eval(t: f64, k: f64, eta: f64) -> Result<(f64, f64)> {
    nonzero(k)?;
    Ok(p_raw(t, k, eta))
}

#[inline]
pub fn p_raw(t: f64, k: f64, eta: f64) -> (f64, f64) {
    let x = eta - k * t;
    (k * k + x * x, -2.0 * k * x)
}

pub fn w_eval(t: f64, k: f64, eta: f64, params: &WeightParams) -> Result<f64> {
    nonzero(k)?;
    Ok(w_raw(t, k, eta, params.eps_tilde))
}

#[inline]
pub fn w_raw(t: f64, k: f64, eta: f64, eps_tilde: f64) -> f64 {
    let (p, _) = p_raw(t, k, eta);
    let p0 = k * k + eta * eta;
    let e = 1.0 + eps_tilde;
    if eta * k > 0.0 {
        if t < eta / k {
            (p0 / p).powf(e)
        } else {
            (p0 * p / (k * k * k * k)).powf(e)
        }
    } else {
        (p / p0).powf(e)
    }
}

#[inline]
fn arctan_gain(t: f64, k: f64, eta: f64) -> f64 {
    (eta / k).atan() - (eta / k - t).atan()
}

pub fn m_eval(t: f64, k: f64, eta: f64, params: &WeightParams) -> Result<f64> {
    nonzero(k)?;
    Ok(m_raw(t, k, eta, params.big_n))
}

#[inline]
pub fn m_raw(t: f64, k: f64, eta: f64, big_n: f64) -> f64 {
    (big_n * arctan_gain(t, k, eta)).exp()
}

pub fn z_eval(t: f64, k: f64, eta: f64) -> Result<f64> {
    nonzero(k)?;
    Ok(z_raw(t, k, eta))
}

#[inline]
pub fn z_raw(t: f64, k: f64, eta: f64) -> f64 {
    (arctan_gain(t, k, eta) / k.abs()).exp()
}

pub fn dtw_over_w(t: f64, k: f64, eta: f64, params: &WeightParams) -> f64 {
    let (p, pp) = p_raw(t, k, eta);
    (1.0 + params.eps_tilde) * pp.abs() / p
}

pub fn dtm_over_m(t: f64, k: f64, eta: f64, params: &WeightParams) -> f64 {
    let (p, _) = p_raw(t, k, eta);
    params.big_n * k * k / p
}

pub fn h_eval(t: f64, k: f64, eta: f64, params: &WeightParams) -> Result<f64> {
    nonzero(k)?;
    Ok(h_raw(t, k, eta, params))
}

#[inline]
pub fn h_raw(t: f64, k: f64, eta: f64, params: &WeightParams) -> f64 {
    let (p, pp) = p_raw(t, k, eta);
    let w = w_raw(t, k, eta, params.eps_tilde);
    let m = m_raw(t, k, eta, params.big_n);
    (params.c_exp * (1.0 + params.eps_tilde) * pp.abs() / p).sqrt() / m * w.powf(-(1.0 - params.c_exp))
}

/// `v² = w^{2(1−c)}/p`, the Couette specialization of `(−Δ_t)⁻¹w^{2(1−c)}`.
pub fn v_couette_sq(t: f64, k: f64, eta: f64, params: &WeightParams) -> Result<f64> {
    nonzero(k)?;
    let (p, _) = p_raw(t, k, eta);
    Ok(w_raw(t, k, eta, params.eps_tilde).powf(2.0 * (1.0 - params.c_exp)) / p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEval {
    pub p: f64,
    pub p_prime: f64,
    pub w: f64,
    pub m: f64,
    pub z: f64,
    pub h: f64,
    pub dtw_over_w: f64,
    pub dtm_over_m: f64,
}

pub fn eval_all(t: f64, k: f64, eta: f64, params: &WeightParams) -> Result<WeightEval> {
    nonzero(k)?;
    let (p, pp) = p_raw(t, k, eta);
    Ok(WeightEval {
        p,
        p_prime: pp,
        w: w_raw(t, k, eta, params.eps_tilde),
        m: m_raw(t, k, eta, params.big_n),
        z: z_raw(t, k, eta),
        h: h_raw(t, k, eta, params),
        dtw_over_w: dtw_over_w(t, k, eta, params),
        dtm_over_m: dtm_over_m(t, k, eta, params),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub t_max: f64,
    pub n_t: usize,
    pub k_max: usize,
    pub eta_max: f64,
    pub n_eta: usize,
}

impl SampleSpec {
    pub fn doubled(&self) -> Self {
        Self {
            t_max: 2.0 * self.t_max,
            n_t: 2 * self.n_t,
            k_max: 2 * self.k_max,
            eta_max: 2.0 * self.eta_max,
            n_eta: 2 * self.n_eta,
        }
    }

    fn ts(&self) -> Vec<f64> {
        (0..self.n_t).map(|i| self.t_max * i as f64 / (self.n_t.max(2) - 1) as f64).collect()
    }

    fn etas(&self) -> Vec<f64> {
        (0..self.n_eta)
            .map(|i| -self.eta_max + 2.0 * self.eta_max * i as f64 / (self.n_eta.max(2) - 1) as f64)
            .collect()
    }
}

pub const AUDIT_NAMES: [&str; 8] =
    ["p_ratio", "dp_over_p", "w_ratio", "dw_over_w", "m_ratio", "dm_over_m", "time_over_p", "time_over_w"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub name: String,
    pub fitted_constant: f64,
    pub fitted_constant_doubled: f64,
    pub finite: bool,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactBounds {
    pub samples: usize,
    pub h_bound_violations: usize,
    pub trivp_violations: usize,
    pub m_range_violations: usize,
    pub z_range_violations: usize,
}

impl ExactBounds {
    pub fn all_hold(&self) -> bool {
        self.h_bound_violations == 0 && self.trivp_violations == 0 && self.m_range_violations == 0 && self.z_range_violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub params: WeightParams,
    pub sample: SampleSpec,
    pub entries: Vec<AuditEntry>,
    pub exact: ExactBounds,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.finite && e.stable) && self.exact.all_hold()
    }
}

/// Worst-case `LHS/RHS` (without constant) of every commutation bound over the sample.
pub fn worst_ratios(sample: &SampleSpec, params: &WeightParams) -> Result<[f64; 8]> {
    if sample.n_t == 0 || sample.n_eta == 0 || sample.k_max == 0 {
        return Err(Error::Domain("empty audit sample".into()));
    }
    let e = params.eps_tilde;
    let n = params.big_n;
    let ts = sample.ts();
    let etas = sample.etas();
    let mut worst = [0f64; 8];
    // Sobolev exponent and β used for the two time-extraction bounds.
    let beta = 1.0;
    for k in 1..=sample.k_max {
        let k = k as f64;
        for &t in &ts {
            let jt = japanese(t);
            let rows: Vec<(f64, f64, f64, f64)> = etas
                .iter()
                .map(|&eta| {
                    let (p, pp) = p_raw(t, k, eta);
                    (p, pp.abs() / p, w_raw(t, k, eta, e), m_raw(t, k, eta, n))
                })
                .collect();
            for (i, &eta) in etas.iter().enumerate() {
                let (p_e, pp_e, w_e, m_e) = rows[i];
                let kn2 = 1.0 + k * k + eta * eta;
                worst[6] = worst[6].max((jt * jt / (p_e * kn2)).powf(beta));
                worst[7] = worst[7].max(jt.powf(2.0 * beta * (1.0 + e)) / (w_e.powf(beta) * kn2.powf(beta * (1.0 + e))));
                for (l, &xi) in etas.iter().enumerate() {
                    let (p_x, pp_x, w_x, m_x) = rows[l];
                    let d2 = 1.0 + (eta - xi) * (eta - xi);
                    let d = d2.sqrt();
                    worst[0] = worst[0].max(p_x / (p_e * d2));
                    worst[1] = worst[1].max(pp_e / (d2 * d * k * k / p_x + d2 * pp_x));
                    worst[2] = worst[2].max(w_x / (w_e * d2.powf(2.0 * (1.0 + e))));
                    worst[3] = worst[3].max((1.0 + e) * pp_e / (d2 * d * k * k / p_x + d2 * (1.0 + e) * pp_x));
                    worst[4] = worst[4].max(m_e / m_x);
                    worst[5] = worst[5].max(p_x / (p_e * d2));
                }
            }
        }
    }
    Ok(worst)
}

pub fn exact_bounds(sample: &SampleSpec, params: &WeightParams) -> ExactBounds {
    let mut out = ExactBounds { samples: 0, h_bound_violations: 0, trivp_violations: 0, m_range_violations: 0, z_range_violations: 0 };
    let (lo_m, hi_m) = ((-params.big_n * PI).exp(), (params.big_n * PI).exp());
    let (lo_z, hi_z) = ((-PI).exp(), PI.exp());
    for k in 1..=sample.k_max {
        for sign in [1.0, -1.0] {
            let k = sign * k as f64;
            for &t in &sample.ts() {
                for &eta in &sample.etas() {
                    out.samples += 1;
                    let (p, pp) = p_raw(t, k, eta);
                    let w = w_raw(t, k, eta, params.eps_tilde);
                    let m = m_raw(t, k, eta, params.big_n);
                    let h = h_raw(t, k, eta, params);
                    if params.h_bound_admissible() && h > 0.8 / m * w.powf(-(1.0 - params.c_exp)) {
                        out.h_bound_violations += 1;
                    }
                    if pp.abs() / p > 2.0 * k.abs() / p.sqrt() {
                        out.trivp_violations += 1;
                    }
                    if !(m >= lo_m && m <= hi_m) {
                        out.m_range_violations += 1;
                    }
                    let z = z_raw(t, k, eta);
                    if !(z >= lo_z && z <= hi_z) {
                        out.z_range_violations += 1;
                    }
                }
            }
        }
    }
    out
}

pub fn audit_weight_inequalities(sample: &SampleSpec, params: &WeightParams) -> Result<AuditReport> {
    let base = worst_ratios(sample, params)?;
    let doubled = worst_ratios(&sample.doubled(), params)?;
    let entries = AUDIT_NAMES
        .iter()
        .zip(base.iter().zip(doubled.iter()))
        .map(|(name, (&c, &c2))| {
            let finite = c.is_finite() && c2.is_finite();
            let ratio = c2 / c;
            AuditEntry {
                name: name.to_string(),
                fitted_constant: c,
                fitted_constant_doubled: c2,
                finite,
                stable: finite && ratio < 2.0 && ratio > 0.5,
            }
        })
        .collect();
    Ok(AuditReport { params: *params, sample: *sample, entries, exact: exact_bounds(sample, params) })
}
