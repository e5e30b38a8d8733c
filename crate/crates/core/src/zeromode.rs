//! The x-averaged (k = 0) dynamics: a 1-D acoustic wave for `(ρ̄, ᾱ)` and the ω̄ update.
//!
//! Fields are stored as η-spectra on the lattice of a [`FrequencyGrid`]. `g`, `b` from the
//! profile stand in for `U′`, `U″` (exact at Couette).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, Dopri5};
use crate::profile::{Kernel, ProfileSpectrum};
use crate::spectral::{FlowState, FrequencyGrid, ThirdField, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroModeState {
    pub rho_bar: Vec<C64>,
    pub alpha_bar: Vec<C64>,
    pub omega_bar: Vec<C64>,
    pub t: f64,
    pub mach: f64,
}

impl ZeroModeState {
    pub fn new(rho_bar: Vec<C64>, alpha_bar: Vec<C64>, omega_bar: Vec<C64>, mach: f64) -> Result<Self> {
        if rho_bar.len() != alpha_bar.len() || rho_bar.len() != omega_bar.len() || rho_bar.len() % 2 == 0 {
            return Err(Error::GridMismatch("zero-mode slices must share an odd length".into()));
        }
        if !(mach > 0.0) {
            return Err(Error::Domain(format!("Mach number must be positive, got {mach}")));
        }
        let z = Self { rho_bar, alpha_bar, omega_bar, t: 0.0, mach };
        z.check_mean()?;
        Ok(z)
    }

    /// The k = 0 row of a [`FlowState`] holding `(ρ, α, ω)`.
    pub fn from_flow(state: &FlowState, profile: Option<&ProfileSpectrum>) -> Result<Self> {
        let om = state.omega(profile);
        Self::new(state.r.row(0).to_vec(), state.a.row(0).to_vec(), om.row(0).to_vec(), state.mach)
    }

    fn check_mean(&self) -> Result<()> {
        let c = self.alpha_bar.len() / 2;
        let scale = self.alpha_bar.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if self.alpha_bar[c].norm() > 1e-14 * scale.max(1e-300) {
            return Err(Error::InvalidField("ᾱ must have zero y-mean".into()));
        }
        Ok(())
    }
}

fn etas(n: usize, d_eta: f64) -> impl Iterator<Item = f64> {
    let c = (n / 2) as f64;
    (0..n).map(move |j| (j as f64 - c) * d_eta)
}

/// Per-η closed-form rotation of `(ρ̄, ᾱ)` over time `t`, with `ω = η/M`.
pub fn wave_rotation(eta: f64, mach: f64, t: f64, rho: C64, alpha: C64) -> (C64, C64) {
    let w = eta.abs() / mach;
    if w == 0.0 {
        return (rho - alpha * t, alpha);
    }
    let (s, c) = (w * t).sin_cos();
    (rho * c - alpha * (s / w), alpha * c + rho * (w * s))
}

/// `Σ Δη (η²/M²|ρ̂|² + |α̂|²)`.
pub fn wave_energy(z: &ZeroModeState, d_eta: f64) -> f64 {
    let m2 = 1.0 / (z.mach * z.mach);
    etas(z.rho_bar.len(), d_eta).zip(z.rho_bar.iter().zip(&z.alpha_bar)).map(|(e, (r, a))| d_eta * (e * e * m2 * r.norm_sqr() + a.norm_sqr())).sum()
}

/// States at each of `times`, computed in closed form from `state`.
pub fn evolve_zero(state: &ZeroModeState, profile: &ProfileSpectrum, times: &[f64]) -> Result<Vec<ZeroModeState>> {
    state.check_mean()?;
    let n = state.rho_bar.len();
    if n != profile.n_eta + 1 {
        return Err(Error::GridMismatch("profile and zero-mode lattices differ".into()));
    }
    let d = profile.d_eta;
    let c = n / 2;
    times
        .iter()
        .map(|&t| {
            let dt = t - state.t;
            let mut rho = Vec::with_capacity(n);
            let mut alpha = Vec::with_capacity(n);
            for (j, e) in etas(n, d).enumerate() {
                let (r, a) = wave_rotation(e, state.mach, dt, state.rho_bar[j], state.alpha_bar[j]);
                rho.push(r);
                alpha.push(a);
            }
            // ∫ᾱ = ρ̄_in − ρ̄(t); ∫v̄₂ has symbol 1/(iη), mean fixed to 0.
            let drho: Vec<C64> = state.rho_bar.iter().zip(&rho).map(|(a, b)| a - b).collect();
            let dv2: Vec<C64> = etas(n, d)
                .zip(&drho)
                .enumerate()
                .map(|(j, (e, x))| if j == c { C64::new(0.0, 0.0) } else { x / C64::new(0.0, e) })
                .collect();
            let gm1 = profile.conv_gm1(&drho);
            let bv = profile.conv(Kernel::B, &dv2);
            let omega = (0..n).map(|j| state.omega_bar[j] + drho[j] + gm1[j] + bv[j]).collect();
            Ok(ZeroModeState { rho_bar: rho, alpha_bar: alpha, omega_bar: omega, t, mach: state.mach })
        })
        .collect()
}

/// Standing wave `ρ̄ = cos(η₀y)cos(η₀t/M)`, `ᾱ = (η₀/M)cos(η₀y)sin(η₀t/M)`, `ω̄ = ω̄_in + (1 − cos(η₀t/M))cos(η₀y)`
/// at Couette with `ω̄_in = 0`, as spectra on `grid` (η₀ must be a lattice point).
pub fn standing_wave(grid: &FrequencyGrid, eta0: f64, mach: f64, t: f64) -> Result<ZeroModeState> {
    let j = grid.eta_index(eta0).ok_or_else(|| Error::Domain(format!("{eta0} is not on the η lattice")))?;
    if eta0 == 0.0 {
        return Err(Error::Domain("standing wave needs η₀ ≠ 0".into()));
    }
    let n = grid.n_points();
    let jm = grid.mirror(j);
    let (s, c) = (eta0 * t / mach).sin_cos();
    let amp = 0.5 / grid.d_eta();
    let mut rho = vec![C64::new(0.0, 0.0); n];
    let mut alpha = rho.clone();
    let mut omega = rho.clone();
    for i in [j, jm] {
        rho[i] = C64::new(amp * c, 0.0);
        alpha[i] = C64::new(amp * eta0.abs() / mach * s, 0.0);
        omega[i] = C64::new(amp * (1.0 - c), 0.0);
    }
    Ok(ZeroModeState { rho_bar: rho, alpha_bar: alpha, omega_bar: omega, t, mach })
}

/// Direct Couette integration of `(R, A, Ω)` for every mode of `state` (k = 0 included) with
/// `∂_tR = −A`, `∂_tA = (p′/p)A + (p/M²)R − (2k²/p)Ω`, `∂_tΩ = A`. The reference for the
/// decoupling check.
pub fn couette_direct(state: &FlowState, times: &[f64], tol: f64) -> Result<Vec<FlowState>> {
    if state.third != ThirdField::Omega {
        return Err(Error::Domain("couette_direct expects W flagged as Omega".into()));
    }
    let g = state.grid();
    let n = g.n_points();
    let etas = g.etas();
    let m2 = 1.0 / (state.mach * state.mach);
    let mut out: Vec<FlowState> = times
        .iter()
        .map(|&t| {
            let mut s = FlowState::zeros(g, ThirdField::Omega, state.mach);
            s.t = t;
            s
        })
        .collect();
    let opts = Dopri5::new(tol).with_atol(tol * 1e-6);
    for k in g.ks() {
        let kf = k as f64;
        let mut y0 = state.r.row(k).to_vec();
        y0.extend_from_slice(state.a.row(k));
        y0.extend_from_slice(state.w.row(k));
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| -> Result<()> {
            for j in 0..n {
                let u = etas[j] - kf * t;
                let p = kf * kf + u * u;
                let (r, a, o) = (y[j], y[n + j], y[2 * n + j]);
                dy[j] = -a;
                dy[2 * n + j] = a;
                dy[n + j] = if p == 0.0 { C64::new(0.0, 0.0) } else { (-2.0 * kf * u / p) * a + (p * m2) * r - (2.0 * kf * kf / p) * o };
            }
            Ok(())
        };
        let (ys, _) = integrate::solve(rhs, state.t, &y0, times, &opts, |_, _| Ok(()))?;
        for (s, y) in out.iter_mut().zip(ys) {
            s.r.row_mut(k).copy_from_slice(&y[..n]);
            s.a.row_mut(k).copy_from_slice(&y[n..2 * n]);
            s.w.row_mut(k).copy_from_slice(&y[2 * n..]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data() {
        let g = FrequencyGrid::new(1, 4.0, 8).unwrap();
        let p = ProfileSpectrum::couette(&g);
        let z = vec![C64::new(0.0, 0.0); 9];
        let s = ZeroModeState::new(z.clone(), z.clone(), z, 1.0).unwrap();
        let out = evolve_zero(&s, &p, &[3.0]).unwrap();
        assert!(out[0].rho_bar.iter().chain(&out[0].omega_bar).all(|x| x.norm() == 0.0));
    }

    #[test]
    fn nonzero_mean_rejected() {
        let mut a = vec![C64::new(0.0, 0.0); 9];
        a[4] = C64::new(1.0, 0.0);
        let z = vec![C64::new(0.0, 0.0); 9];
        assert!(ZeroModeState::new(z.clone(), a, z, 1.0).is_err());
    }

    #[test]
    fn standing_wave_closed_form() {
        let g = FrequencyGrid::new(1, 4.0, 8).unwrap();
        let p = ProfileSpectrum::couette(&g);
        let s0 = standing_wave(&g, 2.0, 0.5, 0.0).unwrap();
        for t in [0.3, 7.0, 55.5] {
            let a = &evolve_zero(&s0, &p, &[t]).unwrap()[0];
            let b = standing_wave(&g, 2.0, 0.5, t).unwrap();
            for j in 0..9 {
                assert!((a.rho_bar[j] - b.rho_bar[j]).norm() < 1e-12);
                assert!((a.alpha_bar[j] - b.alpha_bar[j]).norm() < 1e-12);
                assert!((a.omega_bar[j] - b.omega_bar[j]).norm() < 1e-12);
            }
        }
    }
}
