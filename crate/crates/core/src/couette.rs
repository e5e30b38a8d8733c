//! Per-mode Couette dynamics for `Ẑ = (R̂/(M p^{1/4}), Â/p^{3/4})`.
//!
//! `dZ/dt = L(t)Z + F(t)Ξ_in` is advanced with a frozen-frame exponential scheme: over a step
//! the generator is frozen at the midpoint, `e^{σL_m}` is applied exactly, and the slowly varying
//! remainder is integrated in the rotating frame with exact oscillatory moments. The step size is
//! therefore set by how fast `L` changes, not by the acoustic frequency `√p/M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{cadd, cnorm, cosh_moments, cscale_real, CVec2, Mat2};
use crate::spectral::C64;
use crate::weights::p_raw;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub k: i64,
    pub eta: f64,
    pub mach: f64,
    pub z: CVec2,
    pub xi_in: C64,
    pub t: f64,
}

impl ModeState {
    pub fn new(k: i64, eta: f64, mach: f64, z: CVec2, xi_in: C64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroWavenumber);
        }
        if !(mach > 0.0) {
            return Err(Error::Domain(format!("Mach number must be positive, got {mach}")));
        }
        Ok(Self { k, eta, mach, z, xi_in, t: 0.0 })
    }

    /// From physical amplitudes at `t = 0`: `Z = (ρ/(M p₀^{1/4}), α/p₀^{3/4})`, `Ξ = ρ + ω`.
    pub fn from_rho_alpha_omega(k: i64, eta: f64, mach: f64, rho: C64, alpha: C64, omega: C64) -> Result<Self> {
        let z = normalize(0.0, k, eta, mach, rho, alpha)?;
        Self::new(k, eta, mach, z, rho + omega)
    }

    /// `(R̂, Â)` recovered at the state's time.
    pub fn r_a(&self) -> (C64, C64) {
        denormalize(self.t, self.k, self.eta, self.mach, &self.z)
    }
}

pub fn normalize(t: f64, k: i64, eta: f64, mach: f64, r: C64, a: C64) -> Result<CVec2> {
    if k == 0 {
        return Err(Error::ZeroWavenumber);
    }
    let (p, _) = p_raw(t, k as f64, eta);
    Ok([r / (mach * p.powf(0.25)), a / p.powf(0.75)])
}

pub fn denormalize(t: f64, k: i64, eta: f64, mach: f64, z: &CVec2) -> (C64, C64) {
    let (p, _) = p_raw(t, k as f64, eta);
    (z[0] * mach * p.powf(0.25), z[1] * p.powf(0.75))
}

#[inline]
fn l_f_raw(t: f64, k: f64, eta: f64, mach: f64) -> (Mat2, [f64; 2]) {
    let (p, pp) = p_raw(t, k, eta);
    let sp = p.sqrt();
    let a = pp / (4.0 * p);
    let b = sp / mach;
    let c = 2.0 * mach * k * k / (p * sp);
    (Mat2([[-a, -b], [b + c, a]]), [0.0, -2.0 * k * k / (p * p.powf(0.75))])
}

/// `L = [[−p′/(4p), −√p/M], [√p/M + 2Mk²/p^{3/2}, p′/(4p)]]`, `F = (0, −2k²/p^{7/4})`.
pub fn assemble_l_f(t: f64, k: i64, eta: f64, mach: f64) -> Result<(Mat2, [f64; 2])> {
    if k == 0 {
        return Err(Error::ZeroWavenumber);
    }
    if !(mach > 0.0) {
        return Err(Error::Domain(format!("Mach number must be positive, got {mach}")));
    }
    Ok(l_f_raw(t, k as f64, eta, mach))
}

/// `(L, L′, L″)` and the second forcing component with its first two time derivatives.
fn l_f_jet(t: f64, k: f64, eta: f64, mach: f64) -> ([Mat2; 3], [f64; 3]) {
    let (p, p1) = p_raw(t, k, eta);
    let p2 = 2.0 * k * k;
    let sp = p.sqrt();
    let a = [p1 / (4.0 * p), p2 / (4.0 * p) - p1 * p1 / (4.0 * p * p), -3.0 * p1 * p2 / (4.0 * p * p) + p1 * p1 * p1 / (2.0 * p * p * p)];
    let b = [sp / mach, p1 / (2.0 * mach * sp), p2 / (2.0 * mach * sp) - p1 * p1 / (4.0 * mach * p * sp)];
    let mk = mach * k * k;
    let c = [2.0 * mk / (p * sp), -3.0 * mk * p1 * p.powf(-2.5), -3.0 * mk * (p2 * p.powf(-2.5) - 2.5 * p1 * p1 * p.powf(-3.5))];
    let kk = k * k;
    let f = [-2.0 * kk * p.powf(-1.75), 3.5 * kk * p1 * p.powf(-2.75), 3.5 * kk * (p2 * p.powf(-2.75) - 2.75 * p1 * p1 * p.powf(-3.75))];
    let l = |i: usize| Mat2([[-a[i], -b[i]], [b[i] + c[i], a[i]]]);
    ([l(0), l(1), l(2)], f)
}

/// Quasi-static corrector `K = −L⁻¹F − L⁻¹(L⁻¹F)′` and the forcing `G = LK + F − K′` left over
/// for `W = Z − KΞ`.
pub fn quasi_static(t: f64, k: f64, eta: f64, mach: f64) -> ([f64; 2], [f64; 2]) {
    let ([l, l1, l2], f) = l_f_jet(t, k, eta, mach);
    let li = l.inverse();
    let add = |x: [f64; 2], y: [f64; 2]| [x[0] + y[0], x[1] + y[1]];
    let sub = |x: [f64; 2], y: [f64; 2]| [x[0] - y[0], x[1] - y[1]];
    let h0 = li.apply_real([0.0, f[0]]);
    let h0d = li.apply_real(sub([0.0, f[1]], l1.apply_real(h0)));
    let u1 = sub(sub([0.0, f[2]], l2.apply_real(h0)), l1.apply_real(h0d));
    let h0dd = li.apply_real(sub(u1, l1.apply_real(h0d)));
    let h1 = li.apply_real(h0d);
    let g = li.apply_real(sub(h0dd, l1.apply_real(h1)));
    let kk = add(h0, h1);
    ([-kk[0], -kk[1]], g)
}

#[inline]
fn forcing(t: f64, k: f64, eta: f64, mach: f64, residual: bool) -> (Mat2, [f64; 2]) {
    if residual {
        let (l, f) = l_f_raw(t, k, eta, mach);
        let _ = f;
        (l, quasi_static(t, k, eta, mach).1)
    } else {
        l_f_raw(t, k, eta, mach)
    }
}

/// One frozen-frame step over `[t0, t0 + h]`: `Z(t0+h) = P·Z(t0) + f·Ξ`.
pub fn frozen_frame_step(t0: f64, h: f64, k: f64, eta: f64, mach: f64) -> (Mat2, [f64; 2]) {
    frozen_frame_step_with(t0, h, k, eta, mach, false)
}

fn frozen_frame_step_with(t0: f64, h: f64, k: f64, eta: f64, mach: f64, residual: bool) -> (Mat2, [f64; 2]) {
    let half = 0.5 * h;
    let (lm, f0) = forcing(t0 + half, k, eta, mach, residual);
    let (la, fa) = forcing(t0, k, eta, mach, residual);
    let (lb, fb) = forcing(t0 + h, k, eta, mach, residual);
    let d1 = (lb - la).scale(1.0 / h);
    let d2 = (lb + la - lm.scale(2.0)).scale(2.0 / (h * h));
    let f1 = [(fb[0] - fa[0]) / h, (fb[1] - fa[1]) / h];
    let f2 = [2.0 * (fb[0] + fa[0] - 2.0 * f0[0]) / (h * h), 2.0 * (fb[1] + fa[1] - 2.0 * f0[1]) / (h * h)];

    let x = -lm.det();
    let mu = cosh_moments(4.0 * x, half);
    let lam = cosh_moments(x, half);
    let c2 = 0.5 * (2.0 * half * half * half / 3.0 + mu.j2c);
    let omega = d2.scale(c2) - (lm * d2 * lm).scale(mu.j2d) + d1.commutator(&lm).scale(mu.j1s);

    let lf1 = lm.apply_real(f1);
    let gamma = [
        f0[0] * lam.j0c + f2[0] * lam.j2c - lf1[0] * lam.j1s,
        f0[1] * lam.j0c + f2[1] * lam.j2c - lf1[1] * lam.j1s,
    ];
    let e = lm.scale(half).exp_traceless();
    let (eo, phi) = omega.exp_phi1_traceless();
    (e * eo * e, (e * phi).apply_real(gamma))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSample {
    pub t: f64,
    pub z: CVec2,
    pub gamma: CVec2,
    pub y: Mat2,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub k: i64,
    pub eta: f64,
    pub mach: f64,
    pub xi_in: C64,
    pub samples: Vec<ModeSample>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
}

impl StepControl {
    pub fn new(tol: f64) -> Self {
        Self { tol, h_init: 1e-2, h_max: 2.0, h_min: 1e-13 }
    }
}

/// Adaptive propagator for one mode carrying `Z`, `Y = Φ_L(0,t)` and `Γ = Y·Z`.
#[derive(Clone, Debug)]
pub struct ModeIntegrator {
    pub k: i64,
    pub eta: f64,
    pub mach: f64,
    pub xi: C64,
    pub t: f64,
    pub z: CVec2,
    pub y: Mat2,
    pub gamma: CVec2,
    pub h: f64,
    pub control: StepControl,
    pub accepted: usize,
    pub rejected: usize,
    scale_floor: f64,
    // with `residual`, `w = Z − KΞ` is the integrated variable
    residual: bool,
    w: CVec2,
}

impl ModeIntegrator {
    pub fn new(mode: &ModeState, control: StepControl) -> Result<Self> {
        if mode.k == 0 {
            return Err(Error::ZeroWavenumber);
        }
        if !(control.tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", control.tol)));
        }
        let floor = 1e-14 * (cnorm(&mode.z) + mode.xi_in.norm()) + f64::MIN_POSITIVE;
        let residual = (mode.k as f64).abs() / mode.mach >= 1.1 && mode.xi_in.norm() > 0.0;
        let w = if residual {
            let (kq, _) = quasi_static(mode.t, mode.k as f64, mode.eta, mode.mach);
            [mode.z[0] - kq[0] * mode.xi_in, mode.z[1] - kq[1] * mode.xi_in]
        } else {
            mode.z
        };
        Ok(Self {
            k: mode.k,
            eta: mode.eta,
            mach: mode.mach,
            xi: mode.xi_in,
            t: mode.t,
            z: mode.z,
            y: Mat2::IDENTITY,
            gamma: mode.z,
            h: control.h_init,
            control,
            accepted: 0,
            rejected: 0,
            scale_floor: floor,
            residual,
            w,
        })
    }

    pub fn sample(&self) -> ModeSample {
        ModeSample { t: self.t, z: self.z, gamma: self.gamma, y: self.y }
    }

    fn compose(&self, t0: f64, h: f64, pieces: usize) -> (Mat2, [f64; 2]) {
        let (k, eta, m) = (self.k as f64, self.eta, self.mach);
        let hh = h / pieces as f64;
        let mut p = Mat2::IDENTITY;
        let mut f = [0.0, 0.0];
        for i in 0..pieces {
            let (pi, fi) = frozen_frame_step_with(t0 + i as f64 * hh, hh, k, eta, m, self.residual);
            let pf = pi.apply_real(f);
            f = [pf[0] + fi[0], pf[1] + fi[1]];
            p = pi * p;
        }
        (p, f)
    }

    /// One accepted step, never passing `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<()> {
        let ctl = self.control;
        loop {
            let mut h = self.h.min(ctl.h_max);
            let last = self.t + h >= t_stop - 1e-12 * t_stop.abs().max(1.0);
            if last {
                h = t_stop - self.t;
            }
            let (p1, f1) = self.compose(self.t, h, 1);
            let (p2, f2) = self.compose(self.t, h, 2);
            let t_new = if last { t_stop } else { self.t + h };
            let w1 = cadd(&p1.apply(&self.w), &cscale_real(f1, self.xi));
            let w2 = cadd(&p2.apply(&self.w), &cscale_real(f2, self.xi));
            let diff = cnorm(&[w1[0] - w2[0], w1[1] - w2[1]]) / 3.0;
            let z2 = if self.residual {
                let (kq, _) = quasi_static(t_new, self.k as f64, self.eta, self.mach);
                cadd(&w2, &cscale_real(kq, self.xi))
            } else {
                w2
            };
            let scale = cnorm(&self.z).max(cnorm(&z2)).max(cnorm(&w2)).max(self.scale_floor);
            let err = diff / ((ctl.tol * h + 4.0 * f64::EPSILON) * scale);
            if err <= 1.0 || !err.is_finite() && diff == 0.0 {
                self.t = t_new;
                self.w = w2;
                self.z = z2;
                self.y = self.y * p2.inverse();
                self.gamma = self.y.apply(&z2);
                self.accepted += 1;
                let grow = if err > 0.0 { (0.8 * err.powf(-1.0 / 3.0)).min(2.0) } else { 2.0 };
                if !last || grow < 1.0 {
                    self.h = (h * grow.max(0.2)).min(ctl.h_max);
                }
                return Ok(());
            }
            self.rejected += 1;
            self.h = h * (0.8 * err.powf(-1.0 / 3.0)).clamp(0.1, 0.5);
            if self.h < ctl.h_min * self.t.abs().max(1.0) {
                return Err(Error::Integration {
                    t: self.t,
                    h: self.h,
                    reason: format!("step-size underflow for mode (k = {}, eta = {}, M = {})", self.k, self.eta, self.mach),
                });
            }
        }
    }

    pub fn advance_to(&mut self, t_stop: f64, mut observer: impl FnMut(&ModeIntegrator)) -> Result<()> {
        while self.t < t_stop {
            self.step(t_stop)?;
            observer(self);
        }
        Ok(())
    }
}

/// Integrates to `t_end`, recording every accepted step.
pub fn evolve_mode(mode: &ModeState, t_end: f64, tol: f64) -> Result<Trajectory> {
    if !(t_end > mode.t) {
        return Err(Error::Domain(format!("t_end = {t_end} must exceed t = {}", mode.t)));
    }
    let mut it = ModeIntegrator::new(mode, StepControl::new(tol))?;
    let mut samples = vec![it.sample()];
    it.advance_to(t_end, |s| samples.push(s.sample()))?;
    Ok(Trajectory {
        k: mode.k,
        eta: mode.eta,
        mach: mode.mach,
        xi_in: mode.xi_in,
        samples,
        accepted_steps: it.accepted,
        rejected_steps: it.rejected,
    })
}

/// Integrates through the increasing output `times`, sampling exactly at each.
pub fn evolve_mode_at(mode: &ModeState, times: &[f64], control: StepControl) -> Result<Trajectory> {
    let mut it = ModeIntegrator::new(mode, control)?;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        if t < it.t {
            return Err(Error::Domain("output times must be nondecreasing and not before the initial time".into()));
        }
        it.advance_to(t, |_| {})?;
        samples.push(it.sample());
    }
    Ok(Trajectory {
        k: mode.k,
        eta: mode.eta,
        mach: mode.mach,
        xi_in: mode.xi_in,
        samples,
        accepted_steps: it.accepted,
        rejected_steps: it.rejected,
    })
}

/// Key-lemma functional: returns `(Ẽ, E, |a|/β)`.
pub fn tilde_energy(v: [f64; 2], t: f64, k: i64, eta: f64, mach: f64) -> Result<(f64, f64, f64)> {
    let (l, _) = assemble_l_f(t, k, eta, mach)?;
    let a = l.0[1][1];
    let b = -l.0[0][1];
    let c = l.0[1][0] - b;
    let zeta = ((b + c) / b).sqrt();
    let beta = ((b + c) * b).sqrt();
    let e = zeta * v[0] * v[0] + v[1] * v[1] / zeta;
    let et = e + 2.0 * a / beta * v[0] * v[1];
    Ok((et, e, a.abs() / beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularSample {
    pub t: f64,
    pub v: [f64; 2],
    pub vdot: [f64; 2],
    /// `(a, b, c)` of the generator at `t`, when known.
    pub abc: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularReport {
    pub max_residual: f64,
    pub samples_used: usize,
    pub skipped_zero_radius: usize,
    /// Largest `|θ̇ − (b + c·cos θ + a·sin 2θ)|`, the rate formula as printed.
    pub max_dev_cos: Option<f64>,
    /// Largest `|θ̇ − (b + c·cos²θ + a·sin 2θ)|`, the rate obtained from `r²θ̇ = xẏ − ẋy`.
    pub max_dev_cos2: Option<f64>,
}

/// Compares `r²θ̇` (θ̇ by central differences of the unwrapped polar angle) with `V₁V̇₂ − V̇₁V₂`.
pub fn angular_identity_residual(samples: &[AngularSample]) -> AngularReport {
    let mut theta = Vec::with_capacity(samples.len());
    let mut prev: Option<f64> = None;
    for s in samples {
        let raw = s.v[1].atan2(s.v[0]);
        let th = match prev {
            None => raw,
            Some(p) => {
                let mut d = raw - p.rem_euclid(2.0 * std::f64::consts::PI);
                while d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                }
                while d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                p + d
            }
        };
        theta.push(th);
        prev = Some(th);
    }
    let mut out = AngularReport {
        max_residual: 0.0,
        samples_used: 0,
        skipped_zero_radius: 0,
        max_dev_cos: None,
        max_dev_cos2: None,
    };
    for i in 1..samples.len().saturating_sub(1) {
        let s = &samples[i];
        let r2 = s.v[0] * s.v[0] + s.v[1] * s.v[1];
        if r2 == 0.0 {
            out.skipped_zero_radius += 1;
            continue;
        }
        let dth = (theta[i + 1] - theta[i - 1]) / (samples[i + 1].t - samples[i - 1].t);
        let cross = s.v[0] * s.vdot[1] - s.vdot[0] * s.v[1];
        out.max_residual = out.max_residual.max((r2 * dth - cross).abs());
        out.samples_used += 1;
        if let Some([a, b, c]) = s.abc {
            let th = theta[i];
            let d1 = (dth - (b + c * th.cos() + a * (2.0 * th).sin())).abs();
            let d2 = (dth - (b + c * th.cos().powi(2) + a * (2.0 * th).sin())).abs();
            out.max_dev_cos = Some(out.max_dev_cos.unwrap_or(0.0).max(d1));
            out.max_dev_cos2 = Some(out.max_dev_cos2.unwrap_or(0.0).max(d2));
        }
    }
    out
}

/// Real homogeneous Couette trajectory on a uniform time grid, in the form used by
/// [`angular_identity_residual`].
pub fn couette_angular_samples(k: i64, eta: f64, mach: f64, v_in: [f64; 2], t_end: f64, dt: f64, tol: f64) -> Result<Vec<AngularSample>> {
    let n = (t_end / dt).round() as usize;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let mode = ModeState::new(k, eta, mach, [C64::new(v_in[0], 0.0), C64::new(v_in[1], 0.0)], C64::new(0.0, 0.0))?;
    let tr = evolve_mode_at(&mode, &times, StepControl::new(tol))?;
    tr.samples
        .iter()
        .map(|s| {
            let (l, _) = assemble_l_f(s.t, k, eta, mach)?;
            let v = [s.z[0].re, s.z[1].re];
            let a = l.0[1][1];
            let b = -l.0[0][1];
            Ok(AngularSample { t: s.t, v, vdot: l.apply_real(v), abc: Some([a, b, l.0[1][0] - b]) })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LwMode {
    pub k: i64,
    pub eta: f64,
    pub mach: f64,
    pub rho: C64,
    pub alpha: C64,
    pub omega: C64,
}

impl LwMode {
    pub fn mode_state(&self) -> Result<ModeState> {
        ModeState::from_rho_alpha_omega(self.k, self.eta, self.mach, self.rho, self.alpha, self.omega)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LwPerturbation {
    pub original: LwMode,
    pub perturbed: LwMode,
    /// Unit vector added (times `δ·e^{iφ}`) to `Ẑ_in`.
    pub nu: [f64; 2],
    pub phase: f64,
    pub delta: f64,
    pub gamma_inf: CVec2,
    pub gamma_inf_vanishing: bool,
    pub near_zero_times: Vec<f64>,
    /// `min |Γ + δν| / δ` over the scan and the limit.
    pub clearance: f64,
    pub t_converged: f64,
}

/// Settings for the perturbation search.
#[derive(Clone, Copy, Debug)]
pub struct LwSettings {
    pub tol: f64,
    pub scan_dt: f64,
    pub t_scan: f64,
    pub converge_tol: f64,
    pub t_converge_max: f64,
}

impl Default for LwSettings {
    fn default() -> Self {
        Self { tol: 1e-10, scan_dt: 2e-3, t_scan: 200.0, converge_tol: 1e-8, t_converge_max: 1e6 }
    }
}

/// `Γ^∞` by doubling the horizon until `‖Γ(t) − Γ(2t)‖ < converge_tol`.
pub fn gamma_limit(mode: &ModeState, settings: &LwSettings) -> Result<(CVec2, f64)> {
    let mut it = ModeIntegrator::new(mode, StepControl::new(settings.tol))?;
    let mut t = 10.0;
    it.advance_to(t, |_| {})?;
    let mut g = it.gamma;
    loop {
        it.advance_to(2.0 * t, |_| {})?;
        let g2 = it.gamma;
        if cnorm(&[g2[0] - g[0], g2[1] - g[1]]) < settings.converge_tol {
            return Ok((g2, 2.0 * t));
        }
        t *= 2.0;
        g = g2;
        if t > settings.t_converge_max {
            return Err(Error::Integration { t, h: it.h, reason: "Gamma did not converge".into() });
        }
    }
}

/// Perturbs initial data so that `|Γ^ε(t)| ≥ (ε/2)e^{−(k²+η²)}` for all sampled `t`.
///
/// `Ẑ_in` gains `δ·e^{iφ}·ν` with `δ = ε e^{−(k²+η²)}` and `φ = arg Ξ_in`; `Ξ_in` is unchanged.
pub fn perturb_data_lwdensity(modes: &[LwMode], eps: f64, settings: &LwSettings) -> Result<Vec<LwPerturbation>> {
    modes.iter().map(|m| perturb_one(m, eps, settings)).collect()
}

fn perturb_one(m: &LwMode, eps: f64, settings: &LwSettings) -> Result<LwPerturbation> {
    let p0 = (m.k * m.k) as f64 + m.eta * m.eta;
    let delta = eps * (-p0).exp();
    let mut mode = m.mode_state()?;
    let phase = if mode.xi_in.norm() > 0.0 { mode.xi_in.arg() } else { 0.0 };
    let rot = C64::from_polar(1.0, phase);
    let (mut gamma_inf, t_conv) = gamma_limit(&mode, settings)?;
    let mut current = *m;
    let vanishing = cnorm(&gamma_inf) < delta;
    if vanishing {
        // push Γ^∞ away from the origin by δ along itself, or along the α slot when it is zero
        let g = [gamma_inf[0] / rot, gamma_inf[1] / rot];
        let n = cnorm(&g);
        let u = if n > 0.0 { [g[0] / n, g[1] / n] } else { [C64::new(0.0, 0.0), C64::new(1.0, 0.0)] };
        let drho = delta * u[0] * rot * m.mach * p0.powf(0.25);
        current.rho += drho;
        current.omega -= drho;
        current.alpha += delta * u[1] * rot * p0.powf(0.75);
        mode = current.mode_state()?;
        gamma_inf = gamma_limit(&mode, settings)?.0;
    }

    // Scan Γ on a uniform grid; only samples within 1.5δ of the origin can come closer than δ/2.
    let n = (settings.t_scan / settings.scan_dt).round() as usize;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * settings.scan_dt).collect();
    let tr = evolve_mode_at(&mode, &times, StepControl::new(settings.tol))?;
    let mut close: Vec<CVec2> = Vec::new();
    let mut near = Vec::new();
    for (i, s) in tr.samples.iter().enumerate() {
        let g = cnorm(&s.gamma);
        if g < 1.5 * delta {
            close.push([s.gamma[0] / rot, s.gamma[1] / rot]);
            let left = if i == 0 { f64::INFINITY } else { cnorm(&tr.samples[i - 1].gamma) };
            let right = tr.samples.get(i + 1).map_or(f64::INFINITY, |r| cnorm(&r.gamma));
            if g <= left && g <= right {
                near.push(s.t);
            }
        }
    }
    close.push([gamma_inf[0] / rot, gamma_inf[1] / rot]);

    // ν maximizing min |Γ + δν| over the close samples, at half-degree resolution
    let mut best = (0usize, -1.0f64);
    for step in 0..720 {
        let th = (step as f64 * 0.5).to_radians();
        let nu = [th.cos(), th.sin()];
        let d = close
            .iter()
            .map(|g| cnorm(&[g[0] + delta * nu[0], g[1] + delta * nu[1]]))
            .fold(f64::INFINITY, f64::min);
        if d > best.1 + 1e-15 * delta {
            best = (step, d);
        }
    }
    if best.1 < 0.5 * delta {
        return Err(Error::Construction { k: m.k, eta: m.eta, reason: format!("best direction keeps only {:.3}δ", best.1 / delta) });
    }
    let th = (best.0 as f64 * 0.5).to_radians();
    let nu = [th.cos(), th.sin()];
    let mut perturbed = current;
    let dz = [delta * nu[0] * rot, delta * nu[1] * rot];
    let drho = dz[0] * m.mach * p0.powf(0.25);
    perturbed.rho += drho;
    perturbed.omega -= drho;
    perturbed.alpha += dz[1] * p0.powf(0.75);
    Ok(LwPerturbation {
        original: *m,
        perturbed,
        nu,
        phase,
        delta,
        gamma_inf,
        gamma_inf_vanishing: vanishing,
        near_zero_times: near,
        clearance: best.1 / delta,
        t_converged: t_conv,
    })
}

/// `(‖Q‖² + M⁻²‖ρ‖²)/(⟨t⟩‖Γ‖²_{L²_x H^{−1/2}_y})` on the common sample times of `trajectories`.
///
/// Modes whose `Γ` vanishes identically are excluded and reported.
pub fn lower_bound_ratio(trajectories: &[Trajectory]) -> Result<(Vec<(f64, f64)>, Vec<(i64, f64)>)> {
    let first = trajectories.first().ok_or_else(|| Error::Domain("no trajectories".into()))?;
    let n = first.samples.len();
    let mut excluded = Vec::new();
    let used: Vec<&Trajectory> = trajectories
        .iter()
        .filter(|tr| {
            let zero = tr.samples.iter().all(|s| cnorm(&s.gamma) == 0.0);
            if zero {
                excluded.push((tr.k, tr.eta));
            }
            !zero
        })
        .collect();
    if used.is_empty() {
        return Err(Error::Domain("all modes have vanishing Gamma; ratio undefined".into()));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = first.samples[i].t;
        let (mut num, mut den) = (0.0, 0.0);
        for tr in &used {
            let s = tr.samples.get(i).ok_or_else(|| Error::Domain("trajectories are not sampled on common times".into()))?;
            if (s.t - t).abs() > 1e-9 * t.abs().max(1.0) {
                return Err(Error::Domain("trajectories are not sampled on common times".into()));
            }
            let (p, _) = p_raw(t, tr.k as f64, tr.eta);
            let z2 = s.z[0].norm_sqr() + s.z[1].norm_sqr();
            num += p.sqrt() * z2;
            den += (s.gamma[0].norm_sqr() + s.gamma[1].norm_sqr()) / (1.0 + tr.eta * tr.eta).sqrt();
        }
        if den == 0.0 {
            return Err(Error::Domain(format!("zero denominator at t = {t}")));
        }
        out.push((t, num / ((1.0 + t * t).sqrt() * den)));
    }
    Ok((out, excluded))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_forcing_matches_finite_differences() {
        for &(t, k, eta, m) in &[(3.0, 1.0, 20.0, 0.01), (0.5, 2.0, -1.0, 0.5), (40.0, 1.0, 5.0, 0.3)] {
            let h = 1e-5;
            let (kq, g) = quasi_static(t, k, eta, m);
            let (ka, _) = quasi_static(t - h, k, eta, m);
            let (kb, _) = quasi_static(t + h, k, eta, m);
            let (l, f) = l_f_raw(t, k, eta, m);
            let lk = l.apply_real(kq);
            for i in 0..2 {
                let want = lk[i] + f[i] - (kb[i] - ka[i]) / (2.0 * h);
                let scale = f[1].abs();
                assert!((g[i] - want).abs() <= 1e-6 * scale, "t={t} k={k} eta={eta}: {} vs {want}", g[i]);
            }
        }
    }
}
