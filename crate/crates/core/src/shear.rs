//! Near-Couette evolution in `(R, A, Ξ)`, the weighted energy functional and the
//! reconstruction of Ω from R.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, Dopri5};
use crate::operators::{build_delta_t, dtg_apply, g_apply, mat_vec, DeltaT};
use crate::profile::{Kernel, ProfileSpectrum};
use crate::spectral::{moving_frame_norms, FlowState, MovingFrameNorms, SobolevSpec, SpectralField, ThirdField, C64};
use crate::weights::{m_raw, p_raw, w_raw, WeightParams};

pub const TERM_NAMES: [&str; 9] = ["R_term", "A_term", "Xi_term", "cross_term", "N_A_w", "N_A_m", "N_R_m", "N_Xi_w", "N_Xi_m"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub e_s: f64,
    pub terms: BTreeMap<String, f64>,
}

impl EnergyReport {
    /// `E_s / (R_term + A_term + Xi_term)`; at least 1/10 by the equivalence lemma.
    pub fn coercivity_ratio(&self) -> f64 {
        let s = self.terms["R_term"] + self.terms["A_term"] + self.terms["Xi_term"];
        if s == 0.0 {
            1.0
        } else {
            self.e_s / s
        }
    }
}

fn check_xi(state: &FlowState) -> Result<()> {
    if state.third != ThirdField::Xi {
        return Err(Error::Domain("near-Couette routines need W flagged as Xi".into()));
    }
    for (n, f) in [("R", &state.r), ("A", &state.a), ("W", &state.w)] {
        if f.has_zero_mode() {
            return Err(Error::ZeroModeViolation(n));
        }
    }
    Ok(())
}

/// Constant per-profile matrices.
struct Mats {
    g: DMatrix<C64>,
    g2: DMatrix<C64>,
    b: DMatrix<C64>,
}

impl Mats {
    fn new(profile: &ProfileSpectrum) -> Self {
        Self { g: profile.g_matrix(), g2: profile.g2_matrix(), b: profile.conv_matrix(Kernel::B) }
    }
}

/// Row right-hand side of the `(R, A, Ξ)` system.
fn rhs_row(k: i64, t: f64, mach: f64, profile: &ProfileSpectrum, mats: &Mats, dt: &DeltaT, y: &[C64], dy: &mut [C64]) -> Result<()> {
    let n = dt.etas.len();
    let (r, rest) = y.split_at(n);
    let (a, xi) = rest.split_at(n);
    let kf = k as f64;
    let lap = build_delta_t(t, k, profile)?.entries;
    let inv_a = dt.inv(a)?;
    let gr = mat_vec(&mats.g, r);
    let xi_m_gr: Vec<C64> = xi.iter().zip(&gr).map(|(x, y)| x - y).collect();
    let inv_x = dt.inv(&xi_m_gr)?;
    // ∂_tA
    let t1 = mat_vec(&mats.g2, &dt.dt_delta_l(&inv_a));
    let t2 = mat_vec(&lap, r);
    let t3 = mat_vec(&mats.g, &inv_x);
    // ∂_tΞ
    let d_inv_a = dt.d(&inv_a);
    let s1 = mat_vec(&mats.b, &mat_vec(&mats.g, &d_inv_a));
    let s2 = mat_vec(&mats.b, &dt.dx(&inv_x));
    let m2 = 1.0 / (mach * mach);
    for j in 0..n {
        dy[j] = -a[j];
        // 2g∂_XXΔ_t⁻¹(gR − Ξ) = −2g∂_XXΔ_t⁻¹(Ξ − gR), ∂_XX ↦ −k²
        dy[n + j] = t1[j] - m2 * t2[j] + 2.0 * kf * kf * t3[j];
        dy[2 * n + j] = s1[j] + s2[j];
    }
    Ok(())
}

/// `∂_t(R, A, Ξ)` for the whole field.
pub fn assemble_rhs(state: &FlowState, profile: &ProfileSpectrum, t: f64) -> Result<FlowState> {
    check_xi(state)?;
    let g = state.grid();
    let n = g.n_points();
    let mats = Mats::new(profile);
    let mut out = FlowState::zeros(g, ThirdField::Xi, state.mach);
    out.t = t;
    for k in g.nonzero_ks() {
        let dt = DeltaT::new(t, k, profile)?;
        let mut y = Vec::with_capacity(3 * n);
        y.extend_from_slice(state.r.row(k));
        y.extend_from_slice(state.a.row(k));
        y.extend_from_slice(state.w.row(k));
        let mut dy = vec![C64::new(0.0, 0.0); 3 * n];
        rhs_row(k, t, state.mach, profile, &mats, &dt, &y, &mut dy)?;
        out.r.row_mut(k).copy_from_slice(&dy[..n]);
        out.a.row_mut(k).copy_from_slice(&dy[n..2 * n]);
        out.w.row_mut(k).copy_from_slice(&dy[2 * n..]);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default)]
struct RowEnergy {
    r: f64,
    a: f64,
    xi: f64,
    cross: f64,
    naw: f64,
    nam: f64,
    nrm: f64,
    nxw: f64,
    nxm: f64,
}

#[allow(clippy::too_many_arguments)]
fn energy_row(k: i64, t: f64, etas: &[f64], d_eta: f64, lap: &DMatrix<C64>, r: &[C64], a: &[C64], xi: &[C64], params: &WeightParams, sob: SobolevSpec) -> RowEnergy {
    let kf = k as f64;
    let c = params.c_exp;
    let mut e = RowEnergy::default();
    let mlap_r: Vec<C64> = mat_vec(lap, r).into_iter().map(|z| -z).collect();
    let m2 = 1.0 / (params.mach * params.mach);
    for j in 0..etas.len() {
        let eta = etas[j];
        let (p, pp) = p_raw(t, kf, eta);
        let w = w_raw(t, kf, eta, params.eps_tilde);
        let m = m_raw(t, kf, eta, params.big_n);
        let s = sob.weight_sq(kf, eta) * d_eta;
        let base = s / (m * m) * w.powf(-2.0 * (1.0 - c));
        let dw = (1.0 + params.eps_tilde) * pp.abs() / p;
        let dm = params.big_n * kf * kf / p;
        let rr = (r[j].conj() * mlap_r[j]).re;
        e.r += base * rr * m2;
        e.a += base * a[j].norm_sqr();
        e.xi += base * xi[j].norm_sqr();
        e.cross += c * dw * base * (r[j] * a[j].conj()).re;
        e.naw += dw * base * a[j].norm_sqr();
        e.nam += dm * base * a[j].norm_sqr();
        e.nrm += dm * s / (m * m * w * w) * rr;
        e.nxw += (1.0 - c) * dw * base * xi[j].norm_sqr();
        e.nxm += dm * base * xi[j].norm_sqr();
    }
    e
}

fn report_from(t: f64, e: RowEnergy) -> EnergyReport {
    let mut terms = BTreeMap::new();
    for (n, v) in TERM_NAMES.iter().zip([e.r, e.a, e.xi, e.cross, e.naw, e.nam, e.nrm, e.nxw, e.nxm]) {
        terms.insert(n.to_string(), v);
    }
    EnergyReport { t, e_s: 0.5 * (e.r + e.a + e.xi) + e.cross, terms }
}

fn add(a: RowEnergy, b: RowEnergy) -> RowEnergy {
    RowEnergy {
        r: a.r + b.r,
        a: a.a + b.a,
        xi: a.xi + b.xi,
        cross: a.cross + b.cross,
        naw: a.naw + b.naw,
        nam: a.nam + b.nam,
        nrm: a.nrm + b.nrm,
        nxw: a.nxw + b.nxw,
        nxm: a.nxm + b.nxm,
    }
}

/// Weighted energy `E_s` with its term breakdown. `R_term` uses the symmetrized form
/// `Re⟨m⁻²w^{−2(1−c)}(−Δ_t)R, R⟩_s / M²`.
pub fn energy_es(state: &FlowState, profile: &ProfileSpectrum, params: &WeightParams, s: f64) -> Result<EnergyReport> {
    check_xi(state)?;
    let g = state.grid();
    let etas = g.etas();
    let mut tot = RowEnergy::default();
    for k in g.nonzero_ks() {
        let lap = build_delta_t(state.t, k, profile)?.entries;
        let e = energy_row(k, state.t, &etas, g.d_eta(), &lap, state.r.row(k), state.a.row(k), state.w.row(k), params, SobolevSpec::Isotropic(s));
        tot = add(tot, e);
    }
    let rep = report_from(state.t, tot);
    let r_l2 = state.r.l2();
    if r_l2 > 0.0 && !(tot.r > 0.0) {
        return Err(Error::Positivity(format!("R_term = {} at t = {}", tot.r, state.t)));
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Reconstruction {
    None,
    /// Integrates `∂_tΩ̃ = Φ_b⁻¹[g + bgDΔ_t⁻¹]A` with Φ_b, Φ_b⁻¹.
    Primary,
    /// Also integrates Φ̃ and `J = ∫(∂_τG)R dτ` and evaluates the functional relation literally.
    Both,
}

#[derive(Clone, Copy, Debug)]
pub struct ShearSettings {
    pub tol: f64,
    pub params: WeightParams,
    pub s: f64,
    pub reconstruction: Reconstruction,
}

#[derive(Clone, Debug)]
pub struct FullRun {
    pub times: Vec<f64>,
    pub states: Vec<FlowState>,
    pub reports: Vec<EnergyReport>,
    pub norms: Vec<MovingFrameNorms>,
    /// Largest relative one-step increase of a row's `E_s` over accepted steps.
    pub max_step_increase: f64,
    pub min_coercivity: f64,
    pub accepted_steps: usize,
    /// `‖Ω_evolved − Ω_rec‖/‖Ω_evolved‖` on `times`, primary route.
    pub omega_residual_primary: Vec<f64>,
    /// Same, for the literal functional relation.
    pub omega_residual_secondary: Vec<f64>,
    /// `‖Ω_rec,primary − Ω_rec,secondary‖/‖Ω_rec,primary‖`.
    pub route_agreement: Vec<f64>,
    pub xi_drift: Vec<f64>,
}

struct RowOut {
    k: i64,
    states: Vec<Vec<C64>>,
    worst: f64,
    steps: usize,
    omega_primary: Vec<Vec<C64>>,
    omega_secondary: Vec<Vec<C64>>,
}

fn evolve_row(k: i64, y0: Vec<C64>, profile: &ProfileSpectrum, mach: f64, stops: &[f64], settings: &ShearSettings) -> Result<RowOut> {
    let n = profile.n_eta + 1;
    let nn = n * n;
    let mats = Mats::new(profile);
    let etas = crate::operators::etas(profile);
    let recon = settings.reconstruction;
    let prim = recon != Reconstruction::None;
    let sec = recon == Reconstruction::Both;
    let mut y = y0.clone();
    // Ω̃(0) = Ω_in = Ξ_in − gR_in.
    let omega_in: Vec<C64> = {
        let gr = mat_vec(&mats.g, &y0[..n]);
        y0[2 * n..3 * n].iter().zip(&gr).map(|(x, g)| x - g).collect()
    };
    let id: Vec<C64> = DMatrix::<C64>::identity(n, n).as_slice().to_vec();
    if prim {
        y.extend_from_slice(&omega_in);
        y.extend_from_slice(&id);
        y.extend_from_slice(&id);
    }
    if sec {
        y.extend(std::iter::repeat_n(C64::new(0.0, 0.0), nn + n));
    }
    let o_prim = 3 * n;
    let o_sec = 3 * n + n + 2 * nn;
    let ik = C64::new(0.0, k as f64);
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| -> Result<()> {
        let dt = DeltaT::new(t, k, profile)?;
        rhs_row(k, t, mach, profile, &mats, &dt, &y[..3 * n], &mut dy[..3 * n])?;
        if prim {
            let a = &y[n..2 * n];
            let inv = dt.inv_matrix()?;
            let dxinv = &inv * ik;
            let gen = &mats.b * &dxinv;
            let pb = DMatrix::from_column_slice(n, n, &y[o_prim + n..o_prim + n + nn]);
            let pbi = DMatrix::from_column_slice(n, n, &y[o_prim + n + nn..o_prim + n + 2 * nn]);
            let ga: Vec<C64> = {
                let u = mat_vec(&mats.g, a);
                let v = mat_vec(&mats.b, &mat_vec(&mats.g, &dt.d(&dt.inv(a)?)));
                u.iter().zip(v).map(|(x, y)| x + y).collect()
            };
            let d_om = mat_vec(&pbi, &ga);
            dy[o_prim..o_prim + n].copy_from_slice(&d_om);
            let d1 = &gen * pb;
            let d2 = -(pbi * &gen);
            dy[o_prim + n..o_prim + n + nn].copy_from_slice(d1.as_slice());
            dy[o_prim + n + nn..o_prim + n + 2 * nn].copy_from_slice(d2.as_slice());
            if sec {
                let pt = DMatrix::from_column_slice(n, n, &y[o_sec..o_sec + nn]);
                let d3 = -(dxinv + &pt * &gen);
                dy[o_sec..o_sec + nn].copy_from_slice(d3.as_slice());
                let j = dtg_apply(t, k, profile, &pt, &y[..n])?;
                dy[o_sec + nn..o_sec + nn + n].copy_from_slice(&j);
            }
        }
        Ok(())
    };
    let lap0 = build_delta_t(0.0, k, profile)?.entries;
    let energy_of = |t: f64, y: &[C64], lap: &DMatrix<C64>| -> f64 {
        let e = energy_row(k, t, &etas, profile.d_eta, lap, &y[..n], &y[n..2 * n], &y[2 * n..3 * n], &settings.params, SobolevSpec::Isotropic(settings.s));
        0.5 * (e.r + e.a + e.xi) + e.cross
    };
    let mut prev = energy_of(0.0, &y, &lap0);
    let mut worst = f64::NEG_INFINITY;
    let opts = Dopri5::new(settings.tol).with_atol(settings.tol * 1e-6).with_h_max(1.0);
    let (out, st) = integrate::solve(rhs, 0.0, &y, stops, &opts, |t, y| {
        let lap = build_delta_t(t, k, profile)?.entries;
        let e = energy_of(t, y, &lap);
        if prev > 0.0 {
            worst = worst.max(e / prev - 1.0);
        }
        prev = e;
        Ok(())
    })?;
    let mut omega_primary = Vec::new();
    let mut omega_secondary = Vec::new();
    if prim {
        // G₀R_in for the functional relation.
        let g0r = if sec { g_apply(0.0, k, profile, &DMatrix::zeros(n, n), &y0[..n])? } else { Vec::new() };
        for (i, yo) in out.iter().enumerate() {
            let t = stops[i];
            let pb = DMatrix::from_column_slice(n, n, &yo[o_prim + n..o_prim + n + nn]);
            omega_primary.push(mat_vec(&pb, &yo[o_prim..o_prim + n]));
            if sec {
                let pt = DMatrix::from_column_slice(n, n, &yo[o_sec..o_sec + nn]);
                let r = &yo[..n];
                let gr = mat_vec(&mats.g, r);
                let bgr = profile.conv(Kernel::B, &g_apply(t, k, profile, &pt, r)?);
                let gr_in = mat_vec(&mats.g, &y0[..n]);
                let bg0 = profile.conv(Kernel::B, &g0r);
                let bj = profile.conv(Kernel::B, &yo[o_sec + nn..o_sec + nn + n]);
                let inner: Vec<C64> = (0..n).map(|j| omega_in[j] + gr_in[j] + bg0[j] - gr[j] - bgr[j] + bj[j]).collect();
                omega_secondary.push(mat_vec(&pb, &inner));
            }
        }
    }
    Ok(RowOut {
        k,
        states: out.into_iter().map(|v| v[..3 * n].to_vec()).collect(),
        worst: worst.max(0.0),
        steps: st.accepted,
        omega_primary,
        omega_secondary,
    })
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    let mut d = a.clone();
    d.axpy(C64::new(-1.0, 0.0), b);
    let nb = b.l2();
    if nb == 0.0 {
        d.l2()
    } else {
        d.l2() / nb
    }
}

/// Evolves `(R, A, Ξ)` to each of `times` (ascending, positive), row by row.
pub fn evolve_full(state_in: &FlowState, profile: &ProfileSpectrum, times: &[f64], settings: &ShearSettings) -> Result<FullRun> {
    check_xi(state_in)?;
    let g = state_in.grid();
    let n = g.n_points();
    if g.n_eta != profile.n_eta {
        return Err(Error::GridMismatch("state and profile lattices differ".into()));
    }
    // Real fields: the k < 0 rows are mirrored conjugates of the k > 0 rows.
    let symmetric = [&state_in.r, &state_in.a, &state_in.w].iter().all(|f| f.conjugate_symmetry_defect() <= 1e-14 * f.l2().max(1e-300));
    let mut rows: Vec<RowOut> = g
        .nonzero_ks()
        .filter(|&k| !symmetric || k > 0)
        .map(|k| {
            let mut y0 = state_in.r.row(k).to_vec();
            y0.extend_from_slice(state_in.a.row(k));
            y0.extend_from_slice(state_in.w.row(k));
            evolve_row(k, y0, profile, state_in.mach, times, settings)
        })
        .collect::<Result<_>>()?;
    if symmetric {
        let mirror = |v: &[C64]| -> Vec<C64> { (0..n).map(|j| v[g.mirror(j)].conj()).collect() };
        let neg: Vec<RowOut> = rows
            .iter()
            .map(|r| RowOut {
                k: -r.k,
                states: r.states.iter().map(|y| y.chunks(n).flat_map(mirror).collect()).collect(),
                worst: r.worst,
                steps: 0,
                omega_primary: r.omega_primary.iter().map(|v| mirror(v)).collect(),
                omega_secondary: r.omega_secondary.iter().map(|v| mirror(v)).collect(),
            })
            .collect();
        rows.extend(neg);
    }
    let mut run = FullRun {
        times: times.to_vec(),
        states: Vec::new(),
        reports: Vec::new(),
        norms: Vec::new(),
        max_step_increase: rows.iter().map(|r| r.worst).fold(0.0, f64::max),
        min_coercivity: f64::INFINITY,
        accepted_steps: rows.iter().map(|r| r.steps).sum(),
        omega_residual_primary: Vec::new(),
        omega_residual_secondary: Vec::new(),
        route_agreement: Vec::new(),
        xi_drift: Vec::new(),
    };
    for (i, &t) in times.iter().enumerate() {
        let mut st = FlowState::zeros(g, ThirdField::Xi, state_in.mach);
        st.t = t;
        let mut op = SpectralField::zeros(g);
        let mut os = SpectralField::zeros(g);
        for row in &rows {
            let y = &row.states[i];
            st.r.row_mut(row.k).copy_from_slice(&y[..n]);
            st.a.row_mut(row.k).copy_from_slice(&y[n..2 * n]);
            st.w.row_mut(row.k).copy_from_slice(&y[2 * n..3 * n]);
            if let Some(o) = row.omega_primary.get(i) {
                op.row_mut(row.k).copy_from_slice(o);
            }
            if let Some(o) = row.omega_secondary.get(i) {
                os.row_mut(row.k).copy_from_slice(o);
            }
        }
        let rep = energy_es(&st, profile, &settings.params, settings.s)?;
        run.min_coercivity = run.min_coercivity.min(rep.coercivity_ratio());
        run.reports.push(rep);
        run.norms.push(moving_frame_norms(&st, Some(profile))?);
        let om = st.omega(Some(profile));
        if settings.reconstruction != Reconstruction::None {
            run.omega_residual_primary.push(rel(&op, &om));
        }
        if settings.reconstruction == Reconstruction::Both {
            run.omega_residual_secondary.push(rel(&os, &om));
            run.route_agreement.push(rel(&os, &op));
        }
        run.xi_drift.push(rel(&st.w, &state_in.w) * state_in.w.l2());
        run.states.push(st);
    }
    Ok(run)
}

/// Near-Couette initial state from `(ρ, α, ω)`: `Ξ_in = ω_in + gρ_in`.
pub fn state_from_physical(rho: &SpectralField, alpha: &SpectralField, omega: &SpectralField, profile: &ProfileSpectrum, mach: f64) -> Result<FlowState> {
    let mut xi = omega.clone();
    xi.axpy(C64::new(1.0, 0.0), rho);
    for k in rho.grid.ks() {
        let gr = profile.conv_gm1(rho.row(k));
        for (o, x) in xi.row_mut(k).iter_mut().zip(gr) {
            *o += x;
        }
    }
    FlowState::new(rho.clone(), alpha.clone(), xi, ThirdField::Xi, 0.0, mach)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couette::{evolve_mode_at, ModeState, StepControl};
    use crate::profile::ProfileShape;
    use crate::spectral::FrequencyGrid;

    fn small() -> FrequencyGrid {
        FrequencyGrid::new(1, 4.0, 8).unwrap()
    }

    fn state(g: FrequencyGrid) -> FlowState {
        let mut r = SpectralField::from_fn(g, |k, e| if k == 0 { C64::new(0.0, 0.0) } else { C64::new((-e * e / 4.0).exp(), 0.0) });
        let mut a = SpectralField::from_fn(g, |k, e| if k == 0 { C64::new(0.0, 0.0) } else { C64::new(0.0, 0.3 * (-e * e / 2.0).exp()) });
        let mut w = SpectralField::from_fn(g, |k, e| if k == 0 { C64::new(0.0, 0.0) } else { C64::new(0.2 * e.cos(), 0.0) });
        r.conjugate_symmetrize();
        a.conjugate_symmetrize();
        w.conjugate_symmetrize();
        FlowState::new(r, a, w, ThirdField::Xi, 0.0, 1.0).unwrap()
    }

    #[test]
    fn couette_limit_rhs() {
        let g = small();
        let p = ProfileSpectrum::couette(&g);
        let st = state(g);
        let d = assemble_rhs(&st, &p, 1.3).unwrap();
        assert_eq!(d.w.l2(), 0.0);
        for k in g.nonzero_ks() {
            let kf = k as f64;
            for j in 0..g.n_points() {
                let e = g.eta(j);
                let (pp, dp) = p_raw(1.3, kf, e);
                let r = st.r.get(k, j);
                let a = st.a.get(k, j);
                let om = st.w.get(k, j) - r;
                let expect = dp / pp * a + pp * r - 2.0 * kf * kf / pp * om;
                assert!((d.a.get(k, j) - expect).norm() < 1e-12 * (1.0 + expect.norm()));
            }
        }
    }

    #[test]
    fn zero_state() {
        let g = small();
        let p = ProfileSpectrum::with_eps(&g, ProfileShape::Gaussian { sigma: 1.0 }, 0.05, 1.0).unwrap();
        let z = FlowState::zeros(g, ThirdField::Xi, 1.0);
        assert_eq!(assemble_rhs(&z, &p, 2.0).unwrap().a.l2(), 0.0);
        let params = WeightParams::new(0.02, 1.0).unwrap();
        let rep = energy_es(&z, &p, &params, 1.0).unwrap();
        assert!(rep.terms.values().all(|v| *v == 0.0));
    }

    #[test]
    fn a_only_energy() {
        let g = small();
        let p = ProfileSpectrum::couette(&g);
        let mut st = state(g);
        st.r = SpectralField::zeros(g);
        st.w = SpectralField::zeros(g);
        let params = WeightParams::new(0.0, 1.0).unwrap();
        let rep = energy_es(&st, &p, &params, 0.0).unwrap();
        assert_eq!(rep.terms["cross_term"], 0.0);
        assert!((rep.e_s - rep.terms["A_term"] / 2.0).abs() <= 1e-15 * rep.e_s);
    }

    #[test]
    fn couette_matches_mode_solver() {
        let g = small();
        let p = ProfileSpectrum::couette(&g);
        let st = state(g);
        let settings = ShearSettings { tol: 1e-12, params: WeightParams::new(0.0, 1.0).unwrap(), s: 0.0, reconstruction: Reconstruction::None };
        let run = evolve_full(&st, &p, &[10.0], &settings).unwrap();
        let out = &run.states[0];
        for k in g.nonzero_ks() {
            for j in 0..g.n_points() {
                let e = g.eta(j);
                let r = st.r.get(k, j);
                let m = ModeState::from_rho_alpha_omega(k, e, 1.0, r, st.a.get(k, j), st.w.get(k, j) - r).unwrap();
                let tr = evolve_mode_at(&m, &[10.0], StepControl::new(1e-12)).unwrap();
                let (rr, aa) = crate::couette::denormalize(10.0, k, e, 1.0, &tr.samples[0].z);
                assert!((rr - out.r.get(k, j)).norm() < 1e-7 * (1.0 + rr.norm()));
                assert!((aa - out.a.get(k, j)).norm() < 1e-7 * (1.0 + aa.norm()));
            }
        }
    }
}
