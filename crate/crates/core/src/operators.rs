//! Time-dependent moving-frame operators for near-Couette shears, as dense per-k matrices over
//! the η lattice.
//!
//! Symbols: `∂_X ↦ ik`, `D = ∂_Y − t∂_X ↦ i(η − kt)`, `Δ_L ↦ −p`, `∂_tΔ_L ↦ −p′`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, Dopri5};
use crate::profile::{Kernel, ProfileSpectrum};
use crate::spectral::C64;

/// Largest `n_eta` accepted by the ∂_tG evaluator.
pub const DTG_MAX_N_ETA: usize = 256;

#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub k: i64,
    pub t: f64,
    pub entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        mat_vec(&self.entries, f)
    }

    /// Spectral norm.
    pub fn norm2(&self) -> f64 {
        spectral_norm(&self.entries)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum T2Method {
    Neumann { tol: f64, n_max: usize },
    Direct,
}

pub fn mat_vec(m: &DMatrix<C64>, f: &[C64]) -> Vec<C64> {
    (m * DVector::from_column_slice(f)).as_slice().to_vec()
}

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn vec_norm(f: &[C64]) -> f64 {
    f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn etas(profile: &ProfileSpectrum) -> Vec<f64> {
    let h = (profile.n_eta / 2) as f64;
    (0..=profile.n_eta).map(|j| (j as f64 - h) * profile.d_eta).collect()
}

fn check_k(k: i64) -> Result<()> {
    if k == 0 {
        Err(Error::ZeroWavenumber)
    } else {
        Ok(())
    }
}

fn check_len(profile: &ProfileSpectrum, f: &[C64]) -> Result<()> {
    if f.len() != profile.n_eta + 1 {
        return Err(Error::GridMismatch(format!("slice length {} vs {} lattice points", f.len(), profile.n_eta + 1)));
    }
    Ok(())
}

/// `Conv(f)·diag(d)`.
fn conv_diag(profile: &ProfileSpectrum, which: Kernel, d: &[C64]) -> DMatrix<C64> {
    let mut m = profile.conv_matrix(which);
    for (j, dj) in d.iter().enumerate() {
        for i in 0..m.nrows() {
            m[(i, j)] *= dj;
        }
    }
    m
}

pub fn build_delta_t(t: f64, k: i64, profile: &ProfileSpectrum) -> Result<OperatorMatrix> {
    check_k(k)?;
    let kf = k as f64;
    let et = etas(profile);
    let u: Vec<f64> = et.iter().map(|e| e - kf * t).collect();
    let mut m = conv_diag(profile, Kernel::G2m1, &u.iter().map(|u| C64::new(-u * u, 0.0)).collect::<Vec<_>>());
    m += conv_diag(profile, Kernel::B, &u.iter().map(|u| C64::new(0.0, *u)).collect::<Vec<_>>());
    for (j, u) in u.iter().enumerate() {
        m[(j, j)] -= C64::new(kf * kf + u * u, 0.0);
    }
    Ok(OperatorMatrix { k, t, entries: m })
}

pub fn build_t2_tilde(t: f64, k: i64, profile: &ProfileSpectrum) -> Result<OperatorMatrix> {
    check_k(k)?;
    let kf = k as f64;
    let u: Vec<f64> = etas(profile).iter().map(|e| e - kf * t).collect();
    let p: Vec<f64> = u.iter().map(|u| kf * kf + u * u).collect();
    let mut m = conv_diag(profile, Kernel::G2m1, &u.iter().zip(&p).map(|(u, p)| C64::new(-u * u / p, 0.0)).collect::<Vec<_>>());
    m += conv_diag(profile, Kernel::B, &u.iter().zip(&p).map(|(u, p)| C64::new(0.0, u / p)).collect::<Vec<_>>());
    Ok(OperatorMatrix { k, t, entries: m })
}

/// Time derivative of [`build_t2_tilde`].
pub fn build_dt_t2_tilde(t: f64, k: i64, profile: &ProfileSpectrum) -> Result<OperatorMatrix> {
    check_k(k)?;
    let kf = k as f64;
    let u: Vec<f64> = etas(profile).iter().map(|e| e - kf * t).collect();
    let p: Vec<f64> = u.iter().map(|u| kf * kf + u * u).collect();
    let mut m = conv_diag(
        profile,
        Kernel::G2m1,
        &u.iter().zip(&p).map(|(u, p)| C64::new(2.0 * kf.powi(3) * u / (p * p), 0.0)).collect::<Vec<_>>(),
    );
    m += conv_diag(
        profile,
        Kernel::B,
        &u.iter().zip(&p).map(|(u, p)| C64::new(0.0, kf * (u * u - kf * kf) / (p * p))).collect::<Vec<_>>(),
    );
    Ok(OperatorMatrix { k, t, entries: m })
}

/// Cheap upper bound on `‖T̃₂‖` from Young's inequality: `Δη‖ĝ²−1‖_{ℓ¹} + Δη‖b̂‖_{ℓ¹}/(2|k|)`.
pub fn t2_tilde_bound(k: i64, profile: &ProfileSpectrum) -> f64 {
    let l1 = |w: Kernel| profile.kernel(w).iter().map(|z| z.norm()).sum::<f64>() * profile.d_eta;
    l1(Kernel::G2m1) + l1(Kernel::B) / (2.0 * (k as f64).abs())
}

/// Symbol of `∂_tΔ_L`: the diagonal `−p′`.
pub fn dt_delta_l(t: f64, k: i64, etas: &[f64]) -> Result<Vec<f64>> {
    check_k(k)?;
    let kf = k as f64;
    Ok(etas.iter().map(|e| 2.0 * kf * (e - kf * t)).collect())
}

/// Per-(k, t) factorized moving-frame Laplacian.
pub struct DeltaT {
    pub k: i64,
    pub t: f64,
    pub etas: Vec<f64>,
    pub p: Vec<f64>,
    pub t2_tilde: DMatrix<C64>,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    couette: bool,
}

impl DeltaT {
    pub fn new(t: f64, k: i64, profile: &ProfileSpectrum) -> Result<Self> {
        check_k(k)?;
        let etas = etas(profile);
        let kf = k as f64;
        let p: Vec<f64> = etas.iter().map(|e| kf * kf + (e - kf * t).powi(2)).collect();
        let t2 = build_t2_tilde(t, k, profile)?.entries;
        if !profile.is_couette() && t2_tilde_bound(k, profile) >= 1.0 {
            let nrm = spectral_norm(&t2);
            if nrm >= 1.0 {
                return Err(Error::Contraction { norm: nrm });
            }
        }
        let n = etas.len();
        let a = DMatrix::<C64>::identity(n, n) - &t2;
        Ok(Self { k, t, etas, p, t2_tilde: t2, lu: a.lu(), couette: profile.is_couette() })
    }

    /// `T₂ f = (I − T̃₂)⁻¹ f` by dense factorization.
    pub fn t2(&self, f: &[C64]) -> Result<Vec<C64>> {
        if self.couette {
            return Ok(f.to_vec());
        }
        let x = self.lu.solve(&DVector::from_column_slice(f)).ok_or(Error::Numerical("singular I − T̃₂".into()))?;
        Ok(x.as_slice().to_vec())
    }

    /// `Δ_t⁻¹ f = Δ_L⁻¹ T₂ f`.
    pub fn inv(&self, f: &[C64]) -> Result<Vec<C64>> {
        let mut x = self.t2(f)?;
        for (x, p) in x.iter_mut().zip(&self.p) {
            *x /= -p;
        }
        Ok(x)
    }

    pub fn inv_matrix(&self) -> Result<DMatrix<C64>> {
        let n = self.etas.len();
        let mut m = DMatrix::<C64>::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let c = self.inv(&e)?;
            m.column_mut(j).copy_from_slice(&c);
            e[j] = C64::new(0.0, 0.0);
        }
        Ok(m)
    }

    /// Applies `∂_X`, `D` or `∂_tΔ_L` (diagonal symbols).
    pub fn dx(&self, f: &[C64]) -> Vec<C64> {
        let ik = C64::new(0.0, self.k as f64);
        f.iter().map(|x| ik * x).collect()
    }

    pub fn d(&self, f: &[C64]) -> Vec<C64> {
        let kf = self.k as f64;
        f.iter().zip(&self.etas).map(|(x, e)| C64::new(0.0, e - kf * self.t) * x).collect()
    }

    pub fn dt_delta_l(&self, f: &[C64]) -> Vec<C64> {
        let kf = self.k as f64;
        f.iter().zip(&self.etas).map(|(x, e)| 2.0 * kf * (e - kf * self.t) * x).collect()
    }
}

/// `T₂ f` by the requested method. Neumann sums `T̃₂ⁿ f` until the increment falls below
/// `tol·‖f‖`; the increment norms are returned too.
pub fn apply_t2(t: f64, k: i64, profile: &ProfileSpectrum, f: &[C64], method: T2Method) -> Result<(Vec<C64>, Vec<f64>)> {
    check_len(profile, f)?;
    let t2 = build_t2_tilde(t, k, profile)?;
    let nrm = t2.norm2();
    if nrm >= 1.0 {
        return Err(Error::Contraction { norm: nrm });
    }
    match method {
        T2Method::Direct => Ok((DeltaT::new(t, k, profile)?.t2(f)?, Vec::new())),
        T2Method::Neumann { tol, n_max } => {
            let f_norm = vec_norm(f);
            let mut sum = f.to_vec();
            let mut term = f.to_vec();
            let mut incs = Vec::new();
            for _ in 0..n_max {
                term = t2.apply(&term);
                let inc = vec_norm(&term);
                incs.push(inc);
                for (s, x) in sum.iter_mut().zip(&term) {
                    *s += x;
                }
                if inc <= tol * f_norm {
                    break;
                }
            }
            Ok((sum, incs))
        }
    }
}

pub fn apply_delta_t_inv(t: f64, k: i64, profile: &ProfileSpectrum, f: &[C64]) -> Result<Vec<C64>> {
    check_len(profile, f)?;
    DeltaT::new(t, k, profile)?.inv(f)
}

/// Matrix of `∂_tΔ_t = g²·∂_tΔ_L − b∂_X`.
pub fn build_dt_delta_t(t: f64, k: i64, profile: &ProfileSpectrum) -> Result<OperatorMatrix> {
    let et = etas(profile);
    let d = dt_delta_l(t, k, &et)?;
    let mut m = profile.g2_matrix();
    for (j, dj) in d.iter().enumerate() {
        for i in 0..m.nrows() {
            m[(i, j)] *= *dj;
        }
    }
    let ik = C64::new(0.0, k as f64);
    m -= profile.conv_matrix(Kernel::B) * ik;
    Ok(OperatorMatrix { k, t, entries: m })
}

/// `∂_tΔ_t⁻¹ f = −Δ_t⁻¹(∂_tΔ_t)Δ_t⁻¹ f`.
pub fn apply_dt_delta_t_inv(t: f64, k: i64, profile: &ProfileSpectrum, f: &[C64]) -> Result<Vec<C64>> {
    let dt = DeltaT::new(t, k, profile)?;
    let x = dt.inv(f)?;
    let y = build_dt_delta_t(t, k, profile)?.apply(&x);
    Ok(dt.inv(&y)?.into_iter().map(|z| -z).collect())
}

/// Generator `b∂_XΔ_t⁻¹` of the Φ_b flow.
pub fn b_generator(t: f64, k: i64, profile: &ProfileSpectrum) -> Result<DMatrix<C64>> {
    let dt = DeltaT::new(t, k, profile)?;
    let inv = dt.inv_matrix()?;
    Ok(profile.conv_matrix(Kernel::B) * inv * C64::new(0.0, k as f64))
}

/// `(Φ_b(t,0), Φ_b(0,t), Φ̃(t,0))` with `Φ_b(0,t) = I + bΦ̃`.
#[derive(Clone, Debug)]
pub struct PhiPair {
    pub t: f64,
    pub phi_b: DMatrix<C64>,
    pub phi_b_inv: DMatrix<C64>,
    pub phi_tilde: DMatrix<C64>,
}

impl PhiPair {
    pub fn identity(n: usize) -> Self {
        Self {
            t: 0.0,
            phi_b: DMatrix::identity(n, n),
            phi_b_inv: DMatrix::identity(n, n),
            phi_tilde: DMatrix::zeros(n, n),
        }
    }
}

/// Advances `∂_tΦ_b = (b∂_XΔ_t⁻¹)Φ_b`, `∂_tΦ_b⁻¹ = −Φ_b⁻¹(b∂_XΔ_t⁻¹)` and
/// `∂_tΦ̃ = −∂_XΔ_t⁻¹ − Φ̃(b∂_XΔ_t⁻¹)` from `pair.t` to `t1`.
pub fn phi_b_step(t1: f64, k: i64, profile: &ProfileSpectrum, pair: &PhiPair, tol: f64) -> Result<PhiPair> {
    check_k(k)?;
    let n = pair.phi_b.nrows();
    let nn = n * n;
    let mut y0 = Vec::with_capacity(3 * nn);
    y0.extend_from_slice(pair.phi_b.as_slice());
    y0.extend_from_slice(pair.phi_b_inv.as_slice());
    y0.extend_from_slice(pair.phi_tilde.as_slice());
    let cb = profile.conv_matrix(Kernel::B);
    let ik = C64::new(0.0, k as f64);
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| -> Result<()> {
        let dt = DeltaT::new(t, k, profile)?;
        let dxinv = dt.inv_matrix()? * ik;
        let gen = &cb * &dxinv;
        let pb = DMatrix::from_column_slice(n, n, &y[..nn]);
        let pbi = DMatrix::from_column_slice(n, n, &y[nn..2 * nn]);
        let pt = DMatrix::from_column_slice(n, n, &y[2 * nn..]);
        let d1 = &gen * pb;
        let d2 = -(pbi * &gen);
        let d3 = -(dxinv + pt * &gen);
        dy[..nn].copy_from_slice(d1.as_slice());
        dy[nn..2 * nn].copy_from_slice(d2.as_slice());
        dy[2 * nn..].copy_from_slice(d3.as_slice());
        Ok(())
    };
    let opts = Dopri5::new(tol).with_atol(tol * 1e-2).with_h_max(2.0);
    let (out, _) = integrate::solve(rhs, pair.t, &y0, &[t1], &opts, |_, _| Ok(()))?;
    let y = &out[0];
    Ok(PhiPair {
        t: t1,
        phi_b: DMatrix::from_column_slice(n, n, &y[..nn]),
        phi_b_inv: DMatrix::from_column_slice(n, n, &y[nn..2 * nn]),
        phi_tilde: DMatrix::from_column_slice(n, n, &y[2 * nn..]),
    })
}

/// `G f = gDΔ_t⁻¹f + Φ̃(g f + b g D Δ_t⁻¹ f)`.
pub fn g_apply(t: f64, k: i64, profile: &ProfileSpectrum, phi_tilde: &DMatrix<C64>, f: &[C64]) -> Result<Vec<C64>> {
    check_len(profile, f)?;
    let dt = DeltaT::new(t, k, profile)?;
    let g = profile.g_matrix();
    let gdi = mat_vec(&g, &dt.d(&dt.inv(f)?));
    let inner: Vec<C64> = mat_vec(&g, f).iter().zip(profile.conv(Kernel::B, &gdi)).map(|(a, b)| a + b).collect();
    let tail = mat_vec(phi_tilde, &inner);
    Ok(gdi.iter().zip(tail).map(|(a, b)| a + b).collect())
}

/// Time derivative of [`g_apply`] obtained by differentiating each factor:
/// `−g∂_XΔ_t⁻¹f + gD∂_tΔ_t⁻¹f + (∂_tΦ̃)(g + bgDΔ_t⁻¹)f + Φ̃(−bg∂_XΔ_t⁻¹ + bgD∂_tΔ_t⁻¹)f`
/// with `∂_tΦ̃ = −∂_XΔ_t⁻¹ − Φ̃b∂_XΔ_t⁻¹`.
pub fn dtg_apply(t: f64, k: i64, profile: &ProfileSpectrum, phi_tilde: &DMatrix<C64>, f: &[C64]) -> Result<Vec<C64>> {
    if profile.n_eta > DTG_MAX_N_ETA {
        return Err(Error::CostGuard(format!("dtG needs n_eta <= {DTG_MAX_N_ETA}, got {}", profile.n_eta)));
    }
    check_len(profile, f)?;
    let dt = DeltaT::new(t, k, profile)?;
    let g = profile.g_matrix();
    let add = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<C64>>();
    let b_of = |u: &[C64]| profile.conv(Kernel::B, u);
    let inv_f = dt.inv(f)?;
    let dx_inv_f = dt.dx(&inv_f);
    let dtinv_f = {
        let y = build_dt_delta_t(t, k, profile)?.apply(&inv_f);
        dt.inv(&y)?.into_iter().map(|z| -z).collect::<Vec<_>>()
    };
    let g_dx_inv_f = mat_vec(&g, &dx_inv_f);
    let g_d_dtinv_f = mat_vec(&g, &dt.d(&dtinv_f));
    let g_d_inv_f = mat_vec(&g, &dt.d(&inv_f));
    // ∂_tΦ̃ applied to u
    let dphi = |u: &[C64]| -> Result<Vec<C64>> {
        let a = dt.dx(&dt.inv(u)?);
        let b = mat_vec(phi_tilde, &b_of(&a));
        Ok(a.iter().zip(b).map(|(x, y)| -x - y).collect())
    };
    let inner = add(&mat_vec(&g, f), &b_of(&g_d_inv_f));
    let t3 = dphi(&inner)?;
    let t4_in: Vec<C64> = add(&b_of(&g_dx_inv_f).iter().map(|z| -z).collect::<Vec<_>>(), &b_of(&g_d_dtinv_f));
    let t4 = mat_vec(phi_tilde, &t4_in);
    let mut out = add(&g_dx_inv_f.iter().map(|z| -z).collect::<Vec<_>>(), &g_d_dtinv_f);
    out = add(&out, &t3);
    out = add(&out, &t4);
    Ok(out)
}

/// Closed-form Couette `Φ̃(t,0)`: the diagonal `i[arctan(η/k) − arctan(η/k − t)]`.
pub fn phi_tilde_couette(t: f64, k: i64, etas: &[f64]) -> Vec<C64> {
    let kf = k as f64;
    etas.iter().map(|e| C64::new(0.0, (e / kf).atan() - (e / kf - t).atan())).collect()
}

/// Largest eigenvalue of the Hermitian part of `Δ_t`.
pub fn delta_t_hermitian_max(t: f64, k: i64, profile: &ProfileSpectrum) -> Result<f64> {
    let m = build_delta_t(t, k, profile)?.entries;
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(h.symmetric_eigenvalues().max())
}

/// Fitted contraction constant `max ‖T̃₂(t,k)‖/ε` over the sampled `(t, k)`.
pub fn fit_t2_constant(profile: &ProfileSpectrum, ks: &[i64], times: &[f64]) -> Result<f64> {
    if profile.is_couette() || profile.eps_measured == 0.0 {
        return Ok(0.0);
    }
    let mut c = 0.0f64;
    for &k in ks {
        for &t in times {
            c = c.max(build_t2_tilde(t, k, profile)?.norm2() / profile.eps_measured);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileShape;
    use crate::spectral::FrequencyGrid;

    fn prof(eps: f64) -> ProfileSpectrum {
        let grid = FrequencyGrid::new(2, 8.0, 32).unwrap();
        ProfileSpectrum::with_eps(&grid, ProfileShape::Gaussian { sigma: 1.0 }, eps, 1.0).unwrap()
    }

    fn rand_vec(n: usize, seed: u64) -> Vec<C64> {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| C64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)).collect()
    }

    #[test]
    fn couette_limit_is_diagonal() {
        let grid = FrequencyGrid::new(2, 4.0, 8).unwrap();
        let p = ProfileSpectrum::couette(&grid);
        let m = build_delta_t(1.5, 1, &p).unwrap().entries;
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    assert_eq!(m[(i, j)], C64::new(0.0, 0.0));
                }
            }
            let e = grid.eta(i);
            assert_eq!(m[(i, i)].re, -(1.0 + (e - 1.5).powi(2)));
        }
        assert_eq!(build_t2_tilde(1.5, 1, &p).unwrap().norm2(), 0.0);
    }

    #[test]
    fn factorization_identity() {
        let p = prof(0.05);
        for &(t, k) in &[(0.0, 1), (3.3, 2), (40.0, -1)] {
            let dt = build_delta_t(t, k, &p).unwrap().entries;
            let t2 = build_t2_tilde(t, k, &p).unwrap().entries;
            let n = dt.nrows();
            let et = etas(&p);
            let dl = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(-((k * k) as f64 + (et[i] - k as f64 * t).powi(2)), 0.0) } else { C64::new(0.0, 0.0) });
            let rhs = (DMatrix::identity(n, n) - t2) * dl;
            let scale = dt.norm();
            assert!((dt - rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn neumann_matches_direct() {
        let p = prof(0.05);
        let f = rand_vec(33, 3);
        let (a, incs) = apply_t2(2.0, 1, &p, &f, T2Method::Neumann { tol: 1e-14, n_max: 500 }).unwrap();
        let (b, _) = apply_t2(2.0, 1, &p, &f, T2Method::Direct).unwrap();
        let d: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!(vec_norm(&d) <= 1e-10 * vec_norm(&b));
        let nrm = build_t2_tilde(2.0, 1, &p).unwrap().norm2();
        for w in incs.windows(2) {
            assert!(w[1] <= nrm * w[0] * (1.0 + 1e-9) + 1e-300);
        }
    }

    #[test]
    fn inverse_residual() {
        let p = prof(0.05);
        let f = rand_vec(33, 5);
        let x = apply_delta_t_inv(7.0, 2, &p, &f).unwrap();
        let back = build_delta_t(7.0, 2, &p).unwrap().apply(&x);
        let d: Vec<C64> = back.iter().zip(&f).map(|(x, y)| x - y).collect();
        assert!(vec_norm(&d) <= 1e-8 * vec_norm(&f));
    }

    #[test]
    fn two_point_hand_solve() {
        // Two lattice points η ∈ {−1, 1}, b ≡ 0, g² − 1 coupling the two through lag ±2.
        let grid = FrequencyGrid::new(1, 1.0, 2).unwrap();
        let mut p = ProfileSpectrum::couette(&grid);
        p.amplitude = 1.0;
        p.shape = ProfileShape::Cosine { kappa: 2.0 };
        let c = 0.1;
        p.g2m1_hat[p.n_eta + 2] = C64::new(c, 0.0);
        p.g2m1_hat[p.n_eta - 2] = C64::new(c, 0.0);
        let k = 1;
        let t = 0.0;
        // Zero data at η = 0; rows η = ±1 couple with weight Δη·c = c.
        let f = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0)];
        let x = apply_delta_t_inv(t, k, &p, &f).unwrap();
        // Hand system on (x₋, x₊): −2x₋ − c·x₊ = 1, −c·x₋ − 2x₊ = 2.
        let det = 4.0 - c * c;
        let xm = (-2.0 * 1.0 + c * 2.0) / det;
        let xp = (-2.0 * 2.0 + c * 1.0) / det;
        assert!((x[0].re - xm).abs() < 1e-14, "{:?} {}", x, xm);
        assert!((x[2].re - xp).abs() < 1e-14);
        assert!(x[1].norm() < 1e-15);
    }

    #[test]
    fn dt_delta_l_symbol() {
        let d = dt_delta_l(1.0, 1, &[0.0]).unwrap();
        assert_eq!(d[0], -2.0);
        assert!(dt_delta_l(0.0, 0, &[0.0]).is_err());
        // finite difference of −p
        let (t, k, e) = (0.7, 2.0, 1.3);
        let h = 1e-4;
        let mp = |t: f64| -(k * k + (e - k * t).powi(2));
        let fd = (mp(t + h) - mp(t - h)) / (2.0 * h);
        let s = dt_delta_l(t, 2, &[e]).unwrap()[0];
        assert!((fd - s).abs() < 1e-7);
    }

    #[test]
    fn phi_tilde_couette_closed_form() {
        let grid = FrequencyGrid::new(1, 4.0, 8).unwrap();
        let p = ProfileSpectrum::couette(&grid);
        let pair = phi_b_step(5.0, 1, &p, &PhiPair::identity(9), 1e-10).unwrap();
        let cf = phi_tilde_couette(5.0, 1, &etas(&p));
        for i in 0..9 {
            assert!((pair.phi_tilde[(i, i)] - cf[i]).norm() < 1e-8);
            assert!((pair.phi_b[(i, i)] - C64::new(1.0, 0.0)).norm() == 0.0);
        }
    }
}
