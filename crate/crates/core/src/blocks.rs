//! The two building-block evolutions and the toy model, each with its weighted-norm monitor.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, Dopri5};
use crate::operators::{DeltaT, mat_vec};
use crate::profile::{Kernel, ProfileSpectrum};
use crate::spectral::{FrequencyGrid, SobolevSpec, SpectralField, C64};
use crate::weights::{m_raw, p_raw, w_raw, z_raw};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlockKind {
    Block1,
    Block2,
    /// `∂_t f = c[∂_tΔ_L]Δ_L⁻¹f`, solved exactly by `(p/p₀)^c f_in`.
    Block2CouetteOracle { c: f64 },
    Toy,
}

#[derive(Clone, Debug)]
pub struct BlockRun {
    pub kind: BlockKind,
    pub times: Vec<f64>,
    /// Named norm series on `times` (full field).
    pub monitors: BTreeMap<String, Vec<f64>>,
    /// Largest relative one-step increase of the monotone monitor, over rows and accepted steps.
    pub max_step_increase: f64,
    pub monotone_monitor: String,
    pub accepted_steps: usize,
    /// Final state (for the toy model, `r` then `a`).
    pub final_fields: Vec<SpectralField>,
}

#[derive(Clone, Copy, Debug)]
pub struct BlockSettings {
    pub sobolev: SobolevSpec,
    pub eps_tilde: f64,
    pub big_n: f64,
    pub tol: f64,
}

impl BlockSettings {
    pub fn new(s: f64, eps_tilde: f64) -> Self {
        Self { sobolev: SobolevSpec::Isotropic(s), eps_tilde, big_n: 32.0, tol: 1e-10 }
    }
}

fn check_input(f: &SpectralField, profile: &ProfileSpectrum) -> Result<()> {
    if f.has_zero_mode() {
        return Err(Error::ZeroModeViolation("f_in"));
    }
    if f.grid.n_eta != profile.n_eta || (f.grid.d_eta() - profile.d_eta).abs() > 1e-12 * profile.d_eta {
        return Err(Error::GridMismatch("field and profile lattices differ".into()));
    }
    Ok(())
}

/// Per-row engine: integrates each nonzero-k row, tracks the first monitor for monotonicity at
/// every accepted step, and sums squared monitors over rows on `times`.
#[allow(clippy::too_many_arguments)]
fn run_rows<F, M>(
    grid: FrequencyGrid,
    rows: Vec<(i64, Vec<C64>)>,
    times: &[f64],
    tol: f64,
    names: &[&str],
    rhs: F,
    monitor: M,
) -> Result<(BTreeMap<String, Vec<f64>>, f64, usize, Vec<(i64, Vec<C64>)>)>
where
    F: Fn(i64, f64, &[C64], &mut [C64]) -> Result<()>,
    M: Fn(i64, f64, &[C64]) -> Vec<f64>,
{
    let _ = grid;
    let mut sums = vec![vec![0.0; times.len()]; names.len()];
    let mut worst = f64::NEG_INFINITY;
    let mut steps = 0;
    let mut finals = Vec::new();
    let opts = Dopri5::new(tol).with_atol(tol * 1e-6).with_h_max(1.0);
    for (k, y0) in rows {
        let m0 = monitor(k, 0.0, &y0);
        let mut prev = m0[0];
        let stops: Vec<f64> = times.iter().copied().filter(|&t| t > 0.0).collect();
        let (out, st) = integrate::solve(
            |t, y, dy| rhs(k, t, y, dy),
            0.0,
            &y0,
            &stops,
            &opts,
            |t, y| {
                let m = monitor(k, t, y)[0];
                if prev > 0.0 {
                    worst = worst.max((m / prev).sqrt() - 1.0);
                }
                prev = m;
                Ok(())
            },
        )?;
        steps += st.accepted;
        let mut oi = 0;
        for (ti, &t) in times.iter().enumerate() {
            let y = if t > 0.0 {
                oi += 1;
                &out[oi - 1]
            } else {
                &y0
            };
            for (s, v) in sums.iter_mut().zip(monitor(k, t, y)) {
                s[ti] += v;
            }
        }
        finals.push((k, out.last().cloned().unwrap_or(y0)));
    }
    let mut map = BTreeMap::new();
    for (n, s) in names.iter().zip(sums) {
        map.insert(n.to_string(), s.into_iter().map(|v| v.sqrt()).collect());
    }
    Ok((map, worst.max(0.0), steps, finals))
}

fn rows_of(f: &SpectralField) -> Vec<(i64, Vec<C64>)> {
    f.grid.nonzero_ks().map(|k| (k, f.row(k).to_vec())).collect()
}

fn field_from_rows(grid: FrequencyGrid, rows: &[(i64, Vec<C64>)]) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    for (k, r) in rows {
        f.row_mut(*k).copy_from_slice(r);
    }
    f
}

/// `∂_t f = b∂_XΔ_t⁻¹f`; monitors `‖z⁻¹f‖_{H^s}` (monotone) and `‖f‖_{H^s}`.
pub fn block1_evolve(f_in: &SpectralField, profile: &ProfileSpectrum, times: &[f64], settings: &BlockSettings) -> Result<BlockRun> {
    check_input(f_in, profile)?;
    let g = f_in.grid;
    let etas = g.etas();
    let sob = settings.sobolev;
    let (mons, worst, steps, finals) = run_rows(
        g,
        rows_of(f_in),
        times,
        settings.tol,
        &["z_inv_f", "f"],
        |k, t, y, dy| {
            let dt = DeltaT::new(t, k, profile)?;
            let v = profile.conv(Kernel::B, &dt.dx(&dt.inv(y)?));
            dy.copy_from_slice(&v);
            Ok(())
        },
        |k, t, y| {
            let kf = k as f64;
            let (mut a, mut b) = (0.0, 0.0);
            for (x, e) in y.iter().zip(&etas) {
                let w = sob.weight_sq(kf, *e) * x.norm_sqr() * g.d_eta();
                let z = z_raw(t, kf, *e);
                a += w / (z * z);
                b += w;
            }
            vec![a, b]
        },
    )?;
    Ok(BlockRun {
        kind: BlockKind::Block1,
        times: times.to_vec(),
        monitors: mons,
        max_step_increase: worst,
        monotone_monitor: "z_inv_f".into(),
        accepted_steps: steps,
        final_fields: vec![field_from_rows(g, &finals)],
    })
}

/// `∂_t f = g²[∂_tΔ_L]Δ_t⁻¹f`; monitors `‖m⁻¹w⁻¹f‖_{H^s}` (monotone) and `‖Δ_L^{−(1+ε̃)}f‖_{H^s}`.
///
/// With [`BlockKind::Block2CouetteOracle`] the right side is `c[∂_tΔ_L]Δ_L⁻¹f` and the profile is
/// ignored.
pub fn block2_evolve(f_in: &SpectralField, profile: &ProfileSpectrum, times: &[f64], settings: &BlockSettings, kind: BlockKind) -> Result<BlockRun> {
    check_input(f_in, profile)?;
    let g = f_in.grid;
    let etas = g.etas();
    let sob = settings.sobolev;
    let (et, nn) = (settings.eps_tilde, settings.big_n);
    let g2 = profile.g2_matrix();
    let oracle_c = match kind {
        BlockKind::Block2 => None,
        BlockKind::Block2CouetteOracle { c } => Some(c),
        _ => return Err(Error::Domain("block2_evolve handles Block2 kinds only".into())),
    };
    let (mons, worst, steps, finals) = run_rows(
        g,
        rows_of(f_in),
        times,
        settings.tol,
        &["m_inv_w_inv_f", "delta_l_pow_f"],
        |k, t, y, dy| {
            let kf = k as f64;
            match oracle_c {
                Some(c) => {
                    for ((d, x), e) in dy.iter_mut().zip(y).zip(&etas) {
                        let (p, pp) = p_raw(t, kf, *e);
                        *d = c * pp / p * x;
                    }
                }
                None => {
                    let dt = DeltaT::new(t, k, profile)?;
                    let v = mat_vec(&g2, &dt.dt_delta_l(&dt.inv(y)?));
                    dy.copy_from_slice(&v);
                }
            }
            Ok(())
        },
        |k, t, y| {
            let kf = k as f64;
            let (mut a, mut b) = (0.0, 0.0);
            for (x, e) in y.iter().zip(&etas) {
                let w = sob.weight_sq(kf, *e) * x.norm_sqr() * g.d_eta();
                let mw = m_raw(t, kf, *e, nn) * w_raw(t, kf, *e, et);
                let (p, _) = p_raw(t, kf, *e);
                a += w / (mw * mw);
                b += w * p.powf(-2.0 * (1.0 + et));
            }
            vec![a, b]
        },
    )?;
    Ok(BlockRun {
        kind,
        times: times.to_vec(),
        monitors: mons,
        max_step_increase: worst,
        monotone_monitor: "m_inv_w_inv_f".into(),
        accepted_steps: steps,
        final_fields: vec![field_from_rows(g, &finals)],
    })
}

/// Closed-form solution of the Couette oracle problem at time `t`.
pub fn block2_oracle_solution(f_in: &SpectralField, c: f64, t: f64) -> SpectralField {
    f_in.map(|k, eta, x| {
        if k == 0 {
            return x;
        }
        let (p, _) = p_raw(t, k as f64, eta);
        let (p0, _) = p_raw(0.0, k as f64, eta);
        x * (p / p0).powf(c)
    })
}

/// Toy system `∂_t r = −a`, `∂_t a = g²[∂_tΔ_L]Δ_t⁻¹a − Δ_L r`; monitors the functional
/// `‖ṽ⁻¹r‖²_s + ‖w̃⁻¹a‖²_s` (as its square root) with `w̃ = wm`, `ṽ⁻² = w̃⁻²(−Δ_L)`, plus `‖r‖` and
/// `‖(−Δ_L)^{−1/2}a‖`.
pub fn toy_evolve(r_in: &SpectralField, a_in: &SpectralField, profile: &ProfileSpectrum, times: &[f64], settings: &BlockSettings) -> Result<BlockRun> {
    check_input(r_in, profile)?;
    check_input(a_in, profile)?;
    r_in.check_same_grid(a_in)?;
    let g = r_in.grid;
    let n = g.n_points();
    let etas = g.etas();
    let sob = settings.sobolev;
    let (et, nn) = (settings.eps_tilde, settings.big_n);
    let g2 = profile.g2_matrix();
    let rows: Vec<(i64, Vec<C64>)> = g
        .nonzero_ks()
        .map(|k| {
            let mut v = r_in.row(k).to_vec();
            v.extend_from_slice(a_in.row(k));
            (k, v)
        })
        .collect();
    let (mons, worst, steps, finals) = run_rows(
        g,
        rows,
        times,
        settings.tol,
        &["toy_functional", "r", "q_like"],
        |k, t, y, dy| {
            let kf = k as f64;
            let (r, a) = y.split_at(n);
            let dt = DeltaT::new(t, k, profile)?;
            let da = mat_vec(&g2, &dt.dt_delta_l(&dt.inv(a)?));
            for j in 0..n {
                let (p, _) = p_raw(t, kf, etas[j]);
                dy[j] = -a[j];
                dy[n + j] = da[j] + p * r[j];
            }
            Ok(())
        },
        |k, t, y| {
            let kf = k as f64;
            let (r, a) = y.split_at(n);
            let (mut f, mut rr, mut q) = (0.0, 0.0, 0.0);
            for j in 0..n {
                let e = etas[j];
                let (p, _) = p_raw(t, kf, e);
                let wt = w_raw(t, kf, e, et) * m_raw(t, kf, e, nn);
                let s = sob.weight_sq(kf, e) * g.d_eta();
                f += s * (p * r[j].norm_sqr() + a[j].norm_sqr()) / (wt * wt);
                rr += g.d_eta() * r[j].norm_sqr();
                q += g.d_eta() * a[j].norm_sqr() / p;
            }
            vec![f, rr, q]
        },
    )?;
    let r_rows: Vec<(i64, Vec<C64>)> = finals.iter().map(|(k, v)| (*k, v[..n].to_vec())).collect();
    let a_rows: Vec<(i64, Vec<C64>)> = finals.iter().map(|(k, v)| (*k, v[n..].to_vec())).collect();
    Ok(BlockRun {
        kind: BlockKind::Toy,
        times: times.to_vec(),
        monitors: mons,
        max_step_increase: worst,
        monotone_monitor: "toy_functional".into(),
        accepted_steps: steps,
        final_fields: vec![field_from_rows(g, &r_rows), field_from_rows(g, &a_rows)],
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ToyComparison {
    /// Growth exponent of the bound on `‖r‖²` implied by the toy functional.
    pub toy_exponent: f64,
    /// Growth exponent of the bound on `‖R‖²` implied by the optimal functional.
    pub optimal_exponent: f64,
    pub window: (f64, f64),
}

/// Exponents of the weight envelopes `max_{k,η} w²p⁻¹(t)/(…)(0)` (toy) and
/// `max_{k,η} w^{2(1−c)}p⁻¹(t)/(…)(0)` (optimal) over a log-spaced window.
/// `m` sits between `e^{±Nπ}` and is left out.
pub fn toy_comparison(grid: &FrequencyGrid, eps_tilde: f64, c_exp: f64, window: (f64, f64)) -> Result<ToyComparison> {
    let n = 40;
    let (t0, t1) = window;
    let times: Vec<f64> = (0..n).map(|i| t0 * (t1 / t0).powf(i as f64 / (n - 1) as f64)).collect();
    let etas = grid.etas();
    let env = |f: &dyn Fn(f64, f64, f64) -> f64| -> Vec<(f64, f64)> {
        times
            .iter()
            .map(|&t| {
                let mut best = 0.0f64;
                for k in 1..=grid.k_max as i64 {
                    for &e in &etas {
                        best = best.max(f(t, k as f64, e) / f(0.0, k as f64, e));
                    }
                }
                (t, best)
            })
            .collect()
    };
    let toy = env(&|t, k, e| w_raw(t, k, e, eps_tilde).powi(2) / p_raw(t, k, e).0);
    let opt = env(&|t, k, e| w_raw(t, k, e, eps_tilde).powf(2.0 * (1.0 - c_exp)) / p_raw(t, k, e).0);
    let slope = |s: &[(f64, f64)]| -> f64 {
        let (a, b) = (s[0], s[s.len() - 1]);
        (b.1.ln() - a.1.ln()) / (b.0.ln() - a.0.ln())
    };
    Ok(ToyComparison { toy_exponent: slope(&toy), optimal_exponent: slope(&opt), window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileShape;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(1, 4.0, 8).unwrap()
    }

    fn data(g: FrequencyGrid) -> SpectralField {
        let mut f = SpectralField::from_fn(g, |k, eta| if k == 0 { C64::new(0.0, 0.0) } else { C64::new((-eta * eta / 4.0).exp(), 0.1 * eta) });
        f.conjugate_symmetrize();
        f
    }

    #[test]
    fn block1_couette_is_static() {
        let g = grid();
        let p = ProfileSpectrum::couette(&g);
        let f = data(g);
        let run = block1_evolve(&f, &p, &[0.0, 5.0, 10.0], &BlockSettings::new(1.0, 0.0)).unwrap();
        let out = &run.final_fields[0];
        for (a, b) in out.values().iter().zip(f.values()) {
            assert_eq!(a, b);
        }
        assert!(run.max_step_increase <= 0.0);
    }

    #[test]
    fn block2_oracle() {
        let g = grid();
        let p = ProfileSpectrum::couette(&g);
        let f = data(g);
        let c = 0.25;
        let run = block2_evolve(&f, &p, &[0.0, 100.0], &BlockSettings::new(0.0, 0.0), BlockKind::Block2CouetteOracle { c }).unwrap();
        let exact = block2_oracle_solution(&f, c, 100.0);
        for (a, b) in run.final_fields[0].values().iter().zip(exact.values()) {
            assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-300), "{a} {b}");
        }
    }

    #[test]
    fn toy_zero_data() {
        let g = grid();
        let p = ProfileSpectrum::with_eps(&g, ProfileShape::Gaussian { sigma: 1.0 }, 0.01, 1.0).unwrap();
        let z = SpectralField::zeros(g);
        let run = toy_evolve(&z, &z, &p, &[0.0, 1.0], &BlockSettings::new(0.0, 0.02)).unwrap();
        assert!(run.monitors["toy_functional"].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn toy_comparison_orders_exponents() {
        let g = FrequencyGrid::new(2, 8.0, 16).unwrap();
        let c = toy_comparison(&g, 0.02, 0.23, (20.0, 500.0)).unwrap();
        assert!(c.optimal_exponent < c.toy_exponent);
    }
}
