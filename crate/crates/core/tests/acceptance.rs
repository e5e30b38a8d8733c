//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use shearspec_core::couette::{self, LwMode, LwSettings, ModeState, StepControl};
use shearspec_core::harness::{self, DataShape, DataSpec, RunConfig, Scenario};
use shearspec_core::operators::{self, T2Method};
use shearspec_core::rates::{fit_rate, log_times};
use shearspec_core::shear::{self, Reconstruction, ShearSettings};
use shearspec_core::spectral::{FlowState, ThirdField};
use shearspec_core::weights::WeightParams;
use shearspec_core::zeromode;
use shearspec_core::{FrequencyGrid, ProfileShape, ProfileSpectrum, Result, SpectralField, C64};

use nalgebra::DMatrix;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn out_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("shearspec-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn gaussian(grid: &FrequencyGrid, eps: f64) -> Result<ProfileSpectrum> {
    ProfileSpectrum::with_eps(grid, ProfileShape::Gaussian { sigma: 1.0 }, eps, 1.0)
}

fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let mut d = a.clone();
    d.axpy(C64::new(-1.0, 0.0), b);
    d.l2() / b.l2().max(f64::MIN_POSITIVE)
}

fn fmt_exp(x: f64) -> String {
    format!("{x:.4}")
}

fn couette_cfg(mach: f64, shape: DataShape, t_end: f64) -> RunConfig {
    let d = RunConfig::default();
    RunConfig { mach, t_end, data: DataSpec { shape, ..d.data }, ..d }
}

fn couette_series(cfg: RunConfig) -> Result<(Vec<f64>, Vec<(f64, f64)>, Vec<(f64, f64)>, Vec<(f64, f64)>, f64)> {
    let mach = cfg.mach;
    let grid = cfg.grid()?;
    let times = cfg.times();
    let clock = Instant::now();
    let data = harness::generate_data(grid, &cfg.data, None, mach)?;
    let run = harness::couette_field(&data, &times, cfg.tol)?;
    let secs = clock.elapsed().as_secs_f64();
    let m2 = 1.0 / (mach * mach);
    let ac = times.iter().zip(&run.norms).map(|(t, n)| (*t, n.q_energy + m2 * n.rho_norm * n.rho_norm)).collect();
    let p1 = times.iter().zip(&run.norms).map(|(t, n)| (*t, n.p1_norm)).collect();
    let p2 = times.iter().zip(&run.norms).map(|(t, n)| (*t, n.p2_norm)).collect();
    Ok((times, ac, p1, p2, secs))
}

struct CouetteFits {
    mach: f64,
    acoustic: f64,
    p1: f64,
    p2: f64,
    secs: f64,
}

fn couette_fits() -> Result<Vec<CouetteFits>> {
    [0.1, 1.0]
        .into_iter()
        .map(|mach| {
            let (_, ac, p1, p2, secs) = couette_series(couette_cfg(mach, DataShape::XiZero, 500.0))?;
            let w = (20.0, 500.0);
            Ok(CouetteFits { mach, acoustic: fit_rate(&ac, w)?.exponent, p1: fit_rate(&p1, w)?.exponent, p2: fit_rate(&p2, w)?.exponent, secs })
        })
        .collect()
}

fn couette_acoustic(fits: &[CouetteFits]) -> Result<Verdict> {
    let pass = fits.iter().all(|f| (f.acoustic - 1.0).abs() <= 0.05 && f.secs < 120.0);
    let d: Vec<String> = fits.iter().map(|f| format!("M={} exponent {} in {:.1}s", f.mach, fmt_exp(f.acoustic), f.secs)).collect();
    verdict(pass, d.join("; "))
}

fn couette_damping(fits: &[CouetteFits]) -> Result<Verdict> {
    let pass = fits.iter().all(|f| (f.p1 + 0.5).abs() <= 0.05 && (f.p2 + 1.5).abs() <= 0.07);
    let d: Vec<String> = fits.iter().map(|f| format!("M={} P1 {} P2 {}", f.mach, fmt_exp(f.p1), fmt_exp(f.p2))).collect();
    verdict(pass, d.join("; "))
}

fn xi_dominant() -> Result<Verdict> {
    // reduced grid: every mode carries Ξ forcing at M = 0.01
    let d = RunConfig::default();
    let cfg = RunConfig { mach: 0.01, t_end: 1000.0, k_max: 2, n_eta: 64, data: DataSpec { shape: DataShape::OmegaOnly, ..d.data }, ..d };
    let (_, _, p1, p2, _) = couette_series(cfg)?;
    let w = (10.0, 1000.0);
    let (e1, e2) = (fit_rate(&p1, w)?.exponent, fit_rate(&p2, w)?.exponent);
    verdict((e1 + 1.0).abs() <= 0.1 && (e2 + 2.0).abs() <= 0.15, format!("M=0.01 P1 {} P2 {}", fmt_exp(e1), fmt_exp(e2)))
}

fn key_lemma() -> Result<Verdict> {
    let times = log_times(10.0, 1000.0, 200);
    let mut worst_slope = 0.0f64;
    let mut checked = 0usize;
    let mut violations = 0usize;
    for mach in [0.1, 1.0] {
        for k in [1i64, 2, 4] {
            for eta in [-20.0, -3.0, 0.0, 2.5, 10.0, 40.0] {
                let z = [C64::new(1.0, 0.3), C64::new(-0.4, 0.8)];
                let mode = ModeState::new(k, eta, mach, z, C64::new(0.0, 0.0))?;
                let mut ts = vec![0.0];
                ts.extend(&times);
                let tr = couette::evolve_mode_at(&mode, &ts, StepControl::new(1e-10))?;
                let series: Vec<(f64, f64)> = tr.samples.iter().map(|s| (s.t, (s.z[0].norm_sqr() + s.z[1].norm_sqr()).sqrt())).collect();
                worst_slope = worst_slope.max(fit_rate(&series, (10.0, 1000.0))?.exponent.abs());
                for s in &tr.samples {
                    for v in [[s.z[0].re, s.z[1].re], [s.z[0].im, s.z[1].im]] {
                        let (et, e, ratio) = couette::tilde_energy(v, s.t, k, eta, mach)?;
                        if ratio < 0.5 {
                            checked += 1;
                            if !(e / 2.0 <= et && et <= 1.5 * e) {
                                violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    verdict(
        worst_slope <= 0.02 && violations == 0 && checked > 0,
        format!("max |slope| {worst_slope:.2e} over 36 modes; coercivity {violations} violations in {checked} samples"),
    )
}

fn lower_bound() -> Result<Verdict> {
    let eps = 0.1;
    let settings = LwSettings::default();
    let mut modes = Vec::new();
    // Γ(t) = Z_in + Ξ_in·I(t); Z_in = −I(t₀) puts a zero of Γ at t₀.
    for mach in [0.5, 1.0] {
        for k in [1i64, 2] {
            for eta in [-1.0, -0.5, 0.5, 1.0] {
                for t0 in [0.5, 2.0] {
                    let probe = ModeState::new(k, eta, mach, [C64::new(0.0, 0.0); 2], C64::new(1.0, 0.0))?;
                    let i0 = couette::evolve_mode_at(&probe, &[t0], StepControl::new(settings.tol))?.samples[0].gamma;
                    let z = [-i0[0], -i0[1]];
                    let (r, a) = couette::denormalize(0.0, k, eta, mach, &z);
                    modes.push(LwMode { k, eta, mach, rho: r, alpha: a, omega: C64::new(1.0, 0.0) - r });
                }
            }
        }
    }
    let perturbed = couette::perturb_data_lwdensity(&modes, eps, &settings)?;
    let n = (settings.t_scan / settings.scan_dt).round() as usize;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * settings.scan_dt).collect();
    let mut worst = f64::INFINITY;
    let mut engineered = 0;
    for (m, p) in modes.iter().zip(&perturbed) {
        let bound = 0.5 * eps * (-((m.k * m.k) as f64 + m.eta * m.eta)).exp();
        let tr = couette::evolve_mode_at(&p.perturbed.mode_state()?, &times, StepControl::new(settings.tol))?;
        let inf = tr.samples.iter().map(|s| (s.gamma[0].norm_sqr() + s.gamma[1].norm_sqr()).sqrt()).fold(f64::INFINITY, f64::min);
        worst = worst.min(inf / bound);
        engineered += usize::from(!p.near_zero_times.is_empty());
    }
    verdict(worst >= 1.0, format!("{} modes ({engineered} with located zeros), min inf|Γ^ε|/bound = {worst:.4}", modes.len()))
}

fn operator_algebra() -> Result<Verdict> {
    let grid = FrequencyGrid::new(2, 16.0, 64)?;
    let p = gaussian(&grid, 0.05)?;
    let n = grid.n_points();
    let et = grid.etas();
    let mut fact = 0.0f64;
    let mut neu = 0.0f64;
    for &(t, k) in &[(0.0, 1i64), (3.3, 2), (40.0, -1), (150.0, 1)] {
        let dt = operators::build_delta_t(t, k, &p)?.entries;
        let t2 = operators::build_t2_tilde(t, k, &p)?.entries;
        let dl = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(-((k * k) as f64 + (et[i] - k as f64 * t).powi(2)), 0.0) } else { C64::new(0.0, 0.0) });
        let rhs = (DMatrix::identity(n, n) - t2) * dl;
        fact = fact.max((&dt - rhs).norm() / dt.norm());
        let f: Vec<C64> = et.iter().map(|e| C64::new((-e * e / 8.0).exp(), 0.3 * (e / 3.0).sin())).collect();
        let (a, _) = operators::apply_t2(t, k, &p, &f, T2Method::Neumann { tol: 1e-15, n_max: 1000 })?;
        let (b, _) = operators::apply_t2(t, k, &p, &f, T2Method::Direct)?;
        let d: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        neu = neu.max(operators::vec_norm(&d) / operators::vec_norm(&b));
    }
    let mut sweep = Vec::new();
    let mut stable = true;
    for eps in [0.01, 0.05] {
        let c = harness::eps_tilde_for(&gaussian(&grid, eps)?, grid.k_max, None)?.fitted_c;
        let cf = harness::eps_tilde_for(&gaussian(&grid.refined(), eps)?, grid.k_max, None)?.fitted_c;
        stable &= ((cf - c) / c).abs() <= 0.2;
        sweep.push(format!("eps={eps} C={c:.4}->{cf:.4}"));
    }
    verdict(fact <= 1e-12 && neu <= 1e-10 && stable, format!("factorization {fact:.1e}, Neumann {neu:.1e}, {}", sweep.join(", ")))
}

fn block_cfg(scenario: Scenario, t_end: f64) -> RunConfig {
    RunConfig {
        scenario,
        k_max: 2,
        eta_max: 8.0,
        n_eta: 32,
        profile: "gaussian".into(),
        eps: 0.05,
        t_end,
        n_times: 60,
        fit_window: (t_end / 10.0, t_end),
        ..RunConfig::default()
    }
}

fn block1() -> Result<Verdict> {
    let o = harness::run(&block_cfg(Scenario::Block1, 200.0), &out_dir())?;
    let inc = o.summary["max_step_increase"].as_f64().unwrap_or(f64::NAN);
    let sup = o.summary["sup_over_initial"]["f"].as_f64().unwrap_or(f64::NAN);
    verdict(inc <= 1e-8 && sup < 10.0, format!("max step increase {inc:.2e}, sup ||f||/||f_in|| = {sup:.5}"))
}

fn block2() -> Result<Verdict> {
    let o = harness::run(&block_cfg(Scenario::Block2, 200.0), &out_dir())?;
    let inc = o.summary["max_step_increase"].as_f64().unwrap_or(f64::NAN);
    let grid = FrequencyGrid::new(2, 8.0, 32)?;
    let p = ProfileSpectrum::couette(&grid);
    let f = harness::generate_data(grid, &DataSpec { seed: 3, s_d: 2.0, shape: DataShape::Random }, None, 1.0)?.r;
    let c = 0.25;
    let run = shearspec_core::blocks::block2_evolve(
        &f,
        &p,
        &[0.0, 100.0],
        &shearspec_core::blocks::BlockSettings::new(0.0, 0.0),
        shearspec_core::blocks::BlockKind::Block2CouetteOracle { c },
    )?;
    let err = rel_diff(&run.final_fields[0], &shearspec_core::blocks::block2_oracle_solution(&f, c, 100.0));
    verdict(inc <= 1e-8 && err <= 1e-6, format!("max step increase {inc:.2e}, oracle error at t=100 {err:.2e}"))
}

fn shear_cfg(eps: f64) -> RunConfig {
    RunConfig {
        scenario: Scenario::Shear,
        k_max: 1,
        eta_max: 8.0,
        n_eta: 16,
        profile: "gaussian".into(),
        eps,
        t_end: 200.0,
        n_times: 100,
        fit_window: (10.0, 200.0),
        ..RunConfig::default()
    }
}

fn near_couette_energy(outcomes: &[(f64, harness::RunOutcome)]) -> Result<Verdict> {
    let mut pass = true;
    let mut d = Vec::new();
    for (eps, o) in outcomes {
        let inc = o.summary["max_step_increase"].as_f64().unwrap_or(f64::NAN);
        let coer = o.summary["min_coercivity"].as_f64().unwrap_or(f64::NAN);
        pass &= inc <= 1e-8 && coer >= 0.1;
        d.push(format!("eps={eps} max step increase {inc:.2e}, min coercivity {coer:.4}"));
    }
    verdict(pass, d.join("; "))
}

fn near_couette_rates(outcomes: &[(f64, harness::RunOutcome)]) -> Result<Verdict> {
    let (_, o) = outcomes.iter().find(|(e, _)| *e == 0.05).expect("eps = 0.05 run");
    let r = &o.summary["rates"];
    let get = |k: &str| r[k]["exponent"].as_f64().unwrap_or(f64::NAN);
    let ok = |k: &str| r[format!("{k}_ok")].as_bool().unwrap_or(false);
    let et = o.summary["eps_tilde"]["eps_tilde"].as_f64().unwrap_or(f64::NAN);
    verdict(
        ok("acoustic") && ok("p1") && ok("p2"),
        format!("eps_tilde {et:.4}: acoustic {} (<= {:.4}), P1 {} (<= -0.4), P2 {} (<= -1.4)", fmt_exp(get("acoustic")), 1.05 + et, fmt_exp(get("p1")), fmt_exp(get("p2"))),
    )
}

fn shear_state(grid: FrequencyGrid, profile: &ProfileSpectrum, seed: u64) -> Result<FlowState> {
    let data = harness::generate_data(grid, &DataSpec { seed, s_d: 4.0, shape: DataShape::Random }, Some(profile), 1.0)?;
    let xi = data.xi(Some(profile));
    FlowState::new(data.r.clone(), data.a.clone(), xi, ThirdField::Xi, 0.0, 1.0)
}

fn functional_relation() -> Result<Verdict> {
    let et = 0.0605;
    let settings = |r| -> Result<ShearSettings> { Ok(ShearSettings { tol: 1e-10, params: WeightParams::new(et, 1.0)?, s: 1.0, reconstruction: r }) };
    let grid = FrequencyGrid::new(1, 8.0, 16)?;
    let p = gaussian(&grid, 0.05)?;
    let times = log_times(1.0, 100.0, 30);
    let run = shear::evolve_full(&shear_state(grid, &p, 5)?, &p, &times, &settings(Reconstruction::Primary)?)?;
    let res = run.omega_residual_primary.iter().copied().fold(0.0, f64::max);

    let big = FrequencyGrid::new(1, 16.0, 64)?;
    let pb = gaussian(&big, 0.05)?;
    let tb = log_times(1.0, 20.0, 8);
    let rb = shear::evolve_full(&shear_state(big, &pb, 6)?, &pb, &tb, &settings(Reconstruction::Both)?)?;
    let agree = rb.route_agreement.iter().copied().fold(0.0, f64::max);

    let n = grid.n_points();
    let f: Vec<C64> = grid.etas().iter().map(|e| C64::new((-e * e / 6.0).exp(), 0.2 * e * (-e * e / 10.0).exp())).collect();
    let mut order = f64::INFINITY;
    for &(k, t) in &[(1i64, 3.0), (1, 0.7)] {
        let g_at = |s: f64| -> Result<Vec<C64>> {
            let pair = operators::phi_b_step(s, k, &p, &operators::PhiPair::identity(n), 1e-13)?;
            operators::g_apply(s, k, &p, &pair.phi_tilde, &f)
        };
        let pair = operators::phi_b_step(t, k, &p, &operators::PhiPair::identity(n), 1e-13)?;
        let exact = operators::dtg_apply(t, k, &p, &pair.phi_tilde, &f)?;
        let err = |h: f64| -> Result<f64> {
            let (a, b) = (g_at(t + h)?, g_at(t - h)?);
            let d: Vec<C64> = a.iter().zip(&b).zip(&exact).map(|((x, y), e)| (x - y) / (2.0 * h) - e).collect();
            Ok(operators::vec_norm(&d))
        };
        let (e1, e2, e3) = (err(0.2)?, err(0.1)?, err(0.05)?);
        order = order.min((e1 / e2).log2()).min((e2 / e3).log2());
    }
    verdict(
        res <= 1e-6 && agree <= 1e-4 && order >= 1.9,
        format!("primary residual {res:.2e} on [0,100]; route agreement {agree:.2e} on n_eta=64; dtG order {order:.3}"),
    )
}

fn couette_consistency() -> Result<Verdict> {
    let grid = FrequencyGrid::new(2, 8.0, 16)?;
    let p = ProfileSpectrum::couette(&grid);
    let data = harness::generate_data(grid, &DataSpec { seed: 9, s_d: 2.0, shape: DataShape::Random }, Some(&p), 1.0)?;
    let xi = data.xi(Some(&p));
    let st = FlowState::new(data.r.clone(), data.a.clone(), xi, ThirdField::Xi, 0.0, 1.0)?;
    let settings = ShearSettings { tol: 1e-12, params: WeightParams::new(0.0, 1.0)?, s: 0.0, reconstruction: Reconstruction::None };
    let full = shear::evolve_full(&st, &p, &[100.0], &settings)?;
    let reference = harness::couette_field(&data, &[100.0], 1e-12)?;
    let mut worst = 0.0f64;
    for tr in &reference.trajectories {
        let j = grid.eta_index(tr.eta).expect("lattice point");
        let (r, a) = couette::denormalize(100.0, tr.k, tr.eta, 1.0, &tr.samples[0].z);
        let scale = (r.norm_sqr() + a.norm_sqr()).sqrt().max(1e-300);
        let dr = full.states[0].r.get(tr.k, j) - r;
        let da = full.states[0].a.get(tr.k, j) - a;
        worst = worst.max((dr.norm_sqr() + da.norm_sqr()).sqrt() / scale);
    }
    verdict(worst <= 1e-8, format!("max per-mode relative difference at t=100: {worst:.2e}"))
}

fn zero_mode() -> Result<Verdict> {
    let cfg = RunConfig {
        scenario: Scenario::Zeromode,
        k_max: 2,
        eta_max: 8.0,
        n_eta: 32,
        t_start: 0.1,
        t_end: 100.0,
        n_times: 50,
        profile: "gaussian".into(),
        eps: 0.05,
        ..RunConfig::default()
    };
    let o = harness::run(&cfg, &out_dir())?;
    let drift = o.summary["wave_energy_drift"].as_f64().unwrap_or(f64::NAN);

    let grid = cfg.grid()?;
    let pc = ProfileSpectrum::couette(&grid);
    let s0 = zeromode::standing_wave(&grid, 2.0, 0.5, 0.0)?;
    let mut sw = 0.0f64;
    for t in [0.3, 7.0, 55.5, 100.0] {
        let a = &zeromode::evolve_zero(&s0, &pc, &[t])?[0];
        let b = zeromode::standing_wave(&grid, 2.0, 0.5, t)?;
        for j in 0..grid.n_points() {
            sw = sw.max((a.rho_bar[j] - b.rho_bar[j]).norm()).max((a.alpha_bar[j] - b.alpha_bar[j]).norm()).max((a.omega_bar[j] - b.omega_bar[j]).norm());
        }
    }

    // Split evolution (k = 0 closed form, k ≠ 0 per mode) against one direct solve.
    let tol = 1e-10;
    let spec = DataSpec { seed: 4, s_d: 2.0, shape: DataShape::Random };
    let mut data = harness::generate_data(grid, &spec, Some(&pc), 1.0)?;
    let z0 = harness::zero_mode_data(&grid, &spec, 1.0)?;
    data.r.row_mut(0).copy_from_slice(&z0.rho_bar);
    data.a.row_mut(0).copy_from_slice(&z0.alpha_bar);
    data.w.row_mut(0).copy_from_slice(&z0.omega_bar);
    let times = [10.0, 50.0];
    let direct = zeromode::couette_direct(&data, &times, tol)?;
    let zero = zeromode::evolve_zero(&z0, &pc, &times)?;
    let rest = harness::couette_field(&data, &times, tol)?;
    let mut dec = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let mut split = FlowState::zeros(grid, ThirdField::Omega, 1.0);
        split.r.row_mut(0).copy_from_slice(&zero[i].rho_bar);
        split.a.row_mut(0).copy_from_slice(&zero[i].alpha_bar);
        split.w.row_mut(0).copy_from_slice(&zero[i].omega_bar);
        for tr in &rest.trajectories {
            let j = grid.eta_index(tr.eta).expect("lattice point");
            let (r, a) = couette::denormalize(t, tr.k, tr.eta, 1.0, &tr.samples[i].z);
            split.r.set(tr.k, j, r);
            split.a.set(tr.k, j, a);
            split.w.set(tr.k, j, tr.xi_in - r);
        }
        for (x, y) in [(&split.r, &direct[i].r), (&split.a, &direct[i].a), (&split.w, &direct[i].w)] {
            dec = dec.max(rel_diff(x, y));
        }
    }
    verdict(
        drift <= 1e-10 && sw <= 1e-10 && dec <= 1e3 * tol,
        format!("wave energy drift {drift:.1e}, standing wave {sw:.1e}, split vs direct {dec:.1e} (tol {tol:.0e})"),
    )
}

fn weight_audits() -> Result<Verdict> {
    let cfg = RunConfig { scenario: Scenario::WeightsAudit, ..RunConfig::default() };
    let o = harness::run(&cfg, &out_dir())?;
    let a = &o.summary["audit"];
    let entries = a["entries"].as_array().map(|v| v.len()).unwrap_or(0);
    let unstable: Vec<String> = a["entries"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|e| !(e["finite"].as_bool().unwrap_or(false) && e["stable"].as_bool().unwrap_or(false)))
        .map(|e| e["name"].as_str().unwrap_or("?").to_string())
        .collect();
    let ex = &a["exact"];
    verdict(
        o.passed,
        format!(
            "{entries} sampled inequalities, unstable {:?}; exact bounds over {} samples: h {} / p' {} / m {} / z {} violations",
            unstable, ex["samples"], ex["h_bound_violations"], ex["trivp_violations"], ex["m_range_violations"], ex["z_range_violations"]
        ),
    )
}

fn toy() -> Result<Verdict> {
    let cfg = RunConfig {
        scenario: Scenario::Toy,
        k_max: 1,
        eta_max: 8.0,
        n_eta: 16,
        profile: "gaussian".into(),
        eps: 0.05,
        t_end: 50.0,
        n_times: 40,
        fit_window: (5.0, 50.0),
        ..RunConfig::default()
    };
    let o = harness::run(&cfg, &out_dir())?;
    let inc = o.summary["max_step_increase"].as_f64().unwrap_or(f64::NAN);
    let toy = o.summary["comparison"]["toy_exponent"].as_f64().unwrap_or(f64::NAN);
    let opt = o.summary["comparison"]["optimal_exponent"].as_f64().unwrap_or(f64::NAN);
    verdict(inc <= 1e-8 && opt < toy, format!("max step increase {inc:.2e}; acoustic exponent toy {} vs optimal {}", fmt_exp(toy), fmt_exp(opt)))
}

fn main() {
    let mut failed = Vec::new();
    let mut emit = |name: &str, r: Result<Verdict>| {
        let (pass, detail) = match r {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        let _ = std::io::stdout().flush();
        if !pass {
            failed.push(name.to_string());
        }
    };

    let fits = couette_fits();
    match &fits {
        Ok(f) => {
            emit("couette acoustic growth", couette_acoustic(f));
            emit("couette inviscid damping, M-dominant", couette_damping(f));
        }
        Err(e) => {
            emit("couette acoustic growth", verdict(false, format!("error: {e}")));
            emit("couette inviscid damping, M-dominant", verdict(false, format!("error: {e}")));
        }
    }
    emit("couette inviscid damping, Xi-dominant", xi_dominant());
    emit("key lemma boundedness", key_lemma());
    emit("lower-bound construction", lower_bound());
    emit("operator algebra", operator_algebra());
    emit("building block 1", block1());
    emit("building block 2", block2());

    let shear_runs: Result<Vec<(f64, harness::RunOutcome)>> =
        [0.01, 0.05].into_iter().map(|eps| Ok((eps, harness::run(&shear_cfg(eps), &out_dir())?))).collect();
    match &shear_runs {
        Ok(runs) => {
            emit("near-Couette energy estimate", near_couette_energy(runs));
            emit("near-Couette rates", near_couette_rates(runs));
        }
        Err(e) => {
            emit("near-Couette energy estimate", verdict(false, format!("error: {e}")));
            emit("near-Couette rates", verdict(false, format!("error: {e}")));
        }
    }
    emit("functional relation", functional_relation());
    emit("couette-limit consistency", couette_consistency());
    emit("zero mode", zero_mode());
    emit("weight audits", weight_audits());
    emit("toy model", toy());

    let _ = std::fs::remove_dir_all(out_dir());
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: {} failing: {}", failed.len(), failed.join(", "));
        std::process::exit(1);
    }
}
