//! Run configuration, initial data, whole-field Couette runs and the scenario drivers that write
//! CSV and JSON artifacts.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blocks::{self, BlockKind, BlockSettings};
use crate::couette::{self, ModeState, StepControl, Trajectory};
use crate::error::{Error, Result};
use crate::operators::fit_t2_constant;
use crate::profile::{ProfileShape, ProfileSpectrum};
use crate::rates::{self, fit_rate, log_times, RateTargets};
use crate::shear::{self, Reconstruction, ShearSettings, TERM_NAMES};
use crate::spectral::{moving_frame_norms, FlowState, FrequencyGrid, MovingFrameNorms, SpectralField, ThirdField, C64};
use crate::weights::{audit_weight_inequalities, SampleSpec, WeightParams};
use crate::zeromode::{self, ZeroModeState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Couette,
    Shear,
    Block1,
    Block2,
    Toy,
    Zeromode,
    WeightsAudit,
    Sweep,
}

impl Scenario {
    pub const ALL: [Scenario; 8] =
        [Scenario::Couette, Scenario::Shear, Scenario::Block1, Scenario::Block2, Scenario::Toy, Scenario::Zeromode, Scenario::WeightsAudit, Scenario::Sweep];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Couette => "couette",
            Scenario::Shear => "shear",
            Scenario::Block1 => "block1",
            Scenario::Block2 => "block2",
            Scenario::Toy => "toy",
            Scenario::Zeromode => "zeromode",
            Scenario::WeightsAudit => "weights-audit",
            Scenario::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}' (expected one of {})", Scenario::ALL.map(|x| x.name()).join(", "))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataShape {
    /// Independent random `ρ, α, ω`.
    Random,
    /// Random `ρ, α` with `ω = −gρ`, so `Ξ_in = 0`.
    XiZero,
    /// `ρ = α = 0`, random `ω`.
    OmegaOnly,
}

impl FromStr for DataShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(DataShape::Random),
            "xi0" | "xi-zero" => Ok(DataShape::XiZero),
            "omega-only" => Ok(DataShape::OmegaOnly),
            _ => Err(Error::Config(format!("unknown data shape '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub seed: u64,
    pub s_d: f64,
    pub shape: DataShape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub k_max: usize,
    pub eta_max: f64,
    pub n_eta: usize,
    pub mach: f64,
    /// `couette`, `gaussian` or `cosine`.
    pub profile: String,
    pub eps: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub profile_s: f64,
    pub data: DataSpec,
    pub t_start: f64,
    pub t_end: f64,
    pub n_times: usize,
    pub fit_window: (f64, f64),
    pub tol: f64,
    pub sobolev_s: f64,
    pub big_n: f64,
    pub c_exp: Option<f64>,
    pub eps_tilde: Option<f64>,
    pub reconstruction: Reconstruction,
    pub sweep_eps: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Couette,
            k_max: 8,
            eta_max: 16.0 * PI,
            n_eta: 256,
            mach: 1.0,
            profile: "couette".into(),
            eps: 0.0,
            sigma: 1.0,
            kappa: 1.0,
            profile_s: 1.0,
            data: DataSpec { seed: 1, s_d: 4.0, shape: DataShape::Random },
            t_start: 1.0,
            t_end: 500.0,
            n_times: 100,
            fit_window: (20.0, 500.0),
            tol: 1e-8,
            sobolev_s: 1.0,
            big_n: 32.0,
            c_exp: None,
            eps_tilde: None,
            reconstruction: Reconstruction::None,
            sweep_eps: vec![0.01, 0.05],
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("bad value '{v}' for '{key}'")))
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut window_set = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", ln + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "scenario" => c.scenario = v.parse()?,
                "k_max" => c.k_max = parse_num(k, v)?,
                "eta_max" => c.eta_max = parse_num(k, v)?,
                "n_eta" => c.n_eta = parse_num(k, v)?,
                "mach" => c.mach = parse_num(k, v)?,
                "profile" => {
                    if !["couette", "gaussian", "cosine"].contains(&v) {
                        return Err(Error::Config(format!("unknown profile '{v}'")));
                    }
                    c.profile = v.into()
                }
                "eps" => c.eps = parse_num(k, v)?,
                "sigma" => c.sigma = parse_num(k, v)?,
                "kappa" => c.kappa = parse_num(k, v)?,
                "profile_s" => c.profile_s = parse_num(k, v)?,
                "seed" => c.data.seed = parse_num(k, v)?,
                "s_d" => c.data.s_d = parse_num(k, v)?,
                "data" => c.data.shape = v.parse()?,
                "t_start" => c.t_start = parse_num(k, v)?,
                "t_end" => c.t_end = parse_num(k, v)?,
                "n_times" => c.n_times = parse_num(k, v)?,
                "fit_t0" => {
                    c.fit_window.0 = parse_num(k, v)?;
                    window_set = true
                }
                "fit_t1" => {
                    c.fit_window.1 = parse_num(k, v)?;
                    window_set = true
                }
                "tol" => c.tol = parse_num(k, v)?,
                "s" => c.sobolev_s = parse_num(k, v)?,
                "big_n" => c.big_n = parse_num(k, v)?,
                "c" => c.c_exp = Some(parse_num(k, v)?),
                "eps_tilde" => c.eps_tilde = Some(parse_num(k, v)?),
                "reconstruction" => {
                    c.reconstruction = match v {
                        "none" => Reconstruction::None,
                        "primary" => Reconstruction::Primary,
                        "both" => Reconstruction::Both,
                        _ => return Err(Error::Config(format!("unknown reconstruction '{v}'"))),
                    }
                }
                "sweep_eps" => c.sweep_eps = v.split(',').map(|x| parse_num(k, x.trim())).collect::<Result<_>>()?,
                _ => return Err(Error::Config(format!("unknown key '{k}'"))),
            }
        }
        if !window_set {
            c.fit_window = (20.0f64.min(c.t_end / 10.0), c.t_end);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > self.t_start && self.t_start > 0.0) {
            return Err(Error::Config("need 0 < t_start < t_end".into()));
        }
        if self.n_times < 2 {
            return Err(Error::Config("n_times must be at least 2".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        self.grid()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.k_max, self.eta_max, self.n_eta)
    }

    pub fn profile_spectrum(&self, grid: &FrequencyGrid) -> Result<ProfileSpectrum> {
        let shape = match self.profile.as_str() {
            "couette" => return Ok(ProfileSpectrum::couette(grid)),
            "gaussian" => ProfileShape::Gaussian { sigma: self.sigma },
            "cosine" => ProfileShape::Cosine { kappa: self.kappa },
            p => return Err(Error::Config(format!("unknown profile '{p}'"))),
        };
        ProfileSpectrum::with_eps(grid, shape, self.eps, self.profile_s)
    }

    pub fn times(&self) -> Vec<f64> {
        log_times(self.t_start, self.t_end, self.n_times)
    }
}

/// `ε̃ = 2Cε` from the fitted contraction constant, unless overridden.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsTilde {
    pub eps_measured: f64,
    pub fitted_c: f64,
    pub eps_tilde: f64,
    pub clamped: bool,
}

pub const EPS_TILDE_CAP: f64 = 0.0625 * 0.99;

pub fn eps_tilde_for(profile: &ProfileSpectrum, k_max: usize, over: Option<f64>) -> Result<EpsTilde> {
    let ks: Vec<i64> = (1..=k_max as i64).collect();
    let c = fit_t2_constant(profile, &ks, &[0.0, 1.0, 2.0, 5.0, 10.0, 50.0])?;
    let raw = over.unwrap_or(2.0 * c * profile.eps_measured);
    let clamped = raw > EPS_TILDE_CAP;
    Ok(EpsTilde { eps_measured: profile.eps_measured, fitted_c: c, eps_tilde: raw.min(EPS_TILDE_CAP), clamped })
}

/// Complex Gaussian data scaled by `⟨k,η⟩^{−s_d}`, conjugate-symmetrized, with k = 0 zeroed.
/// `W` holds Ω.
pub fn generate_data(grid: FrequencyGrid, spec: &DataSpec, profile: Option<&ProfileSpectrum>, mach: f64) -> Result<FlowState> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut draw = |on: bool| -> SpectralField {
        let mut f = SpectralField::from_fn(grid, |k, eta| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if !on || k == 0 {
                return C64::new(0.0, 0.0);
            }
            C64::new(re, im) * (1.0 + (k * k) as f64 + eta * eta).powf(-spec.s_d / 2.0)
        });
        f.conjugate_symmetrize();
        f
    };
    let rv = spec.shape != DataShape::OmegaOnly;
    let rho = draw(rv);
    let alpha = draw(rv);
    let mut omega = draw(true);
    if spec.shape == DataShape::XiZero {
        omega = rho.scaled(-1.0);
        if let Some(p) = profile {
            for k in grid.ks() {
                let gr = p.conv_gm1(rho.row(k));
                for (o, x) in omega.row_mut(k).iter_mut().zip(gr) {
                    *o -= x;
                }
            }
        }
    }
    FlowState::new(rho, alpha, omega, ThirdField::Omega, 0.0, mach)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("SHEARSPEC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

#[derive(Clone, Debug)]
pub struct CouetteFieldRun {
    pub times: Vec<f64>,
    pub norms: Vec<MovingFrameNorms>,
    pub gamma_norm: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    /// `max_t ‖(R+Ω)(t) − (R+Ω)(0)‖`.
    pub conservation_defect: f64,
}

/// Evolves every nonzero-k mode of a Couette state (`W` holding Ω) to `times`.
pub fn couette_field(state: &FlowState, times: &[f64], tol: f64) -> Result<CouetteFieldRun> {
    if state.third != ThirdField::Omega {
        return Err(Error::Domain("couette_field expects W flagged as Omega".into()));
    }
    let g = state.grid();
    let modes: Vec<(i64, usize)> = g.nonzero_ks().flat_map(|k| (0..g.n_points()).map(move |j| (k, j))).collect();
    let trajectories: Vec<Trajectory> = thread_pool()?.install(|| {
        modes
            .par_iter()
            .map(|&(k, j)| {
                let m = ModeState::from_rho_alpha_omega(k, g.eta(j), state.mach, state.r.get(k, j), state.a.get(k, j), state.w.get(k, j))?;
                couette::evolve_mode_at(&m, times, StepControl::new(tol))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut norms = Vec::with_capacity(times.len());
    let mut gamma_norm = Vec::with_capacity(times.len());
    let mut defect = 0.0f64;
    let d = g.d_eta();
    for (i, &t) in times.iter().enumerate() {
        let mut st = FlowState::zeros(g, ThirdField::Omega, state.mach);
        st.t = t;
        let mut gam = 0.0;
        for (tr, &(k, j)) in trajectories.iter().zip(&modes) {
            let s = &tr.samples[i];
            let (r, a) = couette::denormalize(t, k, tr.eta, state.mach, &s.z);
            st.r.set(k, j, r);
            st.a.set(k, j, a);
            st.w.set(k, j, tr.xi_in - r);
            gam += d * (s.gamma[0].norm_sqr() + s.gamma[1].norm_sqr()) / (1.0 + tr.eta * tr.eta).sqrt();
            let c0 = state.r.get(k, j) + state.w.get(k, j);
            defect = defect.max((r + (tr.xi_in - r) - c0).norm());
        }
        norms.push(moving_frame_norms(&st, None)?);
        gamma_norm.push(gam.sqrt());
    }
    Ok(CouetteFieldRun { times: times.to_vec(), norms, gamma_norm, trajectories, conservation_defect: defect })
}

/// 17-significant-digit CSV with a header row.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub passed: bool,
    pub csv: PathBuf,
    pub json: PathBuf,
    pub summary: Value,
}

fn fit_or_null(series: &[(f64, f64)], window: (f64, f64)) -> Value {
    match fit_rate(series, window) {
        Ok(f) => serde_json::to_value(f).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn norm_series(times: &[f64], norms: &[MovingFrameNorms], mach: f64) -> [Vec<(f64, f64)>; 3] {
    let m2 = 1.0 / (mach * mach);
    [
        times.iter().zip(norms).map(|(t, n)| (*t, n.q_energy + m2 * n.rho_norm * n.rho_norm)).collect(),
        times.iter().zip(norms).map(|(t, n)| (*t, n.p1_norm)).collect(),
        times.iter().zip(norms).map(|(t, n)| (*t, n.p2_norm)).collect(),
    ]
}

fn weight_params(cfg: &RunConfig, et: f64) -> Result<WeightParams> {
    WeightParams::with(et, cfg.big_n, cfg.c_exp.unwrap_or(0.25 - et), cfg.mach)
}

/// Runs `cfg.scenario`, writing `<scenario>.csv` and `<scenario>.json` into `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let grid = cfg.grid()?;
    let name = cfg.scenario.name();
    let csv = out.join(format!("{name}.csv"));
    let json_path = out.join(format!("{name}.json"));
    let times = cfg.times();
    let mut summary = json!({ "config": cfg });
    let passed = match cfg.scenario {
        Scenario::Couette => {
            let data = generate_data(grid, &cfg.data, None, cfg.mach)?;
            let run = couette_field(&data, &times, cfg.tol)?;
            let header: Vec<String> = ["t", "q_energy", "rho_norm", "p1_norm", "p2_norm", "gamma_norm"].map(String::from).to_vec();
            let rows: Vec<Vec<f64>> =
                run.times.iter().zip(&run.norms).zip(&run.gamma_norm).map(|((t, n), g)| vec![*t, n.q_energy, n.rho_norm, n.p1_norm, n.p2_norm, *g]).collect();
            write_csv(&csv, &header, &rows)?;
            let [ac, p1, p2] = norm_series(&run.times, &run.norms, cfg.mach);
            let (ratio, excluded) = couette::lower_bound_ratio(&run.trajectories)?;
            let inf = ratio.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let slope = fit_or_null(&ratio, cfg.fit_window);
            let all_finite = run.norms.iter().all(|n| n.q_energy.is_finite() && n.p1_norm.is_finite() && n.p2_norm.is_finite());
            let ok = inf > 0.0 && all_finite && run.conservation_defect <= 1e-10 * (1.0 + data.r.l2() + data.w.l2());
            summary["fits"] = json!({ "acoustic_energy": fit_or_null(&ac, cfg.fit_window), "p1_norm": fit_or_null(&p1, cfg.fit_window), "p2_norm": fit_or_null(&p2, cfg.fit_window) });
            summary["lower_bound"] = json!({ "inf_ratio": inf, "slope": slope, "excluded_modes": excluded.len() });
            summary["conservation_defect"] = json!(run.conservation_defect);
            ok
        }
        Scenario::Shear => {
            let profile = cfg.profile_spectrum(&grid)?;
            let et = eps_tilde_for(&profile, cfg.k_max, cfg.eps_tilde)?;
            let params = weight_params(cfg, et.eps_tilde)?;
            let data = generate_data(grid, &cfg.data, Some(&profile), cfg.mach)?;
            let xi = data.xi(Some(&profile));
            let st = FlowState::new(data.r.clone(), data.a.clone(), xi, ThirdField::Xi, 0.0, cfg.mach)?;
            let settings = ShearSettings { tol: cfg.tol, params, s: cfg.sobolev_s, reconstruction: cfg.reconstruction };
            let run = shear::evolve_full(&st, &profile, &times, &settings)?;
            let mut header = vec!["t".to_string(), "E_s".to_string()];
            header.extend(TERM_NAMES.iter().map(|s| s.to_string()));
            header.extend(["q_energy", "rho_norm", "p1_norm", "p2_norm", "xi_drift"].map(String::from));
            let rows: Vec<Vec<f64>> = (0..run.times.len())
                .map(|i| {
                    let r = &run.reports[i];
                    let n = &run.norms[i];
                    let mut row = vec![run.times[i], r.e_s];
                    row.extend(TERM_NAMES.iter().map(|k| r.terms[*k]));
                    row.extend([n.q_energy, n.rho_norm, n.p1_norm, n.p2_norm, run.xi_drift[i]]);
                    row
                })
                .collect();
            write_csv(&csv, &header, &rows)?;
            let targets = RateTargets { acoustic_max: 1.0 + et.eps_tilde + 0.05, p1_max: -0.5 + 0.1, p2_max: -1.5 + 0.1 };
            let rates = rates::theorem_checks(&run.times, &run.norms, cfg.mach, cfg.fit_window, targets);
            let res_max = run.omega_residual_primary.iter().copied().fold(0.0, f64::max);
            let monotone = run.max_step_increase <= 1e-8;
            let coercive = run.min_coercivity >= 0.1;
            let recon_ok = cfg.reconstruction == Reconstruction::None || res_max <= 1e-6;
            summary["eps_tilde"] = serde_json::to_value(et)?;
            summary["max_step_increase"] = json!(run.max_step_increase);
            summary["min_coercivity"] = json!(run.min_coercivity);
            summary["omega_residual_primary_max"] = json!(res_max);
            summary["omega_residual_secondary_max"] = json!(run.omega_residual_secondary.iter().copied().fold(0.0, f64::max));
            summary["route_agreement_max"] = json!(run.route_agreement.iter().copied().fold(0.0, f64::max));
            summary["rates"] = match &rates {
                Ok(r) => serde_json::to_value(r)?,
                Err(e) => json!({ "error": e.to_string() }),
            };
            summary["invariants"] = json!({ "energy_monotone": monotone, "coercivity": coercive, "reconstruction": recon_ok });
            monotone && coercive && recon_ok
        }
        Scenario::Block1 | Scenario::Block2 | Scenario::Toy => {
            let profile = cfg.profile_spectrum(&grid)?;
            let et = eps_tilde_for(&profile, cfg.k_max, cfg.eps_tilde)?;
            let data = generate_data(grid, &cfg.data, Some(&profile), cfg.mach)?;
            let mut settings = BlockSettings::new(cfg.sobolev_s, et.eps_tilde);
            settings.big_n = cfg.big_n;
            settings.tol = cfg.tol;
            let mut bt = vec![0.0];
            bt.extend(&times);
            let run = match cfg.scenario {
                Scenario::Block1 => blocks::block1_evolve(&data.r, &profile, &bt, &settings)?,
                Scenario::Block2 => blocks::block2_evolve(&data.r, &profile, &bt, &settings, BlockKind::Block2)?,
                _ => blocks::toy_evolve(&data.r, &data.a, &profile, &bt, &settings)?,
            };
            let names: Vec<String> = run.monitors.keys().cloned().collect();
            let mut header = vec!["t".to_string()];
            header.extend(names.iter().cloned());
            let rows: Vec<Vec<f64>> = (0..run.times.len())
                .map(|i| {
                    let mut row = vec![run.times[i]];
                    row.extend(names.iter().map(|n| run.monitors[n][i]));
                    row
                })
                .collect();
            write_csv(&csv, &header, &rows)?;
            let sup: BTreeMap<&String, f64> =
                run.monitors.iter().map(|(n, v)| (n, v.iter().copied().fold(0.0, f64::max) / v[0].max(f64::MIN_POSITIVE))).collect();
            summary["eps_tilde"] = serde_json::to_value(et)?;
            summary["monotone_monitor"] = json!(run.monotone_monitor);
            summary["max_step_increase"] = json!(run.max_step_increase);
            summary["sup_over_initial"] = json!(sup);
            summary["accepted_steps"] = json!(run.accepted_steps);
            if cfg.scenario == Scenario::Toy {
                let c = cfg.c_exp.unwrap_or(0.25 - et.eps_tilde);
                summary["comparison"] = serde_json::to_value(blocks::toy_comparison(&grid, et.eps_tilde, c, cfg.fit_window)?)?;
            }
            run.max_step_increase <= 1e-8
        }
        Scenario::Zeromode => {
            let profile = cfg.profile_spectrum(&grid)?;
            let z0 = zero_mode_data(&grid, &cfg.data, cfg.mach)?;
            let mut zt = vec![0.0];
            zt.extend(&times);
            let traj = zeromode::evolve_zero(&z0, &profile, &zt)?;
            let d = grid.d_eta();
            let e0 = zeromode::wave_energy(&z0, d);
            let l2 = |v: &[C64]| (d * v.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt();
            let rows: Vec<Vec<f64>> = traj.iter().map(|z| vec![z.t, zeromode::wave_energy(z, d), l2(&z.rho_bar), l2(&z.alpha_bar), l2(&z.omega_bar)]).collect();
            write_csv(&csv, &["t", "wave_energy", "rho_l2", "alpha_l2", "omega_l2"].map(String::from), &rows)?;
            let drift = rows.iter().map(|r| (r[1] - e0).abs() / e0.max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
            summary["wave_energy_drift"] = json!(drift);
            drift <= 1e-10
        }
        Scenario::WeightsAudit => {
            let et = cfg.eps_tilde.unwrap_or(0.05);
            let params = weight_params(cfg, et)?;
            let sample = SampleSpec { t_max: cfg.t_end, n_t: cfg.n_times, k_max: cfg.k_max, eta_max: cfg.eta_max, n_eta: cfg.n_eta.min(128) };
            let rep = audit_weight_inequalities(&sample, &params)?;
            let rows: Vec<Vec<f64>> = rep.entries.iter().enumerate().map(|(i, e)| vec![i as f64, e.fitted_constant, e.fitted_constant_doubled]).collect();
            write_csv(&csv, &["index", "fitted_constant", "fitted_constant_doubled"].map(String::from), &rows)?;
            summary["audit"] = serde_json::to_value(&rep)?;
            rep.passed()
        }
        Scenario::Sweep => {
            let mut rows = Vec::new();
            let mut all = true;
            let mut entries = Vec::new();
            let fine = grid.refined();
            for &eps in &cfg.sweep_eps {
                let shape = ProfileShape::Gaussian { sigma: cfg.sigma };
                let p = ProfileSpectrum::with_eps(&grid, shape, eps, cfg.profile_s)?;
                let pf = ProfileSpectrum::with_eps(&fine, shape, eps, cfg.profile_s)?;
                let c = eps_tilde_for(&p, cfg.k_max, None)?.fitted_c;
                let cf = eps_tilde_for(&pf, cfg.k_max, None)?.fitted_c;
                let stable = ((cf - c) / c).abs() <= 0.2;
                all &= stable;
                rows.push(vec![eps, p.eps_measured, c, cf]);
                entries.push(json!({ "eps": eps, "c": c, "c_refined": cf, "stable": stable }));
            }
            write_csv(&csv, &["eps", "eps_measured", "fitted_c", "fitted_c_refined"].map(String::from), &rows)?;
            summary["sweep"] = json!(entries);
            all
        }
    };
    summary["passed"] = json!(passed);
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)?)?;
    Ok(RunOutcome { passed, csv, json: json_path, summary })
}

/// Random zero-mode data with `ᾱ̂(0) = 0` and real fields in y.
pub fn zero_mode_data(grid: &FrequencyGrid, spec: &DataSpec, mach: f64) -> Result<ZeroModeState> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed);
    let n = grid.n_points();
    let mut field = |zero_mean: bool| -> Vec<C64> {
        let mut v: Vec<C64> = (0..n)
            .map(|j| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im) * (1.0 + grid.eta(j).powi(2)).powf(-spec.s_d / 2.0)
            })
            .collect();
        for j in 0..n {
            let m = grid.mirror(j);
            if m > j {
                v[m] = v[j].conj();
            } else if m == j {
                v[j] = if zero_mean { C64::new(0.0, 0.0) } else { C64::new(v[j].re, 0.0) };
            }
        }
        v
    };
    let rho = field(false);
    let alpha = field(true);
    let omega = field(false);
    ZeroModeState::new(rho, alpha, omega, mach)
}
