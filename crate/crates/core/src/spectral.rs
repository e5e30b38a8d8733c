//! Frequency grids, spectral fields and the norms built on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::ProfileSpectrum;

pub type C64 = Complex64;

/// Uniform η lattice `η_j = (j − n_eta/2)·Δη`, `j = 0..=n_eta`, so both `±eta_max` and 0 are samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub k_max: usize,
    pub eta_max: f64,
    pub n_eta: usize,
}

impl FrequencyGrid {
    pub fn new(k_max: usize, eta_max: f64, n_eta: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Domain("k_max must be positive".into()));
        }
        if !(eta_max > 0.0 && eta_max.is_finite()) {
            return Err(Error::Domain(format!("eta_max must be positive, got {eta_max}")));
        }
        if n_eta == 0 || n_eta % 2 != 0 {
            return Err(Error::Domain(format!("n_eta must be even and positive, got {n_eta}")));
        }
        Ok(Self { k_max, eta_max, n_eta })
    }

    /// Grid with a prescribed spacing: `eta_max = d_eta·n_eta/2`.
    pub fn with_spacing(k_max: usize, d_eta: f64, n_eta: usize) -> Result<Self> {
        Self::new(k_max, d_eta * n_eta as f64 / 2.0, n_eta)
    }

    pub fn d_eta(&self) -> f64 {
        2.0 * self.eta_max / self.n_eta as f64
    }

    pub fn box_length(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.d_eta()
    }

    /// Number of η samples per k row.
    pub fn n_points(&self) -> usize {
        self.n_eta + 1
    }

    pub fn n_rows(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn eta(&self, j: usize) -> f64 {
        (j as f64 - (self.n_eta / 2) as f64) * self.d_eta()
    }

    pub fn etas(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| self.eta(j)).collect()
    }

    /// Index of the sample closest to `eta`, if it lies on the lattice within `1e-9·Δη`.
    pub fn eta_index(&self, eta: f64) -> Option<usize> {
        let x = eta / self.d_eta() + (self.n_eta / 2) as f64;
        let j = x.round();
        if (x - j).abs() > 1e-9 || j < 0.0 || j > self.n_eta as f64 {
            None
        } else {
            Some(j as usize)
        }
    }

    /// Mirror index: `η_{mirror(j)} = −η_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.n_eta - j
    }

    pub fn ks(&self) -> impl Iterator<Item = i64> {
        let km = self.k_max as i64;
        -km..=km
    }

    pub fn nonzero_ks(&self) -> impl Iterator<Item = i64> {
        self.ks().filter(|&k| k != 0)
    }

    pub fn row(&self, k: i64) -> usize {
        (k + self.k_max as i64) as usize
    }

    /// Same lattice with twice the samples at fixed spacing.
    pub fn widened(&self) -> Self {
        Self { k_max: self.k_max, eta_max: 2.0 * self.eta_max, n_eta: 2 * self.n_eta }
    }

    /// Same η range with half the spacing.
    pub fn refined(&self) -> Self {
        Self { k_max: self.k_max, eta_max: self.eta_max, n_eta: 2 * self.n_eta }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: FrequencyGrid,
    values: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.n_rows() * grid.n_points()] }
    }

    pub fn from_fn(grid: FrequencyGrid, mut f: impl FnMut(i64, f64) -> C64) -> Self {
        let mut out = Self::zeros(grid);
        for k in grid.ks() {
            for j in 0..grid.n_points() {
                let v = f(k, grid.eta(j));
                out.set(k, j, v);
            }
        }
        out
    }

    pub fn get(&self, k: i64, j: usize) -> C64 {
        self.values[self.grid.row(k) * self.grid.n_points() + j]
    }

    pub fn set(&mut self, k: i64, j: usize, v: C64) {
        let n = self.grid.n_points();
        self.values[self.grid.row(k) * n + j] = v;
    }

    pub fn row(&self, k: i64) -> &[C64] {
        let n = self.grid.n_points();
        let r = self.grid.row(k);
        &self.values[r * n..(r + 1) * n]
    }

    pub fn row_mut(&mut self, k: i64) -> &mut [C64] {
        let n = self.grid.n_points();
        let r = self.grid.row(k);
        &mut self.values[r * n..(r + 1) * n]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn has_zero_mode(&self) -> bool {
        self.row(0).iter().any(|z| z.norm_sqr() > 0.0)
    }

    /// Overwrite `k < 0` rows with the conjugate mirror of `k > 0` rows; the `k = 0` row is
    /// symmetrized in place.
    pub fn conjugate_symmetrize(&mut self) {
        let g = self.grid;
        for k in 1..=g.k_max as i64 {
            for j in 0..g.n_points() {
                let v = self.get(k, j).conj();
                self.set(-k, g.mirror(j), v);
            }
        }
        for j in 0..=g.n_eta / 2 {
            let m = g.mirror(j);
            let v = 0.5 * (self.get(0, j) + self.get(0, m).conj());
            self.set(0, j, v);
            self.set(0, m, v.conj());
        }
    }

    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let g = self.grid;
        let mut d: f64 = 0.0;
        for k in g.ks() {
            for j in 0..g.n_points() {
                d = d.max((self.get(k, j) - self.get(-k, g.mirror(j)).conj()).norm());
            }
        }
        d
    }

    pub fn map(&self, mut f: impl FnMut(i64, f64, C64) -> C64) -> Self {
        let g = self.grid;
        let mut out = Self::zeros(g);
        for k in g.ks() {
            for j in 0..g.n_points() {
                out.set(k, j, f(k, g.eta(j), self.get(k, j)));
            }
        }
        out
    }

    pub fn axpy(&mut self, a: C64, other: &SpectralField) {
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|z| z * a).collect() }
    }

    /// Plain quadrature L² norm `sqrt(Σ_k Δη Σ_η |f|²)`.
    pub fn l2(&self) -> f64 {
        (self.grid.d_eta() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Embed into a wider grid with the same spacing, padding with zeros.
    pub fn embed(&self, target: FrequencyGrid) -> Result<Self> {
        let g = self.grid;
        if (target.d_eta() - g.d_eta()).abs() > 1e-12 * g.d_eta() || target.n_eta < g.n_eta || target.k_max < g.k_max
        {
            return Err(Error::GridMismatch("embedding requires same spacing and a larger grid".into()));
        }
        let off = (target.n_eta - g.n_eta) / 2;
        let mut out = Self::zeros(target);
        for k in g.ks() {
            for j in 0..g.n_points() {
                out.set(k, j + off, self.get(k, j));
            }
        }
        Ok(out)
    }

    pub fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThirdField {
    Omega,
    Xi,
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub r: SpectralField,
    pub a: SpectralField,
    pub w: SpectralField,
    pub third: ThirdField,
    pub t: f64,
    pub mach: f64,
}

impl FlowState {
    pub fn new(r: SpectralField, a: SpectralField, w: SpectralField, third: ThirdField, t: f64, mach: f64) -> Result<Self> {
        r.check_same_grid(&a)?;
        r.check_same_grid(&w)?;
        if !(mach > 0.0) {
            return Err(Error::Domain(format!("Mach number must be positive, got {mach}")));
        }
        Ok(Self { r, a, w, third, t, mach })
    }

    pub fn zeros(grid: FrequencyGrid, third: ThirdField, mach: f64) -> Self {
        let z = SpectralField::zeros(grid);
        Self { r: z.clone(), a: z.clone(), w: z, third, t: 0.0, mach }
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.r.grid
    }

    /// Vorticity in the moving frame, reconstructing `Ω = Ξ − gR` when needed.
    pub fn omega(&self, profile: Option<&ProfileSpectrum>) -> SpectralField {
        match self.third {
            ThirdField::Omega => self.w.clone(),
            ThirdField::Xi => {
                let mut out = self.w.clone();
                out.axpy(C64::new(-1.0, 0.0), &self.r);
                if let Some(p) = profile {
                    for k in self.grid().ks() {
                        let gr = p.conv_gm1(self.r.row(k));
                        for (o, x) in out.row_mut(k).iter_mut().zip(gr) {
                            *o -= x;
                        }
                    }
                }
                out
            }
        }
    }

    /// Ξ from the state, `Ξ = Ω + gR` when W holds Ω.
    pub fn xi(&self, profile: Option<&ProfileSpectrum>) -> SpectralField {
        match self.third {
            ThirdField::Xi => self.w.clone(),
            ThirdField::Omega => {
                let mut out = self.w.clone();
                out.axpy(C64::new(1.0, 0.0), &self.r);
                if let Some(p) = profile {
                    for k in self.grid().ks() {
                        let gr = p.conv_gm1(self.r.row(k));
                        for (o, x) in out.row_mut(k).iter_mut().zip(gr) {
                            *o += x;
                        }
                    }
                }
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SobolevSpec {
    Mixed { s1: f64, s2: f64 },
    Isotropic(f64),
}

impl SobolevSpec {
    pub fn l2() -> Self {
        SobolevSpec::Mixed { s1: 0.0, s2: 0.0 }
    }

    /// Squared multiplier: `⟨k⟩^{2s1}⟨η⟩^{2s2}` or `⟨k,η⟩^{2s}`.
    pub fn weight_sq(&self, k: f64, eta: f64) -> f64 {
        match *self {
            SobolevSpec::Mixed { s1, s2 } => (1.0 + k * k).powf(s1) * (1.0 + eta * eta).powf(s2),
            SobolevSpec::Isotropic(s) => (1.0 + k * k + eta * eta).powf(s),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            SobolevSpec::Mixed { s1, s2 } => format!("H^{s1}_x H^{s2}_y"),
            SobolevSpec::Isotropic(s) => format!("H^{s} (isotropic)"),
        }
    }
}

pub fn japanese(a: f64) -> f64 {
    (1.0 + a * a).sqrt()
}

pub fn sobolev_norm(f: &SpectralField, spec: SobolevSpec) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::InvalidField("non-finite amplitude".into()));
    }
    let g = f.grid;
    let mut acc = 0.0;
    for k in g.ks() {
        for (j, z) in f.row(k).iter().enumerate() {
            acc += spec.weight_sq(k as f64, g.eta(j)) * z.norm_sqr();
        }
    }
    Ok((g.d_eta() * acc).sqrt())
}

/// Velocity pair `(v1, v2)` in Fourier variables.
#[derive(Clone, Debug)]
pub struct VelocityPair {
    pub v1: SpectralField,
    pub v2: SpectralField,
}

/// Irrotational part from α and solenoidal part from ω, with `∂ ↦ i·frequency`.
pub fn helmholtz_split(alpha: &SpectralField, omega: &SpectralField) -> Result<(VelocityPair, VelocityPair)> {
    alpha.check_same_grid(omega)?;
    if alpha.has_zero_mode() {
        return Err(Error::ZeroModeViolation("alpha"));
    }
    if omega.has_zero_mode() {
        return Err(Error::ZeroModeViolation("omega"));
    }
    let i = C64::i();
    let inv = |k: i64, eta: f64| {
        if k == 0 {
            0.0
        } else {
            1.0 / ((k * k) as f64 + eta * eta)
        }
    };
    let q1 = alpha.map(|k, eta, a| -i * k as f64 * a * inv(k, eta));
    let q2 = alpha.map(|k, eta, a| -i * eta * a * inv(k, eta));
    let p1 = omega.map(|k, eta, w| -i * eta * w * inv(k, eta));
    let p2 = omega.map(|k, eta, w| i * k as f64 * w * inv(k, eta));
    Ok((VelocityPair { v1: q1, v2: q2 }, VelocityPair { v1: p1, v2: p2 }))
}

pub fn divergence(v: &VelocityPair) -> SpectralField {
    let i = C64::i();
    let mut out = v.v1.map(|k, _, x| i * k as f64 * x);
    out.axpy(C64::new(1.0, 0.0), &v.v2.map(|_, eta, x| i * eta * x));
    out
}

pub fn curl(v: &VelocityPair) -> SpectralField {
    let i = C64::i();
    let mut out = v.v2.map(|k, _, x| i * k as f64 * x);
    out.axpy(C64::new(-1.0, 0.0), &v.v1.map(|_, eta, x| i * eta * x));
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MovingFrameNorms {
    pub q_energy: f64,
    pub rho_norm: f64,
    pub p1_norm: f64,
    pub p2_norm: f64,
}

pub fn symbol_p(t: f64, k: f64, eta: f64) -> f64 {
    let x = eta - k * t;
    k * k + x * x
}

pub fn moving_frame_norms(state: &FlowState, profile: Option<&ProfileSpectrum>) -> Result<MovingFrameNorms> {
    let g = state.grid();
    for (name, f) in [("R", &state.r), ("A", &state.a), ("W", &state.w)] {
        if f.has_zero_mode() {
            return Err(Error::ZeroModeViolation(name));
        }
    }
    let omega = state.omega(profile);
    let t = state.t;
    let (mut q, mut rho, mut p1, mut p2) = (0.0, 0.0, 0.0, 0.0);
    for k in g.nonzero_ks() {
        let kf = k as f64;
        for j in 0..g.n_points() {
            let eta = g.eta(j);
            let p = symbol_p(t, kf, eta);
            let x = eta - kf * t;
            let w2 = omega.get(k, j).norm_sqr();
            q += state.a.get(k, j).norm_sqr() / p;
            rho += state.r.get(k, j).norm_sqr();
            p1 += x * x * w2 / (p * p);
            p2 += kf * kf * w2 / (p * p);
        }
    }
    let d = g.d_eta();
    Ok(MovingFrameNorms {
        q_energy: d * q,
        rho_norm: (d * rho).sqrt(),
        p1_norm: (d * p1).sqrt(),
        p2_norm: (d * p2).sqrt(),
    })
}
