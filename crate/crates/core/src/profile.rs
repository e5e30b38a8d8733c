//! Fourier data of a near-Couette shear: `g = U'∘U⁻¹` and `b = U''∘U⁻¹ = g·g'`.
//!
//! Spectra are normalized so that `f(Y) = Σ_l Δη·f̂_l·e^{iη_l Y}`; multiplication by `f` is then
//! the convolution `(f u)^(η_i) = Σ_j Δη f̂(η_i − η_j) u(η_j)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{FrequencyGrid, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProfileShape {
    Couette,
    /// `g − 1 = a·exp(−Y²/(2σ²))`.
    Gaussian { sigma: f64 },
    /// `g − 1 = a·cos(κY)`, κ a multiple of Δη.
    Cosine { kappa: f64 },
}

#[derive(Clone, Debug)]
pub struct ProfileSpectrum {
    pub d_eta: f64,
    /// Lags run over `l = −n_eta..=n_eta`.
    pub n_eta: usize,
    pub g2m1_hat: Vec<C64>,
    pub b_hat: Vec<C64>,
    pub gm1_hat: Vec<C64>,
    pub eps_measured: f64,
    pub amplitude: f64,
    pub shape: ProfileShape,
    pub sobolev_s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    G2m1,
    B,
    Gm1,
}

impl ProfileSpectrum {
    pub fn couette(grid: &FrequencyGrid) -> Self {
        let n = 2 * grid.n_eta + 1;
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            d_eta: grid.d_eta(),
            n_eta: grid.n_eta,
            g2m1_hat: z.clone(),
            b_hat: z.clone(),
            gm1_hat: z,
            eps_measured: 0.0,
            amplitude: 0.0,
            shape: ProfileShape::Couette,
            sobolev_s: 1.0,
        }
    }

    pub fn with_amplitude(grid: &FrequencyGrid, shape: ProfileShape, amplitude: f64, sobolev_s: f64) -> Result<Self> {
        let d = grid.d_eta();
        let n = grid.n_eta;
        let lag = |l: usize| (l as f64 - n as f64) * d;
        let mut gm1 = vec![C64::new(0.0, 0.0); 2 * n + 1];
        let mut sq = vec![C64::new(0.0, 0.0); 2 * n + 1];
        match shape {
            ProfileShape::Couette => {}
            ProfileShape::Gaussian { sigma } => {
                if !(sigma > 0.0) {
                    return Err(Error::Domain("gaussian profile needs sigma > 0".into()));
                }
                let s2 = sigma / 2f64.sqrt();
                for l in 0..=2 * n {
                    let e = lag(l);
                    gm1[l] = C64::new(amplitude * sigma / (2.0 * PI).sqrt() * (-0.5 * sigma * sigma * e * e).exp(), 0.0);
                    sq[l] = C64::new(amplitude * amplitude * s2 / (2.0 * PI).sqrt() * (-0.5 * s2 * s2 * e * e).exp(), 0.0);
                }
            }
            ProfileShape::Cosine { kappa } => {
                let m = kappa / d;
                if (m - m.round()).abs() > 1e-9 || m.round() < 1.0 {
                    return Err(Error::Domain(format!("cosine profile: kappa = {kappa} is not a positive multiple of d_eta = {d}")));
                }
                let m = m.round() as usize;
                if 2 * m > n {
                    return Err(Error::Domain("cosine profile: 2·kappa exceeds the lag range".into()));
                }
                gm1[n + m] = C64::new(amplitude / (2.0 * d), 0.0);
                gm1[n - m] = gm1[n + m];
                sq[n] = C64::new(amplitude * amplitude / (2.0 * d), 0.0);
                sq[n + 2 * m] = C64::new(amplitude * amplitude / (4.0 * d), 0.0);
                sq[n - 2 * m] = sq[n + 2 * m];
            }
        }
        let i = C64::i();
        let g2m1: Vec<C64> = gm1.iter().zip(&sq).map(|(a, b)| 2.0 * a + b).collect();
        let b: Vec<C64> = (0..=2 * n).map(|l| i * lag(l) * (gm1[l] + 0.5 * sq[l])).collect();
        let mut out = Self {
            d_eta: d,
            n_eta: n,
            g2m1_hat: g2m1,
            b_hat: b,
            gm1_hat: gm1,
            eps_measured: 0.0,
            amplitude,
            shape,
            sobolev_s,
        };
        out.eps_measured = out.hs_norm(Kernel::G2m1, sobolev_s).max(out.hs_norm(Kernel::B, sobolev_s));
        Ok(out)
    }

    /// Profile of the given shape whose measured smallness equals `eps`.
    pub fn with_eps(grid: &FrequencyGrid, shape: ProfileShape, eps: f64, sobolev_s: f64) -> Result<Self> {
        if eps == 0.0 || shape == ProfileShape::Couette {
            let mut c = Self::couette(grid);
            c.sobolev_s = sobolev_s;
            return Ok(c);
        }
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("profile eps must be nonnegative, got {eps}")));
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while Self::with_amplitude(grid, shape, hi, sobolev_s)?.eps_measured < eps {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::Domain("profile amplitude search diverged".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if Self::with_amplitude(grid, shape, mid, sobolev_s)?.eps_measured < eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let out = Self::with_amplitude(grid, shape, 0.5 * (lo + hi), sobolev_s)?;
        if out.eps_measured > eps * (1.0 + 1e-9) {
            return Err(Error::Domain(format!("measured eps {} exceeds configured {eps}", out.eps_measured)));
        }
        Ok(out)
    }

    pub fn is_couette(&self) -> bool {
        self.amplitude == 0.0 || self.shape == ProfileShape::Couette
    }

    pub fn kernel(&self, which: Kernel) -> &[C64] {
        match which {
            Kernel::G2m1 => &self.g2m1_hat,
            Kernel::B => &self.b_hat,
            Kernel::Gm1 => &self.gm1_hat,
        }
    }

    /// `sqrt(2π Σ_l Δη ⟨η_l⟩^{2s} |f̂_l|²)`, the physical-space `H^s` norm.
    pub fn hs_norm(&self, which: Kernel, s: f64) -> f64 {
        let n = self.n_eta as f64;
        let acc: f64 = self
            .kernel(which)
            .iter()
            .enumerate()
            .map(|(l, z)| {
                let e = (l as f64 - n) * self.d_eta;
                (1.0 + e * e).powf(s) * z.norm_sqr()
            })
            .sum();
        (2.0 * PI * self.d_eta * acc).sqrt()
    }

    /// `u ↦ f·u` on one k row.
    pub fn conv(&self, which: Kernel, u: &[C64]) -> Vec<C64> {
        let ker = self.kernel(which);
        let n = u.len();
        debug_assert_eq!(n, self.n_eta + 1);
        let mut out = vec![C64::new(0.0, 0.0); n];
        if self.is_couette() {
            return out;
        }
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, x) in u.iter().enumerate() {
                acc += ker[i + self.n_eta - j] * x;
            }
            *o = acc * self.d_eta;
        }
        out
    }

    pub fn conv_gm1(&self, u: &[C64]) -> Vec<C64> {
        self.conv(Kernel::Gm1, u)
    }

    pub fn conv_matrix(&self, which: Kernel) -> DMatrix<C64> {
        let ker = self.kernel(which);
        let n = self.n_eta + 1;
        DMatrix::from_fn(n, n, |i, j| ker[i + self.n_eta - j] * self.d_eta)
    }

    /// Matrix of multiplication by `g = 1 + (g − 1)`.
    pub fn g_matrix(&self) -> DMatrix<C64> {
        let mut m = self.conv_matrix(Kernel::Gm1);
        for i in 0..m.nrows() {
            m[(i, i)] += C64::new(1.0, 0.0);
        }
        m
    }

    /// Matrix of multiplication by `g² = 1 + (g² − 1)`.
    pub fn g2_matrix(&self) -> DMatrix<C64> {
        let mut m = self.conv_matrix(Kernel::G2m1);
        for i in 0..m.nrows() {
            m[(i, i)] += C64::new(1.0, 0.0);
        }
        m
    }

    /// Physical-space value of `g − 1` at `Y`, for diagnostics.
    pub fn gm1_at(&self, y: f64) -> f64 {
        let n = self.n_eta as f64;
        self.gm1_hat
            .iter()
            .enumerate()
            .map(|(l, z)| (z * C64::from_polar(1.0, (l as f64 - n) * self.d_eta * y)).re * self.d_eta)
            .sum()
    }
}
