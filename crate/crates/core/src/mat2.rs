//! Real 2×2 matrices and the closed-form exponentials of traceless ones.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::spectral::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

pub type CVec2 = [C64; 2];

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = &self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn inverse(&self) -> Mat2 {
        let m = &self.0;
        let d = self.det();
        Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    pub fn apply(&self, v: &CVec2) -> CVec2 {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn apply_real(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `e^M` for traceless `M`, using `M² = −det(M)·I`.
    pub fn exp_traceless(&self) -> Mat2 {
        let (c, s, _) = cosh_family(-self.det());
        Mat2::IDENTITY.scale(c) + self.scale(s)
    }

    /// `(e^M, φ₁(M))` with `φ₁(M) = ∫₀¹ e^{sM} ds`, for traceless `M`.
    pub fn exp_phi1_traceless(&self) -> (Mat2, Mat2) {
        let (c, s, d) = cosh_family(-self.det());
        (Mat2::IDENTITY.scale(c) + self.scale(s), Mat2::IDENTITY.scale(s) + self.scale(d))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }
}

pub fn cadd(a: &CVec2, b: &CVec2) -> CVec2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn cscale_real(v: [f64; 2], z: C64) -> CVec2 {
    [z * v[0], z * v[1]]
}

pub fn cnorm(v: &CVec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// For `x = λ²` (any sign) returns `(cosh λ, sinh λ/λ, (cosh λ − 1)/λ²)`.
pub fn cosh_family(x: f64) -> (f64, f64, f64) {
    if x.abs() < 1.0 {
        let (mut c, mut s, mut d) = (0.0, 0.0, 0.0);
        let mut term = 1.0; // x^n/(2n)!
        for n in 0..20 {
            let n2 = 2.0 * n as f64;
            c += term;
            s += term / (n2 + 1.0);
            d += term / ((n2 + 1.0) * (n2 + 2.0));
            term *= x / ((n2 + 1.0) * (n2 + 2.0));
        }
        (c, s, d)
    } else if x > 0.0 {
        let l = x.sqrt();
        let c = l.cosh();
        (c, l.sinh() / l, (c - 1.0) / x)
    } else {
        let l = (-x).sqrt();
        let c = l.cos();
        (c, l.sin() / l, (c - 1.0) / x)
    }
}

/// Symmetric-interval moments of `cosh(μσ)` over `σ ∈ [−H, H]`, parametrized by `μ²`.
#[derive(Clone, Copy, Debug)]
pub struct CoshMoments {
    /// `∫ cosh(μσ) dσ`
    pub j0c: f64,
    /// `∫ σ sinh(μσ)/μ dσ`
    pub j1s: f64,
    /// `∫ σ² cosh(μσ) dσ`
    pub j2c: f64,
    /// `∫ σ² · 2(cosh(μσ) − 1)/μ² dσ`
    pub j2d: f64,
}

pub fn cosh_moments(mu2: f64, half: f64) -> CoshMoments {
    let h = half;
    let y2 = mu2 * h * h;
    let (s, r, q) = if y2.abs() < 4.0 {
        let (mut s, mut r, mut q) = (0.0, 0.0, 0.0);
        // f = y2^n / (2n+3)!
        let mut f = 1.0 / 6.0;
        let mut pow = 1.0;
        for n in 0..30 {
            let nf = n as f64;
            // 1/(2n+1)! = (2n+2)(2n+3)/(2n+3)!
            s += pow * (2.0 * nf + 2.0) * (2.0 * nf + 3.0) * f;
            r += pow * (2.0 * nf + 2.0) * f;
            // q term index n+1 uses y2^n (2n+4)(2n+3)/(2n+5)!
            let f_next = f / ((2.0 * nf + 4.0) * (2.0 * nf + 5.0));
            q += pow * (2.0 * nf + 4.0) * (2.0 * nf + 3.0) * f_next;
            f = f_next;
            pow *= y2;
        }
        (s, r, q)
    } else {
        let (c, s, _) = cosh_family(y2);
        let r = (c - s) / y2;
        (s, r, (s - 1.0 / 3.0 - 2.0 * r) / y2)
    };
    let h3 = h * h * h;
    CoshMoments { j0c: 2.0 * h * s, j1s: 2.0 * h3 * r, j2c: 2.0 * h3 * (s - 2.0 * r), j2d: 4.0 * h3 * h * h * q }
}
