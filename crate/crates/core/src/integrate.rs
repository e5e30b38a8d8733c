//! Adaptive Dormand–Prince 5(4) for complex vector ODEs.

use crate::error::{Error, Result};
use crate::spectral::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64) -> Self {
        Self { rtol, atol: rtol * 1e-3, h_init: 1e-3, h_max: 1.0, h_min: 1e-12, max_steps: 5_000_000 }
    }

    pub fn with_atol(mut self, atol: f64) -> Self {
        self.atol = atol;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn comb(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..y.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += *c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrates `y' = f(t, y)` from `t0`, stopping exactly at each of `stops` (ascending).
///
/// `observer(t, y)` is called after every accepted step; the returned vector holds the state
/// at each stop.
pub fn solve<F, O>(mut f: F, t0: f64, y0: &[C64], stops: &[f64], opts: &Dopri5, mut observer: O) -> Result<(Vec<Vec<C64>>, Stats)>
where
    F: FnMut(f64, &[C64], &mut [C64]) -> Result<()>,
    O: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h = opts.h_init.min(opts.h_max);
    let mut stats = Stats::default();
    let mut out = Vec::with_capacity(stops.len());
    let z = || vec![C64::new(0.0, 0.0); n];
    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (z(), z(), z(), z(), z(), z(), z());
    let (mut tmp, mut y5) = (z(), z());
    f(t, &y, &mut k1)?;
    stats.rhs_evals += 1;
    for &stop in stops {
        if stop < t - 1e-14 * t.abs().max(1.0) {
            return Err(Error::Domain(format!("stop time {stop} precedes current time {t}")));
        }
        while t < stop {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::Integration { t, h, reason: "step budget exhausted".into() });
            }
            let last = t + h >= stop;
            let hh = if last { stop - t } else { h };
            comb(&mut tmp, &y, hh, &[(A21, &k1)]);
            f(t + C2 * hh, &tmp, &mut k2)?;
            comb(&mut tmp, &y, hh, &[(A31, &k1), (A32, &k2)]);
            f(t + C3 * hh, &tmp, &mut k3)?;
            comb(&mut tmp, &y, hh, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + C4 * hh, &tmp, &mut k4)?;
            comb(&mut tmp, &y, hh, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(t + C5 * hh, &tmp, &mut k5)?;
            comb(&mut tmp, &y, hh, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            f(t + hh, &tmp, &mut k6)?;
            comb(&mut y5, &y, hh, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            f(t + hh, &y5, &mut k7)?;
            stats.rhs_evals += 6;
            let mut err = 0.0f64;
            for i in 0..n {
                let e = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
                err = err.max(e.norm() / sc);
            }
            if !err.is_finite() {
                return Err(Error::Integration { t, h: hh, reason: "non-finite error estimate".into() });
            }
            if err <= 1.0 {
                t = if last { stop } else { t + hh };
                std::mem::swap(&mut y, &mut y5);
                std::mem::swap(&mut k1, &mut k7);
                stats.accepted += 1;
                observer(t, &y)?;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || hh >= h {
                    h = (hh * fac).min(opts.h_max);
                }
            } else {
                stats.rejected += 1;
                h = hh * (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
                if h < opts.h_min {
                    return Err(Error::Integration { t, h, reason: "step size underflow".into() });
                }
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let y0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let (out, _) = solve(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
                Ok(())
            },
            0.0,
            &y0,
            &[1.0, 10.0],
            &Dopri5::new(1e-11).with_atol(1e-14),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((out[1][0].re - 10f64.cos()).abs() < 1e-9);
        assert!((out[0][1].re + 1f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn complex_rotation() {
        let y0 = [C64::new(1.0, 0.0)];
        let (out, st) = solve(
            |_, y, d| {
                d[0] = C64::new(0.0, 3.0) * y[0];
                Ok(())
            },
            0.0,
            &y0,
            &[2.0],
            &Dopri5::new(1e-10),
            |_, _| Ok(()),
        )
        .unwrap();
        assert!((out[0][0] - C64::from_polar(1.0, 6.0)).norm() < 1e-8);
        assert!(st.accepted > 0);
    }
}
