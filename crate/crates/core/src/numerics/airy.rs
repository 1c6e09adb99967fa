//! Fundamental pair of w'' + (c₀ + s·x)·w = 0 in the oscillatory regime,
//! from the modulus–phase form of the Airy functions.
//!
//! With t = c(x)/|s|^{2/3} the equation becomes y_tt + t·y = 0, solved by
//! M(t)·cos θ(t) and M(t)·sin θ(t) where P = M² obeys P‴ + 4tP′ + 2P = 0 and
//! θ′ = −1/(πP). For t ≥ `MIN_ARGUMENT` eight terms of the asymptotic series
//! of P reach machine precision, so the cost no longer grows with energy.

use std::f64::consts::PI;

use super::taylor::PairState;

const TERMS: usize = 8;
pub(crate) const MIN_ARGUMENT: f64 = 25.0;

/// a_k of π·P = t^{−1/2}·Σ a_k t^{−3k}, and c_k of 1/Σ a_k u^k.
fn series() -> ([f64; TERMS], [f64; TERMS]) {
    let mut a = [0.0; TERMS];
    a[0] = 1.0;
    for k in 1..TERMS {
        let s = -0.5 - 3.0 * (k - 1) as f64;
        a[k] = a[k - 1] * s * (s - 1.0) * (s - 2.0) / (12.0 * k as f64);
    }
    let mut c = [0.0; TERMS];
    c[0] = 1.0;
    for k in 1..TERMS {
        c[k] = -(1..=k).map(|j| a[j] * c[k - j]).sum::<f64>();
    }
    (a, c)
}

/// (M, dM/dt, dθ/dt) at t.
fn modulus(a: &[f64; TERMS], c: &[f64; TERMS], t: f64) -> (f64, f64, f64) {
    let u = t.powi(-3);
    let (mut p, mut dp, mut r) = (0.0, 0.0, 0.0);
    let mut uk = 1.0;
    for k in 0..TERMS {
        let s = -0.5 - 3.0 * k as f64;
        p += a[k] * uk;
        dp += a[k] * s * uk;
        r += c[k] * uk;
        uk *= u;
    }
    let p = p / (PI * t.sqrt());
    let dp = dp / (PI * t.sqrt() * t);
    let m = p.sqrt();
    (m, 0.5 * dp / m, -t.sqrt() * r)
}

/// θ(t) − θ(t₀), given Δt = t − t₀, without cancellation between the
/// large leading terms.
fn phase_change(c: &[f64; TERMS], t0: f64, t: f64, dt: f64) -> f64 {
    let (r0, r) = (t0.sqrt(), t.sqrt());
    let lead = dt * (t + r * r0 + t0) / (r + r0);
    let mut out = -(2.0 / 3.0) * lead;
    for (k, ck) in c.iter().enumerate().skip(1) {
        let p = 1.5 - 3.0 * k as f64;
        out -= ck * (t.powf(p) - t0.powf(p)) / p;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct AiryPair {
    c0: f64,
    slope: f64,
    origin: f64,
    a: [f64; TERMS],
    c: [f64; TERMS],
}

impl AiryPair {
    /// Available when c(x) stays above `MIN_ARGUMENT`·|s|^{2/3} on [lo, hi].
    pub(crate) fn new(c0: f64, slope: f64, origin: f64, lo: f64, hi: f64) -> Option<Self> {
        if slope == 0.0 || !slope.is_finite() {
            return None;
        }
        let scale = slope.abs().powf(2.0 / 3.0);
        let least = (c0 + slope * lo).min(c0 + slope * hi);
        if !(least / scale >= MIN_ARGUMENT) {
            return None;
        }
        let (a, c) = series();
        Some(AiryPair { c0, slope, origin, a, c })
    }

    /// (u, u', v, v') at x for u(origin) = 1, u' = 0, v = 0, v' = 1.
    pub(crate) fn eval(&self, x: f64) -> PairState {
        let scale = self.slope.abs().powf(2.0 / 3.0);
        let tx = self.slope / scale;
        let t0 = (self.c0 + self.slope * self.origin) / scale;
        let dt = tx * (x - self.origin);
        let t = t0 + dt;
        let (m0, dm0, dth0) = modulus(&self.a, &self.c, t0);
        let (m, dm, dth) = modulus(&self.a, &self.c, t);
        let (s, co) = phase_change(&self.c, t0, t, dt).sin_cos();
        // y₁ = M cos(θ − θ₀), y₂ = M sin(θ − θ₀) and their x-derivatives
        let y1 = m * co;
        let y2 = m * s;
        let d1 = tx * (dm * co - m * dth * s);
        let d2 = tx * (dm * s + m * dth * co);
        // inverse of the value/derivative matrix at the origin
        let (b11, b21, b22) = (m0, tx * dm0, tx * m0 * dth0);
        let det = b11 * b22;
        let (i11, i21, i22) = (b22 / det, -b21 / det, b11 / det);
        [y1 * i11 + y2 * i21, d1 * i11 + d2 * i21, y2 * i22, d2 * i22]
    }
}
