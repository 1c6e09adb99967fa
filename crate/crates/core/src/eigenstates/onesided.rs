//! The δ-comb with a hard wall on its left: ψ = A_n·e^{ikx} + B_n·e^{−ikx}
//! on ((n−1)a, na), with region 0 on (−b, 0).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::wave::{Basis, Extension, PiecewiseWave, Region};
use super::{Eigenstate, Family};
use crate::error::{Error, Result};
use crate::spectra::one_sided_spectrum;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedCombState {
    pub state: Eigenstate,
    /// (A_n, B_n) for n = 0..=n_max.
    pub coefficients: Vec<[Complex64; 2]>,
}

/// One step of the matching conditions across the delta at x = na.
pub fn recurrence_step(a: f64, gamma: f64, k: f64, n: usize, coeffs: [Complex64; 2]) -> [Complex64; 2] {
    let c = I * gamma / k;
    let wn = Complex64::from_polar(1.0, 2.0 * a * k * n as f64);
    let [an, bn] = coeffs;
    [(1.0 - c) * an - c * bn / wn, c * wn * an + (1.0 + c) * bn]
}

/// Closed-form (A_n, B_n) from (A₀, B₀).
pub fn general_term(a: f64, gamma: f64, k: f64, n: usize, a0: Complex64, b0: Complex64) -> [Complex64; 2] {
    let c = I * gamma / k;
    let w = Complex64::from_polar(1.0, 2.0 * a * k);
    let v = (1.0 - c) * w + c + 1.0;
    let root = (v * v - 4.0 * w).sqrt();
    let l1 = (v + root) / (2.0 * w);
    let l2 = (v - root) / (2.0 * w);
    let p1 = l1.powi(n as i32);
    let p2 = l2.powi(n as i32);
    let dl = l1 - l2;
    let wn = Complex64::from_polar(1.0, 2.0 * a * k * n as f64);
    let an = ((1.0 - c - l2) * p1 + (c + l1 - 1.0) * p2) / dl * a0 - c * (p1 - p2) / dl * b0;
    let bn = wn * (c * (p1 - p2) / (w * dl) * a0 + ((c + l1 - 1.0) * p1 + (1.0 - c - l2) * p2) / dl * b0);
    [an, bn]
}

/// Normalization constant A₀ giving one-sided average density 1/π.
pub fn a0(a: f64, gamma: f64, b: f64, k: f64) -> f64 {
    let alpha = (gamma / k).atan();
    let num = (a * k).sin() * (a * k - 2.0 * alpha).sin() / (a * k - alpha).sin();
    let den = 2.0 * PI * ((k * (a - 2.0 * b)).cos() * alpha.sin() + (a * k - alpha).sin());
    (num / den).sqrt()
}

pub fn one_sided_comb_state(a: f64, gamma: f64, b: f64, k: f64, n_max: usize) -> Result<OneSidedCombState> {
    let energy = 0.5 * k * k;
    if !one_sided_spectrum(a, gamma, energy) {
        return Err(Error::InGap { energy });
    }
    let norm = a0(a, gamma, b, k);
    if !norm.is_finite() || norm <= 0.0 {
        return Err(Error::AtBandEdge { energy });
    }
    let amp0 = Complex64::new(norm, 0.0);
    let bmp0 = -Complex64::from_polar(1.0, -2.0 * k * b) * amp0;
    let mut coefficients = Vec::with_capacity(n_max + 1);
    let mut iterated = [amp0, bmp0];
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        let closed = general_term(a, gamma, k, n, amp0, bmp0);
        let scale = norm.max(closed[0].norm()).max(closed[1].norm());
        worst = worst.max(((closed[0] - iterated[0]).norm() + (closed[1] - iterated[1]).norm()) / scale);
        coefficients.push(closed);
        iterated = recurrence_step(a, gamma, k, n, iterated);
    }
    if !(worst <= AGREEMENT) {
        return Err(Error::NonConvergence { estimate: energy, error: worst });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut regions = vec![Region { x_lo: f64::NEG_INFINITY, x_hi: -b, origin: 0.0, basis: Basis::Trig { k }, coeffs: [zero; 2] }];
    for (n, coeffs) in coefficients.iter().enumerate() {
        let (lo, hi) = if n == 0 { (-b, 0.0) } else { ((n - 1) as f64 * a, n as f64 * a) };
        regions.push(Region { x_lo: lo, x_hi: hi, origin: 0.0, basis: Basis::ComplexExp { k }, coeffs: *coeffs });
    }
    let state = Eigenstate {
        family: Family::OnesidedComb,
        energy,
        kappa: None,
        wave: PiecewiseWave::new(regions, Extension::Undefined)?,
        norm_const: norm,
    };
    Ok(OneSidedCombState { state, coefficients })
}
