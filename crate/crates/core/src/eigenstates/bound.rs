//! Bound states from energy-level equations (scan + Brent refinement).

use std::sync::Arc;

use num_complex::Complex64;

use super::wave::{Basis, Extension, PiecewiseWave, Region};
use super::{Eigenstate, Family};
use crate::error::Result;
use crate::numerics::roots::{find_root, scan_roots};
use crate::numerics::taylor::{propagate, FundamentalPair, LinearCoefficient};
pub(crate) use crate::potentials::RAMP_START;
use crate::potentials::Ramp;
use crate::spectra::layer;

/// Scan density of level equations (points per unit energy).
pub const SCAN_DENSITY: f64 = 2000.0;
const ROOT_TOL: f64 = 1e-14;

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Roots of `f` strictly inside (lo, hi).
pub(crate) fn level_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let pad = 1e-12 * (hi - lo).abs().max(1.0);
    scan_roots(&f, lo + pad, hi - pad, SCAN_DENSITY)
        .iter()
        .map(|b| find_root(&f, b, ROOT_TOL))
        .collect()
}

/// Level equation for −V₀ < ε < −V₁ with the tan k₁ pole cleared.
pub fn dw_level1(v0: f64, v1: f64, energy: f64) -> f64 {
    let k = (-2.0 * energy).sqrt();
    let k1 = (2.0 * (energy + v0)).sqrt();
    let k2 = (-2.0 * (energy + v1)).sqrt();
    let (s1, c1) = k1.sin_cos();
    2.0 * k * k1 * k2 * c1
        + k2 * (k * k - k1 * k1) * s1
        + (k1 * (k * k + k2 * k2) * c1 + k * (k2 * k2 - k1 * k1) * s1) * k2.tanh()
}

/// Level equation for −V₁ < ε < 0 with the tan k₃, tan k₄ poles cleared.
pub fn dw_level2(v0: f64, v1: f64, energy: f64) -> f64 {
    let k = (-2.0 * energy).sqrt();
    let k3 = (2.0 * (energy + v0)).sqrt();
    let k4 = (2.0 * (energy + v1)).sqrt();
    let (s3, c3) = k3.sin_cos();
    let (s4, c4) = k4.sin_cos();
    2.0 * k * k3 * k4 * c3 * c4
        + k4 * (k * k - k3 * k3) * s3 * c4
        + (k3 * (k * k - k4 * k4) * c3 - k * (k3 * k3 + k4 * k4) * s3) * s4
}

fn normalized(mut wave: PiecewiseWave, family: Family, energy: f64) -> Eigenstate {
    let norm = wave.norm_sqr(f64::NEG_INFINITY, f64::INFINITY).sqrt();
    wave.scale(re(1.0 / norm));
    Eigenstate { family, energy, kappa: None, wave, norm_const: 1.0 / norm }
}

fn dw_state1(v0: f64, v1: f64, energy: f64) -> Result<Eigenstate> {
    let k = (-2.0 * energy).sqrt();
    let k1 = (2.0 * (energy + v0)).sqrt();
    let k2 = (-2.0 * (energy + v1)).sqrt();
    let (s1, c1) = k1.sin_cos();
    let b = ((k * k2 - k1 * k1) * s1 + k1 * (k + k2) * c1) / (2.0 * k1 * k2);
    let c = ((k1 * k1 + k * k2) * s1 + k1 * (k2 - k) * c1) / (2.0 * k1 * k2);
    let d = k2.sinh() * (k * c1 - k1 * s1) / k2 + k2.cosh() * (k * s1 + k1 * c1) / k1;
    let zero = re(0.0);
    let wave = PiecewiseWave::new(
        vec![
            Region { x_lo: f64::NEG_INFINITY, x_hi: 0.0, origin: 0.0, basis: Basis::Hyperbolic { k }, coeffs: [re(1.0), zero] },
            Region { x_lo: 0.0, x_hi: 1.0, origin: 0.0, basis: Basis::Trig { k: k1 }, coeffs: [re(1.0), re(k / k1)] },
            Region { x_lo: 1.0, x_hi: 2.0, origin: 1.0, basis: Basis::Hyperbolic { k: k2 }, coeffs: [re(b), re(c)] },
            Region { x_lo: 2.0, x_hi: f64::INFINITY, origin: 2.0, basis: Basis::Hyperbolic { k }, coeffs: [zero, re(d)] },
        ],
        Extension::Zero,
    )?;
    Ok(normalized(wave, Family::DwBound1, energy))
}

fn dw_state2(v0: f64, v1: f64, energy: f64) -> Result<Eigenstate> {
    let k = (-2.0 * energy).sqrt();
    let k3 = (2.0 * (energy + v0)).sqrt();
    let k4 = (2.0 * (energy + v1)).sqrt();
    let (s3, c3) = k3.sin_cos();
    let (s4, c4) = k4.sin_cos();
    let b = (k * s3 + k3 * c3) / k3;
    let c = (k * c3 - k3 * s3) / k4;
    let d = (k * s3 + k3 * c3) * c4 / k3 + s4 * (k * c3 - k3 * s3) / k4;
    let zero = re(0.0);
    let wave = PiecewiseWave::new(
        vec![
            Region { x_lo: f64::NEG_INFINITY, x_hi: 0.0, origin: 0.0, basis: Basis::Hyperbolic { k }, coeffs: [re(1.0), zero] },
            Region { x_lo: 0.0, x_hi: 1.0, origin: 0.0, basis: Basis::Trig { k: k3 }, coeffs: [re(1.0), re(k / k3)] },
            Region { x_lo: 1.0, x_hi: 2.0, origin: 1.0, basis: Basis::Trig { k: k4 }, coeffs: [re(b), re(c)] },
            Region { x_lo: 2.0, x_hi: f64::INFINITY, origin: 2.0, basis: Basis::Hyperbolic { k }, coeffs: [zero, re(d)] },
        ],
        Extension::Zero,
    )?;
    Ok(normalized(wave, Family::DwBound2, energy))
}

pub fn double_well(v0: f64, v1: f64) -> Result<Vec<Eigenstate>> {
    let mut out = Vec::new();
    for e in level_roots(|e| dw_level1(v0, v1, e), -v0, -v1)? {
        out.push(dw_state1(v0, v1, e)?);
    }
    for e in level_roots(|e| dw_level2(v0, v1, e), -v1, 0.0)? {
        out.push(dw_state2(v0, v1, e)?);
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// k·sin β + β·cos β, the cleared form of k = −β·cot β.
pub fn open_box_level(v0: f64, energy: f64) -> f64 {
    let k = (-2.0 * energy).sqrt();
    let beta = (2.0 * (energy + v0)).sqrt();
    k * beta.sin() + beta * beta.cos()
}


/// c(x) = 2(ε − V(x)) on the ramp.
pub(crate) fn ramp_coefficient(v0: f64, energy: f64) -> LinearCoefficient {
    LinearCoefficient { c0: 2.0 * energy + 6.0 * v0, slope: -6.0 * v0, d_param: 2.0 }
}

/// (ψ, ψ′) at x = 1 for ψ = sin βx on (0, 2/3) continued through the ramp.
pub(crate) fn ramp_exit(v0: f64, energy: f64) -> (f64, f64) {
    let beta = (2.0 * (energy + v0)).sqrt();
    let (s, c) = (beta * RAMP_START).sin_cos();
    let coeff = ramp_coefficient(v0, energy);
    let (st, _) = propagate(&coeff, RAMP_START, [1.0, 0.0, 0.0, 1.0], 1.0, false);
    (s * st[0] + beta * c * st[2], s * st[1] + beta * c * st[3])
}

fn ramp_level(v0: f64, energy: f64) -> f64 {
    let k = (-2.0 * energy).sqrt();
    let (p, q) = ramp_exit(v0, energy);
    q + k * p
}

pub fn open_box(v0: f64, ramp: Ramp) -> Result<Vec<Eigenstate>> {
    let zero = re(0.0);
    let energies = match ramp {
        Ramp::None => level_roots(|e| open_box_level(v0, e), -v0, 0.0)?,
        Ramp::Linear => level_roots(|e| ramp_level(v0, e), -v0, 0.0)?,
    };
    let mut out = Vec::new();
    for energy in energies {
        let k = (-2.0 * energy).sqrt();
        let beta = (2.0 * (energy + v0)).sqrt();
        let wave = match ramp {
            Ramp::None => PiecewiseWave::new(
                vec![
                    Region { x_lo: 0.0, x_hi: 1.0, origin: 0.0, basis: Basis::Trig { k: beta }, coeffs: [zero, re(1.0)] },
                    Region {
                        x_lo: 1.0,
                        x_hi: f64::INFINITY,
                        origin: 1.0,
                        basis: Basis::Hyperbolic { k },
                        coeffs: [zero, re(beta.sin())],
                    },
                ],
                Extension::Zero,
            )?,
            Ramp::Linear => {
                let pair = Arc::new(FundamentalPair::new(
                    Arc::new(ramp_coefficient(v0, energy)),
                    RAMP_START,
                    RAMP_START,
                    1.0,
                ));
                let (s, c) = (beta * RAMP_START).sin_cos();
                let (p, _) = ramp_exit(v0, energy);
                PiecewiseWave::new(
                    vec![
                        Region { x_lo: 0.0, x_hi: RAMP_START, origin: 0.0, basis: Basis::Trig { k: beta }, coeffs: [zero, re(1.0)] },
                        Region {
                            x_lo: RAMP_START,
                            x_hi: 1.0,
                            origin: RAMP_START,
                            basis: Basis::Numerical(pair),
                            coeffs: [re(s), re(beta * c)],
                        },
                        Region { x_lo: 1.0, x_hi: f64::INFINITY, origin: 1.0, basis: Basis::Hyperbolic { k }, coeffs: [zero, re(p)] },
                    ],
                    Extension::Zero,
                )?
            }
        };
        out.push(normalized(wave, Family::OpenboxBound, energy));
    }
    Ok(out)
}

/// Level function of a hard-walled box with two constant pieces:
/// ψ(τ) = 0, ψ′(τ) = 1 propagated to the right wall.
pub fn hard_box_level(tau: f64, sigma: f64, split: f64, v_left: f64, v_right: f64, energy: f64) -> f64 {
    let (c0, s0, _, _) = layer(2.0 * (energy - v_left), split - tau);
    let (c1, s1, _, _) = layer(2.0 * (energy - v_right), tau + sigma - split);
    c1 * s0 + s1 * c0
}

/// The lowest `count` eigenstates of the two-piece hard box.
pub fn hard_box(tau: f64, sigma: f64, split: f64, v_left: f64, v_right: f64, count: usize) -> Result<Vec<Eigenstate>> {
    let f = |e: f64| hard_box_level(tau, sigma, split, v_left, v_right, e);
    let floor = v_left.min(v_right);
    let mut energies = Vec::new();
    let mut lo = floor;
    while energies.len() < count {
        let hi = lo + 10.0;
        energies.extend(level_roots(f, lo, hi)?);
        lo = hi - 1e-9;
        if lo > floor + 1e7 {
            break;
        }
    }
    energies.truncate(count);
    let mut out = Vec::new();
    for (n, energy) in energies.into_iter().enumerate() {
        let cl = 2.0 * (energy - v_left);
        let cr = 2.0 * (energy - v_right);
        let (c0, s0, _, _) = layer(cl, split - tau);
        let wave = PiecewiseWave::new(
            vec![
                Region::constant(tau, split, tau, cl, re(0.0), re(1.0)),
                Region::constant(split, tau + sigma, split, cr, re(s0), re(c0)),
            ],
            Extension::Zero,
        )?;
        let mut state = normalized(wave, Family::BoxMode(n as u32 + 1), energy);
        // make the first lobe positive
        if state.wave.eval(tau + 1e-6 * sigma).re < 0.0 {
            state.wave.scale(re(-1.0));
        }
        out.push(state);
    }
    Ok(out)
}
