//! Scattering and continuum states of the double well, step and open box.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use super::bound::{ramp_coefficient, RAMP_START};
use super::wave::{Basis, Extension, PiecewiseWave, Region};
use super::{Eigenstate, Family};
use crate::error::{Error, Result};
use crate::numerics::taylor::FundamentalPair;
use crate::potentials::Ramp;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Which side the unit-flux wave comes in from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incidence {
    Left,
    Right,
}

/// Double-well scattering coefficients [𝒜, ℬ, 𝒞, 𝒟, ℰ, ℱ, 𝒢, ℋ] for
/// e^{±i·k·x} pairs on (−∞,0), (0,1), (1,2), (2,∞), all with origin 0.
pub fn dw_coefficients(v0: f64, v1: f64, kappa: f64, incidence: Incidence) -> Result<[Complex64; 8]> {
    if !(kappa > 0.0) {
        return Err(Error::OutOfSpectrum { energy: 0.5 * kappa * kappa });
    }
    let energy = 0.5 * kappa * kappa;
    let ks = [kappa, (2.0 * (energy + v0)).sqrt(), (2.0 * (energy + v1)).sqrt(), kappa];
    let amp = 1.0 / (2.0 * PI).sqrt();
    // 6 matching equations (ψ, ψ′ at x = 0, 1, 2) in 8 coefficients
    let mut m = SMatrix::<Complex64, 6, 8>::zeros();
    for (iface, x) in [0.0, 1.0, 2.0].into_iter().enumerate() {
        for (side, region) in [(1.0, iface), (-1.0, iface + 1)] {
            let k = ks[region];
            let ep = Complex64::from_polar(1.0, k * x);
            let em = ep.conj();
            m[(2 * iface, 2 * region)] += ep * side;
            m[(2 * iface, 2 * region + 1)] += em * side;
            m[(2 * iface + 1, 2 * region)] += I * k * ep * side;
            m[(2 * iface + 1, 2 * region + 1)] += -I * k * em * side;
        }
    }
    // fixed: incoming amplitude and the absent incoming wave on the far side
    let (fixed, absent) = match incidence {
        Incidence::Left => (0, 7),
        Incidence::Right => (7, 0),
    };
    let free: Vec<usize> = (0..8).filter(|&c| c != fixed && c != absent).collect();
    let mut a = SMatrix::<Complex64, 6, 6>::zeros();
    let mut rhs = SVector::<Complex64, 6>::zeros();
    for r in 0..6 {
        for (j, &c) in free.iter().enumerate() {
            a[(r, j)] = m[(r, c)];
        }
        rhs[r] = -m[(r, fixed)] * amp;
    }
    let sol = a.lu().solve(&rhs).ok_or(Error::NonConvergence { estimate: energy, error: f64::INFINITY })?;
    let mut out = [Complex64::new(0.0, 0.0); 8];
    out[fixed] = re(amp);
    for (j, &c) in free.iter().enumerate() {
        out[c] = sol[j];
    }
    Ok(out)
}

pub fn double_well(v0: f64, v1: f64, kappa: f64, incidence: Incidence) -> Result<Eigenstate> {
    let c = dw_coefficients(v0, v1, kappa, incidence)?;
    let energy = 0.5 * kappa * kappa;
    let ks = [kappa, (2.0 * (energy + v0)).sqrt(), (2.0 * (energy + v1)).sqrt(), kappa];
    let bounds = [f64::NEG_INFINITY, 0.0, 1.0, 2.0, f64::INFINITY];
    let regions = (0..4)
        .map(|r| Region {
            x_lo: bounds[r],
            x_hi: bounds[r + 1],
            origin: 0.0,
            basis: Basis::ComplexExp { k: ks[r] },
            coeffs: [c[2 * r], c[2 * r + 1]],
        })
        .collect();
    let family = match incidence {
        Incidence::Left => Family::DwFreeLeft,
        Incidence::Right => Family::DwFreeRight,
    };
    Ok(Eigenstate {
        family,
        energy,
        kappa: Some(kappa),
        wave: PiecewiseWave::new(regions, Extension::Undefined)?,
        norm_const: 1.0 / (2.0 * PI).sqrt(),
    })
}

/// Step states: ψ⁰ below the barrier (`which` = 0), ψ¹ and ψ² above it.
pub fn step(v0: f64, k: f64, which: u8) -> Result<Eigenstate> {
    let k0 = (2.0 * v0).sqrt();
    let energy = 0.5 * k * k;
    let out_of = Err(Error::OutOfSpectrum { energy });
    let (left, right, family, norm) = match which {
        0 => {
            if !(k > 0.0 && k < k0) {
                return out_of;
            }
            let alpha = (k0 * k0 - k * k).sqrt();
            let d = PI * (alpha * alpha + k * k);
            let c = (2.0 * k * k / d).sqrt();
            let b = (2.0 * alpha * alpha / d).sqrt();
            (
                (Basis::Trig { k }, [re(c), re(-b)]),
                (Basis::Hyperbolic { k: alpha }, [re(0.0), re(c)]),
                Family::StepPsi0,
                c,
            )
        }
        1 | 2 => {
            if !(k > k0) {
                return out_of;
            }
            let beta = (k * k - k0 * k0).sqrt();
            let d = PI * (beta * beta + k * k);
            if which == 1 {
                let f = 1.0 / PI.sqrt();
                ((Basis::Trig { k }, [re(f), re(0.0)]), (Basis::Trig { k: beta }, [re(f), re(0.0)]), Family::StepPsi1, f)
            } else {
                let g = (2.0 * beta * beta / d).sqrt();
                let e = (2.0 * k * k / d).sqrt();
                ((Basis::Trig { k }, [re(0.0), re(g)]), (Basis::Trig { k: beta }, [re(0.0), re(e)]), Family::StepPsi2, g)
            }
        }
        _ => return Err(Error::UnknownFamily { family: format!("step_psi{which}") }),
    };
    let wave = PiecewiseWave::new(
        vec![
            Region { x_lo: f64::NEG_INFINITY, x_hi: 0.0, origin: 0.0, basis: left.0, coeffs: left.1 },
            Region { x_lo: 0.0, x_hi: f64::INFINITY, origin: 0.0, basis: right.0, coeffs: right.1 },
        ],
        Extension::Undefined,
    )?;
    Ok(Eigenstate { family, energy, kappa: Some(k), wave, norm_const: norm })
}

/// One-sided free state of the open box at exterior wavenumber κ.
pub fn open_box(v0: f64, ramp: Ramp, kappa: f64) -> Result<Eigenstate> {
    let energy = 0.5 * kappa * kappa;
    if !(kappa > 0.0) {
        return Err(Error::OutOfSpectrum { energy });
    }
    let gamma = (2.0 * (energy + v0)).sqrt();
    let zero = re(0.0);
    let (regions, norm) = match ramp {
        Ramp::None => {
            let (s, c) = gamma.sin_cos();
            let n = (PI * (gamma * gamma * c * c + kappa * kappa * s * s) / 2.0).sqrt();
            (
                vec![
                    Region { x_lo: 0.0, x_hi: 1.0, origin: 0.0, basis: Basis::Trig { k: gamma }, coeffs: [zero, re(kappa / n)] },
                    Region {
                        x_lo: 1.0,
                        x_hi: f64::INFINITY,
                        origin: 1.0,
                        basis: Basis::Trig { k: kappa },
                        coeffs: [re(kappa * s / n), re(gamma * c / n)],
                    },
                ],
                kappa / n,
            )
        }
        Ramp::Linear => {
            let pair = Arc::new(FundamentalPair::new(Arc::new(ramp_coefficient(v0, energy)), RAMP_START, RAMP_START, 1.0));
            let (s, c) = (gamma * RAMP_START).sin_cos();
            // exit values of sin γx continued through the ramp
            let st = pair.eval(1.0)?;
            let (p, q) = (s * st[0] + gamma * c * st[2], s * st[1] + gamma * c * st[3]);
            let n = (2.0 / (PI * (p * p + q * q / (kappa * kappa)))).sqrt();
            (
                vec![
                    Region { x_lo: 0.0, x_hi: RAMP_START, origin: 0.0, basis: Basis::Trig { k: gamma }, coeffs: [zero, re(n)] },
                    Region {
                        x_lo: RAMP_START,
                        x_hi: 1.0,
                        origin: RAMP_START,
                        basis: Basis::Numerical(pair),
                        coeffs: [re(n * s), re(n * gamma * c)],
                    },
                    Region {
                        x_lo: 1.0,
                        x_hi: f64::INFINITY,
                        origin: 1.0,
                        basis: Basis::Trig { k: kappa },
                        coeffs: [re(n * p), re(n * q / kappa)],
                    },
                ],
                n,
            )
        }
    };
    Ok(Eigenstate {
        family: Family::OpenboxFree,
        energy,
        kappa: Some(kappa),
        wave: PiecewiseWave::new(regions, Extension::Zero)?,
        norm_const: norm,
    })
}
