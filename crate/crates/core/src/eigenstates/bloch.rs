//! Bloch states of the periodic potentials, normalized per period to
//! period/(2π).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::wave::{Basis, Extension, PiecewiseWave, Region};
use super::{Eigenstate, Family};
use crate::error::{Error, Result};
use crate::numerics::taylor::{CosineCoefficient, FundamentalPair};
use crate::numerics::tridiag::Tridiagonal;
use crate::spectra::{dispersion, layer, Branch};

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn kappa_of(d: f64, period: f64, branch: Branch, energy: f64) -> Result<f64> {
    if !(d.abs() <= 1.0) {
        return Err(Error::InGap { energy });
    }
    Ok(branch.sign() * d.acos() / period)
}

fn finish(mut wave: PiecewiseWave, period: f64, cell_lo: f64, family: Family, energy: f64, kappa: f64) -> Eigenstate {
    let norm = wave.norm_sqr(cell_lo, cell_lo + period);
    let scale = (period / (2.0 * PI) / norm).sqrt();
    wave.scale(re(scale));
    Eigenstate { family, energy, kappa: Some(kappa), wave, norm_const: scale }
}

/// ψ = u + B·v over [0, π] for V₀·cos 2x, with u, v the unit-Wronskian pair.
pub fn cosine(v0: f64, energy: f64, branch: Branch) -> Result<Eigenstate> {
    let p = crate::potentials::Potential::Cosine { v0 };
    let kappa = kappa_of(dispersion(&p, energy)?, PI, branch, energy)?;
    let pair = Arc::new(FundamentalPair::new(Arc::new(CosineCoefficient { a: 2.0 * energy, q: v0 }), 0.0, 0.0, PI));
    let end = pair.eval(PI)?;
    let lambda = Complex64::from_polar(1.0, kappa * PI);
    let b = (lambda - end[0]) / end[2];
    let wave = PiecewiseWave::new(
        vec![Region { x_lo: 0.0, x_hi: PI, origin: 0.0, basis: Basis::Numerical(pair), coeffs: [re(1.0), b] }],
        Extension::Bloch { kappa, period: PI, cell_lo: 0.0 },
    )?;
    let family = match branch {
        Branch::Minus => Family::CosBlochMinus,
        _ => Family::CosBlochPlus,
    };
    Ok(finish(wave, PI, 0.0, family, energy, kappa))
}

/// Plane-wave index of the free mode with rank `band` (1-based) at κ.
fn dominant_mode(band: usize, kappa: f64) -> i64 {
    let r = band as i64;
    let m = if r % 2 == 1 { (r - 1) / 2 } else { -r / 2 };
    if kappa < 0.0 {
        -m
    } else {
        m
    }
}

/// Hill-matrix eigenpair of the cosine potential: energy, first plane-wave
/// index and unit-norm coefficients.
fn hill(v0: f64, band: usize, kappa: f64, vectors: bool) -> Result<(f64, i64, Vec<f64>)> {
    if band == 0 || !(kappa.abs() <= 1.0) {
        return Err(Error::OutOfDomain(format!("band {band} at κ = {kappa}")));
    }
    let r = band as i64;
    let m_c = dominant_mode(band, kappa);
    let q = |m: i64| kappa + 2.0 * m as f64;
    let mut half = 20 + (2.0 * v0.abs().sqrt()).ceil() as i64;
    while half <= 1 << 14 {
        // low bands keep every mode down to the bottom of the spectrum;
        // high bands couple only to their neighbours
        let (lo, hi, rank) = if r <= 4 * half {
            let reach = r / 2 + 1 + half;
            (-reach, reach, band - 1)
        } else {
            let (lo, hi) = (m_c - half, m_c + half);
            (lo, hi, (lo..=hi).filter(|&m| q(m).abs() < q(m_c).abs()).count())
        };
        let t = Tridiagonal { diag: (lo..=hi).map(|m| 0.5 * q(m) * q(m)).collect(), off: 0.5 * v0 };
        let (glo, ghi) = t.bounds();
        let energy = t.eigenvalue(rank, glo, ghi);
        if !vectors {
            return Ok((energy, lo, Vec::new()));
        }
        let c = t.eigenvector(energy, glo.abs().max(ghi.abs()));
        let max = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if c[0].abs() > 1e-15 * max || c[c.len() - 1].abs() > 1e-15 * max {
            half *= 2;
            continue;
        }
        return Ok((energy, lo, c));
    }
    Err(Error::NonConvergence { estimate: f64::NAN, error: f64::NAN })
}

/// Energies of band `band` at κ = 0 and |κ| = 1, ascending.
pub fn cosine_band_edges(v0: f64, band: usize) -> Result<(f64, f64)> {
    let a = hill(v0, band, 0.0, false)?.0;
    let b = hill(v0, band, 1.0, false)?.0;
    Ok((a.min(b), a.max(b)))
}

/// Cosine Bloch state of band `band` (1-based) at κ ∈ [−1, 1] as a
/// plane-wave series Σ cₘ e^{i(κ+2m)x}, with ½(κ+2m)²cₘ + (V₀/2)(cₘ₋₁ + cₘ₊₁)
/// = ε·cₘ. Also returns the group velocity dε/dκ.
///
/// Cheap at any energy, unlike the ODE construction in [`cosine`]; the two
/// agree up to a global phase.
pub fn cosine_fourier(v0: f64, band: usize, kappa: f64) -> Result<(Eigenstate, f64)> {
    let (energy, lo, mut c) = hill(v0, band, kappa, true)?;
    let max = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let first = c.iter().position(|v| v.abs() > 1e-17 * max).unwrap_or(0);
    let last = c.iter().rposition(|v| v.abs() > 1e-17 * max).unwrap_or(c.len() - 1);
    c.truncate(last + 1);
    c.drain(..first);
    let m_lo = lo + first as i64;
    let sign = c[(dominant_mode(band, kappa) - m_lo).clamp(0, c.len() as i64 - 1) as usize].signum();
    let weight: f64 = c.iter().map(|v| v * v).sum();
    let velocity = c.iter().enumerate().map(|(j, v)| v * v * (kappa + 2.0 * (m_lo + j as i64) as f64)).sum::<f64>() / weight;
    // ∫ over one period of |ψ|² is π·Σcₘ² and must equal 1/2
    let scale = sign / (2.0 * PI * weight).sqrt();
    let terms: Vec<Complex64> = c.iter().map(|v| re(v * scale)).collect();
    let wave = PiecewiseWave::new(
        vec![Region {
            x_lo: 0.0,
            x_hi: PI,
            origin: 0.0,
            basis: Basis::Fourier { kappa, g: 2.0, m_lo, terms: Arc::new(terms) },
            coeffs: [re(1.0), re(0.0)],
        }],
        Extension::Bloch { kappa, period: PI, cell_lo: 0.0 },
    )?;
    let family = if kappa < 0.0 { Family::CosBlochMinus } else { Family::CosBlochPlus };
    let state = Eigenstate { family, energy, kappa: Some(kappa), wave, norm_const: scale.abs() };
    Ok((state, velocity))
}

/// Comb cell [0, a) with the delta at its left end: ψ = cos kx + c₁·sin kx.
pub fn comb(a: f64, gamma: f64, k: f64, branch: Branch) -> Result<Eigenstate> {
    let energy = 0.5 * k * k;
    if !(k > 0.0) {
        return Err(Error::InGap { energy });
    }
    let (s, c) = (k * a).sin_cos();
    let kappa = kappa_of(c + gamma * s / k, a, branch, energy)?;
    if s == 0.0 {
        return Err(Error::AtBandEdge { energy });
    }
    let lambda = Complex64::from_polar(1.0, kappa * a);
    let c1 = (lambda - c) / s;
    let wave = PiecewiseWave::new(
        vec![Region { x_lo: 0.0, x_hi: a, origin: 0.0, basis: Basis::Trig { k }, coeffs: [re(1.0), c1] }],
        Extension::Bloch { kappa, period: a, cell_lo: 0.0 },
    )?;
    let family = match branch {
        Branch::Minus => Family::CombBlochMinus,
        _ => Family::CombBlochPlus,
    };
    Ok(finish(wave, a, 0.0, family, energy, kappa))
}

/// Family index 1..4: +κ and −κ below V₀, then +κ and −κ above V₀.
pub fn kp_family_index(v0: f64, energy: f64, branch: Branch) -> u8 {
    1 + u8::from(branch == Branch::Minus) + 2 * u8::from(energy > v0)
}

/// Kronig–Penney cell [−b, 1) built from the one-period transfer matrix.
pub fn kronig_penney(b: f64, v0: f64, v1: f64, energy: f64, branch: Branch) -> Result<Eigenstate> {
    let period = b + 1.0;
    let c0 = 2.0 * (energy - v0);
    let c1 = 2.0 * (energy - v1);
    let (cc0, s0, _, _) = layer(c0, b);
    let (cc1, s1, _, _) = layer(c1, 1.0);
    // y(period) = M0·M1·y(0) for y = (ψ, ψ′)
    let m1 = [[cc1, s1], [-c1 * s1, cc1]];
    let m0 = [[cc0, s0], [-c0 * s0, cc0]];
    let m = [
        [m0[0][0] * m1[0][0] + m0[0][1] * m1[1][0], m0[0][0] * m1[0][1] + m0[0][1] * m1[1][1]],
        [m0[1][0] * m1[0][0] + m0[1][1] * m1[1][0], m0[1][0] * m1[0][1] + m0[1][1] * m1[1][1]],
    ];
    let d = 0.5 * (m[0][0] + m[1][1]);
    let kappa = kappa_of(d, period, branch, energy)?;
    let lambda = Complex64::from_polar(1.0, kappa * period);
    let cand1 = [re(m[0][1]), lambda - m[0][0]];
    let cand2 = [lambda - m[1][1], re(m[1][0])];
    let norm = |v: &[Complex64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
    let y0 = if norm(&cand1) >= norm(&cand2) { cand1 } else { cand2 };
    if norm(&y0) == 0.0 {
        return Err(Error::AtBandEdge { energy });
    }
    // state at x = 1 equals e^{iκL} times the state at x = −b
    let y1 = [y0[0] * m1[0][0] + y0[1] * m1[0][1], y0[0] * m1[1][0] + y0[1] * m1[1][1]];
    let back = lambda.conj();
    let wave = PiecewiseWave::new(
        vec![
            Region::constant(-b, 0.0, -b, c0, y1[0] * back, y1[1] * back),
            Region::constant(0.0, 1.0, 0.0, c1, y0[0], y0[1]),
        ],
        Extension::Bloch { kappa, period, cell_lo: -b },
    )?;
    let family = Family::KpBloch(kp_family_index(v0, energy, branch));
    Ok(finish(wave, period, -b, family, energy, kappa))
}
