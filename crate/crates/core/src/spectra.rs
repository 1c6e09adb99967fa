//! Spectral functions κ(ε), band structures and the Jacobians used as
//! expansion measures.
//!
//! Periodic dispersion relations are written as D(ε) = cos(κ·period).
//! Piecewise-constant layers use the entire functions
//! C(c, L) = cos(√c·L) and S(c, L) = sin(√c·L)/√c (hyperbolic for c < 0)
//! so one expression covers every energy range.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::csv::fmt_num;
use crate::error::{Error, Result};
use crate::numerics::mathieu;
use crate::numerics::roots::{find_root, Bracket};
use crate::potentials::{Potential, Side};

/// Default band-edge exclusion margin in ε.
pub const EDGE_MARGIN: f64 = 1e-6;
const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
    /// Step-potential spectral functions κ₀, κ₁, κ₂.
    Labeled(u8),
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBand {
    pub energy_lo: f64,
    pub energy_hi: f64,
    pub branch: Branch,
    /// κ at `energy_lo` and `energy_hi`.
    pub kappa_range: (f64, f64),
    /// 1-based band number in increasing energy.
    pub index: usize,
}

impl SpectralBand {
    pub fn contains(&self, energy: f64) -> bool {
        energy > self.energy_lo && energy < self.energy_hi
    }

    pub fn width(&self) -> f64 {
        self.energy_hi - self.energy_lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    /// Energy bands in increasing order. Periodic variants list each band
    /// once on the plus branch; see [`BandStructure::with_branches`].
    pub bands: Vec<SpectralBand>,
    pub gaps: Vec<(f64, f64)>,
    pub period: Option<f64>,
}

impl BandStructure {
    /// Periodic bands duplicated onto both κ branches.
    pub fn with_branches(&self) -> Vec<SpectralBand> {
        let mut out = Vec::with_capacity(2 * self.bands.len());
        for b in &self.bands {
            if b.branch == Branch::Plus {
                out.push(*b);
                out.push(SpectralBand {
                    branch: Branch::Minus,
                    kappa_range: (-b.kappa_range.0, -b.kappa_range.1),
                    ..*b
                });
            } else {
                out.push(*b);
            }
        }
        out
    }

    /// Band containing ε, if any.
    pub fn band_of(&self, energy: f64) -> Option<&SpectralBand> {
        self.bands.iter().find(|b| energy >= b.energy_lo && energy <= b.energy_hi)
    }

    /// CSV with columns ε, κ_plus, κ_minus, band_index, sampled uniformly
    /// inside each band (edges included).
    pub fn to_csv(&self, potential: &Potential, samples_per_band: usize) -> Result<String> {
        let mut out = String::from("energy,kappa_plus,kappa_minus,band_index\n");
        let n = samples_per_band.max(2);
        for b in &self.bands {
            for i in 0..n {
                let e = b.energy_lo + (b.energy_hi - b.energy_lo) * i as f64 / (n - 1) as f64;
                let kappa = match (potential, b.branch) {
                    (Potential::Step { v0 }, Branch::Labeled(l)) => {
                        let s = step_sf(*v0, (2.0 * e).sqrt());
                        match l {
                            0 => s.kappa0,
                            1 => s.kappa1,
                            _ => s.kappa2,
                        }
                        .unwrap_or(f64::NAN)
                    }
                    _ => {
                        let d = dispersion(potential, e)?.clamp(-1.0, 1.0);
                        d.acos() / self.period.unwrap_or(1.0)
                    }
                };
                let minus = if matches!(b.branch, Branch::Labeled(_)) { f64::NAN } else { -kappa };
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_num(e),
                    fmt_num(kappa),
                    fmt_num(minus),
                    b.index
                );
            }
        }
        Ok(out)
    }
}

/// κ^±(ε) = √(2(ε − V∞)) on an asymptotically constant side.
pub fn universal_sf(p: &Potential, energy: f64, side: Side) -> Result<Option<f64>> {
    let v = p.asymptote(side).ok_or(Error::WrongClass)?;
    Ok(if energy > v { Some((2.0 * (energy - v)).sqrt()) } else { None })
}

/// cos(√c·L), sin(√c·L)/√c and their derivatives with respect to c.
pub(crate) fn layer(c: f64, len: f64) -> (f64, f64, f64, f64) {
    let z = c * len * len;
    if z.abs() < 1e-3 {
        // series in z
        let l = len;
        let cc = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        let s = l * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
        let dc = l * l * (-0.5 + z / 12.0 - z * z / 240.0);
        let ds = l * l * l * (-1.0 / 6.0 + z / 60.0 - z * z / 1680.0);
        return (cc, s, dc, ds);
    }
    let (cc, s) = if c > 0.0 {
        let r = c.sqrt();
        ((r * len).cos(), (r * len).sin() / r)
    } else {
        let r = (-c).sqrt();
        ((r * len).cosh(), (r * len).sinh() / r)
    };
    // dC/dc = −L·S/2, dS/dc = (L·C − S)/(2c)
    (cc, s, -0.5 * len * s, (len * cc - s) / (2.0 * c))
}

/// D(ε) = cos(κ·period) together with dD/dε.
pub fn dispersion_with_derivative(p: &Potential, energy: f64) -> Result<(f64, f64)> {
    match *p {
        Potential::Cosine { v0 } => {
            let (d, dd) = mathieu::discriminant(2.0 * energy, v0);
            Ok((d, 2.0 * dd))
        }
        Potential::DiracComb { a, gamma } => {
            let (c, s, dc, ds) = layer(2.0 * energy, a);
            Ok((c + gamma * s, 2.0 * (dc + gamma * ds)))
        }
        Potential::KronigPenney { b, v0, v1 } => {
            let c0 = 2.0 * (energy - v0);
            let c1 = 2.0 * (energy - v1);
            let (cc0, s0, dcc0, ds0) = layer(c0, b);
            let (cc1, s1, dcc1, ds1) = layer(c1, 1.0);
            let half = 0.5 * (c0 + c1);
            let d = cc1 * cc0 - half * s1 * s0;
            // every c derivative carries dc/dε = 2; d(half)/dε = 2
            let dd = 2.0 * (dcc1 * cc0 + cc1 * dcc0 - half * (ds1 * s0 + s1 * ds0)) - 2.0 * s1 * s0;
            Ok((d, dd))
        }
        _ => Err(Error::WrongClass),
    }
}

/// Right-hand side of the dispersion relation; |D| ≤ 1 inside bands.
pub fn dispersion(p: &Potential, energy: f64) -> Result<f64> {
    if let Potential::Cosine { v0 } = *p {
        return Ok(mathieu::discriminant(2.0 * energy, v0).0);
    }
    dispersion_with_derivative(p, energy).map(|r| r.0)
}

/// κ on the given branch, principal arccos divided by the period.
pub fn bloch_kappa(p: &Potential, energy: f64, branch: Branch) -> Result<f64> {
    let period = p.period().ok_or(Error::WrongClass)?;
    let d = dispersion(p, energy)?;
    if d.abs() > 1.0 {
        return Err(Error::InGap { energy });
    }
    Ok(branch.sign() * d.acos() / period)
}

/// |dκ/dε| inside a band of a periodic potential.
pub fn sf_jacobian(p: &Potential, energy: f64) -> Result<f64> {
    sf_jacobian_with_margin(p, energy, EDGE_MARGIN)
}

pub fn sf_jacobian_with_margin(p: &Potential, energy: f64, margin: f64) -> Result<f64> {
    if let Potential::Step { v0 } = *p {
        if energy <= 0.0 {
            return Err(Error::OutOfSpectrum { energy });
        }
        if (energy - v0).abs() < margin {
            return Err(Error::AtBandEdge { energy });
        }
        // |dκ₀/dε| = 1/k below the barrier; above it the κ₁ jacobian
        let k = (2.0 * energy).sqrt();
        let s = step_sf(v0, k);
        return Ok(s.jac1.unwrap_or(1.0) / k);
    }
    let period = p.period().ok_or(Error::WrongClass)?;
    let (d, dd) = dispersion_with_derivative(p, energy)?;
    if d.abs() > 1.0 {
        return Err(Error::InGap { energy });
    }
    let room = 1.0 - d.abs();
    if dd != 0.0 && room / dd.abs() < margin {
        return Err(Error::AtBandEdge { energy });
    }
    Ok(dd.abs() / (period * (1.0 - d * d).sqrt()))
}

/// |dκ/dk| for the Dirac comb with k = √(2ε).
pub fn comb_jacobian_k(a: f64, gamma: f64, k: f64) -> Result<f64> {
    let p = Potential::DiracComb { a, gamma };
    let energy = 0.5 * k * k;
    let (d, dd) = dispersion_with_derivative(&p, energy)?;
    if d.abs() >= 1.0 {
        return Err(Error::InGap { energy });
    }
    Ok(dd.abs() * k / (a * (1.0 - d * d).sqrt()))
}

/// Step-potential spectral functions and Jacobians at k = √(2ε).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSf {
    pub kappa0: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    /// |dκ₁/dk| and |dκ₂/dk| above the barrier.
    pub jac1: Option<f64>,
    pub jac2: Option<f64>,
}

pub fn step_sf(v0: f64, k: f64) -> StepSf {
    let k0 = (2.0 * v0).sqrt();
    if k <= 0.0 || k == k0 {
        return StepSf { kappa0: None, kappa1: None, kappa2: None, jac1: None, jac2: None };
    }
    if k < k0 {
        return StepSf { kappa0: Some(k), kappa1: None, kappa2: None, jac1: None, jac2: None };
    }
    let beta = (k * k - 2.0 * v0).sqrt();
    let s = beta + k;
    let kappa1 = (s * s + beta * beta + k * k) / (3.0 * s) + k0 / 3.0;
    let kappa2 = -(s * s + 2.0 * beta * k) / (3.0 * s) + k0 / 3.0;
    StepSf {
        kappa0: None,
        kappa1: Some(kappa1),
        kappa2: Some(kappa2),
        jac1: Some(2.0 * k / s),
        jac2: Some((beta * beta + k * k) / (beta * s)),
    }
}

/// Lowest energy at which the dispersion scan starts.
fn scan_floor(p: &Potential) -> f64 {
    match *p {
        Potential::Cosine { v0 } => -v0.abs(),
        Potential::DiracComb { .. } => 0.0,
        Potential::KronigPenney { v1, .. } => v1,
        _ => 0.0,
    }
}

/// Bands with energy_lo < `energy_max`; the last band is completed past
/// `energy_max` when it straddles it.
pub fn band_structure(p: &Potential, energy_max: f64) -> Result<BandStructure> {
    p.validate()?;
    if let Potential::Step { v0 } = *p {
        let k0 = (2.0 * v0).sqrt();
        let mut bands = vec![SpectralBand {
            energy_lo: 0.0,
            energy_hi: v0,
            branch: Branch::Labeled(0),
            kappa_range: (0.0, k0),
            index: 1,
        }];
        if energy_max > v0 {
            let top = step_sf(v0, (2.0 * energy_max).sqrt());
            bands.push(SpectralBand {
                energy_lo: v0,
                energy_hi: energy_max,
                branch: Branch::Labeled(1),
                kappa_range: (k0, top.kappa1.unwrap_or(k0)),
                index: 2,
            });
            bands.push(SpectralBand {
                energy_lo: v0,
                energy_hi: energy_max,
                branch: Branch::Labeled(2),
                kappa_range: (0.0, top.kappa2.unwrap_or(0.0)),
                index: 2,
            });
        }
        return Ok(BandStructure { bands, gaps: Vec::new(), period: None });
    }
    let period = p.period().ok_or(Error::WrongClass)?;
    let eval = |e: f64| dispersion_with_derivative(p, e);
    let floor = scan_floor(p);
    let step_at = |e: f64| {
        let k = (2.0 * (e - floor)).max(0.0).sqrt();
        (0.02 * PI / period * k.max(0.3)).max(1e-3)
    };

    // monotone segments of D between consecutive extrema
    let mut breaks = vec![floor];
    let mut e = floor;
    let (_, mut dprev) = eval(e)?;
    let mut passed_max = false;
    let mut overshoot = 0usize;
    loop {
        let next = e + step_at(e);
        let (_, dnext) = eval(next)?;
        if dprev != 0.0 && dnext.signum() != dprev.signum() {
            let bracket = Bracket::new(|x| eval(x).map(|r| r.1).unwrap_or(f64::NAN), e, next)?;
            let ext = find_root(|x| eval(x).map(|r| r.1).unwrap_or(f64::NAN), &bracket, EDGE_TOL)?;
            breaks.push(ext);
            if passed_max {
                break;
            }
        }
        e = next;
        dprev = dnext;
        if e >= energy_max {
            passed_max = true;
            overshoot += 1;
            // an exactly flat D never signals the next extremum
            if overshoot > 4000 {
                breaks.push(e);
                break;
            }
        }
    }

    let mut bands: Vec<SpectralBand> = Vec::new();
    for seg in breaks.windows(2) {
        let (s0, s1) = (seg[0], seg[1]);
        let d0 = eval(s0)?.0;
        let d1 = eval(s1)?.0;
        let edge = |target: f64| -> Result<f64> {
            let f = |x: f64| eval(x).map(|r| r.0 - target).unwrap_or(f64::NAN);
            let bracket = Bracket::new(f, s0, s1)?;
            find_root(f, &bracket, EDGE_TOL)
        };
        let lo = if d0.abs() <= 1.0 {
            s0
        } else if d0.signum() * d1 < 1.0 {
            edge(d0.signum())?
        } else {
            continue;
        };
        let hi = if d1.abs() <= 1.0 { s1 } else { edge(d1.signum())? };
        if hi <= lo || lo >= energy_max {
            continue;
        }
        let k_lo = eval(lo)?.0.clamp(-1.0, 1.0).acos() / period;
        let k_hi = eval(hi)?.0.clamp(-1.0, 1.0).acos() / period;
        bands.push(SpectralBand {
            energy_lo: lo,
            energy_hi: hi,
            branch: Branch::Plus,
            kappa_range: (k_lo, k_hi),
            index: bands.len() + 1,
        });
    }
    let gaps = bands
        .windows(2)
        .filter(|w| w[1].energy_lo > w[0].energy_hi)
        .map(|w| (w[0].energy_hi, w[1].energy_lo))
        .collect();
    Ok(BandStructure { bands, gaps, period: Some(period) })
}

/// Whether ε = k²/2 belongs to the spectrum of the one-sided δ-comb,
/// cos 2α − cos(2ka − 2α) ≥ 0 with α = arctan(γ/k).
pub fn one_sided_spectrum(a: f64, gamma: f64, energy: f64) -> bool {
    if energy <= 0.0 {
        return false;
    }
    let k = (2.0 * energy).sqrt();
    let alpha = (gamma / k).atan();
    (2.0 * alpha).cos() - (2.0 * k * a - 2.0 * alpha).cos() >= 0.0
}

/// Spectrum of a wall-free line with different δ-combs on the two sides:
/// the intersection of the two band sets.
pub fn two_comb_spectrum(left: (f64, f64), right: (f64, f64), energy: f64) -> bool {
    one_sided_spectrum(left.0, left.1, energy) && one_sided_spectrum(right.0, right.1, energy)
}
