//! Orthonormalized eigenstates: bound states from level equations, free and
//! Bloch states with average-density normalization (1/2π two-sided, 1/π
//! one-sided), and the one-sided comb.

pub mod bloch;
pub mod bound;
pub mod free;
pub mod onesided;
mod wave;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{Potential, PotentialValue};
pub use crate::spectra::Branch;
pub use free::Incidence;
pub use onesided::{one_sided_comb_state, OneSidedCombState};
pub use wave::{Basis, Extension, PiecewiseWave, Region};

/// Eigenstate family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Family {
    DwBound1,
    DwBound2,
    DwFreeLeft,
    DwFreeRight,
    CosBlochPlus,
    CosBlochMinus,
    CombBlochPlus,
    CombBlochMinus,
    KpBloch(u8),
    StepPsi0,
    StepPsi1,
    StepPsi2,
    OpenboxBound,
    OpenboxFree,
    OnesidedComb,
    BoxMode(u32),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::DwBound1 => "dw_bound1",
            Family::DwBound2 => "dw_bound2",
            Family::DwFreeLeft => "dw_free_left",
            Family::DwFreeRight => "dw_free_right",
            Family::CosBlochPlus => "cos_bloch+",
            Family::CosBlochMinus => "cos_bloch-",
            Family::CombBlochPlus => "comb_bloch+",
            Family::CombBlochMinus => "comb_bloch-",
            Family::KpBloch(i) => return write!(f, "kp_bloch_{i}"),
            Family::StepPsi0 => "step_psi0",
            Family::StepPsi1 => "step_psi1",
            Family::StepPsi2 => "step_psi2",
            Family::OpenboxBound => "openbox_bound",
            Family::OpenboxFree => "openbox_free",
            Family::OnesidedComb => "onesided_comb",
            Family::BoxMode(n) => return write!(f, "box_mode_{n}"),
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFamily { family: s.to_string() };
        Ok(match s {
            "dw_bound1" => Family::DwBound1,
            "dw_bound2" => Family::DwBound2,
            "dw_free_left" => Family::DwFreeLeft,
            "dw_free_right" => Family::DwFreeRight,
            "cos_bloch+" => Family::CosBlochPlus,
            "cos_bloch-" => Family::CosBlochMinus,
            "comb_bloch+" => Family::CombBlochPlus,
            "comb_bloch-" => Family::CombBlochMinus,
            "step_psi0" => Family::StepPsi0,
            "step_psi1" => Family::StepPsi1,
            "step_psi2" => Family::StepPsi2,
            "openbox_bound" => Family::OpenboxBound,
            "openbox_free" => Family::OpenboxFree,
            "onesided_comb" => Family::OnesidedComb,
            _ => {
                if let Some(i) = s.strip_prefix("kp_bloch_") {
                    match i.parse::<u8>() {
                        Ok(i @ 1..=4) => Family::KpBloch(i),
                        _ => return Err(unknown()),
                    }
                } else if let Some(n) = s.strip_prefix("box_mode_") {
                    Family::BoxMode(n.parse().map_err(|_| unknown())?)
                } else {
                    return Err(unknown());
                }
            }
        })
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Family {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenstate {
    pub family: Family,
    pub energy: f64,
    pub kappa: Option<f64>,
    pub wave: PiecewiseWave,
    pub norm_const: f64,
}

impl Eigenstate {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.wave.eval(x)
    }

    /// Samples (x, Re ψ, Im ψ) as CSV.
    pub fn to_csv(&self, grid: &[f64]) -> String {
        self.wave.to_csv(grid)
    }

    /// Largest mismatch of the matching conditions: ψ continuous, ψ′ jumping
    /// by 2γψ at deltas, ψ = 0 at hard walls and the Bloch condition across
    /// the cell boundary.
    pub fn junction_residual(&self, p: &Potential) -> f64 {
        let mut worst: f64 = 0.0;
        let jump_at = |x: f64| -> f64 { p.deltas_in(x - 1e-12, x + 1e-12).iter().map(|d| d.1).sum() };
        let wall = |x: f64| {
            matches!(p.evaluate(x - 1e-9), PotentialValue::Infinite) || matches!(p.evaluate(x + 1e-9), PotentialValue::Infinite)
        };
        let mut check = |x: f64, left: (Complex64, Complex64), right: (Complex64, Complex64)| {
            if wall(x) {
                worst = worst.max(left.0.norm().min(right.0.norm()));
                return;
            }
            let scale = 1.0_f64.max(left.0.norm()).max(left.1.norm());
            worst = worst.max((left.0 - right.0).norm() / scale);
            let expected = 2.0 * jump_at(x) * left.0;
            worst = worst.max((right.1 - left.1 - expected).norm() / scale);
        };
        for x in self.wave.breakpoints() {
            if let Some((l, r)) = self.wave.one_sided_limits(x) {
                check(x, l, r);
            }
        }
        let regions = &self.wave.regions;
        match self.wave.extension {
            Extension::Bloch { kappa, period, cell_lo } => {
                let end = cell_lo + period;
                let left = regions[regions.len() - 1].value_and_derivative(end);
                let phase = Complex64::from_polar(1.0, kappa * period);
                let (v, d) = regions[0].value_and_derivative(cell_lo);
                check(end, left, (v * phase, d * phase));
            }
            Extension::Zero => {
                let (lo, hi) = self.wave.support();
                if lo.is_finite() {
                    worst = worst.max(regions[0].value_and_derivative(lo).0.norm());
                }
                if hi.is_finite() {
                    worst = worst.max(regions[regions.len() - 1].value_and_derivative(hi).0.norm());
                }
            }
            Extension::Undefined => {}
        }
        worst
    }
}

/// Bound states of the double well and the open box (empty otherwise).
pub fn bound_states(p: &Potential) -> Result<Vec<Eigenstate>> {
    p.validate()?;
    match *p {
        Potential::DoubleWell { v0, v1 } => bound::double_well(v0, v1),
        Potential::OpenBox { v0, ramp } => bound::open_box(v0, ramp),
        _ => Ok(Vec::new()),
    }
}

/// Free state at energy ε of the given family.
pub fn free_state(p: &Potential, energy: f64, family: Family) -> Result<Eigenstate> {
    p.validate()?;
    if !(energy > 0.0) {
        return Err(Error::OutOfSpectrum { energy });
    }
    let k = (2.0 * energy).sqrt();
    match (*p, family) {
        (Potential::DoubleWell { v0, v1 }, Family::DwFreeLeft) => free::double_well(v0, v1, k, Incidence::Left),
        (Potential::DoubleWell { v0, v1 }, Family::DwFreeRight) => free::double_well(v0, v1, k, Incidence::Right),
        (Potential::Step { v0 }, Family::StepPsi0) => free::step(v0, k, 0),
        (Potential::Step { v0 }, Family::StepPsi1) => free::step(v0, k, 1),
        (Potential::Step { v0 }, Family::StepPsi2) => free::step(v0, k, 2),
        (Potential::OpenBox { v0, ramp }, Family::OpenboxFree) => free::open_box(v0, ramp, k),
        (Potential::OneSidedComb { a, gamma, b }, Family::OnesidedComb) => {
            one_sided_comb_state(a, gamma, b, k, 200).map(|s| s.state)
        }
        _ => Err(Error::UnknownFamily { family: format!("{family} for {}", p.name()) }),
    }
}

/// Bloch state at energy ε on the given branch.
pub fn bloch_state(p: &Potential, energy: f64, branch: Branch) -> Result<Eigenstate> {
    p.validate()?;
    match *p {
        Potential::Cosine { v0 } => bloch::cosine(v0, energy, branch),
        Potential::DiracComb { a, gamma } => {
            if !(energy > 0.0) {
                return Err(Error::InGap { energy });
            }
            bloch::comb(a, gamma, (2.0 * energy).sqrt(), branch)
        }
        Potential::KronigPenney { b, v0, v1 } => bloch::kronig_penney(b, v0, v1, energy, branch),
        _ => Err(Error::WrongClass),
    }
}

/// ⟨e₁|e₂⟩ over growing windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub one_sided: bool,
    /// Window lengths (2W two-sided, W one-sided).
    pub lengths: Vec<f64>,
    pub overlaps: Vec<Complex64>,
    /// Least-squares slope of Re⟨e₁|e₂⟩ against the window length.
    pub slope: f64,
    pub max_abs: f64,
}

pub fn orthonormality_probe(e1: &Eigenstate, e2: &Eigenstate, window_growth: &[f64]) -> ProbeReport {
    let lo = e1.wave.support().0.max(e2.wave.support().0);
    let one_sided = lo.is_finite();
    let mut lengths = Vec::with_capacity(window_growth.len());
    let mut overlaps = Vec::with_capacity(window_growth.len());
    for &w in window_growth {
        let (a, b, len) = if one_sided { (lo, lo + w, w) } else { (-w, w, 2.0 * w) };
        lengths.push(len);
        overlaps.push(e1.wave.inner(&e2.wave, a, b));
    }
    let n = lengths.len() as f64;
    let mx = lengths.iter().sum::<f64>() / n;
    let my = overlaps.iter().map(|z| z.re).sum::<f64>() / n;
    let sxx: f64 = lengths.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lengths.iter().zip(&overlaps).map(|(x, y)| (x - mx) * (y.re - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let max_abs = overlaps.iter().map(|z| z.norm()).fold(0.0, f64::max);
    ProbeReport { one_sided, lengths, overlaps, slope, max_abs }
}
