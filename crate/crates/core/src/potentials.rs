//! The potential catalog.
//!
//! Geometry conventions (natural units):
//! - `DoubleWell`: −V₀ on (0, 1), −V₁ on (1, 2), 0 elsewhere.
//! - `Cosine`: V₀·cos 2x, period π.
//! - `DiracComb`: γ·Σδ(x − na), n ∈ ℤ.
//! - `KronigPenney`: V₀ on (−b, 0), V₁ on (0, 1), repeated with period b + 1.
//! - `Step`: 0 for x < 0, V₀ for x > 0.
//! - `OpenBox`: hard wall for x < 0, −V₀ on (0, 1), 0 for x > 1; the linear
//!   ramp variant rises from −V₀ at x = 2/3 to 0 at x = 1.
//! - `OneSidedComb`: hard wall at x = −b, γ·Σδ(x − na) for n ≥ 0.
//! - `HardBox`: walls at τ and τ + σ, `v_left` on (τ, split), `v_right` on
//!   (split, τ + σ).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    #[default]
    None,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    HardBox {
        tau: f64,
        sigma: f64,
        split: f64,
        v_left: f64,
        v_right: f64,
    },
    DoubleWell {
        v0: f64,
        v1: f64,
    },
    Cosine {
        v0: f64,
    },
    DiracComb {
        a: f64,
        gamma: f64,
    },
    KronigPenney {
        b: f64,
        v0: f64,
        v1: f64,
    },
    Step {
        v0: f64,
    },
    OpenBox {
        v0: f64,
        #[serde(default)]
        ramp: Ramp,
    },
    OneSidedComb {
        a: f64,
        gamma: f64,
        b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticKind {
    Infinite,
    Constant(f64),
    Periodic(f64),
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticClass {
    pub side: Side,
    pub kind: AsymptoticKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialValue {
    Finite(f64),
    Infinite,
    /// A δ-function of the given strength located exactly at the query point.
    Delta { location: f64, strength: f64 },
}

pub(crate) const RAMP_START: f64 = 2.0 / 3.0;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPotential(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Potential {
    pub fn name(&self) -> &'static str {
        match self {
            Potential::HardBox { .. } => "hard_box",
            Potential::DoubleWell { .. } => "double_well",
            Potential::Cosine { .. } => "cosine",
            Potential::DiracComb { .. } => "dirac_comb",
            Potential::KronigPenney { .. } => "kronig_penney",
            Potential::Step { .. } => "step",
            Potential::OpenBox { .. } => "open_box",
            Potential::OneSidedComb { .. } => "one_sided_comb",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Potential::HardBox { tau, sigma, split, v_left, v_right } => {
                positive("sigma", sigma)?;
                if !(tau.is_finite() && v_left.is_finite() && v_right.is_finite()) {
                    return Err(Error::InvalidPotential("hard box parameters must be finite".into()));
                }
                if !(split >= tau && split <= tau + sigma) {
                    return Err(Error::InvalidPotential(format!(
                        "split {split} must lie in [tau, tau + sigma] = [{tau}, {}]",
                        tau + sigma
                    )));
                }
                Ok(())
            }
            Potential::DoubleWell { v0, v1 } => {
                positive("v1", v1)?;
                if !(v0 > v1 && v0.is_finite()) {
                    return Err(Error::InvalidPotential(format!(
                        "double well requires v0 > v1 > 0, got v0 = {v0}, v1 = {v1}"
                    )));
                }
                Ok(())
            }
            Potential::Cosine { v0 } => {
                if v0.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidPotential("v0 must be finite".into()))
                }
            }
            Potential::DiracComb { a, gamma } => {
                positive("a", a)?;
                positive("gamma", gamma)
            }
            Potential::KronigPenney { b, v0, v1 } => {
                positive("b", b)?;
                if !(v1 >= 0.0 && v0 >= v1 && v0.is_finite()) {
                    return Err(Error::InvalidPotential(format!(
                        "Kronig-Penney requires v0 >= v1 >= 0, got v0 = {v0}, v1 = {v1}"
                    )));
                }
                Ok(())
            }
            Potential::Step { v0 } => positive("v0", v0),
            Potential::OpenBox { v0, .. } => positive("v0", v0),
            Potential::OneSidedComb { a, gamma, b } => {
                positive("a", a)?;
                positive("gamma", gamma)?;
                if !(b > 0.0 && b < a) {
                    return Err(Error::InvalidPotential(format!(
                        "one-sided comb requires 0 < b < a, got b = {b}, a = {a}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Lattice period for periodic variants.
    pub fn period(&self) -> Option<f64> {
        match *self {
            Potential::Cosine { .. } => Some(PI),
            Potential::DiracComb { a, .. } => Some(a),
            Potential::KronigPenney { b, .. } => Some(b + 1.0),
            _ => None,
        }
    }

    /// Pointwise value. δ-functions are reported only when `x` hits a
    /// δ location exactly; elsewhere comb variants evaluate to 0.
    pub fn evaluate(&self, x: f64) -> PotentialValue {
        use PotentialValue::*;
        match *self {
            Potential::HardBox { tau, sigma, split, v_left, v_right } => {
                if x < tau || x > tau + sigma {
                    Infinite
                } else if x < split {
                    Finite(v_left)
                } else {
                    Finite(v_right)
                }
            }
            Potential::DoubleWell { v0, v1 } => {
                if (0.0..1.0).contains(&x) {
                    Finite(-v0)
                } else if (1.0..2.0).contains(&x) {
                    Finite(-v1)
                } else {
                    Finite(0.0)
                }
            }
            Potential::Cosine { v0 } => Finite(v0 * (2.0 * x).cos()),
            Potential::DiracComb { a, gamma } => {
                let n = (x / a).round();
                if n * a == x {
                    Delta { location: x, strength: gamma }
                } else {
                    Finite(0.0)
                }
            }
            Potential::KronigPenney { b, v0, v1 } => {
                let period = b + 1.0;
                let local = x - period * ((x + b) / period).floor();
                if local < 0.0 {
                    Finite(v0)
                } else {
                    Finite(v1)
                }
            }
            Potential::Step { v0 } => Finite(if x < 0.0 { 0.0 } else { v0 }),
            Potential::OpenBox { v0, ramp } => {
                if x < 0.0 {
                    Infinite
                } else if x >= 1.0 {
                    Finite(0.0)
                } else {
                    match ramp {
                        Ramp::None => Finite(-v0),
                        Ramp::Linear if x < RAMP_START => Finite(-v0),
                        Ramp::Linear => Finite(-v0 + 3.0 * v0 * (x - RAMP_START)),
                    }
                }
            }
            Potential::OneSidedComb { a, gamma, b } => {
                if x < -b {
                    Infinite
                } else {
                    let n = (x / a).round();
                    if n >= 0.0 && n * a == x {
                        Delta { location: x, strength: gamma }
                    } else {
                        Finite(0.0)
                    }
                }
            }
        }
    }

    /// Finite part of the potential (δ-functions and walls read as 0 and
    /// +∞ respectively).
    pub fn value(&self, x: f64) -> f64 {
        match self.evaluate(x) {
            PotentialValue::Finite(v) => v,
            PotentialValue::Infinite => f64::INFINITY,
            PotentialValue::Delta { .. } => 0.0,
        }
    }

    /// Region boundaries (including hard walls and δ locations) inside [lo, hi].
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = match *self {
            Potential::HardBox { tau, sigma, split, .. } => vec![tau, split, tau + sigma],
            Potential::DoubleWell { .. } => vec![0.0, 1.0, 2.0],
            Potential::Cosine { .. } => vec![],
            Potential::DiracComb { a, .. } => lattice(a, 0.0, lo, hi),
            Potential::KronigPenney { b, .. } => {
                let period = b + 1.0;
                let mut v = lattice(period, 0.0, lo, hi);
                v.extend(lattice(period, -b, lo, hi));
                v
            }
            Potential::Step { .. } => vec![0.0],
            Potential::OpenBox { ramp, .. } => match ramp {
                Ramp::None => vec![0.0, 1.0],
                Ramp::Linear => vec![0.0, RAMP_START, 1.0],
            },
            Potential::OneSidedComb { a, b, .. } => {
                let mut v = vec![-b];
                v.extend(lattice(a, 0.0, lo.max(0.0), hi));
                v
            }
        };
        out.retain(|x| *x >= lo && *x <= hi);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// δ-function locations and strengths inside [lo, hi].
    pub fn deltas_in(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        match *self {
            Potential::DiracComb { a, gamma } => {
                lattice(a, 0.0, lo, hi).into_iter().map(|x| (x, gamma)).collect()
            }
            Potential::OneSidedComb { a, gamma, .. } => lattice(a, 0.0, lo.max(0.0), hi)
                .into_iter()
                .map(|x| (x, gamma))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn classify(&self, side: Side) -> AsymptoticClass {
        use AsymptoticKind::*;
        let kind = match (*self, side) {
            (Potential::HardBox { .. }, _) => Infinite,
            (Potential::DoubleWell { .. }, _) => Constant(0.0),
            (Potential::Step { .. }, Side::Left) => Constant(0.0),
            (Potential::Step { v0 }, Side::Right) => Constant(v0),
            (Potential::OpenBox { .. }, Side::Left) => Infinite,
            (Potential::OpenBox { .. }, Side::Right) => Constant(0.0),
            (Potential::OneSidedComb { .. }, Side::Left) => Infinite,
            (Potential::OneSidedComb { a, .. }, Side::Right) => Periodic(a),
            (p, _) => match p.period() {
                Some(period) => Periodic(period),
                None => Undefined,
            },
        };
        AsymptoticClass { side, kind }
    }

    /// Asymptotic constant on `side`, if the potential has one.
    pub fn asymptote(&self, side: Side) -> Option<f64> {
        match self.classify(side).kind {
            AsymptoticKind::Constant(v) => Some(v),
            _ => None,
        }
    }
}

fn lattice(spacing: f64, offset: f64, lo: f64, hi: f64) -> Vec<f64> {
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Vec::new();
    }
    let first = ((lo - offset) / spacing).ceil() as i64;
    let last = ((hi - offset) / spacing).floor() as i64;
    (first..=last).map(|n| offset + n as f64 * spacing).collect()
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Potential::HardBox { tau, sigma, split, v_left, v_right } => write!(
                f,
                "hard_box(tau={tau}, sigma={sigma}, split={split}, v_left={v_left}, v_right={v_right})"
            ),
            Potential::DoubleWell { v0, v1 } => write!(f, "double_well(v0={v0}, v1={v1})"),
            Potential::Cosine { v0 } => write!(f, "cosine(v0={v0})"),
            Potential::DiracComb { a, gamma } => write!(f, "dirac_comb(a={a}, gamma={gamma})"),
            Potential::KronigPenney { b, v0, v1 } => write!(f, "kronig_penney(b={b}, v0={v0}, v1={v1})"),
            Potential::Step { v0 } => write!(f, "step(v0={v0})"),
            Potential::OpenBox { v0, ramp } => write!(f, "open_box(v0={v0}, ramp={ramp:?})"),
            Potential::OneSidedComb { a, gamma, b } => write!(f, "one_sided_comb(a={a}, gamma={gamma}, b={b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let dw = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
        assert_eq!(dw.evaluate(0.5), PotentialValue::Finite(-4.27));
        assert_eq!(dw.evaluate(1.5), PotentialValue::Finite(-1.43));
        assert_eq!(Potential::Step { v0: 2.645 }.evaluate(-3.0), PotentialValue::Finite(0.0));
        assert!((Potential::Cosine { v0: 1.0 }.value(PI / 2.0) + 1.0).abs() < 1e-15);
        let kp = Potential::KronigPenney { b: 0.43, v0: 2.645, v1: 0.27 };
        assert_eq!(kp.value(-0.2), 2.645);
        assert_eq!(kp.value(0.7), 0.27);
        assert_eq!(kp.value(1.2), 2.645);
        assert_eq!(kp.value(-0.9), 0.27);
        let comb = Potential::DiracComb { a: 1.3, gamma: 1.0 };
        assert_eq!(comb.evaluate(2.6), PotentialValue::Delta { location: 2.6, strength: 1.0 });
        assert_eq!(comb.evaluate(2.0), PotentialValue::Finite(0.0));
        let ramp = Potential::OpenBox { v0: 3.0, ramp: Ramp::Linear };
        assert!((ramp.value(5.0 / 6.0) + 1.5).abs() < 1e-12);
        assert_eq!(ramp.value(-0.1), f64::INFINITY);
    }

    #[test]
    fn classification() {
        let dw = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
        assert_eq!(dw.classify(Side::Right).kind, AsymptoticKind::Constant(0.0));
        let osc = Potential::OneSidedComb { a: 1.3, gamma: 1.0, b: 0.4 };
        assert_eq!(osc.classify(Side::Left).kind, AsymptoticKind::Infinite);
        let comb = Potential::DiracComb { a: 1.3, gamma: 1.0 };
        assert_eq!(comb.classify(Side::Left).kind, AsymptoticKind::Periodic(1.3));
        assert_eq!(comb.classify(Side::Right).kind, AsymptoticKind::Periodic(1.3));
        let step = Potential::Step { v0: 2.0 };
        assert_eq!(step.classify(Side::Right).kind, AsymptoticKind::Constant(2.0));
    }

    #[test]
    fn classification_agrees_with_sampling() {
        let catalog = [
            Potential::DoubleWell { v0: 4.27, v1: 1.43 },
            Potential::Step { v0: 2.645 },
            Potential::OpenBox { v0: 2.645, ramp: Ramp::Linear },
            Potential::OneSidedComb { a: 1.3, gamma: 1.0, b: 0.4 },
            Potential::HardBox { tau: -0.38, sigma: 1.25, split: 0.0, v_left: 2.645, v_right: 0.27 },
        ];
        for p in catalog {
            for side in [Side::Left, Side::Right] {
                let sign = if side == Side::Left { -1.0 } else { 1.0 };
                for r in [1e2, 1e3, 1e4] {
                    let v = p.value(sign * r);
                    match p.classify(side).kind {
                        AsymptoticKind::Constant(c) => assert_eq!(v, c, "{p} {side:?}"),
                        AsymptoticKind::Infinite => assert_eq!(v, f64::INFINITY, "{p} {side:?}"),
                        _ => {}
                    }
                }
            }
        }
    }

    #[test]
    fn validation() {
        assert!(Potential::DoubleWell { v0: 1.0, v1: 2.0 }.validate().is_err());
        assert!(Potential::DoubleWell { v0: 4.27, v1: 1.43 }.validate().is_ok());
        assert!(Potential::OneSidedComb { a: 1.0, gamma: 1.0, b: 1.5 }.validate().is_err());
        assert!(Potential::Step { v0: -1.0 }.validate().is_err());
        assert!(Potential::KronigPenney { b: 0.43, v0: 0.2, v1: 0.27 }.validate().is_err());
        assert!(Potential::DiracComb { a: 1.3, gamma: 0.0 }.validate().is_err());
    }

    #[test]
    fn breakpoints_are_region_boundaries() {
        let kp = Potential::KronigPenney { b: 0.5, v0: 2.0, v1: 0.0 };
        assert_eq!(kp.breakpoints(-1.0, 2.0), vec![-0.5, 0.0, 1.0, 1.5]);
        let osc = Potential::OneSidedComb { a: 1.0, gamma: 1.0, b: 0.4 };
        assert_eq!(osc.breakpoints(-1.0, 2.5), vec![-0.4, 0.0, 1.0, 2.0]);
        // piecewise constant between breakpoints
        let dw = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
        let bps = dw.breakpoints(-3.0, 5.0);
        for w in bps.windows(2) {
            let a = dw.value(w[0] + 1e-9);
            let b = dw.value(w[1] - 1e-9);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn serde_round_trip() {
        let p = Potential::OpenBox { v0: 2.645, ramp: Ramp::Linear };
        let s = serde_json::to_string(&p).unwrap();
        let back: Potential = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }
}
