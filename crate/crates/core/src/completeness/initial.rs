//! Initial states: sine modes of a hard-walled well, and the first excited
//! mode of a two-piece box.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigenstates::bound::hard_box;
use crate::eigenstates::{Basis, Eigenstate, Extension, Family, PiecewiseWave, Region};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialKind {
    /// √(2/σ)·sin(jπ(x − τ)/σ) on [τ, τ + σ].
    WellMode { j: u32, tau: f64, sigma: f64 },
    /// First excited mode of the box [τ, τ + σ] holding V₀ on (τ, 0) and V₁
    /// on (0, τ + σ).
    BoxFirstExcited { tau: f64, sigma: f64, v0: f64, v1: f64 },
}

/// A·sin ξ(x − τ) left of 0, matched to a sine in η vanishing at τ + σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxConstants {
    pub energy: f64,
    pub a: f64,
    pub xi: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub kind: InitialKind,
    pub wave: PiecewiseWave,
    pub constants: Option<BoxConstants>,
}

impl InitialState {
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            InitialKind::WellMode { tau, sigma, .. } | InitialKind::BoxFirstExcited { tau, sigma, .. } => {
                (tau, tau + sigma)
            }
        }
    }

    pub fn sigma(&self) -> f64 {
        let (lo, hi) = self.support();
        hi - lo
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.wave.eval(x)
    }

    /// The state as an eigenstate-shaped object (for self-overlaps).
    pub fn as_eigenstate(&self) -> Eigenstate {
        Eigenstate {
            family: Family::BoxMode(0),
            energy: self.constants.map_or(f64::NAN, |c| c.energy),
            kappa: None,
            wave: self.wave.clone(),
            norm_const: 1.0,
        }
    }
}

pub fn make_initial(kind: InitialKind) -> Result<InitialState> {
    match kind {
        InitialKind::WellMode { j, tau, sigma } => {
            if j == 0 {
                return Err(Error::BadParams("j must be a positive integer".into()));
            }
            if !(sigma > 0.0 && sigma.is_finite() && tau.is_finite()) {
                return Err(Error::BadParams(format!("sigma must be positive and tau finite, got tau = {tau}, sigma = {sigma}")));
            }
            let k = j as f64 * PI / sigma;
            let wave = PiecewiseWave::new(
                vec![Region {
                    x_lo: tau,
                    x_hi: tau + sigma,
                    origin: tau,
                    basis: Basis::Trig { k },
                    coeffs: [Complex64::new(0.0, 0.0), Complex64::new((2.0 / sigma).sqrt(), 0.0)],
                }],
                Extension::Zero,
            )?;
            Ok(InitialState { kind, wave, constants: None })
        }
        InitialKind::BoxFirstExcited { tau, sigma, v0, v1 } => {
            if !(sigma > 0.0 && tau < 0.0 && tau + sigma > 0.0) {
                return Err(Error::BadParams(format!(
                    "box must straddle x = 0 with positive width, got tau = {tau}, sigma = {sigma}"
                )));
            }
            if !(v0.is_finite() && v1.is_finite()) {
                return Err(Error::BadParams("v0 and v1 must be finite".into()));
            }
            let modes = hard_box(tau, sigma, 0.0, v0, v1, 2)?;
            let mode = modes.into_iter().nth(1).ok_or_else(|| Error::BadParams("box has no excited mode".into()))?;
            let energy = mode.energy;
            let xi = (2.0 * (energy - v0)).sqrt();
            let eta = (2.0 * (energy - v1)).sqrt();
            // left piece is A·sin ξ(x − τ): its sin coefficient at origin τ
            let a = mode.wave.regions[0].coeffs[1].re;
            Ok(InitialState {
                kind,
                wave: mode.wave,
                constants: Some(BoxConstants { energy, a, xi, eta }),
            })
        }
    }
}
