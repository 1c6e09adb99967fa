//! Completeness checks: initial states, projections, expansion over mixed
//! spectra, total measurement probability and a grid-diagonalization oracle.

mod expand;
mod initial;
mod oracle;

use std::f64::consts::PI;

pub use expand::{
    expand, project, total_probability, AmplitudeSample, AmplitudeTable, BoundAmplitude, ExpansionOptions,
    ExpansionResult, JacobianMode, ProbabilityReport, QuadratureReport,
};
pub use initial::{make_initial, BoxConstants, InitialKind, InitialState};
pub use oracle::{grid_oracle, OracleResult};

use crate::csv::fmt_num;
use crate::error::Result;
use crate::numerics::quadrature::{integrate, QuadratureSpec};

/// ∫₀^∞ 8πσ·cos²(kσ/2)/(π² − k²σ²)² dk, which equals 1 for every σ > 0.
pub fn identity_check(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(crate::error::Error::BadParams(format!("sigma must be positive, got {sigma}")));
    }
    // cos²(u/2)/(π² − u²)² = sinc²(t)/(4(π + u)²) with t = (π − u)/2, which
    // removes the apparent pole at u = π
    let f = move |k: f64| {
        let u = k * sigma;
        let t = 0.5 * (PI - u);
        let sinc = if t.abs() < 1e-6 { 1.0 - t * t / 6.0 } else { t.sin() / t };
        2.0 * PI * sigma * sinc * sinc / (PI + u).powi(2)
    };
    let spec = QuadratureSpec::with_tolerances(1e-12, 1e-12);
    Ok(integrate(f, 0.0, f64::INFINITY, &spec)?.value)
}

impl ExpansionResult {
    /// x, Re f, Im f, Ψ, |f − Ψ|.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re_f,im_f,psi,residual\n");
        for ((x, f), psi) in self.x_grid.iter().zip(&self.f).zip(&self.initial) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_num(*x),
                fmt_num(f.re),
                fmt_num(f.im),
                fmt_num(*psi),
                fmt_num((f - psi).norm())
            ));
        }
        out
    }
}
