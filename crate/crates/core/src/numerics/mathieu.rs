//! Mathieu functions w'' + (a − 2q·cos 2x)·w = 0 as an initial-value
//! problem from x = 0 with the unit-Wronskian pair
//! mc(0) = 1, mc'(0) = 0, ms(0) = 0, ms'(0) = 1.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::taylor::{propagate, CosineCoefficient};
use crate::error::{Error, Result};

pub const A_LIMIT: f64 = 200.0;
pub const Q_LIMIT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MathieuEval {
    pub a: f64,
    pub q: f64,
    pub mc: f64,
    pub ms: f64,
    pub dmc: f64,
    pub dms: f64,
}

impl MathieuEval {
    pub fn wronskian(&self) -> f64 {
        self.mc * self.dms - self.dmc * self.ms
    }
}

/// Even/odd Mathieu pair at x, restricted to |a| ≤ 200, |q| ≤ 50.
pub fn mathieu(a: f64, q: f64, x: f64) -> Result<MathieuEval> {
    if !(a.abs() <= A_LIMIT && q.abs() <= Q_LIMIT && x.is_finite()) {
        return Err(Error::OutOfDomain(format!(
            "mathieu parameters (a = {a}, q = {q}) outside |a| <= {A_LIMIT}, |q| <= {Q_LIMIT}"
        )));
    }
    Ok(mathieu_unchecked(a, q, x))
}

/// Same as [`mathieu`] without the parameter box; used internally for
/// high-energy bands.
pub(crate) fn mathieu_unchecked(a: f64, q: f64, x: f64) -> MathieuEval {
    let coeff = CosineCoefficient { a, q };
    let (s, _) = propagate(&coeff, 0.0, [1.0, 0.0, 0.0, 1.0], x, false);
    MathieuEval {
        a,
        q,
        mc: s[0],
        dmc: s[1],
        ms: s[2],
        dms: s[3],
    }
}

/// Floquet discriminant D(a) = (mc(π) + ms'(π))/2 and dD/da.
///
/// The coefficient is even about π/2, so D = mc·ms' + mc'·ms at π/2 and
/// only half a period is integrated.
pub fn discriminant(a: f64, q: f64) -> (f64, f64) {
    let coeff = CosineCoefficient { a, q };
    let (s, d) = propagate(&coeff, 0.0, [1.0, 0.0, 0.0, 1.0], FRAC_PI_2, true);
    let value = s[0] * s[3] + s[1] * s[2];
    let deriv = d[0] * s[3] + s[0] * d[3] + d[1] * s[2] + s[1] * d[2];
    (value, deriv)
}
