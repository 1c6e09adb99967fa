//! High-order Taylor-series stepping for w'' = −c(x)·w.
//!
//! With w = Σ wₙ tⁿ and c = Σ cₘ tᵐ about a node, the recursion
//! (n+2)(n+1) w_{n+2} = −Σ cₘ w_{n−m} gives every coefficient; steps are
//! sized so that h·√max|c| stays below a fixed bound, which keeps the
//! truncated series accurate to roughly machine precision.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use super::airy::AiryPair;

pub(crate) const ORDER: usize = 24;
const H_MAX: f64 = 0.5;
const PHASE_PER_STEP: f64 = 1.5;

/// Coefficient function c(x) of w'' + c(x)·w = 0.
pub trait Coefficient: Send + Sync + fmt::Debug {
    /// Taylor coefficients of c about `x0`, written into `out`.
    fn taylor(&self, x0: f64, out: &mut [f64]);
    /// Upper bound of |c| on [lo, hi].
    fn bound(&self, lo: f64, hi: f64) -> f64;
    /// ∂c/∂λ for the parameter followed by the variational equations.
    fn parameter_derivative(&self) -> f64 {
        0.0
    }
    /// Number of leading Taylor coefficients that can be nonzero.
    fn taylor_len(&self) -> usize {
        ORDER
    }
    /// (c0, slope) when c is exactly linear.
    fn linear(&self) -> Option<(f64, f64)> {
        None
    }
}

/// c(x) = a − 2q·cos 2x (Mathieu); the tracked parameter is a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineCoefficient {
    pub a: f64,
    pub q: f64,
}

impl Coefficient for CosineCoefficient {
    fn taylor(&self, x0: f64, out: &mut [f64]) {
        let (s, c) = (2.0 * x0).sin_cos();
        // d^m/dt^m cos(2x0 + 2t) at t=0 cycles through cos, −sin, −cos, sin
        let cycle = [c, -s, -c, s];
        let mut scale = 1.0;
        for (m, slot) in out.iter_mut().enumerate() {
            if m > 0 {
                scale *= 2.0 / m as f64;
            }
            *slot = -2.0 * self.q * scale * cycle[m % 4];
        }
        if let Some(first) = out.first_mut() {
            *first += self.a;
        }
    }

    fn bound(&self, _lo: f64, _hi: f64) -> f64 {
        self.a.abs() + 2.0 * self.q.abs()
    }

    fn parameter_derivative(&self) -> f64 {
        1.0
    }
}

/// c(x) = c0 + slope·x, with ∂c/∂λ = `d_param`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCoefficient {
    pub c0: f64,
    pub slope: f64,
    pub d_param: f64,
}

impl Coefficient for LinearCoefficient {
    fn taylor(&self, x0: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if let Some(v) = out.get_mut(0) {
            *v = self.c0 + self.slope * x0;
        }
        if let Some(v) = out.get_mut(1) {
            *v = self.slope;
        }
    }

    fn bound(&self, lo: f64, hi: f64) -> f64 {
        (self.c0 + self.slope * lo).abs().max((self.c0 + self.slope * hi).abs())
    }

    fn parameter_derivative(&self) -> f64 {
        self.d_param
    }

    fn taylor_len(&self) -> usize {
        2
    }

    fn linear(&self) -> Option<(f64, f64)> {
        Some((self.c0, self.slope))
    }
}

fn step_size(coeff: &dyn Coefficient, lo: f64, hi: f64) -> f64 {
    let bound = coeff.bound(lo, hi);
    H_MAX.min(PHASE_PER_STEP / bound.sqrt().max(1e-300))
}

/// Advances the solution state (w, w') and, if present, its parameter
/// derivative by one step of length `h` (either sign).
fn series_step(c: &[f64; ORDER], len: usize, dc: f64, h: f64, y: &mut [f64; 2], var: Option<&mut [f64; 2]>) {
    let mut w = [0.0; ORDER];
    w[0] = y[0];
    w[1] = y[1];
    for n in 0..ORDER - 2 {
        let s: f64 = (0..=n.min(len - 1)).map(|m| c[m] * w[n - m]).sum();
        w[n + 2] = -s / ((n + 2) * (n + 1)) as f64;
    }
    *y = horner(&w, h);
    if let Some(p) = var {
        let mut v = [0.0; ORDER];
        v[0] = p[0];
        v[1] = p[1];
        for n in 0..ORDER - 2 {
            let s: f64 = (0..=n.min(len - 1)).map(|m| c[m] * v[n - m]).sum::<f64>() + dc * w[n];
            v[n + 2] = -s / ((n + 2) * (n + 1)) as f64;
        }
        *p = horner(&v, h);
    }
}

fn horner(w: &[f64; ORDER], h: f64) -> [f64; 2] {
    let mut value = 0.0;
    let mut deriv = 0.0;
    for n in (0..ORDER).rev() {
        value = value * h + w[n];
        if n > 0 {
            deriv = deriv * h + n as f64 * w[n];
        }
    }
    [value, deriv]
}

/// State of the fundamental pair: (u, u', v, v').
pub type PairState = [f64; 4];

/// Integrates the fundamental pair (u, v) from `x0` to `x1`, starting at
/// `start`. When `variational` is set, the derivatives of the state with
/// respect to the coefficient parameter are also returned (starting at 0).
pub fn propagate(
    coeff: &dyn Coefficient,
    x0: f64,
    start: PairState,
    x1: f64,
    variational: bool,
) -> (PairState, PairState) {
    let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
    if !variational {
        if let Some(airy) = coeff.linear().and_then(|(c0, s)| AiryPair::new(c0, s, x0, lo, hi)) {
            let [u, du, v, dv] = airy.eval(x1);
            let mix = |y: f64, dy: f64| [y * u + dy * v, y * du + dy * dv];
            let [a, b] = mix(start[0], start[1]);
            let [c, d] = mix(start[2], start[3]);
            return ([a, b, c, d], [0.0; 4]);
        }
    }
    let h_max = step_size(coeff, lo, hi);
    let steps = ((x1 - x0).abs() / h_max).ceil().max(1.0) as usize;
    let h = (x1 - x0) / steps as f64;
    let dc = coeff.parameter_derivative();
    let len = coeff.taylor_len().clamp(1, ORDER);
    let mut u = [start[0], start[1]];
    let mut v = [start[2], start[3]];
    let mut du = [0.0; 2];
    let mut dv = [0.0; 2];
    let mut c = [0.0; ORDER];
    for i in 0..steps {
        let x = x0 + h * i as f64;
        coeff.taylor(x, &mut c);
        if variational {
            series_step(&c, len, dc, h, &mut u, Some(&mut du));
            series_step(&c, len, dc, h, &mut v, Some(&mut dv));
        } else {
            series_step(&c, len, dc, h, &mut u, None);
            series_step(&c, len, dc, h, &mut v, None);
        }
    }
    ([u[0], u[1], v[0], v[1]], [du[0], du[1], dv[0], dv[1]])
}

/// Unit-Wronskian fundamental pair u(x0)=1, u'(x0)=0, v(x0)=0, v'(x0)=1,
/// tabulated on [lo, hi] for repeated evaluation.
#[derive(Clone)]
pub struct FundamentalPair {
    coeff: Arc<dyn Coefficient>,
    origin: f64,
    nodes: Vec<f64>,
    states: Vec<PairState>,
    airy: Option<AiryPair>,
}

impl fmt::Debug for FundamentalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FundamentalPair")
            .field("coeff", &self.coeff)
            .field("origin", &self.origin)
            .field("range", &(self.lo(), self.hi()))
            .finish()
    }
}

impl PartialEq for FundamentalPair {
    fn eq(&self, other: &Self) -> bool {
        self.origin == other.origin && self.nodes == other.nodes && self.states == other.states && self.airy == other.airy
    }
}

impl FundamentalPair {
    pub fn new(coeff: Arc<dyn Coefficient>, origin: f64, lo: f64, hi: f64) -> Self {
        let lo = lo.min(origin);
        let hi = hi.max(origin);
        if let Some(airy) = coeff.linear().and_then(|(c0, s)| AiryPair::new(c0, s, origin, lo, hi)) {
            return FundamentalPair {
                coeff,
                origin,
                nodes: vec![lo, hi],
                states: Vec::new(),
                airy: Some(airy),
            };
        }
        let h_max = step_size(coeff.as_ref(), lo, hi);
        let len = coeff.taylor_len().clamp(1, ORDER);
        let mut c = [0.0; ORDER];

        let mut march = |to: f64| -> (Vec<f64>, Vec<PairState>) {
            let steps = ((to - origin).abs() / h_max).ceil() as usize;
            let mut xs = Vec::with_capacity(steps);
            let mut ys = Vec::with_capacity(steps);
            if steps == 0 {
                return (xs, ys);
            }
            let h = (to - origin) / steps as f64;
            let mut u = [1.0, 0.0];
            let mut v = [0.0, 1.0];
            for i in 0..steps {
                coeff.taylor(origin + h * i as f64, &mut c);
                series_step(&c, len, 0.0, h, &mut u, None);
                series_step(&c, len, 0.0, h, &mut v, None);
                xs.push(origin + h * (i + 1) as f64);
                ys.push([u[0], u[1], v[0], v[1]]);
            }
            (xs, ys)
        };
        let (left_x, left_y) = march(lo);
        let (right_x, right_y) = march(hi);
        let mut nodes: Vec<f64> = left_x.into_iter().rev().collect();
        let mut states: Vec<PairState> = left_y.into_iter().rev().collect();
        nodes.push(origin);
        states.push([1.0, 0.0, 0.0, 1.0]);
        nodes.extend(right_x);
        states.extend(right_y);
        FundamentalPair {
            coeff,
            origin,
            nodes,
            states,
            airy: None,
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn coefficient(&self) -> &dyn Coefficient {
        self.coeff.as_ref()
    }

    /// (u, u', v, v') at x.
    pub fn eval(&self, x: f64) -> Result<PairState> {
        let tol = 1e-12 * (1.0 + x.abs());
        if !(x >= self.lo() - tol && x <= self.hi() + tol) {
            return Err(Error::OutOfDomain(format!(
                "x = {x} outside tabulated range [{}, {}]",
                self.lo(),
                self.hi()
            )));
        }
        if let Some(airy) = &self.airy {
            return Ok(airy.eval(x));
        }
        let i = match self.nodes.binary_search_by(|n| n.total_cmp(&x)) {
            Ok(i) => return Ok(self.states[i]),
            Err(i) => {
                if i == 0 {
                    0
                } else if i == self.nodes.len() || x - self.nodes[i - 1] < self.nodes[i] - x {
                    i - 1
                } else {
                    i
                }
            }
        };
        let x0 = self.nodes[i];
        let s = self.states[i];
        let mut c = [0.0; ORDER];
        let len = self.coeff.taylor_len().clamp(1, ORDER);
        self.coeff.taylor(x0, &mut c);
        let mut u = [s[0], s[1]];
        let mut v = [s[2], s[3]];
        series_step(&c, len, 0.0, x - x0, &mut u, None);
        series_step(&c, len, 0.0, x - x0, &mut v, None);
        Ok([u[0], u[1], v[0], v[1]])
    }
}
