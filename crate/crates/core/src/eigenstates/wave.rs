//! Piecewise wavefunctions with closed-form (or tabulated numerical)
//! bases on each coordinate region.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::exp_integral;
use crate::numerics::quadrature::gauss_legendre;
use crate::numerics::taylor::FundamentalPair;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Local basis of a region, in the coordinate X = x − origin.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// c₀·cos kX + c₁·sin kX
    Trig { k: f64 },
    /// c₀·e^{kX} + c₁·e^{−kX}
    Hyperbolic { k: f64 },
    /// c₀·e^{ikX} + c₁·e^{−ikX}
    ComplexExp { k: f64 },
    /// c₀·u(x) + c₁·v(x) for a tabulated unit-Wronskian pair (absolute x,
    /// the region origin is ignored).
    Numerical(Arc<FundamentalPair>),
    /// c₀·Σ tₘ·e^{i(κ + g·m)X} over m = m_lo, m_lo + 1, … (plane-wave
    /// expansion of a Bloch state; c₁ is unused).
    Fourier { kappa: f64, g: f64, m_lo: i64, terms: Arc<Vec<Complex64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub x_lo: f64,
    pub x_hi: f64,
    pub origin: f64,
    pub basis: Basis,
    pub coeffs: [Complex64; 2],
}

/// Evaluation rule outside the listed regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extension {
    /// The wave vanishes (hard walls, compactly supported states).
    Zero,
    /// Evaluation is not defined (returns NaN).
    Undefined,
    /// ψ(x + n·period) = e^{iκ·n·period}·ψ(x), regions tile one cell
    /// starting at `cell_lo`.
    Bloch { kappa: f64, period: f64, cell_lo: f64 },
}

/// Local wavenumber scale of a basis, used to size quadrature panels.
fn wavenumber(basis: &Basis) -> f64 {
    match basis {
        Basis::Trig { k } | Basis::Hyperbolic { k } | Basis::ComplexExp { k } => k.abs(),
        Basis::Numerical(pair) => pair.coefficient().bound(pair.lo(), pair.hi()).sqrt(),
        Basis::Fourier { kappa, g, m_lo, terms } => {
            let first = kappa + g * *m_lo as f64;
            first.abs().max((first + g * terms.len() as f64).abs())
        }
    }
}

impl Region {
    /// Region with constant potential where c = 2(ε − V), built from ψ and
    /// ψ′ at `origin`.
    pub fn constant(x_lo: f64, x_hi: f64, origin: f64, c: f64, psi: Complex64, dpsi: Complex64) -> Region {
        let k = c.abs().sqrt().max(1e-9);
        let (basis, coeffs) = if c >= 0.0 {
            (Basis::Trig { k }, [psi, dpsi / k])
        } else {
            (Basis::Hyperbolic { k }, [(psi + dpsi / k) * 0.5, (psi - dpsi / k) * 0.5])
        };
        Region { x_lo, x_hi, origin, basis, coeffs }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi
    }

    /// (ψ, ψ′) at x (x taken literally, no range check).
    pub fn value_and_derivative(&self, x: f64) -> (Complex64, Complex64) {
        let [c0, c1] = self.coeffs;
        let xx = x - self.origin;
        match &self.basis {
            Basis::Trig { k } => {
                let (s, c) = (k * xx).sin_cos();
                (c0 * c + c1 * s, (c1 * c - c0 * s) * *k)
            }
            Basis::Hyperbolic { k } => {
                let (ep, em) = if c1 == ZERO {
                    ((k * xx).exp(), 0.0)
                } else if c0 == ZERO {
                    (0.0, (-k * xx).exp())
                } else {
                    ((k * xx).exp(), (-k * xx).exp())
                };
                (c0 * ep + c1 * em, (c0 * ep - c1 * em) * *k)
            }
            Basis::ComplexExp { k } => {
                let e = Complex64::from_polar(1.0, k * xx);
                let em = e.conj();
                (c0 * e + c1 * em, (c0 * e - c1 * em) * I * *k)
            }
            Basis::Numerical(pair) => {
                let s = pair.eval(x).unwrap_or([f64::NAN; 4]);
                (c0 * s[0] + c1 * s[2], c0 * s[1] + c1 * s[3])
            }
            Basis::Fourier { kappa, g, m_lo, terms } => {
                let q0 = kappa + g * *m_lo as f64;
                let mut wave = Complex64::from_polar(1.0, q0 * xx);
                let step = Complex64::from_polar(1.0, g * xx);
                let (mut v, mut d) = (ZERO, ZERO);
                for (j, t) in terms.iter().enumerate() {
                    let term = t * wave;
                    v += term;
                    d += term * (q0 + g * j as f64);
                    wave *= step;
                }
                (c0 * v, c0 * d * I)
            }
        }
    }

    /// amplitude·e^{rate·(x − origin)} terms for analytic bases.
    fn exp_terms(&self) -> Option<Vec<(Complex64, Complex64)>> {
        let [c0, c1] = self.coeffs;
        match &self.basis {
            Basis::Trig { k } => Some(vec![((c0 - I * c1) * 0.5, I * *k), ((c0 + I * c1) * 0.5, -I * *k)]),
            Basis::Hyperbolic { k } => Some(vec![(c0, Complex64::new(*k, 0.0)), (c1, Complex64::new(-k, 0.0))]),
            Basis::ComplexExp { k } => Some(vec![(c0, I * *k), (c1, -I * *k)]),
            Basis::Numerical(_) => None,
            Basis::Fourier { kappa, g, m_lo, terms } => Some(
                terms
                    .iter()
                    .enumerate()
                    .map(|(j, t)| (c0 * t, I * (kappa + g * (*m_lo + j as i64) as f64)))
                    .collect(),
            ),
        }
    }
}

/// A region placed at an offset (Bloch copies), with a phase multiplier.
struct Piece<'a> {
    region: &'a Region,
    shift: f64,
    phase: Complex64,
    lo: f64,
    hi: f64,
}

impl Piece<'_> {
    fn eval(&self, x: f64) -> Complex64 {
        self.region.value_and_derivative(x - self.shift).0 * self.phase
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseWave {
    pub regions: Vec<Region>,
    pub extension: Extension,
}

impl PiecewiseWave {
    /// Validates that regions are ordered and tile their support.
    pub fn new(regions: Vec<Region>, extension: Extension) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::OutOfDomain("a wave needs at least one region".into()));
        }
        for r in &regions {
            if !(r.x_lo < r.x_hi) {
                return Err(Error::OutOfDomain(format!("empty region [{}, {}]", r.x_lo, r.x_hi)));
            }
        }
        for w in regions.windows(2) {
            if w[0].x_hi != w[1].x_lo {
                return Err(Error::OutOfDomain(format!(
                    "regions must tile the support: gap or overlap at {} / {}",
                    w[0].x_hi, w[1].x_lo
                )));
            }
        }
        if let Extension::Bloch { period, cell_lo, .. } = extension {
            let lo = regions[0].x_lo;
            let hi = regions[regions.len() - 1].x_hi;
            if (lo - cell_lo).abs() > 1e-12 || (hi - lo - period).abs() > 1e-12 * period.max(1.0) {
                return Err(Error::OutOfDomain("Bloch regions must tile exactly one period".into()));
            }
        }
        Ok(PiecewiseWave { regions, extension })
    }

    pub fn support(&self) -> (f64, f64) {
        match self.extension {
            Extension::Bloch { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (self.regions[0].x_lo, self.regions[self.regions.len() - 1].x_hi),
        }
    }

    /// Interior region boundaries of the listed regions.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.regions.windows(2).map(|w| w[0].x_hi).collect()
    }

    fn locate(&self, x: f64) -> Option<&Region> {
        // right-continuous at breakpoints
        let idx = self.regions.partition_point(|r| r.x_hi <= x);
        if idx < self.regions.len() && self.regions[idx].contains(x) {
            return Some(&self.regions[idx]);
        }
        let last = &self.regions[self.regions.len() - 1];
        if x == last.x_hi {
            return Some(last);
        }
        None
    }

    /// (ψ, ψ′) at x.
    pub fn eval_with_derivative(&self, x: f64) -> (Complex64, Complex64) {
        if let Extension::Bloch { kappa, period, cell_lo } = self.extension {
            let n = ((x - cell_lo) / period).floor();
            let local = x - n * period;
            let phase = Complex64::from_polar(1.0, kappa * n * period);
            let region = self.locate(local).unwrap_or(&self.regions[self.regions.len() - 1]);
            let (v, d) = region.value_and_derivative(local);
            return (v * phase, d * phase);
        }
        match self.locate(x) {
            Some(r) => r.value_and_derivative(x),
            None => match self.extension {
                Extension::Zero => (ZERO, ZERO),
                _ => (Complex64::new(f64::NAN, f64::NAN), Complex64::new(f64::NAN, f64::NAN)),
            },
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_with_derivative(x).0
    }

    /// Left and right limits of (ψ, ψ′) at a region boundary.
    pub fn one_sided_limits(&self, x: f64) -> Option<((Complex64, Complex64), (Complex64, Complex64))> {
        let i = self.regions.iter().position(|r| r.x_hi == x)?;
        let right = self.regions.get(i + 1)?;
        Some((self.regions[i].value_and_derivative(x), right.value_and_derivative(x)))
    }

    pub fn scale(&mut self, factor: Complex64) {
        for r in &mut self.regions {
            r.coeffs[0] *= factor;
            r.coeffs[1] *= factor;
        }
    }

    /// Regions (and Bloch copies) overlapping [lo, hi], clipped.
    fn pieces(&self, lo: f64, hi: f64) -> Vec<Piece<'_>> {
        let mut out = Vec::new();
        match self.extension {
            Extension::Bloch { kappa, period, cell_lo } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return out;
                }
                let first = ((lo - cell_lo) / period).floor() as i64;
                let last = ((hi - cell_lo) / period).floor() as i64;
                for n in first..=last {
                    let shift = n as f64 * period;
                    let phase = Complex64::from_polar(1.0, kappa * shift);
                    for r in &self.regions {
                        let a = (r.x_lo + shift).max(lo);
                        let b = (r.x_hi + shift).min(hi);
                        if a < b {
                            out.push(Piece { region: r, shift, phase, lo: a, hi: b });
                        }
                    }
                }
            }
            _ => {
                for r in &self.regions {
                    let a = r.x_lo.max(lo);
                    let b = r.x_hi.min(hi);
                    if a < b {
                        out.push(Piece { region: r, shift: 0.0, phase: Complex64::new(1.0, 0.0), lo: a, hi: b });
                    }
                }
            }
        }
        out
    }

    /// ∫ conj(self)·other over [lo, hi] (clipped to both supports).
    pub fn inner(&self, other: &PiecewiseWave, lo: f64, hi: f64) -> Complex64 {
        let (s_lo, s_hi) = self.support();
        let (o_lo, o_hi) = other.support();
        let lo = lo.max(s_lo).max(o_lo);
        let hi = hi.min(s_hi).min(o_hi);
        if !(lo < hi) {
            return ZERO;
        }
        let mine = self.pieces(lo, hi);
        let theirs = other.pieces(lo, hi);
        let mut total = ZERO;
        for p in &mine {
            for q in &theirs {
                let a = p.lo.max(q.lo);
                let b = p.hi.min(q.hi);
                if a < b {
                    total += piece_inner(p, q, a, b);
                }
            }
        }
        total
    }

    /// ∫|ψ|² over [lo, hi].
    pub fn norm_sqr(&self, lo: f64, hi: f64) -> f64 {
        self.inner(self, lo, hi).re
    }

    /// Samples (x, Re ψ, Im ψ) as CSV.
    pub fn to_csv(&self, grid: &[f64]) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("x,re_psi,im_psi\n");
        for &x in grid {
            let v = self.eval(x);
            let _ = writeln!(
                out,
                "{},{},{}",
                crate::csv::fmt_num(x),
                crate::csv::fmt_num(v.re),
                crate::csv::fmt_num(v.im)
            );
        }
        out
    }
}

fn piece_inner(p: &Piece<'_>, q: &Piece<'_>, a: f64, b: f64) -> Complex64 {
    if let (Some(tp), Some(tq)) = (p.region.exp_terms(), q.region.exp_terms()) {
        let op = p.region.origin + p.shift;
        let oq = q.region.origin + q.shift;
        let mut sum = ZERO;
        for &(ap, rp) in &tp {
            if ap == ZERO {
                continue;
            }
            for &(aq, rq) in &tq {
                if aq == ZERO {
                    continue;
                }
                let t = rp.conj() + rq;
                let amp = (ap * p.phase).conj() * aq * q.phase;
                let value = if b.is_finite() && a.is_finite() {
                    let pre = (rp.conj() * (a - op) + rq * (a - oq)).exp();
                    pre * exp_integral(t, b - a)
                } else if a.is_finite() {
                    if t.re >= 0.0 {
                        return Complex64::new(f64::INFINITY, 0.0);
                    }
                    let pre = (rp.conj() * (a - op) + rq * (a - oq)).exp();
                    pre * exp_integral(t, f64::INFINITY)
                } else if b.is_finite() {
                    if t.re <= 0.0 {
                        return Complex64::new(f64::INFINITY, 0.0);
                    }
                    let pre = (rp.conj() * (b - op) + rq * (b - oq)).exp();
                    pre * exp_integral(-t, f64::INFINITY)
                } else {
                    return Complex64::new(f64::NAN, f64::NAN);
                };
                sum += amp * value;
            }
        }
        return sum;
    }
    if !(a.is_finite() && b.is_finite()) {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let k = wavenumber(&p.region.basis).max(wavenumber(&q.region.basis));
    let order = 20;
    // one period of the fastest product term per panel
    let panels = (((b - a) * (k + 1.0)) / (2.0 * PI)).ceil().max(1.0) as usize;
    let (t, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = ZERO;
    for i in 0..panels {
        let x0 = a + h * i as f64;
        for (ti, wi) in t.iter().zip(&w) {
            let x = x0 + 0.5 * h * (ti + 1.0);
            sum += p.eval(x).conj() * q.eval(x) * (0.5 * h * wi);
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::taylor::LinearCoefficient;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_region_matches_initial_data() {
        for cc in [4.0, -4.0, 0.0] {
            let r = Region::constant(-1.0, 1.0, 0.3, cc, c(0.7, 0.2), c(-1.1, 0.5));
            let (v, d) = r.value_and_derivative(0.3);
            assert!((v - c(0.7, 0.2)).norm() < 1e-12);
            assert!((d - c(-1.1, 0.5)).norm() < 1e-9);
        }
    }

    #[test]
    fn closed_form_inner_matches_quadrature() {
        let a = PiecewiseWave::new(
            vec![
                Region { x_lo: -1.0, x_hi: 0.5, origin: 0.0, basis: Basis::Trig { k: 2.3 }, coeffs: [c(1.0, 0.0), c(0.0, 0.4)] },
                Region { x_lo: 0.5, x_hi: 2.0, origin: 0.5, basis: Basis::Hyperbolic { k: 1.1 }, coeffs: [c(0.2, 0.0), c(0.5, -0.1)] },
            ],
            Extension::Zero,
        )
        .unwrap();
        let b = PiecewiseWave::new(
            vec![Region { x_lo: -2.0, x_hi: 3.0, origin: 1.0, basis: Basis::ComplexExp { k: 0.7 }, coeffs: [c(0.3, 0.1), c(-0.2, 0.6)] }],
            Extension::Zero,
        )
        .unwrap();
        let closed = a.inner(&b, -5.0, 5.0);
        let n = 200_000;
        let mut brute = ZERO;
        let h = 3.0 / n as f64;
        for i in 0..n {
            let x = -1.0 + (i as f64 + 0.5) * h;
            brute += a.eval(x).conj() * b.eval(x) * h;
        }
        assert!((closed - brute).norm() < 1e-8, "{closed} vs {brute}");
    }

    #[test]
    fn semi_infinite_decaying_tail() {
        let w = PiecewiseWave::new(
            vec![Region { x_lo: 0.0, x_hi: f64::INFINITY, origin: 0.0, basis: Basis::Hyperbolic { k: 2.0 }, coeffs: [ZERO, c(1.0, 0.0)] }],
            Extension::Zero,
        )
        .unwrap();
        assert!((w.norm_sqr(f64::NEG_INFINITY, f64::INFINITY) - 0.25).abs() < 1e-15);
        let left = PiecewiseWave::new(
            vec![Region { x_lo: f64::NEG_INFINITY, x_hi: 0.0, origin: 0.0, basis: Basis::Hyperbolic { k: 2.0 }, coeffs: [c(1.0, 0.0), ZERO] }],
            Extension::Zero,
        )
        .unwrap();
        assert!((left.norm_sqr(f64::NEG_INFINITY, f64::INFINITY) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bloch_extension_and_numerical_basis() {
        let k: f64 = 1.9;
        let pair = Arc::new(FundamentalPair::new(
            Arc::new(LinearCoefficient { c0: k * k, slope: 0.0, d_param: 0.0 }),
            0.0,
            0.0,
            1.0,
        ));
        // e^{ikx} = u + ik·v on [0, 1)
        let wave = PiecewiseWave::new(
            vec![Region { x_lo: 0.0, x_hi: 1.0, origin: 0.0, basis: Basis::Numerical(pair), coeffs: [c(1.0, 0.0), c(0.0, k)] }],
            Extension::Bloch { kappa: k, period: 1.0, cell_lo: 0.0 },
        )
        .unwrap();
        for x in [-2.3, 0.4, 3.7] {
            assert!((wave.eval(x) - Complex64::from_polar(1.0, k * x)).norm() < 1e-11);
        }
        let plane = PiecewiseWave::new(
            vec![Region { x_lo: -10.0, x_hi: 10.0, origin: 0.0, basis: Basis::ComplexExp { k }, coeffs: [c(1.0, 0.0), ZERO] }],
            Extension::Zero,
        )
        .unwrap();
        let ip = wave.inner(&plane, -1.5, 2.5);
        assert!((ip - c(4.0, 0.0)).norm() < 1e-10, "{ip}");
    }

    #[test]
    fn tiling_is_validated() {
        let r1 = Region { x_lo: 0.0, x_hi: 1.0, origin: 0.0, basis: Basis::Trig { k: 1.0 }, coeffs: [ZERO, ZERO] };
        let r2 = Region { x_lo: 1.5, x_hi: 2.0, ..r1.clone() };
        assert!(PiecewiseWave::new(vec![r1, r2], Extension::Zero).is_err());
    }
}
