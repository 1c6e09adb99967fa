use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// A sign-change enclosing interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Evaluates `f` at both ends and checks that a sign change is enclosed.
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let bracket = Bracket {
            lo,
            hi,
            f_lo: f(lo),
            f_hi: f(hi),
        };
        bracket.check()?;
        Ok(bracket)
    }

    fn check(&self) -> Result<()> {
        if !(self.lo < self.hi) || !(self.f_lo * self.f_hi <= 0.0) {
            return Err(Error::NoSignChange {
                lo: self.lo,
                hi: self.hi,
                f_lo: self.f_lo,
                f_hi: self.f_hi,
            });
        }
        Ok(())
    }
}

/// Brent's method. The returned root is enclosed by a sign-change interval
/// of width at most `tol` (down to the f64 resolution at the root).
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: &Bracket, tol: f64) -> Result<f64> {
    bracket.check()?;
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = bracket.f_lo;
    let mut fb = bracket.f_hi;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERATIONS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::MaxIterations {
        iterations: MAX_ITERATIONS,
    })
}

/// Scans `[lo, hi]` on a uniform grid with `points_per_unit` samples per
/// unit length and returns every sign-change bracket.
///
/// Non-finite samples break the chain so that poles of `f` are not
/// reported as roots.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points_per_unit: f64) -> Vec<Bracket> {
    if !(hi > lo) {
        return Vec::new();
    }
    let n = (((hi - lo) * points_per_unit).ceil() as usize).max(2);
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for i in 1..=n {
        let x = if i == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / n as f64
        };
        let fx = f(x);
        if prev_f.is_finite() && fx.is_finite() && prev_f * fx <= 0.0 && !(prev_f == 0.0 && i > 1) {
            out.push(Bracket {
                lo: prev_x,
                hi: x,
                f_lo: prev_f,
                f_hi: fx,
            });
        }
        prev_x = x;
        prev_f = fx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let f = |x: f64| x * x - 2.0;
        let b = Bracket::new(f, 1.0, 2.0).unwrap();
        let r = find_root(f, &b, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(
            Bracket::new(f, -1.0, 1.0),
            Err(Error::NoSignChange { .. })
        ));
        let bad = Bracket {
            lo: 0.0,
            hi: 1.0,
            f_lo: 1.0,
            f_hi: 2.0,
        };
        assert!(find_root(f, &bad, 1e-10).is_err());
    }

    #[test]
    fn deterministic_and_bracketed() {
        let f = |x: f64| x.cos() - x;
        let b = Bracket::new(f, 0.0, 1.0).unwrap();
        let tol = 1e-10;
        let r1 = find_root(f, &b, tol).unwrap();
        let r2 = find_root(f, &b, tol).unwrap();
        assert_eq!(r1.to_bits(), r2.to_bits());
        assert!(f(r1 - tol) * f(r1 + tol) <= 0.0);
    }

    #[test]
    fn scan_finds_all_sine_roots() {
        let brackets = scan_roots(|x: f64| x.sin(), 0.5, 20.0, 50.0);
        assert_eq!(brackets.len(), 6);
    }
}
