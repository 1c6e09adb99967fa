use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar types the quadrature routines can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// A point the integrand must not be sampled at, approached symmetrically
/// from both sides starting at `margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcludedPoint {
    pub location: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: usize,
    /// Points inside (a, b) excluded with shrinking symmetric margins;
    /// points outside the interval are ignored.
    pub excluded_points: Vec<ExcludedPoint>,
    /// First cutoff for semi-infinite integrals.
    pub initial_cutoff: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_depth: 40,
            excluded_points: Vec::new(),
            initial_cutoff: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::OutOfDomain("quadrature tolerances must be positive".into()));
        }
        if self.excluded_points.iter().any(|p| !(p.margin > 0.0)) {
            return Err(Error::OutOfDomain("exclusion margins must be positive".into()));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    /// Final cutoff used for a semi-infinite upper limit.
    pub cutoff: Option<f64>,
    /// Smallest margin reached around each excluded point.
    pub final_margins: Vec<f64>,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980484630,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    abs: f64,
    depth: usize,
}

fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = T::zero();
    let mut abs = fc.magnitude() * WGK[10];
    let mut samples = [T::zero(); 21];
    samples[10] = fc;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[j] = f1;
        samples[20 - j] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        abs += (f1.magnitude() + f2.magnitude()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    // mean deviation, QUADPACK style error scaling
    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        asc += WGK[j] * ((samples[j] - mean).magnitude() + (samples[20 - j] - mean).magnitude());
    }
    let asc = asc * half.abs();
    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).magnitude();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let abs = abs * half.abs();
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs);
    }
    (value, err, abs)
}

/// Globally adaptive Gauss-Kronrod (21-point) on a finite interval.
/// Returns (value, error, ∫|f|, evaluations).
fn adaptive<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(T, f64, f64, usize)> {
    if a == b {
        return Ok((T::zero(), 0.0, 0.0, 0));
    }
    let (v, e, s) = gk21(f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value: v,
        error: e,
        abs: s,
        depth: 0,
    }];
    let mut evaluations = 21;
    loop {
        let total = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let total_abs: f64 = segments.iter().map(|s| s.abs).sum();
        if total_err <= spec.tolerance(total.magnitude()) {
            return Ok((total, total_err, total_abs, evaluations));
        }
        let worst = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < spec.max_depth)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(Error::NonConvergence {
                estimate: total.magnitude(),
                error: total_err,
            });
        };
        let seg = segments.swap_remove(i);
        let mid = 0.5 * (seg.a + seg.b);
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            let (v, e, s) = gk21(f, lo, hi);
            segments.push(Segment {
                a: lo,
                b: hi,
                value: v,
                error: e,
                abs: s,
                depth: seg.depth + 1,
            });
        }
        evaluations += 42;
        if segments.len() > 200_000 {
            return Err(Error::NonConvergence {
                estimate: total.magnitude(),
                error: total_err,
            });
        }
    }
}

/// Integrates over [a, b] with excluded points approached from both sides
/// by halving margins, with Aitken extrapolation on the partial sums.
fn finite_with_exclusions<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    let mut points: Vec<ExcludedPoint> = spec
        .excluded_points
        .iter()
        .copied()
        .filter(|p| p.location > a && p.location < b)
        .collect();
    points.sort_by(|x, y| x.location.total_cmp(&y.location));

    if points.is_empty() {
        let (value, error, _, evaluations) = adaptive(f, a, b, spec)?;
        return Ok(QuadResult {
            value,
            error,
            cutoff: None,
            final_margins: Vec::new(),
            evaluations,
        });
    }

    // margins may not overlap neighbouring points or the interval ends
    let mut margins: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let left = if i == 0 { p.location - a } else { 0.5 * (p.location - points[i - 1].location) };
            let right = if i + 1 == points.len() { b - p.location } else { 0.5 * (points[i + 1].location - p.location) };
            p.margin.min(0.5 * left).min(0.5 * right)
        })
        .collect();

    let piece_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / (4.0 * (points.len() + 1) as f64),
        ..spec.clone()
    };
    let mut evaluations = 0;
    let mut error = 0.0;
    let mut sum = T::zero();
    let mut lo = a;
    for (p, m) in points.iter().zip(&margins) {
        let (v, e, _, n) = adaptive(f, lo, p.location - m, &piece_spec)?;
        sum = sum + v;
        error += e;
        evaluations += n;
        lo = p.location + m;
    }
    let (v, e, _, n) = adaptive(f, lo, b, &piece_spec)?;
    sum = sum + v;
    error += e;
    evaluations += n;

    let mut partial = vec![sum];
    let mut extrapolated: Vec<T> = Vec::new();
    for _ in 0..60 {
        let mut increment = T::zero();
        for (p, m) in points.iter().zip(margins.iter_mut()) {
            let half = 0.5 * *m;
            let (v1, e1, _, n1) = adaptive(f, p.location - *m, p.location - half, &piece_spec)?;
            let (v2, e2, _, n2) = adaptive(f, p.location + half, p.location + *m, &piece_spec)?;
            increment = increment + v1 + v2;
            error += e1 + e2;
            evaluations += n1 + n2;
            *m = half;
        }
        sum = sum + increment;
        partial.push(sum);
        let k = partial.len();
        let estimate = if k >= 3 {
            let (s0, s1, s2) = (partial[k - 3], partial[k - 2], partial[k - 1]);
            let d1 = s1 - s0;
            let d2 = s2 - s1;
            let denom = d2 - d1;
            if denom.magnitude() > 1e-300 && d2.magnitude() > 0.0 {
                let ratio = d2.magnitude() / d1.magnitude().max(1e-300);
                if ratio < 0.95 {
                    // geometric tail d2 · r/(1-r) with r estimated from the last two increments
                    s2 + d2 * (ratio / (1.0 - ratio))
                } else {
                    s2
                }
            } else {
                s2
            }
        } else {
            sum
        };
        extrapolated.push(estimate);
        let n = extrapolated.len();
        let tol = spec.tolerance(estimate.magnitude());
        let settled_raw = increment.magnitude() < 0.1 * tol;
        let settled_extrapolated =
            n >= 3 && (extrapolated[n - 1] - extrapolated[n - 2]).magnitude() < 0.1 * tol
                && (extrapolated[n - 2] - extrapolated[n - 3]).magnitude() < tol;
        if settled_raw || settled_extrapolated {
            let spread = if n >= 2 { (extrapolated[n - 1] - extrapolated[n - 2]).magnitude() } else { 0.0 };
            return Ok(QuadResult {
                value: estimate,
                error: error + spread,
                cutoff: None,
                final_margins: margins,
                evaluations,
            });
        }
    }
    Err(Error::NonConvergence {
        estimate: sum.magnitude(),
        error: increment_floor(&partial),
    })
}

fn increment_floor<T: QuadValue>(partial: &[T]) -> f64 {
    let k = partial.len();
    if k < 2 {
        return f64::INFINITY;
    }
    (partial[k - 1] - partial[k - 2]).magnitude()
}

/// Adaptive quadrature of `f` over [a, b].
///
/// `b = +∞` is handled by integrating to a cutoff K and doubling K until
/// ∫_K^{2K} |f| < abs_tol / 10; the final cutoff is returned in the result.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    spec.validate()?;
    if !(a < b) || a.is_infinite() {
        return Err(Error::OutOfDomain(format!("integration interval [{a}, {b}] must satisfy a < b, a finite")));
    }
    if b.is_finite() {
        return finite_with_exclusions(&f, a, b, spec);
    }

    let mut cutoff = spec
        .initial_cutoff
        .unwrap_or(if a >= 0.0 { (2.0 * a).max(a + 1.0) } else { 1.0 })
        .max(a + f64::EPSILON);
    let mut head = finite_with_exclusions(&f, a, cutoff, spec)?;
    let tail_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / 20.0,
        ..spec.clone()
    };
    for _ in 0..64 {
        let next = 2.0 * cutoff;
        let piece = finite_with_exclusions(&f, cutoff, next, &tail_spec)?;
        let (_, _, abs_piece, n) = adaptive(&f, cutoff, next, &tail_spec)?;
        head.value = head.value + piece.value;
        head.error += piece.error;
        head.evaluations += piece.evaluations + n;
        cutoff = next;
        if abs_piece < spec.abs_tol / 10.0 {
            head.cutoff = Some(cutoff);
            head.error += abs_piece;
            return Ok(head);
        }
    }
    Err(Error::NonConvergence {
        estimate: head.value.magnitude(),
        error: head.error,
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature node with its weight (already including any Jacobian of
/// the variable map).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub x: f64,
    pub w: f64,
}

/// Composite Gauss-Legendre nodes on `panels` equal panels of [lo, hi].
pub fn panel_nodes(lo: f64, hi: f64, panels: usize, order: usize) -> Vec<QuadNode> {
    let (t, w) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lo + h * p as f64;
        for (ti, wi) in t.iter().zip(&w) {
            out.push(QuadNode {
                x: a + 0.5 * h * (ti + 1.0),
                w: 0.5 * h * wi,
            });
        }
    }
    out
}

/// Nodes for integrands with inverse-square-root singularities at both
/// ends: x = lo + (hi − lo)(1 − cos θ)/2, Gauss-Legendre in θ ∈ [0, π].
pub fn cosine_map_nodes(lo: f64, hi: f64, order: usize) -> Vec<QuadNode> {
    cosine_map_panels(lo, hi, 1, order)
}

/// As [`cosine_map_nodes`], with θ ∈ [0, π] split into `panels` equal panels.
pub fn cosine_map_panels(lo: f64, hi: f64, panels: usize, order: usize) -> Vec<QuadNode> {
    let (t, w) = gauss_legendre(order);
    let half = 0.5 * (hi - lo);
    let dtheta = PI / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = dtheta * p as f64;
        for (ti, wi) in t.iter().zip(&w) {
            let theta = a + 0.5 * dtheta * (ti + 1.0);
            out.push(QuadNode {
                x: lo + half * (1.0 - theta.cos()),
                w: half * theta.sin() * 0.5 * dtheta * wi,
            });
        }
    }
    out
}

/// Nodes for an inverse-square-root singularity at `lo` only:
/// x = lo + (hi − lo) u², Gauss-Legendre in u ∈ [0, 1].
pub fn sqrt_map_nodes(lo: f64, hi: f64, order: usize) -> Vec<QuadNode> {
    let (t, w) = gauss_legendre(order);
    let len = hi - lo;
    t.iter()
        .zip(&w)
        .map(|(ti, wi)| {
            let u = 0.5 * (ti + 1.0);
            QuadNode {
                x: lo + len * u * u,
                w: len * 2.0 * u * 0.5 * wi,
            }
        })
        .collect()
}

/// ∫ over a spectral band [lo, hi] whose integrand carries a Van Hove
/// (inverse square root) singularity at each edge. The endpoint map keeps
/// every sample strictly inside the band.
pub fn integrate_band<T: QuadValue, F: Fn(f64) -> T>(f: F, lo: f64, hi: f64, order: usize) -> T {
    cosine_map_nodes(lo, hi, order)
        .iter()
        .fold(T::zero(), |acc, n| acc + f(n.x) * n.w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sine_squared() {
        let r = integrate(|x: f64| x.sin().powi(2), 0.0, PI, &QuadratureSpec::default()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn identity_integrand_sigma_one_and_five() {
        for sigma in [1.0, 5.0] {
            let f = move |k: f64| {
                let u = k * sigma;
                let t = 0.5 * (PI - u);
                let sinc = if t.abs() < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
                8.0 * PI * sigma * 0.25 * sinc * sinc / (PI + u).powi(2)
            };
            let spec = QuadratureSpec::with_tolerances(1e-11, 1e-11);
            let r = integrate(f, 0.0, f64::INFINITY, &spec).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "sigma {sigma}: {}", r.value);
            assert!(r.cutoff.is_some());
        }
    }

    #[test]
    fn complex_integrand() {
        let r = integrate(
            |x: f64| Complex64::new(0.0, 3.0 * x).exp(),
            0.0,
            2.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 6.0).exp() - 1.0) / Complex64::new(0.0, 3.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn excluded_inverse_sqrt_singularity() {
        // ∫_0^2 |x-1|^{-1/2} dx = 4
        let spec = QuadratureSpec {
            excluded_points: vec![ExcludedPoint { location: 1.0, margin: 1e-2 }],
            ..QuadratureSpec::with_tolerances(1e-9, 1e-9)
        };
        let r = integrate(|x: f64| 1.0 / (x - 1.0).abs().sqrt(), 0.0, 2.0, &spec).unwrap();
        assert!((r.value - 4.0).abs() < 1e-7, "{}", r.value);
        assert!(r.final_margins[0] < 1e-2);
    }

    #[test]
    fn excluded_points_outside_are_ignored() {
        let spec = QuadratureSpec {
            excluded_points: vec![ExcludedPoint { location: 5.0, margin: 0.1 }],
            ..Default::default()
        };
        let r = integrate(|x: f64| x, 0.0, 1.0, &spec).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);
        assert!(r.final_margins.is_empty());
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec { abs_tol: 0.0, ..Default::default() };
        assert!(integrate(|x: f64| x, 0.0, 1.0, &spec).is_err());
        let spec = QuadratureSpec {
            excluded_points: vec![ExcludedPoint { location: 0.5, margin: 0.0 }],
            ..Default::default()
        };
        assert!(integrate(|x: f64| x, 0.0, 1.0, &spec).is_err());
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let spec = QuadratureSpec { max_depth: 2, ..QuadratureSpec::with_tolerances(1e-14, 1e-14) };
        match integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &spec) {
            Err(Error::NonConvergence { estimate, error }) => {
                assert!(estimate.is_finite() && error > 0.0)
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn band_map_handles_edge_singularities() {
        // ∫_0^1 dx / sqrt(x(1-x)) = π
        let v: f64 = integrate_band(|x: f64| 1.0 / (x * (1.0 - x)).sqrt(), 0.0, 1.0, 16);
        assert!((v - PI).abs() < 1e-12);
        let s: f64 = sqrt_map_nodes(0.0, 1.0, 16).iter().map(|n| n.w / n.x.sqrt()).sum();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_rule_weights() {
        for n in [1, 2, 7, 16, 40] {
            let (x, w) = gauss_legendre(n);
            let sw: f64 = w.iter().sum();
            assert!((sw - 2.0).abs() < 1e-13);
            // exact for degree 2n-1
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * (n as i32) - 2)).sum();
            assert!((m - 2.0 / (2 * n - 1) as f64).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn polynomials_up_to_degree_ten_exact(coeffs in proptest::collection::vec(-10.0f64..10.0, 11)) {
            let f = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
            let exact: f64 = coeffs.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).sum();
            let r = integrate(f, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
            prop_assert!((r.value - exact).abs() < 1e-12);
        }
    }
}
