use std::f64::consts::PI;

use eigencomplete::eigenstates::{
    bloch, bound, free, onesided, orthonormality_probe, Basis, Branch, Eigenstate, Extension, Family,
    Incidence, PiecewiseWave, Region,
};
use eigencomplete::eigenstates::{bloch_state, bound_states, free_state, one_sided_comb_state};
use eigencomplete::error::Error;
use eigencomplete::numerics::gauss_legendre;
use eigencomplete::potentials::{Potential, Ramp};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// −½ψ″ + (V − ε)ψ by a five-point stencil, relative to max(1, |ψ|).
fn schrodinger_residual(state: &Eigenstate, p: &Potential, x: f64) -> f64 {
    let local = (2.0 * (state.energy - p.value(x)).abs()).sqrt();
    let h = (6e-3 / local.max(1.0)).min(1e-3);
    let f = |t: f64| state.eval(t);
    let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h);
    let r = -0.5 * d2 + (p.value(x) - state.energy) * f(x);
    r.norm() / f(x).norm().max(1.0)
}

fn away_from(breaks: &[f64], x: f64) -> bool {
    breaks.iter().all(|b| (x - b).abs() > 5e-3)
}

fn random_interior_residual(state: &Eigenstate, p: &Potential, lo: f64, hi: f64, seed: u64) -> f64 {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let breaks = p.breakpoints(lo - 1.0, hi + 1.0);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 50 {
        let x = rng.random_range(lo..hi);
        if !away_from(&breaks, x) {
            continue;
        }
        worst = worst.max(schrodinger_residual(state, p, x));
        n += 1;
    }
    worst
}

/// ∫|ψ|² by dense Gauss–Legendre panels (independent of the closed forms).
fn brute_norm(state: &Eigenstate, lo: f64, hi: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            sum += 0.5 * h * wi * state.eval(a + 0.5 * h * (xi + 1.0)).norm_sqr();
        }
    }
    sum
}

// ---------- double well ----------

#[test]
fn double_well_bound_states() {
    let p = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
    let states = bound_states(&p).unwrap();
    assert_eq!(states.len(), 2);
    assert!((states[0].energy + 2.80).abs() < 0.01);
    assert!((states[1].energy + 0.35).abs() < 0.01);
    for s in &states {
        assert!(s.junction_residual(&p) < 1e-10, "{}", s.junction_residual(&p));
        assert!((brute_norm(s, -30.0, 32.0, 4000) - 1.0).abs() < 1e-8);
        assert!(random_interior_residual(s, &p, -3.0, 5.0, 1) < 1e-6);
    }
    let overlap = states[0].wave.inner(&states[1].wave, f64::NEG_INFINITY, f64::INFINITY);
    assert!(overlap.norm() < 1e-10);
}

/// Transfer-matrix oracle: start from a pure outgoing wave on the far side
/// and propagate (ψ, ψ′) across the wells.
fn transfer_oracle(v0: f64, v1: f64, kappa: f64, incidence: Incidence) -> (Complex64, Complex64, Complex64) {
    let energy = 0.5 * kappa * kappa;
    let step = |state: [Complex64; 2], v: f64, len: f64| {
        let c = 2.0 * (energy - v);
        let q = c.sqrt();
        let (s, co) = (q * len).sin_cos();
        [state[0] * co + state[1] * s / q, -state[0] * q * s + state[1] * co]
    };
    let plane = |x: f64, dir: f64| {
        let e = Complex64::from_polar(1.0, dir * kappa * x);
        [e, I * dir * kappa * e]
    };
    let split = |y: [Complex64; 2], x: f64| {
        let ep = Complex64::from_polar(1.0, kappa * x);
        let plus = (y[0] + y[1] / (I * kappa)) * 0.5 / ep;
        let minus = (y[0] - y[1] / (I * kappa)) * 0.5 * ep;
        (plus, minus)
    };
    let amp = 1.0 / (2.0 * PI).sqrt();
    match incidence {
        Incidence::Left => {
            // G·e^{iκx} on x > 2, propagate right to left
            let y2 = plane(2.0, 1.0);
            let y1 = step(y2, -v1, -1.0);
            let y0 = step(y1, -v0, -1.0);
            let (a, b) = split(y0, 0.0);
            let s = amp / a;
            (b * s, s, a * s)
        }
        Incidence::Right => {
            let y0 = plane(0.0, -1.0);
            let y1 = step(y0, -v0, 1.0);
            let y2 = step(y1, -v1, 1.0);
            let (g, h) = split(y2, 2.0);
            let s = amp / h;
            (g * s, s, h * s)
        }
    }
}

#[test]
fn double_well_free_matches_transfer_oracle() {
    let (v0, v1) = (4.27, 1.43);
    for &kappa in &[0.3, 1.0, 2.0, 3.7, 8.0] {
        let c = free::dw_coefficients(v0, v1, kappa, Incidence::Left).unwrap();
        let (b, g, a) = transfer_oracle(v0, v1, kappa, Incidence::Left);
        assert!((c[1] - b).norm() < 1e-12 && (c[6] - g).norm() < 1e-12 && (c[0] - a).norm() < 1e-12);
        // flux and sum rules
        let amp2 = 1.0 / (2.0 * PI);
        assert!((c[6].norm_sqr() - (c[0].norm_sqr() - c[1].norm_sqr())).abs() < 1e-10);
        assert!((c[0].norm_sqr() + c[1].norm_sqr() + c[6].norm_sqr() - 1.0 / PI).abs() < 1e-10);
        assert!((c[0].norm_sqr() - amp2).abs() < 1e-15 && c[7].norm() == 0.0);

        let c = free::dw_coefficients(v0, v1, kappa, Incidence::Right).unwrap();
        let (refl, a_left, h) = transfer_oracle(v0, v1, kappa, Incidence::Right);
        assert!((c[6] - refl).norm() < 1e-12 && (c[1] - a_left).norm() < 1e-12 && (c[7] - h).norm() < 1e-12);
        assert!((c[1].norm_sqr() - (c[7].norm_sqr() - c[6].norm_sqr())).abs() < 1e-10);
        assert!((c[7].norm_sqr() + c[6].norm_sqr() + c[1].norm_sqr() - 1.0 / PI).abs() < 1e-10);
        assert!(c[0].norm() == 0.0);
    }
}

#[test]
fn double_well_free_states_solve_the_equation() {
    let p = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
    for (i, &e) in [0.05, 2.0, 11.0].iter().enumerate() {
        for fam in [Family::DwFreeLeft, Family::DwFreeRight] {
            let s = free_state(&p, e, fam).unwrap();
            assert_eq!(s.family, fam);
            assert!(s.junction_residual(&p) < 1e-10);
            assert!(random_interior_residual(&s, &p, -4.0, 6.0, i as u64) < 1e-6);
        }
    }
    assert!(matches!(free_state(&p, -1.0, Family::DwFreeLeft), Err(Error::OutOfSpectrum { .. })));
    assert!(matches!(free_state(&p, 1.0, Family::StepPsi1), Err(Error::UnknownFamily { .. })));
}

#[test]
fn bound_and_free_overlap_vanishes() {
    let p = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
    let bound = bound_states(&p).unwrap();
    let f = free_state(&p, 2.0, Family::DwFreeLeft).unwrap();
    let report = orthonormality_probe(&bound[0], &f, &[10.0, 20.0, 40.0]);
    for z in &report.overlaps {
        assert!(z.norm() < 1e-8, "{z}");
    }
}

// ---------- step ----------

/// The one-parameter pair above the barrier, s = √π·F ∈ [0, 1] and phases
/// θ, φ. Coefficients are (cos left, sin left, cos right, sin right).
fn step_pair(k: f64, beta: f64, s: f64, theta: f64, phi: f64) -> ([Complex64; 4], [Complex64; 4]) {
    let t = (1.0 - s * s).sqrt();
    let unit = (2.0 * k * k / (PI * (beta * beta + k * k))).sqrt();
    let g = Complex64::from_polar(t * unit, theta);
    let f = Complex64::from(s / PI.sqrt());
    let psi1 = [f, g * beta / k, f, g];
    let f2 = Complex64::from_polar(t / PI.sqrt(), phi);
    let g2 = -Complex64::from_polar(s * unit, phi + theta);
    let psi2 = [f2, g2 * beta / k, f2, g2];
    (psi1, psi2)
}

#[test]
fn step_pair_identities() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let v0: f64 = rng.random_range(0.1..5.0);
        let k0 = (2.0 * v0).sqrt();
        let k = k0 + rng.random_range(0.01..6.0);
        let beta = (k * k - k0 * k0).sqrt();
        let s = rng.random_range(0.0..1.0);
        let theta = rng.random_range(0.0..2.0 * PI);
        let phi = rng.random_range(0.0..2.0 * PI);
        let (p1, p2) = step_pair(k, beta, s, theta, phi);
        for c in [&p1, &p2] {
            // continuity of ψ and ψ′ at 0
            assert!((c[0] - c[2]).norm() < 1e-12);
            assert!((c[1] * k - c[3] * beta).norm() < 1e-12);
            // density sum rule
            let s: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            assert!((s - 2.0 / PI).abs() < 1e-10, "{s}");
        }
        // orthogonality identity
        let o: Complex64 = (0..4).map(|i| p1[i].conj() * p2[i]).sum();
        assert!(o.norm() < 1e-10);
    }
}

#[test]
fn step_fixed_states_match_closed_forms() {
    let v0 = 2.645;
    let p = Potential::Step { v0 };
    let k0 = (2.0 * v0).sqrt();
    for &k in &[k0 + 0.1, 3.0, 7.5] {
        let beta = (k * k - k0 * k0).sqrt();
        let (p1, p2) = step_pair(k, beta, 1.0, 0.0, 0.0);
        let s1 = free_state(&p, 0.5 * k * k, Family::StepPsi1).unwrap();
        let s2 = free_state(&p, 0.5 * k * k, Family::StepPsi2).unwrap();
        // πF² = 1 leaves no sin component in ψ¹ and no cos component in ψ²
        assert!(p1[1].norm() < 1e-15 && p2[0].norm() < 1e-15);
        for (x, want1, want2) in [(-0.7, p1[0] * (k * -0.7).cos(), p2[1] * (k * -0.7).sin()), (0.9, p1[2] * (beta * 0.9).cos(), p2[3] * (beta * 0.9).sin())] {
            assert!((s1.eval(x) - want1).norm() < 1e-12);
            assert!((s2.eval(x).norm() - want2.norm()).abs() < 1e-12);
        }
        let amps = [
            (2.0 * beta * beta / (PI * (beta * beta + k * k))).sqrt(),
            (2.0 * k * k / (PI * (beta * beta + k * k))).sqrt(),
        ];
        assert!((s2.wave.regions[0].coeffs[1].norm() - amps[0]).abs() < 1e-14);
        assert!((s2.wave.regions[1].coeffs[1].norm() - amps[1]).abs() < 1e-14);
        for s in [&s1, &s2] {
            assert!(s.junction_residual(&p) < 1e-10);
            assert!(random_interior_residual(s, &p, -3.0, 3.0, 3) < 1e-6);
        }
    }
    for &k in &[0.2, 1.5, k0 - 0.05] {
        let s = free_state(&p, 0.5 * k * k, Family::StepPsi0).unwrap();
        let alpha = (k0 * k0 - k * k).sqrt();
        let c = (2.0 * k * k / (PI * (alpha * alpha + k * k))).sqrt();
        let b = (2.0 * alpha * alpha / (PI * (alpha * alpha + k * k))).sqrt();
        // exponential amplitudes of c·cos kx − b·sin kx
        let (plus, minus) = (Complex64::new(c, b) * 0.5, Complex64::new(c, -b) * 0.5);
        assert!((plus.norm_sqr() + minus.norm_sqr() - 1.0 / PI).abs() < 1e-12);
        assert!((s.eval(-1.3) - Complex64::from(c * (k * -1.3).cos() + b * (k * 1.3).sin())).norm() < 1e-12);
        assert!((s.eval(0.8) - Complex64::from(c * (-alpha * 0.8).exp())).norm() < 1e-12);
        assert!(s.junction_residual(&p) < 1e-10);
        assert!(random_interior_residual(&s, &p, -3.0, 3.0, 4) < 1e-6);
    }
    assert!(matches!(free_state(&p, 0.5, Family::StepPsi1), Err(Error::OutOfSpectrum { .. })));
    assert!(matches!(free_state(&p, 5.0, Family::StepPsi0), Err(Error::OutOfSpectrum { .. })));
}

#[test]
fn step_pair_windowed_overlap_stays_bounded() {
    let p = Potential::Step { v0: 2.645 };
    let s1 = free_state(&p, 6.0, Family::StepPsi1).unwrap();
    let s2 = free_state(&p, 6.0, Family::StepPsi2).unwrap();
    let windows: Vec<f64> = (1..=12).map(|i| 25.0 * i as f64).collect();
    let cross = orthonormality_probe(&s1, &s2, &windows);
    assert!(cross.max_abs < 0.5, "{}", cross.max_abs);
    assert!(cross.slope.abs() < 1e-3);
    let diag = orthonormality_probe(&s1, &s1, &windows);
    assert!((diag.slope - 1.0 / (2.0 * PI)).abs() < 2e-3, "{}", diag.slope);
}

#[test]
fn plane_wave_probe_slope() {
    let k = 1.7;
    let wave = PiecewiseWave::new(
        vec![Region {
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
            origin: 0.0,
            basis: Basis::ComplexExp { k },
            coeffs: [Complex64::from(1.0 / (2.0 * PI).sqrt()), Complex64::from(0.0)],
        }],
        Extension::Undefined,
    )
    .unwrap();
    let e = Eigenstate { family: Family::DwFreeLeft, energy: 0.5 * k * k, kappa: Some(k), wave, norm_const: 1.0 };
    let r = orthonormality_probe(&e, &e, &[1.0, 5.0, 50.0, 500.0]);
    assert!(!r.one_sided);
    assert!((r.slope - 1.0 / (2.0 * PI)).abs() < 1e-12);
}

// ---------- periodic ----------

#[test]
fn cosine_bloch_spot_check() {
    let p = Potential::Cosine { v0: 1.0 };
    let s = bloch_state(&p, -0.17, Branch::Plus).unwrap();
    let kappa = s.kappa.unwrap();
    assert!((kappa - 0.44).abs() < 0.01, "{kappa}");
    assert!((brute_norm(&s, 0.0, PI, 200) - 0.5).abs() < 1e-8);
    assert!(s.junction_residual(&p) < 1e-10);
    assert!(random_interior_residual(&s, &p, -5.0, 5.0, 5) < 1e-6);
    assert!(matches!(bloch_state(&p, -0.7, Branch::Plus), Err(Error::InGap { .. })));
}

#[test]
fn cosine_plane_wave_form_matches_integrated_state() {
    for (v0, band, kappa) in [(1.0, 1, 0.44), (1.0, 2, -0.3), (0.15, 3, 0.9), (2.5, 5, 0.05)] {
        let p = Potential::Cosine { v0 };
        let (hill, velocity) = bloch::cosine_fourier(v0, band, kappa).unwrap();
        assert!((hill.kappa.unwrap() - kappa).abs() < 1e-15);
        let (d, dd) = eigencomplete::spectra::dispersion_with_derivative(&p, hill.energy).unwrap();
        assert!((d - (kappa * PI).cos()).abs() < 1e-9, "{v0} {band}: {d}");
        let expected = -PI * (kappa * PI).sin() / dd;
        assert!((velocity - expected).abs() < 1e-7 * (1.0 + expected.abs()), "{velocity} vs {expected}");
        let (lo, hi) = bloch::cosine_band_edges(v0, band).unwrap();
        assert!(lo < hill.energy && hill.energy < hi);
        assert!((brute_norm(&hill, 0.0, PI, 200) - 0.5).abs() < 1e-10);
        assert!(random_interior_residual(&hill, &p, -5.0, 5.0, band as u64) < 1e-6);
        assert!(bloch_phase_residual(&hill, PI) < 1e-10);

        let branch = if kappa > 0.0 { Branch::Plus } else { Branch::Minus };
        let ode = bloch::cosine(v0, hill.energy, branch).unwrap();
        assert!((ode.kappa.unwrap() - kappa).abs() < 1e-7);
        let overlap = hill.wave.inner(&ode.wave, 0.0, PI).norm();
        assert!((overlap - 0.5).abs() < 1e-7, "{v0} {band}: overlap {overlap}");
    }
}

fn bloch_phase_residual(s: &Eigenstate, period: f64) -> f64 {
    let kappa = s.kappa.unwrap();
    let phase = Complex64::from_polar(1.0, kappa * period);
    (0..50)
        .map(|i| {
            let x = -1.3 + period * i as f64 / 50.0;
            (s.eval(x + period) - phase * s.eval(x)).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn comb_bloch_spot_check_and_jump() {
    let p = Potential::DiracComb { a: 1.3, gamma: 1.0 };
    let s = bloch_state(&p, 0.5 * 1.5 * 1.5, Branch::Minus).unwrap();
    let kappa = s.kappa.unwrap();
    assert!((kappa + 1.01).abs() < 0.01, "{kappa}");
    assert_eq!(s.family, Family::CombBlochMinus);
    let (psi0, d_right) = s.wave.eval_with_derivative(0.0);
    let (_, d_left) = s.wave.eval_with_derivative(-1e-13);
    assert!((d_right - d_left - 2.0 * psi0).norm() < 1e-9);
    assert!(s.junction_residual(&p) < 1e-10);
    assert!(bloch_phase_residual(&s, 1.3) < 1e-10);
    assert!((brute_norm(&s, 0.0, 1.3, 100) - 1.3 / (2.0 * PI)).abs() < 1e-8);
}

/// Bloch state on the symmetric cell (−a/2, a/2) with the delta at the
/// centre, valid for γ = 1.
fn comb_symmetric_cell(a: f64, k: f64, kappa: f64, x: f64) -> Complex64 {
    let bb = I * k * Complex64::from_polar(1.0, a * (kappa - k)) - I * k - 1.0;
    let big_a = 1.0 + 2.0 * a * (k * k + 1.0) + (a * (k + kappa)).cos() - (2.0 * a * k).cos();
    let big_b = (2.0 * a * k * k + 1.0) * (a * (k - kappa)).cos() + 2.0 * a * k * (a * (k - kappa)).sin() + (2.0 * a * k).sin() / k;
    let norm = ((a / (2.0 * PI)) / (big_a - big_b)).sqrt();
    let e = |y: f64| Complex64::from_polar(1.0, k * y);
    if x < 0.0 {
        norm * (bb * e(-x) + e(x))
    } else {
        norm * Complex64::from_polar(1.0, a * kappa) * (bb * e(-(x - a)) + e(x - a))
    }
}

#[test]
fn comb_matches_symmetric_cell_closed_form() {
    let a = 1.3;
    let p = Potential::DiracComb { a, gamma: 1.0 };
    for &k in &[1.5, 2.6, 4.0, 6.9] {
        for branch in [Branch::Plus, Branch::Minus] {
            let Ok(s) = bloch_state(&p, 0.5 * k * k, branch) else { continue };
            let kappa = s.kappa.unwrap();
            let mut ratio = None;
            for i in 0..40 {
                let x = -0.5 * a + a * (i as f64 + 0.5) / 40.0;
                let want = comb_symmetric_cell(a, k, kappa, x);
                let r = s.eval(x) / want;
                let r0 = *ratio.get_or_insert(r);
                assert!((r - r0).norm() < 1e-9, "k={k} x={x}");
            }
            assert!((ratio.unwrap().norm() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn kronig_penney_states() {
    let p = Potential::KronigPenney { b: 0.43, v0: 2.645, v1: 0.27 };
    let mut checked = 0;
    for &e in &[0.6, 1.2, 3.3, 6.0, 9.0, 15.0, 30.0] {
        for branch in [Branch::Plus, Branch::Minus] {
            let s = match bloch_state(&p, e, branch) {
                Ok(s) => s,
                Err(Error::InGap { .. }) => continue,
                Err(err) => panic!("{err}"),
            };
            checked += 1;
            assert_eq!(s.family, Family::KpBloch(bloch::kp_family_index(2.645, e, branch)));
            assert!(s.junction_residual(&p) < 1e-10, "{}", s.junction_residual(&p));
            assert!(bloch_phase_residual(&s, 1.43) < 1e-10);
            assert!((brute_norm(&s, -0.43, 1.0, 200) - 1.43 / (2.0 * PI)).abs() < 1e-8);
            assert!(random_interior_residual(&s, &p, -2.0, 3.0, 6) < 1e-6);
        }
    }
    assert!(checked >= 8);
}

#[test]
fn kronig_penney_free_limit_is_a_plane_wave() {
    let p = Potential::KronigPenney { b: 0.43, v0: 0.0, v1: 0.0 };
    let s = bloch_state(&p, 1.1, Branch::Plus).unwrap();
    for i in 0..30 {
        let x = -3.0 + 0.21 * i as f64;
        assert!((s.eval(x).norm_sqr() - 1.0 / (2.0 * PI)).abs() < 1e-12);
    }
    assert!((s.kappa.unwrap() - (2.2f64).sqrt()).abs() < 1e-10);
}

// ---------- open box ----------

#[test]
fn open_box_bound_counts() {
    for (v0, n) in [(0.893, 0), (2.645, 1), (300.17, 8)] {
        let p = Potential::OpenBox { v0, ramp: Ramp::None };
        let states = bound_states(&p).unwrap();
        assert_eq!(states.len(), n, "v0={v0}");
        for s in &states {
            assert!(s.junction_residual(&p) < 1e-10);
            assert!((brute_norm(s, 0.0, 40.0, 2000) - 1.0).abs() < 1e-8);
            assert!(random_interior_residual(s, &p, 0.01, 4.0, 8) < 1e-6);
        }
        for w in states.windows(2) {
            assert!(w[0].wave.inner(&w[1].wave, 0.0, f64::INFINITY).norm() < 1e-10);
        }
    }
}

#[test]
fn open_box_free_states() {
    for ramp in [Ramp::None, Ramp::Linear] {
        let p = Potential::OpenBox { v0: 2.645, ramp };
        for (i, &kappa) in [0.4, 2.0, 9.0].iter().enumerate() {
            let s = free_state(&p, 0.5 * kappa * kappa, Family::OpenboxFree).unwrap();
            assert!(s.junction_residual(&p) < 1e-10, "{:?} {}", ramp, s.junction_residual(&p));
            assert!(random_interior_residual(&s, &p, 0.01, 5.0, i as u64) < 1e-6);
            // exterior amplitude² = 2/π gives average density 1/π
            let ext = s.wave.regions.last().unwrap().coeffs;
            assert!((ext[0].norm_sqr() + ext[1].norm_sqr() - 2.0 / PI).abs() < 1e-10);
        }
        let bound = bound_states(&p).unwrap();
        let f = free_state(&p, 1.0, Family::OpenboxFree).unwrap();
        for b in &bound {
            assert!(b.wave.inner(&f.wave, 0.0, 60.0).norm() < 1e-8);
        }
    }
    // closed form at the plain box
    let v0 = 2.645;
    let p = Potential::OpenBox { v0, ramp: Ramp::None };
    let kappa: f64 = 1.3;
    let gamma = (kappa * kappa + 2.0 * v0).sqrt();
    let n = (PI * (gamma * gamma * gamma.cos().powi(2) + kappa * kappa * gamma.sin().powi(2)) / 2.0).sqrt();
    let s = free_state(&p, 0.5 * kappa * kappa, Family::OpenboxFree).unwrap();
    assert!((s.eval(0.4).re - kappa * (gamma * 0.4).sin() / n).abs() < 1e-12);
    let x: f64 = 3.1;
    let want = (kappa * gamma.sin() * (kappa * (x - 1.0)).cos() + gamma * gamma.cos() * (kappa * (x - 1.0)).sin()) / n;
    assert!((s.eval(x).re - want).abs() < 1e-12);
}

#[test]
fn hard_box_first_excited_mode() {
    let modes = bound::hard_box(-0.38, 1.25, 0.0, 2.645, 0.27, 2).unwrap();
    let e = modes[1].energy;
    assert!((e - 13.728).abs() < 0.01, "{e}");
    let p = Potential::HardBox { tau: -0.38, sigma: 1.25, split: 0.0, v_left: 2.645, v_right: 0.27 };
    for m in &modes {
        assert!(m.junction_residual(&p) < 1e-10);
        assert!((brute_norm(m, -0.38, 0.87, 100) - 1.0).abs() < 1e-10);
    }
}

// ---------- one-sided comb ----------

#[test]
fn one_sided_closed_form_agrees_with_recurrence() {
    let (a, gamma, b) = (1.3, 1.0, 0.4);
    let mut found = 0;
    for i in 1..400 {
        let k = 0.01 * i as f64;
        let Ok(st) = one_sided_comb_state(a, gamma, b, k, 200) else { continue };
        found += 1;
        let mut it = st.coefficients[0];
        for n in 0..=200 {
            let c = st.coefficients[n];
            assert!((c[0] - it[0]).norm() + (c[1] - it[1]).norm() <= 1e-9 * c[0].norm().max(c[1].norm()).max(1e-3));
            it = onesided::recurrence_step(a, gamma, k, n, it);
        }
        let bound = st.coefficients.iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).fold(0.0, f64::max);
        assert!(bound < 1e3);
        assert!(st.state.junction_residual(&Potential::OneSidedComb { a, gamma, b }) < 1e-10);
    }
    assert!(found > 100);
}

#[test]
fn one_sided_weak_coupling_limit() {
    let a0 = onesided::a0(1.3, 1e-9, 0.4, 1.1);
    assert!((a0 - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-8);
}

#[test]
fn one_sided_coefficient_average() {
    // the constant fixes the Cesàro mean of |A_n|² + |B_n|² to 1/π
    let (a, gamma, b) = (1.3, 1.0, 0.4);
    let n_max = 4000;
    for &k in &[1.5, 2.0, 4.2] {
        let st = one_sided_comb_state(a, gamma, b, k, n_max).unwrap();
        let avg = st.coefficients[1..].iter().map(|c| c[0].norm_sqr() + c[1].norm_sqr()).sum::<f64>() / n_max as f64;
        assert!((avg - 1.0 / PI).abs() < 2e-3, "k={k} avg={avg}");
    }
}

#[test]
fn one_sided_gap_is_rejected_and_grows() {
    let (a, gamma, b) = (1.3, 1.0, 0.4);
    let k = (1..400).map(|i| 0.01 * i as f64).find(|&k| {
        !eigencomplete::spectra::one_sided_spectrum(a, gamma, 0.5 * k * k)
    });
    let k = k.unwrap();
    assert!(matches!(one_sided_comb_state(a, gamma, b, k, 50), Err(Error::InGap { .. })));
    let mut c = [Complex64::from(1.0), -Complex64::from_polar(1.0, -2.0 * k * b)];
    let mut peak: f64 = 0.0;
    for n in 0..200 {
        c = onesided::recurrence_step(a, gamma, k, n, c);
        peak = peak.max(c[0].norm());
    }
    assert!(peak > 1e3, "{peak}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comb_bloch_invariants(k in 0.2f64..8.0, gamma in -2.0f64..3.0, minus in any::<bool>()) {
        let a = 1.3;
        let p = Potential::DiracComb { a, gamma };
        let branch = if minus { Branch::Minus } else { Branch::Plus };
        if let Ok(s) = bloch_state(&p, 0.5 * k * k, branch) {
            prop_assert!(s.junction_residual(&p) < 1e-10);
            prop_assert!(bloch_phase_residual(&s, a) < 1e-10);
            prop_assert!((s.wave.norm_sqr(0.0, a) - a / (2.0 * PI)).abs() < 1e-10);
        }
    }

    #[test]
    fn dw_free_sum_rules(kappa in 0.05f64..10.0, v0 in 0.5f64..8.0, frac in 0.0f64..1.0) {
        let v1 = v0 * frac;
        for inc in [Incidence::Left, Incidence::Right] {
            let c = free::dw_coefficients(v0, v1, kappa, inc).unwrap();
            let total: f64 = [0, 1, 6, 7].iter().map(|&i| c[i].norm_sqr()).sum();
            prop_assert!((total - 1.0 / PI).abs() < 1e-10);
        }
    }
}
