//! Fixtures shared by the benchmarks.

use eigencomplete::potentials::Ramp;
use eigencomplete::{make_initial, InitialKind, InitialState, Potential};

pub const DOUBLE_WELL: Potential = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
pub const COSINE: Potential = Potential::Cosine { v0: 1.0 };
pub const COMB: Potential = Potential::DiracComb { a: 1.3, gamma: 1.0 };
pub const KRONIG_PENNEY: Potential = Potential::KronigPenney { b: 0.43, v0: 2.645, v1: 0.27 };
pub const RAMP_BOX: Potential = Potential::OpenBox { v0: 2.645, ramp: Ramp::Linear };

pub fn well_mode(j: u32, tau: f64, sigma: f64) -> InitialState {
    make_initial(InitialKind::WellMode { j, tau, sigma }).expect("valid well mode")
}

/// `n` evenly spaced points covering the support of `s`.
pub fn support_grid(s: &InitialState, n: usize) -> Vec<f64> {
    let (lo, hi) = s.support();
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
