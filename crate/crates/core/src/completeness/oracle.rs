//! Independent completeness check: finite-difference Hamiltonian on
//! [−L, L] with hard walls, diagonalized by the implicit QL method and
//! inverse iteration. The discrete eigenbasis is complete by construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::initial::InitialState;
use crate::error::{Error, Result};
use crate::numerics::tridiag::Tridiagonal;
use crate::potentials::{Potential, PotentialValue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub half_width: f64,
    pub x: Vec<f64>,
    /// All eigenvalues, ascending.
    pub energies: Vec<f64>,
    pub reconstruction: Vec<f64>,
    /// max |reconstruction − Ψ| over the nodes.
    pub reconstruction_error: f64,
}

impl OracleResult {
    /// Eigenvalues below `energy`.
    pub fn energies_below(&self, energy: f64) -> Vec<f64> {
        self.energies.iter().copied().take_while(|e| *e < energy).collect()
    }

    /// Linear interpolation of the reconstruction.
    pub fn interpolate(&self, x: f64) -> f64 {
        let i = self.x.partition_point(|n| *n <= x);
        if i == 0 || i >= self.x.len() {
            return 0.0;
        }
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let t = (x - x0) / (x1 - x0);
        self.reconstruction[i - 1] * (1.0 - t) + self.reconstruction[i] * t
    }
}

/// Diagonalizes the discretized Hamiltonian on n interior nodes of [−L, L]
/// and expands `s` in the discrete eigenbasis.
pub fn grid_oracle(p: &Potential, s: &InitialState, half_width: f64, n: usize) -> Result<OracleResult> {
    p.validate()?;
    if n < 2000 {
        return Err(Error::BadParams(format!("grid oracle needs n >= 2000, got {n}")));
    }
    let (lo, hi) = s.support();
    if !(lo >= -half_width && hi <= half_width) {
        return Err(Error::SupportExceedsBox { lo, hi, half_width });
    }
    let h = 2.0 * half_width / (n + 1) as f64;
    let x: Vec<f64> = (1..=n).map(|i| -half_width + h * i as f64).collect();
    // nodes inside an infinite potential are dropped, which puts a
    // Dirichlet wall next to the last finite node
    let finite: Vec<bool> = x.iter().map(|&xi| !matches!(p.evaluate(xi), PotentialValue::Infinite)).collect();
    let first = finite.iter().position(|f| *f).ok_or_else(|| Error::BadParams("no finite grid nodes".into()))?;
    let last = finite.iter().rposition(|f| *f).unwrap_or(first);
    if finite[first..=last].iter().any(|f| !f) {
        return Err(Error::NotImplemented("grid oracle with interior hard walls".into()));
    }
    let mut diag: Vec<f64> = x[first..=last]
        .iter()
        .map(|&xi| match p.evaluate(xi) {
            PotentialValue::Finite(v) => 1.0 / (h * h) + v,
            _ => 1.0 / (h * h),
        })
        .collect();
    // a δ of strength γ becomes γ/h on the nearest node
    for (xd, gamma) in p.deltas_in(-half_width, half_width) {
        let i = (((xd + half_width) / h).round() as usize).clamp(1, n) - 1;
        if (first..=last).contains(&i) {
            diag[i - first] += gamma / h;
        }
    }
    let t = Tridiagonal { diag, off: -0.5 / (h * h) };
    let energies = t.eigenvalues();
    let (glo, ghi) = t.bounds();
    let scale = ghi.abs().max(glo.abs());
    let m = t.diag.len();

    let target: Vec<f64> = x[first..=last].iter().map(|&xi| s.eval(xi).re).collect();
    // split into runs of well-separated eigenvalues so clustered vectors are
    // orthogonalized together
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=m {
        let gap = k == m || energies[k] - energies[k - 1] > 1e-7 * scale;
        if gap && (k - start >= 64 || k == m) {
            groups.push((start, k));
            start = k;
        }
    }
    let partials: Vec<Vec<f64>> = groups
        .par_iter()
        .map(|&(a, b)| {
            let mut recon = vec![0.0; m];
            let mut prev: Vec<Vec<f64>> = Vec::new();
            for k in a..b {
                let mut v = t.eigenvector(energies[k], scale);
                let clustered = k > a && energies[k] - energies[k - 1] <= 1e-7 * scale;
                if !clustered {
                    prev.clear();
                }
                for u in &prev {
                    let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= d * ui);
                }
                let norm = v.iter().map(|q| q * q).sum::<f64>().sqrt();
                v.iter_mut().for_each(|q| *q /= norm);
                let c: f64 = v.iter().zip(&target).map(|(a, b)| a * b).sum();
                recon.iter_mut().zip(&v).for_each(|(r, vi)| *r += c * vi);
                prev.push(v);
            }
            recon
        })
        .collect();
    let mut reconstruction = vec![0.0; m];
    for part in partials {
        reconstruction.iter_mut().zip(&part).for_each(|(r, q)| *r += q);
    }
    let mut reconstruction_error = reconstruction.iter().zip(&target).map(|(r, t)| (r - t).abs()).fold(0.0, f64::max);
    // dropped wall nodes carry a zero reconstruction
    let mut full = vec![0.0; n];
    full[first..=last].copy_from_slice(&reconstruction);
    for (i, &xi) in x.iter().enumerate() {
        if !(first..=last).contains(&i) {
            reconstruction_error = reconstruction_error.max(s.eval(xi).re.abs());
        }
    }
    let reconstruction = full;
    Ok(OracleResult { half_width, x, energies, reconstruction, reconstruction_error })
}
