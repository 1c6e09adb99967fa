//! Expansion of an initial state in the eigenstates of a potential.
//!
//! Continuous families are integrated node by node: at every quadrature node
//! the eigenstates are built, projected and accumulated with weight
//! w·|dκ/du|, where u is the family's integration variable. Nodes are
//! evaluated in parallel in fixed-size chunks and the chunk sums are reduced
//! in node order, so the result does not depend on the thread count.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::initial::InitialState;
use crate::eigenstates::{bloch, bound_states, free, Branch, Eigenstate, Family, Incidence};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{cosine_map_panels, panel_nodes, sqrt_map_nodes, QuadNode};
use crate::potentials::{Potential, Ramp};
use crate::spectra::{band_structure, comb_jacobian_k, sf_jacobian_with_margin, step_sf, SpectralBand};

const CHUNK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpansionOptions {
    /// Band-edge exclusion, relative to the band width.
    pub edge_margin: f64,
    /// Stop doubling once f changes by less than this (sup norm).
    pub cutoff_tol: f64,
    /// Stop doubling once P changes by less than this.
    pub probability_tol: f64,
    /// Initial wavenumber cutoff; 40/σ when absent.
    pub initial_cutoff: Option<f64>,
    pub max_doublings: usize,
    /// Gauss-Legendre order per panel.
    pub order: usize,
    /// Grid points this close to the initial support endpoints are left out
    /// of residuals and convergence checks.
    pub endpoint_exclusion: f64,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            edge_margin: 1e-6,
            cutoff_tol: 1e-4,
            probability_tol: 1e-8,
            initial_cutoff: None,
            max_doublings: 8,
            order: 16,
            endpoint_exclusion: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMode {
    None,
    DkappaDe,
    DkappaDk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSample {
    /// Integration variable (κ, k or ε, see the table's mode).
    pub variable: f64,
    pub kappa: f64,
    pub phi: Complex64,
    pub jacobian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTable {
    pub family: Family,
    pub jacobian_mode: JacobianMode,
    pub samples: Vec<AmplitudeSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundAmplitude {
    pub family: Family,
    pub energy: f64,
    pub phi: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    /// "kappa", "k" or "energy".
    pub variable: String,
    /// Upper limit after each doubling round.
    pub cutoffs: Vec<f64>,
    pub converged: bool,
    /// Sup-norm change of f (or change of P) in the last round.
    pub last_change: f64,
    pub nodes: usize,
    pub skipped_nodes: usize,
    pub edge_margin: f64,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub x_grid: Vec<f64>,
    pub f: Vec<Complex64>,
    pub initial: Vec<f64>,
    pub residual_sup: f64,
    pub residual_l2: f64,
    pub total_probability: f64,
    pub per_family_probability: BTreeMap<String, f64>,
    pub bound: Vec<BoundAmplitude>,
    pub amplitude_tables: Vec<AmplitudeTable>,
    pub quadrature_report: QuadratureReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityReport {
    pub total: f64,
    pub per_family: BTreeMap<String, f64>,
    pub bound: Vec<BoundAmplitude>,
    /// Estimated quadrature error of `total`.
    pub tolerance: f64,
    pub quadrature_report: QuadratureReport,
}

/// ∫ ψ*·Ψ over the support of the initial state.
pub fn project(s: &InitialState, e: &Eigenstate) -> Complex64 {
    let (lo, hi) = s.support();
    e.wave.inner(&s.wave, lo, hi)
}

/// Continuous families of a potential.
#[derive(Debug, Clone, Copy)]
enum Channel {
    DwFree { v0: f64, v1: f64 },
    StepBelow { v0: f64 },
    StepAbove { v0: f64 },
    OpenBoxFree { v0: f64, ramp: Ramp },
    Bloch { p: Potential },
    /// Cosine band `band` sampled in κ through its plane-wave expansion.
    CosineHill { v0: f64, band: usize },
    CombK { a: f64, gamma: f64 },
}

/// An eigenstate at a quadrature node. The node weight is multiplied by
/// `measure` (du/dnode) and `jacobian` (|dκ/du|); `variable` is u.
struct NodeState {
    state: Eigenstate,
    jacobian: f64,
    measure: f64,
    variable: f64,
}

impl Channel {
    fn mode(&self) -> JacobianMode {
        match self {
            Channel::DwFree { .. } | Channel::OpenBoxFree { .. } | Channel::StepBelow { .. } => JacobianMode::None,
            Channel::StepAbove { .. } | Channel::CombK { .. } => JacobianMode::DkappaDk,
            Channel::Bloch { .. } | Channel::CosineHill { .. } => JacobianMode::DkappaDe,
        }
    }

    /// Eigenstates at the node.
    fn states(&self, u: f64) -> Result<Vec<NodeState>> {
        if let Channel::CosineHill { v0, band } = *self {
            // nodes are in κ; the ε-rule is their image, so w_ε·|dκ/dε| = w_κ
            let (state, velocity) = bloch::cosine_fourier(v0, band, u)?;
            let variable = state.energy;
            return Ok(vec![NodeState { state, jacobian: 1.0 / velocity.abs(), measure: velocity.abs(), variable }]);
        }
        let plain = |list: Vec<(Eigenstate, f64)>| {
            list.into_iter().map(|(state, jacobian)| NodeState { state, jacobian, measure: 1.0, variable: u }).collect()
        };
        Ok(plain(match *self {
            Channel::DwFree { v0, v1 } => vec![
                (free::double_well(v0, v1, u, Incidence::Left)?, 1.0),
                (free::double_well(v0, v1, u, Incidence::Right)?, 1.0),
            ],
            Channel::StepBelow { v0 } => vec![(free::step(v0, u, 0)?, 1.0)],
            Channel::StepAbove { v0 } => {
                let sf = step_sf(v0, u);
                let (j1, j2) = sf.jac1.zip(sf.jac2).ok_or(Error::AtBandEdge { energy: 0.5 * u * u })?;
                let mut s1 = free::step(v0, u, 1)?;
                let mut s2 = free::step(v0, u, 2)?;
                s1.kappa = sf.kappa1;
                s2.kappa = sf.kappa2;
                vec![(s1, j1), (s2, j2)]
            }
            Channel::OpenBoxFree { v0, ramp } => vec![(free::open_box(v0, ramp, u)?, 1.0)],
            Channel::Bloch { p } => {
                let jac = sf_jacobian_with_margin(&p, u, 0.0)?;
                let build = |branch| match p {
                    Potential::Cosine { v0 } => bloch::cosine(v0, u, branch),
                    Potential::KronigPenney { b, v0, v1 } => bloch::kronig_penney(b, v0, v1, u, branch),
                    _ => Err(Error::WrongClass),
                };
                vec![(build(Branch::Plus)?, jac), (build(Branch::Minus)?, jac)]
            }
            Channel::CombK { a, gamma } => {
                let jac = comb_jacobian_k(a, gamma, u)?;
                vec![(bloch::comb(a, gamma, u, Branch::Plus)?, jac), (bloch::comb(a, gamma, u, Branch::Minus)?, jac)]
            }
            Channel::CosineHill { .. } => unreachable!(),
        }))
    }
}

/// Contributions of one chunk of nodes.
struct Partial {
    f: Vec<Complex64>,
    prob: BTreeMap<Family, f64>,
    tables: BTreeMap<Family, Vec<AmplitudeSample>>,
    skipped: usize,
}

fn evaluate_chunk(channel: &Channel, nodes: &[QuadNode], s: &InitialState, grid: &[f64]) -> Partial {
    let mut part = Partial { f: vec![Complex64::new(0.0, 0.0); grid.len()], prob: BTreeMap::new(), tables: BTreeMap::new(), skipped: 0 };
    for node in nodes {
        let states = match channel.states(node.x) {
            Ok(s) => s,
            Err(_) => {
                part.skipped += 1;
                continue;
            }
        };
        for NodeState { state, jacobian: jac, measure, variable } in states {
            let phi = project(s, &state);
            if !phi.is_finite() {
                part.skipped += 1;
                continue;
            }
            let weight = node.w * measure * jac;
            *part.prob.entry(state.family).or_insert(0.0) += weight * phi.norm_sqr();
            let coef = phi * weight;
            for (acc, &x) in part.f.iter_mut().zip(grid) {
                *acc += coef * state.eval(x);
            }
            part.tables.entry(state.family).or_default().push(AmplitudeSample {
                variable,
                kappa: state.kappa.unwrap_or(node.x),
                phi,
                jacobian: jac,
            });
        }
    }
    part
}

/// Accumulates the state of an expansion across doubling rounds.
struct Accumulator {
    f: Vec<Complex64>,
    prob: BTreeMap<Family, f64>,
    tables: BTreeMap<Family, (JacobianMode, Vec<AmplitudeSample>)>,
    nodes: usize,
    skipped: usize,
}

impl Accumulator {
    fn new(len: usize) -> Self {
        Accumulator { f: vec![Complex64::new(0.0, 0.0); len], prob: BTreeMap::new(), tables: BTreeMap::new(), nodes: 0, skipped: 0 }
    }

    /// Integrates one channel over the given nodes; returns the change in
    /// (f, P) it produced.
    fn add(&mut self, channel: &Channel, nodes: &[QuadNode], s: &InitialState, grid: &[f64]) -> (Vec<Complex64>, f64) {
        let parts: Vec<Partial> = nodes.par_chunks(CHUNK).map(|c| evaluate_chunk(channel, c, s, grid)).collect();
        let mut df = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut dp = 0.0;
        for part in parts {
            for (a, b) in df.iter_mut().zip(&part.f) {
                *a += b;
            }
            for (fam, p) in part.prob {
                dp += p;
                *self.prob.entry(fam).or_insert(0.0) += p;
            }
            for (fam, samples) in part.tables {
                self.tables.entry(fam).or_insert_with(|| (channel.mode(), Vec::new())).1.extend(samples);
            }
            self.skipped += part.skipped;
        }
        self.nodes += nodes.len();
        for (a, b) in self.f.iter_mut().zip(&df) {
            *a += b;
        }
        (df, dp)
    }
}

/// Integration domain of a potential's continuous spectrum.
enum Spectrum {
    /// Channels over [lo, ∞) in a wavenumber-like variable.
    Open(Vec<(Channel, f64, Option<f64>)>),
    /// Bands in ε (or in k for the comb).
    Banded { channel: Channel, in_k: bool, floor: f64 },
    /// Cosine bands, each integrated over the whole zone κ ∈ (−1, 1).
    Hill { v0: f64 },
}

fn spectrum_of(p: &Potential) -> Result<Spectrum> {
    Ok(match *p {
        Potential::DoubleWell { v0, v1 } => Spectrum::Open(vec![(Channel::DwFree { v0, v1 }, 0.0, None)]),
        Potential::Step { v0 } => {
            let k0 = (2.0 * v0).sqrt();
            Spectrum::Open(vec![(Channel::StepBelow { v0 }, 0.0, Some(k0)), (Channel::StepAbove { v0 }, k0, None)])
        }
        Potential::OpenBox { v0, ramp } => Spectrum::Open(vec![(Channel::OpenBoxFree { v0, ramp }, 0.0, None)]),
        Potential::Cosine { v0 } => Spectrum::Hill { v0 },
        Potential::KronigPenney { v0, .. } => Spectrum::Banded { channel: Channel::Bloch { p: *p }, in_k: false, floor: v0 },
        Potential::DiracComb { a, gamma } => Spectrum::Banded { channel: Channel::CombK { a, gamma }, in_k: true, floor: 0.0 },
        _ => {
            return Err(Error::NotImplemented(format!(
                "no spectral function for {}; expansion is unavailable",
                p.name()
            )))
        }
    })
}

/// Largest distance from the grid and the initial support to the origin,
/// which sets the oscillation rate of the integrands in κ.
fn phase_rate(s: &InitialState, grid: &[f64]) -> f64 {
    let (lo, hi) = s.support();
    let reach = grid.iter().chain([lo, hi].iter()).fold(0.0_f64, |m, x| m.max(x.abs()));
    reach + (hi - lo) + 3.0
}

fn open_nodes(channel: &Channel, lo: f64, hi: f64, singular_lo: bool, singular_hi: bool, rate: f64, order: usize) -> Vec<QuadNode> {
    let _ = channel;
    let width = (6.0 / rate).min(1.0);
    let mut nodes = Vec::new();
    let mut a = lo;
    let mut b = hi;
    let edge = (0.5 * width).min(0.25 * (hi - lo));
    if singular_lo {
        nodes.extend(sqrt_map_nodes(lo, lo + edge, order + 8));
        a = lo + edge;
    }
    if singular_hi {
        b = hi - edge;
    }
    if b > a {
        let panels = ((b - a) / width).ceil().max(1.0) as usize;
        nodes.extend(panel_nodes(a, b, panels, order));
    }
    if singular_hi {
        // mirror of the square-root map onto the upper end
        nodes.extend(sqrt_map_nodes(0.0, edge, order + 8).into_iter().map(|n| QuadNode { x: hi - n.x, w: n.w }));
    }
    nodes
}

fn band_nodes(band: &SpectralBand, in_k: bool, rate: f64, period: f64, order: usize, margin: f64) -> Vec<QuadNode> {
    let (lo, hi) = if in_k {
        ((2.0 * band.energy_lo).sqrt(), (2.0 * band.energy_hi).sqrt())
    } else {
        (band.energy_lo, band.energy_hi)
    };
    // κ spans π/period over the band
    let panels = ((std::f64::consts::PI / period) * rate / 3.0).ceil().max(2.0) as usize;
    let width = hi - lo;
    cosine_map_panels(lo, hi, panels, order)
        .into_iter()
        .filter(|n| (n.x - lo).min(hi - n.x) >= margin * width)
        .collect()
}

/// κ-nodes over both halves of the zone of one cosine band. Low bands get
/// graded panels at the zone centre and boundary, where narrow gaps make
/// the integrand vary quickly.
fn hill_nodes(band: usize, rate: f64, order: usize, margin: f64) -> Vec<QuadNode> {
    let panels = (rate / 3.0).ceil().max(2.0) as usize;
    let mut half = Vec::new();
    if band <= 20 {
        for w in [0.0, 1e-3, 1e-2, 0.1].windows(2) {
            half.extend(panel_nodes(w[0], w[1], 1, order));
        }
        half.extend(panel_nodes(0.1, 0.9, panels, order));
        for w in [0.9, 0.99, 0.999, 1.0].windows(2) {
            half.extend(panel_nodes(w[0], w[1], 1, order));
        }
    } else {
        half = panel_nodes(0.0, 1.0, panels, order);
    }
    half.retain(|n| n.x.min(1.0 - n.x) >= margin);
    let mut nodes: Vec<QuadNode> = half.iter().rev().map(|n| QuadNode { x: -n.x, w: n.w }).collect();
    nodes.extend(half);
    nodes
}

fn interior_mask(s: &InitialState, grid: &[f64], exclusion: f64) -> Vec<bool> {
    let (lo, hi) = s.support();
    grid.iter().map(|x| (x - lo).abs() > exclusion && (x - hi).abs() > exclusion).collect()
}

fn sup_change(df: &[Complex64], mask: &[bool]) -> f64 {
    df.iter().zip(mask).filter(|(_, m)| **m).map(|(d, _)| d.norm()).fold(0.0, f64::max)
}

struct Outcome {
    acc: Accumulator,
    bound: Vec<BoundAmplitude>,
    report: QuadratureReport,
}

fn run(s: &InitialState, p: &Potential, grid: &[f64], opts: &ExpansionOptions) -> Result<Outcome> {
    p.validate()?;
    let spectrum = spectrum_of(p)?;
    let mut acc = Accumulator::new(grid.len());
    let mut bound = Vec::new();
    for state in bound_states(p)? {
        let phi = project(s, &state);
        *acc.prob.entry(state.family).or_insert(0.0) += phi.norm_sqr();
        for (a, &x) in acc.f.iter_mut().zip(grid) {
            *a += phi * state.eval(x);
        }
        bound.push(BoundAmplitude { family: state.family, energy: state.energy, phi });
    }
    let rate = phase_rate(s, grid);
    let mask = interior_mask(s, grid, opts.endpoint_exclusion);
    let mut cutoff = opts.initial_cutoff.unwrap_or(40.0 / s.sigma());
    let mut cutoffs = Vec::new();
    let mut converged = false;
    let mut last_change = f64::INFINITY;

    match spectrum {
        Spectrum::Open(channels) => {
            let mut done = 0.0;
            for round in 0..=opts.max_doublings {
                let mut df_sup: f64 = 0.0;
                let mut dp = 0.0;
                for (channel, lo, hi) in &channels {
                    let a = lo.max(done);
                    let b = hi.map_or(cutoff, |h| h.min(cutoff));
                    if !(b > a) {
                        continue;
                    }
                    let singular_lo = matches!(channel, Channel::StepAbove { .. }) && a == *lo;
                    let singular_hi = matches!(channel, Channel::StepBelow { .. }) && hi.is_some_and(|h| b == h);
                    let nodes = open_nodes(channel, a, b, singular_lo, singular_hi, rate, opts.order);
                    let (df, p_change) = acc.add(channel, &nodes, s, grid);
                    df_sup = df_sup.max(sup_change(&df, &mask));
                    dp += p_change;
                }
                cutoffs.push(cutoff);
                done = cutoff;
                last_change = if grid.is_empty() { dp } else { df_sup.max(dp) };
                if round > 0 && (grid.is_empty() || df_sup < opts.cutoff_tol) && dp < opts.probability_tol {
                    converged = true;
                    break;
                }
                cutoff *= 2.0;
            }
        }
        Spectrum::Banded { channel, in_k, floor } => {
            let period = p.period().ok_or(Error::WrongClass)?;
            let mut done_hi = f64::NEG_INFINITY;
            for round in 0..=opts.max_doublings {
                let energy_max = 0.5 * cutoff * cutoff + floor;
                let structure = band_structure(p, energy_max)?;
                let mut df_sup: f64 = 0.0;
                let mut dp = 0.0;
                let start = done_hi;
                for band in structure.bands.iter().filter(|b| b.energy_lo >= start - 1e-9 * (1.0 + b.energy_lo.abs())) {
                    if in_k && band.energy_lo < 0.0 {
                        return Err(Error::NotImplemented("comb bands below zero energy".into()));
                    }
                    let nodes = band_nodes(band, in_k, rate, period, opts.order, opts.edge_margin);
                    let (df, p_change) = acc.add(&channel, &nodes, s, grid);
                    df_sup = df_sup.max(sup_change(&df, &mask));
                    dp += p_change;
                    done_hi = done_hi.max(band.energy_hi);
                }
                cutoffs.push(if in_k { (2.0 * done_hi).sqrt() } else { done_hi });
                last_change = if grid.is_empty() { dp } else { df_sup.max(dp) };
                if round > 0 && (grid.is_empty() || df_sup < opts.cutoff_tol) && dp < opts.probability_tol {
                    converged = true;
                    break;
                }
                cutoff *= 2.0;
            }
        }
        Spectrum::Hill { v0 } => {
            let mut next = 1;
            let mut done_hi = f64::NEG_INFINITY;
            for round in 0..=opts.max_doublings {
                let energy_max = 0.5 * cutoff * cutoff + v0.abs();
                let mut df_sup: f64 = 0.0;
                let mut dp = 0.0;
                loop {
                    let (lo, hi) = bloch::cosine_band_edges(v0, next)?;
                    if lo >= energy_max {
                        break;
                    }
                    let nodes = hill_nodes(next, rate, opts.order, opts.edge_margin);
                    let (df, p_change) = acc.add(&Channel::CosineHill { v0, band: next }, &nodes, s, grid);
                    df_sup = df_sup.max(sup_change(&df, &mask));
                    dp += p_change;
                    done_hi = hi;
                    next += 1;
                }
                cutoffs.push(done_hi);
                last_change = if grid.is_empty() { dp } else { df_sup.max(dp) };
                if round > 0 && (grid.is_empty() || df_sup < opts.cutoff_tol) && dp < opts.probability_tol {
                    converged = true;
                    break;
                }
                cutoff *= 2.0;
            }
        }
    }
    let variable = match p {
        Potential::Cosine { .. } | Potential::KronigPenney { .. } => "energy",
        Potential::DiracComb { .. } | Potential::Step { .. } => "k",
        _ => "kappa",
    };
    let report = QuadratureReport {
        variable: variable.to_string(),
        cutoffs,
        converged,
        last_change,
        nodes: acc.nodes,
        skipped_nodes: acc.skipped,
        edge_margin: opts.edge_margin,
        order: opts.order,
    };
    Ok(Outcome { acc, bound, report })
}

fn family_totals(acc: &Accumulator) -> BTreeMap<String, f64> {
    acc.prob.iter().map(|(f, p)| (f.to_string(), *p)).collect()
}

/// Reconstructs the initial state on `x_grid` from the eigenstates of `p`.
pub fn expand(s: &InitialState, p: &Potential, x_grid: &[f64], opts: &ExpansionOptions) -> Result<ExpansionResult> {
    let out = run(s, p, x_grid, opts)?;
    let initial: Vec<f64> = x_grid.iter().map(|&x| s.eval(x).re).collect();
    let mask = interior_mask(s, x_grid, opts.endpoint_exclusion);
    let mut sup: f64 = 0.0;
    let mut sq = 0.0;
    let mut count = 0usize;
    for ((f, psi), m) in out.acc.f.iter().zip(&initial).zip(&mask) {
        if *m {
            let r = (f - psi).norm();
            sup = sup.max(r);
            sq += r * r;
            count += 1;
        }
    }
    let span = match (x_grid.first(), x_grid.last()) {
        (Some(a), Some(b)) => (b - a).abs(),
        _ => 0.0,
    };
    let residual_l2 = if count > 0 { (sq / count as f64 * span).sqrt() } else { 0.0 };
    let total_probability = out.acc.prob.values().sum();
    let per_family_probability = family_totals(&out.acc);
    let amplitude_tables = out
        .acc
        .tables
        .into_iter()
        .map(|(family, (jacobian_mode, samples))| AmplitudeTable { family, jacobian_mode, samples })
        .collect();
    Ok(ExpansionResult {
        x_grid: x_grid.to_vec(),
        f: out.acc.f,
        initial,
        residual_sup: sup,
        residual_l2,
        total_probability,
        per_family_probability,
        bound: out.bound,
        amplitude_tables,
        quadrature_report: out.report,
    })
}

/// Total measurement probability Σ|φ_n|² + Σ∫|φ|²|dκ/du|du.
pub fn total_probability(s: &InitialState, p: &Potential, opts: &ExpansionOptions) -> Result<ProbabilityReport> {
    let out = run(s, p, &[], opts)?;
    let total = out.acc.prob.values().sum();
    Ok(ProbabilityReport {
        total,
        per_family: family_totals(&out.acc),
        bound: out.bound,
        tolerance: out.report.last_change.abs() + 1e-9,
        quadrature_report: out.report,
    })
}
