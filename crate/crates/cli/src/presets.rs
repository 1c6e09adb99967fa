//! Read-only parameter sets for the `reproduce` command.

use eigencomplete::potentials::Ramp;
use eigencomplete::spectra::one_sided_spectrum;
use eigencomplete::{fmt_num, Branch, ExpansionOptions, Family, InitialKind, Potential};
use serde_json::json;

use crate::config::{ExperimentConfig, OutputSpec, Task};
use crate::svg::{Panel, Series};
use crate::tasks::Artifact;

pub const NAMES: [&str; 7] = ["fig1", "fig2", "fig3a", "fig4", "fig6", "fig7a", "table1"];

pub enum Part {
    Run(Box<ExperimentConfig>),
    /// One-sided against two-sided δ-comb spectrum over k ∈ (0, k_max].
    CombSpectra { a: f64, gamma: f64, k_max: f64, points: usize },
}

pub struct Figure {
    pub name: &'static str,
    pub title: &'static str,
    pub columns: usize,
    /// (label, part); labels are unique within a figure.
    pub parts: Vec<(String, Part)>,
}

const DOUBLE_WELL: Potential = Potential::DoubleWell { v0: 4.27, v1: 1.43 };
const COSINE: Potential = Potential::Cosine { v0: 1.0 };
const COMB: Potential = Potential::DiracComb { a: 1.3, gamma: 1.0 };
const KRONIG_PENNEY: Potential = Potential::KronigPenney { b: 0.43, v0: 2.645, v1: 0.27 };

fn config(potential: Potential, task: Task, initial_state: Option<InitialKind>) -> ExperimentConfig {
    ExperimentConfig {
        potential,
        task,
        initial_state,
        numerics: ExpansionOptions::default(),
        output: OutputSpec::default(),
    }
}

fn expansion(potential: Potential, j: u32, tau: f64, sigma: f64, pad: f64) -> Part {
    Part::Run(Box::new(config(
        potential,
        Task::Expand { x_min: Some(tau - pad), x_max: Some(tau + sigma + pad), points: 241 },
        Some(InitialKind::WellMode { j, tau, sigma }),
    )))
}

fn bands(potential: Potential, energy_max: f64) -> Part {
    Part::Run(Box::new(config(potential, Task::Bands { energy_max, samples_per_band: 80 }, None)))
}

fn wavefunction(potential: Potential, energy: f64, branch: Branch, x_max: f64) -> Part {
    Part::Run(Box::new(config(
        potential,
        Task::Eigenstate { energy, family: None::<Family>, branch, x_min: -x_max, x_max, points: 401 },
        None,
    )))
}

pub fn figure(name: &str) -> Option<Figure> {
    let mut parts: Vec<(String, Part)> = Vec::new();
    let (title, columns) = match name {
        "fig1" => {
            for j in 1..=3 {
                parts.push((format!("fig1_j{j}"), expansion(DOUBLE_WELL, j, 0.25, 1.63, 0.5)));
            }
            for i in 1..=3 {
                parts.push((format!("fig1_i{i}"), expansion(DOUBLE_WELL, i, -1.17, 4.23, 0.5)));
            }
            ("double well: expansion against initial state", 3)
        }
        "fig2" => {
            parts.push(("fig2_bands".into(), bands(COSINE, 10.0)));
            parts.push(("fig2_wave".into(), wavefunction(COSINE, -0.17, Branch::Plus, 2.0 * std::f64::consts::PI)));
            for j in 1..=3 {
                parts.push((format!("fig2_j{j}"), expansion(COSINE, j, 0.15, 2.1, 0.5)));
            }
            ("cosine potential: bands, Bloch state and expansions", 3)
        }
        "fig3a" => {
            parts.push(("fig3a_bands".into(), bands(KRONIG_PENNEY, 40.0)));
            ("Kronig-Penney band structure", 1)
        }
        "fig4" => {
            parts.push(("fig4_bands".into(), bands(COMB, 20.0)));
            parts.push(("fig4_wave".into(), wavefunction(COMB, 0.5 * 1.5 * 1.5, Branch::Minus, 4.0)));
            for j in 1..=3 {
                parts.push((format!("fig4_j{j}"), expansion(COMB, j, 0.45, 1.0, 0.5)));
            }
            ("Dirac comb: bands, Bloch state and expansions", 3)
        }
        "fig6" => {
            let plain = |v0| Potential::OpenBox { v0, ramp: Ramp::None };
            let ramp = |v0| Potential::OpenBox { v0, ramp: Ramp::Linear };
            let settings = [
                ("base", plain(2.645), 0.2, 0.6),
                ("tau_low", plain(2.645), 0.1, 0.6),
                ("tau_high", plain(2.645), 0.35, 0.6),
                ("sigma_low", plain(2.645), 0.2, 0.4),
                ("sigma_high", plain(2.645), 0.2, 0.8),
                ("shallow", plain(0.893), 0.2, 0.6),
                ("deep", plain(300.17), 0.2, 0.6),
                ("ramp_a", ramp(2.645), 0.1, 0.5),
                ("ramp_b", ramp(2.645), 0.2, 0.6),
            ];
            for (label, p, tau, sigma) in settings {
                parts.push((format!("fig6_{label}"), expansion(p, 2, tau, sigma, 0.2)));
            }
            ("open box: expansions across parameters", 3)
        }
        "fig7a" => {
            parts.push(("fig7a_spectra".into(), Part::CombSpectra { a: 1.3, gamma: 1.0, k_max: 6.0, points: 1200 }));
            ("one-sided and two-sided δ-comb spectra", 1)
        }
        "table1" => {
            parts.push((
                "table1".into(),
                Part::Run(Box::new(config(KRONIG_PENNEY, Task::Table1 { tau: -0.38, sigma: 1.25, rows: 6 }, None))),
            ));
            ("Kronig-Penney total probabilities", 1)
        }
        _ => return None,
    };
    let name = NAMES.iter().find(|n| **n == name).copied()?;
    Some(Figure { name, title, columns, parts })
}

fn comb_cos_arg(a: f64, gamma: f64, k: f64) -> f64 {
    (a * k).sin() * gamma / k + (a * k).cos()
}

pub fn comb_spectra(a: f64, gamma: f64, k_max: f64, points: usize) -> Artifact {
    let mut csv = String::from("k,energy,cos_kappa_a,two_sided,one_sided\n");
    let (mut one, mut two, mut arg) = (Vec::new(), Vec::new(), Vec::new());
    let mut mismatches = 0;
    for i in 1..=points {
        let k = k_max * i as f64 / points as f64;
        let energy = 0.5 * k * k;
        let d = comb_cos_arg(a, gamma, k);
        let both = d.abs() <= 1.0;
        let single = one_sided_spectrum(a, gamma, energy);
        if both != single && (d.abs() - 1.0).abs() > 1e-9 {
            mismatches += 1;
        }
        csv.push_str(&format!("{},{},{},{},{}\n", fmt_num(k), fmt_num(energy), fmt_num(d), both as u8, single as u8));
        arg.push((k, d));
        two.push((k, if both { 1.0 } else { 0.0 }));
        one.push((k, if single { 1.05 } else { 0.05 }));
    }
    Artifact {
        task: "fig7a_spectra".into(),
        potential: "dirac_comb".into(),
        config: json!({ "a": a, "gamma": gamma, "k_max": k_max, "points": points }),
        results: json!({ "samples": points, "mismatches_off_edges": mismatches }),
        numerics: json!({ "edge_tolerance": 1e-9 }),
        csv,
        panels: vec![Panel {
            title: format!("allowed k, a = {a}, gamma = {gamma}; {mismatches} mismatches"),
            x_label: "k".into(),
            y_label: "cos(kappa a), allowed".into(),
            series: vec![
                Series::line("sin(ak)g/k + cos(ak)", arg),
                Series::line("two-sided allowed", two),
                Series::dashed("one-sided allowed", one),
            ],
        }],
        messages: vec![format!("one-sided vs two-sided spectrum: {mismatches} mismatches in {points} samples")],
        converged: mismatches == 0,
    }
}
