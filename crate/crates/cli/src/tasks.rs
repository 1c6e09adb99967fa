use eigencomplete::eigenstates::{bloch_state, bound_states, free_state};
use eigencomplete::spectra::band_structure;
use eigencomplete::{
    expand, fmt_num, grid_oracle, identity_check, make_initial, total_probability, Eigenstate, InitialKind,
    InitialState, Potential, Side,
};
use serde_json::{json, Value};

use crate::config::{grid, ExperimentConfig, Task};
use crate::svg::{Panel, Series};
use crate::CliError;

/// Everything one computation produces, before it is written to disk.
pub struct Artifact {
    pub task: String,
    pub potential: String,
    pub config: Value,
    pub results: Value,
    pub numerics: Value,
    pub csv: String,
    pub panels: Vec<Panel>,
    /// Lines echoed to stdout.
    pub messages: Vec<String>,
    /// False when a numerical stage stopped short of its tolerance; the
    /// artifact is still written, flagged in its results.
    pub converged: bool,
}

pub fn run(cfg: &ExperimentConfig, initial: Option<&InitialState>) -> Result<Artifact, CliError> {
    let p = &cfg.potential;
    let mut a = Artifact {
        task: cfg.task.name().into(),
        potential: p.name().into(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        results: Value::Null,
        numerics: json!({ "options": cfg.numerics }),
        csv: String::new(),
        panels: Vec::new(),
        messages: Vec::new(),
        converged: true,
    };
    match cfg.task {
        Task::Bands { energy_max, samples_per_band } => {
            let bs = band_structure(p, energy_max).map_err(|e| CliError::from_core("band structure", e))?;
            a.csv = bs.to_csv(p, samples_per_band).map_err(|e| CliError::from_core("band sampling", e))?;
            a.results = serde_json::to_value(&bs).expect("bands serialize");
            a.panels.push(band_panel(p, &a.csv));
        }
        Task::Eigenstate { energy, family, branch, x_min, x_max, points } => {
            let s = eigenstate(p, energy, family, branch)?;
            let xs = grid(x_min, x_max, points);
            a.csv = s.to_csv(&xs);
            a.results = json!({
                "family": s.family,
                "energy": s.energy,
                "kappa": s.kappa,
                "norm_const": s.norm_const,
                "junction_residual": s.junction_residual(p),
            });
            let values: Vec<_> = xs.iter().map(|&x| (x, s.eval(x))).collect();
            a.panels.push(Panel {
                title: format!("{} at energy {}", s.family, fmt_num(s.energy)),
                x_label: "x".into(),
                y_label: "psi".into(),
                series: vec![
                    Series::line("Re psi", values.iter().map(|(x, v)| (*x, v.re)).collect()),
                    Series::dashed("Im psi", values.iter().map(|(x, v)| (*x, v.im)).collect()),
                ],
            });
        }
        Task::Expand { x_min, x_max, points } => {
            let s = initial.expect("validated");
            let (lo, hi) = s.support();
            let xs = grid(x_min.unwrap_or(lo), x_max.unwrap_or(hi), points);
            let r = expand(s, p, &xs, &cfg.numerics).map_err(|e| CliError::from_core("expansion", e))?;
            a.converged = r.quadrature_report.converged;
            a.csv = r.to_csv();
            a.results = json!({
                "converged": a.converged,
                "residual_sup": r.residual_sup,
                "residual_l2": r.residual_l2,
                "total_probability": r.total_probability,
                "per_family_probability": r.per_family_probability,
                "bound": r.bound,
                "amplitude_tables": r.amplitude_tables,
            });
            a.numerics["quadrature"] = serde_json::to_value(&r.quadrature_report).expect("report serializes");
            a.messages.push(format!(
                "expansion: sup residual {:.3e}, P = {:.9}, converged = {}",
                r.residual_sup, r.total_probability, a.converged
            ));
            a.panels.push(Panel {
                title: format!("{} sup residual {:.1e}", initial_label(s), r.residual_sup),
                x_label: "x".into(),
                y_label: "f, psi".into(),
                series: vec![
                    Series::line("f (expansion)", xs.iter().zip(&r.f).map(|(x, f)| (*x, f.re)).collect()),
                    Series::dashed("psi (initial)", xs.iter().zip(&r.initial).map(|(x, v)| (*x, *v)).collect()),
                ],
            });
        }
        Task::Probability => {
            let s = initial.expect("validated");
            let r = total_probability(s, p, &cfg.numerics).map_err(|e| CliError::from_core("total probability", e))?;
            a.converged = r.quadrature_report.converged;
            a.csv = String::from("family,probability\n");
            for (family, v) in &r.per_family {
                a.csv.push_str(&format!("{family},{}\n", fmt_num(*v)));
            }
            for b in &r.bound {
                a.csv.push_str(&format!("{}@{},{}\n", b.family, fmt_num(b.energy), fmt_num(b.phi.norm_sqr())));
            }
            a.csv.push_str(&format!("total,{}\n", fmt_num(r.total)));
            a.messages.push(format!("total_probability: {:.9} (1 - P = {:.3e})", r.total, 1.0 - r.total));
            a.results = json!({
                "converged": a.converged,
                "total": r.total,
                "tolerance": r.tolerance,
                "per_family": r.per_family,
                "bound": r.bound,
            });
            a.numerics["quadrature"] = serde_json::to_value(&r.quadrature_report).expect("report serializes");
        }
        Task::Table1 { tau, sigma, rows } => {
            let Potential::KronigPenney { v0, v1, .. } = *p else { unreachable!("validated") };
            a.csv = String::from("j,P_j,1-P_j\n");
            let mut table = Vec::new();
            let mut reports = Vec::new();
            for j in 1..=rows {
                let s = make_initial(InitialKind::WellMode { j, tau, sigma }).map_err(|e| CliError::from_core("initial state", e))?;
                let r = total_probability(&s, p, &cfg.numerics).map_err(|e| CliError::from_core("total probability", e))?;
                a.converged &= r.quadrature_report.converged;
                a.csv.push_str(&format!("{j},{},{}\n", fmt_num(r.total), fmt_num(1.0 - r.total)));
                a.messages.push(format!("j = {j}: P = {:.6}, 1 - P = {:.6}", r.total, 1.0 - r.total));
                table.push(json!({ "j": j, "P": r.total, "deficit": 1.0 - r.total, "per_family": r.per_family }));
                reports.push(r.quadrature_report);
            }
            let boxed = make_initial(InitialKind::BoxFirstExcited { tau, sigma, v0, v1 })
                .and_then(|s| total_probability(&s, p, &cfg.numerics));
            let box_p = match boxed {
                Ok(r) => {
                    a.messages.push(format!("box first excited: P = {:.6}", r.total));
                    Some(r.total)
                }
                Err(_) => None,
            };
            a.results = json!({ "converged": a.converged, "rows": table, "box_first_excited_P": box_p });
            a.numerics["quadrature"] = serde_json::to_value(&reports).expect("reports serialize");
            a.panels.push(Panel {
                title: "1 - P_j".into(),
                x_label: "j".into(),
                y_label: "1 - P".into(),
                series: vec![Series::line(
                    "1 - P_j",
                    table.iter().map(|r| (r["j"].as_f64().unwrap(), r["deficit"].as_f64().unwrap())).collect(),
                )],
            });
        }
        Task::Identity { sigma } => {
            let v = identity_check(sigma).map_err(|e| CliError::from_core("identity integral", e))?;
            let err = (v - 1.0).abs();
            a.converged = err < 1e-6;
            a.messages.push(identity_line(v));
            a.csv = format!("sigma,value,abs_error\n{},{},{}\n", fmt_num(sigma), fmt_num(v), fmt_num(err));
            a.results = json!({ "sigma": sigma, "value": v, "abs_error": err });
        }
        Task::Oracle { half_width, n } => {
            let s = initial.expect("validated");
            let r = grid_oracle(p, s, half_width, n).map_err(|e| CliError::from_core("grid oracle", e))?;
            a.csv = String::from("x,reconstruction,psi\n");
            for (x, v) in r.x.iter().zip(&r.reconstruction) {
                a.csv.push_str(&format!("{},{},{}\n", fmt_num(*x), fmt_num(*v), fmt_num(s.eval(*x).re)));
            }
            // levels below the lower asymptote are bound
            let threshold = [Side::Left, Side::Right].iter().filter_map(|&side| p.asymptote(side)).fold(f64::INFINITY, f64::min);
            let bound = if threshold.is_finite() { r.energies_below(threshold) } else { r.energies.clone() };
            a.results = json!({
                "bound_energies": bound,
                "lowest_energies": r.energies.iter().take(20).collect::<Vec<_>>(),
                "reconstruction_error": r.reconstruction_error,
            });
            a.numerics["grid"] = json!({ "half_width": half_width, "n": n });
            let (lo, hi) = s.support();
            let pad = 0.5 * (hi - lo);
            a.panels.push(Panel {
                title: format!("grid reconstruction, max error {:.1e}", r.reconstruction_error),
                x_label: "x".into(),
                y_label: "psi".into(),
                series: vec![Series::line(
                    "reconstruction",
                    r.x.iter().zip(&r.reconstruction).filter(|(x, _)| **x >= lo - pad && **x <= hi + pad).map(|(x, v)| (*x, *v)).collect(),
                )],
            });
        }
    }
    Ok(a)
}

pub fn identity_line(v: f64) -> String {
    let err = (v - 1.0).abs();
    if err < 1e-6 {
        format!("identity_check: {v:.6} (|err| < 1e-6)")
    } else {
        format!("identity_check: {v:.6} (|err| = {err:.1e})")
    }
}

fn initial_label(s: &InitialState) -> String {
    match s.kind {
        InitialKind::WellMode { j, tau, sigma } => format!("j={j} tau={tau} sigma={sigma}:"),
        InitialKind::BoxFirstExcited { tau, sigma, .. } => format!("box tau={tau} sigma={sigma}:"),
    }
}

fn eigenstate(
    p: &Potential,
    energy: f64,
    family: Option<eigencomplete::Family>,
    branch: eigencomplete::Branch,
) -> Result<Eigenstate, CliError> {
    if p.period().is_some() {
        return bloch_state(p, energy, branch).map_err(|e| CliError::from_core("Bloch state", e));
    }
    let family = family.expect("validated");
    let bound = bound_states(p).unwrap_or_default();
    if let Some(s) = bound
        .into_iter()
        .filter(|s| s.family == family)
        .min_by(|a, b| (a.energy - energy).abs().total_cmp(&(b.energy - energy).abs()))
    {
        return Ok(s);
    }
    free_state(p, energy, family).map_err(|e| CliError::from_core("free state", e))
}

/// κ on the horizontal axis, ε on the vertical, one curve per band branch.
fn band_panel(p: &Potential, csv: &str) -> Panel {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut last_band = None;
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect();
        if f.len() < 4 {
            continue;
        }
        if last_band.is_some_and(|b| b != f[3]) {
            plus.push((f64::NAN, f64::NAN));
            minus.push((f64::NAN, f64::NAN));
        }
        last_band = Some(f[3]);
        plus.push((f[1], f[0]));
        minus.push((f[2], f[0]));
    }
    Panel {
        title: format!("spectral function of {}", p.name()),
        x_label: "kappa".into(),
        y_label: "energy".into(),
        series: vec![Series::line("+kappa", plus), Series::line("-kappa", minus)],
    }
}
