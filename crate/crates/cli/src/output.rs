use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::Format;
use crate::svg;
use crate::tasks::Artifact;
use crate::CliError;

pub fn timestamp() -> String {
    chrono::Local::now().format("%Y%m%dT%H%M%S").to_string()
}

fn write(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::invalid(format!("output: cannot write {}: {e}", path.display())))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::invalid(format!("output.dir {}: {e}", dir.display())))
}

/// Writes `<task>_<potential>_<stamp>.{csv,json,svg}`. Contents depend
/// only on the artifact, so identical runs give identical files.
pub fn write_artifact(a: &Artifact, dir: &Path, formats: &[Format], stamp: &str) -> Result<Vec<PathBuf>, CliError> {
    let stem = format!("{}_{}_{stamp}", a.task, a.potential);
    let mut written = Vec::new();
    let config = serde_json::to_string(&a.config).expect("json");
    let numerics = serde_json::to_string(&a.numerics["options"]).expect("json");
    for f in formats {
        let (ext, body) = match f {
            Format::Csv => ("csv", format!("# config: {config}\n# numerics: {numerics}\n{}", a.csv)),
            Format::Json => {
                let doc = json!({ "config": a.config, "results": a.results, "numerics_report": a.numerics });
                ("json", serde_json::to_string_pretty(&doc).expect("json") + "\n")
            }
            Format::Svg => {
                if a.panels.is_empty() {
                    continue;
                }
                let meta = serde_json::to_string(&json!({ "config": a.config, "numerics": a.numerics["options"] })).expect("json");
                ("svg", svg::render(&format!("{} {}", a.task, a.potential), &a.panels, 1, &meta))
            }
        };
        let path = dir.join(format!("{stem}.{ext}"));
        write(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}

/// One SVG holding the panels of several artifacts.
pub fn write_figure(
    name: &str,
    potential: &str,
    title: &str,
    parts: &[Artifact],
    columns: usize,
    dir: &Path,
    stamp: &str,
) -> Result<PathBuf, CliError> {
    let panels: Vec<svg::Panel> = parts.iter().flat_map(|a| a.panels.iter()).cloned().collect();
    let meta = serde_json::to_string(&parts.iter().map(|a| json!({ "part": a.task, "config": a.config })).collect::<Vec<_>>())
        .expect("json");
    let path = dir.join(format!("{name}_{potential}_{stamp}.svg"));
    write(&path, &svg::render(title, &panels, columns, &meta))?;
    Ok(path)
}
