//! Multi-run figure presets: one trajectory CSV per run plus a gnuplot script.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use inertia_core::io::write_trajectory_csv;
use inertia_core::{oscillation_count, Status};
use serde_json::{json, Value};

use crate::commands::{create_file, integrate_block, write_json_file};
use crate::config::{missing, RunConfig};
use crate::{RunError, EXIT_EARLY_STOP, EXIT_OK};

fn safe_label(label: &str) -> Result<&str, RunError> {
    let ok = !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)) && !label.starts_with('.');
    if ok {
        Ok(label)
    } else {
        Err(RunError::Config(format!("figure label '{label}' must use only [A-Za-z0-9._-]")))
    }
}

pub fn gnuplot_script(name: &str, files: &[(String, usize)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 1200,800");
    let _ = writeln!(s, "set output '{name}.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set format y '%.0e'");
    let _ = writeln!(s, "set xlabel 't'");
    let _ = writeln!(s, "set ylabel 'f(x(t)) - min f'");
    let plots: Vec<String> = files
        .iter()
        .map(|(label, col)| format!("'{label}.csv' using 1:{col} skip 1 with lines title '{label}'"))
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

pub fn run_figure(cfg: &RunConfig, out: &Path) -> Result<(i32, Value), RunError> {
    let fig = cfg.section(&cfg.figure, "figure")?;
    let sim = cfg.simulate.as_ref().ok_or_else(|| missing("simulate"))?;
    safe_label(&fig.name)?;
    let mut seen = std::collections::BTreeSet::new();
    for run in &fig.runs {
        if !seen.insert(safe_label(&run.label)?) {
            return Err(RunError::Config(format!("duplicate figure label '{}'", run.label)));
        }
    }
    fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    let mut columns = Vec::new();
    let mut code = EXIT_OK;
    for run in &fig.runs {
        let objective = run.objective.as_ref().or(cfg.objective.as_ref()).ok_or_else(|| missing("objective"))?.build()?;
        let spec = run.dynamics.build()?;
        let traj = integrate_block(sim, &spec, objective.as_ref(), None, run.x0.as_deref(), run.horizon)?;
        write_trajectory_csv(&traj, create_file(out.join(format!("{}.csv", run.label)))?)?;
        if traj.status != Status::Completed {
            code = EXIT_EARLY_STOP;
        }
        let n = objective.dim();
        columns.push((run.label.clone(), 2 * n + 2));
        rows.push(json!({
            "label": run.label,
            "status": traj.status.as_str(),
            "t_end": traj.t_end,
            "steps_accepted": traj.steps_accepted,
            "final_fgap": traj.last().map(|s| s.fgap),
            "oscillation_count": oscillation_count(&traj),
        }));
    }
    fs::write(out.join(format!("{}.gp", fig.name)), gnuplot_script(&fig.name, &columns))?;
    let result = json!({"figure": fig.name, "note": fig.note, "runs": rows});
    write_json_file(&out.join(format!("{}_runs.json", fig.name)), &result)?;
    Ok((code, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_lists_every_run() {
        let s = gnuplot_script("fig", &[("a".into(), 6), ("b".into(), 6)]);
        assert!(s.contains("'a.csv' using 1:6"));
        assert!(s.contains("'b.csv' using 1:6"));
        assert!(s.ends_with('\n'));
    }

    #[test]
    fn labels_are_path_safe() {
        assert!(safe_label("alpha1_mu2").is_ok());
        assert!(safe_label("../x").is_err());
        assert!(safe_label("").is_err());
    }
}
