use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use inertia_core::analysis::{fit_exp_rate, fit_power_rate, RateFit};
use inertia_core::io::{read_columns, write_iterates_csv, write_margins_csv, write_trajectory_csv};
use inertia_core::{
    bound_check, bound_check_series, check_conditions, check_monotone, inertial_proximal, oscillation_count, Certificate,
    ClaimKind, ConditionSet, DynamicsSpec, RateClaim, RateOutcome, RateVerdict, Status, Trajectory, Verdict,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{apply_set, load_file, missing, set_path, RunConfig, SimulateConfig};
use crate::presets::preset;
use crate::{figures, Command, RunError, EXIT_BOUNDARY, EXIT_EARLY_STOP, EXIT_INTERNAL, EXIT_OK, EXIT_VIOLATED};

/// Builds the config document from a preset and/or file, then applies `--set` overrides.
pub fn resolve_config(preset_name: Option<&str>, file: Option<&Path>, sets: &[String]) -> Result<Value, RunError> {
    let mut doc = match (preset_name, file) {
        (Some(_), Some(_)) => return Err(RunError::Config("give either --preset or --config, not both".into())),
        (Some(p), None) => preset(p)?,
        (None, Some(f)) => load_file(f)?,
        (None, None) => return Err(RunError::Config("no --config or --preset given".into())),
    };
    for s in sets {
        apply_set(&mut doc, s)?;
    }
    Ok(doc)
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), RunError> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, v).map_err(|e| RunError::Internal(e.to_string()))?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

fn create(path: PathBuf) -> Result<BufWriter<File>, RunError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs one command, always leaving `summary.json` in `out`. Returns the exit code.
pub fn execute(cmd: Command, doc: Value, out: &Path) -> i32 {
    execute_with_jobs(cmd, doc, out, 1)
}

/// As [`execute`], with sweeps running up to `jobs` points concurrently.
pub fn execute_with_jobs(cmd: Command, doc: Value, out: &Path, jobs: usize) -> i32 {
    let (code, status, error, result) = match fs::create_dir_all(out).map_err(RunError::from).and_then(|_| dispatch(cmd, &doc, out, jobs)) {
        Ok((code, result)) => (code, status_word(code), None, result),
        Err(e) => {
            eprintln!("inertia-lab {cmd}: {e}");
            (e.exit_code(), "error", Some(e.to_string()), Value::Null)
        }
    };
    let summary = json!({
        "command": cmd.as_str(),
        "status": status,
        "exit_code": code,
        "error": error,
        "config": doc,
        "result": result,
    });
    if let Err(e) = fs::create_dir_all(out).map_err(RunError::from).and_then(|_| write_json(&out.join("summary.json"), &summary)) {
        eprintln!("inertia-lab {cmd}: cannot write summary.json: {e}");
        return EXIT_INTERNAL;
    }
    code
}

fn status_word(code: i32) -> &'static str {
    match code {
        EXIT_OK => "ok",
        EXIT_EARLY_STOP => "early_stop",
        EXIT_VIOLATED => "violated",
        EXIT_BOUNDARY => "boundary",
        _ => "error",
    }
}

fn dispatch(cmd: Command, doc: &Value, out: &Path, jobs: usize) -> Result<(i32, Value), RunError> {
    let cfg = RunConfig::from_value(doc.clone())?;
    if let Some(c) = &cfg.command {
        if c != cmd.as_str() {
            return Err(RunError::Config(format!("config is for command '{c}', not '{cmd}'")));
        }
    }
    match cmd {
        Command::Simulate => cmd_simulate(&cfg, out),
        Command::Check => cmd_check(&cfg, out),
        Command::Rate => cmd_rate(&cfg, out),
        Command::Ip => cmd_ip(&cfg, out),
        Command::Sweep => cmd_sweep(&cfg, doc, out, jobs),
    }
}

/// Result of integrating a config's `simulate` block.
pub struct SimRun {
    pub spec: DynamicsSpec,
    pub certificate: Option<Certificate>,
    pub trajectory: Trajectory,
    pub rate: Option<RateVerdict>,
}

pub fn simulate_config(cfg: &RunConfig) -> Result<SimRun, RunError> {
    let sim = cfg.section(&cfg.simulate, "simulate")?;
    let obj = cfg.objective()?;
    let spec = cfg.dynamics()?;
    let certificate = sim.certificate.as_ref().map(|c| c.build(&spec)).transpose()?;
    let trajectory = integrate_block(sim, &spec, obj.as_ref(), certificate.as_ref(), None, None)?;
    let rate = cfg.claim.as_ref().map(|c| bound_check(&trajectory, c)).transpose()?;
    Ok(SimRun { spec, certificate, trajectory, rate })
}

pub(crate) fn integrate_block(
    sim: &SimulateConfig,
    spec: &DynamicsSpec,
    obj: &dyn inertia_core::Objective,
    cert: Option<&Certificate>,
    x0: Option<&[f64]>,
    horizon: Option<f64>,
) -> Result<Trajectory, RunError> {
    let x0 = x0.unwrap_or(&sim.x0);
    let n = obj.dim();
    if x0.len() != n {
        return Err(RunError::Config(format!("x0 has length {}, objective dimension is {n}", x0.len())));
    }
    let v0 = sim.v0.clone().unwrap_or_else(|| vec![0.0; n]);
    if v0.len() != n {
        return Err(RunError::Config(format!("v0 has length {}, objective dimension is {n}", v0.len())));
    }
    let horizon = horizon.unwrap_or(sim.horizon);
    Ok(inertia_core::integrate(spec, obj, x0, &v0, horizon, &sim.integrator, cert, sim.z.as_deref())?)
}

fn fit_for(traj: &Trajectory, claim: &RateClaim) -> Option<RateFit> {
    match &claim.kind {
        ClaimKind::ExpPower { q, .. } => fit_exp_rate(traj, *q, claim.window).ok(),
        _ => fit_power_rate(traj, claim.window).ok(),
    }
}

fn trajectory_summary(run: &SimRun, rtol: f64, atol: f64) -> Value {
    let t = &run.trajectory;
    let last = t.last();
    let energy = run.certificate.as_ref().map(|c| {
        let mono = check_monotone(&t.energies(), 10.0 * rtol, 10.0 * atol);
        json!({"recipe": c.recipe, "energy_nonincreasing": mono.ok, "first_violation": mono.first_violation})
    });
    json!({
        "status": t.status.as_str(),
        "t_end": t.t_end,
        "samples": t.samples.len(),
        "steps_accepted": t.steps_accepted,
        "steps_rejected": t.steps_rejected,
        "f_min": t.f_min,
        "f_min_known": t.f_min_known,
        "final_fgap": last.map(|s| s.fgap),
        "integral_values": t.integral_values,
        "integral_grads": t.integral_grads,
        "oscillation_count": oscillation_count(t),
        "certificate": energy,
        "rate": run.rate,
        "fit": run.rate.as_ref().and_then(|r| fit_for(t, &r.claim)),
    })
}

fn early_stop(status: Status) -> bool {
    status != Status::Completed
}

fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<(i32, Value), RunError> {
    if cfg.figure.is_some() {
        return figures::run_figure(cfg, out);
    }
    let sim = cfg.section(&cfg.simulate, "simulate")?;
    let run = simulate_config(cfg)?;
    write_trajectory_csv(&run.trajectory, create(out.join("trajectory.csv"))?)?;
    let code = if early_stop(run.trajectory.status) { EXIT_EARLY_STOP } else { EXIT_OK };
    Ok((code, trajectory_summary(&run, sim.integrator.rtol, sim.integrator.atol)))
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Satisfied => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Boundary => EXIT_BOUNDARY,
    }
}

fn rate_code(v: RateOutcome) -> i32 {
    match v {
        RateOutcome::Bounded => EXIT_OK,
        RateOutcome::Growing => EXIT_VIOLATED,
        RateOutcome::Inconclusive => EXIT_BOUNDARY,
    }
}

fn cmd_check(cfg: &RunConfig, out: &Path) -> Result<(i32, Value), RunError> {
    let check = cfg.section(&cfg.check, "check")?;
    let spec = cfg.dynamics()?;
    let cert = match (&check.certificate, check.condition_set) {
        (Some(c), _) => Some(c.build(&spec)?),
        (None, ConditionSet::SystemA | ConditionSet::SystemB) => {
            return Err(RunError::Config(format!("condition set {} needs a 'check.certificate'", check.condition_set)))
        }
        (None, _) => None,
    };
    let report = check_conditions(check.condition_set, &spec.gamma, &spec.beta, &spec.b, cert.as_ref(), &check.params, &check.grid)?;
    write_margins_csv(&report, create(out.join("margins.csv"))?)?;
    let per_condition: serde_json::Map<String, Value> = report
        .names
        .iter()
        .map(|n| (n.clone(), json!(report.condition_verdict(n))))
        .collect();
    let verdict = json!({
        "summary": report.summary(),
        "conditions": per_condition,
        "identities": report.identities,
        "vacuous": report.vacuous,
        "grid": {"t0": report.grid.first(), "t_end": report.grid.last(), "points": report.grid.len()},
    });
    write_json(&out.join("verdict.json"), &verdict)?;
    Ok((verdict_code(report.verdict), verdict))
}

fn cmd_rate(cfg: &RunConfig, out: &Path) -> Result<(i32, Value), RunError> {
    let claim = cfg.claim.as_ref().ok_or_else(|| missing("claim"))?;
    let rate = cfg.rate.clone().unwrap_or_default();
    if let Some(path) = &rate.trajectory {
        if !path.is_file() {
            return Err(RunError::MissingInput(format!("trajectory file {} not found", path.display())));
        }
        let cols = read_columns(File::open(path)?, &["t", "fgap"])?;
        let verdict = bound_check_series(&cols[0], &cols[1], rate.f_min.unwrap_or(0.0), claim)?;
        write_json(&out.join("rate.json"), &verdict)?;
        return Ok((rate_code(verdict.verdict), json!({"source": path, "rate": verdict})));
    }
    if cfg.simulate.is_none() {
        return Err(RunError::Config("rate needs 'rate.trajectory' or an inline 'simulate' block".into()));
    }
    let sim = cfg.section(&cfg.simulate, "simulate")?;
    let run = simulate_config(cfg)?;
    write_trajectory_csv(&run.trajectory, create(out.join("trajectory.csv"))?)?;
    let verdict = run.rate.clone().expect("claim present");
    write_json(&out.join("rate.json"), &verdict)?;
    let code = if early_stop(run.trajectory.status) { EXIT_EARLY_STOP } else { rate_code(verdict.verdict) };
    Ok((code, trajectory_summary(&run, sim.integrator.rtol, sim.integrator.atol)))
}

fn cmd_ip(cfg: &RunConfig, out: &Path) -> Result<(i32, Value), RunError> {
    let ip = cfg.section(&cfg.ip, "ip")?;
    let obj = cfg.objective()?;
    let seq = inertial_proximal(obj.as_ref(), ip)?;
    write_iterates_csv(&seq, create(out.join("iterates.csv"))?)?;
    let fgaps = seq.fgaps();
    let monotone = check_monotone(&fgaps, 0.0, 0.0);
    let rate = match &cfg.claim {
        Some(c) => Some(bound_check_series(&seq.ks()[1..], &fgaps[1..], seq.f_min.unwrap_or(f64::NAN), c)?),
        None => None,
    };
    let code = rate.as_ref().map_or(EXIT_OK, |r| rate_code(r.verdict));
    let result = json!({
        "iterations": ip.iterations,
        "final_x": seq.iterates.last().map(|it| &it.x),
        "final_fgap": fgaps.last(),
        "sup_k2_fgap": seq.sup_k2_fgap,
        "sup_k2_delta_fgap": seq.sup_k2_delta_fgap,
        "delta": seq.delta,
        "fgap_nonincreasing": monotone.ok,
        "rate": rate,
    });
    Ok((code, result))
}

fn grid_points(params: &[(String, Vec<Value>)]) -> Vec<Vec<Value>> {
    let mut points = vec![Vec::new()];
    for (_, values) in params {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    points
}

/// Fans the base config out over the sweep grid, `jobs` points at a time.
pub fn cmd_sweep(cfg: &RunConfig, doc: &Value, out: &Path, jobs: usize) -> Result<(i32, Value), RunError> {
    let sweep = cfg.section(&cfg.sweep, "sweep")?;
    let sub: Command = sweep.command.parse()?;
    if sub == Command::Sweep {
        return Err(RunError::Config("sweeps cannot nest".into()));
    }
    if sweep.parameters.is_empty() || sweep.parameters.values().any(Vec::is_empty) {
        return Err(RunError::Config("sweep.parameters needs at least one non-empty value list".into()));
    }
    let mut base = doc.clone();
    let obj = base.as_object_mut().ok_or_else(|| RunError::Config("config must be a JSON object".into()))?;
    obj.remove("sweep");
    obj.insert("command".into(), Value::String(sub.as_str().into()));
    let params: Vec<(String, Vec<Value>)> = sweep.parameters.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let points = grid_points(&params);

    let mut docs = Vec::with_capacity(points.len());
    for values in &points {
        let mut d = base.clone();
        for ((path, _), v) in params.iter().zip(values) {
            set_path(&mut d, path, v.clone())?;
        }
        RunConfig::from_value(d.clone())?;
        docs.push(d);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| RunError::Internal(e.to_string()))?;
    let codes: Vec<i32> = pool.install(|| {
        docs.par_iter()
            .enumerate()
            .map(|(i, d)| execute(sub, d.clone(), &out.join(format!("point_{i:04}"))))
            .collect()
    });

    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(out.join("index.csv"))?);
    let mut header = vec!["index".to_string(), "dir".to_string()];
    header.extend(params.iter().map(|(k, _)| k.clone()));
    header.push("exit_code".into());
    w.write_record(&header).map_err(inertia_core::io::IoError::from)?;
    for (i, (values, code)) in points.iter().zip(&codes).enumerate() {
        let mut row = vec![i.to_string(), format!("point_{i:04}")];
        row.extend(values.iter().map(|v| v.to_string()));
        row.push(code.to_string());
        w.write_record(&row).map_err(inertia_core::io::IoError::from)?;
    }
    w.flush()?;
    let code = codes.iter().copied().max().unwrap_or(EXIT_OK);
    Ok((code, json!({"points": points.len(), "command": sub.as_str(), "exit_codes": codes})))
}

pub(crate) fn write_json_file(path: &Path, v: &impl Serialize) -> Result<(), RunError> {
    write_json(path, v)
}

pub(crate) fn create_file(path: PathBuf) -> Result<BufWriter<File>, RunError> {
    create(path)
}
