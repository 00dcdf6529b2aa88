//! Acceptance suite: one PASS/FAIL line per criterion with its runtime.
//! Exits nonzero when any criterion fails.

use std::path::Path;
use std::process::{Command as Proc, ExitCode};
use std::time::{Duration, Instant};

use inertia_core::certificates::TOL_MARGIN;
use inertia_core::{
    bound_check, bound_check_series, check_conditions, check_monotone, derive_gamma_certificate, derive_p_certificate, hvp_fd,
    inertial_proximal, oscillation_count, problems, Certificate, ConditionReport, ConditionSet, ExtraParams, GridSpec,
    IntegralProfile, IterateSequence, RateClaim, RateOutcome, RateVerdict, Sample, Schedule, Status, Trajectory, Verdict,
};
use inertia_lab::config::set_path;
use inertia_lab::presets::preset;
use inertia_lab::{simulate_config, RunConfig, SimRun};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Check = Result<Outcome, String>;

struct Outcome {
    pass: bool,
    detail: String,
    info: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into(), info: Vec::new() }
    }

    fn info(mut self, line: impl Into<String>) -> Self {
        self.info.push(line.into());
        self
    }
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn record(&mut self, id: &str, title: &str, budget: Option<Duration>, elapsed: Duration, result: Check) {
        let secs = elapsed.as_secs_f64();
        let (pass, detail, info) = match result {
            Ok(o) => (o.pass, o.detail, o.info),
            Err(e) => (false, format!("error: {e}"), Vec::new()),
        };
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let ok = pass && in_time;
        if !ok {
            self.failures += 1;
        }
        let budget_txt = match budget {
            Some(b) => format!("{secs:.2} s / {:.1} s", b.as_secs_f64()),
            None => format!("{secs:.2} s"),
        };
        let late = if in_time { "" } else { " [over time budget]" };
        println!("{} {id:>3} {title} ({budget_txt}){late}: {detail}", if ok { "PASS" } else { "FAIL" });
        for line in info {
            println!("         info: {line}");
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let r = (b / a).ln();
    (0..n).map(|i| a * (r * i as f64 / (n - 1) as f64).exp()).collect()
}

fn config(name: &str, sets: &[(&str, Value)]) -> Result<RunConfig, String> {
    let mut doc = preset(name).map_err(err)?;
    for (path, v) in sets {
        set_path(&mut doc, path, v.clone()).map_err(err)?;
    }
    RunConfig::from_value(doc).map_err(err)
}

fn simulate(name: &str, sets: &[(&str, Value)]) -> Result<SimRun, String> {
    simulate_config(&config(name, sets)?).map_err(err)
}

// 1 ------------------------------------------------------------------------

fn gamma_fd_residual(profile: &IntegralProfile, t: f64) -> Result<f64, String> {
    let h = 1e-3 * t;
    let g = |s: f64| profile.big_gamma_numeric(s).map_err(err);
    let t0 = profile.t0();
    let deriv = if t - h >= t0 {
        (g(t + h)? - g(t - h)?) / (2.0 * h)
    } else {
        (-3.0 * g(t)? + 4.0 * g(t + h)? - g(t + 2.0 * h)?) / (2.0 * h)
    };
    Ok((deriv - profile.base.value_fast(t) * g(t)? + 1.0).abs())
}

fn criterion_1() -> Check {
    let grid = log_grid(1.0, 1000.0, 100);
    let mut worst_rel = 0.0f64;
    for alpha in [2.0, 3.0, 5.0] {
        let profile = IntegralProfile::new(Schedule::alpha_over_t(alpha, 1.0)).map_err(err)?;
        for &t in &grid {
            let exact = t / (alpha - 1.0);
            for g in [profile.big_gamma(t).map_err(err)?, profile.big_gamma_numeric(t).map_err(err)?] {
                worst_rel = worst_rel.max((g - exact).abs() / exact);
            }
        }
    }
    let mut worst_res = 0.0f64;
    for base in [Schedule::constant(1.0, 1.0), Schedule::alpha_over_t_power(1.0, 0.5, 1.0)] {
        let profile = IntegralProfile::new(base).map_err(err)?;
        for &t in &grid {
            worst_res = worst_res.max(gamma_fd_residual(&profile, t)?);
        }
    }
    Ok(Outcome::new(
        worst_rel <= 1e-8 && worst_res <= 1e-6,
        format!("max rel err vs t/(alpha-1) = {worst_rel:.2e} (tol 1e-8); max ODE residual = {worst_res:.2e} (tol 1e-6)"),
    ))
}

// 2 ------------------------------------------------------------------------

fn equivalence_case(label: &str, gamma: Schedule, beta: Schedule, b: Schedule, cert: Certificate, t0: f64) -> Result<(bool, String), String> {
    let grid = GridSpec::new(t0);
    let extra = ExtraParams::default();
    let a = check_conditions(ConditionSet::SystemA, &gamma, &beta, &b, Some(&cert), &extra, &grid).map_err(err)?;
    let bb = check_conditions(ConditionSet::SystemB, &gamma, &beta, &b, Some(&cert), &extra, &grid).map_err(err)?;
    let mut worst = 0.0f64;
    for &t in &grid.grid().map_err(err)? {
        let (r1, r2) = cert.recovery_residuals(t).map_err(err)?;
        worst = worst.max(r1).max(r2);
    }
    let ok = a.verdict == bb.verdict && worst <= 1e-8;
    Ok((ok, format!("{label}: A={:?} B={:?} recovery {worst:.1e}", a.verdict, bb.verdict)))
}

fn criterion_2() -> Check {
    let zero = |t0| Schedule::constant(0.0, t0);
    let one = |t0| Schedule::constant(1.0, t0);
    let mut cases = Vec::new();
    {
        let (g, be, b) = (Schedule::alpha_over_t(4.0, 1.0), zero(1.0), one(1.0));
        let cert = derive_gamma_certificate(&g, &be, &b).map_err(err)?;
        cases.push(equivalence_case("gamma", g, be, b, cert, 1.0)?);
    }
    for t0 in [1.0, 2.0] {
        let (g, be, b) = (Schedule::alpha_over_t(4.0, t0), one(t0), one(t0));
        let cert = derive_gamma_certificate(&g, &be, &b).map_err(err)?;
        cases.push(equivalence_case(&format!("gamma-hessian t0={t0}"), g, be, b, cert, t0)?);
    }
    {
        let (g, be, b) = (Schedule::alpha_over_t(2.0, 1.0), zero(1.0), Schedule::power(1.0, 1.0, 1.0));
        let cert = derive_p_certificate(&g, &be, &b, 1.0 / 3.0, 2.0 / 3.0).map_err(err)?;
        cases.push(equivalence_case("p(1/3,2/3)", g, be, b, cert, 1.0)?);
    }
    let pass = cases.iter().all(|(ok, _)| *ok);
    Ok(Outcome::new(pass, cases.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join("; ")))
}

// 3, 4 ----------------------------------------------------------------------

fn check_preset(name: &str) -> Result<ConditionReport, String> {
    let cfg = config(name, &[])?;
    let check = cfg.check.as_ref().ok_or("preset has no check section")?;
    let spec = cfg.dynamics().map_err(err)?;
    check_conditions(check.condition_set, &spec.gamma, &spec.beta, &spec.b, None, &check.params, &check.grid).map_err(err)
}

fn criterion_3() -> Check {
    let eq = check_preset("gamma-boundary")?;
    let mut worst_eq = 0.0f64;
    for (m, sc) in eq.margins.iter().flatten().zip(eq.scales.iter().flatten()) {
        worst_eq = worst_eq.max(if *m == 0.0 { 0.0 } else { m.abs() / sc });
    }
    let vi = check_preset("gamma-violated")?;
    let mut worst_vi = 0.0f64;
    for m in vi.margins.iter().flatten() {
        worst_vi = worst_vi.max((m + 1.0).abs());
    }
    let pass = worst_eq <= 1e-9 && eq.verdict == Verdict::Boundary && worst_vi <= 1e-9 && vi.verdict == Verdict::Violated;
    Ok(Outcome::new(
        pass,
        format!(
            "alpha=3: max |margin|/scale = {worst_eq:.1e}, verdict {:?}; alpha=2: max |margin+1| = {worst_vi:.1e}, verdict {:?}",
            eq.verdict, vi.verdict
        ),
    ))
}

fn criterion_4() -> Check {
    let g = check_preset("exp-rescale-gamma")?;
    let points = g.grid.len();
    let violated_everywhere = (0..points).all(|k| g.relative.iter().any(|col| col[k] < -TOL_MARGIN));
    let h = check_preset("exp-rescale-h2plus")?;
    let pass = violated_everywhere && g.verdict == Verdict::Violated && h.verdict == Verdict::Satisfied;
    Ok(Outcome::new(
        pass,
        format!(
            "GammaGrowth {:?}, violated at every one of {points} points: {violated_everywhere}; H2plus {:?}",
            g.verdict, h.verdict
        ),
    ))
}

// 5 ------------------------------------------------------------------------

fn criterion_5() -> Check {
    let tol = json!(1e-9);
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["avd4", "hessian-apr", "cor1.6"] {
        let run = simulate(name, &[("simulate.integrator.rtol", tol.clone()), ("simulate.integrator.atol", tol.clone())])?;
        let energy: Vec<f64> = run.trajectory.samples.iter().map(|s| s.energy).collect();
        let m = check_monotone(&energy, 1e-8, 1e-8);
        let complete = run.trajectory.status == Status::Completed && run.trajectory.t_end == 500.0;
        pass &= m.ok && complete && !energy.is_empty();
        parts.push(format!(
            "{name}: {} samples, monotone {}{}",
            energy.len(),
            m.ok,
            if complete { "" } else { " (incomplete run)" }
        ));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

// 6, 7 ---------------------------------------------------------------------

struct RateCase {
    id: &'static str,
    preset: &'static str,
    window: [f64; 2],
}

const RATE_CASES: [RateCase; 5] = [
    RateCase { id: "a", preset: "avd3", window: [50.0, 500.0] },
    RateCase { id: "b", preset: "cor1.6", window: [50.0, 500.0] },
    RateCase { id: "c", preset: "prop-jordan", window: [50.0, 500.0] },
    RateCase { id: "d", preset: "convlin", window: [2.5, 25.0] },
    RateCase { id: "e", preset: "thm6.4", window: [10.0, 100.0] },
];

fn describe(v: &RateVerdict) -> String {
    let mut s = format!("{:?}, slope {:.3}, sup {:.3e}", v.verdict, v.trend_slope, v.sup_product);
    if v.vacuous {
        s.push_str(&format!(", vacuous: all {} window points below the fgap floor", v.excluded_points));
    } else if v.excluded_points > 0 {
        s.push_str(&format!(", {} points below floor", v.excluded_points));
    }
    s
}

fn criterion_6(runs: &mut Vec<(&'static str, SimRun)>) -> Check {
    let mut parts = Vec::new();
    let mut info = Vec::new();
    let mut pass = true;
    for case in &RATE_CASES {
        let run = simulate(case.preset, &[])?;
        let claim = run_claim(case)?;
        let verdict = run.rate.clone().ok_or("preset carries no claim")?;
        let ok_window = verdict.window == case.window;
        let complete = run.trajectory.status == Status::Completed;
        let ok = verdict.verdict == RateOutcome::Bounded && complete && ok_window;
        pass &= ok;
        parts.push(format!(
            "6{} {}: {}{}",
            case.id,
            case.preset,
            describe(&verdict),
            if complete { String::new() } else { format!(" [stopped early: {}]", run.trajectory.status.as_str()) }
        ));
        if verdict.vacuous {
            // supplementary window where the gap is still resolved
            let early = claim.clone().with_window(5.0, 20.0);
            let v = bound_check(&run.trajectory, &early).map_err(err)?;
            info.push(format!("6{} on [5, 20] (gap above floor): {}", case.id, describe(&v)));
        }
        if let Some(fit) = fitted(&run.trajectory, &claim) {
            info.push(format!("6{} fitted exponent {fit:.4}", case.id));
        }
        if case.id == "a" || case.id == "b" {
            runs.push((case.preset, run));
        }
    }
    let mut out = Outcome::new(pass, parts.join("; "));
    out.info = info;
    Ok(out)
}

fn run_claim(case: &RateCase) -> Result<RateClaim, String> {
    config(case.preset, &[])?.claim.ok_or_else(|| format!("preset {} has no claim", case.preset))
}

fn fitted(traj: &Trajectory, claim: &RateClaim) -> Option<f64> {
    let v = bound_check(traj, claim).ok()?;
    v.fitted_exponent
}

/// Largest `|values_weight|` and `|q|` on the checkpoints, each relative to
/// the magnitude of its leading term.
fn weight_sizes(cert: &Certificate, traj: &Trajectory) -> Result<(f64, f64), String> {
    let rel = |w: f64, lead: f64| if w == 0.0 { 0.0 } else { w.abs() / lead.abs() };
    let (mut wv, mut wq) = (0.0f64, 0.0f64);
    for s in &traj.samples {
        let p = cert.point(s.t).map_err(err)?;
        let (v, q) = cert.weights(s.t).map_err(err)?;
        wv = wv.max(rel(v, (p.theta * p.b * p.sigma).value()));
        wq = wq.max(rel(q, (p.b * p.theta * p.beta).value()));
    }
    Ok((wv, wq))
}

fn saturation(traj: &Trajectory, pick: fn(&Sample) -> f64) -> (f64, f64) {
    let total = traj.samples.last().map(pick).unwrap_or(f64::NAN);
    let t_end = traj.t_end;
    let start = traj.samples.iter().rev().find(|s| s.t <= t_end / 10.0).map(pick).unwrap_or(0.0);
    (total, total - start)
}

fn criterion_7(runs: &[(&'static str, SimRun)]) -> Check {
    let mut parts = Vec::new();
    let mut pass = runs.len() == 2;
    for (name, run) in runs {
        let cert = run.certificate.as_ref().ok_or("run has no certificate")?;
        let (wv, wq) = weight_sizes(cert, &run.trajectory)?;
        for (label, pick, w) in [
            ("values", (|s: &Sample| s.int_values) as fn(&Sample) -> f64, wv),
            ("grads", |s: &Sample| s.int_grads, wq),
        ] {
            let (total, inc) = saturation(&run.trajectory, pick);
            if w <= 1e-12 {
                parts.push(format!(
                    "{name} {label}: weight vanishes identically (max rel {w:.1e}), total {total:.2e}, increment {inc:.2e}; vacuous"
                ));
            } else {
                let ok = inc.abs() <= 0.05 * total.abs();
                pass &= ok;
                parts.push(format!("{name} {label}: increment/total = {:.2e}", inc / total));
            }
        }
    }
    let mut out = Outcome::new(pass, parts.join("; "));
    // a preset whose weights do not vanish exercises the same test for real
    let avd4 = simulate("avd4", &[])?;
    let (total, inc) = saturation(&avd4.trajectory, |s| s.int_values);
    out = out.info(format!("avd4 values integral: total {total:.4}, last-decade increment/total = {:.2e}", inc / total));
    Ok(out)
}

// 8 ------------------------------------------------------------------------

fn criterion_8() -> Check {
    let with = simulate("hessian-apr", &[("simulate.certificate", Value::Null), ("claim", Value::Null)])?;
    let without = simulate(
        "hessian-apr",
        &[("simulate.certificate", Value::Null), ("claim", Value::Null), ("dynamics.beta.params.k", json!(0.0))],
    )?;
    let (c1, c0) = (oscillation_count(&with.trajectory), oscillation_count(&without.trajectory));
    let f1 = with.trajectory.samples.last().map(|s| s.fgap).unwrap_or(f64::NAN);
    let f0 = without.trajectory.samples.last().map(|s| s.fgap).unwrap_or(f64::NAN);
    let complete = with.trajectory.status == Status::Completed && without.trajectory.status == Status::Completed;
    Ok(Outcome::new(
        c1 < c0 && f1 <= 10.0 * f0 && complete,
        format!("oscillations beta=1: {c1}, beta=0: {c0}; terminal fgap beta=1: {f1:.3e}, beta=0: {f0:.3e}"),
    ))
}

// 9 ------------------------------------------------------------------------

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["quad-diag", "log-barrier"] {
        let obj = problems::preset(name).map_err(err)?;
        let mut worst = 0.0f64;
        let mut n = 0;
        while n < 100 {
            let x = [rng.random_range(0.05..5.0), rng.random_range(0.05..5.0)];
            if !obj.admissible(&x) {
                continue;
            }
            let v = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let (mut exact, mut fd) = ([0.0; 2], [0.0; 2]);
            obj.hvp(&x, &v, &mut exact).map_err(err)?;
            hvp_fd(obj.as_ref(), &x, &v, None, &mut fd).map_err(err)?;
            let num = (exact[0] - fd[0]).hypot(exact[1] - fd[1]);
            worst = worst.max(num / exact[0].hypot(exact[1]));
            n += 1;
        }
        pass &= worst <= 1e-6;
        parts.push(format!("{name}: max rel err {worst:.2e}"));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

// 10 -----------------------------------------------------------------------

fn iterate(name: &str, sets: &[(&str, Value)]) -> Result<(RunConfig, IterateSequence), String> {
    let cfg = config(name, sets)?;
    let ip = cfg.ip.as_ref().ok_or("preset has no ip section")?;
    let seq = inertial_proximal(cfg.objective().map_err(err)?.as_ref(), ip).map_err(err)?;
    Ok((cfg, seq))
}

fn criterion_10() -> Check {
    let (cfg, seq) = iterate("ip", &[])?;
    let claim = cfg.claim.clone().ok_or("ip preset has no claim")?;
    let v = bound_check_series(&seq.ks()[1..], &seq.fgaps()[1..], seq.f_min.unwrap_or(f64::NAN), &claim).map_err(err)?;
    let rate_ok = v.verdict == RateOutcome::Bounded && !v.vacuous;

    let (_, plain) = iterate("ip", &[("ip.alpha_rule", json!({"kind": "constant", "value": 0.0}))])?;
    let mono = check_monotone(&plain.fgaps(), 0.0, 0.0);

    let (_, hand) = iterate("ip-hand", &[])?;
    let x3 = hand.iterates.iter().find(|it| it.k == 3).map(|it| it.x[0]);
    let hand_ok = x3.is_some_and(|x| x.to_bits() == 0.125f64.to_bits());

    Ok(Outcome::new(
        rate_ok && mono.ok && hand_ok,
        format!(
            "alpha_k = 1-4/k: {}; alpha_k = 0: fgap nonincreasing {}; hand x3 = {}",
            describe(&v),
            mono.ok,
            x3.map_or("missing".into(), |x| x.to_string())
        ),
    ))
}

// 11 -----------------------------------------------------------------------

fn criterion_11(scratch: &Path) -> Check {
    let bin = env!("CARGO_BIN_EXE_inertia-lab");
    let mut files = Vec::new();
    for run in ["first", "second"] {
        let out = scratch.join(run);
        let status = Proc::new(bin)
            .args(["simulate", "--preset", "avd3", "--out"])
            .arg(&out)
            .status()
            .map_err(err)?;
        if !status.success() {
            return Ok(Outcome::new(false, format!("simulate exited with {status}")));
        }
        files.push(std::fs::read(out.join("trajectory.csv")).map_err(err)?);
    }
    let same = files[0] == files[1];
    Ok(Outcome::new(same && !files[0].is_empty(), format!("two runs, {} bytes each, identical: {same}", files[0].len())))
}

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let mut suite = Suite { failures: 0 };
    let s = Duration::from_secs_f64;
    let (r, e) = timed(criterion_1);
    suite.record("1", "Gamma analytic agreement", Some(s(1.0)), e, r);
    let (r, e) = timed(criterion_2);
    suite.record("2", "SystemA/SystemB equivalence", Some(s(1.0)), e, r);
    let (r, e) = timed(criterion_3);
    suite.record("3", "boundary pinning", Some(s(1.0)), e, r);
    let (r, e) = timed(criterion_4);
    suite.record("4", "exponential rescaling comparison", Some(s(5.0)), e, r);
    let (r, e) = timed(criterion_5);
    suite.record("5", "Lyapunov monotonicity", Some(s(30.0)), e, r);
    let mut runs = Vec::new();
    let (r6, e6) = timed(|| criterion_6(&mut runs));
    let (r7, e7) = timed(|| criterion_7(&runs));
    // 7 shares the budget of 6
    suite.record("6", "rate bound checks", Some(s(60.0).saturating_sub(e7)), e6, r6);
    suite.record("7", "integral estimates saturate", Some(s(60.0).saturating_sub(e6)), e7, r7);
    let (r, e) = timed(criterion_8);
    suite.record("8", "oscillation reduction", Some(s(10.0)), e, r);
    let (r, e) = timed(criterion_9);
    suite.record("9", "HVP fidelity", Some(s(1.0)), e, r);
    let (r, e) = timed(criterion_10);
    suite.record("10", "inertial proximal algorithm", Some(s(2.0)), e, r);
    let (r, e) = timed(|| criterion_11(scratch.path()));
    suite.record("11", "determinism", None, e, r);
    if suite.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
