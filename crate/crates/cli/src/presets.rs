//! Built-in run configurations.

use serde_json::{json, Value};

use crate::RunError;

pub const NAMES: &[&str] = &[
    "avd3",
    "avd4",
    "hessian-apr",
    "cor1.6",
    "prop-jordan",
    "convlin",
    "thm6.4",
    "smoke-1d",
    "fig1",
    "fig2",
    "gamma-boundary",
    "gamma-violated",
    "exp-rescale-gamma",
    "exp-rescale-h2plus",
    "eq61",
    "system-a-hessian",
    "ip",
    "ip-delta",
    "ip-hand",
];

fn constant(k: f64) -> Value {
    json!({"family": "constant", "params": {"k": k}})
}

fn alpha_over_t(alpha: f64) -> Value {
    json!({"family": "alpha-over-t-power", "params": {"alpha": alpha, "q": 0.0}})
}

fn alpha_over_t_power(alpha: f64, q: f64) -> Value {
    json!({"family": "alpha-over-t-power", "params": {"alpha": alpha, "q": q}})
}

fn exp_power(k: f64, mu: f64, q: f64) -> Value {
    json!({"family": "exp-power", "params": {"k": k, "mu": mu, "q": q}})
}

fn power(k: f64, p: f64) -> Value {
    json!({"family": "power", "params": {"k": k, "p": p}})
}

fn dynamics(gamma: Value, beta: Value, b: Value, t0: f64) -> Value {
    json!({"gamma": gamma, "beta": beta, "b": b, "t0": t0})
}

const QUAD_X0: [f64; 2] = [1.0, 1.0];
const BARRIER_X0: [f64; 2] = [2.0, 0.5];

#[allow(clippy::too_many_arguments)]
fn simulate(
    description: &str,
    objective: &str,
    dyn_: Value,
    x0: &[f64],
    horizon: f64,
    integrator: Value,
    certificate: Value,
    claim: Value,
) -> Value {
    json!({
        "command": "simulate",
        "description": description,
        "objective": {"preset": objective},
        "dynamics": dyn_,
        "simulate": {"x0": x0, "horizon": horizon, "integrator": integrator, "certificate": certificate},
        "claim": claim,
    })
}

fn check(description: &str, set: &str, dyn_: Value, params: Value, certificate: Value) -> Value {
    let mut v = json!({
        "command": "check",
        "description": description,
        "dynamics": dyn_,
        "check": {"condition_set": set, "grid": {"t0": 1.0}, "params": params},
    });
    if !certificate.is_null() {
        v["check"]["certificate"] = certificate;
    }
    v
}

fn fig1() -> Value {
    let mut runs = Vec::new();
    for alpha in [1.0, 3.0] {
        for mu in [0.0, 1.0, 2.0] {
            for c in [0.0, 1.0] {
                let nus: &[f64] = if c == 0.0 || mu == 0.0 { &[0.0] } else { &[0.0, mu] };
                for &nu in nus {
                    let beta = if c == 0.0 { constant(0.0) } else { exp_power(c, nu, 1.0) };
                    runs.push(json!({
                        "label": format!("alpha{alpha}_mu{mu}_c{c}_nu{nu}"),
                        "dynamics": dynamics(constant(alpha), beta, exp_power(1.0, mu, 1.0), 0.0),
                    }));
                }
            }
        }
    }
    runs.push(json!({"label": "strong", "dynamics": dynamics(constant(2.0), constant(0.0), constant(1.0), 0.0)}));
    json!({
        "command": "simulate",
        "description": "log-barrier under constant damping with exponential rescaling, plus the strongly convex reference system",
        "objective": {"preset": "log-barrier"},
        "simulate": {"x0": BARRIER_X0, "horizon": 5.0, "integrator": {"rtol": 1e-8, "atol": 1e-12}},
        "figure": {
            "name": "fig1",
            "note": "parameter grid is a guess: alpha in {1,3}, mu in {0,1,2}, c in {0,1}, nu in {0,mu}",
            "runs": runs,
        },
    })
}

fn fig2() -> Value {
    let systems = [
        ("heavy-ball", constant(1.0), constant(0.0), constant(1.0), 100.0),
        ("heavy-ball-hessian", constant(1.0), constant(1.0), constant(1.0), 100.0),
        ("avd3", alpha_over_t(3.0), constant(0.0), constant(1.0), 100.0),
        ("avd3-hessian", alpha_over_t(3.0), constant(1.0), constant(1.0), 100.0),
        ("rescaled-t", alpha_over_t(3.0), constant(0.0), power(1.0, 1.0), 100.0),
        ("jordan", alpha_over_t(4.0), constant(1.0), json!({"family": "sum", "params": {"terms": [constant(1.0), power(1.0, -1.0)]}}), 100.0),
        ("convlin", constant(1.0), constant(0.0), exp_power(1.0, 1.0, 1.0), 12.0),
    ];
    let mut runs = Vec::new();
    for objective in ["fig2-caption", "fig2-eq"] {
        for (label, g, be, b, horizon) in &systems {
            runs.push(json!({
                "label": format!("{objective}_{label}"),
                "objective": {"preset": objective},
                "dynamics": dynamics(g.clone(), be.clone(), b.clone(), 1.0),
                "horizon": horizon,
            }));
        }
    }
    json!({
        "command": "simulate",
        "description": "systems of the comparison table on both ill-conditioned quadratics",
        "objective": {"preset": "fig2-caption"},
        "simulate": {"x0": QUAD_X0, "horizon": 100.0, "integrator": {"rtol": 1e-8, "atol": 1e-12}},
        "figure": {"name": "fig2", "runs": runs},
    })
}

fn ip(description: &str, alpha_rule: Value, lambda_rule: Value, k: usize, objective: Value, x0: &[f64], claim: Value) -> Value {
    json!({
        "command": "ip",
        "description": description,
        "objective": objective,
        "ip": {"alpha_rule": alpha_rule, "lambda_rule": lambda_rule, "iterations": k, "x0": x0},
        "claim": claim,
    })
}

/// The JSON document for a named preset.
pub fn preset(name: &str) -> Result<Value, RunError> {
    let tight = json!({"rtol": 1e-9, "atol": 1e-12});
    let gamma_cert = json!({"recipe": "gamma"});
    let p_cert = json!({"recipe": "p", "r": 1.0 / 3.0, "m": 2.0 / 3.0});
    let t2 = json!({"kind": "power", "s": 2.0, "window": [50.0, 500.0]});
    Ok(match name {
        "avd3" | "avd4" => {
            let alpha = if name == "avd3" { 3.0 } else { 4.0 };
            simulate(
                &format!("gamma = {alpha}/t, no Hessian damping, b = 1"),
                "quad-diag",
                dynamics(alpha_over_t(alpha), constant(0.0), constant(1.0), 1.0),
                &QUAD_X0,
                500.0,
                tight,
                gamma_cert,
                t2,
            )
        }
        "hessian-apr" => simulate(
            "gamma = 4/t, beta = 1, b = 1",
            "quad-diag",
            dynamics(alpha_over_t(4.0), constant(1.0), constant(1.0), 1.0),
            &QUAD_X0,
            500.0,
            tight,
            gamma_cert,
            t2,
        ),
        "cor1.6" => simulate(
            "gamma = 2/t, b = t",
            "quad-diag",
            dynamics(alpha_over_t(2.0), constant(0.0), power(1.0, 1.0), 1.0),
            &QUAD_X0,
            500.0,
            tight,
            p_cert,
            json!({"kind": "power", "s": 5.0 / 3.0, "window": [50.0, 500.0]}),
        ),
        "prop-jordan" => simulate(
            "gamma = 4/t, beta = 1, b = 1 + 1/t",
            "quad-diag",
            dynamics(
                alpha_over_t(4.0),
                constant(1.0),
                json!({"family": "sum", "params": {"terms": [constant(1.0), power(1.0, -1.0)]}}),
                1.0,
            ),
            &QUAD_X0,
            500.0,
            tight,
            gamma_cert,
            t2,
        ),
        "convlin" => simulate(
            "gamma = 1, b = e^t",
            "quad-diag",
            dynamics(constant(1.0), constant(0.0), exp_power(1.0, 1.0, 1.0), 1.0),
            &QUAD_X0,
            25.0,
            json!({"rtol": 1e-6, "atol": 1e-12}),
            p_cert,
            json!({"kind": "exp_power", "c": 1.0, "q": 1.0, "window": [2.5, 25.0]}),
        ),
        "thm6.4" => simulate(
            "gamma = 1/sqrt(t), b = e^{2 sqrt(t)}",
            "log-barrier",
            dynamics(alpha_over_t_power(1.0, 0.5), constant(0.0), exp_power(1.0, 2.0, 0.5), 1.0),
            &BARRIER_X0,
            100.0,
            tight,
            p_cert,
            json!({"kind": "exp_power", "c": 1.0, "q": 0.5, "window": [10.0, 100.0]}),
        ),
        "smoke-1d" => json!({
            "command": "simulate",
            "description": "one-dimensional unit quadratic, gamma = 3/t",
            "objective": {"preset": "quad-custom", "matrix": [[1.0]]},
            "dynamics": dynamics(alpha_over_t(3.0), constant(0.0), constant(1.0), 1.0),
            "simulate": {"x0": [1.0], "horizon": 50.0},
        }),
        "fig1" => fig1(),
        "fig2" => fig2(),
        "gamma-boundary" | "gamma-violated" => {
            let alpha = if name == "gamma-boundary" { 3.0 } else { 2.0 };
            check(
                &format!("growth condition for gamma = {alpha}/t, b = 1"),
                "GammaGrowth",
                dynamics(alpha_over_t(alpha), constant(0.0), constant(1.0), 1.0),
                json!({}),
                Value::Null,
            )
        }
        "exp-rescale-gamma" | "exp-rescale-h2plus" => {
            let (set, params) = if name == "exp-rescale-gamma" {
                ("GammaGrowth", json!({}))
            } else {
                ("H2plus", json!({"r": 1.0 / 3.0, "m": 2.0 / 3.0}))
            };
            check(
                "b = e^{2 sqrt(t)}, gamma = 1/sqrt(t)",
                set,
                dynamics(alpha_over_t_power(1.0, 0.5), constant(0.0), exp_power(1.0, 2.0, 0.5), 1.0),
                params,
                Value::Null,
            )
        }
        "eq61" => check(
            "gamma = 3/t against the second-order damping condition with p0 = 0, r = 1/3",
            "Eq61",
            dynamics(alpha_over_t(3.0), constant(0.0), constant(1.0), 1.0),
            json!({"p0": 0.0, "r": 1.0 / 3.0}),
            Value::Null,
        ),
        "system-a-hessian" => {
            let mut v = check(
                "full Lyapunov system for gamma = 4/t, beta = 1, b = 1, from t = 2",
                "SystemA",
                dynamics(alpha_over_t(4.0), constant(1.0), constant(1.0), 2.0),
                json!({}),
                gamma_cert,
            );
            v["check"]["grid"]["t0"] = json!(2.0);
            v
        }
        "ip" => ip(
            "inertial proximal, alpha_k = 1 - 4/k, lambda = 1",
            json!({"kind": "one_minus_over_k", "alpha": 4.0}),
            json!({"kind": "constant", "value": 1.0}),
            2000,
            json!({"preset": "quad-diag"}),
            &QUAD_X0,
            json!({"kind": "power", "s": 2.0, "window": [20.0, 2000.0]}),
        ),
        "ip-delta" => ip(
            "inertial proximal, alpha_k = 1 - 5/k, lambda_k = k",
            json!({"kind": "one_minus_over_k", "alpha": 5.0}),
            json!({"kind": "power", "delta": 1.0}),
            2000,
            json!({"preset": "quad-diag"}),
            &QUAD_X0,
            json!({"kind": "power", "s": 3.0, "window": [20.0, 2000.0]}),
        ),
        "ip-hand" => ip(
            "plain proximal point on the unit quadratic",
            json!({"kind": "constant", "value": 0.0}),
            json!({"kind": "constant", "value": 1.0}),
            3,
            json!({"preset": "quad-custom", "matrix": [[1.0]]}),
            &[1.0],
            Value::Null,
        ),
        other => return Err(RunError::Config(format!("unknown preset '{other}' (known: {})", NAMES.join(", ")))),
    })
}
