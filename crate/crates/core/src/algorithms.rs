//! Inertial proximal iterations `y_k = x_k + α_k(x_k − x_{k−1})`, `x_{k+1} = prox_{λ_k f}(y_k)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problems::{Objective, ProblemError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgorithmError {
    #[error("objective '{0}' has no proximal oracle")]
    MissingProx(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Extrapolation coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaRule {
    Constant { value: f64 },
    /// `α_k = max(0, 1 − α/k)`, with `α_0 = 0`.
    OneMinusOverK { alpha: f64 },
}

impl AlphaRule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            AlphaRule::Constant { value } => value,
            AlphaRule::OneMinusOverK { alpha } => {
                if k == 0 {
                    0.0
                } else {
                    (1.0 - alpha / k as f64).max(0.0)
                }
            }
        }
    }
}

/// Proximal step sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaRule {
    Constant { value: f64 },
    /// `λ_k = max(k, 1)^δ`
    Power { delta: f64 },
}

impl LambdaRule {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            LambdaRule::Constant { value } => value,
            LambdaRule::Power { delta } => (k.max(1) as f64).powf(delta),
        }
    }

    pub fn delta(&self) -> f64 {
        match *self {
            LambdaRule::Constant { .. } => 0.0,
            LambdaRule::Power { delta } => delta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IPConfig {
    pub alpha_rule: AlphaRule,
    pub lambda_rule: LambdaRule,
    pub iterations: usize,
    pub x0: Vec<f64>,
    /// Predecessor `x_{−1}`; defaults to `x0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_prev: Option<Vec<f64>>,
}

impl IPConfig {
    pub fn validate(&self, dim: usize) -> Result<(), AlgorithmError> {
        let bad = |m: String| Err(AlgorithmError::Config(m));
        if self.x0.len() != dim {
            return bad(format!("x0 has length {}, objective dimension is {dim}", self.x0.len()));
        }
        if let Some(p) = &self.x_prev {
            if p.len() != dim {
                return bad(format!("x_prev has length {}, objective dimension is {dim}", p.len()));
            }
        }
        if self.x0.iter().chain(self.x_prev.iter().flatten()).any(|v| !v.is_finite()) {
            return bad("starting points must be finite".into());
        }
        match self.alpha_rule {
            AlphaRule::Constant { value } if !(value.is_finite() && value >= 0.0) => {
                return bad(format!("constant α_k must be finite and nonnegative, got {value}"))
            }
            AlphaRule::OneMinusOverK { alpha } if !alpha.is_finite() => return bad("α must be finite".into()),
            _ => {}
        }
        match self.lambda_rule {
            LambdaRule::Constant { value } if !(value.is_finite() && value > 0.0) => {
                bad(format!("constant λ_k must be positive, got {value}"))
            }
            LambdaRule::Power { delta } if !delta.is_finite() => bad("δ must be finite".into()),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Iterate {
    pub k: usize,
    pub x: Vec<f64>,
    /// `NaN` when the objective's minimum is unknown.
    pub fgap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterateSequence {
    pub iterates: Vec<Iterate>,
    pub f_min: Option<f64>,
    /// `sup_{k≥1} k² fgap_k`
    pub sup_k2_fgap: f64,
    /// `sup_{k≥1} k^{2+δ} fgap_k`, δ from the λ rule.
    pub sup_k2_delta_fgap: f64,
    pub delta: f64,
}

impl IterateSequence {
    /// `sup k^power · fgap_k` over `lo ≤ k ≤ hi`.
    pub fn sup_weighted(&self, power: f64, lo: usize, hi: usize) -> f64 {
        self.iterates
            .iter()
            .filter(|it| it.k >= lo && it.k <= hi)
            .map(|it| (it.k as f64).powf(power) * it.fgap)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn ks(&self) -> Vec<f64> {
        self.iterates.iter().map(|it| it.k as f64).collect()
    }

    pub fn fgaps(&self) -> Vec<f64> {
        self.iterates.iter().map(|it| it.fgap).collect()
    }
}

/// `argmin_ξ f(ξ) + ‖y − ξ‖²/(2λ)`.
pub fn prox_step(obj: &dyn Objective, y: &[f64], lambda: f64) -> Result<Vec<f64>, AlgorithmError> {
    if !obj.has_prox() {
        return Err(AlgorithmError::MissingProx(obj.name().to_string()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(AlgorithmError::Config(format!("λ must be positive, got {lambda}")));
    }
    let mut out = vec![0.0; y.len()];
    obj.prox(y, lambda, &mut out)?;
    Ok(out)
}

pub fn inertial_proximal(obj: &dyn Objective, cfg: &IPConfig) -> Result<IterateSequence, AlgorithmError> {
    if !obj.has_prox() {
        return Err(AlgorithmError::MissingProx(obj.name().to_string()));
    }
    let n = obj.dim();
    cfg.validate(n)?;
    let f_min = obj.known_min();
    let gap = |x: &[f64]| -> Result<f64, ProblemError> {
        Ok(match f_min {
            Some(m) => (obj.value(x)? - m).max(0.0),
            None => f64::NAN,
        })
    };

    let mut prev = cfg.x_prev.clone().unwrap_or_else(|| cfg.x0.clone());
    let mut cur = cfg.x0.clone();
    let mut y = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut iterates = Vec::with_capacity(cfg.iterations + 1);
    iterates.push(Iterate { k: 0, x: cur.clone(), fgap: gap(&cur)? });
    for k in 0..cfg.iterations {
        let a = cfg.alpha_rule.at(k);
        if a < 0.0 {
            return Err(AlgorithmError::Config(format!("α_{k} = {a} is negative")));
        }
        let lambda = cfg.lambda_rule.at(k);
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(AlgorithmError::Config(format!("λ_{k} = {lambda} is not positive")));
        }
        for i in 0..n {
            y[i] = cur[i] + a * (cur[i] - prev[i]);
        }
        obj.prox(&y, lambda, &mut next)?;
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        iterates.push(Iterate { k: k + 1, x: cur.clone(), fgap: gap(&cur)? });
    }

    let delta = cfg.lambda_rule.delta();
    let mut seq = IterateSequence { iterates, f_min, sup_k2_fgap: f64::NAN, sup_k2_delta_fgap: f64::NAN, delta };
    if f_min.is_some() {
        seq.sup_k2_fgap = seq.sup_weighted(2.0, 1, usize::MAX);
        seq.sup_k2_delta_fgap = seq.sup_weighted(2.0 + delta, 1, usize::MAX);
    }
    Ok(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TkValue {
    pub value: f64,
    pub terms: usize,
    /// The term budget ran out before the products fell below the cutoff.
    pub truncated: bool,
}

/// Truncated `t_k = 1 + Σ_{i≥k} Π_{j=k}^{i} α_j`, stopping once a product drops below `1e-16`.
pub fn t_k(rule: &AlphaRule, k: usize, max_terms: usize) -> TkValue {
    let mut prod = 1.0;
    let mut value = 1.0;
    for terms in 0..max_terms {
        prod *= rule.at(k + terms);
        if prod < 1e-16 {
            return TkValue { value, terms, truncated: false };
        }
        value += prod;
    }
    TkValue { value, terms: max_terms, truncated: true }
}
