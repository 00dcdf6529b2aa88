//! Time-varying coefficients and the damping clocks `p_γ` and `Γ_γ`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet;
use crate::quadrature::{self, QuadratureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("t = {t} is outside the domain of the schedule: {reason}")]
    Domain { t: f64, reason: String },
    #[error("exp of {log} overflows at t = {t}; use the log accessor")]
    Overflow { t: f64, log: f64 },
    #[error("tail integral of 1/p diverges or could not be established ({0:?})")]
    DivergentTail(H0Verdict),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid schedule parameters: {0}")]
    Param(String),
}

/// Scalar function evaluated as a third-order jet; backs derived schedules.
pub trait JetFn: Send + Sync + fmt::Debug {
    fn jet(&self, t: f64) -> Result<Jet, ScheduleError>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spline {
    t: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    /// Natural cubic spline through `(t[i], y[i])`.
    pub fn natural(t: Vec<f64>, y: Vec<f64>) -> Result<Self, ScheduleError> {
        let n = t.len();
        if n < 2 || y.len() != n {
            return Err(ScheduleError::Param("table needs at least two (t, value) pairs of equal length".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) || t.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(ScheduleError::Param("table abscissae must be finite and strictly increasing".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal solve for interior second derivatives
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 0..k {
                let h0 = t[i + 1] - t[i];
                let h1 = t[i + 2] - t[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            for i in 1..k {
                let lower = t[i + 1] - t[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Spline { t, y, m })
    }

    pub fn start(&self) -> f64 {
        self.t[0]
    }

    pub fn end(&self) -> f64 {
        *self.t.last().expect("nonempty")
    }

    fn jet(&self, t: f64) -> Jet {
        let i = match self.t.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => i.min(self.t.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.t.len() - 2),
        };
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = t1 - t0;
        let a = t1 - t;
        let b = t - t0;
        let v = m0 * a.powi(3) / (6.0 * h) + m1 * b.powi(3) / (6.0 * h) + (y0 / h - m0 * h / 6.0) * a + (y1 / h - m1 * h / 6.0) * b;
        let d1 = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - (y0 / h - m0 * h / 6.0) + (y1 / h - m1 * h / 6.0);
        let d2 = m0 * a / h + m1 * b / h;
        let d3 = (m1 - m0) / h;
        Jet::new(v, d1, d2, d3)
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    /// `k`
    Constant { k: f64 },
    /// `k·t^p`
    Power { k: f64, p: f64 },
    /// `α/t^(1−q)`
    AlphaOverTPower { alpha: f64, q: f64 },
    /// `k·exp(μ·t^q)`
    ExpPower { k: f64, mu: f64, q: f64 },
    Sum(Vec<Schedule>),
    Product(Vec<Schedule>),
    Table(Spline),
    Composite(Arc<dyn JetFn>),
}

#[derive(Clone, Debug)]
pub struct Schedule {
    pub family: Family,
    pub t0: f64,
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

#[inline]
fn fast_pow(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        t
    } else if p == -1.0 {
        1.0 / t
    } else if p == 0.5 {
        t.sqrt()
    } else if p == -0.5 {
        1.0 / t.sqrt()
    } else if p == 2.0 {
        t * t
    } else {
        t.powf(p)
    }
}

impl Schedule {
    pub fn new(family: Family, t0: f64) -> Self {
        Schedule { family, t0 }
    }

    pub fn constant(k: f64, t0: f64) -> Self {
        Schedule::new(Family::Constant { k }, t0)
    }

    pub fn power(k: f64, p: f64, t0: f64) -> Self {
        Schedule::new(Family::Power { k, p }, t0)
    }

    /// `α/t`
    pub fn alpha_over_t(alpha: f64, t0: f64) -> Self {
        Schedule::alpha_over_t_power(alpha, 0.0, t0)
    }

    pub fn alpha_over_t_power(alpha: f64, q: f64, t0: f64) -> Self {
        Schedule::new(Family::AlphaOverTPower { alpha, q }, t0)
    }

    pub fn exp_power(k: f64, mu: f64, q: f64, t0: f64) -> Self {
        Schedule::new(Family::ExpPower { k, mu, q }, t0)
    }

    pub fn sum(terms: Vec<Schedule>, t0: f64) -> Self {
        Schedule::new(Family::Sum(terms), t0)
    }

    pub fn product(terms: Vec<Schedule>, t0: f64) -> Self {
        Schedule::new(Family::Product(terms), t0)
    }

    pub fn table(t: Vec<f64>, y: Vec<f64>) -> Result<Self, ScheduleError> {
        let s = Spline::natural(t, y)?;
        let t0 = s.start();
        Ok(Schedule::new(Family::Table(s), t0))
    }

    pub fn composite(f: Arc<dyn JetFn>, t0: f64) -> Self {
        Schedule::new(Family::Composite(f), t0)
    }

    /// True when the schedule is identically zero by construction.
    pub fn is_zero(&self) -> bool {
        match &self.family {
            Family::Constant { k } | Family::Power { k, .. } | Family::ExpPower { k, .. } => *k == 0.0,
            Family::AlphaOverTPower { alpha, .. } => *alpha == 0.0,
            Family::Sum(ts) => ts.iter().all(Schedule::is_zero),
            Family::Product(ts) => ts.iter().any(Schedule::is_zero),
            Family::Table(_) | Family::Composite(_) => false,
        }
    }

    /// `(k, p)` when the schedule is `k·t^p`.
    pub fn as_power(&self) -> Option<(f64, f64)> {
        match self.family {
            Family::Constant { k } => Some((k, 0.0)),
            Family::Power { k, p } => Some((k, p)),
            Family::AlphaOverTPower { alpha, q } => Some((alpha, q - 1.0)),
            Family::ExpPower { k, mu, q } if q == 0.0 => Some((k * mu.exp(), 0.0)),
            Family::ExpPower { k, mu, .. } if mu == 0.0 => Some((k, 0.0)),
            _ => None,
        }
    }

    /// `α` when the schedule is exactly `α/t`.
    pub fn alpha_over_t_coefficient(&self) -> Option<f64> {
        match self.as_power() {
            Some((k, p)) if p == -1.0 => Some(k),
            _ => None,
        }
    }

    fn check_domain(&self, t: f64) -> Result<(), ScheduleError> {
        if !t.is_finite() {
            return Err(ScheduleError::Domain { t, reason: "non-finite time".into() });
        }
        if t < self.t0 - 1e-12 * self.t0.abs().max(1.0) {
            return Err(ScheduleError::Domain { t, reason: format!("before t0 = {}", self.t0) });
        }
        let needs_positive = |p: f64| !(is_integer(p) && p >= 0.0);
        let bad = match &self.family {
            Family::Power { p, .. } => needs_positive(*p) && t <= 0.0,
            Family::AlphaOverTPower { q, .. } => needs_positive(q - 1.0) && t <= 0.0,
            Family::ExpPower { q, .. } => needs_positive(*q) && t <= 0.0,
            Family::Table(s) => t > s.end() + 1e-12 * s.end().abs().max(1.0) || t < s.start() - 1e-12 * s.start().abs().max(1.0),
            _ => false,
        };
        if bad {
            return Err(ScheduleError::Domain { t, reason: "singular or outside the family's domain".into() });
        }
        Ok(())
    }

    /// Value and first three derivatives at `t`.
    pub fn jet(&self, t: f64) -> Result<Jet, ScheduleError> {
        self.check_domain(t)?;
        let x = Jet::variable(t);
        let j = match &self.family {
            Family::Constant { k } => Jet::constant(*k),
            Family::Power { k, p } => x.powf(*p) * *k,
            Family::AlphaOverTPower { alpha, q } => x.powf(q - 1.0) * *alpha,
            Family::ExpPower { k, mu, q } => (x.powf(*q) * *mu).exp() * *k,
            Family::Sum(ts) => {
                let mut acc = Jet::ZERO;
                for s in ts {
                    acc = acc + s.jet(t)?;
                }
                acc
            }
            Family::Product(ts) => {
                let mut acc = Jet::constant(1.0);
                for s in ts {
                    acc = acc * s.jet(t)?;
                }
                acc
            }
            Family::Table(s) => s.jet(t),
            Family::Composite(f) => f.jet(t)?,
        };
        Ok(j)
    }

    /// `(s(t), ṡ(t), s̈(t))`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64), ScheduleError> {
        let j = self.jet(t)?;
        Ok((j.value(), j.d1(), j.d2()))
    }

    /// Plain value without domain checks; used in integrator inner loops.
    #[inline]
    pub fn value_fast(&self, t: f64) -> f64 {
        match &self.family {
            Family::Constant { k } => *k,
            Family::Power { k, p } => k * fast_pow(t, *p),
            Family::AlphaOverTPower { alpha, q } => alpha * fast_pow(t, q - 1.0),
            Family::ExpPower { k, mu, q } => k * (mu * fast_pow(t, *q)).exp(),
            Family::Sum(ts) => ts.iter().map(|s| s.value_fast(t)).sum(),
            Family::Product(ts) => ts.iter().map(|s| s.value_fast(t)).product(),
            Family::Table(s) => s.jet(t).value(),
            Family::Composite(f) => f.jet(t).map(|j| j.value()).unwrap_or(f64::NAN),
        }
    }

    /// `∫_a^b s` when a closed form exists.
    pub fn integral(&self, a: f64, b: f64) -> Option<f64> {
        match &self.family {
            Family::Constant { k } => Some(k * (b - a)),
            Family::Power { k, p } => Some(power_integral(*k, *p, a, b)),
            Family::AlphaOverTPower { alpha, q } => Some(power_integral(*alpha, q - 1.0, a, b)),
            Family::ExpPower { k, mu, q } if *q == 0.0 || *mu == 0.0 => {
                let c = if *q == 0.0 { k * mu.exp() } else { *k };
                Some(c * (b - a))
            }
            Family::ExpPower { k, mu, q } if *q == 1.0 => Some(k / mu * ((mu * b).exp() - (mu * a).exp())),
            Family::Sum(ts) => ts.iter().map(|s| s.integral(a, b)).sum(),
            _ => None,
        }
    }

    /// Sampled check that the schedule is nondecreasing on `grid`.
    pub fn is_nondecreasing_on(&self, grid: &[f64]) -> Result<bool, ScheduleError> {
        for &t in grid {
            let j = self.jet(t)?;
            if j.c[1] < -1e-12 * j.c[0].abs() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sampled check that `ln s` is concave on `grid` (requires `s > 0`).
    pub fn is_log_concave_on(&self, grid: &[f64]) -> Result<bool, ScheduleError> {
        for &t in grid {
            let l = self.jet(t)?.ln();
            if l.c[2] > 1e-12 * (l.c[1] * l.c[1] + l.c[2].abs()) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn power_integral(k: f64, p: f64, a: f64, b: f64) -> f64 {
    if p == -1.0 {
        k * (b / a).ln()
    } else {
        k * (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
    }
}

/// Declarative form of a schedule: `{family, params, t0}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub family: String,
    #[serde(default)]
    pub params: ScheduleParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<ScheduleSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl ScheduleSpec {
    pub fn constant(k: f64) -> Self {
        ScheduleSpec { family: "constant".into(), params: ScheduleParams { k: Some(k), ..Default::default() }, t0: None }
    }

    pub fn power(k: f64, p: f64) -> Self {
        ScheduleSpec { family: "power".into(), params: ScheduleParams { k: Some(k), p: Some(p), ..Default::default() }, t0: None }
    }

    pub fn alpha_over_t_power(alpha: f64, q: f64) -> Self {
        ScheduleSpec {
            family: "alpha-over-t-power".into(),
            params: ScheduleParams { alpha: Some(alpha), q: Some(q), ..Default::default() },
            t0: None,
        }
    }

    pub fn exp_power(k: f64, mu: f64, q: f64) -> Self {
        ScheduleSpec {
            family: "exp-power".into(),
            params: ScheduleParams { k: Some(k), mu: Some(mu), q: Some(q), ..Default::default() },
            t0: None,
        }
    }

    pub fn sum(terms: Vec<ScheduleSpec>) -> Self {
        ScheduleSpec { family: "sum".into(), params: ScheduleParams { terms: Some(terms), ..Default::default() }, t0: None }
    }

    pub fn product(terms: Vec<ScheduleSpec>) -> Self {
        ScheduleSpec { family: "product".into(), params: ScheduleParams { terms: Some(terms), ..Default::default() }, t0: None }
    }

    /// Builds the schedule; `default_t0` applies when the record omits `t0`.
    pub fn build(&self, default_t0: f64) -> Result<Schedule, ScheduleError> {
        let t0 = self.t0.unwrap_or(default_t0);
        let p = &self.params;
        let allowed: &[&str] = match self.family.as_str() {
            "constant" => &["k"],
            "power" => &["k", "p"],
            "alpha-over-t-power" => &["alpha", "q"],
            "exp-power" => &["k", "mu", "q"],
            "sum" | "product" => &["terms"],
            "table" => &["t", "values"],
            other => return Err(ScheduleError::Param(format!("unknown family '{other}'"))),
        };
        let present = [
            ("k", p.k.is_some()),
            ("p", p.p.is_some()),
            ("alpha", p.alpha.is_some()),
            ("q", p.q.is_some()),
            ("mu", p.mu.is_some()),
            ("terms", p.terms.is_some()),
            ("t", p.t.is_some()),
            ("values", p.values.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(ScheduleError::Param(format!("parameter '{name}' is not used by family '{}'", self.family)));
            }
        }
        let need = |v: Option<f64>, name: &str| {
            let x = v.ok_or_else(|| ScheduleError::Param(format!("family '{}' requires '{name}'", self.family)))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(ScheduleError::Param(format!("parameter '{name}' must be finite")))
            }
        };
        let sched = match self.family.as_str() {
            "constant" => Schedule::constant(need(p.k, "k")?, t0),
            "power" => Schedule::power(need(p.k, "k")?, need(p.p, "p")?, t0),
            "alpha-over-t-power" => Schedule::alpha_over_t_power(need(p.alpha, "alpha")?, p.q.unwrap_or(0.0), t0),
            "exp-power" => Schedule::exp_power(p.k.unwrap_or(1.0), need(p.mu, "mu")?, need(p.q, "q")?, t0),
            "sum" | "product" => {
                let terms = p.terms.as_ref().ok_or_else(|| ScheduleError::Param("combinator requires 'terms'".into()))?;
                if terms.is_empty() {
                    return Err(ScheduleError::Param("combinator requires at least one term".into()));
                }
                let built = terms.iter().map(|s| s.build(t0)).collect::<Result<Vec<_>, _>>()?;
                if self.family == "sum" {
                    Schedule::sum(built, t0)
                } else {
                    Schedule::product(built, t0)
                }
            }
            _ => {
                let ts = p.t.clone().ok_or_else(|| ScheduleError::Param("table requires 't'".into()))?;
                let vs = p.values.clone().ok_or_else(|| ScheduleError::Param("table requires 'values'".into()))?;
                let mut s = Schedule::table(ts, vs)?;
                if let Some(t0) = self.t0 {
                    s.t0 = t0;
                }
                s
            }
        };
        // probe the start point so parameter mistakes surface at construction
        sched.jet(sched.t0)?;
        Ok(sched)
    }
}

/// Verdict of the tail condition `∫_{t0}^∞ ds/p(s) < ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum H0Verdict {
    Converges,
    Diverges,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    Analytic,
    TruncatedQuadrature,
}

/// `p_γ(t) = exp ∫_{t0}^t γ` and `Γ_γ(t) = p_γ(t) ∫_t^∞ 1/p_γ`.
#[derive(Clone, Debug)]
pub struct IntegralProfile {
    pub base: Schedule,
    /// Monotone grid of `(t, ∫_{t0}^t γ)`; empty when the integral is analytic.
    pub cache: Vec<(f64, f64)>,
    pub tail_rule: TailRule,
}

const CACHE_NODES: usize = 256;
const QUAD_TOL: f64 = 1e-13;
const LOG_MAX: f64 = 709.0;

impl IntegralProfile {
    /// Profile with the quadrature cache spanning `[t0, 10³·t0]`.
    pub fn new(base: Schedule) -> Result<Self, ScheduleError> {
        let t0 = base.t0;
        let end = if t0 > 0.0 { 1e3 * t0 } else { t0 + 1e3 };
        IntegralProfile::with_horizon(base, end)
    }

    pub fn with_horizon(base: Schedule, horizon: f64) -> Result<Self, ScheduleError> {
        let t0 = base.t0;
        if base.integral(t0, t0 + 1.0).is_some() {
            return Ok(IntegralProfile { base, cache: Vec::new(), tail_rule: TailRule::Analytic });
        }
        let horizon = horizon.max(t0 + 1e-9);
        let nodes: Vec<f64> = if t0 > 0.0 {
            let r = (horizon / t0).ln();
            (0..=CACHE_NODES).map(|i| t0 * (r * i as f64 / CACHE_NODES as f64).exp()).collect()
        } else {
            (0..=CACHE_NODES).map(|i| t0 + (horizon - t0) * i as f64 / CACHE_NODES as f64).collect()
        };
        let mut cache = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        cache.push((t0, 0.0));
        for w in nodes.windows(2) {
            acc += quad_schedule(&base, w[0], w[1])?;
            cache.push((w[1], acc));
        }
        Ok(IntegralProfile { base, cache, tail_rule: TailRule::TruncatedQuadrature })
    }

    pub fn t0(&self) -> f64 {
        self.base.t0
    }

    /// `∫_{t0}^t γ`; never overflows.
    pub fn log_p_gamma(&self, t: f64) -> Result<f64, ScheduleError> {
        self.base.check_domain(t)?;
        let t0 = self.t0();
        if let Some(v) = self.base.integral(t0, t) {
            return Ok(v);
        }
        let idx = self.cache.partition_point(|&(s, _)| s <= t).saturating_sub(1);
        let (s, acc) = self.cache[idx];
        Ok(acc + quad_schedule(&self.base, s, t)?)
    }

    /// `∫_a^b γ` for `t0 ≤ a ≤ b`.
    pub fn log_ratio(&self, a: f64, b: f64) -> Result<f64, ScheduleError> {
        if let Some(v) = self.base.integral(a, b) {
            return Ok(v);
        }
        if b - a < 1e-3 * a.abs().max(1.0) {
            return quad_schedule(&self.base, a, b);
        }
        Ok(self.log_p_gamma(b)? - self.log_p_gamma(a)?)
    }

    pub fn p_gamma(&self, t: f64) -> Result<f64, ScheduleError> {
        let l = self.log_p_gamma(t)?;
        if l > LOG_MAX {
            return Err(ScheduleError::Overflow { t, log: l });
        }
        Ok(l.exp())
    }

    /// Jet of `ln p_γ`: `[∫γ, γ, γ̇, γ̈]`.
    pub fn log_p_jet(&self, t: f64) -> Result<Jet, ScheduleError> {
        let g = self.base.jet(t)?.materialize();
        Ok(Jet::new(self.log_p_gamma(t)?, g[0], g[1], g[2]))
    }

    /// Jet of `p_γ`, log-scaled when large.
    pub fn p_jet(&self, t: f64) -> Result<Jet, ScheduleError> {
        Ok(self.log_p_jet(t)?.exp())
    }

    pub fn check_h0(&self) -> H0Verdict {
        if let Some((k, p)) = self.base.as_power() {
            return power_h0(k, p);
        }
        if let Family::ExpPower { k, mu, q } = self.base.family {
            return if k <= 0.0 {
                H0Verdict::Diverges
            } else if mu >= 0.0 || q < 0.0 {
                H0Verdict::Converges
            } else {
                H0Verdict::Diverges
            };
        }
        self.numeric_h0().unwrap_or(H0Verdict::Unknown)
    }

    /// Partial tails over doubling horizons; the log-slope of the panel
    /// masses decides.
    fn numeric_h0(&self) -> Result<H0Verdict, ScheduleError> {
        let t0 = self.t0();
        let edge = |j: i32| if t0 > 0.0 { t0 * 2f64.powi(j) } else { t0 + 2f64.powi(j) };
        let mut logs = Vec::new();
        let mut l_start = 0.0;
        for j in 0..32 {
            let (a, b) = (edge(j), edge(j + 1));
            let l_a = l_start;
            let f = |s: f64| {
                let l = l_a + quad_schedule(&self.base, a, s).unwrap_or(f64::NAN);
                (-(l - l_a)).exp()
            };
            let (mass, _) = quadrature::integrate(f, a, b, 0.0, 1e-8)?;
            logs.push(mass.ln() - l_a);
            l_start = l_a + quad_schedule(&self.base, a, b)?;
        }
        let tail = &logs[logs.len() - 10..];
        let n = tail.len() as f64;
        let xm = (n - 1.0) / 2.0;
        let ym = tail.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (i, y) in tail.iter().enumerate() {
            let dx = i as f64 - xm;
            sxy += dx * (y - ym);
            sxx += dx * dx;
        }
        let slope = sxy / sxx;
        Ok(if !slope.is_finite() {
            if tail.iter().all(|y| *y == f64::NEG_INFINITY) {
                H0Verdict::Converges
            } else {
                H0Verdict::Unknown
            }
        } else if slope < -0.05 {
            H0Verdict::Converges
        } else if slope > -0.005 {
            H0Verdict::Diverges
        } else {
            H0Verdict::Unknown
        })
    }

    /// `Γ_γ(t)`, closed form where known, otherwise tail quadrature.
    pub fn big_gamma(&self, t: f64) -> Result<f64, ScheduleError> {
        match self.check_h0() {
            H0Verdict::Converges => {}
            v => return Err(ScheduleError::DivergentTail(v)),
        }
        self.base.check_domain(t)?;
        if let Some(g) = self.big_gamma_closed(t) {
            return Ok(g);
        }
        self.big_gamma_numeric(t)
    }

    fn big_gamma_closed(&self, t: f64) -> Option<f64> {
        match self.base.as_power()? {
            (c, p) if p == 0.0 && c > 0.0 => Some(1.0 / c),
            (alpha, p) if p == -1.0 && alpha > 1.0 => Some(t / (alpha - 1.0)),
            _ => None,
        }
    }

    /// Tail quadrature route for `Γ_γ`, available even where a closed form
    /// exists (used to cross-check it).
    pub fn big_gamma_numeric(&self, t: f64) -> Result<f64, ScheduleError> {
        let g = |s: f64| -> f64 {
            match self.log_ratio(t, s) {
                Ok(l) => (-l).exp(),
                Err(_) => f64::NAN,
            }
        };
        let scale = t.abs().max(1.0);
        let gamma_t = self.base.value_fast(t);
        let mut width = if gamma_t > 0.0 { (1.0 / gamma_t).clamp(1e-3 * scale, scale) } else { scale };
        let mut a = t;
        let mut total = 0.0;
        let far = t + 64.0 * scale;
        loop {
            let b = a + width;
            let (piece, _) = quadrature::integrate(g, a, b, 1e-16 * width, 1e-13)?;
            total += piece;
            a = b;
            width *= 2.0;
            let edge = g(a);
            if edge < 1e-18 && piece <= 1e-16 * total {
                return Ok(total);
            }
            if a >= far {
                break;
            }
        }
        // remaining tail via u = 1/s
        let s0 = a;
        let h = |u: f64| if u <= 0.0 { 0.0 } else { g(1.0 / u) / (u * u) };
        match quadrature::integrate(h, 0.0, 1.0 / s0, 1e-10, 1e-12) {
            Ok((tail, _)) => Ok(total + tail),
            Err(_) => self.tail_by_doubling(&g, s0).map(|tail| total + tail),
        }
    }

    /// Doubling-horizon truncation with a Richardson-style convergence test.
    fn tail_by_doubling(&self, g: &dyn Fn(f64) -> f64, s0: f64) -> Result<f64, ScheduleError> {
        let mut partial = Vec::new();
        let mut acc = 0.0;
        let mut a = s0;
        for _ in 0..60 {
            let b = 2.0 * a;
            let (piece, _) = quadrature::integrate(g, a, b, 1e-14, 1e-10)?;
            acc += piece;
            partial.push(acc);
            a = b;
            let n = partial.len();
            if n >= 3 {
                let (x0, x1, x2) = (partial[n - 3], partial[n - 2], partial[n - 1]);
                let d1 = x1 - x0;
                let d2 = x2 - x1;
                if d2.abs() <= 1e-12 * x2.abs() {
                    return Ok(x2);
                }
                let ratio = d2 / d1;
                if ratio > 0.0 && ratio < 0.9 {
                    let limit = x2 + d2 * ratio / (1.0 - ratio);
                    if (limit - x2).abs() <= 1e-8 * limit.abs() {
                        return Ok(limit);
                    }
                }
            }
        }
        Err(ScheduleError::Quadrature(QuadratureError::Tolerance { estimate: acc, error: f64::INFINITY }))
    }

    /// Jet of `Γ_γ`, derivatives from `Γ̇ = γΓ − 1`.
    pub fn big_gamma_jet(&self, t: f64) -> Result<Jet, ScheduleError> {
        let g = self.big_gamma(t)?;
        if let Some((alpha, p)) = self.base.as_power() {
            if p == -1.0 && alpha > 1.0 {
                return Ok(Jet::new(g, 1.0 / (alpha - 1.0), 0.0, 0.0));
            }
            if p == 0.0 && alpha > 0.0 {
                return Ok(Jet::constant(g));
            }
        }
        let c = self.base.jet(t)?.materialize();
        let d1 = c[0] * g - 1.0;
        let d2 = c[1] * g + c[0] * d1;
        let d3 = c[2] * g + 2.0 * c[1] * d1 + c[0] * d2;
        Ok(Jet::new(g, d1, d2, d3))
    }
}

fn power_h0(k: f64, p: f64) -> H0Verdict {
    if k <= 0.0 {
        return H0Verdict::Diverges;
    }
    if p > -1.0 || (p == -1.0 && k > 1.0) {
        H0Verdict::Converges
    } else {
        H0Verdict::Diverges
    }
}

fn quad_schedule(s: &Schedule, a: f64, b: f64) -> Result<f64, ScheduleError> {
    if a == b {
        return Ok(0.0);
    }
    let (v, _) = quadrature::integrate(|x| s.value_fast(x), a, b, QUAD_TOL * (b - a).abs(), QUAD_TOL)?;
    Ok(v)
}
