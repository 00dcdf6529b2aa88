//! Lyapunov certificates `(c²b, θ, σ, ξ)` and grid verification of the
//! condition systems they must satisfy.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{Jet, Scaled};
use crate::schedules::{H0Verdict, IntegralProfile, JetFn, Schedule, ScheduleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("condition set {0} needs a certificate")]
    MissingCertificate(ConditionSet),
    #[error("invalid verification grid: {0}")]
    Grid(String),
    #[error("unsupported recipe: {0}")]
    UnsupportedRecipe(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("b decreases at t = {t}")]
    NonmonotoneB { t: f64 },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    GammaNoHessian,
    GammaHessianAlphaOverT { alpha: f64 },
    PModel,
    PGeneral { r: f64, m: f64 },
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::GammaNoHessian => "GammaNoHessian",
            Recipe::GammaHessianAlphaOverT { .. } => "GammaHessianAlphaOverT",
            Recipe::PModel => "PModel",
            Recipe::PGeneral { .. } => "PGeneral",
        }
    }
}

/// Certificate coefficients and the dynamic's coefficients at one time.
#[derive(Clone, Copy, Debug)]
pub struct CertPoint {
    pub t: f64,
    pub gamma: Jet,
    pub beta: Jet,
    pub b: Jet,
    pub theta: Jet,
    pub sigma: Jet,
    pub xi: Jet,
    pub c2b: Jet,
    pub w: Jet,
}

#[derive(Debug)]
enum Core {
    Gamma { profile: IntegralProfile, beta: Schedule, b: Schedule },
    GammaHessian { alpha: f64, gamma: Schedule, beta: Schedule, b: Schedule },
    Model { p0: IntegralProfile, b: Schedule },
    P { profile: IntegralProfile, beta: Schedule, b: Schedule, r: f64, m: f64 },
}

/// Quantities of the `p_γ` recipe shared with the (H) condition sets.
#[derive(Clone, Copy, Debug)]
pub struct PQuantities {
    pub gamma: Jet,
    pub beta: Jet,
    pub b: Jet,
    pub theta: Jet,
    pub sigma: Jet,
    pub xi0: Jet,
    pub w: Jet,
}

fn p_quantities(profile: &IntegralProfile, beta: &Schedule, b: &Schedule, r: f64, m: f64, t: f64) -> Result<PQuantities, ScheduleError> {
    let gamma = profile.base.jet(t)?;
    let beta = beta.jet(t)?;
    let bj = b.jet(t)?;
    let lnp = profile.log_p_jet(t)?;
    let lnb = bj.ln();
    let theta = (lnp * (2.0 * r) - lnb * (2.0 / 3.0)).exp();
    let sigma = gamma * m + lnb.derivative() * (1.0 / 3.0);
    let xi0 = (gamma * (1.0 - 2.0 * (r + m)) + sigma) * sigma - sigma.derivative();
    let w = bj - beta.derivative() + beta * sigma + gamma * beta * (1.0 - 2.0 * r - 2.0 * m);
    Ok(PQuantities { gamma, beta, b: bj, theta, sigma, xi0, w })
}

impl Core {
    fn point(&self, t: f64) -> Result<CertPoint, ScheduleError> {
        match self {
            Core::Gamma { profile, beta, b } => {
                let g = profile.big_gamma_jet(t)?;
                let bj = b.jet(t)?;
                let theta = g * g;
                Ok(CertPoint {
                    t,
                    gamma: profile.base.jet(t)?,
                    beta: beta.jet(t)?,
                    b: bj,
                    theta,
                    sigma: g.recip(),
                    xi: Jet::ZERO,
                    c2b: theta * bj,
                    w: bj,
                })
            }
            Core::GammaHessian { alpha, gamma, beta, b } => {
                let g = Jet::new(t / (alpha - 1.0), 1.0 / (alpha - 1.0), 0.0, 0.0);
                let bj = b.jet(t)?;
                let be = beta.jet(t)?;
                let w = bj - be.derivative() - be / Jet::variable(t);
                let theta = g * g;
                Ok(CertPoint { t, gamma: gamma.jet(t)?, beta: be, b: bj, theta, sigma: g.recip(), xi: Jet::ZERO, c2b: theta * w, w })
            }
            Core::Model { p0, b } => {
                let p = p0.p_jet(t)?;
                let bj = b.jet(t)?;
                let theta = p * p;
                Ok(CertPoint {
                    t,
                    gamma: p0.base.jet(t)? + p.recip(),
                    beta: Jet::ZERO,
                    b: bj,
                    theta,
                    sigma: p.recip(),
                    xi: Jet::ZERO,
                    c2b: theta * bj,
                    w: bj,
                })
            }
            Core::P { profile, beta, b, r, m } => {
                let q = p_quantities(profile, beta, b, *r, *m, t)?;
                Ok(CertPoint {
                    t,
                    gamma: q.gamma,
                    beta: q.beta,
                    b: q.b,
                    theta: q.theta,
                    sigma: q.sigma,
                    xi: q.theta * q.xi0,
                    c2b: q.theta * q.w,
                    w: q.w,
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Field {
    C2b,
    Theta,
    Sigma,
    Xi,
    W,
}

#[derive(Debug)]
struct FieldFn {
    core: Arc<Core>,
    field: Field,
}

impl JetFn for FieldFn {
    fn jet(&self, t: f64) -> Result<Jet, ScheduleError> {
        let p = self.core.point(t)?;
        Ok(match self.field {
            Field::C2b => p.c2b,
            Field::Theta => p.theta,
            Field::Sigma => p.sigma,
            Field::Xi => p.xi,
            Field::W => p.w,
        })
    }
}

/// `γ = γ0 + 1/p0` of the model recipe.
#[derive(Debug)]
struct ModelGamma {
    p0: IntegralProfile,
}

impl JetFn for ModelGamma {
    fn jet(&self, t: f64) -> Result<Jet, ScheduleError> {
        Ok(self.p0.base.jet(t)? + self.p0.p_jet(t)?.recip())
    }
}

/// A Lyapunov certificate for `(IGS)_{γ,β,b}`.
#[derive(Clone)]
pub struct Certificate {
    pub recipe: Recipe,
    pub gamma: Schedule,
    pub beta: Schedule,
    pub b: Schedule,
    pub c2b: Schedule,
    pub theta: Schedule,
    pub sigma: Schedule,
    pub xi: Schedule,
    pub w: Schedule,
    core: Arc<Core>,
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Certificate").field("recipe", &self.recipe).field("t0", &self.t0()).finish()
    }
}

impl Certificate {
    fn assemble(recipe: Recipe, gamma: Schedule, beta: Schedule, b: Schedule, core: Core) -> Self {
        let core = Arc::new(core);
        let t0 = gamma.t0;
        let field = |field| Schedule::composite(Arc::new(FieldFn { core: core.clone(), field }), t0);
        Certificate {
            recipe,
            c2b: field(Field::C2b),
            theta: field(Field::Theta),
            sigma: field(Field::Sigma),
            xi: field(Field::Xi),
            w: field(Field::W),
            gamma,
            beta,
            b,
            core,
        }
    }

    pub fn t0(&self) -> f64 {
        self.gamma.t0
    }

    pub fn point(&self, t: f64) -> Result<CertPoint, ScheduleError> {
        self.core.point(t)
    }

    /// Residuals of the recovery formulas for `ξ` and `bc²`, each relative to
    /// `1 + |largest term|`.
    pub fn recovery_residuals(&self, t: f64) -> Result<(f64, f64), ScheduleError> {
        let p = self.point(t)?;
        let ts = p.theta * p.sigma;
        let xi_terms = [p.xi.coeff(0), ts.coeff(1), (ts * p.sigma).coeff(0), -(ts * p.gamma).coeff(0)];
        let bt = p.beta * p.theta;
        let c_terms = [
            p.c2b.coeff(0),
            -(p.b * p.theta).coeff(0),
            (bt * p.sigma).coeff(0),
            -(bt * p.gamma).coeff(0),
            bt.coeff(1),
        ];
        let rel = |ts: &[Scaled]| Scaled::sum(ts).relative_to(Scaled::max_magnitude(ts)).abs();
        Ok((rel(&xi_terms), rel(&c_terms)))
    }

    /// Conditions of the certificate's systems that hold with equality by
    /// construction of the recipe.
    pub fn identities(&self, set: ConditionSet) -> &'static [&'static str] {
        match (set, self.recipe) {
            (ConditionSet::SystemA, Recipe::PGeneral { .. }) => &["iii", "iv"],
            (ConditionSet::SystemA, _) => &["iii", "iv", "v", "vi"],
            (ConditionSet::SystemB, Recipe::PGeneral { .. }) => &[],
            (ConditionSet::SystemB, _) => &["iv", "v", "vi"],
            _ => &[],
        }
    }

    /// Gradient-integral weight with this certificate's `θ`.
    pub fn weight_q(&self, t: f64) -> Result<f64, ScheduleError> {
        weight_q(self, &self.beta, &self.b, t)
    }

    pub fn values_weight(&self, t: f64) -> Result<f64, ScheduleError> {
        values_weight(self, &self.gamma, &self.beta, &self.b, t)
    }

    /// `(values_weight, weight_q)` from a single evaluation of the certificate.
    pub fn weights(&self, t: f64) -> Result<(f64, f64), ScheduleError> {
        let p = self.point(t)?;
        let be = self.beta.jet(t)?;
        let bj = self.b.jet(t)?;
        let v = p.theta * bj * p.sigma - (p.c2b + be * p.theta * p.sigma).derivative();
        let q = bj * p.theta * be - (p.theta * be * be).derivative() * 0.5;
        Ok((v.value(), q.value()))
    }

    /// `(3σ − 2(r+m)γ)w − ẇ − 2(1−r−m)γ` of the general `p_γ` recipe; `None`
    /// for other recipes.
    pub fn upsilon(&self, t: f64) -> Result<Option<f64>, ScheduleError> {
        let Recipe::PGeneral { r, m } = self.recipe else { return Ok(None) };
        let p = self.point(t)?;
        let u = (p.sigma * 3.0 - p.gamma * (2.0 * (r + m))) * p.w - p.w.derivative() - p.gamma * (2.0 * (1.0 - r - m));
        Ok(Some(u.value()))
    }
}

/// `q = bθβ − ½ d/dt(θβ²)`.
pub fn weight_q(cert: &Certificate, beta: &Schedule, b: &Schedule, t: f64) -> Result<f64, ScheduleError> {
    let theta = cert.point(t)?.theta;
    let be = beta.jet(t)?;
    let q = b.jet(t)? * theta * be - (theta * be * be).derivative() * 0.5;
    Ok(q.value())
}

/// `θbσ − d/dt(c²b + βθσ)`.
pub fn values_weight(cert: &Certificate, _gamma: &Schedule, beta: &Schedule, b: &Schedule, t: f64) -> Result<f64, ScheduleError> {
    let p = cert.point(t)?;
    let be = beta.jet(t)?;
    let v = p.theta * b.jet(t)? * p.sigma - (p.c2b + be * p.theta * p.sigma).derivative();
    Ok(v.value())
}

/// Γ-recipe: `θ = Γ²`, `σ = 1/Γ`, `ξ = 0`; `c = Γ` without Hessian damping,
/// `c²b = t²w/(α−1)²` with it (only for `γ = α/t`).
pub fn derive_gamma_certificate(gamma: &Schedule, beta: &Schedule, b: &Schedule) -> Result<Certificate, CertificateError> {
    let profile = IntegralProfile::new(gamma.clone())?;
    match profile.check_h0() {
        H0Verdict::Converges => {}
        v => return Err(ScheduleError::DivergentTail(v).into()),
    }
    if beta.is_zero() {
        let core = Core::Gamma { profile, beta: beta.clone(), b: b.clone() };
        return Ok(Certificate::assemble(Recipe::GammaNoHessian, gamma.clone(), beta.clone(), b.clone(), core));
    }
    let alpha = gamma
        .alpha_over_t_coefficient()
        .filter(|a| *a > 1.0)
        .ok_or_else(|| CertificateError::UnsupportedRecipe("Hessian damping with the Γ recipe needs γ = α/t, α > 1".into()))?;
    let core = Core::GammaHessian { alpha, gamma: gamma.clone(), beta: beta.clone(), b: b.clone() };
    Ok(Certificate::assemble(Recipe::GammaHessianAlphaOverT { alpha }, gamma.clone(), beta.clone(), b.clone(), core))
}

fn check_rm(r: f64, m: f64) -> Result<(), CertificateError> {
    let eps = 1e-12;
    let ok = r > 0.0 && r <= 1.0 / 3.0 + eps && m >= 2.0 * r - eps && m <= 1.0 - r + eps;
    if ok && r.is_finite() && m.is_finite() {
        Ok(())
    } else {
        Err(CertificateError::Param(format!("(r, m) = ({r}, {m}) violates 0 < r ≤ 1/3, 2r ≤ m ≤ 1 − r")))
    }
}

/// `p_γ`-recipe: `θ = p^{2r} b^{-2/3}`, `σ = mγ + ḃ/(3b)`, `ξ = θξ₀`, `c²b = θw`.
pub fn derive_p_certificate(gamma: &Schedule, beta: &Schedule, b: &Schedule, r: f64, m: f64) -> Result<Certificate, CertificateError> {
    check_rm(r, m)?;
    let grid = GridSpec::new(gamma.t0).grid()?;
    for &t in &grid {
        let j = b.jet(t)?;
        if j.c[1] < -1e-12 * j.c[0].abs() {
            return Err(CertificateError::NonmonotoneB { t });
        }
    }
    let profile = IntegralProfile::new(gamma.clone())?;
    let core = Core::P { profile, beta: beta.clone(), b: b.clone(), r, m };
    Ok(Certificate::assemble(Recipe::PGeneral { r, m }, gamma.clone(), beta.clone(), b.clone(), core))
}

/// Model recipe for `γ = γ0 + 1/p0`, `p0 = exp∫γ0`: `θ = p0²`, `σ = 1/p0`,
/// `ξ = 0`, `c = p0`. The composite `γ` is recorded in the certificate.
pub fn derive_model_certificate(gamma0: &Schedule, b: &Schedule) -> Result<Certificate, CertificateError> {
    let t0 = gamma0.t0;
    let p0 = IntegralProfile::new(gamma0.clone())?;
    let gamma = Schedule::composite(Arc::new(ModelGamma { p0: p0.clone() }), t0);
    let beta = Schedule::constant(0.0, t0);
    let core = Core::Model { p0, b: b.clone() };
    Ok(Certificate::assemble(Recipe::PModel, gamma, beta, b.clone(), core))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionSet {
    SystemA,
    SystemB,
    GammaGrowth,
    ModelGrowth,
    G2G3,
    H1toH4,
    H2plus,
    Eq61,
    HrGamma,
}

impl fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for ConditionSet {
    type Err = CertificateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "SystemA" => ConditionSet::SystemA,
            "SystemB" => ConditionSet::SystemB,
            "GammaGrowth" => ConditionSet::GammaGrowth,
            "ModelGrowth" => ConditionSet::ModelGrowth,
            "G2G3" => ConditionSet::G2G3,
            "H1toH4" => ConditionSet::H1toH4,
            "H2plus" => ConditionSet::H2plus,
            "Eq61" => ConditionSet::Eq61,
            "HrGamma" => ConditionSet::HrGamma,
            other => return Err(CertificateError::Param(format!("unknown condition set '{other}'"))),
        })
    }
}

/// Parameters some condition sets need: `(r, m)`, `(p0, r)` or `α`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// Verification grid: `points` samples on `[t0, t_end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

fn default_points() -> usize {
    400
}

impl GridSpec {
    /// 400 log-spaced points on `[t0, 10³·t0]`.
    pub fn new(t0: f64) -> Self {
        GridSpec { t0, t_end: None, points: 400, spacing: Spacing::Log }
    }

    pub fn with_end(mut self, t_end: f64) -> Self {
        self.t_end = Some(t_end);
        self
    }

    pub fn end(&self) -> f64 {
        self.t_end.unwrap_or(if self.t0 > 0.0 { 1e3 * self.t0 } else { self.t0 + 1e3 })
    }

    pub fn grid(&self) -> Result<Vec<f64>, CertificateError> {
        let (a, b, n) = (self.t0, self.end(), self.points);
        if n < 2 || !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(CertificateError::Grid(format!("need ≥ 2 points on a nonempty interval, got {n} on [{a}, {b}]")));
        }
        let last = (n - 1) as f64;
        let mut g: Vec<f64> = match self.spacing {
            Spacing::Log if a > 0.0 => {
                let r = (b / a).ln();
                (0..n).map(|i| a * (r * i as f64 / last).exp()).collect()
            }
            _ => (0..n).map(|i| a + (b - a) * i as f64 / last).collect(),
        };
        g[0] = a;
        g[n - 1] = b;
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Boundary,
}

impl Verdict {
    /// The conditions hold (strictly or with equality).
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::Violated)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Worst {
    pub condition: String,
    pub t: f64,
    pub margin: f64,
    pub relative: f64,
}

/// Relative slack below which a margin counts as zero.
pub const TOL_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub condition_set: ConditionSet,
    pub grid: Vec<f64>,
    pub names: Vec<String>,
    /// `margins[c][i]`: RHS − LHS of condition `c` at `grid[i]`.
    pub margins: Vec<Vec<f64>>,
    /// Dominant term magnitude behind each margin.
    pub scales: Vec<Vec<f64>>,
    /// `margin / (1 + scale)`, computed without overflow.
    pub relative: Vec<Vec<f64>>,
    /// Conditions excluded from the boundary test: recipe identities and
    /// conditions whose terms all vanish.
    pub identities: Vec<String>,
    pub vacuous: Vec<String>,
    pub worst: Worst,
    pub verdict: Verdict,
    pub tol_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub condition_set: ConditionSet,
    pub verdict: Verdict,
    pub worst: Worst,
    pub tol_margin: f64,
}

impl ConditionReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary { condition_set: self.condition_set, verdict: self.verdict, worst: self.worst.clone(), tol_margin: self.tol_margin }
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.margins[i].as_slice())
    }

    pub fn relative_column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.relative[i].as_slice())
    }

    /// Verdict of a single condition, by the same rule as the report.
    pub fn condition_verdict(&self, name: &str) -> Option<Verdict> {
        let rel = self.relative_column(name)?;
        Some(if rel.iter().any(|r| *r < -self.tol_margin) {
            Verdict::Violated
        } else if rel.iter().all(|r| r.abs() <= self.tol_margin) {
            Verdict::Boundary
        } else {
            Verdict::Satisfied
        })
    }
}

struct Cond {
    name: &'static str,
    terms: Vec<Scaled>,
    equality: bool,
}

fn ineq(name: &'static str, terms: Vec<Scaled>) -> Cond {
    Cond { name, terms, equality: false }
}

fn eq(name: &'static str, terms: Vec<Scaled>) -> Cond {
    Cond { name, terms, equality: true }
}

fn v(j: Jet) -> Scaled {
    j.coeff(0)
}

fn d(j: Jet) -> Scaled {
    j.coeff(1)
}

fn dd(j: Jet) -> Scaled {
    j.coeff(2)
}

fn system_a(p: &CertPoint) -> Vec<Cond> {
    let (th, s, g, be, b) = (p.theta, p.sigma, p.gamma, p.beta, p.b);
    let tbs = th * b * s;
    let bts = be * th * s;
    let bt = be * th;
    let ts = th * s;
    vec![
        ineq("i", vec![v(tbs), -d(bts)]),
        ineq("ii", vec![v(tbs), -d(p.c2b), -d(bts)]),
        eq("iii", vec![v(p.c2b), -v(b * th), v(bt * s), -v(bt * g), d(bt)]),
        eq("iv", vec![d(ts), v(ts * s), -v(ts * g), v(p.xi)]),
        ineq("v", vec![-d(ts * s), -d(p.xi)]),
        ineq("vi", vec![-d(th), -v(th * s) * 2.0, v(th * g) * 2.0]),
        ineq("vii", vec![-v(be * be * th.derivative()), -v(be * be.derivative() * th) * 2.0, v(be * b * th) * 2.0]),
        ineq("xi_nonneg", vec![v(p.xi)]),
        ineq("c2b_nonneg", vec![v(p.c2b)]),
    ]
}

fn system_b(p: &CertPoint) -> Vec<Cond> {
    let (th, s, g, be, b) = (p.theta, p.sigma, p.gamma, p.beta, p.b);
    let tbs = th * b * s;
    let bt = be * th;
    let ts = th * s;
    vec![
        ineq("i", vec![v(tbs), -d(bt * s)]),
        ineq("ii", vec![v(tbs), -d(b * th), -d(bt * g), dd(bt)]),
        ineq("iii", vec![v(b * th), -v(bt * s), v(bt * g), -d(bt)]),
        ineq("iv", vec![-d(ts), -v(ts * s), v(ts * g)]),
        ineq("v", vec![dd(ts), -d(ts * g)]),
        ineq("vi", vec![-d(th), -v(th * s) * 2.0, v(th * g) * 2.0]),
        ineq("vii", vec![-v(be * be * th.derivative()), -v(be * be.derivative() * th) * 2.0, v(be * b * th) * 2.0]),
    ]
}

fn need(x: Option<f64>, name: &str, set: ConditionSet) -> Result<f64, CertificateError> {
    x.ok_or_else(|| CertificateError::Param(format!("condition set {set} needs parameter '{name}'")))
}

/// Evaluates every inequality of `set` on a grid.
///
/// For `SystemA`/`SystemB` the certificate's own `γ, β, b` are used. For
/// `ModelGrowth` the `gamma` argument is `γ0`.
pub fn check_conditions(
    set: ConditionSet,
    gamma: &Schedule,
    beta: &Schedule,
    b: &Schedule,
    cert: Option<&Certificate>,
    extra: &ExtraParams,
    grid: &GridSpec,
) -> Result<ConditionReport, CertificateError> {
    check_conditions_on(set, gamma, beta, b, cert, extra, &grid.grid()?)
}

pub fn check_conditions_on(
    set: ConditionSet,
    gamma: &Schedule,
    beta: &Schedule,
    b: &Schedule,
    cert: Option<&Certificate>,
    extra: &ExtraParams,
    grid: &[f64],
) -> Result<ConditionReport, CertificateError> {
    if grid.is_empty() {
        return Err(CertificateError::Grid("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CertificateError::Grid("grid must be strictly increasing".into()));
    }
    let mut identities: Vec<String> = Vec::new();
    let evaluator: Box<dyn Fn(f64) -> Result<Vec<Cond>, CertificateError>> = match set {
        ConditionSet::SystemA | ConditionSet::SystemB => {
            let cert = cert.ok_or(CertificateError::MissingCertificate(set))?.clone();
            identities = cert.identities(set).iter().map(|s| s.to_string()).collect();
            Box::new(move |t| {
                let p = cert.point(t)?;
                Ok(if set == ConditionSet::SystemA { system_a(&p) } else { system_b(&p) })
            })
        }
        ConditionSet::GammaGrowth => {
            let profile = IntegralProfile::new(gamma.clone())?;
            let b = b.clone();
            Box::new(move |t| {
                let g = profile.big_gamma_jet(t)?;
                let gj = profile.base.jet(t)?;
                let bj = b.jet(t)?;
                Ok(vec![ineq("basic_growth", vec![v(bj) * 3.0, -v(gj * g * bj) * 2.0, -v(g * bj.derivative())])])
            })
        }
        ConditionSet::ModelGrowth => {
            let p0 = IntegralProfile::new(gamma.clone())?;
            let b = b.clone();
            Box::new(move |t| {
                let p = p0.p_jet(t)?;
                let g0 = p0.base.jet(t)?;
                let bj = b.jet(t)?;
                Ok(vec![ineq("model_growth", vec![-v(p * bj.derivative()), -v(g0 * p * bj) * 2.0, v(bj)])])
            })
        }
        ConditionSet::G2G3 => {
            let alpha = match extra.alpha {
                Some(a) => a,
                None => gamma
                    .alpha_over_t_coefficient()
                    .ok_or_else(|| CertificateError::UnsupportedRecipe("G2G3 needs γ = α/t or an explicit alpha".into()))?,
            };
            let (beta, b) = (beta.clone(), b.clone());
            Box::new(move |t| {
                let be = beta.jet(t)?;
                let bj = b.jet(t)?;
                let tj = Jet::variable(t);
                let w = bj - be.derivative() - be / tj;
                Ok(vec![
                    ineq("G2", vec![v(bj), -d(be), -v(be / tj)]),
                    ineq("G3", vec![v(w) * (alpha - 3.0), -d(w) * t]),
                ])
            })
        }
        ConditionSet::H1toH4 | ConditionSet::H2plus => {
            let r = need(extra.r, "r", set)?;
            let m = need(extra.m, "m", set)?;
            check_rm(r, m)?;
            let profile = IntegralProfile::new(gamma.clone())?;
            let (beta, b) = (beta.clone(), b.clone());
            Box::new(move |t| {
                let q = p_quantities(&profile, &beta, &b, r, m, t)?;
                let (s, g, x0) = (q.sigma, q.gamma, q.xi0);
                let h1 = ineq("H1", vec![v(g * s) * (1.0 - 2.0 * (r + m)), v(s * s), -d(s)]);
                let b_nd = ineq("b_nondecr", vec![d(q.b)]);
                if set == ConditionSet::H1toH4 {
                    Ok(vec![
                        h1,
                        ineq(
                            "H2",
                            vec![v(x0 * s) * 2.0, -v(x0 * g) * (m + r), -d(x0) * 0.5, v(g * s * s) * (m + r - 1.0)],
                        ),
                        ineq("H3", vec![v(q.b), -d(q.beta), v(q.beta * s), -v(q.beta * g)]),
                        ineq("H4", vec![v(q.theta * q.b * s), -d(q.theta * q.w), -d(q.theta * q.beta * s)]),
                        b_nd,
                    ])
                } else {
                    let lead = s * (s - g * (r + m)) * (s * 2.0 + g * (1.0 - 2.0 * (r + m)));
                    Ok(vec![
                        ineq("H2plus", vec![v(lead), dd(s) * 0.5]),
                        ineq("logconcave", vec![-dd(q.b.ln())]),
                        h1,
                        b_nd,
                        ineq("gamma_nonincr", vec![-d(g)]),
                    ])
                }
            })
        }
        ConditionSet::Eq61 | ConditionSet::HrGamma => {
            let r = need(extra.r, "r", set)?;
            let coef = if set == ConditionSet::Eq61 {
                let p0 = need(extra.p0, "p0", set)?;
                if !(r > 0.0 && r <= 1.0 / 3.0 + 1e-12) {
                    return Err(CertificateError::Param(format!("r = {r} must lie in (0, 1/3]")));
                }
                2.0 * (p0 - r).min(0.0).powi(2)
            } else {
                if r <= 0.0 {
                    return Err(CertificateError::Param(format!("r = {r} must be positive")));
                }
                2.0 * r * r
            };
            let gamma = gamma.clone();
            Box::new(move |t| {
                let g = gamma.jet(t)?;
                let main = ineq(if set == ConditionSet::Eq61 { "eq61" } else { "Hr_gamma" }, vec![dd(g), -v(g * g * g) * coef]);
                let mut out = vec![main, ineq("gamma_nonincr", vec![-d(g)])];
                if set == ConditionSet::Eq61 {
                    out.push(ineq("gamma_nonneg", vec![v(g)]));
                }
                Ok(out)
            })
        }
    };

    let first = evaluator(grid[0])?;
    let names: Vec<String> = first.iter().map(|c| c.name.to_string()).collect();
    let nc = names.len();
    let mut margins = vec![Vec::with_capacity(grid.len()); nc];
    let mut scales = vec![Vec::with_capacity(grid.len()); nc];
    let mut relative = vec![Vec::with_capacity(grid.len()); nc];
    let mut all_zero = vec![true; nc];
    for (i, &t) in grid.iter().enumerate() {
        let conds = if i == 0 { evaluator(t)? } else { evaluator(t)? };
        for (c, cond) in conds.into_iter().enumerate() {
            let mut m = Scaled::sum(&cond.terms);
            if cond.equality {
                m = -m.abs();
            }
            let scale = Scaled::max_magnitude(&cond.terms);
            if cond.terms.iter().any(|s| s.m != 0.0) {
                all_zero[c] = false;
            }
            let rel = m.relative_to(scale);
            margins[c].push(m.to_f64());
            scales[c].push(scale.to_f64());
            relative[c].push(if rel.is_nan() { f64::NEG_INFINITY } else { rel });
        }
    }
    let vacuous: Vec<String> = names.iter().zip(&all_zero).filter(|(_, z)| **z).map(|(n, _)| n.clone()).collect();

    let mut worst = Worst { condition: names[0].clone(), t: grid[0], margin: margins[0][0], relative: relative[0][0] };
    for c in 0..nc {
        for i in 0..grid.len() {
            if relative[c][i] < worst.relative {
                worst = Worst { condition: names[c].clone(), t: grid[i], margin: margins[c][i], relative: relative[c][i] };
            }
        }
    }
    let violated = relative.iter().flatten().any(|r| *r < -TOL_MARGIN);
    let tight = (0..nc).any(|c| {
        !identities.contains(&names[c]) && !vacuous.contains(&names[c]) && relative[c].iter().all(|r| r.abs() <= TOL_MARGIN)
    });
    let verdict = if violated {
        Verdict::Violated
    } else if tight {
        Verdict::Boundary
    } else {
        Verdict::Satisfied
    };
    Ok(ConditionReport {
        condition_set: set,
        grid: grid.to_vec(),
        names,
        margins,
        scales,
        relative,
        identities,
        vacuous,
        worst,
        verdict,
        tol_margin: TOL_MARGIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn zero() -> Schedule {
        Schedule::constant(0.0, 1.0)
    }

    fn one() -> Schedule {
        Schedule::constant(1.0, 1.0)
    }

    fn report(set: ConditionSet, g: &Schedule, be: &Schedule, b: &Schedule, cert: Option<&Certificate>, extra: ExtraParams) -> ConditionReport {
        check_conditions(set, g, be, b, cert, &extra, &GridSpec::new(g.t0)).unwrap()
    }

    #[test]
    fn gamma_recipe_alpha_three() {
        let g = Schedule::alpha_over_t(3.0, 1.0);
        let c = derive_gamma_certificate(&g, &zero(), &one()).unwrap();
        for t in [1.0, 2.5, 40.0] {
            let p = c.point(t).unwrap();
            assert_relative_eq!(p.theta.value(), t * t / 4.0, max_relative = 1e-14);
            assert_relative_eq!(p.sigma.value(), 2.0 / t, max_relative = 1e-14);
            assert_eq!(p.xi.value(), 0.0);
            assert_relative_eq!(p.c2b.value(), t * t / 4.0, max_relative = 1e-14);
            assert_eq!(c.w.jet(t).unwrap().value(), 1.0);
        }
    }

    #[test]
    fn gamma_hessian_example() {
        let g = Schedule::alpha_over_t(4.0, 1.0);
        let c = derive_gamma_certificate(&g, &one(), &one()).unwrap();
        let p = c.point(10.0).unwrap();
        assert_relative_eq!(p.w.value(), 0.9, max_relative = 1e-14);
        assert_relative_eq!(p.c2b.value(), 10.0, max_relative = 1e-14);
        // q = βΓ²w with Γ = t/3
        assert_relative_eq!(c.weight_q(10.0).unwrap(), 10.0, max_relative = 1e-13);
        let g3 = Schedule::power(1.0, 1.0, 1.0);
        assert!(matches!(derive_gamma_certificate(&g3, &one(), &one()), Err(CertificateError::UnsupportedRecipe(_))));
    }

    #[test]
    fn gamma_recipe_w_equals_b_without_hessian() {
        let g = Schedule::alpha_over_t(4.0, 1.0);
        let b = Schedule::power(2.0, 0.5, 1.0);
        let c = derive_gamma_certificate(&g, &zero(), &b).unwrap();
        for t in [1.0, 3.0, 300.0] {
            assert_eq!(c.w.jet(t).unwrap().value(), b.jet(t).unwrap().value());
        }
    }

    #[test]
    fn p_recipe_sigma_example() {
        let g = Schedule::alpha_over_t(2.0, 1.0);
        let b = Schedule::power(1.0, 1.0, 1.0);
        let c = derive_p_certificate(&g, &zero(), &b, 1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert_relative_eq!(c.point(3.0).unwrap().sigma.value(), 5.0 / 9.0, max_relative = 1e-14);
        let cb = derive_p_certificate(&g, &zero(), &Schedule::constant(2.0, 1.0), 0.25, 0.6).unwrap();
        for t in [1.0, 7.0] {
            assert_relative_eq!(cb.point(t).unwrap().sigma.value(), 0.6 * 2.0 / t, max_relative = 1e-14);
        }
        // β ≡ 0: w = b and c²b = p^{2r} b^{1/3}
        let p = c.point(5.0).unwrap();
        assert_relative_eq!(p.w.value(), 5.0, max_relative = 1e-14);
        assert_relative_eq!(p.c2b.value(), 5f64.powf(4.0 / 3.0) * 5f64.powf(1.0 / 3.0), max_relative = 1e-13);
    }

    #[test]
    fn p_recipe_parameter_errors() {
        let g = Schedule::alpha_over_t(2.0, 1.0);
        let b = Schedule::power(1.0, 1.0, 1.0);
        assert!(matches!(derive_p_certificate(&g, &zero(), &b, 0.5, 0.5), Err(CertificateError::Param(_))));
        assert!(matches!(derive_p_certificate(&g, &zero(), &b, 0.3, 0.5), Err(CertificateError::Param(_))));
        let dec = Schedule::power(1.0, -1.0, 1.0);
        assert!(matches!(derive_p_certificate(&g, &zero(), &dec, 0.3, 0.6), Err(CertificateError::NonmonotoneB { .. })));
    }

    #[test]
    fn model_recipe_examples() {
        let c = derive_model_certificate(&zero(), &one()).unwrap();
        let p = c.point(4.0).unwrap();
        assert_eq!((p.theta.value(), p.sigma.value(), p.gamma.value()), (1.0, 1.0, 1.0));
        let c = derive_model_certificate(&Schedule::alpha_over_t(0.5, 1.0), &one()).unwrap();
        for t in [1.0, 4.0, 9.0] {
            let p = c.point(t).unwrap();
            assert_relative_eq!(p.theta.value().sqrt(), t.sqrt(), max_relative = 1e-14);
            assert_relative_eq!(c.gamma.jet(t).unwrap().value(), 0.5 / t + 1.0 / t.sqrt(), max_relative = 1e-14);
            assert!(c.recovery_residuals(t).unwrap().0 <= 1e-8);
        }
    }

    #[test]
    fn recovery_identities_for_all_recipes() {
        let certs = [
            derive_gamma_certificate(&Schedule::alpha_over_t(3.0, 1.0), &zero(), &one()).unwrap(),
            derive_gamma_certificate(&Schedule::alpha_over_t_power(1.0, 0.5, 1.0), &zero(), &Schedule::power(1.0, 0.5, 1.0)).unwrap(),
            derive_gamma_certificate(&Schedule::alpha_over_t(4.0, 1.0), &one(), &one()).unwrap(),
            derive_p_certificate(&Schedule::alpha_over_t(2.0, 1.0), &Schedule::power(0.5, -1.0, 1.0), &Schedule::power(1.0, 1.0, 1.0), 0.25, 0.6).unwrap(),
            derive_model_certificate(&Schedule::alpha_over_t(0.5, 1.0), &one()).unwrap(),
        ];
        for c in &certs {
            for t in GridSpec::new(1.0).grid().unwrap().into_iter().step_by(7) {
                let (rx, rc) = c.recovery_residuals(t).unwrap();
                assert!(rx <= 1e-8, "{:?} ξ residual {rx} at {t}", c.recipe);
                assert!(rc <= 1e-8, "{:?} c residual {rc} at {t}", c.recipe);
            }
        }
    }

    #[test]
    fn system_a_alpha_sweep() {
        for (alpha, want) in [(2.0, Verdict::Violated), (3.0, Verdict::Boundary), (4.0, Verdict::Satisfied)] {
            let g = Schedule::alpha_over_t(alpha, 1.0);
            let c = derive_gamma_certificate(&g, &zero(), &one()).unwrap();
            let a = report(ConditionSet::SystemA, &g, &zero(), &one(), Some(&c), ExtraParams::default());
            let b = report(ConditionSet::SystemB, &g, &zero(), &one(), Some(&c), ExtraParams::default());
            assert_eq!(a.verdict, want, "alpha {alpha}");
            assert_eq!(b.verdict, want, "alpha {alpha}");
        }
    }

    #[test]
    fn gamma_growth_examples() {
        let r3 = report(ConditionSet::GammaGrowth, &Schedule::alpha_over_t(3.0, 1.0), &zero(), &one(), None, ExtraParams::default());
        assert_eq!(r3.verdict, Verdict::Boundary);
        let r2 = report(ConditionSet::GammaGrowth, &Schedule::alpha_over_t(2.0, 1.0), &zero(), &one(), None, ExtraParams::default());
        assert_eq!(r2.verdict, Verdict::Violated);
        assert!(r2.margins[0].iter().all(|m| (m + 1.0).abs() <= 1e-9));
        // satisfied iff α ≥ 3 + q for b = t^q
        for (alpha, q) in [(3.5, 0.5), (4.0, 1.0), (3.2, 0.5), (5.0, 1.0)] {
            let r = report(ConditionSet::GammaGrowth, &Schedule::alpha_over_t(alpha, 1.0), &zero(), &Schedule::power(1.0, q, 1.0), None, ExtraParams::default());
            assert_eq!(r.verdict.holds(), alpha >= 3.0 + q, "alpha {alpha} q {q}");
        }
    }

    #[test]
    fn g2g3_example() {
        let g = Schedule::alpha_over_t(3.0, 2.0);
        let (be, b) = (Schedule::constant(1.0, 2.0), Schedule::constant(1.0, 2.0));
        let r = check_conditions(ConditionSet::G2G3, &g, &be, &b, None, &ExtraParams::default(), &GridSpec::new(2.0)).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.condition_verdict("G2"), Some(Verdict::Satisfied));
        let g4 = Schedule::alpha_over_t(4.0, 2.0);
        let r = check_conditions(ConditionSet::G2G3, &g4, &be, &b, None, &ExtraParams::default(), &GridSpec::new(2.0)).unwrap();
        assert_eq!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn weights() {
        let g = Schedule::alpha_over_t(5.0, 1.0);
        let c = derive_gamma_certificate(&g, &zero(), &one()).unwrap();
        for t in [1.0, 10.0, 100.0] {
            assert_eq!(c.weight_q(t).unwrap(), 0.0);
            // t(α−3)/(α−1)²
            assert_relative_eq!(c.values_weight(t).unwrap(), t * 2.0 / 16.0, max_relative = 1e-13);
        }
        let c3 = derive_gamma_certificate(&Schedule::alpha_over_t(3.0, 1.0), &zero(), &one()).unwrap();
        assert!(c3.values_weight(17.0).unwrap().abs() < 1e-12);
        // Hessian Γ-recipe: q = βΓ²w
        let c = derive_gamma_certificate(&Schedule::alpha_over_t(4.0, 1.0), &Schedule::power(1.0, 0.5, 1.0), &Schedule::power(2.0, 1.0, 1.0)).unwrap();
        for t in [2.0, 20.0] {
            let p = c.point(t).unwrap();
            assert_relative_eq!(c.weight_q(t).unwrap(), p.beta.value() * (t / 3.0).powi(2) * p.w.value(), max_relative = 1e-12);
        }
    }

    #[test]
    fn upsilon_only_for_general_recipe() {
        let g = Schedule::alpha_over_t(2.0, 1.0);
        let c = derive_p_certificate(&g, &zero(), &Schedule::power(1.0, 1.0, 1.0), 1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert!(c.upsilon(3.0).unwrap().is_some());
        assert!(derive_model_certificate(&zero(), &one()).unwrap().upsilon(3.0).unwrap().is_none());
    }

    #[test]
    fn eq61_and_hr_gamma() {
        let extra = ExtraParams { r: Some(1.0 / 3.0), p0: Some(0.0), ..Default::default() };
        let r2 = report(ConditionSet::Eq61, &Schedule::alpha_over_t(2.0, 1.0), &zero(), &one(), None, extra);
        assert_eq!(r2.verdict, Verdict::Satisfied);
        let r3 = report(ConditionSet::Eq61, &Schedule::alpha_over_t(3.0, 1.0), &zero(), &one(), None, extra);
        assert_eq!(r3.verdict, Verdict::Boundary);
        let r4 = report(ConditionSet::Eq61, &Schedule::alpha_over_t(4.0, 1.0), &zero(), &one(), None, extra);
        assert_eq!(r4.verdict, Verdict::Violated);
        let hr = report(ConditionSet::HrGamma, &Schedule::alpha_over_t(2.0, 1.0), &zero(), &one(), None, ExtraParams { r: Some(1.0 / 3.0), ..Default::default() });
        assert_eq!(hr.verdict, Verdict::Satisfied);
    }

    #[test]
    fn missing_inputs() {
        let g = Schedule::alpha_over_t(3.0, 1.0);
        assert!(matches!(
            check_conditions(ConditionSet::SystemA, &g, &zero(), &one(), None, &ExtraParams::default(), &GridSpec::new(1.0)),
            Err(CertificateError::MissingCertificate(_))
        ));
        assert!(matches!(
            check_conditions_on(ConditionSet::GammaGrowth, &g, &zero(), &one(), None, &ExtraParams::default(), &[2.0, 1.0]),
            Err(CertificateError::Grid(_))
        ));
        assert!(matches!(
            check_conditions_on(ConditionSet::GammaGrowth, &g, &zero(), &one(), None, &ExtraParams::default(), &[]),
            Err(CertificateError::Grid(_))
        ));
    }

    #[test]
    fn systems_a_and_b_agree() {
        let one1 = one();
        let cases: Vec<(Certificate, f64)> = vec![
            (derive_gamma_certificate(&Schedule::alpha_over_t(4.0, 1.0), &zero(), &Schedule::power(1.0, 0.5, 1.0)).unwrap(), 1.0),
            (derive_gamma_certificate(&Schedule::alpha_over_t(2.5, 1.0), &zero(), &one1).unwrap(), 1.0),
            (derive_gamma_certificate(&Schedule::alpha_over_t(4.0, 2.0), &Schedule::constant(1.0, 2.0), &Schedule::constant(1.0, 2.0)).unwrap(), 2.0),
            (derive_p_certificate(&Schedule::alpha_over_t(2.0, 1.0), &zero(), &Schedule::power(1.0, 1.0, 1.0), 1.0 / 3.0, 2.0 / 3.0).unwrap(), 1.0),
            (derive_p_certificate(&Schedule::alpha_over_t(2.0, 1.0), &zero(), &Schedule::power(1.0, 1.0, 1.0), 0.25, 0.6).unwrap(), 1.0),
            (derive_model_certificate(&Schedule::alpha_over_t(0.5, 1.0), &one1).unwrap(), 1.0),
        ];
        for (c, t0) in &cases {
            let grid = GridSpec::new(*t0);
            let a = check_conditions(ConditionSet::SystemA, &c.gamma, &c.beta, &c.b, Some(c), &ExtraParams::default(), &grid).unwrap();
            let b = check_conditions(ConditionSet::SystemB, &c.gamma, &c.beta, &c.b, Some(c), &ExtraParams::default(), &grid).unwrap();
            assert_eq!(a.verdict, b.verdict, "{:?}: A worst {:?}, B worst {:?}", c.recipe, a.worst, b.worst);
        }
    }

    #[test]
    fn p_recipe_hypotheses_hold_for_alpha_up_to_three_plus_q() {
        for q in [0.0, 0.5, 1.0, 2.0] {
            for alpha in [1.1, 2.0, 3.0, 3.0 + q] {
                let g = Schedule::alpha_over_t(alpha, 1.0);
                let b = Schedule::power(2.0, q, 1.0);
                let extra = ExtraParams { r: Some(1.0 / 3.0), m: Some(2.0 / 3.0), ..Default::default() };
                let r = report(ConditionSet::H1toH4, &g, &zero(), &b, None, extra);
                assert!(r.verdict.holds(), "alpha {alpha} q {q}: {:?}", r.worst);
            }
        }
        let r = report(
            ConditionSet::H1toH4,
            &Schedule::alpha_over_t(4.5, 1.0),
            &zero(),
            &one(),
            None,
            ExtraParams { r: Some(1.0 / 3.0), m: Some(2.0 / 3.0), ..Default::default() },
        );
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn weight_q_nonnegative_where_vii_holds() {
        let c = derive_gamma_certificate(&Schedule::alpha_over_t(4.0, 1.0), &Schedule::power(1.0, 0.5, 1.0), &Schedule::power(1.0, 1.0, 1.0)).unwrap();
        let rep = report(ConditionSet::SystemA, &c.gamma, &c.beta, &c.b, Some(&c), ExtraParams::default());
        let vii = rep.relative_column("vii").unwrap();
        for (t, m) in rep.grid.iter().zip(vii) {
            if *m >= 0.0 {
                assert!(c.weight_q(*t).unwrap() >= -1e-9, "t {t}");
            }
        }
    }

    #[test]
    fn values_weight_nonnegative_for_satisfied_p_recipe() {
        let g = Schedule::alpha_over_t(2.0, 1.0);
        let b = Schedule::power(1.0, 1.0, 1.0);
        let c = derive_p_certificate(&g, &zero(), &b, 1.0 / 3.0, 2.0 / 3.0).unwrap();
        let rep = report(ConditionSet::SystemA, &g, &zero(), &b, Some(&c), ExtraParams::default());
        assert!(rep.verdict.holds());
        for t in &rep.grid {
            assert!(c.values_weight(*t).unwrap() >= -1e-8);
        }
    }
}
