//! Integration of `ẍ + γẋ + β∇²f(x)ẋ + b∇f(x) = 0` as a first-order system
//! in `(x, ẋ)` with an adaptive Dormand–Prince 5(4) pair.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificates::Certificate;
use crate::problems::{hvp_any, Objective, ProblemError};
use crate::schedules::{Schedule, ScheduleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("energy needs a minimizer z: none supplied and the objective has no known argmin")]
    MissingArgmin,
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Coefficients `(γ, β, b)` of the dynamic, started at `t0`.
#[derive(Clone, Debug)]
pub struct DynamicsSpec {
    pub gamma: Schedule,
    pub beta: Schedule,
    pub b: Schedule,
    pub t0: f64,
}

impl DynamicsSpec {
    pub fn new(gamma: Schedule, beta: Schedule, b: Schedule, t0: f64) -> Self {
        DynamicsSpec { gamma, beta, b, t0 }
    }

    /// Samples `γ ≥ 0`, `β ≥ 0`, `b > 0` on `times`.
    pub fn validate_on(&self, times: &[f64]) -> Result<(), DynamicsError> {
        for &t in times {
            let (g, be, b) = (self.gamma.jet(t)?.value(), self.beta.jet(t)?.value(), self.b.jet(t)?.value());
            if !(g >= 0.0 && be >= 0.0 && b > 0.0) {
                return Err(DynamicsError::Config(format!("need γ ≥ 0, β ≥ 0, b > 0; at t = {t}: γ = {g}, β = {be}, b = {b}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub hmin: f64,
    pub hmax: f64,
    pub max_steps: u64,
    /// Log-spaced checkpoints per decade of time (linear grid of
    /// `linear_points` when `t0 ≤ 0`).
    pub checkpoints_per_decade: usize,
    pub linear_points: usize,
    /// Explicit checkpoint times; overrides the generated grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_times: Option<Vec<f64>>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-9,
            atol: 1e-12,
            hmin: 1e-12,
            hmax: f64::INFINITY,
            max_steps: 200_000_000,
            checkpoints_per_decade: 200,
            linear_points: 1000,
            checkpoint_times: None,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        IntegratorConfig { rtol, atol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let ok = self.rtol > 0.0
            && self.atol > 0.0
            && self.hmin > 0.0
            && self.hmin <= self.hmax
            && self.max_steps > 0
            && self.checkpoints_per_decade > 0
            && self.linear_points > 0;
        if ok {
            Ok(())
        } else {
            Err(DynamicsError::Config(format!("need rtol, atol > 0, 0 < hmin ≤ hmax, positive step and checkpoint counts: {self:?}")))
        }
    }

    /// Checkpoint times on `[t0, horizon]`, both ends included.
    pub fn checkpoints(&self, t0: f64, horizon: f64) -> Vec<f64> {
        if let Some(ts) = &self.checkpoint_times {
            let mut ts: Vec<f64> = ts.iter().copied().filter(|t| *t >= t0 && *t <= horizon).collect();
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            return ts;
        }
        let mut ts = Vec::new();
        if t0 > 0.0 {
            let n = ((horizon / t0).log10() * self.checkpoints_per_decade as f64).ceil() as usize;
            let step = (horizon / t0).ln() / n.max(1) as f64;
            ts.extend((0..n).map(|i| t0 * (step * i as f64).exp()));
        } else {
            let n = self.linear_points;
            ts.extend((0..n).map(|i| t0 + (horizon - t0) * i as f64 / n as f64));
        }
        ts.push(horizon);
        ts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    StepFloorHit,
    MaxStepsHit,
    DomainRejected,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::StepFloorHit => "step_floor_hit",
            Status::MaxStepsHit => "max_steps_hit",
            Status::DomainRejected => "domain_rejected",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// `f(x) − min`, floored at 0.
    pub fgap: f64,
    pub grad_norm_sq: f64,
    /// `NaN` without a certificate.
    pub energy: f64,
    /// Running `∫ values_weight·fgap`; `NaN` without a certificate.
    pub int_values: f64,
    /// Running `∫ q‖∇f‖²`; `NaN` without a certificate.
    pub int_grads: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub integral_values: f64,
    pub integral_grads: f64,
    pub status: Status,
    pub steps_accepted: u64,
    pub steps_rejected: u64,
    /// Reference minimum used for `fgap`: known, or best observed minus a margin.
    pub f_min: f64,
    pub f_min_known: bool,
    /// Anchor of the energy.
    pub z: Option<Vec<f64>>,
    pub t_end: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn fgaps(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.fgap).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// `(ẋ, v̇)` with `v̇ = −γv − β∇²f(x)v − b∇f(x)`.
pub fn rhs(spec: &DynamicsSpec, obj: &dyn Objective, t: f64, x: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>), DynamicsError> {
    let d = x.len();
    let mut y = Vec::with_capacity(2 * d);
    y.extend_from_slice(x);
    y.extend_from_slice(v);
    let mut out = vec![0.0; 2 * d];
    let mut f = Rhs::new(spec, obj, d);
    f.eval(t, &y, &mut out)?;
    let dv = out.split_off(d);
    Ok((out, dv))
}

/// `c²b(f(x)−f(z)) + (θσ²/2)‖x−z+(ẋ+β∇f(x))/σ‖² + (ξ/2)‖x−z‖²`.
pub fn energy(
    cert: &Certificate,
    spec: &DynamicsSpec,
    obj: &dyn Objective,
    z: Option<&[f64]>,
    t: f64,
    x: &[f64],
    v: &[f64],
) -> Result<f64, DynamicsError> {
    let z = match z {
        Some(z) => z.to_vec(),
        None => obj.known_argmin().ok_or(DynamicsError::MissingArgmin)?,
    };
    let fz = obj.value(&z)?;
    let g = obj.grad_vec(x)?;
    energy_with(cert, spec, t, x, v, &z, obj.value(x)? - fz, &g)
}

#[allow(clippy::too_many_arguments)]
fn energy_with(cert: &Certificate, spec: &DynamicsSpec, t: f64, x: &[f64], v: &[f64], z: &[f64], gap: f64, g: &[f64]) -> Result<f64, DynamicsError> {
    let p = cert.point(t)?;
    let (theta, sigma, xi, c2b) = (p.theta.value(), p.sigma.value(), p.xi.value(), p.c2b.value());
    let beta = spec.beta.value_fast(t);
    let mut kin = 0.0;
    let mut anchor = 0.0;
    for i in 0..x.len() {
        let dz = x[i] - z[i];
        let u = dz + (v[i] + beta * g[i]) / sigma;
        kin += u * u;
        anchor += dz * dz;
    }
    let anchor_term = if xi == 0.0 { 0.0 } else { 0.5 * xi * anchor };
    Ok(c2b * gap + 0.5 * theta * sigma * sigma * kin + anchor_term)
}

struct Rhs<'a> {
    gamma: &'a Schedule,
    beta: &'a Schedule,
    b: &'a Schedule,
    beta_zero: bool,
    obj: &'a dyn Objective,
    d: usize,
    grad: Vec<f64>,
    hv: Vec<f64>,
    last: (f64, [f64; 3]),
}

impl<'a> Rhs<'a> {
    fn new(spec: &'a DynamicsSpec, obj: &'a dyn Objective, d: usize) -> Self {
        Rhs {
            gamma: &spec.gamma,
            beta: &spec.beta,
            b: &spec.b,
            beta_zero: spec.beta.is_zero(),
            obj,
            d,
            grad: vec![0.0; d],
            hv: vec![0.0; d],
            last: (f64::NAN, [0.0; 3]),
        }
    }

    /// `[γ(t), β(t), b(t)]`, remembering the most recent time.
    #[inline]
    fn coefs(&mut self, t: f64) -> [f64; 3] {
        if t == self.last.0 {
            return self.last.1;
        }
        let be = if self.beta_zero { 0.0 } else { self.beta.value_fast(t) };
        let c = [self.gamma.value_fast(t), be, self.b.value_fast(t)];
        self.last = (t, c);
        c
    }

    /// Leaves `∇f(x)` in `self.grad`.
    fn eval(&mut self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), ProblemError> {
        self.eval_w(Dyn(2 * self.d), t, y, out)
    }

    #[inline(always)]
    fn eval_w<W: Width>(&mut self, w: W, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), ProblemError> {
        let d = w.n() / 2;
        let (y, out) = (&y[..2 * d], &mut out[..2 * d]);
        let (x, v) = y.split_at(d);
        let (dx, dv) = out.split_at_mut(d);
        self.obj.grad(x, &mut self.grad)?;
        let [g, be, b] = self.coefs(t);
        for (o, vi) in dx.iter_mut().zip(v) {
            *o = *vi;
        }
        let grad = &self.grad[..d];
        if self.beta_zero {
            for ((o, vi), gi) in dv.iter_mut().zip(v).zip(grad) {
                *o = -g * vi - b * gi;
            }
        } else {
            hvp_any(self.obj, x, v, &mut self.hv)?;
            for (((o, vi), gi), hi) in dv.iter_mut().zip(v).zip(grad).zip(&self.hv[..d]) {
                *o = -g * vi - be * hi - b * gi;
            }
        }
        Ok(())
    }
}

const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const BETA_PI: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA_PI * 0.75;
const FACC1: f64 = 5.0;
const FACC2: f64 = 0.1;

/// State width, fixed at compile time for the common small systems so the
/// stage loops unroll.
trait Width: Copy {
    fn n(self) -> usize;
}

#[derive(Clone, Copy)]
struct Fixed<const N: usize>;

impl<const N: usize> Width for Fixed<N> {
    #[inline(always)]
    fn n(self) -> usize {
        N
    }
}

#[derive(Clone, Copy)]
struct Dyn(usize);

impl Width for Dyn {
    #[inline(always)]
    fn n(self) -> usize {
        self.0
    }
}

/// Stage derivatives `k₁..k₇`, stored contiguously.
struct Stages {
    n: usize,
    k: Vec<f64>,
    ytmp: Vec<f64>,
    ynew: Vec<f64>,
    rcont: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Stages { n, k: vec![0.0; 7 * n], ytmp: vec![0.0; n], ynew: vec![0.0; n], rcont: vec![0.0; 5 * n] }
    }

    fn k(&self, j: usize) -> &[f64] {
        &self.k[j * self.n..(j + 1) * self.n]
    }

    fn k_mut(&mut self, j: usize) -> &mut [f64] {
        let n = self.n;
        &mut self.k[j * n..(j + 1) * n]
    }

    /// FSAL: the last stage becomes the first of the next step.
    fn rotate(&mut self) {
        let n = self.n;
        self.k.copy_within(6 * n..7 * n, 0);
    }
}

/// `out = y + h·Σ cⱼkⱼ`.
#[inline(always)]
fn lincomb<W: Width>(w: W, out: &mut [f64], y: &[f64], h: f64, k: &[f64], coef: &[f64]) {
    let n = w.n();
    let (out, y) = (&mut out[..n], &y[..n]);
    out.fill(0.0);
    for (kj, c) in k.chunks_exact(n).zip(coef) {
        for (o, kv) in out.iter_mut().zip(kj) {
            *o += c * kv;
        }
    }
    for (o, yi) in out.iter_mut().zip(y) {
        *o = yi + h * *o;
    }
}

/// Result of one attempted step.
enum StepOutcome {
    Ok(f64),
    Domain,
}

fn is_domain(e: &ProblemError) -> bool {
    matches!(e, ProblemError::Domain(_))
}

const STAGES: [(f64, &[f64]); 5] = [
    (C2, &[A21]),
    (C3, &[A31, A32]),
    (C4, &[A41, A42, A43]),
    (C5, &[A51, A52, A53, A54]),
    (1.0, &[A61, A62, A63, A64, A65]),
];
const B5: [f64; 6] = [A71, 0.0, A73, A74, A75, A76];
const ERR: [f64; 7] = [E1, 0.0, E3, E4, E5, E6, E7];
const DENSE: [f64; 7] = [D1, 0.0, D3, D4, D5, D6, D7];

/// Attempts a step of size `h` from `(t, y)`; stage 0 must hold `f(t, y)`.
/// Returns the scaled error norm.
fn try_step(f: &mut Rhs<'_>, s: &mut Stages, t: f64, y: &[f64], h: f64, rtol: f64, atol: f64) -> Result<StepOutcome, ProblemError> {
    match y.len() {
        2 => try_step_w(Fixed::<2>, f, s, t, y, h, rtol, atol),
        4 => try_step_w(Fixed::<4>, f, s, t, y, h, rtol, atol),
        6 => try_step_w(Fixed::<6>, f, s, t, y, h, rtol, atol),
        n => try_step_w(Dyn(n), f, s, t, y, h, rtol, atol),
    }
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn try_step_w<W: Width>(
    w: W,
    f: &mut Rhs<'_>,
    s: &mut Stages,
    t: f64,
    y: &[f64],
    h: f64,
    rtol: f64,
    atol: f64,
) -> Result<StepOutcome, ProblemError> {
    let n = w.n();
    let y = &y[..n];
    for (idx, (c, coef)) in STAGES.iter().enumerate() {
        let stage = idx + 1;
        let (done, rest) = s.k.split_at_mut(stage * n);
        lincomb(w, &mut s.ytmp, y, h, done, coef);
        match f.eval_w(w, t + c * h, &s.ytmp, &mut rest[..n]) {
            Ok(()) => {}
            Err(e) if is_domain(&e) => return Ok(StepOutcome::Domain),
            Err(e) => return Err(e),
        }
    }
    lincomb(w, &mut s.ynew, y, h, &s.k[..6 * n], &B5);
    if !f.obj.admissible(&s.ynew[..f.d]) {
        return Ok(StepOutcome::Domain);
    }
    match f.eval_w(w, t + h, &s.ynew, &mut s.k[6 * n..]) {
        Ok(()) => {}
        Err(e) if is_domain(&e) => return Ok(StepOutcome::Domain),
        Err(e) => return Err(e),
    }
    // reuse ytmp for the embedded error estimate
    let (est, ynew) = (&mut s.ytmp[..n], &s.ynew[..n]);
    est.fill(0.0);
    for (kj, &c) in s.k.chunks_exact(n).zip(&ERR) {
        if c != 0.0 {
            for (e, kv) in est.iter_mut().zip(kj) {
                *e += c * kv;
            }
        }
    }
    let mut err = 0.0;
    for ((e, yo), yn) in est.iter().zip(y).zip(ynew) {
        let sk = atol + rtol * yo.abs().max(yn.abs());
        let r = h * e / sk;
        err += r * r;
    }
    let err = (err / n as f64).sqrt();
    Ok(StepOutcome::Ok(if err.is_finite() { err } else { f64::INFINITY }))
}

fn prepare_dense(s: &mut Stages, y: &[f64], h: f64) {
    let n = s.n;
    for i in 0..n {
        let ydiff = s.ynew[i] - y[i];
        let bspl = h * s.k[i] - ydiff;
        let mut dsum = 0.0;
        for (j, c) in DENSE.iter().enumerate() {
            dsum += c * s.k[j * n + i];
        }
        s.rcont[i] = y[i];
        s.rcont[n + i] = ydiff;
        s.rcont[2 * n + i] = bspl;
        s.rcont[3 * n + i] = ydiff - h * s.k[6 * n + i] - bspl;
        s.rcont[4 * n + i] = h * dsum;
    }
}

fn dense(s: &Stages, theta: f64, out: &mut [f64]) {
    let n = s.n;
    let th1 = 1.0 - theta;
    let r = &s.rcont;
    for (i, o) in out.iter_mut().enumerate() {
        *o = r[i] + theta * (r[n + i] + th1 * (r[2 * n + i] + theta * (r[3 * n + i] + th1 * r[4 * n + i])));
    }
}

/// Initial step guess from the local scale of `y` and `y'`.
fn initial_step(f: &mut Rhs<'_>, t: f64, y: &[f64], f0: &[f64], hmax: f64, rtol: f64, atol: f64) -> f64 {
    let n = y.len() as f64;
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..y.len() {
        let sk = atol + rtol * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
    h = h.min(hmax);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h * b).collect();
    let mut f1 = vec![0.0; y.len()];
    if !f.obj.admissible(&y1[..f.d]) || f.eval(t + h, &y1, &mut f1).is_err() {
        return h * 1e-3;
    }
    let mut der2 = 0.0;
    for i in 0..y.len() {
        let sk = atol + rtol * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = (der2 / n).sqrt() / h;
    let der12 = der2.abs().max((dnf / n).sqrt());
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    (100.0 * h).min(h1).min(hmax)
}

/// Largest eigenvalue estimate by power iteration on the Hessian.
struct Curvature {
    u: Vec<f64>,
    hu: Vec<f64>,
    l: f64,
}

impl Curvature {
    fn new(d: usize) -> Self {
        Curvature { u: vec![1.0 / (d as f64).sqrt(); d], hu: vec![0.0; d], l: 0.0 }
    }

    fn update(&mut self, obj: &dyn Objective, x: &[f64], iters: usize) {
        for _ in 0..iters {
            if hvp_any(obj, x, &self.u, &mut self.hu).is_err() {
                return;
            }
            let nrm = self.hu.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !(nrm > 0.0 && nrm.is_finite()) {
                return;
            }
            self.l = nrm;
            for (u, h) in self.u.iter_mut().zip(&self.hu) {
                *u = h / nrm;
            }
        }
    }
}

/// Relative node spacing of the tabulated integral weights.
const WEIGHT_SPACING: f64 = 1e-4;

/// Certificate weights tabulated on a grid with spacing `WEIGHT_SPACING·max(|t|, 1)`
/// and interpolated linearly; times must be visited in increasing order.
/// Points farther apart than one node spacing are evaluated exactly.
struct WeightTable<'a> {
    cert: &'a Certificate,
    horizon: f64,
    lo: (f64, (f64, f64)),
    hi: (f64, (f64, f64)),
}

impl<'a> WeightTable<'a> {
    fn new(cert: &'a Certificate, t0: f64, horizon: f64) -> Result<Self, ScheduleError> {
        let w = cert.weights(t0)?;
        Ok(WeightTable { cert, horizon, lo: (t0, w), hi: (t0, w) })
    }

    fn spacing(t: f64) -> f64 {
        WEIGHT_SPACING * t.abs().max(1.0)
    }

    fn at(&mut self, t: f64) -> Result<(f64, f64), ScheduleError> {
        if t == self.hi.0 {
            return Ok(self.hi.1);
        }
        if t > self.hi.0 {
            if t - self.hi.0 > Self::spacing(self.hi.0) {
                let w = self.cert.weights(t)?;
                self.lo = (t, w);
                self.hi = (t, w);
                return Ok(w);
            }
            let next = (self.hi.0 + Self::spacing(self.hi.0)).min(self.horizon).max(t);
            self.lo = self.hi;
            self.hi = (next, self.cert.weights(next)?);
        }
        let (ta, (va, qa)) = self.lo;
        let (tb, (vb, qb)) = self.hi;
        if tb == ta {
            return Ok(self.hi.1);
        }
        let u = (t - ta) / (tb - ta);
        Ok((va + u * (vb - va), qa + u * (qb - qa)))
    }
}

/// Integrates from `(x0, v0)` at `spec.t0` to `horizon`, sampling at the
/// configured checkpoints. With a certificate, records `E(t)` and advances
/// the two integral estimates by the trapezoid rule over accepted steps.
#[allow(clippy::too_many_arguments)]
pub fn integrate(
    spec: &DynamicsSpec,
    obj: &dyn Objective,
    x0: &[f64],
    v0: &[f64],
    horizon: f64,
    cfg: &IntegratorConfig,
    cert: Option<&Certificate>,
    z: Option<&[f64]>,
) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    let d = obj.dim();
    if x0.len() != d || v0.len() != d {
        return Err(ProblemError::Dimension { expected: d, got: x0.len().max(v0.len()) }.into());
    }
    let t0 = spec.t0;
    if !(horizon > t0) {
        return Err(DynamicsError::Config(format!("horizon {horizon} must exceed t0 = {t0}")));
    }
    if !obj.admissible(x0) {
        return Err(ProblemError::Domain(obj.name()).into());
    }
    let checkpoints = cfg.checkpoints(t0, horizon);
    if checkpoints.is_empty() {
        return Err(DynamicsError::Config("no checkpoints inside [t0, horizon]".into()));
    }
    let probe: Vec<f64> = checkpoints.iter().step_by((checkpoints.len() / 64).max(1)).copied().collect();
    spec.validate_on(&probe)?;

    let z: Option<Vec<f64>> = match (cert, z) {
        (_, Some(z)) => Some(z.to_vec()),
        (Some(_), None) => Some(obj.project_argmin(x0).or_else(|| obj.known_argmin()).ok_or(DynamicsError::MissingArgmin)?),
        (None, None) => obj.project_argmin(x0).or_else(|| obj.known_argmin()),
    };
    let fz = match &z {
        Some(z) => Some(obj.value(z)?),
        None => None,
    };
    let known_min = obj.known_min();

    let n = 2 * d;
    let mut y = Vec::with_capacity(n);
    y.extend_from_slice(x0);
    y.extend_from_slice(v0);
    let mut f = Rhs::new(spec, obj, d);
    let mut s = Stages::new(n);
    f.eval(t0, &y, s.k_mut(0))?;
    let mut grad_now = f.grad.clone();
    let mut f_now = obj.value(x0)?;

    let (rtol, atol) = (cfg.rtol, cfg.atol);
    let mut curv = Curvature::new(d);
    curv.update(obj, x0, 8);
    let cap = |[g, be, b]: [f64; 3], l: f64, hmax: f64| -> f64 {
        let mut c = hmax;
        if l > 0.0 {
            if b > 0.0 {
                c = c.min(2.5 / (b * l).sqrt());
            }
            if be > 0.0 {
                c = c.min(3.0 / (be * l));
            }
        }
        if g > 0.0 {
            c = c.min(3.0 / g);
        }
        c
    };
    let mut h = initial_step(&mut f, t0, &y, &s.k(0).to_vec(), cfg.hmax, rtol, atol).min(cap(f.coefs(t0), curv.l, cfg.hmax)).min(horizon - t0);
    if !h.is_finite() {
        h = 1e-6 * (horizon - t0);
    }
    h = h.max(cfg.hmin).min(horizon - t0);

    // samples store raw f(x); fgap is fixed up at the end when the minimum is unknown
    struct Raw {
        t: f64,
        y: Vec<f64>,
        f: f64,
        gn2: f64,
        energy: f64,
        acc: [f64; 3],
    }
    let mut raw: Vec<Raw> = Vec::with_capacity(checkpoints.len());
    let mut best_f = f_now;

    let record = |t: f64, yv: &[f64], fval: f64, g: &[f64], acc: [f64; 3]| -> Result<Raw, DynamicsError> {
        let energy = match (cert, &z, fz) {
            (Some(c), Some(z), Some(fz)) => energy_with(c, spec, t, &yv[..d], &yv[d..], z, fval - fz, g)?,
            _ => f64::NAN,
        };
        Ok(Raw { t, y: yv.to_vec(), f: fval, gn2: g.iter().map(|a| a * a).sum(), energy, acc })
    };

    // ∫ w_v·f, ∫ w_v, ∫ q‖∇f‖²
    let mut acc = [0.0f64; 3];
    let mut gn2_now: f64 = grad_now.iter().map(|a| a * a).sum();
    let mut table = match cert {
        Some(c) => Some(WeightTable::new(c, t0, horizon)?),
        None => None,
    };
    let mut weights_now = match table.as_mut() {
        Some(tb) => Some(tb.at(t0)?),
        None => None,
    };

    let mut next_cp = 0;
    while next_cp < checkpoints.len() && checkpoints[next_cp] <= t0 {
        raw.push(record(t0, &y, f_now, &grad_now, acc)?);
        next_cp += 1;
    }

    let mut t = t0;
    let mut status = Status::Completed;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let (mut accepted, mut rejected) = (0u64, 0u64);
    let mut ybuf = vec![0.0; n];
    let mut gbuf = vec![0.0; d];

    while t < horizon {
        if accepted + rejected >= cfg.max_steps {
            status = Status::MaxStepsHit;
            break;
        }
        let room = horizon - t;
        let last = h >= room * (1.0 - 1e-12);
        if last {
            h = room;
        }
        if h < cfg.hmin && !last {
            status = Status::StepFloorHit;
            break;
        }
        let err = match try_step(&mut f, &mut s, t, &y, h, rtol, atol)? {
            StepOutcome::Domain => {
                rejected += 1;
                h *= 0.5;
                last_rejected = true;
                if h < cfg.hmin {
                    status = Status::DomainRejected;
                    break;
                }
                continue;
            }
            StepOutcome::Ok(e) => e,
        };
        let fac11 = err.powf(EXPO1);
        if err > 1.0 {
            rejected += 1;
            h /= (fac11 / SAFE).min(FACC1);
            last_rejected = true;
            if !(h > 0.0) {
                status = Status::StepFloorHit;
                break;
            }
            continue;
        }
        let fac = (fac11 / facold.powf(BETA_PI) / SAFE).clamp(FACC2, FACC1);
        let mut hnew = h / fac;
        facold = err.max(1e-4);
        if last_rejected {
            hnew = hnew.min(h);
        }
        last_rejected = false;
        accepted += 1;
        let t_new = if last { horizon } else { t + h };

        let mut inc = [0.0f64; 3];
        let mut step_end = None;
        if let Some(tb) = table.as_mut() {
            let f_new = obj.value(&s.ynew[..d])?;
            let gn2_new: f64 = f.grad.iter().map(|a| a * a).sum();
            let w_new = tb.at(t_new)?;
            let (wv0, q0) = weights_now.expect("weights tracked with a certificate");
            let dt = t_new - t;
            inc = [
                0.5 * dt * (wv0 * f_now + w_new.0 * f_new),
                0.5 * dt * (wv0 + w_new.0),
                0.5 * dt * (q0 * gn2_now + w_new.1 * gn2_new),
            ];
            step_end = Some((f_new, gn2_new, w_new));
        }

        let mut dense_ready = false;
        while next_cp < checkpoints.len() && checkpoints[next_cp] <= t_new {
            let tc = checkpoints[next_cp];
            let frac = (tc - t) / h;
            if tc == t_new {
                ybuf.copy_from_slice(&s.ynew);
                gbuf.copy_from_slice(&f.grad);
            } else {
                if !dense_ready {
                    prepare_dense(&mut s, &y, h);
                    dense_ready = true;
                }
                dense(&s, frac, &mut ybuf);
                if !obj.admissible(&ybuf[..d]) {
                    // interpolant left the domain: use the nearer endpoint
                    if frac < 0.5 {
                        ybuf.copy_from_slice(&y);
                    } else {
                        ybuf.copy_from_slice(&s.ynew);
                    }
                }
                obj.grad(&ybuf[..d], &mut gbuf)?;
            }
            let fval = obj.value(&ybuf[..d])?;
            best_f = best_f.min(fval);
            let a = [acc[0] + frac * inc[0], acc[1] + frac * inc[1], acc[2] + frac * inc[2]];
            raw.push(record(tc, &ybuf, fval, &gbuf, a)?);
            next_cp += 1;
        }

        // FSAL: the last stage is the derivative at the new point
        s.rotate();
        y.copy_from_slice(&s.ynew);
        grad_now.copy_from_slice(&f.grad);
        t = t_new;
        if let Some((f_new, gn2_new, w_new)) = step_end {
            for i in 0..3 {
                acc[i] += inc[i];
            }
            f_now = f_new;
            best_f = best_f.min(f_new);
            gn2_now = gn2_new;
            weights_now = Some(w_new);
        }
        if accepted % 16 == 0 {
            curv.update(obj, &y[..d], 1);
        }
        h = hnew.min(cap(f.coefs(t), curv.l, cfg.hmax));
        if !(h > 0.0) || !h.is_finite() {
            status = Status::StepFloorHit;
            break;
        }
    }

    let (f_min, f_min_known) = match known_min {
        Some(m) => (m, true),
        None => (best_f - 1e-12 * (1.0 + best_f.abs()), false),
    };
    let has_cert = cert.is_some();
    let samples: Vec<Sample> = raw
        .into_iter()
        .map(|r| {
            let (iv, ig) = if has_cert { (r.acc[0] - f_min * r.acc[1], r.acc[2]) } else { (f64::NAN, f64::NAN) };
            let (x, v) = r.y.split_at(d);
            Sample { t: r.t, x: x.to_vec(), v: v.to_vec(), fgap: (r.f - f_min).max(0.0), grad_norm_sq: r.gn2, energy: r.energy, int_values: iv, int_grads: ig }
        })
        .collect();
    let (integral_values, integral_grads) = if has_cert { (acc[0] - f_min * acc[1], acc[2]) } else { (f64::NAN, f64::NAN) };
    Ok(Trajectory {
        samples,
        integral_values,
        integral_grads,
        status,
        steps_accepted: accepted,
        steps_rejected: rejected,
        f_min,
        f_min_known,
        z,
        t_end: t,
    })
}
