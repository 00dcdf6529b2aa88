//! Verdicts over sampled trajectories and iterate sequences.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::schedules::{Schedule, ScheduleError, ScheduleSpec};

/// Default tolerance on the log-log trend of `D·fgap`.
pub const SLOPE_TOL: f64 = 0.05;
/// Minimum number of usable samples for a fit.
pub const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("window [{lo}, {hi}] is not inside the sampled span [{start}, {end}]")]
    Window { lo: f64, hi: f64, start: f64, end: f64 },
    #[error("need at least {needed} usable samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("times and values differ in length ({0} vs {1})")]
    Length(usize, usize),
    #[error("invalid claim: {0}")]
    Claim(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneCheck {
    pub ok: bool,
    /// Index `k+1` of the first sample exceeding its predecessor's allowance.
    pub first_violation: Option<usize>,
}

/// `true` iff `v[k+1] <= v[k](1+eps_rel) + eps_abs` for every `k`.
pub fn check_monotone(values: &[f64], eps_rel: f64, eps_abs: f64) -> MonotoneCheck {
    let first_violation = values
        .windows(2)
        .position(|w| !(w[1] <= w[0] + eps_rel * w[0].abs() + eps_abs))
        .map(|k| k + 1);
    MonotoneCheck { ok: first_violation.is_none(), first_violation }
}

/// The `O(1/D)` denominator a rate theorem promises.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClaimKind {
    /// `D = t^s`
    Power { s: f64 },
    /// `D = exp(c t^q)`
    ExpPower { c: f64, q: f64 },
    Denominator { schedule: ScheduleSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClaim")]
pub struct RateClaim {
    #[serde(flatten)]
    pub kind: ClaimKind,
    /// Defaults to the last decade of the span with the first 20% of it dropped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

/// Flat wire form, so unknown keys stay hard errors.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClaim {
    kind: String,
    s: Option<f64>,
    c: Option<f64>,
    q: Option<f64>,
    schedule: Option<ScheduleSpec>,
    window: Option<[f64; 2]>,
}

impl TryFrom<RawClaim> for RateClaim {
    type Error = String;
    fn try_from(r: RawClaim) -> Result<Self, String> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("claim kind '{}' requires '{name}'", r.kind));
        let (kind, used): (ClaimKind, &[&str]) = match r.kind.as_str() {
            "power" => (ClaimKind::Power { s: need(r.s, "s")? }, &["s"]),
            "exp_power" => (ClaimKind::ExpPower { c: need(r.c, "c")?, q: need(r.q, "q")? }, &["c", "q"]),
            "denominator" => {
                let schedule = r.schedule.clone().ok_or("claim kind 'denominator' requires 'schedule'")?;
                (ClaimKind::Denominator { schedule }, &["schedule"])
            }
            other => return Err(format!("unknown claim kind '{other}' (power, exp_power, denominator)")),
        };
        let given = [("s", r.s.is_some()), ("c", r.c.is_some()), ("q", r.q.is_some()), ("schedule", r.schedule.is_some())];
        if let Some((name, _)) = given.iter().find(|(n, set)| *set && !used.contains(n)) {
            return Err(format!("claim kind '{}' does not take '{name}'", r.kind));
        }
        Ok(RateClaim { kind, window: r.window })
    }
}

impl RateClaim {
    pub fn power(s: f64) -> Self {
        RateClaim { kind: ClaimKind::Power { s }, window: None }
    }

    pub fn exp_power(c: f64, q: f64) -> Self {
        RateClaim { kind: ClaimKind::ExpPower { c, q }, window: None }
    }

    pub fn denominator(schedule: ScheduleSpec) -> Self {
        RateClaim { kind: ClaimKind::Denominator { schedule }, window: None }
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some([lo, hi]);
        self
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        match &self.kind {
            ClaimKind::Power { s } if !(s.is_finite() && *s > 0.0) => {
                Err(AnalysisError::Claim(format!("power exponent must be positive, got {s}")))
            }
            ClaimKind::ExpPower { c, q } if !(c.is_finite() && *c > 0.0 && q.is_finite() && *q > 0.0) => {
                Err(AnalysisError::Claim(format!("exp-power claim needs c > 0 and q > 0, got c={c}, q={q}")))
            }
            _ => match self.window {
                Some([lo, hi]) if !(lo < hi) => Err(AnalysisError::Claim(format!("window [{lo}, {hi}] is empty"))),
                _ => Ok(()),
            },
        }
    }
}

enum LogDenominator {
    Power(f64),
    ExpPower(f64, f64),
    Schedule(Schedule),
}

impl LogDenominator {
    fn new(kind: &ClaimKind, t0: f64) -> Result<Self, AnalysisError> {
        Ok(match kind {
            ClaimKind::Power { s } => LogDenominator::Power(*s),
            ClaimKind::ExpPower { c, q } => LogDenominator::ExpPower(*c, *q),
            ClaimKind::Denominator { schedule } => LogDenominator::Schedule(schedule.build(t0)?),
        })
    }

    fn at(&self, t: f64) -> Result<f64, AnalysisError> {
        match self {
            LogDenominator::Power(s) => Ok(s * t.ln()),
            LogDenominator::ExpPower(c, q) => Ok(c * t.powf(*q)),
            LogDenominator::Schedule(d) => {
                let v = d.jet(t)?.scaled_value();
                if v.is_sign_negative() || v.to_f64() == 0.0 {
                    return Err(AnalysisError::Claim(format!("denominator is not positive at t={t}")));
                }
                Ok(v.ln_abs())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateOutcome {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateVerdict {
    pub claim: RateClaim,
    pub window: [f64; 2],
    pub sup_product: f64,
    pub log_sup_product: f64,
    pub t_sup: f64,
    pub trend_slope: f64,
    /// Power exponent for power and schedule claims, exponential coefficient for exp-power claims.
    pub fitted_exponent: Option<f64>,
    pub verdict: RateOutcome,
    pub points: usize,
    pub excluded_points: usize,
    /// Every sample in the window sat below the numerical floor.
    pub vacuous: bool,
}

/// Smallest gap treated as a genuine value rather than rounding noise.
pub fn fgap_floor(f_min: f64) -> f64 {
    let m = if f_min.is_finite() { f_min.abs() } else { 0.0 };
    100.0 * f64::EPSILON * (1.0 + m)
}

/// Last decade of `[start, end]`, minus the first 20% of the span.
pub fn default_window(start: f64, end: f64) -> [f64; 2] {
    let lo = if end > 0.0 { end / 10.0 } else { start };
    [lo.max(start + 0.2 * (end - start)), end]
}

struct Windowed {
    t: Vec<f64>,
    gap: Vec<f64>,
    excluded: usize,
    window: [f64; 2],
}

fn select(times: &[f64], fgaps: &[f64], f_min: f64, window: Option<[f64; 2]>) -> Result<Windowed, AnalysisError> {
    if times.len() != fgaps.len() {
        return Err(AnalysisError::Length(times.len(), fgaps.len()));
    }
    let (Some(&start), Some(&end)) = (times.first(), times.last()) else {
        return Err(AnalysisError::InsufficientData { needed: 1, got: 0 });
    };
    let [lo, hi] = window.unwrap_or_else(|| default_window(start, end));
    let slack = 1e-9 * (1.0 + end.abs());
    if !(lo < hi) || lo < start - slack || hi > end + slack {
        return Err(AnalysisError::Window { lo, hi, start, end });
    }
    let floor = fgap_floor(f_min);
    let mut out = Windowed { t: Vec::new(), gap: Vec::new(), excluded: 0, window: [lo, hi] };
    for (&t, &g) in times.iter().zip(fgaps) {
        if t < lo - slack || t > hi + slack {
            continue;
        }
        if g > floor && g.is_finite() {
            out.t.push(t);
            out.gap.push(g);
        } else {
            out.excluded += 1;
        }
    }
    Ok(out)
}

/// Least-squares line `y = a + b x`; returns `(b, a, rms residual)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - intercept - slope * xi).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Checks `fgap = O(1/D)` on raw `(t, fgap)` samples.
pub fn bound_check_series(times: &[f64], fgaps: &[f64], f_min: f64, claim: &RateClaim) -> Result<RateVerdict, AnalysisError> {
    claim.validate()?;
    let w = select(times, fgaps, f_min, claim.window)?;
    let [lo, hi] = w.window;
    let mut verdict = RateVerdict {
        claim: claim.clone(),
        window: w.window,
        sup_product: 0.0,
        log_sup_product: f64::NEG_INFINITY,
        t_sup: lo,
        trend_slope: 0.0,
        fitted_exponent: None,
        verdict: RateOutcome::Bounded,
        points: w.t.len(),
        excluded_points: w.excluded,
        vacuous: w.t.is_empty(),
    };
    if w.t.is_empty() {
        return Ok(verdict);
    }

    let d = LogDenominator::new(&claim.kind, times[0])?;
    let log_t: Vec<f64> = w.t.iter().map(|t| t.ln()).collect();
    let mut log_prod = Vec::with_capacity(w.t.len());
    for (&t, &g) in w.t.iter().zip(&w.gap) {
        log_prod.push(d.at(t)? + g.ln());
    }
    let (imax, &lmax) = log_prod
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    verdict.log_sup_product = lmax;
    verdict.sup_product = lmax.exp();
    verdict.t_sup = w.t[imax];

    if w.t.len() < 3 {
        verdict.verdict = RateOutcome::Inconclusive;
        return Ok(verdict);
    }
    let (slope, _, _) = least_squares(&log_t, &log_prod);
    verdict.trend_slope = slope;
    verdict.fitted_exponent = Some(match &claim.kind {
        ClaimKind::ExpPower { q, .. } => {
            let tq: Vec<f64> = w.t.iter().map(|t| t.powf(*q)).collect();
            let neg: Vec<f64> = w.gap.iter().map(|g| -g.ln()).collect();
            least_squares(&tq, &neg).0
        }
        _ => -least_squares(&log_t, &w.gap.iter().map(|g| g.ln()).collect::<Vec<_>>()).0,
    });

    let mid = 0.5 * (lo + hi);
    let early_max = w
        .t
        .iter()
        .zip(&log_prod)
        .filter(|(t, _)| **t <= mid)
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let sup_early = verdict.t_sup <= mid;
    let flat_tail = lmax - early_max <= SLOPE_TOL * (hi / lo).ln();
    verdict.verdict = if slope > SLOPE_TOL {
        RateOutcome::Growing
    } else if sup_early || flat_tail {
        RateOutcome::Bounded
    } else {
        RateOutcome::Inconclusive
    };
    Ok(verdict)
}

pub fn bound_check(traj: &Trajectory, claim: &RateClaim) -> Result<RateVerdict, AnalysisError> {
    bound_check_series(&traj.times(), &traj.fgaps(), traj.f_min, claim)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub value: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
    pub excluded_points: usize,
}

fn fit_with(
    times: &[f64],
    fgaps: &[f64],
    f_min: f64,
    window: Option<[f64; 2]>,
    abscissa: impl Fn(f64) -> f64,
) -> Result<RateFit, AnalysisError> {
    let w = select(times, fgaps, f_min, window)?;
    if w.t.len() < MIN_FIT_POINTS {
        return Err(AnalysisError::InsufficientData { needed: MIN_FIT_POINTS, got: w.t.len() });
    }
    let x: Vec<f64> = w.t.iter().map(|&t| abscissa(t)).collect();
    let y: Vec<f64> = w.gap.iter().map(|g| -g.ln()).collect();
    let (slope, intercept, residual) = least_squares(&x, &y);
    Ok(RateFit { value: slope, intercept, residual, points: w.t.len(), excluded_points: w.excluded })
}

/// Fitted `s` in `fgap ~ C t^{-s}`.
pub fn fit_power_rate_series(times: &[f64], fgaps: &[f64], f_min: f64, window: Option<[f64; 2]>) -> Result<RateFit, AnalysisError> {
    fit_with(times, fgaps, f_min, window, f64::ln)
}

/// Fitted `c` in `fgap ~ C exp(-c t^q)`.
pub fn fit_exp_rate_series(
    times: &[f64],
    fgaps: &[f64],
    f_min: f64,
    q: f64,
    window: Option<[f64; 2]>,
) -> Result<RateFit, AnalysisError> {
    if !(q.is_finite() && q > 0.0) {
        return Err(AnalysisError::Claim(format!("exponent q must be positive, got {q}")));
    }
    fit_with(times, fgaps, f_min, window, |t| t.powf(q))
}

pub fn fit_power_rate(traj: &Trajectory, window: Option<[f64; 2]>) -> Result<RateFit, AnalysisError> {
    fit_power_rate_series(&traj.times(), &traj.fgaps(), traj.f_min, window)
}

pub fn fit_exp_rate(traj: &Trajectory, q: f64, window: Option<[f64; 2]>) -> Result<RateFit, AnalysisError> {
    fit_exp_rate_series(&traj.times(), &traj.fgaps(), traj.f_min, q, window)
}

/// Sign changes of the first difference; zero steps are skipped.
pub fn oscillation_count_series(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 || d.is_nan() {
            continue;
        }
        if last != 0.0 && (d > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = d;
    }
    count
}

pub fn oscillation_count(traj: &Trajectory) -> usize {
    oscillation_count_series(&traj.fgaps())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (a.ln() + (b / a).ln() * i as f64 / (n - 1) as f64).exp()).collect()
    }

    #[test]
    fn monotone_examples() {
        assert!(check_monotone(&[3.0; 5], 0.0, 0.0).ok);
        let r = check_monotone(&[1.0, 2.0, 1.5], 0.0, 0.0);
        assert_eq!(r, MonotoneCheck { ok: false, first_violation: Some(1) });
        assert!(check_monotone(&[1.0, 1.0 + 1e-10], 1e-9, 0.0).ok);
        assert!(check_monotone(&[0.0, 1e-13], 0.0, 1e-12).ok);
    }

    #[test]
    fn bound_check_synthetic() {
        let t = logspace(1.0, 500.0, 1000);
        let g2: Vec<f64> = t.iter().map(|t| t.powi(-2)).collect();
        let v = bound_check_series(&t, &g2, 0.0, &RateClaim::power(2.0)).unwrap();
        assert_relative_eq!(v.sup_product, 1.0, max_relative = 1e-12);
        assert!(v.trend_slope.abs() < 1e-12);
        assert_eq!(v.verdict, RateOutcome::Bounded);
        assert_relative_eq!(v.fitted_exponent.unwrap(), 2.0, max_relative = 1e-12);

        let g1: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        let v = bound_check_series(&t, &g1, 0.0, &RateClaim::power(2.0)).unwrap();
        assert_relative_eq!(v.trend_slope, 1.0, max_relative = 1e-12);
        assert_eq!(v.verdict, RateOutcome::Growing);
    }

    #[test]
    fn bound_check_exp_and_schedule_claims() {
        let t: Vec<f64> = (0..=2400).map(|i| 1.0 + i as f64 * 0.01).collect();
        let g: Vec<f64> = t.iter().map(|t| 3.0 * (-t).exp()).collect();
        let v = bound_check_series(&t, &g, 0.0, &RateClaim::exp_power(1.0, 1.0)).unwrap();
        assert_eq!(v.verdict, RateOutcome::Bounded);
        assert_relative_eq!(v.sup_product, 3.0, max_relative = 1e-10);
        assert_relative_eq!(v.fitted_exponent.unwrap(), 1.0, max_relative = 1e-9);

        let half = bound_check_series(&t, &g, 0.0, &RateClaim::exp_power(1.1, 1.0)).unwrap();
        assert_eq!(half.verdict, RateOutcome::Growing);

        let d = RateClaim::denominator(ScheduleSpec::exp_power(1.0, 1.0, 1.0));
        let v2 = bound_check_series(&t, &g, 0.0, &d).unwrap();
        assert_eq!(v2.verdict, RateOutcome::Bounded);
        assert_relative_eq!(v2.sup_product, 3.0, max_relative = 1e-10);
    }

    #[test]
    fn claim_wire_format() {
        let c: RateClaim = serde_json::from_str(r#"{"kind":"power","s":2,"window":[50,500]}"#).unwrap();
        assert_eq!(c, RateClaim::power(2.0).with_window(50.0, 500.0));
        let back: RateClaim = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let e: RateClaim = serde_json::from_str(r#"{"kind":"exp_power","c":1,"q":0.5}"#).unwrap();
        assert_eq!(e, RateClaim::exp_power(1.0, 0.5));
        for bad in [
            r#"{"kind":"power","s":2,"windw":[1,2]}"#,
            r#"{"kind":"power"}"#,
            r#"{"kind":"power","s":2,"c":1}"#,
            r#"{"kind":"cubic","s":2}"#,
        ] {
            assert!(serde_json::from_str::<RateClaim>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn default_window_is_last_decade_after_transient() {
        assert_relative_eq!(default_window(1.0, 500.0)[0], 100.8, max_relative = 1e-15);
        let [lo, hi] = default_window(1.0, 25.0);
        assert_relative_eq!(lo, 5.8, max_relative = 1e-15);
        assert_eq!(hi, 25.0);
    }

    #[test]
    fn floor_and_vacuous_verdicts() {
        let t = logspace(1.0, 100.0, 200);
        let zeros = vec![0.0; t.len()];
        let v = bound_check_series(&t, &zeros, 0.0, &RateClaim::power(2.0)).unwrap();
        assert!(v.vacuous);
        assert_eq!(v.verdict, RateOutcome::Bounded);
        assert!(v.excluded_points > 0);
        let e = fit_power_rate_series(&t, &zeros, 0.0, None).unwrap_err();
        assert!(matches!(e, AnalysisError::InsufficientData { .. }));
    }

    #[test]
    fn window_errors() {
        let t = logspace(1.0, 100.0, 50);
        let g: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
        let c = RateClaim::power(1.0).with_window(0.5, 10.0);
        assert!(matches!(bound_check_series(&t, &g, 0.0, &c), Err(AnalysisError::Window { .. })));
        let c = RateClaim::power(1.0).with_window(10.0, 5.0);
        assert!(bound_check_series(&t, &g, 0.0, &c).is_err());
    }

    #[test]
    fn fit_examples() {
        let t = logspace(1.0, 1000.0, 600);
        let g: Vec<f64> = t.iter().map(|t| t.powf(-5.0 / 3.0)).collect();
        assert_relative_eq!(fit_power_rate_series(&t, &g, 0.0, None).unwrap().value, 5.0 / 3.0, epsilon = 1e-6);
        let g: Vec<f64> = t.iter().map(|t| 3.0 * t.powi(-2)).collect();
        let f = fit_power_rate_series(&t, &g, 0.0, None).unwrap();
        assert_relative_eq!(f.value, 2.0, epsilon = 1e-6);
        assert_relative_eq!(f.intercept, -(3.0f64.ln()), epsilon = 1e-9);

        let t: Vec<f64> = (0..=400).map(|i| 1.0 + i as f64 * 0.05).collect();
        let g: Vec<f64> = t.iter().map(|t| (-t).exp()).collect();
        assert_relative_eq!(fit_exp_rate_series(&t, &g, 0.0, 1.0, None).unwrap().value, 1.0, epsilon = 1e-6);
        let g: Vec<f64> = t.iter().map(|t| (-2.0 * t.sqrt()).exp()).collect();
        assert_relative_eq!(fit_exp_rate_series(&t, &g, 0.0, 0.5, None).unwrap().value, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn oscillation_examples() {
        let dec: Vec<f64> = (0..50).map(|i| 1.0 / (1.0 + i as f64)).collect();
        assert_eq!(oscillation_count_series(&dec), 0);
        let n = 4000;
        let c: Vec<f64> = (0..=n).map(|i| (4.0 * std::f64::consts::PI * i as f64 / n as f64).cos()).collect();
        assert_eq!(oscillation_count_series(&c), 3);
        assert_eq!(oscillation_count_series(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(oscillation_count_series(&[1.0, 2.0, 2.0, 1.0]), 1);
    }

    proptest! {
        #[test]
        fn power_fit_is_scale_invariant(s in 0.1f64..4.0, scale in -20.0f64..20.0) {
            let t = logspace(1.0, 500.0, 300);
            let g: Vec<f64> = t.iter().map(|t| scale.exp() * t.powf(-s)).collect();
            let f = fit_power_rate_series(&t, &g, 0.0, Some([10.0, 500.0])).unwrap();
            prop_assert!((f.value - s).abs() <= 1e-6);
        }

        #[test]
        fn bound_verdict_is_scale_invariant(s in 0.5f64..3.0, claim in 0.5f64..3.0, scale in -10.0f64..10.0, wobble in 0.0f64..0.5) {
            let t = logspace(1.0, 500.0, 400);
            let base: Vec<f64> = t.iter().map(|t| t.powf(-s) * (1.0 + wobble * (3.0 * t).sin())).collect();
            let scaled: Vec<f64> = base.iter().map(|g| g * scale.exp()).collect();
            let c = RateClaim::power(claim);
            let a = bound_check_series(&t, &base, 0.0, &c).unwrap();
            let b = bound_check_series(&t, &scaled, 0.0, &c).unwrap();
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert!((a.trend_slope - b.trend_slope).abs() <= 1e-9);
            prop_assert!((a.log_sup_product + scale - b.log_sup_product).abs() <= 1e-9);
        }

        #[test]
        fn exact_monotone_check(v in proptest::collection::vec(-1e3f64..1e3, 2..40)) {
            let literal = v.windows(2).all(|w| w[1] <= w[0]);
            prop_assert_eq!(check_monotone(&v, 0.0, 0.0).ok, literal);
        }
    }
}
