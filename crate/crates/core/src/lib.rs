//! Numerical lab for damped inertial gradient dynamics
//! `ẍ + γ(t)ẋ + β(t)∇²f(x)ẋ + b(t)∇f(x) = 0`.
pub mod algorithms;
pub mod analysis;
pub mod certificates;
pub mod dynamics;
pub mod io;
pub mod jet;
pub mod problems;
pub mod quadrature;
pub mod schedules;

pub use algorithms::{inertial_proximal, prox_step, AlgorithmError, AlphaRule, IPConfig, IterateSequence, LambdaRule};
pub use analysis::{
    bound_check, bound_check_series, check_monotone, fit_exp_rate, fit_power_rate, oscillation_count, AnalysisError,
    ClaimKind, RateClaim, RateOutcome, RateVerdict,
};
pub use certificates::{
    check_conditions, check_conditions_on, derive_gamma_certificate, derive_model_certificate, derive_p_certificate,
    CertPoint, Certificate, CertificateError, ConditionReport, ConditionSet, ExtraParams, GridSpec, Recipe, Spacing,
    Verdict,
};
pub use dynamics::{integrate, DynamicsError, DynamicsSpec, IntegratorConfig, Sample, Status, Trajectory};
pub use jet::{Jet, Scaled};
pub use problems::{hvp_fd, LogBarrier, Objective, ProblemError, Quadratic};
pub use schedules::{Family, H0Verdict, IntegralProfile, Schedule, ScheduleError, ScheduleSpec};
