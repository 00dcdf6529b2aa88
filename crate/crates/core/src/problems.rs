//! Objective oracles: value, gradient, Hessian-vector product, prox.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue})")]
    NotPSD { eigenvalue: f64 },
    #[error("point outside the domain of {0}")]
    Domain(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0} has no Hessian-vector oracle")]
    MissingOracle(&'static str),
    #[error("{0} has no prox oracle")]
    MissingProx(&'static str),
    #[error("unknown problem preset '{0}'")]
    UnknownPreset(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
}

/// A smooth convex objective on `ℝᵈ`.
pub trait Objective: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn name(&self) -> &'static str;
    fn value(&self, x: &[f64]) -> Result<f64, ProblemError>;
    fn grad(&self, x: &[f64], out: &mut [f64]) -> Result<(), ProblemError>;

    /// `∇²f(x)v`.
    fn hvp(&self, _x: &[f64], _v: &[f64], _out: &mut [f64]) -> Result<(), ProblemError> {
        Err(ProblemError::MissingOracle(self.name()))
    }

    fn has_hvp(&self) -> bool {
        false
    }

    /// `argmin_u f(u) + ‖u − y‖²/(2λ)`.
    fn prox(&self, _y: &[f64], _lambda: f64, _out: &mut [f64]) -> Result<(), ProblemError> {
        Err(ProblemError::MissingProx(self.name()))
    }

    fn has_prox(&self) -> bool {
        false
    }

    fn admissible(&self, _x: &[f64]) -> bool {
        true
    }

    fn known_min(&self) -> Option<f64> {
        None
    }

    fn known_argmin(&self) -> Option<Vec<f64>> {
        None
    }

    /// Nearest minimizer to `x`, when the argmin set has a projection formula.
    fn project_argmin(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn grad_vec(&self, x: &[f64]) -> Result<Vec<f64>, ProblemError> {
        let mut g = vec![0.0; self.dim()];
        self.grad(x, &mut g)?;
        Ok(g)
    }
}

/// Exact `hvp` when available, otherwise central differences of the gradient.
pub fn hvp_any(obj: &dyn Objective, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), ProblemError> {
    if obj.has_hvp() {
        obj.hvp(x, v, out)
    } else {
        hvp_fd(obj, x, v, None, out)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `(∇f(x+hv) − ∇f(x−hv)) / 2h`, default `h = √ε(1+‖x‖)/max(‖v‖, ε)`.
pub fn hvp_fd(obj: &dyn Objective, x: &[f64], v: &[f64], h: Option<f64>, out: &mut [f64]) -> Result<(), ProblemError> {
    let nv = norm(v);
    if nv == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return Ok(());
    }
    let h = h.unwrap_or_else(|| f64::EPSILON.sqrt() * (1.0 + norm(x)) / nv.max(f64::EPSILON));
    let xp: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let xm: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - h * b).collect();
    if !obj.admissible(&xp) || !obj.admissible(&xm) {
        return Err(ProblemError::Domain(obj.name()));
    }
    let mut gm = vec![0.0; x.len()];
    obj.grad(&xp, out)?;
    obj.grad(&xm, &mut gm)?;
    for (o, m) in out.iter_mut().zip(&gm) {
        *o = (*o - m) / (2.0 * h);
    }
    Ok(())
}

fn check_dim(expected: usize, got: usize) -> Result<(), ProblemError> {
    if expected == got {
        Ok(())
    } else {
        Err(ProblemError::Dimension { expected, got })
    }
}

/// `f(x) = ½⟨Ax, x⟩ − ⟨ℓ, x⟩` with `A` symmetric PSD.
#[derive(Clone, Debug)]
pub struct Quadratic {
    n: usize,
    a: Vec<f64>,
    l: Vec<f64>,
    matrix: DMatrix<f64>,
    min: Option<(f64, Vec<f64>)>,
    /// Orthonormal basis of `ker A`, as columns.
    kernel: DMatrix<f64>,
    diagonal: Option<Vec<f64>>,
    has_linear: bool,
}

impl Quadratic {
    /// Rejects non-symmetric matrices and eigenvalues below `−1e-12·‖A‖`.
    pub fn new(a: DMatrix<f64>, l: DVector<f64>) -> Result<Self, ProblemError> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(ProblemError::Invalid(format!("matrix must be square and nonempty, got {}×{}", a.nrows(), a.ncols())));
        }
        check_dim(n, l.len())?;
        if a.iter().chain(l.iter()).any(|x| !x.is_finite()) {
            return Err(ProblemError::Invalid("non-finite entry".into()));
        }
        let scale = a.amax().max(f64::MIN_POSITIVE);
        if (&a - a.transpose()).amax() > 1e-12 * scale {
            return Err(ProblemError::Invalid("matrix is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(a.clone());
        let tol = 1e-12 * scale * n as f64;
        if let Some(&lo) = eig.eigenvalues.iter().find(|e| **e < -tol) {
            return Err(ProblemError::NotPSD { eigenvalue: lo });
        }
        let ker: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() <= tol).collect();
        let kernel = DMatrix::from_fn(n, ker.len(), |r, c| eig.eigenvectors[(r, ker[c])]);
        // pseudo-inverse solution; a minimizer exists iff ℓ ⊥ ker A
        let mut xs = DVector::zeros(n);
        for i in 0..n {
            let lam = eig.eigenvalues[i];
            if lam.abs() > tol {
                let u = eig.eigenvectors.column(i);
                xs += u * (u.dot(&l) / lam);
            }
        }
        let residual = &l - &a * &xs;
        let min = (residual.amax() <= 1e-10 * (1.0 + l.amax())).then(|| (-0.5 * l.dot(&xs), xs.iter().copied().collect()));
        let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)] == 0.0));
        let diagonal = is_diag.then(|| a.diagonal().iter().copied().collect());
        Ok(Quadratic { n, a: a.iter().copied().collect::<Vec<_>>(), l: l.iter().copied().collect(), matrix: a, min, kernel, diagonal, has_linear: l.iter().any(|v| *v != 0.0) })
    }

    pub fn diag(d: &[f64]) -> Result<Self, ProblemError> {
        Quadratic::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)), DVector::zeros(d.len()))
    }

    /// `½⟨a, x⟩²`.
    pub fn rank_one(a: &[f64]) -> Result<Self, ProblemError> {
        let v = DVector::from_column_slice(a);
        Quadratic::new(&v * v.transpose(), DVector::zeros(a.len()))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn linear(&self) -> &[f64] {
        &self.l
    }

    #[inline]
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        if let Some(d) = &self.diagonal {
            for ((o, a), b) in out.iter_mut().zip(d).zip(x) {
                *o = a * b;
            }
            return;
        }
        // column-major storage; A is symmetric so columns are rows
        for (i, o) in out.iter_mut().enumerate() {
            let col = &self.a[i * self.n..(i + 1) * self.n];
            *o = col.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.n
    }

    fn name(&self) -> &'static str {
        "quadratic"
    }

    fn value(&self, x: &[f64]) -> Result<f64, ProblemError> {
        check_dim(self.n, x.len())?;
        let n = self.n;
        let quad: f64 = match &self.diagonal {
            Some(d) => d.iter().zip(x).map(|(a, xi)| a * xi * xi).sum(),
            None => (0..n).map(|i| x[i] * self.a[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()).sum(),
        };
        let lin: f64 = if self.has_linear { self.l.iter().zip(x).map(|(l, xi)| l * xi).sum() } else { 0.0 };
        Ok(0.5 * quad - lin)
    }

    fn grad(&self, x: &[f64], out: &mut [f64]) -> Result<(), ProblemError> {
        check_dim(self.n, x.len())?;
        self.apply(x, out);
        if self.has_linear {
            for (o, l) in out.iter_mut().zip(&self.l) {
                *o -= l;
            }
        }
        Ok(())
    }

    fn hvp(&self, _x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), ProblemError> {
        check_dim(self.n, v.len())?;
        self.apply(v, out);
        Ok(())
    }

    fn has_hvp(&self) -> bool {
        true
    }

    fn prox(&self, y: &[f64], lambda: f64, out: &mut [f64]) -> Result<(), ProblemError> {
        check_dim(self.n, y.len())?;
        check_dim(self.n, out.len())?;
        if let Some(d) = &self.diagonal {
            for i in 0..self.n {
                out[i] = (y[i] + lambda * self.l[i]) / (1.0 + lambda * d[i]);
            }
            return Ok(());
        }
        let m = DMatrix::identity(self.n, self.n) + &self.matrix * lambda;
        let rhs = DVector::from_iterator(self.n, y.iter().zip(&self.l).map(|(a, b)| a + lambda * b));
        let sol = m.cholesky().ok_or_else(|| ProblemError::Invalid("I + λA is not positive definite".into()))?.solve(&rhs);
        out.copy_from_slice(sol.as_slice());
        Ok(())
    }

    fn has_prox(&self) -> bool {
        true
    }

    fn known_min(&self) -> Option<f64> {
        self.min.as_ref().map(|m| m.0)
    }

    fn known_argmin(&self) -> Option<Vec<f64>> {
        self.min.as_ref().map(|m| m.1.clone())
    }

    fn project_argmin(&self, x: &[f64]) -> Option<Vec<f64>> {
        let (_, xs) = self.min.as_ref()?;
        let xs = DVector::from_column_slice(xs);
        let d = DVector::from_column_slice(x) - &xs;
        let k = &self.kernel;
        let p = xs + k * (k.transpose() * d);
        Some(p.iter().copied().collect())
    }
}

/// `f(x₁, x₂) = ½(x₁² + x₂²) − ln(x₁x₂)` on the open positive quadrant.
#[derive(Clone, Copy, Debug, Default)]
pub struct LogBarrier;

impl LogBarrier {
    fn guard(&self, x: &[f64]) -> Result<(), ProblemError> {
        check_dim(2, x.len())?;
        if self.admissible(x) {
            Ok(())
        } else {
            Err(ProblemError::Domain("log-barrier"))
        }
    }
}

impl Objective for LogBarrier {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &'static str {
        "log-barrier"
    }

    fn value(&self, x: &[f64]) -> Result<f64, ProblemError> {
        self.guard(x)?;
        Ok(0.5 * (x[0] * x[0] + x[1] * x[1]) - x[0].ln() - x[1].ln())
    }

    fn grad(&self, x: &[f64], out: &mut [f64]) -> Result<(), ProblemError> {
        self.guard(x)?;
        out[0] = x[0] - 1.0 / x[0];
        out[1] = x[1] - 1.0 / x[1];
        Ok(())
    }

    fn hvp(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<(), ProblemError> {
        self.guard(x)?;
        out[0] = (1.0 + 1.0 / (x[0] * x[0])) * v[0];
        out[1] = (1.0 + 1.0 / (x[1] * x[1])) * v[1];
        Ok(())
    }

    fn has_hvp(&self) -> bool {
        true
    }

    fn prox(&self, y: &[f64], lambda: f64, out: &mut [f64]) -> Result<(), ProblemError> {
        check_dim(2, y.len())?;
        // positive root of (λ+1)u² − yu − λ = 0
        for (o, &yi) in out.iter_mut().zip(y) {
            *o = (yi + (yi * yi + 4.0 * lambda * (lambda + 1.0)).sqrt()) / (2.0 * (lambda + 1.0));
        }
        Ok(())
    }

    fn has_prox(&self) -> bool {
        true
    }

    fn admissible(&self, x: &[f64]) -> bool {
        x.len() == 2 && x[0] > 0.0 && x[1] > 0.0
    }

    fn known_min(&self) -> Option<f64> {
        Some(1.0)
    }

    fn known_argmin(&self) -> Option<Vec<f64>> {
        Some(vec![1.0, 1.0])
    }

    fn project_argmin(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![1.0, 1.0])
    }
}

pub fn make_quadratic(a: DMatrix<f64>, l: DVector<f64>) -> Result<Quadratic, ProblemError> {
    Quadratic::new(a, l)
}

pub fn make_log_barrier_strongly_convex() -> LogBarrier {
    LogBarrier
}

/// Preset objectives: `quad-diag` (alias `fig2-caption`), `quad-rank1`
/// (alias `fig2-eq`), `log-barrier`.
pub fn preset(name: &str) -> Result<Arc<dyn Objective>, ProblemError> {
    Ok(match name {
        "quad-diag" | "fig2-caption" => Arc::new(Quadratic::diag(&[1.0, 1e3])?),
        "quad-rank1" | "fig2-eq" => Arc::new(Quadratic::rank_one(&[1.0, 1e3])?),
        "log-barrier" => Arc::new(LogBarrier),
        other => return Err(ProblemError::UnknownPreset(other.to_string())),
    })
}

/// Preset names accepted by [`preset`].
pub const PRESETS: [&str; 5] = ["quad-diag", "quad-rank1", "log-barrier", "fig2-caption", "fig2-eq"];
