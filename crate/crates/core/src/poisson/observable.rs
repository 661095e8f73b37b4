use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use super::point::{central_gradient, default_fd_step};
use super::structure::PoissonStructure;
use crate::error::{Error, Result};

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> DVector<f64> + Send + Sync;

/// A smooth scalar function on phase space.
///
/// The gradient is analytic when one was supplied; otherwise it is taken by
/// central differences with step `1e-6 * max(1, |z|)` unless overridden.
#[derive(Clone)]
pub struct Observable {
    name: String,
    eval: Arc<ScalarFn>,
    grad: Option<Arc<GradFn>>,
    fd_step: Option<f64>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("analytic_gradient", &self.grad.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl Observable {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            grad: None,
            fd_step: None,
        }
    }

    pub fn with_gradient<G>(mut self, grad: G) -> Self
    where
        G: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = Some(h);
        self
    }

    /// Drops an analytic gradient, forcing finite differences.
    pub fn without_gradient(mut self) -> Self {
        self.grad = None;
        self
    }

    /// The coordinate function `z_index`.
    pub fn coordinate(index: usize) -> Self {
        Self::new(format!("z{index}"), move |z| z[index]).with_gradient(move |z| {
            let mut g = DVector::zeros(z.len());
            g[index] = 1.0;
            g
        })
    }

    pub fn constant(value: f64) -> Self {
        Self::new(format!("{value}"), move |_| value).with_gradient(|z| DVector::zeros(z.len()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        (self.eval)(z)
    }

    pub fn gradient(&self, z: &[f64]) -> Result<DVector<f64>> {
        let g = match &self.grad {
            Some(g) => {
                let g = g(z);
                if g.len() != z.len() {
                    return Err(Error::DimensionMismatch {
                        expected: z.len(),
                        found: g.len(),
                    });
                }
                g
            }
            None => {
                let h = self.fd_step.unwrap_or_else(|| default_fd_step(z));
                self.fd_gradient(z, h)?
            }
        };
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::non_finite(format!("gradient of {}", self.name)));
        }
        Ok(g)
    }

    /// Central-difference gradient with an explicit step, ignoring any
    /// analytic gradient.
    pub fn fd_gradient(&self, z: &[f64], h: f64) -> Result<DVector<f64>> {
        central_gradient(|w| (self.eval)(w), z, h)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::linear_combination(alpha, self, 0.0, &Self::constant(0.0))
    }

    /// `alpha * a + beta * b`, gradient analytic iff both inputs are.
    pub fn linear_combination(alpha: f64, a: &Self, beta: f64, b: &Self) -> Self {
        let (ea, eb) = (a.eval.clone(), b.eval.clone());
        let mut out = Self::new(format!("{alpha}*{}+{beta}*{}", a.name, b.name), move |z| {
            alpha * ea(z) + beta * eb(z)
        });
        if let (Some(ga), Some(gb)) = (a.grad.clone(), b.grad.clone()) {
            out = out.with_gradient(move |z| ga(z) * alpha + gb(z) * beta);
        }
        out
    }

    /// Pointwise product, with the product-rule gradient when available.
    pub fn product(a: &Self, b: &Self) -> Self {
        let (ea, eb) = (a.eval.clone(), b.eval.clone());
        let mut out = Self::new(format!("({})*({})", a.name, b.name), move |z| ea(z) * eb(z));
        if let (Some(ga), Some(gb)) = (a.grad.clone(), b.grad.clone()) {
            let (ea, eb) = (a.eval.clone(), b.eval.clone());
            out = out.with_gradient(move |z| gb(z) * ea(z) + ga(z) * eb(z));
        }
        out
    }

    /// The observable `z -> [a, b](z)` on the given structure. Its gradient is
    /// always taken by finite differences. Evaluation errors become NaN.
    pub fn bracket_of(structure: &PoissonStructure, a: &Self, b: &Self) -> Self {
        let (s, a2, b2) = (structure.clone(), a.clone(), b.clone());
        Self::new(format!("[{},{}]", a.name, b.name), move |z| {
            super::bracket_eval_slice(&s, &a2, &b2, z).unwrap_or(f64::NAN)
        })
    }
}
