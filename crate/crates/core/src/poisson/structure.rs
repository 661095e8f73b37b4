use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::point::{default_fd_step, stepped};
use crate::error::{Error, Result};

type TensorFn = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync;
type TensorDerivFn = dyn Fn(&[f64]) -> Result<Vec<DMatrix<f64>>> + Send + Sync;

/// How derivatives of the tensor field are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobianMode {
    Analytic,
    /// Central differences; `None` means the default `1e-6 * max(1, |z|)`.
    FiniteDifference { step: Option<f64> },
}

/// The matrix of fundamental brackets `sigma_ab(z) = [z_a, z_b]`.
///
/// Degenerate (odd-dimensional or rank-deficient) tensors are ordinary
/// values here; only [`super::invert_structure`] refuses them.
#[derive(Clone)]
pub struct PoissonStructure {
    name: String,
    dim: usize,
    eval: Arc<TensorFn>,
    derivative: Option<Arc<TensorDerivFn>>,
    is_constant: bool,
    fd_step: Option<f64>,
}

impl fmt::Debug for PoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonStructure")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("is_constant", &self.is_constant)
            .field("jacobian_mode", &self.jacobian_mode())
            .finish()
    }
}

impl PoissonStructure {
    /// Canonical tensor for `n_dof` degrees of freedom in the ordering
    /// `(q_1..q_n, p_1..p_n)`: `[[0, 1], [-1, 0]]` in `n x n` blocks.
    pub fn canonical(n_dof: usize) -> Self {
        let n = 2 * n_dof;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n_dof {
            m[(i, n_dof + i)] = 1.0;
            m[(n_dof + i, i)] = -1.0;
        }
        Self::constant(format!("canonical({n_dof})"), m)
    }

    /// Canonical tensor in the interleaved ordering `(q_1, p_1, q_2, p_2, ..)`,
    /// block diagonal in `[[0, 1], [-1, 0]]`.
    pub fn canonical_interleaved(n_dof: usize) -> Self {
        let n = 2 * n_dof;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n_dof {
            m[(2 * i, 2 * i + 1)] = 1.0;
            m[(2 * i + 1, 2 * i)] = -1.0;
        }
        Self::constant(format!("canonical_interleaved({n_dof})"), m)
    }

    /// A position-independent tensor. Panics if `matrix` is not square or empty.
    pub fn constant(name: impl Into<String>, matrix: DMatrix<f64>) -> Self {
        assert!(matrix.is_square() && matrix.nrows() > 0, "structure matrix must be square");
        let dim = matrix.nrows();
        let zeros = vec![DMatrix::zeros(dim, dim); dim];
        Self {
            name: name.into(),
            dim,
            eval: Arc::new(move |_| Ok(matrix.clone())),
            derivative: Some(Arc::new(move |_| Ok(zeros.clone()))),
            is_constant: true,
            fd_step: None,
        }
    }

    pub fn from_fn<F>(name: impl Into<String>, dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self::try_from_fn(name, dim, move |z| Ok(f(z)))
    }

    pub fn try_from_fn<F>(name: impl Into<String>, dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    {
        assert!(dim > 0, "structure dimension must be positive");
        Self {
            name: name.into(),
            dim,
            eval: Arc::new(f),
            derivative: None,
            is_constant: false,
            fd_step: None,
        }
    }

    /// Supplies the analytic derivative: element `a` of the returned vector
    /// is the matrix `d sigma / d z_a`.
    pub fn with_derivative<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(move |z| Ok(f(z))));
        self
    }

    /// Forces finite-difference derivatives with the given step.
    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = Some(h);
        if !self.is_constant {
            self.derivative = None;
        }
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_constant(&self) -> bool {
        self.is_constant
    }

    pub fn jacobian_mode(&self) -> JacobianMode {
        if self.derivative.is_some() {
            JacobianMode::Analytic
        } else {
            JacobianMode::FiniteDifference { step: self.fd_step }
        }
    }

    pub(crate) fn check_dim(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        Ok(())
    }

    /// `sigma(z)`.
    pub fn eval(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(z)?;
        let m = (self.eval)(z)?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows().max(m.ncols()),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::non_finite(format!("structure {}", self.name)));
        }
        Ok(m)
    }

    /// `d sigma / d z_a` for every `a`, analytic or by central differences.
    pub fn derivative(&self, z: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.check_dim(z)?;
        if let Some(d) = &self.derivative {
            return d(z);
        }
        let h = self.fd_step.unwrap_or_else(|| default_fd_step(z));
        let mut work = z.to_vec();
        let mut out = Vec::with_capacity(self.dim);
        for a in 0..self.dim {
            let (plus, minus) = stepped(z[a], h, a)?;
            work[a] = plus;
            let sp = self.eval(&work)?;
            work[a] = minus;
            let sm = self.eval(&work)?;
            work[a] = z[a];
            out.push((sp - sm) / (plus - minus));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_layouts_agree_for_one_degree_of_freedom() {
        let a = PoissonStructure::canonical(1).eval(&[0.0, 0.0]).unwrap();
        let b = PoissonStructure::canonical_interleaved(1).eval(&[0.0, 0.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn eval_checks_dimension() {
        let s = PoissonStructure::canonical(2);
        assert!(matches!(
            s.eval(&[0.0; 3]),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn finite_difference_derivative_of_linear_tensor() {
        let s = PoissonStructure::from_fn("lin", 3, |z| {
            DMatrix::from_row_slice(3, 3, &[0.0, z[2], 0.0, -z[2], 0.0, 0.0, 0.0, 0.0, 0.0])
        });
        assert_eq!(s.jacobian_mode(), JacobianMode::FiniteDifference { step: None });
        let d = s.derivative(&[0.3, 0.1, 2.0]).unwrap();
        assert!((d[2][(0, 1)] - 1.0).abs() < 1e-9);
        assert!(d[0].amax() < 1e-12);
    }
}
