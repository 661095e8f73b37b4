use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::point::{default_fd_step, stepped, PhasePoint};
use crate::error::{Error, Result};

type MapFn = dyn Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync;
type JacFn = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync;

/// An invertible change of phase-space coordinates `z -> z'`, not
/// necessarily canonical.
#[derive(Clone)]
pub struct CoordinateMap {
    name: String,
    dim: usize,
    forward: Arc<MapFn>,
    inverse: Arc<MapFn>,
    jacobian: Option<Arc<JacFn>>,
    fd_step: Option<f64>,
}

impl fmt::Debug for CoordinateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoordinateMap")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl CoordinateMap {
    pub fn new<F, G>(name: impl Into<String>, dim: usize, forward: F, inverse: G) -> Self
    where
        F: Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync + 'static,
        G: Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim,
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            jacobian: None,
            fd_step: None,
        }
    }

    /// Analytic Jacobian `d z'_a / d z_c` as a function of the source point `z`.
    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = Some(h);
        self.jacobian = None;
        self
    }

    pub fn identity(dim: usize) -> Self {
        Self::linear("identity", DMatrix::identity(dim, dim)).expect("identity is invertible")
    }

    /// `z' = M z` for an invertible square `M`.
    pub fn linear(name: impl Into<String>, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        let inv = matrix
            .clone()
            .try_inverse()
            .ok_or(Error::NonInvertibleJacobian)?;
        let (m1, m2) = (matrix.clone(), matrix);
        Ok(Self::new(
            name,
            dim,
            move |z| Ok(&m1 * DVector::from_column_slice(z)),
            move |z| Ok(&inv * DVector::from_column_slice(z)),
        )
        .with_jacobian(move |_| Ok(m2.clone())))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, z: &[f64]) -> Result<PhasePoint> {
        self.check(z)?;
        PhasePoint::from_vector((self.forward)(z)?)
    }

    pub fn inverse(&self, z_new: &[f64]) -> Result<PhasePoint> {
        self.check(z_new)?;
        PhasePoint::from_vector((self.inverse)(z_new)?)
    }

    /// `d z'_a / d z_c` at the source point `z`.
    pub fn jacobian(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        self.check(z)?;
        if let Some(j) = &self.jacobian {
            return j(z);
        }
        let h = self.fd_step.unwrap_or_else(|| default_fd_step(z));
        let mut work = z.to_vec();
        let mut jac = DMatrix::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            let (plus, minus) = stepped(z[c], h, c)?;
            work[c] = plus;
            let fp = (self.forward)(&work)?;
            work[c] = minus;
            let fm = (self.forward)(&work)?;
            work[c] = z[c];
            jac.set_column(c, &((fp - fm) / (plus - minus)));
        }
        Ok(jac)
    }

    /// `max |inverse(forward(z)) - z|`.
    pub fn roundtrip_error(&self, z: &[f64]) -> Result<f64> {
        let back = self.inverse(&self.forward(z)?)?;
        Ok(back
            .iter()
            .zip(z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
