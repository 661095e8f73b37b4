use std::ops::Deref;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A point of phase space. Units of the individual coordinates belong to
/// whichever model interprets them.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint(DVector<f64>);

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::from_vector(DVector::from_column_slice(coords))
    }

    pub fn from_vector(v: DVector<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::invalid("phase point must have at least one coordinate"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::non_finite("phase point coordinates"));
        }
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    /// Euclidean norm, used to scale default finite-difference steps.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl Deref for PhasePoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        self.0.as_slice()
    }
}

/// Default central-difference step `1e-6 * max(1, |z|)`.
pub fn default_fd_step(z: &[f64]) -> f64 {
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    1e-6 * norm.max(1.0)
}

/// Central-difference gradient of a scalar field.
pub(crate) fn central_gradient<F>(f: F, z: &[f64], h: f64) -> Result<DVector<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let mut work = z.to_vec();
    let mut grad = DVector::zeros(z.len());
    for i in 0..z.len() {
        let (plus, minus) = stepped(z[i], h, i)?;
        work[i] = plus;
        let fp = f(&work);
        work[i] = minus;
        let fm = f(&work);
        work[i] = z[i];
        grad[i] = (fp - fm) / (plus - minus);
    }
    Ok(grad)
}

/// Returns `(z + h, z - h)` and rejects steps that vanish in floating point.
pub(crate) fn stepped(z: f64, h: f64, index: usize) -> Result<(f64, f64)> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::StepUnderflow { index, step: h });
    }
    let plus = z + h;
    let minus = z - h;
    if plus == z || minus == z {
        return Err(Error::StepUnderflow { index, step: h });
    }
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(PhasePoint::new(vec![]).is_err());
        assert!(matches!(
            PhasePoint::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { .. })
        ));
        assert_eq!(PhasePoint::new(vec![1.0, 2.0]).unwrap().dim(), 2);
    }

    #[test]
    fn step_underflow_is_reported() {
        assert!(matches!(
            stepped(1e20, 1e-6, 3),
            Err(Error::StepUnderflow { index: 3, .. })
        ));
        assert!(stepped(1.0, 0.0, 0).is_err());
    }

    #[test]
    fn central_gradient_of_quadratic() {
        let g = central_gradient(|z| z[0] * z[0] + 3.0 * z[1], &[2.0, -1.0], 1e-5).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }
}
