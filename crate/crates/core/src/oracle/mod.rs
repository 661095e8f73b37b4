//! Brute-force verifiers that share no formulas with the code they check.
//!
//! * [`trotter`] — time-sliced path integrals reduced exactly, one Gaussian
//!   integration per slice.
//! * [`semigroup`] — grid convolution `K(t1) * K(t2)` against `K(t1 + t2)`
//!   with Gaussian damping and extrapolation to zero damping.
//! * [`pde`] — finite-difference residuals of the Schrödinger and
//!   Hamilton–Jacobi equations.
//! * [`quadrature`] — line integrals and worldline actions by direct
//!   integration.
//!
//! Everything is deterministic and seed-free.

pub mod pde;
pub mod quadrature;
pub mod semigroup;
pub mod trotter;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use pde::{hamilton_jacobi_residual, schrodinger_residual, HamiltonianSpec};
pub use quadrature::{holonomy_quadrature, shoelace_area, worldline_action, WorldlineAction};
pub use semigroup::{semigroup_check, SemigroupReport};
pub use trotter::{trotter_kernel, TrotterSystem};

/// A kernel sampler `K(x, x'; t)`.
pub type KernelFn<'a> = dyn Fn(&[f64], &[f64], f64) -> Result<Complex64> + Sync + 'a;

/// Smallest number of nodes per axis accepted by [`GridSpec::validate`].
pub const MIN_POINTS: usize = 16;

/// A rectangular node grid, a time step for time derivatives, and the
/// damping schedule for oscillatory integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: Vec<usize>,
    pub time_step: f64,
    /// Strictly decreasing positive damping parameters.
    #[serde(default)]
    pub eta: Vec<f64>,
    /// Half-width, around the grid centre, of the region where kernel
    /// samples are compared.
    #[serde(default = "default_window")]
    pub window: f64,
}

fn default_window() -> f64 {
    0.5
}

impl GridSpec {
    /// The same bounds and node count on every axis.
    pub fn uniform(dim: usize, lower: f64, upper: f64, points: usize, time_step: f64, eta: &[f64]) -> Self {
        GridSpec {
            lower: vec![lower; dim],
            upper: vec![upper; dim],
            points: vec![points; dim],
            time_step,
            eta: eta.to_vec(),
            window: default_window(),
        }
    }

    /// Kernel-residual grid on `[-2, 2]`, spacing 0.02.
    pub fn schrodinger_1d() -> Self {
        GridSpec::uniform(1, -2.0, 2.0, 201, 1e-3, &[])
    }

    /// Kernel-residual grid on `[-1.5, 1.5]^2`, spacing 0.025.
    pub fn schrodinger_2d() -> Self {
        GridSpec::uniform(2, -1.5, 1.5, 121, 1e-3, &[])
    }

    /// Convolution grid for one-dimensional kernels with
    /// `m (1/t1 + 1/t2) / hbar <= 7`: damping down to `eta = 1e-4`, whose
    /// `e^{-36}` radius is 600, and a spacing that keeps the integrand
    /// phase step under `pi/2` out to that radius.
    pub fn semigroup_1d() -> Self {
        GridSpec::uniform(1, -620.0, 620.0, 4_000_001, 1e-3, &[1e-2, 1e-3, 1e-4])
    }

    /// Convolution grid for the transverse magnetic kernel with
    /// `m (1/t1 + 1/t2) / hbar <= 10`. The damping schedule is coarser than
    /// in one dimension because the node count grows as `1/eta` per axis.
    pub fn semigroup_2d() -> Self {
        GridSpec::uniform(2, -13.5, 13.5, 2551, 1e-3, &[0.8, 0.4, 0.2])
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.lower.len();
        if d == 0 || self.upper.len() != d || self.points.len() != d {
            return Err(Error::Config("grid bounds and point counts must have one entry per axis".into()));
        }
        for a in 0..d {
            let (lo, hi) = (self.lower[a], self.upper[a]);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("grid axis {a}: need finite lower < upper, got [{lo}, {hi}]")));
            }
            if self.points[a] < MIN_POINTS {
                return Err(Error::Config(format!(
                    "grid axis {a}: {} points, at least {MIN_POINTS} required",
                    self.points[a]
                )));
            }
        }
        if !(self.time_step > 0.0 && self.time_step.is_finite()) {
            return Err(Error::Config("grid time step must be positive".into()));
        }
        if self.eta.iter().any(|&e| !(e > 0.0 && e.is_finite())) || self.eta.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("damping schedule must be positive and strictly decreasing".into()));
        }
        if !(self.window >= 0.0 && self.window.is_finite()) {
            return Err(Error::Config("sample window must be non-negative".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.points[axis] - 1) as f64
    }

    pub fn node(&self, axis: usize, i: usize) -> f64 {
        self.lower[axis] + i as f64 * self.spacing(axis)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat node index, first axis slowest.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.points[a];
            flat /= self.points[a];
        }
        idx
    }

    pub fn coordinates(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().enumerate().map(|(a, &i)| self.node(a, i)).collect()
    }
}

/// Maximum over `points` of `|grad_f - central difference of f|_inf`
/// divided by `max(|grad_f|_inf, 1e-8)`.
pub fn gradient_check<F, G>(f: F, grad_f: G, points: &[Vec<f64>], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<DVector<f64>>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let mut worst: f64 = 0.0;
    for z in points {
        let g = grad_f(z)?;
        if g.len() != z.len() {
            return Err(Error::DimensionMismatch { expected: z.len(), found: g.len() });
        }
        let mut dev: f64 = 0.0;
        let mut zp = z.clone();
        for i in 0..z.len() {
            zp[i] = z[i] + h;
            let fp = f(&zp)?;
            zp[i] = z[i] - h;
            let fm = f(&zp)?;
            zp[i] = z[i];
            dev = dev.max((g[i] - (fp - fm) / (2.0 * h)).abs());
        }
        worst = worst.max(dev / g.amax().max(1e-8));
    }
    Ok(worst)
}

/// Observed order `log2(e(h) / e(h/2))` from errors at two step sizes.
pub fn observed_order(error_h: f64, error_half: f64) -> f64 {
    (error_h / error_half).log2()
}

/// Value at zero of the polynomial through `(x_k, y_k)` (Neville's scheme).
pub fn extrapolate_to_zero(x: &[f64], y: &[Complex64]) -> Complex64 {
    let n = x.len();
    let mut p = y.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            let j = i + level;
            p[i] = (p[i] * x[j] - p[i + 1] * x[i]) / (x[j] - x[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut g = GridSpec::uniform(2, -1.0, 1.0, 16, 1e-3, &[1e-2, 1e-3]);
        assert!(g.validate().is_ok());
        g.points[1] = 15;
        assert!(matches!(g.validate(), Err(Error::Config(_))));
        let g = GridSpec::uniform(1, -1.0, 1.0, 32, 1e-3, &[1e-3, 1e-2]);
        assert!(g.validate().is_err());
        let g = GridSpec::uniform(1, 1.0, 1.0, 32, 1e-3, &[]);
        assert!(g.validate().is_err());
    }

    #[test]
    fn unravel_roundtrip() {
        let g = GridSpec { points: vec![16, 17, 18], ..GridSpec::uniform(3, 0.0, 1.0, 16, 1.0, &[]) };
        let idx = g.unravel(5 * 17 * 18 + 3 * 18 + 7);
        assert_eq!(idx, vec![5, 3, 7]);
        assert_eq!(g.len(), 16 * 17 * 18);
    }

    #[test]
    fn quadratic_gradient_is_exact() {
        let f = |z: &[f64]| Ok(1.5 * z[0] * z[0] - 0.5 * z[0] * z[1] + 2.0 * z[1] * z[1] + z[0]);
        let g = |z: &[f64]| Ok(DVector::from_vec(vec![3.0 * z[0] - 0.5 * z[1] + 1.0, -0.5 * z[0] + 4.0 * z[1]]));
        let pts = vec![vec![0.3, -0.7], vec![1.2, 0.4], vec![-2.0, 5.0]];
        assert!(gradient_check(f, g, &pts, 1e-4).unwrap() < 1e-10);
    }

    #[test]
    fn neville_recovers_polynomials() {
        let x = [0.4, 0.2, 0.1];
        let y: Vec<Complex64> = x.iter().map(|&t| Complex64::new(2.0 - t + 3.0 * t * t, t)).collect();
        assert!((extrapolate_to_zero(&x, &y) - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }
}
