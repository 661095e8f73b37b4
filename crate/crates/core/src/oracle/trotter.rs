//! Time-sliced path integrals evaluated without sampling.
//!
//! Each slice contributes `c exp(i [alpha |x|^2 + x^T beta y + gamma |y|^2])`
//! with `x` the later and `y` the earlier point. The chain keeps the running
//! kernel in the same form, `A exp(i [x^T P x + x^T Q x0 + x0^T R x0])`, and
//! integrates out one intermediate point at a time with
//! `int exp(i a |y|^2 + i J.y) d^d y = (pi / (-i a))^{d/2} exp(-i J.J / 4a)`.
//! For the systems here `P` stays a multiple of the identity, so no
//! determinant branch has to be tracked.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::PhysicalConstants;

type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrotterSystem {
    /// Free particle in as many dimensions as the endpoints have.
    Free,
    /// One-dimensional oscillator with frequency `omega`, split
    /// symmetrically into half potential steps around a free step.
    Ho { omega: f64 },
    /// Transverse plane of a charged particle in `B = (0, 0, b3)`, symmetric
    /// gauge. Since `H = H_osc(w/2) - (w/2) L_3` with commuting terms, the
    /// chain is an isotropic oscillator chain at frequency `w/2`, evaluated
    /// at `(x, R(-w tau/2) x')` with the rotation applied exactly.
    Landau2d,
}

struct Slice {
    c: Complex64,
    alpha: Complex64,
    beta: CMatrix,
    gamma: Complex64,
}

/// Free step between two half potential steps of `m omega^2 |x|^2 / 2`.
fn slice(dim: usize, eps: f64, omega: f64, k: &PhysicalConstants) -> Slice {
    let kin = k.m / (2.0 * k.hbar * eps);
    let c = (Complex64::from(k.m / (2.0 * PI * k.hbar * eps)) / I).sqrt().powi(dim as i32);
    let beta = CMatrix::from_diagonal_element(dim, dim, Complex64::from(-2.0 * kin));
    let quad = Complex64::from(kin - eps * k.m * omega * omega / (4.0 * k.hbar));
    Slice { c, alpha: quad, beta, gamma: quad }
}

fn check_system(system: TrotterSystem, dim: usize, tau: f64, k: &PhysicalConstants) -> Result<()> {
    k.validate()?;
    let (theta, rate, what) = match system {
        TrotterSystem::Free => return Ok(()),
        TrotterSystem::Ho { omega } => {
            if dim != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: dim });
            }
            (omega * tau, omega, "oscillator chain")
        }
        TrotterSystem::Landau2d => {
            if dim != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: dim });
            }
            let w = k.cyclotron_frequency();
            (0.5 * w * tau, 0.5 * w, "magnetic chain")
        }
    };
    if theta.abs() >= PI {
        let n = (theta.abs() / PI).floor().max(1.0);
        return Err(Error::Caustic { what: what.into(), parameter: tau, nearest: n * PI / rate.abs() });
    }
    Ok(())
}

/// The `n_slices`-fold time-sliced kernel from `xp` to `x` over `tau`.
pub fn trotter_kernel(
    system: TrotterSystem,
    x: &[f64],
    xp: &[f64],
    tau: f64,
    n_slices: usize,
    k: &PhysicalConstants,
) -> Result<Complex64> {
    let d = x.len();
    if xp.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: xp.len() });
    }
    if d == 0 {
        return Err(Error::invalid("endpoints must have at least one coordinate"));
    }
    if n_slices < 2 {
        return Err(Error::invalid("at least two slices are required"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid("slice chain needs a positive finite time"));
    }
    check_system(system, d, tau, k)?;

    let (omega, xp) = match system {
        TrotterSystem::Free => (0.0, xp.to_vec()),
        TrotterSystem::Ho { omega } => (omega, xp.to_vec()),
        TrotterSystem::Landau2d => {
            let half = 0.5 * k.cyclotron_frequency();
            let (sn, cs) = (half * tau).sin_cos();
            (half, vec![cs * xp[0] + sn * xp[1], -sn * xp[0] + cs * xp[1]])
        }
    };
    let s = slice(d, tau / n_slices as f64, omega, k);
    let id = CMatrix::identity(d, d);
    let mut amp = s.c;
    let mut p = &id * s.alpha;
    let mut q = s.beta.clone();
    let mut r = &id * s.gamma;
    let beta_bt = &s.beta * s.beta.transpose();
    for step in 1..n_slices {
        let a = s.gamma + p[(0, 0)];
        let offdiag = (&p - &id * p[(0, 0)]).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if offdiag > 1e-9 * p[(0, 0)].norm() {
            return Err(Error::invalid("slice chain lost isotropy"));
        }
        if a.norm() < 1e-300 {
            return Err(Error::Caustic {
                what: "slice chain".into(),
                parameter: tau,
                nearest: tau * step as f64 / n_slices as f64,
            });
        }
        let gauss = Complex64::from(PI) / (-I * a);
        let gauss = if d % 2 == 0 { gauss.powi(d as i32 / 2) } else { gauss.sqrt().powi(d as i32) };
        amp *= s.c * gauss;
        let four_a = a * 4.0;
        r -= q.transpose() * &q / four_a;
        q = -(&s.beta * &q) / (a * 2.0);
        p = &id * s.alpha - &beta_bt / four_a;
    }

    let xv = CMatrix::from_iterator(d, 1, x.iter().map(|&v| Complex64::from(v)));
    let xpv = CMatrix::from_iterator(d, 1, xp.iter().map(|&v| Complex64::from(v)));
    let expo = (xv.transpose() * &p * &xv + xv.transpose() * &q * &xpv + xpv.transpose() * &r * &xpv)[(0, 0)];
    let out = amp * (I * expo).exp();
    if !out.is_finite() {
        return Err(Error::non_finite("slice chain"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_exact(x: &[f64], xp: &[f64], tau: f64) -> Complex64 {
        let d2: f64 = x.iter().zip(xp).map(|(a, b)| (a - b).powi(2)).sum();
        (Complex64::from(1.0 / (2.0 * PI * tau)) / I).sqrt().powi(x.len() as i32) * (I * d2 / (2.0 * tau)).exp()
    }

    #[test]
    fn free_chain_is_exact_for_every_slicing() {
        let k = PhysicalConstants::default();
        for n in [2, 3, 17, 64] {
            for (x, xp) in [(vec![0.3], vec![-0.4]), (vec![0.1, 0.7, -0.2], vec![0.5, -0.3, 0.0])] {
                let lat = trotter_kernel(TrotterSystem::Free, &x, &xp, 0.8, n, &k).unwrap();
                let ex = free_exact(&x, &xp, 0.8);
                assert!((lat - ex).norm() < 1e-12 * ex.norm(), "n = {n}");
            }
        }
    }

    #[test]
    fn refuses_bad_input() {
        let k = PhysicalConstants::default();
        assert!(trotter_kernel(TrotterSystem::Free, &[0.0], &[0.0], 1.0, 1, &k).is_err());
        assert!(matches!(
            trotter_kernel(TrotterSystem::Ho { omega: 1.0 }, &[0.0], &[0.0], 4.0, 8, &k),
            Err(Error::Caustic { .. })
        ));
        assert!(trotter_kernel(TrotterSystem::Landau2d, &[0.0], &[0.0], 1.0, 8, &k).is_err());
    }
}
