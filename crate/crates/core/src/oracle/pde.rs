//! Residuals of the equations a propagator and its action must satisfy,
//! discretised with fourth-order central differences in space and time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridSpec, KernelFn};
use crate::error::{Error, Result};
use crate::models::PhysicalConstants;
use crate::par::Execution;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The Hamiltonian acting on the first kernel argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    /// `p^2 / 2m`.
    Free { m: f64, hbar: f64 },
    /// `p^2 / 2m + m omega^2 |x|^2 / 2`.
    Ho { m: f64, omega: f64, hbar: f64 },
    /// `|p - (e/c) A|^2 / 2m` with `A = (b3/2)(-x_2, x_1, 0)`.
    Landau { m: f64, e: f64, c: f64, hbar: f64, b3: f64 },
}

impl HamiltonianSpec {
    pub fn free(k: &PhysicalConstants) -> Self {
        HamiltonianSpec::Free { m: k.m, hbar: k.hbar }
    }

    pub fn ho(k: &PhysicalConstants, omega: f64) -> Self {
        HamiltonianSpec::Ho { m: k.m, omega, hbar: k.hbar }
    }

    pub fn landau(k: &PhysicalConstants) -> Self {
        HamiltonianSpec::Landau { m: k.m, e: k.e, c: k.c, hbar: k.hbar, b3: k.b[2] }
    }

    fn mass_hbar(&self) -> (f64, f64) {
        match *self {
            HamiltonianSpec::Free { m, hbar } | HamiltonianSpec::Ho { m, hbar, .. } => (m, hbar),
            HamiltonianSpec::Landau { m, hbar, .. } => (m, hbar),
        }
    }

    /// `(q A(x), V(x))` with `q = e / c`.
    fn fields(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let mut qa = vec![0.0; x.len()];
        let mut v = 0.0;
        match *self {
            HamiltonianSpec::Free { .. } => {}
            HamiltonianSpec::Ho { m, omega, .. } => {
                v = 0.5 * m * omega * omega * x.iter().map(|t| t * t).sum::<f64>();
            }
            HamiltonianSpec::Landau { e, c, b3, .. } => {
                let q = e / c * 0.5 * b3;
                qa[0] = -q * x[1];
                qa[1] = q * x[0];
            }
        }
        (qa, v)
    }

    fn check(&self, dim: usize) -> Result<()> {
        let (m, hbar) = self.mass_hbar();
        if !(m > 0.0 && hbar > 0.0) {
            return Err(Error::invalid("m and hbar must be positive"));
        }
        if matches!(self, HamiltonianSpec::Landau { .. }) && dim < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: dim });
        }
        Ok(())
    }
}

/// Values of a function on every grid node at times `tau + k dt`, `k = -2..=2`.
fn sample<T: Send>(
    grid: &GridSpec,
    tau: f64,
    exec: Execution,
    f: &(dyn Fn(&[f64], f64) -> Result<T> + Sync),
) -> Result<Vec<Vec<T>>> {
    (-2..=2)
        .map(|k| {
            let t = tau + k as f64 * grid.time_step;
            exec.map(grid.len(), |flat| f(&grid.coordinates(&grid.unravel(flat)), t))
                .into_iter()
                .collect::<Result<Vec<T>>>()
        })
        .collect()
}

fn d1<T>(v: [T; 5], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    // (f(-2) - 8 f(-1) + 8 f(1) - f(2)) / 12 h
    (v[0] - v[4] + (v[3] - v[1]) * 8.0) * (1.0 / (12.0 * h))
}

fn d2<T>(v: [T; 5], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    // (-f(-2) + 16 f(-1) - 30 f(0) + 16 f(1) - f(2)) / 12 h^2
    ((v[1] + v[3]) * 16.0 - v[0] - v[4] - v[2] * 30.0) * (1.0 / (12.0 * h * h))
}

/// Flat indices of nodes at least two away from every boundary.
fn interior(grid: &GridSpec) -> Vec<usize> {
    (0..grid.len())
        .filter(|&f| grid.unravel(f).iter().zip(&grid.points).all(|(&i, &n)| i >= 2 && i + 2 < n))
        .collect()
}

fn stencil<T: Copy>(grid: &GridSpec, values: &[T], flat: usize, axis: usize) -> [T; 5] {
    let stride: usize = grid.points[axis + 1..].iter().product();
    [
        values[flat - 2 * stride],
        values[flat - stride],
        values[flat],
        values[flat + stride],
        values[flat + 2 * stride],
    ]
}

/// `||(i hbar d/dtau - H_x) K||_2 / ||i hbar d/dtau K||_2` over interior
/// grid nodes, with `x'` fixed.
pub fn schrodinger_residual(
    kernel: &KernelFn,
    spec: &HamiltonianSpec,
    x_prime: &[f64],
    tau: f64,
    grid: &GridSpec,
    exec: Execution,
) -> Result<f64> {
    grid.validate()?;
    let d = grid.dim();
    spec.check(d)?;
    if x_prime.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x_prime.len() });
    }
    let (m, hbar) = spec.mass_hbar();
    let levels = sample(grid, tau, exec, &|x, t| kernel(x, x_prime, t))?;
    let now = &levels[2];
    let (mut num, mut den) = (0.0, 0.0);
    for flat in interior(grid) {
        let x = grid.coordinates(&grid.unravel(flat));
        let dt = d1([levels[0][flat], levels[1][flat], now[flat], levels[3][flat], levels[4][flat]], grid.time_step);
        let (qa, v) = spec.fields(&x);
        let mut h_psi = now[flat] * v;
        for a in 0..d {
            let st = stencil(grid, now, flat, a);
            let hx = grid.spacing(a);
            h_psi += d2(st, hx) * (-hbar * hbar / (2.0 * m));
            h_psi += d1(st, hx) * I * (hbar * qa[a] / m);
            h_psi += now[flat] * (qa[a] * qa[a] / (2.0 * m));
        }
        let lhs = I * hbar * dt;
        num += (lhs - h_psi).norm_sqr();
        den += lhs.norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::GridTooCoarse("no interior nodes with a non-zero time derivative".into()));
    }
    Ok((num / den).sqrt())
}

/// `||dS/dtau + H(x, grad S)||_2 / ||dS/dtau||_2` for a classical action
/// `S(x, x'; tau)`, with `x'` fixed.
pub fn hamilton_jacobi_residual(
    action: &(dyn Fn(&[f64], &[f64], f64) -> Result<f64> + Sync),
    spec: &HamiltonianSpec,
    x_prime: &[f64],
    tau: f64,
    grid: &GridSpec,
    exec: Execution,
) -> Result<f64> {
    grid.validate()?;
    let d = grid.dim();
    spec.check(d)?;
    if x_prime.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x_prime.len() });
    }
    let (m, _) = spec.mass_hbar();
    let levels = sample(grid, tau, exec, &|x, t| action(x, x_prime, t))?;
    let now = &levels[2];
    let (mut num, mut den) = (0.0, 0.0);
    for flat in interior(grid) {
        let x = grid.coordinates(&grid.unravel(flat));
        let dt = d1([levels[0][flat], levels[1][flat], now[flat], levels[3][flat], levels[4][flat]], grid.time_step);
        let (qa, v) = spec.fields(&x);
        let kinetic: f64 = (0..d)
            .map(|a| (d1(stencil(grid, now, flat, a), grid.spacing(a)) - qa[a]).powi(2))
            .sum::<f64>()
            / (2.0 * m);
        num += (dt + kinetic + v).powi(2);
        den += dt * dt;
    }
    if den == 0.0 {
        return Err(Error::GridTooCoarse("no interior nodes with a non-zero time derivative".into()));
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_solves_free_equation() {
        // exp(i(kx - k^2 t/2)) for m = hbar = 1.
        let k = 1.3;
        let wave = |x: &[f64], _xp: &[f64], t: f64| Ok(Complex64::from_polar(1.0, k * x[0] - 0.5 * k * k * t));
        let grid = GridSpec::uniform(1, -1.0, 1.0, 101, 1e-3, &[]);
        let spec = HamiltonianSpec::Free { m: 1.0, hbar: 1.0 };
        let r = schrodinger_residual(&wave, &spec, &[0.0], 0.5, &grid, Execution::Sequential).unwrap();
        assert!(r < 1e-8, "{r}");
        let wrong = |x: &[f64], _xp: &[f64], t: f64| Ok(Complex64::from_polar(1.0, k * x[0] - k * k * t));
        let r = schrodinger_residual(&wrong, &spec, &[0.0], 0.5, &grid, Execution::Sequential).unwrap();
        assert!(r > 0.1);
    }

    #[test]
    fn free_action_solves_hamilton_jacobi() {
        let s = |x: &[f64], xp: &[f64], t: f64| Ok(x.iter().zip(xp).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / (2.0 * t));
        let grid = GridSpec::uniform(2, -1.0, 1.0, 41, 1e-3, &[]);
        let spec = HamiltonianSpec::Free { m: 1.0, hbar: 1.0 };
        let r = hamilton_jacobi_residual(&s, &spec, &[0.2, -0.1], 0.7, &grid, Execution::Sequential).unwrap();
        assert!(r < 1e-9, "{r}");
    }
}
