//! Composition check `int K(x, y; t1) K(y, x'; t2) dy = K(x, x'; t1 + t2)`.
//!
//! The integrand never decays, so it is multiplied by `exp(-eta |y - c|^2)`
//! for each `eta` of the grid schedule, integrated by the trapezoidal rule
//! over the part of the grid where the damping is above `e^{-36}`, and the
//! results are extrapolated polynomially to `eta = 0`.

use num_complex::Complex64;
use serde::Serialize;

use super::{extrapolate_to_zero, GridSpec, KernelFn};
use crate::error::{Error, Result};
use crate::par::Execution;

/// `-ln` of the damping factor at the edge of the integration region.
const DAMP_LOG: f64 = 36.0;
/// Largest accepted phase increment of the integrand between neighbours.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemigroupReport {
    /// Largest `|composed - direct|` over the sample pairs.
    pub max_deviation: f64,
    /// Deviation for each sample pair.
    pub deviations: Vec<f64>,
    /// Magnitude of the directly evaluated kernel at each pair.
    pub reference: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Endpoint pairs inside the sample window around the grid centre.
fn sample_pairs(grid: &GridSpec) -> Vec<(Vec<f64>, Vec<f64>)> {
    let c = grid.center();
    let w = grid.window;
    let d = grid.dim();
    let dir1: Vec<f64> = (0..d).map(|a| if a % 2 == 0 { 1.0 } else { 0.5 }).collect();
    let dir2: Vec<f64> = (0..d).map(|a| if a % 2 == 0 { 0.3 } else { -1.0 }).collect();
    let shift = |s1: f64, dir: &[f64]| -> Vec<f64> { c.iter().zip(dir).map(|(ci, di)| ci + s1 * w * di).collect() };
    vec![
        (c.clone(), c.clone()),
        (shift(1.0, &dir1), shift(-0.5, &dir2)),
        (shift(-1.0, &dir1), shift(1.0, &dir2)),
    ]
}

/// Index range of the nodes within `radius` of `center` along `axis`.
fn sub_range(grid: &GridSpec, axis: usize, center: f64, radius: f64) -> Result<(usize, usize)> {
    let h = grid.spacing(axis);
    let lo = center - radius;
    let hi = center + radius;
    if lo < grid.lower[axis] || hi > grid.upper[axis] {
        return Err(Error::GridTooCoarse(format!(
            "axis {axis}: damping radius {radius:.6} exceeds the grid [{}, {}]",
            grid.lower[axis], grid.upper[axis]
        )));
    }
    let first = ((lo - grid.lower[axis]) / h).ceil() as usize;
    let last = (((hi - grid.lower[axis]) / h).floor() as usize).min(grid.points[axis] - 1);
    Ok((first, last))
}

fn composed(kernel: &KernelFn, x: &[f64], y: &[f64], xp: &[f64], t1: f64, t2: f64) -> Result<Complex64> {
    Ok(kernel(x, y, t1)? * kernel(y, xp, t2)?)
}

/// Refuses grids whose spacing does not resolve the integrand's phase at
/// the edges of the integration region, where it oscillates fastest.
fn check_resolution(
    kernel: &KernelFn,
    grid: &GridSpec,
    ranges: &[(usize, usize)],
    x: &[f64],
    xp: &[f64],
    t1: f64,
    t2: f64,
) -> Result<()> {
    let d = grid.dim();
    let c = grid.center();
    let mut probes: Vec<(Vec<f64>, usize, f64)> = Vec::new();
    for a in 0..d {
        let (first, last) = ranges[a];
        for (i, toward) in [(first, 1.0), (last, -1.0)] {
            let mut y = c.clone();
            y[a] = grid.node(a, i);
            probes.push((y, a, toward));
        }
    }
    let corner: Vec<f64> = (0..d).map(|a| grid.node(a, ranges[a].1)).collect();
    for a in 0..d {
        probes.push((corner.clone(), a, -1.0));
    }
    for (y, a, toward) in probes {
        let mut y2 = y.clone();
        y2[a] += toward * grid.spacing(a);
        let g1 = composed(kernel, x, &y, xp, t1, t2)?;
        let g2 = composed(kernel, x, &y2, xp, t1, t2)?;
        let step = (g2 / g1).arg().abs();
        if step > MAX_PHASE_STEP {
            return Err(Error::GridTooCoarse(format!(
                "axis {a}: integrand phase advances {step:.3} rad per node at y = {y:?}; refine the grid"
            )));
        }
    }
    Ok(())
}

/// Maximum deviation of the damped, extrapolated composition from the
/// direct kernel over sample pairs in the grid's window.
pub fn semigroup_check(
    kernel: &KernelFn,
    tau1: f64,
    tau2: f64,
    grid: &GridSpec,
    exec: Execution,
) -> Result<SemigroupReport> {
    grid.validate()?;
    if grid.eta.is_empty() {
        return Err(Error::Config("semigroup check needs a damping schedule".into()));
    }
    let d = grid.dim();
    let c = grid.center();
    let cell: f64 = (0..d).map(|a| grid.spacing(a)).product();
    let mut deviations = Vec::new();
    let mut reference = Vec::new();
    for (x, xp) in sample_pairs(grid) {
        let direct = kernel(&x, &xp, tau1 + tau2)?;
        let mut values = Vec::with_capacity(grid.eta.len());
        for &eta in &grid.eta {
            let radius = (DAMP_LOG / eta).sqrt();
            let ranges = (0..d).map(|a| sub_range(grid, a, c[a], radius)).collect::<Result<Vec<_>>>()?;
            check_resolution(kernel, grid, &ranges, &x, &xp, tau1, tau2)?;
            let counts: Vec<usize> = ranges.iter().map(|(f, l)| l - f + 1).collect();
            let total: usize = counts.iter().product();
            let sum = exec.sum_complex(total, |flat| {
                let mut rest = flat;
                let mut y = vec![0.0; d];
                let mut r2 = 0.0;
                for a in (0..d).rev() {
                    let i = ranges[a].0 + rest % counts[a];
                    rest /= counts[a];
                    y[a] = grid.node(a, i);
                    r2 += (y[a] - c[a]).powi(2);
                }
                match composed(kernel, &x, &y, &xp, tau1, tau2) {
                    Ok(v) => v * (-eta * r2).exp(),
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                }
            });
            if !sum.is_finite() {
                return Err(Error::non_finite("semigroup integrand"));
            }
            values.push(sum * cell);
        }
        let limit = extrapolate_to_zero(&grid.eta, &values);
        deviations.push((limit - direct).norm());
        reference.push(direct.norm());
    }
    Ok(SemigroupReport {
        max_deviation: deviations.iter().copied().fold(0.0, f64::max),
        deviations,
        reference,
        eta: grid.eta.clone(),
    })
}
