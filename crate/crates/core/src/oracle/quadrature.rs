//! Direct integration of line integrals and of worldline actions.

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::PhysicalConstants;
use crate::proper_time::{FieldStrength, Gauge};
use crate::special::gauss_legendre;

/// `(e / hbar c) int A . dzeta` with `A = B x zeta / 2`, along the straight
/// segment from `rp` to `r`, by `nodes`-point Gauss–Legendre quadrature.
pub fn holonomy_quadrature(r: [f64; 3], rp: [f64; 3], k: &PhysicalConstants, nodes: usize) -> f64 {
    let (t, w) = gauss_legendre(nodes);
    let b = Vector3::from(k.b);
    let (r, rp) = (Vector3::from(r), Vector3::from(rp));
    let d = r - rp;
    let integral: f64 = t
        .iter()
        .zip(&w)
        .map(|(ti, wi)| {
            let z = rp + d * (0.5 * (ti + 1.0));
            0.5 * wi * (0.5 * b.cross(&z)).dot(&d)
        })
        .sum();
    k.e / (k.hbar * k.c) * integral
}

/// Signed area of a closed polygon (counter-clockwise positive).
pub fn shoelace_area(polygon: &[[f64; 2]]) -> f64 {
    let n = polygon.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (polygon[i], polygon[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

/// The action of a worldline accumulated step by step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorldlineAction {
    /// `int 1/4 x'.g.x' dl`.
    pub kinetic: f64,
    /// `int e A(x) . x' dl`.
    pub potential: f64,
    /// Distance between the integrated endpoint and the requested one.
    pub endpoint_error: f64,
}

impl WorldlineAction {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

/// State `(x, v, kinetic, potential)` of the worldline integration.
type State = [f64; 10];

fn rhs(s: &State, ef2: &Matrix4<f64>, g: &Matrix4<f64>, field: &FieldStrength, gauge: &dyn Gauge) -> State {
    let x = Vector4::new(s[0], s[1], s[2], s[3]);
    let v = Vector4::new(s[4], s[5], s[6], s[7]);
    let a = ef2 * v;
    let mut out = [0.0; 10];
    for i in 0..4 {
        out[i] = v[i];
        out[4 + i] = a[i];
    }
    out[8] = 0.25 * v.dot(&(g * v));
    out[9] = field.charge * gauge.potential(field, &x).dot(&v);
    out
}

fn rk4(mut s: State, steps: usize, h: f64, f: impl Fn(&State) -> State) -> State {
    let add = |a: &State, b: &State, c: f64| -> State { std::array::from_fn(|i| a[i] + c * b[i]) };
    for _ in 0..steps {
        let k1 = f(&s);
        let k2 = f(&add(&s, &k1, 0.5 * h));
        let k3 = f(&add(&s, &k2, 0.5 * h));
        let k4 = f(&add(&s, &k3, h));
        s = std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    s
}

/// Solves `x'' = 2 eF x'` from `x''` to `x'` by linear shooting with RK4
/// and integrates `L = 1/4 x'.g.x' + e A . x'` along the result.
pub fn worldline_action(
    x_end: &Vector4<f64>,
    x_start: &Vector4<f64>,
    s: f64,
    field: &FieldStrength,
    gauge: &dyn Gauge,
    steps: usize,
) -> Result<WorldlineAction> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid("worldline length must be positive"));
    }
    if steps == 0 {
        return Err(Error::invalid("at least one step is required"));
    }
    let h = s / steps as f64;
    let ef2 = field.ef() * 2.0;
    let g = field.metric();
    let f = |st: &State| rhs(st, &ef2, &g, field, gauge);

    // Columns of the linear map from initial velocity to displacement.
    let mut shoot = Matrix4::zeros();
    for j in 0..4 {
        let mut st = [0.0; 10];
        st[4 + j] = 1.0;
        let end = rk4(st, steps, h, f);
        for i in 0..4 {
            shoot[(i, j)] = end[i];
        }
    }
    let v0 = shoot.lu().solve(&(x_end - x_start)).ok_or(Error::NonInvertibleJacobian)?;
    let mut st = [0.0; 10];
    for i in 0..4 {
        st[i] = x_start[i];
        st[4 + i] = v0[i];
    }
    let end = rk4(st, steps, h, f);
    let reached = Vector4::new(end[0], end[1], end[2], end[3]);
    Ok(WorldlineAction { kinetic: end[8], potential: end[9], endpoint_error: (reached - x_end).norm() })
}
