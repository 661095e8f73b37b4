//! Four-potentials for a constant field and the line integrals built from them.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::field::FieldStrength;
use crate::special::gauss_legendre;

const LINE_NODES: usize = 8;

/// A potential `A_mu(x)` (lower index) whose curl is the given field.
pub trait Gauge: Send + Sync {
    fn potential(&self, field: &FieldStrength, x: &Vector4<f64>) -> Vector4<f64>;

    fn name(&self) -> &str;

    /// `int A_mu dx^mu` along the straight segment `from -> to`.
    ///
    /// The default uses Gauss–Legendre quadrature, exact for potentials of
    /// polynomial degree below 16.
    fn line_integral(&self, field: &FieldStrength, from: &Vector4<f64>, to: &Vector4<f64>) -> f64 {
        straight_line_quadrature(|x| self.potential(field, x), from, to)
    }
}

/// `int v(x) . dx` along the straight segment by Gauss–Legendre quadrature.
pub fn straight_line_quadrature(
    v: impl Fn(&Vector4<f64>) -> Vector4<f64>,
    from: &Vector4<f64>,
    to: &Vector4<f64>,
) -> f64 {
    let (nodes, weights) = gauss_legendre(LINE_NODES);
    let delta = to - from;
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        let x = from + delta * (0.5 * (t + 1.0));
        acc += 0.5 * w * v(&x).dot(&delta);
    }
    acc
}

/// `A_mu = -1/2 F_{mu nu} (x - c)^nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricGauge {
    pub center: Vector4<f64>,
}

impl Default for SymmetricGauge {
    fn default() -> Self {
        SymmetricGauge { center: Vector4::zeros() }
    }
}

impl Gauge for SymmetricGauge {
    fn potential(&self, field: &FieldStrength, x: &Vector4<f64>) -> Vector4<f64> {
        field.lowered() * (x - self.center) * -0.5
    }

    fn name(&self) -> &str {
        "symmetric"
    }

    fn line_integral(&self, field: &FieldStrength, from: &Vector4<f64>, to: &Vector4<f64>) -> f64 {
        // The term quadratic in (to - from) drops out by antisymmetry.
        let delta = to - from;
        -0.5 * delta.dot(&(field.lowered() * (from - self.center)))
    }
}

/// `A = 0`, only a valid potential for a vanishing field.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroGauge;

impl Gauge for ZeroGauge {
    fn potential(&self, _field: &FieldStrength, _x: &Vector4<f64>) -> Vector4<f64> {
        Vector4::zeros()
    }

    fn name(&self) -> &str {
        "zero"
    }

    fn line_integral(&self, _field: &FieldStrength, _from: &Vector4<f64>, _to: &Vector4<f64>) -> f64 {
        0.0
    }
}

/// `A + d chi` with `chi(x) = c . x + 1/2 x^T Q x`, `Q` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedGauge<G> {
    pub base: G,
    pub linear: Vector4<f64>,
    pub quadratic: Matrix4<f64>,
}

impl<G: Gauge> ShiftedGauge<G> {
    pub fn new(base: G, linear: Vector4<f64>, quadratic: Matrix4<f64>) -> Self {
        let quadratic = (quadratic + quadratic.transpose()) * 0.5;
        ShiftedGauge { base, linear, quadratic }
    }

    pub fn chi(&self, x: &Vector4<f64>) -> f64 {
        self.linear.dot(x) + 0.5 * x.dot(&(self.quadratic * x))
    }
}

impl<G: Gauge> Gauge for ShiftedGauge<G> {
    fn potential(&self, field: &FieldStrength, x: &Vector4<f64>) -> Vector4<f64> {
        self.base.potential(field, x) + self.linear + self.quadratic * x
    }

    fn name(&self) -> &str {
        "shifted"
    }
}

/// `e int [A(z) + 1/2 F (z - start)] . dz` along a polyline from
/// `points[0]` to the last point. The integrand is curl-free, so the value
/// depends only on the endpoints.
pub fn polyline_phase(field: &FieldStrength, gauge: &dyn Gauge, points: &[Vector4<f64>]) -> f64 {
    let Some(start) = points.first().copied() else {
        return 0.0;
    };
    let low = field.lowered();
    let integrand = |z: &Vector4<f64>| gauge.potential(field, z) + low * (z - start) * 0.5;
    field.charge * points.windows(2).map(|w| straight_line_quadrature(integrand, &w[0], &w[1])).sum::<f64>()
}

/// `phi(x, x') = exp{i e int_{x'}^{x} [A + 1/2 F (z - x')] . dz}`.
pub fn gauge_phase_factor(
    x: &Vector4<f64>,
    x_prime: &Vector4<f64>,
    field: &FieldStrength,
    gauge: &dyn Gauge,
) -> Complex64 {
    Complex64::from_polar(1.0, polyline_phase(field, gauge, &[*x_prime, *x]))
}

/// `exp{i e int A . dq}` along the straight path `from -> to`.
pub fn holonomy_factor(field: &FieldStrength, gauge: &dyn Gauge, from: &Vector4<f64>, to: &Vector4<f64>) -> Complex64 {
    Complex64::from_polar(1.0, field.charge * gauge.line_integral(field, from, to))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proper_time::field::{build_field, Signature};
    use nalgebra::Vector3;

    fn field() -> FieldStrength {
        build_field(Vector3::new(0.3, -0.4, 0.2), Vector3::new(0.5, 0.1, -0.6), 1.3, Signature::MostlyMinus)
    }

    #[test]
    fn symmetric_gauge_curl_is_the_field() {
        let f = field();
        let g = SymmetricGauge { center: Vector4::new(0.1, 0.2, -0.3, 0.4) };
        let x = Vector4::new(0.5, -0.2, 0.7, 0.1);
        let h = 1e-5;
        let mut jac = Matrix4::zeros();
        for nu in 0..4 {
            let mut xp = x;
            let mut xm = x;
            xp[nu] += h;
            xm[nu] -= h;
            let col = (g.potential(&f, &xp) - g.potential(&f, &xm)) / (2.0 * h);
            jac.set_column(nu, &col);
        }
        // jac[(mu, nu)] = d_nu A_mu, so F_{mu nu} = jac^T - jac.
        let curl = jac.transpose() - jac;
        assert!((curl - f.lowered()).amax() < 1e-9);
    }

    #[test]
    fn analytic_line_integral_matches_quadrature() {
        let f = field();
        let g = SymmetricGauge { center: Vector4::new(0.3, 0.0, 1.0, -0.5) };
        let a = Vector4::new(0.2, 0.4, -0.1, 0.9);
        let b = Vector4::new(-0.7, 0.3, 0.5, 0.2);
        let exact = g.line_integral(&f, &a, &b);
        let quad = straight_line_quadrature(|x| g.potential(&f, x), &a, &b);
        assert!((exact - quad).abs() < 1e-14);
    }

    #[test]
    fn phase_is_path_independent() {
        let f = field();
        let g = ShiftedGauge::new(SymmetricGauge::default(), Vector4::new(0.1, 0.0, 0.2, 0.3), Matrix4::identity() * 0.4);
        let x0 = Vector4::new(0.0, 0.1, 0.2, 0.3);
        let x1 = Vector4::new(1.0, -0.4, 0.8, 0.5);
        let straight = polyline_phase(&f, &g, &[x0, x1]);
        let detour = polyline_phase(&f, &g, &[x0, Vector4::new(2.0, 1.0, -1.0, 0.0), Vector4::new(-0.5, 0.7, 0.3, 1.5), x1]);
        assert!((straight - detour).abs() < 1e-12);
    }

    #[test]
    fn centered_symmetric_gauge_has_unit_phase() {
        let f = field();
        let xp = Vector4::new(0.4, 0.3, -0.2, 0.1);
        let g = SymmetricGauge { center: xp };
        let phi = gauge_phase_factor(&Vector4::new(1.0, 2.0, 3.0, 4.0), &xp, &f, &g);
        assert!((phi - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(gauge_phase_factor(&xp, &xp, &f, &g), Complex64::new(1.0, 0.0));
    }
}
