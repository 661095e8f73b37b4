//! Classical worldline, action and its derivatives for a constant field.
//!
//! With `L = 1/4 x'.g.x' + e A . x'` the path obeys `x'' = 2 eF x'`, so the
//! velocity is `exp(2 eF l) v0` and the position follows from
//! `Phi(l) = (exp(2 eF l) - 1) / (2 eF)`. The closed-form action splits into
//! the straight-line gauge integral and `1/4 D^T g N D` with
//! `N = eF coth(eF s)`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::dirac::{DiracAlgebra, SpinorMatrix};
use super::field::FieldStrength;
use super::gauge::Gauge;
use super::matfn::{check_caustic, exp_ef, phi1_ef, tr_log_sinhc, x_coth_x_ef};
use crate::error::{Error, Result};

/// Relative tolerance for the antisymmetry identity `D^T F D = 0`.
pub const CROSS_TERM_TOLERANCE: f64 = 1e-12;

pub(crate) fn check_proper_time(s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::non_finite("proper time"));
    }
    if s == 0.0 {
        return Err(Error::Coincidence { what: "proper time s = 0".into() });
    }
    if s < 0.0 {
        return Err(Error::invalid(format!("proper time must be positive, got {s}")));
    }
    Ok(())
}

fn check_point(x: &Vector4<f64>, what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::non_finite(what))
    }
}

/// `Phi(l) = l phi1(2 eF l)`, the displacement generated by unit initial velocity.
fn displacement_map(field: &FieldStrength, l: f64) -> Result<Matrix4<f64>> {
    Ok(phi1_ef(field, 2.0 * l)? * l)
}

/// Initial velocity `v0 = Phi(s)^{-1} (x' - x'')`.
fn initial_velocity(x_end: &Vector4<f64>, x_start: &Vector4<f64>, s: f64, field: &FieldStrength) -> Result<Vector4<f64>> {
    check_proper_time(s)?;
    check_point(x_end, "endpoint x'")?;
    check_point(x_start, "endpoint x''")?;
    check_caustic(field, s, "classical path")?;
    let phi = displacement_map(field, s)?;
    phi.lu().solve(&(x_end - x_start)).ok_or(Error::NonInvertibleJacobian)
}

/// Position on the classical path from `x''` (at 0) to `x'` (at `s`).
pub fn classical_path(
    x_end: &Vector4<f64>,
    x_start: &Vector4<f64>,
    s: f64,
    field: &FieldStrength,
    lambda: f64,
) -> Result<Vector4<f64>> {
    let v0 = initial_velocity(x_end, x_start, s, field)?;
    Ok(x_start + displacement_map(field, lambda)? * v0)
}

/// Velocity `dx/dl` on the classical path.
pub fn classical_velocity(
    x_end: &Vector4<f64>,
    x_start: &Vector4<f64>,
    s: f64,
    field: &FieldStrength,
    lambda: f64,
) -> Result<Vector4<f64>> {
    let v0 = initial_velocity(x_end, x_start, s, field)?;
    Ok(exp_ef(field, 2.0 * lambda)? * v0)
}

/// `N = eF coth(eF s)` (mixed indices).
pub fn coth_kernel(field: &FieldStrength, s: f64) -> Result<Matrix4<f64>> {
    check_proper_time(s)?;
    Ok(x_coth_x_ef(field, s)? / s)
}

/// The pieces of the closed-form classical action.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionParts {
    /// `e int A . dq` along the straight path `x'' -> x'`.
    pub line_integral: f64,
    /// `1/4 D^T g N D`.
    pub quadratic: f64,
    /// `D^T F D`, zero by antisymmetry; kept as a diagnostic.
    pub cross_term: f64,
    /// The matrix-valued `(e/2) sigma F s`, reported on its own.
    pub spin: SpinorMatrix,
}

impl ActionParts {
    /// The scalar part of the action, spin term excluded.
    pub fn scalar(&self) -> f64 {
        self.line_integral + self.quadratic
    }
}

/// `1/4 D^T g N D` together with the antisymmetry diagnostic.
pub fn quadratic_exponent(delta: &Vector4<f64>, s: f64, field: &FieldStrength) -> Result<(f64, f64)> {
    let g = field.metric();
    let n = coth_kernel(field, s)?;
    let quadratic = 0.25 * delta.dot(&(g * n * delta));
    let low = field.lowered();
    let cross = delta.dot(&(low * delta));
    let scale = delta.norm_squared() * low.amax().max(f64::MIN_POSITIVE);
    if cross.abs() > CROSS_TERM_TOLERANCE * scale {
        return Err(Error::DegenerateStructure {
            reason: format!("field tensor is not antisymmetric: D.F.D = {cross:e}"),
        });
    }
    Ok((quadratic, cross))
}

/// Closed-form classical action from `x''` to `x'` in proper time `s`.
pub fn classical_action(
    x_end: &Vector4<f64>,
    x_start: &Vector4<f64>,
    s: f64,
    field: &FieldStrength,
    gauge: &dyn Gauge,
) -> Result<ActionParts> {
    check_point(x_end, "endpoint x'")?;
    check_point(x_start, "endpoint x''")?;
    let delta = x_end - x_start;
    let (quadratic, cross_term) = quadratic_exponent(&delta, s, field)?;
    let line_integral = field.charge * gauge.line_integral(field, x_start, x_end);
    let sigma_f = DiracAlgebra::new(field.signature)?.sigma_f(field);
    Ok(ActionParts {
        line_integral,
        quadratic,
        cross_term,
        spin: sigma_f * Complex64::from(0.5 * field.charge * s),
    })
}

/// `dS/dx'_mu = 1/2 (g N D)_mu + e (A_mu(x') + 1/2 F_{mu a} D^a)`.
pub fn action_gradient(
    x_end: &Vector4<f64>,
    x_start: &Vector4<f64>,
    s: f64,
    field: &FieldStrength,
    gauge: &dyn Gauge,
) -> Result<Vector4<f64>> {
    let delta = x_end - x_start;
    let n = coth_kernel(field, s)?;
    let kinetic = field.metric() * n * delta * 0.5;
    let potential = gauge.potential(field, x_end) + field.lowered() * delta * 0.5;
    Ok(kinetic + potential * field.charge)
}

/// `d^2 S / dx'^mu dx''^nu = -1/2 g (N + eF)`.
pub fn mixed_hessian(s: f64, field: &FieldStrength) -> Result<Matrix4<f64>> {
    let n = coth_kernel(field, s)?;
    Ok(field.metric() * (n + field.ef()) * -0.5)
}

/// `sqrt(D) = i/(4 s^2) exp(-1/2 tr ln sinhc(eF s))`.
pub fn van_vleck(s: f64, field: &FieldStrength) -> Result<Complex64> {
    check_proper_time(s)?;
    let tl = tr_log_sinhc(field, s)?;
    Ok(Complex64::new(0.0, 1.0 / (4.0 * s * s)) * (-0.5 * tl).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proper_time::field::{build_field, Signature};
    use crate::proper_time::gauge::SymmetricGauge;
    use nalgebra::Vector3;

    fn samples() -> Vec<FieldStrength> {
        vec![
            build_field(Vector3::new(0.3, -0.2, 0.5), Vector3::new(0.1, 0.4, -0.3), 1.0, Signature::MostlyMinus),
            build_field(Vector3::new(0.0, 0.4, 0.1), Vector3::new(0.7, 0.0, 0.2), -1.5, Signature::MostlyPlus),
            FieldStrength::zero(Signature::MostlyMinus),
        ]
    }

    #[test]
    fn boundary_conditions_and_equation_of_motion() {
        let a = Vector4::new(0.1, 0.2, -0.3, 0.5);
        let b = Vector4::new(1.1, -0.4, 0.6, 0.2);
        for f in samples() {
            let s = 1.4;
            assert!((classical_path(&b, &a, s, &f, 0.0).unwrap() - a).amax() < 1e-14);
            assert!((classical_path(&b, &a, s, &f, s).unwrap() - b).amax() < 1e-13);
            let h = 1e-3;
            let l = 0.6;
            let x = |l| classical_path(&b, &a, s, &f, l).unwrap();
            let v = (x(l + h) - x(l - h)) / (2.0 * h);
            let acc = (x(l + h) - x(l) * 2.0 + x(l - h)) / (h * h);
            let exact_v = classical_velocity(&b, &a, s, &f, l).unwrap();
            assert!((v - exact_v).amax() < 1e-6);
            assert!((acc - f.ef() * exact_v * 2.0).amax() < 1e-5);
        }
    }

    #[test]
    fn zero_field_is_a_straight_line() {
        let f = FieldStrength::zero(Signature::MostlyMinus);
        let a = Vector4::new(0.0, 1.0, 2.0, 3.0);
        let b = Vector4::new(4.0, 3.0, 2.0, 1.0);
        let mid = classical_path(&b, &a, 2.0, &f, 0.5).unwrap();
        assert!((mid - (a + (b - a) * 0.25)).amax() < 1e-15);
        let parts = classical_action(&b, &a, 2.0, &f, &SymmetricGauge::default()).unwrap();
        let d = b - a;
        assert!((parts.quadratic - 0.25 * d.dot(&(f.metric() * d)) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn terminal_momentum_matches_gradient() {
        // p = 1/2 g x'(s) + e A(x') is the gradient of the action.
        let a = Vector4::new(0.2, -0.1, 0.4, 0.0);
        let b = Vector4::new(-0.3, 0.8, 0.1, 0.6);
        let gauge = SymmetricGauge { center: Vector4::new(0.5, 0.5, 0.0, -0.5) };
        for f in samples() {
            let s = 0.9;
            let v = classical_velocity(&b, &a, s, &f, s).unwrap();
            let p = f.metric() * v * 0.5 + gauge.potential(&f, &b) * f.charge;
            assert!((p - action_gradient(&b, &a, s, &f, &gauge).unwrap()).amax() < 1e-12);
        }
    }

    #[test]
    fn van_vleck_matches_hessian_determinant() {
        for f in samples() {
            for s in [0.4, 1.3] {
                let d = (-mixed_hessian(s, &f).unwrap()).determinant();
                let root = van_vleck(s, &f).unwrap();
                assert!(((root * root).re - d).abs() < 1e-10 * d.abs());
            }
        }
        let z = FieldStrength::zero(Signature::MostlyMinus);
        assert_eq!(van_vleck(2.0, &z).unwrap(), Complex64::new(0.0, 1.0 / 16.0));
    }

    #[test]
    fn errors() {
        let f = build_field(Vector3::zeros(), Vector3::new(0.0, 0.0, 1.0), 1.0, Signature::MostlyMinus);
        let x = Vector4::zeros();
        assert!(matches!(van_vleck(0.0, &f), Err(Error::Coincidence { .. })));
        assert!(matches!(classical_path(&x, &x, 3.5, &f, 1.0), Err(Error::Caustic { .. })));
        assert!(matches!(coth_kernel(&f, -1.0), Err(Error::InvalidParameter(_))));
    }
}
