//! Analytic functions of `X = e F s`.
//!
//! The characteristic polynomial of `X` is even, `l^4 - p l^2 - q` with
//! `p = tr(X^2)/2` and `q = -det X`, so `X^2` satisfies
//! `(X^2 - w1)(X^2 - w2) = 0` with `w1 = a^2 >= 0 >= w2 = -b^2`, one value
//! per invariant 2-plane. Every even function is therefore
//! `G(X^2) = alpha + beta X^2` and every odd one `X (gamma + delta X^2)`,
//! where the coefficients interpolate `G` at `w1, w2`. The interpolation
//! uses a degree-30 Taylor expansion of the divided difference whenever
//! both plane values are small, which covers the null (crossed-field) case
//! in which `X` is not diagonalisable and `w1 = w2 = 0`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use nalgebra::Matrix4;

use super::field::FieldStrength;
use crate::error::{Error, Result};
pub use crate::semiclassical::CAUSTIC_EPS;
use crate::special::{sinc, sinhc};

const SERIES_DEGREE: usize = 30;
const SERIES_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFunction {
    /// `exp(X)`.
    Exp,
    /// `sinh(X) / X`, the identity at `X = 0`.
    Sinhc,
    /// `X coth(X)`, the identity at `X = 0`.
    CothTimesX,
    /// `tr ln(sinh(X) / X)`.
    TrLogSinhc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixFnValue {
    Matrix(Matrix4<f64>),
    Scalar(f64),
}

impl MatrixFnValue {
    pub fn matrix(self) -> Option<Matrix4<f64>> {
        match self {
            MatrixFnValue::Matrix(m) => Some(m),
            MatrixFnValue::Scalar(_) => None,
        }
    }

    pub fn scalar(self) -> Option<f64> {
        match self {
            MatrixFnValue::Scalar(v) => Some(v),
            MatrixFnValue::Matrix(_) => None,
        }
    }
}

/// Scalar functions of `w = x^2`.
#[derive(Debug, Clone, Copy)]
enum PlaneFn {
    /// `cosh(x)`.
    Cosh,
    /// `sinh(x) / x`.
    Sinhc,
    /// `x coth(x)`.
    XCothX,
    /// `(cosh(x) - 1) / x^2`.
    CoshM1,
}

fn factorial_inverse(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc / k as f64)
}

fn x_coth_x_coefficients() -> &'static [f64; SERIES_DEGREE + 1] {
    static C: OnceLock<[f64; SERIES_DEGREE + 1]> = OnceLock::new();
    C.get_or_init(|| {
        // x coth x = C(w) / S(w), C = sum w^k/(2k)!, S = sum w^k/(2k+1)!.
        let c: Vec<f64> = (0..=SERIES_DEGREE).map(|k| factorial_inverse(2 * k)).collect();
        let s: Vec<f64> = (0..=SERIES_DEGREE).map(|k| factorial_inverse(2 * k + 1)).collect();
        let mut g = [0.0; SERIES_DEGREE + 1];
        for k in 0..=SERIES_DEGREE {
            g[k] = c[k] - (0..k).map(|j| g[j] * s[k - j]).sum::<f64>();
        }
        g
    })
}

impl PlaneFn {
    fn coeff(self, k: usize) -> f64 {
        match self {
            PlaneFn::Cosh => factorial_inverse(2 * k),
            PlaneFn::Sinhc => factorial_inverse(2 * k + 1),
            PlaneFn::XCothX => x_coth_x_coefficients()[k],
            PlaneFn::CoshM1 => factorial_inverse(2 * k + 2),
        }
    }

    fn closed(self, w: f64) -> f64 {
        let r = w.abs().sqrt();
        let pos = w >= 0.0;
        match self {
            PlaneFn::Cosh => if pos { r.cosh() } else { r.cos() },
            PlaneFn::Sinhc => if pos { sinhc(r) } else { sinc(r) },
            PlaneFn::XCothX => if pos { r / r.tanh() } else { r / r.tan() },
            PlaneFn::CoshM1 => (PlaneFn::Cosh.closed(w) - 1.0) / w,
        }
    }

    fn series(self, w: f64) -> f64 {
        (0..=SERIES_DEGREE).rev().fold(0.0, |acc, k| acc * w + self.coeff(k))
    }

    fn value(self, w: f64) -> f64 {
        if w.abs() <= SERIES_RADIUS {
            self.series(w)
        } else {
            self.closed(w)
        }
    }

    /// `(alpha, beta)` with `alpha + beta w = G(w)` at `w1` and `w2`.
    fn interpolate(self, w1: f64, w2: f64) -> Result<(f64, f64)> {
        if w1.abs().max(w2.abs()) <= SERIES_RADIUS {
            // beta = sum_k g_k h_{k-1}(w1, w2), h the complete homogeneous polynomial.
            let mut h = 1.0;
            let mut w2k = 1.0;
            let mut beta = 0.0;
            let mut last = 0.0;
            for k in 1..=SERIES_DEGREE {
                last = self.coeff(k) * h;
                beta += last;
                w2k *= w2;
                h = w1 * h + w2k;
            }
            if last.abs() > 1e-15 * beta.abs().max(1.0) {
                return Err(Error::SeriesDivergence { what: format!("{self:?} divided difference") });
            }
            Ok((self.series(w1) - beta * w1, beta))
        } else {
            let (g1, g2) = (self.value(w1), self.value(w2));
            let d = w1 - w2;
            Ok(((w1 * g2 - w2 * g1) / d, (g1 - g2) / d))
        }
    }
}

/// Plane values `w1 = (a t)^2` and `w2 = -(b t)^2` of `X = e F t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Planes {
    pub w1: f64,
    pub w2: f64,
}

impl Planes {
    pub fn of(field: &FieldStrength, t: f64) -> Self {
        let (a, b) = field.plane_rates();
        Planes { w1: (a * t).powi(2), w2: -(b * t).powi(2) }
    }

    /// The rotation angle `b t` of the magnetic-like plane.
    pub fn rotation(&self) -> f64 {
        (-self.w2).sqrt()
    }
}

fn even(f: PlaneFn, x: &Matrix4<f64>, p: Planes) -> Result<Matrix4<f64>> {
    let (alpha, beta) = f.interpolate(p.w1, p.w2)?;
    Ok(Matrix4::identity() * alpha + x * x * beta)
}

fn odd(f: PlaneFn, x: &Matrix4<f64>, p: Planes) -> Result<Matrix4<f64>> {
    let (gamma, delta) = f.interpolate(p.w1, p.w2)?;
    Ok(x * (Matrix4::identity() * gamma + x * x * delta))
}

/// Refuses `b s` at or beyond the first zero of `sin`, where `sinh(eFs)`
/// becomes singular; the error reports the nearest singular `s`.
pub fn check_caustic(field: &FieldStrength, s: f64, what: &str) -> Result<()> {
    let bs = Planes::of(field, s).rotation();
    if bs >= PI || (bs > FRAC_PI_2 && bs.sin().abs() < CAUSTIC_EPS) {
        let k = (bs / PI).round().max(1.0);
        return Err(Error::Caustic {
            what: what.into(),
            parameter: s,
            nearest: s * k * PI / bs,
        });
    }
    Ok(())
}

/// `exp(e F t)`.
pub fn exp_ef(field: &FieldStrength, t: f64) -> Result<Matrix4<f64>> {
    let x = field.ef() * t;
    let p = Planes::of(field, t);
    Ok(even(PlaneFn::Cosh, &x, p)? + odd(PlaneFn::Sinhc, &x, p)?)
}

/// `sinh(e F t) / (e F t)`.
pub fn sinhc_ef(field: &FieldStrength, t: f64) -> Result<Matrix4<f64>> {
    even(PlaneFn::Sinhc, &(field.ef() * t), Planes::of(field, t))
}

/// `(e F t) coth(e F t)`.
pub fn x_coth_x_ef(field: &FieldStrength, t: f64) -> Result<Matrix4<f64>> {
    check_caustic(field, t, "coth(eFs)")?;
    even(PlaneFn::XCothX, &(field.ef() * t), Planes::of(field, t))
}

/// `(e^Z - 1) / Z` with `Z = e F t`.
pub fn phi1_ef(field: &FieldStrength, t: f64) -> Result<Matrix4<f64>> {
    let x = field.ef() * t;
    let p = Planes::of(field, t);
    // Even part sinh(Z)/Z, odd part Z (cosh Z - 1)/Z^2.
    Ok(even(PlaneFn::Sinhc, &x, p)? + x * even(PlaneFn::CoshM1, &x, p)?)
}

/// `tr ln(sinh(e F t) / (e F t))` on the principal sheet.
pub fn tr_log_sinhc(field: &FieldStrength, t: f64) -> Result<f64> {
    check_caustic(field, t, "tr ln sinhc(eFs)")?;
    let p = Planes::of(field, t);
    Ok(2.0 * PlaneFn::Sinhc.value(p.w1).ln() + 2.0 * PlaneFn::Sinhc.value(p.w2).ln())
}

/// `tr((e F t) coth(e F t))` from the plane values.
pub fn tr_x_coth_x(field: &FieldStrength, t: f64) -> Result<f64> {
    check_caustic(field, t, "tr coth(eFs)")?;
    let p = Planes::of(field, t);
    Ok(2.0 * PlaneFn::XCothX.value(p.w1) + 2.0 * PlaneFn::XCothX.value(p.w2))
}

/// Evaluates the named function of `X = e F s`.
pub fn matrix_fn(field: &FieldStrength, s: f64, which: MatrixFunction) -> Result<MatrixFnValue> {
    if !s.is_finite() {
        return Err(Error::non_finite("proper time"));
    }
    Ok(match which {
        MatrixFunction::Exp => MatrixFnValue::Matrix(exp_ef(field, s)?),
        MatrixFunction::Sinhc => MatrixFnValue::Matrix(sinhc_ef(field, s)?),
        MatrixFunction::CothTimesX => MatrixFnValue::Matrix(x_coth_x_ef(field, s)?),
        MatrixFunction::TrLogSinhc => MatrixFnValue::Scalar(tr_log_sinhc(field, s)?),
    })
}
