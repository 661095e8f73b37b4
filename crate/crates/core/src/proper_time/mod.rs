//! Relativistic charged particle in a constant electromagnetic field,
//! worked out with `hbar = 1` in four dimensions.
//!
//! Everything here is a pure function of the field, the endpoints and the
//! proper time `s`. Evaluations at or past the first zero of
//! `sin(b s)` (the relativistic caustic) are refused.

mod dirac;
mod field;
mod gauge;
mod matfn;
mod path;

use std::f64::consts::PI;

use nalgebra::Vector4;
use num_complex::Complex64;

pub use dirac::{spin_factor, DiracAlgebra, SpinorMatrix};
pub use field::{build_field, FieldStrength, Signature};
pub use gauge::{
    gauge_phase_factor, holonomy_factor, polyline_phase, straight_line_quadrature, Gauge, ShiftedGauge,
    SymmetricGauge, ZeroGauge,
};
pub use matfn::{
    check_caustic, exp_ef, matrix_fn, phi1_ef, sinhc_ef, tr_log_sinhc, tr_x_coth_x, x_coth_x_ef, MatrixFnValue,
    MatrixFunction, Planes, CAUSTIC_EPS,
};
pub use path::{
    action_gradient, classical_action, classical_path, classical_velocity, coth_kernel, mixed_hessian,
    quadratic_exponent, van_vleck, ActionParts, CROSS_TERM_TOLERANCE,
};

use crate::error::{Error, Result};

/// The separately reported factors of the scalar kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelComponents {
    /// `-i / (16 pi^2 s^2)`.
    pub prefactor: Complex64,
    /// `exp(-1/2 tr ln sinhc(eF s))`.
    pub tr_log_term: f64,
    /// `1/4 D^T g eF coth(eF s) D`, the real exponent multiplying `i`.
    pub quadratic_exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProperTimeKernel {
    pub scalar_amplitude: Complex64,
    pub spin_factor: SpinorMatrix,
    /// `exp(i e int A . dq)` along the straight path; all gauge dependence.
    pub gauge_phase: Complex64,
    pub components: KernelComponents,
}

impl ProperTimeKernel {
    /// Product of the components, which the stored amplitude must equal.
    pub fn recomposed(&self) -> Complex64 {
        let c = &self.components;
        c.prefactor * c.tr_log_term * self.gauge_phase * Complex64::from_polar(1.0, c.quadratic_exponent)
    }

    /// The amplitude with the gauge phase removed.
    pub fn invariant_part(&self) -> Complex64 {
        self.scalar_amplitude / self.gauge_phase
    }

    /// The 4x4 spinor kernel, scalar amplitude times spin factor.
    pub fn spinor(&self) -> SpinorMatrix {
        self.spin_factor * self.scalar_amplitude
    }
}

/// The kernel from `x''` at proper time 0 to `x'` at `s`.
pub fn proper_time_kernel(
    x_end: &Vector4<f64>,
    x_start: &Vector4<f64>,
    s: f64,
    field: &FieldStrength,
    gauge: &dyn Gauge,
) -> Result<ProperTimeKernel> {
    let parts = classical_action(x_end, x_start, s, field, gauge)?;
    let tl = tr_log_sinhc(field, s)?;
    let components = KernelComponents {
        prefactor: Complex64::new(0.0, -1.0 / (16.0 * PI * PI * s * s)),
        tr_log_term: (-0.5 * tl).exp(),
        quadratic_exponent: parts.quadratic,
    };
    let gauge_phase = Complex64::from_polar(1.0, parts.line_integral);
    let algebra = DiracAlgebra::new(field.signature)?;
    let mut kernel = ProperTimeKernel {
        scalar_amplitude: Complex64::new(0.0, 0.0),
        spin_factor: algebra.spin_factor(field, s),
        gauge_phase,
        components,
    };
    kernel.scalar_amplitude = kernel.recomposed();
    if !kernel.scalar_amplitude.is_finite() {
        return Err(Error::non_finite("proper-time kernel"));
    }
    Ok(kernel)
}

/// The 4x4 integrand of the electron Green function at fixed `s`:
///
/// `phi (1/16 pi^2 s^2) [m - 1/2 gamma^mu (g(N + eF) D)_mu] e^{-i m^2 s - L}
/// e^{i/4 D.g.N.D} e^{i (e/2) sigma F s}` with `D = x - x'`.
pub fn green_integrand(
    x: &Vector4<f64>,
    x_prime: &Vector4<f64>,
    s: f64,
    field: &FieldStrength,
    gauge: &dyn Gauge,
    m: f64,
) -> Result<SpinorMatrix> {
    if !m.is_finite() {
        return Err(Error::non_finite("mass"));
    }
    let delta = x - x_prime;
    let (quadratic, _) = quadratic_exponent(&delta, s, field)?;
    let n = coth_kernel(field, s)?;
    let l = 0.5 * tr_log_sinhc(field, s)?;
    let algebra = DiracAlgebra::new(field.signature)?;

    let phi = gauge_phase_factor(x, x_prime, field, gauge);
    let kinetic = field.metric() * (n + field.ef()) * delta;
    let bracket = SpinorMatrix::identity() * Complex64::from(m) - algebra.slash(&kinetic) * Complex64::from(0.5);
    let scalar = phi / (16.0 * PI * PI * s * s)
        * Complex64::from_polar((-l).exp(), quadratic - m * m * s);
    let out = bracket * algebra.spin_factor(field, s) * scalar;
    if out.iter().any(|z| !z.is_finite()) {
        return Err(Error::non_finite("Green-function integrand"));
    }
    Ok(out)
}

/// `sum_k w_k G(s_k)` over caller-supplied real proper-time nodes. No
/// contour or convergence factor is chosen here.
pub fn integrate_green(
    x: &Vector4<f64>,
    x_prime: &Vector4<f64>,
    field: &FieldStrength,
    gauge: &dyn Gauge,
    m: f64,
    nodes: &[(f64, f64)],
) -> Result<SpinorMatrix> {
    nodes.iter().try_fold(SpinorMatrix::zeros(), |acc, &(s, w)| {
        Ok(acc + green_integrand(x, x_prime, s, field, gauge, m)? * Complex64::from(w))
    })
}
