//! Exact non-relativistic propagators built from the classical action and
//! the van Vleck prefactor: the free particle, the harmonic oscillator, and
//! a charged particle in a constant magnetic field along the third axis
//! (symmetric gauge).
//!
//! Square roots use the principal branch, which is the branch continuous
//! from `tau -> 0+` up to the first caustic. Evaluation at or beyond the
//! first caustic is refused with [`Error::Caustic`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::PhysicalConstants;
use crate::special::{x_cot_x, x_over_sin_x};

/// Threshold on `|sin|` below which a kernel is considered singular.
pub const CAUSTIC_EPS: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Gauge phase and gauge-invariant exponent of a magnetic kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDecomposition {
    /// `exp((i e / hbar c) int_L A . dzeta)` along the straight segment.
    pub gauge_phase: Complex64,
    /// Everything in `phase_exponent` that does not depend on the gauge.
    pub invariant_exponent: Complex64,
}

/// A kernel sample `amplitude = prefactor * exp(phase_exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub amplitude: Complex64,
    pub prefactor: Complex64,
    /// The total `i S / hbar`.
    pub phase_exponent: Complex64,
    pub decomposition: Option<KernelDecomposition>,
}

impl KernelValue {
    fn new(prefactor: Complex64, phase_exponent: Complex64) -> Self {
        Self {
            amplitude: prefactor * phase_exponent.exp(),
            prefactor,
            phase_exponent,
            decomposition: None,
        }
    }

    /// `prefactor * exp(invariant_exponent)`, the kernel with the gauge phase removed.
    pub fn invariant_part(&self) -> Option<Complex64> {
        self.decomposition
            .map(|d| self.prefactor * d.invariant_exponent.exp())
    }

    /// Product of independent factors (e.g. transverse times longitudinal).
    fn times(self, other: KernelValue) -> Self {
        let mut out = KernelValue::new(self.prefactor * other.prefactor, self.phase_exponent + other.phase_exponent);
        out.decomposition = match (self.decomposition, other.decomposition) {
            (Some(a), None) => Some(KernelDecomposition {
                gauge_phase: a.gauge_phase,
                invariant_exponent: a.invariant_exponent + other.phase_exponent,
            }),
            (None, Some(b)) => Some(KernelDecomposition {
                gauge_phase: b.gauge_phase,
                invariant_exponent: b.invariant_exponent + self.phase_exponent,
            }),
            (Some(a), Some(b)) => Some(KernelDecomposition {
                gauge_phase: a.gauge_phase * b.gauge_phase,
                invariant_exponent: a.invariant_exponent + b.invariant_exponent,
            }),
            (None, None) => None,
        };
        out
    }
}

fn check_mass(m: f64, hbar: f64) -> Result<()> {
    if !(m > 0.0 && hbar > 0.0 && m.is_finite() && hbar.is_finite()) {
        return Err(Error::invalid("m and hbar must be positive"));
    }
    Ok(())
}

fn check_time(tau: f64, what: &str) -> Result<()> {
    if !tau.is_finite() {
        return Err(Error::non_finite(format!("{what} time")));
    }
    if tau == 0.0 {
        return Err(Error::Coincidence { what: what.into() });
    }
    Ok(())
}

/// Refuses `|theta| >= period/2`, i.e. the first zero of `sin(theta)` with
/// `period = 2 pi`, reporting the nearest singular time `k pi / rate`.
fn first_sheet(theta: f64, rate: f64, tau: f64, what: &str) -> Result<()> {
    let near_zero = theta.abs() > FRAC_PI_2 && theta.sin().abs() < CAUSTIC_EPS;
    if theta.abs() >= PI || near_zero {
        let k = (theta.abs() / PI).round().max(1.0);
        return Err(Error::Caustic {
            what: what.into(),
            parameter: tau,
            nearest: tau.signum() * k * PI / rate.abs(),
        });
    }
    Ok(())
}

/// `sqrt(m / (2 pi i hbar tau)) exp(i m (x - x')^2 / (2 hbar tau))`.
pub fn free_kernel_1d(x: f64, xp: f64, tau: f64, m: f64, hbar: f64) -> Result<KernelValue> {
    check_mass(m, hbar)?;
    check_time(tau, "free kernel")?;
    let pre = (Complex64::new(m, 0.0) / (2.0 * PI * I * hbar * tau)).sqrt();
    let d = x - xp;
    Ok(KernelValue::new(pre, I * (m * d * d / (2.0 * hbar * tau))))
}

/// Free kernel in `d` dimensions as the product of 1D factors.
pub fn free_kernel(x: &[f64], xp: &[f64], tau: f64, m: f64, hbar: f64) -> Result<KernelValue> {
    if x.len() != xp.len() || x.is_empty() {
        return Err(Error::DimensionMismatch { expected: x.len().max(1), found: xp.len() });
    }
    let mut out = free_kernel_1d(x[0], xp[0], tau, m, hbar)?;
    for (a, b) in x.iter().zip(xp).skip(1) {
        out = out.times(free_kernel_1d(*a, *b, tau, m, hbar)?);
    }
    Ok(out)
}

/// Oscillator propagator
/// `sqrt(m w / (2 pi i hbar sin wt)) exp{(i m w / 2 hbar sin wt)[(x^2 + x'^2) cos wt - 2 x x']}`.
///
/// `omega = 0` gives the free kernel exactly.
pub fn ho_kernel(x: f64, xp: f64, tau: f64, m: f64, omega: f64, hbar: f64) -> Result<KernelValue> {
    check_mass(m, hbar)?;
    check_time(tau, "oscillator kernel")?;
    if !omega.is_finite() {
        return Err(Error::non_finite("oscillator frequency"));
    }
    let th = omega * tau;
    first_sheet(th, omega, tau, "oscillator kernel")?;
    // m w / sin(w tau) = (m / tau) * th / sin th
    let d = m / tau * x_over_sin_x(th);
    let pre = (Complex64::new(d, 0.0) / (2.0 * PI * I * hbar)).sqrt();
    let s = m / (2.0 * tau) * (x_cot_x(th) * (x * x + xp * xp) - 2.0 * x_over_sin_x(th) * x * xp);
    Ok(KernelValue::new(pre, I * (s / hbar)))
}

/// The van Vleck determinant `m w / sin(w tau)` of the oscillator.
pub fn ho_van_vleck(tau: f64, m: f64, omega: f64) -> Result<f64> {
    check_time(tau, "oscillator van Vleck determinant")?;
    first_sheet(omega * tau, omega, tau, "oscillator van Vleck determinant")?;
    Ok(m / tau * x_over_sin_x(omega * tau))
}

fn transverse_field(k: &PhysicalConstants) -> Result<f64> {
    k.validate()?;
    if k.b[0] != 0.0 || k.b[1] != 0.0 {
        return Err(Error::invalid("the magnetic kernel needs the field along the third axis"));
    }
    Ok(k.cyclotron_frequency())
}

/// `(e / hbar c) int_L A . dzeta` for `A = B x zeta / 2` along the straight
/// segment from `r'` to `r`: `(e B_3 / 2 hbar c)(x'_1 x_2 - x'_2 x_1)`.
pub fn holonomy_exponent(r: [f64; 2], rp: [f64; 2], k: &PhysicalConstants) -> f64 {
    k.e * k.b[2] / (2.0 * k.hbar * k.c) * (rp[0] * r[1] - rp[1] * r[0])
}

/// `exp(i (e / hbar c) int_L A . dzeta)`, a unit complex number.
pub fn holonomy_phase(r: [f64; 2], rp: [f64; 2], k: &PhysicalConstants) -> Complex64 {
    Complex64::from_polar(1.0, holonomy_exponent(r, rp, k))
}

/// Classical action of the transverse motion,
/// `(m/2)(w/2) cot(w tau/2) |r - r'|^2 + e int_L A . dzeta / c`.
pub fn landau_action(r: [f64; 2], rp: [f64; 2], tau: f64, k: &PhysicalConstants) -> Result<f64> {
    let w = transverse_field(k)?;
    check_time(tau, "magnetic action")?;
    let half = 0.5 * w * tau;
    first_sheet(half, 0.5 * w, tau, "magnetic kernel")?;
    let d2 = (r[0] - rp[0]).powi(2) + (r[1] - rp[1]).powi(2);
    Ok(k.m / (2.0 * tau) * x_cot_x(half) * d2 + k.hbar * holonomy_exponent(r, rp, k))
}

/// Transverse magnetic kernel
/// `(1 / 2 pi i hbar)(m/2)(w / sin(w tau/2)) exp(i S / hbar)` with the
/// gauge phase and invariant exponent reported separately.
pub fn landau_transverse_kernel(
    r: [f64; 2],
    rp: [f64; 2],
    tau: f64,
    k: &PhysicalConstants,
) -> Result<KernelValue> {
    let w = transverse_field(k)?;
    check_time(tau, "magnetic kernel")?;
    let half = 0.5 * w * tau;
    first_sheet(half, 0.5 * w, tau, "magnetic kernel")?;
    let pre = Complex64::new(k.m / tau * x_over_sin_x(half), 0.0) / (2.0 * PI * I * k.hbar);
    let d2 = (r[0] - rp[0]).powi(2) + (r[1] - rp[1]).powi(2);
    let inv = I * (k.m / (2.0 * k.hbar * tau) * x_cot_x(half) * d2);
    let hol = holonomy_exponent(r, rp, k);
    let mut out = KernelValue::new(pre, inv + I * hol);
    out.decomposition = Some(KernelDecomposition {
        gauge_phase: Complex64::from_polar(1.0, hol),
        invariant_exponent: inv,
    });
    Ok(out)
}

/// Full 3D magnetic kernel: transverse part times the free kernel along the field.
pub fn landau_kernel(
    r: [f64; 2],
    rp: [f64; 2],
    x3: f64,
    x3p: f64,
    tau: f64,
    k: &PhysicalConstants,
) -> Result<KernelValue> {
    let t = landau_transverse_kernel(r, rp, tau, k)?;
    Ok(t.times(free_kernel_1d(x3, x3p, tau, k.m, k.hbar)?))
}

/// Nearest caustic time of the magnetic kernel, `2 pi n / |w|`.
pub fn landau_first_caustic(k: &PhysicalConstants) -> Option<f64> {
    let w = k.cyclotron_frequency().abs();
    (w > 0.0).then(|| TAU / w)
}
