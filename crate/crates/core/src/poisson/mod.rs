//! General bracket structures on phase space.
//!
//! A [`PoissonStructure`] is the field of fundamental brackets
//! `sigma_ab(z) = [z_a, z_b]`. The bracket of two observables is
//! `[A, B](z) = dA/dz_a sigma_ab(z) dB/dz_b`, and a Hamiltonian `H` generates
//! the flow `dz_a/dt = sigma_ab(z) dH/dz_b`. Canonical coordinates are the
//! special case of the constant block tensor; pseudocanonical coordinates
//! are reached by pushing a tensor forward through an invertible map.

mod flow;
mod map;
mod observable;
mod point;
mod structure;

use nalgebra::DMatrix;

pub use flow::{evolve, evolve_many, hamiltonian_rhs, HamiltonianSystem, Method, Trajectory};
pub use map::CoordinateMap;
pub use observable::Observable;
pub use point::{default_fd_step, PhasePoint};
pub use structure::{JacobianMode, PoissonStructure};

use crate::error::{Error, Result};

/// Default absolute tolerance for axiom checks.
pub const AXIOM_TOLERANCE: f64 = 1e-8;

/// Relative singular-value threshold below which a matrix is treated as singular.
const SINGULAR_RTOL: f64 = 1e-12;

/// `[A, B](z) = dA/dz_a sigma_ab(z) dB/dz_b`.
pub fn bracket_eval(
    structure: &PoissonStructure,
    a: &Observable,
    b: &Observable,
    z: &PhasePoint,
) -> Result<f64> {
    bracket_eval_slice(structure, a, b, z)
}

pub(crate) fn bracket_eval_slice(
    structure: &PoissonStructure,
    a: &Observable,
    b: &Observable,
    z: &[f64],
) -> Result<f64> {
    let sigma = structure.eval(z)?;
    let ga = a.gradient(z)?;
    let gb = b.gradient(z)?;
    Ok(ga.dot(&(&sigma * gb)))
}

/// `max_ab |sigma_ab + sigma_ba|`.
pub fn antisymmetry_residual(structure: &PoissonStructure, z: &PhasePoint) -> Result<f64> {
    let s = structure.eval(z)?;
    Ok((&s + s.transpose()).amax())
}

/// Residual of the Jacobi identity of the bracket itself,
/// `max_abc |sigma_ad d_d sigma_bc + sigma_bd d_d sigma_ca + sigma_cd d_d sigma_ab|`.
///
/// This is what `[z_a, [z_b, z_c]] + cyclic = 0` expands to, and it is valid
/// for degenerate tensors such as the rigid-body one. Constant tensors
/// short-circuit to zero.
pub fn jacobi_residual(structure: &PoissonStructure, z: &PhasePoint) -> Result<f64> {
    if structure.is_constant() {
        structure.check_dim(z)?;
        return Ok(0.0);
    }
    let sigma = structure.eval(z)?;
    let d = structure.derivative(z)?;
    let n = structure.dim();
    // t[a][(b, c)] = sum_d sigma_ad d_d sigma_bc = [z_a, sigma_bc]
    let t: Vec<DMatrix<f64>> = (0..n)
        .map(|a| {
            (0..n).fold(DMatrix::zeros(n, n), |acc, k| acc + &d[k] * sigma[(a, k)])
        })
        .collect();
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let r = t[a][(b, c)] + t[b][(c, a)] + t[c][(a, b)];
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Cyclic derivative sum `max_abc |d_a sigma_bc + d_b sigma_ca + d_c sigma_ab|`.
///
/// This is the closure condition of a two-form. For an invertible tensor it
/// is the condition on the *inverse* tensor that is equivalent to the Jacobi
/// identity; applied to the bracket tensor itself it is not, e.g. the rigid
/// body tensor gives 3 here while satisfying Jacobi exactly.
pub fn closure_residual(structure: &PoissonStructure, z: &PhasePoint) -> Result<f64> {
    if structure.is_constant() {
        structure.check_dim(z)?;
        return Ok(0.0);
    }
    let d = structure.derivative(z)?;
    let n = structure.dim();
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let r = d[a][(b, c)] + d[b][(c, a)] + d[c][(a, b)];
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// `sigma^{ab}(z)` with `sigma_ac sigma^{cb} = delta_a^b`.
pub fn invert_structure(structure: &PoissonStructure, z: &PhasePoint) -> Result<DMatrix<f64>> {
    let n = structure.dim();
    if n % 2 == 1 {
        return Err(Error::DegenerateStructure {
            reason: format!("odd dimension {n}: antisymmetric matrix has zero determinant"),
        });
    }
    let sigma = structure.eval(z)?;
    if is_numerically_singular(&sigma) {
        return Err(Error::DegenerateStructure {
            reason: "structure matrix is rank deficient".into(),
        });
    }
    let inv = sigma.clone().try_inverse().ok_or_else(|| Error::DegenerateStructure {
        reason: "LU factorization failed".into(),
    })?;
    let residual = (&sigma * &inv - DMatrix::<f64>::identity(n, n)).amax();
    if residual > AXIOM_TOLERANCE {
        return Err(Error::DegenerateStructure {
            reason: format!("inverse residual {residual:e} exceeds tolerance"),
        });
    }
    Ok(inv)
}

pub(crate) fn is_numerically_singular(m: &DMatrix<f64>) -> bool {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    max == 0.0 || min <= SINGULAR_RTOL * max
}

/// Transports a tensor through `z -> z'`:
/// `sigma'_ab(z') = (dz'_a/dz_c)(dz'_b/dz_d) sigma_cd(z)` with `z = map^-1(z')`.
pub fn pushforward_structure(map: &CoordinateMap, structure: &PoissonStructure) -> PoissonStructure {
    let (map, src) = (map.clone(), structure.clone());
    let name = format!("{} via {}", structure.name(), map.name());
    PoissonStructure::try_from_fn(name, structure.dim(), move |z_new| {
        let z = map.inverse(z_new)?;
        let jac = map.jacobian(&z)?;
        if is_numerically_singular(&jac) {
            return Err(Error::NonInvertibleJacobian);
        }
        let sigma = src.eval(&z)?;
        Ok(&jac * sigma * jac.transpose())
    })
}
