//! Concrete bracket systems: the plane pendulum in canonical and extended
//! polar coordinates, a charged particle in a constant magnetic field in
//! canonical `(q, p)` and gauge-invariant `(x, v)` coordinates, the
//! force-free rigid body on its Lie–Poisson structure, and the `L+, L-, L3`
//! realisation of the oscillator algebra on monomials.

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poisson::{
    CoordinateMap, HamiltonianSystem, Observable, PoissonStructure, Trajectory,
};

/// Physical constants shared by every model. All default to 1, with
/// `b = (0, 0, 1)` and principal moments `inertia = (1, 2, 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConstants {
    pub m: f64,
    pub e: f64,
    pub c: f64,
    pub hbar: f64,
    pub g: f64,
    pub l: f64,
    pub b: [f64; 3],
    pub inertia: [f64; 3],
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            m: 1.0,
            e: 1.0,
            c: 1.0,
            hbar: 1.0,
            g: 1.0,
            l: 1.0,
            b: [0.0, 0.0, 1.0],
            inertia: [1.0, 2.0, 3.0],
        }
    }
}

impl PhysicalConstants {
    /// Checks finiteness and the positivity of `m`, `c`, `hbar`.
    pub fn validate(&self) -> Result<()> {
        let all = [self.m, self.e, self.c, self.hbar, self.g, self.l]
            .into_iter()
            .chain(self.b)
            .chain(self.inertia);
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("physical constants must be finite"));
        }
        for (name, v) in [("m", self.m), ("c", self.c), ("hbar", self.hbar)] {
            if v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn require_pendulum(&self) -> Result<()> {
        self.validate()?;
        if self.g <= 0.0 || self.l <= 0.0 {
            return Err(Error::invalid("pendulum needs g > 0 and l > 0"));
        }
        Ok(())
    }

    fn require_inertia(&self) -> Result<()> {
        self.validate()?;
        if self.inertia.iter().any(|&i| i <= 0.0) {
            return Err(Error::invalid("principal moments of inertia must be positive"));
        }
        Ok(())
    }

    pub fn field(&self) -> Vector3<f64> {
        Vector3::from(self.b)
    }

    /// Signed cyclotron frequency `e B_3 / (m c)` about the third axis.
    pub fn cyclotron_frequency(&self) -> f64 {
        self.e * self.b[2] / (self.m * self.c)
    }
}

// ---------------------------------------------------------------- pendulum

/// `H = p_phi^2 / (2 m l^2) - m g l cos(phi)` on `(phi, p_phi)`.
pub fn pendulum_canonical(k: &PhysicalConstants) -> Result<HamiltonianSystem> {
    k.require_pendulum()?;
    let PhysicalConstants { m, g, l, .. } = *k;
    let h = Observable::new("H", move |z| z[1] * z[1] / (2.0 * m * l * l) - m * g * l * z[0].cos())
        .with_gradient(move |z| DVector::from_vec(vec![m * g * l * z[0].sin(), z[1] / (m * l * l)]));
    Ok(HamiltonianSystem::new("pendulum", PoissonStructure::canonical(1), h))
}

/// The pendulum on the extended coordinates `(r, p_r, phi, p_phi)`.
///
/// The structure is block-diagonal with a zero block on `(r, p_r)` and the
/// canonical block on `(phi, p_phi)`, so `r^2` and `p_r` are Casimirs. The
/// returned map sends Cartesian `(x, p_x, y, p_y)` to the extended
/// coordinates; both directions reject `r <= 0`.
pub fn pendulum_extended(k: &PhysicalConstants) -> Result<(HamiltonianSystem, CoordinateMap)> {
    k.require_pendulum()?;
    let PhysicalConstants { m, g, .. } = *k;
    let mut sigma = DMatrix::zeros(4, 4);
    sigma[(2, 3)] = 1.0;
    sigma[(3, 2)] = -1.0;
    let structure = PoissonStructure::constant("pendulum_extended", sigma);
    let h = Observable::new("H'", move |z| {
        let (r, pr, phi, pphi) = (z[0], z[1], z[2], z[3]);
        (pr * pr + pphi * pphi / (r * r)) / (2.0 * m) - m * g * r * phi.cos()
    })
    .with_gradient(move |z| {
        let (r, pr, phi, pphi) = (z[0], z[1], z[2], z[3]);
        DVector::from_vec(vec![
            -pphi * pphi / (m * r * r * r) - m * g * phi.cos(),
            pr / m,
            m * g * r * phi.sin(),
            pphi / (m * r * r),
        ])
    });
    let c1 = Observable::new("r^2", |z| z[0] * z[0])
        .with_gradient(|z| DVector::from_vec(vec![2.0 * z[0], 0.0, 0.0, 0.0]));
    let c2 = Observable::new("p_r", |z| z[1])
        .with_gradient(|_| DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]));
    let system = HamiltonianSystem::new("pendulum_extended", structure, h)
        .with_casimir(c1)
        .with_casimir(c2);
    Ok((system, polar_map()))
}

/// `(x, p_x, y, p_y) -> (r, p_r, phi, p_phi)`, the point transformation to
/// plane polar coordinates with its induced momenta.
pub fn polar_map() -> CoordinateMap {
    CoordinateMap::new(
        "cartesian->polar",
        4,
        |w| {
            let (x, px, y, py) = (w[0], w[1], w[2], w[3]);
            let r = x.hypot(y);
            if r <= 0.0 {
                return Err(Error::OutsideDomain { reason: "r = 0 has no polar angle".into() });
            }
            Ok(DVector::from_vec(vec![r, (x * px + y * py) / r, y.atan2(x), x * py - y * px]))
        },
        |z| {
            let (r, pr, phi, pphi) = (z[0], z[1], z[2], z[3]);
            if r <= 0.0 {
                return Err(Error::OutsideDomain { reason: format!("r = {r} must be positive") });
            }
            let (s, c) = phi.sin_cos();
            Ok(DVector::from_vec(vec![
                r * c,
                pr * c - pphi / r * s,
                r * s,
                pr * s + pphi / r * c,
            ]))
        },
    )
}

// -------------------------------------------------------- charged particle

/// Symmetric-gauge potential `A(q) = B x q / 2`.
pub fn vector_potential(b: &Vector3<f64>, q: &Vector3<f64>) -> Vector3<f64> {
    0.5 * b.cross(q)
}

/// `d A_i / d q_j` for the symmetric gauge.
fn potential_jacobian(b: &Vector3<f64>) -> nalgebra::Matrix3<f64> {
    0.5 * b.cross_matrix()
}

/// `H = |p - (e/c) A(q)|^2 / (2m)` on `(q_1, q_2, q_3, p_1, p_2, p_3)`.
pub fn charged_particle_canonical(k: &PhysicalConstants) -> Result<HamiltonianSystem> {
    k.validate()?;
    let PhysicalConstants { m, e, c, .. } = *k;
    let b = k.field();
    let kinetic = move |z: &[f64]| {
        let q = Vector3::new(z[0], z[1], z[2]);
        let p = Vector3::new(z[3], z[4], z[5]);
        p - vector_potential(&b, &q) * (e / c)
    };
    let jac = potential_jacobian(&b);
    let h = Observable::new("H", move |z| kinetic(z).norm_squared() / (2.0 * m)).with_gradient(
        move |z| {
            let pi = kinetic(z);
            let dq = -(e / (c * m)) * jac.transpose() * pi;
            DVector::from_vec(vec![dq[0], dq[1], dq[2], pi[0] / m, pi[1] / m, pi[2] / m])
        },
    );
    Ok(HamiltonianSystem::new("charged_canonical", PoissonStructure::canonical(3), h))
}

/// `Omega_ij = (e / m c) eps_ijk B_k`.
pub fn cyclotron_matrix(k: &PhysicalConstants) -> nalgebra::Matrix3<f64> {
    // eps_ijk B_k is minus the cross-product matrix of B.
    -(k.e / (k.m * k.c)) * k.field().cross_matrix()
}

/// The gauge-invariant system on `(x_1, x_2, x_3, v_1, v_2, v_3)`:
/// `sigma' = (1/m) [[0, 1], [-1, Omega]]`, `H' = m v^2 / 2`.
///
/// The returned map is `(q, p) -> (x = q, v = (p - (e/c) A(q)) / m)`.
pub fn charged_particle_noncanonical(
    k: &PhysicalConstants,
) -> Result<(HamiltonianSystem, CoordinateMap)> {
    k.validate()?;
    let PhysicalConstants { m, e, c, .. } = *k;
    let omega = cyclotron_matrix(k);
    let mut sigma = DMatrix::zeros(6, 6);
    for i in 0..3 {
        sigma[(i, 3 + i)] = 1.0 / m;
        sigma[(3 + i, i)] = -1.0 / m;
        for j in 0..3 {
            sigma[(3 + i, 3 + j)] = omega[(i, j)] / m;
        }
    }
    let structure = PoissonStructure::constant("charged_noncanonical", sigma);
    let h = Observable::new("H'", move |z| 0.5 * m * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5]))
        .with_gradient(move |z| DVector::from_vec(vec![0.0, 0.0, 0.0, m * z[3], m * z[4], m * z[5]]));
    let system = HamiltonianSystem::new("charged_noncanonical", structure, h);

    let b = k.field();
    let jac = potential_jacobian(&b);
    let map = CoordinateMap::new(
        "(q,p)->(x,v)",
        6,
        move |w| {
            let q = Vector3::new(w[0], w[1], w[2]);
            let p = Vector3::new(w[3], w[4], w[5]);
            let v = (p - vector_potential(&b, &q) * (e / c)) / m;
            Ok(DVector::from_vec(vec![q[0], q[1], q[2], v[0], v[1], v[2]]))
        },
        move |z| {
            let x = Vector3::new(z[0], z[1], z[2]);
            let v = Vector3::new(z[3], z[4], z[5]);
            let p = v * m + vector_potential(&b, &x) * (e / c);
            Ok(DVector::from_vec(vec![x[0], x[1], x[2], p[0], p[1], p[2]]))
        },
    )
    .with_jacobian(move |_| {
        let mut j = DMatrix::zeros(6, 6);
        for i in 0..3 {
            j[(i, i)] = 1.0;
            j[(3 + i, 3 + i)] = 1.0 / m;
            for l in 0..3 {
                j[(3 + i, l)] = -(e / (m * c)) * jac[(i, l)];
            }
        }
        Ok(j)
    });
    Ok((system, map))
}

/// Transverse reduction on `(x_1, x_2, v_1, v_2)` for a field along the
/// third axis: `sigma = (1/m) [[0, 1], [-1, (eB/mc) eps]]` with
/// `eps = [[0, 1], [-1, 0]]`.
pub fn charged_particle_transverse(k: &PhysicalConstants) -> Result<HamiltonianSystem> {
    k.validate()?;
    let (m, w) = (k.m, k.cyclotron_frequency());
    let mut sigma = DMatrix::zeros(4, 4);
    for i in 0..2 {
        sigma[(i, 2 + i)] = 1.0 / m;
        sigma[(2 + i, i)] = -1.0 / m;
    }
    sigma[(2, 3)] = w / m;
    sigma[(3, 2)] = -w / m;
    let h = Observable::new("H_perp", move |z| 0.5 * m * (z[2] * z[2] + z[3] * z[3]))
        .with_gradient(move |z| DVector::from_vec(vec![0.0, 0.0, m * z[2], m * z[3]]));
    Ok(HamiltonianSystem::new(
        "charged_transverse",
        PoissonStructure::constant("charged_transverse", sigma),
        h,
    ))
}

// -------------------------------------------------------------- rigid body

/// `sigma^{ab} = -eps^{abc} K_c` as a matrix.
pub fn rigid_body_tensor(k: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0])
}

/// Force-free rigid body on body-frame angular momentum `K`, with
/// `H' = sum K_i^2 / (2 I_i)` and Casimir `|K|^2`.
pub fn rigid_body(k: &PhysicalConstants) -> Result<HamiltonianSystem> {
    k.require_inertia()?;
    let inertia = k.inertia;
    let structure = PoissonStructure::from_fn("rigid_body", 3, rigid_body_tensor).with_derivative(|_| {
        (0..3)
            .map(|g| {
                let mut e = [0.0; 3];
                e[g] = 1.0;
                rigid_body_tensor(&e)
            })
            .collect()
    });
    let h = Observable::new("H'", move |z| {
        (0..3).map(|i| z[i] * z[i] / (2.0 * inertia[i])).sum()
    })
    .with_gradient(move |z| DVector::from_fn(3, |i, _| z[i] / inertia[i]));
    let c = Observable::new("|K|^2", |z| z[0] * z[0] + z[1] * z[1] + z[2] * z[2])
        .with_gradient(|z| DVector::from_fn(3, |i, _| 2.0 * z[i]));
    Ok(HamiltonianSystem::new("rigid_body", structure, h).with_casimir(c))
}

/// Maximum over the interior samples and index pairs of
/// `|(I_i - I_j) w_i w_j - sum_k eps_ijk I_k dw_k/dt|` with `w_i = K_i / I_i`
/// and `dw/dt` from a five-point central difference along the trajectory.
///
/// The trajectory must be sampled at uniform times with at least 5 points.
pub fn euler_residual(inertia: [f64; 3], traj: &Trajectory) -> Result<f64> {
    let n = traj.len();
    if n < 5 {
        return Err(Error::invalid("euler residual needs at least 5 samples"));
    }
    let dt = traj.times[1] - traj.times[0];
    let omega = |s: usize, i: usize| traj.points[s][i] / inertia[i];
    let mut worst = 0.0_f64;
    for s in 2..n - 2 {
        let h = traj.times[s + 1] - traj.times[s];
        if (h - dt).abs() > 1e-9 * dt {
            return Err(Error::invalid("euler residual needs uniformly sampled times"));
        }
        let dw = |k: usize| {
            (-omega(s + 2, k) + 8.0 * omega(s + 1, k) - 8.0 * omega(s - 1, k) + omega(s - 2, k))
                / (12.0 * dt)
        };
        let d = [dw(0), dw(1), dw(2)];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            // eps_ijk = +1 for the cyclic triples, and (i, j) <-> (j, i) just
            // flips the sign of the whole expression.
            let r = (inertia[i] - inertia[j]) * omega(s, i) * omega(s, j) - inertia[k] * d[k];
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

// ------------------------------------------------------- oscillator algebra

/// Commutator residuals of `L+ = x^2/2`, `L- = -d^2/dx^2 / 2`,
/// `L3 = x d/dx / 2 + 1/4` on the monomials `x^n, n <= max_degree`,
/// restricted to the subspace `n <= max_degree - 2` on which every product
/// stays inside the basis.
///
/// The operators are stored multiplied by 4 so that every entry is an
/// integer and the commutators are exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatorAlgebraReport {
    pub max_degree: usize,
    /// `max |[L+, L-] - 2 L3|`.
    pub plus_minus_residual: f64,
    /// `max |[L3, L+] - L+|`.
    pub l3_plus_residual: f64,
    /// `max |[L3, L-] + L-|`.
    pub l3_minus_residual: f64,
    /// `max |[L3, L-] - L-|`, the residual of the all-plus reading.
    pub l3_minus_residual_plus_sign: f64,
    /// `s` with `[L3, L+] = s L+` on the subspace, if such an `s` exists.
    pub l3_plus_sign: Option<i64>,
    /// `s` with `[L3, L-] = s L-` on the subspace, if such an `s` exists.
    pub l3_minus_sign: Option<i64>,
    /// `L3 x^0`, which should be `1/4`.
    pub l3_on_constant: f64,
}

impl OscillatorAlgebraReport {
    pub fn passed(&self) -> bool {
        self.plus_minus_residual == 0.0 && self.l3_plus_residual == 0.0 && self.l3_minus_residual == 0.0
    }
}

type IMat = Vec<Vec<i64>>;

fn imul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn icomm(a: &IMat, b: &IMat) -> IMat {
    let (ab, ba) = (imul(a, b), imul(b, a));
    ab.iter()
        .zip(&ba)
        .map(|(r1, r2)| r1.iter().zip(r2).map(|(x, y)| x - y).collect())
        .collect()
}

/// `max |a - s b|` over columns `0..=cols`.
fn ires(a: &IMat, b: &IMat, s: i64, cols: usize) -> i64 {
    let mut worst = 0;
    for (ra, rb) in a.iter().zip(b) {
        for j in 0..=cols {
            worst = worst.max((ra[j] - s * rb[j]).abs());
        }
    }
    worst
}

fn isign(a: &IMat, b: &IMat, cols: usize) -> Option<i64> {
    [-1, 1, 0].into_iter().find(|&s| ires(a, b, s, cols) == 0)
}

pub fn oscillator_algebra_check(max_degree: usize) -> Result<OscillatorAlgebraReport> {
    if max_degree < 2 {
        return Err(Error::invalid("max_degree must be at least 2"));
    }
    let d = max_degree + 1;
    let zero = || vec![vec![0_i64; d]; d];
    // Column n holds the image of x^n; entry (row k, col n) is the
    // coefficient of x^k.
    let (mut lp, mut lm, mut l3) = (zero(), zero(), zero());
    for n in 0..d {
        if n + 2 < d {
            lp[n + 2][n] = 2; // 4 * x^2/2
        }
        if n >= 2 {
            lm[n - 2][n] = -2 * (n as i64) * (n as i64 - 1); // 4 * -(n(n-1)/2)
        }
        l3[n][n] = 2 * n as i64 + 1; // 4 * (n/2 + 1/4)
    }
    let cols = max_degree - 2;
    // [4A, 4B] = 16 [A, B]; compare against 16 * (target) = 4 * (4 target).
    let scale = 16.0;
    let pm = icomm(&lp, &lm);
    let l3_times_8: IMat = l3.iter().map(|r| r.iter().map(|x| 8 * x).collect()).collect();
    let c3p = icomm(&l3, &lp);
    let c3m = icomm(&l3, &lm);
    let lp4: IMat = lp.iter().map(|r| r.iter().map(|x| 4 * x).collect()).collect();
    let lm4: IMat = lm.iter().map(|r| r.iter().map(|x| 4 * x).collect()).collect();
    Ok(OscillatorAlgebraReport {
        max_degree,
        plus_minus_residual: ires(&pm, &l3_times_8, 1, cols) as f64 / scale,
        l3_plus_residual: ires(&c3p, &lp4, 1, cols) as f64 / scale,
        l3_minus_residual: ires(&c3m, &lm4, -1, cols) as f64 / scale,
        l3_minus_residual_plus_sign: ires(&c3m, &lm4, 1, cols) as f64 / scale,
        l3_plus_sign: isign(&c3p, &lp4, cols),
        l3_minus_sign: isign(&c3m, &lm4, cols),
        l3_on_constant: l3[0][0] as f64 / 4.0,
    })
}

/// Identifiers of the systems the CLI can simulate.
pub const MODEL_IDS: [&str; 6] = [
    "pendulum",
    "pendulum_extended",
    "charged_canonical",
    "charged_noncanonical",
    "charged_transverse",
    "rigid_body",
];

/// Looks up a model by id.
pub fn by_id(id: &str, k: &PhysicalConstants) -> Result<HamiltonianSystem> {
    match id {
        "pendulum" => pendulum_canonical(k),
        "pendulum_extended" => pendulum_extended(k).map(|(s, _)| s),
        "charged_canonical" => charged_particle_canonical(k),
        "charged_noncanonical" => charged_particle_noncanonical(k).map(|(s, _)| s),
        "charged_transverse" => charged_particle_transverse(k),
        "rigid_body" => rigid_body(k),
        other => Err(Error::Config(format!(
            "unknown model id '{other}' (expected one of {})",
            MODEL_IDS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{bracket_eval, evolve, hamiltonian_rhs, invert_structure, Method, PhasePoint};

    fn pt(v: &[f64]) -> PhasePoint {
        PhasePoint::from_slice(v).unwrap()
    }

    #[test]
    fn pendulum_energy_at_rest() {
        let sys = pendulum_canonical(&PhysicalConstants::default()).unwrap();
        assert_eq!(sys.hamiltonian.value(&[0.0, 0.0]), -1.0);
    }

    #[test]
    fn extended_hamiltonian_reduces_on_the_constraint() {
        let k = PhysicalConstants { l: 1.7, m: 0.8, ..Default::default() };
        let (ext, _) = pendulum_extended(&k).unwrap();
        let can = pendulum_canonical(&k).unwrap();
        for &(phi, p) in &[(0.3, 0.1), (-1.2, 2.0), (3.0, -0.4)] {
            let a = ext.hamiltonian.value(&[k.l, 0.0, phi, p]);
            let b = can.hamiltonian.value(&[phi, p]);
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn polar_map_round_trip_and_domain() {
        let map = polar_map();
        assert!(map.roundtrip_error(&[0.3, -1.0, 0.8, 0.25]).unwrap() < 1e-12);
        assert!(matches!(map.forward(&[0.0, 1.0, 0.0, 2.0]), Err(Error::OutsideDomain { .. })));
        assert!(matches!(map.inverse(&[-1.0, 0.0, 0.0, 0.0]), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn noncanonical_fundamental_brackets() {
        let k = PhysicalConstants { m: 2.0, ..Default::default() };
        let (sys, _) = charged_particle_noncanonical(&k).unwrap();
        let z = pt(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let x = |i| Observable::coordinate(i);
        for i in 0..3 {
            for j in 0..3 {
                let v = bracket_eval(&sys.structure, &x(i), &x(3 + j), &z).unwrap();
                assert_eq!(v, if i == j { 0.5 } else { 0.0 });
            }
        }
        // [v1, v2] = (e / m^2 c) eps_123 B_3
        let v12 = bracket_eval(&sys.structure, &x(3), &x(4), &z).unwrap();
        assert!((v12 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn noncanonical_unit_bracket_with_unit_constants() {
        let (sys, _) = charged_particle_noncanonical(&PhysicalConstants::default()).unwrap();
        let v = bracket_eval(
            &sys.structure,
            &Observable::coordinate(3),
            &Observable::coordinate(4),
            &pt(&[0.0; 6]),
        )
        .unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn noncanonical_inverse_block_form() {
        let k = PhysicalConstants { m: 1.5, b: [0.2, -0.4, 1.1], ..Default::default() };
        let (sys, _) = charged_particle_noncanonical(&k).unwrap();
        let z = pt(&[0.0; 6]);
        let inv = invert_structure(&sys.structure, &z).unwrap();
        // sigma'^-1 = m [[Omega, -1], [1, 0]]
        let om = cyclotron_matrix(&k);
        for i in 0..3 {
            for j in 0..3 {
                assert!((inv[(i, j)] - k.m * om[(i, j)]).abs() < 1e-12);
                let d = if i == j { k.m } else { 0.0 };
                assert!((inv[(i, 3 + j)] + d).abs() < 1e-12);
                assert!((inv[(3 + i, j)] - d).abs() < 1e-12);
                assert!(inv[(3 + i, 3 + j)].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lorentz_force_direction() {
        let (sys, _) = charged_particle_noncanonical(&PhysicalConstants::default()).unwrap();
        let f = hamiltonian_rhs(&sys, &pt(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(f.as_slice(), &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn canonical_energy_at_origin() {
        let sys = charged_particle_canonical(&PhysicalConstants::default()).unwrap();
        assert_eq!(sys.hamiltonian.value(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]), 0.5);
    }

    #[test]
    fn rigid_body_rhs_and_bracket() {
        let sys = rigid_body(&PhysicalConstants::default()).unwrap();
        let f = hamiltonian_rhs(&sys, &pt(&[0.0, 2.0, 3.0])).unwrap();
        assert!((f[0] + 1.0).abs() < 1e-15);
        let v = bracket_eval(&sys.structure, &Observable::coordinate(0), &Observable::coordinate(1), &pt(&[1.0, 2.0, 3.0]))
            .unwrap();
        assert_eq!(v, -3.0);
    }

    #[test]
    fn symmetric_top_precession() {
        let k = PhysicalConstants { inertia: [1.0, 1.0, 2.0], ..Default::default() };
        let sys = rigid_body(&k).unwrap();
        let t = std::f64::consts::TAU;
        let traj = evolve(&sys, &pt(&[1.0, 0.0, 1.0]), t, 1e-3, Method::Rk4).unwrap();
        let end = traj.last();
        // rate K3 (1/I1 - 1/I3) = 1/2; the sign follows from K1' = (1/I3 - 1/I2) K2 K3.
        let ang = 0.5 * t;
        assert!((end[0] - ang.cos()).abs() < 1e-9);
        assert!((end[1] - ang.sin()).abs() < 1e-9);
        assert!((end[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillator_commutators() {
        let r = oscillator_algebra_check(16).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.l3_plus_sign, Some(1));
        assert_eq!(r.l3_minus_sign, Some(-1));
        assert!(r.l3_minus_residual_plus_sign > 0.0);
        assert_eq!(r.l3_on_constant, 0.25);
        assert!(oscillator_algebra_check(1).is_err());
    }

    #[test]
    fn unknown_model_id() {
        assert!(matches!(by_id("nope", &PhysicalConstants::default()), Err(Error::Config(_))));
        for id in MODEL_IDS {
            assert!(by_id(id, &PhysicalConstants::default()).is_ok());
        }
    }
}
