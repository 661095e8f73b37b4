use nalgebra::DVector;

use super::observable::Observable;
use super::point::PhasePoint;
use super::structure::PoissonStructure;
use crate::error::{Error, Result};
use crate::par::Execution;

/// A bracket structure, a Hamiltonian and the declared Casimirs.
#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    pub name: String,
    pub structure: PoissonStructure,
    pub hamiltonian: Observable,
    pub casimirs: Vec<Observable>,
}

impl HamiltonianSystem {
    pub fn new(name: impl Into<String>, structure: PoissonStructure, hamiltonian: Observable) -> Self {
        Self {
            name: name.into(),
            structure,
            hamiltonian,
            casimirs: Vec::new(),
        }
    }

    pub fn with_casimir(mut self, c: Observable) -> Self {
        self.casimirs.push(c);
        self
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// `max_k |[C_k, H](z)|`.
    pub fn casimir_residual(&self, z: &PhasePoint) -> Result<f64> {
        self.casimirs.iter().try_fold(0.0_f64, |acc, c| {
            Ok(acc.max(super::bracket_eval(&self.structure, c, &self.hamiltonian, z)?.abs()))
        })
    }
}

/// `dz/dt = sigma(z) grad H(z)`.
pub fn hamiltonian_rhs(system: &HamiltonianSystem, z: &PhasePoint) -> Result<DVector<f64>> {
    rhs_slice(system, z)
}

fn rhs_slice(system: &HamiltonianSystem, z: &[f64]) -> Result<DVector<f64>> {
    let sigma = system.structure.eval(z)?;
    let grad = system.hamiltonian.gradient(z)?;
    Ok(sigma * grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta.
    Rk4,
    /// Explicit midpoint (second order).
    Midpoint,
}

/// Sampled solution with the Hamiltonian and every Casimir logged per step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub hamiltonian: Vec<f64>,
    /// `casimirs[k][step]`.
    pub casimirs: Vec<Vec<f64>>,
    pub casimir_names: Vec<String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory has at least the initial point")
    }

    /// Time series of coordinate `index`.
    pub fn coordinate(&self, index: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[index]).collect()
    }

    pub fn max_abs_drift(series: &[f64]) -> f64 {
        let first = series.first().copied().unwrap_or(0.0);
        series.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
    }

    /// Maximum drift relative to the initial value (absolute if that is zero).
    pub fn max_relative_drift(series: &[f64]) -> f64 {
        let first = series.first().copied().unwrap_or(0.0);
        let scale = if first == 0.0 { 1.0 } else { first.abs() };
        Self::max_abs_drift(series) / scale
    }

    pub fn hamiltonian_drift(&self) -> f64 {
        Self::max_relative_drift(&self.hamiltonian)
    }

    pub fn casimir_drifts(&self) -> Vec<f64> {
        self.casimirs.iter().map(|c| Self::max_relative_drift(c)).collect()
    }
}

fn step(system: &HamiltonianSystem, z: &DVector<f64>, dt: f64, method: Method) -> Result<DVector<f64>> {
    let f = |y: &DVector<f64>| rhs_slice(system, y.as_slice());
    Ok(match method {
        Method::Rk4 => {
            let k1 = f(z)?;
            let k2 = f(&(z + &k1 * (0.5 * dt)))?;
            let k3 = f(&(z + &k2 * (0.5 * dt)))?;
            let k4 = f(&(z + &k3 * dt))?;
            z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
        }
        Method::Midpoint => {
            let k1 = f(z)?;
            let k2 = f(&(z + &k1 * (0.5 * dt)))?;
            z + k2 * dt
        }
    })
}

/// Integrates the bracket flow from `z0` to `t_final` with step `dt`.
///
/// The last step is shortened when `t_final` is not a multiple of `dt`.
pub fn evolve(
    system: &HamiltonianSystem,
    z0: &PhasePoint,
    t_final: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::invalid(format!("final time must be positive, got {t_final}")));
    }
    system.structure.check_dim(z0)?;

    let ratio = t_final / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let steps = steps.max(1);

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        points: Vec::with_capacity(steps + 1),
        hamiltonian: Vec::with_capacity(steps + 1),
        casimirs: vec![Vec::with_capacity(steps + 1); system.casimirs.len()],
        casimir_names: system.casimirs.iter().map(|c| c.name().to_string()).collect(),
    };
    let log = |traj: &mut Trajectory, t: f64, p: PhasePoint| {
        traj.times.push(t);
        traj.hamiltonian.push(system.hamiltonian.value(&p));
        for (k, c) in system.casimirs.iter().enumerate() {
            traj.casimirs[k].push(c.value(&p));
        }
        traj.points.push(p);
    };
    log(&mut traj, 0.0, z0.clone());

    let mut z = z0.as_vector().clone();
    for n in 1..=steps {
        let t_prev = (n - 1) as f64 * dt;
        let t = if n == steps { t_final } else { n as f64 * dt };
        let h = t - t_prev;
        z = step(system, &z, h, method).map_err(|e| match e {
            Error::NonFinite { .. } => Error::BlowUp { step: n, time: t },
            other => other,
        })?;
        let p = PhasePoint::from_vector(z.clone()).map_err(|_| Error::BlowUp { step: n, time: t })?;
        log(&mut traj, t, p);
    }
    Ok(traj)
}

/// Runs [`evolve`] for a batch of initial conditions, independently.
pub fn evolve_many(
    system: &HamiltonianSystem,
    initial: &[PhasePoint],
    t_final: f64,
    dt: f64,
    method: Method,
    exec: Execution,
) -> Vec<Result<Trajectory>> {
    exec.map(initial.len(), |i| evolve(system, &initial[i], t_final, dt, method))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_particle() -> HamiltonianSystem {
        let h = Observable::new("H", |z| 0.5 * z[1] * z[1])
            .with_gradient(|z| DVector::from_vec(vec![0.0, z[1]]));
        HamiltonianSystem::new("free", PoissonStructure::canonical(1), h)
    }

    #[test]
    fn rhs_of_free_particle() {
        let z = PhasePoint::new(vec![0.0, 1.0]).unwrap();
        let v = hamiltonian_rhs(&free_particle(), &z).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn rk4_is_exact_on_linear_flow() {
        let z = PhasePoint::new(vec![0.0, 1.0]).unwrap();
        let t = evolve(&free_particle(), &z, 1.0, 0.1, Method::Rk4).unwrap();
        assert!((t.last()[0] - 1.0).abs() < 1e-14);
        assert_eq!(t.len(), 11);
        assert!(t.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*t.times.last().unwrap(), 1.0);
    }

    #[test]
    fn uneven_final_step() {
        let z = PhasePoint::new(vec![0.0, 1.0]).unwrap();
        let t = evolve(&free_particle(), &z, 0.25, 0.1, Method::Midpoint).unwrap();
        assert_eq!(t.len(), 4);
        assert!((t.last()[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bad_step_sizes_are_rejected() {
        let z = PhasePoint::new(vec![0.0, 1.0]).unwrap();
        assert!(evolve(&free_particle(), &z, 1.0, 0.0, Method::Rk4).is_err());
        assert!(evolve(&free_particle(), &z, -1.0, 0.1, Method::Rk4).is_err());
    }

    #[test]
    fn blow_up_reports_step() {
        // dq/dt = q^2 from q = 1 diverges at t = 1.
        let h = Observable::new("H", |z| z[0] * z[0] * z[1])
            .with_gradient(|z| DVector::from_vec(vec![2.0 * z[0] * z[1], z[0] * z[0]]));
        let sys = HamiltonianSystem::new("blow", PoissonStructure::canonical(1), h);
        let z = PhasePoint::new(vec![1.0, 1.0]).unwrap();
        match evolve(&sys, &z, 5.0, 0.05, Method::Rk4) {
            Err(Error::BlowUp { step, .. }) => assert!(step > 10),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
