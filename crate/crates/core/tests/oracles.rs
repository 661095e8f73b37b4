//! Closed-form propagators and actions against the brute-force verifiers.

use liebracket::models::PhysicalConstants;
use liebracket::oracle::{self, GridSpec, HamiltonianSpec, TrotterSystem};
use liebracket::poisson::Observable;
use liebracket::proper_time::{build_field, FieldStrength, Signature, SymmetricGauge};
use liebracket::semiclassical as sc;
use liebracket::{verify, Error, Execution, Result};
use nalgebra::{DVector, Vector3, Vector4};
use num_complex::Complex64;

fn free(x: &[f64], xp: &[f64], t: f64) -> Result<Complex64> {
    Ok(sc::free_kernel(x, xp, t, 1.0, 1.0)?.amplitude)
}

fn ho(x: &[f64], xp: &[f64], t: f64) -> Result<Complex64> {
    Ok(sc::ho_kernel(x[0], xp[0], t, 1.0, 1.0, 1.0)?.amplitude)
}

fn landau(x: &[f64], xp: &[f64], t: f64) -> Result<Complex64> {
    let k = PhysicalConstants::default();
    Ok(sc::landau_transverse_kernel([x[0], x[1]], [xp[0], xp[1]], t, &k)?.amplitude)
}

#[test]
fn sliced_free_chain_is_exact() {
    let k = PhysicalConstants { m: 1.4, hbar: 0.8, ..Default::default() };
    for n in [2, 5, 64, 128] {
        let lat = oracle::trotter_kernel(TrotterSystem::Free, &[0.3, -0.1], &[-0.5, 0.4], 0.7, n, &k).unwrap();
        let ex = sc::free_kernel(&[0.3, -0.1], &[-0.5, 0.4], 0.7, k.m, k.hbar).unwrap().amplitude;
        assert!((lat - ex).norm() < 1e-12 * ex.norm(), "n = {n}");
    }
}

#[test]
fn sliced_chains_converge_at_second_order() {
    let k = PhysicalConstants::default();
    let exact = sc::ho_kernel(0.3, -0.2, 1.0, 1.0, 1.0, 1.0).unwrap().amplitude;
    let (ratio, dev) =
        verify::trotter_ratio_deviation(TrotterSystem::Ho { omega: 1.0 }, &[0.3], &[-0.2], 1.0, &k, exact).unwrap();
    assert!(dev <= 0.2, "oscillator ratio {ratio}");

    let exact = sc::landau_transverse_kernel([0.3, -0.4], [-0.2, 0.1], 1.0, &k).unwrap().amplitude;
    let (ratio, dev) =
        verify::trotter_ratio_deviation(TrotterSystem::Landau2d, &[0.3, -0.4], &[-0.2, 0.1], 1.0, &k, exact)
            .unwrap();
    assert!(dev <= 0.2, "magnetic ratio {ratio}");
}

#[test]
fn free_semigroup() {
    let r = oracle::semigroup_check(&free, 0.5, 0.5, &GridSpec::semigroup_1d(), Execution::default()).unwrap();
    assert!(r.max_deviation < 1e-3, "{r:?}");
}

#[test]
fn oscillator_semigroup() {
    let r = oracle::semigroup_check(&ho, 0.3, 0.3, &GridSpec::semigroup_1d(), Execution::default()).unwrap();
    assert!(r.max_deviation < 1e-3, "{r:?}");
}

#[test]
fn magnetic_semigroup() {
    let r = oracle::semigroup_check(&landau, 0.2, 0.2, &GridSpec::semigroup_2d(), Execution::default()).unwrap();
    assert!(r.max_deviation < 5e-3, "{r:?}");
}

#[test]
fn semigroup_rejects_a_wrong_kernel() {
    // The free kernel with the wrong mass in the composition must not pass.
    let wrong = |x: &[f64], xp: &[f64], t: f64| Ok(sc::free_kernel(x, xp, t, 1.0 + 0.2 * t, 1.0)?.amplitude);
    let r = oracle::semigroup_check(&wrong, 0.5, 0.5, &GridSpec::semigroup_1d(), Execution::default()).unwrap();
    assert!(r.max_deviation > 1e-2, "{r:?}");
}

#[test]
fn schrodinger_residuals() {
    let k = PhysicalConstants::default();
    let ex = Execution::default();
    let r = oracle::schrodinger_residual(&free, &HamiltonianSpec::free(&k), &[0.3], 1.0, &GridSpec::schrodinger_1d(), ex);
    assert!(r.unwrap() < 1e-5);
    let r = oracle::schrodinger_residual(&ho, &HamiltonianSpec::ho(&k, 1.0), &[0.3], 1.0, &GridSpec::schrodinger_1d(), ex);
    assert!(r.unwrap() < 1e-4);
    let r = oracle::schrodinger_residual(
        &landau,
        &HamiltonianSpec::landau(&k),
        &[0.2, -0.1],
        1.0,
        &GridSpec::schrodinger_2d(),
        ex,
    );
    assert!(r.unwrap() < 1e-4);
}

#[test]
fn schrodinger_residual_detects_a_sign_error() {
    let k = PhysicalConstants::default();
    // Opposite field direction in the kernel than in the Hamiltonian.
    let flipped = |x: &[f64], xp: &[f64], t: f64| {
        let k = PhysicalConstants { b: [0.0, 0.0, -1.0], ..Default::default() };
        Ok(sc::landau_transverse_kernel([x[0], x[1]], [xp[0], xp[1]], t, &k)?.amplitude)
    };
    let r = oracle::schrodinger_residual(
        &flipped,
        &HamiltonianSpec::landau(&k),
        &[0.2, -0.1],
        1.0,
        &GridSpec::schrodinger_2d(),
        Execution::default(),
    )
    .unwrap();
    assert!(r > 1e-2, "{r}");
}

#[test]
fn magnetic_action_solves_hamilton_jacobi() {
    let k = PhysicalConstants { m: 1.3, b: [0.0, 0.0, 0.7], ..Default::default() };
    let action = |x: &[f64], xp: &[f64], t: f64| sc::landau_action([x[0], x[1]], [xp[0], xp[1]], t, &k);
    let r = oracle::hamilton_jacobi_residual(
        &action,
        &HamiltonianSpec::landau(&k),
        &[0.2, -0.1],
        1.0,
        &GridSpec::schrodinger_2d(),
        Execution::default(),
    )
    .unwrap();
    assert!(r < 1e-6, "{r}");
}

/// `int K(x, x'; tau) psi(x') dx'` for a Gaussian `psi`, by the trapezoid
/// rule on a grid that resolves the kernel's phase.
fn smeared(kernel: &dyn Fn(f64, f64, f64) -> Complex64, x: f64, tau: f64) -> Complex64 {
    let (lo, hi) = (-12.0, 12.0);
    let h = 0.1 * tau / (hi - lo);
    let n = ((hi - lo) / h).round() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let xp = lo + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += kernel(x, xp, tau) * (w * (-0.5 * xp * xp).exp());
    }
    acc * h
}

#[test]
fn short_time_kernels_act_as_identity_with_linear_error() {
    let free1 = |x: f64, xp: f64, t: f64| sc::free_kernel_1d(x, xp, t, 1.0, 1.0).unwrap().amplitude;
    let ho1 = |x: f64, xp: f64, t: f64| sc::ho_kernel(x, xp, t, 1.0, 1.0, 1.0).unwrap().amplitude;
    for kernel in [&free1 as &dyn Fn(f64, f64, f64) -> Complex64, &ho1] {
        let x = 0.4;
        let psi = (-0.5 * x * x as f64).exp();
        let e1 = (smeared(kernel, x, 0.04) - psi).norm();
        let e2 = (smeared(kernel, x, 0.02) - psi).norm();
        assert!(e1 < 0.05, "{e1}");
        let order = oracle::observed_order(e1, e2);
        assert!((order - 1.0).abs() < 0.1, "order {order}");
    }
}

#[test]
fn free_normalisation() {
    assert!(verify::free_normalization(0.3, 1.0, 1.0, 1.0).unwrap() < 1e-6);
    assert!(verify::free_normalization(-1.0, 0.4, 2.0, 0.7).unwrap() < 1e-6);
}

#[test]
fn gradient_oracle() {
    // Quadratic form with its analytic gradient.
    let f = |z: &[f64]| Ok(z[0] * z[0] + 3.0 * z[0] * z[1] - z[1] * z[1]);
    let g = |z: &[f64]| Ok(DVector::from_vec(vec![2.0 * z[0] + 3.0 * z[1], 3.0 * z[0] - 2.0 * z[1]]));
    assert!(oracle::gradient_check(f, g, &[vec![0.2, -1.3], vec![2.0, 0.5]], 1e-3).unwrap() < 1e-10);

    // Action against its closed-form gradient.
    let field = build_field(Vector3::new(0.2, -0.3, 0.1), Vector3::new(0.4, 0.1, -0.2), 0.9, Signature::MostlyMinus);
    let a = Vector4::new(0.1, -0.2, 0.3, 0.4);
    let gauge = SymmetricGauge { center: Vector4::new(0.5, 0.0, -0.5, 0.2) };
    let dev = oracle::gradient_check(
        |x| Ok(liebracket::proper_time::classical_action(&Vector4::from_column_slice(x), &a, 0.8, &field, &gauge)?.scalar()),
        |x| {
            let g = liebracket::proper_time::action_gradient(&Vector4::from_column_slice(x), &a, 0.8, &field, &gauge)?;
            Ok(DVector::from_column_slice(g.as_slice()))
        },
        &[vec![0.7, 0.3, -0.4, 0.1], vec![-0.5, 0.9, 0.2, -0.6]],
        1e-5,
    )
    .unwrap();
    assert!(dev < 1e-6, "{dev}");
}

#[test]
fn finite_difference_gradient_is_second_order() {
    let obs = Observable::new("f", |z| (1.3 * z[0]).sin() * z[1].exp());
    let z = [0.4, -0.3];
    let exact = [1.3 * (1.3 * 0.4f64).cos() * (-0.3f64).exp(), (1.3 * 0.4f64).sin() * (-0.3f64).exp()];
    let err = |h: f64| {
        let g = obs.fd_gradient(&z, h).unwrap();
        (g[0] - exact[0]).abs().max((g[1] - exact[1]).abs())
    };
    let order = oracle::observed_order(err(1e-2), err(5e-3));
    assert!((order - 2.0).abs() < 0.1, "order {order}");
}

#[test]
fn worldline_quadrature_reproduces_the_closed_form_action() {
    let f = build_field(Vector3::new(0.3, 0.1, -0.2), Vector3::new(-0.1, 0.4, 0.2), 1.2, Signature::MostlyPlus);
    let (a, b) = (Vector4::new(0.0, 0.1, 0.2, -0.3), Vector4::new(0.5, -0.4, 0.3, 0.2));
    let g = SymmetricGauge { center: Vector4::new(0.3, 0.3, 0.3, 0.3) };
    let (dev, shoot) = verify::action_quadrature_deviation(&b, &a, 1.1, &f, &g, 2000).unwrap();
    assert!(dev < 1e-8 && shoot < 1e-9, "{dev} {shoot}");
    // With no field the worldline is straight and the action purely kinetic.
    let q = oracle::worldline_action(&b, &a, 0.7, &FieldStrength::zero(Signature::MostlyMinus), &g, 200).unwrap();
    let d = b - a;
    let free = (d[0] * d[0] - d[1] * d[1] - d[2] * d[2] - d[3] * d[3]) / (4.0 * 0.7);
    assert!((q.total() - free).abs() < 1e-12, "{} vs {free}", q.total());
}

#[test]
fn holonomy_quadrature_agrees_with_the_flux() {
    let k = PhysicalConstants { e: 0.8, b: [0.0, 0.0, 1.6], c: 2.0, hbar: 0.5, ..Default::default() };
    let (r, rp) = ([1.2, -0.3], [-0.4, 0.9]);
    let quad = oracle::holonomy_quadrature([r[0], r[1], 0.0], [rp[0], rp[1], 1.0], &k, 3);
    let flux = k.e * k.b[2] / (k.hbar * k.c) * oracle::shoelace_area(&[[0.0, 0.0], rp, r]);
    assert!((quad - flux).abs() < 1e-10);
    assert!((sc::holonomy_exponent(r, rp, &k) - quad).abs() < 1e-10);
}

#[test]
fn oracles_are_deterministic_across_execution_modes() {
    let grid = GridSpec::uniform(1, -40.0, 40.0, 20_001, 1e-3, &[1e-1, 5e-2]);
    let a = oracle::semigroup_check(&free, 0.5, 0.5, &grid, Execution::Sequential).unwrap();
    let b = oracle::semigroup_check(&free, 0.5, 0.5, &grid, Execution::default()).unwrap();
    assert_eq!(a, b);
    let k = PhysicalConstants::default();
    let spec = HamiltonianSpec::landau(&k);
    let s1 = oracle::schrodinger_residual(&landau, &spec, &[0.2, -0.1], 1.0, &GridSpec::schrodinger_2d(), Execution::Sequential);
    let s2 = oracle::schrodinger_residual(&landau, &spec, &[0.2, -0.1], 1.0, &GridSpec::schrodinger_2d(), Execution::default());
    assert_eq!(s1.unwrap().to_bits(), s2.unwrap().to_bits());
}

#[test]
fn under_resolved_grids_are_refused() {
    let coarse = GridSpec::uniform(1, -620.0, 620.0, 20_001, 1e-3, &[1e-2, 1e-3, 1e-4]);
    assert!(matches!(
        oracle::semigroup_check(&free, 0.5, 0.5, &coarse, Execution::default()),
        Err(Error::GridTooCoarse(_))
    ));
    let tiny = GridSpec::uniform(1, -1.0, 1.0, 8, 1e-3, &[]);
    assert!(oracle::schrodinger_residual(&free, &HamiltonianSpec::free(&PhysicalConstants::default()), &[0.0], 1.0, &tiny, Execution::default()).is_err());
}
