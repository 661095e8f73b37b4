use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};

/// Metric convention. `MostlyMinus` is `diag(+1, -1, -1, -1)` with `x^0 = t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    #[default]
    MostlyMinus,
    MostlyPlus,
}

impl Signature {
    pub fn metric(self) -> Matrix4<f64> {
        let s = self.spatial_sign();
        Matrix4::from_diagonal(&nalgebra::Vector4::new(-s, s, s, s))
    }

    /// Sign of the spatial diagonal entries of the metric.
    pub fn spatial_sign(self) -> f64 {
        match self {
            Signature::MostlyMinus => -1.0,
            Signature::MostlyPlus => 1.0,
        }
    }
}

/// A constant electromagnetic field.
///
/// The mixed-index tensor `F^mu_nu` generates the motion `x'' = 2 e F x'`
/// and, in the component form used here, does not depend on the metric
/// convention: `F^0_i = F^i_0 = E_i` and `F^i_j = eps_ijk B_k`. Lowering the
/// first index with the metric gives the antisymmetric `F_{mu nu}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStrength {
    pub e_field: Vector3<f64>,
    pub b_field: Vector3<f64>,
    pub charge: f64,
    pub signature: Signature,
    mixed: Matrix4<f64>,
}

/// Assembles a field from `E`, `B`, the charge and the metric convention.
pub fn build_field(e_field: Vector3<f64>, b_field: Vector3<f64>, charge: f64, signature: Signature) -> FieldStrength {
    let mut m = Matrix4::zeros();
    for i in 0..3 {
        m[(0, i + 1)] = e_field[i];
        m[(i + 1, 0)] = e_field[i];
    }
    // eps_ijk B_k = -[B]_x, the negative cross-product matrix.
    let bx = -b_field.cross_matrix();
    for i in 0..3 {
        for j in 0..3 {
            m[(i + 1, j + 1)] = bx[(i, j)];
        }
    }
    FieldStrength { e_field, b_field, charge, signature, mixed: m }
}

impl FieldStrength {
    pub fn zero(signature: Signature) -> Self {
        build_field(Vector3::zeros(), Vector3::zeros(), 1.0, signature)
    }

    /// `F^mu_nu` without the charge.
    pub fn mixed(&self) -> Matrix4<f64> {
        self.mixed
    }

    /// `e F^mu_nu`.
    pub fn ef(&self) -> Matrix4<f64> {
        self.mixed * self.charge
    }

    /// `F_{mu nu} = g_{mu a} F^a_nu`, antisymmetric.
    pub fn lowered(&self) -> Matrix4<f64> {
        self.metric() * self.mixed
    }

    /// `F^{mu nu} = F^mu_a g^{a nu}`.
    pub fn raised(&self) -> Matrix4<f64> {
        self.mixed * self.metric()
    }

    pub fn metric(&self) -> Matrix4<f64> {
        self.signature.metric()
    }

    /// `tr(e F)`, identically zero.
    pub fn trace(&self) -> f64 {
        self.ef().trace()
    }

    /// The invariants `(E^2 - B^2, E . B)`.
    pub fn invariants(&self) -> (f64, f64) {
        (
            self.e_field.norm_squared() - self.b_field.norm_squared(),
            self.e_field.dot(&self.b_field),
        )
    }

    /// `(a, b) >= 0` with `eF` having eigenvalues `+-a` and `+-i b`.
    pub fn plane_rates(&self) -> (f64, f64) {
        let (f, g) = self.invariants();
        let e2 = self.charge * self.charge;
        let root = (f * f + 4.0 * g * g).sqrt();
        let a2 = 0.5 * (f + root) * e2;
        let b2 = 0.5 * (root - f) * e2;
        (a2.max(0.0).sqrt(), b2.max(0.0).sqrt())
    }

    pub fn is_zero(&self) -> bool {
        self.charge == 0.0 || self.mixed.iter().all(|&x| x == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowered_tensor_is_antisymmetric_in_both_conventions() {
        for sig in [Signature::MostlyMinus, Signature::MostlyPlus] {
            let f = build_field(Vector3::new(0.3, -1.0, 0.2), Vector3::new(0.7, 0.1, -0.4), 1.3, sig);
            let l = f.lowered();
            assert_eq!(l, -l.transpose());
            assert_eq!(f.trace(), 0.0);
        }
    }

    #[test]
    fn eigenvalues_of_pure_fields() {
        let b = build_field(Vector3::zeros(), Vector3::new(0.0, 0.0, 2.0), 1.5, Signature::MostlyMinus);
        let mut ev: Vec<_> = b.ef().complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
        ev.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        assert!((ev[0].1 + 3.0).abs() < 1e-12 && (ev[3].1 - 3.0).abs() < 1e-12);
        assert!(ev.iter().all(|z| z.0.abs() < 1e-12));
        assert_eq!(b.plane_rates(), (0.0, 3.0));

        let e = build_field(Vector3::new(0.5, 0.0, 0.0), Vector3::zeros(), 2.0, Signature::MostlyPlus);
        let mut re: Vec<f64> = e.ef().complex_eigenvalues().iter().map(|z| z.re).collect();
        re.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[3] - 1.0).abs() < 1e-12);
        assert!(re[1].abs() < 1e-12 && re[2].abs() < 1e-12);
    }

    #[test]
    fn zero_field() {
        let f = FieldStrength::zero(Signature::MostlyMinus);
        assert!(f.is_zero());
        assert_eq!(f.ef(), Matrix4::zeros());
    }
}
