//! Dirac matrices in the Dirac representation and the spin factor.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::field::{FieldStrength, Signature};
use crate::error::{Error, Result};

pub type SpinorMatrix = Matrix4<Complex64>;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    match k {
        0 => [[C0, C1], [C1, C0]],
        1 => [[C0, -CI], [CI, C0]],
        _ => [[C1, C0], [C0, -C1]],
    }
}

/// `gamma^mu` with upper index for the given metric convention, satisfying
/// `{gamma^mu, gamma^nu} = 2 g^{mu nu}`.
#[derive(Debug, Clone)]
pub struct DiracAlgebra {
    signature: Signature,
    gamma: [SpinorMatrix; 4],
}

impl DiracAlgebra {
    /// Builds the matrices and checks the anticommutator.
    pub fn new(signature: Signature) -> Result<Self> {
        let mut gamma = [SpinorMatrix::zeros(); 4];
        gamma[0] = SpinorMatrix::from_diagonal(&Vector4::new(C1, C1, -C1, -C1));
        for k in 0..3 {
            let s = pauli(k);
            for r in 0..2 {
                for c in 0..2 {
                    gamma[k + 1][(r, c + 2)] = s[r][c];
                    gamma[k + 1][(r + 2, c)] = -s[r][c];
                }
            }
        }
        if signature == Signature::MostlyPlus {
            for g in &mut gamma {
                *g *= CI;
            }
        }
        let algebra = DiracAlgebra { signature, gamma };
        let residual = algebra.clifford_residual();
        if residual > 1e-15 {
            return Err(Error::DegenerateStructure {
                reason: format!("gamma matrices violate the Clifford relation by {residual:e}"),
            });
        }
        Ok(algebra)
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn gamma(&self, mu: usize) -> &SpinorMatrix {
        &self.gamma[mu]
    }

    /// `max |{gamma^mu, gamma^nu} - 2 g^{mu nu}|`.
    pub fn clifford_residual(&self) -> f64 {
        let g = self.signature.metric();
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let target = SpinorMatrix::identity() * Complex64::from(2.0 * g[(mu, nu)]);
                worst = worst.max((anti - target).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// `sigma^{mu nu} = (i/2)[gamma^mu, gamma^nu]`.
    pub fn sigma(&self, mu: usize, nu: usize) -> SpinorMatrix {
        let comm = self.gamma[mu] * self.gamma[nu] - self.gamma[nu] * self.gamma[mu];
        comm * Complex64::new(0.0, 0.5)
    }

    /// `sigma^{mu nu} F_{mu nu}` summed over both indices.
    pub fn sigma_f(&self, field: &FieldStrength) -> SpinorMatrix {
        let low = field.lowered();
        let mut acc = SpinorMatrix::zeros();
        for mu in 0..4 {
            for nu in 0..4 {
                if low[(mu, nu)] != 0.0 {
                    acc += self.sigma(mu, nu) * Complex64::from(low[(mu, nu)]);
                }
            }
        }
        acc
    }

    /// `exp(i (e/2) sigma F s)`.
    pub fn spin_factor(&self, field: &FieldStrength, s: f64) -> SpinorMatrix {
        let generator = self.sigma_f(field) * Complex64::new(0.0, 0.5 * field.charge * s);
        generator.exp()
    }

    /// `gamma^mu v_mu` for a covariant vector.
    pub fn slash(&self, v_low: &Vector4<f64>) -> SpinorMatrix {
        (0..4).fold(SpinorMatrix::zeros(), |acc, mu| acc + self.gamma[mu] * Complex64::from(v_low[mu]))
    }
}

/// Convenience wrapper building the algebra for the field's convention.
pub fn spin_factor(s: f64, field: &FieldStrength) -> Result<SpinorMatrix> {
    Ok(DiracAlgebra::new(field.signature)?.spin_factor(field, s))
}

#[cfg(test)]
pub(crate) fn max_abs(m: &SpinorMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
