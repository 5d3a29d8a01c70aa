use std::fmt;

use serde::{Deserialize, Serialize};

use super::{omega_pow, ComplexMatrix};
use crate::dit::{check_odd_prime, Dit};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// A 2x2 matrix `[[alpha, beta], [gamma, epsilon]]` over Z_d with unit determinant.
#[derive(Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    alpha: Dit,
    beta: Dit,
    gamma: Dit,
    epsilon: Dit,
}

impl SymplecticMatrix {
    pub fn new(alpha: i64, beta: i64, gamma: i64, epsilon: i64, d: u32) -> Result<Self> {
        let m = SymplecticMatrix {
            alpha: Dit::new(alpha, d),
            beta: Dit::new(beta, d),
            gamma: Dit::new(gamma, d),
            epsilon: Dit::new(epsilon, d),
        };
        let det = m.determinant();
        if det.value() != 1 {
            return Err(Error::Validation(format!(
                "symplectic matrix must have determinant 1 mod {d}, found {det}"
            )));
        }
        Ok(m)
    }

    pub fn identity(d: u32) -> Self {
        Self::new(1, 0, 0, 1, d).expect("identity is symplectic")
    }

    /// `[[q, -1], [1, 0]]`, whose unitary takes the slope-`q` basis to the computational one.
    pub fn slope(q: u32, d: u32) -> Self {
        Self::new(q as i64, -1, 1, 0, d).expect("determinant is 1")
    }

    pub fn modulus(&self) -> u32 {
        self.alpha.modulus()
    }

    pub fn entries(&self) -> [Dit; 4] {
        [self.alpha, self.beta, self.gamma, self.epsilon]
    }

    pub fn determinant(&self) -> Dit {
        self.alpha * self.epsilon - self.beta * self.gamma
    }

    /// `F (x, z)^T`.
    pub fn apply(&self, x: i64, z: i64) -> (u32, u32) {
        let d = self.modulus();
        let (x, z) = (Dit::new(x, d), Dit::new(z, d));
        ((self.alpha * x + self.beta * z).value(), (self.gamma * x + self.epsilon * z).value())
    }

    pub fn inverse(&self) -> Self {
        SymplecticMatrix { alpha: self.epsilon, beta: -self.beta, gamma: -self.gamma, epsilon: self.alpha }
    }

    pub fn compose(&self, rhs: &SymplecticMatrix) -> Self {
        let [a, b, c, e] = self.entries();
        let [a2, b2, c2, e2] = rhs.entries();
        SymplecticMatrix {
            alpha: a * a2 + b * c2,
            beta: a * b2 + b * e2,
            gamma: c * a2 + e * c2,
            epsilon: c * b2 + e * e2,
        }
    }
}

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]] mod {}",
            self.alpha,
            self.beta,
            self.gamma,
            self.epsilon,
            self.modulus()
        )
    }
}

/// The Clifford unitary `U_F` with `U_F D_v U_F^dagger = D_{F v}`.
///
/// For `beta != 0` this is `d^{-1/2} sum_{j,k} omega^{2^{-1} beta^{-1} (alpha k^2 - 2 j k + epsilon j^2)} |j><k|`,
/// otherwise `sum_k omega^{2^{-1} alpha gamma k^2} |alpha k><k|`.
pub fn symplectic_unitary(f: &SymplecticMatrix, d: u32) -> Result<ComplexMatrix> {
    check_odd_prime(d)?;
    if f.modulus() != d {
        return Err(Error::DimensionMismatch { expected: d as usize, found: f.modulus() as usize });
    }
    if f.determinant().value() != 1 {
        return Err(Error::Validation("symplectic matrix must have determinant 1".into()));
    }
    let n = d as usize;
    let half = Dit::new(2, d).inverse().expect("odd d");
    let [alpha, beta, gamma, epsilon] = f.entries();
    let mut u = ComplexMatrix::zeros(n, n);
    if let Some(beta_inv) = beta.inverse() {
        let scale = 1.0 / (d as f64).sqrt();
        for j in 0..n {
            for k in 0..n {
                let (jd, kd) = (Dit::new(j as i64, d), Dit::new(k as i64, d));
                let exponent =
                    half * beta_inv * (alpha * kd * kd - Dit::new(2, d) * jd * kd + epsilon * jd * jd);
                u[(j, k)] = omega_pow(d, exponent.value() as i64) * scale;
            }
        }
    } else {
        if alpha.is_zero() {
            return Err(Error::Validation("beta = 0 requires alpha != 0".into()));
        }
        for k in 0..n {
            let kd = Dit::new(k as i64, d);
            let exponent = half * alpha * gamma * kd * kd;
            u[((alpha * kd).value() as usize, k)] = omega_pow(d, exponent.value() as i64);
        }
    }
    debug_assert!(u.iter().all(|c: &Complex64| c.norm().is_finite()));
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{displacement, OperatorExt, CONSTRUCTION_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn determinant_enforced() {
        assert!(SymplecticMatrix::new(1, 1, 1, 1, 3).is_err());
        assert!(SymplecticMatrix::new(0, 0, 1, 1, 5).is_err());
        assert!(SymplecticMatrix::new(2, 1, 1, 1, 3).is_ok());
    }

    #[test]
    fn identity_gives_identity() {
        let u = symplectic_unitary(&SymplecticMatrix::identity(3), 3).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn quarter_turn_is_fourier() {
        let d = 3;
        let f = SymplecticMatrix::new(0, -1, 1, 0, d).unwrap();
        let u = symplectic_unitary(&f, d).unwrap();
        let dft = ComplexMatrix::from_fn(3, 3, |j, k| omega_pow(d, (j * k) as i64) / 3f64.sqrt());
        assert!(u.max_abs_diff(&dft) < 1e-12);
    }

    #[test]
    fn quarter_turn_sends_x_to_z() {
        let d = 3;
        let f = SymplecticMatrix::new(0, -1, 1, 0, d).unwrap();
        let u = symplectic_unitary(&f, d).unwrap();
        let image = &u * displacement(d, 1, 0).unwrap() * u.adjoint();
        assert_eq!(f.apply(1, 0), (0, 1));
        assert!(image.equals_up_to_phase(&displacement(d, 0, 1).unwrap(), 1e-12));
    }

    #[test]
    fn covariance_for_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [3u32, 5, 7] {
            let mut found = 0;
            while found < 50 {
                let e: Vec<i64> = (0..4).map(|_| rng.random_range(0..d as i64)).collect();
                let Ok(f) = SymplecticMatrix::new(e[0], e[1], e[2], e[3], d) else { continue };
                found += 1;
                let u = symplectic_unitary(&f, d).unwrap();
                assert!(u.is_unitary(CONSTRUCTION_TOL), "{f:?}");
                for (x, z) in [(1, 0), (0, 1), (rng.random_range(0..d as i64), rng.random_range(0..d as i64))]
                {
                    let (x2, z2) = f.apply(x, z);
                    let image = &u * displacement(d, x, z).unwrap() * u.adjoint();
                    let target = displacement(d, x2 as i64, z2 as i64).unwrap();
                    assert!(image.equals_up_to_phase(&target, 1e-10), "{f:?} on ({x},{z})");
                }
            }
        }
    }

    #[test]
    fn inverse_and_compose() {
        let f = SymplecticMatrix::new(2, 1, 1, 1, 5).unwrap();
        assert_eq!(f.compose(&f.inverse()), SymplecticMatrix::identity(5));
    }
}
