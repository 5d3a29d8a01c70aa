//! Dense complex linear algebra for a single qudit: Weyl-Heisenberg
//! operators, symplectic Clifford unitaries and mutually unbiased bases.
//!
//! All matrices act on `C^d` with the computational basis `|0>, ..., |d-1>`.
//! Construction self-checks use [`CONSTRUCTION_TOL`]; comparisons of derived
//! quantities use [`ASSERT_TOL`].

mod mub;
mod spectral;
mod symplectic;

pub(crate) use mub::trace_product;
pub use mub::{mub_system, qubit_mub_system, MubSystem};
pub use spectral::{hermitian_eigen, EigenDecomposition};
pub use symplectic::{symplectic_unitary, SymplecticMatrix};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dit::{check_dimension, check_odd_prime, mod_inverse, reduce};
use crate::error::Result;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

pub const CONSTRUCTION_TOL: f64 = 1e-12;
pub const ASSERT_TOL: f64 = 1e-9;

/// Predicates on square complex matrices.
pub trait OperatorExt {
    fn is_unitary(&self, tol: f64) -> bool;
    fn is_hermitian(&self, tol: f64) -> bool;
    fn trace_value(&self) -> Complex64;
    /// Largest entrywise modulus of `self - other`.
    fn max_abs_diff(&self, other: &ComplexMatrix) -> f64;
    /// Whether `self = e^{i phi} other` for some phase.
    fn equals_up_to_phase(&self, other: &ComplexMatrix, tol: f64) -> bool;
}

impl OperatorExt for ComplexMatrix {
    fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && {
            let id = ComplexMatrix::identity(self.nrows(), self.ncols());
            (self * self.adjoint()).max_abs_diff(&id) <= tol
        }
    }

    fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    fn trace_value(&self) -> Complex64 {
        self.diagonal().iter().sum()
    }

    fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.iter().zip(other.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn equals_up_to_phase(&self, other: &ComplexMatrix, tol: f64) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        // Pin the phase on the largest entry of `other`.
        let (idx, pivot) = other
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("non-empty matrix");
        if pivot.norm() <= tol {
            return self.iter().all(|a| a.norm() <= tol);
        }
        let phase = self[idx] / pivot;
        if (phase.norm() - 1.0).abs() > tol {
            return false;
        }
        self.max_abs_diff(&(other * phase)) <= tol
    }
}

/// `exp(2 pi i power / d)`.
pub fn root_of_unity(d: u32, power: i64) -> Result<Complex64> {
    check_dimension(d)?;
    Ok(omega_pow(d, power))
}

pub(crate) fn omega_pow(d: u32, power: i64) -> Complex64 {
    let k = reduce(power, d);
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
}

/// Cyclic shift `X|k> = |k+1>`.
pub fn pauli_x(d: u32) -> Result<ComplexMatrix> {
    check_dimension(d)?;
    let n = d as usize;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        if r == (c + 1) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Clock `Z|k> = omega^k |k>`.
pub fn pauli_z(d: u32) -> Result<ComplexMatrix> {
    check_dimension(d)?;
    let diag = DVector::from_fn(d as usize, |k, _| omega_pow(d, k as i64));
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// `X^x Z^z` computed entrywise: `|k + x><k|` with weight `omega^{k z}`.
pub(crate) fn weyl_word(d: u32, x: i64, z: i64) -> ComplexMatrix {
    let n = d as usize;
    let (x, z) = (reduce(x, d) as usize, reduce(z, d) as i64);
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        m[((k + x) % n, k)] = omega_pow(d, k as i64 * z);
    }
    m
}

/// Displacement operator `D_{x,z} = omega^{2^{-1} x z} X^x Z^z` for odd prime `d`.
pub fn displacement(d: u32, x: i64, z: i64) -> Result<ComplexMatrix> {
    check_odd_prime(d)?;
    let half = mod_inverse(2, d).expect("2 is invertible for odd d") as i64;
    let (xr, zr) = (reduce(x, d) as i64, reduce(z, d) as i64);
    Ok(weyl_word(d, xr, zr) * omega_pow(d, half * xr * zr))
}

/// The plain qubit word `X^x Z^z`.
pub fn qubit_pauli_word(x: u32, z: u32) -> ComplexMatrix {
    weyl_word(2, x as i64, z as i64)
}

/// Rank-one operator `|v><v|`.
pub(crate) fn outer(v: &StateVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub(crate) fn basis_state(d: usize, k: usize) -> StateVector {
    let mut v = StateVector::zeros(d);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(root_of_unity(3, 0).unwrap(), c(1.0, 0.0));
        assert_eq!(root_of_unity(3, 3).unwrap(), c(1.0, 0.0));
        let w = root_of_unity(3, 1).unwrap();
        // cos 120 deg, sin 120 deg
        assert!((w - c(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-12);
        assert!((w - c(-0.5, 0.8660254)).norm() < 1e-7);
        assert!(root_of_unity(1, 0).is_err());
    }

    #[test]
    fn qubit_x_is_bit_flip() {
        let x = pauli_x(2).unwrap();
        let expected = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        assert_eq!(x, expected);
    }

    #[test]
    fn x_has_order_d() {
        let x = pauli_x(3).unwrap();
        assert!((&x * &x * &x).max_abs_diff(&ComplexMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn weyl_commutation() {
        for d in [2, 3, 5, 7] {
            let (x, z) = (pauli_x(d).unwrap(), pauli_z(d).unwrap());
            let w = root_of_unity(d, 1).unwrap();
            assert!((&z * &x).max_abs_diff(&(&x * &z * w)) < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn displacement_examples() {
        assert!(displacement(3, 0, 0).unwrap().max_abs_diff(&ComplexMatrix::identity(3, 3)) < 1e-15);
        // 2^{-1} = 2 in Z_3, so D_{1,1} = omega^2 X Z.
        let (x, z) = (pauli_x(3).unwrap(), pauli_z(3).unwrap());
        let expected = &x * &z * root_of_unity(3, 2).unwrap();
        assert!(displacement(3, 1, 1).unwrap().max_abs_diff(&expected) < 1e-12);
        assert!(matches!(displacement(2, 1, 0), Err(crate::Error::Unsupported(_))));
    }

    #[test]
    fn displacement_product_phase() {
        // D_{1,0} D_{0,1} = omega^{-2^{-1}} D_{1,1}; extract the phase by brute force.
        let d = 3;
        let lhs = displacement(d, 1, 0).unwrap() * displacement(d, 0, 1).unwrap();
        let rhs = displacement(d, 1, 1).unwrap();
        let phase = (0..d as i64)
            .find(|&p| lhs.max_abs_diff(&(&rhs * omega_pow(d, p))) < 1e-12)
            .expect("phase is a power of omega");
        assert_eq!(phase, 1);
    }

    #[test]
    fn qubit_words() {
        assert_eq!(qubit_pauli_word(0, 0), ComplexMatrix::identity(2, 2));
        let xz = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(-1., 0.), c(1., 0.), c(0., 0.)]);
        assert!(qubit_pauli_word(1, 1).max_abs_diff(&xz) < 1e-15);
        assert_eq!(qubit_pauli_word(1, 0), pauli_x(2).unwrap());
    }

    #[test]
    fn generated_operators_unitary() {
        for d in [3u32, 5, 7] {
            for x in 0..d as i64 {
                for z in 0..d as i64 {
                    assert!(displacement(d, x, z).unwrap().is_unitary(CONSTRUCTION_TOL));
                }
            }
            assert!(pauli_x(d).unwrap().is_unitary(CONSTRUCTION_TOL));
            assert!(pauli_z(d).unwrap().is_unitary(CONSTRUCTION_TOL));
        }
    }

    proptest! {
        #[test]
        fn displacement_composition_law(
            d in prop::sample::select(vec![3u32, 5, 7]),
            x in 0i64..7, z in 0i64..7, x2 in 0i64..7, z2 in 0i64..7,
        ) {
            let half = mod_inverse(2, d).unwrap() as i64;
            let lhs = displacement(d, x, z).unwrap() * displacement(d, x2, z2).unwrap();
            let rhs = displacement(d, x + x2, z + z2).unwrap() * omega_pow(d, half * (z * x2 - x * z2));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn composition_law_exhaustive() {
        for d in [3u32, 5, 7] {
            let half = mod_inverse(2, d).unwrap() as i64;
            let n = d as i64;
            let ops: Vec<ComplexMatrix> =
                (0..n * n).map(|i| displacement(d, i / n, i % n).unwrap()).collect();
            for a in 0..n * n {
                for b in 0..n * n {
                    let (x, z, x2, z2) = (a / n, a % n, b / n, b % n);
                    let lhs = &ops[a as usize] * &ops[b as usize];
                    let idx = reduce(x + x2, d) as i64 * n + reduce(z + z2, d) as i64;
                    let rhs = &ops[idx as usize] * omega_pow(d, half * (z * x2 - x * z2));
                    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                }
            }
        }
    }
}
