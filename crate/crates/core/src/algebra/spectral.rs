use nalgebra::DVector;
use num_complex::Complex64;

use super::{ComplexMatrix, OperatorExt, StateVector, ASSERT_TOL};
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

impl EigenDecomposition {
    /// Eigenvectors whose eigenvalue is within `tol` of `target`.
    pub fn eigenspace(&self, target: f64, tol: f64) -> Vec<StateVector> {
        self.values
            .iter()
            .zip(&self.vectors)
            .filter(|(v, _)| (*v - target).abs() <= tol)
            .map(|(_, vec)| vec.clone())
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Dense Hermitian eigensolve with a residual check `||A v - lambda v|| <= 1e-9`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_hermitian(ASSERT_TOL) {
        return Err(Error::Validation("matrix is not Hermitian".into()));
    }
    // Symmetrise so tiny anti-Hermitian noise cannot leak into the solver.
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut values = Vec::with_capacity(order.len());
    let mut vectors = Vec::with_capacity(order.len());
    for i in order {
        let lambda = eig.eigenvalues[i];
        let v: DVector<Complex64> = eig.eigenvectors.column(i).into_owned();
        let residual = (&h * &v - &v * Complex64::new(lambda, 0.0)).norm();
        if residual > ASSERT_TOL {
            return Err(Error::Validation(format!("eigen residual {residual:e} exceeds tolerance")));
        }
        values.push(lambda);
        vectors.push(v);
    }
    Ok(EigenDecomposition { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_spectrum() {
        let i = Complex64::new(0.0, 1.0);
        let y = ComplexMatrix::from_row_slice(2, 2, &[0.0.into(), -i, i, 0.0.into()]);
        let e = hermitian_eigen(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
        let overlap = e.vectors[0].dotc(&e.vectors[1]).norm();
        assert!(overlap < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]);
        assert!(hermitian_eigen(&m).is_err());
    }
}
