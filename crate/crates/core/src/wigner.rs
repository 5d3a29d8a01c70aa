//! Phase-point operators and the discrete Wigner function for odd prime `d`.
//!
//! Grids are indexed row = `x`, column = `z`. Directions follow
//! [`Question::line_through`]: `q = inf` lines are rows `x = c`, slope `q`
//! lines are `q x - z = c`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    displacement, hermitian_eigen, qubit_pauli_word, ComplexMatrix, MubSystem, OperatorExt, StateVector,
    ASSERT_TOL,
};
use crate::dit::{check_odd_prime, reduce};
use crate::error::{Error, Result};
use crate::question::Question;

#[derive(Clone, Debug)]
pub struct PhasePointOperator {
    d: u32,
    x: u32,
    z: u32,
    matrix: ComplexMatrix,
}

impl PhasePointOperator {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn point(&self) -> (u32, u32) {
        (self.x, self.z)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// `A_{0,0} = sum_j |-j><j|`.
pub fn origin_phase_point(d: u32) -> Result<ComplexMatrix> {
    check_odd_prime(d)?;
    let n = d as usize;
    let mut a = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        a[((n - j) % n, j)] = Complex64::new(1.0, 0.0);
    }
    Ok(a)
}

/// `A_{x,z} = D_{x,z} A_{0,0} D_{x,z}^dagger`.
pub fn phase_point_operator(d: u32, x: i64, z: i64) -> Result<PhasePointOperator> {
    let a0 = origin_phase_point(d)?;
    let dxz = displacement(d, x, z)?;
    let matrix = &dxz * a0 * dxz.adjoint();
    Ok(PhasePointOperator { d, x: reduce(x, d), z: reduce(z, d), matrix })
}

/// Closed form `(A_{x,z})_{j,k} = delta_{2x, j+k} omega^{z (j - k)}`.
pub fn phase_point_closed_form(d: u32, x: i64, z: i64) -> Result<ComplexMatrix> {
    check_odd_prime(d)?;
    let n = d as usize;
    let two_x = reduce(2 * x, d) as usize;
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        if (j + k) % n == two_x {
            crate::algebra::omega_pow(d, z * (j as i64 - k as i64))
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Qubit analogue `(X^x Z^z) (I - X - Y - Z)/2 (X^x Z^z)^dagger`.
///
/// Hermitian with unit trace but eigenvalues `(1 +- sqrt 3)/2`, so not a state.
pub fn qubit_phase_point(x: u32, z: u32) -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let px = ComplexMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
    let py = ComplexMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]);
    let pz = ComplexMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
    let base = (ComplexMatrix::identity(2, 2) - px - py - pz) * Complex64::new(0.5, 0.0);
    let w = qubit_pauli_word(x % 2, z % 2);
    &w * base * w.adjoint()
}

/// `d x d` real quasi-probabilities, row-major by `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    d: u32,
    values: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn new(d: u32, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = d as usize;
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: values.len() });
        }
        Ok(WignerGrid { d, values })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn get(&self, x: i64, z: i64) -> f64 {
        self.values[reduce(x, self.d) as usize][reduce(z, self.d) as usize]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().flatten().sum()
    }

    /// `d` lines of `d` comma-separated values; line index is `x`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.values {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `W_{x,z} = Tr(Q A_{x,z}) / d` for Hermitian unit-trace `Q`.
pub fn wigner_function(q: &ComplexMatrix, d: u32) -> Result<WignerGrid> {
    check_odd_prime(d)?;
    let n = d as usize;
    if q.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: q.nrows() });
    }
    if !q.is_hermitian(ASSERT_TOL) {
        return Err(Error::Validation("operator is not Hermitian".into()));
    }
    let tr = q.trace_value();
    if (tr - Complex64::new(1.0, 0.0)).norm() > ASSERT_TOL {
        return Err(Error::Validation(format!("trace is {tr}, expected 1")));
    }
    let mut values = vec![vec![0.0; n]; n];
    for (x, row) in values.iter_mut().enumerate() {
        for (z, cell) in row.iter_mut().enumerate() {
            let a = phase_point_closed_form(d, x as i64, z as i64)?;
            let w = crate::algebra::trace_product(q, &a) / d as f64;
            if w.im.abs() > 1e-12 {
                return Err(Error::Validation(format!("Wigner value at ({x},{z}) not real: {w}")));
            }
            *cell = w.re;
        }
    }
    WignerGrid::new(d, values)
}

/// `sum |W_{x,z}|`; equal to 1 exactly when the grid is nonnegative.
pub fn negativity(w: &WignerGrid) -> f64 {
    w.values.iter().flatten().map(|v| v.abs()).sum()
}

/// An orthonormal basis of the `-1` eigenspace, of dimension `(d-1)/2`.
pub fn minus_eigenspace(a: &PhasePointOperator) -> Result<Vec<StateVector>> {
    let eig = hermitian_eigen(a.matrix())?;
    let space = eig.eigenspace(-1.0, 1e-9);
    let expected = (a.d as usize - 1) / 2;
    if space.len() != expected {
        return Err(Error::Validation(format!(
            "-1 eigenspace has dimension {}, expected {expected}",
            space.len()
        )));
    }
    Ok(space)
}

/// Sum of `W` over the line with constant `c` in direction `q`.
pub fn line_marginal(w: &WignerGrid, q: Question, c: u32) -> Result<f64> {
    let d = w.d;
    match q {
        Question::Position(_) => return Err(Error::Validation("not a line direction".into())),
        Question::Slope(s) if s >= d => return Err(Error::OutOfRange { what: "slope", value: s as i64 }),
        _ => {}
    }
    let mut total = 0.0;
    for x in 0..d {
        for z in 0..d {
            if q.line_through(x, z, d) == Some(c % d) {
                total += w.values[x as usize][z as usize];
            }
        }
    }
    Ok(total)
}

/// MUB outcome attached to the line `c` of direction `q`.
///
/// Frozen from [`derive_line_outcome_table`]: with the basis convention of
/// [`crate::algebra::mub_system`] the labelling is the identity for every
/// odd prime. Regression-tested for `d = 3, 5, 7, 11`.
pub fn line_outcome(_q: Question, c: u32) -> u32 {
    c
}

/// For each question and outcome, the line constant whose phase-point
/// operators average to that projector, recovered by matching
/// `Tr(A_{x,z} Pi_q^k) = 1` on exactly one line.
pub fn derive_line_outcome_table(mub: &MubSystem) -> Result<Vec<Vec<u32>>> {
    let d = mub.d();
    let mut table = Vec::new();
    for (qi, &q) in mub.questions().iter().enumerate() {
        let mut row = Vec::new();
        for k in 0..d as usize {
            let p = mub.projector(qi, k);
            let mut lines = Vec::new();
            for x in 0..d {
                for z in 0..d {
                    let a = phase_point_closed_form(d, x as i64, z as i64)?;
                    let t = crate::algebra::trace_product(&a, p).re;
                    if (t - 1.0).abs() < 1e-9 {
                        lines.push(q.line_through(x, z, d).expect("direction"));
                    } else if t.abs() > 1e-9 {
                        return Err(Error::Validation(format!("Tr(A Pi) = {t} at ({x},{z})")));
                    }
                }
            }
            lines.dedup();
            match lines.as_slice() {
                [c] if lines.len() == 1 => row.push(*c),
                _ => {
                    return Err(Error::Validation(format!(
                        "projector ({q}, {k}) is not supported on a single line"
                    )))
                }
            }
        }
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{mub_system, outer, StateVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn perm3() -> ComplexMatrix {
        let one = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        ComplexMatrix::from_row_slice(3, 3, &[one, z, z, z, z, one, z, one, z])
    }

    fn psi(d: u32, x: i64, z: i64) -> StateVector {
        let n = d as usize;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = StateVector::zeros(n);
        v[1] = Complex64::new(s, 0.0);
        v[n - 1] = Complex64::new(-s, 0.0);
        displacement(d, x, z).unwrap() * v
    }

    pub(crate) fn random_state(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let v = StateVector::from_fn(d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        outer(&(&v * Complex64::new(1.0 / v.norm(), 0.0)))
    }

    #[test]
    fn origin_swaps_one_and_two() {
        let a = phase_point_operator(3, 0, 0).unwrap();
        assert!(a.matrix().max_abs_diff(&perm3()) < 1e-15);
    }

    #[test]
    fn dual_constructions_agree() {
        for d in [3u32, 5, 7] {
            for x in 0..d as i64 {
                for z in 0..d as i64 {
                    let a = phase_point_operator(d, x, z).unwrap();
                    let b = phase_point_closed_form(d, x, z).unwrap();
                    assert!(a.matrix().max_abs_diff(&b) < 1e-12, "d={d} ({x},{z})");
                }
            }
        }
    }

    #[test]
    fn diagonal_is_point_indicator() {
        for d in [3u32, 5] {
            for x in 0..d as i64 {
                for z in 0..d as i64 {
                    let a = phase_point_operator(d, x, z).unwrap();
                    for k in 0..d as usize {
                        let expected = (k as i64 == x) as u8 as f64;
                        assert!((a.matrix()[(k, k)] - Complex64::new(expected, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn phase_point_algebra() {
        for d in [3u32, 5, 7] {
            for x in 0..d as i64 {
                for z in 0..d as i64 {
                    let a = phase_point_operator(d, x, z).unwrap();
                    let m = a.matrix();
                    assert!(m.is_hermitian(1e-12));
                    assert!((m.trace_value().re - 1.0).abs() < 1e-12);
                    assert!((m * m).max_abs_diff(&ComplexMatrix::identity(d as usize, d as usize)) < 1e-12);
                    let eig = hermitian_eigen(m).unwrap();
                    let plus = eig.values.iter().filter(|v| (*v - 1.0).abs() < 1e-9).count();
                    let minus = eig.values.iter().filter(|v| (*v + 1.0).abs() < 1e-9).count();
                    assert_eq!((plus, minus), ((d as usize).div_ceil(2), (d as usize - 1) / 2));
                }
            }
        }
    }

    #[test]
    fn spectrum_of_a12_in_d5() {
        let a = phase_point_operator(5, 1, 2).unwrap();
        let eig = hermitian_eigen(a.matrix()).unwrap();
        let expected = [-1.0, -1.0, 1.0, 1.0, 1.0];
        for (v, e) in eig.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-9);
        }
    }

    #[test]
    fn qubit_phase_points() {
        let e = hermitian_eigen(&qubit_phase_point(0, 0)).unwrap();
        let r3 = 3f64.sqrt();
        assert!((e.values[0] - (1.0 - r3) / 2.0).abs() < 1e-12);
        assert!((e.values[1] - (1.0 + r3) / 2.0).abs() < 1e-12);
        for x in 0..2 {
            for z in 0..2 {
                let a = qubit_phase_point(x, z);
                assert!((a.trace_value().re - 1.0).abs() < 1e-12);
                assert!(hermitian_eigen(&a).unwrap().min() < 0.0);
            }
        }
    }

    #[test]
    fn computational_state_grid() {
        let mut rho = ComplexMatrix::zeros(3, 3);
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        let w = wigner_function(&rho, 3).unwrap();
        for x in 0..3 {
            for z in 0..3 {
                let expected = if x == 0 { 1.0 / 3.0 } else { 0.0 };
                assert!((w.get(x, z) - expected).abs() < 1e-12);
            }
        }
        assert!((negativity(&w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_state_grid() {
        let w = wigner_function(&outer(&psi(3, 2, 0)), 3).unwrap();
        for x in 0..3 {
            for z in 0..3 {
                let expected = if (x, z) == (2, 0) { -1.0 / 3.0 } else { 1.0 / 6.0 };
                assert!((w.get(x, z) - expected).abs() < 1e-12);
            }
        }
        assert!((negativity(&w) - 5.0 / 3.0).abs() < 1e-12);
        assert!(line_marginal(&w, Question::Infinity, 2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_grid() {
        let rho = ComplexMatrix::identity(3, 3) / Complex64::new(3.0, 0.0);
        let w = wigner_function(&rho, 3).unwrap();
        assert!(w.rows().iter().flatten().all(|v| (v - 1.0 / 9.0).abs() < 1e-12));
        assert!((negativity(&w) - 1.0).abs() < 1e-12);
        for q in Question::directions(3) {
            for c in 0..3 {
                assert!((line_marginal(&w, q, c).unwrap() - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_invalid_operators() {
        let bad_trace = ComplexMatrix::identity(3, 3);
        assert!(matches!(wigner_function(&bad_trace, 3), Err(Error::Validation(_))));
        let mut non_herm = ComplexMatrix::zeros(3, 3);
        non_herm[(0, 0)] = Complex64::new(1.0, 0.0);
        non_herm[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(wigner_function(&non_herm, 3), Err(Error::Validation(_))));
    }

    #[test]
    fn minus_eigenspaces() {
        let a = phase_point_operator(3, 0, 0).unwrap();
        let space = minus_eigenspace(&a).unwrap();
        assert_eq!(space.len(), 1);
        // Projectively equal to (|1> - |2>)/sqrt 2.
        let overlap = space[0].dotc(&psi(3, 0, 0)).norm();
        assert!((overlap - 1.0).abs() < 1e-12);

        let a5 = phase_point_operator(5, 1, 3).unwrap();
        let space = minus_eigenspace(&a5).unwrap();
        assert_eq!(space.len(), 2);
        for (i, u) in space.iter().enumerate() {
            assert!(((a5.matrix() * u) + u).norm() < 1e-9);
            for (j, v) in space.iter().enumerate() {
                let expected = (i == j) as u8 as f64;
                assert!((u.dotc(v).norm() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn line_table_is_identity() {
        for d in [3u32, 5, 7, 11] {
            let table = derive_line_outcome_table(&mub_system(d).unwrap()).unwrap();
            for row in &table {
                for (k, &c) in row.iter().enumerate() {
                    assert_eq!(line_outcome(Question::Infinity, c), k as u32);
                }
            }
        }
    }

    #[test]
    fn hudson_desk_check() {
        let m = mub_system(3).unwrap();
        for q in 0..m.questions().len() {
            for k in 0..3 {
                let w = wigner_function(m.projector(q, k), 3).unwrap();
                assert!((negativity(&w) - 1.0).abs() < 1e-12);
            }
        }
        for x in 0..3 {
            for z in 0..3 {
                let w = wigner_function(&outer(&psi(3, x, z)), 3).unwrap();
                assert!(negativity(&w) > 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn line_marginals_match_born_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for d in [3u32, 5, 7] {
            let m = mub_system(d).unwrap();
            for _ in 0..25 {
                let rho = random_state(d as usize, &mut rng);
                let w = wigner_function(&rho, d).unwrap();
                assert!((w.total() - 1.0).abs() < 1e-9);
                for (qi, &q) in m.questions().iter().enumerate() {
                    let born = m.probabilities(&rho, qi);
                    let mut sum = 0.0;
                    for c in 0..d {
                        let marginal = line_marginal(&w, q, c).unwrap();
                        sum += marginal;
                        assert!((marginal - born[line_outcome(q, c) as usize]).abs() < 1e-9);
                    }
                    assert!((sum - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn covariance_under_displacement() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for d in [3u32, 5, 7] {
            let rho = random_state(d as usize, &mut rng);
            let w = wigner_function(&rho, d).unwrap();
            let (a, b) = (rng.random_range(0..d as i64), rng.random_range(0..d as i64));
            let dab = displacement(d, a, b).unwrap();
            let moved = wigner_function(&(&dab * &rho * dab.adjoint()), d).unwrap();
            for x in 0..d as i64 {
                for z in 0..d as i64 {
                    assert!((moved.get(x, z) - w.get(x - a, z - b)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn csv_layout() {
        let rho = ComplexMatrix::identity(3, 3) / Complex64::new(3.0, 0.0);
        let csv = wigner_function(&rho, 3).unwrap().to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().all(|l| l.split(',').count() == 3));
    }
}
