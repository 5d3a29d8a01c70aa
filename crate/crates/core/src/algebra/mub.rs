use num_complex::Complex64;

use super::{basis_state, outer, symplectic_unitary, ComplexMatrix, StateVector, SymplecticMatrix};
use crate::dit::check_odd_prime;
use crate::error::Result;
use crate::question::Question;

/// A complete set of `d + 1` mutually unbiased bases labelled by line direction.
///
/// For each question `q` the unitary `U_q` takes basis `q` to the
/// computational basis, so outcome `k` is the vector `U_q^dagger |k>`
/// and `Pi_q^k = U_q^dagger |k><k| U_q`. With this labelling the projector
/// `Pi_q^k` is the uniform average of the phase-point operators on the line
/// `q x - z = k` (`x = k` for `q = inf`), so outcome labels coincide with
/// line constants.
#[derive(Clone, Debug)]
pub struct MubSystem {
    d: u32,
    questions: Vec<Question>,
    unitaries: Vec<ComplexMatrix>,
    bases: Vec<Vec<StateVector>>,
    projectors: Vec<Vec<ComplexMatrix>>,
}

impl MubSystem {
    fn from_unitaries(d: u32, questions: Vec<Question>, unitaries: Vec<ComplexMatrix>) -> Self {
        let n = d as usize;
        let bases: Vec<Vec<StateVector>> =
            unitaries.iter().map(|u| (0..n).map(|k| u.adjoint() * basis_state(n, k)).collect()).collect();
        let projectors = bases.iter().map(|b| b.iter().map(outer).collect()).collect();
        MubSystem { d, questions, unitaries, bases, projectors }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn question_index(&self, q: Question) -> Option<usize> {
        self.questions.iter().position(|&p| p == q)
    }

    /// `U_q`, mapping basis `q` onto the computational basis.
    pub fn unitary(&self, question: usize) -> &ComplexMatrix {
        &self.unitaries[question]
    }

    pub fn basis_vector(&self, question: usize, outcome: usize) -> &StateVector {
        &self.bases[question][outcome]
    }

    pub fn projector(&self, question: usize, outcome: usize) -> &ComplexMatrix {
        &self.projectors[question][outcome]
    }

    pub fn projectors(&self, question: usize) -> &[ComplexMatrix] {
        &self.projectors[question]
    }

    /// Born-rule outcome distribution `Tr(rho Pi_q^k)` for every `k`; real parts only.
    pub fn probabilities(&self, rho: &ComplexMatrix, question: usize) -> Vec<f64> {
        self.projectors[question].iter().map(|p| trace_product(rho, p).re).collect()
    }
}

/// `Tr(a b)` without forming the product.
pub(crate) fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// The Clifford bases `{I, U_{[[0,-1],[1,0]]}, ..., U_{[[d-1,-1],[1,0]]}}` for odd prime `d`.
///
/// Basis `q` is the eigenbasis of `D_{0,1}` (`q = inf`) or `D_{1,q}`, with
/// outcome `k` carrying eigenvalue `omega^k`.
pub fn mub_system(d: u32) -> Result<MubSystem> {
    check_odd_prime(d)?;
    let questions = Question::directions(d);
    let unitaries = questions
        .iter()
        .map(|q| {
            let f = match q {
                Question::Slope(s) => SymplecticMatrix::slope(*s, d),
                _ => SymplecticMatrix::identity(d),
            };
            symplectic_unitary(&f, d)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MubSystem::from_unitaries(d, questions, unitaries))
}

/// Eigenbases of `Z`, `X` and `Y`, assigned to questions `inf`, `0` and `1`.
///
/// Outcome `k` is the eigenvalue `(-1)^k`, so `+1` maps to outcome `0`.
pub fn qubit_mub_system() -> MubSystem {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let z_basis = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
    let x_basis = [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]];
    let y_basis = [[c(s, 0.0), c(0.0, s)], [c(s, 0.0), c(0.0, -s)]];
    let unitaries = [z_basis, x_basis, y_basis]
        .iter()
        .map(|basis| {
            // Row k of U_q is the conjugate of basis vector k.
            ComplexMatrix::from_fn(2, 2, |k, j| basis[k][j].conj())
        })
        .collect();
    MubSystem::from_unitaries(2, Question::directions(2), unitaries)
}
