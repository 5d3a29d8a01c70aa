//! Sequential (transformational) form of `(2,1)_d` strategies.
//!
//! A fixed initial state is acted on by a transformation controlled by `x`,
//! then one controlled by `z` (or a single one controlled by `(x, z)`), then
//! one controlled by the question, and is finally read out in a fixed basis.
//! Classically the state is a probability vector and the transformations are
//! column-stochastic matrices acting from the left; quantumly the state is a
//! pure state, the transformations unitaries, and the readout a
//! computational-basis measurement.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{
    basis_state, hermitian_eigen, mub_system, outer, pauli_x, pauli_z, ComplexMatrix, OperatorExt,
    StateVector, ASSERT_TOL, CONSTRUCTION_TOL,
};
use crate::dit::{check_odd_prime, reduce};
use crate::error::{Error, Result};
use crate::question::Question;
use crate::tasks::{
    torpedo_task, BornStrategy, ClassicalStrategy, EmpiricalBehaviour, QuantumStrategy, RetrievalTask,
};
use crate::wigner::{minus_eigenspace, phase_point_operator};

const STOCHASTIC_TOL: f64 = 1e-12;
const ZERO_TOL: f64 = 1e-12;

/// A `d x d` column-stochastic matrix: column `j` is the output
/// distribution on input `f_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    d: usize,
    /// Row-major.
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Validation("empty matrix".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: r.len() });
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|&v| !v.is_finite() || v < -STOCHASTIC_TOL) {
            return Err(Error::Validation("stochastic matrix has a negative entry".into()));
        }
        for c in 0..d {
            let sum: f64 = (0..d).map(|r| data[r * d + c]).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::Validation(format!("column {c} sums to {sum}")));
            }
        }
        Ok(StochasticMatrix { d, data })
    }

    pub fn identity(d: usize) -> Self {
        Self::from_function(&(0..d as u32).collect::<Vec<_>>()).expect("identity is a function")
    }

    /// The cyclic shift `f_j -> f_{j + k}`.
    pub fn shift(d: usize, k: i64) -> Self {
        let f: Vec<u32> = (0..d).map(|j| reduce(j as i64 + k, d as u32)).collect();
        Self::from_function(&f).expect("shift is a function")
    }

    /// The deterministic map `f_j -> f_{f[j]}`.
    pub fn from_function(f: &[u32]) -> Result<Self> {
        let d = f.len();
        if let Some(&v) = f.iter().find(|&&v| v as usize >= d) {
            return Err(Error::OutOfRange { what: "function value", value: v as i64 });
        }
        let mut data = vec![0.0; d * d];
        for (j, &v) in f.iter().enumerate() {
            data[v as usize * d + j] = 1.0;
        }
        Ok(StochasticMatrix { d, data })
    }

    /// The constant map onto `f_k`.
    pub fn constant(d: usize, k: u32) -> Result<Self> {
        Self::from_function(&vec![k; d])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.d + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.data.chunks(self.d).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `self * rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &StochasticMatrix) -> Result<StochasticMatrix> {
        if self.d != rhs.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: rhs.d });
        }
        let d = self.d;
        let mut data = vec![0.0; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a != 0.0 {
                    for c in 0..d {
                        data[r * d + c] += a * rhs.data[k * d + c];
                    }
                }
            }
        }
        Ok(StochasticMatrix { d, data })
    }

    pub fn is_permutation(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0 || v == 1.0) && self.is_doubly_stochastic()
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        self.data.chunks(self.d).all(|row| (row.iter().sum::<f64>() - 1.0).abs() <= STOCHASTIC_TOL)
    }
}

impl Serialize for StochasticMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StochasticMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        StochasticMatrix::new(rows).map_err(serde::de::Error::custom)
    }
}

/// How Alice's inputs control her transformations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum AliceControl<M> {
    /// `T_z T_x`, one family per input dit.
    Factorised { x: Vec<M>, z: Vec<M> },
    /// A single `T_{x,z}`, indexed by `x d + z`.
    Global { xz: Vec<M> },
}

impl<M> AliceControl<M> {
    fn check(&self, d: usize) -> Result<()> {
        match self {
            AliceControl::Factorised { x, z } => {
                check_len(x.len(), d)?;
                check_len(z.len(), d)
            }
            AliceControl::Global { xz } => check_len(xz.len(), d * d),
        }
    }

    /// The transformations in the order they are applied.
    fn sequence(&self, d: usize, x: usize, z: usize) -> Vec<&M> {
        match self {
            AliceControl::Factorised { x: tx, z: tz } => vec![&tx[x], &tz[z]],
            AliceControl::Global { xz } => vec![&xz[x * d + z]],
        }
    }

    fn all(&self) -> Box<dyn Iterator<Item = &M> + '_> {
        match self {
            AliceControl::Factorised { x, z } => Box::new(x.iter().chain(z)),
            AliceControl::Global { xz } => Box::new(xz.iter()),
        }
    }
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Classical sequential strategy started from `f_0` and read out in the
/// basis `f_c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformationStrategy {
    d: usize,
    alice: AliceControl<StochasticMatrix>,
    /// One per question, in task order.
    questions: Vec<StochasticMatrix>,
}

impl TransformationStrategy {
    pub fn new(
        d: usize,
        alice: AliceControl<StochasticMatrix>,
        questions: Vec<StochasticMatrix>,
    ) -> Result<Self> {
        alice.check(d)?;
        for m in alice.all().chain(&questions) {
            check_len(m.d(), d)?;
        }
        Ok(TransformationStrategy { d, alice, questions })
    }

    pub fn alice(&self) -> &AliceControl<StochasticMatrix> {
        &self.alice
    }

    pub fn question_maps(&self) -> &[StochasticMatrix] {
        &self.questions
    }

    /// Every transformation the strategy uses.
    pub fn matrices(&self) -> impl Iterator<Item = &StochasticMatrix> {
        self.alice.all().chain(&self.questions)
    }
}

/// Quantum circuit: classically controlled unitaries on a fixed pure state,
/// then a computational-basis measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitStrategy {
    #[serde(with = "interleaved_vector")]
    initial: StateVector,
    #[serde(with = "interleaved_control")]
    alice: AliceControl<ComplexMatrix>,
    #[serde(with = "interleaved_matrices")]
    questions: Vec<ComplexMatrix>,
}

impl CircuitStrategy {
    pub fn new(
        initial: StateVector,
        alice: AliceControl<ComplexMatrix>,
        questions: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let d = initial.len();
        if (initial.norm() - 1.0).abs() > ASSERT_TOL {
            return Err(Error::Validation("initial state is not normalised".into()));
        }
        alice.check(d)?;
        for u in alice.all().chain(&questions) {
            check_len(u.nrows(), d)?;
            if !u.is_unitary(ASSERT_TOL) {
                return Err(Error::Validation("controlled gate is not unitary".into()));
            }
        }
        Ok(CircuitStrategy { initial, alice, questions })
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn alice(&self) -> &AliceControl<ComplexMatrix> {
        &self.alice
    }

    pub fn question_gates(&self) -> &[ComplexMatrix] {
        &self.questions
    }
}

/// Anything that yields `p(c | x, z, q)` from a sequential protocol.
pub trait SequentialStrategy {
    fn dimension(&self) -> usize;
    fn num_questions(&self) -> usize;
    fn outcome_distribution(&self, x: usize, z: usize, q: usize) -> Vec<f64>;
}

impl SequentialStrategy for TransformationStrategy {
    fn dimension(&self) -> usize {
        self.d
    }

    fn num_questions(&self) -> usize {
        self.questions.len()
    }

    /// `f_c . (T_q T_z T_x f_0)`.
    fn outcome_distribution(&self, x: usize, z: usize, q: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.d];
        v[0] = 1.0;
        for t in self.alice.sequence(self.d, x, z) {
            v = t.apply(&v);
        }
        self.questions[q].apply(&v)
    }
}

impl SequentialStrategy for CircuitStrategy {
    fn dimension(&self) -> usize {
        self.initial.len()
    }

    fn num_questions(&self) -> usize {
        self.questions.len()
    }

    /// `|<c| U_q T_z T_x |psi>|^2`.
    fn outcome_distribution(&self, x: usize, z: usize, q: usize) -> Vec<f64> {
        let d = self.dimension();
        let mut v = self.initial.clone();
        for u in self.alice.sequence(d, x, z) {
            v = u * v;
        }
        (&self.questions[q] * v).iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_pair_task(task: &RetrievalTask) -> Result<()> {
    if task.radices() != [task.d(), task.d()] {
        return Err(Error::Unsupported("sequential form needs a task with two input dits".into()));
    }
    Ok(())
}

/// The behaviour `e(c | x, z, q)` of a sequential strategy on a `(2,1)_d` task.
pub fn behaviour_from_transformational<S: SequentialStrategy + ?Sized>(
    s: &S,
    task: &RetrievalTask,
) -> Result<EmpiricalBehaviour> {
    check_pair_task(task)?;
    let d = task.d() as usize;
    check_len(s.dimension(), d)?;
    check_len(s.num_questions(), task.questions().len())?;
    EmpiricalBehaviour::from_fn(task, false, |q, i| s.outcome_distribution(i / d, i % d, q))
}

/// Classical prepare-and-measure strategy in sequential form: `T_x` sends
/// everything to `f_x`, `T_z` is the encoding for that `z`, `T_q` the
/// decoding for question `q`.
pub fn classical_to_transformational(
    s: &ClassicalStrategy,
    task: &RetrievalTask,
) -> Result<TransformationStrategy> {
    check_pair_task(task)?;
    let d = task.d() as usize;
    check_len(s.messages(), d)?;
    check_len(s.encoding().len(), d * d)?;
    check_len(s.decoding().len(), task.questions().len())?;
    let tx = (0..d as u32).map(|x| StochasticMatrix::constant(d, x)).collect::<Result<Vec<_>>>()?;
    let tz = (0..d)
        .map(|z| {
            StochasticMatrix::new(
                (0..d).map(|r| (0..d).map(|x| s.encoding()[x * d + z][r]).collect()).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let tq = s
        .decoding()
        .iter()
        .map(|table| StochasticMatrix::new((0..d).map(|c| (0..d).map(|j| table[j][c]).collect()).collect()))
        .collect::<Result<Vec<_>>>()?;
    TransformationStrategy::new(d, AliceControl::Factorised { x: tx, z: tz }, tq)
}

/// Quantum prepare-and-measure strategy with pure states and rank-one
/// projective measurements as a circuit.
///
/// If every state is `Z^z X^x` applied to the state for `(0, 0)`, the
/// circuit uses exactly those gates; otherwise Alice applies one unitary per
/// input taking `|0>` to its state. Each measurement becomes the unitary
/// taking its basis to the computational basis.
pub fn quantum_to_circuit(s: &QuantumStrategy, task: &RetrievalTask) -> Result<CircuitStrategy> {
    check_pair_task(task)?;
    let d = task.d() as usize;
    check_len(s.states().len(), d * d)?;
    let m = s.measurement();
    check_len(m.questions(), task.questions().len())?;
    let pure = s.states().iter().map(pure_state).collect::<Result<Vec<_>>>()?;
    let questions = (0..m.questions())
        .map(|q| {
            let basis = m.outcomes(q).iter().map(pure_state).collect::<Result<Vec<_>>>()?;
            check_len(basis.len(), d)?;
            let u = ComplexMatrix::from_fn(d, d, |k, j| basis[k][j].conj());
            if !u.is_unitary(ASSERT_TOL) {
                return Err(Error::Unsupported(format!("measurement {q} is not an orthonormal basis")));
            }
            Ok(u)
        })
        .collect::<Result<Vec<_>>>()?;

    let x_gates = powers(&pauli_x(d as u32)?, d);
    let z_gates = powers(&pauli_z(d as u32)?, d);
    let covariant = (0..d).all(|x| {
        (0..d).all(|z| {
            let v = &z_gates[z] * &x_gates[x] * &pure[0];
            outer(&v).max_abs_diff(&s.states()[x * d + z]) <= ASSERT_TOL
        })
    });
    if covariant {
        let alice = AliceControl::Factorised { x: x_gates, z: z_gates };
        return CircuitStrategy::new(pure[0].clone(), alice, questions);
    }
    let xz = pure.iter().map(unitary_from_zero).collect();
    CircuitStrategy::new(basis_state(d, 0), AliceControl::Global { xz }, questions)
}

/// `I, g, g^2, ..., g^{n-1}`.
fn powers(g: &ComplexMatrix, n: usize) -> Vec<ComplexMatrix> {
    let mut out = vec![ComplexMatrix::identity(g.nrows(), g.ncols())];
    while out.len() < n {
        let next = g * out.last().expect("non-empty");
        out.push(next);
    }
    out
}

/// A unit vector spanning a rank-one projector.
fn pure_state(rho: &ComplexMatrix) -> Result<StateVector> {
    let eig = hermitian_eigen(rho)?;
    if (eig.max() - 1.0).abs() > ASSERT_TOL
        || eig.values[..eig.values.len() - 1].iter().any(|v| v.abs() > ASSERT_TOL)
    {
        return Err(Error::Unsupported("circuit form needs pure states and rank-one projectors".into()));
    }
    Ok(eig.vectors.last().expect("non-empty spectrum").clone())
}

/// A unitary whose first column is `psi` (a phased Householder reflection).
fn unitary_from_zero(psi: &StateVector) -> ComplexMatrix {
    let d = psi.len();
    let phase =
        if psi[0].norm() > CONSTRUCTION_TOL { psi[0] / psi[0].norm() } else { Complex64::new(1.0, 0.0) };
    let target = psi * phase.conj();
    let w = basis_state(d, 0) - &target;
    let id = ComplexMatrix::identity(d, d);
    let h = if w.norm() <= CONSTRUCTION_TOL {
        id
    } else {
        id - (&w * w.adjoint()) * Complex64::new(2.0 / w.norm_squared(), 0.0)
    };
    h * phase
}

/// The same strategy in either form.
#[derive(Clone, Debug)]
pub enum SequentialForm {
    Classical(TransformationStrategy),
    Quantum(CircuitStrategy),
}

impl SequentialForm {
    pub fn behaviour(&self, task: &RetrievalTask) -> Result<EmpiricalBehaviour> {
        match self {
            SequentialForm::Classical(s) => behaviour_from_transformational(s, task),
            SequentialForm::Quantum(s) => behaviour_from_transformational(s, task),
        }
    }
}

/// A prepare-and-measure strategy of either kind.
#[derive(Clone, Copy, Debug)]
pub enum PamStrategy<'a> {
    Classical(&'a ClassicalStrategy),
    Quantum(&'a QuantumStrategy),
}

pub fn pam_to_transformational(s: PamStrategy<'_>, task: &RetrievalTask) -> Result<SequentialForm> {
    Ok(match s {
        PamStrategy::Classical(c) => SequentialForm::Classical(classical_to_transformational(c, task)?),
        PamStrategy::Quantum(q) => SequentialForm::Quantum(quantum_to_circuit(q, task)?),
    })
}

/// The `d = 3` strategy built from identities and cyclic shifts:
/// `T_x = I, I, +1`, `T_z = I, +2, +1` and `T_q = I, +1, +2, +1` for
/// `q = inf, 0, 1, 2`.
pub fn reversible_gate_strategy_d3() -> TransformationStrategy {
    let shift = |k| StochasticMatrix::shift(3, k);
    let tx = vec![shift(0), shift(0), shift(1)];
    let tz = vec![shift(0), shift(2), shift(1)];
    let tq = Question::directions(3)
        .into_iter()
        .map(|q| match q {
            Question::Slope(0) | Question::Slope(2) => shift(1),
            Question::Slope(1) => shift(2),
            _ => shift(0),
        })
        .collect();
    TransformationStrategy::new(3, AliceControl::Factorised { x: tx, z: tz }, tq).expect("valid shape")
}

/// Number of `(context, losing answer)` pairs the behaviour never produces.
pub fn satisfied_constraints(e: &EmpiricalBehaviour, task: &RetrievalTask) -> Result<usize> {
    e.check_matches(task)?;
    let mut count = 0;
    for q in 0..task.questions().len() {
        for i in 0..task.num_inputs() {
            count += (0..task.d())
                .filter(|&c| !task.is_winning(q, i, c) && e.probability(c, i, q).abs() <= ZERO_TOL)
                .count();
        }
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransformationalBound {
    /// Best count over factorised families `T_x, T_z, T_q`.
    pub factorised: usize,
    /// Best count over global families `T_{x,z}, T_q`.
    pub global: usize,
    pub total: usize,
    pub families_scanned: usize,
}

/// Jointly satisfiable constraints over every deterministic sequential
/// strategy for the qubit torpedo task.
pub fn brute_force_transformational_bound(d: u32) -> Result<TransformationalBound> {
    if d != 2 {
        return Err(Error::InvalidDimension {
            d,
            reason: "the transformational scan is only feasible for d = 2",
        });
    }
    let task = torpedo_task(2)?;
    let nq = task.questions().len();
    // Each map Z_2 -> Z_2 is two bits: f(0) and f(1).
    let apply = |code: usize, v: usize| (code >> v) & 1;
    let forbidden: Vec<Vec<u32>> = (0..nq)
        .map(|q| {
            (0..4).map(|i| (0..2).find(|&c| !task.is_winning(q, i, c)).expect("one losing answer")).collect()
        })
        .collect();
    let count = |alice: &dyn Fn(usize, usize) -> usize, tq: usize| -> usize {
        let mut n = 0;
        for x in 0..2 {
            for z in 0..2 {
                let v = alice(x, z);
                for (q, f) in forbidden.iter().enumerate() {
                    n += (apply((tq >> (2 * q)) & 3, v) as u32 != f[x * 2 + z]) as usize;
                }
            }
        }
        n
    };
    let question_families = 1usize << (2 * nq);
    let factorised = (0..1usize << 8)
        .into_par_iter()
        .map(|codes| {
            let alice = |x: usize, z: usize| {
                let tx = (codes >> (2 * x)) & 3;
                let tz = (codes >> (4 + 2 * z)) & 3;
                apply(tz, apply(tx, 0))
            };
            (0..question_families).map(|tq| count(&alice, tq)).max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    let global = (0..1usize << 8)
        .into_par_iter()
        .map(|codes| {
            let alice = |x: usize, z: usize| apply((codes >> (2 * (x * 2 + z))) & 3, 0);
            (0..question_families).map(|tq| count(&alice, tq)).max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    Ok(TransformationalBound {
        factorised,
        global,
        total: 4 * nq,
        families_scanned: 2 * (1 << 8) * question_families,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KeyFactReport {
    pub d: u32,
    pub checks: usize,
    pub failures: usize,
    pub max_deviation: f64,
    /// Largest probability assigned to a forbidden outcome.
    pub max_forbidden: f64,
}

impl KeyFactReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Check `<k| U_q (I - A_{x,z}) U_q^dagger |k> / (d - 1) = (1 - [k = t]) / (d - 1)`
/// for every direction, point and outcome, where `t` is the line constant
/// of `(x, z)` in direction `q`.
pub fn verify_keyfact_appendix(d: u32) -> Result<KeyFactReport> {
    check_odd_prime(d)?;
    let mub = mub_system(d)?;
    let n = d as usize;
    let id = ComplexMatrix::identity(n, n);
    let scale = Complex64::new(1.0 / (d - 1) as f64, 0.0);
    let mut report = KeyFactReport { d, checks: 0, failures: 0, max_deviation: 0.0, max_forbidden: 0.0 };
    for x in 0..d {
        for z in 0..d {
            let rho = (&id - phase_point_operator(d, x as i64, z as i64)?.matrix()) * scale;
            for (qi, &q) in mub.questions().iter().enumerate() {
                let u = mub.unitary(qi);
                let rotated = u * &rho * u.adjoint();
                let target = q.line_through(x, z, d).expect("direction");
                for k in 0..n {
                    let expected = if k as u32 == target { 0.0 } else { scale.re };
                    let got = rotated[(k, k)];
                    let dev = (got - Complex64::new(expected, 0.0)).norm();
                    report.checks += 1;
                    report.failures += (dev > CONSTRUCTION_TOL) as usize;
                    report.max_deviation = report.max_deviation.max(dev);
                    if k as u32 == target {
                        report.max_forbidden = report.max_forbidden.max(got.re.abs());
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Largest entrywise gap between `(I - A_{x,z}) / (d - 1)` and the projector
/// onto the `-1` eigenspace of `A_{x,z}` divided by its rank, over all points.
pub fn normalised_projector_deviation(d: u32) -> Result<f64> {
    check_odd_prime(d)?;
    let n = d as usize;
    let id = ComplexMatrix::identity(n, n);
    let mut worst: f64 = 0.0;
    for x in 0..d as i64 {
        for z in 0..d as i64 {
            let a = phase_point_operator(d, x, z)?;
            let space = minus_eigenspace(&a)?;
            let rank = space.len();
            let projector = space.iter().map(outer).fold(ComplexMatrix::zeros(n, n), |acc, p| acc + p)
                * Complex64::new(1.0 / rank as f64, 0.0);
            let formula = (&id - a.matrix()) * Complex64::new(1.0 / (d - 1) as f64, 0.0);
            worst = worst.max(projector.max_abs_diff(&formula));
        }
    }
    Ok(worst)
}

/// Row-major complex arrays as `[re, im, re, im, ...]` per row.
mod interleaved {
    use super::*;

    pub fn to_rows(m: &ComplexMatrix) -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|r| (0..m.ncols()).flat_map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> std::result::Result<ComplexMatrix, String> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != 2 * n) {
            return Err("unitary rows must hold 2n interleaved values".into());
        }
        Ok(ComplexMatrix::from_fn(n, n, |r, c| Complex64::new(rows[r][2 * c], rows[r][2 * c + 1])))
    }
}

mod interleaved_vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &StateVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().flat_map(|a| [a.re, a.im]).collect::<Vec<f64>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<StateVector, D::Error> {
        let flat = Vec::<f64>::deserialize(d)?;
        if flat.len() % 2 != 0 {
            return Err(serde::de::Error::custom("odd number of interleaved values"));
        }
        Ok(StateVector::from_iterator(flat.len() / 2, flat.chunks(2).map(|p| Complex64::new(p[0], p[1]))))
    }
}

mod interleaved_matrices {
    use super::interleaved::{from_rows, to_rows};
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[ComplexMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        ms.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ComplexMatrix>, D::Error> {
        Vec::<Vec<Vec<f64>>>::deserialize(d)?
            .iter()
            .map(|rows| from_rows(rows).map_err(serde::de::Error::custom))
            .collect()
    }
}

mod interleaved_control {
    use super::interleaved::{from_rows, to_rows};
    use super::*;

    type Rows = Vec<Vec<f64>>;

    pub fn serialize<S: Serializer>(
        c: &AliceControl<ComplexMatrix>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let conv = |ms: &[ComplexMatrix]| ms.iter().map(to_rows).collect::<Vec<Rows>>();
        let rows = match c {
            AliceControl::Factorised { x, z } => AliceControl::Factorised { x: conv(x), z: conv(z) },
            AliceControl::Global { xz } => AliceControl::Global { xz: conv(xz) },
        };
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<AliceControl<ComplexMatrix>, D::Error> {
        let conv = |ms: Vec<Rows>| {
            ms.iter()
                .map(|r| from_rows(r))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(serde::de::Error::custom)
        };
        Ok(match AliceControl::<Rows>::deserialize(d)? {
            AliceControl::Factorised { x, z } => AliceControl::Factorised { x: conv(x)?, z: conv(z)? },
            AliceControl::Global { xz } => AliceControl::Global { xz: conv(xz)? },
        })
    }
}
