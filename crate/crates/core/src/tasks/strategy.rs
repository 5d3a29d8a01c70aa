use num_complex::Complex64;

use super::{EmpiricalBehaviour, RetrievalTask};
use crate::algebra::{hermitian_eigen, trace_product, ComplexMatrix, MubSystem, OperatorExt, ASSERT_TOL};
use crate::error::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-9;

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    let sum: f64 = p.iter().sum();
    if p.iter().any(|&v| v < -1e-12 || !v.is_finite()) || (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::Validation(format!("{what} is not a probability distribution (sum {sum})")));
    }
    Ok(())
}

/// One message dit: Alice encodes with `p_E(j | i)`, Bob decodes with `p_D(c | j, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalStrategy {
    /// `encoding[i][j]`.
    encoding: Vec<Vec<f64>>,
    /// `decoding[q][j][c]`.
    decoding: Vec<Vec<Vec<f64>>>,
}

impl ClassicalStrategy {
    pub fn new(encoding: Vec<Vec<f64>>, decoding: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let messages = encoding.first().map_or(0, Vec::len);
        for (i, row) in encoding.iter().enumerate() {
            if row.len() != messages {
                return Err(Error::DimensionMismatch { expected: messages, found: row.len() });
            }
            check_distribution(row, &format!("encoding of input {i}"))?;
        }
        for (q, table) in decoding.iter().enumerate() {
            if table.len() != messages {
                return Err(Error::DimensionMismatch { expected: messages, found: table.len() });
            }
            for (j, row) in table.iter().enumerate() {
                check_distribution(row, &format!("decoding of message {j} on question {q}"))?;
            }
        }
        Ok(ClassicalStrategy { encoding, decoding })
    }

    /// Deterministic maps: input `i` sends `encoding[i]`, and Bob answers
    /// `decoding[q][j]`.
    pub fn deterministic(d: u32, messages: usize, encoding: &[u32], decoding: &[Vec<u32>]) -> Result<Self> {
        let delta = |k: usize, n: usize| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v
        };
        if encoding.iter().any(|&j| j as usize >= messages) {
            return Err(Error::OutOfRange { what: "message", value: messages as i64 });
        }
        if decoding.iter().flatten().any(|&c| c >= d) {
            return Err(Error::OutOfRange { what: "answer", value: d as i64 });
        }
        let enc = encoding.iter().map(|&j| delta(j as usize, messages)).collect();
        let dec =
            decoding.iter().map(|row| row.iter().map(|&c| delta(c as usize, d as usize)).collect()).collect();
        Self::new(enc, dec)
    }

    pub fn messages(&self) -> usize {
        self.encoding.first().map_or(0, Vec::len)
    }

    pub fn encoding(&self) -> &[Vec<f64>] {
        &self.encoding
    }

    pub fn decoding(&self) -> &[Vec<Vec<f64>>] {
        &self.decoding
    }
}

/// `p(c | i, q) = sum_j p_D(c | j, q) p_E(j | i)`.
pub fn behaviour_from_classical(s: &ClassicalStrategy, task: &RetrievalTask) -> Result<EmpiricalBehaviour> {
    if s.encoding.len() != task.num_inputs() {
        return Err(Error::DimensionMismatch { expected: task.num_inputs(), found: s.encoding.len() });
    }
    if s.decoding.len() != task.questions().len() {
        return Err(Error::DimensionMismatch { expected: task.questions().len(), found: s.decoding.len() });
    }
    let d = task.d() as usize;
    if let Some(row) = s.decoding.iter().flatten().find(|row| row.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: row.len() });
    }
    EmpiricalBehaviour::from_fn(task, false, |q, i| {
        let mut p = vec![0.0; d];
        for (j, &pj) in s.encoding[i].iter().enumerate() {
            for (c, slot) in p.iter_mut().enumerate() {
                *slot += pj * s.decoding[q][j][c];
            }
        }
        p
    })
}

/// One POVM per question, each resolving the identity.
#[derive(Clone, Debug)]
pub struct Measurement {
    effects: Vec<Vec<ComplexMatrix>>,
}

impl Measurement {
    pub fn new(effects: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        for (q, family) in effects.iter().enumerate() {
            let n = family.first().map_or(0, |m| m.nrows());
            let mut sum = ComplexMatrix::zeros(n, n);
            for e in family {
                if e.shape() != (n, n) || !e.is_hermitian(ASSERT_TOL) {
                    return Err(Error::Validation(format!(
                        "effect of question {q} is not a Hermitian {n}x{n} matrix"
                    )));
                }
                sum += e;
            }
            if sum.max_abs_diff(&ComplexMatrix::identity(n, n)) > ASSERT_TOL {
                return Err(Error::Validation(format!(
                    "effects of question {q} do not resolve the identity"
                )));
            }
        }
        Ok(Measurement { effects })
    }

    pub fn from_mubs(m: &MubSystem) -> Self {
        let effects = (0..m.questions().len()).map(|q| m.projectors(q).to_vec()).collect();
        Measurement { effects }
    }

    pub fn questions(&self) -> usize {
        self.effects.len()
    }

    pub fn outcomes(&self, question: usize) -> &[ComplexMatrix] {
        &self.effects[question]
    }
}

/// States indexed by input together with a measurement per question.
pub trait BornStrategy {
    fn states(&self) -> &[ComplexMatrix];
    fn measurement(&self) -> &Measurement;
    /// Whether negative quasi-probabilities may appear.
    fn allows_quasi(&self) -> bool;
}

fn check_unit_trace_hermitian(states: &[ComplexMatrix]) -> Result<()> {
    for (i, rho) in states.iter().enumerate() {
        if !rho.is_hermitian(ASSERT_TOL) {
            return Err(Error::Validation(format!("state {i} is not Hermitian")));
        }
        let tr = rho.trace_value();
        if (tr - Complex64::new(1.0, 0.0)).norm() > ASSERT_TOL {
            return Err(Error::Validation(format!("state {i} has trace {tr}")));
        }
    }
    Ok(())
}

/// Density matrices (positive semidefinite within `1e-9`).
#[derive(Clone, Debug)]
pub struct QuantumStrategy {
    states: Vec<ComplexMatrix>,
    measurement: Measurement,
}

impl QuantumStrategy {
    pub fn new(states: Vec<ComplexMatrix>, measurement: Measurement) -> Result<Self> {
        check_unit_trace_hermitian(&states)?;
        for (i, rho) in states.iter().enumerate() {
            let min = hermitian_eigen(rho)?.min();
            if min < -ASSERT_TOL {
                return Err(Error::Validation(format!("state {i} has negative eigenvalue {min}")));
            }
        }
        Ok(QuantumStrategy { states, measurement })
    }
}

impl BornStrategy for QuantumStrategy {
    fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }
    fn measurement(&self) -> &Measurement {
        &self.measurement
    }
    fn allows_quasi(&self) -> bool {
        false
    }
}

/// Hermitian unit-trace operators in place of states.
#[derive(Clone, Debug)]
pub struct HermitianStrategy {
    states: Vec<ComplexMatrix>,
    measurement: Measurement,
}

impl HermitianStrategy {
    pub fn new(states: Vec<ComplexMatrix>, measurement: Measurement) -> Result<Self> {
        check_unit_trace_hermitian(&states)?;
        Ok(HermitianStrategy { states, measurement })
    }
}

impl BornStrategy for HermitianStrategy {
    fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }
    fn measurement(&self) -> &Measurement {
        &self.measurement
    }
    fn allows_quasi(&self) -> bool {
        true
    }
}

/// `p(c | i, q) = Tr(rho_i Pi_q^c)`.
pub fn behaviour_from_quantum<S: BornStrategy + ?Sized>(
    s: &S,
    task: &RetrievalTask,
) -> Result<EmpiricalBehaviour> {
    let states = s.states();
    let m = s.measurement();
    if states.len() != task.num_inputs() {
        return Err(Error::DimensionMismatch { expected: task.num_inputs(), found: states.len() });
    }
    if m.questions() != task.questions().len() {
        return Err(Error::DimensionMismatch { expected: task.questions().len(), found: m.questions() });
    }
    let d = task.d() as usize;
    for q in 0..m.questions() {
        if m.outcomes(q).len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.outcomes(q).len() });
        }
        if let Some(rho) = states.iter().find(|rho| rho.nrows() != m.outcomes(q)[0].nrows()) {
            return Err(Error::DimensionMismatch { expected: m.outcomes(q)[0].nrows(), found: rho.nrows() });
        }
    }
    EmpiricalBehaviour::from_fn(task, s.allows_quasi(), |q, i| {
        m.outcomes(q).iter().map(|e| trace_product(&states[i], e).re).collect()
    })
}
