//! Information retrieval tasks, strategies and the behaviours they produce.
//!
//! A task fixes a dimension `d`, input dits with given radices, a list of
//! questions and, for every question and input, the set of winning answers.
//! Inputs are addressed by a mixed-radix index with the first dit most
//! significant, so the torpedo input `(x, z)` has index `x d + z`.

mod behaviour;
mod known;
mod strategy;

pub use behaviour::EmpiricalBehaviour;
pub use known::{
    casaccino_qrac_value, mixed_perfect_torpedo_strategy, perfect_modified_strategy, perfect_state,
    perfect_torpedo_strategy, postquantum_qubit_torpedo_strategy, qrac21_strategies, qrac_phase_point,
    qubit_assignment_value, qubit_torpedo_strategy, search_qubit_assignment, Pauli, QubitAssignment,
    QUBIT_ASSIGNMENT,
};
pub use strategy::{
    behaviour_from_classical, behaviour_from_quantum, BornStrategy, ClassicalStrategy, HermitianStrategy,
    Measurement, QuantumStrategy,
};

use serde::{Deserialize, Serialize};

use crate::dit::{check_dimension, check_odd_prime, check_prime};
use crate::error::{Error, Result};
use crate::question::Question;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Torpedo,
    ModifiedTorpedo,
    Qrac,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalTask {
    kind: TaskKind,
    d: u32,
    radices: Vec<u32>,
    questions: Vec<Question>,
    /// `winning[q][i]` has bit `c` set when answer `c` wins on input `i`.
    winning: Vec<Vec<u64>>,
}

impl RetrievalTask {
    /// Build a task by evaluating `rule(question, input)` on every input.
    pub fn from_rule<F>(
        kind: TaskKind,
        d: u32,
        radices: Vec<u32>,
        questions: Vec<Question>,
        rule: F,
    ) -> Result<Self>
    where
        F: Fn(Question, &[u32]) -> Vec<u32>,
    {
        check_dimension(d)?;
        if d > 64 {
            return Err(Error::InvalidDimension { d, reason: "answers are stored as 64-bit masks" });
        }
        if radices.is_empty() || radices.contains(&0) {
            return Err(Error::Validation("every input needs a positive radix".into()));
        }
        let mut task = RetrievalTask { kind, d, radices, questions, winning: Vec::new() };
        let n = task.num_inputs();
        task.winning = task
            .questions
            .iter()
            .map(|&q| {
                (0..n)
                    .map(|i| rule(q, &task.input_tuple(i)).into_iter().fold(0u64, |m, c| m | 1 << (c % d)))
                    .collect()
            })
            .collect();
        Ok(task)
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of input dits.
    pub fn arity(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn question_index(&self, q: Question) -> Option<usize> {
        self.questions.iter().position(|&p| p == q)
    }

    pub fn num_inputs(&self) -> usize {
        self.radices.iter().map(|&r| r as usize).product()
    }

    pub fn num_contexts(&self) -> usize {
        self.num_inputs() * self.questions.len()
    }

    pub fn input_tuple(&self, mut index: usize) -> Vec<u32> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = (index % r as usize) as u32;
            index /= r as usize;
        }
        out
    }

    pub fn input_index(&self, input: &[u32]) -> Result<usize> {
        if input.len() != self.radices.len() {
            return Err(Error::DimensionMismatch { expected: self.radices.len(), found: input.len() });
        }
        let mut index = 0usize;
        for (&v, &r) in input.iter().zip(&self.radices) {
            if v >= r {
                return Err(Error::OutOfRange { what: "input dit", value: v as i64 });
            }
            index = index * r as usize + v as usize;
        }
        Ok(index)
    }

    pub fn winning_mask(&self, question: usize, input: usize) -> u64 {
        self.winning[question][input]
    }

    pub fn is_winning(&self, question: usize, input: usize, answer: u32) -> bool {
        self.winning[question][input] >> answer & 1 == 1
    }

    pub fn winning_set(&self, question: usize, input: usize) -> Vec<u32> {
        (0..self.d).filter(|&c| self.is_winning(question, input, c)).collect()
    }

    /// Uniform average over inputs and questions of the winning probability.
    pub fn value(&self, e: &EmpiricalBehaviour) -> Result<f64> {
        e.check_matches(self)?;
        let mut total = 0.0;
        for q in 0..self.questions.len() {
            for i in 0..self.num_inputs() {
                let probs = e.probabilities(q, i);
                total +=
                    (0..self.d).filter(|&c| self.is_winning(q, i, c)).map(|c| probs[c as usize]).sum::<f64>();
            }
        }
        Ok(total / self.num_contexts() as f64)
    }
}

/// `task.value(e)` as a free function.
pub fn task_value(task: &RetrievalTask, e: &EmpiricalBehaviour) -> Result<f64> {
    task.value(e)
}

/// Questions `{inf, 0, ..., d-1}` on inputs `(x, z)`; the only losing
/// answer is the constant of the line through `(x, z)` in direction `q`.
pub fn torpedo_task(d: u32) -> Result<RetrievalTask> {
    check_prime(d)?;
    RetrievalTask::from_rule(TaskKind::Torpedo, d, vec![d, d], Question::directions(d), |q, i| {
        let forbidden = q.line_through(i[0], i[1], d).expect("direction");
        (0..d).filter(|&c| c != forbidden).collect()
    })
}

/// Inputs `(x, z, l)` with `0 <= l < (d-1)/2`. Question `inf` is won only by
/// `x + l + 1` or `x - l - 1`; other questions are as in [`torpedo_task`].
pub fn modified_torpedo_task(d: u32) -> Result<RetrievalTask> {
    check_odd_prime(d)?;
    if d == 3 {
        return Err(Error::InvalidDimension {
            d,
            reason: "the modified game needs d >= 5; use torpedo_task",
        });
    }
    let levels = (d - 1) / 2;
    RetrievalTask::from_rule(
        TaskKind::ModifiedTorpedo,
        d,
        vec![d, d, levels],
        Question::directions(d),
        |q, i| {
            let (x, z, l) = (i[0] as i64, i[1], i[2] as i64);
            match q {
                Question::Infinity => {
                    vec![crate::dit::reduce(x + l + 1, d), crate::dit::reduce(x - l - 1, d)]
                }
                _ => {
                    let forbidden = q.line_through(x as u32, z, d).expect("direction");
                    (0..d).filter(|&c| c != forbidden).collect()
                }
            }
        },
    )
}

/// `(n, 1)_d` random access code: question `#i` is won only by the `i`-th input dit.
pub fn qrac_task(n: usize, d: u32) -> Result<RetrievalTask> {
    check_prime(d)?;
    if n < 2 {
        return Err(Error::Validation("a random access code needs at least two input dits".into()));
    }
    let questions = (1..=n as u32).map(Question::Position).collect();
    RetrievalTask::from_rule(TaskKind::Qrac, d, vec![d; n], questions, |q, i| match q {
        Question::Position(p) => vec![i[p as usize - 1]],
        _ => unreachable!("qrac questions are positions"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torpedo_winning_sets() {
        let t = torpedo_task(3).unwrap();
        let q = t.question_index(Question::Slope(2)).unwrap();
        let i = t.input_index(&[1, 2]).unwrap();
        assert_eq!(t.winning_set(q, i), vec![1, 2]);
        for q in 0..4 {
            for i in 0..9 {
                assert_eq!(t.winning_set(q, i).len(), 2);
            }
        }
        let inf = t.winning_set(0, t.input_index(&[2, 0]).unwrap());
        assert_eq!(inf, vec![0, 1]);
    }

    #[test]
    fn qubit_torpedo_relations_are_functions() {
        let t = torpedo_task(2).unwrap();
        let q = t.question_index(Question::Slope(1)).unwrap();
        for x in 0..2 {
            for z in 0..2 {
                let i = t.input_index(&[x, z]).unwrap();
                assert_eq!(t.winning_set(q, i), vec![x ^ z ^ 1]);
            }
        }
    }

    #[test]
    fn modified_relations() {
        let t = modified_torpedo_task(5).unwrap();
        assert_eq!(t.num_inputs(), 50);
        assert_eq!(t.winning_set(0, t.input_index(&[1, 0, 0]).unwrap()), vec![0, 2]);
        assert_eq!(t.winning_set(0, t.input_index(&[0, 3, 1]).unwrap()), vec![2, 3]);
        for i in 0..t.num_inputs() {
            assert_eq!(t.winning_set(0, i).len(), 2);
            for q in 1..6 {
                assert_eq!(t.winning_set(q, i).len(), 4);
            }
        }
        assert!(modified_torpedo_task(3).is_err());
        assert!(modified_torpedo_task(2).is_err());
    }

    #[test]
    fn qrac_relations() {
        let t = qrac_task(2, 2).unwrap();
        assert_eq!(t.winning_set(0, t.input_index(&[0, 1]).unwrap()), vec![0]);
        let t = qrac_task(4, 3).unwrap();
        assert_eq!(t.winning_set(2, t.input_index(&[2, 1, 0, 2]).unwrap()), vec![0]);
        for q in 0..4 {
            for i in 0..t.num_inputs() {
                assert_eq!(t.winning_set(q, i).len(), 1);
            }
        }
        assert!(qrac_task(1, 2).is_err());
    }

    #[test]
    fn input_indexing_round_trips() {
        let t = modified_torpedo_task(7).unwrap();
        for i in 0..t.num_inputs() {
            assert_eq!(t.input_index(&t.input_tuple(i)).unwrap(), i);
        }
        assert_eq!(t.input_index(&[1, 2, 0]).unwrap(), (7 + 2) * 3);
        assert!(t.input_index(&[0, 0, 3]).is_err());
    }

    #[test]
    fn qubit_torpedo_contains_qrac() {
        // With questions inf and 0 only, each torpedo winner is the complement of the QRAC answer.
        let t = torpedo_task(2).unwrap();
        let r = qrac_task(2, 2).unwrap();
        for i in 0..4 {
            for (tq, rq) in [(0, 0), (1, 1)] {
                let complement: Vec<u32> = r.winning_set(rq, i).iter().map(|c| 1 - c).collect();
                assert_eq!(t.winning_set(tq, i), complement);
            }
        }
    }

    #[test]
    fn tasks_serialize() {
        let t = torpedo_task(3).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: RetrievalTask = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
