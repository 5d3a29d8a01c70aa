use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RetrievalTask;
use crate::error::{Error, Result};
use crate::question::Question;

const NEGATIVE_TOL: f64 = 1e-12;
const NORMALISATION_TOL: f64 = 1e-9;

/// Conditional distributions `p(c | i, q)` for every input and question.
///
/// Rows of a `quasi` behaviour only need to sum to one; ordinary behaviours
/// must also be nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalBehaviour {
    d: u32,
    radices: Vec<u32>,
    questions: Vec<Question>,
    /// `table[q][i][c]`.
    table: Vec<Vec<Vec<f64>>>,
    quasi: bool,
}

impl EmpiricalBehaviour {
    pub fn new(
        d: u32,
        radices: Vec<u32>,
        questions: Vec<Question>,
        table: Vec<Vec<Vec<f64>>>,
        quasi: bool,
    ) -> Result<Self> {
        let inputs: usize = radices.iter().map(|&r| r as usize).product();
        if table.len() != questions.len() {
            return Err(Error::DimensionMismatch { expected: questions.len(), found: table.len() });
        }
        for (q, rows) in table.iter().enumerate() {
            if rows.len() != inputs {
                return Err(Error::DimensionMismatch { expected: inputs, found: rows.len() });
            }
            for (i, probs) in rows.iter().enumerate() {
                if probs.len() != d as usize {
                    return Err(Error::DimensionMismatch { expected: d as usize, found: probs.len() });
                }
                let sum: f64 = probs.iter().sum();
                if !probs.iter().all(|p| p.is_finite()) || (sum - 1.0).abs() > NORMALISATION_TOL {
                    return Err(Error::Validation(format!(
                        "distribution for question {} input {i} sums to {sum}",
                        questions[q]
                    )));
                }
                if !quasi && probs.iter().any(|&p| p < -NEGATIVE_TOL) {
                    return Err(Error::Validation(format!(
                        "negative probability for question {} input {i}",
                        questions[q]
                    )));
                }
            }
        }
        Ok(EmpiricalBehaviour { d, radices, questions, table, quasi })
    }

    /// Build from `p(q, i)` returning the outcome distribution; `quasi` is
    /// set exactly when some entry is below `-1e-12`.
    pub fn from_fn<F>(task: &RetrievalTask, allow_quasi: bool, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Vec<f64>,
    {
        let table: Vec<Vec<Vec<f64>>> =
            (0..task.questions().len()).map(|q| (0..task.num_inputs()).map(|i| f(q, i)).collect()).collect();
        let negative = table.iter().flatten().flatten().any(|&p| p < -NEGATIVE_TOL);
        if negative && !allow_quasi {
            return Err(Error::Validation("behaviour has negative entries".into()));
        }
        Self::new(task.d(), task.radices().to_vec(), task.questions().to_vec(), table, negative)
    }

    /// Every context answered uniformly at random.
    pub fn uniform(task: &RetrievalTask) -> Self {
        let p = 1.0 / task.d() as f64;
        Self::from_fn(task, false, |_, _| vec![p; task.d() as usize]).expect("uniform rows are valid")
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn num_inputs(&self) -> usize {
        self.table.first().map_or(0, Vec::len)
    }

    pub fn is_quasi(&self) -> bool {
        self.quasi
    }

    pub fn probabilities(&self, question: usize, input: usize) -> &[f64] {
        &self.table[question][input]
    }

    pub fn probability(&self, answer: u32, input: usize, question: usize) -> f64 {
        self.table[question][input][answer as usize]
    }

    pub fn min_entry(&self) -> f64 {
        self.table.iter().flatten().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether this behaviour has the task's shape.
    pub fn check_matches(&self, task: &RetrievalTask) -> Result<()> {
        if self.d != task.d() || self.radices != task.radices() || self.questions != task.questions() {
            return Err(Error::Validation(
                "behaviour does not match the task's dimension, inputs or questions".into(),
            ));
        }
        Ok(())
    }

    /// `(1 - t) self + t other`.
    pub fn mix(&self, other: &EmpiricalBehaviour, t: f64) -> Result<EmpiricalBehaviour> {
        if self.d != other.d || self.radices != other.radices || self.questions != other.questions {
            return Err(Error::Validation("cannot mix behaviours of different shape".into()));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(pa, pb)| pa.iter().zip(pb).map(|(x, y)| (1.0 - t) * x + t * y).collect())
                    .collect()
            })
            .collect();
        let quasi = self.quasi || other.quasi;
        Self::new(self.d, self.radices.clone(), self.questions.clone(), table, quasi)
    }

    /// Copy with negative entries clipped to zero and rows renormalised.
    pub fn clipped(&self) -> EmpiricalBehaviour {
        let table = self
            .table
            .iter()
            .map(|rows| {
                rows.iter()
                    .map(|p| {
                        let clipped: Vec<f64> = p.iter().map(|v| v.max(0.0)).collect();
                        let s: f64 = clipped.iter().sum();
                        clipped.iter().map(|v| v / s).collect()
                    })
                    .collect()
            })
            .collect();
        EmpiricalBehaviour { table, quasi: false, ..self.clone() }
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    input: Vec<u32>,
    question: Question,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    d: u32,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radices: Option<Vec<u32>>,
    questions: Vec<Question>,
    table: Vec<Row>,
    #[serde(default)]
    quasi: bool,
}

impl Serialize for EmpiricalBehaviour {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut table = Vec::with_capacity(self.questions.len() * self.num_inputs());
        for (q, rows) in self.table.iter().enumerate() {
            for (i, probs) in rows.iter().enumerate() {
                table.push(Row {
                    input: input_tuple(&self.radices, i),
                    question: self.questions[q],
                    probs: probs.clone(),
                });
            }
        }
        let uniform = self.radices.iter().all(|&r| r == self.d);
        Record {
            d: self.d,
            n: self.radices.len(),
            radices: (!uniform).then(|| self.radices.clone()),
            questions: self.questions.clone(),
            table,
            quasi: self.quasi,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EmpiricalBehaviour {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = Record::deserialize(deserializer)?;
        let radices = rec.radices.unwrap_or_else(|| vec![rec.d; rec.n]);
        if radices.len() != rec.n {
            return Err(D::Error::custom("radices length differs from n"));
        }
        let inputs: usize = radices.iter().map(|&r| r as usize).product();
        let mut table: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; inputs]; rec.questions.len()];
        for row in rec.table {
            let q = rec
                .questions
                .iter()
                .position(|&p| p == row.question)
                .ok_or_else(|| D::Error::custom(format!("unknown question {}", row.question)))?;
            if row.input.len() != radices.len() || row.input.iter().zip(&radices).any(|(v, r)| v >= r) {
                return Err(D::Error::custom(format!("bad input {:?}", row.input)));
            }
            let i =
                row.input.iter().zip(&radices).fold(0usize, |acc, (&v, &r)| acc * r as usize + v as usize);
            if table[q][i].replace(row.probs).is_some() {
                return Err(D::Error::custom(format!("duplicate row for {:?}, {}", row.input, row.question)));
            }
        }
        let table = table
            .into_iter()
            .map(|rows| rows.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| D::Error::custom("behaviour table is missing contexts"))?;
        EmpiricalBehaviour::new(rec.d, radices, rec.questions, table, rec.quasi).map_err(D::Error::custom)
    }
}

fn input_tuple(radices: &[u32], mut index: usize) -> Vec<u32> {
    let mut out = vec![0; radices.len()];
    for (slot, &r) in out.iter_mut().zip(radices).rev() {
        *slot = (index % r as usize) as u32;
        index /= r as usize;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::{modified_torpedo_task, torpedo_task};

    #[test]
    fn uniform_value() {
        let t = torpedo_task(3).unwrap();
        let e = EmpiricalBehaviour::uniform(&t);
        assert!((t.value(&e).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_rows() {
        let t = torpedo_task(2).unwrap();
        assert!(EmpiricalBehaviour::from_fn(&t, false, |_, _| vec![0.7, 0.7]).is_err());
        assert!(EmpiricalBehaviour::from_fn(&t, false, |_, _| vec![1.5, -0.5]).is_err());
        let quasi = EmpiricalBehaviour::from_fn(&t, true, |_, _| vec![1.5, -0.5]).unwrap();
        assert!(quasi.is_quasi());
        assert!((quasi.clipped().probability(0, 0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        for t in [torpedo_task(3).unwrap(), modified_torpedo_task(5).unwrap()] {
            let e = EmpiricalBehaviour::from_fn(&t, false, |q, i| {
                let mut p = vec![0.0; t.d() as usize];
                p[(q + i) % t.d() as usize] = 1.0;
                p
            })
            .unwrap();
            let json = serde_json::to_string(&e).unwrap();
            let back: EmpiricalBehaviour = serde_json::from_str(&json).unwrap();
            assert_eq!(back, e);
            back.check_matches(&t).unwrap();
        }
    }

    #[test]
    fn json_rejects_missing_context() {
        let t = torpedo_task(2).unwrap();
        let e = EmpiricalBehaviour::uniform(&t);
        let mut v: serde_json::Value = serde_json::to_value(&e).unwrap();
        v["table"].as_array_mut().unwrap().pop();
        assert!(serde_json::from_value::<EmpiricalBehaviour>(v).is_err());
    }
}
