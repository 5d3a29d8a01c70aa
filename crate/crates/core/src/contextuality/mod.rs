//! Bounded-memory hidden-variable models and the noncontextual fraction.
//!
//! A one-dit classical strategy is a hidden variable `j` in `Z_d`: each
//! input prepares a distribution over `j`, each question reads `j` out
//! through response vectors. Extremal models are deterministic vertices
//! (an encoding colouring plus a decoding table). The noncontextual
//! fraction of a behaviour is the largest total weight of vertices that
//! fits under it entrywise, found by linear programming.

pub mod simplex;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical_search::{canonical_colourings, DeterministicEncoding};
use crate::error::{Error, Result};
use crate::tasks::{EmpiricalBehaviour, RetrievalTask};
use simplex::{LpScalar, Simplex};

const SUPPORT_TOL: f64 = 1e-12;
const REDUCED_COST_TOL: f64 = 1e-10;
const COLUMNS_PER_ROUND: usize = 2;
const GAP_TOL: f64 = 1e-7;
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_INPUTS: usize = 9;

/// Encoding colouring plus `decoding[q][j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicVertex {
    pub encoding: DeterministicEncoding,
    pub decoding: Vec<Vec<u32>>,
}

impl DeterministicVertex {
    pub fn answer(&self, input: usize, question: usize) -> u32 {
        self.decoding[question][self.encoding.colours()[input] as usize]
    }

    fn indicator(&self, shape: &Shape) -> Vec<bool> {
        let mut a = vec![false; shape.rows()];
        for q in 0..shape.questions {
            for i in 0..shape.inputs {
                a[shape.row(q, i, self.answer(i, q))] = true;
            }
        }
        a
    }

    /// The 0/1 behaviour this vertex induces on `task`.
    pub fn behaviour(&self, task: &RetrievalTask) -> Result<EmpiricalBehaviour> {
        let strategy = crate::tasks::ClassicalStrategy::deterministic(
            task.d(),
            task.d() as usize,
            self.encoding.colours(),
            &self.decoding,
        )?;
        crate::tasks::behaviour_from_classical(&strategy, task)
    }
}

/// Row layout of behaviour vectors: `(q, i, c)` maps to `(q N + i) d + c`.
#[derive(Clone, Copy, Debug)]
struct Shape {
    d: usize,
    inputs: usize,
    questions: usize,
}

impl Shape {
    fn of(e: &EmpiricalBehaviour) -> Self {
        Shape { d: e.d() as usize, inputs: e.num_inputs(), questions: e.questions().len() }
    }

    fn rows(&self) -> usize {
        self.d * self.inputs * self.questions
    }

    fn row(&self, q: usize, i: usize, c: u32) -> usize {
        (q * self.inputs + i) * self.d + c as usize
    }

    fn contexts(&self) -> usize {
        self.inputs * self.questions
    }
}

fn behaviour_vector(e: &EmpiricalBehaviour) -> Vec<f64> {
    let shape = Shape::of(e);
    let mut b = vec![0.0; shape.rows()];
    for q in 0..shape.questions {
        for i in 0..shape.inputs {
            for (c, &p) in e.probabilities(q, i).iter().enumerate() {
                b[shape.row(q, i, c as u32)] = p.max(0.0);
            }
        }
    }
    b
}

/// Best vertex for weights `w` on behaviour rows: for every encoding, each
/// (colour, question) slot independently takes the answer with the
/// smallest (or largest) summed weight. Ties keep the first encoding in
/// canonical order and the smallest answer.
fn price(shape: &Shape, w: &[f64], maximise: bool) -> (f64, DeterministicVertex) {
    let better = |a: f64, b: f64| if maximise { a > b } else { a < b };
    let encodings = canonical_colourings(shape.inputs, shape.d as u32);
    let (idx, score, decoding) = encodings
        .par_iter()
        .enumerate()
        .map(|(idx, colours)| {
            let (score, decoding) = best_decoding(shape, colours, w, maximise);
            (idx, score, decoding)
        })
        .reduce_with(|a, b| if better(b.1, a.1) || (b.1 == a.1 && b.0 < a.0) { b } else { a })
        .expect("at least one encoding");
    let encoding = DeterministicEncoding::new(shape.d as u32, encodings[idx].clone()).expect("valid colours");
    (score, DeterministicVertex { encoding, decoding })
}

/// The `limit` lowest-scoring encodings (each with its best decoding) whose
/// score is below `threshold`, together with the overall minimum score.
fn price_many(shape: &Shape, w: &[f64], threshold: f64, limit: usize) -> (f64, Vec<DeterministicVertex>) {
    let encodings = canonical_colourings(shape.inputs, shape.d as u32);
    let scored: Vec<(f64, usize, Vec<Vec<u32>>)> = encodings
        .par_iter()
        .enumerate()
        .map(|(idx, colours)| {
            let (score, decoding) = best_decoding(shape, colours, w, false);
            (score, idx, decoding)
        })
        .collect();
    let min = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let mut below: Vec<_> = scored.into_iter().filter(|s| s.0 < threshold).collect();
    below.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let vertices = below
        .into_iter()
        .take(limit)
        .map(|(_, idx, decoding)| DeterministicVertex {
            encoding: DeterministicEncoding::new(shape.d as u32, encodings[idx].clone())
                .expect("valid colours"),
            decoding,
        })
        .collect();
    (min, vertices)
}

/// Per-slot optimal decoding for a fixed encoding.
fn best_decoding(shape: &Shape, colours: &[u32], w: &[f64], maximise: bool) -> (f64, Vec<Vec<u32>>) {
    let d = shape.d;
    let better = |a: f64, b: f64| if maximise { a > b } else { a < b };
    let mut score = 0.0;
    let mut decoding = vec![vec![0u32; d]; shape.questions];
    let mut sums = vec![0.0; d * d];
    for (q, row) in decoding.iter_mut().enumerate() {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (i, &j) in colours.iter().enumerate() {
            let base = shape.row(q, i, 0);
            for c in 0..d {
                sums[j as usize * d + c] += w[base + c];
            }
        }
        for (j, slot) in row.iter_mut().enumerate() {
            let mut best_c = 0;
            for c in 1..d {
                if better(sums[j * d + c], sums[j * d + best_c]) {
                    best_c = c;
                }
            }
            *slot = best_c as u32;
            score += sums[j * d + best_c];
        }
    }
    (score, decoding)
}

/// Every (encoding, decoding) pair, deduplicated by induced behaviour.
fn all_vertices(shape: &Shape) -> Vec<DeterministicVertex> {
    let d = shape.d as u32;
    let slots = shape.d * shape.questions;
    let raw_encodings = (d as u64).pow(shape.inputs as u32);
    let raw_decodings = (d as u64).pow(slots as u32);
    let digits = |mut v: u64, n: usize| -> Vec<u32> {
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = (v % d as u64) as u32;
            v /= d as u64;
        }
        out
    };
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for ei in 0..raw_encodings {
        let encoding = DeterministicEncoding::new(d, digits(ei, shape.inputs)).expect("valid colours");
        for di in 0..raw_decodings {
            let flat = digits(di, slots);
            let decoding = flat.chunks(shape.d).map(|c| c.to_vec()).collect();
            let v = DeterministicVertex { encoding: encoding.clone(), decoding };
            if seen.insert(v.indicator(shape)) {
                out.push(v);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NcfMethod {
    /// Every vertex as a column, solved in exact rational arithmetic.
    ExactEnumeration,
    /// Columns priced in on demand, double precision.
    ColumnGeneration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexWeight {
    pub encoding: String,
    pub decoding: Vec<Vec<u32>>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionChecks {
    pub primal_dual_gap: f64,
    pub feasibility_residual: f64,
    /// `max(0, 1 - min_s y.e_s)` over all vertices, plus any negative dual entry.
    pub dual_residual: f64,
    pub columns: usize,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub ncf: f64,
    pub cf: f64,
    pub method: NcfMethod,
    /// Exact optimum when solved in rational arithmetic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_ncf: Option<String>,
    pub weights: Vec<VertexWeight>,
    /// `dual[q][i][c]`.
    pub dual: Vec<Vec<Vec<f64>>>,
    /// `(e - sum_s w_s e_s) / (1 - ncf)` when `ncf < 1`.
    #[serde(skip)]
    pub residual: Option<EmpiricalBehaviour>,
    pub checks: DecompositionChecks,
}

fn check_input(e: &EmpiricalBehaviour) -> Result<Shape> {
    if e.is_quasi() {
        return Err(Error::Validation("the noncontextual fraction needs a nonnegative behaviour".into()));
    }
    if e.d() > 3 {
        return Err(Error::Unsupported(format!(
            "noncontextual fraction is limited to d <= 3 (pricing scans d^N encodings); got d = {}",
            e.d()
        )));
    }
    if e.num_inputs() > MAX_INPUTS {
        return Err(Error::Unsupported(format!("at most {MAX_INPUTS} inputs supported")));
    }
    Ok(Shape::of(e))
}

/// NCF with the default solver: exact enumeration for `d = 2`, column generation for `d = 3`.
pub fn ncf(e: &EmpiricalBehaviour) -> Result<DecompositionResult> {
    let method = if e.d() == 2 { NcfMethod::ExactEnumeration } else { NcfMethod::ColumnGeneration };
    ncf_with(e, method)
}

pub fn ncf_with(e: &EmpiricalBehaviour, method: NcfMethod) -> Result<DecompositionResult> {
    let shape = check_input(e)?;
    let b = behaviour_vector(e);
    match method {
        NcfMethod::ExactEnumeration => {
            if e.d() != 2 {
                return Err(Error::Unsupported("exact enumeration is only offered for d = 2".into()));
            }
            let vertices = all_vertices(&shape);
            let mut lp = Simplex::<BigRational>::new(b.iter().map(|&v| LpScalar::from_f64(v)).collect())?;
            for v in &vertices {
                lp.add_column(indicator_column(&v.indicator(&shape)), num_traits::One::one())?;
            }
            lp.solve()?;
            let exact = lp.objective();
            let y: Vec<f64> = lp.duals().iter().map(LpScalar::to_f64).collect();
            let dual_exact: BigRational = lp.duals().iter().zip(lp.rhs()).map(|(y, b)| y * b).sum();
            if dual_exact != exact {
                return Err(Error::Lp("exact primal and dual objectives differ".into()));
            }
            let x: Vec<f64> = lp.primal().iter().map(LpScalar::to_f64).collect();
            let columns = lp.num_columns();
            let pivots = lp.pivots;
            let mut result =
                assemble(e, &shape, &b, &vertices, &x, &y, NcfMethod::ExactEnumeration, columns, pivots)?;
            result.exact_ncf = Some(exact.to_string());
            Ok(result)
        }
        NcfMethod::ColumnGeneration => {
            let mut lp = Simplex::<f64>::new(b.clone())?;
            let mut vertices = Vec::new();
            let mut seen = std::collections::HashSet::new();
            let mut push = |v: DeterministicVertex,
                            lp: &mut Simplex<f64>,
                            vertices: &mut Vec<DeterministicVertex>|
             -> Result<bool> {
                let ind = v.indicator(&shape);
                if !seen.insert(ind.clone()) {
                    return Ok(false);
                }
                lp.add_column(ind.iter().map(|&t| t as u8 as f64).collect(), 1.0)?;
                vertices.push(v);
                Ok(true)
            };
            // Warm start: the vertex best aligned with e, plus d random ones.
            push(price(&shape, &b, true).1, &mut lp, &mut vertices)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..shape.d {
                let colours = (0..shape.inputs).map(|_| rng.random_range(0..shape.d as u32)).collect();
                let decoding = (0..shape.questions)
                    .map(|_| (0..shape.d).map(|_| rng.random_range(0..shape.d as u32)).collect())
                    .collect();
                let v = DeterministicVertex {
                    encoding: DeterministicEncoding::new(shape.d as u32, colours)?,
                    decoding,
                };
                push(v, &mut lp, &mut vertices)?;
            }
            loop {
                lp.solve()?;
                let y = lp.duals();
                let (min, batch) = price_many(&shape, &y, 1.0 - REDUCED_COST_TOL, COLUMNS_PER_ROUND);
                if 1.0 - min <= REDUCED_COST_TOL {
                    break;
                }
                let mut added = false;
                for v in batch {
                    added |= push(v, &mut lp, &mut vertices)?;
                }
                if !added {
                    return Err(Error::Lp("pricing returned only columns already present".into()));
                }
            }
            let x = lp.primal();
            let y = lp.duals();
            let columns = lp.num_columns();
            let pivots = lp.pivots;
            assemble(e, &shape, &b, &vertices, &x, &y, NcfMethod::ColumnGeneration, columns, pivots)
        }
    }
}

fn indicator_column(ind: &[bool]) -> Vec<BigRational> {
    ind.iter().map(|&t| if t { num_traits::One::one() } else { BigRational::zero() }).collect()
}

/// Package the solution and re-check it independently of the solver.
#[allow(clippy::too_many_arguments)]
fn assemble(
    e: &EmpiricalBehaviour,
    shape: &Shape,
    b: &[f64],
    vertices: &[DeterministicVertex],
    x: &[f64],
    y: &[f64],
    method: NcfMethod,
    columns: usize,
    pivots: usize,
) -> Result<DecompositionResult> {
    let mut combined = vec![0.0; shape.rows()];
    let mut weights = Vec::new();
    let mut total = 0.0;
    let mut min_weight: f64 = 0.0;
    for (v, &w) in vertices.iter().zip(x) {
        min_weight = min_weight.min(w);
        if w <= 0.0 {
            continue;
        }
        total += w;
        for (slot, on) in combined.iter_mut().zip(v.indicator(shape)) {
            if on {
                *slot += w;
            }
        }
        weights.push(VertexWeight {
            encoding: v.encoding.to_string(),
            decoding: v.decoding.clone(),
            weight: w,
        });
    }
    weights.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.encoding.cmp(&b.encoding)));
    let excess = combined.iter().zip(b).map(|(c, e)| c - e).fold(0.0, f64::max);
    let feasibility_residual = excess.max(-min_weight);
    let dual_objective: f64 = y.iter().zip(b).map(|(y, b)| y * b).sum();
    let (min_price, _) = price(shape, y, false);
    let dual_residual = (1.0 - min_price).max(0.0).max(y.iter().fold(0.0, |acc, &v| acc.max(-v)));
    let gap = (total - dual_objective).abs();
    if feasibility_residual > FEASIBILITY_TOL {
        return Err(Error::Lp(format!("decomposition infeasible by {feasibility_residual:e}")));
    }
    if gap > GAP_TOL || dual_residual > 1e-9 {
        return Err(Error::Lp(format!(
            "optimality certificate failed: gap {gap:e}, dual residual {dual_residual:e}"
        )));
    }
    let ncf = total.clamp(0.0, 1.0);
    let mut dual = vec![vec![vec![0.0; shape.d]; shape.inputs]; shape.questions];
    for (q, rows) in dual.iter_mut().enumerate() {
        for (i, row) in rows.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = y[shape.row(q, i, c as u32)];
            }
        }
    }
    let residual = (1.0 - ncf > 1e-6)
        .then(|| {
            let mut rows = vec![vec![vec![0.0; shape.d]; shape.inputs]; shape.questions];
            for (q, per_q) in rows.iter_mut().enumerate() {
                for (i, p) in per_q.iter_mut().enumerate() {
                    for (c, slot) in p.iter_mut().enumerate() {
                        let r = shape.row(q, i, c as u32);
                        *slot = (b[r] - combined[r]).max(0.0);
                    }
                    let s: f64 = p.iter().sum();
                    p.iter_mut().for_each(|v| *v /= s);
                }
            }
            EmpiricalBehaviour::new(e.d(), e.radices().to_vec(), e.questions().to_vec(), rows, false).ok()
        })
        .flatten();
    Ok(DecompositionResult {
        ncf,
        cf: 1.0 - ncf,
        method,
        exact_ncf: None,
        weights,
        dual,
        residual,
        checks: DecompositionChecks {
            primal_dual_gap: gap,
            feasibility_residual,
            dual_residual,
            columns,
            pivots,
        },
    })
}

/// Strongly contextual iff no vertex lies inside the support of `e`.
/// Returns such a vertex when one exists.
pub fn strong_contextuality_check(e: &EmpiricalBehaviour) -> Result<(bool, Option<DeterministicVertex>)> {
    let shape = check_input(e)?;
    let support: Vec<f64> =
        behaviour_vector(e).iter().map(|&p| if p > SUPPORT_TOL { 1.0 } else { 0.0 }).collect();
    let (score, vertex) = price(&shape, &support, true);
    // Scores are sums of 0/1 terms, hence exact.
    if score as usize == shape.contexts() {
        Ok((false, Some(vertex)))
    } else {
        Ok((true, None))
    }
}

/// Preparations `lambda_i` over `Z_d` and response vectors `v_q^c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenVariableModel {
    d: u32,
    /// `states[i][j]`.
    states: Vec<Vec<f64>>,
    /// `responses[q][c][j]`.
    responses: Vec<Vec<Vec<f64>>>,
}

impl HiddenVariableModel {
    pub fn new(d: u32, states: Vec<Vec<f64>>, responses: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n = d as usize;
        for (i, s) in states.iter().enumerate() {
            let sum: f64 = s.iter().sum();
            if s.len() != n || s.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!("preparation {i} is not a distribution over Z_{d}")));
            }
        }
        for (q, family) in responses.iter().enumerate() {
            if family.len() != n || family.iter().any(|v| v.len() != n || v.iter().any(|&x| x < 0.0)) {
                return Err(Error::Validation(format!("responses of question {q} are malformed")));
            }
            for j in 0..n {
                let s: f64 = family.iter().map(|v| v[j]).sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::Validation(format!("responses of question {q} do not sum to ones")));
                }
            }
        }
        Ok(HiddenVariableModel { d, states, responses })
    }

    pub fn from_vertex(v: &DeterministicVertex) -> Self {
        let d = v.encoding.d() as usize;
        let unit = |k: usize| (0..d).map(|j| (j == k) as u8 as f64).collect::<Vec<f64>>();
        let states = v.encoding.colours().iter().map(|&j| unit(j as usize)).collect();
        let responses = v
            .decoding
            .iter()
            .map(|row| {
                (0..d).map(|c| (0..d).map(|j| (row[j] as usize == c) as u8 as f64).collect()).collect()
            })
            .collect();
        HiddenVariableModel { d: d as u32, states, responses }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// `e(c | i, q) = v_q^c . lambda_i`.
    pub fn probability(&self, c: u32, input: usize, question: usize) -> f64 {
        self.responses[question][c as usize].iter().zip(&self.states[input]).map(|(v, l)| v * l).sum()
    }

    pub fn behaviour(&self, task: &RetrievalTask) -> Result<EmpiricalBehaviour> {
        self.check_task(task)?;
        EmpiricalBehaviour::from_fn(task, false, |q, i| {
            (0..self.d).map(|c| self.probability(c, i, q)).collect()
        })
    }

    fn check_task(&self, task: &RetrievalTask) -> Result<()> {
        if self.d != task.d()
            || self.states.len() != task.num_inputs()
            || self.responses.len() != task.questions().len()
        {
            return Err(Error::Validation("model does not match the task".into()));
        }
        Ok(())
    }
}

/// Number of `v_q^c . lambda_i = 0` constraints that hold, over every
/// context and every losing answer `c`.
pub fn count_satisfied_constraints(m: &HiddenVariableModel, task: &RetrievalTask) -> Result<usize> {
    m.check_task(task)?;
    let mut count = 0;
    for q in 0..task.questions().len() {
        for i in 0..task.num_inputs() {
            for c in (0..task.d()).filter(|&c| !task.is_winning(q, i, c)) {
                if m.probability(c, i, q).abs() <= SUPPORT_TOL {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

pub fn total_constraints(task: &RetrievalTask) -> usize {
    (0..task.questions().len())
        .map(|q| {
            (0..task.num_inputs()).map(|i| task.d() as usize - task.winning_set(q, i).len()).sum::<usize>()
        })
        .sum()
}

/// The explicit `d = 3` model: colour classes `{00, 01, 11}`, `{10, 02, 22}`,
/// `{20, 21, 12}` (as `xz`) prepare `f_0, f_1, f_2`, and answer `c` to
/// question `q` reads `f_{sigma_q(c)}` with `sigma_inf(c) = 2c + 2`,
/// `sigma_0(c) = sigma_1(c) = c + 2`, `sigma_2(c) = 2c + 1`.
pub fn explicit_model_d3() -> HiddenVariableModel {
    let class_of = |x: usize, z: usize| match (x, z) {
        (0, 0) | (0, 1) | (1, 1) => 0,
        (1, 0) | (0, 2) | (2, 2) => 1,
        _ => 2,
    };
    let unit = |k: usize| (0..3).map(|j| (j == k) as u8 as f64).collect::<Vec<f64>>();
    let mut states = Vec::with_capacity(9);
    for x in 0..3 {
        for z in 0..3 {
            states.push(unit(class_of(x, z)));
        }
    }
    let sigma: [fn(usize) -> usize; 4] =
        [|c| (2 * c + 2) % 3, |c| (c + 2) % 3, |c| (c + 2) % 3, |c| (2 * c + 1) % 3];
    let responses = sigma.iter().map(|s| (0..3).map(|c| unit(s(c))).collect()).collect();
    HiddenVariableModel::new(3, states, responses).expect("valid model")
}

/// Largest number of satisfiable constraints over deterministic models,
/// with a witness vertex.
pub fn max_satisfiable_constraints(task: &RetrievalTask) -> Result<(usize, DeterministicVertex)> {
    if task.num_inputs() > MAX_INPUTS || task.d() > 3 {
        return Err(Error::Unsupported("constraint scan is limited to d <= 3 and 9 inputs".into()));
    }
    let shape = Shape { d: task.d() as usize, inputs: task.num_inputs(), questions: task.questions().len() };
    // Weight 1 on each losing (context, answer) row: a vertex violates one
    // constraint per context whose answer loses.
    let mut losing = vec![0.0; shape.rows()];
    for q in 0..shape.questions {
        for i in 0..shape.inputs {
            for c in (0..task.d()).filter(|&c| !task.is_winning(q, i, c)) {
                losing[shape.row(q, i, c)] = 1.0;
            }
        }
    }
    let (violations, vertex) = price(&shape, &losing, false);
    Ok((total_constraints(task) - violations as usize, vertex))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Average failure probability `1 - value`.
    pub epsilon: f64,
    /// `1 - theta_C`.
    pub nu: f64,
    pub ncf: f64,
    /// `epsilon - ncf * nu`.
    pub slack: f64,
    pub holds: bool,
}

/// Check `epsilon >= ncf * nu`. A failure indicates a bug, since the
/// inequality holds for every behaviour.
pub fn theorem_bound_check(
    e: &EmpiricalBehaviour,
    task: &RetrievalTask,
    theta_c: &BigRational,
) -> Result<BoundReport> {
    let epsilon = 1.0 - task.value(e)?;
    let nu = 1.0 - ToPrimitive::to_f64(theta_c).unwrap_or(f64::NAN);
    let ncf = ncf(e)?.ncf;
    let slack = epsilon - ncf * nu;
    Ok(BoundReport { epsilon, nu, ncf, slack, holds: slack + 1e-9 >= 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical_search::{encoding_value, exhaustive_classical_value};
    use crate::tasks::{
        behaviour_from_quantum, perfect_torpedo_strategy, qrac_task, qubit_torpedo_strategy, torpedo_task,
    };

    fn optimal_classical_behaviour(task: &RetrievalTask) -> EmpiricalBehaviour {
        let (_, f) = exhaustive_classical_value(task).unwrap();
        let ev = encoding_value(&f, task).unwrap();
        DeterministicVertex { encoding: f, decoding: ev.decoding }.behaviour(task).unwrap()
    }

    #[test]
    fn deterministic_behaviours_are_noncontextual() {
        for d in [2u32, 3] {
            let t = torpedo_task(d).unwrap();
            let r = ncf(&optimal_classical_behaviour(&t)).unwrap();
            assert!((r.ncf - 1.0).abs() < 1e-9, "d={d}: {}", r.ncf);
        }
    }

    #[test]
    fn perfect_quantum_d3_is_strongly_contextual() {
        let t = torpedo_task(3).unwrap();
        let e = behaviour_from_quantum(&perfect_torpedo_strategy(3, 0).unwrap(), &t).unwrap();
        let r = ncf(&e).unwrap();
        assert!(r.ncf.abs() < 1e-9);
        assert_eq!(strong_contextuality_check(&e).unwrap(), (true, None));
    }

    #[test]
    fn support_scan_on_classical_and_uniform() {
        let t = torpedo_task(3).unwrap();
        let e = optimal_classical_behaviour(&t);
        let (strong, witness) = strong_contextuality_check(&e).unwrap();
        assert!(!strong);
        assert_eq!(witness.unwrap().behaviour(&t).unwrap(), e);
        let (strong, witness) = strong_contextuality_check(&EmpiricalBehaviour::uniform(&t)).unwrap();
        assert!(!strong && witness.is_some());
    }

    #[test]
    fn qubit_quantum_ncf_respects_bound() {
        let t = torpedo_task(2).unwrap();
        let e = behaviour_from_quantum(&qubit_torpedo_strategy(), &t).unwrap();
        let theta = BigRational::new(3.into(), 4.into());
        let report = theorem_bound_check(&e, &t, &theta).unwrap();
        assert!(report.holds);
        assert!(report.ncf >= 0.0 && report.ncf <= report.epsilon / 0.25 + 1e-9);
    }

    #[test]
    fn theorem_is_tight_for_optimal_classical() {
        let t = torpedo_task(3).unwrap();
        let (theta, _) = exhaustive_classical_value(&t).unwrap();
        let r = theorem_bound_check(&optimal_classical_behaviour(&t), &t, &theta).unwrap();
        assert!((r.epsilon - 1.0 / 12.0).abs() < 1e-12);
        assert!((r.nu - 1.0 / 12.0).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-9);
    }

    #[test]
    fn explicit_model_constraints() {
        let t = torpedo_task(3).unwrap();
        assert_eq!(total_constraints(&t), 36);
        assert_eq!(count_satisfied_constraints(&explicit_model_d3(), &t).unwrap(), 33);
        let (max, witness) = max_satisfiable_constraints(&t).unwrap();
        assert_eq!(max, 33);
        let m = HiddenVariableModel::from_vertex(&witness);
        assert_eq!(count_satisfied_constraints(&m, &t).unwrap(), 33);
        let uniform =
            HiddenVariableModel::new(3, vec![vec![1.0 / 3.0; 3]; 9], vec![vec![vec![1.0 / 3.0; 3]; 3]; 4])
                .unwrap();
        assert_eq!(count_satisfied_constraints(&uniform, &t).unwrap(), 0);
    }

    #[test]
    fn explicit_model_value() {
        let t = torpedo_task(3).unwrap();
        let e = explicit_model_d3().behaviour(&t).unwrap();
        assert!((t.value(&e).unwrap() - 11.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn hidden_variable_model_validation() {
        assert!(HiddenVariableModel::new(2, vec![vec![0.5, 0.6]], vec![]).is_err());
        assert!(HiddenVariableModel::new(
            2,
            vec![vec![0.5, 0.5]],
            vec![vec![vec![1.0, 0.0], vec![0.0, 0.5]]]
        )
        .is_err());
    }

    #[test]
    fn column_generation_matches_enumeration_d2() {
        let t = torpedo_task(2).unwrap();
        let r = qrac_task(2, 2).unwrap();
        let mut cases = vec![
            behaviour_from_quantum(&qubit_torpedo_strategy(), &t).unwrap(),
            EmpiricalBehaviour::uniform(&t),
            optimal_classical_behaviour(&t),
            EmpiricalBehaviour::uniform(&r),
        ];
        let q = behaviour_from_quantum(&qubit_torpedo_strategy(), &t).unwrap();
        cases.push(q.mix(&EmpiricalBehaviour::uniform(&t), 0.3).unwrap());
        let (_, qrac_quantum) = crate::tasks::qrac21_strategies();
        cases.push(behaviour_from_quantum(&qrac_quantum, &r).unwrap());
        for e in &cases {
            let exact = ncf_with(e, NcfMethod::ExactEnumeration).unwrap();
            let cg = ncf_with(e, NcfMethod::ColumnGeneration).unwrap();
            assert!((exact.ncf - cg.ncf).abs() < 1e-7, "{} vs {}", exact.ncf, cg.ncf);
            assert!(exact.checks.primal_dual_gap < 1e-12);
            assert!(cg.checks.primal_dual_gap < 1e-7);
        }
    }

    #[test]
    fn pricing_matches_vertex_enumeration() {
        let t = torpedo_task(2).unwrap();
        let shape = Shape::of(&EmpiricalBehaviour::uniform(&t));
        let vertices = all_vertices(&shape);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            // Small integers keep every sum exact.
            let w: Vec<f64> = (0..shape.rows()).map(|_| rng.random_range(-5..=5) as f64).collect();
            for maximise in [false, true] {
                let brute = vertices
                    .iter()
                    .map(|v| {
                        v.indicator(&shape).iter().zip(&w).filter(|(on, _)| **on).map(|(_, x)| x).sum::<f64>()
                    })
                    .fold(if maximise { f64::MIN } else { f64::MAX }, |a, b| {
                        if maximise {
                            a.max(b)
                        } else {
                            a.min(b)
                        }
                    });
                assert_eq!(price(&shape, &w, maximise).0, brute);
            }
        }
    }

    #[test]
    fn mixing_with_noise_increases_ncf() {
        let t = torpedo_task(3).unwrap();
        let e = behaviour_from_quantum(&perfect_torpedo_strategy(3, 0).unwrap(), &t).unwrap();
        let u = EmpiricalBehaviour::uniform(&t);
        let mut last = -1.0;
        for s in [0.0, 0.25, 0.5, 1.0] {
            let v = ncf(&e.mix(&u, s).unwrap()).unwrap().ncf;
            assert!(v >= last - 1e-9, "t={s}: {v} < {last}");
            last = v;
        }
        assert!((last - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_quasi_and_large_d() {
        let t = torpedo_task(2).unwrap();
        let quasi = EmpiricalBehaviour::from_fn(&t, true, |_, _| vec![1.5, -0.5]).unwrap();
        assert!(ncf(&quasi).is_err());
        let t5 = torpedo_task(5).unwrap();
        assert!(matches!(ncf(&EmpiricalBehaviour::uniform(&t5)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn decomposition_serializes() {
        let t = torpedo_task(2).unwrap();
        let r = ncf(&EmpiricalBehaviour::uniform(&t)).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["ncf", "cf", "weights", "dual", "checks"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let total: f64 = r.weights.iter().map(|w| w.weight).sum();
        assert!((total - r.ncf).abs() < 1e-9);
    }
}
