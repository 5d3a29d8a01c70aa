use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use torpedo::algebra::{mub_system, ComplexMatrix, StateVector};
use torpedo::classical_search::{
    encoding_value, exhaustive_classical_value, random_search_perfect, verify_perfect, DeterministicEncoding,
    SearchConfig,
};
use torpedo::contextuality::{ncf_with, strong_contextuality_check, DeterministicVertex, NcfMethod};
use torpedo::tasks::{
    behaviour_from_quantum, mixed_perfect_torpedo_strategy, modified_torpedo_task, perfect_modified_strategy,
    perfect_state, perfect_torpedo_strategy, postquantum_qubit_torpedo_strategy, qrac_task,
    qubit_torpedo_strategy, torpedo_task, BornStrategy, EmpiricalBehaviour, RetrievalTask,
};
use torpedo::transformational::{behaviour_from_transformational, reversible_gate_strategy_d3};
use torpedo::verification::{all_criteria, criterion};
use torpedo::wigner::{negativity, phase_point_operator, qubit_phase_point, wigner_function, WignerGrid};
use torpedo::{Error, Question};

const BEHAVIOUR_SCHEMA: &str = include_str!("../../../schemas/behaviour.v1.json");

/// A command's machine result, its human summary and whether every
/// assertion it makes held.
pub struct Outcome {
    pub result: Value,
    pub table: Vec<(String, String)>,
    pub ok: bool,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input: infeasible dimension, malformed file, schema violation.
    Input(String),
    /// A computation failed.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Lp(_) | Error::Infeasible(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn row(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialise")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TaskArg {
    Torpedo,
    Qrac,
    Modified,
}

fn build_task(task: TaskArg, d: u32, n: usize) -> CliResult<RetrievalTask> {
    Ok(match task {
        TaskArg::Torpedo => torpedo_task(d)?,
        TaskArg::Qrac => qrac_task(n, d)?,
        TaskArg::Modified => modified_torpedo_task(d)?,
    })
}

pub fn classical_value(task: TaskArg, d: u32, n: usize) -> CliResult<Outcome> {
    let t = build_task(task, d, n)?;
    let (value, witness) = exhaustive_classical_value(&t)?;
    let ev = encoding_value(&witness, &t)?;
    let result = json!({
        "task": t.kind(),
        "d": d,
        "inputs": t.num_inputs(),
        "value": value.to_string(),
        "value_f64": value.to_f64(),
        "witness": witness.to_string(),
        "decoding": ev.decoding,
        "satisfied_slots": ev.satisfied,
    });
    let table = vec![
        row("task", format!("{:?}", t.kind())),
        row("d", d),
        row("value", &value),
        row("witness", &witness),
    ];
    Ok(Outcome { result, table, ok: true, seed: None })
}

/// `sum |W|` of a message state; qubits use the qubit phase points.
fn state_negativity(rho: &ComplexMatrix, d: u32) -> CliResult<f64> {
    if d == 2 {
        let mut total = 0.0;
        for x in 0..2 {
            for z in 0..2 {
                let a = qubit_phase_point(x, z);
                let w: Complex64 = (rho * a).trace() / Complex64::new(2.0, 0.0);
                total += w.re.abs();
            }
        }
        return Ok(total);
    }
    Ok(negativity(&wigner_function(rho, d)?))
}

fn max_forbidden(e: &EmpiricalBehaviour, t: &RetrievalTask) -> f64 {
    let mut worst: f64 = 0.0;
    for q in 0..t.questions().len() {
        for i in 0..t.num_inputs() {
            for c in (0..t.d()).filter(|&c| !t.is_winning(q, i, c)) {
                worst = worst.max(e.probability(c, i, q).abs());
            }
        }
    }
    worst
}

pub fn quantum_verify(d: u32, ell: u32, modified: bool) -> CliResult<Outcome> {
    let (t, s) = if d == 2 {
        if modified || ell != 0 {
            return Err(CliError::Input("the qubit game has a single level and no modified variant".into()));
        }
        (torpedo_task(2)?, qubit_torpedo_strategy())
    } else if modified {
        (modified_torpedo_task(d)?, perfect_modified_strategy(d)?)
    } else {
        (torpedo_task(d)?, perfect_torpedo_strategy(d, ell)?)
    };
    let e = behaviour_from_quantum(&s, &t)?;
    let value = t.value(&e)?;
    let forbidden = max_forbidden(&e, &t);
    let negs = s.states().iter().map(|rho| state_negativity(rho, d)).collect::<CliResult<Vec<f64>>>()?;
    let neg_min = negs.iter().copied().fold(f64::INFINITY, f64::min);
    let neg_max = negs.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut result = json!({
        "task": t.kind(),
        "d": d,
        "value": value,
        "max_forbidden": forbidden,
        "wigner_sum_abs": { "min": neg_min, "max": neg_max },
    });
    let ok = if d == 2 {
        let analytic = 0.5 * (1.0 + 1.0 / 3f64.sqrt());
        result["analytic_value"] = json!(analytic);
        (value - analytic).abs() <= 1e-9
    } else {
        if modified {
            // Value restricted to the requested level.
            let levels = (d - 1) / 2;
            if ell >= levels {
                return Err(CliError::Input(format!("level {ell} out of range for d = {d}")));
            }
            let mut total = 0.0;
            let mut count = 0;
            for q in 0..t.questions().len() {
                for i in (0..t.num_inputs()).filter(|&i| t.input_tuple(i)[2] == ell) {
                    total += t.winning_set(q, i).iter().map(|&c| e.probability(c, i, q)).sum::<f64>();
                    count += 1;
                }
            }
            result["level"] = json!(ell);
            result["level_value"] = json!(total / count as f64);
        } else {
            result["level"] = json!(ell);
        }
        (value - 1.0).abs() <= 1e-12 && forbidden <= 1e-12
    };
    result["passed"] = json!(ok);
    let table = vec![
        row("task", format!("{:?}", t.kind())),
        row("d", d),
        row("value", format!("{value:.15}")),
        row("max forbidden", format!("{forbidden:.3e}")),
        row("sum |W| of states", format!("{neg_min:.6} .. {neg_max:.6}")),
        row("passed", ok),
    ];
    Ok(Outcome { result, table, ok, seed: None })
}

pub struct SearchArgs {
    pub d: u32,
    pub modified: bool,
    pub config: SearchConfig,
}

pub fn search(args: SearchArgs) -> CliResult<Outcome> {
    let t = if args.modified { modified_torpedo_task(args.d)? } else { torpedo_task(args.d)? };
    let r = random_search_perfect(&t, &args.config)?;
    let verified = verify_perfect(&r.best, &t);
    if r.perfect && !verified {
        return Err(CliError::Internal("search reported a perfect strategy that fails verification".into()));
    }
    let mut result = to_value(&r);
    result["task"] = to_value(&t.kind());
    result["verified"] = json!(verified);
    let table = vec![
        row("task", format!("{:?}", t.kind())),
        row("d", args.d),
        row("perfect", r.perfect),
        row("best value", &r.value),
        row("best encoding", &r.best),
        row("restarts", r.stats.restarts_used),
        row("steps", r.stats.steps),
        row("timed out", r.stats.timed_out),
    ];
    Ok(Outcome { result, table, ok: true, seed: Some(args.config.seed) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Auto,
    Exact,
    ColumnGeneration,
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not valid JSON: {e}", path.display())))
}

/// Parse a behaviour file, checking it against the published schema first.
pub fn load_behaviour(path: &Path) -> CliResult<EmpiricalBehaviour> {
    let value = read_json(path)?;
    let schema: Value = serde_json::from_str(BEHAVIOUR_SCHEMA).expect("bundled schema is JSON");
    if let Err(e) = jsonschema::validate(&schema, &value) {
        return Err(CliError::Input(format!("{} violates the behaviour schema: {e}", path.display())));
    }
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn ncf(path: &Path, method: MethodArg) -> CliResult<Outcome> {
    let e = load_behaviour(path)?;
    if e.is_quasi() {
        return Err(CliError::Input("the noncontextual fraction needs a nonnegative behaviour".into()));
    }
    let method = match method {
        MethodArg::Auto if e.d() == 2 => NcfMethod::ExactEnumeration,
        MethodArg::Auto | MethodArg::ColumnGeneration => NcfMethod::ColumnGeneration,
        MethodArg::Exact => NcfMethod::ExactEnumeration,
    };
    let r = ncf_with(&e, method)?;
    let (strong, _) = strong_contextuality_check(&e)?;
    let mut result = to_value(&r);
    result["strongly_contextual"] = json!(strong);
    let table = vec![
        row("d", e.d()),
        row("method", format!("{:?}", r.method)),
        row("ncf", format!("{:.12}", r.ncf)),
        row("cf", format!("{:.12}", r.cf)),
        row("strongly contextual", strong),
        row("columns", r.checks.columns),
        row("primal-dual gap", format!("{:.3e}", r.checks.primal_dual_gap)),
    ];
    Ok(Outcome { result, table, ok: true, seed: None })
}

fn parse_ints(s: &str, n: usize, spec: &str) -> CliResult<Vec<i64>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(CliError::Input(format!("state {spec:?} needs {n} comma-separated values")));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| CliError::Input(format!("bad number {p:?} in {spec:?}"))))
        .collect()
}

/// State specifications: `psi:x,z[,l]`, `mixed:x,z`, `basis:q,k`
/// (`q` a direction label), `phase:x,z` and `identity`.
pub fn parse_state(spec: &str, d: u32) -> CliResult<ComplexMatrix> {
    let n = d as usize;
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let outer = |v: StateVector| &v * v.adjoint();
    Ok(match kind {
        "psi" => {
            let count = args.split(',').count();
            let v = parse_ints(args, count.clamp(2, 3), spec)?;
            let ell = v.get(2).copied().unwrap_or(0);
            outer(perfect_state(
                d,
                v[0],
                v[1],
                u32::try_from(ell).map_err(|_| CliError::Input("negative level".into()))?,
            )?)
        }
        "mixed" => {
            let v = parse_ints(args, 2, spec)?;
            let a = phase_point_operator(d, v[0], v[1])?;
            (ComplexMatrix::identity(n, n) - a.matrix()) / Complex64::new((d - 1) as f64, 0.0)
        }
        "phase" => {
            let v = parse_ints(args, 2, spec)?;
            phase_point_operator(d, v[0], v[1])?.into_matrix()
        }
        "basis" => {
            let (q, k) =
                args.split_once(',').ok_or_else(|| CliError::Input(format!("state {spec:?} needs q,k")))?;
            let q: Question = q.trim().parse()?;
            let k: usize =
                k.trim().parse().map_err(|_| CliError::Input(format!("bad outcome in {spec:?}")))?;
            let m = mub_system(d)?;
            let qi = m
                .question_index(q)
                .ok_or_else(|| CliError::Input(format!("no direction {q} for d = {d}")))?;
            if k >= n {
                return Err(CliError::Input(format!("outcome {k} out of range")));
            }
            m.projector(qi, k).clone()
        }
        "identity" => ComplexMatrix::identity(n, n) / Complex64::new(d as f64, 0.0),
        _ => return Err(CliError::Input(format!("unrecognised state {spec:?}"))),
    })
}

pub fn wigner(spec: &str, d: u32, csv: Option<&PathBuf>) -> CliResult<Outcome> {
    let rho = parse_state(spec, d)?;
    let w: WignerGrid = wigner_function(&rho, d)?;
    if let Some(path) = csv {
        std::fs::write(path, w.to_csv())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let sum_abs = negativity(&w);
    let min = w.rows().iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let result = json!({
        "d": d,
        "state": spec,
        "grid": w.rows(),
        "sum_abs": sum_abs,
        "min": min,
        "total": w.total(),
    });
    let mut table = vec![row("state", spec), row("d", d)];
    for (x, r) in w.rows().iter().enumerate() {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:+.6}")).collect();
        table.push(row(&format!("x = {x}"), cells.join("  ")));
    }
    table.push(row("sum |W|", format!("{sum_abs:.6}")));
    Ok(Outcome { result, table, ok: true, seed: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyArg {
    /// Perfect pure states measured in the MUBs (odd d).
    Perfect,
    /// `(I - A_{x,z}) / (d - 1)` measured in the MUBs (odd d).
    MixedPerfect,
    /// Perfect strategy for the modified game (odd d >= 5).
    Modified,
    /// The qubit strategy (d = 2).
    Qubit,
    /// Qubit phase-point operators in place of states (d = 2).
    Postquantum,
    /// An optimal deterministic classical strategy (d <= 3).
    ClassicalOptimal,
    /// The reversible-gate sequential strategy (d = 3).
    Reversible,
    /// Uniformly random answers.
    Uniform,
}

fn behaviour_csv(e: &EmpiricalBehaviour, t: &RetrievalTask) -> String {
    let d = e.d() as usize;
    let mut out = String::from("input,question");
    for c in 0..d {
        out.push_str(&format!(",p{c}"));
    }
    out.push('\n');
    for (q, label) in t.questions().iter().enumerate() {
        for i in 0..t.num_inputs() {
            let input: Vec<String> = t.input_tuple(i).iter().map(u32::to_string).collect();
            out.push_str(&format!("{},{label}", input.join(" ")));
            for p in e.probabilities(q, i) {
                out.push_str(&format!(",{p:.17}"));
            }
            out.push('\n');
        }
    }
    out
}

pub fn export_behaviour(
    strategy: StrategyArg,
    d: u32,
    ell: u32,
    out: Option<&PathBuf>,
    csv: Option<&PathBuf>,
) -> CliResult<Outcome> {
    let (t, e) = match strategy {
        StrategyArg::Perfect => {
            let t = torpedo_task(d)?;
            let e = behaviour_from_quantum(&perfect_torpedo_strategy(d, ell)?, &t)?;
            (t, e)
        }
        StrategyArg::MixedPerfect => {
            let t = torpedo_task(d)?;
            let e = behaviour_from_quantum(&mixed_perfect_torpedo_strategy(d)?, &t)?;
            (t, e)
        }
        StrategyArg::Modified => {
            let t = modified_torpedo_task(d)?;
            let e = behaviour_from_quantum(&perfect_modified_strategy(d)?, &t)?;
            (t, e)
        }
        StrategyArg::Qubit | StrategyArg::Postquantum => {
            if d != 2 {
                return Err(CliError::Input("qubit strategies need d = 2".into()));
            }
            let t = torpedo_task(2)?;
            let e = if strategy == StrategyArg::Qubit {
                behaviour_from_quantum(&qubit_torpedo_strategy(), &t)?
            } else {
                behaviour_from_quantum(&postquantum_qubit_torpedo_strategy(), &t)?
            };
            (t, e)
        }
        StrategyArg::ClassicalOptimal => {
            let t = torpedo_task(d)?;
            let (_, f) = exhaustive_classical_value(&t)?;
            let e = vertex_behaviour(&f, &t)?;
            (t, e)
        }
        StrategyArg::Reversible => {
            if d != 3 {
                return Err(CliError::Input("the reversible-gate strategy is defined for d = 3".into()));
            }
            let t = torpedo_task(3)?;
            let e = behaviour_from_transformational(&reversible_gate_strategy_d3(), &t)?;
            (t, e)
        }
        StrategyArg::Uniform => {
            let t = torpedo_task(d)?;
            let e = EmpiricalBehaviour::uniform(&t);
            (t, e)
        }
    };
    let behaviour = to_value(&e);
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&behaviour).expect("behaviours serialise");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = csv {
        std::fs::write(path, behaviour_csv(&e, &t))
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let value = t.value(&e)?;
    let result = json!({
        "strategy": format!("{strategy:?}").to_lowercase(),
        "task": t.kind(),
        "value": value,
        "behaviour": behaviour,
    });
    let table = vec![
        row("strategy", format!("{strategy:?}")),
        row("task", format!("{:?}", t.kind())),
        row("d", d),
        row("value", format!("{value:.15}")),
        row("quasi", e.is_quasi()),
    ];
    Ok(Outcome { result, table, ok: true, seed: None })
}

fn vertex_behaviour(f: &DeterministicEncoding, t: &RetrievalTask) -> CliResult<EmpiricalBehaviour> {
    let ev = encoding_value(f, t)?;
    Ok(DeterministicVertex { encoding: f.clone(), decoding: ev.decoding }.behaviour(t)?)
}

pub fn report(only: Option<u8>) -> CliResult<Outcome> {
    let reports = match only {
        Some(id) => vec![criterion(id).ok_or_else(|| CliError::Input(format!("no criterion {id}")))?],
        None => all_criteria(),
    };
    let ok = reports.iter().all(|r| r.passed());
    // Elapsed times vary between runs, so they stay out of the JSON.
    let mut values: Vec<Value> = reports.iter().map(to_value).collect();
    for v in &mut values {
        if let Some(obj) = v.as_object_mut() {
            obj.remove("elapsed_secs");
        }
    }
    let result = json!({
        "passed": ok,
        "criteria": values,
        "summary": reports.iter().map(|r| json!({"id": r.id, "passed": r.passed()})).collect::<Vec<_>>(),
    });
    let mut table = Vec::new();
    for r in &reports {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        table.push(row(
            &format!("criterion {:>2}", r.id),
            format!("{verdict}  {} ({:.2} s)", r.title, r.elapsed_secs),
        ));
        for c in r.checks.iter().filter(|c| !c.passed) {
            table.push(row("    failed", format!("{}: {}", c.name, c.detail)));
        }
    }
    Ok(Outcome { result, table, ok, seed: None })
}
