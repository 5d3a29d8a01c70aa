//! Classical values from deterministic encodings.
//!
//! A deterministic one-dit strategy colours every input with a message
//! `j`; for each colour and question Bob then answers whatever wins on the
//! most inputs of that colour. Small tasks are solved exactly by
//! enumerating colourings up to relabelling. For larger tasks a randomised
//! hill climb (our own design) looks for colourings where every
//! (colour, question) slot has an answer winning on the whole class.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tasks::RetrievalTask;

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// `f(i)` for every input index `i`; colours lie in `0..d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicEncoding {
    d: u32,
    colours: Vec<u32>,
}

impl DeterministicEncoding {
    pub fn new(d: u32, colours: Vec<u32>) -> Result<Self> {
        if d as usize > DIGITS.len() {
            return Err(Error::InvalidDimension { d, reason: "colourings print as base-36 digits" });
        }
        if let Some(&c) = colours.iter().find(|&&c| c >= d) {
            return Err(Error::OutOfRange { what: "colour", value: c as i64 });
        }
        Ok(DeterministicEncoding { d, colours })
    }

    /// Parse a row-major dit string such as `"001102221"`.
    pub fn parse(d: u32, s: &str) -> Result<Self> {
        let colours = s
            .chars()
            .map(|ch| {
                ch.to_digit(36).ok_or_else(|| Error::Validation(format!("bad colour character {ch:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, colours)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    /// Relabel colours in order of first appearance.
    pub fn canonical(&self) -> Self {
        let mut map = vec![u32::MAX; self.d as usize];
        let mut next = 0;
        let colours = self
            .colours
            .iter()
            .map(|&c| {
                if map[c as usize] == u32::MAX {
                    map[c as usize] = next;
                    next += 1;
                }
                map[c as usize]
            })
            .collect();
        DeterministicEncoding { d: self.d, colours }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Apply `c -> perm[c]`.
    pub fn relabel(&self, perm: &[u32]) -> Self {
        DeterministicEncoding { d: self.d, colours: self.colours.iter().map(|&c| perm[c as usize]).collect() }
    }

    fn check_task(&self, task: &RetrievalTask) -> Result<()> {
        if self.colours.len() != task.num_inputs() {
            return Err(Error::DimensionMismatch { expected: task.num_inputs(), found: self.colours.len() });
        }
        if self.d != task.d() {
            return Err(Error::DimensionMismatch { expected: task.d() as usize, found: self.d as usize });
        }
        Ok(())
    }
}

impl fmt::Display for DeterministicEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.colours {
            write!(f, "{}", DIGITS[c as usize] as char)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct EncodingRecord {
    d: u32,
    colouring: String,
}

impl Serialize for DeterministicEncoding {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EncodingRecord { d: self.d, colouring: self.to_string() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DeterministicEncoding {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rec = EncodingRecord::deserialize(deserializer)?;
        DeterministicEncoding::parse(rec.d, &rec.colouring).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        BigRational::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Exact value of an encoding under its best decoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingValue {
    #[serde(with = "rational_string")]
    pub value: BigRational,
    /// Sum over (colour, question) of the best winning count.
    pub satisfied: u64,
    /// `decoding[q][j]`: Bob's answer; ties go to the smallest answer.
    pub decoding: Vec<Vec<u32>>,
}

/// `(1 / (N |Q|)) sum_{j,q} max_c |{i : f(i) = j, c in w_q(i)}|` over `N` inputs.
pub fn encoding_value(f: &DeterministicEncoding, task: &RetrievalTask) -> Result<EncodingValue> {
    f.check_task(task)?;
    let d = task.d() as usize;
    let mut satisfied = 0u64;
    let mut decoding = Vec::with_capacity(task.questions().len());
    for q in 0..task.questions().len() {
        let mut counts = vec![vec![0u64; d]; d];
        for (i, &j) in f.colours.iter().enumerate() {
            let mask = task.winning_mask(q, i);
            for (c, slot) in counts[j as usize].iter_mut().enumerate() {
                *slot += mask >> c & 1;
            }
        }
        let mut row = Vec::with_capacity(d);
        for per_colour in &counts {
            let (best_c, best) =
                per_colour
                    .iter()
                    .enumerate()
                    .fold((0, 0), |acc, (c, &n)| if n > acc.1 { (c, n) } else { acc });
            satisfied += best;
            row.push(best_c as u32);
        }
        decoding.push(row);
    }
    let value = BigRational::new(BigInt::from(satisfied), BigInt::from(task.num_contexts() as u64));
    Ok(EncodingValue { value, satisfied, decoding })
}

/// True iff every (colour, question) slot has an answer winning on the
/// whole colour class.
pub fn verify_perfect(f: &DeterministicEncoding, task: &RetrievalTask) -> bool {
    if f.check_task(task).is_err() {
        return false;
    }
    let full = if task.d() == 64 { u64::MAX } else { (1u64 << task.d()) - 1 };
    (0..task.questions().len()).all(|q| {
        let mut common = vec![full; task.d() as usize];
        for (i, &j) in f.colours.iter().enumerate() {
            common[j as usize] &= task.winning_mask(q, i);
        }
        common.iter().all(|&m| m != 0)
    })
}

/// All colourings of `n` cells with at most `d` colours, one per relabelling class.
pub fn canonical_colourings(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn extend(prefix: &mut Vec<u32>, used: u32, n: usize, d: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..(used + 1).min(d) {
            prefix.push(c);
            extend(prefix, used.max(c + 1), n, d, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), 0, n, d, &mut out);
    out
}

/// Maximum of [`encoding_value`] over all encodings, with the
/// lexicographically smallest canonical witness.
pub fn exhaustive_classical_value(task: &RetrievalTask) -> Result<(BigRational, DeterministicEncoding)> {
    if task.d() > 3 || task.num_inputs() > 9 {
        return Err(Error::Unsupported(format!(
            "exhaustive search is limited to d <= 3 with at most 9 inputs (got d = {}, {} inputs); \
             use random_search_perfect for larger tasks",
            task.d(),
            task.num_inputs()
        )));
    }
    let d = task.d();
    let best = canonical_colourings(task.num_inputs(), d)
        .into_par_iter()
        .map(|colours| {
            let f = DeterministicEncoding { d, colours };
            let v = encoding_value(&f, task).expect("shape matches").satisfied;
            (v, f)
        })
        .reduce_with(|a, b| match a.0.cmp(&b.0) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => std::cmp::min(a, b),
        })
        .expect("at least one colouring");
    let value = encoding_value(&best.1, task)?.value;
    Ok((value, best.1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: u64,
    pub steps: u64,
    pub time_limit_secs: f64,
    /// Consecutive non-improving accepted moves allowed before the climb
    /// only takes strict improvements.
    pub sideways_cap: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 42, restarts: 10_000, steps: 10_000, time_limit_secs: 600.0, sideways_cap: 100 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.steps == 0 || !(self.time_limit_secs > 0.0) {
            return Err(Error::Validation("search budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub restarts_used: u64,
    pub steps: u64,
    pub timed_out: bool,
    /// Excluded from serialised output so results are reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub best: DeterministicEncoding,
    #[serde(with = "rational_string")]
    pub value: BigRational,
    /// Satisfied (colour, question) slots of `best`, out of `d |Q|`.
    pub objective: u64,
    pub perfect: bool,
    pub stats: SearchStats,
}

/// Number of restarts evaluated together; fixed so results do not depend
/// on the thread count.
const BATCH: u64 = 64;

struct Climb {
    colours: Vec<u32>,
    objective: u64,
    steps: u64,
}

/// Incremental bookkeeping: `bad[(j * |Q| + q) * d + c]` counts cells of
/// colour `j` on which answer `c` loses for question `q`.
struct SlotCounts<'a> {
    task: &'a RetrievalTask,
    d: usize,
    nq: usize,
    bad: Vec<u32>,
    /// For each (question, input), the losing answers.
    losing: Vec<Vec<u8>>,
}

impl<'a> SlotCounts<'a> {
    fn new(task: &'a RetrievalTask, losing: Vec<Vec<u8>>, colours: &[u32]) -> Self {
        let d = task.d() as usize;
        let nq = task.questions().len();
        let mut s = SlotCounts { task, d, nq, bad: vec![0; d * nq * d], losing };
        for (i, &j) in colours.iter().enumerate() {
            s.shift(i, j as usize, true);
        }
        s
    }

    fn shift(&mut self, input: usize, colour: usize, add: bool) {
        for q in 0..self.nq {
            let base = (colour * self.nq + q) * self.d;
            for &c in &self.losing[q * self.task.num_inputs() + input] {
                let slot = &mut self.bad[base + c as usize];
                if add {
                    *slot += 1;
                } else {
                    *slot -= 1;
                }
            }
        }
    }

    fn colour_score(&self, colour: usize) -> u64 {
        (0..self.nq)
            .filter(|q| {
                let base = (colour * self.nq + q) * self.d;
                self.bad[base..base + self.d].contains(&0)
            })
            .count() as u64
    }

    fn objective(&self) -> u64 {
        (0..self.d).map(|j| self.colour_score(j)).sum()
    }
}

fn losing_table(task: &RetrievalTask) -> Vec<Vec<u8>> {
    let n = task.num_inputs();
    let mut out = Vec::with_capacity(task.questions().len() * n);
    for q in 0..task.questions().len() {
        for i in 0..n {
            out.push((0..task.d() as u8).filter(|&c| !task.is_winning(q, i, c as u32)).collect());
        }
    }
    out
}

fn climb(
    task: &RetrievalTask,
    losing: &[Vec<u8>],
    config: &SearchConfig,
    restart: u64,
    deadline: Instant,
) -> Climb {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart);
    let d = task.d();
    let n = task.num_inputs();
    let target = d as u64 * task.questions().len() as u64;
    let mut colours: Vec<u32> = (0..n).map(|_| rng.random_range(0..d)).collect();
    let mut counts = SlotCounts::new(task, losing.to_vec(), &colours);
    let mut objective = counts.objective();
    let mut sideways = 0u32;
    let mut steps = 0u64;
    while steps < config.steps && objective < target {
        if steps.is_multiple_of(1024) && Instant::now() >= deadline {
            break;
        }
        steps += 1;
        let cell = rng.random_range(0..n);
        let old = colours[cell] as usize;
        let new = (old + rng.random_range(1..d as usize)) % d as usize;
        let before = counts.colour_score(old) + counts.colour_score(new);
        counts.shift(cell, old, false);
        counts.shift(cell, new, true);
        let after = counts.colour_score(old) + counts.colour_score(new);
        if after > before {
            sideways = 0;
        } else if after == before && sideways < config.sideways_cap {
            sideways += 1;
        } else {
            counts.shift(cell, new, false);
            counts.shift(cell, old, true);
            continue;
        }
        colours[cell] = new as u32;
        objective = objective + after - before;
    }
    Climb { colours, objective, steps }
}

/// Hill climbing with restarts for a colouring that wins every context.
///
/// Restarts run in batches of 64 seeded by `(seed, restart index)`; the
/// first batch containing a perfect colouring ends the search and the
/// lexicographically smallest canonical witness in it is returned, so the
/// outcome depends only on the configuration unless the time limit hits.
pub fn random_search_perfect(task: &RetrievalTask, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    if task.d() < 2 {
        return Err(Error::InvalidDimension { d: task.d(), reason: "need at least two colours" });
    }
    let start = Instant::now();
    let deadline = start + Duration::from_secs_f64(config.time_limit_secs);
    let target = task.d() as u64 * task.questions().len() as u64;
    let losing = losing_table(task);

    let mut best: Option<(u64, DeterministicEncoding)> = None;
    let mut restarts_used = 0;
    let mut total_steps = 0;
    let mut timed_out = false;
    let mut next = 0u64;
    while next < config.restarts {
        if Instant::now() >= deadline {
            timed_out = true;
            break;
        }
        let end = (next + BATCH).min(config.restarts);
        let climbs: Vec<Climb> =
            (next..end).into_par_iter().map(|r| climb(task, &losing, config, r, deadline)).collect();
        restarts_used += end - next;
        next = end;
        for c in climbs {
            total_steps += c.steps;
            let f = DeterministicEncoding { d: task.d(), colours: c.colours }.canonical();
            let better = match &best {
                None => true,
                Some((o, g)) => c.objective > *o || (c.objective == *o && f < *g),
            };
            if better {
                best = Some((c.objective, f));
            }
        }
        if best.as_ref().is_some_and(|(o, _)| *o == target) {
            break;
        }
    }
    if Instant::now() >= deadline && !best.as_ref().is_some_and(|(o, _)| *o == target) {
        timed_out = true;
    }
    let (objective, encoding) = best.ok_or_else(|| Error::Validation("no restarts were run".into()))?;
    let value = encoding_value(&encoding, task)?.value;
    let perfect = objective == target && verify_perfect(&encoding, task);
    Ok(SearchResult {
        config: config.clone(),
        best: encoding,
        value,
        objective,
        perfect,
        stats: SearchStats { restarts_used, steps: total_steps, timed_out, wall_time: start.elapsed() },
    })
}
