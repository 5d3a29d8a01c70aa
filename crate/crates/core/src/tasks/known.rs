//! Specific strategies: perfect qudit states, the qubit strategy and its
//! post-quantum counterpart, and the `(2,1)_2` random access code.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ClassicalStrategy, HermitianStrategy, Measurement, QuantumStrategy};
use crate::algebra::{
    displacement, mub_system, outer, qubit_pauli_word, trace_product, ComplexMatrix, StateVector,
};
use crate::dit::{check_odd_prime, reduce};
use crate::error::{Error, Result};
use crate::wigner::{phase_point_operator, qubit_phase_point};

/// `D_{x,z} (|l+1> - |-(l+1)>) / sqrt 2`, a `-1` eigenvector of `A_{x,z}`.
pub fn perfect_state(d: u32, x: i64, z: i64, ell: u32) -> Result<StateVector> {
    check_odd_prime(d)?;
    if ell >= (d - 1) / 2 {
        return Err(Error::OutOfRange { what: "level", value: ell as i64 });
    }
    let n = d as usize;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = StateVector::zeros(n);
    v[ell as usize + 1] = Complex64::new(s, 0.0);
    v[n - ell as usize - 1] = Complex64::new(-s, 0.0);
    Ok(displacement(d, x, z)? * v)
}

/// Perfect strategy for the torpedo task at a fixed level `l`, measured in
/// the MUBs. With `l = 0` these are the states of the standard game.
pub fn perfect_torpedo_strategy(d: u32, ell: u32) -> Result<QuantumStrategy> {
    let mut states = Vec::with_capacity((d * d) as usize);
    for x in 0..d as i64 {
        for z in 0..d as i64 {
            states.push(outer(&perfect_state(d, x, z, ell)?));
        }
    }
    QuantumStrategy::new(states, Measurement::from_mubs(&mub_system(d)?))
}

/// Strategy for the modified task: input `(x, z, l)` sends `psi_{x,z,l}`.
pub fn perfect_modified_strategy(d: u32) -> Result<QuantumStrategy> {
    check_odd_prime(d)?;
    let mut states = Vec::new();
    for x in 0..d as i64 {
        for z in 0..d as i64 {
            for ell in 0..(d - 1) / 2 {
                states.push(outer(&perfect_state(d, x, z, ell)?));
            }
        }
    }
    QuantumStrategy::new(states, Measurement::from_mubs(&mub_system(d)?))
}

/// `rho_{x,z} = (I - A_{x,z}) / (d - 1)`, the normalised projector onto the
/// `-1` eigenspace. Pure exactly when `d = 3`.
pub fn mixed_perfect_torpedo_strategy(d: u32) -> Result<QuantumStrategy> {
    check_odd_prime(d)?;
    let n = d as usize;
    let mut states = Vec::with_capacity(n * n);
    for x in 0..d as i64 {
        for z in 0..d as i64 {
            let a = phase_point_operator(d, x, z)?.into_matrix();
            states.push((ComplexMatrix::identity(n, n) - a) * Complex64::new(1.0 / (d - 1) as f64, 0.0));
        }
    }
    QuantumStrategy::new(states, Measurement::from_mubs(&mub_system(d)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let (o, l, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
        match self {
            Pauli::X => ComplexMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Pauli::Y => ComplexMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => ComplexMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }
}

/// Which Pauli answers each qubit torpedo question (`inf`, `0`, `1`), and
/// whether its outcome labels are swapped. Unswapped, eigenvalue `+1`
/// reads as answer `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitAssignment {
    pub paulis: [Pauli; 3],
    pub flips: [bool; 3],
}

impl QubitAssignment {
    pub fn measurement(&self) -> Measurement {
        let half = Complex64::new(0.5, 0.0);
        let id = ComplexMatrix::identity(2, 2);
        let effects = self
            .paulis
            .iter()
            .zip(self.flips)
            .map(|(p, flip)| {
                let plus = (&id + p.matrix()) * half;
                let minus = (&id - p.matrix()) * half;
                if flip {
                    vec![minus, plus]
                } else {
                    vec![plus, minus]
                }
            })
            .collect();
        Measurement::new(effects).expect("Pauli eigenprojectors resolve the identity")
    }
}

/// Frozen result of [`search_qubit_assignment`].
pub const QUBIT_ASSIGNMENT: QubitAssignment =
    QubitAssignment { paulis: [Pauli::Z, Pauli::X, Pauli::Y], flips: [false, false, false] };

fn qubit_states() -> Vec<ComplexMatrix> {
    let r = 1.0 / 3f64.sqrt();
    let half = Complex64::new(0.5, 0.0);
    let bloch = &(Pauli::X.matrix() + Pauli::Y.matrix() + Pauli::Z.matrix()) * Complex64::new(r, 0.0);
    let rho = (ComplexMatrix::identity(2, 2) - bloch) * half;
    let mut states = Vec::with_capacity(4);
    for x in 0..2 {
        for z in 0..2 {
            let w = qubit_pauli_word(x, z);
            states.push(&w * &rho * w.adjoint());
        }
    }
    states
}

/// Torpedo value of the qubit states `X^x Z^z rho_{0,0} Z^z X^x` under an assignment.
pub fn qubit_assignment_value(assignment: &QubitAssignment) -> f64 {
    let task = super::torpedo_task(2).expect("d = 2 is prime");
    let s = QuantumStrategy::new(qubit_states(), assignment.measurement()).expect("valid qubit strategy");
    let e = super::behaviour_from_quantum(&s, &task).expect("shapes match");
    task.value(&e).expect("shapes match")
}

/// Exhaustive search over the `3! * 2^3` assignments; ties go to the first
/// one in enumeration order.
pub fn search_qubit_assignment() -> (QubitAssignment, f64) {
    use Pauli::*;
    let perms = [[X, Y, Z], [X, Z, Y], [Y, X, Z], [Y, Z, X], [Z, X, Y], [Z, Y, X]];
    let mut best: Option<(QubitAssignment, f64)> = None;
    for paulis in perms {
        for bits in 0..8u8 {
            let flips = [bits & 1 == 1, bits & 2 == 2, bits & 4 == 4];
            let a = QubitAssignment { paulis, flips };
            let v = qubit_assignment_value(&a);
            if best.is_none_or(|(_, b)| v > b + 1e-12) {
                best = Some((a, v));
            }
        }
    }
    best.expect("nonempty search space")
}

/// Pure qubit states with Bloch vector `-(1,1,1)/sqrt 3` shifted by `X^x Z^z`,
/// measured per [`QUBIT_ASSIGNMENT`].
pub fn qubit_torpedo_strategy() -> QuantumStrategy {
    QuantumStrategy::new(qubit_states(), QUBIT_ASSIGNMENT.measurement()).expect("valid qubit strategy")
}

/// Qubit phase-point operators as "states", measured per [`QUBIT_ASSIGNMENT`].
pub fn postquantum_qubit_torpedo_strategy() -> HermitianStrategy {
    let mut states = Vec::with_capacity(4);
    for x in 0..2 {
        for z in 0..2 {
            states.push(qubit_phase_point(x, z));
        }
    }
    HermitianStrategy::new(states, QUBIT_ASSIGNMENT.measurement()).expect("Hermitian with unit trace")
}

/// `A_k = sum_i Pi_i^{k_i} - I` for `k` in `Z_d^{d+1}`, questions in MUB order.
pub fn qrac_phase_point(d: u32, k: &[u32]) -> Result<ComplexMatrix> {
    let m = mub_system(d)?;
    if k.len() != d as usize + 1 {
        return Err(Error::DimensionMismatch { expected: d as usize + 1, found: k.len() });
    }
    let n = d as usize;
    let mut a = -ComplexMatrix::identity(n, n);
    for (q, &kq) in k.iter().enumerate() {
        a += m.projector(q, reduce(kq as i64, d) as usize);
    }
    Ok(a)
}

/// Average success `(1/((d+1) d^{d+1})) sum_k Tr[rho_k sum_i Pi_i^{k_i}]` of
/// the `(d+1, 1)_d` code measured in the MUBs. `states[k]` uses the
/// mixed-radix index of `k` with `k_1` most significant.
pub fn casaccino_qrac_value(d: u32, states: &[ComplexMatrix]) -> Result<f64> {
    let m = mub_system(d)?;
    let questions = d as usize + 1;
    let count = (d as usize).pow(questions as u32);
    if states.len() != count {
        return Err(Error::DimensionMismatch { expected: count, found: states.len() });
    }
    let mut total = 0.0;
    let mut k = vec![0usize; questions];
    for rho in states {
        for (q, &kq) in k.iter().enumerate() {
            total += trace_product(rho, m.projector(q, kq)).re;
        }
        for slot in k.iter_mut().rev() {
            *slot += 1;
            if *slot < d as usize {
                break;
            }
            *slot = 0;
        }
    }
    Ok(total / (questions * count) as f64)
}

/// Classical: send the first bit and answer with it. Quantum: Bloch vector
/// `((-1)^{x_1}, (-1)^{x_2}, 0)/sqrt 2` measured in `X` for bit 1 and `Y`
/// for bit 2, eigenvalue `+1` read as `0`.
pub fn qrac21_strategies() -> (ClassicalStrategy, QuantumStrategy) {
    let encoding: Vec<u32> = (0..4).map(|i| i / 2).collect();
    let classical = ClassicalStrategy::deterministic(2, 2, &encoding, &[vec![0, 1], vec![0, 1]])
        .expect("valid deterministic strategy");

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let half = Complex64::new(0.5, 0.0);
    let mut states = Vec::with_capacity(4);
    for x1 in 0..2 {
        for x2 in 0..2 {
            let sign = |b: i32| if b == 0 { s } else { -s };
            let r = Pauli::X.matrix() * Complex64::new(sign(x1), 0.0)
                + Pauli::Y.matrix() * Complex64::new(sign(x2), 0.0);
            states.push((ComplexMatrix::identity(2, 2) + r) * half);
        }
    }
    let a = QubitAssignment { paulis: [Pauli::X, Pauli::Y, Pauli::Z], flips: [false; 3] };
    let mut effects = a.measurement();
    effects = Measurement::new((0..2).map(|q| effects.outcomes(q).to_vec()).collect()).expect("valid");
    let quantum = QuantumStrategy::new(states, effects).expect("valid qubit states");
    (classical, quantum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{hermitian_eigen, OperatorExt};
    use crate::tasks::{
        behaviour_from_classical, behaviour_from_quantum, modified_torpedo_task, qrac_task, torpedo_task,
        BornStrategy,
    };
    use crate::wigner::phase_point_operator;

    #[test]
    fn psi00_in_d3() {
        let v = perfect_state(3, 0, 0, 0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[1] - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((v[2] + Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!(perfect_state(3, 0, 0, 1).is_err());
    }

    #[test]
    fn perfect_states_are_minus_eigenvectors() {
        for d in [3u32, 5, 7] {
            for ell in 0..(d - 1) / 2 {
                for x in 0..d as i64 {
                    for z in 0..d as i64 {
                        let v = perfect_state(d, x, z, ell).unwrap();
                        let a = phase_point_operator(d, x, z).unwrap();
                        assert!((a.matrix() * &v + &v).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn perfect_strategy_support() {
        for d in [3u32, 5, 7] {
            let t = torpedo_task(d).unwrap();
            for ell in 0..(d - 1) / 2 {
                let e = behaviour_from_quantum(&perfect_torpedo_strategy(d, ell).unwrap(), &t).unwrap();
                for q in 0..t.questions().len() {
                    for i in 0..t.num_inputs() {
                        for c in 0..d {
                            let p = e.probability(c, i, q);
                            if !t.is_winning(q, i, c) {
                                assert!(p.abs() < 1e-12, "d={d} l={ell} q={q} i={i}");
                            } else if d == 3 {
                                assert!((p - 0.5).abs() < 1e-12);
                            }
                        }
                    }
                }
                assert!((t.value(&e).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixed_perfect_strategy_is_uniform_on_allowed() {
        for d in [3u32, 5, 7] {
            let t = torpedo_task(d).unwrap();
            let e = behaviour_from_quantum(&mixed_perfect_torpedo_strategy(d).unwrap(), &t).unwrap();
            for q in 0..t.questions().len() {
                for i in 0..t.num_inputs() {
                    for c in 0..d {
                        let expected = if t.is_winning(q, i, c) { 1.0 / (d - 1) as f64 } else { 0.0 };
                        assert!((e.probability(c, i, q) - expected).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn modified_game_is_won_perfectly() {
        for d in [5u32, 7] {
            let t = modified_torpedo_task(d).unwrap();
            let e = behaviour_from_quantum(&perfect_modified_strategy(d).unwrap(), &t).unwrap();
            assert!((t.value(&e).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_strategy_value() {
        let target = 0.5 * (1.0 + 1.0 / 3f64.sqrt());
        let t = torpedo_task(2).unwrap();
        let s = qubit_torpedo_strategy();
        for rho in s.states() {
            assert!(((rho * rho).trace_value().re - 1.0).abs() < 1e-12);
        }
        let e = behaviour_from_quantum(&s, &t).unwrap();
        assert!((t.value(&e).unwrap() - target).abs() < 1e-9);
        for q in 0..3 {
            for i in 0..4 {
                let win: f64 = t.winning_set(q, i).iter().map(|&c| e.probability(c, i, q)).sum();
                assert!((win - target).abs() < 1e-12, "context q={q} i={i}");
            }
        }
    }

    #[test]
    fn frozen_assignment_matches_search() {
        let (_, best) = search_qubit_assignment();
        assert!((qubit_assignment_value(&QUBIT_ASSIGNMENT) - best).abs() < 1e-12);
        assert!((best - 0.5 * (1.0 + 1.0 / 3f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn postquantum_value_is_one() {
        let t = torpedo_task(2).unwrap();
        let e = behaviour_from_quantum(&postquantum_qubit_torpedo_strategy(), &t).unwrap();
        // Value 1 with singleton winning sets forces every row to be 0/1.
        assert!(!e.is_quasi());
        assert!(e.min_entry() > -1e-12);
        assert!((t.value(&e).unwrap() - 1.0).abs() < 1e-12);
        for q in 0..3 {
            for i in 0..4 {
                assert!((e.probabilities(q, i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
        for rho in postquantum_qubit_torpedo_strategy().states() {
            assert!(hermitian_eigen(rho).unwrap().min() < 0.0);
        }
    }

    #[test]
    fn postquantum_negative_entries_need_other_measurements() {
        // Under the frozen MUBs each phase point yields 0/1 rows; negativity
        // shows up in directions between the axes.
        let a = qubit_phase_point(0, 0);
        let r = 1.0 / 3f64.sqrt();
        let n = (Pauli::X.matrix() + Pauli::Y.matrix() + Pauli::Z.matrix()) * Complex64::new(r, 0.0);
        let p = (ComplexMatrix::identity(2, 2) + n) * Complex64::new(0.5, 0.0);
        assert!(trace_product(&a, &p).re < 0.0);
    }

    #[test]
    fn qrac_phase_point_values() {
        let d = 3u32;
        let mut phase_points = Vec::new();
        let mut mixed = Vec::new();
        let mut eigen = Vec::new();
        for idx in 0..81u32 {
            let k = [idx / 27, idx / 9 % 3, idx / 3 % 3, idx % 3];
            let a = qrac_phase_point(d, &k).unwrap();
            assert!((a.trace_value().re - 1.0).abs() < 1e-12);
            assert!(((&a * &a).trace_value().re - d as f64).abs() < 1e-12);
            let eig = hermitian_eigen(&a).unwrap();
            eigen.push(outer(eig.vectors.last().unwrap()));
            phase_points.push(a);
            mixed.push(ComplexMatrix::identity(3, 3) * Complex64::new(1.0 / 3.0, 0.0));
        }
        assert!((casaccino_qrac_value(d, &phase_points).unwrap() - 1.0).abs() < 1e-12);
        assert!((casaccino_qrac_value(d, &mixed).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let v = casaccino_qrac_value(d, &eigen).unwrap();
        assert!(v > 1.0 / 3.0 && v < 1.0, "{v}");
    }

    #[test]
    fn qrac21_values() {
        let t = qrac_task(2, 2).unwrap();
        let (c, q) = qrac21_strategies();
        let ec = behaviour_from_classical(&c, &t).unwrap();
        assert!((t.value(&ec).unwrap() - 0.75).abs() < 1e-15);
        for rho in q.states() {
            assert!(((rho * rho).trace_value().re - 1.0).abs() < 1e-12);
        }
        let eq = behaviour_from_quantum(&q, &t).unwrap();
        let target = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((t.value(&eq).unwrap() - target).abs() < 1e-12);
    }

    #[test]
    fn value_is_linear_in_behaviour() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let t = torpedo_task(3).unwrap();
        let perfect = behaviour_from_quantum(&perfect_torpedo_strategy(3, 0).unwrap(), &t).unwrap();
        for _ in 0..20 {
            let enc: Vec<u32> = (0..9).map(|_| rng.random_range(0..3)).collect();
            let dec: Vec<Vec<u32>> =
                (0..4).map(|_| (0..3).map(|_| rng.random_range(0..3)).collect()).collect();
            let other =
                behaviour_from_classical(&ClassicalStrategy::deterministic(3, 3, &enc, &dec).unwrap(), &t)
                    .unwrap();
            let s: f64 = rng.random_range(0.0..1.0);
            let mixed = perfect.mix(&other, s).unwrap();
            let expected = (1.0 - s) * t.value(&perfect).unwrap() + s * t.value(&other).unwrap();
            assert!((t.value(&mixed).unwrap() - expected).abs() < 1e-12);
        }
    }
}
