use torpedo::classical_search::{encoding_value, exhaustive_classical_value};
use torpedo::contextuality::{ncf, DeterministicVertex};
use torpedo::tasks::{behaviour_from_quantum, perfect_torpedo_strategy, torpedo_task, EmpiricalBehaviour};

#[test]
fn json_round_trip_preserves_ncf() {
    let t = torpedo_task(3).unwrap();
    let e = behaviour_from_quantum(&perfect_torpedo_strategy(3, 0).unwrap(), &t).unwrap();
    let text = serde_json::to_string(&e).unwrap();
    let back: EmpiricalBehaviour = serde_json::from_str(&text).unwrap();
    assert_eq!(e, back);
    assert!(ncf(&back).unwrap().ncf.abs() < 1e-9);
}

#[test]
fn optimal_classical_behaviour_has_matching_value_and_ncf_one() {
    let t = torpedo_task(3).unwrap();
    let (value, f) = exhaustive_classical_value(&t).unwrap();
    assert_eq!(value.to_string(), "11/12");
    let decoding = encoding_value(&f, &t).unwrap().decoding;
    let e = DeterministicVertex { encoding: f, decoding }.behaviour(&t).unwrap();
    assert!((t.value(&e).unwrap() - 11.0 / 12.0).abs() < 1e-12);
    assert!((ncf(&e).unwrap().ncf - 1.0).abs() < 1e-9);
}

#[test]
fn mixing_with_uniform_is_at_least_the_uniform_share() {
    let t = torpedo_task(3).unwrap();
    let e = behaviour_from_quantum(&perfect_torpedo_strategy(3, 0).unwrap(), &t).unwrap();
    let u = EmpiricalBehaviour::uniform(&t);
    // The uniform behaviour is noncontextual, so it contributes its full weight.
    for w in [0.25, 0.5, 0.75] {
        let f = ncf(&e.mix(&u, w).unwrap()).unwrap().ncf;
        assert!(f >= w - 1e-7 && f <= 1.0 + 1e-9, "w = {w}: ncf = {f}");
    }
}
