use monogamy_core::classical::{enumerate_assignments, DeterministicAssignment};
use monogamy_core::scenario::{canonical_scenario, NUM_MEASUREMENTS};
use monogamy_core::{
    c1_expression, c2_expression, chsh_expression, classical_bound, cycle_bound, kcbs_expression, monogamy_expression,
    Behavior, LinearExpression, MeasurementId, Scenario,
};
use proptest::prelude::*;

/// Minimum of `sum_i x_i x_{i+1}` over `x ∈ {±1}^n`, by nested loops over
/// integers rather than through the scenario machinery.
fn brute_cycle_min(n: usize) -> i64 {
    (0u32..1 << n)
        .map(|mask| {
            let x = |i: usize| if mask >> (i % n) & 1 == 1 { 1i64 } else { -1 };
            (0..n).map(|i| x(i) * x(i + 1)).sum::<i64>()
        })
        .min()
        .unwrap()
}

fn all_sign_vectors() -> impl Iterator<Item = [i8; NUM_MEASUREMENTS]> {
    (0u32..128).map(|m| std::array::from_fn(|k| if m >> k & 1 == 1 { 1 } else { -1 }))
}

#[test]
fn cycle_bounds_against_brute_force() {
    for n in 3..=9 {
        assert_eq!(cycle_bound(n).unwrap(), brute_cycle_min(n) as f64, "n = {n}");
    }
    assert_eq!(cycle_bound(3).unwrap(), -1.0);
    assert_eq!(cycle_bound(4).unwrap(), -4.0);
}

#[test]
fn enumeration_against_raw_sign_loop() {
    // evaluate on behaviors of deterministic assignments instead of on the
    // assignments themselves
    for (name, expr, expected) in [
        ("kappa", kcbs_expression(), -3.0),
        ("beta", chsh_expression(5), -2.0),
        ("kappa+beta", monogamy_expression(5), -5.0),
    ] {
        let brute = all_sign_vectors()
            .map(|v| expr.evaluate_behavior(&Behavior::deterministic(&v)).unwrap())
            .fold(f64::INFINITY, f64::min);
        let b = classical_bound(&expr, canonical_scenario()).unwrap();
        assert_eq!(b.min, brute, "{name}");
        assert_eq!(b.min, expected, "{name}");
    }
}

#[test]
fn per_pivot_bounds() {
    for i in 1..=5 {
        assert_eq!(classical_bound(&c1_expression(i), canonical_scenario()).unwrap().min, -3.0);
        assert_eq!(classical_bound(&c2_expression(i), canonical_scenario()).unwrap().min, -2.0);
        assert_eq!(classical_bound(&chsh_expression(i), canonical_scenario()).unwrap().min, -2.0);
        assert_eq!(classical_bound(&monogamy_expression(i), canonical_scenario()).unwrap().min, -5.0);
    }
}

#[test]
fn maxima_are_attained_too() {
    let b = classical_bound(&kcbs_expression(), canonical_scenario()).unwrap();
    assert_eq!(b.max, 5.0);
    assert_eq!(kcbs_expression().evaluate_assignment(&b.argmax), 5.0);
}

#[test]
fn kcbs_scenario_matches_canonical() {
    let kcbs = Scenario::kcbs();
    let expr = LinearExpression::new((1..=5).map(|i| (1.0, vec![MeasurementId::alice(i), MeasurementId::alice(i + 1)])).collect())
        .unwrap();
    assert_eq!(classical_bound(&expr, &kcbs).unwrap().min, -3.0);
    assert_eq!(enumerate_assignments(&kcbs).unwrap().count(), 32);
}

proptest! {
    #[test]
    fn decomposition_holds_pointwise(mask in 0u32..128, pivot in 1i64..=5) {
        let values: Vec<i8> = (0..7).map(|k| if mask >> k & 1 == 1 { 1 } else { -1 }).collect();
        let a = DeterministicAssignment::new(values).unwrap();
        let lhs = c1_expression(pivot).evaluate_assignment(&a) + c2_expression(pivot).evaluate_assignment(&a);
        let rhs = monogamy_expression(pivot).evaluate_assignment(&a);
        prop_assert_eq!(lhs, rhs);
        prop_assert!(c1_expression(pivot).evaluate_assignment(&a) >= -3.0);
        prop_assert!(c2_expression(pivot).evaluate_assignment(&a) >= -2.0);
    }

    #[test]
    fn cyclic_relabeling_preserves_bounds(shift in -7i64..7) {
        let e = kcbs_expression().shift_alice(shift);
        prop_assert_eq!(classical_bound(&e, canonical_scenario()).unwrap().min, -3.0);
        let c = chsh_expression(5).shift_alice(shift);
        prop_assert_eq!(classical_bound(&c, canonical_scenario()).unwrap().min, -2.0);
    }
}
