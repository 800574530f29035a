mod common;

use chatelet::chatelet::{
    global_analysis, invariant_set, point_invariant, rational_place, search_rational_point, AnalysisOptions, Invariant,
};
use chatelet::hilbert::symbol_support;
use chatelet::Rational;
use common::{corpus, local_output, union_of_bad_places, CORPUS_SEED};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed_c4a7), failure_persistence: None, ..Config::default() }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn scaling_preserves_local_outputs(idx in 0usize..40, t in prop::sample::select(vec![1i64, -1, 2, 3, 5, 6, 7]),
                                       s_num in 1i64..8, s_den in prop::sample::select(vec![1i64, 3, 5])) {
        let v = corpus(40, CORPUS_SEED ^ 1).swap_remove(idx);
        let t = Rational::from_integer(t.into());
        let s = Rational::new(s_num.into(), s_den.into());
        let w = v.scaled(&t, &s).unwrap();
        let opts = AnalysisOptions::default();
        for place in union_of_bad_places(&[&v, &w]) {
            prop_assert_eq!(local_output(&v, place, &opts), local_output(&w, place, &opts), "at {}", place);
        }
    }
}

#[test]
fn precision_doubling_changes_nothing() {
    let low = AnalysisOptions { precision: 6, ..AnalysisOptions::default() };
    let high = AnalysisOptions { precision: 12, ..AnalysisOptions::default() };
    for v in corpus(20, CORPUS_SEED ^ 2) {
        for place in union_of_bad_places(&[&v]) {
            assert_eq!(local_output(&v, place, &low), local_output(&v, place, &high), "{v} at {place}");
        }
    }
}

/// Invariants at rational points lie in the computed sets and sum to zero.
#[test]
fn rational_points_respect_invariant_sets() {
    let mut points = 0;
    for v in corpus(60, CORPUS_SEED ^ 3) {
        let Some((x, _, _)) = search_rational_point(&v, 6) else { continue };
        let fac = v.factorization.as_ref().unwrap();
        let f1x = fac.f1.eval(&v.field.from_rational(&x)).to_rational().unwrap();
        if f1x.is_zero() {
            continue;
        }
        points += 1;
        let a = v.a.to_rational().unwrap();
        let mut total = Invariant::Zero;
        for place in symbol_support(&a, &f1x).unwrap() {
            let inv = point_invariant(&v, &x, place).unwrap();
            total = total.add(inv);
            if let Ok(set) = invariant_set(&v, &rational_place(place).unwrap()) {
                assert!(set.contains(&inv), "{v}: x = {x} at {place}");
            }
        }
        assert_eq!(total, Invariant::Zero, "{v}: x = {x}");
        let g = global_analysis(&v, &AnalysisOptions::default()).unwrap();
        assert!(g.verdict.unwrap().adelic_nonempty, "{v} has the point x = {x}");
    }
    assert!(points >= 10, "only {points} rational points found");
}

#[test]
fn corpus_is_mostly_decidable() {
    let opts = AnalysisOptions::default();
    let (mut ok, mut err, mut half) = (0, 0, 0);
    for v in corpus(40, CORPUS_SEED ^ 1) {
        for place in union_of_bad_places(&[&v]) {
            match local_output(&v, place, &opts) {
                Ok((_, Some(set))) => {
                    ok += 1;
                    half += usize::from(set.contains(&Invariant::Half));
                }
                Ok(_) => ok += 1,
                Err(_) => err += 1,
            }
        }
    }
    println!("decided {ok}, errors {err}, with 1/2 {half}");
    assert!(err * 20 <= ok, "{err} errors against {ok} decided places");
    assert!(half > 0);
}
