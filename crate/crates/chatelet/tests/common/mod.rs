//! Seeded surfaces shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use chatelet::chatelet::{analyze_place, bad_places, rational_place, AnalysisOptions, ChateletSurface, Invariant};
use chatelet::hilbert::Place;
use chatelet::{RatPoly, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_c4a7;

/// `count` factored surfaces `y^2 - a z^2 = k f1 f2` over Q with small coefficients.
pub fn corpus(count: usize, seed: u64) -> Vec<ChateletSurface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a: i64 = [-1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, 13, -15, 17, 29, -39, 73][rng.gen_range(0..18)];
        let mut c = || rng.gen_range(-9i64..=9);
        let f1 = RatPoly::from_ints(&[c(), c(), 1]);
        let f2 = RatPoly::from_ints(&[c(), c(), c()]);
        let k: i64 = [1, -1, 2, 3, 5, -7][rng.gen_range(0..6)];
        let r = |n: i64| Rational::from_integer(n.into());
        if let Ok(v) = ChateletSurface::over_q_factored(&r(a), &r(k), &f1, &f2) {
            out.push(v);
        }
    }
    out
}

pub type LocalOutput = Result<(bool, Option<BTreeSet<Invariant>>), String>;

pub fn local_output(v: &ChateletSurface, place: Place, opts: &AnalysisOptions) -> LocalOutput {
    analyze_place(v, &rational_place(place).unwrap(), opts)
        .map(|la| (la.solvable, la.invariants))
        .map_err(|e| e.to_string())
}

/// Union of the bad places of the given surfaces.
pub fn union_of_bad_places(vs: &[&ChateletSurface]) -> Vec<Place> {
    let mut out: Vec<Place> = vs.iter().flat_map(|v| bad_places(v).unwrap()).collect();
    out.sort();
    out.dedup();
    out
}
