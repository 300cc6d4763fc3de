#![allow(clippy::mutable_key_type)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mlcif::enumerate::{enumerate_mlcifs, enumerate_mlcifs_with, EnumConfig};
use mlcif::extension::{extend_fast, extend_greedy, extend_greedy_shuffled, mlcifs_on_n};
use mlcif::sets::{all_ksets, lc_leq, lc_leq_prefix, meet, GroundParams, KSet};
use mlcif::weights::{family_weight, family_weight_direct, optimize_over, WeightFn};
use mlcif::young::phi;

fn kset(k: u32, n: u32) -> impl Strategy<Value = KSet> {
    proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), k as usize)
        .prop_map(move |e| KSet::new(n, e).unwrap())
}

/// Three k-sets on a shared ground, k <= 6, n <= 14.
fn triple() -> impl Strategy<Value = (KSet, KSet, KSet)> {
    (1u32..=6)
        .prop_flat_map(|k| (Just(k), k..=14))
        .prop_flat_map(|(k, n)| (kset(k, n), kset(k, n), kset(k, n)))
}

fn pair_upto(kmax: u32, nmax: u32) -> impl Strategy<Value = (KSet, KSet)> {
    (1u32..=kmax)
        .prop_flat_map(move |k| (Just(k), k..=nmax))
        .prop_flat_map(|(k, n)| (kset(k, n), kset(k, n)))
}

fn weights(n: u32, lo: u32) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(lo..=4u32, n as usize)
        .prop_map(|v| v.into_iter().map(f64::from).collect())
}

proptest! {
    #[test]
    fn lc_order_is_a_partial_order((a, b, c) in triple()) {
        prop_assert!(lc_leq(&a, &a).unwrap());
        if lc_leq(&a, &b).unwrap() && lc_leq(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if lc_leq(&a, &b).unwrap() && lc_leq(&b, &c).unwrap() {
            prop_assert!(lc_leq(&a, &c).unwrap());
        }
    }

    #[test]
    fn definitions_of_lc_order_agree((a, b) in pair_upto(6, 14)) {
        prop_assert_eq!(lc_leq(&a, &b).unwrap(), lc_leq_prefix(&a, &b).unwrap());
    }

    #[test]
    fn meet_is_a_lower_bound((a, b) in pair_upto(6, 14)) {
        let m = meet(&a, &b).unwrap();
        prop_assert!(lc_leq(&m, &a).unwrap() && lc_leq(&m, &b).unwrap());
    }

    #[test]
    fn shuffled_greedy_is_greedy(k in 2u32..=3, extra in 0u32..=3, pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let mk = enumerate_mlcifs(k).unwrap();
        let f = pick.get(&mk);
        let n = 2 * k + extra;
        prop_assert_eq!(extend_greedy_shuffled(f, n, seed).unwrap(), extend_greedy(f, n).unwrap());
    }

    #[test]
    fn weight_routes_agree(k in 1u32..=3, n in 6u32..=10, w in weights(10, 0)) {
        let w = WeightFn::dense(w[..n as usize].to_vec()).unwrap();
        for f in enumerate_mlcifs(k).unwrap() {
            let f = extend_fast(&f, n).unwrap();
            let (ie, direct) = (family_weight(&f, &w).unwrap(), family_weight_direct(&f, &w).unwrap());
            prop_assert!((ie - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{} vs {} for {}", ie, direct, f);
        }
    }

    #[test]
    fn weight_is_monotone_in_omega(k in 2u32..=3, w in weights(10, 0), bump in weights(10, 0)) {
        let lo = WeightFn::dense(w.clone()).unwrap();
        let hi = WeightFn::dense(w.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
        for f in enumerate_mlcifs(k).unwrap() {
            let f = extend_fast(&f, 10).unwrap();
            prop_assert!(family_weight(&f, &lo).unwrap() <= family_weight(&f, &hi).unwrap());
        }
    }

    #[test]
    fn scaling_omega_scales_weights(k in 2u32..=3, w in weights(10, 1), c in prop::sample::select(vec![0.5, 2.0, 3.0, 0.25])) {
        let w = WeightFn::dense(w).unwrap();
        let cw = w.scaled(c).unwrap();
        let mk = enumerate_mlcifs(k).unwrap();
        for f in &mk {
            let f = extend_fast(f, 10).unwrap();
            let (a, b) = (family_weight(&f, &w).unwrap(), family_weight(&f, &cw).unwrap());
            prop_assert!((b - c.powi(k as i32) * a).abs() <= 1e-12 * b.abs().max(1.0));
        }
        let (o1, o2) = (optimize_over(&mk, k, 10, &w).unwrap(), optimize_over(&mk, k, 10, &cw).unwrap());
        prop_assert_eq!(o1.argmax, o2.argmax);
    }
}

#[test]
fn meet_is_greatest_exhaustive() {
    for k in 1..=3 {
        for n in k..=2 * k + 2 {
            let sets: Vec<KSet> = all_ksets(GroundParams::new(k, n).unwrap()).collect();
            for a in &sets {
                for b in &sets {
                    let m = meet(a, b).unwrap();
                    for c in &sets {
                        if lc_leq(c, a).unwrap() && lc_leq(c, b).unwrap() {
                            assert!(lc_leq(c, &m).unwrap(), "{c} <= {a}, {b} but not <= {m}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn lc_definitions_agree_exhaustive() {
    for k in 1..=4 {
        for n in k..=10 {
            let sets: Vec<KSet> = all_ksets(GroundParams::new(k, n).unwrap()).collect();
            for a in &sets {
                for b in &sets {
                    assert_eq!(
                        lc_leq(a, b).unwrap(),
                        lc_leq_prefix(a, b).unwrap(),
                        "{a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn phi_preserves_order_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 2..=7u32 {
        let sets: Vec<KSet> = all_ksets(GroundParams::new(k, 2 * k).unwrap()).collect();
        for _ in 0..10_000 {
            let a = &sets[rng.gen_range(0..sets.len())];
            let b = &sets[rng.gen_range(0..sets.len())];
            let young = phi(a).unwrap().leq(&phi(b).unwrap());
            assert_eq!(young, Some(lc_leq(a, b).unwrap()), "{a} vs {b}");
        }
    }
}

#[test]
fn enumeration_ignores_thread_count() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| enumerate_mlcifs_with(4, &EnumConfig::default()).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one.len(), 72);
}

#[test]
fn extension_is_a_bijection_preserving_membership() {
    for k in 1..=3u32 {
        let mk = enumerate_mlcifs(k).unwrap();
        let base: Vec<KSet> = all_ksets(GroundParams::new(k, 2 * k).unwrap()).collect();
        for n in 2 * k..=2 * k + 3 {
            let extended: BTreeSet<_> = mk.iter().map(|f| extend_fast(f, n).unwrap()).collect();
            assert_eq!(extended.len(), mk.len(), "k = {k}, n = {n}: not injective");
            assert_eq!(
                extended,
                mlcifs_on_n(k, n).unwrap().into_iter().collect(),
                "k = {k}, n = {n}"
            );
            for f in &mk {
                let e = extend_fast(f, n).unwrap();
                for g in &base {
                    assert_eq!(
                        e.contains(&g.with_ground(n).unwrap()),
                        f.contains(g),
                        "{g} in {f} vs {e}"
                    );
                }
            }
        }
    }
}
