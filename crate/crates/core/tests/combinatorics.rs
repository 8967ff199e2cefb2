mod common;

use std::collections::BTreeSet;

use common::*;
use dunkl_core::arrangement::Normals;
use dunkl_core::stability::{self, ConeConstraint};
use dunkl_core::{catalog, Arrangement, FlatClass, GaussianRational};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arrangement_strategy(max_n: usize) -> impl Strategy<Value = Arrangement> {
    (2usize..=4, any::<u64>(), any::<bool>()).prop_filter_map("zero or repeated normal", move |(d, seed, complex)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(d.max(2)..=max_n);
        random_arrangement(&mut rng, d, n, 2, complex)
    })
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closure_axioms_and_submodularity(arr in arrangement_strategy(6)) {
        let n = arr.len();
        let all = subsets(n);
        let ranks: Vec<usize> = all.iter().map(|s| arr.rank(s)).collect();
        let closures: Vec<u32> = all
            .iter()
            .map(|s| if s.is_empty() { 0 } else { arr.closure(s).members.iter().fold(0, |m, i| m | (1 << i)) })
            .collect();
        for mask in 1..all.len() {
            let cl = closures[mask];
            prop_assert_eq!(cl & mask as u32, mask as u32);
            prop_assert_eq!(closures[cl as usize], cl);
            prop_assert_eq!(ranks[cl as usize], ranks[mask]);
            // adding one index keeps the closure monotone
            for i in 0..n {
                let bigger = mask | (1 << i);
                prop_assert_eq!(closures[bigger] & cl, cl);
            }
        }
        for s in 0..all.len() {
            for t in 0..all.len() {
                prop_assert!(ranks[s | t] + ranks[s & t] <= ranks[s] + ranks[t]);
            }
        }
    }

    #[test]
    fn poset_invariants(arr in arrangement_strategy(8)) {
        let poset = arr.enumerate_flats();
        prop_assert_eq!(poset.count_of_rank(1), arr.len());
        prop_assert!(pair_partition_holds(&poset));
        prop_assert_eq!(poset.essential, poset.origin().is_some());
        for f in poset.flats_of_rank(2) {
            prop_assert_eq!(f.is_irreducible(), f.multiplicity() >= 3);
        }
        for f in &poset.flats {
            prop_assert_eq!(arr.closure(&f.members).members.clone(), f.members.clone());
        }
    }

    #[test]
    fn projective_invariance(arr in arrangement_strategy(7), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Normals::Exact(rows) = arr.normals() else { unreachable!() };
        let scaled: Vec<Vec<GaussianRational>> = rows
            .iter()
            .map(|r| {
                let mut s = GaussianRational::new(q(rng.gen_range(-5..=5), rng.gen_range(1..=4)), q(rng.gen_range(-3..=3), 1));
                if s.is_zero() {
                    s = GaussianRational::new(q(2, 3), q(0, 1));
                }
                r.iter().map(|x| x.clone() * s.clone()).collect()
            })
            .collect();
        let other = Arrangement::new_exact(arr.dim(), scaled, None).unwrap();
        prop_assert_eq!(arr.enumerate_flats(), other.enumerate_flats());
    }

    #[test]
    fn exact_and_float_posets_agree(arr in arrangement_strategy(8)) {
        prop_assert_eq!(arr.enumerate_flats(), arr.to_float().unwrap().enumerate_flats());
    }

    #[test]
    fn cone_membership_matches_stability(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arr = [catalog::braid(4), catalog::full_monomial_b(3), catalog::generic(6, 3, 1)]
            [rng.gen_range(0..3)].clone().unwrap();
        let poset = arr.enumerate_flats();
        let cone = stability::stability_cone(&poset).unwrap();
        prop_assert_eq!(cone.forms.iter().filter(|f| matches!(f.source, ConeConstraint::Positive(_))).count(), arr.len());
        for _ in 0..40 {
            let a = random_weights(&mut rng, arr.len(), 6);
            let rep = stability::stability_report(&poset, &a).unwrap();
            prop_assert_eq!(rep.stable, cone.contains(&a));
            let af = to_f64(&a);
            prop_assert_eq!(stability::stability_report(&poset, &af).unwrap().stable, cone.contains(&af));
        }
    }
}

#[test]
fn oracles_on_catalog() {
    let arrs = [
        catalog::braid(4).unwrap(),
        catalog::braid(5).unwrap(),
        catalog::full_monomial_b(3).unwrap(),
        catalog::generic(5, 3, 0).unwrap(),
        catalog::generic(7, 4, 2).unwrap(),
    ];
    for arr in &arrs {
        let poset = arr.enumerate_flats();
        let ours: BTreeSet<(usize, Vec<usize>)> =
            poset.flats.iter().map(|f| (f.rank, f.members.clone())).collect();
        assert_eq!(ours, brute_force_flats(arr));
        for f in &poset.flats {
            assert_eq!(
                f.class == FlatClass::Irreducible,
                bipartition_irreducible(arr, &f.members),
                "flat {:?}",
                f.members
            );
        }
    }
}

#[test]
fn b3_rank2_histogram() {
    let poset = catalog::full_monomial_b(3).unwrap().enumerate_flats();
    let mut mults: Vec<usize> = poset.flats_of_rank(2).map(|f| f.multiplicity()).collect();
    mults.sort_unstable();
    let count = |m| mults.iter().filter(|&&x| x == m).count();
    assert_eq!((count(2), count(3), count(4)), (6, 4, 3));
    assert!(pair_partition_holds(&poset));
}
