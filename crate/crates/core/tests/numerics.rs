mod common;

use common::*;
use dunkl_core::balance::{self, BalanceOptions, CMatrix, CVector, FrameConfig};
use dunkl_core::dunkl::{self, DunklOptions};
use dunkl_core::hirzebruch::{self, q_evaluate};
use dunkl_core::{catalog, stability, weightfinder, Arrangement, BigRational, Real};
use nalgebra::Complex;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn q_identities_exact(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(dim + 1..=dim + 4);
        let (_, poset) = random_irreducible(&mut rng, dim, n, 2, true);
        let a = random_weights(&mut rng, n, 5);
        let ev = q_evaluate(&poset, &a).unwrap();
        let total: BigRational = a.iter().cloned().sum();
        let d = BigRational::from_int(dim as i64);
        let target = (d.clone() - BigRational::from_int(1)) * total / d;
        for i in 0..n {
            prop_assert_eq!(ev.s[i].clone() + ev.grad[i].clone(), target.clone());
        }
        let euler: BigRational = a.iter().zip(&ev.grad).map(|(x, g)| x * g).sum();
        prop_assert_eq!(ev.q.clone() * BigRational::from_int(2), euler);
        let t = q(rng.gen_range(1..20), rng.gen_range(1..7));
        let scaled: Vec<BigRational> = a.iter().map(|x| x * &t).collect();
        prop_assert_eq!(hirzebruch::q_value(&poset, &scaled).unwrap(), ev.q.clone() * &t * &t);
        if dim == 2 {
            prop_assert_eq!(ev.q, BigRational::from_int(0));
        }
    }

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.gen_range(3..=4);
        let n = rng.gen_range(dim + 1..=dim + 4);
        let (_, poset) = random_irreducible(&mut rng, dim, n, 2, false);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let ev = q_evaluate(&poset, &a).unwrap();
        let h = 1e-5;
        for i in 0..n {
            let mut plus = a.clone();
            let mut minus = a.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (hirzebruch::q_value(&poset, &plus).unwrap() - hirzebruch::q_value(&poset, &minus).unwrap()) / (2.0 * h);
            let scale = ev.grad[i].abs().max(1.0);
            prop_assert!((fd - ev.grad[i]).abs() < 1e-6 * scale, "i={} fd={} grad={}", i, fd, ev.grad[i]);
        }
    }

    #[test]
    fn welch_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(2..=5);
        let m = rng.gen_range(d..=3 * d);
        let vecs: Vec<CVector> = (0..m).map(|_| random_matrix(&mut rng, d, 1).column(0).into()).collect();
        let frame = FrameConfig::new(d, vecs).unwrap();
        let w = balance::welch_gap(&frame);
        prop_assert!(w.lhs >= w.rhs - 1e-12 * w.rhs);
    }

    #[test]
    fn balance_is_gauge_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arr = catalog::braid(4).unwrap();
        let poset = arr.enumerate_flats();
        let a: Vec<f64> = loop {
            let a: Vec<f64> = (0..6).map(|_| rng.gen_range(0.5..1.5)).collect();
            if stability::stability_report(&poset, &a).unwrap().stable {
                break a;
            }
        };
        let opts = BalanceOptions::default();
        let base = balance::balance(&arr, &poset, &a, &opts).unwrap();
        prop_assert!(base.is_converged());

        // random starting gauge
        let start = BalanceOptions { initial_gauge: Some(random_matrix(&mut rng, 3, 3)), ..BalanceOptions::default() };
        let other = balance::balance(&arr, &poset, &a, &start).unwrap();
        prop_assert!(other.is_converged());
        prop_assert!((base.normalized_metric() - other.normalized_metric()).norm() < 1e-8);

        // change of coordinates v -> B v moves the metric to B M B*
        let b = random_matrix(&mut rng, 3, 3) + CMatrix::identity(3, 3) * Complex64::from(2.0);
        let moved: Vec<Vec<Complex64>> = arr
            .normals_c64()
            .into_iter()
            .map(|v| (&b * CVector::from_vec(v)).iter().copied().collect())
            .collect();
        let arr2 = Arrangement::new_float(3, moved, None).unwrap();
        let poset2 = arr2.enumerate_flats();
        let res2 = balance::balance(&arr2, &poset2, &a, &opts).unwrap();
        prop_assert!(res2.is_converged());
        let expected = &b * &base.metric * b.adjoint();
        let expected = &expected / expected.trace();
        prop_assert!((res2.normalized_metric() - expected).norm() < 1e-8);
    }

    #[test]
    fn commutator_and_characterization_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arr = [catalog::braid(4), catalog::full_monomial_b(3), catalog::braid(5)][rng.gen_range(0..3)].clone().unwrap();
        let poset = arr.enumerate_flats();
        let a = random_weights(&mut rng, arr.len(), 4);
        let v = dunkl::dunkl_decision_with_poset(&arr, &poset, &a, &DunklOptions::default()).unwrap();
        prop_assert!(v.inconsistencies.is_empty(), "{:?}", v.inconsistencies);
        if let Some(f) = &v.condition_f {
            prop_assert_eq!(f.passed, f.characterization_passed);
        }
    }
}

#[test]
fn feasible_samples_are_verified() {
    for arr in [catalog::braid(4).unwrap(), catalog::braid(5).unwrap(), catalog::full_monomial_b(3).unwrap()] {
        let poset = arr.enumerate_flats();
        let res = weightfinder::find_dunkl_weights::<BigRational>(&poset).unwrap();
        assert!(res.feasible);
        for s in weightfinder::sample_feasible(&poset, &res, 10, 42).unwrap() {
            assert!(res.system.apply(&s).iter().all(|x| *x == BigRational::from_int(0)));
            assert!(stability::stability_report(&poset, &s).unwrap().stable);
            assert_eq!(hirzebruch::q_value(&poset, &s).unwrap(), BigRational::from_int(0));
        }
    }
}

#[test]
fn float_and_exact_verdicts_agree() {
    let arr = catalog::full_monomial_b(3).unwrap();
    let float = arr.to_float().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = random_weights(&mut rng, 9, 4);
        let ve = dunkl::dunkl_decision(&arr, &a, &DunklOptions::default()).unwrap();
        let vf = dunkl::dunkl_decision(&float, &to_f64(&a), &DunklOptions::default()).unwrap();
        assert_eq!(ve.decision, vf.decision);
        assert_eq!(ve.stability.stable, vf.stability.stable);
    }
}
