//! Shared generators and brute-force oracles for integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use dunkl_core::arrangement::Normals;
use dunkl_core::{Arrangement, BigRational, GaussianRational, IntersectionPoset, Real};
use num_traits::{One, Zero};
use rand::Rng;

pub fn q(p: i64, d: i64) -> BigRational {
    BigRational::ratio(p, d)
}

fn g(re: i64, im: i64) -> GaussianRational {
    GaussianRational::new(q(re, 1), q(im, 1))
}

/// Rank by plain Gaussian elimination over the Gaussian rationals,
/// independent of the library's incremental span.
pub fn oracle_rank(rows: &[Vec<GaussianRational>]) -> usize {
    let mut m: Vec<Vec<GaussianRational>> = rows.to_vec();
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r == rank || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone() / pivot.clone();
            let pivot_row = m[rank].clone();
            for (x, p) in m[r].iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * p.clone();
            }
        }
        rank += 1;
    }
    rank
}

pub fn exact_rows(arr: &Arrangement) -> &Vec<Vec<GaussianRational>> {
    match arr.normals() {
        Normals::Exact(rows) => rows,
        Normals::Float(_) => panic!("oracle needs exact normals"),
    }
}

fn subset_rank(rows: &[Vec<GaussianRational>], subset: &[usize]) -> usize {
    let picked: Vec<_> = subset.iter().map(|&i| rows[i].clone()).collect();
    oracle_rank(&picked)
}

/// Every flat as `(rank, members)`, from the closures of all nonempty subsets.
pub fn brute_force_flats(arr: &Arrangement) -> BTreeSet<(usize, Vec<usize>)> {
    let rows = exact_rows(arr);
    let n = rows.len();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let r = subset_rank(rows, &subset);
        let closure: Vec<usize> = (0..n)
            .filter(|&i| {
                subset.contains(&i) || {
                    let mut s = subset.clone();
                    s.push(i);
                    subset_rank(rows, &s) == r
                }
            })
            .collect();
        out.insert((r, closure));
    }
    out
}

/// Irreducible iff no split `S ⊔ T` of `members` has `r(S) + r(T) = r(S ∪ T)`.
pub fn bipartition_irreducible(arr: &Arrangement, members: &[usize]) -> bool {
    let rows = exact_rows(arr);
    let m = members.len();
    if m == 1 {
        return true;
    }
    let total = subset_rank(rows, members);
    // fix the first member on side S to visit each split once
    for mask in 0u32..(1 << (m - 1)) {
        let mut s = vec![members[0]];
        let mut t = Vec::new();
        for (k, &i) in members.iter().enumerate().skip(1) {
            if mask & (1 << (k - 1)) != 0 {
                s.push(i);
            } else {
                t.push(i);
            }
        }
        if t.is_empty() {
            continue;
        }
        if subset_rank(rows, &s) + subset_rank(rows, &t) == total {
            return false;
        }
    }
    true
}

pub fn pair_partition_holds(poset: &IntersectionPoset) -> bool {
    let lhs: usize = poset
        .flats_of_rank(2)
        .map(|f| f.multiplicity() * (f.multiplicity() - 1) / 2)
        .sum();
    lhs == poset.n * (poset.n - 1) / 2
}

/// Random exact arrangement with small Gaussian-integer entries; `None` when
/// the draw has a zero or repeated normal.
pub fn random_arrangement<G: Rng>(rng: &mut G, dim: usize, n: usize, range: i64, complex: bool) -> Option<Arrangement> {
    let rows = (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let im = if complex && rng.gen_bool(0.3) { rng.gen_range(-range..=range) } else { 0 };
                    g(rng.gen_range(-range..=range), im)
                })
                .collect()
        })
        .collect();
    Arrangement::new_exact(dim, rows, None).ok()
}

/// Random essential irreducible exact arrangement.
pub fn random_irreducible<G: Rng>(rng: &mut G, dim: usize, n: usize, range: i64, complex: bool) -> (Arrangement, IntersectionPoset) {
    loop {
        if let Some(arr) = random_arrangement(rng, dim, n, range, complex) {
            let poset = arr.enumerate_flats();
            if poset.essential && poset.irreducible {
                return (arr, poset);
            }
        }
    }
}

/// Random positive rational weights with denominators up to `den`.
pub fn random_weights<G: Rng>(rng: &mut G, n: usize, den: i64) -> Vec<BigRational> {
    (0..n)
        .map(|_| q(rng.gen_range(1..=4 * den), rng.gen_range(1..=den)))
        .collect()
}

pub fn to_f64(a: &[BigRational]) -> Vec<f64> {
    a.iter().map(Real::to_f64).collect()
}

pub fn ones(n: usize) -> Vec<BigRational> {
    vec![BigRational::one(); n]
}
