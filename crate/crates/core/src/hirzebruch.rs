//! The Hirzebruch quadratic form of an arrangement and the linear functions
//! `s_i` whose level set describes its critical points.
//!
//! ```text
//! Q(a) = Σ_{L ∈ G²} a_L² − ½ Σ_i B_i a_i² − (1/2d) (Σ_i a_i)²
//! s_i(a) = Σ_{j : H_i ∩ H_j ∈ R²} a_j + Σ_{L ∈ G², L ⊂ H_i} a_L
//! ```
//!
//! with `B_i + 1` the number of irreducible rank-2 flats through `H_i`. The
//! gradient satisfies `s_i + ∂_i Q = (d−1)/d Σ a_j`, so the critical points of
//! `Q` are exactly the solutions of `s_i(a) = (d−1)/d Σ a_j`.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::arrangement::IntersectionPoset;
use crate::error::{Error, Result};
use crate::scalar::{self, Real};
use crate::stability::local_weight;

#[derive(Debug, Clone, PartialEq)]
pub struct QEvaluation<R> {
    pub q: R,
    pub grad: Vec<R>,
    pub s: Vec<R>,
    /// `s_i(a) − (d−1)/d Σ a_j`.
    pub crit_residual: Vec<R>,
    pub b: Vec<i64>,
    /// `(poset flat index, a_L)` for every irreducible rank-2 flat.
    pub local_weights: Vec<(usize, R)>,
}

impl<R: Real> QEvaluation<R> {
    pub fn max_abs_residual(&self) -> R {
        scalar::max_abs(&self.crit_residual)
    }

    pub fn to_json(&self, poset: &IntersectionPoset) -> Value {
        let vec = |v: &[R]| v.iter().map(Real::to_json).collect::<Vec<_>>();
        json!({
            "Q": self.q.to_json(),
            "grad": vec(&self.grad),
            "s": vec(&self.s),
            "critQ_residual": vec(&self.crit_residual),
            "B": self.b,
            "local_weights": self
                .local_weights
                .iter()
                .map(|(k, a)| json!({ "flat": poset.flats[*k].members, "a_L": a.to_json() }))
                .collect::<Vec<_>>(),
        })
    }
}

/// Evaluates `Q`, `∇Q`, `s` and the critQ residual in one pass over the
/// irreducible rank-2 flats and the reducible pairs. Defined for any real
/// vector of length `n`; positivity is not required.
pub fn q_evaluate<R: Real>(poset: &IntersectionPoset, weights: &[R]) -> Result<QEvaluation<R>> {
    poset.require_essential_irreducible()?;
    let n = poset.n;
    if weights.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    let d = R::from_int(poset.dim as i64);
    let total = scalar::sum(weights);
    let b = poset.b_counts();

    // Σ_{L ∈ G², i ∈ L} a_L, shared by the gradient and s
    let mut flat_sum = vec![R::zero(); n];
    let mut sum_sq = R::zero();
    let mut local_weights = Vec::with_capacity(poset.rank2_irreducible.len());
    for &k in &poset.rank2_irreducible {
        let flat = &poset.flats[k];
        let a_l = local_weight(weights, flat);
        sum_sq = sum_sq + a_l.clone() * a_l.clone();
        for &i in &flat.members {
            flat_sum[i] = flat_sum[i].clone() + a_l.clone();
        }
        local_weights.push((k, a_l));
    }

    let mut pair_sum = vec![R::zero(); n];
    for &(i, j) in &poset.rank2_reducible_pairs {
        pair_sum[i] = pair_sum[i].clone() + weights[j].clone();
        pair_sum[j] = pair_sum[j].clone() + weights[i].clone();
    }

    let two = R::from_int(2);
    let b_term = weights
        .iter()
        .zip(&b)
        .fold(R::zero(), |acc, (a, &bi)| {
            acc + R::from_int(bi) * a.clone() * a.clone()
        });
    let q = sum_sq - b_term / two.clone() - total.clone() * total.clone() / (two * d.clone());

    let mean = total.clone() / d.clone();
    let target = (d.clone() - R::one()) * total / d;
    let grad: Vec<R> = (0..n)
        .map(|i| flat_sum[i].clone() - R::from_int(b[i]) * weights[i].clone() - mean.clone())
        .collect();
    let s: Vec<R> = (0..n)
        .map(|i| pair_sum[i].clone() + flat_sum[i].clone())
        .collect();
    let crit_residual = s.iter().map(|si| si.clone() - target.clone()).collect();

    Ok(QEvaluation {
        q,
        grad,
        s,
        crit_residual,
        b,
        local_weights,
    })
}

/// `Q(a)` alone.
pub fn q_value<R: Real>(poset: &IntersectionPoset, weights: &[R]) -> Result<R> {
    Ok(q_evaluate(poset, weights)?.q)
}

/// Multiplicity count of a line arrangement in `CP²` with unit weights,
/// compared with the bound `Σ μ_p ≥ n²/3 + n` that holds when every point has
/// multiplicity `< 2n/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct LangerStatistic {
    pub n: usize,
    /// Σ of multiplicities over all rank-2 flats (points of multiplicity ≥ 2).
    pub sum_mult: usize,
    pub max_mult: usize,
    pub bound: BigRational,
    /// Every multiplicity is `< 2n/3`.
    pub max_mult_ok: bool,
    /// `sum_mult ≥ bound`; only asserted when `max_mult_ok`.
    pub holds: bool,
}

impl LangerStatistic {
    pub fn is_equality(&self) -> bool {
        BigRational::from_int(self.sum_mult as i64) == self.bound
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "sum_mult": self.sum_mult,
            "max_mult": self.max_mult,
            "bound": self.bound.to_json(),
            "max_mult_ok": self.max_mult_ok,
            "holds": self.holds,
            "equality": self.is_equality(),
        })
    }
}

pub fn langer_statistic(poset: &IntersectionPoset) -> Result<LangerStatistic> {
    if poset.dim != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: poset.dim,
        });
    }
    let n = poset.n;
    if n < 3 {
        return Err(Error::DimensionMismatch(format!(
            "the line count bound needs n >= 3, got {n}"
        )));
    }
    let mults: Vec<usize> = poset.flats_of_rank(2).map(|f| f.multiplicity()).collect();
    let sum_mult: usize = mults.iter().sum();
    let max_mult = mults.iter().copied().max().unwrap_or(0);
    let n_big = n as i64;
    let bound = BigRational::ratio(n_big * n_big, 3) + BigRational::from_int(n_big);
    let max_mult_ok = mults.iter().all(|&m| 3 * m < 2 * n);
    let holds = BigRational::from_int(sum_mult as i64) >= bound;
    Ok(LangerStatistic {
        n,
        sum_mult,
        max_mult,
        bound,
        max_mult_ok,
        holds,
    })
}
