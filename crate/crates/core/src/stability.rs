//! Stability of weighted arrangements.
//!
//! `(H, a)` is stable when `a_L < a_{0} = (1/d) Σ a_i` for every non-zero
//! proper flat `L`, where `a_L = (1/r(L)) Σ_{i ∈ I(L)} a_i`. Checking the
//! irreducible flats is enough, so reports and cones only carry those.

use std::cmp::Ordering;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::arrangement::{Flat, IntersectionPoset};
use crate::error::{Error, Result};
use crate::scalar::{self, Real};

/// Relative margin below which float mode declares a flat violated.
pub const EPS_MARGIN: f64 = 1e-12;

/// Strictly positive weights, one per hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<R: Real> {
    values: Vec<R>,
}

impl<R: Real> WeightVector<R> {
    pub fn new(values: Vec<R>, n: usize) -> Result<Self> {
        check_weights(&values, n)?;
        Ok(WeightVector { values })
    }

    pub fn ones(n: usize) -> Self {
        WeightVector {
            values: vec![R::one(); n],
        }
    }

    pub fn as_slice(&self) -> &[R] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<R> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> R {
        scalar::sum(&self.values)
    }

    /// Rescaled so the entries sum to `target`.
    pub fn normalized_to(&self, target: R) -> Self {
        let factor = target / self.total();
        WeightVector {
            values: self.values.iter().map(|a| a.clone() * factor.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "weights": self.values.iter().map(Real::to_json).collect::<Vec<_>>() })
    }
}

pub(crate) fn check_weights<R: Real>(values: &[R], n: usize) -> Result<()> {
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: values.len(),
        });
    }
    if let Some(index) = values.iter().position(|a| a.partial_cmp(&R::zero()) != Some(Ordering::Greater)) {
        return Err(Error::NonPositiveWeight { index });
    }
    Ok(())
}

/// `a_L = (1/r(L)) Σ_{i ∈ I(L)} a_i`.
pub fn local_weight<R: Real>(weights: &[R], flat: &Flat) -> R {
    let s = flat
        .members
        .iter()
        .fold(R::zero(), |acc, &i| acc + weights[i].clone());
    s / R::from_int(flat.rank as i64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow<R> {
    /// Index into `IntersectionPoset::flats`.
    pub flat: usize,
    pub members: Vec<usize>,
    pub rank: usize,
    pub a_l: R,
    pub margin: R,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<R> {
    pub stable: bool,
    /// `a_{0} = (1/d) Σ a_i`.
    pub global_mean: R,
    pub rows: Vec<StabilityRow<R>>,
    /// Position in `rows` of the smallest margin.
    pub worst: Option<usize>,
    /// `a'_i = d a_i / Σ a_j`.
    pub normalized_weights: Vec<R>,
}

impl<R: Real> StabilityReport<R> {
    pub fn worst_row(&self) -> Option<&StabilityRow<R>> {
        self.worst.map(|k| &self.rows[k])
    }

    /// Rows whose margin fails the strict inequality.
    pub fn violations(&self) -> impl Iterator<Item = &StabilityRow<R>> {
        let total = self.global_mean.clone() * R::from_int(self.normalized_weights.len() as i64);
        self.rows
            .iter()
            .filter(move |r| !margin_is_positive(&r.margin, &total))
    }

    pub fn to_json(&self) -> Value {
        let row = |r: &StabilityRow<R>| {
            json!({
                "flat": r.members,
                "rank": r.rank,
                "a_L": r.a_l.to_json(),
                "margin": r.margin.to_json(),
            })
        };
        json!({
            "stable": self.stable,
            "global_mean": self.global_mean.to_json(),
            "worst": self.worst_row().map(row),
            "rows": self.rows.iter().map(row).collect::<Vec<_>>(),
            "normalized_weights": self.normalized_weights.iter().map(Real::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Exact mode: `margin > 0`. Float mode: `margin > EPS_MARGIN * Σ a_i`.
pub fn margin_is_positive<R: Real>(margin: &R, total: &R) -> bool {
    if R::EXACT {
        margin.is_positive()
    } else {
        margin.to_f64() > EPS_MARGIN * total.to_f64()
    }
}

/// Evaluates the stability inequality on every irreducible flat of rank `1..d-1`.
pub fn stability_report<R: Real>(
    poset: &IntersectionPoset,
    weights: &[R],
) -> Result<StabilityReport<R>> {
    poset.require_essential_irreducible()?;
    check_weights(weights, poset.n)?;
    let d = R::from_int(poset.dim as i64);
    let total = scalar::sum(weights);
    let global_mean = total.clone() / d.clone();

    let rows: Vec<StabilityRow<R>> = poset
        .flats
        .iter()
        .enumerate()
        .filter(|(_, f)| f.rank >= 1 && f.rank < poset.dim && f.is_irreducible())
        .map(|(idx, f)| {
            let a_l = local_weight(weights, f);
            StabilityRow {
                flat: idx,
                members: f.members.clone(),
                rank: f.rank,
                margin: global_mean.clone() - a_l.clone(),
                a_l,
            }
        })
        .collect();

    let mut worst: Option<usize> = None;
    for (k, r) in rows.iter().enumerate() {
        if worst.is_none_or(|w| r.margin < rows[w].margin) {
            worst = Some(k);
        }
    }
    let stable = rows.iter().all(|r| margin_is_positive(&r.margin, &total));
    let normalized_weights = weights
        .iter()
        .map(|a| d.clone() * a.clone() / total.clone())
        .collect();
    Ok(StabilityReport {
        stable,
        global_mean,
        rows,
        worst,
        normalized_weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeConstraint {
    /// `(1/d) Σ a_i - a_L > 0` for the flat at this poset index.
    Flat(usize),
    /// `a_i > 0`.
    Positive(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeForm {
    pub source: ConeConstraint,
    pub coeffs: Vec<BigRational>,
}

impl ConeForm {
    pub fn eval<R: Real>(&self, a: &[R]) -> R {
        self.coeffs
            .iter()
            .zip(a)
            .fold(R::zero(), |acc, (c, x)| acc + R::from_rational(c) * x.clone())
    }
}

/// The open cone of stable weights: every form must be strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityCone {
    pub n: usize,
    pub forms: Vec<ConeForm>,
}

impl StabilityCone {
    pub fn flat_forms(&self) -> impl Iterator<Item = &ConeForm> {
        self.forms
            .iter()
            .filter(|f| matches!(f.source, ConeConstraint::Flat(_)))
    }

    pub fn contains<R: Real>(&self, a: &[R]) -> bool {
        let total = scalar::sum(a);
        self.forms
            .iter()
            .all(|f| margin_is_positive(&f.eval(a), &total))
    }

    pub fn to_json(&self, poset: &IntersectionPoset) -> Value {
        let forms: Vec<Value> = self
            .forms
            .iter()
            .map(|f| {
                let source = match f.source {
                    ConeConstraint::Flat(k) => json!({ "flat": poset.flats[k].members }),
                    ConeConstraint::Positive(i) => json!({ "positive": i }),
                };
                json!({
                    "source": source,
                    "coeffs": f.coeffs.iter().map(Real::to_json).collect::<Vec<_>>(),
                    "strict": true,
                })
            })
            .collect();
        json!({ "n": self.n, "forms": forms })
    }
}

/// One strict form `g_L(a) = (1/d) Σ a_i - a_L(a)` per irreducible non-zero
/// proper flat, followed by the `n` positivity forms.
pub fn stability_cone(poset: &IntersectionPoset) -> Result<StabilityCone> {
    poset.require_essential_irreducible()?;
    let n = poset.n;
    let inv_d = BigRational::ratio(1, poset.dim as i64);
    let mut forms = Vec::new();
    for (idx, f) in poset.flats.iter().enumerate() {
        if f.rank == 0 || f.rank >= poset.dim || !f.is_irreducible() {
            continue;
        }
        let inv_r = BigRational::ratio(1, f.rank as i64);
        let coeffs = (0..n)
            .map(|i| {
                if f.contains(i) {
                    inv_d.clone() - inv_r.clone()
                } else {
                    inv_d.clone()
                }
            })
            .collect();
        forms.push(ConeForm {
            source: ConeConstraint::Flat(idx),
            coeffs,
        });
    }
    for i in 0..n {
        let mut coeffs = vec![BigRational::from_int(0); n];
        coeffs[i] = BigRational::from_int(1);
        forms.push(ConeForm {
            source: ConeConstraint::Positive(i),
            coeffs,
        });
    }
    Ok(StabilityCone { n, forms })
}
