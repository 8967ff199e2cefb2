//! Search for Dunkl weights: points of the null space of the critical-point
//! system `s_i(a) − (d−1)/d Σ a_j = 0` lying in the open stability cone.
//!
//! Strict feasibility is decided by maximizing a common slack `σ` over the
//! cone forms on the slice `Σ a_i = d` of the null space.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arrangement::IntersectionPoset;
use crate::error::{Error, Result};
use crate::hirzebruch;
use crate::scalar::{self, Real};
use crate::simplex::{self, LinearProgram, LpOutcome};
use crate::stability::{self, ConeConstraint, StabilityCone};

/// Float threshold on the optimal slack, after normalizing to `Σ a_i = d`.
pub const EPS_SLACK: f64 = 1e-9;

/// Row `i` of `matrix` holds the coefficients of `s_i(a) − (d−1)/d Σ_j a_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CritQSystem {
    pub matrix: Vec<Vec<BigRational>>,
    /// Integer-scaled basis of the null space.
    pub nullspace: Vec<Vec<BigRational>>,
    pub rank: usize,
}

impl CritQSystem {
    pub fn nullity(&self) -> usize {
        self.nullspace.len()
    }

    pub fn apply<R: Real>(&self, a: &[R]) -> Vec<R> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(a)
                    .fold(R::zero(), |acc, (c, x)| acc + R::from_rational(c) * x.clone())
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &[Vec<BigRational>]| {
            m.iter()
                .map(|r| r.iter().map(Real::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        json!({
            "matrix": mat(&self.matrix),
            "nullspace_basis": mat(&self.nullspace),
            "rank": self.rank,
            "nullity": self.nullity(),
        })
    }
}

/// Assembles the critical-point system exactly; its entries only depend on
/// the poset.
pub fn critq_system(poset: &IntersectionPoset) -> Result<CritQSystem> {
    poset.require_essential_irreducible()?;
    let n = poset.n;
    let d = poset.dim as i64;
    let shift = BigRational::ratio(d - 1, d);
    let half = BigRational::ratio(1, 2);
    let mut matrix = vec![vec![-shift.clone(); n]; n];
    for &(i, j) in &poset.rank2_reducible_pairs {
        matrix[i][j] += BigRational::one();
        matrix[j][i] += BigRational::one();
    }
    for flat in poset.g2() {
        for &i in &flat.members {
            for &j in &flat.members {
                matrix[i][j] += half.clone();
            }
        }
    }
    let (rank, nullspace) = nullspace(&matrix, n);
    Ok(CritQSystem {
        matrix,
        nullspace,
        rank,
    })
}

/// Reduced row echelon form; returns the rank and a null-space basis with
/// one free variable set to 1 per vector, rescaled to coprime integers.
fn nullspace(matrix: &[Vec<BigRational>], cols: usize) -> (usize, Vec<Vec<BigRational>>) {
    let mut m: Vec<Vec<BigRational>> = matrix.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = BigRational::one() / m[row][col].clone();
        for e in m[row].iter_mut() {
            *e *= inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (e, pe) in m[r].iter_mut().zip(pivot_row) {
                    *e -= f.clone() * pe;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            integer_scaled(v)
        })
        .collect();
    (pivots.len(), basis)
}

fn integer_scaled(v: Vec<BigRational>) -> Vec<BigRational> {
    use num_integer::Integer;
    let lcm = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<num_bigint::BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = scaled
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    scaled
        .into_iter()
        .map(|x| BigRational::new(x, gcd.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult<R> {
    pub feasible: bool,
    /// Maximizer of the common slack, normalized to `Σ a_i = d`.
    pub sample: Option<Vec<R>>,
    /// Optimal slack; `None` when no null vector has `Σ a_i ≠ 0`.
    pub slack: Option<R>,
    /// Null-space dimension.
    pub dimension: usize,
    /// Cone constraints attaining the optimal slack.
    pub active_constraints: Vec<ConeConstraint>,
    pub system: CritQSystem,
}

impl<R: Real> FeasibilityResult<R> {
    pub fn to_json(&self, poset: &IntersectionPoset) -> Value {
        let active: Vec<Value> = self
            .active_constraints
            .iter()
            .map(|c| match c {
                ConeConstraint::Flat(k) => json!({ "flat": poset.flats[*k].members }),
                ConeConstraint::Positive(i) => json!({ "positive": i }),
            })
            .collect();
        json!({
            "feasible": self.feasible,
            "sample": self.sample.as_ref().map(|s| json!({
                "weights": s.iter().map(Real::to_json).collect::<Vec<_>>()
            })),
            "slack": self.slack.as_ref().map(Real::to_json),
            "dimension": self.dimension,
            "active_constraints": active,
            "critq": self.system.to_json(),
        })
    }
}

fn strictly_positive<R: Real>(x: &R) -> bool {
    if R::EXACT {
        *x > R::zero()
    } else {
        x.to_f64() > EPS_SLACK
    }
}

/// Maximizes `σ` subject to `g(B t) ≥ σ` for every stability-cone form `g`
/// and `Σ (B t)_i = d`, over null-space coordinates `t`.
pub fn find_dunkl_weights<R: Real>(poset: &IntersectionPoset) -> Result<FeasibilityResult<R>> {
    let system = critq_system(poset)?;
    let cone = stability::stability_cone(poset)?;
    let n = poset.n;
    let k = system.nullity();
    let infeasible = |system: CritQSystem, slack: Option<R>, active| FeasibilityResult {
        feasible: false,
        sample: None,
        slack,
        dimension: k,
        active_constraints: active,
        system,
    };
    if k == 0 {
        return Ok(infeasible(system, None, Vec::new()));
    }

    let basis: Vec<Vec<R>> = system
        .nullspace
        .iter()
        .map(|v| v.iter().map(R::from_rational).collect())
        .collect();
    // image of each null-space coordinate under each cone form
    let form_coeffs: Vec<Vec<R>> = cone
        .forms
        .iter()
        .map(|f| basis.iter().map(|b| f.eval(b)).collect())
        .collect();
    let sum_coeffs: Vec<R> = basis.iter().map(|b| scalar::sum(b)).collect();

    // columns: t+ (k), t- (k), σ+, σ-, one surplus per form
    let m = cone.forms.len();
    let cols = 2 * k + 2 + m;
    let mut a = Vec::with_capacity(m + 1);
    let mut b = Vec::with_capacity(m + 1);
    for (r, coeffs) in form_coeffs.iter().enumerate() {
        let mut row = vec![R::zero(); cols];
        for j in 0..k {
            row[j] = coeffs[j].clone();
            row[k + j] = -coeffs[j].clone();
        }
        row[2 * k] = -R::one();
        row[2 * k + 1] = R::one();
        row[2 * k + 2 + r] = -R::one();
        a.push(row);
        b.push(R::zero());
    }
    let mut norm_row = vec![R::zero(); cols];
    for j in 0..k {
        norm_row[j] = sum_coeffs[j].clone();
        norm_row[k + j] = -sum_coeffs[j].clone();
    }
    a.push(norm_row);
    b.push(R::from_int(poset.dim as i64));
    let mut c = vec![R::zero(); cols];
    c[2 * k] = R::one();
    c[2 * k + 1] = -R::one();

    let (x, sigma) = match simplex::solve(&LinearProgram { a, b, c })? {
        LpOutcome::Optimal { x, value } => (x, value),
        LpOutcome::Infeasible => return Ok(infeasible(system, None, Vec::new())),
        LpOutcome::Unbounded => {
            return Err(Error::LpNumericalFailure(
                "slack unbounded on the normalized slice".into(),
            ))
        }
    };
    let t: Vec<R> = (0..k).map(|j| x[j].clone() - x[k + j].clone()).collect();
    let sample = combine(&basis, &t, n);
    let active = active_constraints(&cone, &sample, &sigma);

    if !strictly_positive(&sigma) {
        return Ok(infeasible(system, Some(sigma), active));
    }
    verify_sample(poset, &system, &sample)?;
    Ok(FeasibilityResult {
        feasible: true,
        sample: Some(sample),
        slack: Some(sigma),
        dimension: k,
        active_constraints: active,
        system,
    })
}

fn combine<R: Real>(basis: &[Vec<R>], t: &[R], n: usize) -> Vec<R> {
    let mut out = vec![R::zero(); n];
    for (bv, tj) in basis.iter().zip(t) {
        for (o, x) in out.iter_mut().zip(bv) {
            *o = o.clone() + tj.clone() * x.clone();
        }
    }
    out
}

fn active_constraints<R: Real>(cone: &StabilityCone, a: &[R], sigma: &R) -> Vec<ConeConstraint> {
    let scale = scalar::sum(a);
    cone.forms
        .iter()
        .filter(|f| (f.eval(a) - sigma.clone()).is_negligible(&scale, 1e-9))
        .map(|f| f.source)
        .collect()
}

/// Stability and the critical-point equations, evaluated independently of the LP.
fn verify_sample<R: Real>(poset: &IntersectionPoset, system: &CritQSystem, a: &[R]) -> Result<()> {
    let report = stability::stability_report(poset, a)?;
    let ev = hirzebruch::q_evaluate(poset, a)?;
    let scale = scalar::sum(a);
    let residual_ok = ev.max_abs_residual().is_negligible(&scale, 1e-9)
        && scalar::max_abs(&system.apply(a)).is_negligible(&scale, 1e-9);
    let q_ok = ev.q.is_negligible(&(scale.clone() * scale), 1e-9);
    if report.stable && residual_ok && q_ok {
        Ok(())
    } else {
        Err(Error::LpNumericalFailure(format!(
            "LP sample failed verification (stable: {}, critQ: {residual_ok}, Q = 0: {q_ok})",
            report.stable
        )))
    }
}

/// Random points of the feasible region around the slack maximizer, each
/// re-verified for stability and the critical-point equations.
pub fn sample_feasible<R: Real>(
    poset: &IntersectionPoset,
    result: &FeasibilityResult<R>,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<R>>> {
    let (Some(center), Some(sigma), true) = (&result.sample, &result.slack, result.feasible) else {
        return Err(Error::NotFeasible);
    };
    let cone = stability::stability_cone(poset)?;
    let n = poset.n;
    let d = R::from_int(poset.dim as i64);
    let basis: Vec<Vec<R>> = result
        .system
        .nullspace
        .iter()
        .map(|v| v.iter().map(R::from_rational).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * (count + 1) {
            return Err(Error::LpNumericalFailure(
                "could not draw verified samples".into(),
            ));
        }
        let t: Vec<R> = (0..basis.len())
            .map(|_| R::from_int(rng.gen_range(-5..=5)))
            .collect();
        let mut delta = combine(&basis, &t, n);
        // stay on the slice Σ a_i = d by removing the component along the center
        let shift = scalar::sum(&delta) / d.clone();
        for (x, c) in delta.iter_mut().zip(center) {
            *x = x.clone() - shift.clone() * c.clone();
        }
        let spread = cone
            .forms
            .iter()
            .map(|f| f.eval(&delta).abs())
            .fold(R::zero(), |acc, v| if v > acc { v } else { acc });
        let candidate: Vec<R> = if spread.is_zero() {
            center.clone()
        } else {
            let u = R::ratio(rng.gen_range(1..=16), 16);
            let step = u * sigma.clone() / (R::from_int(2) * spread);
            center
                .iter()
                .zip(&delta)
                .map(|(c, x)| c.clone() + step.clone() * x.clone())
                .collect()
        };
        if verify_sample(poset, &result.system, &candidate).is_ok() {
            out.push(candidate);
        }
    }
    Ok(out)
}
