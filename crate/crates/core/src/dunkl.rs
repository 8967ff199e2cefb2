//! Residue endomorphisms `A_i = a_i P_i`, the commutator condition
//!
//! ```text
//! [A_i, Σ_{j : L ⊂ H_j} A_j] = 0   for every rank-2 flat L and i ∈ I(L),
//! ```
//!
//! and the decision pipeline that compares the three equivalent descriptions
//! of Dunkl weights: existence of a metric satisfying the condition, stability
//! with `Q(a) = 0`, and stability with `s_i(a) = (d−1)/d Σ a_j` for all `i`.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::arrangement::{Arrangement, IntersectionPoset};
use crate::balance::{self, BalanceOptions, BalanceResult, CMatrix, FrameConfig, WelchGap};
use crate::error::{Error, Result};
use crate::hirzebruch::{self, QEvaluation};
use crate::scalar::{self, Real};
use crate::stability::{self, StabilityReport};

pub const TOL_F: f64 = 1e-8;
pub const TOL_Q: f64 = 1e-10;
/// Float tolerance on `max |s_i − (d−1)/d Σ a_j|`, relative to `Σ a_j`.
/// `Q` vanishes to second order at its critical points, so this is the square
/// root of `TOL_Q`.
pub const TOL_CRIT: f64 = 1e-5;

/// `A_i = a_i u_i u_i*` in the balanced gauge.
#[derive(Debug, Clone)]
pub struct ResidueSet {
    pub matrices: Vec<CMatrix>,
}

impl ResidueSet {
    pub fn sum(&self) -> CMatrix {
        let d = self.matrices[0].nrows();
        self.matrices
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, m| acc + m)
    }
}

pub fn residues(balanced: &BalanceResult) -> Result<ResidueSet> {
    if !balanced.is_converged() {
        return Err(Error::NotConverged);
    }
    let matrices = balanced
        .frame
        .iter()
        .zip(&balanced.weights)
        .map(|(u, &a)| (u * u.adjoint()) * Complex64::from(a))
        .collect();
    Ok(ResidueSet { matrices })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorRow {
    /// Index into `IntersectionPoset::flats`.
    pub flat: usize,
    pub hyperplane: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubframeRow {
    pub flat: usize,
    pub welch: WelchGap,
    /// Frobenius distance `|λ₁ − λ₂| / √2` of the local frame operator from a
    /// multiple of the projection onto its span.
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionFReport {
    pub rows: Vec<CommutatorRow>,
    pub max_commutator: f64,
    /// `|⟨u_i, u_j⟩|` for every reducible pair.
    pub orthogonality_rows: Vec<((usize, usize), f64)>,
    /// Tightness of `(sqrt(a_i) u_i)_{i ∈ I(L)}` inside the plane `L^⊥`, per irreducible rank-2 flat.
    pub subframe_rows: Vec<SubframeRow>,
    pub tol: f64,
    /// Verdict from the commutators alone.
    pub passed: bool,
    /// Verdict from orthogonality of reducible pairs and tightness of the
    /// irreducible subframes.
    pub characterization_passed: bool,
}

impl ConditionFReport {
    pub fn max_orthogonality(&self) -> f64 {
        self.orthogonality_rows.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn max_subframe_defect(&self) -> f64 {
        self.subframe_rows
            .iter()
            .map(|r| r.defect)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self, poset: &IntersectionPoset) -> Value {
        json!({
            "passed": self.passed,
            "tol": self.tol,
            "max_commutator": self.max_commutator,
            "rows": self.rows.iter().map(|r| json!({
                "flat": poset.flats[r.flat].members,
                "hyperplane": r.hyperplane,
                "commutator_norm": r.norm,
            })).collect::<Vec<_>>(),
            "orthogonality_rows": self.orthogonality_rows.iter().map(|((i, j), x)| json!({
                "pair": [i, j],
                "abs_inner": x,
            })).collect::<Vec<_>>(),
            "subframe_rows": self.subframe_rows.iter().map(|r| json!({
                "flat": poset.flats[r.flat].members,
                "lhs": r.welch.lhs,
                "rhs": r.welch.rhs,
                "gap": r.welch.gap,
                "defect": r.defect,
            })).collect::<Vec<_>>(),
            "characterization_passed": self.characterization_passed,
        })
    }
}

/// Checks the commutator condition at every rank-2 flat, together with the
/// equivalent orthogonality and local tightness conditions.
pub fn condition_f_check(
    residues: &ResidueSet,
    balanced: &BalanceResult,
    poset: &IntersectionPoset,
    tol: f64,
) -> Result<ConditionFReport> {
    if !balanced.is_converged() {
        return Err(Error::NotConverged);
    }
    let mut rows = Vec::new();
    for (k, flat) in poset.flats.iter().enumerate() {
        if flat.rank != 2 {
            continue;
        }
        let local = flat
            .members
            .iter()
            .fold(CMatrix::zeros(poset.dim, poset.dim), |acc, &j| {
                acc + &residues.matrices[j]
            });
        for &i in &flat.members {
            let a = &residues.matrices[i];
            let comm = a * &local - &local * a;
            rows.push(CommutatorRow {
                flat: k,
                hyperplane: i,
                norm: comm.norm(),
            });
        }
    }
    let max_commutator = rows.iter().map(|r| r.norm).fold(0.0, f64::max);

    let orthogonality_rows = poset
        .rank2_reducible_pairs
        .iter()
        .map(|&(i, j)| ((i, j), balanced.frame[i].dotc(&balanced.frame[j]).norm()))
        .collect::<Vec<_>>();

    let mut subframe_rows = Vec::new();
    for &k in &poset.rank2_irreducible {
        let members = &poset.flats[k].members;
        let directions: Vec<_> = members.iter().map(|&i| balanced.frame[i].clone()).collect();
        let weights: Vec<f64> = members.iter().map(|&i| balanced.weights[i]).collect();
        let frame = FrameConfig::weighted(poset.dim, &directions, &weights)?;
        let mut eig: Vec<f64> = balance::frame_operator(&frame)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        subframe_rows.push(SubframeRow {
            flat: k,
            welch: balance::welch_gap_in(&frame, 2, balance::TOL_TIGHT),
            defect: (eig[0] - eig[1]).abs() / std::f64::consts::SQRT_2,
        });
    }

    let mut report = ConditionFReport {
        rows,
        max_commutator,
        orthogonality_rows,
        subframe_rows,
        tol,
        passed: max_commutator <= tol,
        characterization_passed: false,
    };
    report.characterization_passed =
        report.max_orthogonality() <= tol && report.max_subframe_defect() <= tol;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct DunklOptions {
    pub tol_balance: f64,
    pub max_iter: usize,
    pub tol_f: f64,
    pub tol_q: f64,
    pub tol_crit: f64,
}

impl Default for DunklOptions {
    fn default() -> Self {
        DunklOptions {
            tol_balance: balance::DEFAULT_TOL,
            max_iter: balance::DEFAULT_MAX_ITER,
            tol_f: TOL_F,
            tol_q: TOL_Q,
            tol_crit: TOL_CRIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Dunkl,
    NotDunkl,
    NotApplicable,
    /// The equivalent conditions disagreed beyond tolerance.
    Inconsistent,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Dunkl => "dunkl",
            Decision::NotDunkl => "not_dunkl",
            Decision::NotApplicable => "not_applicable",
            Decision::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DunklVerdict<R> {
    pub raw_weights: Vec<R>,
    /// Weights rescaled to `Σ a_i = d`.
    pub weights: Vec<R>,
    pub stability: StabilityReport<R>,
    pub q_eval: QEvaluation<R>,
    pub balance: Option<BalanceResult>,
    pub condition_f: Option<ConditionFReport>,
    /// A metric satisfying the commutator condition was found.
    pub has_dunkl_metric: bool,
    /// Stable and `Q ≈ 0`.
    pub stable_and_q_zero: bool,
    /// Stable and the critical-point equations hold.
    pub stable_and_critical: bool,
    pub decision: Decision,
    pub certificates: Vec<String>,
    /// Disagreements between the equivalent conditions.
    pub inconsistencies: Vec<String>,
}

impl<R: Real> DunklVerdict<R> {
    pub fn is_dunkl(&self) -> bool {
        self.decision == Decision::Dunkl
    }

    pub fn to_json(&self, poset: &IntersectionPoset) -> Value {
        let vec = |v: &[R]| v.iter().map(Real::to_json).collect::<Vec<_>>();
        json!({
            "decision": self.decision.as_str(),
            "raw_weights": vec(&self.raw_weights),
            "normalized_weights": vec(&self.weights),
            "conditions": {
                "dunkl_metric": self.has_dunkl_metric,
                "stable_and_Q_zero": self.stable_and_q_zero,
                "stable_and_critQ": self.stable_and_critical,
            },
            "stability": self.stability.to_json(),
            "qform": self.q_eval.to_json(poset),
            "balance": self.balance.as_ref().map(BalanceResult::to_json),
            "condition_f": self.condition_f.as_ref().map(|r| r.to_json(poset)),
            "certificates": self.certificates,
            "inconsistencies": self.inconsistencies,
        })
    }
}

pub fn dunkl_decision<R: Real>(
    arr: &Arrangement,
    weights: &[R],
    opts: &DunklOptions,
) -> Result<DunklVerdict<R>> {
    let poset = arr.enumerate_flats();
    dunkl_decision_with_poset(arr, &poset, weights, opts)
}

/// Runs stability, the quadratic form, the critical-point equations and (for
/// stable weights) the balanced metric with its commutator check, and
/// cross-checks the three equivalent conditions.
pub fn dunkl_decision_with_poset<R: Real>(
    arr: &Arrangement,
    poset: &IntersectionPoset,
    weights: &[R],
    opts: &DunklOptions,
) -> Result<DunklVerdict<R>> {
    poset.require_essential_irreducible()?;
    stability::check_weights(weights, poset.n)?;
    let d = R::from_int(poset.dim as i64);
    let total = scalar::sum(weights);
    let normalized: Vec<R> = weights
        .iter()
        .map(|a| a.clone() * d.clone() / total.clone())
        .collect();

    let stab = stability::stability_report(poset, &normalized)?;
    let q_eval = hirzebruch::q_evaluate(poset, &normalized)?;
    let q_scale = d.clone() * d.clone();
    let q_zero = q_eval.q.is_negligible(&q_scale, opts.tol_q);
    let critical = q_eval.max_abs_residual().is_negligible(&d, opts.tol_crit);
    let stable_and_q_zero = stab.stable && q_zero;
    let stable_and_critical = stab.stable && critical;

    let mut certificates = Vec::new();
    let mut inconsistencies = Vec::new();
    if !stab.stable {
        if let Some(row) = stab.violations().next() {
            certificates.push(format!(
                "unstable: flat {:?} has a_L = {} >= a_0 = {}",
                row.members,
                row.a_l.to_json(),
                stab.global_mean.to_json()
            ));
        }
    }
    if !q_zero {
        certificates.push(format!("Q = {} != 0", q_eval.q.to_json()));
    }
    if !critical {
        let (i, r) = q_eval
            .crit_residual
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("ordered"))
            .expect("n >= 2");
        certificates.push(format!(
            "critical-point equation fails at hyperplane {i}: s_i - (d-1)/d * sum = {}",
            r.to_json()
        ));
    }

    let mut balance_result = None;
    let mut condition_f = None;
    let mut has_dunkl_metric = false;
    if stab.stable {
        let float_weights: Vec<f64> = normalized.iter().map(Real::to_f64).collect();
        let bopts = BalanceOptions {
            tol: opts.tol_balance,
            max_iter: opts.max_iter,
            precheck: false,
            initial_gauge: None,
        };
        let res = balance::balance(arr, poset, &float_weights, &bopts)?;
        if res.is_converged() {
            let residue_set = residues(&res)?;
            let report = condition_f_check(&residue_set, &res, poset, opts.tol_f)?;
            has_dunkl_metric = report.passed;
            if report.passed != report.characterization_passed {
                inconsistencies.push(format!(
                    "commutator verdict {} disagrees with orthogonality/tightness verdict {}",
                    report.passed, report.characterization_passed
                ));
            }
            if !report.passed {
                certificates.push(format!(
                    "condition F fails: max commutator {:.3e} > {:.1e}",
                    report.max_commutator, opts.tol_f
                ));
            }
            condition_f = Some(report);
        } else {
            certificates.push(format!(
                "balance {} after {} iterations (residual {:.3e})",
                res.status.as_str(),
                res.iterations,
                res.residual
            ));
        }
        balance_result = Some(res);
    }

    if stable_and_q_zero != stable_and_critical {
        inconsistencies.push(format!(
            "stable+Q=0 is {stable_and_q_zero} but stable+critQ is {stable_and_critical}"
        ));
    }
    if has_dunkl_metric != stable_and_q_zero {
        inconsistencies.push(format!(
            "Dunkl metric found is {has_dunkl_metric} but stable+Q=0 is {stable_and_q_zero}"
        ));
    }

    let decision = if !inconsistencies.is_empty() {
        Decision::Inconsistent
    } else if has_dunkl_metric {
        Decision::Dunkl
    } else {
        Decision::NotDunkl
    };

    Ok(DunklVerdict {
        raw_weights: weights.to_vec(),
        weights: normalized,
        stability: stab,
        q_eval,
        balance: balance_result,
        condition_f,
        has_dunkl_metric,
        stable_and_q_zero,
        stable_and_critical,
        decision,
        certificates,
        inconsistencies,
    })
}
