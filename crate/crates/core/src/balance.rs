//! Balanced Hermitian metrics and tight-frame primitives.
//!
//! For stable weights there is a Hermitian inner product, unique up to scale,
//! with `Σ a_i P_i = c · Id`, where `P_i` is the orthogonal projection onto the
//! metric complement of `H_i`. The solver works on the normals: it looks for a
//! gauge `G` such that the unit vectors `u_i = G v_i / |G v_i|` satisfy
//! `Σ a_i u_i u_i* = c · Id`, iterating `G ← (S/c)^{-1/2} G`. The metric on the
//! original space is then `M = (G* G)^{-1}`, and the `M`-complement of `H_i` is
//! spanned by `M^{-1} v_i`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::arrangement::{Arrangement, IntersectionPoset};
use crate::error::{Error, Result};
use crate::stability::{self, StabilityRow};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Gauge condition number treated as divergence.
pub const MAX_GAUGE_CONDITION: f64 = 1e9;
/// Relative Welch gap below which a frame counts as tight.
pub const TOL_TIGHT: f64 = 1e-10;

/// A finite sequence of vectors in `C^d`; weights are absorbed into lengths.
#[derive(Debug, Clone)]
pub struct FrameConfig {
    pub dim: usize,
    pub vectors: Vec<CVector>,
}

impl FrameConfig {
    pub fn new(dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::DimensionMismatch("empty frame".into()));
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "frame vector {} has length {}, expected {dim}",
                    index + 1,
                    v.len()
                )));
            }
            if v.norm() == 0.0 {
                return Err(Error::ZeroNormal { index });
            }
        }
        Ok(FrameConfig { dim, vectors })
    }

    /// `v_i = sqrt(a_i) · u_i / |u_i|`, so `|v_i|² = a_i`.
    pub fn weighted(dim: usize, directions: &[CVector], weights: &[f64]) -> Result<Self> {
        let vectors = directions
            .iter()
            .zip(weights)
            .map(|(u, &a)| u * Complex64::from(a.sqrt() / u.norm()))
            .collect();
        Self::new(dim, vectors)
    }
}

/// `S = Σ v_i v_i*`, the matrix of `x ↦ Σ ⟨x, v_i⟩ v_i`.
pub fn frame_operator(frame: &FrameConfig) -> CMatrix {
    let mut s = CMatrix::zeros(frame.dim, frame.dim);
    for v in &frame.vectors {
        s += v * v.adjoint();
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchGap {
    /// `Σ_ij |⟨v_i, v_j⟩|²`.
    pub lhs: f64,
    /// `(Σ |v_i|²)² / d`.
    pub rhs: f64,
    pub gap: f64,
    pub is_tight: bool,
}

/// Frame potential against its lower bound; equality exactly for tight frames.
pub fn welch_gap(frame: &FrameConfig) -> WelchGap {
    welch_gap_in(frame, frame.dim, TOL_TIGHT)
}

/// Same as [`welch_gap`] but with the bound taken in a subspace of dimension
/// `dim` containing every vector of the frame.
pub fn welch_gap_in(frame: &FrameConfig, dim: usize, tol_tight: f64) -> WelchGap {
    let mut lhs = 0.0;
    for vi in &frame.vectors {
        for vj in &frame.vectors {
            lhs += vi.dotc(vj).norm_sqr();
        }
    }
    let total: f64 = frame.vectors.iter().map(|v| v.norm_squared()).sum();
    let rhs = total * total / dim as f64;
    let gap = lhs - rhs;
    WelchGap {
        lhs,
        rhs,
        gap,
        is_tight: gap <= tol_tight * rhs,
    }
}

fn hermitian_defect(h: &CMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

/// `X` Hermitian positive-definite with `X H X = Id`.
pub fn hpd_inv_sqrt(h: &CMatrix) -> Result<CMatrix> {
    if !h.is_square() {
        return Err(Error::NotPositiveDefinite);
    }
    let scale = h.norm();
    if scale.is_nan() || scale <= 0.0 || hermitian_defect(h) > 1e-10 * scale {
        return Err(Error::NotPositiveDefinite);
    }
    let sym = (h + h.adjoint()) * Complex64::from(0.5);
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if max.is_nan() || max <= 0.0 || min <= 1e-14 * max {
        return Err(Error::NotPositiveDefinite);
    }
    let inv_sqrt = eig
        .eigenvalues
        .map(|l| Complex64::from(1.0 / l.sqrt()));
    let q = &eig.eigenvectors;
    Ok(q * CMatrix::from_diagonal(&inv_sqrt) * q.adjoint())
}

fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Debug, Clone)]
pub struct BalanceOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Run the stability test first and stop with its certificate if it fails.
    pub precheck: bool,
    /// Starting gauge; identity when `None`.
    pub initial_gauge: Option<CMatrix>,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        BalanceOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            precheck: true,
            initial_gauge: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceStatus {
    Converged,
    Diverged,
    MaxIter,
}

impl BalanceStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BalanceStatus::Converged => "converged",
            BalanceStatus::Diverged => "diverged",
            BalanceStatus::MaxIter => "max_iter",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BalanceResult {
    pub status: BalanceStatus,
    pub gauge: CMatrix,
    /// `M = (G* G)^{-1}`.
    pub metric: CMatrix,
    /// Unit vectors `u_i = G v_i / |G v_i|`.
    pub frame: Vec<CVector>,
    pub weights: Vec<f64>,
    /// `Σ a_i / d`.
    pub c: f64,
    /// `‖Σ a_i u_i u_i* − c Id‖_F / c` at the final gauge.
    pub residual: f64,
    pub iterations: usize,
    /// Residual before each gauge update, starting with the initial gauge.
    pub history: Vec<f64>,
    /// Violated stability row, when the precheck found one.
    pub certificate: Option<StabilityRow<f64>>,
    pub note: Option<String>,
}

impl BalanceResult {
    pub fn is_converged(&self) -> bool {
        self.status == BalanceStatus::Converged
    }

    /// `Σ a_i u_i u_i*` in the balanced gauge.
    pub fn balanced_operator(&self) -> CMatrix {
        let d = self.gauge.nrows();
        let mut s = CMatrix::zeros(d, d);
        for (u, &a) in self.frame.iter().zip(&self.weights) {
            s += (u * u.adjoint()) * Complex64::from(a);
        }
        s
    }

    /// Trace-normalized metric `M / tr M`.
    pub fn normalized_metric(&self) -> CMatrix {
        let tr = self.metric.trace();
        &self.metric / tr
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status.as_str(),
            "c": self.c,
            "residual": finite_or_null(self.residual),
            "iterations": self.iterations,
            "metric": matrix_json(&self.metric),
            "gauge": matrix_json(&self.gauge),
            "balanced_frame": self.frame.iter().map(vector_json).collect::<Vec<_>>(),
            "certificate": self.certificate.as_ref().map(|r| json!({
                "flat": r.members,
                "a_L": r.a_l,
                "margin": r.margin,
            })),
            "note": self.note,
        })
    }
}

fn finite_or_null(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Row-major `[[[re, im], ...], ...]`.
pub fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|r| {
            Value::Array(
                (0..m.ncols())
                    .map(|c| json!([finite_or_null(m[(r, c)].re), finite_or_null(m[(r, c)].im)]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

pub fn vector_json(v: &CVector) -> Value {
    Value::Array(
        v.iter()
            .map(|z| json!([finite_or_null(z.re), finite_or_null(z.im)]))
            .collect(),
    )
}

pub(crate) fn normals_as_vectors(arr: &Arrangement) -> Vec<CVector> {
    arr.normals_c64()
        .into_iter()
        .map(CVector::from_vec)
        .collect()
}

fn unit_frame(gauge: &CMatrix, normals: &[CVector]) -> Vec<CVector> {
    normals
        .iter()
        .map(|v| {
            let w = gauge * v;
            let norm = w.norm();
            w / Complex64::from(norm)
        })
        .collect()
}

fn weighted_operator(frame: &[CVector], weights: &[f64]) -> CMatrix {
    let d = frame[0].len();
    let mut s = CMatrix::zeros(d, d);
    for (u, &a) in frame.iter().zip(weights) {
        s += (u * u.adjoint()) * Complex64::from(a);
    }
    s
}

fn relative_residual(s: &CMatrix, c: f64) -> f64 {
    let d = s.nrows();
    (s - CMatrix::identity(d, d) * Complex64::from(c)).norm() / c
}

/// Moment-map scaling for the balanced metric of a stable weighted arrangement.
pub fn balance(
    arr: &Arrangement,
    poset: &IntersectionPoset,
    weights: &[f64],
    opts: &BalanceOptions,
) -> Result<BalanceResult> {
    poset.require_essential_irreducible()?;
    stability::check_weights(weights, arr.len())?;
    let d = arr.dim();
    let normals = normals_as_vectors(arr);
    let c = weights.iter().sum::<f64>() / d as f64;
    let mut gauge = match &opts.initial_gauge {
        Some(g) if g.nrows() == d && g.ncols() == d => g.clone(),
        Some(g) => {
            return Err(Error::DimensionMismatch(format!(
                "initial gauge is {}x{}, expected {d}x{d}",
                g.nrows(),
                g.ncols()
            )))
        }
        None => CMatrix::identity(d, d),
    };

    let finish = |status, gauge: CMatrix, residual, iterations, history, certificate, note| {
        let frame = unit_frame(&gauge, &normals);
        let metric = (gauge.adjoint() * &gauge)
            .try_inverse()
            .unwrap_or_else(|| CMatrix::from_element(d, d, Complex64::from(f64::NAN)));
        BalanceResult {
            status,
            gauge,
            metric,
            frame,
            weights: weights.to_vec(),
            c,
            residual,
            iterations,
            history,
            certificate,
            note,
        }
    };

    if opts.precheck {
        let report = stability::stability_report(poset, weights)?;
        if !report.stable {
            let cert = report.violations().next().cloned().or_else(|| report.worst_row().cloned());
            return Ok(finish(
                BalanceStatus::Diverged,
                gauge,
                f64::INFINITY,
                0,
                Vec::new(),
                cert,
                Some("weights are not stable".into()),
            ));
        }
    }

    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let frame = unit_frame(&gauge, &normals);
        let s = weighted_operator(&frame, weights);
        let residual = relative_residual(&s, c);
        history.push(residual);
        if !residual.is_finite() {
            return Ok(finish(
                BalanceStatus::Diverged,
                gauge,
                residual,
                iterations,
                history,
                None,
                Some("non-finite residual".into()),
            ));
        }
        if residual < opts.tol {
            return Ok(finish(
                BalanceStatus::Converged,
                gauge,
                residual,
                iterations,
                history,
                None,
                None,
            ));
        }
        if iterations >= opts.max_iter {
            return Ok(finish(
                BalanceStatus::MaxIter,
                gauge,
                residual,
                iterations,
                history,
                None,
                Some(format!("no convergence after {iterations} iterations")),
            ));
        }
        let step = match hpd_inv_sqrt(&(s / Complex64::from(c))) {
            Ok(x) => x,
            Err(_) => {
                return Ok(finish(
                    BalanceStatus::Diverged,
                    gauge,
                    residual,
                    iterations,
                    history,
                    None,
                    Some("frame operator became singular".into()),
                ))
            }
        };
        gauge = step * gauge;
        iterations += 1;
        let cond = condition_number(&gauge);
        if cond > MAX_GAUGE_CONDITION {
            let frame = unit_frame(&gauge, &normals);
            let residual = relative_residual(&weighted_operator(&frame, weights), c);
            return Ok(finish(
                BalanceStatus::Diverged,
                gauge,
                residual,
                iterations,
                history,
                None,
                Some(format!("gauge condition number {cond:.3e} exceeds limit")),
            ));
        }
    }
}

/// `‖Σ a_i P_i^M − c Id‖_F / c` in the original coordinates, where `P_i^M` is
/// the `M`-orthogonal projection onto the `M`-complement of `H_i`.
pub fn metric_balance_residual(arr: &Arrangement, weights: &[f64], metric: &CMatrix) -> f64 {
    let d = arr.dim();
    let c = weights.iter().sum::<f64>() / d as f64;
    let Some(metric_inv) = metric.clone().try_inverse() else {
        return f64::INFINITY;
    };
    let mut total = CMatrix::zeros(d, d);
    for (v, &a) in normals_as_vectors(arr).iter().zip(weights) {
        let w = &metric_inv * v;
        let mw = metric * &w;
        // P x = w ⟨x, w⟩_M / ⟨w, w⟩_M with ⟨x, y⟩_M = y* M x
        let denom = w.dotc(&mw);
        total += (&w * mw.adjoint()) * (Complex64::from(a) / denom);
    }
    relative_residual(&total, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn cv(entries: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(entries.len(), entries.iter().map(|&(r, i)| Complex64::new(r, i)))
    }

    fn mercedes() -> FrameConfig {
        let vs = (0..3)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                cv(&[(t.cos(), 0.0), (t.sin(), 0.0)])
            })
            .collect();
        FrameConfig::new(2, vs).unwrap()
    }

    #[test]
    fn frame_operator_examples() {
        let basis = FrameConfig::new(3, (0..3).map(|k| {
            let mut e = CVector::zeros(3);
            e[k] = Complex64::from(1.0);
            e
        }).collect()).unwrap();
        assert!((frame_operator(&basis) - CMatrix::identity(3, 3)).norm() < 1e-15);

        let e1 = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        let doubled = FrameConfig::new(2, vec![e1.clone(), e1]).unwrap();
        let s = frame_operator(&doubled);
        assert_eq!(s[(0, 0)], Complex64::from(2.0));
        assert_eq!(s[(1, 1)], Complex64::from(0.0));

        let m = frame_operator(&mercedes());
        assert!((m - CMatrix::identity(2, 2) * Complex64::from(1.5)).norm() < 1e-14);
    }

    #[test]
    fn welch_examples() {
        let e1 = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        let e2 = cv(&[(0.0, 0.0), (0.0, 1.0)]);
        let onb = welch_gap(&FrameConfig::new(2, vec![e1.clone(), e2]).unwrap());
        assert!((onb.lhs - 2.0).abs() < 1e-15 && (onb.rhs - 2.0).abs() < 1e-15);
        assert!(onb.is_tight);

        let doubled = welch_gap(&FrameConfig::new(2, vec![e1.clone(), e1]).unwrap());
        assert_eq!((doubled.lhs, doubled.rhs, doubled.gap), (4.0, 2.0, 2.0));
        assert!(!doubled.is_tight);

        let m = welch_gap(&mercedes());
        assert!((m.lhs - 4.5).abs() < 1e-13 && (m.rhs - 4.5).abs() < 1e-13);
        assert!(m.is_tight);
    }

    #[test]
    fn inverse_square_roots() {
        let id = CMatrix::identity(3, 3);
        assert!((hpd_inv_sqrt(&id).unwrap() - &id).norm() < 1e-15);
        let diag = CMatrix::from_diagonal(&cv(&[(4.0, 0.0), (1.0, 0.0)]));
        let x = hpd_inv_sqrt(&diag).unwrap();
        assert!((x[(0, 0)] - Complex64::from(0.5)).norm() < 1e-15);
        assert!((x[(1, 1)] - Complex64::from(1.0)).norm() < 1e-15);

        let singular = CMatrix::from_diagonal(&cv(&[(1.0, 0.0), (0.0, 0.0)]));
        assert_eq!(hpd_inv_sqrt(&singular).unwrap_err(), Error::NotPositiveDefinite);
        let mut skew = CMatrix::identity(2, 2);
        skew[(0, 1)] = Complex64::new(0.0, 1.0);
        assert_eq!(hpd_inv_sqrt(&skew).unwrap_err(), Error::NotPositiveDefinite);
    }

    #[test]
    fn dihedral_is_already_balanced() {
        let arr = catalog::dihedral_lines(3).unwrap();
        let poset = arr.enumerate_flats();
        let res = balance(&arr, &poset, &[1.0; 3], &BalanceOptions::default()).unwrap();
        assert!(res.is_converged());
        assert_eq!(res.iterations, 0);
        assert!((res.c - 1.5).abs() < 1e-15);
    }

    #[test]
    fn braid_converges() {
        let arr = catalog::braid(4).unwrap();
        let poset = arr.enumerate_flats();
        let res = balance(&arr, &poset, &[1.0; 6], &BalanceOptions::default()).unwrap();
        assert!(res.is_converged(), "{:?}", res.note);
        assert!(res.residual < 1e-12);
        assert!((res.c - 2.0).abs() < 1e-15);
        assert!(metric_balance_residual(&arr, &[1.0; 6], &res.metric) < 1e-10);
    }

    #[test]
    fn unstable_input_diverges_with_certificate() {
        let arr = catalog::dihedral_lines(3).unwrap();
        let poset = arr.enumerate_flats();
        let res = balance(&arr, &poset, &[3.0, 1.0, 1.0], &BalanceOptions::default()).unwrap();
        assert_eq!(res.status, BalanceStatus::Diverged);
        assert_eq!(res.certificate.unwrap().members, vec![0]);
    }

    #[test]
    fn unstable_without_precheck_does_not_converge() {
        let arr = catalog::dihedral_lines(3).unwrap();
        let poset = arr.enumerate_flats();
        let opts = BalanceOptions {
            precheck: false,
            max_iter: 2000,
            ..Default::default()
        };
        let res = balance(&arr, &poset, &[3.0, 1.0, 1.0], &opts).unwrap();
        assert_ne!(res.status, BalanceStatus::Converged);
    }
}
