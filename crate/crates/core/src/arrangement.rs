//! Central complex hyperplane arrangements and their intersection posets.
//!
//! A hyperplane `H_i` is stored through a normal vector `v_i` spanning its
//! standard orthogonal complement. Intersections of hyperplanes correspond to
//! flats of the linear matroid of the normals: the flat of `L` is the index
//! set `I(L) = {i : L ⊂ H_i}` and its rank is `codim L`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{Field, GaussianRational, Real, ScalarMode};
use crate::span::{Reduction, Span, EPS_RANK};

/// Normal vectors, one row per hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub enum Normals {
    Exact(Vec<Vec<GaussianRational>>),
    Float(Vec<Vec<Complex64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    dim: usize,
    normals: Normals,
    labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlatClass {
    Irreducible,
    Reducible,
}

impl FlatClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FlatClass::Irreducible => "irreducible",
            FlatClass::Reducible => "reducible",
        }
    }
}

/// A flat `L` of the intersection poset, encoded by its member hyperplanes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    pub rank: usize,
    pub members: Vec<usize>,
    pub class: FlatClass,
}

impl Flat {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_irreducible(&self) -> bool {
        self.class == FlatClass::Irreducible
    }
}

/// All flats of rank `1..=rank(arrangement)`, sorted by rank then members.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionPoset {
    pub dim: usize,
    pub n: usize,
    pub flats: Vec<Flat>,
    /// Indices into `flats` of the irreducible rank-2 flats.
    pub rank2_irreducible: Vec<usize>,
    /// Unordered pairs `(i, j)`, `i < j`, whose intersection is a reducible rank-2 flat.
    pub rank2_reducible_pairs: Vec<(usize, usize)>,
    pub essential: bool,
    pub irreducible: bool,
}

impl IntersectionPoset {
    pub fn flats_of_rank(&self, rank: usize) -> impl Iterator<Item = &Flat> {
        self.flats.iter().filter(move |f| f.rank == rank)
    }

    pub fn count_of_rank(&self, rank: usize) -> usize {
        self.flats_of_rank(rank).count()
    }

    /// The irreducible rank-2 flats, in poset order.
    pub fn g2(&self) -> impl Iterator<Item = &Flat> {
        self.rank2_irreducible.iter().map(|&k| &self.flats[k])
    }

    /// Non-zero proper flats: rank `1..d-1`.
    pub fn proper_flats(&self) -> impl Iterator<Item = &Flat> {
        let d = self.dim;
        self.flats.iter().filter(move |f| f.rank >= 1 && f.rank < d)
    }

    /// The flat `{0}`, present when the arrangement is essential.
    pub fn origin(&self) -> Option<&Flat> {
        self.flats.iter().find(|f| f.rank == self.dim)
    }

    /// The standing assumption of most downstream computations.
    pub fn require_essential_irreducible(&self) -> Result<()> {
        if self.essential && self.irreducible {
            Ok(())
        } else {
            Err(Error::NotEssentialOrReducible)
        }
    }

    /// Summary with per-rank counts, the rank-2 multiplicity histogram and every flat.
    pub fn to_json(&self) -> Value {
        let max_rank = self.flats.iter().map(|f| f.rank).max().unwrap_or(0);
        let counts: Vec<usize> = (1..=max_rank).map(|r| self.count_of_rank(r)).collect();
        let mut histogram = BTreeMap::new();
        for f in self.flats_of_rank(2) {
            *histogram.entry(f.multiplicity().to_string()).or_insert(0usize) += 1;
        }
        json!({
            "d": self.dim,
            "n": self.n,
            "essential": self.essential,
            "irreducible": self.irreducible,
            "flat_counts_by_rank": counts,
            "rank2_multiplicities": histogram,
            "flats": self.flats.iter().map(|f| json!({
                "rank": f.rank,
                "members": f.members,
                "multiplicity": f.multiplicity(),
                "class": f.class.as_str(),
            })).collect::<Vec<_>>(),
            "rank2_irreducible": self.g2().map(|f| f.members.clone()).collect::<Vec<_>>(),
            "rank2_reducible_pairs": self.rank2_reducible_pairs.iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
        })
    }

    /// `B_i + 1` is the number of irreducible rank-2 flats through `H_i`.
    pub fn b_counts(&self) -> Vec<i64> {
        let mut b = vec![-1i64; self.n];
        for flat in self.g2() {
            for &i in &flat.members {
                b[i] += 1;
            }
        }
        b
    }
}

impl Arrangement {
    pub fn new_exact(
        dim: usize,
        normals: Vec<Vec<GaussianRational>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        validate(dim, &normals, labels.as_deref())?;
        Ok(Arrangement {
            dim,
            normals: Normals::Exact(normals),
            labels,
        })
    }

    pub fn new_float(
        dim: usize,
        normals: Vec<Vec<Complex64>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        validate(dim, &normals, labels.as_deref())?;
        Ok(Arrangement {
            dim,
            normals: Normals::Float(normals),
            labels,
        })
    }

    /// Exact arrangement from integer real normals.
    pub fn from_integer_rows(dim: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let normals = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| GaussianRational::new(BigRational::from_int(x), BigRational::zero()))
                    .collect()
            })
            .collect();
        Self::new_exact(dim, normals, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match &self.normals {
            Normals::Exact(v) => v.len(),
            Normals::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> ScalarMode {
        match self.normals {
            Normals::Exact(_) => ScalarMode::Exact,
            Normals::Float(_) => ScalarMode::Float,
        }
    }

    pub fn normals(&self) -> &Normals {
        &self.normals
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("H{}", i + 1),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} hyperplanes",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Normals as double-precision complex vectors.
    pub fn normals_c64(&self) -> Vec<Vec<Complex64>> {
        match &self.normals {
            Normals::Exact(v) => v
                .iter()
                .map(|r| r.iter().map(Field::to_complex64).collect())
                .collect(),
            Normals::Float(v) => v.clone(),
        }
    }

    /// Same hyperplanes with float arithmetic.
    pub fn to_float(&self) -> Result<Self> {
        Self::new_float(self.dim, self.normals_c64(), self.labels.clone())
    }

    /// Same hyperplanes with exact arithmetic; float entries convert to their exact binary value.
    pub fn to_exact(&self) -> Result<Self> {
        match &self.normals {
            Normals::Exact(_) => Ok(self.clone()),
            Normals::Float(v) => {
                let normals = v
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|z| {
                                GaussianRational::new(
                                    BigRational::from_f64_lossy(z.re),
                                    BigRational::from_f64_lossy(z.im),
                                )
                            })
                            .collect()
                    })
                    .collect();
                Self::new_exact(self.dim, normals, self.labels.clone())
            }
        }
    }

    /// Dimension of the span of the selected normals.
    pub fn rank(&self, indices: &[usize]) -> usize {
        match &self.normals {
            Normals::Exact(v) => rank_of(self.dim, v, indices),
            Normals::Float(v) => rank_of(self.dim, v, indices),
        }
    }

    /// The smallest flat containing `indices`.
    pub fn closure(&self, indices: &[usize]) -> Flat {
        match &self.normals {
            Normals::Exact(v) => closure_of(self.dim, v, indices),
            Normals::Float(v) => closure_of(self.dim, v, indices),
        }
    }

    /// Whether the localization at the given member set is irreducible.
    pub fn classify_members(&self, members: &[usize]) -> FlatClass {
        match &self.normals {
            Normals::Exact(v) => classify_of(self.dim, v, members),
            Normals::Float(v) => classify_of(self.dim, v, members),
        }
    }

    pub fn classify_flat(&self, flat: &Flat) -> FlatClass {
        self.classify_members(&flat.members)
    }

    /// `(essential, irreducible)`.
    pub fn global_properties(&self) -> (bool, bool) {
        let all: Vec<usize> = (0..self.len()).collect();
        let essential = self.rank(&all) == self.dim;
        let irreducible = self.classify_members(&all) == FlatClass::Irreducible;
        (essential, irreducible)
    }

    /// Enumerates the intersection poset rank by rank: every rank-`k+1` flat is
    /// the closure of a rank-`k` flat together with one extra hyperplane.
    pub fn enumerate_flats(&self) -> IntersectionPoset {
        let n = self.len();
        let mut layers: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        let first: BTreeSet<Vec<usize>> = (0..n).map(|i| self.closure(&[i]).members).collect();
        layers.push(first);
        loop {
            let last = layers.last().expect("non-empty");
            let mut next = BTreeSet::new();
            for members in last {
                let mut seen: Vec<bool> = vec![false; n];
                for &m in members {
                    seen[m] = true;
                }
                for i in 0..n {
                    if seen[i] {
                        continue;
                    }
                    let mut seed = members.clone();
                    seed.push(i);
                    let flat = self.closure(&seed);
                    for &m in &flat.members {
                        seen[m] = true;
                    }
                    next.insert(flat.members);
                }
            }
            if next.is_empty() {
                break;
            }
            layers.push(next);
        }

        let mut flats = Vec::new();
        for (k, layer) in layers.into_iter().enumerate() {
            for members in layer {
                let class = self.classify_members(&members);
                flats.push(Flat {
                    rank: k + 1,
                    members,
                    class,
                });
            }
        }

        let mut rank2_irreducible = Vec::new();
        let mut rank2_reducible_pairs = Vec::new();
        for (idx, f) in flats.iter().enumerate() {
            if f.rank != 2 {
                continue;
            }
            match f.class {
                FlatClass::Irreducible => rank2_irreducible.push(idx),
                FlatClass::Reducible => {
                    rank2_reducible_pairs.push((f.members[0], f.members[1]));
                }
            }
        }
        rank2_reducible_pairs.sort_unstable();

        let (essential, irreducible) = self.global_properties();
        IntersectionPoset {
            dim: self.dim,
            n,
            flats,
            rank2_irreducible,
            rank2_reducible_pairs,
            essential,
            irreducible,
        }
    }
}

fn validate<F: Field>(dim: usize, normals: &[Vec<F>], labels: Option<&[String]>) -> Result<()> {
    if dim < 2 {
        return Err(Error::DimensionMismatch(format!("d = {dim} < 2")));
    }
    if normals.len() < 2 {
        return Err(Error::DimensionMismatch(format!(
            "n = {} < 2 hyperplanes",
            normals.len()
        )));
    }
    if let Some(l) = labels {
        if l.len() != normals.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} hyperplanes",
                l.len(),
                normals.len()
            )));
        }
    }
    for (i, v) in normals.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "normal {} has {} entries, expected {dim}",
                i + 1,
                v.len()
            )));
        }
        if v.iter().all(|x| x.is_zero() || (!F::EXACT && x.modulus() == 0.0)) {
            return Err(Error::ZeroNormal { index: i });
        }
    }
    for j in 1..normals.len() {
        for i in 0..j {
            if proportional(&normals[i], &normals[j]) {
                return Err(Error::DuplicateHyperplane {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// `v = λ w` for some complex λ: all 2×2 minors vanish (exact) or the
/// Cauchy–Schwarz ratio is within 1e-12 of one (float).
fn proportional<F: Field>(v: &[F], w: &[F]) -> bool {
    if F::EXACT {
        for a in 0..v.len() {
            for b in (a + 1)..v.len() {
                let minor = v[a].clone() * w[b].clone() - v[b].clone() * w[a].clone();
                if !minor.is_zero() {
                    return false;
                }
            }
        }
        true
    } else {
        let vv: Vec<Complex64> = v.iter().map(Field::to_complex64).collect();
        let ww: Vec<Complex64> = w.iter().map(Field::to_complex64).collect();
        let inner: Complex64 = vv.iter().zip(&ww).map(|(x, y)| x * y.conj()).sum();
        let nv: f64 = vv.iter().map(|x| x.norm_sqr()).sum();
        let nw: f64 = ww.iter().map(|x| x.norm_sqr()).sum();
        inner.norm_sqr() >= (1.0 - 1e-12) * nv * nw
    }
}

fn rank_of<F: Field>(dim: usize, normals: &[Vec<F>], indices: &[usize]) -> usize {
    let mut span = Span::new(dim);
    for &i in indices {
        span.insert(&normals[i]);
    }
    span.rank()
}

fn closure_of<F: Field>(dim: usize, normals: &[Vec<F>], indices: &[usize]) -> Flat {
    let mut span = Span::new(dim);
    for &i in indices {
        span.insert(&normals[i]);
    }
    let members: Vec<usize> = (0..normals.len())
        .filter(|&i| indices.contains(&i) || span.contains(&normals[i]))
        .collect();
    let class = classify_of(dim, normals, &members);
    Flat {
        rank: span.rank(),
        members,
        class,
    }
}

/// Fundamental-circuit graph connectivity: choose a basis `B` of the member
/// normals, join each non-basis member to the basis members appearing with a
/// nonzero coefficient in its expansion, and test connectivity.
fn classify_of<F: Field>(dim: usize, normals: &[Vec<F>], members: &[usize]) -> FlatClass {
    let m = members.len();
    if m <= 1 {
        return FlatClass::Irreducible;
    }
    let mut span = Span::new(dim);
    let mut basis = Vec::new();
    let mut rest = Vec::new();
    for (pos, &i) in members.iter().enumerate() {
        if span.insert(&normals[i]) {
            basis.push(pos);
        } else {
            rest.push(pos);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &pos in &rest {
        let v = &normals[members[pos]];
        let Reduction::InSpan(coords) = span.reduce(v) else {
            unreachable!("non-basis member lies in the span of the basis");
        };
        let vnorm = norm(v);
        for (k, c) in coords.iter().enumerate() {
            let nonzero = if F::EXACT {
                !c.is_zero()
            } else {
                c.modulus() * norm(&normals[members[basis[k]]]) > EPS_RANK * vnorm
            };
            if nonzero {
                adj[pos].push(basis[k]);
                adj[basis[k]].push(pos);
            }
        }
    }
    let mut seen = vec![false; m];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    if seen.iter().all(|&s| s) {
        FlatClass::Irreducible
    } else {
        FlatClass::Reducible
    }
}

fn norm<F: Field>(v: &[F]) -> f64 {
    v.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
}
