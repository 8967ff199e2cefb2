//! Incremental row echelon basis of a span of vectors.
//!
//! Each stored row remembers its expression in terms of the original vectors
//! that were accepted as independent, so membership tests can also return the
//! coordinates of a dependent vector in that basis.

use crate::scalar::Field;

/// Relative pivot threshold for float row reduction.
pub const EPS_RANK: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Row<F> {
    entries: Vec<F>,
    pivot: usize,
    /// `entries = sum_k combo[k] * basis_vector[k]`.
    combo: Vec<F>,
}

/// Echelon basis of the span of the vectors inserted so far.
#[derive(Debug, Clone)]
pub struct Span<F: Field> {
    dim: usize,
    rows: Vec<Row<F>>,
    /// Largest entry modulus seen among inserted or tested vectors.
    scale: f64,
}

/// Result of reducing a vector against a span.
#[derive(Debug, Clone)]
pub enum Reduction<F> {
    /// Coordinates with respect to the accepted basis vectors (insertion order).
    InSpan(Vec<F>),
    Independent,
}

impl<F: Field> Span<F> {
    pub fn new(dim: usize) -> Self {
        Span {
            dim,
            rows: Vec::new(),
            scale: 0.0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn threshold(&self, v: &[F]) -> f64 {
        let vmax = v.iter().map(Field::modulus).fold(0.0, f64::max);
        EPS_RANK * self.scale.max(vmax)
    }

    fn is_zero(x: &F, threshold: f64) -> bool {
        if F::EXACT {
            x.is_zero()
        } else {
            x.modulus() <= threshold
        }
    }

    /// Returns the remainder of `v` after elimination and the multipliers used.
    fn eliminate(&self, v: &[F]) -> (Vec<F>, Vec<F>) {
        let mut rem = v.to_vec();
        let mut coeffs = vec![F::zero(); self.rows.len()];
        for (k, row) in self.rows.iter().enumerate() {
            let f = rem[row.pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (r, e) in rem.iter_mut().zip(&row.entries) {
                *r = r.clone() - f.clone() * e.clone();
            }
            coeffs[k] = f;
        }
        (rem, coeffs)
    }

    fn combine(&self, coeffs: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.rows.len()];
        for (row, f) in self.rows.iter().zip(coeffs) {
            if f.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(&row.combo) {
                *o = o.clone() + f.clone() * c.clone();
            }
        }
        out
    }

    pub fn reduce(&self, v: &[F]) -> Reduction<F> {
        assert_eq!(v.len(), self.dim, "vector length must match span dimension");
        let threshold = self.threshold(v);
        let (rem, coeffs) = self.eliminate(v);
        if rem.iter().all(|x| Self::is_zero(x, threshold)) {
            Reduction::InSpan(self.combine(&coeffs))
        } else {
            Reduction::Independent
        }
    }

    pub fn contains(&self, v: &[F]) -> bool {
        matches!(self.reduce(v), Reduction::InSpan(_))
    }

    /// Inserts `v`; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length must match span dimension");
        let threshold = self.threshold(v);
        let (rem, coeffs) = self.eliminate(v);
        // partial pivoting: largest remaining entry
        let pivot = rem
            .iter()
            .enumerate()
            .filter(|(_, x)| !Self::is_zero(x, threshold))
            .max_by(|a, b| a.1.modulus().total_cmp(&b.1.modulus()))
            .map(|(i, _)| i);
        let Some(pivot) = pivot else {
            return false;
        };
        let vmax = v.iter().map(Field::modulus).fold(0.0, f64::max);
        self.scale = self.scale.max(vmax);

        let p = rem[pivot].clone();
        let entries: Vec<F> = rem.into_iter().map(|x| x / p.clone()).collect();
        // combo of the new row: (e_new - sum_k coeffs[k] * combo_k) / p
        let mut combo = self.combine(&coeffs);
        for c in combo.iter_mut() {
            *c = -(c.clone()) / p.clone();
        }
        combo.push(F::one() / p);
        for row in self.rows.iter_mut() {
            row.combo.push(F::zero());
        }
        self.rows.push(Row {
            entries,
            pivot,
            combo,
        });
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{GaussianRational, Real};
    use num_complex::Complex64;
    use num_rational::BigRational;

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(BigRational::from_int(re), BigRational::from_int(im))
    }

    #[test]
    fn exact_coordinates() {
        let mut span = Span::new(3);
        assert!(span.insert(&[g(1, 0), g(0, 1), g(0, 0)]));
        assert!(span.insert(&[g(0, 0), g(1, 0), g(2, 0)]));
        assert!(!span.insert(&[g(2, 0), g(3, 2), g(6, 0)]));
        match span.reduce(&[g(2, 0), g(3, 2), g(6, 0)]) {
            Reduction::InSpan(c) => {
                assert_eq!(c, vec![g(2, 0), g(3, 0)]);
            }
            Reduction::Independent => panic!("vector should be in span"),
        }
        assert_eq!(span.rank(), 2);
    }

    #[test]
    fn float_threshold_is_scale_free() {
        let s = 1e-6;
        let mut span = Span::new(2);
        assert!(span.insert(&[Complex64::new(s, 0.0), Complex64::new(2.0 * s, 0.0)]));
        assert!(span.contains(&[Complex64::new(3.0 * s, 0.0), Complex64::new(6.0 * s, 0.0)]));
        assert!(!span.contains(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]));
    }
}
