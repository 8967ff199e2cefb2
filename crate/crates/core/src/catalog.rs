//! Standard arrangement families used as fixtures and by the CLI.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Reflection arrangement of type `A_{m-1}`, essentialized to `C^{m-1}`.
    Braid { m: usize },
    /// Full monomial (type `B_d`) arrangement in `C^d`.
    FullMonomialB { d: usize },
    /// `k` equally spaced real lines through the origin of `C^2` (float).
    DihedralLines { k: usize },
    /// `n` hyperplanes in general position in `C^d` with small integer normals.
    Generic { n: usize, d: usize, seed: u64 },
}

impl Family {
    /// Parses a family name and its integer parameters, as used on the command line.
    pub fn parse(name: &str, params: &[u64], seed: u64) -> Result<Self> {
        let need = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::BadParams(format!(
                    "family `{name}` takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let family = match name {
            "braid" => {
                need(1)?;
                Family::Braid {
                    m: params[0] as usize,
                }
            }
            "full-monomial-b" | "full_monomial_B" | "full_monomial_b" => {
                need(1)?;
                Family::FullMonomialB {
                    d: params[0] as usize,
                }
            }
            "dihedral" | "dihedral-lines" | "dihedral_lines" => {
                need(1)?;
                Family::DihedralLines {
                    k: params[0] as usize,
                }
            }
            "generic" => {
                need(2)?;
                Family::Generic {
                    n: params[0] as usize,
                    d: params[1] as usize,
                    seed,
                }
            }
            other => return Err(Error::BadParams(format!("unknown family `{other}`"))),
        };
        Ok(family)
    }

    pub fn build(&self) -> Result<Arrangement> {
        match *self {
            Family::Braid { m } => braid(m),
            Family::FullMonomialB { d } => full_monomial_b(d),
            Family::DihedralLines { k } => dihedral_lines(k),
            Family::Generic { n, d, seed } => generic(n, d, seed),
        }
    }
}

/// Covectors `x_i - x_j` on the sum-zero hyperplane of `C^m`, written in the
/// basis `e_k - e_m` (`k < m`), so `d = m - 1`.
pub fn braid(m: usize) -> Result<Arrangement> {
    if m < 3 {
        return Err(Error::BadParams(format!("braid(m) needs m >= 3, got {m}")));
    }
    let d = m - 1;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let mut full = vec![0i64; m];
            full[i] = 1;
            full[j] = -1;
            let row: Vec<i64> = (0..d).map(|k| full[k] - full[m - 1]).collect();
            rows.push(row);
            labels.push(format!("x{}-x{}", i + 1, j + 1));
        }
    }
    Arrangement::from_integer_rows(d, &rows)?.with_labels(labels)
}

/// `x_i - x_j`, then `x_i + x_j` (`i < j`), then `x_i`: `n = d^2`.
pub fn full_monomial_b(d: usize) -> Result<Arrangement> {
    if d < 2 {
        return Err(Error::BadParams(format!(
            "full_monomial_B(d) needs d >= 2, got {d}"
        )));
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for sign in [-1i64, 1] {
        for i in 0..d {
            for j in (i + 1)..d {
                let mut row = vec![0i64; d];
                row[i] = 1;
                row[j] = sign;
                rows.push(row);
                let op = if sign < 0 { '-' } else { '+' };
                labels.push(format!("x{}{op}x{}", i + 1, j + 1));
            }
        }
    }
    for i in 0..d {
        let mut row = vec![0i64; d];
        row[i] = 1;
        rows.push(row);
        labels.push(format!("x{}", i + 1));
    }
    Arrangement::from_integer_rows(d, &rows)?.with_labels(labels)
}

/// Normals `(cos(jπ/k), sin(jπ/k))`, `j = 0..k`.
pub fn dihedral_lines(k: usize) -> Result<Arrangement> {
    if k < 2 {
        return Err(Error::BadParams(format!(
            "dihedral_lines(k) needs k >= 2, got {k}"
        )));
    }
    let normals = (0..k)
        .map(|j| {
            let t = PI * j as f64 / k as f64;
            vec![Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)]
        })
        .collect();
    let labels = (0..k).map(|j| format!("L{}", j + 1)).collect();
    Arrangement::new_float(2, normals, Some(labels))
}

/// Random integer normals in `[-9, 9]^d`, resampled until every `d` of them
/// are linearly independent. This forces all rank-2 flats to have
/// multiplicity 2 when `d >= 3`, and makes the arrangement essential, and
/// irreducible once `n > d`.
pub fn generic(n: usize, d: usize, seed: u64) -> Result<Arrangement> {
    if d < 2 || n < d {
        return Err(Error::BadParams(format!(
            "generic(n, d) needs d >= 2 and n >= d, got n = {n}, d = {d}"
        )));
    }
    if n > 24 {
        return Err(Error::BadParams(format!("generic(n, d) supports n <= 24, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let Ok(arr) = Arrangement::from_integer_rows(d, &rows) else {
            continue;
        };
        if in_general_position(&arr) {
            let labels = (0..n).map(|i| format!("H{}", i + 1)).collect();
            return arr.with_labels(labels);
        }
    }
    Err(Error::BadParams(format!(
        "could not sample generic({n}, {d}) with seed {seed}"
    )))
}

fn in_general_position(arr: &Arrangement) -> bool {
    let (n, d) = (arr.len(), arr.dim());
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        if arr.rank(&subset) < d {
            return false;
        }
        // next d-subset of 0..n in lexicographic order
        let mut k = d;
        while k > 0 && subset[k - 1] == n - d + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return true;
        }
        subset[k - 1] += 1;
        for t in k..d {
            subset[t] = subset[t - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn braid_shapes() {
        let a = braid(4).unwrap();
        assert_eq!((a.len(), a.dim()), (6, 3));
        let b = braid(5).unwrap();
        assert_eq!((b.len(), b.dim()), (10, 4));
        assert!(braid(2).is_err());
    }

    #[test]
    fn full_monomial_b3_poset() {
        let arr = full_monomial_b(3).unwrap();
        assert_eq!((arr.len(), arr.dim()), (9, 3));
        let poset = arr.enumerate_flats();
        let mult = |m: usize| poset.flats_of_rank(2).filter(|f| f.multiplicity() == m).count();
        assert_eq!(mult(4), 3);
        // x1=x2=x3 and the three sign variants x_i=x_j=-x_k
        assert_eq!(mult(3), 4);
        assert_eq!(mult(2), 6);
        assert!(poset.essential && poset.irreducible);
    }

    #[test]
    fn dihedral_three_lines() {
        let arr = dihedral_lines(3).unwrap();
        assert_eq!((arr.len(), arr.dim()), (3, 2));
        assert_eq!(arr.global_properties(), (true, true));
    }

    #[test]
    fn generic_five_planes() {
        let arr = generic(5, 3, 7).unwrap();
        let poset = arr.enumerate_flats();
        assert_eq!(poset.count_of_rank(1), 5);
        assert_eq!(poset.count_of_rank(2), 10);
        assert!(poset.flats_of_rank(2).all(|f| f.multiplicity() == 2));
        assert_eq!(poset.count_of_rank(3), 1);
        assert!(poset.essential && poset.irreducible);
        assert_eq!(generic(5, 3, 7).unwrap(), arr);
    }

    #[test]
    fn family_parsing() {
        assert_eq!(Family::parse("braid", &[4], 0).unwrap(), Family::Braid { m: 4 });
        assert!(Family::parse("braid", &[4, 1], 0).is_err());
        assert!(Family::parse("nope", &[], 0).is_err());
        assert_eq!(
            Family::parse("generic", &[5, 3], 11).unwrap(),
            Family::Generic { n: 5, d: 3, seed: 11 }
        );
    }
}
