use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::matrix::{serialize_bigint_slice, IntMatrix};
use crate::error::{Error, Result};

/// Smith normal form `G · A · H = diag(d₁, …, dₙ)` of a nonsingular square
/// integer matrix, with `G` and `H` unimodular and `d₁ | d₂ | … | dₙ`, all
/// positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithDecomposition {
    pub g: IntMatrix,
    pub h: IntMatrix,
    #[serde(serialize_with = "serialize_bigint_slice")]
    pub d: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn diagonal_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.d)
    }

    /// Product `d₁ ⋯ dₙ`, which equals `|det A|`.
    pub fn product(&self) -> BigInt {
        self.d.iter().product()
    }
}

/// Position of the nonzero entry of smallest absolute value in the trailing
/// submatrix starting at `(t, t)`; ties go to the lowest `(row, col)`.
fn smallest_pivot(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let n = m.rows();
    let mut best: Option<(usize, usize)> = None;
    for i in t..n {
        for j in t..n {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if m.get(bi, bj).abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with unimodular transforms.
///
/// Deterministic: the pivot at every step is the smallest nonzero entry by
/// absolute value in the active submatrix, ties broken by lowest
/// `(row, col)`. Diagonal signs are made positive by negating rows, which is
/// absorbed into `G`.
pub fn snf(a: &IntMatrix) -> Result<SmithDecomposition> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.determinant()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut g = IntMatrix::identity(n);
    let mut h = IntMatrix::identity(n);

    for t in 0..n {
        loop {
            let (pi, pj) = smallest_pivot(&m, t).ok_or(Error::SingularMatrix)?;
            m.swap_rows(t, pi);
            g.swap_rows(t, pi);
            m.swap_cols(t, pj);
            h.swap_cols(t, pj);

            let pivot = m.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..n {
                let q = m.get(i, t).div_floor(&pivot);
                if !q.is_zero() {
                    let neg = -q;
                    m.add_row_multiple(i, t, &neg);
                    g.add_row_multiple(i, t, &neg);
                }
                dirty |= !m.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = m.get(t, j).div_floor(&pivot);
                if !q.is_zero() {
                    let neg = -q;
                    m.add_col_multiple(j, t, &neg);
                    h.add_col_multiple(j, t, &neg);
                }
                dirty |= !m.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let offender = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !m.get(i, j).is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::from(1);
                    m.add_row_multiple(t, i, &one);
                    g.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if m.get(t, t).is_negative() {
            m.negate_row(t);
            g.negate_row(t);
        }
    }

    let d = (0..n).map(|i| m.get(i, i).clone()).collect();
    Ok(SmithDecomposition { g, h, d })
}

/// gcd of all `k × k` minors of `a`, by exhaustive enumeration (0 when they
/// all vanish). Independent of [`snf`]; used as its oracle.
pub fn minor_gcd(a: &IntMatrix, k: usize) -> Result<BigInt> {
    if k == 0 || k > a.rows().min(a.cols()) {
        return Err(Error::InvalidInput(format!(
            "minor size {k} outside 1..={}",
            a.rows().min(a.cols())
        )));
    }
    let row_sets = combinations(a.rows(), k);
    let col_sets = combinations(a.cols(), k);
    let mut g = BigInt::zero();
    for rs in &row_sets {
        for cs in &col_sets {
            let sub: Vec<Vec<BigInt>> = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| a.get(i, j).clone()).collect())
                .collect();
            let det = IntMatrix::from_rows(&sub)?.determinant()?;
            g = g.gcd(&det);
        }
    }
    Ok(g)
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}
