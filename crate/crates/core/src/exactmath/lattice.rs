//! Lattice basis reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};

/// Result of [`lll_reduce`]: `reduced = basis · transform`, with `transform`
/// unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedBasis {
    pub reduced: IntMatrix,
    pub transform: IntMatrix,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer, halves rounded up.
fn round(x: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    (x.numer() * &two + x.denom()).div_floor(&(x.denom() * &two))
}

struct GramSchmidt {
    /// `mu[i][j]` for `j < i`
    mu: Vec<Vec<BigRational>>,
    /// squared norms of the orthogonalized vectors
    norms: Vec<BigRational>,
}

fn gram_schmidt(cols: &[Vec<BigInt>]) -> GramSchmidt {
    let k = cols.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(k);
    let mut mu = vec![vec![BigRational::zero(); k]; k];
    let mut norms = Vec::with_capacity(k);
    for i in 0..k {
        let mut v: Vec<BigRational> = cols[i].iter().cloned().map(BigRational::from_integer).collect();
        for j in 0..i {
            let num: BigRational = cols[i]
                .iter()
                .zip(&star[j])
                .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                .sum();
            let m = num / &norms[j];
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= &m * s;
            }
            mu[i][j] = m;
        }
        norms.push(v.iter().map(|x| x * x).sum());
        star.push(v);
    }
    GramSchmidt { mu, norms }
}

/// LLL reduction (`δ = 3/4`) of the columns of a nonsingular square integer
/// matrix, with exact arithmetic. The Gram–Schmidt data is recomputed after
/// every change, which is fine for the small dimensions used here.
pub fn lll_reduce(basis: &IntMatrix) -> Result<ReducedBasis> {
    if !basis.is_square() {
        return Err(Error::NotSquare {
            rows: basis.rows(),
            cols: basis.cols(),
        });
    }
    if basis.determinant()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let n = basis.cols();
    let mut b: Vec<Vec<BigInt>> = (0..n).map(|j| (0..n).map(|i| basis.get(i, j).clone()).collect()).collect();
    let mut t: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let delta = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let q = round(&gram_schmidt(&b).mu[k][j]);
            if !q.is_zero() {
                for i in 0..n {
                    let (bj, tj) = (b[j][i].clone(), t[j][i].clone());
                    b[k][i] -= &q * bj;
                    t[k][i] -= &q * tj;
                }
            }
        }
        let gs = gram_schmidt(&b);
        let m = &gs.mu[k][k - 1];
        if gs.norms[k] >= (&delta - m * m) * &gs.norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    let to_matrix = |cols: &[Vec<BigInt>]| {
        let mut out = IntMatrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                out.set(i, j, x.clone());
            }
        }
        out
    };
    Ok(ReducedBasis {
        reduced: to_matrix(&b),
        transform: to_matrix(&t),
    })
}

/// Euclidean norms of the columns, rounded up.
pub fn column_norms_ceil(m: &IntMatrix) -> Vec<BigInt> {
    (0..m.cols())
        .map(|j| {
            let col: Vec<BigInt> = (0..m.rows()).map(|i| m.get(i, j).clone()).collect();
            let sq = dot(&col, &col);
            let r = sq.sqrt();
            if &r * &r == sq {
                r
            } else {
                r + 1
            }
        })
        .collect()
}
