#![allow(dead_code)]

use coamoeba_core::exactmath::IntMatrix;
use coamoeba_core::model::{NormalizedModel, Sign};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 20_240_611;

/// Every sign vector in `{±1}ⁿ`, in binary order (bit i set ⇒ εᵢ = −1).
pub fn all_signs(n: usize) -> Vec<Vec<Sign>> {
    (0..1u32 << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect()
        })
        .collect()
}

/// A random nonsingular `n × n` matrix with entries in `[−bound, bound]`.
pub fn random_nonsingular(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> IntMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows).unwrap();
        if !m.determinant().unwrap().is_zero() {
            return m;
        }
    }
}

/// Like [`random_nonsingular`], with every row lexicographically positive so
/// that the origin is already the canonical vertex and normalization only
/// reorders rows.
pub fn random_normalized(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> IntMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| {
                let mut r: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
                if r.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                    r.iter_mut().for_each(|x| *x = -*x);
                }
                r
            })
            .collect();
        let m = IntMatrix::from_rows(&rows).unwrap();
        if !m.determinant().unwrap().is_zero() {
            return m;
        }
    }
}

/// Exponent matrices of the corpus: every 1×1 case, a few fixed matrices,
/// then random 2×2 and 3×3 matrices with entries in `[−4, 4]`.
pub fn corpus_matrices() -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out: Vec<IntMatrix> = (1i64..=4).map(|a| IntMatrix::from_i64(&[&[a]])).collect();
    out.push(IntMatrix::from_i64(&[&[1, 0], &[0, 1]]));
    out.push(IntMatrix::from_i64(&[&[2, 0], &[0, 2]]));
    out.push(IntMatrix::from_i64(&[&[2, 1], &[1, 2]]));
    out.push(IntMatrix::from_i64(&[&[1, 0], &[0, 2]]));
    for _ in 0..10 {
        out.push(random_normalized(&mut rng, 2, 4));
    }
    out.push(IntMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
    out.push(IntMatrix::from_i64(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]));
    for _ in 0..18 {
        out.push(random_normalized(&mut rng, 3, 4));
    }
    out
}

/// The full corpus: every corpus matrix with every sign vector.
pub fn corpus() -> Vec<NormalizedModel> {
    corpus_matrices()
        .into_iter()
        .flat_map(|a| {
            all_signs(a.rows())
                .into_iter()
                .map(move |eps| NormalizedModel::from_parts(a.clone(), eps).unwrap())
        })
        .collect()
}

pub fn model(rows: &[&[i64]], eps: &[i8]) -> NormalizedModel {
    let eps = eps.iter().map(|&e| Sign::from_i8(e).unwrap()).collect();
    NormalizedModel::from_parts(IntMatrix::from_i64(rows), eps).unwrap()
}

/// Orthant `γ` (bit `j` set ⇒ `x_j < 0`) meets the real hypersurface iff
/// some term of `1 + Σ εᵢ x^{aᵢ}` is negative there: monomial magnitudes
/// can be chosen freely because `A` is nonsingular.
pub fn orthant_hit(model: &NormalizedModel, gamma: usize) -> bool {
    (0..model.n).any(|i| {
        let parity: i64 = (0..model.n)
            .filter(|&j| gamma >> j & 1 == 1)
            .map(|j| model.a.get(i, j).clone())
            .map(|x| i64::try_from(x).unwrap().rem_euclid(2))
            .sum();
        let sign = i64::from(model.epsilon[i].as_i8()) * if parity % 2 == 1 { -1 } else { 1 };
        sign < 0
    })
}
