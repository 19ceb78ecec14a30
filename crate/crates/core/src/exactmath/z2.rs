use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Bit vector over the two-element field, packed into `u64` words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Z2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Z2Vector {
    pub fn zeros(len: usize) -> Self {
        Z2Vector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Vector with ones exactly at `indices`.
    pub fn from_support(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &Z2Vector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    fn leading_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * WORD + w.trailing_zeros() as usize)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for Z2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Serialized as a string of `0`/`1` characters, index 0 first.
impl Serialize for Z2Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{self:?}"))
    }
}

/// Dense matrix over the two-element field with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Z2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Z2Vector>,
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Z2Matrix {
            rows,
            cols,
            data: vec![Z2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<Z2Vector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Z2Matrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// From a 0/1 literal. Panics on ragged input.
    pub fn from_bits(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<Z2Vector> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix literal");
                Z2Vector::from_bits(&r.iter().map(|&b| b & 1 == 1).collect::<Vec<_>>())
            })
            .collect();
        Z2Matrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &Z2Vector {
        &self.data[i]
    }

    pub fn push_row(&mut self, row: Z2Vector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        self.data.push(row);
        self.rows += 1;
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &Z2Vector) -> Result<Z2Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = Z2Vector::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            let parity = row
                .words
                .iter()
                .zip(&v.words)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>();
            out.set(i, parity % 2 == 1);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Z2Matrix) -> Result<Z2Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Z2Matrix::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Z2Vector::is_zero)
    }
}

/// Incrementally maintained row echelon basis; each stored vector has a
/// distinct leading bit.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    basis: Vec<Z2Vector>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `v` against the basis; returns the remainder.
    pub fn reduce(&self, mut v: Z2Vector) -> Z2Vector {
        for b in &self.basis {
            let lead = b.leading_one().expect("basis vectors are nonzero");
            if v.get(lead) {
                v.xor_assign(b);
            }
        }
        v
    }

    /// Adds `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: Z2Vector) -> bool {
        let r = self.reduce(v);
        let Some(lead) = r.leading_one() else {
            return false;
        };
        // keep earlier vectors reduced at the new leading bit so later
        // reductions stay single-pass
        for b in &mut self.basis {
            if b.get(lead) {
                b.xor_assign(&r);
            }
        }
        self.basis.push(r);
        true
    }

    pub fn contains(&self, v: &Z2Vector) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Rank over the two-element field, by Gaussian elimination on packed rows.
pub fn z2_rank(m: &Z2Matrix) -> usize {
    let mut rows = m.data.clone();
    let mut rank = 0;
    let nwords = words_for(m.cols);
    for wi in 0..nwords {
        for bit in 0..WORD {
            let col = wi * WORD + bit;
            if col >= m.cols || rank == rows.len() {
                break;
            }
            let mask = 1u64 << bit;
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].words[wi] & mask != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot = &head[rank];
            for r in tail.iter_mut() {
                if r.words[wi] & mask != 0 {
                    for (a, b) in r.words[wi..].iter_mut().zip(&pivot.words[wi..]) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Whether `v` lies in the row span of `m`.
pub fn z2_in_span(m: &Z2Matrix, v: &Z2Vector) -> Result<bool> {
    if v.len() != m.cols {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            found: v.len(),
        });
    }
    let mut basis = EchelonBasis::new();
    for row in &m.data {
        basis.insert(row.clone());
    }
    Ok(basis.contains(v))
}
