//! Polynomial input and its normalized topological data.
//!
//! A simplicial polynomial is reduced to an exponent matrix `A` (rows are the
//! nonzero simplex vertices after translating one vertex to the origin) and a
//! sign vector `ε` (signs of the remaining coefficients once the constant
//! term is made positive). Coefficient magnitudes are validated and then
//! ignored: none of the topology depends on them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmath::{IntMatrix, SmithDecomposition, Z2Vector};

/// One monomial `coefficient · z^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: Vec<i64>,
    #[serde(
        serialize_with = "serialize_rational",
        deserialize_with = "deserialize_rational"
    )]
    pub coefficient: BigRational,
}

impl Term {
    pub fn new(exponent: Vec<i64>, coefficient: impl Into<BigInt>) -> Self {
        Term {
            exponent,
            coefficient: BigRational::from_integer(coefficient.into()),
        }
    }
}

/// A Laurent polynomial in `n` variables given by its `n + 1` terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub n: usize,
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

impl PolynomialSpec {
    pub fn new(n: usize, terms: Vec<Term>) -> Self {
        PolynomialSpec { n, terms, id: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// Checks term count, exponent lengths, nonzero coefficients and
    /// distinct exponents. Affine independence is checked by [`normalize`].
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.terms.len() != self.n + 1 {
            return Err(Error::WrongTermCount {
                expected: self.n + 1,
                found: self.terms.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for t in &self.terms {
            if t.exponent.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: t.exponent.len(),
                });
            }
            if t.coefficient.is_zero() {
                return Err(Error::ZeroCoefficient(t.coefficient.to_string()));
            }
            if !seen.insert(t.exponent.clone()) {
                return Err(Error::DuplicateExponent(t.exponent.clone()));
            }
        }
        Ok(())
    }
}

fn serialize_rational<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    if t.contains('/') {
        let q = BigRational::from_str(t).map_err(|_| bad())?;
        return Ok(q);
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(num, scale));
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

fn deserialize_rational<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    struct RationalVisitor;

    impl Visitor<'_> for RationalVisitor {
        type Value = BigRational;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a rational number as a string (\"-3/4\") or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BigRational, E> {
            parse_rational(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BigRational, E> {
            Ok(BigRational::from_integer(v.into()))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BigRational, E> {
            Ok(BigRational::from_integer(v.into()))
        }
    }

    d.deserialize_any(RationalVisitor)
}

/// Sign of a monomial coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(q: &BigRational) -> Sign {
        if q.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

/// Canonical data `(A, ε)` of a simplicial polynomial: one vertex moved to
/// the origin with constant coefficient `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedModel {
    pub n: usize,
    /// Row `i` is the `i`-th nonzero simplex vertex; rows are sorted in
    /// decreasing lexicographic order.
    pub a: IntMatrix,
    pub epsilon: Vec<Sign>,
    /// Index into the input terms of the vertex moved to the origin.
    pub origin_index: usize,
    pub globally_negated: bool,
    /// Input term index that produced each row of `a`.
    pub row_terms: Vec<usize>,
}

/// Normalizes with the lexicographically smallest exponent as origin.
pub fn normalize(spec: &PolynomialSpec) -> Result<NormalizedModel> {
    spec.validate()?;
    let origin = (0..spec.terms.len())
        .min_by(|&i, &j| spec.terms[i].exponent.cmp(&spec.terms[j].exponent))
        .expect("validated spec has terms");
    normalize_with_origin(spec, origin)
}

/// Normalizes with the given term moved to the origin.
pub fn normalize_with_origin(spec: &PolynomialSpec, origin: usize) -> Result<NormalizedModel> {
    spec.validate()?;
    if origin >= spec.terms.len() {
        return Err(Error::InvalidInput(format!(
            "origin term {origin} out of range 0..{}",
            spec.terms.len()
        )));
    }
    let base = &spec.terms[origin];
    let globally_negated = base.coefficient.is_negative();

    let mut rows: Vec<(Vec<i64>, Sign, usize)> = Vec::with_capacity(spec.n);
    for (idx, t) in spec.terms.iter().enumerate() {
        if idx == origin {
            continue;
        }
        let shifted = t
            .exponent
            .iter()
            .zip(&base.exponent)
            .map(|(a, b)| {
                a.checked_sub(*b)
                    .ok_or_else(|| Error::TooLarge("exponent difference overflows i64".into()))
            })
            .collect::<Result<Vec<i64>>>()?;
        let mut sign = Sign::of(&t.coefficient);
        if globally_negated {
            sign = sign.flip();
        }
        rows.push((shifted, sign, idx));
    }
    // descending, so that the standard simplex gives A = I
    rows.sort_by(|x, y| y.0.cmp(&x.0));

    let a = IntMatrix::from_rows(&rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>())?;
    if a.determinant()?.is_zero() {
        return Err(Error::DegenerateSimplex);
    }
    Ok(NormalizedModel {
        n: spec.n,
        a,
        epsilon: rows.iter().map(|r| r.1).collect(),
        origin_index: origin,
        globally_negated,
        row_terms: rows.iter().map(|r| r.2).collect(),
    })
}

impl NormalizedModel {
    /// Builds a model directly from `A` and `ε` (constant term `+1`).
    pub fn from_parts(a: IntMatrix, epsilon: Vec<Sign>) -> Result<Self> {
        if !a.is_square() || epsilon.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: epsilon.len(),
            });
        }
        let rows = a
            .to_i64_rows()
            .ok_or_else(|| Error::TooLarge("exponent exceeds i64".into()))?;
        let terms = std::iter::once(Term::new(vec![0; a.cols()], 1))
            .chain(rows.into_iter().zip(&epsilon).map(|(e, s)| Term::new(e, s.as_i8())))
            .collect();
        normalize(&PolynomialSpec::new(a.rows(), terms))
    }

    /// Re-serializes as a polynomial with coefficients `±1` and constant `+1`.
    pub fn to_spec(&self) -> PolynomialSpec {
        let rows = self.a.to_i64_rows().expect("exponents originate from i64 input");
        let terms = std::iter::once(Term::new(vec![0; self.n], 1))
            .chain(
                rows.into_iter()
                    .zip(&self.epsilon)
                    .map(|(e, s)| Term::new(e, s.as_i8())),
            )
            .collect();
        PolynomialSpec::new(self.n, terms)
    }

    pub fn delta(&self) -> Z2Vector {
        delta(&self.epsilon)
    }

    /// `rank₂(A)`: rank of `A` reduced modulo 2.
    pub fn rank2(&self) -> usize {
        crate::exactmath::z2_rank(&self.a.to_z2())
    }
}

/// `δ(ε)`: bit `i` is set iff `εᵢ = −1`.
pub fn delta(epsilon: &[Sign]) -> Z2Vector {
    Z2Vector::from_bits(&epsilon.iter().map(|&s| s == Sign::Minus).collect::<Vec<_>>())
}

/// `δ^G = G · δ` over ℤ₂.
pub fn delta_g(g: &IntMatrix, delta: &Z2Vector) -> Result<Z2Vector> {
    g.to_z2().mul_vec(delta)
}

/// Parity class of an axis: (`δ^G_i` mod 2, `dᵢ` mod 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum IndexClass {
    /// δ^G_i = 0, dᵢ even
    I00,
    /// δ^G_i = 1, dᵢ even
    I10,
    /// δ^G_i = 0, dᵢ odd
    I01,
    /// δ^G_i = 1, dᵢ odd
    I11,
}

impl IndexClass {
    pub fn from_parities(delta_odd: bool, d_odd: bool) -> Self {
        match (delta_odd, d_odd) {
            (false, false) => IndexClass::I00,
            (true, false) => IndexClass::I10,
            (false, true) => IndexClass::I01,
            (true, true) => IndexClass::I11,
        }
    }

    pub fn delta_odd(self) -> bool {
        matches!(self, IndexClass::I10 | IndexClass::I11)
    }

    pub fn d_odd(self) -> bool {
        matches!(self, IndexClass::I01 | IndexClass::I11)
    }
}

/// Partition of the axes `0..n` (zero-based) by parity class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexPartition {
    pub i00: Vec<usize>,
    pub i10: Vec<usize>,
    pub i01: Vec<usize>,
    pub i11: Vec<usize>,
    #[serde(skip)]
    classes: Vec<IndexClass>,
}

impl IndexPartition {
    pub fn class(&self, axis: usize) -> IndexClass {
        self.classes[axis]
    }

    pub fn classes(&self) -> &[IndexClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Classifies each axis by the parities of `δ^G_i` and `dᵢ`.
pub fn partition(d: &[BigInt], delta_g: &Z2Vector) -> Result<IndexPartition> {
    if d.len() != delta_g.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: delta_g.len(),
        });
    }
    let classes: Vec<IndexClass> = d
        .iter()
        .enumerate()
        .map(|(i, di)| IndexClass::from_parities(delta_g.get(i), di.is_odd()))
        .collect();
    let pick = |c: IndexClass| -> Vec<usize> {
        classes
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == c)
            .map(|(i, _)| i)
            .collect()
    };
    Ok(IndexPartition {
        i00: pick(IndexClass::I00),
        i10: pick(IndexClass::I10),
        i01: pick(IndexClass::I01),
        i11: pick(IndexClass::I11),
        classes,
    })
}

/// Partition for a model and its Smith decomposition.
pub fn model_partition(model: &NormalizedModel, snf: &SmithDecomposition) -> Result<IndexPartition> {
    let dg = delta_g(&snf.g, &model.delta())?;
    partition(&snf.d, &dg)
}
