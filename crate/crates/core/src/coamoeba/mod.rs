//! Exact geometry of the coamoeba in the argument torus.
//!
//! All angles are rationals in turns. A point `θ` of `Tⁿ` lies in the
//! coamoeba of the linear form `Σ εᵢ zᵢ + 1` iff, after shifting each
//! coordinate by `δᵢ/2`, no open half-circle contains every coordinate
//! together with 0. For a general exponent matrix the coamoeba is the
//! preimage under `θ ↦ A·θ`. With Smith form `G·A·H = D`, the same set in
//! the coordinates `ψ = H⁻¹θ` is the complement of `d₁⋯dₙ` translates of a
//! single open zonotope, indexed by `Ω = ∏ {0, …, dᵢ−1}`.
//!
//! [`membership`] and [`membership_by_zonotope`] decide the same predicate
//! from these two descriptions and never share code beyond rational
//! arithmetic.

mod zonotope;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmath::{IntMatrix, SmithDecomposition, Z2Vector};
use crate::model::{delta_g, NormalizedModel};

pub use zonotope::{polygon_area, standard_zonotope, Facet, Zonotope};

/// Largest index set the enumerating operations will walk.
pub const MAX_ENUMERATED_OMEGA: u64 = 1 << 22;

pub(crate) fn serialize_rational<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

struct RationalJson<'a>(&'a BigRational);

impl Serialize for RationalJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rational(self.0, s)
    }
}

pub(crate) fn serialize_rational_slice<S: Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for q in v {
        seq.serialize_element(&RationalJson(q))?;
    }
    seq.end()
}

struct RationalRow<'a>(&'a [BigRational]);

impl Serialize for RationalRow<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rational_slice(self.0, s)
    }
}

pub(crate) fn serialize_rational_rows<S: Serializer>(
    v: &[Vec<BigRational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        seq.serialize_element(&RationalRow(row))?;
    }
    seq.end()
}

fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// An angle in turns, reduced to `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Turn(BigRational);

impl Turn {
    pub fn new(value: BigRational) -> Self {
        Turn(frac(&value))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Turn::new(ratio(num, den))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn neg(&self) -> Turn {
        Turn::new(-self.0.clone())
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Vector of turns from `(numerator, denominator)` pairs.
pub fn turns(pairs: &[(i64, i64)]) -> Vec<Turn> {
    pairs.iter().map(|&(a, b)| Turn::from_ratio(a, b)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    Coamoeba,
    Complement,
}

/// Largest gap between cyclically consecutive points of `{0} ∪ points`
/// on the circle of circumference 1.
pub fn max_cyclic_gap(points: &[BigRational]) -> BigRational {
    let mut pts: Vec<BigRational> = points.iter().map(frac).collect();
    pts.push(BigRational::zero());
    pts.sort();
    pts.dedup();
    let mut best = &pts[0] + BigRational::one() - &pts[pts.len() - 1];
    for w in pts.windows(2) {
        let gap = &w[1] - &w[0];
        if gap > best {
            best = gap;
        }
    }
    best
}

/// Whether `φ` is an allowed configuration: no open half-circle contains
/// every `φᵢ` together with 0.
pub fn is_allowed_configuration(phi: &[BigRational]) -> bool {
    max_cyclic_gap(phi) <= ratio(1, 2)
}

/// Coamoeba membership in the polynomial's own coordinates: evaluates
/// `φ = A·θ − δ/2` and tests for an allowed configuration.
pub fn membership_original(model: &NormalizedModel, theta: &[Turn]) -> Result<Membership> {
    if theta.len() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            found: theta.len(),
        });
    }
    let delta = model.delta();
    let half = ratio(1, 2);
    let phi: Vec<BigRational> = (0..model.n)
        .map(|i| {
            let dot = model
                .a
                .row(i)
                .iter()
                .zip(theta)
                .map(|(a, t)| t.value() * a)
                .fold(BigRational::zero(), |acc, x| acc + x);
            if delta.get(i) {
                dot - &half
            } else {
                dot
            }
        })
        .collect();
    Ok(if is_allowed_configuration(&phi) {
        Membership::Coamoeba
    } else {
        Membership::Complement
    })
}

/// Maps arrangement coordinates `ψ` to the polynomial's coordinates `H·ψ`.
pub fn to_original_coordinates(snf: &SmithDecomposition, psi: &[Turn]) -> Result<Vec<Turn>> {
    let n = snf.h.rows();
    if psi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi.len(),
        });
    }
    Ok((0..n)
        .map(|i| {
            Turn::new(
                snf.h
                    .row(i)
                    .iter()
                    .zip(psi)
                    .map(|(h, t)| t.value() * h)
                    .fold(BigRational::zero(), |acc, x| acc + x),
            )
        })
        .collect())
}

/// Half-circle membership for a point given in arrangement coordinates
/// (the torus on which [`ZonotopeArrangement`] lives).
pub fn membership(model: &NormalizedModel, snf: &SmithDecomposition, theta: &[Turn]) -> Result<Membership> {
    membership_original(model, &to_original_coordinates(snf, theta)?)
}

/// The `d₁⋯dₙ` open zonotopes whose complement is the coamoeba, in
/// arrangement coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZonotopeArrangement {
    pub n: usize,
    pub d: Vec<u64>,
    pub g: IntMatrix,
    /// `G·δ` mod 2, i.e. the lift `δ̃^G ∈ {0,1}ⁿ`.
    pub delta_g: Z2Vector,
    /// Shape shared by every zonotope, centered at the origin.
    pub shape: Zonotope,
    /// Width of the shape's projection on each axis.
    #[serde(serialize_with = "serialize_rational_slice")]
    pub extents: Vec<BigRational>,
}

/// Builds the arrangement from `G` and `D`; `H` is not needed.
pub fn arrangement(model: &NormalizedModel, snf: &SmithDecomposition) -> Result<ZonotopeArrangement> {
    let n = model.n;
    if snf.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: snf.dim(),
        });
    }
    let d: Vec<u64> = snf
        .d
        .iter()
        .map(|x| {
            x.to_u64()
                .ok_or_else(|| Error::TooLarge(format!("invariant factor {x}")))
        })
        .collect::<Result<_>>()?;
    let dg = delta_g(&snf.g, &model.delta())?;
    let g = &snf.g;

    // image of ½eₖ and −½𝟙 under D⁻¹·G
    let mut generators: Vec<Vec<BigRational>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| BigRational::new(g.get(i, k).clone(), BigInt::from(2 * d[i])))
                .collect()
        })
        .collect();
    generators.push(
        (0..n)
            .map(|i| {
                let row_sum: BigInt = g.row(i).iter().sum();
                BigRational::new(-row_sum, BigInt::from(2 * d[i]))
            })
            .collect(),
    );
    let shape = Zonotope::new(vec![BigRational::zero(); n], generators)?;
    let extents = (0..n)
        .map(|i| {
            let abs_sum: BigInt = g.row(i).iter().map(Signed::abs).sum();
            let row_sum: BigInt = g.row(i).iter().sum();
            BigRational::new(abs_sum + row_sum.abs(), BigInt::from(2 * d[i]))
        })
        .collect();
    Ok(ZonotopeArrangement {
        n,
        d,
        g: g.clone(),
        delta_g: dg,
        shape,
        extents,
    })
}

impl ZonotopeArrangement {
    /// `|Ω| = d₁⋯dₙ`.
    pub fn omega_size(&self) -> u64 {
        self.d.iter().product()
    }

    fn enumerable_size(&self) -> Result<usize> {
        let size = self
            .d
            .iter()
            .try_fold(1u64, |acc, &x| acc.checked_mul(x))
            .filter(|&s| s <= MAX_ENUMERATED_OMEGA)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "index set of size {:?} exceeds {MAX_ENUMERATED_OMEGA}",
                    self.d
                ))
            })?;
        Ok(size as usize)
    }

    fn check_index(&self, alpha: &[u64]) -> Result<()> {
        if alpha.len() != self.n || alpha.iter().zip(&self.d).any(|(a, d)| a >= d) {
            return Err(Error::IndexOutOfRange {
                index: alpha.to_vec(),
                moduli: self.d.clone(),
            });
        }
        Ok(())
    }

    /// Mixed-radix position of `alpha`, axis 0 most significant.
    pub fn flat_index(&self, alpha: &[u64]) -> Result<usize> {
        self.check_index(alpha)?;
        Ok(alpha
            .iter()
            .zip(&self.d)
            .fold(0u64, |acc, (a, d)| acc * d + a) as usize)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<u64> {
        let mut alpha = vec![0; self.n];
        for i in (0..self.n).rev() {
            alpha[i] = flat as u64 % self.d[i];
            flat /= self.d[i] as usize;
        }
        alpha
    }

    /// All indices of `Ω` in flat order.
    pub fn indices(&self) -> Result<impl Iterator<Item = Vec<u64>> + '_> {
        let size = self.enumerable_size()?;
        Ok((0..size).map(|f| self.unflatten(f)))
    }

    /// Center coordinate on `axis` for index value `a`:
    /// `δ̃^G_i / (2dᵢ) + a / dᵢ`, in `[0, 1)`.
    pub fn center_coordinate(&self, axis: usize, a: u64) -> BigRational {
        let shift = u64::from(self.delta_g.get(axis));
        BigRational::new(BigInt::from(shift + 2 * a), BigInt::from(2 * self.d[axis]))
    }

    pub fn center(&self, alpha: &[u64]) -> Result<Vec<BigRational>> {
        self.check_index(alpha)?;
        Ok(alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| self.center_coordinate(i, a))
            .collect())
    }

    pub fn zonotope(&self, alpha: &[u64]) -> Result<Zonotope> {
        Ok(self.shape.translated(self.center(alpha)?))
    }

    /// Finds the zonotope lift containing the point `p ∈ ℝⁿ` (not reduced
    /// modulo 1): returns the flat index `α` and the integer translation `k`
    /// with `p − k` strictly inside `Z_α`.
    ///
    /// Candidates are enumerated per axis: on axis `i` the centers of all
    /// lifts are `(δ̃ᵢ + 2s)/(2dᵢ)` for `s ∈ ℤ`, with `α_i = s mod dᵢ` and
    /// `kᵢ = s div dᵢ`, and only `s` whose projected interval contains `pᵢ`
    /// can qualify.
    pub fn locate(&self, p: &[BigRational]) -> Result<Option<(usize, Vec<BigInt>)>> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        let two = BigRational::from_integer(2.into());
        let mut ranges: Vec<Vec<BigInt>> = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let d = BigRational::from_integer(self.d[i].into());
            let shift = BigRational::from_integer(u64::from(self.delta_g.get(i)).into());
            // |p − (shift + 2s)/(2d)| < L/2  ⇔  s ∈ ((2dp − shift − dL)/2, (2dp − shift + dL)/2)
            let mid = (&two * &d * &p[i] - &shift) / &two;
            let half_width = &d * &self.extents[i] / &two;
            let lo = (&mid - &half_width).floor().to_integer() + BigInt::one();
            let hi = (&mid + &half_width).ceil().to_integer() - BigInt::one();
            let mut s = lo;
            let mut axis = Vec::new();
            while s <= hi {
                axis.push(s.clone());
                s += 1;
            }
            if axis.is_empty() {
                return Ok(None);
            }
            ranges.push(axis);
        }
        let mut pick = vec![0usize; self.n];
        loop {
            let mut alpha = Vec::with_capacity(self.n);
            let mut lift = Vec::with_capacity(self.n);
            for i in 0..self.n {
                let (k, a) = ranges[i][pick[i]].div_mod_floor(&BigInt::from(self.d[i]));
                alpha.push(a.to_u64().expect("reduced modulo d"));
                lift.push(k);
            }
            let q: Vec<BigRational> = p
                .iter()
                .zip(&lift)
                .map(|(x, k)| x - BigRational::from_integer(k.clone()))
                .collect();
            if self.zonotope(&alpha)?.contains_strict(&q) {
                return Ok(Some((self.flat_index(&alpha)?, lift)));
            }
            // odometer
            let mut axis = self.n;
            loop {
                if axis == 0 {
                    return Ok(None);
                }
                axis -= 1;
                pick[axis] += 1;
                if pick[axis] < ranges[axis].len() {
                    break;
                }
                pick[axis] = 0;
            }
        }
    }

    /// Conjugate index `c(α)`: the zonotope centered at `−center(α)`.
    pub fn conjugate_index(&self, alpha: &[u64]) -> Result<Vec<u64>> {
        self.check_index(alpha)?;
        Ok(alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let d = self.d[i];
                if self.delta_g.get(i) {
                    (d - 1) - a
                } else {
                    (d - a) % d
                }
            })
            .collect())
    }

    /// Number of integers strictly inside the projection of the lift of
    /// `Z_α` centered at `center_i(α)` on `axis`, i.e. the number of pieces
    /// of `{θᵢ = 0} ∩ Z_α`. Depends only on `α_axis`.
    pub fn slice_count_axis(&self, axis: usize, a: u64) -> u64 {
        let c = self.center_coordinate(axis, a);
        let half = &self.extents[axis] / BigRational::from_integer(2.into());
        let lo: BigInt = (&c - &half).floor().to_integer() + BigInt::one();
        let hi: BigInt = (&c + &half).ceil().to_integer() - BigInt::one();
        if hi < lo {
            0
        } else {
            (hi - lo + BigInt::one()).to_u64().expect("slice count fits u64")
        }
    }
}

/// Zonotope-arrangement membership of a point in arrangement coordinates.
pub fn membership_by_zonotope(arr: &ZonotopeArrangement, theta: &[Turn]) -> Result<Membership> {
    let p: Vec<BigRational> = theta.iter().map(|t| t.value().clone()).collect();
    Ok(match arr.locate(&p)? {
        Some(_) => Membership::Complement,
        None => Membership::Coamoeba,
    })
}

pub fn conjugate_index(arr: &ZonotopeArrangement, alpha: &[u64]) -> Result<Vec<u64>> {
    arr.conjugate_index(alpha)
}

/// The involution `c` on `Ω` (flat indices) and its fixed set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugationAction {
    pub mapping: Vec<usize>,
    pub fixed: Vec<usize>,
}

impl ConjugationAction {
    pub fn is_involution(&self) -> bool {
        self.mapping
            .iter()
            .enumerate()
            .all(|(a, &b)| self.mapping.get(b) == Some(&a))
    }
}

pub fn conjugation_action(arr: &ZonotopeArrangement) -> Result<ConjugationAction> {
    let mut mapping = Vec::with_capacity(arr.enumerable_size()?);
    for alpha in arr.indices()? {
        mapping.push(arr.flat_index(&arr.conjugate_index(&alpha)?)?);
    }
    let fixed = mapping
        .iter()
        .enumerate()
        .filter(|(a, &b)| *a == b)
        .map(|(a, _)| a)
        .collect();
    Ok(ConjugationAction { mapping, fixed })
}

/// Fixed points of `c`, enumerated.
pub fn fixed_indices(arr: &ZonotopeArrangement) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for alpha in arr.indices()? {
        if arr.conjugate_index(&alpha)? == alpha {
            out.push(alpha);
        }
    }
    Ok(out)
}

/// `Nᵢ(α)`.
pub fn slice_count(arr: &ZonotopeArrangement, axis: usize, alpha: &[u64]) -> Result<u64> {
    arr.check_index(alpha)?;
    if axis >= arr.n {
        return Err(Error::DimensionMismatch {
            expected: arr.n,
            found: axis,
        });
    }
    Ok(arr.slice_count_axis(axis, alpha[axis]))
}

/// `Jᵢ = {α : Nᵢ(α) odd}` as flat indices.
pub fn parity_set(arr: &ZonotopeArrangement, axis: usize) -> Result<Vec<usize>> {
    if axis >= arr.n {
        return Err(Error::DimensionMismatch {
            expected: arr.n,
            found: axis,
        });
    }
    let odd: Vec<bool> = (0..arr.d[axis])
        .map(|a| arr.slice_count_axis(axis, a).is_odd())
        .collect();
    Ok(arr
        .indices()?
        .enumerate()
        .filter(|(_, alpha)| odd[alpha[axis] as usize])
        .map(|(f, _)| f)
        .collect())
}

/// Whether `u + v ≡ 0` coordinatewise modulo 1.
pub fn is_antipodal(u: &[BigRational], v: &[BigRational]) -> bool {
    u.len() == v.len() && u.iter().zip(v).all(|(a, b)| (a + b).is_integer())
}
