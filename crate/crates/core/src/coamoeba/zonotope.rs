use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::{combinations, serialize_bigint_slice, IntMatrix};

/// Facet pair `|normal · (p − center)| < offset` of a centrally symmetric
/// polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facet {
    #[serde(serialize_with = "serialize_bigint_slice")]
    pub normal: Vec<BigInt>,
    #[serde(serialize_with = "super::serialize_rational")]
    pub offset: BigRational,
}

/// Open zonotope `center + Σ λⱼ gⱼ`, `λⱼ ∈ (−½, ½)`, with its exact
/// H-representation. Coordinates are in turns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Zonotope {
    #[serde(serialize_with = "super::serialize_rational_slice")]
    pub center: Vec<BigRational>,
    #[serde(serialize_with = "super::serialize_rational_rows")]
    pub generators: Vec<Vec<BigRational>>,
    pub facets: Vec<Facet>,
}

/// Scales a rational vector to a primitive integer vector with the same
/// direction.
fn primitive_direction(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Integer normal to the hyperplane spanned by `n − 1` integer vectors, via
/// signed maximal minors. Zero when the vectors are dependent.
fn normal_of(rows: &[Vec<BigInt>], n: usize) -> Result<Vec<BigInt>> {
    if n == 1 {
        return Ok(vec![BigInt::one()]);
    }
    let mut normal = Vec::with_capacity(n);
    for skip in 0..n {
        let minor: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let det = IntMatrix::from_rows(&minor)?.determinant()?;
        normal.push(if skip % 2 == 0 { det } else { -det });
    }
    Ok(normal)
}

fn dot_int(a: &[BigInt], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| y * x)
        .fold(BigRational::zero(), |acc, t| acc + t)
}

impl Zonotope {
    /// Builds the zonotope and enumerates its facet normals from the
    /// `(n−1)`-subsets of generators. The generators must span `ℝⁿ`.
    pub fn new(center: Vec<BigRational>, generators: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.len(),
            });
        }
        let directions: Vec<Vec<BigInt>> = generators.iter().map(|g| primitive_direction(g)).collect();
        let mut normals: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for subset in combinations(generators.len(), n - 1) {
            let rows: Vec<Vec<BigInt>> = subset.iter().map(|&j| directions[j].clone()).collect();
            if rows.iter().any(|r| r.iter().all(Zero::is_zero)) {
                continue;
            }
            let normal = normal_of(&rows, n)?;
            if normal.iter().all(Zero::is_zero) {
                continue;
            }
            let g = normal.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            let mut normal: Vec<BigInt> = normal.into_iter().map(|x| x / &g).collect();
            if normal.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
                normal.iter_mut().for_each(|x| *x = -std::mem::take(x));
            }
            normals.insert(normal);
        }
        let half = BigRational::new(1.into(), 2.into());
        let facets: Vec<Facet> = normals
            .into_iter()
            .map(|normal| {
                let width = generators
                    .iter()
                    .map(|g| dot_int(&normal, g).abs())
                    .fold(BigRational::zero(), |acc, t| acc + t);
                Facet {
                    offset: width * &half,
                    normal,
                }
            })
            .collect();
        if facets.is_empty() || facets.iter().any(|f| f.offset.is_zero()) {
            return Err(Error::InvalidInput("zonotope generators do not span".into()));
        }
        Ok(Zonotope {
            center,
            generators,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Same shape, different center.
    pub fn translated(&self, center: Vec<BigRational>) -> Zonotope {
        Zonotope {
            center,
            generators: self.generators.clone(),
            facets: self.facets.clone(),
        }
    }

    /// Whether `p` lies in the open zonotope (strict facet inequalities).
    pub fn contains_strict(&self, p: &[BigRational]) -> bool {
        let rel: Vec<BigRational> = p.iter().zip(&self.center).map(|(x, c)| x - c).collect();
        self.facets
            .iter()
            .all(|f| dot_int(&f.normal, &rel).abs() < f.offset)
    }

    /// Total width of the projection on `axis`: `Σⱼ |gⱼ[axis]|`.
    pub fn extent(&self, axis: usize) -> BigRational {
        self.generators
            .iter()
            .map(|g| g[axis].abs())
            .fold(BigRational::zero(), |acc, t| acc + t)
    }

    /// Vertices of a planar zonotope in counterclockwise order: generators
    /// are oriented into the upper half-plane, sorted by angle, then walked
    /// forwards and backwards from the lowest vertex.
    pub fn zonogon_vertices(&self) -> Result<Vec<[BigRational; 2]>> {
        if self.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                n: self.dim(),
                supported: "2",
            });
        }
        let mut gens: Vec<[BigRational; 2]> = self
            .generators
            .iter()
            .filter(|g| !(g[0].is_zero() && g[1].is_zero()))
            .map(|g| {
                let upper = g[1].is_positive() || (g[1].is_zero() && g[0].is_positive());
                if upper {
                    [g[0].clone(), g[1].clone()]
                } else {
                    [-g[0].clone(), -g[1].clone()]
                }
            })
            .collect();
        // angle order in [0, π): a before b iff cross(a, b) > 0
        gens.sort_by(|a, b| {
            let cross = &a[0] * &b[1] - &a[1] * &b[0];
            if cross.is_positive() {
                std::cmp::Ordering::Less
            } else if cross.is_negative() {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });
        let half = BigRational::new(1.into(), 2.into());
        let mut cur = [self.center[0].clone(), self.center[1].clone()];
        for g in &gens {
            cur[0] -= &g[0] * &half;
            cur[1] -= &g[1] * &half;
        }
        let mut out = Vec::with_capacity(2 * gens.len());
        for g in gens.iter().chain(gens.iter()).enumerate() {
            out.push(cur.clone());
            let (idx, g) = g;
            if idx < gens.len() {
                cur[0] += &g[0];
                cur[1] += &g[1];
            } else {
                cur[0] -= &g[0];
                cur[1] -= &g[1];
            }
        }
        Ok(out)
    }
}

/// Area of a simple polygon (shoelace formula).
pub fn polygon_area(vertices: &[[BigRational; 2]]) -> BigRational {
    let k = vertices.len();
    let twice = (0..k)
        .map(|i| {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % k]);
            &a[0] * &b[1] - &a[1] * &b[0]
        })
        .fold(BigRational::zero(), |acc, t| acc + t);
    (twice / BigRational::from_integer(2.into())).abs()
}

/// Zonotope of forbidden configurations of the linear form with all signs
/// positive: center 0, generators `½e₁, …, ½eₙ` and `−½(1, …, 1)`.
///
/// Equals `⋃_{φ∈(−½,0)} (φ, φ+½)ⁿ`: tuples that fit with 0 in an open
/// half-circle.
pub fn standard_zonotope(n: usize) -> Result<Zonotope> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut generators: Vec<Vec<BigRational>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| if i == k { half.clone() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    generators.push(vec![-half.clone(); n]);
    Zonotope::new(vec![BigRational::zero(); n], generators)
}
