//! Brute-force grid model of the coamoeba in `Tⁿ` (`n ≤ 3`).
//!
//! The torus is cut into `m₁ × ⋯ × mₙ` boxes; a box is dropped when all its
//! vertices lie strictly inside the same lift of one open zonotope, and the
//! rest is closed under faces. ℤ₂ Betti numbers and the rank of `1 + c` on
//! `H_{n−1}` (with `c` the cellular negation map) are then computed by sparse
//! column reduction and compared with the closed forms.
//!
//! This is a verification-grade oracle: at coarse resolutions the kept set
//! can have the wrong homotopy type, so [`verify`] repeats the computation at
//! twice the resolution and reports whether anything changed.

mod complex;

use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use complex::{Column, CubicalComplex, CubicalHomology};

use crate::coamoeba::{
    arrangement, conjugation_action, membership, membership_by_zonotope, parity_set, Turn,
    ZonotopeArrangement,
};
use crate::error::{Error, Result};
use crate::exactmath::{column_norms_ceil, snf};
use crate::homology::{betti_coamoeba, cstar_presentation, rank_assembled, rank_closed};
use crate::model::{model_partition, NormalizedModel};

/// Builds the kept complex for an arrangement at resolution `m`.
pub fn build_complex(arr: &ZonotopeArrangement, m: &[usize]) -> Result<CubicalComplex> {
    CubicalComplex::build(arr, m)
}

/// Exact ℤ₂ Betti numbers `(b₀, …, bₙ)` of the kept complex.
pub fn betti_z2(complex: &CubicalComplex) -> Result<Vec<u64>> {
    Ok(complex.homology()?.betti)
}

/// `dim((f(Z) + B)/B)` for `f = 1 + c#` on `(n−1)`-chains.
pub fn conjugation_rank(complex: &CubicalComplex) -> Result<u64> {
    Ok(complex.homology()?.conjugation_rank)
}

/// Grid cells per unit length of the reduced lattice basis, by dimension.
fn cells_per_unit(n: usize) -> usize {
    if n >= 3 {
        12
    } else {
        16
    }
}

/// Default grid for [`build_complex`]: on axis `i`, `K · ⌈|bᵢ|⌉` where `bᵢ`
/// is the `i`-th reduced lattice vector of [`CubicalComplex::grid_basis`]
/// and `K` is 16 (12 for `n = 3`). Every zonotope then spans several cells
/// in every direction.
pub fn default_resolution(arr: &ZonotopeArrangement) -> Result<Vec<usize>> {
    let basis = CubicalComplex::grid_basis(arr)?;
    let k = cells_per_unit(arr.n);
    column_norms_ceil(&basis.reduced)
        .iter()
        .map(|x| {
            x.to_usize()
                .and_then(|x| x.checked_mul(k))
                .ok_or_else(|| Error::TooLarge(format!("lattice vector of length {x}")))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Grid resolution; [`default_resolution`] when `None`.
    pub resolution: Option<Vec<usize>>,
    /// Skip the grid model; only the algebraic oracles run.
    pub skip_cubical: bool,
    /// Also run the grid model at `2m`.
    pub check_doubled: bool,
    /// Random points for the membership comparison.
    pub membership_samples: usize,
    pub seed: u64,
    /// Record wall-clock timings (makes the record non-deterministic).
    pub record_timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            resolution: None,
            skip_cubical: false,
            check_doubled: true,
            membership_samples: 1000,
            seed: 0x5eed,
            record_timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubicalRun {
    pub resolution: Vec<usize>,
    pub cell_counts: Vec<usize>,
    pub betti: Vec<u64>,
    pub conjugation_rank: u64,
    pub boundary_squared_zero: bool,
    pub euler_consistent: bool,
    /// Top cells put back because they were detached from their region.
    pub restored_cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub algebraic_ms: f64,
    pub membership_ms: f64,
    pub cubical_ms: Option<f64>,
    pub doubled_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipCheck {
    pub samples: usize,
    pub disagreements: usize,
    pub coamoeba_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub instance_id: Option<String>,
    pub n: usize,
    pub d: Vec<u64>,
    pub closed_betti: Vec<u64>,
    pub rank_closed: u64,
    pub rank_assembled: u64,
    pub membership: MembershipCheck,
    pub cubical: Option<CubicalRun>,
    pub doubled: Option<CubicalRun>,
    pub betti_agree: Option<bool>,
    pub rank_agree: Option<bool>,
    pub resolution_stable: Option<bool>,
    pub all_agree: bool,
    /// Human-readable list of disagreeing quantities.
    pub disagreements: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn run_grid(arr: &ZonotopeArrangement, m: &[usize]) -> Result<CubicalRun> {
    let complex = build_complex(arr, m)?;
    complex.check_negation_symmetry()?;
    let h = complex.homology()?;
    let alternating: i64 = h
        .betti
        .iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    Ok(CubicalRun {
        resolution: m.to_vec(),
        cell_counts: complex.cell_counts(),
        betti: h.betti,
        conjugation_rank: h.conjugation_rank,
        boundary_squared_zero: complex.boundary_squared_is_zero(),
        euler_consistent: alternating == complex.euler_characteristic(),
        restored_cells: complex.restored_cells(),
    })
}

fn random_turn(rng: &mut ChaCha8Rng) -> Turn {
    let den: i64 = rng.gen_range(1..=97);
    let num: i64 = rng.gen_range(0..den);
    Turn::new(BigRational::new(num.into(), den.into()))
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

/// Runs every oracle on one model and compares against the closed forms.
pub fn verify(model: &NormalizedModel, id: Option<String>, opts: &VerifyOptions) -> Result<VerificationRecord> {
    let n = model.n;
    if !opts.skip_cubical && n > 3 {
        return Err(Error::UnsupportedDimension { n, supported: "1..=3 (use skip-cubical)" });
    }
    let t0 = Instant::now();
    let dec = snf(&model.a)?;
    let partition = model_partition(model, &dec)?;
    let arr = arrangement(model, &dec)?;
    let action = conjugation_action(&arr)?;
    let parity_sets = (0..n).map(|i| parity_set(&arr, i)).collect::<Result<Vec<_>>>()?;
    let pres = cstar_presentation(&arr, &action, &parity_sets)?;
    let r_closed = rank_closed(&partition, &dec.d)?;
    let r_assembled = rank_assembled(&pres);
    let closed = betti_coamoeba(model, &dec)?;
    let algebraic_ms = elapsed_ms(t0);

    let mut disagreements = Vec::new();
    if r_closed != r_assembled {
        disagreements.push(format!("rank_closed {r_closed} != rank_assembled {r_assembled}"));
    }

    let t1 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut membership_check = MembershipCheck {
        samples: opts.membership_samples,
        disagreements: 0,
        coamoeba_hits: 0,
    };
    for _ in 0..opts.membership_samples {
        let psi: Vec<Turn> = (0..n).map(|_| random_turn(&mut rng)).collect();
        let direct = membership(model, &dec, &psi)?;
        let via_zonotopes = membership_by_zonotope(&arr, &psi)?;
        if direct != via_zonotopes {
            if membership_check.disagreements == 0 {
                let shown: Vec<String> = psi.iter().map(|t| t.value().to_string()).collect();
                disagreements.push(format!(
                    "membership at ({}): half-circle {direct:?}, zonotopes {via_zonotopes:?}",
                    shown.join(", ")
                ));
            }
            membership_check.disagreements += 1;
        }
        if direct == crate::coamoeba::Membership::Coamoeba {
            membership_check.coamoeba_hits += 1;
        }
    }
    let membership_ms = elapsed_ms(t1);

    let (mut cubical, mut doubled) = (None, None);
    let (mut cubical_ms, mut doubled_ms) = (None, None);
    if !opts.skip_cubical {
        let m = match &opts.resolution {
            Some(m) => m.clone(),
            None => default_resolution(&arr)?,
        };
        let t2 = Instant::now();
        let run = run_grid(&arr, &m)?;
        cubical_ms = Some(elapsed_ms(t2));
        if !run.boundary_squared_zero {
            disagreements.push(format!("boundary of boundary nonzero at {m:?}"));
        }
        if !run.euler_consistent {
            disagreements.push(format!("Euler characteristic mismatch at {m:?}"));
        }
        if run.betti != closed.betti {
            disagreements.push(format!("cubical betti {:?} != closed form {:?}", run.betti, closed.betti));
        }
        if run.conjugation_rank != r_closed {
            disagreements.push(format!(
                "cubical rank(1+c) {} != rank_closed {r_closed}",
                run.conjugation_rank
            ));
        }
        if opts.check_doubled {
            let m2: Vec<usize> = m.iter().map(|x| 2 * x).collect();
            let t3 = Instant::now();
            let run2 = run_grid(&arr, &m2)?;
            doubled_ms = Some(elapsed_ms(t3));
            if run2.betti != run.betti || run2.conjugation_rank != run.conjugation_rank {
                disagreements.push(format!(
                    "unstable under doubling: {:?}/{} at {m:?}, {:?}/{} at {m2:?}",
                    run.betti, run.conjugation_rank, run2.betti, run2.conjugation_rank
                ));
            }
            doubled = Some(run2);
        }
        cubical = Some(run);
    }

    let betti_agree = cubical.as_ref().map(|r| r.betti == closed.betti);
    let rank_agree = cubical.as_ref().map(|r| r.conjugation_rank == r_closed);
    let resolution_stable = match (&cubical, &doubled) {
        (Some(a), Some(b)) => Some(a.betti == b.betti && a.conjugation_rank == b.conjugation_rank),
        _ => None,
    };
    Ok(VerificationRecord {
        instance_id: id,
        n,
        d: arr.d.clone(),
        closed_betti: closed.betti,
        rank_closed: r_closed,
        rank_assembled: r_assembled,
        membership: membership_check,
        cubical,
        doubled,
        betti_agree,
        rank_agree,
        resolution_stable,
        all_agree: disagreements.is_empty(),
        disagreements,
        timings: opts.record_timings.then_some(Timings {
            algebraic_ms,
            membership_ms,
            cubical_ms,
            doubled_ms,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::IntMatrix;
    use crate::model::Sign;

    fn model(rows: &[&[i64]], eps: &[i8]) -> NormalizedModel {
        let eps = eps.iter().map(|&e| Sign::from_i8(e).unwrap()).collect();
        NormalizedModel::from_parts(IntMatrix::from_i64(rows), eps).unwrap()
    }

    fn grid(model: &NormalizedModel, m: &[usize]) -> CubicalHomology {
        let dec = snf(&model.a).unwrap();
        let arr = arrangement(model, &dec).unwrap();
        let c = build_complex(&arr, m).unwrap();
        assert!(c.boundary_squared_is_zero());
        c.check_negation_symmetry().unwrap();
        c.homology().unwrap()
    }

    #[test]
    fn single_point_coamoeba() {
        let h = grid(&model(&[&[1]], &[1]), &[8]);
        assert_eq!(h.betti, vec![1, 0]);
    }

    #[test]
    fn pair_of_pants() {
        let h = grid(&model(&[&[1, 0], &[0, 1]], &[1, 1]), &[12, 12]);
        assert_eq!(h.betti, vec![1, 2, 0]);
        assert_eq!(h.conjugation_rank, 0);
    }

    #[test]
    fn four_zonotopes() {
        let h = grid(&model(&[&[2, 0], &[0, 2]], &[1, 1]), &[16, 16]);
        assert_eq!(h.betti, vec![1, 5, 0]);
        assert_eq!(h.conjugation_rank, 2);
        let h = grid(&model(&[&[2, 0], &[0, 2]], &[-1, -1]), &[16, 16]);
        assert_eq!(h.betti, vec![1, 5, 0]);
        assert_eq!(h.conjugation_rank, 1);
    }

    #[test]
    fn sheared_three_zonotopes() {
        let h = grid(&model(&[&[2, 1], &[1, 2]], &[1, 1]), &[24, 24]);
        assert_eq!(h.betti, vec![1, 4, 0]);
        assert_eq!(h.conjugation_rank, 1);
    }

    #[test]
    fn bad_resolution_rejected() {
        let m = model(&[&[2, 0], &[0, 2]], &[1, 1]);
        let dec = snf(&m.a).unwrap();
        let arr = arrangement(&m, &dec).unwrap();
        assert!(matches!(build_complex(&arr, &[1, 6]), Err(Error::BadResolution { .. })));
        assert!(matches!(build_complex(&arr, &[8]), Err(Error::BadResolution { .. })));
        // no alignment with the zonotope centers is needed
        assert_eq!(build_complex(&arr, &[17, 19]).unwrap().homology().unwrap().betti, vec![1, 5, 0]);
    }

    #[test]
    fn default_resolution_follows_reduced_basis() {
        let res = |rows: &[&[i64]]| {
            let m = model(rows, &vec![1; rows.len()]);
            default_resolution(&arrangement(&m, &snf(&m.a).unwrap()).unwrap()).unwrap()
        };
        assert_eq!(res(&[&[1, 0], &[0, 1]]), vec![16, 16]);
        assert_eq!(res(&[&[1, 0], &[0, 3]]), vec![16, 48]);
        assert_eq!(res(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), vec![12, 12, 12]);
        assert_eq!(res(&[&[40]]), vec![640]);
        // a skewed lattice of determinant 13 gets short reduced vectors
        let m = res(&[&[1, 0], &[5, 13]]);
        assert!(m.iter().all(|&x| x <= 64), "{m:?}");
    }

    #[test]
    fn verify_worked_instance() {
        let m = model(&[&[2, 0], &[0, 2]], &[-1, -1]);
        let opts = VerifyOptions {
            membership_samples: 200,
            ..VerifyOptions::default()
        };
        let rec = verify(&m, Some("x".into()), &opts).unwrap();
        assert!(rec.all_agree, "{:?}", rec.disagreements);
        assert_eq!(rec.resolution_stable, Some(true));
        assert!(rec.timings.is_none());
    }
}
