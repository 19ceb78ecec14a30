//! ℤ₂-homology of the coamoeba, the conjugation action on it, the real part
//! and the Galois-maximality defect.
//!
//! `H_k` of the coamoeba agrees with `H_k(Tⁿ)` for `k ≤ n − 2`, and
//! `H_{n−1}` is spanned by lifts `B₁, …, Bₙ` of the coordinate subtori
//! together with the zonotope boundaries `[∂Z_α]` modulo their sum.
//! Conjugation is trivial outside degree `n − 1`; there,
//! `(1 + c*)(Bᵢ) = Σ_{α ∈ Jᵢ} [∂Z_α]` and `(1 + c*)[∂Z_α] = [∂Z_α] + [∂Z_{c(α)}]`.
//! The rank of `1 + c*` is computed both from the parity classes of the
//! axes ([`rank_closed`]) and by assembling those images with geometric
//! slice counts ([`rank_assembled`]); [`analyze`] insists they agree.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::coamoeba::{arrangement, conjugation_action, parity_set, ConjugationAction, ZonotopeArrangement};
use crate::error::{Error, Result};
use crate::exactmath::{snf, z2_in_span, z2_rank, IntMatrix, Z2Matrix, Z2Vector};
use crate::model::{model_partition, normalize, IndexPartition, NormalizedModel, PolynomialSpec};

/// Literal attached to every verdict about the complex hypersurface itself,
/// which depends on an unproven identification of the conjugation actions.
pub const CX_CONDITION: &str = "conditional-on-conjecture-1.1";

/// Largest `n` for which quadrants are enumerated.
pub const MAX_QUADRANT_DIM: usize = 24;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn pow2(e: usize) -> Result<u64> {
    1u64.checked_shl(e as u32)
        .filter(|_| e < 64)
        .ok_or_else(|| Error::TooLarge(format!("2^{e}")))
}

fn product_u64(d: &[BigInt]) -> Result<u64> {
    d.iter()
        .try_fold(1u64, |acc, x| x.to_u64().and_then(|x| acc.checked_mul(x)))
        .ok_or_else(|| Error::TooLarge("product of invariant factors".into()))
}

/// ℤ₂ Betti numbers `(b₀, …, bₙ)` of the coamoeba.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    pub betti: Vec<u64>,
    pub total: u64,
}

/// Betti numbers of `Tⁿ` minus `omega` disjoint open balls:
/// `b_k = C(n, k)` for `k ≤ n − 2`, `b_{n−1} = n + omega − 1`, `b_n = 0`.
pub fn betti_closed_form(n: usize, omega: u64) -> HomologyProfile {
    let nn = n as u64;
    let mut betti: Vec<u64> = (0..=nn).map(|k| binomial(nn, k)).collect();
    betti[n - 1] = nn + omega - 1;
    betti[n] = 0;
    let total = betti.iter().sum();
    HomologyProfile { betti, total }
}

pub fn betti_coamoeba(model: &NormalizedModel, snf: &crate::exactmath::SmithDecomposition) -> Result<HomologyProfile> {
    if model.n == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(betti_closed_form(model.n, product_u64(&snf.d)?))
}

/// Images of the `H_{n−1}` generators under `1 + c*`, written in the
/// `[∂Z_α]` block (flat index order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CStarPresentation {
    pub n: usize,
    pub omega_size: usize,
    /// `(1 + c*)(Bᵢ)` for each axis.
    pub b_images: Vec<Z2Vector>,
    /// `(1 + c*)[∂Z_α]` for each `α`.
    pub zonotope_images: Vec<Z2Vector>,
    /// The relation `w = Σ_α [∂Z_α]`.
    pub relation: Z2Vector,
}

impl CStarPresentation {
    pub fn generator_count(&self) -> usize {
        self.n + self.omega_size
    }

    /// `(1 + c*)` applied to a vector of the `[∂Z_α]` block.
    pub fn apply_to_block(&self, v: &Z2Vector) -> Z2Vector {
        let mut out = Z2Vector::zeros(self.omega_size);
        for a in v.ones() {
            out.xor_assign(&self.zonotope_images[a]);
        }
        out
    }
}

pub fn cstar_presentation(
    arr: &ZonotopeArrangement,
    action: &ConjugationAction,
    parity_sets: &[Vec<usize>],
) -> Result<CStarPresentation> {
    let omega = action.mapping.len();
    if omega as u64 != arr.omega_size() {
        return Err(Error::DimensionMismatch {
            expected: arr.omega_size() as usize,
            found: omega,
        });
    }
    if parity_sets.len() != arr.n {
        return Err(Error::DimensionMismatch {
            expected: arr.n,
            found: parity_sets.len(),
        });
    }
    let b_images = parity_sets
        .iter()
        .map(|j| Z2Vector::from_support(omega, j.iter().copied()))
        .collect();
    let zonotope_images = action
        .mapping
        .iter()
        .enumerate()
        .map(|(a, &ca)| Z2Vector::from_support(omega, [a, ca]))
        .collect();
    Ok(CStarPresentation {
        n: arr.n,
        omega_size: omega,
        b_images,
        zonotope_images,
        relation: Z2Vector::from_support(omega, 0..omega),
    })
}

/// Rank of `1 + c*` on `H_{n−1}`: rank of all images stacked with `w`,
/// minus one for the quotient by `w`.
pub fn rank_assembled(pres: &CStarPresentation) -> u64 {
    let rows: Vec<Z2Vector> = pres
        .b_images
        .iter()
        .chain(&pres.zonotope_images)
        .chain(std::iter::once(&pres.relation))
        .cloned()
        .collect();
    let m = Z2Matrix::from_rows(rows, pres.omega_size).expect("rows sized to omega");
    (z2_rank(&m) as u64).saturating_sub(1)
}

/// Rank of `1 + c*` from the axis classes alone:
/// `d₁⋯dₙ/2 − 1` if some axis is in `I10`, otherwise
/// `|I00| + (d₁⋯dₙ − 2^|I00|)/2`.
pub fn rank_closed(partition: &IndexPartition, d: &[BigInt]) -> Result<u64> {
    let omega = product_u64(d)?;
    if !partition.i10.is_empty() {
        Ok(omega / 2 - 1)
    } else {
        let fixed = pow2(partition.i00.len())?;
        Ok(partition.i00.len() as u64 + (omega - fixed) / 2)
    }
}

/// Number of fixed zonotopes of `c`: 0 if `I10 ≠ ∅`, else `2^|I00|`.
pub fn fixed_count_closed(partition: &IndexPartition) -> Result<u64> {
    if partition.i10.is_empty() {
        pow2(partition.i00.len())
    } else {
        Ok(0)
    }
}

/// Which orthants of `(ℝ*)ⁿ` the real part meets. Each nonempty
/// intersection is one contractible component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealPartProfile {
    /// Bit `γ` is set iff the real part meets the orthant whose negative
    /// coordinates are the set bits of `γ`.
    pub quadrant_mask: Z2Vector,
    pub component_count: u64,
    pub all_quadrants_hit: bool,
}

/// Enumerates orthants: orthant `γ` is missed iff `δ(ε) = A·δ(γ)` over ℤ₂.
pub fn quadrant_mask(model: &NormalizedModel) -> Result<RealPartProfile> {
    let n = model.n;
    if n > MAX_QUADRANT_DIM {
        return Err(Error::TooLarge(format!("2^{n} quadrants")));
    }
    let a2 = model.a.to_z2();
    let delta = model.delta();
    let count = 1usize << n;
    let mut mask = Z2Vector::zeros(count);
    for gamma in 0..count {
        let dg = Z2Vector::from_bits(&(0..n).map(|j| gamma >> j & 1 == 1).collect::<Vec<_>>());
        if a2.mul_vec(&dg)? != delta {
            mask.set(gamma, true);
        }
    }
    let component_count = mask.count_ones() as u64;
    Ok(RealPartProfile {
        all_quadrants_hit: component_count == count as u64,
        quadrant_mask: mask,
        component_count,
    })
}

/// Whether `δ(ε)` lies in the image of `x ↦ A·x` over ℤ₂.
pub fn delta_in_image(model: &NormalizedModel) -> Result<bool> {
    z2_in_span(&model.a.transpose().to_z2(), &model.delta())
}

/// Component count without enumeration: `2ⁿ` if `δ ∉ Im(A mod 2)`,
/// otherwise `2ⁿ − 2^{n − rank₂ A}`.
pub fn component_count_closed(model: &NormalizedModel) -> Result<u64> {
    let full = pow2(model.n)?;
    if delta_in_image(model)? {
        Ok(full - pow2(model.n - model.rank2())?)
    } else {
        Ok(full)
    }
}

/// The Galois-maximality verdict for the complex hypersurface, valid only
/// under [`CX_CONDITION`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionalVerdict {
    pub value: bool,
    pub condition: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectVerdict {
    pub kernel_mod_image_dim: u64,
    pub defect: u64,
    pub galois_maximal_coamoeba: bool,
    #[serde(rename = "galois_maximal_CX")]
    pub galois_maximal_cx: ConditionalVerdict,
}

/// Defect predicted without any homology: 0 when every orthant is hit,
/// otherwise `2(2^{n−r} − 1 − (n − r))` with `r = rank₂ A`.
pub fn defect_closed(n: usize, rank2: usize, all_quadrants_hit: bool) -> Result<u64> {
    if all_quadrants_hit {
        return Ok(0);
    }
    let k = n - rank2;
    Ok(2 * (pow2(k)? - 1 - k as u64))
}

/// `dim Ker/Im = total − 2·rank` (1 + c* vanishes outside degree n − 1),
/// compared against the real part. Fails loudly if the defect disagrees
/// with its closed form or with the orthant / image / `I10` equivalences.
pub fn defect_and_verdict(
    model: &NormalizedModel,
    homology: &HomologyProfile,
    rank: u64,
    real: &RealPartProfile,
    partition: &IndexPartition,
) -> Result<DefectVerdict> {
    let fail = |msg: String| Err(Error::ConsistencyFailure(msg));
    let kernel_mod_image_dim = homology
        .total
        .checked_sub(2 * rank)
        .ok_or_else(|| Error::ConsistencyFailure(format!("rank {rank} exceeds half of total {}", homology.total)))?;
    let Some(defect) = kernel_mod_image_dim.checked_sub(real.component_count) else {
        return fail(format!(
            "negative defect: ker/im {kernel_mod_image_dim} < components {}",
            real.component_count
        ));
    };

    let not_in_image = !delta_in_image(model)?;
    let i10_nonempty = !partition.i10.is_empty();
    if real.all_quadrants_hit != not_in_image || not_in_image != i10_nonempty {
        return fail(format!(
            "equivalence chain broken: all quadrants {}, delta outside image {}, I10 nonempty {}",
            real.all_quadrants_hit, not_in_image, i10_nonempty
        ));
    }
    let rank2 = model.rank2();
    let expected = defect_closed(model.n, rank2, real.all_quadrants_hit)?;
    if defect != expected {
        return fail(format!("defect {defect} != closed form {expected}"));
    }
    let maximal = defect == 0;
    let predicted = real.all_quadrants_hit || model.n - rank2 <= 1;
    if maximal != predicted {
        return fail(format!(
            "maximality {maximal} but n - rank2 = {} and all quadrants = {}",
            model.n - rank2,
            real.all_quadrants_hit
        ));
    }
    Ok(DefectVerdict {
        kernel_mod_image_dim,
        defect,
        galois_maximal_coamoeba: maximal,
        galois_maximal_cx: ConditionalVerdict {
            value: maximal,
            condition: CX_CONDITION,
        },
    })
}

/// `G` and `D` of the Smith decomposition, as reported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnfEcho {
    pub g: IntMatrix,
    #[serde(serialize_with = "crate::exactmath::serialize_bigint_slice")]
    pub d: Vec<BigInt>,
}

/// Cross-checks run by [`analyze`]; in a returned report they are all true.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyFlags {
    pub ranks_agree: bool,
    pub components_match_closed_form: bool,
    pub fixed_points_match_closed_form: bool,
    pub conjugation_is_involution: bool,
    pub parity_sets_conjugation_closed: bool,
    pub relation_in_kernel: bool,
}

/// Everything computed for one polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub model: NormalizedModel,
    pub snf: SnfEcho,
    pub partition: IndexPartition,
    pub homology: HomologyProfile,
    pub rank_closed: u64,
    pub rank_assembled: u64,
    pub ranks_agree: bool,
    pub fixed_point_count: u64,
    pub real_part: RealPartProfile,
    pub kernel_mod_image_dim: u64,
    pub defect: u64,
    pub galois_maximal_coamoeba: bool,
    #[serde(rename = "galois_maximal_CX")]
    pub galois_maximal_cx: ConditionalVerdict,
    #[serde(rename = "rank2_A")]
    pub rank2_a: usize,
    #[serde(rename = "n_minus_rank2_A")]
    pub n_minus_rank2_a: usize,
    pub consistency: ConsistencyFlags,
}

impl AnalysisReport {
    /// The fields that depend only on the hypersurface, not on the chosen
    /// origin vertex or coefficient magnitudes.
    pub fn invariant_summary(&self) -> InvariantSummary {
        InvariantSummary {
            n: self.model.n,
            d: self.snf.d.clone(),
            betti: self.homology.betti.clone(),
            rank: self.rank_closed,
            rank_assembled: self.rank_assembled,
            component_count: self.real_part.component_count,
            all_quadrants_hit: self.real_part.all_quadrants_hit,
            kernel_mod_image_dim: self.kernel_mod_image_dim,
            defect: self.defect,
            galois_maximal: self.galois_maximal_coamoeba,
            rank2_a: self.rank2_a,
            fixed_point_count: self.fixed_point_count,
            i10_nonempty: !self.partition.i10.is_empty(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantSummary {
    pub n: usize,
    pub d: Vec<BigInt>,
    pub betti: Vec<u64>,
    pub rank: u64,
    pub rank_assembled: u64,
    pub component_count: u64,
    pub all_quadrants_hit: bool,
    pub kernel_mod_image_dim: u64,
    pub defect: u64,
    pub galois_maximal: bool,
    pub rank2_a: usize,
    pub fixed_point_count: u64,
    /// The sizes of the index classes depend on the origin vertex; only
    /// whether `I10` is empty does not.
    pub i10_nonempty: bool,
}

pub fn analyze(spec: &PolynomialSpec) -> Result<AnalysisReport> {
    analyze_model(&normalize(spec)?)
}

/// Full pipeline on an already normalized model.
pub fn analyze_model(model: &NormalizedModel) -> Result<AnalysisReport> {
    let fail = |msg: String| Err(Error::ConsistencyFailure(msg));
    let dec = snf(&model.a)?;
    let partition = model_partition(model, &dec)?;
    let arr = arrangement(model, &dec)?;
    let action = conjugation_action(&arr)?;
    let parity_sets = (0..model.n)
        .map(|i| parity_set(&arr, i))
        .collect::<Result<Vec<_>>>()?;
    let pres = cstar_presentation(&arr, &action, &parity_sets)?;

    let conjugation_is_involution = action.is_involution();
    let parity_sets_conjugation_closed = parity_sets.iter().all(|j| {
        let set = Z2Vector::from_support(action.mapping.len(), j.iter().copied());
        j.iter().all(|&a| set.get(action.mapping[a]))
    });
    let relation_in_kernel = pres.apply_to_block(&pres.relation).is_zero();
    if !(conjugation_is_involution && parity_sets_conjugation_closed && relation_in_kernel) {
        return fail(format!(
            "conjugation structure: involution {conjugation_is_involution}, J closed {parity_sets_conjugation_closed}, w in kernel {relation_in_kernel}"
        ));
    }

    let fixed_point_count = action.fixed.len() as u64;
    let fixed_expected = fixed_count_closed(&partition)?;
    if fixed_point_count != fixed_expected {
        return fail(format!("{fixed_point_count} fixed zonotopes, closed form {fixed_expected}"));
    }

    let r_closed = rank_closed(&partition, &dec.d)?;
    let r_assembled = rank_assembled(&pres);
    if r_closed != r_assembled {
        return fail(format!("rank of 1+c*: closed form {r_closed}, assembled {r_assembled}"));
    }

    let homology = betti_coamoeba(model, &dec)?;
    let real = quadrant_mask(model)?;
    let closed_components = component_count_closed(model)?;
    if real.component_count != closed_components {
        return fail(format!(
            "{} real components by enumeration, {closed_components} by closed form",
            real.component_count
        ));
    }
    if real.component_count > homology.total {
        return fail(format!(
            "Smith-Thom inequality violated: {} components > total Betti {}",
            real.component_count, homology.total
        ));
    }
    let verdict = defect_and_verdict(model, &homology, r_closed, &real, &partition)?;
    let rank2 = model.rank2();

    Ok(AnalysisReport {
        model: model.clone(),
        snf: SnfEcho {
            g: dec.g.clone(),
            d: dec.d.clone(),
        },
        partition,
        homology,
        rank_closed: r_closed,
        rank_assembled: r_assembled,
        ranks_agree: true,
        fixed_point_count,
        real_part: real,
        kernel_mod_image_dim: verdict.kernel_mod_image_dim,
        defect: verdict.defect,
        galois_maximal_coamoeba: verdict.galois_maximal_coamoeba,
        galois_maximal_cx: verdict.galois_maximal_cx,
        rank2_a: rank2,
        n_minus_rank2_a: model.n - rank2,
        consistency: ConsistencyFlags {
            ranks_agree: true,
            components_match_closed_form: true,
            fixed_points_match_closed_form: true,
            conjugation_is_involution,
            parity_sets_conjugation_closed,
            relation_in_kernel,
        },
    })
}
