mod common;

use coamoeba_core::coamoeba::{
    arrangement, conjugation_action, fixed_indices, is_antipodal, membership, membership_by_zonotope,
    membership_original, parity_set, Turn,
};
use coamoeba_core::exactmath::{snf, IntMatrix};
use coamoeba_core::model::{model_partition, NormalizedModel, Sign};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn random_model() -> impl Strategy<Value = NormalizedModel> {
    (1usize..=3)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(proptest::collection::vec(-4i64..=4, n), n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
        .prop_filter_map("singular", |(rows, signs)| {
            let a = IntMatrix::from_rows(&rows).unwrap();
            if a.determinant().unwrap().is_zero() {
                return None;
            }
            let eps = signs.iter().map(|&s| if s { Sign::Minus } else { Sign::Plus }).collect();
            NormalizedModel::from_parts(a, eps).ok()
        })
}

fn turn() -> impl Strategy<Value = Turn> {
    (1i64..=60).prop_flat_map(|den| (0..den).prop_map(move |num| Turn::from_ratio(num, den)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn half_circle_and_zonotope_membership_agree(
        model in random_model(),
        points in proptest::collection::vec(proptest::collection::vec(turn(), 3), 40),
    ) {
        let dec = snf(&model.a).unwrap();
        let arr = arrangement(&model, &dec).unwrap();
        for p in &points {
            let psi = &p[..model.n];
            prop_assert_eq!(
                membership(&model, &dec, psi).unwrap(),
                membership_by_zonotope(&arr, psi).unwrap(),
                "at {:?}", psi.iter().map(ToString::to_string).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn coamoeba_is_centrally_symmetric(
        model in random_model(),
        points in proptest::collection::vec(proptest::collection::vec(turn(), 3), 40),
    ) {
        for p in &points {
            let theta = &p[..model.n];
            let negated: Vec<Turn> = theta.iter().map(Turn::neg).collect();
            prop_assert_eq!(
                membership_original(&model, theta).unwrap(),
                membership_original(&model, &negated).unwrap()
            );
        }
    }

    #[test]
    fn conjugation_on_zonotopes(model in random_model()) {
        let dec = snf(&model.a).unwrap();
        let arr = arrangement(&model, &dec).unwrap();
        let action = conjugation_action(&arr).unwrap();
        prop_assert!(action.is_involution());
        for alpha in arr.indices().unwrap() {
            let beta = arr.conjugate_index(&alpha).unwrap();
            prop_assert!(is_antipodal(&arr.center(&alpha).unwrap(), &arr.center(&beta).unwrap()));
        }
        // fixed-point census against the partition
        let part = model_partition(&model, &dec).unwrap();
        let expected = if part.i10.is_empty() { 1usize << part.i00.len() } else { 0 };
        prop_assert_eq!(fixed_indices(&arr).unwrap().len(), expected);
        prop_assert_eq!(action.fixed.len(), expected);
        // each parity set is a union of conjugation orbits
        for axis in 0..model.n {
            let j = parity_set(&arr, axis).unwrap();
            for &a in &j {
                prop_assert!(j.contains(&action.mapping[a]), "J_{} not closed", axis);
            }
        }
    }

    #[test]
    fn zonotope_count_and_shape(model in random_model()) {
        let dec = snf(&model.a).unwrap();
        let arr = arrangement(&model, &dec).unwrap();
        prop_assert_eq!(BigRational::from_integer(dec.product()), BigRational::from_integer(arr.omega_size().into()));
        // every facet offset equals half the sum of |ν·g| over generators
        for f in &arr.shape.facets {
            let mut sum = BigRational::zero();
            for g in &arr.shape.generators {
                let dot: BigRational = f
                    .normal
                    .iter()
                    .zip(g)
                    .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                    .fold(BigRational::zero(), |acc, x| acc + x);
                sum += if dot < BigRational::zero() { -dot } else { dot };
            }
            prop_assert_eq!(&f.offset * BigRational::from_integer(2.into()), sum);
        }
    }
}

/// Hand-checked points for `1 + z₁ + z₂`.
#[test]
fn pair_of_pants_points() {
    let m = common::model(&[&[1, 0], &[0, 1]], &[1, 1]);
    let at = |a: (i64, i64), b: (i64, i64)| membership_original(&m, &[Turn::from_ratio(a.0, a.1), Turn::from_ratio(b.0, b.1)]).unwrap();
    use coamoeba_core::coamoeba::Membership::{Coamoeba, Complement};
    // arguments (1/3, 2/3): the three terms can cancel
    assert_eq!(at((1, 3), (2, 3)), Coamoeba);
    // small positive arguments: all three terms in one open half-plane
    assert_eq!(at((1, 10), (1, 10)), Complement);
    assert_eq!(at((0, 1), (0, 1)), Complement);
    // boundary of the triangle belongs to the closed coamoeba
    assert_eq!(at((1, 2), (1, 2)), Coamoeba);
    assert_eq!(at((1, 2), (0, 1)), Coamoeba);
}
