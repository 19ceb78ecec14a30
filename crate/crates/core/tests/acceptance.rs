//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use coamoeba_core::coamoeba::{
    arrangement, conjugation_action, fixed_indices, membership, membership_by_zonotope, parity_set, Turn,
};
use coamoeba_core::cubical::{verify, VerifyOptions};
use coamoeba_core::exactmath::{minor_gcd, snf};
use coamoeba_core::homology::{
    analyze, analyze_model, betti_closed_form, cstar_presentation, delta_in_image, fixed_count_closed, rank_assembled,
    rank_closed,
};
use coamoeba_core::model::{model_partition, normalize, normalize_with_origin, NormalizedModel, PolynomialSpec, Term};
use common::orthant_hit;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn hit_count(m: &NormalizedModel) -> u64 {
    (0..1usize << m.n).filter(|&g| orthant_hit(m, g)).count() as u64
}

fn rank_equivalence(corpus: &[NormalizedModel]) -> Check {
    ensure!(corpus.len() >= 200, "corpus has only {} models", corpus.len());
    let start = Instant::now();
    for m in corpus {
        let dec = snf(&m.a).map_err(|e| e.to_string())?;
        let part = model_partition(m, &dec).unwrap();
        let arr = arrangement(m, &dec).unwrap();
        let action = conjugation_action(&arr).unwrap();
        let sets: Vec<_> = (0..m.n).map(|i| parity_set(&arr, i).unwrap()).collect();
        let pres = cstar_presentation(&arr, &action, &sets).unwrap();
        let (closed, assembled) = (rank_closed(&part, &dec.d).unwrap(), rank_assembled(&pres));
        ensure!(closed == assembled, "A = {}: closed {closed}, assembled {assembled}", m.a);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.2}s");
    Ok(format!("{} models in {secs:.2}s", corpus.len()))
}

fn defect_identity(corpus: &[NormalizedModel]) -> Check {
    for m in corpus {
        let report = analyze_model(m).unwrap();
        let total: u64 = report.homology.betti.iter().sum();
        let count = hit_count(m);
        let defect = total as i64 - 2 * report.rank_closed as i64 - count as i64;
        let r = m.rank2();
        let want = if count == 1 << m.n { 0 } else { 2 * ((1i64 << (m.n - r)) - 1 - (m.n - r) as i64) };
        ensure!(defect == want, "A = {}, eps = {:?}: defect {defect}, formula {want}", m.a, m.epsilon);
        ensure!(report.defect as i64 == defect, "A = {}: report says {}", m.a, report.defect);
    }
    Ok(format!("{} models", corpus.len()))
}

fn equivalence_chain(corpus: &[NormalizedModel]) -> Check {
    for m in corpus {
        let all_hit = hit_count(m) == 1 << m.n;
        let outside = !delta_in_image(m).unwrap();
        let part = model_partition(m, &snf(&m.a).unwrap()).unwrap();
        ensure!(all_hit == outside && outside == !part.i10.is_empty(), "A = {}, eps = {:?}", m.a, m.epsilon);
    }
    Ok(format!("{} models", corpus.len()))
}

fn membership_agreement(corpus: &[NormalizedModel]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(common::CORPUS_SEED ^ 4);
    let instances: Vec<_> = corpus.iter().step_by(3).collect();
    ensure!(instances.len() >= 50, "only {} instances", instances.len());
    let mut points = 0;
    for m in &instances {
        let dec = snf(&m.a).unwrap();
        let arr = arrangement(m, &dec).unwrap();
        for _ in 0..1000 {
            let psi: Vec<Turn> = (0..m.n)
                .map(|_| {
                    let den = rng.gen_range(1..=120);
                    Turn::from_ratio(rng.gen_range(0..den), den)
                })
                .collect();
            let (a, b) = (membership(m, &dec, &psi).unwrap(), membership_by_zonotope(&arr, &psi).unwrap());
            ensure!(a == b, "A = {}: {a:?} vs {b:?}", m.a);
            points += 1;
        }
    }
    Ok(format!("{} instances, {points} points", instances.len()))
}

fn cubical_oracle(corpus: &[NormalizedModel]) -> Check {
    let opts = VerifyOptions::default();
    let plane: Vec<_> = corpus.iter().filter(|m| m.n == 2).collect();
    let space = [
        common::model(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[1, 1, 1]),
        common::model(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]], &[1, 1, 1]),
        common::model(&[&[3, -2, -3], &[2, 0, -4], &[1, 0, -3]], &[-1, 1, -1]),
        common::model(&[&[2, 4, 0], &[1, -1, -2], &[0, 1, 2]], &[1, -1, 1]),
    ];
    let mut worst = [0.0f64; 2];
    for (k, m) in plane.iter().copied().chain(space.iter()).enumerate() {
        let (limit, floor) = if m.n == 2 { (5.0, 16) } else { (120.0, 12) };
        let start = Instant::now();
        let rec = verify(m, None, &opts).map_err(|e| format!("A = {}: {e}", m.a))?;
        let secs = start.elapsed().as_secs_f64();
        let run = rec.cubical.as_ref().unwrap();
        ensure!(run.resolution.iter().all(|&r| r >= floor), "A = {}: resolution {:?}", m.a, run.resolution);
        let d: u64 = rec.d.iter().product();
        let closed = betti_closed_form(m.n, d).betti;
        ensure!(run.betti == closed, "A = {}: cubical {:?}, closed {closed:?}", m.a, run.betti);
        ensure!(run.conjugation_rank == rec.rank_closed, "A = {}: rank {} vs {}", m.a, run.conjugation_rank, rec.rank_closed);
        ensure!(rec.resolution_stable == Some(true) && rec.all_agree, "A = {} (#{k}): {:?}", m.a, rec.disagreements);
        ensure!(secs < limit, "A = {}: {secs:.2}s", m.a);
        let w = &mut worst[m.n - 2];
        *w = w.max(secs);
    }
    Ok(format!(
        "{} plane instances (slowest {:.2}s), {} space instances (slowest {:.2}s)",
        plane.len(),
        worst[0],
        space.len(),
        worst[1]
    ))
}

fn spec(n: usize, terms: &[(&[i64], i64)]) -> PolynomialSpec {
    PolynomialSpec::new(n, terms.iter().map(|(e, c)| Term::new(e.to_vec(), *c)).collect())
}

fn worked_instances() -> Check {
    struct Case {
        name: &'static str,
        spec: PolynomialSpec,
        betti: Option<Vec<u64>>,
        components: u64,
        defect: u64,
        n_minus_rank2: Option<usize>,
    }
    let cases = [
        Case {
            name: "1 + z1 + z2",
            spec: spec(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1)]),
            betti: Some(vec![1, 2, 0]),
            components: 3,
            defect: 0,
            n_minus_rank2: None,
        },
        Case {
            name: "z1^2 + z2^2 + 1",
            spec: spec(2, &[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], 1)]),
            betti: Some(vec![1, 5, 0]),
            components: 0,
            defect: 2,
            n_minus_rank2: None,
        },
        Case {
            name: "1 - z1^2 - z2^2",
            spec: spec(2, &[(&[0, 0], 1), (&[2, 0], -1), (&[0, 2], -1)]),
            betti: None,
            components: 4,
            defect: 0,
            n_minus_rank2: None,
        },
        Case {
            name: "z1 + z2^2 + 1",
            spec: spec(2, &[(&[1, 0], 1), (&[0, 2], 1), (&[0, 0], 1)]),
            betti: None,
            components: 2,
            defect: 0,
            n_minus_rank2: Some(1),
        },
    ];
    for c in &cases {
        let report = analyze(&c.spec).map_err(|e| format!("{}: {e}", c.name))?;
        let model = normalize(&c.spec).unwrap();
        if let Some(b) = &c.betti {
            ensure!(&report.homology.betti == b, "{}: betti {:?}", c.name, report.homology.betti);
        }
        ensure!(report.real_part.component_count == c.components, "{}: {} components", c.name, report.real_part.component_count);
        ensure!(report.defect == c.defect, "{}: defect {}", c.name, report.defect);
        ensure!(report.galois_maximal_coamoeba == (c.defect == 0), "{}: maximality", c.name);
        if let Some(k) = c.n_minus_rank2 {
            ensure!(report.n_minus_rank2_a == k, "{}: n - rank2 = {}", c.name, report.n_minus_rank2_a);
        }
        // independent confirmation: grid homology, sign census, membership
        let rec = verify(&model, None, &VerifyOptions::default()).unwrap();
        ensure!(rec.all_agree && rec.membership.disagreements == 0, "{}: {:?}", c.name, rec.disagreements);
        let run = rec.doubled.as_ref().unwrap();
        ensure!(run.betti == report.homology.betti, "{}: grid betti {:?}", c.name, run.betti);
        let count = hit_count(&model);
        ensure!(count == c.components, "{}: sign census gives {count}", c.name);
        let total: u64 = run.betti.iter().sum();
        let defect = total as i64 - 2 * run.conjugation_rank as i64 - count as i64;
        ensure!(defect == c.defect as i64, "{}: grid defect {defect}", c.name);
    }
    Ok(format!("{} instances", cases.len()))
}

fn fixed_point_census(corpus: &[NormalizedModel]) -> Check {
    for m in corpus {
        let dec = snf(&m.a).unwrap();
        let part = model_partition(m, &dec).unwrap();
        let arr = arrangement(m, &dec).unwrap();
        let enumerated = fixed_indices(&arr).unwrap().len() as u64;
        let want = if part.i10.is_empty() { 1u64 << part.i00.len() } else { 0 };
        ensure!(enumerated == want, "A = {}: {enumerated} fixed, expected {want}", m.a);
        ensure!(fixed_count_closed(&part).unwrap() == want, "A = {}: closed count", m.a);
    }
    Ok(format!("{} models", corpus.len()))
}

fn smith_validity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(common::CORPUS_SEED ^ 8);
    for k in 0..200 {
        let n = 1 + k % 4;
        let a = common::random_nonsingular(&mut rng, n, 9);
        let dec = snf(&a).unwrap();
        ensure!(dec.g.mul(&a).unwrap().mul(&dec.h).unwrap() == dec.diagonal_matrix(), "G A H != D for {a}");
        ensure!(dec.g.determinant().unwrap().abs().is_one(), "G not unimodular for {a}");
        ensure!(dec.h.determinant().unwrap().abs().is_one(), "H not unimodular for {a}");
        ensure!(dec.d.iter().all(|x| x.is_positive()), "nonpositive entry for {a}");
        ensure!(dec.d.windows(2).all(|w| w[1].is_multiple_of(&w[0])), "divisibility fails for {a}");
        ensure!(dec.product() == a.determinant().unwrap().abs(), "product != |det| for {a}");
        let mut prefix = BigInt::one();
        for j in 1..=n {
            prefix *= &dec.d[j - 1];
            ensure!(prefix == minor_gcd(&a, j).unwrap(), "minor gcd {j} fails for {a}");
        }
    }
    Ok("200 matrices".into())
}

fn random_spec(rng: &mut ChaCha8Rng) -> PolynomialSpec {
    loop {
        let n = rng.gen_range(1..=3);
        let terms = (0..=n)
            .map(|_| {
                let e: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
                let c = BigRational::new(rng.gen_range(1i64..=20).into(), rng.gen_range(1i64..=20).into());
                Term { exponent: e, coefficient: if rng.gen() { -c } else { c } }
            })
            .collect();
        let s = PolynomialSpec::new(n, terms);
        if normalize(&s).is_ok() {
            return s;
        }
    }
}

fn invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(common::CORPUS_SEED ^ 9);
    for _ in 0..60 {
        let s = random_spec(&mut rng);
        let report = analyze(&s).unwrap();
        for v in 0..s.terms.len() {
            let other = analyze_model(&normalize_with_origin(&s, v).unwrap()).unwrap();
            ensure!(other.invariant_summary() == report.invariant_summary(), "origin {v} changes {s:?}");
        }
        let mut scaled = s.clone();
        for t in &mut scaled.terms {
            let f = BigRational::new(rng.gen_range(1i64..=99).into(), rng.gen_range(1i64..=99).into());
            t.coefficient = &t.coefficient * f;
        }
        ensure!(analyze(&scaled).unwrap() == report, "rescaling changes {s:?}");
    }
    Ok("60 instances".into())
}

fn main() -> ExitCode {
    let corpus = common::corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("rank equivalence", Box::new(|| rank_equivalence(&corpus))),
        ("defect identity", Box::new(|| defect_identity(&corpus))),
        ("equivalence chain", Box::new(|| equivalence_chain(&corpus))),
        ("membership oracle", Box::new(|| membership_agreement(&corpus))),
        ("cubical oracle", Box::new(|| cubical_oracle(&corpus))),
        ("worked instances", Box::new(worked_instances)),
        ("fixed-point census", Box::new(|| fixed_point_census(&corpus))),
        ("smith form validity", Box::new(smith_validity)),
        ("vertex and coefficient invariance", Box::new(invariance)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
