use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use maxcsp_core::certificate::{verify_transformation, ValueMap};
use maxcsp_core::implementation::SearchCaps;
use maxcsp_core::oracle::{self, check_affine};
use maxcsp_core::random::{self, InstanceSpec};
use maxcsp_core::{catalog, io, transform, ClosureMode, ConstraintLanguage, Formula, WeightRange};

const CAP: usize = 24;

fn mixed() -> ConstraintLanguage {
    catalog::language(&["XOR", "OR2", "NAE3", "DICUT"]).unwrap()
}

fn instance(l: &ConstraintLanguage, seed: u64, n: usize, m: usize, range: WeightRange) -> Formula {
    let spec = InstanceSpec {
        nvars: n,
        applications: m,
        weight_range: range,
        max_weight: 30,
    };
    random::random_instance(&mut random::rng(seed), l, spec, CAP).unwrap()
}

fn range() -> impl Strategy<Value = WeightRange> {
    prop_oneof![Just(WeightRange::N), Just(WeightRange::Z)]
}

fn assignment(n: usize, code: u64) -> Vec<bool> {
    (0..n).map(|i| code >> i & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_adds_values(seed in any::<u64>(), n in 1usize..7, m in 0usize..10, r in range(), code in any::<u64>()) {
        let a = instance(&mixed(), seed, n, m, r);
        let b = instance(&mixed(), seed ^ 0xabc, n, m, r);
        let s = a.sum(&b).unwrap();
        let x = assignment(n, code);
        prop_assert_eq!(s.value(&x), a.value(&x) + b.value(&x));
        prop_assert_eq!(&s.threshold, &(&a.threshold + &b.threshold));
    }

    #[test]
    fn scaling_scales_the_optimum(seed in any::<u64>(), n in 1usize..7, m in 0usize..10, r in range(), alpha in 1i64..6) {
        let phi = instance(&mixed(), seed, n, m, r);
        let alpha = BigInt::from(alpha);
        let scaled = phi.scalar_mul(&alpha);
        let opt = oracle::brute_force(&phi).unwrap().optimum;
        prop_assert_eq!(oracle::brute_force(&scaled).unwrap().optimum, opt * &alpha);
        prop_assert_eq!(scaled.threshold, &phi.threshold * &alpha);
    }

    #[test]
    fn optimum_within_norm(seed in any::<u64>(), n in 1usize..7, m in 0usize..10, r in range()) {
        let phi = instance(&mixed(), seed, n, m, r);
        let res = oracle::brute_force(&phi).unwrap();
        let norm = phi.norm();
        prop_assert!(res.optimum <= norm && res.optimum >= -norm);
        prop_assert_eq!(phi.value(&res.witness), res.optimum);
    }

    #[test]
    fn polynomial_agrees_with_values(seed in any::<u64>(), n in 1usize..7, m in 0usize..10, r in range(), code in any::<u64>()) {
        let phi = instance(&mixed(), seed, n, m, r);
        let x = assignment(n, code);
        let p = phi.polynomial().unwrap();
        prop_assert_eq!(p.evaluate(&x).unwrap(), BigRational::from_integer(phi.value(&x)));
    }

    #[test]
    fn instance_round_trip(seed in any::<u64>(), n in 1usize..7, m in 0usize..10, r in range()) {
        let l = catalog::language(&["NAE3", "OR2"]).unwrap().closure(ClosureMode::Literals).unwrap();
        let phi = instance(&l, seed, n, m, r);
        let text = io::emit_instance(&phi);
        let back = io::parse_instance(&text, &[&l]).unwrap();
        prop_assert_eq!(io::emit_instance(&back), text);
        prop_assert_eq!(&back.threshold, &phi.threshold);
        prop_assert!(check_affine(&phi, &back, &1.into(), &0.into(), CAP).unwrap());
    }

    #[test]
    fn polynomial_round_trip(seed in any::<u64>(), n in 1usize..7, m in 0usize..10) {
        let phi = instance(&mixed(), seed, n, m, WeightRange::Z);
        let (p, t) = transform::compress_to_polynomial(&phi).unwrap();
        let text = io::emit_polynomial(&p, Some(&t));
        let back = io::parse_polynomial(&text).unwrap();
        prop_assert_eq!(io::emit_polynomial(&back.polynomial, back.threshold.as_ref()), text);
    }

    #[test]
    fn affine_certificates_hold_pointwise(seed in any::<u64>(), n in 1usize..7, m in 0usize..10) {
        let xor = catalog::language(&["XOR"]).unwrap();
        let neg = xor.closure(ClosureMode::Negations).unwrap();
        let sat = catalog::d_sat(2);
        let outputs = vec![
            (instance(&neg, seed, n, m, WeightRange::Z), "neg"),
            (instance(&mixed(), seed, n, m, WeightRange::Z), "lit"),
            (instance(&sat, seed, n, m, WeightRange::Z), "poly"),
        ];
        for (phi, which) in outputs {
            let out = match which {
                "neg" => transform::neg_to_base(&phi, &xor).unwrap(),
                "lit" => transform::unsigned_lit(&phi).unwrap(),
                _ => transform::apply_poly(&phi, &sat, &xor).unwrap(),
            };
            let ValueMap::Affine { scale, shift } = &out.certificate.value_map else {
                return Err(TestCaseError::fail(format!("{which}: value map is not affine")));
            };
            prop_assert!(check_affine(&phi, &out.formula, scale, shift, CAP).unwrap(), "{}", which);
            prop_assert!(verify_transformation(&phi, &out.formula, &out.certificate, CAP).unwrap().fully_passed());
        }
    }

    #[test]
    fn constants_are_removed_soundly(seed in any::<u64>(), n in 1usize..6, m in 0usize..8) {
        let ex3 = catalog::language(&["EX3"]).unwrap();
        let tf = ex3.closure(ClosureMode::Constants).unwrap();
        let phi = instance(&tf, seed, n, m, WeightRange::Z);
        let out = transform::implement_tf(&phi, &ex3, SearchCaps::default()).unwrap();
        prop_assert!(out.formula.is_over(&ex3));
        let report = verify_transformation(&phi, &out.formula, &out.certificate, CAP).unwrap();
        prop_assert!(report.fully_passed(), "{}", report);
    }
}
