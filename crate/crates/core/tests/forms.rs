mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::collection::vec;
use proptest::prelude::*;
use qform::arith::factor_u64;
use qform::{BasisChange, QuadraticForm};

use common::strategies::{definite, nondegenerate, unimodular};

fn level_clears(q: &QuadraticForm, n: u64) -> bool {
    let inv = q.hessian_matrix().inverse().unwrap();
    let scale = BigRational::from_integer(BigInt::from(n));
    (0..q.dim()).all(|i| {
        (0..q.dim()).all(|j| {
            let e = &inv[(i, j)] * &scale;
            e.is_integer() && (i != j || e.to_integer().is_even())
        })
    })
}

proptest! {
    #[test]
    fn polarization(q in nondegenerate(1..=5, 6), x in vec(-20i64..=20, 5), y in vec(-20i64..=20, 5)) {
        let n = q.dim();
        let (x, y) = (&x[..n], &y[..n]);
        let s: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        prop_assert_eq!(q.evaluate(&s).unwrap(), q.evaluate(x).unwrap() + q.hessian_bilinear(x, y).unwrap() + q.evaluate(y).unwrap());
    }

    #[test]
    fn transforms_compose(q in definite(3..=3, 3), m1 in unimodular(3), m2 in unimodular(3)) {
        let a = q.transform(&m1).unwrap().transform(&m2).unwrap();
        let b = q.transform(&m1.compose(&m2).unwrap()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.det_hessian(), q.det_hessian());
    }

    #[test]
    fn determinant_scales_by_square(q in nondegenerate(2..=2, 5), m in vec(-4i64..=4, 4)) {
        prop_assume!(m[0] * m[3] != m[1] * m[2]);
        let m = BasisChange::new(2, m).unwrap();
        let t = q.transform(&m).unwrap();
        prop_assert_eq!(t.det_hessian(), &(m.det() * m.det() * q.det_hessian()));
    }

    #[test]
    fn level_is_minimal(q in nondegenerate(1..=4, 5)) {
        let n = q.level().unwrap();
        prop_assert!(level_clears(&q, n));
        for (p, _) in factor_u64(n) {
            prop_assert!(!level_clears(&q, n / p));
        }
    }

    #[test]
    fn upper_coefficients_round_trip(q in nondegenerate(1..=5, 6)) {
        let back = QuadraticForm::from_upper_coefficients(q.dim(), &q.to_upper_coefficients()).unwrap();
        prop_assert_eq!(&back, &q);
        let json = serde_json::to_string(&q).unwrap();
        prop_assert_eq!(serde_json::from_str::<QuadraticForm>(&json).unwrap(), q);
    }
}

#[test]
fn malformed_json_is_rejected() {
    assert!(serde_json::from_str::<QuadraticForm>(r#"{"n":2,"hessian":[[2,1],[0,2]]}"#).is_err());
    assert!(serde_json::from_str::<QuadraticForm>(r#"{"n":1,"hessian":[[1]]}"#).is_err());
    assert!(serde_json::from_str::<QuadraticForm>(r#"{"n":3,"hessian":[[2]]}"#).is_err());
}

#[test]
fn direct_sums_and_scaling() {
    let a = QuadraticForm::diagonal(&[1, 2]);
    let b = QuadraticForm::from_rows(vec![vec![2, 1], vec![1, 2]]).unwrap();
    let s = a.direct_sum(&b);
    assert_eq!(s.dim(), 4);
    assert_eq!(s.det_hessian(), &(a.det_hessian() * b.det_hessian()));
    assert_eq!(s.evaluate(&[1, 1, 1, 1]).unwrap(), 3 + 3);
    assert_eq!(b.scale(3).unwrap().evaluate(&[1, 1]).unwrap(), 9);
}
