use ltob_core::error::Error;
use ltob_core::fusion_ring::{global_dimension, FusionRing, BUILTIN_RINGS};
use ltob_core::number::{Precision, Real};
use proptest::prelude::*;

fn ring(name: &str) -> FusionRing {
    FusionRing::builtin(name).unwrap().with_dimensions(Precision::default()).unwrap()
}

fn tol() -> Real {
    Precision::ten_to_minus(40)
}

/// Z/n as a fusion ring, built directly from the group law.
fn cyclic(n: usize) -> FusionRing {
    let simples = (0..n).map(|i| format!("g{i}")).collect();
    let dual = (0..n).map(|i| (n - i) % n).collect();
    let entries: Vec<_> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b, (a + b) % n, 1))).collect();
    FusionRing::new(format!("z{n}"), simples, dual, &entries).unwrap()
}

#[test]
fn dimensions_satisfy_the_fusion_rules() {
    for name in BUILTIN_RINGS {
        let r = ring(name);
        let d = r.dims().unwrap();
        for a in 0..r.rank() {
            for b in 0..r.rank() {
                let lhs = d.get(a) * d.get(b);
                let rhs = (0..r.rank()).fold(Real::zero(), |acc, c| acc + Real::from_int(r.n(a, b, c) as i64) * d.get(c));
                assert!(lhs.approx_eq(&rhs, &tol()), "{name}: d_{a} d_{b}");
            }
        }
    }
}

#[test]
fn global_dimensions() {
    assert_eq!(global_dimension(&ring("hilb_z2")).unwrap(), Real::from_int(2));
    assert_eq!(global_dimension(&ring("hilb_s3")).unwrap(), Real::from_int(6));
    assert_eq!(global_dimension(&ring("rep_s3")).unwrap(), Real::from_int(6));
    assert_eq!(global_dimension(&ring("ising")).unwrap(), Real::from_int(4));
    let p = Precision::default();
    let phi = (Real::one() + Real::from_int(5).sqrt(p)) / Real::from_int(2);
    let fib = global_dimension(&ring("fib")).unwrap();
    assert!(fib.approx_eq(&(Real::from_int(2) + phi), &tol()));
}

#[test]
fn fusion_matrices_multiply_by_the_fusion_rules() {
    for name in BUILTIN_RINGS {
        let r = ring(name);
        let k = r.rank();
        let mul = |x: &Vec<Vec<u32>>, y: &Vec<Vec<u32>>| -> Vec<Vec<u32>> {
            (0..k).map(|i| (0..k).map(|j| (0..k).map(|l| x[i][l] * y[l][j]).sum()).collect()).collect()
        };
        for a in 0..k {
            for b in 0..k {
                let (na, nb) = (r.fusion_matrix(a), r.fusion_matrix(b));
                let ab = mul(&na, &nb);
                // N_a N_b = sum_c N_ab^c N_c, in either orientation of the matrices
                let mut sum = vec![vec![0u32; k]; k];
                for c in 0..k {
                    let nc = r.fusion_matrix(c);
                    for i in 0..k {
                        for j in 0..k {
                            sum[i][j] += r.n(a, b, c) * nc[i][j];
                        }
                    }
                }
                assert!(ab == sum || mul(&nb, &na) == sum, "{name}: N_{a} N_{b}");
            }
        }
    }
}

#[test]
fn documents_reject_bad_input() {
    assert!(matches!(FusionRing::from_document("{"), Err(Error::Parse(_))));
    let missing_unit = r#"{"simples": ["1", "g"], "dual": [0, 1], "N": [[1, 1, 0, 1]]}"#;
    assert!(FusionRing::from_document(missing_unit).is_err());
    let bad_dual = r#"{"simples": ["1"], "dual": [3], "N": [[0, 0, 0, 1]]}"#;
    assert!(FusionRing::from_document(bad_dual).is_err());
    assert!(FusionRing::builtin("nope").is_err());
}

#[test]
fn user_document_matches_builtin() {
    let text = r#"{"simples": ["1", "tau"], "dual": [0, 1],
                   "N": [[0,0,0,1],[0,1,1,1],[1,0,1,1],[1,1,0,1],[1,1,1,1]]}"#;
    let r = FusionRing::from_document(text).unwrap();
    assert_eq!(r.to_document(), FusionRing::builtin("fib").unwrap().to_document());
}

#[test]
fn pointed_and_integral_flags() {
    let expect = [("hilb_z2", true, true), ("hilb_s3", true, true), ("rep_s3", false, true), ("fib", false, false), ("ising", false, false)];
    for (name, pointed, integral) in expect {
        let r = ring(name);
        assert_eq!(r.is_pointed(), pointed, "{name}");
        assert_eq!(r.dims().unwrap().is_integral(), integral, "{name}");
    }
    assert!(ring("ising").dims().unwrap().is_weakly_integral());
    assert!(!ring("fib").dims().unwrap().is_weakly_integral());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclic_groups_are_pointed_with_unit_dimensions(n in 1usize..9) {
        let r = cyclic(n).with_dimensions(Precision::default()).unwrap();
        prop_assert!(r.is_pointed());
        prop_assert!(r.dims().unwrap().values().iter().all(|d| d == &Real::one()));
        prop_assert_eq!(global_dimension(&r).unwrap(), Real::from_int(n as i64));
        prop_assert_eq!(r.admissible_triples().len(), n * n);
    }

    #[test]
    fn document_round_trip_is_stable(n in 1usize..7, which in 0usize..5) {
        let r = if which == 0 { cyclic(n) } else { FusionRing::builtin(BUILTIN_RINGS[which]).unwrap() };
        let text = r.to_document();
        let back = FusionRing::from_document(&text).unwrap();
        prop_assert_eq!(back.to_document(), text);
    }

    #[test]
    fn duals_are_involutive_and_pair_with_the_unit(which in 0usize..5) {
        let r = FusionRing::builtin(BUILTIN_RINGS[which]).unwrap();
        for a in 0..r.rank() {
            prop_assert_eq!(r.dual(r.dual(a)), a);
            prop_assert_eq!(r.n(a, r.dual(a), 0), 1);
        }
    }
}
