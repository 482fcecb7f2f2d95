use ltob_core::fusion_ring::{global_dimension, FusionRing, BUILTIN_RINGS};
use ltob_core::number::{Precision, Real};
use ltob_core::type_classifier::{
    build_weighted_graph, check_weight_condition, classify_type, ratio_generators, TypeKind,
};
use proptest::prelude::*;

fn ring(name: &str) -> FusionRing {
    FusionRing::builtin(name).unwrap().with_dimensions(Precision::default()).unwrap()
}

/// Tambara-Yamagami fusion rules for Z/n: invertibles g_i and one m with
/// m ⊗ m = ⊕ g_i.
fn tambara_yamagami(n: usize) -> FusionRing {
    let mut simples: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    simples.push("m".into());
    let mut dual: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    dual.push(n);
    let mut entries = Vec::new();
    for a in 0..n {
        for b in 0..n {
            entries.push((a, b, (a + b) % n, 1));
        }
        entries.push((a, n, n, 1));
        entries.push((n, a, n, 1));
        entries.push((n, n, a, 1));
    }
    FusionRing::new(format!("ty{n}"), simples, dual, &entries).unwrap()
}

/// `a + b φ` with `φ² = φ + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct ZPhi(i64, i64);

impl ZPhi {
    fn mul(self, o: ZPhi) -> ZPhi {
        ZPhi(self.0 * o.0 + self.1 * o.1, self.0 * o.1 + self.1 * o.0 + self.1 * o.1)
    }
    fn add(self, o: ZPhi) -> ZPhi {
        ZPhi(self.0 + o.0, self.1 + o.1)
    }
}

#[test]
fn fibonacci_weight_condition_in_z_phi() {
    let r = FusionRing::builtin("fib").unwrap();
    let d = [ZPhi(1, 0), ZPhi(0, 1)];
    // edges c1 -> c2 are pairs (a, b) with c2 in a ⊗ c1 ⊗ b, weighted d_a d_b
    let mut lhs = [ZPhi(0, 0); 2];
    for (c1, total) in lhs.iter_mut().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                for m in 0..2 {
                    for c2 in 0..2 {
                        let mult = (r.n(a, c1, m) * r.n(m, b, c2)) as i64;
                        let term = d[a].mul(d[b]).mul(d[c2]);
                        *total = total.add(ZPhi(mult * term.0, mult * term.1));
                    }
                }
            }
        }
    }
    let delta = ZPhi(2, 1).mul(ZPhi(2, 1));
    assert_eq!(delta, ZPhi(5, 5));
    assert_eq!(lhs[0], ZPhi(5, 5));
    assert_eq!(lhs[1], delta.mul(d[1]));
    // and the library's graph agrees numerically
    let g = build_weighted_graph(&ring("fib")).unwrap();
    let p = Precision::default();
    let phi = (Real::one() + Real::from_int(5).sqrt(p)) / Real::from_int(2);
    assert!(g.delta().approx_eq(&(Real::from_int(5) + Real::from_int(5) * phi), &Precision::ten_to_minus(40)));
}

#[test]
fn weight_condition_holds_for_builtins() {
    for name in BUILTIN_RINGS {
        let r = ring(name);
        let g = build_weighted_graph(&r).unwrap();
        let big_d = global_dimension(&r).unwrap();
        assert!(g.delta().approx_eq(&(&big_d * &big_d), &Precision::ten_to_minus(40)));
        for (v, res) in check_weight_condition(&g).iter().enumerate() {
            if r.dims().unwrap().is_integral() {
                assert!(res.is_zero(), "{name} vertex {v}: {res}");
            } else {
                assert!(res < &Precision::ten_to_minus(40), "{name} vertex {v}: {res}");
            }
        }
    }
}

#[test]
fn every_vertex_pair_is_connected() {
    for name in BUILTIN_RINGS {
        let r = ring(name);
        let g = build_weighted_graph(&r).unwrap();
        for v1 in 0..r.rank() {
            for v2 in 0..r.rank() {
                assert!(g.edge_count(v1, v2) >= 1, "{name} {v1}->{v2}");
            }
        }
    }
}

#[test]
fn builtin_labels() {
    for name in ["hilb_z2", "hilb_s3"] {
        let t = classify_type(&ring(name)).unwrap();
        assert_eq!((t.kind.clone(), t.is_exact()), (TypeKind::II1, true), "{name}");
    }
    let rep = classify_type(&ring("rep_s3")).unwrap();
    assert_eq!(rep.kind, TypeKind::IIILambda(Real::ratio(1, 2)));
    assert!(rep.is_exact());
    // ratio = λ^Z for every generator
    for g in &rep.generators {
        let z = g.z.unwrap();
        assert_eq!(Real::ratio(1, 2).powi(z), g.ratio);
    }
    let ising = classify_type(&ring("ising")).unwrap();
    assert_eq!(ising.lambda(), Some(&Real::ratio(1, 2)));
    let fib = classify_type(&ring("fib")).unwrap();
    let p = Precision::default();
    let expect = Real::from_int(2) / (Real::one() + Real::from_int(5).sqrt(p));
    assert!(fib.lambda().unwrap().approx_eq(&expect, &Precision::ten_to_minus(40)));
    assert!(!fib.is_exact());
}

#[test]
fn fibonacci_ratios_are_powers_of_phi() {
    let gens = ratio_generators(&ring("fib")).unwrap();
    let p = Precision::default();
    let phi = (Real::one() + Real::from_int(5).sqrt(p)) / Real::from_int(2);
    let tol = Precision::ten_to_minus(40);
    for g in gens {
        assert!((-2..=2).any(|k| g.ratio.approx_eq(&phi.powi(k), &tol)), "{}", g.ratio);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tambara_yamagami_is_type_iii_one_over_n(n in 2usize..7) {
        let r = tambara_yamagami(n).with_dimensions(Precision::default()).unwrap();
        let t = classify_type(&r).unwrap();
        prop_assert!(t.is_exact());
        prop_assert_eq!(t.kind.clone(), TypeKind::IIILambda(Real::ratio(1, n as i64)));
        let g = build_weighted_graph(&r).unwrap();
        prop_assert!(check_weight_condition(&g).iter().all(|x| x < &Precision::ten_to_minus(40)));
    }

    #[test]
    fn pointed_rings_are_type_ii1(n in 1usize..9) {
        let simples = (0..n).map(|i| format!("g{i}")).collect();
        let dual = (0..n).map(|i| (n - i) % n).collect();
        let entries: Vec<_> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b, (a + b) % n, 1))).collect();
        let r = FusionRing::new("zn", simples, dual, &entries).unwrap().with_dimensions(Precision::default()).unwrap();
        let t = classify_type(&r).unwrap();
        prop_assert_eq!(t.kind.clone(), TypeKind::II1);
        prop_assert!(t.is_exact());
    }

    #[test]
    fn lambda_is_strictly_inside_the_unit_interval(which in 0usize..5, n in 2usize..5) {
        let r = if which == 0 { tambara_yamagami(n).with_dimensions(Precision::default()).unwrap() } else { ring(BUILTIN_RINGS[which]) };
        let t = classify_type(&r).unwrap();
        if let Some(l) = t.lambda() {
            prop_assert!(l > &Real::zero() && l < &Real::one());
        }
    }
}
