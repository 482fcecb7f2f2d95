use std::sync::Arc;

use ltob_core::fusion_ring::{FusionRing, BUILTIN_RINGS};
use ltob_core::number::{Complex, Precision, Real};
use ltob_core::path_net::{PathNet, PathPairOperator};
use proptest::prelude::*;

fn net(name: &str) -> PathNet {
    let ring = FusionRing::builtin(name).unwrap().with_dimensions(Precision::default()).unwrap();
    PathNet::regular(Arc::new(ring)).unwrap()
}

fn tol() -> Real {
    Precision::ten_to_minus(40)
}

/// Path weights grouped by range, enumerated from the fusion rules alone.
fn weights_by_range(ring: &FusionRing, n: usize) -> Vec<Vec<Real>> {
    let dims = ring.dims().unwrap();
    let k = ring.rank();
    let mut level: Vec<Vec<Real>> = vec![Vec::new(); k];
    level[0].push(Real::one());
    for _ in 0..n {
        let mut next: Vec<Vec<Real>> = vec![Vec::new(); k];
        for (v, ws) in level.iter().enumerate() {
            for w in ws {
                for x in 0..k {
                    for t in 0..k {
                        for _ in 0..ring.n(v, x, t) {
                            next[t].push(w * dims.get(x));
                        }
                    }
                }
            }
        }
        level = next;
    }
    level
}

/// `max |ψ(E_ξη E_ηξ) - ψ(E_ηξ E_ξη)| = D^{-n} max_r d_r (max w - min w)`.
fn traciality_oracle(ring: &FusionRing, n: usize) -> Real {
    let dims = ring.dims().unwrap();
    let big_d = (0..ring.rank()).fold(Real::zero(), |acc, a| acc + dims.square(a));
    let mut best = Real::zero();
    for (r, ws) in weights_by_range(ring, n).iter().enumerate() {
        if ws.is_empty() {
            continue;
        }
        let hi = ws.iter().fold(ws[0].clone(), |m, w| if w > &m { w.clone() } else { m });
        let lo = ws.iter().fold(ws[0].clone(), |m, w| if w < &m { w.clone() } else { m });
        let d = dims.get(r) * &(hi - lo);
        if d > best {
            best = d;
        }
    }
    best * big_d.powi(-(n as i64))
}

#[test]
fn path_counts_match_the_fusion_rules() {
    for name in BUILTIN_RINGS {
        let pn = net(name);
        let ring = pn.graph().ring();
        for n in 0..=3 {
            let counts: Vec<u128> = weights_by_range(ring, n).iter().map(|w| w.len() as u128).collect();
            let (mult, total) = pn.level_dims(n).unwrap();
            assert_eq!(mult, counts, "{name} level {n}");
            assert_eq!(total, counts.iter().map(|c| c * c).sum::<u128>());
            assert_eq!(pn.enumerate_paths(n).unwrap().len() as u128, counts.iter().sum::<u128>());
        }
    }
}

#[test]
fn states_are_normalized() {
    for name in BUILTIN_RINGS {
        let pn = net(name);
        for n in 0..=3 {
            let id = pn.identity(n).unwrap();
            assert!(pn.canonical_state(&id).unwrap().re.approx_eq(&Real::one(), &tol()), "{name} {n}");
            assert!(pn.markov_trace(&id).unwrap().re.approx_eq(&Real::one(), &tol()), "{name} {n}");
            assert_eq!(pn.unit_state(&id).unwrap(), Complex::one());
        }
    }
}

#[test]
fn closed_form_equals_label_sum_up_to_level_three() {
    for name in BUILTIN_RINGS {
        let pn = net(name);
        for n in 0..=3 {
            for (k, b) in pn.basis(n).unwrap() {
                let e = pn.matrix_unit(n, k, b).unwrap();
                let closed = pn.canonical_state(&e).unwrap();
                let labels = pn.canonical_state_by_labels(&e).unwrap();
                assert!((&closed - &labels).abs(Precision::default()) < tol(), "{name} level {n} E_{k},{b}");
            }
        }
    }
}

#[test]
fn kms_at_beta_one() {
    for name in ["fib", "rep_s3", "hilb_z2"] {
        let d = net(name).kms_sweep(2, &Real::one()).unwrap();
        assert!(d < tol(), "{name}: {d}");
    }
    // the wrong inverse temperature is visible
    assert!(net("fib").kms_sweep(2, &Real::from_int(-1)).unwrap() > Real::ratio(1, 100));
}

#[test]
fn traciality_defect_agrees_with_the_weight_oracle() {
    for name in BUILTIN_RINGS {
        let pn = net(name);
        for n in 1..=2 {
            let got = pn.traciality_defect(n).unwrap();
            let expect = traciality_oracle(pn.graph().ring(), n);
            assert!(got.approx_eq(&expect, &tol()), "{name} level {n}: {got} vs {expect}");
        }
    }
    assert!(net("ising").traciality_defect(2).unwrap().approx_eq(&Real::ratio(1, 16), &tol()));
    assert!(net("hilb_s3").traciality_defect(2).unwrap().is_zero());
}

#[test]
fn regular_q_state_needs_a_pointed_ring() {
    let pn = net("hilb_z2");
    assert_eq!(pn.regular_q_state(&pn.identity(2).unwrap()).unwrap(), Complex::one());
    let fib = net("fib");
    assert!(fib.regular_q_state(&fib.identity(1).unwrap()).is_err());
}

#[test]
fn operator_json_round_trip() {
    let pn = net("rep_s3");
    let mut op = PathPairOperator::zero(2);
    for (i, (k, b)) in pn.basis(2).unwrap().into_iter().enumerate().step_by(7) {
        op.add_term(k, b, Complex::new(Real::ratio(i as i64, 3), Real::from_int(-1)));
    }
    let text = pn.operator_to_json(&op).unwrap();
    let back = pn.operator_from_json(&text).unwrap();
    assert!((&back.sub(&op).unwrap()).terms().values().all(|c| c.abs(Precision::default()) < tol()));
    assert!(pn.operator_from_json("{\"level\": 1, \"terms\": [{\"ket\": [[0, 9, 0, 0]], \"bra\": [[0, 9, 0, 0]], \"re\": 1, \"im\": 0}]}").is_err());
}

fn random_operator(pn: &PathNet, n: usize, picks: &[(usize, i64, i64)]) -> PathPairOperator {
    let basis = pn.basis(n).unwrap();
    let mut op = PathPairOperator::zero(n);
    for &(i, re, im) in picks {
        let (k, b) = basis[i % basis.len()];
        op.add_term(k, b, Complex::new(Real::from_int(re), Real::from_int(im)));
    }
    op
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inclusion_preserves_states(which in 0usize..5, n in 0usize..3,
                                  picks in prop::collection::vec((0usize..10_000, -5i64..6, -5i64..6), 1..8)) {
        let pn = net(BUILTIN_RINGS[which]);
        let x = random_operator(&pn, n, &picks);
        let up = pn.include(&x).unwrap();
        let p = Precision::default();
        prop_assert!((&pn.canonical_state(&x).unwrap() - &pn.canonical_state(&up).unwrap()).abs(p) < tol());
        prop_assert!((&pn.markov_trace(&x).unwrap() - &pn.markov_trace(&up).unwrap()).abs(p) < tol());
    }

    #[test]
    fn canonical_state_is_positive(which in 0usize..5, n in 0usize..3,
                                   picks in prop::collection::vec((0usize..10_000, -5i64..6, -5i64..6), 1..8)) {
        let pn = net(BUILTIN_RINGS[which]);
        let x = random_operator(&pn, n, &picks);
        let v = pn.canonical_state(&x.adjoint().multiply(&x).unwrap()).unwrap();
        prop_assert!(v.re >= -tol());
        prop_assert!(v.im.abs() < tol());
    }

    #[test]
    fn markov_trace_is_tracial(which in 0usize..5, n in 1usize..3,
                               a in prop::collection::vec((0usize..10_000, -3i64..4, -3i64..4), 1..6),
                               b in prop::collection::vec((0usize..10_000, -3i64..4, -3i64..4), 1..6)) {
        let pn = net(BUILTIN_RINGS[which]);
        let (x, y) = (random_operator(&pn, n, &a), random_operator(&pn, n, &b));
        let xy = pn.markov_trace(&x.multiply(&y).unwrap()).unwrap();
        let yx = pn.markov_trace(&y.multiply(&x).unwrap()).unwrap();
        prop_assert!((&xy - &yx).abs(Precision::default()) < tol());
    }

    #[test]
    fn multiplication_is_associative(which in 0usize..5,
                                     a in prop::collection::vec((0usize..10_000, -3i64..4, -3i64..4), 1..5),
                                     b in prop::collection::vec((0usize..10_000, -3i64..4, -3i64..4), 1..5),
                                     c in prop::collection::vec((0usize..10_000, -3i64..4, -3i64..4), 1..5)) {
        let pn = net(BUILTIN_RINGS[which]);
        let (x, y, z) = (random_operator(&pn, 2, &a), random_operator(&pn, 2, &b), random_operator(&pn, 2, &c));
        let l = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let r = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        prop_assert!(l.sub(&r).unwrap().terms().values().all(|v| v.abs(Precision::default()) < tol()));
    }
}
