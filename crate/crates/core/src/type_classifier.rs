//! Weighted graphs of fusion rings and the II_1 / III_λ / III_1 trichotomy
//! read off from the ratios `d_a d_b / d_c` of admissible triples.

use std::collections::BTreeMap;
use std::fmt;

use dashu::base::Abs;
use dashu::integer::IBig;
use dashu::rational::RBig;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion_ring::FusionRing;
use crate::number::{Precision, Real};

/// A group of parallel edges `source -> range` of equal weight.
#[derive(Clone, Debug)]
pub struct WeightedEdge {
    pub source: usize,
    pub range: usize,
    pub weight: Real,
    pub multiplicity: u64,
}

#[derive(Clone, Debug)]
pub struct WeightedGraph {
    vertex_weights: Vec<Real>,
    distinguished: usize,
    edges: Vec<WeightedEdge>,
    delta: Real,
}

impl WeightedGraph {
    /// Validates that every ordered vertex pair is joined by an edge.
    pub fn new(
        vertex_weights: Vec<Real>,
        distinguished: usize,
        edges: Vec<WeightedEdge>,
        delta: Real,
    ) -> Result<WeightedGraph> {
        let k = vertex_weights.len();
        if distinguished >= k {
            return Err(Error::invalid("distinguished vertex out of range"));
        }
        let mut seen = vec![vec![false; k]; k];
        for e in &edges {
            if e.source >= k || e.range >= k {
                return Err(Error::invalid(format!(
                    "edge {} -> {} out of range",
                    e.source, e.range
                )));
            }
            if e.multiplicity > 0 {
                seen[e.source][e.range] = true;
            }
        }
        for (v1, row) in seen.iter().enumerate() {
            if let Some(v2) = row.iter().position(|&s| !s) {
                return Err(Error::invalid(format!("no edge from vertex {v1} to vertex {v2}")));
            }
        }
        Ok(WeightedGraph { vertex_weights, distinguished, edges, delta })
    }

    pub fn vertex_weights(&self) -> &[Real] {
        &self.vertex_weights
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn delta(&self) -> &Real {
        &self.delta
    }

    /// Number of edges `v1 -> v2`, counted with multiplicity.
    pub fn edge_count(&self, v1: usize, v2: usize) -> u64 {
        self.edges
            .iter()
            .filter(|e| e.source == v1 && e.range == v2)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn set_edge_weight(&mut self, index: usize, weight: Real) {
        self.edges[index].weight = weight;
    }
}

/// Graph on `Irr(C)` with `w(c) = d_c`, one edge `c1 -> c2` for every
/// decomposition of `a ⊗ c1 ⊗ b` containing `c2`, weighted `d_a d_b`, and
/// `δ = (sum_c d_c^2)^2`.
pub fn build_weighted_graph(ring: &FusionRing) -> Result<WeightedGraph> {
    let dims = ring.dims()?;
    let k = ring.rank();
    let mut edges = Vec::new();
    for c1 in 0..k {
        for a in 0..k {
            for b in 0..k {
                let weight = dims.get(a) * dims.get(b);
                for c2 in 0..k {
                    let m: u64 = (0..k)
                        .map(|e| ring.n(a, c1, e) as u64 * ring.n(e, b, c2) as u64)
                        .sum();
                    if m > 0 {
                        edges.push(WeightedEdge { source: c1, range: c2, weight: weight.clone(), multiplicity: m });
                    }
                }
            }
        }
    }
    let d = crate::fusion_ring::global_dimension(ring)?;
    WeightedGraph::new(dims.values().to_vec(), 0, edges, &d * &d)
}

/// `|sum_{s(η)=v} w(η) w(r(η)) - δ w(v)|` per vertex.
pub fn check_weight_condition(graph: &WeightedGraph) -> Vec<Real> {
    let k = graph.vertex_weights.len();
    let mut sums = vec![Real::zero(); k];
    for e in &graph.edges {
        let term = &e.weight * &graph.vertex_weights[e.range] * Real::from_int(e.multiplicity as i64);
        sums[e.source] = &sums[e.source] + &term;
    }
    sums.into_iter()
        .enumerate()
        .map(|(v, s)| (s - &graph.delta * &graph.vertex_weights[v]).abs())
        .collect()
}

/// A distinct ratio `d_a d_b / d_c` and the admissible triples producing it.
#[derive(Clone, Debug)]
pub struct RatioGenerator {
    pub ratio: Real,
    /// Exact square of the ratio when the ring is weakly integral.
    pub square: Option<RBig>,
    pub triples: Vec<(usize, usize, usize)>,
}

/// Distinct values of `d_a d_b / d_c` over admissible triples, in increasing
/// order.
pub fn ratio_generators(ring: &FusionRing) -> Result<Vec<RatioGenerator>> {
    let dims = ring.dims()?;
    let p = dims.precision();
    let tol = p.epsilon();
    let mut out: Vec<RatioGenerator> = Vec::new();
    for (a, b, c) in ring.admissible_triples() {
        let (ratio, square) = match dims.surds() {
            Some(s) => {
                let sq = RBig::from_parts(
                    IBig::from(s[a].square()) * IBig::from(s[b].square()),
                    dashu::integer::UBig::from(s[c].square()),
                );
                (Real::from_rational(sq.clone()).sqrt(p), Some(sq))
            }
            None => (dims.get(a) * dims.get(b) / dims.get(c), None),
        };
        let found = out.iter_mut().find(|g| match (&g.square, &square) {
            (Some(x), Some(y)) => x == y,
            _ => g.ratio.approx_eq(&ratio, &tol),
        });
        match found {
            Some(g) => g.triples.push((a, b, c)),
            None => out.push(RatioGenerator { ratio, square, triples: vec![(a, b, c)] }),
        }
    }
    out.sort_by(|x, y| x.ratio.partial_cmp(&y.ratio).expect("ratios are ordered"));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeKind {
    II1,
    /// `λ` in `(0, 1)`.
    IIILambda(Real),
    III1,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certainty {
    Exact,
    Numeric { digits: u32, tolerance: Real },
}

/// One distinct ratio, with the exponent `Z` satisfying `ratio = λ^Z` for
/// III_λ results.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorEvidence {
    pub triple: (usize, usize, usize),
    pub ratio: Real,
    pub z: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeLabel {
    pub kind: TypeKind,
    pub certainty: Certainty,
    pub generators: Vec<GeneratorEvidence>,
}

impl TypeLabel {
    pub fn is_exact(&self) -> bool {
        self.certainty == Certainty::Exact
    }

    pub fn lambda(&self) -> Option<&Real> {
        match &self.kind {
            TypeKind::IIILambda(l) => Some(l),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self.kind {
            TypeKind::II1 => "II1",
            TypeKind::IIILambda(_) => "III_lambda",
            TypeKind::III1 => "III_1",
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exact = match &self.certainty {
            Certainty::Exact => "exact=true".to_string(),
            Certainty::Numeric { .. } => "exact=false(numeric)".to_string(),
        };
        match &self.kind {
            TypeKind::II1 => write!(f, "II_1 {exact}"),
            TypeKind::III1 => write!(f, "III_1 {exact}"),
            TypeKind::IIILambda(l) => {
                let shown = if l.is_exact() {
                    l.to_decimal_string(10)
                } else {
                    format!("{}…", l.to_decimal_string(10))
                };
                write!(f, "III_lambda lambda={shown} {exact}")
            }
        }
    }
}

#[derive(Serialize)]
pub struct TypeReport {
    pub ring: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub lambda: Option<String>,
    pub exact: bool,
    pub generators: Vec<GeneratorReport>,
}

#[derive(Serialize)]
pub struct GeneratorReport {
    pub triple: [usize; 3],
    pub ratio: String,
    #[serde(rename = "Z")]
    pub z: Option<i64>,
}

pub fn type_report(ring: &FusionRing, label: &TypeLabel, digits: u32) -> TypeReport {
    TypeReport {
        ring: ring.name().to_string(),
        kind: label.type_name().to_string(),
        lambda: label.lambda().map(|l| l.to_decimal_string(digits)),
        exact: label.is_exact(),
        generators: label
            .generators
            .iter()
            .map(|g| GeneratorReport {
                triple: [g.triple.0, g.triple.1, g.triple.2],
                ratio: g.ratio.to_decimal_string(digits),
                z: g.z,
            })
            .collect(),
    }
}

/// Classifies the boundary factor type of the ring's canonical state.
///
/// Pointed rings are II_1. For weakly integral rings the squared ratios are
/// rationals, and the discreteness of the generated group is decided exactly
/// by the rank of their prime-exponent lattice. Otherwise logarithms of the
/// ratios are tested for commensurability with continued fractions; such
/// results are labeled numeric.
pub fn classify_type(ring: &FusionRing) -> Result<TypeLabel> {
    let gens = ratio_generators(ring)?;
    let plain = |gens: &[RatioGenerator]| -> Vec<GeneratorEvidence> {
        gens.iter()
            .map(|g| GeneratorEvidence { triple: g.triples[0], ratio: g.ratio.clone(), z: None })
            .collect()
    };
    if ring.is_pointed() {
        return Ok(TypeLabel { kind: TypeKind::II1, certainty: Certainty::Exact, generators: plain(&gens) });
    }
    let p = ring.dims()?.precision();
    if gens.iter().all(|g| g.square.is_some()) {
        let exact = classify_exact(&gens, p);
        if !ring.dims()?.is_integral() {
            // Independent confirmation through the logarithmic route.
            let numeric = classify_numeric(&gens, p)?;
            if numeric.type_name() != exact.type_name()
                || !same_lambda(numeric.lambda(), exact.lambda(), &p.epsilon())
            {
                return Err(Error::Inconclusive(format!(
                    "exact and numeric classification disagree for {}",
                    ring.name()
                )));
            }
        }
        return Ok(exact);
    }
    classify_numeric(&gens, p)
}

fn same_lambda(a: Option<&Real>, b: Option<&Real>, tol: &Real) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.approx_eq(y, tol),
        (None, None) => true,
        _ => false,
    }
}

/// Prime exponents of a positive rational.
pub fn prime_exponents(r: &RBig) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    let num: u128 = u128::try_from(r.numerator().clone()).expect("ratio numerator fits in 128 bits");
    let den: u128 = r.denominator().clone().try_into().expect("ratio denominator fits in 128 bits");
    for (n, sign) in [(num, 1i64), (den, -1i64)] {
        let mut rest = n;
        let mut q = 2u128;
        while q * q <= rest {
            while rest % q == 0 {
                rest /= q;
                *out.entry(q as u64).or_insert(0) += sign;
            }
            q += 1;
        }
        if rest > 1 {
            *out.entry(rest as u64).or_insert(0) += sign;
        }
    }
    out.retain(|_, e| *e != 0);
    out
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for i in rank + 1..m.len() {
            if m[i][col] != 0 {
                let (a, b) = (m[rank][col], m[i][col]);
                let g = gcd_i128(a, b);
                for j in 0..cols {
                    m[i][j] = m[i][j] * (a / g) - m[rank][j] * (b / g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_i128(a as i128, b as i128) as i64
}

fn classify_exact(gens: &[RatioGenerator], p: Precision) -> TypeLabel {
    let factored: Vec<BTreeMap<u64, i64>> =
        gens.iter().map(|g| prime_exponents(g.square.as_ref().expect("checked"))).collect();
    let primes: Vec<u64> = {
        let mut all: Vec<u64> = factored.iter().flat_map(|f| f.keys().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    let rows: Vec<Vec<i64>> = factored
        .iter()
        .map(|f| primes.iter().map(|q| f.get(q).copied().unwrap_or(0)).collect())
        .collect();
    let evidence = |z: Option<Vec<i64>>| -> Vec<GeneratorEvidence> {
        gens.iter()
            .enumerate()
            .map(|(i, g)| GeneratorEvidence {
                triple: g.triples[0],
                ratio: g.ratio.clone(),
                z: z.as_ref().map(|z| z[i]),
            })
            .collect()
    };
    match integer_rank(&rows) {
        0 => TypeLabel { kind: TypeKind::II1, certainty: Certainty::Exact, generators: evidence(None) },
        1 => {
            let first = rows.iter().find(|r| r.iter().any(|&x| x != 0)).expect("rank one");
            let g0 = first.iter().fold(0, |acc, &x| gcd_i64(acc, x));
            let mut prim: Vec<i64> = first.iter().map(|&x| x / g0).collect();
            // Orient so that the primitive squared generator exceeds 1.
            if squared_value(&primes, &prim, 1) < RBig::ONE {
                prim.iter_mut().for_each(|x| *x = -*x);
            }
            let pivot = prim.iter().position(|&x| x != 0).expect("nonzero");
            let k: Vec<i64> = rows.iter().map(|r| r[pivot] / prim[pivot]).collect();
            let kk = k.iter().fold(0, |acc, &x| gcd_i64(acc, x));
            let g_sq = squared_value(&primes, &prim, kk);
            let generator = Real::from_rational(g_sq).sqrt(p);
            let lambda = generator.recip();
            // ratio = generator^{k/kk} = lambda^{-k/kk}
            let z: Vec<i64> = k.iter().map(|&x| -(x / kk)).collect();
            TypeLabel {
                kind: TypeKind::IIILambda(lambda),
                certainty: Certainty::Exact,
                generators: evidence(Some(z)),
            }
        }
        _ => TypeLabel { kind: TypeKind::III1, certainty: Certainty::Exact, generators: evidence(None) },
    }
}

fn squared_value(primes: &[u64], exps: &[i64], scale: i64) -> RBig {
    primes.iter().zip(exps).fold(RBig::ONE, |acc, (&q, &e)| {
        let base = RBig::from(q);
        let e = e * scale;
        if e >= 0 {
            acc * base.pow(e as usize)
        } else {
            acc / base.pow((-e) as usize)
        }
    })
}

/// Best rational approximation `p/q` of `x` by continued fractions with
/// `q <= max_q`, returned with its error.
pub fn rational_approximation(x: &Real, max_q: &IBig) -> (IBig, IBig, Real) {
    let (mut p0, mut q0) = (IBig::ONE, IBig::ZERO);
    let (mut p1, mut q1) = (x.floor(), IBig::ONE);
    let mut rest = x - &Real::from_ibig(p1.clone());
    let mut best = (p1.clone(), q1.clone());
    for _ in 0..400 {
        if rest.is_zero() {
            break;
        }
        let inv = rest.recip();
        let a = inv.floor();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > max_q {
            break;
        }
        rest = inv - Real::from_ibig(a);
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        best = (p1.clone(), q1.clone());
        let err = (x - &(Real::from_ibig(best.0.clone()) / Real::from_ibig(best.1.clone()))).abs();
        if err.is_zero() {
            break;
        }
    }
    let err = (x - &(Real::from_ibig(best.0.clone()) / Real::from_ibig(best.1.clone()))).abs();
    (best.0, best.1, err)
}

fn classify_numeric(gens: &[RatioGenerator], p: Precision) -> Result<TypeLabel> {
    let digits = p.digits();
    let tol = Precision::ten_to_minus(digits / 2);
    let band = Precision::ten_to_minus(3 * digits / 10);
    let max_q = IBig::from(10u8).pow((digits / 10).max(1) as usize);
    let unit_tol = p.epsilon();
    let logs: Vec<Real> = gens.iter().map(|g| g.ratio.ln(p)).collect();
    let reference = logs
        .iter()
        .filter(|l| l.abs() > unit_tol)
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("ordered"))
        .cloned();
    let certainty = Certainty::Numeric { digits, tolerance: tol.clone() };
    let Some(reference) = reference else {
        return Ok(TypeLabel {
            kind: TypeKind::II1,
            certainty,
            generators: plain_evidence(gens, None),
        });
    };
    let reference = reference.abs();
    let mut fractions = Vec::with_capacity(logs.len());
    for (g, l) in gens.iter().zip(&logs) {
        let x = l / &reference;
        let (num, den, err) = rational_approximation(&x, &max_q);
        if err < tol {
            fractions.push((num, den));
        } else if err < band {
            return Err(Error::Inconclusive(format!(
                "log ratio for triple {:?} is within {} of a rational but not within {}; increase precision",
                g.triples[0],
                band.to_decimal_string(3),
                tol.to_decimal_string(3)
            )));
        } else {
            return Ok(TypeLabel { kind: TypeKind::III1, certainty, generators: plain_evidence(gens, None) });
        }
    }
    let lcm = fractions.iter().fold(IBig::ONE, |acc, (_, q)| {
        let g = gcd_big(&acc, q);
        &acc * q / g
    });
    let coeffs: Vec<IBig> = fractions.iter().map(|(n, q)| n * &lcm / q).collect();
    let g = coeffs.iter().fold(IBig::ZERO, |acc, c| gcd_big(&acc, c));
    // log generator = g * reference / lcm; ratio = generator^{c/g}.
    let log_gen = Real::from_ibig(g.clone()) * &reference / Real::from_ibig(lcm);
    let lambda = (-log_gen).exp(p);
    let z: Vec<i64> = coeffs
        .iter()
        .map(|c| {
            let q: IBig = c / &g;
            i64::try_from(-q).map_err(|_| Error::Inconclusive("exponent overflow".to_string()))
        })
        .collect::<Result<_>>()?;
    Ok(TypeLabel {
        kind: TypeKind::IIILambda(lambda),
        certainty,
        generators: plain_evidence(gens, Some(z)),
    })
}

fn plain_evidence(gens: &[RatioGenerator], z: Option<Vec<i64>>) -> Vec<GeneratorEvidence> {
    gens.iter()
        .enumerate()
        .map(|(i, g)| GeneratorEvidence {
            triple: g.triples[0],
            ratio: g.ratio.clone(),
            z: z.as_ref().map(|z| z[i]),
        })
        .collect()
}

fn gcd_big(a: &IBig, b: &IBig) -> IBig {
    let (mut a, mut b) = (a.clone().abs(), b.clone().abs());
    while b != IBig::ZERO {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(name: &str) -> FusionRing {
        FusionRing::builtin(name).unwrap().with_dimensions(Precision::default()).unwrap()
    }

    #[test]
    fn weighted_graph_of_hilb_z2() {
        let g = build_weighted_graph(&ring("hilb_z2")).unwrap();
        for v1 in 0..2 {
            for v2 in 0..2 {
                assert_eq!(g.edge_count(v1, v2), 2);
            }
        }
        assert_eq!(g.delta(), &Real::from_int(4));
        assert!(check_weight_condition(&g).iter().all(Real::is_zero));
    }

    #[test]
    fn perturbed_edge_weight_shows_up_at_its_source() {
        let mut g = build_weighted_graph(&ring("rep_s3")).unwrap();
        let idx = g.edges().iter().position(|e| e.source == 2).unwrap();
        let w = &g.edges()[idx].weight + &Real::ratio(1, 10);
        g.set_edge_weight(idx, w);
        let r = check_weight_condition(&g);
        assert!(r[0].is_zero() && r[1].is_zero() && !r[2].is_zero());
    }

    #[test]
    fn graphs_missing_an_edge_are_rejected() {
        let w = vec![Real::one(), Real::one()];
        let e = vec![
            WeightedEdge { source: 0, range: 0, weight: Real::one(), multiplicity: 1 },
            WeightedEdge { source: 0, range: 1, weight: Real::one(), multiplicity: 1 },
            WeightedEdge { source: 1, range: 1, weight: Real::one(), multiplicity: 1 },
        ];
        assert!(WeightedGraph::new(w, 0, e, Real::from_int(2)).is_err());
    }

    #[test]
    fn rep_s3_ratios() {
        let gens = ratio_generators(&ring("rep_s3")).unwrap();
        let vals: Vec<Real> = gens.iter().map(|g| g.ratio.clone()).collect();
        assert_eq!(vals, vec![Real::from_int(1), Real::from_int(2), Real::from_int(4)]);
    }

    #[test]
    fn continued_fraction_finds_simple_ratios() {
        let x = Real::ratio(355, 113);
        let (p, q, e) = rational_approximation(&x, &IBig::from(1000));
        assert_eq!((p, q), (IBig::from(355), IBig::from(113)));
        assert!(e.is_zero());
    }

    #[test]
    fn prime_exponent_examples() {
        let e = prime_exponents(&RBig::from_parts(IBig::from(12), 5u8.into()));
        assert_eq!(e, BTreeMap::from([(2, 2), (3, 1), (5, -1)]));
        assert_eq!(integer_rank(&[vec![2, 0], vec![4, 0]]), 1);
        assert_eq!(integer_rank(&[vec![1, 0], vec![0, 1]]), 2);
    }

    #[test]
    fn builtin_types() {
        assert_eq!(classify_type(&ring("hilb_z2")).unwrap().kind, TypeKind::II1);
        assert_eq!(classify_type(&ring("hilb_s3")).unwrap().kind, TypeKind::II1);
        let rep = classify_type(&ring("rep_s3")).unwrap();
        assert_eq!(rep.kind, TypeKind::IIILambda(Real::ratio(1, 2)));
        assert!(rep.is_exact());
        let ising = classify_type(&ring("ising")).unwrap();
        assert_eq!(ising.kind, TypeKind::IIILambda(Real::ratio(1, 2)));
        let fib = classify_type(&ring("fib")).unwrap();
        assert!(!fib.is_exact());
        assert_eq!(fib.to_string(), "III_lambda lambda=0.6180339887… exact=false(numeric)");
    }
}
