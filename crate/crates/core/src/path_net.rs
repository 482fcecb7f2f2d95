//! The fusion-categorical boundary net `F(I) = End(X^n)` realised on labeled
//! paths in the fusion graph of `X`, with its states and modular flow.
//!
//! Paths start at the unit vertex. A path pair `(ξ, η)` with common range
//! gives a matrix unit `E_ξη`; level `n` is the span of these units.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion_ring::FusionRing;
use crate::number::{Complex, Precision, Real};

/// Level caps used when none is given.
pub const DEFAULT_POINTED_CAP: usize = 12;
pub const DEFAULT_CAP: usize = 8;
/// Hard limit on the number of stored paths at a single level.
pub const MAX_PATHS_PER_LEVEL: usize = 2_000_000;

/// One edge of the fusion graph: `source ⊗ X[label] ⊇ target` in slot `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    /// Position in the multiset `X`.
    pub label: usize,
    pub slot: u32,
}

/// Fusion graph of a generating object `X` (a multiset of simples).
#[derive(Debug)]
pub struct FusionGraph {
    ring: Arc<FusionRing>,
    x: Vec<usize>,
    /// Outgoing edges per vertex, sorted by (target, label, slot).
    out: Vec<Vec<Edge>>,
    label_dims: Vec<Real>,
    /// `D_X = sum_{x in X} d_x^2`.
    big_d: Real,
    /// `d_X = sum_{x in X} d_x`.
    small_d: Real,
    precision: Precision,
}

impl FusionGraph {
    /// Graph for `X = ⊕_c c`, one copy of every simple.
    pub fn regular(ring: Arc<FusionRing>) -> Result<FusionGraph> {
        let x = (0..ring.rank()).collect();
        FusionGraph::new(ring, x)
    }

    /// Graph for the multiset `x`. The ring must have its dimensions computed.
    pub fn new(ring: Arc<FusionRing>, x: Vec<usize>) -> Result<FusionGraph> {
        let dims = ring.dims()?;
        if x.is_empty() {
            return Err(Error::invalid("generating object X is empty"));
        }
        if let Some(&bad) = x.iter().find(|&&a| a >= ring.rank()) {
            return Err(Error::invalid(format!("X contains unknown simple index {bad}")));
        }
        let k = ring.rank();
        let mut out = vec![Vec::new(); k];
        for (source, edges) in out.iter_mut().enumerate() {
            for target in 0..k {
                for (label, &xa) in x.iter().enumerate() {
                    for slot in 0..ring.n(source, xa, target) {
                        edges.push(Edge { source, target, label, slot });
                    }
                }
            }
        }
        let label_dims: Vec<Real> = x.iter().map(|&a| dims.get(a).clone()).collect();
        let big_d = x.iter().fold(Real::zero(), |acc, &a| acc + dims.square(a));
        let small_d = label_dims.iter().fold(Real::zero(), |acc, d| acc + d);
        let precision = dims.precision();
        Ok(FusionGraph { ring, x, out, label_dims, big_d, small_d, precision })
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn out_edges(&self, v: usize) -> &[Edge] {
        &self.out[v]
    }

    /// `A[c2][c1]` = number of edges `c1 -> c2`.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let k = self.ring.rank();
        let mut a = vec![vec![0u64; k]; k];
        for edges in &self.out {
            for e in edges {
                a[e.target][e.source] += 1;
            }
        }
        a
    }

    /// Weight of an edge, `d_{X[label]}`.
    pub fn edge_weight(&self, e: &Edge) -> &Real {
        &self.label_dims[e.label]
    }

    pub fn global_weight(&self) -> &Real {
        &self.big_d
    }

    pub fn markov_weight(&self) -> &Real {
        &self.small_d
    }

    fn vertex_dim(&self, v: usize) -> &Real {
        self.ring.dims().expect("checked at construction").get(v)
    }
}

/// A path from the unit vertex.
#[derive(Clone, Debug)]
pub struct LabeledPath {
    pub edges: Vec<Edge>,
    pub range: usize,
    /// `w(ξ) = prod_i d_{label(ξ_i)}`.
    pub weight: Real,
}

impl LabeledPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edge labels as positions in `X`.
    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().map(|e| e.label)
    }
}

#[derive(Debug)]
struct Level {
    paths: Vec<LabeledPath>,
    /// Children of path `i` in the next level are `children[i]..children[i+1]`.
    children: OnceLock<Vec<usize>>,
    index: HashMap<Vec<Edge>, usize>,
}

/// Fusion graph plus the lazily built path levels.
#[derive(Debug)]
pub struct PathNet {
    graph: FusionGraph,
    cap: usize,
    levels: Vec<OnceLock<std::result::Result<Level, Error>>>,
}

/// Sparse combination of matrix units `E_ξη` at one level; keys are path
/// indices `(ket, bra)` in the level's enumeration order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PathPairOperator {
    level: usize,
    terms: BTreeMap<(usize, usize), Complex>,
}

impl PathPairOperator {
    pub fn zero(level: usize) -> PathPairOperator {
        PathPairOperator { level, terms: BTreeMap::new() }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), Complex> {
        &self.terms
    }

    pub fn coefficient(&self, ket: usize, bra: usize) -> Complex {
        self.terms.get(&(ket, bra)).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c E_{ket,bra}`; the pair is not checked against the paths.
    pub fn add_term(&mut self, ket: usize, bra: usize, c: Complex) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((ket, bra)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Complex) -> PathPairOperator {
        let mut out = PathPairOperator::zero(self.level);
        for (&(k, b), v) in &self.terms {
            out.add_term(k, b, v * c);
        }
        out
    }

    pub fn add(&self, other: &PathPairOperator) -> Result<PathPairOperator> {
        same_level(self, other)?;
        let mut out = self.clone();
        for (&(k, b), v) in &other.terms {
            out.add_term(k, b, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PathPairOperator) -> Result<PathPairOperator> {
        self.add(&other.scale(&-Complex::one()))
    }

    /// Matrix-unit product `E_ξη E_ζκ = δ_ηζ E_ξκ`, extended bilinearly.
    pub fn multiply(&self, other: &PathPairOperator) -> Result<PathPairOperator> {
        same_level(self, other)?;
        let mut by_ket: HashMap<usize, Vec<(usize, &Complex)>> = HashMap::new();
        for (&(k, b), v) in &other.terms {
            by_ket.entry(k).or_default().push((b, v));
        }
        let mut out = PathPairOperator::zero(self.level);
        for (&(k, b), v) in &self.terms {
            if let Some(row) = by_ket.get(&b) {
                for &(bb, w) in row {
                    out.add_term(k, bb, v * w);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> PathPairOperator {
        let mut out = PathPairOperator::zero(self.level);
        for (&(k, b), v) in &self.terms {
            out.add_term(b, k, v.conj());
        }
        out
    }
}

fn same_level(x: &PathPairOperator, y: &PathPairOperator) -> Result<()> {
    if x.level != y.level {
        return Err(Error::invalid(format!(
            "level mismatch: {} vs {}",
            x.level, y.level
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDoc {
    level: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    ket: Vec<[usize; 4]>,
    bra: Vec<[usize; 4]>,
    re: String,
    im: String,
}

impl PathNet {
    pub fn new(graph: FusionGraph) -> PathNet {
        let cap = if graph.ring().is_pointed() { DEFAULT_POINTED_CAP } else { DEFAULT_CAP };
        PathNet::with_cap(graph, cap)
    }

    pub fn with_cap(graph: FusionGraph, cap: usize) -> PathNet {
        let levels = (0..=cap + 1).map(|_| OnceLock::new()).collect();
        PathNet { graph, cap, levels }
    }

    /// Regular net (`X` = all simples) of a ring with dimensions.
    pub fn regular(ring: Arc<FusionRing>) -> Result<PathNet> {
        Ok(PathNet::new(FusionGraph::regular(ring)?))
    }

    pub fn graph(&self) -> &FusionGraph {
        &self.graph
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check_cap(&self, n: usize) -> Result<()> {
        if n > self.cap {
            return Err(Error::Resource(format!("level {n} exceeds the cap {}", self.cap)));
        }
        Ok(())
    }

    fn level(&self, n: usize) -> Result<&Level> {
        self.check_cap(n)?;
        self.level_unchecked(n)
    }

    // Level `cap + 1` is only built to support `include` at the cap.
    fn level_unchecked(&self, n: usize) -> Result<&Level> {
        let cell = &self.levels[n];
        let built = cell.get_or_init(|| {
            let paths = if n == 0 {
                vec![LabeledPath { edges: Vec::new(), range: 0, weight: Real::one() }]
            } else {
                let prev = self.level_unchecked(n - 1)?;
                let mut next = Vec::new();
                for p in &prev.paths {
                    for e in self.graph.out_edges(p.range) {
                        if next.len() >= MAX_PATHS_PER_LEVEL {
                            return Err(Error::Resource(format!(
                                "level {n} has more than {MAX_PATHS_PER_LEVEL} paths"
                            )));
                        }
                        let mut edges = p.edges.clone();
                        edges.push(*e);
                        next.push(LabeledPath {
                            edges,
                            range: e.target,
                            weight: &p.weight * self.graph.edge_weight(e),
                        });
                    }
                }
                next
            };
            let index = paths.iter().enumerate().map(|(i, p)| (p.edges.clone(), i)).collect();
            Ok(Level { paths, children: OnceLock::new(), index })
        });
        built.as_ref().map_err(Clone::clone)
    }

    fn children(&self, n: usize) -> Result<&[usize]> {
        let level = self.level_unchecked(n)?;
        self.level_unchecked(n + 1)?;
        Ok(level.children.get_or_init(|| {
            let mut offsets = Vec::with_capacity(level.paths.len() + 1);
            let mut at = 0;
            offsets.push(0);
            for p in &level.paths {
                at += self.graph.out_edges(p.range).len();
                offsets.push(at);
            }
            offsets
        }))
    }

    /// All paths of length `n` from the unit, in lexicographic order of
    /// (target, label, slot) at each step.
    pub fn enumerate_paths(&self, n: usize) -> Result<&[LabeledPath]> {
        Ok(&self.level(n)?.paths)
    }

    pub fn path(&self, n: usize, i: usize) -> Result<&LabeledPath> {
        self.level(n)?
            .paths
            .get(i)
            .ok_or_else(|| Error::invalid(format!("no path {i} at level {n}")))
    }

    /// Index of the path with the given edges.
    pub fn path_index(&self, edges: &[Edge]) -> Result<usize> {
        let level = self.level(edges.len())?;
        level
            .index
            .get(edges)
            .copied()
            .ok_or_else(|| Error::invalid("edge sequence is not a path from the unit"))
    }

    /// Index of the first path whose labels (positions in `X`) are `labels`.
    pub fn path_by_labels(&self, labels: &[usize]) -> Result<Vec<usize>> {
        let paths = self.enumerate_paths(labels.len())?;
        Ok(paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.labels().eq(labels.iter().copied()))
            .map(|(i, _)| i)
            .collect())
    }

    /// Multiplicity of each vertex among level-`n` path ranges (`A^n e_1`)
    /// and the algebra dimension `sum_v mult_v^2`.
    pub fn level_dims(&self, n: usize) -> Result<(Vec<u128>, u128)> {
        self.check_cap(n)?;
        let a = self.graph.adjacency();
        let k = a.len();
        let mut v = vec![0u128; k];
        v[0] = 1;
        for _ in 0..n {
            let mut w = vec![0u128; k];
            for (c2, row) in a.iter().enumerate() {
                for c1 in 0..k {
                    w[c2] = w[c2]
                        .checked_add((row[c1] as u128).checked_mul(v[c1]).ok_or_else(overflow)?)
                        .ok_or_else(overflow)?;
                }
            }
            v = w;
        }
        let total = v.iter().try_fold(0u128, |acc, m| {
            m.checked_mul(*m).and_then(|s| acc.checked_add(s)).ok_or_else(overflow)
        })?;
        Ok((v, total))
    }

    /// `E_ξη` for path indices at level `n`; errors when ranges differ.
    pub fn matrix_unit(&self, n: usize, ket: usize, bra: usize) -> Result<PathPairOperator> {
        let (p, q) = (self.path(n, ket)?, self.path(n, bra)?);
        if p.range != q.range {
            return Err(Error::invalid(format!(
                "paths {ket} and {bra} end at different vertices"
            )));
        }
        let mut op = PathPairOperator::zero(n);
        op.add_term(ket, bra, Complex::one());
        Ok(op)
    }

    /// Every matrix unit at level `n`, ordered by (ket, bra).
    pub fn basis(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        let paths = self.enumerate_paths(n)?;
        let mut by_range: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, p) in paths.iter().enumerate() {
            by_range.entry(p.range).or_default().push(i);
        }
        let mut out = Vec::new();
        for (i, p) in paths.iter().enumerate() {
            for &j in &by_range[&p.range] {
                out.push((i, j));
            }
        }
        Ok(out)
    }

    pub fn identity(&self, n: usize) -> Result<PathPairOperator> {
        let paths = self.enumerate_paths(n)?;
        let mut op = PathPairOperator::zero(n);
        for i in 0..paths.len() {
            op.add_term(i, i, Complex::one());
        }
        Ok(op)
    }

    /// Checks that every term of `op` is a valid matrix unit.
    pub fn validate(&self, op: &PathPairOperator) -> Result<()> {
        let paths = self.enumerate_paths(op.level)?;
        for &(k, b) in op.terms.keys() {
            match (paths.get(k), paths.get(b)) {
                (Some(p), Some(q)) if p.range == q.range => {}
                _ => {
                    return Err(Error::invalid(format!(
                        "term ({k}, {b}) is not a matrix unit at level {}",
                        op.level
                    )))
                }
            }
        }
        Ok(())
    }

    /// Right inclusion `E_ξη ↦ sum_e E_{ξe, ηe}`.
    pub fn include(&self, op: &PathPairOperator) -> Result<PathPairOperator> {
        let n = op.level;
        self.check_cap(n + 1)?;
        let children = self.children(n)?;
        let mut out = PathPairOperator::zero(n + 1);
        for (&(k, b), v) in &op.terms {
            let width = children[k + 1] - children[k];
            debug_assert_eq!(width, children[b + 1] - children[b]);
            for j in 0..width {
                out.add_term(children[k] + j, children[b] + j, v.clone());
            }
        }
        Ok(out)
    }

    /// Orthogonal projection onto paths whose simple-object labels are
    /// exactly `labels`.
    pub fn label_projector(&self, labels: &[usize]) -> Result<PathPairOperator> {
        for &c in labels {
            if !self.graph.x.contains(&c) {
                return Err(Error::invalid(format!(
                    "label {} does not occur in X",
                    self.graph.ring().label(c)
                )));
            }
        }
        let n = labels.len();
        let paths = self.enumerate_paths(n)?;
        let mut op = PathPairOperator::zero(n);
        for (i, p) in paths.iter().enumerate() {
            if p.labels().map(|l| self.graph.x[l]).eq(labels.iter().copied()) {
                op.add_term(i, i, Complex::one());
            }
        }
        Ok(op)
    }

    /// `tr_C(E_ξη) = δ_ξη d_{r(ξ)}`.
    pub fn categorical_trace(&self, op: &PathPairOperator) -> Result<Complex> {
        let paths = self.enumerate_paths(op.level)?;
        let mut acc = Complex::zero();
        for (&(k, b), v) in &op.terms {
            if k == b {
                acc = acc + v.scale(self.graph.vertex_dim(paths[k].range));
            }
        }
        Ok(acc)
    }

    /// Canonical state `ψ(E_ξη) = δ_ξη D_X^{-n} w(ξ) d_{r(ξ)}`.
    pub fn canonical_state(&self, op: &PathPairOperator) -> Result<Complex> {
        let paths = self.enumerate_paths(op.level)?;
        let norm = self.graph.big_d.powi(-(op.level as i64));
        let mut acc = Complex::zero();
        for (&(k, b), v) in &op.terms {
            if k == b {
                let p = &paths[k];
                let w = &p.weight * self.graph.vertex_dim(p.range);
                acc = acc + v.scale(&w);
            }
        }
        Ok(acc.scale(&norm))
    }

    /// Canonical state via the label decomposition
    /// `D^{-n} sum_labels d_{c_1}...d_{c_n} tr_C(op p_{c_1...c_n})`.
    pub fn canonical_state_by_labels(&self, op: &PathPairOperator) -> Result<Complex> {
        let n = op.level;
        let dims = self.graph.ring().dims()?;
        let mut support: Vec<usize> = self.graph.x.clone();
        support.sort_unstable();
        support.dedup();
        let mut acc = Complex::zero();
        let mut seq = vec![0usize; n];
        loop {
            let labels: Vec<usize> = seq.iter().map(|&i| support[i]).collect();
            let proj = self.label_projector(&labels)?;
            let tr = self.categorical_trace(&op.multiply(&proj)?)?;
            if !tr.is_zero() {
                let w = labels.iter().fold(Real::one(), |acc, &c| acc * dims.get(c));
                acc = acc + tr.scale(&w);
            }
            // odometer over support^n
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(acc.scale(&self.graph.big_d.powi(-(n as i64))));
                }
                pos -= 1;
                seq[pos] += 1;
                if seq[pos] < support.len() {
                    break;
                }
                seq[pos] = 0;
            }
        }
    }

    /// Markov trace `d_X^{-n} sum_ξ coeff(E_ξξ) d_{r(ξ)}`.
    pub fn markov_trace(&self, op: &PathPairOperator) -> Result<Complex> {
        let tr = self.categorical_trace(op)?;
        Ok(tr.scale(&self.graph.small_d.powi(-(op.level as i64))))
    }

    /// Coefficient of `E_ξ0ξ0` with `ξ0` the path labeled by the unit only.
    pub fn unit_state(&self, op: &PathPairOperator) -> Result<Complex> {
        let unit_label = self
            .graph
            .x
            .iter()
            .position(|&a| a == 0)
            .ok_or_else(|| Error::Unsupported("the unit does not occur in X".to_string()))?;
        let paths = self.enumerate_paths(op.level)?;
        let xi0 = paths
            .iter()
            .position(|p| p.labels().all(|l| l == unit_label))
            .expect("the all-unit path exists when 1 is in X");
        Ok(op.coefficient(xi0, xi0))
    }

    /// State of the regular Q-system of a pointed ring:
    /// `|X|^{-n} sum_{ξ,η} coeff(E_ξη)`.
    pub fn regular_q_state(&self, op: &PathPairOperator) -> Result<Complex> {
        if !self.graph.ring().is_pointed() {
            return Err(Error::Unsupported(format!(
                "regular Q-system state needs a pointed ring; {} is not pointed",
                self.graph.ring().name()
            )));
        }
        self.enumerate_paths(op.level)?;
        let sum = op.terms.values().fold(Complex::zero(), |acc, v| acc + v);
        let size = Real::from_int(self.graph.x.len() as i64);
        Ok(sum.scale(&size.powi(-(op.level as i64))))
    }

    /// Modular flow `σ_t(E_ξη) = (w(η)/w(ξ))^{it} E_ξη` for complex `t`.
    ///
    /// At `t = iβ` this scales `E_ξη` by `(w(ξ)/w(η))^β`, and the canonical
    /// state satisfies the KMS condition at `β = 1`.
    pub fn modular_flow(&self, op: &PathPairOperator, t: &Complex) -> Result<PathPairOperator> {
        let paths = self.enumerate_paths(op.level)?;
        let p = self.graph.precision;
        let mut out = PathPairOperator::zero(op.level);
        for (&(k, b), v) in &op.terms {
            let ratio = &paths[b].weight / &paths[k].weight;
            out.add_term(k, b, v * &complex_power(&ratio, t, p));
        }
        Ok(out)
    }

    /// `|ψ(x σ_{iβ}(y)) - ψ(y x)|`.
    pub fn kms_defect(
        &self,
        x: &PathPairOperator,
        y: &PathPairOperator,
        beta: &Real,
    ) -> Result<Real> {
        let t = Complex::new(Real::zero(), beta.clone());
        let flowed = self.modular_flow(y, &t)?;
        let lhs = self.canonical_state(&x.multiply(&flowed)?)?;
        let rhs = self.canonical_state(&y.multiply(x)?)?;
        Ok((&lhs - &rhs).abs(self.graph.precision))
    }

    /// Largest KMS defect over all pairs of level-`n` matrix units.
    pub fn kms_sweep(&self, n: usize, beta: &Real) -> Result<Real> {
        let basis = self.basis(n)?;
        self.pair_sweep(n, &basis, |x, y| self.kms_defect(x, y, beta))
    }

    /// Largest `|ψ(ab) - ψ(ba)|` over all pairs of level-`n` matrix units.
    pub fn traciality_defect(&self, n: usize) -> Result<Real> {
        let basis = self.basis(n)?;
        self.pair_sweep(n, &basis, |x, y| {
            let a = self.canonical_state(&x.multiply(y)?)?;
            let b = self.canonical_state(&y.multiply(x)?)?;
            Ok((&a - &b).abs(self.graph.precision))
        })
    }

    fn pair_sweep<F>(&self, n: usize, basis: &[(usize, usize)], f: F) -> Result<Real>
    where
        F: Fn(&PathPairOperator, &PathPairOperator) -> Result<Real> + Sync,
    {
        let units: Vec<PathPairOperator> = basis
            .iter()
            .map(|&(k, b)| {
                let mut op = PathPairOperator::zero(n);
                op.add_term(k, b, Complex::one());
                op
            })
            .collect();
        // Per-row maxima in parallel, then a fixed-order reduction.
        let rows: Vec<Result<Real>> = units
            .par_iter()
            .map(|x| {
                let mut best = Real::zero();
                for y in &units {
                    let d = f(x, y)?;
                    if d > best {
                        best = d;
                    }
                }
                Ok(best)
            })
            .collect();
        let mut best = Real::zero();
        for r in rows {
            let r = r?;
            if r > best {
                best = r;
            }
        }
        Ok(best)
    }

    /// Operator document `{"level", "terms": [{"ket", "bra", "re", "im"}]}`
    /// with edges encoded as `[step, target, label, slot]`.
    pub fn operator_to_json(&self, op: &PathPairOperator) -> Result<String> {
        let paths = self.enumerate_paths(op.level)?;
        let encode = |i: usize| -> Vec<[usize; 4]> {
            paths[i]
                .edges
                .iter()
                .enumerate()
                .map(|(s, e)| [s, e.target, e.label, e.slot as usize])
                .collect()
        };
        let digits = self.graph.precision.digits();
        let doc = OperatorDoc {
            level: op.level,
            terms: op
                .terms
                .iter()
                .map(|(&(k, b), v)| TermDoc {
                    ket: encode(k),
                    bra: encode(b),
                    re: v.re.to_decimal_string(digits),
                    im: v.im.to_decimal_string(digits),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn operator_from_json(&self, text: &str) -> Result<PathPairOperator> {
        let doc: OperatorDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = doc.level;
        self.check_cap(n)?;
        let decode = |steps: &[[usize; 4]]| -> Result<usize> {
            if steps.len() != n {
                return Err(Error::invalid(format!("path of length {} at level {n}", steps.len())));
            }
            let mut edges = Vec::with_capacity(n);
            let mut at = 0;
            for (i, &[step, target, label, slot]) in steps.iter().enumerate() {
                if step != i {
                    return Err(Error::invalid(format!("edge {i} carries step {step}")));
                }
                let e = Edge { source: at, target, label, slot: slot as u32 };
                if !self.graph.out_edges(at).contains(&e) {
                    return Err(Error::invalid(format!("edge {i} is not in the fusion graph")));
                }
                edges.push(e);
                at = target;
            }
            self.path_index(&edges)
        };
        let mut op = PathPairOperator::zero(n);
        for t in &doc.terms {
            let (k, b) = (decode(&t.ket)?, decode(&t.bra)?);
            let re = Real::parse_exact(&t.re)
                .ok_or_else(|| Error::Parse(format!("bad number {:?}", t.re)))?;
            let im = Real::parse_exact(&t.im)
                .ok_or_else(|| Error::Parse(format!("bad number {:?}", t.im)))?;
            op.add_term(k, b, Complex::new(re, im));
        }
        self.validate(&op)?;
        Ok(op)
    }
}

fn overflow() -> Error {
    Error::Resource("path multiplicities overflow 128 bits".to_string())
}

/// `r^{it}` for positive real `r` and complex `t = a + ib`:
/// `r^{-b} (cos(a ln r) + i sin(a ln r))`.
pub fn complex_power(r: &Real, t: &Complex, p: Precision) -> Complex {
    if r.is_one() && r.is_exact() {
        return Complex::one();
    }
    let modulus = r.pow(&-&t.im, p);
    if t.re.is_zero() {
        return Complex::from_real(modulus);
    }
    let angle = &t.re * &r.ln(p);
    Complex::new(&modulus * &angle.cos(p), &modulus * &angle.sin(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(name: &str) -> PathNet {
        let ring = FusionRing::builtin(name)
            .unwrap()
            .with_dimensions(Precision::default())
            .unwrap();
        PathNet::regular(Arc::new(ring)).unwrap()
    }

    #[test]
    fn fibonacci_levels() {
        let fib = net("fib");
        let l1 = fib.enumerate_paths(1).unwrap();
        assert_eq!(l1.len(), 2);
        assert_eq!((l1[0].range, l1[1].range), (0, 1));
        let l2 = fib.enumerate_paths(2).unwrap();
        assert_eq!(l2.iter().filter(|p| p.range == 0).count(), 2);
        assert_eq!(l2.iter().filter(|p| p.range == 1).count(), 3);
        assert_eq!(fib.level_dims(2).unwrap(), (vec![2, 3], 13));
        assert_eq!(fib.enumerate_paths(0).unwrap().len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let fib = net("fib");
        assert!(matches!(fib.enumerate_paths(9), Err(Error::Resource(_))));
    }

    #[test]
    fn include_is_unital() {
        let fib = net("fib");
        for n in 0..4 {
            let id = fib.identity(n).unwrap();
            assert_eq!(fib.include(&id).unwrap(), fib.identity(n + 1).unwrap());
        }
    }

    #[test]
    fn fibonacci_canonical_state_level_one() {
        let fib = net("fib");
        let p = Precision::default();
        let phi = (Real::one() + Real::from_int(5).sqrt(p)) / Real::from_int(2);
        let d = Real::from_int(2) + &phi;
        let tol = Precision::ten_to_minus(45);
        let e00 = fib.matrix_unit(1, 0, 0).unwrap();
        let e11 = fib.matrix_unit(1, 1, 1).unwrap();
        assert!(fib.canonical_state(&e00).unwrap().re.approx_eq(&d.recip(), &tol));
        assert!(fib.canonical_state(&e11).unwrap().re.approx_eq(&(&phi * &phi / &d), &tol));
    }

    #[test]
    fn traciality_defect_examples() {
        assert!(net("hilb_z2").traciality_defect(3).unwrap().is_zero());
        let fib = net("fib");
        let p = Precision::default();
        let phi = (Real::one() + Real::from_int(5).sqrt(p)) / Real::from_int(2);
        let d = Real::from_int(2) + &phi;
        let expect = &phi / &(&d * &d);
        let got = fib.traciality_defect(2).unwrap();
        assert!(got.approx_eq(&expect, &Precision::ten_to_minus(40)));
    }

    #[test]
    fn complex_power_matches_exponential() {
        let p = Precision::default();
        let r = Real::from_int(3);
        let t = Complex::new(Real::ratio(1, 2), Real::from_int(-2));
        let z = complex_power(&r, &t, p);
        // 3^{i/2} * 3^{2}
        let ln3 = r.ln(p);
        let ang = Real::ratio(1, 2) * &ln3;
        let expect = Complex::new(Real::from_int(9) * ang.cos(p), Real::from_int(9) * ang.sin(p));
        assert!((&z - &expect).abs(p) < Precision::ten_to_minus(40));
    }
}
