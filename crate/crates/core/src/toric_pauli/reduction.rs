//! Expressing a local Pauli operator as stabilizers times a boundary
//! operator.
//!
//! The region is rotated so that the shared side (if any) faces east, then
//! columns are peeled off from the west: a column of horizontal edges can
//! only carry `X` and is cleared by the stars just east of it, a column of
//! vertical edges can only carry `Z` and is cleared by the plaquettes just
//! east of it. What remains is a strip of width at most one, which is empty
//! when the region is completely surrounded and otherwise decomposes into the
//! boundary generators of the shared interval.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::number::Complex;

use super::boundary::{lattice_generators, realize, BoundaryElement};
use super::lattice::{
    is_edge, region_relation, rotate, stabilizer_generators, BoundaryKind, Interval, Region, Relation, Site,
    Stabilizer, Window,
};
use super::pauli::PauliMonomial;

/// Surrounding constant used by the reduction, on the doubled grid.
pub const SURROUND: i32 = 2;

/// Boundary part `x^a y^b` on a shared interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPart {
    pub interval: Interval,
    pub a: u64,
    pub b: u64,
}

/// `P = i^phase · (product of word) · x^a y^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub word: Vec<Stabilizer>,
    pub boundary: Option<BoundaryPart>,
    pub phase: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReduceOutcome {
    Reduced(Reduction),
    /// `P` anticommutes with this stabilizer of `Δ`, so `p_Δ P p_Δ = 0`.
    NotCommuting(Stabilizer),
}

impl Reduction {
    /// The boundary part as an element of the abstract algebra, including the
    /// phase; for a completely surrounded region this is `None`.
    pub fn boundary_element(&self) -> Result<Option<BoundaryElement>> {
        match &self.boundary {
            None => Ok(None),
            Some(bp) => {
                let e = BoundaryElement::monomial(bp.interval.len(), bp.interval.kind, bp.a, bp.b)?;
                Ok(Some(e.scale(&Complex::i_pow(self.phase as i64))))
            }
        }
    }

    /// Multiplies the factors back together on `window`.
    pub fn product(&self, window: &Window) -> Result<PauliMonomial> {
        let mut q = PauliMonomial::identity(window.len());
        for s in &self.word {
            for e in s.edges() {
                if window.index(e).is_none() {
                    return Err(Error::invalid(format!("stabilizer {s} leaves the window")));
                }
            }
            q = q.mul(&s.monomial(window));
        }
        if let Some(bp) = &self.boundary {
            let (xs, ys) = lattice_generators(&bp.interval, window)?;
            q = q.mul(&realize(&xs, &ys, bp.a, bp.b));
        }
        let phase = (q.phase() + self.phase) % 4;
        Ok(q.with_phase(phase))
    }
}

impl std::fmt::Display for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.phase != 0 {
            write!(f, "i^{} ", self.phase)?;
        }
        let words: Vec<String> = self.word.iter().map(|s| s.to_string()).collect();
        if words.is_empty() {
            f.write_str("[]")?;
        } else {
            write!(f, "[{}]", words.join(" "))?;
        }
        if let Some(bp) = &self.boundary {
            let e = BoundaryElement::monomial(bp.interval.len(), bp.interval.kind, bp.a, bp.b)
                .map_err(|_| std::fmt::Error)?;
            write!(f, " · {e}")?;
        }
        Ok(())
    }
}

fn check_support(p: &PauliMonomial, lambda: &Region, window: &Window) -> Result<()> {
    if p.qubits() != window.len() {
        return Err(Error::invalid(format!(
            "monomial has {} qubits but the window has {} edges",
            p.qubits(),
            window.len()
        )));
    }
    for q in p.support() {
        if !lambda.contains(window.edge(q)) {
            return Err(Error::invalid(format!(
                "support edge {:?} escapes the region {lambda}",
                window.edge(q)
            )));
        }
    }
    Ok(())
}

fn shared_interval(lambda: &Region, delta: &Region) -> Result<Option<Interval>> {
    match region_relation(lambda, delta, SURROUND)? {
        Relation::CompletelySurrounds => Ok(None),
        Relation::SurroundsWithSharedBoundary(i) => Ok(Some(i)),
        Relation::None => Err(Error::invalid(format!(
            "{delta} neither completely surrounds {lambda} nor surrounds it with a shared side (s = {SURROUND})"
        ))),
    }
}

/// Runs the reduction of `p` (a monomial on `window`) for `Λ` inside `Δ`.
pub fn pauli_reduce(p: &PauliMonomial, lambda: &Region, delta: &Region, window: &Window) -> Result<ReduceOutcome> {
    if !window.region().contains_region(delta) {
        return Err(Error::invalid(format!("window {} does not contain {delta}", window.region())));
    }
    check_support(p, lambda, window)?;
    let interval = shared_interval(lambda, delta)?;
    for (s, g) in stabilizer_generators(delta, window) {
        if !g.commutes(p) {
            return Ok(ReduceOutcome::NotCommuting(s));
        }
    }
    let reduction = peel(p, lambda, interval, window)?;
    let q = reduction.product(window)?;
    if !q.same_support(p) || q.phase() != p.phase() {
        return Err(Error::invalid(format!(
            "reduction of {} did not reproduce the input",
            window.format_monomial(p)
        )));
    }
    Ok(ReduceOutcome::Reduced(reduction))
}

fn peel(p: &PauliMonomial, lambda: &Region, interval: Option<Interval>, window: &Window) -> Result<Reduction> {
    let turns = interval.as_ref().map(|i| i.side.turns_to_east()).unwrap_or(0);
    let back = (4 - turns) % 4;
    let bx = lambda.rotated(turns);
    // rotated edge -> (x bit, z bit)
    let mut letters: HashMap<Site, (bool, bool)> = HashMap::new();
    for q in p.support() {
        let e = rotate(window.edge(q), turns);
        letters.insert(e, (p.x_part().contains(q), p.z_part().contains(q)));
    }
    let toggle = |letters: &mut HashMap<Site, (bool, bool)>, e: Site, x: bool, z: bool| {
        let entry = letters.entry(e).or_insert((false, false));
        entry.0 ^= x;
        entry.1 ^= z;
        if *entry == (false, false) {
            letters.remove(&e);
        }
    };
    let stuck = |e: Site| {
        Error::invalid(format!(
            "reduction invariant violated at edge {:?}",
            rotate(e, back)
        ))
    };
    let mut word = Vec::new();
    let (mut x0, x1) = (bx.x0, bx.x1);
    while x1 - x0 >= 2 {
        let current = Region { x0, y0: bx.y0, x1, y1: bx.y1 };
        for y in bx.y0..=bx.y1 {
            let e = (x0, y);
            if !is_edge(e) {
                continue;
            }
            let Some(&(xb, zb)) = letters.get(&e) else {
                continue;
            };
            let horizontal = x0.rem_euclid(2) == 1;
            // horizontal columns only carry X, vertical ones only Z
            if (horizontal && zb) || (!horizontal && xb) {
                return Err(stuck(e));
            }
            let center = (x0 + 1, y);
            if !current.contains_stabilizer(center) {
                return Err(stuck(e));
            }
            for f in super::lattice::neighbours(center) {
                toggle(&mut letters, f, horizontal, !horizontal);
            }
            let s = Stabilizer::at(rotate(center, back)).expect("vertex or face");
            word.push(s);
        }
        x0 += 1;
    }
    let boundary = match interval {
        None => {
            if let Some((&e, _)) = letters.iter().min() {
                return Err(stuck(e));
            }
            None
        }
        Some(iv) => {
            let sites: HashMap<Site, usize> =
                iv.sites.iter().enumerate().map(|(i, &s)| (rotate(s, turns), i)).collect();
            let inner: HashMap<Site, usize> =
                (0..iv.len() - 1).map(|j| (rotate(iv.inner_edge(j), turns), j)).collect();
            // x_i letter and y_j letter
            let (xl, yl) = match iv.kind {
                BoundaryKind::Rough => ((true, false), (false, true)),
                BoundaryKind::Smooth => ((false, true), (true, false)),
            };
            let mut b = 0u64;
            let inner_edges: BTreeMap<Site, usize> = inner.iter().map(|(&e, &j)| (e, j)).collect();
            for (&e, &j) in &inner_edges {
                match letters.get(&e) {
                    None => {}
                    Some(&l) if l == yl => {
                        b |= 1 << j;
                        for f in iv.y_edges(j) {
                            toggle(&mut letters, rotate(f, turns), yl.0, yl.1);
                        }
                    }
                    Some(_) => return Err(stuck(e)),
                }
            }
            let mut a = 0u64;
            let remaining: BTreeMap<Site, (bool, bool)> = letters.iter().map(|(&e, &l)| (e, l)).collect();
            for (e, l) in remaining {
                match sites.get(&e) {
                    Some(&i) if l == xl => a |= 1 << i,
                    _ => return Err(stuck(e)),
                }
            }
            Some(BoundaryPart { interval: iv, a, b })
        }
    };
    let mut reduction = Reduction { word, boundary, phase: 0 };
    let q = reduction.product(window)?;
    if !q.same_support(p) {
        return Err(Error::invalid("reduction left uncancelled support"));
    }
    reduction.phase = (p.phase() + 4 - q.phase()) % 4;
    Ok(reduction)
}

/// Value of the boundary channel `𝔼(x)` defined by `p_Δ x p_Δ = 𝔼(x) p_Δ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    /// `Λ ≪ Δ`: the canonical state value.
    Scalar(Complex),
    Boundary(Interval, BoundaryElement),
}

impl Channel {
    /// The scalar, or the identity coefficient of the boundary element.
    pub fn psi(&self) -> Complex {
        match self {
            Channel::Scalar(c) => c.clone(),
            Channel::Boundary(_, e) => e.psi_b(),
        }
    }
}

/// `𝔼(x)` for a linear combination of monomials on `window`.
pub fn boundary_channel(
    x: &[(Complex, PauliMonomial)],
    lambda: &Region,
    delta: &Region,
    window: &Window,
) -> Result<Channel> {
    let interval = shared_interval(lambda, delta)?;
    let outcomes: Vec<ReduceOutcome> = x
        .par_iter()
        .map(|(_, p)| pauli_reduce(p, lambda, delta, window))
        .collect::<Result<Vec<_>>>()?;
    match interval {
        None => {
            let mut acc = Complex::zero();
            for ((c, _), o) in x.iter().zip(&outcomes) {
                if let ReduceOutcome::Reduced(r) = o {
                    acc = acc + c * &Complex::i_pow(r.phase as i64);
                }
            }
            Ok(Channel::Scalar(acc))
        }
        Some(iv) => {
            let mut acc = BoundaryElement::zero(iv.len(), iv.kind)?;
            for ((c, _), o) in x.iter().zip(&outcomes) {
                if let ReduceOutcome::Reduced(r) = o {
                    if let Some(e) = r.boundary_element()? {
                        acc = acc.add(&e.scale(c))?;
                    }
                }
            }
            Ok(Channel::Boundary(iv, acc))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReduceReport {
    pub input: String,
    pub outcome: String,
    pub word: Vec<String>,
    pub boundary: Option<String>,
    pub interval: Option<String>,
    pub phase: u8,
    pub witness: Option<String>,
}

pub fn reduce_report(p: &PauliMonomial, outcome: &ReduceOutcome, window: &Window) -> ReduceReport {
    match outcome {
        ReduceOutcome::NotCommuting(s) => ReduceReport {
            input: window.format_monomial(p),
            outcome: "not_commuting".into(),
            word: vec![],
            boundary: None,
            interval: None,
            phase: 0,
            witness: Some(s.to_string()),
        },
        ReduceOutcome::Reduced(r) => ReduceReport {
            input: window.format_monomial(p),
            outcome: "reduced".into(),
            word: r.word.iter().map(|s| s.to_string()).collect(),
            boundary: r.boundary.as_ref().and_then(|bp| {
                BoundaryElement::monomial(bp.interval.len(), bp.interval.kind, bp.a, bp.b)
                    .ok()
                    .map(|e| e.to_string())
            }),
            interval: r.boundary.as_ref().map(|bp| bp.interval.to_string()),
            phase: r.phase,
            witness: None,
        },
    }
}
