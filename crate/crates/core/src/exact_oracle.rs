//! Brute-force state-vector checks on small Toric Code windows.
//!
//! Everything here works in double precision on explicit computational
//! basis states of the window's edges (at most [`DEFAULT_EDGE_CAP`]). Pauli
//! operators are applied with a separate bit-mask implementation so the
//! checks do not go through [`crate::toric_pauli::PauliMonomial::mul`].
//!
//! The ground space of `p_Δ` is handled through its orbit basis: states
//! satisfying every plaquette, grouped into orbits of the group generated by
//! the stars, each orbit giving one normalized ground state.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::toric_pauli::boundary::{lattice_generators, realize};
use crate::toric_pauli::lattice::{
    region_relation, stabilizer_generators, Interval, Region, Relation, Side, Stabilizer, Window,
};
use crate::toric_pauli::pauli::PauliMonomial;
use crate::toric_pauli::reduction::{boundary_channel, Channel};

pub const DEFAULT_EDGE_CAP: usize = 20;
pub const TOLERANCE: f64 = 1e-10;

/// Largest `2^E · |star group|` for which a projector is materialized as a
/// sparse matrix.
pub const SPARSE_ENTRY_CAP: usize = 1 << 22;

/// Pauli operator `i^k X^x Z^z` on at most 32 qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitPauli {
    pub phase: u8,
    pub x: u32,
    pub z: u32,
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl BitPauli {
    pub fn from_monomial(p: &PauliMonomial) -> Result<BitPauli> {
        if p.qubits() > 32 {
            return Err(Error::Resource(format!("{} qubits exceed the oracle word", p.qubits())));
        }
        let mask = |s: &fixedbitset::FixedBitSet| s.ones().fold(0u32, |m, q| m | 1 << q);
        Ok(BitPauli { phase: p.phase(), x: mask(p.x_part()), z: mask(p.z_part()) })
    }

    /// `P |s> = coefficient |s'>`.
    pub fn apply(&self, s: u32) -> (u32, Complex64) {
        let sign = if (self.z & s).count_ones() % 2 == 1 { 2 } else { 0 };
        (s ^ self.x, i_pow(self.phase + sign))
    }

    /// Product computed on basis states: `(P Q)|s>` for `s = 0` fixes the
    /// phase.
    pub fn mul(&self, other: &BitPauli) -> BitPauli {
        // Q|0> = i^q |x_Q>, then P|x_Q> = i^p (-1)^{z_P·x_Q} |x_P ^ x_Q>
        let sign = if (self.z & other.x).count_ones() % 2 == 1 { 2 } else { 0 };
        BitPauli { phase: (self.phase + other.phase + sign) % 4, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    pub fn adjoint(&self) -> BitPauli {
        let overlap = if (self.x & self.z).count_ones() % 2 == 1 { 2 } else { 0 };
        BitPauli { phase: (4 - self.phase + overlap) % 4, x: self.x, z: self.z }
    }
}

/// Columns of a sparse real matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pub dim: usize,
    pub cols: Vec<Vec<(u32, f64)>>,
}

impl SparseMatrix {
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: HashMap<u32, f64> = HashMap::new();
                for &(k, v) in col {
                    for &(r, w) in &self.cols[k as usize] {
                        *acc.entry(r).or_insert(0.0) += w * v;
                    }
                }
                let mut out: Vec<(u32, f64)> = acc.into_iter().filter(|(_, v)| v.abs() > 1e-15).collect();
                out.sort_by_key(|e| e.0);
                out
            })
            .collect();
        SparseMatrix { dim: self.dim, cols }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.dim];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                cols[r as usize].push((c as u32, v));
            }
        }
        SparseMatrix { dim: self.dim, cols }
    }

    /// Largest entrywise difference.
    pub fn max_diff(&self, other: &SparseMatrix) -> f64 {
        let mut worst = 0.0f64;
        for (a, b) in self.cols.iter().zip(&other.cols) {
            let mut m: HashMap<u32, f64> = a.iter().copied().collect();
            for &(r, v) in b {
                *m.entry(r).or_insert(0.0) -= v;
            }
            worst = m.values().fold(worst, |w, v| w.max(v.abs()));
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        self.cols
            .iter()
            .enumerate()
            .map(|(c, col)| col.iter().find(|e| e.0 as usize == c).map(|e| e.1).unwrap_or(0.0))
            .sum()
    }
}

/// A window small enough for state vectors.
#[derive(Clone, Debug)]
pub struct DenseWindow {
    window: Window,
}

impl DenseWindow {
    pub fn new(region: Region, edge_cap: usize) -> Result<DenseWindow> {
        let window = Window::new(region);
        let cap = edge_cap.min(32);
        if window.len() > cap {
            return Err(Error::Resource(format!(
                "window {region} has {} edges, above the cap of {cap}",
                window.len()
            )));
        }
        Ok(DenseWindow { window })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn edges(&self) -> usize {
        self.window.len()
    }

    /// `p_Λ` for a region inside the window.
    pub fn projector(&self, region: &Region) -> Result<Projector> {
        if !self.window.region().contains_region(region) {
            return Err(Error::invalid(format!("{region} is not inside the window {}", self.window.region())));
        }
        let mut stars = Vec::new();
        let mut plaquettes = Vec::new();
        for (s, g) in stabilizer_generators(region, &self.window) {
            let b = BitPauli::from_monomial(&g)?;
            match s {
                Stabilizer::Star(_) => stars.push(b.x),
                Stabilizer::Plaquette(_) => plaquettes.push(b.z),
            }
        }
        Ok(Projector { edges: self.edges(), stars, plaquettes })
    }

    pub fn bit_pauli(&self, p: &PauliMonomial) -> Result<BitPauli> {
        if p.qubits() != self.edges() {
            return Err(Error::invalid("monomial is not on this window"));
        }
        BitPauli::from_monomial(p)
    }
}

/// `p = prod (1 + A_s)/2 prod (1 + B_p)/2` with stars as X masks and
/// plaquettes as Z masks.
#[derive(Clone, Debug)]
pub struct Projector {
    edges: usize,
    stars: Vec<u32>,
    plaquettes: Vec<u32>,
}

impl Projector {
    pub fn generator_count(&self) -> usize {
        self.stars.len() + self.plaquettes.len()
    }

    fn satisfies_plaquettes(&self, s: u32) -> bool {
        self.plaquettes.iter().all(|&m| (m & s).count_ones() % 2 == 0)
    }

    /// Elements of the group generated by the stars, as X masks.
    fn star_group(&self) -> Vec<u32> {
        let mut group = vec![0u32];
        for &g in &self.stars {
            if group.contains(&g) {
                continue;
            }
            let extra: Vec<u32> = group.iter().map(|h| h ^ g).collect();
            if extra.iter().any(|e| group.contains(e)) {
                continue;
            }
            group.extend(extra);
        }
        group
    }

    /// Applies the projector to a state vector by applying each factor.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut v = v.to_vec();
        for &m in &self.stars {
            let w: Vec<Complex64> = (0..v.len()).map(|s| (v[s] + v[s ^ m as usize]) * 0.5).collect();
            v = w;
        }
        for &m in &self.plaquettes {
            for (s, a) in v.iter_mut().enumerate() {
                if (m & s as u32).count_ones() % 2 == 1 {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
        }
        v
    }

    /// Sparse matrix of the projector.
    pub fn to_sparse(&self) -> Result<SparseMatrix> {
        let group = self.star_group();
        let dim = 1usize << self.edges;
        if dim.saturating_mul(group.len()) > SPARSE_ENTRY_CAP {
            return Err(Error::Resource(format!(
                "projector on {} edges with {} star-group elements exceeds the sparse cap",
                self.edges,
                group.len()
            )));
        }
        let w = 1.0 / group.len() as f64;
        let cols = (0..dim as u32)
            .map(|s| {
                if !self.satisfies_plaquettes(s) {
                    return Vec::new();
                }
                let mut col: Vec<(u32, f64)> = group.iter().map(|h| (s ^ h, w)).collect();
                col.sort_by_key(|e| e.0);
                col
            })
            .collect();
        Ok(SparseMatrix { dim, cols })
    }

    /// Orbit basis of the range.
    pub fn ground_basis(&self) -> GroundBasis {
        let group = self.star_group();
        let dim = 1usize << self.edges;
        let mut orbit_of = vec![u32::MAX; dim];
        let mut orbits = Vec::new();
        for s in 0..dim as u32 {
            if orbit_of[s as usize] != u32::MAX || !self.satisfies_plaquettes(s) {
                continue;
            }
            let id = orbits.len() as u32;
            let mut members: Vec<u32> = group.iter().map(|h| s ^ h).collect();
            members.sort_unstable();
            for &m in &members {
                orbit_of[m as usize] = id;
            }
            orbits.push(members);
        }
        GroundBasis { stars: self.stars.clone(), orbit_of, orbits, weight: 1.0 / group.len() as f64 }
    }
}

/// Orthonormal basis `|O> = |G|^{-1/2} sum_{s in O} |s>` of a ground space.
#[derive(Clone, Debug)]
pub struct GroundBasis {
    /// Star X masks generating the orbits.
    stars: Vec<u32>,
    orbit_of: Vec<u32>,
    orbits: Vec<Vec<u32>>,
    /// `1/|G|`, the squared amplitude.
    weight: f64,
}

impl GroundBasis {
    pub fn dim(&self) -> usize {
        self.orbits.len()
    }

    /// Sparse `<O|P|O'>`, keyed by `(O, O')`.
    ///
    /// `P` sends the orbit `O'` onto a single orbit and picks up the sign
    /// `(-1)^{z·h}` on the member `s ^ h`, so the orbit sum is the
    /// representative's amplitude when `z` is even on every star and zero
    /// otherwise.
    pub fn compress(&self, p: &BitPauli) -> HashMap<(u32, u32), Complex64> {
        let mut out = HashMap::new();
        if !self.commutes_with_stars(p) {
            return out;
        }
        for (o2, members) in self.orbits.iter().enumerate() {
            let (t, c) = p.apply(members[0]);
            let o1 = self.orbit_of[t as usize];
            if o1 != u32::MAX {
                out.insert((o1, o2 as u32), c);
            }
        }
        out
    }

    /// [`GroundBasis::compress`] by summing over every orbit member.
    pub fn compress_by_summing(&self, p: &BitPauli) -> HashMap<(u32, u32), Complex64> {
        let mut out: HashMap<(u32, u32), Complex64> = HashMap::new();
        for (o2, members) in self.orbits.iter().enumerate() {
            for &s in members {
                let (t, c) = p.apply(s);
                let o1 = self.orbit_of[t as usize];
                if o1 != u32::MAX {
                    *out.entry((o1, o2 as u32)).or_insert(Complex64::new(0.0, 0.0)) += c * self.weight;
                }
            }
        }
        out.retain(|_, v| v.norm() > 1e-14);
        out
    }

    fn commutes_with_stars(&self, p: &BitPauli) -> bool {
        self.stars.iter().all(|&h| (p.z & h).count_ones() % 2 == 0)
    }

    /// `tr(p P)`.
    pub fn trace(&self, p: &BitPauli) -> Complex64 {
        if !self.commutes_with_stars(p) {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (o, members) in self.orbits.iter().enumerate() {
            let (t, c) = p.apply(members[0]);
            if self.orbit_of[t as usize] == o as u32 {
                acc += c;
            }
        }
        acc
    }

    /// `Tr_{Λ^c}(p) / tr(p)` as a dense matrix on the qubits in `keep`.
    pub fn reduced_density(&self, keep: &[usize]) -> Vec<Vec<Complex64>> {
        let k = keep.len();
        let keep_mask = keep.iter().fold(0u32, |m, &q| m | 1 << q);
        let local = |s: u32| keep.iter().enumerate().fold(0usize, |acc, (i, &q)| acc | (((s >> q) & 1) as usize) << i);
        let mut rho = vec![vec![Complex64::new(0.0, 0.0); 1 << k]; 1 << k];
        for members in &self.orbits {
            let mut by_env: HashMap<u32, Vec<u32>> = HashMap::new();
            for &s in members {
                by_env.entry(s & !keep_mask).or_default().push(s);
            }
            for group in by_env.values() {
                for &s in group {
                    for &t in group {
                        rho[local(s)][local(t)] += self.weight;
                    }
                }
            }
        }
        let norm = self.dim() as f64;
        for row in &mut rho {
            for v in row {
                *v /= norm;
            }
        }
        rho
    }
}

/// Incremental complex row reduction over sparse vectors.
#[derive(Default)]
struct Span {
    rows: Vec<(usize, HashMap<usize, Complex64>)>,
}

impl Span {
    fn reduce(&self, mut v: HashMap<usize, Complex64>) -> HashMap<usize, Complex64> {
        for (pivot, row) in &self.rows {
            if let Some(&c) = v.get(pivot) {
                for (&k, &r) in row {
                    *v.entry(k).or_insert(Complex64::new(0.0, 0.0)) -= c * r;
                }
            }
        }
        v.retain(|_, x| x.norm() > 1e-9);
        v
    }

    /// Adds a vector; returns whether the rank grew.
    fn insert(&mut self, v: HashMap<usize, Complex64>) -> bool {
        let v = self.reduce(v);
        let Some((&pivot, &p)) = v.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(a.0))) else {
            return false;
        };
        let row: HashMap<usize, Complex64> = v.into_iter().map(|(k, x)| (k, x / p)).collect();
        self.rows.push((pivot, row));
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

fn flatten(m: &HashMap<(u32, u32), Complex64>, g: usize) -> HashMap<usize, Complex64> {
    m.iter().map(|(&(a, b), &v)| (a as usize * g + b as usize, v)).collect()
}

/// All Pauli monomials on the given qubits when there are at most
/// `enumerate_up_to` of them, otherwise every single-qubit Pauli plus
/// `samples` random ones.
pub fn region_monomials(qubits: &[usize], total: usize, enumerate_up_to: usize, samples: usize, seed: u64) -> Vec<PauliMonomial> {
    use crate::toric_pauli::pauli::Letter;
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let build = |code: &[usize]| {
        let ls: Vec<(usize, Letter)> = qubits.iter().zip(code).map(|(&q, &c)| (q, letters[c])).collect();
        PauliMonomial::from_letters(total, &ls)
    };
    let k = qubits.len();
    if k <= enumerate_up_to {
        let mut out = Vec::with_capacity(1 << (2 * k));
        for idx in 0..1usize << (2 * k) {
            let code: Vec<usize> = (0..k).map(|i| (idx >> (2 * i)) & 3).collect();
            out.push(build(&code));
        }
        return out;
    }
    let mut out = Vec::new();
    for i in 0..k {
        for c in 1..4 {
            let mut code = vec![0; k];
            code[i] = c;
            out.push(build(&code));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let code: Vec<usize> = (0..k).map(|_| rng.gen_range(0..4)).collect();
        out.push(build(&code));
    }
    out
}

fn region_qubits(window: &Window, region: &Region) -> Vec<usize> {
    (0..window.len()).filter(|&q| region.contains(window.edge(q))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorReport {
    pub region: String,
    pub edges: usize,
    pub generators: usize,
    pub rank: usize,
    pub idempotence_error: f64,
    pub symmetry_error: f64,
}

/// Builds `p_Λ` as a sparse matrix and checks it is an orthogonal projection.
pub fn build_projector(region: &Region, window: &DenseWindow) -> Result<(SparseMatrix, ProjectorReport)> {
    let p = window.projector(region)?;
    let m = p.to_sparse()?;
    let sq = m.mul(&m);
    let report = ProjectorReport {
        region: region.to_string(),
        edges: window.edges(),
        generators: p.generator_count(),
        rank: m.trace().round() as usize,
        idempotence_error: sq.max_diff(&m),
        symmetry_error: m.transpose().max_diff(&m),
    };
    Ok((m, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub inner: String,
    pub outer: String,
    /// `max |p_Δ p_Λ v - p_Δ v|` over random vectors.
    pub max_deviation: f64,
}

/// `p_Δ ≤ p_Λ` for `Λ ⊂ Δ`, checked as `p_Δ p_Λ = p_Δ = p_Λ p_Δ` on random
/// vectors.
pub fn verify_monotone(inner: &Region, outer: &Region, window: &DenseWindow, seed: u64) -> Result<MonotonicityReport> {
    if !outer.contains_region(inner) {
        return Err(Error::invalid(format!("{inner} is not inside {outer}")));
    }
    let pi = window.projector(inner)?;
    let po = window.projector(outer)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << window.edges();
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let pov = po.apply(&v);
        let a = po.apply(&pi.apply(&v));
        let b = pi.apply(&pov);
        for s in 0..dim {
            worst = worst.max((a[s] - pov[s]).norm()).max((b[s] - pov[s]).norm());
        }
    }
    Ok(MonotonicityReport { inner: inner.to_string(), outer: outer.to_string(), max_deviation: worst })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lto1Report {
    pub lambda: String,
    pub delta: String,
    pub ground_dim: usize,
    pub monomials: usize,
    /// `max ||p_Δ x p_Δ - c p_Δ||_F` with the best scalar `c`.
    pub max_deviation: f64,
    /// `max |c - 𝔼(x)|` against the symplectic boundary channel.
    pub max_channel_mismatch: f64,
}

impl Lto1Report {
    pub fn passed(&self) -> bool {
        self.max_deviation < TOLERANCE && self.max_channel_mismatch < TOLERANCE
    }
}

/// `p_Δ x p_Δ = c p_Δ` for Pauli monomials `x` on `Λ ≪ Δ`.
pub fn verify_lto1(lambda: &Region, delta: &Region, window: &DenseWindow) -> Result<Lto1Report> {
    if region_relation(lambda, delta, 2)? != Relation::CompletelySurrounds {
        return Err(Error::invalid(format!("{delta} does not completely surround {lambda}")));
    }
    let gb = window.projector(delta)?.ground_basis();
    let g = gb.dim();
    let qs = region_qubits(window.window(), lambda);
    let mut xs = region_monomials(&qs, window.edges(), 6, 200, 7);
    for (_, s) in stabilizer_generators(lambda, window.window()) {
        xs.push(s);
    }
    let mut max_dev = 0.0f64;
    let mut max_mis = 0.0f64;
    for x in &xs {
        let m = gb.compress(&window.bit_pauli(x)?);
        let c = (0..g as u32).map(|o| m.get(&(o, o)).copied().unwrap_or_default()).sum::<Complex64>() / g as f64;
        let mut dev = 0.0;
        for (&(a, b), &v) in &m {
            let target = if a == b { c } else { Complex64::new(0.0, 0.0) };
            dev += (v - target).norm_sqr();
        }
        // diagonal entries missing from the sparse map
        for o in 0..g as u32 {
            if !m.contains_key(&(o, o)) {
                dev += c.norm_sqr();
            }
        }
        max_dev = max_dev.max(dev.sqrt());
        let channel = boundary_channel(&[(crate::number::Complex::one(), x.clone())], lambda, delta, window.window())?;
        let Channel::Scalar(psi) = channel else {
            return Err(Error::invalid("expected a scalar channel value"));
        };
        let (re, im) = psi.to_f64_pair();
        max_mis = max_mis.max((c - Complex64::new(re, im)).norm());
    }
    Ok(Lto1Report {
        lambda: lambda.to_string(),
        delta: delta.to_string(),
        ground_dim: g,
        monomials: xs.len(),
        max_deviation: max_dev,
        max_channel_mismatch: max_mis,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lto234Report {
    pub lambda: String,
    pub delta: String,
    pub larger_delta: String,
    pub sites: usize,
    pub kind: String,
    pub expected_dimension: usize,
    /// Rank of `p_Δ 𝔄(Λ) p_Δ`.
    pub compression_rank: usize,
    /// Rank of `{p_Δ e p_Δ}` over canonical boundary monomials `e`.
    pub boundary_rank: usize,
    /// Rank of the union of both families.
    pub joint_rank: usize,
    pub larger_compression_rank: usize,
    /// Rank of `x -> (p_Δ x p_Δ, p_Δ' x p_Δ')`; equal ranks mean the
    /// compressions have the same kernel.
    pub paired_rank: usize,
    /// Rank of the Gram matrix of `{e p_Δ}`.
    pub injective_rank: usize,
    /// Smallest `||e p_Δ|| / ||e||_2` over random boundary elements.
    pub min_random_norm: f64,
}

impl Lto234Report {
    pub fn passed(&self) -> bool {
        let d = self.expected_dimension;
        self.compression_rank == d
            && self.boundary_rank == d
            && self.joint_rank == d
            && self.larger_compression_rank == d
            && self.paired_rank == d
            && self.injective_rank == d
            && self.min_random_norm > 1e-6
    }
}

/// Boundary span, enlargement invariance and injectivity for `Λ ⋐ Δ ⊂ Δ'`
/// sharing the same interval.
pub fn verify_lto234(lambda: &Region, delta: &Region, larger: &Region, window: &DenseWindow, seed: u64) -> Result<Lto234Report> {
    let interval = match region_relation(lambda, delta, 2)? {
        Relation::SurroundsWithSharedBoundary(i) => i,
        _ => return Err(Error::invalid(format!("{lambda} does not share a side with {delta}"))),
    };
    match region_relation(lambda, larger, 2)? {
        Relation::SurroundsWithSharedBoundary(j) if j == interval => {}
        _ => return Err(Error::invalid(format!("{larger} does not share the same interval with {lambda}"))),
    }
    if !larger.contains_region(delta) {
        return Err(Error::invalid(format!("{delta} is not inside {larger}")));
    }
    let w = window.window();
    let gb = window.projector(delta)?.ground_basis();
    let gb2 = window.projector(larger)?.ground_basis();
    let (g, g2) = (gb.dim(), gb2.dim());
    let sites = interval.len();
    let expected = 1usize << (2 * sites - 1);

    let qs = region_qubits(w, lambda);
    let xs = region_monomials(&qs, window.edges(), 6, 400, seed);
    let mut comp = Span::default();
    let mut joint = Span::default();
    let mut comp2 = Span::default();
    let mut paired = Span::default();
    for x in &xs {
        let b = window.bit_pauli(x)?;
        let m1 = flatten(&gb.compress(&b), g);
        let m2 = flatten(&gb2.compress(&b), g2);
        let mut both = m1.clone();
        both.extend(m2.iter().map(|(&k, &v)| (k + g * g, v)));
        comp.insert(m1.clone());
        joint.insert(m1);
        comp2.insert(m2);
        paired.insert(both);
    }
    let (gx, gy) = lattice_generators(&interval, w)?;
    let mut bound = Span::default();
    let mut images = Vec::new();
    for a in 0..1u64 << sites {
        for bb in 0..1u64 << (sites - 1) {
            let e = window.bit_pauli(&realize(&gx, &gy, a, bb))?;
            let m = flatten(&gb.compress(&e), g);
            bound.insert(m.clone());
            joint.insert(m);
            images.push(e);
        }
    }
    // Gram matrix G_{ef} = tr(p e^* f p)
    let mut traces: HashMap<(u32, u32), Complex64> = HashMap::new();
    let n = images.len();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let f = images[i].adjoint().mul(&images[j]);
            let unit = BitPauli { phase: 0, ..f };
            let t = *traces.entry((f.x, f.z)).or_insert_with(|| gb.trace(&unit));
            gram[i][j] = t * i_pow(f.phase);
        }
    }
    let mut gspan = Span::default();
    for row in &gram {
        gspan.insert(row.iter().enumerate().filter(|(_, v)| v.norm() > 1e-12).map(|(k, &v)| (k, v)).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut min_norm = f64::INFINITY;
    for _ in 0..20 {
        let c: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                q += c[i].conj() * gram[i][j] * c[j];
            }
        }
        let c2: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        // ||e p||^2 = c^* G c; normalize by tr(p) and ||c||^2
        let ratio = (q.re / (gb.dim() as f64 * c2)).max(0.0).sqrt();
        min_norm = min_norm.min(ratio);
    }
    Ok(Lto234Report {
        lambda: lambda.to_string(),
        delta: delta.to_string(),
        larger_delta: larger.to_string(),
        sites,
        kind: interval.kind.to_string(),
        expected_dimension: expected,
        compression_rank: comp.rank(),
        boundary_rank: bound.rank(),
        joint_rank: joint.rank(),
        larger_compression_rank: comp2.rank(),
        paired_rank: paired.rank(),
        injective_rank: gspan.rank(),
        min_random_norm: min_norm,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StateReport {
    pub lambda: String,
    pub delta: String,
    pub gamma: String,
    pub sweep: usize,
    pub psi_of_one: f64,
    pub max_psi_mismatch: f64,
    /// `max |ρ_Δ - ρ_Γ|` for the normalized reduced densities on `Λ`.
    pub partial_trace_residual: f64,
}

impl StateReport {
    pub fn passed(&self) -> bool {
        (self.psi_of_one - 1.0).abs() < TOLERANCE
            && self.max_psi_mismatch < TOLERANCE
            && self.partial_trace_residual < TOLERANCE
    }
}

/// Compares `tr(p_Δ x p_Δ)/tr(p_Δ)` with the symplectic channel over a sweep
/// of random `Λ`-monomials, and the reduced densities of `p_Δ` and `p_Γ` on
/// `Λ`, for `Λ ≪ Δ ⊂ Γ`.
pub fn verify_state_uniqueness(
    lambda: &Region,
    delta: &Region,
    gamma: &Region,
    window: &DenseWindow,
    sweep: usize,
    seed: u64,
) -> Result<StateReport> {
    if region_relation(lambda, delta, 2)? != Relation::CompletelySurrounds || !gamma.contains_region(delta) {
        return Err(Error::invalid(format!("need {lambda} ≪ {delta} ⊂ {gamma}")));
    }
    let w = window.window();
    let gb = window.projector(delta)?.ground_basis();
    let gg = window.projector(gamma)?.ground_basis();
    let qs = region_qubits(w, lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use crate::toric_pauli::pauli::Letter;
    let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    let norm = gb.dim() as f64;
    let one = BitPauli { phase: 0, x: 0, z: 0 };
    let psi_of_one = gb.trace(&one).re / norm;
    let mut worst = 0.0f64;
    for _ in 0..sweep {
        let ls: Vec<(usize, Letter)> = qs.iter().map(|&q| (q, letters[rng.gen_range(0..4)])).collect();
        let phase = rng.gen_range(0..4u8);
        let x = PauliMonomial::from_letters(w.len(), &ls);
        let x = x.clone().with_phase((x.phase() + phase) % 4);
        let oracle = gb.trace(&window.bit_pauli(&x)?) / norm;
        let channel = boundary_channel(&[(crate::number::Complex::one(), x)], lambda, delta, w)?;
        let (re, im) = channel.psi().to_f64_pair();
        worst = worst.max((oracle - Complex64::new(re, im)).norm());
    }
    let rd = gb.reduced_density(&qs);
    let rg = gg.reduced_density(&qs);
    let mut residual = 0.0f64;
    for (a, b) in rd.iter().zip(&rg) {
        for (u, v) in a.iter().zip(b) {
            residual = residual.max((u - v).norm());
        }
    }
    Ok(StateReport {
        lambda: lambda.to_string(),
        delta: delta.to_string(),
        gamma: gamma.to_string(),
        sweep,
        psi_of_one,
        max_psi_mismatch: worst,
        partial_trace_residual: residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundReport {
    pub region: String,
    pub edges: usize,
    pub ground_dim: usize,
    /// Half-edges sticking out of rough sides.
    pub dangling: usize,
}

/// Ground-space dimension of `p_Δ` with `Δ` the whole window.
pub fn ground_space(window: &DenseWindow) -> Result<GroundReport> {
    let region = *window.window().region();
    let gb = window.projector(&region)?.ground_basis();
    let dangling = window
        .window()
        .edges()
        .iter()
        .filter(|&&e| {
            [(region.x0, e.0), (region.x1, e.0), (region.y0, e.1), (region.y1, e.1)]
                .iter()
                .any(|&(side, c)| side == c && side.rem_euclid(2) == 1)
        })
        .count();
    Ok(GroundReport { region: region.to_string(), edges: window.edges(), ground_dim: gb.dim(), dangling })
}

/// Image of a box under the `q`-th element of the lattice's symmetry group
/// (rotations by `q mod 4` quarter turns, then a reflection `x -> -x` when
/// `q >= 4`).
fn transform(r: &Region, q: u8) -> Region {
    let t = r.rotated(q % 4);
    if q >= 4 {
        Region { x0: -t.x1, y0: t.y0, x1: -t.x0, y1: t.y1 }
    } else {
        t
    }
}

type PairKey = [i32; 8];

/// Smallest key of the pair over the symmetry group and even translations.
fn canonical_key(lambda: &Region, delta: &Region) -> PairKey {
    (0..8u8)
        .map(|q| {
            let (l, d) = (transform(lambda, q), transform(delta, q));
            let (dx, dy) = (2 * d.x0.div_euclid(2), 2 * d.y0.div_euclid(2));
            [d.x0 - dx, d.y0 - dy, d.x1 - dx, d.y1 - dy, l.x0 - dx, l.y0 - dy, l.x1 - dx, l.y1 - dy]
        })
        .min()
        .expect("the group is nonempty")
}

/// Whether `Λ` contains the inner edges of the `y_j`; a `Λ` one edge thick
/// along its shared side only sees the `x_i`.
fn holds_generators(lambda: &Region, interval: &Interval) -> bool {
    (0..interval.len().saturating_sub(1)).all(|j| lambda.contains(interval.inner_edge(j)))
}

/// Every `Λ ⊂ Δ` with `Δ` of at most `cap` edges and `Λ ≪ Δ` or `Λ ⋐ Δ`
/// (surrounding constant one lattice spacing), where a shared-boundary `Λ`
/// must contain the support of its boundary generators; one pair per class under
/// even translations, quarter turns and reflections (all of which map the
/// Toric Code to itself). Ordered by canonical key.
pub fn admissible_pairs(cap: usize) -> Vec<(Region, Region, Relation)> {
    let mut keys = std::collections::BTreeSet::new();
    // a box with at most `cap` edges is narrower than 2 cap in each direction
    let span = 2 * cap as i32;
    for x0 in 0..2 {
        for y0 in 0..2 {
            for w in 0..span {
                for h in 0..span {
                    let Ok(delta) = Region::new(x0, y0, x0 + w, y0 + h) else { continue };
                    if delta.edges().len() > cap {
                        continue;
                    }
                    for lx0 in delta.x0..=delta.x1 {
                        for ly0 in delta.y0..=delta.y1 {
                            for lx1 in lx0..=delta.x1 {
                                for ly1 in ly0..=delta.y1 {
                                    let Ok(lambda) = Region::new(lx0, ly0, lx1, ly1) else { continue };
                                    let keep = match region_relation(&lambda, &delta, 2) {
                                        Ok(Relation::CompletelySurrounds) => true,
                                        Ok(Relation::SurroundsWithSharedBoundary(i)) => holds_generators(&lambda, &i),
                                        _ => false,
                                    };
                                    if keep {
                                        keys.insert(canonical_key(&lambda, &delta));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    keys.into_iter()
        .map(|k| {
            let delta = Region { x0: k[0], y0: k[1], x1: k[2], y1: k[3] };
            let lambda = Region { x0: k[4], y0: k[5], x1: k[6], y1: k[7] };
            let rel = region_relation(&lambda, &delta, 2).expect("valid surrounding constant");
            (lambda, delta, rel)
        })
        .collect()
}

/// `Δ` grown by one doubled unit on the first side (west, south, east,
/// north) that keeps the window within `cap` edges and is not `keep`.
fn grow_within(delta: &Region, cap: usize, keep: Option<Side>) -> Option<Region> {
    Side::ALL.iter().filter(|&&s| Some(s) != keep).find_map(|&side| {
        let (mut x0, mut y0, mut x1, mut y1) = (delta.x0, delta.y0, delta.x1, delta.y1);
        match side {
            Side::West => x0 -= 1,
            Side::South => y0 -= 1,
            Side::East => x1 += 1,
            Side::North => y1 += 1,
        }
        Region::new(x0, y0, x1, y1).ok().filter(|r| r.edges().len() <= cap)
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub cap: usize,
    pub windows: usize,
    pub surrounded_pairs: usize,
    pub shared_pairs: usize,
    pub lto1_max_deviation: f64,
    pub lto1_max_channel_mismatch: f64,
    pub state_max_psi_mismatch: f64,
    pub partial_trace_max_residual: f64,
    /// Pairs whose partial traces were compared against a strictly larger
    /// region; the others have no room for one under the cap.
    pub partial_trace_strict: usize,
    /// Shared pairs checked against a strictly larger `Δ'`.
    pub enlargement_strict: usize,
    pub lto234_passed: usize,
    /// Pairs that failed any check, as "Λ in Δ: reason".
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.lto234_passed == self.shared_pairs
    }
}

enum PairOutcome {
    Surrounded { lto1: Lto1Report, state: StateReport, strict: bool },
    Shared { rep: Lto234Report, strict: bool },
}

/// Runs the LTO and state checks on every pair from [`admissible_pairs`],
/// in parallel over pairs.
pub fn verify_all_windows(cap: usize, seed: u64) -> Result<SweepReport> {
    use rayon::prelude::*;
    let pairs = admissible_pairs(cap);
    let outcomes: Vec<Result<PairOutcome>> = pairs
        .par_iter()
        .map(|(lambda, delta, rel)| match rel {
            Relation::CompletelySurrounds => {
                let gamma = grow_within(delta, cap, None);
                let strict = gamma.is_some();
                let gamma = gamma.unwrap_or(*delta);
                let window = DenseWindow::new(gamma, cap)?;
                let lto1 = verify_lto1(lambda, delta, &window)?;
                let state = verify_state_uniqueness(lambda, delta, &gamma, &window, 50, seed)?;
                Ok(PairOutcome::Surrounded { lto1, state, strict })
            }
            Relation::SurroundsWithSharedBoundary(i) => {
                let larger = grow_within(delta, cap, Some(i.side));
                let strict = larger.is_some();
                let larger = larger.unwrap_or(*delta);
                let window = DenseWindow::new(larger, cap)?;
                let rep = verify_lto234(lambda, delta, &larger, &window, seed)?;
                Ok(PairOutcome::Shared { rep, strict })
            }
            Relation::None => unreachable!("filtered by admissible_pairs"),
        })
        .collect();
    let mut report = SweepReport { cap, ..SweepReport::default() };
    let mut deltas = std::collections::BTreeSet::new();
    for ((lambda, delta, _), out) in pairs.iter().zip(outcomes) {
        deltas.insert((delta.x0, delta.y0, delta.x1, delta.y1));
        match out? {
            PairOutcome::Surrounded { lto1, state, strict } => {
                report.surrounded_pairs += 1;
                report.lto1_max_deviation = report.lto1_max_deviation.max(lto1.max_deviation);
                report.lto1_max_channel_mismatch = report.lto1_max_channel_mismatch.max(lto1.max_channel_mismatch);
                report.state_max_psi_mismatch = report.state_max_psi_mismatch.max(state.max_psi_mismatch);
                report.partial_trace_max_residual = report.partial_trace_max_residual.max(state.partial_trace_residual);
                report.partial_trace_strict += strict as usize;
                if !lto1.passed() || !state.passed() {
                    report.failures.push(format!("{lambda} in {delta}: scalar or state check"));
                }
            }
            PairOutcome::Shared { rep, strict } => {
                report.shared_pairs += 1;
                report.enlargement_strict += strict as usize;
                if rep.passed() {
                    report.lto234_passed += 1;
                } else {
                    report.failures.push(format!("{lambda} in {delta}: boundary ranks {rep:?}"));
                }
            }
        }
    }
    report.windows = deltas.len();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_plaquette_projector() {
        let r = Region::parse("rect 0 0 1 1").unwrap();
        let w = DenseWindow::new(r, DEFAULT_EDGE_CAP).unwrap();
        let (_, rep) = build_projector(&r, &w).unwrap();
        assert_eq!(rep.rank, 8);
        assert!(rep.idempotence_error < 1e-12);
    }

    #[test]
    fn two_by_two_rough_ground_space() {
        let r = Region::parse("rect 0 0 1 1 rough").unwrap();
        let w = DenseWindow::new(r, DEFAULT_EDGE_CAP).unwrap();
        let rep = ground_space(&w).unwrap();
        assert_eq!(rep.dangling, 8);
        assert_eq!(rep.ground_dim, 1 << 7);
    }

    #[test]
    fn lto1_smallest() {
        let lambda = Region::new(1, 0, 1, 0).unwrap();
        let delta = Region::new(-1, -2, 3, 2).unwrap();
        let w = DenseWindow::new(delta, DEFAULT_EDGE_CAP).unwrap();
        let rep = verify_lto1(&lambda, &delta, &w).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn orbit_shortcut_matches_the_full_sum() {
        let r = Region::parse("rect 0 0 2 1 rough").unwrap();
        let w = DenseWindow::new(r, DEFAULT_EDGE_CAP).unwrap();
        let gb = w.projector(&r).unwrap().ground_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mask = (1u64 << w.edges()) - 1;
        for _ in 0..200 {
            let p = BitPauli { phase: rng.gen_range(0..4), x: (rng.gen::<u64>() & mask) as u32, z: (rng.gen::<u64>() & mask) as u32 };
            let fast = gb.compress(&p);
            let slow = gb.compress_by_summing(&p);
            assert_eq!(fast.len(), slow.len());
            for (k, v) in &slow {
                assert!((fast[k] - v).norm() < 1e-12);
            }
        }
    }
}
