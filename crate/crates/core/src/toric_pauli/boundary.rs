//! Boundary algebras of the Toric Code on an interval of `n + 1` sites.
//!
//! Abstractly the algebra is generated by self-adjoint unitaries
//! `x_1..x_{n+1}` and `y_1..y_n`: the `x` commute among themselves, the `y`
//! commute among themselves, `y_j` anticommutes with `x_j` and `x_{j+1}` and
//! commutes with every other `x`. Elements are kept in the canonical form
//! `sum c_{a,b} x^a y^b` with `x^a = x_1^{a_1}...x_{n+1}^{a_{n+1}}` and
//! `y^b = y_1^{b_1}...y_n^{b_n}`; bit `i` of `a` (resp. `b`) is the exponent of
//! `x_{i+1}` (resp. `y_{i+1}`).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion_ring::FusionRing;
use crate::number::{Complex, Precision};
use crate::path_net::{PathNet, PathPairOperator};

use super::lattice::{BoundaryKind, Interval, Window};
use super::pauli::PauliMonomial;

/// Largest interval handled; `a` must fit a `u64`.
pub const MAX_SITES: usize = 63;

/// Canonical monomials are enumerated only up to this many sites.
pub const MAX_ENUMERATED_SITES: usize = 10;

/// Path-net structure constants are compared up to this many sites.
pub const MAX_PATH_NET_SITES: usize = 4;

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::invalid(format!(
            "an interval needs between 1 and {MAX_SITES} sites, got {sites}"
        )));
    }
    Ok(())
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Exponent of `-1` in `y^b x^{a'} = ± x^{a'} y^b`.
pub fn exchange_sign(b: u64, a: u64) -> u32 {
    ((b & a).count_ones() + (b & (a >> 1)).count_ones()) % 2
}

/// Element of the abstract boundary algebra on `sites = n + 1` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryElement {
    sites: usize,
    kind: BoundaryKind,
    terms: BTreeMap<(u64, u64), Complex>,
}

impl BoundaryElement {
    pub fn zero(sites: usize, kind: BoundaryKind) -> Result<BoundaryElement> {
        check_sites(sites)?;
        Ok(BoundaryElement { sites, kind, terms: BTreeMap::new() })
    }

    pub fn one(sites: usize, kind: BoundaryKind) -> Result<BoundaryElement> {
        BoundaryElement::monomial(sites, kind, 0, 0)
    }

    /// `x^a y^b`.
    pub fn monomial(sites: usize, kind: BoundaryKind, a: u64, b: u64) -> Result<BoundaryElement> {
        let mut e = BoundaryElement::zero(sites, kind)?;
        if a & !mask(sites) != 0 || b & !mask(sites - 1) != 0 {
            return Err(Error::invalid(format!("exponents ({a:#b}, {b:#b}) exceed {sites} sites")));
        }
        e.terms.insert((a, b), Complex::one());
        Ok(e)
    }

    /// `x_i`, 1-based.
    pub fn x(sites: usize, kind: BoundaryKind, i: usize) -> Result<BoundaryElement> {
        if i == 0 || i > sites {
            return Err(Error::invalid(format!("x_{i} out of range 1..={sites}")));
        }
        BoundaryElement::monomial(sites, kind, 1 << (i - 1), 0)
    }

    /// `y_j`, 1-based.
    pub fn y(sites: usize, kind: BoundaryKind, j: usize) -> Result<BoundaryElement> {
        if j == 0 || j >= sites {
            return Err(Error::invalid(format!("y_{j} out of range 1..{sites}")));
        }
        BoundaryElement::monomial(sites, kind, 0, 1 << (j - 1))
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn terms(&self) -> &BTreeMap<(u64, u64), Complex> {
        &self.terms
    }

    pub fn coefficient(&self, a: u64, b: u64) -> Complex {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, a: u64, b: u64, c: Complex) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((a, b)).or_insert_with(Complex::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    fn check_same(&self, other: &BoundaryElement) -> Result<()> {
        if self.sites != other.sites || self.kind != other.kind {
            return Err(Error::invalid(format!(
                "boundary elements on different intervals ({} {} vs {} {})",
                self.sites, self.kind, other.sites, other.kind
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &Complex) -> BoundaryElement {
        let mut out = BoundaryElement { sites: self.sites, kind: self.kind, terms: BTreeMap::new() };
        for (&(a, b), v) in &self.terms {
            out.add_term(a, b, v * c);
        }
        out
    }

    pub fn add(&self, other: &BoundaryElement) -> Result<BoundaryElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&(a, b), v) in &other.terms {
            out.add_term(a, b, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BoundaryElement) -> Result<BoundaryElement> {
        self.add(&other.scale(&-Complex::one()))
    }

    pub fn mul(&self, other: &BoundaryElement) -> Result<BoundaryElement> {
        self.check_same(other)?;
        let mut out = BoundaryElement { sites: self.sites, kind: self.kind, terms: BTreeMap::new() };
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                let c = c1 * c2;
                let c = if exchange_sign(b1, a2) == 1 { -c } else { c };
                out.add_term(a1 ^ a2, b1 ^ b2, c);
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> BoundaryElement {
        // (x^a y^b)^* = y^b x^a
        let mut out = BoundaryElement { sites: self.sites, kind: self.kind, terms: BTreeMap::new() };
        for (&(a, b), c) in &self.terms {
            let c = c.conj();
            let c = if exchange_sign(b, a) == 1 { -c } else { c };
            out.add_term(a, b, c);
        }
        out
    }

    /// Coefficient of the identity monomial.
    pub fn psi_b(&self) -> Complex {
        self.coefficient(0, 0)
    }

    /// Product state absorbing `σ^Z`: each monomial contributes its phase
    /// when its chain image has no `X` part.
    pub fn phi_z(&self) -> Complex {
        self.product_state(true)
    }

    /// Product state absorbing `σ^X`.
    pub fn phi_x(&self) -> Complex {
        self.product_state(false)
    }

    fn product_state(&self, z_basis: bool) -> Complex {
        let mut acc = Complex::zero();
        for (&(a, b), c) in &self.terms {
            let p = chain_image(self.sites, self.kind, a, b);
            let empty = if z_basis { p.x_part().is_clear() } else { p.z_part().is_clear() };
            if empty {
                acc = acc + c * &p.phase_value();
            }
        }
        acc
    }
}

fn monomial_name(a: u64, b: u64, sites: usize) -> String {
    let mut parts = Vec::new();
    for i in 0..sites {
        if a >> i & 1 == 1 {
            parts.push(format!("x{}", i + 1));
        }
    }
    for j in 0..sites.saturating_sub(1) {
        if b >> j & 1 == 1 {
            parts.push(format!("y{}", j + 1));
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

impl fmt::Display for BoundaryElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| {
                let m = monomial_name(a, b, self.sites);
                if c.is_exact() && c.re.is_one() && c.im.is_zero() {
                    m
                } else {
                    format!("({c}) {m}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Image of `x^a y^b` on a chain of `sites` qubits: `x_i -> σ^X_i`,
/// `y_j -> σ^Z_j σ^Z_{j+1}` for rough intervals, letters swapped for smooth.
pub fn chain_image(sites: usize, kind: BoundaryKind, a: u64, b: u64) -> PauliMonomial {
    let boundary = (b ^ (b << 1)) & mask(sites);
    let bits = |v: u64| {
        let mut s = FixedBitSet::with_capacity(sites);
        for q in 0..sites {
            if v >> q & 1 == 1 {
                s.insert(q);
            }
        }
        s
    };
    let empty = FixedBitSet::with_capacity(sites);
    match kind {
        BoundaryKind::Rough => PauliMonomial::from_parts(0, bits(a), bits(boundary)),
        BoundaryKind::Smooth => {
            let za = PauliMonomial::from_parts(0, empty.clone(), bits(a));
            let xb = PauliMonomial::from_parts(0, bits(boundary), empty);
            za.mul(&xb)
        }
    }
}

/// Lattice realization of the generators on a window: rough `x_i = σ^X` on
/// site `i`, `y_j = σ^Z` on sites `j`, `j + 1` and the inner edge between
/// them; smooth swaps the letters.
pub fn lattice_generators(interval: &Interval, window: &Window) -> Result<(Vec<PauliMonomial>, Vec<PauliMonomial>)> {
    let q = |e| {
        window
            .index(e)
            .ok_or_else(|| Error::invalid(format!("boundary edge {e:?} lies outside the window")))
    };
    let n = window.len();
    let (xl, yl): (fn(usize, &[usize]) -> PauliMonomial, fn(usize, &[usize]) -> PauliMonomial) = match interval.kind {
        BoundaryKind::Rough => (PauliMonomial::x_on, PauliMonomial::z_on),
        BoundaryKind::Smooth => (PauliMonomial::z_on, PauliMonomial::x_on),
    };
    let xs = interval
        .sites
        .iter()
        .map(|&s| Ok(xl(n, &[q(s)?])))
        .collect::<Result<Vec<_>>>()?;
    let ys = (0..interval.len() - 1)
        .map(|j| {
            let e = interval.y_edges(j);
            Ok(yl(n, &[q(e[0])?, q(e[1])?, q(e[2])?]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((xs, ys))
}

/// `x^a y^b` realized by the given generator images.
pub fn realize(xs: &[PauliMonomial], ys: &[PauliMonomial], a: u64, b: u64) -> PauliMonomial {
    let qubits = xs.first().map(PauliMonomial::qubits).unwrap_or(0);
    let mut p = PauliMonomial::identity(qubits);
    for (i, x) in xs.iter().enumerate() {
        if a >> i & 1 == 1 {
            p = p.mul(x);
        }
    }
    for (j, y) in ys.iter().enumerate() {
        if b >> j & 1 == 1 {
            p = p.mul(y);
        }
    }
    p
}

/// All `(a, b)` exponent pairs, `a` outer.
pub fn canonical_basis(sites: usize) -> Result<Vec<(u64, u64)>> {
    check_sites(sites)?;
    if sites > MAX_ENUMERATED_SITES {
        return Err(Error::Resource(format!(
            "enumerating the basis on {sites} sites exceeds the cap of {MAX_ENUMERATED_SITES}"
        )));
    }
    let mut out = Vec::with_capacity(1 << (2 * sites - 1));
    for a in 0..1u64 << sites {
        for b in 0..1u64 << (sites - 1) {
            out.push((a, b));
        }
    }
    Ok(out)
}

/// Rank over F_2 of a list of row vectors.
fn f2_rank(mut rows: Vec<u128>) -> usize {
    let mut rank = 0;
    for bit in (0..128).rev() {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && *r >> bit & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryAlgebraReport {
    pub sites: usize,
    pub kind: String,
    /// `log_2` of the dimension of the span of canonical monomials.
    pub log2_dimension: usize,
    pub dimension: u128,
    pub center_dimension: u128,
    /// Sizes `m` of the matrix blocks `M_m`.
    pub blocks: Vec<u128>,
}

impl BoundaryAlgebraReport {
    pub fn blocks_label(&self) -> String {
        self.blocks.iter().map(|m| format!("M{m}")).collect::<Vec<_>>().join("+")
    }
}

impl fmt::Display for BoundaryAlgebraReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim={} blocks={}", self.dimension, self.blocks_label())
    }
}

/// Dimension, center and block structure of the boundary algebra.
///
/// The span of the canonical monomials is computed as the number of distinct
/// chain images (an F_2 rank); the center is spanned by the monomials
/// commuting with every generator, i.e. the kernel of the commutation map;
/// the blocks split along that center.
pub fn boundary_algebra(sites: usize, kind: BoundaryKind) -> Result<BoundaryAlgebraReport> {
    check_sites(sites)?;
    if 2 * sites > 128 {
        return Err(Error::Resource(format!("{sites} sites exceed the symplectic word size")));
    }
    let n = sites - 1;
    // Columns of the map (a, b) -> (x part, z part) of the chain image.
    let pack = |p: &PauliMonomial| {
        let mut v = 0u128;
        for q in p.x_part().ones() {
            v |= 1 << q;
        }
        for q in p.z_part().ones() {
            v |= 1 << (sites + q);
        }
        v
    };
    let mut images = Vec::with_capacity(2 * n + 1);
    for i in 0..sites {
        images.push(pack(&chain_image(sites, kind, 1 << i, 0)));
    }
    for j in 0..n {
        images.push(pack(&chain_image(sites, kind, 0, 1 << j)));
    }
    let rank = f2_rank(images);
    // Commutation map: row per generator, column per monomial exponent bit.
    let gens: Vec<(u64, u64)> = (0..sites).map(|i| (1u64 << i, 0)).chain((0..n).map(|j| (0, 1u64 << j))).collect();
    let mut comm_rows = Vec::new();
    for &(ga, gb) in &gens {
        let mut row = 0u128;
        for (col, &(ma, mb)) in gens.iter().enumerate() {
            // monomial generator m vs generator g: commute iff
            // exchange(m_b, g_a) + exchange(g_b, m_a) is even
            if (exchange_sign(mb, ga) + exchange_sign(gb, ma)) % 2 == 1 {
                row |= 1 << col;
            }
        }
        comm_rows.push(row);
    }
    let comm_rank = f2_rank(comm_rows);
    let center_log = (2 * n + 1) - comm_rank;
    let dimension = 1u128 << rank;
    let center_dimension = 1u128 << center_log;
    let block_dim = dimension / center_dimension;
    let m = (block_dim as f64).sqrt().round() as u128;
    if m * m != block_dim {
        return Err(Error::invalid(format!("block dimension {block_dim} is not a square")));
    }
    Ok(BoundaryAlgebraReport {
        sites,
        kind: kind.to_string(),
        log2_dimension: rank,
        dimension,
        center_dimension,
        blocks: vec![m; center_dimension as usize],
    })
}

/// Checks the defining relations on concrete generator images; returns the
/// list of violated relations.
pub fn relation_failures(xs: &[PauliMonomial], ys: &[PauliMonomial]) -> Vec<String> {
    let mut bad = Vec::new();
    let named: Vec<(String, &PauliMonomial)> = xs
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("x{}", i + 1), p))
        .chain(ys.iter().enumerate().map(|(j, p)| (format!("y{}", j + 1), p)))
        .collect();
    for (name, p) in &named {
        if !p.is_hermitian() {
            bad.push(format!("{name} is not self-adjoint"));
        }
        let sq = p.mul(p);
        if !(sq.is_identity_up_to_phase() && sq.phase() == 0) {
            bad.push(format!("{name}^2 != 1"));
        }
    }
    for (i, x) in xs.iter().enumerate() {
        for (k, x2) in xs.iter().enumerate().skip(i + 1) {
            if !x.commutes(x2) {
                bad.push(format!("x{} and x{} anticommute", i + 1, k + 1));
            }
        }
        for (j, y) in ys.iter().enumerate() {
            let should_anti = i == j || i == j + 1;
            if x.commutes(y) == should_anti {
                bad.push(format!("x{} and y{}: wrong commutation", i + 1, j + 1));
            }
        }
    }
    for (j, y) in ys.iter().enumerate() {
        for (k, y2) in ys.iter().enumerate().skip(j + 1) {
            if !y.commutes(y2) {
                bad.push(format!("y{} and y{} anticommute", j + 1, k + 1));
            }
        }
    }
    bad
}

/// Hilb(Z/2) path net at level `sites` with the generator images
/// `u_i = sum (-1)^{label_i} E_ξξ` and `v_j` swapping labels `j`, `j + 1`.
pub struct PathNetImage {
    net: PathNet,
    level: usize,
    us: Vec<PathPairOperator>,
    vs: Vec<PathPairOperator>,
}

impl PathNetImage {
    pub fn new(sites: usize) -> Result<PathNetImage> {
        check_sites(sites)?;
        let ring = Arc::new(FusionRing::builtin("hilb_z2")?.with_dimensions(Precision::default())?);
        let net = PathNet::regular(ring)?;
        let paths = net.enumerate_paths(sites)?;
        let x = net.graph().x().to_vec();
        // labels are positions in X; the simple object is x[label]
        let mut by_bits: HashMap<u64, usize> = HashMap::new();
        let mut bits_of = Vec::with_capacity(paths.len());
        for (idx, p) in paths.iter().enumerate() {
            let mut bits = 0u64;
            for (step, l) in p.labels().enumerate() {
                if x[l] == 1 {
                    bits |= 1 << step;
                }
            }
            by_bits.insert(bits, idx);
            bits_of.push(bits);
        }
        let mut us = Vec::new();
        for i in 0..sites {
            let mut op = PathPairOperator::zero(sites);
            for (idx, &bits) in bits_of.iter().enumerate() {
                let c = if bits >> i & 1 == 1 { -Complex::one() } else { Complex::one() };
                op.add_term(idx, idx, c);
            }
            us.push(op);
        }
        let mut vs = Vec::new();
        for j in 0..sites - 1 {
            let mut op = PathPairOperator::zero(sites);
            for (idx, &bits) in bits_of.iter().enumerate() {
                let flipped = bits ^ (0b11 << j);
                let target = by_bits[&flipped];
                op.add_term(target, idx, Complex::one());
            }
            vs.push(op);
        }
        Ok(PathNetImage { net, level: sites, us, vs })
    }

    pub fn net(&self) -> &PathNet {
        &self.net
    }

    pub fn u(&self, i: usize) -> &PathPairOperator {
        &self.us[i]
    }

    pub fn v(&self, j: usize) -> &PathPairOperator {
        &self.vs[j]
    }

    /// `u^a v^b`.
    pub fn image(&self, a: u64, b: u64) -> Result<PathPairOperator> {
        let mut op = self.net.identity(self.level)?;
        for (i, u) in self.us.iter().enumerate() {
            if a >> i & 1 == 1 {
                op = op.multiply(u)?;
            }
        }
        for (j, v) in self.vs.iter().enumerate() {
            if b >> j & 1 == 1 {
                op = op.multiply(v)?;
            }
        }
        Ok(op)
    }

    /// Image of a boundary element.
    pub fn image_of(&self, e: &BoundaryElement) -> Result<PathPairOperator> {
        let mut op = PathPairOperator::zero(self.level);
        for (&(a, b), c) in e.terms() {
            op = op.add(&self.image(a, b)?.scale(c))?;
        }
        Ok(op)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorImage {
    pub abstract_name: String,
    pub fusion_net: String,
    pub pauli: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub sites: usize,
    pub kind: String,
    pub dictionary: Vec<GeneratorImage>,
    pub relation_failures: Vec<String>,
    pub image_dimension: u128,
    pub ambient_dimension: u128,
    /// Every image commutes with the chain parity operator.
    pub parity_preserving: bool,
    /// The image has as many monomials as the parity commutant.
    pub fills_parity_commutant: bool,
    pub pauli_pairs_checked: usize,
    pub pauli_mismatches: usize,
    pub path_net_pairs_checked: usize,
    pub path_net_mismatches: usize,
    pub markov_mismatches: usize,
}

impl IsoReport {
    pub fn verified(&self) -> bool {
        self.relation_failures.is_empty()
            && self.parity_preserving
            && self.fills_parity_commutant
            && self.pauli_mismatches == 0
            && self.path_net_mismatches == 0
            && self.markov_mismatches == 0
    }
}

fn pauli_string(p: &PauliMonomial) -> String {
    let mut words = Vec::new();
    for q in p.support() {
        let l = match (p.x_part().contains(q), p.z_part().contains(q)) {
            (true, true) => "Y",
            (true, false) => "X",
            _ => "Z",
        };
        words.push(format!("σ^{l}_{}", q + 1));
    }
    words.join(" ")
}

/// Generator dictionary to the chain Pauli algebra and to the Hilb(Z/2)
/// path net at level `sites`, with the relations, image dimension, full
/// structure-constant comparison and the Markov trace checked.
pub fn fusion_net_iso(sites: usize, kind: BoundaryKind) -> Result<IsoReport> {
    check_sites(sites)?;
    let n = sites - 1;
    let xs: Vec<PauliMonomial> = (0..sites).map(|i| chain_image(sites, kind, 1 << i, 0)).collect();
    let ys: Vec<PauliMonomial> = (0..n).map(|j| chain_image(sites, kind, 0, 1 << j)).collect();
    let failures = relation_failures(&xs, &ys);

    let parity = match kind {
        BoundaryKind::Rough => chain_image(sites, BoundaryKind::Rough, mask(sites), 0),
        BoundaryKind::Smooth => chain_image(sites, BoundaryKind::Smooth, mask(sites), 0),
    };
    let parity_preserving = xs.iter().chain(ys.iter()).all(|g| g.commutes(&parity));
    let algebra = boundary_algebra(sites, kind)?;
    let ambient = 1u128 << (2 * sites);
    // the commutant of one nontrivial Pauli string is half of all strings
    let commutant = ambient / 2;

    let path = if sites <= MAX_PATH_NET_SITES { Some(PathNetImage::new(sites)?) } else { None };
    let mut dictionary = Vec::new();
    for i in 0..sites {
        dictionary.push(GeneratorImage {
            abstract_name: format!("x{}", i + 1),
            fusion_net: format!("u{}", i + 1),
            pauli: pauli_string(&xs[i]),
        });
    }
    for j in 0..n {
        dictionary.push(GeneratorImage {
            abstract_name: format!("y{}", j + 1),
            fusion_net: format!("v{}", j + 1),
            pauli: pauli_string(&ys[j]),
        });
    }

    let (mut pauli_pairs, mut pauli_bad, mut path_pairs, mut path_bad, mut markov_bad) = (0, 0, 0, 0, 0);
    if sites <= MAX_ENUMERATED_SITES.min(6) {
        let basis = canonical_basis(sites)?;
        let chain: Vec<PauliMonomial> = basis.iter().map(|&(a, b)| chain_image(sites, kind, a, b)).collect();
        let index: HashMap<(u64, u64), usize> = basis.iter().enumerate().map(|(k, &m)| (m, k)).collect();
        let path_images = match &path {
            Some(p) => Some(basis.iter().map(|&(a, b)| p.image(a, b)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        for (k1, &(a1, b1)) in basis.iter().enumerate() {
            for (k2, &(a2, b2)) in basis.iter().enumerate() {
                let sign = exchange_sign(b1, a2);
                let k3 = index[&(a1 ^ a2, b1 ^ b2)];
                // abstract: m1 m2 = (-1)^sign m3
                let prod = chain[k1].mul(&chain[k2]);
                let expect = chain[k3].clone().with_phase((chain[k3].phase() + 2 * sign as u8) % 4);
                pauli_pairs += 1;
                if prod != expect {
                    pauli_bad += 1;
                }
                if let Some(images) = &path_images {
                    path_pairs += 1;
                    let lhs = images[k1].multiply(&images[k2])?;
                    let s = if sign == 1 { -Complex::one() } else { Complex::one() };
                    if lhs != images[k3].scale(&s) {
                        path_bad += 1;
                    }
                }
            }
        }
        if let (Some(p), Some(images)) = (&path, &path_images) {
            for (k, &(a, b)) in basis.iter().enumerate() {
                let e = BoundaryElement::monomial(sites, kind, a, b)?;
                let markov = p.net().markov_trace(&images[k])?;
                if !(&markov - &e.psi_b()).is_zero() {
                    markov_bad += 1;
                }
            }
        }
    }
    Ok(IsoReport {
        sites,
        kind: kind.to_string(),
        dictionary,
        relation_failures: failures,
        image_dimension: algebra.dimension,
        ambient_dimension: ambient,
        parity_preserving,
        fills_parity_commutant: algebra.dimension == commutant,
        pauli_pairs_checked: pauli_pairs,
        pauli_mismatches: pauli_bad,
        path_net_pairs_checked: path_pairs,
        path_net_mismatches: path_bad,
        markov_mismatches: markov_bad,
    })
}

/// Number of distinct images of the canonical monomials under a concrete
/// realization; equals the dimension of their span since distinct Pauli
/// strings are linearly independent.
pub fn realized_dimension(xs: &[PauliMonomial], ys: &[PauliMonomial]) -> Result<usize> {
    let basis = canonical_basis(xs.len())?;
    let mut seen = HashSet::new();
    for (a, b) in basis {
        let p = realize(xs, ys, a, b);
        seen.insert((p.x_part().clone(), p.z_part().clone()));
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let r = boundary_algebra(1, BoundaryKind::Rough).unwrap();
        assert_eq!((r.dimension, r.blocks_label()), (2, "M1+M1".to_string()));
        let r = boundary_algebra(3, BoundaryKind::Smooth).unwrap();
        assert_eq!(r.to_string(), "dim=32 blocks=M4+M4");
    }

    #[test]
    fn anticommutation_in_canonical_form() {
        let k = BoundaryKind::Rough;
        let x1 = BoundaryElement::x(2, k, 1).unwrap();
        let y1 = BoundaryElement::y(2, k, 1).unwrap();
        let xy = x1.mul(&y1).unwrap();
        let yx = y1.mul(&x1).unwrap();
        assert_eq!(xy, yx.scale(&-Complex::one()));
        assert_eq!(y1.mul(&y1).unwrap(), BoundaryElement::one(2, k).unwrap());
    }

    #[test]
    fn iso_small() {
        for kind in [BoundaryKind::Rough, BoundaryKind::Smooth] {
            for sites in 1..=3 {
                let r = fusion_net_iso(sites, kind).unwrap();
                assert!(r.verified(), "{r:?}");
            }
        }
    }

    #[test]
    fn states() {
        let k = BoundaryKind::Rough;
        let one = BoundaryElement::one(3, k).unwrap();
        assert_eq!(one.psi_b(), Complex::one());
        let x1 = BoundaryElement::x(3, k, 1).unwrap();
        let y1 = BoundaryElement::y(3, k, 1).unwrap();
        assert!(x1.psi_b().is_zero());
        assert_eq!(y1.phi_z(), Complex::one());
        assert!(x1.phi_z().is_zero());
        assert_eq!(x1.phi_x(), Complex::one());
    }
}
