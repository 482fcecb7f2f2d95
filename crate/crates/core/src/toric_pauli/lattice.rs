//! Geometry of the Toric Code on the square lattice.
//!
//! Everything lives on the doubled grid: vertices (stars) at (even, even),
//! faces (plaquettes) at (odd, odd), horizontal edges at (odd, even) and
//! vertical edges at (even, odd). A region is a box of the doubled grid and
//! contains the edges inside it. A side at an odd coordinate cuts through
//! edges and is rough; a side at an even coordinate runs along edges and is
//! smooth.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

use super::pauli::PauliMonomial;

/// A point of the doubled grid.
pub type Site = (i32, i32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    West,
    South,
    East,
    North,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::West, Side::South, Side::East, Side::North];

    /// Outward unit normal in doubled coordinates.
    pub fn normal(self) -> (i32, i32) {
        match self {
            Side::West => (-1, 0),
            Side::South => (0, -1),
            Side::East => (1, 0),
            Side::North => (0, 1),
        }
    }

    /// Image under a quarter turn counterclockwise.
    pub fn turned(self) -> Side {
        match self {
            Side::East => Side::North,
            Side::North => Side::West,
            Side::West => Side::South,
            Side::South => Side::East,
        }
    }

    /// Quarter turns counterclockwise taking this side to the east.
    pub fn turns_to_east(self) -> u8 {
        match self {
            Side::East => 0,
            Side::South => 1,
            Side::West => 2,
            Side::North => 3,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::West => "west",
            Side::South => "south",
            Side::East => "east",
            Side::North => "north",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Rough,
    Smooth,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryKind::Rough => "rough",
            BoundaryKind::Smooth => "smooth",
        })
    }
}

impl std::str::FromStr for BoundaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<BoundaryKind> {
        match s {
            "rough" => Ok(BoundaryKind::Rough),
            "smooth" => Ok(BoundaryKind::Smooth),
            other => Err(Error::Parse(format!("expected rough or smooth, got {other:?}"))),
        }
    }
}

pub fn is_edge(s: Site) -> bool {
    (s.0 + s.1).rem_euclid(2) == 1
}

pub fn is_vertex(s: Site) -> bool {
    s.0.rem_euclid(2) == 0 && s.1.rem_euclid(2) == 0
}

pub fn is_face(s: Site) -> bool {
    s.0.rem_euclid(2) == 1 && s.1.rem_euclid(2) == 1
}

/// The four edges around a vertex or a face.
pub fn neighbours(s: Site) -> [Site; 4] {
    [(s.0 - 1, s.1), (s.0, s.1 - 1), (s.0 + 1, s.1), (s.0, s.1 + 1)]
}

/// `q` quarter turns counterclockwise about the origin.
pub fn rotate(s: Site, q: u8) -> Site {
    let mut p = s;
    for _ in 0..q % 4 {
        p = (-p.1, p.0);
    }
    p
}

/// Half-translation `(X, Y) -> (X + 1, Y + 1)`: swaps vertices with faces and
/// horizontal with vertical edges.
pub fn half_translate(s: Site) -> Site {
    (s.0 + 1, s.1 + 1)
}

/// Inclusive box of the doubled grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Region {
    pub fn new(x0: i32, y0: i32, x1: i32, y1: i32) -> Result<Region> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::invalid(format!(
                "malformed region [{x0},{x1}]x[{y0},{y1}]"
            )));
        }
        let r = Region { x0, y0, x1, y1 };
        if r.edges().is_empty() {
            return Err(Error::invalid("region contains no edges"));
        }
        Ok(r)
    }

    /// Box spanned by the lattice vertices `(x0..=x1, y0..=y1)`; a rough side
    /// adds the half edges sticking out of it. Kinds are west, south, east,
    /// north.
    pub fn from_vertex_rect(x0: i32, y0: i32, x1: i32, y1: i32, kinds: [BoundaryKind; 4]) -> Result<Region> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::invalid(format!("malformed rect {x0} {y0} {x1} {y1}")));
        }
        let pad = |k: BoundaryKind| if k == BoundaryKind::Rough { 1 } else { 0 };
        Region::new(
            2 * x0 - pad(kinds[0]),
            2 * y0 - pad(kinds[1]),
            2 * x1 + pad(kinds[2]),
            2 * y1 + pad(kinds[3]),
        )
    }

    /// Parses `rect x0 y0 x1 y1 [kind | kind kind kind kind]` with kinds in
    /// the order west, south, east, north; sides default to smooth.
    pub fn parse(text: &str) -> Result<Region> {
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.first() != Some(&"rect") || !(words.len() == 5 || words.len() == 6 || words.len() == 9) {
            return Err(Error::Parse(format!(
                "expected \"rect x0 y0 x1 y1 [rough|smooth per side]\", got {text:?}"
            )));
        }
        let mut c = [0i32; 4];
        for (i, w) in words[1..5].iter().enumerate() {
            c[i] = w.parse().map_err(|_| Error::Parse(format!("bad coordinate {w:?}")))?;
        }
        let kinds = match words.len() {
            5 => [BoundaryKind::Smooth; 4],
            6 => [words[5].parse()?; 4],
            _ => [words[5].parse()?, words[6].parse()?, words[7].parse()?, words[8].parse()?],
        };
        Region::from_vertex_rect(c[0], c[1], c[2], c[3], kinds)
    }

    pub fn contains(&self, s: Site) -> bool {
        self.x0 <= s.0 && s.0 <= self.x1 && self.y0 <= s.1 && s.1 <= self.y1
    }

    pub fn contains_region(&self, other: &Region) -> bool {
        self.x0 <= other.x0 && other.x1 <= self.x1 && self.y0 <= other.y0 && other.y1 <= self.y1
    }

    pub fn side_coordinate(&self, side: Side) -> i32 {
        match side {
            Side::West => self.x0,
            Side::South => self.y0,
            Side::East => self.x1,
            Side::North => self.y1,
        }
    }

    pub fn kind(&self, side: Side) -> BoundaryKind {
        if self.side_coordinate(side).rem_euclid(2) == 1 {
            BoundaryKind::Rough
        } else {
            BoundaryKind::Smooth
        }
    }

    /// Edges inside the box, ordered by (x, y).
    pub fn edges(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for x in self.x0..=self.x1 {
            for y in self.y0..=self.y1 {
                if is_edge((x, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Whether all four edges around `s` lie in the box.
    pub fn contains_stabilizer(&self, s: Site) -> bool {
        neighbours(s).iter().all(|&e| self.contains(e))
    }

    /// Stars then plaquettes whose edges all lie in the box, each ordered by
    /// (x, y).
    pub fn stabilizer_sites(&self) -> Vec<Stabilizer> {
        let mut stars = Vec::new();
        let mut faces = Vec::new();
        for x in self.x0 - 1..=self.x1 + 1 {
            for y in self.y0 - 1..=self.y1 + 1 {
                if !self.contains_stabilizer((x, y)) {
                    continue;
                }
                if is_vertex((x, y)) {
                    stars.push(Stabilizer::Star((x, y)));
                } else if is_face((x, y)) {
                    faces.push(Stabilizer::Plaquette((x, y)));
                }
            }
        }
        stars.extend(faces);
        stars
    }

    pub fn rotated(&self, q: u8) -> Region {
        let a = rotate((self.x0, self.y0), q);
        let b = rotate((self.x1, self.y1), q);
        Region { x0: a.0.min(b.0), y0: a.1.min(b.1), x1: a.0.max(b.0), y1: a.1.max(b.1) }
    }

    /// Margin between this box and a larger one on each side.
    pub fn margin_in(&self, outer: &Region, side: Side) -> i32 {
        match side {
            Side::West => self.x0 - outer.x0,
            Side::South => self.y0 - outer.y0,
            Side::East => outer.x1 - self.x1,
            Side::North => outer.y1 - self.y1,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x0, self.x1, self.y0, self.y1)
    }
}

/// A star `A_s` (at a vertex) or a plaquette `B_p` (at a face).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stabilizer {
    Star(Site),
    Plaquette(Site),
}

impl Stabilizer {
    pub fn at(s: Site) -> Option<Stabilizer> {
        if is_vertex(s) {
            Some(Stabilizer::Star(s))
        } else if is_face(s) {
            Some(Stabilizer::Plaquette(s))
        } else {
            None
        }
    }

    pub fn center(&self) -> Site {
        match *self {
            Stabilizer::Star(s) | Stabilizer::Plaquette(s) => s,
        }
    }

    pub fn edges(&self) -> [Site; 4] {
        neighbours(self.center())
    }

    /// Realized on a window; panics if an edge is outside it.
    pub fn monomial(&self, window: &Window) -> PauliMonomial {
        let qs: Vec<usize> = self
            .edges()
            .iter()
            .map(|&e| window.index(e).expect("stabilizer inside the window"))
            .collect();
        match self {
            Stabilizer::Star(_) => PauliMonomial::x_on(window.len(), &qs),
            Stabilizer::Plaquette(_) => PauliMonomial::z_on(window.len(), &qs),
        }
    }
}

impl fmt::Display for Stabilizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stabilizer::Star((x, y)) => write!(f, "A({x},{y})"),
            Stabilizer::Plaquette((x, y)) => write!(f, "B({x},{y})"),
        }
    }
}

/// Qubit indexing of the edges of a region.
#[derive(Clone, Debug)]
pub struct Window {
    region: Region,
    edges: Vec<Site>,
    index: HashMap<Site, usize>,
}

impl PartialEq for Window {
    fn eq(&self, other: &Window) -> bool {
        self.region == other.region
    }
}

impl Window {
    pub fn new(region: Region) -> Window {
        let edges = region.edges();
        let index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Window { region, edges, index }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Site] {
        &self.edges
    }

    pub fn edge(&self, q: usize) -> Site {
        self.edges[q]
    }

    pub fn index(&self, e: Site) -> Option<usize> {
        self.index.get(&e).copied()
    }

    /// Parses `[i^k] L@(x,y,d) ...` with `L` in `X`, `Y`, `Z` and `d` in
    /// `e` (edge east of vertex (x, y)) or `n` (edge north of it). A bare `I`
    /// is the identity.
    pub fn parse_monomial(&self, text: &str) -> Result<PauliMonomial> {
        let mut p = PauliMonomial::identity(self.len());
        let mut words = text.split_whitespace().peekable();
        let mut phase = 0u8;
        if let Some(w) = words.peek() {
            if let Some(k) = w.strip_prefix("i^") {
                phase = k
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad phase {w:?}")))?
                    .rem_euclid(4) as u8;
                words.next();
            }
        }
        for w in words {
            if w == "I" {
                continue;
            }
            let bad = || Error::Parse(format!("bad Pauli factor {w:?}; expected like X@(3,4,e)"));
            let (letter, rest) = w.split_once('@').ok_or_else(bad)?;
            let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let x: i32 = parts[0].parse().map_err(|_| bad())?;
            let y: i32 = parts[1].parse().map_err(|_| bad())?;
            let site = match parts[2] {
                "e" => (2 * x + 1, 2 * y),
                "n" => (2 * x, 2 * y + 1),
                _ => return Err(bad()),
            };
            let q = self.index(site).ok_or_else(|| {
                Error::invalid(format!("edge {w} lies outside the window {}", self.region))
            })?;
            let l = match letter {
                "X" => super::pauli::Letter::X,
                "Y" => super::pauli::Letter::Y,
                "Z" => super::pauli::Letter::Z,
                _ => return Err(bad()),
            };
            p = p.mul(&PauliMonomial::single(self.len(), q, l));
        }
        let total = (p.phase() + phase) % 4;
        Ok(p.with_phase(total))
    }

    /// Renders a monomial in the syntax accepted by [`Window::parse_monomial`].
    pub fn format_monomial(&self, p: &PauliMonomial) -> String {
        let mut words = Vec::new();
        // Y letters carry a factor i each relative to X Z.
        let ys = p.support().iter().filter(|&&q| p.letter(q) == super::pauli::Letter::Y).count();
        let phase = (p.phase() as i64 - ys as i64).rem_euclid(4);
        if phase != 0 {
            words.push(format!("i^{phase}"));
        }
        for q in p.support() {
            let (x, y) = self.edges[q];
            let (vx, vy, d) = if x.rem_euclid(2) == 1 {
                ((x - 1) / 2, y / 2, 'e')
            } else {
                (x / 2, (y - 1) / 2, 'n')
            };
            let l = match p.letter(q) {
                super::pauli::Letter::X => 'X',
                super::pauli::Letter::Y => 'Y',
                super::pauli::Letter::Z => 'Z',
                super::pauli::Letter::I => unreachable!(),
            };
            words.push(format!("{l}@({vx},{vy},{d})"));
        }
        if words.is_empty() {
            "I".to_string()
        } else {
            words.join(" ")
        }
    }
}

/// All `A_s`, `B_p` contained in the region, realized on the window.
pub fn stabilizer_generators(region: &Region, window: &Window) -> Vec<(Stabilizer, PauliMonomial)> {
    region
        .stabilizer_sites()
        .into_iter()
        .map(|s| (s, s.monomial(window)))
        .collect()
}

/// The part of a region's boundary shared with an enclosing region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub side: Side,
    pub kind: BoundaryKind,
    /// Boundary edges carrying the `x_i` generators, in increasing order of
    /// the coordinate along the side.
    pub sites: Vec<Site>,
}

impl Interval {
    /// The boundary interval of `region` on `side`.
    pub fn of(region: &Region, side: Side) -> Result<Interval> {
        let kind = region.kind(side);
        let c = region.side_coordinate(side);
        // rough sites have an even coordinate along the side, smooth ones odd
        let want = if kind == BoundaryKind::Rough { 0 } else { 1 };
        let (lo, hi) = match side {
            Side::West | Side::East => (region.y0, region.y1),
            Side::South | Side::North => (region.x0, region.x1),
        };
        let sites: Vec<Site> = (lo..=hi)
            .filter(|t| t.rem_euclid(2) == want)
            .map(|t| match side {
                Side::West | Side::East => (c, t),
                Side::South | Side::North => (t, c),
            })
            .collect();
        if sites.is_empty() {
            return Err(Error::invalid(format!("the {side} side of {region} has no boundary sites")));
        }
        Ok(Interval { side, kind, sites })
    }

    /// `n + 1`.
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Inner edge between sites `j` and `j + 1`.
    pub fn inner_edge(&self, j: usize) -> Site {
        let (a, b) = (self.sites[j], self.sites[j + 1]);
        let n = self.side.normal();
        ((a.0 + b.0) / 2 - n.0, (a.1 + b.1) / 2 - n.1)
    }

    /// Edges of `y_j`: two consecutive sites and the inner edge between them.
    pub fn y_edges(&self, j: usize) -> [Site; 3] {
        [self.sites[j], self.sites[j + 1], self.inner_edge(j)]
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} side, {} sites", self.kind, self.side, self.sites.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Every side of `Λ` is at least `s` inside `Δ`.
    CompletelySurrounds,
    /// One side of `Λ` lies on the boundary of `Δ`; the others are at least
    /// `s` inside.
    SurroundsWithSharedBoundary(Interval),
    None,
}

/// Classifies how `delta` surrounds `lambda`, with margins measured on the
/// doubled grid (`s = 2` is one lattice spacing).
pub fn region_relation(lambda: &Region, delta: &Region, s: i32) -> Result<Relation> {
    if s <= 0 {
        return Err(Error::invalid("surrounding constant must be positive"));
    }
    if !delta.contains_region(lambda) {
        return Ok(Relation::None);
    }
    let margins: Vec<(Side, i32)> = Side::ALL.iter().map(|&side| (side, lambda.margin_in(delta, side))).collect();
    let shared: Vec<Side> = margins.iter().filter(|(_, m)| *m == 0).map(|(side, _)| *side).collect();
    let others_ok = margins.iter().filter(|(_, m)| *m != 0).all(|(_, m)| *m >= s);
    if !others_ok {
        return Ok(Relation::None);
    }
    match shared.as_slice() {
        [] => Ok(Relation::CompletelySurrounds),
        [side] => Ok(Relation::SurroundsWithSharedBoundary(Interval::of(lambda, *side)?)),
        _ => Ok(Relation::None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_conventions() {
        let r = Region::parse("rect 0 0 2 2 rough smooth rough smooth").unwrap();
        assert_eq!(r, Region { x0: -1, y0: 0, x1: 5, y1: 4 });
        assert_eq!(r.kind(Side::West), BoundaryKind::Rough);
        assert_eq!(r.kind(Side::South), BoundaryKind::Smooth);
    }

    #[test]
    fn single_plaquette_window() {
        let r = Region::parse("rect 0 0 1 1").unwrap();
        assert_eq!(r.edges().len(), 4);
        let st = r.stabilizer_sites();
        assert_eq!(st, vec![Stabilizer::Plaquette((1, 1))]);
    }

    #[test]
    fn two_by_two_plaquettes() {
        let r = Region::parse("rect 0 0 2 2").unwrap();
        let st = r.stabilizer_sites();
        let faces = st.iter().filter(|s| matches!(s, Stabilizer::Plaquette(_))).count();
        let stars = st.iter().filter(|s| matches!(s, Stabilizer::Star(_))).count();
        assert_eq!((faces, stars), (4, 1));
        let w = Window::new(r);
        let gens = stabilizer_generators(&r, &w);
        for (_, a) in &gens {
            for (_, b) in &gens {
                assert!(a.commutes(b));
            }
        }
    }

    #[test]
    fn relations() {
        let delta = Region::parse("rect 0 0 6 6").unwrap();
        let inner = Region::parse("rect 2 2 4 4").unwrap();
        assert_eq!(region_relation(&inner, &delta, 2).unwrap(), Relation::CompletelySurrounds);
        let flush = Region::parse("rect 4 2 6 4").unwrap();
        match region_relation(&flush, &delta, 2).unwrap() {
            Relation::SurroundsWithSharedBoundary(i) => {
                assert_eq!(i.side, Side::East);
                assert_eq!(i.sites.len(), 2);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(region_relation(&delta, &delta, 2).unwrap(), Relation::None);
    }

    #[test]
    fn monomial_syntax_round_trips() {
        let w = Window::new(Region::parse("rect 0 0 3 3").unwrap());
        let p = w.parse_monomial("i^2 X@(1,1,e) Z@(0,2,n) Y@(2,2,e)").unwrap();
        let again = w.parse_monomial(&w.format_monomial(&p)).unwrap();
        assert_eq!(p, again);
    }
}
