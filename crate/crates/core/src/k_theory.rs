//! Dimension groups of stationary AF algebras: the trace pairing,
//! infinitesimals and the rank-one (UHF) pattern.
//!
//! The Bratteli matrix `A` acts on column vectors of vertex multiplicities:
//! `A[c2][c1]` counts edges `c1 -> c2`, so level `n` is `A^n e`.

use dashu::base::Signed;
use dashu::integer::IBig;
use dashu::rational::RBig;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion_ring::FusionRing;
use crate::number::Real;

/// Longest dimension sequence computed by [`dimension_sequence`].
pub const MAX_SEQUENCE: usize = 40;

#[derive(Clone, Debug)]
pub struct StationaryAfData {
    matrix: Vec<Vec<i64>>,
    unit: Vec<i64>,
    tau: Vec<Real>,
    eigenvalue: Real,
    exact: bool,
}

/// Why a witness survives in the inductive limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `det A != 0`, so no power of `A` kills a nonzero vector.
    Invertible { det: String },
    /// The witness lies in the eventual range of `A`, on which `A` restricts
    /// to an invertible map.
    EventuallyInvertible { range_dim: usize, det: String },
    /// `A^m v != 0` for `m <= checked`; the kernels of `A^m` stop growing by
    /// `m = k`, so the class is nonzero.
    NonAnnihilation { checked: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Infinitesimal {
    Witness { vector: Vec<i64>, certificate: Certificate },
    /// Every vector in the kernel of the pairing is killed by `A^steps`.
    None { steps: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum UhfReport {
    /// Rank-one matrix multiplying dimensions by `q` per level; the limit is
    /// `M_{radical^∞}` as a supernatural number.
    Uhf { q: String, radical: String, name: String },
    NotRankOne { rank: usize },
}

impl StationaryAfData {
    /// Validates a primitive non-negative square matrix and computes the
    /// normalized trace vector.
    pub fn new(matrix: Vec<Vec<i64>>, unit: Vec<i64>) -> Result<StationaryAfData> {
        let k = matrix.len();
        if k == 0 || matrix.iter().any(|r| r.len() != k) || unit.len() != k {
            return Err(Error::invalid("Bratteli matrix must be square and match the unit vector"));
        }
        if matrix.iter().flatten().any(|&x| x < 0) {
            return Err(Error::invalid("Bratteli matrix has a negative entry"));
        }
        if !is_primitive(&matrix) {
            return Err(Error::invalid("Bratteli matrix is not primitive"));
        }
        let (tau, eigenvalue, exact) = trace_vector(&matrix)?;
        let mut data = StationaryAfData { matrix, unit, tau, eigenvalue, exact };
        let norm = data.pair_unnormalized(&data.unit.clone());
        if norm.signum() <= 0 {
            return Err(Error::invalid("unit vector pairs non-positively with the trace"));
        }
        data.tau = data.tau.iter().map(|t| t / &norm).collect();
        Ok(data)
    }

    /// One step of the regular net: tensoring with `X = ⊕_c c`.
    pub fn one_sided(ring: &FusionRing) -> Result<StationaryAfData> {
        let k = ring.rank();
        let mut a = vec![vec![0i64; k]; k];
        for c1 in 0..k {
            for x in 0..k {
                for c2 in 0..k {
                    a[c2][c1] += ring.n(c1, x, c2) as i64;
                }
            }
        }
        StationaryAfData::new(a, unit_vector(k))
    }

    /// One coarse level: tensoring on both sides, `c1 -> a ⊗ c1 ⊗ b`.
    pub fn two_sided(ring: &FusionRing) -> Result<StationaryAfData> {
        let k = ring.rank();
        let mut a = vec![vec![0i64; k]; k];
        for c1 in 0..k {
            for x in 0..k {
                for y in 0..k {
                    for e in 0..k {
                        let left = ring.n(x, c1, e) as i64;
                        if left == 0 {
                            continue;
                        }
                        for c2 in 0..k {
                            a[c2][c1] += left * ring.n(e, y, c2) as i64;
                        }
                    }
                }
            }
        }
        StationaryAfData::new(a, unit_vector(k))
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn unit(&self) -> &[i64] {
        &self.unit
    }

    /// Trace vector with `τ·e = 1`.
    pub fn tau(&self) -> &[Real] {
        &self.tau
    }

    pub fn eigenvalue(&self) -> &Real {
        &self.eigenvalue
    }

    /// Whether `τ` and the eigenvalue are exact rationals.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    fn pair_unnormalized(&self, v: &[i64]) -> Real {
        self.tau
            .iter()
            .zip(v)
            .fold(Real::zero(), |acc, (t, &x)| acc + t * &Real::from_int(x))
    }

    pub fn apply(&self, v: &[IBig]) -> Vec<IBig> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(&a, x)| IBig::from(a) * x).sum())
            .collect()
    }

    /// Determinant over the rationals.
    pub fn determinant(&self) -> RBig {
        determinant(&to_q(&self.matrix))
    }

    pub fn rank(&self) -> usize {
        rank(&to_q(&self.matrix))
    }

    /// Dimension and determinant of `A` restricted to its eventual range
    /// (the column space of `A^k`).
    pub fn eventual_restriction(&self) -> (usize, RBig) {
        let (basis, restricted) = self.restriction();
        (basis.len(), determinant(&restricted))
    }

    fn restriction(&self) -> (Vec<Vec<RBig>>, Vec<Vec<RBig>>) {
        let k = self.size();
        let q = to_q(&self.matrix);
        let mut power = identity_q(k);
        for _ in 0..k {
            power = mat_mul(&q, &power);
        }
        let basis = column_basis(&power);
        let r = basis.len();
        // Column j of the restriction: coordinates of A b_j in the basis.
        let mut restricted = vec![vec![RBig::ZERO; r]; r];
        for (j, b) in basis.iter().enumerate() {
            let image = mat_vec(&q, b);
            let coords = solve_in_span(&basis, &image).expect("the eventual range is invariant");
            for i in 0..r {
                restricted[i][j] = coords[i].clone();
            }
        }
        (basis, restricted)
    }
}

fn unit_vector(k: usize) -> Vec<i64> {
    let mut e = vec![0; k];
    e[0] = 1;
    e
}

fn is_primitive(a: &[Vec<i64>]) -> bool {
    let k = a.len();
    let pattern: Vec<Vec<bool>> = a.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut power = pattern.clone();
    // Wielandt: a primitive matrix has A^m > 0 for m = (k-1)^2 + 1.
    for _ in 0..(k - 1) * (k - 1) + 1 {
        if power.iter().flatten().all(|&x| x) {
            return true;
        }
        let mut next = vec![vec![false; k]; k];
        for i in 0..k {
            for j in 0..k {
                next[i][j] = (0..k).any(|l| power[i][l] && pattern[l][j]);
            }
        }
        power = next;
    }
    power.iter().flatten().all(|&x| x)
}

/// Left Perron vector of `A` (unnormalized) and its eigenvalue. Exact when
/// the eigenvalue is an integer.
fn trace_vector(a: &[Vec<i64>]) -> Result<(Vec<Real>, Real, bool)> {
    let k = a.len();
    let mut v = vec![1.0f64; k];
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w: Vec<f64> = (0..k).map(|j| (0..k).map(|i| v[i] * a[i][j] as f64).sum()).collect();
        let norm: f64 = w.iter().sum();
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let delta = next.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        lambda = norm / v.iter().sum::<f64>();
        v = next;
        if delta < 1e-15 {
            break;
        }
    }
    let rounded = lambda.round();
    if (lambda - rounded).abs() < 1e-9 {
        let mut m = to_q(a);
        // kernel of A^T - λ I
        let mut t = transpose(&m);
        for (i, row) in t.iter_mut().enumerate() {
            row[i] = &row[i] - RBig::from(rounded as i64);
        }
        m = t;
        let kernel = kernel_basis(&m);
        if kernel.len() == 1 {
            let mut tau = kernel[0].clone();
            if tau.iter().any(|x| x.is_negative()) {
                tau.iter_mut().for_each(|x| *x = -x.clone());
            }
            if tau.iter().all(|x| x.is_positive()) {
                let tau = tau.into_iter().map(Real::from_rational).collect();
                return Ok((tau, Real::from_int(rounded as i64), true));
            }
        }
    }
    let tau = v
        .iter()
        .map(|&x| Real::from_float(crate::number::Float::try_from(x).expect("finite")))
        .collect();
    let lambda = Real::from_float(crate::number::Float::try_from(lambda).expect("finite"));
    Ok((tau, lambda, false))
}

/// `e, Ae, ..., A^n e`.
pub fn dimension_sequence(data: &StationaryAfData, n: usize) -> Result<Vec<Vec<IBig>>> {
    if n > MAX_SEQUENCE {
        return Err(Error::Resource(format!("sequence length {n} exceeds {MAX_SEQUENCE}")));
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut v: Vec<IBig> = data.unit.iter().map(|&x| IBig::from(x)).collect();
    out.push(v.clone());
    for _ in 0..n {
        v = data.apply(&v);
        out.push(v.clone());
    }
    Ok(out)
}

/// `τ·v` with `τ·e = 1`.
pub fn trace_pairing(data: &StationaryAfData, v: &[i64]) -> Result<Real> {
    if v.len() != data.size() {
        return Err(Error::invalid(format!(
            "vector has length {} but the diagram has {} vertices",
            v.len(),
            data.size()
        )));
    }
    Ok(data.pair_unnormalized(v))
}

/// Searches `‖v‖_∞ <= bound` for a vector with `τ·v = 0` whose class
/// survives in the limit. Candidates are ordered by sup-norm, then
/// lexicographically from the most negative entries, so the witness does not
/// depend on `bound`.
pub fn find_infinitesimal(data: &StationaryAfData, bound: i64) -> Result<Infinitesimal> {
    if bound < 1 {
        return Err(Error::invalid("bound must be at least 1"));
    }
    if !data.exact {
        return Err(Error::Inconclusive(
            "trace vector is irrational; only numeric pairings are available".to_string(),
        ));
    }
    let k = data.size();
    let side = (2 * bound + 1) as u128;
    side.checked_pow(k as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| Error::Resource(format!("search space (2*{bound}+1)^{k} is too large")))?;
    let det = data.determinant();
    let (range_basis, restricted) = data.restriction();
    let (range_dim, range_det) = (range_basis.len(), determinant(&restricted));
    let in_range = |v: &[i64]| {
        let v: Vec<RBig> = v.iter().map(|&x| RBig::from(x)).collect();
        solve_in_span(&range_basis, &v).is_some()
    };
    let decode = |mut idx: u128, r: i64| -> Vec<i64> {
        let side = (2 * r + 1) as u128;
        let mut v = vec![0i64; k];
        for slot in (0..k).rev() {
            v[slot] = (idx % side) as i64 - r;
            idx /= side;
        }
        v
    };
    let survives = |v: &[i64]| -> Option<Certificate> {
        if det != RBig::ZERO {
            return Some(Certificate::Invertible { det: det.to_string() });
        }
        if range_det != RBig::ZERO && in_range(v) {
            return Some(Certificate::EventuallyInvertible { range_dim, det: range_det.to_string() });
        }
        let mut w: Vec<IBig> = v.iter().map(|&x| IBig::from(x)).collect();
        for _ in 0..2 * k {
            w = data.apply(&w);
            if w.iter().all(|x| *x == IBig::ZERO) {
                return None;
            }
        }
        Some(Certificate::NonAnnihilation { checked: 2 * k })
    };
    // shells of growing sup-norm, lexicographic within a shell
    let found = (1..=bound).find_map(|r| {
        let count = ((2 * r + 1) as u128).pow(k as u32);
        (0..count).into_par_iter().find_map_first(|idx| {
            let v = decode(idx, r);
            if v.iter().map(|x| x.abs()).max() != Some(r) || !data.pair_unnormalized(&v).is_zero() {
                return None;
            }
            survives(&v).map(|c| (v, c))
        })
    });
    if let Some((vector, certificate)) = found {
        return Ok(Infinitesimal::Witness { vector, certificate });
    }
    // No witness in the box: certify that the whole pairing kernel dies.
    let tau_row: Vec<RBig> = data
        .tau
        .iter()
        .map(|t| t.as_rational().expect("exact trace").clone())
        .collect();
    let kernel = kernel_basis(&[tau_row]);
    let q = to_q(&data.matrix);
    let mut images = kernel;
    for steps in 1..=2 * k {
        images = images.iter().map(|b| mat_vec(&q, b)).collect();
        if images.iter().flatten().all(|x| *x == RBig::ZERO) {
            return Ok(Infinitesimal::None { steps });
        }
    }
    Err(Error::Inconclusive(format!(
        "no witness with entries bounded by {bound}, and the pairing kernel survives"
    )))
}

/// Rank-one matrices give UHF algebras `M_{q^∞}`; anything else is reported
/// as not rank one.
pub fn uhf_report(data: &StationaryAfData) -> UhfReport {
    let r = data.rank();
    if r != 1 {
        return UhfReport::NotRankOne { rank: r };
    }
    // A = u w^T, so A^2 = (w·u) A and the per-level factor is tr(A).
    let q: i64 = (0..data.size()).map(|i| data.matrix[i][i]).sum();
    let radical = radical(q as u64);
    UhfReport::Uhf {
        q: q.to_string(),
        radical: radical.to_string(),
        name: format!("M_{{{radical}^∞}}"),
    }
}

fn radical(mut n: u64) -> u64 {
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out *= p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out *= n;
    }
    out
}

#[derive(Serialize)]
pub struct K0Report {
    pub matrix: Vec<Vec<i64>>,
    pub tau: Vec<String>,
    pub eigenvalue: String,
    pub exact: bool,
    pub determinant: String,
    pub eventual_range: EventualRange,
    pub infinitesimal: Option<Infinitesimal>,
    pub uhf: UhfReport,
}

#[derive(Serialize)]
pub struct EventualRange {
    pub dim: usize,
    pub det: String,
}

pub fn k0_report(data: &StationaryAfData, bound: i64, digits: u32) -> Result<K0Report> {
    let infinitesimal = match find_infinitesimal(data, bound) {
        Ok(r) => Some(r),
        Err(Error::Inconclusive(_)) => None,
        Err(e) => return Err(e),
    };
    let (dim, det) = data.eventual_restriction();
    Ok(K0Report {
        matrix: data.matrix.clone(),
        tau: data.tau.iter().map(|t| t.to_decimal_string(digits)).collect(),
        eigenvalue: data.eigenvalue.to_decimal_string(digits),
        exact: data.exact,
        determinant: data.determinant().to_string(),
        eventual_range: EventualRange { dim, det: det.to_string() },
        infinitesimal,
        uhf: uhf_report(data),
    })
}

// Rational linear algebra on small dense matrices.

fn to_q(a: &[Vec<i64>]) -> Vec<Vec<RBig>> {
    a.iter().map(|r| r.iter().map(|&x| RBig::from(x)).collect()).collect()
}

fn identity_q(k: usize) -> Vec<Vec<RBig>> {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { RBig::ONE } else { RBig::ZERO }).collect())
        .collect()
}

fn transpose(a: &[Vec<RBig>]) -> Vec<Vec<RBig>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn mat_mul(a: &[Vec<RBig>], b: &[Vec<RBig>]) -> Vec<Vec<RBig>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(RBig::ZERO, |acc, (x, r)| acc + x * &r[j]))
                .collect()
        })
        .collect()
}

fn mat_vec(a: &[Vec<RBig>], v: &[RBig]) -> Vec<RBig> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(RBig::ZERO, |acc, (x, y)| acc + x * y))
        .collect()
}

/// Reduced row echelon form and pivot columns.
fn rref(a: &[Vec<RBig>]) -> (Vec<Vec<RBig>>, Vec<usize>) {
    let mut m = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != RBig::ZERO) else {
            continue;
        };
        m.swap(r, p);
        let inv = RBig::ONE / &m[r][c];
        m[r] = m[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows {
            if i != r && m[i][c] != RBig::ZERO {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

fn rank(a: &[Vec<RBig>]) -> usize {
    rref(a).1.len()
}

fn determinant(a: &[Vec<RBig>]) -> RBig {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = RBig::ONE;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| m[i][c] != RBig::ZERO) else {
            return RBig::ZERO;
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = &det * &m[c][c];
        for i in c + 1..n {
            if m[i][c] != RBig::ZERO {
                let f = &m[i][c] / &m[c][c];
                let pivot_row = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    det
}

/// Basis of `{x : a x = 0}`.
fn kernel_basis(a: &[Vec<RBig>]) -> Vec<Vec<RBig>> {
    let cols = a.first().map_or(0, Vec::len);
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![RBig::ZERO; cols];
            v[f] = RBig::ONE;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Linearly independent columns of `a` spanning its column space.
fn column_basis(a: &[Vec<RBig>]) -> Vec<Vec<RBig>> {
    let (_, pivots) = rref(a);
    pivots.iter().map(|&c| a.iter().map(|r| r[c].clone()).collect()).collect()
}

/// Coordinates of `y` in the span of `basis`, if it lies there.
fn solve_in_span(basis: &[Vec<RBig>], y: &[RBig]) -> Option<Vec<RBig>> {
    let r = basis.len();
    let k = y.len();
    // Augmented system [b_1 ... b_r | y].
    let aug: Vec<Vec<RBig>> = (0..k)
        .map(|i| {
            let mut row: Vec<RBig> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(y[i].clone());
            row
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.contains(&r) {
        return None;
    }
    let mut x = vec![RBig::ZERO; r];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = m[row][r].clone();
    }
    Some(x)
}
