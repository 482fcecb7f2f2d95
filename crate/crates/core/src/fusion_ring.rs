//! Fusion rings: validation, Frobenius-Perron dimensions, built-in examples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use dashu::base::Abs;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::number::{Float, Precision, Real};

/// Names of the rings shipped with the crate.
pub const BUILTIN_RINGS: [&str; 5] = ["hilb_z2", "hilb_s3", "rep_s3", "fib", "ising"];

/// A based ring with unit at index 0, a duality involution and structure
/// constants `N[a][b][c]`.
#[derive(Clone, Debug)]
pub struct FusionRing {
    name: String,
    simples: Vec<String>,
    dual: Vec<usize>,
    fusion: Vec<u32>,
    dims: Option<Dimensions>,
}

/// `coeff * sqrt(radicand)` with `radicand` squarefree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub coeff: u64,
    pub radicand: u64,
}

impl Surd {
    pub fn square(self) -> u128 {
        self.coeff as u128 * self.coeff as u128 * self.radicand as u128
    }

    pub fn to_real(self, p: Precision) -> Real {
        let c = Real::from_int(self.coeff as i64);
        if self.radicand == 1 {
            c
        } else {
            c * Real::from_int(self.radicand as i64).sqrt(p)
        }
    }
}

/// Quantum dimensions of a ring.
///
/// `surds` is present when every `d_a^2` was certified to be an integer; in
/// that case `d_a = coeff * sqrt(radicand)` exactly. When all radicands are 1
/// the ring is integral and `values` are exact integers.
#[derive(Clone, Debug)]
pub struct Dimensions {
    values: Vec<Real>,
    surds: Option<Vec<Surd>>,
    precision: Precision,
}

impl Dimensions {
    pub fn values(&self) -> &[Real] {
        &self.values
    }

    pub fn get(&self, a: usize) -> &Real {
        &self.values[a]
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn surds(&self) -> Option<&[Surd]> {
        self.surds.as_deref()
    }

    /// All dimensions are certified integers.
    pub fn is_integral(&self) -> bool {
        self.surds
            .as_ref()
            .is_some_and(|s| s.iter().all(|x| x.radicand == 1))
    }

    /// All squared dimensions are certified integers.
    pub fn is_weakly_integral(&self) -> bool {
        self.surds.is_some()
    }

    /// `d_a^2`, exact whenever the ring is weakly integral.
    pub fn square(&self, a: usize) -> Real {
        match &self.surds {
            Some(s) => Real::from_int(s[a].square() as i64),
            None => &self.values[a] * &self.values[a],
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    simples: Vec<String>,
    dual: Vec<i64>,
    #[serde(rename = "N")]
    n: Vec<Vec<i64>>,
}

impl FusionRing {
    /// Builds and validates a ring from explicit data. `entries` lists
    /// `(a, b, c, multiplicity)`; missing triples have multiplicity 0.
    pub fn new(
        name: impl Into<String>,
        simples: Vec<String>,
        dual: Vec<usize>,
        entries: &[(usize, usize, usize, u32)],
    ) -> Result<FusionRing> {
        let k = simples.len();
        if k == 0 {
            return Err(Error::invalid("a fusion ring needs at least one simple object"));
        }
        let mut seen = BTreeSet::new();
        for s in &simples {
            if !seen.insert(s.as_str()) {
                return Err(Error::invalid(format!("duplicate simple label {s:?}")));
            }
        }
        if dual.len() != k {
            return Err(Error::invalid(format!(
                "dual has {} entries but there are {k} simples",
                dual.len()
            )));
        }
        let mut fusion = vec![0u32; k * k * k];
        let mut given = BTreeSet::new();
        for &(a, b, c, m) in entries {
            if a >= k || b >= k || c >= k {
                return Err(Error::invalid(format!("fusion entry ({a},{b},{c}) out of range")));
            }
            if !given.insert((a, b, c)) {
                return Err(Error::invalid(format!("duplicate fusion entry ({a},{b},{c})")));
            }
            fusion[(a * k + b) * k + c] = m;
        }
        let ring = FusionRing {
            name: name.into(),
            simples,
            dual,
            fusion,
            dims: None,
        };
        ring.validate()?;
        Ok(ring)
    }

    /// Parses a fusion-ring document
    /// `{"simples": [...], "dual": [...], "N": [[a, b, c, mult], ...]}`.
    pub fn from_document(text: &str) -> Result<FusionRing> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let k = doc.simples.len();
        let mut dual = Vec::with_capacity(k);
        for (i, &d) in doc.dual.iter().enumerate() {
            if d < 0 || d as usize >= k {
                return Err(Error::invalid(format!("dual[{i}] = {d} out of range")));
            }
            dual.push(d as usize);
        }
        let mut entries = Vec::with_capacity(doc.n.len());
        for row in &doc.n {
            let [a, b, c, m] = row[..] else {
                return Err(Error::Parse(format!(
                    "fusion entry {row:?} must have exactly four integers"
                )));
            };
            if a < 0 || b < 0 || c < 0 {
                return Err(Error::invalid(format!("negative index in fusion entry {row:?}")));
            }
            if m < 0 || m > u32::MAX as i64 {
                return Err(Error::invalid(format!("multiplicity out of range in {row:?}")));
            }
            entries.push((a as usize, b as usize, c as usize, m as u32));
        }
        FusionRing::new("custom", doc.simples, dual, &entries)
    }

    /// Canonical document text; `from_document(to_document())` reproduces the
    /// ring and the text is stable byte for byte.
    pub fn to_document(&self) -> String {
        let mut out = String::from("{\n  \"simples\": [");
        let labels: Vec<String> = self
            .simples
            .iter()
            .map(|s| serde_json::to_string(s).expect("string serializes"))
            .collect();
        out.push_str(&labels.join(", "));
        out.push_str("],\n  \"dual\": [");
        let duals: Vec<String> = self.dual.iter().map(|d| d.to_string()).collect();
        out.push_str(&duals.join(", "));
        out.push_str("],\n  \"N\": [\n");
        let rows: Vec<String> = self
            .admissible_triples()
            .into_iter()
            .map(|(a, b, c)| format!("    [{a}, {b}, {c}, {}]", self.n(a, b, c)))
            .collect();
        out.push_str(&rows.join(",\n"));
        out.push_str("\n  ]\n}\n");
        out
    }

    /// One of [`BUILTIN_RINGS`].
    pub fn builtin(name: &str) -> Result<FusionRing> {
        let ring = match name {
            "hilb_z2" => group_ring("hilb_z2", &["1", "g"], |x, y| (x + y) % 2, |x| x),
            "hilb_s3" => {
                // r^i s^j stored at index i + 3j
                let mul = |x: usize, y: usize| {
                    let (i, j) = (x % 3, x / 3);
                    let (k, l) = (y % 3, y / 3);
                    let rot = if j == 0 { i + k } else { i + 3 - k };
                    rot % 3 + 3 * ((j + l) % 2)
                };
                let inv = |x: usize| if x / 3 == 1 { x } else { (3 - x % 3) % 3 };
                group_ring("hilb_s3", &["1", "r", "r2", "s", "rs", "r2s"], mul, inv)
            }
            "rep_s3" => FusionRing::new(
                "rep_s3",
                labels(&["1", "sgn", "rho"]),
                vec![0, 1, 2],
                &with_unit(3, &[(1, 1, 0, 1), (1, 2, 2, 1), (2, 1, 2, 1), (2, 2, 0, 1), (2, 2, 1, 1), (2, 2, 2, 1)]),
            ),
            "fib" => FusionRing::new(
                "fib",
                labels(&["1", "tau"]),
                vec![0, 1],
                &with_unit(2, &[(1, 1, 0, 1), (1, 1, 1, 1)]),
            ),
            "ising" => FusionRing::new(
                "ising",
                labels(&["1", "psi", "sigma"]),
                vec![0, 1, 2],
                &with_unit(3, &[(1, 1, 0, 1), (1, 2, 2, 1), (2, 1, 2, 1), (2, 2, 0, 1), (2, 2, 1, 1)]),
            ),
            other => {
                return Err(Error::invalid(format!(
                    "unknown built-in ring {other:?}; expected one of {}",
                    BUILTIN_RINGS.join(", ")
                )))
            }
        }?;
        Ok(ring)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> FusionRing {
        self.name = name.into();
        self
    }

    /// Computes and attaches the Frobenius-Perron dimensions.
    pub fn with_dimensions(mut self, p: Precision) -> Result<FusionRing> {
        self.dims = Some(fp_dimensions(&self, p)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.simples.len()
    }

    pub fn simples(&self) -> &[String] {
        &self.simples
    }

    pub fn label(&self, a: usize) -> &str {
        &self.simples[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.simples.iter().position(|s| s == label)
    }

    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }

    /// `N_{ab}^c`.
    pub fn n(&self, a: usize, b: usize, c: usize) -> u32 {
        let k = self.rank();
        self.fusion[(a * k + b) * k + c]
    }

    /// Left multiplication matrix `N_a[b][c] = N_{ab}^c`.
    pub fn fusion_matrix(&self, a: usize) -> Vec<Vec<u32>> {
        let k = self.rank();
        (0..k)
            .map(|b| (0..k).map(|c| self.n(a, b, c)).collect())
            .collect()
    }

    /// Dimensions, if computed.
    pub fn dims(&self) -> Result<&Dimensions> {
        self.dims.as_ref().ok_or_else(|| {
            Error::invalid(format!("dimensions of ring {:?} have not been computed", self.name))
        })
    }

    /// True when every `N_a` is a permutation matrix.
    pub fn is_pointed(&self) -> bool {
        let k = self.rank();
        (0..k).all(|a| {
            (0..k).all(|b| (0..k).map(|c| self.n(a, b, c)).sum::<u32>() == 1)
                && (0..k).all(|c| (0..k).map(|b| self.n(a, b, c)).sum::<u32>() == 1)
        })
    }

    /// All `(a, b, c)` with `N_{ab}^c >= 1` in lexicographic order.
    pub fn admissible_triples(&self) -> Vec<(usize, usize, usize)> {
        let k = self.rank();
        let mut out = Vec::new();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if self.n(a, b, c) > 0 {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let k = self.rank();
        for a in 0..k {
            let d = self.dual[a];
            if self.dual[d] != a {
                return Err(Error::Axiom {
                    invariant: "duality involution",
                    location: format!("dual(dual({})) != {}", self.label(a), self.label(a)),
                });
            }
        }
        for a in 0..k {
            for b in 0..k {
                let expect = u32::from(a == b);
                if self.n(0, a, b) != expect || self.n(a, 0, b) != expect {
                    return Err(Error::Axiom {
                        invariant: "unit law",
                        location: format!(
                            "N(1,{a},{b}) = {}, N({a},1,{b}) = {}, expected {expect}",
                            self.n(0, a, b),
                            self.n(a, 0, b)
                        ),
                    });
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                let expect = u32::from(b == self.dual[a]);
                if self.n(a, b, 0) != expect {
                    return Err(Error::Axiom {
                        invariant: "duality (N_ab^1 = delta_{b, dual a})",
                        location: format!("N({a},{b},1) = {}, expected {expect}", self.n(a, b, 0)),
                    });
                }
                for c in 0..k {
                    let mirrored = self.n(self.dual[b], self.dual[a], self.dual[c]);
                    if self.n(a, b, c) != mirrored {
                        return Err(Error::Axiom {
                            invariant: "duality (N_ab^c = N_{dual b, dual a}^{dual c})",
                            location: format!(
                                "N({a},{b},{c}) = {} but N({},{},{}) = {mirrored}",
                                self.n(a, b, c),
                                self.dual[b],
                                self.dual[a],
                                self.dual[c]
                            ),
                        });
                    }
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for d in 0..k {
                        let left: u64 = (0..k)
                            .map(|e| self.n(a, b, e) as u64 * self.n(e, c, d) as u64)
                            .sum();
                        let right: u64 = (0..k)
                            .map(|f| self.n(b, c, f) as u64 * self.n(a, f, d) as u64)
                            .sum();
                        if left != right {
                            return Err(Error::Axiom {
                                invariant: "associativity",
                                location: format!(
                                    "(a,b,c,d) = ({a},{b},{c},{d}): (ab)c gives {left}, a(bc) gives {right}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Adds the unit rows `1 x a = a x 1 = a` to a list of fusion entries.
fn with_unit(k: usize, rest: &[(usize, usize, usize, u32)]) -> Vec<(usize, usize, usize, u32)> {
    let mut all: BTreeMap<(usize, usize, usize), u32> = BTreeMap::new();
    for a in 0..k {
        all.insert((0, a, a), 1);
        all.insert((a, 0, a), 1);
    }
    for &(a, b, c, m) in rest {
        all.insert((a, b, c), m);
    }
    all.into_iter().map(|((a, b, c), m)| (a, b, c, m)).collect()
}

fn group_ring(
    name: &str,
    names: &[&str],
    mul: impl Fn(usize, usize) -> usize,
    inv: impl Fn(usize) -> usize,
) -> Result<FusionRing> {
    let k = names.len();
    let mut entries = Vec::new();
    for a in 0..k {
        for b in 0..k {
            entries.push((a, b, mul(a, b), 1));
        }
    }
    FusionRing::new(name, labels(names), (0..k).map(inv).collect(), &entries)
}

/// Total fusion matrix `T[b][c] = sum_a N_{ab}^c`, whose Perron vector is `d`.
fn total_matrix(ring: &FusionRing) -> Vec<Vec<u64>> {
    let k = ring.rank();
    (0..k)
        .map(|b| {
            (0..k)
                .map(|c| (0..k).map(|a| ring.n(a, b, c) as u64).sum())
                .collect()
        })
        .collect()
}

fn power_iteration(t: &[Vec<u64>]) -> Result<Vec<f64>> {
    let k = t.len();
    let mut v = vec![1.0f64; k];
    for _ in 0..100_000 {
        let mut w: Vec<f64> = (0..k)
            .map(|b| (0..k).map(|c| t[b][c] as f64 * v[c]).sum())
            .collect();
        let norm = w[0];
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        let delta = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max);
        v = w;
        if delta < 1e-14 {
            return Ok(v);
        }
    }
    Err(Error::NotConverged(
        "power iteration on the total fusion matrix".to_string(),
    ))
}

fn squarefree_split(s: u64) -> (u64, u64) {
    // s = coeff^2 * radicand
    let mut coeff = 1u64;
    let mut radicand = 1u64;
    let mut rest = s;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        coeff *= p.pow(e / 2);
        if e % 2 == 1 {
            radicand *= p;
        }
        p += 1;
    }
    radicand *= rest;
    (coeff, radicand)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Checks `d_a d_b = sum_c N_ab^c d_c` for `d = coeff * sqrt(radicand)`,
/// using linear independence of square roots of distinct squarefree integers.
fn certify_surds(ring: &FusionRing, surds: &[Surd]) -> bool {
    let k = ring.rank();
    if surds[0] != (Surd { coeff: 1, radicand: 1 }) {
        return false;
    }
    for a in 0..k {
        for b in 0..k {
            let (qa, qb) = (surds[a].radicand, surds[b].radicand);
            let g = gcd(qa, qb);
            let q = (qa / g) * (qb / g);
            let Some(rhs) = (surds[a].coeff as u128)
                .checked_mul(surds[b].coeff as u128)
                .and_then(|x| x.checked_mul(g as u128))
            else {
                return false;
            };
            let mut lhs: u128 = 0;
            for c in 0..k {
                let m = ring.n(a, b, c) as u128;
                if m == 0 {
                    continue;
                }
                if surds[c].radicand != q {
                    return false;
                }
                lhs += m * surds[c].coeff as u128;
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn try_surds(ring: &FusionRing, approx: &[f64]) -> Option<Vec<Surd>> {
    let mut surds = Vec::with_capacity(approx.len());
    for &d in approx {
        let sq = d * d;
        let s = sq.round();
        if !(s >= 1.0 && (sq - s).abs() < 1e-7 * sq.max(1.0) && s < 1e15) {
            return None;
        }
        let (coeff, radicand) = squarefree_split(s as u64);
        surds.push(Surd { coeff, radicand });
    }
    certify_surds(ring, &surds).then_some(surds)
}

/// Frobenius-Perron dimensions: the unique positive vector with `d_1 = 1`
/// and `d_a d_b = sum_c N_ab^c d_c`.
///
/// A double precision power iteration on the total fusion matrix gives a
/// starting point. Integer (and integer-square) dimensions are then certified
/// exactly; otherwise Newton's method on the Perron eigenpair refines the
/// vector to the requested precision and the per-object eigen-equations
/// `N_a d = d_a d` are checked.
pub fn fp_dimensions(ring: &FusionRing, p: Precision) -> Result<Dimensions> {
    let t = total_matrix(ring);
    let approx = power_iteration(&t)?;
    if let Some(surds) = try_surds(ring, &approx) {
        let values = surds.iter().map(|s| s.to_real(p)).collect();
        return Ok(Dimensions {
            values,
            surds: Some(surds),
            precision: p,
        });
    }
    let bits = p.bits();
    let k = ring.rank();
    let mut v: Vec<Float> = approx
        .iter()
        .map(|&x| Float::try_from(x).expect("finite").with_precision(bits).value())
        .collect();
    let tf: Vec<Vec<Float>> = t
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| Float::from(x).with_precision(bits).value())
                .collect()
        })
        .collect();
    let mut lambda: Float = (0..k).map(|c| tf[0][c].clone() * &v[c]).sum();
    let threshold = Real::from_int(2).powi(-(bits as i64 - 16));
    let mut converged = false;
    for _ in 0..60 {
        // Unknowns: v_1..v_{k-1}, lambda (v_0 = 1 is fixed).
        let f: Vec<Float> = (0..k)
            .map(|b| (0..k).map(|c| tf[b][c].clone() * &v[c]).sum::<Float>() - lambda.clone() * &v[b])
            .collect();
        let mut jac = vec![vec![Float::ZERO; k]; k];
        for b in 0..k {
            for c in 1..k {
                jac[b][c - 1] = tf[b][c].clone();
                if b == c {
                    jac[b][c - 1] = jac[b][c - 1].clone() - &lambda;
                }
            }
            jac[b][k - 1] = -v[b].clone();
        }
        let rhs: Vec<Float> = f.iter().map(|x| -x.clone()).collect();
        let Some(step) = solve_dense(jac, rhs) else {
            return Err(Error::NotConverged("singular Newton system".to_string()));
        };
        for c in 1..k {
            v[c] = v[c].clone() + &step[c - 1];
        }
        lambda = lambda + &step[k - 1];
        let size = step
            .iter()
            .map(|s| Real::from_float(s.clone()).abs())
            .fold(Real::zero(), |m, x| if x > m { x } else { m });
        if size < threshold {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged("Newton polishing of the Perron vector".to_string()));
    }
    let values: Vec<Real> = v.into_iter().map(Real::from_float).collect();
    let tol = p.epsilon();
    for a in 0..k {
        if values[a] < Real::one() - &tol {
            return Err(Error::NotConverged(format!("dimension of {} below 1", ring.label(a))));
        }
        for b in 0..k {
            let lhs = &values[a] * &values[b];
            let rhs = (0..k).fold(Real::zero(), |acc, c| {
                acc + Real::from_int(ring.n(a, b, c) as i64) * &values[c]
            });
            if !lhs.approx_eq(&rhs, &tol) {
                return Err(Error::NotConverged(format!(
                    "eigen-equation for N_{} fails at row {}",
                    ring.label(a),
                    ring.label(b)
                )));
            }
        }
    }
    Ok(Dimensions {
        values,
        surds: None,
        precision: p,
    })
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Option<Vec<Float>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            let x = a[i][col].clone().abs();
            let y = a[j][col].clone().abs();
            x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].repr().is_zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            if a[row][col].repr().is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / &a[col][col];
            for k in col..n {
                let delta = factor.clone() * &a[col][k];
                a[row][k] = a[row][k].clone() - delta;
            }
            let delta = factor * &b[col];
            b[row] = b[row].clone() - delta;
        }
    }
    let mut x = vec![Float::ZERO; n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * &x[k];
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// `D = sum_c d_c^2`.
pub fn global_dimension(ring: &FusionRing) -> Result<Real> {
    let dims = ring.dims()?;
    Ok((0..ring.rank()).fold(Real::zero(), |acc, a| acc + dims.square(a)))
}

/// Human-readable summary used by the command line.
pub fn describe(ring: &FusionRing) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ring {} with {} simples", ring.name(), ring.rank());
    for a in 0..ring.rank() {
        let _ = writeln!(out, "  {} (dual {})", ring.label(a), ring.label(ring.dual(a)));
    }
    out
}
