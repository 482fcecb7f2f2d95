//! Pauli monomials `i^k X^x Z^z` over a fixed number of qubits, in the
//! binary symplectic representation.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::number::Complex;

/// `i^phase · X^x · Z^z` (X part to the left).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliMonomial {
    phase: u8,
    x: FixedBitSet,
    z: FixedBitSet,
}

/// Single-qubit letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl PauliMonomial {
    pub fn identity(qubits: usize) -> PauliMonomial {
        PauliMonomial {
            phase: 0,
            x: FixedBitSet::with_capacity(qubits),
            z: FixedBitSet::with_capacity(qubits),
        }
    }

    /// Hermitian monomial with the given letters; `Y = i X Z`.
    pub fn from_letters(qubits: usize, letters: &[(usize, Letter)]) -> PauliMonomial {
        let mut p = PauliMonomial::identity(qubits);
        for &(q, l) in letters {
            p = p.mul(&PauliMonomial::single(qubits, q, l));
        }
        p
    }

    pub fn single(qubits: usize, q: usize, letter: Letter) -> PauliMonomial {
        let mut p = PauliMonomial::identity(qubits);
        match letter {
            Letter::I => {}
            Letter::X => p.x.insert(q),
            Letter::Z => p.z.insert(q),
            Letter::Y => {
                p.x.insert(q);
                p.z.insert(q);
                p.phase = 1;
            }
        }
        p
    }

    /// `X` on every qubit in `qs`.
    pub fn x_on(qubits: usize, qs: &[usize]) -> PauliMonomial {
        let mut p = PauliMonomial::identity(qubits);
        for &q in qs {
            p.x.toggle(q);
        }
        p
    }

    /// `Z` on every qubit in `qs`.
    pub fn z_on(qubits: usize, qs: &[usize]) -> PauliMonomial {
        let mut p = PauliMonomial::identity(qubits);
        for &q in qs {
            p.z.toggle(q);
        }
        p
    }

    pub fn from_parts(phase: u8, x: FixedBitSet, z: FixedBitSet) -> PauliMonomial {
        assert_eq!(x.len(), z.len(), "X and Z parts must have equal length");
        PauliMonomial { phase: phase % 4, x, z }
    }

    pub fn qubits(&self) -> usize {
        self.x.len()
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_part(&self) -> &FixedBitSet {
        &self.x
    }

    pub fn z_part(&self) -> &FixedBitSet {
        &self.z
    }

    pub fn with_phase(mut self, phase: u8) -> PauliMonomial {
        self.phase = phase % 4;
        self
    }

    pub fn letter(&self, q: usize) -> Letter {
        match (self.x.contains(q), self.z.contains(q)) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    /// Qubits where the monomial acts nontrivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.x.clone();
        s.union_with(&self.z);
        s.ones().collect()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_clear() && self.z.is_clear()
    }

    pub fn same_support(&self, other: &PauliMonomial) -> bool {
        self.x == other.x && self.z == other.z
    }

    /// `i^{phase}`, the value of the monomial's scalar factor.
    pub fn phase_value(&self) -> Complex {
        Complex::i_pow(self.phase as i64)
    }

    pub fn mul(&self, other: &PauliMonomial) -> PauliMonomial {
        assert_eq!(self.qubits(), other.qubits(), "qubit count mismatch");
        // Z^{z1} X^{x2} = (-1)^{z1·x2} X^{x2} Z^{z1}
        let mut overlap = self.z.clone();
        overlap.intersect_with(&other.x);
        let sign = 2 * (overlap.count_ones(..) % 2) as u8;
        let mut x = self.x.clone();
        x.symmetric_difference_with(&other.x);
        let mut z = self.z.clone();
        z.symmetric_difference_with(&other.z);
        PauliMonomial { phase: (self.phase + other.phase + sign) % 4, x, z }
    }

    /// Symplectic form `x1·z2 + z1·x2` over F_2.
    pub fn symplectic(&self, other: &PauliMonomial) -> bool {
        let mut a = self.x.clone();
        a.intersect_with(&other.z);
        let mut b = self.z.clone();
        b.intersect_with(&other.x);
        (a.count_ones(..) + b.count_ones(..)) % 2 == 1
    }

    pub fn commutes(&self, other: &PauliMonomial) -> bool {
        !self.symplectic(other)
    }

    fn xz_overlap(&self) -> usize {
        let mut o = self.x.clone();
        o.intersect_with(&self.z);
        o.count_ones(..)
    }

    /// Hermitian iff `k - |x ∧ z|` is even.
    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize + 4 - self.xz_overlap() % 4) % 2 == 0
    }

    pub fn adjoint(&self) -> PauliMonomial {
        // (i^k X^x Z^z)^† = i^{-k} Z^z X^x = i^{-k} (-1)^{|x∧z|} X^x Z^z
        let phase = (4 - self.phase + 2 * (self.xz_overlap() % 2) as u8) % 4;
        PauliMonomial { phase, x: self.x.clone(), z: self.z.clone() }
    }

    /// Action on a computational basis state given as a bit set: returns the
    /// image basis state and the phase exponent picked up.
    pub fn apply_to_basis(&self, state: &FixedBitSet) -> (FixedBitSet, u8) {
        let mut zs = self.z.clone();
        zs.intersect_with(state);
        let sign = 2 * (zs.count_ones(..) % 2) as u8;
        let mut out = state.clone();
        out.symmetric_difference_with(&self.x);
        (out, (self.phase + sign) % 4)
    }
}

impl fmt::Display for PauliMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != 0 {
            write!(f, "i^{} ", self.phase)?;
        }
        let s = self.support();
        if s.is_empty() {
            return f.write_str("I");
        }
        let parts: Vec<String> = s
            .iter()
            .map(|&q| {
                let l = match (self.x.contains(q), self.z.contains(q)) {
                    (true, true) => "XZ",
                    (true, false) => "X",
                    _ => "Z",
                };
                format!("{l}{q}")
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Basis of the F_2 solution space of `{v : <v, g> = 0 for all g}` among
/// vectors supported on `qubits`, returned as hermitian-phase monomials.
pub fn commutant_basis(generators: &[PauliMonomial], qubits: &[usize], total: usize) -> Vec<PauliMonomial> {
    // Unknowns: x_q, z_q for q in qubits. Row per generator.
    let vars = 2 * qubits.len();
    let mut rows: Vec<FixedBitSet> = generators
        .iter()
        .map(|g| {
            let mut r = FixedBitSet::with_capacity(vars);
            for (i, &q) in qubits.iter().enumerate() {
                // <P, g> = x_P·z_g + z_P·x_g
                if g.z.contains(q) {
                    r.insert(2 * i);
                }
                if g.x.contains(q) {
                    r.insert(2 * i + 1);
                }
            }
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..vars {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].contains(c)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.contains(c) {
                row.symmetric_difference_with(&pivot);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..vars).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = FixedBitSet::with_capacity(vars);
            v.insert(f);
            for (row, &p) in pivots.iter().enumerate() {
                if rows[row].contains(f) {
                    v.insert(p);
                }
            }
            let mut x = FixedBitSet::with_capacity(total);
            let mut z = FixedBitSet::with_capacity(total);
            for (i, &q) in qubits.iter().enumerate() {
                if v.contains(2 * i) {
                    x.insert(q);
                }
                if v.contains(2 * i + 1) {
                    z.insert(q);
                }
            }
            let p = PauliMonomial::from_parts(0, x, z);
            let fix = (p.xz_overlap() % 4) as u8;
            p.with_phase(fix)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xz_anticommute() {
        let x = PauliMonomial::single(1, 0, Letter::X);
        let z = PauliMonomial::single(1, 0, Letter::Z);
        assert!(!x.commutes(&z));
        let xz = x.mul(&z);
        let zx = z.mul(&x);
        assert!(xz.same_support(&zx));
        assert_eq!((xz.phase() + 2) % 4, zx.phase());
        let y = PauliMonomial::single(1, 0, Letter::Y);
        assert!(y.is_hermitian());
        assert!(y.mul(&y).is_identity_up_to_phase());
        assert_eq!(y.mul(&y).phase(), 0);
        assert!(!xz.is_hermitian());
    }

    #[test]
    fn adjoint_inverts() {
        let p = PauliMonomial::from_letters(3, &[(0, Letter::Y), (2, Letter::Z)]).with_phase(1);
        let q = p.mul(&p.adjoint());
        assert!(q.is_identity_up_to_phase());
        assert_eq!(q.phase(), 0);
    }

    #[test]
    fn commutant_of_a_single_z() {
        let g = PauliMonomial::z_on(2, &[0]);
        let basis = commutant_basis(&[g.clone()], &[0, 1], 2);
        assert_eq!(basis.len(), 3);
        assert!(basis.iter().all(|b| b.commutes(&g) && b.is_hermitian()));
    }
}
