//! Multi-qubit Pauli operators stored as bit-packed X and Z parts with an explicit phase.
//!
//! An operator is `i^phase * P_0 ⊗ P_1 ⊗ ...` where each single-qubit factor is
//! encoded by its `(x, z)` bits: `(0,0)=I`, `(1,0)=X`, `(1,1)=Y`, `(0,1)=Z`.
//! `Y` is the Hermitian Pauli, so a string with `phase` 0 or 2 is Hermitian.

use std::fmt;
use std::str::FromStr;

use crate::error::StarError;

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Index in `I, X, Y, Z` order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], q: usize) -> bool {
    (words[q >> 6] >> (q & 63)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], q: usize, v: bool) {
    let mask = 1u64 << (q & 63);
    if v {
        words[q >> 6] |= mask;
    } else {
        words[q >> 6] &= !mask;
    }
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], q: usize) {
    words[q >> 6] ^= 1u64 << (q & 63);
}

/// Exponent of `i` picked up by the single-qubit product `σ(x1,z1) σ(x2,z2)`.
fn product_phase(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// A Pauli operator on `n` qubits with a global phase `i^phase`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Identity with `p` placed on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    /// Product of the same Pauli on every listed qubit.
    pub fn on(n: usize, qubits: &[usize], p: Pauli) -> Self {
        let mut s = Self::identity(n);
        for &q in qubits {
            s.set(q, p);
        }
        s
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        Self { n, x, z, phase: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase & 3;
    }

    /// `Some(+1)` or `Some(-1)` for Hermitian strings, `None` for `±i` phases.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn x_bit(&self, q: usize) -> bool {
        get_bit(&self.x, q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        get_bit(&self.z, q)
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    /// Overwrites the factor on `q` without touching the phase.
    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (x, z) = p.bits();
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Qubits with a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    /// Equality of the Pauli parts, ignoring phase.
    pub fn same_pauli(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        parity & 1 == 0
    }

    /// Operator product `self * other`, with the phase tracked exactly.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        let mut acc = self.phase as i32 + other.phase as i32;
        for q in 0..self.n {
            let (x1, z1) = (self.x_bit(q), self.z_bit(q));
            let (x2, z2) = (other.x_bit(q), other.z_bit(q));
            acc += product_phase(x1, z1, x2, z2);
        }
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        Self {
            n: self.n,
            x,
            z,
            phase: acc.rem_euclid(4) as u8,
        }
    }

    /// XORs the Pauli parts of `other` into `self`, dropping phases.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    pub(crate) fn apply_h(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && z {
            self.phase = (self.phase + 2) & 3;
        }
        set_bit(&mut self.x, q, z);
        set_bit(&mut self.z, q, x);
    }

    pub(crate) fn apply_cnot(&mut self, c: usize, t: usize) {
        let (xc, zc) = (self.x_bit(c), self.z_bit(c));
        let (xt, zt) = (self.x_bit(t), self.z_bit(t));
        if xc && zt && !(xt ^ zc) {
            self.phase = (self.phase + 2) & 3;
        }
        set_bit(&mut self.x, t, xt ^ xc);
        set_bit(&mut self.z, c, zc ^ zt);
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = StarError;

    /// Parses strings such as `XIZY`, `+XX`, `-ZZ`, `iY` or `-iXZ`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (sign, rest) = match s.as_bytes().first() {
            Some(b'+') => (0u8, &s[1..]),
            Some(b'-') => (2u8, &s[1..]),
            _ => (0u8, s),
        };
        let (imag, body) = match rest.strip_prefix('i') {
            Some(b) => (1u8, b),
            None => (0u8, rest),
        };
        let mut out = Self::identity(body.chars().count());
        for (q, ch) in body.chars().enumerate() {
            let p = match ch {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(StarError::Config(format!(
                        "invalid Pauli character {other:?} in {s:?}"
                    )))
                }
            };
            out.set(q, p);
        }
        out.phase = (sign + imag) & 3;
        Ok(out)
    }
}
