//! Single- and two-qubit Paulis modulo phase, and two-qubit Cliffords stored
//! by their unsigned symplectic action.
//!
//! Pauli codes: `0 = I`, `1 = X`, `2 = Z`, `3 = Y`, i.e. `code = x_bit | z_bit << 1`.
//! With this encoding, multiplication modulo phase is XOR of codes.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pauli(u8);

impl Pauli {
    pub const I: Pauli = Pauli(0);
    pub const X: Pauli = Pauli(1);
    pub const Z: Pauli = Pauli(2);
    pub const Y: Pauli = Pauli(3);
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::Y];

    pub fn from_code(code: u8) -> Result<Pauli> {
        if code < 4 {
            Ok(Pauli(code))
        } else {
            Err(Error::InvalidInput(format!("Pauli code {code} out of range")))
        }
    }

    #[inline]
    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn x_bit(self) -> u8 {
        self.0 & 1
    }

    #[inline]
    pub fn z_bit(self) -> u8 {
        self.0 >> 1
    }

    #[inline]
    pub fn commutes_with(self, other: Pauli) -> bool {
        (self.x_bit() & other.z_bit()) ^ (self.z_bit() & other.x_bit()) == 0
    }

    pub fn to_char(self) -> char {
        ['I', 'X', 'Z', 'Y'][self.index()]
    }

    pub fn from_char(c: char) -> Result<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Z' => Ok(Pauli::Z),
            'Y' => Ok(Pauli::Y),
            _ => Err(Error::Parse(format!("unknown Pauli '{c}'"))),
        }
    }
}

impl Mul for Pauli {
    type Output = Pauli;
    #[inline]
    fn mul(self, rhs: Pauli) -> Pauli {
        Pauli(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Pauli> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Pauli::from_char(c),
            _ => Err(Error::Parse(format!("expected a single Pauli, got '{s}'"))),
        }
    }
}

impl Serialize for Pauli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Pauli {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Pauli, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A two-qubit Pauli `left ⊗ right` modulo phase.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliPair {
    pub left: Pauli,
    pub right: Pauli,
}

impl PauliPair {
    pub const II: PauliPair = PauliPair::new(Pauli::I, Pauli::I);
    pub const XI: PauliPair = PauliPair::new(Pauli::X, Pauli::I);
    pub const ZI: PauliPair = PauliPair::new(Pauli::Z, Pauli::I);
    pub const IX: PauliPair = PauliPair::new(Pauli::I, Pauli::X);
    pub const IZ: PauliPair = PauliPair::new(Pauli::I, Pauli::Z);

    pub const fn new(left: Pauli, right: Pauli) -> PauliPair {
        PauliPair { left, right }
    }

    /// Packed 4-bit index `left + 4 * right`.
    #[inline]
    pub fn index(self) -> usize {
        self.left.index() | (self.right.index() << 2)
    }

    pub fn from_index(i: usize) -> PauliPair {
        PauliPair::new(Pauli((i & 3) as u8), Pauli(((i >> 2) & 3) as u8))
    }

    #[inline]
    pub fn commutes_with(self, other: PauliPair) -> bool {
        self.left.commutes_with(other.left) == self.right.commutes_with(other.right)
    }

    pub fn is_identity(self) -> bool {
        self == PauliPair::II
    }
}

impl Mul for PauliPair {
    type Output = PauliPair;
    #[inline]
    fn mul(self, rhs: PauliPair) -> PauliPair {
        PauliPair::new(self.left * rhs.left, self.right * rhs.right)
    }
}

impl fmt::Display for PauliPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.left, self.right)
    }
}

impl FromStr for PauliPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<PauliPair> {
        let s = s.trim().trim_start_matches(['+', '-']).trim_start_matches('i');
        let cs: Vec<char> = s.chars().collect();
        if cs.len() != 2 {
            return Err(Error::Parse(format!("expected two Paulis, got '{s}'")));
        }
        Ok(PauliPair::new(Pauli::from_char(cs[0])?, Pauli::from_char(cs[1])?))
    }
}

/// Generators whose images define a [`Clifford2`].
pub const GENERATORS: [PauliPair; 4] = [PauliPair::XI, PauliPair::ZI, PauliPair::IX, PauliPair::IZ];

/// A two-qubit Clifford modulo Paulis and phases: an element of Sp(4, 2).
///
/// `images[k]` is `U G_k U^†` for `G_k` in [`GENERATORS`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clifford2 {
    images: [PauliPair; 4],
}

impl Clifford2 {
    pub fn new(images: [PauliPair; 4]) -> Result<Clifford2> {
        for a in 0..4 {
            for b in 0..4 {
                let want = GENERATORS[a].commutes_with(GENERATORS[b]);
                if images[a].commutes_with(images[b]) != want {
                    return Err(Error::NotSymplectic(format!(
                        "images of {} and {} ({} and {}) break commutation",
                        GENERATORS[a], GENERATORS[b], images[a], images[b]
                    )));
                }
            }
            if images[a].is_identity() {
                return Err(Error::NotSymplectic(format!("{} maps to identity", GENERATORS[a])));
            }
        }
        Ok(Clifford2 { images })
    }

    pub fn identity() -> Clifford2 {
        Clifford2 { images: GENERATORS }
    }

    pub fn images(&self) -> [PauliPair; 4] {
        self.images
    }

    /// `U P U^†` modulo phase.
    #[inline]
    pub fn conjugate(&self, p: PauliPair) -> PauliPair {
        let mut out = PauliPair::II;
        let bits = [p.left.x_bit(), p.left.z_bit(), p.right.x_bit(), p.right.z_bit()];
        for (k, &b) in bits.iter().enumerate() {
            if b == 1 {
                out = out * self.images[k];
            }
        }
        out
    }

    /// The gate `self · first`: apply `first`, then `self`.
    pub fn after(&self, first: &Clifford2) -> Clifford2 {
        Clifford2 { images: first.images.map(|p| self.conjugate(p)) }
    }

    pub fn inverse(&self) -> Clifford2 {
        let mut table = [PauliPair::II; 16];
        for i in 0..16 {
            let p = PauliPair::from_index(i);
            table[self.conjugate(p).index()] = p;
        }
        Clifford2 { images: GENERATORS.map(|g| table[g.index()]) }
    }

    /// Tensor product of single-qubit Cliffords, each given by images of (X, Z).
    pub fn local(left: [Pauli; 2], right: [Pauli; 2]) -> Result<Clifford2> {
        Clifford2::new([
            PauliPair::new(left[0], Pauli::I),
            PauliPair::new(left[1], Pauli::I),
            PauliPair::new(Pauli::I, right[0]),
            PauliPair::new(Pauli::I, right[1]),
        ])
    }

    /// All 720 elements, in a fixed order.
    pub fn all() -> Vec<Clifford2> {
        let nonid: Vec<PauliPair> = (1..16).map(PauliPair::from_index).collect();
        let mut out = Vec::with_capacity(720);
        for &a in &nonid {
            for &b in &nonid {
                if a.commutes_with(b) {
                    continue;
                }
                for &c in &nonid {
                    if !c.commutes_with(a) || !c.commutes_with(b) {
                        continue;
                    }
                    for &d in &nonid {
                        if let Ok(g) = Clifford2::new([a, b, c, d]) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }

    /// A uniformly random element.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Clifford2 {
        let all = all_cached();
        all[rng.gen_range(0..all.len())]
    }

    /// Text form: four lines `XI->..`, `ZI->..`, `IX->..`, `IZ->..`.
    pub fn to_text(&self) -> String {
        GENERATORS.iter().zip(self.images.iter()).map(|(g, i)| format!("{g}->{i}\n")).collect()
    }

    /// Named gate or image table (lines or `;`/`,`-separated entries).
    pub fn parse_spec(s: &str) -> Result<Clifford2> {
        match named_gate(s.trim()) {
            Some((g, _)) => Ok(g),
            None => s.parse(),
        }
    }
}

impl FromStr for Clifford2 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Clifford2> {
        let mut images: [Option<PauliPair>; 4] = [None; 4];
        for entry in s.split(['\n', ';', ',']) {
            let entry = entry.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            let (lhs, rhs) =
                entry.split_once("->").ok_or_else(|| Error::Parse(format!("expected 'PQ->RS', got '{entry}'")))?;
            let lhs: PauliPair = lhs.parse()?;
            let k = GENERATORS
                .iter()
                .position(|&g| g == lhs)
                .ok_or_else(|| Error::Parse(format!("'{lhs}' is not one of XI, ZI, IX, IZ")))?;
            if images[k].replace(rhs.parse()?).is_some() {
                return Err(Error::Parse(format!("duplicate entry for {lhs}")));
            }
        }
        let mut out = [PauliPair::II; 4];
        for k in 0..4 {
            out[k] = images[k].ok_or_else(|| Error::Parse(format!("missing image of {}", GENERATORS[k])))?;
        }
        Clifford2::new(out)
    }
}

impl fmt::Display for Clifford2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = GENERATORS.iter().zip(self.images.iter()).map(|(g, i)| format!("{g}->{i}")).collect();
        write!(f, "{}", parts.join(";"))
    }
}

fn all_cached() -> &'static [Clifford2] {
    static ALL: std::sync::OnceLock<Vec<Clifford2>> = std::sync::OnceLock::new();
    ALL.get_or_init(Clifford2::all)
}

fn table(s: [&str; 4]) -> Clifford2 {
    let images = s.map(|t| t.parse::<PauliPair>().expect("static table"));
    Clifford2::new(images).expect("static table is symplectic")
}

/// CNOT with the left qubit as control.
pub fn cnot() -> Clifford2 {
    table(["XX", "ZI", "IX", "ZZ"])
}

/// CNOT with the right qubit as control.
pub fn notc() -> Clifford2 {
    table(["XI", "ZZ", "XX", "IZ"])
}

/// `(H ⊗ H) · CNOT`.
pub fn bell() -> Clifford2 {
    table(["ZZ", "XI", "IZ", "XX"])
}

/// `(1 ⊗ R_X[π/2]) · iSWAP`.
pub fn opt152() -> Clifford2 {
    table(["ZZ", "IY", "YY", "ZI"])
}

/// iSWAP followed by the order-three rotation about (1,1,1) on the right qubit.
pub fn v_gate() -> Clifford2 {
    table(["ZX", "IY", "YY", "ZI"])
}

pub fn swap() -> Clifford2 {
    table(["IX", "IZ", "XI", "ZI"])
}

pub fn iswap() -> Clifford2 {
    table(["ZY", "IZ", "YZ", "ZI"])
}

/// Names accepted by [`named_gate`].
pub const GATE_NAMES: [&str; 8] = ["identity", "cnot", "notc", "bell", "opt152", "v", "swap", "iswap"];

/// A named gate together with its conventional stabilizer input.
pub fn named_gate(name: &str) -> Option<(Clifford2, Pauli)> {
    Some(match name.to_ascii_lowercase().as_str() {
        "identity" | "id" => (Clifford2::identity(), Pauli::Z),
        "cnot" => (cnot(), Pauli::Z),
        "notc" => (notc(), Pauli::X),
        "bell" => (bell(), Pauli::Z),
        "opt152" => (opt152(), Pauli::X),
        "v" => (v_gate(), Pauli::X),
        "swap" => (swap(), Pauli::Z),
        "iswap" => (iswap(), Pauli::Z),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::collections::HashSet;

    #[test]
    fn klein_group_multiplication() {
        assert_eq!(Pauli::X * Pauli::Z, Pauli::Y);
        assert_eq!(Pauli::Y * Pauli::Y, Pauli::I);
        for a in Pauli::ALL {
            assert_eq!(a * Pauli::I, a);
            for b in Pauli::ALL {
                assert_eq!(a * b, b * a);
                let anti = a != Pauli::I && b != Pauli::I && a != b;
                assert_eq!(a.commutes_with(b), !anti);
            }
        }
    }

    #[test]
    fn sp42_has_720_distinct_elements_closed_under_composition() {
        let all = Clifford2::all();
        assert_eq!(all.len(), 720);
        let set: HashSet<_> = all.iter().copied().collect();
        assert_eq!(set.len(), 720);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let a = Clifford2::random(&mut rng);
            let b = Clifford2::random(&mut rng);
            assert!(set.contains(&a.after(&b)));
            assert_eq!(a.after(&a.inverse()), Clifford2::identity());
        }
    }

    #[test]
    fn conjugation_is_a_homomorphism() {
        for g in Clifford2::all().iter().step_by(7) {
            for i in 0..16 {
                for j in 0..16 {
                    let (p, q) = (PauliPair::from_index(i), PauliPair::from_index(j));
                    assert_eq!(g.conjugate(p * q), g.conjugate(p) * g.conjugate(q));
                }
            }
        }
    }

    #[test]
    fn named_tables() {
        assert_eq!(notc().conjugate(PauliPair::XI), PauliPair::XI);
        assert_eq!(notc().conjugate(PauliPair::ZI), "ZZ".parse().unwrap());
        // (H⊗H)·CNOT composed from its factors.
        let h = Clifford2::local([Pauli::Z, Pauli::X], [Pauli::Z, Pauli::X]).unwrap();
        assert_eq!(h.after(&cnot()), bell());
        assert_eq!(
            iswap().after(&iswap()).images(),
            Clifford2::local([Pauli::X, Pauli::Z], [Pauli::X, Pauli::Z]).unwrap().images()
        );
        // R_X[π/2] acts as X->X, Z->Y.
        let rx = Clifford2::local([Pauli::X, Pauli::Z], [Pauli::X, Pauli::Y]).unwrap();
        assert_eq!(rx.after(&iswap()), opt152());
        // Order-three rotation about (1,1,1): X->Z->Y->X up to orientation.
        let r3 = Clifford2::local([Pauli::X, Pauli::Z], [Pauli::Z, Pauli::Y]).unwrap();
        assert_eq!(r3.after(&iswap()), v_gate());
    }

    #[test]
    fn text_round_trip_and_errors() {
        for g in [cnot(), notc(), bell(), opt152(), v_gate()] {
            assert_eq!(g.to_text().parse::<Clifford2>().unwrap(), g);
            assert_eq!(g.to_string().parse::<Clifford2>().unwrap(), g);
        }
        let bad = "XI->XI\nZI->XI\nIX->IX\nIZ->IZ";
        assert!(matches!(bad.parse::<Clifford2>(), Err(Error::NotSymplectic(_))));
        assert!(matches!("XI->XX".parse::<Clifford2>(), Err(Error::Parse(_))));
        assert_eq!(Clifford2::parse_spec("opt152").unwrap(), opt152());
    }
}
