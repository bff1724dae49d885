//! Commutative semirings used by the tree contraction.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub trait Semiring: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
}

/// Ordinary real arithmetic.
#[derive(Copy, Clone, Debug, PartialEq, PartialOrd, Default)]
pub struct Prob(pub f64);

impl Semiring for Prob {
    fn zero() -> Self {
        Prob(0.0)
    }
    fn one() -> Self {
        Prob(1.0)
    }
    #[inline]
    fn add(&self, rhs: &Self) -> Self {
        Prob(self.0 + rhs.0)
    }
    #[inline]
    fn mul(&self, rhs: &Self) -> Self {
        Prob(self.0 * rhs.0)
    }
}

/// Min-plus arithmetic on weights with a saturating infinity.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trop(pub u64);

impl Trop {
    pub const INF: Trop = Trop(u64::MAX);

    pub fn is_inf(self) -> bool {
        self == Trop::INF
    }
}

impl Semiring for Trop {
    fn zero() -> Self {
        Trop::INF
    }
    fn one() -> Self {
        Trop(0)
    }
    #[inline]
    fn add(&self, rhs: &Self) -> Self {
        Trop(self.0.min(rhs.0))
    }
    #[inline]
    fn mul(&self, rhs: &Self) -> Self {
        Trop(self.0.saturating_add(rhs.0))
    }
}

/// Exponents of `(w, x, z, y)`.
pub type Monomial = [u32; 4];

/// Polynomial in `(w, x, z, y)` with non-negative integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigUint>,
}

impl Poly {
    pub fn monomial(exp: Monomial, coeff: u64) -> Poly {
        let mut p = Poly::default();
        if coeff != 0 {
            p.terms.insert(exp, BigUint::from(coeff));
        }
        p
    }

    /// The single variable for Pauli code `k` (`w, x, z, y` for `I, X, Z, Y`).
    pub fn var(k: usize) -> Poly {
        let mut e = [0; 4];
        e[k] = 1;
        Poly::monomial(e, 1)
    }

    pub fn add_term(&mut self, exp: Monomial, coeff: BigUint) {
        if !coeff.is_zero() {
            *self.terms.entry(exp).or_default() += coeff;
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigUint> {
        &self.terms
    }

    pub fn coeff(&self, exp: Monomial) -> BigUint {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of coefficients.
    pub fn total(&self) -> BigUint {
        self.terms.values().sum()
    }

    /// Largest total degree among the terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Smallest total weight `b + c + d` of a term, if any.
    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[1] + e[2] + e[3]).min()
    }

    pub fn eval(&self, v: [f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let c = c.to_f64().unwrap_or(f64::INFINITY);
                c * (0..4).map(|k| v[k].powi(e[k] as i32)).product::<f64>()
            })
            .sum()
    }

    /// Substitute `w = 1, x = z = y = u`; coefficients indexed by power of `u`.
    pub fn univariate(&self) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = Vec::new();
        for (e, c) in &self.terms {
            let k = (e[1] + e[2] + e[3]) as usize;
            if out.len() <= k {
                out.resize(k + 1, BigUint::zero());
            }
            out[k] += c;
        }
        out
    }

    /// Key in the `"w^a x^b z^c y^d"` format.
    pub fn monomial_key(e: &Monomial) -> String {
        format!("w^{} x^{} z^{} y^{}", e[0], e[1], e[2], e[3])
    }

    pub fn parse_key(key: &str) -> Option<Monomial> {
        let mut out = [0u32; 4];
        let mut seen = [false; 4];
        for part in key.split_whitespace() {
            let (var, exp) = part.split_once('^')?;
            let k = ["w", "x", "z", "y"].iter().position(|&v| v == var)?;
            if seen[k] {
                return None;
            }
            seen[k] = true;
            out[k] = exp.parse().ok()?;
        }
        seen.iter().all(|&s| s).then_some(out)
    }
}

impl Semiring for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::monomial([0; 4], 1)
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            *out.terms.entry(*e).or_default() += c;
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = Poly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                *out.terms.entry(e).or_default() += ca * cb;
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: String = ["w", "x", "z", "y"]
                .iter()
                .zip(e.iter())
                .filter(|(_, &p)| p > 0)
                .map(|(v, &p)| if p == 1 { v.to_string() } else { format!("{v}^{p}") })
                .collect();
            match (c.is_one(), vars.is_empty()) {
                (true, false) => write!(f, "{vars}")?,
                (_, true) => write!(f, "{c}")?,
                (false, false) => write!(f, "{c}{vars}")?,
            }
        }
        Ok(())
    }
}
