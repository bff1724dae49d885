//! Tree contraction over an arbitrary semiring, and the enumerators and coset
//! probabilities built on it.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::semiring::{Poly, Prob, Semiring};
use crate::tree::{RTilde, Tree};

/// Largest depth accepted by the symbolic (polynomial) contractions.
pub const SYMBOLIC_DEPTH_CAP: usize = 6;

/// Single-qubit Pauli channel `(p_I, p_X, p_Z, p_Y)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel(pub [f64; 4]);

impl Channel {
    pub fn new(px: f64, pz: f64, py: f64) -> Result<Channel> {
        let p = [1.0 - px - pz - py, px, pz, py];
        if p.iter().any(|&v| !(0.0..=1.0).contains(&v) || v.is_nan()) {
            return Err(Error::InvalidInput(format!("invalid channel rates ({px}, {pz}, {py})")));
        }
        Ok(Channel(p))
    }

    pub fn depolarizing(p: f64) -> Result<Channel> {
        Channel::new(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn noiseless() -> Channel {
        Channel([1.0, 0.0, 0.0, 0.0])
    }

    /// Leaf vector `v_j = f_{α ⊕ j}` for a physical error `α`.
    pub fn shifted(&self, alpha: Pauli) -> [f64; 4] {
        std::array::from_fn(|j| self.0[alpha.index() ^ j])
    }

    pub fn total_error(&self) -> f64 {
        1.0 - self.0[0]
    }
}

/// `u'_j = Σ_i u_i g_{i ⊕ j}`: a Pauli insertion with shifted weights `g`.
#[inline]
pub fn insert<S: Semiring>(u: &[S; 4], g: &[S; 4]) -> [S; 4] {
    std::array::from_fn(|j| (0..4).fold(S::zero(), |acc, i| acc.add(&u[i].mul(&g[i ^ j]))))
}

/// Contract a tree given leaf vectors and optional insertions on node output links.
///
/// `link(k)` is applied on the wire above node `k`, after the node's `R̃`.
pub fn contract_tree<S, L, K>(tree: &Tree, leaf: L, link: K) -> [S; 4]
where
    S: Semiring,
    L: Fn(usize) -> [S; 4],
    K: Fn(usize) -> Option<[S; 4]>,
{
    let mut level: Vec<[S; 4]> = (0..tree.num_leaves()).map(leaf).collect();
    for layer in (0..tree.depth()).rev() {
        let base = Tree::node_index(layer, 0);
        level = level
            .chunks_exact(2)
            .enumerate()
            .map(|(i, pair)| {
                let k = base + i;
                let u = tree.rtilde(k).combine(&pair[0], &pair[1]);
                match link(k) {
                    Some(g) => insert(&u, &g),
                    None => u,
                }
            })
            .collect();
    }
    level.pop().expect("tree has a root")
}

/// Unnormalized coset weights `B_j` for a leaf error string under `channel`.
pub fn coset_weights(tree: &Tree, errors: &[Pauli], channel: &Channel) -> Result<[f64; 4]> {
    check_len(tree, errors)?;
    let out = contract_tree(tree, |l| channel.shifted(errors[l]).map(Prob), |_| None);
    Ok(out.map(|p| p.0))
}

/// Normalized coset probabilities `η_j`, renormalized at every node so deep
/// trees do not underflow.
pub fn coset_probs(tree: &Tree, errors: &[Pauli], channel: &Channel) -> Result<[f64; 4]> {
    coset_probs_with_bulk(tree, errors, channel, None)
}

/// Coset probabilities relative to a fault made of leaf errors plus, when
/// `bulk` is given, one Pauli per node link drawn from the bulk channel.
/// The fault itself is always in class `0`.
pub fn coset_probs_with_bulk(
    tree: &Tree,
    errors: &[Pauli],
    channel: &Channel,
    bulk: Option<(&Channel, &[Pauli])>,
) -> Result<[f64; 4]> {
    check_len(tree, errors)?;
    if let Some((_, faults)) = bulk {
        if faults.len() != tree.num_nodes() {
            return Err(Error::ShapeMismatch { expected: tree.num_nodes(), found: faults.len() });
        }
    }
    let mut level: Vec<[f64; 4]> = errors.iter().map(|&e| channel.shifted(e)).collect();
    for layer in (0..tree.depth()).rev() {
        let base = Tree::node_index(layer, 0);
        let mut next = Vec::with_capacity(level.len() / 2);
        for (i, pair) in level.chunks_exact(2).enumerate() {
            let k = base + i;
            let v = pair[0].map(Prob);
            let w = pair[1].map(Prob);
            let mut u = tree.rtilde(k).combine(&v, &w);
            if let Some((ch, faults)) = bulk {
                u = insert(&u, &ch.shifted(faults[k]).map(Prob));
            }
            next.push(normalize(u.map(|p| p.0))?);
        }
        level = next;
    }
    normalize(level[0])
}

pub fn normalize(b: [f64; 4]) -> Result<[f64; 4]> {
    let z: f64 = b.iter().sum();
    if z > 0.0 && z.is_finite() {
        Ok(b.map(|v| v / z))
    } else {
        Err(Error::ZeroNorm)
    }
}

fn check_len(tree: &Tree, errors: &[Pauli]) -> Result<()> {
    if errors.len() != tree.num_leaves() {
        return Err(Error::ShapeMismatch { expected: tree.num_leaves(), found: errors.len() });
    }
    Ok(())
}

fn check_cap(tree: &Tree) -> Result<()> {
    if tree.depth() > SYMBOLIC_DEPTH_CAP {
        return Err(Error::DegreeCap { depth: tree.depth(), cap: SYMBOLIC_DEPTH_CAP });
    }
    Ok(())
}

fn leaf_poly(alpha: Pauli) -> [Poly; 4] {
    std::array::from_fn(|j| Poly::var(alpha.index() ^ j))
}

/// Vector enumerator `A_j(w, x, z, y)`.
pub fn vector_enumerator(tree: &Tree) -> Result<[Poly; 4]> {
    check_cap(tree)?;
    Ok(contract_tree(tree, |_| leaf_poly(Pauli::I), |_| None))
}

/// Coset enumerators `B_j` of the error string `errors`.
pub fn coset_enumerator(tree: &Tree, errors: &[Pauli]) -> Result<[Poly; 4]> {
    check_cap(tree)?;
    check_len(tree, errors)?;
    Ok(contract_tree(tree, |l| leaf_poly(errors[l]), |_| None))
}

/// One level of the identical-node recursion `A'_i = Σ_{(α,β)} A_α A_β`.
pub fn recursion_step_a(a: &[Poly; 4], rt: &RTilde) -> [Poly; 4] {
    rt.combine(a, a)
}

/// JSON object mapping `"w^a x^b z^c y^d"` to coefficients. Coefficients beyond
/// `u64` are written as decimal strings.
pub fn poly_to_json(p: &Poly) -> serde_json::Value {
    let map = p
        .terms()
        .iter()
        .map(|(e, c)| {
            let v = match u64::try_from(c) {
                Ok(small) => serde_json::Value::from(small),
                Err(_) => serde_json::Value::from(c.to_string()),
            };
            (Poly::monomial_key(e), v)
        })
        .collect();
    serde_json::Value::Object(map)
}

pub fn poly_from_json(v: &serde_json::Value) -> Result<Poly> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("enumerator must be a JSON object".into()))?;
    let mut p = Poly::zero();
    for (k, c) in obj {
        let e = Poly::parse_key(k).ok_or_else(|| Error::Parse(format!("bad monomial key '{k}'")))?;
        let c: BigUint = match c {
            serde_json::Value::Number(n) => {
                n.as_u64().map(BigUint::from).ok_or_else(|| Error::Parse(format!("bad coefficient {n}")))?
            }
            serde_json::Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad coefficient '{s}'")))?,
            other => return Err(Error::Parse(format!("bad coefficient {other}"))),
        };
        p.add_term(e, c);
    }
    Ok(p)
}
