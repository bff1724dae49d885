//! Binary tree circuits built from two-qubit Cliffords.
//!
//! Nodes are stored in heap order: node `k = 2^layer - 1 + index`, layer 0 is
//! the root, children of node `(l, i)` are `(l + 1, 2i)` and `(l + 1, 2i + 1)`.
//! The bottom layer `depth - 1` feeds leaves `2i` and `2i + 1`. Each node takes
//! its parent wire on the left input and a fresh stabilizer state on the right
//! input; its left output goes to the left child.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{named_gate, Clifford2, Pauli, PauliPair, GATE_NAMES};
use crate::semiring::Semiring;

/// `R[i][j]`: the image of logical `P_i ⊗ P_j` under the gate.
pub fn r_tensor(gate: &Clifford2) -> [[PauliPair; 4]; 4] {
    let mut out = [[PauliPair::II; 4]; 4];
    for i in Pauli::ALL {
        for j in Pauli::ALL {
            out[i.index()][j.index()] = gate.conjugate(PauliPair::new(i, j));
        }
    }
    out
}

/// Gate with a stabilizer input projected onto its logical leg.
///
/// `pairs[i]` holds the two output pairs `(α, β)` in the class of logical `P_i`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct RTilde {
    pairs: [[(u8, u8); 2]; 4],
}

impl RTilde {
    pub fn new(gate: &Clifford2, stab: Pauli) -> Result<RTilde> {
        if stab == Pauli::I {
            return Err(Error::InvalidInput("stabilizer input must be X, Z or Y".into()));
        }
        let mut pairs = [[(0, 0); 2]; 4];
        for i in Pauli::ALL {
            for (slot, j) in [Pauli::I, stab].into_iter().enumerate() {
                let p = gate.conjugate(PauliPair::new(i, j));
                pairs[i.index()][slot] = (p.left.code(), p.right.code());
            }
        }
        Ok(RTilde { pairs })
    }

    pub fn pairs(&self, i: usize) -> [(u8, u8); 2] {
        self.pairs[i]
    }

    pub fn contains(&self, i: usize, a: u8, b: u8) -> bool {
        self.pairs[i].contains(&(a, b))
    }

    /// Logical class containing output pair `(a, b)`, if any.
    pub fn class_of(&self, a: u8, b: u8) -> Option<usize> {
        (0..4).find(|&i| self.contains(i, a, b))
    }

    /// All eight `(i, α, β)` entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u8, u8)> + '_ {
        (0..4).flat_map(move |i| self.pairs[i].iter().map(move |&(a, b)| (i, a, b)))
    }

    /// Whether swapping the two output legs leaves every class invariant.
    pub fn is_leg_symmetric(&self) -> bool {
        self.entries().all(|(i, a, b)| self.contains(i, b, a))
    }

    /// `u_i = Σ_{(α,β) ∈ class i} v_α w_β`.
    #[inline]
    pub fn combine<S: Semiring>(&self, v: &[S; 4], w: &[S; 4]) -> [S; 4] {
        std::array::from_fn(|i| {
            let [(a0, b0), (a1, b1)] = self.pairs[i];
            v[a0 as usize].mul(&w[b0 as usize]).add(&v[a1 as usize].mul(&w[b1 as usize]))
        })
    }
}

/// A depth-`t` tree with a gate and stabilizer input at each node.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree {
    depth: usize,
    gates: Vec<(Clifford2, Pauli)>,
    rtilde: Vec<RTilde>,
}

impl Tree {
    pub const MAX_DEPTH: usize = 30;

    pub fn from_fn(depth: usize, mut f: impl FnMut(usize, usize) -> (Clifford2, Pauli)) -> Result<Tree> {
        if depth > Tree::MAX_DEPTH {
            return Err(Error::ResourceGuard(format!("tree depth {depth} exceeds {}", Tree::MAX_DEPTH)));
        }
        let mut gates = Vec::with_capacity((1 << depth) - 1);
        for layer in 0..depth {
            for index in 0..(1usize << layer) {
                gates.push(f(layer, index));
            }
        }
        let rtilde = gates.iter().map(|(g, s)| RTilde::new(g, *s)).collect::<Result<_>>()?;
        Ok(Tree { depth, gates, rtilde })
    }

    pub fn uniform(depth: usize, gate: Clifford2, stab: Pauli) -> Result<Tree> {
        Tree::from_fn(depth, |_, _| (gate, stab))
    }

    /// Uniformly random gate at each node, fixed stabilizer input.
    pub fn random<R: Rng + ?Sized>(depth: usize, stab: Pauli, rng: &mut R) -> Result<Tree> {
        Tree::from_fn(depth, |_, _| (Clifford2::random(rng), stab))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_leaves(&self) -> usize {
        1 << self.depth
    }

    pub fn num_nodes(&self) -> usize {
        self.gates.len()
    }

    pub fn node_index(layer: usize, index: usize) -> usize {
        (1 << layer) - 1 + index
    }

    pub fn gate(&self, k: usize) -> (Clifford2, Pauli) {
        self.gates[k]
    }

    pub fn rtilde(&self, k: usize) -> &RTilde {
        &self.rtilde[k]
    }

    pub fn to_spec(&self) -> TreeSpec {
        let mut counts: BTreeMap<(String, Pauli), usize> = BTreeMap::new();
        for (g, s) in &self.gates {
            *counts.entry((gate_name(g), *s)).or_default() += 1;
        }
        let defaults =
            counts.iter().max_by_key(|(_, &c)| c).map(|((g, s), _)| NodeDefaults { gate: g.clone(), stab: *s });
        let mut nodes = Vec::new();
        for layer in 0..self.depth {
            for index in 0..(1usize << layer) {
                let (g, s) = self.gates[Tree::node_index(layer, index)];
                let name = gate_name(&g);
                if defaults.as_ref().is_some_and(|d| d.gate == name && d.stab == s) {
                    continue;
                }
                nodes.push(NodeSpec { layer, index, gate: name, stab: s });
            }
        }
        TreeSpec { depth: self.depth, defaults, nodes }
    }

    pub fn from_spec(spec: &TreeSpec) -> Result<Tree> {
        let mut over: BTreeMap<(usize, usize), (Clifford2, Pauli)> = BTreeMap::new();
        for n in &spec.nodes {
            if n.layer >= spec.depth || n.index >= (1usize << n.layer) {
                return Err(Error::InvalidInput(format!(
                    "node ({}, {}) outside a depth-{} tree",
                    n.layer, n.index, spec.depth
                )));
            }
            if over.insert((n.layer, n.index), (Clifford2::parse_spec(&n.gate)?, n.stab)).is_some() {
                return Err(Error::InvalidInput(format!("node ({}, {}) listed twice", n.layer, n.index)));
            }
        }
        let default = match &spec.defaults {
            Some(d) => Some((Clifford2::parse_spec(&d.gate)?, d.stab)),
            None => None,
        };
        let total = (1usize << spec.depth) - 1;
        if default.is_none() && over.len() != total {
            return Err(Error::ShapeMismatch { expected: total, found: over.len() });
        }
        Tree::from_fn(spec.depth, |l, i| over.get(&(l, i)).copied().or(default).expect("checked above"))
    }
}

/// Registered name if the table matches one, else the inline table.
pub fn gate_name(g: &Clifford2) -> String {
    GATE_NAMES
        .iter()
        .find(|n| named_gate(n).is_some_and(|(h, _)| h == *g))
        .map(|n| n.to_string())
        .unwrap_or_else(|| g.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDefaults {
    pub gate: String,
    pub stab: Pauli,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub layer: usize,
    pub index: usize,
    pub gate: String,
    pub stab: Pauli,
}

/// Serialized tree: `{depth, nodes: [{layer, index, gate, stab}], defaults}`.
///
/// `gate` is a registered name or an inline table such as `XI->ZZ;ZI->IY;IX->YY;IZ->ZI`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defaults: Option<NodeDefaults>,
    #[serde(default)]
    pub nodes: Vec<NodeSpec>,
}

impl TreeSpec {
    pub fn from_json(s: &str) -> Result<TreeSpec> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("TreeSpec serializes")
    }
}
