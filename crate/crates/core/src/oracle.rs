//! Brute-force stabilizer-group enumeration for small trees.
//!
//! Independent of the `R̃` contraction: Paulis are pushed through the circuit
//! gate by gate, and every element of the stabilizer group is listed.

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliPair};
use crate::semiring::{Poly, Semiring};
use crate::tensors::Channel;
use crate::tree::Tree;

/// Trees with more stabilizer generators than this are refused.
pub const MAX_GENERATORS: usize = 20;

/// Leaf strings for the logicals and stabilizer generators of a tree code.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    pub logicals: [Vec<Pauli>; 4],
    pub generators: Vec<Vec<Pauli>>,
}

fn push(tree: &Tree, root: Pauli, fresh: &dyn Fn(usize) -> Pauli) -> Vec<Pauli> {
    let mut wires = vec![root];
    for layer in 0..tree.depth() {
        let mut next = Vec::with_capacity(wires.len() * 2);
        for (i, &w) in wires.iter().enumerate() {
            let k = Tree::node_index(layer, i);
            let (gate, _) = tree.gate(k);
            let out = gate.conjugate(PauliPair::new(w, fresh(k)));
            next.push(out.left);
            next.push(out.right);
        }
        wires = next;
    }
    wires
}

impl StabilizerCode {
    pub fn from_tree(tree: &Tree) -> Result<StabilizerCode> {
        if tree.num_nodes() > MAX_GENERATORS {
            return Err(Error::ResourceGuard(format!(
                "{} generators exceed the brute-force limit {MAX_GENERATORS}",
                tree.num_nodes()
            )));
        }
        let logicals = Pauli::ALL.map(|l| push(tree, l, &|_| Pauli::I));
        let generators = (0..tree.num_nodes())
            .map(|g| push(tree, Pauli::I, &|k| if k == g { tree.gate(k).1 } else { Pauli::I }))
            .collect();
        Ok(StabilizerCode { logicals, generators })
    }

    pub fn num_qubits(&self) -> usize {
        self.logicals[0].len()
    }

    /// Visit every element of the coset `L_j S` for each `j`.
    pub fn for_each_coset_element(&self, mut visit: impl FnMut(usize, &[Pauli])) {
        for (j, logical) in self.logicals.iter().enumerate() {
            let mut cur = logical.clone();
            visit(j, &cur);
            // Gray-code walk over subsets of generators.
            for step in 1u64..(1u64 << self.generators.len()) {
                let flip = step.trailing_zeros() as usize;
                for (c, g) in cur.iter_mut().zip(&self.generators[flip]) {
                    *c = *c * *g;
                }
                visit(j, &cur);
            }
        }
    }

    /// `B_j = Σ_{P ∈ L_j S} Π_i var(E_i P_i)`.
    pub fn coset_enumerator(&self, errors: &[Pauli]) -> Result<[Poly; 4]> {
        self.check(errors)?;
        let mut out: [Poly; 4] = Default::default();
        self.for_each_coset_element(|j, p| {
            let mut e = [0u32; 4];
            for (a, b) in errors.iter().zip(p) {
                e[(*a * *b).index()] += 1;
            }
            out[j] = out[j].add(&Poly::monomial(e, 1));
        });
        Ok(out)
    }

    /// Coset probabilities `Σ_{P ∈ L_j S} Π_i f(E_i P_i)`, unnormalized.
    pub fn coset_weights(&self, errors: &[Pauli], channel: &Channel) -> Result<[f64; 4]> {
        self.check(errors)?;
        let mut out = [0.0; 4];
        self.for_each_coset_element(|j, p| {
            out[j] += errors.iter().zip(p).map(|(a, b)| channel.0[(*a * *b).index()]).product::<f64>();
        });
        Ok(out)
    }

    fn check(&self, errors: &[Pauli]) -> Result<()> {
        if errors.len() != self.num_qubits() {
            return Err(Error::ShapeMismatch { expected: self.num_qubits(), found: errors.len() });
        }
        Ok(())
    }
}
