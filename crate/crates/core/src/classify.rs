//! Classes of identical-node trees by their level-1 vector enumerator.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distance::{distance_sequence, min_distance};
use crate::error::Result;
use crate::pauli::{Clifford2, Pauli};
use crate::semiring::{Monomial, Poly};
use crate::tensors::vector_enumerator;
use crate::tree::{RTilde, Tree};

/// How two level-1 enumerators are identified.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    /// Identical polynomials component by component.
    Exact,
    /// Identical after one relabeling of `(X, Z, Y)` applied to both the
    /// variables `(x, z, y)` and the components `(A_X, A_Z, A_Y)`.
    Relabel,
}

/// Key: for each component, its two monomials in sorted order.
type Key = [[Monomial; 2]; 4];

fn key_of(a: &[Poly; 4]) -> Key {
    std::array::from_fn(|i| {
        let mut ms: Vec<Monomial> = Vec::new();
        for (e, c) in a[i].terms() {
            for _ in 0..u64::try_from(c).unwrap_or(2) {
                ms.push(*e);
            }
        }
        ms.sort();
        [ms[0], ms[1]]
    })
}

const PERMS: [[usize; 4]; 6] = [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1]];

fn relabel(k: &Key, p: &[usize; 4]) -> Key {
    let mut out = [[[0; 4]; 2]; 4];
    for i in 0..4 {
        let mut ms = k[i].map(|m| {
            let mut r = [0; 4];
            for v in 0..4 {
                r[p[v]] = m[v];
            }
            r
        });
        ms.sort();
        out[p[i]] = ms;
    }
    out
}

fn canonical(k: &Key, eq: Equivalence) -> Key {
    match eq {
        Equivalence::Exact => *k,
        Equivalence::Relabel => PERMS.iter().map(|p| relabel(k, p)).min().expect("six perms"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Level1Class {
    /// Level-1 enumerator of a representative, as display strings.
    pub enumerator: [String; 4],
    pub members: usize,
    /// Representative gate (inline table) and stabilizer input.
    pub representative: (String, Pauli),
    /// Identical-node distances at depths `0..=t_check`.
    pub distances: Vec<u64>,
    pub exponential: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub equivalence: Equivalence,
    pub t_check: usize,
    pub classes: Vec<Level1Class>,
}

impl Classification {
    pub fn num_exponential(&self) -> usize {
        self.classes.iter().filter(|c| c.exponential).count()
    }
}

/// Growth counts as exponential when `d(t) >= 8 d(t/2)`; linear growth gives 2.
fn is_exponential(ds: &[u64]) -> bool {
    let t = ds.len() - 1;
    ds[t] >= 8 * ds[t / 2].max(1)
}

/// Classify all 720 gates times 3 stabilizer inputs.
pub fn classify_level1(eq: Equivalence, t_check: usize) -> Result<Classification> {
    let mut groups: BTreeMap<Key, (usize, Clifford2, Pauli, [Poly; 4])> = BTreeMap::new();
    for g in Clifford2::all() {
        for s in [Pauli::X, Pauli::Z, Pauli::Y] {
            let a = vector_enumerator(&Tree::uniform(1, g, s)?)?;
            let key = canonical(&key_of(&a), eq);
            groups.entry(key).or_insert((0, g, s, a)).0 += 1;
        }
    }
    let mut classes: Vec<Level1Class> = groups
        .into_values()
        .map(|(members, g, s, a)| {
            let rt = RTilde::new(&g, s).expect("stab is not identity");
            let distances: Vec<u64> = distance_sequence(&rt, t_check).iter().map(min_distance).collect();
            Level1Class {
                enumerator: a.each_ref().map(|p| p.to_string()),
                members,
                representative: (g.to_string(), s),
                exponential: is_exponential(&distances),
                distances,
            }
        })
        .collect();
    classes.sort_by(|a, b| b.distances.last().cmp(&a.distances.last()).then(b.members.cmp(&a.members)));
    Ok(Classification { equivalence: eq, t_check, classes })
}
