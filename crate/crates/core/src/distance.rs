//! Exact code distances from the tropical contraction, transfer-matrix
//! growth of bare logicals, and Pareto search over tree assignments.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{eigenvalues, linear_fit, mean_stderr};
use crate::par;
use crate::pauli::{Clifford2, Pauli, PauliPair};
use crate::semiring::Trop;
use crate::tensors::contract_tree;
use crate::tree::{gate_name, NodeSpec, RTilde, Tree, TreeSpec};

/// `(d_I, d_X, d_Z, d_Y)`; `d_I` is always zero.
pub type Dist = [u64; 4];

/// A single physical qubit.
pub const LEAF: Dist = [0, 1, 1, 1];

/// Code distance `min(d_X, d_Z, d_Y)`.
pub fn min_distance(d: &Dist) -> u64 {
    d[1].min(d[2]).min(d[3])
}

/// `d'_j = min_{(α,β) ∈ class j} (left_α + right_β)`.
pub fn distance_join(rt: &RTilde, left: &Dist, right: &Dist) -> Dist {
    rt.combine(&left.map(Trop), &right.map(Trop)).map(|t| t.0)
}

/// Distances of the identical-node tree at depths `0..=t_max`.
pub fn distance_sequence(rt: &RTilde, t_max: usize) -> Vec<Dist> {
    let mut out = vec![LEAF];
    for _ in 0..t_max {
        let d = *out.last().expect("non-empty");
        out.push(distance_join(rt, &d, &d));
    }
    out
}

/// Exponential growth base from a least-squares fit of `ln d` against `t` on
/// the last `window` depths.
pub fn growth_base(ds: &[u64], window: usize) -> Result<f64> {
    let n = ds.len();
    let start = n.saturating_sub(window);
    let (t, y): (Vec<f64>, Vec<f64>) =
        (start..n).filter(|&t| ds[t] > 0).map(|t| (t as f64, (ds[t] as f64).ln())).unzip();
    Ok(linear_fit(&t, &y)?.slope.exp())
}

/// Distance of a tree whose `erased_leaves` are fully known to the adversary and
/// whose `erased_links` (indexed by node) admit any Pauli for free.
pub fn tropical_tree_distance(tree: &Tree, erased_leaves: &[bool], erased_links: &[bool]) -> Result<Dist> {
    if erased_leaves.len() != tree.num_leaves() {
        return Err(Error::ShapeMismatch { expected: tree.num_leaves(), found: erased_leaves.len() });
    }
    if !erased_links.is_empty() && erased_links.len() != tree.num_nodes() {
        return Err(Error::ShapeMismatch { expected: tree.num_nodes(), found: erased_links.len() });
    }
    let free = [Trop(0); 4];
    let out = contract_tree(
        tree,
        |l| if erased_leaves[l] { free } else { LEAF.map(Trop) },
        |k| erased_links.get(k).copied().unwrap_or(false).then_some(free),
    );
    Ok(out.map(|t| t.0))
}

pub fn tree_distance(tree: &Tree) -> Dist {
    contract_tree(tree, |_| LEAF.map(Trop), |_| None).map(|t| t.0)
}

/// `T_ij` = number of `P_i` (over `X, Z, Y`) in the image of `P_j ⊗ I`.
pub fn transfer_matrix(gate: &Clifford2) -> [[u64; 3]; 3] {
    let mut t = [[0; 3]; 3];
    for j in 0..3 {
        let img = gate.conjugate(PauliPair::new(Pauli::ALL[j + 1], Pauli::I));
        for i in 0..3 {
            let p = Pauli::ALL[i + 1];
            t[i][j] = u64::from(img.left == p) + u64::from(img.right == p);
        }
    }
    t
}

/// Eigenvalues of the transfer matrix, by decreasing modulus.
pub fn transfer_eigenvalues(gate: &Clifford2) -> Vec<Complex64> {
    let t = transfer_matrix(gate);
    eigenvalues(&t.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect())
}

/// Weight of the bare logical `P_j` after `t` layers: `|T^t e_j|_1`.
pub fn bare_logical_weight(gate: &Clifford2, j: usize, t: usize) -> u64 {
    let m = transfer_matrix(gate);
    let mut v = [0u64; 3];
    v[j] = 1;
    for _ in 0..t {
        v = std::array::from_fn(|i| (0..3).map(|k| m[i][k] * v[k]).sum());
    }
    v.iter().sum()
}

/// One candidate gate for the search.
#[derive(Clone, Debug)]
pub struct PoolEntry {
    pub gate: Clifford2,
    pub stab: Pauli,
    rt: RTilde,
}

impl PoolEntry {
    pub fn new(gate: Clifford2, stab: Pauli) -> Result<PoolEntry> {
        Ok(PoolEntry { gate, stab, rt: RTilde::new(&gate, stab)? })
    }
}

#[derive(Copy, Clone, Debug)]
struct Witness {
    d: [u64; 3],
    pool: usize,
    left: usize,
    right: usize,
}

/// Best tree found at one depth.
#[derive(Clone, Debug, Serialize)]
pub struct DepthBest {
    pub t: usize,
    pub front_size: usize,
    pub distance: Dist,
    pub tree: TreeSpec,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub pruned: bool,
    pub depths: Vec<DepthBest>,
    /// All distinct `(d_X, d_Z, d_Y)` kept at the final depth.
    pub final_front: Vec<[u64; 3]>,
}

/// Largest number of joins the search will attempt at one depth.
pub const SEARCH_JOIN_LIMIT: u64 = 2_000_000_000;

fn dominated(a: &[u64; 3], b: &[u64; 3]) -> bool {
    a != b && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Search over trees whose nodes are drawn from `pool`, up to depth `t_max`.
///
/// With `prune`, vectors dominated componentwise by another are discarded at
/// every depth; otherwise every distinct vector is kept.
pub fn optimal_search(pool: &[PoolEntry], t_max: usize, prune: bool) -> Result<SearchResult> {
    if pool.is_empty() {
        return Err(Error::InvalidInput("empty gate pool".into()));
    }
    let mut fronts: Vec<Vec<Witness>> = vec![vec![Witness { d: [1, 1, 1], pool: 0, left: 0, right: 0 }]];
    let mut depths = Vec::new();
    for t in 1..=t_max {
        let prev = fronts.last().expect("non-empty");
        let n = prev.len();
        let joins = (n as u64) * (n as u64) * pool.len() as u64;
        if joins > SEARCH_JOIN_LIMIT {
            return Err(Error::ResourceGuard(format!("depth {t} needs {joins} joins")));
        }
        let per_pool: Vec<Vec<Witness>> = par::map_range(pool.len(), |p| {
            let rt = &pool[p].rt;
            let sym = rt.is_leg_symmetric();
            let mut seen: HashMap<[u64; 3], Witness> = HashMap::new();
            for a in 0..n {
                let da = [0, prev[a].d[0], prev[a].d[1], prev[a].d[2]];
                for b in (if sym { a } else { 0 })..n {
                    let db = [0, prev[b].d[0], prev[b].d[1], prev[b].d[2]];
                    let j = distance_join(rt, &da, &db);
                    let d = [j[1], j[2], j[3]];
                    seen.entry(d).or_insert(Witness { d, pool: p, left: a, right: b });
                }
            }
            let mut v: Vec<Witness> = seen.into_values().collect();
            v.sort_by_key(|w| (w.d, w.left, w.right));
            v
        });
        let mut all: HashMap<[u64; 3], Witness> = HashMap::new();
        for w in per_pool.into_iter().flatten() {
            all.entry(w.d).or_insert(w);
        }
        let mut cands: Vec<Witness> = all.into_values().collect();
        cands.sort_by(|x, y| {
            let sx: u64 = x.d.iter().sum();
            let sy: u64 = y.d.iter().sum();
            sy.cmp(&sx).then(x.d.cmp(&y.d))
        });
        let front = if prune {
            let mut kept: Vec<Witness> = Vec::new();
            for c in cands {
                if !kept.iter().any(|k| dominated(&c.d, &k.d)) {
                    kept.push(c);
                }
            }
            kept
        } else {
            cands
        };
        fronts.push(front);
        let front = fronts.last().expect("just pushed");
        let best = (0..front.len())
            .max_by(|&x, &y| {
                let (a, b) = (&front[x].d, &front[y].d);
                let ka = (a.iter().min(), a.iter().sum::<u64>());
                let kb = (b.iter().min(), b.iter().sum::<u64>());
                ka.cmp(&kb).then(b.cmp(a))
            })
            .expect("front is non-empty");
        let w = front[best];
        depths.push(DepthBest {
            t,
            front_size: front.len(),
            distance: [0, w.d[0], w.d[1], w.d[2]],
            tree: build_spec(&fronts, pool, t, best),
        });
    }
    let final_front = fronts.last().map(|f| f.iter().map(|w| w.d).collect()).unwrap_or_default();
    Ok(SearchResult { pruned: prune, depths, final_front })
}

fn build_spec(fronts: &[Vec<Witness>], pool: &[PoolEntry], t: usize, root: usize) -> TreeSpec {
    let mut nodes = Vec::new();
    // (depth of subtree, witness index, layer, index)
    let mut stack = vec![(t, root, 0usize, 0usize)];
    while let Some((depth, w, layer, index)) = stack.pop() {
        if depth == 0 {
            continue;
        }
        let wit = fronts[depth][w];
        let e = &pool[wit.pool];
        nodes.push(NodeSpec { layer, index, gate: gate_name(&e.gate), stab: e.stab });
        stack.push((depth - 1, wit.left, layer + 1, 2 * index));
        stack.push((depth - 1, wit.right, layer + 1, 2 * index + 1));
    }
    nodes.sort_by_key(|n| (n.layer, n.index));
    let spec = TreeSpec { depth: t, defaults: None, nodes };
    Tree::from_spec(&spec).map(|tr| tr.to_spec()).unwrap_or(spec)
}

/// Mean distance of random-gate trees.
#[derive(Clone, Debug, Serialize)]
pub struct RandomTreeStats {
    pub t: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Mean code distance over `samples` trees with uniformly random gates and
/// stabilizer input `stab`, at every depth `1..=t_max`.
pub fn random_tree_distance(t_max: usize, samples: usize, stab: Pauli, seed: u64) -> Result<Vec<RandomTreeStats>> {
    let mut out = Vec::new();
    for t in 1..=t_max {
        let ds: Vec<Result<f64>> = par::map_range(samples, |s| {
            let mut rng = par::rng_for(seed, par::stream_id(&[t as u64, s as u64]));
            let tree = Tree::random(t, stab, &mut rng)?;
            Ok(min_distance(&tree_distance(&tree)) as f64)
        });
        let ds: Vec<f64> = ds.into_iter().collect::<Result<_>>()?;
        let (mean, stderr) = mean_stderr(&ds);
        out.push(RandomTreeStats { t, mean, stderr });
    }
    Ok(out)
}

/// Growth base of the mean random-tree distance, fitting only depths `> exclude`.
pub fn random_growth_base(stats: &[RandomTreeStats], exclude: usize) -> Result<f64> {
    let (t, y): (Vec<f64>, Vec<f64>) =
        stats.iter().filter(|s| s.t > exclude).map(|s| (s.t as f64, s.mean.ln())).unzip();
    Ok(linear_fit(&t, &y)?.slope.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{bell, opt152};

    fn opt_rt() -> RTilde {
        RTilde::new(&opt152(), Pauli::X).unwrap()
    }

    #[test]
    fn opt152_joins_and_recursion() {
        assert_eq!(distance_join(&opt_rt(), &LEAF, &LEAF), [0, 2, 1, 2]);
        let seq = distance_sequence(&opt_rt(), 12);
        for w in seq.windows(2) {
            let (d, n) = (w[0], w[1]);
            assert_eq!(n[1], 2 * d[1].min(d[2]));
            assert_eq!(n[2], d[3]);
            assert_eq!(n[3], d[1] + d[2]);
        }
    }

    #[test]
    fn bell_join() {
        let rt = RTilde::new(&bell(), Pauli::Z).unwrap();
        assert_eq!(distance_join(&rt, &[0, 2, 1, 2], &[0, 2, 1, 2]), [0, 2, 2, 3]);
    }

    #[test]
    fn erasures_lower_distance() {
        let tree = Tree::uniform(2, bell(), Pauli::Z).unwrap();
        let mut e = vec![false; 4];
        assert_eq!(tropical_tree_distance(&tree, &e, &[]).unwrap()[1], 2);
        e[0] = true;
        assert_eq!(tropical_tree_distance(&tree, &e, &[]).unwrap()[1], 1);
        let links = vec![true, false, false];
        let d = tropical_tree_distance(&tree, &[false; 4], &links).unwrap();
        assert_eq!(min_distance(&d), 0);
    }

    #[test]
    fn transfer_spectra() {
        let ev = transfer_eigenvalues(&opt152());
        assert!((ev[0].re - 1.521379706804568).abs() < 1e-10);
        let local = Clifford2::local([Pauli::Z, Pauli::X], [Pauli::Y, Pauli::X]).unwrap();
        assert!(transfer_eigenvalues(&local).iter().all(|z| (z.norm() - 1.0).abs() < 1e-9));
    }

    #[test]
    fn pruning_keeps_optimum_on_small_pool() {
        let pool: Vec<PoolEntry> =
            [(opt152(), Pauli::X), (bell(), Pauli::Z)].iter().map(|(g, s)| PoolEntry::new(*g, *s).unwrap()).collect();
        let pruned = optimal_search(&pool, 4, true).unwrap();
        let full = optimal_search(&pool, 4, false).unwrap();
        for (a, b) in pruned.depths.iter().zip(&full.depths) {
            assert_eq!(min_distance(&a.distance), min_distance(&b.distance));
            let tree = Tree::from_spec(&a.tree).unwrap();
            assert_eq!(tree_distance(&tree), a.distance);
        }
    }
}
