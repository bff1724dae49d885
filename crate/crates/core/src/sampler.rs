//! Direct Monte Carlo estimate of the optimal-decoder failure probability:
//! draw an explicit fault, contract the tree, and check whether the applied
//! fault's class is the unique most likely one.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::mean_stderr;
use crate::par;
use crate::pauli::Pauli;
use crate::tensors::{coset_probs_with_bulk, coset_weights, Channel};
use crate::tree::Tree;

/// Largest depth accepted by [`exact_failure`] (`4^8` leaf patterns).
pub const EXACT_DEPTH_CAP: usize = 3;

/// Relative gap below which two coset probabilities count as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// One drawn fault and its coset probabilities relative to it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaultSample {
    pub leaves: Vec<Pauli>,
    /// One Pauli per node link, when bulk noise is on.
    pub links: Option<Vec<Pauli>>,
    pub eta: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleEstimate {
    pub samples: usize,
    pub failures: usize,
    /// Failures where the true class tied for the maximum.
    pub ties: usize,
    pub p_f: f64,
    pub stderr: f64,
    /// Failure rate when ties are broken uniformly at random, the quantity
    /// `1 - ⟨max_j η_j⟩` estimated by population dynamics.
    pub p_f_random_ties: f64,
    pub stderr_random_ties: f64,
}

fn draw_pauli<R: Rng>(ch: &Channel, rng: &mut R) -> Pauli {
    let mut u: f64 = rng.gen();
    for (i, &p) in ch.0.iter().enumerate() {
        if u < p {
            return Pauli::ALL[i];
        }
        u -= p;
    }
    Pauli::ALL[3]
}

/// Outcome of optimal decoding given `η` relative to the applied fault:
/// `(failed, tied)`. Ties with the true class count as failures; values
/// within [`TIE_TOLERANCE`] relative of each other are tied, so the outcome
/// does not depend on contraction order.
pub fn decode_outcome(eta: &[f64; 4]) -> (bool, bool) {
    let best_other = eta[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied = (best_other - eta[0]).abs() <= TIE_TOLERANCE * eta[0].abs().max(best_other.abs());
    (tied || best_other > eta[0], tied)
}

/// Failure probability of a decoder that breaks ties uniformly at random.
pub fn failure_weight(eta: &[f64; 4]) -> f64 {
    let top = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let near = |x: f64| (top - x).abs() <= TIE_TOLERANCE * top.abs();
    if !near(eta[0]) {
        return 1.0;
    }
    1.0 - 1.0 / eta.iter().filter(|&&x| near(x)).count() as f64
}

/// The fault with index `index` under master seed `seed`.
pub fn sample_fault(tree: &Tree, leaf: &Channel, bulk: Option<&Channel>, seed: u64, index: u64) -> Result<FaultSample> {
    let mut rng = par::rng_for(seed, par::stream_id(&[index]));
    let leaves: Vec<Pauli> = (0..tree.num_leaves()).map(|_| draw_pauli(leaf, &mut rng)).collect();
    let links = bulk.map(|ch| (0..tree.num_nodes()).map(|_| draw_pauli(ch, &mut rng)).collect::<Vec<_>>());
    let eta = coset_probs_with_bulk(tree, &leaves, leaf, bulk.zip(links.as_deref()))?;
    Ok(FaultSample { leaves, links, eta })
}

/// Failure frequency over `samples` independent faults.
pub fn sample_and_decode(
    tree: &Tree,
    leaf: &Channel,
    bulk: Option<&Channel>,
    samples: usize,
    seed: u64,
) -> Result<SampleEstimate> {
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let outcomes = par::map_range(samples, |i| {
        sample_fault(tree, leaf, bulk, seed, i as u64).map(|s| (decode_outcome(&s.eta), failure_weight(&s.eta)))
    });
    let mut fails = Vec::with_capacity(samples);
    let mut weights = Vec::with_capacity(samples);
    let mut ties = 0;
    for o in outcomes {
        let ((f, t), w) = o?;
        fails.push(if f { 1.0 } else { 0.0 });
        weights.push(w);
        ties += t as usize;
    }
    let (p_f, stderr) = mean_stderr(&fails);
    let (p_f_random_ties, stderr_random_ties) = mean_stderr(&weights);
    Ok(SampleEstimate {
        samples,
        failures: fails.iter().filter(|&&f| f > 0.0).count(),
        ties,
        p_f,
        stderr,
        p_f_random_ties,
        stderr_random_ties,
    })
}

/// Exact failure probability under leaf noise by summing over all `4^n`
/// leaf patterns.
pub fn exact_failure(tree: &Tree, leaf: &Channel) -> Result<f64> {
    if tree.depth() > EXACT_DEPTH_CAP {
        return Err(Error::DegreeCap { depth: tree.depth(), cap: EXACT_DEPTH_CAP });
    }
    let n = tree.num_leaves();
    let mut total = 0.0;
    let mut errors = vec![Pauli::I; n];
    for code in 0..1usize << (2 * n) {
        let mut prob = 1.0;
        for (l, e) in errors.iter_mut().enumerate() {
            *e = Pauli::ALL[(code >> (2 * l)) & 3];
            prob *= leaf.0[e.index()];
        }
        if prob == 0.0 {
            continue;
        }
        if decode_outcome(&coset_weights(tree, &errors, leaf)?).0 {
            total += prob;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::StabilizerCode;
    use crate::pauli::{bell, cnot, opt152};

    #[test]
    fn noiseless_never_fails() {
        let tree = Tree::uniform(4, opt152(), Pauli::X).unwrap();
        let est = sample_and_decode(&tree, &Channel::noiseless(), None, 200, 1).unwrap();
        assert_eq!((est.failures, est.p_f), (0, 0.0));
    }

    #[test]
    fn ties_count_as_failures() {
        assert_eq!(decode_outcome(&[0.5, 0.5, 0.0, 0.0]), (true, true));
        assert_eq!(decode_outcome(&[0.6, 0.4, 0.0, 0.0]), (false, false));
        assert_eq!(decode_outcome(&[0.2, 0.4, 0.4, 0.0]), (true, false));
        assert_eq!(failure_weight(&[0.4, 0.4, 0.2, 0.0]), 0.5);
        assert_eq!(failure_weight(&[0.25; 4]), 0.75);
        assert_eq!(failure_weight(&[0.6, 0.4, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn faults_are_reproducible_and_on_the_simplex() {
        let tree = Tree::uniform(3, bell(), Pauli::Z).unwrap();
        let ch = Channel::depolarizing(0.2).unwrap();
        let bulk = Channel::depolarizing(0.05).unwrap();
        let a = sample_fault(&tree, &ch, Some(&bulk), 7, 42).unwrap();
        assert_eq!(a, sample_fault(&tree, &ch, Some(&bulk), 7, 42).unwrap());
        assert_eq!(a.links.as_ref().map(Vec::len), Some(tree.num_nodes()));
        assert!((a.eta.iter().sum::<f64>() - 1.0).abs() < 1e-12 && a.eta.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn exhaustive_failure_matches_the_stabilizer_group() {
        let ch = Channel::new(0.07, 0.05, 0.03).unwrap();
        for (gate, stab) in [(bell(), Pauli::Z), (opt152(), Pauli::X), (cnot(), Pauli::Z)] {
            for t in 1..=2 {
                let tree = Tree::uniform(t, gate, stab).unwrap();
                let code = StabilizerCode::from_tree(&tree).unwrap();
                let n = tree.num_leaves();
                let mut expected = 0.0;
                for c in 0..1usize << (2 * n) {
                    let errors: Vec<Pauli> = (0..n).map(|l| Pauli::ALL[(c >> (2 * l)) & 3]).collect();
                    let prob: f64 = errors.iter().map(|e| ch.0[e.index()]).product();
                    if decode_outcome(&code.coset_weights(&errors, &ch).unwrap()).0 {
                        expected += prob;
                    }
                }
                let got = exact_failure(&tree, &ch).unwrap();
                assert!((got - expected).abs() < 1e-12, "t={t}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn sampling_converges_to_the_exact_value() {
        let tree = Tree::uniform(3, opt152(), Pauli::X).unwrap();
        let ch = Channel::depolarizing(0.12).unwrap();
        let exact = exact_failure(&tree, &ch).unwrap();
        let est = sample_and_decode(&tree, &ch, None, 40_000, 3).unwrap();
        assert!((est.p_f - exact).abs() < 4.0 * est.stderr, "{est:?} vs {exact}");
    }
}
