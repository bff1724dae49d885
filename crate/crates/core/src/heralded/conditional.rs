//! Distribution of the conditional `X` distance of the CNOT-NOTC tree under
//! heralded bit flips, and the matching Monte Carlo over erasure patterns.
//!
//! One step adds a delocalizing layer (distance is the minimum over the two
//! children) followed by a copying layer (distances add); each new link is
//! heralded with probability `q`, which sends the distance to zero.

use serde::Serialize;

use crate::distance::tropical_tree_distance;
use crate::error::{Error, Result};
use crate::par;
use crate::pauli::{cnot, notc, Pauli};
use crate::tree::Tree;
use rand::Rng;

/// Default truncation of the distance axis.
pub const DEFAULT_D_MAX: usize = 4096;

/// Mass conservation tolerance.
const MASS_TOL: f64 = 1e-9;

/// `x_d` for `d = 0..=d_max`, plus the mass above `d_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceDistribution {
    pub probs: Vec<f64>,
    pub overflow: f64,
}

impl DistanceDistribution {
    /// A single physical qubit, heralded with probability `p`.
    pub fn initial(p: f64, d_max: usize) -> Result<DistanceDistribution> {
        if d_max < 1 {
            return Err(Error::InvalidInput("d_max must be at least 1".into()));
        }
        let mut probs = vec![0.0; d_max + 1];
        probs[0] = p;
        probs[1] = 1.0 - p;
        Ok(DistanceDistribution { probs, overflow: 0.0 })
    }

    pub fn d_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn mass(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.overflow
    }

    /// Mean distance conditioned on survival (`d > 0`), ignoring overflow.
    pub fn mean_given_survival(&self) -> f64 {
        let alive: f64 = self.probs[1..].iter().sum();
        self.probs.iter().enumerate().map(|(d, x)| d as f64 * x).sum::<f64>() / alive
    }

    /// Unconditioned mean distance, ignoring overflow.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(d, x)| d as f64 * x).sum()
    }

    fn support(&self) -> usize {
        self.probs.iter().rposition(|&x| x > 0.0).unwrap_or(0)
    }

    /// Advance by one step at bulk rate `q`.
    ///
    /// The outgoing overflow is the complement of the kept mass: computing it
    /// from the incoming total instead doubles any rounding error every step.
    pub fn step(&self, q: f64) -> Result<DistanceDistribution> {
        let leak = (self.mass() - 1.0).abs();
        if leak > MASS_TOL {
            return Err(Error::MassLeak(leak));
        }
        let n = self.probs.len();
        let hi = self.support();
        // Minimum of two independent draws, then heralding:
        // P(min = d) = x_d (S_d + S_{d+1}) with S_d = P(D >= d). The survival
        // sums are accumulated from the top so every term is non-negative and
        // small tails keep their relative accuracy. Dividing by the incoming
        // mass stops rounding in the total from compounding across steps.
        let inv = 1.0 / self.mass();
        let mut tilde = vec![0.0; n];
        let mut above = self.overflow * inv;
        for d in (0..=hi).rev() {
            let x = self.probs[d] * inv;
            tilde[d] = (1.0 - q) * x * (x + 2.0 * above);
            above += x;
        }
        tilde[0] += q;
        // Sum of two independent draws, then heralding.
        let mut probs = vec![0.0; n];
        for i in 0..=hi {
            let ti = tilde[i];
            if ti == 0.0 {
                continue;
            }
            let top = (n - 1 - i).min(hi);
            for (j, &tj) in tilde[..=top].iter().enumerate() {
                probs[i + j] += ti * tj;
            }
        }
        let kept: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p *= 1.0 - q;
        }
        probs[0] += q;
        let overflow = ((1.0 - q) * (1.0 - kept)).max(0.0);
        Ok(DistanceDistribution { probs, overflow })
    }
}

/// `x_d(τ)` for `τ = 0..=tau_max`.
pub fn conditional_trace(p: f64, q: f64, tau_max: usize, d_max: usize) -> Result<Vec<DistanceDistribution>> {
    let mut out = vec![DistanceDistribution::initial(p, d_max)?];
    for _ in 0..tau_max {
        let next = out.last().expect("non-empty").step(q)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionalStats {
    pub tau: usize,
    /// Mean distance given survival.
    pub d: f64,
    /// Unconditioned mean distance.
    pub d_prime: f64,
    /// Largest `d` whose `x_d` peaked at or before `τ`; zero if none.
    pub d_peak: usize,
    pub overflow: f64,
}

pub fn conditional_stats(trace: &[DistanceDistribution]) -> Vec<ConditionalStats> {
    let last = trace.len().saturating_sub(1);
    let d_max = trace.first().map(|t| t.d_max()).unwrap_or(0);
    // argmax over τ of x_d; only peaks strictly before the end of the trace count.
    let peak_time: Vec<Option<usize>> = (0..=d_max)
        .map(|d| {
            let (tau, v) = trace.iter().enumerate().map(|(t, x)| (t, x.probs[d])).fold((0, 0.0), |acc, (t, v)| {
                if v > acc.1 {
                    (t, v)
                } else {
                    acc
                }
            });
            (v > 0.0 && tau < last).then_some(tau)
        })
        .collect();
    trace
        .iter()
        .enumerate()
        .map(|(tau, x)| ConditionalStats {
            tau,
            d: x.mean_given_survival(),
            d_prime: x.mean(),
            d_peak: (0..=d_max).rev().find(|&d| peak_time[d].is_some_and(|t| t <= tau)).unwrap_or(0),
            overflow: x.overflow,
        })
        .collect()
}

/// Asymptotic growth rate `c` in `d ∝ e^{cτ}`: slope of `ln d` over the last
/// `window` steps before overflow exceeds `1e-12` or `d` passes `d_max / 8`.
pub fn growth_rate(stats: &[ConditionalStats], d_max: usize, window: usize) -> Result<f64> {
    let end = stats.iter().position(|s| s.overflow > 1e-12 || s.d > d_max as f64 / 8.0).unwrap_or(stats.len());
    if end < window + 1 {
        return Err(Error::FitFailed(format!("only {end} usable steps for a window of {window}")));
    }
    let (t, y): (Vec<f64>, Vec<f64>) = stats[end - window..end].iter().map(|s| (s.tau as f64, s.d.ln())).unzip();
    Ok(crate::numeric::linear_fit(&t, &y)?.slope)
}

/// The CNOT-NOTC tree of depth `2τ`: copying layers at even depth from the
/// root, delocalizing layers at odd depth.
pub fn css_tree(tau: usize) -> Result<Tree> {
    Tree::from_fn(2 * tau, |l, _| if l % 2 == 0 { (cnot(), Pauli::Z) } else { (notc(), Pauli::X) })
}

fn sample_pattern<R: Rng>(tree: &Tree, p: f64, q: f64, rng: &mut R) -> (Vec<bool>, Vec<bool>) {
    let leaves = (0..tree.num_leaves()).map(|_| rng.gen::<f64>() < p).collect();
    let links = (0..tree.num_nodes()).map(|_| rng.gen::<f64>() < q).collect();
    (leaves, links)
}

/// Histogram of `d_X` over random heralding patterns of the depth-`2τ` tree.
pub fn sample_conditional_distance(tau: usize, p: f64, q: f64, samples: usize, seed: u64) -> Result<Vec<u64>> {
    let tree = css_tree(tau)?;
    let ds: Vec<Result<usize>> = par::map_range(samples, |s| {
        let mut rng = par::rng_for(seed, par::stream_id(&[tau as u64, s as u64]));
        let (leaves, links) = sample_pattern(&tree, p, q, &mut rng);
        Ok(tropical_tree_distance(&tree, &leaves, &links)?[1] as usize)
    });
    let mut hist = vec![0u64; (1 << tau) + 1];
    for d in ds {
        hist[d?] += 1;
    }
    Ok(hist)
}

/// Pairs `(d at depth 2(τ-1), d at depth 2τ)` from the same pattern, with
/// surface rate equal to the bulk rate `q`.
pub fn sample_distance_pairs(tau: usize, q: f64, samples: usize, seed: u64) -> Result<Vec<(u64, u64)>> {
    if tau == 0 {
        return Err(Error::InvalidInput("τ must be at least 1".into()));
    }
    let full = css_tree(tau)?;
    let top = css_tree(tau - 1)?;
    let cut = 2 * (tau - 1);
    par::map_range(samples, |s| {
        let mut rng = par::rng_for(seed, par::stream_id(&[0xB1A5, tau as u64, s as u64]));
        let (leaves, links) = sample_pattern(&full, q, q, &mut rng);
        let d_now = tropical_tree_distance(&full, &leaves, &links)?[1];
        let top_leaves: Vec<bool> = if cut == 0 {
            vec![links[0]]
        } else {
            (0..top.num_leaves()).map(|i| links[Tree::node_index(cut, i)]).collect()
        };
        let d_prev = if cut == 0 {
            u64::from(!top_leaves[0])
        } else {
            tropical_tree_distance(&top, &top_leaves, &links[..top.num_nodes()])?[1]
        };
        Ok((d_prev, d_now))
    })
    .into_iter()
    .collect()
}

/// `δ(d*) = E[d(2τ) | d(2(τ-1)) = d*] - d*` for every `d*` seen at least `min_count` times.
pub fn bias(pairs: &[(u64, u64)], min_count: usize) -> Vec<(u64, f64, usize)> {
    let mut acc: std::collections::BTreeMap<u64, (f64, usize)> = Default::default();
    for &(a, b) in pairs {
        let e = acc.entry(a).or_default();
        e.0 += b as f64;
        e.1 += 1;
    }
    acc.into_iter().filter(|(_, (_, n))| *n >= min_count).map(|(d, (s, n))| (d, s / n as f64 - d as f64, n)).collect()
}
