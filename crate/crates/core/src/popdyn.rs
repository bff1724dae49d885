//! Population dynamics for the distribution of logical-class probabilities
//! `η` of a tree code under Pauli noise on the leaves and links.
//!
//! Population `S_i` samples the distribution conditioned on logical class `i`.
//! One generation applies a block of layers: each node picks an `R̃` entry
//! `(k, a, b)` with weight `g_{k ⊕ i}` from its link noise, its children recurse
//! into the block below (the previous generation at the bottom), and the
//! normalized block output is stored. Classes are indexed by Pauli code, so
//! `⊕` is XOR for both the four-class and the two-class (CSS) case.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{geometric_fit, mean_stderr};
use crate::par;
use crate::tree::RTilde;

/// Elements drawn per RNG stream in a synchronous step; fixed so that results
/// do not depend on the thread count.
const CHUNK: usize = 4096;

/// Consecutive failed draws tolerated for one element before giving up.
const MAX_REDRAWS: u64 = 10_000;

/// Default bound on population memory across all runs of an experiment.
pub const DEFAULT_MEMORY_BUDGET: usize = 4 << 30;

/// A node's `R̃` as `(class, left, right)` entries over `C` logical classes.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTable<const C: usize> {
    entries: Vec<(u8, u8, u8)>,
}

impl NodeTable<4> {
    pub fn from_rtilde(rt: &RTilde) -> NodeTable<4> {
        NodeTable { entries: rt.entries().map(|(k, a, b)| (k as u8, a, b)).collect() }
    }
}

impl NodeTable<2> {
    /// CSS node in one basis where both children carry the parent's class.
    pub fn copy() -> NodeTable<2> {
        NodeTable { entries: vec![(0, 0, 0), (1, 1, 1)] }
    }

    /// CSS node in one basis where the parent's class is the children's parity.
    pub fn delocalize() -> NodeTable<2> {
        NodeTable { entries: vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)] }
    }
}

impl<const C: usize> NodeTable<C> {
    #[inline]
    fn combine(&self, v: &[f64; C], w: &[f64; C]) -> [f64; C] {
        let mut u = [0.0; C];
        for &(k, a, b) in &self.entries {
            u[k as usize] += v[a as usize] * w[b as usize];
        }
        u
    }
}

/// Noise at a site: a mixture of Pauli channels `g`, one component drawn per
/// site. One component is ordinary unheralded noise; heralding mixes the
/// noiseless channel with the fully mixing one, and the component is recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteNoise<const C: usize> {
    components: Vec<(f64, [f64; C])>,
}

impl<const C: usize> SiteNoise<C> {
    pub fn new(components: Vec<(f64, [f64; C])>) -> Result<SiteNoise<C>> {
        let bad = |v: f64| !(0.0..=1.0).contains(&v) || v.is_nan();
        let total: f64 = components.iter().map(|c| c.0).sum();
        if components.is_empty() || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("mixture weights sum to {total}")));
        }
        for (w, g) in &components {
            if bad(*w) || g.iter().any(|&v| bad(v)) || (g.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!("invalid channel {g:?} with weight {w}")));
            }
        }
        Ok(SiteNoise { components })
    }

    pub fn pauli(g: [f64; C]) -> Result<SiteNoise<C>> {
        SiteNoise::new(vec![(1.0, g)])
    }

    pub fn noiseless() -> SiteNoise<C> {
        let mut g = [0.0; C];
        g[0] = 1.0;
        SiteNoise { components: vec![(1.0, g)] }
    }

    /// Erasure with probability `p`: the site's Pauli becomes uniformly random
    /// and the decoder knows it.
    pub fn heralded(p: f64) -> Result<SiteNoise<C>> {
        let mut clean = [0.0; C];
        clean[0] = 1.0;
        SiteNoise::new(vec![(1.0 - p, clean), (p, [1.0 / C as f64; C])])
    }

    #[inline]
    fn pick<R: Rng>(&self, rng: &mut R) -> usize {
        if self.components.len() == 1 {
            return 0;
        }
        let mut u: f64 = rng.gen();
        for (c, (w, _)) in self.components.iter().enumerate() {
            if u < *w {
                return c;
            }
            u -= w;
        }
        self.components.len() - 1
    }
}

impl SiteNoise<4> {
    pub fn depolarizing(p: f64) -> Result<SiteNoise<4>> {
        SiteNoise::pauli([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
    }
}

impl SiteNoise<2> {
    /// Independent flips at rate `p` in one CSS basis.
    pub fn flip(p: f64) -> Result<SiteNoise<2>> {
        SiteNoise::pauli([1.0 - p, p])
    }
}

/// A tree with identical blocks of layers.
#[derive(Clone, Debug)]
pub struct Model<const C: usize> {
    /// Layers of one generation, bottom first.
    pub block: Vec<NodeTable<C>>,
    pub surface: SiteNoise<C>,
    pub bulk: SiteNoise<C>,
}

impl Model<4> {
    /// Identical nodes, one layer per generation.
    pub fn general(rt: &RTilde, surface: SiteNoise<4>, bulk: SiteNoise<4>) -> Model<4> {
        Model { block: vec![NodeTable::from_rtilde(rt)], surface, bulk }
    }
}

/// CSS basis of the CNOT-NOTC Bell tree.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Logical `X` errors, decided by bit flips; the root layer copies.
    X,
    /// Logical `Z` errors, decided by phase flips; the root layer delocalizes.
    Z,
}

impl Model<2> {
    /// Two layers of the Bell tree per generation, in one basis.
    pub fn bell_css(basis: Basis, surface: SiteNoise<2>, bulk: SiteNoise<2>) -> Model<2> {
        let block = match basis {
            Basis::X => vec![NodeTable::delocalize(), NodeTable::copy()],
            Basis::Z => vec![NodeTable::copy(), NodeTable::delocalize()],
        };
        Model { block, surface, bulk }
    }
}

/// `C` populations of probability vectors, one per conditioned logical class.
#[derive(Clone, Debug, PartialEq)]
pub struct Population<const C: usize> {
    pub sets: Vec<Vec<[f64; C]>>,
    pub t: usize,
}

impl<const C: usize> Population<C> {
    pub fn size(&self) -> usize {
        self.sets[0].len()
    }

    /// `1 - ⟨max_j η_j⟩` over all populations.
    pub fn failure_probability(&self) -> f64 {
        let n = (C * self.size()) as f64;
        let s: f64 = self.sets.iter().flatten().map(|e| e.iter().copied().fold(0.0, f64::max)).sum();
        1.0 - s / n
    }

    /// `(C max_j η_j - 1) / (C - 1)` for every element: `|m|` in the two-class case.
    pub fn decodability(&self) -> impl Iterator<Item = f64> + '_ {
        self.sets.iter().flatten().map(|e| {
            let top = e.iter().copied().fold(0.0, f64::max);
            (C as f64 * top - 1.0) / (C as f64 - 1.0)
        })
    }
}

/// Prepared sampler: cumulative entry weights per layer, mixture component and class.
#[derive(Clone, Debug)]
pub struct Dynamics<const C: usize> {
    model: Model<C>,
    cum: Vec<Vec<[Vec<f64>; C]>>,
}

#[inline]
fn pick_cumulative<R: Rng>(cum: &[f64], rng: &mut R) -> usize {
    let u = rng.gen::<f64>() * cum[cum.len() - 1];
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

impl<const C: usize> Dynamics<C> {
    pub fn new(model: Model<C>) -> Result<Dynamics<C>> {
        if model.block.is_empty() {
            return Err(Error::InvalidInput("empty layer block".into()));
        }
        let cum = model
            .block
            .iter()
            .map(|node| {
                model
                    .bulk
                    .components
                    .iter()
                    .map(|(_, g)| {
                        std::array::from_fn(|i| {
                            let mut acc = 0.0;
                            node.entries
                                .iter()
                                .map(|&(k, _, _)| {
                                    acc += g[k as usize ^ i];
                                    acc
                                })
                                .collect()
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Dynamics { model, cum })
    }

    pub fn model(&self) -> &Model<C> {
        &self.model
    }

    /// Layers spanned by one generation.
    pub fn layers(&self) -> usize {
        self.model.block.len()
    }

    /// Leaf populations: class `i` draws `α` with probability `g_{α ⊕ i}` and
    /// stores `η_j = g_{α ⊕ j}`.
    pub fn init<R: Rng>(&self, m: usize, rng: &mut R) -> Population<C> {
        let noise = &self.model.surface;
        let sets = (0..C)
            .map(|i| {
                (0..m)
                    .map(|_| {
                        let g = &noise.components[noise.pick(rng)].1;
                        let mut cum = [0.0; C];
                        let mut acc = 0.0;
                        for (a, c) in cum.iter_mut().enumerate() {
                            acc += g[a ^ i];
                            *c = acc;
                        }
                        let alpha = pick_cumulative(&cum, rng);
                        std::array::from_fn(|j| g[alpha ^ j])
                    })
                    .collect()
            })
            .collect();
        Population { sets, t: 0 }
    }

    /// One element of class `class` from a block of `level` layers over `prev`.
    /// `Ok(None)` flags a zero normalization, which is redrawn by the caller.
    fn draw<R: Rng>(
        &self,
        level: usize,
        class: usize,
        prev: &[Vec<[f64; C]>],
        rng: &mut R,
    ) -> Result<Option<[f64; C]>> {
        if level == 0 {
            let s = &prev[class];
            return Ok(Some(s[rng.gen_range(0..s.len())]));
        }
        let node = &self.model.block[level - 1];
        let c = self.model.bulk.pick(rng);
        let (_, a, b) = node.entries[pick_cumulative(&self.cum[level - 1][c][class], rng)];
        let Some(v) = self.draw(level - 1, a as usize, prev, rng)? else { return Ok(None) };
        let Some(w) = self.draw(level - 1, b as usize, prev, rng)? else { return Ok(None) };
        let u = node.combine(&v, &w);
        let g = &self.model.bulk.components[c].1;
        let mut out = [0.0; C];
        for (j, o) in out.iter_mut().enumerate() {
            for (k, uk) in u.iter().enumerate() {
                *o += uk * g[k ^ j];
            }
        }
        let z: f64 = out.iter().sum();
        if z == 0.0 {
            return Ok(None);
        }
        if !z.is_finite() || out.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidInput(format!("left the simplex: {out:?} from {v:?} and {w:?}")));
        }
        Ok(Some(out.map(|x| x / z)))
    }

    fn draw_element<R: Rng>(
        &self,
        class: usize,
        prev: &[Vec<[f64; C]>],
        rng: &mut R,
        redraws: &mut u64,
    ) -> Result<[f64; C]> {
        let mut tries = 0;
        loop {
            if let Some(e) = self.draw(self.layers(), class, prev, rng)? {
                return Ok(e);
            }
            *redraws += 1;
            tries += 1;
            if tries > MAX_REDRAWS {
                return Err(Error::ZeroNorm);
            }
        }
    }

    /// Synchronous generation: every new element reads only `pop`. Returns the
    /// new population and the number of zero-normalization redraws.
    pub fn step(&self, pop: &Population<C>, seed: u64, run: u64) -> Result<(Population<C>, u64)> {
        let m = pop.size();
        let chunks = m.div_ceil(CHUNK);
        let mut sets = Vec::with_capacity(C);
        let mut redraws = 0;
        for class in 0..C {
            let parts: Vec<Result<(Vec<[f64; C]>, u64)>> = par::map_range(chunks, |ch| {
                let mut rng = par::rng_for(seed, par::stream_id(&[run, pop.t as u64, class as u64, ch as u64]));
                let len = CHUNK.min(m - ch * CHUNK);
                let mut r = 0;
                let out =
                    (0..len).map(|_| self.draw_element(class, &pop.sets, &mut rng, &mut r)).collect::<Result<_>>()?;
                Ok((out, r))
            });
            let mut set = Vec::with_capacity(m);
            for part in parts {
                let (v, r) = part?;
                set.extend(v);
                redraws += r;
            }
            sets.push(set);
        }
        Ok((Population { sets, t: pop.t + 1 }, redraws))
    }

    /// Continuous-time generation: `C·M` single replacements, each reading the
    /// current populations.
    pub fn step_continuous<R: Rng>(&self, pop: &mut Population<C>, rng: &mut R) -> Result<u64> {
        let m = pop.size();
        let mut redraws = 0;
        for r in 0..C * m {
            let class = r % C;
            let e = self.draw_element(class, &pop.sets, rng, &mut redraws)?;
            let slot = rng.gen_range(0..m);
            pop.sets[class][slot] = e;
        }
        pop.t += 1;
        Ok(redraws)
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Timing {
    #[default]
    Synchronous,
    Continuous,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rescale {
    /// Raw decodability `|m|`.
    #[default]
    None,
    /// `(m_max - |m|) / z`.
    Z,
    /// `(m_max - |m|) / z²`.
    Z2,
}

/// Fixed-width histogram on `[lo, hi)`, with out-of-range counts kept.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, width: f64) -> Result<Histogram> {
        if !(width > 0.0) || !(hi > lo) {
            return Err(Error::InvalidInput(format!("histogram range [{lo}, {hi}) with width {width}")));
        }
        let bins = ((hi - lo) / width).round() as usize;
        Ok(Histogram { lo, width, counts: vec![0; bins.max(1)], below: 0, above: 0 })
    }

    pub fn add(&mut self, x: f64) {
        let k = ((x - self.lo) / self.width).floor();
        if k < 0.0 {
            self.below += 1;
        } else if k as usize >= self.counts.len() {
            self.above += 1;
        } else {
            self.counts[k as usize] += 1;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.below += other.below;
        self.above += other.above;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.below + self.above
    }

    pub fn bin_left(&self, k: usize) -> f64 {
        self.lo + k as f64 * self.width
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        self.bin_left(k) + 0.5 * self.width
    }

    /// Fraction of all counts falling in `[a, b)`, by bin centers.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let inside: u64 =
            (0..self.counts.len()).filter(|&k| (a..b).contains(&self.bin_center(k))).map(|k| self.counts[k]).sum();
        inside as f64 / self.total().max(1) as f64
    }

    /// Bins that are strict local maxima holding at least `min_fraction` of all counts.
    pub fn peaks(&self, min_fraction: f64) -> Vec<(f64, f64)> {
        let total = self.total().max(1) as f64;
        let c = &self.counts;
        (0..c.len())
            .filter(|&k| {
                let left = if k == 0 { 0 } else { c[k - 1] };
                let right = c.get(k + 1).copied().unwrap_or(0);
                c[k] > left && c[k] >= right && c[k] as f64 / total >= min_fraction
            })
            .map(|k| (self.bin_center(k), c[k] as f64 / total))
            .collect()
    }
}

/// What to histogram and when.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub rescale: Rescale,
    /// Boltzmann factor `q / (1 - q)` used by the rescaled variants.
    pub z: f64,
    /// Largest magnetization, subtracted by the rescaled variants.
    pub m_max: f64,
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
    /// Generations whose populations are pooled.
    pub generations: Vec<usize>,
}

impl HistogramSpec {
    fn value(&self, m: f64) -> f64 {
        match self.rescale {
            Rescale::None => m,
            Rescale::Z => (self.m_max - m) / self.z,
            Rescale::Z2 => (self.m_max - m) / (self.z * self.z),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub m: usize,
    pub t_max: usize,
    pub runs: usize,
    pub seed: u64,
    pub timing: Timing,
    pub histogram: Option<HistogramSpec>,
    pub memory_budget: usize,
}

impl RunOptions {
    pub fn new(m: usize, t_max: usize, runs: usize, seed: u64) -> RunOptions {
        RunOptions {
            m,
            t_max,
            runs,
            seed,
            timing: Timing::Synchronous,
            histogram: None,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: usize,
    pub mean: f64,
    pub stderr: f64,
    pub redraws: u64,
}

/// At least [`PLATEAU_MIN`] consecutive generations whose step-to-step change
/// stays below the standard error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plateau {
    pub start: usize,
    pub end: usize,
    pub level: f64,
}

pub const PLATEAU_MIN: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    /// Failure probability per generation, mean and standard error across runs.
    pub series: Vec<SeriesRow>,
    /// `runs[r][t]`: failure probability of run `r`.
    pub runs: Vec<Vec<f64>>,
    pub plateaus: Vec<Plateau>,
    pub histogram: Option<Histogram>,
}

struct RunOutput {
    p_f: Vec<f64>,
    redraws: Vec<u64>,
    histogram: Option<Histogram>,
}

fn run_once<const C: usize>(dyn_: &Dynamics<C>, opts: &RunOptions, run: u64) -> Result<RunOutput> {
    let mut rng = par::rng_for(opts.seed, par::stream_id(&[run, u64::MAX]));
    let mut pop = dyn_.init(opts.m, &mut rng);
    let mut hist = match &opts.histogram {
        Some(h) => Some(Histogram::new(h.lo, h.hi, h.width)?),
        None => None,
    };
    let mut p_f = vec![pop.failure_probability()];
    let mut redraws = vec![0];
    let record = |pop: &Population<C>, hist: &mut Option<Histogram>| {
        if let (Some(spec), Some(h)) = (&opts.histogram, hist.as_mut()) {
            if spec.generations.contains(&pop.t) {
                pop.decodability().for_each(|m| h.add(spec.value(m)));
            }
        }
    };
    record(&pop, &mut hist);
    for _ in 0..opts.t_max {
        let r = match opts.timing {
            Timing::Synchronous => {
                let (next, r) = dyn_.step(&pop, opts.seed, run)?;
                pop = next;
                r
            }
            Timing::Continuous => dyn_.step_continuous(&mut pop, &mut rng)?,
        };
        record(&pop, &mut hist);
        p_f.push(pop.failure_probability());
        redraws.push(r);
    }
    Ok(RunOutput { p_f, redraws, histogram: hist })
}

/// Maximal stretches of at least [`PLATEAU_MIN`] generations over which the
/// mean moves by less than the larger adjacent standard error at each step.
pub fn find_plateaus(series: &[SeriesRow]) -> Vec<Plateau> {
    let mut out = Vec::new();
    let mut start = 0;
    for t in 1..=series.len() {
        let flat = t < series.len() && {
            let (a, b) = (&series[t - 1], &series[t]);
            (b.mean - a.mean).abs() < a.stderr.max(b.stderr)
        };
        if !flat {
            if t - start >= PLATEAU_MIN {
                let level = series[start..t].iter().map(|r| r.mean).sum::<f64>() / (t - start) as f64;
                out.push(Plateau { start: series[start].t, end: series[t - 1].t, level });
            }
            start = t;
        }
    }
    out
}

/// `N` independent runs; mean and standard error are taken across run averages.
pub fn run_experiment<const C: usize>(model: Model<C>, opts: &RunOptions) -> Result<ExperimentResult> {
    if opts.m == 0 || opts.runs == 0 {
        return Err(Error::InvalidInput("population size and run count must be positive".into()));
    }
    let bytes = opts.runs.saturating_mul(2 * C * opts.m).saturating_mul(std::mem::size_of::<[f64; C]>());
    if bytes > opts.memory_budget {
        return Err(Error::ResourceGuard(format!(
            "{} runs of M = {} need about {} MiB, budget is {} MiB",
            opts.runs,
            opts.m,
            bytes >> 20,
            opts.memory_budget >> 20
        )));
    }
    let dyn_ = Dynamics::new(model)?;
    let outs: Vec<RunOutput> =
        par::map_range(opts.runs, |r| run_once(&dyn_, opts, r as u64)).into_iter().collect::<Result<_>>()?;
    let series: Vec<SeriesRow> = (0..=opts.t_max)
        .map(|t| {
            let xs: Vec<f64> = outs.iter().map(|o| o.p_f[t]).collect();
            let (mean, stderr) = mean_stderr(&xs);
            SeriesRow { t, mean, stderr, redraws: outs.iter().map(|o| o.redraws[t]).sum() }
        })
        .collect();
    let histogram = outs.iter().filter_map(|o| o.histogram.clone()).reduce(|mut a, b| {
        a.merge(&b);
        a
    });
    Ok(ExperimentResult {
        plateaus: find_plateaus(&series),
        runs: outs.into_iter().map(|o| o.p_f).collect(),
        series,
        histogram,
    })
}

/// Fit of `P(τ) = P_s + c λ^τ` to one coding-phase series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaFit {
    pub lambda: f64,
    pub p_s: f64,
    pub c: f64,
    /// Generations used, inclusive.
    pub window: (usize, usize),
    /// Set when the approach is faster than geometric (successive decay
    /// ratios toward the tail level shrink by more than half across the window) or the window is
    /// too short to constrain three parameters.
    pub out_of_model: bool,
}

/// Generations averaged to estimate the limiting value.
const FIT_TAIL: usize = 5;

/// Fit protocol: the limit is estimated by the mean of the last
/// [`FIT_TAIL`] generations; the window runs from generation 1 to five
/// generations past the last one whose distance from that limit exceeds
/// three standard errors.
pub fn fit_lambda(series: &[SeriesRow]) -> Result<LambdaFit> {
    let n = series.len();
    if n < 2 * FIT_TAIL {
        return Err(Error::FitFailed(format!("series of {n} generations is too short")));
    }
    let tail = &series[n - FIT_TAIL..];
    let limit = tail.iter().map(|r| r.mean).sum::<f64>() / FIT_TAIL as f64;
    let noise = tail.iter().map(|r| r.stderr).fold(0.0, f64::max);
    let last_signal = series
        .iter()
        .rposition(|r| (r.mean - limit).abs() > 3.0 * r.stderr.max(noise))
        .ok_or_else(|| Error::FitFailed("no decay above noise".into()))?;
    let (lo, hi) = (1, (last_signal + FIT_TAIL).min(n - 1));
    let win = &series[lo..=hi];
    let x: Vec<f64> = win.iter().map(|r| r.t as f64).collect();
    let y: Vec<f64> = win.iter().map(|r| r.mean).collect();
    let (p_s, c, lambda) = geometric_fit(&x, &y)?;
    let ratios: Vec<f64> = series[lo..=last_signal.max(lo)]
        .windows(2)
        .map(|w| (w[1].mean - limit) / (w[0].mean - limit))
        .filter(|r| r.is_finite() && *r > 0.0)
        .collect();
    let faster = match (ratios.first(), ratios.last()) {
        (Some(a), Some(b)) if ratios.len() >= 2 => *b < 0.5 * a,
        _ => false,
    };
    let out_of_model = faster || last_signal < lo + 3;
    Ok(LambdaFit { lambda, p_s, c, window: (series[lo].t, series[hi].t), out_of_model })
}

/// Mean and standard error of `λ` over the in-model fits; at least three needed.
pub fn fit_lambda_s(fits: &[LambdaFit]) -> Result<(f64, f64)> {
    let ls: Vec<f64> = fits.iter().filter(|f| !f.out_of_model).map(|f| f.lambda).collect();
    if ls.len() < 3 {
        return Err(Error::FitFailed(format!("{} in-model fits, need 3", ls.len())));
    }
    Ok(mean_stderr(&ls))
}
