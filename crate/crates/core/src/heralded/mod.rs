//! Flows of the distribution over lost-logical classes under heralded noise.
//!
//! A subtree's logical information is in one of five classes: nothing lost
//! (`n`), only the `X`, `Z` or `Y` logical lost (`x`, `z`, `y`), or all lost
//! (`a`). The class distribution is `π = (n, x, z, y, a)`; flows act on the
//! reduced coordinates `π̃ = (n, x, z, a)` with `y` implied by normalization.

pub mod balanced;
pub mod bell;
pub mod conditional;
pub mod ferro;
mod fixed_points;

use num_complex::Complex64;
use serde::Serialize;

pub use fixed_points::{find_fixed_points, newton, simplex_seeds, FixedPointReport, Stability};

use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::tree::RTilde;

/// Class index order in full `π`.
pub const N: usize = 0;
pub const X: usize = 1;
pub const Z: usize = 2;
pub const Y: usize = 3;
pub const A: usize = 4;

/// Sets of undetectable logicals, as bitmasks over Pauli codes.
pub const CLASS_SETS: [u8; 5] = [0b0001, 0b0011, 0b0101, 0b1001, 0b1111];

/// Full indices of the reduced coordinates.
const REDUCED: [usize; 4] = [N, X, Z, A];

fn class_of_set(mask: u8) -> Option<usize> {
    CLASS_SETS.iter().position(|&m| m == mask)
}

/// Smallest subgroup of the Klein group containing `mask`.
fn closure(mut mask: u8) -> u8 {
    loop {
        let mut next = mask;
        for a in 0..4 {
            for b in 0..4 {
                if mask & (1 << a) != 0 && mask & (1 << b) != 0 {
                    next |= 1 << (a ^ b);
                }
            }
        }
        if next == mask {
            return mask;
        }
        mask = next;
    }
}

/// `s(j, k)`: class of `{i : ∃ α ∈ ᾱ_j, β ∈ ᾱ_k with (α, β) in class i}`.
pub fn pullback(rt: &RTilde) -> Result<[[usize; 5]; 5]> {
    let mut out = [[0; 5]; 5];
    for j in 0..5 {
        for k in 0..5 {
            let mut mask = 0u8;
            for (i, a, b) in rt.entries() {
                if CLASS_SETS[j] & (1 << a) != 0 && CLASS_SETS[k] & (1 << b) != 0 {
                    mask |= 1 << i;
                }
            }
            out[j][k] = class_of_set(mask)
                .ok_or_else(|| Error::InvalidInput(format!("pull-back set {mask:04b} is not a class")))?;
        }
    }
    Ok(out)
}

/// Heralded channel on one location: `(n, x, z, y, a)` probabilities.
pub fn heralded_channel(px: f64, pz: f64, py: f64, pa: f64) -> Result<[f64; 5]> {
    let p = [1.0 - px - pz - py - pa, px, pz, py, pa];
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidInput(format!("invalid heralded rates ({px}, {pz}, {py}, {pa})")));
    }
    Ok(p)
}

/// Independent heralded bit and phase flips, each at rate `q`.
pub fn bit_phase_channel(q: f64) -> [f64; 5] {
    [(1.0 - q) * (1.0 - q), q * (1.0 - q), q * (1.0 - q), 0.0, q * q]
}

/// Compose a class distribution with a heralded link channel `rho`.
pub fn bulk_insert(pi: &[f64; 5], rho: &[f64; 5]) -> [f64; 5] {
    let mut out = [0.0; 5];
    for j in 0..5 {
        for k in 0..5 {
            let c = class_of_set(closure(CLASS_SETS[j] | CLASS_SETS[k])).expect("subgroups close to a class");
            out[c] += pi[j] * rho[k];
        }
    }
    out
}

/// `P_F = (x + y + z)/2 + 3a/4`.
pub fn failure_probability(pi: &[f64; 5]) -> f64 {
    (pi[X] + pi[Y] + pi[Z]) / 2.0 + 0.75 * pi[A]
}

/// Lost information `I = x + y + z + 2a`.
pub fn lost_information(pi: &[f64; 5]) -> f64 {
    pi[X] + pi[Y] + pi[Z] + 2.0 * pi[A]
}

pub fn to_full(r: &[f64]) -> [f64; 5] {
    [r[0], r[1], r[2], 1.0 - r.iter().sum::<f64>(), r[3]]
}

pub fn to_reduced(p: &[f64; 5]) -> Vec<f64> {
    REDUCED.iter().map(|&i| p[i]).collect()
}

/// A flow on reduced coordinates.
pub trait Flow: Sync {
    fn dim(&self) -> usize;
    fn step(&self, x: &[f64]) -> Vec<f64>;
    /// Tree layers per step; correlation lengths use base `2^layers`.
    fn layers(&self) -> usize {
        1
    }
    fn jacobian(&self, x: &[f64]) -> Matrix {
        fd_jacobian(self, x, 1e-6)
    }
    fn name(&self) -> String;
}

/// Central finite-difference Jacobian.
pub fn fd_jacobian<F: Flow + ?Sized>(flow: &F, x: &[f64], h: f64) -> Matrix {
    let n = flow.dim();
    let mut j = vec![vec![0.0; n]; n];
    for m in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[m] += h;
        xm[m] -= h;
        let (fp, fm) = (flow.step(&xp), flow.step(&xm));
        for i in 0..n {
            j[i][m] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    j
}

/// One-layer flow `π'_i = Σ_{j,k} π_j π_k [s(j,k) = i]`, optionally followed
/// by a heralded link channel.
#[derive(Clone, Debug, Serialize)]
pub struct HeraldedFlow {
    label: String,
    table: [[usize; 5]; 5],
    bulk: Option<[f64; 5]>,
}

impl HeraldedFlow {
    pub fn new(label: impl Into<String>, rt: &RTilde) -> Result<HeraldedFlow> {
        Ok(HeraldedFlow { label: label.into(), table: pullback(rt)?, bulk: None })
    }

    pub fn with_bulk(mut self, rho: [f64; 5]) -> HeraldedFlow {
        self.bulk = Some(rho);
        self
    }

    pub fn table(&self) -> &[[usize; 5]; 5] {
        &self.table
    }

    pub fn step_full(&self, pi: &[f64; 5]) -> [f64; 5] {
        let mut out = [0.0; 5];
        for j in 0..5 {
            for k in 0..5 {
                out[self.table[j][k]] += pi[j] * pi[k];
            }
        }
        match &self.bulk {
            Some(rho) => bulk_insert(&out, rho),
            None => out,
        }
    }

    /// `∂π'_i/∂π_m` on the full five coordinates.
    fn jacobian_full(&self, pi: &[f64; 5]) -> [[f64; 5]; 5] {
        let mut j = [[0.0; 5]; 5];
        for a in 0..5 {
            for b in 0..5 {
                j[self.table[a][b]][a] += pi[b];
                j[self.table[a][b]][b] += pi[a];
            }
        }
        if let Some(rho) = &self.bulk {
            // Insertion is linear: compose with its matrix.
            let mut lin = [[0.0; 5]; 5];
            for s in 0..5 {
                let mut e = [0.0; 5];
                e[s] = 1.0;
                let col = bulk_insert(&e, rho);
                for i in 0..5 {
                    lin[i][s] = col[i];
                }
            }
            let mut out = [[0.0; 5]; 5];
            for i in 0..5 {
                for m in 0..5 {
                    out[i][m] = (0..5).map(|s| lin[i][s] * j[s][m]).sum();
                }
            }
            return out;
        }
        j
    }
}

impl Flow for HeraldedFlow {
    fn dim(&self) -> usize {
        4
    }

    fn step(&self, x: &[f64]) -> Vec<f64> {
        to_reduced(&self.step_full(&to_full(x)))
    }

    fn jacobian(&self, x: &[f64]) -> Matrix {
        let jf = self.jacobian_full(&to_full(x));
        REDUCED.iter().map(|&i| REDUCED.iter().map(|&m| jf[i][m] - jf[i][Y]).collect()).collect()
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

/// Flow averaged over uniformly random gates, on the symmetric slice
/// `x = z = y`; coordinates `(n, a)`.
#[derive(Copy, Clone, Debug, Default, Serialize)]
pub struct RandomEnsembleFlow;

impl RandomEnsembleFlow {
    pub fn step_full(pi: &[f64; 5]) -> [f64; 5] {
        let (n, a) = (pi[N], pi[A]);
        let s = (5.0 + a * (a - 6.0) + n * (n - 6.0) + 8.0 * n * a) / 15.0;
        [n * (6.0 - n - 4.0 * a) / 5.0, s, s, s, a * (6.0 - a - 4.0 * n) / 5.0]
    }
}

impl Flow for RandomEnsembleFlow {
    fn dim(&self) -> usize {
        2
    }

    fn step(&self, x: &[f64]) -> Vec<f64> {
        let (n, a) = (x[0], x[1]);
        vec![n * (6.0 - n - 4.0 * a) / 5.0, a * (6.0 - a - 4.0 * n) / 5.0]
    }

    fn jacobian(&self, x: &[f64]) -> Matrix {
        let (n, a) = (x[0], x[1]);
        vec![
            vec![(6.0 - 2.0 * n - 4.0 * a) / 5.0, -4.0 * n / 5.0],
            vec![-4.0 * a / 5.0, (6.0 - 2.0 * a - 4.0 * n) / 5.0],
        ]
    }

    fn name(&self) -> String {
        "random-ensemble".into()
    }
}

/// Iterate a flow `steps` times, returning every point including the start.
pub fn trajectory<F: Flow + ?Sized>(flow: &F, start: &[f64], steps: usize) -> Vec<Vec<f64>> {
    let mut out = vec![start.to_vec()];
    for _ in 0..steps {
        let next = flow.step(out.last().expect("non-empty"));
        out.push(next);
    }
    out
}

/// Correlation length `1 / log_B λ` for a relevant eigenvalue `λ > 1`.
pub fn correlation_length(lambda: Complex64, layers: usize) -> Option<f64> {
    (lambda.im == 0.0 && lambda.re > 1.0).then(|| (layers as f64) * 2f64.ln() / lambda.re.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{bell, opt152, Clifford2, Pauli};

    fn bell_flow() -> HeraldedFlow {
        HeraldedFlow::new("bell", &RTilde::new(&bell(), Pauli::Z).unwrap()).unwrap()
    }

    fn opt_flow() -> HeraldedFlow {
        HeraldedFlow::new("opt152", &RTilde::new(&opt152(), Pauli::X).unwrap()).unwrap()
    }

    #[test]
    fn pullback_flows_match_closed_forms() {
        let pts = [[0.3, 0.1, 0.2, 0.15, 0.25], [0.05, 0.4, 0.1, 0.3, 0.15], [0.6, 0.0, 0.0, 0.0, 0.4]];
        for p in pts {
            let [n, x, z, y, a] = p;
            let b = bell_flow().step_full(&p);
            let want = [
                n * (n + 2.0 * z + 2.0 * y),
                z * z + y * y,
                2.0 * n * a + (2.0 - x) * x,
                2.0 * z * y,
                a * (a + 2.0 * z + 2.0 * y),
            ];
            for i in 0..5 {
                assert!((b[i] - want[i]).abs() < 1e-14, "bell {i}: {b:?} vs {want:?}");
            }
            let o = opt_flow().step_full(&p);
            let want = [
                n * (n + 2.0 * x + 2.0 * z),
                x * x + z * z,
                y * (2.0 - y) + 2.0 * n * a,
                2.0 * x * z,
                a * (a + 2.0 * x + 2.0 * z),
            ];
            for i in 0..5 {
                assert!((o[i] - want[i]).abs() < 1e-14, "opt152 {i}: {o:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn gate_average_reproduces_ensemble_flow() {
        let all = Clifford2::all();
        for (n, a) in [(0.3, 0.2), (0.1, 0.5), (0.45, 0.05)] {
            let s = (1.0 - n - a) / 3.0;
            let pi = [n, s, s, s, a];
            let mut avg = [0.0; 5];
            for g in &all {
                let f = HeraldedFlow::new("g", &RTilde::new(g, Pauli::Z).unwrap()).unwrap();
                let o = f.step_full(&pi);
                for i in 0..5 {
                    avg[i] += o[i] / all.len() as f64;
                }
            }
            let want = RandomEnsembleFlow::step_full(&pi);
            for i in 0..5 {
                assert!((avg[i] - want[i]).abs() < 1e-12, "{avg:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        let bulk = bell_flow().with_bulk(bit_phase_channel(0.03));
        let flows: Vec<Box<dyn Flow>> = vec![Box::new(bell_flow()), Box::new(opt_flow()), Box::new(bulk)];
        let x = [0.3, 0.1, 0.2, 0.25];
        for f in &flows {
            let (ja, jn) = (f.jacobian(&x), fd_jacobian(f.as_ref(), &x, 1e-6));
            for i in 0..4 {
                for m in 0..4 {
                    assert!((ja[i][m] - jn[i][m]).abs() < 1e-6);
                }
            }
        }
        let r = RandomEnsembleFlow;
        let (ja, jn) = (r.jacobian(&[0.3, 0.4]), fd_jacobian(&r, &[0.3, 0.4], 1e-6));
        for i in 0..2 {
            for m in 0..2 {
                assert!((ja[i][m] - jn[i][m]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn flows_preserve_the_simplex_and_swap_n_with_a() {
        let f = opt_flow();
        let p = [0.2, 0.1, 0.3, 0.15, 0.25];
        let o = f.step_full(&p);
        assert!((o.iter().sum::<f64>() - 1.0).abs() < 1e-14 && o.iter().all(|&v| v >= 0.0));
        let swapped = f.step_full(&[p[4], p[1], p[2], p[3], p[0]]);
        assert!((swapped[0] - o[4]).abs() < 1e-14 && (swapped[4] - o[0]).abs() < 1e-14);
        let rho = bit_phase_channel(0.1);
        assert!((bulk_insert(&p, &rho).iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
