//! Two-layer flows of the Bell tree under heralded bit and phase flips.
//!
//! `x0` (`z0`) is the probability that the `X` (`Z`) logical is lost. One step
//! spans two tree layers; bulk flips at rate `q` act on every internal link.

use serde::Serialize;

use super::{Flow, A, N, X, Y, Z};
use crate::error::Result;
use crate::numeric::{bisect, corrected_power_exponent, golden_min, Matrix};

/// Heralding on a link: `f(v) = (1 - q) v + q`.
#[inline]
pub fn herald(v: f64, q: f64) -> f64 {
    (1.0 - q) * v + q
}

/// `x0 -> f(f(2 x0 - x0²)²)`.
pub fn x_step(x: f64, q: f64) -> f64 {
    let u = herald(2.0 * x - x * x, q);
    herald(u * u, q)
}

pub fn x_step_deriv(x: f64, q: f64) -> f64 {
    let u = herald(2.0 * x - x * x, q);
    2.0 * (1.0 - q) * (1.0 - q) * u * (2.0 - 2.0 * x)
}

/// `z0 -> f(2 f(z0²) - f(z0²)²)`.
pub fn z_step(z: f64, q: f64) -> f64 {
    let w = herald(z * z, q);
    herald(2.0 * w - w * w, q)
}

pub fn z_step_deriv(z: f64, q: f64) -> f64 {
    let w = herald(z * z, q);
    4.0 * z * (1.0 - q) * (1.0 - q) * (1.0 - w)
}

/// Class distribution of a CSS tree with independent losses `x0`, `z0`.
pub fn embed(x0: f64, z0: f64) -> [f64; 5] {
    let mut pi = [0.0; 5];
    pi[N] = (1.0 - x0) * (1.0 - z0);
    pi[X] = x0 * (1.0 - z0);
    pi[Z] = z0 * (1.0 - x0);
    pi[Y] = 0.0;
    pi[A] = x0 * z0;
    pi
}

/// `(x0, z0)` flow at bulk rate `q`.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct BellCssFlow {
    pub q: f64,
}

impl Flow for BellCssFlow {
    fn dim(&self) -> usize {
        2
    }
    fn step(&self, v: &[f64]) -> Vec<f64> {
        vec![x_step(v[0], self.q), z_step(v[1], self.q)]
    }
    fn layers(&self) -> usize {
        2
    }
    fn jacobian(&self, v: &[f64]) -> Matrix {
        vec![vec![x_step_deriv(v[0], self.q), 0.0], vec![0.0, z_step_deriv(v[1], self.q)]]
    }
    fn name(&self) -> String {
        format!("bell-css(q={})", self.q)
    }
}

/// One row of the heralded trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRow {
    pub tau: usize,
    pub x0: f64,
    pub z0: f64,
    /// Loss rate of the `X` logical, `NaN` at `τ = 0`.
    pub loss: f64,
    pub info: f64,
    pub p_fail: f64,
}

pub fn trajectory(p: f64, q: f64, tau_max: usize) -> Vec<TrajectoryRow> {
    let (mut x, mut z) = (p, p);
    let mut out = Vec::with_capacity(tau_max + 1);
    let mut prev_x = f64::NAN;
    for tau in 0..=tau_max {
        let pi = embed(x, z);
        out.push(TrajectoryRow {
            tau,
            x0: x,
            z0: z,
            loss: (x - prev_x) / (1.0 - prev_x),
            info: x + z,
            p_fail: super::failure_probability(&pi),
        });
        prev_x = x;
        x = x_step(x, q);
        z = z_step(z, q);
    }
    out
}

/// Fixed points of a scalar flow on `[0, 1]`: `(stable, critical)` below the
/// trivial point at one, if they exist.
fn scalar_fixed_points(g: impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    let h = |x: f64| g(x) - x;
    let grid = 4000;
    let (mut best, mut best_v) = (0.0, f64::INFINITY);
    for k in 0..grid {
        let x = k as f64 / grid as f64;
        let v = h(x);
        if v < best_v {
            best = x;
            best_v = v;
        }
    }
    let step = 1.0 / grid as f64;
    let xm = golden_min(h, (best - step).max(0.0), (best + step).min(1.0), 1e-14);
    if h(xm) >= 0.0 {
        return None;
    }
    let s = bisect(h, 0.0, xm, 1e-15).ok()?;
    let c = bisect(h, xm, 1.0 - 1e-12, 1e-15).ok()?;
    Some((s, c))
}

/// Fixed points of the `x0` and `z0` flows at one `q`. Missing points are `NaN`.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub q: f64,
    pub x_s: f64,
    pub x_c: f64,
    pub x_f: f64,
    pub z_s: f64,
    pub z_c: f64,
    pub z_f: f64,
}

pub fn phase_row(q: f64) -> PhaseRow {
    let (x_s, x_c) = scalar_fixed_points(|x| x_step(x, q)).unwrap_or((f64::NAN, f64::NAN));
    let (z_s, z_c) = scalar_fixed_points(|z| z_step(z, q)).unwrap_or((f64::NAN, f64::NAN));
    PhaseRow { q, x_s, x_c, x_f: 1.0, z_s, z_c, z_f: 1.0 }
}

pub fn bell_phase_diagram(qs: &[f64]) -> Vec<PhaseRow> {
    qs.iter().map(|&q| phase_row(q)).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// Both logicals survive.
    Coding,
    /// Exactly one of the `X`, `Z` logicals survives.
    Classical,
    NonCoding,
}

/// Phase of the flow started at surface rate `p` with bulk rate `q`.
pub fn classify(p: f64, q: f64) -> Phase {
    let row = phase_row(q);
    let x_ok = row.x_c.is_finite() && p < row.x_c;
    let z_ok = row.z_c.is_finite() && p < row.z_c;
    match (x_ok, z_ok) {
        (true, true) => Phase::Coding,
        (false, false) => Phase::NonCoding,
        _ => Phase::Classical,
    }
}

/// Real root of `32 q³ - 96 q² + 96 q - 5` (the polynomial is monotone).
pub fn q_c_closed_form() -> f64 {
    bisect(|q| ((32.0 * q - 96.0) * q + 96.0) * q - 5.0, 0.0, 0.5, 1e-16).expect("sign change on [0, 1/2]")
}

/// `q` at which the stable and critical points of the `x0` flow merge.
pub fn q_c_from_flow() -> Result<f64> {
    let gap = |q: f64| {
        let h = |x: f64| x_step(x, q) - x;
        let grid = 2000;
        let best = (0..grid).map(|k| k as f64 / grid as f64).min_by(|a, b| h(*a).total_cmp(&h(*b))).unwrap_or(0.0);
        let xm = golden_min(h, (best - 1e-3).max(0.0), (best + 1e-3).min(1.0), 1e-14);
        h(xm)
    };
    bisect(gap, 0.01, 0.1, 1e-14)
}

/// The marginal fixed point of the `x0` flow at `q = q_c`, where the stable
/// and critical points merge and `x_step(x) - x` touches zero from above.
pub fn x_marginal() -> f64 {
    let qc = q_c_closed_form();
    let h = |x: f64| x_step(x, qc) - x;
    let grid = 2000;
    let best = (1..grid).map(|k| k as f64 / grid as f64).min_by(|a, b| h(*a).total_cmp(&h(*b))).unwrap_or(0.0);
    golden_min(h, best - 1e-3, best + 1e-3, 1e-14)
}

/// Critical surface rate at `q = 0`: `(3 - √5)/2`.
pub fn p_c() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

/// Correlation length `1 / log_4 λ` at the `q = 0` critical point.
pub fn xi_c() -> f64 {
    let lambda = x_step_deriv(p_c(), 0.0);
    4f64.ln() / lambda.ln()
}

/// Correlation length of the critical point of the `x0` (`z0`) flow at `q`.
pub fn xi_c_at(q: f64) -> (f64, f64) {
    let row = phase_row(q);
    let xi = |l: f64| 4f64.ln() / l.ln();
    (xi(x_step_deriv(row.x_c, q)), xi(z_step_deriv(row.z_c, q)))
}

/// `λ_s(q)`: slope of the `x0` flow at its stable point.
pub fn lambda_s(q: f64) -> f64 {
    x_step_deriv(phase_row(q).x_s, q)
}

/// Relaxation length at the stable point, `-1 / log_4 λ_s`.
pub fn xi_s(q: f64) -> f64 {
    -4f64.ln() / lambda_s(q).ln()
}

/// Exponent `ν` in `ξ_s ∝ (q_c - q)^{-ν}`, fitted on `q ∈ [lo, hi] q_c` with
/// `q_c - q` spaced geometrically and the leading `√(q_c - q)` correction.
pub fn xi_s_exponent(lo: f64, hi: f64, points: usize) -> Result<f64> {
    let qc = q_c_closed_form();
    let (d_lo, d_hi) = ((1.0 - hi) * qc, (1.0 - lo) * qc);
    let (x, y): (Vec<f64>, Vec<f64>) = (0..points)
        .map(|k| {
            let delta = d_lo * (d_hi / d_lo).powf(k as f64 / (points - 1) as f64);
            (delta, 1.0 / xi_s(qc - delta))
        })
        .unzip();
    corrected_power_exponent(&x, &y, f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heralded::{bit_phase_channel, HeraldedFlow};
    use crate::pauli::{bell, Pauli};
    use crate::tree::RTilde;

    #[test]
    fn q0_closed_forms() {
        for x in [0.1, 0.4, 0.8] {
            assert!((x_step(x, 0.0) - (x * (2.0 - x)).powi(2)).abs() < 1e-15);
            assert!((z_step(x, 0.0) - x * x * (2.0 - x * x)).abs() < 1e-15);
            // 1 - z0 obeys the x0 flow at q = 0.
            assert!((1.0 - z_step(1.0 - x, 0.0) - x_step(x, 0.0)).abs() < 1e-14);
        }
        let pc = p_c();
        assert!((pc.powi(3) - 4.0 * pc * pc + 4.0 * pc - 1.0).abs() < 1e-15);
        assert!((x_step(pc, 0.0) - pc).abs() < 1e-15);
        assert!((x_step_deriv(pc, 0.0) - (6.0 - 2.0 * 5f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn css_flow_is_two_generic_steps_with_link_heralding() {
        let f = HeraldedFlow::new("bell", &RTilde::new(&bell(), Pauli::Z).unwrap())
            .unwrap()
            .with_bulk(bit_phase_channel(0.0));
        for q in [0.0, 0.02, 0.07] {
            let g = HeraldedFlow::new("bell", &RTilde::new(&bell(), Pauli::Z).unwrap())
                .unwrap()
                .with_bulk(bit_phase_channel(q));
            for (x, z) in [(0.1, 0.3), (0.5, 0.2), (0.9, 0.6)] {
                let two = g.step_full(&g.step_full(&embed(x, z)));
                let want = embed(x_step(x, q), z_step(z, q));
                for i in 0..5 {
                    assert!((two[i] - want[i]).abs() < 1e-14, "q={q}: {two:?} vs {want:?}");
                }
            }
        }
        let _ = f;
    }

    #[test]
    fn phase_rows_are_fixed_points() {
        let row = phase_row(0.03);
        assert!(row.x_s < row.x_c && row.z_s < row.z_c);
        for v in [row.x_s, row.x_c] {
            assert!((x_step(v, 0.03) - v).abs() < 1e-13);
        }
        assert!(phase_row(0.06).x_s.is_nan());
        assert_eq!(classify(0.01, 0.01), Phase::Coding);
        assert_eq!(classify(0.9, 0.01), Phase::NonCoding);
    }
}
