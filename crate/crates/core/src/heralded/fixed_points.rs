use num_complex::Complex64;
use serde::Serialize;

use super::{correlation_length, Flow};
use crate::numeric::{eigenvalues, eigenvector, solve};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub point: Vec<f64>,
    /// Eigenvalues of the linearized flow, by decreasing modulus, as `(re, im)`.
    pub eigenvalues: Vec<(f64, f64)>,
    /// Number of eigenvalues with modulus above one.
    pub relevant: usize,
    pub stability: Stability,
    /// `1 / log_B λ` for the leading eigenvalue when it is real and relevant.
    pub xi: Option<f64>,
    /// Unit eigenvector of the leading eigenvalue when it is real.
    pub leading_eigenvector: Option<Vec<f64>>,
}

/// Tolerance on `|λ| - 1` used to call an eigenvalue marginal.
const MARGINAL_TOL: f64 = 1e-9;

impl FixedPointReport {
    pub fn at<F: Flow + ?Sized>(flow: &F, point: Vec<f64>) -> FixedPointReport {
        let jac = flow.jacobian(&point);
        let ev: Vec<Complex64> = eigenvalues(&jac);
        let radius = ev.first().map(|z| z.norm()).unwrap_or(0.0);
        let relevant = ev.iter().filter(|z| z.norm() > 1.0 + MARGINAL_TOL).count();
        let stability = if radius < 1.0 - MARGINAL_TOL {
            Stability::Stable
        } else if relevant == 0 {
            Stability::Marginal
        } else {
            Stability::Unstable
        };
        let lead = ev.first().copied();
        let xi = lead.and_then(|l| correlation_length(l, flow.layers()));
        let leading_eigenvector = lead.filter(|l| l.im == 0.0).and_then(|l| eigenvector(&jac, l.re));
        FixedPointReport {
            point,
            eigenvalues: ev.iter().map(|z| (z.re, z.im)).collect(),
            relevant,
            stability,
            xi,
            leading_eigenvector,
        }
    }
}

fn residual<F: Flow + ?Sized>(flow: &F, x: &[f64]) -> Vec<f64> {
    flow.step(x).iter().zip(x).map(|(a, b)| a - b).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Damped Newton iteration on `flow(x) - x = 0`.
pub fn newton<F: Flow + ?Sized>(flow: &F, start: &[f64], tol: f64, max_iter: usize) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    let mut r = residual(flow, &x);
    for _ in 0..max_iter {
        if norm(&r) < tol {
            return Some(x);
        }
        let mut j = flow.jacobian(&x);
        for (i, row) in j.iter_mut().enumerate() {
            row[i] -= 1.0;
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = solve(&j, &neg)?;
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + t * d).collect();
            let rc = residual(flow, &cand);
            if norm(&rc) < norm(&r) || t < 1e-6 {
                x = cand;
                r = rc;
                break;
            }
            t *= 0.5;
        }
        if x.iter().any(|v| !v.is_finite() || v.abs() > 10.0) {
            return None;
        }
    }
    (norm(&r) < tol).then_some(x)
}

/// Points of a regular grid on the simplex `{x_i >= 0, Σ x_i <= 1}`.
pub fn simplex_seeds(dim: usize, divisions: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, div: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k as f64 / div as f64);
            rec(dim, left - k, div, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, divisions, divisions, &mut Vec::new(), &mut out);
    out
}

/// Distinct physical fixed points reached by Newton from `seeds`.
///
/// Points outside the simplex (beyond `1e-9`) are dropped; points within
/// `1e-9` of each other are merged.
pub fn find_fixed_points<F: Flow + ?Sized>(flow: &F, seeds: &[Vec<f64>]) -> Vec<FixedPointReport> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    for s in seeds {
        let Some(x) = newton(flow, s, 1e-13, 200) else { continue };
        let physical = x.iter().all(|&v| v > -1e-9) && x.iter().sum::<f64>() < 1.0 + 1e-9;
        if !physical {
            continue;
        }
        if found.iter().any(|f| f.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-9)) {
            continue;
        }
        found.push(x);
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    found.into_iter().map(|x| FixedPointReport::at(flow, x)).collect()
}
