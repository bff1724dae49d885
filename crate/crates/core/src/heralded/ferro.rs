//! Magnetization of the all-trivial-syndrome sector of the Bell tree under
//! unheralded flips at rate `q`.

use serde::Serialize;

use super::Flow;
use crate::error::Result;
use crate::numeric::{bisect, golden_min, Matrix};

/// `m_x -> 2m²(1-2q)² / (1 + m⁴(1-2q)²)`.
pub fn mx_step(m: f64, q: f64) -> f64 {
    let a2 = (1.0 - 2.0 * q).powi(2);
    2.0 * m * m * a2 / (1.0 + m.powi(4) * a2)
}

pub fn mx_step_deriv(m: f64, q: f64) -> f64 {
    let a2 = (1.0 - 2.0 * q).powi(2);
    let den = 1.0 + m.powi(4) * a2;
    4.0 * m * a2 * (1.0 - m.powi(4) * a2) / (den * den)
}

/// `m_z -> 4m²(1-2q)³ / (1 + m²)²`.
pub fn mz_step(m: f64, q: f64) -> f64 {
    4.0 * m * m * (1.0 - 2.0 * q).powi(3) / (1.0 + m * m).powi(2)
}

/// `(m_c, m_s)` of the `m_x` flow: critical and ordered fixed points.
pub fn mx_fixed_points(q: f64) -> Option<(f64, f64)> {
    let h = |m: f64| mx_step(m, q) - m;
    let top = golden_min(|m| -h(m), 0.05, 1.0, 1e-14);
    if h(top) <= 0.0 {
        return None;
    }
    let c = bisect(h, 1e-6, top, 1e-15).ok()?;
    let s = bisect(h, top, 1.0, 1e-15).ok()?;
    Some((c, s))
}

/// Closed form: `27(1-2q)^6 = 16`.
pub fn q_fm_closed_form() -> f64 {
    (1.0 - (16.0f64 / 27.0).powf(1.0 / 6.0)) / 2.0
}

/// `q` at which the two nontrivial fixed points of the `m_x` flow merge.
pub fn q_fm_from_flow() -> Result<f64> {
    let gap = |q: f64| {
        let h = |m: f64| mx_step(m, q) - m;
        let top = golden_min(|m| -h(m), 0.05, 1.0, 1e-14);
        h(top)
    };
    bisect(gap, 0.0, 0.2, 1e-14)
}

/// Magnetization flow as a one-dimensional [`Flow`].
#[derive(Copy, Clone, Debug, Serialize)]
pub struct FerroFlow {
    pub q: f64,
}

impl Flow for FerroFlow {
    fn dim(&self) -> usize {
        1
    }
    fn step(&self, m: &[f64]) -> Vec<f64> {
        vec![mx_step(m[0], self.q)]
    }
    fn layers(&self) -> usize {
        2
    }
    fn jacobian(&self, m: &[f64]) -> Matrix {
        vec![vec![mx_step_deriv(m[0], self.q)]]
    }
    fn name(&self) -> String {
        format!("ferro(q={})", self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point_at_zero_bulk_rate() {
        let (mc, ms) = mx_fixed_points(0.0).unwrap();
        assert!((ms - 1.0).abs() < 1e-9);
        // m_c solves m³ + m² + m - 1 = 0.
        assert!((mc.powi(3) + mc * mc + mc - 1.0).abs() < 1e-12);
        assert!((mx_step_deriv(mc, 0.0) - 1.67857).abs() < 1e-5);
    }

    #[test]
    fn both_magnetizations_lose_order_together() {
        let q = q_fm_closed_form();
        let below = q - 1e-4;
        let above = q + 1e-4;
        let ordered = |f: &dyn Fn(f64) -> f64| (0..200).fold(1.0, |m, _| f(m)) > 0.1;
        assert!(ordered(&|m| mx_step(m, below)) && !ordered(&|m| mx_step(m, above)));
        assert!(ordered(&|m| mz_step(m, below)) && !ordered(&|m| mz_step(m, above)));
    }
}
