//! Balanced placement of `M` surface erasures on the depth-`2τ` CNOT-NOTC tree.
//!
//! Every node splits its erasures as evenly as possible between its children,
//! so loss of a logical is a deterministic function of `M`.

/// `x0(M, τ)` from the two-step rule `x0(M, τ+1) = x0(⌈⌊M/2⌋/2⌉, τ)`.
pub fn x_lost(m: u64, tau: usize) -> bool {
    (0..tau).fold(m, |m, _| (m / 2).div_ceil(2)) >= 1
}

/// `z0(M, τ)` from `z0(M, τ+1) = z0(⌊⌈M/2⌉/2⌋, τ)`.
pub fn z_lost(m: u64, tau: usize) -> bool {
    (0..tau).fold(m, |m, _| m.div_ceil(2) / 2) >= 1
}

/// Loss evaluated layer by layer on the tree: a copying node loses a logical
/// only if both children lose it, a delocalizing node if either does.
/// `x_basis` selects the `X` logical, for which the root layer copies.
pub fn lost_by_layers(m: u64, layers: usize, x_basis: bool) -> bool {
    fn rec(m: u64, layers: usize, copy: bool) -> bool {
        if layers == 0 {
            return m >= 1;
        }
        let (lo, hi) = (m / 2, m.div_ceil(2));
        let (a, b) = (rec(lo, layers - 1, !copy), rec(hi, layers - 1, !copy));
        if copy {
            a && b
        } else {
            a || b
        }
    }
    rec(m, layers, x_basis)
}

/// Closed-form thresholds `(M*_x, M*_z) = ((4^τ + 2)/3, (2·4^τ + 1)/3)`, and `(1, 1)` at `τ = 0`.
pub fn thresholds(tau: usize) -> (u64, u64) {
    if tau == 0 {
        return (1, 1);
    }
    let f = 4u64.pow(tau as u32);
    ((f + 2) / 3, (2 * f + 1) / 3)
}

/// Smallest `M` losing the logical, by scanning.
pub fn threshold_by_scan(tau: usize, lost: impl Fn(u64, usize) -> bool) -> u64 {
    (0..=4u64.pow(tau as u32)).find(|&m| lost(m, tau)).expect("all leaves erased loses everything")
}

/// Leaf erasure pattern with left children receiving `⌊M/2⌋`.
pub fn balanced_pattern(m: u64, depth: usize) -> Vec<bool> {
    fn rec(m: u64, depth: usize, out: &mut Vec<bool>) {
        if depth == 0 {
            out.push(m >= 1);
            return;
        }
        rec(m / 2, depth - 1, out);
        rec(m.div_ceil(2), depth - 1, out);
    }
    let mut out = Vec::with_capacity(1 << depth);
    rec(m, depth, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_step_rule_matches_layer_rule() {
        for tau in 0..5 {
            for m in 0..=4u64.pow(tau as u32) {
                assert_eq!(x_lost(m, tau), lost_by_layers(m, 2 * tau, true));
                assert_eq!(z_lost(m, tau), lost_by_layers(m, 2 * tau, false));
            }
        }
    }

    #[test]
    fn pattern_places_m_erasures() {
        let p = balanced_pattern(11, 4);
        assert_eq!(p.len(), 16);
        assert_eq!(p.iter().filter(|&&e| e).count(), 11);
    }
}
