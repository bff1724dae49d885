//! Small dense linear algebra, root finding and curve fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square matrix.
pub type Matrix = Vec<Vec<f64>>;

/// Coefficients `[1, c_1, ..., c_n]` of `det(λI - A) = λ^n + c_1 λ^{n-1} + ... + c_n`
/// (Faddeev-LeVerrier).
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![1.0];
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let c_prev = coeffs[k - 1];
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += a[i][l] * m[l][j];
                }
                next[i][j] = s + if i == j { c_prev } else { 0.0 };
            }
        }
        m = next;
        let mut tr = 0.0;
        for i in 0..n {
            for l in 0..n {
                tr += a[i][l] * m[l][i];
            }
        }
        coeffs.push(-tr / k as f64);
    }
    coeffs
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a monic real polynomial given highest degree first.
///
/// Exact zero roots are deflated; the rest come from Durand-Kerner iteration
/// followed by Newton polishing.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    let mut c: Vec<f64> = coeffs.to_vec();
    let mut roots = Vec::new();
    while c.len() > 1 && c.last().is_some_and(|v| v.abs() <= 1e-14 * scale) {
        c.pop();
        roots.push(Complex64::new(0.0, 0.0));
    }
    let n = c.len() - 1;
    if n == 0 {
        return roots;
    }
    let lead = c[0];
    let c: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let radius = 1.0 + c[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius.min(2.0)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let (p, _) = horner(&c, z[i]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = if den.norm() > 0.0 { p / den } else { Complex64::new(1e-8, 1e-8) };
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *zi - p / dp;
            if horner(&c, next).0.norm() < p.norm() {
                *zi = next;
            } else {
                break;
            }
        }
        if zi.im.abs() < 1e-10 * zi.re.abs().max(1.0) {
            zi.im = 0.0;
        }
    }
    roots.extend(z);
    roots
}

/// Eigenvalues sorted by decreasing modulus.
pub fn eigenvalues(a: &Matrix) -> Vec<Complex64> {
    let mut ev = poly_roots(&char_poly(a));
    ev.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(y.re.total_cmp(&x.re)));
    ev
}

fn to_dmatrix(a: &Matrix) -> DMatrix<f64> {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| a[i][j])
}

/// Solve `A x = b`.
pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let lu = to_dmatrix(a).lu();
    lu.solve(&DVector::from_column_slice(b)).map(|x| x.iter().copied().collect())
}

/// Unit eigenvector for a real eigenvalue, by inverse iteration.
pub fn eigenvector(a: &Matrix, lambda: f64) -> Option<Vec<f64>> {
    let n = a.len();
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let mut m = a.clone();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= shift;
    }
    let lu = to_dmatrix(&m).lu();
    let mut v = DVector::from_element(n, 1.0) + DVector::from_fn(n, |i, _| 0.1 * i as f64);
    for _ in 0..50 {
        let w = lu.solve(&v)?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        v = w / norm;
    }
    // Sign convention: first significant component positive.
    let pivot = v.iter().copied().find(|x| x.abs() > 1e-8).unwrap_or(1.0);
    Some(v.iter().map(|x| x * pivot.signum()).collect())
}

/// Least-squares line `y = slope x + intercept`, with the slope's standard error.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::FitFailed(format!("need at least two points, got {n}")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 || !sxy.is_finite() {
        return Err(Error::FitFailed("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let slope_stderr = if n > 2 { (rss / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };
    Ok(LineFit { slope, intercept, slope_stderr })
}

/// Least-squares coefficients `β` of `y ≈ Σ_k β_k columns[k]`.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    if columns.is_empty() || n < columns.len() || columns.iter().any(|c| c.len() != n) {
        return Err(Error::FitFailed(format!("{} columns for {n} points", columns.len())));
    }
    let a = DMatrix::from_fn(n, columns.len(), |i, k| columns[k][i]);
    a.svd(true, true)
        .solve(&DVector::from_column_slice(y), 1e-12)
        .map(|b| b.iter().copied().collect())
        .map_err(|e| Error::FitFailed(e.into()))
}

/// Power-law exponent `ν` of `y ∝ x^ν (1 + b g(x))` for a known leading
/// correction `g`: least squares on `ln y = c + ν ln x + b g(x)`.
pub fn corrected_power_exponent(x: &[f64], y: &[f64], g: impl Fn(f64) -> f64) -> Result<f64> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::FitFailed("power fit needs positive data".into()));
    }
    let cols = vec![vec![1.0; x.len()], x.iter().map(|d| d.ln()).collect(), x.iter().map(|&d| g(d)).collect()];
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&cols, &ly)?[1])
}

/// Fit `y = c1 + c2 x^α`: linear in `(c1, c2)` for fixed `α`, golden section on `α`.
pub fn offset_power_fit(x: &[f64], y: &[f64], alpha_lo: f64, alpha_hi: f64) -> Result<(f64, f64, f64)> {
    let rss = |alpha: f64| -> (f64, f64, f64) {
        let xa: Vec<f64> = x.iter().map(|v| v.powf(alpha)).collect();
        match linear_fit(&xa, y) {
            Ok(f) => {
                let r = xa.iter().zip(y).map(|(a, b)| (b - f.slope * a - f.intercept).powi(2)).sum();
                (r, f.intercept, f.slope)
            }
            Err(_) => (f64::INFINITY, 0.0, 0.0),
        }
    };
    let alpha = golden_min(|a| rss(a).0, alpha_lo, alpha_hi, 1e-10);
    let (r, c1, c2) = rss(alpha);
    if !r.is_finite() {
        return Err(Error::FitFailed("offset power fit".into()));
    }
    Ok((c1, c2, alpha))
}

/// Fit `y = y_inf + c λ^x` by scanning `λ` (linear in the rest).
pub fn geometric_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let rss = |lambda: f64| -> (f64, f64, f64) {
        let xl: Vec<f64> = x.iter().map(|v| lambda.powf(*v)).collect();
        match linear_fit(&xl, y) {
            Ok(f) => {
                let r = xl.iter().zip(y).map(|(a, b)| (b - f.slope * a - f.intercept).powi(2)).sum();
                (r, f.intercept, f.slope)
            }
            Err(_) => (f64::INFINITY, 0.0, 0.0),
        }
    };
    // Coarse scan guards against the multimodal tails of the RSS.
    let grid: Vec<f64> = (1..200).map(|k| k as f64 / 200.0).collect();
    let best = grid
        .iter()
        .copied()
        .min_by(|a, b| rss(*a).0.total_cmp(&rss(*b).0))
        .ok_or_else(|| Error::FitFailed("empty grid".into()))?;
    let lambda = golden_min(|l| rss(l).0, (best - 0.005).max(1e-6), (best + 0.005).min(0.999_999), 1e-12);
    let (r, y_inf, c) = rss(lambda);
    if !r.is_finite() {
        return Err(Error::FitFailed("geometric fit".into()));
    }
    Ok((y_inf, c, lambda))
}

/// Minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    (lo + hi) / 2.0
}

/// Root of `f` on a sign-changing bracket, to absolute tolerance `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence {
            what: format!("bisection on [{lo}, {hi}] (no sign change)"),
            iterations: 0,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo < tol {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All sign-change roots of `f` on `[lo, hi]`, scanning `n` cells.
pub fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let h = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for k in 1..=n {
        let x1 = lo + h * k as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            if let Ok(r) = bisect(&f, x0, x1, tol) {
                out.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        out.push(x0);
    }
    out
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
