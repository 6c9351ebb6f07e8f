//! Deterministic numerical kernels: bracketed root finding, adaptive
//! Gauss-Kronrod quadrature, central finite differences and a damped Newton
//! iteration for two-dimensional stationary points.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Absolute root tolerance, in the (dimensionless) coordinate of the root.
    pub root_abs_tol: f64,
    pub quad_rel_tol: f64,
    /// Finite-difference step relative to the natural length scale of the caller.
    pub fd_step: f64,
    pub max_iterations: usize,
    pub max_subdivisions: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            root_abs_tol: 1e-10,
            quad_rel_tol: 1e-6,
            fd_step: 1e-4,
            max_iterations: 200,
            max_subdivisions: 2000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("root_abs_tol", self.root_abs_tol),
            ("quad_rel_tol", self.quad_rel_tol),
            ("fd_step", self.fd_step),
        ] {
            crate::error::require_positive("numerics", name, v)?;
        }
        if self.max_iterations == 0 || self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                module: "numerics",
                parameter: "max_iterations",
                value: 0.0,
                bound: ">= 1",
            });
        }
        Ok(())
    }
}

/// Brent's method on a sign-changing bracket.
///
/// The first step is a secant step, so linear functions are solved exactly;
/// bisection steps take over whenever interpolation stalls.
pub fn find_root_bracketed<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    find_root_bracketed_with(f, a, b, tol, ToleranceConfig::default().max_iterations)
}

pub fn find_root_bracketed_with<F>(
    f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = (a.min(b), a.max(b));
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange { a: lo, b: hi });
    }

    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iterations {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::IterationLimit(max_iterations))
}

/// Scan `n` equal steps on `[a, b]` and return every sub-interval whose
/// endpoint values change sign, in scan order.
pub fn sign_change_brackets<F>(f: F, a: f64, b: f64, n: usize) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..=n {
        let x = if i == n { b } else { a + h * i as f64 };
        let fx = f(x);
        if f_prev == 0.0 || f_prev * fx < 0.0 {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by position for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += w * (f1 + f2);
        abs_sum += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (
        kronrod * half,
        ((kronrod - gauss) * half).abs(),
        abs_sum * half.abs(),
    )
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of |K15 − G7| over the final panels.
    pub error_estimate: f64,
    pub subdivisions: usize,
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below `rel_tol·|value|`. Integrable endpoint singularities
/// converge, slowly; callers with known square-root endpoints should
/// substitute first.
pub fn adaptive_quadrature<F>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let (value, error, abs_sum) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut total_abs = abs_sum;
    let mut subdivisions = 0;
    loop {
        let converged =
            total_err <= rel_tol * total.abs() || total_err <= 50.0 * f64::EPSILON * total_abs;
        if converged {
            // Re-sum in position order so the result does not depend on heap history.
            let mut panels = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            let error_estimate = panels.iter().map(|p| p.error).sum();
            return Ok(Quadrature {
                value,
                error_estimate,
                subdivisions,
            });
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                rel_tol,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, a1) = kronrod15(&f, worst.a, mid);
        let (v2, e2, a2) = kronrod15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += a1 + a2;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
}

pub fn adaptive_integral<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    adaptive_quadrature(
        f,
        a,
        b,
        rel_tol,
        ToleranceConfig::default().max_subdivisions,
    )
    .map(|q| q.value)
}

/// Central-difference Hessian of a function of two variables with absolute step `h`.
pub fn fd_hessian<F>(f: F, point: [f64; 2], h: f64) -> [[f64; 2]; 2]
where
    F: Fn(f64, f64) -> f64,
{
    let [x, y] = point;
    let f0 = f(x, y);
    let fxx = (f(x + h, y) - 2.0 * f0 + f(x - h, y)) / (h * h);
    let fyy = (f(x, y + h) - 2.0 * f0 + f(x, y - h)) / (h * h);
    let fxy =
        (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
    [[fxx, fxy], [fxy, fyy]]
}

pub fn fd_gradient<F>(f: F, point: [f64; 2], h: f64) -> [f64; 2]
where
    F: Fn(f64, f64) -> f64,
{
    let [x, y] = point;
    [
        (f(x + h, y) - f(x - h, y)) / (2.0 * h),
        (f(x, y + h) - f(x, y - h)) / (2.0 * h),
    ]
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn symmetric_eigenvalues(m: [[f64; 2]; 2]) -> [f64; 2] {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let radius = half_diff.hypot(m[0][1]);
    [mean - radius, mean + radius]
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
pub fn minimize_golden<F>(
    f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iterations {
        if (b - a).abs() <= tol {
            return Ok(0.5 * (a + b));
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    Err(Error::IterationLimit(max_iterations))
}

/// Damped Newton iteration for a stationary point of a 2D function given its
/// gradient and Hessian. Each step is halved until the gradient norm decreases.
pub fn damped_newton_2d<G, H>(
    gradient: G,
    hessian: H,
    start: [f64; 2],
    tol: f64,
    max_iterations: usize,
) -> Result<[f64; 2]>
where
    G: Fn([f64; 2]) -> [f64; 2],
    H: Fn([f64; 2]) -> [[f64; 2]; 2],
{
    let norm = |g: [f64; 2]| g[0].hypot(g[1]);
    let mut p = start;
    let mut g = gradient(p);
    for _ in 0..max_iterations {
        let m = hessian(p);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::IterationLimit(max_iterations));
        }
        let step = [
            (m[1][1] * g[0] - m[0][1] * g[1]) / det,
            (-m[1][0] * g[0] + m[0][0] * g[1]) / det,
        ];
        if norm(step) <= tol {
            return Ok([p[0] - step[0], p[1] - step[1]]);
        }
        let mut lambda = 1.0;
        loop {
            let trial = [p[0] - lambda * step[0], p[1] - lambda * step[1]];
            let gt = gradient(trial);
            if norm(gt) < norm(g) || lambda < 1e-6 {
                p = trial;
                g = gt;
                break;
            }
            lambda *= 0.5;
        }
        if norm(g) == 0.0 {
            return Ok(p);
        }
    }
    Err(Error::IterationLimit(max_iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_by_brent() {
        let r = find_root_bracketed(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn linear_root_in_one_secant_step() {
        use std::cell::Cell;
        let calls = Cell::new(0);
        let r = find_root_bracketed(
            |x| {
                calls.set(calls.get() + 1);
                3.0 * x - 1.5
            },
            0.0,
            2.0,
            1e-14,
        )
        .unwrap();
        assert_eq!(r, 0.5);
        // two endpoint evaluations plus one secant step
        assert_eq!(calls.get(), 3);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let err = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-10).unwrap_err();
        assert_eq!(err, Error::NoSignChange { a: -1.0, b: 1.0 });
    }

    #[test]
    fn scan_finds_all_brackets() {
        let brackets = sign_change_brackets(|x| (x * 3.0).sin(), 0.1, 6.0, 1000);
        assert_eq!(brackets.len(), 5);
    }

    #[test]
    fn polynomial_and_sqrt_integrals() {
        let v = adaptive_integral(|x| x * x, 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        let v = adaptive_integral(f64::sqrt, 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn error_estimate_is_conservative_on_power_family() {
        for p in [0.5, 1.0, 2.0, 4.0] {
            let exact = 1.0 / (p + 1.0);
            for tol in [1e-4, 1e-6, 1e-8] {
                let q = adaptive_quadrature(|x: f64| x.powf(p), 0.0, 1.0, tol, 5000).unwrap();
                let err = (q.value - exact).abs();
                assert!(
                    err <= q.error_estimate.max(1e-15),
                    "p={p}: err {err:e} > estimate {:e}",
                    q.error_estimate
                );
                assert!(err <= tol * exact * 1.0001);
            }
        }
    }

    #[test]
    fn quadrature_reports_non_convergence() {
        let err = adaptive_quadrature(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10, 20).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn quadrature_is_bitwise_deterministic() {
        let f = |x: f64| (x * 7.0).sin().abs().sqrt();
        let a = adaptive_integral(f, 0.0, 2.0, 1e-8).unwrap();
        let b = adaptive_integral(f, 0.0, 2.0, 1e-8).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn hessian_of_quadratic_is_identity() {
        let h = fd_hessian(|x, y| 0.5 * (x * x + y * y), [0.3, -0.7], 1e-3);
        assert!((h[0][0] - 1.0).abs() < 1e-8);
        assert!((h[1][1] - 1.0).abs() < 1e-8);
        assert!(h[0][1].abs() < 1e-8);
        assert_eq!(h[0][1], h[1][0]);
    }

    #[test]
    fn hessian_of_product() {
        let h = fd_hessian(|x, y| x * y, [1.5, 2.0], 1e-3);
        assert!(h[0][0].abs() < 1e-9 && h[1][1].abs() < 1e-9);
        assert!((h[0][1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn eigenvalues_2x2() {
        let ev = symmetric_eigenvalues([[2.0, 1.0], [1.0, 2.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn golden_section_minimum() {
        let x = minimize_golden(|x| (x - 1.3).powi(2) + 0.5, -4.0, 9.0, 1e-10, 500).unwrap();
        // function values only resolve the abscissa to about √ε
        assert!((x - 1.3).abs() < 1e-7);
    }

    #[test]
    fn newton_finds_shifted_minimum() {
        // f = (x-1)^2 + 2(y+0.5)^2 + 0.1 x^4
        let grad = |p: [f64; 2]| [2.0 * (p[0] - 1.0) + 0.4 * p[0].powi(3), 4.0 * (p[1] + 0.5)];
        let hess = |p: [f64; 2]| [[2.0 + 1.2 * p[0] * p[0], 0.0], [0.0, 4.0]];
        let p = damped_newton_2d(grad, hess, [3.0, 3.0], 1e-14, 100).unwrap();
        let g = grad(p);
        assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
    }
}
