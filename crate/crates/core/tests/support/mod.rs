//! Independent reference computations shared by the integration suites.
//! Nothing here calls into the library's numerics.

#![allow(dead_code)]

/// Two-wire potential in units of ħω, written out term by term.
pub fn double_potential_direct(x: f64, y: f64, dx: f64, dy: f64, chi: f64) -> f64 {
    let rp = (x + dx).powi(2) + y * y;
    let rm = (x - dx).powi(2) + y * y;
    let bx = -y / rp - y / rm + 1.0 / dy;
    let by = (x + dx) / rp + (x - dx) / rm;
    let pref = chi * dy.powi(4) / (1.0 - dy * dy / (dx * dx));
    (1.0 + pref * (bx * bx + by * by)).sqrt() / chi
}

/// Plain bisection for a sign change of `f` on [a, b].
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < 1e-15 * (1.0 + m.abs()) {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Composite trapezoid rule with `n` intervals.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = 0.5 * (f(a) + f(b));
    for i in 1..n {
        sum += f(a + i as f64 * h);
    }
    sum * h
}

/// WKB action along y = dy at energy one quantum above the floor, with
/// turning points found by bisection and a dense trapezoid rule.
pub fn wkb_action_dense(dx: f64, dy: f64, chi: f64, points: usize) -> f64 {
    let excess = |x: f64| double_potential_direct(x, dy, dx, dy, chi) - 1.0 / chi - 1.0;
    let xm = (dx * dx - dy * dy).sqrt();
    // the excess rises monotonically from the minimum towards x = 0
    let xa = bisect(excess, -xm, 0.0);
    let xb = bisect(excess, 0.0, xm);
    trapezoid(|x| (2.0 * excess(x)).max(0.0).sqrt(), xa, xb, points)
}

/// Clamped-clamped beam Y·M_I·φ'''' = q on [0, L] by finite differences;
/// returns φ at the nodes 0..=n.
///
/// The ghost node outside each clamp is eliminated with the fourth-order
/// one-sided slope φ'(0) ≈ (−3φ₋₁ − 10φ₀ + 18φ₁ − 6φ₂ + φ₃)/12h = 0, so the
/// scheme reproduces quartic solutions up to rounding.
pub fn clamped_beam_fd(stiffness: f64, load: f64, length: f64, n: usize) -> Vec<f64> {
    let h = length / n as f64;
    // unknowns φ_1..φ_{n-1}; φ_0 = φ_n = 0, φ₋₁ = 6φ₁ − 2φ₂ + φ₃/3
    let m = n - 1;
    let mut bands = vec![[1.0, -4.0, 6.0, -4.0, 1.0]; m];
    bands[0] = [0.0, 0.0, 12.0, -6.0, 4.0 / 3.0];
    bands[m - 1] = [4.0 / 3.0, -6.0, 12.0, 0.0, 0.0];
    let rhs = vec![load * h.powi(4) / stiffness; m];
    let inner = solve_pentadiagonal(bands, rhs);
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    out.extend(inner);
    out.push(0.0);
    out
}

/// Gaussian elimination without pivoting on a banded
/// pentadiagonal system; `bands[i]` holds columns i-2..=i+2.
fn solve_pentadiagonal(mut a: Vec<[f64; 5]>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let pivot = a[k][2];
        for r in 1..=2 {
            let i = k + r;
            if i >= n {
                break;
            }
            // element (i, k) sits at band index 2 - r
            let factor = a[i][2 - r] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in 0..=2 {
                let j = k + c;
                if j >= n {
                    break;
                }
                let band = 2 + j - i;
                a[i][band] -= factor * a[k][2 + c];
            }
            b[i] -= factor * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in 1..=2 {
            if k + c < n {
                s -= a[k][2 + c] * x[k + c];
            }
        }
        x[k] = s / a[k][2];
    }
    x
}

pub fn clamped_beam_midpoint(stiffness: f64, load: f64, length: f64) -> f64 {
    clamped_beam_fd(stiffness, load, length, 200)[100]
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}
