//! Brute-force reference values built from Bloch-vector formulas only.
//!
//! Amplitude damping with amplitude `h` sends the Bloch vector
//! `(x, y, z)` to `(h x, h y, h^2 (1 + z) - 1)`, and the trace distance of two
//! qubit states is half the Euclidean distance of their Bloch vectors. Every
//! objective is invariant under rotations about z, so searches are confined
//! to the x-z half plane.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Survival amplitude for `gamma0 = lambda = 2`.
pub fn amp_resonant(t: f64) -> f64 {
    (-t).exp() * (t.cos() + t.sin())
}

/// Survival amplitude for any parameters, from the real or complex
/// exponential solution of `G'' + lambda G' + (gamma0 lambda / 2) G = 0`.
pub fn amp(t: f64, gamma0: f64, lambda: f64) -> f64 {
    // Roots of s^2 + lambda s + gamma0 lambda / 2.
    let disc = lambda * lambda - 2.0 * gamma0 * lambda;
    if disc > 0.0 {
        let r = disc.sqrt();
        let (s1, s2) = (0.5 * (-lambda + r), 0.5 * (-lambda - r));
        // G(0) = 1, G'(0) = 0.
        let c1 = -s2 / (s1 - s2);
        let c2 = s1 / (s1 - s2);
        c1 * (s1 * t).exp() + c2 * (s2 * t).exp()
    } else {
        let w = 0.5 * (-disc).sqrt();
        let a = -0.5 * lambda;
        (a * t).exp() * ((w * t).cos() - a / w * (w * t).sin())
    }
}

pub fn damp(h: f64, [x, y, z]: [f64; 3]) -> [f64; 3] {
    [h * x, h * y, h * h * (1.0 + z) - 1.0]
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn half_plane(theta: f64, r: f64) -> [f64; 3] {
    [r * theta.sin(), 0.0, r * theta.cos()]
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// Distance increase over `[t, t+tau]`, maximized over pairs of pure states
/// on a `n x n` grid of polar angles in the full x-z circle.
pub fn p_indivisibility(h_start: f64, h_end: f64, n: usize) -> f64 {
    let circle: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            [a.sin(), 0.0, a.cos()]
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    for &u in &circle {
        for &v in &circle {
            let inc = dist(damp(h_end, u), damp(h_end, v)) - dist(damp(h_start, u), damp(h_start, v));
            best = best.max(inc);
        }
    }
    best.max(0.0)
}

/// Max over states in the half disc of the min over a dense `gamma0` grid.
pub fn nm1(
    h_start: f64,
    g: f64,
    family_ratios: &[f64],
    n_theta: usize,
    n_r: usize,
) -> f64 {
    let mut best: f64 = 0.0;
    for theta in linspace(0.0, PI, n_theta) {
        for r in linspace(0.0, 1.0, n_r) {
            let evolved = damp(h_start, half_plane(theta, r));
            let target = damp(g, evolved);
            let inner = family_ratios
                .iter()
                .map(|&gk| dist(target, damp(gk, evolved)))
                .fold(f64::INFINITY, f64::min);
            best = best.max(inner);
        }
    }
    best
}

/// Half trace norm of the difference of two Choi states, from the spectrum
/// of the difference: `{a, -a}` on the `|ee>, |ge>` diagonal and the
/// `|ee>-|gg>` block `[[a, b], [b, 0]]`, with `a = (g^2 - k^2)/2`,
/// `b = (g - k)/2`.
pub fn choi_distance(g: f64, k: f64) -> f64 {
    let a = 0.5 * (g * g - k * k);
    let b = 0.5 * (g - k);
    let block = (a * a + 4.0 * b * b).sqrt();
    // Block eigenvalues (a +- block)/2 have opposite signs.
    0.5 * (a.abs() + block)
}

pub fn nm2(g: f64, family_ratios: &[f64]) -> f64 {
    family_ratios
        .iter()
        .map(|&k| choi_distance(g, k))
        .fold(f64::INFINITY, f64::min)
}

/// Max over member pairs and pure state pairs (the objective is convex in
/// each state) on an `n x n` grid of x-z circle angles.
pub fn diameter(amplitudes: &[f64], n: usize) -> f64 {
    let circle: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            [a.sin(), 0.0, a.cos()]
        })
        .collect();
    let mut best: f64 = 0.0;
    for (i, &hi) in amplitudes.iter().enumerate() {
        let left: Vec<[f64; 3]> = circle.iter().map(|&u| damp(hi, u)).collect();
        for &hj in &amplitudes[i..] {
            let right: Vec<[f64; 3]> = circle.iter().map(|&u| damp(hj, u)).collect();
            for &u in &left {
                for &v in &right {
                    best = best.max(dist(u, v));
                }
            }
        }
    }
    best
}

/// Dense `gamma0` grid over `[lo, hi]` mapped to interval ratios.
pub fn family_ratios(lambda: f64, lo: f64, hi: f64, n: usize, t: f64, tau: f64) -> Vec<f64> {
    linspace(lo, hi, n)
        .map(|g0| amp(t + tau, g0, lambda) / amp(t, g0, lambda))
        .collect()
}
