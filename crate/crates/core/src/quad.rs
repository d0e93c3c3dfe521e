//! Quadrature building blocks shared across the crate.
//!
//! Everything here is deterministic: node sets depend only on the requested
//! counts, so repeated runs produce bit-identical results.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

type NodeTable = HashMap<usize, (Vec<f64>, Vec<f64>)>;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence and cached per node count.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    static CACHE: OnceLock<Mutex<NodeTable>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    cache
        .lock()
        .unwrap()
        .insert(n, (nodes.clone(), weights.clone()));
    (nodes, weights)
}

/// ∫_a^b f dx by an n-point Gauss–Legendre rule.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite Simpson rule with `panels` panels (each panel = 2 subintervals).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 1);
    if a == b {
        return 0.0;
    }
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let c = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += c * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Composite midpoint rule; used as a slower cross-check that never touches
/// interval endpoints (tolerates integrable endpoint singularities).
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 1);
    if a == b {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + h * (i as f64 + 0.5))).sum::<f64>() * h
}

/// Integrates f over [a, b] with geometric panel refinement toward endpoints
/// carrying inverse-square-root (or weaker) singularities.
///
/// Panels shrink by a factor 4 toward each flagged endpoint with an 8-point
/// Gauss rule per panel. The unresolved sliver next to a singular endpoint
/// is closed with the analytic tail of a C/√d profile, where C is probed
/// just outside the sliver; for weaker (logarithmic) singularities the
/// correction degrades gracefully to an overestimate of a negligible mass.
pub fn adaptive_endpoint<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singular_a: bool,
    singular_b: bool,
    levels: usize,
) -> f64 {
    adaptive_endpoint_dyn(&f, a, b, singular_a, singular_b, levels)
}

fn adaptive_endpoint_dyn(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    singular_a: bool,
    singular_b: bool,
    levels: usize,
) -> f64 {
    const RATIO: f64 = 0.25;
    const PANEL_NODES: usize = 16;
    if !(b > a) {
        return 0.0;
    }
    if singular_a && singular_b {
        let mid = 0.5 * (a + b);
        return adaptive_endpoint_dyn(f, a, mid, true, false, levels)
            + adaptive_endpoint_dyn(f, mid, b, false, true, levels);
    }
    if !singular_a && !singular_b {
        return integrate_gl(f, a, b, 2 * PANEL_NODES);
    }
    // One singular endpoint; orient so it sits at `b`.
    let span = b - a;
    let scale = a.abs().max(b.abs()).max(span);
    let mut acc = 0.0;
    let mut outer = 1.0; // distance from the singular end, as a fraction of span
    for _ in 0..levels {
        let inner = outer * RATIO;
        let (lo, hi) = if singular_b {
            (b - span * outer, b - span * inner)
        } else {
            (a + span * inner, a + span * outer)
        };
        if hi - lo <= 16.0 * f64::EPSILON * scale {
            break; // panel width at floating-point resolution; stop refining
        }
        acc += integrate_gl(f, lo, hi, PANEL_NODES);
        outer = inner;
    }
    // Close the remaining sliver of width δ assuming f ≈ C/√d near the
    // singular end: ∫ C/√d over [0, δ] = 2C√δ.
    let delta = span * outer;
    if delta > 0.0 {
        let d_probe = 2.0 * delta;
        let x_probe = if singular_b { b - d_probe } else { a + d_probe };
        let c = f(x_probe) * d_probe.sqrt();
        if c.is_finite() {
            acc += 2.0 * c * delta.sqrt();
        }
    }
    acc
}

/// 2π ∫_0^{r_max} f(r) r dr by the composite trapezoid rule with n panels.
pub fn radial_integral<F: Fn(f64) -> f64>(f: F, r_max: f64, n: usize) -> f64 {
    assert!(n >= 1);
    let h = r_max / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let r = h * i as f64;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * f(r) * r;
    }
    2.0 * std::f64::consts::PI * acc * h
}

/// Radial integral with one Richardson extrapolation step; returns the
/// extrapolated value together with an error estimate.
pub fn radial_integral_refined<F: Fn(f64) -> f64>(f: F, r_max: f64, n: usize) -> (f64, f64) {
    let coarse = radial_integral(&f, r_max, n);
    let fine = radial_integral(&f, r_max, 2 * n);
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    (extrapolated, (fine - coarse).abs() / 3.0)
}
