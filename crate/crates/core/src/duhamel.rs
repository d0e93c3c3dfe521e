//! The Duhamel operator, the weight system and the Picard solver.
//!
//! At μ = 2 the transformed problem is equivalent to the integral equation
//! u = ε u_L + L(|u|^p) with
//!
//! ```text
//! L(F)(x,t) = (1/2π) ∫₀ᵗ (t−τ)/(1+τ)^{p−1} dτ ∫_{|ξ|≤1} F(x+(t−τ)ξ, τ)/√(1−|ξ|²) dξ.
//! ```
//!
//! Solutions are controlled in weighted sup norms ‖V‖_i = sup w_i |V| built
//! from the cone coordinates τ₊ = (t+r+2k)/k, τ₋ = (t−r+2k)/k. This module
//! provides:
//!
//! * the weights w₁, w₂, w₃ and the grid sup norms;
//! * the growth factors D₁(T), D_{2,ν}(T) entering the a-priori estimates
//!   ‖L(|V|^p)‖₁ ≤ C k² ‖V‖₁^p D₁(T) and the mixed ‖·‖₂/‖·‖₃ variant;
//! * two independent evaluation paths for L — the nonsingular disc form
//!   above (primary) and the classical radial decomposition L₁ + L₂
//!   whose inner ρ-integral carries inverse-square-root endpoints;
//! * empirical ratio probes for the a-priori estimates;
//! * the Picard iteration u_{j+1} = ε u_L + L(|u_j|^p) with its contraction
//!   trace.

use crate::exponents::{gamma, ModelParams};
use crate::field::SpaceTimeField;
use crate::initial_data::DataProfile;
use crate::kernel::{disc_band_integral, free_solution, SphericalMeanQuadrature};
use crate::quad::{adaptive_endpoint, integrate_gl, simpson};
use crate::rational::Ratio;
use crate::{Error, Result};
use rayon::prelude::*;

/// τ₊(r,t) = (t + r + 2k)/k.
pub fn tau_plus(r: f64, t: f64, k: f64) -> f64 {
    (t + r + 2.0 * k) / k
}

/// τ₋(r,t) = (t − r + 2k)/k.
pub fn tau_minus(r: f64, t: f64, k: f64) -> f64 {
    (t - r + 2.0 * k) / k
}

/// Which of the three weights a [`WeightSpec`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightIndex {
    W1,
    W2,
    W3,
}

/// A weight w_i together with the p-derived exponents of w₂.
///
/// The exponents are fixed by exact rational comparison of p against 5/3
/// and 2, because p₃ and p₄ switch on only at those precise values:
/// p₁ = min{(3p−4)/2, 1/2}, p₂ = max{0, (3p−5)/2}, p₃ = [p = 5/3],
/// p₄ = [p = 2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    index: WeightIndex,
    k: f64,
    p: Ratio,
    p1: f64,
    p2: f64,
    p3: bool,
    p4: bool,
}

fn five_thirds() -> Ratio {
    Ratio::new(5, 3)
}

fn ratio_two() -> Ratio {
    Ratio::from(2)
}

impl WeightSpec {
    pub fn new(index: WeightIndex, k: f64, p: Ratio) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::InvalidParameter("weights need k >= 1".into()));
        }
        if p <= Ratio::from(1) || p > ratio_two() {
            return Err(Error::InvalidParameter(
                "weight exponents are defined for 1 < p <= 2".into(),
            ));
        }
        let pf = p.to_f64();
        Ok(WeightSpec {
            index,
            k,
            p,
            p1: if p <= five_thirds() {
                (3.0 * pf - 4.0) / 2.0
            } else {
                0.5
            },
            p2: if p <= five_thirds() {
                0.0
            } else {
                (3.0 * pf - 5.0) / 2.0
            },
            p3: p == five_thirds(),
            p4: p == ratio_two(),
        })
    }

    pub fn index(&self) -> WeightIndex {
        self.index
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn p(&self) -> Ratio {
        self.p
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn p3(&self) -> bool {
        self.p3
    }

    pub fn p4(&self) -> bool {
        self.p4
    }

    /// Evaluates the weight at (r, t).
    ///
    /// w₂ goes through its piecewise reciprocal closed form, which avoids
    /// the 0·∞ products the raw definition produces at p ∈ {5/3, 2}:
    ///
    /// ```text
    /// w₂⁻¹ = τ₊^{(4−3p)/2}                 (1 < p < 5/3)
    ///      = τ₊^{−1/2} log(2 τ₊/τ₋)        (p = 5/3)
    ///      = τ₊^{−1/2} τ₋^{(5−3p)/2}       (5/3 < p < 2)
    ///      = τ₊^{−1/2} τ₋^{−1/2} log τ₋    (p = 2)
    /// ```
    pub fn weight(&self, r: f64, t: f64) -> f64 {
        let tp = tau_plus(r, t, self.k);
        let tm = tau_minus(r, t, self.k);
        match self.index {
            WeightIndex::W1 => tp.sqrt() * tm.sqrt(),
            WeightIndex::W3 => tp.sqrt() * tm.powf(1.5),
            WeightIndex::W2 => {
                let pf = self.p.to_f64();
                let reciprocal = if self.p < five_thirds() {
                    tp.powf((4.0 - 3.0 * pf) / 2.0)
                } else if self.p3 {
                    (2.0 * tp / tm).ln() / tp.sqrt()
                } else if self.p < ratio_two() {
                    tm.powf((5.0 - 3.0 * pf) / 2.0) / tp.sqrt()
                } else {
                    tm.ln() / (tp.sqrt() * tm.sqrt())
                };
                1.0 / reciprocal
            }
        }
    }
}

/// Grid sup of w_i |V| (the discrete stand-in for the continuum sup norm).
///
/// Exact zeros of V contribute nothing even where the weight diverges
/// (w₂ blows up on the cone boundary at p = 2, where admissible fields
/// vanish anyway).
pub fn weighted_norm(v: &SpaceTimeField, spec: &WeightSpec) -> Result<f64> {
    if v.nr() == 0 || v.nt() == 0 {
        return Err(Error::InvalidParameter("empty field".into()));
    }
    let mut m: f64 = 0.0;
    for n in 0..v.nt() {
        let t = v.t(n);
        for i in 0..v.nr() {
            let val = v.value(i, n);
            if val != 0.0 {
                m = m.max(spec.weight(v.r(i), t) * val.abs());
            }
        }
    }
    Ok(m)
}

/// T_k = (T + 3k)/k (always ≥ 3).
pub fn t_cone(t: f64, k: f64) -> f64 {
    (t + 3.0 * k) / k
}

/// The free constant δ of the mixed growth factors, pinned to
/// min{1/(2p), 0.1}; any choice with 0 < δν < 1 for ν ≤ p is admissible.
pub fn mixed_delta(p: Ratio) -> f64 {
    (1.0 / (2.0 * p.to_f64())).min(0.1)
}

/// D₁(T): T_k^{4−2p} below the critical power, (log T_k)² at p = 2.
pub fn d1_factor(p: Ratio, t: f64, k: f64) -> Result<f64> {
    if p <= Ratio::from(1) || p > ratio_two() {
        return Err(Error::InvalidParameter("D1 needs 1 < p <= 2".into()));
    }
    let tk = t_cone(t, k);
    Ok(if p < ratio_two() {
        tk.powf(4.0 - 2.0 * p.to_f64())
    } else {
        tk.ln().powi(2)
    })
}

/// Exponent slot ν of the mixed a-priori estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nu {
    Zero,
    PMinusOne,
    One,
    P,
}

impl Nu {
    pub fn value(self, p: f64) -> f64 {
        match self {
            Nu::Zero => 0.0,
            Nu::PMinusOne => p - 1.0,
            Nu::One => 1.0,
            Nu::P => p,
        }
    }
}

/// D_{2,ν}(T) for ν ∈ {0, p−1, 1, p}.
pub fn d2_factor(p: Ratio, nu: Nu, t: f64, k: f64) -> Result<f64> {
    if p <= Ratio::from(1) || p > ratio_two() {
        return Err(Error::InvalidParameter("D2 needs 1 < p <= 2".into()));
    }
    let pf = p.to_f64();
    let tk = t_cone(t, k);
    let delta = mixed_delta(p);
    let p3 = if p == five_thirds() { 1.0 } else { 0.0 };
    Ok(match nu {
        Nu::P => {
            if p < ratio_two() {
                tk.powf(gamma(pf, 4.0) / 2.0)
            } else {
                tk.ln().powi(3)
            }
        }
        Nu::Zero | Nu::PMinusOne | Nu::One => {
            if p <= five_thirds() {
                let nv = nu.value(pf);
                let exponent = if matches!(nu, Nu::One) {
                    5.0 - 3.0 * pf + delta * nv * p3
                } else {
                    nv * (5.0 - 3.0 * pf) / 2.0 + delta * nv * p3
                };
                tk.powf(exponent)
            } else {
                1.0
            }
        }
    })
}

/// All growth factors of a parameter point in one record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFactors {
    pub t_k: f64,
    pub d1: f64,
    pub d2_zero: f64,
    pub d2_p_minus_one: f64,
    pub d2_one: f64,
    pub d2_p: f64,
    /// The δ the mixed factors were evaluated with.
    pub delta: f64,
}

impl GrowthFactors {
    pub fn compute(p: Ratio, t: f64, k: f64) -> Result<Self> {
        Ok(GrowthFactors {
            t_k: t_cone(t, k),
            d1: d1_factor(p, t, k)?,
            d2_zero: d2_factor(p, Nu::Zero, t, k)?,
            d2_p_minus_one: d2_factor(p, Nu::PMinusOne, t, k)?,
            d2_one: d2_factor(p, Nu::One, t, k)?,
            d2_p: d2_factor(p, Nu::P, t, k)?,
            delta: mixed_delta(p),
        })
    }
}

/// Node configuration for the disc form of L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DuhamelQuadrature {
    /// Simpson panels for the outer τ integral.
    pub tau_panels: usize,
    /// Disc quadrature for the inner spherical average.
    pub disc: SphericalMeanQuadrature,
}

impl Default for DuhamelQuadrature {
    fn default() -> Self {
        DuhamelQuadrature {
            tau_panels: 24,
            disc: SphericalMeanQuadrature {
                radial_panels: 16,
                angular_panels: 16,
                ..Default::default()
            },
        }
    }
}

impl DuhamelQuadrature {
    pub fn refined(&self, factor: usize) -> Self {
        DuhamelQuadrature {
            tau_panels: self.tau_panels * factor,
            disc: self.disc.refined(factor),
        }
    }
}

/// L(F)(r,t) through the disc form, for a radial source F(ρ, τ) supported in
/// the cone ρ ≤ τ + k. This is the nonsingular primary path: the substitution
/// |ξ| = sin σ inside the disc integral removes the weight.
pub fn eval_l_disc(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    k: f64,
    p: f64,
    r: f64,
    t: f64,
    q: &DuhamelQuadrature,
) -> f64 {
    if t <= 0.0 || r > t + k {
        return 0.0;
    }
    let integrand = |tau: f64| {
        let weight = (t - tau) * (1.0 + tau).powf(1.0 - p);
        if weight == 0.0 {
            return 0.0;
        }
        let band = disc_band_integral(tau + k, r, t - tau, &q.disc, &|rho, _, _| f(rho, tau));
        weight * band
    };
    simpson(integrand, 0.0, t, q.tau_panels) / (2.0 * std::f64::consts::PI)
}

/// Applies L to a gridded source field, evaluating on the same grid.
///
/// Output points are independent, so time slices are computed in parallel;
/// assembly preserves index order, keeping results deterministic.
pub fn apply_l(field: &SpaceTimeField, p: f64, q: &DuhamelQuadrature) -> Result<SpaceTimeField> {
    if !field.support_ok() {
        return Err(Error::InvalidParameter(
            "source field violates the cone support condition".into(),
        ));
    }
    let k = field.k();
    let rows: Vec<Vec<f64>> = (0..field.nt())
        .into_par_iter()
        .map(|n| {
            let t = field.t(n);
            (0..field.nr())
                .map(|i| eval_l_disc(&|rho, tau| field.eval(rho, tau), k, p, field.r(i), t, q))
                .collect()
        })
        .collect();
    let mut out = SpaceTimeField::zeros(k, field.dr(), field.dt(), field.nr(), field.nt())?;
    for (n, row) in rows.into_iter().enumerate() {
        for (i, v) in row.into_iter().enumerate() {
            out.set_value(i, n, v);
        }
    }
    Ok(out)
}

/// Node configuration for the L₁ + L₂ kernel path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelPathQuadrature {
    /// Gauss nodes per τ segment.
    pub tau_nodes: usize,
    /// Geometric refinement levels of the λ integrals.
    pub lambda_levels: usize,
    /// Geometric refinement levels of the singular ρ integrals.
    pub rho_levels: usize,
}

impl Default for KernelPathQuadrature {
    fn default() -> Self {
        KernelPathQuadrature {
            tau_nodes: 48,
            lambda_levels: 12,
            rho_levels: 12,
        }
    }
}

/// h(λ, ρ; r) = {(ρ² − (λ−r)²)((λ+r)² − ρ²)}^{−1/2}.
fn kernel_h(lambda: f64, rho: f64, r: f64) -> f64 {
    let a = rho * rho - (lambda - r) * (lambda - r);
    let b = (lambda + r) * (lambda + r) - rho * rho;
    1.0 / (a * b).sqrt()
}

/// The complete inner integral ∫_{|λ−r|}^{λ+r} ρ h(λ,ρ;r) dρ, which equals
/// B(1/2, 1/2) = π/2 for every admissible (λ, r). Computed by the endpoint-
/// refined rule, so it doubles as a check of the singular quadrature.
pub fn rho_integral_complete(lambda: f64, r: f64, q: &KernelPathQuadrature) -> f64 {
    let lo = (lambda - r).abs();
    let hi = lambda + r;
    adaptive_endpoint(
        |rho| rho * kernel_h(lambda, rho, r),
        lo,
        hi,
        true,
        true,
        q.rho_levels.max(16),
    )
}

/// ∫_{|λ−r|}^{upper} ρ h(λ,ρ;r)/√(tp² − ρ²) dρ with tp = t − τ.
fn rho_integral_weighted(lambda: f64, r: f64, tp: f64, upper: f64, q: &KernelPathQuadrature) -> f64 {
    let lo = (lambda - r).abs();
    if upper <= lo {
        return 0.0;
    }
    adaptive_endpoint(
        |rho| {
            let root = (tp * tp - rho * rho).max(0.0).sqrt();
            if root == 0.0 {
                return 0.0;
            }
            rho * kernel_h(lambda, rho, r) / root
        },
        lo,
        upper,
        true,
        true,
        q.rho_levels,
    )
}

/// L(Ψ)(r,t) via the radial decomposition L₁ + L₂:
///
/// ```text
/// L₁ = (2/π) ∫₀ᵗ (1+τ)^{−(p−1)} dτ ∫_{|t−r−τ|}^{t+r−τ} λΨ dλ ∫_{|λ−r|}^{t−τ} ρh dρ/√((t−τ)²−ρ²)
/// L₂ = (2/π) ∫₀^{(t−r)₊} (1+τ)^{−(p−1)} dτ ∫₀^{t−r−τ} λΨ dλ ∫_{|λ−r|}^{λ+r} ρh dρ/√((t−τ)²−ρ²)
/// ```
///
/// The decomposition is an identity with the disc form for radial sources at
/// r > 0; on the axis the ρ-interval [|λ−r|, λ+r] collapses and the formula
/// degenerates, so evaluate near-axis points at small positive r instead.
/// It exists here as the independent evaluation path. Near-cone λ endpoints
/// produce integrable spikes of the inner integral, absorbed by the
/// endpoint-refined panels.
pub fn eval_l_kernel(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    p: f64,
    r: f64,
    t: f64,
    q: &KernelPathQuadrature,
) -> f64 {
    if r <= 0.0 {
        return f64::NAN; // formula is singular on the axis
    }
    if t <= 0.0 {
        return 0.0;
    }
    let l1_tau = |tau: f64| {
        let tp = t - tau;
        let lam_lo = (t - r - tau).abs();
        let lam_hi = t + r - tau;
        if lam_hi <= lam_lo {
            return 0.0;
        }
        let inner =
            |lambda: f64| lambda * f(lambda, tau) * rho_integral_weighted(lambda, r, tp, tp, q);
        (1.0 + tau).powf(1.0 - p)
            * adaptive_endpoint(inner, lam_lo, lam_hi, true, true, q.lambda_levels)
    };
    // The λ lower limit |t−r−τ| kinks at τ = t−r; integrate each side.
    let split = (t - r).clamp(0.0, t);
    let mut l1 = integrate_gl(l1_tau, 0.0, split, q.tau_nodes);
    l1 += integrate_gl(l1_tau, split, t, q.tau_nodes);

    let mut l2 = 0.0;
    if t > r {
        let l2_tau = |tau: f64| {
            let tp = t - tau;
            let lam_hi = t - r - tau;
            if lam_hi <= 0.0 {
                return 0.0;
            }
            let inner = |lambda: f64| {
                lambda * f(lambda, tau) * rho_integral_weighted(lambda, r, tp, lambda + r, q)
            };
            (1.0 + tau).powf(1.0 - p)
                * adaptive_endpoint(inner, 0.0, lam_hi, false, true, q.lambda_levels)
        };
        l2 = integrate_gl(l2_tau, 0.0, t - r, q.tau_nodes);
    }
    (l1 + l2) * 2.0 / std::f64::consts::PI
}

/// Samples ε·u_L on a grid (the inhomogeneous term of the integral equation).
pub fn free_solution_field(
    profile: &DataProfile,
    amplitude: f64,
    dr: f64,
    dt: f64,
    t_end: f64,
    qs: &SphericalMeanQuadrature,
) -> Result<SpaceTimeField> {
    let k = profile.support_radius();
    let nt = (t_end / dt).round() as usize + 1;
    let nr = (((nt - 1) as f64 * dt + k) / dr).ceil() as usize + 2;
    let rows: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|n| {
            let t = dt * n as f64;
            (0..nr)
                .map(|i| {
                    let r = dr * i as f64;
                    if r > t + k {
                        0.0
                    } else {
                        amplitude * free_solution(profile, r, t, qs).unwrap_or(f64::NAN)
                    }
                })
                .collect()
        })
        .collect();
    let mut out = SpaceTimeField::zeros(k, dr, dt, nr, nt)?;
    for (n, row) in rows.into_iter().enumerate() {
        for (i, v) in row.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(
                    "free solution produced a non-finite sample".into(),
                ));
            }
            out.set_value(i, n, v);
        }
    }
    Ok(out)
}

/// Grid and stopping parameters of the Picard iteration.
#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    pub dr: f64,
    pub dt: f64,
    pub max_iter: usize,
    /// Relative tolerance on ‖u_{j+1} − u_j‖₁ against ‖u_j‖₁.
    pub tol: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            dr: 1.0 / 16.0,
            dt: 1.0 / 16.0,
            max_iter: 25,
            tol: 1e-8,
        }
    }
}

/// Outcome of [`picard_solve`] with its contraction trace.
#[derive(Debug, Clone)]
pub struct PicardResult {
    pub field: SpaceTimeField,
    pub u0: SpaceTimeField,
    /// ‖u_{j+1} − u_j‖₁ per iteration.
    pub diffs: Vec<f64>,
    /// Successive-difference ratios ‖Δ_{j+1}‖/‖Δ_j‖.
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Three consecutive expanding iterations were observed. Not an error:
    /// divergence of the iteration is data for the blow-up side.
    pub diverged: bool,
}

/// Runs u₀ = ε u_L, u_{j+1} = ε u_L + L(|u_j|^p) on a grid up to `t_end`.
pub fn picard_solve(
    profile: &DataProfile,
    params: &ModelParams,
    epsilon: f64,
    t_end: f64,
    opts: &PicardOptions,
    q: &DuhamelQuadrature,
    qs: &SphericalMeanQuadrature,
) -> Result<PicardResult> {
    if params.mu != Ratio::from(2) {
        return Err(Error::InvalidParameter(
            "the integral-equation kernel is the μ = 2 reduction".into(),
        ));
    }
    if epsilon < 0.0 {
        return Err(Error::InvalidParameter("epsilon must be >= 0".into()));
    }
    let p = params.p_f64();
    let w1 = WeightSpec::new(WeightIndex::W1, profile.support_radius(), params.p)?;
    let u0 = free_solution_field(profile, epsilon, opts.dr, opts.dt, t_end, qs)?;

    let mut u = u0.clone();
    let mut diffs = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    let mut expanding = 0usize;
    let mut iterations = 0usize;

    for _ in 0..opts.max_iter {
        iterations += 1;
        let source = u.map(|v| v.abs().powf(p));
        let correction = apply_l(&source, p, q)?;
        let next = u0.zip_map(&correction, |a, b| a + b)?;
        let diff_field = next.zip_map(&u, |a, b| a - b)?;
        let diff = weighted_norm(&diff_field, &w1)?;
        if let Some(&prev) = diffs.last() {
            if prev > 0.0 {
                let ratio = diff / prev;
                ratios.push(ratio);
                expanding = if ratio > 1.0 { expanding + 1 } else { 0 };
            }
        }
        diffs.push(diff);
        let norm_u = weighted_norm(&u, &w1)?;
        u = next;
        if diff <= opts.tol * norm_u || (diff == 0.0 && norm_u == 0.0) {
            converged = true;
            break;
        }
        if expanding >= 3 {
            diverged = true;
            break;
        }
    }

    Ok(PicardResult {
        field: u,
        u0,
        diffs,
        ratios,
        iterations,
        converged,
        diverged,
    })
}

/// Strides at which the sup of an L-image is sampled in the ratio probes.
#[derive(Debug, Clone, Copy)]
pub struct SupSample {
    pub stride_t: usize,
    pub stride_r: usize,
}

impl SupSample {
    /// Strides that keep roughly `target` sample points per direction.
    pub fn for_field(v: &SpaceTimeField, target: usize) -> Self {
        SupSample {
            stride_t: (v.nt() / target.max(1)).max(1),
            stride_r: (v.nr() / target.max(1)).max(1),
        }
    }
}

fn sup_weighted_l(
    source: &SpaceTimeField,
    weight: &WeightSpec,
    p: f64,
    sample: SupSample,
    q: &DuhamelQuadrature,
) -> f64 {
    let k = source.k();
    let points: Vec<(usize, usize)> = (0..source.nt())
        .step_by(sample.stride_t)
        .flat_map(|n| (0..source.nr()).step_by(sample.stride_r).map(move |i| (i, n)))
        .collect();
    points
        .par_iter()
        .map(|&(i, n)| {
            let r = source.r(i);
            let t = source.t(n);
            if r > t + k {
                return 0.0;
            }
            let lv = eval_l_disc(&|rho, tau| source.eval(rho, tau), k, p, r, t, q);
            if lv == 0.0 {
                0.0
            } else {
                weight.weight(r, t) * lv.abs()
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// Empirical probe of the basic a-priori estimate: returns
/// ‖L(|V|^p)‖₁ / (k² ‖V‖₁^p D₁(T)), with T the field horizon and the sup of
/// the L-image sampled at the given strides. Boundedness of this ratio
/// across horizons is the observable content of the estimate.
pub fn apriori_ratio(
    v: &SpaceTimeField,
    p: Ratio,
    sample: SupSample,
    q: &DuhamelQuadrature,
) -> Result<f64> {
    let k = v.k();
    let t = v.t_end();
    let w1 = WeightSpec::new(WeightIndex::W1, k, p)?;
    let norm_v = weighted_norm(v, &w1)?;
    if norm_v == 0.0 {
        return Err(Error::InvalidParameter(
            "a-priori ratio needs a nonzero field".into(),
        ));
    }
    let pf = p.to_f64();
    let source = v.map(|x| x.abs().powf(pf));
    let numerator = sup_weighted_l(&source, &w1, pf, sample, q);
    let denominator = k * k * norm_v.powf(pf) * d1_factor(p, t, k)?;
    Ok(numerator / denominator)
}

/// Mixed-norm variant: ‖L(|V₀|^{p−ν}|V|^ν)‖₂ / (k² ‖V₀‖₃^{p−ν} ‖V‖₂^ν D_{2,ν}(T)).
pub fn apriori_ratio_mixed(
    v0: &SpaceTimeField,
    v: &SpaceTimeField,
    nu: Nu,
    p: Ratio,
    sample: SupSample,
    q: &DuhamelQuadrature,
) -> Result<f64> {
    let k = v.k();
    let t = v.t_end();
    let w2 = WeightSpec::new(WeightIndex::W2, k, p)?;
    let w3 = WeightSpec::new(WeightIndex::W3, k, p)?;
    let pf = p.to_f64();
    let nv = nu.value(pf);
    let norm_v0 = weighted_norm(v0, &w3)?;
    let norm_v = weighted_norm(v, &w2)?;
    if norm_v0 == 0.0 || norm_v == 0.0 {
        return Err(Error::InvalidParameter(
            "a-priori ratio needs nonzero fields".into(),
        ));
    }
    let source = v0.zip_map(v, |a, b| a.abs().powf(pf - nv) * b.abs().powf(nv))?;
    let numerator = sup_weighted_l(&source, &w2, pf, sample, q);
    let denominator = k * k * norm_v0.powf(pf - nv) * norm_v.powf(nv) * d2_factor(p, nu, t, k)?;
    Ok(numerator / denominator)
}
