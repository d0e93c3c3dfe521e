//! Averaged-functional blow-up machinery.
//!
//! The blow-up proofs never look at pointwise solutions: they track the
//! space average F(t) = ∫ u dx, which under the transformed equation obeys
//!
//! ```text
//! F''(t) = (1+t)^{−(p−1)} ∫ |u|^p dx  ≥  π^{−(p−1)} (t+k)^{−3(p−1)} |F|^p,
//! ```
//!
//! the second step by Hölder on the cone cross-section. Kato-type comparison
//! lemmas turn that differential inequality plus a growth floor F ≥ A t^a
//! into an upper bound on the lifespan with exponent dictated by
//! M = (p−1)a/2 − q/2 + 1 > 0. At the critical power the inequality is too
//! weak; the slicing recursions iterate lower bounds on shrinking backward
//! cones and force blow-up through double-exponential growth d_j log^{a_j}.
//!
//! Everything here works on solver output fields or as standalone numerics:
//! the averaged series, the Bessel-weighted functional, the Kato quantities,
//! an event-detecting integrator for the ODE inequality (as an equality),
//! and the slicing sequences in log space.

use crate::exponents::DataClass;
use crate::field::SpaceTimeField;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Discrete time series of F(t) = ∫u dx and of the right-hand side
/// G(t) = (1+t)^{−(p−1)} ∫|u|^p dx (so that F'' = G along solutions).
#[derive(Debug, Clone)]
pub struct FunctionalSeries {
    pub times: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

/// Radial trapezoid of 2π ∫ w(u, r) r dr over one time slice.
fn slice_integral(field: &SpaceTimeField, n: usize, w: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let nr = field.nr();
    for i in 0..nr {
        let r = field.r(i);
        let weight = if i == 0 || i == nr - 1 { 0.5 } else { 1.0 };
        acc += weight * w(field.value(i, n), r) * r;
    }
    2.0 * PI * acc * field.dr()
}

/// Computes F and G from a (u-form) field.
pub fn compute_f(field: &SpaceTimeField, p: f64) -> FunctionalSeries {
    let mut times = Vec::with_capacity(field.nt());
    let mut f = Vec::with_capacity(field.nt());
    let mut g = Vec::with_capacity(field.nt());
    for n in 0..field.nt() {
        let t = field.t(n);
        times.push(t);
        f.push(slice_integral(field, n, |u, _| u));
        g.push(slice_integral(field, n, |u, _| u.abs().powf(p)) / (1.0 + t).powf(p - 1.0));
    }
    FunctionalSeries { times, f, g }
}

/// I₀(x) by the ascending power series Σ (x²/4)^m / (m!)², truncated at
/// relative 1e−14. The series converges for every finite x; the guard keeps
/// arguments inside the overflow-safe desk-scale range.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 500.0 {
        return Err(Error::InvalidParameter(format!(
            "bessel_i0 argument {x} outside the supported range |x| <= 500"
        )));
    }
    let q = x * x / 4.0;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut m = 0.0_f64;
    loop {
        m += 1.0;
        term *= q / (m * m);
        sum += term;
        if term < 1e-14 * sum {
            return Ok(sum);
        }
    }
}

/// φ₁(x) = ∫_{S¹} e^{x·ω} dω = 2π I₀(|x|).
pub fn phi_one(r: f64) -> Result<f64> {
    Ok(2.0 * PI * bessel_i0(r)?)
}

/// The Bessel-weighted functional F₁(t) = e^{−t} ∫ u φ₁ dx.
pub fn compute_f1(field: &SpaceTimeField) -> Result<Vec<f64>> {
    let phi: Vec<f64> = (0..field.nr())
        .map(|i| phi_one(field.r(i)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(field.nt());
    for n in 0..field.nt() {
        let t = field.t(n);
        let mut acc = 0.0;
        for i in 0..field.nr() {
            let weight = if i == 0 || i == field.nr() - 1 { 0.5 } else { 1.0 };
            acc += weight * field.value(i, n) * phi[i] * field.r(i);
        }
        out.push((-t).exp() * 2.0 * PI * acc * field.dr());
    }
    Ok(out)
}

/// Constants of the ODE comparison lemma: F ≥ A t^a for t ≥ T₀ and
/// F'' ≥ B (t+k)^{−q} |F|^p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatoParams {
    pub p: f64,
    pub a: f64,
    pub q: f64,
    pub b: f64,
    /// The floor amplitude A.
    pub a_coef: f64,
    pub t0: f64,
    pub k: f64,
}

/// Derived quantities of the comparison lemma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatoQuantities {
    /// M = (p−1)a/2 − q/2 + 1; the lemma requires M > 0.
    pub m: f64,
    /// The lifespan bound reads T < 2^{2/M} · T₁.
    pub doubling_factor: f64,
}

/// Computes M and the bound factor, rejecting parameters with M ≤ 0.
pub fn kato_quantities(kp: &KatoParams) -> Result<KatoQuantities> {
    let m = 0.5 * (kp.p - 1.0) * kp.a - 0.5 * kp.q + 1.0;
    if !(m > 0.0) {
        return Err(Error::HypothesisMismatch(format!(
            "Kato exponent condition fails: M = {m} <= 0"
        )));
    }
    Ok(KatoQuantities {
        m,
        doubling_factor: 2.0_f64.powf(2.0 / m),
    })
}

/// T₁ = max{T₀, F(0)/F'(0), k} (the variant for F(0) ≥ 0, F'(0) > 0).
pub fn kato_t1(kp: &KatoParams, f0: f64, f0_prime: f64) -> f64 {
    kp.t0.max(f0 / f0_prime).max(kp.k)
}

/// T₂ = max{T₀, t₀, k} where t₀ is a doubling time F(t₀) ≥ 2F(0)
/// (the variant for F(0) > 0, F'(0) = 0).
pub fn kato_t2(kp: &KatoParams, t_doubling: f64) -> f64 {
    kp.t0.max(t_doubling).max(kp.k)
}

/// Result of the blow-up ODE integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeBlowup {
    /// First time |F| crossed 1e12, or None if the horizon was reached.
    pub t_blowup: Option<f64>,
    /// The same from the coarser step scale (the Richardson partner).
    pub t_coarse: Option<f64>,
    /// The two step scales agreed within 1%.
    pub converged: bool,
}

const ODE_THRESHOLD: f64 = 1e12;

/// Integrates F'' = B (t+k)^{−q} |F|^p (the differential inequality taken
/// as an equality) with an adaptive RK4 whose step shrinks as |F| grows,
/// and locates the threshold crossing by bisection inside the final step.
///
/// Two runs at step scales `dt` and `dt/2` provide the convergence check.
#[allow(clippy::too_many_arguments)]
pub fn ode_blowup_time(
    p: f64,
    q: f64,
    b: f64,
    k: f64,
    f0: f64,
    f0_prime: f64,
    dt: f64,
    horizon: f64,
) -> Result<OdeBlowup> {
    if f0 < 0.0 || f0_prime < 0.0 || (f0 == 0.0 && f0_prime == 0.0) {
        return Err(Error::InvalidParameter(
            "initial data must be nonnegative and not both zero".into(),
        ));
    }
    if !(dt > 0.0 && horizon > 0.0 && k > 0.0) {
        return Err(Error::InvalidParameter(
            "step, horizon and k must be positive".into(),
        ));
    }
    let coarse = integrate_ode(p, q, b, k, f0, f0_prime, dt, horizon);
    let fine = integrate_ode(p, q, b, k, f0, f0_prime, dt / 2.0, horizon);
    let converged = match (fine, coarse) {
        (Some(tf), Some(tc)) => (tf - tc).abs() / tf < 0.01,
        (None, None) => true,
        _ => false,
    };
    Ok(OdeBlowup {
        t_blowup: fine,
        t_coarse: coarse,
        converged,
    })
}

fn ode_rhs(p: f64, q: f64, b: f64, k: f64, t: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], b * (t + k).powf(-q) * y[0].abs().powf(p)]
}

fn rk4_step(p: f64, q: f64, b: f64, k: f64, t: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = ode_rhs(p, q, b, k, t, y);
    let k2 = ode_rhs(
        p,
        q,
        b,
        k,
        t + h / 2.0,
        [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]],
    );
    let k3 = ode_rhs(
        p,
        q,
        b,
        k,
        t + h / 2.0,
        [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]],
    );
    let k4 = ode_rhs(p, q, b, k, t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

#[allow(clippy::too_many_arguments)]
fn integrate_ode(
    p: f64,
    q: f64,
    b: f64,
    k: f64,
    f0: f64,
    f0_prime: f64,
    dt_scale: f64,
    horizon: f64,
) -> Option<f64> {
    let scale = f0.max(f0_prime * k).max(1e-300);
    let mut t = 0.0;
    let mut y = [f0, f0_prime];
    while t < horizon {
        // Growth-keyed step: fast dynamics (|F'|/|F| or the stiffness of the
        // source term) shrink it, lazy phases let it stretch to horizon/1e3.
        let rate = y[1].abs() / (y[0].abs() + scale)
            + (b * (t + k).powf(-q) * (y[0].abs() + scale).powf(p - 1.0)).sqrt();
        let h = (0.05 / rate.max(1e-300)).min(horizon / 1e3) * dt_scale.min(1.0)
            + f64::MIN_POSITIVE;
        let h = h.min(horizon - t + h * 1e-9);
        let y_new = rk4_step(p, q, b, k, t, y, h);
        if !y_new[0].is_finite() || y_new[0].abs() > ODE_THRESHOLD {
            // Bisect the crossing inside [t, t+h].
            let (mut lo, mut hi) = (0.0_f64, h);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let ym = rk4_step(p, q, b, k, t, y, mid);
                if !ym[0].is_finite() || ym[0].abs() > ODE_THRESHOLD {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-12 * (t + hi) {
                    break;
                }
            }
            return Some(t + hi);
        }
        y = y_new;
        t += h;
    }
    None
}

/// Which slicing recursion to iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlicingVariant {
    /// d_{j+1} = d_j²/2^{3j+9}, d₀ = E₀ ε (positive-integral critical case).
    CaseA,
    /// d_{j+1} = d_j²/(3·2^{3j+9}), d₀ = E₀ ε² (zero-sum critical case).
    CaseB,
}

/// One step of the slicing iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicingState {
    pub j: u32,
    /// Log exponent a_j (a_{j+1} = 2a_j + 2, closed form 2^{j+1} − 2).
    pub a: u64,
    /// log d_j; the d's themselves underflow almost immediately.
    pub log_d: f64,
    /// Slice threshold multiplier l_j = Σ_{i≤j} 2^{−i} = 2 − 2^{−j}.
    pub l: f64,
}

/// The generated sequence together with the series limit q of
/// d_j ≥ exp(2^j log(d₀ e^q)).
#[derive(Debug, Clone)]
pub struct SlicingSequence {
    pub states: Vec<SlicingState>,
    /// q = −Σ_{m≥1} ((3m+9) log 2 + [case B] log 3) 2^{−m}.
    pub q_limit: f64,
    /// log d₀ of the run.
    pub log_d0: f64,
    /// The lower bound log d_j ≥ 2^j (log d₀ + q) held at every j.
    pub bound_holds: bool,
}

/// Iterates the slicing recursion in log space up to `j_max` (≤ 60 so the
/// integer exponents a_j fit in u64).
pub fn slicing_iterate(
    e0: f64,
    eps: f64,
    j_max: u32,
    variant: SlicingVariant,
) -> Result<SlicingSequence> {
    if !(e0 > 0.0 && eps > 0.0) {
        return Err(Error::InvalidParameter("need E0 > 0 and eps > 0".into()));
    }
    if j_max > 60 {
        return Err(Error::InvalidParameter("j_max must be <= 60".into()));
    }
    let ln2 = std::f64::consts::LN_2;
    let extra = match variant {
        SlicingVariant::CaseA => 0.0,
        SlicingVariant::CaseB => 3.0_f64.ln(),
    };
    let log_d0 = match variant {
        SlicingVariant::CaseA => e0.ln() + eps.ln(),
        SlicingVariant::CaseB => e0.ln() + 2.0 * eps.ln(),
    };

    // q = −Σ ((3m+9) ln2 + extra)/2^m, summed to convergence.
    let mut q_limit = 0.0;
    let mut m = 1.0_f64;
    loop {
        let increment = ((3.0 * m + 9.0) * ln2 + extra) / 2.0_f64.powf(m);
        q_limit -= increment;
        if increment < 1e-15 {
            break;
        }
        m += 1.0;
    }

    let mut states = Vec::with_capacity(j_max as usize + 1);
    let mut a: u64 = 0;
    let mut log_d = log_d0;
    let mut bound_holds = true;
    for j in 0..=j_max {
        let l = 2.0 - 0.5_f64.powi(j as i32);
        let floor = 2.0_f64.powi(j as i32) * (log_d0 + q_limit);
        if log_d < floor - 1e-9 * floor.abs().max(1.0) {
            bound_holds = false;
        }
        states.push(SlicingState { j, a, log_d, l });
        if j < j_max {
            log_d = 2.0 * log_d - (3.0 * j as f64 + 9.0) * ln2 - extra;
            a = 2 * a + 2;
        }
    }
    Ok(SlicingSequence {
        states,
        q_limit,
        log_d0,
        bound_holds,
    })
}

/// Theoretical comparison curve for critical-case sweeps:
/// exp(4B ε^{−1/2}) for nonzero-integral data, exp(4B ε^{−2/3}) for the
/// zero-sum case. Overflow saturates to the +∞ sentinel.
pub fn critical_lifespan_bound(b: f64, eps: f64, class: DataClass) -> Result<f64> {
    if !(b > 0.0 && eps > 0.0) {
        return Err(Error::InvalidParameter("need B > 0 and eps > 0".into()));
    }
    let theta = match class {
        DataClass::NonzeroIntegral => 0.5,
        DataClass::ZeroIntegral => 2.0 / 3.0,
    };
    Ok((4.0 * b * eps.powf(-theta)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{gamma, ModelParams};
    use crate::initial_data::{CaseBSign, DataProfile};
    use crate::rational::Ratio;
    use crate::solver::{run_recorded, transform_to_u};
    use crate::sweep::linear_fit;

    #[test]
    fn f_of_zero_field_vanishes() {
        let z = SpaceTimeField::zeros(1.0, 0.25, 0.25, 25, 9).unwrap();
        let series = compute_f(&z, 2.0);
        assert!(series.f.iter().all(|&x| x == 0.0));
        assert!(series.g.iter().all(|&x| x == 0.0));
        assert!(compute_f1(&z).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn bessel_series_matches_angular_quadrature() {
        // I₀(1) against (1/2π) ∫ e^{cos θ} dθ on 10⁴ nodes.
        let n = 10_000;
        let mut acc = 0.0;
        for i in 0..n {
            let theta = 2.0 * PI * i as f64 / n as f64;
            acc += theta.cos().exp();
        }
        let oracle = acc / n as f64;
        let i0 = bessel_i0(1.0).unwrap();
        assert!((i0 - oracle).abs() < 1e-10, "{i0} vs {oracle}");
        assert!((i0 - 1.2660658).abs() < 1e-7);
        assert!((phi_one(0.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!(bessel_i0(501.0).is_err());
    }

    #[test]
    fn f_series_from_solver_run() {
        // Case A: F(0) = 0, discrete F'(0) = ε ∫g; second difference of F
        // tracks G at second order.
        let profile = DataProfile::case_a(1.0).unwrap();
        let params = ModelParams::new(2, Ratio::from(2), Ratio::from(2), 1.0, 0.1).unwrap();
        let eps = 0.1;
        let mut defect = Vec::new();
        for &n in &[64.0, 128.0] {
            let dr = 1.0 / n;
            let v = run_recorded(&profile, &params, eps, dr, 0.45, 2.0, true, None).unwrap();
            let u = transform_to_u(&v, 2.0);
            let series = compute_f(&u, 2.0);
            let dt = u.dt();
            if n == 64.0 {
                assert!(series.f[0].abs() < 1e-12);
                let fprime0 = (series.f[1] - series.f[0]) / dt;
                assert!(
                    (fprime0 - eps).abs() < 0.02 * eps,
                    "F'(0) = {fprime0}, want ≈ {eps}"
                );
            }
            let mut worst = 0.0_f64;
            for m in 1..series.f.len() - 1 {
                let second = (series.f[m + 1] - 2.0 * series.f[m] + series.f[m - 1]) / (dt * dt);
                worst = worst.max((second - series.g[m]).abs());
            }
            defect.push(worst);
        }
        assert!(
            defect[1] < 0.5 * defect[0],
            "F''−G defect not shrinking: {defect:?}"
        );
    }

    #[test]
    fn f_convexity_and_holder_chain() {
        let profile = DataProfile::case_a(1.0).unwrap();
        let params = ModelParams::new(2, Ratio::from(2), Ratio::new(3, 2), 1.0, 0.2).unwrap();
        let v = run_recorded(&profile, &params, 0.2, 1.0 / 64.0, 0.45, 3.0, true, None).unwrap();
        let u = transform_to_u(&v, 2.0);
        let p = 1.5;
        let series = compute_f(&u, p);
        let dt = u.dt();
        let slack = 1e-3;
        for m in 1..series.f.len() - 1 {
            let second = (series.f[m + 1] - 2.0 * series.f[m] + series.f[m - 1]) / (dt * dt);
            assert!(series.g[m] >= 0.0);
            assert!(second >= -slack, "convexity defect {second} at step {m}");
            // Hölder: G ≥ π^{1−p} (t+k)^{−3(p−1)} |F|^p up to discretization.
            let t = series.times[m];
            let floor = PI.powf(1.0 - p) * (t + 1.0).powf(-3.0 * (p - 1.0))
                * series.f[m].abs().powf(p);
            assert!(
                series.g[m] >= floor - slack,
                "Hoelder chain violated at t = {t}: G = {}, floor = {floor}",
                series.g[m]
            );
        }
    }

    #[test]
    fn f1_positive_on_zero_sum_run() {
        let profile = DataProfile::case_b(1.0, CaseBSign::PosF).unwrap();
        let params = ModelParams::new(2, Ratio::from(2), Ratio::new(3, 2), 1.0, 0.1).unwrap();
        let v = run_recorded(&profile, &params, 0.1, 1.0 / 32.0, 0.45, 3.0, true, None).unwrap();
        let u = transform_to_u(&v, 2.0);
        let f1 = compute_f1(&u).unwrap();
        let dt = u.dt();
        let start = (1.0 / dt).ceil() as usize; // t ≥ k = 1
        for (n, &value) in f1.iter().enumerate().skip(start) {
            assert!(value > 0.0, "F1 not positive at slice {n}");
        }
    }

    #[test]
    fn kato_quantities_match_closed_forms() {
        for &p in &[1.2, 1.5, 1.8] {
            // First instantiation: a = 5−2p, q = 3(p−1) gives M = p(2−p).
            let kp = KatoParams {
                p,
                a: 5.0 - 2.0 * p,
                q: 3.0 * (p - 1.0),
                b: PI.powf(1.0 - p),
                a_coef: 1.0,
                t0: 1.0,
                k: 1.0,
            };
            let kq = kato_quantities(&kp).unwrap();
            assert!((kq.m - p * (2.0 - p)).abs() < 1e-14);

            // Zero-sum instantiation: a = 4−3p/2 gives M = γ(p,4)/4.
            let kp2 = KatoParams {
                a: 4.0 - 1.5 * p,
                ..kp
            };
            let kq2 = kato_quantities(&kp2).unwrap();
            assert!((kq2.m - gamma(p, 4.0) / 4.0).abs() < 1e-14);
        }
        // p = 2, a = 1, q = 3 sits exactly on the M = 0 boundary.
        let bad = KatoParams {
            p: 2.0,
            a: 1.0,
            q: 3.0,
            b: 1.0,
            a_coef: 1.0,
            t0: 1.0,
            k: 1.0,
        };
        assert!(kato_quantities(&bad).is_err());
        assert!((kato_t1(&bad, 0.5, 0.1) - 5.0).abs() < 1e-15);
        assert!((kato_t2(&bad, 7.0) - 7.0).abs() < 1e-15);
    }

    #[test]
    fn kato_m_value_at_p_three_halves() {
        let kp = KatoParams {
            p: 1.5,
            a: 5.0 - 2.0 * 1.5,
            q: 3.0 * 0.5,
            b: 1.0,
            a_coef: 1.0,
            t0: 1.0,
            k: 1.0,
        };
        assert!((kato_quantities(&kp).unwrap().m - 0.75).abs() < 1e-15);
        let kp2 = KatoParams {
            a: 4.0 - 1.5 * 1.5,
            ..kp
        };
        assert!((kato_quantities(&kp2).unwrap().m - 0.6875).abs() < 1e-15);
    }

    #[test]
    fn ode_survives_without_source() {
        let out = ode_blowup_time(2.0, 3.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1e6).unwrap();
        assert_eq!(out.t_blowup, None);
        assert!(out.converged);
    }

    #[test]
    fn ode_blowup_decreasing_in_amplitude() {
        // p = 2, q = 3 is the critical pair: T grows like exp(c/ε), so the
        // ladder stays at order-one amplitudes to keep runs finite.
        let mut prev = f64::INFINITY;
        for &eps in &[0.5, 0.7, 1.0, 1.4, 2.0] {
            let out = ode_blowup_time(2.0, 3.0, 1.0 / PI, 1.0, 0.0, eps, 1.0, 1e8).unwrap();
            let t = out.t_blowup.expect("should blow up");
            assert!(out.converged, "not converged at eps = {eps}");
            assert!(t < prev, "blow-up time not decreasing at eps = {eps}");
            prev = t;
        }
        // Doubling F'(0) strictly decreases the blow-up time.
        let t1 = ode_blowup_time(2.0, 3.0, 1.0 / PI, 1.0, 0.0, 0.5, 1.0, 1e8)
            .unwrap()
            .t_blowup
            .unwrap();
        let t2 = ode_blowup_time(2.0, 3.0, 1.0 / PI, 1.0, 0.0, 1.0, 1.0, 1e8)
            .unwrap()
            .t_blowup
            .unwrap();
        assert!(t2 < t1);
    }

    #[test]
    fn ode_scaling_exponent_emerges() {
        // p = 1.5, q = 3(p−1): slope of log T against log ε approaches
        // −(p−1)/(4−2p) = −1/2, and is stable under step refinement.
        let p = 1.5;
        let q = 3.0 * (p - 1.0);
        let b = PI.powf(1.0 - p);
        let fit_for = |dt: f64| {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let mut eps = 1e-4;
            for _ in 0..8 {
                let out = ode_blowup_time(p, q, b, 1.0, 0.0, eps, dt, 1e12).unwrap();
                xs.push(eps.ln());
                ys.push(out.t_blowup.expect("blow-up expected").ln());
                eps *= 2.0;
            }
            linear_fit(&xs, &ys).0
        };
        let slope = fit_for(1.0);
        let slope_fine = fit_for(0.5);
        assert!(
            (slope - slope_fine).abs() / slope.abs() < 0.02,
            "slope not resolution-stable: {slope} vs {slope_fine}"
        );
        assert!(
            (slope + 0.5).abs() < 0.05,
            "emergent exponent {slope} too far from -1/2"
        );
    }

    #[test]
    fn slicing_closed_forms() {
        let seq = slicing_iterate(1.0, 0.5, 30, SlicingVariant::CaseA).unwrap();
        for s in &seq.states {
            assert_eq!(s.a, (1u64 << (s.j + 1)) - 2, "a_j wrong at j = {}", s.j);
        }
        assert_eq!(seq.states[3].a, 14);
        let l5 = seq.states[5].l;
        assert!((l5 - 63.0 / 32.0).abs() < 1e-15);
        // l_j increases monotonically toward 2.
        for w in seq.states.windows(2) {
            assert!(w[1].l > w[0].l && w[1].l < 2.0);
        }
        assert!(seq.bound_holds);
        // Case A limit: q = −15 log 2.
        assert!((seq.q_limit + 15.0 * std::f64::consts::LN_2).abs() < 1e-12);
        // Case B limit gains the log 3 mass: q̃ = −(15 log 2 + log 3).
        let seq_b = slicing_iterate(1.0, 0.5, 30, SlicingVariant::CaseB).unwrap();
        assert!((seq_b.q_limit + 15.0 * std::f64::consts::LN_2 + 3.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn slicing_log_space_matches_direct_recursion() {
        let seq = slicing_iterate(2.0, 0.1, 12, SlicingVariant::CaseA).unwrap();
        let mut d: f64 = 2.0 * 0.1;
        for s in &seq.states {
            if d > 1e-300 {
                assert!(
                    (s.log_d - d.ln()).abs() < 1e-12 * d.ln().abs().max(1.0),
                    "log-space drift at j = {}",
                    s.j
                );
            }
            d = d * d / 2.0_f64.powi(3 * s.j as i32 + 9);
        }
    }

    #[test]
    fn slicing_bound_holds_deep() {
        for variant in [SlicingVariant::CaseA, SlicingVariant::CaseB] {
            // Amplitudes on both sides of d₀ e^q = 1.
            for &eps in &[1e-6, 0.5, 3.0] {
                let seq = slicing_iterate(0.7, eps, 40, variant).unwrap();
                assert!(seq.bound_holds, "bound fails for {variant:?}, eps = {eps}");
            }
        }
    }

    #[test]
    fn critical_bound_limits() {
        // ε → ∞ sends the bound to 1; the log is linear in ε^{−θ}.
        let b = 0.8;
        assert!(
            (critical_lifespan_bound(b, 1e12, DataClass::NonzeroIntegral).unwrap() - 1.0).abs()
                < 1e-5
        );
        for (class, theta) in [
            (DataClass::NonzeroIntegral, 0.5),
            (DataClass::ZeroIntegral, 2.0 / 3.0),
        ] {
            for &eps in &[0.01, 0.1, 1.0] {
                let v = critical_lifespan_bound(b, eps, class).unwrap();
                assert!(
                    (v.ln() - 4.0 * b * eps.powf(-theta)).abs() < 1e-9 * v.ln().abs(),
                    "log-linearity fails"
                );
            }
        }
        // Deep overflow saturates to the +∞ sentinel.
        assert_eq!(
            critical_lifespan_bound(1.0, 1e-9, DataClass::ZeroIntegral).unwrap(),
            f64::INFINITY
        );
    }
}
