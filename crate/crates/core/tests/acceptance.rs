//! Acceptance suite: one test per verification criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them as they complete).
//!
//! The thresholds encode what the theory pins down at desk scale: exact
//! closed forms to 1e−12, quadrature identities to 1e−8, operator-path
//! agreement to 1e−4 relative, lifespan scaling exponents to ±15%, and an
//! explicit "inconclusive" verdict where an 8-point ladder cannot separate
//! the two exponential laws.

use lifespan2d::duhamel::{
    apriori_ratio, eval_l_disc, eval_l_kernel, picard_solve, rho_integral_complete,
    DuhamelQuadrature, KernelPathQuadrature, PicardOptions, SupSample, WeightIndex, WeightSpec,
};
use lifespan2d::exponents::{
    fujita_exponent, mu_zero, strauss_exponent, ModelParams,
};
use lifespan2d::field::SpaceTimeField;
use lifespan2d::functional::{slicing_iterate, SlicingVariant};
use lifespan2d::initial_data::{bump, bump_d1, bump_d2, CaseBSign, DataProfile};
use lifespan2d::kernel::{free_solution, spherical_mean, Radial, SphericalMeanQuadrature};
use lifespan2d::rational::Ratio;
use lifespan2d::solver::{run_recorded, transform_to_u, RunStatus, SolverState};
use lifespan2d::sweep::{
    fit_exp_law, fit_power_law, run_sweep, select_model, DataCase, FitModel, SweepConfig,
    SELECTION_MARGIN,
};
use std::f64::consts::PI;

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_exponent_table() {
    let checks = [
        (fujita_exponent(1).unwrap(), 3.0, "p_F(1)"),
        (fujita_exponent(2).unwrap(), 2.0, "p_F(2)"),
        (mu_zero(1).unwrap(), 4.0 / 3.0, "mu_0(1)"),
        (mu_zero(2).unwrap(), 2.0, "mu_0(2)"),
        (mu_zero(3).unwrap(), 14.0 / 5.0, "mu_0(3)"),
        (strauss_exponent(4.0).unwrap(), 2.0, "p_S(4)"),
    ];
    let mut worst = 0.0_f64;
    for (value, expect, _name) in checks {
        worst = worst.max((value - expect).abs());
    }
    report(
        1,
        worst < 1e-12,
        &format!("closed-form exponent table, worst |error| = {worst:.2e}"),
    );
}

#[test]
fn criterion_02_threshold_equivalence() {
    // 0 < μ < μ₀(n) ⇔ p_F(n) < p_S(n+μ) on a 50×50 grid.
    let mut violations = 0;
    for n in 1..=50u32 {
        let pf = fujita_exponent(n).unwrap();
        let mu0 = mu_zero(n).unwrap();
        for j in 1..=50 {
            let mu = 0.12 * j as f64;
            let ps = strauss_exponent(n as f64 + mu).unwrap();
            if (mu < mu0) != (pf < ps) {
                violations += 1;
            }
        }
    }
    report(
        2,
        violations == 0,
        &format!("heat/wave threshold equivalence on 50x50 grid, {violations} violations"),
    );
}

#[test]
fn criterion_03_kernel_identities() {
    // R(1|x,t) = t.
    let quad = SphericalMeanQuadrature {
        radial_panels: 64,
        angular_panels: 64,
        ..Default::default()
    };
    let one = Radial {
        f: |_| 1.0,
        support: 1e12,
    };
    let mut worst_r1 = 0.0_f64;
    for &(r, t) in &[(0.0, 1.0), (1.5, 2.0), (4.0, 7.5), (0.3, 11.0)] {
        let v = spherical_mean(&one, r, t, &quad).unwrap();
        worst_r1 = worst_r1.max((v - t).abs());
    }

    // Complete ρ-integral = π/2 on 100 pseudo-random (λ, r).
    let qk = KernelPathQuadrature::default();
    let mut seed: u64 = 0x243f6a8885a308d3;
    let mut rand01 = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst_rho = 0.0_f64;
    for _ in 0..100 {
        let lambda = 0.05 + 5.0 * rand01();
        let r = 0.05 + 5.0 * rand01();
        let v = rho_integral_complete(lambda, r, &qk);
        worst_rho = worst_rho.max((v - PI / 2.0).abs());
    }

    // Disc form vs L₁+L₂ on a smooth source.
    let smooth = |rho: f64, tau: f64| {
        let s = rho / (tau + 1.0);
        if s < 1.0 {
            (1.0 - s * s).powi(3) * (1.0 + 0.2 * tau)
        } else {
            0.0
        }
    };
    let qd = DuhamelQuadrature::default().refined(2);
    let mut worst_path = 0.0_f64;
    for &(r, t) in &[(0.5, 1.0), (0.4, 2.0), (1.3, 1.7), (2.5, 2.0)] {
        let disc = eval_l_disc(&smooth, 1.0, 1.5, r, t, &qd);
        let kernel = eval_l_kernel(&smooth, 1.5, r, t, &qk);
        worst_path = worst_path.max((disc - kernel).abs() / disc.abs().max(1e-12));
    }

    report(
        3,
        worst_r1 < 1e-8 && worst_rho < 1e-8 && worst_path < 1e-4,
        &format!(
            "R(1)=t to {worst_r1:.2e}, rho-integral to {worst_rho:.2e}, \
             path agreement to {worst_path:.2e} relative"
        ),
    );
}

#[test]
fn criterion_04_free_solution_asymptotics() {
    let quad = SphericalMeanQuadrature {
        radial_panels: 64,
        angular_panels: 64,
        ..Default::default()
    };
    // Case A: 2π √((t+r)(t−r)) u_L → ∫(f+g) at t−r = 100k, within 2%.
    let case_a = DataProfile::case_a(1.0).unwrap();
    let mass = case_a.integrals(4096).unwrap().int_f_plus_g;
    let mut worst_a = 0.0_f64;
    for &r in &[0.0, 1.0, 3.0] {
        let t = r + 100.0;
        let ul = free_solution(&case_a, r, t, &quad).unwrap();
        let ratio = 2.0 * PI * ((t + r) * (t - r)).sqrt() * ul / mass;
        worst_a = worst_a.max((ratio - 1.0).abs());
    }

    // Case B: u_L against −t ∫f / (2π ((t+r)(t−r))^{3/2}) at t−r = 30k, 5%.
    let case_b = DataProfile::case_b(1.0, CaseBSign::PosF).unwrap();
    let int_f = case_b.integrals(4096).unwrap().int_f;
    let mut worst_b = 0.0_f64;
    for &r in &[0.0, 1.0, 3.0] {
        let t = r + 30.0;
        let ul = free_solution(&case_b, r, t, &quad).unwrap();
        let lead = -t * int_f / (2.0 * PI * ((t + r) * (t - r)).powf(1.5));
        worst_b = worst_b.max((ul / lead - 1.0).abs());
    }

    report(
        4,
        worst_a < 0.02 && worst_b < 0.05,
        &format!(
            "case A leading term to {:.3}%, case B ratio to {:.3}%",
            100.0 * worst_a,
            100.0 * worst_b
        ),
    );
}

#[test]
fn criterion_05_solver_convergence_and_cross_validation() {
    // Manufactured solution v* = cos(t) ψ(r): observed order 2.0 ± 0.2.
    let p = 1.5;
    let mu = 2.0;
    let exact = |r: f64, t: f64| t.cos() * bump(r);
    let forcing = move |r: f64, t: f64| {
        let b = bump(r);
        let lap = if r < 1e-12 {
            2.0 * bump_d2(r)
        } else {
            bump_d2(r) + bump_d1(r) / r
        };
        let v = t.cos() * b;
        -t.cos() * b - t.cos() * lap - mu / (1.0 + t) * t.sin() * b - v.abs().powf(p)
    };
    let mut errors = Vec::new();
    for &n in &[128.0, 256.0, 512.0] {
        let dr = 1.0 / n;
        let dt = 0.45 * dr;
        let mut state = SolverState::from_data(
            1.0,
            mu,
            p,
            true,
            dr,
            dt,
            2.0,
            &|r| exact(r, 0.0),
            &|_| 0.0,
            Some(&forcing),
        )
        .unwrap();
        while state.time() + dt / 2.0 < 1.0 {
            state.step(Some(&forcing)).unwrap();
        }
        let t = state.time();
        let err = state
            .current()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - exact(dr * i as f64, t)).abs())
            .fold(0.0_f64, f64::max);
        errors.push(err);
    }
    let order = (errors[1] / errors[2]).log2();

    // Picard vs finite differences at (r=0, t=1), small ε, p = 2.
    let profile = DataProfile::case_a(1.0).unwrap();
    let params = ModelParams::new(2, Ratio::from(2), Ratio::from(2), 1.0, 1e-3).unwrap();
    let eps = 1e-3;
    let opts = PicardOptions {
        dr: 1.0 / 16.0,
        dt: 1.0 / 16.0,
        max_iter: 15,
        tol: 1e-10,
    };
    let pic = picard_solve(
        &profile,
        &params,
        eps,
        1.0,
        &opts,
        &DuhamelQuadrature::default(),
        &SphericalMeanQuadrature::default(),
    )
    .unwrap();
    assert!(pic.converged, "picard iteration did not converge");
    let u_picard = pic.field.value(0, 16); // t = 16·(1/16) = 1 exactly
    let v = run_recorded(&profile, &params, eps, 1.0 / 128.0, 0.5, 1.0, true, None).unwrap();
    let u_field = transform_to_u(&v, 2.0);
    let idx = (1.0 / u_field.dt()).round() as usize; // dt divides 1 with cfl = 0.5
    let u_fd = u_field.value(0, idx);
    let cross = (u_picard - u_fd).abs() / u_fd.abs();

    report(
        5,
        (order - 2.0).abs() < 0.2 && cross < 0.01,
        &format!(
            "manufactured order {order:.3} (errors {errors:?}), \
             picard/fd cross-validation {:.3}% at (0,1)",
            100.0 * cross
        ),
    );
}

fn subcritical_sweep(case: DataCase) -> SweepConfig {
    let params = ModelParams::new(2, Ratio::from(2), Ratio::new(3, 2), 1.0, 1.0).unwrap();
    let mut cfg = SweepConfig::new(params, case);
    cfg.eps0 = 1.0;
    cfg.ratio = 0.7;
    cfg.count = 8;
    cfg.dr = 1.0 / 32.0;
    cfg.cfl = 0.45;
    cfg.t_max = 400.0;
    cfg.levels = 2;
    cfg
}

#[test]
fn criterion_06_subcritical_case_a_scaling() {
    let cfg = subcritical_sweep(DataCase::CaseA);
    let out = run_sweep(&cfg).unwrap();
    assert!(out.failures.is_empty());
    let all_converged = out.records.iter().all(|r| r.converged);
    let all_blew_up = out
        .records
        .iter()
        .all(|r| r.status == RunStatus::BlewUp);
    let fit = fit_power_law(&out.records).unwrap();
    let rel_err = fit.relative_error.unwrap();
    report(
        6,
        all_converged && all_blew_up && rel_err < 0.15,
        &format!(
            "case A p=3/2 slope {:.4} vs −0.5 (relative error {:.1}%), \
             Richardson-converged {}/8",
            fit.slope,
            100.0 * rel_err,
            out.records.iter().filter(|r| r.converged).count()
        ),
    );
}

#[test]
fn criterion_07_subcritical_case_b_scaling() {
    // Zero-sum blow-up times converge more slowly in Δr than case A (the
    // crossing hinges on a sign transition), so the Richardson pair runs
    // one level finer here.
    let mut cfg_b = subcritical_sweep(DataCase::CaseBPosF);
    cfg_b.dr = 1.0 / 64.0;
    let out_b = run_sweep(&cfg_b).unwrap();
    assert!(out_b.failures.is_empty());
    let all_converged = out_b.records.iter().all(|r| r.converged);
    let fit_b = fit_power_law(&out_b.records).unwrap();
    let rel_err = fit_b.relative_error.unwrap();

    // Sign check against the case A slope on the same ladder.
    let cfg_a = subcritical_sweep(DataCase::CaseA);
    let fit_a = fit_power_law(&run_sweep(&cfg_a).unwrap().records).unwrap();
    let steeper = fit_b.slope < fit_a.slope;

    report(
        7,
        all_converged && rel_err < 0.15 && steeper,
        &format!(
            "case B p=3/2 slope {:.4} vs −6/11 (relative error {:.1}%), \
             steeper than case A slope {:.4}: {steeper}",
            fit_b.slope,
            100.0 * rel_err,
            fit_a.slope
        ),
    );
}

#[test]
fn criterion_08_critical_exponential_lifespans() {
    let params = ModelParams::new(2, Ratio::from(2), Ratio::from(2), 1.0, 8.0).unwrap();
    let mut cfg = SweepConfig::new(params, DataCase::CaseA);
    cfg.eps0 = 8.0;
    cfg.ratio = 0.7;
    cfg.count = 8;
    cfg.dr = 1.0 / 16.0;
    cfg.t_max = 800.0;
    cfg.levels = 2;
    let out_a = run_sweep(&cfg).unwrap();
    let exp_a = fit_exp_law(&out_a.records, FitModel::ExpHalf).unwrap();
    let power_a = fit_power_law(&out_a.records).unwrap();
    let exp_beats_power = exp_a.r_squared - power_a.r_squared > SELECTION_MARGIN;

    // Discrimination attempt between θ = 1/2 (case A) and θ = 2/3 (case B).
    let mut cfg_b = cfg.clone();
    cfg_b.case = DataCase::CaseBNegIntF;
    let out_b = run_sweep(&cfg_b).unwrap();
    let sel_a = select_model(&out_a.records).unwrap();
    let sel_b = select_model(&out_b.records).unwrap();
    let discriminated = sel_a.winner == Some(FitModel::ExpHalf)
        && sel_b.winner == Some(FitModel::ExpTwoThirds);
    // Only a decisive swap in BOTH cases would contradict the theory;
    // everything else is an underpowered ladder.
    let contradicted = sel_a.winner == Some(FitModel::ExpTwoThirds)
        && sel_b.winner == Some(FitModel::ExpHalf);
    let verdict = if discriminated {
        "discriminated"
    } else {
        "inconclusive (allowed)"
    };

    report(
        8,
        exp_a.r_squared >= 0.98 && exp_a.slope > 0.0 && exp_beats_power && !contradicted,
        &format!(
            "case A exp-half fit r²={:.4} slope={:.3} on {} blow-ups; \
             exp beats power by {:.4}; θ discrimination: {verdict} \
             (A winner {:?}, B winner {:?})",
            exp_a.r_squared,
            exp_a.slope,
            exp_a.points,
            exp_a.r_squared - power_a.r_squared,
            sel_a.winner.map(FitModel::label),
            sel_b.winner.map(FitModel::label)
        ),
    );
}

#[test]
fn criterion_09_slicing_recursions() {
    // a_j closed form, exact for j ≤ 30.
    let seq = slicing_iterate(1.0, 0.25, 40, SlicingVariant::CaseA).unwrap();
    let mut exact = true;
    for s in seq.states.iter().take(31) {
        exact &= s.a == (1u64 << (s.j + 1)) - 2;
    }

    // Log-space recursion against the direct one while representable.
    let mut max_drift = 0.0_f64;
    let mut d: f64 = 1.0 * 0.25;
    for s in &seq.states {
        if d > 1e-290 {
            max_drift = max_drift.max((s.log_d - d.ln()).abs() / d.ln().abs().max(1.0));
        }
        d = d * d / 2.0_f64.powi(3 * s.j as i32 + 9);
    }

    // The series-limit lower bound holds through j = 40 for both variants.
    let mut bounds = true;
    for variant in [SlicingVariant::CaseA, SlicingVariant::CaseB] {
        for &eps in &[1e-5, 0.25, 2.0] {
            bounds &= slicing_iterate(0.8, eps, 40, variant).unwrap().bound_holds;
        }
    }

    report(
        9,
        exact && max_drift < 1e-12 && bounds,
        &format!(
            "a_j exact to j=30: {exact}; log-space drift {max_drift:.2e}; \
             series-limit bound to j=40: {bounds}"
        ),
    );
}

#[test]
fn criterion_10_apriori_ratio_boundedness() {
    let q = DuhamelQuadrature::default();
    let mut all_bands_ok = true;
    let mut detail = String::new();
    for p in [Ratio::new(3, 2), Ratio::from(2)] {
        let w1 = WeightSpec::new(WeightIndex::W1, 1.0, p).unwrap();
        let mut ratios = Vec::new();
        for &t_end in &[10.0, 40.0, 160.0] {
            let spacing: f64 = 0.25;
            let nt = (t_end / spacing) as usize + 1;
            let nr = ((t_end + 1.0) / spacing) as usize + 2;
            let v = SpaceTimeField::from_fn(1.0, spacing, spacing, nr, nt, |r, t| {
                1.0 / w1.weight(r, t)
            })
            .unwrap();
            let ratio = apriori_ratio(&v, p, SupSample::for_field(&v, 16), &q).unwrap();
            ratios.push(ratio);
        }
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        let band = hi / lo;
        all_bands_ok &= band < 3.0 && ratios.iter().all(|x| x.is_finite() && *x > 0.0);
        detail.push_str(&format!("p={p}: band {band:.2} from {ratios:?}; "));
    }

    // Exact scaling invariance under V ↦ αV.
    let p = Ratio::new(3, 2);
    let w1 = WeightSpec::new(WeightIndex::W1, 1.0, p).unwrap();
    let v = SpaceTimeField::from_fn(1.0, 0.25, 0.25, 61, 41, |r, t| 1.0 / w1.weight(r, t))
        .unwrap();
    let sample = SupSample::for_field(&v, 12);
    let base = apriori_ratio(&v, p, sample, &q).unwrap();
    let scaled = apriori_ratio(&v.map(|x| 0.37 * x), p, sample, &q).unwrap();
    let invariance = ((base - scaled) / base).abs();

    report(
        10,
        all_bands_ok && invariance < 1e-12,
        &format!("{detail}scale invariance drift {invariance:.2e}"),
    );
}
