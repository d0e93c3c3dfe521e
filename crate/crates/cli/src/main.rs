//! Command-line driver: exponent tables, lifespan sweeps, scaling fits and
//! the numerical verification suites.

use lifespan2d::duhamel::{
    apriori_ratio, eval_l_disc, eval_l_kernel, rho_integral_complete, DuhamelQuadrature,
    KernelPathQuadrature, SupSample, WeightIndex, WeightSpec,
};
use lifespan2d::exponents::{
    classify_regime, conjectured_lifespan, fujita_exponent, mu_zero, predicted_lifespan,
    strauss_exponent, DataClass, LifespanForm, ModelParams, Regime,
};
use lifespan2d::field::SpaceTimeField;
use lifespan2d::functional::{slicing_iterate, SlicingVariant};
use lifespan2d::initial_data::{CaseBSign, DataProfile};
use lifespan2d::kernel::{
    fit_envelope, spherical_mean, verify_decay_lemma, Radial, SphericalMeanQuadrature,
};
use lifespan2d::rational::Ratio;
use lifespan2d::sweep::{
    fit_power_law, fit_report, read_records_csv, run_sweep, select_model, write_plot_csv,
    write_records_csv, SweepConfig,
};
use std::fs;
use std::io::BufReader;
use std::process::ExitCode;

const USAGE: &str = "\
lifespan2d — numerical laboratory for 2D damped-wave lifespans

USAGE:
  lifespan2d exponents --n <int> --mu <rational> --p <rational>
  lifespan2d sweep <config.txt>
  lifespan2d fit <records.csv> [--out <fits.txt>]
  lifespan2d verify [--out <report.csv>]

Rationals accept `a/b` or decimal literals (`2`, `1.5`, `5/3`).
`sweep` config files are key=value text; see SweepConfig docs for the schema.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let result = match args.first().map(String::as_str) {
        Some("exponents") => cmd_exponents(&args[1..]),
        Some("sweep") => cmd_sweep(&args[1..]),
        Some("fit") => cmd_fit(&args[1..]),
        Some("verify") => cmd_verify(&args[1..]),
        Some("--help") | Some("-h") | None => {
            print!("{USAGE}");
            Ok(())
        }
        Some(other) => Err(format!("unknown subcommand {other:?}\n\n{USAGE}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn flag_value<'a>(args: &'a [String], name: &str) -> Option<&'a str> {
    args.iter()
        .position(|a| a == name)
        .and_then(|i| args.get(i + 1))
        .map(String::as_str)
}

fn cmd_exponents(args: &[String]) -> Result<(), String> {
    let n: u32 = flag_value(args, "--n")
        .unwrap_or("2")
        .parse()
        .map_err(|_| "bad --n".to_string())?;
    let mu = Ratio::parse(flag_value(args, "--mu").unwrap_or("2")).map_err(|e| e.to_string())?;
    let p = Ratio::parse(flag_value(args, "--p").unwrap_or("2")).map_err(|e| e.to_string())?;

    let pf = fujita_exponent(n).map_err(|e| e.to_string())?;
    let mu0 = mu_zero(n).map_err(|e| e.to_string())?;
    let ps = strauss_exponent(n as f64 + mu.to_f64()).map_err(|e| e.to_string())?;
    let regime = classify_regime(n, mu).map_err(|e| e.to_string())?;
    println!("n = {n}, mu = {mu}, p = {p}");
    println!("  p_F(n)      = {pf:.12}");
    println!("  mu_0(n)     = {mu0:.12}");
    println!("  p_S(n + mu) = {ps:.12}");
    println!(
        "  regime      = {}",
        match regime {
            Regime::HeatLike => "heat-like (mu > mu_0)",
            Regime::Intermediate => "intermediate (mu = mu_0)",
            Regime::WaveLike => "wave-like (mu < mu_0)",
        }
    );

    let params = ModelParams::new(n, mu, p, 1.0, 1.0).map_err(|e| e.to_string())?;
    for class in [DataClass::NonzeroIntegral, DataClass::ZeroIntegral] {
        let name = match class {
            DataClass::NonzeroIntegral => "nonzero integral",
            DataClass::ZeroIntegral => "zero sum       ",
        };
        let prediction = predicted_lifespan(&params, class)
            .or_else(|_| conjectured_lifespan(&params, class));
        match prediction {
            Ok(pred) => {
                let backing = if pred.theorem_backed {
                    "theorem"
                } else {
                    "conjecture"
                };
                match pred.form {
                    LifespanForm::PowerLaw => println!(
                        "  {name}: T ~ c eps^{:.6}  [{backing}]",
                        pred.exponent
                    ),
                    LifespanForm::ExpPowerLaw => println!(
                        "  {name}: T ~ exp(c eps^-{:.6})  [{backing}]",
                        pred.exponent
                    ),
                }
            }
            Err(e) => println!("  {name}: no prediction ({e})"),
        }
    }
    Ok(())
}

fn cmd_sweep(args: &[String]) -> Result<(), String> {
    let path = args
        .first()
        .ok_or_else(|| format!("sweep needs a config file\n\n{USAGE}"))?;
    let text = fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
    let cfg = SweepConfig::from_key_values(&text).map_err(|e| e.to_string())?;
    eprintln!(
        "sweep: case {} p = {} over {} points from eps0 = {}",
        cfg.case.label(),
        cfg.params.p,
        cfg.count,
        cfg.eps0
    );
    let out = run_sweep(&cfg).map_err(|e| e.to_string())?;
    for (eps, msg) in &out.failures {
        eprintln!("  point eps = {eps} failed: {msg}");
    }
    for r in &out.records {
        println!(
            "eps = {:12.6e}  status = {:9}  T = {:12.5}  converged = {}",
            r.epsilon,
            r.status.label(),
            r.t_num,
            r.converged
        );
    }
    if !cfg.records_csv.is_empty() {
        let mut buf = Vec::new();
        write_records_csv(&out.records, &mut buf).map_err(|e| e.to_string())?;
        fs::write(&cfg.records_csv, buf).map_err(|e| e.to_string())?;
        eprintln!("records -> {}", cfg.records_csv);
    }
    match select_model(&out.records) {
        Ok(selection) => {
            print!("{}", fit_report(&selection));
            if !cfg.fits_txt.is_empty() {
                fs::write(&cfg.fits_txt, fit_report(&selection)).map_err(|e| e.to_string())?;
                eprintln!("fits -> {}", cfg.fits_txt);
            }
            if !cfg.plot_csv.is_empty() {
                let mut buf = Vec::new();
                write_plot_csv(&out.records, &selection, &mut buf).map_err(|e| e.to_string())?;
                fs::write(&cfg.plot_csv, buf).map_err(|e| e.to_string())?;
                eprintln!("plot data -> {}", cfg.plot_csv);
            }
        }
        Err(e) => eprintln!("fits skipped: {e}"),
    }
    Ok(())
}

fn cmd_fit(args: &[String]) -> Result<(), String> {
    let path = args
        .first()
        .ok_or_else(|| format!("fit needs a records CSV\n\n{USAGE}"))?;
    let file = fs::File::open(path).map_err(|e| format!("opening {path}: {e}"))?;
    let records = read_records_csv(BufReader::new(file)).map_err(|e| e.to_string())?;
    let selection = select_model(&records).map_err(|e| e.to_string())?;
    let report = fit_report(&selection);
    print!("{report}");
    if let Ok(power) = fit_power_law(&records) {
        if let (Some(pred), Some(err)) = (power.predicted, power.relative_error) {
            println!(
                "power-law slope {:.6} vs predicted {:.6} (relative error {:.3})",
                power.slope, pred, err
            );
        }
    }
    if let Some(out) = flag_value(args, "--out") {
        fs::write(out, report).map_err(|e| e.to_string())?;
        eprintln!("fits -> {out}");
    }
    Ok(())
}

struct CheckRow {
    check: &'static str,
    detail: String,
    value: f64,
    reference: f64,
    tolerance: f64,
    pass: bool,
}

fn cmd_verify(args: &[String]) -> Result<(), String> {
    let mut rows: Vec<CheckRow> = Vec::new();
    let quad = SphericalMeanQuadrature {
        radial_panels: 64,
        angular_panels: 64,
        ..Default::default()
    };

    // Spherical mean of 1 is t.
    let one = Radial {
        f: |_| 1.0,
        support: 1e12,
    };
    for &(r, t) in &[(0.0, 1.0), (2.0, 3.0), (0.7, 10.0)] {
        let v = spherical_mean(&one, r, t, &quad).map_err(|e| e.to_string())?;
        rows.push(CheckRow {
            check: "spherical_mean_identity",
            detail: format!("r={r} t={t}"),
            value: v,
            reference: t,
            tolerance: 1e-8,
            pass: (v - t).abs() < 1e-8,
        });
    }

    // Complete rho integral equals pi/2 on pseudo-random (lambda, r).
    let qk = KernelPathQuadrature::default();
    let mut seed: u64 = 0x9e3779b97f4a7c15;
    let mut rand01 = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let lambda = 0.05 + 4.0 * rand01();
        let r = 0.05 + 4.0 * rand01();
        let v = rho_integral_complete(lambda, r, &qk);
        worst = worst.max((v - std::f64::consts::FRAC_PI_2).abs());
    }
    rows.push(CheckRow {
        check: "rho_integral_beta_half_half",
        detail: "100 random (lambda, r)".into(),
        value: worst,
        reference: 0.0,
        tolerance: 1e-8,
        pass: worst < 1e-8,
    });

    // Disc form and kernel decomposition of L agree on a smooth source.
    let smooth = |rho: f64, tau: f64| {
        let s = rho / (tau + 1.0);
        if s < 1.0 {
            (1.0 - s * s).powi(3)
        } else {
            0.0
        }
    };
    let qd = DuhamelQuadrature::default().refined(2);
    let mut worst_rel: f64 = 0.0;
    for &(r, t) in &[(0.5, 1.0), (0.4, 2.0), (1.5, 1.8)] {
        let disc = eval_l_disc(&smooth, 1.0, 1.5, r, t, &qd);
        let kern = eval_l_kernel(&smooth, 1.5, r, t, &qk);
        worst_rel = worst_rel.max((disc - kern).abs() / disc.abs().max(1e-12));
    }
    rows.push(CheckRow {
        check: "duhamel_path_agreement",
        detail: "smooth source, 3 points".into(),
        value: worst_rel,
        reference: 0.0,
        tolerance: 1e-4,
        pass: worst_rel < 1e-4,
    });

    // Decay estimates of the free solution.
    let case_a = DataProfile::case_a(1.0).map_err(|e| e.to_string())?;
    let neg = DataProfile::case_b(1.0, CaseBSign::NegIntF).map_err(|e| e.to_string())?;
    let samples: Vec<(f64, f64)> = (0..8)
        .flat_map(|i| {
            let gap = 4.0 + 4.0 * i as f64;
            [(0.0, gap), (1.0, 1.0 + gap)]
        })
        .filter(|&(r, t)| t - r >= 2.0 && t >= 4.0)
        .collect();
    for (name, profile) in [("case_a", &case_a), ("case_b_neg", &neg)] {
        let report = verify_decay_lemma(profile, &samples, &quad).map_err(|e| e.to_string())?;
        rows.push(CheckRow {
            check: "decay_lemma",
            detail: format!("{name}, {} samples", report.samples_used),
            value: report.scaled_residual_leading,
            reference: report.scaled_residual_leading_refined,
            tolerance: 0.2,
            pass: report.pass,
        });
    }

    // Envelope fits.
    let env_samples: Vec<(f64, f64)> = (0..10)
        .flat_map(|i| {
            let gap = 1.0 * 1.5_f64.powi(i);
            [(0.0, gap), (1.0, 1.0 + gap)]
        })
        .collect();
    let env = fit_envelope(&case_a, &env_samples, &quad).map_err(|e| e.to_string())?;
    rows.push(CheckRow {
        check: "envelope_half_half",
        detail: format!("case_a K={}", env.k_threshold),
        value: env.e0,
        reference: 1.0 / (2.0 * std::f64::consts::PI),
        tolerance: f64::INFINITY,
        pass: env.e0 > 0.0,
    });
    let env = fit_envelope(&neg, &env_samples, &quad).map_err(|e| e.to_string())?;
    rows.push(CheckRow {
        check: "envelope_half_three_half",
        detail: format!("case_b_neg K={}", env.k_threshold),
        value: env.e0,
        reference: 1.0 / (2.0 * std::f64::consts::PI),
        tolerance: f64::INFINITY,
        pass: env.e0 > 0.0,
    });
    let pos = DataProfile::case_b(1.0, CaseBSign::PosF).map_err(|e| e.to_string())?;
    let should_fail = fit_envelope(&pos, &env_samples, &quad);
    rows.push(CheckRow {
        check: "envelope_sign_mismatch_rejected",
        detail: "case_b_pos".into(),
        value: if should_fail.is_err() { 1.0 } else { 0.0 },
        reference: 1.0,
        tolerance: 0.0,
        pass: should_fail.is_err(),
    });

    // A-priori ratio boundedness across two horizons.
    let p = Ratio::new(3, 2);
    let w1 = WeightSpec::new(WeightIndex::W1, 1.0, p).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for &t_end in &[10.0, 40.0] {
        let spacing: f64 = 0.25;
        let nt = (t_end / spacing) as usize + 1;
        let nr = ((t_end + 1.0) / spacing) as usize + 2;
        let v = SpaceTimeField::from_fn(1.0, spacing, spacing, nr, nt, |r, t| {
            1.0 / w1.weight(r, t)
        })
        .map_err(|e| e.to_string())?;
        let ratio = apriori_ratio(&v, p, SupSample::for_field(&v, 16), &DuhamelQuadrature::default())
            .map_err(|e| e.to_string())?;
        ratios.push(ratio);
    }
    let band = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    rows.push(CheckRow {
        check: "apriori_ratio_band",
        detail: format!("T in {{10, 40}}: {ratios:?}"),
        value: band,
        reference: 1.0,
        tolerance: 3.0,
        pass: band < 3.0 && ratios.iter().all(|x| x.is_finite()),
    });

    // Slicing recursion bound with the computed series limit.
    for (variant, name) in [(SlicingVariant::CaseA, "case_a"), (SlicingVariant::CaseB, "case_b")] {
        let seq = slicing_iterate(1.0, 0.3, 40, variant).map_err(|e| e.to_string())?;
        rows.push(CheckRow {
            check: "slicing_lower_bound",
            detail: format!("{name} q={:.6}", seq.q_limit),
            value: if seq.bound_holds { 1.0 } else { 0.0 },
            reference: 1.0,
            tolerance: 0.0,
            pass: seq.bound_holds,
        });
    }

    let mut all_pass = true;
    let mut csv = String::from("check,detail,value,reference,tolerance,pass\n");
    for row in &rows {
        all_pass &= row.pass;
        println!(
            "{:5} {:32} {:28} value={:.6e} ref={:.6e}",
            if row.pass { "PASS" } else { "FAIL" },
            row.check,
            row.detail,
            row.value,
            row.reference
        );
        csv.push_str(&format!(
            "{},{},{:.12e},{:.12e},{:.3e},{}\n",
            row.check, row.detail, row.value, row.reference, row.tolerance, row.pass
        ));
    }
    if let Some(out) = flag_value(args, "--out") {
        fs::write(out, csv).map_err(|e| e.to_string())?;
        eprintln!("report -> {out}");
    }
    if all_pass {
        println!("verify: all {} checks passed", rows.len());
        Ok(())
    } else {
        Err("verification checks failed".into())
    }
}
