//! ε-sweep experiment driver: lifespan measurement across amplitude
//! ladders, scaling-law regression and model selection.
//!
//! A sweep integrates the finite-difference solver once per point of a
//! geometric amplitude ladder ε_i = ε₀ ρ^i and records the numerical
//! lifespans. Three candidate laws are then fitted by least squares:
//!
//! * `PowerLaw`:     log T against log ε (slope compared with the
//!   theoretical exponent for the parameters and data class);
//! * `ExpHalf`:      log T against ε^{−1/2};
//! * `ExpTwoThirds`: log T against ε^{−2/3}.
//!
//! Selection goes by r² with an explicit inconclusive band: with half a
//! dozen points a margin below 0.005 does not separate the exponential
//! laws, and the harness says so rather than guessing.

use crate::exponents::{predicted_lifespan, DataClass, LifespanForm, ModelParams};
use crate::initial_data::{CaseBSign, DataProfile, ProfileKind};
use crate::rational::Ratio;
use crate::solver::{parse_key_values, run_until_blowup, LifespanRecord, RunStatus, SolverConfig};
use crate::{Error, Result};
use rayon::prelude::*;
use std::io::{BufRead, Write};

/// Least squares of y against x; returns (slope, intercept, r²).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Which generated data family a sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataCase {
    CaseA,
    CaseBPosF,
    CaseBNegIntF,
}

impl DataCase {
    pub fn label(self) -> &'static str {
        match self {
            DataCase::CaseA => "case_a",
            DataCase::CaseBPosF => "case_b_pos_f",
            DataCase::CaseBNegIntF => "case_b_neg_int_f",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "case_a" => Ok(DataCase::CaseA),
            "case_b_pos_f" => Ok(DataCase::CaseBPosF),
            "case_b_neg_int_f" => Ok(DataCase::CaseBNegIntF),
            other => Err(Error::Parse(format!("unknown data case {other:?}"))),
        }
    }

    pub fn profile(self, k: f64) -> Result<DataProfile> {
        match self {
            DataCase::CaseA => DataProfile::case_a(k),
            DataCase::CaseBPosF => DataProfile::case_b(k, CaseBSign::PosF),
            DataCase::CaseBNegIntF => DataProfile::case_b(k, CaseBSign::NegIntF),
        }
    }

    pub fn data_class(self) -> DataClass {
        match self {
            DataCase::CaseA => DataClass::NonzeroIntegral,
            DataCase::CaseBPosF | DataCase::CaseBNegIntF => DataClass::ZeroIntegral,
        }
    }

    fn from_kind(kind: ProfileKind) -> Option<Self> {
        match kind {
            ProfileKind::CaseAZeroFBumpG => Some(DataCase::CaseA),
            ProfileKind::CaseBPosF => Some(DataCase::CaseBPosF),
            ProfileKind::CaseBNegIntF => Some(DataCase::CaseBNegIntF),
            ProfileKind::Custom => None,
        }
    }
}

/// Full description of one sweep experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub params: ModelParams,
    pub case: DataCase,
    /// Ladder start ε₀ and geometric ratio ρ ∈ (0,1); at least 5 points.
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
    pub dr: f64,
    pub cfl: f64,
    pub threshold: f64,
    pub t_max: f64,
    pub levels: usize,
    pub max_steps: usize,
    /// Output paths consumed by the CLI; empty strings mean "skip".
    pub records_csv: String,
    pub fits_txt: String,
    pub plot_csv: String,
}

impl SweepConfig {
    pub fn new(params: ModelParams, case: DataCase) -> Self {
        SweepConfig {
            params,
            case,
            eps0: 2.0,
            ratio: 0.7,
            count: 8,
            dr: 1.0 / 16.0,
            cfl: 0.45,
            threshold: 1e8,
            t_max: 400.0,
            levels: 2,
            max_steps: usize::MAX / 2,
            records_csv: String::new(),
            fits_txt: String::new(),
            plot_csv: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 5 {
            return Err(Error::InvalidParameter(
                "epsilon ladder needs at least 5 points".into(),
            ));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidParameter(
                "ladder ratio must lie in (0, 1)".into(),
            ));
        }
        if !(self.eps0 > 0.0) {
            return Err(Error::InvalidParameter("eps0 must be positive".into()));
        }
        self.solver_config(self.eps0).validate()
    }

    /// The amplitude ladder ε₀ ρ^i, largest first.
    pub fn ladder(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| self.eps0 * self.ratio.powi(i as i32))
            .collect()
    }

    fn solver_config(&self, epsilon: f64) -> SolverConfig {
        let mut params = self.params;
        params.epsilon = epsilon;
        SolverConfig {
            params,
            dr: self.dr,
            cfl: self.cfl,
            blowup_threshold: self.threshold,
            t_max: self.t_max,
            refinement_levels: self.levels,
            nonlinear: true,
            max_steps: self.max_steps,
        }
    }

    /// Serializes to the key-value schema (the format `sweep` configs use):
    ///
    /// ```text
    /// n, mu, p, k        model parameters (mu, p exact rationals/decimals)
    /// case               case_a | case_b_pos_f | case_b_neg_int_f
    /// eps0, ratio, count geometric amplitude ladder
    /// dr, cfl            base resolution and Δt/Δr
    /// threshold, t_max   blow-up detection
    /// levels, max_steps  refinement count, per-run step budget
    /// records_csv, fits_txt, plot_csv   output paths (may be empty)
    /// ```
    pub fn to_key_values(&self) -> String {
        format!(
            "n={}\nmu={}\np={}\nk={}\ncase={}\neps0={}\nratio={}\ncount={}\ndr={}\ncfl={}\nthreshold={}\nt_max={}\nlevels={}\nmax_steps={}\nrecords_csv={}\nfits_txt={}\nplot_csv={}\n",
            self.params.n,
            self.params.mu,
            self.params.p,
            self.params.k,
            self.case.label(),
            self.eps0,
            self.ratio,
            self.count,
            self.dr,
            self.cfl,
            self.threshold,
            self.t_max,
            self.levels,
            self.max_steps,
            self.records_csv,
            self.fits_txt,
            self.plot_csv
        )
    }

    pub fn from_key_values(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        let find = |key: &str| -> Option<&str> {
            map.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
        };
        let get = |key: &str| -> Result<&str> {
            find(key).ok_or_else(|| Error::Parse(format!("missing sweep key {key:?}")))
        };
        let parse_f64 = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .map_err(|_| Error::Parse(format!("bad float for {key:?}")))
        };
        let parse_usize = |key: &str| -> Result<usize> {
            get(key)?
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer for {key:?}")))
        };
        let eps0 = parse_f64("eps0")?;
        let params = ModelParams::new(
            get("n")?
                .parse()
                .map_err(|_| Error::Parse("bad integer for \"n\"".into()))?,
            Ratio::parse(get("mu")?)?,
            Ratio::parse(get("p")?)?,
            parse_f64("k")?,
            eps0,
        )?;
        let cfg = SweepConfig {
            params,
            case: DataCase::parse(get("case")?)?,
            eps0,
            ratio: parse_f64("ratio")?,
            count: parse_usize("count")?,
            dr: parse_f64("dr")?,
            cfl: parse_f64("cfl")?,
            threshold: parse_f64("threshold")?,
            t_max: parse_f64("t_max")?,
            levels: parse_usize("levels")?,
            max_steps: parse_usize("max_steps")?,
            records_csv: find("records_csv").unwrap_or("").to_string(),
            fits_txt: find("fits_txt").unwrap_or("").to_string(),
            plot_csv: find("plot_csv").unwrap_or("").to_string(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Sweep results: one record per ladder point plus any per-point failures.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<LifespanRecord>,
    /// (epsilon, error message) for points whose run failed outright.
    pub failures: Vec<(f64, String)>,
}

/// Runs the solver across the ladder. Points are independent and run in
/// parallel; the output order is the ladder order regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let profile = cfg.case.profile(cfg.params.k)?;
    let outcomes: Vec<(f64, std::result::Result<LifespanRecord, String>)> = cfg
        .ladder()
        .par_iter()
        .map(|&eps| {
            let solver_cfg = cfg.solver_config(eps);
            (
                eps,
                run_until_blowup(&profile, &solver_cfg, eps).map_err(|e| e.to_string()),
            )
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (eps, outcome) in outcomes {
        match outcome {
            Ok(rec) => records.push(rec),
            Err(msg) => failures.push((eps, msg)),
        }
    }
    Ok(SweepOutput { records, failures })
}

/// Candidate lifespan laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// log T = slope · log ε + intercept.
    PowerLaw,
    /// log T = slope · ε^{−1/2} + intercept.
    ExpHalf,
    /// log T = slope · ε^{−2/3} + intercept.
    ExpTwoThirds,
}

impl FitModel {
    pub fn label(self) -> &'static str {
        match self {
            FitModel::PowerLaw => "power_law",
            FitModel::ExpHalf => "exp_half",
            FitModel::ExpTwoThirds => "exp_two_thirds",
        }
    }

    fn x_of(self, eps: f64) -> f64 {
        match self {
            FitModel::PowerLaw => eps.ln(),
            FitModel::ExpHalf => eps.powf(-0.5),
            FitModel::ExpTwoThirds => eps.powf(-2.0 / 3.0),
        }
    }

    /// Model curve T(ε) for fitted (slope, intercept).
    pub fn curve(self, slope: f64, intercept: f64, eps: f64) -> f64 {
        (slope * self.x_of(eps) + intercept).exp()
    }
}

/// Regression output against one candidate law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Theoretical power-law exponent, when the parameters admit one.
    pub predicted: Option<f64>,
    /// |slope − predicted| / |predicted|; power-law fits only.
    pub relative_error: Option<f64>,
    /// Number of blow-up records entering the fit.
    pub points: usize,
}

/// Blow-up records sorted by descending ε (fit results are then invariant
/// under any input ordering).
fn blowup_points(records: &[LifespanRecord]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.status == RunStatus::BlewUp)
        .map(|r| (r.epsilon, r.t_num))
        .collect();
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    pts
}

fn fit_against(records: &[LifespanRecord], model: FitModel) -> Result<FitResult> {
    let pts = blowup_points(records);
    if pts.len() < 4 {
        return Err(Error::HypothesisMismatch(format!(
            "only {} blow-up records: the ladder sits in the global-existence regime \
             or the horizon clipped it",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(e, _)| model.x_of(e)).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, t)| t.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(FitResult {
        model,
        slope,
        intercept,
        r_squared: r2,
        predicted: None,
        relative_error: None,
        points: pts.len(),
    })
}

/// The theoretical power-law exponent for the records' parameter point,
/// when the theorem-backed table covers it.
fn predicted_exponent(records: &[LifespanRecord]) -> Option<f64> {
    let first = records.first()?;
    let params = ModelParams::new(2, first.mu, first.p, 1.0, 1.0).ok()?;
    let class = DataCase::from_kind(first.case)?.data_class();
    let pred = predicted_lifespan(&params, class).ok()?;
    (pred.form == LifespanForm::PowerLaw).then_some(pred.exponent)
}

/// Least squares of log T against log ε, compared with the theoretical
/// exponent when one exists. Needs at least 4 blow-up records.
pub fn fit_power_law(records: &[LifespanRecord]) -> Result<FitResult> {
    let mut fit = fit_against(records, FitModel::PowerLaw)?;
    if let Some(predicted) = predicted_exponent(records) {
        fit.predicted = Some(predicted);
        fit.relative_error = Some((fit.slope - predicted).abs() / predicted.abs());
    }
    Ok(fit)
}

/// Least squares of log T against ε^{−θ} for θ = 1/2 or 2/3; the slope is
/// the empirical constant c of exp(c ε^{−θ}) and should come out positive.
pub fn fit_exp_law(records: &[LifespanRecord], model: FitModel) -> Result<FitResult> {
    if model == FitModel::PowerLaw {
        return Err(Error::InvalidParameter(
            "use fit_power_law for the power-law model".into(),
        ));
    }
    fit_against(records, model)
}

/// All three fits with the winner by r², or an honest tie.
#[derive(Debug, Clone)]
pub struct ModelSelection {
    pub fits: Vec<FitResult>,
    /// None when the top two r² values sit within the inconclusive band.
    pub winner: Option<FitModel>,
    /// r² gap between the best and second-best fits.
    pub margin: f64,
}

/// Margin below which model selection refuses to decide.
pub const SELECTION_MARGIN: f64 = 0.005;

/// Fits all three models and adjudicates by r² with the inconclusive band.
pub fn select_model(records: &[LifespanRecord]) -> Result<ModelSelection> {
    if records.len() < 5 {
        return Err(Error::InvalidParameter(
            "model selection needs at least 5 records".into(),
        ));
    }
    let fits = vec![
        fit_power_law(records)?,
        fit_exp_law(records, FitModel::ExpHalf)?,
        fit_exp_law(records, FitModel::ExpTwoThirds)?,
    ];
    let mut order: Vec<usize> = (0..fits.len()).collect();
    order.sort_by(|&a, &b| fits[b].r_squared.partial_cmp(&fits[a].r_squared).unwrap());
    let margin = fits[order[0]].r_squared - fits[order[1]].r_squared;
    let winner = (margin >= SELECTION_MARGIN).then_some(fits[order[0]].model);
    Ok(ModelSelection {
        fits,
        winner,
        margin,
    })
}

/// Writes records as CSV with the fixed column set.
pub fn write_records_csv<W: Write>(records: &[LifespanRecord], mut w: W) -> Result<()> {
    writeln!(w, "epsilon,p,mu,case,t_num,status,dr,converged")?;
    for r in records {
        writeln!(
            w,
            "{:.17e},{},{},{},{:.17e},{},{:.17e},{}",
            r.epsilon,
            r.p,
            r.mu,
            r.case.label(),
            r.t_num,
            r.status.label(),
            r.dr,
            r.converged
        )?;
    }
    Ok(())
}

/// Reads the CSV written by [`write_records_csv`].
pub fn read_records_csv<R: BufRead>(r: R) -> Result<Vec<LifespanRecord>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty records file".into()))??;
    if header.trim() != "epsilon,p,mu,case,t_num,status,dr,converged" {
        return Err(Error::Parse("unexpected records header".into()));
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 8 {
            return Err(Error::Parse(format!("record line {} malformed", idx + 2)));
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what} in record line {}", idx + 2)))
        };
        let case = DataCase::parse(cells[3].trim())?;
        let kind = case.profile(1.0)?.kind();
        out.push(LifespanRecord {
            epsilon: parse_f64(cells[0], "epsilon")?,
            p: Ratio::parse(cells[1])?,
            mu: Ratio::parse(cells[2])?,
            case: kind,
            t_num: parse_f64(cells[4], "t_num")?,
            status: match cells[5].trim() {
                "blew_up" => RunStatus::BlewUp,
                "survived" => RunStatus::SurvivedHorizon,
                other => {
                    return Err(Error::Parse(format!("unknown status {other:?}")));
                }
            },
            dr: parse_f64(cells[6], "dr")?,
            converged: cells[7].trim() == "true",
            threshold: f64::NAN,
        });
    }
    Ok(out)
}

/// Renders fits and the selection verdict as structured text.
pub fn fit_report(selection: &ModelSelection) -> String {
    let mut out = String::from("{\n");
    for fit in &selection.fits {
        out.push_str(&format!(
            "  {}: {{ slope: {:.6e}, intercept: {:.6e}, r_squared: {:.6}, points: {}",
            fit.model.label(),
            fit.slope,
            fit.intercept,
            fit.r_squared,
            fit.points
        ));
        if let Some(pred) = fit.predicted {
            out.push_str(&format!(", predicted: {pred:.6}"));
        }
        if let Some(err) = fit.relative_error {
            out.push_str(&format!(", relative_error: {err:.6}"));
        }
        out.push_str(" }\n");
    }
    match selection.winner {
        Some(model) => out.push_str(&format!(
            "  selected: {} (margin {:.6})\n",
            model.label(),
            selection.margin
        )),
        None => out.push_str(&format!(
            "  selected: inconclusive (margin {:.6} < {SELECTION_MARGIN})\n",
            selection.margin
        )),
    }
    out.push('}');
    out.push('\n');
    out
}

/// Plot data: per blow-up record, the measurement and each fitted curve.
pub fn write_plot_csv<W: Write>(
    records: &[LifespanRecord],
    selection: &ModelSelection,
    mut w: W,
) -> Result<()> {
    writeln!(w, "epsilon,t_num,power_law,exp_half,exp_two_thirds")?;
    for (eps, t) in blowup_points(records) {
        let mut row = format!("{eps:.17e},{t:.17e}");
        for fit in &selection.fits {
            row.push_str(&format!(
                ",{:.17e}",
                fit.model.curve(fit.slope, fit.intercept, eps)
            ));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}
