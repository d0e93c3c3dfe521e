//! Critical exponents, regime classification and theoretical lifespan forms.
//!
//! The damped model sits between two classical theories. The Fujita exponent
//! p_F(n) = 1 + 2/n governs semilinear heat equations; the Strauss exponent
//! p_S(n), the positive root of γ(p, n) = 2 + (n+1)p − (n−1)p² = 0, governs
//! undamped semilinear waves. With scale-invariant damping of strength μ the
//! critical power is conjectured to be p_F(n) for μ above the threshold
//! μ₀(n) = (n²+n+2)/(n+2) and p_S(n+μ) below it. In two dimensions μ₀(2) = 2,
//! which makes (n, μ) = (2, 2) the intermediate case this crate studies:
//! there p_F(2) = p_S(4) = 2 and the lifespan laws split according to whether
//! ∫(f+g) dx vanishes.

use crate::rational::Ratio;
use crate::{Error, Result};

/// Position of the damping strength μ relative to the threshold μ₀(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// μ > μ₀(n): critical power expected to be the Fujita exponent.
    HeatLike,
    /// μ = μ₀(n): both candidate critical powers coincide.
    Intermediate,
    /// μ < μ₀(n): critical power expected to be the shifted Strauss exponent.
    WaveLike,
}

/// Dichotomy on the initial data that selects between the two lifespan laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataClass {
    /// ∫ (f+g) dx ≠ 0.
    NonzeroIntegral,
    /// f + g ≡ 0 (so in particular the integral vanishes).
    ZeroIntegral,
}

impl DataClass {
    pub fn label(self) -> &'static str {
        match self {
            DataClass::NonzeroIntegral => "nonzero_integral",
            DataClass::ZeroIntegral => "zero_integral",
        }
    }
}

/// Functional form of a predicted lifespan T(ε).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifespanForm {
    /// T(ε) ~ c ε^exponent with exponent < 0.
    PowerLaw,
    /// T(ε) ~ exp(c ε^{-θ}) with θ > 0; `exponent` stores θ.
    ExpPowerLaw,
}

/// A theoretical lifespan scaling law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifespanPrediction {
    pub form: LifespanForm,
    /// Power of ε for `PowerLaw` (negative); θ for `ExpPowerLaw` (positive).
    pub exponent: f64,
    pub data_class: DataClass,
    /// True when the law is a proved theorem for the parameters supplied;
    /// false when it comes from the conjectural general-μ tables.
    pub theorem_backed: bool,
}

/// Full parameter set of the initial value problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Space dimension (the simulations fix n = 2; the formulas are general).
    pub n: u32,
    /// Damping coefficient μ > 0, exact.
    pub mu: Ratio,
    /// Nonlinearity power p > 1, exact.
    pub p: Ratio,
    /// Support radius of the data, k ≥ 1.
    pub k: f64,
    /// Data amplitude ε > 0.
    pub epsilon: f64,
}

impl ModelParams {
    pub fn new(n: u32, mu: Ratio, p: Ratio, k: f64, epsilon: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if !mu.is_positive() {
            return Err(Error::InvalidParameter("mu must be positive".into()));
        }
        if p <= Ratio::from(1) {
            return Err(Error::InvalidParameter("p must exceed 1".into()));
        }
        if !(k >= 1.0) {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        Ok(ModelParams {
            n,
            mu,
            p,
            k,
            epsilon,
        })
    }

    pub fn p_f64(&self) -> f64 {
        self.p.to_f64()
    }

    pub fn mu_f64(&self) -> f64 {
        self.mu.to_f64()
    }
}

/// Fujita exponent p_F(n) = 1 + 2/n.
pub fn fujita_exponent(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    Ok(1.0 + 2.0 / n as f64)
}

/// γ(p, d) = 2 + (d+1)p − (d−1)p².
pub fn gamma(p: f64, d: f64) -> f64 {
    2.0 + (d + 1.0) * p - (d - 1.0) * p * p
}

/// Strauss exponent p_S(d): the positive root of γ(p, d) = 0 for d > 1,
/// +∞ at d = 1 (the root escapes to infinity as the quadratic degenerates).
///
/// Real-valued d is accepted because the damped theory uses p_S(n + μ).
pub fn strauss_exponent(d: f64) -> Result<f64> {
    if !(d >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "strauss_exponent needs d >= 1, got {d}"
        )));
    }
    if d < 1.0 + 1e-12 {
        return Ok(f64::INFINITY);
    }
    Ok((d + 1.0 + (d * d + 10.0 * d - 7.0).sqrt()) / (2.0 * (d - 1.0)))
}

/// Damping threshold μ₀(n) = (n² + n + 2)/(n + 2) as an exact rational.
pub fn mu_zero_exact(n: u32) -> Result<Ratio> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let n = n as i64;
    Ok(Ratio::new(n * n + n + 2, n + 2))
}

/// Damping threshold μ₀(n) as a float.
pub fn mu_zero(n: u32) -> Result<f64> {
    mu_zero_exact(n).map(Ratio::to_f64)
}

/// Classifies the damping strength against μ₀(n) with exact rational
/// comparison, so the boundary case is never lost to rounding.
pub fn classify_regime(n: u32, mu: Ratio) -> Result<Regime> {
    if !mu.is_positive() {
        return Err(Error::InvalidParameter("mu must be positive".into()));
    }
    let threshold = mu_zero_exact(n)?;
    Ok(match mu.cmp(&threshold) {
        std::cmp::Ordering::Greater => Regime::HeatLike,
        std::cmp::Ordering::Equal => Regime::Intermediate,
        std::cmp::Ordering::Less => Regime::WaveLike,
    })
}

fn two() -> Ratio {
    Ratio::from(2)
}

/// Theorem-backed lifespan law for the intermediate two-dimensional case
/// (n, μ) = (2, 2), 1 < p ≤ 2.
///
/// * nonzero ∫(f+g):  T ~ c ε^{−(p−1)/(4−2p)} for p < 2,  exp(c ε^{−1/2}) at p = 2;
/// * f + g ≡ 0:       T ~ c ε^{−2p(p−1)/γ(p,4)} for p < 2, exp(c ε^{−2/3}) at p = 2.
pub fn predicted_lifespan(
    params: &ModelParams,
    data_class: DataClass,
) -> Result<LifespanPrediction> {
    if params.n != 2 || params.mu != two() {
        return Err(Error::InvalidParameter(
            "theorem-backed predictions require n = 2, mu = 2".into(),
        ));
    }
    if params.p > two() {
        return Err(Error::InvalidParameter(
            "theorem-backed predictions require 1 < p <= 2".into(),
        ));
    }
    let p = params.p_f64();
    let critical = params.p == two();
    let (form, exponent) = match (data_class, critical) {
        (DataClass::NonzeroIntegral, false) => {
            (LifespanForm::PowerLaw, -(p - 1.0) / (4.0 - 2.0 * p))
        }
        (DataClass::NonzeroIntegral, true) => (LifespanForm::ExpPowerLaw, 0.5),
        (DataClass::ZeroIntegral, false) => {
            (LifespanForm::PowerLaw, -2.0 * p * (p - 1.0) / gamma(p, 4.0))
        }
        (DataClass::ZeroIntegral, true) => (LifespanForm::ExpPowerLaw, 2.0 / 3.0),
    };
    Ok(LifespanPrediction {
        form,
        exponent,
        data_class,
        theorem_backed: true,
    })
}

/// Conjectural general-μ lifespan tables, exposed for exploration only.
///
/// These are the expected heat-like / wave-like laws away from the threshold;
/// no theorem backs them here and nothing in the verification suites relies
/// on them. At the threshold itself use [`predicted_lifespan`].
pub fn conjectured_lifespan(
    params: &ModelParams,
    data_class: DataClass,
) -> Result<LifespanPrediction> {
    let n = params.n;
    let p = params.p_f64();
    match classify_regime(n, params.mu)? {
        Regime::Intermediate => {
            if n == 2 {
                let mut pred = predicted_lifespan(params, data_class)?;
                pred.theorem_backed = true;
                Ok(pred)
            } else {
                Err(Error::InvalidParameter(
                    "no lifespan table for the intermediate regime outside n = 2".into(),
                ))
            }
        }
        Regime::HeatLike => {
            let pf = fujita_exponent(n)?;
            let nf = n as f64;
            if p < pf {
                Ok(LifespanPrediction {
                    form: LifespanForm::PowerLaw,
                    exponent: -(p - 1.0) / (2.0 - nf * (p - 1.0)),
                    data_class,
                    theorem_backed: false,
                })
            } else if (p - pf).abs() < 1e-12 {
                Ok(LifespanPrediction {
                    form: LifespanForm::ExpPowerLaw,
                    exponent: p - 1.0,
                    data_class,
                    theorem_backed: false,
                })
            } else {
                Err(Error::InvalidParameter(
                    "p above the Fujita exponent: global existence expected".into(),
                ))
            }
        }
        Regime::WaveLike => {
            let d = n as f64 + params.mu_f64();
            let ps = strauss_exponent(d)?;
            if p < ps {
                Ok(LifespanPrediction {
                    form: LifespanForm::PowerLaw,
                    exponent: -2.0 * p * (p - 1.0) / gamma(p, d),
                    data_class,
                    theorem_backed: false,
                })
            } else if (p - ps).abs() < 1e-12 {
                Ok(LifespanPrediction {
                    form: LifespanForm::ExpPowerLaw,
                    exponent: p * (p - 1.0),
                    data_class,
                    theorem_backed: false,
                })
            } else {
                Err(Error::InvalidParameter(
                    "p above the shifted Strauss exponent: global existence expected".into(),
                ))
            }
        }
    }
}
