//! Compactly supported smooth radial initial data (f, g).
//!
//! The blow-up theory distinguishes two families of data on {|x| ≤ k}:
//!
//! * **Case A**: f ≡ 0 and g ≥ 0 (≢ 0), so ∫(f+g) dx = ∫g dx > 0;
//! * **Case B**: g = −f pointwise, so f + g ≡ 0. Within case B the
//!   sub-critical theorem wants f ≥ 0 while the critical one wants ∫f < 0.
//!
//! All generated profiles are built from the classical C^∞ mollifier
//! ψ(s) = exp(−1/(1−s²)) on |s| < 1. Case A is normalized so ∫g dx = 1,
//! and the negative-integral case so ∫f dx = −1; the amplitude ε of the
//! problem then scales data size on its own. Evaluators return exact zeros
//! outside the support, and radial derivatives are provided analytically
//! because the free-wave propagator differentiates under a singular integral.

use crate::exponents::DataClass;
use crate::quad::{integrate_gl, radial_integral_refined};
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;
use std::sync::OnceLock;

/// ψ(s) = exp(−1/(1−s²)) for |s| < 1, else 0.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// ψ'(s).
pub fn bump_d1(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let q = 1.0 - s * s;
        bump(s) * (-2.0 * s / (q * q))
    } else {
        0.0
    }
}

/// ψ''(s).
pub fn bump_d2(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let q = 1.0 - s * s;
        bump(s) * (4.0 * s * s / (q * q * q * q) - 2.0 * (1.0 + 3.0 * s * s) / (q * q * q))
    } else {
        0.0
    }
}

/// ∫₀¹ ψ(s) s ds, cached.
fn bump_moment() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| integrate_gl(|s| bump(s) * s, 0.0, 1.0, 200))
}

/// ∫_{−1}^{1} ψ(s) ds, cached.
fn bump_mass() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| 2.0 * integrate_gl(bump, 0.0, 1.0, 200))
}

/// Which generated family a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// f ≡ 0, g a nonnegative bump with ∫g dx = 1.
    CaseAZeroFBumpG,
    /// f a nonnegative bump with ∫f dx = 1, g = −f.
    CaseBPosF,
    /// f an inner bump minus an outer ring with ∫f dx = −1, g = −f.
    CaseBNegIntF,
    /// Caller-supplied radial evaluators.
    Custom,
}

impl ProfileKind {
    pub fn label(self) -> &'static str {
        match self {
            ProfileKind::CaseAZeroFBumpG => "case_a",
            ProfileKind::CaseBPosF => "case_b_pos_f",
            ProfileKind::CaseBNegIntF => "case_b_neg_int_f",
            ProfileKind::Custom => "custom",
        }
    }
}

/// Sign convention for [`DataProfile::case_b`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseBSign {
    /// f ≥ 0 (sub-critical blow-up hypothesis).
    PosF,
    /// ∫f dx < 0 (critical blow-up hypothesis).
    NegIntF,
}

type RadialEval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
struct CustomFns {
    f: RadialEval,
    g: RadialEval,
    f_prime: RadialEval,
    g_prime: RadialEval,
    lap_f: RadialEval,
    zero_sum: bool,
}

/// A radial initial pair (f, g) with analytic radial derivatives.
#[derive(Clone)]
pub struct DataProfile {
    kind: ProfileKind,
    k: f64,
    /// Normalization of the primary bump (case A: g; case B: f).
    amp: f64,
    /// Ring coefficient of the negative-integral profile, 0 otherwise.
    ring: f64,
    custom: Option<CustomFns>,
}

impl std::fmt::Debug for DataProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DataProfile")
            .field("kind", &self.kind)
            .field("k", &self.k)
            .field("amp", &self.amp)
            .field("ring", &self.ring)
            .finish()
    }
}

impl DataProfile {
    /// Case A data: f ≡ 0 and g(x) = c ψ(|x|/k) with ∫g dx = 1.
    pub fn case_a(k: f64) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "support radius must satisfy k >= 1, got {k}"
            )));
        }
        let amp = 1.0 / (2.0 * PI * k * k * bump_moment());
        Ok(DataProfile {
            kind: ProfileKind::CaseAZeroFBumpG,
            k,
            amp,
            ring: 0.0,
            custom: None,
        })
    }

    /// Case B data: g = −f exactly, with f chosen per `sign`.
    pub fn case_b(k: f64, sign: CaseBSign) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "support radius must satisfy k >= 1, got {k}"
            )));
        }
        match sign {
            CaseBSign::PosF => {
                let amp = 1.0 / (2.0 * PI * k * k * bump_moment());
                Ok(DataProfile {
                    kind: ProfileKind::CaseBPosF,
                    k,
                    amp,
                    ring: 0.0,
                    custom: None,
                })
            }
            CaseBSign::NegIntF => {
                // f(r) = ψ(2r/k) − c ψ(4 r/k − 3): an inner bump on r < k/2
                // and an outer ring on k/2 < r < k. The ring coefficient is
                // fixed so that ∫f dx = −1:
                //   ∫f dx = 2πk² (I₁/4 − c · (3/16) J₀),
                // with I₁ = ∫₀¹ψ s ds and J₀ = ∫_{−1}^{1}ψ ds.
                let i1 = bump_moment();
                let j0 = bump_mass();
                let ring = (i1 / 4.0 + 1.0 / (2.0 * PI * k * k)) * 16.0 / (3.0 * j0);
                Ok(DataProfile {
                    kind: ProfileKind::CaseBNegIntF,
                    k,
                    amp: 1.0,
                    ring,
                    custom: None,
                })
            }
        }
    }

    /// A profile from caller-supplied radial evaluators. `zero_sum` must be
    /// true iff g = −f identically.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        k: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lap_f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        zero_sum: bool,
    ) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "support radius must satisfy k >= 1, got {k}"
            )));
        }
        Ok(DataProfile {
            kind: ProfileKind::Custom,
            k,
            amp: 1.0,
            ring: 0.0,
            custom: Some(CustomFns {
                f: Arc::new(f),
                g: Arc::new(g),
                f_prime: Arc::new(f_prime),
                g_prime: Arc::new(g_prime),
                lap_f: Arc::new(lap_f),
                zero_sum,
            }),
        })
    }

    /// The identically-zero pair (useful as a degenerate control).
    pub fn zero(k: f64) -> Result<Self> {
        Self::custom(k, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0, true)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn support_radius(&self) -> f64 {
        self.k
    }

    fn neg_int_f(&self, r: f64) -> f64 {
        let k = self.k;
        bump(2.0 * r / k) - self.ring * bump(4.0 * r / k - 3.0)
    }

    fn neg_int_f_prime(&self, r: f64) -> f64 {
        let k = self.k;
        (2.0 / k) * bump_d1(2.0 * r / k) - self.ring * (4.0 / k) * bump_d1(4.0 * r / k - 3.0)
    }

    fn neg_int_f_d2(&self, r: f64) -> f64 {
        let k = self.k;
        (4.0 / (k * k)) * bump_d2(2.0 * r / k)
            - self.ring * (16.0 / (k * k)) * bump_d2(4.0 * r / k - 3.0)
    }

    /// f(|x|).
    pub fn f(&self, r: f64) -> f64 {
        match self.kind {
            ProfileKind::CaseAZeroFBumpG => 0.0,
            ProfileKind::CaseBPosF => self.amp * bump(r / self.k),
            ProfileKind::CaseBNegIntF => self.neg_int_f(r),
            ProfileKind::Custom => (self.custom.as_ref().unwrap().f)(r),
        }
    }

    /// g(|x|).
    pub fn g(&self, r: f64) -> f64 {
        match self.kind {
            ProfileKind::CaseAZeroFBumpG => self.amp * bump(r / self.k),
            ProfileKind::CaseBPosF | ProfileKind::CaseBNegIntF => -self.f(r),
            ProfileKind::Custom => (self.custom.as_ref().unwrap().g)(r),
        }
    }

    /// Radial derivative ∂_r f; the gradient is ∇f(x) = f'(|x|) x/|x|.
    pub fn f_prime(&self, r: f64) -> f64 {
        match self.kind {
            ProfileKind::CaseAZeroFBumpG => 0.0,
            ProfileKind::CaseBPosF => self.amp / self.k * bump_d1(r / self.k),
            ProfileKind::CaseBNegIntF => self.neg_int_f_prime(r),
            ProfileKind::Custom => (self.custom.as_ref().unwrap().f_prime)(r),
        }
    }

    /// Radial derivative ∂_r g.
    pub fn g_prime(&self, r: f64) -> f64 {
        match self.kind {
            ProfileKind::CaseAZeroFBumpG => self.amp / self.k * bump_d1(r / self.k),
            ProfileKind::CaseBPosF | ProfileKind::CaseBNegIntF => -self.f_prime(r),
            ProfileKind::Custom => (self.custom.as_ref().unwrap().g_prime)(r),
        }
    }

    /// Radial Laplacian Δf = f'' + f'/r, with the limit 2 f''(0) at r = 0.
    pub fn laplacian_f(&self, r: f64) -> f64 {
        let d2 = match self.kind {
            ProfileKind::CaseAZeroFBumpG => return 0.0,
            ProfileKind::CaseBPosF => self.amp / (self.k * self.k) * bump_d2(r / self.k),
            ProfileKind::CaseBNegIntF => self.neg_int_f_d2(r),
            ProfileKind::Custom => return (self.custom.as_ref().unwrap().lap_f)(r),
        };
        if r < 1e-12 {
            2.0 * d2
        } else {
            d2 + self.f_prime(r) / r
        }
    }

    /// Whether the profile was constructed with g = −f exactly.
    pub fn data_class(&self) -> DataClass {
        match self.kind {
            ProfileKind::CaseAZeroFBumpG => DataClass::NonzeroIntegral,
            ProfileKind::CaseBPosF | ProfileKind::CaseBNegIntF => DataClass::ZeroIntegral,
            ProfileKind::Custom => {
                if self.custom.as_ref().unwrap().zero_sum {
                    DataClass::ZeroIntegral
                } else {
                    DataClass::NonzeroIntegral
                }
            }
        }
    }

    /// Quadrature of the data integrals at the given radial resolution.
    ///
    /// Uses the trapezoid rule with one Richardson step; the returned error
    /// estimate is the extrapolation increment.
    pub fn integrals(&self, resolution: usize) -> Result<DataIntegrals> {
        if resolution == 0 {
            return Err(Error::InvalidParameter("resolution must be positive".into()));
        }
        let (int_f, err_f) = radial_integral_refined(|r| self.f(r), self.k, resolution);
        let (int_g, err_g) = radial_integral_refined(|r| self.g(r), self.k, resolution);
        if !int_f.is_finite() || !int_g.is_finite() {
            return Err(Error::InvalidParameter(
                "profile evaluators produced non-finite values".into(),
            ));
        }
        Ok(DataIntegrals {
            int_f,
            int_g,
            int_f_plus_g: int_f + int_g,
            data_class: self.data_class(),
            error_estimate: err_f + err_g,
        })
    }

    /// One-line reproducibility descriptor: kind, support radius and the
    /// normalization constants fixed at construction.
    pub fn descriptor(&self) -> String {
        format!(
            "kind={} k={:.17e} amp={:.17e} ring={:.17e}",
            self.kind.label(),
            self.k,
            self.amp,
            self.ring
        )
    }

    /// Rebuilds a generated profile from its [`descriptor`](Self::descriptor)
    /// line. Custom profiles do not round-trip.
    pub fn from_descriptor(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut k = None;
        for tok in s.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad descriptor token {tok:?}")))?;
            match key {
                "kind" => kind = Some(val.to_string()),
                "k" => {
                    k = Some(val.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("bad descriptor radius {val:?}"))
                    })?)
                }
                // Normalization constants are recomputed, not trusted.
                "amp" | "ring" => {}
                _ => return Err(Error::Parse(format!("unknown descriptor key {key:?}"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::Parse("descriptor missing kind".into()))?;
        let k = k.ok_or_else(|| Error::Parse("descriptor missing k".into()))?;
        match kind.as_str() {
            "case_a" => Self::case_a(k),
            "case_b_pos_f" => Self::case_b(k, CaseBSign::PosF),
            "case_b_neg_int_f" => Self::case_b(k, CaseBSign::NegIntF),
            other => Err(Error::Parse(format!(
                "cannot reconstruct profile of kind {other:?}"
            ))),
        }
    }
}

/// Data integrals and the induced classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataIntegrals {
    pub int_f: f64,
    pub int_g: f64,
    pub int_f_plus_g: f64,
    pub data_class: DataClass,
    pub error_estimate: f64,
}
