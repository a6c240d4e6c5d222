//! Declarative experiment configs. The schema is strict: unknown fields are
//! rejected so a typo cannot silently weaken an acceptance run.

use anyhow::{bail, Context};
use serde::Deserialize;
use subdiff::field::Datum;
use subdiff::kernels::{KernelPair, TabulatedKernel};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Claim name; becomes the artifact directory stem if `out` is absent.
    pub name: String,
    #[serde(default)]
    pub out: Option<String>,
    pub experiment: ExperimentKind,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentKind {
    Relaxation(RelaxationCfg),
    BoundsSuite(BoundsSuiteCfg),
    DecaySweep(DecaySweepCfg),
    Fundsol(FundsolCfg),
    Energy(EnergyCfg),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxationCfg {
    pub pair: PairSpec,
    pub mu: f64,
    pub t_max: f64,
    pub n: usize,
    #[serde(default = "two")]
    pub grading: f64,
    /// Compare against the closed-form symbol (fractional pairs only) and
    /// check first-order refinement.
    #[serde(default)]
    pub oracle: bool,
    #[serde(default = "tol_1e4")]
    pub tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSuiteCfg {
    /// Defaults to all four built-in pairs.
    #[serde(default)]
    pub pairs: Option<Vec<PairSpec>>,
    pub times: TimesSpec,
    pub mu_values: Vec<f64>,
    #[serde(default = "tol_1e3")]
    pub tol: f64,
    /// Also run the complete-monotonicity and multiplier property checks.
    #[serde(default)]
    pub properties: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySweepCfg {
    pub pair: PairSpec,
    pub d: usize,
    pub datum: DatumSpec,
    pub times: TimesSpec,
    #[serde(default)]
    pub variant: SweepVariant,
    #[serde(default)]
    pub norm: Option<NormSpec>,
    /// Defaults to the rate predicted from the fitted kernel exponent.
    #[serde(default)]
    pub target_slope: Option<f64>,
    #[serde(default = "tol_005")]
    pub slope_tol: f64,
    /// Compensation exponent for the band variant; defaults to min{1, d/4}.
    #[serde(default)]
    pub log_power: Option<f64>,
    #[serde(default = "four")]
    pub max_ratio: f64,
    /// Integrability index for the profile variant.
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariant {
    #[default]
    NormSlope,
    CompensatedBand,
    LowerBound,
    Profile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FundsolCfg {
    pub pair: PairSpec,
    pub d: usize,
    pub times: TimesSpec,
    pub mode: FundsolMode,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub target_slope: Option<f64>,
    #[serde(default = "tol_005")]
    pub slope_tol: f64,
    #[serde(default)]
    pub expect_divergent: bool,
    #[serde(default = "thirty_two")]
    pub per_decade: usize,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum FundsolMode {
    Mass,
    Lp,
    WeakLp,
    Kochubei,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyCfg {
    pub alpha: f64,
    /// Sets γ = 1 + 4/d; alternatively give `gamma` directly.
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "one")]
    pub w0: f64,
    pub t_max: f64,
    pub n: usize,
    #[serde(default = "two")]
    pub grading: f64,
    #[serde(default = "tol_003")]
    pub slope_tol: f64,
}

impl EnergyCfg {
    pub fn gamma_exp(&self) -> anyhow::Result<f64> {
        match (self.gamma, self.d) {
            (Some(g), None) => Ok(g),
            (None, Some(d)) if d >= 1 => Ok(1.0 + 4.0 / d as f64),
            _ => bail!("energy config needs exactly one of `gamma` or `d`"),
        }
    }
}

#[derive(Debug, Deserialize, Clone)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PairSpec {
    Fractional { alpha: f64 },
    FractionalSum { terms: Vec<(f64, f64)> },
    Ultraslow {},
    SwitchedUltraslow {},
    Heat { t_max: f64 },
    Tabulated { k_csv: String, l_csv: String },
}

impl PairSpec {
    pub fn build(&self) -> anyhow::Result<KernelPair> {
        Ok(match self {
            PairSpec::Fractional { alpha } => KernelPair::fractional(*alpha)?,
            PairSpec::FractionalSum { terms } => KernelPair::fractional_sum(terms)?,
            PairSpec::Ultraslow {} => KernelPair::ultraslow(),
            PairSpec::SwitchedUltraslow {} => KernelPair::switched_ultraslow(),
            PairSpec::Heat { t_max } => KernelPair::heat(*t_max),
            PairSpec::Tabulated { k_csv, l_csv } => {
                let k = std::fs::read_to_string(k_csv)
                    .with_context(|| format!("reading {k_csv}"))?;
                let l = std::fs::read_to_string(l_csv)
                    .with_context(|| format!("reading {l_csv}"))?;
                KernelPair::tabulated(TabulatedKernel::from_csv(&k)?, TabulatedKernel::from_csv(&l)?)
            }
        })
    }
}

#[derive(Debug, Deserialize, Clone)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DatumSpec {
    Gaussian { sigma: f64 },
    ShiftedGaussian { sigma: f64, shift: f64 },
    GaussianDifference { sigma_a: f64, sigma_b: f64 },
}

impl DatumSpec {
    pub fn build(&self) -> Datum {
        match *self {
            DatumSpec::Gaussian { sigma } => Datum::Gaussian { sigma },
            DatumSpec::ShiftedGaussian { sigma, shift } => {
                Datum::ShiftedGaussian { sigma, shift }
            }
            DatumSpec::GaussianDifference { sigma_a, sigma_b } => {
                Datum::GaussianDifference { sigma_a, sigma_b }
            }
        }
    }
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct TimesSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl TimesSpec {
    pub fn grid(&self) -> Vec<f64> {
        subdiff::quad::log_spaced(self.lo, self.hi, self.count)
    }
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum NormSpec {
    Lp { r: f64 },
    WeakLp { r: f64 },
    GradientL2 {},
}

impl NormSpec {
    pub fn kind(&self) -> subdiff::decay::NormKind {
        match *self {
            NormSpec::Lp { r } => subdiff::decay::NormKind::Lp(r),
            NormSpec::WeakLp { r } => subdiff::decay::NormKind::WeakLp(r),
            NormSpec::GradientL2 {} => subdiff::decay::NormKind::GradientL2,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn four() -> f64 {
    4.0
}
fn tol_1e3() -> f64 {
    1e-3
}
fn tol_1e4() -> f64 {
    1e-4
}
fn tol_005() -> f64 {
    0.05
}
fn tol_003() -> f64 {
    0.03
}
fn thirty_two() -> usize {
    32
}
