//! Admissible kernel pairs `(k, l)` of type PC: `k` nonnegative and
//! nonincreasing, `k ∗ l ≡ 1` on `(0, ∞)`. The non-local time derivative is
//! `∂t(k ∗ ·)` and all decay rates downstream are expressed through the
//! cumulative `(1 ∗ l)(t)`.
//!
//! Built-in pairs:
//! * `Fractional(α)`: `k = g_{1−α}`, `l = g_α` with `g_β(t) = t^{β−1}/Γ(β)`,
//! * `FractionalSum`: `k = Σ_j δ_j g_{1−α_j}`, `l` by numerical deconvolution,
//! * `Ultraslow`: `k(t) = ∫₀¹ g_β(t) dβ`, `l(t) = e^t E₁(t)`,
//! * `SwitchedUltraslow`: the same pair with the roles of `k` and `l` swapped,
//! * `Tabulated`: both kernels sampled on a grid (CSV escape hatch).
//!
//! Besides the pointwise evaluators, every pair exposes closed-form or
//! table-exact cumulatives `(1∗l)`, `(1∗1∗l)` and `(1∗k)`; the relaxation
//! solver builds its product-integration moments from these.

use crate::special_functions::{exp_e1, gamma, ln_gamma, EULER_GAMMA};
use crate::{quad, Error, Result};

/// Points per decade of the deconvolution mesh for `FractionalSum`.
const DECONV_PPD: f64 = 96.0;
const DECONV_T_MIN: f64 = 1e-10;
const DECONV_T_MAX: f64 = 1e9;

/// A PC kernel pair. Immutable after construction; all evaluators are pure.
#[derive(Clone, Debug)]
pub enum KernelPair {
    /// `k = g_{1−α}`, `l = g_α`; the time-fractional case.
    Fractional { alpha: f64 },
    /// `k = Σ_j δ_j g_{1−α_j}`; `l` deconvolved at construction.
    FractionalSum {
        /// `(α_j, δ_j)` sorted by increasing α, all α in (0,1), δ > 0.
        terms: Vec<(f64, f64)>,
        deconv: DeconvTable,
    },
    /// Distributed-order `k(t) = ∫₀¹ g_β(t) dβ`, `l(t) = e^t E₁(t)`.
    Ultraslow,
    /// `k(t) = e^t E₁(t)`, `l(t) = ∫₀¹ g_β(t) dβ`.
    SwitchedUltraslow,
    /// Sampled kernels with linear interpolation, hard error outside the grid.
    Tabulated {
        k: TabulatedKernel,
        l: TabulatedKernel,
    },
}

impl KernelPair {
    pub fn fractional(alpha: f64) -> Result<Self> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "fractional pair requires alpha in (0,1), got {alpha}"
            )));
        }
        Ok(KernelPair::Fractional { alpha })
    }

    /// `terms` are `(α_j, δ_j)` pairs; order is normalized internally.
    pub fn fractional_sum(terms: &[(f64, f64)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("fractional sum needs at least one term".into()));
        }
        let mut terms = terms.to_vec();
        terms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for &(a, d) in &terms {
            if !(0.0 < a && a < 1.0) || d <= 0.0 {
                return Err(Error::Domain(format!(
                    "fractional sum term (alpha={a}, delta={d}) out of range"
                )));
            }
        }
        let deconv = DeconvTable::build(&terms)?;
        Ok(KernelPair::FractionalSum { terms, deconv })
    }

    pub fn ultraslow() -> Self {
        KernelPair::Ultraslow
    }

    pub fn switched_ultraslow() -> Self {
        KernelPair::SwitchedUltraslow
    }

    pub fn tabulated(k: TabulatedKernel, l: TabulatedKernel) -> Self {
        KernelPair::Tabulated { k, l }
    }

    /// The heat-equation limit `k ≡ 1`, `l ≡ 1` on `[0, t_max]`, for which
    /// the tabulated cumulatives are exact.
    pub fn heat(t_max: f64) -> Self {
        let k = TabulatedKernel::from_samples(vec![0.0, t_max], vec![1.0, 1.0]).unwrap();
        let l = k.clone();
        KernelPair::Tabulated { k: k.clone(), l }
    }

    pub fn label(&self) -> String {
        match self {
            KernelPair::Fractional { alpha } => format!("fractional(alpha={alpha})"),
            KernelPair::FractionalSum { terms, .. } => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(a, d)| format!("{d}*g_(1-{a})"))
                    .collect();
                format!("fractional-sum({})", parts.join("+"))
            }
            KernelPair::Ultraslow => "ultraslow".into(),
            KernelPair::SwitchedUltraslow => "switched-ultraslow".into(),
            KernelPair::Tabulated { .. } => "tabulated".into(),
        }
    }

    /// `k(t)`, `t > 0`.
    pub fn eval_k(&self, t: f64) -> Result<f64> {
        positive_t(t)?;
        match self {
            KernelPair::Fractional { alpha } => Ok(g_beta(1.0 - alpha, t)),
            KernelPair::FractionalSum { terms, .. } => {
                Ok(terms.iter().map(|&(a, d)| d * g_beta(1.0 - a, t)).sum())
            }
            KernelPair::Ultraslow => Ok(distributed_g(t)),
            KernelPair::SwitchedUltraslow => exp_e1(t),
            KernelPair::Tabulated { k, .. } => k.value(t),
        }
    }

    /// `l(t)`, `t > 0`. For `FractionalSum` this is the deconvolved
    /// piecewise-constant cell average.
    pub fn eval_l(&self, t: f64) -> Result<f64> {
        positive_t(t)?;
        match self {
            KernelPair::Fractional { alpha } => Ok(g_beta(*alpha, t)),
            KernelPair::FractionalSum { deconv, .. } => deconv.value(t),
            KernelPair::Ultraslow => exp_e1(t),
            KernelPair::SwitchedUltraslow => Ok(distributed_g(t)),
            KernelPair::Tabulated { l, .. } => l.value(t),
        }
    }

    /// `(1∗l)(t)`, `t ≥ 0`.
    pub fn eval_cumulative_l(&self, t: f64) -> Result<f64> {
        nonnegative_t(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self {
            KernelPair::Fractional { alpha } => Ok(g_beta(1.0 + alpha, t)),
            KernelPair::FractionalSum { deconv, .. } => deconv.cumulative(t),
            KernelPair::Ultraslow => Ok(cumulative_exp_e1(t)),
            KernelPair::SwitchedUltraslow => Ok(distributed_cumulative1(t)),
            KernelPair::Tabulated { l, .. } => l.cumulative(t),
        }
    }

    /// `(1∗1∗l)(t)`, `t ≥ 0`; the second cumulative the product-integration
    /// moments are assembled from.
    pub fn eval_cumulative2_l(&self, t: f64) -> Result<f64> {
        nonnegative_t(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self {
            KernelPair::Fractional { alpha } => Ok(g_beta(2.0 + alpha, t)),
            KernelPair::FractionalSum { deconv, .. } => deconv.cumulative2(t),
            KernelPair::Ultraslow => Ok(cumulative2_exp_e1(t)),
            KernelPair::SwitchedUltraslow => Ok(distributed_cumulative2(t)),
            KernelPair::Tabulated { l, .. } => l.cumulative2(t),
        }
    }

    /// `(1∗k)(t)`, `t ≥ 0`.
    pub fn eval_cumulative_k(&self, t: f64) -> Result<f64> {
        nonnegative_t(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self {
            KernelPair::Fractional { alpha } => Ok(g_beta(2.0 - alpha, t)),
            KernelPair::FractionalSum { terms, .. } => Ok(terms
                .iter()
                .map(|&(a, d)| d * g_beta(2.0 - a, t))
                .sum()),
            KernelPair::Ultraslow => Ok(distributed_cumulative1(t)),
            KernelPair::SwitchedUltraslow => Ok(cumulative_exp_e1(t)),
            KernelPair::Tabulated { k, .. } => k.cumulative(t),
        }
    }

    /// Numerical certificate of condition (PC) on `grid`: `(k∗l)(t_i) = 1`
    /// within `tol`, `k` nonincreasing, `l` nonnegative.
    pub fn verify_pair(&self, grid: &[f64], tol: f64) -> Result<PairReport> {
        let mut report = PairReport {
            tol,
            ..PairReport::default()
        };
        let mut prev_k: Option<f64> = None;
        for &t in grid {
            if t <= 0.0 {
                continue;
            }
            let kv = self.eval_k(t)?;
            let lv = self.eval_l(t)?;
            if let Some(pk) = prev_k {
                if kv > pk * (1.0 + 1e-12) + 1e-300 {
                    report.k_monotonicity_violations += 1;
                }
            }
            prev_k = Some(kv);
            if lv < 0.0 {
                report.l_sign_violations += 1;
            }
            let conv = self.convolve_kl(t)?;
            let dev = (conv - 1.0).abs();
            if dev > report.max_conv_deviation {
                report.max_conv_deviation = dev;
                report.worst_t = t;
            }
        }
        if matches!(self, KernelPair::Ultraslow) {
            report.ultraslow_log_t1 = self.ultraslow_log_t1();
        }
        report.pass = report.max_conv_deviation <= tol
            && report.k_monotonicity_violations == 0
            && report.l_sign_violations == 0;
        Ok(report)
    }

    /// `(k∗l)(t)` by symmetric splitting at `t/2` with cumulative head
    /// corrections absorbing both endpoint singularities.
    pub fn convolve_kl(&self, t: f64) -> Result<f64> {
        positive_t(t)?;
        let a = 1e-7 * t;
        // ∫_0^a k(t−τ) l(τ) dτ ≈ k(t) (1∗l)(a), and symmetrically.
        let mut acc = self.eval_k(t)? * self.eval_cumulative_l(a)?
            + self.eval_l(t)? * self.eval_cumulative_k(a)?;
        let rule = quad::gauss_legendre(16);
        let panels = 64;
        let ratio = (0.5 * t / a).powf(1.0 / panels as f64);
        let mut lo = a;
        for _ in 0..panels {
            let hi = lo * ratio;
            let mut err = None;
            acc += rule.integrate(lo, hi, |tau| {
                match (self.eval_k(t - tau), self.eval_l(tau)) {
                    (Ok(kv), Ok(lv)) => kv * lv,
                    (Err(e), _) | (_, Err(e)) => {
                        err = Some(e);
                        0.0
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            let mut err = None;
            acc += rule.integrate(lo, hi, |sigma| {
                match (self.eval_l(t - sigma), self.eval_k(sigma)) {
                    (Ok(lv), Ok(kv)) => lv * kv,
                    (Err(e), _) | (_, Err(e)) => {
                        err = Some(e);
                        0.0
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            lo = hi;
        }
        Ok(acc)
    }

    /// Smallest T₁ ≥ 1 after which `log t ≤ 2 (1∗l)(t)` holds on a sample
    /// sweep (ultraslow pair only; the bound is asymptotic).
    fn ultraslow_log_t1(&self) -> Option<f64> {
        let ts = quad::log_spaced(1.0001, 1e8, 400);
        let mut t1 = None;
        for &t in ts.iter().rev() {
            let lhs = t.ln();
            let rhs = 2.0 * self.eval_cumulative_l(t).ok()?;
            if lhs <= rhs {
                t1 = Some(t);
            } else {
                break;
            }
        }
        t1
    }
}

fn positive_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel evaluation requires t > 0, got {t}")))
    }
}

fn nonnegative_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "cumulative evaluation requires t >= 0, got {t}"
        )))
    }
}

/// Certificate produced by [`KernelPair::verify_pair`].
#[derive(Clone, Debug, Default)]
pub struct PairReport {
    pub max_conv_deviation: f64,
    pub worst_t: f64,
    pub k_monotonicity_violations: usize,
    pub l_sign_violations: usize,
    pub tol: f64,
    /// Ultraslow pair only: smallest sampled T₁ with `log t ≤ 2(1∗l)(t)`
    /// for all sampled t ≥ T₁.
    pub ultraslow_log_t1: Option<f64>,
    pub pass: bool,
}

/// `g_β(t) = t^{β−1}/Γ(β)`.
pub fn g_beta(beta: f64, t: f64) -> f64 {
    t.powf(beta - 1.0) / gamma(beta).expect("beta > 0")
}

/// `∫₀¹ g_β(t) dβ` by 64-point Gauss–Legendre in β; the integrand is
/// evaluated as `exp((β−1) ln t − ln Γ(β))` to stay in range for t ≪ 1.
fn distributed_g(t: f64) -> f64 {
    let ln_t = t.ln();
    quad::gauss_legendre(64).integrate(0.0, 1.0, |beta| {
        // ln Γ(β) → ∞ as β → 0+, so the integrand vanishes at that edge.
        ((beta - 1.0) * ln_t - ln_gamma(beta).unwrap()).exp()
    })
}

/// `∫₀¹ t^β/Γ(1+β) dβ = (1∗k)` for the ultraslow kernel.
fn distributed_cumulative1(t: f64) -> f64 {
    let ln_t = t.ln();
    quad::gauss_legendre(64).integrate(0.0, 1.0, |beta| {
        (beta * ln_t - ln_gamma(1.0 + beta).unwrap()).exp()
    })
}

/// `∫₀¹ t^{1+β}/Γ(2+β) dβ`.
fn distributed_cumulative2(t: f64) -> f64 {
    let ln_t = t.ln();
    quad::gauss_legendre(64).integrate(0.0, 1.0, |beta| {
        ((1.0 + beta) * ln_t - ln_gamma(2.0 + beta).unwrap()).exp()
    })
}

/// `∫₀^t e^s E₁(s) ds = e^t E₁(t) + ln t + γ`, with a series for small t
/// where the closed form cancels.
fn cumulative_exp_e1(t: f64) -> f64 {
    if t < 1e-4 {
        t * (1.0 - EULER_GAMMA - t.ln()) + t * t * (0.75 - 0.5 * EULER_GAMMA - 0.5 * t.ln())
    } else {
        exp_e1(t).unwrap() + t.ln() + EULER_GAMMA
    }
}

/// `∫₀^t ∫₀^s e^r E₁(r) dr ds = e^t E₁(t) + ln t + γ + t ln t − t + γ t`.
fn cumulative2_exp_e1(t: f64) -> f64 {
    if t < 1e-4 {
        let t2 = t * t;
        t2 * (0.75 - 0.5 * EULER_GAMMA - 0.5 * t.ln())
            + t2 * t * (0.25 - EULER_GAMMA / 6.0 + 1.0 / 18.0 - t.ln() / 6.0)
    } else {
        exp_e1(t).unwrap() + t.ln() + EULER_GAMMA + t * t.ln() - t + EULER_GAMMA * t
    }
}

/// Piecewise-constant representation of the deconvolved `l` for
/// `FractionalSum`, on a geometric mesh. Marching enforces the discrete
/// resolvent equation `Σ_j l̄_j [K(t_i−t_{j−1}) − K(t_i−t_j)] = 1` with the
/// exact cumulative `K = 1∗k`, so `(k∗l)(t_i) = 1` holds at every node by
/// construction.
#[derive(Clone, Debug)]
pub struct DeconvTable {
    /// Node times, `nodes[0] = 0`.
    nodes: Vec<f64>,
    /// Cell averages; `lbar[i]` lives on `[nodes[i], nodes[i+1]]`.
    lbar: Vec<f64>,
    /// `(1∗l)` at the nodes.
    cum: Vec<f64>,
    /// `(1∗1∗l)` at the nodes.
    cum2: Vec<f64>,
}

impl DeconvTable {
    fn build(terms: &[(f64, f64)]) -> Result<Self> {
        let cumulative_k = |t: f64| -> f64 {
            terms.iter().map(|&(a, d)| d * g_beta(2.0 - a, t)).sum()
        };
        let nodes = quad::geometric_mesh_with_zero(DECONV_T_MIN, DECONV_T_MAX, DECONV_PPD);
        let n = nodes.len() - 1;
        let mut lbar = vec![0.0; n];
        for i in 0..n {
            let ti = nodes[i + 1];
            let mut history = 0.0;
            for (j, &lb) in lbar.iter().enumerate().take(i) {
                history += lb * (cumulative_k(ti - nodes[j]) - cumulative_k(ti - nodes[j + 1]));
            }
            let pivot = cumulative_k(ti - nodes[i]);
            if pivot <= 0.0 {
                return Err(Error::Singular(format!(
                    "deconvolution pivot {pivot} at t = {ti}"
                )));
            }
            let v = (1.0 - history) / pivot;
            if v < 0.0 {
                return Err(Error::Singular(format!(
                    "deconvolved l negative ({v}) at t = {ti}"
                )));
            }
            lbar[i] = v;
        }
        let mut cum = vec![0.0; n + 1];
        let mut cum2 = vec![0.0; n + 1];
        for i in 0..n {
            let dt = nodes[i + 1] - nodes[i];
            cum[i + 1] = cum[i] + lbar[i] * dt;
            cum2[i + 1] = cum2[i] + cum[i] * dt + 0.5 * lbar[i] * dt * dt;
        }
        Ok(DeconvTable {
            nodes,
            lbar,
            cum,
            cum2,
        })
    }

    /// Index of the cell containing `t`.
    fn cell(&self, t: f64) -> Result<usize> {
        let t_max = *self.nodes.last().unwrap();
        if t > t_max {
            return Err(Error::Extrapolation(format!(
                "deconvolved l queried at t = {t} beyond table end {t_max}"
            )));
        }
        let i = match self
            .nodes
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Ok(i.min(self.lbar.len() - 1))
    }

    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.lbar[self.cell(t)?])
    }

    fn cumulative(&self, t: f64) -> Result<f64> {
        let i = self.cell(t)?;
        Ok(self.cum[i] + self.lbar[i] * (t - self.nodes[i]))
    }

    fn cumulative2(&self, t: f64) -> Result<f64> {
        let i = self.cell(t)?;
        let s = t - self.nodes[i];
        Ok(self.cum2[i] + self.cum[i] * s + 0.5 * self.lbar[i] * s * s)
    }
}

/// A sampled kernel with linear interpolation between nodes and exact
/// piecewise-polynomial cumulatives. Queries outside `[t_0, t_n]` are hard
/// errors; cumulatives additionally require `t_0 = 0`.
#[derive(Clone, Debug)]
pub struct TabulatedKernel {
    t: Vec<f64>,
    v: Vec<f64>,
    cum: Vec<f64>,
    cum2: Vec<f64>,
}

impl TabulatedKernel {
    pub fn from_samples(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() || t.len() < 2 {
            return Err(Error::Config(
                "tabulated kernel needs >= 2 samples with matching lengths".into(),
            ));
        }
        for w in t.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config(format!(
                    "tabulated kernel grid not strictly increasing at t = {}",
                    w[1]
                )));
            }
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("tabulated kernel has non-finite values".into()));
        }
        let n = t.len();
        let mut cum = vec![0.0; n];
        let mut cum2 = vec![0.0; n];
        for i in 1..n {
            let dt = t[i] - t[i - 1];
            let (va, vb) = (v[i - 1], v[i]);
            cum[i] = cum[i - 1] + 0.5 * (va + vb) * dt;
            // ∫ of the quadratic cumulative over the cell
            let m = (vb - va) / dt;
            cum2[i] = cum2[i - 1] + cum[i - 1] * dt + 0.5 * va * dt * dt + m * dt * dt * dt / 6.0;
        }
        Ok(TabulatedKernel { t, v, cum, cum2 })
    }

    /// Parse a two-column CSV with header `t,value` and strictly
    /// increasing t.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty kernel CSV".into()))?;
        if header.trim() != "t,value" {
            return Err(Error::Config(format!(
                "kernel CSV header must be `t,value`, got `{header}`"
            )));
        }
        let mut t = Vec::new();
        let mut v = Vec::new();
        for (idx, line) in lines.enumerate() {
            let mut parts = line.split(',');
            let (a, b) = (parts.next(), parts.next());
            match (a, b, parts.next()) {
                (Some(a), Some(b), None) => {
                    let ta: f64 = a.trim().parse().map_err(|e| {
                        Error::Config(format!("kernel CSV line {}: bad t: {e}", idx + 2))
                    })?;
                    let va: f64 = b.trim().parse().map_err(|e| {
                        Error::Config(format!("kernel CSV line {}: bad value: {e}", idx + 2))
                    })?;
                    t.push(ta);
                    v.push(va);
                }
                _ => {
                    return Err(Error::Config(format!(
                        "kernel CSV line {}: expected two columns",
                        idx + 2
                    )))
                }
            }
        }
        Self::from_samples(t, v)
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (lo, hi) = (self.t[0], *self.t.last().unwrap());
        if t < lo || t > hi {
            return Err(Error::Extrapolation(format!(
                "tabulated kernel queried at t = {t} outside [{lo}, {hi}]"
            )));
        }
        let i = match self.t.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Ok(i.min(self.t.len() - 2))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        let dt = self.t[i + 1] - self.t[i];
        let w = (t - self.t[i]) / dt;
        Ok(self.v[i] * (1.0 - w) + self.v[i + 1] * w)
    }

    /// `∫₀^t v`, requiring the grid to start at 0.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        self.require_zero_origin()?;
        let i = self.locate(t)?;
        let dt = self.t[i + 1] - self.t[i];
        let s = t - self.t[i];
        let m = (self.v[i + 1] - self.v[i]) / dt;
        Ok(self.cum[i] + self.v[i] * s + 0.5 * m * s * s)
    }

    /// `∫₀^t ∫₀^s v`, requiring the grid to start at 0.
    pub fn cumulative2(&self, t: f64) -> Result<f64> {
        self.require_zero_origin()?;
        let i = self.locate(t)?;
        let dt = self.t[i + 1] - self.t[i];
        let s = t - self.t[i];
        let m = (self.v[i + 1] - self.v[i]) / dt;
        Ok(self.cum2[i] + self.cum[i] * s + 0.5 * self.v[i] * s * s + m * s * s * s / 6.0)
    }

    fn require_zero_origin(&self) -> Result<()> {
        if self.t[0] == 0.0 {
            Ok(())
        } else {
            Err(Error::Extrapolation(format!(
                "cumulative of a tabulated kernel needs the grid to start at 0, starts at {}",
                self.t[0]
            )))
        }
    }
}
