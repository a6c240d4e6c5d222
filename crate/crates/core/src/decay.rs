//! Decay-rate measurement: sweep a norm of the solution over a long time
//! window, fit the algebraic exponent in log-log coordinates, and compare
//! against the rate predicted by the growth of `(1∗l)`.
//!
//! The predicted L_r rate is `−(d/2)(1−1/r)` powers of `(1∗l)(t)` below the
//! critical dimension `d_crit(r) = 2r/(r−1)` and saturates at one full power
//! above it; the gradient picks up an extra half power and saturates already
//! at `d = r/(r−1)`.

use crate::field::{
    evolve, gradient_l2_norm, gradient_l2_norm_plancherel_radial, l2_norm_plancherel_radial,
    lp_norm, suggested_extent, weak_lp_quasinorm, Datum, RadialSpectrum,
};
use crate::fundsol::{self, weak_lp_radial, z_grid_fft};
use crate::kernels::KernelPair;
use crate::relaxation::fast_symbol;
use crate::{quad, Error, Result};

/// Which norm the sweep tracks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    Lp(f64),
    WeakLp(f64),
    GradientL2,
}

impl NormKind {
    fn integrability(&self) -> f64 {
        match self {
            NormKind::Lp(r) | NormKind::WeakLp(r) => *r,
            NormKind::GradientL2 => 2.0,
        }
    }
}

/// Least-squares power-law fit `ln v = slope · ln t + intercept` over a
/// window of the samples.
#[derive(Clone, Debug)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub slope: f64,
    pub intercept: f64,
    pub max_rel_residual: f64,
    pub n_points: usize,
}

/// Fit the decay exponent on samples with `t` inside `window`. Requires at
/// least five positive samples in the window.
pub fn fit_decay_exponent(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::Domain("times/values length mismatch".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t >= window.0 && t <= window.1 {
            if !(v > 0.0) {
                return Err(Error::Domain(format!(
                    "nonpositive sample {v} at t = {t}: exponent fit undefined"
                )));
            }
            xs.push(t.ln());
            ys.push(v.ln());
        }
    }
    let n = xs.len();
    if n < 5 {
        return Err(Error::Domain(format!(
            "only {n} samples in the fit window [{}, {}]",
            window.0, window.1
        )));
    }
    let nf = n as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = nf * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::Domain("degenerate fit window".into()));
    }
    let slope = (nf * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / nf;
    let max_rel_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0f64, f64::max);
    Ok(DecayFit {
        window,
        slope,
        intercept,
        max_rel_residual,
        n_points: n,
    })
}

/// Window covering the last `decades` decades of a time grid.
pub fn last_decades(times: &[f64], decades: f64) -> (f64, f64) {
    let hi = *times.last().unwrap();
    (hi / 10f64.powf(decades), hi)
}

/// Critical dimension of the L_r estimate: below it the datum-driven rate
/// holds, above it only the kernel rate survives.
pub fn critical_dimension(r: f64) -> f64 {
    2.0 * r / (r - 1.0)
}

/// Gradient counterpart (the extra half power saturates earlier).
pub fn gradient_critical_dimension(r: f64) -> f64 {
    r / (r - 1.0)
}

/// Slope of `ln (1∗l)(t)` against `ln t` over a time window, used as the
/// empirical kernel rate (equals α for the fractional pair).
pub fn kernel_rate(pair: &KernelPair, window: (f64, f64)) -> Result<f64> {
    let times = quad::log_spaced(window.0, window.1, 24);
    let mut vals = Vec::with_capacity(times.len());
    for &t in &times {
        vals.push(pair.eval_cumulative_l(t)?);
    }
    Ok(fit_decay_exponent(&times, &vals, window)?.slope)
}

/// Predicted decay exponent in powers of t.
pub fn predicted_rate(kind: NormKind, d: usize, rate_l: f64) -> f64 {
    let r = kind.integrability();
    let df = d as f64;
    match kind {
        NormKind::Lp(_) | NormKind::WeakLp(_) => {
            let datum_rate = (df / 2.0) * (1.0 - 1.0 / r);
            -rate_l * datum_rate.min(1.0)
        }
        NormKind::GradientL2 => {
            let datum_rate = 0.5 + (df / 2.0) * (1.0 - 1.0 / r);
            -rate_l * datum_rate.min(1.0)
        }
    }
}

/// One decay experiment: norms over a log time grid plus the fitted slope
/// and, where a kernel rate is fittable, the prediction.
#[derive(Clone, Debug)]
pub struct DecaySweep {
    pub kind: NormKind,
    pub d: usize,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: DecayFit,
    /// Fit over only the last decade; agreement with `fit` certifies the
    /// window is asymptotic.
    pub slope_last_decade: f64,
    pub rate_l: f64,
    pub predicted: f64,
}

impl DecaySweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm\n");
        for (t, v) in self.times.iter().zip(&self.norms) {
            out.push_str(&format!("{:.16e},{:.16e}\n", t, v));
        }
        out
    }
}

/// Compute the requested norm of `u(t)` for one time.
pub fn norm_at(pair: &KernelPair, d: usize, kind: NormKind, datum: &Datum, t: f64) -> Result<f64> {
    match kind {
        NormKind::Lp(r) if (r - 2.0).abs() < 1e-12 && datum.is_radial() => {
            let symbol = fast_symbol(pair, t)?;
            let spectrum = RadialSpectrum::new(d, datum.clone())?;
            l2_norm_plancherel_radial(symbol.as_ref(), &spectrum)
        }
        NormKind::GradientL2 => {
            if datum.is_radial() {
                let symbol = fast_symbol(pair, t)?;
                let spectrum = RadialSpectrum::new(d, datum.clone())?;
                gradient_l2_norm_plancherel_radial(symbol.as_ref(), &spectrum)
            } else {
                let (field, _) = evolve_on_grid(pair, d, datum, t)?;
                gradient_l2_norm(&field)
            }
        }
        NormKind::Lp(r) | NormKind::WeakLp(r) => {
            if d <= 3 {
                let (field, _) = evolve_on_grid(pair, d, datum, t)?;
                match kind {
                    NormKind::WeakLp(_) => weak_lp_quasinorm(&field, r),
                    _ => lp_norm(&field, r),
                }
            } else {
                // no tensor grid above d = 3: radial reconstruction
                let radii = fundsol::default_radii(pair, t, 24)?;
                let profile = fundsol::u_radial_hankel(pair, t, d, datum, &radii)?;
                match kind {
                    NormKind::WeakLp(_) => weak_lp_radial(&profile, r),
                    _ => radial_lp(&profile, r),
                }
            }
        }
    }
}

fn radial_lp(profile: &fundsol::RadialProfile, p: f64) -> Result<f64> {
    let d = profile.d as f64;
    let mut acc = 0.0;
    for i in 1..profile.radii.len() {
        let (r0, r1) = (profile.radii[i - 1], profile.radii[i]);
        let f0 = profile.values[i - 1].abs().powf(p) * r0.powf(d - 1.0);
        let f1 = profile.values[i].abs().powf(p) * r1.powf(d - 1.0);
        acc += 0.5 * (f0 * r0 + f1 * r1) * (r1 / r0).ln();
    }
    let r0 = profile.radii[0];
    acc += profile.values[0].abs().powf(p) * r0.powf(d) / d;
    Ok((crate::field::sphere_area(profile.d) * acc).powf(1.0 / p))
}

fn evolve_on_grid(
    pair: &KernelPair,
    d: usize,
    datum: &Datum,
    t: f64,
) -> Result<(crate::field::GridField, f64)> {
    let extent = suggested_extent(pair, t, datum.min_sigma())?;
    // resolve the datum: at least 10 cells per sigma, power of two
    let n_min = (10.0 * extent / datum.min_sigma()).max(128.0);
    let mut n = 128usize;
    while (n as f64) < n_min && n < if d == 1 { 1 << 18 } else if d == 2 { 2048 } else { 256 } {
        n <<= 1;
    }
    let u0 = datum.render(d, n, extent)?;
    Ok((evolve(pair, &u0, t)?, extent))
}

/// Run the sweep over `times` (log-spaced, ascending).
pub fn decay_sweep(
    pair: &KernelPair,
    d: usize,
    kind: NormKind,
    datum: &Datum,
    times: &[f64],
) -> Result<DecaySweep> {
    if times.len() < 10 {
        return Err(Error::Domain("decay sweep needs at least 10 times".into()));
    }
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        norms.push(norm_at(pair, d, kind, datum, t)?);
    }
    let window = last_decades(times, 2.0);
    let fit = fit_decay_exponent(times, &norms, window)?;
    let last = fit_decay_exponent(times, &norms, last_decades(times, 1.0))?;
    let rate_l = kernel_rate(pair, window)?;
    Ok(DecaySweep {
        kind,
        d,
        times: times.to_vec(),
        norms,
        fit,
        slope_last_decade: last.slope,
        rate_l,
        predicted: predicted_rate(kind, d, rate_l),
    })
}

/// Stability certificate of the two-sided bound `b ≤ |u(t)|₂ (1∗l)(t)^{p}
/// ≤ B`, `p = min{1, d/4}`: the compensated norm must neither vanish nor
/// blow up over the window.
#[derive(Clone, Debug)]
pub struct LowerBoundReport {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub infimum: f64,
    pub supremum: f64,
    /// Log-log slope of the ratio over the last decade; near zero means the
    /// compensated norm has leveled off.
    pub tail_slope: f64,
    pub stable: bool,
}

pub fn lower_bound_ratio(
    pair: &KernelPair,
    d: usize,
    datum: &Datum,
    times: &[f64],
) -> Result<LowerBoundReport> {
    if datum.mass() == 0.0 {
        return Err(Error::Domain(
            "the two-sided L2 bound assumes a datum with nonzero mass".into(),
        ));
    }
    let p = 1.0f64.min(d as f64 / 4.0);
    let mut ratios = Vec::with_capacity(times.len());
    for &t in times {
        let norm = norm_at(pair, d, NormKind::Lp(2.0), datum, t)?;
        ratios.push(norm * pair.eval_cumulative_l(t)?.powf(p));
    }
    let infimum = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let supremum = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let tail_slope = fit_decay_exponent(times, &ratios, last_decades(times, 1.0))?.slope;
    let stable = infimum > 0.0 && tail_slope.abs() <= 0.05;
    Ok(LowerBoundReport {
        times: times.to_vec(),
        ratios,
        infimum,
        supremum,
        tail_slope,
        stable,
    })
}

/// Large-time profile convergence for the fractional pair: the compensated
/// deviation `t^{(αd/2)(1−1/p)} |u(t) − M Z(t)|_p` should itself decay,
/// with log-log slope at most `−α/2` up to the fit tolerance.
#[derive(Clone, Debug)]
pub struct ProfileReport {
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
    pub fit: DecayFit,
}

pub fn large_time_profile(
    pair: &KernelPair,
    d: usize,
    p: f64,
    datum: &Datum,
    times: &[f64],
) -> Result<ProfileReport> {
    let alpha = match pair {
        KernelPair::Fractional { alpha } => *alpha,
        _ => {
            return Err(Error::Domain(
                "profile convergence rate is stated for the fractional pair".into(),
            ))
        }
    };
    if d > 3 {
        return Err(Error::Domain("profile comparison runs on tensor grids, d <= 3".into()));
    }
    let mass = datum.mass();
    let mut deviations = Vec::with_capacity(times.len());
    for &t in times {
        let (mut u, extent) = evolve_on_grid(pair, d, datum, t)?;
        // Z carries the full algebraic spectral tail; refine until the
        // aliasing guard is satisfied
        let n_cap = if d == 1 { 1 << 19 } else { 4096 };
        let z = loop {
            match z_grid_fft(pair, t, d, u.n, extent) {
                Ok(z) => break z,
                Err(Error::Resolution(_)) if u.n < n_cap => {
                    let u0 = datum.render(d, u.n * 2, extent)?;
                    u = evolve(pair, &u0, t)?;
                }
                Err(e) => return Err(e),
            }
        };
        let mut diff = u.clone();
        for (dv, zv) in diff.values_mut().iter_mut().zip(z.values()) {
            *dv -= mass * zv;
        }
        let dev = lp_norm(&diff, p)?;
        deviations.push(t.powf(alpha * d as f64 / 2.0 * (1.0 - 1.0 / p)) * dev);
    }
    let fit = fit_decay_exponent(times, &deviations, last_decades(times, 2.0))?;
    Ok(ProfileReport {
        times: times.to_vec(),
        deviations,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law_recovered() {
        let times = quad::log_spaced(1.0, 1e6, 60);
        let values: Vec<f64> = times.iter().map(|t| 3.7 * t.powf(-0.625)).collect();
        let fit = fit_decay_exponent(&times, &values, (1.0, 1e6)).unwrap();
        assert_relative_eq!(fit.slope, -0.625, epsilon = 1e-9);
        assert_relative_eq!(fit.intercept, 3.7f64.ln(), epsilon = 1e-9);
        assert!(fit.max_rel_residual < 1e-10);
    }

    #[test]
    fn perturbed_power_law_within_centipoint() {
        let times = quad::log_spaced(1.0, 1e6, 80);
        let values: Vec<f64> = times
            .iter()
            .enumerate()
            .map(|(i, t)| t.powf(-0.5) * (1.0 + 0.02 * ((i * 7 % 13) as f64 / 13.0 - 0.5)))
            .collect();
        let fit = fit_decay_exponent(&times, &values, (1.0, 1e6)).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.01, "slope {}", fit.slope);
    }

    #[test]
    fn log_factor_biases_narrow_windows() {
        // v = t^{−1/2} / ln t: the apparent slope over a late window is
        // slightly steeper than −1/2 and drifts toward it as the window moves out
        let times = quad::log_spaced(1e2, 1e10, 120);
        let values: Vec<f64> = times.iter().map(|t| t.powf(-0.5) / t.ln()).collect();
        let early = fit_decay_exponent(&times, &values, (1e2, 1e4)).unwrap();
        let late = fit_decay_exponent(&times, &values, (1e8, 1e10)).unwrap();
        assert!(early.slope < -0.5 && late.slope < -0.5);
        assert!(late.slope > early.slope, "drift toward the clean exponent");
        // local slope is -1/2 - 1/ln t, about -0.548 in the late window
        assert!((late.slope + 0.5 + 1.0 / 1e9f64.ln()).abs() < 0.01);
    }

    #[test]
    fn nonpositive_values_rejected() {
        let times = quad::log_spaced(1.0, 1e3, 20);
        let mut values: Vec<f64> = times.iter().map(|t| t.powf(-1.0)).collect();
        values[10] = 0.0;
        assert!(matches!(
            fit_decay_exponent(&times, &values, (1.0, 1e3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn critical_dimensions() {
        assert_relative_eq!(critical_dimension(2.0), 4.0);
        assert_relative_eq!(critical_dimension(3.0), 3.0);
        assert_relative_eq!(critical_dimension(11.0), 2.2);
        assert_relative_eq!(gradient_critical_dimension(2.0), 2.0);
    }

    #[test]
    fn predicted_rates_saturate() {
        // fractional α: rate_l = α
        let a = 0.5;
        assert_relative_eq!(predicted_rate(NormKind::Lp(2.0), 1, a), -0.125);
        assert_relative_eq!(predicted_rate(NormKind::Lp(2.0), 3, a), -0.375);
        assert_relative_eq!(predicted_rate(NormKind::Lp(2.0), 5, a), -0.5);
        assert_relative_eq!(predicted_rate(NormKind::GradientL2, 1, a), -0.375);
        assert_relative_eq!(predicted_rate(NormKind::GradientL2, 3, a), -0.5);
    }

    #[test]
    fn kernel_rate_fractional_is_alpha() {
        let pair = KernelPair::fractional(0.3).unwrap();
        let rate = kernel_rate(&pair, (1e2, 1e4)).unwrap();
        assert_relative_eq!(rate, 0.3, epsilon = 1e-10);
    }

    #[test]
    fn l2_sweep_fractional_d3() {
        let pair = KernelPair::fractional(0.5).unwrap();
        let datum = Datum::Gaussian { sigma: 1.0 };
        let times = quad::log_spaced(1.0, 1e6, 40);
        let sweep = decay_sweep(&pair, 3, NormKind::Lp(2.0), &datum, &times).unwrap();
        assert!(
            (sweep.fit.slope - sweep.predicted).abs() < 0.05,
            "slope {} vs predicted {}",
            sweep.fit.slope,
            sweep.predicted
        );
        assert!((sweep.slope_last_decade - sweep.fit.slope).abs() < 0.03);
    }

    #[test]
    fn lower_bound_requires_mass() {
        let pair = KernelPair::fractional(0.5).unwrap();
        let datum = Datum::GaussianDifference {
            sigma_a: 1.0,
            sigma_b: 2.0,
        };
        let times = quad::log_spaced(1.0, 1e4, 15);
        assert!(matches!(
            lower_bound_ratio(&pair, 2, &datum, &times),
            Err(Error::Domain(_))
        ));
    }
}
