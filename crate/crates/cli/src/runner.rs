//! Experiment execution and artifact serialization.
//!
//! Every run writes three artifacts into the output directory:
//! `series.csv` (the primary data series), `fit.json` (fitted quantities),
//! and `report.json` (one pass/fail row per claim). All floats are printed
//! with 17 significant digits so reruns byte-reproduce.

use anyhow::{bail, Context, Result};
use std::fmt::Write as _;
use std::path::Path;

use subdiff::decay::{
    decay_sweep, fit_decay_exponent, large_time_profile, last_decades, lower_bound_ratio, norm_at,
    NormKind,
};
use subdiff::energy::{power_bound_fit, solve_fractional_ode};
use subdiff::fundsol::{
    default_radii, kochubei_bound_check, mass_check, z_lp_norm, z_radial_hankel, z_weak_lp, ZNorm,
};
use subdiff::kernels::KernelPair;
use subdiff::quad;
use subdiff::relaxation::{
    complete_monotonicity_check, multiplier_bound_check, solve_relaxation, verify_smu_bounds,
};
use subdiff::special_functions::mittag_leffler_neg;

use crate::config::*;

pub struct Claim {
    pub name: String,
    pub target: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Claim {
    /// `measured` within `tol` of `target`.
    fn near(name: impl Into<String>, target: f64, measured: f64, tol: f64) -> Self {
        Claim {
            name: name.into(),
            target,
            measured,
            tolerance: tol,
            pass: (measured - target).abs() <= tol,
        }
    }

    /// `measured` at most `bound`.
    fn at_most(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        Claim {
            name: name.into(),
            target: bound,
            measured,
            tolerance: 0.0,
            pass: measured <= bound,
        }
    }

    /// `measured` at least `bound`.
    fn at_least(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        Claim {
            name: name.into(),
            target: bound,
            measured,
            tolerance: 0.0,
            pass: measured >= bound,
        }
    }
}

pub struct RunOutput {
    pub series: String,
    pub fit: Vec<(String, f64)>,
    pub claims: Vec<Claim>,
}

impl RunOutput {
    pub fn pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }
}

fn f17(x: f64) -> String {
    format!("{:.16e}", x)
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn write_artifacts(dir: &Path, name: &str, out: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("series.csv"), &out.series)?;
    let mut fit = String::from("{\n");
    for (i, (k, v)) in out.fit.iter().enumerate() {
        let sep = if i + 1 == out.fit.len() { "" } else { "," };
        writeln!(fit, "  \"{}\": {}{}", json_escape(k), f17(*v), sep)?;
    }
    fit.push_str("}\n");
    std::fs::write(dir.join("fit.json"), fit)?;
    let mut rep = String::new();
    writeln!(rep, "{{")?;
    writeln!(rep, "  \"name\": \"{}\",", json_escape(name))?;
    writeln!(rep, "  \"pass\": {},", out.pass())?;
    writeln!(rep, "  \"claims\": [")?;
    for (i, c) in out.claims.iter().enumerate() {
        let sep = if i + 1 == out.claims.len() { "" } else { "," };
        writeln!(
            rep,
            "    {{\"name\": \"{}\", \"target\": {}, \"measured\": {}, \"tolerance\": {}, \"pass\": {}}}{}",
            json_escape(&c.name),
            f17(c.target),
            f17(c.measured),
            f17(c.tolerance),
            c.pass,
            sep
        )?;
    }
    writeln!(rep, "  ]")?;
    writeln!(rep, "}}")?;
    std::fs::write(dir.join("report.json"), rep)?;
    Ok(())
}

pub fn run(kind: &ExperimentKind, tol_scale: f64) -> Result<RunOutput> {
    match kind {
        ExperimentKind::Relaxation(cfg) => run_relaxation(cfg, tol_scale),
        ExperimentKind::BoundsSuite(cfg) => run_bounds(cfg, tol_scale),
        ExperimentKind::DecaySweep(cfg) => run_decay(cfg, tol_scale),
        ExperimentKind::Fundsol(cfg) => run_fundsol(cfg, tol_scale),
        ExperimentKind::Energy(cfg) => run_energy(cfg, tol_scale),
    }
}

fn run_relaxation(cfg: &RelaxationCfg, tol_scale: f64) -> Result<RunOutput> {
    let pair = cfg.pair.build()?;
    let grid = quad::graded_mesh(cfg.t_max, cfg.n, cfg.grading);
    let s = solve_relaxation(&pair, cfg.mu, &grid)?;
    let mut series = String::from("t,s\n");
    for (t, v) in grid.iter().zip(&s) {
        writeln!(series, "{},{}", f17(*t), f17(*v))?;
    }
    let mut fit = Vec::new();
    let mut claims = Vec::new();
    if cfg.oracle {
        let alpha = match &pair {
            KernelPair::Fractional { alpha } => *alpha,
            _ => bail!("the closed-form oracle applies to fractional pairs only"),
        };
        let err_on = |n: usize| -> Result<f64> {
            let g = quad::graded_mesh(cfg.t_max, n, cfg.grading);
            let s = solve_relaxation(&pair, cfg.mu, &g)?;
            let mut e = 0.0f64;
            for (t, v) in g.iter().zip(&s).skip(1) {
                e = e.max((v - mittag_leffler_neg(alpha, cfg.mu * t.powf(alpha))?).abs());
            }
            Ok(e)
        };
        let (e1, e2) = (err_on(cfg.n)?, err_on(cfg.n * 2)?);
        fit.push(("max_error".into(), e1));
        fit.push(("refine_ratio".into(), e1 / e2));
        claims.push(Claim::at_most("oracle max error", cfg.tol * tol_scale, e1));
        claims.push(Claim::at_least("refinement ratio", 1.8, e1 / e2));
    } else {
        let end = *s.last().unwrap();
        fit.push(("final_value".into(), end));
        claims.push(Claim::at_least("s stays in (0,1]", 0.0, end));
        claims.push(Claim::at_most("s stays in (0,1]", 1.0, s.iter().cloned().fold(0.0, f64::max)));
    }
    Ok(RunOutput { series, fit, claims })
}

fn run_bounds(cfg: &BoundsSuiteCfg, tol_scale: f64) -> Result<RunOutput> {
    let pairs: Vec<KernelPair> = match &cfg.pairs {
        Some(specs) => specs.iter().map(|p| p.build()).collect::<Result<_>>()?,
        None => vec![
            KernelPair::fractional(0.5)?,
            KernelPair::fractional_sum(&[(0.3, 1.0), (0.7, 1.0)])?,
            KernelPair::ultraslow(),
            KernelPair::switched_ultraslow(),
        ],
    };
    let ts = cfg.times.grid();
    let mut series = String::from("pair,worst_rel_violation,worst_t,worst_mu\n");
    let mut fit = Vec::new();
    let mut claims = Vec::new();
    for pair in &pairs {
        let report = verify_smu_bounds(pair, &ts, &cfg.mu_values, None, cfg.tol * tol_scale)?;
        writeln!(
            series,
            "{},{},{},{}",
            pair.label(),
            f17(report.worst_rel_violation),
            f17(report.worst_t),
            f17(report.worst_mu)
        )?;
        fit.push((format!("{}:worst", pair.label()), report.worst_rel_violation));
        claims.push(Claim::at_most(
            format!("sandwich {}", pair.label()),
            cfg.tol * tol_scale,
            report.worst_rel_violation,
        ));
        if cfg.properties {
            let mus = quad::log_spaced(1e-2, 1e2, 24);
            let cm = complete_monotonicity_check(pair, 1.0, &mus, 4)?;
            claims.push(Claim::at_most(
                format!("complete monotonicity {}", pair.label()),
                0.0,
                cm.violations as f64,
            ));
        }
    }
    if cfg.properties {
        let frac = KernelPair::fractional(0.5)?;
        let mut sups = Vec::new();
        for &t in &[1.0, 10.0, 100.0] {
            let knee = 1.0 / frac.eval_cumulative_l(t)?;
            let mus = quad::log_spaced(knee * 1e-3, knee * 1e3, 60);
            sups.push(multiplier_bound_check(&frac, &[t], 0.5, 2, &mus)?.sups[0]);
        }
        let spread = (sups.iter().cloned().fold(f64::MIN, f64::max)
            - sups.iter().cloned().fold(f64::MAX, f64::min))
            / sups.iter().cloned().fold(f64::MAX, f64::min);
        fit.push(("multiplier_spread".into(), spread));
        claims.push(Claim::at_most("multiplier sup uniform in t", 0.1 * tol_scale, spread));
    }
    Ok(RunOutput { series, fit, claims })
}

fn run_decay(cfg: &DecaySweepCfg, tol_scale: f64) -> Result<RunOutput> {
    let pair = cfg.pair.build()?;
    let datum = cfg.datum.build();
    let times = cfg.times.grid();
    let mut fit = Vec::new();
    let mut claims = Vec::new();
    let mut series;
    match cfg.variant {
        SweepVariant::NormSlope => {
            let norm = cfg
                .norm
                .as_ref()
                .context("norm-slope sweep requires a `norm` spec")?;
            let sweep = decay_sweep(&pair, cfg.d, norm.kind(), &datum, &times)?;
            series = sweep.to_csv();
            let target = cfg.target_slope.unwrap_or(sweep.predicted);
            fit.push(("slope".into(), sweep.fit.slope));
            fit.push(("slope_last_decade".into(), sweep.slope_last_decade));
            fit.push(("intercept".into(), sweep.fit.intercept));
            fit.push(("kernel_rate".into(), sweep.rate_l));
            fit.push(("target".into(), target));
            claims.push(Claim::near(
                "fitted slope",
                target,
                sweep.fit.slope,
                cfg.slope_tol * tol_scale,
            ));
            claims.push(Claim::near(
                "window stability",
                sweep.fit.slope,
                sweep.slope_last_decade,
                cfg.slope_tol * tol_scale,
            ));
        }
        SweepVariant::CompensatedBand => {
            let pow = cfg
                .log_power
                .unwrap_or_else(|| 1.0f64.min(cfg.d as f64 / 4.0));
            series = String::from("t,compensated\n");
            let mut vals = Vec::with_capacity(times.len());
            for &t in &times {
                let n = norm_at(&pair, cfg.d, NormKind::Lp(2.0), &datum, t)?;
                let v = n * t.ln().max(1.0).powf(pow);
                writeln!(series, "{},{}", f17(t), f17(v))?;
                vals.push(v);
            }
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            fit.push(("band_lo".into(), lo));
            fit.push(("band_hi".into(), hi));
            fit.push(("band_ratio".into(), hi / lo));
            claims.push(Claim::at_most(
                "compensated band ratio",
                cfg.max_ratio * tol_scale,
                hi / lo,
            ));
            claims.push(Claim::at_least("band positive", f64::MIN_POSITIVE, lo));
        }
        SweepVariant::LowerBound => {
            let report = lower_bound_ratio(&pair, cfg.d, &datum, &times)?;
            series = String::from("t,ratio\n");
            for (t, r) in report.times.iter().zip(&report.ratios) {
                writeln!(series, "{},{}", f17(*t), f17(*r))?;
            }
            fit.push(("infimum".into(), report.infimum));
            fit.push(("supremum".into(), report.supremum));
            fit.push(("tail_slope".into(), report.tail_slope));
            claims.push(Claim::at_least(
                "infimum positive",
                f64::MIN_POSITIVE,
                report.infimum,
            ));
            claims.push(Claim::near(
                "compensated norm leveled off",
                0.0,
                report.tail_slope,
                0.05 * tol_scale,
            ));
        }
        SweepVariant::Profile => {
            let p = cfg.p.context("profile sweep requires `p`")?;
            let alpha = match &pair {
                KernelPair::Fractional { alpha } => *alpha,
                _ => bail!("profile sweep applies to fractional pairs"),
            };
            let report = large_time_profile(&pair, cfg.d, p, &datum, &times)?;
            series = String::from("t,compensated_deviation\n");
            for (t, v) in report.times.iter().zip(&report.deviations) {
                writeln!(series, "{},{}", f17(*t), f17(*v))?;
            }
            fit.push(("slope".into(), report.fit.slope));
            let bound = -alpha / 2.0 + cfg.slope_tol.max(0.07) * tol_scale;
            claims.push(Claim::at_most("profile convergence slope", bound, report.fit.slope));
        }
    }
    Ok(RunOutput { series, fit, claims })
}

fn run_fundsol(cfg: &FundsolCfg, tol_scale: f64) -> Result<RunOutput> {
    let pair = cfg.pair.build()?;
    let times = cfg.times.grid();
    let mut fit = Vec::new();
    let mut claims = Vec::new();
    let mut series;
    match cfg.mode {
        FundsolMode::Mass => {
            series = String::from("t,mass,min_relative\n");
            let mut worst = 0.0f64;
            let mut min_rel = 0.0f64;
            for &t in &times {
                let radii = default_radii(&pair, t, cfg.per_decade)?;
                let profile = z_radial_hankel(&pair, t, cfg.d, &radii)?;
                let report = mass_check(&profile);
                writeln!(
                    series,
                    "{},{},{}",
                    f17(t),
                    f17(report.mass),
                    f17(report.min_relative)
                )?;
                worst = worst.max((report.mass - 1.0).abs());
                min_rel = min_rel.min(report.min_relative);
            }
            fit.push(("worst_mass_deviation".into(), worst));
            fit.push(("min_relative_value".into(), min_rel));
            claims.push(Claim::at_most("unit mass", 1e-3 * tol_scale, worst));
            claims.push(Claim::at_least("nonnegative profile", -1e-5 * tol_scale, min_rel));
        }
        FundsolMode::Lp => {
            let p = cfg.p.context("lp mode requires `p`")?;
            series = String::from("t,norm\n");
            let mut vals = Vec::new();
            let mut divergent = 0usize;
            for &t in &times {
                match z_lp_norm(&pair, t, cfg.d, p)? {
                    ZNorm::Value(v) => {
                        writeln!(series, "{},{}", f17(t), f17(v))?;
                        vals.push(v);
                    }
                    ZNorm::Divergent { .. } => {
                        writeln!(series, "{},inf", f17(t))?;
                        divergent += 1;
                    }
                    ZNorm::Indeterminate { .. } => {
                        writeln!(series, "{},nan", f17(t))?;
                    }
                }
            }
            if cfg.expect_divergent {
                fit.push(("divergent_fraction".into(), divergent as f64 / times.len() as f64));
                claims.push(Claim::at_least(
                    "divergence confirmed at every t",
                    1.0,
                    divergent as f64 / times.len() as f64,
                ));
            } else {
                if vals.len() != times.len() {
                    bail!("norm unexpectedly divergent or indeterminate");
                }
                let f = fit_decay_exponent(&times, &vals, last_decades(&times, 2.0))?;
                let target = cfg
                    .target_slope
                    .context("convergent lp mode requires `target_slope`")?;
                fit.push(("slope".into(), f.slope));
                claims.push(Claim::near("Z norm slope", target, f.slope, cfg.slope_tol * tol_scale));
            }
        }
        FundsolMode::WeakLp => {
            series = String::from("t,weak_norm\n");
            let mut vals = Vec::new();
            for &t in &times {
                let v = z_weak_lp(&pair, t, cfg.d)?;
                writeln!(series, "{},{}", f17(t), f17(v))?;
                vals.push(v);
            }
            let f = fit_decay_exponent(&times, &vals, last_decades(&times, 2.0))?;
            let target = cfg.target_slope.context("weak-lp mode requires `target_slope`")?;
            fit.push(("slope".into(), f.slope));
            claims.push(Claim::near(
                "critical weak norm slope",
                target,
                f.slope,
                cfg.slope_tol * tol_scale,
            ));
        }
        FundsolMode::Kochubei => {
            let coarse = kochubei_bound_check(&pair, &times, cfg.d, cfg.per_decade)?;
            let fine = kochubei_bound_check(&pair, &times, cfg.d, cfg.per_decade * 2)?;
            series = String::from("quantity,coarse,fine\n");
            for (name, a, b) in [
                ("c_inner", coarse.c_inner, fine.c_inner),
                ("c_outer", coarse.c_outer, fine.c_outer),
                ("sigma_outer", coarse.sigma_outer, fine.sigma_outer),
                ("grad_c_inner", coarse.grad_c_inner, fine.grad_c_inner),
                ("grad_c_outer", coarse.grad_c_outer, fine.grad_c_outer),
            ] {
                writeln!(series, "{},{},{}", name, f17(a), f17(b))?;
            }
            fit.push(("c_inner".into(), fine.c_inner));
            fit.push(("sigma_outer".into(), fine.sigma_outer));
            claims.push(Claim::at_least("decay rate positive", f64::MIN_POSITIVE, fine.sigma_outer));
            let stability = (fine.c_inner / coarse.c_inner).max(coarse.c_inner / fine.c_inner);
            fit.push(("c_inner_stability".into(), stability));
            claims.push(Claim::at_most("constant refinement-stable", 2.0 * tol_scale, stability));
        }
    }
    Ok(RunOutput { series, fit, claims })
}

fn run_energy(cfg: &EnergyCfg, tol_scale: f64) -> Result<RunOutput> {
    let gamma = cfg.gamma_exp()?;
    let grid = quad::graded_mesh(cfg.t_max, cfg.n, cfg.grading);
    let sol = solve_fractional_ode(cfg.alpha, cfg.mu, gamma, cfg.w0, &grid)?;
    let report = power_bound_fit(&sol)?;
    let coarse_grid = quad::graded_mesh(cfg.t_max, cfg.n / 2, cfg.grading);
    let coarse = power_bound_fit(&solve_fractional_ode(
        cfg.alpha, cfg.mu, gamma, cfg.w0, &coarse_grid,
    )?)?;
    let series = sol.to_csv();
    let fit = vec![
        ("slope".into(), report.fit.slope),
        ("target".into(), report.target_slope),
        ("c1".into(), report.c1),
        ("c2".into(), report.c2),
    ];
    let mut claims = vec![
        Claim::near(
            "energy decay slope",
            report.target_slope,
            report.fit.slope,
            cfg.slope_tol * tol_scale,
        ),
        Claim::at_least("c1 positive", f64::MIN_POSITIVE, report.c1),
        Claim::at_most("sandwich width finite", f64::MAX, report.c2),
    ];
    let drift = ((report.c1 - coarse.c1).abs() / report.c1)
        .max((report.c2 - coarse.c2).abs() / report.c2);
    claims.push(Claim::at_most("constants refinement-stable", 0.1 * tol_scale, drift));
    Ok(RunOutput { series, fit, claims })
}
