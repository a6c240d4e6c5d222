//! Energy comparison layer: the scalar fractional ODE
//! `∂_t^α(w − w₀) + μ w^γ = 0` that dominates `|u(t)|₂²`, plus numerical
//! certificates of the two convexity inequalities the comparison rests on
//! (the pointwise identity for `H'(u) d/dt(k∗u)` and its L₂-norm corollary).
//!
//! The ODE is integrated with the L1 product-integration scheme on an
//! arbitrary increasing grid; `α = 1` collapses to backward Euler. Each
//! step solves a scalar monotone equation by safeguarded Newton on the
//! bracket `(0, w_{i−1}]`, which keeps the iterates positive and
//! nonincreasing, the two structural properties the comparison argument
//! needs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decay::{fit_decay_exponent, last_decades, DecayFit};
use crate::special_functions::gamma;
use crate::{quad, Error, Result};

/// Solution of `∂_t^α(w − w₀) + μ w^γ = 0` on a grid.
#[derive(Clone, Debug)]
pub struct FracOdeSolution {
    pub alpha: f64,
    pub mu: f64,
    pub gamma: f64,
    pub w0: f64,
    pub grid: Vec<f64>,
    pub w: Vec<f64>,
}

impl FracOdeSolution {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,w\n");
        for (t, w) in self.grid.iter().zip(&self.w) {
            out.push_str(&format!("{:.16e},{:.16e}\n", t, w));
        }
        out
    }
}

/// L1 weights `c_{ij}`, `j = 1..=i`, of the Caputo derivative at `t_i`:
/// `∂_t^α f(t_i) ≈ Σ_j c_{ij} (f_j − f_{j−1})` with
/// `c_{ij} = [(t_i−t_{j−1})^{1−α} − (t_i−t_j)^{1−α}] / (Γ(2−α) Δ_j)`.
/// `α = 1` degenerates to the backward difference `c_{ii} = 1/Δ_i`.
fn l1_weights(alpha: f64, grid: &[f64], i: usize) -> Vec<f64> {
    let ti = grid[i];
    if alpha == 1.0 {
        let mut c = vec![0.0; i];
        c[i - 1] = 1.0 / (ti - grid[i - 1]);
        return c;
    }
    let g = gamma(2.0 - alpha).unwrap();
    (1..=i)
        .map(|j| {
            let dj = grid[j] - grid[j - 1];
            ((ti - grid[j - 1]).powf(1.0 - alpha) - (ti - grid[j]).powf(1.0 - alpha)) / (g * dj)
        })
        .collect()
}

/// Integrate the comparison ODE. The grid must start at 0 and increase
/// strictly; `w0 = 0` short-circuits to the zero solution.
pub fn solve_fractional_ode(
    alpha: f64,
    mu: f64,
    gamma_exp: f64,
    w0: f64,
    grid: &[f64],
) -> Result<FracOdeSolution> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1], got {alpha}")));
    }
    if !(gamma_exp >= 1.0) || !(mu >= 0.0) || !(w0 >= 0.0) {
        return Err(Error::Domain(format!(
            "need gamma >= 1, mu >= 0, w0 >= 0; got {gamma_exp}, {mu}, {w0}"
        )));
    }
    if grid.len() < 2 || grid[0] != 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must start at 0 and increase strictly".into()));
    }
    let n = grid.len();
    let mut w = vec![w0; n];
    if w0 == 0.0 {
        return Ok(FracOdeSolution {
            alpha,
            mu,
            gamma: gamma_exp,
            w0,
            grid: grid.to_vec(),
            w,
        });
    }
    for i in 1..n {
        let c = l1_weights(alpha, grid, i);
        let hist: f64 = (1..i).map(|j| c[j - 1] * (w[j] - w[j - 1])).sum();
        let a = c[i - 1];
        let prev = w[i - 1];
        let f = |x: f64| a * (x - prev) + hist + mu * x.powf(gamma_exp);
        // f is strictly increasing; root below prev keeps w nonincreasing
        if f(prev) <= 0.0 {
            w[i] = prev;
            continue;
        }
        let (mut lo, mut hi) = (0.0f64, prev);
        let mut x = prev / (1.0 + (mu * prev.powf(gamma_exp) + hist.max(0.0)) / (a * prev));
        let tol = 1e-13 * prev;
        for _ in 0..200 {
            let fx = f(x);
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let dfx = a + mu * gamma_exp * x.powf(gamma_exp - 1.0);
            let step = fx / dfx;
            let mut next = x - step;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= tol {
                x = next;
                break;
            }
            x = next;
        }
        w[i] = x.clamp(1e-300, prev);
    }
    Ok(FracOdeSolution {
        alpha,
        mu,
        gamma: gamma_exp,
        w0,
        grid: grid.to_vec(),
        w,
    })
}

/// Two-sided power-law certificate `c₁ ≤ w(t)(1 + t)^{α/γ} ≤ c₂`, with the
/// fitted tail slope against the predicted `−α/γ`.
#[derive(Clone, Debug)]
pub struct PowerBoundReport {
    pub c1: f64,
    pub c2: f64,
    pub fit: DecayFit,
    pub target_slope: f64,
}

pub fn power_bound_fit(sol: &FracOdeSolution) -> Result<PowerBoundReport> {
    let rate = sol.alpha / sol.gamma;
    let mut c1 = f64::MAX;
    let mut c2 = f64::MIN;
    for (t, w) in sol.grid.iter().zip(&sol.w).skip(1) {
        let comp = w * (1.0 + t).powf(rate);
        c1 = c1.min(comp);
        c2 = c2.max(comp);
    }
    let fit = fit_decay_exponent(&sol.grid[1..], &sol.w[1..], last_decades(&sol.grid, 2.0))?;
    Ok(PowerBoundReport {
        c1,
        c2,
        fit,
        target_slope: -rate,
    })
}

/// Residual certificate of the kernel identity
/// `H'(u(t)) d/dt(k∗u)(t) = d/dt(k∗H(u))(t)
///   + (H'(u(t))u(t) − H(u(t))) k(t)
///   + ∫₀^t [H(u(t−s)) − H(u(t)) − H'(u(t))(u(t−s) − u(t))] (−k̇(s)) ds`
/// together with the convexity corollary
/// `H'(u(t)) d/dt(k∗[u−u(0)])(t) ≥ d/dt(k∗[H(u)−H(u(0))])(t)`.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub max_residual: f64,
    pub min_convexity_margin: f64,
    pub pass: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn fundamental_identity_residual(
    k: &dyn Fn(f64) -> f64,
    k_dot: &dyn Fn(f64) -> f64,
    h: &dyn Fn(f64) -> f64,
    h_prime: &dyn Fn(f64) -> f64,
    u: &dyn Fn(f64) -> f64,
    u_dot: &dyn Fn(f64) -> f64,
    times: &[f64],
) -> Result<IdentityReport> {
    let rule = quad::gauss_legendre(16);
    let integrate = |t: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        let panels = ((t / 0.25).ceil() as usize).max(1);
        let h = t / panels as f64;
        (0..panels)
            .map(|p| rule.integrate(p as f64 * h, (p + 1) as f64 * h, f))
            .sum()
    };
    let mut max_residual = 0.0f64;
    let mut min_margin = f64::MAX;
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::Domain("identity check needs t > 0".into()));
        }
        let ut = u(t);
        let hp = h_prime(ut);
        let conv_du = integrate(t, &|s| k(s) * u_dot(t - s));
        let conv_dhu = integrate(t, &|s| k(s) * h_prime(u(t - s)) * u_dot(t - s));
        let lhs = hp * (k(t) * u(0.0) + conv_du);
        let bracket = integrate(t, &|s| {
            let us = u(t - s);
            (h(us) - h(ut) - hp * (us - ut)) * (-k_dot(s))
        });
        let rhs = (k(t) * h(u(0.0)) + conv_dhu) + (hp * ut - h(ut)) * k(t) + bracket;
        let scale = lhs.abs().max(1.0);
        max_residual = max_residual.max((lhs - rhs).abs() / scale);
        // corollary margin: the k(t) boundary terms cancel against u(0)
        let margin = (hp * conv_du - conv_dhu) / scale;
        min_margin = min_margin.min(margin);
    }
    Ok(IdentityReport {
        max_residual,
        min_convexity_margin: min_margin,
        pass: max_residual <= 1e-6 && min_margin >= -1e-9,
    })
}

/// Discrete certificate of the norm inequality
/// `∫ v ∂_t(k∗[v−v₀]) dx ≥ |v(t)|₂ ∂_t(k∗[|v|₂−|v₀|₂])(t)`:
/// the same L1 discretization of the memory operator is applied pointwise
/// in x and to the norm series, for seeded random smooth space-time fields.
#[derive(Clone, Debug)]
pub struct L2InequalityReport {
    pub seeds_checked: usize,
    pub min_margin: f64,
    pub violations: usize,
}

pub fn l2_norm_inequality_check(
    alpha: f64,
    seeds: &[u64],
    n_t: usize,
    n_x: usize,
    t_max: f64,
) -> Result<L2InequalityReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("order must lie in (0, 1], got {alpha}")));
    }
    let grid: Vec<f64> = (0..n_t).map(|i| t_max * i as f64 / (n_t - 1) as f64).collect();
    let dx = 2.0 * std::f64::consts::PI / n_x as f64;
    let mut min_margin = f64::MAX;
    let mut violations = 0usize;
    for &seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // random trigonometric polynomial with arbitrary smooth time factors
        let modes: Vec<(f64, f64, f64, f64, f64, f64)> = (1..=6)
            .map(|m| {
                (
                    rng.gen_range(-1.0..1.0) / (m * m) as f64,
                    m as f64,
                    rng.gen_range(0.0..std::f64::consts::TAU),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..2.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let v = |t: f64, x: f64| -> f64 {
            modes
                .iter()
                .map(|&(a, m, phi, c, om, psi)| a * (m * x + phi).cos() * (c + (om * t + psi).cos()))
                .sum()
        };
        // sampled paths per grid point and the norm series
        let field: Vec<Vec<f64>> = (0..n_x)
            .map(|ix| grid.iter().map(|&t| v(t, ix as f64 * dx)).collect())
            .collect();
        let norms: Vec<f64> = (0..n_t)
            .map(|it| {
                (0..n_x)
                    .map(|ix| field[ix][it] * field[ix][it] * dx)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        for i in 1..n_t {
            let c = l1_weights(alpha, &grid, i);
            let apply = |path: &[f64]| -> f64 {
                (1..=i).map(|j| c[j - 1] * (path[j] - path[j - 1])).sum()
            };
            let lhs: f64 = (0..n_x)
                .map(|ix| field[ix][i] * apply(&field[ix]) * dx)
                .sum();
            let rhs = norms[i] * apply(&norms);
            let scale = lhs.abs().max(rhs.abs()).max(1e-12);
            let margin = (lhs - rhs) / scale;
            min_margin = min_margin.min(margin);
            if margin < -1e-9 {
                violations += 1;
            }
        }
    }
    Ok(L2InequalityReport {
        seeds_checked: seeds.len(),
        min_margin,
        violations,
    })
}
