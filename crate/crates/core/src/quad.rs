//! Gauss–Legendre rules and small composite-quadrature helpers used by the
//! kernel and transform modules.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Integrate `f` over `[a, b]` with this rule.
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

static RULES: Lazy<Mutex<HashMap<usize, &'static GaussRule>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached `n`-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    let mut map = RULES.lock().unwrap();
    map.entry(n).or_insert_with(|| {
        let rule = compute_rule(n);
        Box::leak(Box::new(rule))
    })
}

/// Newton iteration on the Legendre polynomial roots.
fn compute_rule(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre integral over geometric panels spanning
/// `[a, b]` (both positive), `panels` panels, `nodes` points per panel.
pub fn integrate_geometric<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    panels: usize,
    nodes: usize,
    mut f: F,
) -> f64 {
    assert!(a > 0.0 && b > a);
    let rule = gauss_legendre(nodes);
    let ratio = (b / a).powf(1.0 / panels as f64);
    let mut lo = a;
    let mut acc = 0.0;
    for _ in 0..panels {
        let hi = lo * ratio;
        acc += rule.integrate(lo, hi, &mut f);
        lo = hi;
    }
    acc
}

/// Geometric mesh from `a` to `b` with roughly `ppd` points per decade,
/// prefixed by 0. Used as a Volterra march grid.
pub fn geometric_mesh_with_zero(a: f64, b: f64, ppd: f64) -> Vec<f64> {
    assert!(a > 0.0 && b > a && ppd > 0.0);
    let decades = (b / a).log10();
    let n = (decades * ppd).ceil().max(4.0) as usize;
    let mut grid = Vec::with_capacity(n + 2);
    grid.push(0.0);
    let ratio = (b / a).powf(1.0 / n as f64);
    let mut t = a;
    for _ in 0..n {
        grid.push(t);
        t *= ratio;
    }
    grid.push(b);
    grid.dedup_by(|x, y| (*x - *y).abs() < 1e-300);
    grid
}

/// Graded mesh `t_i = T (i/N)^gamma` on `[0, T]`.
pub fn graded_mesh(t_max: f64, n: usize, gamma: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| t_max * (i as f64 / n as f64).powf(gamma))
        .collect()
}

/// Log-spaced sample points in `[lo, hi]`, inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let step = (hi / lo).powf(1.0 / (count - 1) as f64);
    let mut t = lo;
    (0..count)
        .map(|i| {
            let v = if i + 1 == count { hi } else { t };
            t *= step;
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre(8);
        // degree 15 is exact for 8-point Gauss
        let val = rule.integrate(0.0, 1.0, |x| x.powi(15));
        assert_relative_eq!(val, 1.0 / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn geometric_panels_integrate_power_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2, truncated head below 1e-12 is ~2e-6
        let val = integrate_geometric(1e-12, 1.0, 200, 8, |x| x.powf(-0.5));
        assert_relative_eq!(val, 2.0, max_relative = 1e-5);
    }

    #[test]
    fn log_spaced_endpoints() {
        let v = log_spaced(1e2, 1e6, 9);
        assert_eq!(v.len(), 9);
        assert_relative_eq!(v[0], 1e2);
        assert_relative_eq!(v[8], 1e6);
    }
}
