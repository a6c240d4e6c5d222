//! Spectral evolution of an initial datum under the subdiffusion semigroup,
//! `ũ(t, ξ) = s(t, |ξ|²) ũ₀(ξ)`, together with the norms the decay theorems
//! quantify.
//!
//! Two representations are used. [`GridField`] is a periodic tensor grid for
//! `d ≤ 3` (FFT evolution, L_p and weak-L_p norms, gradients, empirical
//! MSD). [`RadialSpectrum`] is the radial Fourier profile of a radially
//! symmetric datum, valid in any dimension; L₂ norms come from the radial
//! Plancherel identity, which is how the `d ≥ 4` estimates are reached.
//!
//! Fourier convention: `ṽ(ξ) = ∫ e^{−i x·ξ} v(x) dx`, so the dual grid of a
//! box of extent `L` carries `ξ_k = 2π k̃ / L` with `k̃` the signed index.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::kernels::KernelPair;
use crate::relaxation::{fast_symbol, RelaxationSymbol};
use crate::special_functions::gamma;
use crate::{quad, Error, Result};

/// Box-size safety factor relative to the diffusion width `(1∗l)(t)^{1/2}`.
pub const BOX_SAFETY: f64 = 12.0;

/// Surface area of the unit sphere in ℝ^d, `ω_{d−1} = 2π^{d/2}/Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0).unwrap()
}

/// Volume of the unit ball in ℝ^d.
pub fn ball_volume(d: usize) -> f64 {
    sphere_area(d) / d as f64
}

/// Initial datum. All variants have closed-form Fourier transforms; the
/// plain and difference Gaussians are radial.
#[derive(Clone, Debug)]
pub enum Datum {
    /// Unit-mass isotropic Gaussian, `ũ₀(ξ) = e^{−σ²|ξ|²/2}`, `ũ₀(0) = 1`.
    Gaussian { sigma: f64 },
    /// Unit-mass Gaussian centered at `shift · e₁` (nonzero first moment).
    ShiftedGaussian { sigma: f64, shift: f64 },
    /// Difference of two unit-mass Gaussians: zero total mass.
    GaussianDifference { sigma_a: f64, sigma_b: f64 },
}

impl Datum {
    pub fn mass(&self) -> f64 {
        match self {
            Datum::Gaussian { .. } | Datum::ShiftedGaussian { .. } => 1.0,
            Datum::GaussianDifference { .. } => 0.0,
        }
    }

    /// Smallest Gaussian width, used for box and spectral cutoffs.
    pub fn min_sigma(&self) -> f64 {
        match self {
            Datum::Gaussian { sigma } => *sigma,
            Datum::ShiftedGaussian { sigma, .. } => *sigma,
            Datum::GaussianDifference { sigma_a, sigma_b } => sigma_a.min(*sigma_b),
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, Datum::ShiftedGaussian { .. })
    }

    /// `ũ₀(ρ)` for radial variants.
    pub fn spectral_radial(&self, rho: f64) -> Result<f64> {
        match self {
            Datum::Gaussian { sigma } => Ok((-0.5 * sigma * sigma * rho * rho).exp()),
            Datum::GaussianDifference { sigma_a, sigma_b } => Ok((-0.5 * sigma_a * sigma_a
                * rho
                * rho)
                .exp()
                - (-0.5 * sigma_b * sigma_b * rho * rho).exp()),
            Datum::ShiftedGaussian { .. } => Err(Error::Domain(
                "shifted datum is not radially symmetric".into(),
            )),
        }
    }

    /// Physical value at `x`.
    pub fn physical(&self, d: usize, x: &[f64]) -> f64 {
        let gauss = |sigma: f64, r2: f64| {
            (2.0 * std::f64::consts::PI * sigma * sigma).powf(-(d as f64) / 2.0)
                * (-0.5 * r2 / (sigma * sigma)).exp()
        };
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Datum::Gaussian { sigma } => gauss(*sigma, r2),
            Datum::ShiftedGaussian { sigma, shift } => {
                let mut r2s = (x[0] - shift) * (x[0] - shift);
                for &v in &x[1..] {
                    r2s += v * v;
                }
                gauss(*sigma, r2s)
            }
            Datum::GaussianDifference { sigma_a, sigma_b } => {
                gauss(*sigma_a, r2) - gauss(*sigma_b, r2)
            }
        }
    }

    /// Render on a periodic grid in physical space.
    pub fn render(&self, d: usize, n: usize, extent: f64) -> Result<GridField> {
        GridField::from_physical_fn(d, n, extent, |x| self.physical(d, x))
    }
}

/// A `d ≤ 3` periodic grid function, physical or spectral.
#[derive(Clone, Debug)]
pub struct GridField {
    pub d: usize,
    /// Points per axis (power of two).
    pub n: usize,
    /// Box extent per axis; coordinates span `[−L/2, L/2)`.
    pub extent: f64,
    pub spectral: bool,
    data: Vec<Complex64>,
}

impl GridField {
    pub fn from_physical_fn(
        d: usize,
        n: usize,
        extent: f64,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        validate_grid(d, n, extent)?;
        let total = n.pow(d as u32);
        let dx = extent / n as f64;
        let mut data = Vec::with_capacity(total);
        let mut x = [0.0f64; 3];
        for idx in 0..total {
            let mut rem = idx;
            for a in 0..d {
                let k = rem % n;
                rem /= n;
                x[a] = -0.5 * extent + k as f64 * dx;
            }
            data.push(Complex64::new(f(&x[..d]), 0.0));
        }
        Ok(GridField {
            d,
            n,
            extent,
            spectral: false,
            data,
        })
    }

    pub fn from_spectral_fn(
        d: usize,
        n: usize,
        extent: f64,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        validate_grid(d, n, extent)?;
        let total = n.pow(d as u32);
        let mut data = Vec::with_capacity(total);
        let mut xi = [0.0f64; 3];
        for idx in 0..total {
            let mut rem = idx;
            for a in 0..d {
                let k = rem % n;
                rem /= n;
                xi[a] = signed_wavenumber(k, n, extent);
            }
            data.push(f(&xi[..d]));
        }
        Ok(GridField {
            d,
            n,
            extent,
            spectral: true,
            data,
        })
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    pub fn dx(&self) -> f64 {
        self.extent / self.n as f64
    }

    /// Physical coordinate of a flat index (axis 0 fastest).
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0f64; 3];
        let dx = self.dx();
        let mut rem = idx;
        for a in 0..self.d {
            let k = rem % self.n;
            rem /= self.n;
            x[a] = -0.5 * self.extent + k as f64 * dx;
        }
        x
    }

    /// Forward transform: physical → spectral with the integral convention.
    pub fn to_spectral(&self) -> GridField {
        if self.spectral {
            return self.clone();
        }
        let mut data = self.data.clone();
        fft_all_axes(&mut data, self.d, self.n, false);
        let scale = self.dx().powi(self.d as i32);
        apply_checkerboard(&mut data, self.d, self.n, scale);
        GridField {
            spectral: true,
            data,
            ..*self
        }
    }

    /// Inverse transform: spectral → physical.
    pub fn to_physical(&self) -> GridField {
        if !self.spectral {
            return self.clone();
        }
        let mut data = self.data.clone();
        apply_checkerboard(&mut data, self.d, self.n, 1.0);
        fft_all_axes(&mut data, self.d, self.n, true);
        let scale = 1.0 / self.extent.powi(self.d as i32);
        for v in &mut data {
            *v *= scale;
        }
        GridField {
            spectral: false,
            data,
            ..*self
        }
    }

    /// Multiply the spectrum by `m(|ξ|²)`.
    pub fn apply_symbol(&self, m: &dyn Fn(f64) -> f64) -> GridField {
        let spec = self.to_spectral();
        let mut data = spec.data;
        for (idx, v) in data.iter_mut().enumerate() {
            let mut mu = 0.0;
            let mut rem = idx;
            for _ in 0..self.d {
                let k = rem % self.n;
                rem /= self.n;
                let xi = signed_wavenumber(k, self.n, self.extent);
                mu += xi * xi;
            }
            *v *= m(mu);
        }
        GridField {
            spectral: true,
            data,
            ..*self
        }
    }

    /// Largest physical magnitude on the outermost grid shell.
    pub fn boundary_shell_max(&self) -> f64 {
        let phys = self.to_physical();
        let mut worst = 0.0f64;
        for (idx, v) in phys.data.iter().enumerate() {
            let mut rem = idx;
            let mut on_boundary = false;
            for _ in 0..self.d {
                let k = rem % self.n;
                rem /= self.n;
                if k == 0 || k == self.n - 1 {
                    on_boundary = true;
                }
            }
            if on_boundary {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn validate_grid(d: usize, n: usize, extent: f64) -> Result<()> {
    if !(1..=3).contains(&d) {
        return Err(Error::Domain(format!("grid fields support d in 1..=3, got {d}")));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("grid size must be a power of two >= 2, got {n}")));
    }
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::Domain(format!("grid extent must be positive, got {extent}")));
    }
    Ok(())
}

/// `ξ = 2π k̃ / L` for the signed index `k̃`.
fn signed_wavenumber(k: usize, n: usize, extent: f64) -> f64 {
    let signed = if k < n / 2 { k as i64 } else { k as i64 - n as i64 };
    2.0 * std::f64::consts::PI * signed as f64 / extent
}

/// The phase `Π_a (−1)^{k_a}` that accounts for the box being centered at
/// the origin, times `scale`.
fn apply_checkerboard(data: &mut [Complex64], d: usize, n: usize, scale: f64) {
    for (idx, v) in data.iter_mut().enumerate() {
        let mut rem = idx;
        let mut parity = 0usize;
        for _ in 0..d {
            parity += rem % n;
            rem /= n;
        }
        let sign = if parity % 2 == 0 { scale } else { -scale };
        *v *= sign;
    }
}

fn fft_all_axes(data: &mut [Complex64], d: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let total = data.len();
    let mut line = vec![Complex64::default(); n];
    for axis in 0..d {
        let stride = n.pow(axis as u32);
        let lines = total / n;
        for li in 0..lines {
            // decompose the line index into (inner, outer) around `axis`
            let inner = li % stride;
            let outer = li / stride;
            let base = outer * stride * n + inner;
            for j in 0..n {
                line[j] = data[base + j * stride];
            }
            fft.process(&mut line);
            for j in 0..n {
                data[base + j * stride] = line[j];
            }
        }
    }
}

/// Suggested box extent for evolving to time `t` from a datum of width
/// `sigma`: the diffusion width with the safety factor, never smaller than
/// what the datum itself needs.
pub fn suggested_extent(pair: &KernelPair, t: f64, sigma: f64) -> Result<f64> {
    let spread = pair.eval_cumulative_l(t)?;
    Ok(BOX_SAFETY * (sigma * sigma + 2.0 * spread).sqrt())
}

/// Evolve `u0` to time `t` through the Fourier symbol. `t = 0` returns the
/// datum unchanged.
pub fn evolve(pair: &KernelPair, u0: &GridField, t: f64) -> Result<GridField> {
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let symbol = fast_symbol(pair, t)?;
    evolve_with_symbol(symbol.as_ref(), u0, t)
}

pub fn evolve_with_symbol(
    symbol: &dyn RelaxationSymbol,
    u0: &GridField,
    t: f64,
) -> Result<GridField> {
    let shell = u0.boundary_shell_max();
    let peak = u0.max_abs();
    if shell > 1e-12 * peak {
        return Err(Error::DomainTooSmall {
            t,
            suggested_extent: u0.extent * (shell / (1e-12 * peak)).ln().max(1.5),
        });
    }
    Ok(u0.apply_symbol(&|mu| symbol.eval_mu(mu)).to_physical())
}

/// `(Σ |u_i|^p Δx^d)^{1/p}`; `p = ∞` returns the max.
pub fn lp_norm(field: &GridField, p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::Domain(format!("lp_norm requires p >= 1, got {p}")));
    }
    let phys = field.to_physical();
    if p.is_infinite() {
        return Ok(phys.max_abs());
    }
    let cell = phys.dx().powi(phys.d as i32);
    let sum: f64 = phys.data.iter().map(|v| v.norm().powf(p)).sum();
    Ok((sum * cell).powf(1.0 / p))
}

/// Weak-L_r quasinorm `sup_λ λ d_f(λ)^{1/r}` with the grid distribution
/// function `d_f(λ) = Δx^d #{|u_i| > λ}`. The sup over all λ is attained
/// just below one of the sorted magnitudes.
pub fn weak_lp_quasinorm(field: &GridField, r: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "weak quasinorm requires r in (1, inf), got {r}"
        )));
    }
    let phys = field.to_physical();
    let mut mags: Vec<f64> = phys
        .data
        .iter()
        .map(|v| v.norm())
        .filter(|&m| m > 0.0)
        .collect();
    if mags.is_empty() {
        return Ok(0.0);
    }
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let cell = phys.dx().powi(phys.d as i32);
    let mut best = 0.0f64;
    for (i, &m) in mags.iter().enumerate() {
        best = best.max(m * ((i + 1) as f64 * cell).powf(1.0 / r));
    }
    Ok(best)
}

/// Spectral gradient: component `a` has spectrum `i ξ_a ũ(ξ)`; the Nyquist
/// mode is zeroed to keep the derivative real and odd-symmetric.
pub fn gradient_field(field: &GridField) -> Vec<GridField> {
    let spec = field.to_spectral();
    (0..field.d)
        .map(|axis| {
            let mut data = spec.data.clone();
            let stride = field.n.pow(axis as u32);
            for (idx, v) in data.iter_mut().enumerate() {
                let k = (idx / stride) % field.n;
                let xi = if k == field.n / 2 {
                    0.0
                } else {
                    signed_wavenumber(k, field.n, field.extent)
                };
                *v *= Complex64::new(0.0, xi);
            }
            GridField {
                spectral: true,
                data,
                ..*field
            }
        })
        .collect()
}

/// L₂ norm of the full gradient vector on the grid.
pub fn gradient_l2_norm(field: &GridField) -> Result<f64> {
    let comps = gradient_field(field);
    let mut sq = 0.0;
    for c in &comps {
        let n = lp_norm(&c.to_physical(), 2.0)?;
        sq += n * n;
    }
    Ok(sq.sqrt())
}

/// Mean square displacement `m(t) = 2d (1∗l)(t)`.
pub fn msd_analytic(pair: &KernelPair, t: f64, d: usize) -> Result<f64> {
    Ok(2.0 * d as f64 * pair.eval_cumulative_l(t)?)
}

/// `∫ |x|² v(x) dx` on the grid (the empirical MSD when `v = Z(t,·)`).
pub fn msd_empirical(field: &GridField) -> Result<f64> {
    let phys = field.to_physical();
    let cell = phys.dx().powi(phys.d as i32);
    let mut acc = 0.0;
    let mut tail = 0.0f64;
    for (idx, v) in phys.data.iter().enumerate() {
        let x = phys.coords(idx);
        let r2: f64 = x[..phys.d].iter().map(|c| c * c).sum();
        let term = r2 * v.re * cell;
        acc += term;
        let mut rem = idx;
        let mut on_boundary = false;
        for _ in 0..phys.d {
            let k = rem % phys.n;
            rem /= phys.n;
            if k == 0 || k == phys.n - 1 {
                on_boundary = true;
            }
        }
        if on_boundary {
            tail += term.abs();
        }
    }
    if tail > 1e-3 * acc.abs() {
        return Err(Error::Truncation(format!(
            "MSD boundary contribution {tail} vs total {acc}: box too small"
        )));
    }
    Ok(acc)
}

/// Radial Fourier profile of a radially symmetric datum in dimension `d`
/// (any `d ≥ 1`).
#[derive(Clone, Debug)]
pub struct RadialSpectrum {
    pub d: usize,
    pub datum: Datum,
}

impl RadialSpectrum {
    pub fn new(d: usize, datum: Datum) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        if !datum.is_radial() {
            return Err(Error::Domain(
                "radial spectrum requires a radially symmetric datum".into(),
            ));
        }
        Ok(RadialSpectrum { d, datum })
    }

    pub fn u0_hat(&self, rho: f64) -> f64 {
        self.datum.spectral_radial(rho).expect("radial checked")
    }

    /// Upper spectral cutoff beyond which the datum is numerically zero.
    fn rho_max(&self) -> f64 {
        // e^{−σ²ρ²/2} below 1e−40 ⇒ σρ > 13.6
        14.0 / self.datum.min_sigma()
    }
}

/// `|u(t)|₂` by the radial Plancherel identity:
/// `[(2π)^{−d} ω_{d−1} ∫₀^∞ s(t,ρ²)² |ũ₀(ρ)|² ρ^{d−1} dρ]^{1/2}`.
pub fn l2_norm_plancherel_radial(
    symbol: &dyn RelaxationSymbol,
    spectrum: &RadialSpectrum,
) -> Result<f64> {
    radial_plancherel(symbol, spectrum, 0)
}

/// Gradient counterpart: extra `ρ²` under the integral.
pub fn gradient_l2_norm_plancherel_radial(
    symbol: &dyn RelaxationSymbol,
    spectrum: &RadialSpectrum,
) -> Result<f64> {
    radial_plancherel(symbol, spectrum, 2)
}

fn radial_plancherel(
    symbol: &dyn RelaxationSymbol,
    spectrum: &RadialSpectrum,
    rho_power: i32,
) -> Result<f64> {
    let d = spectrum.d as f64;
    let rho_max = spectrum.rho_max();
    let rho_min = rho_max * 1e-14;
    let integrand = |rho: f64| {
        let s = symbol.eval_mu(rho * rho);
        let a = s * spectrum.u0_hat(rho);
        a * a * rho.powf(d - 1.0) * rho.powi(rho_power)
    };
    let integral = quad::integrate_geometric(rho_min, rho_max, 420, 8, integrand)
        // head below rho_min: s, ũ₀ ≈ their ρ→0 limits
        + integrand(rho_min) * rho_min / (d + rho_power as f64);
    // tail check: the integrand must be dead at the cutoff
    let tail = integrand(rho_max) * rho_max;
    if tail > 1e-10 * integral.abs() + 1e-300 {
        return Err(Error::Resolution(format!(
            "radial tail {tail} not negligible against {integral}"
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok((two_pi.powf(-d) * sphere_area(spectrum.d) * integral).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relaxation::symbol_at;
    use approx::assert_relative_eq;

    #[test]
    fn fft_round_trip() {
        for d in 1..=3usize {
            let n = if d == 3 { 16 } else { 64 };
            let field = GridField::from_physical_fn(d, n, 10.0, |x| {
                (-x.iter().map(|v| v * v).sum::<f64>()).exp() + 0.1 * x[0]
            })
            .unwrap();
            let back = field.to_spectral().to_physical();
            for (a, b) in field.values().iter().zip(back.values()) {
                assert!((a - b).norm() <= 1e-10 * field.max_abs(), "d={d} round trip");
            }
        }
    }

    #[test]
    fn spectral_convention_matches_gaussian_transform() {
        // ũ₀(ξ) = e^{−ξ²/2} for the unit-mass Gaussian, σ = 1, d = 1
        let datum = Datum::Gaussian { sigma: 1.0 };
        let field = datum.render(1, 256, 36.0).unwrap().to_spectral();
        for (idx, v) in field.values().iter().enumerate() {
            let xi = super::signed_wavenumber(idx, 256, 36.0);
            if xi.abs() < 6.0 {
                assert_relative_eq!(v.re, (-0.5 * xi * xi).exp(), epsilon = 1e-10);
                assert!(v.im.abs() < 1e-10);
            }
        }
        // ũ₀(0) = mass = 1
        assert_relative_eq!(field.values()[0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evolve_heat_limit_is_gaussian_spreading() {
        // k ≡ 1: u(1,·) is the Gaussian with variance σ² + 2t = 3
        let pair = KernelPair::heat(10.0);
        let u0 = Datum::Gaussian { sigma: 1.0 }.render(1, 512, 40.0).unwrap();
        let u1 = evolve(&pair, &u0, 1.0).unwrap();
        let v = 3.0f64;
        let mut max_err = 0.0f64;
        for (idx, val) in u1.values().iter().enumerate() {
            let x = u1.coords(idx)[0];
            let exact = (2.0 * std::f64::consts::PI * v).powf(-0.5) * (-0.5 * x * x / v).exp();
            max_err = max_err.max((val.re - exact).abs());
        }
        assert!(max_err <= 1e-8, "heat evolution error {max_err}");
    }

    #[test]
    fn evolve_at_zero_returns_datum() {
        let pair = KernelPair::fractional(0.5).unwrap();
        let u0 = Datum::Gaussian { sigma: 1.0 }.render(1, 128, 30.0).unwrap();
        let u = evolve(&pair, &u0, 0.0).unwrap();
        for (a, b) in u0.values().iter().zip(u.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn evolve_rejects_undersized_box() {
        let pair = KernelPair::heat(10.0);
        let u0 = Datum::Gaussian { sigma: 1.0 }.render(1, 64, 6.0).unwrap();
        match evolve(&pair, &u0, 1.0) {
            Err(Error::DomainTooSmall { suggested_extent, .. }) => {
                assert!(suggested_extent > 6.0);
            }
            other => panic!("expected domain-too-small, got {other:?}"),
        }
    }

    #[test]
    fn lp_norms_of_gaussian() {
        let u0 = Datum::Gaussian { sigma: 1.0 }.render(1, 512, 40.0).unwrap();
        // |u₀|₁ = 1 (unit mass, nonnegative)
        assert_relative_eq!(lp_norm(&u0, 1.0).unwrap(), 1.0, max_relative = 1e-10);
        // |u₀|₂ = (2√π)^{−1/2}
        assert_relative_eq!(
            lp_norm(&u0, 2.0).unwrap(),
            (2.0 * std::f64::consts::PI.sqrt()).powf(-0.5),
            max_relative = 1e-10
        );
        // |u₀|_∞ = (2π)^{−1/2}
        assert_relative_eq!(
            lp_norm(&u0, f64::INFINITY).unwrap(),
            (2.0 * std::f64::consts::PI).powf(-0.5),
            max_relative = 1e-10
        );
        assert!(lp_norm(&u0, 0.5).is_err());
    }

    #[test]
    fn weak_quasinorm_indicator_and_chebyshev() {
        // indicator of the unit ball in d=2: λ d(λ)^{1/2} = √π for λ < 1
        let ind = GridField::from_physical_fn(2, 256, 4.0, |x| {
            if x[0] * x[0] + x[1] * x[1] <= 1.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let w = weak_lp_quasinorm(&ind, 2.0).unwrap();
        assert_relative_eq!(w, std::f64::consts::PI.sqrt(), max_relative = 2e-2);
        // Chebyshev: weak norm ≤ strong norm
        let g = Datum::Gaussian { sigma: 1.0 }.render(2, 128, 30.0).unwrap();
        assert!(weak_lp_quasinorm(&g, 2.0).unwrap() <= lp_norm(&g, 2.0).unwrap() + 1e-12);
        // all-zero field
        let z = GridField::from_physical_fn(1, 16, 1.0, |_| 0.0).unwrap();
        assert_eq!(weak_lp_quasinorm(&z, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn power_law_has_flat_weak_profile() {
        // f = |x|^{−d/r} truncated: λ d(λ)^{1/r} ≈ V_d^{1/r} across λ decades
        let d = 1usize;
        let r = 2.0;
        // clamp radius must exceed the cell size or the peak cell dominates
        let f = GridField::from_physical_fn(d, 4096, 2.0, |x| {
            let a = x[0].abs().max(2e-3);
            a.powf(-(d as f64) / r)
        })
        .unwrap();
        let w = weak_lp_quasinorm(&f, r).unwrap();
        // V_1 = 2
        assert_relative_eq!(w, 2.0f64.powf(1.0 / r), max_relative = 0.05);
    }

    #[test]
    fn gradient_of_gaussian() {
        let u0 = GridField::from_physical_fn(1, 512, 40.0, |x| (-0.5 * x[0] * x[0]).exp())
            .unwrap();
        let grad = gradient_field(&u0);
        assert_eq!(grad.len(), 1);
        let g = grad[0].to_physical();
        for (idx, v) in g.values().iter().enumerate() {
            let x = g.coords(idx)[0];
            let exact = -x * (-0.5 * x * x).exp();
            assert!((v.re - exact).abs() <= 1e-8, "gradient error at x = {x}");
        }
        // constant field has zero gradient
        let c = GridField::from_physical_fn(1, 64, 10.0, |_| 3.0).unwrap();
        assert!(gradient_field(&c)[0].to_physical().max_abs() <= 1e-12);
    }

    #[test]
    fn msd_heat_limit() {
        let pair = KernelPair::heat(10.0);
        // variances add: sigma^2 + 2t for a grid-resolvable datum width
        let u0 = Datum::Gaussian { sigma: 0.5 }.render(1, 1024, 60.0).unwrap();
        let z = evolve(&pair, &u0, 1.0).unwrap();
        assert_relative_eq!(msd_empirical(&z).unwrap(), 2.25, max_relative = 1e-4);
        assert_relative_eq!(msd_analytic(&pair, 1.0, 1).unwrap(), 2.0);
        assert_eq!(msd_analytic(&pair, 0.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn plancherel_radial_matches_grid() {
        // s ≡ 1 (t = 0 surrogate): radial Plancherel returns |u₀|₂
        struct One;
        impl RelaxationSymbol for One {
            fn time(&self) -> f64 {
                0.0
            }
            fn eval_mu(&self, _: f64) -> f64 {
                1.0
            }
        }
        for d in 1..=3usize {
            let spectrum = RadialSpectrum::new(d, Datum::Gaussian { sigma: 1.0 }).unwrap();
            let radial = l2_norm_plancherel_radial(&One, &spectrum).unwrap();
            // closed form |u₀|₂ = (4π)^{−d/4} for σ = 1
            let exact = (4.0 * std::f64::consts::PI).powf(-(d as f64) / 4.0);
            assert_relative_eq!(radial, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn plancherel_radial_matches_evolved_grid_norm() {
        let pair = KernelPair::fractional(0.5).unwrap();
        let t = 10.0;
        let u0 = Datum::Gaussian { sigma: 1.0 }.render(2, 256, 60.0).unwrap();
        let u = evolve(&pair, &u0, t).unwrap();
        let grid_norm = lp_norm(&u, 2.0).unwrap();
        let spectrum = RadialSpectrum::new(2, Datum::Gaussian { sigma: 1.0 }).unwrap();
        let symbol = symbol_at(&pair, t).unwrap();
        let radial = l2_norm_plancherel_radial(&symbol, &spectrum).unwrap();
        assert_relative_eq!(grid_norm, radial, max_relative = 1e-4);
    }

    #[test]
    fn gradient_plancherel_matches_grid() {
        let pair = KernelPair::fractional(0.5).unwrap();
        let t = 5.0;
        let u0 = Datum::Gaussian { sigma: 1.0 }.render(1, 1024, 60.0).unwrap();
        let u = evolve(&pair, &u0, t).unwrap();
        let grid = gradient_l2_norm(&u).unwrap();
        let spectrum = RadialSpectrum::new(1, Datum::Gaussian { sigma: 1.0 }).unwrap();
        let symbol = symbol_at(&pair, t).unwrap();
        let radial = gradient_l2_norm_plancherel_radial(&symbol, &spectrum).unwrap();
        assert_relative_eq!(grid, radial, max_relative = 1e-6);
    }

    #[test]
    fn l2_norm_nonincreasing_in_time() {
        let pair = KernelPair::ultraslow();
        let spectrum = RadialSpectrum::new(2, Datum::Gaussian { sigma: 1.0 }).unwrap();
        let mut prev = f64::INFINITY;
        for &t in &[0.1, 1.0, 10.0, 100.0] {
            let symbol = symbol_at(&pair, t).unwrap();
            let norm = l2_norm_plancherel_radial(&symbol, &spectrum).unwrap();
            assert!(norm <= prev * (1.0 + 1e-10));
            prev = norm;
        }
    }
}
