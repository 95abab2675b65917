//! Coherent states, the smooth band-limiting cutoff and the rotated fractional
//! heat semigroup `e^{-t z̄ (-Δ)^{α/2}}` on ℝ and 𝕋.
//!
//! The solutions are built on the frequency side, where everything is closed
//! form:
//!
//! ```text
//!   F_h(g_h(t))(ξ) = χ(ξ-ξ₀) (πh)^{-1/4} e^{-(ξ-ξ₀)²/2h} e^{-t z̄ |ξ|^α / h^α}
//! ```
//!
//! and mapped back with [`inverse_transform_profile`]. The profile vanishes
//! outside `[ξ₀/2, 3ξ₀/2]`, so `|ξ|^α` is never evaluated near 0.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fit::{fit_line, LineFit};
use crate::spectral::{inverse_transform_profile, BandQuadrature, FourierCoeffs, Grid1D, SampledField, Side};
use crate::{Error, Result};

/// `(α, z, T)` for the semigroup `e^{-t z̄ (-Δ)^{α/2}}`, `t ∈ [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    alpha: f64,
    z: Complex64,
    t_final: f64,
}

impl EvolutionParams {
    pub fn new(alpha: f64, z: Complex64, t_final: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::param(format!("alpha must lie in [0, 1), got {alpha}")));
        }
        if !(z.re > 0.0) || !z.im.is_finite() || !z.re.is_finite() {
            return Err(Error::param(format!("z needs a positive real part, got {z}")));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::param(format!("T must be positive, got {t_final}")));
        }
        Ok(EvolutionParams { alpha, z, t_final })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Frequency multiplier `e^{-t z̄ |k|^α}`; the zero mode is left unchanged.
    pub fn multiplier(&self, t: f64, k: f64) -> Complex64 {
        if k == 0.0 || t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let power = (self.alpha * k.abs().ln()).exp();
        (-t * self.z.conj() * power).exp()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::param(format!("time must be non-negative, got {t}")));
        }
        if t > self.t_final * (1.0 + 1e-12) {
            return Err(Error::param(format!("time {t} exceeds T = {}", self.t_final)));
        }
        Ok(())
    }
}

/// The coherent state `φ_{ξ₀,h}(x) = (πh)^{-1/4} e^{ixξ₀/h - x²/2h}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentStateSpec {
    xi0: f64,
    h: f64,
}

impl CoherentStateSpec {
    pub fn new(xi0: f64, h: f64) -> Result<Self> {
        if !(xi0 > 0.0) || !xi0.is_finite() {
            return Err(Error::param(format!("xi0 must be positive, got {xi0}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::param(format!("h must be positive, got {h}")));
        }
        Ok(CoherentStateSpec { xi0, h })
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let h = self.h;
        (PI * h).powf(-0.25) * Complex64::new(-x * x / (2.0 * h), x * self.xi0 / h).exp()
    }

    /// `F_h(φ)(ξ) = (πh)^{-1/4} e^{-(ξ-ξ₀)²/2h}`.
    pub fn fourier(&self, xi: f64) -> f64 {
        let h = self.h;
        (PI * h).powf(-0.25) * (-(xi - self.xi0).powi(2) / (2.0 * h)).exp()
    }

    /// Frequency band `[ξ₀/2, 3ξ₀/2]` containing the support of the
    /// band-limited state.
    pub fn band(&self) -> (f64, f64) {
        (0.5 * self.xi0, 1.5 * self.xi0)
    }

    /// Largest admissible spacing of an `x` grid: `h / (8 · 3ξ₀/2)`.
    pub fn max_spacing(&self) -> f64 {
        self.h / (8.0 * 1.5 * self.xi0)
    }
}

/// Smooth even cutoff: 1 on `[-ξ₀/4, ξ₀/4]`, 0 outside `[-ξ₀/2, ξ₀/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    xi0: f64,
}

impl CutoffSpec {
    pub fn new(xi0: f64) -> Result<Self> {
        if !(xi0 > 0.0) || !xi0.is_finite() {
            return Err(Error::param(format!("xi0 must be positive, got {xi0}")));
        }
        Ok(CutoffSpec { xi0 })
    }

    pub fn inner(&self) -> f64 {
        0.25 * self.xi0
    }

    pub fn outer(&self) -> f64 {
        0.5 * self.xi0
    }
}

fn bump_tail(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `ψ(t) = f(t)/(f(t)+f(1-t))` with `f(t) = e^{-1/t}` for `t > 0`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = bump_tail(t);
        a / (a + bump_tail(1.0 - t))
    }
}

/// `χ(s)`, exactly 1 on the plateau and exactly 0 beyond the outer radius.
pub fn cutoff_eval(spec: &CutoffSpec, s: f64) -> f64 {
    let s = s.abs();
    let (inner, outer) = (spec.inner(), spec.outer());
    if s <= inner {
        1.0
    } else if s >= outer {
        0.0
    } else {
        smooth_step((outer - s) / (outer - inner))
    }
}

/// Frequency profile of `g_h(t)`; `evo = None` is the initial state.
pub fn frequency_profile(
    cs: &CoherentStateSpec,
    cut: &CutoffSpec,
    evo: Option<(&EvolutionParams, f64)>,
    xi: f64,
) -> Complex64 {
    let chi = cutoff_eval(cut, xi - cs.xi0());
    if chi == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let base = Complex64::new(chi * cs.fourier(xi), 0.0);
    match evo {
        Some((e, t)) if t != 0.0 => base * e.multiplier(t, xi / cs.h()),
        _ => base,
    }
}

/// Accuracy of the band quadrature behind every line solution.
#[derive(Debug, Clone, Copy)]
pub struct LineOptions {
    pub tol: f64,
    pub check_resolution: bool,
}

impl Default for LineOptions {
    fn default() -> Self {
        LineOptions {
            tol: 1e-12,
            check_resolution: true,
        }
    }
}

fn band_rule(cs: &CoherentStateSpec, tol: f64) -> BandQuadrature {
    let (lo, hi) = cs.band();
    BandQuadrature::new(lo, hi).with_tol(tol)
}

fn check_grid(cs: &CoherentStateSpec, grid: &Grid1D) -> Result<()> {
    if grid.spacing() > cs.max_spacing() {
        return Err(Error::Resolution(format!(
            "x spacing {:.3e} exceeds {:.3e} needed at h = {}",
            grid.spacing(),
            cs.max_spacing(),
            cs.h()
        )));
    }
    Ok(())
}

/// `g_h(t, x)` at arbitrary points.
pub fn solution_at(
    cs: &CoherentStateSpec,
    cut: &CutoffSpec,
    evo: Option<(&EvolutionParams, f64)>,
    xs: &[f64],
    opts: LineOptions,
) -> Result<Vec<Complex64>> {
    if let Some((e, t)) = evo {
        e.check_time(t)?;
    }
    inverse_transform_profile(
        |xi| frequency_profile(cs, cut, evo, xi),
        &band_rule(cs, opts.tol),
        cs.h(),
        xs,
    )
}

fn line_field(
    cs: &CoherentStateSpec,
    cut: &CutoffSpec,
    evo: Option<(&EvolutionParams, f64)>,
    grid: &Grid1D,
    opts: LineOptions,
) -> Result<SampledField> {
    if opts.check_resolution {
        check_grid(cs, grid)?;
    }
    let v = solution_at(cs, cut, evo, &grid.nodes(), opts)?;
    SampledField::new(*grid, v, Side::Physical)
}

/// `g_{0,h} = F_h⁻¹(χ(ξ-ξ₀) F_h(φ_{ξ₀,h}))` sampled on `grid`.
pub fn bandlimited_state(cs: &CoherentStateSpec, cut: &CutoffSpec, grid: &Grid1D) -> Result<SampledField> {
    line_field(cs, cut, None, grid, LineOptions::default())
}

/// `e^{-t z̄ (-Δ)^{α/2}} g_{0,h}` sampled on `grid`.
pub fn evolve_line(
    cs: &CoherentStateSpec,
    cut: &CutoffSpec,
    evo: &EvolutionParams,
    t: f64,
    grid: &Grid1D,
) -> Result<SampledField> {
    evo.check_time(t)?;
    line_field(cs, cut, Some((evo, t)), grid, LineOptions::default())
}

pub fn evolve_line_with(
    cs: &CoherentStateSpec,
    cut: &CutoffSpec,
    evo: &EvolutionParams,
    t: f64,
    grid: &Grid1D,
    opts: LineOptions,
) -> Result<SampledField> {
    evo.check_time(t)?;
    line_field(cs, cut, Some((evo, t)), grid, opts)
}

/// Modes `n` with `χ(hn - ξ₀) ≠ 0` lie inside this range.
pub fn torus_mode_range(cs: &CoherentStateSpec) -> (i64, i64) {
    let (lo, hi) = cs.band();
    ((lo / cs.h()).floor() as i64, (hi / cs.h()).ceil() as i64)
}

/// `a_{h,n} = 2^{-1/2} π^{-3/4} h^{1/4} χ(hn-ξ₀) e^{-(hn-ξ₀)²/2h}`, the
/// Fourier coefficients of the periodized band-limited state.
pub fn torus_coefficient(cs: &CoherentStateSpec, cut: &CutoffSpec, n: i64) -> f64 {
    let h = cs.h();
    let s = h * n as f64 - cs.xi0();
    let chi = cutoff_eval(cut, s);
    if chi == 0.0 {
        return 0.0;
    }
    0.5f64.sqrt() * PI.powf(-0.75) * h.powf(0.25) * chi * (-s * s / (2.0 * h)).exp()
}

/// All nonzero `a_{h,n}`.
pub fn torus_coeffs(cs: &CoherentStateSpec, cut: &CutoffSpec) -> FourierCoeffs {
    let (lo, hi) = torus_mode_range(cs);
    let c = (lo..=hi)
        .map(|n| Complex64::new(torus_coefficient(cs, cut, n), 0.0))
        .collect();
    FourierCoeffs::new(lo, hi, c).expect("non-empty mode range")
}

/// Mode-wise multiplication by `e^{-t z̄ |n|^α}`.
pub fn evolve_torus(c0: &FourierCoeffs, evo: &EvolutionParams, t: f64) -> Result<FourierCoeffs> {
    if !(t >= 0.0) {
        return Err(Error::param(format!("time must be non-negative, got {t}")));
    }
    Ok(c0.map(|n, c| c * evo.multiplier(t, n as f64)))
}

/// Settings for [`verify_pointwise_bounds`].
#[derive(Debug, Clone, Copy)]
pub struct BoundOptions {
    /// Time at which the solution is inspected.
    pub t: f64,
    /// Outer region is sampled on `ε ≤ |x| ≤ x_max`.
    pub x_max: f64,
    pub line: LineOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            t: 1.0,
            x_max: 40.0,
            line: LineOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub h: f64,
    /// `sup_{|x|>ε} |x|² |g_h(t,x)|`.
    pub m_out: f64,
    /// Where `m_out` is attained.
    pub m_out_at: f64,
    /// `sup_{|x|<ξ₀/8} h^α |log|g_h(t,x)| + x²/2h|`.
    pub m_in: f64,
    /// `|g_h(0,0)| (πh)^{1/4}`.
    pub origin_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    /// Fit of `log m_out` against `1/h`.
    pub out_fit: Option<LineFit>,
    pub m_in_max: f64,
}

/// Samples the outer decay and inner Gaussian shape of `g_h(t, ·)` over a
/// sweep of `h`.
pub fn verify_pointwise_bounds(
    xi0: f64,
    evo: &EvolutionParams,
    h_list: &[f64],
    eps: f64,
    opts: BoundOptions,
) -> Result<BoundReport> {
    if !(eps > 0.0 && eps < PI) {
        return Err(Error::param(format!("eps must lie in (0, π), got {eps}")));
    }
    if h_list.is_empty() || h_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("h list must be non-empty and strictly decreasing"));
    }
    if !(opts.x_max > eps) {
        return Err(Error::param("x_max must exceed eps"));
    }
    evo.check_time(opts.t)?;
    let cut = CutoffSpec::new(xi0)?;
    let mut rows = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let row = bound_row(xi0, &cut, evo, h, eps, opts).map_err(|e| e.at_scale(h))?;
        rows.push(row);
    }
    let inv: Vec<f64> = rows.iter().map(|r| 1.0 / r.h).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.m_out.ln()).collect();
    let out_fit = fit_line(&inv, &logs);
    let m_in_max = rows.iter().map(|r| r.m_in).fold(0.0, f64::max);
    Ok(BoundReport {
        rows,
        out_fit,
        m_in_max,
    })
}

fn bound_row(
    xi0: f64,
    cut: &CutoffSpec,
    evo: &EvolutionParams,
    h: f64,
    eps: f64,
    opts: BoundOptions,
) -> Result<BoundRow> {
    let cs = CoherentStateSpec::new(xi0, h)?;
    let dx = cs.max_spacing();
    let n_out = ((opts.x_max - eps) / dx).ceil() as usize + 1;
    let right = Grid1D::closed(eps, opts.x_max, n_out)?.nodes();
    let outer: Vec<f64> = right.iter().map(|x| -x).chain(right.iter().copied()).collect();
    let at = Some((evo, opts.t));
    let vals = solution_at(&cs, cut, at, &outer, opts.line)?;
    let (m_out, m_out_at) = outer
        .iter()
        .zip(&vals)
        .map(|(x, g)| (x * x * g.norm(), *x))
        .fold((0.0, 0.0), |acc, p| if p.0 > acc.0 { p } else { acc });

    let r_in = xi0 / 8.0;
    let n_in = (2.0 * r_in / dx).ceil() as usize + 1;
    let inner = Grid1D::closed(-r_in, r_in, n_in)?.nodes();
    let vals = solution_at(&cs, cut, at, &inner, opts.line)?;
    let scale = h.powf(evo.alpha());
    let m_in = inner
        .iter()
        .zip(&vals)
        .map(|(x, g)| scale * (g.norm().ln() + x * x / (2.0 * h)).abs())
        .fold(0.0, f64::max);

    let origin = solution_at(&cs, cut, None, &[0.0], opts.line)?[0];
    Ok(BoundRow {
        h,
        m_out,
        m_out_at,
        m_in,
        origin_ratio: origin.norm() * (PI * h).powf(0.25),
    })
}
