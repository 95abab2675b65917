//! Grids, semiclassical Fourier transforms, L² norms and Poisson periodization.
//!
//! Conventions:
//!
//! ```text
//!   F_h(f)(ξ)    = (2πh)^{-1/2} ∫ f(x) e^{-ixξ/h} dx
//!   F_h⁻¹(f̂)(x) = (2πh)^{-1/2} ∫ f̂(ξ) e^{+ixξ/h} dξ
//!   c_n(f)       = (2π)^{-1}    ∫_𝕋 f(x) e^{-inx} dx
//! ```
//!
//! With these, `c_n(Σ_k f(·+2πk)) = (2π)^{-1/2} √h F_h(f)(hn)`.
//!
//! All integrals over uniform grids use the trapezoidal rule, which is
//! spectrally accurate for the smooth decaying (or periodic) integrands that
//! appear here.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::{Error, Result};

/// Which side of the Fourier transform a field lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Physical,
    Frequency,
}

/// Uniform one-dimensional grid.
///
/// A closed grid has nodes `lo, lo+d, …, hi` with `d = (hi-lo)/(n-1)`; a
/// periodic grid has nodes `lo, lo+d, …, hi-d` with `d = (hi-lo)/n` and
/// identifies `hi` with `lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    n: usize,
    periodic: bool,
}

impl Grid1D {
    pub fn closed(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::build(lo, hi, n, false)
    }

    pub fn periodic(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::build(lo, hi, n, true)
    }

    /// Periodic grid on `[-π, π)`.
    pub fn torus(n: usize) -> Result<Self> {
        Self::periodic(-PI, PI, n)
    }

    fn build(lo: f64, hi: f64, n: usize, periodic: bool) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::param(format!("grid needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(Error::param(format!("grid needs at least 2 nodes, got {n}")));
        }
        Ok(Grid1D { lo, hi, n, periodic })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            (self.hi - self.lo) / self.n as f64
        } else {
            (self.hi - self.lo) / (self.n - 1) as f64
        }
    }

    pub fn node(&self, j: usize) -> f64 {
        if !self.periodic && j == self.n - 1 {
            return self.hi;
        }
        self.lo + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

/// Complex samples of a function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid1D,
    values: Vec<Complex64>,
    side: Side,
}

impl SampledField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, side: Side) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::param(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite sample at node {j}")));
        }
        Ok(SampledField { grid, values, side })
    }

    pub fn from_fn(grid: Grid1D, side: Side, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values, side)
    }

    pub fn zeros(grid: Grid1D, side: Side) -> Self {
        SampledField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            side,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiply every sample by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        SampledField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            side: self.side,
        }
    }
}

/// Closed interval, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }
}

/// Fourier coefficients `c_n` for `n_min ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    n_min: i64,
    n_max: i64,
    c: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn new(n_min: i64, n_max: i64, c: Vec<Complex64>) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::param(format!("empty mode range {n_min}..={n_max}")));
        }
        if c.len() as i64 != n_max - n_min + 1 {
            return Err(Error::param(format!(
                "{} coefficients for modes {n_min}..={n_max}",
                c.len()
            )));
        }
        Ok(FourierCoeffs { n_min, n_max, c })
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn values(&self) -> &[Complex64] {
        &self.c
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        (self.n_min..=self.n_max).zip(self.c.iter().copied())
    }

    /// Coefficient of mode `n`, zero outside the stored range.
    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.n_min || n > self.n_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[(n - self.n_min) as usize]
        }
    }

    /// Evaluate `Σ c_n e^{inx}` at every `x`.
    pub fn synthesize(&self, xs: &[f64]) -> Vec<Complex64> {
        xs.par_iter()
            .map(|&x| phase_sum(&self.c, self.n_min as f64, 1.0, x, Weights::Flat))
            .collect()
    }

    pub fn map(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        FourierCoeffs {
            n_min: self.n_min,
            n_max: self.n_max,
            c: self.modes().map(|(n, c)| f(n, c)).collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum Weights {
    Flat,
    Trapezoid,
}

/// `Σ_j w_j v_j e^{i k (s0 + j ds)}`, with the phase advanced by recurrence
/// and re-anchored every 64 steps.
pub(crate) fn phase_sum(values: &[Complex64], s0: f64, ds: f64, k: f64, weights: Weights) -> Complex64 {
    const BLOCK: usize = 64;
    let step = Complex64::from_polar(1.0, k * ds);
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, chunk) in values.chunks(BLOCK).enumerate() {
        let mut phase = Complex64::from_polar(1.0, k * (s0 + (b * BLOCK) as f64 * ds));
        for v in chunk {
            acc += v * phase;
            phase *= step;
        }
    }
    if weights == Weights::Trapezoid && !values.is_empty() {
        let last = values.len() - 1;
        acc -= 0.5 * values[0] * Complex64::from_polar(1.0, k * s0);
        acc -= 0.5 * values[last] * Complex64::from_polar(1.0, k * (s0 + last as f64 * ds));
    }
    acc
}

/// Tolerances for the grid-based transforms.
#[derive(Debug, Clone, Copy)]
pub struct TransformOptions {
    /// Largest admissible `|f|` at the grid ends, relative to `sup |f|`.
    pub decay_tol: f64,
    /// Enforce `Δx ≤ h / (8 ξ_max)` on the input grid.
    pub check_resolution: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            decay_tol: 1e-10,
            check_resolution: true,
        }
    }
}

fn check_decay(f: &SampledField, tol: f64) -> Result<()> {
    let sup = f.sup_norm();
    let v = f.values();
    let edge = v[0].norm().max(v[v.len() - 1].norm());
    if edge > tol * sup {
        return Err(Error::Truncation {
            value: edge,
            tol: tol * sup,
        });
    }
    Ok(())
}

fn check_oscillation(input: &Grid1D, h: f64, out: &Grid1D) -> Result<()> {
    let k_max = out.lo().abs().max(out.hi().abs());
    if k_max == 0.0 {
        return Ok(());
    }
    let limit = h / (8.0 * k_max);
    if input.spacing() > limit {
        return Err(Error::Resolution(format!(
            "spacing {:.3e} exceeds h/(8·{k_max}) = {limit:.3e}",
            input.spacing()
        )));
    }
    Ok(())
}

fn transform(f: &SampledField, h: f64, out_grid: &Grid1D, sign: f64, opts: TransformOptions) -> Result<Vec<Complex64>> {
    if !(h > 0.0) {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    if f.grid().is_periodic() {
        return Err(Error::param("transform input must live on a closed grid"));
    }
    check_decay(f, opts.decay_tol)?;
    if opts.check_resolution {
        check_oscillation(f.grid(), h, out_grid)?;
    }
    let g = f.grid();
    let pref = g.spacing() / (2.0 * PI * h).sqrt();
    let outs = out_grid.nodes();
    Ok(outs
        .par_iter()
        .map(|&s| pref * phase_sum(f.values(), g.lo(), g.spacing(), sign * s / h, Weights::Trapezoid))
        .collect())
}

/// `ξ ↦ F_h(f)(ξ)` on `out_grid`, by trapezoidal quadrature of the samples.
pub fn semiclassical_fourier(f: &SampledField, h: f64, out_grid: &Grid1D) -> Result<SampledField> {
    semiclassical_fourier_with(f, h, out_grid, TransformOptions::default())
}

pub fn semiclassical_fourier_with(
    f: &SampledField,
    h: f64,
    out_grid: &Grid1D,
    opts: TransformOptions,
) -> Result<SampledField> {
    if f.side() != Side::Physical {
        return Err(Error::param("forward transform expects a physical-side field"));
    }
    let v = transform(f, h, out_grid, -1.0, opts)?;
    SampledField::new(*out_grid, v, Side::Frequency)
}

/// `x ↦ F_h⁻¹(f̂)(x)` on `out_grid`.
pub fn inverse_semiclassical_fourier(fhat: &SampledField, h: f64, out_grid: &Grid1D) -> Result<SampledField> {
    inverse_semiclassical_fourier_with(fhat, h, out_grid, TransformOptions::default())
}

pub fn inverse_semiclassical_fourier_with(
    fhat: &SampledField,
    h: f64,
    out_grid: &Grid1D,
    opts: TransformOptions,
) -> Result<SampledField> {
    if fhat.side() != Side::Frequency {
        return Err(Error::param("inverse transform expects a frequency-side field"));
    }
    let v = transform(fhat, h, out_grid, 1.0, opts)?;
    SampledField::new(*out_grid, v, Side::Physical)
}

/// Frequency band and accuracy target for [`inverse_transform_profile`].
#[derive(Debug, Clone, Copy)]
pub struct BandQuadrature {
    pub lo: f64,
    pub hi: f64,
    /// Stop when successive refinements differ by at most
    /// `tol · (2πh)^{-1/2} ∫|f̂|`, an upper bound for `sup |F_h⁻¹ f̂|`.
    pub tol: f64,
    /// Absolute floor for the same test, for integrands at roundoff level.
    pub abs_tol: f64,
    pub min_intervals: usize,
    pub max_intervals: usize,
}

impl BandQuadrature {
    pub fn new(lo: f64, hi: f64) -> Self {
        BandQuadrature {
            lo,
            hi,
            tol: 1e-12,
            abs_tol: 0.0,
            min_intervals: 256,
            max_intervals: 1 << 18,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Inverse semiclassical transform of a frequency profile given in closed
/// form and supported in `[band.lo, band.hi]`, evaluated at arbitrary points.
///
/// The profile must vanish with all its derivatives at the band ends; the
/// trapezoidal rule is then refined by interval doubling until converged.
pub fn inverse_transform_profile<F>(profile: F, band: &BandQuadrature, h: f64, xs: &[f64]) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !(h > 0.0) {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    if !(band.hi > band.lo) || band.min_intervals < 2 {
        return Err(Error::param("empty frequency band"));
    }
    let width = band.hi - band.lo;
    let pref = (2.0 * PI * h).sqrt().recip();
    let mut n = band.min_intervals;
    let mut d = width / n as f64;
    let samples: Vec<Complex64> = (0..=n)
        .into_par_iter()
        .map(|j| profile(band.lo + j as f64 * d))
        .collect();
    let mut abs_sum: f64 = samples.iter().map(|v| v.norm()).sum();
    // Trapezoid sums without the spacing factor.
    let mut sums: Vec<Complex64> = xs
        .par_iter()
        .map(|&x| phase_sum(&samples, band.lo, d, x / h, Weights::Trapezoid))
        .collect();
    let mut current: Vec<Complex64> = sums.iter().map(|s| s * d * pref).collect();
    let mut last_increment = f64::INFINITY;
    while n < band.max_intervals {
        let mids: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|j| profile(band.lo + (j as f64 + 0.5) * d))
            .collect();
        abs_sum += mids.iter().map(|v| v.norm()).sum::<f64>();
        let mid_sums: Vec<Complex64> = xs
            .par_iter()
            .map(|&x| phase_sum(&mids, band.lo + 0.5 * d, d, x / h, Weights::Flat))
            .collect();
        n *= 2;
        d *= 0.5;
        for (s, m) in sums.iter_mut().zip(&mid_sums) {
            *s += m;
        }
        let next: Vec<Complex64> = sums.iter().map(|s| s * d * pref).collect();
        let scale = pref * abs_sum * d;
        last_increment = next
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        current = next;
        if last_increment <= (band.tol * scale).max(band.abs_tol) {
            return Ok(current);
        }
    }
    Err(Error::Convergence {
        what: "band-limited inverse transform",
        iterations: n,
        last_increment,
    })
}

/// L² norm over a sub-interval, with a flag for an empty intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedNorm {
    pub value: f64,
    pub empty_intersection: bool,
}

/// `(∫_sub |f|²)^{1/2}`: exact integral of the piecewise-linear interpolant of
/// `|f|²` over `sub ∩ span(grid)` (the trapezoidal rule when `sub` ends on
/// nodes). On a periodic grid the span is `[lo, hi]` with `f(hi) = f(lo)`.
pub fn l2_norm(f: &SampledField, sub: Interval) -> RestrictedNorm {
    let sq = restricted_square(f, sub);
    match sq {
        Some(s) => RestrictedNorm {
            value: s.max(0.0).sqrt(),
            empty_intersection: false,
        },
        None => RestrictedNorm {
            value: 0.0,
            empty_intersection: true,
        },
    }
}

/// Norm over a union of disjoint intervals.
pub fn l2_norm_union(f: &SampledField, subs: &[Interval]) -> f64 {
    subs.iter().filter_map(|s| restricted_square(f, *s)).sum::<f64>().sqrt()
}

/// `∫_sub |f|²` or `None` when `sub` misses the grid span.
pub(crate) fn restricted_square(f: &SampledField, sub: Interval) -> Option<f64> {
    let g = f.grid();
    let a = sub.lo.max(g.lo());
    let b = sub.hi.min(g.hi());
    if !(b > a) {
        return None;
    }
    let d = g.spacing();
    let v = f.values();
    let n = g.len();
    let sq = |j: usize| -> f64 {
        if j == n {
            v[0].norm_sqr() // periodic wrap node
        } else {
            v[j].norm_sqr()
        }
    };
    let cells = if g.is_periodic() { n } else { n - 1 };
    let first = (((a - g.lo()) / d).floor() as usize).min(cells - 1);
    let last = (((b - g.lo()) / d).ceil() as usize).clamp(first + 1, cells);
    let mut total = 0.0;
    for c in first..last {
        let x0 = g.lo() + c as f64 * d;
        let x1 = if c + 1 == cells { g.hi() } else { x0 + d };
        let lo = a.max(x0);
        let hi = b.min(x1);
        if hi <= lo {
            continue;
        }
        let (y0, y1) = (sq(c), sq(c + 1));
        // linear interpolant of |f|² on [x0, x1], integrated over [lo, hi]
        let at = |x: f64| y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    Some(total)
}

/// Space–time norm `(∫_0^T ∫_sub |f(t,x)|² dx dt)^{1/2}` from snapshots at
/// strictly increasing times, trapezoidal in `t`.
pub fn spacetime_l2_norm(snapshots: &[(f64, SampledField)], sub: Interval) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(Error::param(format!(
            "need at least 2 snapshots, got {}",
            snapshots.len()
        )));
    }
    if snapshots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::param("snapshot times must be strictly increasing"));
    }
    let sq: Vec<f64> = snapshots
        .iter()
        .map(|(_, f)| restricted_square(f, sub).unwrap_or(0.0))
        .collect();
    let total: f64 = snapshots
        .windows(2)
        .zip(sq.windows(2))
        .map(|(t, s)| 0.5 * (s[0] + s[1]) * (t[1].0 - t[0].0))
        .sum();
    Ok(total.sqrt())
}

/// Space–time norm for an arbitrary time rule: `Σ_k w_k ∫_subs |f_k|²`.
pub fn weighted_spacetime_l2_norm(snapshots: &[(f64, SampledField)], subs: &[Interval]) -> f64 {
    snapshots
        .iter()
        .map(|(w, f)| w * l2_norm_union(f, subs).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Settings for [`periodize`].
#[derive(Debug, Clone, Copy)]
pub struct PeriodizeOptions {
    /// Largest shell index `K` in `Σ_{|k|≤K}`.
    pub k_max: usize,
    /// Stop once a shell changes the sum by at most `tol · sup |sum|`.
    pub tol: f64,
}

impl Default for PeriodizeOptions {
    fn default() -> Self {
        PeriodizeOptions { k_max: 64, tol: 1e-13 }
    }
}

#[derive(Debug, Clone)]
pub struct Periodized {
    pub field: SampledField,
    /// Number of shells `K` actually summed.
    pub shells: usize,
    /// Sup-norm contribution of the last shell.
    pub last_increment: f64,
}

/// `x ↦ Σ_{|k|≤K} f(x + 2πk)` on a periodic grid of period 2π, adding shells
/// `±k` until one contributes less than the tolerance.
///
/// `f` evaluates the line function at a batch of points.
pub fn periodize<F>(f: F, torus: &Grid1D, opts: PeriodizeOptions) -> Result<Periodized>
where
    F: Fn(&[f64]) -> Result<Vec<Complex64>>,
{
    if !torus.is_periodic() || ((torus.hi() - torus.lo()) - 2.0 * PI).abs() > 1e-12 {
        return Err(Error::param(
            "periodization target must be a periodic grid of length 2π",
        ));
    }
    let xs = torus.nodes();
    let mut sum = f(&xs)?;
    if sum.len() != xs.len() {
        return Err(Error::param("line function returned the wrong number of samples"));
    }
    let mut last_increment = f64::INFINITY;
    for k in 1..=opts.k_max {
        let shift = 2.0 * PI * k as f64;
        let pts: Vec<f64> = xs
            .iter()
            .map(|x| x + shift)
            .chain(xs.iter().map(|x| x - shift))
            .collect();
        let vals = f(&pts)?;
        let m = xs.len();
        let mut inc = 0.0f64;
        for j in 0..m {
            let add = vals[j] + vals[m + j];
            inc = inc.max(add.norm());
            sum[j] += add;
        }
        last_increment = inc;
        let scale = sum.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if inc <= opts.tol * scale {
            return Ok(Periodized {
                field: SampledField::new(*torus, sum, Side::Physical)?,
                shells: k,
                last_increment,
            });
        }
    }
    Err(Error::Convergence {
        what: "periodization",
        iterations: opts.k_max,
        last_increment,
    })
}

fn check_torus(f: &SampledField) -> Result<()> {
    let g = f.grid();
    if !g.is_periodic() || ((g.hi() - g.lo()) - 2.0 * PI).abs() > 1e-12 {
        return Err(Error::param("Fourier coefficients need a periodic grid of length 2π"));
    }
    Ok(())
}

/// All modes resolved by the grid: `|n| < m/2`.
pub fn fourier_coeffs(f: &SampledField) -> Result<FourierCoeffs> {
    check_torus(f)?;
    let lim = (f.grid().len() as i64 - 1) / 2;
    fourier_coeffs_range(f, -lim, lim)
}

/// `c_n(f) = (1/m) Σ_j f(x_j) e^{-inx_j}` for `n_min ≤ n ≤ n_max`.
pub fn fourier_coeffs_range(f: &SampledField, n_min: i64, n_max: i64) -> Result<FourierCoeffs> {
    check_torus(f)?;
    let m = f.grid().len() as i64;
    if 2 * n_min.abs().max(n_max.abs()) >= m {
        return Err(Error::Resolution(format!(
            "mode {} is not resolved by {m} nodes",
            n_min.abs().max(n_max.abs())
        )));
    }
    let g = f.grid();
    let c = (n_min..=n_max)
        .into_par_iter()
        .map(|n| phase_sum(f.values(), g.lo(), g.spacing(), -(n as f64), Weights::Flat) / m as f64)
        .collect();
    FourierCoeffs::new(n_min, n_max, c)
}

/// Discretization used by [`coeff_identity_check`].
#[derive(Debug, Clone, Copy)]
pub struct IdentityCheckOptions {
    /// Nodes of the periodic grid on which the periodization is sampled.
    pub torus_n: usize,
    /// Modes compared; must satisfy `2|n| < torus_n`.
    pub n_min: i64,
    pub n_max: i64,
    /// Half-width `L` of the line truncation `[-L, L]`.
    pub line_half_width: f64,
    /// Nodes of the line grid.
    pub line_n: usize,
    pub periodize: PeriodizeOptions,
    pub decay_tol: f64,
}

impl IdentityCheckOptions {
    /// Defaults for a semiclassical family at scale `h` with frequencies in
    /// `(0, 2)`: modes `0..=2/h`, line spacing fine enough for `Δx ≤ 1/(8 n_max)`.
    pub fn for_scale(h: f64) -> Self {
        let n_max = (2.0 / h).ceil() as i64;
        let torus_n = (2 * n_max as usize + 2).next_power_of_two().max(32);
        let line_half_width = 40.0 + 8.0 / h;
        let spacing = 1.0 / (8.0 * n_max as f64);
        let line_n = (2.0 * line_half_width / spacing).ceil() as usize + 1;
        IdentityCheckOptions {
            torus_n,
            n_min: 0,
            n_max,
            line_half_width,
            line_n,
            periodize: PeriodizeOptions::default(),
            decay_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub max_deviation: f64,
    /// Largest `|c_n|` among the compared modes.
    pub max_coefficient: f64,
    pub shells: usize,
    pub periodized: FourierCoeffs,
    pub from_transform: FourierCoeffs,
}

/// Compares `c_n(Σ_k f(·+2πk))` against `(2π)^{-1/2} √h F_h(f)(hn)`, both
/// computed independently from the line function `f`.
pub fn coeff_identity_check<F>(f_line: F, h: f64, opts: &IdentityCheckOptions) -> Result<IdentityCheck>
where
    F: Fn(&[f64]) -> Result<Vec<Complex64>>,
{
    if !(h > 0.0) {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    let torus = Grid1D::torus(opts.torus_n)?;
    let per = periodize(&f_line, &torus, opts.periodize)?;
    let lhs = fourier_coeffs_range(&per.field, opts.n_min, opts.n_max)?;

    let line = Grid1D::closed(-opts.line_half_width, opts.line_half_width, opts.line_n)?;
    let samples = SampledField::new(line, f_line(&line.nodes())?, Side::Physical)?;
    let count = (opts.n_max - opts.n_min + 1) as usize;
    let rhs = if count == 1 {
        // a single mode: transform at one frequency
        let xi = h * opts.n_min as f64;
        let v = phase_sum(samples.values(), line.lo(), line.spacing(), -xi / h, Weights::Trapezoid) * line.spacing()
            / (2.0 * PI * h).sqrt();
        check_decay(&samples, opts.decay_tol)?;
        vec![v]
    } else {
        let freq = Grid1D::closed(h * opts.n_min as f64, h * opts.n_max as f64, count)?;
        semiclassical_fourier_with(
            &samples,
            h,
            &freq,
            TransformOptions {
                decay_tol: opts.decay_tol,
                check_resolution: true,
            },
        )?
        .into_values()
    };
    let pref = h.sqrt() / (2.0 * PI).sqrt();
    let rhs = FourierCoeffs::new(opts.n_min, opts.n_max, rhs.into_iter().map(|v| v * pref).collect())?;
    let max_deviation = lhs
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let max_coefficient = lhs.values().iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(IdentityCheck {
        max_deviation,
        max_coefficient,
        shells: per.shells,
        periodized: lhs,
        from_transform: rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn coherent(xi0: f64, h: f64) -> impl Fn(f64) -> Complex64 {
        move |x| (PI * h).powf(-0.25) * Complex64::new(-x * x / (2.0 * h), x * xi0 / h).exp()
    }

    #[test]
    fn grid_invariants() {
        assert!(Grid1D::closed(1.0, 1.0, 4).is_err());
        assert!(Grid1D::closed(0.0, 1.0, 1).is_err());
        let g = Grid1D::closed(0.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.node(4), 1.0);
        let p = Grid1D::periodic(0.0, 1.0, 4).unwrap();
        assert_eq!(p.spacing(), 0.25);
        assert_eq!(p.nodes(), vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn field_rejects_bad_samples() {
        let g = Grid1D::closed(0.0, 1.0, 3).unwrap();
        assert!(SampledField::new(g, vec![c(0.0); 2], Side::Physical).is_err());
        assert!(SampledField::new(g, vec![c(0.0), c(f64::NAN), c(0.0)], Side::Physical).is_err());
    }

    #[test]
    fn fourier_of_coherent_state_at_its_centre() {
        // F_1(φ_{1,1})(1) = π^{-1/4}
        let h = 1.0;
        let grid = Grid1D::closed(-12.0, 12.0, 4801).unwrap();
        let f = SampledField::from_fn(grid, Side::Physical, coherent(1.0, h)).unwrap();
        let out = Grid1D::closed(0.9, 1.1, 3).unwrap();
        let fh = semiclassical_fourier(&f, h, &out).unwrap();
        let v = fh.values();
        assert!((v[1] - c(PI.powf(-0.25))).norm() < 1e-12, "{}", v[1]);
        // even profile about ξ₀
        assert!((v[0] - v[2]).norm() < 1e-12);
    }

    #[test]
    fn fourier_of_zero_is_zero() {
        let grid = Grid1D::closed(-1.0, 1.0, 101).unwrap();
        let f = SampledField::zeros(grid, Side::Physical);
        let out = Grid1D::closed(-1.0, 1.0, 7).unwrap();
        let fh = semiclassical_fourier(&f, 0.5, &out).unwrap();
        assert!(fh.values().iter().all(|v| *v == c(0.0)));
        assert_eq!(fh.side(), Side::Frequency);
    }

    #[test]
    fn transform_error_paths() {
        let grid = Grid1D::closed(-1.0, 1.0, 101).unwrap();
        let ones = SampledField::from_fn(grid, Side::Physical, |_| c(1.0)).unwrap();
        let out = Grid1D::closed(0.0, 0.1, 3).unwrap();
        assert!(matches!(
            semiclassical_fourier(&ones, 1.0, &out),
            Err(Error::Truncation { .. })
        ));
        let zero = SampledField::zeros(grid, Side::Physical);
        assert!(matches!(
            semiclassical_fourier(&zero, 0.0, &out),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            semiclassical_fourier(&zero, -1.0, &out),
            Err(Error::Parameter(_))
        ));
        let fast = Grid1D::closed(0.0, 100.0, 3).unwrap();
        assert!(matches!(
            semiclassical_fourier(&zero, 1.0, &fast),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn inverse_of_gaussian_profile_at_origin() {
        // F_h⁻¹((πh)^{-1/4} e^{-(ξ-ξ₀)²/2h})(0) = (πh)^{-1/4}
        let (h, xi0) = (0.1, 1.0);
        let grid = Grid1D::closed(xi0 - 3.0, xi0 + 3.0, 2001).unwrap();
        let fhat = SampledField::from_fn(grid, Side::Frequency, |xi| {
            c((PI * h).powf(-0.25) * (-(xi - xi0).powi(2) / (2.0 * h)).exp())
        })
        .unwrap();
        let out = Grid1D::closed(-0.01, 0.01, 3).unwrap();
        let g = inverse_semiclassical_fourier(&fhat, h, &out).unwrap();
        assert!((g.values()[1] - c((PI * h).powf(-0.25))).norm() < 1e-12);
        let zero = SampledField::zeros(grid, Side::Frequency);
        let z = inverse_semiclassical_fourier(&zero, h, &out).unwrap();
        assert!(z.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn round_trip_coherent_state() {
        let (h, xi0) = (0.1, 1.0);
        let x = Grid1D::closed(-2.6, 2.6, 1601).unwrap();
        let f = SampledField::from_fn(x, Side::Physical, coherent(xi0, h)).unwrap();
        let xi = Grid1D::closed(xi0 - 2.6, xi0 + 2.6, 1601).unwrap();
        let fh = semiclassical_fourier(&f, h, &xi).unwrap();
        let back = inverse_semiclassical_fourier(&fh, h, &x).unwrap();
        let err = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "round trip error {err:e}");
    }

    #[test]
    fn plancherel() {
        for h in [0.05f64, 0.1, 0.3] {
            // both profiles below e^{-35} beyond ±L
            let l = (70.0 * h).sqrt();
            let nx = (2.0 * l * 8.0 * (1.0 + l) / h).ceil() as usize + 1;
            let x = Grid1D::closed(-l, l, nx).unwrap();
            let f = SampledField::from_fn(x, Side::Physical, coherent(1.0, h)).unwrap();
            let xi = Grid1D::closed(1.0 - l, 1.0 + l, 2001).unwrap();
            let fh = semiclassical_fourier(&f, h, &xi).unwrap();
            let a = l2_norm(&f, Interval::real_line()).value;
            let b = l2_norm(&fh, Interval::real_line()).value;
            assert!((a - b).abs() < 1e-8, "h={h}: {a} vs {b}");
            assert!((a - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn l2_norm_examples() {
        let g = Grid1D::closed(0.0, 1.0, 11).unwrap();
        let one = SampledField::from_fn(g, Side::Physical, |_| c(1.0)).unwrap();
        assert!((l2_norm(&one, Interval::new(0.0, 1.0)).value - 1.0).abs() < 1e-15);
        assert!((l2_norm(&one, Interval::new(0.0, 0.25)).value - 0.5).abs() < 1e-15);
        let none = l2_norm(&one, Interval::new(2.0, 3.0));
        assert_eq!(none.value, 0.0);
        assert!(none.empty_intersection);

        let g = Grid1D::closed(-10.0, 10.0, 2001).unwrap();
        let gauss = SampledField::from_fn(g, Side::Physical, |x| c((-x * x / 2.0).exp())).unwrap();
        let n = l2_norm(&gauss, Interval::real_line()).value;
        assert!((n - PI.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_on_torus_wraps() {
        let g = Grid1D::torus(64).unwrap();
        let f = SampledField::from_fn(g, Side::Physical, |x| Complex64::new(0.0, 3.0 * x).exp()).unwrap();
        let full = l2_norm(&f, Interval::real_line()).value;
        assert!((full - (2.0 * PI).sqrt()).abs() < 1e-12);
        let half = l2_norm_union(&f, &[Interval::new(-PI, -0.5), Interval::new(0.5, PI)]);
        assert!((half - (2.0 * PI - 1.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spacetime_examples() {
        let g = Grid1D::closed(0.0, 1.0, 5).unwrap();
        let one = SampledField::from_fn(g, Side::Physical, |_| c(1.0)).unwrap();
        let snaps: Vec<_> = [0.0, 0.5, 1.0].iter().map(|&t| (t, one.clone())).collect();
        assert!((spacetime_l2_norm(&snaps, Interval::new(0.0, 1.0)).unwrap() - 1.0).abs() < 1e-15);

        let snaps: Vec<_> = (0..=2000)
            .map(|k| {
                let t = k as f64 / 2000.0;
                (t, one.scaled(c((-t).exp())))
            })
            .collect();
        let exact = ((1.0 - (-2.0f64).exp()) / 2.0).sqrt();
        let got = spacetime_l2_norm(&snaps, Interval::new(0.0, 1.0)).unwrap();
        assert!((got - exact).abs() < 1e-7, "{got} vs {exact}");

        let zero = SampledField::zeros(g, Side::Physical);
        let snaps = vec![(0.0, zero.clone()), (1.0, zero)];
        assert_eq!(spacetime_l2_norm(&snaps, Interval::new(0.0, 1.0)).unwrap(), 0.0);
        assert!(spacetime_l2_norm(&snaps[..1], Interval::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn periodize_examples() {
        let torus = Grid1D::torus(64).unwrap();
        // compactly supported inside (-π, π): single term
        let bump = |x: f64| {
            if x.abs() < 3.0 {
                c((-1.0 / (9.0 - x * x)).exp())
            } else {
                c(0.0)
            }
        };
        let per = periodize(
            |xs: &[f64]| Ok(xs.iter().map(|&x| bump(x)).collect()),
            &torus,
            Default::default(),
        )
        .unwrap();
        for (x, v) in torus.nodes().iter().zip(per.field.values()) {
            assert_eq!(*v, bump(*x));
        }
        assert_eq!(per.shells, 1);

        let per = periodize(
            |xs: &[f64]| Ok(xs.iter().map(|&x| c((-x * x).exp())).collect()),
            &torus,
            Default::default(),
        )
        .unwrap();
        let at0 = per.field.values()[32];
        let direct: f64 = (-5..=5).map(|k: i32| (-4.0 * PI * PI * (k * k) as f64).exp()).sum();
        assert!((at0.re - direct).abs() < 1e-15);

        let zero = periodize(|xs: &[f64]| Ok(vec![c(0.0); xs.len()]), &torus, Default::default()).unwrap();
        assert_eq!(zero.field.sup_norm(), 0.0);
    }

    #[test]
    fn periodize_reports_slow_tails() {
        let torus = Grid1D::torus(16).unwrap();
        let slow = |xs: &[f64]| Ok(xs.iter().map(|&x| c(1.0 / (1.0 + x * x))).collect());
        let err = periodize(slow, &torus, PeriodizeOptions { k_max: 5, tol: 1e-12 }).unwrap_err();
        match err {
            Error::Convergence { last_increment, .. } => assert!(last_increment > 1e-4),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn coefficients_of_trigonometric_polynomial() {
        let g = Grid1D::torus(32).unwrap();
        let f = SampledField::from_fn(g, Side::Physical, |x| {
            2.0 * Complex64::new(0.0, 3.0 * x).exp() + Complex64::new(0.5, 0.0) * Complex64::new(0.0, -7.0 * x).exp()
        })
        .unwrap();
        let c = fourier_coeffs(&f).unwrap();
        assert_eq!((c.n_min(), c.n_max()), (-15, 15));
        for (n, v) in c.modes() {
            let expect = match n {
                3 => 2.0,
                -7 => 0.5,
                _ => 0.0,
            };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-14, "n={n}: {v}");
        }
        let back = c.synthesize(&g.nodes());
        for (a, b) in back.iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!(matches!(fourier_coeffs_range(&f, 0, 16), Err(Error::Resolution(_))));
    }

    #[test]
    fn identity_check_single_gaussian() {
        // c_0(per f)·√(2π) = F(f)(0) for f = e^{-x²}: both sides equal 1/√2.
        let f = |xs: &[f64]| Ok(xs.iter().map(|&x| c((-x * x).exp())).collect());
        let opts = IdentityCheckOptions {
            torus_n: 32,
            n_min: 0,
            n_max: 0,
            line_half_width: 8.0,
            line_n: 1601,
            periodize: PeriodizeOptions::default(),
            decay_tol: 1e-12,
        };
        let out = coeff_identity_check(f, 1.0, &opts).unwrap();
        let c0 = out.periodized.get(0) * (2.0 * PI).sqrt();
        assert!((c0.re - 0.5f64.sqrt()).abs() < 1e-10);
        assert!(out.max_deviation < 1e-10);
    }

    #[test]
    fn identity_check_zero() {
        let f = |xs: &[f64]| Ok(vec![c(0.0); xs.len()]);
        let mut opts = IdentityCheckOptions::for_scale(0.5);
        opts.line_half_width = 5.0;
        opts.line_n = 801;
        let out = coeff_identity_check(f, 0.5, &opts).unwrap();
        assert_eq!(out.max_deviation, 0.0);
    }

    #[test]
    fn band_profile_matches_closed_form() {
        // profile = (πh)^{-1/4} e^{-(ξ-1)²/2h} on [-3, 5] (effectively the whole line)
        let h = 0.1;
        let band = BandQuadrature::new(-3.0, 5.0);
        let xs = [0.0, 0.3, -1.0];
        let v = inverse_transform_profile(
            |xi| c((PI * h).powf(-0.25) * (-(xi - 1.0).powi(2) / (2.0 * h)).exp()),
            &band,
            h,
            &xs,
        )
        .unwrap();
        for (x, got) in xs.iter().zip(v) {
            let exact = coherent(1.0, h)(*x);
            assert!((got - exact).norm() < 1e-12, "x={x}: {got} vs {exact}");
        }
    }
}
