//! Solutions of the adjoint Kolmogorov equation `(∂t - v²∂x - ∂v²) g = 0`.
//!
//! On `ℝ_x × ℝ_v` the Fourier modes have the explicit ground states
//! `g_n(v) = e^{-√(-in) v²/2}` with eigenvalue `√(-in)`, which gives
//!
//! ```text
//!   g_h(t,x,v) = (√2 (πh)^{3/4})⁻¹ ∫ χ(ξ-ξ₀) e^{ixξ/h - (ξ-ξ₀)²/2h - √(-iξ/h)(v²/2 + t)} dξ.
//! ```
//!
//! On `ℝ_x × (-1,1)` the Gaussian profile and eigenvalue are replaced by the
//! Dirichlet ground state from [`crate::eigen`] at `ξ̃ = √(-iξ/h)`, i.e. the
//! integrand is multiplied by the correction
//! `δ_{h,t,v}(ξ) = e^{ξ̃v²/2} g̃_ξ̃(v) e^{-tρ̃_ξ̃} = ũ_ξ̃(v) e^{-tρ̃_ξ̃}`.
//!
//! Periodizing in `x` yields solutions on `𝕋 × Ω_v` whose Fourier
//! coefficients are `a_{h,n} e^{-λ_n t} g_n(v)`; [`TorusSolution`] holds
//! that mode sum directly.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use parking_lot::Mutex;

use crate::eigen::{eigenfunction_eval, solve_rho_path, solve_rho_seeded, solve_rho_with, EigenData, EigenOptions};
use crate::rfhe::{cutoff_eval, torus_coefficient, torus_mode_range, CoherentStateSpec, CutoffSpec};
use crate::spectral::{
    fourier_coeffs_range, inverse_transform_profile, periodize, BandQuadrature, Grid1D, PeriodizeOptions, SampledField,
    Side,
};
use crate::{Error, Result};

/// Ground state of `-∂v² + inv²` on ℝ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineEigenData {
    pub n: i64,
    /// `√(-in)`, principal branch.
    pub lambda: Complex64,
}

impl LineEigenData {
    /// `e^{-λ v²/2}`.
    pub fn profile(&self, v: f64) -> Complex64 {
        (-self.lambda * v * v / 2.0).exp()
    }
}

pub fn line_eigen(n: i64) -> LineEigenData {
    LineEigenData {
        n,
        lambda: Complex64::new(0.0, -(n as f64)).sqrt(),
    }
}

/// `√(-iξ/h)`, principal branch.
pub fn xi_tilde(xi: f64, h: f64) -> Complex64 {
    Complex64::new(0.0, -xi / h).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VDomain {
    Line,
    Interval,
}

/// Parameters of one Kolmogorov solution family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KolmSolutionSpec {
    pub h: f64,
    pub xi0: f64,
    pub cutoff: CutoffSpec,
    pub domain_v: VDomain,
    pub t_final: f64,
}

impl KolmSolutionSpec {
    pub fn new(h: f64, xi0: f64, domain_v: VDomain, t_final: f64) -> Result<Self> {
        CoherentStateSpec::new(xi0, h)?;
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::param(format!("T must be positive, got {t_final}")));
        }
        Ok(KolmSolutionSpec {
            h,
            xi0,
            cutoff: CutoffSpec::new(xi0)?,
            domain_v,
            t_final,
        })
    }

    fn coherent(&self) -> CoherentStateSpec {
        CoherentStateSpec::new(self.xi0, self.h).expect("validated at construction")
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || t > self.t_final * (1.0 + 1e-12) {
            return Err(Error::param(format!("t = {t} outside [0, {}]", self.t_final)));
        }
        Ok(())
    }
}

/// Eigendata at `ξ̃ = √(-iξ/h)`, memoized by `ξ` and safe to share between
/// threads.
///
/// Each solve is seeded from the nearest anchor (solved along a deterministic
/// continuation path by [`EigenCache::prime`]), so results do not depend on
/// the order in which nodes are requested.
pub struct EigenCache {
    h: f64,
    opts: EigenOptions,
    anchors: BTreeMap<u64, Arc<EigenData>>,
    solved: Mutex<HashMap<u64, Arc<EigenData>>>,
}

impl std::fmt::Debug for EigenCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EigenCache")
            .field("h", &self.h)
            .field("anchors", &self.anchors.len())
            .field("solved", &self.solved.lock().len())
            .finish()
    }
}

// positive floats order like their bit patterns
fn key(xi: f64) -> u64 {
    xi.to_bits()
}

impl EigenCache {
    /// Cache for scale `h`; the default domain floor is lowered to 1 so the
    /// whole band `[ξ₀/2, 3ξ₀/2]` is reachable down to `h = 0.5ξ₀`.
    pub fn new(h: f64) -> Self {
        Self::with_options(h, EigenOptions::default().with_floor(1.0))
    }

    pub fn with_options(h: f64, opts: EigenOptions) -> Self {
        EigenCache {
            h,
            opts,
            anchors: BTreeMap::new(),
            solved: Mutex::new(HashMap::new()),
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Solves `count` equispaced anchors on `[lo, hi]` by continuation from
    /// `hi` downward.
    pub fn prime(&mut self, lo: f64, hi: f64, count: usize) -> Result<()> {
        if !(hi > lo && lo > 0.0) || count < 2 {
            return Err(Error::param("anchor range must satisfy 0 < lo < hi with 2+ points"));
        }
        let xis: Vec<f64> = (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect();
        let tildes: Vec<Complex64> = xis.iter().map(|&x| xi_tilde(x, self.h)).collect();
        let data = solve_rho_path(&tildes, &self.opts)?;
        for (x, d) in xis.into_iter().zip(data) {
            self.anchors.insert(key(x), Arc::new(d));
        }
        Ok(())
    }

    pub fn get(&self, xi: f64) -> Result<Arc<EigenData>> {
        let k = key(xi);
        if let Some(d) = self.anchors.get(&k) {
            return Ok(d.clone());
        }
        if let Some(d) = self.solved.lock().get(&k) {
            return Ok(d.clone());
        }
        let xt = xi_tilde(xi, self.h);
        let below = self.anchors.range(..k).next_back();
        let above = self.anchors.range(k..).next();
        let nearest = match (below, above) {
            (Some(b), Some(a)) => {
                if (f64::from_bits(*a.0) - xi) < (xi - f64::from_bits(*b.0)) {
                    Some(a.1)
                } else {
                    Some(b.1)
                }
            }
            (Some(b), None) => Some(b.1),
            (None, Some(a)) => Some(a.1),
            (None, None) => None,
        };
        let data = match nearest {
            Some(anchor) => solve_rho_seeded(xt, anchor.rho, &self.opts).or_else(|_| solve_rho_with(xt, &self.opts)),
            None => solve_rho_with(xt, &self.opts),
        }?;
        let data = Arc::new(data);
        self.solved.lock().insert(k, data.clone());
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.anchors.len() + self.solved.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The factor `δ_{h,t,v}(ξ)` relating the interval solution to the line one.
#[derive(Debug, Clone, Copy)]
pub enum CorrectionFactor<'a> {
    /// `Ω_v = ℝ`: identically 1.
    Identity,
    /// `Ω_v = (-1, 1)`: `e^{ξ̃v²/2} g̃_ξ̃(v) e^{-tρ̃_ξ̃}`.
    Eigen(&'a EigenCache),
}

impl CorrectionFactor<'_> {
    pub fn value(&self, t: f64, v: f64, xi: f64) -> Result<Complex64> {
        match self {
            CorrectionFactor::Identity => Ok(Complex64::new(1.0, 0.0)),
            CorrectionFactor::Eigen(cache) => {
                let ed = cache.get(xi)?;
                Ok(ed.u(v) * (-t * ed.rho).exp())
            }
        }
    }
}

/// Samples on a tensor grid `xs × vs`, stored with `x` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField2D {
    pub xs: Vec<f64>,
    pub vs: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl SampledField2D {
    pub fn at(&self, ix: usize, iv: usize) -> Complex64 {
        self.values[iv * self.xs.len() + ix]
    }

    /// The slice `x ↦ g(x, v_iv)`.
    pub fn row(&self, iv: usize) -> &[Complex64] {
        let n = self.xs.len();
        &self.values[iv * n..(iv + 1) * n]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Band quadrature tolerance for the `ξ`-integrals.
pub const XI_TOL: f64 = 1e-11;

/// `g_h(t, x, v)` on ℝ_x at arbitrary `x` for one `v`.
pub fn solution_points(
    spec: &KolmSolutionSpec,
    correction: CorrectionFactor<'_>,
    t: f64,
    v: f64,
    xs: &[f64],
) -> Result<Vec<Complex64>> {
    spec.check_time(t)?;
    let cs = spec.coherent();
    let h = spec.h;
    let (lo, hi) = cs.band();
    // the profile closure cannot return errors; collect the first one
    let failure: Mutex<Option<Error>> = Mutex::new(None);
    let profile = |xi: f64| -> Complex64 {
        let chi = cutoff_eval(&spec.cutoff, xi - spec.xi0);
        if chi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lam = xi_tilde(xi, h);
        let base = chi * cs.fourier(xi) * (-lam * (v * v / 2.0 + t)).exp();
        match correction.value(t, v, xi) {
            Ok(d) => base * d,
            Err(e) => {
                failure.lock().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    // values far below the peak amplitude (πh)^{-1/4} need no relative accuracy
    let floor = 1e-14 * (std::f64::consts::PI * h).powf(-0.25);
    let rule = BandQuadrature::new(lo, hi).with_tol(XI_TOL).with_abs_tol(floor);
    let out = inverse_transform_profile(profile, &rule, h, xs);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out
}

fn build(
    spec: &KolmSolutionSpec,
    correction: CorrectionFactor<'_>,
    t: f64,
    x_grid: &Grid1D,
    vs: &[f64],
) -> Result<SampledField2D> {
    let cs = spec.coherent();
    if x_grid.spacing() > cs.max_spacing() {
        return Err(Error::Resolution(format!(
            "x spacing {:.3e} exceeds {:.3e}",
            x_grid.spacing(),
            cs.max_spacing()
        )));
    }
    let xs = x_grid.nodes();
    let mut values = Vec::with_capacity(xs.len() * vs.len());
    for &v in vs {
        values.extend(solution_points(spec, correction, t, v, &xs)?);
    }
    Ok(SampledField2D {
        xs,
        vs: vs.to_vec(),
        values,
    })
}

/// Explicit solution on `ℝ_x × ℝ_v` sampled on `x_grid × vs`.
pub fn build_solution_line(spec: &KolmSolutionSpec, t: f64, x_grid: &Grid1D, vs: &[f64]) -> Result<SampledField2D> {
    build(spec, CorrectionFactor::Identity, t, x_grid, vs)
}

/// Solution on `ℝ_x × (-1, 1)` with eigendata from `cache`.
pub fn build_solution_interval(
    spec: &KolmSolutionSpec,
    t: f64,
    x_grid: &Grid1D,
    vs: &[f64],
    cache: &EigenCache,
) -> Result<SampledField2D> {
    if let Some(v) = vs.iter().find(|v| v.abs() > 1.0) {
        return Err(Error::param(format!("v = {v} outside [-1, 1]")));
    }
    if (cache.h() - spec.h).abs() > 0.0 {
        return Err(Error::param("eigen cache was built for a different h"));
    }
    build(spec, CorrectionFactor::Eigen(cache), t, x_grid, vs)
}

/// An [`EigenCache`] for `spec` with anchors across the frequency band.
pub fn primed_cache(spec: &KolmSolutionSpec) -> Result<EigenCache> {
    let mut cache = EigenCache::new(spec.h);
    let (lo, hi) = spec.coherent().band();
    cache.prime(lo, hi, 65)?;
    Ok(cache)
}

/// `x`-periodization at each `v`; `builder(xs, v)` evaluates on ℝ_x.
pub fn periodize_xv<F>(builder: F, vs: &[f64], torus: &Grid1D, opts: PeriodizeOptions) -> Result<SampledField2D>
where
    F: Fn(&[f64], f64) -> Result<Vec<Complex64>>,
{
    let mut values = Vec::with_capacity(torus.len() * vs.len());
    for &v in vs {
        let per = periodize(|xs: &[f64]| builder(xs, v), torus, opts)?;
        values.extend(per.field.into_values());
    }
    Ok(SampledField2D {
        xs: torus.nodes(),
        vs: vs.to_vec(),
        values,
    })
}

/// Per-mode data of a torus solution.
#[derive(Debug, Clone)]
pub struct ModeData {
    pub n: i64,
    /// `a_{h,n}`.
    pub a: f64,
    /// `√(-in)` or `ξ̃_n + ρ̃_n`.
    pub lambda: Complex64,
    pub eigen: Option<Arc<EigenData>>,
}

impl ModeData {
    /// `g_n(v)`.
    pub fn profile(&self, v: f64) -> Complex64 {
        match &self.eigen {
            None => (-self.lambda * v * v / 2.0).exp(),
            Some(ed) => eigenfunction_eval(ed, v),
        }
    }

    /// `a_{h,n} e^{-λ_n t} g_n(v)`.
    pub fn coefficient(&self, t: f64, v: f64) -> Complex64 {
        self.a * (-self.lambda * t).exp() * self.profile(v)
    }
}

/// Periodized solution on `𝕋 × Ω_v` as an explicit mode sum.
#[derive(Debug, Clone)]
pub struct TorusSolution {
    pub spec: KolmSolutionSpec,
    pub modes: Vec<ModeData>,
}

impl TorusSolution {
    pub fn new(spec: &KolmSolutionSpec) -> Result<Self> {
        Self::with_options(spec, &EigenOptions::default().with_floor(1.0))
    }

    pub fn with_options(spec: &KolmSolutionSpec, opts: &EigenOptions) -> Result<Self> {
        let cs = spec.coherent();
        let (lo, hi) = torus_mode_range(&cs);
        let mut modes: Vec<ModeData> = (lo..=hi)
            .filter_map(|n| {
                let a = torus_coefficient(&cs, &spec.cutoff, n);
                (a != 0.0).then(|| ModeData {
                    n,
                    a,
                    lambda: line_eigen(n).lambda,
                    eigen: None,
                })
            })
            .collect();
        if spec.domain_v == VDomain::Interval {
            let tildes: Vec<Complex64> = modes.iter().map(|m| line_eigen(m.n).lambda).collect();
            let data = solve_rho_path(&tildes, opts)?;
            for (m, d) in modes.iter_mut().zip(data) {
                m.lambda = d.lambda;
                m.eigen = Some(Arc::new(d));
            }
        }
        Ok(TorusSolution { spec: *spec, modes })
    }

    /// `g(t, x, v)` at each `x`.
    pub fn eval(&self, t: f64, v: f64, xs: &[f64]) -> Vec<Complex64> {
        let c: Vec<(f64, Complex64)> = self.modes.iter().map(|m| (m.n as f64, m.coefficient(t, v))).collect();
        xs.iter()
            .map(|&x| c.iter().map(|(n, c)| c * Complex64::new(0.0, n * x).exp()).sum())
            .collect()
    }

    /// Largest `|g(t, x, ±1)| / sup |g(0, ·, ·)|` over `t ∈ ts` and a torus grid.
    pub fn dirichlet_residual(&self, ts: &[f64]) -> f64 {
        let xs = Grid1D::torus(256).expect("valid grid").nodes();
        let vs: Vec<f64> = (0..=64).map(|k| -1.0 + k as f64 / 32.0).collect();
        let peak = vs
            .iter()
            .flat_map(|&v| self.eval(0.0, v, &xs))
            .map(|g| g.norm())
            .fold(0.0, f64::max);
        let mut edge = 0.0f64;
        for &t in ts {
            for v in [-1.0, 1.0] {
                edge = self.eval(t, v, &xs).iter().map(|g| g.norm()).fold(edge, f64::max);
            }
        }
        edge / peak
    }
}

/// Options for [`coefficient_ode_check`].
#[derive(Debug, Clone, Copy)]
pub struct OdeCheckOptions {
    pub torus_n: usize,
    pub periodize: PeriodizeOptions,
}

impl OdeCheckOptions {
    pub fn for_spec(spec: &KolmSolutionSpec) -> Self {
        let (_, hi) = torus_mode_range(&spec.coherent());
        OdeCheckOptions {
            torus_n: (2 * hi as usize + 2).next_power_of_two().max(32),
            periodize: PeriodizeOptions::default(),
        }
    }
}

/// Max over `t, v` and modes of `|c_n(t,v) - c_n(0,v) e^{-λ_n t}| / max_n |c_n(0,v)|`,
/// with the coefficients re-extracted from the periodized line integral.
pub fn coefficient_ode_check(
    spec: &KolmSolutionSpec,
    t_samples: &[f64],
    v_samples: &[f64],
    opts: &OdeCheckOptions,
) -> Result<f64> {
    let cache = match spec.domain_v {
        VDomain::Line => None,
        VDomain::Interval => Some(primed_cache(spec)?),
    };
    let correction = match &cache {
        None => CorrectionFactor::Identity,
        Some(c) => CorrectionFactor::Eigen(c),
    };
    let torus = Grid1D::torus(opts.torus_n)?;
    let (lo, hi) = torus_mode_range(&spec.coherent());
    let lambda = |n: i64| -> Result<Complex64> {
        match &cache {
            None => Ok(line_eigen(n).lambda),
            Some(c) => Ok(c.get(spec.h * n as f64)?.lambda),
        }
    };
    let lambdas = (lo..=hi).map(lambda).collect::<Result<Vec<_>>>()?;
    let coeffs_at = |t: f64, v: f64| -> Result<Vec<Complex64>> {
        let per = periodize(
            |xs: &[f64]| solution_points(spec, correction, t, v, xs),
            &torus,
            opts.periodize,
        )?;
        Ok(fourier_coeffs_range(&per.field, lo, hi)?.values().to_vec())
    };
    let mut worst = 0.0f64;
    for &v in v_samples {
        let c0 = coeffs_at(0.0, v)?;
        let scale = c0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            continue;
        }
        for &t in t_samples {
            let ct = coeffs_at(t, v)?;
            for ((a, b), l) in ct.iter().zip(&c0).zip(&lambdas) {
                worst = worst.max((a - b * (-l * t).exp()).norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// `x ↦ g(t, x, v)` for one `v` as a physical-side field on a torus grid.
pub fn torus_slice(sol: &TorusSolution, t: f64, v: f64, torus: &Grid1D) -> Result<SampledField> {
    SampledField::new(*torus, sol.eval(t, v, &torus.nodes()), Side::Physical)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::rfhe::{solution_at, EvolutionParams, LineOptions};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn line_eigen_examples() {
        let e1 = line_eigen(1);
        assert!((e1.lambda - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-15);
        let e0 = line_eigen(0);
        assert_eq!(e0.lambda, c(0.0));
        assert_eq!(e0.profile(3.0), c(1.0));
        let e4 = line_eigen(4);
        assert!((e4.lambda - Complex64::from_polar(2.0, -PI / 4.0)).norm() < 1e-15);
        assert!((e4.lambda * e4.lambda - Complex64::new(0.0, -4.0)).norm() < 1e-14);
        for n in [-7, -1, 2, 9] {
            let l = line_eigen(n).lambda;
            assert!(l.re > 0.0);
            assert!((l * l - Complex64::new(0.0, -(n as f64))).norm() < 1e-13);
        }
    }

    #[test]
    fn line_solution_at_v0_is_the_half_order_heat_solution() {
        let h = 0.1;
        let spec = KolmSolutionSpec::new(h, 1.0, VDomain::Line, 1.0).unwrap();
        let evo = EvolutionParams::new(0.5, Complex64::from_polar(1.0, PI / 4.0), 1.0).unwrap();
        let cs = CoherentStateSpec::new(1.0, h).unwrap();
        let xs = [0.0, 0.4, -1.3, 2.0];
        for t in [0.0, 0.5, 1.0] {
            let a = solution_points(&spec, CorrectionFactor::Identity, t, 0.0, &xs).unwrap();
            let b = solution_at(&cs, &spec.cutoff, Some((&evo, t)), &xs, LineOptions::default()).unwrap();
            for (p, q) in a.iter().zip(&b) {
                assert!((p - q).norm() < 1e-10, "t={t}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn time_shift_equals_velocity_shift() {
        let spec = KolmSolutionSpec::new(0.2, 1.0, VDomain::Line, 1.0).unwrap();
        let xs = [0.0, 0.7];
        let d = 0.18;
        let a = solution_points(&spec, CorrectionFactor::Identity, 0.3 + d, 0.0, &xs).unwrap();
        let b = solution_points(&spec, CorrectionFactor::Identity, 0.3, (2.0 * d).sqrt(), &xs).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).norm() < 1e-12);
        }
        let far = solution_points(&spec, CorrectionFactor::Identity, 0.3, 12.0, &xs).unwrap();
        assert!(far[0].norm() < 1e-8);
    }

    #[test]
    fn interval_solution_vanishes_at_the_walls() {
        let spec = KolmSolutionSpec::new(0.1, 1.0, VDomain::Interval, 1.0).unwrap();
        let cache = primed_cache(&spec).unwrap();
        let grid = Grid1D::closed(
            -0.5,
            0.5,
            (1.0 / CoherentStateSpec::new(1.0, 0.1).unwrap().max_spacing()) as usize + 2,
        )
        .unwrap();
        let f = build_solution_interval(&spec, 0.5, &grid, &[-1.0, 0.0, 1.0], &cache).unwrap();
        let peak = f.row(1).iter().map(|g| g.norm()).fold(0.0, f64::max);
        for iv in [0, 2] {
            let edge = f.row(iv).iter().map(|g| g.norm()).fold(0.0, f64::max);
            assert!(edge <= 1e-10 * peak, "{edge:e}");
        }
        assert!(build_solution_interval(&spec, 0.5, &grid, &[1.5], &cache).is_err());
    }

    #[test]
    fn interval_approaches_line_as_h_decreases() {
        let mut last = f64::INFINITY;
        for h in [0.2, 0.1, 0.05] {
            let line = KolmSolutionSpec::new(h, 1.0, VDomain::Line, 1.0).unwrap();
            let interval = KolmSolutionSpec::new(h, 1.0, VDomain::Interval, 1.0).unwrap();
            let cache = primed_cache(&interval).unwrap();
            let a = solution_points(&line, CorrectionFactor::Identity, 1.0, 0.3, &[0.0]).unwrap()[0];
            let b = solution_points(&interval, CorrectionFactor::Eigen(&cache), 1.0, 0.3, &[0.0]).unwrap()[0];
            let gap = (b / a - 1.0).norm();
            assert!(gap < last, "h={h}: {gap}");
            last = gap;
        }
    }

    #[test]
    fn cache_results_do_not_depend_on_request_order() {
        let spec = KolmSolutionSpec::new(0.2, 1.0, VDomain::Interval, 1.0).unwrap();
        let a = primed_cache(&spec).unwrap();
        let b = primed_cache(&spec).unwrap();
        let xs = [0.61, 1.37, 0.83, 1.01];
        let fwd: Vec<_> = xs.iter().map(|&x| a.get(x).unwrap().rho).collect();
        let rev: Vec<_> = xs.iter().rev().map(|&x| b.get(x).unwrap().rho).collect();
        for (p, q) in fwd.iter().zip(rev.iter().rev()) {
            assert_eq!(p, q);
        }
    }

    #[test]
    fn periodized_coefficients_match_closed_form() {
        let h = 0.1;
        let spec = KolmSolutionSpec::new(h, 1.0, VDomain::Line, 1.0).unwrap();
        let torus = Grid1D::torus(64).unwrap();
        let vs = [0.0, 0.5];
        let t = 0.6;
        let per = periodize_xv(
            |xs, v| solution_points(&spec, CorrectionFactor::Identity, t, v, xs),
            &vs,
            &torus,
            PeriodizeOptions::default(),
        )
        .unwrap();
        let sol = TorusSolution::new(&spec).unwrap();
        for (iv, &v) in vs.iter().enumerate() {
            let field = SampledField::new(torus, per.row(iv).to_vec(), Side::Physical).unwrap();
            let cn = fourier_coeffs_range(&field, 0, 31).unwrap();
            for (n, got) in cn.modes() {
                let expect = sol
                    .modes
                    .iter()
                    .find(|m| m.n == n)
                    .map(|m| m.coefficient(t, v))
                    .unwrap_or(c(0.0));
                assert!((got - expect).norm() < 1e-8, "n={n} v={v}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn periodize_xv_examples() {
        let torus = Grid1D::torus(32).unwrap();
        let zero = periodize_xv(
            |xs, _| Ok(vec![c(0.0); xs.len()]),
            &[0.0, 1.0],
            &torus,
            PeriodizeOptions::default(),
        )
        .unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
        let bump = |x: f64, v: f64| {
            if x.abs() < 3.0 {
                c((1.0 - x * x / 9.0) * v)
            } else {
                c(0.0)
            }
        };
        let per = periodize_xv(
            |xs, v| Ok(xs.iter().map(|&x| bump(x, v)).collect()),
            &[2.0],
            &torus,
            PeriodizeOptions::default(),
        )
        .unwrap();
        for (ix, &x) in per.xs.iter().enumerate() {
            assert_eq!(per.at(ix, 0), bump(x, 2.0));
        }
    }

    #[test]
    fn ode_check_line() {
        let spec = KolmSolutionSpec::new(0.1, 1.0, VDomain::Line, 1.0).unwrap();
        let opts = OdeCheckOptions::for_spec(&spec);
        assert_eq!(coefficient_ode_check(&spec, &[0.0], &[0.0, 0.7], &opts).unwrap(), 0.0);
        let dev = coefficient_ode_check(&spec, &[0.5, 1.0], &[0.0, 0.7], &opts).unwrap();
        assert!(dev <= 1e-8, "{dev:e}");
    }

    #[test]
    fn ode_check_interval() {
        let spec = KolmSolutionSpec::new(0.2, 1.0, VDomain::Interval, 1.0).unwrap();
        let opts = OdeCheckOptions::for_spec(&spec);
        let dev = coefficient_ode_check(&spec, &[0.5, 1.0], &[0.0, 0.6], &opts).unwrap();
        assert!(dev <= 1e-8, "{dev:e}");
    }

    #[test]
    fn torus_modes() {
        let spec = KolmSolutionSpec::new(0.1, 1.0, VDomain::Interval, 1.0).unwrap();
        let sol = TorusSolution::new(&spec).unwrap();
        assert!(sol.dirichlet_residual(&[0.0, 0.5, 1.0]) < 1e-8);
        for m in &sol.modes {
            assert!(m.lambda.re > 0.0);
            // coefficients only shrink in time
            for v in [0.0, 0.5] {
                assert!(m.coefficient(1.0, v).norm() <= m.coefficient(0.0, v).norm());
            }
            let chi = cutoff_eval(&spec.cutoff, spec.h * m.n as f64 - 1.0);
            assert!(chi > 0.0);
        }
    }
}
