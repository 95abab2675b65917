//! Saddle-point evaluation of
//!
//! ```text
//!   I_{h,r}(u) = ∫_{-a}^{a} e^{-ξ²/2h + r(ξ)/h^α} u(ξ) dξ
//! ```
//!
//! for `r, u` bounded and holomorphic on the disc `|ζ| < a`. With
//! `h' = h^{1-α}` the phase has a single critical point `ξ_{h,r} = h' r'(ξ_{h,r})`
//! of size `O(h')`, critical value `c_{h,r} = -ξ²/2 + h' r(ξ)`, and
//!
//! ```text
//!   I_{h,r}(u) = e^{c_{h,r}/h} √(2πh) (u(ξ_{h,r}) + O(h'))
//! ```
//!
//! The brute-force oracle integrates the original integrand with adaptive
//! Gauss–Kronrod quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::fit::{fit_line, LineFit};
use crate::quad;
use crate::{Error, Result};

type Callback = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A bounded holomorphic function on the disc `|ζ| < radius`.
///
/// Callbacks may be invoked concurrently. Without an explicit derivative,
/// derivatives come from the Cauchy integral on a small circle.
#[derive(Clone)]
pub struct HoloFunction {
    f: Callback,
    radius: f64,
    d1: Option<Callback>,
    d2: Option<Callback>,
}

impl fmt::Debug for HoloFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloFunction")
            .field("radius", &self.radius)
            .field("analytic_d1", &self.d1.is_some())
            .field("analytic_d2", &self.d2.is_some())
            .finish()
    }
}

const CAUCHY_NODES: usize = 32;

impl HoloFunction {
    pub fn new<F>(radius: f64, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::param(format!("radius must be positive, got {radius}")));
        }
        Ok(HoloFunction {
            f: Arc::new(f),
            radius,
            d1: None,
            d2: None,
        })
    }

    pub fn constant(c: Complex64, radius: f64) -> Result<Self> {
        Self::new(radius, move |_| c)
            .map(|h| h.with_derivative(|_| Complex64::new(0.0, 0.0)))
            .map(|h| h.with_second_derivative(|_| Complex64::new(0.0, 0.0)))
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.d1 = Some(Arc::new(d));
        self
    }

    pub fn with_second_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.d2 = Some(Arc::new(d));
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match &self.d1 {
            Some(d) => d(z),
            None => self.cauchy(z, 1),
        }
    }

    pub fn second_derivative(&self, z: Complex64) -> Complex64 {
        match &self.d2 {
            Some(d) => d(z),
            None => self.cauchy(z, 2),
        }
    }

    /// `f^{(k)}(z) = k!/(2πi) ∮ f(w)/(w-z)^{k+1} dw`, trapezoidal on a circle
    /// of radius `(radius - |z|)/4`.
    fn cauchy(&self, z: Complex64, k: i32) -> Complex64 {
        let rho = (0.25 * (self.radius - z.norm())).max(1e-3 * self.radius);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..CAUCHY_NODES {
            let theta = 2.0 * PI * j as f64 / CAUCHY_NODES as f64;
            let w = Complex64::from_polar(rho, theta);
            acc += self.eval(z + w) * Complex64::from_polar(1.0, -(k as f64) * theta);
        }
        let fact = if k == 2 { 2.0 } else { 1.0 };
        acc * fact / (CAUCHY_NODES as f64 * rho.powi(k))
    }
}

/// `r(ζ) = -z̄ t (ζ + ξ₀)^α`, the phase of the evolved coherent state after
/// recentering at `ξ₀`; holomorphic on `|ζ| < ξ₀`.
pub fn coherent_phase(z: Complex64, xi0: f64, t: f64, alpha: f64) -> Result<HoloFunction> {
    if !(xi0 > 0.0) {
        return Err(Error::param(format!("xi0 must be positive, got {xi0}")));
    }
    let zb = z.conj();
    let f = HoloFunction::new(xi0, move |s| -zb * t * (s + xi0).powf(alpha))?
        .with_derivative(move |s| -zb * t * alpha * (s + xi0).powf(alpha - 1.0))
        .with_second_derivative(move |s| -zb * t * alpha * (alpha - 1.0) * (s + xi0).powf(alpha - 2.0));
    Ok(f)
}

fn check_scale(h: f64, alpha: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Solves `ξ = h' r'(ξ)` by damped Newton from `h' r'(0)`, after checking that
/// `ζ ↦ h' r'(ζ)` is a contraction on `|ζ| ≤ a/2` (sampled).
pub fn find_critical_point(r: &HoloFunction, h: f64, alpha: f64) -> Result<Complex64> {
    check_scale(h, alpha)?;
    let hp = h.powf(1.0 - alpha);
    let half = 0.5 * r.radius();
    let mut lipschitz = 0.0f64;
    for i in 0..=8 {
        let rad = half * i as f64 / 8.0;
        let spokes = if i == 0 { 1 } else { 16 };
        for j in 0..spokes {
            let zeta = Complex64::from_polar(rad, 2.0 * PI * j as f64 / spokes as f64);
            lipschitz = lipschitz.max(hp * r.second_derivative(zeta).norm());
        }
    }
    if !(lipschitz < 1.0) {
        return Err(Error::Domain(format!(
            "h' r'' reaches {lipschitz:.3} on |ζ| ≤ {half}: fixed-point map is not a contraction"
        )));
    }

    let residual = |x: Complex64| x - hp * r.derivative(x);
    let mut x = hp * r.derivative(Complex64::new(0.0, 0.0));
    let mut res = residual(x);
    const MAX_ITER: usize = 100;
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_ITER {
        if res.norm() < 1e-12 {
            return Ok(x);
        }
        let step = res / (1.0 - hp * r.second_derivative(x));
        let mut damp = 1.0;
        loop {
            let cand = x - damp * step;
            let cand_res = residual(cand);
            if cand.norm() < half && cand_res.norm() < res.norm() || damp < 1e-6 {
                x = cand;
                res = cand_res;
                break;
            }
            damp *= 0.5;
        }
        last_step = (damp * step).norm();
    }
    if res.norm() < 1e-12 {
        return Ok(x);
    }
    Err(Error::Convergence {
        what: "critical point",
        iterations: MAX_ITER,
        last_increment: last_step,
    })
}

/// `c_{h,r} = -ξ²/2 + h' r(ξ)`.
pub fn critical_value(r: &HoloFunction, h: f64, alpha: f64, xi_crit: Complex64) -> Complex64 {
    let hp = h.powf(1.0 - alpha);
    -xi_crit * xi_crit / 2.0 + hp * r.eval(xi_crit)
}

/// Leading term `e^{c/h} √(2πh) u(ξ_{h,r})`.
pub fn saddle_estimate(u: &HoloFunction, r: &HoloFunction, h: f64, alpha: f64, a: f64) -> Result<Complex64> {
    check_radius(u, r, a)?;
    let xi = find_critical_point(r, h, alpha)?;
    let c = critical_value(r, h, alpha, xi);
    Ok((c / h).exp() * (2.0 * PI * h).sqrt() * u.eval(xi))
}

fn check_radius(u: &HoloFunction, r: &HoloFunction, a: f64) -> Result<()> {
    if !(a > 0.0) || a > u.radius() || a > r.radius() {
        return Err(Error::param(format!(
            "a = {a} must be positive and within the discs of u ({}) and r ({})",
            u.radius(),
            r.radius()
        )));
    }
    Ok(())
}

/// Brute-force value of the integral.
#[derive(Debug, Clone, Copy)]
pub struct OracleValue {
    pub value: Complex64,
    pub error: f64,
    /// `false` when the relative tolerance was not reached.
    pub accurate: bool,
}

pub const ORACLE_REL_TOL: f64 = 1e-10;

pub fn quadrature_oracle(u: &HoloFunction, r: &HoloFunction, h: f64, alpha: f64, a: f64) -> Result<OracleValue> {
    check_radius(u, r, a)?;
    if !(h > 0.0) {
        return Err(Error::param(format!("h must be positive, got {h}")));
    }
    let ha = h.powf(alpha);
    let out = quad::integrate(
        |s| {
            let z = Complex64::new(s, 0.0);
            (-s * s / (2.0 * h) + r.eval(z) / ha).exp() * u.eval(z)
        },
        -a,
        a,
        ORACLE_REL_TOL,
        0.0,
        4000,
    );
    Ok(OracleValue {
        value: out.value,
        error: out.error,
        accurate: out.converged,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SaddleResult {
    pub h: f64,
    pub xi_crit: Complex64,
    pub c_crit: Complex64,
    pub estimate: Complex64,
    pub oracle: Complex64,
    pub oracle_accurate: bool,
    /// `|estimate - oracle| / |oracle|`, or `|estimate|` when the oracle is 0.
    pub rel_err: f64,
}

/// Estimate and oracle side by side.
pub fn saddle_compare(u: &HoloFunction, r: &HoloFunction, h: f64, alpha: f64, a: f64) -> Result<SaddleResult> {
    let xi_crit = find_critical_point(r, h, alpha)?;
    let c_crit = critical_value(r, h, alpha, xi_crit);
    let estimate = saddle_estimate(u, r, h, alpha, a)?;
    let oracle = quadrature_oracle(u, r, h, alpha, a)?;
    let diff = (estimate - oracle.value).norm();
    let rel_err = if oracle.value.norm() > 0.0 {
        diff / oracle.value.norm()
    } else {
        diff
    };
    Ok(SaddleResult {
        h,
        xi_crit,
        c_crit,
        estimate,
        oracle: oracle.value,
        oracle_accurate: oracle.accurate,
        rel_err,
    })
}

#[derive(Debug, Clone)]
pub struct SaddleSweep {
    pub alpha: f64,
    pub rows: Vec<SaddleResult>,
    /// Fit of `log rel_err` against `log h`; the slope is the observed order.
    pub order_fit: Option<LineFit>,
}

impl SaddleSweep {
    /// `rel_err / h^{1-α}` for every row.
    pub fn scaled_errors(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.rel_err / r.h.powf(1.0 - self.alpha))
            .collect()
    }
}

pub fn saddle_sweep(u: &HoloFunction, r: &HoloFunction, h_list: &[f64], alpha: f64, a: f64) -> Result<SaddleSweep> {
    let rows = h_list
        .iter()
        .map(|&h| saddle_compare(u, r, h, alpha, a).map_err(|e| e.at_scale(h)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.rel_err.ln()).collect();
    Ok(SaddleSweep {
        alpha,
        order_fit: fit_line(&xs, &ys),
        rows,
    })
}

/// First coefficients of the full expansion: `c₁ = r(0)` and `u₀ = √(2π) u(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerms {
    pub c1: Complex64,
    pub u0: Complex64,
}

pub fn expansion_terms(u: &HoloFunction, r: &HoloFunction, order: usize) -> Result<ExpansionTerms> {
    if order > 1 {
        return Err(Error::Unsupported(format!(
            "expansion terms beyond order 1 (requested {order})"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(ExpansionTerms {
        c1: r.eval(zero),
        u0: (2.0 * PI).sqrt() * u.eval(zero),
    })
}
