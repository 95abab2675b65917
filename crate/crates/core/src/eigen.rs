//! Dirichlet ground state of `-∂v² + (ξ̃v)²` on `(-1, 1)` for complex `ξ̃`.
//!
//! Writing the eigenfunction as `g̃(v) = e^{-ξ̃v²/2} ũ(v)` and the eigenvalue
//! as `λ̃ = ξ̃ + ρ̃`, the function `ũ` solves
//!
//! ```text
//!   -ũ'' + 2ξ̃ v ũ' - ρ̃ ũ = 0,   ũ(0) = 1,  ũ'(0) = 0,
//! ```
//!
//! whose even power series obeys
//!
//! ```text
//!   ũ_{n+2} = (2nξ̃ - ρ̃) / ((n+1)(n+2)) · ũ_n.
//! ```
//!
//! The Dirichlet condition `ũ(1) = Σ ũ_{2n} = 0` is an entire equation in
//! `ρ̃`, solved by Newton with the exact derivative from the differentiated
//! recurrence. The module also evaluates the infinite product
//!
//! ```text
//!   δ(z) = Π_{k≥1} (1 + μ/k) / (1 + μ/(k+z)),   μ = -ρ̃/(4ξ̃),
//! ```
//!
//! and the Agmon-type bounds on `g̃`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fit::{fit_line, LineFit};
use crate::{Error, Result};

/// Largest number of even coefficients before the series is declared divergent.
const SERIES_CAP: usize = 20_000;
/// Coefficients always summed, whatever the stopping test says.
const SERIES_FLOOR: usize = 10;

/// Converged eigendata for one `ξ̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    pub xi_tilde: Complex64,
    pub rho: Complex64,
    /// `ξ̃ + ρ̃`.
    pub lambda: Complex64,
    /// Even coefficients `ũ_{2n}`, `n = 0..=trunc_n`, with `ũ₀ = 1`.
    pub coeffs: Vec<Complex64>,
    pub trunc_n: usize,
    /// `|Σ ũ_{2n}|`.
    pub boundary_residual: f64,
    pub newton_iterations: usize,
}

impl EigenData {
    /// `ũ(v)`.
    pub fn u(&self, v: f64) -> Complex64 {
        let w = v * v;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
    }

    /// `ũ'(v)`.
    pub fn du(&self, v: f64) -> Complex64 {
        let w = v * v;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * w + c * (2 * n) as f64;
        }
        acc * v
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    /// Stop once a term is below `tol · |partial sum|` while terms shrink.
    pub tol: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { tol: 1e-17 }
    }
}

fn check_xi(xi: Complex64) -> Result<()> {
    if !(xi.re > 0.0) || !xi.is_finite() {
        return Err(Error::Domain(format!("xi_tilde = {xi} needs a positive real part")));
    }
    Ok(())
}

/// Even coefficients and their `ρ̃`-derivatives.
fn series_with_derivative(xi: Complex64, rho: Complex64, tol: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut u = vec![Complex64::new(1.0, 0.0)];
    let mut du = vec![Complex64::new(0.0, 0.0)];
    let mut sum = u[0];
    for k in 0..SERIES_CAP {
        let n = (2 * k) as f64;
        let denom = (n + 1.0) * (n + 2.0);
        let c = (2.0 * n * xi - rho) / denom;
        let next = c * u[k];
        let dnext = c * du[k] - u[k] / denom;
        u.push(next);
        du.push(dnext);
        sum += next;
        let shrinking = next.norm() <= 0.5 * u[k].norm();
        if k + 1 >= SERIES_FLOOR && shrinking && next.norm() <= tol * sum.norm().max(f64::MIN_POSITIVE) {
            return Ok((u, du));
        }
        if next.norm() == 0.0 && k + 1 >= SERIES_FLOOR {
            return Ok((u, du));
        }
    }
    Err(Error::Truncation {
        value: u[u.len() - 1].norm(),
        tol: tol * sum.norm(),
    })
}

/// `ũ_{2n}` for `n = 0..=N`, truncated adaptively.
pub fn series_coeffs(xi: Complex64, rho: Complex64, opts: SeriesOptions) -> Result<Vec<Complex64>> {
    check_xi(xi)?;
    Ok(series_with_derivative(xi, rho, opts.tol)?.0)
}

/// `ũ(1) = Σ ũ_{2n}`; zero exactly at eigenvalues.
pub fn boundary_value(xi: Complex64, rho: Complex64, opts: SeriesOptions) -> Result<Complex64> {
    Ok(series_coeffs(xi, rho, opts)?.iter().sum())
}

/// `ũ(1)` and `∂ũ(1)/∂ρ̃`.
pub fn boundary_value_and_derivative(
    xi: Complex64,
    rho: Complex64,
    opts: SeriesOptions,
) -> Result<(Complex64, Complex64)> {
    check_xi(xi)?;
    let (u, du) = series_with_derivative(xi, rho, opts.tol)?;
    Ok((u.iter().sum(), du.iter().sum()))
}

/// Recurrence-consistent closed form
/// `ũ_{2n} = -ρ̃ (4ξ̃)^{n-1} (n-1)! Π_{k<n} (1 - ρ̃/(4ξ̃k)) / (2n)!`, `n ≥ 1`.
pub fn closed_form_coeffs(xi: Complex64, rho: Complex64, count: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(Complex64::new(1.0, 0.0));
    // running value of (4ξ̃)^{n-1} (n-1)! Π / (2n)!
    let mut t = Complex64::new(0.5, 0.0);
    for n in 1..count {
        if n > 1 {
            let m = (n - 1) as f64;
            let nn = n as f64;
            t *= 4.0 * xi * m * (1.0 - rho / (4.0 * xi * m)) / ((2.0 * nn) * (2.0 * nn - 1.0));
        }
        out.push(-rho * t);
    }
    out
}

/// `ρ̃ ~ (4/√π) ξ̃^{3/2} e^{-ξ̃}`.
pub fn rho_asymptotic(xi: Complex64) -> Complex64 {
    4.0 / PI.sqrt() * xi.powf(1.5) * (-xi).exp()
}

/// Domain restrictions and Newton settings for [`solve_rho_with`].
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Smallest admissible `|ξ̃|`.
    pub floor: f64,
    /// Largest admissible `|arg ξ̃|`.
    pub max_arg: f64,
    /// Newton stops once `|ũ(1)| < tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub series: SeriesOptions,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            floor: 2.0,
            max_arg: 3.0 * PI / 8.0,
            tol: 1e-12,
            max_iter: 100,
            series: SeriesOptions::default(),
        }
    }
}

impl EigenOptions {
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }
}

fn check_domain(xi: Complex64, opts: &EigenOptions) -> Result<()> {
    check_xi(xi)?;
    if xi.norm() < opts.floor {
        return Err(Error::Domain(format!(
            "|xi_tilde| = {} is below the floor {}",
            xi.norm(),
            opts.floor
        )));
    }
    if xi.arg().abs() > opts.max_arg + 1e-12 {
        return Err(Error::Domain(format!(
            "|arg xi_tilde| = {} exceeds {}",
            xi.arg().abs(),
            opts.max_arg
        )));
    }
    Ok(())
}

/// Ground-state eigendata with the default domain and tolerances.
pub fn solve_rho(xi: Complex64) -> Result<EigenData> {
    solve_rho_with(xi, &EigenOptions::default())
}

/// Newton from the large-`ξ̃` asymptote (or from 0 when `|ξ̃| < 5`), retried
/// from `π²/4 - ξ̃` if the first start fails.
pub fn solve_rho_with(xi: Complex64, opts: &EigenOptions) -> Result<EigenData> {
    check_domain(xi, opts)?;
    let primary = if xi.norm() >= 5.0 {
        rho_asymptotic(xi)
    } else {
        Complex64::new(0.0, 0.0)
    };
    match newton(xi, primary, opts) {
        Ok(d) => Ok(d),
        Err(first) => newton(xi, PI * PI / 4.0 - xi, opts).map_err(|_| first),
    }
}

/// Newton from an explicit seed, for continuation along a path of `ξ̃`.
pub fn solve_rho_seeded(xi: Complex64, seed: Complex64, opts: &EigenOptions) -> Result<EigenData> {
    check_domain(xi, opts)?;
    newton(xi, seed, opts)
}

/// Smallest boundary residual that summation roundoff lets us certify.
/// For large `|ξ̃|` the coefficients grow well past 1 before decaying, so the
/// cancellation in `Σ ũ_{2n}` dominates any absolute tolerance.
pub fn roundoff_floor(coeffs: &[Complex64]) -> f64 {
    4.0 * f64::EPSILON * coeffs.iter().map(|u| u.norm()).sum::<f64>()
}

fn newton(xi: Complex64, seed: Complex64, opts: &EigenOptions) -> Result<EigenData> {
    let mut rho = seed;
    let mut trace = vec![rho];
    let fail = |reason: String, trace: Vec<Complex64>| Error::Eigen { xi, reason, trace };
    for it in 0..=opts.max_iter {
        let (u, du) = series_with_derivative(xi, rho, opts.series.tol)
            .map_err(|e| fail(format!("series failed: {e}"), trace.clone()))?;
        let b: Complex64 = u.iter().sum();
        if b.norm() < opts.tol.max(roundoff_floor(&u)) {
            let trunc_n = u.len() - 1;
            return Ok(EigenData {
                xi_tilde: xi,
                rho,
                lambda: xi + rho,
                coeffs: u,
                trunc_n,
                boundary_residual: b.norm(),
                newton_iterations: it,
            });
        }
        let db: Complex64 = du.iter().sum();
        if db.norm() == 0.0 || !db.is_finite() {
            return Err(fail("vanishing derivative".into(), trace));
        }
        rho -= b / db;
        trace.push(rho);
        if !rho.is_finite() || rho.norm() > 1e3 * (1.0 + xi.norm_sqr()) {
            return Err(fail("iterates diverged".into(), trace));
        }
    }
    Err(fail(format!("no convergence in {} iterations", opts.max_iter), trace))
}

/// Solves along a list of `ξ̃`, continuing from the largest modulus downward
/// so each solve is seeded by its neighbour. Results follow the input order.
pub fn solve_rho_path(xis: &[Complex64], opts: &EigenOptions) -> Result<Vec<EigenData>> {
    let mut order: Vec<usize> = (0..xis.len()).collect();
    order.sort_by(|&a, &b| xis[b].norm().total_cmp(&xis[a].norm()));
    let mut out: Vec<Option<EigenData>> = vec![None; xis.len()];
    let mut prev: Option<Complex64> = None;
    for &i in &order {
        let xi = xis[i];
        let data = match prev {
            Some(seed) if xi.norm() < 5.0 => solve_rho_seeded(xi, seed, opts).or_else(|_| solve_rho_with(xi, opts))?,
            _ => solve_rho_with(xi, opts)?,
        };
        prev = Some(data.rho);
        out[i] = Some(data);
    }
    Ok(out.into_iter().map(|d| d.expect("every index solved")).collect())
}

/// `g̃(v) = e^{-ξ̃v²/2} ũ(v)`, normalized by `g̃(0) = 1`.
pub fn eigenfunction_eval(ed: &EigenData, v: f64) -> Complex64 {
    (-ed.xi_tilde * v * v / 2.0).exp() * ed.u(v)
}

/// Uniform grid on `[-1, 1]` used by the bound checks.
pub fn v_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| -1.0 + 2.0 * j as f64 / (n - 1) as f64).collect()
}

const CHECK_NODES: usize = 2001;

/// `sup_v |e^{(1-ε)ξ̃v²/2} g̃(v)| = sup_v |e^{-εξ̃v²/2} ũ(v)|` over `[-1, 1]`.
pub fn agmon_upper_check(ed: &EigenData, eps: f64) -> Result<f64> {
    agmon_upper_check_at(ed, eps, &v_grid(CHECK_NODES))
}

/// Same sup over explicit points.
pub fn agmon_upper_check_at(ed: &EigenData, eps: f64, vs: &[f64]) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::param(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok(vs
        .iter()
        .map(|&v| ((-eps * ed.xi_tilde * v * v / 2.0).exp() * ed.u(v)).norm())
        .fold(0.0, f64::max))
}

/// `sup_{|v|<1-ε} |ũ(v) - 1|`.
pub fn lower_bound_check(ed: &EigenData, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(v_grid(CHECK_NODES)
        .into_iter()
        .filter(|v| v.abs() < 1.0 - eps)
        .map(|v| (ed.u(v) - 1.0).norm())
        .fold(0.0, f64::max))
}

/// `μ = -ρ̃/(4ξ̃)`, the parameter of the product `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductParams {
    pub mu: Complex64,
}

impl ProductParams {
    pub fn new(mu: Complex64) -> Self {
        ProductParams { mu }
    }

    pub fn from_eigen(ed: &EigenData) -> Self {
        ProductParams {
            mu: -ed.rho / (4.0 * ed.xi_tilde),
        }
    }
}

/// `ln(1 + w)`, accurate for small `|w|`.
fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() >= 0.5 {
        return (1.0 + w).ln();
    }
    // ln(1+w) = 2 atanh(s), s = w/(2+w), |s| ≤ 1/3
    let s = w / (2.0 + w);
    let s2 = s * s;
    let mut term = s;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..60 {
        let add = term / (2 * k + 1) as f64;
        acc += add;
        if add.norm() <= 1e-18 * acc.norm() {
            break;
        }
        term *= s2;
    }
    2.0 * acc
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaValue {
    pub value: Complex64,
    /// `ln δ(z)`.
    pub log: Complex64,
    /// Factors multiplied explicitly before the tail correction.
    pub terms: usize,
    /// Size of the first neglected correction in the tail.
    pub tail_error: f64,
    pub converged: bool,
}

/// `δ(z)`: explicit product up to `K`, then the tail
/// `Σ_{k>K} ln f_k ≈ ∫_{K+1/2}^∞ + (midpoint correction)`, integrated in
/// closed form.
pub fn delta_product(pp: &ProductParams, z: Complex64) -> Result<DeltaValue> {
    let mu = pp.mu;
    if !(z.re > 0.0) || z.norm() <= 0.5 {
        return Err(Error::param(format!("need Re z > 0 and |z| > 1/2, got {z}")));
    }
    if mu.norm() >= 0.5 {
        return Err(Error::param(format!("need |mu| < 1/2, got {mu}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    if mu == zero {
        return Ok(DeltaValue {
            value: Complex64::new(1.0, 0.0),
            log: zero,
            terms: 0,
            tail_error: 0.0,
            converged: true,
        });
    }
    let k_max = 256usize.max((4.0 * z.norm()).ceil() as usize);
    let mut log = zero;
    for k in 1..=k_max {
        let k = k as f64;
        log += ln_1p(mu / k) - ln_1p(mu / (k + z));
    }
    let x = k_max as f64 + 0.5;
    // G(x) = Σ± (x+a) ln(1 + a/x) over a ∈ {μ, z, -(z+μ)}, with G(∞) = 0
    let g = (x + mu) * ln_1p(mu / x) + (x + z) * ln_1p(z / x) - (x + z + mu) * ln_1p((z + mu) / x);
    // f'(x) and f'''(x) of f(x) = ln(x+μ) + ln(x+z) - ln x - ln(x+z+μ)
    let inv = |p: i32| (x + mu).powi(-p) + (x + z).powi(-p) - Complex64::new(x.powi(-p), 0.0) - (x + z + mu).powi(-p);
    let d1 = inv(1);
    let d3 = 2.0 * inv(3);
    log += -g + d1 / 24.0;
    let tail_error = 7.0 / 5760.0 * d3.norm();
    let converged = tail_error <= 1e-12 * log.norm().max(1.0);
    Ok(DeltaValue {
        value: log.exp(),
        log,
        terms: k_max,
        tail_error,
        converged,
    })
}

/// Deterministic sample set with `1 < |z| ≤ 10³` (log-spaced) and
/// `|arg z| < 0.45π`.
pub fn growth_samples(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let s = (k as f64 + 1.0) / count as f64;
            let modulus = 10f64.powf(3.0 * s);
            let theta = 0.45 * PI * (2.399_963_229_728_653 * k as f64).cos();
            Complex64::from_polar(modulus, theta)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    /// Fit of `log|δ(z)|` against `log|z|`.
    pub fit: LineFit,
    pub samples: usize,
    /// Every product met its tail tolerance.
    pub converged: bool,
}

/// Least-squares check that `log|δ|` grows at most linearly in `log|z|`.
pub fn delta_growth_check(pp: &ProductParams, z_samples: &[Complex64]) -> Result<GrowthReport> {
    if z_samples.len() < 2 {
        return Err(Error::param("need at least two samples"));
    }
    if let Some(z) = z_samples
        .iter()
        .find(|z| !(z.norm() > 1.0 && z.norm() <= 1e3 && z.re > 0.0))
    {
        return Err(Error::param(format!("sample {z} outside 1 < |z| ≤ 1000, Re z > 0")));
    }
    let values = z_samples
        .par_iter()
        .map(|&z| delta_product(pp, z))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = z_samples.iter().map(|z| z.norm().ln()).collect();
    let ys: Vec<f64> = values.iter().map(|d| d.log.re).collect();
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::param("samples share one modulus"))?;
    Ok(GrowthReport {
        fit,
        samples: z_samples.len(),
        converged: values.iter().all(|d| d.converged),
    })
}

/// Smallest eigenvalue of the central-difference discretization of
/// `-∂v² + (ξ̃v)²` on `(-1, 1)` with `nodes` intervals (Dirichlet ends
/// removed), by Sturm-sequence bisection.
pub fn fd_oracle(xi: f64, nodes: usize) -> Result<Complex64> {
    if nodes < 500 {
        return Err(Error::param(format!("need at least 500 nodes, got {nodes}")));
    }
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::param(format!("xi must be real and non-negative, got {xi}")));
    }
    let dv = 2.0 / nodes as f64;
    let off = 1.0 / (dv * dv);
    let diag: Vec<f64> = (1..nodes)
        .map(|j| {
            let v = -1.0 + j as f64 * dv;
            2.0 * off + (xi * v).powi(2)
        })
        .collect();
    // number of eigenvalues below x
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (j, &a) in diag.iter().enumerate() {
            d = if j == 0 { a - x } else { a - x - off * off / d };
            if d == 0.0 {
                d = -f64::EPSILON * off;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut lo = 0.0;
    let mut hi = diag.iter().cloned().fold(0.0, f64::max) + 2.0 * off;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(Complex64::new(0.5 * (lo + hi), 0.0))
}
