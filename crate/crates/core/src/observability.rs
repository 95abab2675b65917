//! The observability quotient
//!
//! ```text
//!   Q(h) = |g(T)|_{L²(Ω)} / |g|_{L²((0,T)×ω)},   ω = {ε < |x|} × Ω_v,
//! ```
//!
//! for the solution families of [`crate::rfhe`] and [`crate::kolmogorov`],
//! swept over `h`, with CSV export.
//!
//! On the torus the solutions are finite mode sums `Σ_n A_n(t) g_n(v) e^{inx}`,
//! so both norms reduce to Hermitian forms in the coefficients:
//!
//! ```text
//!   ∫_ω |g|² = Σ_{n,m} A_n Ā_m K(n-m) V_{nm},
//!   K(k) = ∫_{ε<|x|<π} e^{ikx} dx,   V_{nm} = ∫_{Ω_v} g_n ḡ_m dv.
//! ```
//!
//! [`XRule::Exact`] evaluates `K` in closed form; [`XRule::Grid`] samples the
//! solution on a torus grid instead and integrates with the spectral module.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen::eigenfunction_eval;
use crate::fit::{fit_line, LineFit};
use crate::kolmogorov::{KolmSolutionSpec, TorusSolution, VDomain};
use crate::quad::{self, gauss_legendre_on};
use crate::rfhe::{
    frequency_profile, solution_at, torus_coefficient, torus_mode_range, CoherentStateSpec, CutoffSpec,
    EvolutionParams, LineOptions,
};
use crate::spectral::{l2_norm_union, Grid1D, Interval, SampledField, Side};
use crate::{Error, Result};

/// Which solution family the experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    /// Rotated fractional heat equation on ℝ.
    RfheLine,
    /// Rotated fractional heat equation on 𝕋.
    RfheTorus,
    /// Kolmogorov on 𝕋 × ℝ.
    KolmLineV,
    /// Kolmogorov on 𝕋 × (-1, 1).
    KolmIntervalV,
}

impl Equation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Equation::RfheLine => "rfhe_line",
            Equation::RfheTorus => "rfhe_torus",
            Equation::KolmLineV => "kolm_line_v",
            Equation::KolmIntervalV => "kolm_interval_v",
        }
    }

    fn is_kolmogorov(&self) -> bool {
        matches!(self, Equation::KolmLineV | Equation::KolmIntervalV)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rfhe_line" => Ok(Equation::RfheLine),
            "rfhe_torus" => Ok(Equation::RfheTorus),
            "kolm_line_v" => Ok(Equation::KolmLineV),
            "kolm_interval_v" => Ok(Equation::KolmIntervalV),
            other => Err(Error::param(format!("unknown equation {other:?}"))),
        }
    }
}

/// How the `x`-integral over the control region is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XRule {
    /// Closed-form band kernel (torus) or Plancherel plus Gauss–Legendre on
    /// `[-ε, ε]` (line).
    Exact,
    /// Sampling on `n` points: a periodic grid on 𝕋, or a closed grid on each
    /// half of `ε ≤ |x| ≤ trunc_l` for the line.
    Grid(usize),
}

/// Kolmogorov solutions correspond to `α = 1/2`, `z = e^{iπ/4}`.
pub fn kolmogorov_z() -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub equation: Equation,
    pub alpha: f64,
    pub z: Complex64,
    pub xi0: f64,
    /// `ω = {|x| > ε}`.
    pub eps: f64,
    pub t_final: f64,
    pub h_list: Vec<f64>,
    /// Gauss–Legendre nodes in `t`.
    pub t_nodes: usize,
    /// Gauss–Legendre nodes in `v`.
    pub v_nodes: usize,
    /// Global factor applied to the initial state.
    pub initial_scale: Complex64,
    pub x_rule: XRule,
    /// Half-width of the `x` truncation for [`Equation::RfheLine`] with a grid rule.
    pub trunc_l: f64,
    /// Band quadrature tolerance for line solutions.
    pub tol: f64,
}

impl ExperimentConfig {
    /// Reference configuration: `α = 1/2`, `z = e^{iπ/4}`, `ξ₀ = 1`,
    /// `ε = 1/2`, `T = 1`.
    pub fn new(equation: Equation) -> Self {
        let h_list = match equation {
            Equation::RfheLine | Equation::RfheTorus => vec![0.2, 0.1, 0.05, 0.025],
            Equation::KolmLineV | Equation::KolmIntervalV => vec![0.2, 0.1, 0.05],
        };
        ExperimentConfig {
            equation,
            alpha: 0.5,
            z: kolmogorov_z(),
            xi0: 1.0,
            eps: 0.5,
            t_final: 1.0,
            h_list,
            t_nodes: 24,
            v_nodes: 128,
            initial_scale: Complex64::new(1.0, 0.0),
            x_rule: XRule::Exact,
            trunc_l: 40.0,
            tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        EvolutionParams::new(self.alpha, self.z, self.t_final)?;
        CoherentStateSpec::new(self.xi0, 1.0)?;
        if !(self.eps > 0.0 && self.eps < PI) {
            return Err(Error::param(format!("epsilon must lie in (0, π), got {}", self.eps)));
        }
        if self.h_list.is_empty() || self.h_list.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::param("h list must hold positive values"));
        }
        if self.h_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::param("h list must be strictly decreasing"));
        }
        if self.t_nodes < 8 {
            return Err(Error::param(format!(
                "need at least 8 time nodes, got {}",
                self.t_nodes
            )));
        }
        if self.v_nodes < 8 {
            return Err(Error::param(format!(
                "need at least 8 velocity nodes, got {}",
                self.v_nodes
            )));
        }
        if let XRule::Grid(n) = self.x_rule {
            if n < 16 {
                return Err(Error::param(format!("grid rule needs at least 16 points, got {n}")));
            }
        }
        if self.equation == Equation::RfheLine && !(self.trunc_l > self.eps) {
            return Err(Error::param("trunc_l must exceed epsilon"));
        }
        if self.equation.is_kolmogorov() && (self.alpha != 0.5 || (self.z - kolmogorov_z()).norm() > 1e-15) {
            return Err(Error::param("Kolmogorov solutions fix alpha = 0.5 and z = e^{iπ/4}"));
        }
        if !self.initial_scale.is_finite() {
            return Err(Error::param("initial scale must be finite"));
        }
        Ok(())
    }

    fn evolution(&self) -> Result<EvolutionParams> {
        EvolutionParams::new(self.alpha, self.z, self.t_final)
    }
}

/// One row of the report; the parameter columns echo the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub h: f64,
    pub alpha: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub xi0: f64,
    pub epsilon: f64,
    pub t_final: f64,
    pub num_l2: f64,
    pub den_l2: f64,
    pub quotient: f64,
    pub log_quotient: f64,
    pub h_log_quotient: f64,
}

impl ReportRow {
    fn new(cfg: &ExperimentConfig, h: f64, num: f64, den: f64) -> Self {
        let (quotient, log_quotient) = if num == 0.0 && den == 0.0 {
            (f64::NAN, f64::NAN)
        } else {
            (num / den, num.ln() - den.ln())
        };
        ReportRow {
            h,
            alpha: cfg.alpha,
            z_re: cfg.z.re,
            z_im: cfg.z.im,
            xi0: cfg.xi0,
            epsilon: cfg.eps,
            t_final: cfg.t_final,
            num_l2: num,
            den_l2: den,
            quotient,
            log_quotient,
            h_log_quotient: h * log_quotient,
        }
    }

    /// Both norms vanish, so the quotient is undefined.
    pub fn degenerate(&self) -> bool {
        self.num_l2 == 0.0 && self.den_l2 == 0.0
    }
}

#[derive(Debug, Clone)]
pub struct RowFailure {
    pub h: f64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ObservabilityReport {
    pub equation: Equation,
    pub rows: Vec<ReportRow>,
    pub failures: Vec<RowFailure>,
}

impl ObservabilityReport {
    fn fit_against_inverse_h(&self, y: impl Fn(&ReportRow) -> f64) -> Option<LineFit> {
        let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| !r.degenerate()).collect();
        let xs: Vec<f64> = rows.iter().map(|r| 1.0 / r.h).collect();
        let ys: Vec<f64> = rows.iter().map(|r| y(r)).collect();
        fit_line(&xs, &ys)
    }

    /// Fit of `log Q` against `1/h`; a positive slope means blow-up.
    pub fn quotient_fit(&self) -> Option<LineFit> {
        self.fit_against_inverse_h(|r| r.log_quotient)
    }

    /// Fit of `log den` against `1/h`; negative when the observed mass decays
    /// exponentially.
    pub fn den_fit(&self) -> Option<LineFit> {
        self.fit_against_inverse_h(|r| r.den_l2.ln())
    }

    /// `log Q` strictly increases as `h` decreases.
    pub fn log_quotient_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].log_quotient > w[0].log_quotient)
    }
}

/// `(num, den)` for one `h`.
pub fn norms(cfg: &ExperimentConfig, h: f64) -> Result<(f64, f64)> {
    match cfg.equation {
        Equation::RfheLine => line_norms(cfg, h),
        _ => ModeFamily::build(cfg, h)?.norms(cfg),
    }
}

/// One report row; errors carry `h`.
pub fn quotient(cfg: &ExperimentConfig, h: f64) -> Result<ReportRow> {
    cfg.validate()?;
    let (num, den) = norms(cfg, h).map_err(|e| e.at_scale(h))?;
    Ok(ReportRow::new(cfg, h, num, den))
}

/// All rows of the sweep, computed in parallel; failing rows are reported
/// separately rather than aborting the sweep.
pub fn sweep(cfg: &ExperimentConfig) -> Result<ObservabilityReport> {
    cfg.validate()?;
    let outcomes: Vec<Result<ReportRow>> = cfg.h_list.par_iter().map(|&h| quotient(cfg, h)).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (h, out) in cfg.h_list.iter().zip(outcomes) {
        match out {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(RowFailure {
                h: *h,
                message: e.to_string(),
            }),
        }
    }
    Ok(ObservabilityReport {
        equation: cfg.equation,
        rows,
        failures,
    })
}

enum Profiles {
    None,
    Gaussian,
    Eigen(TorusSolution),
}

/// Torus solution `Σ_k a_k e^{-λ_k t} g_k(v) e^{i n_k x}`.
struct ModeFamily {
    ns: Vec<i64>,
    a: Vec<Complex64>,
    lambda: Vec<Complex64>,
    profiles: Profiles,
}

impl ModeFamily {
    fn build(cfg: &ExperimentConfig, h: f64) -> Result<Self> {
        let s = cfg.initial_scale;
        match cfg.equation {
            Equation::RfheTorus => {
                let cs = CoherentStateSpec::new(cfg.xi0, h)?;
                let cut = CutoffSpec::new(cfg.xi0)?;
                let evo = cfg.evolution()?;
                let (lo, hi) = torus_mode_range(&cs);
                let ns: Vec<i64> = (lo..=hi).filter(|&n| torus_coefficient(&cs, &cut, n) != 0.0).collect();
                Ok(ModeFamily {
                    a: ns.iter().map(|&n| s * torus_coefficient(&cs, &cut, n)).collect(),
                    // e^{-t z̄ |n|^α} = e^{-λ t}
                    lambda: ns
                        .iter()
                        .map(|&n| cfg.z.conj() * (evo.alpha() * (n as f64).abs().ln()).exp())
                        .collect(),
                    ns,
                    profiles: Profiles::None,
                })
            }
            Equation::KolmLineV | Equation::KolmIntervalV => {
                let domain = if cfg.equation == Equation::KolmLineV {
                    VDomain::Line
                } else {
                    VDomain::Interval
                };
                let spec = KolmSolutionSpec::new(h, cfg.xi0, domain, cfg.t_final)?;
                let sol = TorusSolution::new(&spec)?;
                let ns = sol.modes.iter().map(|m| m.n).collect();
                let a = sol.modes.iter().map(|m| s * m.a).collect();
                let lambda = sol.modes.iter().map(|m| m.lambda).collect();
                let profiles = match domain {
                    VDomain::Line => Profiles::Gaussian,
                    VDomain::Interval => Profiles::Eigen(sol),
                };
                Ok(ModeFamily {
                    ns,
                    a,
                    lambda,
                    profiles,
                })
            }
            Equation::RfheLine => Err(Error::param("the line equation has no mode expansion")),
        }
    }

    fn profile(&self, k: usize, v: f64) -> Complex64 {
        match &self.profiles {
            Profiles::None => Complex64::new(1.0, 0.0),
            Profiles::Gaussian => (-self.lambda[k] * v * v / 2.0).exp(),
            Profiles::Eigen(sol) => eigenfunction_eval(sol.modes[k].eigen.as_ref().expect("interval modes"), v),
        }
    }

    /// Velocity nodes and weights; a single unit node when there is no `v`.
    fn v_rule(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match &self.profiles {
            Profiles::None => (vec![0.0], vec![1.0]),
            Profiles::Gaussian => {
                // |g_k|² = e^{-Re λ_k v²} drops below e^{-60} beyond ±V
                let re_min = self.lambda.iter().map(|l| l.re).fold(f64::INFINITY, f64::min);
                let v_max = (60.0 / re_min).sqrt();
                gauss_legendre_on(n, -v_max, v_max)
            }
            Profiles::Eigen(_) => gauss_legendre_on(n, -1.0, 1.0),
        }
    }

    /// `V_{kl} = ∫ g_k ḡ_l dv`.
    fn v_gram(&self, n: usize) -> Vec<Complex64> {
        let m = self.ns.len();
        let mut g = vec![Complex64::new(0.0, 0.0); m * m];
        match &self.profiles {
            Profiles::None => g.iter_mut().for_each(|x| *x = Complex64::new(1.0, 0.0)),
            Profiles::Gaussian => {
                for k in 0..m {
                    for l in 0..m {
                        let s = self.lambda[k] + self.lambda[l].conj();
                        g[k * m + l] = (2.0 * PI / s).sqrt();
                    }
                }
            }
            Profiles::Eigen(_) => {
                let (vs, ws) = self.v_rule(n);
                let samples: Vec<Vec<Complex64>> = (0..m)
                    .map(|k| vs.iter().map(|&v| self.profile(k, v)).collect())
                    .collect();
                for k in 0..m {
                    for l in 0..m {
                        g[k * m + l] = ws
                            .iter()
                            .enumerate()
                            .map(|(j, w)| w * samples[k][j] * samples[l][j].conj())
                            .sum();
                    }
                }
            }
        }
        g
    }

    fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        self.a
            .iter()
            .zip(&self.lambda)
            .map(|(a, l)| a * (-l * t).exp())
            .collect()
    }

    fn norms(&self, cfg: &ExperimentConfig) -> Result<(f64, f64)> {
        let (ts, tw) = gauss_legendre_on(cfg.t_nodes, 0.0, cfg.t_final);
        match cfg.x_rule {
            XRule::Exact => Ok(self.norms_exact(cfg, &ts, &tw)),
            XRule::Grid(n) => self.norms_grid(cfg, n, &ts, &tw),
        }
    }

    fn norms_exact(&self, cfg: &ExperimentConfig, ts: &[f64], tw: &[f64]) -> (f64, f64) {
        let m = self.ns.len();
        let v = self.v_gram(cfg.v_nodes);
        let eps = cfg.eps;
        let kernel = |d: i64| -> f64 {
            if d == 0 {
                2.0 * (PI - eps)
            } else {
                -2.0 * (d as f64 * eps).sin() / d as f64
            }
        };
        let mut kv = vec![Complex64::new(0.0, 0.0); m * m];
        for k in 0..m {
            for l in 0..m {
                kv[k * m + l] = kernel(self.ns[k] - self.ns[l]) * v[k * m + l];
            }
        }
        let at_t = self.amplitudes(cfg.t_final);
        let num2: f64 = (0..m).map(|k| 2.0 * PI * at_t[k].norm_sqr() * v[k * m + k].re).sum();
        let den2: f64 = ts
            .iter()
            .zip(tw)
            .map(|(&t, &w)| {
                let a = self.amplitudes(t);
                let mut q = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    for l in 0..m {
                        q += a[k] * a[l].conj() * kv[k * m + l];
                    }
                }
                w * q.re
            })
            .sum();
        (num2.max(0.0).sqrt(), den2.max(0.0).sqrt())
    }

    fn norms_grid(&self, cfg: &ExperimentConfig, n: usize, ts: &[f64], tw: &[f64]) -> Result<(f64, f64)> {
        let torus = Grid1D::torus(n)?;
        let n_max = self.ns.iter().map(|n| n.abs()).max().unwrap_or(0);
        if 2 * n_max as usize >= n {
            return Err(Error::Resolution(format!("{n} points cannot resolve mode {n_max}")));
        }
        let xs = torus.nodes();
        let (vs, vw) = self.v_rule(cfg.v_nodes);
        let omega = [Interval::new(-PI, -cfg.eps), Interval::new(cfg.eps, PI)];
        let slice_sq = |t: f64, v: f64, subs: &[Interval]| -> Result<f64> {
            let amps = self.amplitudes(t);
            let c: Vec<Complex64> = (0..self.ns.len()).map(|k| amps[k] * self.profile(k, v)).collect();
            let vals: Vec<Complex64> = xs
                .iter()
                .map(|&x| {
                    c.iter()
                        .zip(&self.ns)
                        .map(|(c, &n)| c * Complex64::new(0.0, n as f64 * x).exp())
                        .sum()
                })
                .collect();
            let f = SampledField::new(torus, vals, Side::Physical)?;
            Ok(l2_norm_union(&f, subs).powi(2))
        };
        let full = [Interval::real_line()];
        let num2 = vs
            .par_iter()
            .zip(&vw)
            .map(|(&v, &w)| slice_sq(cfg.t_final, v, &full).map(|s| w * s))
            .collect::<Result<Vec<f64>>>()?
            .iter()
            .sum::<f64>();
        let den2 = ts
            .par_iter()
            .zip(tw)
            .map(|(&t, &wt)| {
                vs.iter()
                    .zip(&vw)
                    .map(|(&v, &w)| slice_sq(t, v, &omega).map(|s| wt * w * s))
                    .sum::<Result<f64>>()
            })
            .collect::<Result<Vec<f64>>>()?
            .iter()
            .sum::<f64>();
        Ok((num2.sqrt(), den2.sqrt()))
    }
}

/// Norms on ℝ: `|g(t)|²` by Plancherel on the frequency band, the mass in
/// `|x| < ε` by Gauss–Legendre, and the control-region mass as the difference
/// (or by sampling with [`XRule::Grid`]).
fn line_norms(cfg: &ExperimentConfig, h: f64) -> Result<(f64, f64)> {
    let cs = CoherentStateSpec::new(cfg.xi0, h)?;
    let cut = CutoffSpec::new(cfg.xi0)?;
    let evo = cfg.evolution()?;
    let s2 = cfg.initial_scale.norm_sqr();
    let opts = LineOptions {
        tol: cfg.tol,
        check_resolution: true,
    };
    let (lo, hi) = cs.band();
    let total_sq = |t: f64| -> Result<f64> {
        let out = quad::integrate(
            |xi| Complex64::new(frequency_profile(&cs, &cut, Some((&evo, t)), xi).norm_sqr(), 0.0),
            lo,
            hi,
            1e-13,
            0.0,
            2000,
        );
        if !out.converged {
            return Err(Error::Convergence {
                what: "frequency-side norm",
                iterations: out.evaluations,
                last_increment: out.error,
            });
        }
        Ok(out.value.re)
    };
    let (ts, tw) = gauss_legendre_on(cfg.t_nodes, 0.0, cfg.t_final);
    let num2 = s2 * total_sq(cfg.t_final)?;
    let den2 = match cfg.x_rule {
        XRule::Exact => {
            let nx = 64 + (8.0 * cfg.eps * 1.5 * cfg.xi0 / h).ceil() as usize;
            let (xs, xw) = gauss_legendre_on(nx, -cfg.eps, cfg.eps);
            let mut acc = 0.0;
            for (&t, &w) in ts.iter().zip(&tw) {
                let inner: f64 = solution_at(&cs, &cut, Some((&evo, t)), &xs, opts)?
                    .iter()
                    .zip(&xw)
                    .map(|(g, w)| w * g.norm_sqr())
                    .sum();
                let total = total_sq(t)?;
                if total - inner <= 1e-10 * total {
                    return Err(Error::Resolution(format!(
                        "control-region mass {:.3e} is lost to cancellation",
                        total - inner
                    )));
                }
                acc += w * (total - inner);
            }
            s2 * acc
        }
        XRule::Grid(n) => {
            let grid = Grid1D::closed(cfg.eps, cfg.trunc_l, n)?;
            let pts = grid.nodes();
            let mut acc = 0.0;
            for (&t, &w) in ts.iter().zip(&tw) {
                let mut sq = 0.0;
                for side in [1.0, -1.0] {
                    let xs: Vec<f64> = pts.iter().map(|x| side * x).collect();
                    let mut vals = solution_at(&cs, &cut, Some((&evo, t)), &xs, opts)?;
                    if side < 0.0 {
                        vals.reverse();
                    }
                    let field = SampledField::new(grid, vals, Side::Physical)?;
                    sq += l2_norm_union(&field, &[Interval::real_line()]).powi(2);
                }
                acc += w * sq;
            }
            s2 * acc
        }
    };
    Ok((num2.max(0.0).sqrt(), den2.max(0.0).sqrt()))
}

/// Exact CSV header.
pub const CSV_HEADER: [&str; 12] = [
    "h",
    "alpha",
    "z_re",
    "z_im",
    "xi0",
    "epsilon",
    "T",
    "num_l2",
    "den_l2",
    "quotient",
    "log_quotient",
    "h_log_quotient",
];

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `rows` with 17 significant digits per value.
pub fn write_csv<W: std::io::Write>(rows: &[ReportRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(
            [
                r.h,
                r.alpha,
                r.z_re,
                r.z_im,
                r.xi0,
                r.epsilon,
                r.t_final,
                r.num_l2,
                r.den_l2,
                r.quotient,
                r.log_quotient,
                r.h_log_quotient,
            ]
            .map(fmt17),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(report: &ObservabilityReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(&report.rows, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads rows written by [`export_csv`].
pub fn import_csv(path: &Path) -> Result<Vec<ReportRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::param(format!("{}: unexpected header", path.display())));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let v = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::param(format!("{}: {e}", path.display())))?;
        rows.push(ReportRow {
            h: v[0],
            alpha: v[1],
            z_re: v[2],
            z_im: v[3],
            xi0: v[4],
            epsilon: v[5],
            t_final: v[6],
            num_l2: v[7],
            den_l2: v[8],
            quotient: v[9],
            log_quotient: v[10],
            h_log_quotient: v[11],
        });
    }
    Ok(rows)
}
