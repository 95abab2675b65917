//! The `obsgap` command line.
//!
//! Every setting is resolved as built-in default, then the `--config` file
//! (flat `key = value` lines, `#` comments, keys spelled like the long flags),
//! then flags. `OBSGAP_THREADS` caps the worker pool. Exit codes: 0 success,
//! 1 numeric failure or failed verification, 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::eigen::{rho_asymptotic, solve_rho_with, EigenOptions};
use crate::observability::{self, Equation, ExperimentConfig, ObservabilityReport, XRule};
use crate::rfhe::{
    evolve_torus, solution_at, torus_coeffs, BoundOptions, CoherentStateSpec, CutoffSpec, EvolutionParams, LineOptions,
};
use crate::saddle::{coherent_phase, saddle_sweep, HoloFunction};
use crate::spectral::{coeff_identity_check, IdentityCheckOptions};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "obsgap",
    version,
    about = "Observability counterexamples and their numerical checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Observability quotient sweep for the rotated fractional heat equation.
    RfheSweep,
    /// Observability quotient sweep for the Kolmogorov equation.
    KolmogorovSweep,
    /// Ground-state eigenvalues against their large-ξ̃ asymptote.
    EigenTable {
        /// Real ξ̃ values.
        #[arg(long, value_delimiter = ',', default_value = "8,12,16,20")]
        xi_re: Vec<f64>,
    },
    /// Saddle-point estimate against brute-force quadrature.
    SaddleVerify,
    /// Periodization coefficient identity and torus semigroup check.
    PeriodizeVerify,
    /// Outer decay and inner Gaussian shape of the line solutions.
    EstimatesVerify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Domain {
    Line,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OmegaV {
    Line,
    Interval,
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// Fractional order α [default: 0.5]
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Re z [default: cos π/4]
    #[arg(long, global = true, allow_negative_numbers = true)]
    z_re: Option<f64>,
    /// Im z [default: sin π/4]
    #[arg(long, global = true, allow_negative_numbers = true)]
    z_im: Option<f64>,
    /// Frequency centre ξ₀ [default: 1]
    #[arg(long, global = true)]
    xi0: Option<f64>,
    /// Half-width ε of the unobserved strip [default: 0.5]
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Final time T [default: 1]
    #[arg(long, global = true)]
    t_final: Option<f64>,
    /// Decreasing list of h [default depends on the subcommand]
    #[arg(long, global = true, value_delimiter = ',')]
    h_list: Option<Vec<f64>>,
    /// Spatial domain of rfhe-sweep [default: torus]
    #[arg(long, global = true)]
    domain: Option<Domain>,
    /// Velocity domain of kolmogorov-sweep [default: line]
    #[arg(long, global = true)]
    omega_v: Option<OmegaV>,
    /// Sample on an n-point grid instead of the exact x-kernel; torus size for periodize-verify
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Line truncation half-width [default: 40 for sweeps and estimates, 40 + 8/h for periodization]
    #[arg(long, global = true)]
    trunc_l: Option<f64>,
    /// Gauss–Legendre nodes in t [default: 24]
    #[arg(long, global = true)]
    t_nodes: Option<usize>,
    /// Tolerance: band quadrature [1e-12], eigen Newton [1e-12], identity check [1e-8]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// CSV output path [default: stdout]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key = value file read before the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit
    #[arg(long, global = true)]
    dry_run: bool,
}

/// Settings after merging defaults, config file and flags.
#[derive(Debug, Clone, PartialEq)]
struct Settings {
    alpha: f64,
    z: Complex64,
    xi0: f64,
    epsilon: f64,
    t_final: f64,
    h_list: Vec<f64>,
    domain: Domain,
    omega_v: OmegaV,
    grid_n: Option<usize>,
    trunc_l: Option<f64>,
    t_nodes: usize,
    tol: Option<f64>,
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Numeric(Error),
    /// The computation ran but the checked property does not hold.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line with the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs the command line writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    // computed on the pool, written here on the calling thread
    let mut buf = Vec::new();
    let outcome = thread_pool().and_then(|pool| pool.install(|| dispatch(&cli, &mut buf)));
    if out.write_all(&buf).and_then(|_| out.flush()).is_err() {
        let _ = writeln!(err, "error: cannot write output");
        return 1;
    }
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(Failure::Check(m)) => {
            let _ = writeln!(err, "check failed: {m}");
            1
        }
    }
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("OBSGAP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("OBSGAP_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n.max(1));
    }
    b.build()
        .map_err(|e| Failure::Usage(format!("cannot start worker pool: {e}")))
}

fn default_h_list(cmd: &Command) -> Vec<f64> {
    match cmd {
        Command::RfheSweep => vec![0.2, 0.1, 0.05, 0.025],
        Command::KolmogorovSweep | Command::EstimatesVerify => vec![0.2, 0.1, 0.05],
        Command::SaddleVerify => vec![0.1, 0.05, 0.02],
        Command::PeriodizeVerify => vec![0.1],
        Command::EigenTable { .. } => vec![],
    }
}

fn read_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        Failure::Usage(
            Error::Io {
                path: path.to_path_buf(),
                source,
            }
            .to_string(),
        )
    })?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| Failure::Usage(format!("config key {key}: cannot parse {v:?}")))
}

fn parse_list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',').map(|s| parse_value(key, s.trim())).collect()
}

fn resolve(cli: &Cli) -> CliResult<Settings> {
    let mut s = Settings {
        alpha: 0.5,
        z: observability::kolmogorov_z(),
        xi0: 1.0,
        epsilon: 0.5,
        t_final: 1.0,
        h_list: default_h_list(&cli.command),
        domain: Domain::Torus,
        omega_v: OmegaV::Line,
        grid_n: None,
        trunc_l: None,
        t_nodes: 24,
        tol: None,
        out: None,
    };
    if let Some(path) = &cli.flags.config {
        for (k, v) in read_config(path)? {
            match k.as_str() {
                "alpha" => s.alpha = parse_value(&k, &v)?,
                "z-re" => s.z.re = parse_value(&k, &v)?,
                "z-im" => s.z.im = parse_value(&k, &v)?,
                "xi0" => s.xi0 = parse_value(&k, &v)?,
                "epsilon" => s.epsilon = parse_value(&k, &v)?,
                "t-final" => s.t_final = parse_value(&k, &v)?,
                "h-list" => s.h_list = parse_list(&k, &v)?,
                "domain" => {
                    s.domain =
                        Domain::from_str(&v, false).map_err(|m| Failure::Usage(format!("config key domain: {m}")))?
                }
                "omega-v" => {
                    s.omega_v =
                        OmegaV::from_str(&v, false).map_err(|m| Failure::Usage(format!("config key omega-v: {m}")))?
                }
                "grid-n" => s.grid_n = Some(parse_value(&k, &v)?),
                "trunc-l" => s.trunc_l = Some(parse_value(&k, &v)?),
                "t-nodes" => s.t_nodes = parse_value(&k, &v)?,
                "tol" => s.tol = Some(parse_value(&k, &v)?),
                "out" => s.out = Some(PathBuf::from(v)),
                other => return Err(Failure::Usage(format!("unknown config key {other:?}"))),
            }
        }
    }
    let f = &cli.flags;
    s.alpha = f.alpha.unwrap_or(s.alpha);
    s.z.re = f.z_re.unwrap_or(s.z.re);
    s.z.im = f.z_im.unwrap_or(s.z.im);
    s.xi0 = f.xi0.unwrap_or(s.xi0);
    s.epsilon = f.epsilon.unwrap_or(s.epsilon);
    s.t_final = f.t_final.unwrap_or(s.t_final);
    if let Some(h) = &f.h_list {
        s.h_list = h.clone();
    }
    s.domain = f.domain.unwrap_or(s.domain);
    s.omega_v = f.omega_v.unwrap_or(s.omega_v);
    s.grid_n = f.grid_n.or(s.grid_n);
    s.trunc_l = f.trunc_l.or(s.trunc_l);
    s.t_nodes = f.t_nodes.unwrap_or(s.t_nodes);
    s.tol = f.tol.or(s.tol);
    if f.out.is_some() {
        s.out = f.out.clone();
    }
    Ok(s)
}

fn show_settings(cmd: &Command, s: &Settings) -> String {
    let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let mut t = String::new();
    let _ = writeln!(t, "alpha = {}", s.alpha);
    let _ = writeln!(t, "z-re = {}", s.z.re);
    let _ = writeln!(t, "z-im = {}", s.z.im);
    let _ = writeln!(t, "xi0 = {}", s.xi0);
    let _ = writeln!(t, "epsilon = {}", s.epsilon);
    let _ = writeln!(t, "t-final = {}", s.t_final);
    let _ = writeln!(t, "h-list = {}", list(&s.h_list));
    let _ = writeln!(
        t,
        "domain = {}",
        if s.domain == Domain::Line { "line" } else { "torus" }
    );
    let _ = writeln!(
        t,
        "omega-v = {}",
        if s.omega_v == OmegaV::Line { "line" } else { "interval" }
    );
    if let Some(n) = s.grid_n {
        let _ = writeln!(t, "grid-n = {n}");
    }
    if let Some(l) = s.trunc_l {
        let _ = writeln!(t, "trunc-l = {l}");
    }
    let _ = writeln!(t, "t-nodes = {}", s.t_nodes);
    if let Some(tol) = s.tol {
        let _ = writeln!(t, "tol = {tol}");
    }
    if let Some(o) = &s.out {
        let _ = writeln!(t, "out = {}", o.display());
    }
    if let Command::EigenTable { xi_re } = cmd {
        let _ = writeln!(t, "# xi-re = {}", list(xi_re));
    }
    t
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let s = resolve(cli)?;
    if cli.flags.dry_run {
        return emit(out, show_settings(&cli.command, &s).as_bytes());
    }
    match &cli.command {
        Command::RfheSweep => {
            let eq = match s.domain {
                Domain::Line => Equation::RfheLine,
                Domain::Torus => Equation::RfheTorus,
            };
            sweep_command(&s, eq, out)
        }
        Command::KolmogorovSweep => {
            let eq = match s.omega_v {
                OmegaV::Line => Equation::KolmLineV,
                OmegaV::Interval => Equation::KolmIntervalV,
            };
            sweep_command(&s, eq, out)
        }
        Command::EigenTable { xi_re } => eigen_table(&s, xi_re, out),
        Command::SaddleVerify => saddle_verify(&s, out),
        Command::PeriodizeVerify => periodize_verify(&s, out),
        Command::EstimatesVerify => estimates_verify(&s, out),
    }
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    out.write_all(bytes).map_err(|source| {
        Failure::Numeric(Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
    })
}

/// Writes `csv` to `--out` (if given) or stdout, then the summary lines to
/// stdout, prefixed with `#` when they follow CSV on the same stream.
fn finish(s: &Settings, csv: &str, summary: &[String], out: &mut dyn Write) -> CliResult<()> {
    let mut text = String::new();
    match &s.out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            for line in summary {
                let _ = writeln!(text, "{line}");
            }
        }
        None => {
            text.push_str(csv);
            for line in summary {
                let _ = writeln!(text, "# {line}");
            }
        }
    }
    emit(out, text.as_bytes())
}

fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut t = header.join(",");
    t.push('\n');
    for r in rows {
        t.push_str(&r.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(","));
        t.push('\n');
    }
    t
}

fn slope_text(fit: Option<crate::fit::LineFit>) -> String {
    fit.map_or_else(|| "n/a".to_string(), |f| format!("{:.6e}", f.slope))
}

fn sweep_command(s: &Settings, equation: Equation, out: &mut dyn Write) -> CliResult<()> {
    let mut cfg = ExperimentConfig::new(equation);
    cfg.alpha = s.alpha;
    cfg.z = s.z;
    cfg.xi0 = s.xi0;
    cfg.eps = s.epsilon;
    cfg.t_final = s.t_final;
    cfg.h_list = s.h_list.clone();
    cfg.t_nodes = s.t_nodes;
    if let Some(n) = s.grid_n {
        cfg.x_rule = XRule::Grid(n);
    }
    if let Some(l) = s.trunc_l {
        cfg.trunc_l = l;
    }
    if let Some(tol) = s.tol {
        cfg.tol = tol;
    }
    let report = observability::sweep(&cfg)?;
    let mut csv = Vec::new();
    observability::write_csv(&report.rows, &mut csv).map_err(|source| Error::Csv {
        path: PathBuf::from("<memory>"),
        source,
    })?;
    let csv = String::from_utf8(csv).expect("ascii CSV");
    finish(s, &csv, &sweep_summary(&report), out)?;
    if let Some(f) = report.failures.first() {
        return Err(Failure::Check(format!(
            "{} of {} rows failed; first at h = {}: {}",
            report.failures.len(),
            cfg.h_list.len(),
            f.h,
            f.message
        )));
    }
    Ok(())
}

fn sweep_summary(r: &ObservabilityReport) -> Vec<String> {
    vec![format!(
        "{}: rows={} failed={} increasing={} slope(log quotient vs 1/h)={} slope(log den vs 1/h)={}",
        r.equation,
        r.rows.len(),
        r.failures.len(),
        r.log_quotient_increasing(),
        slope_text(r.quotient_fit()),
        slope_text(r.den_fit()),
    )]
}

fn eigen_table(s: &Settings, xi_re: &[f64], out: &mut dyn Write) -> CliResult<()> {
    if xi_re.is_empty() {
        return Err(Failure::Usage("--xi-re needs at least one value".into()));
    }
    let mut opts = EigenOptions::default();
    if let Some(tol) = s.tol {
        opts.tol = tol;
    }
    let mut rows = Vec::new();
    for &x in xi_re {
        let xi = Complex64::new(x, 0.0);
        let ed = solve_rho_with(xi, &opts)?;
        let asym = rho_asymptotic(xi);
        let ratio = ed.rho / asym;
        rows.push(vec![
            x,
            ed.rho.re,
            ed.rho.im,
            asym.re,
            asym.im,
            ratio.re,
            ratio.im,
            ed.boundary_residual,
        ]);
    }
    let csv = csv_table(
        &[
            "xi_tilde",
            "rho_re",
            "rho_im",
            "rho_asym_re",
            "rho_asym_im",
            "ratio_re",
            "ratio_im",
            "boundary_residual",
        ],
        &rows,
    );
    let last = rows.last().expect("non-empty");
    finish(
        s,
        &csv,
        &[format!("ratio at xi_tilde={} is {:.6}", last[0], last[5])],
        out,
    )
}

fn saddle_verify(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let r = coherent_phase(s.z, s.xi0, s.t_final, s.alpha)?;
    let a = 0.9 * s.xi0;
    let u = HoloFunction::constant(Complex64::new(1.0, 0.0), s.xi0)?;
    let sweep = saddle_sweep(&u, &r, &s.h_list, s.alpha, a)?;
    let scaled = sweep.scaled_errors();
    let rows: Vec<Vec<f64>> = sweep
        .rows
        .iter()
        .zip(&scaled)
        .map(|(r, sc)| {
            vec![
                r.h,
                s.alpha,
                s.z.re,
                s.z.im,
                s.xi0,
                s.t_final,
                r.xi_crit.re,
                r.xi_crit.im,
                r.estimate.re,
                r.estimate.im,
                r.oracle.re,
                r.oracle.im,
                r.rel_err,
                *sc,
            ]
        })
        .collect();
    let csv = csv_table(
        &[
            "h",
            "alpha",
            "z_re",
            "z_im",
            "xi0",
            "T",
            "xi_crit_re",
            "xi_crit_im",
            "estimate_re",
            "estimate_im",
            "oracle_re",
            "oracle_im",
            "rel_err",
            "scaled_err",
        ],
        &rows,
    );
    let spread = scaled.iter().cloned().fold(0.0, f64::max) / scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let summary = vec![format!(
        "fitted order={} expected={} scaled error spread={:.4}",
        slope_text(sweep.order_fit),
        1.0 - s.alpha,
        spread
    )];
    finish(s, &csv, &summary, out)?;
    if sweep.rows.iter().any(|r| !r.oracle_accurate) {
        return Err(Failure::Check("quadrature oracle missed its tolerance".into()));
    }
    Ok(())
}

fn periodize_verify(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let tol = s.tol.unwrap_or(1e-8);
    let cut = CutoffSpec::new(s.xi0)?;
    let evo = EvolutionParams::new(s.alpha, s.z, s.t_final)?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &h in &s.h_list {
        let cs = CoherentStateSpec::new(s.xi0, h)?;
        let mut opts = IdentityCheckOptions::for_scale(h);
        opts.n_max = (2.0 * s.xi0 / h).ceil() as i64;
        if let Some(n) = s.grid_n {
            opts.torus_n = n;
        }
        if let Some(l) = s.trunc_l {
            opts.line_half_width = l;
        }
        let line = |xs: &[f64]| solution_at(&cs, &cut, None, xs, LineOptions::default());
        let check = coeff_identity_check(line, h, &opts).map_err(|e| e.at_scale(h))?;
        // e^{-(t₁+t₂)L} c₀ against e^{-t₂L} e^{-t₁L} c₀
        let c0 = torus_coeffs(&cs, &cut);
        let (t1, t2) = (0.4 * s.t_final, 0.6 * s.t_final);
        let once = evolve_torus(&c0, &evo, t1 + t2)?;
        let twice = evolve_torus(&evolve_torus(&c0, &evo, t1)?, &evo, t2)?;
        let semigroup = once
            .values()
            .iter()
            .zip(twice.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(check.max_deviation);
        rows.push(vec![
            h,
            s.xi0,
            check.max_deviation,
            check.max_coefficient,
            check.shells as f64,
            semigroup,
        ]);
    }
    let csv = csv_table(
        &[
            "h",
            "xi0",
            "max_deviation",
            "max_coefficient",
            "shells",
            "semigroup_deviation",
        ],
        &rows,
    );
    finish(
        s,
        &csv,
        &[format!("max deviation={worst:.3e} tolerance={tol:.1e}")],
        out,
    )?;
    if worst > tol {
        return Err(Failure::Check(format!(
            "coefficient deviation {worst:.3e} exceeds {tol:.1e}"
        )));
    }
    Ok(())
}

fn estimates_verify(s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let evo = EvolutionParams::new(s.alpha, s.z, s.t_final)?;
    let mut opts = BoundOptions {
        t: s.t_final,
        ..BoundOptions::default()
    };
    if let Some(l) = s.trunc_l {
        opts.x_max = l;
    }
    if let Some(tol) = s.tol {
        opts.line.tol = tol;
    }
    let rep = crate::rfhe::verify_pointwise_bounds(s.xi0, &evo, &s.h_list, s.epsilon, opts)?;
    let rows: Vec<Vec<f64>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.h,
                s.alpha,
                s.z.re,
                s.z.im,
                s.xi0,
                s.epsilon,
                s.t_final,
                r.m_out,
                r.m_out_at,
                r.m_in,
                r.origin_ratio,
            ]
        })
        .collect();
    let csv = csv_table(
        &[
            "h",
            "alpha",
            "z_re",
            "z_im",
            "xi0",
            "epsilon",
            "T",
            "m_out",
            "m_out_at",
            "m_in",
            "origin_ratio",
        ],
        &rows,
    );
    let slope = rep.out_fit.map(|f| f.slope);
    finish(
        s,
        &csv,
        &[format!(
            "slope(log m_out vs 1/h)={} max m_in={:.6}",
            slope_text(rep.out_fit),
            rep.m_in_max
        )],
        out,
    )?;
    match slope {
        Some(sl) if sl < 0.0 => Ok(()),
        _ => Err(Failure::Check("outer decay slope is not negative".into())),
    }
}
