//! The rotated fractional heat quotient on the torus, swept over h and
//! written to CSV.
//!
//! ```text
//! cargo run --example observability_sweep -- quotient.csv
//! ```

use std::path::PathBuf;

use obsgap::observability::{export_csv, sweep, Equation, ExperimentConfig};

fn main() -> obsgap::Result<()> {
    let mut cfg = ExperimentConfig::new(Equation::RfheTorus);
    cfg.h_list = vec![0.2, 0.1, 0.05, 0.025, 0.0125];
    let report = sweep(&cfg)?;

    for r in &report.rows {
        println!("h={:<7} Q={:.4e}  h log Q={:+.4}", r.h, r.quotient, r.h_log_quotient);
    }
    for f in &report.failures {
        println!("h={:<7} failed: {}", f.h, f.message);
    }
    if let (Some(q), Some(d)) = (report.quotient_fit(), report.den_fit()) {
        println!("log Q ~ {:.4}/h,  log den ~ {:.4}/h", q.slope, d.slope);
    }

    if let Some(path) = std::env::args_os().nth(1).map(PathBuf::from) {
        export_csv(&report, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
