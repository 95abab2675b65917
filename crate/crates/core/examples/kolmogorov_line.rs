//! Kolmogorov solutions on 𝕋 × ℝ built from the explicit Gaussian ground
//! states, and the observability quotient they produce.

use obsgap::kolmogorov::{KolmSolutionSpec, TorusSolution, VDomain};
use obsgap::observability::{sweep, Equation, ExperimentConfig};

fn main() -> obsgap::Result<()> {
    let spec = KolmSolutionSpec::new(0.1, 1.0, VDomain::Line, 1.0)?;
    let sol = TorusSolution::new(&spec)?;
    println!("h = 0.1: {} modes", sol.modes.len());
    for m in sol.modes.iter().step_by(4) {
        println!("  n={:>3}  a_n={:.4e}  λ_n={:.4}", m.n, m.a, m.lambda);
    }

    let report = sweep(&ExperimentConfig::new(Equation::KolmLineV))?;
    for r in &report.rows {
        println!(
            "h={:<5} num={:.4e} den={:.4e} log Q={:+.4}",
            r.h, r.num_l2, r.den_l2, r.log_quotient
        );
    }
    Ok(())
}
