//! Kolmogorov solutions on 𝕋 × (-1, 1): each mode carries a computed
//! Dirichlet ground state, so the solution vanishes at `v = ±1`.

use obsgap::kolmogorov::{KolmSolutionSpec, TorusSolution, VDomain};
use obsgap::observability::{sweep, Equation, ExperimentConfig};

fn main() -> obsgap::Result<()> {
    let ts: Vec<f64> = (0..=4).map(|k| k as f64 / 4.0).collect();
    for h in [0.2, 0.1, 0.05] {
        let spec = KolmSolutionSpec::new(h, 1.0, VDomain::Interval, 1.0)?;
        let sol = TorusSolution::new(&spec)?;
        let worst = sol
            .modes
            .iter()
            .filter_map(|m| m.eigen.as_ref())
            .map(|e| e.boundary_residual)
            .fold(0.0, f64::max);
        println!(
            "h={h:<5} modes={:>3}  max |ũ(1)|={worst:.1e}  edge/peak={:.1e}",
            sol.modes.len(),
            sol.dirichlet_residual(&ts)
        );
    }

    let report = sweep(&ExperimentConfig::new(Equation::KolmIntervalV))?;
    for r in &report.rows {
        println!("h={:<5} log Q={:+.4}", r.h, r.log_quotient);
    }
    Ok(())
}
