//! Outer decay and inner Gaussian shape of the evolved line state.

use obsgap::rfhe::{verify_pointwise_bounds, BoundOptions, EvolutionParams};
use obsgap::Complex64;

fn main() -> obsgap::Result<()> {
    let z = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let evo = EvolutionParams::new(0.5, z, 1.0)?;
    let rep = verify_pointwise_bounds(1.0, &evo, &[0.2, 0.1, 0.05, 0.025], 0.5, BoundOptions::default())?;
    for r in &rep.rows {
        println!(
            "h={:<6} sup|x|²|g| = {:.4e} at x={:+.3}   inner = {:.4}   (πh)^¼|g(0,0)| = {:.4}",
            r.h, r.m_out, r.m_out_at, r.m_in, r.origin_ratio
        );
    }
    if let Some(fit) = rep.out_fit {
        println!("log sup ~ {:.4}/h", fit.slope);
    }
    Ok(())
}
