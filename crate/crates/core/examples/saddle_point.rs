//! Saddle-point evaluation of `∫ e^{-ξ²/2h + r(ξ)/h^α} dξ` against adaptive
//! quadrature, for the phase of the evolved coherent state.

use obsgap::saddle::{coherent_phase, saddle_sweep, HoloFunction};
use obsgap::Complex64;

fn main() -> obsgap::Result<()> {
    let alpha = 0.5;
    let z = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let r = coherent_phase(z, 1.0, 1.0, alpha)?;
    let u = HoloFunction::constant(Complex64::new(1.0, 0.0), 1.0)?;

    let sweep = saddle_sweep(&u, &r, &[0.1, 0.05, 0.02, 0.01], alpha, 0.9)?;
    for (row, scaled) in sweep.rows.iter().zip(sweep.scaled_errors()) {
        println!(
            "h={:<5} ξ_c={:.5}  estimate={:.6e}  oracle={:.6e}  rel err={:.3e}  /h^(1-α)={:.3}",
            row.h, row.xi_crit, row.estimate, row.oracle, row.rel_err, scaled
        );
    }
    if let Some(fit) = sweep.order_fit {
        println!("observed order {:.3} (expected {})", fit.slope, 1.0 - alpha);
    }
    Ok(())
}
