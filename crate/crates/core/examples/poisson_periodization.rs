//! Periodize the line state onto the torus and compare its Fourier
//! coefficients with samples of the semiclassical transform.

use obsgap::rfhe::{solution_at, CoherentStateSpec, CutoffSpec, LineOptions};
use obsgap::spectral::{coeff_identity_check, IdentityCheckOptions};

fn main() -> obsgap::Result<()> {
    let cut = CutoffSpec::new(1.0)?;
    for h in [0.1, 0.05, 0.025] {
        let cs = CoherentStateSpec::new(1.0, h)?;
        let line = |xs: &[f64]| solution_at(&cs, &cut, None, xs, LineOptions::default());
        let opts = IdentityCheckOptions::for_scale(h);
        let check = coeff_identity_check(line, h, &opts)?;
        println!(
            "h = {h:<5} modes {}..={}  shells {:>2}  max|c_n| = {:.4}  max deviation = {:.2e}",
            opts.n_min, opts.n_max, check.shells, check.max_coefficient, check.max_deviation
        );
    }
    Ok(())
}
