//! Build the band-limited coherent state on the line, evolve it with the
//! rotated fractional heat semigroup and watch the mass leave `|x| > ε`.
//!
//! ```text
//! cargo run --example coherent_state
//! ```

use obsgap::rfhe::{evolve_line, CoherentStateSpec, CutoffSpec, EvolutionParams};
use obsgap::spectral::{l2_norm, Grid1D, Interval};
use obsgap::Complex64;

fn main() -> obsgap::Result<()> {
    let z = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let evo = EvolutionParams::new(0.5, z, 1.0)?;
    let cut = CutoffSpec::new(1.0)?;

    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "h", "|g(0)|", "|g(1)|", "|g(1)|_{|x|>1/2}"
    );
    for h in [0.2, 0.1, 0.05] {
        let cs = CoherentStateSpec::new(1.0, h)?;
        let n = (16.0 / cs.max_spacing()).ceil() as usize + 1;
        let grid = Grid1D::closed(-8.0, 8.0, n)?;
        let g0 = evolve_line(&cs, &cut, &evo, 0.0, &grid)?;
        let g1 = evolve_line(&cs, &cut, &evo, 1.0, &grid)?;
        let all = Interval::real_line();
        let outside = l2_norm(&g1, Interval::new(-8.0, -0.5))
            .value
            .hypot(l2_norm(&g1, Interval::new(0.5, 8.0)).value);
        println!(
            "{h:>6} {:>12.6} {:>12.6} {:>12.4e}",
            l2_norm(&g0, all).value,
            l2_norm(&g1, all).value,
            outside
        );
    }
    Ok(())
}
