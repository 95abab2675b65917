//! Dirichlet ground states of `-∂v² + (ξ̃v)²` on (-1, 1): shooting solution,
//! large-ξ̃ asymptote and a finite-difference cross-check on the real axis.

use std::f64::consts::PI;

use obsgap::eigen::{fd_oracle, rho_asymptotic, solve_rho};
use obsgap::Complex64;

fn main() -> obsgap::Result<()> {
    println!("real axis");
    for x in [5.0, 8.0, 12.0, 16.0, 20.0] {
        let xi = Complex64::new(x, 0.0);
        let ed = solve_rho(xi)?;
        let fd = fd_oracle(x, 4000)?;
        println!(
            "  ξ̃={x:>4}  ρ̃={:.6e}  ρ̃/asym={:.5}  |λ-λ_fd|/λ={:.1e}  newton={}",
            ed.rho.re,
            (ed.rho / rho_asymptotic(xi)).re,
            (ed.lambda - fd).norm() / fd.norm(),
            ed.newton_iterations
        );
    }
    println!("ray arg ξ̃ = -π/4");
    for m in [5.0, 10.0, 15.0, 20.0] {
        let xi = Complex64::from_polar(m, -PI / 4.0);
        let ed = solve_rho(xi)?;
        println!(
            "  |ξ̃|={m:>4}  ρ̃={:.6e}  ρ̃/asym={:.5}",
            ed.rho,
            ed.rho / rho_asymptotic(xi)
        );
    }
    Ok(())
}
