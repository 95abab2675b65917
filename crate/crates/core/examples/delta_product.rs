//! The correction product `δ(z) = Π_k (1 + μ/k) / (1 + μ/(k+z))` and its
//! polynomial growth `|δ(z)| ≈ |z|^μ`.

use obsgap::eigen::{delta_growth_check, delta_product, growth_samples, ProductParams};
use obsgap::Complex64;

fn main() -> obsgap::Result<()> {
    let zs = growth_samples(200);
    for mu in [0.05, 0.15, 0.3, 0.45] {
        let pp = ProductParams::new(Complex64::new(mu, 0.0));
        let rep = delta_growth_check(&pp, &zs)?;
        let d = delta_product(&pp, Complex64::new(100.0, 30.0))?;
        println!(
            "μ={mu:<5} slope={:.4}  max residual={:.3}  δ(100+30i)={:.6} ({} terms, tail {:.1e})",
            rep.fit.slope, rep.fit.max_residual, d.value, d.terms, d.tail_error
        );
    }
    Ok(())
}
