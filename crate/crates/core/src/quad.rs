//! One-dimensional quadrature rules shared by the rest of the crate.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// 7-point Gauss weights, attached to XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: Complex64,
    /// Sum of the Gauss/Kronrod discrepancies over all panels.
    pub error: f64,
    /// `false` when the subdivision budget ran out before the tolerance was met.
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let s = f(c - half * x) + f(c + half * x);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of a complex integrand.
///
/// Stops when the summed error estimate falls below
/// `max(abs_tol, rel_tol·|I|)` or after `max_panels` panels.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64, max_panels: usize) -> QuadOutcome
where
    F: Fn(f64) -> Complex64,
{
    let mut panels = vec![gk15(&f, a, b)];
    let mut evaluations = 15;
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = abs_tol.max(rel_tol * value.norm());
        if error <= target || panels.len() >= max_panels {
            return QuadOutcome {
                value,
                error,
                converged: error <= target,
                evaluations,
            };
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // panel can no longer be split in floating point
            return QuadOutcome {
                value,
                error,
                converged: false,
                evaluations,
            };
        }
        panels.push(gk15(&f, p.a, mid));
        panels.push(gk15(&f, mid, p.b));
        evaluations += 30;
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|t| c + half * t).collect(),
        w.iter().map(|w| half * w).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for p in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} p={p}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn gauss_legendre_weights_sum_to_interval_length() {
        let (_, w) = gauss_legendre_on(40, -3.0, 5.0);
        assert!((w.iter().sum::<f64>() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_gaussian() {
        let h = 0.01;
        let out = integrate(
            |x| Complex64::new((-x * x / (2.0 * h)).exp(), 0.0),
            -1.0,
            1.0,
            1e-12,
            0.0,
            500,
        );
        assert!(out.converged);
        let exact = (2.0 * std::f64::consts::PI * h).sqrt(); // erf factor is 1 to double precision
        assert!((out.value.re - exact).abs() < 1e-13);
        assert_eq!(out.value.im, 0.0);
    }

    #[test]
    fn adaptive_oscillatory() {
        // ∫_0^1 e^{i 40 x} dx
        let out = integrate(|x| Complex64::new(0.0, 40.0 * x).exp(), 0.0, 1.0, 1e-12, 0.0, 500);
        let exact = (Complex64::new(0.0, 40.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((out.value - exact).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let out = integrate(|x| Complex64::new(x.abs().sqrt(), 0.0), -1.0, 1.0, 1e-15, 0.0, 3);
        assert!(!out.converged);
        assert!((out.value.re - 4.0 / 3.0).abs() < 1e-2);
    }
}
