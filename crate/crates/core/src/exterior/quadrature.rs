//! Gauss–Legendre rules and integration of 2-forms over P¹.

use crate::error::{Error, Result};
use crate::linalg::C64;

use super::form::VForm;

/// Nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / deriv;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// ∫ over the stereographic plane ℝ² ⊂ P¹ of a scalar 2-form, with r = tan(θ/2).
pub fn integrate_p1(form: &VForm, n_theta: usize, n_phi: usize) -> Result<C64> {
    if form.dim != 2 || form.degree != 2 || form.rows != 1 {
        return Err(Error::DimensionMismatch("needs a scalar 2-form on a 2-dimensional chart".into()));
    }
    let (nodes, weights) = gauss_legendre(n_theta);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut total = C64::new(0.0, 0.0);
    for (t, w) in nodes.iter().zip(&weights) {
        let theta = half_pi * (t + 1.0);
        let r = (theta / 2.0).tan();
        let dr = 0.5 / (theta / 2.0).cos().powi(2);
        for j in 0..n_phi {
            let phi = dphi * j as f64;
            let x = [r * phi.cos(), r * phi.sin()];
            let coef = form.values(&x)?[0][(0, 0)];
            total += coef * (w * half_pi * dr * r * dphi);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..14 {
            let num: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((num - exact).abs() < 1e-13, "degree {deg}");
        }
    }
}
