//! The smooth step s with s = 0 on (−∞, ½] and s = 1 on [¾, ∞).

use crate::jet::Jet;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BumpProfile;

/// φ(t) = e^{−1/t} / (e^{−1/t} + e^{−1/(1−t)}) = 1 / (1 + e^{1/t − 1/(1−t)}) on (0, 1), as a jet.
/// The second form is monotone in floating point.
fn smooth_step(t: &Jet) -> Jet {
    let v = t.re();
    if v <= 0.0 {
        return Jet::real(0.0);
    }
    if v >= 1.0 {
        return Jet::real(1.0);
    }
    let exponent = &t.recip() - &(&Jet::real(1.0) - t).recip();
    if exponent.re() > 700.0 {
        return Jet::real(0.0);
    }
    (&Jet::real(1.0) + &exponent.exp()).recip()
}

impl BumpProfile {
    pub fn eval_jet(&self, x: &Jet) -> Jet {
        smooth_step(&(x - &Jet::real(0.5)).scale(4.0.into()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_jet(&Jet::real(x)).re()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.eval_jet(&Jet::var(x, 0, 1, 1)).grad(0).re
    }

    /// s_ε(ρ) = s(ρ/ε).
    pub fn scaled(&self, eps: f64, rho: f64) -> f64 {
        self.eval(rho / eps)
    }

    pub fn scaled_jet(&self, eps: f64, rho: &Jet) -> Jet {
        self.eval_jet(&rho.scale((1.0 / eps).into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        let s = BumpProfile;
        let eps = 0.3;
        for k in 0..=50 {
            let rho = eps * 0.5 * k as f64 / 50.0;
            assert_eq!(s.scaled(eps, rho), 0.0);
            assert_eq!(s.scaled(eps, 0.75 * eps + rho), 1.0);
        }
        let mid = s.scaled(eps, 0.6 * eps);
        assert!(mid > 0.0 && mid < 1.0);
        let mut prev = 0.0;
        for k in 0..=1000 {
            let v = s.eval(0.4 + 0.5 * k as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn analytic_derivative_matches_differences() {
        let s = BumpProfile;
        for x in [0.51, 0.55, 0.6, 0.625, 0.7, 0.74] {
            let h = 1e-6;
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            assert!((fd - s.derivative(x)).abs() < 1e-6);
        }
        assert_eq!(s.derivative(0.3), 0.0);
    }
}
