//! Exponential and logarithm between algebra and group.

use crate::error::{Error, Result};
use crate::linalg::{c, identity, norm, CMat};

use super::group::{AlgElem, GrpElem};

/// Matrix exponential (Padé with scaling and squaring).
pub fn expm(x: &CMat) -> CMat {
    x.exp()
}

/// Mercator series log(I + y), valid for ‖y‖ < 1 (Frobenius bound).
pub fn logm(g: &CMat) -> Result<CMat> {
    let n = g.nrows();
    let y = g - identity(n);
    let ny = norm(&y);
    if ny >= 1.0 {
        return Err(Error::LogDivergence { norm: ny });
    }
    let mut out = y.clone();
    let mut power = y.clone();
    let mut k = 1usize;
    // Terms shrink like ny^k / k.
    while norm(&power) > 1e-17 * norm(&out).max(1e-300) && k < 2000 {
        power = &power * &y;
        k += 1;
        let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
        out += &power * c(sign / k as f64);
    }
    Ok(out)
}

pub fn exp_grp(x: &AlgElem) -> Result<GrpElem> {
    GrpElem::new(&x.spec, expm(&x.matrix))
}

pub fn log_alg(g: &GrpElem) -> Result<AlgElem> {
    AlgElem::new(&g.spec, logm(&g.matrix)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::group::{GroupSpec, LieAlgebra};
    use crate::linalg::{dist, from_real, zeros};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exp_of_zero_and_diagonal() {
        assert_eq!(expm(&zeros(3)), identity(3));
        let t: f64 = 0.7;
        let e = expm(&from_real(&[&[t, 0.0], &[0.0, -t]]));
        assert!(dist(&e, &from_real(&[&[t.exp(), 0.0], &[0.0, (-t).exp()]])) < 1e-13);
    }

    #[test]
    fn log_inverts_exp_on_su11() {
        let spec = GroupSpec::su(1, 1);
        let alg = LieAlgebra::new(&spec);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = alg.random(|| rng.random_range(-0.2..0.2));
            let g = exp_grp(&AlgElem::new(&spec, x.clone()).unwrap()).unwrap();
            let back = log_alg(&g).unwrap();
            assert!(dist(&back.matrix, &x) < 1e-9);
        }
    }

    #[test]
    fn log_refuses_far_elements() {
        let g = identity(2) * c(3.0);
        assert!(matches!(logm(&g), Err(Error::LogDivergence { .. })));
    }
}
