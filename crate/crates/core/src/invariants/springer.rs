//! f(x + n) = f(x) for commuting nilpotent n, exactly and in floating point.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{commutator, identity, norm, CMat};

use super::charpoly::cmat_entries;
use super::jordan::{q, QMat};
use super::poly::InvariantPolynomial;

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub samples: usize,
    pub max_residual: f64,
    pub pass: bool,
}

/// |f(x + n) − f(x)| in ℚ after validating [x, n] = 0 and n nilpotent.
pub fn springer_check_exact(x: &QMat, n: &QMat, f: &InvariantPolynomial) -> Result<BigRational> {
    if !x.commutator(n).is_zero() {
        return Err(Error::PreconditionFailed("x and n do not commute".into()));
    }
    if !n.pow(n.n).is_zero() {
        return Err(Error::PreconditionFailed("n is not nilpotent".into()));
    }
    let shifted = f.eval_ring(&x.add(n).data, x.n);
    Ok((shifted - f.eval_ring(&x.data, x.n)).abs())
}

/// Floating-point variant; preconditions hold up to `tol` relative to ‖x‖ + ‖n‖.
pub fn springer_check(x: &CMat, n: &CMat, f: &InvariantPolynomial, tol: f64) -> Result<f64> {
    let scale = 1.0 + norm(x) + norm(n);
    if norm(&commutator(x, n)) > tol * scale * scale {
        return Err(Error::PreconditionFailed("x and n do not commute".into()));
    }
    let dim = n.nrows();
    let power = (0..dim).fold(identity(dim), |acc, _| acc * n);
    if norm(&power) > tol * scale.powi(dim as i32) {
        return Err(Error::PreconditionFailed("n is not nilpotent".into()));
    }
    let shifted = f.eval_ring(&cmat_entries(&(x + n)), dim);
    Ok((shifted - f.eval(x)).norm())
}

/// Random exact pair sharing a Jordan basis: x = P(D + aN)P⁻¹, n = P(bN + cN²)P⁻¹.
pub fn random_commuting_pair<R: Rng>(rng: &mut R, dim: usize) -> (QMat, QMat) {
    let mut diag = QMat::zeros(dim);
    let mut shift = QMat::zeros(dim);
    let mut start = 0;
    while start < dim {
        let size = rng.random_range(1..=(dim - start).min(3));
        let lam = q(rng.random_range(-3..=3), rng.random_range(1..=2));
        for i in start..start + size {
            diag.data[i * dim + i] = lam.clone();
            if i + 1 < start + size {
                shift.data[i * dim + i + 1] = q(1, 1);
            }
        }
        start += size;
    }
    // Unit lower times unit upper: integer entries, determinant one.
    let mut lower = QMat::identity(dim);
    let mut upper = QMat::identity(dim);
    for i in 0..dim {
        for j in 0..i {
            lower.data[i * dim + j] = q(rng.random_range(-2..=2), 1);
            upper.data[j * dim + i] = q(rng.random_range(-2..=2), 1);
        }
    }
    let basis = lower.mul(&upper);
    let inv = basis.inverse().expect("unimodular");
    let a = q(rng.random_range(0..=2), 1);
    let b = q(rng.random_range(1..=3), 1);
    let cc = q(rng.random_range(-2..=2), 1);
    let x = basis.mul(&diag.add(&shift.scale(&a))).mul(&inv);
    let n = basis.mul(&shift.scale(&b).add(&shift.mul(&shift).scale(&cc))).mul(&inv);
    (x, n)
}

/// Exact check over constructed pairs and every e_k.
pub fn springer_report<R: Rng>(rng: &mut R, samples: usize, dim: usize) -> Result<LemmaReport> {
    let mut worst = BigRational::zero();
    for _ in 0..samples {
        let (x, n) = random_commuting_pair(rng, dim);
        for k in 1..=dim {
            let r = springer_check_exact(&x, &n, &InvariantPolynomial::elementary(k))?;
            if r > worst {
                worst = r;
            }
        }
    }
    let max_residual = worst.to_f64().unwrap_or(f64::INFINITY);
    Ok(LemmaReport { lemma: "nilpotent-invariance".into(), samples, max_residual, pass: worst.is_zero() })
}
