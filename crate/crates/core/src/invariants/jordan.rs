//! Jordan decomposition x = s + n by Newton iteration on the squarefree part of the
//! characteristic polynomial, exactly over ℚ or in floating point with a spectral gap.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, identity, inverse, norm, CMat, C64};

use super::charpoly::berkowitz;

/// Dense square matrix over ℚ (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct QMat {
    pub n: usize,
    pub data: Vec<BigRational>,
}

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

impl QMat {
    pub fn zeros(n: usize) -> Self {
        QMat { n, data: vec![BigRational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        QMat { n, data: rows.iter().flat_map(|r| r.iter().map(|&v| q(v, 1))).collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    pub fn add(&self, o: &QMat) -> QMat {
        QMat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &QMat) -> QMat {
        QMat { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: &BigRational) -> QMat {
        QMat { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, o: &QMat) -> QMat {
        let n = self.n;
        let mut out = QMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.at(k, j);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> QMat {
        (0..k).fold(QMat::identity(self.n), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn commutator(&self, o: &QMat) -> QMat {
        self.mul(o).sub(&o.mul(self))
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<QMat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero()).ok_or(Error::Singular)?;
            for j in 0..n {
                a.data.swap(col * n + j, pivot * n + j);
                inv.data.swap(col * n + j, pivot * n + j);
            }
            let p = a.at(col, col).clone();
            for j in 0..n {
                a.data[col * n + j] /= &p;
                inv.data[col * n + j] /= &p;
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let factor = a.at(r, col).clone();
                for j in 0..n {
                    let (av, iv) = (a.at(col, j).clone(), inv.at(col, j).clone());
                    a.data[r * n + j] -= &factor * av;
                    inv.data[r * n + j] -= &factor * iv;
                }
            }
        }
        Ok(inv)
    }

    pub fn to_cmat(&self) -> CMat {
        use num_traits::ToPrimitive;
        CMat::from_fn(self.n, self.n, |i, j| c(self.at(i, j).to_f64().unwrap_or(f64::NAN)))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> BigRational {
        self.data.iter().map(|a| a.abs()).fold(BigRational::zero(), |m, a| if a > m { a } else { m })
    }
}

/// Polynomial over ℚ, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly(pub Vec<BigRational>);

impl QPoly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn derivative(&self) -> QPoly {
        QPoly(self.0.iter().enumerate().skip(1).map(|(k, a)| a * q(k as i64, 1)).collect()).trim()
    }

    /// (quotient, remainder).
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.0[dd].clone();
        let mut rem = self.0.clone();
        let mut quo = vec![BigRational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1;
            let coef = &rem[k] / &lead;
            if !coef.is_zero() {
                for (i, di) in d.0.iter().enumerate() {
                    rem[k - dd + i] -= &coef * di;
                }
                quo[k - dd] = coef;
            }
            rem.pop();
        }
        (QPoly(quo).trim(), QPoly(rem).trim())
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone().trim(), o.clone().trim());
        while b.degree().is_some() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        let lead = a.0.last().cloned().unwrap_or_else(BigRational::one);
        QPoly(a.0.iter().map(|x| x / &lead).collect())
    }

    /// Horner evaluation at a matrix.
    pub fn eval_mat(&self, m: &QMat) -> QMat {
        let mut out = QMat::zeros(m.n);
        for a in self.0.iter().rev() {
            out = out.mul(m).add(&QMat::identity(m.n).scale(a));
        }
        out
    }
}

/// Characteristic polynomial det(tI − m), lowest degree first.
pub fn char_poly(m: &QMat) -> QPoly {
    let mut coeffs = berkowitz(&m.data, m.n);
    coeffs.reverse();
    QPoly(coeffs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanPair<M> {
    pub semisimple: M,
    pub nilpotent: M,
}

/// Exact decomposition over ℚ.
pub fn jordan_decompose_exact(x: &QMat) -> Result<JordanPair<QMat>> {
    let chi = char_poly(x);
    let (squarefree, _) = chi.div_rem(&chi.gcd(&chi.derivative()));
    let deriv = squarefree.derivative();
    let mut s = x.clone();
    for _ in 0..(2 * x.n + 2) {
        let ps = squarefree.eval_mat(&s);
        if ps.is_zero() {
            let nilpotent = x.sub(&s);
            return Ok(JordanPair { semisimple: s, nilpotent });
        }
        s = s.sub(&ps.mul(&deriv.eval_mat(&s).inverse()?));
    }
    Err(Error::IllConditionedSpectrum("Newton iteration did not terminate".into()))
}

/// Eigenvalues closer than this are one cluster in the float path.
pub const CLUSTER_RADIUS: f64 = 1.5e-7;
/// Distinct clusters must be at least this far apart.
pub const MIN_SPECTRAL_GAP: f64 = 1e-6;

fn eigenvalues(x: &CMat) -> Result<Vec<C64>> {
    x.clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().cloned().collect())
        .ok_or_else(|| Error::IllConditionedSpectrum("Schur form did not converge".into()))
}

/// Cluster centers of the spectrum (single linkage at CLUSTER_RADIUS, relative to the
/// spectral radius when that exceeds one).
fn spectral_clusters(x: &CMat) -> Result<Vec<C64>> {
    let eig = eigenvalues(x)?;
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut label: Vec<usize> = (0..eig.len()).collect();
    for i in 0..eig.len() {
        for j in (i + 1)..eig.len() {
            if (eig[i] - eig[j]).norm() <= CLUSTER_RADIUS * scale {
                let (from, to) = (label[j], label[i]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut centers: Vec<(usize, C64, usize)> = Vec::new();
    for (lam, l) in eig.iter().zip(&label) {
        match centers.iter_mut().find(|(k, _, _)| k == l) {
            Some((_, sum, count)) => {
                *sum += lam;
                *count += 1;
            }
            None => centers.push((*l, *lam, 1)),
        }
    }
    let centers: Vec<C64> = centers.into_iter().map(|(_, sum, count)| sum / c(count as f64)).collect();
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let gap = (centers[i] - centers[j]).norm();
            if gap < MIN_SPECTRAL_GAP * scale {
                return Err(Error::IllConditionedSpectrum(format!("eigenvalue gap {gap:.3e} below {MIN_SPECTRAL_GAP:.0e}")));
            }
        }
    }
    Ok(centers)
}

fn poly_at(roots: &[C64], m: &CMat, skip: Option<usize>) -> CMat {
    let n = m.nrows();
    roots
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .fold(identity(n), |acc, (_, r)| acc * (m - identity(n) * *r))
}

/// Floating-point decomposition; requires well-separated eigenvalue clusters.
pub fn jordan_decompose(x: &CMat) -> Result<JordanPair<CMat>> {
    let roots = spectral_clusters(x)?;
    let n = x.nrows();
    let mut s = x.clone();
    let scale = 1.0 + norm(x);
    for _ in 0..60 {
        let ps = poly_at(&roots, &s, None);
        if norm(&ps) <= 1e-13 * scale.powi(roots.len() as i32) {
            break;
        }
        let mut deriv = CMat::zeros(n, n);
        for k in 0..roots.len() {
            deriv += poly_at(&roots, &s, Some(k));
        }
        s -= ps * inverse(&deriv)?;
    }
    let nilpotent = x - &s;
    Ok(JordanPair { semisimple: s, nilpotent })
}

/// Residuals of the defining properties: (recomposition, [s, n], n^dim, semisimplicity).
pub fn jordan_residuals(x: &CMat, pair: &JordanPair<CMat>) -> Result<[f64; 4]> {
    let n = x.nrows();
    let recomposition = norm(&(&pair.semisimple + &pair.nilpotent - x));
    let comm = norm(&commutator(&pair.semisimple, &pair.nilpotent));
    let power = (0..n).fold(identity(n), |acc, _| acc * &pair.nilpotent);
    let roots = spectral_clusters(&pair.semisimple)?;
    let semisimple = norm(&poly_at(&roots, &pair.semisimple, None));
    Ok([recomposition, comm, norm(&power), semisimple])
}
