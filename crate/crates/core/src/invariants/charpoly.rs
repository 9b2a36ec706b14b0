//! Division-free characteristic polynomials (Berkowitz) over any commutative ring.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::jet::Jet;
use crate::linalg::{CMat, C64};

/// The ring operations needed by the division-free algorithms.
pub trait Ring: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// The rational number num/den.
    fn ratio(num: i64, den: i64) -> Self;
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
}

impl Ring for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ratio(num: i64, den: i64) -> Self {
        C64::new(num as f64 / den as f64, 0.0)
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
}

impl Ring for Jet {
    fn zero() -> Self {
        Jet::real(0.0)
    }
    fn one() -> Self {
        Jet::real(1.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ratio(num: i64, den: i64) -> Self {
        Jet::real(num as f64 / den as f64)
    }
}

/// Coefficients `[1, c_1, ..., c_n]` of det(tI − A), highest degree first.
/// `a` is row-major n×n.
pub fn berkowitz<T: Ring>(a: &[T], n: usize) -> Vec<T> {
    if n == 0 {
        return vec![T::one()];
    }
    let at = |i: usize, j: usize| &a[i * n + j];
    let mut vect = vec![T::one(), at(0, 0).neg()];
    for r in 1..n {
        // A_r = [[A_{r-1}, S], [R, a_rr]] with S a column and R a row of length r.
        let s: Vec<T> = (0..r).map(|i| at(i, r).clone()).collect();
        let row: Vec<T> = (0..r).map(|j| at(r, j).clone()).collect();
        // Toeplitz first column: 1, -a_rr, -R S, -R A S, ..., -R A^{r-1} S.
        let mut col = vec![T::one(), at(r, r).neg()];
        let mut power = s.clone();
        for _ in 0..r {
            let dot = row
                .iter()
                .zip(power.iter())
                .fold(T::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
            col.push(dot.neg());
            let next: Vec<T> = (0..r)
                .map(|i| {
                    (0..r).fold(T::zero(), |acc, j| acc.add(&at(i, j).mul(&power[j])))
                })
                .collect();
            power = next;
        }
        // Multiply the (r+2)×(r+1) lower-triangular Toeplitz matrix by vect.
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = T::zero();
            for (j, vj) in vect.iter().enumerate() {
                if i >= j && i - j < col.len() {
                    acc = acc.add(&col[i - j].mul(vj));
                }
            }
            next.push(acc);
        }
        vect = next;
    }
    vect
}

/// e_k of the eigenvalues: the coefficient of t^k in det(I + tA).
pub fn elementary_symmetric<T: Ring>(a: &[T], n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let cp = berkowitz(a, n);
    if k.is_multiple_of(2) {
        cp[k].clone()
    } else {
        cp[k].neg()
    }
}

/// All e_0..e_n.
pub fn elementary_all<T: Ring>(a: &[T], n: usize) -> Vec<T> {
    berkowitz(a, n)
        .into_iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { c } else { c.neg() })
        .collect()
}

pub fn determinant<T: Ring>(a: &[T], n: usize) -> T {
    elementary_symmetric(a, n, n)
}

pub fn cmat_entries(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    (0..n * n).map(|k| m[(k / n, k % n)]).collect()
}

/// e_k of a complex matrix.
pub fn e_k(m: &CMat, k: usize) -> C64 {
    elementary_symmetric(&cmat_entries(m), m.nrows(), k)
}
