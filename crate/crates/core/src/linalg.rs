//! Dense complex linear algebra helpers and real-linear subspaces of matrix spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Frobenius norm.
pub fn norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    norm(&(a - b))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint()
}

/// Matrix with a single unit entry.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = c(1.0);
    m
}

pub fn from_real(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows[0].len();
    CMat::from_fn(n, m, |i, j| c(rows[i][j]))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(*b);
        off += b.nrows();
    }
    out
}

/// Inverse, failing on (numerically) singular input.
pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone().try_inverse().ok_or(Error::Singular)
}

/// 2-norm condition number from singular values.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Flattens a complex matrix into a real vector (real parts, then imaginary parts).
pub fn flatten(m: &CMat) -> DVector<f64> {
    let len = m.len();
    let mut v = DVector::zeros(2 * len);
    for (k, z) in m.iter().enumerate() {
        v[k] = z.re;
        v[len + k] = z.im;
    }
    v
}

pub fn unflatten(v: &DVector<f64>, rows: usize, cols: usize) -> CMat {
    let len = rows * cols;
    CMat::from_iterator(rows, cols, (0..len).map(|k| C64::new(v[k], v[len + k])))
}

/// Real inner product Re tr(a* b).
pub fn inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Orthonormal basis of the right null space of a real matrix.
pub fn nullspace(a: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Vec::new();
    }
    // Pad to at least square so the SVD returns a full right basis.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let scale = svd.singular_values.iter().cloned().fold(1.0, f64::max);
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol * scale {
            out.push(vt.row(k).transpose());
        }
    }
    out
}

/// A real-linear subspace of n×n complex matrices with a fixed basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    size: usize,
    basis: Vec<CMat>,
    pinv: DMatrix<f64>,
}

impl Subspace {
    /// Builds a subspace from a linearly independent list.
    pub fn new(size: usize, basis: Vec<CMat>) -> Self {
        let pinv = Self::pseudo_inverse(size, &basis);
        Subspace { size, basis, pinv }
    }

    /// Keeps the elements of `candidates` that are independent of the earlier ones.
    pub fn spanned_by(size: usize, candidates: &[CMat], tol: f64) -> Self {
        let mut kept: Vec<CMat> = Vec::new();
        let mut ortho: Vec<CMat> = Vec::new();
        for cand in candidates {
            let mut r = cand.clone();
            for _ in 0..2 {
                for q in &ortho {
                    let coef = inner(q, &r);
                    r -= q * c(coef);
                }
            }
            let nr = norm(&r);
            if nr > tol * norm(cand).max(1.0) {
                ortho.push(r / c(nr));
                kept.push(cand.clone());
            }
        }
        Self::new(size, kept)
    }

    fn pseudo_inverse(size: usize, basis: &[CMat]) -> DMatrix<f64> {
        if basis.is_empty() {
            return DMatrix::zeros(0, 2 * size * size);
        }
        let cols: Vec<DVector<f64>> = basis.iter().map(flatten).collect();
        let m = DMatrix::from_columns(&cols);
        m.pseudo_inverse(1e-13).expect("pseudo-inverse with nonnegative eps")
    }

    pub fn zero(size: usize) -> Self {
        Self::new(size, Vec::new())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Least-squares coordinates in the basis.
    pub fn coords(&self, x: &CMat) -> Vec<f64> {
        if self.basis.is_empty() {
            return Vec::new();
        }
        let v = &self.pinv * flatten(x);
        v.iter().cloned().collect()
    }

    pub fn combine(&self, coeffs: &[f64]) -> CMat {
        let mut out = zeros(self.size);
        for (b, t) in self.basis.iter().zip(coeffs) {
            out += b * c(*t);
        }
        out
    }

    pub fn project(&self, x: &CMat) -> CMat {
        self.combine(&self.coords(x))
    }

    /// Distance from `x` to the subspace.
    pub fn residual(&self, x: &CMat) -> f64 {
        dist(x, &self.project(x))
    }

    /// Kernel of a real-linear map restricted to this subspace.
    pub fn kernel_of<F>(&self, map: F, tol: f64) -> Subspace
    where
        F: Fn(&CMat) -> CMat,
    {
        if self.basis.is_empty() {
            return self.clone();
        }
        let cols: Vec<DVector<f64>> = self.basis.iter().map(|b| flatten(&map(b))).collect();
        let m = DMatrix::from_columns(&cols);
        let null = nullspace(&m, tol);
        let elems: Vec<CMat> = null
            .iter()
            .map(|v| self.combine(v.as_slice()))
            .collect();
        Subspace::spanned_by(self.size, &elems, 1e-10)
    }

    pub fn intersect(&self, other: &Subspace, tol: f64) -> Subspace {
        let o = other.clone();
        self.kernel_of(move |x| x - o.project(x), tol)
    }

    /// Sum of subspaces (basis of `self` first).
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::spanned_by(self.size, &all, 1e-10)
    }

    /// Matrix of a real-linear endomorphism in this basis (column j = coords of map(b_j)).
    pub fn matrix_of<F>(&self, map: F) -> DMatrix<f64>
    where
        F: Fn(&CMat) -> CMat,
    {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (j, b) in self.basis.iter().enumerate() {
            let col = self.coords(&map(b));
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Splits a matrix into components along a direct sum of subspaces.
#[derive(Clone, Debug)]
pub struct DirectSum {
    parts: Vec<Subspace>,
    total: Subspace,
}

impl DirectSum {
    pub fn new(parts: Vec<Subspace>) -> Result<Self> {
        let size = parts.first().map(|p| p.size()).unwrap_or(0);
        let all: Vec<CMat> = parts.iter().flat_map(|p| p.basis().to_vec()).collect();
        let total = Subspace::new(size, all.clone());
        let check = Subspace::spanned_by(size, &all, 1e-9);
        if check.dim() != all.len() {
            return Err(Error::DimensionMismatch(
                "components do not form a direct sum".into(),
            ));
        }
        Ok(DirectSum { parts, total })
    }

    pub fn parts(&self) -> &[Subspace] {
        &self.parts
    }

    pub fn total(&self) -> &Subspace {
        &self.total
    }

    /// Components of `x`; their sum is the projection of `x` onto the total space.
    pub fn split(&self, x: &CMat) -> Vec<CMat> {
        let coords = self.total.coords(x);
        let mut out = Vec::with_capacity(self.parts.len());
        let mut off = 0;
        for p in &self.parts {
            out.push(p.combine(&coords[off..off + p.dim()]));
            off += p.dim();
        }
        out
    }

    /// Real-linear projection onto component `k` as coordinates-level closure data.
    pub fn component_coords(&self, x: &CMat, k: usize) -> Vec<f64> {
        let coords = self.total.coords(x);
        let off: usize = self.parts[..k].iter().map(|p| p.dim()).sum();
        coords[off..off + self.parts[k].dim()].to_vec()
    }
}
