//! Second-order forward-mode automatic differentiation.
//!
//! A [`Jet`] carries a complex value together with its gradient and Hessian with
//! respect to a fixed set of real variables. Empty derivative vectors stand for
//! zero, and `order` records how many derivative levels are valid.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};

/// Order used for constants, whose derivatives are exactly zero at every level.
pub const EXACT: u8 = u8::MAX;

#[derive(Clone, Debug)]
pub struct Jet {
    pub v: C64,
    pub d: Vec<C64>,
    pub h: Vec<C64>,
    pub order: u8,
}

fn at(v: &[C64], i: usize) -> C64 {
    if v.is_empty() {
        C64::new(0.0, 0.0)
    } else {
        v[i]
    }
}

impl Jet {
    pub fn constant(v: C64) -> Self {
        Jet { v, d: Vec::new(), h: Vec::new(), order: EXACT }
    }

    pub fn real(v: f64) -> Self {
        Self::constant(c(v))
    }

    /// Coordinate variable `i` of `n` evaluated at `x`.
    pub fn var(x: f64, i: usize, n: usize, order: u8) -> Self {
        let mut d = Vec::new();
        if order >= 1 {
            d = vec![c(0.0); n];
            d[i] = c(1.0);
        }
        Jet { v: c(x), d, h: Vec::new(), order }
    }

    /// All coordinate variables at a point.
    pub fn vars(x: &[f64], order: u8) -> Vec<Jet> {
        (0..x.len()).map(|i| Jet::var(x[i], i, x.len(), order)).collect()
    }

    pub fn nvars(&self) -> usize {
        self.d.len().max((self.h.len() as f64).sqrt() as usize)
    }

    pub fn re(&self) -> f64 {
        self.v.re
    }

    pub fn grad(&self, i: usize) -> C64 {
        at(&self.d, i)
    }

    pub fn hess(&self, i: usize, j: usize) -> C64 {
        let n = self.nvars();
        if self.h.is_empty() {
            C64::new(0.0, 0.0)
        } else {
            self.h[i * n + j]
        }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    pub fn chain(&self, f: C64, f1: C64, f2: C64) -> Jet {
        let n = self.nvars();
        let order = self.order;
        let mut d = Vec::new();
        let mut h = Vec::new();
        if order >= 1 && !self.d.is_empty() {
            d = self.d.iter().map(|x| f1 * x).collect();
        }
        if order >= 2 && n > 0 {
            h = vec![C64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = f1 * self.hess(i, j) + f2 * self.grad(i) * self.grad(j);
                }
            }
        }
        Jet { v: f, d, h, order }
    }

    /// Binary chain rule with partials (fa, fb) and second partials (faa, fab, fbb).
    #[allow(clippy::too_many_arguments)]
    fn chain2(a: &Jet, b: &Jet, f: C64, fa: C64, fb: C64, faa: C64, fab: C64, fbb: C64) -> Jet {
        let n = a.nvars().max(b.nvars());
        let order = a.order.min(b.order);
        let mut d = Vec::new();
        let mut h = Vec::new();
        if order >= 1 && n > 0 && !(a.d.is_empty() && b.d.is_empty()) {
            d = (0..n).map(|i| fa * a.grad(i) + fb * b.grad(i)).collect();
        }
        if order >= 2 && n > 0 {
            h = vec![C64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = fa * a.hess(i, j)
                        + fb * b.hess(i, j)
                        + faa * a.grad(i) * a.grad(j)
                        + fab * (a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i))
                        + fbb * b.grad(i) * b.grad(j);
                }
            }
        }
        Jet { v: f, d, h, order }
    }

    pub fn scale(&self, s: C64) -> Jet {
        self.chain(self.v * s, s, C64::new(0.0, 0.0))
    }

    pub fn recip(&self) -> Jet {
        let inv = self.v.inv();
        self.chain(inv, -inv * inv, c(2.0) * inv * inv * inv)
    }

    pub fn div(&self, other: &Jet) -> Jet {
        let b = other.v;
        let binv = b.inv();
        let a = self.v;
        Jet::chain2(
            self,
            other,
            a * binv,
            binv,
            -a * binv * binv,
            C64::new(0.0, 0.0),
            -binv * binv,
            c(2.0) * a * binv * binv * binv,
        )
    }

    pub fn sqrt(&self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, c(0.5) / s, c(-0.25) / (s * self.v))
    }

    pub fn exp(&self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet {
        let inv = self.v.inv();
        self.chain(self.v.ln(), inv, -inv * inv)
    }

    pub fn powf(&self, p: f64) -> Jet {
        let v = self.v;
        self.chain(v.powf(p), c(p) * v.powf(p - 1.0), c(p * (p - 1.0)) * v.powf(p - 2.0))
    }

    pub fn powi(&self, k: i32) -> Jet {
        let v = self.v;
        let kf = k as f64;
        self.chain(v.powi(k), c(kf) * v.powi(k - 1), c(kf * (kf - 1.0)) * v.powi(k - 2))
    }

    pub fn sin(&self) -> Jet {
        self.chain(self.v.sin(), self.v.cos(), -self.v.sin())
    }

    pub fn cos(&self) -> Jet {
        self.chain(self.v.cos(), -self.v.sin(), -self.v.cos())
    }

    pub fn conj(&self) -> Jet {
        Jet {
            v: self.v.conj(),
            d: self.d.iter().map(|z| z.conj()).collect(),
            h: self.h.iter().map(|z| z.conj()).collect(),
            order: self.order,
        }
    }

    pub fn truncate(&self, order: u8) -> Jet {
        let mut out = self.clone();
        if order < 2 {
            out.h.clear();
        }
        if order < 1 {
            out.d.clear();
        }
        out.order = self.order.min(order);
        out
    }

    /// The partial derivative in variable `i`, one order lower.
    pub fn partial(&self, i: usize) -> Result<Jet> {
        if self.order < 1 {
            return Err(Error::DerivativeUnavailable { requested: 1, available: 0 });
        }
        let n = self.nvars();
        let d = if self.order >= 2 && !self.h.is_empty() {
            (0..n).map(|j| self.h[i * n + j]).collect()
        } else {
            Vec::new()
        };
        let order = if self.order == EXACT { EXACT } else { self.order - 1 };
        Ok(Jet { v: self.grad(i), d, h: Vec::new(), order })
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, b: &Jet) -> Jet {
        let one = c(1.0);
        let z = C64::new(0.0, 0.0);
        Jet::chain2(self, b, self.v + b.v, one, one, z, z, z)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, b: &Jet) -> Jet {
        let one = c(1.0);
        let z = C64::new(0.0, 0.0);
        Jet::chain2(self, b, self.v - b.v, one, -one, z, z, z)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, b: &Jet) -> Jet {
        let z = C64::new(0.0, 0.0);
        Jet::chain2(self, b, self.v * b.v, b.v, self.v, z, c(1.0), z)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(c(-1.0))
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, b: Jet) -> Jet {
                (&self).$m(&b)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, b: &Jet) -> Jet {
                (&self).$m(b)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        (&self).neg()
    }
}

/// A matrix-valued jet.
#[derive(Clone, Debug)]
pub struct MatJet {
    pub v: CMat,
    pub d: Vec<CMat>,
    pub h: Vec<CMat>,
    pub order: u8,
}

impl MatJet {
    pub fn constant(v: CMat) -> Self {
        MatJet { v, d: Vec::new(), h: Vec::new(), order: EXACT }
    }

    pub fn nvars(&self) -> usize {
        self.d.len().max((self.h.len() as f64).sqrt() as usize)
    }

    pub fn rows(&self) -> usize {
        self.v.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.ncols()
    }

    fn zero_like(&self) -> CMat {
        CMat::zeros(self.v.nrows(), self.v.ncols())
    }

    pub fn grad(&self, i: usize) -> CMat {
        if self.d.is_empty() {
            self.zero_like()
        } else {
            self.d[i].clone()
        }
    }

    pub fn hess(&self, i: usize, j: usize) -> CMat {
        if self.h.is_empty() {
            self.zero_like()
        } else {
            self.h[i * self.nvars() + j].clone()
        }
    }

    /// Assembles a matrix jet from entry jets (row-major).
    pub fn from_entries(rows: usize, cols: usize, entries: &[Jet]) -> MatJet {
        let n = entries.iter().map(|e| e.nvars()).max().unwrap_or(0);
        let order = entries.iter().map(|e| e.order).min().unwrap_or(EXACT);
        let v = CMat::from_fn(rows, cols, |i, j| entries[i * cols + j].v);
        let any_d = entries.iter().any(|e| !e.d.is_empty());
        let any_h = entries.iter().any(|e| !e.h.is_empty());
        let d = if order >= 1 && any_d {
            (0..n)
                .map(|k| CMat::from_fn(rows, cols, |i, j| entries[i * cols + j].grad(k)))
                .collect()
        } else {
            Vec::new()
        };
        let h = if order >= 2 && any_h {
            let mut out = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    out.push(CMat::from_fn(rows, cols, |i, j| {
                        let e = &entries[i * cols + j];
                        if e.h.is_empty() {
                            C64::new(0.0, 0.0)
                        } else {
                            e.h[a * e.nvars() + b]
                        }
                    }));
                }
            }
            out
        } else {
            Vec::new()
        };
        MatJet { v, d, h, order }
    }

    pub fn entry(&self, i: usize, j: usize) -> Jet {
        Jet {
            v: self.v[(i, j)],
            d: self.d.iter().map(|m| m[(i, j)]).collect(),
            h: self.h.iter().map(|m| m[(i, j)]).collect(),
            order: self.order,
        }
    }

    /// Applies a real-linear map to the value and every derivative.
    pub fn map_linear<F: Fn(&CMat) -> CMat>(&self, f: F) -> MatJet {
        MatJet {
            v: f(&self.v),
            d: self.d.iter().map(&f).collect(),
            h: self.h.iter().map(&f).collect(),
            order: self.order,
        }
    }

    pub fn add(&self, o: &MatJet) -> MatJet {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &MatJet) -> MatJet {
        self.zip(o, |a, b| a - b)
    }

    fn zip<F: Fn(&CMat, &CMat) -> CMat>(&self, o: &MatJet, f: F) -> MatJet {
        let n = self.nvars().max(o.nvars());
        let order = self.order.min(o.order);
        let d = if order >= 1 && !(self.d.is_empty() && o.d.is_empty()) {
            (0..n).map(|i| f(&self.grad(i), &o.grad(i))).collect()
        } else {
            Vec::new()
        };
        let h = if order >= 2 && !(self.h.is_empty() && o.h.is_empty()) {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(f(&self.hess(i, j), &o.hess(i, j)));
                }
            }
            out
        } else {
            Vec::new()
        };
        MatJet { v: f(&self.v, &o.v), d, h, order }
    }

    pub fn mul(&self, o: &MatJet) -> MatJet {
        let n = self.nvars().max(o.nvars());
        let order = self.order.min(o.order);
        let v = &self.v * &o.v;
        let d = if order >= 1 && !(self.d.is_empty() && o.d.is_empty()) {
            (0..n)
                .map(|i| &self.grad(i) * &o.v + &self.v * &o.grad(i))
                .collect()
        } else {
            Vec::new()
        };
        let h = if order >= 2 && n > 0 && (!self.d.is_empty() || !o.d.is_empty()) {
            let mut out = Vec::with_capacity(n * n);
            let ga: Vec<CMat> = (0..n).map(|i| self.grad(i)).collect();
            let gb: Vec<CMat> = (0..n).map(|i| o.grad(i)).collect();
            for i in 0..n {
                for j in 0..n {
                    out.push(
                        &self.hess(i, j) * &o.v
                            + &ga[i] * &gb[j]
                            + &ga[j] * &gb[i]
                            + &self.v * &o.hess(i, j),
                    );
                }
            }
            out
        } else {
            Vec::new()
        };
        MatJet { v, d, h, order }
    }

    pub fn mul_const_left(&self, m: &CMat) -> MatJet {
        self.map_linear(|x| m * x)
    }

    pub fn mul_const_right(&self, m: &CMat) -> MatJet {
        self.map_linear(|x| x * m)
    }

    pub fn scale(&self, s: C64) -> MatJet {
        self.map_linear(|x| x * s)
    }

    pub fn scale_jet(&self, s: &Jet) -> MatJet {
        let n = self.nvars().max(s.nvars());
        let order = self.order.min(s.order);
        let v = &self.v * s.v;
        let d = if order >= 1 && !(self.d.is_empty() && s.d.is_empty()) {
            (0..n).map(|i| &self.grad(i) * s.v + &self.v * s.grad(i)).collect()
        } else {
            Vec::new()
        };
        let h = if order >= 2 && n > 0 && (!self.d.is_empty() || !s.d.is_empty()) {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(
                        &self.hess(i, j) * s.v
                            + &self.grad(i) * s.grad(j)
                            + &self.grad(j) * s.grad(i)
                            + &self.v * s.hess(i, j),
                    );
                }
            }
            out
        } else {
            Vec::new()
        };
        MatJet { v, d, h, order }
    }

    pub fn adjoint(&self) -> MatJet {
        self.map_linear(|x| x.adjoint())
    }

    pub fn transpose(&self) -> MatJet {
        self.map_linear(|x| x.transpose())
    }

    pub fn inverse(&self) -> Result<MatJet> {
        let inv = crate::linalg::inverse(&self.v)?;
        let n = self.nvars();
        let d: Vec<CMat> = if self.order >= 1 && !self.d.is_empty() {
            self.d.iter().map(|di| -(&inv * di * &inv)).collect()
        } else {
            Vec::new()
        };
        let h = if self.order >= 2 && n > 0 && !self.d.is_empty() {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let di = self.grad(i);
                    let dj = self.grad(j);
                    let t = &di * &inv * &dj + &dj * &inv * &di - self.hess(i, j);
                    out.push(&inv * t * &inv);
                }
            }
            out
        } else {
            Vec::new()
        };
        Ok(MatJet { v: inv, d, h, order: self.order })
    }

    /// Sub-block with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> MatJet {
        let pick = |m: &CMat| CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
        self.map_linear(pick)
    }

    pub fn trace(&self) -> Jet {
        Jet {
            v: self.v.trace(),
            d: self.d.iter().map(|m| m.trace()).collect(),
            h: self.h.iter().map(|m| m.trace()).collect(),
            order: self.order,
        }
    }

    pub fn kron(&self, o: &MatJet) -> MatJet {
        let n = self.nvars().max(o.nvars());
        let order = self.order.min(o.order);
        let v = self.v.kronecker(&o.v);
        let d = if order >= 1 && !(self.d.is_empty() && o.d.is_empty()) {
            (0..n)
                .map(|i| self.grad(i).kronecker(&o.v) + self.v.kronecker(&o.grad(i)))
                .collect()
        } else {
            Vec::new()
        };
        let h = if order >= 2 && n > 0 && (!self.d.is_empty() || !o.d.is_empty()) {
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(
                        self.hess(i, j).kronecker(&o.v)
                            + self.grad(i).kronecker(&o.grad(j))
                            + self.grad(j).kronecker(&o.grad(i))
                            + self.v.kronecker(&o.hess(i, j)),
                    );
                }
            }
            out
        } else {
            Vec::new()
        };
        MatJet { v, d, h, order }
    }

    /// Determinant via the division-free characteristic polynomial over jets.
    pub fn det(&self) -> Jet {
        let n = self.rows();
        let entries: Vec<Jet> = (0..n * n).map(|k| self.entry(k / n, k % n)).collect();
        crate::invariants::charpoly::determinant(&entries, n)
    }

    pub fn truncate(&self, order: u8) -> MatJet {
        let mut out = self.clone();
        if order < 2 {
            out.h.clear();
        }
        if order < 1 {
            out.d.clear();
        }
        out.order = self.order.min(order);
        out
    }

    /// Places this block at (r0, c0) inside a zero matrix of the given shape.
    pub fn embed(&self, rows: usize, cols: usize, r0: usize, c0: usize) -> MatJet {
        self.map_linear(|m| {
            let mut out = CMat::zeros(rows, cols);
            out.view_mut((r0, c0), (m.nrows(), m.ncols())).copy_from(m);
            out
        })
    }

    /// Matrix exponential by scaling and squaring of a Taylor polynomial.
    pub fn exp(&self) -> MatJet {
        let n = self.rows();
        let nv = crate::linalg::norm(&self.v);
        let squarings = if nv > 0.5 { (nv / 0.5).log2().ceil() as i32 } else { 0 };
        let x = self.scale(c(0.5f64.powi(squarings)));
        let mut term = MatJet::constant(CMat::identity(n, n));
        let mut sum = term.clone();
        for k in 1..=18 {
            term = term.mul(&x).scale(c(1.0 / k as f64));
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Mercator series log(I + y); fails when ‖y‖ ≥ 1.
    pub fn log(&self) -> Result<MatJet> {
        let n = self.rows();
        let y = self.sub(&MatJet::constant(CMat::identity(n, n)));
        let ny = crate::linalg::norm(&y.v);
        if ny >= 1.0 {
            return Err(Error::LogDivergence { norm: ny });
        }
        let mut power = y.clone();
        let mut out = y.clone();
        let mut k = 1usize;
        while ny.powi(k as i32) > 1e-17 && k < 2000 {
            power = power.mul(&y);
            k += 1;
            let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
            out = out.add(&power.scale(c(sign / k as f64)));
        }
        Ok(out)
    }

    /// The partial derivative in variable `i`, one order lower.
    pub fn partial(&self, i: usize) -> Result<MatJet> {
        if self.order < 1 {
            return Err(Error::DerivativeUnavailable { requested: 1, available: 0 });
        }
        let n = self.nvars();
        let d = if self.order >= 2 && !self.h.is_empty() {
            (0..n).map(|j| self.hess(i, j)).collect()
        } else {
            Vec::new()
        };
        let order = if self.order == EXACT { EXACT } else { self.order - 1 };
        Ok(MatJet { v: self.grad(i), d, h: Vec::new(), order })
    }
}

/// Helper: a real constant jet matrix from a plain matrix.
pub fn constant(m: &CMat) -> MatJet {
    MatJet::constant(m.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_exp_log_jets_match_plain() {
        let v = Jet::vars(&[0.3, -0.4], 2);
        let z = Jet::real(0.0);
        let x = MatJet::from_entries(2, 2, &[v[0].clone(), v[1].clone(), z.clone(), v[0].scale(c(-1.0))]);
        let e = x.exp();
        assert!(crate::linalg::dist(&e.v, &x.v.exp()) < 1e-13);
        let back = e.log().unwrap();
        assert!(crate::linalg::dist(&back.v, &x.v) < 1e-12);
        for i in 0..2 {
            assert!(crate::linalg::dist(&back.grad(i), &x.grad(i)) < 1e-11);
        }
        // d/dx exp at a diagonal-plus-nilpotent point against finite differences.
        let h = 1e-6;
        let plus = crate::linalg::from_real(&[&[0.3 + h, -0.4], &[0.0, -0.3 - h]]).exp();
        let minus = crate::linalg::from_real(&[&[0.3 - h, -0.4], &[0.0, -0.3 + h]]).exp();
        let fd = (plus - minus) / c(2.0 * h);
        assert!(crate::linalg::dist(&fd, &e.grad(0)) < 1e-8);
    }

    #[test]
    fn product_rule_second_order() {
        // f(x, y) = x^2 y at (2, 3)
        let v = Jet::vars(&[2.0, 3.0], 2);
        let f = &(&v[0] * &v[0]) * &v[1];
        assert!((f.v.re - 12.0).abs() < 1e-14);
        assert!((f.grad(0).re - 12.0).abs() < 1e-14);
        assert!((f.grad(1).re - 4.0).abs() < 1e-14);
        assert!((f.hess(0, 0).re - 6.0).abs() < 1e-14);
        assert!((f.hess(0, 1).re - 4.0).abs() < 1e-14);
        assert!(f.hess(1, 1).re.abs() < 1e-14);
    }

    #[test]
    fn quotient_and_sqrt_match_closed_forms() {
        let v = Jet::vars(&[0.7], 2);
        let f = Jet::real(1.0).div(&v[0]).sqrt();
        let x: f64 = 0.7;
        assert!((f.grad(0).re + 0.5 * x.powf(-1.5)).abs() < 1e-12);
        assert!((f.hess(0, 0).re - 0.75 * x.powf(-2.5)).abs() < 1e-12);
    }

    #[test]
    fn matrix_inverse_derivative() {
        let v = Jet::vars(&[0.3, -0.2], 2);
        let one = Jet::real(1.0);
        let m = MatJet::from_entries(2, 2, &[one.clone(), v[0].clone(), v[1].clone(), one]);
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        for i in 0..2 {
            assert!(crate::linalg::norm(&prod.grad(i)) < 1e-13);
            for j in 0..2 {
                assert!(crate::linalg::norm(&prod.hess(i, j)) < 1e-13);
            }
        }
    }
}
