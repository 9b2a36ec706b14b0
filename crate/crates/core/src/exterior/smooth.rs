//! Smooth maps ℝᵐ → matrices with first and second derivatives.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::jet::{Jet, MatJet, EXACT};
use crate::linalg::{c, dist, CMat, C64};

pub type JetFn = Arc<dyn Fn(&[Jet]) -> Result<MatJet> + Send + Sync>;
pub type PlainFn = Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>;

/// Step for the central-difference fallback.
pub const FD_STEP: f64 = 1e-5;
const FD_STEP_2: f64 = 1e-4;

/// Multivariate polynomial with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub nvars: usize,
    pub terms: Vec<(Vec<u32>, C64)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, v: C64) -> Self {
        Poly { nvars, terms: vec![(vec![0; nvars], v)] }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly { nvars, terms: vec![(e, c(1.0))] }
    }

    /// Random real-coefficient polynomial of total degree ≤ `degree`.
    pub fn random<R: Rng>(nvars: usize, degree: u32, rng: &mut R) -> Self {
        let mut terms = Vec::new();
        let mut exps = vec![vec![0u32; nvars]];
        for _ in 0..degree {
            let mut next = Vec::new();
            for e in &exps {
                for i in 0..nvars {
                    let mut f = e.clone();
                    f[i] += 1;
                    if !next.contains(&f) {
                        next.push(f);
                    }
                }
            }
            for e in &next {
                if !exps.contains(e) {
                    exps.push(e.clone());
                }
            }
        }
        for e in exps {
            terms.push((e, c(rng.random_range(-1.0..1.0))));
        }
        Poly { nvars, terms }
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] > 0)
            .map(|(e, a)| {
                let mut f = e.clone();
                f[i] -= 1;
                (f, a * c(e[i] as f64))
            })
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Poly { nvars: self.nvars, terms }
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, a)| (e.clone(), a * s)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (e, a) in &self.terms {
            for (f, b) in &o.terms {
                let g: Vec<u32> = e.iter().zip(f).map(|(x, y)| x + y).collect();
                terms.push((g, a * b));
            }
        }
        Poly { nvars: self.nvars, terms }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, a)| a * e.iter().zip(x).map(|(k, v)| v.powi(*k as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_jet(&self, x: &[Jet]) -> Jet {
        let mut out = Jet::constant(c(0.0));
        for (e, a) in &self.terms {
            let mut mono = Jet::constant(*a);
            for (k, v) in e.iter().zip(x) {
                for _ in 0..*k {
                    mono = &mono * v;
                }
            }
            out = &out + &mono;
        }
        out
    }
}

#[derive(Clone)]
enum MapKind {
    Jet(JetFn),
    Poly(Vec<Poly>),
    FiniteDiff(PlainFn),
}

/// A smooth map ℝᵐ → ℂ^{rows×cols}.
#[derive(Clone)]
pub struct SmoothMap {
    pub arity: usize,
    pub rows: usize,
    pub cols: usize,
    kind: MapKind,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            MapKind::Jet(_) => "jet",
            MapKind::Poly(_) => "poly",
            MapKind::FiniteDiff(_) => "finite-difference",
        };
        write!(f, "SmoothMap({}→{}x{}, {kind})", self.arity, self.rows, self.cols)
    }
}

impl SmoothMap {
    pub fn from_jet_fn(arity: usize, rows: usize, cols: usize, f: JetFn) -> Self {
        SmoothMap { arity, rows, cols, kind: MapKind::Jet(f) }
    }

    pub fn scalar<F>(arity: usize, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    {
        let f: JetFn = Arc::new(move |x: &[Jet]| Ok(MatJet::from_entries(1, 1, &[f(x)])));
        Self::from_jet_fn(arity, 1, 1, f)
    }

    /// Entries in row-major order.
    pub fn poly(rows: usize, cols: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for {rows}x{cols}", entries.len())));
        }
        let arity = entries.first().map_or(0, |p| p.nvars);
        Ok(SmoothMap { arity, rows, cols, kind: MapKind::Poly(entries) })
    }

    /// Black-box map differentiated by central differences.
    pub fn finite_difference(arity: usize, rows: usize, cols: usize, f: PlainFn) -> Self {
        SmoothMap { arity, rows, cols, kind: MapKind::FiniteDiff(f) }
    }

    pub fn constant(arity: usize, m: CMat) -> Self {
        let (rows, cols) = m.shape();
        let f: JetFn = Arc::new(move |_x: &[Jet]| Ok(MatJet::constant(m.clone())));
        Self::from_jet_fn(arity, rows, cols, f)
    }

    pub fn polys(&self) -> Option<&[Poly]> {
        match &self.kind {
            MapKind::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64], order: u8) -> Result<MatJet> {
        if x.len() != self.arity {
            return Err(Error::DimensionMismatch(format!("point of length {} for arity {}", x.len(), self.arity)));
        }
        match &self.kind {
            MapKind::Jet(f) => f(&Jet::vars(x, order)),
            MapKind::Poly(ps) => {
                let vars = Jet::vars(x, order);
                let entries: Vec<Jet> = ps.iter().map(|p| p.eval_jet(&vars)).collect();
                let mut out = MatJet::from_entries(self.rows, self.cols, &entries);
                out.order = order;
                Ok(out)
            }
            MapKind::FiniteDiff(f) => self.finite_difference_jet(f, x, order),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<CMat> {
        Ok(self.eval(x, 0)?.v)
    }

    fn finite_difference_jet(&self, f: &PlainFn, x: &[f64], order: u8) -> Result<MatJet> {
        if order > 2 && order != EXACT {
            return Err(Error::DerivativeUnavailable { requested: order, available: 2 });
        }
        let n = self.arity;
        let shifted = |steps: &[(usize, f64)]| {
            let mut y = x.to_vec();
            for (i, s) in steps {
                y[*i] += s;
            }
            f(&y)
        };
        let v = f(x);
        let mut out = MatJet { v: v.clone(), d: Vec::new(), h: Vec::new(), order: order.min(2) };
        if order >= 1 {
            let h = FD_STEP;
            out.d = (0..n)
                .map(|i| (shifted(&[(i, h)]) - shifted(&[(i, -h)])) / c(2.0 * h))
                .collect();
        }
        if order >= 2 {
            let h = FD_STEP_2;
            let mut hess = vec![CMat::zeros(self.rows, self.cols); n * n];
            for i in 0..n {
                for j in i..n {
                    let val = if i == j {
                        (shifted(&[(i, h)]) - &v * c(2.0) + shifted(&[(i, -h)])) / c(h * h)
                    } else {
                        (shifted(&[(i, h), (j, h)]) - shifted(&[(i, h), (j, -h)]) - shifted(&[(i, -h), (j, h)])
                            + shifted(&[(i, -h), (j, -h)]))
                            / c(4.0 * h * h)
                    };
                    hess[i * n + j] = val.clone();
                    hess[j * n + i] = val;
                }
            }
            out.h = hess;
        }
        Ok(out)
    }

    /// max_i ‖∂_i (forward mode) − central difference‖ at `x`.
    pub fn derivative_consistency(&self, x: &[f64]) -> Result<f64> {
        let jet = self.eval(x, 1)?;
        let mut worst = 0.0f64;
        for i in 0..self.arity {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += FD_STEP;
            m[i] -= FD_STEP;
            let fd = (self.value(&p)? - self.value(&m)?) / c(2.0 * FD_STEP);
            worst = worst.max(dist(&fd, &jet.grad(i)));
        }
        Ok(worst)
    }
}
