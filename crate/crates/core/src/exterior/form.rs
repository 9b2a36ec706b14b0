//! Differential forms on a chart ℝᵐ with scalar or End(V) coefficients.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::MatJet;
use crate::linalg::{c, CMat, C64};

use super::smooth::SmoothMap;

/// Coefficients on every sorted multi-index at a point, with derivatives up to `order`.
pub type CoeffFn = Arc<dyn Fn(&[f64], u8) -> Result<Vec<MatJet>> + Send + Sync>;

/// Sorted q-subsets of {0..m} in lexicographic order.
pub fn multi_indices(m: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, q, &mut Vec::new(), &mut out);
    out
}

/// Sorts `idx`, returning the permutation sign, or None on a repeated index.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

fn position(indices: &[Vec<usize>], idx: &[usize]) -> usize {
    indices.iter().position(|k| k == idx).expect("sorted multi-index")
}

/// Product of two coefficient jets, treating 1×1 values as scalars.
fn product(a: &MatJet, b: &MatJet) -> MatJet {
    if a.rows() == 1 && a.cols() == 1 && b.rows() > 1 {
        b.scale_jet(&a.entry(0, 0))
    } else if b.rows() == 1 && b.cols() == 1 && a.rows() > 1 {
        a.scale_jet(&b.entry(0, 0))
    } else {
        a.mul(b)
    }
}

#[derive(Clone)]
pub struct VForm {
    pub dim: usize,
    pub degree: usize,
    /// Value matrices are rows × rows (1 for scalar forms).
    pub rows: usize,
    /// Highest derivative order the coefficients support.
    pub max_order: u8,
    coeffs: CoeffFn,
}

impl fmt::Debug for VForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VForm(dim {}, degree {}, {}x{})", self.dim, self.degree, self.rows, self.rows)
    }
}

impl VForm {
    pub fn new(dim: usize, degree: usize, rows: usize, max_order: u8, coeffs: CoeffFn) -> Self {
        VForm { dim, degree, rows, max_order, coeffs }
    }

    pub fn zero(dim: usize, degree: usize, rows: usize) -> Self {
        let count = multi_indices(dim, degree).len();
        let f: CoeffFn = Arc::new(move |_x: &[f64], _k: u8| Ok(vec![MatJet::constant(CMat::zeros(rows, rows)); count]));
        VForm::new(dim, degree, rows, 2, f)
    }

    /// Form with the given maps on selected multi-indices (unsorted indices are sorted
    /// with sign) and zero elsewhere.
    pub fn from_maps(dim: usize, degree: usize, terms: Vec<(Vec<usize>, SmoothMap)>) -> Result<Self> {
        let rows = terms.first().map_or(1, |(_, m)| m.rows);
        let indices = multi_indices(dim, degree);
        let mut placed: Vec<(usize, f64, SmoothMap)> = Vec::new();
        for (idx, map) in terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                return Err(Error::DimensionMismatch(format!("multi-index {idx:?} for degree {degree} on ℝ^{dim}")));
            }
            if map.arity != dim || map.rows != rows || map.cols != rows {
                return Err(Error::DimensionMismatch("coefficient map shape".into()));
            }
            let (sorted, sign) =
                sort_with_sign(&idx).ok_or_else(|| Error::Invalid(format!("repeated index in {idx:?}")))?;
            placed.push((position(&indices, &sorted), sign, map));
        }
        let count = indices.len();
        let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| {
            let mut out = vec![MatJet::constant(CMat::zeros(rows, rows)); count];
            for (pos, sign, map) in &placed {
                out[*pos] = out[*pos].add(&map.eval(x, k)?.scale(c(*sign)));
            }
            Ok(out)
        });
        Ok(VForm::new(dim, degree, rows, 2, f))
    }

    /// Constant coefficients on every sorted multi-index.
    pub fn constant(dim: usize, degree: usize, values: Vec<CMat>) -> Result<Self> {
        let count = multi_indices(dim, degree).len();
        if values.len() != count {
            return Err(Error::DimensionMismatch(format!("{} values for {count} multi-indices", values.len())));
        }
        let rows = values[0].nrows();
        let f: CoeffFn = Arc::new(move |_x: &[f64], _k: u8| Ok(values.iter().cloned().map(MatJet::constant).collect()));
        Ok(VForm::new(dim, degree, rows, 2, f))
    }

    /// Scalar function as a 0-form.
    pub fn function(map: SmoothMap) -> Result<Self> {
        let dim = map.arity;
        VForm::from_maps(dim, 0, vec![(Vec::new(), map)])
    }

    pub fn indices(&self) -> Vec<Vec<usize>> {
        multi_indices(self.dim, self.degree)
    }

    pub fn eval(&self, x: &[f64], order: u8) -> Result<Vec<MatJet>> {
        if order > self.max_order {
            return Err(Error::DerivativeUnavailable { requested: order, available: self.max_order });
        }
        (self.coeffs)(x, order)
    }

    pub fn values(&self, x: &[f64]) -> Result<Vec<CMat>> {
        Ok(self.eval(x, 0)?.into_iter().map(|j| j.v).collect())
    }

    /// Coefficient on an arbitrary (possibly unsorted) multi-index.
    pub fn coefficient(&self, x: &[f64], idx: &[usize]) -> Result<CMat> {
        match sort_with_sign(idx) {
            None => Ok(CMat::zeros(self.rows, self.rows)),
            Some((sorted, sign)) => {
                let vals = self.values(x)?;
                Ok(&vals[position(&self.indices(), &sorted)] * c(sign))
            }
        }
    }

    /// ω(v₁, …, v_q) = Σ_I ω_I det(v_a[I_b]).
    pub fn eval_on(&self, x: &[f64], vectors: &[Vec<f64>]) -> Result<CMat> {
        if vectors.len() != self.degree {
            return Err(Error::DimensionMismatch(format!("{} vectors for degree {}", vectors.len(), self.degree)));
        }
        let vals = self.values(x)?;
        let mut out = CMat::zeros(self.rows, self.rows);
        for (idx, val) in self.indices().iter().zip(&vals) {
            let minor = nalgebra::DMatrix::<f64>::from_fn(self.degree, self.degree, |a, b| vectors[a][idx[b]]);
            out += val * c(minor.determinant());
        }
        Ok(out)
    }

    fn check_compatible(&self, o: &VForm) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch(format!("forms on ℝ^{} and ℝ^{}", self.dim, o.dim)));
        }
        if self.rows != o.rows && self.rows != 1 && o.rows != 1 {
            return Err(Error::DimensionMismatch(format!("values {}x{} and {}x{}", self.rows, self.rows, o.rows, o.rows)));
        }
        Ok(())
    }

    pub fn add(&self, o: &VForm) -> Result<VForm> {
        self.check_compatible(o)?;
        if self.degree != o.degree || self.rows != o.rows {
            return Err(Error::DimensionMismatch("sum of forms of different type".into()));
        }
        let (a, b) = (self.clone(), o.clone());
        let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| {
            let (va, vb) = (a.eval(x, k)?, b.eval(x, k)?);
            Ok(va.iter().zip(&vb).map(|(p, q)| p.add(q)).collect())
        });
        Ok(VForm::new(self.dim, self.degree, self.rows, self.max_order.min(o.max_order), f))
    }

    pub fn sub(&self, o: &VForm) -> Result<VForm> {
        self.add(&o.scale(c(-1.0)))
    }

    pub fn scale(&self, s: C64) -> VForm {
        let a = self.clone();
        let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| Ok(a.eval(x, k)?.iter().map(|p| p.scale(s)).collect()));
        VForm::new(self.dim, self.degree, self.rows, self.max_order, f)
    }

    /// f·ω for a scalar function f.
    pub fn scale_fn(&self, f: &SmoothMap) -> Result<VForm> {
        self.wedge(&VForm::function(f.clone())?)
    }

    /// Applies a linear map to every coefficient (for example a trace or a fixed conjugation).
    pub fn map_linear<F>(&self, rows: usize, map: F) -> VForm
    where
        F: Fn(&CMat) -> CMat + Send + Sync + 'static,
    {
        let a = self.clone();
        let map = Arc::new(map);
        let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| {
            Ok(a.eval(x, k)?.iter().map(|p| p.map_linear(|m| map(m))).collect())
        });
        VForm::new(self.dim, self.degree, rows, self.max_order, f)
    }

    pub fn trace(&self) -> VForm {
        self.map_linear(1, |m| CMat::from_element(1, 1, m.trace()))
    }

    /// Exterior derivative.
    pub fn d(&self) -> VForm {
        let a = self.clone();
        let (m, q) = (self.dim, self.degree);
        let src = multi_indices(m, q);
        let dst = multi_indices(m, q + 1);
        let rows = self.rows;
        let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| {
            let base = a.eval(x, k + 1)?;
            let mut out = Vec::with_capacity(dst.len());
            for big in &dst {
                let mut acc = MatJet::constant(CMat::zeros(rows, rows));
                for (pos, &i) in big.iter().enumerate() {
                    let rest: Vec<usize> = big.iter().copied().filter(|&j| j != i).collect();
                    let term = base[position(&src, &rest)].partial(i)?;
                    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                    acc = acc.add(&term.scale(c(sign)));
                }
                out.push(acc.truncate(k));
            }
            Ok(out)
        });
        VForm::new(m, q + 1, rows, self.max_order.saturating_sub(1), f)
    }

    /// α∧β with matrix multiplication of values.
    pub fn wedge(&self, o: &VForm) -> Result<VForm> {
        self.check_compatible(o)?;
        let (p, q) = (self.degree, o.degree);
        let m = self.dim;
        let ia = multi_indices(m, p);
        let ib = multi_indices(m, q);
        let dst = multi_indices(m, p + q);
        // (target, a, b, sign) for every disjoint pair.
        let mut plan: Vec<(usize, usize, usize, f64)> = Vec::new();
        for (x, i) in ia.iter().enumerate() {
            for (y, j) in ib.iter().enumerate() {
                let mut joined = i.clone();
                joined.extend(j);
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    plan.push((position(&dst, &sorted), x, y, sign));
                }
            }
        }
        let rows = self.rows.max(o.rows);
        let (a, b) = (self.clone(), o.clone());
        let count = dst.len();
        let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| {
            let (va, vb) = (a.eval(x, k)?, b.eval(x, k)?);
            let mut out = vec![MatJet::constant(CMat::zeros(rows, rows)); count];
            for (t, i, j, sign) in &plan {
                out[*t] = out[*t].add(&product(&va[*i], &vb[*j]).scale(c(*sign)));
            }
            Ok(out)
        });
        Ok(VForm::new(m, p + q, rows, self.max_order.min(o.max_order), f))
    }

    /// [α, β] = α∧β − (−1)^{pq} β∧α.
    pub fn bracket(&self, o: &VForm) -> Result<VForm> {
        let sign = if (self.degree * o.degree).is_multiple_of(2) { -1.0 } else { 1.0 };
        self.wedge(o)?.add(&o.wedge(self)?.scale(c(sign)))
    }

    /// Interior product with a constant vector.
    pub fn contract(&self, v: &[f64]) -> Result<VForm> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("vector of length {} on ℝ^{}", v.len(), self.dim)));
        }
        let src = multi_indices(self.dim, self.degree);
        let dst = multi_indices(self.dim, self.degree - 1);
        // (target, source, weight): (i_v ω)_J = Σ_k v_k ω_{(k, J)}.
        let mut plan: Vec<(usize, usize, f64)> = Vec::new();
        for (t, j) in dst.iter().enumerate() {
            for (kk, &vk) in v.iter().enumerate() {
                if vk == 0.0 {
                    continue;
                }
                let mut joined = vec![kk];
                joined.extend(j);
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    plan.push((t, position(&src, &sorted), sign * vk));
                }
            }
        }
        let a = self.clone();
        let rows = self.rows;
        let count = dst.len();
        let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| {
            let va = a.eval(x, k)?;
            let mut out = vec![MatJet::constant(CMat::zeros(rows, rows)); count];
            for (t, s, w) in &plan {
                out[*t] = out[*t].add(&va[*s].scale(c(*w)));
            }
            Ok(out)
        });
        Ok(VForm::new(self.dim, self.degree - 1, rows, self.max_order, f))
    }

    /// Largest coefficient norm at a point.
    pub fn max_norm_at(&self, x: &[f64]) -> Result<f64> {
        Ok(self.values(x)?.iter().map(crate::linalg::norm).fold(0.0, f64::max))
    }
}

/// Ω = dω + ½[ω, ω].
pub fn curvature_form(omega: &VForm) -> Result<VForm> {
    if omega.degree != 1 {
        return Err(Error::DimensionMismatch(format!("curvature of a degree-{} form", omega.degree)));
    }
    omega.d().add(&omega.bracket(omega)?.scale(c(0.5)))
}

/// Largest discrepancy between the curvature of Σfᵢωᵢ and the combination formula.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PatchReport {
    pub max_discrepancy: f64,
    pub max_partition_residual: f64,
    pub points: usize,
}

/// Ω(Σfᵢωᵢ) = Σfᵢ Ωᵢ − ½Σ_{i<j} fᵢfⱼ[ωᵢ−ωⱼ, ωᵢ−ωⱼ] + Σ_{i<n} dfᵢ∧(ωᵢ−ωₙ), compared at points.
pub fn patch_combination_curvature(
    weights: &[SmoothMap],
    forms: &[VForm],
    points: &[Vec<f64>],
    partition_tol: f64,
) -> Result<PatchReport> {
    if weights.len() != forms.len() || forms.is_empty() {
        return Err(Error::DimensionMismatch("one weight per form required".into()));
    }
    let mut worst_partition = 0.0f64;
    for x in points {
        let total: C64 = weights.iter().map(|w| w.value(x).map(|v| v[(0, 0)])).sum::<Result<C64>>()?;
        worst_partition = worst_partition.max((total - c(1.0)).norm());
    }
    if worst_partition > partition_tol {
        return Err(Error::PartitionViolation { residual: worst_partition });
    }
    let fs: Vec<VForm> = weights.iter().map(|w| VForm::function(w.clone())).collect::<Result<_>>()?;
    let mut combined = forms[0].scale_fn(&weights[0])?;
    for (w, f) in weights.iter().zip(forms).skip(1) {
        combined = combined.add(&f.scale_fn(w)?)?;
    }
    let direct = curvature_form(&combined)?;

    let n = forms.len();
    let mut formula = curvature_form(&forms[0])?.wedge(&fs[0])?;
    for i in 1..n {
        formula = formula.add(&curvature_form(&forms[i])?.wedge(&fs[i])?)?;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = forms[i].sub(&forms[j])?;
            let term = diff.bracket(&diff)?.wedge(&fs[i])?.wedge(&fs[j])?.scale(c(-0.5));
            formula = formula.add(&term)?;
        }
    }
    for i in 0..n.saturating_sub(1) {
        let term = fs[i].d().wedge(&forms[i].sub(&forms[n - 1])?)?;
        formula = formula.add(&term)?;
    }
    let mut worst = 0.0f64;
    for x in points {
        let a = direct.values(x)?;
        let b = formula.values(x)?;
        for (p, q) in a.iter().zip(&b) {
            worst = worst.max(crate::linalg::dist(p, q));
        }
    }
    Ok(PatchReport { max_discrepancy: worst, max_partition_residual: worst_partition, points: points.len() })
}
