//! Schubert classes of Gr(k, n) with exact integer coefficients; products by Pieri and
//! Jacobi–Trudi (Giambelli for special classes).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition inside the k × (n − k) box, parts weakly decreasing, no zero parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BoxPartition(pub Vec<usize>);

impl BoxPartition {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts.retain(|&p| p > 0);
        BoxPartition(parts)
    }

    pub fn empty() -> Self {
        BoxPartition(Vec::new())
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn fits(&self, k: usize, width: usize) -> bool {
        self.0.len() <= k && self.0.iter().all(|&p| p <= width)
    }

    /// The complement (width − λ_{k+1−i}) in the k × width box.
    pub fn complement(&self, k: usize, width: usize) -> Self {
        BoxPartition::new((0..k).map(|i| width - self.part(k - 1 - i)).collect())
    }

    /// σ₂₁-style label.
    pub fn label(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let sep = if self.0.iter().any(|&p| p > 9) { "," } else { "" };
        self.0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(sep)
    }
}

/// All partitions in the k × width box.
pub fn partitions_in_box(k: usize, width: usize) -> Vec<BoxPartition> {
    fn rec(k: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<BoxPartition>) {
        out.push(BoxPartition::new(prefix.clone()));
        if prefix.len() == k {
            return;
        }
        for p in 1..=max {
            prefix.push(p);
            rec(k, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, width, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| b.cmp(a)));
    out
}

/// Gr(k, n), the compact dual of SU(k, n − k)/S(U(k) × U(n − k)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grassmannian {
    pub k: usize,
    pub n: usize,
}

impl Grassmannian {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::UnsupportedSpace(format!("Gr({k},{n})")));
        }
        Ok(Grassmannian { k, n })
    }

    pub fn width(&self) -> usize {
        self.n - self.k
    }

    pub fn dim(&self) -> usize {
        self.k * self.width()
    }

    pub fn top(&self) -> BoxPartition {
        BoxPartition::new(vec![self.width(); self.k])
    }

    pub fn basis(&self) -> Vec<BoxPartition> {
        partitions_in_box(self.k, self.width())
    }
}

/// An integer combination of Schubert classes σ_λ.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchubertClass {
    pub space: Grassmannian,
    pub coeffs: BTreeMap<BoxPartition, i64>,
}

impl fmt::Debug for SchubertClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.coeffs.iter().map(|(p, c)| format!("{c}σ{}", p.label())).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn checked_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn checked_mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

impl SchubertClass {
    pub fn zero(space: Grassmannian) -> Self {
        SchubertClass { space, coeffs: BTreeMap::new() }
    }

    pub fn one(space: Grassmannian) -> Self {
        Self::sigma(space, BoxPartition::empty())
    }

    /// σ_λ, zero when λ leaves the box.
    pub fn sigma(space: Grassmannian, lambda: BoxPartition) -> Self {
        let mut out = Self::zero(space);
        if lambda.fits(space.k, space.width()) {
            out.coeffs.insert(lambda, 1);
        }
        out
    }

    /// The special class σ_r.
    pub fn special(space: Grassmannian, r: usize) -> Self {
        Self::sigma(space, BoxPartition::new(vec![r]))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, lambda: &BoxPartition) -> i64 {
        self.coeffs.get(lambda).copied().unwrap_or(0)
    }

    fn add_term(&mut self, lambda: BoxPartition, c: i64) -> Result<()> {
        let entry = self.coeffs.entry(lambda.clone()).or_insert(0);
        *entry = checked_add(*entry, c)?;
        if *entry == 0 {
            self.coeffs.remove(&lambda);
        }
        Ok(())
    }

    fn check_box(&self, o: &SchubertClass) -> Result<()> {
        if self.space != o.space {
            return Err(Error::BoxMismatch(self.space.k, self.space.n, o.space.k, o.space.n));
        }
        Ok(())
    }

    pub fn add(&self, o: &SchubertClass) -> Result<SchubertClass> {
        self.check_box(o)?;
        let mut out = self.clone();
        for (p, c) in &o.coeffs {
            out.add_term(p.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: i64) -> Result<SchubertClass> {
        let mut out = Self::zero(self.space);
        for (p, c) in &self.coeffs {
            out.add_term(p.clone(), checked_mul(*c, s)?)?;
        }
        Ok(out)
    }

    /// Component of degree d (partitions of size d).
    pub fn homogeneous(&self, d: usize) -> SchubertClass {
        let coeffs = self.coeffs.iter().filter(|(p, _)| p.size() == d).map(|(p, c)| (p.clone(), *c)).collect();
        SchubertClass { space: self.space, coeffs }
    }

    /// Degree of each term, or None for the zero class / mixed degrees.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.coeffs.keys().map(|p| p.size());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}

/// Horizontal strips of size r added to λ inside the box.
fn horizontal_strips(lambda: &BoxPartition, r: usize, k: usize, width: usize) -> Vec<BoxPartition> {
    let mut out = Vec::new();
    let mut parts: Vec<usize> = (0..k).map(|i| lambda.part(i)).collect();
    fn rec(i: usize, left: usize, lambda: &BoxPartition, width: usize, parts: &mut Vec<usize>, out: &mut Vec<BoxPartition>) {
        if i == parts.len() {
            if left == 0 {
                out.push(BoxPartition::new(parts.clone()));
            }
            return;
        }
        let cap = if i == 0 { width } else { lambda.part(i - 1) };
        let base = lambda.part(i);
        for add in 0..=left.min(cap.saturating_sub(base)) {
            parts[i] = base + add;
            rec(i + 1, left - add, lambda, width, parts, out);
        }
        parts[i] = base;
    }
    rec(0, r, lambda, width, &mut parts, &mut out);
    out
}

/// cls · σ_r by the Pieri rule, truncated to the box.
pub fn pieri_multiply(cls: &SchubertClass, r: usize) -> Result<SchubertClass> {
    let space = cls.space;
    let mut out = SchubertClass::zero(space);
    if r > space.width() {
        return Ok(out);
    }
    for (lambda, c) in &cls.coeffs {
        for mu in horizontal_strips(lambda, r, space.k, space.width()) {
            out.add_term(mu, *c)?;
        }
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            // Inserting the largest element before (len − pos) entries adds that many inversions.
            let s = if (perm.len() - pos) % 2 == 0 { sign } else { -sign };
            out.push((p, s));
        }
    }
    out
}

/// a · σ_μ with σ_μ = det(σ_{μ_i − i + j}) expanded over permutations.
pub fn multiply_by_sigma(a: &SchubertClass, mu: &BoxPartition) -> Result<SchubertClass> {
    let len = mu.0.len();
    let mut out = SchubertClass::zero(a.space);
    'perm: for (perm, sign) in permutations(len) {
        let mut acc = a.clone();
        for (i, &j) in perm.iter().enumerate() {
            let index = mu.0[i] as i64 - i as i64 + j as i64;
            if index < 0 {
                continue 'perm;
            }
            acc = pieri_multiply(&acc, index as usize)?;
            if acc.is_zero() {
                continue 'perm;
            }
        }
        out = out.add(&acc.scale(sign)?)?;
    }
    Ok(out)
}

pub fn ring_multiply(a: &SchubertClass, b: &SchubertClass) -> Result<SchubertClass> {
    a.check_box(b)?;
    let mut out = SchubertClass::zero(a.space);
    for (mu, c) in &b.coeffs {
        out = out.add(&multiply_by_sigma(a, mu)?.scale(*c)?)?;
    }
    Ok(out)
}

pub fn power(a: &SchubertClass, e: usize) -> Result<SchubertClass> {
    (0..e).try_fold(SchubertClass::one(a.space), |acc, _| ring_multiply(&acc, a))
}

/// ∫ a = coefficient of the full-box class.
pub fn integrate_class(a: &SchubertClass) -> i64 {
    a.coefficient(&a.space.top())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> BoxPartition {
        BoxPartition::new(parts.to_vec())
    }

    fn gr(k: usize, n: usize) -> Grassmannian {
        Grassmannian::new(k, n).unwrap()
    }

    #[test]
    fn pieri_examples() {
        let g = gr(2, 4);
        let s1 = SchubertClass::special(g, 1);
        let sq = pieri_multiply(&s1, 1).unwrap();
        let expect = SchubertClass::sigma(g, p(&[2])).add(&SchubertClass::sigma(g, p(&[1, 1]))).unwrap();
        assert_eq!(sq, expect);
        let s21 = SchubertClass::sigma(g, p(&[2, 1]));
        assert_eq!(pieri_multiply(&s21, 1).unwrap(), SchubertClass::sigma(g, p(&[2, 2])));
        for lam in g.basis() {
            let s = SchubertClass::sigma(g, lam);
            assert_eq!(pieri_multiply(&s, 0).unwrap(), s);
        }
    }

    #[test]
    fn ring_examples() {
        let g = gr(2, 4);
        let s11 = SchubertClass::sigma(g, p(&[1, 1]));
        let s2 = SchubertClass::special(g, 2);
        assert!(ring_multiply(&s11, &s2).unwrap().is_zero());
        let s1 = SchubertClass::special(g, 1);
        let one = SchubertClass::one(g);
        assert_eq!(ring_multiply(&s1, &one).unwrap(), s1);
        let sq = ring_multiply(&s1, &s1).unwrap();
        assert_eq!(ring_multiply(&sq, &s1).unwrap(), ring_multiply(&s1, &sq).unwrap());
        assert_eq!(integrate_class(&power(&s1, 4).unwrap()), 2);
        assert_eq!(integrate_class(&SchubertClass::sigma(g, g.top())), 1);
        assert_eq!(integrate_class(&sq), 0);
        assert!(matches!(ring_multiply(&s1, &SchubertClass::special(gr(1, 3), 1)), Err(Error::BoxMismatch(2, 4, 1, 3))));
    }

    #[test]
    fn box_enumeration_counts_binomials() {
        for n in 2..=6 {
            for k in 1..n {
                let expect = (1..=k).fold(1usize, |acc, i| acc * (n - k + i) / i);
                assert_eq!(gr(k, n).basis().len(), expect);
            }
        }
    }

    #[test]
    fn poincare_duality_in_small_boxes() {
        for n in 2..=6 {
            for k in 1..n {
                let g = gr(k, n);
                if k > 3 || g.width() > 3 {
                    continue;
                }
                let basis = g.basis();
                for a in &basis {
                    for b in &basis {
                        if a.size() + b.size() != g.dim() {
                            continue;
                        }
                        let prod = ring_multiply(&SchubertClass::sigma(g, a.clone()), &SchubertClass::sigma(g, b.clone())).unwrap();
                        let expect = i64::from(*b == a.complement(k, g.width()));
                        assert_eq!(integrate_class(&prod), expect, "{a:?} {b:?} in Gr({k},{n})");
                    }
                }
            }
        }
    }
}
