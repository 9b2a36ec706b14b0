//! Chern classes of tautological and tangent bundles on Grassmannians via Chern roots,
//! Chern numbers, and the generation check for the cohomology ring.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

use super::schubert::{integrate_class, power, ring_multiply, BoxPartition, Grassmannian, SchubertClass};

/// Supported compact duals: P^n = Gr(1, n + 1) and Gr(k, n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Space {
    Projective(usize),
    Grassmannian(usize, usize),
}

impl Space {
    pub fn grassmannian(&self) -> Result<Grassmannian> {
        match *self {
            Space::Projective(n) => Grassmannian::new(1, n + 1),
            Space::Grassmannian(k, n) => Grassmannian::new(k, n),
        }
    }
}

impl FromStr for Space {
    type Err = Error;

    /// "p:n" or "gr:k,n".
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnsupportedSpace(s.to_string());
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<usize> = args.split(',').map(|a| a.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let space = match (kind, nums.as_slice()) {
            ("p", [n]) if *n >= 1 => Space::Projective(*n),
            ("gr", [k, n]) => Space::Grassmannian(*k, *n),
            _ => return Err(bad()),
        };
        space.grassmannian()?;
        Ok(space)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Projective(n) => write!(f, "p:{n}"),
            Space::Grassmannian(k, n) => write!(f, "gr:{k},{n}"),
        }
    }
}

/// Homogeneous bundles on Gr(k, n): tangent S^∨ ⊗ Q, tautological S, quotient Q, and S^∨.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Bundle {
    Tangent,
    Sub,
    SubDual,
    Quotient,
}

impl FromStr for Bundle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tangent" | "T" => Ok(Bundle::Tangent),
            "sub" | "S" => Ok(Bundle::Sub),
            "sub-dual" | "S*" => Ok(Bundle::SubDual),
            "quotient" | "Q" => Ok(Bundle::Quotient),
            other => Err(Error::Invalid(format!("unknown bundle {other}"))),
        }
    }
}

/// Integer polynomial in the Chern roots x₁…x_k of S and y₁…y_{n−k} of Q.
#[derive(Clone, Debug, Default, PartialEq)]
struct RootPoly {
    terms: BTreeMap<Vec<u32>, i64>,
}

impl RootPoly {
    fn constant(nvars: usize, c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(vec![0; nvars], c);
        }
        RootPoly { terms }
    }

    fn linear(nvars: usize, coeffs: &[(usize, i64)], c: i64) -> Self {
        let mut out = Self::constant(nvars, c);
        for &(i, a) in coeffs {
            let mut e = vec![0; nvars];
            e[i] = 1;
            out.terms.insert(e, a);
        }
        out
    }

    fn add_term(&mut self, e: Vec<u32>, c: i64) -> Result<()> {
        let entry = self.terms.entry(e.clone()).or_insert(0);
        *entry = entry.checked_add(c).ok_or(Error::Overflow)?;
        if *entry == 0 {
            self.terms.remove(&e);
        }
        Ok(())
    }

    fn mul(&self, o: &RootPoly) -> Result<RootPoly> {
        let mut out = RootPoly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.checked_mul(*cb).ok_or(Error::Overflow)?)?;
            }
        }
        Ok(out)
    }

    fn truncate(&self, max_degree: u32) -> RootPoly {
        let terms = self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() <= max_degree).map(|(e, c)| (e.clone(), *c)).collect();
        RootPoly { terms }
    }
}

/// Elementary symmetric polynomial e_r in the variables `block` of an nvars-variable ring.
fn elementary(nvars: usize, block: &[usize], r: usize) -> RootPoly {
    let mut out = RootPoly::default();
    fn rec(start: usize, r: usize, block: &[usize], e: &mut Vec<u32>, out: &mut RootPoly) {
        if r == 0 {
            out.terms.insert(e.clone(), 1);
            return;
        }
        for i in start..block.len() {
            e[block[i]] += 1;
            rec(i + 1, r - 1, block, e, out);
            e[block[i]] -= 1;
        }
    }
    rec(0, r, block, &mut vec![0; nvars], &mut out);
    out
}

/// Rewrites a polynomial symmetric in each block as Σ c · Π e_r(x)^{a_r} Π e_s(y)^{b_s};
/// keys list the exponents of e_1(x)…e_k(x), e_1(y)…e_m(y).
fn to_elementary(poly: &RootPoly, k: usize, m: usize) -> Result<BTreeMap<Vec<u32>, i64>> {
    let nvars = k + m;
    let xs: Vec<usize> = (0..k).collect();
    let ys: Vec<usize> = (k..nvars).collect();
    let ex: Vec<RootPoly> = (0..=k).map(|r| elementary(nvars, &xs, r)).collect();
    let ey: Vec<RootPoly> = (0..=m).map(|r| elementary(nvars, &ys, r)).collect();
    let mut rest = poly.clone();
    let mut out = BTreeMap::new();
    while let Some((lead, &c)) = rest.terms.iter().next_back() {
        let lead = lead.clone();
        let block_exps = |range: std::ops::Range<usize>| -> Result<Vec<u32>> {
            let e = &lead[range];
            if e.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::PreconditionFailed("polynomial is not block-symmetric".into()));
            }
            Ok((0..e.len()).map(|i| e[i] - e.get(i + 1).copied().unwrap_or(0)).collect())
        };
        let mut key = block_exps(0..k)?;
        key.extend(block_exps(k..nvars)?);
        let mut mono = RootPoly::constant(nvars, c);
        for (r, &a) in key[..k].iter().enumerate() {
            for _ in 0..a {
                mono = mono.mul(&ex[r + 1])?;
            }
        }
        for (s, &b) in key[k..].iter().enumerate() {
            for _ in 0..b {
                mono = mono.mul(&ey[s + 1])?;
            }
        }
        for (e, v) in mono.terms {
            rest.add_term(e, -v)?;
        }
        out.insert(key, c);
    }
    Ok(out)
}

/// c_r(S) = (−1)^r σ_{1^r}, c_s(Q) = σ_s.
fn tautological_classes(g: Grassmannian) -> Result<(Vec<SchubertClass>, Vec<SchubertClass>)> {
    let sub = (0..=g.k)
        .map(|r| SchubertClass::sigma(g, BoxPartition::new(vec![1; r])).scale(if r % 2 == 0 { 1 } else { -1 }))
        .collect::<Result<_>>()?;
    let quot = (0..=g.width()).map(|s| SchubertClass::special(g, s)).collect();
    Ok((sub, quot))
}

fn roots_product(g: Grassmannian, bundle: Bundle) -> Result<RootPoly> {
    let (k, m) = (g.k, g.width());
    let nvars = k + m;
    let mut out = RootPoly::constant(nvars, 1);
    match bundle {
        Bundle::Tangent => {
            for i in 0..k {
                for j in 0..m {
                    out = out.mul(&RootPoly::linear(nvars, &[(k + j, 1), (i, -1)], 1))?.truncate(g.dim() as u32);
                }
            }
        }
        Bundle::Sub | Bundle::SubDual => {
            let sign = if bundle == Bundle::Sub { 1 } else { -1 };
            for i in 0..k {
                out = out.mul(&RootPoly::linear(nvars, &[(i, sign)], 1))?;
            }
        }
        Bundle::Quotient => {
            for j in 0..m {
                out = out.mul(&RootPoly::linear(nvars, &[(k + j, 1)], 1))?;
            }
        }
    }
    Ok(out)
}

/// Total Chern class c(E) in the Schubert basis.
pub fn total_chern(space: Space, bundle: Bundle) -> Result<SchubertClass> {
    let g = space.grassmannian()?;
    let (sub, quot) = tautological_classes(g)?;
    let expansion = to_elementary(&roots_product(g, bundle)?, g.k, g.width())?;
    let mut out = SchubertClass::zero(g);
    for (key, c) in expansion {
        let mut term = SchubertClass::one(g);
        for (r, &a) in key[..g.k].iter().enumerate() {
            term = ring_multiply(&term, &power(&sub[r + 1], a as usize)?)?;
        }
        for (s, &b) in key[g.k..].iter().enumerate() {
            term = ring_multiply(&term, &power(&quot[s + 1], b as usize)?)?;
        }
        out = out.add(&term.scale(c)?)?;
    }
    Ok(out)
}

/// c(TĎ).
pub fn tangent_chern(space: Space) -> Result<SchubertClass> {
    total_chern(space, Bundle::Tangent)
}

pub fn chern_class(space: Space, bundle: Bundle, i: usize) -> Result<SchubertClass> {
    Ok(total_chern(space, bundle)?.homogeneous(i))
}

/// A monomial Π c_{i}(E)^{power}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChernMonomial {
    pub factors: Vec<(Bundle, usize, usize)>,
}

impl ChernMonomial {
    /// "c1^4", "c2*c1^2", "c1(Q)*c1(S)^2"; factors without a bundle use `default`.
    pub fn parse(s: &str, default: Bundle) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad monomial {s}"));
        let factors = s
            .split('*')
            .map(|f| {
                let f = f.trim();
                let (base, pow) = match f.rsplit_once('^') {
                    Some((b, p)) if !p.contains(')') => (b, p.parse::<usize>().map_err(|_| bad())?),
                    _ => (f, 1),
                };
                let body = base.strip_prefix('c').ok_or_else(bad)?;
                let (index, bundle) = match body.split_once('(') {
                    Some((i, rest)) => (i, rest.strip_suffix(')').ok_or_else(bad)?.parse()?),
                    None => (body, default),
                };
                Ok((bundle, index.parse::<usize>().map_err(|_| bad())?, pow))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChernMonomial { factors })
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(_, i, p)| i * p).sum()
    }
}

/// (Π c_i(E)^p) ∩ [Ď].
pub fn chern_number(space: Space, monomial: &ChernMonomial) -> Result<i64> {
    let g = space.grassmannian()?;
    if monomial.degree() != g.dim() {
        return Err(Error::DegreeMismatch { got: monomial.degree(), expected: g.dim() });
    }
    let mut acc = SchubertClass::one(g);
    for &(bundle, i, p) in &monomial.factors {
        acc = ring_multiply(&acc, &power(&chern_class(space, bundle, i)?, p)?)?;
    }
    Ok(integrate_class(&acc))
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationReport {
    pub space: String,
    pub generators: Vec<String>,
    /// Σ Betti numbers = number of Schubert classes.
    pub total_betti: usize,
    pub span_rank: usize,
    pub pass: bool,
}

fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, pivot);
        let inv = BigRational::one() / m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone() * &inv;
                for c in col..cols {
                    let sub = m[rank][c].clone() * &f;
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the span of all products of the generators (including 1) against the total Betti number.
pub fn generation_check_with(space: Space, generators: &[SchubertClass]) -> Result<GenerationReport> {
    let g = space.grassmannian()?;
    let basis = g.basis();
    let mut products = vec![SchubertClass::one(g)];
    let mut frontier = products.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for gen in generators {
                let prod = ring_multiply(a, gen)?;
                if !prod.is_zero() && !products.contains(&prod) {
                    products.push(prod.clone());
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }
    let rows: Vec<Vec<i64>> = products.iter().map(|p| basis.iter().map(|b| p.coefficient(b)).collect()).collect();
    let span_rank = rank(&rows);
    Ok(GenerationReport {
        space: space.to_string(),
        generators: generators.iter().map(|c| format!("{c:?}")).collect(),
        total_betti: basis.len(),
        span_rank,
        pass: span_rank == basis.len(),
    })
}

/// Generation by the Chern classes of the tautological bundles S and Q.
pub fn generation_check(space: Space) -> Result<GenerationReport> {
    let g = space.grassmannian()?;
    let mut gens = Vec::new();
    for bundle in [Bundle::Sub, Bundle::Quotient] {
        let total = total_chern(space, bundle)?;
        for d in 1..=g.dim() {
            let c = total.homogeneous(d);
            if !c.is_zero() {
                gens.push(c);
            }
        }
    }
    generation_check_with(space, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> Space {
        s.parse().unwrap()
    }

    fn sigma(space: Space, parts: &[usize]) -> SchubertClass {
        SchubertClass::sigma(space.grassmannian().unwrap(), BoxPartition::new(parts.to_vec()))
    }

    #[test]
    fn tangent_examples() {
        let p1 = sp("p:1");
        let expect = sigma(p1, &[]).add(&sigma(p1, &[1]).scale(2).unwrap()).unwrap();
        assert_eq!(tangent_chern(p1).unwrap(), expect);
        // (1 + h)³ on P².
        let p2 = sp("p:2");
        let c = tangent_chern(p2).unwrap();
        assert_eq!(c.homogeneous(1), sigma(p2, &[1]).scale(3).unwrap());
        assert_eq!(c.homogeneous(2), sigma(p2, &[2]).scale(3).unwrap());
        let g24 = sp("gr:2,4");
        assert_eq!(chern_class(g24, Bundle::Tangent, 1).unwrap(), sigma(g24, &[1]).scale(4).unwrap());
    }

    #[test]
    fn chern_numbers() {
        let mono = |s: &str| ChernMonomial::parse(s, Bundle::Tangent).unwrap();
        assert_eq!(chern_number(sp("p:1"), &mono("c1")).unwrap(), 2);
        assert_eq!(chern_number(sp("gr:2,4"), &mono("c4")).unwrap(), 6);
        assert_eq!(chern_number(sp("p:2"), &mono("c1^2")).unwrap(), 9);
        assert!(matches!(chern_number(sp("p:2"), &mono("c1")), Err(Error::DegreeMismatch { got: 1, expected: 2 })));
        assert_eq!(chern_number(sp("gr:2,4"), &ChernMonomial::parse("c1(Q)^4", Bundle::Tangent).unwrap()).unwrap(), 2);
    }

    #[test]
    fn euler_characteristic_is_binomial() {
        for (k, n) in [(1, 2), (1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (3, 6), (2, 6)] {
            let space = Space::Grassmannian(k, n);
            let g = space.grassmannian().unwrap();
            let top = ChernMonomial { factors: vec![(Bundle::Tangent, g.dim(), 1)] };
            let binom = (1..=k).fold(1i64, |acc, i| acc * (n - k + i) as i64 / i as i64);
            assert_eq!(chern_number(space, &top).unwrap(), binom, "Gr({k},{n})");
        }
    }

    #[test]
    fn generation_examples() {
        for n in 1..=4 {
            let space = Space::Projective(n);
            let h = sigma(space, &[1]);
            assert!(generation_check_with(space, &[h]).unwrap().pass);
            assert!(generation_check(space).unwrap().pass);
        }
        let g24 = sp("gr:2,4");
        let rep = generation_check_with(g24, &[sigma(g24, &[1]), sigma(g24, &[1, 1])]).unwrap();
        assert_eq!((rep.span_rank, rep.total_betti, rep.pass), (6, 6, true));
        let rep = generation_check_with(g24, &[sigma(g24, &[2])]).unwrap();
        assert!(!rep.pass && rep.span_rank < 6);
        assert!(generation_check(g24).unwrap().pass);
    }

    #[test]
    fn space_parsing() {
        assert_eq!(sp("gr:2,4"), Space::Grassmannian(2, 4));
        assert_eq!(sp("p:3").grassmannian().unwrap().n, 4);
        assert!(matches!("lg:2".parse::<Space>(), Err(Error::UnsupportedSpace(_))));
        assert!("gr:4,4".parse::<Space>().is_err());
    }
}
