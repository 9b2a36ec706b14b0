//! The P⁺𝐊(ℂ)P⁻ factorization, Cayley elements and the canonical extension λ₁.

use crate::error::{Error, Result};
use crate::jet::MatJet;
use crate::lie::{Family, GroupSpec, ParabolicData};
use crate::linalg::{c, condition_number, dist, identity, norm, CMat, Subspace, C64};

use super::rep::{hc_frame, Representation};

/// Pivot condition numbers above this are treated as outside the open cell.
pub const OPEN_CELL_CONDITION: f64 = 1e12;

/// g = p⁺ · k_c · p⁻ in standard coordinates.
#[derive(Clone, Debug)]
pub struct HcDecomposition<T> {
    pub p_plus: T,
    pub k_c: T,
    pub p_minus: T,
}

/// Block Gauss factorization in the frame R: g′ = [[a, b], [c, d]] gives
/// k₂ = d, k₁ = a − b d⁻¹ c.
pub fn hc_decompose_jet(spec: &GroupSpec, g: &MatJet) -> Result<HcDecomposition<MatJet>> {
    let (frame, block) = hc_frame(spec)?;
    let frame_inv = crate::linalg::inverse(&frame)?;
    let n = spec.size();
    let gf = g.mul_const_left(&frame_inv).mul_const_right(&frame);
    let top: Vec<usize> = (0..block).collect();
    let bottom: Vec<usize> = (block..n).collect();
    let a = gf.select(&top, &top);
    let b = gf.select(&top, &bottom);
    let cc = gf.select(&bottom, &top);
    let d = gf.select(&bottom, &bottom);
    let cond = condition_number(&d.v);
    if !cond.is_finite() || cond > OPEN_CELL_CONDITION {
        return Err(Error::OutsideOpenCell { condition: cond });
    }
    let d_inv = d.inverse()?;
    let upper = b.mul(&d_inv);
    let lower = d_inv.mul(&cc);
    let k1 = a.sub(&upper.mul(&cc));
    let assemble = |tl: &MatJet, tr: &MatJet, bl: &MatJet, br: &MatJet| -> MatJet {
        tl.embed(n, n, 0, 0)
            .add(&tr.embed(n, n, 0, block))
            .add(&bl.embed(n, n, block, 0))
            .add(&br.embed(n, n, block, block))
    };
    let eye = |k: usize| MatJet::constant(identity(k));
    let zero = |r: usize, cols: usize| MatJet::constant(CMat::zeros(r, cols));
    let m = n - block;
    let p_plus_f = assemble(&eye(block), &upper, &zero(m, block), &eye(m));
    let k_f = assemble(&k1, &zero(block, m), &zero(m, block), &d);
    let p_minus_f = assemble(&eye(block), &zero(block, m), &lower, &eye(m));
    let back = |x: &MatJet| x.mul_const_left(&frame).mul_const_right(&frame_inv);
    Ok(HcDecomposition { p_plus: back(&p_plus_f), k_c: back(&k_f), p_minus: back(&p_minus_f) })
}

pub fn hc_decompose(spec: &GroupSpec, g: &CMat) -> Result<HcDecomposition<CMat>> {
    let parts = hc_decompose_jet(spec, &MatJet::constant(g.clone()))?;
    Ok(HcDecomposition { p_plus: parts.p_plus.v, k_c: parts.k_c.v, p_minus: parts.p_minus.v })
}

/// The middle factor j(g).
pub fn j_factor(spec: &GroupSpec, g: &CMat) -> Result<CMat> {
    Ok(hc_decompose(spec, g)?.k_c)
}

/// Cayley element for the top maximal parabolic of `p` (Satake convention):
/// (1/√2)[[1, i], [i, 1]] on each (e_i, f_i) of Sp, (1/√2)[[1, 1], [−1, 1]] on each
/// (u_i, w_i) of SU(p,q).
pub fn cayley_element(p: &ParabolicData) -> Result<CMat> {
    let w = &p.active[p.active.len() - p.flag.top()..];
    cayley_on_pairs(&p.spec, w)
}

pub fn cayley_on_pairs(spec: &GroupSpec, pairs: &[usize]) -> Result<CMat> {
    let n = spec.size();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = identity(n);
    match spec.family {
        Family::Sl2R | Family::Sp2nR { .. } => {
            let half = n / 2;
            for &i in pairs {
                out[(i, i)] = c(s);
                out[(i, half + i)] = C64::new(0.0, s);
                out[(half + i, i)] = C64::new(0.0, s);
                out[(half + i, half + i)] = c(s);
            }
        }
        Family::Su { p, .. } => {
            for &i in pairs {
                out[(i, i)] = c(s);
                out[(i, p + i)] = c(s);
                out[(p + i, i)] = c(-s);
                out[(p + i, p + i)] = c(s);
            }
        }
        other => {
            return Err(Error::UnsupportedFlag(format!("no Cayley element for {other:?}")));
        }
    }
    Ok(out)
}

/// λ₁(g) = λ_ℂ(j(c₁)⁻¹ j(c₁ g)) on K_{1h}G_{1ℓ}.
#[derive(Clone, Debug)]
pub struct CanonicalExtension {
    pub rep: Representation,
    pub cayley: CMat,
    j_c_inv: CMat,
    /// λ′₁ on the algebra basis (real-linear).
    derivative: Vec<CMat>,
    algebra: Subspace,
}

impl CanonicalExtension {
    pub fn new(rep: &Representation, parabolic: &ParabolicData) -> Result<Self> {
        Self::with_cayley(rep, cayley_element(parabolic)?)
    }

    pub fn with_cayley(rep: &Representation, cayley: CMat) -> Result<Self> {
        let jc = j_factor(&rep.spec, &cayley)?;
        let j_c_inv = crate::linalg::inverse(&jc)?;
        let algebra = crate::lie::LieAlgebra::new(&rep.spec).basis;
        let mut ext = CanonicalExtension { rep: rep.clone(), cayley, j_c_inv, derivative: Vec::new(), algebra };
        let n = rep.spec.size();
        ext.derivative = ext
            .algebra
            .basis()
            .iter()
            .map(|b| {
                let jet = MatJet { v: identity(n), d: vec![b.clone()], h: Vec::new(), order: 1 };
                ext.eval_jet(&jet).map(|m| m.d[0].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ext)
    }

    /// j(c)⁻¹ j(c g) ∈ 𝐊(ℂ), through jets.
    pub fn k_part_jet(&self, g: &MatJet) -> Result<MatJet> {
        let cg = g.mul_const_left(&self.cayley);
        let parts = hc_decompose_jet(&self.rep.spec, &cg)?;
        Ok(parts.k_c.mul_const_left(&self.j_c_inv))
    }

    pub fn eval_jet(&self, g: &MatJet) -> Result<MatJet> {
        self.rep.lambda_c_jet(&self.k_part_jet(g)?)
    }

    pub fn eval(&self, g: &CMat) -> Result<CMat> {
        Ok(self.eval_jet(&MatJet::constant(g.clone()))?.v)
    }

    /// λ′₁ on an algebra element.
    pub fn derivative(&self, x: &CMat) -> CMat {
        let coords = self.algebra.coords(x);
        let mut out = CMat::zeros(self.rep.dim_v(), self.rep.dim_v());
        for (t, m) in coords.iter().zip(&self.derivative) {
            out += m * c(*t);
        }
        out
    }

    pub fn derivative_jet(&self, x: &MatJet) -> MatJet {
        x.map_linear(|m| self.derivative(m))
    }

    /// ‖λ₁(gh) − λ₁(g)λ₁(h)‖.
    pub fn homomorphism_residual(&self, g: &CMat, h: &CMat) -> Result<f64> {
        let lhs = self.eval(&(g * h))?;
        let rhs = self.eval(g)? * self.eval(h)?;
        Ok(dist(&lhs, &rhs))
    }
}

/// Max residual of c K_{1h} G_{1ℓ} c⁻¹ ⊂ 𝐊(ℂ) on generators and of [c, 𝔤_{1h}] = 0.
pub fn cayley_property_residuals(p: &ParabolicData, rep: &Representation) -> Result<(f64, f64)> {
    let cay = cayley_element(p)?;
    let cay_inv = crate::linalg::inverse(&cay)?;
    let frame_inv = rep.frame_inv();
    let frame = rep.frame();
    let b = rep.block();
    let n = p.spec.size();
    let off_block = |x: &CMat| {
        let xf = frame_inv * x * frame;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if (i < b) != (j < b) {
                    s += xf[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut levi = 0.0f64;
    let k_h: Vec<CMat> = p.hermitian_1.basis().iter().map(|x| rep.cartan.k_part(x)).collect();
    for x in k_h.iter().chain(p.linear_1.basis()) {
        levi = levi.max(off_block(&(&cay * x * &cay_inv)));
    }
    let mut commute = 0.0f64;
    for x in p.hermitian_1.basis() {
        commute = commute.max(norm(&(&cay * x - x * &cay)));
    }
    Ok((levi, commute))
}

/// Report of λ₁ = λ₂ on G_{2ℓ} and λ₁ = λ₂₁ on G′_ℓ.
#[derive(Clone, Debug)]
pub struct CompatReport {
    pub max_nested: f64,
    pub max_relative: f64,
    pub cayley_factorization: f64,
    pub samples: usize,
}

/// Sp(2n,ℝ): P₁ of rank r₁ and P₂ of rank r₂ < r₁. Samples are drawn by `coef`.
pub fn extension_compat_check<F: FnMut() -> f64>(
    rep: &Representation,
    r1: usize,
    r2: usize,
    samples: usize,
    mut coef: F,
) -> Result<CompatReport> {
    let spec = &rep.spec;
    let p1 = ParabolicData::new(spec, crate::lie::Flag::maximal(r1))?;
    let p2 = ParabolicData::new(spec, crate::lie::Flag::maximal(r2))?;
    let lam1 = CanonicalExtension::new(rep, &p1)?;
    let lam2 = CanonicalExtension::new(rep, &p2)?;
    let c1 = cayley_element(&p1)?;
    let c2 = cayley_element(&p2)?;
    let c2_inv = crate::linalg::inverse(&c2)?;
    let c21 = &c1 * &c2_inv;
    let cayley_factorization = dist(&c21, &(&c2_inv * &c1));
    // P₁ ∩ G_{2h} as a parabolic of G_{2h}.
    let herm2 = p2.hermitian_pairs();
    let rel_rank = r1 - r2;
    let rel = ParabolicData::relative(spec, &herm2, crate::lie::Flag::maximal(rel_rank))?;
    let lam21 = CanonicalExtension::with_cayley(rep, c21)?;
    let mut max_nested = 0.0f64;
    let mut max_relative = 0.0f64;
    for _ in 0..samples {
        let x2: Vec<f64> = (0..p2.linear_1.dim()).map(|_| coef()).collect();
        let g = crate::lie::expm(&p2.linear_1.combine(&x2));
        max_nested = max_nested.max(dist(&lam1.eval(&g)?, &lam2.eval(&g)?));
        let xr: Vec<f64> = (0..rel.linear_1.dim()).map(|_| coef()).collect();
        let g = crate::lie::expm(&rel.linear_1.combine(&xr));
        max_relative = max_relative.max(dist(&lam1.eval(&g)?, &lam21.eval(&g)?));
    }
    Ok(CompatReport { max_nested, max_relative, cayley_factorization, samples })
}
