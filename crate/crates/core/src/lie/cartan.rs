//! Cartan involution and the 𝔨 ⊕ 𝔭 split.

use crate::error::{Error, Result};
use crate::linalg::{c, norm, CMat, Subspace};

use super::group::{AlgElem, GroupSpec, LieAlgebra};

#[derive(Clone, Debug)]
pub enum Involution {
    /// X ↦ −X* (noncompact real forms).
    NegAdjoint,
    /// X ↦ S X S with S = I_{p,n−p} (compact symmetric pairs).
    Conjugation(CMat),
}

#[derive(Clone, Debug)]
pub struct CartanSplit {
    pub spec: GroupSpec,
    pub involution: Involution,
    pub k: Subspace,
    pub p: Subspace,
}

impl CartanSplit {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let involution = if let Some(s) = spec.compact_pair_form() {
            Involution::Conjugation(s)
        } else if spec.is_noncompact_real_form() {
            Involution::NegAdjoint
        } else {
            return Err(Error::UnsupportedSpec(format!(
                "{:?} has no supported Cartan involution",
                spec.family
            )));
        };
        let mut split = CartanSplit {
            spec: spec.clone(),
            involution,
            k: Subspace::zero(spec.size()),
            p: Subspace::zero(spec.size()),
        };
        let alg = LieAlgebra::new(spec);
        let kp: Vec<CMat> = alg.basis.basis().iter().map(|b| split.k_part(b)).collect();
        let pp: Vec<CMat> = alg.basis.basis().iter().map(|b| split.p_part(b)).collect();
        split.k = Subspace::spanned_by(spec.size(), &kp, 1e-10);
        split.p = Subspace::spanned_by(spec.size(), &pp, 1e-10);
        Ok(split)
    }

    pub fn theta(&self, x: &CMat) -> CMat {
        match &self.involution {
            Involution::NegAdjoint => -x.adjoint(),
            Involution::Conjugation(s) => s * x * s,
        }
    }

    pub fn k_part(&self, x: &CMat) -> CMat {
        (x + self.theta(x)) * c(0.5)
    }

    pub fn p_part(&self, x: &CMat) -> CMat {
        (x - self.theta(x)) * c(0.5)
    }

    /// Basis with the 𝔨-elements first, then the 𝔭-elements.
    pub fn adapted_basis(&self) -> Vec<CMat> {
        let mut out = self.k.basis().to_vec();
        out.extend(self.p.basis().iter().cloned());
        out
    }

    /// Max residual of the bracket relations [𝔨,𝔨] ⊆ 𝔨, [𝔨,𝔭] ⊆ 𝔭, [𝔭,𝔭] ⊆ 𝔨 on the bases.
    pub fn bracket_relation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let br = |a: &CMat, b: &CMat| a * b - b * a;
        for a in self.k.basis() {
            for b in self.k.basis() {
                worst = worst.max(norm(&self.p_part(&br(a, b))));
            }
            for b in self.p.basis() {
                worst = worst.max(norm(&self.k_part(&br(a, b))));
            }
        }
        for a in self.p.basis() {
            for b in self.p.basis() {
                worst = worst.max(norm(&self.p_part(&br(a, b))));
            }
        }
        worst
    }
}

pub fn cartan_split(x: &AlgElem) -> Result<(AlgElem, AlgElem)> {
    let split = CartanSplit::new(&x.spec)?;
    let k = split.k_part(&x.matrix);
    let p = split.p_part(&x.matrix);
    Ok((AlgElem::new(&x.spec, k)?, AlgElem::new(&x.spec, p)?))
}
