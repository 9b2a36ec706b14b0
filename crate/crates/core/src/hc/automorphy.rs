//! Automorphy factors J(g, h x₀) = j(gh) j(h)⁻¹ built from K-equivariant maps j.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::MatJet;
use crate::linalg::{dist, identity, inverse, CMat};

use super::harish_chandra::hc_decompose_jet;
use super::rep::Representation;

pub type JetMap = Arc<dyn Fn(&MatJet) -> Result<MatJet> + Send + Sync>;

#[derive(Clone)]
pub struct AutomorphyFactor {
    pub rep: Representation,
    j: JetMap,
}

impl fmt::Debug for AutomorphyFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AutomorphyFactor").field("dim_v", &self.rep.dim_v()).finish()
    }
}

impl AutomorphyFactor {
    /// j(g) = λ_ℂ of the middle Harish-Chandra factor of g.
    pub fn canonical(rep: &Representation) -> Self {
        let r = rep.clone();
        let j: JetMap = Arc::new(move |g: &MatJet| {
            let parts = hc_decompose_jet(&r.spec, g)?;
            r.lambda_c_jet(&parts.k_c)
        });
        AutomorphyFactor { rep: rep.clone(), j }
    }

    /// Validates j(gk) = j(g)λ(k) on the sampled (g, k) pairs.
    pub fn from_j(rep: &Representation, j: JetMap, samples: &[(CMat, CMat)], tol: f64) -> Result<Self> {
        let out = AutomorphyFactor { rep: rep.clone(), j };
        let mut worst = 0.0f64;
        for (g, k) in samples {
            let lhs = out.j(&(g * k))?;
            let rhs = out.j(g)? * rep.lambda_c(k)?;
            worst = worst.max(dist(&lhs, &rhs));
        }
        if worst > tol {
            return Err(Error::EquivarianceViolation { residual: worst });
        }
        Ok(out)
    }

    pub fn j_jet(&self, g: &MatJet) -> Result<MatJet> {
        (self.j)(g)
    }

    pub fn j(&self, g: &CMat) -> Result<CMat> {
        Ok(self.j_jet(&MatJet::constant(g.clone()))?.v)
    }

    /// J(g, h x₀) with the point given by a representative h.
    pub fn eval(&self, g: &CMat, h: &CMat) -> Result<CMat> {
        Ok(self.j(&(g * h))? * inverse(&self.j(h)?)?)
    }

    /// J(g, x₀) as g varies along a jet.
    pub fn eval_at_base_jet(&self, g: &MatJet) -> Result<MatJet> {
        let n = g.rows();
        let j1 = inverse(&self.j(&identity(n))?)?;
        Ok(self.j_jet(g)?.mul_const_right(&j1))
    }

    /// ‖J(gg′, x) − J(g, g′x) J(g′, x)‖ with x = h x₀.
    pub fn cocycle_residual(&self, g: &CMat, g2: &CMat, h: &CMat) -> Result<f64> {
        let lhs = self.eval(&(g * g2), h)?;
        let rhs = self.eval(g, &(g2 * h))? * self.eval(g2, h)?;
        Ok(dist(&lhs, &rhs))
    }

    /// ‖J(k, x₀) − λ(k)‖.
    pub fn base_point_residual(&self, k: &CMat) -> Result<f64> {
        let n = k.nrows();
        Ok(dist(&self.eval(k, &identity(n))?, &self.rep.lambda_c(k)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{expm, GroupSpec, LieAlgebra};
    use crate::linalg::{c, zeros};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(spec: &GroupSpec, rep: &Representation, count: usize, seed: u64) -> Vec<(CMat, CMat)> {
        let alg = LieAlgebra::new(spec);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let g = expm(&alg.random(|| rng.random_range(-0.6..0.6)));
                let kx: Vec<f64> = (0..rep.cartan.k.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
                (g, expm(&rep.cartan.k.combine(&kx)))
            })
            .collect()
    }

    #[test]
    fn canonical_factor_is_a_cocycle() {
        let spec = GroupSpec::su(1, 1);
        let rep = Representation::parse(&spec, "weight:2").unwrap();
        let j = AutomorphyFactor::canonical(&rep);
        let pts = samples(&spec, &rep, 50, 1);
        for w in pts.windows(3) {
            assert!(j.cocycle_residual(&w[0].0, &w[1].0, &w[2].0).unwrap() < 1e-9);
            assert!(j.base_point_residual(&w[0].1).unwrap() < 1e-12);
        }
        for (g, _) in &pts {
            assert!(dist(&j.eval(&identity(2), g).unwrap(), &identity(1)) < 1e-12);
        }
        let r = rep.clone();
        let jmap: JetMap = Arc::new(move |g: &MatJet| {
            let parts = hc_decompose_jet(&r.spec, g)?;
            r.lambda_c_jet(&parts.k_c)
        });
        assert!(AutomorphyFactor::from_j(&rep, jmap, &pts, 1e-9).is_ok());
    }

    #[test]
    fn non_equivariant_map_rejected() {
        let spec = GroupSpec::su(1, 1);
        let rep = Representation::parse(&spec, "weight:2").unwrap();
        let jmap: JetMap = Arc::new(|g: &MatJet| {
            let mut out = MatJet::constant(zeros(1));
            out.v[(0, 0)] = c(g.v[(0, 1)].re.exp());
            Ok(out)
        });
        let pts = samples(&spec, &rep, 10, 2);
        assert!(matches!(
            AutomorphyFactor::from_j(&rep, jmap, &pts, 1e-9),
            Err(Error::EquivarianceViolation { .. })
        ));
    }

    #[test]
    fn compact_group_factor_is_lambda() {
        // G = K: J(k, k′x₀) = λ(kk′)λ(k′)⁻¹.
        let spec = GroupSpec::su(1, 1);
        let rep = Representation::parse(&spec, "weight:3").unwrap();
        let j = AutomorphyFactor::canonical(&rep);
        let pts = samples(&spec, &rep, 5, 3);
        for w in pts.windows(2) {
            let (k, k2) = (&w[0].1, &w[1].1);
            let expect = rep.lambda_c(&(k * k2)).unwrap() * inverse(&rep.lambda_c(k2).unwrap()).unwrap();
            assert!(dist(&j.eval(k, k2).unwrap(), &expect) < 1e-12);
        }
    }
}
