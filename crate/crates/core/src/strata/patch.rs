//! Patched connections: the recursive definition, the chain closed form and localization,
//! generic over how connections are represented.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{c, inverse, CMat};

use super::bump::BumpProfile;
use super::model::{chain_factors, factor_value, start_factor, Chain, ControlData, EpsilonFamily, FlagTubeModel, WeightFactor};

/// Connections on the strata of one flag together with the induction maps Φ*.
pub trait PatchAlgebra {
    type Form: Clone;

    fn depth(&self) -> usize;

    /// ∇_k^{Nom}.
    fn nomizu(&self, k: usize) -> Result<Self::Form>;

    /// Φ*_{upper,lower} applied to a connection on the lower stratum.
    fn induce(&self, upper: usize, lower: usize, base: &Self::Form) -> Result<Self::Form>;

    /// Φ*_𝐙 for a chain, by default the composite of single steps.
    fn induce_chain(&self, chain: &Chain, base: &Self::Form) -> Result<Self::Form> {
        let mut form = base.clone();
        for step in chain.0.windows(2) {
            form = self.induce(step[1], step[0], &form)?;
        }
        Ok(form)
    }

    /// Σ_t (Π factors_t)(x) · form_t on stratum `on`.
    fn combine(&self, on: usize, terms: Vec<(Vec<WeightFactor>, Self::Form)>) -> Result<Self::Form>;
}

/// ∇_k^p = B_k^{ε_k}∇_k^{Nom} + Σ_{j<k} B_j^{ε_k} Φ*_{kj}(∇_j^p), for every k.
pub fn assemble_all<A: PatchAlgebra>(alg: &A) -> Result<Vec<A::Form>> {
    let mut done: Vec<A::Form> = Vec::with_capacity(alg.depth());
    for k in 0..alg.depth() {
        let own = WeightFactor { stratum: k, eps_of: k, at: k };
        let mut terms = vec![(vec![own], alg.nomizu(k)?)];
        for (j, lower) in done.iter().enumerate() {
            terms.push((vec![WeightFactor { stratum: j, eps_of: k, at: k }], alg.induce(k, j, lower)?));
        }
        done.push(if k == 0 { alg.nomizu(0)? } else { alg.combine(k, terms)? });
    }
    Ok(done)
}

pub fn assemble_patched<A: PatchAlgebra>(alg: &A, k: usize) -> Result<A::Form> {
    Ok(assemble_all(alg)?.swap_remove(k))
}

/// Σ_{𝐙 ending in k} B_𝐙 · B_{Z(1)}^{ε_{Z(1)}}(π_{Z(1)}) · Φ*_𝐙(∇_{Z(1)}^{Nom}).
pub fn chain_closed_form<A: PatchAlgebra>(alg: &A, k: usize) -> Result<A::Form> {
    if k == 0 {
        return alg.nomizu(0);
    }
    let terms = Chain::ending_at(k)
        .into_iter()
        .map(|chain| {
            let mut factors = chain_factors(&chain);
            factors.push(start_factor(&chain));
            let form = alg.induce_chain(&chain, &alg.nomizu(chain.first())?)?;
            Ok((factors, form))
        })
        .collect::<Result<Vec<_>>>()?;
    alg.combine(k, terms)
}

/// Σ_{w ≤ 𝐒 ≤ top, 𝐒 starting at w} B_𝐒 Φ*_𝐒(∇_w^p), valid near points whose localizing stratum is w.
pub fn localized_form<A: PatchAlgebra>(alg: &A, w: usize, top: usize) -> Result<A::Form> {
    let base = assemble_patched(alg, w)?;
    if w == top {
        return Ok(base);
    }
    let terms = Chain::between(w, top, true)
        .into_iter()
        .map(|chain| Ok((chain_factors(&chain), alg.induce_chain(&chain, &base)?)))
        .collect::<Result<Vec<_>>>()?;
    alg.combine(top, terms)
}

pub type ToyForm = Arc<dyn Fn(&[f64]) -> Result<CMat> + Send + Sync>;

/// Matrix-valued "connections" on a flag-tube model with affine induction maps
/// ω ↦ A·ω(π x)·A⁻¹ + Σ xᵢ Dᵢ; exercises the patching algebra without geometry.
#[derive(Clone)]
pub struct ToyAlgebra {
    pub model: FlagTubeModel,
    pub family: EpsilonFamily,
    pub profile: BumpProfile,
    size: usize,
    nomizu: Vec<(CMat, Vec<CMat>)>,
    /// Indexed by (upper, lower); None marks a missing induction map.
    inductions: Vec<Vec<Option<(CMat, Vec<CMat>)>>>,
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0)))
}

impl ToyAlgebra {
    pub fn new(model: FlagTubeModel, eps0: f64, size: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = model.dims.len();
        let nomizu = (0..m)
            .map(|k| {
                let len = FlagTubeModel::coords_len(k);
                (random_matrix(&mut rng, size), (0..len).map(|_| random_matrix(&mut rng, size)).collect())
            })
            .collect();
        let inductions = (0..m)
            .map(|u| {
                (0..u)
                    .map(|_| {
                        let a = random_matrix(&mut rng, size) + CMat::identity(size, size) * c(3.0);
                        let len = FlagTubeModel::coords_len(u);
                        Some((a, (0..len).map(|_| random_matrix(&mut rng, size)).collect()))
                    })
                    .collect()
            })
            .collect();
        let family = EpsilonFamily::new(&model, eps0);
        ToyAlgebra { model, family, profile: BumpProfile, size, nomizu, inductions }
    }

    pub fn remove_induction(&mut self, upper: usize, lower: usize) {
        self.inductions[upper][lower] = None;
    }
}

fn affine(constant: &CMat, linear: &[CMat], x: &[f64]) -> CMat {
    linear.iter().zip(x).fold(constant.clone(), |acc, (m, xi)| acc + m * c(*xi))
}

impl PatchAlgebra for ToyAlgebra {
    type Form = ToyForm;

    fn depth(&self) -> usize {
        self.model.dims.len()
    }

    fn nomizu(&self, k: usize) -> Result<ToyForm> {
        let (m0, lin) = self.nomizu[k].clone();
        Ok(Arc::new(move |x: &[f64]| Ok(affine(&m0, &lin, x))))
    }

    fn induce(&self, upper: usize, lower: usize, base: &ToyForm) -> Result<ToyForm> {
        let (a, lin) = self.inductions[upper][lower]
            .clone()
            .ok_or_else(|| Error::MissingInductionData(format!("no map from stratum {lower} to {upper}")))?;
        let a_inv = inverse(&a)?;
        let base = base.clone();
        let zero = CMat::zeros(self.size, self.size);
        let model = self.model.clone();
        Ok(Arc::new(move |x: &[f64]| {
            let inner = base(&model.project(x, lower))?;
            Ok(&a * inner * &a_inv + affine(&zero, &lin, x))
        }))
    }

    fn combine(&self, _on: usize, terms: Vec<(Vec<WeightFactor>, ToyForm)>) -> Result<ToyForm> {
        let me = self.clone();
        let n = self.size;
        Ok(Arc::new(move |x: &[f64]| {
            let mut out = CMat::zeros(n, n);
            for (factors, form) in &terms {
                let w: f64 = factors.iter().map(|f| factor_value(&me.model, &me.profile, &me.family, x, f)).product();
                if w != 0.0 {
                    out += form(x)? * c(w);
                }
            }
            Ok(out)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist;
    use crate::strata::model::localize_stratum;

    fn grid_point(i: usize, j: usize, n: usize, r_max: f64) -> Vec<f64> {
        let r0 = r_max * i as f64 / (n - 1) as f64;
        let r1 = r_max * j as f64 / (n - 1) as f64;
        vec![0.3, r0, -0.2, r1, 0.7]
    }

    #[test]
    fn minimal_stratum_is_nomizu() {
        let alg = ToyAlgebra::new(FlagTubeModel::standard(3), 0.5, 3, 1);
        let p = assemble_patched(&alg, 0).unwrap();
        let n = alg.nomizu(0).unwrap();
        assert_eq!(p(&[0.4]).unwrap(), n(&[0.4]).unwrap());
    }

    #[test]
    fn recursion_matches_closed_form() {
        let alg = ToyAlgebra::new(FlagTubeModel::standard(3), 0.5, 3, 2);
        let rec = assemble_patched(&alg, 2).unwrap();
        let closed = chain_closed_form(&alg, 2).unwrap();
        let mut worst = 0.0f64;
        for i in 0..30 {
            for j in 0..30 {
                let x = grid_point(i, j, 30, 0.6);
                worst = worst.max(dist(&rec(&x).unwrap(), &closed(&x).unwrap()));
            }
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn deepest_tube_is_induced_from_the_bottom() {
        let alg = ToyAlgebra::new(FlagTubeModel::standard(3), 0.5, 3, 3);
        let eps_top = alg.family.eps(2);
        let x = vec![0.3, 0.3 * eps_top, -0.2, 0.05, 0.7];
        let p = assemble_patched(&alg, 2).unwrap();
        let direct = alg.induce(2, 0, &alg.nomizu(0).unwrap()).unwrap();
        assert!(dist(&p(&x).unwrap(), &direct(&x).unwrap()) <= 1e-12);
    }

    #[test]
    fn localization_on_a_grid() {
        let alg = ToyAlgebra::new(FlagTubeModel::standard(3), 0.5, 3, 4);
        let global = assemble_patched(&alg, 2).unwrap();
        let local: Vec<ToyForm> = (0..3).map(|w| localized_form(&alg, w, 2).unwrap()).collect();
        let mut seen = [0usize; 3];
        let mut worst = 0.0f64;
        for i in 0..32 {
            for j in 0..32 {
                let x = grid_point(i, j, 32, 0.6);
                let w = localize_stratum(&alg.model, &alg.profile, &alg.family, &x);
                seen[w] += 1;
                worst = worst.max(dist(&global(&x).unwrap(), &local[w](&x).unwrap()));
            }
        }
        assert!(seen.iter().all(|&s| s > 0), "{seen:?}");
        assert!(worst <= 1e-10, "{worst}");
        // Outside every tube W is the top stratum.
        assert_eq!(localize_stratum(&alg.model, &alg.profile, &alg.family, &[0.0, 0.9, 0.0, 0.9, 0.0]), 2);
    }

    #[test]
    fn missing_induction_is_an_error() {
        let mut alg = ToyAlgebra::new(FlagTubeModel::standard(3), 0.5, 2, 5);
        alg.remove_induction(2, 1);
        assert!(matches!(assemble_patched(&alg, 2), Err(Error::MissingInductionData(_))));
    }
}
