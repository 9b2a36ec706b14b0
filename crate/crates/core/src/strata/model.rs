//! Control data on flags of strata, the partition of unity {B_Y^ε} and its ε-family.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

use super::bump::BumpProfile;

/// Tubes, projections and distance functions on a flag Y₀ < Y₁ < … (index 0 deepest).
pub trait ControlData {
    fn depth(&self) -> usize;
    fn dim_c(&self, k: usize) -> usize;
    /// Stratum containing the point.
    fn stratum_of(&self, x: &[f64]) -> usize;
    /// π_k(x) for k ≤ stratum_of(x).
    fn project(&self, x: &[f64], k: usize) -> Vec<f64>;
    /// ρ_k(x) for k < stratum_of(x).
    fn rho(&self, x: &[f64], k: usize) -> f64;
}

/// Per-stratum ε_Y = ε₀ / 2^{dim_ℂ Y}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonFamily {
    pub eps0: f64,
    pub dims: Vec<usize>,
}

impl EpsilonFamily {
    pub fn new<C: ControlData + ?Sized>(model: &C, eps0: f64) -> Self {
        EpsilonFamily { eps0, dims: (0..model.depth()).map(|k| model.dim_c(k)).collect() }
    }

    pub fn eps(&self, k: usize) -> f64 {
        self.eps0 / 2f64.powi(self.dims[k] as i32)
    }
}

/// Model flag: a point of Y_k has coordinates (a₀, r₀, a₁, r₁, …, a_k), ρ_j = r_j and
/// π_j truncates to (a₀, r₀, …, a_j).
#[derive(Clone, Debug, PartialEq)]
pub struct FlagTubeModel {
    pub names: Vec<String>,
    pub dims: Vec<usize>,
}

impl FlagTubeModel {
    pub fn new(names: Vec<String>, dims: Vec<usize>) -> Result<Self> {
        if names.len() != dims.len() || names.is_empty() {
            return Err(Error::Invalid("one dimension per stratum required".into()));
        }
        if dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("strata dimensions must increase along a flag".into()));
        }
        Ok(FlagTubeModel { names, dims })
    }

    /// Flag of `m` strata with complex dimensions 0, 1, …
    pub fn standard(m: usize) -> Self {
        let names = (0..m).map(|k| format!("Y{k}")).collect();
        FlagTubeModel { names, dims: (0..m).collect() }
    }

    pub fn coords_len(k: usize) -> usize {
        2 * k + 1
    }

    /// Uniform point of stratum k with r_j ∈ [0, r_max).
    pub fn sample<R: Rng>(&self, rng: &mut R, k: usize, r_max: f64) -> Vec<f64> {
        (0..Self::coords_len(k))
            .map(|i| if i % 2 == 0 { rng.random_range(-1.0..1.0) } else { rng.random_range(0.0..r_max) })
            .collect()
    }
}

impl ControlData for FlagTubeModel {
    fn depth(&self) -> usize {
        self.dims.len()
    }

    fn dim_c(&self, k: usize) -> usize {
        self.dims[k]
    }

    fn stratum_of(&self, x: &[f64]) -> usize {
        (x.len() - 1) / 2
    }

    fn project(&self, x: &[f64], k: usize) -> Vec<f64> {
        x[..Self::coords_len(k)].to_vec()
    }

    fn rho(&self, x: &[f64], k: usize) -> f64 {
        x[2 * k + 1]
    }
}

/// Disjoint union of flags; points carry the flag index.
#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    pub flags: Vec<FlagTubeModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumJson {
    pub name: String,
    #[serde(rename = "dimC")]
    pub dim_c: usize,
}

/// {strata: [{name, dimC}], flags: [[names…]], eps0, profile: "exp"}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub strata: Vec<StratumJson>,
    pub flags: Vec<Vec<String>>,
    pub eps0: f64,
    #[serde(default = "default_profile")]
    pub profile: String,
    /// "sp4" selects the Siegel-space model for geometric checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<String>,
}

fn default_profile() -> String {
    "exp".into()
}

impl ModelJson {
    pub fn parse(s: &str) -> Result<Self> {
        let m: ModelJson = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("model JSON: {e}")))?;
        if m.profile != "exp" {
            return Err(Error::Invalid(format!("unknown bump profile {}", m.profile)));
        }
        if m.eps0 <= 0.0 {
            return Err(Error::Invalid("eps0 must be positive".into()));
        }
        Ok(m)
    }

    pub fn forest(&self) -> Result<Forest> {
        let flags = self
            .flags
            .iter()
            .map(|flag| {
                let dims = flag
                    .iter()
                    .map(|n| {
                        self.strata
                            .iter()
                            .find(|s| &s.name == n)
                            .map(|s| s.dim_c)
                            .ok_or_else(|| Error::Invalid(format!("unknown stratum {n}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                FlagTubeModel::new(flag.clone(), dims)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Forest { flags })
    }

    /// Three strata of dimensions 0 < 1 < 2 in one flag.
    pub fn default_flag3() -> Self {
        ModelJson {
            strata: (0..3).map(|k| StratumJson { name: format!("Y{k}"), dim_c: k }).collect(),
            flags: vec![(0..3).map(|k| format!("Y{k}")).collect()],
            eps0: 0.5,
            profile: default_profile(),
            geometry: None,
        }
    }
}

/// t^k_ε(y) = Π_{j<k} s_ε(ρ_j(y)) for y on stratum k.
pub fn t_weight<C: ControlData + ?Sized>(model: &C, profile: &BumpProfile, eps: f64, y: &[f64]) -> f64 {
    let k = model.stratum_of(y);
    (0..k).map(|j| profile.scaled(eps, model.rho(y, j))).product()
}

/// B_j^ε(x) = t^j_ε(π_j x)(1 − s_ε(ρ_j x)) inside T_j(ε), zero outside; B_k^ε = t^k_ε on Y_k.
pub fn partition_weight<C: ControlData + ?Sized>(model: &C, profile: &BumpProfile, eps: f64, x: &[f64], j: usize) -> f64 {
    let k = model.stratum_of(x);
    if j > k {
        return 0.0;
    }
    let base = t_weight(model, profile, eps, &model.project(x, j));
    if j == k {
        return base;
    }
    let rho = model.rho(x, j);
    if rho >= eps {
        return 0.0;
    }
    base * (1.0 - profile.scaled(eps, rho))
}

/// {B_j^ε(x)}_{j ≤ stratum_of(x)}.
pub fn partition_weights<C: ControlData + ?Sized>(model: &C, profile: &BumpProfile, eps: f64, x: &[f64]) -> Vec<f64> {
    (0..=model.stratum_of(x)).map(|j| partition_weight(model, profile, eps, x, j)).collect()
}

/// B_j^ε as a jet, from ρ_0, …, ρ_{k−1} of a point on stratum k. Uses ρ_i π_j = ρ_i,
/// so the weight at π_a x is obtained from the first a entries.
pub fn weight_jet(profile: &BumpProfile, eps: f64, rhos: &[Jet], j: usize) -> Jet {
    let k = rhos.len();
    if j > k {
        return Jet::real(0.0);
    }
    let base = rhos[..j].iter().fold(Jet::real(1.0), |acc, r| &acc * &profile.scaled_jet(eps, r));
    if j == k {
        return base;
    }
    if rhos[j].re() >= eps {
        return Jet::real(0.0);
    }
    &base * &(&Jet::real(1.0) - &profile.scaled_jet(eps, &rhos[j]))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VanishingReport {
    pub samples: usize,
    /// max |Σ_j B_j^{ε_k} − 1| over samples projected to every stratum k.
    pub max_sum_residual: f64,
    /// max |B_j^ε(π_k x) − B_j^ε(x)| for j < k.
    pub max_projection_residual: f64,
    /// Count of B_k^ε(π_k x) < B_k^ε(x).
    pub monotonicity_violations: usize,
    /// Count of failures of the ε-family vanishing statement.
    pub vanishing_violations: usize,
    pub pass: bool,
}

/// Identities of the partition of unity and the ε-family vanishing lemma at the samples.
pub fn family_vanishing_check<C: ControlData + ?Sized>(
    model: &C,
    profile: &BumpProfile,
    family: &EpsilonFamily,
    samples: &[Vec<f64>],
    tol: f64,
) -> VanishingReport {
    let mut rep = VanishingReport { samples: samples.len(), ..Default::default() };
    for x in samples {
        let top = model.stratum_of(x);
        for k in 0..=top {
            let y = model.project(x, k);
            let eps = family.eps(k);
            let total: f64 = partition_weights(model, profile, eps, &y).iter().sum();
            rep.max_sum_residual = rep.max_sum_residual.max((total - 1.0).abs());
        }
        for m in 0..=top {
            let eps = family.eps(m);
            for k in 0..top {
                let px = model.project(x, k);
                for j in 0..k {
                    let diff = partition_weight(model, profile, eps, &px, j) - partition_weight(model, profile, eps, x, j);
                    rep.max_projection_residual = rep.max_projection_residual.max(diff.abs());
                }
                if partition_weight(model, profile, eps, &px, k) + tol < partition_weight(model, profile, eps, x, k) {
                    rep.monotonicity_violations += 1;
                }
            }
        }
        // If B_n^{ε_m}(π_n x) ≠ 0 then B_{n'}^{ε_{m'}}(x) = 0 for n' < n, m' > m, and conversely.
        for n in 0..=top {
            let pn = model.project(x, n);
            for m in n..=top {
                let hyp = partition_weight(model, profile, family.eps(m), &pn, n) != 0.0;
                for n2 in 0..n {
                    for m2 in (m + 1)..=top {
                        let other = partition_weight(model, profile, family.eps(m2), x, n2) != 0.0;
                        if hyp && other {
                            rep.vanishing_violations += 1;
                        }
                    }
                }
            }
        }
    }
    rep.pass = rep.max_sum_residual <= tol
        && rep.max_projection_residual <= tol
        && rep.monotonicity_violations == 0
        && rep.vanishing_violations == 0;
    rep
}

/// The largest stratum W ≤ stratum_of(x) with B_W^{ε_W}(π_W x) ≠ 0.
pub fn localize_stratum<C: ControlData + ?Sized>(model: &C, profile: &BumpProfile, family: &EpsilonFamily, x: &[f64]) -> usize {
    let top = model.stratum_of(x);
    (0..=top)
        .rev()
        .find(|&w| partition_weight(model, profile, family.eps(w), &model.project(x, w), w) != 0.0)
        .unwrap_or(0)
}

/// A chain Z(1) < … < Z(r) of stratum indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain(pub Vec<usize>);

impl Chain {
    /// All chains inside {0..=top} ending in `top`.
    pub fn ending_at(top: usize) -> Vec<Chain> {
        Self::between(0, top, false)
    }

    /// Chains ending in `top` whose elements are ≥ `bottom`; with `starting` they must begin at `bottom`.
    pub fn between(bottom: usize, top: usize, starting: bool) -> Vec<Chain> {
        let inner: Vec<usize> = (bottom..top).collect();
        let mut out = Vec::new();
        for mask in 0u32..(1 << inner.len()) {
            let mut chain: Vec<usize> = inner.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| *v).collect();
            chain.push(top);
            if starting && chain[0] != bottom {
                continue;
            }
            out.push(Chain(chain));
        }
        out
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }
}

/// B_{Z(j)}^{ε_{Z(j+1)}} evaluated at π_{Z(j+1)}(x).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WeightFactor {
    pub stratum: usize,
    pub eps_of: usize,
    pub at: usize,
}

/// Factors of B_𝐙 (empty for singletons).
pub fn chain_factors(chain: &Chain) -> Vec<WeightFactor> {
    chain.0.windows(2).map(|w| WeightFactor { stratum: w[0], eps_of: w[1], at: w[1] }).collect()
}

/// The factor B_{Z(1)}^{ε_{Z(1)}}(π_{Z(1)} x) multiplying the Nomizu term at the chain start.
pub fn start_factor(chain: &Chain) -> WeightFactor {
    let s = chain.first();
    WeightFactor { stratum: s, eps_of: s, at: s }
}

pub fn factor_value<C: ControlData + ?Sized>(
    model: &C,
    profile: &BumpProfile,
    family: &EpsilonFamily,
    x: &[f64],
    f: &WeightFactor,
) -> f64 {
    partition_weight(model, profile, family.eps(f.eps_of), &model.project(x, f.at), f.stratum)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainWeight {
    pub chain: Chain,
    /// B_𝐙(x).
    pub weight: f64,
    /// B_𝐙(x) · B_{Z(1)}^{ε_{Z(1)}}(π_{Z(1)} x), the coefficient in the closed form.
    pub full: f64,
}

/// Chains ending at the stratum of x with nonzero closed-form coefficient.
pub fn chain_weights<C: ControlData + ?Sized>(
    model: &C,
    profile: &BumpProfile,
    family: &EpsilonFamily,
    x: &[f64],
) -> Vec<ChainWeight> {
    let top = model.stratum_of(x);
    Chain::ending_at(top)
        .into_iter()
        .filter_map(|chain| {
            let weight: f64 = chain_factors(&chain).iter().map(|f| factor_value(model, profile, family, x, f)).product();
            let full = weight * factor_value(model, profile, family, x, &start_factor(&chain));
            (full != 0.0).then_some(ChainWeight { chain, weight, full })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// ρ is shrunk on projected points, breaking ρ_Z π_Y = ρ_Z.
    struct Corrupted(FlagTubeModel);

    impl ControlData for Corrupted {
        fn depth(&self) -> usize {
            self.0.depth()
        }
        fn dim_c(&self, k: usize) -> usize {
            self.0.dim_c(k)
        }
        fn stratum_of(&self, x: &[f64]) -> usize {
            self.0.stratum_of(x)
        }
        fn project(&self, x: &[f64], k: usize) -> Vec<f64> {
            self.0.project(x, k)
        }
        fn rho(&self, x: &[f64], k: usize) -> f64 {
            let scale = if self.0.stratum_of(x) + 1 < self.0.depth() { 0.8 } else { 1.0 };
            self.0.rho(x, k) * scale
        }
    }

    #[test]
    fn truncation_algebra_is_exact() {
        let model = FlagTubeModel::standard(4);
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..100 {
            let x = model.sample(&mut rng, 3, 0.6);
            for y in 0..3 {
                for z in 0..y {
                    assert_eq!(model.project(&model.project(&x, y), z), model.project(&x, z));
                    assert_eq!(model.rho(&model.project(&x, y), z), model.rho(&x, z));
                }
            }
        }
    }

    #[test]
    fn partition_examples() {
        let single = FlagTubeModel::standard(1);
        assert_eq!(partition_weights(&single, &BumpProfile, 0.5, &[0.3]), vec![1.0]);

        let model = FlagTubeModel::standard(2);
        // Inside T_Z(ε/2): B_Z = 1, B_Y = 0.
        let w = partition_weights(&model, &BumpProfile, 0.5, &[0.1, 0.2, -0.4]);
        assert_eq!(w, vec![1.0, 0.0]);

        let model = FlagTubeModel::standard(3);
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..1000 {
            let x = model.sample(&mut rng, 2, 0.7);
            let total: f64 = partition_weights(&model, &BumpProfile, 0.5, &x).iter().sum();
            assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn epsilon_family_halves_per_dimension() {
        let model = FlagTubeModel::new(vec!["a".into(), "b".into(), "c".into()], vec![0, 1, 3]).unwrap();
        let fam = EpsilonFamily::new(&model, 0.8);
        assert_eq!((fam.eps(0), fam.eps(1), fam.eps(2)), (0.8, 0.4, 0.1));
    }

    #[test]
    fn vanishing_lemma_on_adversarial_grid() {
        let model = FlagTubeModel::standard(3);
        let fam = EpsilonFamily::new(&model, 0.5);
        let mut values: Vec<f64> = (0..70).map(|i| 0.6 * i as f64 / 69.0).collect();
        for k in 0..3 {
            let e = fam.eps(k);
            values.extend([0.7 * e, 0.5 * e, 0.75 * e, 0.7 * e * (1.0 + 1e-9), 0.7 * e * (1.0 - 1e-9)]);
        }
        values.extend((0..15).map(|i| 0.01 * i as f64));
        assert_eq!(values.len(), 100);
        let mut samples = Vec::new();
        for &r0 in &values {
            for &r1 in &values {
                samples.push(vec![0.2, r0, -0.3, r1, 0.5]);
            }
        }
        let rep = family_vanishing_check(&model, &BumpProfile, &fam, &samples, 1e-12);
        assert_eq!(rep.samples, 10_000);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn corrupted_model_is_reported() {
        let model = Corrupted(FlagTubeModel::standard(3));
        let fam = EpsilonFamily::new(&model, 0.5);
        let x = vec![0.0, 0.33, 0.0, 0.05, 0.0];
        let rep = family_vanishing_check(&model, &BumpProfile, &fam, &[x], 1e-12);
        assert!(!rep.pass && rep.max_projection_residual > 1e-3, "{rep:?}");
    }

    #[test]
    fn chain_weights_sum_to_one() {
        let model = FlagTubeModel::standard(3);
        let fam = EpsilonFamily::new(&model, 0.5);
        let far = vec![0.0, 0.9, 0.0, 0.9, 0.0];
        let w = chain_weights(&model, &BumpProfile, &fam, &far);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].chain, Chain(vec![2]));
        assert_eq!(w[0].weight, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..500 {
            let x = model.sample(&mut rng, 2, 0.6);
            let total: f64 = chain_weights(&model, &BumpProfile, &fam, &x).iter().map(|c| c.full).sum();
            assert!((total - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn model_json_round_trip() {
        let m = ModelJson::default_flag3();
        let back = ModelJson::parse(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.forest().unwrap().flags[0].dims, vec![0, 1, 2]);
        assert!(ModelJson::parse("{\"strata\":[],\"flags\":[],\"eps0\":0.5,\"profile\":\"cos\"}").is_err());
    }
}
