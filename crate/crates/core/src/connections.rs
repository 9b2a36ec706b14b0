//! Invariant connections on homogeneous bundles, the Nomizu connection, curvature at
//! the identity, and (multi-step) parabolic induction.
//!
//! A connection form is evaluated at a group point g on a left-trivialized tangent
//! vector ẋ = g⁻¹ġ. Both are jets in some chart coordinates so that derivatives of
//! the pulled-back coefficients come out of the same evaluation.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hc::rep::matrix_to_json;
use crate::hc::{AutomorphyFactor, CanonicalExtension, Representation};
use crate::jet::MatJet;
use crate::lie::{CartanSplit, LieAlgebra, ParabolicData};
use crate::linalg::{c, commutator, identity, norm, zeros, CMat, Subspace};

pub const CONNECTION_TOL: f64 = 1e-9;

pub trait ConnectionForm: Send + Sync {
    fn dim_v(&self) -> usize;
    fn eval(&self, g: &MatJet, xdot: &MatJet) -> Result<MatJet>;

    fn eval_at(&self, g: &CMat, xdot: &CMat) -> Result<CMat> {
        Ok(self.eval(&MatJet::constant(g.clone()), &MatJet::constant(xdot.clone()))?.v)
    }
}

pub type SharedForm = Arc<dyn ConnectionForm>;

/// A left-invariant connection given by ω₀ : 𝔤 → End(V) on the algebra basis.
#[derive(Clone, Debug)]
pub struct InvariantConnection {
    pub rep: Representation,
    pub algebra: Subspace,
    pub omega0: Vec<CMat>,
}

impl InvariantConnection {
    /// Validates both invariance conditions: ω₀|𝔨 = λ′ first, then K-equivariance.
    pub fn new(rep: &Representation, omega0: Vec<CMat>) -> Result<Self> {
        let algebra = LieAlgebra::new(&rep.spec).basis;
        if omega0.len() != algebra.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}-dimensional algebra",
                omega0.len(),
                algebra.dim()
            )));
        }
        if omega0.iter().any(|m| m.nrows() != rep.dim_v() || m.ncols() != rep.dim_v()) {
            return Err(Error::DimensionMismatch("ω₀ values must be End(V)".into()));
        }
        let conn = InvariantConnection { rep: rep.clone(), algebra, omega0 };
        conn.validate()?;
        Ok(conn)
    }

    pub fn from_fn<F: Fn(&CMat) -> CMat>(rep: &Representation, f: F) -> Result<Self> {
        let algebra = LieAlgebra::new(&rep.spec).basis;
        let omega0 = algebra.basis().iter().map(&f).collect();
        Self::new(rep, omega0)
    }

    pub fn omega(&self, x: &CMat) -> CMat {
        let coords = self.algebra.coords(x);
        let mut out = zeros(self.rep.dim_v());
        for (t, m) in coords.iter().zip(&self.omega0) {
            out += m * c(*t);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let k_basis = self.rep.cartan.k.basis();
        let mut worst1 = 0.0f64;
        for k in k_basis {
            worst1 = worst1.max(norm(&(self.omega(k) - self.rep.lambda_prime(k))));
        }
        if worst1 > CONNECTION_TOL {
            return Err(Error::ConditionViolation {
                condition: 1,
                residual: worst1,
                detail: "ω₀ does not restrict to λ′ on 𝔨".into(),
            });
        }
        let mut worst2 = 0.0f64;
        for g in self.algebra.basis() {
            let wg = self.omega(g);
            for k in k_basis {
                let lhs = self.omega(&commutator(g, k));
                let rhs = commutator(&wg, &self.rep.lambda_prime(k));
                worst2 = worst2.max(norm(&(lhs - rhs)));
            }
        }
        if worst2 > CONNECTION_TOL {
            return Err(Error::ConditionViolation {
                condition: 2,
                residual: worst2,
                detail: "ω₀([ġ, k̇]) differs from [ω₀(ġ), λ′(k̇)]".into(),
            });
        }
        Ok(())
    }

    pub fn curvature(&self) -> CurvatureAtIdentity {
        invariant_curvature(self)
    }

    /// JSON table of ω₀ over the algebra basis.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row {
            basis: Vec<Vec<[f64; 2]>>,
            omega0: Vec<Vec<[f64; 2]>>,
        }
        let rows: Vec<Row> = self
            .algebra
            .basis()
            .iter()
            .zip(&self.omega0)
            .map(|(b, w)| Row { basis: matrix_to_json(b), omega0: matrix_to_json(w) })
            .collect();
        serde_json::to_value(rows).expect("serializable")
    }
}

impl ConnectionForm for InvariantConnection {
    fn dim_v(&self) -> usize {
        self.rep.dim_v()
    }

    fn eval(&self, _g: &MatJet, xdot: &MatJet) -> Result<MatJet> {
        Ok(xdot.map_linear(|x| self.omega(x)))
    }
}

/// The Nomizu connection ω₀(k̇ + ṗ) = λ′(k̇).
pub fn nomizu(rep: &Representation) -> InvariantConnection {
    let split = rep.cartan.clone();
    InvariantConnection::from_fn(rep, |x| rep.lambda_prime(&split.k_part(x)))
        .expect("the Nomizu form satisfies both invariance conditions")
}

/// Ω₀(a, b) = [ω₀(a), ω₀(b)] − ω₀([a, b]) cached on basis pairs.
#[derive(Clone, Debug)]
pub struct CurvatureAtIdentity {
    pub algebra: Subspace,
    values: Vec<CMat>,
    dim: usize,
}

pub fn invariant_curvature(conn: &InvariantConnection) -> CurvatureAtIdentity {
    let basis = conn.algebra.basis();
    let dim = basis.len();
    let mut values = Vec::with_capacity(dim * dim);
    for a in basis {
        for b in basis {
            values.push(commutator(&conn.omega(a), &conn.omega(b)) - conn.omega(&commutator(a, b)));
        }
    }
    CurvatureAtIdentity { algebra: conn.algebra.clone(), values, dim }
}

impl CurvatureAtIdentity {
    pub fn on_basis(&self, i: usize, j: usize) -> &CMat {
        &self.values[i * self.dim + j]
    }

    pub fn eval(&self, a: &CMat, b: &CMat) -> CMat {
        let ca = self.algebra.coords(a);
        let cb = self.algebra.coords(b);
        let n = self.values[0].nrows();
        let mut out = zeros(n);
        for i in 0..self.dim {
            if ca[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                out += &self.values[i * self.dim + j] * c(ca[i] * cb[j]);
            }
        }
        out
    }

    pub fn is_flat(&self, tol: f64) -> bool {
        self.values.iter().all(|v| norm(v) <= tol)
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(norm).fold(0.0, f64::max)
    }
}

/// λ′(θ-fixed part of ẋ) evaluated through the Cartan split of the ambient group.
/// Restricts to the Nomizu form of any θ-stable subgroup.
#[derive(Clone, Debug)]
pub struct NomizuForm {
    pub rep: Representation,
    split: CartanSplit,
}

impl NomizuForm {
    pub fn new(rep: &Representation) -> Self {
        NomizuForm { rep: rep.clone(), split: rep.cartan.clone() }
    }
}

impl ConnectionForm for NomizuForm {
    fn dim_v(&self) -> usize {
        self.rep.dim_v()
    }

    fn eval(&self, _g: &MatJet, xdot: &MatJet) -> Result<MatJet> {
        Ok(xdot.map_linear(|x| self.rep.lambda_prime(&self.split.k_part(x))))
    }
}

/// The zero form (connections on a point stratum).
#[derive(Clone, Debug)]
pub struct ZeroForm {
    pub dim_v: usize,
}

impl ConnectionForm for ZeroForm {
    fn dim_v(&self) -> usize {
        self.dim_v
    }

    fn eval(&self, _g: &MatJet, xdot: &MatJet) -> Result<MatJet> {
        let n = self.dim_v;
        Ok(xdot.map_linear(|_| zeros(n)))
    }
}

/// ω(L_{g*}(u̇ + ġ_h + ġ_ℓ)) = λ′₁(ġ_ℓ) + λ₁(g_ℓ)⁻¹ ω₁(g_h, ġ_h) λ₁(g_ℓ).
#[derive(Clone)]
pub struct InducedForm {
    pub parabolic: ParabolicData,
    pub extension: CanonicalExtension,
    pub base: SharedForm,
}

pub fn parabolic_induce(base: SharedForm, parabolic: &ParabolicData, extension: &CanonicalExtension) -> Result<InducedForm> {
    if !parabolic.flag.is_maximal() {
        return Err(Error::UnsupportedFlag("single-step induction needs a maximal parabolic".into()));
    }
    if base.dim_v() != extension.rep.dim_v() {
        return Err(Error::DimensionMismatch("base form and λ₁ act on different spaces".into()));
    }
    Ok(InducedForm { parabolic: parabolic.clone(), extension: extension.clone(), base })
}

impl ConnectionForm for InducedForm {
    fn dim_v(&self) -> usize {
        self.extension.rep.dim_v()
    }

    fn eval(&self, g: &MatJet, xdot: &MatJet) -> Result<MatJet> {
        let parts = self.parabolic.decompose_group_jet(g)?;
        let tangent = self.parabolic.decompose_alg_jet(xdot);
        let linear_dot = tangent.unipotent_p1q.add(&tangent.linear);
        let linear_pt = parts.unipotent_p1q.mul(&parts.linear);
        let lam = self.extension.eval_jet(&linear_pt)?;
        let base = self.base.eval(&parts.hermitian, &tangent.hermitian)?;
        let twisted = lam.inverse()?.mul(&base).mul(&lam);
        Ok(self.extension.derivative_jet(&linear_dot).add(&twisted))
    }
}

/// Closed form of iterated induction along the flag Q:
/// λ′₁(ġ_{Qℓ}) + λ₁(g_{Qℓ})⁻¹ ω₁(g_{1h}, ġ_{1h}) λ₁(g_{Qℓ}).
#[derive(Clone)]
pub struct MultiInducedForm {
    pub parabolic: ParabolicData,
    pub extension: CanonicalExtension,
    pub base: SharedForm,
}

/// Builds the closed form after checking that ω₁ commutes with λ′₁(𝔤_{1ℓ}) on generators.
pub fn multi_induce(base: SharedForm, flag: &ParabolicData, extension: &CanonicalExtension) -> Result<MultiInducedForm> {
    let n = flag.spec.size();
    let eye = MatJet::constant(identity(n));
    let mut worst = 0.0f64;
    for h in flag.hermitian_1.basis() {
        let w = base.eval(&eye, &MatJet::constant(h.clone()))?.v;
        for l in flag.linear_1.basis() {
            worst = worst.max(norm(&commutator(&w, &extension.derivative(l))));
        }
    }
    if worst > CONNECTION_TOL {
        return Err(Error::CommutationHypothesisFailed { residual: worst });
    }
    Ok(MultiInducedForm { parabolic: flag.clone(), extension: extension.clone(), base })
}

impl ConnectionForm for MultiInducedForm {
    fn dim_v(&self) -> usize {
        self.extension.rep.dim_v()
    }

    fn eval(&self, g: &MatJet, xdot: &MatJet) -> Result<MatJet> {
        let parts = self.parabolic.decompose_group_jet(g)?;
        let tangent = self.parabolic.decompose_alg_jet(xdot);
        let lam = self.extension.eval_jet(&parts.linear)?;
        let base = self.base.eval(&parts.hermitian, &tangent.hermitian)?;
        let twisted = lam.inverse()?.mul(&base).mul(&lam);
        Ok(self.extension.derivative_jet(&tangent.linear).add(&twisted))
    }
}

/// Two-step induction along P₁ ≺ P₂ (ranks r₁ > r₂): first inside G_{2h} through
/// P₁ ∩ G_{2h}, then through P₂.
pub fn two_step_induce(base: SharedForm, rep: &Representation, r1: usize, r2: usize) -> Result<InducedForm> {
    let spec = &rep.spec;
    let p2 = ParabolicData::new(spec, crate::lie::Flag::maximal(r2))?;
    let rel = ParabolicData::relative(spec, &p2.hermitian_pairs(), crate::lie::Flag::maximal(r1 - r2))?;
    let c1 = crate::hc::cayley_element(&ParabolicData::new(spec, crate::lie::Flag::maximal(r1))?)?;
    let c2 = crate::hc::cayley_element(&p2)?;
    let c21 = &c1 * crate::linalg::inverse(&c2)?;
    let lam21 = CanonicalExtension::with_cayley(rep, c21)?;
    let inner = parabolic_induce(base, &rel, &lam21)?;
    let lam2 = CanonicalExtension::new(rep, &p2)?;
    parabolic_induce(Arc::new(inner), &p2, &lam2)
}

/// η(q_* X) = J ω J⁻¹ − (d_X J) J⁻¹ at the point g x₀, X ∈ 𝔤 left-trivialized.
pub fn trivialization_transform(omega: &dyn ConnectionForm, j: &AutomorphyFactor, g: &CMat, x: &CMat) -> Result<CMat> {
    let curve = MatJet { v: g.clone(), d: vec![g * x], h: Vec::new(), order: 1 };
    let jj = j.eval_at_base_jet(&curve)?;
    let j_inv = crate::linalg::inverse(&jj.v)?;
    let w = omega.eval_at(g, x)?;
    Ok(&jj.v * w * &j_inv - &jj.d[0] * &j_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{expm, GroupSpec};
    use crate::linalg::{dist, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_and_nomizu_examples() {
        let spec = GroupSpec::sp(2);
        let defining = Representation::parse(&spec, "defining").unwrap();
        let flat = InvariantConnection::from_fn(&defining, |x| x.clone()).unwrap();
        assert!(flat.curvature().is_flat(1e-12));

        let rep = Representation::parse(&spec, "sym2").unwrap();
        let nom = nomizu(&rep);
        let curv = nom.curvature();
        let split = &rep.cartan;
        for p1 in split.p.basis() {
            assert!(norm(&nom.omega(p1)) < 1e-12);
            for p2 in split.p.basis() {
                let expect = -rep.lambda_prime(&commutator(p1, p2));
                assert!(dist(&curv.eval(p1, p2), &expect) < 1e-10);
            }
            for k in split.k.basis() {
                assert!(norm(&curv.eval(k, p1)) < 1e-10);
            }
        }
        for i in 0..curv.algebra.dim() {
            for j in 0..curv.algebra.dim() {
                assert!(dist(curv.on_basis(i, j), &(-curv.on_basis(j, i))) == 0.0);
            }
        }
    }

    #[test]
    fn su2_weight_two_curvature() {
        let spec = GroupSpec::su_compact(2, 1);
        let rep = Representation::parse(&spec, "weight:2").unwrap();
        let nom = nomizu(&rep);
        let p = rep.cartan.p.basis();
        let (p1, p2) = (&p[0], &p[1]);
        let br = commutator(p1, p2);
        // [ṗ₁, ṗ₂] is diagonal diag(ia, −ia); weight 2 sends it to 2ia.
        let k_scalar = br[(0, 0)];
        let expect = C64::new(-2.0, 0.0) * k_scalar;
        let got = nom.curvature().eval(p1, p2)[(0, 0)];
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn condition_violations_are_named() {
        let spec = GroupSpec::su(1, 1);
        let rep = Representation::parse(&spec, "weight:2").unwrap();
        let split = rep.cartan.clone();
        let on_k = InvariantConnection::from_fn(&rep, |x| {
            rep.lambda_prime(&split.k_part(x)) * c(1.5)
        });
        assert!(matches!(on_k, Err(Error::ConditionViolation { condition: 1, .. })));
        let on_p = InvariantConnection::from_fn(&rep, |x| {
            let coord = split.p.coords(&split.p_part(x));
            rep.lambda_prime(&split.k_part(x)) + identity(1) * c(coord[0] * 0.3)
        });
        assert!(matches!(on_p, Err(Error::ConditionViolation { condition: 2, .. })));
    }

    #[test]
    fn induced_form_specializations() {
        let spec = GroupSpec::sp(2);
        let rep = Representation::parse(&spec, "standard").unwrap();
        let p = ParabolicData::named(&spec, "klingen").unwrap();
        let lam = CanonicalExtension::new(&rep, &p).unwrap();
        let form = parabolic_induce(Arc::new(NomizuForm::new(&rep)), &p, &lam).unwrap();
        let eye = identity(4);
        for u in p.unipotent_1.basis() {
            assert!(norm(&form.eval_at(&eye, u).unwrap()) < 1e-12);
        }
        for l in p.linear_1.basis() {
            assert!(dist(&form.eval_at(&eye, l).unwrap(), &lam.derivative(l)) < 1e-12);
        }
        // Ad-twist against explicit conjugation at a point with g_ℓ ≠ I.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let gl = expm(&p.linear_1.combine(&[rng.random_range(-1.0..1.0)]));
            let hx: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
            let gh = expm(&p.hermitian_1.combine(&hx));
            let g = &gh * &gl;
            let hdot = p.hermitian_1.combine(&[0.3, -0.7, 0.2]);
            let lg = lam.eval(&gl).unwrap();
            let base = NomizuForm::new(&rep).eval_at(&gh, &hdot).unwrap();
            let expect = crate::linalg::inverse(&lg).unwrap() * base * &lg;
            assert!(dist(&form.eval_at(&g, &hdot).unwrap(), &expect) < 1e-10);
        }
    }

    #[test]
    fn two_step_matches_closed_form_on_levi_directions() {
        let spec = GroupSpec::sp(2);
        let rep = Representation::parse(&spec, "standard").unwrap();
        let q = ParabolicData::named(&spec, "borel").unwrap();
        let siegel = ParabolicData::named(&spec, "siegel").unwrap();
        let lam1 = CanonicalExtension::new(&rep, &siegel).unwrap();
        let zero: SharedForm = Arc::new(ZeroForm { dim_v: 2 });
        let closed = multi_induce(zero.clone(), &q, &lam1).unwrap();
        let two = two_step_induce(zero.clone(), &rep, 2, 1).unwrap();
        let one = parabolic_induce(zero, &siegel, &lam1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let coeffs: Vec<f64> = (0..q.lie_q.dim()).map(|_| rng.random_range(-0.6..0.6)).collect();
            let g = expm(&q.lie_q.combine(&coeffs));
            for x in q.lie_q.basis() {
                let a = closed.eval_at(&g, x).unwrap();
                let b = two.eval_at(&g, x).unwrap();
                assert!(dist(&a, &b) < 1e-10);
                // One step minus two steps is λ′₁ of the 𝒰_{P₁Q} part, a nilpotent.
                let diff = one.eval_at(&g, x).unwrap() - &b;
                assert!(norm(&(&diff * &diff)) < 1e-10);
            }
        }
    }

    #[test]
    fn trivialization_transform_cases() {
        let spec = GroupSpec::su(1, 1);
        let rep = Representation::parse(&spec, "weight:2").unwrap();
        let nom = nomizu(&rep);
        let j = AutomorphyFactor::canonical(&rep);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let alg = LieAlgebra::new(&spec);
        for _ in 0..10 {
            let g = expm(&alg.random(|| rng.random_range(-0.5..0.5)));
            let x = alg.random(|| rng.random_range(-1.0..1.0));
            let eta = trivialization_transform(&nom, &j, &g, &x).unwrap();
            // Central differences on J along g exp(tX).
            let h = 1e-5;
            let jp = j.eval(&(&g * expm(&(&x * c(h)))), &identity(2)).unwrap();
            let jm = j.eval(&(&g * expm(&(&x * c(-h)))), &identity(2)).unwrap();
            let j0 = j.eval(&g, &identity(2)).unwrap();
            let dj = (jp - jm) / c(2.0 * h);
            let j0_inv = crate::linalg::inverse(&j0).unwrap();
            let expect = &j0 * nom.omega(&x) * &j0_inv - dj * &j0_inv;
            assert!(dist(&eta, &expect) < 1e-6);
        }
    }
}
