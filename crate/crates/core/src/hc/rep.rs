//! Finite-dimensional representations of K, given on the complexification 𝐊(ℂ).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::MatJet;
use crate::lie::{CartanSplit, Family, GroupSpec};
use crate::linalg::{c, commutator, identity, inverse, norm, unit, zeros, CMat, C64};
use nalgebra::{DMatrix, DVector};

/// Built-in and user-supplied representations.
#[derive(Clone, Debug, PartialEq)]
pub enum RepKind {
    /// k ↦ k₁ on ℂᵖ (for Sp(2n,ℝ): the standard representation of U(n)).
    Standard,
    /// k ↦ det(k₁)^m.
    DetPower(i32),
    /// k ↦ Sym²(k₁).
    SymSquare,
    /// k ↦ k, the restriction of the defining representation of G.
    Defining,
    /// λ′ prescribed on the 𝔨-basis; group values by exp/log.
    Custom(Vec<CMat>),
}

impl RepKind {
    /// Parses "standard", "weight:m", "sym2" or "defining".
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "standard" => Ok(RepKind::Standard),
            "sym2" => Ok(RepKind::SymSquare),
            "defining" => Ok(RepKind::Defining),
            other => match other.strip_prefix("weight:").map(str::parse::<i32>) {
                Some(Ok(m)) => Ok(RepKind::DetPower(m)),
                _ => Err(Error::Invalid(format!("unknown representation {other}"))),
            },
        }
    }
}

/// Frame R in which 𝐊(ℂ) is block diagonal, with the size of the first block.
pub fn hc_frame(spec: &GroupSpec) -> Result<(CMat, usize)> {
    match spec.family {
        Family::Sl2R => Ok((sp_frame(1), 1)),
        Family::Sp2nR { n } => Ok((sp_frame(n), n)),
        Family::Su { p, .. } => Ok((identity(spec.size()), p)),
        Family::SuCompact { p, .. } | Family::UCompact { p, .. } => Ok((identity(spec.size()), p)),
        other => Err(Error::UnsupportedSpec(format!("no Harish-Chandra frame for {other:?}"))),
    }
}

/// R = (1/√2)[[I, I], [iI, −iI]].
fn sp_frame(n: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut r = zeros(2 * n);
    for i in 0..n {
        r[(i, i)] = c(s);
        r[(i, n + i)] = c(s);
        r[(n + i, i)] = C64::new(0.0, s);
        r[(n + i, n + i)] = C64::new(0.0, -s);
    }
    r
}

/// Orthonormal embedding of Sym²(ℂⁿ) into ℂⁿ ⊗ ℂⁿ (columns).
fn sym2_embedding(n: usize) -> CMat {
    let dim = n * (n + 1) / 2;
    let mut p = CMat::zeros(n * n, dim);
    let mut col = 0;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i..n {
            if i == j {
                p[(i * n + i, col)] = c(1.0);
            } else {
                p[(i * n + j, col)] = c(s);
                p[(j * n + i, col)] = c(s);
            }
            col += 1;
        }
    }
    p
}

#[derive(Clone, Debug)]
pub struct Representation {
    pub spec: GroupSpec,
    pub kind: RepKind,
    pub cartan: CartanSplit,
    frame: CMat,
    frame_inv: CMat,
    block: usize,
    dim_v: usize,
    /// λ′ on the elementary matrices of gl(n, ℂ) in frame coordinates (complex-linear).
    elementary: Vec<CMat>,
    /// Complex pseudo-inverse for coordinates in the 𝔨-basis (custom representations).
    k_pinv: Option<DMatrix<C64>>,
}

impl Representation {
    pub fn new(spec: &GroupSpec, kind: RepKind) -> Result<Self> {
        let cartan = CartanSplit::new(spec)?;
        let (frame, block) = hc_frame(spec)?;
        let frame_inv = inverse(&frame)?;
        let n = spec.size();
        let dim_v = match &kind {
            RepKind::Standard => block,
            RepKind::DetPower(_) => 1,
            RepKind::SymSquare => block * (block + 1) / 2,
            RepKind::Defining => n,
            RepKind::Custom(mats) => {
                if mats.len() != cartan.k.dim() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} matrices for a {}-dimensional 𝔨",
                        mats.len(),
                        cartan.k.dim()
                    )));
                }
                mats.first().map(|m| m.nrows()).unwrap_or(1)
            }
        };
        let k_pinv = match &kind {
            RepKind::Custom(_) => {
                let cols: Vec<DVector<C64>> = cartan
                    .k
                    .basis()
                    .iter()
                    .map(|b| DVector::from_iterator(n * n, b.iter().cloned()))
                    .collect();
                let m = DMatrix::from_columns(&cols);
                Some(m.pseudo_inverse(1e-13).map_err(|e| Error::Invalid(e.to_string()))?)
            }
            _ => None,
        };
        let mut rep = Representation {
            spec: spec.clone(),
            kind,
            cartan,
            frame,
            frame_inv,
            block,
            dim_v,
            elementary: Vec::new(),
            k_pinv,
        };
        if !matches!(rep.kind, RepKind::Custom(_) | RepKind::Defining) {
            rep.elementary = (0..block * block)
                .map(|k| {
                    let e = unit(block, k / block, k % block);
                    let jet = MatJet { v: identity(block), d: vec![e], h: Vec::new(), order: 1 };
                    rep.apply_block(&jet).map(|j| j.d[0].clone())
                })
                .collect::<Result<Vec<_>>>()?;
        }
        rep.validate()?;
        Ok(rep)
    }

    pub fn parse(spec: &GroupSpec, name: &str) -> Result<Self> {
        Self::new(spec, RepKind::parse(name)?)
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    /// Size of the first diagonal block of 𝐊(ℂ) in the frame.
    pub fn block(&self) -> usize {
        self.block
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn frame_inv(&self) -> &CMat {
        &self.frame_inv
    }

    /// Built-in formula applied to the first block k₁.
    fn apply_block(&self, k1: &MatJet) -> Result<MatJet> {
        match &self.kind {
            RepKind::Standard => Ok(k1.clone()),
            RepKind::DetPower(m) => {
                let d = k1.det().powi(*m);
                Ok(MatJet::from_entries(1, 1, &[d]))
            }
            RepKind::SymSquare => {
                let p = sym2_embedding(self.block);
                let pt = p.adjoint();
                Ok(k1.kron(k1).mul_const_left(&pt).mul_const_right(&p))
            }
            RepKind::Defining | RepKind::Custom(_) => {
                Err(Error::Invalid("representation is not a function of the first block".into()))
            }
        }
    }

    /// Complex coordinates in the 𝔨-basis of an element of 𝔨_ℂ.
    fn k_coords(&self, x: &CMat) -> Vec<C64> {
        let pinv = self.k_pinv.as_ref().expect("custom representation");
        let v = DVector::from_iterator(x.len(), x.iter().cloned());
        (pinv * v).iter().cloned().collect()
    }

    /// λ′ extended complex-linearly to 𝔨_ℂ (and through the block projection to all of 𝔤_ℂ).
    pub fn lambda_prime(&self, x: &CMat) -> CMat {
        match &self.kind {
            RepKind::Defining => x.clone(),
            RepKind::Custom(mats) => {
                let coords = self.k_coords(x);
                let mut out = zeros(self.dim_v);
                for (z, m) in coords.iter().zip(mats) {
                    out += m * *z;
                }
                out
            }
            _ => {
                let xf = &self.frame_inv * x * &self.frame;
                let mut out = zeros(self.dim_v);
                for a in 0..self.block {
                    for b in 0..self.block {
                        let z = xf[(a, b)];
                        if z != C64::new(0.0, 0.0) {
                            out += &self.elementary[a * self.block + b] * z;
                        }
                    }
                }
                out
            }
        }
    }

    pub fn lambda_prime_jet(&self, x: &MatJet) -> MatJet {
        x.map_linear(|m| self.lambda_prime(m))
    }

    /// λ_ℂ on 𝐊(ℂ) (standard coordinates), carried through jets.
    pub fn lambda_c_jet(&self, k: &MatJet) -> Result<MatJet> {
        match &self.kind {
            RepKind::Defining => Ok(k.clone()),
            RepKind::Custom(_) => {
                let log = k.log()?;
                Ok(log.map_linear(|m| self.lambda_prime(m)).exp())
            }
            _ => {
                let kf = k.mul_const_left(&self.frame_inv).mul_const_right(&self.frame);
                let idx: Vec<usize> = (0..self.block).collect();
                self.apply_block(&kf.select(&idx, &idx))
            }
        }
    }

    pub fn lambda_c(&self, k: &CMat) -> Result<CMat> {
        Ok(self.lambda_c_jet(&MatJet::constant(k.clone()))?.v)
    }

    /// Max residual of λ′([a,b]) − [λ′(a), λ′(b)] over 𝔨-basis pairs.
    pub fn homomorphism_residual(&self) -> f64 {
        let basis = self.cartan.k.basis();
        let mut worst: f64 = 0.0;
        for a in basis {
            for b in basis {
                let lhs = self.lambda_prime(&commutator(a, b));
                let rhs = commutator(&self.lambda_prime(a), &self.lambda_prime(b));
                worst = worst.max(norm(&(lhs - rhs)));
            }
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        let r = self.homomorphism_residual();
        if r > 1e-9 {
            return Err(Error::Invalid(format!(
                "λ′ is not a Lie algebra homomorphism on 𝔨 (residual {r:.3e})"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mats: Vec<CMat> = self.cartan.k.basis().iter().map(|b| self.lambda_prime(b)).collect();
        let raw = RepJson { dim_v: self.dim_v, lambda_prime: mats.iter().map(matrix_to_json).collect() };
        serde_json::to_string(&raw).expect("serializable")
    }

    pub fn from_json(spec: &GroupSpec, s: &str) -> Result<Self> {
        let raw: RepJson = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
        let mats = raw
            .lambda_prime
            .iter()
            .map(|m| matrix_from_json(m, raw.dim_v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, RepKind::Custom(mats))
    }
}

/// Wire format: λ′ of the 𝔨-basis elements, complex entries as [re, im].
#[derive(Serialize, Deserialize, Debug)]
pub struct RepJson {
    #[serde(rename = "dimV")]
    pub dim_v: usize,
    pub lambda_prime: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn matrix_to_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &[Vec<[f64; 2]>], dim: usize) -> Result<CMat> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!("expected a {dim}x{dim} matrix")));
    }
    Ok(CMat::from_fn(dim, dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{expm, LieAlgebra};
    use crate::linalg::dist;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtins_are_homomorphisms() {
        for (spec, name) in [
            (GroupSpec::sp(2), "standard"),
            (GroupSpec::sp(2), "sym2"),
            (GroupSpec::sp(2), "weight:3"),
            (GroupSpec::su(1, 1), "weight:2"),
            (GroupSpec::su(2, 1), "standard"),
            (GroupSpec::su_compact(2, 1), "weight:2"),
            (GroupSpec::sp(2), "defining"),
        ] {
            let rep = Representation::parse(&spec, name).unwrap();
            assert!(rep.homomorphism_residual() < 1e-12, "{name}");
        }
    }

    #[test]
    fn group_values_match_exponentiated_derivative() {
        let spec = GroupSpec::sp(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for name in ["standard", "sym2", "weight:2"] {
            let rep = Representation::parse(&spec, name).unwrap();
            for _ in 0..5 {
                let coeffs: Vec<f64> = (0..rep.cartan.k.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let x = rep.cartan.k.combine(&coeffs);
                let lhs = rep.lambda_c(&expm(&x)).unwrap();
                let rhs = expm(&rep.lambda_prime(&x));
                assert!(dist(&lhs, &rhs) < 1e-10, "{name}");
            }
        }
    }

    #[test]
    fn standard_rep_of_unitary_block() {
        // k = [[A, B], [−B, A]] acts as A + iB.
        let spec = GroupSpec::sp(1);
        let rep = Representation::parse(&spec, "standard").unwrap();
        let t: f64 = 0.4;
        let k = crate::linalg::from_real(&[&[t.cos(), t.sin()], &[-t.sin(), t.cos()]]);
        let v = rep.lambda_c(&k).unwrap();
        assert!((v[(0, 0)] - C64::new(t.cos(), t.sin())).norm() < 1e-14);
    }

    #[test]
    fn custom_rep_round_trip_and_rejection() {
        let spec = GroupSpec::su(1, 1);
        let weight = Representation::parse(&spec, "weight:2").unwrap();
        let json = weight.to_json();
        let custom = Representation::from_json(&spec, &json).unwrap();
        let alg = LieAlgebra::new(&spec);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = alg.random(|| rng.random_range(-0.3..0.3));
        let kx = custom.cartan.k_part(&x);
        assert!(dist(&custom.lambda_prime(&kx), &weight.lambda_prime(&kx)) < 1e-12);
        let k = expm(&kx);
        assert!(dist(&custom.lambda_c(&k).unwrap(), &weight.lambda_c(&k).unwrap()) < 1e-12);

        // A map on u(2) that is not a homomorphism.
        let sp = GroupSpec::sp(2);
        let kdim = CartanSplit::new(&sp).unwrap().k.dim();
        let mut mats = vec![zeros(2); kdim];
        mats[0] = crate::linalg::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        mats[1] = crate::linalg::from_real(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(Representation::new(&sp, RepKind::Custom(mats)).is_err());
    }
}
