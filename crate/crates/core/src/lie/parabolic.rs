//! Standard parabolic subgroups of Sp(2n,ℝ) and SU(p,q), their Levi splittings, and
//! intersections of nested maximal parabolics.
//!
//! Everything is expressed in an isotropic frame of pairs (e_i, f_i) with
//! ⟨e_i, f_j⟩ = δ_ij. The maximal parabolic of rank r stabilizes the span of the
//! e-vectors of the last r active pairs, so its hermitian Levi factor acts on the
//! leading pairs.

use crate::error::{Error, Result};
use crate::jet::{Jet, MatJet};
use crate::linalg::{c, commutator, identity, inverse, norm, zeros, CMat, DirectSum, Subspace, C64};

use super::group::{Family, GroupSpec, LieAlgebra};

const SUBSPACE_TOL: f64 = 1e-10;

/// Frame vectors as columns: e_0..e_{m-1}, f_0..f_{m-1}, then anisotropic vectors.
#[derive(Clone, Debug)]
pub struct IsotropicFrame {
    pub matrix: CMat,
    pub inverse: CMat,
    pub pairs: usize,
}

impl IsotropicFrame {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let size = spec.size();
        let (matrix, pairs) = match spec.family {
            Family::Sl2R => (identity(2), 1),
            Family::Sp2nR { n } => (identity(2 * n), n),
            Family::Su { p, q } => {
                let m = p.min(q);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mut f = zeros(size);
                for i in 0..m {
                    f[(i, i)] = c(s);
                    f[(p + i, i)] = c(s);
                    f[(i, m + i)] = c(s);
                    f[(p + i, m + i)] = c(-s);
                }
                let mut col = 2 * m;
                for i in m..p {
                    f[(i, col)] = c(1.0);
                    col += 1;
                }
                for i in m..q {
                    f[(p + i, col)] = c(1.0);
                    col += 1;
                }
                (f, m)
            }
            other => {
                return Err(Error::UnsupportedFlag(format!(
                    "parabolics are provided for Sp(2n,R) and SU(p,q), not {other:?}"
                )))
            }
        };
        let inverse = inverse(&matrix)?;
        Ok(IsotropicFrame { matrix, inverse, pairs })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn e(&self, i: usize) -> usize {
        i
    }

    pub fn f(&self, i: usize) -> usize {
        self.pairs + i
    }

    pub fn anisotropic(&self) -> std::ops::Range<usize> {
        2 * self.pairs..self.size()
    }

    pub fn to_frame(&self, x: &CMat) -> CMat {
        &self.inverse * x * &self.matrix
    }

    pub fn from_frame(&self, x: &CMat) -> CMat {
        &self.matrix * x * &self.inverse
    }

    /// Diagonal matrix (in frame coordinates) mapped back to standard coordinates.
    pub fn diagonal(&self, entries: &[f64]) -> CMat {
        let mut d = zeros(self.size());
        for (i, v) in entries.iter().enumerate() {
            d[(i, i)] = c(*v);
        }
        self.from_frame(&d)
    }
}

/// Named flags of standard maximal parabolics, given by the ranks r of the
/// intersected maximal parabolics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    ranks: Vec<usize>,
}

impl Flag {
    pub fn new(mut ranks: Vec<usize>) -> Result<Self> {
        ranks.sort_unstable();
        ranks.dedup();
        if ranks.is_empty() || ranks[0] == 0 {
            return Err(Error::UnsupportedFlag("flag needs at least one positive rank".into()));
        }
        Ok(Flag { ranks })
    }

    pub fn maximal(r: usize) -> Self {
        Flag { ranks: vec![r.max(1)] }
    }

    /// Sp(4,ℝ): Siegel (rank 2), Klingen (rank 1), their intersection the Borel.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "siegel" => Ok(Flag::maximal(2)),
            "klingen" => Ok(Flag::maximal(1)),
            "borel" => Flag::new(vec![1, 2]),
            other => {
                let ranks: std::result::Result<Vec<usize>, _> =
                    other.trim_start_matches("ranks:").split(',').map(|s| s.trim().parse()).collect();
                match ranks {
                    Ok(r) if other.starts_with("ranks:") => Flag::new(r),
                    _ => Err(Error::UnsupportedFlag(other.to_string())),
                }
            }
        }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Rank of P₁, the member with the smallest boundary component.
    pub fn top(&self) -> usize {
        *self.ranks.last().expect("nonempty")
    }

    pub fn is_maximal(&self) -> bool {
        self.ranks.len() == 1
    }
}

/// Parabolic data for a flag inside the hermitian subgroup on a set of active pairs.
#[derive(Clone, Debug)]
pub struct ParabolicData {
    pub spec: GroupSpec,
    pub frame: IsotropicFrame,
    pub active: Vec<usize>,
    pub flag: Flag,
    /// Grading elements H_r, one per rank of the flag.
    pub gradings: Vec<CMat>,
    /// Algebra of the ambient hermitian subgroup on the active pairs.
    pub ambient: Subspace,
    pub lie_q: Subspace,
    pub levi_q: Subspace,
    pub unipotent_q: Subspace,
    /// 𝒰 of P₁.
    pub unipotent_1: Subspace,
    /// 𝔤_{1h}.
    pub hermitian_1: Subspace,
    /// 𝔤_{1ℓ}.
    pub linear_1: Subspace,
    /// Lie(𝒰_{P₁Q}) = Lie(𝒰_Q) ∩ 𝔤_{1ℓ}.
    pub unipotent_p1q: Subspace,
    /// 𝔤_{Qℓ} = L(Q) ∩ 𝔤_{1ℓ}.
    pub linear_q: Subspace,
    split: DirectSum,
    /// Frame index classes: e_W, active rest, f_W, inactive.
    classes: FrameClasses,
}

#[derive(Clone, Debug)]
struct FrameClasses {
    e_w: Vec<usize>,
    rest: Vec<usize>,
    f_w: Vec<usize>,
    inactive: Vec<usize>,
    /// Joint weight of every frame index under the gradings.
    weights: Vec<Vec<i32>>,
}

/// Components of a Lie(Q) element.
#[derive(Clone, Debug)]
pub struct AlgComponents<T> {
    pub unipotent_1: T,
    pub hermitian: T,
    pub unipotent_p1q: T,
    pub linear: T,
}

/// Components g = u₁ · g_h · u_{P₁Q} · g_ℓ of a Q element.
#[derive(Clone, Debug)]
pub struct GroupComponents<T> {
    pub unipotent_1: T,
    pub hermitian: T,
    pub unipotent_p1q: T,
    pub linear: T,
}

impl ParabolicData {
    pub fn new(spec: &GroupSpec, flag: Flag) -> Result<Self> {
        let frame = IsotropicFrame::new(spec)?;
        let active: Vec<usize> = (0..frame.pairs).collect();
        Self::relative(spec, &active, flag)
    }

    pub fn named(spec: &GroupSpec, name: &str) -> Result<Self> {
        Self::new(spec, Flag::parse(name)?)
    }

    /// Parabolic of the hermitian subgroup acting on `active` pairs (and the anisotropic part).
    pub fn relative(spec: &GroupSpec, active: &[usize], flag: Flag) -> Result<Self> {
        let frame = IsotropicFrame::new(spec)?;
        if flag.top() > active.len() {
            return Err(Error::UnsupportedFlag(format!(
                "rank {} exceeds the {} active isotropic pairs",
                flag.top(),
                active.len()
            )));
        }
        if active.iter().any(|&a| a >= frame.pairs) {
            return Err(Error::UnsupportedFlag("active pair out of range".into()));
        }
        let size = spec.size();
        let alg = LieAlgebra::new(spec);
        let ambient = subgroup_algebra(&alg.basis, &frame, active);

        let w_of = |r: usize| active[active.len() - r..].to_vec();
        let gradings: Vec<CMat> = flag
            .ranks()
            .iter()
            .map(|&r| {
                let mut d = vec![0.0; size];
                for &i in &w_of(r) {
                    d[frame.e(i)] = 1.0;
                    d[frame.f(i)] = -1.0;
                }
                frame.diagonal(&d)
            })
            .collect();

        // Joint eigenspaces of the commuting gradings.
        let mut weight_spaces: Vec<(Vec<i32>, Subspace)> = vec![(Vec::new(), ambient.clone())];
        for h in &gradings {
            let mut next = Vec::new();
            for (w, space) in &weight_spaces {
                for lam in -2..=2 {
                    let hh = h.clone();
                    let sub = space.kernel_of(
                        move |x| commutator(&hh, x) - x * c(lam as f64),
                        SUBSPACE_TOL,
                    );
                    if sub.dim() > 0 {
                        let mut w2 = w.clone();
                        w2.push(lam);
                        next.push((w2, sub));
                    }
                }
            }
            weight_spaces = next;
        }
        let collect = |pred: &dyn Fn(&[i32]) -> bool| -> Subspace {
            let elems: Vec<CMat> = weight_spaces
                .iter()
                .filter(|(w, _)| pred(w))
                .flat_map(|(_, s)| s.basis().to_vec())
                .collect();
            Subspace::spanned_by(size, &elems, SUBSPACE_TOL)
        };
        let lie_q = collect(&|w| w.iter().all(|&x| x >= 0));
        let levi_q = collect(&|w| w.iter().all(|&x| x == 0));
        let unipotent_q = collect(&|w| w.iter().all(|&x| x >= 0) && w.iter().any(|&x| x > 0));

        // P₁ is the last grading (largest rank).
        let top = gradings.len() - 1;
        let unipotent_1 = collect(&|w| w.iter().all(|&x| x >= 0) && w[top] > 0);
        let levi_1_space = {
            let h = gradings[top].clone();
            ambient.kernel_of(move |x| commutator(&h, x), SUBSPACE_TOL)
        };
        let w1 = w_of(flag.top());
        let rest_pairs: Vec<usize> = active.iter().copied().filter(|a| !w1.contains(a)).collect();
        let hermitian_1 = levi_1_space.intersect(&subgroup_algebra(&alg.basis, &frame, &rest_pairs), SUBSPACE_TOL);
        let linear_1 = {
            let herm = hermitian_1.basis().to_vec();
            levi_1_space.kernel_of(
                move |x| {
                    let blocks: Vec<CMat> = herm.iter().map(|b| commutator(x, b)).collect();
                    stack(&blocks, x.nrows())
                },
                SUBSPACE_TOL,
            )
        };
        let unipotent_p1q = unipotent_q.intersect(&linear_1, SUBSPACE_TOL);
        let linear_q = levi_q.intersect(&linear_1, SUBSPACE_TOL);
        let split = DirectSum::new(vec![
            unipotent_1.clone(),
            hermitian_1.clone(),
            unipotent_p1q.clone(),
            linear_q.clone(),
        ])?;
        if split.total().dim() != lie_q.dim() {
            return Err(Error::DimensionMismatch(format!(
                "components have total dimension {} but Lie(Q) has {}",
                split.total().dim(),
                lie_q.dim()
            )));
        }

        let mut e_w = Vec::new();
        let mut f_w = Vec::new();
        for &i in &w1 {
            e_w.push(frame.e(i));
            f_w.push(frame.f(i));
        }
        let mut rest: Vec<usize> = Vec::new();
        for &i in &rest_pairs {
            rest.push(frame.e(i));
            rest.push(frame.f(i));
        }
        rest.extend(frame.anisotropic());
        rest.sort_unstable();
        let inactive: Vec<usize> = (0..frame.pairs)
            .filter(|i| !active.contains(i))
            .flat_map(|i| [frame.e(i), frame.f(i)])
            .collect();
        let weights: Vec<Vec<i32>> = (0..size)
            .map(|idx| {
                flag.ranks()
                    .iter()
                    .map(|&r| {
                        let w = w_of(r);
                        if w.iter().any(|&i| frame.e(i) == idx) {
                            1
                        } else if w.iter().any(|&i| frame.f(i) == idx) {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let classes = FrameClasses { e_w, rest, f_w, inactive, weights };

        Ok(ParabolicData {
            spec: spec.clone(),
            frame,
            active: active.to_vec(),
            flag,
            gradings,
            ambient,
            lie_q,
            levi_q,
            unipotent_q,
            unipotent_1,
            hermitian_1,
            linear_1,
            unipotent_p1q,
            linear_q,
            split,
            classes,
        })
    }

    /// (dim 𝒰, dim 𝔤_h, dim 𝔤_ℓ) of P₁.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.unipotent_1.dim(), self.hermitian_1.dim(), self.linear_1.dim())
    }

    /// Pairs on which the hermitian Levi factor of P₁ acts.
    pub fn hermitian_pairs(&self) -> Vec<usize> {
        let w1 = &self.active[self.active.len() - self.flag.top()..];
        self.active.iter().copied().filter(|a| !w1.contains(a)).collect()
    }

    /// Splits an element of Lie(Q) into its four components.
    pub fn decompose_alg(&self, x: &CMat) -> AlgComponents<CMat> {
        let parts = self.split.split(x);
        AlgComponents {
            unipotent_1: parts[0].clone(),
            hermitian: parts[1].clone(),
            unipotent_p1q: parts[2].clone(),
            linear: parts[3].clone(),
        }
    }

    /// Component-wise split of a matrix jet of Lie(Q) elements.
    pub fn decompose_alg_jet(&self, x: &MatJet) -> AlgComponents<MatJet> {
        let part = |k: usize| {
            let split = &self.split;
            x.map_linear(|m| split.split(m)[k].clone())
        };
        AlgComponents { unipotent_1: part(0), hermitian: part(1), unipotent_p1q: part(2), linear: part(3) }
    }

    /// Residual of x from Lie(Q).
    pub fn lie_q_residual(&self, x: &CMat) -> f64 {
        self.lie_q.residual(x)
    }

    /// Residual of g from Q: entries of the frame matrix violating the block structure.
    pub fn q_residual(&self, g: &CMat) -> f64 {
        let gf = self.frame.to_frame(g);
        let mut worst: f64 = 0.0;
        let n = gf.nrows();
        for i in 0..n {
            for j in 0..n {
                let (wi, wj) = (&self.classes.weights[i], &self.classes.weights[j]);
                // g maps frame vector j into weights no lower than wj in every grading.
                if wi.iter().zip(wj).any(|(a, b)| a < b) {
                    worst = worst.max(gf[(i, j)].norm());
                }
            }
        }
        worst
    }

    fn mask(&self, keep: impl Fn(usize, usize) -> bool) -> CMat {
        let n = self.frame.size();
        CMat::from_fn(n, n, |i, j| if keep(i, j) { c(1.0) } else { c(0.0) })
    }

    fn same_block(&self, i: usize, j: usize, classes: &[&Vec<usize>]) -> bool {
        classes.iter().any(|cl| cl.contains(&i) && cl.contains(&j))
    }

    /// Group decomposition g = u₁ g_h u_{P₁Q} g_ℓ, carried through jets.
    pub fn decompose_group_jet(&self, g: &MatJet) -> Result<GroupComponents<MatJet>> {
        let frame = &self.frame;
        let gf = g.map_linear(|m| frame.to_frame(m));
        let cl = &self.classes;
        // Levi of P₁: block diagonal in (e_W | rest | f_W | inactive).
        let levi1_mask = self.mask(|i, j| {
            self.same_block(i, j, &[&cl.e_w, &cl.rest, &cl.f_w, &cl.inactive])
        });
        let levi1 = gf.map_linear(|m| m.component_mul(&levi1_mask));

        let s = self.center_scalar(&levi1)?;
        let rest_mask = self.mask(|i, j| cl.rest.contains(&i) && cl.rest.contains(&j));
        let rest_diag = self.mask(|i, j| i == j && cl.rest.contains(&i));
        let other_diag = self.mask(|i, j| i == j && !cl.rest.contains(&i));
        let outer_mask = self.mask(|i, j| self.same_block(i, j, &[&cl.e_w, &cl.f_w]));
        let inactive_diag = self.mask(|i, j| i == j && cl.inactive.contains(&i));

        let herm_f = levi1
            .map_linear(|m| m.component_mul(&rest_mask))
            .scale_jet(&s.recip())
            .add(&MatJet::constant(other_diag));
        let lin1_f = levi1
.map_linear(|m| m.component_mul(&outer_mask))
            .add(&MatJet::constant(inactive_diag.clone()))
            .add(&MatJet::constant(rest_diag).scale_jet(&s));
        // Levi of Q inside G_{1ℓ}: block diagonal by joint weight.
        let joint_mask = self.mask(|i, j| cl.weights[i] == cl.weights[j]);
        let lin_q_f = lin1_f.map_linear(|m| m.component_mul(&joint_mask));

        let back = |m: &MatJet| m.map_linear(|x| frame.from_frame(x));
        let hermitian = back(&herm_f);
        let linear_1 = back(&lin1_f);
        let linear = back(&lin_q_f);
        let unipotent_p1q = linear_1.mul(&linear.inverse()?);
        let levi1_std = back(&levi1);
        let unipotent_1 = g.mul(&levi1_std.inverse()?);
        Ok(GroupComponents { unipotent_1, hermitian, unipotent_p1q, linear })
    }

    pub fn decompose_group(&self, g: &CMat) -> Result<GroupComponents<CMat>> {
        let parts = self.decompose_group_jet(&MatJet::constant(g.clone()))?;
        Ok(GroupComponents {
            unipotent_1: parts.unipotent_1.v,
            hermitian: parts.hermitian.v,
            unipotent_p1q: parts.unipotent_p1q.v,
            linear: parts.linear.v,
        })
    }

    /// det(M)^{1/m} on the active rest block for SU, 1 otherwise.
    fn center_scalar(&self, levi_frame: &MatJet) -> Result<Jet> {
        let rest = &self.classes.rest;
        if !matches!(self.spec.family, Family::Su { .. }) || rest.is_empty() {
            return Ok(Jet::real(1.0));
        }
        let block = levi_frame.select(rest, rest);
        let det = block.det();
        if det.v.norm() < 1e-300 {
            return Err(Error::Singular);
        }
        Ok(det.powf(1.0 / rest.len() as f64))
    }

    /// Bracket-closure residual of the ideal Lie(𝒰_Q) ⊂ Lie(Q) on bases.
    pub fn ideal_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for u in self.unipotent_q.basis() {
            for q in self.lie_q.basis() {
                worst = worst.max(self.unipotent_q.residual(&commutator(u, q)));
            }
        }
        worst
    }

    /// Max norm of [𝔤_{1h}, 𝔤_{Qℓ}] on bases.
    pub fn commuting_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in self.hermitian_1.basis() {
            for b in self.linear_q.basis() {
                worst = worst.max(norm(&commutator(a, b)));
            }
        }
        worst
    }
}

/// Algebra of the hermitian subgroup acting on `pairs` and the anisotropic part,
/// trivially on the other pairs.
pub fn subgroup_algebra(algebra: &Subspace, frame: &IsotropicFrame, pairs: &[usize]) -> Subspace {
    let inactive: Vec<usize> = (0..frame.pairs)
        .filter(|i| !pairs.contains(i))
        .flat_map(|i| [frame.e(i), frame.f(i)])
        .collect();
    if inactive.is_empty() {
        return algebra.clone();
    }
    let fr = frame.clone();
    algebra.kernel_of(
        move |x| {
            let xf = fr.to_frame(x);
            let n = xf.nrows();
            CMat::from_fn(n, n, |i, j| {
                if inactive.contains(&i) || inactive.contains(&j) {
                    xf[(i, j)]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        },
        SUBSPACE_TOL,
    )
}

/// Vertical stack of equally sized square blocks.
fn stack(blocks: &[CMat], n: usize) -> CMat {
    let mut out = CMat::zeros(n * blocks.len().max(1), n);
    for (k, b) in blocks.iter().enumerate() {
        out.view_mut((k * n, 0), (n, n)).copy_from(b);
    }
    out
}
