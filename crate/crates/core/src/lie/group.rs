//! Classical matrix groups, their defining forms, and fixed algebra bases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, identity, norm, unit, zeros, CMat, Subspace, C64, I};

/// Default tolerance for floating-point membership checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Sl2R,
    Sp2nR { n: usize },
    Su { p: usize, q: usize },
    /// Compact SU(n) with the symmetric pair S(U(p) × U(n−p)).
    SuCompact { n: usize, p: usize },
    /// Compact U(n) with the symmetric pair U(p) × U(n−p).
    UCompact { n: usize, p: usize },
    So2,
    GlnR { n: usize },
    GlnC { n: usize },
    Sp2nC { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarKind {
    F64 { tol: f64 },
    Exact,
}

/// A supported classical group together with its defining form.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub family: Family,
    pub scalar: ScalarKind,
    form: CMat,
}

/// Symplectic form [[0, I_n], [−I_n, 0]].
pub fn symplectic_form(n: usize) -> CMat {
    let mut j = zeros(2 * n);
    for i in 0..n {
        j[(i, n + i)] = c(1.0);
        j[(n + i, i)] = c(-1.0);
    }
    j
}

/// Hermitian form diag(I_p, −I_q).
pub fn hermitian_form(p: usize, q: usize) -> CMat {
    let mut h = identity(p + q);
    for i in p..p + q {
        h[(i, i)] = c(-1.0);
    }
    h
}

impl GroupSpec {
    pub fn new(family: Family) -> Result<Self> {
        let form = match family {
            Family::Sl2R => symplectic_form(1),
            Family::Sp2nR { n } | Family::Sp2nC { n } => {
                if n == 0 || n > 3 {
                    return Err(Error::UnsupportedSpec(format!("Sp(2n) requires 1 <= n <= 3, got {n}")));
                }
                symplectic_form(n)
            }
            Family::Su { p, q } => {
                if p == 0 || q == 0 || p + q > 4 {
                    return Err(Error::UnsupportedSpec(format!("SU(p,q) requires p,q >= 1 and p+q <= 4, got ({p},{q})")));
                }
                hermitian_form(p, q)
            }
            Family::SuCompact { n, p } | Family::UCompact { n, p } => {
                if n == 0 || n > 4 || p > n {
                    return Err(Error::UnsupportedSpec(format!("compact family with n={n}, p={p}")));
                }
                identity(n)
            }
            Family::So2 => identity(2),
            Family::GlnR { n } | Family::GlnC { n } => {
                if n == 0 {
                    return Err(Error::UnsupportedSpec("GL(0)".into()));
                }
                identity(n)
            }
        };
        Ok(GroupSpec { family, scalar: ScalarKind::F64 { tol: DEFAULT_TOL }, form })
    }

    pub fn sp(n: usize) -> Self {
        Self::new(Family::Sp2nR { n }).expect("supported Sp rank")
    }

    pub fn su(p: usize, q: usize) -> Self {
        Self::new(Family::Su { p, q }).expect("supported SU signature")
    }

    pub fn su_compact(n: usize, p: usize) -> Self {
        Self::new(Family::SuCompact { n, p }).expect("supported compact SU")
    }

    pub fn with_scalar(mut self, scalar: ScalarKind) -> Self {
        self.scalar = scalar;
        self
    }

    pub fn tol(&self) -> f64 {
        match self.scalar {
            ScalarKind::F64 { tol } => tol,
            ScalarKind::Exact => 1e-12,
        }
    }

    /// Defining form J (symplectic) or H (Hermitian); identity for families without one.
    pub fn form(&self) -> &CMat {
        &self.form
    }

    pub fn size(&self) -> usize {
        self.form.nrows()
    }

    pub fn is_real(&self) -> bool {
        matches!(self.family, Family::Sl2R | Family::Sp2nR { .. } | Family::So2 | Family::GlnR { .. })
    }

    /// Whether the family is a real form with Cartan involution −X*.
    pub fn is_noncompact_real_form(&self) -> bool {
        matches!(
            self.family,
            Family::Sl2R | Family::Sp2nR { .. } | Family::Su { .. } | Family::So2 | Family::GlnR { .. }
        )
    }

    /// Involution matrix I_{p,n−p} for compact symmetric pairs.
    pub fn compact_pair_form(&self) -> Option<CMat> {
        match self.family {
            Family::SuCompact { n, p } | Family::UCompact { n, p } => Some(hermitian_form(p, n - p)),
            _ => None,
        }
    }

    /// Residual of the Lie-algebra defining relations.
    pub fn algebra_residual(&self, x: &CMat) -> f64 {
        if x.nrows() != self.size() || x.ncols() != self.size() {
            return f64::INFINITY;
        }
        let imag = || x.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        let j = &self.form;
        match self.family {
            Family::Sl2R => imag() + x.trace().norm(),
            Family::Sp2nR { .. } => imag() + norm(&(x.transpose() * j + j * x)),
            Family::Sp2nC { .. } => norm(&(x.transpose() * j + j * x)),
            Family::Su { .. } => norm(&(x.adjoint() * j + j * x)) + x.trace().norm(),
            Family::SuCompact { .. } => norm(&(x.adjoint() + x)) + x.trace().norm(),
            Family::UCompact { .. } => norm(&(x.adjoint() + x)),
            Family::So2 => imag() + norm(&(x + x.transpose())),
            Family::GlnR { .. } => imag(),
            Family::GlnC { .. } => 0.0,
        }
    }

    /// Residual of the group defining relations.
    pub fn group_residual(&self, g: &CMat) -> f64 {
        if g.nrows() != self.size() || g.ncols() != self.size() {
            return f64::INFINITY;
        }
        let imag = || g.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        let j = &self.form;
        let det = || g.determinant();
        match self.family {
            Family::Sl2R => imag() + (det() - c(1.0)).norm(),
            Family::Sp2nR { .. } => imag() + norm(&(g.transpose() * j * g - j)),
            Family::Sp2nC { .. } => norm(&(g.transpose() * j * g - j)),
            Family::Su { .. } => norm(&(g.adjoint() * j * g - j)) + (det() - c(1.0)).norm(),
            Family::SuCompact { .. } => norm(&(g.adjoint() * g - identity(self.size()))) + (det() - c(1.0)).norm(),
            Family::UCompact { .. } => norm(&(g.adjoint() * g - identity(self.size()))),
            Family::So2 => imag() + norm(&(g.transpose() * g - identity(2))) + (det() - c(1.0)).norm(),
            Family::GlnR { .. } => imag() + if det().norm() < 1e-300 { 1.0 } else { 0.0 },
            Family::GlnC { .. } => if det().norm() < 1e-300 { 1.0 } else { 0.0 },
        }
    }

    /// Projection of an arbitrary matrix onto the algebra (not orthogonal in general).
    fn to_algebra(&self, x: &CMat) -> CMat {
        let n = self.size();
        let real = |m: &CMat| m.map(|z| c(z.re));
        let j = &self.form;
        match self.family {
            Family::Sl2R => {
                let r = real(x);
                &r - identity(n) * (r.trace() / c(n as f64))
            }
            Family::Sp2nR { .. } => {
                let r = real(x);
                (&r + j * r.transpose() * j) * c(0.5)
            }
            Family::Sp2nC { .. } => (x + j * x.transpose() * j) * c(0.5),
            Family::Su { .. } => {
                let a = (x - j * x.adjoint() * j) * c(0.5);
                &a - identity(n) * (a.trace() / c(n as f64))
            }
            Family::SuCompact { .. } => {
                let a = (x - x.adjoint()) * c(0.5);
                &a - identity(n) * (a.trace() / c(n as f64))
            }
            Family::UCompact { .. } => (x - x.adjoint()) * c(0.5),
            Family::So2 => {
                let r = real(x);
                (&r - r.transpose()) * c(0.5)
            }
            Family::GlnR { .. } => real(x),
            Family::GlnC { .. } => x.clone(),
        }
    }

    /// Fixed real basis of the algebra: projections of the elementary matrices
    /// E_ij (and i·E_ij for complex algebras), scanned in row-major order,
    /// keeping those independent of the earlier ones and scaling each to unit
    /// max-entry.
    pub fn algebra_basis(&self) -> Vec<CMat> {
        let n = self.size();
        let mut cands = Vec::new();
        for i in 0..n {
            for j in 0..n {
                cands.push(unit(n, i, j));
            }
        }
        if !self.is_real() {
            for i in 0..n {
                for j in 0..n {
                    cands.push(unit(n, i, j) * I);
                }
            }
        }
        let projected: Vec<CMat> = cands
            .iter()
            .map(|m| {
                let p = self.to_algebra(m);
                let mx = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if mx > 0.0 {
                    p / c(mx)
                } else {
                    p
                }
            })
            .collect();
        Subspace::spanned_by(n, &projected, 1e-9).basis().to_vec()
    }

    /// Real dimension of the algebra.
    pub fn algebra_dim(&self) -> usize {
        match self.family {
            Family::Sl2R => 3,
            Family::Sp2nR { n } | Family::Sp2nC { n } => {
                let d = n * (2 * n + 1);
                if matches!(self.family, Family::Sp2nC { .. }) { 2 * d } else { d }
            }
            Family::Su { p, q } => (p + q) * (p + q) - 1,
            Family::SuCompact { n, .. } => n * n - 1,
            Family::UCompact { n, .. } => n * n,
            Family::So2 => 1,
            Family::GlnR { n } => n * n,
            Family::GlnC { n } => 2 * n * n,
        }
    }
}

/// Wire format for group specs.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct GroupSpecJson {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default = "default_scalar")]
    pub scalar: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

fn default_scalar() -> String {
    "f64".into()
}

impl TryFrom<GroupSpecJson> for GroupSpec {
    type Error = Error;
    fn try_from(j: GroupSpecJson) -> Result<Self> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::Invalid(format!("family {} requires field {name}", j.family)))
        };
        let family = match j.family.as_str() {
            "sl2R" => Family::Sl2R,
            "sp2nR" => Family::Sp2nR { n: need(j.n, "n")? },
            "sp2nC" => Family::Sp2nC { n: need(j.n, "n")? },
            "su" | "supq" => Family::Su { p: need(j.p, "p")?, q: need(j.q, "q")? },
            "suCompact" => Family::SuCompact { n: need(j.n, "n")?, p: j.p.unwrap_or(1) },
            "uCompact" => Family::UCompact { n: need(j.n, "n")?, p: j.p.unwrap_or(1) },
            "so2" => Family::So2,
            "glnR" => Family::GlnR { n: need(j.n, "n")? },
            "glnC" => Family::GlnC { n: need(j.n, "n")? },
            other => return Err(Error::UnsupportedSpec(format!("unknown family {other}"))),
        };
        let scalar = match j.scalar.as_str() {
            "f64" => ScalarKind::F64 { tol: j.tol.unwrap_or(DEFAULT_TOL) },
            "exact" => ScalarKind::Exact,
            other => return Err(Error::Invalid(format!("unknown scalar kind {other}"))),
        };
        Ok(GroupSpec::new(family)?.with_scalar(scalar))
    }
}

impl From<&GroupSpec> for GroupSpecJson {
    fn from(g: &GroupSpec) -> Self {
        let (family, n, p, q) = match g.family {
            Family::Sl2R => ("sl2R", None, None, None),
            Family::Sp2nR { n } => ("sp2nR", Some(n), None, None),
            Family::Sp2nC { n } => ("sp2nC", Some(n), None, None),
            Family::Su { p, q } => ("su", None, Some(p), Some(q)),
            Family::SuCompact { n, p } => ("suCompact", Some(n), Some(p), None),
            Family::UCompact { n, p } => ("uCompact", Some(n), Some(p), None),
            Family::So2 => ("so2", None, None, None),
            Family::GlnR { n } => ("glnR", Some(n), None, None),
            Family::GlnC { n } => ("glnC", Some(n), None, None),
        };
        let (scalar, tol) = match g.scalar {
            ScalarKind::F64 { tol } => ("f64", Some(tol)),
            ScalarKind::Exact => ("exact", None),
        };
        GroupSpecJson { family: family.into(), n, p, q, scalar: scalar.into(), tol }
    }
}

impl GroupSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: GroupSpecJson = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GroupSpecJson::from(self)).expect("serializable")
    }
}

/// An element of the Lie algebra of a group spec.
#[derive(Clone, Debug)]
pub struct AlgElem {
    pub matrix: CMat,
    pub spec: GroupSpec,
}

impl AlgElem {
    pub fn new(spec: &GroupSpec, matrix: CMat) -> Result<Self> {
        let r = spec.algebra_residual(&matrix);
        if r > spec.tol() * norm(&matrix).max(1.0) {
            return Err(Error::NotInAlgebra { residual: r });
        }
        Ok(AlgElem { matrix, spec: spec.clone() })
    }

    pub fn zero(spec: &GroupSpec) -> Self {
        AlgElem { matrix: zeros(spec.size()), spec: spec.clone() }
    }
}

/// An element of the group.
#[derive(Clone, Debug)]
pub struct GrpElem {
    pub matrix: CMat,
    pub spec: GroupSpec,
}

impl GrpElem {
    pub fn new(spec: &GroupSpec, matrix: CMat) -> Result<Self> {
        let r = spec.group_residual(&matrix);
        if r > spec.tol() * norm(&matrix).max(1.0).powi(2) {
            return Err(Error::NotInGroup { residual: r });
        }
        Ok(GrpElem { matrix, spec: spec.clone() })
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        GrpElem { matrix: identity(spec.size()), spec: spec.clone() }
    }
}

/// Lie bracket with closure check.
pub fn bracket(x: &AlgElem, y: &AlgElem) -> Result<AlgElem> {
    if x.spec != y.spec {
        return Err(Error::SpecMismatch("bracket of elements from different algebras".into()));
    }
    AlgElem::new(&x.spec, commutator(&x.matrix, &y.matrix))
}

/// The Lie algebra of a spec with its fixed basis.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub spec: GroupSpec,
    pub basis: Subspace,
}

impl LieAlgebra {
    pub fn new(spec: &GroupSpec) -> Self {
        let basis = Subspace::new(spec.size(), spec.algebra_basis());
        LieAlgebra { spec: spec.clone(), basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Structure constants check: coordinates of [b_i, b_j].
    pub fn bracket_coords(&self, i: usize, j: usize) -> Vec<f64> {
        let b = self.basis.basis();
        self.basis.coords(&commutator(&b[i], &b[j]))
    }

    /// Random element with coefficients drawn by `coef`.
    pub fn random<F: FnMut() -> f64>(&self, mut coef: F) -> CMat {
        let coeffs: Vec<f64> = (0..self.dim()).map(|_| coef()).collect();
        self.basis.combine(&coeffs)
    }
}

/// Zero complex number helper for callers outside this module.
pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}
