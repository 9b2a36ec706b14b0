//! Sp(4,ℝ) model: Z (a point) < Y (H₁ on the first symplectic pair) < X (H₂), with
//! ρ_Z = 1/Im z₁₁, ρ_Y = 1/Im z₂₂ and π_Y(Z) = z₁₁.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::connections::{multi_induce, parabolic_induce, ConnectionForm, NomizuForm, SharedForm, ZeroForm};
use crate::error::{Error, Result};
use crate::exterior::{
    curvature_form, pifiber_check, pullback_connection, Chart, Incidence, PiFiberFamily, PiFiberReport, SectionFn,
    SmoothMap, Stratum, VForm,
};
use crate::hc::{cayley_element, CanonicalExtension, Representation};
use crate::invariants::chern_form;
use crate::jet::{Jet, MatJet};
use crate::lie::{Flag, GroupSpec, ParabolicData};
use crate::linalg::{inverse, C64};

use super::bump::BumpProfile;
use super::model::{weight_jet, Chain, ControlData, EpsilonFamily, WeightFactor};
use super::patch::PatchAlgebra;

pub const Z: usize = 0;
pub const Y: usize = 1;
pub const X: usize = 2;

#[derive(Clone)]
pub struct Sp4Model {
    pub rep: Representation,
    pub family: EpsilonFamily,
    pub profile: BumpProfile,
    klingen: ParabolicData,
    siegel: ParabolicData,
    relative: ParabolicData,
    borel: ParabolicData,
    lam_klingen: CanonicalExtension,
    lam_siegel: CanonicalExtension,
    lam_relative: CanonicalExtension,
}

fn i_unit() -> C64 {
    C64::new(0.0, 1.0)
}

fn imag(z: &Jet) -> Jet {
    (z - &z.conj()).scale(C64::new(0.0, -0.5))
}

/// Z = (A·i + B)(C·i + D)⁻¹ for g = [[A, B], [C, D]].
pub fn mobius_jet(g: &MatJet) -> Result<MatJet> {
    let (top, bottom, left, right) = ([0, 1], [2, 3], [0, 1], [2, 3]);
    let num = g.select(&top, &left).scale(i_unit()).add(&g.select(&top, &right));
    let den = g.select(&bottom, &left).scale(i_unit()).add(&g.select(&bottom, &right));
    Ok(num.mul(&den.inverse()?))
}

/// H₁ section placed on the first symplectic pair (frame indices 0 and 2).
pub fn y_section(x: &[Jet]) -> Result<MatJet> {
    let s = Chart::H1.section(x)?;
    let (one, zero) = (Jet::real(1.0), Jet::real(0.0));
    let e = |i, j| s.entry(i, j);
    #[rustfmt::skip]
    let entries = [
        e(0, 0), zero.clone(), e(0, 1), zero.clone(),
        zero.clone(), one.clone(), zero.clone(), zero.clone(),
        e(1, 0), zero.clone(), e(1, 1), zero.clone(),
        zero.clone(), zero.clone(), zero.clone(), one,
    ];
    Ok(MatJet::from_entries(4, 4, &entries))
}

/// A stratum's connection: Σ_t w_t(g) ω_t(g, ġ) with weights read off g·iI.
#[derive(Clone)]
pub struct PatchedForm {
    pub on: usize,
    pub terms: Vec<(Vec<WeightFactor>, SharedForm)>,
    family: EpsilonFamily,
    profile: BumpProfile,
    dim_v: usize,
}

impl PatchedForm {
    fn rhos(&self, g: &MatJet) -> Result<Vec<Jet>> {
        if self.on == Z {
            return Ok(Vec::new());
        }
        let z = mobius_jet(g)?;
        let mut out = vec![imag(&z.entry(0, 0)).recip()];
        if self.on == X {
            out.push(imag(&z.entry(1, 1)).recip());
        }
        Ok(out)
    }

    pub fn weights(&self, g: &MatJet) -> Result<Vec<Jet>> {
        let rhos = self.rhos(g)?;
        Ok(self
            .terms
            .iter()
            .map(|(factors, _)| {
                factors.iter().fold(Jet::real(1.0), |acc, f| {
                    &acc * &weight_jet(&self.profile, self.family.eps(f.eps_of), &rhos[..f.at], f.stratum)
                })
            })
            .collect())
    }
}

impl ConnectionForm for PatchedForm {
    fn dim_v(&self) -> usize {
        self.dim_v
    }

    fn eval(&self, g: &MatJet, xdot: &MatJet) -> Result<MatJet> {
        let mut out = MatJet::constant(crate::linalg::zeros(self.dim_v));
        for (w, (_, form)) in self.weights(g)?.iter().zip(&self.terms) {
            if w.re() == 0.0 && w.d.iter().all(|d| d.norm() == 0.0) && w.h.iter().all(|h| h.norm() == 0.0) {
                continue;
            }
            out = out.add(&form.eval(g, xdot)?.scale_jet(w));
        }
        Ok(out)
    }
}

impl Sp4Model {
    pub fn new(rep_name: &str, eps0: f64) -> Result<Self> {
        let spec = GroupSpec::sp(2);
        let rep = Representation::parse(&spec, rep_name)?;
        let klingen = ParabolicData::new(&spec, Flag::maximal(1))?;
        let siegel = ParabolicData::new(&spec, Flag::maximal(2))?;
        let relative = ParabolicData::relative(&spec, &klingen.hermitian_pairs(), Flag::maximal(1))?;
        let borel = ParabolicData::new(&spec, Flag::new(vec![1, 2])?)?;
        let lam_klingen = CanonicalExtension::new(&rep, &klingen)?;
        let lam_siegel = CanonicalExtension::new(&rep, &siegel)?;
        let c21 = cayley_element(&siegel)? * inverse(&cayley_element(&klingen)?)?;
        let lam_relative = CanonicalExtension::with_cayley(&rep, c21)?;
        let dims = DIMS.to_vec();
        let family = EpsilonFamily { eps0, dims };
        Ok(Sp4Model {
            rep,
            family,
            profile: BumpProfile,
            klingen,
            siegel,
            relative,
            borel,
            lam_klingen,
            lam_siegel,
            lam_relative,
        })
    }

    pub fn chart_dim(k: usize) -> usize {
        [0, 2, 6][k]
    }

    pub fn section(k: usize) -> Result<SectionFn> {
        match k {
            X => Ok(Chart::H2.section_fn()),
            Y => Ok(Arc::new(y_section)),
            _ => Err(Error::UnsupportedSpace("the point stratum has no chart".into())),
        }
    }

    /// σ*ω on the chart of stratum k.
    pub fn pullback(&self, k: usize, form: SharedForm) -> Result<VForm> {
        Ok(pullback_connection(form, Self::chart_dim(k), Self::section(k)?))
    }

    /// π_Y: (x₁₁, x₁₂, x₂₂, y₁₁, y₁₂, y₂₂) ↦ (x₁₁, y₁₁).
    pub fn projection_xy() -> SmoothMap {
        SmoothMap::from_jet_fn(6, 2, 1, Arc::new(|x: &[Jet]| Ok(MatJet::from_entries(2, 1, &[x[0].clone(), x[3].clone()]))))
    }

    /// ρ_Y on the chart of X.
    pub fn rho_y_map() -> SmoothMap {
        SmoothMap::scalar(6, |x: &[Jet]| x[5].recip())
    }

    /// Point of X with ρ_Y = rho_y, ρ_Z = rho_z and small off-diagonal parts.
    pub fn sample_x<R: Rng>(rng: &mut R, rho_z: f64, rho_y: f64) -> Vec<f64> {
        let (y11, y22) = (1.0 / rho_z, 1.0 / rho_y);
        let y12 = rng.random_range(-0.3..0.3) * (y11 * y22).sqrt().min(1.0);
        vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), y11, y12, y22]
    }

    /// Chern forms σ¹, σ² of a connection on stratum k.
    pub fn chern_forms(&self, k: usize, form: SharedForm) -> Result<Vec<VForm>> {
        let curv = curvature_form(&self.pullback(k, form)?)?;
        (1..=self.rep.dim_v().min(2)).map(|i| chern_form(&curv, i)).collect()
    }
}

const DIMS: [usize; 3] = [0, 1, 3];

impl ControlData for Sp4Model {
    fn depth(&self) -> usize {
        3
    }

    fn dim_c(&self, k: usize) -> usize {
        DIMS[k]
    }

    fn stratum_of(&self, x: &[f64]) -> usize {
        match x.len() {
            0 => Z,
            2 => Y,
            _ => X,
        }
    }

    fn project(&self, x: &[f64], k: usize) -> Vec<f64> {
        match (self.stratum_of(x), k) {
            (_, Z) => Vec::new(),
            (X, Y) => vec![x[0], x[3]],
            _ => x.to_vec(),
        }
    }

    fn rho(&self, x: &[f64], k: usize) -> f64 {
        match (self.stratum_of(x), k) {
            (Y, Z) => 1.0 / x[1],
            (X, Z) => 1.0 / x[3],
            _ => 1.0 / x[5],
        }
    }
}

impl PatchAlgebra for Sp4Model {
    type Form = SharedForm;

    fn depth(&self) -> usize {
        3
    }

    fn nomizu(&self, k: usize) -> Result<SharedForm> {
        Ok(if k == Z {
            Arc::new(ZeroForm { dim_v: self.rep.dim_v() })
        } else {
            Arc::new(NomizuForm::new(&self.rep))
        })
    }

    fn induce(&self, upper: usize, lower: usize, base: &SharedForm) -> Result<SharedForm> {
        let (p, lam) = match (upper, lower) {
            (X, Y) => (&self.klingen, &self.lam_klingen),
            (X, Z) => (&self.siegel, &self.lam_siegel),
            (Y, Z) => (&self.relative, &self.lam_relative),
            _ => return Err(Error::MissingInductionData(format!("no parabolic for {lower} < {upper}"))),
        };
        Ok(Arc::new(parabolic_induce(base.clone(), p, lam)?))
    }

    fn induce_chain(&self, chain: &Chain, base: &SharedForm) -> Result<SharedForm> {
        match chain.0.as_slice() {
            [Z, Y, X] => Ok(Arc::new(multi_induce(base.clone(), &self.borel, &self.lam_siegel)?)),
            [single] if *single <= X => Ok(base.clone()),
            [lower, upper] => self.induce(*upper, *lower, base),
            _ => Err(Error::MissingInductionData(format!("chain {:?}", chain.0))),
        }
    }

    fn combine(&self, on: usize, terms: Vec<(Vec<WeightFactor>, SharedForm)>) -> Result<SharedForm> {
        Ok(Arc::new(PatchedForm {
            on,
            terms,
            family: self.family.clone(),
            profile: self.profile,
            dim_v: self.rep.dim_v(),
        }))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sp4PatchReport {
    /// ∇^p from the recursion against the chain closed form.
    pub recursion_vs_closed: f64,
    /// ∇^p against the localized formula at the localizing stratum.
    pub localization: f64,
    /// Number of samples per localizing stratum Z, Y, X.
    pub localized_counts: [usize; 3],
    /// σ¹, σ² of ∇_X^p against π_Y inside T_Y(ε_X/2).
    pub chern_pifiber: PiFiberReport,
    /// Largest |σ¹| seen in the tube, so a vanishing form cannot pass vacuously.
    pub chern_magnitude: f64,
    /// Raw curvature of ∇_X^p in the mixed region.
    pub curvature_pifiber: PiFiberReport,
}

/// Samples in T_Y(ε_X/2) with ρ_Z spread across the regions of ε_X and ε_Y.
pub fn tube_samples<R: Rng>(model: &Sp4Model, rng: &mut R, count: usize) -> Vec<Vec<f64>> {
    let (ex, ey) = (model.family.eps(X), model.family.eps(Y));
    let bands = [(0.2 * ex, 0.5 * ex), (0.5 * ex, 0.75 * ex), (0.75 * ex, 0.5 * ey), (0.5 * ey, 0.75 * ey), (0.75 * ey, 1.5)];
    (0..count)
        .map(|i| {
            let (lo, hi) = bands[i % bands.len()];
            let rho_z = rng.random_range(lo..hi);
            let rho_y = rng.random_range(0.2 * ex..0.45 * ex);
            Sp4Model::sample_x(rng, rho_z, rho_y)
        })
        .collect()
}

/// Samples cycling through regions whose localizing stratum is Z, Y and X, including
/// the transition bands of the bump functions.
pub fn model_samples<R: Rng>(model: &Sp4Model, rng: &mut R, count: usize) -> Vec<Vec<f64>> {
    let (ex, ey) = (model.family.eps(X), model.family.eps(Y));
    let regions = [
        ((0.4 * ex, 0.5 * ey), (0.2 * ex, 0.7 * ex)),
        ((0.5 * ey, 0.8 * ey), (0.2 * ex, 0.7 * ex)),
        ((0.5 * ex, 0.8 * ex), (0.5 * ex, 2.0 * ex)),
        ((0.5 * ex, 1.2 * ey), (0.4 * ex, 0.8 * ex)),
    ];
    (0..count)
        .map(|i| {
            let ((z0, z1), (y0, y1)) = regions[i % regions.len()];
            let rho_z = rng.random_range(z0..z1);
            let rho_y = rng.random_range(y0..y1);
            Sp4Model::sample_x(rng, rho_z, rho_y)
        })
        .collect()
}

/// Left-trivialized tangent of the X section along a coordinate direction.
fn section_tangent(x: &[f64], dir: usize) -> Result<(MatJet, MatJet)> {
    let sigma = Chart::H2.section(&Jet::vars(x, 1))?;
    let base = sigma.truncate(0);
    let xdot = base.inverse()?.mul(&sigma.partial(dir)?);
    Ok((base, xdot))
}

pub fn patch_report<R: Rng>(model: &Sp4Model, rng: &mut R, samples: usize, tol: f64) -> Result<Sp4PatchReport> {
    use super::model::localize_stratum;
    use super::patch::{assemble_all, chain_closed_form, localized_form};
    let forms = assemble_all(model)?;
    let closed = chain_closed_form(model, X)?;
    let local: Vec<SharedForm> = (0..3).map(|w| localized_form(model, w, X)).collect::<Result<_>>()?;

    let mut recursion_vs_closed = 0.0f64;
    let mut localization = 0.0f64;
    let mut localized_counts = [0usize; 3];
    for x in model_samples(model, rng, samples) {
        let w = localize_stratum(model, &model.profile, &model.family, &x);
        localized_counts[w] += 1;
        for dir in 0..6 {
            let (g, xdot) = section_tangent(&x, dir)?;
            let global = forms[X].eval(&g, &xdot)?.v;
            recursion_vs_closed = recursion_vs_closed.max(crate::linalg::dist(&global, &closed.eval(&g, &xdot)?.v));
            localization = localization.max(crate::linalg::dist(&global, &local[w].eval(&g, &xdot)?.v));
        }
    }

    let tube = tube_samples(model, rng, samples);
    let chern_x = model.chern_forms(X, forms[X].clone())?;
    let chern_y = model.chern_forms(Y, forms[Y].clone())?;
    let mut chern_pifiber: Option<PiFiberReport> = None;
    let mut chern_magnitude = 0.0f64;
    for x in &tube {
        chern_magnitude = chern_magnitude.max(chern_x[0].max_norm_at(x)?);
    }
    for (sx, sy) in chern_x.into_iter().zip(chern_y) {
        let family = PiFiberFamily {
            strata: vec![Stratum { name: "Y".into(), form: sy }, Stratum { name: "X".into(), form: sx }],
            incidences: vec![Incidence {
                upper: 1,
                lower: 0,
                projection: Sp4Model::projection_xy(),
                tube: Sp4Model::rho_y_map(),
                radius: model.family.eps(X) / 2.0,
                samples: tube.clone(),
            }],
        };
        let rep = family.check(tol)?;
        chern_pifiber = Some(match chern_pifiber {
            None => rep,
            Some(prev) => merge(prev, rep),
        });
    }

    let ex = model.family.eps(X);
    let mixed: Vec<Vec<f64>> = (0..samples.clamp(1, 20))
        .map(|_| {
            let rho_z = rng.random_range(0.55 * ex..0.7 * ex);
            let rho_y = rng.random_range(0.2 * ex..0.45 * ex);
            Sp4Model::sample_x(rng, rho_z, rho_y)
        })
        .collect();
    let curv = curvature_form(&model.pullback(X, forms[X].clone())?)?;
    let curvature_pifiber = pifiber_check(&curv, &Sp4Model::projection_xy(), &mixed, tol)?;

    Ok(Sp4PatchReport {
        recursion_vs_closed,
        localization,
        localized_counts,
        chern_pifiber: chern_pifiber.ok_or_else(|| Error::Invalid("no Chern forms".into()))?,
        chern_magnitude,
        curvature_pifiber,
    })
}

fn merge(a: PiFiberReport, b: PiFiberReport) -> PiFiberReport {
    PiFiberReport {
        max_vertical_contraction: a.max_vertical_contraction.max(b.max_vertical_contraction),
        max_compatibility: a.max_compatibility.max(b.max_compatibility),
        samples: a.samples + b.samples,
        tol: a.tol,
        pass: a.pass && b.pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn control_identities_hold_exactly() {
        let model = Sp4Model::new("standard", 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for x in model_samples(&model, &mut rng, 50) {
            let y = model.project(&x, Y);
            assert_eq!(model.rho(&y, Z), model.rho(&x, Z));
            assert_eq!(model.project(&y, Z), model.project(&x, Z));
        }
        assert_eq!(model.family.eps(X), 0.125);
    }

    #[test]
    fn weights_from_the_group_match_coordinates() {
        let model = Sp4Model::new("standard", 1.0).unwrap();
        let terms = vec![(vec![WeightFactor { stratum: Y, eps_of: X, at: X }], model.nomizu(X).unwrap())];
        let form = PatchedForm { on: X, terms, family: model.family.clone(), profile: BumpProfile, dim_v: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for x in tube_samples(&model, &mut rng, 20) {
            let g = Chart::H2.section(&Jet::vars(&x, 0)).unwrap();
            let w = form.weights(&g).unwrap()[0].re();
            let expect = super::super::model::partition_weight(&model, &model.profile, model.family.eps(X), &x, Y);
            assert!((w - expect).abs() < 1e-12);
        }
        // The Klingen hermitian part of the X section is the Y section at (x₁₁, y₁₁).
        let x = [0.2, -0.1, 0.4, 3.0, 0.2, 20.0];
        let g = Chart::H2.section_value(&x).unwrap();
        let gh = model.klingen.decompose_group(&g).unwrap().hermitian;
        let ys = y_section(&Jet::vars(&[0.2, 3.0], 0)).unwrap().v;
        assert!(dist(&gh, &ys) < 1e-10);
    }

    #[test]
    fn deepest_tube_is_siegel_induced() {
        let model = Sp4Model::new("standard", 1.0).unwrap();
        let forms = super::super::patch::assemble_all(&model).unwrap();
        let direct = model.induce(X, Z, &model.nomizu(Z).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let x = Sp4Model::sample_x(&mut rng, 0.3 * model.family.eps(X), 0.4);
        for dir in 0..6 {
            let (g, xdot) = section_tangent(&x, dir).unwrap();
            assert!(dist(&forms[X].eval(&g, &xdot).unwrap().v, &direct.eval(&g, &xdot).unwrap().v) < 1e-12);
        }
    }

    #[test]
    fn patched_connection_report() {
        let model = Sp4Model::new("standard", 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let rep = patch_report(&model, &mut rng, 20, 1e-5).unwrap();
        assert!(rep.recursion_vs_closed <= 1e-10, "{rep:?}");
        assert!(rep.localization <= 1e-10, "{rep:?}");
        assert!(rep.localized_counts.iter().all(|&c| c > 0), "{rep:?}");
        assert!(rep.chern_pifiber.pass && rep.chern_magnitude > 1e-3, "{rep:?}");
        assert!(!rep.curvature_pifiber.pass, "{rep:?}");
    }
}
