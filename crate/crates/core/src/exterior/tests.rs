use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::connections::{nomizu, parabolic_induce, InvariantConnection, NomizuForm, SharedForm};
use crate::hc::{CanonicalExtension, Representation};
use crate::jet::Jet;
use crate::lie::{GroupSpec, ParabolicData};
use crate::linalg::{c, commutator, dist, from_real, inverse, CMat, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Random polynomial q-form with matrix values, also returned as raw polynomials.
fn random_poly_form<R: Rng>(rng: &mut R, m: usize, q: usize, rows: usize, degree: u32) -> (VForm, Vec<Vec<Poly>>) {
    let mut raw = Vec::new();
    let mut terms = Vec::new();
    for idx in multi_indices(m, q) {
        let polys: Vec<Poly> = (0..rows * rows).map(|_| Poly::random(m, degree, rng)).collect();
        terms.push((idx, SmoothMap::poly(rows, rows, polys.clone()).unwrap()));
        raw.push(polys);
    }
    (VForm::from_maps(m, q, terms).unwrap(), raw)
}

fn scalar_poly(m: usize, p: Poly) -> SmoothMap {
    assert_eq!(p.nvars, m);
    SmoothMap::poly(1, 1, vec![p]).unwrap()
}

#[test]
fn exterior_derivative_examples() {
    let f = VForm::function(SmoothMap::constant(2, CMat::from_element(1, 1, c(3.0)))).unwrap();
    assert!(f.d().max_norm_at(&[0.3, 0.2]).unwrap() == 0.0);

    // d(x dy) = dx∧dy
    let x_dy = VForm::from_maps(2, 1, vec![(vec![1], scalar_poly(2, Poly::var(2, 0)))]).unwrap();
    let d = x_dy.d();
    assert_eq!(d.degree, 2);
    assert!((d.values(&[0.7, -0.1]).unwrap()[0][(0, 0)] - c(1.0)).norm() < 1e-15);
}

#[test]
fn d_squared_vanishes_and_matches_symbolic_derivative() {
    let mut rng = rng(21);
    let (form, raw) = random_poly_form(&mut rng, 4, 2, 1, 4);
    let dd = form.d().d();
    let d = form.d();
    let src = multi_indices(4, 2);
    for _ in 0..50 {
        let x = random_point(&mut rng, 4);
        assert!(dd.max_norm_at(&x).unwrap() <= 1e-8);
        // (dω)_K = Σ_a (−1)^a ∂_{K_a} ω_{K∖K_a}, symbolically.
        for (k, got) in multi_indices(4, 3).iter().zip(d.values(&x).unwrap()) {
            let mut expect = c(0.0);
            for (a, &i) in k.iter().enumerate() {
                let rest: Vec<usize> = k.iter().copied().filter(|&j| j != i).collect();
                let pos = src.iter().position(|s| *s == rest).unwrap();
                let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                expect += raw[pos][0].derivative(i).eval(&x) * sign;
            }
            assert!((got[(0, 0)] - expect).norm() < 1e-12);
        }
    }
}

#[test]
fn d_is_an_antiderivation() {
    let mut rng = rng(22);
    for (p, q) in [(1, 1), (1, 2), (0, 2)] {
        let (a, _) = random_poly_form(&mut rng, 4, p, 2, 3);
        let (b, _) = random_poly_form(&mut rng, 4, q, 2, 3);
        let lhs = a.wedge(&b).unwrap().d();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a.d().wedge(&b).unwrap().add(&a.wedge(&b.d()).unwrap().scale(c(sign))).unwrap();
        for _ in 0..10 {
            let x = random_point(&mut rng, 4);
            for (l, r) in lhs.values(&x).unwrap().iter().zip(rhs.values(&x).unwrap()) {
                assert!(dist(l, &r) <= 1e-6);
            }
        }
    }
}

#[test]
fn bracket_conventions() {
    let a_mat = from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let b_mat = from_real(&[&[0.0, 0.0], &[1.0, 0.0]]);
    let alpha = VForm::from_maps(2, 1, vec![(vec![0], SmoothMap::constant(2, a_mat.clone()))]).unwrap();
    let beta = VForm::from_maps(2, 1, vec![(vec![1], SmoothMap::constant(2, b_mat.clone()))]).unwrap();
    let br = alpha.bracket(&beta).unwrap();
    let val = br.eval_on(&[0.0, 0.0], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert!(dist(&val, &commutator(&a_mat, &b_mat)) < 1e-15);

    // Commuting values: [α, α] = 0.
    let diag = from_real(&[&[1.0, 0.0], &[0.0, 2.0]]);
    let comm = VForm::from_maps(
        2,
        1,
        vec![
            (vec![0], SmoothMap::constant(2, diag.clone())),
            (vec![1], SmoothMap::constant(2, &diag * c(3.0))),
        ],
    )
    .unwrap();
    assert!(comm.bracket(&comm).unwrap().max_norm_at(&[0.1, 0.2]).unwrap() == 0.0);

    let mut rng = rng(23);
    let (w, _) = random_poly_form(&mut rng, 3, 1, 3, 2);
    let ww = w.bracket(&w).unwrap();
    for _ in 0..20 {
        let x = random_point(&mut rng, 3);
        let u = random_point(&mut rng, 3);
        let v = random_point(&mut rng, 3);
        let lhs = ww.eval_on(&x, &[u.clone(), v.clone()]).unwrap();
        let wu = w.eval_on(&x, &[u]).unwrap();
        let wv = w.eval_on(&x, &[v]).unwrap();
        assert!(dist(&lhs, &(commutator(&wu, &wv) * c(2.0))) <= 1e-12);
    }
}

#[test]
fn curvature_examples() {
    let n = from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let x = Poly::var(2, 0);
    let omega = VForm::from_maps(
        2,
        1,
        vec![(vec![1], SmoothMap::poly(2, 2, vec![x.scale(c(0.0)), x.clone(), x.scale(c(0.0)), x.scale(c(0.0))]).unwrap())],
    )
    .unwrap();
    let curv = curvature_form(&omega).unwrap();
    assert!(dist(&curv.values(&[0.4, 0.9]).unwrap()[0], &n) < 1e-15);

    // A homomorphism G → GL(V) gives a flat connection.
    let spec = GroupSpec::sp(1);
    let defining = Representation::parse(&spec, "defining").unwrap();
    let flat = InvariantConnection::from_fn(&defining, |m| m.clone()).unwrap();
    let pulled = Chart::H1.pullback(Arc::new(flat));
    let curv = curvature_form(&pulled).unwrap();
    assert!(curv.max_norm_at(&[0.3, 1.4]).unwrap() <= 1e-8);
}

#[test]
fn chart_curvature_matches_identity_curvature() {
    let spec = GroupSpec::su_compact(2, 1);
    let rep = Representation::parse(&spec, "weight:2").unwrap();
    let conn = nomizu(&rep);
    let curv0 = conn.curvature();
    let pulled = Chart::Su2Stereographic.pullback(Arc::new(conn));
    let curv = curvature_form(&pulled).unwrap();
    let mut rng = rng(24);
    for _ in 0..20 {
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
        let sigma = Chart::Su2Stereographic.section(&Jet::vars(&x, 1)).unwrap();
        let inv = inverse(&sigma.v).unwrap();
        let (a, b) = (&inv * sigma.grad(0), &inv * sigma.grad(1));
        let expect = curv0.eval(&a, &b);
        assert!(dist(&curv.values(&x).unwrap()[0], &expect) <= 1e-6);
    }
}

#[test]
fn patch_combination_examples() {
    let mut rng = rng(25);
    let pts: Vec<Vec<f64>> = (0..100).map(|_| random_point(&mut rng, 3)).collect();
    let (w1, _) = random_poly_form(&mut rng, 3, 1, 2, 2);
    let one = scalar_poly(3, Poly::constant(3, c(1.0)));
    let rep = patch_combination_curvature(&[one], std::slice::from_ref(&w1), &pts, 1e-12).unwrap();
    assert!(rep.max_discrepancy < 1e-12);

    let half = scalar_poly(3, Poly::constant(3, c(0.5)));
    let d1 = from_real(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let d2 = from_real(&[&[2.0, 0.0], &[0.0, 5.0]]);
    let c1 = VForm::from_maps(3, 1, vec![(vec![0], SmoothMap::constant(3, d1))]).unwrap();
    let c2 = VForm::from_maps(3, 1, vec![(vec![2], SmoothMap::constant(3, d2))]).unwrap();
    let rep = patch_combination_curvature(&[half.clone(), half], &[c1, c2], &pts, 1e-12).unwrap();
    assert!(rep.max_discrepancy < 1e-12);

    // Three random polynomial weights normalised to a partition: f₃ = 1 − f₁ − f₂.
    let f1 = Poly::random(3, 2, &mut rng);
    let f2 = Poly::random(3, 2, &mut rng);
    let f3 = Poly::constant(3, c(1.0)).add(&f1.scale(c(-1.0))).add(&f2.scale(c(-1.0)));
    let weights = [scalar_poly(3, f1), scalar_poly(3, f2), scalar_poly(3, f3)];
    let forms: Vec<VForm> = (0..3).map(|_| random_poly_form(&mut rng, 3, 1, 2, 2).0).collect();
    let rep = patch_combination_curvature(&weights, &forms, &pts, 1e-12).unwrap();
    assert!(rep.max_discrepancy <= 1e-6, "{}", rep.max_discrepancy);

    let bad = [scalar_poly(3, Poly::constant(3, c(0.7))), scalar_poly(3, Poly::constant(3, c(0.7)))];
    assert!(matches!(
        patch_combination_curvature(&bad, &forms[..2], &pts, 1e-12),
        Err(crate::Error::PartitionViolation { .. })
    ));
}

#[test]
fn contraction_examples() {
    let one = SmoothMap::constant(2, CMat::from_element(1, 1, c(1.0)));
    let dxdy = VForm::from_maps(2, 2, vec![(vec![0, 1], one)]).unwrap();
    let i = dxdy.contract(&[1.0, 0.0]).unwrap();
    assert_eq!(i.degree, 1);
    let vals = i.values(&[0.0, 0.0]).unwrap();
    assert!((vals[0][(0, 0)]).norm() == 0.0 && (vals[1][(0, 0)] - c(1.0)).norm() == 0.0);
    let f = VForm::function(SmoothMap::constant(2, CMat::from_element(1, 1, c(1.0)))).unwrap();
    assert!(matches!(f.contract(&[1.0, 0.0]), Err(crate::Error::DegreeZero)));

    let mut rng = rng(26);
    let (w, _) = random_poly_form(&mut rng, 4, 3, 2, 2);
    for _ in 0..10 {
        let x = random_point(&mut rng, 4);
        let vs: Vec<Vec<f64>> = (0..3).map(|_| random_point(&mut rng, 4)).collect();
        let iv = w.contract(&vs[0]).unwrap();
        assert!(iv.contract(&vs[0]).unwrap().max_norm_at(&x).unwrap() <= 1e-12);
        let lhs = iv.eval_on(&x, &vs[1..]).unwrap();
        let rhs = w.eval_on(&x, &vs).unwrap();
        assert!(dist(&lhs, &rhs) <= 1e-12);
    }
}

fn coordinate_projection(m: usize, keep: Vec<usize>) -> SmoothMap {
    let rows = keep.len();
    SmoothMap::poly(rows, 1, keep.iter().map(|&i| Poly::var(m, i)).collect()).unwrap()
}

#[test]
fn pifiber_examples() {
    let mut rng = rng(27);
    let pts: Vec<Vec<f64>> = (0..20).map(|_| random_point(&mut rng, 3)).collect();
    let proj = coordinate_projection(3, vec![0]);
    // η = g(x) dx pulled back along (x, y, r) ↦ x.
    let g = Poly::random(3, 2, &mut rng);
    let g_x_only = Poly { nvars: 3, terms: g.terms.into_iter().filter(|(e, _)| e[1] == 0 && e[2] == 0).collect() };
    let pulled = VForm::from_maps(3, 1, vec![(vec![0], scalar_poly(3, g_x_only))]).unwrap();
    assert!(pifiber_check(&pulled, &proj, &pts, 1e-12).unwrap().pass);

    let with_dr = VForm::from_maps(3, 1, vec![(vec![2], scalar_poly(3, Poly::constant(3, c(0.3))))]).unwrap();
    let rep = pifiber_check(&with_dr, &proj, &pts, 1e-9).unwrap();
    assert!(!rep.pass && rep.max_vertical_contraction > 1e-9);
}

#[test]
fn induced_curvature_is_horizontal_on_siegel_space() {
    let spec = GroupSpec::sp(2);
    let rep = Representation::parse(&spec, "standard").unwrap();
    let klingen = ParabolicData::named(&spec, "klingen").unwrap();
    let lam = CanonicalExtension::new(&rep, &klingen).unwrap();
    let base: SharedForm = Arc::new(NomizuForm::new(&rep));
    let induced = parabolic_induce(base, &klingen, &lam).unwrap();
    let omega = Chart::H2.pullback(Arc::new(induced));
    let curv = curvature_form(&omega).unwrap();
    // π(Z) = z₁₁ in coordinates (x11, y11).
    let proj = coordinate_projection(6, vec![0, 3]);
    let mut rng = rng(28);
    let pts: Vec<Vec<f64>> = (0..10)
        .map(|_| {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (a, b, d) = (rng.random_range(0.5..2.0), rng.random_range(-0.5..0.5), rng.random_range(0.5..2.0));
            vec![x[0], x[1], x[2], a * a, a * b, b * b + d * d]
        })
        .collect();
    let rep = pifiber_check(&curv, &proj, &pts, 1e-6).unwrap();
    assert!(rep.pass, "{}", rep.max_vertical_contraction);
    // Horizontal part is the base curvature on H1.
    let base_curv = curvature_form(&Chart::H1.pullback(Arc::new(NomizuForm::new(&rep_sp2())))).unwrap();
    for x in &pts {
        let up = curv.coefficient(x, &[0, 3]).unwrap();
        let down = base_curv.values(&[x[0], x[3]]).unwrap()[0].clone();
        let lam_l = lam.eval(&ParabolicData::named(&spec, "klingen").unwrap().decompose_group(&Chart::H2.section_value(x).unwrap()).unwrap().linear).unwrap();
        let twisted = inverse(&lam_l).unwrap() * embed_top_left(&down) * &lam_l;
        assert!(dist(&up, &twisted) < 1e-6);
    }
}

fn rep_sp2() -> Representation {
    Representation::parse(&GroupSpec::sp(1), "standard").unwrap()
}

fn embed_top_left(m: &CMat) -> CMat {
    let mut out = CMat::zeros(2, 2);
    out[(0, 0)] = m[(0, 0)];
    out
}

#[test]
fn p1_chern_number_of_the_tangent_bundle() {
    let spec = GroupSpec::su_compact(2, 1);
    let rep = Representation::parse(&spec, "weight:2").unwrap();
    let pulled = Chart::Su2Stereographic.pullback(Arc::new(nomizu(&rep)));
    let curv = curvature_form(&pulled).unwrap();
    let first_chern = curv.scale(C64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI)));
    let value = integrate_p1(&first_chern, 40, 16).unwrap();
    assert!((value.re - 2.0).abs() < 1e-3, "{value}");
    assert!(value.im.abs() < 1e-9);
}
