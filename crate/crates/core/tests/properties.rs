use std::sync::Arc;

use chernpatch::compact_dual::{ring_multiply, Grassmannian, SchubertClass};
use chernpatch::connections::nomizu;
use chernpatch::exterior::{multi_indices, Poly, SmoothMap, VForm};
use chernpatch::hc::{hc_decompose, Representation};
use chernpatch::invariants::{random_commuting_pair, springer_check_exact, InvariantPolynomial};
use chernpatch::lie::{expm, CartanSplit, GroupSpec, LieAlgebra};
use chernpatch::linalg::{c, dist, inverse, CMat};
use chernpatch::strata::{family_vanishing_check, BumpProfile, EpsilonFamily, FlagTubeModel};
use chernpatch::suite::{run_suite, SuiteConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn specs() -> Vec<GroupSpec> {
    vec![GroupSpec::sp(1), GroupSpec::sp(2), GroupSpec::su(1, 1), GroupSpec::su(2, 1), GroupSpec::su_compact(2, 1)]
}

fn random_form(rng: &mut ChaCha8Rng, m: usize, degree: usize) -> VForm {
    let terms = multi_indices(m, degree)
        .into_iter()
        .map(|idx| {
            let polys = (0..4).map(|_| Poly::random(m, 2, rng)).collect();
            (idx, SmoothMap::poly(2, 2, polys).unwrap())
        })
        .collect();
    VForm::from_maps(m, degree, terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn cartan_projectors_split_identity(seed in any::<u64>(), which in 0usize..5) {
        let spec = &specs()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let split = CartanSplit::new(spec).unwrap();
        let x = LieAlgebra::new(spec).random(|| rng.random_range(-2.0..2.0));
        let (k, p) = (split.k_part(&x), split.p_part(&x));
        prop_assert!(dist(&(&k + &p), &x) <= 1e-12);
        prop_assert!(split.k_part(&p).norm() <= 1e-12);
        prop_assert!(split.p_part(&k).norm() <= 1e-12);
    }

    #[test]
    fn invariant_polynomials_are_conjugation_invariant(seed in any::<u64>(), n in 2usize..5, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = CMat::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0)));
        let g = expm(&CMat::from_fn(n, n, |_, _| c(rng.random_range(-0.5..0.5))));
        let conj = &g * &x * inverse(&g).unwrap();
        let f = InvariantPolynomial::elementary(k.min(n));
        prop_assert!((f.eval(&conj) - f.eval(&x)).norm() <= 1e-9);
    }

    #[test]
    fn d_is_an_antiderivation(seed in any::<u64>(), p in 0usize..2, q in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = random_form(&mut rng, 3, p);
        let beta = random_form(&mut rng, 3, q);
        let lhs = alpha.wedge(&beta).unwrap().d();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = alpha.d().wedge(&beta).unwrap().add(&alpha.wedge(&beta.d()).unwrap().scale(c(sign))).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        prop_assert!(lhs.sub(&rhs).unwrap().max_norm_at(&x).unwrap() <= 1e-6);
    }

    #[test]
    fn partition_identity_and_projection_compatibility(seed in any::<u64>(), len in 1usize..5, eps0 in 0.05f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flag = FlagTubeModel::standard(len);
        let family = EpsilonFamily::new(&flag, eps0);
        let points: Vec<Vec<f64>> = (0..20).map(|_| {
            let k = rng.random_range(0..len);
            flag.sample(&mut rng, k, 1.5 * eps0)
        }).collect();
        let rep = family_vanishing_check(&flag, &BumpProfile, &family, &points, 1e-12);
        prop_assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn schubert_ring_is_commutative_and_associative(seed in any::<u64>(), k in 1usize..4, extra in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = Grassmannian::new(k, k + extra).unwrap();
        let basis = space.basis();
        let mut pick = || SchubertClass::sigma(space, basis[rng.random_range(0..basis.len())].clone());
        let (a, b, cc) = (pick(), pick(), pick());
        prop_assert_eq!(ring_multiply(&a, &b).unwrap(), ring_multiply(&b, &a).unwrap());
        let left = ring_multiply(&ring_multiply(&a, &b).unwrap(), &cc).unwrap();
        let right = ring_multiply(&a, &ring_multiply(&b, &cc).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn harish_chandra_factors_multiply_back(seed in any::<u64>(), which in 0usize..4) {
        let spec = &specs()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = expm(&LieAlgebra::new(spec).random(|| rng.random_range(-0.6..0.6)));
        let parts = hc_decompose(spec, &g).unwrap();
        prop_assert!(dist(&(&parts.p_plus * &parts.k_c * &parts.p_minus), &g) <= 1e-10);
    }

    #[test]
    fn springer_exact_on_constructed_pairs(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, n) = random_commuting_pair(&mut rng, dim);
        for k in 1..=dim {
            let r = springer_check_exact(&x, &n, &InvariantPolynomial::elementary(k)).unwrap();
            prop_assert!(num_traits::Zero::is_zero(&r));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn reports_depend_only_on_config(seed in any::<u64>()) {
        let mut cfg = SuiteConfig::new("vanishing", seed);
        cfg.samples = Some(400);
        prop_assert_eq!(run_suite(&cfg).unwrap().to_json(), run_suite(&cfg).unwrap().to_json());
        cfg.suite = "springer".into();
        cfg.samples = Some(10);
        prop_assert_eq!(run_suite(&cfg).unwrap().to_json(), run_suite(&cfg).unwrap().to_json());
    }
}

#[test]
fn nomizu_curvature_vanishes_on_compact_directions() {
    for (spec, name) in [(GroupSpec::sp(2), "standard"), (GroupSpec::su(1, 1), "weight:2"), (GroupSpec::sp(2), "sym2")] {
        let rep = Representation::parse(&spec, name).unwrap();
        let conn = Arc::new(nomizu(&rep));
        let curv = conn.curvature();
        for k in rep.cartan.k.basis() {
            for g in conn.algebra.basis() {
                assert!(curv.eval(k, g).norm() <= 1e-12);
            }
        }
    }
}
