//! Named verification suites producing versioned, seed-deterministic JSON reports.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::compact_dual::{
    chern_class, chern_number, generation_check, generation_check_with, integrate_class, power, ring_multiply, BoxPartition,
    Bundle, ChernMonomial, SchubertClass, Space,
};
use crate::connections::{nomizu, parabolic_induce, InvariantConnection, NomizuForm, SharedForm};
use crate::error::{Error, Result};
use crate::exterior::{
    curvature_form, integrate_p1, multi_indices, patch_combination_curvature, pifiber_check, Chart, Poly, SmoothMap, VForm,
};
use crate::hc::{extension_compat_check, matrix_to_json, CanonicalExtension, Representation};
use crate::invariants::{chern_factor, random_commuting_pair, springer_check, springer_check_exact, InvariantPolynomial, QMat};
use crate::jet::Jet;
use crate::lie::{expm, GroupSpec, ParabolicData};
use crate::linalg::{c, commutator, dist, inverse, norm, CMat};
use crate::strata::sp4::tube_samples;
use crate::strata::{
    chain_weights, family_vanishing_check, patch_report, BumpProfile, EpsilonFamily, FlagTubeModel, ModelJson,
    Sp4Model,
};

pub const SCHEMA: u32 = 1;

pub const SUITES: [&str; 12] = [
    "partition",
    "vanishing",
    "patch-curvature",
    "springer",
    "classification",
    "nomizu-bridge",
    "pifiber-induced",
    "canonical-extension",
    "patched",
    "p1-chern",
    "schubert",
    "all",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub seed: u64,
    /// Replaces every check's default tolerance.
    pub tol: Option<f64>,
    /// Replaces every check's primary sample count.
    pub samples: Option<usize>,
    pub model: Option<ModelJson>,
    /// Injects a known-bad input (negative control).
    pub inject_fault: bool,
}

impl SuiteConfig {
    pub fn new(suite: &str, seed: u64) -> Self {
        SuiteConfig { suite: suite.into(), seed, ..Default::default() }
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn samples(&self, default: usize) -> usize {
        self.samples.unwrap_or(default).max(1)
    }

    fn eps0(&self, default: f64) -> f64 {
        self.model.as_ref().map_or(default, |m| m.eps0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub paper_anchor: String,
    pub max_residual: f64,
    pub tol: f64,
    pub samples: usize,
    pub pass: bool,
}

impl Check {
    fn within(name: &str, anchor: &str, residual: f64, tol: f64, samples: usize) -> Self {
        Check { name: name.into(), paper_anchor: anchor.into(), max_residual: residual, tol, samples, pass: residual <= tol }
    }

    fn failed(name: &str, anchor: &str, err: &Error) -> Self {
        Check {
            name: format!("{name}: {err}"),
            paper_anchor: anchor.into(),
            max_residual: f64::INFINITY,
            tol: 0.0,
            samples: 0,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Worker count from CHERNPATCH_THREADS, default 1.
pub fn thread_count() -> usize {
    std::env::var("CHERNPATCH_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0).unwrap_or(1)
}

/// Stable per-suite stream so reports do not depend on scheduling.
fn rng_for(seed: u64, suite: &str) -> ChaCha8Rng {
    let hash = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ hash)
}

type SuiteFn = fn(&SuiteConfig, &mut ChaCha8Rng) -> Result<Vec<Check>>;

fn suite_fn(name: &str) -> Option<(SuiteFn, &'static str)> {
    Some(match name {
        "partition" => (partition as SuiteFn, "partition of unity identity"),
        "vanishing" => (vanishing, "vanishing lemma for the ε-family"),
        "patch-curvature" => (patch_curvature, "curvature of a patched connection"),
        "springer" => (springer, "f(x + n) = f(x) for commuting nilpotent n"),
        "classification" => (classification, "classification of invariant connections"),
        "nomizu-bridge" => (nomizu_bridge, "Nomizu curvature Ω₀(ġ, ḣ) = [ω₀(ġ), ω₀(ḣ)] − ω₀([ġ, ḣ])"),
        "pifiber-induced" => (pifiber_induced, "induced curvature is a π-pullback"),
        "canonical-extension" => (canonical_extension, "natural extension λ₁ and λ₁(g_{2ℓ}) = λ₂(g_{2ℓ})"),
        "patched" => (patched, "patched connection, chain formula and localization"),
        "p1-chern" => (p1_chern, "Chern number of the tangent bundle of P¹"),
        "schubert" => (schubert, "Chern numbers of compact duals and generation of cohomology"),
        _ => return None,
    })
}

pub fn run_suite(config: &SuiteConfig) -> Result<Report> {
    let names: Vec<&str> = if config.suite == "all" {
        SUITES[..SUITES.len() - 1].to_vec()
    } else if suite_fn(&config.suite).is_some() {
        vec![config.suite.as_str()]
    } else {
        return Err(Error::Invalid(format!("unknown suite {}; expected one of {}", config.suite, SUITES.join(", "))));
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let groups: Vec<Vec<Check>> = pool.install(|| {
        names
            .par_iter()
            .map(|name| {
                let (f, anchor) = suite_fn(name).expect("known suite");
                let mut rng = rng_for(config.seed, name);
                f(config, &mut rng).unwrap_or_else(|e| vec![Check::failed(name, anchor, &e)])
            })
            .collect()
    });
    let checks: Vec<Check> = groups.into_iter().flatten().collect();
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { schema: SCHEMA, suite: config.suite.clone(), seed: config.seed, checks, pass })
}

/// Flags of lengths 1 to 4 with dimensions 0, 1, 2, …
pub fn default_forest_model() -> ModelJson {
    let mut strata = Vec::new();
    let mut flags = Vec::new();
    for len in 1..=4 {
        let names: Vec<String> = (0..len).map(|k| format!("F{len}Y{k}")).collect();
        for (k, name) in names.iter().enumerate() {
            strata.push(crate::strata::StratumJson { name: name.clone(), dim_c: k });
        }
        flags.push(names);
    }
    ModelJson { strata, flags, eps0: 0.5, profile: "exp".into(), geometry: None }
}

fn partition(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let model = config.model.clone().unwrap_or_else(default_forest_model);
    let forest = model.forest()?;
    let count = config.samples(10_000);
    let tol = config.tol(1e-12);
    let profile = BumpProfile;
    let mut sum = 0.0f64;
    let mut compat = 0.0f64;
    let mut chains = 0.0f64;
    for i in 0..count {
        let flag = &forest.flags[i % forest.flags.len()];
        let family = EpsilonFamily::new(flag, model.eps0);
        let k = rng.random_range(0..flag.dims.len());
        let x = flag.sample(rng, k, 1.5 * model.eps0);
        let rep = family_vanishing_check(flag, &profile, &family, std::slice::from_ref(&x), tol);
        sum = sum.max(rep.max_sum_residual);
        compat = compat.max(rep.max_projection_residual + rep.monotonicity_violations as f64);
        let total: f64 = chain_weights(flag, &profile, &family, &x).iter().map(|w| w.full).sum();
        chains = chains.max((total - 1.0).abs());
    }
    Ok(vec![
        Check::within("partition-sum", "B_Y^ε(y) + Σ_{Z<Y} B_Z^ε(y) = 1", sum, tol, count),
        Check::within("partition-projection", "B_Z^ε π_Y = B_Z^ε and B_Y^ε(π_Y x) ≥ B_Y^ε(x)", compat, tol, count),
        Check::within("chain-weights-sum", "Σ over chains ending in Y of the chain weights = 1", chains, tol, count),
    ])
}

fn adversarial_grid(family: &EpsilonFamily, side: usize) -> Vec<Vec<f64>> {
    let mut values: Vec<f64> = Vec::new();
    for k in 0..family.dims.len() {
        let e = family.eps(k);
        values.extend([0.5 * e, 0.7 * e, 0.75 * e, 0.7 * e * (1.0 + 1e-9), 0.7 * e * (1.0 - 1e-9), e]);
    }
    let top = 1.2 * family.eps0;
    let fill = side.saturating_sub(values.len());
    values.extend((0..fill).map(|i| top * i as f64 / fill.max(2).saturating_sub(1) as f64));
    values.truncate(side);
    let mut out = Vec::with_capacity(side * side);
    for &r0 in &values {
        for &r1 in &values {
            out.push(vec![0.2, r0, -0.3, r1, 0.5]);
        }
    }
    out
}

fn vanishing(config: &SuiteConfig, _rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let flag = match &config.model {
        Some(m) => m.forest()?.flags.into_iter().find(|f| f.dims.len() == 3),
        None => None,
    }
    .unwrap_or_else(|| FlagTubeModel::standard(3));
    let family = EpsilonFamily::new(&flag, config.eps0(0.5));
    let side = (config.samples(10_000) as f64).sqrt().ceil() as usize;
    let grid = adversarial_grid(&family, side);
    let rep = family_vanishing_check(&flag, &BumpProfile, &family, &grid, 1e-12);
    Ok(vec![Check::within(
        "vanishing-violations",
        "B_n^{εm}(π_n x) ≠ 0 forces B_{n′}^{εm′}(x) = 0 for n′ < n, m′ > m",
        rep.vanishing_violations as f64,
        0.0,
        grid.len(),
    )])
}

fn random_poly_form<R: Rng>(rng: &mut R, m: usize, rows: usize) -> Result<VForm> {
    let terms = multi_indices(m, 1)
        .into_iter()
        .map(|idx| {
            let polys = (0..rows * rows).map(|_| Poly::random(m, 2, rng)).collect();
            Ok((idx, SmoothMap::poly(rows, rows, polys)?))
        })
        .collect::<Result<Vec<_>>>()?;
    VForm::from_maps(m, 1, terms)
}

fn patch_curvature(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let configs = config.samples(100);
    let tol = config.tol(1e-6);
    let mut worst = 0.0f64;
    for _ in 0..configs {
        let m = rng.random_range(1..=4);
        let n = rng.random_range(1..=3);
        let mut polys: Vec<Poly> = (0..n - 1).map(|_| Poly::random(m, 2, rng)).collect();
        let last = polys.iter().fold(Poly::constant(m, c(1.0)), |acc, p| acc.add(&p.scale(c(-1.0))));
        polys.push(last);
        let weights: Vec<SmoothMap> = polys.into_iter().map(|p| SmoothMap::poly(1, 1, vec![p])).collect::<Result<_>>()?;
        let forms: Vec<VForm> = (0..n).map(|_| random_poly_form(rng, m, 2)).collect::<Result<_>>()?;
        let points: Vec<Vec<f64>> = (0..4).map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let rep = patch_combination_curvature(&weights, &forms, &points, 1e-9)?;
        worst = worst.max(rep.max_discrepancy);
    }
    Ok(vec![Check::within("patch-curvature-formula", "Ω = Σ f_i Ω_i − ½Σ f_i f_j [ω_i − ω_j]² + Σ df_i∧(ω_i − ω_n)", worst, tol, configs)])
}

fn springer(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let count = config.samples(500);
    let tol = config.tol(1e-9);
    let mut pairs: Vec<(QMat, QMat)> = (0..count).map(|i| random_commuting_pair(rng, 2 + i % 4)).collect();
    if config.inject_fault {
        pairs.push((QMat::from_i64(&[&[1, 0], &[0, 2]]), QMat::from_i64(&[&[0, 1], &[0, 0]])));
    }
    let mut exact_failures = 0usize;
    let mut float_worst = 0.0f64;
    for (x, n) in &pairs {
        for k in 1..=x.n {
            let f = InvariantPolynomial::elementary(k);
            match springer_check_exact(x, n, &f) {
                Ok(r) if num_traits::Zero::is_zero(&r) => {}
                _ => exact_failures += 1,
            }
            let scale = 1.0 + x.to_cmat().iter().map(|v| v.norm()).fold(0.0, f64::max).powi(k as i32);
            match springer_check(&x.to_cmat(), &n.to_cmat(), &f, 1e-9) {
                Ok(r) => float_worst = float_worst.max(r / scale),
                Err(_) => float_worst = f64::INFINITY,
            }
        }
    }
    Ok(vec![
        Check::within("springer-exact", "f(x + n) = f(x), rational arithmetic", exact_failures as f64, 0.0, pairs.len()),
        Check::within("springer-float", "f(x + n) = f(x), floating point relative to |x|^k", float_worst, tol, pairs.len()),
    ])
}

fn classification(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let cases = [(GroupSpec::su(1, 1), "weight:2"), (GroupSpec::sp(2), "sym2"), (GroupSpec::sp(2), "standard")];
    let count = config.samples(100);
    let mut wrong = 0usize;
    for i in 0..count {
        let (spec, name) = &cases[i % cases.len()];
        let rep = Representation::parse(spec, name)?;
        let base = nomizu(&rep);
        let split = rep.cartan.clone();
        let dim = rep.dim_v();
        let delta = CMat::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0)));
        let on_k = rng.random_bool(0.5);
        let coef: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pert = move |x: &CMat| -> CMat {
            let part = if on_k { split.k_part(x) } else { split.p_part(x) };
            let s: f64 = part.iter().zip(coef.iter().cycle()).map(|(v, w)| v.re * w).sum();
            &delta * c(s)
        };
        // Independent expectation: condition 2 is linear, so test the perturbation alone.
        let expected = if on_k {
            let k_size = rep.cartan.k.basis().iter().map(|k| norm(&pert(k))).fold(0.0, f64::max);
            if k_size > 1e-9 { Some(1) } else { None }
        } else {
            let mut worst = 0.0f64;
            for g in base.algebra.basis() {
                for k in rep.cartan.k.basis() {
                    worst = worst.max(norm(&(pert(&commutator(g, k)) - commutator(&pert(g), &rep.lambda_prime(k)))));
                }
            }
            if worst > 1e-9 { Some(2) } else { None }
        };
        let omega0: Vec<CMat> = base.algebra.basis().iter().map(|g| base.omega(g) + pert(g)).collect();
        let got = match InvariantConnection::new(&rep, omega0) {
            Ok(_) => None,
            Err(Error::ConditionViolation { condition, .. }) => Some(condition),
            Err(e) => return Err(e),
        };
        if got != expected {
            wrong += 1;
        }
    }
    let mut accepted_failures = 0usize;
    for (spec, name) in &cases {
        let rep = Representation::parse(spec, name)?;
        if InvariantConnection::new(&rep, nomizu(&rep).omega0).is_err() {
            accepted_failures += 1;
        }
    }
    let defining = Representation::parse(&GroupSpec::sp(2), "defining")?;
    if InvariantConnection::from_fn(&defining, |x| x.clone()).is_err() {
        accepted_failures += 1;
    }
    Ok(vec![
        Check::within("classification-rejections", "perturbations rejected with the violated condition", wrong as f64, 0.0, count),
        Check::within("classification-accepts", "Nomizu and flat connections accepted", accepted_failures as f64, 0.0, cases.len() + 1),
    ])
}

fn nomizu_bridge(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = config.tol(1e-6);
    let count = config.samples(20);
    let mut out = Vec::new();
    for (chart, rep_name) in [(Chart::Su11Disc, "weight:2"), (Chart::H2, "standard")] {
        let rep = Representation::parse(&chart.spec(), rep_name)?;
        let conn = nomizu(&rep);
        let curv0 = conn.curvature();
        let curv = curvature_form(&chart.pullback(Arc::new(conn)))?;
        let mut worst = 0.0f64;
        for _ in 0..count {
            let x = chart_point(chart, rng);
            let sigma = chart.section(&Jet::vars(&x, 1))?;
            let inv = inverse(&sigma.v)?;
            let tangents: Vec<CMat> = (0..chart.dim()).map(|i| &inv * sigma.grad(i)).collect();
            for (idx, value) in multi_indices(chart.dim(), 2).iter().zip(curv.values(&x)?) {
                worst = worst.max(dist(&value, &curv0.eval(&tangents[idx[0]], &tangents[idx[1]])));
            }
        }
        out.push(Check::within(
            &format!("nomizu-bridge-{}", if chart == Chart::H2 { "sp4" } else { "su11" }),
            "Ω₀(ġ, ḣ) = [ω₀(ġ), ω₀(ḣ)] − ω₀([ġ, ḣ])",
            worst,
            tol,
            count,
        ));
    }
    Ok(out)
}

fn chart_point<R: Rng>(chart: Chart, rng: &mut R) -> Vec<f64> {
    match chart {
        Chart::Su11Disc => {
            let (r, t) = (rng.random_range(0.0..0.9f64), rng.random_range(0.0..std::f64::consts::TAU));
            vec![r * t.cos(), r * t.sin()]
        }
        Chart::Su2Stereographic => vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
        Chart::H1 => vec![rng.random_range(-1.0..1.0), rng.random_range(0.3..3.0)],
        Chart::H2 => {
            let (a, b, d) = (rng.random_range(0.5..2.0), rng.random_range(-0.5..0.5), rng.random_range(0.5..2.0));
            vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), a * a, a * b, b * b + d * d]
        }
    }
}

fn pifiber_induced(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = config.tol(1e-6);
    let count = config.samples(200);
    let spec = GroupSpec::sp(2);
    let rep = Representation::parse(&spec, "standard")?;
    let klingen = ParabolicData::named(&spec, "klingen")?;
    let lam = CanonicalExtension::new(&rep, &klingen)?;
    let base: SharedForm = Arc::new(NomizuForm::new(&rep));
    let induced = parabolic_induce(base, &klingen, &lam)?;
    let curv = curvature_form(&Chart::H2.pullback(Arc::new(induced)))?;
    let model = Sp4Model::new("standard", config.eps0(1.0))?;
    let points = tube_samples(&model, rng, count);
    let rep = pifiber_check(&curv, &Sp4Model::projection_xy(), &points, tol)?;
    Ok(vec![Check::within(
        "pifiber-induced-curvature",
        "Ω = π*(Ω₁) for the parabolically induced connection",
        rep.max_vertical_contraction,
        tol,
        points.len(),
    )])
}

fn canonical_extension(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = config.tol(1e-8);
    let count = config.samples(50);
    let spec = GroupSpec::sp(2);
    let rep = Representation::parse(&spec, "standard")?;
    let mut hom = 0.0f64;
    for name in ["siegel", "klingen"] {
        let p = ParabolicData::named(&spec, name)?;
        let lam = CanonicalExtension::new(&rep, &p)?;
        let k_h: Vec<CMat> = p.hermitian_1.basis().iter().map(|x| rep.cartan.k_part(x)).filter(|m| norm(m) > 1e-12).collect();
        let sample = |rng: &mut ChaCha8Rng| -> CMat {
            let mut x = p.linear_1.combine(&(0..p.linear_1.dim()).map(|_| rng.random_range(-0.8..0.8)).collect::<Vec<_>>());
            let mut g = expm(&x);
            for k in &k_h {
                x = k * c(rng.random_range(-2.0..2.0));
                g = expm(&x) * g;
            }
            g
        };
        for _ in 0..count {
            let (g, h) = (sample(rng), sample(rng));
            hom = hom.max(lam.homomorphism_residual(&g, &h)?);
        }
    }
    let compat = extension_compat_check(&rep, 2, 1, count, || rng.random_range(-0.8..0.8))?;
    Ok(vec![
        Check::within("extension-homomorphism", "λ₁ is a homomorphism on K_{1h}G_{1ℓ}", hom, tol, 2 * count),
        Check::within(
            "extension-nested",
            "λ₁(g_{2ℓ}) = λ₂(g_{2ℓ}) and λ₁ = λ₂₁ on the relative Levi",
            compat.max_nested.max(compat.max_relative),
            tol,
            count,
        ),
    ])
}

fn patched(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = config.tol(1e-5);
    let count = config.samples(24);
    let model = Sp4Model::new("standard", config.eps0(1.0))?;
    let rep = patch_report(&model, rng, count, tol)?;
    let localized_everywhere = rep.localized_counts.iter().all(|&n| n > 0);
    let nilpotent = !rep.curvature_pifiber.pass && rep.chern_pifiber.pass;
    Ok(vec![
        Check::within("patched-recursion-vs-chains", "∇^p recursion equals the chain sum", rep.recursion_vs_closed, 1e-10, count),
        Check {
            pass: rep.localization <= 1e-10 && localized_everywhere,
            ..Check::within("patched-localization", "∇_X^p = Σ B_𝐒 Φ*_𝐒(∇_W^p) near π_W", rep.localization, 1e-10, count)
        },
        Check {
            pass: rep.chern_pifiber.pass && rep.chern_magnitude > 1e-6,
            ..Check::within(
                "patched-chern-pifiber",
                "σ¹, σ² of the patched connection are π-fiber forms in T_Y(ε_X/2)",
                rep.chern_pifiber.max_vertical_contraction.max(rep.chern_pifiber.max_compatibility),
                tol,
                rep.chern_pifiber.samples,
            )
        },
        Check {
            name: "patched-raw-curvature-not-pifiber".into(),
            paper_anchor: "curvature differs from a pullback by some nilpotent element".into(),
            max_residual: rep.curvature_pifiber.max_vertical_contraction,
            tol,
            samples: rep.curvature_pifiber.samples,
            pass: nilpotent,
        },
    ])
}

fn p1_chern(config: &SuiteConfig, _rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = config.tol(1e-3);
    let nodes = config.samples(40);
    let spec = GroupSpec::su_compact(2, 1);
    let rep = Representation::parse(&spec, "weight:2")?;
    let curv = curvature_form(&Chart::Su2Stereographic.pullback(Arc::new(nomizu(&rep))))?;
    let value = integrate_p1(&curv.scale(chern_factor()), nodes, 16)?;
    let expected = chern_number(Space::Projective(1), &ChernMonomial::parse("c1", Bundle::Tangent)?)? as f64;
    Ok(vec![Check::within(
        "p1-chern-number",
        "∫_{P¹} σ¹(∇^Nom) = c₁[P¹] = 2",
        (value.re - expected).abs().max(value.im.abs()),
        tol,
        nodes,
    )])
}

fn schubert(_config: &SuiteConfig, _rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let exact = |name: &str, anchor: &str, got: i64, want: i64| Check::within(name, anchor, (got - want).abs() as f64, 0.0, 1);
    let g24 = Space::Grassmannian(2, 4).grassmannian()?;
    let s1 = SchubertClass::special(g24, 1);
    let square = ring_multiply(&s1, &s1)?;
    let expect = SchubertClass::special(g24, 2).add(&SchubertClass::sigma(g24, BoxPartition::new(vec![1, 1])))?;
    let mono = |s: &str| ChernMonomial::parse(s, Bundle::Tangent);
    let mut checks = vec![
        exact("schubert-square", "σ₁·σ₁ = σ₂ + σ₁₁", i64::from(square != expect), 0),
        exact("schubert-sigma1-fourth", "⟨σ₁⁴⟩ on Gr(2,4) = 2", integrate_class(&power(&s1, 4)?), 2),
        exact("schubert-euler-gr24", "χ(Gr(2,4)) = ∫ c_top(T) = 6", chern_number(Space::Grassmannian(2, 4), &mono("c4")?)?, 6),
        exact("schubert-c1-squared-p2", "c₁²[P²] = 9", chern_number(Space::Projective(2), &mono("c1^2")?)?, 9),
        exact(
            "schubert-c1-tangent-gr24",
            "c₁(T Gr(2,4)) = 4σ₁",
            i64::from(chern_class(Space::Grassmannian(2, 4), Bundle::Tangent, 1)? != s1.scale(4)?),
            0,
        ),
    ];
    let mut spaces: Vec<Space> = (1..=4).map(Space::Projective).collect();
    spaces.push(Space::Grassmannian(2, 4));
    let mut gen_fail = 0;
    for space in &spaces {
        if !generation_check(*space)?.pass {
            gen_fail += 1;
        }
    }
    checks.push(exact("schubert-generation", "Chern classes of tautological bundles generate H*(Ď)", gen_fail, 0));
    let negative = generation_check_with(Space::Grassmannian(2, 4), &[SchubertClass::special(g24, 2)])?;
    checks.push(exact("schubert-generation-negative", "σ₂ alone does not generate", i64::from(negative.pass), 0));
    Ok(checks)
}

/// Ω₀ on pairs of 𝔭 basis elements beside −λ′([p_i, p_j]).
pub fn curvature_table(group: &str, connection: &str, rep_name: &str) -> Result<serde_json::Value> {
    let spec = match group {
        "su11" => GroupSpec::su(1, 1),
        "su2" => GroupSpec::su_compact(2, 1),
        "sl2" | "sp2" => GroupSpec::sp(1),
        "sp4" => GroupSpec::sp(2),
        other => return Err(Error::UnsupportedSpec(format!("unknown group {other}; expected su11, su2, sl2, sp4"))),
    };
    let rep = Representation::parse(&spec, rep_name)?;
    let conn = match connection {
        "nomizu" => nomizu(&rep),
        "flat" if rep_name == "defining" => InvariantConnection::from_fn(&rep, |x| x.clone())?,
        "flat" => return Err(Error::UnsupportedSpec("flat connection needs rep defining".into())),
        other => return Err(Error::UnsupportedSpec(format!("unknown connection {other}; expected nomizu or flat"))),
    };
    let curv = conn.curvature();
    let p_basis = rep.cartan.p.basis();
    let mut entries = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..p_basis.len() {
        for j in i + 1..p_basis.len() {
            let value = curv.eval(&p_basis[i], &p_basis[j]);
            let bracket = -rep.lambda_prime(&commutator(&p_basis[i], &p_basis[j]));
            let residual = dist(&value, &bracket);
            worst = worst.max(residual);
            entries.push(serde_json::json!({
                "p": [i, j],
                "omega": matrix_to_json(&value),
                "minus_lambda_prime_bracket": matrix_to_json(&bracket),
                "residual": residual,
            }));
        }
    }
    Ok(serde_json::json!({
        "schema": SCHEMA,
        "group": group,
        "connection": connection,
        "rep": rep_name,
        "method": "Ω₀(a, b) = [ω₀(a), ω₀(b)] − ω₀([a, b]) on the 𝔭 basis",
        "p_basis": p_basis.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "entries": entries,
        "max_residual": worst,
    }))
}

/// π-fiber residuals of the patched connection's Chern forms on an Sp(4) model.
pub fn chern_pifiber_report(model: &ModelJson, rep_name: &str, seed: u64, samples: usize, tol: f64) -> Result<(serde_json::Value, bool)> {
    if model.geometry.as_deref() != Some("sp4") {
        return Err(Error::UnsupportedSpec("pifiber check needs a model with \"geometry\": \"sp4\"".into()));
    }
    let sp4 = Sp4Model::new(rep_name, model.eps0)?;
    let mut rng = rng_for(seed, "chern-pifiber");
    let rep = patch_report(&sp4, &mut rng, samples.max(1), tol)?;
    let pass = rep.chern_pifiber.pass && rep.chern_magnitude > 1e-6;
    Ok((
        serde_json::json!({
            "schema": SCHEMA,
            "check": "pifiber",
            "method": "contraction with vertical vectors and π-compatibility inside T_Y(ε_X/2)",
            "eps0": model.eps0,
            "rep": rep_name,
            "seed": seed,
            "tol": tol,
            "chern_forms": rep.chern_pifiber,
            "chern_magnitude": rep.chern_magnitude,
            "raw_curvature": rep.curvature_pifiber,
            "pass": pass,
        }),
        pass,
    ))
}

/// Exact Chern number of a compact dual.
pub fn dual_value(space: &str, bundle: &str, monomial: &str) -> Result<serde_json::Value> {
    let space: Space = space.parse()?;
    let bundle: Bundle = bundle.parse()?;
    let mono = ChernMonomial::parse(monomial, bundle)?;
    let value = chern_number(space, &mono)?;
    Ok(serde_json::json!({
        "schema": SCHEMA,
        "space": space.to_string(),
        "monomial": monomial,
        "method": "Chern roots reduced to Schubert classes, exact integer arithmetic",
        "value": value,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite(&SuiteConfig::new("nope", 1)), Err(Error::Invalid(_))));
    }

    #[test]
    fn springer_negative_control_fails() {
        let mut cfg = SuiteConfig::new("springer", 3);
        cfg.samples = Some(20);
        assert!(run_suite(&cfg).unwrap().pass);
        cfg.inject_fault = true;
        let rep = run_suite(&cfg).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn reports_are_deterministic() {
        let mut cfg = SuiteConfig::new("partition", 11);
        cfg.samples = Some(500);
        let a = run_suite(&cfg).unwrap().to_json();
        let b = run_suite(&cfg).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }

    #[test]
    fn schubert_suite_passes() {
        let rep = run_suite(&SuiteConfig::new("schubert", 0)).unwrap();
        assert!(rep.pass, "{}", rep.to_json());
    }
}

#[cfg(test)]
mod front_end_tests {
    use super::*;

    #[test]
    fn dual_examples() {
        assert_eq!(dual_value("p:1", "tangent", "c1").unwrap()["value"], 2);
        assert_eq!(dual_value("gr:2,4", "tangent", "c1^4").unwrap()["value"], 512);
        assert!(dual_value("q:3", "tangent", "c1").is_err());
    }

    #[test]
    fn nomizu_table_matches_bracket() {
        let t = curvature_table("su11", "nomizu", "weight:2").unwrap();
        assert!(t["max_residual"].as_f64().unwrap() < 1e-12);
        assert_eq!(t["entries"].as_array().unwrap().len(), 1);
        assert!(curvature_table("so5", "nomizu", "standard").is_err());
    }
}
