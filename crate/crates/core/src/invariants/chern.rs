//! Chern–Weil forms f(Ω) with the normalization det(I + (√−1/2π)Ω).

use std::sync::Arc;

use crate::connections::CurvatureAtIdentity;
use crate::error::{Error, Result};
use crate::exterior::{multi_indices, CoeffFn, VForm};
use crate::jet::{Jet, MatJet};
use crate::linalg::{CMat, C64};

use super::poly::InvariantPolynomial;

/// √−1 / 2π.
pub fn chern_factor() -> C64 {
    C64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI))
}

/// Perfect matchings of a sorted index list as (pairs, sign of the concatenated order).
fn matchings(idx: &[usize]) -> Vec<(Vec<(usize, usize)>, f64)> {
    if idx.is_empty() {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    let first = idx[0];
    for j in 1..idx.len() {
        let rest: Vec<usize> = idx.iter().enumerate().filter(|(k, _)| *k != 0 && *k != j).map(|(_, v)| *v).collect();
        // Moving idx[j] next to idx[0] passes j − 1 entries.
        let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
        for (mut pairs, s) in matchings(&rest) {
            pairs.insert(0, (first, idx[j]));
            out.push((pairs, sign * s));
        }
    }
    out
}

fn entries(m: &MatJet) -> Vec<Jet> {
    let n = m.rows();
    (0..n * n).map(|k| m.entry(k / n, k % n)).collect()
}

/// f(Ω) for an End(V)-valued 2-form: coefficient k!·Σ_matchings sign·P(Ω_{a₁b₁}, …).
pub fn chern_weil_form(curvature: &VForm, f: &InvariantPolynomial) -> Result<VForm> {
    if curvature.degree != 2 {
        return Err(Error::DimensionMismatch(format!("curvature of degree {}", curvature.degree)));
    }
    let k = f.degree;
    let m = curvature.dim;
    let rows = curvature.rows;
    let pair_index = multi_indices(m, 2);
    let plan: Vec<Vec<(Vec<usize>, f64)>> = multi_indices(m, 2 * k)
        .iter()
        .map(|big| {
            matchings(big)
                .into_iter()
                .map(|(pairs, sign)| {
                    let pos = pairs.iter().map(|(a, b)| pair_index.iter().position(|p| p == &vec![*a, *b]).unwrap()).collect();
                    (pos, sign)
                })
                .collect()
        })
        .collect();
    let factorial: f64 = (1..=k).map(|v| v as f64).product();
    let curv = curvature.clone();
    let f = f.clone();
    let coeffs: CoeffFn = Arc::new(move |x: &[f64], order: u8| {
        let omega = curv.eval(x, order)?;
        let omega_entries: Vec<Vec<Jet>> = omega.iter().map(entries).collect();
        plan.iter()
            .map(|terms| {
                let mut acc = Jet::real(0.0);
                for (pos, sign) in terms {
                    let args: Vec<Vec<Jet>> = pos.iter().map(|&p| omega_entries[p].clone()).collect();
                    let value = f.polarize_ring(&args, rows)?;
                    acc = &acc + &value.scale(C64::new(sign * factorial, 0.0));
                }
                Ok(MatJet::from_entries(1, 1, &[acc]))
            })
            .collect()
    });
    Ok(VForm::new(m, 2 * k, 1, curvature.max_order, coeffs))
}

/// σⁱ = (√−1/2π)ⁱ eᵢ(Ω).
pub fn chern_form(curvature: &VForm, i: usize) -> Result<VForm> {
    let raw = chern_weil_form(curvature, &InvariantPolynomial::elementary(i))?;
    Ok(raw.scale(chern_factor().powi(i as i32)))
}

/// The curvature at the identity as a constant 2-form on the algebra coordinates.
pub fn identity_curvature_form(curv: &CurvatureAtIdentity) -> Result<VForm> {
    let dim = curv.algebra.dim();
    let values: Vec<CMat> = multi_indices(dim, 2).iter().map(|p| curv.on_basis(p[0], p[1]).clone()).collect();
    VForm::constant(dim, 2, values)
}

/// Identity-level σⁱ on the algebra basis.
pub fn chern_form_at_identity(curv: &CurvatureAtIdentity, i: usize) -> Result<VForm> {
    chern_form(&identity_curvature_form(curv)?, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::{nomizu, InvariantConnection};
    use crate::exterior::{SmoothMap, VForm};
    use crate::hc::Representation;
    use crate::lie::GroupSpec;
    use crate::linalg::{c, from_real};

    #[test]
    fn flat_connection_has_vanishing_chern_forms() {
        let spec = GroupSpec::sp(2);
        let rep = Representation::parse(&spec, "defining").unwrap();
        let flat = InvariantConnection::from_fn(&rep, |x| x.clone()).unwrap();
        let form = identity_curvature_form(&flat.curvature()).unwrap();
        for i in 1..=2 {
            let sigma = chern_form(&form, i).unwrap();
            assert!(sigma.max_norm_at(&vec![0.0; form.dim]).unwrap() < 1e-12);
        }
    }

    #[test]
    fn line_bundle_first_chern_form() {
        let spec = GroupSpec::su(1, 1);
        let rep = Representation::parse(&spec, "weight:3").unwrap();
        let curv = nomizu(&rep).curvature();
        let form = identity_curvature_form(&curv).unwrap();
        let sigma = chern_form(&form, 1).unwrap();
        let x = vec![0.0; form.dim];
        for (a, b) in sigma.values(&x).unwrap().iter().zip(form.values(&x).unwrap()) {
            assert!((a[(0, 0)] - b[(0, 0)] * chern_factor()).norm() < 1e-15);
        }
    }

    #[test]
    fn second_chern_form_matches_wedge_expansion() {
        // For 2×2 values, e₂(Ω) = ½(tr Ω ∧ tr Ω − tr(Ω∧Ω)).
        let a = from_real(&[&[1.0, 2.0], &[0.5, -1.0]]);
        let b = from_real(&[&[0.0, 1.0], &[3.0, 2.0]]);
        let e = from_real(&[&[2.0, 0.0], &[1.0, 1.0]]);
        let d = from_real(&[&[-1.0, 1.0], &[1.0, 0.0]]);
        let curv = VForm::from_maps(
            4,
            2,
            vec![
                (vec![0, 1], SmoothMap::constant(4, a)),
                (vec![2, 3], SmoothMap::constant(4, b)),
                (vec![0, 2], SmoothMap::constant(4, e)),
                (vec![1, 3], SmoothMap::constant(4, d)),
            ],
        )
        .unwrap();
        let raw = chern_weil_form(&curv, &InvariantPolynomial::elementary(2)).unwrap();
        let tr = curv.trace();
        let expect = tr.wedge(&tr).unwrap().sub(&curv.wedge(&curv).unwrap().trace()).unwrap().scale(c(0.5));
        let x = [0.0; 4];
        assert!((raw.values(&x).unwrap()[0][(0, 0)] - expect.values(&x).unwrap()[0][(0, 0)]).norm() < 1e-12);
    }
}
