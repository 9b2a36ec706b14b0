//! Coordinate sections of G → G/K and pullbacks of connection forms.

use std::sync::Arc;

use crate::connections::SharedForm;
use crate::error::{Error, Result};
use crate::jet::{Jet, MatJet};
use crate::lie::GroupSpec;
use crate::linalg::{CMat, C64};

use super::form::{CoeffFn, VForm};

pub type SectionFn = Arc<dyn Fn(&[Jet]) -> Result<MatJet> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// Unit disc, w = u + iv.
    Su11Disc,
    /// Stereographic plane of P¹, w = u + iv.
    Su2Stereographic,
    /// Upper half-plane, z = x + iy.
    H1,
    /// Siegel half-space of degree 2, coordinates (x11, x12, x22, y11, y12, y22).
    H2,
}

fn i_unit() -> C64 {
    C64::new(0.0, 1.0)
}

fn complex_coordinate(x: &[Jet]) -> (Jet, Jet) {
    let w = &x[0] + &x[1].scale(i_unit());
    let wbar = &x[0] - &x[1].scale(i_unit());
    (w, wbar)
}

impl Chart {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "SU11" | "disc" => Ok(Chart::Su11Disc),
            "SU2" => Ok(Chart::Su2Stereographic),
            "H1" => Ok(Chart::H1),
            "H2" => Ok(Chart::H2),
            other => Err(Error::UnsupportedSpace(format!("unknown chart {other}"))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Chart::H2 => 6,
            _ => 2,
        }
    }

    pub fn spec(&self) -> GroupSpec {
        match self {
            Chart::Su11Disc => GroupSpec::su(1, 1),
            Chart::Su2Stereographic => GroupSpec::su_compact(2, 1),
            Chart::H1 => GroupSpec::sp(1),
            Chart::H2 => GroupSpec::sp(2),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Chart::Su11Disc => x[0] * x[0] + x[1] * x[1] < 1.0,
            Chart::Su2Stereographic => true,
            Chart::H1 => x[1] > 0.0,
            Chart::H2 => x[3] > 0.0 && x[3] * x[5] - x[4] * x[4] > 0.0,
        }
    }

    /// σ(x) ∈ G with σ(x)·x₀ the point with coordinates x.
    pub fn section(&self, x: &[Jet]) -> Result<MatJet> {
        let one = Jet::real(1.0);
        let zero = Jet::real(0.0);
        match self {
            Chart::Su11Disc | Chart::Su2Stereographic => {
                let (w, wbar) = complex_coordinate(x);
                let r2 = &(&x[0] * &x[0]) + &(&x[1] * &x[1]);
                let (s, lower) = if *self == Chart::Su11Disc {
                    ((&one - &r2).powf(-0.5), wbar)
                } else {
                    ((&one + &r2).powf(-0.5), wbar.scale(C64::new(-1.0, 0.0)))
                };
                Ok(MatJet::from_entries(2, 2, &[s.clone(), &s * &w, &s * &lower, s]))
            }
            Chart::H1 => {
                let root = x[1].sqrt();
                let inv = root.recip();
                Ok(MatJet::from_entries(2, 2, &[root, &x[0] * &inv, zero, inv]))
            }
            Chart::H2 => {
                let a = x[3].sqrt();
                let b = x[4].div(&a);
                let d = (&x[5] - &(&b * &b)).sqrt();
                let lower = MatJet::from_entries(2, 2, &[a, zero.clone(), b, d]);
                let lower_inv_t = lower.inverse()?.transpose();
                let sym = MatJet::from_entries(2, 2, &[x[0].clone(), x[1].clone(), x[1].clone(), x[2].clone()]);
                let upper_right = sym.mul(&lower_inv_t);
                Ok(lower
                    .embed(4, 4, 0, 0)
                    .add(&upper_right.embed(4, 4, 0, 2))
                    .add(&lower_inv_t.embed(4, 4, 2, 2)))
            }
        }
    }

    pub fn section_value(&self, x: &[f64]) -> Result<CMat> {
        Ok(self.section(&Jet::vars(x, 0))?.v)
    }

    /// The point of the symmetric space: w, z or Z.
    pub fn point(&self, x: &[f64]) -> CMat {
        match self {
            Chart::Su11Disc | Chart::Su2Stereographic | Chart::H1 => CMat::from_element(1, 1, C64::new(x[0], x[1])),
            Chart::H2 => CMat::from_row_slice(
                2,
                2,
                &[C64::new(x[0], x[3]), C64::new(x[1], x[4]), C64::new(x[1], x[4]), C64::new(x[2], x[5])],
            ),
        }
    }

    pub fn section_fn(self) -> SectionFn {
        Arc::new(move |x: &[Jet]| self.section(x))
    }

    pub fn pullback(&self, form: SharedForm) -> VForm {
        pullback_connection(form, self.dim(), self.section_fn())
    }
}

/// σ*ω with coefficients cᵢ = ω(σ, σ⁻¹∂ᵢσ).
pub fn pullback_connection(form: SharedForm, dim: usize, section: SectionFn) -> VForm {
    let rows = form.dim_v();
    let f: CoeffFn = Arc::new(move |x: &[f64], k: u8| {
        let sigma = section(&Jet::vars(x, k + 1))?;
        let base = sigma.truncate(k);
        let sigma_inv = base.inverse()?;
        (0..dim)
            .map(|i| {
                let xdot = sigma_inv.mul(&sigma.partial(i)?);
                Ok(form.eval(&base, &xdot)?.truncate(k))
            })
            .collect()
    });
    VForm::new(dim, 1, rows, 1, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;
    use crate::linalg::dist;

    #[test]
    fn sections_land_in_the_group_and_hit_the_point() {
        let samples: [(Chart, Vec<f64>); 4] = [
            (Chart::Su11Disc, vec![0.3, -0.4]),
            (Chart::Su2Stereographic, vec![1.3, 0.7]),
            (Chart::H1, vec![0.4, 1.7]),
            (Chart::H2, vec![0.1, -0.3, 0.5, 1.2, 0.3, 0.9]),
        ];
        for (chart, x) in samples {
            assert!(chart.contains(&x));
            let g = chart.section_value(&x).unwrap();
            assert!(chart.spec().group_residual(&g) < 1e-12, "{chart:?}");
            let jet = chart.section(&Jet::vars(&x, 1)).unwrap();
            let inv = crate::linalg::inverse(&g).unwrap();
            let alg = LieAlgebra::new(&chart.spec());
            for i in 0..chart.dim() {
                assert!(alg.basis.residual(&(&inv * jet.grad(i))) < 1e-10);
            }
        }
        // Möbius action of the H1 and H2 sections on i and iI.
        let g = Chart::H1.section_value(&[0.4, 1.7]).unwrap();
        let z = (g[(0, 0)] * i_unit() + g[(0, 1)]) / (g[(1, 0)] * i_unit() + g[(1, 1)]);
        assert!((z - C64::new(0.4, 1.7)).norm() < 1e-12);
        let x = [0.1, -0.3, 0.5, 1.2, 0.3, 0.9];
        let g = Chart::H2.section_value(&x).unwrap();
        let iz = CMat::identity(2, 2) * i_unit();
        let a = g.view((0, 0), (2, 2)) * &iz + g.view((0, 2), (2, 2));
        let b = g.view((2, 0), (2, 2)) * &iz + g.view((2, 2), (2, 2));
        let z = a * crate::linalg::inverse(&b.into_owned()).unwrap();
        assert!(dist(&z, &Chart::H2.point(&x)) < 1e-12);
        assert!(dist(&(z.clone() - z.transpose()), &CMat::zeros(2, 2)) < 1e-12);
    }
}
