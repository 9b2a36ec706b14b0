//! π-fiber conditions: vertical contractions vanish and strata forms are pullbacks
//! inside declared tube neighborhoods.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, dist, nullspace, CMat};

use super::form::VForm;
use super::smooth::SmoothMap;

#[derive(Clone, Debug, Serialize)]
pub struct PiFiberReport {
    pub max_vertical_contraction: f64,
    pub max_compatibility: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Real Jacobian of a column-vector valued map.
pub fn jacobian(map: &SmoothMap, x: &[f64]) -> Result<DMatrix<f64>> {
    let jet = map.eval(x, 1)?;
    Ok(DMatrix::from_fn(map.rows, map.arity, |a, i| jet.grad(i)[(a, 0)].re))
}

/// Basis of ker dπ(x).
pub fn vertical_vectors(projection: &SmoothMap, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let jac = jacobian(projection, x)?;
    Ok(nullspace(&jac, 1e-10).into_iter().map(|v| v.iter().copied().collect()).collect())
}

/// Largest ‖i_v ω‖ over a basis of vertical vectors at x.
pub fn vertical_contraction(form: &VForm, projection: &SmoothMap, x: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for v in vertical_vectors(projection, x)? {
        worst = worst.max(form.contract(&v)?.max_norm_at(x)?);
    }
    Ok(worst)
}

/// Coefficients of π*η at x: Σ_J η_J(π(x)) det(∂π_J/∂x_I).
pub fn pullback_values(form: &VForm, projection: &SmoothMap, x: &[f64]) -> Result<Vec<CMat>> {
    if projection.rows != form.dim {
        return Err(Error::DimensionMismatch("projection target differs from the form's chart".into()));
    }
    let jac = jacobian(projection, x)?;
    let y: Vec<f64> = projection.value(x)?.column(0).iter().map(|z| z.re).collect();
    let low = form.values(&y)?;
    let q = form.degree;
    let high = super::form::multi_indices(projection.arity, q);
    Ok(high
        .iter()
        .map(|i| {
            let mut out = CMat::zeros(form.rows, form.rows);
            for (j, val) in form.indices().iter().zip(&low) {
                let minor = DMatrix::<f64>::from_fn(q, q, |a, b| jac[(j[a], i[b])]);
                out += val * c(minor.determinant());
            }
            out
        })
        .collect())
}

/// Single form against a projection.
pub fn pifiber_check(form: &VForm, projection: &SmoothMap, points: &[Vec<f64>], tol: f64) -> Result<PiFiberReport> {
    let mut worst = 0.0f64;
    for x in points {
        worst = worst.max(vertical_contraction(form, projection, x)?);
    }
    Ok(PiFiberReport { max_vertical_contraction: worst, max_compatibility: 0.0, samples: points.len(), tol, pass: worst <= tol })
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub name: String,
    pub form: VForm,
}

/// An incidence Z < Y: inside {tube < radius} the form on Y is π_{YZ}*(ω_Z).
#[derive(Clone, Debug)]
pub struct Incidence {
    pub upper: usize,
    pub lower: usize,
    pub projection: SmoothMap,
    pub tube: SmoothMap,
    pub radius: f64,
    /// Sample points in the chart of the upper stratum.
    pub samples: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct PiFiberFamily {
    pub strata: Vec<Stratum>,
    pub incidences: Vec<Incidence>,
}

impl PiFiberFamily {
    /// Vertical contraction and compatibility at every sample inside its tube.
    pub fn check(&self, tol: f64) -> Result<PiFiberReport> {
        let mut contraction = 0.0f64;
        let mut compat = 0.0f64;
        let mut count = 0;
        for inc in &self.incidences {
            let upper = &self.strata[inc.upper].form;
            let lower = &self.strata[inc.lower].form;
            for x in &inc.samples {
                if inc.tube.value(x)?[(0, 0)].re >= inc.radius {
                    continue;
                }
                count += 1;
                if upper.degree > 0 {
                    contraction = contraction.max(vertical_contraction(upper, &inc.projection, x)?);
                }
                let pulled = pullback_values(lower, &inc.projection, x)?;
                for (a, b) in upper.values(x)?.iter().zip(&pulled) {
                    compat = compat.max(dist(a, b));
                }
            }
        }
        Ok(PiFiberReport {
            max_vertical_contraction: contraction,
            max_compatibility: compat,
            samples: count,
            tol,
            pass: contraction <= tol && compat <= tol,
        })
    }
}
