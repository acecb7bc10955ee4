//! Newton multistart for the critical equations `grad U = 0`.
//!
//! Starts are drawn uniformly from a box around the undeformed realization
//! with a seeded ChaCha stream; each start is refined independently (in
//! parallel under `std`) and results are merged in start order, so the
//! outcome depends only on the seed.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{classify, CriticalPoint, DEFAULT_HESSIAN_ZERO_TOL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{Configuration, Framework, Gauge};
use crate::par;
use crate::strain::EnergyLandscape;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub starts: usize,
    pub seed: u64,
    /// Half-width of the start box as a multiple of the framework diameter.
    pub box_scale: f64,
    pub max_iter: usize,
    /// Accept a root when `|grad U| <= gradient_tol * A`.
    pub gradient_tol: f64,
    pub hessian_zero_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            starts: 20_000,
            seed: 0,
            box_scale: 0.5,
            max_iter: 100,
            gradient_tol: 1e-11,
            hessian_zero_tol: DEFAULT_HESSIAN_ZERO_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonReport {
    /// Classified roots in start order (duplicates included).
    pub points: Vec<CriticalPoint>,
    pub starts: usize,
    pub converged: usize,
    pub failed: usize,
}

fn newton_direction(hess: &DMatrix<f64>, grad: &[f64]) -> DVector<f64> {
    let g = DVector::from_column_slice(grad);
    if let Some(d) = hess.clone().lu().solve(&(-&g)) {
        if d.iter().all(|v| v.is_finite()) {
            return d;
        }
    }
    // singular Hessian: least-squares step
    let svd = hess.clone().svd(true, true);
    let tol = svd.singular_values.max() * 1e-14;
    svd.solve(&(-g), tol).unwrap_or_else(|_| DVector::zeros(grad.len()))
}

/// Damped Newton on `grad U = 0` from `start` (free coordinates), using the
/// squared gradient norm as merit. Returns the root and its gradient norm
/// if the norm drops to `tol`.
pub fn refine_critical(land: &EnergyLandscape, start: &[f64], tol: f64, max_iter: usize) -> Option<(Vec<f64>, f64)> {
    let mut x = start.to_vec();
    let mut g = land.gradient(&x).ok()?;
    let mut gn = linalg::norm(&g);
    let mut polish = 0;
    for _ in 0..max_iter {
        if gn <= tol {
            polish += 1;
            if polish > 2 {
                break;
            }
        }
        let h = land.hessian(&x).ok()?;
        let d = newton_direction(&h, &g);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(d.iter()).map(|(a, b)| a + alpha * b).collect();
            if let Ok(gt) = land.gradient(&trial) {
                let gtn = linalg::norm(&gt);
                if gtn < gn || (gn <= tol && gtn <= tol) {
                    x = trial;
                    g = gt;
                    gn = gtn;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if gn <= tol && x.iter().all(|v| v.is_finite()) {
        Some((x, gn))
    } else {
        None
    }
}

/// Draws `opts.starts` starts from a box around `base` and refines each.
pub fn solve_critical_newton(fw: &Framework, gauge: &Gauge, base: &Configuration, opts: &NewtonOptions) -> Result<NewtonReport> {
    fw.check_configuration(base)?;
    if opts.box_scale <= 0.0 || !opts.box_scale.is_finite() {
        return Err(Error::Precondition("box_scale must be positive".into()));
    }
    let base = gauge.canonicalize(base);
    let land = EnergyLandscape::new(fw, gauge.free_indices(), &base)?;
    let centre = gauge.free_values(&base);
    let width = opts.box_scale * base.diameter();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.starts)
        .map(|_| centre.iter().map(|c| c + rng.random_range(-width..=width)).collect())
        .collect();
    let tol = opts.gradient_tol * fw.cross_section();
    let results = par::map_indexed(starts.len(), |i| {
        refine_critical(&land, &starts[i], tol, opts.max_iter)
            .and_then(|(x, _)| classify(fw, gauge, &land.configuration(&x), opts.hessian_zero_tol).ok())
    });
    let converged = results.iter().filter(|r| r.is_some()).count();
    Ok(NewtonReport {
        points: results.into_iter().flatten().collect(),
        starts: opts.starts,
        converged,
        failed: opts.starts - converged,
    })
}
