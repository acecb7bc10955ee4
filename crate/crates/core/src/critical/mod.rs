//! Critical points of the total strain energy: classification, the quotient
//! set of shaky saddle realizations, and two solvers (a certified-count
//! total-degree homotopy and a Newton multistart).

pub mod homotopy;
pub mod newton;

use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg;
use crate::model::{Configuration, Framework, Gauge};
use crate::strain::{self, EnergyLandscape};

pub use homotopy::{solve_critical_homotopy, HomotopyOptions, HomotopyReport, PathOutcome, PathStatus};
pub use newton::{refine_critical, solve_critical_newton, NewtonOptions, NewtonReport};

/// Hessian eigenvalues whose magnitude is below this fraction of the largest
/// are treated as zero when classifying critical points.
pub const DEFAULT_HESSIAN_ZERO_TOL: f64 = 1e-10;

/// Relative (to the framework diameter) distance below which two canonical
/// critical realizations are the same point.
pub const DEFAULT_DEDUP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Positive definite Hessian.
    Minimum,
    /// Nondegenerate with at least one negative eigenvalue.
    Saddle,
    /// Singular Hessian (within tolerance).
    Degenerate,
}

/// A real critical realization of the total energy.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub cfg: Configuration,
    pub energy: f64,
    pub density: f64,
    pub classification: Classification,
    /// `(positive, zero, negative)` Hessian eigenvalue counts.
    pub inertia: (usize, usize, usize),
    /// Euclidean norm of the energy gradient over the free coordinates.
    pub gradient_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuotientOptions {
    pub hessian_zero_tol: f64,
    pub dedup_tol: f64,
    /// Keep degenerate critical points (they may be shaky saddles whose
    /// negative direction is only visible at higher order).
    pub include_degenerate: bool,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        Self {
            hessian_zero_tol: DEFAULT_HESSIAN_ZERO_TOL,
            dedup_tol: DEFAULT_DEDUP_TOL,
            include_degenerate: true,
        }
    }
}

/// Candidate snapping realizations: real critical points that are not local
/// minima, one per congruence class, ordered by increasing density.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuotientSet {
    pub points: Vec<CriticalPoint>,
}

impl QuotientSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evaluates and classifies the realization `cfg` (assumed critical).
pub fn classify(fw: &Framework, gauge: &Gauge, cfg: &Configuration, hessian_zero_tol: f64) -> Result<CriticalPoint> {
    let cfg = gauge.canonicalize(cfg);
    let land = EnergyLandscape::new(fw, gauge.free_indices(), &cfg)?;
    let free = gauge.free_values(&cfg);
    let grad = land.gradient(&free)?;
    let hess = land.hessian(&free)?;
    let eig = linalg::symmetric_eigenvalues(&hess);
    let inertia = linalg::inertia(&eig, hessian_zero_tol);
    let classification = if inertia.1 > 0 {
        Classification::Degenerate
    } else if inertia.2 > 0 {
        Classification::Saddle
    } else {
        Classification::Minimum
    };
    let energy = strain::total_energy(fw, &cfg)?;
    Ok(CriticalPoint {
        density: energy / (fw.cross_section() * fw.total_length()),
        energy,
        classification,
        inertia,
        gradient_residual: linalg::norm(&grad),
        cfg,
    })
}

/// Drops near-duplicates (canonical coordinates within
/// `tol * diameter`), keeping the representative with the smaller gradient
/// residual, and preserving first-seen order otherwise.
pub fn dedup(points: Vec<CriticalPoint>, gauge: &Gauge, tol: f64, diameter: f64) -> Vec<CriticalPoint> {
    let mut kept: Vec<CriticalPoint> = Vec::new();
    let limit = tol * diameter.max(f64::MIN_POSITIVE);
    for p in points {
        let canon = gauge.canonicalize(&p.cfg);
        match kept.iter_mut().find(|k| k.cfg.max_abs_diff(&canon) <= limit) {
            Some(k) => {
                if p.gradient_residual < k.gradient_residual {
                    *k = CriticalPoint { cfg: canon, ..p };
                }
            }
            None => kept.push(CriticalPoint { cfg: canon, ..p }),
        }
    }
    kept
}

/// Builds the quotient set from raw critical points: canonicalizes,
/// deduplicates, removes minima (and optionally degenerate points) and sorts
/// by density (ties broken by coordinates for determinism).
pub fn build_quotient_set(points: Vec<CriticalPoint>, gauge: &Gauge, diameter: f64, opts: &QuotientOptions) -> QuotientSet {
    let mut kept: Vec<CriticalPoint> = dedup(points, gauge, opts.dedup_tol, diameter)
        .into_iter()
        .filter(|p| match p.classification {
            Classification::Minimum => false,
            Classification::Saddle => true,
            Classification::Degenerate => opts.include_degenerate,
        })
        .collect();
    sort_by_density(&mut kept);
    QuotientSet { points: kept }
}

pub(crate) fn sort_by_density(points: &mut [CriticalPoint]) {
    points.sort_by(|a, b| {
        a.density
            .total_cmp(&b.density)
            .then_with(|| {
                for (x, y) in a.cfg.as_slice().iter().zip(b.cfg.as_slice()) {
                    let o = x.total_cmp(y);
                    if o != core::cmp::Ordering::Equal {
                        return o;
                    }
                }
                core::cmp::Ordering::Equal
            })
    });
}

/// The undeformed realization is always a global minimum of the energy with
/// `U = 0`; this returns the energy and gradient residual there, which
/// certify that claim numerically.
pub fn undeformed_certificate(fw: &Framework, gauge: &Gauge, cfg: &Configuration) -> Result<(f64, f64)> {
    let land = EnergyLandscape::new(fw, gauge.free_indices(), cfg)?;
    let free = gauge.free_values(cfg);
    Ok((land.energy(&free), linalg::norm(&land.gradient(&free)?)))
}
