//! Deformation paths: squared-length interpolation between two length
//! vectors, real continuation of the realization along it, a
//! Richardson endgame at the (shaky) endpoint, the endpoint property check
//! and the per-element monotonicity check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::continuation::{richardson, track, ParametrizedSystem, TrackStats, TrackerOptions};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{self, Configuration, Framework, Gauge, StrainModel};
use crate::rigidity;
use crate::strain::{self, LiftedSystem};

/// Edge lengths moving from `start` to `target` by linear interpolation of
/// the squared lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthPath {
    start: Vec<f64>,
    target: Vec<f64>,
}

impl LengthPath {
    pub fn new(start: Vec<f64>, target: Vec<f64>) -> Result<Self> {
        if start.len() != target.len() {
            return Err(Error::Dimension {
                expected: start.len(),
                found: target.len(),
                context: "target length vector".into(),
            });
        }
        if start.iter().chain(&target).any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::invariant("length path", "lengths must be finite and nonnegative"));
        }
        Ok(Self { start, target })
    }

    /// From the framework's rest lengths to `target`.
    pub fn from_rest(fw: &Framework, target: Vec<f64>) -> Result<Self> {
        Self::new(fw.rest_lengths(), target)
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Squared lengths at `t` (no range check).
    pub fn squared_at(&self, t: f64) -> Vec<f64> {
        self.start
            .iter()
            .zip(&self.target)
            .map(|(a, b)| {
                if t == 1.0 {
                    b * b
                } else {
                    (1.0 - t) * a * a + t * b * b
                }
            })
            .collect()
    }

    /// `d q / d t`, constant along the path.
    pub fn squared_rate(&self) -> Vec<f64> {
        self.start.iter().zip(&self.target).map(|(a, b)| b * b - a * a).collect()
    }

    pub fn reversed(&self) -> Self {
        Self {
            start: self.target.clone(),
            target: self.start.clone(),
        }
    }
}

/// `L_t = sqrt((1 - t) L_start^2 + t L_target^2)`.
pub fn interpolate_lengths(path: &LengthPath, t: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Precondition(format!("path parameter {t} is outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(path.start.clone());
    }
    if t == 1.0 {
        return Ok(path.target.clone());
    }
    Ok(path.squared_at(t).into_iter().map(|q| math::sqrt(q.max(0.0))).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathOptions {
    pub tracker: TrackerOptions,
    /// Endgame samples at `t = 1 - 2^-m`, `m = 1..=endgame_levels`.
    pub endgame_levels: usize,
    /// Successive extrapolants must differ by less than this times the
    /// configuration diameter.
    pub endgame_tol: f64,
    pub richardson_order: usize,
    /// Endpoint match tolerance relative to the diameter.
    pub endpoint_tol: f64,
    /// Largest accepted squared-length residual at a tracked point.
    pub residual_tol: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            tracker: TrackerOptions {
                initial_step: 0.02,
                max_step: 0.05,
                min_step: 1e-12,
                corrector_tol: 1e-13,
                max_corrector_iters: 6,
                max_steps: 200_000,
                max_jump: 0.05,
            },
            endgame_levels: 20,
            endgame_tol: 1e-10,
            richardson_order: 4,
            endpoint_tol: 1e-6,
            residual_tol: 1e-9,
        }
    }
}

/// Outcome of tracking a realization along a [`LengthPath`].
#[derive(Clone, Debug, PartialEq)]
pub struct PathCertificate {
    pub success: bool,
    /// Accepted points `(t, configuration)` in gauge coordinates, starting at `t = 0`.
    pub samples: Vec<(f64, Configuration)>,
    /// Extrapolated configuration at `t = 1`.
    pub endpoint: Option<Configuration>,
    /// Largest `|L_e(endpoint) - L_target,e|`.
    pub endpoint_gap: f64,
    /// Smallest `|pure condition|` over samples with `t < 1`.
    pub min_pure_condition_magnitude_before_end: f64,
    /// Largest squared-length residual over accepted points.
    pub max_residual: f64,
    pub endgame_converged: bool,
    /// Last difference between successive extrapolants (absolute).
    pub endgame_difference: f64,
    pub steps: TrackStats,
    pub failure: Option<String>,
}

struct LengthSystem {
    system: LiftedSystem,
    squared: Vec<f64>,
    rate: Vec<f64>,
    n: usize,
}

impl LengthSystem {
    fn vars(&self, x: &DVector<f64>) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n + 1);
        v.push(1.0);
        v.extend(x.iter().copied());
        v
    }

    fn residual(&self, x: &DVector<f64>, t: f64) -> DVector<f64> {
        let q = self.system.lifted(&self.vars(x));
        DVector::from_iterator(
            self.squared.len(),
            self.squared
                .iter()
                .zip(&self.rate)
                .enumerate()
                .map(|(e, (s, r))| q[e + 1] - (s + t * r)),
        )
    }
}

impl ParametrizedSystem<f64> for LengthSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn evaluate(&self, x: &DVector<f64>, t: f64) -> (DVector<f64>, DMatrix<f64>, DVector<f64>) {
        let vars = self.vars(x);
        let jac = self.system.jacobian(&vars);
        let b = self.squared.len();
        let hx = jac.view((1, 1), (b, self.n)).into_owned();
        let ht = DVector::from_iterator(b, self.rate.iter().map(|r| -r));
        (self.residual(x, t), hx, ht)
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
}

/// Tracks `start_cfg` (realizing `path.start()`) along the path. The
/// endpoint is shaky by construction, so the last stretch samples
/// `t = 1 - 2^-m` and extrapolates the limit in `s = sqrt(1 - t)`.
/// Failures (path lost, realness lost) give `success = false`.
pub fn track_deformation(fw: &Framework, start_cfg: &Configuration, path: &LengthPath, opts: &PathOptions) -> Result<PathCertificate> {
    let gauge = Gauge::new(fw)?;
    track_deformation_with(fw, &gauge, start_cfg, path, opts)
}

pub fn track_deformation_with(
    fw: &Framework,
    gauge: &Gauge,
    start_cfg: &Configuration,
    path: &LengthPath,
    opts: &PathOptions,
) -> Result<PathCertificate> {
    fw.check_configuration(start_cfg)?;
    if path.start().len() != fw.edge_count() {
        return Err(Error::Dimension {
            expected: fw.edge_count(),
            found: path.start().len(),
            context: "length path".into(),
        });
    }
    let n = gauge.free_count();
    if n != fw.edge_count() {
        return Err(Error::NotIsostatic(format!(
            "{} free coordinates but {} edges; the length system is not square",
            n,
            fw.edge_count()
        )));
    }
    let start_cfg = gauge.canonicalize(start_cfg);
    let lmax = path.start().iter().chain(path.target()).fold(1.0f64, |m, l| m.max(*l));
    let start_gap = model::edge_lengths(fw, &start_cfg)
        .iter()
        .zip(path.start())
        .fold(0.0f64, |m, (a, b)| m.max(math::abs(a - b)));
    if start_gap > 1e-9 * lmax {
        return Err(Error::Precondition(format!(
            "start configuration does not realize the path's start lengths (residual {start_gap:.3e})"
        )));
    }
    let system = LengthSystem {
        system: LiftedSystem::new(fw, gauge.free_indices(), &start_cfg, 1.0),
        squared: path.squared_at(0.0),
        rate: path.squared_rate(),
        n,
    };
    let diameter = start_cfg.diameter().max(f64::MIN_POSITIVE);
    let to_cfg = |x: &DVector<f64>| {
        let mut cfg = start_cfg.clone();
        for (&flat, v) in gauge.free_indices().iter().zip(x.iter()) {
            cfg.as_mut_slice()[flat] = *v;
        }
        cfg
    };

    let mut cert = PathCertificate {
        success: false,
        samples: Vec::new(),
        endpoint: None,
        endpoint_gap: f64::INFINITY,
        min_pure_condition_magnitude_before_end: f64::INFINITY,
        max_residual: 0.0,
        endgame_converged: false,
        endgame_difference: f64::INFINITY,
        steps: TrackStats::default(),
        failure: None,
    };

    let mut x = DVector::from_vec(gauge.free_values(&start_cfg));
    cert.max_residual = max_abs(&system.residual(&x, 0.0));
    cert.samples.push((0.0, start_cfg.clone()));

    let unchanged = path.start() == path.target();
    if unchanged {
        cert.success = true;
        cert.endpoint = Some(start_cfg.clone());
        cert.endpoint_gap = start_gap;
        cert.endgame_converged = true;
        cert.endgame_difference = 0.0;
        cert.min_pure_condition_magnitude_before_end =
            math::abs(rigidity::pure_condition_with(fw, gauge, &start_cfg)?);
        return Ok(cert);
    }

    let mut hint = opts.tracker.initial_step;
    let mut t = 0.0;
    let mut endgame_samples: Vec<DVector<f64>> = Vec::new();
    let mut previous_estimate: Option<DVector<f64>> = None;
    let mut estimate: Option<DVector<f64>> = None;
    let mut residual_violation = None;
    for m in 1..=opts.endgame_levels {
        let t_next = 1.0 - math::powi(0.5, m as i32);
        let mut observed: Vec<(f64, DVector<f64>)> = Vec::new();
        let tracked = track(&system, &x, t, t_next, &opts.tracker, &mut hint, &mut cert.steps, |tt, xx| {
            observed.push((tt, xx.clone()));
        });
        for (tt, xx) in observed {
            let r = max_abs(&system.residual(&xx, tt));
            cert.max_residual = cert.max_residual.max(r);
            if r > opts.residual_tol && residual_violation.is_none() {
                residual_violation = Some(tt);
            }
            cert.samples.push((tt, to_cfg(&xx)));
        }
        match tracked {
            Ok(xn) => x = xn,
            Err(failure) => {
                cert.failure = Some(format!("path lost at t = {:.6} ({:?})", failure.t(), failure));
                break;
            }
        }
        t = t_next;
        endgame_samples.push(x.clone());
        if endgame_samples.len() > opts.richardson_order {
            let est = richardson(&endgame_samples, math::sqrt(0.5), opts.richardson_order);
            if let (Some(e), Some(p)) = (&est, &previous_estimate) {
                cert.endgame_difference = max_abs(&(e - p));
                if cert.endgame_difference < opts.endgame_tol * diameter {
                    estimate = est.clone();
                    cert.endgame_converged = true;
                    break;
                }
            }
            previous_estimate = est;
        }
    }
    for (tt, cfg) in &cert.samples {
        if *tt < 1.0 {
            if let Ok(p) = rigidity::pure_condition_with(fw, gauge, cfg) {
                cert.min_pure_condition_magnitude_before_end = cert.min_pure_condition_magnitude_before_end.min(math::abs(p));
            }
        }
    }
    if let Some(t_bad) = residual_violation {
        cert.failure.get_or_insert(format!("length residual above tolerance at t = {t_bad:.6}"));
    }
    if cert.failure.is_none() && !cert.endgame_converged {
        cert.failure = Some(format!(
            "endgame did not converge (last extrapolant difference {:.3e})",
            cert.endgame_difference
        ));
    }
    if let Some(est) = estimate.or(previous_estimate) {
        if est.iter().all(|v| v.is_finite()) {
            let end = to_cfg(&est);
            cert.endpoint_gap = model::edge_lengths(fw, &end)
                .iter()
                .zip(path.target())
                .fold(0.0f64, |m, (a, b)| m.max(math::abs(a - b)));
            cert.endpoint = Some(end);
        }
    }
    if cert.failure.is_none() && cert.endpoint_gap > opts.endpoint_tol * diameter {
        cert.failure = Some(format!(
            "extrapolated endpoint misses the target lengths by {:.3e}",
            cert.endpoint_gap
        ));
    }
    cert.success = cert.failure.is_none() && cert.endpoint.is_some();
    Ok(cert)
}

/// Distance between the canonical endpoint and the canonical `target`, or
/// `None` without an endpoint.
pub fn endpoint_distance(gauge: &Gauge, cert: &PathCertificate, target: &Configuration) -> Option<f64> {
    let end = cert.endpoint.as_ref()?;
    Some(gauge.canonicalize(end).max_abs_diff(&gauge.canonicalize(target)))
}

/// True iff tracking succeeded and the canonical endpoint lies within
/// `tol * diameter` of the canonical `target`.
pub fn check_endpoint(gauge: &Gauge, cert: &PathCertificate, target: &Configuration, tol: f64) -> bool {
    if !cert.success {
        return false;
    }
    let diameter = target.diameter().max(f64::MIN_POSITIVE);
    endpoint_distance(gauge, cert, target).is_some_and(|d| d <= tol * diameter)
}

/// Retraces a successful certificate from its last tracked sample back to
/// `t = 0` and returns the distance (max coordinate) to the start
/// configuration.
pub fn reversal_gap(fw: &Framework, gauge: &Gauge, cert: &PathCertificate, path: &LengthPath, opts: &PathOptions) -> Result<f64> {
    let (t_last, cfg_last) = cert
        .samples
        .last()
        .ok_or_else(|| Error::Precondition("certificate has no samples".into()))?;
    let (_, start) = &cert.samples[0];
    let system = LengthSystem {
        system: LiftedSystem::new(fw, gauge.free_indices(), cfg_last, 1.0),
        squared: path.squared_at(0.0),
        rate: path.squared_rate(),
        n: gauge.free_count(),
    };
    let x = DVector::from_vec(gauge.free_values(cfg_last));
    let mut hint = opts.tracker.initial_step.min(1.0 - t_last).max(opts.tracker.min_step);
    let mut stats = TrackStats::default();
    let back = track(&system, &x, *t_last, 0.0, &opts.tracker, &mut hint, &mut stats, |_, _| {})
        .map_err(|f| Error::Numeric(format!("reverse tracking failed: {f:?}")))?;
    let mut cfg = cfg_last.clone();
    for (&flat, v) in gauge.free_indices().iter().zip(back.iter()) {
        cfg.as_mut_slice()[flat] = *v;
    }
    Ok(cfg.max_abs_diff(start))
}

/// Energy of one element as a function of `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementMonotonicity {
    /// `bar e` (edge index) or `plate p`.
    pub label: String,
    /// `(c0, c1, c2)` of the exact fit `c0 + c1 t + c2 t^2` through
    /// `t = 0, 1/2, 1` (Green-Lagrange only).
    pub quadratic: Option<[f64; 3]>,
    /// Vertex of the fitted parabola (`-inf` when it opens downward or is linear).
    pub vertex: Option<f64>,
    /// Largest deviation of the samples from the fit.
    pub fit_error: Option<f64>,
    /// Location of the smallest sampled energy.
    pub min_at: f64,
    pub nondecreasing: bool,
    pub samples: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub ts: Vec<f64>,
    pub elements: Vec<ElementMonotonicity>,
    pub total: ElementMonotonicity,
    pub monotone: bool,
}

fn analyse_series(label: String, ts: &[f64], values: &[f64], quadratic: bool, scale: f64) -> ElementMonotonicity {
    let slack = 1e-12 * scale;
    let nondecreasing = values.windows(2).all(|w| w[1] >= w[0] - slack);
    let mut min_at = ts[0];
    let mut min_val = values[0];
    for (t, v) in ts.iter().zip(values) {
        if *v < min_val {
            min_val = *v;
            min_at = *t;
        }
    }
    let (coeffs, vertex, fit_error) = if quadratic {
        let e = |t: f64| fit_value(ts, values, t);
        let (u0, uh, u1) = (e(0.0), e(0.5), e(1.0));
        let c0 = u0;
        let c2 = 2.0 * (u1 - 2.0 * uh + u0);
        let c1 = u1 - u0 - c2;
        let vertex = if c2 > 0.0 { -c1 / (2.0 * c2) } else if c1 >= 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
        let err = ts
            .iter()
            .zip(values)
            .map(|(t, v)| math::abs(c0 + c1 * t + c2 * t * t - v))
            .fold(0.0, f64::max);
        (Some([c0, c1, c2]), Some(vertex), Some(err))
    } else {
        (None, None, None)
    };
    ElementMonotonicity {
        label,
        quadratic: coeffs,
        vertex,
        fit_error,
        min_at,
        nondecreasing,
        samples: values.to_vec(),
    }
}

fn fit_value(ts: &[f64], values: &[f64], t: f64) -> f64 {
    ts.iter()
        .zip(values)
        .find(|(s, _)| **s == t)
        .map(|(_, v)| *v)
        .unwrap_or(f64::NAN)
}

/// Per-element energies along the path at `samples + 1` equally spaced
/// parameters (at least 3, so `t = 0, 1/2, 1` are included when `samples`
/// is even). For Green-Lagrange strain each element energy is fitted by the
/// exact parabola through `t = 0, 1/2, 1`; the path is monotone when every
/// element (and the total) is nondecreasing at the samples and, for
/// Green-Lagrange strain, every vertex lies at `t <= 0` (up to rounding).
pub fn verify_monotonicity(fw: &Framework, path: &LengthPath, samples: usize) -> Result<MonotonicityReport> {
    let samples = if samples < 2 { 2 } else { samples + samples % 2 };
    let ts: Vec<f64> = (0..=samples).map(|k| k as f64 / samples as f64).collect();
    let mut per: Vec<Vec<f64>> = Vec::new();
    for &t in &ts {
        per.push(strain::element_energies(fw, &interpolate_lengths(path, t)?)?);
    }
    let quadratic = fw.strain_model() == StrainModel::GreenLagrange;
    let count = per[0].len();
    let bars: Vec<usize> = fw.bars().collect();
    let scale = per.last().map(|v| v.iter().sum::<f64>()).unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut elements = Vec::with_capacity(count);
    for el in 0..count {
        let label = if el < bars.len() {
            format!("bar {}", bars[el])
        } else {
            format!("plate {}", el - bars.len())
        };
        let values: Vec<f64> = per.iter().map(|v| v[el]).collect();
        elements.push(analyse_series(label, &ts, &values, quadratic, scale));
    }
    let totals: Vec<f64> = per.iter().map(|v| v.iter().sum()).collect();
    let total = analyse_series("total".into(), &ts, &totals, quadratic, scale);
    let vertex_ok = |e: &ElementMonotonicity| match (e.vertex, e.quadratic) {
        (Some(v), Some(c)) => v <= 1e-9 || math::abs(c[1]) + math::abs(c[2]) <= 1e-14 * scale,
        _ => true,
    };
    let monotone = elements.iter().chain(core::iter::once(&total)).all(|e| e.nondecreasing && vertex_ok(e));
    Ok(MonotonicityReport {
        ts,
        elements,
        total,
        monotone,
    })
}
