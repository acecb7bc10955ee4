//! Total-degree homotopy for all complex critical points of the
//! Green-Lagrange energy.
//!
//! The critical equations `dU/dx_k = 0` are cubic. Homogenizing with `x_0`
//! and adding a random affine patch `p . X = 1` gives a square system in
//! `N + 1` unknowns that is tracked from the start system
//! `x_k^3 - x_0^3 = 0` (all `3^N` start points known) along
//! `H = (1 - t) gamma G + t F` with a random complex `gamma`. Each path ends
//! with a power-series endgame (cycle-number estimate plus Richardson
//! extrapolation). Endpoints with `x_0 = 0` are solutions at infinity; the
//! remaining ones are the finite critical points, of which the real ones are
//! polished by real Newton and classified.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::newton::refine_critical;
use super::{classify, CriticalPoint, DEFAULT_HESSIAN_ZERO_TOL};
use crate::continuation::{correct, richardson, track, vec_norm, ParametrizedSystem, TrackStats, TrackerOptions};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{Framework, Gauge, StrainModel};
use crate::par;
use crate::strain::{EnergyLandscape, LiftedSystem};

type C = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomotopyOptions {
    pub seed: u64,
    pub tracker: TrackerOptions,
    /// Value of `1 - t` where the endgame starts.
    pub endgame_start: f64,
    /// Smallest `1 - t` sampled by the endgame.
    pub endgame_min: f64,
    /// Agreement of successive endgame estimates (relative) for convergence.
    pub endgame_tol: f64,
    /// Largest cycle number considered.
    pub max_cycle: usize,
    /// Endpoints with `|x_0| <= infinity_tol * |X|` are at infinity.
    pub infinity_tol: f64,
    /// A finite endpoint is real when every imaginary part of its physical
    /// coordinates is below this bound.
    pub real_tol: f64,
    /// Gradient tolerance (times `A`) for the real Newton polish.
    pub gradient_tol: f64,
    pub hessian_zero_tol: f64,
}

impl Default for HomotopyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tracker: TrackerOptions {
                corrector_tol: 1e-10,
                max_step: 0.05,
                ..TrackerOptions::default()
            },
            endgame_start: 0.1,
            endgame_min: 1e-13,
            endgame_tol: 1e-9,
            max_cycle: 8,
            infinity_tol: 1e-6,
            real_tol: 1e-8,
            gradient_tol: 1e-11,
            hessian_zero_tol: DEFAULT_HESSIAN_ZERO_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStatus {
    Finite,
    Infinite,
    /// Tracking failed before the endgame produced an estimate.
    Failed,
}

/// Result of one homotopy path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathOutcome {
    pub index: usize,
    pub status: PathStatus,
    /// Physical free coordinates of a finite endpoint.
    pub endpoint: Option<Vec<C>>,
    /// Estimated winding (cycle) number at the endpoint.
    pub cycle: usize,
    /// Whether the endgame estimates converged.
    pub converged: bool,
    /// `|x_0| / |X|` at the endpoint estimate.
    pub homogenizing_ratio: f64,
    pub is_real: bool,
    pub steps: TrackStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyReport {
    /// Number of tracked paths, `3^N`.
    pub paths: usize,
    pub outcomes: Vec<PathOutcome>,
    pub finite: usize,
    pub infinite: usize,
    pub failed: usize,
    /// Real finite endpoints that polished to critical points, classified
    /// (duplicates included, path order).
    pub real_points: Vec<CriticalPoint>,
    /// Real endpoints whose polish failed.
    pub polish_failures: usize,
}

struct CriticalHomotopy {
    system: LiftedSystem,
    matrix: DMatrix<C>,
    n: usize,
    gamma: C,
    patch: Vec<C>,
}

impl CriticalHomotopy {
    fn target(&self, y: &DVector<C>) -> (Vec<C>, DMatrix<C>) {
        let x = y.as_slice();
        let q = DVector::from_vec(self.system.lifted(x));
        let g: Vec<C> = (&self.matrix * &q * C::new(2.0, 0.0)).iter().copied().collect();
        let h = &self.matrix * C::new(2.0, 0.0);
        (self.system.gradient(x, &g), self.system.hessian(x, &g, &h))
    }
}

impl ParametrizedSystem<C> for CriticalHomotopy {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn evaluate(&self, y: &DVector<C>, t: f64) -> (DVector<C>, DMatrix<C>, DVector<C>) {
        let n = self.n;
        let (f, jf) = self.target(y);
        let s = C::new(1.0 - t, 0.0) * self.gamma;
        let tt = C::new(t, 0.0);
        let three = C::new(3.0, 0.0);
        let y0 = y[0];
        let mut h = DVector::zeros(n + 1);
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        let mut ht = DVector::zeros(n + 1);
        for k in 1..=n {
            let r = k - 1;
            let gk = y[k] * y[k] * y[k] - y0 * y0 * y0;
            h[r] = s * gk + tt * f[k];
            ht[r] = f[k] - self.gamma * gk;
            for c in 0..=n {
                jac[(r, c)] = tt * jf[(k, c)];
            }
            jac[(r, k)] += s * three * y[k] * y[k];
            jac[(r, 0)] -= s * three * y0 * y0;
        }
        let mut p = C::new(-1.0, 0.0);
        for c in 0..=n {
            p += self.patch[c] * y[c];
            jac[(n, c)] = self.patch[c];
        }
        h[n] = p;
        (h, jac, ht)
    }
}

fn unit_complex(rng: &mut ChaCha8Rng) -> C {
    let theta = rng.random_range(0.0..(2.0 * math::PI));
    let (s, c) = math::sin_cos(theta);
    C::new(c, s)
}

/// Start point number `index` (base-3 digits select cube roots of unity).
fn start_point(index: usize, n: usize, patch: &[C]) -> DVector<C> {
    let mut y = DVector::from_element(n + 1, C::new(1.0, 0.0));
    let mut rest = index;
    for k in 1..=n {
        let digit = rest % 3;
        rest /= 3;
        let (s, c) = math::sin_cos(2.0 * math::PI * digit as f64 / 3.0);
        y[k] = C::new(c, s);
    }
    let mut p = C::new(0.0, 0.0);
    for c in 0..=n {
        p += patch[c] * y[c];
    }
    y / p
}

struct EndgameResult {
    estimate: DVector<C>,
    cycle: usize,
    converged: bool,
    /// `|x_0| / |X|` strictly decreased over the last samples.
    x0_decaying: bool,
}

fn x0_decaying(samples: &[DVector<C>]) -> bool {
    if samples.len() < 4 {
        return false;
    }
    let r: Vec<f64> = samples[samples.len() - 4..]
        .iter()
        .map(|y| math::sqrt(y[0].norm_sqr()) / vec_norm(y))
        .collect();
    r.windows(2).all(|w| w[1] < w[0]) && r[3] < 0.8 * r[0]
}

fn endgame(sys: &CriticalHomotopy, y: DVector<C>, opts: &HomotopyOptions, hint: &mut f64, stats: &mut TrackStats) -> EndgameResult {
    let mut samples = vec![y];
    let mut rem = opts.endgame_start;
    let mut best: Option<(usize, DVector<C>)> = None;
    let end_newton = TrackerOptions {
        corrector_tol: 1e-13,
        max_corrector_iters: 12,
        max_jump: f64::INFINITY,
        ..opts.tracker
    };
    loop {
        let next = rem * 0.5;
        if next < opts.endgame_min {
            break;
        }
        let last = samples.last().cloned().unwrap_or_else(|| DVector::zeros(sys.n + 1));
        match track(sys, &last, 1.0 - rem, 1.0 - next, &opts.tracker, hint, stats, |_, _| {}) {
            Ok(y) => samples.push(y),
            Err(_) => break,
        }
        rem = next;
        let m = samples.len();
        if m < 3 {
            continue;
        }
        let d1 = vec_norm(&(&samples[m - 2] - &samples[m - 3]));
        let d2 = vec_norm(&(&samples[m - 1] - &samples[m - 2]));
        let scale = 1.0 + vec_norm(&samples[m - 1]);
        if d2 <= 1e-15 * scale {
            return EndgameResult {
                estimate: samples[m - 1].clone(),
                cycle: 1,
                converged: true,
                x0_decaying: x0_decaying(&samples),
            };
        }
        let w = math::ln(d1 / d2) / math::ln(2.0);
        let cycle = if w > 0.0 && w < 0.75 {
            (math::round(1.0 / w) as usize).clamp(1, opts.max_cycle)
        } else {
            1
        };
        if cycle == 1 {
            if let Some(y1) = correct(sys, &samples[m - 1], 1.0, &end_newton) {
                if vec_norm(&(&y1 - &samples[m - 1])) <= 4.0 * d2 {
                    return EndgameResult {
                        estimate: y1,
                        cycle: 1,
                        converged: true,
                        x0_decaying: x0_decaying(&samples),
                    };
                }
            }
        }
        let ratio = math::pow(0.5, 1.0 / cycle as f64);
        let order = (m - 1).min(4);
        if let Some(est) = richardson(&samples, ratio, order) {
            if let Some((c_prev, prev)) = &best {
                if *c_prev == cycle && vec_norm(&(&est - prev)) <= opts.endgame_tol * (1.0 + vec_norm(&est)) {
                    return EndgameResult {
                        estimate: est,
                        cycle,
                        converged: true,
                        x0_decaying: x0_decaying(&samples),
                    };
                }
            }
            best = Some((cycle, est));
        }
    }
    let decaying = x0_decaying(&samples);
    match best {
        Some((cycle, estimate)) => EndgameResult {
            estimate,
            cycle,
            converged: false,
            x0_decaying: decaying,
        },
        None => EndgameResult {
            estimate: samples.pop().unwrap_or_else(|| DVector::zeros(sys.n + 1)),
            cycle: 1,
            converged: false,
            x0_decaying: decaying,
        },
    }
}

/// Solves for every complex critical point of a Green-Lagrange framework
/// over the gauge's free coordinates.
pub fn solve_critical_homotopy(fw: &Framework, gauge: &Gauge, opts: &HomotopyOptions) -> Result<HomotopyReport> {
    if fw.strain_model() != StrainModel::GreenLagrange {
        return Err(Error::StrainModel(
            "the homotopy solver needs polynomial critical equations (Green-Lagrange strain)",
        ));
    }
    let n = gauge.free_count();
    if n == 0 {
        return Err(Error::Precondition("no free coordinates".into()));
    }
    let paths = 3usize
        .checked_pow(n as u32)
        .filter(|p| *p <= 50_000_000)
        .ok_or_else(|| Error::Precondition(alloc::format!("3^{n} start paths is too many")))?;
    let base = gauge.embed(&vec![0.0; n]);
    let land = EnergyLandscape::new(fw, gauge.free_indices(), &base)?;
    let scale = fw.edges().iter().map(|e| e.rest_length).fold(0.0, f64::max);
    let system = LiftedSystem::new(fw, gauge.free_indices(), &base, scale);
    let m = land
        .energy_matrix()
        .ok_or(Error::StrainModel("energy matrix requires Green-Lagrange strain"))?
        .matrix()
        .clone();
    let k = m.nrows();
    let mut ms = DMatrix::zeros(k, k);
    let s2 = scale * scale;
    for r in 0..k {
        for c in 0..k {
            let dr = if r == 0 { 1.0 } else { s2 };
            let dc = if c == 0 { 1.0 } else { s2 };
            ms[(r, c)] = dr * m[(r, c)] * dc;
        }
    }
    let norm = ms.amax();
    let matrix = ms.map(|v| C::new(v / norm, 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let gamma = unit_complex(&mut rng);
    let patch: Vec<C> = (0..=n).map(|_| unit_complex(&mut rng)).collect();
    let sys = CriticalHomotopy {
        system,
        matrix,
        n,
        gamma,
        patch,
    };

    let tol = opts.gradient_tol * fw.cross_section();
    let results = par::map_indexed(paths, |index| {
        let start = start_point(index, n, &sys.patch);
        let mut stats = TrackStats::default();
        let mut hint = opts.tracker.initial_step;
        let tracked = track(&sys, &start, 0.0, 1.0 - opts.endgame_start, &opts.tracker, &mut hint, &mut stats, |_, _| {});
        let y = match tracked {
            Ok(y) => y,
            Err(_) => {
                return (
                    PathOutcome {
                        index,
                        status: PathStatus::Failed,
                        endpoint: None,
                        cycle: 0,
                        converged: false,
                        homogenizing_ratio: f64::NAN,
                        is_real: false,
                        steps: stats,
                    },
                    None,
                )
            }
        };
        let end = endgame(&sys, y, opts, &mut hint, &mut stats);
        let ratio = math::sqrt(end.estimate[0].norm_sqr()) / vec_norm(&end.estimate);
        let at_infinity = !(ratio > opts.infinity_tol);
        let status = match (end.converged, at_infinity || end.x0_decaying) {
            (true, _) if at_infinity => PathStatus::Infinite,
            (true, _) => PathStatus::Finite,
            (false, true) => PathStatus::Infinite,
            (false, false) => PathStatus::Failed,
        };
        if status != PathStatus::Finite {
            return (
                PathOutcome {
                    index,
                    status,
                    endpoint: None,
                    cycle: end.cycle,
                    converged: end.converged,
                    homogenizing_ratio: ratio,
                    is_real: false,
                    steps: stats,
                },
                None,
            );
        }
        let y0 = end.estimate[0];
        let x: Vec<C> = (1..=n).map(|i| end.estimate[i] / y0 * C::new(scale, 0.0)).collect();
        let is_real = x.iter().all(|z| math::abs(z.im) < opts.real_tol);
        let point = if is_real {
            let start: Vec<f64> = x.iter().map(|z| z.re).collect();
            Some(
                refine_critical(&land, &start, tol, 50)
                    .and_then(|(xr, _)| classify(fw, gauge, &land.configuration(&xr), opts.hessian_zero_tol).ok()),
            )
        } else {
            None
        };
        (
            PathOutcome {
                index,
                status: PathStatus::Finite,
                endpoint: Some(x),
                cycle: end.cycle,
                converged: end.converged,
                homogenizing_ratio: ratio,
                is_real,
                steps: stats,
            },
            point,
        )
    });

    let mut outcomes = Vec::with_capacity(paths);
    let mut real_points = Vec::new();
    let mut polish_failures = 0;
    for (outcome, point) in results {
        match point {
            Some(Some(p)) => real_points.push(p),
            Some(None) => polish_failures += 1,
            None => {}
        }
        outcomes.push(outcome);
    }
    let count = |s: PathStatus| outcomes.iter().filter(|o| o.status == s).count();
    Ok(HomotopyReport {
        paths,
        finite: count(PathStatus::Finite),
        infinite: count(PathStatus::Infinite),
        failed: count(PathStatus::Failed),
        outcomes,
        real_points,
        polish_failures,
    })
}
