//! Predictor-corrector continuation of `H(x, t) = 0` in a real parameter `t`,
//! generic over real and complex unknowns, plus Richardson extrapolation for
//! endgames.

use alloc::vec::Vec;
use nalgebra::{ComplexField, DMatrix, DVector};

use crate::math;

/// A square system depending on a real parameter.
pub trait ParametrizedSystem<T: ComplexField<RealField = f64>> {
    fn dim(&self) -> usize;
    /// `(H, dH/dx, dH/dt)` at `(x, t)`.
    fn evaluate(&self, x: &DVector<T>, t: f64) -> (DVector<T>, DMatrix<T>, DVector<T>);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackerOptions {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Newton update size accepted as converged, relative to `1 + |x|`.
    pub corrector_tol: f64,
    pub max_corrector_iters: usize,
    pub max_steps: usize,
    /// Largest accepted corrector displacement relative to `1 + |x|`; larger
    /// jumps are treated as failures (branch jumping).
    pub max_jump: f64,
}

impl Default for TrackerOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.01,
            max_step: 0.05,
            min_step: 1e-12,
            corrector_tol: 1e-11,
            max_corrector_iters: 4,
            max_steps: 100_000,
            max_jump: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrackFailure {
    /// Step size fell below the minimum at parameter `t`.
    StepUnderflow { t: f64 },
    /// Step budget exhausted at `t`.
    MaxSteps { t: f64 },
    /// Singular Jacobian encountered at `t`.
    Singular { t: f64 },
}

impl TrackFailure {
    pub fn t(&self) -> f64 {
        match *self {
            TrackFailure::StepUnderflow { t } | TrackFailure::MaxSteps { t } | TrackFailure::Singular { t } => t,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrackStats {
    pub accepted: usize,
    pub rejected: usize,
}

fn norm<T: ComplexField<RealField = f64>>(v: &DVector<T>) -> f64 {
    v.iter().map(|z| z.clone().modulus_squared()).sum::<f64>().sqrt()
}

fn tangent<T, S>(sys: &S, x: &DVector<T>, t: f64) -> Option<DVector<T>>
where
    T: ComplexField<RealField = f64>,
    S: ParametrizedSystem<T> + ?Sized,
{
    let (_, hx, ht) = sys.evaluate(x, t);
    hx.lu().solve(&(-ht))
}

/// Newton iterations at fixed `t`. Returns the corrected point if the
/// updates converge and contract.
pub fn correct<T, S>(sys: &S, x: &DVector<T>, t: f64, opts: &TrackerOptions) -> Option<DVector<T>>
where
    T: ComplexField<RealField = f64>,
    S: ParametrizedSystem<T> + ?Sized,
{
    let mut x = x.clone();
    let start = x.clone();
    let mut last = f64::INFINITY;
    for _ in 0..opts.max_corrector_iters {
        let (h, hx, _) = sys.evaluate(&x, t);
        let dx = hx.lu().solve(&(-h))?;
        let size = norm(&dx);
        if !size.is_finite() || size > 0.5 * last && size > opts.corrector_tol * (1.0 + norm(&x)) {
            return None;
        }
        x += &dx;
        last = size;
        if size <= opts.corrector_tol * (1.0 + norm(&x)) {
            if norm(&(&x - &start)) > opts.max_jump * (1.0 + norm(&start)) {
                return None;
            }
            return Some(x);
        }
    }
    None
}

fn rk4<T, S>(sys: &S, x: &DVector<T>, t: f64, h: f64) -> Option<DVector<T>>
where
    T: ComplexField<RealField = f64>,
    S: ParametrizedSystem<T> + ?Sized,
{
    let hh = T::from_real(h);
    let k1 = tangent(sys, x, t)?;
    let k2 = tangent(sys, &(x + &k1 * T::from_real(h / 2.0)), t + h / 2.0)?;
    let k3 = tangent(sys, &(x + &k2 * T::from_real(h / 2.0)), t + h / 2.0)?;
    let k4 = tangent(sys, &(x + &k3 * hh.clone()), t + h)?;
    let incr = (k1 + k2 * T::from_real(2.0) + k3 * T::from_real(2.0) + k4) * T::from_real(h / 6.0);
    Some(x + incr)
}

/// Tracks a solution from `t_from` to `t_to` (either direction). `observe`
/// sees every accepted point.
pub fn track<T, S, F>(
    sys: &S,
    x0: &DVector<T>,
    t_from: f64,
    t_to: f64,
    opts: &TrackerOptions,
    step_hint: &mut f64,
    stats: &mut TrackStats,
    mut observe: F,
) -> Result<DVector<T>, TrackFailure>
where
    T: ComplexField<RealField = f64>,
    S: ParametrizedSystem<T> + ?Sized,
    F: FnMut(f64, &DVector<T>),
{
    let dir = if t_to >= t_from { 1.0 } else { -1.0 };
    let span = math::abs(t_to - t_from);
    if span == 0.0 {
        return Ok(x0.clone());
    }
    let mut x = x0.clone();
    let mut t = t_from;
    let mut h = step_hint.min(opts.max_step).max(opts.min_step);
    let mut streak = 0usize;
    let mut steps = 0usize;
    while dir * (t_to - t) > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(TrackFailure::MaxSteps { t });
        }
        let remaining = math::abs(t_to - t);
        let step = h.min(remaining);
        let t_next = if step >= remaining { t_to } else { t + dir * step };
        let predicted = rk4(sys, &x, t, t_next - t);
        let corrected = predicted.and_then(|p| correct(sys, &p, t_next, opts));
        match corrected {
            Some(xn) => {
                x = xn;
                t = t_next;
                stats.accepted += 1;
                observe(t, &x);
                streak += 1;
                if streak >= 3 {
                    h = (h * 2.0).min(opts.max_step);
                    streak = 0;
                }
            }
            None => {
                stats.rejected += 1;
                streak = 0;
                h *= 0.5;
                if h < opts.min_step {
                    return Err(TrackFailure::StepUnderflow { t });
                }
            }
        }
    }
    *step_hint = h;
    Ok(x)
}

/// Richardson table for samples `x(s_m)` with `s_m = s_0 r^m`, assuming
/// `x(s) = x* + a_1 s + a_2 s^2 + ...`. Returns the highest-order
/// extrapolant using the last `order + 1` samples.
pub fn richardson<T: ComplexField<RealField = f64>>(samples: &[DVector<T>], ratio: f64, order: usize) -> Option<DVector<T>> {
    let k = order.min(samples.len().checked_sub(1)?);
    let tail = &samples[samples.len() - k - 1..];
    let mut table: Vec<DVector<T>> = tail.to_vec();
    for j in 1..=k {
        let rj = math::powi(ratio, j as i32);
        let mut next = Vec::with_capacity(table.len() - 1);
        for m in 1..table.len() {
            // x(s r) - r^j x(s) cancels the s^j term
            let v = (&table[m] - &table[m - 1] * T::from_real(rj)) * T::from_real(1.0 / (1.0 - rj));
            next.push(v);
        }
        table = next;
    }
    table.pop()
}

pub(crate) fn vec_norm<T: ComplexField<RealField = f64>>(v: &DVector<T>) -> f64 {
    norm(v)
}
