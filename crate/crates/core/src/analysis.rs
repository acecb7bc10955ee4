//! Snappability and singularity distance of an undeformed realization.
//!
//! Snappability: solve for the real critical points of the energy, keep the
//! non-minima (one per congruence class) in ascending density, and accept
//! the first one that the undeformed realization can be deformed into along
//! the squared-length path. The singularity distance can either reuse that
//! result (the two coincide) or minimize the density directly over the
//! shakiness variety `pure condition = 0`, keeping the path requirement.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::critical::{
    self, build_quotient_set, solve_critical_homotopy, solve_critical_newton, CriticalPoint, HomotopyOptions,
    NewtonOptions, QuotientOptions, QuotientSet,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::math;
use crate::model::{self, Configuration, Framework, Gauge, StrainModel};
use crate::par;
use crate::pathtrack::{self, check_endpoint, endpoint_distance, LengthPath, PathCertificate, PathOptions};
use crate::rigidity::{self, DEFAULT_RANK_TOL};
use crate::strain::{self, EnergyLandscape, LiftedSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Homotopy,
    Newton,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Homotopy => "homotopy",
            Solver::Newton => "newton",
        }
    }

    /// Homotopy for Green-Lagrange strain, Newton multistart otherwise.
    pub fn default_for(model: StrainModel) -> Self {
        match model {
            StrainModel::GreenLagrange => Solver::Homotopy,
            StrainModel::CauchyEngineering => Solver::Newton,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Snappability,
    /// Singularity distance through its identity with snappability.
    Thm3,
    /// Singularity distance by constrained minimization on the shakiness variety.
    Constrained,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Snappability => "snappability",
            Method::Thm3 => "thm3",
            Method::Constrained => "constrained",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstrainedOptions {
    /// Random starts around the undeformed realization.
    pub random_starts: usize,
    /// Standard deviation of the random perturbation relative to the diameter.
    pub perturbation: f64,
    /// Also start from every point of the quotient set.
    pub seed_with_quotient: bool,
    pub max_iter: usize,
}

impl Default for ConstrainedOptions {
    fn default() -> Self {
        Self {
            random_starts: 64,
            perturbation: 0.05,
            seed_with_quotient: true,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisOptions {
    /// `None` picks [`Solver::default_for`] the strain model.
    pub solver: Option<Solver>,
    pub seed: u64,
    pub newton: NewtonOptions,
    pub homotopy: HomotopyOptions,
    pub quotient: QuotientOptions,
    pub path: PathOptions,
    pub constrained: ConstrainedOptions,
    pub rank_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            solver: None,
            seed: 0,
            newton: NewtonOptions::default(),
            homotopy: HomotopyOptions::default(),
            quotient: QuotientOptions::default(),
            path: PathOptions::default(),
            constrained: ConstrainedOptions::default(),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Solver bookkeeping for a critical-point search.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSearch {
    pub solver: Solver,
    pub quotient: QuotientSet,
    /// Real critical points before deduplication.
    pub raw_real_points: usize,
    /// Distinct real critical points, minima included.
    pub distinct_real_points: usize,
    pub tracked_paths: Option<usize>,
    pub finite_solutions: Option<usize>,
    pub failed_paths: Option<usize>,
    pub newton_starts: Option<usize>,
    pub newton_converged: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub solver: Option<Solver>,
    pub search: Option<CriticalSearch>,
    /// Candidate tried, and why it was rejected, in ascending density.
    pub rejected: Vec<(f64, String)>,
    /// Newton solver used and nothing found: infinity is not conclusive.
    pub low_confidence: bool,
    pub witness_energy: Option<f64>,
    pub witness_pure_condition: Option<f64>,
    pub endpoint_distance: Option<f64>,
    pub constrained_starts: Option<usize>,
    pub constrained_converged: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    /// Density of the witness; `None` when infinite.
    pub value: Option<f64>,
    pub infinite: bool,
    pub witness_cfg: Option<Configuration>,
    pub witness_is_shaky: bool,
    pub path_certificate: Option<PathCertificate>,
    pub candidates_examined: usize,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// Newton projection of `cfg` onto the rest lengths over the gauge's free
/// coordinates. Returns the projected (gauge-canonical) configuration and
/// the largest length residual before projection.
pub fn polish_to_rest_lengths(fw: &Framework, cfg: &Configuration) -> Result<(Configuration, f64)> {
    let gauge = Gauge::new(fw)?;
    fw.check_configuration(cfg)?;
    let before = model::max_length_residual(fw, cfg);
    let mut cfg = gauge.canonicalize(cfg);
    if gauge.free_count() != fw.edge_count() {
        return Err(Error::NotIsostatic(format!(
            "{} free coordinates but {} edges",
            gauge.free_count(),
            fw.edge_count()
        )));
    }
    let system = LiftedSystem::new(fw, gauge.free_indices(), &cfg, 1.0);
    let target: Vec<f64> = fw.rest_lengths().iter().map(|l| l * l).collect();
    let scale = target.iter().fold(1.0f64, |m, q| m.max(*q));
    let mut x = gauge.free_values(&cfg);
    for _ in 0..50 {
        let mut vars = vec![1.0];
        vars.extend_from_slice(&x);
        let q = system.lifted(&vars);
        let r = DVector::from_iterator(target.len(), (0..target.len()).map(|e| q[e + 1] - target[e]));
        if r.amax() <= 1e-15 * scale {
            break;
        }
        let jac = system.jacobian(&vars);
        let j = jac.view((1, 1), (target.len(), x.len())).into_owned();
        let dx = linalg::solve(&j, &(-r)).ok_or_else(|| Error::Numeric("singular length Jacobian while polishing".into()))?;
        for (xi, d) in x.iter_mut().zip(dx.iter()) {
            *xi += d;
        }
        if dx.amax() <= 1e-15 * (1.0 + cfg.diameter()) {
            break;
        }
    }
    for (&flat, v) in gauge.free_indices().iter().zip(&x) {
        cfg.as_mut_slice()[flat] = *v;
    }
    let after = model::max_length_residual(fw, &cfg);
    let lmax = fw.rest_lengths().iter().fold(1.0f64, |m, l| m.max(*l));
    if after > 1e-12 * lmax {
        return Err(Error::Numeric(format!("length polish stalled at residual {after:.3e}")));
    }
    Ok((cfg, before))
}

fn check_undeformed(fw: &Framework, cfg: &Configuration, rank_tol: f64) -> Result<()> {
    fw.check_configuration(cfg)?;
    let lmax = fw.rest_lengths().iter().fold(0.0f64, |m, l| m.max(*l));
    let residual = model::max_length_residual(fw, cfg);
    if residual > 1e-9 * lmax {
        return Err(Error::Precondition(format!(
            "realization is deformed (max edge residual {residual:.3e}); project it onto the rest lengths first"
        )));
    }
    let report = model::validate_isostatic(fw, cfg, rank_tol);
    if !report.count_ok {
        return Err(Error::NotIsostatic(report.reasons.join("; ")));
    }
    if rigidity::is_shaky(fw, cfg, rank_tol).shaky {
        return Err(Error::Precondition("realization is shaky".into()));
    }
    Ok(())
}

/// Real critical points of the energy and the resulting quotient set.
pub fn find_critical_points(fw: &Framework, cfg: &Configuration, opts: &AnalysisOptions) -> Result<CriticalSearch> {
    let gauge = Gauge::new(fw)?;
    let solver = opts.solver.unwrap_or_else(|| Solver::default_for(fw.strain_model()));
    let diameter = cfg.diameter();
    match solver {
        Solver::Homotopy => {
            let hopts = HomotopyOptions {
                seed: opts.seed,
                ..opts.homotopy
            };
            let rep = solve_critical_homotopy(fw, &gauge, &hopts)?;
            let raw = rep.real_points.len();
            let distinct = critical::dedup(rep.real_points.clone(), &gauge, opts.quotient.dedup_tol, diameter).len();
            Ok(CriticalSearch {
                solver,
                quotient: build_quotient_set(rep.real_points, &gauge, diameter, &opts.quotient),
                raw_real_points: raw,
                distinct_real_points: distinct,
                tracked_paths: Some(rep.paths),
                finite_solutions: Some(rep.finite),
                failed_paths: Some(rep.failed),
                newton_starts: None,
                newton_converged: None,
            })
        }
        Solver::Newton => {
            let nopts = NewtonOptions {
                seed: opts.seed,
                ..opts.newton
            };
            let rep = solve_critical_newton(fw, &gauge, cfg, &nopts)?;
            let raw = rep.points.len();
            let distinct = critical::dedup(rep.points.clone(), &gauge, opts.quotient.dedup_tol, diameter).len();
            Ok(CriticalSearch {
                solver,
                quotient: build_quotient_set(rep.points, &gauge, diameter, &opts.quotient),
                raw_real_points: raw,
                distinct_real_points: distinct,
                tracked_paths: None,
                finite_solutions: None,
                failed_paths: None,
                newton_starts: Some(rep.starts),
                newton_converged: Some(rep.converged),
            })
        }
    }
}

/// Path certificate from the undeformed `cfg` to `candidate`.
pub fn certify_candidate(fw: &Framework, gauge: &Gauge, cfg: &Configuration, candidate: &Configuration, opts: &PathOptions) -> Result<(PathCertificate, bool, Option<f64>)> {
    let path = LengthPath::from_rest(fw, model::edge_lengths(fw, candidate))?;
    let cert = pathtrack::track_deformation_with(fw, gauge, cfg, &path, opts)?;
    let ok = check_endpoint(gauge, &cert, candidate, opts.endpoint_tol);
    let gap = endpoint_distance(gauge, &cert, candidate);
    Ok((cert, ok, gap))
}

/// Checks candidates (ascending density) in parallel and accepts the first
/// success in that order.
fn accept_first(fw: &Framework, gauge: &Gauge, cfg: &Configuration, candidates: &[CriticalPoint], method: Method, opts: &AnalysisOptions, mut diagnostics: Diagnostics) -> Result<AnalysisReport> {
    let results = par::map_indexed(candidates.len(), |i| certify_candidate(fw, gauge, cfg, &candidates[i].cfg, &opts.path));
    for (i, (cand, res)) in candidates.iter().zip(results).enumerate() {
        let (cert, ok, gap) = match res {
            Ok(r) => r,
            Err(e) => {
                diagnostics.rejected.push((cand.density, format!("{e}")));
                continue;
            }
        };
        if !ok {
            let why = cert.failure.clone().unwrap_or_else(|| match gap {
                Some(g) => format!("path ends at a different realization (distance {g:.3e})"),
                None => "no endpoint".into(),
            });
            diagnostics.rejected.push((cand.density, why));
            continue;
        }
        let witness = cand.cfg.clone();
        let energy = strain::total_energy(fw, &witness)?;
        diagnostics.witness_energy = Some(energy);
        diagnostics.witness_pure_condition = rigidity::pure_condition_with(fw, gauge, &witness).ok();
        diagnostics.endpoint_distance = gap;
        return Ok(AnalysisReport {
            value: Some(strain::density(fw, &witness)?),
            infinite: false,
            witness_is_shaky: rigidity::is_shaky(fw, &witness, opts.rank_tol).shaky,
            witness_cfg: Some(witness),
            path_certificate: Some(cert),
            candidates_examined: i + 1,
            method,
            diagnostics,
        });
    }
    Ok(AnalysisReport {
        value: None,
        infinite: true,
        witness_cfg: None,
        witness_is_shaky: false,
        path_certificate: None,
        candidates_examined: candidates.len(),
        method,
        diagnostics,
    })
}

/// Snappability of the undeformed realization `cfg`.
pub fn snappability(fw: &Framework, cfg: &Configuration, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    snappability_as(fw, cfg, opts, Method::Snappability)
}

fn snappability_as(fw: &Framework, cfg: &Configuration, opts: &AnalysisOptions, method: Method) -> Result<AnalysisReport> {
    check_undeformed(fw, cfg, opts.rank_tol)?;
    let gauge = Gauge::new(fw)?;
    let cfg = gauge.canonicalize(cfg);
    let search = find_critical_points(fw, &cfg, opts)?;
    let candidates = search.quotient.points.clone();
    let diagnostics = Diagnostics {
        solver: Some(search.solver),
        low_confidence: search.solver == Solver::Newton && candidates.is_empty(),
        search: Some(search),
        ..Diagnostics::default()
    };
    accept_first(fw, &gauge, &cfg, &candidates, method, opts, diagnostics)
}

/// Singularity distance of the undeformed realization `cfg`.
pub fn singularity_distance(fw: &Framework, cfg: &Configuration, method: Method, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    match method {
        Method::Snappability | Method::Thm3 => snappability_as(fw, cfg, opts, Method::Thm3),
        Method::Constrained => constrained_distance(fw, cfg, opts),
    }
}

/// Lagrange-Newton on `[grad U + lambda grad p; p] = 0` from `x0`.
fn kkt_newton(land: &EnergyLandscape, fw: &Framework, gauge: &Gauge, x0: &[f64], p_scale: f64, max_iter: usize) -> Option<Vec<f64>> {
    let n = x0.len();
    let a = fw.cross_section();
    let cfg_of = |x: &[f64]| land.configuration(x);
    let pgrad = |x: &[f64]| rigidity::pure_condition_gradient(fw, gauge, &cfg_of(x)).ok();
    let residual = |x: &[f64], lambda: f64| -> Option<(DVector<f64>, f64, f64)> {
        let g = land.gradient(x).ok()?;
        let (p, dp) = pgrad(x)?;
        let mut r = DVector::zeros(n + 1);
        for i in 0..n {
            r[i] = (g[i] + lambda * dp[i]) / a;
        }
        r[n] = p / p_scale;
        let stat = math::sqrt((0..n).map(|i| r[i] * r[i]).sum::<f64>());
        Some((r, stat, math::abs(p / p_scale)))
    };
    let mut x = x0.to_vec();
    // least-squares multiplier at the start
    let mut lambda = {
        let g = land.gradient(&x).ok()?;
        let (_, dp) = pgrad(&x)?;
        let dd: f64 = dp.iter().map(|v| v * v).sum();
        if dd > 0.0 {
            -g.iter().zip(&dp).map(|(a, b)| a * b).sum::<f64>() / dd
        } else {
            0.0
        }
    };
    let (mut r, mut stat, mut feas) = residual(&x, lambda)?;
    let diameter = land.configuration(&x).diameter().max(1.0);
    for _ in 0..max_iter {
        if stat <= 1e-11 && feas <= 1e-12 {
            return Some(x);
        }
        let hu = land.hessian(&x).ok()?;
        let (_, dp) = pgrad(&x)?;
        // Hessian of p by central differences of its analytic gradient
        let h = 1e-6 * diameter;
        let mut hp = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (_, gp) = pgrad(&xp)?;
            let (_, gm) = pgrad(&xm)?;
            for i in 0..n {
                hp[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let hp = (&hp + hp.transpose()) * 0.5;
        let mut k = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] = (hu[(i, j)] + lambda * hp[(i, j)]) / a;
            }
            k[(i, n)] = dp[i] / a;
            k[(n, i)] = dp[i] / p_scale;
        }
        let step = linalg::solve(&k, &(-&r)).or_else(|| {
            let svd = k.clone().svd(true, true);
            svd.solve(&(-&r), 1e-14 * svd.singular_values.max()).ok()
        })?;
        let merit = r.norm();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let xt: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, s)| xi + alpha * s).collect();
            let lt = lambda + alpha * step[n];
            if let Some((rt, st, ft)) = residual(&xt, lt) {
                if rt.norm() < merit || (st <= 1e-11 && ft <= 1e-12) {
                    x = xt;
                    lambda = lt;
                    r = rt;
                    stat = st;
                    feas = ft;
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
    if stat <= 1e-9 && feas <= 1e-11 {
        Some(x)
    } else {
        None
    }
}

/// Minimizes the density over the shakiness variety, keeping only minimizers
/// that admit a path certificate.
fn constrained_distance(fw: &Framework, cfg: &Configuration, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    check_undeformed(fw, cfg, opts.rank_tol)?;
    let gauge = Gauge::new(fw)?;
    let cfg = gauge.canonicalize(cfg);
    let land = EnergyLandscape::new(fw, gauge.free_indices(), &cfg)?;
    let x0 = gauge.free_values(&cfg);
    let diameter = cfg.diameter();
    let p0 = math::abs(rigidity::pure_condition_with(fw, &gauge, &cfg)?);
    let p_scale = if p0 > 0.0 { p0 } else { 1.0 };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_c0de);
    let sigma = opts.constrained.perturbation * diameter;
    for _ in 0..opts.constrained.random_starts {
        starts.push(
            x0.iter()
                .map(|v| {
                    // Box-Muller normal deviate
                    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                    let u2: f64 = rng.random();
                    let (s, _) = math::sin_cos(2.0 * math::PI * u2);
                    v + sigma * math::sqrt(-2.0 * math::ln(u1)) * s
                })
                .collect(),
        );
    }
    let mut search = None;
    if opts.constrained.seed_with_quotient {
        let found = find_critical_points(fw, &cfg, opts)?;
        for p in &found.quotient.points {
            starts.push(gauge.free_values(&p.cfg));
        }
        search = Some(found);
    }
    let results = par::map_indexed(starts.len(), |i| {
        kkt_newton(&land, fw, &gauge, &starts[i], p_scale, opts.constrained.max_iter).and_then(|x| {
            critical::classify(fw, &gauge, &land.configuration(&x), opts.quotient.hessian_zero_tol).ok()
        })
    });
    let converged = results.iter().filter(|r| r.is_some()).count();
    let mut points: Vec<CriticalPoint> = critical::dedup(results.into_iter().flatten().collect(), &gauge, opts.quotient.dedup_tol, diameter)
        .into_iter()
        .filter(|p| p.energy > 0.0)
        .collect();
    critical::sort_by_density(&mut points);
    let diagnostics = Diagnostics {
        solver: search.as_ref().map(|s| s.solver),
        search,
        constrained_starts: Some(starts.len()),
        constrained_converged: Some(converged),
        ..Diagnostics::default()
    };
    accept_first(fw, &gauge, &cfg, &points, Method::Constrained, opts, diagnostics)
}

/// One row of the variant comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct VariantRow {
    pub name: String,
    pub solver: Solver,
    pub tracked_paths: Option<usize>,
    pub finite_solutions: Option<usize>,
    pub quotient_size: usize,
    pub value: Option<f64>,
    pub witness: Option<Configuration>,
}

/// Snappability of several (framework, undeformed realization) variants.
pub fn compare_variants(variants: &[(String, Framework, Configuration)], opts: &AnalysisOptions) -> Result<Vec<VariantRow>> {
    let mut rows = Vec::with_capacity(variants.len());
    for (name, fw, cfg) in variants {
        let rep = snappability(fw, cfg, opts)?;
        let search = rep
            .diagnostics
            .search
            .clone()
            .ok_or_else(|| Error::Numeric("missing solver diagnostics".into()))?;
        rows.push(VariantRow {
            name: name.clone(),
            solver: search.solver,
            tracked_paths: search.tracked_paths,
            finite_solutions: search.finite_solutions,
            quotient_size: search.quotient.len(),
            value: rep.value,
            witness: rep.witness_cfg,
        });
    }
    Ok(rows)
}
