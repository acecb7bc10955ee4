//! Numbered acceptance criteria on the ex1 fixtures. Every criterion prints
//! one `criterion N: PASS|FAIL` line with the measured numbers, then
//! asserts at the required tolerance.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snapkit_cli::cli::prepare;
use snapkit_cli::io;
use snapkit::analysis::{self, AnalysisOptions, AnalysisReport, Method};
use snapkit::critical::{self, CriticalPoint, HomotopyOptions, NewtonOptions};
use snapkit::model::{self, Configuration, Framework, Gauge, StrainModel};
use snapkit::pathtrack::{self, LengthPath};
use snapkit::strain::{self, EnergyLandscape, EnergyMatrix};
use snapkit::rigidity;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> (Framework, Configuration) {
    let (fw, cfg) = io::load_framework(fixture(name)).unwrap();
    let (cfg, _) = prepare(&fw, &cfg, 0).unwrap();
    (fw, cfg)
}

fn verdict(n: u32, pass: bool, details: &str) {
    println!("criterion {n}: {} {details}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {details}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Run {
    fw: Framework,
    cfg: Configuration,
    report: AnalysisReport,
    elapsed: Duration,
}

fn run(name: &str) -> Run {
    let (fw, cfg) = load(name);
    let t = Instant::now();
    let report = analysis::snappability(&fw, &cfg, &AnalysisOptions::default()).unwrap();
    Run { fw, cfg, report, elapsed: t.elapsed() }
}

macro_rules! cached {
    ($fn:ident, $file:expr) => {
        fn $fn() -> &'static Run {
            static CELL: OnceLock<Run> = OnceLock::new();
            CELL.get_or_init(|| run($file))
        }
    };
}

cached!(bars_gl, "ex1_bars_gl.json");
cached!(plate_gl, "ex1_plate_gl.json");
cached!(bars_ce, "ex1_bars_ce.json");
cached!(bars_gl_red, "ex1_bars_gl_red.json");
cached!(plate_gl_red, "ex1_plate_gl_red.json");

fn overlay(name: &str) -> Configuration {
    io::load_configuration(fixture(name), 2).unwrap()
}

const FIXTURES: [&str; 3] = ["ex1_bars_gl.json", "ex1_plate_gl.json", "ex1_bars_ce.json"];

#[test]
fn criterion_1_fixture_reproduction() {
    let cases = [
        ("six-bar GL", bars_gl(), 1.8271e-6, "ex1_cyan.json", 300.0),
        ("plate GL", plate_gl(), 3.2531e-6, "ex1_blue.json", 300.0),
        ("six-bar CE", bars_ce(), 1.8285e-6, "ex1_magenta.json", 60.0),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (label, r, reference, witness_file, budget) in cases {
        let s = r.report.value.unwrap_or(f64::INFINITY);
        let err = rel(s, reference);
        let expected = overlay(witness_file);
        let gap = r.report.witness_cfg.as_ref().map_or(f64::INFINITY, |w| w.max_abs_diff(&expected));
        let secs = r.elapsed.as_secs_f64();
        let ok = err < 5e-4 && gap < 1e-3 && secs < budget;
        pass &= ok;
        details.push(format!(
            "[{label}: s={s:.6e} vs {reference:.4e} rel={err:.2e} (<5e-4 {}), witness gap={gap:.2e} (<1e-3 {}), {secs:.1}s (<{budget}s)]",
            err < 5e-4,
            gap < 1e-3
        ));
    }
    verdict(1, pass, &details.join(" "));
}

#[test]
fn criterion_2_homotopy_bookkeeping() {
    let mut pass = true;
    let mut details = Vec::new();
    for (label, r, finite, quotient) in [("six-bar", bars_gl(), 219i64, 58i64), ("plate", plate_gl(), 285, 62)] {
        let s = r.report.diagnostics.search.as_ref().unwrap();
        let paths = s.tracked_paths.unwrap_or(0);
        let found = s.finite_solutions.unwrap_or(0) as i64;
        let q = s.quotient.len() as i64;
        let ok = paths == 729 && (found - finite).abs() <= 3 && (q - quotient).abs() <= 2;
        pass &= ok;
        details.push(format!(
            "[{label}: paths={paths} finite={found} (target {finite}±3) failed={} #R={q} (target {quotient}±2)]",
            s.failed_paths.unwrap_or(0)
        ));
    }
    verdict(2, pass, &details.join(" "));
}

#[test]
fn criterion_3_constrained_matches_snappability() {
    let mut pass = true;
    let mut details = Vec::new();
    for (label, r) in [("six-bar", bars_gl()), ("plate", plate_gl())] {
        let con = analysis::singularity_distance(&r.fw, &r.cfg, Method::Constrained, &AnalysisOptions::default()).unwrap();
        let (a, b) = (con.value.unwrap_or(f64::INFINITY), r.report.value.unwrap_or(f64::NAN));
        let err = rel(a, b);
        pass &= err < 1e-4;
        details.push(format!("[{label}: constrained={a:.10e} snap={b:.10e} rel={err:.2e}]"));
    }
    verdict(3, pass, &details.join(" "));
}

#[test]
fn criterion_4_green_red_symmetry() {
    let mut pass = true;
    let mut details = Vec::new();
    for (label, green, red) in [("six-bar", bars_gl(), bars_gl_red()), ("plate", plate_gl(), plate_gl_red())] {
        let (a, b) = (green.report.value.unwrap_or(f64::NAN), red.report.value.unwrap_or(f64::INFINITY));
        let err = rel(b, a);
        let gauge = Gauge::new(&green.fw).unwrap();
        let end = |r: &Run| {
            r.report
                .path_certificate
                .as_ref()
                .and_then(|c| c.endpoint.as_ref())
                .map(|e| gauge.canonicalize(e))
        };
        let gap = match (end(green), end(red)) {
            (Some(x), Some(y)) => x.max_abs_diff(&y),
            _ => f64::INFINITY,
        };
        pass &= err < 1e-6 && gap < 1e-5;
        details.push(format!("[{label}: green={a:.10e} red={b:.10e} rel={err:.2e} endpoint gap={gap:.2e}]"));
    }
    verdict(4, pass, &details.join(" "));
}

fn random_configuration(fw: &Framework, base: &Configuration, rng: &mut ChaCha8Rng, amplitude: f64) -> Configuration {
    let mut c = base.clone();
    let gauge = Gauge::new(fw).unwrap();
    for &i in gauge.free_indices() {
        c.as_mut_slice()[i] += rng.random_range(-amplitude..amplitude);
    }
    c
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn criterion_5_derivatives_and_rotation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-6;
    let (mut worst_g, mut worst_h) = (0.0f64, 0.0f64);
    for name in FIXTURES {
        let (fw, base) = load(name);
        let gauge = Gauge::new(&fw).unwrap();
        for _ in 0..100 {
            let cfg = random_configuration(&fw, &base, &mut rng, 0.5);
            let land = EnergyLandscape::new(&fw, gauge.free_indices(), &cfg).unwrap();
            let x = gauge.free_values(&cfg);
            let g = land.gradient(&x).unwrap();
            let hess = land.hessian(&x).unwrap();
            let n = x.len();
            let mut fd_g = vec![0.0; n];
            let mut fd_h = vec![0.0; n * n];
            for i in 0..n {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[i] += h;
                xm[i] -= h;
                fd_g[i] = (land.energy(&xp) - land.energy(&xm)) / (2.0 * h);
                let (gp, gm) = (land.gradient(&xp).unwrap(), land.gradient(&xm).unwrap());
                for j in 0..n {
                    fd_h[j * n + i] = (gp[j] - gm[j]) / (2.0 * h);
                }
            }
            let eg = norm(g.iter().zip(&fd_g).map(|(a, b)| a - b)) / norm(g.iter().copied());
            let eh = norm((0..n * n).map(|k| hess[(k / n, k % n)] - fd_h[k])) / norm((0..n * n).map(|k| hess[(k / n, k % n)]));
            worst_g = worst_g.max(eg);
            worst_h = worst_h.max(eh);
        }
    }
    // GL plate energy under rigid rotations about random centres.
    let (fw, base) = load("ex1_plate_gl.json");
    let plate_index = fw.bars().count();
    let mut worst_rot = 0.0f64;
    for _ in 0..100 {
        let cfg = random_configuration(&fw, &base, &mut rng, 0.5);
        let theta: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let (s, c) = theta.sin_cos();
        let shift = [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)];
        let moved = cfg.transformed(&[c, -s, s, c], &shift);
        let e0 = strain::element_energies(&fw, &model::edge_lengths(&fw, &cfg)).unwrap();
        let e1 = strain::element_energies(&fw, &model::edge_lengths(&fw, &moved)).unwrap();
        worst_rot = worst_rot.max((e0[plate_index] - e1[plate_index]).abs());
    }
    let pass = worst_g < 1e-6 && worst_h < 1e-5 && worst_rot < 1e-12;
    verdict(
        5,
        pass,
        &format!("gradient rel err max={worst_g:.2e} (<1e-6), Hessian rel err max={worst_h:.2e} (<1e-5), plate rotation |dU| max={worst_rot:.2e} (<1e-12)"),
    );
}

fn all_critical_points(name: &str) -> (Framework, Vec<CriticalPoint>) {
    let (fw, cfg) = load(name);
    let gauge = Gauge::new(&fw).unwrap();
    let raw = match fw.strain_model() {
        StrainModel::GreenLagrange => critical::solve_critical_homotopy(&fw, &gauge, &HomotopyOptions::default()).unwrap().real_points,
        StrainModel::CauchyEngineering => critical::solve_critical_newton(&fw, &gauge, &cfg, &NewtonOptions::default()).unwrap().points,
    };
    let points = critical::dedup(raw, &gauge, critical::DEFAULT_DEDUP_TOL, cfg.diameter());
    (fw, points)
}

#[test]
fn criterion_6_deformed_critical_points_are_shaky() {
    let mut pass = true;
    let mut details = Vec::new();
    for name in FIXTURES {
        let (fw, points) = all_critical_points(name);
        let gauge = Gauge::new(&fw).unwrap();
        let lmax = fw.rest_lengths().iter().fold(0.0f64, |m, l| m.max(*l));
        let (mut deformed, mut shaky, mut stressed) = (0, 0, 0);
        let (mut worst_eq, mut worst_formula, mut worst_align) = (0.0f64, 0.0f64, 0.0f64);
        for p in &points {
            if model::max_length_residual(&fw, &p.cfg) <= 1e-6 * lmax {
                continue;
            }
            deformed += 1;
            if rigidity::is_shaky(&fw, &p.cfg, rigidity::DEFAULT_RANK_TOL).shaky {
                shaky += 1;
            }
            let basis = rigidity::self_stress_basis(&fw, &p.cfg, rigidity::DEFAULT_RANK_TOL);
            let land = EnergyLandscape::new(&fw, gauge.free_indices(), &p.cfg).unwrap();
            let x = gauge.free_values(&p.cfg);
            let omega = land.stresses(&x);
            let g = land.gradient(&x).unwrap();
            let r = rigidity::rigidity_matrix(&fw, &p.cfg).matrix;
            let formula = (0..g.len())
                .map(|row| ((0..omega.len()).map(|e| r[(row, e)] * omega[e]).sum::<f64>() - g[row]).abs())
                .fold(0.0, f64::max);
            worst_formula = worst_formula.max(formula);
            if let Some(w) = basis.first() {
                stressed += 1;
                worst_eq = worst_eq.max(rigidity::equilibrium_residual(&fw, &p.cfg, &w.0));
                // The critical point's own stresses lie along the self-stress.
                if basis.len() == 1 {
                    let cos = omega.iter().zip(&w.0).map(|(a, b)| a * b).sum::<f64>() / (norm(omega.iter().copied()) * norm(w.0.iter().copied()));
                    worst_align = worst_align.max(1.0 - cos.abs());
                }
            } else {
                worst_eq = f64::INFINITY;
            }
        }
        let ok = deformed > 0 && shaky == deformed && stressed == deformed && worst_eq < 1e-8 && worst_formula < 1e-12;
        pass &= ok;
        details.push(format!(
            "[{name}: deformed={deformed} shaky={shaky} with self-stress={stressed} max|R w|={worst_eq:.1e} max|R omega - grad U|={worst_formula:.1e} max(1-|cos(omega,w)|)={worst_align:.1e}]"
        ));
    }
    verdict(6, pass, &details.join(" "));
}

fn random_lengths(fw: &Framework, rng: &mut ChaCha8Rng, spread: f64) -> Vec<f64> {
    fw.rest_lengths().iter().map(|l| l * rng.random_range(1.0 - spread..1.0 + spread)).collect()
}

#[test]
fn criterion_7_lifted_quadratic_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_matrix = 0.0f64;
    let mut worst_prediction = 0.0f64;
    let mut worst_vertex = f64::NEG_INFINITY;
    let mut all_monotone = true;
    for name in ["ex1_bars_gl.json", "ex1_plate_gl.json"] {
        let (fw, _) = load(name);
        let m = EnergyMatrix::new(&fw).unwrap();
        for _ in 0..1000 {
            let l = random_lengths(&fw, &mut rng, 0.08);
            let direct = strain::direct_energy(&fw, &l).unwrap();
            worst_matrix = worst_matrix.max(rel(m.energy_at(&l), direct));
        }
        for k in 0..100 {
            let start = if k % 2 == 0 { fw.rest_lengths() } else { random_lengths(&fw, &mut rng, 0.08) };
            let end = random_lengths(&fw, &mut rng, 0.08);
            let path = LengthPath::new(start.clone(), end).unwrap();
            let at = |t: f64| strain::element_energies(&fw, &path.squared_at(t).iter().map(|q| q.sqrt()).collect::<Vec<_>>()).unwrap();
            let (e0, e1, e2, e3) = (at(0.0), at(1.0 / 3.0), at(2.0 / 3.0), at(1.0));
            for el in 0..e0.len() {
                // Parabola through t = 0, 1/3, 2/3 extrapolated to t = 1.
                let predicted = e0[el] - 3.0 * e1[el] + 3.0 * e2[el];
                worst_prediction = worst_prediction.max((predicted - e3[el]).abs());
            }
            if k % 2 == 0 {
                let report = pathtrack::verify_monotonicity(&fw, &path, 8).unwrap();
                all_monotone &= report.monotone;
                for e in &report.elements {
                    if let Some(v) = e.vertex {
                        worst_vertex = worst_vertex.max(v);
                    }
                }
            }
        }
    }
    let pass = worst_matrix < 1e-12 && worst_prediction < 1e-10 && all_monotone;
    verdict(
        7,
        pass,
        &format!(
            "matrix vs direct rel max={worst_matrix:.2e} (<1e-12), 4th-sample error max={worst_prediction:.2e} (<1e-10), largest vertex from rest={worst_vertex:.2e}, monotone={all_monotone}"
        ),
    );
}

#[test]
fn criterion_8_path_monotonicity_and_realness() {
    let mut pass = true;
    let mut details = Vec::new();
    for (label, r) in [("six-bar GL", bars_gl()), ("plate GL", plate_gl()), ("six-bar CE", bars_ce())] {
        let Some(cert) = r.report.path_certificate.as_ref() else {
            pass = false;
            details.push(format!("[{label}: no accepted path]"));
            continue;
        };
        let mut rows: Vec<(f64, Vec<f64>)> = cert
            .samples
            .iter()
            .map(|(t, c)| (*t, strain::element_energies(&r.fw, &model::edge_lengths(&r.fw, c)).unwrap()))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale: f64 = rows.last().map(|(_, e)| e.iter().sum()).unwrap_or(0.0);
        let mut worst_drop = 0.0f64;
        for w in rows.windows(2) {
            for (a, b) in w[0].1.iter().zip(&w[1].1) {
                worst_drop = worst_drop.max(a - b);
            }
        }
        let real = cert.samples.iter().all(|(t, c)| t.is_finite() && c.as_slice().iter().all(|v| v.is_finite()));
        let lengths = model::edge_lengths(&r.fw, r.report.witness_cfg.as_ref().unwrap());
        let lifted = pathtrack::verify_monotonicity(&r.fw, &LengthPath::from_rest(&r.fw, lengths).unwrap(), 64).unwrap();
        let ok = cert.success && worst_drop <= 1e-12 * scale && real && lifted.monotone && cert.endgame_converged && cert.endgame_difference < 1e-8;
        pass &= ok;
        details.push(format!(
            "[{label}: samples={} max per-element drop={worst_drop:.1e} (final U={scale:.2e}) real={real} lifted-path monotone={} endgame diff={:.1e}]",
            cert.samples.len(),
            lifted.monotone,
            cert.endgame_difference
        ));
    }
    verdict(8, pass, &details.join(" "));
}

#[test]
fn criterion_9_small_instance_oracles() {
    let (fw, cfg) = io::load_framework(fixture("collinear_triangle.json")).unwrap();
    let shaky = rigidity::is_shaky(&fw, &cfg, rigidity::DEFAULT_RANK_TOL);
    let basis = rigidity::self_stress_basis(&fw, &cfg, rigidity::DEFAULT_RANK_TOL);
    let stress_err = match basis.as_slice() {
        [w] => {
            let k = w.0[1];
            [(w.0[0] + 2.0 * k).abs(), (w.0[2] + 2.0 * k).abs()].into_iter().fold(0.0, f64::max) / k.abs()
        }
        _ => f64::INFINITY,
    };
    let p = strain::local_triangle_coords(5.0, 4.0, 3.0).unwrap();
    let coord_err = (p[2][0] - 3.2).abs().max((p[2][1] - 2.4).abs());
    let mut scale_err = 0.0f64;
    for (sides, s) in [([1.0, 1.0, 1.0], 1.1), ([5.0, 4.0, 3.0], 0.9), ([2.0, 3.0, 4.0], 1.3)] {
        let v: f64 = sides.iter().sum();
        let u = strain::plate_energy(sides, sides.map(|l| l * s), 1.0).unwrap();
        scale_err = scale_err.max((u - v * (s * s - 1.0f64).powi(2) / 2.0).abs());
    }
    let pass = shaky.shaky && shaky.rank == 2 && stress_err < 1e-10 && coord_err < 1e-10 && scale_err < 1e-10;
    verdict(
        9,
        pass,
        &format!(
            "collinear rank={} shaky={} self-stress vs (-2,1,-2) err={stress_err:.1e}; 3-4-5 third vertex err={coord_err:.1e}; uniform scaling err={scale_err:.1e}",
            shaky.rank, shaky.shaky
        ),
    );
}
