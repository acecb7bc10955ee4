//! Hand-computable reference values.

mod common;

use common::{ex1, free_framework, GREEN};
use snapkit::model::{self, Configuration, Gauge, StrainModel};
use snapkit::{rigidity, strain};

#[test]
fn bar_energies_match_closed_forms() {
    // L = 2, L' = 3: GL (9 - 4)^2 / (8 * 8) = 25/64, CE 1 / 4.
    assert!((strain::bar_energy_gl(2.0, 3.0, 1.0) - 25.0 / 64.0).abs() < 1e-15);
    assert!((strain::bar_energy_ce(2.0, 3.0, 1.0) - 0.25).abs() < 1e-15);
    assert!((strain::bar_energy_gl(2.0, 3.0, 2.5) - 2.5 * 25.0 / 64.0).abs() < 1e-15);
}

#[test]
fn uniformly_stretched_plate() {
    // Stretch factor s: strain eps*I with eps = (s^2 - 1)/2, e^T D e = 4 eps^2,
    // energy = V/2 * 4 eps^2 with V = 3 for the unit equilateral triangle.
    let s = 1.1;
    let eps = (s * s - 1.0) / 2.0;
    let u = strain::plate_energy([1.0; 3], [s; 3], 1.0).unwrap();
    assert!((u - 6.0 * eps * eps).abs() < 1e-14, "{u}");
}

#[test]
fn plate_in_simple_shear() {
    // Right isoceles rest triangle (0,0),(1,0),(0,1) sheared by x += g y:
    // strain (0, g^2/2, g), e^T D e = 4/3 g^4/4 + g^2/3.
    let g: f64 = 0.2;
    let rest = [1.0, 1.0, 2f64.sqrt()];
    let deformed = [1.0, (1.0 + g * g).sqrt(), (1.0 + (g - 1.0) * (g - 1.0)).sqrt()];
    let u = strain::plate_energy(rest, deformed, 1.0).unwrap();
    let form = 4.0 / 3.0 * g.powi(4) / 4.0 + g * g / 3.0;
    let volume = 2.0 + 2f64.sqrt();
    assert!((u - volume * 0.5 * form).abs() < 1e-13, "{u}");
}

#[test]
fn density_divides_by_material() {
    let fw = ex1(false, StrainModel::GreenLagrange);
    let mut lengths = fw.rest_lengths();
    lengths[3] = 9.0;
    let u = strain::bar_energy_gl(8.0, 9.0, 1.0);
    assert!((strain::density_from_lengths(&fw, &lengths).unwrap() - u / 44.0).abs() < 1e-16);
}

#[test]
fn undeformed_rest_lengths_have_zero_energy() {
    for plate in [false, true] {
        let fw = ex1(plate, StrainModel::GreenLagrange);
        let u = strain::total_energy_from_lengths(&fw, &fw.rest_lengths()).unwrap();
        assert!(u.abs() < 1e-11, "{u}");
    }
}

#[test]
fn green_realization_is_nearly_undeformed_and_rigid() {
    let fw = ex1(true, StrainModel::GreenLagrange);
    let cfg = fw.declared_configuration();
    assert!(model::max_length_residual(&fw, &cfg) < 1e-3);
    let report = model::validate_isostatic(&fw, &cfg, rigidity::DEFAULT_RANK_TOL);
    assert!(report.passed(), "{:?}", report.reasons);
    assert!(!rigidity::is_shaky(&fw, &cfg, rigidity::DEFAULT_RANK_TOL).shaky);
    assert!(rigidity::pure_condition(&fw, &cfg).unwrap().abs() > 1e-6);
}

#[test]
fn collinear_triangle_is_shaky() {
    let fw = free_framework(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], &[(1, 2), (1, 3), (2, 3)], vec![]);
    let cfg = fw.declared_configuration();
    let report = rigidity::is_shaky(&fw, &cfg, rigidity::DEFAULT_RANK_TOL);
    assert!(report.shaky);
    assert_eq!(report.rank, 2);
    assert!(rigidity::pure_condition(&fw, &cfg).unwrap().abs() < 1e-14);
    // The single self-stress is proportional to (-2, 1, -2).
    let basis = rigidity::self_stress_basis(&fw, &cfg, rigidity::DEFAULT_RANK_TOL);
    assert_eq!(basis.len(), 1);
    let w = &basis[0].0;
    let k = w[1];
    assert!((w[0] + 2.0 * k).abs() < 1e-12 && (w[2] + 2.0 * k).abs() < 1e-12, "{w:?}");
}

#[test]
fn removed_edge_fails_the_count() {
    let fw = ex1(false, StrainModel::GreenLagrange).without_edge(5).unwrap();
    let report = model::validate_isostatic(&fw, &fw.declared_configuration(), rigidity::DEFAULT_RANK_TOL);
    assert!(!report.count_ok);
    assert!(report.reasons[0].contains("count condition failed"));
}

#[test]
fn pinned_gauge_frees_unpinned_coordinates() {
    let fw = ex1(false, StrainModel::GreenLagrange);
    let gauge = Gauge::new(&fw).unwrap();
    assert_eq!(gauge.free_indices(), &[6, 7, 8, 9, 10, 11]);
    let cfg = fw.declared_configuration();
    let free: Vec<f64> = GREEN.iter().flatten().copied().collect();
    assert_eq!(gauge.free_values(&cfg), free);
    assert_eq!(gauge.embed(&free), cfg);
}

#[test]
fn standard_gauge_places_first_knots() {
    let fw = free_framework(&[[1.0, 1.0], [4.0, 5.0], [0.0, 3.0]], &[(1, 2), (1, 3), (2, 3)], vec![[1, 2, 3]]);
    let gauge = Gauge::new(&fw).unwrap();
    let c = gauge.canonicalize(&fw.declared_configuration());
    assert!(c.knot(0).iter().all(|v| v.abs() < 1e-15));
    assert!((c.knot(1)[0] - 5.0).abs() < 1e-14 && c.knot(1)[1].abs() < 1e-15);
    assert_eq!(gauge.free_count(), 3);
}

#[test]
fn configuration_rows_round_trip() {
    let rows = vec![vec![0.0, 1.0], vec![2.0, 3.0]];
    let cfg = Configuration::from_rows(2, &rows).unwrap();
    assert_eq!(cfg.rows(), rows);
    assert!((cfg.diameter() - 8f64.sqrt()).abs() < 1e-15);
}
