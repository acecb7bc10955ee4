//! File format round trips and deterministic rendering.

use std::path::{Path, PathBuf};

use proptest::prelude::*;
use snapkit_cli::io::{self, FrameworkFile};
use snapkit_cli::svg::{self, Layer};
use snapkit::model::{Edge, Framework, Knot, StrainModel};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn fixtures_round_trip_bit_identically() {
    for name in ["ex1_bars_gl.json", "ex1_plate_gl.json", "ex1_bars_ce.json", "collinear_triangle.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let (fw, cfg) = io::parse_framework(&text, Path::new(name)).unwrap();
        let again = io::framework_to_json(&fw, None);
        let (fw2, cfg2) = io::parse_framework(&again, Path::new(name)).unwrap();
        assert_eq!(FrameworkFile::from_model(&fw, None), FrameworkFile::from_model(&fw2, None));
        assert_eq!(cfg, cfg2);
        assert_eq!(io::framework_to_json(&fw2, None), again);
    }
}

#[test]
fn configuration_loads_from_rows_frameworks_and_reports() {
    let rows = io::load_configuration(fixture("ex1_cyan.json"), 2).unwrap();
    assert_eq!(rows.knot(3), &[10.1071, 4.3844]);
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    std::fs::write(&report, format!(r#"{{"value": 1.0, "witness": {}}}"#, serde_json::to_string(&rows.rows()).unwrap())).unwrap();
    assert_eq!(io::load_configuration(&report, 2).unwrap(), rows);
    let saved = dir.path().join("fw.json");
    let (fw, _) = io::load_framework(fixture("ex1_bars_gl.json")).unwrap();
    io::save_framework(&saved, &fw, Some(&rows)).unwrap();
    assert_eq!(io::load_configuration(&saved, 2).unwrap(), rows);
}

#[test]
fn svg_is_deterministic_with_one_group_per_layer() {
    let (fw, cfg) = io::load_framework(fixture("ex1_plate_gl.json")).unwrap();
    let cyan = io::load_configuration(fixture("ex1_cyan.json"), 2).unwrap();
    let blue = io::load_configuration(fixture("ex1_blue.json"), 2).unwrap();
    let layers = || {
        vec![
            Layer { name: "green".into(), cfg: &cfg },
            Layer { name: "cyan".into(), cfg: &cyan },
            Layer { name: "blue".into(), cfg: &blue },
        ]
    };
    let a = svg::render(&fw, &layers()).unwrap();
    let b = svg::render(&fw, &layers()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.matches(r#"<g class="configuration""#).count(), 3);
    assert_eq!(a.matches(r#"class="plate""#).count(), 3);
    assert_eq!(a.matches(r#"class="knot-label""#).count(), 6);
}

fn framework_strategy() -> impl Strategy<Value = (Framework, Vec<Vec<f64>>)> {
    (
        prop::collection::vec(prop::array::uniform2(-1e3..1e3f64), 4),
        prop::collection::vec(0.1..1e3f64, 5),
        prop::bool::ANY,
        prop::bool::ANY,
        1e-3..10.0f64,
        prop::collection::vec(prop::array::uniform2(-1e3..1e3f64), 4),
    )
        .prop_map(|(coords, lengths, pinned, ce, area, rows)| {
            let knots = coords
                .iter()
                .enumerate()
                .map(|(i, c)| Knot { id: i + 1, coords: c.to_vec(), pinned: pinned && i < 2 })
                .collect();
            let pairs = [(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)];
            let edges = pairs.iter().zip(&lengths).map(|(&(i, j), &l)| Edge { i, j, rest_length: l }).collect();
            let model = if ce { StrainModel::CauchyEngineering } else { StrainModel::GreenLagrange };
            let fw = Framework::new(2, knots, edges, vec![], area, model).unwrap();
            // Pinned knots must stay at their declared coordinates.
            let rows = rows
                .iter()
                .zip(&coords)
                .enumerate()
                .map(|(i, (r, c))| if pinned && i < 2 { c.to_vec() } else { r.to_vec() })
                .collect();
            (fw, rows)
        })
}

proptest! {
    #[test]
    fn random_frameworks_round_trip_bit_identically((fw, rows) in framework_strategy()) {
        let cfg = snapkit::Configuration::from_rows(2, &rows).unwrap();
        let text = io::framework_to_json(&fw, Some(&cfg));
        let (fw2, cfg2) = io::parse_framework(&text, Path::new("random.json")).unwrap();
        prop_assert_eq!(FrameworkFile::from_model(&fw, None), FrameworkFile::from_model(&fw2, None));
        prop_assert_eq!(cfg.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), cfg2.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        let file: FrameworkFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(file, FrameworkFile::from_model(&fw, Some(&cfg)));
    }
}
