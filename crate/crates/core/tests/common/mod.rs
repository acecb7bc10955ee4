#![allow(dead_code)]

use snapkit::model::{Configuration, Edge, Framework, Knot, StrainModel};

pub const GREEN: [[f64; 2]; 3] = [[10.3238, 3.7970], [3.9493, 8.6308], [8.9493, 8.6043]];

/// The six-bar pinned framework with base knots (0,0), (9,0), (7,4); with
/// `plate` the triangle 4-5-6 is a plate.
pub fn ex1(plate: bool, model: StrainModel) -> Framework {
    let pinned = [[0.0, 0.0], [9.0, 0.0], [7.0, 4.0]];
    let mut knots: Vec<Knot> = pinned
        .iter()
        .enumerate()
        .map(|(i, c)| Knot { id: i + 1, coords: c.to_vec(), pinned: true })
        .collect();
    knots.extend(GREEN.iter().enumerate().map(|(i, c)| Knot { id: i + 4, coords: c.to_vec(), pinned: false }));
    let e = |i, j, l| Edge { i, j, rest_length: l };
    let edges = vec![e(1, 4, 11.0), e(2, 5, 10.0), e(3, 6, 5.0), e(4, 5, 8.0), e(4, 6, 5.0), e(5, 6, 5.0)];
    let plates = if plate { vec![[4, 5, 6]] } else { vec![] };
    Framework::new(2, knots, edges, plates, 1.0, model).unwrap()
}

/// Unpinned framework whose rest lengths are those of `coords` (so the
/// declared configuration is undeformed).
pub fn free_framework(coords: &[[f64; 2]], edges: &[(usize, usize)], plates: Vec<[usize; 3]>) -> Framework {
    let knots = coords
        .iter()
        .enumerate()
        .map(|(i, c)| Knot { id: i + 1, coords: c.to_vec(), pinned: false })
        .collect();
    let edges = edges
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (coords[i - 1], coords[j - 1]);
            Edge { i, j, rest_length: ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() }
        })
        .collect();
    Framework::new(2, knots, edges, plates, 1.0, StrainModel::GreenLagrange).unwrap()
}

pub fn perturbed(cfg: &Configuration, delta: &[f64]) -> Configuration {
    let mut c = cfg.clone();
    for (v, d) in c.as_mut_slice().iter_mut().zip(delta) {
        *v += d;
    }
    c
}

pub fn rotation(theta: f64) -> [f64; 4] {
    let (s, c) = theta.sin_cos();
    [c, -s, s, c]
}
