//! Elastic strain energies of bars and triangular plates, their lifted
//! quadratic form, energy density and the induced pseudometric.
//!
//! Material constants are fixed: Young's modulus `E = 1` and Poisson's
//! ratio `nu = 1/2` (incompressible material). The cross-sectional area `A`
//! is the only material parameter; a plate carries the same amount of
//! material as its three edges would as bars, `V = A (L_ij + L_ik + L_jk)`.

mod derivatives;
mod matrix;

use alloc::vec::Vec;
use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{self, Configuration, EdgeRole, Framework, StrainModel};

pub use derivatives::{energy_gradient, energy_hessian, plate_stress_recovery, EnergyLandscape, LiftedSystem};
pub use matrix::{EnergyMatrix, LiftedLengths};

/// Plane-stress constitutive matrix for `E = 1`, `nu = 1/2`:
/// `4/3 * [[1, 1/2, 0], [1/2, 1, 0], [0, 0, 1/4]]`.
pub const CONSTITUTIVE: [[f64; 3]; 3] = [
    [4.0 / 3.0, 2.0 / 3.0, 0.0],
    [2.0 / 3.0, 4.0 / 3.0, 0.0],
    [0.0, 0.0, 1.0 / 3.0],
];

/// Green-Lagrange strain `(eps_x, eps_y, 2 gamma_xy)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrainVector(pub [f64; 3]);

impl StrainVector {
    /// `e^T D e` with the fixed constitutive matrix.
    pub fn energy_form(&self) -> f64 {
        let e = self.0;
        (0..3)
            .map(|r| e[r] * (0..3).map(|c| CONSTITUTIVE[r][c] * e[c]).sum::<f64>())
            .sum()
    }
}

/// Planar frame of a triangle: `K_i` at the origin, `K_j` on the positive
/// x-axis and `K_k` in the upper half plane.
pub fn local_triangle_coords(l_ij: f64, l_ik: f64, l_jk: f64) -> Result<[[f64; 2]; 3]> {
    if !model::strict_triangle([l_ij, l_ik, l_jk]) {
        return Err(Error::TriangleInequality {
            lengths: [l_ij, l_ik, l_jk],
        });
    }
    let x = (l_ij * l_ij + l_ik * l_ik - l_jk * l_jk) / (2.0 * l_ij);
    let heron = (l_ij + l_ik + l_jk) * (l_ij - l_ik + l_jk) * (l_ij + l_ik - l_jk) * (l_ik + l_jk - l_ij);
    let y = math::sqrt(heron.max(0.0)) / (2.0 * l_ij);
    Ok([[0.0, 0.0], [l_ij, 0.0], [x, y]])
}

/// The affine map `A` sending the rest triangle onto the deformed one, both in
/// their local frames. Lengths are ordered `(ij, ik, jk)`.
pub fn plate_affine_matrix(rest: [f64; 3], deformed: [f64; 3]) -> Result<Matrix2<f64>> {
    let p = local_triangle_coords(rest[0], rest[1], rest[2])?;
    let q = local_triangle_coords(deformed[0], deformed[1], deformed[2])?;
    let rest_edges = Matrix2::new(p[1][0] - p[0][0], p[2][0] - p[0][0], p[1][1] - p[0][1], p[2][1] - p[0][1]);
    let def_edges = Matrix2::new(q[1][0] - q[0][0], q[2][0] - q[0][0], q[1][1] - q[0][1], q[2][1] - q[0][1]);
    let inv = rest_edges.try_inverse().ok_or(Error::TriangleInequality { lengths: rest })?;
    Ok(def_edges * inv)
}

/// `1/2 (A^T A - I)` reassembled as `(eps_x, eps_y, 2 gamma_xy)`.
pub fn gl_strain(a: &Matrix2<f64>) -> StrainVector {
    let c = a.transpose() * a;
    StrainVector([0.5 * (c[(0, 0)] - 1.0), 0.5 * (c[(1, 1)] - 1.0), c[(0, 1)]])
}

/// GL strain energy of a triangular plate from its six edge lengths.
pub fn plate_energy(rest: [f64; 3], deformed: [f64; 3], cross_section: f64) -> Result<f64> {
    let a = plate_affine_matrix(rest, deformed)?;
    let volume = cross_section * (rest[0] + rest[1] + rest[2]);
    Ok(volume * 0.5 * gl_strain(&a).energy_form())
}

/// GL strain energy of a bar: `A (L'^2 - L^2)^2 / (8 L^3)`.
pub fn bar_energy_gl(rest: f64, deformed: f64, cross_section: f64) -> f64 {
    let d = deformed * deformed - rest * rest;
    cross_section * d * d / (8.0 * rest * rest * rest)
}

/// Cauchy strain energy of a bar: `A (L' - L)^2 / (2 L)`.
pub fn bar_energy_ce(rest: f64, deformed: f64, cross_section: f64) -> f64 {
    let d = deformed - rest;
    cross_section * d * d / (2.0 * rest)
}

fn check_len(fw: &Framework, lengths: &[f64]) -> Result<()> {
    if lengths.len() != fw.edge_count() {
        return Err(Error::Dimension {
            expected: fw.edge_count(),
            found: lengths.len(),
            context: "edge length vector".into(),
        });
    }
    Ok(())
}

/// Rejects plate length triples that no triangle (even a flat one) can have.
fn check_plates_feasible(fw: &Framework, lengths: &[f64]) -> Result<()> {
    for plate in fw.plates() {
        let l = plate.edges.map(|e| lengths[e]);
        let slack = 1e-12 * (l[0] + l[1] + l[2]);
        if l[0] > l[1] + l[2] + slack || l[1] > l[0] + l[2] + slack || l[2] > l[0] + l[1] + slack {
            return Err(Error::TriangleInequality { lengths: l });
        }
    }
    Ok(())
}

/// Energy of every element: bars in edge order, then plates in plate order.
///
/// Plates use the lifted closed form, which stays finite for flat triangles.
pub fn element_energies(fw: &Framework, lengths: &[f64]) -> Result<Vec<f64>> {
    check_len(fw, lengths)?;
    check_plates_feasible(fw, lengths)?;
    let a = fw.cross_section();
    let mut out = Vec::with_capacity(fw.edge_count() + fw.plates().len());
    for e in fw.bars() {
        let rest = fw.edges()[e].rest_length;
        out.push(match fw.strain_model() {
            StrainModel::GreenLagrange => bar_energy_gl(rest, lengths[e], a),
            StrainModel::CauchyEngineering => bar_energy_ce(rest, lengths[e], a),
        });
    }
    for plate in fw.plates() {
        let rest = plate.edges.map(|e| fw.edges()[e].rest_length);
        let q = plate.edges.map(|e| lengths[e] * lengths[e]);
        let block = matrix::plate_block(rest, a)?;
        let v = [1.0, q[0], q[1], q[2]];
        let mut u = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                u += v[r] * block[r][c] * v[c];
            }
        }
        out.push(u);
    }
    Ok(out)
}

/// Total strain energy as a function of the deformed edge lengths.
pub fn total_energy_from_lengths(fw: &Framework, lengths: &[f64]) -> Result<f64> {
    Ok(element_energies(fw, lengths)?.iter().sum())
}

/// Total strain energy of a configuration.
pub fn total_energy(fw: &Framework, cfg: &Configuration) -> Result<f64> {
    total_energy_from_lengths(fw, &model::edge_lengths(fw, cfg))
}

/// Element-wise sum using the local-coordinate route for plates. Requires
/// every deformed plate to be a proper triangle.
pub fn direct_energy(fw: &Framework, lengths: &[f64]) -> Result<f64> {
    check_len(fw, lengths)?;
    let a = fw.cross_section();
    let mut u = 0.0;
    for (e, edge) in fw.edges().iter().enumerate() {
        if fw.edge_role(e) == EdgeRole::Bar {
            u += match fw.strain_model() {
                StrainModel::GreenLagrange => bar_energy_gl(edge.rest_length, lengths[e], a),
                StrainModel::CauchyEngineering => bar_energy_ce(edge.rest_length, lengths[e], a),
            };
        }
    }
    for plate in fw.plates() {
        let rest = plate.edges.map(|e| fw.edges()[e].rest_length);
        let def = plate.edges.map(|e| lengths[e]);
        u += plate_energy(rest, def, a)?;
    }
    Ok(u)
}

/// Energy density `U / (A L)`.
pub fn density_from_lengths(fw: &Framework, lengths: &[f64]) -> Result<f64> {
    Ok(total_energy_from_lengths(fw, lengths)? / (fw.cross_section() * fw.total_length()))
}

pub fn density(fw: &Framework, cfg: &Configuration) -> Result<f64> {
    density_from_lengths(fw, &model::edge_lengths(fw, cfg))
}

/// `|D(L1) - D(L2)|`.
pub fn pseudometric(fw: &Framework, l1: &[f64], l2: &[f64]) -> Result<f64> {
    Ok(math::abs(density_from_lengths(fw, l1)? - density_from_lengths(fw, l2)?))
}
