use alloc::vec::Vec;
use nalgebra::DMatrix;

use super::CONSTITUTIVE;
use crate::error::{Error, Result};
use crate::model::{self, EdgeRole, Framework, StrainModel};

/// `(1, L'_1^2, ..., L'_b^2)` in edge-list order.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedLengths(Vec<f64>);

impl LiftedLengths {
    pub fn from_lengths(lengths: &[f64]) -> Self {
        let mut v = Vec::with_capacity(lengths.len() + 1);
        v.push(1.0);
        v.extend(lengths.iter().map(|l| l * l));
        Self(v)
    }

    /// From squared lengths; entries must be nonnegative.
    pub fn from_squared(squared: &[f64]) -> Result<Self> {
        if squared.iter().any(|q| !(*q >= 0.0)) {
            return Err(Error::invariant("lifted lengths", "squared lengths must be nonnegative"));
        }
        let mut v = Vec::with_capacity(squared.len() + 1);
        v.push(1.0);
        v.extend_from_slice(squared);
        Ok(Self(v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.0[1..].iter().map(|q| crate::math::sqrt(*q)).collect()
    }
}

/// Symmetric `(b+1) x (b+1)` matrix `M` with `U = L^T M L` on lifted lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyMatrix(DMatrix<f64>);

/// Quadratic form of one plate's energy on `(1, q_ij, q_ik, q_jk)`.
///
/// The right Cauchy-Green tensor `C = A^T A` is linear in the squared
/// deformed lengths: `u^T C u = q` for each rest edge vector `u`. Hence the
/// strain vector is affine in `q` and the energy is a quadratic form.
pub(crate) fn plate_block(rest: [f64; 3], cross_section: f64) -> Result<[[f64; 4]; 4]> {
    let p = super::local_triangle_coords(rest[0], rest[1], rest[2])?;
    let a = p[1][0];
    let (x, y) = (p[2][0], p[2][1]);
    // C entries as coefficient rows over (1, q_ij, q_ik, q_jk)
    let c11 = [0.0, 1.0 / (a * a), 0.0, 0.0];
    let k = 1.0 / (2.0 * a * y);
    let c12 = [
        0.0,
        -(2.0 * a * x - a * a) * c11[1] * k,
        k,
        -k,
    ];
    let mut c22 = [0.0; 4];
    for i in 0..4 {
        let unit = if i == 2 { 1.0 } else { 0.0 };
        c22[i] = (unit - x * x * c11[i] - 2.0 * x * y * c12[i]) / (y * y);
    }
    let mut b = [[0.0; 4]; 3];
    for i in 0..4 {
        let one = if i == 0 { 1.0 } else { 0.0 };
        b[0][i] = 0.5 * (c11[i] - one);
        b[1][i] = 0.5 * (c22[i] - one);
        b[2][i] = c12[i];
    }
    let volume = cross_section * (rest[0] + rest[1] + rest[2]);
    let mut block = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in r..4 {
            let mut s = 0.0;
            for u in 0..3 {
                for v in 0..3 {
                    s += b[u][r] * CONSTITUTIVE[u][v] * b[v][c];
                }
            }
            block[r][c] = 0.5 * volume * s;
            block[c][r] = block[r][c];
        }
    }
    Ok(block)
}

impl EnergyMatrix {
    /// Assembles `M` element by element. GL strain only.
    pub fn new(fw: &Framework) -> Result<Self> {
        if fw.strain_model() != StrainModel::GreenLagrange {
            return Err(Error::StrainModel(
                "Cauchy strain energy is not quadratic in squared lengths",
            ));
        }
        let b = fw.edge_count();
        let a = fw.cross_section();
        let mut m = DMatrix::zeros(b + 1, b + 1);
        for (e, edge) in fw.edges().iter().enumerate() {
            if fw.edge_role(e) != EdgeRole::Bar {
                continue;
            }
            let l = edge.rest_length;
            m[(0, 0)] += a * l / 8.0;
            m[(0, e + 1)] -= a / (8.0 * l);
            m[(e + 1, 0)] -= a / (8.0 * l);
            m[(e + 1, e + 1)] += a / (8.0 * l * l * l);
        }
        for plate in fw.plates() {
            let rest = plate.edges.map(|e| fw.edges()[e].rest_length);
            let block = plate_block(rest, a)?;
            let idx = [0, plate.edges[0] + 1, plate.edges[1] + 1, plate.edges[2] + 1];
            for r in 0..4 {
                for c in 0..4 {
                    m[(idx[r], idx[c])] += block[r][c];
                }
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `L^T M L`.
    pub fn energy(&self, lifted: &LiftedLengths) -> f64 {
        let v = lifted.as_slice();
        let n = v.len();
        let mut u = 0.0;
        for r in 0..n {
            let mut row = 0.0;
            for c in 0..n {
                row += self.0[(r, c)] * v[c];
            }
            u += v[r] * row;
        }
        u
    }

    /// Energy at deformed edge lengths.
    pub fn energy_at(&self, lengths: &[f64]) -> f64 {
        self.energy(&LiftedLengths::from_lengths(lengths))
    }

    /// Total energy of a configuration through the matrix form.
    pub fn energy_of(&self, fw: &Framework, cfg: &model::Configuration) -> f64 {
        let q = model::squared_lengths(fw, cfg);
        let mut v = Vec::with_capacity(q.len() + 1);
        v.push(1.0);
        v.extend(q);
        self.energy(&LiftedLengths(v))
    }

    pub fn max_asymmetry(&self) -> f64 {
        (&self.0 - self.0.transpose()).abs().max()
    }
}
