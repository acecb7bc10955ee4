//! Rigidity matrix, shakiness test, self-stresses and the pure condition.
//!
//! The matrix follows the equilibrium orientation `R omega = 0`: one row per
//! knot coordinate, one column per edge. Column `(i,j)` holds `k_i - k_j` in
//! knot `i`'s rows and `k_j - k_i` in knot `j`'s rows. Plate edges enter
//! exactly like bars.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{Configuration, Framework, Gauge, GaugeKind};

/// Default relative singular-value threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Rigidity matrix with the flat coordinate index of each row.
#[derive(Clone, Debug)]
pub struct RigidityMatrix {
    pub matrix: DMatrix<f64>,
    pub rows: Vec<usize>,
}

/// Edge stresses in equilibrium at every knot.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfStress(pub Vec<f64>);

/// Outcome of the rank test.
#[derive(Clone, Debug, PartialEq)]
pub struct ShakyReport {
    pub shaky: bool,
    pub rank: usize,
    /// Rank a non-shaky realization must reach.
    pub required: usize,
    pub singular_values: Vec<f64>,
    /// Smallest singular value relative to the largest.
    pub relative_gap: f64,
}

/// Matrix restricted to the given flat coordinate rows.
pub fn rigidity_matrix_rows(fw: &Framework, cfg: &Configuration, rows: &[usize]) -> RigidityMatrix {
    let n = fw.dimension();
    let mut row_of = alloc::vec![None; cfg.as_slice().len()];
    for (r, &flat) in rows.iter().enumerate() {
        row_of[flat] = Some(r);
    }
    let mut m = DMatrix::zeros(rows.len(), fw.edge_count());
    for (e, edge) in fw.edges().iter().enumerate() {
        let (a, b) = (cfg.knot(edge.i - 1), cfg.knot(edge.j - 1));
        for d in 0..n {
            let diff = a[d] - b[d];
            if let Some(r) = row_of[(edge.i - 1) * n + d] {
                m[(r, e)] = diff;
            }
            if let Some(r) = row_of[(edge.j - 1) * n + d] {
                m[(r, e)] = -diff;
            }
        }
    }
    RigidityMatrix {
        matrix: m,
        rows: rows.to_vec(),
    }
}

/// All `sn` rows for unpinned frameworks; the unpinned coordinates' rows for
/// pinned ones.
pub fn rigidity_matrix(fw: &Framework, cfg: &Configuration) -> RigidityMatrix {
    let rows: Vec<usize> = if fw.is_pinned() {
        Gauge::unpinned_coordinates(fw).free_indices().to_vec()
    } else {
        (0..cfg.as_slice().len()).collect()
    };
    rigidity_matrix_rows(fw, cfg, &rows)
}

fn required_rank(fw: &Framework) -> usize {
    let n = fw.dimension();
    if fw.is_pinned() {
        fw.edge_count()
    } else {
        (fw.knot_count() * n).saturating_sub((n * n + n) / 2)
    }
}

/// Numerical rank test; singular values below `rel_tol * sigma_max` count as zero.
pub fn is_shaky(fw: &Framework, cfg: &Configuration, rel_tol: f64) -> ShakyReport {
    let r = rigidity_matrix(fw, cfg);
    let sv = linalg::singular_values(&r.matrix);
    let max = sv.first().copied().unwrap_or(0.0);
    let rank = if max > 0.0 {
        sv.iter().filter(|&&s| s > rel_tol * max).count()
    } else {
        0
    };
    let required = required_rank(fw);
    let relative_gap = match (sv.last(), max > 0.0) {
        (Some(&min), true) if sv.len() >= fw.edge_count() => min / max,
        _ => 0.0,
    };
    ShakyReport {
        shaky: rank < required,
        rank,
        required,
        singular_values: sv,
        relative_gap,
    }
}

/// Orthonormal basis of self-stresses (nullspace of the rigidity matrix).
pub fn self_stress_basis(fw: &Framework, cfg: &Configuration, rel_tol: f64) -> Vec<SelfStress> {
    let r = rigidity_matrix(fw, cfg);
    linalg::null_space(&r.matrix, rel_tol)
        .into_iter()
        .map(|v| SelfStress(v.iter().copied().collect()))
        .collect()
}

/// `|R omega|` over the matrix rows of [`rigidity_matrix`].
pub fn equilibrium_residual(fw: &Framework, cfg: &Configuration, omega: &[f64]) -> f64 {
    let r = rigidity_matrix(fw, cfg);
    (r.matrix * DVector::from_column_slice(omega)).norm()
}

fn square_rows(fw: &Framework, gauge: &Gauge) -> Result<Vec<usize>> {
    let rows = gauge.free_indices().to_vec();
    if rows.len() != fw.edge_count() {
        return Err(Error::NotIsostatic(format!(
            "gauged rigidity matrix is {} x {}, not square",
            rows.len(),
            fw.edge_count()
        )));
    }
    Ok(rows)
}

/// Determinant of the gauged square rigidity matrix divided by the product
/// of rest lengths. Zero exactly on shaky realizations.
pub fn pure_condition(fw: &Framework, cfg: &Configuration) -> Result<f64> {
    let gauge = Gauge::new(fw)?;
    pure_condition_with(fw, &gauge, cfg)
}

pub fn pure_condition_with(fw: &Framework, gauge: &Gauge, cfg: &Configuration) -> Result<f64> {
    let rows = square_rows(fw, gauge)?;
    let canonical = gauge.canonicalize(cfg);
    let r = rigidity_matrix_rows(fw, &canonical, &rows);
    let norm: f64 = fw.edges().iter().map(|e| e.rest_length).product();
    Ok(r.matrix.determinant() / norm)
}

/// Pure condition and its gradient over the gauge's free coordinates, for a
/// configuration already in the gauge.
pub fn pure_condition_gradient(fw: &Framework, gauge: &Gauge, cfg: &Configuration) -> Result<(f64, Vec<f64>)> {
    let rows = square_rows(fw, gauge)?;
    let n = fw.dimension();
    let r = rigidity_matrix_rows(fw, cfg, &rows);
    let norm: f64 = fw.edges().iter().map(|e| e.rest_length).product();
    let adj = linalg::adjugate(&r.matrix);
    let mut row_of = alloc::vec![None; cfg.as_slice().len()];
    for (idx, &flat) in rows.iter().enumerate() {
        row_of[flat] = Some(idx);
    }
    // d det / d x = sum_{row,col} adj[col,row] * dR[row,col]/dx, where R[(u,d),e]
    // = k_u,d - k_w,d for edge e = {u,w}.
    let mut grad = alloc::vec![0.0; rows.len()];
    for (var, &flat) in rows.iter().enumerate() {
        let (knot, d) = (flat / n, flat % n);
        for (e, edge) in fw.edges().iter().enumerate() {
            let other = if edge.i - 1 == knot {
                edge.j - 1
            } else if edge.j - 1 == knot {
                edge.i - 1
            } else {
                continue;
            };
            if let Some(row) = row_of[knot * n + d] {
                grad[var] += adj[(e, row)];
            }
            if let Some(row) = row_of[other * n + d] {
                grad[var] -= adj[(e, row)];
            }
        }
    }
    let det = r.matrix.determinant();
    Ok((det / norm, grad.into_iter().map(|g| g / norm).collect()))
}

/// True when the gauge removes rigid motions by pinning.
pub fn is_pinned_gauge(gauge: &Gauge) -> bool {
    gauge.kind() == GaugeKind::Pinned
}
