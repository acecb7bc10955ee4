//! Framework data model: knots, edges, plates, configurations and the gauge
//! that removes rigid motions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::rigidity;

/// Strain measure used for the elastic energy of the framework's elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrainModel {
    /// Green-Lagrange strain, rotation invariant, defined for bars and plates.
    GreenLagrange,
    /// Cauchy (engineering) strain, bars only.
    CauchyEngineering,
}

/// A joint of the framework. Ids are 1-based and contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct Knot {
    pub id: usize,
    pub coords: Vec<f64>,
    pub pinned: bool,
}

/// An edge between knots `i < j` with its undeformed length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub rest_length: f64,
}

/// A triangular plate over knots `i < j < k`.
///
/// `edges` holds the edge-list indices of `(i,j)`, `(i,k)` and `(j,k)` in
/// that order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plate {
    pub knots: [usize; 3],
    pub edges: [usize; 3],
}

/// How an edge is materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRole {
    Bar,
    /// Part of one plate, or a hinge shared by two.
    PlateMaterial,
}

/// A validated framework: graph, intrinsic metric and material data.
#[derive(Clone, Debug)]
pub struct Framework {
    dimension: usize,
    knots: Vec<Knot>,
    edges: Vec<Edge>,
    plates: Vec<Plate>,
    cross_section: f64,
    strain_model: StrainModel,
    roles: Vec<EdgeRole>,
    index: BTreeMap<(usize, usize), usize>,
}

impl Framework {
    /// Validates and assembles a framework.
    ///
    /// Knots may be given in any order; they are stored sorted by id. Plate
    /// knot triples are sorted ascending.
    pub fn new(
        dimension: usize,
        mut knots: Vec<Knot>,
        edges: Vec<Edge>,
        plates: Vec<[usize; 3]>,
        cross_section: f64,
        strain_model: StrainModel,
    ) -> Result<Self> {
        if !(2..=3).contains(&dimension) {
            return Err(Error::Dimension {
                expected: 2,
                found: dimension,
                context: "framework dimension (must be 2 or 3)".into(),
            });
        }
        if !(cross_section.is_finite() && cross_section > 0.0) {
            return Err(Error::invariant(
                "cross_section",
                "cross-sectional area must be positive",
            ));
        }
        if knots.is_empty() {
            return Err(Error::invariant("knots", "framework has no knots"));
        }
        knots.sort_by_key(|k| k.id);
        for (pos, knot) in knots.iter().enumerate() {
            if knot.id != pos + 1 {
                return Err(Error::invariant(
                    format!("knot {}", knot.id),
                    "knot ids must be unique and contiguous starting at 1",
                ));
            }
            if knot.coords.len() != dimension {
                return Err(Error::Dimension {
                    expected: dimension,
                    found: knot.coords.len(),
                    context: format!("coordinates of knot {}", knot.id),
                });
            }
            if knot.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::invariant(
                    format!("knot {}", knot.id),
                    "coordinates must be finite",
                ));
            }
        }

        let s = knots.len();
        let mut index = BTreeMap::new();
        for (e, edge) in edges.iter().enumerate() {
            let name = format!("edge ({},{})", edge.i, edge.j);
            if edge.i >= edge.j {
                return Err(Error::invariant(name, "edge endpoints must satisfy i < j"));
            }
            if edge.i < 1 || edge.j > s {
                return Err(Error::invariant(name, "edge references an unknown knot"));
            }
            if !(edge.rest_length.is_finite() && edge.rest_length > 0.0) {
                return Err(Error::invariant(name, "rest_length must be positive"));
            }
            if index.insert((edge.i, edge.j), e).is_some() {
                return Err(Error::invariant(name, "duplicate edge"));
            }
        }

        let mut roles = vec![EdgeRole::Bar; edges.len()];
        let mut plate_count = vec![0usize; edges.len()];
        let mut built = Vec::with_capacity(plates.len());
        for mut triple in plates {
            triple.sort_unstable();
            let [i, j, k] = triple;
            let name = format!("plate ({i},{j},{k})");
            if i == j || j == k {
                return Err(Error::invariant(name, "plate knots must be distinct"));
            }
            if i < 1 || k > s {
                return Err(Error::invariant(name, "plate references an unknown knot"));
            }
            let mut refs = [0usize; 3];
            for (slot, pair) in [(i, j), (i, k), (j, k)].into_iter().enumerate() {
                refs[slot] = *index.get(&pair).ok_or_else(|| {
                    Error::invariant(
                        name.clone(),
                        format!("plate edge ({},{}) is missing from the edge list", pair.0, pair.1),
                    )
                })?;
            }
            let lengths = refs.map(|e| edges[e].rest_length);
            if !strict_triangle(lengths) {
                return Err(Error::invariant(name, "triangle inequality violated"));
            }
            for &e in &refs {
                plate_count[e] += 1;
                if plate_count[e] > 2 {
                    return Err(Error::invariant(
                        format!("edge ({},{})", edges[e].i, edges[e].j),
                        "an edge may belong to at most two plates",
                    ));
                }
                roles[e] = EdgeRole::PlateMaterial;
            }
            if built.iter().any(|p: &Plate| p.knots == triple) {
                return Err(Error::invariant(name, "duplicate plate"));
            }
            built.push(Plate {
                knots: triple,
                edges: refs,
            });
        }

        if strain_model == StrainModel::CauchyEngineering && !built.is_empty() {
            return Err(Error::StrainModel(
                "Cauchy strain is only defined for bar frameworks (no plates)",
            ));
        }

        Ok(Self {
            dimension,
            knots,
            edges,
            plates: built,
            cross_section,
            strain_model,
            roles,
            index,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn plates(&self) -> &[Plate] {
        &self.plates
    }

    pub fn knot_count(&self) -> usize {
        self.knots.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn cross_section(&self) -> f64 {
        self.cross_section
    }

    pub fn strain_model(&self) -> StrainModel {
        self.strain_model
    }

    pub fn edge_role(&self, e: usize) -> EdgeRole {
        self.roles[e]
    }

    /// Indices of edges materialized as bars.
    pub fn bars(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(move |&e| self.roles[e] == EdgeRole::Bar)
    }

    /// Edge-list index of the edge between knot ids `a` and `b` (any order).
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.index.get(&key).copied()
    }

    /// Total rest length `L`, each edge counted once.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.rest_length).sum()
    }

    pub fn rest_lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.rest_length).collect()
    }

    /// Plate volume `A (L_ij + L_ik + L_jk)`.
    pub fn plate_volume(&self, plate: &Plate) -> f64 {
        self.cross_section * plate.edges.iter().map(|&e| self.edges[e].rest_length).sum::<f64>()
    }

    pub fn pinned_count(&self) -> usize {
        self.knots.iter().filter(|k| k.pinned).count()
    }

    pub fn is_pinned(&self) -> bool {
        self.pinned_count() > 0
    }

    /// Same framework under another strain model.
    pub fn with_strain_model(&self, model: StrainModel) -> Result<Self> {
        let plates = self.plates.iter().map(|p| p.knots).collect();
        Self::new(
            self.dimension,
            self.knots.clone(),
            self.edges.clone(),
            plates,
            self.cross_section,
            model,
        )
    }

    /// Framework with every rest length and declared coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let knots = self
            .knots
            .iter()
            .map(|k| Knot {
                id: k.id,
                coords: k.coords.iter().map(|c| c * factor).collect(),
                pinned: k.pinned,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                rest_length: e.rest_length * factor,
                ..*e
            })
            .collect();
        let plates = self.plates.iter().map(|p| p.knots).collect();
        Self::new(
            self.dimension,
            knots,
            edges,
            plates,
            self.cross_section,
            self.strain_model,
        )
    }

    /// Same framework with one edge removed (plates over it are dropped).
    pub fn without_edge(&self, e: usize) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.remove(e);
        let plates = self
            .plates
            .iter()
            .filter(|p| !p.edges.contains(&e))
            .map(|p| p.knots)
            .collect();
        Self::new(
            self.dimension,
            self.knots.clone(),
            edges,
            plates,
            self.cross_section,
            self.strain_model,
        )
    }

    /// The configuration given by the knots' declared coordinates.
    pub fn declared_configuration(&self) -> Configuration {
        Configuration {
            dimension: self.dimension,
            coords: self.knots.iter().flat_map(|k| k.coords.iter().copied()).collect(),
        }
    }

    /// Checks that `cfg` has the right shape and reproduces every pinned knot exactly.
    pub fn check_configuration(&self, cfg: &Configuration) -> Result<()> {
        if cfg.dimension != self.dimension {
            return Err(Error::Dimension {
                expected: self.dimension,
                found: cfg.dimension,
                context: "configuration dimension".into(),
            });
        }
        if cfg.knot_count() != self.knots.len() || !cfg.coords.len().is_multiple_of(self.dimension) {
            return Err(Error::Dimension {
                expected: self.knots.len(),
                found: cfg.knot_count(),
                context: "configuration rows".into(),
            });
        }
        if cfg.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invariant("configuration", "coordinates must be finite"));
        }
        for (idx, knot) in self.knots.iter().enumerate() {
            if knot.pinned && cfg.knot(idx) != knot.coords.as_slice() {
                return Err(Error::invariant(
                    format!("knot {}", knot.id),
                    "pinned knot differs from its declared coordinates",
                ));
            }
        }
        Ok(())
    }
}

/// Strict triangle inequalities for three lengths.
pub fn strict_triangle(l: [f64; 3]) -> bool {
    l.iter().all(|x| *x > 0.0)
        && l[0] < l[1] + l[2]
        && l[1] < l[0] + l[2]
        && l[2] < l[0] + l[1]
}

/// Coordinates of all knots, one row of `n` reals per knot (knot id order).
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    dimension: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn from_rows(dimension: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * dimension);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dimension {
                return Err(Error::Dimension {
                    expected: dimension,
                    found: row.len(),
                    context: format!("configuration row {}", r + 1),
                });
            }
            coords.extend_from_slice(row);
        }
        Ok(Self { dimension, coords })
    }

    pub fn from_flat(dimension: usize, coords: Vec<f64>) -> Self {
        debug_assert!(coords.len().is_multiple_of(dimension));
        Self { dimension, coords }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn knot_count(&self) -> usize {
        self.coords.len() / self.dimension
    }

    /// Coordinates of the knot at zero-based index `idx`.
    pub fn knot(&self, idx: usize) -> &[f64] {
        &self.coords[idx * self.dimension..(idx + 1) * self.dimension]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coords.chunks(self.dimension).map(|c| c.to_vec()).collect()
    }

    /// Largest distance between two knots.
    pub fn diameter(&self) -> f64 {
        let s = self.knot_count();
        let mut best = 0.0f64;
        for a in 0..s {
            for b in a + 1..s {
                best = best.max(distance(self.knot(a), self.knot(b)));
            }
        }
        best
    }

    /// Applies `x -> R x + t` to every knot. `rotation` is row-major `n x n`.
    pub fn transformed(&self, rotation: &[f64], translation: &[f64]) -> Self {
        let n = self.dimension;
        let mut out = self.coords.clone();
        for (row, dst) in self.coords.chunks(n).zip(out.chunks_mut(n)) {
            for r in 0..n {
                dst[r] = translation[r] + (0..n).map(|c| rotation[r * n + c] * row[c]).sum::<f64>();
            }
        }
        Self {
            dimension: n,
            coords: out,
        }
    }

    /// Largest coordinate difference to another configuration.
    pub fn max_abs_diff(&self, other: &Configuration) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| math::abs(a - b))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Euclidean edge lengths of `cfg` in edge-list order.
pub fn edge_lengths(fw: &Framework, cfg: &Configuration) -> Vec<f64> {
    fw.edges()
        .iter()
        .map(|e| distance(cfg.knot(e.i - 1), cfg.knot(e.j - 1)))
        .collect()
}

/// Squared edge lengths of `cfg` in edge-list order.
pub fn squared_lengths(fw: &Framework, cfg: &Configuration) -> Vec<f64> {
    fw.edges()
        .iter()
        .map(|e| {
            let (a, b) = (cfg.knot(e.i - 1), cfg.knot(e.j - 1));
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
        })
        .collect()
}

/// Largest `|L'_e - L_e|` of a configuration.
pub fn max_length_residual(fw: &Framework, cfg: &Configuration) -> f64 {
    edge_lengths(fw, cfg)
        .iter()
        .zip(fw.edges())
        .map(|(l, e)| math::abs(l - e.rest_length))
        .fold(0.0, f64::max)
}

/// Outcome of the isostaticity check.
#[derive(Clone, Debug, PartialEq)]
pub struct IsostaticReport {
    pub edges: usize,
    pub required_edges: usize,
    pub count_ok: bool,
    pub rank: usize,
    pub rank_ok: bool,
    pub reasons: Vec<String>,
}

impl IsostaticReport {
    pub fn passed(&self) -> bool {
        self.count_ok && self.rank_ok
    }
}

/// Number of edges an isostatic framework must have.
pub fn required_edge_count(fw: &Framework) -> usize {
    let n = fw.dimension();
    if fw.is_pinned() {
        n * (fw.knot_count() - fw.pinned_count())
    } else {
        (fw.knot_count() * n).saturating_sub((n * n + n) / 2)
    }
}

/// Count condition plus full rank of the rigidity matrix at `cfg`.
pub fn validate_isostatic(fw: &Framework, cfg: &Configuration, rank_tol: f64) -> IsostaticReport {
    let b = fw.edge_count();
    let required = required_edge_count(fw);
    let mut reasons = Vec::new();
    let count_ok = b == required;
    if !count_ok {
        reasons.push(format!(
            "count condition failed: {b} edges, isostatic requires {required}"
        ));
    }
    let shaky = rigidity::is_shaky(fw, cfg, rank_tol);
    let rank_ok = shaky.rank == b;
    if !rank_ok {
        reasons.push(format!(
            "rigidity matrix rank {} is below the edge count {b}",
            shaky.rank
        ));
    }
    IsostaticReport {
        edges: b,
        required_edges: required,
        count_ok,
        rank: shaky.rank,
        rank_ok,
        reasons,
    }
}

/// Which rule fixed the rigid motions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeKind {
    /// Pinned knots remove all rigid motions; free coordinates are the unpinned ones.
    Pinned,
    /// Knot 1 at the origin, knot 2 on the first axis, knot 3 (3D) in the first
    /// coordinate plane.
    Standard,
}

/// Free/fixed split of the flat coordinate vector modulo direct isometries.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    kind: GaugeKind,
    dimension: usize,
    free: Vec<usize>,
    fixed: Vec<(usize, f64)>,
}

impl Gauge {
    /// Gauge for analysis: pins must remove every rigid motion, otherwise the
    /// standard gauge is imposed on an unpinned framework.
    pub fn new(fw: &Framework) -> Result<Self> {
        let n = fw.dimension();
        if fw.is_pinned() {
            let pins: Vec<&[f64]> = fw
                .knots()
                .iter()
                .filter(|k| k.pinned)
                .map(|k| k.coords.as_slice())
                .collect();
            if affine_rank(&pins) + 1 < n {
                return Err(Error::invariant(
                    "pinning",
                    "pinned knots leave a rigid motion unconstrained; pin none or enough to fix the framework",
                ));
            }
            return Ok(Self::unpinned_coordinates(fw));
        }
        // Two knots already fix a planar gauge.
        if fw.knot_count() < n {
            return Err(Error::Precondition(format!(
                "at least {n} knots are needed to fix a gauge in dimension {n}"
            )));
        }
        let mut fixed = Vec::new();
        let mut free = Vec::new();
        for idx in 0..fw.knot_count() {
            for d in 0..n {
                let flat = idx * n + d;
                let is_fixed = idx == 0 || (idx == 1 && d > 0) || (idx == 2 && n == 3 && d == 2);
                if is_fixed {
                    fixed.push((flat, 0.0));
                } else {
                    free.push(flat);
                }
            }
        }
        Ok(Self {
            kind: GaugeKind::Standard,
            dimension: n,
            free,
            fixed,
        })
    }

    /// Every unpinned coordinate is free; no rigid-motion check.
    pub fn unpinned_coordinates(fw: &Framework) -> Self {
        let n = fw.dimension();
        let mut free = Vec::new();
        let mut fixed = Vec::new();
        for (idx, knot) in fw.knots().iter().enumerate() {
            for d in 0..n {
                if knot.pinned {
                    fixed.push((idx * n + d, knot.coords[d]));
                } else {
                    free.push(idx * n + d);
                }
            }
        }
        Self {
            kind: GaugeKind::Pinned,
            dimension: n,
            free,
            fixed,
        }
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn free_indices(&self) -> &[usize] {
        &self.free
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    /// Fixed flat coordinates and their values in the gauge.
    pub fn fixed(&self) -> &[(usize, f64)] {
        &self.fixed
    }

    /// Free coordinate values of `cfg`, read as-is.
    pub fn free_values(&self, cfg: &Configuration) -> Vec<f64> {
        self.free.iter().map(|&i| cfg.as_slice()[i]).collect()
    }

    /// Configuration with the fixed coordinates at their gauge values and the
    /// free ones taken from `free`.
    pub fn embed(&self, free: &[f64]) -> Configuration {
        let total = self.free.len() + self.fixed.len();
        let mut coords = vec![0.0; total];
        for &(i, v) in &self.fixed {
            coords[i] = v;
        }
        for (&i, &v) in self.free.iter().zip(free) {
            coords[i] = v;
        }
        Configuration::from_flat(self.dimension, coords)
    }

    /// Maps `cfg` into the gauge by a direct isometry (identity for pinned
    /// frameworks).
    pub fn canonicalize(&self, cfg: &Configuration) -> Configuration {
        match self.kind {
            GaugeKind::Pinned => cfg.clone(),
            GaugeKind::Standard => canonical_frame(cfg),
        }
    }
}

fn canonical_frame(cfg: &Configuration) -> Configuration {
    let n = cfg.dimension();
    let origin: Vec<f64> = cfg.knot(0).to_vec();
    let centered: Vec<f64> = cfg
        .as_slice()
        .chunks(n)
        .flat_map(|row| row.iter().zip(&origin).map(|(a, o)| a - o).collect::<Vec<_>>())
        .collect();
    let centered = Configuration::from_flat(n, centered);
    let k2 = centered.knot(1).to_vec();
    let norm2 = math::sqrt(k2.iter().map(|x| x * x).sum());
    let tiny = 1e-300;
    if n == 2 {
        if norm2 < tiny {
            return centered;
        }
        let (c, s) = (k2[0] / norm2, k2[1] / norm2);
        // rotate by -angle(k2)
        return centered.transformed(&[c, s, -s, c], &[0.0, 0.0]);
    }
    let e1 = if norm2 < tiny {
        [1.0, 0.0, 0.0]
    } else {
        [k2[0] / norm2, k2[1] / norm2, k2[2] / norm2]
    };
    let k3 = if centered.knot_count() > 2 {
        centered.knot(2).to_vec()
    } else {
        vec![0.0; 3]
    };
    let proj = dot3(&k3, &e1);
    let mut e2 = [k3[0] - proj * e1[0], k3[1] - proj * e1[1], k3[2] - proj * e1[2]];
    let mut norm = math::sqrt(dot3(&e2, &e2));
    if norm < 1e-12 * (1.0 + math::sqrt(dot3(&k3, &k3))) {
        // any unit vector orthogonal to e1
        let helper = if math::abs(e1[0]) < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let p = dot3(&helper, &e1);
        e2 = [helper[0] - p * e1[0], helper[1] - p * e1[1], helper[2] - p * e1[2]];
        norm = math::sqrt(dot3(&e2, &e2));
    }
    let e2 = [e2[0] / norm, e2[1] / norm, e2[2] / norm];
    let e3 = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    let rot = [e1[0], e1[1], e1[2], e2[0], e2[1], e2[2], e3[0], e3[1], e3[2]];
    centered.transformed(&rot, &[0.0, 0.0, 0.0])
}

fn dot3(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Dimension of the affine span of a point set (numerically).
fn affine_rank(points: &[&[f64]]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let n = points[0].len();
    let base = points[0];
    let rows: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    if rows.is_empty() {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    crate::linalg::numerical_rank(&m, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle(pinned: bool) -> Framework {
        let knots = vec![
            Knot { id: 1, coords: vec![0.0, 0.0], pinned },
            Knot { id: 2, coords: vec![1.0, 0.0], pinned: false },
            Knot { id: 3, coords: vec![0.0, 1.0], pinned: false },
        ];
        let edges = vec![
            Edge { i: 1, j: 2, rest_length: 1.0 },
            Edge { i: 1, j: 3, rest_length: 1.0 },
            Edge { i: 2, j: 3, rest_length: core::f64::consts::SQRT_2 },
        ];
        Framework::new(2, knots, edges, vec![], 1.0, StrainModel::GreenLagrange).unwrap()
    }

    #[test]
    fn rejects_nonpositive_rest_length() {
        let knots = vec![
            Knot { id: 1, coords: vec![0.0, 0.0], pinned: false },
            Knot { id: 2, coords: vec![1.0, 0.0], pinned: false },
        ];
        let edges = vec![Edge { i: 1, j: 2, rest_length: 0.0 }];
        let err = Framework::new(2, knots, edges, vec![], 1.0, StrainModel::GreenLagrange)
            .unwrap_err();
        assert!(format!("{err}").contains("rest_length must be positive"));
    }

    #[test]
    fn rejects_degenerate_plate() {
        let knots = (1..=3)
            .map(|id| Knot { id, coords: vec![id as f64, 0.0], pinned: false })
            .collect();
        let edges = vec![
            Edge { i: 1, j: 2, rest_length: 3.0 },
            Edge { i: 1, j: 3, rest_length: 4.0 },
            Edge { i: 2, j: 3, rest_length: 10.0 },
        ];
        let err = Framework::new(2, knots, edges, vec![[1, 2, 3]], 1.0, StrainModel::GreenLagrange)
            .unwrap_err();
        assert!(format!("{err}").contains("triangle inequality violated"));
    }

    #[test]
    fn rejects_ce_with_plates_and_bad_edges() {
        let knots: Vec<Knot> = (1..=3)
            .map(|id| Knot { id, coords: vec![0.0, id as f64], pinned: false })
            .collect();
        let edges = vec![
            Edge { i: 1, j: 2, rest_length: 1.0 },
            Edge { i: 1, j: 3, rest_length: 1.0 },
            Edge { i: 2, j: 3, rest_length: 1.0 },
        ];
        assert!(matches!(
            Framework::new(2, knots.clone(), edges.clone(), vec![[1, 2, 3]], 1.0, StrainModel::CauchyEngineering),
            Err(Error::StrainModel(_))
        ));
        let mut dup = edges.clone();
        dup.push(Edge { i: 1, j: 2, rest_length: 2.0 });
        assert!(Framework::new(2, knots.clone(), dup, vec![], 1.0, StrainModel::GreenLagrange).is_err());
        let swapped = vec![Edge { i: 2, j: 1, rest_length: 1.0 }];
        assert!(Framework::new(2, knots.clone(), swapped, vec![], 1.0, StrainModel::GreenLagrange).is_err());
        let missing = vec![Edge { i: 1, j: 2, rest_length: 1.0 }];
        assert!(Framework::new(2, knots, missing, vec![[1, 2, 3]], 1.0, StrainModel::GreenLagrange).is_err());
    }

    #[test]
    fn rejects_bad_ids_and_dimension() {
        let knots = vec![
            Knot { id: 1, coords: vec![0.0, 0.0], pinned: false },
            Knot { id: 3, coords: vec![1.0, 0.0], pinned: false },
        ];
        assert!(Framework::new(2, knots, vec![], vec![], 1.0, StrainModel::GreenLagrange).is_err());
        let knots = vec![Knot { id: 1, coords: vec![0.0, 0.0, 0.0], pinned: false }];
        assert!(matches!(
            Framework::new(2, knots, vec![], vec![], 1.0, StrainModel::GreenLagrange),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn unit_square_diagonal() {
        let knots = vec![
            Knot { id: 1, coords: vec![0.0, 0.0], pinned: false },
            Knot { id: 2, coords: vec![1.0, 1.0], pinned: false },
        ];
        let edges = vec![Edge { i: 1, j: 2, rest_length: 1.0 }];
        let fw = Framework::new(2, knots, edges, vec![], 1.0, StrainModel::GreenLagrange).unwrap();
        let l = edge_lengths(&fw, &fw.declared_configuration());
        assert!((l[0] - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn triangle_is_isostatic_and_gauged() {
        let fw = triangle(false);
        let cfg = fw.declared_configuration();
        let report = validate_isostatic(&fw, &cfg, 1e-9);
        assert!(report.passed(), "{report:?}");
        let gauge = Gauge::new(&fw).unwrap();
        assert_eq!(gauge.kind(), GaugeKind::Standard);
        // k2x, k3x, k3y
        assert_eq!(gauge.free_indices(), &[2, 4, 5]);
    }

    #[test]
    fn canonical_form_is_rotation_invariant() {
        let fw = triangle(false);
        let cfg = Configuration::from_flat(2, vec![0.3, -0.2, 1.1, 0.4, 0.1, 1.3]);
        let gauge = Gauge::new(&fw).unwrap();
        let rotated = cfg.transformed(&[0.0, -1.0, 1.0, 0.0], &[5.0, -7.0]);
        let a = gauge.canonicalize(&cfg);
        let b = gauge.canonicalize(&rotated);
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!(a.knot(1)[1].abs() < 1e-15 && a.knot(1)[0] > 0.0);
    }

    #[test]
    fn single_pin_is_rejected_by_gauge() {
        let fw = triangle(true);
        assert!(Gauge::new(&fw).is_err());
        assert_eq!(Gauge::unpinned_coordinates(&fw).free_count(), 4);
    }

    #[test]
    fn configuration_checks_pins() {
        let fw = triangle(true);
        let mut cfg = fw.declared_configuration();
        assert!(fw.check_configuration(&cfg).is_ok());
        cfg.as_mut_slice()[0] = 1e-3;
        assert!(fw.check_configuration(&cfg).is_err());
    }
}
