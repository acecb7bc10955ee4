//! Exact first and second derivatives of the strain energy with respect to
//! knot coordinates.
//!
//! Every lifted entry is a sum of squared linear forms in the variables
//! `X = (x_0, x_1, ..., x_N)`: `Q_0 = x_0^2` and
//! `Q_e = sum_d (X_{i,d} - X_{j,d})^2`, where a free coordinate is a
//! variable and a fixed coordinate `c` enters as `c * x_0`. With `x_0 = 1`
//! this is the ordinary affine setting; leaving `x_0` free gives the
//! homogenized system used by the homotopy solver.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{ComplexField, DMatrix, DVector};

use super::EnergyMatrix;
use crate::error::{Error, Result};
use crate::math;
use crate::model::{Configuration, Framework, Gauge, StrainModel};

type LinForm = Vec<(usize, f64)>;

/// Knot-coordinate structure of the lifted lengths over a set of free coordinates.
#[derive(Clone, Debug)]
pub struct LiftedSystem {
    nvars: usize,
    forms: Vec<Vec<LinForm>>,
}

impl LiftedSystem {
    /// `free` lists flat coordinate indices that become variables `1..=N`
    /// (in order); all other coordinates are frozen at their values in
    /// `base`, divided by `scale`.
    pub fn new(fw: &Framework, free: &[usize], base: &Configuration, scale: f64) -> Self {
        let n = fw.dimension();
        let mut var_of = vec![None; base.as_slice().len()];
        for (v, &flat) in free.iter().enumerate() {
            var_of[flat] = Some(v + 1);
        }
        let coord = |flat: usize| -> LinForm {
            match var_of[flat] {
                Some(v) => vec![(v, 1.0)],
                None => vec![(0, base.as_slice()[flat] / scale)],
            }
        };
        let mut forms = Vec::with_capacity(fw.edge_count() + 1);
        forms.push(vec![vec![(0, 1.0)]]);
        for edge in fw.edges() {
            let mut per_dim = Vec::with_capacity(n);
            for d in 0..n {
                let mut form = coord((edge.i - 1) * n + d);
                for (v, c) in coord((edge.j - 1) * n + d) {
                    match form.iter_mut().find(|(w, _)| *w == v) {
                        Some(slot) => slot.1 -= c,
                        None => form.push((v, -c)),
                    }
                }
                form.retain(|(_, c)| *c != 0.0);
                per_dim.push(form);
            }
            forms.push(per_dim);
        }
        Self {
            nvars: free.len() + 1,
            forms,
        }
    }

    /// Number of variables including the homogenizing slot.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of lifted entries, `b + 1`.
    pub fn entries(&self) -> usize {
        self.forms.len()
    }

    fn eval_form<T: ComplexField<RealField = f64>>(form: &LinForm, x: &[T]) -> T {
        let mut acc = T::zero();
        for &(v, c) in form {
            acc += x[v].clone() * T::from_real(c);
        }
        acc
    }

    /// `Q_f(X)` for every lifted entry.
    pub fn lifted<T: ComplexField<RealField = f64>>(&self, x: &[T]) -> Vec<T> {
        self.forms
            .iter()
            .map(|per_dim| {
                let mut q = T::zero();
                for form in per_dim {
                    let l = Self::eval_form(form, x);
                    q += l.clone() * l;
                }
                q
            })
            .collect()
    }

    /// Dense Jacobian `dQ_f / dX_v`, shape `(b+1) x nvars`.
    pub fn jacobian<T: ComplexField<RealField = f64>>(&self, x: &[T]) -> DMatrix<T> {
        let mut jac = DMatrix::zeros(self.forms.len(), self.nvars);
        for (f, per_dim) in self.forms.iter().enumerate() {
            for form in per_dim {
                let l = Self::eval_form(form, x);
                for &(v, c) in form {
                    jac[(f, v)] += l.clone() * T::from_real(2.0 * c);
                }
            }
        }
        jac
    }

    /// Gradient over all variables given `g_f = dU/dQ_f`.
    pub fn gradient<T: ComplexField<RealField = f64>>(&self, x: &[T], g: &[T]) -> Vec<T> {
        let jac = self.jacobian(x);
        let g = DVector::from_column_slice(g);
        (jac.transpose() * g).iter().cloned().collect()
    }

    /// Hessian over all variables given `g = dU/dQ` and `h = d^2U/dQ^2`.
    pub fn hessian<T: ComplexField<RealField = f64>>(&self, x: &[T], g: &[T], h: &DMatrix<T>) -> DMatrix<T> {
        let jac = self.jacobian(x);
        let mut hess = jac.transpose() * h * &jac;
        for (f, per_dim) in self.forms.iter().enumerate() {
            if g[f] == T::zero() {
                continue;
            }
            for form in per_dim {
                for &(a, ca) in form {
                    for &(b, cb) in form {
                        hess[(a, b)] += g[f].clone() * T::from_real(2.0 * ca * cb);
                    }
                }
            }
        }
        hess
    }
}

/// Energy, gradient and Hessian of one framework over a fixed set of free
/// coordinates (affine setting).
#[derive(Clone, Debug)]
pub struct EnergyLandscape {
    system: LiftedSystem,
    matrix: Option<EnergyMatrix>,
    bars: Vec<(usize, f64)>,
    cross_section: f64,
    free: Vec<usize>,
    base: Configuration,
}

impl EnergyLandscape {
    pub fn new(fw: &Framework, free: &[usize], base: &Configuration) -> Result<Self> {
        fw.check_configuration(base)?;
        let matrix = match fw.strain_model() {
            StrainModel::GreenLagrange => Some(EnergyMatrix::new(fw)?),
            StrainModel::CauchyEngineering => None,
        };
        Ok(Self {
            system: LiftedSystem::new(fw, free, base, 1.0),
            matrix,
            bars: fw.bars().map(|e| (e, fw.edges()[e].rest_length)).collect(),
            cross_section: fw.cross_section(),
            free: free.to_vec(),
            base: base.clone(),
        })
    }

    /// Landscape over the gauge's free coordinates with fixed coordinates at
    /// their gauge values.
    pub fn for_gauge(fw: &Framework, gauge: &Gauge) -> Result<Self> {
        let base = gauge.embed(&vec![0.0; gauge.free_count()]);
        Self::new(fw, gauge.free_indices(), &base)
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn system(&self) -> &LiftedSystem {
        &self.system
    }

    pub fn energy_matrix(&self) -> Option<&EnergyMatrix> {
        self.matrix.as_ref()
    }

    /// Full configuration from free values.
    pub fn configuration(&self, free: &[f64]) -> Configuration {
        let mut cfg = self.base.clone();
        for (&i, &v) in self.free.iter().zip(free) {
            cfg.as_mut_slice()[i] = v;
        }
        cfg
    }

    fn vars(free: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(free.len() + 1);
        x.push(1.0);
        x.extend_from_slice(free);
        x
    }

    /// Lifted lengths `(1, q_1, ..., q_b)` at the free values.
    pub fn lifted(&self, free: &[f64]) -> Vec<f64> {
        self.system.lifted(&Self::vars(free))
    }

    /// `U` as a function of lifted lengths.
    pub fn energy_of_lifted(&self, q: &[f64]) -> f64 {
        match &self.matrix {
            Some(m) => {
                let mm = m.matrix();
                let mut u = 0.0;
                for r in 0..q.len() {
                    for c in 0..q.len() {
                        u += q[r] * mm[(r, c)] * q[c];
                    }
                }
                u
            }
            None => self
                .bars
                .iter()
                .map(|&(e, l)| super::bar_energy_ce(l, math::sqrt(q[e + 1]), self.cross_section))
                .sum(),
        }
    }

    /// `dU/dQ` and `d^2U/dQ^2` at lifted lengths `q`.
    pub fn lifted_derivatives(&self, q: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let k = q.len();
        match &self.matrix {
            Some(m) => {
                let mm = m.matrix();
                let qv = DVector::from_column_slice(q);
                let g = (mm * qv) * 2.0;
                (g.iter().copied().collect(), mm * 2.0)
            }
            None => {
                let mut g = vec![0.0; k];
                let mut h = DMatrix::zeros(k, k);
                let a = self.cross_section;
                for &(e, l) in &self.bars {
                    let qe = q[e + 1];
                    let len = math::sqrt(qe);
                    g[e + 1] = a * (len - l) / (2.0 * l * len);
                    h[(e + 1, e + 1)] = a / (4.0 * qe * len);
                }
                (g, h)
            }
        }
    }

    pub fn energy(&self, free: &[f64]) -> f64 {
        self.energy_of_lifted(&self.lifted(free))
    }

    /// Gradient over the free coordinates.
    pub fn gradient(&self, free: &[f64]) -> Result<Vec<f64>> {
        let x = Self::vars(free);
        let q = self.system.lifted(&x);
        let (g, _) = self.lifted_derivatives(&q);
        let grad = self.system.gradient(&x, &g);
        finite(grad[1..].to_vec())
    }

    /// Hessian over the free coordinates.
    pub fn hessian(&self, free: &[f64]) -> Result<DMatrix<f64>> {
        let x = Self::vars(free);
        let q = self.system.lifted(&x);
        let (g, h) = self.lifted_derivatives(&q);
        let full = self.system.hessian(&x, &g, &h);
        let n = free.len();
        let out = full.view((1, 1), (n, n)).into_owned();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite Hessian (zero-length bar?)".into()));
        }
        Ok(out)
    }

    /// Edge stresses `omega_e = 2 dU/dq_e`; with them the gradient block of
    /// knot `i` is `sum_e omega_e (k_i - k_j)`.
    pub fn stresses(&self, free: &[f64]) -> Vec<f64> {
        let q = self.lifted(free);
        let (g, _) = self.lifted_derivatives(&q);
        g[1..].iter().map(|v| 2.0 * v).collect()
    }
}

fn finite(v: Vec<f64>) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::Numeric("non-finite gradient (zero-length bar?)".into()))
    }
}

/// Gradient of the total energy at `cfg` over the gauge's free coordinates.
pub fn energy_gradient(fw: &Framework, cfg: &Configuration, gauge: &Gauge) -> Result<Vec<f64>> {
    let land = EnergyLandscape::new(fw, gauge.free_indices(), cfg)?;
    land.gradient(&gauge.free_values(cfg))
}

/// Hessian of the total energy at `cfg` over the gauge's free coordinates.
pub fn energy_hessian(fw: &Framework, cfg: &Configuration, gauge: &Gauge) -> Result<DMatrix<f64>> {
    let land = EnergyLandscape::new(fw, gauge.free_indices(), cfg)?;
    land.hessian(&gauge.free_values(cfg))
}

/// Solves the overdetermined per-plate equilibrium system for the three
/// edge stresses `(omega_ij, omega_ik, omega_jk)` that reproduce the plate's
/// gradient blocks at knots `i, j, k`. Returns the stresses and the
/// least-squares residual norm.
pub fn plate_stress_recovery(points: [&[f64]; 3], grads: [&[f64]; 3]) -> Result<([f64; 3], f64)> {
    let n = points[0].len();
    let mut a = DMatrix::zeros(3 * n, 3);
    let mut rhs = DVector::zeros(3 * n);
    // columns: ij, ik, jk
    let pairs = [(0usize, 1usize, 0usize), (0, 2, 1), (1, 2, 2)];
    for (u, v, col) in pairs {
        for d in 0..n {
            let diff = points[u][d] - points[v][d];
            a[(u * n + d, col)] += diff;
            a[(v * n + d, col)] -= diff;
        }
    }
    for (k, g) in grads.iter().enumerate() {
        for d in 0..n {
            rhs[k * n + d] = g[d];
        }
    }
    let sv = crate::linalg::singular_values(&a);
    if sv.len() < 3 || sv[2] <= 1e-12 * sv[0] {
        return Err(Error::Numeric("collinear plate: stress recovery is not unique".into()));
    }
    let svd = a.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Numeric(alloc::format!("least squares failed: {e}")))?;
    let residual = (&a * &sol - &rhs).norm();
    Ok(([sol[0], sol[1], sol[2]], residual))
}
