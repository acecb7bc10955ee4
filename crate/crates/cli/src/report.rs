//! JSON report documents. Field order is fixed by the struct definitions and
//! no timings are recorded, so reports are byte-identical across runs.

use serde::Serialize;
use snapkit::analysis::{AnalysisReport, CriticalSearch, Diagnostics};
use snapkit::critical::{Classification, CriticalPoint};
use snapkit::model::Configuration;
use snapkit::pathtrack::PathCertificate;

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub success: bool,
    pub endpoint_gap: Option<f64>,
    pub endpoint_distance: Option<f64>,
    pub min_pure_condition_magnitude_before_end: Option<f64>,
    pub max_residual: f64,
    pub endgame_converged: bool,
    pub endgame_difference: Option<f64>,
    pub samples: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub failure: Option<String>,
    pub endpoint: Option<Vec<Vec<f64>>>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl CertificateJson {
    pub fn new(cert: &PathCertificate, endpoint_distance: Option<f64>) -> Self {
        Self {
            success: cert.success,
            endpoint_gap: finite(cert.endpoint_gap),
            endpoint_distance,
            min_pure_condition_magnitude_before_end: finite(cert.min_pure_condition_magnitude_before_end),
            max_residual: cert.max_residual,
            endgame_converged: cert.endgame_converged,
            endgame_difference: finite(cert.endgame_difference),
            samples: cert.samples.len(),
            accepted_steps: cert.steps.accepted,
            rejected_steps: cert.steps.rejected,
            failure: cert.failure.clone(),
            endpoint: cert.endpoint.as_ref().map(Configuration::rows),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RejectedCandidate {
    pub density: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SearchJson {
    pub solver: String,
    pub tracked_paths: Option<usize>,
    pub finite_solutions: Option<usize>,
    pub failed_paths: Option<usize>,
    pub newton_starts: Option<usize>,
    pub newton_converged: Option<usize>,
    pub real_critical_points: usize,
    pub distinct_real_critical_points: usize,
    pub quotient_size: usize,
}

impl SearchJson {
    pub fn new(s: &CriticalSearch) -> Self {
        Self {
            solver: s.solver.name().into(),
            tracked_paths: s.tracked_paths,
            finite_solutions: s.finite_solutions,
            failed_paths: s.failed_paths,
            newton_starts: s.newton_starts,
            newton_converged: s.newton_converged,
            real_critical_points: s.raw_real_points,
            distinct_real_critical_points: s.distinct_real_points,
            quotient_size: s.quotient.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsJson {
    pub seed: u64,
    pub polished_start: bool,
    pub start_residual: f64,
    pub search: Option<SearchJson>,
    pub low_confidence: bool,
    pub rejected_candidates: Vec<RejectedCandidate>,
    pub witness_energy: Option<f64>,
    pub witness_pure_condition: Option<f64>,
    pub constrained_starts: Option<usize>,
    pub constrained_converged: Option<usize>,
}

/// How the analysed realization was prepared.
#[derive(Clone, Copy, Debug)]
pub struct StartInfo {
    pub seed: u64,
    pub polished: bool,
    pub residual: f64,
}

impl DiagnosticsJson {
    pub fn new(d: &Diagnostics, start: StartInfo) -> Self {
        Self {
            seed: start.seed,
            polished_start: start.polished,
            start_residual: start.residual,
            search: d.search.as_ref().map(SearchJson::new),
            low_confidence: d.low_confidence,
            rejected_candidates: d
                .rejected
                .iter()
                .map(|(density, reason)| RejectedCandidate {
                    density: *density,
                    reason: reason.clone(),
                })
                .collect(),
            witness_energy: d.witness_energy,
            witness_pure_condition: d.witness_pure_condition,
            constrained_starts: d.constrained_starts,
            constrained_converged: d.constrained_converged,
        }
    }
}

/// `snap` / `singdist` report.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisJson {
    pub value: Option<f64>,
    pub infinite: bool,
    pub witness: Option<Vec<Vec<f64>>>,
    pub witness_is_shaky: bool,
    pub method: String,
    pub candidates_examined: usize,
    pub path_certificate: Option<CertificateJson>,
    pub diagnostics: DiagnosticsJson,
}

impl AnalysisJson {
    pub fn new(r: &AnalysisReport, start: StartInfo) -> Self {
        Self {
            value: r.value,
            infinite: r.infinite,
            witness: r.witness_cfg.as_ref().map(Configuration::rows),
            witness_is_shaky: r.witness_is_shaky,
            method: r.method.name().into(),
            candidates_examined: r.candidates_examined,
            path_certificate: r
                .path_certificate
                .as_ref()
                .map(|c| CertificateJson::new(c, r.diagnostics.endpoint_distance)),
            diagnostics: DiagnosticsJson::new(&r.diagnostics, start),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPointJson {
    pub density: f64,
    pub energy: f64,
    pub classification: &'static str,
    /// Positive, zero and negative Hessian eigenvalue counts.
    pub inertia: [usize; 3],
    pub gradient_residual: f64,
    pub configuration: Vec<Vec<f64>>,
}

pub fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Minimum => "minimum",
        Classification::Saddle => "saddle",
        Classification::Degenerate => "degenerate",
    }
}

impl CriticalPointJson {
    pub fn new(p: &CriticalPoint) -> Self {
        Self {
            density: p.density,
            energy: p.energy,
            classification: classification_name(p.classification),
            inertia: [p.inertia.0, p.inertia.1, p.inertia.2],
            gradient_residual: p.gradient_residual,
            configuration: p.cfg.rows(),
        }
    }
}

/// `critical` report: the quotient set in ascending density.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalJson {
    pub seed: u64,
    pub polished_start: bool,
    pub start_residual: f64,
    pub search: SearchJson,
    pub quotient: Vec<CriticalPointJson>,
}

/// `check` report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckJson {
    pub valid: bool,
    pub count_condition: bool,
    pub edges: usize,
    pub required_edges: usize,
    pub rank: usize,
    pub shaky: bool,
    pub smallest_relative_singular_value: f64,
    pub max_length_residual: f64,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementEnergyJson {
    pub element: String,
    pub energy: f64,
}

/// `energy` report.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyJson {
    pub strain_model: &'static str,
    pub lengths: Vec<f64>,
    pub rest_lengths: Vec<f64>,
    pub total_length: f64,
    pub energy: f64,
    pub density: f64,
    pub elements: Vec<ElementEnergyJson>,
}

/// `track` report.
#[derive(Clone, Debug, Serialize)]
pub struct TrackJson {
    pub target_lengths: Vec<f64>,
    pub endpoint_matches_target: bool,
    pub target_density: f64,
    pub monotone: bool,
    pub path_certificate: CertificateJson,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}
