//! Command-line front end.
//!
//! Every subcommand writes its JSON report to `--out` (or stdout) and a
//! one-line human summary to stderr. Exit codes: 0 success, 1 validation
//! failure, 2 precondition failure, 3 numeric failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use snapkit::analysis::{self, AnalysisOptions, Method, Solver};
use snapkit::model::{self, Configuration, Framework, Gauge, StrainModel};
use snapkit::pathtrack::{self, LengthPath};
use snapkit::{rigidity, strain};

use crate::compare::{self, DEFAULT_FIXTURES};
use crate::error::{CliError, CliResult};
use crate::io;
use crate::path_csv;
use crate::report::{
    self, AnalysisJson, CertificateJson, CheckJson, CriticalJson, CriticalPointJson, ElementEnergyJson, EnergyJson,
    SearchJson, StartInfo, TrackJson,
};
use crate::svg::{self, Layer};

#[derive(Debug, Parser)]
#[command(name = "snapkit", version, about = "Snappability and singularity distance of bar/plate frameworks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Newton,
    Homotopy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Gl,
    Ce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Thm3,
    Constrained,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Critical-point solver (default: homotopy for GL, newton for CE).
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    /// Newton multistart count.
    #[arg(long, default_value_t = 20_000)]
    pub starts: usize,
    /// Seed for every random choice.
    #[arg(long, env = "SNAPKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Override the file's strain model.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Relative singular-value threshold for ranks.
    #[arg(long, default_value_t = rigidity::DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    /// Critical points closer than this times the diameter are merged.
    #[arg(long, default_value_t = snapkit::critical::DEFAULT_DEDUP_TOL)]
    pub dedup_tol: f64,
    /// Path endpoint match tolerance relative to the diameter.
    #[arg(long, default_value_t = 1e-6)]
    pub endpoint_tol: f64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write an SVG figure here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write the tracked path as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the model, isostaticity and non-shakiness.
    Check {
        /// Framework JSON file.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Energy and density of the stored realization.
    Energy {
        /// Framework JSON file.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Real critical points (the quotient set of snapping candidates).
    Critical {
        /// Framework JSON file.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Snappability of the stored (undeformed) realization.
    Snap {
        /// Framework JSON file.
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Singularity distance of the stored (undeformed) realization.
    Singdist {
        /// Framework JSON file.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "thm3")]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Track the stored realization to the lengths of a target realization.
    Track {
        /// Framework JSON file.
        input: PathBuf,
        /// JSON file with the target realization (rows, a framework file or a report).
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Render the stored realization and overlays as SVG.
    Plot {
        /// Framework JSON file.
        input: PathBuf,
        /// Additional realizations (rows, framework files or reports).
        #[arg(long)]
        overlay: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Snappability table over several fixtures.
    Compare {
        /// Fixture files (default: the three ex1 variants under fixtures/).
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Result of a subcommand: exit code, report text and a short summary.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub summary: String,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check { common, .. }
            | Command::Energy { common, .. }
            | Command::Critical { common, .. }
            | Command::Snap { common, .. }
            | Command::Singdist { common, .. }
            | Command::Track { common, .. }
            | Command::Plot { common, .. }
            | Command::Compare { common, .. } => common,
        }
    }
}

impl Common {
    fn validate(&self) -> CliResult<()> {
        for (name, v) in [
            ("--rank-tol", self.rank_tol),
            ("--dedup-tol", self.dedup_tol),
            ("--endpoint-tol", self.endpoint_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
        if self.starts == 0 {
            return Err(CliError::Usage("--starts must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn options(&self) -> AnalysisOptions {
        let mut opts = AnalysisOptions {
            solver: self.solver.map(|s| match s {
                SolverArg::Newton => Solver::Newton,
                SolverArg::Homotopy => Solver::Homotopy,
            }),
            seed: self.seed,
            rank_tol: self.rank_tol,
            ..AnalysisOptions::default()
        };
        opts.newton.starts = self.starts;
        opts.quotient.dedup_tol = self.dedup_tol;
        opts.path.endpoint_tol = self.endpoint_tol;
        opts
    }

    pub fn load(&self, path: &Path) -> CliResult<(Framework, Configuration)> {
        let (fw, cfg) = io::load_framework(path)?;
        let fw = match self.model {
            Some(ModelArg::Gl) => fw.with_strain_model(StrainModel::GreenLagrange)?,
            Some(ModelArg::Ce) => fw.with_strain_model(StrainModel::CauchyEngineering)?,
            None => fw,
        };
        Ok((fw, cfg))
    }
}

/// Projects the stored realization onto the rest lengths when its residual
/// exceeds `1e-9` of the longest rest length (files carry rounded
/// coordinates).
pub fn prepare(fw: &Framework, cfg: &Configuration, seed: u64) -> CliResult<(Configuration, StartInfo)> {
    let residual = model::max_length_residual(fw, cfg);
    let lmax = fw.rest_lengths().iter().fold(0.0f64, |m, l| m.max(*l));
    if residual > 1e-9 * lmax {
        let (polished, before) = analysis::polish_to_rest_lengths(fw, cfg)?;
        Ok((
            polished,
            StartInfo {
                seed,
                polished: true,
                residual: before,
            },
        ))
    } else {
        Ok((
            cfg.clone(),
            StartInfo {
                seed,
                polished: false,
                residual,
            },
        ))
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write_svg(path: &Path, fw: &Framework, layers: &[Layer<'_>]) -> CliResult<()> {
    io::write_text(path, &svg::render(fw, layers)?)
}

fn write_csv(path: &Path, fw: &Framework, cert: &snapkit::pathtrack::PathCertificate) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })?;
    path_csv::write_path(fw, cert, std::io::BufWriter::new(file))
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "infinity".into(), |v| format!("{v:.5e}"))
}

/// Runs one subcommand.
pub fn execute(command: &Command) -> CliResult<Outcome> {
    let common = command.common();
    common.validate()?;
    match command {
        Command::Check { input, .. } => cmd_check(input, common),
        Command::Energy { input, .. } => cmd_energy(input, common),
        Command::Critical { input, .. } => cmd_critical(input, common),
        Command::Snap { input, .. } => cmd_analysis(input, common, Method::Snappability),
        Command::Singdist { input, method, .. } => cmd_analysis(
            input,
            common,
            match method {
                MethodArg::Thm3 => Method::Thm3,
                MethodArg::Constrained => Method::Constrained,
            },
        ),
        Command::Track { input, target, .. } => cmd_track(input, target, common),
        Command::Plot { input, overlay, .. } => cmd_plot(input, overlay, common),
        Command::Compare { inputs, .. } => {
            let inputs: Vec<PathBuf> = if inputs.is_empty() {
                DEFAULT_FIXTURES.iter().map(PathBuf::from).collect()
            } else {
                inputs.clone()
            };
            let table = compare::compare_files(&inputs, common)?;
            Ok(Outcome {
                code: 0,
                summary: compare::render_text(&table),
                report: report::to_json(&table),
            })
        }
    }
}

fn cmd_check(input: &Path, common: &Common) -> CliResult<Outcome> {
    let (fw, cfg) = common.load(input)?;
    let iso = model::validate_isostatic(&fw, &cfg, common.rank_tol);
    let shaky = rigidity::is_shaky(&fw, &cfg, common.rank_tol);
    let mut violations: Vec<String> = iso.reasons.clone();
    if shaky.shaky {
        violations.push("realization is shaky".into());
    }
    let doc = CheckJson {
        valid: violations.is_empty(),
        count_condition: iso.count_ok,
        edges: iso.edges,
        required_edges: iso.required_edges,
        rank: shaky.rank,
        shaky: shaky.shaky,
        smallest_relative_singular_value: shaky.relative_gap,
        max_length_residual: model::max_length_residual(&fw, &cfg),
        violations: violations.clone(),
    };
    let summary = if violations.is_empty() {
        "valid, isostatic, not shaky".to_string()
    } else {
        violations.join("; ")
    };
    Ok(Outcome {
        code: if violations.is_empty() { 0 } else { 1 },
        report: report::to_json(&doc),
        summary,
    })
}

fn cmd_energy(input: &Path, common: &Common) -> CliResult<Outcome> {
    let (fw, cfg) = common.load(input)?;
    let lengths = model::edge_lengths(&fw, &cfg);
    let energies = strain::element_energies(&fw, &lengths)?;
    let mut labels: Vec<String> = fw
        .bars()
        .map(|e| format!("bar {}-{}", fw.edges()[e].i, fw.edges()[e].j))
        .collect();
    labels.extend(
        fw.plates()
            .iter()
            .map(|p| format!("plate {}-{}-{}", p.knots[0], p.knots[1], p.knots[2])),
    );
    let energy: f64 = energies.iter().sum();
    let doc = EnergyJson {
        strain_model: match fw.strain_model() {
            StrainModel::GreenLagrange => "gl",
            StrainModel::CauchyEngineering => "ce",
        },
        rest_lengths: fw.rest_lengths(),
        total_length: fw.total_length(),
        density: energy / (fw.cross_section() * fw.total_length()),
        energy,
        elements: labels
            .into_iter()
            .zip(&energies)
            .map(|(element, e)| ElementEnergyJson { element, energy: *e })
            .collect(),
        lengths,
    };
    Ok(Outcome {
        code: 0,
        summary: format!("U = {:.6e}, D = {:.6e}", doc.energy, doc.density),
        report: report::to_json(&doc),
    })
}

fn cmd_critical(input: &Path, common: &Common) -> CliResult<Outcome> {
    let (fw, cfg) = common.load(input)?;
    let (cfg, start) = prepare(&fw, &cfg, common.seed)?;
    let search = analysis::find_critical_points(&fw, &cfg, &common.options())?;
    let doc = CriticalJson {
        seed: start.seed,
        polished_start: start.polished,
        start_residual: start.residual,
        search: SearchJson::new(&search),
        quotient: search.quotient.points.iter().map(CriticalPointJson::new).collect(),
    };
    Ok(Outcome {
        code: 0,
        summary: format!(
            "{} solver: {} candidates in the quotient set",
            search.solver.name(),
            search.quotient.len()
        ),
        report: report::to_json(&doc),
    })
}

fn cmd_analysis(input: &Path, common: &Common, method: Method) -> CliResult<Outcome> {
    let (fw, cfg) = common.load(input)?;
    let (cfg, start) = prepare(&fw, &cfg, common.seed)?;
    let opts = common.options();
    let rep = analysis::singularity_distance(&fw, &cfg, method, &opts)?;
    if let (Some(path), Some(cert)) = (&common.csv, &rep.path_certificate) {
        write_csv(path, &fw, cert)?;
    }
    if let Some(path) = &common.svg {
        let mut layers = vec![Layer {
            name: file_stem(input),
            cfg: &cfg,
        }];
        if let Some(w) = &rep.witness_cfg {
            layers.push(Layer {
                name: "witness".into(),
                cfg: w,
            });
        }
        write_svg(path, &fw, &layers)?;
    }
    let doc = AnalysisJson::new(&rep, start);
    Ok(Outcome {
        code: 0,
        summary: format!("{} = {} ({} candidates examined)", method.name(), fmt_value(rep.value), rep.candidates_examined),
        report: report::to_json(&doc),
    })
}

fn cmd_track(input: &Path, target: &Path, common: &Common) -> CliResult<Outcome> {
    let (fw, cfg) = common.load(input)?;
    let (cfg, _) = prepare(&fw, &cfg, common.seed)?;
    let target_cfg = io::load_configuration(target, fw.dimension())?;
    fw.check_configuration(&target_cfg)?;
    let gauge = Gauge::new(&fw)?;
    let lengths = model::edge_lengths(&fw, &target_cfg);
    let path = LengthPath::from_rest(&fw, lengths.clone())?;
    let opts = common.options();
    let cert = pathtrack::track_deformation_with(&fw, &gauge, &cfg, &path, &opts.path)?;
    let matches = pathtrack::check_endpoint(&gauge, &cert, &target_cfg, common.endpoint_tol);
    let distance = pathtrack::endpoint_distance(&gauge, &cert, &target_cfg);
    let monotone = pathtrack::verify_monotonicity(&fw, &path, 8)?.monotone;
    if let Some(p) = &common.csv {
        write_csv(p, &fw, &cert)?;
    }
    if let Some(p) = &common.svg {
        let mut layers = vec![Layer {
            name: file_stem(input),
            cfg: &cfg,
        }];
        if let Some(end) = &cert.endpoint {
            layers.push(Layer {
                name: "endpoint".into(),
                cfg: end,
            });
        }
        write_svg(p, &fw, &layers)?;
    }
    let doc = TrackJson {
        target_density: strain::density_from_lengths(&fw, &lengths)?,
        target_lengths: lengths,
        endpoint_matches_target: matches,
        monotone,
        path_certificate: CertificateJson::new(&cert, distance),
    };
    let summary = match (&cert.failure, matches) {
        (Some(f), _) => format!("path failed: {f}"),
        (None, true) => "path reaches the target".into(),
        (None, false) => "path ends at a different realization".into(),
    };
    Ok(Outcome {
        code: 0,
        summary,
        report: report::to_json(&doc),
    })
}

fn cmd_plot(input: &Path, overlays: &[PathBuf], common: &Common) -> CliResult<Outcome> {
    let (fw, cfg) = common.load(input)?;
    let mut cfgs = Vec::new();
    for p in overlays {
        let c = io::load_configuration(p, fw.dimension())?;
        if c.knot_count() != fw.knot_count() {
            return Err(CliError::Format(format!("{}: knot count does not match", p.display())));
        }
        cfgs.push((file_stem(p), c));
    }
    let mut layers = vec![Layer {
        name: file_stem(input),
        cfg: &cfg,
    }];
    layers.extend(cfgs.iter().map(|(name, c)| Layer { name: name.clone(), cfg: c }));
    let svg_text = svg::render(&fw, &layers)?;
    match &common.svg {
        Some(p) => {
            io::write_text(p, &svg_text)?;
            Ok(Outcome {
                code: 0,
                summary: format!("wrote {} layers to {}", layers.len(), p.display()),
                report: String::new(),
            })
        }
        None => Ok(Outcome {
            code: 0,
            summary: format!("{} layers", layers.len()),
            report: svg_text,
        }),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.command.common().threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not configure threads: {e}");
        }
    }
    match execute(&cli.command) {
        Ok(outcome) => {
            let out = cli.command.common().out.clone();
            let written = match &out {
                Some(p) if !outcome.report.is_empty() => io::write_text(p, &outcome.report),
                _ => {
                    print!("{}", outcome.report);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            eprintln!("{}", outcome.summary);
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
