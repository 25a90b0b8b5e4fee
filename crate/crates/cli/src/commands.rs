//! Argument parsing and one handler per subcommand. Every command writes
//! `report.json` into its output directory, failures included.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use trapchain_core::approx::{PolyApproximant, DEFAULT_SCHEDULE};
use trapchain_core::dynamics::{build_path_graph, escape_check, iterate};
use trapchain_core::scaffold::ScaffoldConfig;
use trapchain_core::targets::{build_target, PiecewiseTarget, TargetVariant};
use trapchain_core::verify::{Budget, CertStatus, InclusionCertificate, MapRealization};
use trapchain_core::Complex64;

use crate::error::CliError;
use crate::io::{read_json, write_json, write_ppm, write_text};
use crate::pipeline::{
    self, band_image, certify_all, check_scaffold, files, render_bands, render_scaffold, scaffold_image, synthesize,
    RunConfig, ScaffoldParams,
};
use crate::report::{Report, ScaffoldSummary, SynthesisSummary};

#[derive(Debug, Parser)]
#[command(name = "trapchain", version, about = "Trapping-domain chains for a transcendental skew product")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or validate the disk-and-line scaffold.
    #[command(subcommand)]
    Scaffold(ScaffoldCmd),
    /// Piecewise log-level targets and tolerances.
    #[command(subcommand)]
    Target(TargetCmd),
    /// Fit the polynomial f1 and build f2.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Certify the trapping inclusions.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Path graph and single orbits.
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Scaffold diagram and band map as PPM.
    #[command(subcommand)]
    Render(RenderCmd),
    /// Every stage in order, from scaffold to images.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Subcommand)]
pub enum ScaffoldCmd {
    /// Writes scaffold.json.
    Gen {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Checks every named constraint; exit 1 on a violation.
    Validate {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum TargetCmd {
    /// Writes target.json for the variant.
    Build {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        variant: VariantArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum ApproxCmd {
    /// Fits f1 over the degree schedule; writes f1.json, f2.json, synthesis.json.
    Synth {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        variant: VariantArg,
        #[command(flatten)]
        fit: FitArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    /// Certifies every required inclusion; writes certificates.json.
    Run {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        variant: VariantArg,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum DynamicsCmd {
    /// Builds the one-step path graph from certificates.json.
    Graph {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        variant: VariantArg,
    },
    /// Iterates one point with the synthesized map.
    Orbit {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        w: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum RenderCmd {
    /// Draws the scaffold to scaffold.ppm.
    Scaffold {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value_t = 1200)]
        width: usize,
    },
    /// Colors start points by their first trapped band; writes bands.ppm.
    Bands {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        variant: VariantArg,
        #[arg(long, default_value_t = 1200)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        max_iter: usize,
        /// Ignore membership before this iteration.
        #[arg(long, default_value_t = 0)]
        first_step: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// Output directory; later stages read earlier artifacts from it.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Scaffold JSON [default: <out>/scaffold.json]
    #[arg(long)]
    pub scaffold: Option<PathBuf>,
}

impl IoArgs {
    fn scaffold_path(&self) -> PathBuf {
        self.scaffold.clone().unwrap_or_else(|| self.out.join(files::SCAFFOLD))
    }

    fn path(&self, f: &str) -> PathBuf {
        self.out.join(f)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 3.0)]
    pub growth: f64,
}

impl ParamArgs {
    fn params(&self) -> ScaffoldParams {
        ScaffoldParams {
            delta: self.delta,
            depth: self.depth,
            growth: self.growth,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VariantArg {
    /// wandering, attracting or common-path
    #[arg(long, default_value = "wandering", value_parser = parse_variant)]
    pub variant: TargetVariant,
}

fn parse_variant(s: &str) -> Result<TargetVariant, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Comma-separated increasing degrees.
    #[arg(long, value_delimiter = ',')]
    pub degree_schedule: Option<Vec<usize>>,
    /// Fit points per unit length.
    #[arg(long, default_value_t = pipeline::DEFAULT_DENSITY)]
    pub density: f64,
    /// Use f2(w) = slope * w instead of f2 = 0.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub f2_slope: f64,
}

impl FitArgs {
    fn schedule(&self) -> Vec<usize> {
        self.degree_schedule.clone().unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec())
    }
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 24)]
    pub max_depth: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_boxes: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_depth: self.max_depth,
            max_boxes: self.max_boxes,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub fit: FitArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, default_value_t = 1200)]
    pub width: usize,
    #[arg(long, default_value_t = 4)]
    pub max_iter: usize,
    /// Seed for the sampled orbit confirmation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl PipelineArgs {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            scaffold: self.params.params(),
            scaffold_file: self.io.scaffold.clone(),
            variant: self.variant.variant,
            degree_schedule: self.fit.schedule(),
            density: self.fit.density,
            f2_slope: self.fit.f2_slope,
            budget: self.budget.budget(),
            image_width: self.width,
            max_iter: self.max_iter,
            out: self.io.out.clone(),
            seed: self.seed,
        }
    }
}

fn load_map(io: &IoArgs, cfg: &ScaffoldConfig) -> Result<MapRealization, CliError> {
    let f1: PolyApproximant = read_json(&io.path(files::F1), "approximant")?;
    let f2: PolyApproximant = read_json(&io.path(files::F2), "approximant")?;
    for p in [&f1, &f2] {
        p.check().map_err(CliError::Config)?;
    }
    Ok(MapRealization {
        f1,
        f2,
        delta: cfg.delta,
    })
}

fn scaffold(io: &IoArgs) -> Result<ScaffoldConfig, CliError> {
    pipeline::load_scaffold(&io.scaffold_path())
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Command::Pipeline(a) = &cli.command {
        let run = pipeline::run_pipeline(&a.run_config());
        if let Some(e) = &run.report.error {
            eprintln!("error: {e}");
        }
        return run.report.exit_code;
    }
    let (name, out) = describe(&cli.command);
    let mut report = Report::new(name);
    let res = dispatch(&cli.command, &mut report);
    report.finish(res.as_ref().err());
    if let Err(e) = &res {
        eprintln!("error: {e}");
    }
    if let Err(e) = write_json(&out.join(files::REPORT), &report) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    report.exit_code
}

fn describe(c: &Command) -> (&'static str, PathBuf) {
    match c {
        Command::Scaffold(ScaffoldCmd::Gen { io, .. }) => ("scaffold gen", io.out.clone()),
        Command::Scaffold(ScaffoldCmd::Validate { io }) => ("scaffold validate", io.out.clone()),
        Command::Target(TargetCmd::Build { io, .. }) => ("target build", io.out.clone()),
        Command::Approx(ApproxCmd::Synth { io, .. }) => ("approx synth", io.out.clone()),
        Command::Verify(VerifyCmd::Run { io, .. }) => ("verify run", io.out.clone()),
        Command::Dynamics(DynamicsCmd::Graph { io, .. }) => ("dynamics graph", io.out.clone()),
        Command::Dynamics(DynamicsCmd::Orbit { io, .. }) => ("dynamics orbit", io.out.clone()),
        Command::Render(RenderCmd::Scaffold { io, .. }) => ("render scaffold", io.out.clone()),
        Command::Render(RenderCmd::Bands { io, .. }) => ("render bands", io.out.clone()),
        Command::Pipeline(a) => ("pipeline", a.io.out.clone()),
    }
}

fn dispatch(c: &Command, report: &mut Report) -> Result<(), CliError> {
    match c {
        Command::Scaffold(ScaffoldCmd::Gen { params, io }) => {
            let cfg = pipeline::generate(&params.params())?;
            write_json(&io.path(files::SCAFFOLD), &cfg)
        }
        Command::Scaffold(ScaffoldCmd::Validate { io }) => {
            let checks = check_scaffold(&scaffold(io)?);
            write_json(&io.path(files::VALIDATION), &checks.validation)?;
            write_json(&io.path(files::NERSESJAN), &checks.nersesjan)?;
            report.scaffold = Some(ScaffoldSummary::new(&checks));
            if checks.passed() {
                Ok(())
            } else {
                Err(CliError::Validation(format!(
                    "scaffold violates {}",
                    checks.failed_constraints().join(", ")
                )))
            }
        }
        Command::Target(TargetCmd::Build { io, variant }) => {
            let cfg = scaffold(io)?;
            write_json(&io.path(files::TARGET), &build_target(&cfg, variant.variant))
        }
        Command::Approx(ApproxCmd::Synth { io, variant, fit }) => {
            let cfg = scaffold(io)?;
            let target: PiecewiseTarget = read_json(&io.path(files::TARGET), "target")?;
            let (syn, f2) = synthesize(&cfg, &target, variant.variant, &fit.schedule(), fit.density, fit.f2_slope)?;
            write_json(&io.path(files::F1), &syn.approximant)?;
            write_json(&io.path(files::F2), &f2)?;
            write_json(&io.path(files::SYNTHESIS), &syn)?;
            report.synthesis = Some(SynthesisSummary::new(&syn, &f2));
            Ok(())
        }
        Command::Verify(VerifyCmd::Run { io, variant, budget }) => {
            let cfg = scaffold(io)?;
            let m = load_map(io, &cfg)?;
            let certs = certify_all(&cfg, &m, variant.variant, budget.budget());
            write_json(&io.path(files::CERTIFICATES), &certs)?;
            report.set_certificates(&certs);
            let bad: Vec<String> = certs
                .iter()
                .filter(|c| c.status != CertStatus::Certified)
                .map(|c| format!("{} -> {} ({})", c.source, c.target, c.status))
                .collect();
            if bad.is_empty() {
                Ok(())
            } else {
                Err(CliError::Certification(bad.join(", ")))
            }
        }
        Command::Dynamics(DynamicsCmd::Graph { io, variant }) => {
            let cfg = scaffold(io)?;
            let certs: Vec<InclusionCertificate> = read_json(&io.path(files::CERTIFICATES), "certificates")?;
            let g = build_path_graph(&cfg, variant.variant, &certs).map_err(|e| CliError::Config(e.to_string()))?;
            write_json(&io.path(files::GRAPH), &g)?;
            write_text(&io.path(files::GRAPH_TXT), &g.adjacency())?;
            print!("{}", g.adjacency());
            report.graph = g.adjacency().lines().map(String::from).collect();
            Ok(())
        }
        Command::Dynamics(DynamicsCmd::Orbit { io, re, im, w, steps }) => {
            let cfg = scaffold(io)?;
            let m = load_map(io, &cfg)?;
            let orbit = iterate(&m, Complex64::new(*re, *im), *w, *steps);
            let out = OrbitOut {
                escapes: escape_check(&orbit, &cfg),
                orbit,
            };
            write_json(&io.path("orbit.json"), &out)?;
            print!("{}", crate::io::to_json(&out));
            Ok(())
        }
        Command::Render(RenderCmd::Scaffold { io, width }) => {
            let cfg = scaffold(io)?;
            let r = render_scaffold(&cfg, &scaffold_image(&cfg, *width))?;
            write_ppm(&io.path(files::SCAFFOLD_PPM), &r)
        }
        Command::Render(RenderCmd::Bands {
            io,
            variant,
            width,
            max_iter,
            first_step,
        }) => {
            let cfg = scaffold(io)?;
            let m = load_map(io, &cfg)?;
            let mut spec = band_image(&cfg, variant.variant, *width, *max_iter);
            spec.first_step = *first_step;
            write_ppm(&io.path(files::BANDS_PPM), &render_bands(&m, &cfg, &spec)?)
        }
        Command::Pipeline(_) => unreachable!("handled in run"),
    }
}

#[derive(serde::Serialize)]
struct OrbitOut {
    orbit: trapchain_core::dynamics::OrbitRecord,
    escapes: bool,
}

/// Path of the report a command writes.
pub fn report_path(out: &Path) -> PathBuf {
    out.join(files::REPORT)
}
