//! Stages shared by the subcommands and by the full run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trapchain_core::approx::{
    make_f2, sample_regions, synthesize_f1, ApproxError, PolyApproximant, Synthesis, DEFAULT_SCHEDULE,
};
use trapchain_core::dynamics::{build_path_graph, PathGraph};
use trapchain_core::render::{band_row, draw_scaffold, ImageSpec, Raster};
use trapchain_core::scaffold::{
    auto_bbox, generate_scaffold, nersesjan_check, validate_scaffold, w_range, Rect, ScaffoldConfig, ScaffoldError,
    StructuralReport, ValidationReport,
};
use trapchain_core::targets::{build_target, f2_tolerance, PiecewiseTarget, TargetVariant};
use trapchain_core::verify::{
    certify_inclusion, inclusions, Budget, CertStatus, InclusionCertificate, MapRealization,
};
use trapchain_core::Complex64;

use crate::error::CliError;
use crate::io::{read_json, write_json, write_ppm, write_text};
use crate::report::{Report, ScaffoldSummary, SynthesisSummary};

pub const ORBIT_TRIALS: usize = 100;
pub const DEFAULT_DENSITY: f64 = 0.5;

pub mod files {
    pub const SCAFFOLD: &str = "scaffold.json";
    pub const VALIDATION: &str = "validation.json";
    pub const NERSESJAN: &str = "nersesjan.json";
    pub const TARGET: &str = "target.json";
    pub const F1: &str = "f1.json";
    pub const F2: &str = "f2.json";
    pub const SYNTHESIS: &str = "synthesis.json";
    pub const CERTIFICATES: &str = "certificates.json";
    pub const GRAPH: &str = "graph.json";
    pub const GRAPH_TXT: &str = "graph.txt";
    pub const SCAFFOLD_PPM: &str = "scaffold.ppm";
    pub const BANDS_PPM: &str = "bands.ppm";
    pub const REPORT: &str = "report.json";
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaffoldParams {
    pub delta: f64,
    pub depth: usize,
    pub growth: f64,
}

impl Default for ScaffoldParams {
    fn default() -> Self {
        ScaffoldParams {
            delta: 0.5,
            depth: 3,
            growth: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scaffold: ScaffoldParams,
    /// Read the scaffold from here instead of generating it.
    pub scaffold_file: Option<PathBuf>,
    pub variant: TargetVariant,
    pub degree_schedule: Vec<usize>,
    pub density: f64,
    /// Slope of the optional f2 perturbation `w -> slope * w`.
    pub f2_slope: f64,
    pub budget: Budget,
    pub image_width: usize,
    pub max_iter: usize,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scaffold: ScaffoldParams::default(),
            scaffold_file: None,
            variant: TargetVariant::Wandering,
            degree_schedule: DEFAULT_SCHEDULE.to_vec(),
            density: DEFAULT_DENSITY,
            f2_slope: 0.0,
            budget: Budget::default(),
            image_width: 1200,
            max_iter: 4,
            out: PathBuf::from("out"),
            seed: 0,
        }
    }
}

pub fn generate(p: &ScaffoldParams) -> Result<ScaffoldConfig, CliError> {
    generate_scaffold(p.delta, p.depth, p.growth).map_err(|e| match e {
        ScaffoldError::InvalidParameter(m) => CliError::Config(m),
        e @ ScaffoldError::Infeasible { .. } => CliError::Validation(e.to_string()),
    })
}

pub fn load_scaffold(path: &Path) -> Result<ScaffoldConfig, CliError> {
    read_json(path, "scaffold")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaffoldChecks {
    pub validation: ValidationReport,
    pub nersesjan: StructuralReport,
}

impl ScaffoldChecks {
    pub fn passed(&self) -> bool {
        self.validation.passed() && self.nersesjan.passed()
    }

    pub fn failed_constraints(&self) -> Vec<String> {
        self.validation
            .failures()
            .chain(self.nersesjan.failures())
            .map(|c| c.constraint.clone())
            .collect()
    }
}

pub fn check_scaffold(cfg: &ScaffoldConfig) -> ScaffoldChecks {
    ScaffoldChecks {
        validation: validate_scaffold(cfg),
        nersesjan: nersesjan_check(cfg),
    }
}

fn approx_error(e: ApproxError) -> CliError {
    match e {
        ApproxError::DegreeBudgetExceeded { .. } | ApproxError::F2OutOfTolerance { .. } => {
            CliError::Validation(e.to_string())
        }
        _ => CliError::Config(e.to_string()),
    }
}

pub fn f2_perturbation(slope: f64) -> Option<PolyApproximant> {
    (slope != 0.0).then(|| {
        PolyApproximant::monomial(
            vec![Complex64::new(0.0, 0.0), Complex64::new(slope, 0.0)],
            Complex64::new(0.0, 0.0),
            1.0,
        )
    })
}

/// Fits f1 to the target and builds the f2 surrogate.
pub fn synthesize(
    cfg: &ScaffoldConfig,
    target: &PiecewiseTarget,
    variant: TargetVariant,
    schedule: &[usize],
    density: f64,
    f2_slope: f64,
) -> Result<(Synthesis, PolyApproximant), CliError> {
    let samples = sample_regions(cfg, variant, &auto_bbox(cfg, variant), density).map_err(approx_error)?;
    let syn = synthesize_f1(target, &samples, schedule).map_err(approx_error)?;
    let f2 = make_f2(f2_tolerance(), f2_perturbation(f2_slope).as_ref(), w_range(cfg, variant)).map_err(approx_error)?;
    Ok((syn, f2))
}

/// One certificate per required inclusion, in [`inclusions`] order.
pub fn certify_all(
    cfg: &ScaffoldConfig,
    m: &MapRealization,
    variant: TargetVariant,
    budget: Budget,
) -> Vec<InclusionCertificate> {
    inclusions(cfg, variant)
        .par_iter()
        .map(|inc| certify_inclusion(m, &inc.source, &inc.target, budget).expect("sources are clipped"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitFailure {
    pub z: Complex64,
    pub w: f64,
    pub image_z: Complex64,
    pub image_w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitCheck {
    pub source: String,
    pub target: String,
    pub trials: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<OrbitFailure>,
}

/// Pushes `trials` seeded random points of each source one step forward
/// and counts those landing outside the target.
pub fn confirm_orbits(
    cfg: &ScaffoldConfig,
    m: &MapRealization,
    variant: TargetVariant,
    seed: u64,
    trials: usize,
) -> Vec<OrbitCheck> {
    inclusions(cfg, variant)
        .par_iter()
        .enumerate()
        .map(|(i, inc)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut check = OrbitCheck {
                source: inc.source.name(),
                target: inc.target.name(),
                trials,
                failures: 0,
                first_failure: None,
            };
            for _ in 0..trials {
                let (a, b, c) = (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
                let (z, w) = inc.source.point_at(a, b, c).expect("sources are bounded");
                let (iz, iw) = m.apply(z, w);
                if !inc.target.contains(iz, iw) {
                    check.failures += 1;
                    check.first_failure.get_or_insert(OrbitFailure {
                        z,
                        w,
                        image_z: iz,
                        image_w: iw,
                    });
                }
            }
            check
        })
        .collect()
}

// Pads the box to at most 5:1 and keeps pixels square.
fn image_spec(mut bbox: Rect, width: usize, max_iter: usize) -> ImageSpec {
    let half = ((bbox.re_hi - bbox.re_lo) / 10.0).max(bbox.im_hi);
    bbox.im_lo = -half;
    bbox.im_hi = half;
    let h = width as f64 * (bbox.im_hi - bbox.im_lo) / (bbox.re_hi - bbox.re_lo);
    ImageSpec {
        bbox,
        width,
        height: (h.round() as usize).max(1),
        max_iter,
        w0: 0.0,
        first_step: 0,
    }
}

/// Every piece of the scaffold, whatever the variant.
pub fn scaffold_image(cfg: &ScaffoldConfig, width: usize) -> ImageSpec {
    image_spec(auto_bbox(cfg, TargetVariant::CommonPath), width, 0)
}

pub fn band_image(cfg: &ScaffoldConfig, variant: TargetVariant, width: usize, max_iter: usize) -> ImageSpec {
    image_spec(auto_bbox(cfg, variant), width, max_iter)
}

/// Band map with rows computed in parallel.
pub fn render_bands(m: &MapRealization, cfg: &ScaffoldConfig, spec: &ImageSpec) -> Result<Raster, CliError> {
    spec.check().map_err(|e| CliError::Config(e.to_string()))?;
    let rows = (0..spec.height)
        .into_par_iter()
        .map(|j| band_row(m, cfg, spec, j))
        .collect();
    Ok(Raster::from_rows(spec.width, rows))
}

pub fn render_scaffold(cfg: &ScaffoldConfig, spec: &ImageSpec) -> Result<Raster, CliError> {
    draw_scaffold(cfg, spec).map_err(|e| CliError::Config(e.to_string()))
}

/// Everything a full run produced, for callers that want more than files.
#[derive(Clone, Debug, Default)]
pub struct PipelineRun {
    pub report: Report,
    pub scaffold: Option<ScaffoldConfig>,
    pub checks: Option<ScaffoldChecks>,
    pub target: Option<PiecewiseTarget>,
    pub synthesis: Option<Synthesis>,
    pub map: Option<MapRealization>,
    pub certificates: Vec<InclusionCertificate>,
    pub graph: Option<PathGraph>,
    pub orbits: Vec<OrbitCheck>,
}

struct Clock(BTreeMap<String, f64>);

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let v = f();
        self.0.insert(stage.into(), t.elapsed().as_secs_f64());
        v
    }
}

/// generate → validate → nersesjan → target → synthesize → certify → graph
/// → orbits → render, writing every artifact and `report.json` under
/// `cfg.out`. The exit code is in the report.
pub fn run_pipeline(rc: &RunConfig) -> PipelineRun {
    let mut run = PipelineRun {
        report: Report::new("pipeline"),
        ..Default::default()
    };
    run.report.config = Some(rc.clone());
    let mut clock = Clock(BTreeMap::new());
    let res = stages(rc, &mut run, &mut clock);
    run.report.finish(res.err().as_ref());
    run.report.timestamp.stage_seconds = clock.0;
    if let Err(e) = write_json(&rc.out.join(files::REPORT), &run.report) {
        run.report.exit_code = e.exit_code();
        run.report.error = Some(e.to_string());
    }
    run
}

fn stages(rc: &RunConfig, run: &mut PipelineRun, clock: &mut Clock) -> Result<(), CliError> {
    let out = |f: &str| rc.out.join(f);
    let cfg = clock.time("scaffold", || match &rc.scaffold_file {
        Some(p) => load_scaffold(p),
        None => generate(&rc.scaffold),
    })?;
    write_json(&out(files::SCAFFOLD), &cfg)?;
    run.scaffold = Some(cfg.clone());

    let checks = clock.time("validate", || check_scaffold(&cfg));
    write_json(&out(files::VALIDATION), &checks.validation)?;
    write_json(&out(files::NERSESJAN), &checks.nersesjan)?;
    run.report.scaffold = Some(ScaffoldSummary::new(&checks));
    run.checks = Some(checks.clone());
    if !checks.passed() {
        return Err(CliError::Validation(format!(
            "scaffold violates {}",
            checks.failed_constraints().join(", ")
        )));
    }

    let target = build_target(&cfg, rc.variant);
    write_json(&out(files::TARGET), &target)?;
    run.target = Some(target.clone());

    let (syn, f2) = clock.time("synthesize", || {
        synthesize(&cfg, &target, rc.variant, &rc.degree_schedule, rc.density, rc.f2_slope)
    })?;
    write_json(&out(files::F1), &syn.approximant)?;
    write_json(&out(files::F2), &f2)?;
    write_json(&out(files::SYNTHESIS), &syn)?;
    run.report.synthesis = Some(SynthesisSummary::new(&syn, &f2));
    let m = MapRealization {
        f1: syn.approximant.clone(),
        f2,
        delta: cfg.delta,
    };
    run.synthesis = Some(syn);
    run.map = Some(m.clone());

    let certs = clock.time("certify", || certify_all(&cfg, &m, rc.variant, rc.budget));
    write_json(&out(files::CERTIFICATES), &certs)?;
    run.report.set_certificates(&certs);
    run.certificates = certs.clone();

    let graph = build_path_graph(&cfg, rc.variant, &certs).map_err(|e| CliError::Config(e.to_string()))?;
    write_json(&out(files::GRAPH), &graph)?;
    write_text(&out(files::GRAPH_TXT), &graph.adjacency())?;
    run.report.graph = graph.adjacency().lines().map(String::from).collect();
    run.graph = Some(graph);

    let orbits = clock.time("orbits", || confirm_orbits(&cfg, &m, rc.variant, rc.seed, ORBIT_TRIALS));
    run.report.orbits = orbits.clone();
    run.orbits = orbits.clone();

    clock.time("render", || -> Result<(), CliError> {
        write_ppm(&out(files::SCAFFOLD_PPM), &render_scaffold(&cfg, &scaffold_image(&cfg, rc.image_width))?)?;
        let spec = band_image(&cfg, rc.variant, rc.image_width, rc.max_iter);
        write_ppm(&out(files::BANDS_PPM), &render_bands(&m, &cfg, &spec)?)
    })?;

    let uncertified: Vec<String> = certs
        .iter()
        .filter(|c| c.status != CertStatus::Certified)
        .map(|c| format!("{} -> {} ({})", c.source, c.target, c.status))
        .collect();
    if !uncertified.is_empty() {
        return Err(CliError::Certification(uncertified.join(", ")));
    }
    let stray: usize = orbits.iter().map(|o| o.failures).sum();
    if stray > 0 {
        return Err(CliError::Certification(format!("{stray} sampled orbits left their target")));
    }
    Ok(())
}
