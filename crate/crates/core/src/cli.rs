//! Command-line front end. `run` is `genscene`/`import` followed by `trace`
//! and `analyze`, and writes the same bytes as running the stages by hand.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config_with_overrides, ConfigError, TraceConfig};
use crate::export::{
    load_results, write_analysis, write_trace_outputs, ExportError, RegionLayout, ResultFiles,
};
use crate::pipeline::{run_trace, run_trace_with_threads, PipelineError, ResultSet};
use crate::scene::{
    export_scene, generate_procedural_scene, import_footprints, import_scene, Scene, SceneError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_QC_FAIL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "urbanpaths",
    version,
    about = "Urban multipath channel dataset generator"
)]
pub struct Cli {
    /// Print the default configuration as YAML and exit.
    #[arg(long)]
    pub print_defaults: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a procedural scene into <out>/scenes/scene_<id>.
    Genscene(CommonArgs),
    /// Import GeoJSON building footprints into <out>/scenes/scene_<id>.
    Import {
        /// GeoJSON FeatureCollection of building polygons.
        geojson: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Trace an exported scene into <out>/raytracing_results/scene_<id>.
    Trace {
        /// Scene directory holding scene.xml.
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Rebuild statistics and heatmaps from stored results.
    Analyze {
        /// A raytracing_results/scene_<id> directory.
        results: PathBuf,
    },
    /// Scene construction, tracing and analysis in one step.
    Run {
        /// Use this scene directory instead of generating one.
        #[arg(long)]
        scene: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the default configuration as YAML.
    PrintDefaults,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// YAML configuration file; defaults apply when omitted.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Region output root.
    #[arg(short, long, default_value = "data/default")]
    pub out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dotted-path override such as `rx_grid.nx=64`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<SceneError> for CliError {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::Infeasible(_)
            | SceneError::UnknownMaterial(_)
            | SceneError::InvalidMaterial { .. } => CliError::Config(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Scene(s) => s.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn load(args: &CommonArgs) -> Result<TraceConfig, CliError> {
    let text = match &args.config {
        Some(p) => fs::read_to_string(p).map_err(|e| io_err(p, e))?,
        None => String::new(),
    };
    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    Ok(load_config_with_overrides(&text, &overrides)?)
}

fn store_scene(scene: &Scene, layout: &RegionLayout) -> Result<String, CliError> {
    let id = scene.id();
    export_scene(scene, &layout.scene_dir(&id))?;
    layout.register_scene(&id)?;
    layout.write_region_stats()?;
    Ok(id)
}

fn genscene(cfg: &TraceConfig) -> Result<Scene, CliError> {
    Ok(generate_procedural_scene(&cfg.procedural, cfg.seed)?)
}

fn import(geojson: &Path, cfg: &TraceConfig) -> Result<Scene, CliError> {
    let doc = fs::read_to_string(geojson).map_err(|e| io_err(geojson, e))?;
    let mut scene = import_footprints(&doc)?;
    scene.seed = cfg.seed;
    Ok(scene)
}

fn trace(
    scene: &Scene,
    cfg: &TraceConfig,
    args: &CommonArgs,
) -> Result<(ResultSet, ResultFiles), CliError> {
    let rs = if args.threads == 0 {
        run_trace(scene, cfg)?
    } else {
        run_trace_with_threads(scene, cfg, args.threads)?
    };
    let layout = RegionLayout::new(&args.out);
    let files = layout.results(&rs.scene_id);
    write_trace_outputs(&rs, scene, &files)?;
    layout.register_scene(&rs.scene_id)?;
    layout.write_region_stats()?;
    for e in &rs.degradation_log {
        eprintln!(
            "batch {} exceeded its time budget after {:.3} s: depth {} -> {}",
            e.batch_index, e.elapsed_s, e.old_depth, e.new_depth
        );
    }
    Ok((rs, files))
}

fn qc_code(rs: &ResultSet) -> i32 {
    if rs.qc.passed {
        EXIT_OK
    } else {
        eprintln!(
            "QC failed: outdoor fraction {:.4} below {:.4}; outputs kept",
            rs.qc.outdoor_fraction, rs.config.min_outdoor_fraction
        );
        EXIT_QC_FAIL
    }
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::PrintDefaults => {
            print!("{}", TraceConfig::default().to_yaml());
            Ok(EXIT_OK)
        }
        Command::Genscene(args) => {
            let cfg = load(&args)?;
            let id = store_scene(&genscene(&cfg)?, &RegionLayout::new(&args.out))?;
            println!("{id}");
            Ok(EXIT_OK)
        }
        Command::Import { geojson, common } => {
            let cfg = load(&common)?;
            let id = store_scene(&import(&geojson, &cfg)?, &RegionLayout::new(&common.out))?;
            println!("{id}");
            Ok(EXIT_OK)
        }
        Command::Trace { scene, common } => {
            let cfg = load(&common)?;
            let scene = import_scene(&scene)?;
            let (rs, files) = trace(&scene, &cfg, &common)?;
            println!("{}", files.dir.display());
            Ok(qc_code(&rs))
        }
        Command::Analyze { results } => {
            let rs = load_results(&results)?;
            write_analysis(&rs, &ResultFiles::new(&results))?;
            println!("{}", results.display());
            Ok(EXIT_OK)
        }
        Command::Run { scene, common } => {
            let cfg = load(&common)?;
            let layout = RegionLayout::new(&common.out);
            let scene = match scene {
                Some(dir) => import_scene(&dir)?,
                None => genscene(&cfg)?,
            };
            store_scene(&scene, &layout)?;
            let (rs, files) = trace(&scene, &cfg, &common)?;
            write_analysis(&rs, &files)?;
            println!(
                "{}: {} outdoor receivers, {} paths, {} degradation events",
                rs.scene_id,
                rs.outdoor_count(),
                rs.path_count(),
                rs.degradation_log.len()
            );
            Ok(qc_code(&rs))
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let command = match (cli.print_defaults, cli.command) {
        (true, _) => Command::PrintDefaults,
        (false, Some(c)) => c,
        (false, None) => {
            eprintln!("no command given; see --help");
            return EXIT_CONFIG;
        }
    };
    match execute(command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}
