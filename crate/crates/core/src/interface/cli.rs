use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::aesthetics::{assess_detailed, HeuristicModel};
use crate::error::{Error, Result};
use crate::optimize::{Optimizer, Stages};
use crate::postproc::{deflicker, flicker_index_with, read_output, write_output, DeflickerConfig, DeflickerMethod};
use crate::render::{render_sequence, RenderSettings};
use crate::robotplan::{compile_plan, serialize_plan, DEFAULT_WAYPOINTS};
use crate::scene::{load_scene_file, serialize_scene, GeoReference};

use super::{default_params, default_space, load_params_file, load_scene_or_sibling, load_space_file, params_json, SCENE_FILE};

#[derive(Parser, Debug)]
#[command(name = "chronolapse", version, about = "Plan, render and export time-lapse shots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for shooting parameters and write them as JSON.
    Plan(PlanArgs),
    /// Render a planned sequence to PNG frames plus a manifest.
    Render(RenderArgs),
    /// Remove exposure flicker from a rendered sequence.
    Deflicker(DeflickerArgs),
    /// Print the score report of a rendered sequence.
    Assess(AssessArgs),
    /// Compile parameters into a robot plan.
    Export(ExportArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct SceneArg {
    #[arg(long, env = "CHRONO_SCENE")]
    scene: PathBuf,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[command(flatten)]
    scene: SceneArg,
    /// Search space file; a built-in space is used when omitted.
    #[arg(long)]
    space: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stages to search, e.g. `ivt`, `iv` or `-` for none.
    #[arg(long, default_value = "ivt")]
    stages: String,
    /// Output file for the parameters; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output file for the optimization report; printed to stderr when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    scene: SceneArg,
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 640)]
    width: u32,
    #[arg(long, default_value_t = 360)]
    height: u32,
    /// Log-normal auto-exposure error; 0 disables flicker.
    #[arg(long, default_value_t = 0.1)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_shadows: bool,
}

#[derive(Args, Debug)]
struct DeflickerArgs {
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "gain_match")]
    method: MethodArg,
    #[arg(long, default_value_t = 5)]
    window: usize,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum MethodArg {
    GainMatch,
    Histeq,
    Both,
}

impl From<MethodArg> for DeflickerMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::GainMatch => DeflickerMethod::GainMatch,
            MethodArg::Histeq => DeflickerMethod::Histeq,
            MethodArg::Both => DeflickerMethod::Both,
        }
    }
}

#[derive(Args, Debug)]
struct AssessArgs {
    #[arg(long)]
    frames: PathBuf,
    /// Scene file; defaults to the copy stored with the frames.
    #[arg(long)]
    scene: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    scene: SceneArg,
    #[arg(long)]
    params: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    lat0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lon0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alt0: Option<f64>,
    #[arg(long)]
    heading: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_WAYPOINTS)]
    waypoints: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[command(flatten)]
    scene: SceneArg,
    #[arg(long, env = "CHRONO_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Initial parameters; derived from the scene when omitted.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    space: Option<PathBuf>,
    /// Directory of static files served at `/`.
    #[arg(long = "static")]
    static_dir: Option<PathBuf>,
    /// Where time-lapse jobs write their frames.
    #[arg(long, default_value = "chronolapse-out")]
    out_dir: PathBuf,
}

/// Runs the command line. Returns the process exit code: 0 on success,
/// 2 for usage errors and 1 for anything that fails afterwards.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Plan(a) => plan(a),
        Command::Render(a) => render(a),
        Command::Deflicker(a) => run_deflicker(a),
        Command::Assess(a) => assess(a),
        Command::Export(a) => export(a),
        Command::Serve(a) => run_serve(a),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn plan(a: PlanArgs) -> Result<()> {
    let scene = load_scene_file(&a.scene.scene)?;
    let space = match &a.space {
        Some(p) => load_space_file(p)?,
        None => default_space(),
    };
    let stages = Stages::parse(&a.stages)?;
    let optimizer = Optimizer::new(&scene, &space, &HeuristicModel)?;
    let (params, report) = optimizer.run(stages, a.seed, &mut |_| {})?;
    let report_text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &a.out {
        Some(p) => write_text(p, &params_json(&params))?,
        None => print!("{}", params_json(&params)),
    }
    match &a.report {
        Some(p) => write_text(p, &report_text)?,
        None => eprint!("{report_text}"),
    }
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let scene = load_scene_file(&a.scene.scene)?;
    let params = load_params_file(&a.params, &scene)?;
    let settings = RenderSettings {
        shadows: !a.no_shadows,
        ..RenderSettings::final_output(a.jitter, a.seed).with_size(a.width, a.height)
    };
    let seq = render_sequence(&scene, &params, &settings)?;
    write_output(&seq, &a.out)?;
    write_text(&a.out.join(SCENE_FILE), &(serialize_scene(&scene) + "\n"))?;
    println!("wrote {} frames to {}", seq.frames.len(), a.out.display());
    Ok(())
}

fn run_deflicker(a: DeflickerArgs) -> Result<()> {
    let seq = read_output(&a.frames)?;
    let config = DeflickerConfig {
        window: a.window,
        method: a.method.into(),
        ..DeflickerConfig::default()
    };
    let out = deflicker(&seq, &config)?;
    write_output(&out, &a.out)?;
    let scene_src = a.frames.join(SCENE_FILE);
    if scene_src.exists() {
        let dst = a.out.join(SCENE_FILE);
        std::fs::copy(&scene_src, &dst).map_err(|e| Error::io(&dst, e))?;
    }
    let summary = serde_json::json!({
        "frames": out.frames.len(),
        "flicker_before": flicker_index_with(&seq, a.window)?,
        "flicker_after": flicker_index_with(&out, a.window)?,
    });
    println!("{summary}");
    Ok(())
}

fn assess(a: AssessArgs) -> Result<()> {
    let seq = read_output(&a.frames)?;
    let scene = load_scene_or_sibling(a.scene.as_deref(), &a.frames)?;
    let report = assess_detailed(&HeuristicModel, &seq, &scene)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}

fn export(a: ExportArgs) -> Result<()> {
    let scene = load_scene_file(&a.scene.scene)?;
    let params = load_params_file(&a.params, &scene)?;
    let g = scene.georef;
    let georef = GeoReference {
        lat0: a.lat0.unwrap_or(g.lat0),
        lon0: a.lon0.unwrap_or(g.lon0),
        alt0: a.alt0.unwrap_or(g.alt0),
        heading_deg: a.heading.unwrap_or(g.heading_deg),
    };
    let plan = compile_plan(&scene, &params, &georef, a.waypoints)?;
    let text = serialize_plan(&plan);
    match &a.out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_serve(a: ServeArgs) -> Result<()> {
    let scene = load_scene_file(&a.scene.scene)?;
    let space = match &a.space {
        Some(p) => load_space_file(p)?,
        None => default_space(),
    };
    let params = match &a.params {
        Some(p) => load_params_file(p, &scene)?,
        None => default_params(&scene, &space)?,
    };
    let session = super::Session::new(scene, params, space, a.out_dir);
    let addr = SocketAddr::new(a.host, a.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
    runtime
        .block_on(super::serve(session, addr, a.static_dir))
        .map_err(|e| Error::io(addr.to_string(), e))
}
