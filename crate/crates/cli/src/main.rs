use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use toric_morse::compose::TreeTrace;
use toric_morse::morse::Rejection;
use toric_morse::par::Exec;
use toric_morse::{svg, verify_all, BundleClass, Composer, CompositionEntry, Geometry, HomSpace, Level, MorseEngine, PolySurface, Preset, SurfaceConfig};

/// Weighted Morse homotopy on moment polytopes of toric Fano surfaces.
///
/// Parallelism follows RAYON_NUM_THREADS.
#[derive(Parser, Debug)]
#[command(name = "toric-morse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generators of the morphism space between two line bundles.
    Homs {
        #[command(flatten)]
        run: RunArgs,
        /// Source bundle, e.g. `0,0,0`.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        /// Target bundle, e.g. `0,-1,1`.
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        /// Every ordered pair of a collection instead of `--from/--to`.
        #[arg(long)]
        collection: Option<String>,
    },
    /// Composition table of a collection with exact weights.
    Compose {
        #[command(flatten)]
        run: RunArgs,
        /// `preset` or a JSON file holding a list of bundle vectors.
        #[arg(long, default_value = "preset")]
        collection: String,
    },
    /// Dimension match, functoriality, exceptionality and associativity.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "preset")]
        collection: String,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Preset surface: bl2, bl3, cp2, p1p1, f1.
    #[arg(long, conflicts_with = "config")]
    surface: Option<String>,
    /// JSON surface description with weighted factor polygons.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for SVG figures.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    /// Run every stage on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<toric_morse::Error> for CliError {
    fn from(e: toric_morse::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn surface(run: &RunArgs) -> Result<PolySurface, CliError> {
    match (&run.surface, &run.config) {
        (Some(name), None) => Preset::parse(name).map(PolySurface::preset).ok_or_else(|| CliError::Usage(format!("unknown surface `{name}`"))),
        (None, Some(path)) => Ok(SurfaceConfig::from_json(&fs::read_to_string(path)?)?.build()?),
        _ => Err(CliError::Usage("give exactly one of --surface or --config".into())),
    }
}

fn engine(run: &RunArgs) -> Result<MorseEngine, CliError> {
    let exec = if run.sequential { Exec::Sequential } else { Exec::Auto };
    Ok(MorseEngine::with_exec(Geometry::new(surface(run)?), exec))
}

fn bundle(s: &str, m: &MorseEngine) -> Result<BundleClass, CliError> {
    let b = BundleClass::parse(s).ok_or_else(|| CliError::Usage(format!("cannot parse bundle `{s}`")))?;
    m.geom.surface.check_bundle(&b)?;
    Ok(b)
}

fn collection(source: &str, m: &MorseEngine) -> Result<Vec<BundleClass>, CliError> {
    if source == "preset" {
        return Ok(m.geom.surface.exceptional_collection()?);
    }
    let raw: Vec<Vec<i64>> = serde_json::from_str(&fs::read_to_string(source)?).map_err(|e| CliError::Usage(format!("collection file: {e}")))?;
    let coll: Vec<BundleClass> = raw.into_iter().map(BundleClass).collect();
    for b in &coll {
        m.geom.surface.check_bundle(b)?;
    }
    Ok(coll)
}

fn write_svg(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)?;
    Ok(())
}

fn file_tag(b: &BundleClass) -> String {
    b.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("_")
}

fn print_hom(m: &MorseEngine, h: &HomSpace) {
    println!("Hom({}, {})  difference {}  dim {}", h.from, h.to, h.diff, h.dim());
    for g in &h.generators {
        println!("  generator  I=({},{})  {}  degree {}", g.i.0, g.i.1, g.carrier.name(&m.geom), g.degree);
    }
    for r in &h.rejected {
        let why = r.rejection.map(|x: Rejection| x.to_string()).unwrap_or_default();
        println!("  rejected   I=({},{})  {}  degree {}  {}", r.i.0, r.i.1, r.carrier.name(&m.geom), r.degree, why);
    }
    for w in &h.warnings {
        println!("  warning    {w}");
    }
}

fn weight_text(e: &CompositionEntry) -> String {
    match (&e.weight, &e.kappa) {
        (Some(w), Some(k)) => format!("{w} (kappa = {k})  {:.12}", e.weight_float),
        (None, Some(Level::Approx(k))) => format!("exp(-{k:.12})  {:.12}", e.weight_float),
        _ => "0".into(),
    }
}

fn tree_text(t: &Option<TreeTrace>) -> String {
    match t {
        Some(TreeTrace::Trivial { .. }) => "trivial".into(),
        Some(TreeTrace::Traced { leaves, root, .. }) => {
            let legs: Vec<String> = leaves.iter().map(|l| format!("{} along {} ({:.4},{:.4})→({:.4},{:.4})", l.source, l.face, l.start[0], l.start[1], l.end[0], l.end[1])).collect();
            format!("{} meeting at ({:.4},{:.4})", legs.join(", "), root[0], root[1])
        }
        Some(TreeTrace::NotFound(why)) => format!("tree not found: {why}"),
        None => "-".into(),
    }
}

fn homs(run: RunArgs, from: Option<String>, to: Option<String>, coll: Option<String>) -> Result<(), CliError> {
    let m = engine(&run)?;
    let spaces: Vec<HomSpace> = match (from, to, coll) {
        (Some(a), Some(b), None) => vec![m.hom_space(&bundle(&a, &m)?, &bundle(&b, &m)?)?],
        (None, None, Some(c)) => m.hom_table(&collection(&c, &m)?)?.into_iter().flatten().collect(),
        _ => return Err(CliError::Usage("give --from and --to, or --collection".into())),
    };
    match run.format {
        Format::Text => spaces.iter().for_each(|h| print_hom(&m, h)),
        Format::Json => {
            let v: Vec<_> = spaces.iter().map(|h| h.to_json(&m.geom)).collect();
            println!("{}", serde_json::to_string_pretty(&if v.len() == 1 { v[0].clone() } else { json!(v) }).unwrap());
        }
        Format::Svg => {
            let dir = run.svg_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            for h in &spaces {
                let name = format!("hom_{}__{}.svg", file_tag(&h.from), file_tag(&h.to));
                write_svg(&dir, &name, &svg::hom_figure(&m.geom, h))?;
                println!("{}", dir.join(name).display());
            }
        }
    }
    Ok(())
}

fn compose(run: RunArgs, coll: String) -> Result<(), CliError> {
    let m = engine(&run)?;
    let coll = collection(&coll, &m)?;
    let composer = Composer::new(&m);
    let tables = composer.compose_table(&coll)?;
    match run.format {
        Format::Json => {
            let v: Vec<_> = tables.iter().map(|t| t.to_json(&m)).collect();
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Text | Format::Svg => {
            for t in &tables {
                println!("{} → {} → {}", t.triple[0], t.triple[1], t.triple[2]);
                for e in &t.entries {
                    let target = e.target.map(|k| format!("V({},{})", k.0, k.1)).unwrap_or_else(|| "0".into());
                    println!("  Z({},{}) ⊗ W({},{}) ↦ {}  weight {}  tree: {}", e.i.0, e.i.1, e.j.0, e.j.1, target, weight_text(e), tree_text(&e.tree));
                }
            }
        }
    }
    let dir = match (&run.svg_dir, run.format) {
        (Some(d), _) => Some(d.clone()),
        (None, Format::Svg) => Some(PathBuf::from(".")),
        _ => None,
    };
    if let Some(dir) = dir {
        for t in &tables {
            let h = |a: usize, b: usize| m.hom_space(&coll[t.indices[a]], &coll[t.indices[b]]);
            let body = svg::triple_figure(&m.geom, t, &h(0, 1)?, &h(1, 2)?, &h(0, 2)?);
            let name = format!("compose_{}_{}_{}.svg", t.indices[0], t.indices[1], t.indices[2]);
            write_svg(&dir, &name, &body)?;
        }
    }
    Ok(())
}

fn verify(run: RunArgs, coll: String) -> Result<(), CliError> {
    let m = engine(&run)?;
    let coll = collection(&coll, &m)?;
    let report = verify_all(&m, &coll)?;
    match run.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap()),
        _ => {
            let line = |name: &str, ok: bool, n: usize| println!("{:<16} {}  ({n} checks)", name, if ok { "PASS" } else { "FAIL" });
            line("dimension match", report.dims_ok(), report.dims.len());
            line("functoriality", report.weights_ok(), report.weights.len());
            line("exceptionality", report.exceptional_ok(), report.exceptional.len());
            line("associativity", report.associativity_ok(), report.associativity.len());
            for w in &report.warnings {
                println!("warning: {w}");
            }
        }
    }
    match report.first_failure() {
        Some(f) => Err(CliError::Verify(f)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Homs { run, from, to, collection } => homs(run, from, to, collection),
        Command::Compose { run, collection } => compose(run, collection),
        Command::Verify { run, collection } => verify(run, collection),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
