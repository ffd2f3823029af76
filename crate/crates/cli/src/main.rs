//! quadbubble: construct, check, certify, solve, enumerate and render
//! planar bubble clusters.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quadbubble_core::certificates::{check_ledger, Precision};
use quadbubble_core::cluster::Cluster;
use quadbubble_core::constructors::{
    make_competitor, make_double_bubble, make_flower_symmetric, make_sandwich, make_triple_bubble, COMPETITOR_X,
    COMPETITOR_Y,
};
use quadbubble_core::render::{render_svg, RenderOptions};
use quadbubble_core::solver::{
    asymmetry_scan, flower_initial_guess, sandwich_initial_guess, solve_flower_equal_areas, solve_sandwich_equal_areas,
    SolveResult,
};
use quadbubble_core::topology::{enumerate_topologies, PredicateSet};

/// Write to stdout; a closed pipe (`quadbubble ... | head`) ends the process quietly.
fn emit(args: std::fmt::Arguments) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().write_fmt(args) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(1);
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(format_args!("{}\n", format_args!($($t)*))) };
}

#[derive(Parser, Debug)]
#[command(name = "quadbubble", version, about = "Planar bubble clusters: geometry, certificates, topology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify the constant ledger with outward-rounded interval arithmetic.
    VerifyConstants {
        /// Emit the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
        /// Working precision in bits (53 = hardware doubles).
        #[arg(long, default_value_t = 53)]
        precision: u32,
    },
    /// Build a named cluster and write it as JSON.
    Construct {
        #[command(subcommand)]
        shape: Shape,
        /// Output file; stdout when omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Report stationarity, turning-angle and pressure-formula residuals.
    Check {
        file: PathBuf,
        /// Tolerance for the stationarity verdict.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Solve the equal-area problems and the asymmetry scan.
    Solve {
        #[command(subcommand)]
        problem: Problem,
        /// Also write the results as CSV.
        #[arg(long, global = true)]
        csv: Option<PathBuf>,
    },
    /// Enumerate cluster topologies up to relabelling.
    Enumerate {
        /// Number of bounded regions N.
        #[arg(long)]
        regions: usize,
        /// Number of bounded components M.
        #[arg(long)]
        components: usize,
        /// Predicate preset: paper, base or none.
        #[arg(long, default_value = "paper")]
        preset: String,
        /// Write every included and excluded signature as JSON lines.
        #[arg(long)]
        jsonl: Option<PathBuf>,
    },
    /// Draw a cluster JSON file as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Label each component with its region and pressure.
        #[arg(long)]
        labels: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Shape {
    /// Standard double bubble with outer radii r1 >= r2.
    DoubleBubble {
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
        #[arg(long, default_value_t = 1.0)]
        r2: f64,
    },
    /// Symmetric standard triple bubble.
    TripleBubble {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// The explicit non-stationary competitor.
    Competitor {
        #[arg(long, default_value_t = COMPETITOR_X)]
        x: f64,
        #[arg(long, default_value_t = COMPETITOR_Y)]
        y: f64,
    },
    /// Double bubble with a triangle grown at each vertex.
    Sandwich(SandwichArgs),
    /// Triple bubble with a triangle grown at the centre.
    Flower {
        /// Pressure of the central triangle.
        #[arg(long, default_value_t = flower_initial_guess()[0])]
        pc: f64,
        /// Pressure of the three outer regions.
        #[arg(long, default_value_t = flower_initial_guess()[1])]
        po: f64,
    },
}

#[derive(Args, Debug)]
struct SandwichArgs {
    #[arg(long, default_value_t = sandwich_initial_guess()[0])]
    r1: f64,
    #[arg(long, default_value_t = sandwich_initial_guess()[0])]
    r2: f64,
    #[arg(long, default_value_t = sandwich_initial_guess()[1])]
    r3: f64,
    #[arg(long, default_value_t = sandwich_initial_guess()[1])]
    r4: f64,
}

#[derive(Subcommand, Debug)]
enum Problem {
    /// Four equal unit areas in the sandwich family.
    Sandwich {
        /// Impose r1 = r2 and r3 = r4.
        #[arg(long)]
        symmetric: bool,
        /// Write the solved cluster as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four equal unit areas in the symmetric flower family.
    Flower {
        /// Write the solved cluster as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Asymmetric sandwiches at the given r1/r2 ratios.
    Scan {
        #[arg(long, value_delimiter = ',', default_value = "1,1.05,1.1,1.2,1.3,1.5")]
        ratios: Vec<f64>,
    },
}

/// The 12-significant-digit style used for every number printed.
fn g12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{v:.11e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{exp}")
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Cluster, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Cluster::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn verify_constants(json: bool, bits: u32) -> Result<u8, String> {
    let report = check_ledger(Precision::from_bits(bits));
    if json {
        outln!("{}", report.to_json());
    } else {
        out!("{}", with_newline(report.to_text()));
        for f in report.cosmetic_findings() {
            eprintln!("cosmetic finding: {} {}", f.name, f.status.as_str());
        }
        for f in report.essential_findings() {
            eprintln!("essential finding: {} {}", f.name, f.status.as_str());
        }
    }
    Ok(report.exit_code() as u8)
}

fn construct(shape: &Shape, out: Option<&Path>) -> Result<u8, String> {
    let c = match shape {
        Shape::DoubleBubble { r1, r2 } => make_double_bubble(*r1, *r2),
        Shape::TripleBubble { r } => make_triple_bubble(*r),
        Shape::Competitor { x, y } => make_competitor(*x, *y),
        Shape::Sandwich(a) => make_sandwich(a.r1, a.r2, a.r3, a.r4),
        Shape::Flower { pc, po } => make_flower_symmetric(*pc, *po),
    }
    .map_err(|e| e.to_string())?;
    write_or_print(out, &with_newline(c.to_json()))?;
    Ok(0)
}

fn check(path: &Path, tol: f64, json: bool) -> Result<u8, String> {
    let c = load(path)?;
    let rep = c.check_stationary(tol).map_err(|e| format!("{}: {e}", path.display()))?;
    if json {
        let v = serde_json::json!({
            "stationary": rep.passes(),
            "report": rep,
            "areas": c.areas(),
            "perimeter": c.perimeter(),
        });
        outln!("{}", serde_json::to_string_pretty(&v).map_err(|e| e.to_string())?);
        return Ok(0);
    }
    let verdict = if rep.passes() { "PASS" } else { "FAIL" };
    outln!("stationarity {verdict} (tol {})", g12(tol));
    outln!("  max angle residual        {}", g12(rep.max_angle_residual));
    outln!("  max curvature residual    {}", g12(rep.max_curvature_residual));
    outln!("  max vertex curvature sum  {}", g12(rep.max_vertex_curvature_sum));
    let source = if rep.pressures_assigned { "assigned" } else { "least squares" };
    outln!("pressures ({source})");
    for (id, p) in &rep.pressures {
        outln!("  E{id}  {}", g12(*p));
    }
    outln!("turning-angle residuals");
    for (f, r) in rep.turning_residuals.iter().enumerate() {
        outln!("  face {f} (E{})  {}", c.faces()[f].region, g12(*r));
    }
    outln!("pressure-formula residual {}", g12(rep.pressure_formula_residual));
    outln!("areas");
    for (id, a) in c.areas() {
        outln!("  E{id}  {}", g12(a));
    }
    outln!("perimeter {}", g12(c.perimeter()));
    Ok(0)
}

fn print_solve(r: &SolveResult) {
    outln!("converged {} after {} iterations", r.converged, r.iterations);
    outln!("parameters {}", r.radii.iter().map(|v| g12(*v)).collect::<Vec<_>>().join(" "));
    outln!("region  area  pressure");
    for (id, a) in &r.areas {
        let p = r.pressures.get(id).copied().unwrap_or(f64::NAN);
        outln!("  E{id}  {}  {}", g12(*a), g12(p));
    }
    outln!("perimeter {}", g12(r.perimeter));
    outln!(
        "residuals area {}  stationarity {}  pressure-formula {}  turning {}",
        g12(r.residuals.area),
        g12(r.residuals.stationarity),
        g12(r.residuals.pressure_formula),
        g12(r.residuals.turning)
    );
}

fn solve_csv(r: &SolveResult, path: &Path) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    let err = |e: csv::Error| e.to_string();
    w.write_record(["region", "area", "pressure"]).map_err(err)?;
    for (id, a) in &r.areas {
        let p = r.pressures.get(id).copied().unwrap_or(f64::NAN);
        w.write_record([id.to_string(), g12(*a), g12(p)]).map_err(err)?;
    }
    w.flush().map_err(|e| e.to_string())
}

fn solve(problem: &Problem, csv_path: Option<&Path>) -> Result<u8, String> {
    match problem {
        Problem::Sandwich { symmetric, out } => {
            let r = solve_sandwich_equal_areas(*symmetric).map_err(|e| e.to_string())?;
            finish_solve(&r, out.as_deref(), csv_path)
        }
        Problem::Flower { out } => {
            let r = solve_flower_equal_areas().map_err(|e| e.to_string())?;
            finish_solve(&r, out.as_deref(), csv_path)
        }
        Problem::Scan { ratios } => {
            let rows = asymmetry_scan(ratios);
            let header = ["ratio", "r1", "r2", "r3", "dA", "perimeter", "converged", "iterations"];
            let records: Vec<[String; 8]> = rows
                .iter()
                .map(|r| {
                    [
                        g12(r.ratio),
                        g12(r.r1),
                        g12(r.r2),
                        g12(r.r3),
                        g12(r.d_area),
                        g12(r.perimeter),
                        r.converged.to_string(),
                        r.iterations.to_string(),
                    ]
                })
                .collect();
            outln!("{}", header.join("  "));
            for (rec, row) in records.iter().zip(&rows) {
                match &row.error {
                    Some(e) => outln!("{}  ({e})", rec.join("  ")),
                    None => outln!("{}", rec.join("  ")),
                }
            }
            if let Some(path) = csv_path {
                let mut w =
                    csv::Writer::from_path(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                w.write_record(header).map_err(|e| e.to_string())?;
                for rec in &records {
                    w.write_record(rec).map_err(|e| e.to_string())?;
                }
                w.flush().map_err(|e| e.to_string())?;
            }
            Ok(if rows.iter().all(|r| r.converged) { 0 } else { 1 })
        }
    }
}

fn finish_solve(r: &SolveResult, out: Option<&Path>, csv_path: Option<&Path>) -> Result<u8, String> {
    print_solve(r);
    if let Some(p) = out {
        write_or_print(Some(p), &with_newline(r.cluster.to_json()))?;
    }
    if let Some(p) = csv_path {
        solve_csv(r, p)?;
    }
    Ok(if r.converged { 0 } else { 1 })
}

fn enumerate(n: usize, m: usize, preset: &str, jsonl: Option<&Path>) -> Result<u8, String> {
    let preds = PredicateSet::preset(preset)
        .ok_or_else(|| format!("unknown preset {preset:?} (expected paper, base or none)"))?;
    let e = enumerate_topologies(n, m, &preds).map_err(|e| e.to_string())?;
    outln!("{} signatures ({} excluded) for N = {n}, M = {m}, preset {preset}", e.included.len(), e.excluded.len());
    for entry in &e.included {
        outln!("{}", entry.signature.as_str());
    }
    if let Some(path) = jsonl {
        let mut text = String::new();
        for entry in e.included.iter().chain(&e.excluded) {
            text.push_str(&entry.to_json_line());
            text.push('\n');
        }
        write_or_print(Some(path), &text)?;
    }
    Ok(0)
}

fn render(path: &Path, out: &Path, labels: bool) -> Result<u8, String> {
    let c = load(path)?;
    let svg = render_svg(&c, &RenderOptions { labels, ..RenderOptions::default() });
    write_or_print(Some(out), &svg)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::VerifyConstants { json, precision } => verify_constants(*json, *precision),
        Command::Construct { shape, out } => construct(shape, out.as_deref()),
        Command::Check { file, tol, json } => check(file, *tol, *json),
        Command::Solve { problem, csv } => solve(problem, csv.as_deref()),
        Command::Enumerate { regions, components, preset, jsonl } => {
            enumerate(*regions, *components, preset, jsonl.as_deref())
        }
        Command::Render { file, out, labels } => render(file, out, *labels),
    }
}

fn main() -> ExitCode {
    // Usage errors are invalid input (exit 1); clap's own default would be 2,
    // which is reserved for cosmetic-only findings.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
