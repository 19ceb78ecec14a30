//! `coamoeba` command-line tool.
//!
//! Exit codes: 0 success, 1 internal consistency or oracle failure,
//! 2 invalid input.

mod batch;
mod render;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coamoeba_core::coamoeba::arrangement;
use coamoeba_core::cubical::{build_complex, default_resolution, verify, VerifyOptions};
use coamoeba_core::exactmath::{snf, IntMatrix};
use coamoeba_core::homology::{analyze_model, AnalysisReport};
use coamoeba_core::model::{normalize, PolynomialSpec};
use coamoeba_core::Error;

#[derive(Parser, Debug)]
#[command(name = "coamoeba", version, about = "Topology of coamoebae of simplicial real polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one polynomial spec (JSON file, or `-` for stdin).
    Analyze(AnalyzeArgs),
    /// Run the independent oracles and compare with the closed forms.
    Verify(VerifyArgs),
    /// Draw a two-variable coamoeba as SVG.
    Render(RenderArgs),
    /// Summarize a JSON-lines corpus as a TSV table.
    Batch(BatchArgs),
    /// Smith normal form of an integer matrix (inline JSON or file path).
    Snf(SnfArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    input: PathBuf,
    /// JSON report (default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Plain-text summary.
    #[arg(long)]
    text: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    input: PathBuf,
    /// Grid resolution: one value for every axis or a comma-separated list.
    /// Defaults to 16 cells per unit length of the reduced lattice basis
    /// (12 for n = 3).
    #[arg(long, value_delimiter = ',')]
    resolution: Option<Vec<usize>>,
    /// Only the algebraic oracles (rank comparison, membership sampling).
    #[arg(long)]
    skip_cubical: bool,
    /// Do not repeat the grid computation at twice the resolution.
    #[arg(long)]
    no_doubling: bool,
    /// Random points for the membership comparison.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Include wall-clock timings in the record.
    #[arg(long)]
    timings: bool,
    /// Write the kept cubical complex as a cell list.
    #[arg(long, value_name = "PATH")]
    dump_complex: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    input: PathBuf,
    /// Output SVG path (stdout when omitted).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Mark the zonotope centers.
    #[arg(long)]
    show_centers: bool,
    /// Draw arrows α → c(α) for the conjugation action.
    #[arg(long)]
    show_conjugation: bool,
    /// Side length of the square in pixels.
    #[arg(long, default_value_t = 480)]
    size: u32,
}

#[derive(Args, Debug)]
struct BatchArgs {
    corpus: PathBuf,
    /// Output TSV path (stdout when omitted).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SnfArgs {
    /// Matrix as JSON rows, e.g. `[[2,1],[1,2]]`, or a file containing it.
    matrix: String,
}

/// Failure of a command: either an error from the library or an oracle
/// disagreement, with the exit code it maps to.
enum Failure {
    Lib(Error),
    Io(String),
    Disagreement,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn read_spec(path: &Path) -> Result<PolynomialSpec, Failure> {
    Ok(PolynomialSpec::from_json(&read_input(path)?)?)
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn text_report(r: &AnalysisReport) -> String {
    let signs: Vec<&str> = r
        .model
        .epsilon
        .iter()
        .map(|s| if s.as_i8() > 0 { "+" } else { "-" })
        .collect();
    let p = &r.partition;
    let mut lines = vec![
        format!("n                      {}", r.model.n),
        format!("A                      {}", r.model.a),
        format!("epsilon                ({})", signs.join(", ")),
        format!("D                      ({})", join(&r.snf.d, ", ")),
        format!(
            "partition              I00={:?} I10={:?} I01={:?} I11={:?}",
            p.i00, p.i10, p.i01, p.i11
        ),
        format!("betti                  [{}] (total {})", join(&r.homology.betti, ", "), r.homology.total),
        format!("rank(1+c*)             {} (assembled {})", r.rank_closed, r.rank_assembled),
        format!("fixed zonotopes        {}", r.fixed_point_count),
        format!("quadrant mask          {:?}", r.real_part.quadrant_mask),
        format!("real components        {}", r.real_part.component_count),
        format!("all quadrants hit      {}", r.real_part.all_quadrants_hit),
        format!("rank2(A)               {} (n - rank2 = {})", r.rank2_a, r.n_minus_rank2_a),
        format!("ker/im dimension       {}", r.kernel_mod_image_dim),
        format!("defect                 {}", r.defect),
        format!("galois maximal         {}", r.galois_maximal_coamoeba),
        format!(
            "galois maximal (CX)    {} [{}]",
            r.galois_maximal_cx.value, r.galois_maximal_cx.condition
        ),
    ];
    lines.push(String::new());
    lines.join("\n")
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let spec = read_spec(&args.input)?;
    let report = analyze_model(&normalize(&spec)?)?;
    let out = if args.text { text_report(&report) } else { to_json(&report) };
    write_output(None, &out)
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let spec = read_spec(&args.input)?;
    let model = normalize(&spec)?;
    let resolution = match &args.resolution {
        None => None,
        Some(r) if r.len() == 1 => Some(vec![r[0]; model.n]),
        Some(r) if r.len() == model.n => Some(r.clone()),
        Some(r) => {
            return Err(Error::InvalidInput(format!(
                "resolution has {} values for n = {}",
                r.len(),
                model.n
            ))
            .into())
        }
    };
    let opts = VerifyOptions {
        resolution: resolution.clone(),
        skip_cubical: args.skip_cubical,
        check_doubled: !args.no_doubling,
        membership_samples: args.samples,
        seed: args.seed,
        record_timings: args.timings,
    };
    let record = verify(&model, spec.id.clone(), &opts)?;
    if let Some(path) = &args.dump_complex {
        if args.skip_cubical {
            return Err(Error::InvalidInput("--dump-complex needs the cubical oracle".into()).into());
        }
        let dec = snf(&model.a)?;
        let arr = arrangement(&model, &dec)?;
        let m = match resolution {
            Some(m) => m,
            None => default_resolution(&arr)?,
        };
        let complex = build_complex(&arr, &m)?;
        write_output(Some(path), &complex.to_cell_list())?;
    }
    write_output(None, &to_json(&record))?;
    if record.all_agree {
        Ok(())
    } else {
        for d in &record.disagreements {
            eprintln!("disagreement: {d}");
        }
        Err(Failure::Disagreement)
    }
}

fn cmd_render(args: &RenderArgs) -> Result<(), Failure> {
    let spec = read_spec(&args.input)?;
    let model = normalize(&spec)?;
    let svg = render::render_svg(
        &model,
        &render::RenderOptions {
            size: args.size,
            show_centers: args.show_centers,
            show_conjugation: args.show_conjugation,
        },
    )?;
    write_output(args.output.as_deref(), &svg)
}

fn cmd_batch(args: &BatchArgs) -> Result<(), Failure> {
    let text = read_input(&args.corpus)?;
    let table = batch::run(&text);
    write_output(args.output.as_deref(), &table.tsv)?;
    if table.rows > 0 && table.failures == table.rows {
        eprintln!("all {} lines failed", table.rows);
        return Err(if table.internal_failures > 0 {
            Failure::Disagreement
        } else {
            Failure::Lib(Error::InvalidInput("every corpus line is invalid".into()))
        });
    }
    Ok(())
}

fn parse_matrix(text: &str) -> Result<IntMatrix, Failure> {
    let rows: Vec<Vec<i64>> = serde_json::from_str(text.trim())
        .map_err(|e| Error::InvalidInput(format!("matrix JSON: {e}")))?;
    Ok(IntMatrix::from_rows(&rows)?)
}

fn cmd_snf(args: &SnfArgs) -> Result<(), Failure> {
    let arg = args.matrix.trim();
    let text = if arg.starts_with('[') {
        arg.to_string()
    } else {
        read_input(Path::new(arg))?
    };
    let dec = snf(&parse_matrix(&text)?)?;
    let v = serde_json::to_value(&dec).expect("serializes");
    let json = serde_json::json!({ "G": v["g"], "H": v["h"], "D": v["d"] });
    write_output(None, &to_json(&json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Render(a) => cmd_render(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Snf(a) => cmd_snf(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Disagreement) => ExitCode::from(1),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 1 } else { 2 })
        }
    }
}
