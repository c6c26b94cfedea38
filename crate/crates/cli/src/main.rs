use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use sep4::chow::{builtin_chow, eval_chow, eval_chow_unnormalized, table_checksums};
use sep4::gallery::{
    divincenzo_state, example_ab_state, random_ppt_rank4_33, random_separable, shifts_upb, upb_complement_state,
};
use sep4::grassmann::pluecker;
use sep4::io::{parse_basis, parse_state, state_to_json};
use sep4::{classify_with, ClassificationReport, ClassifyOptions, Error, ToleranceConfig, Verdict, C64};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "sep4", about = "Decide separability of low-rank multipartite states", disable_version_flag = true)]
struct Cli {
    /// Print the version and the checksums of the built-in Chow tables.
    #[arg(long)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one state file.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print a Chow form or evaluate it on a subspace basis.
    Chow {
        /// 2x2, 3x2, 4x2, Mx2:M, 2x3, 3x3 or 2x2x2.
        #[arg(long)]
        system: String,
        #[arg(long, conflicts_with = "eval", required_unless_present = "eval")]
        print: bool,
        /// Basis JSON file with one row per spanning vector.
        #[arg(long)]
        eval: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Classify every file in a directory into a JSONL file.
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        parallel: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Emit a named state as state JSON.
    Gallery {
        #[arg(value_enum)]
        name: GalleryName,
        /// Parameter `a` of example-ab, as `re` or `re,im`.
        #[arg(long, default_value = "1")]
        a: String,
        /// Parameter `b` of example-ab, as `re` or `re,im`.
        #[arg(long, default_value = "1")]
        b: String,
        /// Party dimensions of random-separable, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        dims: Vec<usize>,
        /// Number of product terms of random-separable.
        #[arg(long, default_value_t = 2)]
        terms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GalleryName {
    Divincenzo,
    ExampleAb,
    UpbComplement,
    RandomSeparable,
    RandomPptRank4,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol_herm: Option<f64>,
    #[arg(long)]
    tol_psd: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_orth: Option<f64>,
    #[arg(long)]
    tol_recon: Option<f64>,
    #[arg(long)]
    tol_product: Option<f64>,
    #[arg(long, env = "SEP4_TOL_CHOW")]
    tol_chow: Option<f64>,
}

impl RunArgs {
    fn tolerances(&self) -> sep4::Result<ToleranceConfig> {
        let d = ToleranceConfig::default();
        let cfg = ToleranceConfig {
            tol_herm: self.tol_herm.unwrap_or(d.tol_herm),
            tol_psd: self.tol_psd.unwrap_or(d.tol_psd),
            tol_rank: self.tol_rank.unwrap_or(d.tol_rank),
            tol_orth: self.tol_orth.unwrap_or(d.tol_orth),
            tol_recon: self.tol_recon.unwrap_or(d.tol_recon),
            tol_product: self.tol_product.unwrap_or(d.tol_product),
            tol_chow: self.tol_chow.unwrap_or(d.tol_chow),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn options(&self) -> ClassifyOptions {
        ClassifyOptions { seed: self.seed, ..ClassifyOptions::default() }
    }
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Core(Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn exit_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Separable => 0,
        Verdict::Entangled => 1,
        Verdict::OutOfScope => 2,
    }
}

fn classify_file(path: &Path, run: &RunArgs) -> Result<ClassificationReport, CliError> {
    let rho = parse_state(&read(path)?, run.tolerances()?)?;
    Ok(classify_with(&rho, &run.options())?)
}

fn print_human(r: &ClassificationReport) {
    println!("verdict: {:?}", r.verdict);
    println!("rule: {}", r.rule_fired.name());
    println!("dims: {:?} (compressed {:?})", r.dims, r.compressed_dims);
    println!("rank: {}  local ranks: {:?}", r.rank, r.local_ranks);
    if let Some(ch) = &r.chow {
        println!("|F|: {:.6e} (tol {:.1e})", ch.abs_value, ch.tol_chow);
    }
    if let Some(lb) = &r.length_bounds {
        println!("length: {}..={}", lb.lo, lb.hi);
    }
    if let Some(d) = &r.decomposition {
        println!("decomposition: {} terms, residual {:.3e}", d.terms.len(), d.residual);
    }
    for j in &r.justification {
        println!("because: {j}");
    }
    if r.low_confidence {
        println!("low confidence");
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
}

fn cmd_classify(input: &Path, json: bool, run: &RunArgs) -> Result<u8, CliError> {
    let report = classify_file(input, run)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_human(&report);
    }
    Ok(exit_code(report.verdict))
}

fn parse_system(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse system '{s}'"));
    if let Some(m) = s.strip_prefix("Mx2:") {
        return Ok(vec![m.parse().map_err(|_| bad())?, 2]);
    }
    s.split('x').map(|p| p.parse().map_err(|_| bad())).collect()
}

#[derive(Serialize)]
struct ChowValue {
    system: Vec<usize>,
    normalized: [f64; 2],
    unnormalized: [f64; 2],
}

fn cmd_chow(system: &str, print: bool, eval: Option<&Path>, json: bool) -> Result<u8, CliError> {
    let dims = parse_system(system)?;
    let form = builtin_chow(&dims)?;
    if print {
        if json {
            println!("{}", serde_json::to_string(&form.entries).expect("terms serialize"));
        } else {
            println!("{}", form.render());
        }
        return Ok(0);
    }
    let path = eval.ok_or_else(|| CliError::Usage("either --print or --eval is required".into()))?;
    let basis = parse_basis(&read(path)?, Some(&dims), ToleranceConfig::default().tol_rank)?;
    if basis.dims() != dims.as_slice() {
        return Err(Error::DimensionMismatch(format!("basis dims {:?} differ from system {dims:?}", basis.dims())).into());
    }
    if basis.dim() != form.k {
        return Err(Error::WrongDimension { expected: form.k, got: basis.dim() }.into());
    }
    let p = pluecker(&basis)?;
    let normalized = eval_chow(&form, &p)?;
    let raw = eval_chow_unnormalized(&form, &p)?;
    if json {
        let v = ChowValue { system: dims, normalized: [normalized.re, normalized.im], unnormalized: [raw.re, raw.im] };
        println!("{}", serde_json::to_string(&v).expect("plain data serializes"));
    } else {
        println!("F (normalized): {}", fmt_complex(normalized));
        println!("F (unnormalized): {}", fmt_complex(raw));
    }
    Ok(0)
}

fn fmt_complex(z: C64) -> String {
    format!("{:.12e} {} {:.12e}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

#[derive(Serialize)]
struct BatchLine {
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_batch(input: &Path, out: &Path, parallel: Option<usize>, run: &RunArgs) -> Result<u8, CliError> {
    run.tolerances()?;
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .map_err(|e| CliError::Io(input.to_path_buf(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let lines: Vec<BatchLine> = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                let file = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                match classify_file(path, run) {
                    Ok(r) => BatchLine { file, report: Some(r), error: None },
                    Err(e) => BatchLine { file, report: None, error: Some(e.to_string()) },
                }
            })
            .collect()
    });
    let mut sink = fs::File::create(out).map_err(|e| CliError::Io(out.to_path_buf(), e))?;
    let (mut sep, mut ent, mut oos, mut err) = (0, 0, 0, 0);
    for line in &lines {
        match line.report.as_ref().map(|r| r.verdict) {
            Some(Verdict::Separable) => sep += 1,
            Some(Verdict::Entangled) => ent += 1,
            Some(Verdict::OutOfScope) => oos += 1,
            None => err += 1,
        }
        let text = serde_json::to_string(line).expect("report serializes");
        writeln!(sink, "{text}").map_err(|e| CliError::Io(out.to_path_buf(), e))?;
    }
    println!(
        "{} files: {sep} separable, {ent} entangled, {oos} out of scope, {err} errors",
        lines.len()
    );
    Ok(0)
}

fn parse_complex(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("cannot parse complex number '{s}'"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gallery(
    name: GalleryName,
    a: &str,
    b: &str,
    dims: &[usize],
    terms: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let state = match name {
        GalleryName::Divincenzo => divincenzo_state(),
        GalleryName::ExampleAb => example_ab_state(parse_complex(a)?, parse_complex(b)?),
        GalleryName::UpbComplement => upb_complement_state(&shifts_upb())?,
        GalleryName::RandomSeparable => random_separable(dims, terms, seed)?,
        GalleryName::RandomPptRank4 => random_ppt_rank4_33(seed),
    };
    let text = state_to_json(&state);
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| CliError::Io(path.to_path_buf(), e))?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if cli.version {
        println!("sep4 {}", env!("CARGO_PKG_VERSION"));
        for (label, sum) in table_checksums() {
            println!("chow_{label} sha256:{sum}");
        }
        return Ok(0);
    }
    let Some(command) = cli.command else {
        return Err(CliError::Usage("no command given; see --help".into()));
    };
    match command {
        Command::Classify { input, json, run } => cmd_classify(&input, json, &run),
        Command::Chow { system, print, eval, json } => cmd_chow(&system, print, eval.as_deref(), json),
        Command::Batch { input, out, parallel, run } => cmd_batch(&input, &out, parallel, &run),
        Command::Gallery { name, a, b, dims, terms, seed, out } => {
            cmd_gallery(name, &a, &b, &dims, terms, seed, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
