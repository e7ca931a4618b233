//! `nength` command-line interface.
//!
//! Exit codes: 0 ok / matches found, 1 no match, 2 malformed input, 3 alphabet
//! or code error, 4 precision failure, 5 verification mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nength::formats::{self, PatternFile};
use nength::scaling::{balanced_shape, time_engine, BenchEngine, BenchRecord};
use nength::verify::{convolution_trial, engine_trial, lab_trial};
use nength::{
    build_index, find_all, lookup, match_nowrap, par, sliding_match, Alphabet, AlphabetMode, Error,
    NengthIndex, PatternSupport, Query,
};

const EXIT_NO_MATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_ALPHABET: u8 = 3;
const EXIT_PRECISION: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(name = "nength", version, about = "Exact wildcard pattern matching over n-dimensional grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a text grid into an index file
    Index(IndexArgs),
    /// Find every offset where a pattern support reads a query
    Search(SearchArgs),
    /// Randomized checks of the transform path against direct oracles
    Verify(VerifyArgs),
    /// Time the direct and transform paths across grid sizes
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Shifted,
    Paper,
}

impl From<Mode> for AlphabetMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Shifted => AlphabetMode::Shifted,
            Mode::Paper => AlphabetMode::Paper,
        }
    }
}

#[derive(Args)]
struct IndexArgs {
    /// Text grid (.ngt or .ngb)
    #[arg(long)]
    text: PathBuf,
    /// Alphabet, one symbol per line (.alpha)
    #[arg(long)]
    alphabet: PathBuf,
    /// Output index (.nng)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "shifted")]
    mode: Mode,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchEngine {
    Fft,
    Naive,
}

#[derive(Args)]
struct SearchArgs {
    /// Index file (.nng)
    #[arg(long)]
    index: PathBuf,
    /// Pattern support (.npt)
    #[arg(long)]
    pattern: PathBuf,
    /// Symbols sought under each support cell, in cell order
    #[arg(long, allow_hyphen_values = true)]
    query: String,
    /// Alphabet used to read the query; without it the query is whitespace-separated codes
    #[arg(long)]
    alphabet: Option<PathBuf>,
    /// Only report alignments that stay inside the grid
    #[arg(long)]
    no_wrap: bool,
    #[arg(long)]
    json: bool,
    #[arg(long, value_enum, default_value = "fft")]
    engine: SearchEngine,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the dense circulant checks
    #[arg(long)]
    lab: bool,
    /// Largest size along any axis
    #[arg(long, default_value_t = 8)]
    max_dim: usize,
    #[arg(long, hide = true)]
    sabotage: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated total sizes
    #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "naive,fft")]
    engines: Vec<String>,
    /// CSV output
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the direct path above this size
    #[arg(long, default_value_t = 4096)]
    naive_cap: usize,
    /// Number of axes each size is split over
    #[arg(long, default_value_t = 1)]
    ndim: usize,
    /// Repetitions per measurement (median is reported)
    #[arg(long, default_value_t = 3)]
    reps: usize,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::CodeOutOfRange { .. }
            | Error::UnknownSymbol(_)
            | Error::InvalidAlphabet(_)
            | Error::DigitOutOfRange { .. } => EXIT_ALPHABET,
            Error::Precision { .. } | Error::Decode { .. } | Error::Infeasible { .. } | Error::Capacity { .. } => {
                EXIT_PRECISION
            }
            _ => EXIT_INPUT,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn read_utf8(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?).map_err(|_| Failure::new(EXIT_INPUT, format!("{}: not UTF-8", path.display())))
}

fn cmd_index(args: IndexArgs) -> CliResult {
    let text = formats::read_grid(&read(&args.text)?)?;
    let alphabet = formats::read_alphabet(&read_utf8(&args.alphabet)?, args.mode.into())?;
    let index = build_index(&text, alphabet.space())?;
    fs::write(&args.out, formats::write_index(&index))
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", args.out.display())))?;
    let shape = index.shape();
    println!("shape {:?}", shape.dims());
    println!("s {}", shape.len());
    println!("sigma {}", alphabet.space().size());
    println!("base {}", index.base());
    Ok(0)
}

fn parse_query(text: &str, alphabet: Option<&Alphabet>, index: &NengthIndex, support: &PatternSupport) -> Result<Query, Failure> {
    let query = match alphabet {
        Some(a) => {
            if a.space() != index.space() {
                return Err(Failure::new(
                    EXIT_ALPHABET,
                    format!("alphabet has base {} but the index was built with base {}", a.base(), index.base()),
                ));
            }
            Query::parse(text, a, support)?
        }
        None => {
            let digits = text
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Failure::new(EXIT_ALPHABET, format!("query {text:?} is not a list of codes")))?;
            if digits.len() != support.len() {
                return Err(Error::QueryLength { expected: support.len(), got: digits.len() }.into());
            }
            Query::new(digits)
        }
    };
    let codes = index.space().symbol_codes();
    if let Some((j, &d)) = query.digits().iter().enumerate().find(|(_, d)| !codes.contains(d)) {
        return Err(Error::DigitOutOfRange { position: j, digit: d, base: index.base() }.into());
    }
    Ok(query)
}

fn cmd_search(args: SearchArgs) -> CliResult {
    let index = formats::read_index(&read(&args.index)?)?;
    let PatternFile { ndim, cells } = formats::read_pattern(&read_utf8(&args.pattern)?)?;
    let shape = index.shape().clone();
    if ndim != shape.ndim() {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("pattern has {ndim} dimensions, index has {}", shape.ndim()),
        ));
    }
    let support = PatternSupport::new(shape.clone(), &cells)?;
    let alphabet = match &args.alphabet {
        Some(p) => Some(formats::read_alphabet(&read_utf8(p)?, index.space().mode())?),
        None => None,
    };
    let query = parse_query(&args.query, alphabet.as_ref(), &index, &support)?;
    let wrap = !args.no_wrap;

    let matches = match args.engine {
        SearchEngine::Fft if wrap => lookup(&find_all(&index, &support)?, &query),
        SearchEngine::Fft => lookup(&match_nowrap(&index.recover_text()?, &support, index.space())?, &query),
        SearchEngine::Naive => sliding_match(&index.recover_text()?, &support, &query, wrap)?,
    };

    let mut out = std::io::stdout().lock();
    if args.json {
        let doc = serde_json::json!({
            "shape": shape.dims(),
            "query": args.query,
            "wrap": wrap,
            "matches": matches,
        });
        writeln!(out, "{doc}").ok();
    } else {
        for m in &matches {
            let line: Vec<String> = m.iter().map(ToString::to_string).collect();
            writeln!(out, "{}", line.join(" ")).ok();
        }
    }
    Ok(if matches.is_empty() { EXIT_NO_MATCH } else { 0 })
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    if args.max_dim == 0 {
        return Err(Failure::new(EXIT_INPUT, "--max-dim must be at least 1"));
    }
    if args.trials == 0 {
        eprintln!("warning: --trials 0, nothing to verify");
        return Ok(0);
    }
    let seed_of = |i: usize| args.seed.wrapping_add(i as u64);
    let sabotage = args.sabotage;
    let max_dim = args.max_dim;
    let engine = par::map_range(args.trials, |i| engine_trial(seed_of(i), max_dim, sabotage && i == 0));
    let conv = par::map_range(args.trials, |i| convolution_trial(seed_of(i), max_dim));

    let mut failures: Vec<String> = Vec::new();
    let engine_failed: Vec<_> = engine.iter().filter(|t| !t.passed()).collect();
    let queries: usize = engine.iter().map(|t| t.queries_checked).sum();
    println!(
        "engine trials: {} passed, {} failed ({queries} queries)",
        engine.len() - engine_failed.len(),
        engine_failed.len()
    );
    for t in &engine_failed {
        failures.push(format!("engine seed {}: {}", t.seed, t.failure.as_deref().unwrap_or("")));
    }
    let conv_failed: Vec<_> = conv.iter().filter(|t| !t.exact).collect();
    let worst = conv.iter().map(|t| t.residual.max(t.max_imag)).fold(0.0, f64::max);
    println!(
        "convolution trials: {} passed, {} failed (worst residual {worst:.3e})",
        conv.len() - conv_failed.len(),
        conv_failed.len()
    );
    for t in &conv_failed {
        failures.push(format!("convolution seed {}: transform path differs from direct product", t.seed));
    }

    if args.lab {
        let lab = par::map_range(args.trials, |i| lab_trial(seed_of(i), 16));
        let lab: Vec<_> = lab.into_iter().collect::<Result<_, _>>()?;
        let off = lab.iter().map(|t| t.diagonalization.off_diag_max).fold(0.0, f64::max);
        let diag = lab.iter().map(|t| t.diagonalization.diag_vs_nength_max).fold(0.0, f64::max);
        let bad_diag: Vec<_> = lab.iter().filter(|t| !t.diagonalization.within(1e-9)).collect();
        let bad_prod: Vec<_> = lab.iter().filter(|t| !t.product_equivalent).collect();
        println!(
            "lab diagonalization: {} passed, {} failed (worst off-diagonal {off:.3e}, worst diagonal gap {diag:.3e})",
            lab.len() - bad_diag.len(),
            bad_diag.len()
        );
        println!(
            "lab product equivalence: {} passed, {} failed",
            lab.len() - bad_prod.len(),
            bad_prod.len()
        );
        failures.extend(bad_diag.iter().map(|t| format!("lab seed {}: diagonalization {:?}", t.seed, t.diagonalization)));
        failures.extend(bad_prod.iter().map(|t| format!("lab seed {}: m = {} product mismatch", t.seed, t.m)));
    }

    if failures.is_empty() {
        println!("all checks passed");
        Ok(0)
    } else {
        for f in &failures {
            println!("FAIL {f}");
        }
        Ok(EXIT_VERIFY)
    }
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    let engines = args
        .engines
        .iter()
        .map(|e| e.parse::<BenchEngine>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut file = fs::File::create(&args.out)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", args.out.display())))?;
    let mut records: Vec<BenchRecord> = Vec::new();
    for &s in &args.sizes {
        let shape = balanced_shape(s, args.ndim)?;
        for &engine in &engines {
            if engine == BenchEngine::Naive && s > args.naive_cap {
                eprintln!("skipping naive at s = {s} (above --naive-cap {})", args.naive_cap);
                continue;
            }
            let rec = time_engine(engine, &shape, args.seed, args.reps)?;
            println!(
                "s {:>9}  shape {:>12}  {:>5}  {:>12.6}s  ~{:.3e} ops",
                rec.s,
                rec.shape_label(),
                rec.engine.to_string(),
                rec.seconds,
                rec.op_estimate
            );
            records.push(rec);
        }
    }
    let mut csv = String::from("s,shape,engine,seconds\n");
    for r in &records {
        csv.push_str(&format!("{},{},{},{:.9}\n", r.s, r.shape_label(), r.engine, r.seconds));
    }
    file.write_all(csv.as_bytes())
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", args.out.display())))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Index(a) => cmd_index(a),
        Command::Search(a) => cmd_search(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_exit_codes() {
        let code = |e: Error| Failure::from(e).code;
        assert_eq!(code(Error::UnknownSymbol("z".into())), EXIT_ALPHABET);
        assert_eq!(code(Error::CodeOutOfRange { coord: vec![1], code: 9 }), EXIT_ALPHABET);
        assert_eq!(code(Error::Precision { max_imag: 1.0, max_residual: 0.0, max_abs: 0.0 }), EXIT_PRECISION);
        assert_eq!(code(Error::QueryLength { expected: 2, got: 3 }), EXIT_INPUT);
        assert_eq!(code(Error::Format { kind: "grid", msg: "x".into() }), EXIT_INPUT);
    }

    #[test]
    fn arguments_parse() {
        <Cli as clap::CommandFactory>::command().debug_assert();
        let cli = Cli::try_parse_from(["nength", "bench", "--sizes", "8,16", "--out", "x.csv"]).unwrap();
        match cli.command {
            Command::Bench(b) => assert_eq!(b.sizes, vec![8, 16]),
            _ => panic!("wrong subcommand"),
        }
    }
}
