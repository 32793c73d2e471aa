//! `ipquant` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse or I/O error, 3 numeric error.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use ipquant::bounds::space_lb;
use ipquant::codec::{read_container, write_container};
use ipquant::dataio::{load_with, normalize, Format, LoadOptions, VectorSet};
use ipquant::eval::{evaluate, EvalReport};
use ipquant::{
    batch, filter_pairs, plan_distinguish, plan_estimate, CodeWord, Codec, Delta, Error,
    GridParams, ThresholdSpec,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ipquant", version, about = "Grid quantization of unit vectors with bounded inner-product error")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a dataset, quantize it and write a code container.
    Encode(EncodeArgs),
    /// Measure inner-product error and space on seeded random pairs.
    Eval(EvalArgs),
    /// Split candidate pairs into survivors and eliminated pairs.
    Filter(FilterArgs),
    /// Print upper and lower space bounds for an (alpha, beta) instance.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    input: PathBuf,
    /// fvecs, bvecs, idx or csv.
    #[arg(long, value_parser = parse_format)]
    format: Format,
    /// Treat the first CSV line as a header.
    #[arg(long)]
    csv_header: bool,
    /// Read at most this many vectors.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("grid").required(true).args(["delta", "epsilon", "alpha"])))]
struct EncodeArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Grid resolution, `p/q` or a decimal.
    #[arg(long, value_parser = parse_delta)]
    delta: Option<Delta>,
    /// Target additive inner-product error; uses delta = epsilon / 4.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Plan the grid for separating `>= alpha` from `<= beta`.
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Comma-separated grid resolutions.
    #[arg(long, value_parser = parse_delta, value_delimiter = ',', required = true)]
    delta: Vec<Delta>,
    #[arg(long, default_value_t = 2000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FilterArgs {
    /// A code container, or a dataset when `--format` is given.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
    #[arg(long, requires = "format")]
    csv_header: bool,
    /// Two whitespace-separated vector indices per line.
    #[arg(long)]
    pairs_file: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[arg(long)]
    json: bool,
}

fn parse_delta(s: &str) -> Result<Delta, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::BadMagic
        | Error::VersionUnsupported(_)
        | Error::TruncatedFile
        | Error::ChecksumMismatch
        | Error::MalformedCode(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Encode(args) => encode(args),
        Command::Eval(args) => eval(args),
        Command::Filter(args) => filter(args),
        Command::Bounds(args) => bounds(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_set(data: &DatasetArgs) -> Result<VectorSet, Error> {
    let opts = LoadOptions {
        csv_header: data.csv_header,
        limit: data.limit,
    };
    normalize(&load_with(&data.input, data.format, opts)?)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

#[derive(Serialize)]
struct EncodeSummary {
    output: String,
    count: usize,
    dropped: usize,
    d: usize,
    delta: String,
    delta_value: f64,
    threshold: Option<f64>,
    s: u64,
    code_bits: usize,
    space_ratio: f64,
}

fn encode(args: EncodeArgs) -> Result<(), Failure> {
    let mut threshold = None;
    let delta = match (args.delta, args.epsilon, args.alpha, args.beta) {
        (Some(delta), None, None, None) => delta,
        (None, Some(eps), None, None) => plan_estimate(eps)?,
        (None, None, Some(alpha), Some(beta)) => {
            let spec = plan_distinguish(alpha, beta)?;
            threshold = Some(spec.t);
            spec.delta
        }
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --delta, --epsilon or --alpha with --beta".into(),
            ))
        }
    };
    let set = load_set(&args.data)?;
    let grid = GridParams::new(set.d, delta)?;
    let codec = Codec::new(grid);
    let codes = batch::encode_all(&codec, &set.vectors)?;
    let mut sink = BufWriter::new(File::create(&args.output)?);
    write_container(&mut sink, &grid, &codes, set.norms.as_deref())?;
    sink.flush()?;

    let summary = EncodeSummary {
        output: args.output.display().to_string(),
        count: codes.len(),
        dropped: set.dropped,
        d: set.d,
        delta: delta.to_string(),
        delta_value: delta.to_f64(),
        threshold,
        s: grid.s(),
        code_bits: codec.code_length(),
        space_ratio: codec.code_length() as f64 / (32 * set.d) as f64,
    };
    if args.json {
        print_json(&summary);
    } else {
        println!(
            "wrote {} codes to {} ({} zero vectors dropped)",
            summary.count, summary.output, summary.dropped
        );
        println!("d={} delta={} s={}", summary.d, summary.delta, summary.s);
        if let Some(t) = threshold {
            println!("threshold t={t:.9}");
        }
        println!(
            "code bits={} space ratio={:.4}",
            summary.code_bits, summary.space_ratio
        );
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), Failure> {
    if args.pairs == 0 {
        return Err(Failure::Usage("--pairs must be at least 1".into()));
    }
    let set = load_set(&args.data)?;
    let reports = args
        .delta
        .iter()
        .map(|&delta| evaluate(&set, delta, args.pairs, args.seed))
        .collect::<Result<Vec<EvalReport>, Error>>()?;
    if args.json {
        print_json(&reports);
        return Ok(());
    }
    println!(
        "{:<12} {:>5} {:>14} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "dataset", "d", "delta", "space", "median", "p90", "max", "bound", "pairs"
    );
    for r in &reports {
        let name = Path::new(&r.dataset)
            .file_name()
            .map_or(r.dataset.clone(), |n| n.to_string_lossy().into_owned());
        println!(
            "{:<12} {:>5} {:>14} {:>6.1}% {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9}",
            name,
            r.d,
            r.delta,
            100.0 * r.space_ratio,
            r.median_err,
            r.p90_err,
            r.max_err,
            r.worst_case,
            r.pair_count
        );
    }
    Ok(())
}

fn read_pairs(path: &Path) -> Result<Vec<(usize, usize)>, Error> {
    let reader = BufReader::new(File::open(path)?);
    let mut pairs = Vec::new();
    let mut offset = 0u64;
    for line in reader.lines() {
        let line = line?;
        let start = offset;
        offset += line.len() as u64 + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            [a, b] => {
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse {
                            offset: start,
                            message: format!("not an index: {s:?}"),
                        })
                };
                pairs.push((parse(a)?, parse(b)?));
            }
            _ => {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("expected two indices, got {}", fields.len()),
                })
            }
        }
    }
    Ok(pairs)
}

fn is_container(path: &Path) -> Result<bool, Error> {
    let mut magic = [0u8; 4];
    let mut f = File::open(path)?;
    let n = f.read(&mut magic)?;
    Ok(n == 4 && &magic == b"IPQZ")
}

#[derive(Serialize)]
struct Survivor {
    i: usize,
    j: usize,
    estimate: f64,
}

#[derive(Serialize)]
struct FilterSummary {
    alpha: f64,
    beta: f64,
    delta: String,
    threshold: f64,
    candidates: usize,
    survived: usize,
    eliminated: usize,
    survivors: Vec<Survivor>,
}

/// Code words by vector index, from a container or a dataset. Dataset rows
/// that no pair mentions are left unencoded.
fn filter_codes(
    args: &FilterArgs,
    spec: &ThresholdSpec,
    pairs: &[(usize, usize)],
) -> Result<(Codec, Vec<Option<CodeWord>>), Failure> {
    match args.format {
        None => {
            if !is_container(&args.input)? {
                return Err(Failure::Usage(
                    "--input is not a code container; pass --format for a dataset".into(),
                ));
            }
            let container = read_container(&mut BufReader::new(File::open(&args.input)?))?;
            let codes = container.codes.into_iter().map(Some).collect();
            Ok((Codec::new(container.grid), codes))
        }
        Some(format) => {
            let data = DatasetArgs {
                input: args.input.clone(),
                format,
                csv_header: args.csv_header,
                limit: None,
            };
            let set = load_set(&data)?;
            let codec = Codec::new(GridParams::new(set.d, spec.delta)?);
            // Indices refer to raw rows; dropped zero rows cannot be paired.
            let mut slot = vec![None; set.len() + set.dropped];
            for (k, &o) in set.origin.iter().enumerate() {
                slot[o] = Some(k);
            }
            let mut used: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
            used.sort_unstable();
            used.dedup();
            for &i in &used {
                if slot.get(i).copied().flatten().is_none() {
                    return Err(Error::IndexOutOfRange.into());
                }
            }
            let encoded = batch::map(&used, |&i| {
                codec.encode_vector(set.vectors[slot[i].unwrap()].coords())
            })?;
            let mut codes = vec![None; slot.len()];
            for (&i, w) in used.iter().zip(encoded) {
                codes[i] = Some(w);
            }
            Ok((codec, codes))
        }
    }
}

fn filter(args: FilterArgs) -> Result<(), Failure> {
    let spec = plan_distinguish(args.alpha, args.beta)?;
    let pairs = read_pairs(&args.pairs_file)?;
    let (codec, codes) = filter_codes(&args, &spec, &pairs)?;
    let mut coded = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        match (codes.get(i).and_then(Option::as_ref), codes.get(j).and_then(Option::as_ref)) {
            (Some(a), Some(b)) => coded.push((a.clone(), b.clone())),
            _ => return Err(Error::IndexOutOfRange.into()),
        }
    }
    let outcome = filter_pairs(&codec, &coded, &spec)?;
    let threshold = ipquant::estimator::threshold_for(&codec, &spec)?;
    let survivors: Vec<Survivor> = outcome
        .survivors_by_estimate()
        .into_iter()
        .map(|k| Survivor {
            i: pairs[k].0,
            j: pairs[k].1,
            estimate: outcome.verdicts[k].estimate,
        })
        .collect();
    let summary = FilterSummary {
        alpha: args.alpha,
        beta: args.beta,
        delta: codec.grid().delta().to_string(),
        threshold,
        candidates: pairs.len(),
        survived: outcome.survivors.len(),
        eliminated: outcome.eliminated.len(),
        survivors,
    };
    if args.json {
        print_json(&summary);
        return Ok(());
    }
    println!(
        "delta={} threshold={:.9}: {} candidates, {} survived, {} eliminated",
        summary.delta, summary.threshold, summary.candidates, summary.survived, summary.eliminated
    );
    for s in &summary.survivors {
        println!("{}\t{}\t{:.9}", s.i, s.j, s.estimate);
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundsRow {
    d: usize,
    delta: String,
    delta_value: f64,
    threshold: f64,
    s: u64,
    code_bits: usize,
    /// `d log2(sqrt(1 - beta) / (alpha - beta))`, shared by both bounds.
    asymptotic: f64,
    space_lb: f64,
    gap_per_dim: f64,
}

fn bounds(args: BoundsArgs) -> Result<(), Failure> {
    let spec = plan_distinguish(args.alpha, args.beta)?;
    let rows = args
        .d
        .iter()
        .map(|&d| {
            let grid = GridParams::new(d, spec.delta)?;
            let code_bits = Codec::new(grid).code_length();
            let lb = space_lb(args.alpha, args.beta, d)?;
            Ok(BoundsRow {
                d,
                delta: spec.delta.to_string(),
                delta_value: spec.delta.to_f64(),
                threshold: spec.t,
                s: grid.s(),
                code_bits,
                asymptotic: lb.asymptotic,
                space_lb: lb.bits,
                gap_per_dim: (code_bits as f64 - lb.bits) / d as f64,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    if args.json {
        print_json(&rows);
        return Ok(());
    }
    println!(
        "alpha={} beta={} delta={:.9} t={:.9}",
        args.alpha, args.beta, spec.delta.to_f64(), spec.t
    );
    println!(
        "{:>6} {:>12} {:>10} {:>12} {:>10} {:>8}",
        "d", "s", "bits", "asymptotic", "lower", "gap/d"
    );
    for r in &rows {
        println!(
            "{:>6} {:>12} {:>10} {:>12.1} {:>10.1} {:>8.3}",
            r.d, r.s, r.code_bits, r.asymptotic, r.space_lb, r.gap_per_dim
        );
    }
    Ok(())
}
