//! Command-line front end.
//!
//! Every run writes a `# chebyshev-pa ...` line with the fully resolved
//! parameters to stderr before its output. Exit codes: 0 success, 1 I/O
//! failure, 2 usage error, 3 precondition or invalid input, 4 resource guard.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::json;

use crate::bounds::{self, BallTable, BoundRecord, Provenance, Registered, SearchRegistry};
use crate::channel::{self, ChannelConfig, CodeParams, CodecKind};
use crate::codec::{self, MessageVector};
use crate::constructions::{self, ExplicitCode};
use crate::perm::{parse_list, validate_rows, RawArray};
use crate::search::{self, SearchResult};
use crate::{Limits, PaError, PermutationArray, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "chebyshev-pa", version, about = "Permutation arrays under the Chebyshev distance")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Cache directory (default: $PA_CACHE_DIR, else a per-user data directory).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Do not read or write the on-disk cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Largest number of words a construction may materialize.
    #[arg(long, global = true, default_value_t = Limits::default().max_words)]
    pub max_words: u64,
    /// Largest band half-width for the permanent DP.
    #[arg(long, global = true, default_value_t = Limits::default().max_band)]
    pub max_band: usize,
    /// Largest n accepted by the greedy scan.
    #[arg(long, global = true, default_value_t = Limits::default().greedy_max_n)]
    pub greedy_max_n: usize,
    /// Largest n accepted by the exact search.
    #[arg(long, global = true, default_value_t = Limits::default().exact_max_n)]
    pub exact_max_n: usize,
}

impl GlobalArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_words: self.max_words,
            max_band: self.max_band,
            greedy_max_n: self.greedy_max_n,
            exact_max_n: self.exact_max_n,
        }
    }

    fn cache_dir(&self) -> Option<PathBuf> {
        if self.no_cache {
            return None;
        }
        if let Some(dir) = &self.cache_dir {
            return Some(dir.clone());
        }
        if let Some(dir) = std::env::var_os("PA_CACHE_DIR") {
            return Some(dir.into());
        }
        if let Some(dir) = std::env::var_os("XDG_DATA_HOME") {
            return Some(PathBuf::from(dir).join("chebyshev-pa"));
        }
        std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".local/share/chebyshev-pa"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a PA and print it in the PA text format.
    #[command(subcommand)]
    Construct(Construct),
    /// Encode a message into a chain-code permutation.
    Encode(EncodeArgs),
    /// Decode a received word of a chain code (or of the explicit code).
    Decode(DecodeArgs),
    /// Exact ball size V(n,d).
    BallSize(BallSizeArgs),
    /// Table of lower/upper bounds on P(n,d).
    Bounds(BoundsArgs),
    /// Growth-rate estimate of V(n,d) in n.
    Mu(MuArgs),
    /// Lexicographic greedy search.
    Greedy(SearchArgs),
    /// Exact maximum PA by clique search.
    Exact(SearchArgs),
    /// Monte-Carlo channel simulation.
    Simulate(SimulateArgs),
    /// Print the growth-rate table and the bounds grid.
    ReproduceTables(ReproduceArgs),
    /// Check a PA file.
    Validate(ValidateArgs),
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Words with pi_i = i (mod d); prints the cardinality and, within the
    /// word limit, the words.
    Explicit {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Print only the word with this index.
        #[arg(long)]
        unrank: Option<BigUint>,
    },
    /// Chain code over an alphabet of size q.
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
    },
    /// Interleave ordered r-tuples of words of a PA file.
    FirstRecursive {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// Prefix extension C[s_1,...,s_t] of a PA file.
    Extend {
        #[arg(long)]
        file: PathBuf,
        /// Comma-separated extension points.
        #[arg(long)]
        points: String,
    },
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Comma-separated digits in [0, q-1].
    #[arg(long, allow_hyphen_values = true)]
    pub message: String,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Decode with the explicit residue-class decoder instead.
    #[arg(long)]
    pub explicit: bool,
    /// Comma-separated received integers.
    #[arg(long, allow_hyphen_values = true)]
    pub word: String,
}

#[derive(Debug, Args)]
pub struct BallSizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n_max: usize,
    #[arg(long)]
    pub d_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Run the greedy search on every cell with n at most this value.
    #[arg(long, default_value_t = 7)]
    pub search_n_max: usize,
    /// Seed only from constructions and registered results.
    #[arg(long)]
    pub no_search: bool,
}

#[derive(Debug, Args)]
pub struct MuArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Print the words after the summary.
    #[arg(long)]
    pub emit_words: bool,
    /// Append the result to the search registry in the cache directory.
    #[arg(long)]
    pub register: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "binary")]
    pub codec: CodecKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Clamp quantized errors to this magnitude.
    #[arg(long)]
    pub clip: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Length at which growth-rate ratios are read off.
    #[arg(long, default_value_t = 40)]
    pub mu_n_max: usize,
    /// Largest d of the growth-rate table.
    #[arg(long, default_value_t = 8)]
    pub mu_d_max: usize,
    /// Run the greedy search on bounds cells with n at most this value.
    #[arg(long, default_value_t = 9)]
    pub search_n_max: usize,
    /// Run the exact search on bounds cells with n at most this value.
    #[arg(long, default_value_t = 5)]
    pub exact_n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub file: PathBuf,
}

fn exit_code(e: &PaError) -> i32 {
    match e {
        PaError::Resource(_) => EXIT_RESOURCE,
        PaError::Io(_) => EXIT_IO,
        _ => EXIT_PRECONDITION,
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let _ = writeln!(
        err,
        "# chebyshev-pa {} {:?} limits={:?} cache={:?}",
        env!("CARGO_PKG_VERSION"),
        cli.command,
        cli.global.limits(),
        cli.global.cache_dir()
    );
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| PaError::Parse(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn read_pa(path: &PathBuf) -> Result<PermutationArray> {
    PermutationArray::from_text(&std::fs::read_to_string(path)?)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let limits = cli.global.limits();
    match &cli.command {
        Command::Construct(c) => construct(c, &limits, out)?,
        Command::Encode(a) => {
            let digits: Vec<u32> = parse_list(&a.message)?;
            let msg = MessageVector::new(digits, a.q)?;
            let word = if a.q == 2 {
                codec::encode_binary(&msg, a.n, a.d)?
            } else {
                codec::encode_qary(&msg, a.n, a.d, a.q)?
            };
            writeln!(out, "{word}")?;
        }
        Command::Decode(a) => {
            let y: Vec<i64> = parse_list(&a.word)?;
            if a.explicit {
                let dec = constructions::explicit_decode(a.n, a.d, &y)?;
                writeln!(out, "{}", crate::perm::join(&dec.values))?;
                if dec.permutation.is_none() {
                    writeln!(err, "warning: decoded word is not a permutation")?;
                }
            } else {
                let msg = if a.q == 2 {
                    codec::decode_binary(&y, a.n, a.d)?
                } else {
                    codec::decode_qary(&y, a.n, a.d, a.q)?
                };
                writeln!(out, "{}", crate::perm::join(&msg.digits))?;
            }
        }
        Command::BallSize(a) => {
            let table = ball_table(cli, err)?;
            writeln!(out, "{}", table.get(a.n, a.d)?)?;
        }
        Command::Bounds(a) => {
            let mut seeds = registered(cli, err)?;
            if !a.no_search {
                seeds.extend(run_searches(a.n_max.min(a.search_n_max), a.d_max, &limits, false)?);
            }
            let table = bounds::best_known_lower(a.n_max, a.d_max, &seeds)?;
            write_bounds(out, &table, a.format)?;
        }
        Command::Mu(a) => {
            let est = bounds::mu_estimate(a.d, a.n_max, &limits)?;
            match a.format {
                Format::Json => write_json(out, &est)?,
                Format::Csv => {
                    writeln!(out, "n,ratio")?;
                    for (n, r) in &est.ratios {
                        writeln!(out, "{n},{r:.12}")?;
                    }
                }
                Format::Text => writeln!(
                    out,
                    "d={} n_max={} estimate={:.6} upper={:.6} last_change={:.3e}",
                    est.d, est.n_max, est.estimate, est.upper, est.last_change
                )?,
            }
        }
        Command::Greedy(a) => {
            let r = search::greedy_lex(a.n, a.d, &limits)?;
            finish_search(cli, a, &r, out, err)?;
        }
        Command::Exact(a) => {
            let r = search::exact_max_pa(a.n, a.d, &limits)?;
            finish_search(cli, a, &r, out, err)?;
        }
        Command::Simulate(a) => {
            let params = CodeParams {
                codec: a.codec,
                n: a.n,
                d: a.d,
                q: a.q,
            };
            let cfg = ChannelConfig {
                sigma: a.sigma,
                trials: a.trials,
                seed: a.seed,
                clip: a.clip,
            };
            let stats = channel::simulate(&params, &cfg)?;
            match a.format {
                Format::Json => write_json(out, &json!({ "params": params, "config": cfg, "stats": stats }))?,
                _ => writeln!(
                    out,
                    "trials={} symbol_errors={} block_failures={} digit_errors={} \
                     symbol_error_rate={:.6} block_failure_rate={:.6} digit_error_rate={:.6}",
                    stats.trials,
                    stats.symbol_errors_pre_decode,
                    stats.block_decode_failures,
                    stats.message_digit_errors,
                    stats.symbol_error_rate,
                    stats.block_failure_rate,
                    stats.digit_error_rate
                )?,
            }
        }
        Command::ReproduceTables(a) => reproduce(cli, a, &limits, out, err)?,
        Command::Validate(a) => {
            let raw = RawArray::from_text(&std::fs::read_to_string(&a.file)?)?;
            let report = validate_rows(raw.n, raw.d, &raw.rows);
            writeln!(out, "{report}")?;
            if !report.is_valid() {
                return Ok(EXIT_PRECONDITION);
            }
        }
    }
    Ok(EXIT_OK)
}

fn construct(c: &Construct, limits: &Limits, out: &mut dyn Write) -> Result<()> {
    let pa = match c {
        Construct::Explicit { n, d, unrank } => {
            let code = ExplicitCode::new(*n, *d)?;
            writeln!(out, "# cardinality={}", code.cardinality())?;
            if let Some(k) = unrank {
                writeln!(out, "{}", code.unrank(k)?)?;
                return Ok(());
            }
            code.materialize(limits.max_words)?
        }
        Construct::Chain { n, d, q } => constructions::build_chain_qary(*n, *d, *q, limits)?.words,
        Construct::FirstRecursive { file, r } => constructions::first_recursive(&read_pa(file)?, *r, limits)?,
        Construct::Extend { file, points } => {
            let pa = read_pa(file)?;
            let s: Vec<usize> = parse_list(points)?;
            if (s.len() as u64).saturating_mul(pa.len() as u64) > limits.max_words {
                return Err(PaError::resource("extension exceeds the word limit"));
            }
            constructions::extend(&pa, &s)?
        }
    };
    write!(out, "{}", pa.to_text())?;
    Ok(())
}

fn ball_table(cli: &Cli, err: &mut dyn Write) -> Result<BallTable> {
    let max_band = cli.global.max_band;
    if let Some(dir) = cli.global.cache_dir() {
        match BallTable::open(&dir, max_band) {
            Ok(t) => return Ok(t),
            Err(e) => writeln!(err, "warning: cache at {} unusable ({e}); not caching", dir.display())?,
        }
    }
    Ok(BallTable::in_memory(max_band))
}

fn registered(cli: &Cli, err: &mut dyn Write) -> Result<Vec<Registered>> {
    match cli.global.cache_dir() {
        Some(dir) => match SearchRegistry::new(&dir).load() {
            Ok(r) => Ok(r),
            Err(e) => {
                writeln!(err, "warning: search registry unreadable ({e})")?;
                Ok(Vec::new())
            }
        },
        None => Ok(Vec::new()),
    }
}

/// Greedy (and, if `exact`, exact) results for every cell `d < n ≤ n_max`, `2 ≤ d ≤ d_max`.
fn run_searches(n_max: usize, d_max: usize, limits: &Limits, exact: bool) -> Result<Vec<Registered>> {
    let mut out = Vec::new();
    for n in 3..=n_max {
        for d in 2..n.min(d_max + 1) {
            let r = search::greedy_lex(n, d, limits)?;
            out.push(Registered::greedy(n, d, r.size as u64));
            if exact {
                let r = search::exact_max_pa(n, d, limits)?;
                out.push(Registered::exact(n, d, r.size as u64));
            }
        }
    }
    Ok(out)
}

fn finish_search(
    cli: &Cli,
    a: &SearchArgs,
    r: &SearchResult,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    writeln!(err, "# elapsed={:.3}s", r.elapsed.as_secs_f64())?;
    match a.format {
        Format::Json => write_json(out, r)?,
        _ => {
            writeln!(
                out,
                "method={} n={} d={} size={} scanned={}",
                r.method, r.n, r.d, r.size, r.permutations_scanned
            )?;
            if a.emit_words {
                write!(out, "{}", r.words.to_text())?;
            }
        }
    }
    if a.register {
        let dir = cli
            .global
            .cache_dir()
            .ok_or_else(|| PaError::invalid("--register needs a cache directory"))?;
        let reg = match r.method {
            search::SearchMethod::Greedy => Registered::greedy(r.n, r.d, r.size as u64),
            search::SearchMethod::Exact => Registered::exact(r.n, r.d, r.size as u64),
        };
        SearchRegistry::new(&dir).append(&reg)?;
    }
    Ok(())
}

fn write_bounds(out: &mut dyn Write, table: &[BoundRecord], format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(out, &table)?,
        Format::Csv => {
            writeln!(out, "{}", BoundRecord::CSV_HEADER)?;
            for r in table {
                writeln!(out, "{}", r.to_csv_row())?;
            }
        }
        Format::Text => {
            for r in table {
                writeln!(
                    out,
                    "P({},{}): {} ({}) .. {} ({})",
                    r.n, r.d, r.lower, r.lower_provenance, r.upper, r.upper_provenance
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MuRow {
    d: usize,
    estimate: f64,
    upper: f64,
    estimate_over_width: f64,
    last_change: f64,
}

#[derive(Serialize)]
struct GridCell {
    offset: usize,
    #[serde(flatten)]
    record: BoundRecord,
    /// False when no search ran on this cell (n above the search limit).
    searched: bool,
}

fn reproduce(
    cli: &Cli,
    a: &ReproduceArgs,
    limits: &Limits,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let mut mu_rows = Vec::new();
    let mut skipped = Vec::new();
    for d in 1..=a.mu_d_max {
        match bounds::mu_estimate(d, a.mu_n_max, limits) {
            Ok(est) => mu_rows.push(MuRow {
                d,
                estimate: est.estimate,
                upper: est.upper,
                estimate_over_width: est.estimate / (2 * d + 1) as f64,
                last_change: est.last_change,
            }),
            Err(PaError::Resource(msg)) => skipped.push(format!("d={d}: {msg}")),
            Err(e) => return Err(e),
        }
    }

    let (d_min, d_max, offsets) = (2usize, 7usize, 1..=5usize);
    let n_max = d_max + 5;
    let search_limits = Limits {
        greedy_max_n: limits.greedy_max_n.max(a.search_n_max),
        exact_max_n: limits.exact_max_n.max(a.exact_n_max),
        ..*limits
    };
    let mut seeds = registered(cli, err)?;
    for n in 3..=a.search_n_max.min(n_max) {
        for d in d_min.max(n.saturating_sub(5))..n.min(d_max + 1) {
            let r = search::greedy_lex(n, d, &search_limits)?;
            seeds.push(Registered::greedy(n, d, r.size as u64));
            if n <= a.exact_n_max {
                let r = search::exact_max_pa(n, d, &search_limits)?;
                seeds.push(Registered::exact(n, d, r.size as u64));
            }
        }
    }
    let table = bounds::best_known_lower(n_max, d_max, &seeds)?;
    let grid: Vec<GridCell> = (d_min..=d_max)
        .flat_map(|d| offsets.clone().map(move |k| (d + k, d)))
        .map(|(n, d)| {
            let record = table
                .iter()
                .find(|r| r.n == n && r.d == d)
                .cloned()
                .expect("cell inside the grid");
            GridCell {
                offset: n - d,
                searched: n <= a.search_n_max || seeds.iter().any(|s| s.n == n && s.d == d),
                record,
            }
        })
        .collect();
    let partial = grid.iter().any(|c| !c.searched) || !skipped.is_empty();

    match a.format {
        Format::Json => write_json(
            out,
            &json!({ "growth_rates": mu_rows, "growth_rates_skipped": skipped,
                     "bounds": grid, "partial": partial }),
        )?,
        Format::Csv => {
            writeln!(out, "{},searched", BoundRecord::CSV_HEADER)?;
            for c in &grid {
                writeln!(out, "{},{}", c.record.to_csv_row(), c.searched)?;
            }
        }
        Format::Text => {
            writeln!(out, "Growth rate of V(n,d) (ratio at n={})", a.mu_n_max)?;
            writeln!(out, "{:>2} {:>10} {:>22} {:>14}", "d", "mu_d", "[(2d+1)!]^(1/(2d+1))", "mu_d/(2d+1)")?;
            for r in &mu_rows {
                writeln!(
                    out,
                    "{:>2} {:>10.5} {:>22.5} {:>14.5}",
                    r.d, r.estimate, r.upper, r.estimate_over_width
                )?;
            }
            for s in &skipped {
                writeln!(out, "skipped {s}")?;
            }
            writeln!(out)?;
            writeln!(out, "Bounds on P(n,d); * = obtained through P(n+1,d+1) >= P(n,d); ? = no search run")?;
            write!(out, "{:>7}", "")?;
            for d in d_min..=d_max {
                write!(out, " {:>14}", format!("d={d}"))?;
            }
            writeln!(out)?;
            for k in offsets.clone() {
                write!(out, "{:>7}", format!("n=d+{k}"))?;
                for d in d_min..=d_max {
                    let c = grid.iter().find(|c| c.record.d == d && c.offset == k).expect("cell");
                    let mark = match (c.record.lower_provenance, c.searched) {
                        (Provenance::Tr1, _) => "*",
                        (_, false) => "?",
                        _ => "",
                    };
                    let entry = if c.record.lower == c.record.upper {
                        format!("{}{mark}", c.record.lower)
                    } else {
                        format!("{}{mark}-{}", c.record.lower, c.record.upper)
                    };
                    write!(out, " {entry:>14}")?;
                }
                writeln!(out)?;
            }
            if partial {
                writeln!(out, "partial: cells marked ? carry construction bounds only")?;
            }
        }
    }
    Ok(())
}
