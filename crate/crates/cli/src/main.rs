use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use aliquot_core::arith::verify_goldbach;
use aliquot_core::inverse::s_inverse;
use aliquot_core::orbit::{forward_orbit_with, Classifier, ComponentResult, Config, OrbitParams, Terminal};
use aliquot_core::report::Stats;
use aliquot_core::scan::{read_scan, scan_range, scan_to_file, ScanLine, Summary, SummaryBuilder};
use aliquot_core::Error;

/// Inverse aliquot sums and aliquot graph components.
#[derive(Parser)]
#[command(name = "aliquot", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (0 = one per CPU).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Forward-orbit value bound.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Node cap for the predecessor search from a cycle.
    #[arg(long, global = true)]
    max_nodes: Option<usize>,
    /// Step cap for forward orbits.
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// TOML file with any of the settings above; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Every m with s(m) = n, for even n.
    Sinv { n: u64 },
    /// Iterate s from n.
    Orbit {
        n: u64,
        /// Also stop when m - 1 is prime.
        #[arg(long)]
        prime_stop: bool,
    },
    /// Classify the connected component of n.
    Classify {
        n: u64,
        /// Exit with status 3 when the result is indeterminate.
        #[arg(long)]
        strict: bool,
    },
    /// Classify every even n up to a limit, as JSON lines.
    Scan {
        #[arg(long)]
        limit: u64,
        /// Output file; an existing file is resumed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the finite component of n as a DOT digraph.
    Component {
        n: u64,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Cycle and component tables from a finished scan file.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check that every even n in [8, limit] is a sum of two distinct primes.
    VerifyGoldbach {
        #[arg(long)]
        limit: u64,
    },
}

mod code {
    pub const USAGE: u8 = 2;
    pub const STATUS: u8 = 3;
    pub const IO: u8 = 4;
    pub const COUNTEREXAMPLE: u8 = 5;
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) => code::USAGE,
            Error::Io(_) => code::IO,
            Error::Counterexample(_) => code::COUNTEREXAMPLE,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(code::IO, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn load_config(global: &Global) -> Result<Config, Failure> {
    let mut config = match &global.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::new(code::IO, format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Failure::new(code::USAGE, format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    if let Some(v) = global.threads {
        config.threads = v;
    }
    if let Some(v) = global.bound {
        config.bound = v;
    }
    if let Some(v) = global.max_nodes {
        config.max_nodes = v;
    }
    if let Some(v) = global.max_steps {
        config.max_steps = v;
    }
    Ok(config)
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

fn sinv(n: u64, json: bool) -> Outcome {
    let image = s_inverse(n)?;
    if json {
        print_json(&image.preimages);
    } else {
        for p in &image.preimages {
            println!("{}", p.m);
        }
    }
    Ok(())
}

fn orbit(n: u64, prime_stop: bool, config: &Config, json: bool) -> Outcome {
    let params = OrbitParams { bound: config.bound, max_steps: config.max_steps, stop_on_prime_predecessor: prime_stop };
    let outcome = forward_orbit_with(n, &params)?;
    if json {
        print_json(&outcome);
        return Ok(());
    }
    let shown = match outcome.terminal {
        Terminal::EnteredCycle { .. } => &outcome.trajectory[..outcome.trajectory.len() - 1],
        _ => &outcome.trajectory[..],
    };
    let path: Vec<String> = shown.iter().map(u64::to_string).collect();
    let tag = match &outcome.terminal {
        Terminal::ReachedOdd { m } => format!("odd {m}"),
        Terminal::PredecessorPrimeSquare { m, prime, witness } => {
            format!("prime-predecessor {m} ({prime} prime, s({witness}) = {m})")
        }
        Terminal::EnteredCycle { cycle, .. } => format!("cycle {:?}", cycle.elements()),
        Terminal::ExceededBound { value } => format!("exceeded-bound {value}"),
        Terminal::StepsExhausted { last } => format!("steps-exhausted {last}"),
    };
    println!("{} | {tag}", path.join(" "));
    Ok(())
}

fn describe(result: &ComponentResult) -> String {
    match result {
        ComponentResult::Finite(c) => format!("finite size={} nodes={:?}", c.size(), c.nodes),
        ComponentResult::PotentiallyInfinite { certificate: c } => {
            format!("potentially_infinite cert=({},{},{})", c.m, c.j, c.k)
        }
        ComponentResult::Indeterminate(i) => {
            format!("indeterminate limit={} explored={} at={}", i.limit.as_str(), i.explored, i.at)
        }
    }
}

fn classify(n: u64, strict: bool, config: Config, json: bool) -> Outcome {
    let result = Classifier::new(config).classify(n)?;
    if json {
        print_json(&json!({ "n": n, "result": result }));
    } else {
        println!("{}", describe(&result));
    }
    if strict && matches!(result, ComponentResult::Indeterminate(_)) {
        return Err(Failure::new(code::STATUS, format!("{n} is indeterminate under the current limits")));
    }
    Ok(())
}

fn print_summary(summary: &Summary, json: bool) {
    if json {
        print_json(&json!({ "summary": summary }));
        return;
    }
    let c = &summary.counts;
    println!(
        "records={} finite={} potentially_infinite={} indeterminate={}",
        summary.records, c.finite, c.potentially_infinite, c.indeterminate
    );
    let cycles: Vec<String> = summary.cycles.iter().map(|c| format!("{:?}", c.cycle.elements())).collect();
    println!("cycles: {}", cycles.join(" "));
    println!("finite components with a node <= {}: {}", summary.limit, summary.finite_components);
    for c in summary.finite() {
        println!("  {} size={} nodes={:?}", c.id, c.size().unwrap_or(0), c.nodes.as_deref().unwrap_or(&[]));
    }
    if !summary.indeterminate.is_empty() {
        println!("indeterminate: {:?}", summary.indeterminate);
    }
}

fn scan_to_stdout(limit: u64, classifier: &Classifier) -> Outcome {
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    let mut builder = SummaryBuilder::default();
    scan_range(limit, 0, classifier, &mut builder, |line| {
        writeln!(w, "{}", line.to_json()).map_err(|e| Error::Io(e.to_string()))
    })?;
    let summary = builder.finish(limit, classifier.config());
    writeln!(w, "{}", ScanLine::Summary { summary: Box::new(summary) }.to_json())?;
    w.flush()?;
    Ok(())
}

fn scan(limit: u64, out: Option<&Path>, config: Config, json: bool) -> Outcome {
    if limit < 2 {
        return Err(Failure::new(code::USAGE, "scan limit must be at least 2"));
    }
    let classifier = Classifier::new(config);
    let Some(path) = out else {
        return scan_to_stdout(limit, &classifier);
    };
    print_summary(&scan_to_file(path, limit, &classifier)?, json);
    Ok(())
}

fn component(n: u64, dot: Option<&Path>, config: Config) -> Outcome {
    let result = Classifier::new(config).classify(n)?;
    let ComponentResult::Finite(c) = result else {
        return Err(Failure::new(code::STATUS, format!("{n}: {}", describe(&result))));
    };
    let text = c.to_dot();
    match dot {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(code::IO, format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn stats(input: &Path, json: bool) -> Outcome {
    let (_, _, summary) = read_scan(input)?;
    let summary =
        summary.ok_or_else(|| Failure::new(code::IO, format!("{}: no summary line; scan incomplete", input.display())))?;
    let stats = Stats::new(&summary);
    if json {
        print_json(&stats);
    } else {
        print!("{}", stats.render());
    }
    Ok(())
}

fn goldbach(limit: u64, json: bool) -> Outcome {
    match verify_goldbach(limit) {
        Ok(r) => {
            if json {
                print_json(&json!({ "ok": true, "limit": r.limit, "max_min_p": r.max_min_p, "at": r.max_min_p_at }));
            } else {
                println!("ok, max minimal p = {} (n = {})", r.max_min_p, r.max_min_p_at);
            }
            Ok(())
        }
        Err(Error::Counterexample(n)) => {
            println!("counterexample: {n}");
            Err(Failure::new(code::COUNTEREXAMPLE, format!("{n} is not a sum of two distinct primes")))
        }
        Err(e) => Err(e.into()),
    }
}

fn run(cli: Cli) -> Outcome {
    let config = load_config(&cli.global)?;
    if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .map_err(|e| Failure::new(1, e.to_string()))?;
    }
    let json = cli.global.json;
    match cli.command {
        Command::Sinv { n } => sinv(n, json),
        Command::Orbit { n, prime_stop } => orbit(n, prime_stop, &config, json),
        Command::Classify { n, strict } => classify(n, strict, config, json),
        Command::Scan { limit, out } => scan(limit, out.as_deref(), config, json),
        Command::Component { n, dot } => component(n, dot.as_deref(), config),
        Command::Stats { input } => stats(&input, json),
        Command::VerifyGoldbach { limit } => goldbach(limit, json),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("aliquot: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
