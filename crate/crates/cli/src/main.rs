//! `stemcode`: similarity kernels, critical distances, and DNA code
//! construction from the command line.
//!
//! Every command resolves a weight table from `--weights`, either
//! `builtin:<name>` or a path to a table file. Output defaults to plain
//! text; `--format json` renders the same result as a JSON document.
//! Exit status: 0 on success, 1 on a domain error, 2 on a usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stemcode::codes::DEFAULT_SEARCH_LIMIT;
use stemcode::critical::DEFAULT_TOLERANCE;
use stemcode::{
    code_min_distance, conditional_model, construct_repetition_code, duplex_energy,
    exhaustive_max_code, generate_markov_code, is_valid_dna_code, load_builtin, load_code_file,
    load_table_file, maximize_critical, rate_estimate, stem_distance, stem_similarity,
    BuiltinTableId, CodeParams, DnaCode, Stem, Strand, TransitionModel, WeightTable,
};

#[derive(Parser)]
#[command(
    name = "stemcode",
    version,
    about = "Additive stem similarity, critical distances, and DNA codes",
    arg_required_else_help = true
)]
struct Cli {
    /// Weight table: `builtin:<name>` or a path to a table file.
    #[arg(long, global = true, default_value = "builtin:Unified1998")]
    weights: String,

    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Similarity S_w(x, y) of two equal-length strands.
    Sim { x: String, y: String },
    /// Distance D_w(x, y) = S_w(x, x) - S_w(x, y). Asymmetric.
    Dist { x: String, y: String },
    /// Duplex energy S_w(x, reverse_complement(y)).
    Energy { x: String, y: String },
    /// Critical relative distance: optimal stem distribution, T value,
    /// forbidden stems, and the regularity verdict.
    Critical {
        /// Optimizer convergence tolerance.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// One summary row per builtin table: T, forbidden-set label, regularity.
    Tables,
    /// The 16-word alternating repetition code at odd length n. The text
    /// output is a valid code file (one strand per line).
    Xr {
        #[arg(long)]
        n: usize,
    },
    /// Randomly grow a code by sampling a base-level Markov chain and
    /// keeping reverse-complement pairs that respect the distance threshold.
    Gen {
        /// Codeword length.
        #[arg(long)]
        n: usize,
        /// Distance threshold D.
        #[arg(long)]
        distance: f64,
        /// Number of chain samples to draw.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Sample from the uniform chain instead of the chain induced by the
        /// weight table's optimal stem distribution.
        #[arg(long)]
        uniform_chain: bool,
    },
    /// Check a code file against a distance threshold and report violations.
    Verify {
        /// Code file: one strand per line, `#` comments ignored.
        #[arg(long)]
        code: PathBuf,
        /// Distance threshold D.
        #[arg(long)]
        distance: f64,
    },
    /// Exhaustive maximum-size code search (small n only).
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        distance: f64,
        /// Refuse instances with 4^n above this cap.
        #[arg(long, default_value_t = DEFAULT_SEARCH_LIMIT)]
        limit: u64,
    },
    /// Finite-length rate log4(N) / n.
    Rate {
        /// Code size N.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        /// Codeword length n.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            use std::io::Write;
            let mut stdout = std::io::stdout();
            let result = stdout.write_all(output.as_bytes()).and_then(|()| stdout.flush());
            match result {
                Ok(()) => ExitCode::SUCCESS,
                // a closed pipe (e.g. `stemcode xr --n 5 | head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> stemcode::Result<String> {
    let w = resolve_weights(&cli.weights)?;
    let json = cli.format == Format::Json;
    let output = match &cli.command {
        Command::Sim { x, y } => {
            let value = stem_similarity(&w, &x.parse()?, &y.parse()?)?;
            render_value("similarity", value, json)
        }
        Command::Dist { x, y } => {
            let value = stem_distance(&w, &x.parse()?, &y.parse()?)?;
            render_value("distance", value, json)
        }
        Command::Energy { x, y } => {
            let value = duplex_energy(&w, &x.parse()?, &y.parse()?)?;
            render_value("energy", value, json)
        }
        Command::Critical { tolerance } => {
            let report = maximize_critical(&w, *tolerance)?;
            if json {
                format!("{}\n", serde_json::to_string_pretty(&report.to_json()).unwrap())
            } else {
                report.render_text()
            }
        }
        Command::Tables => render_tables(json)?,
        Command::Xr { n } => {
            let code = construct_repetition_code(*n)?;
            render_code(&w, &code, None, json)?
        }
        Command::Gen {
            n,
            distance,
            trials,
            seed,
            uniform_chain,
        } => {
            let params = CodeParams::new(*n, *distance)?;
            let model = if *uniform_chain {
                TransitionModel::uniform()
            } else {
                let report = maximize_critical(&w, DEFAULT_TOLERANCE)?;
                conditional_model(&report.optimum)?
            };
            let code = generate_markov_code(&w, &model, params, *trials, *seed)?;
            render_code(&w, &code, None, json)?
        }
        Command::Verify { code, distance } => {
            let code = load_code_file(code)?;
            let (ok, report) = is_valid_dna_code(&w, &code, *distance)?;
            if json {
                let closure: Vec<String> =
                    report.closure.iter().map(|v| v.to_string()).collect();
                let pairs: Vec<serde_json::Value> = report
                    .pairs
                    .iter()
                    .map(|v| {
                        serde_json::json!({
                            "left": v.left.to_string(),
                            "right": v.right.to_string(),
                            "distance": round6(v.distance),
                        })
                    })
                    .collect();
                let doc = serde_json::json!({
                    "valid": ok,
                    "closure_violations": closure,
                    "pair_violations": pairs,
                });
                format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
            } else {
                use std::fmt::Write;
                let mut out = format!("valid: {ok}\n");
                for v in &report.closure {
                    writeln!(out, "closure violation: {v}").unwrap();
                }
                for v in &report.pairs {
                    writeln!(out, "pair violation: {v}").unwrap();
                }
                out
            }
        }
        Command::Search { n, distance, limit } => {
            let params = CodeParams::new(*n, *distance)?;
            let (code, exact) = exhaustive_max_code(&w, params, *limit)?;
            render_code(&w, &code, Some(exact), json)?
        }
        Command::Rate { size, n } => {
            let value = rate_estimate(*size as usize, *n as usize);
            render_value("rate", value, json)
        }
    };
    Ok(output)
}

fn resolve_weights(source: &str) -> stemcode::Result<WeightTable> {
    match source.strip_prefix("builtin:") {
        Some(name) => Ok(load_builtin(name.parse::<BuiltinTableId>()?)),
        None => load_table_file(Path::new(source)),
    }
}

fn render_value(key: &str, value: f64, json: bool) -> String {
    if json {
        format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::json!({ key: round6(value) })).unwrap()
        )
    } else {
        format!("{}\n", format_number(value))
    }
}

/// Code listing: text output is itself a valid code file, with the summary
/// carried by a leading `#` comment.
fn render_code(
    w: &WeightTable,
    code: &DnaCode,
    exact: Option<bool>,
    json: bool,
) -> stemcode::Result<String> {
    let min_distance = if code.is_empty() {
        None
    } else {
        Some(code_min_distance(w, code)?)
    };
    let rate = code
        .word_length()
        .map(|n| rate_estimate(code.len(), n));
    if json {
        let words: Vec<String> = code.words().iter().map(Strand::to_string).collect();
        let mut doc = serde_json::json!({
            "size": code.len(),
            "min_distance": min_distance.map(round6),
            "rate": rate.map(round6),
            "codewords": words,
        });
        if let Some(exact) = exact {
            doc["exact"] = serde_json::json!(exact);
        }
        Ok(format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
    } else {
        use std::fmt::Write;
        let mut out = format!("# size {}", code.len());
        if let Some(d) = min_distance {
            write!(out, " min-distance {}", format_number(d)).unwrap();
        }
        if let Some(r) = rate {
            write!(out, " rate {}", format_number(r)).unwrap();
        }
        if let Some(exact) = exact {
            write!(out, " exact {exact}").unwrap();
        }
        out.push('\n');
        for word in code.words() {
            writeln!(out, "{word}").unwrap();
        }
        Ok(out)
    }
}

fn render_tables(json: bool) -> stemcode::Result<String> {
    let mut rows = Vec::new();
    for id in BuiltinTableId::ALL {
        let report = maximize_critical(&load_builtin(id), DEFAULT_TOLERANCE)?;
        rows.push((id, report));
    }
    if json {
        let docs: Vec<serde_json::Value> = rows
            .iter()
            .map(|(id, report)| {
                let forbidden: Vec<String> =
                    report.forbidden_stems.iter().map(Stem::to_string).collect();
                serde_json::json!({
                    "table": id.name(),
                    "t_value": round6(report.t_value),
                    "forbidden": forbidden,
                    "label": forbidden_label(&report.forbidden_stems),
                    "regular": report.regular,
                })
            })
            .collect();
        Ok(format!("{}\n", serde_json::to_string_pretty(&docs).unwrap()))
    } else {
        use std::fmt::Write;
        let mut out = format!("{:<16} {:>5}  {:<9} regular\n", "table", "T", "forbidden");
        for (id, report) in &rows {
            writeln!(
                out,
                "{:<16} {:>5.2}  {:<9} {}",
                id.name(),
                report.t_value,
                forbidden_label(&report.forbidden_stems),
                report.regular
            )
            .unwrap();
        }
        Ok(out)
    }
}

/// Short name for the two recurring forbidden sets: `L4` is the four-stem
/// A/T block {AA, AT, TA, TT}, `L6` adds {AG, CT}.
fn forbidden_label(stems: &[Stem]) -> String {
    let names: Vec<String> = stems.iter().map(Stem::to_string).collect();
    if names == ["AA", "AT", "TA", "TT"] {
        "L4".to_string()
    } else if names == ["AA", "AG", "AT", "CT", "TA", "TT"] {
        "L6".to_string()
    } else {
        format!("other({})", names.len())
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Up to six decimals with trailing zeros trimmed: 4.61 prints as "4.61",
/// not "4.610000".
fn format_number(x: f64) -> String {
    let mut s = format!("{x:.6}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}
