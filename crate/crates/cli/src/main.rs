use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use clusteraut::grouplab::{self, GenSet, NamedDump, SearchOptions};
use clusteraut::search::{self, Mode, SearchBounds};
use clusteraut::{catalog, ClusterPattern, Error, ExchangeMatrix, MatrixFile, TreePath};

#[derive(Parser)]
#[command(name = "clusteraut", version, about = "Cluster automorphism groups from exchange matrices")]
struct Cli {
    /// Print a human-readable summary instead of JSON.
    #[arg(long, global = true)]
    text: bool,

    /// C-matrix pre-filter for identity tests.
    #[arg(long, global = true, value_enum, default_value_t = Toggle::On)]
    cfilter: Toggle,

    /// Worker threads (defaults to CLUSTERAUT_THREADS, then the number of CPUs).
    #[arg(long, global = true, env = "CLUSTERAUT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FiniteMutation,
    AcyclicSs,
    Bounded,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate a matrix along a comma-separated path (application order).
    Mutate {
        matrix: PathBuf,
        path: String,
        /// Also print the Laurent cluster at the end of the path.
        #[arg(long)]
        seed: bool,
    },
    /// Enumerate the mutation class up to the given bounds.
    Class {
        matrix: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_depth: usize,
        #[arg(long, default_value_t = 100_000)]
        max_classes: usize,
        /// Only sink/source mutations.
        #[arg(long)]
        sink_source: bool,
    },
    /// Extract a generating set of the automorphism group.
    Generators {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::FiniteMutation)]
        mode: ModeArg,
        /// Path length bound for `--mode bounded`.
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long, default_value_t = 10)]
        max_depth: usize,
        #[arg(long, default_value_t = 100_000)]
        max_classes: usize,
        #[arg(long, default_value_t = 2_000_000)]
        max_states: usize,
        /// Also write the generator list to this file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Enumerate a Cayley ball and report relations.
    Relations {
        matrix: PathBuf,
        /// Generator file: a JSON list of named dumps or a generator report.
        #[arg(long)]
        gens: PathBuf,
        /// Comma-separated subset of generator names.
        #[arg(long = "use")]
        use_names: Option<String>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_elements: usize,
        /// Relations assumed known, one per line.
        #[arg(long)]
        known: Option<PathBuf>,
    },
    /// Check relations, one per line (`w1 = w2` or `w`).
    Verify {
        matrix: PathBuf,
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        words: PathBuf,
    },
    /// Print the weighted quiver in DOT format.
    Dot { matrix: PathBuf },
    /// Print a built-in matrix as a matrix file.
    Example {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(catalog::NAMES))]
        name: String,
    },
    /// Exploratory scan of (a f^{2k})^k (a f^{-2k})^k on the X7 pattern.
    ScanX7Pattern {
        #[arg(long, default_value_t = 3)]
        k_max: u32,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::NonReducedPath { .. } | Error::BadDirection { .. } | Error::Dimension(_) => 2,
            Error::NotSkewSymmetrizable(_) => 3,
            Error::IntegerOverflow(_) => 4,
            Error::ModeUnavailable(_) | Error::ResourceBound(_) => 5,
            _ => 1,
        };
        let mut message = e.to_string();
        if let Error::NonReducedPath { label, .. } = e {
            message.push_str(&format!("; hint: mu_{label} mu_{label} is the identity, drop both steps"));
        }
        Failure { code, message }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Outcome = Result<(Value, String), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(1, format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<ExchangeMatrix, Failure> {
    let file: MatrixFile = serde_json::from_str(&read(path)?)
        .map_err(|e| fail(2, format!("{}: not a matrix file: {e}", path.display())))?;
    Ok(ExchangeMatrix::from_file(&file)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GensFile {
    List(Vec<NamedDump>),
    Report { generators: Vec<NamedDump> },
}

fn load_gens(pattern: &Arc<ClusterPattern>, path: &Path, subset: Option<&str>) -> Result<GenSet, Failure> {
    let file: GensFile = serde_json::from_str(&read(path)?)
        .map_err(|e| fail(2, format!("{}: not a generator file: {e}", path.display())))?;
    let dumps = match file {
        GensFile::List(l) => l,
        GensFile::Report { generators } => generators,
    };
    let gens = GenSet::from_dumps(pattern, &dumps)?;
    match subset {
        Some(s) => Ok(gens.subset(&s.split(',').map(str::trim).collect::<Vec<_>>())?),
        None => Ok(gens),
    }
}

fn pattern(b: ExchangeMatrix, cli: &Cli) -> Arc<ClusterPattern> {
    ClusterPattern::with_cfilter(b, cli.cfilter == Toggle::On)
}

fn rows_text(rows: &[Vec<i64>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|v| format!("{v:>4}")).collect::<String>())
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_mutate(cli: &Cli, matrix: &Path, path: &str, with_seed: bool) -> Outcome {
    let b = load_matrix(matrix)?;
    let path = TreePath::checked(
        TreePath::parse(path)?.labels().to_vec(),
        b.n(),
    )?;
    let m = b.mutate_along(path.labels())?;
    let mut out = json!({
        "path": path.labels(),
        "subscript": path.subscript(),
        "B": m.rows(),
        "arrows": m.weighted_graph().arrows.iter().map(|a| json!({"from": a.from, "to": a.to, "weight": a.label()})).collect::<Vec<_>>(),
    });
    let mut text = format!("path [{path}] (subscript {})\n{}\n", path.subscript(), rows_text(&m.rows()));
    if with_seed {
        let p = pattern(b, cli);
        let seed = p.seed(&path)?;
        let cluster: Vec<String> = seed.cluster().iter().map(|x| x.to_string()).collect();
        for (i, x) in cluster.iter().enumerate() {
            text.push_str(&format!("x{}' = {x}\n", i + 1));
        }
        out["cluster"] = json!(cluster);
    }
    Ok((out, text))
}

fn cmd_class(matrix: &Path, max_depth: usize, max_classes: usize, ss: bool) -> Outcome {
    if max_depth == 0 || max_classes == 0 {
        return Err(fail(2, "bounds must be positive"));
    }
    let b = load_matrix(matrix)?;
    let idx = search::enumerate_classes(&b, max_depth, max_classes, ss);
    let text = format!(
        "{} classes, {}{}\n{}",
        idx.len(),
        if idx.finite { "closed" } else { "truncated" },
        idx.diagnostic.as_ref().map(|d| format!(" ({d})")).unwrap_or_default(),
        idx.classes.iter().map(|c| format!("  depth {:>2}  {}", c.depth, c.key)).collect::<Vec<_>>().join("\n")
    );
    let out = json!({
        "classes": idx.len(),
        "finite": idx.finite,
        "max_depth": idx.max_depth,
        "max_classes": idx.max_classes,
        "diagnostic": idx.diagnostic,
        "entries": idx.classes,
    });
    Ok((out, text))
}

#[derive(Serialize)]
struct GenLine {
    name: String,
    kind: &'static str,
    #[serde(flatten)]
    aut: clusteraut::AutDump,
}

fn cmd_generators(cli: &Cli, matrix: &Path, mode: ModeArg, bound: usize, bounds: SearchBounds, output: Option<&Path>) -> Outcome {
    if bound == 0 || bounds.max_depth == 0 || bounds.max_classes == 0 || bounds.max_states == 0 {
        return Err(fail(2, "bounds must be positive"));
    }
    let p = pattern(load_matrix(matrix)?, cli);
    let mode = match mode {
        ModeArg::FiniteMutation => Mode::FiniteMutation,
        ModeArg::AcyclicSs => Mode::AcyclicSinkSource,
        ModeArg::Bounded => Mode::Bounded(bound),
    };
    let gens = search::extract_generators(&p, mode, bounds)?;
    let report = gens.report();
    if let Some(path) = output {
        let lines: Vec<GenLine> =
            report.generators.iter().map(|g| GenLine { name: g.name.clone(), kind: g.kind, aut: g.aut.clone() }).collect();
        let body = serde_json::to_string_pretty(&lines).expect("serializable");
        fs::write(path, body + "\n").map_err(|e| fail(1, format!("cannot write {}: {e}", path.display())))?;
    }
    let mut text = format!(
        "mode {}: {} classes, l = {}, |G0| = {}, |H1| = {} ({} paths)\n",
        report.mode, report.classes, report.l, report.g0_order, report.h1_count, report.certificate.p1_count
    );
    for (i, g) in gens.all().into_iter().enumerate() {
        text.push_str(&format!("  {:<4} {}  path [{}]\n", gens.name(i), g, g.path()));
    }
    Ok((serde_json::to_value(&report).expect("serializable"), text))
}

fn cmd_relations(cli: &Cli, matrix: &Path, gens: &Path, subset: Option<&str>, opts: SearchOptions) -> Outcome {
    let p = pattern(load_matrix(matrix)?, cli);
    let gens = load_gens(&p, gens, subset)?;
    let rep = grouplab::relation_search(&gens, &opts)?;
    let mut text = format!(
        "generators {}; ball sizes {:?}{}\n",
        rep.generators.join(", "),
        rep.ball_sizes,
        if rep.closed { " (closed)" } else { "" }
    );
    for r in &rep.relations {
        text.push_str(&format!("  {}   [{}]{}\n", r.display(), r.relator, if r.verified { "" } else { " UNVERIFIED" }));
    }
    for (name, o) in &rep.orders {
        text.push_str(&format!("  {name}: {o}\n"));
    }
    if grouplab::linear_growth(&rep) {
        text.push_str("  sphere sizes are eventually constant (consistent with a virtually cyclic group)\n");
    }
    Ok((serde_json::to_value(&rep).expect("serializable"), text))
}

fn cmd_verify(cli: &Cli, matrix: &Path, gens: &Path, words: &Path) -> Outcome {
    let p = pattern(load_matrix(matrix)?, cli);
    let gens = load_gens(&p, gens, None)?;
    let relations = grouplab::parse_relations(&read(words)?)?;
    let report = grouplab::verify_relations(&gens, &relations)?;
    let text = report
        .iter()
        .map(|r| format!("{}  {} = {}", if r.holds { "true " } else { "false" }, r.lhs, r.rhs))
        .collect::<Vec<_>>()
        .join("\n");
    Ok((json!({ "results": report }), text))
}

fn cmd_dot(matrix: &Path) -> Outcome {
    let dot = load_matrix(matrix)?.to_dot();
    Ok((Value::String(dot.clone()), dot))
}

fn cmd_example(name: &str) -> Outcome {
    let b = catalog::by_name(name).ok_or_else(|| fail(2, format!("unknown example {name}")))?;
    let file = b.to_file();
    let text = serde_json::to_string(&file).expect("serializable");
    Ok((serde_json::to_value(&file).expect("serializable"), text))
}

fn cmd_scan(cli: &Cli, k_max: u32) -> Outcome {
    let p = pattern(catalog::x7(), cli);
    let gens = GenSet::new(catalog::x7_automorphisms(&p))?;
    let obs = grouplab::scan_x7_pattern(&gens, k_max)?;
    let text = obs
        .iter()
        .map(|o| {
            format!(
                "k = {}: W = id {}, W^3 = id {} (predicted {}; path length {})",
                o.k, o.word_is_identity, o.cube_is_identity, o.predicted, o.path_len
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok((json!({ "observations": obs, "note": "exploratory observations, not theorems" }), text))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Mutate { matrix, path, seed } => cmd_mutate(cli, matrix, path, *seed),
        Command::Class { matrix, max_depth, max_classes, sink_source } => {
            cmd_class(matrix, *max_depth, *max_classes, *sink_source)
        }
        Command::Generators { matrix, mode, bound, max_depth, max_classes, max_states, output } => cmd_generators(
            cli,
            matrix,
            *mode,
            *bound,
            SearchBounds { max_depth: *max_depth, max_classes: *max_classes, max_states: *max_states },
            output.as_deref(),
        ),
        Command::Relations { matrix, gens, use_names, max_len, max_elements, known } => {
            if *max_len == 0 || *max_elements == 0 {
                return Err(fail(2, "bounds must be positive"));
            }
            let mut opts = SearchOptions::new(*max_len);
            opts.max_elements = *max_elements;
            if let Some(k) = known {
                opts.known = grouplab::parse_relations(&read(k)?)?;
            }
            cmd_relations(cli, matrix, gens, use_names.as_deref(), opts)
        }
        Command::Verify { matrix, gens, words } => cmd_verify(cli, matrix, gens, words),
        Command::Dot { matrix } => cmd_dot(matrix),
        Command::Example { name } => cmd_example(name),
        Command::ScanX7Pattern { k_max } => cmd_scan(cli, *k_max),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok((value, text)) => {
            let body = if cli.text || value.is_string() {
                text.trim_end().to_string()
            } else {
                serde_json::to_string_pretty(&value).expect("serializable")
            };
            // a closed pipe downstream is not an error
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
