//! Command-line front end for the microasp pipeline: grounding, solving,
//! model checking, completion, benchmark generation, and the default-logic
//! engine. Every subcommand reads stdin when FILE is `-`, prints exactly one
//! `error:` line to stderr on failure, and uses SAT-competition exit codes
//! (10 sat, 20 unsat) for the search commands.

use clap::{Parser, Subcommand};
use microasp::default_logic::{
    extensions, program_to_defaults, query, DefaultTheory, Lit, QueryMode, TranslateError,
};
use microasp::ground::GroundProgram;
use microasp::grounder::{ground, ground_stats};
use microasp::oracle::{
    clark_completion, enumerate_bruteforce, format_formula, is_tight, OracleError,
    DEFAULT_ORACLE_LIMIT,
};
use microasp::solver::{solve_with, Heuristic, SearchConfig, SolveError};
use microasp::theorybase::{encode, make_graph, BenchmarkSpec, Encoded, EncodeError, Problem, Target};
use std::collections::BTreeSet;
use std::io::Read;
use std::process::exit;

#[derive(Parser)]
#[command(name = "microasp", version, about = "A miniature answer set programming toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground a program and print the result.
    Ground {
        /// Program file, or `-` for stdin.
        file: String,
        /// Print one atoms/rules/bodyliterals summary line instead.
        #[arg(long)]
        stats: bool,
    },
    /// Enumerate stable models.
    Solve {
        /// Program file, or `-` for stdin.
        file: String,
        /// How many models to report; 0 enumerates all of them.
        #[arg(short = 'n', default_value_t = 1)]
        models: usize,
        /// Branching heuristic: occurrence or first-unassigned.
        #[arg(long, default_value = "occurrence")]
        heuristic: String,
        /// Reserved for randomized tie-breaking; accepted for reproducibility.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether the given atom set is a stable model.
    Check {
        /// Program file, or `-` for stdin.
        file: String,
        /// Space-separated atom names, e.g. --model "a b c".
        #[arg(long)]
        model: String,
    },
    /// Enumerate stable models by brute force over all atom subsets.
    Oracle {
        /// Program file, or `-` for stdin.
        file: String,
        /// Largest atom count accepted; defaults to MICROASP_ORACLE_LIMIT or 20.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Print the Clark completion clauses and the tightness verdict.
    Complete {
        /// Program file, or `-` for stdin.
        file: String,
    },
    /// Generate a benchmark instance from a graph family.
    Bench {
        /// Problem name: coloring, hamiltonian, kernel, independentset, vertexcover.
        #[arg(long)]
        problem: String,
        /// Graph family with parameters, e.g. cycle(5) or random(8,12,7).
        #[arg(long)]
        graph: String,
        /// Parameter for coloring, independentset, and vertexcover.
        #[arg(long)]
        k: Option<u32>,
        /// What to print: program, default, or graph.
        #[arg(long)]
        emit: String,
    },
    /// Enumerate the extensions of a default theory.
    DlSolve {
        /// Default theory file, or `-` for stdin.
        file: String,
    },
    /// Ask whether one literal follows bravely or skeptically.
    DlQuery {
        /// Default theory file, or `-` for stdin.
        file: String,
        /// Literal to test, e.g. a or -a.
        #[arg(long, allow_hyphen_values = true)]
        lit: String,
        /// Reasoning mode: brave or skeptical.
        #[arg(long)]
        mode: String,
    },
    /// Translate a ground normal/constraint program into a default theory.
    Translate {
        /// Program file, or `-` for stdin.
        file: String,
        /// Target formalism; only `default` is supported.
        #[arg(long)]
        to: String,
    },
}

/// A diagnosed failure: the message goes to stderr as one `error:` line and
/// the code becomes the process exit status.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    fn unsupported(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

fn main() {
    // Die quietly when the consumer closes the pipe (`microasp ... | head`),
    // like any other filter, instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => report_clap_error(e),
    };
    match run(cli.command) {
        Ok(code) => exit(code),
        Err(f) => {
            // Validation diagnostics already carry a severity prefix.
            let message = f.message.strip_prefix("error: ").unwrap_or(&f.message);
            eprintln!("error: {message}");
            exit(f.code);
        }
    }
}

/// clap reports help and version through its error type; real argument
/// problems are flattened to one line so the stderr contract holds.
fn report_clap_error(e: clap::Error) -> ! {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        print!("{e}");
        exit(0);
    }
    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
        eprintln!("error: a subcommand is required; run with --help for usage");
        exit(1);
    }
    let text = e.to_string();
    let mut parts: Vec<&str> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("Usage:") {
            break;
        }
        parts.push(line);
    }
    let joined = parts.join(" ");
    let message = joined.strip_prefix("error: ").unwrap_or(&joined);
    eprintln!("error: {message}");
    exit(1);
}

fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Ground { file, stats } => cmd_ground(&file, stats),
        Command::Solve { file, models, heuristic, seed } => {
            cmd_solve(&file, models, &heuristic, seed)
        }
        Command::Check { file, model } => cmd_check(&file, &model),
        Command::Oracle { file, limit } => cmd_oracle(&file, limit),
        Command::Complete { file } => cmd_complete(&file),
        Command::Bench { problem, graph, k, emit } => cmd_bench(&problem, &graph, k, &emit),
        Command::DlSolve { file } => cmd_dl_solve(&file),
        Command::DlQuery { file, lit, mode } => cmd_dl_query(&file, &lit, &mode),
        Command::Translate { file, to } => cmd_translate(&file, &to),
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read '{path}': {e}")))
}

fn load_ground(path: &str) -> Result<GroundProgram, Failure> {
    let text = read_input(path)?;
    let program = microasp::parse_program(&text).map_err(|e| Failure::parse(e.to_string()))?;
    ground(&program).map_err(|e| Failure::validation(e.to_string()))
}

fn load_theory(path: &str) -> Result<DefaultTheory, Failure> {
    let text = read_input(path)?;
    microasp::parse_default_theory(&text).map_err(|e| Failure::parse(e.to_string()))
}

/// `Answer: <i>` then the model's atom names, ascending by atom id.
fn print_model(gp: &GroundProgram, index: usize, atoms: &[microasp::ground::AtomId]) {
    println!("Answer: {index}");
    let names: Vec<String> = atoms.iter().map(|&a| gp.atoms.name(a)).collect();
    println!("{}", names.join(" "));
}

fn sat_code(model_count: usize) -> i32 {
    if model_count > 0 {
        10
    } else {
        20
    }
}

fn cmd_ground(file: &str, stats: bool) -> Result<i32, Failure> {
    let gp = load_ground(file)?;
    if stats {
        let s = ground_stats(&gp);
        println!("atoms={} rules={} bodyliterals={}", s.atoms, s.rules, s.body_literals);
    } else {
        print!("{gp}");
    }
    Ok(0)
}

fn cmd_solve(file: &str, models: usize, heuristic: &str, seed: u64) -> Result<i32, Failure> {
    let heuristic = match heuristic {
        "occurrence" => Heuristic::Occurrence,
        "first-unassigned" => Heuristic::FirstUnassigned,
        other => {
            return Err(Failure::usage(format!(
                "unknown heuristic '{other}': expected occurrence or first-unassigned"
            )))
        }
    };
    let gp = load_ground(file)?;
    let cfg = SearchConfig { max_models: models, heuristic, seed, ..SearchConfig::default() };
    let result = solve_with(&gp, &cfg, |i, atoms| print_model(&gp, i, atoms))
        .map_err(|e: SolveError| Failure::validation(e.to_string()))?;
    let suffix = if result.truncated { "+" } else { "" };
    println!("Models: {}{suffix}", result.models.len());
    Ok(sat_code(result.models.len()))
}

fn cmd_check(file: &str, model: &str) -> Result<i32, Failure> {
    let gp = load_ground(file)?;
    let mut candidate = BTreeSet::new();
    let mut known = true;
    for name in model.split_whitespace() {
        match gp.atoms.lookup_name(name) {
            Some(id) => {
                candidate.insert(id);
            }
            // An atom foreign to the program can never be in a stable model.
            None => known = false,
        }
    }
    let stable = known && microasp::solver::check_model(&gp, &candidate);
    if stable {
        println!("STABLE");
        Ok(10)
    } else {
        println!("NOT STABLE");
        Ok(20)
    }
}

fn cmd_oracle(file: &str, limit: Option<usize>) -> Result<i32, Failure> {
    let limit = match limit {
        Some(l) => l,
        None => match std::env::var("MICROASP_ORACLE_LIMIT") {
            Ok(raw) => raw
                .parse()
                .map_err(|_| Failure::usage(format!("invalid MICROASP_ORACLE_LIMIT '{raw}'")))?,
            Err(_) => DEFAULT_ORACLE_LIMIT,
        },
    };
    let gp = load_ground(file)?;
    let ms = enumerate_bruteforce(&gp, limit).map_err(map_oracle_error)?;
    for (i, m) in ms.models.iter().enumerate() {
        print_model(&gp, i + 1, m);
    }
    println!("Models: {}", ms.len());
    Ok(sat_code(ms.len()))
}

fn cmd_complete(file: &str) -> Result<i32, Failure> {
    let gp = load_ground(file)?;
    let cf = clark_completion(&gp).map_err(map_oracle_error)?;
    for clause in &cf.clauses {
        println!("{}", format_formula(clause, &gp.atoms));
    }
    let tight = is_tight(&gp).map_err(map_oracle_error)?;
    println!("{}", if tight { "TIGHT" } else { "NOT TIGHT" });
    Ok(0)
}

fn map_oracle_error(e: OracleError) -> Failure {
    match e {
        OracleError::Unsupported(_) => Failure::unsupported(e.to_string()),
        OracleError::TooManyAtoms { .. } => Failure::validation(e.to_string()),
    }
}

fn cmd_bench(problem: &str, graph: &str, k: Option<u32>, emit: &str) -> Result<i32, Failure> {
    let problem: Problem = problem.parse().map_err(|e| Failure::usage(format!("{e}")))?;
    let graph = make_graph(graph).map_err(|e| Failure::usage(e.to_string()))?;
    let target = match emit {
        "graph" => {
            print!("{}", graph.to_file_text());
            return Ok(0);
        }
        "program" => Target::Program,
        "default" => Target::Defaults,
        other => {
            return Err(Failure::usage(format!(
                "unknown emit target '{other}': expected program, default, or graph"
            )))
        }
    };
    let spec = BenchmarkSpec { problem, k, target };
    match encode(&graph, &spec).map_err(map_encode_error)? {
        Encoded::Program(p) => print!("{p}"),
        Encoded::Theory(t) => print!("{t}"),
    }
    Ok(0)
}

fn map_encode_error(e: EncodeError) -> Failure {
    match e {
        EncodeError::MissingK(_) => Failure::usage(e.to_string()),
        EncodeError::TooSmall => Failure::validation(e.to_string()),
        EncodeError::NoDefaultTarget(_) => Failure::unsupported(e.to_string()),
        EncodeError::TooLarge => Failure::validation(e.to_string()),
    }
}

fn cmd_dl_solve(file: &str) -> Result<i32, Failure> {
    let theory = load_theory(file)?;
    let exts = extensions(&theory);
    for (i, ext) in exts.extensions.iter().enumerate() {
        println!("Extension: {}", i + 1);
        println!("{}", ext.literals);
    }
    println!("Extensions: {}", exts.len());
    Ok(sat_code(exts.len()))
}

fn cmd_dl_query(file: &str, lit: &str, mode: &str) -> Result<i32, Failure> {
    let mode = match mode {
        "brave" => QueryMode::Brave,
        "skeptical" => QueryMode::Skeptical,
        other => {
            return Err(Failure::usage(format!(
                "unknown mode '{other}': expected brave or skeptical"
            )))
        }
    };
    let lit: Lit = lit.parse().map_err(|e| Failure::usage(format!("{e}")))?;
    let theory = load_theory(file)?;
    if query(&theory, &lit, mode) {
        println!("YES");
        Ok(10)
    } else {
        println!("NO");
        Ok(20)
    }
}

fn cmd_translate(file: &str, to: &str) -> Result<i32, Failure> {
    if to != "default" {
        return Err(Failure::usage(format!(
            "unknown translation target '{to}': only default is supported"
        )));
    }
    let gp = load_ground(file)?;
    let theory = program_to_defaults(&gp).map_err(|e| match e {
        TranslateError::Unsupported(_) => Failure::unsupported(e.to_string()),
    })?;
    print!("{theory}");
    Ok(0)
}
