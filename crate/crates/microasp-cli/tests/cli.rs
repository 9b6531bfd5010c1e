//! End-to-end tests for the binary: exact stdout bytes, the one-line stderr
//! contract, and the exit-code scheme (0 ok, 1 usage, 2 parse, 3 validation,
//! 4 unsupported, 10 sat, 20 unsat).

use std::io::Write;
use std::process::{Command, Stdio};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_with(args: &[&str], stdin: &str, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_microasp"));
    cmd.args(args)
        .env_remove("MICROASP_ORACLE_LIMIT")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn microasp");
    // A usage error can exit before stdin is read; the broken pipe is fine.
    if let Err(e) = child.stdin.take().expect("stdin handle").write_all(stdin.as_bytes()) {
        assert_eq!(e.kind(), std::io::ErrorKind::BrokenPipe, "write stdin: {e}");
    }
    let out = child.wait_with_output().expect("wait for microasp");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

fn run(args: &[&str], stdin: &str) -> Output {
    run_with(args, stdin, &[])
}

/// Every failure is exactly one stderr line starting with `error:` and
/// nothing on stdout.
fn assert_failure(out: &Output, code: i32) {
    assert_eq!(out.code, code, "stderr: {}", out.stderr);
    assert_eq!(out.stdout, "", "failures must not print to stdout");
    assert_eq!(out.stderr.lines().count(), 1, "stderr: {}", out.stderr);
    assert!(out.stderr.starts_with("error: "), "stderr: {}", out.stderr);
    assert!(out.stderr.ends_with('\n'));
}

const EVEN_LOOP: &str = "a :- not b. b :- not a.";

#[test]
fn solve_enumerates_models_in_discovery_order() {
    let out = run(&["solve", "-", "-n", "0"], EVEN_LOOP);
    assert_eq!(out.stdout, "Answer: 1\na\nAnswer: 2\nb\nModels: 2\n");
    assert_eq!(out.stderr, "");
    assert_eq!(out.code, 10);
}

#[test]
fn solve_defaults_to_one_model_and_marks_truncation() {
    let out = run(&["solve", "-"], EVEN_LOOP);
    assert_eq!(out.stdout, "Answer: 1\na\nModels: 1+\n");
    assert_eq!(out.code, 10);
}

#[test]
fn solve_reports_unsat_with_exit_20() {
    let out = run(&["solve", "-", "-n", "0"], "a :- not a.");
    assert_eq!(out.stdout, "Models: 0\n");
    assert_eq!(out.code, 20);
}

#[test]
fn solve_accepts_the_alternate_heuristic() {
    let out = run(&["solve", "-", "-n", "0", "--heuristic", "first-unassigned"], EVEN_LOOP);
    assert_eq!(out.stdout, "Answer: 1\na\nAnswer: 2\nb\nModels: 2\n");
    assert_eq!(out.code, 10);
}

#[test]
fn solve_rejects_an_unknown_heuristic() {
    let out = run(&["solve", "-", "--heuristic", "bogus"], EVEN_LOOP);
    assert_failure(&out, 1);
    assert!(out.stderr.contains("unknown heuristic 'bogus'"));
}

#[test]
fn stdout_is_byte_identical_across_runs() {
    let program = "{ p; q }. r :- p, not q. :- p, q.";
    let a = run(&["solve", "-", "-n", "0"], program);
    let b = run(&["solve", "-", "-n", "0"], program);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.code, b.code);
}

#[cfg(unix)]
#[test]
fn truncated_output_pipe_does_not_panic() {
    // `microasp ... | head` closes our stdout early; the process must go
    // down with SIGPIPE like any filter, not with a panic backtrace.
    let out = Command::new("sh")
        .arg("-c")
        .arg(format!(
            "printf 'p(X,Y) :- q(X), q(Y). q(a). q(b). q(c). q(d).' | {} ground - | head -1",
            env!("CARGO_BIN_EXE_microasp")
        ))
        .output()
        .expect("run pipeline");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr, "", "pipeline leaked stderr: {stderr}");
}

#[test]
fn ground_prints_the_instantiated_program() {
    let out = run(&["ground", "-"], EVEN_LOOP);
    assert_eq!(out.stdout, "a :- not b.\nb :- not a.\n");
    assert_eq!(out.code, 0);
}

#[test]
fn ground_stats_prints_one_summary_line() {
    let out = run(&["ground", "-", "--stats"], EVEN_LOOP);
    assert_eq!(out.stdout, "atoms=2 rules=2 bodyliterals=2\n");
    assert_eq!(out.code, 0);
}

#[test]
fn parse_errors_exit_2() {
    let out = run(&["ground", "-"], "a :-");
    assert_failure(&out, 2);
}

#[test]
fn unsafe_variables_exit_3() {
    let out = run(&["ground", "-"], "p(X).");
    assert_failure(&out, 3);
    assert!(out.stderr.contains("unsafe variable 'X'"));
}

#[test]
fn unreadable_files_exit_1() {
    let out = run(&["ground", "/no/such/file"], "");
    assert_failure(&out, 1);
}

#[test]
fn missing_subcommand_exits_1() {
    let out = run(&[], "");
    assert_failure(&out, 1);
    assert_eq!(out.stderr, "error: a subcommand is required; run with --help for usage\n");
}

#[test]
fn unknown_flags_exit_1() {
    let out = run(&["solve", "--bogus", "x"], "");
    assert_failure(&out, 1);
}

#[test]
fn check_accepts_a_stable_model() {
    let out = run(&["check", "-", "--model", "a"], EVEN_LOOP);
    assert_eq!(out.stdout, "STABLE\n");
    assert_eq!(out.code, 10);
}

#[test]
fn check_rejects_a_non_model() {
    let out = run(&["check", "-", "--model", "a b"], EVEN_LOOP);
    assert_eq!(out.stdout, "NOT STABLE\n");
    assert_eq!(out.code, 20);
}

#[test]
fn check_treats_foreign_atoms_as_not_stable() {
    let out = run(&["check", "-", "--model", "zzz"], EVEN_LOOP);
    assert_eq!(out.stdout, "NOT STABLE\n");
    assert_eq!(out.code, 20);
}

#[test]
fn oracle_lists_models_in_bitset_order() {
    let out = run(&["oracle", "-"], EVEN_LOOP);
    assert_eq!(out.stdout, "Answer: 1\nb\nAnswer: 2\na\nModels: 2\n");
    assert_eq!(out.code, 10);
}

#[test]
fn oracle_limit_env_is_respected() {
    let out = run_with(&["oracle", "-"], EVEN_LOOP, &[("MICROASP_ORACLE_LIMIT", "1")]);
    assert_failure(&out, 3);
    assert!(out.stderr.contains("exceeding the brute-force limit of 1"));
}

#[test]
fn oracle_limit_env_must_be_a_number() {
    let out = run_with(&["oracle", "-"], EVEN_LOOP, &[("MICROASP_ORACLE_LIMIT", "abc")]);
    assert_failure(&out, 1);
}

#[test]
fn oracle_limit_flag_overrides_the_env() {
    let out = run_with(
        &["oracle", "-", "--limit", "20"],
        EVEN_LOOP,
        &[("MICROASP_ORACLE_LIMIT", "1")],
    );
    assert_eq!(out.stdout, "Answer: 1\nb\nAnswer: 2\na\nModels: 2\n");
    assert_eq!(out.code, 10);
}

#[test]
fn complete_prints_clauses_and_tight_verdict() {
    let out = run(&["complete", "-"], "a :- b. b :- a. c :- not c.");
    assert_eq!(out.stdout, "c | c\n-c | -c\nTIGHT\n");
    assert_eq!(out.code, 0);
}

#[test]
fn complete_detects_a_derivable_positive_loop() {
    let out = run(&["complete", "-"], "a :- b. b :- a. a :- not c. c :- not a.");
    assert!(out.stdout.ends_with("NOT TIGHT\n"), "stdout: {}", out.stdout);
    assert_eq!(out.code, 0);
}

#[test]
fn complete_rejects_choice_rules_as_unsupported() {
    let out = run(&["complete", "-"], "{a}. b :- a.");
    assert_failure(&out, 4);
}

#[test]
fn translate_emits_a_default_theory() {
    let out = run(&["translate", "-", "--to", "default"], "a :- not b.");
    assert_eq!(out.stdout, "fact: a.\n");
    assert_eq!(out.code, 0);
}

#[test]
fn translate_rejects_choice_rules_as_unsupported() {
    let out = run(&["translate", "-", "--to", "default"], "{a}. b :- a.");
    assert_failure(&out, 4);
    assert!(out.stderr.contains("choice"));
}

#[test]
fn translate_rejects_unknown_targets() {
    let out = run(&["translate", "-", "--to", "cnf"], "a.");
    assert_failure(&out, 1);
}

#[test]
fn bench_program_feeds_back_into_solve() {
    let bench = run(
        &["bench", "--problem", "coloring", "--graph", "cycle(3)", "--k", "3", "--emit", "program"],
        "",
    );
    assert_eq!(bench.code, 0);
    let solved = run(&["solve", "-", "-n", "0"], &bench.stdout);
    assert!(solved.stdout.ends_with("Models: 6\n"), "stdout: {}", solved.stdout);
    assert_eq!(solved.code, 10);
}

#[test]
fn bench_kernel_counts_dicycle_orientations() {
    let bench = run(
        &["bench", "--problem", "kernel", "--graph", "dicycle(4)", "--emit", "program"],
        "",
    );
    let solved = run(&["solve", "-", "-n", "0"], &bench.stdout);
    assert!(solved.stdout.ends_with("Models: 2\n"), "stdout: {}", solved.stdout);
}

#[test]
fn bench_emits_the_graph_file() {
    let out = run(
        &["bench", "--problem", "coloring", "--graph", "cycle(3)", "--k", "3", "--emit", "graph"],
        "",
    );
    assert_eq!(out.stdout, "c id cycle(3)\np graph 3 3 undirected\ne 1 2\ne 1 3\ne 2 3\n");
    assert_eq!(out.code, 0);
}

#[test]
fn bench_requires_k_where_the_problem_does() {
    let out = run(
        &["bench", "--problem", "coloring", "--graph", "cycle(3)", "--emit", "program"],
        "",
    );
    assert_failure(&out, 1);
    assert!(out.stderr.contains("requires k"));
}

#[test]
fn bench_reports_missing_default_encodings_as_unsupported() {
    let out = run(
        &["bench", "--problem", "hamiltonian", "--graph", "cycle(3)", "--emit", "default"],
        "",
    );
    assert_failure(&out, 4);
}

#[test]
fn bench_rejects_unknown_problems_and_families() {
    let out = run(&["bench", "--problem", "bogus", "--graph", "cycle(3)", "--emit", "program"], "");
    assert_failure(&out, 1);
    let out = run(
        &["bench", "--problem", "coloring", "--graph", "blob(3)", "--k", "3", "--emit", "program"],
        "",
    );
    assert_failure(&out, 1);
}

const NIXON: &str = "fact: republican & quaker.\n\
    d: republican : -pacifist / -pacifist.\n\
    d: quaker : pacifist / pacifist.\n";

#[test]
fn dl_solve_lists_both_nixon_extensions() {
    let out = run(&["dl-solve", "-"], NIXON);
    assert_eq!(
        out.stdout,
        "Extension: 1\n-pacifist quaker republican\n\
         Extension: 2\npacifist quaker republican\nExtensions: 2\n"
    );
    assert_eq!(out.code, 10);
}

#[test]
fn dl_solve_exits_20_without_extensions() {
    let out = run(&["dl-solve", "-"], "d: true : a / -a.\n");
    assert_eq!(out.stdout, "Extensions: 0\n");
    assert_eq!(out.code, 20);
}

const PENGUIN: &str = "fact: bird & penguin.\n\
    d: bird : flies / flies.\n\
    d: penguin : / -flies.\n";

#[test]
fn dl_query_answers_yes_on_skeptical_consequence() {
    let out = run(&["dl-query", "-", "--lit", "-flies", "--mode", "skeptical"], PENGUIN);
    assert_eq!(out.stdout, "YES\n");
    assert_eq!(out.code, 10);
}

#[test]
fn dl_query_answers_no_when_nothing_supports_the_literal() {
    let out = run(&["dl-query", "-", "--lit", "flies", "--mode", "brave"], PENGUIN);
    assert_eq!(out.stdout, "NO\n");
    assert_eq!(out.code, 20);
}

#[test]
fn dl_query_rejects_unknown_modes() {
    let out = run(&["dl-query", "-", "--lit", "a", "--mode", "sideways"], PENGUIN);
    assert_failure(&out, 1);
}
