//! Command-line front end.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 input error, 3 unsupported operation, 4 resource limit.

use crate::best_response::{BestResponseError, Direction, ResponseProblem};
use crate::caps::Caps;
use crate::files::{self, ParsedInstance};
use crate::game::{HiderSet, SearcherMix};
use crate::indexable::{GameSolution, IndexableError, SetFunctionGame, SetFunctionSpec};
use crate::oracle::{self, OracleError, VerifyReport};
use crate::rational::{decimal_approx, parse_rational, Rational};
use crate::sampling::sample_categorical;
use crate::tree::{sample_search_with, solve_tree, RootedTree, TreeError, TreeSolution};
use clap::{Parser, Subcommand};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Parser)]
#[command(
    name = "rescue-games",
    about = "Exact solver for zero-sum search-and-rescue games",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance in closed form and print value and strategies.
    Solve {
        /// Instance JSON file.
        file: PathBuf,
        /// For the cost families, also print the expected cost paid,
        /// f(empty) - value.
        #[arg(long)]
        cost_paid: bool,
    },
    /// Best pure search against a known hider distribution (k = 1).
    BestResponse {
        /// Instance JSON file (unstructured kinds only).
        file: PathBuf,
        /// JSON file mapping location ids to rational weights.
        #[arg(long)]
        hider: PathBuf,
        /// Minimize the payoff instead of maximizing it.
        #[arg(long)]
        min: bool,
    },
    /// Check the closed-form solution against the brute-force oracle.
    Verify {
        /// Instance JSON file.
        file: PathBuf,
        /// Tolerance for the value comparison (exact rational, default 0).
        #[arg(long, default_value = "0")]
        epsilon: String,
        /// Skip the closed form; just solve the full matrix game.
        #[arg(long)]
        oracle_only: bool,
        /// Trees: hider columns for every vertex, not only the leaves.
        #[arg(long)]
        all_vertices: bool,
    },
    /// Draw optimal searches at random, one per line.
    Sample {
        /// Instance JSON file.
        file: PathBuf,
        /// Seed for the deterministic generator.
        #[arg(long)]
        seed: u64,
        /// Number of searches to draw.
        #[arg(long, default_value = "1")]
        count: u64,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<IndexableError> for Failure {
    fn from(e: IndexableError) -> Self {
        let code = match &e {
            IndexableError::NotIndexable(_) => EXIT_UNSUPPORTED,
            IndexableError::Unsupported(_) => EXIT_UNSUPPORTED,
            IndexableError::VerificationCapExceeded { .. } => EXIT_RESOURCE,
            _ => EXIT_INPUT,
        };
        let mut message = e.to_string();
        if matches!(e, IndexableError::NotIndexable(_)) {
            message.push_str("; run `verify --oracle-only` to solve it by enumeration instead");
        }
        Failure::new(code, message)
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        let code = match &e {
            TreeError::ResourceLimit { .. } => EXIT_RESOURCE,
            _ => EXIT_INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::ResourceLimit { .. } => Failure::new(EXIT_RESOURCE, e.to_string()),
            OracleError::Tree(inner) => inner.into(),
            OracleError::Indexable(inner) => inner.into(),
            other => Failure::new(EXIT_INPUT, other.to_string()),
        }
    }
}

impl From<BestResponseError> for Failure {
    fn from(e: BestResponseError) -> Self {
        match e {
            BestResponseError::ResourceLimit { .. } => Failure::new(EXIT_RESOURCE, e.to_string()),
            BestResponseError::Indexable(inner) => inner.into(),
            other => Failure::new(EXIT_INPUT, other.to_string()),
        }
    }
}

/// Parse arguments, run the command, return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve { file, cost_paid } => cmd_solve(&file, cost_paid),
        Command::BestResponse { file, hider, min } => cmd_best_response(&file, &hider, min),
        Command::Verify {
            file,
            epsilon,
            oracle_only,
            all_vertices,
        } => cmd_verify(&file, &epsilon, oracle_only, all_vertices),
        Command::Sample { file, seed, count } => cmd_sample(&file, seed, count),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn load(path: &Path) -> Result<ParsedInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    files::parse_str(&text).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))
}

fn caps() -> Result<Caps, Failure> {
    Caps::from_env().map_err(|message| Failure::new(EXIT_INPUT, message))
}

fn show(value: &Rational) -> String {
    format!("{value} ~ {}", decimal_approx(value, 12))
}

fn kind_name(spec: &SetFunctionSpec) -> &'static str {
    match spec {
        SetFunctionSpec::Rescue { .. } => "rescue",
        SetFunctionSpec::DiscountedRescue { .. } => "discounted",
        SetFunctionSpec::AdditiveCost { .. } => "additive",
        SetFunctionSpec::TravelSearch { .. } => "travel-search",
        SetFunctionSpec::ExplicitTable { .. } => "table",
    }
}

fn cmd_solve(path: &Path, cost_paid: bool) -> Result<i32, Failure> {
    let parsed = load(path)?;
    match &parsed {
        ParsedInstance::Unstructured { game, k } => {
            if cost_paid
                && !matches!(
                    game.spec(),
                    SetFunctionSpec::AdditiveCost { .. } | SetFunctionSpec::TravelSearch { .. }
                )
            {
                return Err(Failure::new(
                    EXIT_UNSUPPORTED,
                    "--cost-paid applies to the additive and travel-search kinds only",
                ));
            }
            let solution = game.solve_closed_form(*k)?;
            print_unstructured_solution(game, *k, &solution);
            if cost_paid {
                let empty = game.eval(&Default::default())?;
                let paid = &empty - &solution.value;
                println!("expected cost paid (f(empty) - value): {}", show(&paid));
            }
            println!("instance: {}", files::to_canonical_json(&parsed));
            Ok(EXIT_OK)
        }
        ParsedInstance::Tree(tree) => {
            if cost_paid {
                return Err(Failure::new(
                    EXIT_UNSUPPORTED,
                    "--cost-paid applies to the additive and travel-search kinds only",
                ));
            }
            let solution = solve_tree(tree)?;
            print_tree_solution(tree, &solution);
            println!("instance: {}", files::to_canonical_json(&parsed));
            Ok(EXIT_OK)
        }
    }
}

fn print_unstructured_solution(game: &SetFunctionGame, k: usize, solution: &GameSolution) {
    println!(
        "kind: {}  n: {}  k: {}",
        kind_name(game.spec()),
        game.n(),
        k
    );
    println!("value: {}", show(&solution.value));
    if let Ok(z) = game.recover_z() {
        println!("index z (z of the first location = 1):");
        for (id, zi) in game.ids().iter().zip(z.values()) {
            println!("  {id}: {zi}");
        }
    }
    println!("hider mix (probability of each hiding set):");
    for (set, weight) in &solution.hider.support {
        println!("  {set}: {}", show(weight));
    }
    println!("searcher mix (search the block first, then the rest uniformly):");
    if let SearcherMix::FirstBlocks(support) = &solution.searcher {
        for (block, weight) in support {
            println!("  {block}: {}", show(weight));
        }
    }
}

fn print_tree_solution(tree: &RootedTree, solution: &TreeSolution) {
    println!("kind: tree  n: {}  root: {}", tree.n(), tree.root());
    println!("value: {}", show(&solution.value));
    println!("hider (leaf distribution):");
    for (leaf, weight) in &solution.hider {
        println!("  {leaf}: {}", show(weight));
    }
    if !solution.branch_choice.is_empty() {
        println!("branch choices (probability that the smaller-id branch goes first):");
        for (vertex, q) in &solution.branch_choice {
            println!("  {vertex}: {}", show(q));
        }
        println!("lambda (per branch vertex):");
        for (vertex, lambda) in &solution.lambdas {
            println!("  {vertex}: {lambda}");
        }
    }
    if !solution.inserted.is_empty() {
        println!(
            "inserted pass-through vertices: {}",
            solution.inserted.join(", ")
        );
    }
}

fn cmd_best_response(path: &Path, hider_path: &Path, min: bool) -> Result<i32, Failure> {
    let parsed = load(path)?;
    let ParsedInstance::Unstructured { game, k } = parsed else {
        return Err(Failure::new(
            EXIT_UNSUPPORTED,
            "best-response applies to unstructured instances only",
        ));
    };
    if k != 1 {
        return Err(Failure::new(
            EXIT_UNSUPPORTED,
            format!("best-response needs k = 1, got k = {k}"),
        ));
    }
    let text = std::fs::read_to_string(hider_path).map_err(|e| {
        Failure::new(
            EXIT_INPUT,
            format!("cannot read {}: {e}", hider_path.display()),
        )
    })?;
    let raw: std::collections::BTreeMap<String, String> = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("invalid hider file: {e}")))?;
    let mut x = vec![Rational::zero(); game.n()];
    for (id, weight) in &raw {
        let index = game.index_of(id).ok_or_else(|| {
            Failure::new(
                EXIT_INPUT,
                format!("hider file names unknown location {id:?}"),
            )
        })?;
        x[index] = parse_rational(weight)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("weight of {id:?}: {e}")))?;
    }
    let problem = ResponseProblem::new(game, x)?;
    let direction = if min {
        Direction::Minimize
    } else {
        Direction::Maximize
    };
    println!("index x_i/z_i per location:");
    for (id, ratio) in problem.game().ids().iter().zip(problem.indices()?) {
        println!("  {id}: {ratio}");
    }
    let order = problem.index_order(direction)?;
    let payoff = problem.response_payoff(&order)?;
    println!(
        "order ({}): {order}",
        if min { "minimize" } else { "maximize" }
    );
    println!("payoff: {}", show(&payoff));
    Ok(EXIT_OK)
}

fn cmd_verify(
    path: &Path,
    epsilon: &str,
    oracle_only: bool,
    all_vertices: bool,
) -> Result<i32, Failure> {
    let parsed = load(path)?;
    let caps = caps()?;
    let epsilon =
        parse_rational(epsilon).map_err(|e| Failure::new(EXIT_INPUT, format!("--epsilon: {e}")))?;
    if epsilon < Rational::zero() {
        return Err(Failure::new(EXIT_INPUT, "--epsilon must be nonnegative"));
    }

    if oracle_only {
        let matrix = match &parsed {
            ParsedInstance::Unstructured { game, k } => {
                oracle::build_matrix_gamma(game, *k, &caps)?
            }
            ParsedInstance::Tree(tree) => oracle::build_matrix_tree(tree, all_vertices, &caps)?,
        };
        let solution = oracle::solve_matrix(&matrix)?;
        println!(
            "matrix: {} searches x {} hiding choices",
            matrix.rows(),
            matrix.cols()
        );
        println!("oracle value: {}", show(&solution.value));
        println!("searcher mix (support):");
        for (label, weight) in matrix.row_labels.iter().zip(&solution.row_mix) {
            if !weight.is_zero() {
                println!("  {label}: {}", show(weight));
            }
        }
        println!("hider mix (support):");
        for (label, weight) in matrix.col_labels.iter().zip(&solution.col_mix) {
            if !weight.is_zero() {
                println!("  {label}: {}", show(weight));
            }
        }
        let (h_label, h_payoff) = &solution.certificate.hider_response;
        let (s_label, s_payoff) = &solution.certificate.searcher_response;
        println!("best hider response {h_label}: {}", show(h_payoff));
        println!("best searcher response {s_label}: {}", show(s_payoff));
        println!(
            "certificate: {}",
            if solution.certificate_tight() {
                "tight"
            } else {
                "NOT TIGHT"
            }
        );
        return Ok(EXIT_OK);
    }

    let report = match &parsed {
        ParsedInstance::Unstructured { game, k } => {
            let solution = game.solve_closed_form(*k)?;
            oracle::verify_unstructured(game, *k, &solution, &epsilon, &caps)?
        }
        ParsedInstance::Tree(tree) => {
            let solution = solve_tree(tree)?;
            oracle::verify_tree(tree, &solution, &epsilon, all_vertices, &caps)?
        }
    };
    print_report(&report);
    if report.passed() {
        println!("VERIFY: PASS");
        Ok(EXIT_OK)
    } else {
        println!("VERIFY: FAIL");
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn print_report(report: &VerifyReport) {
    println!(
        "matrix: {} searches x {} hiding choices",
        report.rows, report.cols
    );
    println!("closed-form value: {}", show(&report.closed_form_value));
    println!("oracle value: {}", show(&report.oracle_value));
    let difference = (&report.closed_form_value - &report.oracle_value).abs();
    println!(
        "difference: {} (epsilon {}): {}",
        difference,
        report.epsilon,
        if report.value_within_epsilon {
            "ok"
        } else {
            "EXCEEDED"
        }
    );
    if report.searcher_violations.is_empty() {
        println!("searcher certificate: every pure search <= value: ok");
    } else {
        println!(
            "searcher certificate: {} violations, e.g. {} earns {}",
            report.searcher_violations.len(),
            report.searcher_violations[0].strategy,
            show(&report.searcher_violations[0].payoff),
        );
    }
    if report.hider_violations.is_empty() {
        println!("hider certificate: every pure hiding choice >= value: ok");
    } else {
        println!(
            "hider certificate: {} violations, e.g. {} concedes {}",
            report.hider_violations.len(),
            report.hider_violations[0].strategy,
            show(&report.hider_violations[0].payoff),
        );
    }
    println!(
        "equalized rows: {}",
        if report.equalized_rows { "yes" } else { "no" }
    );
}

fn cmd_sample(path: &Path, seed: u64, count: u64) -> Result<i32, Failure> {
    let parsed = load(path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &parsed {
        ParsedInstance::Tree(tree) => {
            let solution = solve_tree(tree)?;
            for _ in 0..count {
                println!("{}", sample_search_with(&solution, &mut rng));
            }
        }
        ParsedInstance::Unstructured { game, k } => {
            let solution = game.solve_closed_form(*k)?;
            let SearcherMix::FirstBlocks(support) = &solution.searcher else {
                unreachable!("closed forms use first-block searcher mixes");
            };
            let weights: Vec<Rational> = support.iter().map(|(_, w)| w.clone()).collect();
            let blocks: Vec<&HiderSet> = support.iter().map(|(b, _)| b).collect();
            for _ in 0..count {
                let block = blocks[sample_categorical(&mut rng, &weights)];
                let mut sequence: Vec<String> = block.iter().map(String::from).collect();
                let mut rest: Vec<String> = game
                    .ids()
                    .iter()
                    .filter(|id| !block.contains(id))
                    .cloned()
                    .collect();
                rest.shuffle(&mut rng);
                sequence.extend(rest);
                println!("{}", sequence.join(" > "));
            }
        }
    }
    Ok(EXIT_OK)
}
