//! Independent brute-force verification.
//!
//! The oracle builds the entire payoff matrix of the finite zero-sum game
//! (every pure search against every pure hiding choice), solves it with an
//! exact rational simplex, and certifies closed-form solutions against it:
//! the closed-form value must match the matrix-game value, every pure
//! search must earn at most the value against the closed-form hider mix,
//! and every pure hiding choice must concede at least the value against
//! the closed-form searcher mix. Everything is exact, so the certificates
//! are equalities and inequalities on rationals, not tolerances.

mod simplex;

use crate::caps::Caps;
use crate::game::{Instance, SearcherMix};
use crate::indexable::{k_subset_masks, GameSolution, IndexableError, SetFunctionGame};
use crate::rational::Rational;
use crate::tree::{
    enumerate_expanding_searches, expected_payoff_at_vertex, is_depth_first, ExpandingSearch,
    RootedTree, TreeError, TreeSolution,
};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("matrix of {needed} entries exceeds the cap of {cap}")]
    ResourceLimit { needed: u128, cap: u64 },
    #[error("empty payoff matrix")]
    EmptyMatrix,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Indexable(#[from] IndexableError),
    #[error("solution does not fit the game: {0}")]
    MismatchedSolution(String),
}

/// The full payoff matrix of a finite zero-sum game; rows are searcher
/// pure strategies (the maximizer), columns are hider pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub payoffs: Vec<Vec<Rational>>,
}

impl MatrixGame {
    pub fn rows(&self) -> usize {
        self.payoffs.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }
}

/// Best pure responses to the oracle's own mixed strategies; with an
/// exact solver both payoffs equal the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Minimizing column against the row mix: (label, payoff).
    pub hider_response: (String, Rational),
    /// Maximizing row against the column mix: (label, payoff).
    pub searcher_response: (String, Rational),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub value: Rational,
    pub row_mix: Vec<Rational>,
    pub col_mix: Vec<Rational>,
    pub certificate: Certificate,
}

impl OracleSolution {
    /// Whether both best responses hit the value exactly.
    pub fn certificate_tight(&self) -> bool {
        self.certificate.hider_response.1 == self.value
            && self.certificate.searcher_response.1 == self.value
    }
}

fn factorial_u128(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, u128::checked_mul)
}

fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.checked_mul((n - i) as u128)?;
        result /= (i + 1) as u128;
    }
    Some(result)
}

/// All orderings of the game's locations in lexicographic id order.
fn lex_permutations(game: &SetFunctionGame) -> Vec<Vec<usize>> {
    let mut by_id: Vec<usize> = (0..game.n()).collect();
    by_id.sort_by(|&a, &b| game.ids()[a].cmp(&game.ids()[b]));
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(by_id.len());
    let mut used = vec![false; by_id.len()];
    fn walk(
        by_id: &[usize],
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == by_id.len() {
            out.push(current.clone());
            return;
        }
        for slot in 0..by_id.len() {
            if used[slot] {
                continue;
            }
            used[slot] = true;
            current.push(by_id[slot]);
            walk(by_id, used, current, out);
            current.pop();
            used[slot] = false;
        }
    }
    walk(&by_id, &mut used, &mut current, &mut out);
    out
}

/// Payoff matrix of a set-function game with `k` targets: all `n!`
/// orderings against all k-subsets.
pub fn build_matrix_gamma(
    game: &SetFunctionGame,
    k: usize,
    caps: &Caps,
) -> Result<MatrixGame, OracleError> {
    let n = game.n();
    if k < 1 || k > n {
        return Err(OracleError::MismatchedSolution(format!(
            "cannot build a matrix for k = {k} over {n} locations"
        )));
    }
    let needed = factorial_u128(n)
        .zip(binomial_u128(n, k))
        .and_then(|(rows, cols)| rows.checked_mul(cols));
    match needed {
        Some(entries) if entries <= caps.matrix_entries as u128 => {}
        entries => {
            return Err(OracleError::ResourceLimit {
                needed: entries.unwrap_or(u128::MAX),
                cap: caps.matrix_entries,
            })
        }
    }

    let cols = k_subset_masks(n, k);
    let col_members: Vec<Vec<usize>> = cols
        .iter()
        .map(|&mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    let col_labels: Vec<String> = cols
        .iter()
        .map(|&mask| format!("{{{}}}", game.id_set(mask).join(",")))
        .collect();

    let mut row_labels = Vec::new();
    let mut payoffs = Vec::new();
    for sequence in lex_permutations(game) {
        let mut position = vec![0usize; n];
        for (t, &v) in sequence.iter().enumerate() {
            position[v] = t;
        }
        let mut prefix_values = Vec::with_capacity(n);
        let mut f = game.eval_mask(0);
        let mut prefix = 0u64;
        for &v in &sequence {
            f = game.eval_after_adding(&f, prefix, v);
            prefix |= 1 << v;
            prefix_values.push(f.clone());
        }
        let row: Vec<Rational> = col_members
            .iter()
            .map(|members| {
                let covered = members.iter().map(|&i| position[i]).max().unwrap();
                prefix_values[covered].clone()
            })
            .collect();
        row_labels.push(
            sequence
                .iter()
                .map(|&v| game.ids()[v].clone())
                .collect::<Vec<_>>()
                .join(">"),
        );
        payoffs.push(row);
    }

    Ok(MatrixGame {
        row_labels,
        col_labels,
        payoffs,
    })
}

/// Payoff matrix of an unstructured rescue instance.
pub fn build_matrix_unstructured(
    instance: &Instance,
    caps: &Caps,
) -> Result<MatrixGame, OracleError> {
    let game = SetFunctionGame::rescue_from_instance(instance)?;
    build_matrix_gamma(&game, instance.k(), caps)
}

fn tree_matrix_parts(
    tree: &RootedTree,
    all_vertices: bool,
    caps: &Caps,
) -> Result<(MatrixGame, Vec<ExpandingSearch>), OracleError> {
    let searches = enumerate_expanding_searches(tree, caps.expanding_searches)?;
    let col_ids: Vec<String> = if all_vertices {
        let mut ids: Vec<String> = tree.vertices().iter().map(|(id, _)| id.clone()).collect();
        ids.sort();
        ids
    } else {
        tree.leaves()?
    };
    let needed = (searches.len() as u128) * (col_ids.len() as u128);
    if needed > caps.matrix_entries as u128 {
        return Err(OracleError::ResourceLimit {
            needed,
            cap: caps.matrix_entries,
        });
    }

    let prob: BTreeMap<&str, &Rational> = tree
        .vertices()
        .iter()
        .map(|(id, p)| (id.as_str(), p))
        .collect();
    let col_index: BTreeMap<&str, usize> = col_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let mut payoffs = Vec::with_capacity(searches.len());
    let mut row_labels = Vec::with_capacity(searches.len());
    for search in &searches {
        let mut row = vec![Rational::zero(); col_ids.len()];
        let mut survival = Rational::one();
        for id in search.sequence() {
            survival *= prob[id.as_str()];
            if let Some(&c) = col_index.get(id.as_str()) {
                row[c] = survival.clone();
            }
        }
        row_labels.push(search.sequence().join(">"));
        payoffs.push(row);
    }

    Ok((
        MatrixGame {
            row_labels,
            col_labels: col_ids,
            payoffs,
        },
        searches,
    ))
}

/// Payoff matrix of the tree game: all expanding searches against the
/// leaves (hiding anywhere else is dominated), or against every vertex
/// when `all_vertices` is set.
pub fn build_matrix_tree(
    tree: &RootedTree,
    all_vertices: bool,
    caps: &Caps,
) -> Result<MatrixGame, OracleError> {
    tree_matrix_parts(tree, all_vertices, caps).map(|(matrix, _)| matrix)
}

/// Solve a matrix game exactly and certify the result with both players'
/// best pure responses.
pub fn solve_matrix(game: &MatrixGame) -> Result<OracleSolution, OracleError> {
    if game.payoffs.is_empty() || game.payoffs[0].is_empty() {
        return Err(OracleError::EmptyMatrix);
    }
    let (value, row_mix, col_mix) = simplex::solve_zero_sum(&game.payoffs);

    let mut hider_response: Option<(usize, Rational)> = None;
    for j in 0..game.cols() {
        let payoff: Rational = (0..game.rows())
            .map(|i| &row_mix[i] * &game.payoffs[i][j])
            .sum();
        if hider_response
            .as_ref()
            .is_none_or(|(_, best)| payoff < *best)
        {
            hider_response = Some((j, payoff));
        }
    }
    let mut searcher_response: Option<(usize, Rational)> = None;
    for (i, row) in game.payoffs.iter().enumerate() {
        let payoff: Rational = row.iter().zip(&col_mix).map(|(a, w)| a * w).sum();
        if searcher_response
            .as_ref()
            .is_none_or(|(_, best)| payoff > *best)
        {
            searcher_response = Some((i, payoff));
        }
    }
    let (hj, hp) = hider_response.expect("nonempty");
    let (si, sp) = searcher_response.expect("nonempty");

    Ok(OracleSolution {
        value,
        row_mix,
        col_mix,
        certificate: Certificate {
            hider_response: (game.col_labels[hj].clone(), hp),
            searcher_response: (game.row_labels[si].clone(), sp),
        },
    })
}

/// A pure strategy that breaks a certificate, with the payoff it earns.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub strategy: String,
    pub payoff: Rational,
}

/// Outcome of verifying a closed-form solution against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub closed_form_value: Rational,
    pub oracle_value: Rational,
    pub epsilon: Rational,
    pub value_within_epsilon: bool,
    /// Pure searches earning strictly more than the value against the
    /// closed-form hider mix.
    pub searcher_violations: Vec<Counterexample>,
    /// Pure hider strategies conceding strictly less than the value
    /// against the closed-form searcher mix.
    pub hider_violations: Vec<Counterexample>,
    /// Unstructured games: every pure search earns exactly the value
    /// against the hider mix. Trees: every depth-first search does.
    pub equalized_rows: bool,
    pub rows: usize,
    pub cols: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.value_within_epsilon
            && self.searcher_violations.is_empty()
            && self.hider_violations.is_empty()
    }
}

/// Verify a closed-form solution of a set-function game against the
/// oracle: value comparison within `epsilon` plus exact strategy
/// certificates in both directions.
pub fn verify_unstructured(
    game: &SetFunctionGame,
    k: usize,
    solution: &GameSolution,
    epsilon: &Rational,
    caps: &Caps,
) -> Result<VerifyReport, OracleError> {
    let matrix = build_matrix_gamma(game, k, caps)?;
    let oracle = solve_matrix(&matrix)?;

    // Column weights of the closed-form hider mix.
    let cols = k_subset_masks(game.n(), k);
    let mut weights = vec![Rational::zero(); cols.len()];
    for (set, weight) in &solution.hider.support {
        let mask = game.mask_of(set.iter())?;
        let index = cols.iter().position(|&m| m == mask).ok_or_else(|| {
            OracleError::MismatchedSolution(format!("hider set {set} is not a {k}-subset"))
        })?;
        weights[index] = weight.clone();
    }

    let mut searcher_violations = Vec::new();
    let mut equalized_rows = true;
    for (i, row) in matrix.payoffs.iter().enumerate() {
        let payoff: Rational = row.iter().zip(&weights).map(|(a, w)| a * w).sum();
        if payoff != solution.value {
            equalized_rows = false;
        }
        if payoff > solution.value {
            searcher_violations.push(Counterexample {
                strategy: matrix.row_labels[i].clone(),
                payoff,
            });
        }
    }

    let mut hider_violations = Vec::new();
    for (j, &hider_mask) in cols.iter().enumerate() {
        let payoff = match &solution.searcher {
            SearcherMix::FirstBlocks(support) => {
                let mut total = Rational::zero();
                for (block, weight) in support {
                    let block_mask = game.mask_of(block.iter())?;
                    total += weight * game.first_block_expectation(hider_mask, block_mask);
                }
                total
            }
            SearcherMix::Orders(support) => {
                let mut total = Rational::zero();
                for (order, weight) in support {
                    let sequence = game.order_indices(order)?;
                    total += weight * game.pure_payoff_masked(hider_mask, &sequence);
                }
                total
            }
        };
        if payoff < solution.value {
            hider_violations.push(Counterexample {
                strategy: matrix.col_labels[j].clone(),
                payoff,
            });
        }
    }

    let difference = (&solution.value - &oracle.value).abs();
    Ok(VerifyReport {
        closed_form_value: solution.value.clone(),
        oracle_value: oracle.value,
        epsilon: epsilon.clone(),
        value_within_epsilon: difference <= *epsilon,
        searcher_violations,
        hider_violations,
        equalized_rows,
        rows: matrix.rows(),
        cols: matrix.cols(),
    })
}

/// Verify a tree solution against the oracle over the full expanding
/// search strategy space.
pub fn verify_tree(
    tree: &RootedTree,
    solution: &TreeSolution,
    epsilon: &Rational,
    all_vertices: bool,
    caps: &Caps,
) -> Result<VerifyReport, OracleError> {
    let (matrix, searches) = tree_matrix_parts(tree, all_vertices, caps)?;
    let oracle = solve_matrix(&matrix)?;

    let mut weights = vec![Rational::zero(); matrix.cols()];
    for (leaf, weight) in &solution.hider {
        let index = matrix
            .col_labels
            .iter()
            .position(|id| id == leaf)
            .ok_or_else(|| {
                OracleError::MismatchedSolution(format!(
                    "hider weight on {leaf:?}, which is not a matrix column"
                ))
            })?;
        weights[index] = weight.clone();
    }

    let mut searcher_violations = Vec::new();
    let mut equalized_rows = true;
    for ((row, label), search) in matrix.payoffs.iter().zip(&matrix.row_labels).zip(&searches) {
        let payoff: Rational = row.iter().zip(&weights).map(|(a, w)| a * w).sum();
        if payoff > solution.value {
            searcher_violations.push(Counterexample {
                strategy: label.clone(),
                payoff: payoff.clone(),
            });
        }
        if payoff != solution.value && is_depth_first(tree, search)? {
            equalized_rows = false;
        }
    }

    let mut hider_violations = Vec::new();
    for label in &matrix.col_labels {
        let payoff = expected_payoff_at_vertex(solution, label)?;
        if payoff < solution.value {
            hider_violations.push(Counterexample {
                strategy: label.clone(),
                payoff,
            });
        }
    }

    let difference = (&solution.value - &oracle.value).abs();
    Ok(VerifyReport {
        closed_form_value: solution.value.clone(),
        oracle_value: oracle.value,
        epsilon: epsilon.clone(),
        value_within_epsilon: difference <= *epsilon,
        searcher_violations,
        hider_violations,
        equalized_rows,
        rows: matrix.rows(),
        cols: matrix.cols(),
    })
}
