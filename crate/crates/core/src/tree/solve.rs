//! Recursive solution of the tree game.
//!
//! Working on the normalized tree (at most two children per vertex), the
//! solver computes for every subtree its value `V` and survival product,
//! and at every branch vertex a normalizing factor `lambda` and the
//! probability `q` that the first branch (the one whose root has the
//! smaller id) is searched first:
//!
//! * leaf `v`: `V = p_v`, the hider weight concentrates on `v`;
//! * one child: `V = p_v * V_child`;
//! * two children: `lambda = 1 / ((1-pi_1)/V_1 + (1-pi_2)/V_2)`, the
//!   branch gets hider mass `lambda (1-pi_i)/V_i`,
//!   `V = p_v * lambda * (1 - pi_1 pi_2)`, and
//!   `q = lambda * (1/V_1 - pi_2/V_2)`.
//!
//! The resulting hider distribution makes every depth-first search yield
//! exactly `V`, and the branch-choice searcher strategy guarantees `V`
//! against every vertex, which the oracle module checks independently.

use super::{normalize_degree3, RootedTree, Topology, TreeError};
use crate::rational::Rational;
use crate::sampling::bernoulli_exact;
use crate::tree::ExpandingSearch;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Exact solution of the tree game.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSolution {
    /// Value of the game.
    pub value: Rational,
    /// Optimal hider distribution, supported on the leaves of the
    /// original tree.
    pub hider: BTreeMap<String, Rational>,
    /// At each branch vertex, the probability that the branch whose root
    /// has the smaller id is searched first. Keys may include inserted
    /// pass-through vertices when the input needed normalization.
    pub branch_choice: BTreeMap<String, Rational>,
    /// Normalizing factor of each branch vertex's subtree.
    pub lambdas: BTreeMap<String, Rational>,
    /// Value of the subtree rooted at each vertex of the normalized tree.
    pub subtree_values: BTreeMap<String, Rational>,
    /// Survival product of the subtree rooted at each vertex.
    pub subtree_survival: BTreeMap<String, Rational>,
    /// The degree-normalized tree the recursion ran on.
    pub normalized: RootedTree,
    /// Pass-through vertices inserted by normalization, if any.
    pub inserted: Vec<String>,
}

impl TreeSolution {
    fn inserted_set(&self) -> BTreeSet<&str> {
        self.inserted.iter().map(|s| s.as_str()).collect()
    }
}

/// Solve the tree game exactly. Arbitrary valid trees are accepted; the
/// tree is degree-normalized internally when necessary.
pub fn solve_tree(tree: &RootedTree) -> Result<TreeSolution, TreeError> {
    let normalization = normalize_degree3(tree)?;
    let top = Topology::build(&normalization.tree).map_err(TreeError::Invalid)?;

    struct Outputs {
        branch_choice: BTreeMap<String, Rational>,
        lambdas: BTreeMap<String, Rational>,
        subtree_values: BTreeMap<String, Rational>,
        subtree_survival: BTreeMap<String, Rational>,
    }

    // Returns (value, survival, hider distribution within the subtree).
    fn solve(
        top: &Topology,
        v: usize,
        out: &mut Outputs,
    ) -> (Rational, Rational, Vec<(usize, Rational)>) {
        let p = top.p[v].clone();
        let (value, survival, hider) = match top.children[v].as_slice() {
            [] => (p.clone(), p, vec![(v, Rational::one())]),
            [child] => {
                let (value, survival, hider) = solve(top, *child, out);
                (&top.p[v] * value, &top.p[v] * survival, hider)
            }
            [first, second] => {
                let (value_1, survival_1, hider_1) = solve(top, *first, out);
                let (value_2, survival_2, hider_2) = solve(top, *second, out);
                let stretch_1 = (Rational::one() - &survival_1) / &value_1;
                let stretch_2 = (Rational::one() - &survival_2) / &value_2;
                let lambda = (stretch_1.clone() + &stretch_2).recip();
                let mass_1 = &lambda * stretch_1;
                let mass_2 = &lambda * stretch_2;
                let q_first = &lambda * (value_1.recip() - &survival_2 / &value_2);
                out.lambdas.insert(top.ids[v].clone(), lambda.clone());
                out.branch_choice.insert(top.ids[v].clone(), q_first);

                let mut hider = Vec::with_capacity(hider_1.len() + hider_2.len());
                for (leaf, w) in hider_1 {
                    hider.push((leaf, w * &mass_1));
                }
                for (leaf, w) in hider_2 {
                    hider.push((leaf, w * &mass_2));
                }
                let survival_both = &survival_1 * &survival_2;
                let value = &top.p[v] * &lambda * (Rational::one() - &survival_both);
                (value, &top.p[v] * survival_both, hider)
            }
            more => unreachable!("normalized trees have at most 2 children, found {more:?}"),
        };
        out.subtree_values.insert(top.ids[v].clone(), value.clone());
        out.subtree_survival
            .insert(top.ids[v].clone(), survival.clone());
        (value, survival, hider)
    }

    let mut outputs = Outputs {
        branch_choice: BTreeMap::new(),
        lambdas: BTreeMap::new(),
        subtree_values: BTreeMap::new(),
        subtree_survival: BTreeMap::new(),
    };
    let (value, _, hider) = solve(&top, top.root, &mut outputs);

    Ok(TreeSolution {
        value,
        hider: hider
            .into_iter()
            .map(|(v, w)| (top.ids[v].clone(), w))
            .collect(),
        branch_choice: outputs.branch_choice,
        lambdas: outputs.lambdas,
        subtree_values: outputs.subtree_values,
        subtree_survival: outputs.subtree_survival,
        normalized: normalization.tree,
        inserted: normalization.inserted,
    })
}

/// Draw one depth-first search from the optimal branch-choice strategy,
/// deterministically for a given seed. The returned search is on the
/// original tree (inserted pass-through vertices are dropped).
pub fn sample_search(solution: &TreeSolution, seed: u64) -> ExpandingSearch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_search_with(solution, &mut rng)
}

/// As [`sample_search`], drawing from a caller-supplied generator.
pub fn sample_search_with<R: Rng + ?Sized>(
    solution: &TreeSolution,
    rng: &mut R,
) -> ExpandingSearch {
    let top = Topology::build(&solution.normalized).expect("solved trees are valid");
    let inserted = solution.inserted_set();
    let mut sequence = Vec::with_capacity(top.n());

    fn visit<R: Rng + ?Sized>(
        top: &Topology,
        solution: &TreeSolution,
        inserted: &BTreeSet<&str>,
        rng: &mut R,
        v: usize,
        sequence: &mut Vec<String>,
    ) {
        if !inserted.contains(top.ids[v].as_str()) {
            sequence.push(top.ids[v].clone());
        }
        match top.children[v].as_slice() {
            [] => {}
            [child] => visit(top, solution, inserted, rng, *child, sequence),
            [first, second] => {
                let q = &solution.branch_choice[&top.ids[v]];
                let (a, b) = if bernoulli_exact(rng, q) {
                    (*first, *second)
                } else {
                    (*second, *first)
                };
                visit(top, solution, inserted, rng, a, sequence);
                visit(top, solution, inserted, rng, b, sequence);
            }
            more => unreachable!("normalized trees have at most 2 children, found {more:?}"),
        }
    }

    visit(&top, solution, &inserted, rng, top.root, &mut sequence);
    ExpandingSearch::new(sequence)
}

/// Exact expected payoff of the optimal branch-choice strategy against a
/// hider sitting at `leaf` (a leaf of the original tree).
pub fn searcher_guarantee(solution: &TreeSolution, leaf: &str) -> Result<Rational, TreeError> {
    let top = Topology::build(&solution.normalized).expect("solved trees are valid");
    let v = resolve_original(solution, &top, leaf)?;
    if !top.children[v].is_empty() {
        return Err(TreeError::NotALeaf(leaf.to_string()));
    }
    Ok(guarantee_at(solution, &top, v))
}

/// Exact expected payoff of the optimal branch-choice strategy against a
/// hider at any vertex of the original tree; hiding at internal vertices
/// is dominated but still evaluates.
pub fn expected_payoff_at_vertex(
    solution: &TreeSolution,
    vertex: &str,
) -> Result<Rational, TreeError> {
    let top = Topology::build(&solution.normalized).expect("solved trees are valid");
    let v = resolve_original(solution, &top, vertex)?;
    Ok(guarantee_at(solution, &top, v))
}

fn resolve_original(solution: &TreeSolution, top: &Topology, id: &str) -> Result<usize, TreeError> {
    if solution.inserted_set().contains(id) {
        return Err(TreeError::UnknownVertex(id.to_string()));
    }
    top.index_of(id)
        .ok_or_else(|| TreeError::UnknownVertex(id.to_string()))
}

fn guarantee_at(solution: &TreeSolution, top: &Topology, target: usize) -> Rational {
    // Ancestor chain of the target, for picking the branch that holds it.
    let mut on_path = vec![false; top.n()];
    let mut walk = Some(target);
    while let Some(v) = walk {
        on_path[v] = true;
        walk = top.parent[v];
    }

    fn descend(
        solution: &TreeSolution,
        top: &Topology,
        on_path: &[bool],
        v: usize,
        target: usize,
    ) -> Rational {
        if v == target {
            return top.p[v].clone();
        }
        match top.children[v].as_slice() {
            [child] => &top.p[v] * descend(solution, top, on_path, *child, target),
            [first, second] => {
                let q_first = &solution.branch_choice[&top.ids[v]];
                let (holder, other, q_holder) = if on_path[*first] {
                    (*first, *second, q_first.clone())
                } else {
                    (*second, *first, Rational::one() - q_first)
                };
                let other_survival = &solution.subtree_survival[&top.ids[other]];
                let reach = &q_holder + (Rational::one() - &q_holder) * other_survival;
                &top.p[v] * reach * descend(solution, top, on_path, holder, target)
            }
            _ => unreachable!("target must lie below an ancestor"),
        }
    }

    descend(solution, top, &on_path, top.root, target)
}
