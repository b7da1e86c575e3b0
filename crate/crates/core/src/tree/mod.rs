//! The single-target search-and-rescue game on rooted trees under
//! expanding search.
//!
//! The Hider picks a vertex of a rooted tree; the Searcher reveals
//! vertices one at a time starting from the root, each new vertex adjacent
//! to one already revealed. Searching vertex `v` survives with probability
//! `p_v`. Internal vertices may have `p_v = 1` (searching them is safe);
//! a non-root leaf with `p_v = 1` is rejected because it could simply be
//! dropped from the tree.
//!
//! The solver in [`solve`] works on trees in which every vertex has at
//! most two children; [`normalize_degree3`] rewrites arbitrary trees into
//! that shape by inserting pass-through vertices with `p = 1`, without
//! changing the value of the game.

mod solve;

pub use solve::{
    expected_payoff_at_vertex, sample_search, sample_search_with, searcher_guarantee, solve_tree,
    TreeSolution,
};

use crate::rational::Rational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A rooted tree with per-vertex survival probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    vertices: Vec<(String, Rational)>,
    edges: Vec<(String, String)>,
    root: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeIssue {
    NoVertices,
    DuplicateVertex(String),
    UnknownRoot(String),
    UnknownEdgeEndpoint(String),
    SelfLoop(String),
    DuplicateEdge(String, String),
    Disconnected,
    WrongEdgeCount { edges: usize, vertices: usize },
    ProbabilityOutOfRange { id: String, p: Rational },
    CertainLeaf { id: String },
}

impl fmt::Display for TreeIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeIssue::NoVertices => write!(f, "tree has no vertices"),
            TreeIssue::DuplicateVertex(id) => write!(f, "duplicate vertex id {id:?}"),
            TreeIssue::UnknownRoot(id) => write!(f, "root {id:?} is not a vertex"),
            TreeIssue::UnknownEdgeEndpoint(id) => {
                write!(f, "edge endpoint {id:?} is not a vertex")
            }
            TreeIssue::SelfLoop(id) => write!(f, "self-loop at {id:?}"),
            TreeIssue::DuplicateEdge(a, b) => write!(f, "duplicate edge ({a:?}, {b:?})"),
            TreeIssue::Disconnected => write!(f, "graph is not connected"),
            TreeIssue::WrongEdgeCount { edges, vertices } => {
                write!(f, "{edges} edges cannot form a tree on {vertices} vertices")
            }
            TreeIssue::ProbabilityOutOfRange { id, p } => {
                write!(f, "vertex {id:?} has p = {p}, which is not in (0,1]")
            }
            TreeIssue::CertainLeaf { id } => write!(
                f,
                "non-root leaf {id:?} has p = 1 and should be removed from the tree"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("invalid tree: {}", format_issues(.0))]
    Invalid(Vec<TreeIssue>),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("vertex {0:?} is not a leaf")]
    NotALeaf(String),
    #[error("not a subsearch: {0}")]
    NotASubsearch(String),
    #[error("not an expanding search: {0}")]
    NotExpanding(String),
    #[error("subsearch index is undefined because the block survives with probability 1")]
    UndefinedIndex,
    #[error("enumeration of {count} searches exceeds the cap of {cap}")]
    ResourceLimit { count: u128, cap: u64 },
    #[error("invalid hider weights: {0}")]
    InvalidWeights(String),
}

fn format_issues(issues: &[TreeIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl RootedTree {
    pub fn new<V, E, S>(vertices: V, edges: E, root: S) -> Self
    where
        V: IntoIterator<Item = (S, Rational)>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        RootedTree {
            vertices: vertices.into_iter().map(|(id, p)| (id.into(), p)).collect(),
            edges: edges
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
            root: root.into(),
        }
    }

    pub fn vertices(&self) -> &[(String, Rational)] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn probability(&self, id: &str) -> Option<&Rational> {
        self.vertices
            .iter()
            .find(|(vid, _)| vid == id)
            .map(|(_, p)| p)
    }

    /// Check every tree invariant and report all violations.
    pub fn validate(&self) -> Result<(), Vec<TreeIssue>> {
        Topology::build(self).map(|_| ())
    }

    /// Leaves of the rooted tree (vertices without children), ascending by id.
    pub fn leaves(&self) -> Result<Vec<String>, TreeError> {
        let top = Topology::build(self).map_err(TreeError::Invalid)?;
        Ok(top
            .by_id_rank()
            .into_iter()
            .filter(|&v| top.children[v].is_empty())
            .map(|v| top.ids[v].clone())
            .collect())
    }
}

/// Product of `p_v` over a set of vertex ids (1 for the empty set).
pub fn pi(tree: &RootedTree, members: &BTreeSet<String>) -> Result<Rational, TreeError> {
    let mut product = Rational::one();
    for id in members {
        let p = tree
            .probability(id)
            .ok_or_else(|| TreeError::UnknownVertex(id.clone()))?;
        product *= p;
    }
    Ok(product)
}

/// Validated index-based view of a rooted tree.
pub(crate) struct Topology {
    pub ids: Vec<String>,
    pub p: Vec<Rational>,
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    /// Children sorted ascending by id; the "first" branch at a branch
    /// vertex is always `children[v][0]`.
    pub children: Vec<Vec<usize>>,
}

impl Topology {
    pub fn build(tree: &RootedTree) -> Result<Topology, Vec<TreeIssue>> {
        let mut issues = Vec::new();
        let n = tree.vertices.len();
        if n == 0 {
            return Err(vec![TreeIssue::NoVertices]);
        }

        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, (id, _)) in tree.vertices.iter().enumerate() {
            if index.insert(id.as_str(), i).is_some() {
                issues.push(TreeIssue::DuplicateVertex(id.clone()));
            }
        }

        let root = match index.get(tree.root.as_str()) {
            Some(&r) => r,
            None => {
                issues.push(TreeIssue::UnknownRoot(tree.root.clone()));
                0
            }
        };

        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut usable_edges = 0usize;
        for (a, b) in &tree.edges {
            let (ia, ib) = match (index.get(a.as_str()), index.get(b.as_str())) {
                (Some(&ia), Some(&ib)) => (ia, ib),
                (ia, ib) => {
                    if ia.is_none() {
                        issues.push(TreeIssue::UnknownEdgeEndpoint(a.clone()));
                    }
                    if ib.is_none() {
                        issues.push(TreeIssue::UnknownEdgeEndpoint(b.clone()));
                    }
                    continue;
                }
            };
            if ia == ib {
                issues.push(TreeIssue::SelfLoop(a.clone()));
                continue;
            }
            let key = (ia.min(ib), ia.max(ib));
            if !seen_edges.insert(key) {
                issues.push(TreeIssue::DuplicateEdge(a.clone(), b.clone()));
                continue;
            }
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
            usable_edges += 1;
        }

        for (id, p) in &tree.vertices {
            if *p <= Rational::zero() || *p > Rational::one() {
                issues.push(TreeIssue::ProbabilityOutOfRange {
                    id: id.clone(),
                    p: p.clone(),
                });
            }
        }

        // Orient the tree by breadth-first search from the root.
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut visited = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        visited[root] = true;
        queue.push_back(root);
        let mut reached = 1usize;
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    children[v].push(w);
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != n {
            issues.push(TreeIssue::Disconnected);
        }
        if usable_edges + 1 != n {
            issues.push(TreeIssue::WrongEdgeCount {
                edges: usable_edges,
                vertices: n,
            });
        }

        let ids: Vec<String> = tree.vertices.iter().map(|(id, _)| id.clone()).collect();
        for kids in children.iter_mut() {
            kids.sort_by(|&a, &b| ids[a].cmp(&ids[b]));
        }

        if issues.is_empty() {
            for v in 0..n {
                let is_leaf = children[v].is_empty();
                if v != root && is_leaf && tree.vertices[v].1.is_one() {
                    issues.push(TreeIssue::CertainLeaf { id: ids[v].clone() });
                }
            }
        }

        if !issues.is_empty() {
            return Err(issues);
        }
        Ok(Topology {
            ids,
            p: tree.vertices.iter().map(|(_, p)| p.clone()).collect(),
            root,
            parent,
            children,
        })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    /// Vertex indices sorted ascending by id.
    pub fn by_id_rank(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| self.ids[a].cmp(&self.ids[b]));
        order
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![1usize; self.n()];
        for &v in self.depth_order().iter().rev() {
            for &c in &self.children[v] {
                sizes[v] += sizes[c];
            }
        }
        sizes
    }

    /// Vertices in a parent-before-child order.
    pub fn depth_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in &self.children[v] {
                stack.push(c);
            }
        }
        order
    }
}

/// An expanding search: a permutation of the vertices starting at the root
/// in which every vertex is adjacent to an earlier one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandingSearch {
    sequence: Vec<String>,
}

impl ExpandingSearch {
    pub fn new<I, S>(sequence: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ExpandingSearch {
            sequence: sequence.into_iter().map(Into::into).collect(),
        }
    }

    pub fn sequence(&self) -> &[String] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

impl fmt::Display for ExpandingSearch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sequence.join(" > "))
    }
}

/// A contiguous block of some expanding search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsearch {
    sequence: Vec<String>,
}

impl Subsearch {
    /// Validate that `sequence` can appear as a contiguous block of an
    /// expanding search of `tree`. A block not containing the root only
    /// needs each member's parent, when itself in the block, to appear
    /// earlier; a block containing the root must be an expanding prefix.
    pub fn new<I, S>(tree: &RootedTree, sequence: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sequence: Vec<String> = sequence.into_iter().map(Into::into).collect();
        let top = Topology::build(tree).map_err(TreeError::Invalid)?;
        if sequence.is_empty() {
            return Err(TreeError::NotASubsearch("empty block".to_string()));
        }
        let mut position: BTreeMap<usize, usize> = BTreeMap::new();
        for (t, id) in sequence.iter().enumerate() {
            let v = top
                .index_of(id)
                .ok_or_else(|| TreeError::UnknownVertex(id.clone()))?;
            if position.insert(v, t).is_some() {
                return Err(TreeError::NotASubsearch(format!(
                    "vertex {id:?} repeats in the block"
                )));
            }
        }
        let contains_root = position.contains_key(&top.root);
        if contains_root && top.index_of(&sequence[0]) != Some(top.root) {
            return Err(TreeError::NotASubsearch(
                "a block containing the root must start with it".to_string(),
            ));
        }
        for (t, id) in sequence.iter().enumerate() {
            let v = top.index_of(id).expect("checked above");
            let Some(parent) = top.parent[v] else {
                continue;
            };
            match position.get(&parent) {
                Some(&before) if before < t => {}
                Some(_) => {
                    return Err(TreeError::NotASubsearch(format!(
                        "vertex {id:?} appears before its parent"
                    )))
                }
                None if contains_root => {
                    return Err(TreeError::NotASubsearch(format!(
                        "a block starting the search cannot reach {id:?}"
                    )))
                }
                None => {}
            }
        }
        Ok(Subsearch { sequence })
    }

    pub fn sequence(&self) -> &[String] {
        &self.sequence
    }
}

fn check_hider_weights(
    top: &Topology,
    x: &BTreeMap<String, Rational>,
) -> Result<Vec<Rational>, TreeError> {
    let mut weights = vec![Rational::zero(); top.n()];
    for (id, w) in x {
        let v = top
            .index_of(id)
            .ok_or_else(|| TreeError::UnknownVertex(id.clone()))?;
        if *w < Rational::zero() {
            return Err(TreeError::InvalidWeights(format!(
                "weight of {id:?} is negative"
            )));
        }
        weights[v] = w.clone();
    }
    Ok(weights)
}

/// Payoff contribution of a block against a hider distribution `x`:
/// the sum over the block of `x_v` times the survival of the block prefix
/// up to and including `v`. Vertices missing from `x` carry weight 0.
pub fn subsearch_payoff(
    tree: &RootedTree,
    x: &BTreeMap<String, Rational>,
    alpha: &Subsearch,
) -> Result<Rational, TreeError> {
    let top = Topology::build(tree).map_err(TreeError::Invalid)?;
    let weights = check_hider_weights(&top, x)?;
    let mut survival = Rational::one();
    let mut total = Rational::zero();
    for id in &alpha.sequence {
        let v = top
            .index_of(id)
            .ok_or_else(|| TreeError::UnknownVertex(id.clone()))?;
        survival *= &top.p[v];
        total += &weights[v] * &survival;
    }
    Ok(total)
}

/// Search-density index of a block: payoff over one minus the block's
/// survival probability. Undefined (error) when the block survives with
/// probability 1.
pub fn subsearch_index(
    tree: &RootedTree,
    x: &BTreeMap<String, Rational>,
    alpha: &Subsearch,
) -> Result<Rational, TreeError> {
    let members: BTreeSet<String> = alpha.sequence.iter().cloned().collect();
    let survival = pi(tree, &members)?;
    if survival.is_one() {
        return Err(TreeError::UndefinedIndex);
    }
    let payoff = subsearch_payoff(tree, x, alpha)?;
    Ok(payoff / (Rational::one() - survival))
}

/// Payoff of a full expanding search against a hider distribution.
pub fn expanding_search_payoff(
    tree: &RootedTree,
    x: &BTreeMap<String, Rational>,
    search: &ExpandingSearch,
) -> Result<Rational, TreeError> {
    let top = Topology::build(tree).map_err(TreeError::Invalid)?;
    let sequence = check_expanding(&top, search)?;
    let weights = check_hider_weights(&top, x)?;
    let mut survival = Rational::one();
    let mut total = Rational::zero();
    for v in sequence {
        survival *= &top.p[v];
        total += &weights[v] * &survival;
    }
    Ok(total)
}

pub(crate) fn check_expanding(
    top: &Topology,
    search: &ExpandingSearch,
) -> Result<Vec<usize>, TreeError> {
    if search.len() != top.n() {
        return Err(TreeError::NotExpanding(
            "the search must cover every vertex exactly once".to_string(),
        ));
    }
    let mut visited = vec![false; top.n()];
    let mut sequence = Vec::with_capacity(search.len());
    for (t, id) in search.sequence.iter().enumerate() {
        let v = top
            .index_of(id)
            .ok_or_else(|| TreeError::UnknownVertex(id.clone()))?;
        if visited[v] {
            return Err(TreeError::NotExpanding(format!(
                "vertex {id:?} repeats in the search"
            )));
        }
        if t == 0 {
            if v != top.root {
                return Err(TreeError::NotExpanding(format!(
                    "the search must start at the root, not {id:?}"
                )));
            }
        } else {
            match top.parent[v] {
                Some(parent) if visited[parent] => {}
                _ => {
                    return Err(TreeError::NotExpanding(format!(
                        "vertex {id:?} is not adjacent to the searched region"
                    )))
                }
            }
        }
        visited[v] = true;
        sequence.push(v);
    }
    Ok(sequence)
}

/// The result of rewriting a tree to have at most two children per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub tree: RootedTree,
    /// Ids of the inserted pass-through vertices (all carry `p = 1`),
    /// in insertion order.
    pub inserted: Vec<String>,
    /// For each inserted vertex, the original vertex it was split from.
    pub origin: BTreeMap<String, String>,
}

impl Normalization {
    /// Project a search on the normalized tree back to the original one by
    /// dropping the inserted vertices.
    pub fn project(&self, search: &ExpandingSearch) -> ExpandingSearch {
        let inserted: BTreeSet<&str> = self.inserted.iter().map(|s| s.as_str()).collect();
        ExpandingSearch::new(
            search
                .sequence()
                .iter()
                .filter(|id| !inserted.contains(id.as_str()))
                .cloned(),
        )
    }
}

/// Split every vertex with more than two children by handing all children
/// but the first (ascending by id) to a fresh pass-through vertex with
/// `p = 1`, repeating until every vertex has at most two children. The
/// value of the game and the strategies are unaffected; searches on the
/// new tree project back by dropping the inserted vertices.
pub fn normalize_degree3(tree: &RootedTree) -> Result<Normalization, TreeError> {
    let top = Topology::build(tree).map_err(TreeError::Invalid)?;
    if top.children.iter().all(|c| c.len() <= 2) {
        return Ok(Normalization {
            tree: tree.clone(),
            inserted: Vec::new(),
            origin: BTreeMap::new(),
        });
    }

    let mut ids = top.ids.clone();
    let mut p = top.p.clone();
    let mut children = top.children.clone();
    let mut origin_of: Vec<Option<usize>> = vec![None; ids.len()];
    let existing: BTreeSet<String> = ids.iter().cloned().collect();
    let mut counter = 0usize;
    let mut fresh = || loop {
        counter += 1;
        let candidate = format!("aux-{counter}");
        if !existing.contains(&candidate) {
            return candidate;
        }
    };

    let mut queue: Vec<usize> = (0..ids.len()).collect();
    let mut inserted = Vec::new();
    while let Some(v) = queue.pop() {
        if children[v].len() <= 2 {
            continue;
        }
        let kept = children[v][0];
        let moved: Vec<usize> = children[v][1..].to_vec();
        let aux = ids.len();
        let id = fresh();
        inserted.push(id.clone());
        ids.push(id);
        p.push(Rational::one());
        children.push(moved);
        origin_of.push(Some(origin_of[v].unwrap_or(v)));
        children[v] = vec![kept, aux];
        queue.push(aux);
    }

    let mut vertices: Vec<(String, Rational)> = Vec::with_capacity(ids.len());
    for (id, prob) in ids.iter().zip(&p) {
        vertices.push((id.clone(), prob.clone()));
    }
    let mut edges = Vec::new();
    for (v, kids) in children.iter().enumerate() {
        for &c in kids {
            edges.push((ids[v].clone(), ids[c].clone()));
        }
    }
    let origin = inserted
        .iter()
        .map(|aux| {
            let index = ids.iter().position(|i| i == aux).expect("inserted id");
            let host = origin_of[index].expect("inserted vertices record a host");
            (aux.clone(), top.ids[host].clone())
        })
        .collect();

    Ok(Normalization {
        tree: RootedTree::new(vertices, edges, tree.root.clone()),
        inserted,
        origin,
    })
}

/// Number of expanding searches, by the product formula
/// `n! / prod_v |subtree(v)|`, computed without overflow as nested
/// multinomials. `None` means the count exceeds `u128`.
pub fn count_expanding_searches(tree: &RootedTree) -> Result<Option<u128>, TreeError> {
    let top = Topology::build(tree).map_err(TreeError::Invalid)?;
    let sizes = top.subtree_sizes();
    let mut total: u128 = 1;
    for v in 0..top.n() {
        if top.children[v].is_empty() {
            continue;
        }
        let mut remaining = sizes[v] - 1;
        for &c in &top.children[v] {
            let Some(ways) = binomial_u128(remaining, sizes[c]) else {
                return Ok(None);
            };
            let Some(next) = total.checked_mul(ways) else {
                return Ok(None);
            };
            total = next;
            remaining -= sizes[c];
        }
    }
    Ok(Some(total))
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

/// All expanding searches of the tree in lexicographic order of their
/// vertex-id sequences. Fails with a resource error beyond `cap`.
pub fn enumerate_expanding_searches(
    tree: &RootedTree,
    cap: u64,
) -> Result<Vec<ExpandingSearch>, TreeError> {
    let count = count_expanding_searches(tree)?;
    match count {
        Some(c) if c <= cap as u128 => {}
        c => {
            return Err(TreeError::ResourceLimit {
                count: c.unwrap_or(u128::MAX),
                cap,
            })
        }
    }
    let top = Topology::build(tree).map_err(TreeError::Invalid)?;
    let mut rank = vec![0usize; top.n()];
    for (r, v) in top.by_id_rank().into_iter().enumerate() {
        rank[v] = r;
    }

    // Keep the frontier sorted by id rank so candidates are tried in
    // ascending id order, which makes the output lexicographic.
    fn walk(
        top: &Topology,
        rank: &[usize],
        frontier: &[usize],
        sequence: &mut Vec<usize>,
        searches: &mut Vec<ExpandingSearch>,
    ) {
        if frontier.is_empty() {
            searches.push(ExpandingSearch::new(
                sequence.iter().map(|&v| top.ids[v].clone()),
            ));
            return;
        }
        for (slot, &v) in frontier.iter().enumerate() {
            let mut next: Vec<usize> = frontier.to_vec();
            next.remove(slot);
            for &c in &top.children[v] {
                let at = next
                    .binary_search_by_key(&rank[c], |&w| rank[w])
                    .unwrap_err();
                next.insert(at, c);
            }
            sequence.push(v);
            walk(top, rank, &next, sequence, searches);
            sequence.pop();
        }
    }

    let mut searches = Vec::new();
    let mut sequence: Vec<usize> = Vec::with_capacity(top.n());
    walk(&top, &rank, &[top.root], &mut sequence, &mut searches);
    Ok(searches)
}

/// All depth-first searches: expanding searches that finish each subtree
/// entirely before leaving it.
pub fn enumerate_depth_first_searches(
    tree: &RootedTree,
    cap: u64,
) -> Result<Vec<ExpandingSearch>, TreeError> {
    let top = Topology::build(tree).map_err(TreeError::Invalid)?;
    let mut count: u128 = 1;
    for v in 0..top.n() {
        for f in 1..=top.children[v].len() as u128 {
            count = count.saturating_mul(f);
        }
    }
    if count > cap as u128 {
        return Err(TreeError::ResourceLimit { count, cap });
    }

    fn df_lists(top: &Topology, v: usize) -> Vec<Vec<usize>> {
        let child_lists: Vec<Vec<Vec<usize>>> =
            top.children[v].iter().map(|&c| df_lists(top, c)).collect();
        let mut out = Vec::new();
        let order: Vec<usize> = (0..child_lists.len()).collect();
        permute_orders(&order, &mut |perm| {
            let mut combos: Vec<Vec<usize>> = vec![vec![v]];
            for &c in perm {
                let mut next = Vec::new();
                for prefix in &combos {
                    for tail in &child_lists[c] {
                        let mut joined = prefix.clone();
                        joined.extend(tail);
                        next.push(joined);
                    }
                }
                combos = next;
            }
            out.extend(combos);
        });
        out
    }

    Ok(df_lists(&top, top.root)
        .into_iter()
        .map(|seq| ExpandingSearch::new(seq.into_iter().map(|v| top.ids[v].clone())))
        .collect())
}

fn permute_orders(items: &[usize], visit: &mut impl FnMut(&[usize])) {
    fn inner(items: &mut Vec<usize>, from: usize, visit: &mut impl FnMut(&[usize])) {
        if from == items.len() {
            visit(items);
            return;
        }
        for i in from..items.len() {
            items.swap(from, i);
            inner(items, from + 1, visit);
            items.swap(from, i);
        }
    }
    inner(&mut items.to_vec(), 0, visit);
}

/// Whether a search of `tree` is depth-first: every subtree occupies a
/// contiguous run of positions starting at its root.
pub fn is_depth_first(tree: &RootedTree, search: &ExpandingSearch) -> Result<bool, TreeError> {
    let top = Topology::build(tree).map_err(TreeError::Invalid)?;
    let sequence = check_expanding(&top, search)?;
    let mut position = vec![0usize; top.n()];
    for (t, &v) in sequence.iter().enumerate() {
        position[v] = t;
    }
    let sizes = top.subtree_sizes();
    let mut max_position = position.clone();
    for &v in top.depth_order().iter().rev() {
        for &c in &top.children[v] {
            if max_position[c] > max_position[v] {
                max_position[v] = max_position[c];
            }
        }
        if max_position[v] - position[v] + 1 != sizes[v] {
            return Ok(false);
        }
    }
    Ok(true)
}
