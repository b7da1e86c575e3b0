//! Shared random generators and small helpers for the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rescue_games::rational::{rat, Rational};
use rescue_games::{RootedTree, SetFunctionGame, SetFunctionSpec};
use std::collections::BTreeMap;

/// Uniform probability in (0,1) with denominator at most 20.
pub fn rand_prob<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.random_range(2..=20i64);
    let num = rng.random_range(1..den);
    rat(num, den)
}

/// Positive cost with a small denominator.
pub fn rand_cost<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.random_range(1..=4i64);
    let num = rng.random_range(1..=12i64);
    rat(num, den)
}

/// Discount factor in (0,1].
pub fn rand_gamma<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.random_range(2..=10i64);
    let num = rng.random_range(1..=den);
    rat(num, den)
}

pub fn location_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

pub fn rand_rescue<R: Rng>(rng: &mut R, n: usize) -> SetFunctionGame {
    let p = (0..n).map(|_| rand_prob(rng)).collect();
    SetFunctionGame::new(location_ids(n), SetFunctionSpec::Rescue { p }).unwrap()
}

/// One of the four parametric families, chosen by `which % 4`.
pub fn rand_family<R: Rng>(rng: &mut R, n: usize, which: usize) -> SetFunctionGame {
    let spec = match which % 4 {
        0 => SetFunctionSpec::Rescue {
            p: (0..n).map(|_| rand_prob(rng)).collect(),
        },
        1 => SetFunctionSpec::DiscountedRescue {
            p: (0..n).map(|_| rand_prob(rng)).collect(),
            gamma: rand_gamma(rng),
        },
        2 => SetFunctionSpec::AdditiveCost {
            c: (0..n).map(|_| rand_cost(rng)).collect(),
        },
        _ => SetFunctionSpec::TravelSearch {
            c: (0..n).map(|_| rand_cost(rng)).collect(),
        },
    };
    SetFunctionGame::new(location_ids(n), spec).unwrap()
}

/// Random rooted tree on `n` vertices ("v0" is the root), built by uniform
/// parent attachment. Internal vertices get `p = 1` with probability
/// `p_one_percent`/100; non-root leaves always get `p < 1`.
pub fn rand_tree<R: Rng>(rng: &mut R, n: usize, p_one_percent: u32) -> RootedTree {
    assert!((1..=10).contains(&n), "ids v0..v9 keep lexicographic order");
    let mut parents = vec![0usize; n];
    for (i, parent) in parents.iter_mut().enumerate().skip(1) {
        *parent = rng.random_range(0..i);
    }
    let mut has_child = vec![false; n];
    for i in 1..n {
        has_child[parents[i]] = true;
    }
    let mut vertices = Vec::with_capacity(n);
    for (i, &internal) in has_child.iter().enumerate() {
        let p = if (internal || i == 0) && rng.random_range(0..100) < p_one_percent {
            rat(1, 1)
        } else {
            rand_prob(rng)
        };
        vertices.push((format!("v{i}"), p));
    }
    let edges: Vec<(String, String)> = (1..n)
        .map(|i| (format!("v{}", parents[i]), format!("v{i}")))
        .collect();
    RootedTree::new(vertices, edges, "v0".to_string())
}

/// Random tree guaranteed to contain a vertex with at least three children.
pub fn rand_tree_with_wide_vertex<R: Rng>(rng: &mut R, n: usize) -> RootedTree {
    assert!(n >= 4);
    loop {
        let tree = rand_tree(rng, n, 10);
        let children = children_map(&tree);
        if children.values().any(|c| c.len() >= 3) {
            return tree;
        }
    }
}

/// Orient a tree's edges away from the root; children sorted ascending by
/// id. An independent reimplementation for test-side inspection.
pub fn children_map(tree: &RootedTree) -> BTreeMap<String, Vec<String>> {
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in tree.edges() {
        adjacency.entry(a.as_str()).or_default().push(b.as_str());
        adjacency.entry(b.as_str()).or_default().push(a.as_str());
    }
    let mut children: BTreeMap<String, Vec<String>> = tree
        .vertices()
        .iter()
        .map(|(id, _)| (id.clone(), Vec::new()))
        .collect();
    let mut stack = vec![(tree.root().to_string(), None::<String>)];
    while let Some((vertex, parent)) = stack.pop() {
        for &next in adjacency.get(vertex.as_str()).into_iter().flatten() {
            if Some(next) == parent.as_deref() {
                continue;
            }
            children.get_mut(&vertex).unwrap().push(next.to_string());
            stack.push((next.to_string(), Some(vertex.clone())));
        }
    }
    for kids in children.values_mut() {
        kids.sort();
    }
    children
}

/// Lexicographically first depth-first order of the subtree rooted at
/// `vertex` (children visited in ascending id order).
pub fn preorder_block(children: &BTreeMap<String, Vec<String>>, vertex: &str) -> Vec<String> {
    let mut out = vec![vertex.to_string()];
    for child in &children[vertex] {
        out.extend(preorder_block(children, child));
    }
    out
}

/// The five-vertex reference tree: root O over A and D; D over B and C.
pub fn reference_tree() -> RootedTree {
    RootedTree::new(
        [
            ("O", rat(1, 2)),
            ("A", rat(2, 3)),
            ("B", rat(1, 3)),
            ("C", rat(1, 2)),
            ("D", rat(3, 5)),
        ],
        [("O", "A"), ("O", "D"), ("D", "B"), ("D", "C")],
        "O",
    )
}
