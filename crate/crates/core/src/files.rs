//! JSON instance files.
//!
//! Rationals are exact strings (`"num/den"` or `"num"`); decimal literals
//! are rejected so no precision is lost on the way in. The `kind` field
//! selects the game:
//!
//! ```json
//! {"kind": "rescue", "k": 1, "locations": [{"id": "1", "p": "1/2"}, ...]}
//! {"kind": "discounted", "k": 1, "gamma": "9/10", "locations": [...]}
//! {"kind": "additive", "k": 1, "locations": [{"id": "a"}, ...], "costs": ["2", ...]}
//! {"kind": "travel-search", ... as additive ...}
//! {"kind": "table", "k": 1, "locations": [{"id": "a"}, ...], "table": {"": "4", "a": "3", ...}}
//! {"kind": "tree", "root": "O", "vertices": [{"id": "O", "p": "1/2"}, ...],
//!  "edges": [["O", "A"], ...]}
//! ```
//!
//! Table keys are the subset's ids sorted ascending and joined with
//! commas; the empty string keys the empty set, and every subset must be
//! present. Costs align with the location list by position.

use crate::indexable::{SetFunctionGame, SetFunctionSpec};
use crate::rational::{parse_rational, Rational};
use crate::tree::RootedTree;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceFile {
    Rescue {
        k: usize,
        locations: Vec<LocationEntry>,
    },
    Discounted {
        k: usize,
        gamma: String,
        locations: Vec<LocationEntry>,
    },
    Additive {
        k: usize,
        locations: Vec<LocationEntry>,
        costs: Vec<String>,
    },
    TravelSearch {
        k: usize,
        locations: Vec<LocationEntry>,
        costs: Vec<String>,
    },
    Table {
        k: usize,
        locations: Vec<LocationEntry>,
        table: BTreeMap<String, String>,
    },
    Tree {
        root: String,
        vertices: Vec<VertexEntry>,
        edges: Vec<(String, String)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationEntry {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub p: String,
}

/// A parsed and validated instance, ready for the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedInstance {
    Unstructured { game: SetFunctionGame, k: usize },
    Tree(RootedTree),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FileError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid rational in field {field}: {source}")]
    Rational {
        field: String,
        source: crate::rational::ParseRationalError,
    },
    #[error("location {0:?} is missing its probability \"p\"")]
    MissingProbability(String),
    #[error("{got} costs for {expected} locations")]
    CostArity { expected: usize, got: usize },
    #[error("table is missing subset key {0:?}")]
    MissingSubset(String),
    #[error("table key {0:?} does not name a subset of the locations")]
    UnknownSubsetKey(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("k = {k} violates 1 <= k <= n-1 (n = {n})")]
    TargetCount { k: usize, n: usize },
}

fn rational_field(field: &str, raw: &str) -> Result<Rational, FileError> {
    parse_rational(raw).map_err(|source| FileError::Rational {
        field: field.to_string(),
        source,
    })
}

/// Canonical key of a subset: ids sorted ascending, comma-joined.
pub fn subset_key<'a, I: IntoIterator<Item = &'a str>>(ids: I) -> String {
    let mut ids: Vec<&str> = ids.into_iter().collect();
    ids.sort_unstable();
    ids.join(",")
}

pub fn parse_str(text: &str) -> Result<ParsedInstance, FileError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| FileError::Json(e.to_string()))?;
    parse_file(&file)
}

pub fn parse_file(file: &InstanceFile) -> Result<ParsedInstance, FileError> {
    match file {
        InstanceFile::Rescue { k, locations } => {
            let (ids, p) = probabilities(locations)?;
            check_target_count(*k, ids.len())?;
            let game = SetFunctionGame::new(ids, SetFunctionSpec::Rescue { p })
                .map_err(|e| FileError::Invalid(e.to_string()))?;
            Ok(ParsedInstance::Unstructured { game, k: *k })
        }
        InstanceFile::Discounted {
            k,
            gamma,
            locations,
        } => {
            let (ids, p) = probabilities(locations)?;
            check_target_count(*k, ids.len())?;
            let gamma = rational_field("gamma", gamma)?;
            let game = SetFunctionGame::new(ids, SetFunctionSpec::DiscountedRescue { p, gamma })
                .map_err(|e| FileError::Invalid(e.to_string()))?;
            Ok(ParsedInstance::Unstructured { game, k: *k })
        }
        InstanceFile::Additive {
            k,
            locations,
            costs,
        } => {
            let (ids, c) = costs_for(locations, costs)?;
            check_target_count(*k, ids.len())?;
            let game = SetFunctionGame::new(ids, SetFunctionSpec::AdditiveCost { c })
                .map_err(|e| FileError::Invalid(e.to_string()))?;
            Ok(ParsedInstance::Unstructured { game, k: *k })
        }
        InstanceFile::TravelSearch {
            k,
            locations,
            costs,
        } => {
            let (ids, c) = costs_for(locations, costs)?;
            check_target_count(*k, ids.len())?;
            let game = SetFunctionGame::new(ids, SetFunctionSpec::TravelSearch { c })
                .map_err(|e| FileError::Invalid(e.to_string()))?;
            Ok(ParsedInstance::Unstructured { game, k: *k })
        }
        InstanceFile::Table {
            k,
            locations,
            table,
        } => {
            let ids: Vec<String> = locations.iter().map(|l| l.id.clone()).collect();
            let n = ids.len();
            check_target_count(*k, n)?;
            if n > 20 {
                return Err(FileError::Invalid(format!(
                    "explicit tables support at most 20 locations, got {n}"
                )));
            }
            for key in table.keys() {
                let mut members: Vec<&str> = key.split(',').filter(|s| !s.is_empty()).collect();
                members.sort_unstable();
                members.dedup();
                let canonical = members.join(",");
                if canonical != *key || members.iter().any(|m| !ids.iter().any(|i| i == m)) {
                    return Err(FileError::UnknownSubsetKey(key.clone()));
                }
            }
            let mut values = Vec::with_capacity(1 << n);
            for mask in 0u64..(1 << n) {
                let key = subset_key(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| ids[i].as_str()),
                );
                let raw = table
                    .get(&key)
                    .ok_or_else(|| FileError::MissingSubset(key.clone()))?;
                values.push(rational_field(&format!("table[{key:?}]"), raw)?);
            }
            let game = SetFunctionGame::new(ids, SetFunctionSpec::ExplicitTable { values })
                .map_err(|e| FileError::Invalid(e.to_string()))?;
            Ok(ParsedInstance::Unstructured { game, k: *k })
        }
        InstanceFile::Tree {
            root,
            vertices,
            edges,
        } => {
            let mut parsed = Vec::with_capacity(vertices.len());
            for v in vertices {
                parsed.push((
                    v.id.clone(),
                    rational_field(&format!("p of {:?}", v.id), &v.p)?,
                ));
            }
            let tree = RootedTree::new(parsed, edges.clone(), root.clone());
            tree.validate().map_err(|issues| {
                FileError::Invalid(
                    issues
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join("; "),
                )
            })?;
            Ok(ParsedInstance::Tree(tree))
        }
    }
}

fn check_target_count(k: usize, n: usize) -> Result<(), FileError> {
    if k < 1 || k + 1 > n {
        return Err(FileError::TargetCount { k, n });
    }
    Ok(())
}

fn probabilities(locations: &[LocationEntry]) -> Result<(Vec<String>, Vec<Rational>), FileError> {
    let mut ids = Vec::with_capacity(locations.len());
    let mut p = Vec::with_capacity(locations.len());
    for entry in locations {
        let raw = entry
            .p
            .as_ref()
            .ok_or_else(|| FileError::MissingProbability(entry.id.clone()))?;
        p.push(rational_field(&format!("p of {:?}", entry.id), raw)?);
        ids.push(entry.id.clone());
    }
    Ok((ids, p))
}

fn costs_for(
    locations: &[LocationEntry],
    costs: &[String],
) -> Result<(Vec<String>, Vec<Rational>), FileError> {
    if locations.len() != costs.len() {
        return Err(FileError::CostArity {
            expected: locations.len(),
            got: costs.len(),
        });
    }
    let ids: Vec<String> = locations.iter().map(|l| l.id.clone()).collect();
    let c = costs
        .iter()
        .enumerate()
        .map(|(i, raw)| rational_field(&format!("costs[{i}]"), raw))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ids, c))
}

/// Rebuild the canonical file form of a parsed instance (used to echo the
/// instance in reports; re-parsing the echo yields an identical instance).
pub fn canonical_file(parsed: &ParsedInstance) -> InstanceFile {
    match parsed {
        ParsedInstance::Unstructured { game, k } => {
            let ids = game.ids();
            match game.spec() {
                SetFunctionSpec::Rescue { p } => InstanceFile::Rescue {
                    k: *k,
                    locations: located(ids, Some(p)),
                },
                SetFunctionSpec::DiscountedRescue { p, gamma } => InstanceFile::Discounted {
                    k: *k,
                    gamma: gamma.to_string(),
                    locations: located(ids, Some(p)),
                },
                SetFunctionSpec::AdditiveCost { c } => InstanceFile::Additive {
                    k: *k,
                    locations: located(ids, None),
                    costs: c.iter().map(|v| v.to_string()).collect(),
                },
                SetFunctionSpec::TravelSearch { c } => InstanceFile::TravelSearch {
                    k: *k,
                    locations: located(ids, None),
                    costs: c.iter().map(|v| v.to_string()).collect(),
                },
                SetFunctionSpec::ExplicitTable { values } => {
                    let n = ids.len();
                    let mut table = BTreeMap::new();
                    for (mask, value) in values.iter().enumerate() {
                        let key = subset_key(
                            (0..n)
                                .filter(|i| mask & (1 << i) != 0)
                                .map(|i| ids[i].as_str()),
                        );
                        table.insert(key, value.to_string());
                    }
                    InstanceFile::Table {
                        k: *k,
                        locations: located(ids, None),
                        table,
                    }
                }
            }
        }
        ParsedInstance::Tree(tree) => InstanceFile::Tree {
            root: tree.root().to_string(),
            vertices: tree
                .vertices()
                .iter()
                .map(|(id, p)| VertexEntry {
                    id: id.clone(),
                    p: p.to_string(),
                })
                .collect(),
            edges: tree.edges().to_vec(),
        },
    }
}

fn located(ids: &[String], p: Option<&[Rational]>) -> Vec<LocationEntry> {
    ids.iter()
        .enumerate()
        .map(|(i, id)| LocationEntry {
            id: id.clone(),
            p: p.map(|p| p[i].to_string()),
        })
        .collect()
}

pub fn to_canonical_json(parsed: &ParsedInstance) -> String {
    serde_json::to_string(&canonical_file(parsed)).expect("instance files serialize")
}
