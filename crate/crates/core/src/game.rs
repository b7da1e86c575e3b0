//! The search-and-rescue game on an unstructured set of locations.
//!
//! An [`Instance`] is an ordered list of locations with survival
//! probabilities `p_i` and a target count `k`. The Hider picks a k-subset
//! of locations, the Searcher picks an ordering, and the payoff is the
//! probability that the search survives long enough to cover the Hider's
//! set: the product of `p_i` over the shortest prefix of the ordering
//! containing all targets.
//!
//! Mixed searcher strategies come in two forms: explicit distributions
//! over orderings, and "first block" strategies that search a fixed
//! k-subset first and the remaining locations in uniformly random order.
//! Both are evaluated exactly.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("unknown location id {0:?}")]
    UnknownLocation(String),
    #[error("hider set has {got} members, expected k={expected}")]
    WrongSetSize { expected: usize, got: usize },
    #[error("search order is not a permutation of the instance's locations")]
    NotAPermutation,
    #[error("invalid mixed strategy: {0}")]
    InvalidMix(String),
}

/// A single invariant violation found by [`Instance::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    DuplicateId(String),
    ProbabilityOutOfRange { id: String, p: Rational },
    TargetCountOutOfRange { k: usize, n: usize },
    TooManyLocations { n: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::DuplicateId(id) => write!(f, "duplicate location id {id:?}"),
            ValidationIssue::ProbabilityOutOfRange { id, p } => {
                write!(f, "location {id:?} has p = {p}, which is not in (0,1)")
            }
            ValidationIssue::TargetCountOutOfRange { k, n } => {
                write!(f, "target count k = {k} violates 1 <= k <= n-1 (n = {n})")
            }
            ValidationIssue::TooManyLocations { n } => {
                write!(f, "{n} locations exceed the supported maximum of 64")
            }
        }
    }
}

/// Maximum location count; subsets are manipulated as `u64` bitmasks.
pub const MAX_LOCATIONS: usize = 64;

/// An unstructured search-and-rescue instance: ordered locations with
/// survival probabilities, and the number of hidden targets `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    locations: Vec<(String, Rational)>,
    k: usize,
}

impl Instance {
    /// Build an instance without validating it; call [`Instance::validate`]
    /// to check the invariants.
    pub fn new<I, S>(locations: I, k: usize) -> Self
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        Instance {
            locations: locations.into_iter().map(|(s, p)| (s.into(), p)).collect(),
            k,
        }
    }

    pub fn n(&self) -> usize {
        self.locations.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.locations.iter().map(|(id, _)| id.as_str())
    }

    pub fn locations(&self) -> &[(String, Rational)] {
        &self.locations
    }

    pub fn probability(&self, index: usize) -> &Rational {
        &self.locations[index].1
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.locations.iter().position(|(i, _)| i == id)
    }

    /// Check every instance invariant and report all violations.
    pub fn validate(&self) -> Result<(), Vec<ValidationIssue>> {
        let mut issues = Vec::new();
        let n = self.n();
        if n > MAX_LOCATIONS {
            issues.push(ValidationIssue::TooManyLocations { n });
        }
        let mut seen = BTreeSet::new();
        for (id, p) in &self.locations {
            if !seen.insert(id.clone()) {
                issues.push(ValidationIssue::DuplicateId(id.clone()));
            }
            if *p <= Rational::zero() || *p >= Rational::one() {
                issues.push(ValidationIssue::ProbabilityOutOfRange {
                    id: id.clone(),
                    p: p.clone(),
                });
            }
        }
        if self.k < 1 || self.k + 1 > n {
            issues.push(ValidationIssue::TargetCountOutOfRange { k: self.k, n });
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    pub(crate) fn mask_of<'a, I>(&self, ids: I) -> Result<u64, GameError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        assert!(
            self.n() <= MAX_LOCATIONS,
            "instance exceeds {MAX_LOCATIONS} locations; validate() reports this"
        );
        let mut mask = 0u64;
        for id in ids {
            let index = self
                .index_of(id)
                .ok_or_else(|| GameError::UnknownLocation(id.to_string()))?;
            mask |= 1 << index;
        }
        Ok(mask)
    }

    pub(crate) fn survival_mask(&self, mask: u64) -> Rational {
        let mut product = Rational::one();
        for (index, (_, p)) in self.locations.iter().enumerate() {
            if mask & (1 << index) != 0 {
                product *= p;
            }
        }
        product
    }

    /// Probability that the search survives an inspection of every
    /// location in `a`: the product of the members' `p_i` (1 for the
    /// empty set).
    pub fn survival(&self, a: &BTreeSet<String>) -> Result<Rational, GameError> {
        let mask = self.mask_of(a.iter().map(|s| s.as_str()))?;
        Ok(self.survival_mask(mask))
    }

    /// Payoff of the pure strategy pair: survival of the shortest prefix
    /// of `order` that contains all of `hider`.
    pub fn payoff(&self, hider: &HiderSet, order: &SearchOrder) -> Result<Rational, GameError> {
        let hider_mask = self.hider_mask(hider)?;
        let sequence = self.order_indices(order)?;
        Ok(self.payoff_masked(hider_mask, &sequence))
    }

    pub(crate) fn hider_mask(&self, hider: &HiderSet) -> Result<u64, GameError> {
        if hider.len() != self.k {
            return Err(GameError::WrongSetSize {
                expected: self.k,
                got: hider.len(),
            });
        }
        self.mask_of(hider.iter())
    }

    pub(crate) fn order_indices(&self, order: &SearchOrder) -> Result<Vec<usize>, GameError> {
        if order.len() != self.n() {
            return Err(GameError::NotAPermutation);
        }
        let mut seen = 0u64;
        let mut indices = Vec::with_capacity(order.len());
        for id in order.iter() {
            let index = self
                .index_of(id)
                .ok_or_else(|| GameError::UnknownLocation(id.to_string()))?;
            if seen & (1 << index) != 0 {
                return Err(GameError::NotAPermutation);
            }
            seen |= 1 << index;
            indices.push(index);
        }
        Ok(indices)
    }

    pub(crate) fn payoff_masked(&self, hider_mask: u64, sequence: &[usize]) -> Rational {
        let mut survival = Rational::one();
        let mut remaining = hider_mask;
        for &index in sequence {
            survival *= self.probability(index);
            remaining &= !(1 << index);
            if remaining == 0 {
                return survival;
            }
        }
        // A validated order covers every location, so the hider set is
        // exhausted inside the loop.
        survival
    }

    /// Exact expected payoff of a pair of mixed strategies. "First block"
    /// searcher strategies are expanded exactly: the block is searched
    /// first (internal order is irrelevant because all k targets must be
    /// found), then the complement in uniformly random order.
    pub fn expected_payoff(
        &self,
        hider: &HiderMix,
        searcher: &SearcherMix,
    ) -> Result<Rational, GameError> {
        let hider_support = self.check_hider_mix(hider)?;
        let mut total = Rational::zero();
        match searcher {
            SearcherMix::Orders(support) => {
                check_weights(support.iter().map(|(_, w)| w))?;
                for (order, order_weight) in support {
                    let sequence = self.order_indices(order)?;
                    for (hider_mask, hider_weight) in &hider_support {
                        total += hider_weight
                            * order_weight
                            * self.payoff_masked(*hider_mask, &sequence);
                    }
                }
            }
            SearcherMix::FirstBlocks(support) => {
                check_weights(support.iter().map(|(_, w)| w))?;
                for (block, block_weight) in support {
                    let block_mask = self.hider_mask(block)?;
                    for (hider_mask, hider_weight) in &hider_support {
                        total += hider_weight
                            * block_weight
                            * self.first_block_expectation(*hider_mask, block_mask);
                    }
                }
            }
        }
        Ok(total)
    }

    fn check_hider_mix(&self, hider: &HiderMix) -> Result<Vec<(u64, Rational)>, GameError> {
        check_weights(hider.support.iter().map(|(_, w)| w))?;
        let mut masks = Vec::with_capacity(hider.support.len());
        for (set, weight) in &hider.support {
            let mask = self.hider_mask(set)?;
            if masks.iter().any(|(m, _)| *m == mask) {
                return Err(GameError::InvalidMix(format!(
                    "hider set {set} appears more than once"
                )));
            }
            masks.push((mask, weight.clone()));
        }
        Ok(masks)
    }

    /// Expected payoff of the pure hider set against the mixed search that
    /// inspects `block` first and then the complement uniformly at random.
    ///
    /// With `m` targets outside the block and `u` free locations, the
    /// probability that exactly the free subset `T` is inspected before the
    /// last outside target is `m (m+|T|-1)! (u-|T|)! / (m+u)!`, and the
    /// coefficient depends on `T` only through its size. Survival is
    /// multiplicative, so the sum over subsets collapses onto elementary
    /// symmetric polynomials of the free probabilities.
    pub(crate) fn first_block_expectation(&self, hider_mask: u64, block_mask: u64) -> Rational {
        let outside = hider_mask & !block_mask;
        let base = self.survival_mask(hider_mask | block_mask);
        if outside == 0 {
            return base;
        }
        let full: u64 = if self.n() == 64 {
            u64::MAX
        } else {
            (1 << self.n()) - 1
        };
        let free = full & !(hider_mask | block_mask);
        let m = outside.count_ones() as usize;
        let u = free.count_ones() as usize;

        // e[t] = elementary symmetric polynomial of degree t in the free p's.
        let mut elementary = vec![Rational::zero(); u + 1];
        elementary[0] = Rational::one();
        let mut filled = 0;
        for (index, (_, p)) in self.locations.iter().enumerate() {
            if free & (1 << index) == 0 {
                continue;
            }
            filled += 1;
            for t in (1..=filled).rev() {
                let bump = elementary[t - 1].clone() * p;
                elementary[t] += bump;
            }
        }

        let factorials = factorials(m + u);
        let denom = Rational::from(factorials[m + u].clone());
        let mut sum = Rational::zero();
        for (t, e_t) in elementary.iter().enumerate() {
            let coeff =
                Rational::from(BigInt::from(m) * &factorials[m + t - 1] * &factorials[u - t])
                    / &denom;
            sum += coeff * e_t;
        }
        base * sum
    }
}

pub(crate) fn factorials(n: usize) -> Vec<BigInt> {
    let mut fact = Vec::with_capacity(n + 1);
    fact.push(BigInt::one());
    for i in 1..=n {
        let next = fact[i - 1].clone() * BigInt::from(i);
        fact.push(next);
    }
    fact
}

fn check_weights<'a, I>(weights: I) -> Result<(), GameError>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut sum = Rational::zero();
    let mut any = false;
    for w in weights {
        any = true;
        if *w <= Rational::zero() {
            return Err(GameError::InvalidMix(format!("weight {w} is not positive")));
        }
        sum += w;
    }
    if !any {
        return Err(GameError::InvalidMix("empty support".to_string()));
    }
    if !sum.is_one() {
        return Err(GameError::InvalidMix(format!(
            "weights sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// A set of hiding locations of size `k`; the Hider's pure strategy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HiderSet {
    members: BTreeSet<String>,
}

impl HiderSet {
    pub fn new<I, S>(members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        HiderSet {
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(|s| s.as_str())
    }

    pub fn members(&self) -> &BTreeSet<String> {
        &self.members
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }
}

impl fmt::Display for HiderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// A pure Searcher strategy: a permutation of all location ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOrder {
    sequence: Vec<String>,
}

impl SearchOrder {
    pub fn new<I, S>(sequence: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SearchOrder {
            sequence: sequence.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.sequence.iter().map(|s| s.as_str())
    }

    pub fn sequence(&self) -> &[String] {
        &self.sequence
    }
}

impl fmt::Display for SearchOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sequence.join(" > "))
    }
}

/// A mixed Hider strategy: a distribution over k-subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct HiderMix {
    pub support: Vec<(HiderSet, Rational)>,
}

impl HiderMix {
    pub fn point(set: HiderSet) -> Self {
        HiderMix {
            support: vec![(set, Rational::one())],
        }
    }
}

/// A mixed Searcher strategy: either an explicit distribution over
/// orderings, or a distribution over "first block" strategies that search
/// a k-subset first and the rest uniformly at random.
#[derive(Debug, Clone, PartialEq)]
pub enum SearcherMix {
    Orders(Vec<(SearchOrder, Rational)>),
    FirstBlocks(Vec<(HiderSet, Rational)>),
}

impl SearcherMix {
    pub fn point(order: SearchOrder) -> Self {
        SearcherMix::Orders(vec![(order, Rational::one())])
    }

    pub fn first_block(block: HiderSet) -> Self {
        SearcherMix::FirstBlocks(vec![(block, Rational::one())])
    }
}
