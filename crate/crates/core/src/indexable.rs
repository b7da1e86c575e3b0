//! Set-function search games and their closed-form solutions.
//!
//! A [`SetFunctionGame`] couples an ordered list of location ids with a
//! reward function `f` over subsets of locations. The payoff of a pure
//! strategy pair is `f` of the shortest search prefix covering the
//! hider's set, so the rescue game is the special case `f(A) = prod p_i`.
//!
//! For the families handled here the pairwise marginal ratios of `f`
//! factor through a positive index vector `z`:
//!
//! ```text
//! (f(A+i+j) - f(A+j)) / (f(A+i+j) - f(A+i)) = z_i / z_j
//! ```
//!
//! [`SetFunctionGame::recover_z`] recovers `z` (and verifies the
//! factorization exhaustively up to a size cap), and
//! [`SetFunctionGame::solve_closed_form`] turns it into optimal mixed
//! strategies: the hider picks a k-subset `A` with probability
//! proportional to the product of `z` over `A`, and the searcher mirrors
//! those weights over "search `A` first" strategies. Both sides equalize,
//! which is what the oracle module verifies independently.

use crate::game::{factorials, HiderMix, HiderSet, Instance, SearchOrder, SearcherMix};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Default size cap for exhaustive verification of the index property;
/// the check walks all `2^n` subsets and all location pairs.
pub const DEFAULT_VERIFY_CAP: usize = 12;

/// A reward set-function, either a parametric family or an explicit table.
#[derive(Debug, Clone, PartialEq)]
pub enum SetFunctionSpec {
    /// `f(A) = prod_{i in A} p_i`: survival of a rescue search.
    Rescue { p: Vec<Rational> },
    /// Rescue with every probability discounted by a factor `gamma`.
    DiscountedRescue { p: Vec<Rational>, gamma: Rational },
    /// `f(A) = sum_{i not in A} c_i`: search cost not yet paid.
    AdditiveCost { c: Vec<Rational> },
    /// `f(A) = |S - A| + sum_{i not in A} c_i`: travel plus search cost
    /// not yet paid, for a complete graph with unit edge costs.
    TravelSearch { c: Vec<Rational> },
    /// Explicit values for all `2^n` subsets, indexed by bitmask
    /// (bit `i` set means location `i` is in the subset).
    ExplicitTable { values: Vec<Rational> },
}

/// A positive index vector, scale-normalized so the first entry is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ZIndex {
    z: Vec<Rational>,
}

impl ZIndex {
    /// Normalize a raw positive vector so that `z[0] == 1`.
    pub fn new(raw: Vec<Rational>) -> Self {
        assert!(!raw.is_empty());
        debug_assert!(raw.iter().all(|v| *v > Rational::zero()));
        let scale = raw[0].clone();
        ZIndex {
            z: raw.into_iter().map(|v| v / &scale).collect(),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Elementary symmetric polynomial of degree `k` in the entries of `z`
    /// selected by `members` (location indices). By convention the degree-0
    /// polynomial is 1.
    pub fn t_poly(&self, members: &[usize], k: usize) -> Result<Rational, IndexableError> {
        let selected: BTreeSet<usize> = members.iter().copied().collect();
        if let Some(&out) = selected.iter().find(|&&i| i >= self.z.len()) {
            return Err(IndexableError::InvalidArgument(format!(
                "index {out} out of range for z of length {}",
                self.z.len()
            )));
        }
        if k > selected.len() {
            return Err(IndexableError::InvalidArgument(format!(
                "degree {k} exceeds subset size {}",
                selected.len()
            )));
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[0] = Rational::one();
        let mut used = 0usize;
        for &i in &selected {
            used += 1;
            for t in (1..=k.min(used)).rev() {
                let bump = coeffs[t - 1].clone() * &self.z[i];
                coeffs[t] += bump;
            }
        }
        Ok(coeffs[k].clone())
    }

    /// `t_poly` over the full index set.
    pub fn t_poly_full(&self, k: usize) -> Result<Rational, IndexableError> {
        let all: Vec<usize> = (0..self.z.len()).collect();
        self.t_poly(&all, k)
    }
}

/// Why a set function failed the index-recovery checks, with the first
/// witness in scan order (subsets by ascending bitmask, then pairs in
/// ascending index order).
#[derive(Debug, Clone, PartialEq)]
pub enum NotIndexable {
    NotPositive {
        subset: Vec<String>,
        value: Rational,
    },
    NotStrictlyDecreasing {
        subset: Vec<String>,
        added: String,
    },
    RatioMismatch {
        subset: Vec<String>,
        i: String,
        j: String,
    },
}

impl fmt::Display for NotIndexable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let braced = |ids: &[String]| format!("{{{}}}", ids.join(","));
        match self {
            NotIndexable::NotPositive { subset, value } => {
                write!(f, "f({}) = {} is not positive", braced(subset), value)
            }
            NotIndexable::NotStrictlyDecreasing { subset, added } => write!(
                f,
                "f does not strictly decrease when {added:?} is added to {}",
                braced(subset)
            ),
            NotIndexable::RatioMismatch { subset, i, j } => write!(
                f,
                "marginal ratio over {} for the pair ({i:?}, {j:?}) does not factor as z_i/z_j",
                braced(subset)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexableError {
    #[error("not z-indexable: {0}")]
    NotIndexable(NotIndexable),
    #[error("invalid set-function specification: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("exhaustive index verification supports n <= {cap}, got n = {n}")]
    VerificationCapExceeded { n: usize, cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Provenance tag for a [`GameSolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Oracle,
}

/// Exact value and optimal mixed strategies of a solved game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub value: Rational,
    pub hider: HiderMix,
    pub searcher: SearcherMix,
    pub provenance: Provenance,
}

/// A search game defined by a reward set-function over named locations.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunctionGame {
    ids: Vec<String>,
    spec: SetFunctionSpec,
}

impl SetFunctionGame {
    pub fn new<I, S>(ids: I, spec: SetFunctionSpec) -> Result<Self, IndexableError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len();
        if n == 0 {
            return Err(IndexableError::InvalidSpec("no locations".to_string()));
        }
        if n > crate::game::MAX_LOCATIONS {
            return Err(IndexableError::InvalidSpec(format!(
                "{n} locations exceed the supported maximum of {}",
                crate::game::MAX_LOCATIONS
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &ids {
            if !seen.insert(id) {
                return Err(IndexableError::InvalidSpec(format!(
                    "duplicate location id {id:?}"
                )));
            }
        }
        let expect_len = |len: usize, what: &str| {
            if len == n {
                Ok(())
            } else {
                Err(IndexableError::InvalidSpec(format!(
                    "{what} has {len} entries for {n} locations"
                )))
            }
        };
        match &spec {
            SetFunctionSpec::Rescue { p } => {
                expect_len(p.len(), "p")?;
                check_probabilities(p)?;
            }
            SetFunctionSpec::DiscountedRescue { p, gamma } => {
                expect_len(p.len(), "p")?;
                check_probabilities(p)?;
                if *gamma <= Rational::zero() || *gamma > Rational::one() {
                    return Err(IndexableError::InvalidSpec(format!(
                        "gamma = {gamma} is not in (0,1]"
                    )));
                }
            }
            SetFunctionSpec::AdditiveCost { c } | SetFunctionSpec::TravelSearch { c } => {
                expect_len(c.len(), "c")?;
                if let Some(bad) = c.iter().find(|v| **v <= Rational::zero()) {
                    return Err(IndexableError::InvalidSpec(format!(
                        "cost {bad} is not positive"
                    )));
                }
            }
            SetFunctionSpec::ExplicitTable { values } => {
                if n > 20 {
                    return Err(IndexableError::InvalidSpec(format!(
                        "explicit tables support at most 20 locations, got {n}"
                    )));
                }
                if values.len() != 1 << n {
                    return Err(IndexableError::InvalidSpec(format!(
                        "table defines {} subsets, expected {}",
                        values.len(),
                        1u64 << n
                    )));
                }
            }
        }
        Ok(SetFunctionGame { ids, spec })
    }

    /// The rescue game of an unstructured instance.
    pub fn rescue_from_instance(instance: &Instance) -> Result<Self, IndexableError> {
        SetFunctionGame::new(
            instance.locations().iter().map(|(id, _)| id.clone()),
            SetFunctionSpec::Rescue {
                p: instance
                    .locations()
                    .iter()
                    .map(|(_, p)| p.clone())
                    .collect(),
            },
        )
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn spec(&self) -> &SetFunctionSpec {
        &self.spec
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    fn full_mask(&self) -> u64 {
        if self.n() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n()) - 1
        }
    }

    pub(crate) fn mask_of<'a, I>(&self, ids: I) -> Result<u64, IndexableError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut mask = 0u64;
        for id in ids {
            let index = self.index_of(id).ok_or_else(|| {
                IndexableError::InvalidArgument(format!("unknown location id {id:?}"))
            })?;
            mask |= 1 << index;
        }
        Ok(mask)
    }

    pub(crate) fn id_set(&self, mask: u64) -> Vec<String> {
        (0..self.n())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.ids[i].clone())
            .collect()
    }

    /// Evaluate `f` on a subset given as a bitmask.
    pub(crate) fn eval_mask(&self, mask: u64) -> Rational {
        match &self.spec {
            SetFunctionSpec::Rescue { p } => product_over(p, mask),
            SetFunctionSpec::DiscountedRescue { p, gamma } => {
                let count = mask.count_ones();
                product_over(p, mask) * power(gamma, count)
            }
            SetFunctionSpec::AdditiveCost { c } => sum_outside(c, mask),
            SetFunctionSpec::TravelSearch { c } => {
                let outside = self.n() as u32 - mask.count_ones();
                sum_outside(c, mask) + Rational::from(BigInt::from(outside))
            }
            SetFunctionSpec::ExplicitTable { values } => values[mask as usize].clone(),
        }
    }

    /// `f(A + i)` computed from `f(A)` in O(1) for the parametric families.
    pub(crate) fn eval_after_adding(&self, f_of_a: &Rational, a_mask: u64, i: usize) -> Rational {
        debug_assert!(a_mask & (1 << i) == 0);
        match &self.spec {
            SetFunctionSpec::Rescue { p } => f_of_a * &p[i],
            SetFunctionSpec::DiscountedRescue { p, gamma } => f_of_a * &p[i] * gamma,
            SetFunctionSpec::AdditiveCost { c } => f_of_a - &c[i],
            SetFunctionSpec::TravelSearch { c } => f_of_a - &c[i] - Rational::one(),
            SetFunctionSpec::ExplicitTable { values } => values[(a_mask | 1 << i) as usize].clone(),
        }
    }

    /// Evaluate the reward function on a subset of location ids.
    pub fn eval(&self, a: &BTreeSet<String>) -> Result<Rational, IndexableError> {
        let mask = self.mask_of(a.iter().map(|s| s.as_str()))?;
        Ok(self.eval_mask(mask))
    }

    /// Marginal value `f(A + i) - f(A)`; `i` must not be in `A`.
    pub fn marginal(&self, a: &BTreeSet<String>, i: &str) -> Result<Rational, IndexableError> {
        if a.contains(i) {
            return Err(IndexableError::InvalidArgument(format!(
                "{i:?} is already a member of the subset"
            )));
        }
        let mask = self.mask_of(a.iter().map(|s| s.as_str()))?;
        let index = self
            .index_of(i)
            .ok_or_else(|| IndexableError::InvalidArgument(format!("unknown location id {i:?}")))?;
        Ok(self.eval_mask(mask | 1 << index) - self.eval_mask(mask))
    }

    /// The analytic index vector of a parametric family, unnormalized.
    fn analytic_z(&self) -> Option<Vec<Rational>> {
        match &self.spec {
            SetFunctionSpec::Rescue { p } => {
                Some(p.iter().map(|pi| (Rational::one() - pi) / pi).collect())
            }
            SetFunctionSpec::DiscountedRescue { p, gamma } => Some(
                p.iter()
                    .map(|pi| (Rational::one() - gamma * pi) / pi)
                    .collect(),
            ),
            SetFunctionSpec::AdditiveCost { c } => Some(c.clone()),
            SetFunctionSpec::TravelSearch { c } => {
                Some(c.iter().map(|ci| ci + Rational::one()).collect())
            }
            SetFunctionSpec::ExplicitTable { .. } => None,
        }
    }

    /// Recover the index vector `z`, verifying the marginal-ratio property
    /// exhaustively (default cap [`DEFAULT_VERIFY_CAP`]).
    pub fn recover_z(&self) -> Result<ZIndex, IndexableError> {
        self.recover_z_capped(DEFAULT_VERIFY_CAP)
    }

    /// As [`SetFunctionGame::recover_z`] with an explicit verification cap.
    /// Beyond the cap, parametric families return their analytic index
    /// unverified and explicit tables are rejected.
    pub fn recover_z_capped(&self, cap: usize) -> Result<ZIndex, IndexableError> {
        let n = self.n();
        if n < 2 {
            return Err(IndexableError::InvalidArgument(
                "index recovery needs at least two locations".to_string(),
            ));
        }
        if n > cap {
            return match self.analytic_z() {
                Some(z) => Ok(ZIndex::new(z)),
                None => Err(IndexableError::VerificationCapExceeded { n, cap }),
            };
        }

        let full = self.full_mask();
        let values: Vec<Rational> = (0..=full).map(|mask| self.eval_mask(mask)).collect();

        // Positive on proper subsets and nonnegative on the full set; the
        // cost families legitimately reach 0 once everything is searched.
        for mask in 0..=full {
            let value = &values[mask as usize];
            let bad = if mask == full {
                *value < Rational::zero()
            } else {
                *value <= Rational::zero()
            };
            if bad {
                return Err(IndexableError::NotIndexable(NotIndexable::NotPositive {
                    subset: self.id_set(mask),
                    value: value.clone(),
                }));
            }
        }

        // Strictly decreasing under inclusion.
        for mask in 0..=full {
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    continue;
                }
                if values[(mask | 1 << i) as usize] >= values[mask as usize] {
                    return Err(IndexableError::NotIndexable(
                        NotIndexable::NotStrictlyDecreasing {
                            subset: self.id_set(mask),
                            added: self.ids[i].clone(),
                        },
                    ));
                }
            }
        }

        let z = match self.analytic_z() {
            Some(z) => z,
            None => {
                // Derive from the empty-set ratios: z_j / z_0 equals the
                // marginal f_{0}(j) over f_{j}(0). Strict decrease makes
                // both marginals negative, so every entry is positive.
                let mut z = vec![Rational::one(); n];
                for (j, slot) in z.iter_mut().enumerate().skip(1) {
                    let both = &values[(1 | 1u64 << j) as usize];
                    let numer = both - &values[1_usize];
                    let denom = both - &values[(1u64 << j) as usize];
                    *slot = numer / denom;
                }
                z
            }
        };

        // The factorization itself: for every subset and pair outside it,
        // the marginal ratio must equal z_i / z_j (cross-multiplied).
        for mask in 0..=full {
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    continue;
                }
                for j in (i + 1)..n {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    let both = &values[(mask | 1 << i | 1 << j) as usize];
                    let marginal_i = both - &values[(mask | 1 << j) as usize];
                    let marginal_j = both - &values[(mask | 1 << i) as usize];
                    if marginal_i * &z[j] != marginal_j * &z[i] {
                        return Err(IndexableError::NotIndexable(NotIndexable::RatioMismatch {
                            subset: self.id_set(mask),
                            i: self.ids[i].clone(),
                            j: self.ids[j].clone(),
                        }));
                    }
                }
            }
        }

        Ok(ZIndex::new(z))
    }

    /// Pure payoff: `f` of the shortest prefix of `order` covering `hider`.
    pub fn pure_payoff(
        &self,
        hider: &HiderSet,
        order: &SearchOrder,
    ) -> Result<Rational, IndexableError> {
        let hider_mask = self.mask_of(hider.iter())?;
        let sequence = self.order_indices(order)?;
        Ok(self.pure_payoff_masked(hider_mask, &sequence))
    }

    pub(crate) fn order_indices(&self, order: &SearchOrder) -> Result<Vec<usize>, IndexableError> {
        if order.len() != self.n() {
            return Err(IndexableError::InvalidArgument(
                "search order must cover every location exactly once".to_string(),
            ));
        }
        let mut seen = 0u64;
        let mut indices = Vec::with_capacity(order.len());
        for id in order.iter() {
            let index = self.index_of(id).ok_or_else(|| {
                IndexableError::InvalidArgument(format!("unknown location id {id:?}"))
            })?;
            if seen & (1 << index) != 0 {
                return Err(IndexableError::InvalidArgument(format!(
                    "location {id:?} repeats in the search order"
                )));
            }
            seen |= 1 << index;
            indices.push(index);
        }
        Ok(indices)
    }

    pub(crate) fn pure_payoff_masked(&self, hider_mask: u64, sequence: &[usize]) -> Rational {
        let mut f = self.eval_mask(0);
        let mut prefix = 0u64;
        let mut remaining = hider_mask;
        for &index in sequence {
            f = self.eval_after_adding(&f, prefix, index);
            prefix |= 1 << index;
            remaining &= !(1 << index);
            if remaining == 0 {
                break;
            }
        }
        f
    }

    /// Expected payoff of a pure hider set against "search `block` first,
    /// then the rest uniformly at random", for an arbitrary reward
    /// function. Enumerates the free subsets directly; the rescue game has
    /// a faster multiplicative path in the [`crate::game`] module.
    pub(crate) fn first_block_expectation(&self, hider_mask: u64, block_mask: u64) -> Rational {
        let outside = hider_mask & !block_mask;
        if outside == 0 {
            return self.eval_mask(hider_mask | block_mask);
        }
        let free_mask = self.full_mask() & !(hider_mask | block_mask);
        let free: Vec<usize> = (0..self.n())
            .filter(|i| free_mask & (1 << i) != 0)
            .collect();
        let m = outside.count_ones() as usize;
        let u = free.len();
        let factorials = factorials(m + u);
        let denom = Rational::from(factorials[m + u].clone());

        let mut total = Rational::zero();
        for choice in 0u64..(1 << u) {
            let mut mask = hider_mask | block_mask;
            for (bit, &index) in free.iter().enumerate() {
                if choice & (1 << bit) != 0 {
                    mask |= 1 << index;
                }
            }
            let t = choice.count_ones() as usize;
            let coeff =
                Rational::from(BigInt::from(m) * &factorials[m + t - 1] * &factorials[u - t])
                    / &denom;
            total += coeff * self.eval_mask(mask);
        }
        total
    }

    /// Exact expected payoff of mixed strategies under this reward
    /// function; mirrors [`Instance::expected_payoff`].
    pub fn expected_payoff(
        &self,
        hider: &HiderMix,
        searcher: &SearcherMix,
    ) -> Result<Rational, IndexableError> {
        let hider_support = self.mix_masks(hider)?;
        let mut total = Rational::zero();
        match searcher {
            SearcherMix::Orders(support) => {
                check_mix_weights(support.iter().map(|(_, w)| w))?;
                for (order, order_weight) in support {
                    let sequence = self.order_indices(order)?;
                    for (hider_mask, hider_weight) in &hider_support {
                        total += hider_weight
                            * order_weight
                            * self.pure_payoff_masked(*hider_mask, &sequence);
                    }
                }
            }
            SearcherMix::FirstBlocks(support) => {
                check_mix_weights(support.iter().map(|(_, w)| w))?;
                for (block, block_weight) in support {
                    let block_mask = self.mask_of(block.iter())?;
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

    fn mix_masks(&self, hider: &HiderMix) -> Result<Vec<(u64, Rational)>, IndexableError> {
        check_mix_weights(hider.support.iter().map(|(_, w)| w))?;
        let mut masks = Vec::with_capacity(hider.support.len());
        for (set, weight) in &hider.support {
            let mask = self.mask_of(set.iter())?;
            if masks.iter().any(|(m, _)| *m == mask) {
                return Err(IndexableError::InvalidArgument(format!(
                    "hider set {set} appears more than once"
                )));
            }
            masks.push((mask, weight.clone()));
        }
        Ok(masks)
    }

    /// Closed-form optimal strategies and exact value for `k` targets.
    ///
    /// The hider picks each k-subset `A` with probability proportional to
    /// the product of `z` over `A`; the searcher mirrors the same weights
    /// over first-block strategies. The hider mix makes every pure search
    /// yield the same payoff, so the value is computed by playing it
    /// against the identity ordering.
    pub fn solve_closed_form(&self, k: usize) -> Result<GameSolution, IndexableError> {
        let n = self.n();
        if k < 1 || k + 1 > n {
            return Err(IndexableError::InvalidArgument(format!(
                "target count k = {k} violates 1 <= k <= n-1 (n = {n})"
            )));
        }
        let z = self.recover_z()?;
        let normalizer = z.t_poly_full(k)?;

        let mut prefix_values = Vec::with_capacity(n);
        let mut f = self.eval_mask(0);
        let mut prefix = 0u64;
        for i in 0..n {
            f = self.eval_after_adding(&f, prefix, i);
            prefix |= 1 << i;
            prefix_values.push(f.clone());
        }

        let mut support = Vec::new();
        let mut value = Rational::zero();
        for mask in k_subset_masks(n, k) {
            let mut weight = Rational::one();
            let mut last = 0usize;
            for (i, zi) in z.values().iter().enumerate() {
                if mask & (1 << i) != 0 {
                    weight *= zi;
                    last = i;
                }
            }
            weight /= &normalizer;
            value += &weight * &prefix_values[last];
            support.push((HiderSet::new(self.id_set(mask)), weight));
        }

        Ok(GameSolution {
            value,
            hider: HiderMix {
                support: support.clone(),
            },
            searcher: SearcherMix::FirstBlocks(support),
            provenance: Provenance::ClosedForm,
        })
    }

    /// Exact game value for a single target, via the telescoping identity
    /// `V = (1 - prod p_i) / (sum (1-p_i)/p_i)`. Rescue families only
    /// (a discount folds into the probabilities first).
    pub fn value_k1(&self) -> Result<Rational, IndexableError> {
        let discounted: Vec<Rational> = match &self.spec {
            SetFunctionSpec::Rescue { p } => p.clone(),
            SetFunctionSpec::DiscountedRescue { p, gamma } => {
                p.iter().map(|pi| pi * gamma).collect()
            }
            _ => {
                return Err(IndexableError::Unsupported(
                    "the single-target value formula applies to rescue rewards only".to_string(),
                ))
            }
        };
        if self.n() < 2 {
            return Err(IndexableError::InvalidArgument(
                "k = 1 requires at least two locations".to_string(),
            ));
        }
        let mut index_sum = Rational::zero();
        let mut survival_all = Rational::one();
        for p in &discounted {
            index_sum += (Rational::one() - p) / p;
            survival_all *= p;
        }
        let lambda = index_sum.recip();
        Ok(lambda * (Rational::one() - survival_all))
    }
}

fn check_probabilities(p: &[Rational]) -> Result<(), IndexableError> {
    for pi in p {
        if *pi <= Rational::zero() || *pi >= Rational::one() {
            return Err(IndexableError::InvalidSpec(format!(
                "probability {pi} is not in (0,1)"
            )));
        }
    }
    Ok(())
}

fn check_mix_weights<'a, I>(weights: I) -> Result<(), IndexableError>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut sum = Rational::zero();
    let mut any = false;
    for w in weights {
        any = true;
        if *w <= Rational::zero() {
            return Err(IndexableError::InvalidArgument(format!(
                "mix weight {w} is not positive"
            )));
        }
        sum += w;
    }
    if !any || !sum.is_one() {
        return Err(IndexableError::InvalidArgument(format!(
            "mix weights sum to {sum}, not 1"
        )));
    }
    Ok(())
}

fn product_over(values: &[Rational], mask: u64) -> Rational {
    let mut product = Rational::one();
    for (i, v) in values.iter().enumerate() {
        if mask & (1 << i) != 0 {
            product *= v;
        }
    }
    product
}

fn sum_outside(values: &[Rational], mask: u64) -> Rational {
    let mut sum = Rational::zero();
    for (i, v) in values.iter().enumerate() {
        if mask & (1 << i) == 0 {
            sum += v;
        }
    }
    sum
}

fn power(base: &Rational, exponent: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exponent {
        out *= base;
    }
    out
}

/// All k-subsets of `{0..n}` as bitmasks, in lexicographic order of their
/// ascending index tuples.
pub(crate) fn k_subset_masks(n: usize, k: usize) -> Vec<u64> {
    fn extend(n: usize, k: usize, from: usize, current: &mut Vec<usize>, out: &mut Vec<u64>) {
        if current.len() == k {
            out.push(current.iter().fold(0u64, |m, &i| m | 1 << i));
            return;
        }
        for i in from..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            extend(n, k, i + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    extend(n, k, 0, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ids(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    fn rescue(ps: &[(i64, i64)]) -> SetFunctionGame {
        SetFunctionGame::new(
            ids(ps.len()),
            SetFunctionSpec::Rescue {
                p: ps.iter().map(|&(n, d)| rat(n, d)).collect(),
            },
        )
        .unwrap()
    }

    fn additive(cs: &[i64]) -> SetFunctionGame {
        SetFunctionGame::new(
            ids(cs.len()),
            SetFunctionSpec::AdditiveCost {
                c: cs.iter().map(|&c| rat(c, 1)).collect(),
            },
        )
        .unwrap()
    }

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn family_evaluation() {
        let g = rescue(&[(1, 2), (1, 3)]);
        assert_eq!(g.eval(&set(&["1", "2"])).unwrap(), rat(1, 6));

        let g = additive(&[2, 3, 5]);
        assert_eq!(g.eval(&set(&["1"])).unwrap(), rat(8, 1));

        let g = SetFunctionGame::new(
            ids(3),
            SetFunctionSpec::TravelSearch {
                c: vec![rat(1, 1); 3],
            },
        )
        .unwrap();
        assert_eq!(g.eval(&set(&["1"])).unwrap(), rat(4, 1));
    }

    #[test]
    fn marginals() {
        let g = rescue(&[(1, 2), (1, 3)]);
        assert_eq!(g.marginal(&set(&[]), "1").unwrap(), rat(-1, 2));
        assert_eq!(g.marginal(&set(&["2"]), "1").unwrap(), rat(-1, 6));
        assert!(matches!(
            g.marginal(&set(&["1"]), "1"),
            Err(IndexableError::InvalidArgument(_))
        ));

        let g = additive(&[2, 3]);
        assert_eq!(g.marginal(&set(&[]), "2").unwrap(), rat(-3, 1));
    }

    #[test]
    fn analytic_indices_are_recovered_and_verified() {
        let g = rescue(&[(1, 2), (3, 4)]);
        let z = g.recover_z().unwrap();
        assert_eq!(z.values(), &[rat(1, 1), rat(1, 3)]);

        let g = additive(&[2, 3, 5]);
        let z = g.recover_z().unwrap();
        assert_eq!(z.values(), &[rat(1, 1), rat(3, 2), rat(5, 2)]);
    }

    #[test]
    fn discount_of_one_is_plain_rescue() {
        let p = vec![rat(1, 2), rat(2, 5), rat(3, 4)];
        let plain = SetFunctionGame::new(ids(3), SetFunctionSpec::Rescue { p: p.clone() }).unwrap();
        let discounted = SetFunctionGame::new(
            ids(3),
            SetFunctionSpec::DiscountedRescue {
                p,
                gamma: rat(1, 1),
            },
        )
        .unwrap();
        for mask in 0u64..8 {
            assert_eq!(plain.eval_mask(mask), discounted.eval_mask(mask));
        }
        assert_eq!(
            plain.recover_z().unwrap().values(),
            discounted.recover_z().unwrap().values()
        );
        assert_eq!(plain.value_k1().unwrap(), discounted.value_k1().unwrap());
        assert_eq!(
            plain.solve_closed_form(1).unwrap(),
            discounted.solve_closed_form(1).unwrap()
        );
    }

    #[test]
    fn travel_search_matches_additive_with_shifted_costs() {
        let travel = SetFunctionGame::new(
            ids(3),
            SetFunctionSpec::TravelSearch {
                c: vec![rat(1, 2), rat(2, 1), rat(3, 1)],
            },
        )
        .unwrap();
        let shifted = SetFunctionGame::new(
            ids(3),
            SetFunctionSpec::AdditiveCost {
                c: vec![rat(3, 2), rat(3, 1), rat(4, 1)],
            },
        )
        .unwrap();
        assert_eq!(
            travel.recover_z().unwrap().values(),
            shifted.recover_z().unwrap().values()
        );
        let a = travel.solve_closed_form(2).unwrap();
        let b = shifted.solve_closed_form(2).unwrap();
        assert_eq!(a.hider, b.hider);
    }

    #[test]
    fn non_indexable_table_is_rejected_with_a_witness() {
        let g = SetFunctionGame::new(
            ids(2),
            SetFunctionSpec::ExplicitTable {
                values: vec![rat(4, 1), rat(3, 1), rat(2, 1), rat(2, 1)],
            },
        )
        .unwrap();
        match g.recover_z() {
            Err(IndexableError::NotIndexable(NotIndexable::NotStrictlyDecreasing {
                subset,
                added,
            })) => {
                assert_eq!(subset, vec!["2".to_string()]);
                assert_eq!(added, "1");
            }
            other => panic!("expected a strict-decrease witness, got {other:?}"),
        }
    }

    #[test]
    fn indexable_table_recovers_the_rescue_index() {
        // Table written out from the rescue reward with p = (1/2, 3/4).
        let g = SetFunctionGame::new(
            ids(2),
            SetFunctionSpec::ExplicitTable {
                values: vec![rat(1, 1), rat(1, 2), rat(3, 4), rat(3, 8)],
            },
        )
        .unwrap();
        let z = g.recover_z().unwrap();
        assert_eq!(z.values(), &[rat(1, 1), rat(1, 3)]);
    }

    #[test]
    fn tables_solve_like_the_family_they_tabulate() {
        let family = additive(&[2, 3, 5]);
        let values: Vec<Rational> = (0..8).map(|mask| family.eval_mask(mask)).collect();
        let table =
            SetFunctionGame::new(ids(3), SetFunctionSpec::ExplicitTable { values }).unwrap();
        for k in 1..=2 {
            assert_eq!(
                family.solve_closed_form(k).unwrap(),
                table.solve_closed_form(k).unwrap()
            );
        }
    }

    #[test]
    fn t_poly_examples() {
        let z = ZIndex::new(vec![rat(1, 1), rat(2, 1), rat(3, 1)]);
        assert_eq!(z.t_poly_full(2).unwrap(), rat(11, 1));
        assert_eq!(z.t_poly_full(0).unwrap(), rat(1, 1));
        assert_eq!(z.t_poly(&[0, 2], 1).unwrap(), rat(4, 1));

        let ones = ZIndex::new(vec![rat(1, 1); 3]);
        assert_eq!(ones.t_poly_full(2).unwrap(), rat(3, 1));

        assert!(matches!(
            z.t_poly(&[0], 2),
            Err(IndexableError::InvalidArgument(_))
        ));
    }

    #[test]
    fn closed_form_two_locations() {
        let g = rescue(&[(1, 2), (3, 4)]);
        let solution = g.solve_closed_form(1).unwrap();
        assert_eq!(solution.value, rat(15, 32));
        let weights: Vec<Rational> = solution
            .hider
            .support
            .iter()
            .map(|(_, w)| w.clone())
            .collect();
        assert_eq!(weights, vec![rat(3, 4), rat(1, 4)]);
        assert_eq!(solution.provenance, Provenance::ClosedForm);

        // Equalization: both pure orders give the same payoff.
        for order in [SearchOrder::new(["1", "2"]), SearchOrder::new(["2", "1"])] {
            let payoff = g
                .expected_payoff(&solution.hider, &SearcherMix::point(order))
                .unwrap();
            assert_eq!(payoff, rat(15, 32));
        }
    }

    #[test]
    fn closed_form_two_targets() {
        let g = rescue(&[(1, 2), (1, 2), (1, 2)]);
        let solution = g.solve_closed_form(2).unwrap();
        assert_eq!(solution.value, rat(1, 6));
        for (_, w) in &solution.hider.support {
            assert_eq!(*w, rat(1, 3));
        }
    }

    #[test]
    fn closed_form_additive_pair() {
        let g = additive(&[1, 1]);
        let solution = g.solve_closed_form(1).unwrap();
        assert_eq!(solution.value, rat(1, 2));
        let weights: Vec<Rational> = solution
            .hider
            .support
            .iter()
            .map(|(_, w)| w.clone())
            .collect();
        assert_eq!(weights, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn single_target_value_formula() {
        let g = rescue(&[(1, 2), (3, 4)]);
        assert_eq!(g.value_k1().unwrap(), rat(15, 32));
        assert_eq!(g.value_k1().unwrap(), g.solve_closed_form(1).unwrap().value);

        let g = rescue(&[(1, 2), (1, 2)]);
        assert_eq!(g.value_k1().unwrap(), rat(3, 8));

        let single =
            SetFunctionGame::new(ids(1), SetFunctionSpec::Rescue { p: vec![rat(1, 2)] }).unwrap();
        assert!(single.value_k1().is_err());
        assert!(additive(&[1, 2]).value_k1().is_err());
    }

    #[test]
    fn general_first_block_matches_the_rescue_fast_path() {
        let ps = [(1, 2), (2, 3), (3, 4), (4, 5)];
        let g = rescue(&ps);
        let inst = Instance::new(
            ps.iter()
                .enumerate()
                .map(|(i, &(n, d))| ((i + 1).to_string(), rat(n, d))),
            2,
        );
        for hider in k_subset_masks(4, 2) {
            for block in k_subset_masks(4, 2) {
                assert_eq!(
                    g.first_block_expectation(hider, block),
                    inst.first_block_expectation(hider, block),
                );
            }
        }
    }

    #[test]
    fn subset_enumeration_is_lexicographic() {
        assert_eq!(k_subset_masks(3, 2), vec![0b011, 0b101, 0b110]);
        assert_eq!(k_subset_masks(4, 1), vec![1, 2, 4, 8]);
        assert_eq!(k_subset_masks(3, 0), vec![0]);
    }
}
