//! Optimal pure responses to a known single-target hider distribution.
//!
//! Given a distribution `x` over locations and an indexable reward
//! function with index vector `z`, the best pure search order sorts the
//! locations by the ratio `x_i / z_i` — descending to maximize the payoff
//! and ascending to minimize it. For the rescue reward the ratio is
//! `x_i p_i / (1 - p_i)`, and for additive costs it is the classic
//! weighted-cost ratio `x_i / c_i`. A brute-force enumeration over all
//! orderings serves as the independent cross-check.

use crate::game::SearchOrder;
use crate::indexable::{IndexableError, SetFunctionGame};
use crate::rational::Rational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BestResponseError {
    #[error("invalid hider distribution: {0}")]
    InvalidDistribution(String),
    #[error(transparent)]
    Indexable(#[from] IndexableError),
    #[error("brute force supports n <= {cap} locations, got n = {n}")]
    ResourceLimit { n: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// A single-target best-response problem: an indexable game plus a hider
/// distribution over its locations (aligned with the location order).
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseProblem {
    game: SetFunctionGame,
    x: Vec<Rational>,
}

impl ResponseProblem {
    pub fn new(game: SetFunctionGame, x: Vec<Rational>) -> Result<Self, BestResponseError> {
        if x.len() != game.n() {
            return Err(BestResponseError::InvalidDistribution(format!(
                "{} weights for {} locations",
                x.len(),
                game.n()
            )));
        }
        let mut sum = Rational::zero();
        for w in &x {
            if *w < Rational::zero() {
                return Err(BestResponseError::InvalidDistribution(format!(
                    "weight {w} is negative"
                )));
            }
            sum += w;
        }
        if !sum.is_one() {
            return Err(BestResponseError::InvalidDistribution(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(ResponseProblem { game, x })
    }

    pub fn game(&self) -> &SetFunctionGame {
        &self.game
    }

    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    /// Expected payoff of a pure search against the hider distribution:
    /// the sum over positions of `x` at that location times `f` of the
    /// prefix searched so far.
    pub fn response_payoff(&self, order: &SearchOrder) -> Result<Rational, BestResponseError> {
        let sequence = self.game.order_indices(order)?;
        Ok(self.payoff_indexed(&sequence))
    }

    fn payoff_indexed(&self, sequence: &[usize]) -> Rational {
        let mut f = self.game.eval_mask(0);
        let mut prefix = 0u64;
        let mut total = Rational::zero();
        for &index in sequence {
            f = self.game.eval_after_adding(&f, prefix, index);
            prefix |= 1 << index;
            total += &self.x[index] * &f;
        }
        total
    }

    /// The ratios `x_i / z_i`, aligned with the location order.
    pub fn indices(&self) -> Result<Vec<Rational>, BestResponseError> {
        let z = self.game.recover_z()?;
        Ok(self
            .x
            .iter()
            .zip(z.values())
            .map(|(xi, zi)| xi / zi)
            .collect())
    }

    /// The index-rule search order: locations sorted by `x_i / z_i`,
    /// descending for [`Direction::Maximize`] and ascending for
    /// [`Direction::Minimize`], ties broken by ascending location id.
    pub fn index_order(&self, direction: Direction) -> Result<SearchOrder, BestResponseError> {
        let ratios = self.indices()?;
        let mut order: Vec<usize> = (0..self.game.n()).collect();
        let ids = self.game.ids();
        order.sort_by(|&a, &b| {
            let by_ratio = match direction {
                Direction::Maximize => ratios[b].cmp(&ratios[a]),
                Direction::Minimize => ratios[a].cmp(&ratios[b]),
            };
            by_ratio.then_with(|| ids[a].cmp(&ids[b]))
        });
        Ok(SearchOrder::new(order.into_iter().map(|i| ids[i].clone())))
    }

    /// Exhaustive optimum over all `n!` orderings; ties resolve to the
    /// lexicographically least order (by location id at each position).
    pub fn best_response_bruteforce(
        &self,
        direction: Direction,
        cap: usize,
    ) -> Result<(SearchOrder, Rational), BestResponseError> {
        let n = self.game.n();
        if n > cap {
            return Err(BestResponseError::ResourceLimit { n, cap });
        }
        // Enumerate in lexicographic id order so the first optimum found
        // is the lexicographically least one.
        let mut rank: Vec<usize> = (0..n).collect();
        rank.sort_by(|&a, &b| self.game.ids()[a].cmp(&self.game.ids()[b]));

        struct Search<'a> {
            problem: &'a ResponseProblem,
            by_id: Vec<usize>,
            direction: Direction,
            sequence: Vec<usize>,
            best: Option<(Vec<usize>, Rational)>,
        }

        impl Search<'_> {
            fn walk(&mut self, used: u64, f: Rational, prefix: u64, partial: Rational) {
                if self.sequence.len() == self.by_id.len() {
                    let better = match &self.best {
                        None => true,
                        Some((_, payoff)) => match self.direction {
                            Direction::Maximize => partial > *payoff,
                            Direction::Minimize => partial < *payoff,
                        },
                    };
                    if better {
                        self.best = Some((self.sequence.clone(), partial));
                    }
                    return;
                }
                for slot in 0..self.by_id.len() {
                    if used & (1 << slot) != 0 {
                        continue;
                    }
                    let index = self.by_id[slot];
                    let f_next = self.problem.game.eval_after_adding(&f, prefix, index);
                    let partial_next = partial.clone() + &self.problem.x[index] * &f_next;
                    self.sequence.push(index);
                    self.walk(used | 1 << slot, f_next, prefix | 1 << index, partial_next);
                    self.sequence.pop();
                }
            }
        }

        let mut search = Search {
            problem: self,
            by_id: rank,
            direction,
            sequence: Vec::with_capacity(n),
            best: None,
        };
        search.walk(0, self.game.eval_mask(0), 0, Rational::zero());
        let (sequence, payoff) = search.best.expect("at least one ordering exists");
        let ids = self.game.ids();
        Ok((
            SearchOrder::new(sequence.into_iter().map(|i| ids[i].clone())),
            payoff,
        ))
    }
}
