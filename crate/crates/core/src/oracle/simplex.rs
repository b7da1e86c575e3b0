//! Exact-arithmetic primal simplex for the small LPs behind matrix games.
//!
//! Solves `max c.x subject to A x <= b, x >= 0` with `b >= 0`, so the
//! all-slack basis is feasible from the start. Pivoting uses Dantzig
//! pricing and falls back to Bland's rule after a fixed number of
//! iterations to rule out cycling; every number is a rational, so the
//! optimum is exact.

use crate::rational::Rational;
use num_traits::Zero;

pub(crate) struct SimplexOutcome {
    pub objective: Rational,
    pub x: Vec<Rational>,
    /// Dual values of the `m` constraints.
    pub duals: Vec<Rational>,
}

const BLAND_SWITCH: usize = 512;

pub(crate) fn simplex_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> SimplexOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert!(b.iter().all(|v| *v >= Rational::zero()));

    // Tableau rows: [A | I | b]; cost row holds the reduced costs and, in
    // its last slot, the running objective value.
    let width = n + m + 1;
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let mut t = Vec::with_capacity(width);
        t.extend(row.iter().cloned());
        for j in 0..m {
            t.push(if i == j {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            });
        }
        t.push(b[i].clone());
        tableau.push(t);
    }
    let mut cost: Vec<Rational> = Vec::with_capacity(width);
    cost.extend(c.iter().map(|v| -v.clone()));
    cost.extend(std::iter::repeat_n(Rational::zero(), m + 1));
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let bland = iterations > BLAND_SWITCH;
        let entering = if bland {
            (0..n + m).find(|&j| cost[j] < Rational::zero())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..n + m {
                if cost[j] < Rational::zero() && best.is_none_or(|current| cost[j] < cost[current])
                {
                    best = Some(j);
                }
            }
            best
        };
        let Some(entering) = entering else {
            break;
        };

        let mut leaving: Option<(usize, Rational)> = None;
        for (r, row) in tableau.iter().enumerate() {
            if row[entering] <= Rational::zero() {
                continue;
            }
            let ratio = &row[width - 1] / &row[entering];
            let replace = match &leaving {
                None => true,
                Some((best_r, best_ratio)) => {
                    ratio < *best_ratio || (ratio == *best_ratio && basis[r] < basis[*best_r])
                }
            };
            if replace {
                leaving = Some((r, ratio));
            }
        }
        let (pivot_row, _) = leaving.expect("game LPs are bounded");

        // Pivot on (pivot_row, entering).
        let factor = tableau[pivot_row][entering].clone();
        for value in tableau[pivot_row].iter_mut() {
            *value /= &factor;
        }
        let pivot = tableau[pivot_row].clone();
        for (r, row) in tableau.iter_mut().enumerate() {
            if r == pivot_row || row[entering].is_zero() {
                continue;
            }
            let scale = row[entering].clone();
            for (value, base) in row.iter_mut().zip(&pivot) {
                *value -= &scale * base;
            }
        }
        if !cost[entering].is_zero() {
            let scale = cost[entering].clone();
            for (value, base) in cost.iter_mut().zip(&pivot) {
                *value -= &scale * base;
            }
        }
        basis[pivot_row] = entering;
    }

    let mut x = vec![Rational::zero(); n];
    for (r, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = tableau[r][width - 1].clone();
        }
    }
    SimplexOutcome {
        objective: cost[width - 1].clone(),
        x,
        duals: cost[n..n + m].to_vec(),
    }
}

/// Exact value and optimal mixed strategies of a zero-sum matrix game
/// (row player maximizes). Returns `(value, row_mix, col_mix)`.
///
/// The LP is posed from whichever side has fewer strategies so that the
/// tableau has `min(rows, cols)` constraint rows; the other side's mix
/// comes out of the duals.
pub(crate) fn solve_zero_sum(
    payoffs: &[Vec<Rational>],
) -> (Rational, Vec<Rational>, Vec<Rational>) {
    let rows = payoffs.len();
    let cols = payoffs[0].len();
    if rows <= cols {
        solve_row_oriented(payoffs)
    } else {
        let negated: Vec<Vec<Rational>> = (0..cols)
            .map(|j| (0..rows).map(|i| -payoffs[i][j].clone()).collect())
            .collect();
        let (value, row_mix, col_mix) = solve_row_oriented(&negated);
        (-value, col_mix, row_mix)
    }
}

fn solve_row_oriented(payoffs: &[Vec<Rational>]) -> (Rational, Vec<Rational>, Vec<Rational>) {
    let rows = payoffs.len();
    let cols = payoffs[0].len();
    // Shift all entries so the minimum is exactly 1; the game value shifts
    // by the same constant and the optimal mixes are unchanged.
    let min = payoffs
        .iter()
        .flat_map(|row| row.iter())
        .min()
        .expect("nonempty matrix")
        .clone();
    let shift = Rational::from_integer(1.into()) - min;
    let shifted: Vec<Vec<Rational>> = payoffs
        .iter()
        .map(|row| row.iter().map(|v| v + &shift).collect())
        .collect();

    // Column player's LP: max sum(x) subject to M x <= 1. The optimum is
    // 1/v for the shifted value v; the duals scale to the row mix.
    let ones_m = vec![Rational::from_integer(1.into()); rows];
    let ones_n = vec![Rational::from_integer(1.into()); cols];
    let outcome = simplex_max(&shifted, &ones_m, &ones_n);
    let value = outcome.objective.recip();
    let col_mix: Vec<Rational> = outcome.x.iter().map(|v| v * &value).collect();
    let row_mix: Vec<Rational> = outcome.duals.iter().map(|v| v * &value).collect();
    (value - shift, row_mix, col_mix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_traits::One;

    fn matrix(rows: &[&[(i64, i64)]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|row| row.iter().map(|&(n, d)| rat(n, d)).collect())
            .collect()
    }

    fn check_mixes(payoffs: &[Vec<Rational>], value: &Rational, rm: &[Rational], cm: &[Rational]) {
        assert_eq!(rm.iter().sum::<Rational>(), Rational::one());
        assert_eq!(cm.iter().sum::<Rational>(), Rational::one());
        assert!(rm.iter().all(|w| *w >= Rational::zero()));
        assert!(cm.iter().all(|w| *w >= Rational::zero()));
        // Row mix guarantees at least the value on every column.
        for j in 0..payoffs[0].len() {
            let payoff: Rational = (0..payoffs.len()).map(|i| &rm[i] * &payoffs[i][j]).sum();
            assert!(payoff >= *value);
        }
        // Column mix holds every row to at most the value.
        for row in payoffs {
            let payoff: Rational = row.iter().zip(cm).map(|(a, w)| a * w).sum();
            assert!(payoff <= *value);
        }
    }

    #[test]
    fn one_by_one() {
        let m = matrix(&[&[(3, 7)]]);
        let (value, rm, cm) = solve_zero_sum(&m);
        assert_eq!(value, rat(3, 7));
        check_mixes(&m, &value, &rm, &cm);
    }

    #[test]
    fn two_by_two_equalizing() {
        let m = matrix(&[&[(1, 2), (3, 8)], &[(3, 8), (3, 4)]]);
        let (value, rm, cm) = solve_zero_sum(&m);
        assert_eq!(value, rat(15, 32));
        assert_eq!(rm, vec![rat(3, 4), rat(1, 4)]);
        assert_eq!(cm, vec![rat(3, 4), rat(1, 4)]);
        check_mixes(&m, &value, &rm, &cm);
    }

    #[test]
    fn saddle_point() {
        let m = matrix(&[&[(2, 1), (3, 1)], &[(1, 1), (0, 1)]]);
        let (value, rm, cm) = solve_zero_sum(&m);
        assert_eq!(value, rat(2, 1));
        check_mixes(&m, &value, &rm, &cm);
    }

    #[test]
    fn cyclic_three_by_three() {
        // Skewed rock-paper-scissors; the value is 1/12.
        let m = matrix(&[
            &[(0, 1), (2, 1), (-1, 1)],
            &[(-1, 1), (0, 1), (1, 1)],
            &[(1, 1), (-1, 1), (0, 1)],
        ]);
        let (value, rm, cm) = solve_zero_sum(&m);
        assert_eq!(value, rat(1, 12));
        check_mixes(&m, &value, &rm, &cm);
    }

    #[test]
    fn tall_matrices_transpose() {
        let m = matrix(&[&[(1, 1)], &[(2, 1)], &[(1, 2)]]);
        let (value, rm, cm) = solve_zero_sum(&m);
        assert_eq!(value, rat(2, 1));
        assert_eq!(rm[1], rat(1, 1));
        check_mixes(&m, &value, &rm, &cm);
    }
}
