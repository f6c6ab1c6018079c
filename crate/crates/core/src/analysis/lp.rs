//! Exact rational simplex for zero-sum matrix games over 0/1 win vectors.
//!
//! The value of the game max over mixtures of columns, min over questions,
//! is recovered from the linear program
//!
//!   maximize Σ_q z_q   subject to   Σ_q W[s][q]·z_q ≤ 1 for every column s,
//!
//! whose optimum V gives the game value 1/V. Slack variables provide the
//! initial basis; Bland's rule guarantees termination; all arithmetic is in
//! `BigRational`, so values like 8/9 come out exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A column's win pattern over the questions, packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WinVector {
    words: Vec<u64>,
    len: usize,
}

impl WinVector {
    pub fn zeros(len: usize) -> Self {
        WinVector {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn set(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    pub fn get(&self, idx: usize) -> bool {
        (self.words[idx / 64] >> (idx % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Pointwise ≤: every question this column wins, `other` wins too.
    pub fn dominated_by(&self, other: &WinVector) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn or_into(&self, acc: &mut [u64]) {
        for (a, w) in acc.iter_mut().zip(&self.words) {
            *a |= w;
        }
    }
}

/// Drop duplicate and strictly dominated columns. Sound for the max-min
/// objective: weight on a dominated column can move to its dominator without
/// lowering any question's win probability.
pub fn prune_dominated(columns: Vec<WinVector>) -> Vec<WinVector> {
    let mut unique: Vec<WinVector> = {
        let mut set = std::collections::HashSet::new();
        columns.into_iter().filter(|c| set.insert(c.clone())).collect()
    };
    unique.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));
    let mut kept: Vec<WinVector> = Vec::new();
    'outer: for c in unique {
        for k in &kept {
            if c.dominated_by(k) {
                continue 'outer;
            }
        }
        kept.push(c);
    }
    kept
}

/// Exact value of the zero-sum game with the given 0/1 columns.
///
/// Returns 0 when some question is won by no column. `prune` controls the
/// dominated-column filter (soundness is cross-checked in tests by comparing
/// pruned and unpruned runs).
pub fn game_value(columns: &[WinVector], n_questions: usize, prune: bool) -> BigRational {
    if n_questions == 0 || columns.is_empty() {
        return BigRational::zero();
    }
    // a question no column wins pins the min to zero for every mixture
    let mut covered = vec![0u64; n_questions.div_ceil(64)];
    for c in columns {
        c.or_into(&mut covered);
    }
    for q in 0..n_questions {
        if (covered[q / 64] >> (q % 64)) & 1 == 0 {
            return BigRational::zero();
        }
    }
    let cols: Vec<WinVector> = if prune {
        prune_dominated(columns.to_vec())
    } else {
        columns.to_vec()
    };
    let lp_value = solve_packing_lp(&cols, n_questions);
    BigRational::one() / lp_value
}

/// maximize Σ z_q subject to W z ≤ 1, z ≥ 0, by primal simplex with Bland's
/// rule on an explicit tableau.
fn solve_packing_lp(columns: &[WinVector], n_questions: usize) -> BigRational {
    let m = columns.len();
    let n = n_questions;
    let width = n + m + 1;
    let zero = BigRational::zero();
    let one = BigRational::one();

    // tableau rows 0..m: constraints; row m: objective (reduced costs)
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    for col in columns {
        let mut row = vec![zero.clone(); width];
        for q in 0..n {
            if col.get(q) {
                row[q] = one.clone();
            }
        }
        row[width - 1] = one.clone();
        t.push(row);
    }
    {
        let mut obj = vec![zero.clone(); width];
        for q in 0..n {
            obj[q] = -one.clone();
        }
        t.push(obj);
    }
    for (i, row) in t.iter_mut().enumerate().take(m) {
        row[n + i] = one.clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: entering variable = smallest index with negative reduced cost
        let entering = match (0..n + m).find(|&j| t[m][j] < zero) {
            Some(j) => j,
            None => break,
        };
        // ratio test; Bland tie-break on smallest basis variable index
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio: Option<BigRational> = None;
        for i in 0..m {
            if t[i][entering] > zero {
                let ratio = &t[i][width - 1] / &t[i][entering];
                let better = match &best_ratio {
                    None => true,
                    Some(b) => {
                        ratio < *b
                            || (ratio == *b
                                && basis[i] < basis[pivot_row.expect("set with best_ratio")])
                    }
                };
                if better {
                    best_ratio = Some(ratio);
                    pivot_row = Some(i);
                }
            }
        }
        let Some(pr) = pivot_row else {
            // unbounded: some question is free to grow, the game value is 0;
            // unreachable given the coverage pre-check
            return BigRational::new(BigInt::from(u64::MAX), BigInt::one());
        };
        // pivot
        let pivot = t[pr][entering].clone();
        for x in t[pr].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..=m {
            if i != pr && !t[i][entering].is_zero() {
                let factor = t[i][entering].clone();
                let (pivot_row_copy, row) = {
                    let pr_row = t[pr].clone();
                    (pr_row, &mut t[i])
                };
                for (x, p) in row.iter_mut().zip(&pivot_row_copy) {
                    *x -= &factor * p;
                }
            }
        }
        basis[pr] = entering;
    }
    t[m][width - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(bits: &[u8]) -> WinVector {
        let mut v = WinVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i);
            }
        }
        v
    }

    #[test]
    fn all_winning_column_gives_value_one() {
        let cols = vec![column(&[1, 1, 1])];
        assert_eq!(game_value(&cols, 3, true), BigRational::one());
    }

    #[test]
    fn uncovered_question_gives_zero() {
        let cols = vec![column(&[1, 0]), column(&[1, 0])];
        assert!(game_value(&cols, 2, true).is_zero());
    }

    #[test]
    fn complementary_columns_split_evenly() {
        // two questions, each won by exactly one column: value 1/2
        let cols = vec![column(&[1, 0]), column(&[0, 1])];
        let v = game_value(&cols, 2, true);
        assert_eq!(v, BigRational::new(BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn three_cycle_gives_two_thirds() {
        // each column wins two of three questions: uniform mixture gets 2/3
        let cols = vec![column(&[1, 1, 0]), column(&[0, 1, 1]), column(&[1, 0, 1])];
        let v = game_value(&cols, 3, true);
        assert_eq!(v, BigRational::new(BigInt::from(2), BigInt::from(3)));
    }

    #[test]
    fn pruning_does_not_change_the_value() {
        let cols = vec![
            column(&[1, 1, 0]),
            column(&[1, 0, 0]), // dominated
            column(&[0, 1, 1]),
            column(&[1, 0, 1]),
            column(&[1, 1, 0]), // duplicate
        ];
        let with = game_value(&cols, 3, true);
        let without = game_value(&cols, 3, false);
        assert_eq!(with, without);
    }

    #[test]
    fn dominated_filter_keeps_maximal_columns() {
        let cols = vec![column(&[1, 1, 0]), column(&[1, 0, 0]), column(&[0, 0, 1])];
        let kept = prune_dominated(cols);
        assert_eq!(kept.len(), 2);
    }
}
