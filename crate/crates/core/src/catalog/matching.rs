//! The matching game.
//!
//! Alice receives an m-bit string x, Bob a perfect matching M on
//! {0, …, m−1}. Alice outputs a ⌈lg m⌉-bit string a; Bob outputs a pair
//! {α, β} ∈ M and a ⌈lg m⌉-bit string b. They win iff
//! x_α ⊕ x_β = (α ⊕ β) · (a ⊕ b), where · is the parity of the bitwise AND.
//! No promise: every question is legitimate.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::QuantumStrategy;
use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder, Symbol};
use crate::quantum::{
    LocalProgram, LocalStep, RegisterLayout, StateDescriptor, SubspacePartition, Unitary,
};

/// A perfect matching on {0, …, m−1}: m/2 disjoint pairs covering the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    m: usize,
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(m: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if m == 0 || m % 2 != 0 {
            return Err(Error::input("matching needs even m ≥ 2"));
        }
        pairs = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        pairs.sort_unstable();
        let mut seen = vec![false; m];
        for &(a, b) in &pairs {
            if a == b || b >= m || seen[a] || seen[b] {
                return Err(Error::input("pairs must partition {0..m}"));
            }
            seen[a] = true;
            seen[b] = true;
        }
        if pairs.len() != m / 2 {
            return Err(Error::input("pairs must partition {0..m}"));
        }
        Ok(Matching { m, pairs })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        let p = (a.min(b), a.max(b));
        self.pairs.contains(&p)
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|(a, b)| format!("{{{a},{b}}}"))
            .collect();
        write!(f, "{}", parts.join(""))
    }
}

/// Number of perfect matchings on m points: (m−1)!! for even m.
fn double_factorial_odd(m: usize) -> u128 {
    let mut acc: u128 = 1;
    let mut k = 1;
    while k < m {
        acc = acc.saturating_mul(k as u128);
        k += 2;
    }
    acc
}

/// All (m−1)!! perfect matchings in canonical order: the smallest free index
/// is paired with each larger free index in turn.
pub fn enumerate_matchings(m: usize, cap: u64) -> Result<Vec<Matching>> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::input("perfect matchings need even m ≥ 2"));
    }
    let count = double_factorial_odd(m);
    if count > cap as u128 {
        return Err(Error::capacity(
            format!("perfect matchings on {m} points"),
            count,
            cap as u128,
        ));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut free: Vec<usize> = (0..m).collect();
    let mut current: Vec<(usize, usize)> = Vec::with_capacity(m / 2);
    fn recurse(
        free: &mut Vec<usize>,
        current: &mut Vec<(usize, usize)>,
        m: usize,
        out: &mut Vec<Matching>,
    ) {
        if free.is_empty() {
            out.push(Matching {
                m,
                pairs: current.clone(),
            });
            return;
        }
        let first = free[0];
        for i in 1..free.len() {
            let partner = free[i];
            let mut rest: Vec<usize> = free
                .iter()
                .copied()
                .filter(|&x| x != first && x != partner)
                .collect();
            current.push((first, partner));
            recurse(&mut rest, current, m, out);
            current.pop();
        }
    }
    recurse(&mut free, &mut current, m, &mut out);
    Ok(out)
}

fn ceil_lg(m: usize) -> usize {
    (usize::BITS - (m - 1).leading_zeros()) as usize
}

fn and_parity(u: usize, v: usize) -> usize {
    ((u & v).count_ones() % 2) as usize
}

pub fn build_matching_game(m: usize) -> Result<(Game, QuantumStrategy)> {
    if m == 0 || m % 2 != 0 || m > 12 {
        return Err(Error::input("matching game needs even m with 2 ≤ m ≤ 12"));
    }
    let q_bits = ceil_lg(m);
    let dim = 1usize << q_bits;
    let matchings = enumerate_matchings(m, 1 << 20)?;
    let all_pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .collect();
    let pair_index = {
        let all_pairs = all_pairs.clone();
        move |a: usize, b: usize| -> usize {
            let p = (a.min(b), a.max(b));
            all_pairs.iter().position(|&x| x == p).expect("valid pair")
        }
    };

    let alice_inputs = 1usize << m;
    let bob_outputs = all_pairs.len() * dim;
    let win_matchings = matchings.clone();
    let win_pairs = all_pairs.clone();
    let game = GameBuilder::new(
        "matching",
        vec![alice_inputs, matchings.len()],
        vec![dim, bob_outputs],
        |_| true,
        move |q, a| {
            let x = q[0];
            let matching = &win_matchings[q[1]];
            let (alpha, beta) = win_pairs[a[1] / dim];
            if !matching.contains(alpha, beta) {
                return false;
            }
            let b = a[1] % dim;
            let x_alpha = (x >> alpha) & 1;
            let x_beta = (x >> beta) & 1;
            x_alpha ^ x_beta == and_parity(alpha ^ beta, a[0] ^ b)
        },
        vec![0, 0],
    )
    .param("m", m as i64)
    .input_labels({
        let matchings = matchings.clone();
        move |player, s| {
            if player == 0 {
                (0..m)
                    .map(|j| if (s >> j) & 1 == 1 { '1' } else { '0' })
                    .collect()
            } else {
                matchings[s].to_string()
            }
        }
    })
    .output_labels({
        let all_pairs = all_pairs.clone();
        move |player, s| {
            if player == 0 {
                format!("{s:0q_bits$b}")
            } else {
                let (a, b) = all_pairs[s / dim];
                format!("{{{a},{b}}}:{:0q_bits$b}", s % dim)
            }
        }
    })
    .build()?;

    let layout = RegisterLayout::uniform_qubits(2, q_bits)?;
    let walsh = Arc::new(Unitary::hadamard_pow(q_bits));

    let mut alice_programs = Vec::with_capacity(alice_inputs);
    for x in 0..alice_inputs {
        let phases: Vec<Complex64> = (0..dim)
            .map(|j| {
                if j < m && (x >> j) & 1 == 1 {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect();
        alice_programs.push(LocalProgram {
            steps: vec![
                LocalStep::Apply(Arc::new(Unitary::diagonal(&phases)?)),
                LocalStep::Apply(walsh.clone()),
                LocalStep::MeasureAll,
            ],
        });
    }

    let mut bob_programs = Vec::with_capacity(matchings.len());
    for matching in &matchings {
        let mut blocks: Vec<Vec<usize>> = matching
            .pairs()
            .iter()
            .map(|&(a, b)| vec![a, b])
            .collect();
        if dim > m {
            blocks.push((m..dim).collect());
        }
        let partition = SubspacePartition::new(blocks, dim)?;
        bob_programs.push(LocalProgram {
            steps: vec![
                LocalStep::MeasureSubspace(Arc::new(partition)),
                LocalStep::Apply(walsh.clone()),
                LocalStep::MeasureAll,
            ],
        });
    }

    let alice_post = |_input: Symbol, raw: &[usize]| -> Symbol { raw[0] };
    let bob_post = {
        let matchings = matchings.clone();
        move |input: Symbol, raw: &[usize]| -> Symbol {
            let matching = &matchings[input];
            // the block past the matched pairs spans unused basis states and
            // has zero probability
            let block = raw[0].min(matching.pairs().len() - 1);
            let (a, b) = matching.pairs()[block];
            pair_index(a, b) * dim + raw[1]
        }
    };

    let strategy = QuantumStrategy::from_program_tables(
        layout,
        StateDescriptor::UniformPairDiagonal { terms: m },
        vec![alice_programs, bob_programs],
        vec![Arc::new(alice_post), Arc::new(bob_post)],
    )?;
    Ok((game, strategy))
}
