//! The parity family: Mermin-GHZ (n=3, ℓ=1), Mermin's parity game (ℓ=1), and
//! the extended parity game (ℓ = ⌈lg n⌉ − 1).
//!
//! Each of n players receives an ℓ-bit integer x_i with the promise that
//! Σ x_i is divisible by 2^ℓ, outputs one bit a_i, and the players win iff
//! Σ a_i ≡ (Σ x_i)/2^ℓ (mod 2).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::QuantumStrategy;
use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder};
use crate::quantum::{LocalProgram, LocalStep, RegisterLayout, StateDescriptor, Unitary};

/// ℓ parameter of the extended parity preset: ⌈lg n⌉ − 1.
pub fn extended_parity_ell(n: usize) -> usize {
    let ceil_lg = usize::BITS as usize - (n - 1).leading_zeros() as usize;
    ceil_lg - 1
}

/// The Mermin-GHZ game is the parity game at n=3, ℓ=1.
pub fn mermin_ghz() -> (Game, QuantumStrategy) {
    let (game, qs) = build_parity_game(3, 1).expect("fixed in-range parameters");
    (game.renamed("mermin-ghz"), qs)
}

pub fn build_parity_game(n: usize, ell: usize) -> Result<(Game, QuantumStrategy)> {
    if n < 3 {
        return Err(Error::input("parity game needs n ≥ 3 players"));
    }
    if ell < 1 || ell > 16 {
        return Err(Error::input("parity game needs 1 ≤ ℓ ≤ 16"));
    }
    let modulus = 1usize << ell;
    let game = GameBuilder::new(
        "parity",
        vec![modulus; n],
        vec![2; n],
        move |q| q.iter().sum::<usize>() % modulus == 0,
        move |q, a| {
            let target = (q.iter().sum::<usize>() / modulus) % 2;
            a.iter().sum::<usize>() % 2 == target
        },
        vec![0; n],
    )
    .param("n", n as i64)
    .param("l", ell as i64)
    .input_labels(move |_, s| format!("{s:0width$b}", width = ell))
    .build()?;

    let layout = RegisterLayout::uniform_qubits(n, 1)?;
    let hadamard = Arc::new(Unitary::hadamard());
    let mut per_input = Vec::with_capacity(modulus);
    for x in 0..modulus {
        let phase = Complex64::from_polar(1.0, PI * x as f64 / modulus as f64);
        let s_gate = Unitary::diagonal(&[Complex64::new(1.0, 0.0), phase])?;
        per_input.push(LocalProgram {
            steps: vec![
                LocalStep::Apply(Arc::new(s_gate)),
                LocalStep::Apply(hadamard.clone()),
                LocalStep::MeasureAll,
            ],
        });
    }
    let programs = vec![per_input; n];
    let postprocess: Vec<Arc<crate::catalog::PostprocessFn>> =
        vec![Arc::new(|_input, raw: &[usize]| raw[0]); n];
    let strategy = QuantumStrategy::from_program_tables(layout, StateDescriptor::Ghz, programs, postprocess)?;
    Ok((game, strategy))
}
