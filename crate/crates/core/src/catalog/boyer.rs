//! The modulo-M game for n ≥ 3 players.
//!
//! Each player receives an integer x_i (reduced mod 2M, which is all the
//! winning condition can see) with the promise that Σ x_i is even, and must
//! output a_i ∈ {0, …, M−1} so that Σ a_i ≡ (Σ x_i)/2 (mod M).
//!
//! The strategy shares (1/√M) Σ_j |j⟩^{⊗n}; player i applies the phase
//! |j⟩ ↦ e^{−πi·j·x_i/M} |j⟩, then a Fourier transform mod M, then measures.
//! The exhaustive simulation at small (n, M) is the oracle for this
//! construction.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::QuantumStrategy;
use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder};
use crate::quantum::{LocalProgram, LocalStep, RegisterLayout, StateDescriptor, Unitary};

pub fn build_boyer_game(n: usize, modulus: usize) -> Result<(Game, QuantumStrategy)> {
    if n < 3 {
        return Err(Error::input("modulo-M game needs n ≥ 3 players"));
    }
    if modulus < 2 || modulus % 2 != 0 || modulus > 16 {
        return Err(Error::input("modulo-M game needs even 2 ≤ M ≤ 16"));
    }
    let inputs = 2 * modulus;
    let game = GameBuilder::new(
        "boyer",
        vec![inputs; n],
        vec![modulus; n],
        |q| q.iter().sum::<usize>() % 2 == 0,
        move |q, a| {
            let half_sum = q.iter().sum::<usize>() / 2;
            a.iter().sum::<usize>() % modulus == half_sum % modulus
        },
        vec![0; n],
    )
    .param("n", n as i64)
    .param("M", modulus as i64)
    .build()?;

    let layout = RegisterLayout::uniform_qudits(n, modulus)?;
    let qft = Arc::new(Unitary::qft(modulus));
    let mut per_input = Vec::with_capacity(inputs);
    for x in 0..inputs {
        let phases: Vec<Complex64> = (0..modulus)
            .map(|j| Complex64::from_polar(1.0, -PI * (j * x) as f64 / modulus as f64))
            .collect();
        per_input.push(LocalProgram {
            steps: vec![
                LocalStep::Apply(Arc::new(Unitary::diagonal(&phases)?)),
                LocalStep::Apply(qft.clone()),
                LocalStep::MeasureAll,
            ],
        });
    }
    let programs = vec![per_input; n];
    let postprocess: Vec<Arc<crate::catalog::PostprocessFn>> =
        vec![Arc::new(|_input, raw: &[usize]| raw[0]); n];
    let strategy = QuantumStrategy::from_program_tables(
        layout,
        StateDescriptor::UniformAllDiagonal { levels: modulus },
        programs,
        postprocess,
    )?;
    Ok((game, strategy))
}
