//! The Deutsch-Jozsa family.
//!
//! Alice and Bob receive n-bit strings (n = 2^m) that are promised to be
//! equal or to differ in exactly half of the positions; they must output
//! m-bit strings a, b with a = b if and only if x = y.

use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::QuantumStrategy;
use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder};
use crate::quantum::{LocalProgram, LocalStep, RegisterLayout, StateDescriptor, Unitary};

pub fn build_dj_game(m: usize) -> Result<(Game, QuantumStrategy)> {
    if m < 1 || m > 4 {
        return Err(Error::input("Deutsch-Jozsa game needs 1 ≤ m ≤ 4"));
    }
    let n = 1usize << m; // input length in bits
    let inputs = 1usize << n;
    let outputs = 1usize << m;
    let half = n / 2;
    let game = GameBuilder::new(
        "dj",
        vec![inputs; 2],
        vec![outputs; 2],
        move |q| {
            let distance = (q[0] ^ q[1]).count_ones() as usize;
            distance == 0 || distance == half
        },
        |q, a| (a[0] == a[1]) == (q[0] == q[1]),
        vec![0, 0],
    )
    .param("m", m as i64)
    .param("n", n as i64)
    .input_labels(move |_, s| bit_string(s, n))
    .output_labels(move |_, s| bit_string(s, m))
    .build()?;

    let layout = RegisterLayout::uniform_qubits(2, m)?;
    let walsh = Arc::new(Unitary::hadamard_pow(m));
    // programs are generated on demand: at m = 4 there are 65536 inputs per
    // player and a materialized table would be wasteful
    let make_program = move |x: usize| {
        let phases: Vec<Complex64> = (0..n)
            .map(|j| {
                if (x >> j) & 1 == 1 {
                    Complex64::new(-1.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect();
        LocalProgram {
            steps: vec![
                LocalStep::Apply(Arc::new(
                    Unitary::diagonal(&phases).expect("±1 phases are unit"),
                )),
                LocalStep::Apply(walsh.clone()),
                LocalStep::MeasureAll,
            ],
        }
    };
    let programs: Vec<Box<crate::catalog::ProgramFn>> = vec![
        Box::new(make_program.clone()),
        Box::new(make_program),
    ];
    let postprocess: Vec<Arc<crate::catalog::PostprocessFn>> =
        vec![Arc::new(|_input, raw: &[usize]| raw[0]); 2];
    let strategy = QuantumStrategy::new(
        layout,
        StateDescriptor::UniformPairDiagonal { terms: n },
        programs,
        postprocess,
    )?;
    Ok((game, strategy))
}

/// Positions indexed from 0, written left to right: symbol s as x_0 x_1 ⋯.
fn bit_string(s: usize, len: usize) -> String {
    (0..len)
        .map(|j| if (s >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}
