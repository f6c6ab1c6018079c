//! The magic square game.
//!
//! Alice fills row x and Bob column y of a 3×3 binary square. Rows must have
//! even parity, columns odd parity, and the intersection entry must agree.
//! No promise: all nine questions are legitimate.
//!
//! Each player measures two qubits and completes the third output bit so the
//! parity condition holds by construction.

use std::sync::Arc;

use num_complex::Complex64;

use crate::catalog::QuantumStrategy;
use crate::error::Result;
use crate::game::{Game, GameBuilder, Symbol};
use crate::quantum::{LocalProgram, LocalStep, RegisterLayout, StateDescriptor, Unitary};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row entries of a 3-bit output symbol (entry 1 is the most significant).
pub fn triple_bits(s: Symbol) -> [usize; 3] {
    [(s >> 2) & 1, (s >> 1) & 1, s & 1]
}

fn scaled(rows: [[Complex64; 4]; 4], factor: f64) -> Result<Unitary> {
    Unitary::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|z| z * factor).collect())
            .collect(),
    )
}

fn alice_unitary(x: Symbol) -> Result<Unitary> {
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    match x {
        0 => scaled(
            [
                [i, zero, zero, one],
                [zero, -i, one, zero],
                [zero, i, one, zero],
                [one, zero, zero, i],
            ],
            std::f64::consts::FRAC_1_SQRT_2,
        ),
        1 => scaled(
            [
                [i, one, one, i],
                [-i, one, -one, i],
                [i, one, -one, -i],
                [-i, one, one, -i],
            ],
            0.5,
        ),
        _ => scaled(
            [
                [-one, -one, -one, one],
                [one, one, -one, one],
                [one, -one, one, one],
                [one, -one, -one, -one],
            ],
            0.5,
        ),
    }
}

fn bob_unitary(y: Symbol) -> Result<Unitary> {
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    match y {
        0 => scaled(
            [
                [i, -i, one, one],
                [-i, -i, one, -one],
                [one, one, -i, i],
                [-i, i, one, one],
            ],
            0.5,
        ),
        1 => scaled(
            [
                [-one, i, one, i],
                [one, i, one, -i],
                [one, -i, one, i],
                [-one, -i, one, -i],
            ],
            0.5,
        ),
        _ => scaled(
            [
                [one, zero, zero, one],
                [-one, zero, zero, one],
                [zero, one, one, zero],
                [zero, one, -one, zero],
            ],
            std::f64::consts::FRAC_1_SQRT_2,
        ),
    }
}

pub fn build_magic_square_game() -> Result<(Game, QuantumStrategy)> {
    let game = GameBuilder::new(
        "magic-square",
        vec![3, 3],
        vec![8, 8],
        |_| true,
        |q, a| {
            let row = triple_bits(a[0]);
            let col = triple_bits(a[1]);
            let row_even = row.iter().sum::<usize>() % 2 == 0;
            let col_odd = col.iter().sum::<usize>() % 2 == 1;
            row_even && col_odd && row[q[1]] == col[q[0]]
        },
        vec![0, 0],
    )
    .input_labels(|_, s| (s + 1).to_string())
    .output_labels(|_, s| {
        let b = triple_bits(s);
        format!("{}{}{}", b[0], b[1], b[2])
    })
    .build()?;

    let layout = RegisterLayout::uniform_qubits(2, 2)?;
    let alice_programs: Vec<LocalProgram> = (0..3)
        .map(|x| {
            Ok(LocalProgram {
                steps: vec![
                    LocalStep::Apply(Arc::new(alice_unitary(x)?)),
                    LocalStep::MeasureAll,
                ],
            })
        })
        .collect::<Result<_>>()?;
    let bob_programs: Vec<LocalProgram> = (0..3)
        .map(|y| {
            Ok(LocalProgram {
                steps: vec![
                    LocalStep::Apply(Arc::new(bob_unitary(y)?)),
                    LocalStep::MeasureAll,
                ],
            })
        })
        .collect::<Result<_>>()?;

    let complete_even = |_input: Symbol, raw: &[usize]| -> Symbol {
        let b1 = (raw[0] >> 1) & 1;
        let b2 = raw[0] & 1;
        (b1 << 2) | (b2 << 1) | ((b1 + b2) % 2)
    };
    let complete_odd = |_input: Symbol, raw: &[usize]| -> Symbol {
        let b1 = (raw[0] >> 1) & 1;
        let b2 = raw[0] & 1;
        (b1 << 2) | (b2 << 1) | ((b1 + b2 + 1) % 2)
    };

    let strategy = QuantumStrategy::from_program_tables(
        layout,
        StateDescriptor::MagicSquare,
        vec![alice_programs, bob_programs],
        vec![Arc::new(complete_even), Arc::new(complete_odd)],
    )?;
    Ok((game, strategy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::CERTAINTY_TOL;
    use crate::game::Question;
    use crate::quantum::{apply_local, make_state};

    #[test]
    fn a2_b3_state_has_the_eight_expected_terms() {
        let layout = RegisterLayout::uniform_qubits(2, 2).unwrap();
        let mut state = make_state(&layout, &StateDescriptor::MagicSquare).unwrap();
        state = apply_local(&state, 0, &alice_unitary(1).unwrap()).unwrap();
        state = apply_local(&state, 1, &bob_unitary(2).unwrap()).unwrap();
        let v = 1.0 / (2.0 * 2f64.sqrt());
        // the eight-term support with every amplitude of magnitude 1/(2√2);
        // branch phases are unobservable under the immediate computational
        // measurement, and the literal matrix product differs from the
        // printed display by such phases
        let expected_support: [usize; 8] = [
            0b00 * 4 + 0b00,
            0b00 * 4 + 0b10,
            0b01 * 4 + 0b01,
            0b01 * 4 + 0b11,
            0b10 * 4 + 0b01,
            0b10 * 4 + 0b11,
            0b11 * 4 + 0b00,
            0b11 * 4 + 0b10,
        ];
        for (i, amp) in state.amplitudes().iter().enumerate() {
            if expected_support.contains(&i) {
                assert!((amp.norm() - v).abs() < 1e-12, "amp[{i}] = {amp}");
            } else {
                assert!(amp.norm() < 1e-12, "amp[{i}] = {amp} should vanish");
            }
        }
    }

    #[test]
    fn x2_y3_has_eight_appropriate_outcomes() {
        let (game, qs) = build_magic_square_game().unwrap();
        let q = Question(vec![1, 2]);
        let raw = qs.raw_distribution(&q).unwrap();
        assert_eq!(raw.len(), 8);
        for p in raw.values() {
            assert!((p - 0.125).abs() < 1e-12);
        }
        assert!(qs.losing_probability(&game, &q).unwrap() <= CERTAINTY_TOL);
    }

    #[test]
    fn worked_example_row2_col3() {
        let (game, qs) = build_magic_square_game().unwrap();
        // Alice measures 10, Bob measures 01
        let a = qs.postprocess(0, 1, &[0b10]);
        let b = qs.postprocess(1, 2, &[0b01]);
        assert_eq!(triple_bits(a), [1, 0, 1]);
        assert_eq!(triple_bits(b), [0, 1, 0]);
        // third entry of row 2 equals second entry of column 3
        assert!(game.winning_raw(&[1, 2], &[a, b]));
    }

    #[test]
    fn all_nine_questions_win_with_certainty() {
        let (game, qs) = build_magic_square_game().unwrap();
        assert_eq!(game.legitimate_questions(100).unwrap().len(), 9);
        assert!(qs.max_losing_probability(&game, 100).unwrap() <= CERTAINTY_TOL);
    }

    #[test]
    fn parity_violations_lose() {
        let (game, _) = build_magic_square_game().unwrap();
        // row 111 has odd parity: never appropriate
        assert!(!game.winning_raw(&[0, 0], &[0b111, 0b100]));
        // column with even parity: never appropriate
        assert!(!game.winning_raw(&[0, 0], &[0b000, 0b110]));
    }
}
