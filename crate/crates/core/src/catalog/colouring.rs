//! The impossible colouring game, built from any verified Kochen-Specker set.
//!
//! Alice receives either an orthogonal pair of vectors or a full orthogonal
//! d-tuple; Bob receives a single vector, promised to be one of Alice's.
//! Alice's output encoding enforces the colouring constraints structurally:
//! on a pair she reports a trit (first coloured 1, second coloured 1, or
//! neither); on a d-tuple she reports the index of the unique vector coloured
//! one. Bob outputs the colour he assigns to his vector. They win iff both
//! assign the same colour to Bob's vector.
//!
//! Pair inputs are every orthogonal pair that co-occurs in some context of
//! the set; tuple inputs are the listed full d-tuples.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::catalog::ks::{verify_ks_property, KSSet};
use crate::catalog::QuantumStrategy;
use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder, Symbol};
use crate::quantum::{
    gram_schmidt_complete, LocalProgram, LocalStep, RegisterLayout, StateDescriptor, Unitary,
};

/// One input Alice can receive: indices into the set's vector list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliceContext {
    pub members: Vec<usize>,
    pub is_pair: bool,
}

/// Alice's question alphabet for a set: all context pairs (sorted), then all
/// full d-tuples in listed order.
pub fn alice_contexts(ks: &KSSet) -> Vec<AliceContext> {
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for ctx in &ks.contexts {
        for (i, &a) in ctx.iter().enumerate() {
            for &b in ctx.iter().skip(i + 1) {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    let mut out: Vec<AliceContext> = pairs
        .into_iter()
        .map(|(a, b)| AliceContext {
            members: vec![a, b],
            is_pair: true,
        })
        .collect();
    for ctx in &ks.contexts {
        if ctx.len() == ks.dimension {
            out.push(AliceContext {
                members: ctx.clone(),
                is_pair: false,
            });
        }
    }
    out
}

pub fn build_colouring_game(
    ks: &KSSet,
    skip_verification: bool,
) -> Result<(Game, QuantumStrategy)> {
    if ks.n_vectors() == 0 {
        return Err(Error::input("colouring game needs a nonempty vector set"));
    }
    if !skip_verification {
        let verdict = verify_ks_property(ks);
        if !verdict.is_non_colourable() {
            return Err(Error::validation(
                "vector set is {0,1}-colourable: it does not have the Kochen-Specker property",
            ));
        }
    }
    let d = ks.dimension;
    let contexts = alice_contexts(ks);
    if contexts.is_empty() {
        return Err(Error::input("the set lists no contexts"));
    }
    let n_vectors = ks.n_vectors();

    let win_contexts = contexts.clone();
    let promise_contexts = contexts.clone();
    let witness = vec![0, contexts[0].members[0]];
    let game = GameBuilder::new(
        "colouring",
        vec![contexts.len(), n_vectors],
        vec![d + 1, 2],
        move |q| promise_contexts[q[0]].members.contains(&q[1]),
        move |q, a| {
            let ctx = &win_contexts[q[0]];
            let pos = ctx
                .members
                .iter()
                .position(|&v| v == q[1])
                .expect("promise guarantees membership");
            let alice_colour = if ctx.is_pair {
                match a[0] {
                    0 => Some(0),
                    1 | 2 => Some(usize::from(a[0] - 1 == pos)),
                    _ => None, // index answers are inappropriate on a pair
                }
            } else {
                match a[0] {
                    0 => None, // "neither" is inappropriate on a full tuple
                    k => Some(usize::from(k - 1 == pos)),
                }
            };
            match alice_colour {
                Some(colour) => colour == a[1],
                None => false,
            }
        },
        witness,
    )
    .param("d", d as i64)
    .param("vectors", n_vectors as i64)
    .param("contexts", ks.contexts.len() as i64)
    .input_labels({
        let contexts = contexts.clone();
        move |player, s| {
            if player == 0 {
                let c = &contexts[s];
                let ids: Vec<String> = c.members.iter().map(|v| format!("v{v}")).collect();
                format!("{{{}}}", ids.join(","))
            } else {
                format!("v{s}")
            }
        }
    })
    .output_labels(move |player, s| {
        if player == 0 {
            if s == 0 {
                "neither".to_string()
            } else {
                format!("#{s}")
            }
        } else {
            s.to_string()
        }
    })
    .build()?;

    let layout = RegisterLayout::uniform_qudits(2, d)?;
    let as_f64 = |idx: usize| -> Vec<f64> { ks.vectors[idx].iter().map(|&x| x as f64).collect() };

    let mut alice_programs = Vec::with_capacity(contexts.len());
    for ctx in &contexts {
        let seeds: Vec<Vec<f64>> = ctx.members.iter().map(|&v| as_f64(v)).collect();
        let basis = gram_schmidt_complete(&seeds, d)?;
        alice_programs.push(LocalProgram {
            steps: vec![
                LocalStep::Apply(Arc::new(Unitary::from_orthonormal_real_rows(basis)?)),
                LocalStep::MeasureAll,
            ],
        });
    }
    let mut bob_programs = Vec::with_capacity(n_vectors);
    for v in 0..n_vectors {
        let basis = gram_schmidt_complete(&[as_f64(v)], d)?;
        bob_programs.push(LocalProgram {
            steps: vec![
                LocalStep::Apply(Arc::new(Unitary::from_orthonormal_real_rows(basis)?)),
                LocalStep::MeasureAll,
            ],
        });
    }

    let post_contexts = contexts.clone();
    let alice_post = move |input: Symbol, raw: &[usize]| -> Symbol {
        let ctx = &post_contexts[input];
        if ctx.is_pair {
            match raw[0] {
                0 => 1,
                1 => 2,
                _ => 0, // measured a completion vector: neither input coloured 1
            }
        } else {
            raw[0] + 1
        }
    };
    let bob_post = |_input: Symbol, raw: &[usize]| -> Symbol { usize::from(raw[0] == 0) };

    let strategy = QuantumStrategy::from_program_tables(
        layout,
        StateDescriptor::UniformPairDiagonal { terms: d },
        vec![alice_programs, bob_programs],
        vec![Arc::new(alice_post), Arc::new(bob_post)],
    )?;
    Ok((game, strategy))
}
