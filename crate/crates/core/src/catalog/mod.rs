//! Concrete constructions of the six pseudo-telepathy game families:
//! the game instance plus a quantum strategy that wins every legitimate
//! question with certainty.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{Answer, Game, Question, Symbol};
use crate::quantum::{
    exact_outcome_distribution, make_state, LocalProgram, LocalStep, PureState, RawOutcome,
    RegisterLayout, StateDescriptor,
};

pub mod boyer;
pub mod colouring;
pub mod dj;
pub mod ks;
pub mod magic;
pub mod matching;
pub mod parity;

pub use boyer::build_boyer_game;
pub use colouring::build_colouring_game;
pub use dj::build_dj_game;
pub use ks::{verify_ks_property, KSSet, KsVerdict};
pub use magic::build_magic_square_game;
pub use matching::{build_matching_game, enumerate_matchings, Matching};
pub use parity::{build_parity_game, extended_parity_ell, mermin_ghz};

/// Probability below which a "never happens" claim is accepted.
pub const CERTAINTY_TOL: f64 = 1e-9;

/// Classical post-processing: (input symbol, raw measurement record) → output symbol.
pub type PostprocessFn = dyn Fn(Symbol, &[usize]) -> Symbol + Send + Sync;

/// Input-conditioned local procedure generator for one player. Programs are
/// generated on demand so that large input alphabets cost nothing to build.
pub type ProgramFn = dyn Fn(Symbol) -> LocalProgram + Send + Sync;

/// Shape of one measurement step, used by the detector-imperfection models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasurementShape {
    /// Full-register computational measurement over the given qudit dimensions.
    Computational { qudit_dims: Vec<usize> },
    /// Projective partial measurement with the given number of blocks.
    Subspace { blocks: usize },
}

impl MeasurementShape {
    /// Number of independent physical detectors this measurement uses: one
    /// per measured qudit, or one for a subspace click.
    pub fn detector_count(&self) -> usize {
        match self {
            MeasurementShape::Computational { qudit_dims } => qudit_dims.len(),
            MeasurementShape::Subspace { .. } => 1,
        }
    }
}

/// Shared initial state, per-player input-conditioned local programs, and
/// classical post-processing from raw measurement records to output symbols.
pub struct QuantumStrategy {
    layout: RegisterLayout,
    initial: StateDescriptor,
    programs: Vec<Box<ProgramFn>>,
    postprocess: Vec<Arc<PostprocessFn>>,
}

impl QuantumStrategy {
    pub fn new(
        layout: RegisterLayout,
        initial: StateDescriptor,
        programs: Vec<Box<ProgramFn>>,
        postprocess: Vec<Arc<PostprocessFn>>,
    ) -> Result<Self> {
        if programs.len() != layout.n_players() || postprocess.len() != layout.n_players() {
            return Err(Error::input("programs/postprocess must cover every player"));
        }
        // descriptor must fit the layout
        make_state(&layout, &initial)?;
        Ok(QuantumStrategy {
            layout,
            initial,
            programs,
            postprocess,
        })
    }

    /// Build from fully materialized per-input program tables.
    pub fn from_program_tables(
        layout: RegisterLayout,
        initial: StateDescriptor,
        tables: Vec<Vec<LocalProgram>>,
        postprocess: Vec<Arc<PostprocessFn>>,
    ) -> Result<Self> {
        let programs = tables
            .into_iter()
            .map(|table| {
                Box::new(move |input: Symbol| table[input].clone()) as Box<ProgramFn>
            })
            .collect();
        QuantumStrategy::new(layout, initial, programs, postprocess)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn initial_descriptor(&self) -> &StateDescriptor {
        &self.initial
    }

    pub fn initial_state(&self) -> PureState {
        make_state(&self.layout, &self.initial).expect("validated at construction")
    }

    pub fn program(&self, player: usize, input: Symbol) -> LocalProgram {
        (self.programs[player])(input)
    }

    pub fn postprocess(&self, player: usize, input: Symbol, raw: &[usize]) -> Symbol {
        (self.postprocess[player])(input, raw)
    }

    fn question_programs(&self, q: &Question) -> Vec<LocalProgram> {
        q.entries()
            .iter()
            .enumerate()
            .map(|(p, &x)| self.program(p, x))
            .collect()
    }

    /// Measurement shapes of a player's program on the given input.
    pub fn measurement_shapes(&self, player: usize, input: Symbol) -> Vec<MeasurementShape> {
        self.program(player, input)
            .steps
            .iter()
            .filter_map(|s| match s {
                LocalStep::Apply(_) => None,
                LocalStep::MeasureAll => Some(MeasurementShape::Computational {
                    qudit_dims: self.layout.player_qudits(player).to_vec(),
                }),
                LocalStep::MeasureSubspace(p) => Some(MeasurementShape::Subspace {
                    blocks: p.blocks().len(),
                }),
            })
            .collect()
    }

    /// Exact joint distribution over raw measurement records for one question.
    pub fn raw_distribution(&self, q: &Question) -> Result<BTreeMap<Vec<RawOutcome>, f64>> {
        let state = self.initial_state();
        exact_outcome_distribution(&state, &self.question_programs(q))
    }

    /// Exact joint distribution over post-processed answers for one question.
    pub fn answer_distribution(&self, q: &Question) -> Result<BTreeMap<Vec<Symbol>, f64>> {
        let raw = self.raw_distribution(q)?;
        let mut out: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
        for (records, p) in raw {
            let answer: Vec<Symbol> = records
                .iter()
                .enumerate()
                .map(|(player, rec)| self.postprocess(player, q.entries()[player], rec))
                .collect();
            *out.entry(answer).or_insert(0.0) += p;
        }
        Ok(out)
    }

    /// Total probability the strategy gives an inappropriate answer to `q`.
    pub fn losing_probability(&self, game: &Game, q: &Question) -> Result<f64> {
        let dist = self.answer_distribution(q)?;
        let mut losing = 0.0;
        for (answer, p) in dist {
            if !game.winning_raw(q.entries(), &answer) {
                losing += p;
            }
        }
        Ok(losing)
    }

    /// Maximum losing probability over all legitimate questions: 0 (within
    /// tolerance) certifies a quantum winning strategy.
    pub fn max_losing_probability(&self, game: &Game, cap: u64) -> Result<f64> {
        let questions = game.legitimate_questions(cap)?;
        let mut worst: f64 = 0.0;
        for q in &questions {
            worst = worst.max(self.losing_probability(game, q)?);
        }
        Ok(worst)
    }

    /// Sampled raw measurement records for one question, using the caller's
    /// randomness. Each player's record is produced by their own program
    /// acting on their own registers; cross-player influence flows only
    /// through the shared state's collapse.
    pub fn sample_raw(&self, q: &Question, rng: &mut impl rand::Rng) -> Result<Vec<RawOutcome>> {
        let mut state = self.initial_state();
        let mut records = Vec::with_capacity(self.layout.n_players());
        for (player, &x) in q.entries().iter().enumerate() {
            let program = self.program(player, x);
            let (raw, next) = crate::quantum::run_program_sampled(&state, player, &program, rng)?;
            records.push(raw);
            state = next;
        }
        Ok(records)
    }

    /// One sampled answer for one question.
    pub fn sample_answer(&self, q: &Question, rng: &mut impl rand::Rng) -> Result<Answer> {
        let records = self.sample_raw(q, rng)?;
        let answer: Vec<Symbol> = records
            .iter()
            .enumerate()
            .map(|(player, raw)| self.postprocess(player, q.entries()[player], raw))
            .collect();
        Ok(Answer::from_values(&answer))
    }
}

/// Static description of one game family; the single source for what the CLI
/// prints in `list`.
pub struct FamilyInfo {
    pub id: &'static str,
    pub parameters: &'static str,
    pub players: &'static str,
    pub omega_tilde: &'static str,
    pub thresholds: &'static str,
    pub notes: &'static str,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn shared_dimension(qs: &QuantumStrategy) -> usize {
        qs.layout().total_dim()
    }

    #[test]
    fn small_cases_have_classical_winning_strategies() {
        // the short inputs of these families are winnable classically, so
        // their enumerated bound is exactly 1
        let one = BigRational::new(BigInt::from(1), BigInt::from(1));
        let (dj1, _) = dj::build_dj_game(1).unwrap();
        let bounds = crate::analysis::optimal_success_proportion(&dj1, 1 << 20).unwrap();
        assert_eq!(bounds.omega_tilde, one);
        let (m2, _) = matching::build_matching_game(2).unwrap();
        let bounds = crate::analysis::optimal_success_proportion(&m2, 1 << 20).unwrap();
        assert_eq!(bounds.omega_tilde, one);
    }

    #[test]
    fn minimality_sanity_checks() {
        // the three-player single-bit game gets by with total dimension 8,
        // smaller than any two-player catalog game's shared register
        let (_, ghz_qs) = parity::mermin_ghz();
        assert_eq!(shared_dimension(&ghz_qs), 8);
        let two_party: Vec<(&str, QuantumStrategy)> = vec![
            ("magic-square", magic::build_magic_square_game().unwrap().1),
            (
                "colouring",
                colouring::build_colouring_game(&ks::shipped_d4_18vec(), true)
                    .unwrap()
                    .1,
            ),
        ];
        for (label, qs) in &two_party {
            assert!(
                shared_dimension(qs) >= 9,
                "{label}: dimension {}",
                shared_dimension(qs)
            );
        }
        // no two-party game in the catalog asks both players for one bit
        let (magic_game, _) = magic::build_magic_square_game().unwrap();
        assert_ne!(magic_game.output_sizes(), &[2, 2]);
        let (col_game, _) =
            colouring::build_colouring_game(&ks::shipped_d4_18vec(), true).unwrap();
        assert_ne!(col_game.output_sizes(), &[2, 2]);
    }
}

pub fn families() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            id: "ghz",
            parameters: "none (parity n=3 ℓ=1)",
            players: "3",
            omega_tilde: "ω̃ = ω = 3/4",
            thresholds: "p* = 1/2+2^(-4/3), η* = (1/2)·4^(1/3)",
            notes: "single bit in, single bit out; minimal total dimension",
        },
        FamilyInfo {
            id: "parity",
            parameters: "n ≥ 3, ℓ ≥ 1",
            players: "n",
            omega_tilde: "ω̃ = ω = 1/2 + 2^(-⌈n/2⌉)  (ℓ=1)",
            thresholds: "p* per closed form, η* = (1/2)·4^(1/n)  (ℓ=1)",
            notes: "ℓ-bit inputs with a divisibility promise",
        },
        FamilyInfo {
            id: "extended-parity",
            parameters: "n ≥ 3 (ℓ = ⌈lg n⌉ − 1)",
            players: "n",
            omega_tilde: "unknown in general",
            thresholds: "η* ≤ 8/n",
            notes: "preset of the parity family",
        },
        FamilyInfo {
            id: "dj",
            parameters: "m ≥ 1 (inputs of length 2^m)",
            players: "2",
            omega_tilde: "1 for m ≤ 3; no winning strategy at m = 4",
            thresholds: "no known targets",
            notes: "equal or half-distant inputs; outputs match iff inputs do",
        },
        FamilyInfo {
            id: "magic-square",
            parameters: "none",
            players: "2",
            omega_tilde: "ω̃ = ω = 8/9",
            thresholds: "no known targets",
            notes: "promise-free; rows even, columns odd, intersection agrees",
        },
        FamilyInfo {
            id: "matching",
            parameters: "m even ≥ 2",
            players: "2",
            omega_tilde: "1 at m = 2; unknown for even m ≥ 4",
            thresholds: "no known targets",
            notes: "promise-free and scalable",
        },
        FamilyInfo {
            id: "colouring",
            parameters: "d = 4 (shipped 18-vector set) or a KS-set file",
            players: "2",
            omega_tilde: "< 1, exact value not known",
            thresholds: "noise model undefined for non-bit outputs",
            notes: "built from any verified Kochen-Specker set",
        },
        FamilyInfo {
            id: "boyer",
            parameters: "n ≥ 3, M even ≥ 2 (inputs reduced mod 2M)",
            players: "n",
            omega_tilde: "unknown in general",
            thresholds: "no known targets",
            notes: "modulo-M winning condition via a Fourier transform",
        },
    ]
}
