//! Monte Carlo referee harness: referees sample questions at random, players
//! answer without communicating, promise-violating rounds are post-selected
//! out, and statistics accumulate.
//!
//! Rounds are independent; round r draws its randomness from stream r of a
//! ChaCha generator seeded with the run seed, so results are deterministic,
//! order-insensitive, and safe to evaluate in parallel. Each player's answer
//! is computed from that player's own input, own register view (shared-state
//! collapse flows through the simulator only), and the round's randomness.
//!
//! Physical timing enforcement is out of scope: the no-communication contract
//! is structural, not relativistic.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{classical_pvalue_bound, rational_to_f64, ClassicalBounds, RationalRepr};
use crate::catalog::QuantumStrategy;
use crate::error::{Error, Result};
use crate::game::{Answer, DeterministicStrategy, Game, OutputSymbol, Question, RoundOutcome};
use crate::imperfect::{bit_widths, EfficiencyParams, NoiseParams};

/// How referees draw questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuestionMode {
    /// Uniformly over the legitimate questions P.
    UniformOverPromise,
    /// Each referee draws their own symbol uniformly and independently; the
    /// promise may fail and such rounds are post-selected out.
    IndependentProduct,
}

/// Who answers the questions.
pub enum PlayerExecutor<'a> {
    Quantum(&'a QuantumStrategy),
    Classical(&'a DeterministicStrategy),
    /// Shared randomness: a weighted mixture over deterministic profiles,
    /// drawn per round before the question arrives.
    ClassicalMixed(&'a [(f64, DeterministicStrategy)]),
    /// A quantum strategy behind imperfect detectors.
    NoisyQuantum {
        strategy: &'a QuantumStrategy,
        noise: Option<NoiseParams>,
        efficiency: Option<EfficiencyParams>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub wins: u64,
    pub draws: u64,
    pub losses: u64,
}

/// Post-selected record of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStatistics {
    pub game: String,
    pub seed: u64,
    pub question_mode: QuestionMode,
    pub rounds_total: u64,
    pub rounds_legitimate: u64,
    pub wins: u64,
    pub draws: u64,
    pub losses: u64,
    pub per_question: BTreeMap<String, Tally>,
    /// Upper bound on the probability that a classical process produces at
    /// least this many wins; attached by [`summarize`].
    pub pvalue_bound: Option<f64>,
}

impl TrialStatistics {
    /// Wins under the convention where promise violations count as wins,
    /// rather than being post-selected away.
    pub fn wins_including_promise_violations(&self) -> u64 {
        self.wins + (self.rounds_total - self.rounds_legitimate)
    }
}

/// One row of the optional per-round transcript.
#[derive(Debug, Clone, Serialize)]
pub struct TranscriptRow {
    pub round: u64,
    pub question: String,
    pub answer: String,
    pub outcome: String,
}

pub struct RunOptions {
    pub rounds: u64,
    pub mode: QuestionMode,
    pub seed: u64,
    pub cap: u64,
    pub transcript: bool,
}

fn sample_question(
    game: &Game,
    mode: QuestionMode,
    questions: &[Question],
    rng: &mut ChaCha8Rng,
) -> Question {
    match mode {
        QuestionMode::UniformOverPromise => questions[rng.gen_range(0..questions.len())].clone(),
        QuestionMode::IndependentProduct => Question(
            game.input_sizes()
                .iter()
                .map(|&size| rng.gen_range(0..size))
                .collect(),
        ),
    }
}

fn noisy_quantum_answer(
    game: &Game,
    strategy: &QuantumStrategy,
    noise: Option<NoiseParams>,
    efficiency: Option<EfficiencyParams>,
    q: &Question,
    rng: &mut ChaCha8Rng,
) -> Result<Answer> {
    let mut records = strategy.sample_raw(q, rng)?;
    if let Some(NoiseParams { p }) = noise {
        let widths = bit_widths(game, strategy)?;
        for (player, entry_widths) in widths.iter().enumerate() {
            for (entry, &w) in entry_widths.iter().enumerate() {
                for bit in 0..w {
                    if rng.gen::<f64>() > p {
                        records[player][entry] ^= 1 << bit;
                    }
                }
            }
        }
    }
    let mut fired = vec![true; game.n_players()];
    if let Some(EfficiencyParams { eta }) = efficiency {
        for (player, ok) in fired.iter_mut().enumerate() {
            let detectors: usize = strategy
                .measurement_shapes(player, q.entries()[player])
                .iter()
                .map(|s| s.detector_count())
                .sum();
            for _ in 0..detectors {
                if rng.gen::<f64>() > eta {
                    *ok = false;
                }
            }
        }
    }
    Ok(Answer(
        records
            .iter()
            .enumerate()
            .map(|(player, raw)| {
                if fired[player] {
                    OutputSymbol::Value(strategy.postprocess(player, q.entries()[player], raw))
                } else {
                    OutputSymbol::Bottom
                }
            })
            .collect(),
    ))
}

fn answer_for(
    game: &Game,
    exec: &PlayerExecutor<'_>,
    q: &Question,
    shared_pick: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Answer> {
    match exec {
        PlayerExecutor::Quantum(qs) => qs.sample_answer(q, rng),
        PlayerExecutor::Classical(s) => Ok(s.answer(q)),
        PlayerExecutor::ClassicalMixed(mixture) => {
            let total: f64 = mixture.iter().map(|(w, _)| w).sum();
            let mut pick = shared_pick * total;
            let mut chosen = &mixture[mixture.len() - 1].1;
            for (w, s) in mixture.iter() {
                if pick < *w {
                    chosen = s;
                    break;
                }
                pick -= w;
            }
            Ok(chosen.answer(q))
        }
        PlayerExecutor::NoisyQuantum {
            strategy,
            noise,
            efficiency,
        } => noisy_quantum_answer(game, strategy, *noise, *efficiency, q, rng),
    }
}

struct Accum {
    total: u64,
    legitimate: u64,
    wins: u64,
    draws: u64,
    losses: u64,
    per_question: BTreeMap<String, Tally>,
    transcript: Vec<TranscriptRow>,
}

impl Accum {
    fn new() -> Self {
        Accum {
            total: 0,
            legitimate: 0,
            wins: 0,
            draws: 0,
            losses: 0,
            per_question: BTreeMap::new(),
            transcript: Vec::new(),
        }
    }

    fn merge(mut self, other: Accum) -> Accum {
        self.total += other.total;
        self.legitimate += other.legitimate;
        self.wins += other.wins;
        self.draws += other.draws;
        self.losses += other.losses;
        for (k, v) in other.per_question {
            let t = self.per_question.entry(k).or_default();
            t.wins += v.wins;
            t.draws += v.draws;
            t.losses += v.losses;
        }
        self.transcript.extend(other.transcript);
        self
    }
}

/// Run the protocol and return post-selected statistics (and the transcript
/// when requested). Deterministic given the seed.
pub fn run_rounds(
    game: &Game,
    exec: &PlayerExecutor<'_>,
    opts: &RunOptions,
) -> Result<(TrialStatistics, Vec<TranscriptRow>)> {
    if opts.rounds == 0 {
        return Err(Error::input("at least one round is required"));
    }
    if let PlayerExecutor::NoisyQuantum {
        strategy,
        noise: Some(_),
        ..
    } = exec
    {
        // fail early if the noise model is undefined for this strategy
        bit_widths(game, strategy)?;
    }
    let questions = game.legitimate_questions(opts.cap)?;
    let accum = (0..opts.rounds)
        .into_par_iter()
        .map(|round| -> Result<Accum> {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(round.wrapping_add(1));
            let mut acc = Accum::new();
            // shared randomness is agreed before the question is drawn
            let shared_pick = rng.gen::<f64>();
            let q = sample_question(game, opts.mode, &questions, &mut rng);
            let answer = answer_for(game, exec, &q, shared_pick, &mut rng)?;
            let outcome = game.is_winning(&q, &answer)?;
            acc.total = 1;
            match outcome {
                RoundOutcome::NoPromise => {}
                other => {
                    acc.legitimate = 1;
                    let tally = acc.per_question.entry(game.question_label(&q)).or_default();
                    match other {
                        RoundOutcome::Win => {
                            acc.wins = 1;
                            tally.wins = 1;
                        }
                        RoundOutcome::Draw => {
                            acc.draws = 1;
                            tally.draws = 1;
                        }
                        RoundOutcome::Lose => {
                            acc.losses = 1;
                            tally.losses = 1;
                        }
                        RoundOutcome::NoPromise => unreachable!(),
                    }
                }
            }
            if opts.transcript {
                acc.transcript.push(TranscriptRow {
                    round,
                    question: game.question_label(&q),
                    answer: game.answer_label(&answer),
                    outcome: outcome.to_string(),
                });
            }
            Ok(acc)
        })
        .try_reduce(Accum::new, |a, b| Ok(a.merge(b)))?;

    let mut transcript = accum.transcript;
    transcript.sort_by_key(|r| r.round);
    Ok((
        TrialStatistics {
            game: game.name().to_string(),
            seed: opts.seed,
            question_mode: opts.mode,
            rounds_total: accum.total,
            rounds_legitimate: accum.legitimate,
            wins: accum.wins,
            draws: accum.draws,
            losses: accum.losses,
            per_question: accum.per_question,
            pvalue_bound: None,
        },
        transcript,
    ))
}

/// #P divided by the size of the full input product.
pub fn legitimate_density(game: &Game, cap: u64) -> Result<num_rational::BigRational> {
    let questions = game.legitimate_questions(cap)?;
    Ok(num_rational::BigRational::new(
        num_bigint::BigInt::from(questions.len() as u64),
        num_bigint::BigInt::from(game.full_product_size()),
    ))
}

/// Verdict of a run against the classical bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Zero losses and a win rate beyond the best classical proportion.
    QuantumConsistent,
    /// Nothing here exceeds what a classical process could produce.
    ClassicalPossible,
    /// No post-selected rounds to judge.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub rounds_total: u64,
    pub rounds_legitimate: u64,
    pub win_rate: f64,
    pub draw_rate: f64,
    pub loss_rate: f64,
    pub omega_tilde: Option<RationalRepr>,
    pub pvalue_bound: Option<RationalRepr>,
    pub verdict: Verdict,
    pub assumption: String,
}

/// Attach the classical p-value bound and render rates and a verdict.
///
/// The p-value uses the uniform-question bound applied to the post-selected
/// subsequence and assumes memoryless rounds; the assumption is stated in the
/// report text.
pub fn summarize(
    stats: &mut TrialStatistics,
    bounds: Option<&ClassicalBounds>,
) -> Result<Summary> {
    let legit = stats.rounds_legitimate;
    let assumption = "p-value bound assumes questions uniform over the promise and \
                      independent, memoryless rounds; it is applied to the post-selected \
                      subsequence"
        .to_string();
    if legit == 0 {
        return Ok(Summary {
            rounds_total: stats.rounds_total,
            rounds_legitimate: 0,
            win_rate: 0.0,
            draw_rate: 0.0,
            loss_rate: 0.0,
            omega_tilde: bounds.map(|b| RationalRepr::from(&b.omega_tilde)),
            pvalue_bound: None,
            verdict: Verdict::Inconclusive,
            assumption,
        });
    }
    let win_rate = stats.wins as f64 / legit as f64;
    let pvalue = match bounds {
        Some(b) => Some(classical_pvalue_bound(&b.omega_tilde, stats.wins, legit)?),
        None => None,
    };
    stats.pvalue_bound = pvalue.as_ref().map(rational_to_f64);
    let verdict = if stats.losses == 0 {
        match bounds {
            Some(b) => {
                if win_rate > rational_to_f64(&b.omega_tilde) {
                    Verdict::QuantumConsistent
                } else {
                    Verdict::ClassicalPossible
                }
            }
            None => Verdict::QuantumConsistent,
        }
    } else {
        Verdict::ClassicalPossible
    };
    Ok(Summary {
        rounds_total: stats.rounds_total,
        rounds_legitimate: legit,
        win_rate,
        draw_rate: stats.draws as f64 / legit as f64,
        loss_rate: stats.losses as f64 / legit as f64,
        omega_tilde: bounds.map(|b| RationalRepr::from(&b.omega_tilde)),
        pvalue_bound: pvalue.as_ref().map(RationalRepr::from),
        verdict,
        assumption,
    })
}

/// Transcript rows as CSV: round, question, answer, outcome.
pub fn transcript_csv(rows: &[TranscriptRow]) -> String {
    let mut out = String::from("round,question,answer,outcome\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.round,
            r.question.replace(',', ";"),
            r.answer.replace(',', ";"),
            r.outcome
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::optimal_success_proportion;
    use crate::catalog::mermin_ghz;
    use crate::game::GameBuilder;

    fn opts(rounds: u64, mode: QuestionMode, seed: u64) -> RunOptions {
        RunOptions {
            rounds,
            mode,
            seed,
            cap: 1 << 16,
            transcript: false,
        }
    }

    #[test]
    fn quantum_never_loses() {
        let (game, qs) = mermin_ghz();
        let (stats, _) = run_rounds(
            &game,
            &PlayerExecutor::Quantum(&qs),
            &opts(10_000, QuestionMode::UniformOverPromise, 7),
        )
        .unwrap();
        assert_eq!(stats.losses, 0);
        assert_eq!(stats.wins, stats.rounds_legitimate);
        assert_eq!(stats.rounds_legitimate, 10_000);
    }

    #[test]
    fn best_classical_hits_three_quarters() {
        let (game, _) = mermin_ghz();
        let bounds = optimal_success_proportion(&game, 1 << 20).unwrap();
        let (stats, _) = run_rounds(
            &game,
            &PlayerExecutor::Classical(&bounds.best_strategy),
            &opts(10_000, QuestionMode::UniformOverPromise, 13),
        )
        .unwrap();
        let expected = 7_500.0;
        let sigma = (10_000.0f64 * 0.75 * 0.25).sqrt();
        assert!(
            (stats.wins as f64 - expected).abs() <= 4.0 * sigma,
            "wins = {}",
            stats.wins
        );
    }

    #[test]
    fn all_bottom_strategy_only_draws() {
        let (game, _) = mermin_ghz();
        let tables = vec![vec![OutputSymbol::Bottom; 2]; 3];
        let s = DeterministicStrategy::new_error_free(tables);
        let (stats, _) = run_rounds(
            &game,
            &PlayerExecutor::Classical(&s),
            &opts(500, QuestionMode::UniformOverPromise, 3),
        )
        .unwrap();
        assert_eq!(stats.wins, 0);
        assert_eq!(stats.losses, 0);
        assert_eq!(stats.draws, stats.rounds_legitimate);
    }

    #[test]
    fn independent_product_density_matches() {
        let (game, qs) = mermin_ghz();
        let (stats, _) = run_rounds(
            &game,
            &PlayerExecutor::Quantum(&qs),
            &opts(10_000, QuestionMode::IndependentProduct, 21),
        )
        .unwrap();
        // density 1/2: 4 legitimate of 8 triples
        let expected = 5_000.0;
        let sigma = (10_000.0f64 * 0.5 * 0.5).sqrt();
        assert!((stats.rounds_legitimate as f64 - expected).abs() <= 4.0 * sigma);
        assert!(stats.rounds_total == 10_000);
        assert_eq!(stats.losses, 0);
    }

    #[test]
    fn replay_is_byte_identical() {
        let (game, qs) = mermin_ghz();
        let run = || {
            let (mut stats, _) = run_rounds(
                &game,
                &PlayerExecutor::Quantum(&qs),
                &RunOptions {
                    rounds: 2_000,
                    mode: QuestionMode::IndependentProduct,
                    seed: 99,
                    cap: 1 << 16,
                    transcript: true,
                },
            )
            .unwrap();
            let bounds = optimal_success_proportion(&game, 1 << 20).unwrap();
            summarize(&mut stats, Some(&bounds)).unwrap();
            serde_json::to_string(&stats).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn transcript_is_ordered_and_complete() {
        let (game, qs) = mermin_ghz();
        let (_, transcript) = run_rounds(
            &game,
            &PlayerExecutor::Quantum(&qs),
            &RunOptions {
                rounds: 50,
                mode: QuestionMode::UniformOverPromise,
                seed: 4,
                cap: 1 << 16,
                transcript: true,
            },
        )
        .unwrap();
        assert_eq!(transcript.len(), 50);
        assert!(transcript.windows(2).all(|w| w[0].round < w[1].round));
        let csv = transcript_csv(&transcript);
        assert!(csv.starts_with("round,question,answer,outcome\n"));
        assert_eq!(csv.lines().count(), 51);
    }

    #[test]
    fn summary_verdicts() {
        let (game, qs) = mermin_ghz();
        let bounds = optimal_success_proportion(&game, 1 << 20).unwrap();
        // 20 quantum wins: p-value (3/4)^20 ≈ 3.17e-3
        let (mut stats, _) = run_rounds(
            &game,
            &PlayerExecutor::Quantum(&qs),
            &opts(20, QuestionMode::UniformOverPromise, 8),
        )
        .unwrap();
        let summary = summarize(&mut stats, Some(&bounds)).unwrap();
        assert_eq!(summary.verdict, Verdict::QuantumConsistent);
        let p = stats.pvalue_bound.unwrap();
        assert!((p - 0.75f64.powi(20)).abs() < 1e-12);

        // 15/20 wins sits exactly at ω̃: classical-possible
        let mut fixed = TrialStatistics {
            game: "ghz".into(),
            seed: 0,
            question_mode: QuestionMode::UniformOverPromise,
            rounds_total: 20,
            rounds_legitimate: 20,
            wins: 15,
            draws: 0,
            losses: 5,
            per_question: BTreeMap::new(),
            pvalue_bound: None,
        };
        let summary = summarize(&mut fixed, Some(&bounds)).unwrap();
        assert_eq!(summary.verdict, Verdict::ClassicalPossible);

        // no legitimate rounds: inconclusive
        let mut empty = TrialStatistics {
            rounds_total: 5,
            rounds_legitimate: 0,
            wins: 0,
            draws: 0,
            losses: 0,
            ..fixed.clone()
        };
        let summary = summarize(&mut empty, Some(&bounds)).unwrap();
        assert_eq!(summary.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn mixed_executor_uses_shared_randomness() {
        // a half/half mixture of two constant strategies on an always-win
        // relation: both strategies appear
        let game = GameBuilder::new(
            "two-constants",
            vec![2, 2],
            vec![2, 2],
            |_| true,
            |_, a| a[0] == a[1],
            vec![0, 0],
        )
        .build()
        .unwrap();
        let s0 = DeterministicStrategy::from_value_tables(vec![vec![0, 0], vec![0, 0]]);
        let s1 = DeterministicStrategy::from_value_tables(vec![vec![1, 1], vec![0, 0]]);
        let mixture = vec![(0.5, s0), (0.5, s1)];
        let (stats, _) = run_rounds(
            &game,
            &PlayerExecutor::ClassicalMixed(&mixture),
            &opts(2_000, QuestionMode::UniformOverPromise, 17),
        )
        .unwrap();
        // s0 always wins (0 == 0), s1 always loses (1 != 0)
        let sigma = (2_000.0f64 * 0.25).sqrt();
        assert!((stats.wins as f64 - 1_000.0).abs() <= 4.0 * sigma);
        assert!((stats.losses as f64 - 1_000.0).abs() <= 4.0 * sigma);
    }

    #[test]
    fn noisy_executor_matches_analytic_rates() {
        // Monte Carlo under p = 0.9 agrees with the exact flip-pattern value
        let (game, qs) = mermin_ghz();
        let exec = PlayerExecutor::NoisyQuantum {
            strategy: &qs,
            noise: Some(NoiseParams::new(0.9).unwrap()),
            efficiency: None,
        };
        let n = 100_000u64;
        let (stats, _) = run_rounds(&game, &exec, &opts(n, QuestionMode::UniformOverPromise, 31))
            .unwrap();
        let expected = 0.756 * n as f64;
        let sigma = (n as f64 * 0.756 * (1.0 - 0.756)).sqrt();
        assert!(
            (stats.wins as f64 - expected).abs() <= 4.0 * sigma,
            "wins = {}",
            stats.wins
        );
        assert_eq!(stats.draws, 0);
    }

    #[test]
    fn inefficient_executor_matches_analytic_rates_and_never_loses() {
        let (game, qs) = mermin_ghz();
        let exec = PlayerExecutor::NoisyQuantum {
            strategy: &qs,
            noise: None,
            efficiency: Some(EfficiencyParams::new(0.9).unwrap()),
        };
        let n = 100_000u64;
        let (stats, _) = run_rounds(&game, &exec, &opts(n, QuestionMode::UniformOverPromise, 37))
            .unwrap();
        assert_eq!(stats.losses, 0);
        let expected = 0.729 * n as f64;
        let sigma = (n as f64 * 0.729 * (1.0 - 0.729)).sqrt();
        assert!(
            (stats.wins as f64 - expected).abs() <= 4.0 * sigma,
            "wins = {}",
            stats.wins
        );
    }

    #[test]
    fn noise_on_unsupported_strategy_fails_fast() {
        let (game, qs) = crate::catalog::build_matching_game(4).unwrap();
        let exec = PlayerExecutor::NoisyQuantum {
            strategy: &qs,
            noise: Some(NoiseParams::new(0.9).unwrap()),
            efficiency: None,
        };
        assert!(run_rounds(&game, &exec, &opts(10, QuestionMode::UniformOverPromise, 1)).is_err());
    }

    #[test]
    fn zero_rounds_rejected() {
        let (game, qs) = mermin_ghz();
        assert!(run_rounds(
            &game,
            &PlayerExecutor::Quantum(&qs),
            &opts(0, QuestionMode::UniformOverPromise, 1)
        )
        .is_err());
    }

    #[test]
    fn density_examples() {
        let (ghz, _) = mermin_ghz();
        let d = legitimate_density(&ghz, 1 << 16).unwrap();
        assert_eq!(
            d,
            num_rational::BigRational::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(2))
        );
        let (magic, _) = crate::catalog::build_magic_square_game().unwrap();
        assert_eq!(
            legitimate_density(&magic, 1 << 16).unwrap(),
            num_rational::BigRational::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(1))
        );
        let (matching, _) = crate::catalog::build_matching_game(4).unwrap();
        assert_eq!(
            legitimate_density(&matching, 1 << 16).unwrap(),
            num_rational::BigRational::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(1))
        );
    }
}
