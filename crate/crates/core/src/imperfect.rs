//! Noisy and inefficient detector models for quantum strategies, and the
//! thresholds p* and η* they induce.
//!
//! Noise: each bit-valued detector reports the wrong bit independently with
//! probability 1−p. The model applies to raw measured bits (outputs are then
//! re-derived by the strategy's classical post-processing), and is defined
//! only for strategies whose every measurement is a computational measurement
//! of qubits. Compensating flip pairs ("two wrongs make a right") are counted
//! exactly by the flip-pattern sum.
//!
//! Inefficiency: each detector independently fails to fire with probability
//! 1−η; a player with a failed detector outputs ⊥ and the round is a draw.
//! This model needs no bit structure and covers every catalog strategy.
//!
//! Crossover definitions, recorded in every result: p* solves
//! worst-case noisy quantum success = ω(G) (classical players' detectors are
//! assumed perfect); η* solves quantum win rate = best error-free classical
//! win rate.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, lp, rational_to_f64, ProfileSpace};
use crate::catalog::{MeasurementShape, QuantumStrategy};
use crate::error::{Error, Result};
use crate::game::{Game, Symbol};

pub const BISECT_TOL: f64 = 1e-9;
pub const BISECT_MAX_ITER: usize = 60;
const MONOTONE_SAMPLES: usize = 32;
const MAX_FLIP_BITS: usize = 24;

/// Per-detector probability of a correct result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseParams {
    pub p: f64,
}

impl NoiseParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input("detector correctness p must lie in [0, 1]"));
        }
        Ok(NoiseParams { p })
    }
}

/// Per-detector firing probability; a silent detector yields ⊥.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyParams {
    pub eta: f64,
}

impl EfficiencyParams {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::input("detector efficiency η must lie in [0, 1]"));
        }
        Ok(EfficiencyParams { eta })
    }
}

/// A solved threshold with its final bisection bracket.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub crossover_definition: String,
}

/// Threshold computations either locate a crossover or report why none
/// exists in the search interval.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ThresholdOutcome {
    Crossover(ThresholdResult),
    NoCrossover { reason: String },
}

impl ThresholdOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            ThresholdOutcome::Crossover(r) => Some(r.value),
            ThresholdOutcome::NoCrossover { .. } => None,
        }
    }
}

/// Total number of detectors used per round, independent of inputs.
pub fn total_detectors(game: &Game, qs: &QuantumStrategy) -> Result<usize> {
    let mut total = 0usize;
    for player in 0..game.n_players() {
        let mut per_player: Option<usize> = None;
        for input in 0..game.input_sizes()[player] {
            let count: usize = qs
                .measurement_shapes(player, input)
                .iter()
                .map(MeasurementShape::detector_count)
                .sum();
            match per_player {
                None => per_player = Some(count),
                Some(c) if c == count => {}
                Some(c) => {
                    return Err(Error::UnsupportedModel(format!(
                        "player {player} uses {count} detectors on some inputs and {c} on others"
                    )));
                }
            }
        }
        total += per_player.unwrap_or(0);
    }
    Ok(total)
}

/// Bit widths of each measurement entry for the noise model, or an
/// unsupported-model error when outcomes are not bit strings.
pub(crate) fn bit_widths(game: &Game, qs: &QuantumStrategy) -> Result<Vec<Vec<usize>>> {
    let mut widths: Vec<Vec<usize>> = Vec::with_capacity(game.n_players());
    for player in 0..game.n_players() {
        let mut per_player: Option<Vec<usize>> = None;
        for input in 0..game.input_sizes()[player] {
            let mut w = Vec::new();
            for shape in qs.measurement_shapes(player, input) {
                match shape {
                    MeasurementShape::Computational { qudit_dims }
                        if qudit_dims.iter().all(|&d| d == 2) =>
                    {
                        w.push(qudit_dims.len());
                    }
                    MeasurementShape::Computational { qudit_dims } => {
                        return Err(Error::UnsupportedModel(format!(
                            "player {player} measures a register of dimensions {qudit_dims:?}; \
                             bit-flip noise is defined for qubit detectors only"
                        )));
                    }
                    MeasurementShape::Subspace { .. } => {
                        return Err(Error::UnsupportedModel(format!(
                            "player {player} performs a subspace measurement whose outcome is \
                             not a bit string; bit-flip noise is undefined for it"
                        )));
                    }
                }
            }
            match &per_player {
                None => per_player = Some(w),
                Some(prev) if *prev == w => {}
                Some(_) => {
                    return Err(Error::UnsupportedModel(format!(
                        "player {player} has input-dependent measurement structure"
                    )));
                }
            }
        }
        widths.push(per_player.unwrap_or_default());
    }
    Ok(widths)
}

/// Exact flip-pattern statistics: per legitimate question, coefficients c_w
/// so that the success probability under noise is
/// Σ_w c_w · p^(B−w) · (1−p)^w, with B the total bit-detector count.
#[derive(Debug)]
pub struct NoiseModel {
    total_bits: usize,
    per_question: Vec<Vec<f64>>,
}

impl NoiseModel {
    pub fn total_bits(&self) -> usize {
        self.total_bits
    }

    /// Worst-case (over legitimate questions) success probability at p.
    pub fn worst_case_success(&self, p: f64) -> f64 {
        let b = self.total_bits;
        self.per_question
            .iter()
            .map(|coeffs| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(w, c)| c * p.powi((b - w) as i32) * (1.0 - p).powi(w as i32))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Build the exact noise statistics for a game/strategy pair.
pub fn build_noise_model(game: &Game, qs: &QuantumStrategy, cap: u64) -> Result<NoiseModel> {
    let widths = bit_widths(game, qs)?;
    let total_bits: usize = widths.iter().flatten().sum();
    if total_bits > MAX_FLIP_BITS {
        return Err(Error::capacity(
            "flip-pattern enumeration bits",
            1u128 << total_bits,
            1u128 << MAX_FLIP_BITS,
        ));
    }
    let questions = game.legitimate_questions(cap)?;
    let per_question: Vec<Vec<f64>> = questions
        .par_iter()
        .map(|q| -> Result<Vec<f64>> {
            let dist = qs.raw_distribution(q)?;
            let mut coeffs = vec![0.0; total_bits + 1];
            let mut flipped = Vec::new();
            let mut answer: Vec<Symbol> = vec![0; game.n_players()];
            for (records, prob) in &dist {
                for mask in 0u64..(1u64 << total_bits) {
                    flipped.clone_from(records);
                    let mut offset = 0usize;
                    for (player, entry_widths) in widths.iter().enumerate() {
                        for (entry, &w) in entry_widths.iter().enumerate() {
                            let sub = ((mask >> offset) & ((1 << w) - 1)) as usize;
                            flipped[player][entry] ^= sub;
                            offset += w;
                        }
                    }
                    for (player, rec) in flipped.iter().enumerate() {
                        answer[player] = qs.postprocess(player, q.entries()[player], rec);
                    }
                    if game.winning_raw(q.entries(), &answer) {
                        coeffs[mask.count_ones() as usize] += prob;
                    }
                }
            }
            Ok(coeffs)
        })
        .collect::<Result<_>>()?;
    Ok(NoiseModel {
        total_bits,
        per_question,
    })
}

/// Worst-case success of the noisy implementation at detector correctness p.
pub fn noisy_quantum_success(
    game: &Game,
    qs: &QuantumStrategy,
    noise: NoiseParams,
    cap: u64,
) -> Result<f64> {
    Ok(build_noise_model(game, qs, cap)?.worst_case_success(noise.p))
}

/// Win and draw probabilities of the inefficient implementation, worst case
/// over legitimate questions. All detectors must fire for a win; any failure
/// yields ⊥ and a draw; the strategy never loses when its ideal answers are
/// always appropriate.
pub fn inefficient_quantum_outcomes(
    game: &Game,
    qs: &QuantumStrategy,
    eff: EfficiencyParams,
    cap: u64,
) -> Result<(f64, f64)> {
    let d = total_detectors(game, qs)?;
    let all_fire = eff.eta.powi(d as i32);
    let questions = game.legitimate_questions(cap)?;
    let mut worst_ideal_win: f64 = 1.0;
    for q in &questions {
        worst_ideal_win = worst_ideal_win.min(1.0 - qs.losing_probability(game, q)?);
    }
    Ok((all_fire * worst_ideal_win, 1.0 - all_fire))
}

/// Value and column statistics of the best never-losing classical strategy.
#[derive(Debug, Clone)]
pub struct ErrorFreeValue {
    /// Worst-case win (non-draw) probability of the best error-free mixture.
    pub value: BigRational,
    pub strategy_space_size: u128,
    pub surviving_columns: usize,
}

/// LP over mixtures of ⊥-allowed deterministic profiles that never lose on
/// any legitimate question, maximizing the minimum win probability.
pub fn optimal_errorfree_classical(game: &Game, cap: u64) -> Result<ErrorFreeValue> {
    let space = ProfileSpace::new(game, true);
    if space.size() > cap as u128 {
        return Err(Error::capacity(
            format!("error-free strategy space for {}", game.name()),
            space.size(),
            cap as u128,
        ));
    }
    let questions = game.legitimate_questions(cap)?;
    let qslots = analysis::question_slots(&space, &questions);
    let qentries: Vec<&[Symbol]> = questions.iter().map(|q| q.entries()).collect();
    let mut columns: std::collections::HashSet<lp::WinVector> = std::collections::HashSet::new();
    let mut slots = vec![0usize; space.n_slots()];
    let mut answer = vec![0usize; game.n_players()];
    'profiles: for index in 0..space.size() as u64 {
        space.decode(index, &mut slots);
        let mut v = lp::WinVector::zeros(questions.len());
        for (qi, (slot_ids, entries)) in qslots.iter().zip(&qentries).enumerate() {
            let mut has_bottom = false;
            for (player, (a, &sid)) in answer.iter_mut().zip(slot_ids.iter()).enumerate() {
                *a = slots[sid];
                if space.is_bottom(player, *a) {
                    has_bottom = true;
                }
            }
            if has_bottom {
                continue; // draw: neither win nor loss
            }
            if game.winning_raw(entries, &answer) {
                v.set(qi);
            } else {
                continue 'profiles; // loses somewhere: not error-free
            }
        }
        columns.insert(v);
    }
    let columns: Vec<lp::WinVector> = columns.into_iter().collect();
    let value = lp::game_value(&columns, questions.len(), true);
    Ok(ErrorFreeValue {
        value,
        strategy_space_size: space.size(),
        surviving_columns: columns.len(),
    })
}

fn assert_monotone(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, what: &str) -> Result<()> {
    let mut prev = f(lo);
    for i in 1..=MONOTONE_SAMPLES {
        let x = lo + (hi - lo) * i as f64 / MONOTONE_SAMPLES as f64;
        let y = f(x);
        if y < prev - 1e-9 {
            return Err(Error::validation(format!(
                "{what} is not monotone on [{lo}, {hi}]: f({x}) = {y} < {prev}"
            )));
        }
        prev = y;
    }
    Ok(())
}

/// Bisection for g(x) = 0 with g monotone nondecreasing, g(lo) ≤ 0 ≤ g(hi).
fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, (f64, f64)) {
    for _ in 0..BISECT_MAX_ITER {
        if hi - lo <= BISECT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), (lo, hi))
}

/// p*(G): the detector correctness at which the noisy quantum implementation
/// stops beating the best classical strategy.
pub fn noise_threshold(
    game: &Game,
    qs: &QuantumStrategy,
    omega: &BigRational,
    cap: u64,
) -> Result<ThresholdOutcome> {
    let model = build_noise_model(game, qs, cap)?;
    let success = |p: f64| model.worst_case_success(p);
    assert_monotone(&success, 0.5, 1.0, "noisy quantum success")?;
    let target = rational_to_f64(omega);
    if success(0.5) > target {
        return Ok(ThresholdOutcome::NoCrossover {
            reason: format!(
                "noisy quantum success {} already exceeds ω = {target} at p = 1/2",
                success(0.5)
            ),
        });
    }
    if success(1.0) < target {
        return Ok(ThresholdOutcome::NoCrossover {
            reason: format!(
                "quantum success never reaches ω = {target} even with perfect detectors"
            ),
        });
    }
    let g = |p: f64| success(p) - target;
    let (value, bracket) = bisect(&g, 0.5, 1.0);
    Ok(ThresholdOutcome::Crossover(ThresholdResult {
        value,
        bracket,
        crossover_definition:
            "p with worst-case noisy quantum success = ω(G); classical players' detectors assumed perfect"
                .to_string(),
    }))
}

/// η*(G): the detector efficiency at which the quantum win rate drops to the
/// best error-free classical win rate.
pub fn efficiency_threshold(
    game: &Game,
    qs: &QuantumStrategy,
    errorfree_value: &BigRational,
    cap: u64,
) -> Result<ThresholdOutcome> {
    let d = total_detectors(game, qs)?;
    let questions = game.legitimate_questions(cap)?;
    let mut worst_ideal_win: f64 = 1.0;
    for q in &questions {
        worst_ideal_win = worst_ideal_win.min(1.0 - qs.losing_probability(game, q)?);
    }
    let win = move |eta: f64| eta.powi(d as i32) * worst_ideal_win;
    assert_monotone(&win, 0.0, 1.0, "inefficient quantum win rate")?;
    let target = rational_to_f64(errorfree_value);
    if win(1.0) < target {
        return Ok(ThresholdOutcome::NoCrossover {
            reason: format!(
                "quantum win rate never reaches the error-free classical value {target}"
            ),
        });
    }
    let g = |eta: f64| win(eta) - target;
    let (value, bracket) = bisect(&g, 0.0, 1.0);
    Ok(ThresholdOutcome::Crossover(ThresholdResult {
        value,
        bracket,
        crossover_definition: format!(
            "η with quantum win rate η^{d}·(worst-case ideal win) = best error-free classical win rate"
        ),
    }))
}

/// One row of the plot-ready imperfection sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub game: String,
    pub param_name: String,
    pub param_value: f64,
    pub quantum_win: f64,
    pub quantum_draw: f64,
    pub classical_bound: f64,
}

/// Which detector imperfection a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    NoiseP,
    EfficiencyEta,
}

pub fn sweep(
    game: &Game,
    qs: &QuantumStrategy,
    param: SweepParam,
    from: f64,
    to: f64,
    step: f64,
    classical_bound: &BigRational,
    cap: u64,
) -> Result<Vec<SweepRow>> {
    if step <= 0.0 || to < from {
        return Err(Error::input("sweep needs step > 0 and to ≥ from"));
    }
    let bound = rational_to_f64(classical_bound);
    let noise_model = match param {
        SweepParam::NoiseP => Some(build_noise_model(game, qs, cap)?),
        SweepParam::EfficiencyEta => None,
    };
    let mut rows = Vec::new();
    let mut k = 0usize;
    loop {
        let value = from + step * k as f64;
        if value > to + step * 1e-9 {
            break;
        }
        let (name, win, draw) = match param {
            SweepParam::NoiseP => {
                let model = noise_model.as_ref().expect("built above");
                ("p", model.worst_case_success(value.min(1.0)), 0.0)
            }
            SweepParam::EfficiencyEta => {
                let (w, dr) = inefficient_quantum_outcomes(
                    game,
                    qs,
                    EfficiencyParams::new(value.min(1.0))?,
                    cap,
                )?;
                ("eta", w, dr)
            }
        };
        rows.push(SweepRow {
            game: game.name().to_string(),
            param_name: name.to_string(),
            param_value: value,
            quantum_win: win,
            quantum_draw: draw,
            classical_bound: bound,
        });
        k += 1;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_boyer_game, build_matching_game, build_parity_game, mermin_ghz};
    use num_traits::One;
    use num_bigint::BigInt;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parity_noise_matches_closed_form() {
        // the flip-pattern sum is the oracle; (1+(2p−1)^n)/2 is the check
        for n in [3usize, 4, 5] {
            let (game, qs) = build_parity_game(n, 1).unwrap();
            let model = build_noise_model(&game, &qs, 1 << 16).unwrap();
            assert_eq!(model.total_bits(), n);
            for k in 0..=10 {
                let p = 0.5 + 0.05 * k as f64;
                let closed = (1.0 + (2.0 * p - 1.0).powi(n as i32)) / 2.0;
                assert!(
                    (model.worst_case_success(p) - closed).abs() < 1e-12,
                    "n={n} p={p}"
                );
            }
        }
    }

    #[test]
    fn parity_noise_examples() {
        let (game, qs) = mermin_ghz();
        let s = |p: f64| {
            noisy_quantum_success(&game, &qs, NoiseParams::new(p).unwrap(), 1 << 16).unwrap()
        };
        assert!((s(1.0) - 1.0).abs() < 1e-12);
        assert!((s(0.9) - 0.756).abs() < 1e-12);
        assert!((s(0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn parity_inefficiency_examples() {
        let (game, qs) = mermin_ghz();
        let out = |eta: f64| {
            inefficient_quantum_outcomes(&game, &qs, EfficiencyParams::new(eta).unwrap(), 1 << 16)
                .unwrap()
        };
        let (w, d) = out(1.0);
        assert!((w - 1.0).abs() < 1e-12 && d.abs() < 1e-12);
        let (w, d) = out(0.9);
        assert!((w - 0.729).abs() < 1e-12 && (d - 0.271).abs() < 1e-12);
        let (w, d) = out(0.0);
        assert!(w.abs() < 1e-12 && (d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inefficiency_closed_form_matches_failure_pattern_sum() {
        // independent oracle: sum over detector-failure subsets
        let (game, qs) = mermin_ghz();
        let d = total_detectors(&game, &qs).unwrap();
        assert_eq!(d, 3);
        for eta in [0.3f64, 0.7, 0.95] {
            let mut win = 0.0;
            for mask in 0u32..(1 << d) {
                let failures = mask.count_ones() as i32;
                let prob = eta.powi(d as i32 - failures) * (1.0f64 - eta).powi(failures);
                if failures == 0 {
                    win += prob; // ideal answers are always appropriate
                }
            }
            let (w, dr) =
                inefficient_quantum_outcomes(&game, &qs, EfficiencyParams::new(eta).unwrap(), 100)
                    .unwrap();
            assert!((w - win).abs() < 1e-12);
            assert!((w + dr - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn errorfree_values_for_parity() {
        for (n, num, den) in [(3usize, 1i64, 2i64), (4, 1, 4), (5, 1, 8)] {
            let (game, _) = build_parity_game(n, 1).unwrap();
            let ef = optimal_errorfree_classical(&game, 1 << 20).unwrap();
            assert_eq!(ef.value, ratio(num, den), "n = {n}");
        }
    }

    #[test]
    fn errorfree_value_is_one_when_a_winning_strategy_exists() {
        let (game, _) = build_matching_game(2).unwrap();
        let ef = optimal_errorfree_classical(&game, 1 << 20).unwrap();
        assert_eq!(ef.value, BigRational::one());
    }

    #[test]
    fn noise_thresholds_match_the_closed_forms() {
        // odd n: 1/2 + 2^((1−3n)/(2n)); even n: 1/2 + 2^((2−3n)/(2n))
        for n in [3usize, 4, 5] {
            let (game, qs) = build_parity_game(n, 1).unwrap();
            let omega = crate::analysis::optimal_success_probability(&game, 1 << 20)
                .unwrap()
                .omega
                .unwrap();
            let expected = if n % 2 == 1 {
                0.5 + 2f64.powf((1.0 - 3.0 * n as f64) / (2.0 * n as f64))
            } else {
                0.5 + 2f64.powf((2.0 - 3.0 * n as f64) / (2.0 * n as f64))
            };
            match noise_threshold(&game, &qs, &omega, 1 << 16).unwrap() {
                ThresholdOutcome::Crossover(r) => {
                    assert!((r.value - expected).abs() < 1e-6, "n = {n}: {}", r.value);
                    assert!(r.bracket.1 - r.bracket.0 <= 1e-9);
                }
                other => panic!("expected crossover, got {other:?}"),
            }
        }
    }

    #[test]
    fn efficiency_thresholds_match_the_closed_form() {
        // η*(G_n) = (1/2)·4^(1/n)
        for n in [3usize, 5] {
            let (game, qs) = build_parity_game(n, 1).unwrap();
            let ef = optimal_errorfree_classical(&game, 1 << 20).unwrap();
            let expected = 0.5 * 4f64.powf(1.0 / n as f64);
            match efficiency_threshold(&game, &qs, &ef.value, 1 << 16).unwrap() {
                ThresholdOutcome::Crossover(r) => {
                    assert!((r.value - expected).abs() < 1e-6, "n = {n}: {}", r.value);
                }
                other => panic!("expected crossover, got {other:?}"),
            }
        }
    }

    #[test]
    fn noise_unsupported_for_non_bit_outcomes() {
        let (game, qs) = build_matching_game(4).unwrap();
        match build_noise_model(&game, &qs, 1 << 16) {
            Err(Error::UnsupportedModel(msg)) => assert!(msg.contains("subspace")),
            other => panic!("expected unsupported-model error, got {other:?}"),
        }
        let (game, qs) = build_boyer_game(3, 4).unwrap();
        assert!(matches!(
            build_noise_model(&game, &qs, 1 << 16),
            Err(Error::UnsupportedModel(_))
        ));
        // modulo-2 outputs are single bits: supported
        let (game, qs) = build_boyer_game(3, 2).unwrap();
        assert!(build_noise_model(&game, &qs, 1 << 16).is_ok());
    }

    #[test]
    fn efficiency_supported_for_all_catalog_shapes() {
        let (game, qs) = build_matching_game(4).unwrap();
        // Alice 2 bits; Bob 1 subspace click + 2 bits
        assert_eq!(total_detectors(&game, &qs).unwrap(), 5);
        let (w, d) =
            inefficient_quantum_outcomes(&game, &qs, EfficiencyParams::new(0.9).unwrap(), 1 << 16)
                .unwrap();
        assert!((w - 0.9f64.powi(5)).abs() < 1e-9);
        assert!((w + d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_detectors_recover_certainty() {
        // noisy success at p = 1 is 1 on every noise-supported catalog game
        let supported: Vec<(crate::game::Game, crate::catalog::QuantumStrategy)> = vec![
            mermin_ghz(),
            build_parity_game(5, 1).unwrap(),
            crate::catalog::build_dj_game(1).unwrap(),
            crate::catalog::build_dj_game(2).unwrap(),
            crate::catalog::build_magic_square_game().unwrap(),
            build_boyer_game(3, 2).unwrap(),
        ];
        for (game, qs) in &supported {
            let s = noisy_quantum_success(game, qs, NoiseParams::new(1.0).unwrap(), 1 << 16)
                .unwrap();
            assert!((s - 1.0).abs() < 1e-9, "{}", game.name());
        }
    }

    #[test]
    fn extended_parity_efficiency_bound_where_cap_allows() {
        // n=4 has ℓ=1: the error-free LP fits and η* respects the 8/n bound
        let n = 4usize;
        let (game, qs) = build_parity_game(n, crate::catalog::extended_parity_ell(n)).unwrap();
        let ef = optimal_errorfree_classical(&game, 1 << 20).unwrap();
        match efficiency_threshold(&game, &qs, &ef.value, 1 << 16).unwrap() {
            ThresholdOutcome::Crossover(r) => assert!(r.value <= 8.0 / n as f64),
            other => panic!("expected crossover, got {other:?}"),
        }
        // n=5 has ℓ=2: 3^20 ⊥-allowed tables exceed the cap and the value is
        // recorded as out of cap rather than approximated
        let (game, _) = build_parity_game(5, crate::catalog::extended_parity_ell(5)).unwrap();
        match optimal_errorfree_classical(&game, 1 << 20) {
            Err(Error::Capacity { required, .. }) => {
                assert_eq!(required, 3u128.pow(20));
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn sweep_row_count_and_shape() {
        let (game, qs) = mermin_ghz();
        let omega = ratio(3, 4);
        let rows = sweep(
            &game,
            &qs,
            SweepParam::NoiseP,
            0.5,
            1.0,
            0.05,
            &omega,
            1 << 16,
        )
        .unwrap();
        assert_eq!(rows.len(), 11);
        assert!((rows[0].param_value - 0.5).abs() < 1e-12);
        assert!((rows[10].param_value - 1.0).abs() < 1e-12);
        assert!((rows[10].quantum_win - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(NoiseParams::new(1.5).is_err());
        assert!(EfficiencyParams::new(-0.1).is_err());
    }
}
