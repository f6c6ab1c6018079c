//! Exact classical bounds: the best deterministic success proportion ω̃ by
//! exhaustive enumeration, the best probabilistic worst-case success ω by
//! exact rational linear programming over mixtures of deterministic profiles,
//! framework theorems as runnable checks, and classical p-value bounds.

pub mod lp;

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{DeterministicStrategy, Game, OutputSymbol, Question, Symbol};
use lp::WinVector;

/// Joint deterministic profile space: one output slot per (player, input
/// symbol). Profile index 0 is the all-first-symbol strategy; earlier slots
/// are more significant, so index order is lexicographic over tables.
pub(crate) struct ProfileSpace {
    slot_radix: Vec<usize>,
    player_base: Vec<usize>,
    size: u128,
    bottom_allowed: bool,
    output_sizes: Vec<usize>,
}

impl ProfileSpace {
    pub fn new(game: &Game, bottom_allowed: bool) -> Self {
        let mut slot_radix = Vec::new();
        let mut player_base = Vec::new();
        for (i, &inputs) in game.input_sizes().iter().enumerate() {
            player_base.push(slot_radix.len());
            let radix = game.output_sizes()[i] + usize::from(bottom_allowed);
            slot_radix.extend(std::iter::repeat(radix).take(inputs));
        }
        let size = slot_radix
            .iter()
            .fold(1u128, |acc, &r| acc.saturating_mul(r as u128));
        ProfileSpace {
            slot_radix,
            player_base,
            size,
            bottom_allowed,
            output_sizes: game.output_sizes().to_vec(),
        }
    }

    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn n_slots(&self) -> usize {
        self.slot_radix.len()
    }

    /// Decode a profile index into slot values (last slot least significant).
    pub fn decode(&self, mut index: u64, slots: &mut [usize]) {
        for (slot, radix) in self
            .slot_radix
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &r)| (i, r as u64))
        {
            slots[slot] = (index % radix) as usize;
            index /= radix;
        }
    }

    /// Slot index of (player, input).
    pub fn slot(&self, player: usize, input: Symbol) -> usize {
        self.player_base[player] + input
    }

    /// Whether the slot value means ⊥.
    pub fn is_bottom(&self, player: usize, value: usize) -> bool {
        self.bottom_allowed && value == self.output_sizes[player]
    }

    pub fn strategy_from_index(&self, game: &Game, index: u64) -> DeterministicStrategy {
        let mut slots = vec![0usize; self.n_slots()];
        self.decode(index, &mut slots);
        let tables: Vec<Vec<OutputSymbol>> = game
            .input_sizes()
            .iter()
            .enumerate()
            .map(|(player, &inputs)| {
                (0..inputs)
                    .map(|x| {
                        let v = slots[self.slot(player, x)];
                        if self.is_bottom(player, v) {
                            OutputSymbol::Bottom
                        } else {
                            OutputSymbol::Value(v)
                        }
                    })
                    .collect()
            })
            .collect();
        if self.bottom_allowed {
            DeterministicStrategy::new_error_free(tables)
        } else {
            DeterministicStrategy::new(tables).expect("no ⊥ in a plain profile space")
        }
    }
}

/// Per-question slot lookups, precomputed once for the enumeration loops.
pub(crate) fn question_slots(space: &ProfileSpace, questions: &[Question]) -> Vec<Vec<usize>> {
    questions
        .iter()
        .map(|q| {
            q.entries()
                .iter()
                .enumerate()
                .map(|(player, &x)| space.slot(player, x))
                .collect()
        })
        .collect()
}

/// Number of joint deterministic profiles for the game: Π_i |A_i|^{|X_i|}.
pub fn profile_space_size(game: &Game) -> u128 {
    ProfileSpace::new(game, false).size()
}

/// How ω was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsMethod {
    Enumeration,
    EnumerationAndLp,
}

/// Exact classical bounds for one game.
#[derive(Debug, Clone)]
pub struct ClassicalBounds {
    pub game_name: String,
    pub params: BTreeMap<String, i64>,
    /// Maximum success proportion of deterministic strategies (exact).
    pub omega_tilde: BigRational,
    /// Maximum worst-case success probability of probabilistic strategies
    /// (exact, from the LP); `None` when only the enumeration ran.
    pub omega: Option<BigRational>,
    /// Lexicographically first deterministic strategy attaining ω̃.
    pub best_strategy: DeterministicStrategy,
    pub method: BoundsMethod,
    pub strategy_space_size: u128,
    pub n_questions: usize,
}

fn check_profile_cap(game: &Game, space: &ProfileSpace, cap: u64) -> Result<()> {
    if space.size() > cap as u128 {
        return Err(Error::capacity(
            format!("deterministic strategy space for {}", game.name()),
            space.size(),
            cap as u128,
        ));
    }
    Ok(())
}

/// ω̃(G): exhaustive maximum of the success proportion over all deterministic
/// profiles, with the lexicographically first maximizing witness.
pub fn optimal_success_proportion(game: &Game, cap: u64) -> Result<ClassicalBounds> {
    let space = ProfileSpace::new(game, false);
    check_profile_cap(game, &space, cap)?;
    let questions = game.legitimate_questions(cap)?;
    let qslots = question_slots(&space, &questions);
    let qentries: Vec<&[Symbol]> = questions.iter().map(|q| q.entries()).collect();
    let size = space.size() as u64;
    let n_players = game.n_players();

    let (best_wins, best_index) = (0..size)
        .into_par_iter()
        .fold(
            || (0u64, u64::MAX, vec![0usize; space.n_slots()], vec![0usize; n_players]),
            |(mut bw, mut bi, mut slots, mut answer), index| {
                space.decode(index, &mut slots);
                let mut wins = 0u64;
                for (slot_ids, entries) in qslots.iter().zip(&qentries) {
                    for (a, &sid) in answer.iter_mut().zip(slot_ids.iter()) {
                        *a = slots[sid];
                    }
                    if game.winning_raw(entries, &answer) {
                        wins += 1;
                    }
                }
                if wins > bw || (wins == bw && index < bi) {
                    bw = wins;
                    bi = index;
                }
                (bw, bi, slots, answer)
            },
        )
        .map(|(w, i, _, _)| (w, i))
        .reduce(
            || (0u64, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let omega_tilde = BigRational::new(BigInt::from(best_wins), BigInt::from(questions.len()));
    Ok(ClassicalBounds {
        game_name: game.name().to_string(),
        params: game.params().clone(),
        omega_tilde,
        omega: None,
        best_strategy: space.strategy_from_index(game, best_index),
        method: BoundsMethod::Enumeration,
        strategy_space_size: space.size(),
        n_questions: questions.len(),
    })
}

/// All distinct win vectors of the plain deterministic profile space.
pub(crate) fn distinct_win_vectors(game: &Game, cap: u64) -> Result<(Vec<WinVector>, usize)> {
    let space = ProfileSpace::new(game, false);
    check_profile_cap(game, &space, cap)?;
    let questions = game.legitimate_questions(cap)?;
    let qslots = question_slots(&space, &questions);
    let qentries: Vec<&[Symbol]> = questions.iter().map(|q| q.entries()).collect();
    let mut seen: HashSet<WinVector> = HashSet::new();
    let mut slots = vec![0usize; space.n_slots()];
    let mut answer = vec![0usize; game.n_players()];
    for index in 0..space.size() as u64 {
        space.decode(index, &mut slots);
        let mut v = WinVector::zeros(questions.len());
        for (qi, (slot_ids, entries)) in qslots.iter().zip(&qentries).enumerate() {
            for (a, &sid) in answer.iter_mut().zip(slot_ids.iter()) {
                *a = slots[sid];
            }
            if game.winning_raw(entries, &answer) {
                v.set(qi);
            }
        }
        seen.insert(v);
    }
    Ok((seen.into_iter().collect(), questions.len()))
}

/// ω(G): the zero-sum game value over mixtures of deterministic profiles,
/// solved exactly. Also carries ω̃ (the enumeration shares the work).
pub fn optimal_success_probability(game: &Game, cap: u64) -> Result<ClassicalBounds> {
    let mut bounds = optimal_success_proportion(game, cap)?;
    let (columns, n_questions) = distinct_win_vectors(game, cap)?;
    let omega = lp::game_value(&columns, n_questions, true);
    if omega > bounds.omega_tilde {
        return Err(Error::validation(format!(
            "ω = {omega} exceeds ω̃ = {}; this contradicts ω ≤ ω̃",
            bounds.omega_tilde
        )));
    }
    bounds.omega = Some(omega);
    bounds.method = BoundsMethod::EnumerationAndLp;
    Ok(bounds)
}

/// Exact rational rendered for the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl From<&BigRational> for RationalRepr {
    fn from(r: &BigRational) -> Self {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            approx: rational_to_f64(r),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Machine-readable bounds report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub game: String,
    pub params: BTreeMap<String, i64>,
    pub omega_tilde: RationalRepr,
    pub omega: Option<RationalRepr>,
    pub method: BoundsMethod,
    pub witness: Vec<Vec<String>>,
    pub strategy_space_size: String,
    pub n_questions: usize,
}

impl ClassicalBounds {
    pub fn report(&self, game: &Game) -> BoundsReport {
        let witness = self
            .best_strategy
            .tables()
            .iter()
            .enumerate()
            .map(|(player, table)| {
                table
                    .iter()
                    .map(|&s| game.output_label(player, s))
                    .collect()
            })
            .collect();
        BoundsReport {
            game: self.game_name.clone(),
            params: self.params.clone(),
            omega_tilde: RationalRepr::from(&self.omega_tilde),
            omega: self.omega.as_ref().map(RationalRepr::from),
            method: self.method,
            witness,
            strategy_space_size: self.strategy_space_size.to_string(),
            n_questions: self.n_questions,
        }
    }
}

/// Binomial tail P[Bin(rounds, ω̃) ≥ wins], exact.
///
/// This bounds the probability that any classical process wins at least
/// `wins` of `rounds` post-selected rounds, assuming questions are drawn
/// uniformly over the promise and rounds are independent; the memorylessness
/// assumption is stated in reports that embed this bound.
pub fn classical_pvalue_bound(
    omega_tilde: &BigRational,
    wins: u64,
    rounds: u64,
) -> Result<BigRational> {
    if wins > rounds {
        return Err(Error::input("wins cannot exceed rounds"));
    }
    if omega_tilde.is_negative() || omega_tilde > &BigRational::one() {
        return Err(Error::input("ω̃ must lie in [0, 1]"));
    }
    if rounds == 0 {
        return Ok(BigRational::one());
    }
    let a = omega_tilde.numer().clone();
    let d = omega_tilde.denom().clone();
    let b: BigInt = &d - &a;
    let n = rounds;
    // Σ_{k=wins}^{n} C(n,k) a^k b^(n-k) / d^n, accumulated from k = n down
    let mut binom = BigInt::one(); // C(n, n)
    let mut a_pow = a.pow(n as u32); // a^n
    let mut b_pow = BigInt::one(); // b^0
    let mut total = BigInt::zero();
    let mut k = n;
    loop {
        total += &binom * &a_pow * &b_pow;
        if k == wins {
            break;
        }
        // C(n, k-1) = C(n, k) · k / (n-k+1)
        binom = binom * BigInt::from(k) / BigInt::from(n - k + 1);
        if !a.is_zero() {
            a_pow /= &a;
        } else {
            a_pow = BigInt::zero();
        }
        b_pow *= &b;
        k -= 1;
        if a.is_zero() && k < n {
            // a^k = 0 for k ≥ 1; only the k=0 term can contribute
            if wins == 0 {
                total += b.pow(n as u32);
            }
            break;
        }
    }
    Ok(BigRational::new(total, d.pow(n as u32)))
}

/// One assertion of the framework-theorem suite.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub game: String,
    pub checks: Vec<TheoremCheck>,
}

impl TheoremReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run the framework theorems as checks on one game:
/// ω ≤ ω̃; if ω̃ < 1 then ω̃ ≤ (#P−1)/#P; and the uniform-question success of
/// sampled mixed strategies stays within 4σ above ω̃.
pub fn check_framework_theorems(
    game: &Game,
    cap: u64,
    rng: &mut impl rand::Rng,
    mixed_samples: usize,
    rounds_per_sample: usize,
) -> Result<TheoremReport> {
    let bounds = optimal_success_probability(game, cap)?;
    let omega = bounds.omega.clone().expect("LP ran");
    let mut checks = Vec::new();

    checks.push(TheoremCheck {
        name: "omega ≤ omega_tilde".to_string(),
        passed: omega <= bounds.omega_tilde,
        detail: format!("ω = {omega}, ω̃ = {}", bounds.omega_tilde),
    });

    if bounds.omega_tilde < BigRational::one() {
        let p = bounds.n_questions as i64;
        let lemma_bound = BigRational::new(BigInt::from(p - 1), BigInt::from(p));
        checks.push(TheoremCheck {
            name: "no winning strategy ⇒ omega_tilde ≤ (#P−1)/#P".to_string(),
            passed: bounds.omega_tilde <= lemma_bound,
            detail: format!("ω̃ = {}, (#P−1)/#P = {lemma_bound}", bounds.omega_tilde),
        });
    }

    let questions = game.legitimate_questions(cap)?;
    let space = ProfileSpace::new(game, false);
    let omega_tilde_f = rational_to_f64(&bounds.omega_tilde);
    let sigma = 0.5 / (rounds_per_sample as f64).sqrt();
    let mut worst_excess: f64 = f64::NEG_INFINITY;
    for _ in 0..mixed_samples {
        // shared randomness: a small random mixture over deterministic profiles
        let support = 1 + (rng.gen::<usize>() % 4);
        let profiles: Vec<DeterministicStrategy> = (0..support)
            .map(|_| space.strategy_from_index(game, rng.gen_range(0..space.size() as u64)))
            .collect();
        let weights: Vec<f64> = {
            let raw: Vec<f64> = (0..support).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / total).collect()
        };
        let mut wins = 0usize;
        for _ in 0..rounds_per_sample {
            let q = &questions[rng.gen_range(0..questions.len())];
            let mut pick = rng.gen::<f64>();
            let mut chosen = support - 1;
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    chosen = i;
                    break;
                }
                pick -= w;
            }
            let answer = profiles[chosen].answer(q);
            if game.is_winning(q, &answer)? == crate::game::RoundOutcome::Win {
                wins += 1;
            }
        }
        let rate = wins as f64 / rounds_per_sample as f64;
        worst_excess = worst_excess.max(rate - omega_tilde_f);
    }
    checks.push(TheoremCheck {
        name: "mixed-strategy uniform-question success ≤ omega_tilde + 4σ".to_string(),
        passed: worst_excess <= 4.0 * sigma,
        detail: format!(
            "worst excess over ω̃ across {mixed_samples} sampled mixtures: {worst_excess:.4} (4σ = {:.4})",
            4.0 * sigma
        ),
    });

    Ok(TheoremReport {
        game: game.name().to_string(),
        checks,
    })
}

/// A random small two-player game for property suites: alphabet sizes in
/// {2, 3}, a random nonempty promise, a random winning relation.
pub fn random_game(rng: &mut impl rand::Rng, name: &str) -> Game {
    let x0 = 2 + rng.gen_range(0..2usize);
    let x1 = 2 + rng.gen_range(0..2usize);
    let a0 = 2 + rng.gen_range(0..2usize);
    let a1 = 2 + rng.gen_range(0..2usize);
    let n_questions = x0 * x1;
    let mut promise: Vec<bool> = (0..n_questions).map(|_| rng.gen::<bool>()).collect();
    if promise.iter().all(|&p| !p) {
        let idx = rng.gen_range(0..n_questions);
        promise[idx] = true;
    }
    let witness_idx = promise.iter().position(|&p| p).expect("forced nonempty");
    let witness = vec![witness_idx / x1, witness_idx % x1];
    let n_answers = a0 * a1;
    let winning: Vec<bool> = (0..n_questions * n_answers)
        .map(|_| rng.gen::<bool>())
        .collect();
    crate::game::GameBuilder::new(
        name,
        vec![x0, x1],
        vec![a0, a1],
        move |q| promise[q[0] * x1 + q[1]],
        move |q, a| winning[(q[0] * x1 + q[1]) * n_answers + a[0] * a1 + a[1]],
        witness,
    )
    .build()
    .expect("witness satisfies the promise")
}
