//! Games, questions, answers, promises, winning relations, and evaluation of
//! deterministic classical strategies.
//!
//! A game is played by `n >= 2` players. Each player `i` has a finite ordered
//! input alphabet and a finite ordered output alphabet; symbols are represented
//! as indices into those alphabets. Every output alphabet is implicitly
//! extended with the distinguished symbol `⊥` ("no detection / admit
//! ignorance"), represented by [`OutputSymbol::Bottom`]. The promise selects
//! the legitimate questions; the winning relation decides which ⊥-free answers
//! are appropriate.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Index into a player's alphabet.
pub type Symbol = usize;

/// One input symbol per player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Question(pub Vec<Symbol>);

impl Question {
    pub fn entries(&self) -> &[Symbol] {
        &self.0
    }
}

/// An output symbol: either a value from the player's output alphabet or ⊥.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputSymbol {
    Value(Symbol),
    Bottom,
}

impl OutputSymbol {
    pub fn is_bottom(&self) -> bool {
        matches!(self, OutputSymbol::Bottom)
    }

    pub fn value(&self) -> Option<Symbol> {
        match self {
            OutputSymbol::Value(v) => Some(*v),
            OutputSymbol::Bottom => None,
        }
    }
}

impl fmt::Display for OutputSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputSymbol::Value(v) => write!(f, "{v}"),
            OutputSymbol::Bottom => write!(f, "⊥"),
        }
    }
}

/// One output symbol per player, each either an alphabet element or ⊥.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Answer(pub Vec<OutputSymbol>);

impl Answer {
    pub fn from_values(values: &[Symbol]) -> Self {
        Answer(values.iter().map(|&v| OutputSymbol::Value(v)).collect())
    }

    pub fn entries(&self) -> &[OutputSymbol] {
        &self.0
    }

    pub fn has_bottom(&self) -> bool {
        self.0.iter().any(OutputSymbol::is_bottom)
    }

    /// The answer as plain values; `None` if any entry is ⊥.
    pub fn values(&self) -> Option<Vec<Symbol>> {
        self.0.iter().map(OutputSymbol::value).collect()
    }
}

/// Classification of one round.
///
/// Promise violations are recorded as `NoPromise` rather than silently counted
/// as wins, so that post-selection can discard them; scoring utilities expose
/// both conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundOutcome {
    Win,
    Draw,
    Lose,
    NoPromise,
}

impl RoundOutcome {
    /// The convention where a failed promise counts as a win outright.
    /// Post-selected scoring instead discards `NoPromise` rounds; both
    /// conventions are available to scoring code.
    pub fn wins_under_promise_convention(&self) -> bool {
        matches!(self, RoundOutcome::Win | RoundOutcome::NoPromise)
    }
}

impl fmt::Display for RoundOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RoundOutcome::Win => "win",
            RoundOutcome::Draw => "draw",
            RoundOutcome::Lose => "lose",
            RoundOutcome::NoPromise => "no-promise",
        };
        write!(f, "{s}")
    }
}

type PromiseFn = dyn Fn(&[Symbol]) -> bool + Send + Sync;
type WinningFn = dyn Fn(&[Symbol], &[Symbol]) -> bool + Send + Sync;
type LabelFn = dyn Fn(usize, Symbol) -> String + Send + Sync;

/// An n-player game: input/output alphabets, promise predicate and winning
/// relation, plus a name and named integer parameters.
#[derive(Clone)]
pub struct Game {
    name: String,
    params: BTreeMap<String, i64>,
    input_sizes: Vec<usize>,
    output_sizes: Vec<usize>,
    promise: Arc<PromiseFn>,
    winning: Arc<WinningFn>,
    input_labeler: Arc<LabelFn>,
    output_labeler: Arc<LabelFn>,
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Game")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("input_sizes", &self.input_sizes)
            .field("output_sizes", &self.output_sizes)
            .finish()
    }
}

/// Builder for [`Game`]. The promise must be witnessed by at least one
/// legitimate question, supplied explicitly so that construction stays O(1)
/// even for games whose input product is large.
pub struct GameBuilder {
    name: String,
    params: BTreeMap<String, i64>,
    input_sizes: Vec<usize>,
    output_sizes: Vec<usize>,
    promise: Arc<PromiseFn>,
    winning: Arc<WinningFn>,
    input_labeler: Option<Arc<LabelFn>>,
    output_labeler: Option<Arc<LabelFn>>,
    witness: Vec<Symbol>,
}

impl GameBuilder {
    pub fn new(
        name: impl Into<String>,
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        promise: impl Fn(&[Symbol]) -> bool + Send + Sync + 'static,
        winning: impl Fn(&[Symbol], &[Symbol]) -> bool + Send + Sync + 'static,
        witness: Vec<Symbol>,
    ) -> Self {
        GameBuilder {
            name: name.into(),
            params: BTreeMap::new(),
            input_sizes,
            output_sizes,
            promise: Arc::new(promise),
            winning: Arc::new(winning),
            input_labeler: None,
            output_labeler: None,
            witness,
        }
    }

    pub fn param(mut self, key: &str, value: i64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn input_labels(
        mut self,
        f: impl Fn(usize, Symbol) -> String + Send + Sync + 'static,
    ) -> Self {
        self.input_labeler = Some(Arc::new(f));
        self
    }

    pub fn output_labels(
        mut self,
        f: impl Fn(usize, Symbol) -> String + Send + Sync + 'static,
    ) -> Self {
        self.output_labeler = Some(Arc::new(f));
        self
    }

    pub fn build(self) -> Result<Game> {
        if self.input_sizes.len() < 2 {
            return Err(Error::input("a game needs at least 2 players"));
        }
        if self.input_sizes.len() != self.output_sizes.len() {
            return Err(Error::input("input/output alphabet counts disagree"));
        }
        if self.input_sizes.iter().any(|&s| s == 0) || self.output_sizes.iter().any(|&s| s == 0) {
            return Err(Error::input("alphabets must be nonempty"));
        }
        let game = Game {
            name: self.name,
            params: self.params,
            input_sizes: self.input_sizes,
            output_sizes: self.output_sizes,
            promise: self.promise,
            winning: self.winning,
            input_labeler: self
                .input_labeler
                .unwrap_or_else(|| Arc::new(|_, s| s.to_string())),
            output_labeler: self
                .output_labeler
                .unwrap_or_else(|| Arc::new(|_, s| s.to_string())),
        };
        let witness = Question(self.witness);
        if !game.is_legitimate(&witness)? {
            return Err(Error::validation(format!(
                "promise witness {:?} is not legitimate; the promise must be nonempty",
                witness.0
            )));
        }
        Ok(game)
    }
}

impl Game {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The same game under a preset's display name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn params(&self) -> &BTreeMap<String, i64> {
        &self.params
    }

    pub fn n_players(&self) -> usize {
        self.input_sizes.len()
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_sizes(&self) -> &[usize] {
        &self.output_sizes
    }

    pub fn input_label(&self, player: usize, s: Symbol) -> String {
        (self.input_labeler)(player, s)
    }

    pub fn output_label(&self, player: usize, s: OutputSymbol) -> String {
        match s {
            OutputSymbol::Value(v) => (self.output_labeler)(player, v),
            OutputSymbol::Bottom => "⊥".to_string(),
        }
    }

    pub fn question_label(&self, q: &Question) -> String {
        q.0.iter()
            .enumerate()
            .map(|(i, &s)| self.input_label(i, s))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn answer_label(&self, a: &Answer) -> String {
        a.0.iter()
            .enumerate()
            .map(|(i, &s)| self.output_label(i, s))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Number of joint questions in the full input product.
    pub fn full_product_size(&self) -> u128 {
        self.input_sizes.iter().map(|&s| s as u128).product()
    }

    fn check_question(&self, q: &Question) -> Result<()> {
        if q.0.len() != self.n_players() {
            return Err(Error::input(format!(
                "question has {} entries, game has {} players",
                q.0.len(),
                self.n_players()
            )));
        }
        for (i, &s) in q.0.iter().enumerate() {
            if s >= self.input_sizes[i] {
                return Err(Error::input(format!(
                    "question entry {i} = {s} outside alphabet of size {}",
                    self.input_sizes[i]
                )));
            }
        }
        Ok(())
    }

    fn check_answer(&self, a: &Answer) -> Result<()> {
        if a.0.len() != self.n_players() {
            return Err(Error::input(format!(
                "answer has {} entries, game has {} players",
                a.0.len(),
                self.n_players()
            )));
        }
        for (i, s) in a.0.iter().enumerate() {
            if let OutputSymbol::Value(v) = s {
                if *v >= self.output_sizes[i] {
                    return Err(Error::input(format!(
                        "answer entry {i} = {v} outside alphabet of size {}",
                        self.output_sizes[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `q` belongs to the promise `P`.
    pub fn is_legitimate(&self, q: &Question) -> Result<bool> {
        self.check_question(q)?;
        Ok((self.promise)(&q.0))
    }

    /// Classify one round. Exactly one of the four outcomes applies:
    /// no-promise if the promise fails, draw if any answer entry is ⊥,
    /// win if the ⊥-free answer is appropriate, lose otherwise.
    pub fn is_winning(&self, q: &Question, a: &Answer) -> Result<RoundOutcome> {
        self.check_question(q)?;
        self.check_answer(a)?;
        if !(self.promise)(&q.0) {
            return Ok(RoundOutcome::NoPromise);
        }
        match a.values() {
            None => Ok(RoundOutcome::Draw),
            Some(values) => {
                if (self.winning)(&q.0, &values) {
                    Ok(RoundOutcome::Win)
                } else {
                    Ok(RoundOutcome::Lose)
                }
            }
        }
    }

    /// Raw access to the winning relation for ⊥-free answers given as plain
    /// symbol slices. Used by inner enumeration loops.
    pub fn winning_raw(&self, q: &[Symbol], a: &[Symbol]) -> bool {
        (self.winning)(q, a)
    }

    /// Raw access to the promise for inner enumeration loops.
    pub fn promise_raw(&self, q: &[Symbol]) -> bool {
        (self.promise)(q)
    }

    /// All legitimate questions, in lexicographic order.
    ///
    /// Errors with a capacity report if the full input product exceeds `cap`.
    pub fn legitimate_questions(&self, cap: u64) -> Result<Vec<Question>> {
        let product = self.full_product_size();
        if product > cap as u128 {
            return Err(Error::capacity(
                format!("legitimate-question enumeration for {}", self.name),
                product,
                cap as u128,
            ));
        }
        let mut out = Vec::new();
        let mut current = vec![0usize; self.n_players()];
        loop {
            if (self.promise)(&current) {
                out.push(Question(current.clone()));
            }
            // lexicographic increment, last entry fastest
            let mut pos = self.n_players();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                current[pos] += 1;
                if current[pos] < self.input_sizes[pos] {
                    break;
                }
                current[pos] = 0;
            }
        }
    }
}

/// Per player, a total map from input symbol to output symbol.
///
/// ⊥ entries are permitted only when the strategy is flagged error-free
/// capable; plain strategies must answer with alphabet values everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategy {
    tables: Vec<Vec<OutputSymbol>>,
    allows_bottom: bool,
}

impl DeterministicStrategy {
    /// A plain strategy: no ⊥ anywhere.
    pub fn new(tables: Vec<Vec<OutputSymbol>>) -> Result<Self> {
        if tables
            .iter()
            .any(|t| t.iter().any(OutputSymbol::is_bottom))
        {
            return Err(Error::input(
                "plain deterministic strategy may not output ⊥; use new_error_free",
            ));
        }
        Ok(DeterministicStrategy {
            tables,
            allows_bottom: false,
        })
    }

    /// An error-free-capable strategy: ⊥ entries allowed.
    pub fn new_error_free(tables: Vec<Vec<OutputSymbol>>) -> Self {
        DeterministicStrategy {
            tables,
            allows_bottom: true,
        }
    }

    pub fn from_value_tables(tables: Vec<Vec<Symbol>>) -> Self {
        DeterministicStrategy {
            tables: tables
                .into_iter()
                .map(|t| t.into_iter().map(OutputSymbol::Value).collect())
                .collect(),
            allows_bottom: false,
        }
    }

    pub fn allows_bottom(&self) -> bool {
        self.allows_bottom
    }

    pub fn tables(&self) -> &[Vec<OutputSymbol>] {
        &self.tables
    }

    fn check_against(&self, game: &Game) -> Result<()> {
        if self.tables.len() != game.n_players() {
            return Err(Error::input(format!(
                "strategy has {} tables, game has {} players",
                self.tables.len(),
                game.n_players()
            )));
        }
        for (i, t) in self.tables.iter().enumerate() {
            if t.len() != game.input_sizes()[i] {
                return Err(Error::input(format!(
                    "strategy table {i} covers {} inputs, alphabet has {}",
                    t.len(),
                    game.input_sizes()[i]
                )));
            }
            for s in t {
                if let OutputSymbol::Value(v) = s {
                    if *v >= game.output_sizes()[i] {
                        return Err(Error::input(format!(
                            "strategy table {i} outputs {v} outside alphabet of size {}",
                            game.output_sizes()[i]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The answer this strategy gives to `q`.
    pub fn answer(&self, q: &Question) -> Answer {
        Answer(
            q.0.iter()
                .enumerate()
                .map(|(i, &x)| self.tables[i][x])
                .collect(),
        )
    }
}

/// Exact success proportion of a plain deterministic strategy: the fraction of
/// legitimate questions it answers appropriately.
pub fn evaluate_deterministic(
    game: &Game,
    strategy: &DeterministicStrategy,
    cap: u64,
) -> Result<BigRational> {
    strategy.check_against(game)?;
    if strategy.tables.iter().any(|t| t.iter().any(OutputSymbol::is_bottom)) {
        return Err(Error::input(
            "evaluate_deterministic expects a ⊥-free strategy",
        ));
    }
    let questions = game.legitimate_questions(cap)?;
    let mut wins: u64 = 0;
    let mut answer = vec![0usize; game.n_players()];
    for q in &questions {
        for (i, &x) in q.0.iter().enumerate() {
            answer[i] = strategy.tables[i][x].value().expect("⊥ ruled out above");
        }
        if game.winning_raw(&q.0, &answer) {
            wins += 1;
        }
    }
    Ok(BigRational::new(
        BigInt::from(wins),
        BigInt::from(questions.len() as u64),
    ))
}

/// Number of 1s in a bit string (entries 0 or 1).
pub fn hamming_weight(z: &[u8]) -> usize {
    z.iter().filter(|&&b| b != 0).count()
}
