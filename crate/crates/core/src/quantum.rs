//! Exact complex state-vector simulation over per-player qudit registers.
//!
//! States are dense amplitude vectors indexed player-major: the joint basis
//! index is the mixed-radix number formed by each player's register value,
//! player 0 most significant. All catalog states are tiny (dimension ≤ a few
//! hundred), so density and exactness win over cleverness.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
pub const ORTHO_TOL: f64 = 1e-10;
const PROB_FLOOR: f64 = 1e-15;

/// Per player, the list of qudit dimensions making up that player's register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    players: Vec<Vec<usize>>,
}

impl RegisterLayout {
    pub fn new(players: Vec<Vec<usize>>) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::input("layout needs at least one player"));
        }
        for (i, dims) in players.iter().enumerate() {
            if dims.is_empty() {
                return Err(Error::input(format!("player {i} has an empty register")));
            }
            if dims.iter().any(|&d| d < 2) {
                return Err(Error::input(format!(
                    "player {i} has a qudit of dimension < 2"
                )));
            }
        }
        Ok(RegisterLayout { players })
    }

    /// Every player holds a single register of `dim` levels.
    pub fn uniform_qudits(n_players: usize, dim: usize) -> Result<Self> {
        RegisterLayout::new(vec![vec![dim]; n_players])
    }

    /// Every player holds `qubits` two-level systems.
    pub fn uniform_qubits(n_players: usize, qubits: usize) -> Result<Self> {
        RegisterLayout::new(vec![vec![2; qubits]; n_players])
    }

    pub fn n_players(&self) -> usize {
        self.players.len()
    }

    pub fn player_qudits(&self, player: usize) -> &[usize] {
        &self.players[player]
    }

    /// Product of the player's qudit dimensions.
    pub fn player_dim(&self, player: usize) -> usize {
        self.players[player].iter().product()
    }

    pub fn total_dim(&self) -> usize {
        (0..self.n_players()).map(|p| self.player_dim(p)).product()
    }

    /// Stride of the player's register value in the joint index.
    fn player_stride(&self, player: usize) -> usize {
        (player + 1..self.n_players())
            .map(|p| self.player_dim(p))
            .product()
    }

    /// Joint index of the basis state with the given per-player values.
    pub fn joint_index(&self, values: &[usize]) -> usize {
        values
            .iter()
            .enumerate()
            .map(|(p, &v)| v * self.player_stride(p))
            .sum()
    }
}

/// A normalized complex amplitude vector over a [`RegisterLayout`].
#[derive(Debug, Clone)]
pub struct PureState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::input(format!(
                "amplitude vector length {} does not match layout dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        let state = PureState { layout, amps };
        if (state.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!(
                "state norm² = {} is not 1 within {NORM_TOL}",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each register value for one player (marginal over the
    /// rest).
    pub fn player_marginal(&self, player: usize) -> Vec<f64> {
        let dim = self.layout.player_dim(player);
        let stride = self.layout.player_stride(player);
        let hi = self.amps.len() / (dim * stride);
        let mut probs = vec![0.0; dim];
        for h in 0..hi {
            for v in 0..dim {
                for l in 0..stride {
                    probs[v] += self.amps[(h * dim + v) * stride + l].norm_sqr();
                }
            }
        }
        probs
    }
}

/// Named initial-state descriptors for the catalog strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateDescriptor {
    /// (1/√2)(|0…0⟩ + |1…1⟩) over n single-qubit-sized registers.
    Ghz,
    /// Two players with equal register dimension; (1/√t) Σ_{j<t} |j⟩|j⟩.
    UniformPairDiagonal { terms: usize },
    /// ½|0011⟩ − ½|0110⟩ − ½|1001⟩ + ½|1100⟩ over two 2-qubit registers.
    MagicSquare,
    /// (1/√m) Σ_{j<m} |j⟩^{⊗n} over n registers of m levels each.
    UniformAllDiagonal { levels: usize },
}

/// Build the named state on the given layout.
pub fn make_state(layout: &RegisterLayout, spec: &StateDescriptor) -> Result<PureState> {
    let total = layout.total_dim();
    let n = layout.n_players();
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    match spec {
        StateDescriptor::Ghz => {
            if (0..n).any(|p| layout.player_dim(p) != 2) {
                return Err(Error::input("GHZ descriptor needs one qubit per player"));
            }
            let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[layout.joint_index(&vec![0; n])] = c;
            amps[layout.joint_index(&vec![1; n])] = c;
        }
        StateDescriptor::UniformPairDiagonal { terms } => {
            if n != 2 {
                return Err(Error::input("diagonal pair descriptor needs two players"));
            }
            let d0 = layout.player_dim(0);
            let d1 = layout.player_dim(1);
            if d0 != d1 || *terms > d0 || *terms == 0 {
                return Err(Error::input(format!(
                    "diagonal pair descriptor with {terms} terms does not fit registers of dimension {d0}×{d1}"
                )));
            }
            let c = Complex64::new(1.0 / (*terms as f64).sqrt(), 0.0);
            for j in 0..*terms {
                amps[layout.joint_index(&[j, j])] = c;
            }
        }
        StateDescriptor::MagicSquare => {
            if n != 2 || layout.player_dim(0) != 4 || layout.player_dim(1) != 4 {
                return Err(Error::input(
                    "magic-square descriptor needs two 4-dimensional registers",
                ));
            }
            let half = Complex64::new(0.5, 0.0);
            amps[layout.joint_index(&[0b00, 0b11])] = half;
            amps[layout.joint_index(&[0b01, 0b10])] = -half;
            amps[layout.joint_index(&[0b10, 0b01])] = -half;
            amps[layout.joint_index(&[0b11, 0b00])] = half;
        }
        StateDescriptor::UniformAllDiagonal { levels } => {
            if (0..n).any(|p| layout.player_dim(p) != *levels) {
                return Err(Error::input(format!(
                    "diagonal descriptor needs every register to have {levels} levels"
                )));
            }
            let c = Complex64::new(1.0 / (*levels as f64).sqrt(), 0.0);
            for j in 0..*levels {
                amps[layout.joint_index(&vec![j; n])] = c;
            }
        }
    }
    PureState::new(layout.clone(), amps)
}

/// A complex square matrix validated to be unitary at construction.
///
/// Diagonal unitaries (phase gates) keep a sparse representation; everything
/// else is dense row-major.
#[derive(Debug, Clone)]
pub struct Unitary {
    dim: usize,
    repr: UnitaryRepr,
}

#[derive(Debug, Clone)]
enum UnitaryRepr {
    Dense(Vec<Complex64>),
    Diagonal(Vec<Complex64>),
}

impl Unitary {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::input("unitary must be square and nonempty"));
        }
        let elems: Vec<Complex64> = rows.into_iter().flatten().collect();
        let u = Unitary {
            dim,
            repr: UnitaryRepr::Dense(elems),
        };
        // U·U† = I entrywise
        for i in 0..dim {
            for j in 0..dim {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    s += u.at(i, k) * u.at(j, k).conj();
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                if (s - expected).norm() > UNITARY_TOL {
                    return Err(Error::validation(format!(
                        "matrix is not unitary: (U·U†)[{i}][{j}] = {s}"
                    )));
                }
            }
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        match &self.repr {
            UnitaryRepr::Dense(elems) => elems[row * self.dim + col],
            UnitaryRepr::Diagonal(d) => {
                if row == col {
                    d[row]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn identity(dim: usize) -> Self {
        Unitary {
            dim,
            repr: UnitaryRepr::Diagonal(vec![Complex64::new(1.0, 0.0); dim]),
        }
    }

    /// The 2×2 Walsh–Hadamard transform.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Unitary {
            dim: 2,
            repr: UnitaryRepr::Dense(vec![
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ]),
        }
    }

    /// H^{⊗m}.
    pub fn hadamard_pow(m: usize) -> Self {
        let mut u = Unitary::identity(1);
        for _ in 0..m {
            u = u.kron(&Unitary::hadamard());
        }
        u
    }

    /// Diagonal unitary |j⟩ ↦ phases[j]·|j⟩. Each phase must have modulus 1.
    pub fn diagonal(phases: &[Complex64]) -> Result<Self> {
        for (j, p) in phases.iter().enumerate() {
            if (p.norm() - 1.0).abs() > UNITARY_TOL {
                return Err(Error::validation(format!(
                    "diagonal entry {j} has modulus {} ≠ 1",
                    p.norm()
                )));
            }
        }
        Ok(Unitary {
            dim: phases.len(),
            repr: UnitaryRepr::Diagonal(phases.to_vec()),
        })
    }

    /// Quantum Fourier transform modulo `m`: |j⟩ ↦ (1/√m) Σ_k e^{2πi jk/m} |k⟩.
    pub fn qft(m: usize) -> Self {
        let c = 1.0 / (m as f64).sqrt();
        let mut elems = Vec::with_capacity(m * m);
        for k in 0..m {
            for j in 0..m {
                let angle = 2.0 * PI * (j as f64) * (k as f64) / (m as f64);
                elems.push(Complex64::from_polar(c, angle));
            }
        }
        Unitary {
            dim: m,
            repr: UnitaryRepr::Dense(elems),
        }
    }

    /// Rotation into an orthonormal real basis: row k is the k-th basis
    /// vector, so measuring computationally after applying this unitary is a
    /// projective measurement in that basis.
    pub fn from_orthonormal_real_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Unitary::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn kron(&self, other: &Unitary) -> Unitary {
        let dim = self.dim * other.dim;
        if let (UnitaryRepr::Diagonal(a), UnitaryRepr::Diagonal(b)) = (&self.repr, &other.repr) {
            let mut d = Vec::with_capacity(dim);
            for x in a {
                for y in b {
                    d.push(x * y);
                }
            }
            return Unitary {
                dim,
                repr: UnitaryRepr::Diagonal(d),
            };
        }
        let mut elems = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i1 in 0..self.dim {
            for j1 in 0..self.dim {
                for i2 in 0..other.dim {
                    for j2 in 0..other.dim {
                        elems[(i1 * other.dim + i2) * dim + (j1 * other.dim + j2)] =
                            self.at(i1, j1) * other.at(i2, j2);
                    }
                }
            }
        }
        Unitary {
            dim,
            repr: UnitaryRepr::Dense(elems),
        }
    }

    fn is_diagonal(&self) -> Option<&[Complex64]> {
        match &self.repr {
            UnitaryRepr::Diagonal(d) => Some(d),
            UnitaryRepr::Dense(_) => None,
        }
    }
}

/// Apply `u` to one player's register: the joint operation I ⊗ … ⊗ U ⊗ … ⊗ I.
pub fn apply_local(state: &PureState, player: usize, u: &Unitary) -> Result<PureState> {
    let layout = state.layout();
    if player >= layout.n_players() {
        return Err(Error::input(format!("no player {player}")));
    }
    let dim = layout.player_dim(player);
    if u.dim() != dim {
        return Err(Error::input(format!(
            "unitary dimension {} does not match register dimension {dim}",
            u.dim()
        )));
    }
    let stride = layout.player_stride(player);
    let hi = state.amps.len() / (dim * stride);
    if let Some(d) = u.is_diagonal() {
        let mut out = state.amps.clone();
        for h in 0..hi {
            for (v, phase) in d.iter().enumerate() {
                for l in 0..stride {
                    out[(h * dim + v) * stride + l] *= phase;
                }
            }
        }
        return PureState::new(layout.clone(), out);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    for h in 0..hi {
        for l in 0..stride {
            for (v, c) in column.iter_mut().enumerate() {
                *c = state.amps[(h * dim + v) * stride + l];
            }
            for v_out in 0..dim {
                let mut s = Complex64::new(0.0, 0.0);
                for (v_in, c) in column.iter().enumerate() {
                    s += u.at(v_out, v_in) * c;
                }
                out[(h * dim + v_out) * stride + l] = s;
            }
        }
    }
    PureState::new(layout.clone(), out)
}

/// Probability that the player's register reads `value`, and the renormalized
/// post-measurement state. Probability 0 yields no state.
pub fn collapse_computational(
    state: &PureState,
    player: usize,
    value: usize,
) -> (f64, Option<PureState>) {
    let layout = state.layout();
    let dim = layout.player_dim(player);
    let stride = layout.player_stride(player);
    let hi = state.amps.len() / (dim * stride);
    let mut prob = 0.0;
    for h in 0..hi {
        for l in 0..stride {
            prob += state.amps[(h * dim + value) * stride + l].norm_sqr();
        }
    }
    prob = prob.max(0.0);
    if prob <= PROB_FLOOR {
        return (0.0, None);
    }
    let scale = 1.0 / prob.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    for h in 0..hi {
        for l in 0..stride {
            let idx = (h * dim + value) * stride + l;
            amps[idx] = state.amps[idx] * scale;
        }
    }
    let collapsed = PureState {
        layout: layout.clone(),
        amps,
    };
    (prob, Some(collapsed))
}

/// Measure one player's full register in the computational basis.
pub fn measure_computational(
    state: &PureState,
    player: usize,
    rng: &mut impl rand::Rng,
) -> Result<(usize, PureState)> {
    let layout = state.layout();
    if player >= layout.n_players() {
        return Err(Error::input(format!("no player {player}")));
    }
    let probs = state.player_marginal(player);
    let outcome = sample_index(&probs, rng);
    let (_, collapsed) = collapse_computational(state, player, outcome);
    Ok((
        outcome,
        collapsed.expect("sampled outcome has positive probability"),
    ))
}

/// A partition of one player's register basis into disjoint blocks covering
/// the full index range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspacePartition {
    blocks: Vec<Vec<usize>>,
    dim: usize,
}

impl SubspacePartition {
    pub fn new(blocks: Vec<Vec<usize>>, dim: usize) -> Result<Self> {
        let mut seen = vec![false; dim];
        for block in &blocks {
            for &idx in block {
                if idx >= dim {
                    return Err(Error::input(format!(
                        "partition index {idx} outside register of dimension {dim}"
                    )));
                }
                if seen[idx] {
                    return Err(Error::input(format!("partition blocks overlap at {idx}")));
                }
                seen[idx] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::input(
                "partition blocks must cover the full basis index range",
            ));
        }
        Ok(SubspacePartition { blocks, dim })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Probability that the projective partial measurement lands in `block`, and
/// the renormalized projection.
pub fn collapse_subspace(
    state: &PureState,
    player: usize,
    partition: &SubspacePartition,
    block: usize,
) -> (f64, Option<PureState>) {
    let layout = state.layout();
    let dim = layout.player_dim(player);
    let stride = layout.player_stride(player);
    let hi = state.amps.len() / (dim * stride);
    let members = &partition.blocks()[block];
    let mut prob = 0.0;
    for &v in members {
        for h in 0..hi {
            for l in 0..stride {
                prob += state.amps[(h * dim + v) * stride + l].norm_sqr();
            }
        }
    }
    prob = prob.max(0.0);
    if prob <= PROB_FLOOR {
        return (0.0, None);
    }
    let scale = 1.0 / prob.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    for &v in members {
        for h in 0..hi {
            for l in 0..stride {
                let idx = (h * dim + v) * stride + l;
                amps[idx] = state.amps[idx] * scale;
            }
        }
    }
    (
        prob,
        Some(PureState {
            layout: layout.clone(),
            amps,
        }),
    )
}

/// Projective partial measurement onto the partition's subspaces. Returns the
/// sampled block index and the collapsed state. Zero-probability blocks are
/// never returned.
pub fn measure_subspaces(
    state: &PureState,
    player: usize,
    partition: &SubspacePartition,
    rng: &mut impl rand::Rng,
) -> Result<(usize, PureState)> {
    let layout = state.layout();
    if player >= layout.n_players() {
        return Err(Error::input(format!("no player {player}")));
    }
    if partition.dim() != layout.player_dim(player) {
        return Err(Error::input(format!(
            "partition is over dimension {}, register has {}",
            partition.dim(),
            layout.player_dim(player)
        )));
    }
    let probs: Vec<f64> = (0..partition.blocks().len())
        .map(|b| collapse_subspace(state, player, partition, b).0)
        .collect();
    let block = sample_index(&probs, rng);
    let (_, collapsed) = collapse_subspace(state, player, partition, block);
    Ok((
        block,
        collapsed.expect("sampled block has positive probability"),
    ))
}

fn sample_index(probs: &[f64], rng: &mut impl rand::Rng) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u: f64 = rng.gen::<f64>() * total;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > PROB_FLOOR {
            last_positive = i;
            if u < p {
                return i;
            }
            u -= p;
        }
    }
    last_positive
}

/// One step of a player's local procedure after receiving their input.
#[derive(Debug, Clone)]
pub enum LocalStep {
    Apply(Arc<Unitary>),
    MeasureAll,
    MeasureSubspace(Arc<SubspacePartition>),
}

/// A player's full local procedure: unitaries interleaved with measurements.
/// The raw outcome record has one entry per measurement step.
#[derive(Debug, Clone, Default)]
pub struct LocalProgram {
    pub steps: Vec<LocalStep>,
}

impl LocalProgram {
    pub fn measurement_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| !matches!(s, LocalStep::Apply(_)))
            .count()
    }
}

/// Raw measurement record of one player: one value per measurement step.
pub type RawOutcome = Vec<usize>;

/// Execute a player's program on the shared state, sampling measurements from
/// `rng`. Returns the raw record and the post-program state.
pub fn run_program_sampled(
    state: &PureState,
    player: usize,
    program: &LocalProgram,
    rng: &mut impl rand::Rng,
) -> Result<(RawOutcome, PureState)> {
    let mut current = state.clone();
    let mut raw = Vec::new();
    for step in &program.steps {
        match step {
            LocalStep::Apply(u) => {
                current = apply_local(&current, player, u)?;
            }
            LocalStep::MeasureAll => {
                let (outcome, next) = measure_computational(&current, player, rng)?;
                raw.push(outcome);
                current = next;
            }
            LocalStep::MeasureSubspace(partition) => {
                let (block, next) = measure_subspaces(&current, player, partition, rng)?;
                raw.push(block);
                current = next;
            }
        }
    }
    Ok((raw, current))
}

/// Exact joint distribution over every player's raw measurement record after
/// all programs run. Local operations on distinct players commute, so
/// executing players in index order loses no generality.
pub fn exact_outcome_distribution(
    state: &PureState,
    programs: &[LocalProgram],
) -> Result<BTreeMap<Vec<RawOutcome>, f64>> {
    if programs.len() != state.layout().n_players() {
        return Err(Error::input(format!(
            "{} programs for {} players",
            programs.len(),
            state.layout().n_players()
        )));
    }
    let mut branches: Vec<(PureState, f64, Vec<RawOutcome>)> =
        vec![(state.clone(), 1.0, vec![Vec::new(); programs.len()])];
    for (player, program) in programs.iter().enumerate() {
        for step in &program.steps {
            match step {
                LocalStep::Apply(u) => {
                    for (s, _, _) in branches.iter_mut() {
                        *s = apply_local(s, player, u)?;
                    }
                }
                LocalStep::MeasureAll => {
                    let dim = state.layout().player_dim(player);
                    let mut next = Vec::with_capacity(branches.len());
                    for (s, p, raws) in branches.drain(..) {
                        for value in 0..dim {
                            let (bp, collapsed) = collapse_computational(&s, player, value);
                            if let Some(cs) = collapsed {
                                let mut r = raws.clone();
                                r[player].push(value);
                                next.push((cs, p * bp, r));
                            }
                        }
                    }
                    branches = next;
                }
                LocalStep::MeasureSubspace(partition) => {
                    if partition.dim() != state.layout().player_dim(player) {
                        return Err(Error::input(
                            "partition dimension does not match register".to_string(),
                        ));
                    }
                    let n_blocks = partition.blocks().len();
                    let mut next = Vec::with_capacity(branches.len());
                    for (s, p, raws) in branches.drain(..) {
                        for block in 0..n_blocks {
                            let (bp, collapsed) = collapse_subspace(&s, player, partition, block);
                            if let Some(cs) = collapsed {
                                let mut r = raws.clone();
                                r[player].push(block);
                                next.push((cs, p * bp, r));
                            }
                        }
                    }
                    branches = next;
                }
            }
        }
    }
    let mut dist = BTreeMap::new();
    for (_, p, raws) in branches {
        *dist.entry(raws).or_insert(0.0) += p.max(0.0);
    }
    Ok(dist)
}

/// Extend mutually orthogonal vectors to an orthonormal basis of ℝ^d.
///
/// The first vectors of the result span the same lines as the inputs, in
/// order. Completion candidates are taken from the standard basis swept in
/// index order, so the result is deterministic.
pub fn gram_schmidt_complete(vectors: &[Vec<f64>], d: usize) -> Result<Vec<Vec<f64>>> {
    if vectors.len() > d {
        return Err(Error::input(format!(
            "{} input vectors exceed dimension {d}",
            vectors.len()
        )));
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != d {
            return Err(Error::input(format!(
                "input vector {i} has length {}, expected {d}",
                v.len()
            )));
        }
        let norm = dot(v, v).sqrt();
        if norm == 0.0 {
            return Err(Error::validation(format!("input vector {i} is zero")));
        }
        for (j, w) in vectors.iter().enumerate().take(i) {
            let wn = dot(w, w).sqrt();
            if dot(v, w).abs() > ORTHO_TOL * norm * wn {
                return Err(Error::validation(format!(
                    "input vectors {j} and {i} are not orthogonal"
                )));
            }
        }
        basis.push(v.iter().map(|x| x / norm).collect());
    }
    let mut candidate = 0usize;
    while basis.len() < d {
        if candidate >= d {
            return Err(Error::validation(
                "standard-basis sweep failed to complete the basis".to_string(),
            ));
        }
        let mut r = vec![0.0; d];
        r[candidate] = 1.0;
        for b in &basis {
            let c = dot(&r, b);
            for (ri, bi) in r.iter_mut().zip(b.iter()) {
                *ri -= c * bi;
            }
        }
        let norm = dot(&r, &r).sqrt();
        if norm > 1e-8 {
            basis.push(r.iter().map(|x| x / norm).collect());
        }
        candidate += 1;
    }
    Ok(basis)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero() {
        let layout = RegisterLayout::uniform_qubits(2, 1).unwrap();
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0] = c(1.0, 0.0);
        let state = PureState::new(layout, amps).unwrap();
        let after = apply_local(&state, 0, &Unitary::hadamard()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((after.amplitudes()[0] - c(h, 0.0)).norm() < 1e-12);
        assert!((after.amplitudes()[2] - c(h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ghz_state_amplitudes() {
        let layout = RegisterLayout::uniform_qubits(3, 1).unwrap();
        let s = make_state(&layout, &StateDescriptor::Ghz).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in s.amplitudes().iter().enumerate() {
            if i == 0 || i == 7 {
                assert!((a - c(h, 0.0)).norm() < 1e-12);
            } else {
                assert!(a.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn magic_square_state_amplitudes() {
        let layout = RegisterLayout::uniform_qubits(2, 2).unwrap();
        let s = make_state(&layout, &StateDescriptor::MagicSquare).unwrap();
        // |0011⟩=3, |0110⟩=6, |1001⟩=9, |1100⟩=12 in the 16-dim joint index
        let expect = [(3, 0.5), (6, -0.5), (9, -0.5), (12, 0.5)];
        for (i, a) in s.amplitudes().iter().enumerate() {
            match expect.iter().find(|(j, _)| *j == i) {
                Some((_, v)) => assert!((a - c(*v, 0.0)).norm() < 1e-12),
                None => assert!(a.norm() < 1e-12),
            }
        }
    }

    #[test]
    fn qutrit_pair_diagonal() {
        let layout = RegisterLayout::uniform_qudits(2, 3).unwrap();
        let s = make_state(&layout, &StateDescriptor::UniformPairDiagonal { terms: 3 }).unwrap();
        assert_eq!(s.amplitudes().len(), 9);
        let v = 1.0 / 3f64.sqrt();
        for j in 0..3 {
            assert!((s.amplitudes()[j * 3 + j] - c(v, 0.0)).norm() < 1e-12);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_all_hadamard_gives_even_parity_quarters() {
        let layout = RegisterLayout::uniform_qubits(3, 1).unwrap();
        let mut s = make_state(&layout, &StateDescriptor::Ghz).unwrap();
        for p in 0..3 {
            s = apply_local(&s, p, &Unitary::hadamard()).unwrap();
        }
        let programs = vec![
            LocalProgram {
                steps: vec![LocalStep::MeasureAll],
            };
            3
        ];
        let dist = exact_outcome_distribution(&s, &programs).unwrap();
        assert_eq!(dist.len(), 4);
        for (raws, p) in &dist {
            let parity: usize = raws.iter().map(|r| r[0]).sum::<usize>() % 2;
            assert_eq!(parity, 0);
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn measure_definite_state() {
        let layout = RegisterLayout::uniform_qubits(2, 1).unwrap();
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0] = c(1.0, 0.0);
        let s = PureState::new(layout, amps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (outcome, collapsed) = measure_computational(&s, 0, &mut rng).unwrap();
        assert_eq!(outcome, 0);
        assert!((collapsed.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bell_pair_marginal_is_half_half() {
        let layout = RegisterLayout::uniform_qubits(2, 1).unwrap();
        let s = make_state(&layout, &StateDescriptor::UniformPairDiagonal { terms: 2 }).unwrap();
        for player in 0..2 {
            let m = s.player_marginal(player);
            assert!((m[0] - 0.5).abs() < 1e-12);
            assert!((m[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn subspace_single_block_keeps_state() {
        let layout = RegisterLayout::uniform_qubits(2, 1).unwrap();
        let mut amps = vec![c(0.0, 0.0); 4];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = c(h, 0.0);
        amps[3] = c(-h, 0.0);
        let s = PureState::new(layout, amps).unwrap();
        let partition = SubspacePartition::new(vec![vec![0, 1]], 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (block, collapsed) = measure_subspaces(&s, 1, &partition, &mut rng).unwrap();
        assert_eq!(block, 0);
        for (a, b) in collapsed.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn subspace_definite_block() {
        // |22⟩ over two 4-level registers: block {2,3} fires with certainty
        let layout = RegisterLayout::uniform_qudits(2, 4).unwrap();
        let mut amps = vec![c(0.0, 0.0); 16];
        amps[2 * 4 + 2] = c(1.0, 0.0);
        let s = PureState::new(layout, amps).unwrap();
        let partition = SubspacePartition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        let (p0, _) = collapse_subspace(&s, 1, &partition, 0);
        let (p1, _) = collapse_subspace(&s, 1, &partition, 1);
        assert!(p0.abs() < 1e-15);
        assert!((p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matching_style_partition_halves() {
        // uniform 4-diagonal with Alice phases x = (0,1,0,0):
        // blocks {0,1} and {2,3} each fire with probability 1/2, collapse has
        // two equal-magnitude terms
        let layout = RegisterLayout::uniform_qudits(2, 4).unwrap();
        let mut s = make_state(&layout, &StateDescriptor::UniformPairDiagonal { terms: 4 }).unwrap();
        let phases: Vec<Complex64> = [0, 1, 0, 0]
            .iter()
            .map(|&x| c(if x == 1 { -1.0 } else { 1.0 }, 0.0))
            .collect();
        s = apply_local(&s, 0, &Unitary::diagonal(&phases).unwrap()).unwrap();
        let partition = SubspacePartition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        for block in 0..2 {
            let (p, collapsed) = collapse_subspace(&s, 1, &partition, block);
            assert!((p - 0.5).abs() < 1e-12);
            let cs = collapsed.unwrap();
            let nonzero: Vec<usize> = cs
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm() > 1e-12)
                .map(|(i, _)| i)
                .collect();
            let expected: Vec<usize> = if block == 0 {
                vec![0, 1 * 4 + 1]
            } else {
                vec![2 * 4 + 2, 3 * 4 + 3]
            };
            assert_eq!(nonzero, expected);
            for i in &nonzero {
                assert!(
                    (cs.amplitudes()[*i].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12
                );
            }
        }
    }

    #[test]
    fn product_state_distribution_is_definite() {
        let layout = RegisterLayout::uniform_qubits(2, 1).unwrap();
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0] = c(1.0, 0.0);
        let s = PureState::new(layout, amps).unwrap();
        let programs = vec![
            LocalProgram {
                steps: vec![LocalStep::MeasureAll],
            };
            2
        ];
        let dist = exact_outcome_distribution(&s, &programs).unwrap();
        assert_eq!(dist.len(), 1);
        let (raws, p) = dist.iter().next().unwrap();
        assert_eq!(raws, &vec![vec![0], vec![0]]);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let rows = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
        assert!(Unitary::from_rows(rows).is_err());
    }

    #[test]
    fn gram_schmidt_examples() {
        let basis = gram_schmidt_complete(&[vec![1.0, 0.0, 0.0]], 3).unwrap();
        assert_eq!(basis.len(), 3);
        assert_eq!(basis[0], vec![1.0, 0.0, 0.0]);

        let basis = gram_schmidt_complete(&[], 2).unwrap();
        assert_eq!(basis, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

        let basis =
            gram_schmidt_complete(&[vec![1.0, 1.0, 0.0], vec![1.0, -1.0, 0.0]], 3).unwrap();
        assert_eq!(basis.len(), 3);
        assert!(basis[2][0].abs() < 1e-12);
        assert!(basis[2][1].abs() < 1e-12);
        assert!((basis[2][2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_rejects_non_orthogonal() {
        assert!(gram_schmidt_complete(&[vec![1.0, 0.0], vec![1.0, 1.0]], 2).is_err());
    }

    #[test]
    fn qft_is_unitary_and_round() {
        for m in [2usize, 3, 4, 6] {
            let u = Unitary::qft(m);
            // from_rows re-validates; rebuild through the validating path
            let rows: Vec<Vec<Complex64>> = (0..m)
                .map(|k| (0..m).map(|j| u.at(k, j)).collect())
                .collect();
            assert!(Unitary::from_rows(rows).is_ok());
        }
    }

    #[test]
    fn exact_distribution_matches_sampling() {
        // empirical frequencies over 1e5 samples within 4σ of the exact
        // marginals, on a state with an irrational amplitude split
        let layout = RegisterLayout::uniform_qubits(2, 1).unwrap();
        let mut s = make_state(&layout, &StateDescriptor::UniformPairDiagonal { terms: 2 }).unwrap();
        s = apply_local(&s, 0, &Unitary::hadamard()).unwrap();
        let programs = vec![
            LocalProgram {
                steps: vec![LocalStep::MeasureAll],
            };
            2
        ];
        let dist = exact_outcome_distribution(&s, &programs).unwrap();
        let total: f64 = dist.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let n = 100_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts: BTreeMap<Vec<RawOutcome>, usize> = BTreeMap::new();
        for _ in 0..n {
            let mut current = s.clone();
            let mut raws = Vec::new();
            for player in 0..2 {
                let (raw, next) =
                    run_program_sampled(&current, player, &programs[player], &mut rng).unwrap();
                raws.push(raw);
                current = next;
            }
            *counts.entry(raws).or_insert(0) += 1;
        }
        for (raws, &p) in &dist {
            let observed = *counts.get(raws).unwrap_or(&0) as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt().max(1.0);
            assert!(
                (observed - n as f64 * p).abs() <= 4.0 * sigma,
                "outcome {raws:?}: observed {observed}, expected {}",
                n as f64 * p
            );
        }
    }

    /// Random unitary via Gram-Schmidt on a seeded random complex matrix.
    fn random_unitary(dim: usize, seed: u64) -> Unitary {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        while rows.len() < dim {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            for r in &rows {
                let overlap: Complex64 = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ri) in v.iter_mut().zip(r.iter()) {
                    *vi -= overlap * ri;
                }
            }
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
                rows.push(v);
            }
        }
        Unitary::from_rows(rows).unwrap()
    }

    fn random_state(dims: Vec<Vec<usize>>, seed: u64) -> PureState {
        let layout = RegisterLayout::new(dims).unwrap();
        let total = layout.total_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..total)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = amps.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        PureState::new(layout, amps).unwrap()
    }

    proptest! {
        #[test]
        fn apply_local_preserves_norm(seed in 0u64..200) {
            let s = random_state(vec![vec![2], vec![3]], seed);
            let u = random_unitary(3, seed.wrapping_add(1));
            let after = apply_local(&s, 1, &u).unwrap();
            prop_assert!((after.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn distinct_player_operations_commute(seed in 0u64..200) {
            let s = random_state(vec![vec![2], vec![2, 2]], seed);
            let u = random_unitary(2, seed.wrapping_add(10));
            let v = random_unitary(4, seed.wrapping_add(20));
            let a = apply_local(&apply_local(&s, 0, &u).unwrap(), 1, &v).unwrap();
            let b = apply_local(&apply_local(&s, 1, &v).unwrap(), 0, &u).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn collapse_probabilities_sum_to_one(seed in 0u64..200) {
            let s = random_state(vec![vec![2], vec![4]], seed);
            let total: f64 = (0..4)
                .map(|v| collapse_computational(&s, 1, v).0)
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
