//! Mapping from CLI game ids and parameter flags to built catalog instances.

use clap::Args;
use ptlab_core::catalog::{
    self, build_boyer_game, build_colouring_game, build_dj_game, build_magic_square_game,
    build_matching_game, build_parity_game, extended_parity_ell, KSSet, QuantumStrategy,
};
use ptlab_core::error::{Error, Result};
use ptlab_core::game::Game;

pub const GAME_IDS: &[&str] = &[
    "ghz",
    "parity",
    "extended-parity",
    "dj",
    "magic-square",
    "matching",
    "colouring",
    "boyer",
];

#[derive(Debug, Clone, Args)]
pub struct GameSelector {
    /// Game family: ghz | parity | extended-parity | dj | magic-square |
    /// matching | colouring | boyer
    pub game: String,

    /// Number of players (parity, extended-parity, boyer)
    #[arg(long)]
    pub n: Option<usize>,

    /// Input length in bits per player (parity)
    #[arg(long)]
    pub l: Option<usize>,

    /// Size parameter (dj: inputs of length 2^m; matching: points)
    #[arg(long)]
    pub m: Option<usize>,

    /// Modulus M (boyer)
    #[arg(long)]
    pub modulus: Option<usize>,

    /// Kochen-Specker set file (colouring; defaults to the shipped d=4 set)
    #[arg(long)]
    pub ks_file: Option<std::path::PathBuf>,

    /// Skip the non-colourability verification when loading a KS set
    #[arg(long, default_value_t = false)]
    pub skip_ks_verification: bool,
}

impl GameSelector {
    pub fn build(&self) -> Result<(Game, QuantumStrategy)> {
        let need = |opt: Option<usize>, flag: &str| -> Result<usize> {
            opt.ok_or_else(|| Error::input(format!("{} requires --{flag}", self.game)))
        };
        match self.game.as_str() {
            "ghz" => Ok(catalog::mermin_ghz()),
            "parity" => {
                let n = need(self.n, "n")?;
                build_parity_game(n, self.l.unwrap_or(1))
            }
            "extended-parity" => {
                let n = need(self.n, "n")?;
                build_parity_game(n, extended_parity_ell(n))
            }
            "dj" => build_dj_game(need(self.m, "m")?),
            "magic-square" => build_magic_square_game(),
            "matching" => build_matching_game(need(self.m, "m")?),
            "colouring" => {
                let ks = match &self.ks_file {
                    Some(path) => KSSet::from_json_file(path)?,
                    None => catalog::ks::shipped_d4_18vec(),
                };
                build_colouring_game(&ks, self.skip_ks_verification)
            }
            "boyer" => {
                let n = need(self.n, "n")?;
                let m = need(self.modulus, "modulus")?;
                build_boyer_game(n, m)
            }
            other => Err(Error::input(format!(
                "unknown game '{other}'; known games: {}",
                GAME_IDS.join(", ")
            ))),
        }
    }

    /// Whether this family has exact classical/threshold targets to print
    /// alongside computed values.
    pub fn has_paper_targets(&self) -> bool {
        matches!(self.game.as_str(), "ghz" | "parity")
    }
}
