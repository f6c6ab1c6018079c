//! `ptlab` — command-line laboratory for pseudo-telepathy games.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 capacity error,
//! 3 certainty violation (an ideal quantum executor lost a round) or a
//! failed theorem check.

mod games;
mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ptlab_core::analysis::{
    check_framework_theorems, optimal_success_probability, optimal_success_proportion,
    random_game, RationalRepr,
};
use ptlab_core::catalog::{self, verify_ks_property, KSSet, KsVerdict};
use ptlab_core::error::Error;
use ptlab_core::harness::{
    legitimate_density, run_rounds, summarize, transcript_csv, PlayerExecutor, QuestionMode,
    RunOptions,
};
use ptlab_core::imperfect::{
    efficiency_threshold, noise_threshold, optimal_errorfree_classical, sweep, total_detectors,
    EfficiencyParams, NoiseParams, SweepParam,
};

use games::GameSelector;

const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Parser)]
#[command(name = "ptlab", version, about = "Pseudo-telepathy game laboratory")]
struct Cli {
    /// Worker threads for parallel evaluation (default: PTLAB_THREADS or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the game families with their known constants
    List {
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Show one game's structure: alphabets, promise size, density, strategy
    Describe {
        #[command(flatten)]
        selector: GameSelector,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Run referee rounds against an executor and report statistics
    Play {
        #[command(flatten)]
        selector: GameSelector,
        #[arg(long)]
        rounds: u64,
        #[arg(long, value_enum, default_value_t = StrategyKind::Quantum)]
        strategy: StrategyKind,
        /// Detector correctness p for noisy-quantum
        #[arg(long)]
        noise_p: Option<f64>,
        /// Detector efficiency η for noisy-quantum
        #[arg(long)]
        efficiency: Option<f64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Uniform)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        /// Write the machine-readable statistics to this path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a per-round CSV transcript to this path
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Exact classical bounds: ω̃ by enumeration, ω by rational LP
    Analyze {
        #[command(flatten)]
        selector: GameSelector,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detector thresholds p* and η*
    Thresholds {
        #[command(flatten)]
        selector: GameSelector,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot-ready CSV sweep of a detector imperfection parameter
    Sweep {
        #[command(flatten)]
        selector: GameSelector,
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long, default_value_t = 0.5)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a Kochen-Specker set file (default: the shipped d=4 set)
    VerifyKs {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Run the framework theorems over the in-cap catalog and random games
    CheckTheorems {
        #[arg(long, default_value_t = 20)]
        random_games: u64,
        #[arg(long, default_value_t = 8)]
        mixed_samples: usize,
        #[arg(long, default_value_t = 1000)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyKind {
    Quantum,
    ClassicalBest,
    NoisyQuantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Uniform,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParamArg {
    P,
    Eta,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion
            {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("PTLAB_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        let _ = rayon_pool(threads);
    }
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Capacity { .. } => 2,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

fn rayon_pool(threads: usize) -> Result<(), Box<dyn std::error::Error>> {
    ptlab_core::build_thread_pool(threads)?;
    Ok(())
}

fn write_out(out: &Option<PathBuf>, content: &str) -> ptlab_core::Result<()> {
    if let Some(path) = out {
        let mut f = std::fs::File::create(path)?;
        f.write_all(content.as_bytes())?;
    }
    Ok(())
}

fn run(command: Command) -> ptlab_core::Result<i32> {
    match command {
        Command::List { format } => {
            let families = catalog::families();
            match format {
                Format::Human => {
                    for f in &families {
                        println!(
                            "{:<16} players {:<4} {:<44} {:<36} {}",
                            f.id, f.players, f.parameters, f.omega_tilde, f.thresholds
                        );
                    }
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        id: &'a str,
                        players: &'a str,
                        parameters: &'a str,
                        omega_tilde: &'a str,
                        thresholds: &'a str,
                        notes: &'a str,
                    }
                    let rows: Vec<Row> = families
                        .iter()
                        .map(|f| Row {
                            id: f.id,
                            players: f.players,
                            parameters: f.parameters,
                            omega_tilde: f.omega_tilde,
                            thresholds: f.thresholds,
                            notes: f.notes,
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&rows)?);
                }
            }
            Ok(0)
        }

        Command::Describe {
            selector,
            cap,
            format,
        } => {
            let (game, qs) = selector.build()?;
            let questions = game.legitimate_questions(cap).map(|q| q.len()).ok();
            let density = legitimate_density(&game, cap).ok();
            #[derive(Serialize)]
            struct Description {
                game: String,
                params: BTreeMap<String, i64>,
                players: usize,
                input_alphabet_sizes: Vec<usize>,
                output_alphabet_sizes: Vec<usize>,
                legitimate_questions: Option<usize>,
                legitimate_density: Option<RationalRepr>,
                register_dimensions: Vec<usize>,
                initial_state: String,
                detectors: Option<usize>,
            }
            let d = Description {
                game: game.name().to_string(),
                params: game.params().clone(),
                players: game.n_players(),
                input_alphabet_sizes: game.input_sizes().to_vec(),
                output_alphabet_sizes: game.output_sizes().to_vec(),
                legitimate_questions: questions,
                legitimate_density: density.as_ref().map(RationalRepr::from),
                register_dimensions: (0..game.n_players())
                    .map(|p| qs.layout().player_dim(p))
                    .collect(),
                initial_state: format!("{:?}", qs.initial_descriptor()),
                detectors: total_detectors(&game, &qs).ok(),
            };
            match format {
                Format::Human => output::describe_human(&d.game, &d),
                Format::Json => println!("{}", serde_json::to_string_pretty(&d)?),
            }
            Ok(0)
        }

        Command::Play {
            selector,
            rounds,
            strategy,
            noise_p,
            efficiency,
            mode,
            seed,
            cap,
            format,
            out,
            transcript,
        } => {
            let (game, qs) = selector.build()?;
            let run_mode = match mode {
                ModeArg::Uniform => QuestionMode::UniformOverPromise,
                ModeArg::Product => QuestionMode::IndependentProduct,
            };
            let opts = RunOptions {
                rounds,
                mode: run_mode,
                seed,
                cap,
                transcript: transcript.is_some(),
            };
            // the classical bound feeds the p-value and verdict; large games
            // may exceed the cap, in which case the summary omits it
            let bounds = optimal_success_proportion(&game, cap).ok();
            let best;
            let noise = noise_p.map(NoiseParams::new).transpose()?;
            let eff = efficiency.map(EfficiencyParams::new).transpose()?;
            let executor = match strategy {
                StrategyKind::Quantum => {
                    if noise.is_some() || eff.is_some() {
                        return Err(Error::input(
                            "--noise-p/--efficiency need --strategy noisy-quantum",
                        ));
                    }
                    PlayerExecutor::Quantum(&qs)
                }
                StrategyKind::ClassicalBest => {
                    best = optimal_success_proportion(&game, cap)?;
                    PlayerExecutor::Classical(&best.best_strategy)
                }
                StrategyKind::NoisyQuantum => {
                    if noise.is_none() && eff.is_none() {
                        return Err(Error::input(
                            "noisy-quantum needs --noise-p and/or --efficiency",
                        ));
                    }
                    PlayerExecutor::NoisyQuantum {
                        strategy: &qs,
                        noise,
                        efficiency: eff,
                    }
                }
            };
            let (mut stats, rows) = run_rounds(&game, &executor, &opts)?;
            let summary = summarize(&mut stats, bounds.as_ref())?;
            if let Some(path) = &transcript {
                write_out(&Some(path.clone()), &transcript_csv(&rows))?;
            }
            #[derive(Serialize)]
            struct PlayReport {
                stats: ptlab_core::harness::TrialStatistics,
                summary: ptlab_core::harness::Summary,
            }
            let report = PlayReport {
                stats: stats.clone(),
                summary: summary.clone(),
            };
            let json = serde_json::to_string_pretty(&report)?;
            write_out(&out, &json)?;
            match format {
                Format::Human => output::play_human(&stats, &summary),
                Format::Json => println!("{json}"),
            }
            if strategy == StrategyKind::Quantum && stats.losses > 0 {
                eprintln!(
                    "certainty violation: ideal quantum executor lost {} round(s)",
                    stats.losses
                );
                return Ok(3);
            }
            Ok(0)
        }

        Command::Analyze {
            selector,
            cap,
            format,
            out,
        } => {
            let (game, _) = selector.build()?;
            let bounds = optimal_success_probability(&game, cap)?;
            let report = bounds.report(&game);
            let json = serde_json::to_string_pretty(&report)?;
            write_out(&out, &json)?;
            match format {
                Format::Human => output::bounds_human(&report),
                Format::Json => println!("{json}"),
            }
            Ok(0)
        }

        Command::Thresholds {
            selector,
            cap,
            format,
            out,
        } => {
            let (game, qs) = selector.build()?;
            let mut notes: Vec<String> = Vec::new();
            if !selector.has_paper_targets() {
                notes.push(
                    "no exact reference values are known for this family; thresholds are \
                     computed, not asserted"
                        .to_string(),
                );
            }
            if selector.game == "extended-parity" {
                if let Some(n) = selector.n {
                    notes.push(format!("known bound: η* ≤ 8/{n}"));
                }
            }
            let omega = match optimal_success_probability(&game, cap) {
                Ok(b) => Some(b.omega.expect("LP ran")),
                Err(Error::Capacity { what, required, cap }) => {
                    notes.push(format!("ω unavailable: {what} needs {required} > cap {cap}"));
                    None
                }
                Err(e) => return Err(e),
            };
            let errorfree = match optimal_errorfree_classical(&game, cap) {
                Ok(v) => Some(v.value),
                Err(Error::Capacity { what, required, cap }) => {
                    notes.push(format!(
                        "error-free value unavailable: {what} needs {required} > cap {cap}"
                    ));
                    None
                }
                Err(e) => return Err(e),
            };
            let p_star = match &omega {
                Some(w) => match noise_threshold(&game, &qs, w, cap) {
                    Ok(outcome) => serde_json::to_value(&outcome)?,
                    Err(Error::UnsupportedModel(msg)) => {
                        serde_json::json!({ "outcome": "unsupported", "reason": msg })
                    }
                    Err(e) => return Err(e),
                },
                None => serde_json::json!({ "outcome": "unavailable", "reason": "ω not computed" }),
            };
            let eta_star = match &errorfree {
                Some(v) => match efficiency_threshold(&game, &qs, v, cap) {
                    Ok(outcome) => serde_json::to_value(&outcome)?,
                    Err(Error::UnsupportedModel(msg)) => {
                        serde_json::json!({ "outcome": "unsupported", "reason": msg })
                    }
                    Err(e) => return Err(e),
                },
                None => serde_json::json!({
                    "outcome": "unavailable",
                    "reason": "error-free classical value not computed"
                }),
            };
            #[derive(Serialize)]
            struct ThresholdsReport {
                game: String,
                params: BTreeMap<String, i64>,
                detectors: Option<usize>,
                omega: Option<RationalRepr>,
                errorfree_value: Option<RationalRepr>,
                p_star: serde_json::Value,
                eta_star: serde_json::Value,
                notes: Vec<String>,
            }
            let report = ThresholdsReport {
                game: game.name().to_string(),
                params: game.params().clone(),
                detectors: total_detectors(&game, &qs).ok(),
                omega: omega.as_ref().map(RationalRepr::from),
                errorfree_value: errorfree.as_ref().map(RationalRepr::from),
                p_star,
                eta_star,
                notes,
            };
            let json = serde_json::to_string_pretty(&report)?;
            write_out(&out, &json)?;
            match format {
                Format::Human => output::thresholds_human(&json),
                Format::Json => println!("{json}"),
            }
            Ok(0)
        }

        Command::Sweep {
            selector,
            param,
            from,
            to,
            step,
            cap,
            out,
        } => {
            let (game, qs) = selector.build()?;
            let (sweep_param, bound) = match param {
                ParamArg::P => {
                    let b = optimal_success_probability(&game, cap)?;
                    (SweepParam::NoiseP, b.omega.expect("LP ran"))
                }
                ParamArg::Eta => {
                    let v = optimal_errorfree_classical(&game, cap)?;
                    (SweepParam::EfficiencyEta, v.value)
                }
            };
            let rows = sweep(&game, &qs, sweep_param, from, to, step, &bound, cap)?;
            let mut csv = String::from(
                "game,param_name,param_value,quantum_win,quantum_draw,classical_bound\n",
            );
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.game, r.param_name, r.param_value, r.quantum_win, r.quantum_draw,
                    r.classical_bound
                ));
            }
            write_out(&out, &csv)?;
            if out.is_none() {
                print!("{csv}");
            }
            Ok(0)
        }

        Command::VerifyKs { file, format } => {
            let ks = match &file {
                Some(path) => KSSet::from_json_file(path)?,
                None => catalog::ks::shipped_d4_18vec(),
            };
            let verdict = verify_ks_property(&ks);
            match format {
                Format::Human => match &verdict {
                    KsVerdict::NonColourable { nodes_explored } => println!(
                        "non-colourable: {} vectors, {} contexts, search exhausted after {} nodes",
                        ks.n_vectors(),
                        ks.contexts.len(),
                        nodes_explored
                    ),
                    KsVerdict::Colourable { witness } => {
                        let ones: Vec<String> = witness
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| c)
                            .map(|(i, _)| format!("v{i}"))
                            .collect();
                        println!(
                            "colourable: witness assigns colour 1 to {{{}}}",
                            ones.join(",")
                        );
                    }
                },
                Format::Json => {
                    let value = match &verdict {
                        KsVerdict::NonColourable { nodes_explored } => serde_json::json!({
                            "verdict": "non-colourable",
                            "vectors": ks.n_vectors(),
                            "contexts": ks.contexts.len(),
                            "nodes_explored": nodes_explored,
                        }),
                        KsVerdict::Colourable { witness } => serde_json::json!({
                            "verdict": "colourable",
                            "witness": witness,
                        }),
                    };
                    println!("{}", serde_json::to_string_pretty(&value)?);
                }
            }
            Ok(0)
        }

        Command::CheckTheorems {
            random_games,
            mixed_samples,
            rounds,
            seed,
            cap,
            format,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut targets: Vec<(String, ptlab_core::game::Game)> = Vec::new();
            for (label, built) in catalog_in_cap(cap)? {
                targets.push((label, built));
            }
            for i in 0..random_games {
                let g = random_game(&mut rng, &format!("random-{i}"));
                targets.push((format!("random-{i}"), g));
            }
            let mut all_ok = true;
            let mut reports = Vec::new();
            for (label, game) in &targets {
                let report = check_framework_theorems(game, cap, &mut rng, mixed_samples, rounds)?;
                if !report.all_passed() {
                    all_ok = false;
                }
                if format == Format::Human {
                    for c in &report.checks {
                        println!(
                            "{label}: {} — {} ({})",
                            c.name,
                            if c.passed { "pass" } else { "FAIL" },
                            c.detail
                        );
                    }
                }
                reports.push((label.clone(), report));
            }
            if format == Format::Json {
                let value: Vec<serde_json::Value> = reports
                    .iter()
                    .map(|(label, r)| {
                        serde_json::json!({ "game": label, "checks": r.checks, "all_passed": r.all_passed() })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&value)?);
            } else if all_ok {
                println!("all framework theorems hold on {} games", targets.len());
            }
            Ok(if all_ok { 0 } else { 3 })
        }
    }
}

/// The catalog instances whose strategy spaces fit the given cap.
fn catalog_in_cap(cap: u64) -> ptlab_core::Result<Vec<(String, ptlab_core::game::Game)>> {
    use ptlab_core::catalog as cat;
    let candidates: Vec<(String, ptlab_core::Result<(ptlab_core::game::Game, _)>)> = vec![
        ("ghz".into(), Ok(cat::mermin_ghz())),
        ("parity n=4".into(), cat::build_parity_game(4, 1)),
        ("parity n=5".into(), cat::build_parity_game(5, 1)),
        ("dj m=1".into(), cat::build_dj_game(1)),
        ("magic-square".into(), cat::build_magic_square_game()),
        ("matching m=2".into(), cat::build_matching_game(2)),
        ("boyer n=3 M=2".into(), cat::build_boyer_game(3, 2)),
    ];
    let mut out = Vec::new();
    for (label, built) in candidates {
        let (game, _) = built?;
        // skip games whose profile space exceeds the cap
        if ptlab_core::analysis::profile_space_size(&game) <= cap as u128 {
            out.push((label, game));
        }
    }
    Ok(out)
}
