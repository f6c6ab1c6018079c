//! Human-readable renderings. Plain text, no colour or TTY detection, so
//! goldens stay byte-stable.

use ptlab_core::analysis::BoundsReport;
use ptlab_core::harness::{Summary, TrialStatistics, Verdict};
use serde::Serialize;

pub fn describe_human<T: Serialize>(name: &str, description: &T) {
    println!("game: {name}");
    let value = serde_json::to_value(description).expect("description serializes");
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            if k == "game" {
                continue;
            }
            println!("  {k}: {}", compact(&v));
        }
    }
}

fn compact(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Object(map) => {
            if let (Some(num), Some(den)) = (map.get("num"), map.get("den")) {
                let approx = map
                    .get("approx")
                    .and_then(|a| a.as_f64())
                    .map(|a| format!(" ({a:.6})"))
                    .unwrap_or_default();
                return format!("{}/{}{approx}", trim(num), trim(den));
            }
            serde_json::to_string(v).expect("serializes")
        }
        other => trim(other),
    }
}

fn trim(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn play_human(stats: &TrialStatistics, summary: &Summary) {
    println!(
        "{}: {} rounds, {} legitimate (post-selected), seed {}",
        stats.game, stats.rounds_total, stats.rounds_legitimate, stats.seed
    );
    println!(
        "  wins {}  draws {}  losses {}",
        stats.wins, stats.draws, stats.losses
    );
    println!(
        "  rates: win {:.4}  draw {:.4}  loss {:.4}",
        summary.win_rate, summary.draw_rate, summary.loss_rate
    );
    if let Some(omega_tilde) = &summary.omega_tilde {
        println!(
            "  classical bound ω̃ = {}/{} ({:.6})",
            omega_tilde.num, omega_tilde.den, omega_tilde.approx
        );
    }
    if let Some(p) = &summary.pvalue_bound {
        println!("  classical p-value bound ≤ {:.3e}", p.approx);
    }
    let verdict = match summary.verdict {
        Verdict::QuantumConsistent => "quantum-consistent",
        Verdict::ClassicalPossible => "classical-possible",
        Verdict::Inconclusive => "inconclusive",
    };
    println!("  verdict: {verdict}");
    println!("  note: {}", summary.assumption);
}

pub fn bounds_human(report: &BoundsReport) {
    println!("game: {} {:?}", report.game, report.params);
    println!(
        "  omega_tilde {}/{} ({:.6})",
        report.omega_tilde.num, report.omega_tilde.den, report.omega_tilde.approx
    );
    match &report.omega {
        Some(w) => println!("  omega       {}/{} ({:.6})", w.num, w.den, w.approx),
        None => println!("  omega       (not computed)"),
    }
    println!("  strategy space: {} profiles", report.strategy_space_size);
    println!("  legitimate questions: {}", report.n_questions);
    println!("  witness (per player, per input):");
    for (player, table) in report.witness.iter().enumerate() {
        println!("    player {player}: {}", table.join(" "));
    }
}

pub fn thresholds_human(json: &str) {
    // the JSON report is already the full story; render its fields line by line
    let value: serde_json::Value = serde_json::from_str(json).expect("own JSON parses");
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            println!("{k}: {}", compact(&v));
        }
    }
}
