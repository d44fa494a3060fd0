//! The simulate, parse, and analyze commands.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use gtp_core::analysis;
use gtp_core::game::{run, szilard_work, Trajectory, WorkLedger};
use gtp_core::lz::ParseState;
use gtp_core::markov::{entropy_rate, stationary_default, Distribution};
use gtp_core::word::text_is_zero_based;
use gtp_core::{Alphabet, Word};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Simulation summary, serialized as the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub horizon: usize,
    pub seed: u64,
    pub final_log_capital: f64,
    /// ln K_n / n.
    pub rate: f64,
    pub final_banked: f64,
    pub compression_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub work_joules: Option<f64>,
}

/// Runs one configured game, writes the trajectory CSV and summary JSON
/// when paths are configured, and returns the summary.
pub fn cmd_simulate(config: &ExperimentConfig, seed_flag: Option<u64>) -> Result<Summary, CliError> {
    let seed = config.resolve_seed(seed_flag)?;
    let forecaster = config.build_forecaster()?;
    let mut skeptic = config.build_skeptic()?;
    let mut reality = config.build_reality(seed)?;
    let trajectory = run(
        &forecaster,
        skeptic.as_mut(),
        reality.as_mut(),
        config.horizon,
    )?;

    let ledger = match config.build_szilard()? {
        Some(szilard) => Some(szilard_work(&trajectory, &szilard)?),
        None => None,
    };

    if let Some(path) = &config.trajectory_csv {
        write_trajectory_csv(path, &trajectory, ledger.as_ref())?;
    }

    let n = trajectory.len();
    let entropy = match forecaster.kernel() {
        Some(kernel) => {
            let pi = stationary_default(kernel)?;
            Some(entropy_rate(kernel, &pi))
        }
        None => None,
    };
    let summary = Summary {
        horizon: n,
        seed,
        final_log_capital: trajectory.final_log_capital(),
        rate: if n > 0 {
            trajectory.final_log_capital() / n as f64
        } else {
            0.0
        },
        final_banked: trajectory.final_banked(),
        compression_rate: analysis::compression_rate(&trajectory.outcomes()),
        entropy_rate: entropy,
        work_joules: ledger.as_ref().map(|l| l.work_joules(n)),
    };

    if let Some(path) = &config.summary_json {
        let mut file = fs::File::create(path)
            .map_err(|e| format!("cannot create summary {}: {e}", path.display()))?;
        serde_json::to_writer_pretty(&mut file, &summary)?;
        file.write_all(b"\n")?;
    }
    Ok(summary)
}

fn write_trajectory_csv(
    path: &Path,
    trajectory: &Trajectory,
    ledger: Option<&WorkLedger>,
) -> Result<(), CliError> {
    let a = trajectory.alphabet.size();
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| format!("cannot create trajectory {}: {e}", path.display()))?;
    let mut header = vec!["step".to_string(), "outcome".to_string()];
    header.extend((1..=a).map(|i| format!("forecast_{i}")));
    header.extend((1..=a).map(|i| format!("q_{i}")));
    header.push("log_capital".into());
    header.push("banked".into());
    if ledger.is_some() {
        header.push("work_joules".into());
    }
    writer.write_record(&header)?;
    for (i, rec) in trajectory.steps.iter().enumerate() {
        let mut row = vec![(i + 1).to_string(), (rec.outcome as usize + 1).to_string()];
        row.extend(rec.forecast.iter().map(|p| format!("{p:.17}")));
        row.extend(rec.q.iter().map(|q| format!("{q:.17}")));
        row.push(format!("{:.17}", rec.log_capital));
        row.push(format!("{:.17}", rec.banked));
        if let Some(ledger) = ledger {
            row.push(format!("{:.17e}", ledger.work_joules(i + 1)));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Parse report: the slash decomposition, the number of completed
/// phrases, and the candidate-set size after the whole word.
#[derive(Debug, Clone, Serialize)]
pub struct ParseReport {
    pub decomposition: String,
    pub complexity: u64,
    pub candidate_set_size: u64,
}

/// Parses a serialized word, echoing the input's digit convention in
/// the decomposition.
pub fn cmd_parse(text: &str, alphabet: Alphabet) -> Result<ParseReport, CliError> {
    let text = text.trim();
    let word = Word::parse(text, alphabet)?;
    let zero_based = text_is_zero_based(text);
    let mut state = ParseState::new(alphabet);
    for &s in word.symbols() {
        state.feed(s);
    }
    let outcome = gtp_core::lz::parse(&word);
    Ok(ParseReport {
        decomposition: outcome.decomposition(zero_based),
        complexity: outcome.complexity,
        candidate_set_size: state.trie().candidate_set_size(),
    })
}

/// Analysis report over one word.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub c: u64,
    pub v_size: u64,
    pub rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficiency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fisher: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub boundary_term: f64,
    pub weighted_kl: f64,
    pub total: f64,
}

/// Computes the analysis report. `reference` defaults to uniform;
/// `kernel_file` enables the divergence decomposition; `len` is the
/// context length for the decomposition and the slack bound.
pub fn cmd_analyze(
    text: &str,
    alphabet: Alphabet,
    reference: Option<Vec<f64>>,
    kernel_file: Option<&Path>,
    len: usize,
) -> Result<AnalyzeReport, CliError> {
    let word = Word::parse(text.trim(), alphabet)?;
    let p = match reference {
        Some(probs) => Distribution::new(probs)?,
        None => Distribution::uniform(alphabet),
    };
    let mut state = ParseState::new(alphabet);
    for &s in word.symbols() {
        state.feed(s);
    }
    let decomposition = match kernel_file {
        None => None,
        Some(path) => {
            let kernel = crate::config::load_kernel(path, alphabet)?;
            let forecaster = gtp_core::game::Forecaster::markov_stationary_start(kernel)?;
            let d = analysis::divergence_decomposition(&word, &forecaster, len)?;
            Some(DecompositionReport {
                boundary_term: d.boundary_term,
                weighted_kl: d.weighted_kl,
                total: d.total,
            })
        }
    };
    Ok(AnalyzeReport {
        c: state.complexity(),
        v_size: state.trie().candidate_set_size(),
        rate: analysis::compression_rate(&word),
        decomposition,
        delta_bound: if len < word.len() {
            Some(analysis::ziv_delta_bound(&word, len)?)
        } else {
            None
        },
        deficiency: if word.is_empty() {
            None
        } else {
            Some(analysis::ld_deficiency(&word, &p)?)
        },
        fisher: if word.len() >= 2 {
            Some(analysis::fisher_statistic(&word, &p)?)
        } else {
            None
        },
    })
}
