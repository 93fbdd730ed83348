//! The `codemix` command line: `kappa`, `normalize`, `crossval`, `train`,
//! `predict` and `synth`.
//!
//! Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage errors.
//! Payloads go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{generate_synthetic, load_corpus, write_corpus, SynthConfig};
use crate::eval::{
    agreement, cross_validate, render_report, stratified_folds, CrossValOptions, ReportFormat,
};
use crate::models::{Classifier, ClassifierSpec, Model, ModelKind};
use crate::normalizer::{ClusterStats, NormalizationConfig, SkipGramConfig};

#[derive(Debug, Parser)]
#[command(
    name = "codemix",
    version,
    about = "Emotion classification for romanized Hindi-English code-mixed text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cohen's kappa between the labels of two TSV files of equal length.
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Train skip-gram embeddings, cluster spelling variants, write the map.
    Normalize {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out_map: PathBuf,
        #[command(flatten)]
        skipgram: SkipGramArgs,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
    },
    /// Stratified k-fold cross-validation of one baseline.
    Crossval {
        #[arg(long, value_parser = parse_model_kind)]
        model: ModelKind,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Normalize spelling variants, fitted on each training split.
        #[arg(long)]
        normalize: bool,
        /// Print the full JSON report instead of a table row.
        #[arg(long)]
        json: bool,
        /// Run folds on separate threads.
        #[arg(long)]
        parallel_folds: bool,
    },
    /// Fit a baseline on a corpus and write it as JSON.
    Train {
        #[arg(long, value_parser = parse_model_kind)]
        model: ModelKind,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the predicted label letter, then the distribution as JSON.
    Predict {
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        text: String,
    },
    /// Write a synthetic labeled corpus with injected spelling variants.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        size: usize,
        #[arg(long, default_value_t = 0.2)]
        variant_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct SkipGramArgs {
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    window: usize,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_model_kind(s: &str) -> Result<ModelKind, String> {
    s.parse()
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                2
            } else {
                let _ = write!(stdout, "{}", e.render());
                0
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    match command {
        Command::Kappa { a, b } => {
            let ca = load_corpus(&a)?;
            let cb = load_corpus(&b)?;
            let mismatched = ca.texts().zip(cb.texts()).filter(|(x, y)| x != y).count();
            if mismatched > 0 {
                writeln!(stderr, "warning: {mismatched} rows differ in text")?;
            }
            let r = agreement(&ca.labels(), &cb.labels())?;
            writeln!(stdout, "{}", serde_json::to_string(&r)?)?;
        }
        Command::Normalize {
            data,
            out_map,
            skipgram,
            tau,
        } => {
            let corpus = load_corpus(&data)?;
            let cfg = NormalizationConfig {
                skipgram: SkipGramConfig {
                    dim: skipgram.dim,
                    window: skipgram.window,
                    epochs: skipgram.epochs,
                    seed: skipgram.seed,
                    ..SkipGramConfig::default()
                },
                tau,
            };
            let map = cfg.fit(&corpus)?;
            map.save(&out_map)?;
            let stats = ClusterStats::from(&map);
            writeln!(stdout, "{}", serde_json::to_string(&stats)?)?;
        }
        Command::Crossval {
            model,
            data,
            folds,
            seed,
            normalize,
            json,
            parallel_folds,
        } => {
            let corpus = load_corpus(&data)?;
            let plan = stratified_folds(&corpus, folds, seed)?;
            let spec = ClassifierSpec::default_for(model);
            let options = CrossValOptions {
                normalization: normalize.then(NormalizationConfig::default),
                parallel: parallel_folds,
            };
            let report = cross_validate(&spec, &corpus, &plan, &options)?;
            let format = if json {
                ReportFormat::Json
            } else {
                ReportFormat::Table
            };
            write!(stdout, "{}", render_report(&report, format)?)?;
        }
        Command::Train {
            model,
            data,
            out,
            seed,
        } => {
            let corpus = load_corpus(&data)?;
            let fitted = ClassifierSpec::default_for(model).fit(&corpus, seed)?;
            fitted.save(&out)?;
            writeln!(stderr, "wrote {} model to {}", model, out.display())?;
        }
        Command::Predict { model_file, text } => {
            let model = Model::load(&model_file)?;
            let dist = model.predict_distribution(&text);
            writeln!(stdout, "{}", model.predict(&text))?;
            writeln!(stdout, "{}", serde_json::to_string(&dist)?)?;
        }
        Command::Synth {
            out,
            size,
            variant_rate,
            seed,
        } => {
            let cfg = SynthConfig {
                size,
                variant_rate,
                seed,
                ..SynthConfig::default()
            };
            let corpus = generate_synthetic(&cfg)?;
            write_corpus(&corpus, &out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("codemix").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_model_lists_choices() {
        let (code, out, err) = run_args(&["crossval", "--model", "bogus", "--data", "x.tsv"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        for k in ModelKind::ALL {
            assert!(err.contains(k.name()), "{err}");
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&[]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["synth", "--out", "x", "--size", "abc"]).0, 2);
        assert_eq!(run_args(&["kappa", "--a", "x", "--b", "y", "--bogus"]).0, 2);
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("crossval"));
    }

    #[test]
    fn missing_file_names_the_path() {
        let (code, out, err) =
            run_args(&["kappa", "--a", "/no/such/a.tsv", "--b", "/no/such/b.tsv"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("/no/such/a.tsv"), "{err}");
    }
}
