use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fiblang_core::Id;
use fiblang_scenario::load::build;
use fiblang_scenario::{explain, export_dot, run, RunOptions, ScenarioError, Source, View};

#[derive(Parser)]
#[command(
    name = "fiblang",
    version,
    about = "Run and inspect vocabulary-acquisition scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Collage bound for paraphrasis events that do not set one.
    #[arg(long, global = true)]
    bound: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every event and check every assertion.
    Run {
        scenario: PathBuf,
        /// Write the canonical JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check references and declarations without running events.
    Validate { scenario: PathBuf },
    /// Render a speaker's language or total category as DOT.
    ExportDot {
        scenario: PathBuf,
        #[arg(long)]
        speaker: String,
        #[arg(long, value_enum, default_value = "language")]
        view: ViewArg,
        /// Number of events to apply first (default: all).
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Validate a declared explanation for a speaker.
    Explain {
        scenario: PathBuf,
        #[arg(long)]
        speaker: String,
        #[arg(long)]
        explanation: String,
        #[arg(long)]
        stage: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Language,
    Total,
}

fn fail(e: ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn write(out: &str, to: Option<&PathBuf>) -> Result<(), ScenarioError> {
    match to {
        Some(path) => std::fs::write(path, out).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions { bound: cli.bound };
    let result = match cli.command {
        Command::Run { scenario, report } => Source::read(&scenario)
            .and_then(|src| run(&src, opts))
            .and_then(|r| {
                write(&r.to_canonical_string(), report.as_ref())?;
                if let Some(f) = &r.failure {
                    eprintln!("FAILED: {f}");
                    return Ok(ExitCode::from(1));
                }
                Ok(ExitCode::SUCCESS)
            }),
        Command::Validate { scenario } => Source::read(&scenario).and_then(|src| {
            let d = build(&src)?;
            println!(
                "ok: {} categories, {} speakers, {} explanations, {} events, {} assertions",
                d.categories.len(),
                d.speakers.len(),
                src.scenario.explanations.len(),
                src.scenario.events.len(),
                src.scenario.assertions.len()
            );
            Ok(ExitCode::SUCCESS)
        }),
        Command::ExportDot {
            scenario,
            speaker,
            view,
            stage,
        } => Source::read(&scenario).and_then(|src| {
            let view = match view {
                ViewArg::Language => View::Language,
                ViewArg::Total => View::Total,
            };
            print!(
                "{}",
                export_dot(&src, &Id::from(speaker), view, stage, opts)?
            );
            Ok(ExitCode::SUCCESS)
        }),
        Command::Explain {
            scenario,
            speaker,
            explanation,
            stage,
        } => Source::read(&scenario).and_then(|src| {
            let s = explain(
                &src,
                &Id::from(speaker),
                &Id::from(explanation),
                stage,
                opts,
            )?;
            print!(
                "{}",
                fiblang_core::json::to_canonical_string(&s).expect("serializable")
            );
            Ok(ExitCode::SUCCESS)
        }),
    };
    result.unwrap_or_else(fail)
}
