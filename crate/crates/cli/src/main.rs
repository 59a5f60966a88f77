use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use tcgen_core::pipeline::{self, PipelineError};
use tcgen_core::{MatchingMode, PipelineConfig, PromptTarget, Split};

/// Retrieval-augmented test code generation for TestBegin/TestEnd corpora.
#[derive(Parser)]
#[command(name = "tcgen", version)]
struct Cli {
    /// TOML configuration file. Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log progress and diagnostics (repeat for more detail).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Paths {
    /// Repository root to scan (repeatable; replaces configured roots).
    #[arg(long = "root")]
    roots: Vec<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    index: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the repository and write the code graph.
    Analyze {
        #[command(flatten)]
        paths: Paths,
    },
    /// Embed every test block description and write the index.
    Index {
        #[command(flatten)]
        paths: Paths,
    },
    /// Generate code for an existing block or a new test description.
    Generate {
        #[command(flatten)]
        paths: Paths,
        #[arg(long, conflicts_with_all = ["tcbd", "file"])]
        block_id: Option<String>,
        #[arg(long, requires = "file")]
        tcbd: Option<String>,
        /// Source file the new step belongs to.
        #[arg(long, requires = "tcbd")]
        file: Option<String>,
        /// Containing class; defaults to the file's first class.
        #[arg(long, requires = "tcbd")]
        class: Option<String>,
        /// Print the prompt before the generated code.
        #[arg(long)]
        show_prompt: bool,
        #[arg(long)]
        llm_url: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Generate for a split and score method-invocation F1.
    Evaluate {
        #[command(flatten)]
        paths: Paths,
        #[arg(long, default_value = "test")]
        split: Split,
        /// Approach name shown in the report table.
        #[arg(long, default_value = "RAG")]
        label: String,
        #[arg(long)]
        report_dir: Option<PathBuf>,
        #[arg(long)]
        llm_url: Option<String>,
        #[arg(long)]
        matching_mode: Option<Mode>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export the instruction fine-tuning dataset and training config.
    ExportIft {
        #[command(flatten)]
        paths: Paths,
        #[arg(long, default_value = "train")]
        split: Split,
        #[arg(long)]
        dataset_dir: Option<PathBuf>,
        /// Training config override, e.g. `--set r=64` (repeatable).
        #[arg(long = "set", value_parser = parse_kv)]
        overrides: Vec<(String, String)>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    SimpleName,
    Qualified,
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// A run that finished but left some blocks unprocessed.
struct Partial(String);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Partial(msg))) => {
            eprintln!("partial: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => Ok(PipelineConfig::load(p)?),
        None => Ok(PipelineConfig::default()),
    }
}

fn apply_paths(cfg: &mut PipelineConfig, paths: &Paths) {
    if !paths.roots.is_empty() {
        cfg.repo_roots = paths.roots.clone();
    }
    if let Some(g) = &paths.graph {
        cfg.graph_path = g.clone();
    }
    if let Some(i) = &paths.index {
        cfg.index_path = i.clone();
    }
}

fn run(cli: Cli) -> Result<Option<Partial>> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Analyze { paths } => {
            apply_paths(&mut cfg, &paths);
            let s = pipeline::run_analyze(&cfg)?;
            println!(
                "files={} classes={} methods={} blocks={} owns_edges={} invokes_edges={}",
                s.files, s.classes, s.methods, s.blocks, s.owns_edges, s.invokes_edges
            );
            println!("skipped={} diagnostics={}", s.skipped.len(), s.diagnostics.len());
            for d in &s.skipped {
                println!("  {d}");
            }
            println!("graph: {}", cfg.graph_path.display());
            Ok(None)
        }
        Command::Index { paths } => {
            apply_paths(&mut cfg, &paths);
            let s = pipeline::run_index(&cfg)?;
            println!("entries={} dim={} embedder={}", s.entries, s.dim, s.embedder_id);
            println!("index: {}", cfg.index_path.display());
            Ok(None)
        }
        Command::Generate {
            paths,
            block_id,
            tcbd,
            file,
            class,
            show_prompt,
            llm_url,
            budget,
            k,
        } => {
            apply_paths(&mut cfg, &paths);
            if let Some(u) = llm_url {
                cfg.llm.base_url = u;
            }
            if let Some(b) = budget {
                cfg.budget.max_tokens = b;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            cfg.validate().map_err(anyhow::Error::msg)?;
            let target = match (block_id, tcbd, file) {
                (Some(id), None, None) => PromptTarget::Block(id),
                (None, Some(tcbd), Some(path)) => PromptTarget::NewStep { tcbd, path, class },
                _ => bail!("give either --block-id, or --tcbd with --file"),
            };
            let (bundle, result) = pipeline::run_generate(&cfg, &target)?;
            if show_prompt {
                println!("<s>{}", bundle.rendered);
                println!("--- tokens={} truncated={}", bundle.token_estimate, bundle.truncation.applied());
            }
            println!("{}", result.extracted_code);
            Ok(None)
        }
        Command::Evaluate {
            paths,
            split,
            label,
            report_dir,
            llm_url,
            matching_mode,
            budget,
            k,
            seed,
        } => {
            apply_paths(&mut cfg, &paths);
            if let Some(d) = report_dir {
                cfg.report_dir = d;
            }
            if let Some(u) = llm_url {
                cfg.llm.base_url = u;
            }
            if let Some(m) = matching_mode {
                cfg.matching_mode = match m {
                    Mode::SimpleName => MatchingMode::SimpleName,
                    Mode::Qualified => MatchingMode::Qualified,
                };
            }
            if let Some(b) = budget {
                cfg.budget.max_tokens = b;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(s) = seed {
                cfg.split.seed = s;
            }
            cfg.validate().map_err(anyhow::Error::msg)?;
            let out = pipeline::run_evaluate(&cfg, split, &label)?;
            print!("{}", tcgen_core::eval::render_table(&[&out.report]));
            println!("report: {}", out.report_dir.display());
            if out.partial() {
                return Ok(Some(Partial(format!(
                    "{} of {} blocks failed; see {}",
                    out.report.failures.len(),
                    out.report.failures.len() + out.report.blocks_evaluated,
                    out.json_path.display()
                ))));
            }
            Ok(None)
        }
        Command::ExportIft {
            paths,
            split,
            dataset_dir,
            overrides,
            budget,
            seed,
        } => {
            apply_paths(&mut cfg, &paths);
            if let Some(d) = dataset_dir {
                cfg.dataset_dir = d;
            }
            if let Some(b) = budget {
                cfg.budget.max_tokens = b;
            }
            if let Some(s) = seed {
                cfg.split.seed = s;
            }
            cfg.validate().map_err(anyhow::Error::msg)?;
            let out = pipeline::run_export_ift(&cfg, split, &overrides).map_err(|e| match e {
                PipelineError::Ift(tcgen_core::ift::IftError::TestSplit) => {
                    anyhow::anyhow!("refusing to export the test split: it is held out for evaluation")
                }
                other => other.into(),
            })?;
            let s = &out.summary;
            println!(
                "split={} selected={} written={} skipped_over_budget={}",
                s.split, s.selected, s.written, s.skipped_over_budget
            );
            if s.written == 0 {
                println!("all records exceeded the context length");
            }
            println!("dataset: {}", out.dataset_path.display());
            println!("train config: {}", out.config_path.display());
            Ok(None)
        }
    }
}
