// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lcn_core::pipeline::{self, AnalyzeConfig, ConfigFile, DetectConfig};
use lcn_core::synth::{self, ScenarioConfig};
use lcn_core::Error;

#[derive(Parser)]
#[command(name = "lcn", version, about = "Coordinated account group detection over post corpora")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a corpus and report statistics.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Write every extracted interaction as TSV.
        #[arg(long)]
        dump_interactions: Option<PathBuf>,
    },
    /// Build the LCN and extract HCCs.
    Detect(DetectArgs),
    /// Produce validation reports for a detect run.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic corpus with implanted groups.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Place episodes across window boundaries.
        #[arg(long)]
        straddle: bool,
    },
    /// Pairwise precision/recall/F1 of a membership file against truth.
    Score {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        membership: PathBuf,
    },
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Window width in minutes.
    #[arg(long)]
    gamma: Option<u64>,
    /// Comma-separated criteria, e.g. co_retweet,co_hashtag.
    #[arg(long)]
    criteria: Option<String>,
    /// fsa_v, knn or threshold.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    threshold_fraction: Option<f64>,
    /// Skip key groups larger than this; 0 disables the cap.
    #[arg(long)]
    max_group_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Final HCC filter uses `>`; pass false for `>=`.
    #[arg(long)]
    final_filter_strict: Option<bool>,
    /// Also write GraphML next to each LCN edge list.
    #[arg(long)]
    graphml: bool,
    /// Extra path for the merged LCN edge list.
    #[arg(long)]
    dump_lcn: Option<PathBuf>,
    /// Write extracted interactions to interactions.tsv.
    #[arg(long)]
    dump_interactions: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    detect_dir: Option<PathBuf>,
    /// Corpus to analyse; defaults to the detect run's input.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    random_baseline: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// daily or weekly.
    #[arg(long)]
    bucket: Option<String>,
    #[arg(long)]
    binary_ngrams: bool,
}

fn merged(config: &Option<PathBuf>, flags: ConfigFile) -> Result<ConfigFile, Error> {
    Ok(match config {
        Some(p) => flags.or(ConfigFile::load(p)?),
        None => flags,
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest { input, dump_interactions } => {
            let corpus = pipeline::read_corpus(&input)?;
            let stats = pipeline::corpus_stats(&corpus.posts);
            let interactions = lcn_core::interaction::extract_all(&corpus.posts);
            println!("posts\t{}", stats.posts);
            println!("reposts\t{} ({:.1}%)", stats.reposts, stats.repost_percent);
            println!("accounts\t{}", stats.accounts);
            println!("days\t{}", stats.days);
            println!("posts_per_account_per_day\t{:.3}", stats.posts_per_account_per_day);
            println!("reposts_per_account_per_day\t{:.3}", stats.reposts_per_account_per_day);
            println!("interactions\t{}", interactions.len());
            println!("malformed_lines\t{}", corpus.malformed.len());
            if let Some(path) = dump_interactions {
                pipeline::write_interactions(&interactions, &path)?;
            }
        }
        Command::Detect(a) => {
            let flags = ConfigFile {
                input: a.input,
                out: a.out,
                gamma: a.gamma,
                criteria: a.criteria,
                max_group_size: a.max_group_size,
                method: a.method,
                theta: a.theta,
                threshold_fraction: a.threshold_fraction,
                seed: a.seed,
                final_filter_strict: a.final_filter_strict,
                graphml: a.graphml.then_some(true),
                dump_lcn: a.dump_lcn,
                dump_interactions: a.dump_interactions.then_some(true),
                ..ConfigFile::default()
            };
            let cfg = DetectConfig::from_file(&merged(&a.config, flags)?)?;
            let det = pipeline::run_detect(&cfg)?;
            let s = det.stats();
            println!(
                "{} accounts, {} LCN edges, {} HCCs covering {} accounts",
                s.corpus.accounts, s.lcn_edges, s.hccs, s.hcc_accounts
            );
        }
        Command::Analyze(a) => {
            let flags = ConfigFile {
                detect_dir: a.detect_dir,
                input: a.input,
                out: a.out,
                random_baseline: a.random_baseline.then_some(true),
                seed: a.seed,
                bucket: a.bucket,
                binary_ngrams: a.binary_ngrams.then_some(true),
                ..ConfigFile::default()
            };
            let cfg = AnalyzeConfig::from_file(&merged(&a.config, flags)?)?;
            let report = pipeline::run_analyze(&cfg)?;
            println!("analysed {} HCCs into {}", report.detected.groups.len(), cfg.out.display());
        }
        Command::Synth { config, out, straddle } => {
            let text = fs::read_to_string(&config).map_err(|e| Error::Io { path: config.clone(), source: e })?;
            let mut scenario_cfg = ScenarioConfig::from_toml(&text)?;
            scenario_cfg.straddle |= straddle;
            let scenario = synth::generate(&scenario_cfg)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            fs::write(out.join("corpus.jsonl"), scenario.corpus_text())?;
            pipeline::write_truth(&out.join("truth.csv"), &scenario.truth)?;
            fs::write(out.join("scenario.toml"), scenario_cfg.to_toml())?;
            println!("{} posts, {} implanted accounts", scenario.posts.len(), scenario.truth.len());
        }
        Command::Score { truth, membership } => {
            let s = pipeline::score_files(&truth, &membership)?;
            let show = |x: Option<f64>| x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"));
            println!("precision\t{}", show(s.precision));
            println!("recall\t{}", show(s.recall));
            println!("f1\t{}", show(s.f1));
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Io { .. } | Error::InvalidParameter { .. } | Error::Config(_)) => 2,
        Some(_) => 3,
        None => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
