use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "proofnet", version, about = "Proof nets for type-logical grammars")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Term,
    Tsv,
}

#[derive(clap::Args)]
pub struct LexiconArgs {
    /// Lexicon file: {"words": [{"w": .., "f": ..}], "goal": ..}
    #[arg(long)]
    lexicon: PathBuf,
    /// Replaces the goal formula of the lexicon.
    #[arg(long)]
    goal: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Unfolds the lexicon into its proof frame.
    Unfold {
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Runs the count check and enumerates atom matchings.
    Match {
        #[command(flatten)]
        lexicon: LexiconArgs,
        /// Prints only the number of matchings.
        #[arg(long)]
        count_only: bool,
        /// Most matchings listed.
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Finds every proof of the lexicon under a regime.
    Prove {
        #[command(flatten)]
        lexicon: LexiconArgs,
        /// Regime file; all-NL without structural rules when absent.
        #[arg(long)]
        regime: Option<PathBuf>,
        /// Shuffles the contraction search with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Accepts proofs whose yield is not in sentence order.
        #[arg(long)]
        any_order: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Generates semantic nets by beam search.
    Generate {
        /// Number of words.
        #[arg(long, required_unless_present_any = ["lexicon", "gold"])]
        words: Option<usize>,
        /// Takes the number of words and their names from a lexicon.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Gold net; needed by the oracle scorer and for the F-score.
        #[arg(long)]
        gold: Option<PathBuf>,
        /// `uniform`, `oracle`, or a shell command speaking the scorer protocol.
        #[arg(long, default_value = "uniform")]
        scorer: String,
        #[arg(long, default_value_t = 1)]
        beam: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Most expansions per net; the number of words when absent.
        #[arg(long)]
        max_par: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Enumerates nets with the backward generator.
    Backward {
        #[arg(long)]
        words: usize,
        /// Most abstractions per net; the number of words when absent.
        #[arg(long)]
        max_par: Option<usize>,
        #[arg(long, value_enum, default_value = "term")]
        format: Format,
    },
    /// Principal typing, label slots and directional lexicon of a net.
    Label {
        /// Net JSON, semantic or directional.
        #[arg(long)]
        net: PathBuf,
        /// Labelling JSON to directionalize with.
        #[arg(long)]
        labelling: Option<PathBuf>,
        /// Lexicon supplying word names.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Action F-score of a predicted net against a gold net.
    Compare {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        predicted: PathBuf,
    },
    /// Converts a net, a term, or the frame of a lexicon, to DOT, JSON or a term.
    Export {
        #[arg(long, required_unless_present_any = ["lexicon", "term"])]
        net: Option<PathBuf>,
        /// Linear lambda term over free variables x1, x2, ...
        #[arg(long, conflicts_with = "net")]
        term: Option<String>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Unfold { lexicon, format } => commands::unfold(&lexicon, format),
        Command::Match { lexicon, count_only, limit } => commands::matches(&lexicon, count_only, limit),
        Command::Prove { lexicon, regime, seed, any_order, format } => {
            commands::prove(&lexicon, regime.as_deref(), seed, any_order, format)
        }
        Command::Generate { words, lexicon, gold, scorer, beam, threshold, max_par, format } => {
            let opts = commands::GenerateArgs {
                words,
                lexicon: lexicon.as_deref(),
                gold: gold.as_deref(),
                scorer: &scorer,
                beam,
                threshold,
                max_par,
                format,
            };
            commands::generate(&opts)
        }
        Command::Backward { words, max_par, format } => commands::backward(words, max_par, format),
        Command::Label { net, labelling, lexicon } => commands::label(&net, labelling.as_deref(), lexicon.as_deref()),
        Command::Compare { gold, predicted } => commands::compare(&gold, &predicted),
        Command::Export { net, term, lexicon, format } => {
            commands::export(net.as_deref(), term.as_deref(), lexicon.as_deref(), format)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.error);
            for line in &e.transcript {
                eprintln!("  {line}");
            }
            ExitCode::from(e.code)
        }
    }
}
