use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use proofnet::backward::bw_enumerate;
use proofnet::contraction::{PathClass, Regime, RegimeConfig, SearchOrder};
use proofnet::frame::{
    count_matchings, enumerate_matchings, to_dot, unfold as unfold_frame, Direction, Matching, ProofNet,
};
use proofnet::generate::{
    action_fscore, beam_search, semantic_target, sequence_keys, BeamError, BeamOptions, ExternalScorer, GenState,
    GoldOracle, Scorer, ScorerError, UniformScorer,
};
use proofnet::label::{directionalize, gold_labels, label_slots, principal_typing, Labelling, TypeVarTyping};
use proofnet::term::{extract_term, parse_term, term_to_net};
use proofnet::{count_check, parse_formula, prove as run_prove, Lexicon, ProveOptions};
use serde_json::{json, Value};

use crate::{Format, LexiconArgs};

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
    pub transcript: Vec<String>,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 2, error: e.into(), transcript: Vec::new() }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_lexicon(path: &Path, goal: Option<&str>) -> anyhow::Result<Lexicon> {
    let mut lexicon = Lexicon::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if let Some(goal) = goal {
        lexicon.goal = parse_formula(goal).context("bad --goal")?;
    }
    Ok(lexicon)
}

fn load_net(path: &Path) -> anyhow::Result<ProofNet> {
    ProofNet::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn word_names(lexicon: &Lexicon) -> Vec<String> {
    lexicon.entries.iter().map(|e| e.word.clone()).collect()
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value serialises"));
}

fn unsupported(format: Format, command: &str) -> Failure {
    let name = match format {
        Format::Json => "json",
        Format::Dot => "dot",
        Format::Term => "term",
        Format::Tsv => "tsv",
    };
    Failure::from(anyhow!("format `{name}` is not available for `{command}`"))
}

pub fn unfold(args: &LexiconArgs, format: Format) -> Outcome {
    let lexicon = load_lexicon(&args.lexicon, args.goal.as_deref())?;
    let frame = unfold_frame(&lexicon);
    match format {
        Format::Json => println!("{}", frame.to_json()),
        Format::Dot => print!("{}", to_dot(&frame, Some(&word_names(&lexicon)))),
        other => return Err(unsupported(other, "unfold")),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn matches(args: &LexiconArgs, count_only: bool, limit: usize) -> Outcome {
    let lexicon = load_lexicon(&args.lexicon, args.goal.as_deref())?;
    let counts = count_check(&lexicon);
    if !counts.is_balanced() {
        println!("{counts}");
        return Ok(ExitCode::from(1));
    }
    let frame = unfold_frame(&lexicon);
    let total = count_matchings(&frame, &Matching::new())?;
    if count_only {
        println!("{total}");
        return Ok(ExitCode::SUCCESS);
    }
    let listed: Vec<Value> = enumerate_matchings(&frame, &Matching::new())?
        .take(limit)
        .map(|m| Value::Array(m.pairs().map(|(n, p)| json!([n.0, p.0])).collect()))
        .collect();
    print_json(&json!({ "count": total.to_string(), "matchings": listed }));
    Ok(ExitCode::SUCCESS)
}

pub fn prove(args: &LexiconArgs, regime: Option<&Path>, seed: Option<u64>, any_order: bool, format: Format) -> Outcome {
    let lexicon = load_lexicon(&args.lexicon, args.goal.as_deref())?;
    let config = match regime {
        Some(path) => RegimeConfig::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?,
        None => RegimeConfig::new(Regime::uniform(PathClass::NL)),
    };
    let mut options = ProveOptions::new(config);
    if let Some(seed) = seed {
        options.order = SearchOrder::Shuffled(seed);
    }
    if any_order {
        options.require_yield = Some(false);
    }
    let counts = count_check(&lexicon);
    if !counts.is_balanced() {
        eprintln!("count check failed: {counts}");
        return Ok(ExitCode::from(1));
    }
    let report = run_prove(&lexicon, &options)?;
    let words = word_names(&lexicon);
    match format {
        Format::Json => {
            let proofs: Vec<Value> = report
                .proofs
                .iter()
                .map(|p| {
                    let steps: Vec<Value> = p
                        .witness
                        .steps
                        .iter()
                        .map(|s| json!({ "mode": s.mode.0, "class": s.class.to_string(), "word": s.word.to_string() }))
                        .collect();
                    let structural = p.witness.repair.as_ref().map_or(0, |r| r.steps.len());
                    json!({
                        "index": p.index,
                        "term": p.term.to_string(),
                        "steps": steps,
                        "structural": structural,
                        "net": p.structure.to_json_value(),
                    })
                })
                .collect();
            print_json(&json!({
                "matchings": report.matchings.to_string(),
                "contractible": report.contractible,
                "proofs": proofs,
            }));
        }
        Format::Term => {
            for p in &report.proofs {
                println!("{}", p.term);
            }
        }
        Format::Tsv => {
            for p in &report.proofs {
                println!("{}\t{}\t{}", p.index, p.witness.steps.len(), p.term);
            }
        }
        Format::Dot => {
            for p in &report.proofs {
                print!("{}", to_dot(&p.structure, Some(&words)));
            }
        }
    }
    Ok(if report.proofs.is_empty() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

pub struct GenerateArgs<'a> {
    pub words: Option<usize>,
    pub lexicon: Option<&'a Path>,
    pub gold: Option<&'a Path>,
    pub scorer: &'a str,
    pub beam: usize,
    pub threshold: f64,
    pub max_par: Option<usize>,
    pub format: Format,
}

fn scorer_failure(e: ScorerError) -> Failure {
    let transcript = match &e {
        ScorerError::Protocol { transcript, .. } => transcript.clone(),
        ScorerError::Io(_) => Vec::new(),
    };
    Failure { code: 3, error: e.into(), transcript }
}

pub fn generate(args: &GenerateArgs<'_>) -> Outcome {
    let names = match args.lexicon {
        Some(path) => Some(word_names(&load_lexicon(path, None)?)),
        None => None,
    };
    let gold = match args.gold {
        Some(path) => Some(GoldOracle::new(&load_net(path)?).context("gold net is not generable")?),
        None => None,
    };
    let words = args
        .words
        .or(names.as_ref().map(Vec::len))
        .or(gold.as_ref().map(|g| g.gold().words()))
        .ok_or_else(|| anyhow!("give --words, --lexicon or --gold"))?;
    let external;
    let scorer: &dyn Scorer = match args.scorer {
        "uniform" => &UniformScorer,
        "oracle" => gold.as_ref().ok_or_else(|| anyhow!("the oracle scorer needs --gold"))?,
        command => {
            external = ExternalScorer::spawn(command).map_err(scorer_failure)?;
            &external
        }
    };
    let mut options = BeamOptions::new(args.beam, words);
    options.threshold = args.threshold;
    if let Some(max_par) = args.max_par {
        options.max_expansions = max_par;
    }
    let results = match beam_search(words, scorer, options) {
        Ok(r) => r,
        Err(BeamError::Scorer(e)) => return Err(scorer_failure(e)),
        Err(e) => return Err(e.into()),
    };
    let gold_keys = match &gold {
        Some(g) => Some(sequence_keys(&GenState::init(words)?, &g.canonical_sequence()?)?),
        None => None,
    };
    match args.format {
        Format::Json => {
            let mut out = Vec::new();
            for g in &results {
                let mut entry = json!({
                    "score": g.score,
                    "term": extract_term(&g.net)?.to_string(),
                    "actions": g.actions,
                    "weights": g.weights,
                    "net": g.net.to_json_value(),
                });
                if let Some(gold_keys) = &gold_keys {
                    let keys = sequence_keys(&GenState::init(words)?, &g.actions)?;
                    let f = action_fscore(&keys.into_iter().collect(), &gold_keys.iter().cloned().collect());
                    entry["fscore"] = json!(f);
                }
                out.push(entry);
            }
            print_json(&Value::Array(out));
        }
        Format::Term | Format::Tsv => {
            for g in &results {
                let term = extract_term(&g.net)?;
                if args.format == Format::Tsv {
                    println!("{:.6}\t{term}", g.score);
                } else {
                    println!("{term}");
                }
            }
        }
        Format::Dot => {
            for g in &results {
                print!("{}", to_dot(&g.net, names.as_deref()));
            }
        }
    }
    Ok(if results.is_empty() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

pub fn backward(words: usize, max_par: Option<usize>, format: Format) -> Outcome {
    let nets = bw_enumerate(words, max_par.unwrap_or(words))?;
    match format {
        Format::Term => {
            for n in &nets {
                println!("{}", extract_term(n)?);
            }
        }
        Format::Tsv => println!("{}", nets.len()),
        Format::Json => {
            let terms = nets.iter().map(|n| extract_term(n).map(|t| t.to_string())).collect::<Result<Vec<_>, _>>()?;
            print_json(&json!({ "count": nets.len(), "terms": terms }));
        }
        other => return Err(unsupported(other, "backward")),
    }
    Ok(ExitCode::SUCCESS)
}

fn is_directional(net: &ProofNet) -> bool {
    net.links().any(|(_, l)| matches!(l.tag(), Some(Direction::Over | Direction::Under)))
}

fn render_typing(typing: &TypeVarTyping, names: &[String]) -> String {
    let mut lines: Vec<String> = typing
        .words
        .iter()
        .enumerate()
        .map(|(i, t)| match names.get(i) {
            Some(name) => format!("{name}: {t}"),
            None => format!("x{}: {t}", i + 1),
        })
        .collect();
    lines.push(format!("goal: {}", typing.goal));
    lines.join("\n")
}

pub fn label(net: &Path, labelling: Option<&Path>, lexicon: Option<&Path>) -> Outcome {
    let net = load_net(net)?;
    let names = match lexicon {
        Some(path) => word_names(&load_lexicon(path, None)?),
        None => Vec::new(),
    };
    let (semantic, typing, labels) = if is_directional(&net) {
        let (typing, labels) = gold_labels(&net)?;
        (semantic_target(&net), typing, Some(labels))
    } else {
        let semantic = semantic_target(&net);
        let typing = principal_typing(&semantic)?;
        (semantic, typing, None)
    };
    let labels = match labelling {
        Some(path) => Some(Labelling::from_json(&read(path)?)?),
        None => labels,
    };
    let slots = label_slots(&semantic);
    let ids = |s: &BTreeSet<_>| s.iter().map(|v: &proofnet::VertexId| v.0).collect::<Vec<_>>();
    let mut out = json!({
        "term": extract_term(&semantic)?.to_string(),
        "typing": render_typing(&typing, &names),
        "atom_slots": ids(&slots.atom_slots),
        "connective_slots": ids(&slots.connective_slots),
    });
    if let Some(labels) = labels {
        let lexicon = directionalize(&typing, &labels, &names)?;
        out["labelling"] = serde_json::to_value(&labels)?;
        out["lexicon"] = serde_json::from_str(&lexicon.to_json())?;
    }
    print_json(&out);
    Ok(ExitCode::SUCCESS)
}

pub fn compare(gold: &Path, predicted: &Path) -> Outcome {
    let keys = |path: &Path| -> anyhow::Result<BTreeSet<_>> {
        let oracle =
            GoldOracle::new(&load_net(path)?).with_context(|| format!("{} is not generable", path.display()))?;
        let start = GenState::init(oracle.gold().words())?;
        Ok(sequence_keys(&start, &oracle.canonical_sequence()?)?.into_iter().collect())
    };
    let f = action_fscore(&keys(predicted)?, &keys(gold)?);
    print_json(&json!(f));
    Ok(ExitCode::SUCCESS)
}

pub fn export(net: Option<&Path>, term: Option<&str>, lexicon: Option<&Path>, format: Format) -> Outcome {
    let lexicon = match lexicon {
        Some(path) => Some(load_lexicon(path, None)?),
        None => None,
    };
    let names = lexicon.as_ref().map(word_names);
    let net = match (net, term) {
        (Some(path), _) => load_net(path)?,
        (None, Some(text)) => term_to_net(&parse_term(text)?)?,
        (None, None) => unfold_frame(lexicon.as_ref().expect("clap requires --net or --lexicon")),
    };
    match format {
        Format::Dot => print!("{}", to_dot(&net, names.as_deref())),
        Format::Json => println!("{}", net.to_json()),
        Format::Term => println!("{}", extract_term(&semantic_target(&net))?),
        other => return Err(unsupported(other, "export")),
    }
    Ok(ExitCode::SUCCESS)
}
