//! The `dacue` command line.
//!
//! Exit status is 0 on success, 1 for invalid invocations and 2 when input
//! data cannot be read or processed. Diagnostics go to standard error;
//! data goes to the named output files or standard output.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};

use dacue_core::corpus::{split_corpus, ClusterLexicon, Corpus};
use dacue_core::counts::{build_table, extract_phrases, Phrase};
use dacue_core::filter::{frequency_band, lexical_filter_audited, FilterMode};
use dacue_core::metrics::{rank_all, Metric};
use dacue_core::tbl::{apply_rules, train, TrainConfig, UpdateMode};

use crate::error::{Error, Result};
use crate::eval::{
    gen_synthetic, run_sweep, significance, take_cutoff, Filtering, Method, SweepConfig, SynthConfig,
};
use crate::formats::corpus::{parse_corpus, write_corpus, write_tagged};
use crate::formats::lexicon::parse_lexicon;
use crate::formats::model::{parse_model, write_model};
use crate::formats::phrases::{parse_phrase_list, write_table_dump};
use crate::formats::ranked::{parse_ranked, write_audit, write_ranked, RankedList};
use crate::formats::report::{write_report, write_significance};

#[derive(Debug, Parser)]
#[command(name = "dacue", version, about = "Rank, filter and evaluate dialogue act cue phrases")]
pub struct Cli {
    /// Worker threads for parallel stages (0 = one per core). Output does
    /// not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank every phrase of a corpus by one metric.
    Rank(RankArgs),
    /// Apply the lexical filter to a ranked list.
    Filter(FilterArgs),
    /// Train a tagger on a corpus with a selected phrase set.
    Train(TrainArgs),
    /// Tag a corpus with a trained model.
    Tag(TagArgs),
    /// Score tagged utterances against gold labels.
    Eval(EvalArgs),
    /// Run a method x filter x cutoff experiment grid.
    Sweep(SweepArgs),
    /// Generate a synthetic corpus with planted cue phrases.
    Synth(SynthArgs),
    /// Split a corpus into training and held-out dialogues.
    Split(SplitArgs),
}

#[derive(Debug, Args)]
pub struct CorpusInput {
    /// Corpus TSV (dialogue_id, turn_index, speaker, act, text).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Cluster lexicon TSV (cluster_label, surface_token); enables clustering.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Band {
    /// Drop phrases occurring in fewer utterances than this.
    #[arg(long)]
    pub min_freq: Option<u32>,
    /// Drop phrases occurring in more utterances than this.
    #[arg(long)]
    pub max_freq: Option<u32>,
}

#[derive(Debug, Args)]
pub struct TrainOptions {
    /// Stop once the best rule's net gain falls below this.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub threshold: u32,
    /// How a rule's rewrites feed its own prev-tag condition: sweep or simultaneous.
    #[arg(long, default_value = "sweep", value_parser = parse_update)]
    pub update: UpdateMode,
    /// Stop after this many rules.
    #[arg(long)]
    pub max_rules: Option<usize>,
}

impl TrainOptions {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            threshold: self.threshold,
            update: self.update,
            max_rules: self.max_rules,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: CorpusInput,
    /// cooc, cp, ent, ttest, mi, s, ig, d or dcp.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Metric,
    /// Longest phrase, in tokens.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_len: u32,
    #[command(flatten)]
    pub band: Band,
    /// Ranked list output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the phrase/act count table here.
    #[arg(long)]
    pub table_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Ranked list to filter.
    #[arg(long)]
    pub ranked: PathBuf,
    /// basic, or modified (the blocker must share the selected act).
    #[arg(long, value_parser = parse_filter_mode)]
    pub mode: FilterMode,
    /// Filtered list output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write each removed phrase and its blocking subphrase here.
    #[arg(long)]
    pub audit: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("phrase_source").required(true).args(["ranked", "phrases", "all"])))]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: CorpusInput,
    /// Ranked list to take the top phrases from.
    #[arg(long)]
    pub ranked: Option<PathBuf>,
    /// Percentage of the unfiltered ranking to keep.
    #[arg(long, default_value_t = 100.0, requires = "ranked")]
    pub cutoff: f64,
    /// Plain phrase list, one phrase per line.
    #[arg(long)]
    pub phrases: Option<PathBuf>,
    /// Use every phrase of the corpus up to --max-len tokens.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_len: u32,
    #[command(flatten)]
    pub options: TrainOptions,
    /// Model output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TagArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: CorpusInput,
    /// Tagged corpus output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Tagged corpus TSV.
    #[arg(long)]
    pub tagged: PathBuf,
    /// Gold corpus TSV with the same utterances.
    #[arg(long)]
    pub gold: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("data").required(true).args(["train", "corpus"])))]
pub struct SweepArgs {
    /// Training corpus (requires --heldout).
    #[arg(long, requires = "heldout")]
    pub train: Option<PathBuf>,
    /// Held-out corpus.
    #[arg(long, requires = "train")]
    pub heldout: Option<PathBuf>,
    /// Single corpus to split into training and held-out dialogues.
    #[arg(long, conflicts_with_all = ["train", "heldout"])]
    pub corpus: Option<PathBuf>,
    /// Fraction of dialogues held out when splitting --corpus.
    #[arg(long, default_value_t = 0.1)]
    pub heldout_fraction: f64,
    /// Seed for splitting --corpus.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// "all", "none", or a comma list of metric names.
    #[arg(long, default_value = "all")]
    pub metrics: String,
    /// Comma list of baselines: all, lit, none. Default: all, plus lit when --lit is given.
    #[arg(long)]
    pub baselines: Option<String>,
    /// Phrase list for the lit baseline.
    #[arg(long)]
    pub lit: Option<PathBuf>,
    /// Comma list of cutoff percentages.
    #[arg(long, default_value = "1,5,10,25,50,100")]
    pub cutoffs: String,
    /// Comma list of filter modes: none, basic, modified.
    #[arg(long, default_value = "none")]
    pub filter: String,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_len: u32,
    #[command(flatten)]
    pub band: Band,
    #[command(flatten)]
    pub options: TrainOptions,
    /// Report CSV output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write Welch t tests of every row against the all baseline here.
    #[arg(long)]
    pub significance: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 300)]
    pub dialogues: usize,
    #[arg(long, default_value_t = 18)]
    pub acts: usize,
    /// Probability that an utterance contains its act's cue.
    #[arg(long, default_value_t = 0.85)]
    pub cue_strength: f64,
    /// Size of the shared noise vocabulary.
    #[arg(long, default_value_t = 500)]
    pub noise_vocab: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Corpus output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub input: CorpusInput,
    #[arg(long, default_value_t = 0.1)]
    pub heldout_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub train_out: PathBuf,
    #[arg(long)]
    pub heldout_out: PathBuf,
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    s.parse().map_err(|e: dacue_core::Error| e.to_string())
}

fn parse_filter_mode(s: &str) -> std::result::Result<FilterMode, String> {
    s.parse().map_err(|e: dacue_core::Error| e.to_string())
}

fn parse_update(s: &str) -> std::result::Result<UpdateMode, String> {
    s.parse().map_err(|_| format!("unknown update mode {s:?} (expected sweep or simultaneous)"))
}

fn usage(message: impl Into<String>) -> Error {
    Error::Usage(message.into())
}

fn comma_list<T>(flag: &str, value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).map_err(|e| usage(format!("--{flag}: {e}"))))
        .collect()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Runs `write` against the named file, or standard output.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut out = BufWriter::new(file);
            write(&mut out).map_err(|e| relabel_io(e, path))?;
            out.flush().map_err(|e| Error::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out)?;
            out.flush().map_err(Error::from)
        }
    }
}

fn relabel_io(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}

fn load_lexicon(path: Option<&Path>) -> Result<Option<ClusterLexicon>> {
    path.map(|p| parse_lexicon(open(p)?).map_err(|e| e.in_file(p)))
        .transpose()
}

fn load_corpus(path: &Path, lexicon: Option<&ClusterLexicon>) -> Result<Corpus> {
    parse_corpus(open(path)?, lexicon).map_err(|e| e.in_file(path))
}

fn load_input(input: &CorpusInput) -> Result<Corpus> {
    let lexicon = load_lexicon(input.lexicon.as_deref())?;
    load_corpus(&input.corpus, lexicon.as_ref())
}

fn load_ranked(path: &Path) -> Result<RankedList> {
    parse_ranked(open(path)?).map_err(|e| e.in_file(path))
}

fn load_phrases(path: &Path) -> Result<Vec<Phrase>> {
    parse_phrase_list(open(path)?).map_err(|e| e.in_file(path))
}

fn rank(args: &RankArgs) -> Result<()> {
    let corpus = load_input(&args.input)?;
    let table = build_table(&corpus, &extract_phrases(&corpus, args.max_len as usize))?;
    if let Some(path) = &args.table_dump {
        emit(Some(path), |out| write_table_dump(out, &table))?;
    }
    let ranked = frequency_band(&rank_all(&table, args.metric), args.band.min_freq, args.band.max_freq);
    let list = RankedList::new(args.metric, ranked);
    emit(args.out.as_deref(), |out| write_ranked(out, &list))
}

fn filter(args: &FilterArgs) -> Result<()> {
    let list = load_ranked(&args.ranked)?;
    let (kept, removals) = lexical_filter_audited(&list.entries, args.mode)?;
    if let Some(path) = &args.audit {
        emit(Some(path), |out| write_audit(out, &removals))?;
    }
    emit(args.out.as_deref(), |out| write_ranked(out, &list.derived(kept)))
}

fn train_cmd(args: &TrainArgs) -> Result<()> {
    let corpus = load_input(&args.input)?;
    let phrases = if let Some(path) = &args.ranked {
        let list = load_ranked(path)?;
        take_cutoff(&list.entries, list.total, args.cutoff)
            .map_err(|e| usage(format!("--cutoff: {e}")))?
            .iter()
            .map(|e| e.phrase.clone())
            .collect()
    } else if let Some(path) = &args.phrases {
        load_phrases(path)?
    } else {
        extract_phrases(&corpus, args.max_len as usize).into_iter().collect()
    };
    let model = train(&corpus, &phrases, &args.options.config())?;
    emit(args.out.as_deref(), |out| write_model(out, &model))
}

fn tag(args: &TagArgs) -> Result<()> {
    let model = parse_model(open(&args.model)?).map_err(|e| e.in_file(&args.model))?;
    let corpus = load_input(&args.input)?;
    let tags = apply_rules(&model, &corpus)?;
    emit(args.out.as_deref(), |out| write_tagged(out, &corpus, &tags))
}

fn eval_cmd(args: &EvalArgs) -> Result<()> {
    let tagged = load_corpus(&args.tagged, None)?;
    let gold = load_corpus(&args.gold, None)?;
    let key = |c: &Corpus| -> Vec<(String, usize)> {
        let mut keys: Vec<_> = c.utterances().map(|u| (u.dialogue_id.clone(), u.turn_index)).collect();
        keys.sort();
        keys
    };
    if key(&tagged) != key(&gold) {
        return Err(Error::Invalid(format!(
            "{} and {} do not contain the same utterances",
            args.tagged.display(),
            args.gold.display()
        )));
    }
    let predicted: std::collections::BTreeMap<(&str, usize), &dacue_core::Act> = tagged
        .utterances()
        .map(|u| ((u.dialogue_id.as_str(), u.turn_index), &u.act))
        .collect();
    let correct = gold
        .utterances()
        .filter(|u| predicted[&(u.dialogue_id.as_str(), u.turn_index)] == &u.act)
        .count();
    let total = gold.len();
    emit(None, |out| {
        writeln!(out, "correct\ttotal\taccuracy")?;
        writeln!(out, "{correct}\t{total}\t{}", correct as f64 / total as f64)?;
        Ok(())
    })
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let mut methods: Vec<Method> = match args.metrics.trim().to_ascii_lowercase().as_str() {
        "all" => Method::every_metric().collect(),
        "none" => Vec::new(),
        list => comma_list("metrics", list, |s| Ok(Method::Metric(s.parse::<Metric>()?)))?,
    };
    let baselines = match &args.baselines {
        Some(list) if list.trim().eq_ignore_ascii_case("none") => Vec::new(),
        Some(list) => comma_list("baselines", list, |s| match s.parse::<Method>()? {
            b @ (Method::All | Method::Lit) => Ok(b),
            Method::Metric(m) => Err(usage(format!("{m} is a metric, not a baseline"))),
        })?,
        None if args.lit.is_some() => vec![Method::All, Method::Lit],
        None => vec![Method::All],
    };
    if baselines.contains(&Method::Lit) && args.lit.is_none() {
        return Err(usage("--baselines lit needs --lit <phrase list>"));
    }
    methods.extend(baselines);
    if methods.is_empty() {
        return Err(usage("nothing to run: no metrics and no baselines"));
    }
    let cutoffs = comma_list("cutoffs", &args.cutoffs, |s| {
        let pct: f64 = s.parse().map_err(|_| usage(format!("{s:?} is not a number")))?;
        dacue_core::metrics::cutoff_count(0, pct)?;
        Ok(pct)
    })?;
    let filters = comma_list("filter", &args.filter, |s| s.parse::<Filtering>())?;
    if cutoffs.is_empty() || filters.is_empty() {
        return Err(usage("--cutoffs and --filter need at least one value each"));
    }
    let lit = args.lit.as_deref().map(load_phrases).transpose()?;
    Ok(SweepConfig {
        methods,
        cutoffs,
        filters,
        train: args.options.config(),
        max_len: args.max_len as usize,
        lit,
        min_freq: args.band.min_freq,
        max_freq: args.band.max_freq,
    })
}

fn sweep(args: &SweepArgs) -> Result<()> {
    if !(args.heldout_fraction > 0.0 && args.heldout_fraction < 1.0) {
        return Err(usage("--heldout-fraction must lie strictly between 0 and 1"));
    }
    let config = sweep_config(args)?;
    let lexicon = load_lexicon(args.lexicon.as_deref())?;
    let (train_set, heldout) = match (&args.train, &args.heldout, &args.corpus) {
        (Some(t), Some(h), _) => (load_corpus(t, lexicon.as_ref())?, load_corpus(h, lexicon.as_ref())?),
        (_, _, Some(c)) => split_corpus(&load_corpus(c, lexicon.as_ref())?, args.heldout_fraction, args.seed)?,
        _ => return Err(usage("give --train and --heldout, or --corpus")),
    };
    let results = run_sweep(&train_set, &heldout, &config)?;
    if let Some(path) = &args.significance {
        let rows = significance(&results, Method::All);
        emit(Some(path), |out| write_significance(out, &rows))?;
    }
    emit(args.out.as_deref(), |out| write_report(out, &results))
}

fn synth(args: &SynthArgs) -> Result<()> {
    let corpus = gen_synthetic(&SynthConfig {
        dialogues: args.dialogues,
        acts: args.acts,
        cue_strength: args.cue_strength,
        noise_vocab: args.noise_vocab,
        seed: args.seed,
        ..SynthConfig::default()
    })?;
    emit(args.out.as_deref(), |out| write_corpus(out, &corpus))
}

fn split(args: &SplitArgs) -> Result<()> {
    let corpus = load_input(&args.input)?;
    let (train_set, heldout) = split_corpus(&corpus, args.heldout_fraction, args.seed)?;
    emit(Some(&args.train_out), |out| write_corpus(out, &train_set))?;
    emit(Some(&args.heldout_out), |out| write_corpus(out, &heldout))
}

pub fn execute(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| usage(format!("--threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Rank(a) => rank(a),
        Command::Filter(a) => filter(a),
        Command::Train(a) => train_cmd(a),
        Command::Tag(a) => tag(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Synth(a) => synth(a),
        Command::Split(a) => split(a),
    })
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dacue: error: {e}");
            e.exit_code()
        }
    }
}
