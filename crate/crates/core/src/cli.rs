//! The `faultloc` command line.
//!
//! Exit status is 0 on success, 1 when an input fails validation and 2 on a
//! usage error. Output files are written to a temporary file next to the
//! target and renamed into place, so a failed run leaves no partial output.
//!
//! Tunable values can also come from a `key=value` file passed with
//! `--config`; a flag given on the command line always wins over the file.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::blues::{
    self, build_corpus, BugReport, CorpusOptions, DocField, QueryField, RetrievalConfig,
    StatementCorpus, Tokenizer,
};
use crate::eval::{self, DefectRecord, DEFAULT_CUTOFFS};
use crate::rafl::{ce_aggregate, AggregationProblem, CeConfig};
use crate::ranked::{RankedList, StatementId};
use crate::spectra;

#[derive(Debug, Parser)]
#[command(
    name = "faultloc",
    version,
    about = "Statement-level fault localization"
)]
struct Cli {
    /// key=value file supplying defaults for tunable flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for corpus building, retrieval and aggregation
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank statements by Ochiai suspiciousness from a coverage matrix
    Sbfl(SbflArgs),
    /// Rank statements by similarity to a bug report
    Irfl(IrflArgs),
    /// Aggregate two or more ranked lists
    Combine(CombineArgs),
    /// Compute top-k accuracy over a defect manifest
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct SbflArgs {
    /// Coverage matrix, one test per row ending in `+` or `-`
    #[arg(long)]
    matrix: PathBuf,
    /// Statement ids, one per matrix column
    #[arg(long)]
    spectra: PathBuf,
    /// Keep only the top k statements
    #[arg(long)]
    k: Option<usize>,
    /// Output CSV (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IrflArgs {
    /// Source tree to index
    #[arg(long)]
    source: Option<PathBuf>,
    /// Bug report JSON with keys id, summary, description
    #[arg(long)]
    report: PathBuf,
    /// Keep only the top k statements
    #[arg(long)]
    k: Option<usize>,
    /// BM25 term-frequency saturation [default: 1.2]
    #[arg(long)]
    k1: Option<f64>,
    /// BM25 length normalization in [0, 1] [default: 0.75]
    #[arg(long)]
    b: Option<f64>,
    /// Field weight, e.g. `summary.stmt_tokens=2.0` (repeatable)
    #[arg(long = "weight", value_name = "QUERY.FIELD=W")]
    weights: Vec<String>,
    /// Source file extensions, comma separated
    #[arg(long, value_delimiter = ',')]
    ext: Vec<String>,
    /// Stopword list replacing the built-in ones (repeatable)
    #[arg(long = "stopwords", value_name = "FILE")]
    stopwords: Vec<PathBuf>,
    /// Corpus cache: loaded when present, otherwise written after building
    #[arg(long, value_name = "FILE")]
    corpus_cache: Option<PathBuf>,
    /// Output CSV (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CeArgs {
    /// Random seed for the aggregation (required)
    #[arg(long)]
    seed: Option<u64>,
    /// Samples per iteration [default: 10·k·candidates, at most 200000]
    #[arg(long)]
    sample_size: Option<usize>,
    /// Share of samples kept as the elite [default: 0.1]
    #[arg(long)]
    elite_fraction: Option<f64>,
    /// Weight of the elite frequencies in each update [default: 0.25]
    #[arg(long)]
    smoothing: Option<f64>,
    /// Stop after this many iterations without improvement [default: 7]
    #[arg(long)]
    stall_limit: Option<usize>,
    /// Hard iteration cap [default: 1000]
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Debug, Args)]
struct CombineArgs {
    /// Ranked-list CSV files
    #[arg(required = true, num_args = 1..)]
    lists: Vec<PathBuf>,
    /// Aggregate length
    #[arg(long)]
    k: Option<usize>,
    /// Per-list weights, comma separated (uniform by default)
    #[arg(long, value_delimiter = ',')]
    weights: Vec<f64>,
    #[command(flatten)]
    ce: CeArgs,
    /// Output CSV (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Technique {
    /// precomputed list if the record has one, two or more lists combined,
    /// otherwise SBFL, otherwise IRFL
    Auto,
    /// the record's single precomputed list
    List,
    /// Ochiai over the record's coverage matrix
    Sbfl,
    /// retrieval over the record's source tree and bug report
    Irfl,
    /// aggregate of the record's precomputed lists, or of SBFL and IRFL
    Combine,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Defect manifest JSON
    #[arg(long)]
    manifest: PathBuf,
    /// How each defect's ranked list is obtained [default: auto]
    #[arg(long, value_enum)]
    technique: Option<Technique>,
    /// Cutoffs, comma separated [default: 1,25,50,100]
    #[arg(long, value_delimiter = ',')]
    cutoffs: Vec<usize>,
    /// Length of lists computed during evaluation
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    ce: CeArgs,
    /// Per-defect best-rank CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let threads = pick(cli.threads, &config, "threads")?;
    if threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let pool = crate::thread_pool(threads).context("building worker pool")?;
    pool.install(|| match cli.command {
        Command::Sbfl(args) => run_sbfl(args, &config),
        Command::Irfl(args) => run_irfl(args, &config),
        Command::Combine(args) => run_combine(args, &config),
        Command::Evaluate(args) => run_evaluate(args, &config),
    })
}

/// Parsed `key=value` lines. Keys use the long flag names.
#[derive(Debug, Default)]
struct ConfigFile {
    path: PathBuf,
    values: HashMap<String, (String, usize)>,
}

const CONFIG_KEYS: &[&str] = &[
    "threads",
    "k",
    "k1",
    "b",
    "weight",
    "ext",
    "weights",
    "seed",
    "sample-size",
    "elite-fraction",
    "smoothing",
    "stall-limit",
    "max-iterations",
    "technique",
    "cutoffs",
];

impl ConfigFile {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                bail!("{}:{}: unknown key {key:?}", path.display(), i + 1);
            }
            values.insert(key.to_string(), (value.trim().to_string(), i + 1));
        }
        Ok(ConfigFile {
            path: path.to_path_buf(),
            values,
        })
    }

    fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| {
                anyhow!(
                    "{}:{line}: invalid value {v:?} for {key}",
                    self.path.display()
                )
            }),
        }
    }

    fn get_list<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<Vec<T>>> {
        match self.values.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|p| p.trim().parse())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|_| {
                    anyhow!(
                        "{}:{line}: invalid list {v:?} for {key}",
                        self.path.display()
                    )
                }),
        }
    }
}

fn pick<T: FromStr>(flag: Option<T>, config: &ConfigFile, key: &str) -> anyhow::Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => config.get(key),
    }
}

fn pick_list<T: FromStr>(flag: Vec<T>, config: &ConfigFile, key: &str) -> anyhow::Result<Vec<T>> {
    if !flag.is_empty() {
        return Ok(flag);
    }
    Ok(config.get_list(key)?.unwrap_or_default())
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_list(path: &Path) -> anyhow::Result<RankedList> {
    let file = std::fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    RankedList::read_csv(file).with_context(|| path.display().to_string())
}

/// Writes `bytes` to `out` through a temporary file, or to stdout.
fn write_output(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    let Some(out) = out else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes)?;
        return Ok(stdout.flush()?);
    };
    let dir = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(out)
        .with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn sbfl_list(matrix: &Path, spectra_path: &Path, k: Option<usize>) -> anyhow::Result<RankedList> {
    let matrix_text = read_text(matrix)?;
    let spectra_text = read_text(spectra_path)?;
    let spectrum = spectra::parse_spectrum(&matrix_text, &spectra_text)
        .with_context(|| format!("{} / {}", matrix.display(), spectra_path.display()))?;
    Ok(spectra::ochiai(&spectrum, k))
}

fn run_sbfl(args: SbflArgs, config: &ConfigFile) -> CliResult<()> {
    let k = pick(args.k, config, "k")?;
    let list = sbfl_list(&args.matrix, &args.spectra, k)?;
    write_output(args.out.as_deref(), list.to_csv_string().as_bytes())?;
    Ok(())
}

struct IrflSetup {
    options: CorpusOptions,
    retrieval: RetrievalConfig,
}

fn irfl_setup(args: &IrflArgs, config: &ConfigFile) -> anyhow::Result<IrflSetup> {
    let mut retrieval = RetrievalConfig::default();
    if let Some(k1) = pick(args.k1, config, "k1")? {
        retrieval.k1 = k1;
    }
    if let Some(b) = pick(args.b, config, "b")? {
        retrieval.b = b;
    }
    retrieval.k = pick(args.k, config, "k")?;
    let weight_specs = if args.weights.is_empty() {
        config.get_list::<String>("weight")?.unwrap_or_default()
    } else {
        args.weights.clone()
    };
    for spec in &weight_specs {
        let (fields, value) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("weight {spec:?}: expected QUERY.FIELD=W"))?;
        let (q, d) = fields
            .split_once('.')
            .ok_or_else(|| anyhow!("weight {spec:?}: expected QUERY.FIELD=W"))?;
        let q = QueryField::from_name(q.trim())
            .ok_or_else(|| anyhow!("weight {spec:?}: unknown query field {q:?}"))?;
        let d = DocField::from_name(d.trim())
            .ok_or_else(|| anyhow!("weight {spec:?}: unknown document field {d:?}"))?;
        let w: f64 = value
            .trim()
            .parse()
            .map_err(|_| anyhow!("weight {spec:?}: invalid number"))?;
        retrieval.set_weight(q, d, w);
    }
    retrieval.validate()?;

    let mut options = CorpusOptions::default();
    let ext = pick_list(args.ext.clone(), config, "ext")?;
    if !ext.is_empty() {
        options.extensions = ext;
    }
    if !args.stopwords.is_empty() {
        let lists = args
            .stopwords
            .iter()
            .map(|p| read_text(p))
            .collect::<anyhow::Result<Vec<_>>>()?;
        options.tokenizer = Tokenizer::with_stopword_lists(lists.iter().map(String::as_str));
    }
    Ok(IrflSetup { options, retrieval })
}

fn load_or_build_corpus(
    source: Option<&Path>,
    cache: Option<&Path>,
    options: &CorpusOptions,
) -> anyhow::Result<StatementCorpus> {
    if let Some(cache) = cache.filter(|c| c.exists()) {
        let file =
            std::fs::File::open(cache).with_context(|| format!("reading {}", cache.display()))?;
        return StatementCorpus::read_cache(std::io::BufReader::new(file))
            .with_context(|| cache.display().to_string());
    }
    let source = source.ok_or_else(|| anyhow!("--source is required without a corpus cache"))?;
    let (corpus, warnings) = build_corpus(source, options)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if let Some(cache) = cache {
        let mut buf = Vec::new();
        corpus.write_cache(&mut buf)?;
        write_output(Some(cache), &buf)?;
    }
    Ok(corpus)
}

fn irfl_list(source: &Path, report: &Path, setup: &IrflSetup) -> anyhow::Result<RankedList> {
    let report = BugReport::load(report)?;
    let corpus = load_or_build_corpus(Some(source), None, &setup.options)?;
    Ok(blues::rank_statements(
        &corpus,
        &report,
        &setup.retrieval,
        &setup.options.tokenizer,
    )?)
}

fn run_irfl(args: IrflArgs, config: &ConfigFile) -> CliResult<()> {
    if args.source.is_none() && args.corpus_cache.as_deref().is_none_or(|c| !c.exists()) {
        return Err(CliError::Usage(
            "irfl needs --source or an existing --corpus-cache".into(),
        ));
    }
    let setup = irfl_setup(&args, config)?;
    let report = BugReport::load(&args.report).map_err(anyhow::Error::from)?;
    let corpus = load_or_build_corpus(
        args.source.as_deref(),
        args.corpus_cache.as_deref(),
        &setup.options,
    )?;
    let list = blues::rank_statements(&corpus, &report, &setup.retrieval, &setup.options.tokenizer)
        .map_err(anyhow::Error::from)?;
    write_output(args.out.as_deref(), list.to_csv_string().as_bytes())?;
    Ok(())
}

fn ce_config(args: &CeArgs, config: &ConfigFile) -> CliResult<CeConfig> {
    let seed = pick(args.seed, config, "seed")?.ok_or_else(|| {
        CliError::Usage(
            "--seed is required for aggregation (set it on the command line or in --config)".into(),
        )
    })?;
    let mut ce = CeConfig::with_seed(seed);
    ce.sample_size = pick(args.sample_size, config, "sample-size")?;
    if let Some(v) = pick(args.elite_fraction, config, "elite-fraction")? {
        ce.elite_fraction = v;
    }
    if let Some(v) = pick(args.smoothing, config, "smoothing")? {
        ce.smoothing = v;
    }
    if let Some(v) = pick(args.stall_limit, config, "stall-limit")? {
        ce.stall_limit = v;
    }
    if let Some(v) = pick(args.max_iterations, config, "max-iterations")? {
        ce.max_iterations = v;
    }
    ce.validate().map_err(anyhow::Error::from)?;
    Ok(ce)
}

struct Combined {
    list: RankedList,
    objective: f64,
    iterations: usize,
    k: usize,
}

/// Aggregates `lists`; `k` defaults to the longest input and is lowered to
/// the number of distinct candidates when it exceeds it.
fn combine_lists(
    lists: Vec<RankedList>,
    weights: Option<Vec<f64>>,
    k: Option<usize>,
    ce: &CeConfig,
) -> anyhow::Result<Combined> {
    let requested = k.unwrap_or_else(|| lists.iter().map(RankedList::len).max().unwrap_or(0));
    let distinct: BTreeSet<&StatementId> = lists
        .iter()
        .flat_map(|l| l.statements().take(requested))
        .collect();
    let k = requested.min(distinct.len());
    if k < requested {
        eprintln!("note: k lowered from {requested} to {k}, the number of distinct statements");
    }
    let problem = AggregationProblem::new(lists, weights, k)?;
    let out = ce_aggregate(&problem, ce)?;
    Ok(Combined {
        list: out.list,
        objective: out.objective.value(),
        iterations: out.iterations,
        k,
    })
}

fn run_combine(args: CombineArgs, config: &ConfigFile) -> CliResult<()> {
    if args.lists.len() < 2 {
        return Err(CliError::Usage(format!(
            "combine needs at least two ranked lists, got {}",
            args.lists.len()
        )));
    }
    let ce = ce_config(&args.ce, config)?;
    let k = pick(args.k, config, "k")?;
    if k == Some(0) {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let weights = pick_list(args.weights, config, "weights")?;
    let weights = (!weights.is_empty()).then_some(weights);
    let lists = args
        .lists
        .iter()
        .map(|p| read_list(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let combined = combine_lists(lists, weights, k, &ce)?;
    write_output(
        args.out.as_deref(),
        combined.list.to_csv_string().as_bytes(),
    )?;
    eprintln!(
        "objective={:.6} iterations={} seed={} k={}",
        combined.objective, combined.iterations, ce.seed, combined.k
    );
    Ok(())
}

fn evaluate_record(
    rec: &DefectRecord,
    technique: Technique,
    k: usize,
    ce: &dyn Fn() -> CliResult<CeConfig>,
) -> CliResult<RankedList> {
    let need =
        |what: &str| CliError::Failure(anyhow!("defect {}: technique needs {what}", rec.defect_id));
    let sbfl = || -> CliResult<RankedList> {
        match (&rec.matrix, &rec.spectra) {
            (Some(m), Some(s)) => Ok(sbfl_list(m, s, Some(k))?),
            _ => Err(need("matrix and spectra")),
        }
    };
    let irfl = || -> CliResult<RankedList> {
        match (&rec.source_root, &rec.bug_report) {
            (Some(src), Some(report)) => {
                let setup = IrflSetup {
                    options: CorpusOptions::default(),
                    retrieval: RetrievalConfig {
                        k: Some(k),
                        ..RetrievalConfig::default()
                    },
                };
                Ok(irfl_list(src, report, &setup)?)
            }
            _ => Err(need("source_root and bug_report")),
        }
    };
    let combine = || -> CliResult<RankedList> {
        let lists = if rec.ranked_lists.len() >= 2 {
            rec.ranked_lists
                .iter()
                .map(|p| read_list(p))
                .collect::<anyhow::Result<Vec<_>>>()?
        } else {
            vec![sbfl()?, irfl()?]
        };
        let ce = ce()?;
        let combined = combine_lists(lists, None, Some(k), &ce)
            .with_context(|| format!("defect {}", rec.defect_id))?;
        Ok(combined.list)
    };
    let single = || -> CliResult<RankedList> {
        match rec.ranked_lists.as_slice() {
            [one] => Ok(read_list(one)?),
            _ => Err(need("exactly one ranked list")),
        }
    };
    match technique {
        Technique::List => single(),
        Technique::Sbfl => sbfl(),
        Technique::Irfl => irfl(),
        Technique::Combine => combine(),
        Technique::Auto => match rec.ranked_lists.len() {
            1 => single(),
            n if n >= 2 => combine(),
            _ if rec.matrix.is_some() => sbfl(),
            _ if rec.bug_report.is_some() && rec.source_root.is_some() => irfl(),
            _ => Err(need("a ranked list, a coverage matrix or a bug report")),
        },
    }
}

fn run_evaluate(args: EvaluateArgs, config: &ConfigFile) -> CliResult<()> {
    let technique = match args.technique {
        Some(t) => t,
        None => match config.values.get("technique") {
            Some((v, line)) => Technique::from_str(v, true).map_err(|_| {
                anyhow!("{}:{line}: unknown technique {v:?}", config.path.display())
            })?,
            None => Technique::Auto,
        },
    };
    let mut cutoffs = pick_list(args.cutoffs, config, "cutoffs")?;
    if cutoffs.is_empty() {
        cutoffs = DEFAULT_CUTOFFS.to_vec();
    }
    if cutoffs.contains(&0) {
        return Err(CliError::Usage("cutoffs must be positive".into()));
    }
    let k =
        pick(args.k, config, "k")?.unwrap_or_else(|| cutoffs.iter().copied().max().unwrap_or(100));
    let records = eval::load_manifest(&args.manifest).map_err(anyhow::Error::from)?;
    let ce = || ce_config(&args.ce, config);

    let mut lists = BTreeMap::new();
    let mut truth = BTreeMap::new();
    for rec in &records {
        let list = evaluate_record(rec, technique, k, &ce)?;
        lists.insert(rec.defect_id.clone(), list);
        truth.insert(rec.defect_id.clone(), rec.ground_truth.clone());
    }
    let report = eval::accuracy_at(&lists, &truth, &cutoffs).map_err(anyhow::Error::from)?;
    if let Some(out) = &args.out {
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map_err(anyhow::Error::from)?;
        write_output(Some(out), &buf)?;
    }
    print!("{}", report.summary_table());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# defaults\nseed = 7\nweights=0.7,0.3\n\nk=50\n").unwrap();
        let c = ConfigFile::load(&p).unwrap();
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(c.get_list::<f64>("weights").unwrap(), Some(vec![0.7, 0.3]));
        assert_eq!(pick(Some(9u64), &c, "seed").unwrap(), Some(9));
        assert_eq!(pick(None::<usize>, &c, "k").unwrap(), Some(50));

        std::fs::write(&p, "seed=7\nbogus=1\n").unwrap();
        let err = ConfigFile::load(&p).unwrap_err().to_string();
        assert!(err.ends_with(":2: unknown key \"bogus\""), "{err}");

        std::fs::write(&p, "seed=abc\n").unwrap();
        let c = ConfigFile::load(&p).unwrap();
        assert!(c
            .get::<u64>("seed")
            .unwrap_err()
            .to_string()
            .contains(":1: invalid value"));
    }

    #[test]
    fn write_output_replaces_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.csv");
        write_output(Some(&out), b"one").unwrap();
        write_output(Some(&out), b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
