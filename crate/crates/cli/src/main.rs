//! Command-line front end for culturegeo.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use culturegeo::dimension::{
    build_dimension, dimension_angle, filter_lexicon, load_antonym_lexicon, project, scan_nearest_dimensions,
    top_component, variance_explained, BuildOptions, Centering, DimensionSpec,
};
use culturegeo::embedding::{load_embedding, save_embedding};
use culturegeo::pipeline::{
    angle_series, cross_corpus_compare, load_names, name_gender_audit, projection_series, render_to_string,
    validation_report, ConfidenceSetup, EmbeddingSet, Manifest, OutputFormat, Report,
};
use culturegeo::resampling::{run_plan, Mode, ResamplingPlan, SubsampleVariant};
use culturegeo::trainer::{context_vectors, train, Architecture, Corpus, CorpusFormat, TrainingConfig};
use culturegeo::validation::{OrientationMap, PopulationTable, Scale, SurveyDataset};
use culturegeo::{Embedding, Format, LoadOptions};

#[derive(Parser)]
#[command(name = "culturegeo", version, about = "Cultural dimensions of word embeddings")]
struct Cli {
    /// Training options as key=value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Trainer seed for `train`; base seed of any resampling plan.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel analyses (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format: json, csv or svg.
    #[arg(long, global = true, default_value = "json")]
    format: OutputFormat,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train word vectors on a corpus.
    Train(TrainArgs),
    /// Nearest neighbors of a word.
    Neighbors {
        #[command(flatten)]
        emb: EmbArgs,
        word: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Solve a : b :: c : ?
    Analogy {
        #[command(flatten)]
        emb: EmbArgs,
        a: String,
        b: String,
        c: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Build and apply cultural dimensions.
    #[command(subcommand)]
    Dim(DimCommand),
    /// Rank antonym-pair dimensions by cosine to a focal dimension.
    Scan {
        #[command(flatten)]
        emb: EmbArgs,
        /// Antonym lexicon, one `word1<TAB>word2` per line.
        #[arg(long)]
        lexicon: PathBuf,
        /// Focal dimension: gender, class, race or a JSON file.
        #[arg(long)]
        spec: String,
        /// Keep pairs whose words both rank in the top N of the vocabulary.
        #[arg(long)]
        top_n: Option<usize>,
        #[arg(long, default_value_t = 5)]
        top_k: usize,
    },
    /// Confidence intervals by retraining on resampled corpora.
    #[command(subcommand)]
    Ci(CiCommand),
    /// Compare survey ratings with projections.
    Validate(ValidateArgs),
    /// Statistics across a labeled set of embeddings.
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Word projections in two embeddings side by side.
    Compare(CompareArgs),
    /// Classify first names by gender projection with a label lag.
    Names {
        #[arg(long)]
        set: PathBuf,
        /// CSV with label,name,recorded_sex.
        #[arg(long)]
        names: PathBuf,
        #[arg(long, default_value_t = 2)]
        lag: usize,
        #[arg(long, default_value = "gender")]
        spec: String,
    },
}

#[derive(Args, Clone)]
struct EmbArgs {
    /// Embedding file.
    #[arg(long, short)]
    embedding: PathBuf,
    /// word2vec-binary, word2vec-text or glove-text.
    #[arg(long, default_value = "word2vec-binary")]
    emb_format: Format,
    /// Lowercase tokens on load (first occurrence wins).
    #[arg(long)]
    case_fold: bool,
    /// Keep only the first N tokens.
    #[arg(long)]
    max_vocab: Option<usize>,
}

impl EmbArgs {
    fn load(&self, manifest: &mut Manifest) -> Result<Embedding> {
        let opts = LoadOptions {
            case_fold: self.case_fold,
            max_vocab: self.max_vocab,
        };
        let (emb, _) = load_embedding(&self.embedding, self.emb_format, &opts)
            .with_context(|| format!("loading {}", self.embedding.display()))?;
        manifest.input("embedding", &self.embedding);
        manifest.parameter("embedding_format", self.emb_format);
        manifest.parameter("case_fold", self.case_fold);
        if let Some(n) = self.max_vocab {
            manifest.parameter("max_vocab", n);
        }
        Ok(emb)
    }
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// plain (one document per line) or weighted (`tokens<TAB>count`).
    #[arg(long, default_value = "plain")]
    corpus_format: CorpusFormat,
    /// Lowercase corpus text.
    #[arg(long)]
    lowercase: bool,
}

impl CorpusArgs {
    fn load(&self, manifest: &mut Manifest) -> Result<Corpus> {
        manifest.input("corpus", &self.corpus);
        manifest.parameter("corpus_format", self.corpus_format);
        manifest.parameter("lowercase", self.lowercase);
        Corpus::read(&self.corpus, self.corpus_format, self.lowercase)
            .with_context(|| format!("reading {}", self.corpus.display()))
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Where to write the word vectors.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "word2vec-binary")]
    out_format: Format,
    /// Also write the context (output-side) vectors.
    #[arg(long)]
    context_out: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    architecture: Option<Architecture>,
    #[arg(long)]
    negative: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    min_count: Option<u64>,
    /// Frequent-word downsampling threshold.
    #[arg(long)]
    sample: Option<f64>,
    /// Training threads; more than one is faster but not reproducible.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum DimCommand {
    /// Build a dimension and report the pairs used.
    Build {
        #[command(flatten)]
        emb: EmbArgs,
        #[arg(long)]
        spec: String,
        /// Include the unit vector in the output.
        #[arg(long)]
        vector: bool,
    },
    /// Project words onto a dimension.
    Project {
        #[command(flatten)]
        emb: EmbArgs,
        #[arg(long)]
        spec: String,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Cosine and angle between two dimensions.
    Angle {
        #[command(flatten)]
        emb: EmbArgs,
        #[arg(long)]
        spec_a: String,
        #[arg(long)]
        spec_b: String,
    },
    /// Share of variance along dimensions and along the top principal component.
    Variance {
        #[command(flatten)]
        emb: EmbArgs,
        #[arg(long = "spec", default_values_t = ["gender".to_string(), "class".to_string(), "race".to_string()])]
        specs: Vec<String>,
        /// Skip mean-centering.
        #[arg(long)]
        uncentered: bool,
        /// Also compute the top principal component.
        #[arg(long)]
        top_pc: bool,
    },
}

#[derive(Args)]
struct CiArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Resampling plan (JSON).
    #[arg(long)]
    plan: PathBuf,
    /// Use this embedding for the full-sample estimate instead of training one.
    #[arg(long)]
    full_embedding: Option<PathBuf>,
    #[arg(long, default_value = "word2vec-binary")]
    full_format: Format,
}

#[derive(Subcommand)]
enum CiCommand {
    Bootstrap(CiArgs),
    Subsample {
        #[command(flatten)]
        args: CiArgs,
        /// as_written or quantile_standard; overrides the plan.
        #[arg(long)]
        variant: Option<SubsampleVariant>,
    },
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    emb: EmbArgs,
    #[arg(long)]
    responses: PathBuf,
    #[arg(long)]
    demographics: PathBuf,
    /// Population cell shares; omit for unweighted means.
    #[arg(long)]
    population: Option<PathBuf>,
    /// item,domain overrides for the built-in item list.
    #[arg(long)]
    items: Option<PathBuf>,
    #[arg(long)]
    lowercase_items: bool,
    #[arg(long, default_value = "gender")]
    gender: String,
    #[arg(long, default_value = "class")]
    class: String,
    #[arg(long, default_value = "race")]
    race: String,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// JSON orientation map, e.g. {"gender":1,"class":1,"race":-1}.
    #[arg(long)]
    orientation: Option<String>,
}

#[derive(Subcommand)]
enum SeriesCommand {
    Project {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        spec: String,
        #[arg(long, value_delimiter = ',', required = true)]
        words: Vec<String>,
        /// Resampling plan; adds confidence intervals.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    Angle {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        spec_a: String,
        #[arg(long)]
        spec_b: String,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value = "a")]
    label_a: String,
    #[arg(long, default_value = "b")]
    label_b: String,
    #[arg(long, default_value = "word2vec-binary")]
    emb_format: Format,
    #[arg(long)]
    case_fold: bool,
    #[arg(long)]
    spec: String,
    #[arg(long, value_delimiter = ',', required = true)]
    words: Vec<String>,
    #[arg(long, requires_all = ["corpus_a", "corpus_b"])]
    plan: Option<PathBuf>,
    #[arg(long)]
    corpus_a: Option<PathBuf>,
    #[arg(long)]
    corpus_b: Option<PathBuf>,
    #[arg(long, default_value = "plain")]
    corpus_format: CorpusFormat,
}

struct Ctx {
    config: Option<PathBuf>,
    seed: Option<u64>,
    format: OutputFormat,
    output: Option<PathBuf>,
}

impl Ctx {
    fn manifest(&self, command: &str) -> Manifest {
        let mut m = Manifest::new(command);
        if let Some(c) = &self.config {
            m.input("config", c);
        }
        m
    }

    fn trainer_config(&self, base: TrainingConfig) -> Result<TrainingConfig> {
        match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(base.apply_key_values(&text)?)
            }
            None => Ok(base),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                Ok(out.flush()?)
            }
        }
    }

    /// JSON with the manifest alongside, or CSV from `rows`.
    fn emit_table<T: Serialize>(
        &self,
        manifest: &Manifest,
        result: &T,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<()> {
        match self.format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&json!({ "manifest": manifest, "result": result }))?;
                s.push('\n');
                self.emit(&s)
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(header)?;
                for r in rows {
                    w.write_record(&r)?;
                }
                self.emit(&String::from_utf8(w.into_inner()?)?)
            }
            OutputFormat::Svg => bail!("svg output is available for series, compare, names and validate"),
        }
    }

    fn emit_report(&self, report: &Report) -> Result<()> {
        self.emit(&render_to_string(report, self.format)?)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn spec(name_or_path: &str, manifest: &mut Manifest) -> Result<DimensionSpec> {
    if Path::new(name_or_path).exists() {
        manifest.input("dimension", name_or_path);
    }
    DimensionSpec::resolve(name_or_path).with_context(|| format!("resolving dimension {name_or_path:?}"))
}

fn load_plan(path: &Path, ctx: &Ctx, manifest: &mut Manifest) -> Result<ResamplingPlan> {
    let mut plan = ResamplingPlan::load(path).with_context(|| format!("reading plan {}", path.display()))?;
    plan.trainer = ctx.trainer_config(plan.trainer)?;
    if let Some(s) = ctx.seed {
        plan.base_seed = s;
    }
    plan.validate()?;
    manifest.input("plan", path);
    manifest.seed("base_seed", plan.base_seed);
    manifest.seed("trainer_seed", plan.trainer.seed);
    Ok(plan)
}

fn run_train(ctx: &Ctx, a: &TrainArgs) -> Result<()> {
    let mut m = ctx.manifest("train");
    let mut cfg = ctx.trainer_config(TrainingConfig::default())?;
    if let Some(v) = a.dim {
        cfg.dim = v;
    }
    if let Some(v) = a.window {
        cfg.window = v;
    }
    if let Some(v) = a.architecture {
        cfg.architecture = v;
    }
    if let Some(v) = a.negative {
        cfg.negative = v;
    }
    if let Some(v) = a.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = a.min_count {
        cfg.min_count = v;
    }
    if let Some(v) = a.sample {
        cfg.subsample_t = v;
    }
    if let Some(v) = a.workers {
        cfg.workers = v;
    }
    if let Some(s) = ctx.seed {
        cfg.seed = s;
    }
    let corpus = a.corpus.load(&mut m)?;
    let model = train(&corpus, &cfg)?;
    let emb = model.embedding()?;
    save_embedding(&emb, &a.out, a.out_format).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(p) = &a.context_out {
        save_embedding(&context_vectors(&model)?, p, a.out_format)?;
    }
    m.seed("trainer_seed", cfg.seed).parameter("trainer", &cfg);
    let result = json!({
        "output": a.out.display().to_string(),
        "vocabulary": emb.len(),
        "dim": emb.dim(),
        "records": corpus.record_count(),
        "tokens": corpus.weighted_token_count(),
        "deterministic": cfg.is_deterministic(),
        "epoch_losses": model.epoch_losses,
    });
    let rows = model
        .epoch_losses
        .iter()
        .enumerate()
        .map(|(i, l)| vec![(i + 1).to_string(), l.to_string()])
        .collect();
    ctx.emit_table(&m, &result, &["epoch", "loss"], rows)
}

fn run_dim(ctx: &Ctx, cmd: &DimCommand) -> Result<()> {
    match cmd {
        DimCommand::Build { emb, spec: s, vector } => {
            let mut m = ctx.manifest("dim build");
            let e = emb.load(&mut m)?;
            let d = build_dimension(&e, &spec(s, &mut m)?, BuildOptions::default())?;
            let result = json!({
                "name": d.name,
                "pairs_used": d.pairs_used,
                "pairs_skipped": d.pairs_skipped,
                "vector": vector.then(|| d.vector().to_vec()),
            });
            let rows = d
                .pairs_used
                .iter()
                .map(|p| vec![p.first().into(), p.second().into(), "used".into()])
                .chain(
                    d.pairs_skipped
                        .iter()
                        .map(|s| vec![s.pair.first().into(), s.pair.second().into(), s.reason.clone()]),
                )
                .collect();
            ctx.emit_table(&m, &result, &["first", "second", "status"], rows)
        }
        DimCommand::Project { emb, spec: s, words } => {
            let mut m = ctx.manifest("dim project");
            let e = emb.load(&mut m)?;
            let d = build_dimension(&e, &spec(s, &mut m)?, BuildOptions::default())?;
            let mut rows = Vec::new();
            let mut result = Vec::new();
            for w in words {
                let (value, reason) = match project(&e, w, &d) {
                    Ok(v) => (Some(v), None),
                    Err(err) if err.is_replicate_failure() => (None, Some(err.to_string())),
                    Err(err) => return Err(err.into()),
                };
                rows.push(vec![w.clone(), opt(value), reason.clone().unwrap_or_default()]);
                result.push(json!({ "word": w, "projection": value, "reason": reason }));
            }
            ctx.emit_table(
                &m,
                &json!({ "dimension": d.name, "projections": result }),
                &["word", "projection", "reason"],
                rows,
            )
        }
        DimCommand::Angle { emb, spec_a, spec_b } => {
            let mut m = ctx.manifest("dim angle");
            let e = emb.load(&mut m)?;
            let a = build_dimension(&e, &spec(spec_a, &mut m)?, BuildOptions::default())?;
            let b = build_dimension(&e, &spec(spec_b, &mut m)?, BuildOptions::default())?;
            let angle = dimension_angle(&a, &b)?;
            let rows = vec![vec![
                a.name.clone(),
                b.name.clone(),
                angle.cosine.to_string(),
                angle.degrees.to_string(),
            ]];
            ctx.emit_table(
                &m,
                &json!({ "first": a.name, "second": b.name, "angle": angle }),
                &["first", "second", "cosine", "degrees"],
                rows,
            )
        }
        DimCommand::Variance {
            emb,
            specs,
            uncentered,
            top_pc,
        } => {
            let mut m = ctx.manifest("dim variance");
            let e = emb.load(&mut m)?;
            let centering = if *uncentered {
                Centering::Uncentered
            } else {
                Centering::Centered
            };
            m.parameter("centering", centering);
            let mut rows = Vec::new();
            let mut result = Vec::new();
            for s in specs {
                let d = build_dimension(&e, &spec(s, &mut m)?, BuildOptions::default())?;
                let v = variance_explained(&e, &d, centering)?;
                rows.push(vec![d.name.clone(), v.to_string()]);
                result.push(json!({ "dimension": d.name, "variance_explained": v, "pairs_used": d.pairs_used.len() }));
            }
            let pc = if *top_pc {
                let pc = top_component(&e, centering)?;
                rows.push(vec!["top_principal_component".into(), pc.variance_fraction.to_string()]);
                Some(
                    json!({ "variance_explained": pc.variance_fraction, "iterations": pc.iterations, "converged": pc.converged }),
                )
            } else {
                None
            };
            ctx.emit_table(
                &m,
                &json!({ "dimensions": result, "top_principal_component": pc }),
                &["dimension", "variance_explained"],
                rows,
            )
        }
    }
}

fn run_ci(ctx: &Ctx, cmd: &CiCommand) -> Result<()> {
    let (args, mode, variant) = match cmd {
        CiCommand::Bootstrap(a) => (a, Mode::Bootstrap, None),
        CiCommand::Subsample { args, variant } => (args, Mode::Subsample, *variant),
    };
    let mut m = ctx.manifest(&format!("ci {mode}"));
    let mut plan = load_plan(&args.plan, ctx, &mut m)?;
    if plan.mode != mode {
        bail!("plan {} has mode {}, expected {mode}", args.plan.display(), plan.mode);
    }
    if let Some(v) = variant {
        plan.variant = v;
    }
    let corpus = args.corpus.load(&mut m)?;
    let full = match &args.full_embedding {
        Some(p) => {
            m.input("full_embedding", p);
            Some(load_embedding(p, args.full_format, &LoadOptions::default())?.0)
        }
        None => None,
    };
    let ci = run_plan(&corpus, &plan, full.as_ref())?;
    m.parameter("plan", &plan);
    let rows = vec![vec![
        ci.statistic.clone(),
        ci.estimate.to_string(),
        ci.lower.to_string(),
        ci.upper.to_string(),
        ci.failures.len().to_string(),
    ]];
    ctx.emit_table(&m, &ci, &["statistic", "estimate", "lower", "upper", "failures"], rows)
}

fn run_validate(ctx: &Ctx, a: &ValidateArgs) -> Result<()> {
    let mut m = ctx.manifest("validate");
    let e = a.emb.load(&mut m)?;
    let mut survey = SurveyDataset::load(&a.responses, &a.demographics, a.items.as_deref())?;
    if a.lowercase_items {
        survey = survey.lowercase_items();
    }
    m.input("responses", &a.responses)
        .input("demographics", &a.demographics);
    if let Some(i) = &a.items {
        m.input("items", i);
    }
    let population = match &a.population {
        Some(p) => {
            m.input("population", p);
            Some(PopulationTable::load(p)?)
        }
        None => None,
    };
    let orientation: OrientationMap = match &a.orientation {
        Some(s) => serde_json::from_str(s).context("parsing --orientation")?,
        None => OrientationMap::default(),
    };
    let dims = vec![
        (Scale::Gender, spec(&a.gender, &mut m)?),
        (Scale::Class, spec(&a.class, &mut m)?),
        (Scale::Race, spec(&a.race, &mut m)?),
    ];
    let mut report = validation_report(&survey, population.as_ref(), &e, &dims, a.alpha, &orientation)?;
    m.absorb(&report.manifest);
    report.manifest = m;
    ctx.emit_report(&Report::Validation(report))
}

fn run_series(ctx: &Ctx, cmd: &SeriesCommand) -> Result<()> {
    let (set_path, plan_path) = match cmd {
        SeriesCommand::Project { set, plan, .. } | SeriesCommand::Angle { set, plan, .. } => (set, plan),
    };
    let mut m = ctx.manifest(match cmd {
        SeriesCommand::Project { .. } => "series project",
        SeriesCommand::Angle { .. } => "series angle",
    });
    m.input("set", set_path);
    let set = EmbeddingSet::load(set_path).with_context(|| format!("reading {}", set_path.display()))?;
    let plan = plan_path.as_deref().map(|p| load_plan(p, ctx, &mut m)).transpose()?;
    let mut report = match cmd {
        SeriesCommand::Project { spec: s, words, .. } => {
            projection_series(&set, &spec(s, &mut m)?, words, plan.as_ref())?
        }
        SeriesCommand::Angle { spec_a, spec_b, .. } => {
            angle_series(&set, &spec(spec_a, &mut m)?, &spec(spec_b, &mut m)?, plan.as_ref())?
        }
    };
    m.absorb(&report.manifest);
    report.manifest = m;
    ctx.emit_report(&Report::Series(report))
}

fn run_compare(ctx: &Ctx, a: &CompareArgs) -> Result<()> {
    let mut m = ctx.manifest("compare");
    let opts = LoadOptions {
        case_fold: a.case_fold,
        ..LoadOptions::default()
    };
    let emb_a = load_embedding(&a.a, a.emb_format, &opts)?.0;
    let emb_b = load_embedding(&a.b, a.emb_format, &opts)?.0;
    m.input(format!("embedding:{}", a.label_a), &a.a);
    m.input(format!("embedding:{}", a.label_b), &a.b);
    let spec = spec(&a.spec, &mut m)?;
    let mut corpora = None;
    let plan = match &a.plan {
        Some(p) => {
            let plan = load_plan(p, ctx, &mut m)?;
            let (ca, cb) = (a.corpus_a.as_ref().expect("clap"), a.corpus_b.as_ref().expect("clap"));
            m.input(format!("corpus:{}", a.label_a), ca);
            m.input(format!("corpus:{}", a.label_b), cb);
            corpora = Some((
                Corpus::read(ca, a.corpus_format, a.case_fold)?,
                Corpus::read(cb, a.corpus_format, a.case_fold)?,
            ));
            Some(plan)
        }
        None => None,
    };
    let setup = plan
        .as_ref()
        .zip(corpora.as_ref())
        .map(|(plan, (ca, cb))| ConfidenceSetup {
            plan,
            corpus_a: ca,
            corpus_b: cb,
        });
    let mut report = cross_corpus_compare((&a.label_a, &emb_a), (&a.label_b, &emb_b), &spec, &a.words, setup)?;
    m.absorb(&report.manifest);
    report.manifest = m;
    ctx.emit_report(&Report::Compare(report))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let ctx = Ctx {
        config: cli.config,
        seed: cli.seed,
        format: cli.format,
        output: cli.output,
    };
    match &cli.command {
        Command::Train(a) => run_train(&ctx, a),
        Command::Neighbors { emb, word, count } => {
            let mut m = ctx.manifest("neighbors");
            let e = emb.load(&mut m)?;
            let q = e.vector(word)?.to_vec();
            let hits = e.nearest_neighbors(&q, *count, &[word.as_str()])?;
            let rows = hits
                .iter()
                .map(|h| vec![h.token.clone(), h.cosine.to_string()])
                .collect();
            ctx.emit_table(
                &m,
                &json!({ "word": word, "neighbors": hits }),
                &["token", "cosine"],
                rows,
            )
        }
        Command::Analogy { emb, a, b, c, count } => {
            let mut m = ctx.manifest("analogy");
            let e = emb.load(&mut m)?;
            let hits = e.analogy_top(a, b, c, *count)?;
            let rows = hits
                .iter()
                .map(|h| vec![h.token.clone(), h.cosine.to_string()])
                .collect();
            ctx.emit_table(
                &m,
                &json!({ "query": [a, b, c], "answers": hits }),
                &["token", "cosine"],
                rows,
            )
        }
        Command::Dim(cmd) => run_dim(&ctx, cmd),
        Command::Scan {
            emb,
            lexicon,
            spec: s,
            top_n,
            top_k,
        } => {
            let mut m = ctx.manifest("scan");
            let e = emb.load(&mut m)?;
            m.input("lexicon", lexicon);
            let mut lex = load_antonym_lexicon(lexicon)?;
            if let Some(n) = top_n {
                lex = filter_lexicon(&lex, &e, *n);
                m.parameter("top_n", n);
            }
            let focal = build_dimension(&e, &spec(s, &mut m)?, BuildOptions::default())?;
            let scan = scan_nearest_dimensions(&e, &focal, &lex, *top_k)?;
            let rows = scan
                .entries
                .iter()
                .map(|x| vec![x.pair.first().into(), x.pair.second().into(), x.cosine.to_string()])
                .collect();
            ctx.emit_table(&m, &scan, &["first", "second", "cosine"], rows)
        }
        Command::Ci(cmd) => run_ci(&ctx, cmd),
        Command::Validate(a) => run_validate(&ctx, a),
        Command::Series(cmd) => run_series(&ctx, cmd),
        Command::Compare(a) => run_compare(&ctx, a),
        Command::Names {
            set,
            names,
            lag,
            spec: s,
        } => {
            let mut m = ctx.manifest("names");
            m.input("set", set).input("names", names);
            let es = EmbeddingSet::load(set)?;
            let records = load_names(names)?;
            let mut report = name_gender_audit(&es, &records, *lag, &spec(s, &mut m)?)?;
            m.absorb(&report.manifest);
            report.manifest = m;
            ctx.emit_report(&Report::Names(report))
        }
    }
}
