use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use touristwsd::adjacency::WordAdjacencyNetwork;
use touristwsd::attgraph::{build_training_graph, median_same_class_distance, write_graph_dump, GraphConfig};
use touristwsd::classify::{LowLevelKind, LowLevelModel};
use touristwsd::corpus::{load_annotations, Document, Preprocessor, SenseAnnotation, SenseInventory};
use touristwsd::eval::synthetic::{generate_corpus, lattice_and_scatter, CorpusSpec};
use touristwsd::eval::{
    cross_validate, lambda_grid, lambda_sweep, p_value_monte_carlo, toy_experiment, ExperimentConfig, FoldPlan,
    Paradigm, ToyConfig, ToyData, STRUCTURED,
};
use touristwsd::features::{semantic_features, standardize, topological_features};
use touristwsd::tourist::write_walk_curves;
use touristwsd::Dataset64;

use crate::{
    BuildNetArgs, Cli, Command, CorpusArgs, EvaluateArgs, ExtractArgs, ModelArgs, PreprocessArgs, SweepArgs, SynthArgs,
    ToyArgs, WalkCurvesArgs,
};

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

struct Session {
    config: ExperimentConfig,
    preprocessor: Preprocessor,
}

pub fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let preprocessor = Preprocessor::from_paths(cli.stopwords.as_deref(), cli.lemmas.as_deref())?;
    let ctx = Session { config, preprocessor };
    match cli.command {
        Command::Preprocess(a) => preprocess(&ctx, a),
        Command::BuildNet(a) => build_net(&ctx, a),
        Command::Extract(a) => extract(ctx, a),
        Command::Evaluate(a) => evaluate(ctx, a),
        Command::Sweep(a) => sweep(ctx, a),
        Command::WalkCurves(a) => walk_curves(ctx, a),
        Command::Toy(a) => toy(&ctx, a),
        Command::Synth(a) => synth(&ctx, a),
    }
}

fn preprocess(ctx: &Session, a: PreprocessArgs) -> Result<()> {
    let docs = ctx.preprocessor.process_dir(&a.input)?;
    let mut out = output(a.out.as_deref())?;
    for d in &docs {
        writeln!(out, "{}\t{}", d.id, d.stream().lemmas.join(" "))?;
    }
    out.flush()?;
    log::info!("preprocessed {} documents", docs.len());
    Ok(())
}

fn load_corpus(ctx: &Session, a: &CorpusArgs) -> Result<(Vec<Document>, Vec<SenseAnnotation>)> {
    let docs = ctx.preprocessor.process_dir(&a.input)?;
    let inventory = if a.any_word {
        SenseInventory::permissive()
    } else {
        SenseInventory::default()
    };
    let annotations = load_annotations(&a.annotations, &inventory, &docs)
        .with_context(|| format!("loading {}", a.annotations.display()))?;
    Ok((docs, annotations))
}

fn build_net(ctx: &Session, a: BuildNetArgs) -> Result<()> {
    let (docs, annotations) = load_corpus(ctx, &a.corpus)?;
    let streams: Vec<_> = docs.iter().map(Document::stream).collect();
    let net = WordAdjacencyNetwork::build(&streams, &annotations);
    let mut out = output(Some(&a.out))?;
    net.write_edge_list(&mut out)?;
    out.flush()?;
    eprintln!("nodes {} edges {} total weight {}", net.node_count(), net.edge_count(), net.total_weight());
    Ok(())
}

fn extract(mut ctx: Session, a: ExtractArgs) -> Result<()> {
    if let Some(p) = &a.paradigm {
        ctx.config.set("paradigm", p)?;
    }
    if let Some(w) = a.window {
        ctx.config.window = w;
    }
    let (docs, annotations) = load_corpus(&ctx, &a.corpus)?;
    let words: BTreeSet<&str> = annotations.iter().map(|x| x.word.as_str()).collect();
    let selected: Vec<SenseAnnotation> = match &a.word {
        Some(w) => annotations.iter().filter(|x| &x.word == w).cloned().collect(),
        None if words.len() <= 1 => annotations.clone(),
        None => bail!("annotations cover several words ({words:?}); pick one with --word"),
    };
    if selected.is_empty() {
        bail!("no annotated occurrences selected");
    }
    let streams: Vec<_> = docs.iter().map(Document::stream).collect();
    let data: Dataset64 = match ctx.config.paradigm {
        Paradigm::Semantic => semantic_features(&streams, &selected, ctx.config.window),
        Paradigm::Topological => {
            let net = WordAdjacencyNetwork::build(&streams, &annotations);
            topological_features(&net, &selected)?
        }
    };
    let mut out = output(a.out.as_deref())?;
    data.write_csv(&mut out)?;
    out.flush()?;
    eprintln!("{} instances, {} features", data.len(), data.dim());
    Ok(())
}

fn apply_model_args(config: &mut ExperimentConfig, m: &ModelArgs) -> Result<()> {
    if let Some(v) = &m.low_level {
        config.set("low_level", v)?;
    }
    if let Some(v) = m.alpha_t {
        config.alpha_t = v;
    }
    if let Some(v) = m.mu_c {
        config.mu_critical = v;
    }
    if let Some(v) = &m.epsilon {
        config.set("epsilon", v)?;
    }
    if let Some(v) = m.kappa {
        config.kappa = v;
    }
    if let Some(v) = m.fallback_factor {
        config.fallback_factor = v;
    }
    if let Some(v) = m.knn_k {
        config.knn_k = v;
    }
    if let Some(v) = &m.paradigm {
        config.set("paradigm", v)?;
    }
    config.validate()?;
    Ok(())
}

fn read_features(path: &Path) -> Result<Dataset64> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let source = path.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    Ok(Dataset64::read_csv(file, source)?)
}

fn evaluate(mut ctx: Session, a: EvaluateArgs) -> Result<()> {
    apply_model_args(&mut ctx.config, &a.model)?;
    if let Some(l) = a.lambda {
        ctx.config.lambda = l;
    }
    ctx.config.validate()?;
    let config = &ctx.config;
    let data = read_features(&a.model.features)?;
    let labels = data.require_labels()?;
    let plan = FoldPlan::for_labels(&labels, config.seed)?;
    let mut pipeline = config.pipeline();
    pipeline.low_level_only = config.lambda == 0.0;
    let outcome = cross_validate(&data, &pipeline, &plan)?;
    let report = lambda_sweep(&outcome, &[config.lambda], &a.model.word, config.paradigm, config.low_level);
    let mut out = output(a.out.as_deref())?;
    report.write_csv(&mut out, true)?;
    out.flush()?;
    let row = report.best();
    eprintln!("{} folds, accuracy {:.4}, p-value {:.3e}", plan.len(), row.accuracy, row.p_value);
    if !pipeline.low_level_only && outcome.fallback_count() > 0 {
        eprintln!("{} instances reached no class component and used the low level alone", outcome.fallback_count());
    }
    if let Some(rounds) = a.monte_carlo {
        let p = p_value_monte_carlo(outcome.correct_at(config.lambda), &labels, rounds, config.seed);
        eprintln!("monte carlo p-value ({rounds} rounds): {p:.3e}");
    }
    if a.dump_model.is_some() || a.dump_graph.is_some() {
        let full = standardize(&data.select_columns(&data.varying_columns()));
        if let Some(p) = &a.dump_model {
            let mut w = output(Some(p))?;
            match LowLevelModel::fit(config.low_level, &full, &pipeline.params)? {
                LowLevelModel::C45(t) => write!(w, "{t}")?,
                LowLevelModel::Bayes(b) => b.write_bandwidths(&full.feature_names, &mut w)?,
                LowLevelModel::Knn(_) => writeln!(w, "knn k={} (instance-based, no fitted parameters)", config.knn_k)?,
            }
            w.flush()?;
        }
        if let Some(p) = &a.dump_graph {
            let graphs = build_training_graph(&full, &pipeline.graph_config(&full))?;
            let mut w = output(Some(p))?;
            write_graph_dump(&graphs, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn sweep(mut ctx: Session, a: SweepArgs) -> Result<()> {
    apply_model_args(&mut ctx.config, &a.model)?;
    if let Some(s) = a.step {
        ctx.config.lambda_step = s;
    }
    ctx.config.validate()?;
    let config = &ctx.config;
    let data = read_features(&a.model.features)?;
    let plan = FoldPlan::for_labels(&data.require_labels()?, config.seed)?;
    let grid = lambda_grid(config.lambda_step);
    let kinds: Vec<LowLevelKind> = if a.all {
        LowLevelKind::ALL.to_vec()
    } else {
        vec![config.low_level]
    };
    let mut out = output(a.out.as_deref())?;
    for (i, kind) in kinds.into_iter().enumerate() {
        let pipeline = config.pipeline().with_low_level(kind);
        let outcome = cross_validate(&data, &pipeline, &plan)?;
        let report = lambda_sweep(&outcome, &grid, &a.model.word, config.paradigm, kind);
        report.write_csv(&mut out, i == 0)?;
        let best = report.best();
        eprintln!(
            "{kind}: accuracy {:.4} at lambda 0, best {:.4} at lambda {:.2}",
            report.baseline().map_or(f64::NAN, |r| r.accuracy),
            best.accuracy,
            report.best_lambda
        );
    }
    out.flush()?;
    Ok(())
}

fn walk_curves(mut ctx: Session, a: WalkCurvesArgs) -> Result<()> {
    if let Some(v) = &a.epsilon {
        ctx.config.set("epsilon", v)?;
    }
    if let Some(k) = a.kappa {
        ctx.config.kappa = k;
    }
    if let Some(m) = a.mu_max {
        ctx.config.mu_max = m;
    }
    ctx.config.validate()?;
    let mut data = read_features(&a.features)?;
    if a.standardize {
        data = standardize(&data);
    }
    let epsilon = match ctx.config.epsilon {
        Some(e) => e,
        None => median_same_class_distance(&data).context("no same-class pairs")?,
    };
    let graphs = build_training_graph(&data, &GraphConfig::new(epsilon, ctx.config.kappa))?;
    let mut out = output(a.out.as_deref())?;
    write_walk_curves(&graphs, ctx.config.mu_max, &mut out)?;
    out.flush()?;
    Ok(())
}

fn toy(ctx: &Session, a: ToyArgs) -> Result<()> {
    let data = match &a.data {
        Some(p) => ToyData::parse(&std::fs::read_to_string(p)?)?,
        None => ToyData::shipped(),
    };
    if let Some(p) = &a.dump_data {
        std::fs::write(p, data.to_csv())?;
    }
    let mut config = ToyConfig::default();
    config.high_level = ctx.config.high_level();
    if let Some(k) = a.knn_k {
        config.knn_k = k;
    }
    let report = toy_experiment(&data, &config)?;
    let mut out = output(a.out.as_deref())?;
    write!(out, "{}", report.to_csv())?;
    out.flush()?;
    for lambda in [0.0, 0.5, 0.8] {
        eprintln!("lambda {lambda:.1}: class {}", report.label_at(lambda).unwrap_or_default());
    }
    match report.flip_lambda() {
        Some(l) => eprintln!("probe joins class {STRUCTURED} from lambda {l:.2}"),
        None => eprintln!("probe never joins class {STRUCTURED}"),
    }
    Ok(())
}

fn synth(ctx: &Session, a: SynthArgs) -> Result<()> {
    match a.kind.as_str() {
        "corpus" => {
            let spec = CorpusSpec {
                occurrences_per_sense: a.per_sense,
                seed: ctx.config.seed,
                ..Default::default()
            };
            let corpus = generate_corpus(&spec);
            std::fs::create_dir_all(&a.out)?;
            for (id, text) in &corpus.texts {
                std::fs::write(a.out.join(format!("{id}.txt")), format!("{text}\n"))?;
            }
            let ann = a.annotations.clone().unwrap_or_else(|| a.out.join("annotations.tsv"));
            std::fs::write(&ann, corpus.annotations_tsv())?;
            eprintln!("{} documents, annotations in {}", corpus.texts.len(), ann.display());
        }
        _ => {
            let data = lattice_and_scatter(6, 0.02, ctx.config.seed);
            let mut out = output(Some(&a.out))?;
            data.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
