//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use touristwsd::adjacency::WordAdjacencyNetwork;
use touristwsd::attgraph::{build_training_graph, ClassGraph, GraphConfig};
use touristwsd::classify::{
    entropy, hybrid_predict, information_gain, HighLevelClassifier, HighLevelConfig, KnnClassifier, LowLevelKind,
    LowLevelModel, LowLevelParams, MembershipVector, ParzenBayes,
};
use touristwsd::corpus::{Preprocessor, TokenStream};
use touristwsd::eval::synthetic::{gaussian_blobs, generate_corpus, lattice_and_scatter, CorpusSpec};
use touristwsd::eval::{
    cross_validate, default_lambda_grid, lambda_sweep, toy_experiment, FoldPlan, Paradigm, PipelineConfig, ToyConfig,
    ToyData, STRUCTURED, UNSTRUCTURED,
};
use touristwsd::features::{semantic_features, topological_features, Dataset, Standardizer};
use touristwsd::tourist::{walk, write_walk_curves};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Brute-force walk oracle

/// Simulates the walk over explicit `(vertex, window)` states until a state
/// repeats. The walker may also stay put, at distance 0; since the current
/// vertex is always in a non-empty window, that only happens when `mu = 0`.
fn oracle_walk(points: &[Vec<f64>], adj: &[Vec<usize>], start: usize, mu: usize) -> (usize, usize) {
    let dist = |a: usize, b: usize| -> f64 {
        points[a].iter().zip(&points[b]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    let mut window: Vec<usize> = if mu == 0 { Vec::new() } else { vec![start] };
    let mut current = start;
    let mut traj = vec![start];
    let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    seen.insert((current, window.clone()), 0);
    loop {
        let mut best: Option<(f64, u8, usize)> = None;
        for v in adj[current].iter().copied().chain(std::iter::once(current)) {
            if window.contains(&v) {
                continue;
            }
            // Staying ranks before a coincident neighbor.
            let key = if v == current { (0.0, 0, v) } else { (dist(current, v), 1, v) };
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let Some((_, _, next)) = best else {
            return (traj.len() - 1, 0);
        };
        current = next;
        if mu > 0 {
            window.push(next);
            if window.len() > mu {
                window.remove(0);
            }
        }
        traj.push(next);
        let step = traj.len() - 1;
        if let Some(&first) = seen.get(&(current, window.clone())) {
            let c = step - first;
            // Earliest index from which the vertex sequence is c-periodic.
            let mut t = first;
            while t > 0 && traj[t - 1] == traj[t - 1 + c] {
                t -= 1;
            }
            return (t, c);
        }
        seen.insert((current, window.clone()), step);
    }
}

struct TestGraph {
    graph: ClassGraph<f64>,
    points: Vec<Vec<f64>>,
    adj: Vec<Vec<usize>>,
}

fn random_graphs(count: usize) -> Vec<TestGraph> {
    (0..count as u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let n = rng.gen_range(1..=12);
            // A quarter of the graphs sit on an integer lattice so distance
            // ties are common.
            let lattice = seed % 4 == 0;
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    if lattice {
                        vec![rng.gen_range(0..4) as f64, rng.gen_range(0..4) as f64]
                    } else {
                        vec![rng.gen::<f64>(), rng.gen::<f64>()]
                    }
                })
                .collect();
            let radius = if lattice { 1.5 } else { rng.gen_range(0.3..0.8) };
            let mut edges = Vec::new();
            let mut adj = vec![Vec::new(); n];
            for a in 0..n {
                for b in a + 1..n {
                    let d = ((points[a][0] - points[b][0]).powi(2) + (points[a][1] - points[b][1]).powi(2)).sqrt();
                    if d < radius {
                        edges.push((a, b));
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
            }
            let graph = ClassGraph::from_edges(1, points.clone(), &edges).expect("edges in range");
            TestGraph { graph, points, adj }
        })
        .collect()
}

fn criterion_1(graphs: &[TestGraph]) -> Check {
    let t0 = Instant::now();
    let mut walks = 0;
    for (g_idx, g) in graphs.iter().enumerate() {
        let n = g.points.len();
        for mu in 0..=n {
            for s in 0..n {
                let r = walk(&g.graph, s, mu).map_err(|e| e.to_string())?;
                let expected = oracle_walk(&g.points, &g.adj, s, mu);
                ensure((r.transient, r.cycle) == expected, || {
                    format!("graph {g_idx}, start {s}, mu {mu}: walk {:?}, oracle {expected:?}", (r.transient, r.cycle))
                })?;
                walks += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{walks} walks over {} graphs match the state oracle in {elapsed:.2?}", graphs.len()))
}

fn criterion_2(graphs: &[TestGraph]) -> Check {
    let mut walks = 0;
    for (g_idx, g) in graphs.iter().enumerate() {
        for s in 0..g.points.len() {
            let r = walk(&g.graph, s, 0).map_err(|e| e.to_string())?;
            ensure(r.transient == 0 && r.cycle == 1, || {
                format!("graph {g_idx}, start {s}: t={}, c={}", r.transient, r.cycle)
            })?;
            walks += 1;
        }
    }
    Ok(format!("{walks} memoryless walks all give t=0, c=1"))
}

// ---------------------------------------------------------------------------

fn criterion_3() -> Check {
    let data = gaussian_blobs(500, 3, 3, 0.6, 3);
    let labels = data.require_labels().map_err(|e| e.to_string())?;
    let plan = FoldPlan::for_labels(&labels, 9).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for kind in LowLevelKind::ALL {
        let config = PipelineConfig {
            high_level: HighLevelConfig { mu_critical: 4, ..Default::default() },
            ..PipelineConfig::default().with_low_level(kind)
        };
        let outcome = cross_validate(&data, &config, &plan).map_err(|e| e.to_string())?;
        // Independent low-level run on the same folds.
        let mut direct = BTreeMap::new();
        for f in 0..plan.len() {
            let train = data.subset(&plan.train(f));
            let scaler = Standardizer::fit(&train);
            let model = LowLevelModel::fit(kind, &scaler.transform(&train), &LowLevelParams::default())
                .map_err(|e| e.to_string())?;
            for &i in plan.test(f) {
                direct.insert(i, model.predict(&scaler.transform_row(&data.instances[i].features)));
            }
        }
        let mut with_high = 0;
        for p in &outcome.predictions {
            let (m, label) = hybrid_predict(0.0, &p.low, p.high.as_ref());
            with_high += p.high.is_some() as usize;
            let reference = &direct[&p.index];
            let bits = |v: &MembershipVector<f64>| v.scores.iter().map(|s| s.to_bits()).collect::<Vec<_>>();
            ensure(bits(&m) == bits(reference) && label == reference.argmax(), || {
                format!("{kind}: instance {} differs: {:?} vs {:?}", p.index, m.scores, reference.scores)
            })?;
        }
        summary.push(format!("{kind} ({with_high} with high level)"));
    }
    Ok(format!("500 instances bit-identical at lambda 0 for {}", summary.join(", ")))
}

fn criterion_4() -> Check {
    let data = gaussian_blobs(90, 3, 2, 0.5, 4);
    let config = GraphConfig::new(0.4, 3);
    let hl = HighLevelClassifier::fit(&data, config, HighLevelConfig { mu_critical: 6, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let knn = KnnClassifier::fit(&data, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let (mut done, mut empty, mut worst) = (0, 0, 0.0f64);
    while done < 1000 {
        let x = vec![rng.gen_range(-1.0..3.0), rng.gen_range(-1.0..3.0)];
        let variation = match hl.variation(&x) {
            Ok(v) => v,
            Err(_) => {
                empty += 1;
                continue;
            }
        };
        for mu in 0..variation.delta_transient.len() {
            let st: f64 = variation.delta_transient[mu].iter().sum();
            let sc: f64 = variation.delta_cycle[mu].iter().sum();
            worst = worst.max((st - 1.0).abs()).max((sc - 1.0).abs());
        }
        let h = hl.predict(&x).map_err(|e| e.to_string())?;
        let l = knn.predict(&x);
        let (m, _) = hybrid_predict(rng.gen::<f64>(), &l, Some(&h));
        worst = worst.max((h.sum() - 1.0).abs()).max((m.sum() - 1.0).abs());
        done += 1;
    }
    ensure(worst <= 1e-9, || format!("largest deviation {worst:e}"))?;
    Ok(format!("1000 insertions ({empty} unreachable skipped): H, dt, dc, M sums within {worst:.1e} of 1"))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let k = rng.gen_range(2..6);
        let classes: Vec<u32> = (1..=k).collect();
        let l = MembershipVector::from_weights(classes.clone(), (0..k).map(|_| rng.gen::<f64>()).collect());
        let h = MembershipVector::from_weights(classes, (0..k).map(|_| rng.gen::<f64>()).collect());
        let m = |lambda: f64| hybrid_predict(lambda, &l, Some(&h)).0;
        let (m0, m5, m25) = (m(0.0), m(0.5), m(0.25));
        for j in 0..k as usize {
            worst = worst.max((m25.scores[j] - 0.5 * (m0.scores[j] + m5.scores[j])).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("largest deviation {worst:e}"))?;
    Ok(format!("10000 membership pairs affine within {worst:.1e}"))
}

const POEM: &str = "In the middle of the road there was a stone / there was a stone \
in the middle of the road there was a stone in the middle of the \
road there was a stone. Never should I forget this event / in the \
lifetime of my fatigued retinas / Never should I forget that in \
the middle of the road / there was a stone / there was a stone \
in the middle of the road / in the middle of the road there was \
a stone.";

const POEM_LEMMAS: &str = "middle road stone stone middle road stone middle road stone never \
forget event lifetime fatigue retina never forget middle road stone \
stone middle road middle road stone";

fn criterion_6() -> Check {
    let words: Vec<&str> = POEM_LEMMAS.split_whitespace().collect();
    let mut oracle: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for w in words.windows(2) {
        *oracle.entry((w[0], w[1])).or_insert(0) += 1;
    }
    let from_lemmas = WordAdjacencyNetwork::build(&[TokenStream::from_words("poem", POEM_LEMMAS)], &[]);
    let processed = Preprocessor::english().process("poem", POEM).stream();
    ensure(processed.lemmas == words, || format!("preprocessing gave {:?}", processed.lemmas))?;
    let from_text = WordAdjacencyNetwork::build(&[processed], &[]);
    for net in [&from_lemmas, &from_text] {
        ensure(net.edge_count() == oracle.len(), || {
            format!("{} edges, oracle has {}", net.edge_count(), oracle.len())
        })?;
        for (&(a, b), &w) in &oracle {
            ensure(net.weight(a, b) == w, || format!("w({a}->{b}) = {}, oracle {w}", net.weight(a, b)))?;
        }
    }
    let pinned = [("middle", "road", 6), ("road", "stone", 5), ("stone", "stone", 2), ("stone", "middle", 3)];
    for (a, b, w) in pinned {
        ensure(from_text.weight(a, b) == w, || format!("w({a}->{b}) = {}", from_text.weight(a, b)))?;
    }
    ensure(oracle.values().all(|&w| w >= 1), || "zero weight".into())?;
    Ok(format!(
        "{} bigram edges match the oracle; middle->road 6, road->stone 5, stone->stone 2, stone->middle 3",
        oracle.len()
    ))
}

fn criterion_7() -> Check {
    let data = ToyData::shipped();
    let counts: Vec<usize> = data.train.class_counts().into_values().collect();
    ensure(counts == vec![14, 20], || format!("class sizes {counts:?}"))?;
    let config = ToyConfig::default();
    ensure(config.epsilon == 0.02 && config.kappa == 3, || "toy parameters changed".into())?;
    let r = toy_experiment(&data, &config).map_err(|e| e.to_string())?;
    ensure(r.label_at(0.0) == Some(UNSTRUCTURED), || "probe not misclassified at lambda 0".into())?;
    let flip = r.flip_lambda().ok_or("never flips")?;
    ensure(flip <= 0.8 + 1e-12, || format!("flips only at {flip}"))?;
    ensure(r.label_at(0.8) == Some(STRUCTURED), || "structured class does not win at 0.8".into())?;
    ensure(r.is_monotone(), || "label changes more than once".into())?;
    Ok(format!(
        "labels at 0/0.5/0.8: {}/{}/{}; flips to the structured class at lambda {flip:.2}",
        r.label_at(0.0).unwrap(),
        r.label_at(0.5).unwrap(),
        r.label_at(0.8).unwrap()
    ))
}

fn criterion_8() -> Check {
    let t0 = Instant::now();
    let corpus = generate_corpus(&CorpusSpec::default());
    let per_sense: Vec<usize> = {
        let mut m: BTreeMap<u32, usize> = BTreeMap::new();
        for a in &corpus.annotations {
            *m.entry(a.sense_id).or_insert(0) += 1;
        }
        m.into_values().collect()
    };
    ensure(per_sense.iter().all(|&c| c >= 100), || format!("occurrences per sense {per_sense:?}"))?;
    let semantic: Dataset<f64> = semantic_features(&corpus.streams, &corpus.annotations, 20);
    let net = WordAdjacencyNetwork::build(&corpus.streams, &corpus.annotations);
    let topological: Dataset<f64> = topological_features(&net, &corpus.annotations).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for (paradigm, data) in [(Paradigm::Semantic, &semantic), (Paradigm::Topological, &topological)] {
        let plan = FoldPlan::for_labels(&data.require_labels().unwrap(), 42).map_err(|e| e.to_string())?;
        for kind in LowLevelKind::ALL {
            let outcome = cross_validate(data, &PipelineConfig::default().with_low_level(kind), &plan)
                .map_err(|e| e.to_string())?;
            let report = lambda_sweep(&outcome, &default_lambda_grid(), &corpus.target, paradigm, kind);
            let base = report.baseline().unwrap().accuracy;
            let best = report.best();
            ensure(best.accuracy >= base, || format!("{paradigm}/{kind}: best {} < base {base}", best.accuracy))?;
            ensure(best.accuracy >= 0.9, || format!("{paradigm}/{kind}: best accuracy {}", best.accuracy))?;
            lines.push(format!(
                "{paradigm}/{kind} {base:.3}->{:.3}@{:.2} (lambda=1: {:.3})",
                best.accuracy,
                report.best_lambda,
                outcome.accuracy_at(1.0)
            ));
        }
    }
    let elapsed = t0.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("{} in {elapsed:.1?}", lines.join("; ")))
}

fn onset(values: &[f64]) -> usize {
    let last = *values.last().unwrap();
    let mut mu = values.len() - 1;
    while mu > 0 && values[mu - 1] == last {
        mu -= 1;
    }
    mu
}

fn criterion_9() -> Check {
    let data = lattice_and_scatter(6, 0.02, 2);
    let graphs = build_training_graph(&data, &GraphConfig::new(1.2, 3)).map_err(|e| e.to_string())?;
    let mu_max = 40;
    let mut csv = Vec::new();
    write_walk_curves(&graphs, mu_max, &mut csv).map_err(|e| e.to_string())?;
    let text = String::from_utf8(csv).unwrap();
    let mut curves: BTreeMap<u32, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let e = curves.entry(f[0].parse().unwrap()).or_default();
        e.0.push(f[2].parse().unwrap());
        e.1.push(f[3].parse().unwrap());
    }
    let onsets: Vec<(usize, usize)> = curves.values().map(|(t, c)| (onset(t), onset(c))).collect();
    ensure(onsets.len() == 2, || "expected two classes".into())?;
    ensure(onsets.iter().all(|&(t, c)| t < mu_max && c < mu_max), || {
        format!("steady state not reached by mu {mu_max}: {onsets:?}")
    })?;
    ensure(onsets[0].0 != onsets[1].0 && onsets[0].1 != onsets[1].1, || format!("onsets {onsets:?}"))?;
    Ok(format!(
        "steady-state onset mu: lattice t={} c={}, scatter t={} c={}",
        onsets[0].0, onsets[0].1, onsets[1].0, onsets[1].1
    ))
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // Gain bounds over random binary splits.
    for _ in 0..5000 {
        let k = rng.gen_range(2..5);
        let left: Vec<usize> = (0..k).map(|_| rng.gen_range(0..20)).collect();
        let right: Vec<usize> = (0..k).map(|_| rng.gen_range(0..20)).collect();
        let parent: Vec<usize> = left.iter().zip(&right).map(|(a, b)| a + b).collect();
        if parent.iter().sum::<usize>() == 0 {
            continue;
        }
        let g: f64 = information_gain(&parent, &left, &right);
        let h: f64 = entropy(&parent);
        ensure((0.0..=h + 1e-12).contains(&g), || format!("gain {g} outside [0, {h}]"))?;
    }
    // Bayes boundary between mirrored 1-D classes.
    let xs = [0.6, 0.9, 1.0, 1.3, 1.7];
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![-x]).chain(xs.iter().map(|&x| vec![x])).collect();
    let labels = (0..10).map(|i| Some(if i < 5 { 1 } else { 2 })).collect();
    let bayes = ParzenBayes::fit(&Dataset::from_rows("b", rows, labels).unwrap());
    let p2 = |x: f64| bayes.predict(&[x]).get(2);
    let (mut lo, mut hi) = (-0.6, 0.6);
    ensure(p2(lo) < 0.5 && p2(hi) > 0.5, || "no sign change".into())?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if p2(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let boundary = 0.5 * (lo + hi);
    ensure(boundary.abs() <= 1e-3, || format!("boundary at {boundary}"))?;
    // 1-NN on its own duplicate-free training set.
    let blobs = gaussian_blobs(300, 4, 3, 1.0, 11);
    let knn = KnnClassifier::fit(&blobs, 1);
    let correct = blobs
        .instances
        .iter()
        .filter(|i| knn.predict(&i.features).argmax() == i.label.unwrap())
        .count();
    ensure(correct == blobs.len(), || format!("1-NN leave-in {correct}/{}", blobs.len()))?;
    Ok(format!("gain bounds hold on 5000 splits; Bayes boundary at {boundary:.1e}; 1-NN leave-in 300/300"))
}

fn main() {
    let graphs = random_graphs(200);
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("1 walk oracle equivalence", Box::new(|| criterion_1(&graphs))),
        ("2 memoryless degeneracy", Box::new(|| criterion_2(&graphs))),
        ("3 lambda=0 equals low level", Box::new(criterion_3)),
        ("4 normalization", Box::new(criterion_4)),
        ("5 affinity in lambda", Box::new(criterion_5)),
        ("6 Drummond network weights", Box::new(criterion_6)),
        ("7 toy boundary shift", Box::new(criterion_7)),
        ("8 synthetic WSD end-to-end", Box::new(criterion_8)),
        ("9 walk-curve steady states", Box::new(criterion_9)),
        ("10 classifier suites", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
