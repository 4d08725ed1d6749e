//! Deterministic tourist walks over class components.
//!
//! At each step the walker moves to the nearest adjacent vertex that is not
//! among the last `mu` vertices it visited (the current vertex included).
//! With `mu = 0` nothing is forbidden and the walker stays where it is,
//! distance zero being the nearest. Every walk ends either in a dead end
//! (all neighbors forbidden) or in a periodic attractor; its trajectory is
//! split into a transient of length `t` and a cycle of period `c`.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::attgraph::{ClassGraph, InsertionView};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Read-only adjacency with edge lengths, as seen by a walker.
pub trait WalkGraph<F: Scalar>: Sync {
    fn vertex_count(&self) -> usize;

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, F)> + '_;
}

impl<F: Scalar> WalkGraph<F> for ClassGraph<F> {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        ClassGraph::neighbors(self, v).iter().copied()
    }
}

/// A component with one extra vertex (index `base.len()`) attached through
/// the given links.
pub struct AugmentedGraph<'a, F> {
    base: &'a ClassGraph<F>,
    links: &'a [(usize, F)],
    link_distance: Vec<Option<F>>,
}

impl<'a, F: Scalar> AugmentedGraph<'a, F> {
    pub fn new(base: &'a ClassGraph<F>, links: &'a [(usize, F)]) -> Self {
        let mut link_distance = vec![None; base.len()];
        for &(v, d) in links {
            link_distance[v] = Some(d);
        }
        AugmentedGraph {
            base,
            links,
            link_distance,
        }
    }

    /// Index of the inserted vertex.
    pub fn inserted(&self) -> usize {
        self.base.len()
    }
}

impl<F: Scalar> WalkGraph<F> for AugmentedGraph<'_, F> {
    fn vertex_count(&self) -> usize {
        self.base.len() + 1
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let n = self.base.len();
        let (own, extra): (&[(usize, F)], Option<(usize, F)>) = if v == n {
            (self.links, None)
        } else {
            (
                self.base.neighbors(v),
                self.link_distance[v].map(|d| (n, d)),
            )
        };
        own.iter().copied().chain(extra)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkResult {
    pub transient: usize,
    /// Period of the attractor; 0 when the walk hit a dead end.
    pub cycle: usize,
    /// Transient vertices followed by one period of the cycle (or by the
    /// dead-end vertex).
    pub trajectory: Vec<usize>,
}

impl WalkResult {
    pub fn is_dead_end(&self) -> bool {
        self.cycle == 0
    }

    /// Vertices of the attractor in visiting order.
    pub fn cycle_vertices(&self) -> &[usize] {
        &self.trajectory[self.transient..]
    }
}

/// Reusable walk state; one per thread.
pub struct Walker {
    trajectory: Vec<usize>,
    forbidden: Vec<bool>,
    seen: HashMap<Vec<u32>, usize>,
}

impl Default for Walker {
    fn default() -> Self {
        Self::new()
    }
}

impl Walker {
    pub fn new() -> Self {
        Walker {
            trajectory: Vec::new(),
            forbidden: Vec::new(),
            seen: HashMap::new(),
        }
    }

    /// Runs a walk and also returns every vertex touched before the
    /// attractor was recognised.
    pub fn run<F: Scalar, G: WalkGraph<F>>(&mut self, graph: &G, start: usize, mu: usize) -> Result<(WalkResult, &[usize])> {
        let n = graph.vertex_count();
        if start >= n {
            return Err(Error::VertexNotInComponent { vertex: start, len: n });
        }
        self.trajectory.clear();
        self.trajectory.push(start);
        if mu == 0 {
            let result = WalkResult {
                transient: 0,
                cycle: 1,
                trajectory: vec![start],
            };
            return Ok((result, &self.trajectory));
        }

        self.forbidden.clear();
        self.forbidden.resize(n, false);
        self.seen.clear();
        self.forbidden[start] = true;

        let (transient, cycle) = loop {
            let step = self.trajectory.len() - 1;
            let from = step.saturating_sub(mu - 1);
            let window: Vec<u32> = self.trajectory[from..].iter().map(|&v| v as u32).collect();
            if let Some(&first) = self.seen.get(&window) {
                break (first, step - first);
            }
            self.seen.insert(window, step);

            let here = self.trajectory[step];
            let mut best: Option<(usize, F)> = None;
            for (u, d) in graph.neighbors(here) {
                if self.forbidden[u] {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bu, bd)) => d < bd || (d == bd && u < bu),
                };
                if better {
                    best = Some((u, d));
                }
            }
            let Some((next, _)) = best else {
                break (step, 0);
            };
            self.trajectory.push(next);
            self.forbidden[next] = true;
            if self.trajectory.len() > mu {
                let leaving = self.trajectory[self.trajectory.len() - 1 - mu];
                self.forbidden[leaving] = false;
            }
        };

        let result = if cycle == 0 {
            WalkResult {
                transient,
                cycle: 0,
                trajectory: self.trajectory.clone(),
            }
        } else {
            // The first repeated state may sit after the true cycle entry when
            // the memory window was still filling up; step back while the
            // vertex sequence stays periodic.
            let mut t = transient;
            while t > 0 && self.trajectory[t - 1] == self.trajectory[t - 1 + cycle] {
                t -= 1;
            }
            WalkResult {
                transient: t,
                cycle,
                trajectory: self.trajectory[..t + cycle].to_vec(),
            }
        };
        Ok((result, &self.trajectory))
    }

    pub fn walk<F: Scalar, G: WalkGraph<F>>(&mut self, graph: &G, start: usize, mu: usize) -> Result<WalkResult> {
        self.run(graph, start, mu).map(|(r, _)| r)
    }
}

/// Single tourist walk from `start` with memory `mu`.
pub fn walk<F: Scalar, G: WalkGraph<F>>(graph: &G, start: usize, mu: usize) -> Result<WalkResult> {
    Walker::new().walk(graph, start, mu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct WalkConfig {
    pub mu: usize,
    pub mu_critical: usize,
}

/// Per-walk record kept so that an insertion only re-runs the walks it can
/// affect.
#[derive(Clone, Debug, PartialEq)]
struct WalkProfile {
    words: usize,
    /// `[mu][start]` transient and cycle lengths.
    lengths: Vec<Vec<(u32, u32)>>,
    /// `[mu]` flat bitsets, `words` u64 per start, of the vertices each walk
    /// touched.
    touched: Vec<Vec<u64>>,
}

/// Average transient and cycle lengths of a component for every memory
/// length `0..=mu_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentWalkStats<F> {
    pub vertex_count: usize,
    pub total_transient: Vec<u64>,
    pub total_cycle: Vec<u64>,
    pub mean_transient: Vec<F>,
    pub mean_cycle: Vec<F>,
    /// Revision of the component the statistics were computed on.
    pub revision: u64,
    profile: WalkProfile,
}

impl<F: Scalar> ComponentWalkStats<F> {
    pub fn mu_max(&self) -> usize {
        self.mean_transient.len().saturating_sub(1)
    }

    fn from_totals(vertex_count: usize, total_transient: Vec<u64>, total_cycle: Vec<u64>, revision: u64, profile: WalkProfile) -> Self {
        let n = F::of_usize(vertex_count.max(1));
        let mean = |v: &Vec<u64>| v.iter().map(|&s| F::of(s as f64) / n).collect();
        ComponentWalkStats {
            vertex_count,
            mean_transient: mean(&total_transient),
            mean_cycle: mean(&total_cycle),
            total_transient,
            total_cycle,
            revision,
            profile,
        }
    }

    /// Smallest memory length from which the mean cycle length no longer
    /// changes up to `mu_max`.
    pub fn cycle_steady_state(&self) -> usize {
        steady_state(&self.total_cycle)
    }

    pub fn transient_steady_state(&self) -> usize {
        steady_state(&self.total_transient)
    }
}

fn steady_state(values: &[u64]) -> usize {
    let Some(&last) = values.last() else { return 0 };
    values.iter().rposition(|&v| v != last).map_or(0, |i| i + 1)
}

/// Walks from every vertex of `graph` for every `mu` in `0..=mu_max`.
pub fn component_stats<F: Scalar>(graph: &ClassGraph<F>, mu_max: usize) -> ComponentWalkStats<F> {
    let n = graph.len();
    let words = n.div_ceil(64).max(1);
    let mut lengths = Vec::with_capacity(mu_max + 1);
    let mut touched = Vec::with_capacity(mu_max + 1);
    let mut total_t = Vec::with_capacity(mu_max + 1);
    let mut total_c = Vec::with_capacity(mu_max + 1);
    for mu in 0..=mu_max {
        let per_start: Vec<((u32, u32), Vec<u64>)> = (0..n)
            .into_par_iter()
            .map_init(Walker::new, |walker, s| {
                let (r, visited) = walker.run(graph, s, mu).expect("start is a vertex");
                let mut bits = vec![0u64; words];
                for &v in visited {
                    bits[v / 64] |= 1 << (v % 64);
                }
                ((r.transient as u32, r.cycle as u32), bits)
            })
            .collect();
        let mut flat = Vec::with_capacity(n * words);
        let mut l = Vec::with_capacity(n);
        for (tc, bits) in per_start {
            l.push(tc);
            flat.extend(bits);
        }
        total_t.push(l.iter().map(|&(t, _)| t as u64).sum());
        total_c.push(l.iter().map(|&(_, c)| c as u64).sum());
        lengths.push(l);
        touched.push(flat);
    }
    ComponentWalkStats::from_totals(
        n,
        total_t,
        total_c,
        graph.revision(),
        WalkProfile {
            words,
            lengths,
            touched,
        },
    )
}

/// Statistics of `graph` with one vertex attached through `links`.
///
/// Walks from original vertices that never touched a linked vertex cannot
/// see the new vertex and are reused from `base`; the rest are re-run.
pub fn augmented_stats<F: Scalar>(graph: &ClassGraph<F>, base: &ComponentWalkStats<F>, links: &[(usize, F)]) -> ComponentWalkStats<F> {
    debug_assert_eq!(base.vertex_count, graph.len());
    let aug = AugmentedGraph::new(graph, links);
    let n = graph.len();
    let profile = &base.profile;
    let mut mask = vec![0u64; profile.words];
    for &(v, _) in links {
        mask[v / 64] |= 1 << (v % 64);
    }
    let mut walker = Walker::new();
    let mut total_t = Vec::with_capacity(base.mu_max() + 1);
    let mut total_c = Vec::with_capacity(base.mu_max() + 1);
    for mu in 0..=base.mu_max() {
        let bits = &profile.touched[mu];
        let (mut st, mut sc) = (0u64, 0u64);
        for s in 0..n {
            let visited = &bits[s * profile.words..(s + 1) * profile.words];
            let affected = visited.iter().zip(&mask).any(|(a, b)| a & b != 0);
            let (t, c) = if affected {
                let r = walker.walk(&aug, s, mu).expect("start is a vertex");
                (r.transient as u64, r.cycle as u64)
            } else {
                let (t, c) = profile.lengths[mu][s];
                (t as u64, c as u64)
            };
            st += t;
            sc += c;
        }
        let r = walker.walk(&aug, aug.inserted(), mu).expect("inserted vertex exists");
        total_t.push(st + r.transient as u64);
        total_c.push(sc + r.cycle as u64);
    }
    ComponentWalkStats::from_totals(
        n + 1,
        total_t,
        total_c,
        base.revision,
        WalkProfile {
            words: 0,
            lengths: Vec::new(),
            touched: Vec::new(),
        },
    )
}

/// Normalized variations of the walk statistics caused by inserting one test
/// point, indexed `[mu][class]` in the order of the class graphs.
#[derive(Clone, Debug, PartialEq)]
pub struct InsertionVariation<F> {
    pub classes: Vec<u32>,
    pub linked: Vec<bool>,
    pub delta_transient: Vec<Vec<F>>,
    pub delta_cycle: Vec<Vec<F>>,
}

/// Turns raw per-class variations into shares summing to one.
///
/// Classes without links get twice the largest linked variation (1 when
/// that is 0). If every class is linked and none varies, shares are equal.
pub fn normalize_variations<F: Scalar>(raw: &[F], linked: &[bool]) -> Vec<F> {
    let max_linked = raw
        .iter()
        .zip(linked)
        .filter(|(_, &l)| l)
        .map(|(&r, _)| r)
        .fold(F::zero(), F::max);
    let high = if max_linked > F::zero() {
        max_linked + max_linked
    } else {
        F::one()
    };
    let adjusted: Vec<F> = raw
        .iter()
        .zip(linked)
        .map(|(&r, &l)| if l { r } else { high })
        .collect();
    let sum: F = adjusted.iter().copied().sum();
    if sum > F::zero() {
        adjusted.into_iter().map(|r| r / sum).collect()
    } else {
        let k = F::of_usize(raw.len());
        vec![F::one() / k; raw.len()]
    }
}

/// Variation of every class component's walk statistics when the test point
/// joins it through its insertion view.
pub fn insertion_variation<F: Scalar>(
    graphs: &[ClassGraph<F>],
    stats: &[ComponentWalkStats<F>],
    views: &[InsertionView<F>],
) -> Result<InsertionVariation<F>> {
    assert_eq!(graphs.len(), stats.len());
    assert_eq!(graphs.len(), views.len());
    let linked: Vec<bool> = views.iter().map(|v| !v.is_empty()).collect();
    if !linked.iter().any(|&l| l) {
        return Err(Error::AllViewsEmpty);
    }
    let mu_max = stats.iter().map(ComponentWalkStats::mu_max).min().unwrap_or(0);
    let augmented: Vec<Option<ComponentWalkStats<F>>> = graphs
        .iter()
        .zip(stats)
        .zip(views)
        .map(|((g, s), v)| (!v.is_empty()).then(|| augmented_stats(g, s, &v.links)))
        .collect();

    let mut delta_transient = Vec::with_capacity(mu_max + 1);
    let mut delta_cycle = Vec::with_capacity(mu_max + 1);
    for mu in 0..=mu_max {
        let raw = |pick: fn(&ComponentWalkStats<F>) -> &Vec<F>| -> Vec<F> {
            stats
                .iter()
                .zip(&augmented)
                .map(|(s, a)| match a {
                    Some(a) => (pick(a)[mu] - pick(s)[mu]).abs(),
                    None => F::zero(),
                })
                .collect()
        };
        delta_transient.push(normalize_variations(&raw(|s| &s.mean_transient), &linked));
        delta_cycle.push(normalize_variations(&raw(|s| &s.mean_cycle), &linked));
    }
    Ok(InsertionVariation {
        classes: graphs.iter().map(|g| g.class_id).collect(),
        linked,
        delta_transient,
        delta_cycle,
    })
}

/// Header of [`write_walk_curves`] output.
pub const WALK_CURVES_HEADER: &str = "class,mu,mean_transient,mean_cycle,steady_state_mu";

/// Writes one CSV row per class component and memory length `0..=mu_max`.
/// `steady_state_mu` is the memory length from which both means stay
/// constant up to `mu_max`.
pub fn write_walk_curves<F: Scalar, W: Write>(graphs: &[ClassGraph<F>], mu_max: usize, mut out: W) -> Result<()> {
    writeln!(out, "{WALK_CURVES_HEADER}")?;
    for g in graphs {
        let s = component_stats(g, mu_max);
        let onset = s.transient_steady_state().max(s.cycle_steady_state());
        for mu in 0..=mu_max {
            writeln!(out, "{},{mu},{:.6},{:.6},{onset}", g.class_id, s.mean_transient[mu], s.mean_cycle[mu])?;
        }
    }
    Ok(())
}
