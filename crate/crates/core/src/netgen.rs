//! Synthetic network generation for the simulation studies.
//!
//! Two families: dyad-independent mixing-matrix graphs calibrated to a
//! target mean degree, activity ratio, and homophily level (the model the
//! bias studies sample from), and configuration-model graphs with a
//! prescribed degree distribution.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{activity_ratio, ScenarioDescriptors};
use crate::scalar::{from_count, Scalar};
use crate::IntDegreeDistribution;

/// Target parameters of a mixing-matrix population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetParams<T> {
    /// Number of nodes `N`.
    pub population: usize,
    /// Fraction of infected nodes, in (0, 1).
    pub prevalence: T,
    /// Expected mean degree over all nodes.
    pub mean_degree: T,
    /// Activity ratio `w`: mean infected degree over mean uninfected degree.
    pub activity_ratio: T,
    /// Homophily `R`: infected-infected tie probability over mixed-tie
    /// probability.
    pub homophily: T,
}

/// Per-cell dyad probabilities implied by a [`NetParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingProbs<T> {
    pub p_ii: T,
    pub p_iu: T,
    pub p_uu: T,
    pub n_infected: usize,
    pub n_uninfected: usize,
}

impl<T: Scalar> MixingProbs<T> {
    /// Expected degrees `(d_I, d_U)` of infected and uninfected nodes.
    pub fn expected_degrees(&self) -> (T, T) {
        let n_i: T = from_count(self.n_infected);
        let n_u: T = from_count(self.n_uninfected);
        let d_i = self.p_ii.clone() * (n_i.clone() - T::one()) + self.p_iu.clone() * n_u.clone();
        let d_u = self.p_iu.clone() * n_i + self.p_uu.clone() * (n_u - T::one());
        (d_i, d_u)
    }

    /// Recomputes `(mean_degree, activity_ratio, homophily)` from the cell
    /// probabilities; must reproduce the solved-for inputs.
    pub fn implied_params(&self) -> (T, T, T) {
        let (d_i, d_u) = self.expected_degrees();
        let n_i: T = from_count(self.n_infected);
        let n_u: T = from_count(self.n_uninfected);
        let population = n_i.clone() + n_u.clone();
        let mean = (n_i * d_i.clone() + n_u * d_u.clone()) / population;
        (mean, d_i / d_u, self.p_ii.clone() / self.p_iu.clone())
    }
}

/// Solves for the three mixing-matrix cell probabilities so that the
/// expected mean degree, activity ratio, and homophily match the targets.
///
/// With `N_I` infected and `N_U` uninfected nodes the closed form is
/// `d_I = m N w / (N_I w + N_U)`, `p_IU = d_I / (R (N_I - 1) + N_U)`,
/// `p_II = R p_IU`, `p_UU = (d_I / w - p_IU N_I) / (N_U - 1)`. Any cell
/// outside `[0, 1]` makes the parameters infeasible.
pub fn solve_mixing_probs<T: Scalar>(params: &NetParams<T>) -> Result<MixingProbs<T>> {
    let population = params.population;
    if population < 3 {
        return Err(Error::InvalidParameter(
            "population must have at least 3 nodes".into(),
        ));
    }
    if params.prevalence <= T::zero() || params.prevalence >= T::one() {
        return Err(Error::InvalidParameter(
            "prevalence must lie in (0, 1)".into(),
        ));
    }
    if params.mean_degree <= T::zero()
        || params.activity_ratio <= T::zero()
        || params.homophily <= T::zero()
    {
        return Err(Error::InvalidParameter(
            "mean degree, activity ratio, and homophily must be positive".into(),
        ));
    }
    let half = T::from_f64(0.5).expect("scalar can represent 1/2");
    let n_infected = (params.prevalence.clone() * from_count::<T>(population) + half)
        .to_u64()
        .unwrap_or(0) as usize;
    if n_infected < 1 {
        return Err(Error::DegenerateGroup(
            "prevalence rounds to zero infected nodes",
        ));
    }
    if population - n_infected < 2 {
        return Err(Error::DegenerateGroup(
            "prevalence leaves fewer than 2 uninfected nodes",
        ));
    }
    let n_uninfected = population - n_infected;
    let n_i: T = from_count(n_infected);
    let n_u: T = from_count(n_uninfected);
    let w = params.activity_ratio.clone();
    let r = params.homophily.clone();

    let d_i = params.mean_degree.clone() * from_count::<T>(population) * w.clone()
        / (n_i.clone() * w.clone() + n_u.clone());
    let p_iu = d_i.clone() / (r.clone() * (n_i.clone() - T::one()) + n_u.clone());
    let p_ii = r * p_iu.clone();
    let p_uu = (d_i / w - p_iu.clone() * n_i) / (n_u - T::one());

    for (cell, value) in [("p_II", &p_ii), ("p_IU", &p_iu), ("p_UU", &p_uu)] {
        if *value < T::zero() || *value > T::one() {
            return Err(Error::InfeasibleParams {
                cell,
                value: value.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(MixingProbs {
        p_ii,
        p_iu,
        p_uu,
        n_infected,
        n_uninfected,
    })
}

/// Undirected network with a binary node attribute.
///
/// Mixing graphs are simple; configuration graphs may carry self-loops and
/// multi-edges. A loop contributes 2 to its node's degree and appears twice
/// in the node's adjacency list.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    infected: Vec<bool>,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn from_edges(infected: Vec<bool>, edges: Vec<(u32, u32)>) -> Result<Self> {
        let n = infected.len();
        let mut adj = vec![Vec::new(); n];
        let mut canonical = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if (u as usize) >= n || (v as usize) >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            canonical.push((u.min(v), u.max(v)));
        }
        Ok(Self {
            infected,
            adj,
            edges: canonical,
        })
    }

    pub fn node_count(&self) -> usize {
        self.infected.len()
    }

    /// Edge count, loops and multi-edges included.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn is_infected(&self, node: u32) -> bool {
        self.infected[node as usize]
    }

    pub fn infected_count(&self) -> usize {
        self.infected.iter().filter(|&&z| z).count()
    }

    /// Neighbor list with multiplicity; a loop lists the node itself twice.
    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adj[node as usize]
    }

    /// Degree counting a loop as 2.
    pub fn degree(&self, node: u32) -> usize {
        self.adj[node as usize].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|a| a.len()).collect()
    }

    /// Degree distribution of the nodes with positive degree. Isolated
    /// nodes are excluded: they can never be reached by link-tracing and a
    /// degree class of 0 is not meaningful under size-biased sampling. The
    /// returned population size counts only the included nodes.
    pub fn degree_distribution(&self) -> Result<IntDegreeDistribution> {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        let mut population = 0usize;
        for a in &self.adj {
            if !a.is_empty() {
                *counts.entry(a.len()).or_insert(0) += 1;
                population += 1;
            }
        }
        if population == 0 {
            return Err(Error::InvalidParameter("graph has no edges".into()));
        }
        IntDegreeDistribution::from_counts(counts, population)
    }
}

// Visits each of `count` slots independently with probability `p` using
// geometric gap skipping; expected work is p * count draws.
fn sample_slots<R: Rng + ?Sized>(count: u64, p: f64, rng: &mut R, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || count == 0 {
        return;
    }
    if p >= 1.0 {
        for t in 0..count {
            emit(t);
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut cursor: u64 = 0;
    loop {
        let u: f64 = rng.random();
        let gap = ((1.0 - u).ln() / log_q).floor();
        if !gap.is_finite() || gap >= (count as f64) {
            return;
        }
        cursor = match cursor.checked_add(gap as u64) {
            Some(c) => c,
            None => return,
        };
        if cursor >= count {
            return;
        }
        emit(cursor);
        cursor += 1;
    }
}

// Maps a linear index into the strict upper triangle of an m-clique to the
// pair (i, j), i < j, rows in ascending order.
fn triangle_pair(m: u64, t: u64) -> (u64, u64) {
    let offset = |i: u64| i * (2 * m - i - 1) / 2;
    let mut lo = 0u64;
    let mut hi = m - 2;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if offset(mid) <= t {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    (lo, lo + 1 + (t - offset(lo)))
}

/// Samples a graph with each dyad independently present at its cell
/// probability. Nodes `0..n_infected` carry the infected attribute.
pub fn sample_from_probs<R: Rng + ?Sized>(probs: &MixingProbs<f64>, rng: &mut R) -> Graph {
    let n_i = probs.n_infected as u64;
    let n_u = probs.n_uninfected as u64;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    if n_i >= 2 {
        sample_slots(n_i * (n_i - 1) / 2, probs.p_ii, rng, |t| {
            let (a, b) = triangle_pair(n_i, t);
            edges.push((a as u32, b as u32));
        });
    }
    sample_slots(n_i * n_u, probs.p_iu, rng, |t| {
        edges.push(((t / n_u) as u32, (n_i + t % n_u) as u32));
    });
    if n_u >= 2 {
        sample_slots(n_u * (n_u - 1) / 2, probs.p_uu, rng, |t| {
            let (a, b) = triangle_pair(n_u, t);
            edges.push(((n_i + a) as u32, (n_i + b) as u32));
        });
    }
    let mut infected = vec![true; probs.n_infected];
    infected.extend(std::iter::repeat(false).take(probs.n_uninfected));
    Graph::from_edges(infected, edges).expect("generated edges are in range")
}

/// Solves the mixing probabilities for `params` and samples one graph.
pub fn sample_mixing_graph<R: Rng + ?Sized>(params: &NetParams<f64>, rng: &mut R) -> Result<Graph> {
    let probs = solve_mixing_probs(params)?;
    Ok(sample_from_probs(&probs, rng))
}

/// Samples a configuration-model graph: each node gets edge ends according
/// to its degree class and a uniform random perfect matching of the edge
/// ends becomes the edge set. Self-loops and multi-edges are kept; their
/// rate is negligible for maximum degree below sqrt(N), and a diagnostic
/// warning is logged otherwise. All nodes carry the uninfected attribute.
pub fn sample_configuration_graph<R: Rng + ?Sized>(
    dist: &IntDegreeDistribution,
    rng: &mut R,
) -> Result<Graph> {
    let stub_total = dist.stub_total();
    if stub_total % 2 != 0 {
        return Err(Error::OddStubCount(stub_total));
    }
    let population = dist.population();
    if (dist.max_degree() as f64) >= (population as f64).sqrt() {
        log::warn!(
            "configuration model: max degree {} >= sqrt(N = {}); loop/multi-edge rate is not negligible",
            dist.max_degree(),
            population
        );
    }
    let mut stubs: Vec<u32> = Vec::with_capacity(stub_total as usize);
    let mut node: u32 = 0;
    for (&k, &c) in dist.counts() {
        for _ in 0..c {
            stubs.extend(std::iter::repeat(node).take(k));
            node += 1;
        }
    }
    stubs.shuffle(rng);
    let edges: Vec<(u32, u32)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Graph::from_edges(vec![false; population], edges)
}

/// Realized descriptors of a generated graph, for checking generator
/// calibration. Loops count toward their same-status cell.
pub fn graph_descriptors(graph: &Graph) -> Result<ScenarioDescriptors> {
    let n = graph.node_count();
    let n_i = graph.infected_count();
    let n_u = n - n_i;
    if n_i == 0 || n_u == 0 {
        return Err(Error::DegenerateGroup("graph has a single infection class"));
    }
    let degrees = graph.degrees();
    let infected: Vec<bool> = (0..n as u32).map(|i| graph.is_infected(i)).collect();
    let mean_degree = degrees.iter().sum::<usize>() as f64 / n as f64;
    let w = activity_ratio::<f64>(&degrees, &infected)?;

    let (mut e_ii, mut e_iu) = (0u64, 0u64);
    for &(u, v) in graph.edges() {
        match (graph.is_infected(u), graph.is_infected(v)) {
            (true, true) => e_ii += 1,
            (false, false) => {}
            _ => e_iu += 1,
        }
    }
    let dyads_ii = n_i as u64 * (n_i as u64 - 1) / 2;
    let dyads_iu = n_i as u64 * n_u as u64;
    let homophily = if e_iu == 0 || dyads_ii == 0 {
        None
    } else {
        let p_ii = e_ii as f64 / dyads_ii as f64;
        let p_iu = e_iu as f64 / dyads_iu as f64;
        Some(p_ii / p_iu)
    };
    Ok(ScenarioDescriptors {
        mean_degree,
        activity_ratio: w,
        homophily,
        prevalence: n_i as f64 / n as f64,
    })
}
