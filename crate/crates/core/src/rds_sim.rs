//! Chain-referral (RDS) sampling on a graph.
//!
//! Seeds are drawn by successive sampling on degree from the regime-eligible
//! nodes; respondents then recruit up to `coupons` of their not-yet-sampled
//! neighbors uniformly at random (weighted by edge multiplicity), processed
//! in the order respondents were themselves recruited, until the target
//! sample size is reached or every chain dies.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{RdsRecord, RdsSample};
use crate::error::{Error, Result};
use crate::netgen::Graph;
use crate::ppswor::{draw_ppswor, PopulationSizes};
use crate::RealSample;

/// How the initial sample is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRegime {
    /// Probability proportional to degree among all nodes.
    Random,
    /// Probability proportional to degree among infected nodes.
    AllInfected,
    /// Probability proportional to degree among uninfected nodes.
    AllUninfected,
}

/// Chain-referral design parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdsDesign {
    pub seed_count: usize,
    /// Maximum recruits per respondent.
    pub coupons: usize,
    /// Total sample size to stop at.
    pub target_n: usize,
    pub regime: SeedRegime,
    /// Draw a replacement seed when all chains die before the target size
    /// is reached (off by default: exhaustion is reported instead).
    #[serde(default)]
    pub reseed: bool,
}

impl RdsDesign {
    pub fn new(target_n: usize) -> Self {
        Self {
            seed_count: 10,
            coupons: 2,
            target_n,
            regime: SeedRegime::Random,
            reseed: false,
        }
    }

    fn check(&self) -> Result<()> {
        if self.seed_count == 0 || self.seed_count > self.target_n {
            return Err(Error::InvalidParameter(
                "seed count must satisfy 1 <= seeds <= target sample size".into(),
            ));
        }
        if self.coupons == 0 {
            return Err(Error::InvalidParameter("coupons must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one chain-referral run.
#[derive(Debug, Clone, PartialEq)]
pub struct RdsRun {
    pub sample: RealSample,
    /// True when every reachable node was sampled before the target size.
    pub exhausted: bool,
    /// Replacement seeds drawn (only with `reseed = true`).
    pub reseeds: usize,
}

fn eligible_nodes(graph: &Graph, regime: SeedRegime) -> Vec<u32> {
    (0..graph.node_count() as u32)
        .filter(|&v| graph.degree(v) >= 1)
        .filter(|&v| match regime {
            SeedRegime::Random => true,
            SeedRegime::AllInfected => graph.is_infected(v),
            SeedRegime::AllUninfected => !graph.is_infected(v),
        })
        .collect()
}

/// Draws the initial sample: successive sampling on degree over the
/// regime-eligible nodes (degree-0 nodes are never eligible).
pub fn draw_seeds<R: Rng + ?Sized>(
    graph: &Graph,
    design: &RdsDesign,
    rng: &mut R,
) -> Result<Vec<u32>> {
    design.check()?;
    let eligible = eligible_nodes(graph, design.regime);
    if eligible.len() < design.seed_count {
        return Err(Error::InsufficientEligibleNodes {
            need: design.seed_count,
            have: eligible.len(),
        });
    }
    let sizes = PopulationSizes::new(eligible.iter().map(|&v| graph.degree(v)).collect())?;
    let picked = draw_ppswor(&sizes, design.seed_count, rng)?;
    Ok(picked.into_iter().map(|i| eligible[i]).collect())
}

fn record_for(graph: &Graph, node: u32, recruiter: Option<u32>, wave: u32) -> RdsRecord<f64> {
    RdsRecord {
        id: node.to_string(),
        recruiter_id: recruiter.map(|r| r.to_string()),
        degree: graph.degree(node),
        outcome: if graph.is_infected(node) { 1.0 } else { 0.0 },
        wave,
    }
}

/// Runs the referral process from an explicit list of seed nodes.
pub fn run_rds_from_seeds<R: Rng + ?Sized>(
    graph: &Graph,
    design: &RdsDesign,
    seeds: &[u32],
    rng: &mut R,
) -> Result<RdsRun> {
    design.check()?;
    let n_nodes = graph.node_count();
    if design.target_n > n_nodes {
        return Err(Error::SampleExceedsPopulation {
            n: design.target_n,
            population: n_nodes,
        });
    }
    let mut sampled = vec![false; n_nodes];
    let mut records: Vec<RdsRecord<f64>> = Vec::with_capacity(design.target_n);
    let mut queue: std::collections::VecDeque<(u32, u32)> = std::collections::VecDeque::new();
    let mut reseeds = 0usize;
    let mut exhausted = false;

    for &s in seeds {
        if records.len() == design.target_n {
            break;
        }
        if sampled[s as usize] {
            continue;
        }
        sampled[s as usize] = true;
        records.push(record_for(graph, s, None, 0));
        queue.push_back((s, 0));
    }

    'sampling: while records.len() < design.target_n {
        let Some((node, wave)) = queue.pop_front() else {
            if design.reseed {
                let unsampled: Vec<u32> = (0..n_nodes as u32)
                    .filter(|&v| !sampled[v as usize] && graph.degree(v) >= 1)
                    .collect();
                if unsampled.is_empty() {
                    exhausted = true;
                    break 'sampling;
                }
                let sizes =
                    PopulationSizes::new(unsampled.iter().map(|&v| graph.degree(v)).collect())?;
                let pick = unsampled[draw_ppswor(&sizes, 1, rng)?[0]];
                log::debug!(
                    "chains died at n = {}; reseeding with node {pick}",
                    records.len()
                );
                sampled[pick as usize] = true;
                records.push(record_for(graph, pick, None, 0));
                queue.push_back((pick, 0));
                reseeds += 1;
                continue 'sampling;
            }
            exhausted = true;
            break 'sampling;
        };

        // Unsampled alters with multiplicity, in node order.
        let mut pool: Vec<(u32, u64)> = Vec::new();
        for &nb in graph.neighbors(node) {
            if sampled[nb as usize] {
                continue;
            }
            match pool.binary_search_by_key(&nb, |&(v, _)| v) {
                Ok(i) => pool[i].1 += 1,
                Err(i) => pool.insert(i, (nb, 1)),
            }
        }
        let mut total: u64 = pool.iter().map(|&(_, m)| m).sum();
        for _ in 0..design.coupons {
            if total == 0 {
                break;
            }
            let mut threshold = rng.random_range(0..total);
            let mut idx = 0;
            for (i, &(_, m)) in pool.iter().enumerate() {
                if threshold < m {
                    idx = i;
                    break;
                }
                threshold -= m;
            }
            let (recruit, mult) = pool.remove(idx);
            total -= mult;
            sampled[recruit as usize] = true;
            records.push(record_for(graph, recruit, Some(node), wave + 1));
            queue.push_back((recruit, wave + 1));
            if records.len() == design.target_n {
                break 'sampling;
            }
        }
    }

    Ok(RdsRun {
        sample: RdsSample::from_records(records),
        exhausted,
        reseeds,
    })
}

/// Draws seeds per the design and runs the referral process.
pub fn run_rds<R: Rng + ?Sized>(graph: &Graph, design: &RdsDesign, rng: &mut R) -> Result<RdsRun> {
    let seeds = draw_seeds(graph, design, rng)?;
    run_rds_from_seeds(graph, design, &seeds, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream;

    fn path3() -> Graph {
        Graph::from_edges(vec![false, true, false], vec![(0, 1), (1, 2)]).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        let edges = (1..=leaves as u32).map(|i| (0, i)).collect();
        Graph::from_edges(vec![false; leaves + 1], edges).unwrap()
    }

    fn design(target: usize, seeds: usize, coupons: usize) -> RdsDesign {
        RdsDesign {
            seed_count: seeds,
            coupons,
            target_n: target,
            regime: SeedRegime::Random,
            reseed: false,
        }
    }

    #[test]
    fn path_graph_recruits_in_forced_order() {
        let g = path3();
        let run = run_rds_from_seeds(&g, &design(3, 1, 2), &[0], &mut stream::rng(1, &[])).unwrap();
        assert!(!run.exhausted);
        let waves: Vec<u32> = run.sample.records().iter().map(|r| r.wave).collect();
        assert_eq!(waves, vec![0, 1, 2]);
        let ids: Vec<&str> = run.sample.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["0", "1", "2"]);
        assert_eq!(run.sample.records()[1].recruiter_id.as_deref(), Some("0"));
        assert_eq!(run.sample.records()[2].recruiter_id.as_deref(), Some("1"));
    }

    #[test]
    fn star_center_recruits_two_uniform_leaves() {
        let g = star(6);
        let mut counts = std::collections::HashMap::new();
        let reps = 30_000;
        for j in 0..reps {
            let run =
                run_rds_from_seeds(&g, &design(3, 1, 2), &[0], &mut stream::rng(2, &[j])).unwrap();
            assert_eq!(run.sample.n(), 3);
            let mut pair: Vec<&str> = run.sample.records()[1..]
                .iter()
                .map(|r| r.id.as_str())
                .collect();
            pair.sort_unstable();
            assert!(run.sample.records()[1..].iter().all(|r| r.wave == 1));
            *counts
                .entry(format!("{}-{}", pair[0], pair[1]))
                .or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 15);
        let expect = 1.0 / 15.0;
        let se = (expect * (1.0 - expect) / reps as f64).sqrt();
        for (pair, c) in counts {
            let freq = c as f64 / reps as f64;
            assert!((freq - expect).abs() < 4.0 * se, "pair {pair}: {freq}");
        }
    }

    #[test]
    fn disconnected_component_exhausts() {
        // Component {0,1} disconnected from {2,3}.
        let g = Graph::from_edges(vec![false; 4], vec![(0, 1), (2, 3)]).unwrap();
        let run = run_rds_from_seeds(&g, &design(4, 1, 2), &[0], &mut stream::rng(3, &[])).unwrap();
        assert!(run.exhausted);
        assert_eq!(run.sample.n(), 2);
    }

    #[test]
    fn reseeding_reaches_target_across_components() {
        let g = Graph::from_edges(vec![false; 4], vec![(0, 1), (2, 3)]).unwrap();
        let mut d = design(4, 1, 2);
        d.reseed = true;
        let run = run_rds_from_seeds(&g, &d, &[0], &mut stream::rng(4, &[])).unwrap();
        assert!(!run.exhausted);
        assert_eq!(run.sample.n(), 4);
        assert_eq!(run.reseeds, 1);
    }

    #[test]
    fn all_infected_regime_with_exact_count_is_forced() {
        let mut infected = vec![false; 10];
        for z in infected.iter_mut().take(5) {
            *z = true;
        }
        let edges = (0..9u32).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(infected, edges).unwrap();
        let d = RdsDesign {
            seed_count: 5,
            coupons: 2,
            target_n: 8,
            regime: SeedRegime::AllInfected,
            reseed: false,
        };
        let mut seeds = draw_seeds(&g, &d, &mut stream::rng(5, &[])).unwrap();
        seeds.sort_unstable();
        assert_eq!(seeds, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn insufficient_eligible_nodes_errors() {
        let g = Graph::from_edges(vec![true, false, false], vec![(0, 1), (1, 2)]).unwrap();
        let d = RdsDesign {
            seed_count: 2,
            coupons: 2,
            target_n: 3,
            regime: SeedRegime::AllInfected,
            reseed: false,
        };
        assert!(matches!(
            draw_seeds(&g, &d, &mut stream::rng(6, &[])),
            Err(Error::InsufficientEligibleNodes { need: 2, have: 1 })
        ));
    }

    #[test]
    fn seed_draw_is_proportional_to_degree() {
        // Degrees (1, 3): node 1 carries a self-loop next to the shared edge.
        let g = Graph::from_edges(vec![false, false], vec![(0, 1), (1, 1)]).unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 3);
        let reps = 40_000;
        let mut node1 = 0usize;
        for j in 0..reps {
            let seeds = draw_seeds(&g, &design(1, 1, 2), &mut stream::rng(7, &[j])).unwrap();
            if seeds[0] == 1 {
                node1 += 1;
            }
        }
        let freq = node1 as f64 / reps as f64;
        let se = (0.75f64 * 0.25 / reps as f64).sqrt();
        assert!((freq - 0.75).abs() < 4.0 * se, "freq {freq}");
    }

    #[test]
    fn equal_degree_seeds_are_uniform() {
        // 4-cycle: all degrees 2.
        let g = Graph::from_edges(vec![false; 4], vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let reps = 40_000;
        let mut counts = [0usize; 4];
        for j in 0..reps {
            let seeds = draw_seeds(&g, &design(1, 1, 2), &mut stream::rng(8, &[j])).unwrap();
            counts[seeds[0] as usize] += 1;
        }
        let se = (0.25f64 * 0.75 / reps as f64).sqrt();
        for (node, &c) in counts.iter().enumerate() {
            let freq = c as f64 / reps as f64;
            assert!((freq - 0.25).abs() < 4.0 * se, "node {node}: {freq}");
        }
    }

    #[test]
    fn sample_invariants_hold_on_random_runs() {
        let dist = crate::IntDegreeDistribution::from_counts(
            std::collections::BTreeMap::from([(2usize, 20u64), (4, 10), (7, 4)]),
            34,
        )
        .unwrap();
        for j in 0..25 {
            let mut rng = stream::rng(9, &[j]);
            let g = crate::netgen::sample_configuration_graph(&dist, &mut rng).unwrap();
            let run = run_rds(&g, &design(20, 3, 2), &mut rng).unwrap();
            assert!(run.sample.validate(Some(g.node_count())).is_empty());
            if !run.exhausted {
                assert_eq!(run.sample.n(), 20);
            }
            // No node sampled twice.
            let mut ids: Vec<&str> = run.sample.records().iter().map(|r| r.id.as_str()).collect();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids.len(), run.sample.n());
        }
    }

    #[test]
    fn full_coupon_connected_graph_is_breadth_first_census() {
        let g = star(7);
        let mut d = design(8, 1, 8);
        d.coupons = 8;
        let run = run_rds_from_seeds(&g, &d, &[0], &mut stream::rng(10, &[])).unwrap();
        assert!(!run.exhausted);
        assert_eq!(run.sample.n(), 8);
        assert!(run.sample.records()[1..].iter().all(|r| r.wave == 1));
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let p = crate::netgen::NetParams {
            population: 60usize,
            prevalence: 0.2,
            mean_degree: 5.0,
            activity_ratio: 1.0,
            homophily: 2.0,
        };
        let g = crate::netgen::sample_mixing_graph(&p, &mut stream::rng(11, &[])).unwrap();
        let a = run_rds(&g, &design(30, 5, 2), &mut stream::rng(12, &[])).unwrap();
        let b = run_rds(&g, &design(30, 5, 2), &mut stream::rng(12, &[])).unwrap();
        assert_eq!(a, b);
    }
}
