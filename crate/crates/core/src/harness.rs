//! Replicated simulation studies: generate a network per replicate, run
//! chain-referral sampling on it, compute the requested estimators from the
//! same sample, and summarize bias/variance/MSE per scenario.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::SimConfig;
use crate::error::{Error, Result};
use crate::estimators::{mu_mean, mu_vh, nhat_bounds};
use crate::netgen::{sample_from_probs, solve_mixing_probs, NetParams};
use crate::ppswor::estimate_inclusion_by_class;
use crate::rds_sim::{run_rds, RdsDesign};
use crate::ss::{fit_ss, mu_from_fit};
use crate::{stream, IntDegreeDistribution, RealSample};

/// Assumed population size handed to the successive-sampling estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumedN {
    /// The true size of the generated population.
    True,
    /// Deliberate under-estimate `N - (N - n) / 2`.
    NhatSmall,
    /// Deliberate over-estimate `N + (N - n) / 2`.
    NhatLarge,
    Explicit(usize),
}

/// One estimator to compute per replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorSpec {
    Mean,
    Vh,
    Ss(AssumedN),
}

impl EstimatorSpec {
    pub fn label(&self) -> String {
        match self {
            EstimatorSpec::Mean => "mean".into(),
            EstimatorSpec::Vh => "vh".into(),
            EstimatorSpec::Ss(AssumedN::True) => "ss".into(),
            EstimatorSpec::Ss(AssumedN::NhatSmall) => "ss_nhat_s".into(),
            EstimatorSpec::Ss(AssumedN::NhatLarge) => "ss_nhat_l".into(),
            EstimatorSpec::Ss(AssumedN::Explicit(v)) => format!("ss_n{v}"),
        }
    }
}

/// One test condition: a population model, a referral design, the
/// estimators to compare, and the replication count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub net: NetParams<f64>,
    pub design: RdsDesign,
    pub estimators: Vec<EstimatorSpec>,
    pub replicates: usize,
    pub sim: SimConfig,
}

/// Summary for one scenario and estimator. `bias`, `variance`, and `mse`
/// are population-formula moments of the per-replicate errors against the
/// realized prevalence of each generated graph, so
/// `mse = bias^2 + variance` holds identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub scenario: String,
    pub estimator: String,
    pub replicates: usize,
    pub mean_estimate: f64,
    pub true_prevalence: f64,
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
    /// Replicates whose referral process exhausted before the target size.
    pub exhausted: usize,
    /// Per-replicate estimates, in replicate order.
    pub raw: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
}

impl StudyResult {
    /// One CSV row per scenario and estimator (raw estimates omitted).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "scenario,estimator,replicates,mean_estimate,true_prevalence,bias,variance,mse,exhausted"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.scenario,
                r.estimator,
                r.replicates,
                r.mean_estimate,
                r.true_prevalence,
                r.bias,
                r.variance,
                r.mse,
                r.exhausted
            )?;
        }
        Ok(())
    }

    pub fn row(&self, scenario: &str, estimator: &str) -> Option<&StudyRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.estimator == estimator)
    }
}

struct Replicate {
    estimates: Vec<f64>,
    truth: f64,
    exhausted: bool,
}

fn run_replicate(scenario: &Scenario, rep_seed: u64) -> Result<Replicate> {
    let probs = solve_mixing_probs(&scenario.net)?;
    let graph = sample_from_probs(&probs, &mut stream::rng(rep_seed, &[0]));
    let truth = graph.infected_count() as f64 / graph.node_count() as f64;
    let run = run_rds(&graph, &scenario.design, &mut stream::rng(rep_seed, &[1]))?;
    let sample: &RealSample = &run.sample;
    let n = sample.n();
    let fit_config = scenario
        .sim
        .clone()
        .with_seed(stream::derive(rep_seed, &[2]));

    let mut estimates = Vec::with_capacity(scenario.estimators.len());
    for spec in &scenario.estimators {
        let value = match spec {
            EstimatorSpec::Mean => mu_mean(sample)?,
            EstimatorSpec::Vh => mu_vh(sample)?,
            EstimatorSpec::Ss(assumed) => {
                let population = match assumed {
                    AssumedN::True => scenario.net.population,
                    AssumedN::NhatSmall => nhat_bounds(scenario.net.population, n)?.0,
                    AssumedN::NhatLarge => nhat_bounds(scenario.net.population, n)?.1,
                    AssumedN::Explicit(v) => *v,
                };
                // The same fit seed across assumed sizes keeps the
                // comparison paired within the replicate.
                let fit = fit_ss(sample, population, &fit_config)?;
                mu_from_fit(sample, &fit)?
            }
        };
        estimates.push(value);
    }
    Ok(Replicate {
        estimates,
        truth,
        exhausted: run.exhausted,
    })
}

/// Runs every scenario. Replicate `j` of scenario `s` derives its streams
/// from `(master_seed, s, j)`, replicates fan out on the rayon pool, and
/// aggregation is in replicate order, so the result is bitwise identical
/// for any worker count.
///
/// Within a replicate every requested estimator is computed from the same
/// sample.
pub fn run_study(scenarios: &[Scenario], master_seed: u64) -> Result<StudyResult> {
    let mut rows = Vec::new();
    for (s_idx, scenario) in scenarios.iter().enumerate() {
        if scenario.replicates == 0 {
            return Err(
                Error::InvalidParameter("replicates must be >= 1".into()).in_scenario(&scenario.id)
            );
        }
        // Surface infeasible parameters before burning replicate time.
        solve_mixing_probs(&scenario.net).map_err(|e| e.in_scenario(&scenario.id))?;
        let reps: Result<Vec<Replicate>> = (0..scenario.replicates)
            .into_par_iter()
            .map(|j| {
                run_replicate(
                    scenario,
                    stream::derive(master_seed, &[s_idx as u64, j as u64]),
                )
                .map_err(|e| e.in_scenario(&scenario.id))
            })
            .collect();
        let reps = reps?;
        let exhausted = reps.iter().filter(|r| r.exhausted).count();
        let truth_mean = reps.iter().map(|r| r.truth).sum::<f64>() / scenario.replicates as f64;
        for (e_idx, spec) in scenario.estimators.iter().enumerate() {
            let raw: Vec<f64> = reps.iter().map(|r| r.estimates[e_idx]).collect();
            let errors: Vec<f64> = reps.iter().map(|r| r.estimates[e_idx] - r.truth).collect();
            let m = raw.len() as f64;
            let mean_estimate = raw.iter().sum::<f64>() / m;
            let bias = errors.iter().sum::<f64>() / m;
            let variance = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / m;
            let mse = errors.iter().map(|e| e * e).sum::<f64>() / m;
            rows.push(StudyRow {
                scenario: scenario.id.clone(),
                estimator: spec.label(),
                replicates: scenario.replicates,
                mean_estimate,
                true_prevalence: truth_mean,
                bias,
                variance,
                mse,
                exhausted,
                raw,
            });
        }
    }
    Ok(StudyResult { rows })
}

/// One row of an inclusion-probability curve table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    /// "ss" for the estimated mapping, "proportional" for the
    /// degree-proportional reference the Volz-Heckathorn weights assume.
    pub mapping: &'static str,
    pub degree: usize,
    pub sample_size: usize,
    pub fraction: f64,
    pub pi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "mapping,k,n,n_over_N,pi")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.mapping, r.degree, r.sample_size, r.fraction, r.pi
            )?;
        }
        Ok(())
    }
}

/// Estimates the degree-to-inclusion-probability mapping of `dist` for each
/// sample size, plus the proportional reference mapping
/// `pi(k) = k * n / sum(k * N_k)` (which can exceed 1; that is the point of
/// the comparison).
pub fn inclusion_curves(
    dist: &IntDegreeDistribution,
    sample_sizes: &[usize],
    config: &SimConfig,
) -> Result<CurveTable> {
    config.check()?;
    let population = dist.population();
    let stub_total = dist.stub_total() as f64;
    let mut rows = Vec::new();
    for (idx, &n) in sample_sizes.iter().enumerate() {
        if n > population {
            return Err(Error::SampleExceedsPopulation { n, population });
        }
        let mut map = estimate_inclusion_by_class::<f64>(
            dist,
            n,
            config.trials,
            stream::derive(config.seed, &[idx as u64]),
        )?;
        if config.isotonic {
            map = crate::ss::isotonic_cleanup(map, dist)?;
        }
        let fraction = n as f64 / population as f64;
        for (&k, &pi) in map.probs() {
            rows.push(CurveRow {
                mapping: "ss",
                degree: k,
                sample_size: n,
                fraction,
                pi,
            });
        }
        for k in dist.degrees() {
            rows.push(CurveRow {
                mapping: "proportional",
                degree: k,
                sample_size: n,
                fraction,
                pi: k as f64 * n as f64 / stub_total,
            });
        }
    }
    Ok(CurveTable { rows })
}

pub mod presets {
    //! Ready-made study configurations mirroring the published experiment
    //! grids, at two scales: `Desk` shrinks population sizes and replicate
    //! counts for minutes-scale runs; `Paper` keeps the original sizes and
    //! is long-running.

    use super::*;
    use crate::rds_sim::SeedRegime;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Scale {
        Desk,
        Paper,
    }

    /// Activity-ratio grid shared by the bias studies.
    pub const W_GRID: [f64; 8] = [0.5, 0.8, 1.0, 1.1, 1.4, 1.8, 2.5, 3.0];

    /// Sample fractions shared by the bias studies.
    pub const FRACTIONS: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

    fn scale_sizes(scale: Scale) -> (usize, Vec<usize>, usize, usize) {
        match scale {
            // n, population per sample fraction, replicates, trials
            Scale::Desk => (200, vec![400, 333, 286, 250, 222, 211], 250, 500),
            Scale::Paper => (500, vec![1000, 835, 715, 625, 555, 525], 1000, 500),
        }
    }

    fn net(population: usize, w: f64, r: f64) -> NetParams<f64> {
        NetParams {
            population,
            prevalence: 0.2,
            mean_degree: 7.0,
            activity_ratio: w,
            homophily: r,
        }
    }

    fn design(target_n: usize, regime: SeedRegime) -> RdsDesign {
        RdsDesign {
            seed_count: 10,
            coupons: 2,
            target_n,
            regime,
            reseed: false,
        }
    }

    /// Estimator bias across sample fractions and activity ratios
    /// (random seeds, standard homophily R = 5): SS and VH on the same
    /// samples.
    pub fn fig1(scale: Scale) -> Vec<Scenario> {
        let (n, populations, replicates, trials) = scale_sizes(scale);
        let mut scenarios = Vec::new();
        for &population in &populations {
            for &w in &W_GRID {
                scenarios.push(Scenario {
                    id: format!("fig1_N{population}_w{w}"),
                    net: net(population, w, 5.0),
                    design: design(n, SeedRegime::Random),
                    estimators: vec![EstimatorSpec::Ss(AssumedN::True), EstimatorSpec::Vh],
                    replicates,
                    sim: SimConfig::new(trials, 3, 0),
                });
            }
        }
        scenarios
    }

    /// Population-size misstatement study at w = 1.4: SS under the true,
    /// under-estimated, and over-estimated population size, against VH.
    pub fn fig3(scale: Scale) -> Vec<Scenario> {
        let (n, populations, replicates, trials) = scale_sizes(scale);
        populations
            .iter()
            .map(|&population| Scenario {
                id: format!("fig3_N{population}"),
                net: net(population, 1.4, 5.0),
                design: design(n, SeedRegime::Random),
                estimators: vec![
                    EstimatorSpec::Vh,
                    EstimatorSpec::Ss(AssumedN::True),
                    EstimatorSpec::Ss(AssumedN::NhatSmall),
                    EstimatorSpec::Ss(AssumedN::NhatLarge),
                ],
                replicates,
                sim: SimConfig::new(trials, 3, 0),
            })
            .collect()
    }

    /// Seed-bias study: all-infected initial samples across homophily
    /// levels at w = 1 and a 50% sample fraction.
    pub fn table2(scale: Scale) -> Vec<Scenario> {
        let (n, _, replicates, trials) = scale_sizes(scale);
        let population = 2 * n;
        [1.0, 2.0, 3.0, 5.0, 13.0]
            .iter()
            .map(|&r| Scenario {
                id: format!("table2_R{r}"),
                net: net(population, 1.0, r),
                design: design(n, SeedRegime::AllInfected),
                estimators: vec![EstimatorSpec::Vh, EstimatorSpec::Ss(AssumedN::True)],
                replicates,
                sim: SimConfig::new(trials, 3, 0),
            })
            .collect()
    }

    /// A population-size sensitivity analysis on one synthetic sample,
    /// shaped like a small hidden-population survey that nearly exhausted
    /// its population.
    #[derive(Debug, Clone, PartialEq)]
    pub struct SensitivityPreset {
        pub net: NetParams<f64>,
        pub design: RdsDesign,
        pub grid: Vec<usize>,
        pub sim: SimConfig,
    }

    pub fn fig6(scale: Scale) -> SensitivityPreset {
        let (points, trials) = match scale {
            Scale::Desk => (12, 500),
            Scale::Paper => (24, 2000),
        };
        let lo = 301usize;
        let hi = 6000usize;
        let grid = (0..points)
            .map(|i| lo + (hi - lo) * i / (points - 1))
            .collect();
        SensitivityPreset {
            net: NetParams {
                population: 1200,
                prevalence: 0.08,
                mean_degree: 7.0,
                activity_ratio: 1.5,
                homophily: 3.0,
            },
            design: RdsDesign {
                seed_count: 7,
                coupons: 3,
                target_n: 285,
                regime: SeedRegime::Random,
                reseed: false,
            },
            grid,
            sim: SimConfig::new(trials, 3, 0),
        }
    }
}
