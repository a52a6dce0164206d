//! Successive-sampling estimation of a population mean from an RDS sample.
//!
//! Degrees are observed only for sampled units, so neither the population
//! degree distribution nor the degree-to-inclusion-probability map is known.
//! [`fit_ss`] estimates both jointly: starting from a map proportional to
//! degree, it alternates
//!
//! 1. re-estimating the population degree counts from the observed counts
//!    and the current map (Horvitz-Thompson reweighting, normalized to the
//!    assumed population size), and
//! 2. re-estimating the map by simulating PPSWOR samples from the
//!    integer-rounded counts,
//!
//! for a fixed number of iterations. The map solves the first-order moment
//! equations `N_k * f(k) = v_k` approximately; the residual is reported.
//! [`mu_ss`] then applies the generalized Horvitz-Thompson estimator with
//! the fitted inclusion probabilities.
//!
//! Two limits tie the estimator to its classical relatives: with an assumed
//! population equal to the sample size it returns the sample mean exactly,
//! and as the assumed population grows it approaches the Volz-Heckathorn
//! estimator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{DegreeDistribution, InclusionMap, RdsSample, SimConfig};
use crate::error::{Error, Result};
use crate::ppswor::estimate_inclusion_by_class;
use crate::scalar::{abs_diff, from_count, from_count_u64, Scalar};
use crate::stream;
use crate::IntDegreeDistribution;

/// Estimator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ss,
    Vh,
    Mean,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Ss => write!(f, "ss"),
            Method::Vh => write!(f, "vh"),
            Method::Mean => write!(f, "mean"),
        }
    }
}

/// A point estimate together with how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub method: Method,
    /// Assumed population size (successive-sampling estimates only).
    pub assumed_population: Option<usize>,
    pub config: SimConfig,
}

/// Result of the joint degree-distribution / inclusion-map fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SsFit<T> {
    /// Final real-valued estimate of the population degree counts.
    pub nhat: DegreeDistribution<T>,
    /// Final inclusion-probability map over the observed degrees.
    pub inclusion: InclusionMap<T>,
    /// Iterations actually run (smaller than requested only when the
    /// optional convergence stop fires; 0 for the census short-circuit).
    pub iterations_run: usize,
    /// Moment-equation residual `sum_k |nhat_k * f(k) - v_k| / n`.
    pub moment_residual: f64,
}

/// Initial inclusion map, proportional to degree:
/// `f0(k) = (k / N) * sum_l v_l / l`.
///
/// The scaling makes the Horvitz-Thompson population-size identity
/// `sum_l v_l / f0(l) = N` hold exactly. Values may exceed 1 for large
/// degrees; later iterates come from simulation and cannot.
pub fn initial_map<T: Scalar>(
    observed: &BTreeMap<usize, usize>,
    population: usize,
) -> Result<InclusionMap<T>> {
    let n: usize = observed.values().sum();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if population < n {
        return Err(Error::SampleExceedsPopulation { n, population });
    }
    let mut weighted = T::zero();
    for (&k, &v) in observed {
        if k == 0 {
            return Err(Error::ZeroDegree {
                id: "<degree class 0>".into(),
            });
        }
        weighted = weighted + from_count::<T>(v) / from_count::<T>(k);
    }
    let scale = weighted / from_count::<T>(population);
    let probs = observed
        .keys()
        .map(|&k| (k, from_count::<T>(k) * scale.clone()))
        .collect();
    InclusionMap::new(probs, n, population)
}

/// Re-estimates the population degree counts from observed counts and an
/// inclusion map: `N_k = N * (v_k / f(k)) / sum_l (v_l / f(l))`.
pub fn update_degree_distribution<T: Scalar>(
    observed: &BTreeMap<usize, usize>,
    map: &InclusionMap<T>,
    population: usize,
) -> Result<DegreeDistribution<T>> {
    if observed.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut ratios = BTreeMap::new();
    let mut total = T::zero();
    for (&k, &v) in observed {
        let f = map.require(k)?;
        if f.is_zero() {
            return Err(Error::ZeroInclusionProbability { degree: k });
        }
        let r = from_count::<T>(v) / f.clone();
        total = total + r.clone();
        ratios.insert(k, r);
    }
    let counts = ratios
        .into_iter()
        .map(|(k, r)| (k, from_count::<T>(population) * r / total.clone()))
        .collect();
    DegreeDistribution::from_counts(counts, population)
}

/// Rounds a real-valued degree distribution to integer counts summing to the
/// population size, by largest remainder, under the constraint that every
/// class keeps at least its observed count (the observed sample must remain
/// drawable from the rounded population).
pub fn round_to_population<T: Scalar>(
    nhat: &DegreeDistribution<T>,
    observed: &BTreeMap<usize, usize>,
) -> Result<IntDegreeDistribution> {
    let population = nhat.population() as u64;
    let mut base: BTreeMap<usize, u64> = BTreeMap::new();
    // Remainders ranked descending for fill-up, with degree as tie-breaker.
    let mut remainders: Vec<(usize, T)> = Vec::new();
    let mut total: u64 = 0;
    for (&k, c) in nhat.counts() {
        let floor = c.to_u64().unwrap_or(0);
        let v = observed.get(&k).copied().unwrap_or(0) as u64;
        let b = floor.max(v);
        let frac = abs_diff(c.clone(), from_count_u64(floor));
        base.insert(k, b);
        remainders.push((k, frac));
        total += b;
    }
    let observed_total: u64 = observed.values().map(|&v| v as u64).sum();
    if observed_total > population {
        return Err(Error::SampleExceedsPopulation {
            n: observed_total as usize,
            population: population as usize,
        });
    }
    if total < population {
        let mut order = remainders.clone();
        order.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        let mut deficit = population - total;
        while deficit > 0 {
            for (k, _) in &order {
                if deficit == 0 {
                    break;
                }
                *base.get_mut(k).unwrap() += 1;
                deficit -= 1;
            }
        }
    } else if total > population {
        let mut order = remainders;
        order.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.0.cmp(&a.0))
        });
        let mut surplus = total - population;
        while surplus > 0 {
            let mut moved = false;
            for (k, _) in &order {
                if surplus == 0 {
                    break;
                }
                let v = observed.get(k).copied().unwrap_or(0) as u64;
                let b = base.get_mut(k).unwrap();
                if *b > v {
                    *b -= 1;
                    surplus -= 1;
                    moved = true;
                }
            }
            if !moved {
                // Cannot happen while sum(observed) <= population.
                return Err(Error::InvalidParameter(
                    "rounding constraints are infeasible".into(),
                ));
            }
        }
    }
    IntDegreeDistribution::from_counts(base, population as usize)
}

/// Pool-adjacent-violators isotonic regression of the map values over
/// degree, weighted by class counts. Exact PPSWOR inclusion is monotone in
/// size, so inversions in a simulated map are noise at rare degrees.
pub(crate) fn isotonic_cleanup<T: Scalar>(
    map: InclusionMap<T>,
    weights: &IntDegreeDistribution,
) -> Result<InclusionMap<T>> {
    let n = map.sample_size();
    let population = map.population();
    // Blocks of (weighted value sum, weight, span).
    let mut blocks: Vec<(T, T, usize)> = Vec::new();
    for (&k, p) in map.probs() {
        let w: T = from_count_u64(weights.count(k).max(1));
        blocks.push((p.clone() * w.clone(), w, 1));
        while blocks.len() >= 2 {
            let last = blocks.len() - 1;
            let mean_prev = blocks[last - 1].0.clone() / blocks[last - 1].1.clone();
            let mean_last = blocks[last].0.clone() / blocks[last].1.clone();
            if mean_prev > mean_last {
                let (s, w, c) = blocks.pop().unwrap();
                let prev = blocks.last_mut().unwrap();
                prev.0 = prev.0.clone() + s;
                prev.1 = prev.1.clone() + w;
                prev.2 += c;
            } else {
                break;
            }
        }
    }
    let degrees: Vec<usize> = map.probs().keys().copied().collect();
    let mut probs = BTreeMap::new();
    let mut idx = 0;
    for (s, w, span) in blocks {
        let mean = s / w;
        for _ in 0..span {
            probs.insert(degrees[idx], mean.clone());
            idx += 1;
        }
    }
    InclusionMap::new(probs, n, population)
}

/// Runs the fit with a caller-supplied inclusion-probability step. The step
/// receives the integer-rounded population, the sample size, and the
/// 1-based iteration index; [`fit_ss`] plugs in the Monte-Carlo estimator,
/// tests substitute exact oracles.
pub fn fit_ss_with<T, F>(
    sample: &RdsSample<T>,
    population: usize,
    config: &SimConfig,
    mut step: F,
) -> Result<SsFit<T>>
where
    T: Scalar,
    F: FnMut(&IntDegreeDistribution, usize, usize) -> Result<InclusionMap<T>>,
{
    config.check()?;
    let n = sample.n();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if population < n {
        return Err(Error::SampleExceedsPopulation { n, population });
    }
    for r in sample.records() {
        if r.degree == 0 {
            return Err(Error::ZeroDegree { id: r.id.clone() });
        }
    }
    let observed = sample.degree_counts();

    if population == n {
        // Census: the moment equations force N_k = v_k and f = 1.
        let counts: BTreeMap<usize, T> = observed
            .iter()
            .map(|(&k, &v)| (k, from_count::<T>(v)))
            .collect();
        let probs = observed.keys().map(|&k| (k, T::one())).collect();
        return Ok(SsFit {
            nhat: DegreeDistribution::from_counts(counts, population)?,
            inclusion: InclusionMap::new(probs, n, population)?,
            iterations_run: 0,
            moment_residual: 0.0,
        });
    }

    let mut map: InclusionMap<T> = initial_map(&observed, population)?;
    let mut nhat = update_degree_distribution(&observed, &map, population)?;
    let mut iterations_run = 0;
    for iteration in 1..=config.iterations {
        nhat = update_degree_distribution(&observed, &map, population)?;
        let rounded = round_to_population(&nhat, &observed)?;
        let mut next = step(&rounded, n, iteration)?;
        if config.isotonic {
            next = isotonic_cleanup(next, &rounded)?;
        }
        let converged = config.converge_tol.is_some_and(|tol| {
            map.probs().iter().all(|(&k, old)| {
                let new = next.get(k).expect("support is stable across iterations");
                let old_f = old.to_f64().unwrap_or(f64::NAN);
                let new_f = new.to_f64().unwrap_or(f64::NAN);
                (new_f - old_f).abs() <= tol * old_f.abs()
            })
        });
        map = next;
        iterations_run = iteration;
        if converged {
            break;
        }
    }

    let mut residual = T::zero();
    for (&k, &v) in &observed {
        let f = map.require(k)?;
        residual = residual + abs_diff(nhat.count(k) * f.clone(), from_count::<T>(v));
    }
    let moment_residual = residual.to_f64().unwrap_or(f64::NAN) / n as f64;

    Ok(SsFit {
        nhat,
        inclusion: map,
        iterations_run,
        moment_residual,
    })
}

/// Jointly fits the population degree distribution and the inclusion map by
/// iterated simulation. Deterministic given `config.seed` regardless of the
/// worker-pool size.
pub fn fit_ss<T: Scalar>(
    sample: &RdsSample<T>,
    population: usize,
    config: &SimConfig,
) -> Result<SsFit<T>> {
    let trials = config.trials;
    let seed = config.seed;
    fit_ss_with(sample, population, config, |dist, n, iteration| {
        estimate_inclusion_by_class(dist, n, trials, stream::derive(seed, &[iteration as u64]))
    })
}

/// Generalized Horvitz-Thompson estimate using a fitted inclusion map:
/// `sum_j z_j / pi(d_j) / sum_j 1 / pi(d_j)`.
pub fn mu_from_fit<T: Scalar>(sample: &RdsSample<T>, fit: &SsFit<T>) -> Result<T> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for r in sample.records() {
        let pi = fit.inclusion.require(r.degree)?;
        num = num + r.outcome.clone() / pi.clone();
        den = den + T::one() / pi.clone();
    }
    Ok(num / den)
}

/// Computes one of the three estimators as a tagged [`Estimate`]. The
/// assumed population size is required for (and only used by) the
/// successive-sampling method.
pub fn estimate<T: Scalar>(
    sample: &RdsSample<T>,
    method: Method,
    population: Option<usize>,
    config: &SimConfig,
) -> Result<Estimate<T>> {
    let (value, assumed_population) = match method {
        Method::Ss => {
            let population = population.ok_or_else(|| {
                Error::InvalidParameter(
                    "the successive-sampling estimator needs a population size".into(),
                )
            })?;
            let fit = fit_ss(sample, population, config)?;
            (mu_from_fit(sample, &fit)?, Some(population))
        }
        Method::Vh => (crate::estimators::mu_vh(sample)?, None),
        Method::Mean => (crate::estimators::mu_mean(sample)?, None),
    };
    Ok(Estimate {
        value,
        method,
        assumed_population,
        config: config.clone(),
    })
}

/// Successive-sampling estimate of the population mean for an assumed
/// population size.
pub fn mu_ss<T: Scalar>(
    sample: &RdsSample<T>,
    population: usize,
    config: &SimConfig,
) -> Result<Estimate<T>> {
    let fit = fit_ss(sample, population, config)?;
    Ok(Estimate {
        value: mu_from_fit(sample, &fit)?,
        method: Method::Ss,
        assumed_population: Some(population),
        config: config.clone(),
    })
}

/// One successive-sampling estimate per assumed population size, all from
/// the same base seed so the curve is smooth in everything but the assumed
/// size.
pub fn sensitivity_sweep<T: Scalar>(
    sample: &RdsSample<T>,
    grid: &[usize],
    config: &SimConfig,
) -> Result<Vec<(usize, Estimate<T>)>> {
    let n = sample.n();
    for &population in grid {
        if population < n {
            return Err(Error::SampleExceedsPopulation { n, population });
        }
    }
    grid.iter()
        .map(|&population| Ok((population, mu_ss(sample, population, config)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppswor::exact_class_inclusion;
    use num_rational::BigRational;
    use num_traits::FromPrimitive;

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::from_i64(n).unwrap() / BigRational::from_i64(d).unwrap()
    }

    #[test]
    fn initial_map_single_class_is_forced() {
        let v = BTreeMap::from([(2usize, 3usize)]);
        let f: InclusionMap<BigRational> = initial_map(&v, 6).unwrap();
        assert_eq!(f.get(2).unwrap(), &frac(1, 2));
        // Horvitz-Thompson population identity: sum v/f = N.
        assert_eq!(frac(3, 1) / frac(1, 2), frac(6, 1));
    }

    #[test]
    fn initial_map_hand_values() {
        let v = BTreeMap::from([(1usize, 1usize), (2, 1)]);
        let f: InclusionMap<BigRational> = initial_map(&v, 3).unwrap();
        assert_eq!(f.get(1).unwrap(), &frac(1, 2));
        assert_eq!(f.get(2).unwrap(), &frac(1, 1));
    }

    #[test]
    fn initial_map_census_single_class_is_one() {
        let v = BTreeMap::from([(1usize, 5usize)]);
        let f: InclusionMap<f64> = initial_map(&v, 5).unwrap();
        assert_eq!(f.get(1).unwrap(), &1.0);
    }

    #[test]
    fn initial_map_population_identity_holds_generally() {
        let v = BTreeMap::from([(1usize, 4usize), (3, 2), (7, 5)]);
        let f: InclusionMap<f64> = initial_map(&v, 40).unwrap();
        let total: f64 = v.iter().map(|(&k, &c)| c as f64 / f.get(k).unwrap()).sum();
        assert!((total - 40.0).abs() < 1e-9);
    }

    #[test]
    fn initial_map_rejects_small_population() {
        let v = BTreeMap::from([(1usize, 5usize)]);
        assert!(matches!(
            initial_map::<f64>(&v, 4),
            Err(Error::SampleExceedsPopulation {
                n: 5,
                population: 4
            })
        ));
    }

    #[test]
    fn update_uniform_map_is_proportional() {
        let v = BTreeMap::from([(1usize, 2usize), (4, 6)]);
        let f = InclusionMap::new(BTreeMap::from([(1, 0.5f64), (4, 0.5)]), 8, 16).unwrap();
        let nhat = update_degree_distribution(&v, &f, 16).unwrap();
        assert!((nhat.count(1) - 4.0).abs() < 1e-12);
        assert!((nhat.count(4) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn update_hand_values_exact() {
        let v = BTreeMap::from([(1usize, 1usize), (2, 1)]);
        let f =
            InclusionMap::new(BTreeMap::from([(1, frac(1, 2)), (2, frac(1, 1))]), 2, 3).unwrap();
        let nhat = update_degree_distribution(&v, &f, 3).unwrap();
        assert_eq!(nhat.count(1), frac(2, 1));
        assert_eq!(nhat.count(2), frac(1, 1));
    }

    #[test]
    fn update_single_class_takes_whole_population() {
        let v = BTreeMap::from([(3usize, 4usize)]);
        let f = InclusionMap::new(BTreeMap::from([(3, 0.17f64)]), 4, 9).unwrap();
        let nhat = update_degree_distribution(&v, &f, 9).unwrap();
        assert!((nhat.count(3) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn rounding_preserves_population_and_observed_floor() {
        let v = BTreeMap::from([(1usize, 5usize), (2, 5)]);
        let nhat =
            DegreeDistribution::from_counts(BTreeMap::from([(1usize, 9.5f64), (2, 0.5)]), 10)
                .unwrap();
        let rounded = round_to_population(&nhat, &v).unwrap();
        assert_eq!(rounded.population(), 10);
        let total: u64 = rounded.counts().values().sum();
        assert_eq!(total, 10);
        assert!(rounded.count(1) >= 5);
        assert!(rounded.count(2) >= 5);
    }

    #[test]
    fn rounding_is_largest_remainder_when_unconstrained() {
        let v = BTreeMap::from([(1usize, 1usize), (2, 1), (3, 1)]);
        let nhat = DegreeDistribution::from_counts(
            BTreeMap::from([(1usize, 3.2f64), (2, 4.5), (3, 2.3)]),
            10,
        )
        .unwrap();
        let rounded = round_to_population(&nhat, &v).unwrap();
        // Floors (3, 4, 2) leave one unit; degree 2 has the largest remainder.
        assert_eq!(rounded.count(1), 3);
        assert_eq!(rounded.count(2), 5);
        assert_eq!(rounded.count(3), 2);
    }

    #[test]
    fn census_fit_short_circuits_to_unit_probabilities() {
        let sample = RdsSample::from_pairs([(1usize, 1.0f64), (3, 0.0), (3, 1.0)]);
        let fit = fit_ss(&sample, 3, &SimConfig::new(10, 3, 1)).unwrap();
        assert_eq!(fit.iterations_run, 0);
        assert!(fit.inclusion.probs().values().all(|&p| p == 1.0));
        assert_eq!(fit.moment_residual, 0.0);
        assert_eq!(fit.nhat.count(3), 2.0);
    }

    #[test]
    fn oracle_substituted_fit_reaches_moment_fixed_point() {
        // v = {1:5, 4:5}, N = 20, n = 10, inclusion step replaced by the
        // exact class oracle: the iteration should nearly solve the moment
        // equations N_k f(k) = v_k.
        let pairs = (0..5)
            .map(|_| (1usize, 0.0f64))
            .chain((0..5).map(|_| (4usize, 1.0f64)));
        let sample = RdsSample::from_pairs(pairs);
        let config = SimConfig::new(1, 3, 0);
        let fit = fit_ss_with(&sample, 20, &config, |dist, n, _| {
            let probs = exact_class_inclusion::<f64>(dist, n)?;
            InclusionMap::new(probs, n, dist.population())
        })
        .unwrap();
        assert!(
            fit.moment_residual < 0.05,
            "residual {}",
            fit.moment_residual
        );
        let total: f64 = fit.nhat.counts().values().sum();
        assert!((total - 20.0).abs() < 1e-6);
    }

    #[test]
    fn equal_degree_fit_has_flat_inclusion_at_sampling_fraction() {
        let sample = RdsSample::from_pairs((0..8).map(|i| (3usize, (i % 2) as f64)));
        let config = SimConfig::new(1, 3, 0);
        let fit = fit_ss_with(&sample, 40, &config, |dist, n, _| {
            let probs = exact_class_inclusion::<f64>(dist, n)?;
            InclusionMap::new(probs, n, dist.population())
        })
        .unwrap();
        assert!((fit.nhat.count(3) - 40.0).abs() < 1e-9);
        assert!((fit.inclusion.get(3).unwrap() - 8.0 / 40.0).abs() < 1e-12);
    }

    #[test]
    fn census_estimate_equals_sample_mean_exactly() {
        let sample =
            RdsSample::from_pairs([(2usize, 1.0f64), (5, 0.0), (1, 1.0), (7, 0.0), (7, 0.0)]);
        let est = mu_ss(&sample, 5, &SimConfig::new(50, 3, 9)).unwrap();
        let mean = crate::estimators::mu_mean(&sample).unwrap();
        assert!((est.value - mean).abs() < 1e-12);
    }

    #[test]
    fn equal_degrees_estimate_equals_sample_mean_for_any_population() {
        let sample = RdsSample::from_pairs((0..10).map(|i| (4usize, f64::from(i % 3 == 0))));
        let mean = crate::estimators::mu_mean(&sample).unwrap();
        for population in [10, 25, 1000] {
            let est = mu_ss(&sample, population, &SimConfig::new(200, 3, 5)).unwrap();
            assert!(
                (est.value - mean).abs() < 1e-12,
                "population {population}: {} vs {mean}",
                est.value
            );
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let sample =
            RdsSample::from_pairs([(1usize, 0.0f64), (2, 1.0), (2, 0.0), (3, 1.0), (6, 1.0)]);
        let config = SimConfig::new(300, 3, 77);
        let a = fit_ss(&sample, 12, &config).unwrap();
        let b = fit_ss(&sample, 12, &config).unwrap();
        assert_eq!(a.inclusion, b.inclusion);
        assert_eq!(a.nhat, b.nhat);
    }

    #[test]
    fn isotonic_cleanup_restores_monotonicity() {
        let weights = IntDegreeDistribution::from_counts(
            BTreeMap::from([(1usize, 4u64), (2, 4), (3, 2)]),
            10,
        )
        .unwrap();
        let map = InclusionMap::new(
            BTreeMap::from([(1usize, 0.5f64), (2, 0.3), (3, 0.4)]),
            3,
            10,
        )
        .unwrap();
        let clean = isotonic_cleanup(map, &weights).unwrap();
        assert!(clean.is_monotone());
        // Weighted mean of the merged (0.5, 0.3) block with weights (4, 4).
        assert!((clean.get(1).unwrap() - 0.4).abs() < 1e-12);
        assert!((clean.get(2).unwrap() - 0.4).abs() < 1e-12);
        assert!((clean.get(3).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn fitted_map_is_monotone_with_isotonic_enabled() {
        let sample = RdsSample::from_pairs([
            (1usize, 0.0f64),
            (1, 1.0),
            (2, 0.0),
            (3, 1.0),
            (5, 0.0),
            (8, 1.0),
        ]);
        let fit = fit_ss(&sample, 30, &SimConfig::new(200, 3, 3)).unwrap();
        assert!(fit.inclusion.is_monotone());
    }

    #[test]
    fn estimate_dispatches_all_methods() {
        let sample = RdsSample::from_pairs([(1usize, 1.0f64), (2, 0.0), (4, 1.0)]);
        let config = SimConfig::new(100, 2, 6);
        let mean = estimate(&sample, Method::Mean, None, &config).unwrap();
        assert_eq!(mean.value, 2.0 / 3.0);
        assert_eq!(mean.method, Method::Mean);
        assert_eq!(mean.assumed_population, None);
        let vh = estimate(&sample, Method::Vh, None, &config).unwrap();
        assert_eq!(vh.value, crate::estimators::mu_vh(&sample).unwrap());
        let ss = estimate(&sample, Method::Ss, Some(12), &config).unwrap();
        assert_eq!(ss.assumed_population, Some(12));
        assert_eq!(ss.value, mu_ss(&sample, 12, &config).unwrap().value);
        assert!(matches!(
            estimate(&sample, Method::Ss, None, &config),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn loose_convergence_tolerance_stops_early() {
        let sample =
            RdsSample::from_pairs([(1usize, 0.0f64), (2, 1.0), (2, 0.0), (3, 1.0), (6, 1.0)]);
        let mut config = SimConfig::new(400, 5, 21);
        config.converge_tol = Some(1e9);
        let fit = fit_ss(&sample, 20, &config).unwrap();
        assert_eq!(fit.iterations_run, 1);
        let strict = SimConfig::new(400, 5, 21);
        assert_eq!(fit_ss(&sample, 20, &strict).unwrap().iterations_run, 5);
    }

    #[test]
    fn sensitivity_sweep_rejects_grid_below_sample_size() {
        let sample = RdsSample::from_pairs([(1usize, 1.0f64), (2, 0.0)]);
        assert!(matches!(
            sensitivity_sweep(&sample, &[1], &SimConfig::default()),
            Err(Error::SampleExceedsPopulation { .. })
        ));
    }

    #[test]
    fn sensitivity_sweep_census_point_is_sample_mean() {
        let sample = RdsSample::from_pairs([(1usize, 1.0f64), (2, 0.0), (3, 0.0)]);
        let sweep = sensitivity_sweep(&sample, &[3], &SimConfig::new(10, 2, 4)).unwrap();
        assert_eq!(sweep.len(), 1);
        let mean = crate::estimators::mu_mean(&sample).unwrap();
        assert!((sweep[0].1.value - mean).abs() < 1e-12);
    }

    #[test]
    fn sweep_on_equal_degrees_is_flat() {
        let sample = RdsSample::from_pairs((0..6).map(|i| (2usize, f64::from(i < 2))));
        let mean = crate::estimators::mu_mean(&sample).unwrap();
        let sweep =
            sensitivity_sweep(&sample, &[6, 1_000_000], &SimConfig::new(100, 3, 8)).unwrap();
        for (_, est) in sweep {
            assert!((est.value - mean).abs() < 1e-12);
        }
    }
}
