//! The Volz-Heckathorn estimator, the sample mean, and scenario descriptors.

use serde::{Deserialize, Serialize};

use crate::domain::RdsSample;
use crate::error::{Error, Result};
use crate::scalar::{from_count, from_count_u64, Scalar};

/// Volz-Heckathorn estimator: the generalized Horvitz-Thompson form with
/// weights inversely proportional to degree,
/// `sum(z_i / d_i) / sum(1 / d_i)`. For a binary outcome the result lies in
/// `[0, 1]`.
pub fn mu_vh<T: Scalar>(sample: &RdsSample<T>) -> Result<T> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for r in sample.records() {
        if r.degree == 0 {
            return Err(Error::ZeroDegree { id: r.id.clone() });
        }
        let d: T = from_count(r.degree);
        num = num + r.outcome.clone() / d.clone();
        den = den + T::one() / d;
    }
    Ok(num / den)
}

/// Arithmetic mean of the outcomes.
pub fn mu_mean<T: Scalar>(sample: &RdsSample<T>) -> Result<T> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sum = T::zero();
    for r in sample.records() {
        sum = sum + r.outcome.clone();
    }
    Ok(sum / from_count(sample.n()))
}

/// Activity ratio `w`: mean degree of the infected group divided by mean
/// degree of the uninfected group. A descriptor of a population with known
/// statuses, not an estimator from sample data.
pub fn activity_ratio<T: Scalar>(degrees: &[usize], infected: &[bool]) -> Result<T> {
    if degrees.len() != infected.len() {
        return Err(Error::InvalidParameter(
            "degrees and statuses differ in length".into(),
        ));
    }
    let mut d_inf: u64 = 0;
    let mut n_inf: u64 = 0;
    let mut d_un: u64 = 0;
    let mut n_un: u64 = 0;
    for (&d, &z) in degrees.iter().zip(infected) {
        if z {
            d_inf += d as u64;
            n_inf += 1;
        } else {
            d_un += d as u64;
            n_un += 1;
        }
    }
    if n_inf == 0 || d_inf == 0 {
        return Err(Error::DegenerateGroup(
            "no infected nodes with positive degree",
        ));
    }
    if n_un == 0 || d_un == 0 {
        return Err(Error::DegenerateGroup(
            "no uninfected nodes with positive degree",
        ));
    }
    // (d_inf / n_inf) / (d_un / n_un) in exact integer ratios.
    Ok(from_count_u64::<T>(d_inf) * from_count_u64::<T>(n_un)
        / (from_count_u64::<T>(n_inf) * from_count_u64::<T>(d_un)))
}

/// Deliberate small and large misstatements of the population size,
/// `N_s = N - (N - n) / 2` and `N_l = N + (N - n) / 2`, rounded half-up to
/// integers so they can serve as assumed population sizes.
pub fn nhat_bounds(population: usize, n: usize) -> Result<(usize, usize)> {
    if n > population {
        return Err(Error::SampleExceedsPopulation { n, population });
    }
    // 2*N_s = N + n and 2*N_l = 3N - n; round half-up.
    let half_up = |twice: usize| (twice + (twice & 1)) / 2;
    Ok((half_up(population + n), half_up(3 * population - n)))
}

/// Realized descriptors of a generated population; used to check generator
/// calibration against the requested parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDescriptors {
    pub mean_degree: f64,
    pub activity_ratio: f64,
    /// Homophily ratio of infected-infected to infected-uninfected tie
    /// probability; `None` when the graph has no cross-group edges (the
    /// ratio is infinite).
    pub homophily: Option<f64>,
    pub prevalence: f64,
}
