//! Core data types shared by the estimators and the simulation harness.
//!
//! All types here are immutable after construction and safe to share across
//! worker threads.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{abs_diff, from_count, Scalar};

/// Population degree counts: for each degree `k`, how many population
/// members have that degree.
///
/// Counts are generic over the scalar type. Simulation populations use
/// integer counts ([`crate::IntDegreeDistribution`]); the moment-matching
/// iteration produces real-valued counts ([`crate::RealDegreeDistribution`]).
/// Zero-count classes are not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution<T> {
    counts: BTreeMap<usize, T>,
    population: usize,
}

impl<T: Scalar> DegreeDistribution<T> {
    /// Builds a distribution and checks its invariants: every degree is
    /// positive, every count non-negative, and the counts sum to
    /// `population` (exactly for integer scalars, within 1e-9 otherwise).
    pub fn from_counts(counts: BTreeMap<usize, T>, population: usize) -> Result<Self> {
        if population == 0 {
            return Err(Error::InvalidParameter(
                "population size must be positive".into(),
            ));
        }
        let mut kept = BTreeMap::new();
        let mut total = T::zero();
        for (k, c) in counts {
            if k == 0 {
                return Err(Error::InvalidParameter(
                    "degree classes must have degree >= 1".into(),
                ));
            }
            if c < T::zero() {
                return Err(Error::InvalidParameter(format!(
                    "count for degree {k} is negative: {c:?}"
                )));
            }
            if c.is_zero() {
                continue;
            }
            total = total + c.clone();
            kept.insert(k, c);
        }
        // For integer scalars the tolerance converts to zero, making the
        // check exact; for floats and rationals it is an absolute 1e-9.
        let tol = T::from_f64(1e-9).unwrap_or_else(T::zero);
        if abs_diff(total, from_count(population)) > tol {
            return Err(Error::InvalidParameter(format!(
                "degree counts must sum to the population size {population}"
            )));
        }
        Ok(Self {
            counts: kept,
            population,
        })
    }

    /// Total population size `N`.
    pub fn population(&self) -> usize {
        self.population
    }

    /// Maximum degree `K` present (0 for an empty distribution).
    pub fn max_degree(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Count for degree `k` (zero if the class is absent).
    pub fn count(&self, degree: usize) -> T {
        self.counts.get(&degree).cloned().unwrap_or_else(T::zero)
    }

    /// Degree classes in ascending order.
    pub fn counts(&self) -> &BTreeMap<usize, T> {
        &self.counts
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.keys().copied()
    }
}

impl DegreeDistribution<u64> {
    /// Total number of edge ends, `sum_k k * N_k`.
    pub fn stub_total(&self) -> u64 {
        self.counts.iter().map(|(&k, &c)| k as u64 * c).sum()
    }

    /// Converts integer counts to any scalar type.
    pub fn to_scalar<T: Scalar>(&self) -> DegreeDistribution<T> {
        DegreeDistribution {
            counts: self
                .counts
                .iter()
                .map(|(&k, &c)| (k, crate::scalar::from_count_u64(c)))
                .collect(),
            population: self.population,
        }
    }
}

/// One respondent record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdsRecord<T> {
    /// Unique respondent token.
    pub id: String,
    /// Recruiter token; `None` marks a seed.
    pub recruiter_id: Option<String>,
    /// Self-reported network degree.
    pub degree: usize,
    /// Measured outcome; 0/1 for prevalence estimation.
    pub outcome: T,
    /// Recruitment wave; seeds are wave 0.
    pub wave: u32,
}

/// An ordered RDS sample.
///
/// Construction never fails: invariant violations are data, reported by
/// [`RdsSample::validate`], so that malformed field data can be inspected
/// and optionally repaired rather than rejected at parse time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdsSample<T> {
    records: Vec<RdsRecord<T>>,
}

impl<T: Scalar> RdsSample<T> {
    pub fn from_records(records: Vec<RdsRecord<T>>) -> Self {
        Self { records }
    }

    /// Builds an all-seed sample from `(degree, outcome)` pairs; ids are
    /// assigned sequentially. Convenient for estimator inputs where the
    /// recruitment tree is irrelevant.
    pub fn from_pairs<I: IntoIterator<Item = (usize, T)>>(pairs: I) -> Self {
        let records = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (degree, outcome))| RdsRecord {
                id: (i + 1).to_string(),
                recruiter_id: None,
                degree,
                outcome,
                wave: 0,
            })
            .collect();
        Self { records }
    }

    /// Sample size `n`.
    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[RdsRecord<T>] {
        &self.records
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.records.iter().map(|r| r.degree)
    }

    pub fn outcomes(&self) -> impl Iterator<Item = T> + '_ {
        self.records.iter().map(|r| r.outcome.clone())
    }

    /// Observed degree counts `v_k`: the number of sample units with each
    /// degree. Only degrees present in the sample appear.
    pub fn degree_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.records {
            *counts.entry(r.degree).or_insert(0usize) += 1;
        }
        counts
    }

    /// Checks every sample invariant, plus the population-consistency checks
    /// when `population` is given. Returns all violations found.
    pub fn validate(&self, population: Option<usize>) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (idx, r) in self.records.iter().enumerate() {
            if r.degree == 0 {
                violations.push(Violation::DegreeNotPositive { id: r.id.clone() });
            }
            if let Some(&first) = seen.get(r.id.as_str()) {
                violations.push(Violation::DuplicateId {
                    id: r.id.clone(),
                    first_index: first,
                    index: idx,
                });
            } else {
                seen.insert(r.id.as_str(), idx);
            }
            match &r.recruiter_id {
                None => {
                    if r.wave != 0 {
                        violations.push(Violation::SeedWaveNonZero {
                            id: r.id.clone(),
                            wave: r.wave,
                        });
                    }
                }
                Some(rec) => match seen.get(rec.as_str()) {
                    Some(&rec_idx) if rec_idx < idx => {
                        let expected = self.records[rec_idx].wave + 1;
                        if r.wave != expected {
                            violations.push(Violation::WaveMismatch {
                                id: r.id.clone(),
                                expected,
                                actual: r.wave,
                            });
                        }
                    }
                    _ => violations.push(Violation::UnknownRecruiter {
                        id: r.id.clone(),
                        recruiter_id: rec.clone(),
                    }),
                },
            }
        }
        if let Some(pop) = population {
            if self.n() > pop {
                violations.push(Violation::SampleExceedsPopulation {
                    n: self.n(),
                    population: pop,
                });
            }
            for r in &self.records {
                if pop >= 1 && r.degree > pop - 1 {
                    violations.push(Violation::DegreeExceedsPopulation {
                        id: r.id.clone(),
                        degree: r.degree,
                        max: pop - 1,
                    });
                }
            }
        }
        violations
    }

    /// Repairs the degree anomalies validation would flag: degree 0 is
    /// raised to 1 (a sampled respondent has at least their recruiter tie)
    /// and, when `population` is given, degrees above `N - 1` are capped.
    /// Every change is reported.
    pub fn repaired(&self, population: Option<usize>) -> (Self, Vec<Repair>) {
        let mut repairs = Vec::new();
        let records = self
            .records
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r.degree == 0 {
                    repairs.push(Repair::ZeroDegreeRaised { id: r.id.clone() });
                    r.degree = 1;
                }
                if let Some(pop) = population {
                    let max = pop.saturating_sub(1).max(1);
                    if r.degree > max {
                        repairs.push(Repair::DegreeCapped {
                            id: r.id.clone(),
                            from: r.degree,
                            to: max,
                        });
                        r.degree = max;
                    }
                }
                r
            })
            .collect();
        (Self { records }, repairs)
    }
}

/// A sample-invariant violation. Violations are data, not errors: callers
/// decide whether to reject, repair, or report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    DegreeNotPositive {
        id: String,
    },
    DuplicateId {
        id: String,
        first_index: usize,
        index: usize,
    },
    UnknownRecruiter {
        id: String,
        recruiter_id: String,
    },
    SeedWaveNonZero {
        id: String,
        wave: u32,
    },
    WaveMismatch {
        id: String,
        expected: u32,
        actual: u32,
    },
    SampleExceedsPopulation {
        n: usize,
        population: usize,
    },
    DegreeExceedsPopulation {
        id: String,
        degree: usize,
        max: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeNotPositive { id } => write!(f, "record {id}: degree is 0"),
            Violation::DuplicateId {
                id,
                first_index,
                index,
            } => {
                write!(
                    f,
                    "record {id}: duplicate id (records {first_index} and {index})"
                )
            }
            Violation::UnknownRecruiter { id, recruiter_id } => {
                write!(
                    f,
                    "record {id}: recruiter {recruiter_id} is not an earlier record"
                )
            }
            Violation::SeedWaveNonZero { id, wave } => {
                write!(f, "record {id}: seed has wave {wave}, expected 0")
            }
            Violation::WaveMismatch {
                id,
                expected,
                actual,
            } => {
                write!(
                    f,
                    "record {id}: wave {actual}, expected recruiter wave + 1 = {expected}"
                )
            }
            Violation::SampleExceedsPopulation { n, population } => {
                write!(f, "sample size {n} exceeds population size {population}")
            }
            Violation::DegreeExceedsPopulation { id, degree, max } => {
                write!(
                    f,
                    "record {id}: degree {degree} exceeds population bound {max}"
                )
            }
        }
    }
}

/// A repair applied by [`RdsSample::repaired`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Repair {
    ZeroDegreeRaised { id: String },
    DegreeCapped { id: String, from: usize, to: usize },
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Repair::ZeroDegreeRaised { id } => write!(f, "record {id}: degree 0 raised to 1"),
            Repair::DegreeCapped { id, from, to } => {
                write!(f, "record {id}: degree {from} capped to {to}")
            }
        }
    }
}

/// Mapping from degree class to inclusion probability for a sample of size
/// `n` from an assumed population of size `N`.
///
/// Every stored value is strictly positive. Values above 1 are permitted
/// because the proportional initial map of the fitting algorithm can exceed
/// 1 for large degrees; maps produced by simulation are always in `(0, 1]`
/// (see [`InclusionMap::is_proper`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionMap<T> {
    probs: BTreeMap<usize, T>,
    sample_size: usize,
    population: usize,
}

impl<T: Scalar> InclusionMap<T> {
    pub fn new(probs: BTreeMap<usize, T>, sample_size: usize, population: usize) -> Result<Self> {
        for (&k, p) in &probs {
            if *p <= T::zero() {
                return Err(Error::ZeroInclusionProbability { degree: k });
            }
        }
        Ok(Self {
            probs,
            sample_size,
            population,
        })
    }

    pub fn get(&self, degree: usize) -> Option<&T> {
        self.probs.get(&degree)
    }

    pub fn require(&self, degree: usize) -> Result<&T> {
        self.probs.get(&degree).ok_or(Error::UnknownDegree(degree))
    }

    pub fn probs(&self) -> &BTreeMap<usize, T> {
        &self.probs
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn population(&self) -> usize {
        self.population
    }

    /// True when every probability is at most 1.
    pub fn is_proper(&self) -> bool {
        self.probs.values().all(|p| *p <= T::one())
    }

    /// True when probabilities are non-decreasing in degree.
    pub fn is_monotone(&self) -> bool {
        self.probs
            .values()
            .zip(self.probs.values().skip(1))
            .all(|(a, b)| a <= b)
    }
}

/// Knobs for the simulation-based fitting algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Monte-Carlo replicates `M` per inclusion-probability estimate.
    pub trials: usize,
    /// Fixed-point iterations `r`.
    pub iterations: usize,
    /// Master RNG seed.
    pub seed: u64,
    /// Apply pool-adjacent-violators cleanup to each estimated map, keeping
    /// inclusion probabilities non-decreasing in degree. Disable for strict
    /// replication of the raw iteration.
    pub isotonic: bool,
    /// Optional early stop: finish when the maximum relative change of the
    /// inclusion map falls below this tolerance.
    pub converge_tol: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 2000,
            iterations: 3,
            seed: 0,
            isotonic: true,
            converge_tol: None,
        }
    }
}

impl SimConfig {
    pub fn new(trials: usize, iterations: usize, seed: u64) -> Self {
        Self {
            trials,
            iterations,
            seed,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_isotonic(mut self, isotonic: bool) -> Self {
        self.isotonic = isotonic;
        self
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be >= 1".into()));
        }
        Ok(())
    }
}
