//! Successive-sampling (PPSWOR) draw engine, exact enumeration oracles for
//! small populations, and Monte-Carlo inclusion-probability estimation.
//!
//! All unit sizes are positive integers (network degrees), so draws are made
//! in exact integer weight space: at each step a uniform integer threshold
//! in `[0, remaining total)` selects the next unit, which reproduces the
//! conditional law "probability proportional to size among the remaining
//! units" without floating-point cumulative sums.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::domain::InclusionMap;
use crate::error::{Error, Result};
use crate::scalar::{from_count_u64, Scalar};
use crate::stream;
use crate::IntDegreeDistribution;

/// Unit sizes of a finite population; for RDS these are nodal degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationSizes {
    sizes: Vec<usize>,
    total: u64,
}

impl PopulationSizes {
    /// All sizes must be at least 1: a size-0 unit can never be selected.
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidParameter("population has no units".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidParameter("unit sizes must be >= 1".into()));
        }
        let total = sizes.iter().map(|&s| s as u64).sum();
        Ok(Self { sizes, total })
    }

    /// Expands degree classes into per-unit sizes, ascending by degree.
    pub fn from_distribution(dist: &IntDegreeDistribution) -> Result<Self> {
        let mut sizes = Vec::with_capacity(dist.population());
        for (&k, &c) in dist.counts() {
            sizes.extend(std::iter::repeat(k).take(c as usize));
        }
        Self::new(sizes)
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total size `2E = sum_i d_i`.
    pub fn total(&self) -> u64 {
        self.total
    }
}

// Fenwick tree over u64 weights supporting weighted selection in O(log N).
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(weights: &[usize]) -> Self {
        let n = weights.len();
        let mut tree = vec![0u64; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            let mut idx = i + 1;
            while idx <= n {
                tree[idx] += w as u64;
                idx += idx & idx.wrapping_neg();
            }
        }
        Self { tree }
    }

    fn subtract(&mut self, mut idx: usize, w: u64) {
        idx += 1;
        while idx < self.tree.len() {
            self.tree[idx] -= w;
            idx += idx & idx.wrapping_neg();
        }
    }

    // Index of the first unit whose prefix sum exceeds `threshold`.
    fn find(&self, mut threshold: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= threshold {
                threshold -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos
    }
}

/// Draws an ordered PPSWOR sample of `n` distinct unit indices: the first
/// unit is selected with probability proportional to size from the full
/// population, each subsequent unit proportional to size among the units
/// not yet selected.
pub fn draw_ppswor<R: Rng + ?Sized>(
    pop: &PopulationSizes,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n > pop.len() {
        return Err(Error::SampleExceedsPopulation {
            n,
            population: pop.len(),
        });
    }
    let mut fenwick = Fenwick::new(pop.sizes());
    let mut remaining = pop.total();
    let mut picked = Vec::with_capacity(n);
    for _ in 0..n {
        let threshold = rng.random_range(0..remaining);
        let idx = fenwick.find(threshold);
        let w = pop.sizes()[idx] as u64;
        fenwick.subtract(idx, w);
        remaining -= w;
        picked.push(idx);
    }
    Ok(picked)
}

/// Largest population the unit-level exact oracle enumerates.
pub const EXACT_UNIT_LIMIT: usize = 12;

/// Exact per-unit inclusion probabilities of a PPSWOR sample of size `n`,
/// by dynamic programming over subsets.
///
/// `q[S]` is the probability that the first `|S|` draws are exactly the set
/// `S`; expanding one unit at a time factors the sum over all ordered
/// `n`-sequences, so the result equals the full ordered enumeration while
/// visiting each subset once. Guarded to [`EXACT_UNIT_LIMIT`] units.
pub fn exact_inclusion<T: Scalar>(pop: &PopulationSizes, n: usize) -> Result<Vec<T>> {
    let units = pop.len();
    if units > EXACT_UNIT_LIMIT {
        return Err(Error::OracleLimitExceeded {
            limit: EXACT_UNIT_LIMIT,
            requested: units,
            unit: "units",
        });
    }
    if n > units {
        return Err(Error::SampleExceedsPopulation {
            n,
            population: units,
        });
    }
    let total: u64 = pop.total();
    let mut q = vec![T::zero(); 1 << units];
    q[0] = T::one();
    let mut pi = vec![T::zero(); units];
    for mask in 0..(1usize << units) {
        if q[mask].is_zero() {
            continue;
        }
        let count = mask.count_ones() as usize;
        if count == n {
            for (i, p) in pi.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    *p = p.clone() + q[mask].clone();
                }
            }
            continue;
        }
        let used: u64 = (0..units)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pop.sizes()[i] as u64)
            .sum();
        let remaining = from_count_u64::<T>(total - used);
        for i in 0..units {
            if mask & (1 << i) == 0 {
                let step = q[mask].clone() * from_count_u64::<T>(pop.sizes()[i] as u64)
                    / remaining.clone();
                let next = mask | (1 << i);
                q[next] = q[next].clone() + step;
            }
        }
    }
    // Float rounding can push a census-like probability a few ulps past 1;
    // the contract is pi in (0, 1].
    for p in &mut pi {
        if *p > T::one() {
            *p = T::one();
        }
    }
    Ok(pi)
}

/// Largest class-count state space the class-level exact oracle visits.
pub const EXACT_CLASS_STATE_LIMIT: usize = 2_000_000;

/// Exact per-class inclusion probabilities by dynamic programming over
/// class-count states.
///
/// Units of equal size are exchangeable under PPSWOR, so the chain of
/// per-class sampled counts is Markov with transition probability
/// `(N_k - t_k) * k / W_remaining` into class `k`. This handles populations
/// far beyond [`exact_inclusion`]'s unit limit whenever the number of
/// distinct degrees is small; the state space is the product of
/// `(count + 1)` over classes.
pub fn exact_class_inclusion<T: Scalar>(
    dist: &IntDegreeDistribution,
    n: usize,
) -> Result<BTreeMap<usize, T>> {
    let population = dist.population();
    if n > population {
        return Err(Error::SampleExceedsPopulation { n, population });
    }
    let classes: Vec<(u64, u64)> = dist.counts().iter().map(|(&k, &c)| (k as u64, c)).collect();
    let mut states: usize = 1;
    for &(_, c) in &classes {
        states = states
            .checked_mul(c as usize + 1)
            .filter(|&s| s <= EXACT_CLASS_STATE_LIMIT)
            .ok_or(Error::OracleLimitExceeded {
                limit: EXACT_CLASS_STATE_LIMIT,
                requested: usize::MAX,
                unit: "class-count states",
            })?;
    }
    // Mixed-radix strides: state index = sum_k taken_k * stride_k.
    let mut strides = Vec::with_capacity(classes.len());
    let mut acc = 1usize;
    for &(_, c) in &classes {
        strides.push(acc);
        acc *= c as usize + 1;
    }
    let total_weight: u64 = classes.iter().map(|&(k, c)| k * c).sum();

    let mut prob = vec![T::zero(); states];
    prob[0] = T::one();
    let mut expected_taken = vec![T::zero(); classes.len()];
    for idx in 0..states {
        if prob[idx].is_zero() {
            continue;
        }
        // Decode the taken vector for this state.
        let mut taken = Vec::with_capacity(classes.len());
        let mut rest = idx;
        for &(_, c) in &classes {
            taken.push((rest % (c as usize + 1)) as u64);
            rest /= c as usize + 1;
        }
        let drawn: u64 = taken.iter().sum();
        if drawn == n as u64 {
            for (i, t) in taken.iter().enumerate() {
                expected_taken[i] =
                    expected_taken[i].clone() + prob[idx].clone() * from_count_u64::<T>(*t);
            }
            continue;
        }
        let used: u64 = classes.iter().zip(&taken).map(|(&(k, _), &t)| k * t).sum();
        let remaining = from_count_u64::<T>(total_weight - used);
        for (i, &(k, c)) in classes.iter().enumerate() {
            if taken[i] < c {
                let step =
                    prob[idx].clone() * from_count_u64::<T>((c - taken[i]) * k) / remaining.clone();
                let next = idx + strides[i];
                prob[next] = prob[next].clone() + step;
            }
        }
    }
    Ok(classes
        .iter()
        .enumerate()
        .map(|(i, &(k, c))| {
            let mut p = expected_taken[i].clone() / from_count_u64::<T>(c);
            if p > T::one() {
                p = T::one();
            }
            (k as usize, p)
        })
        .collect())
}

// One class-level PPSWOR replicate: counts of sampled units per class.
fn draw_class_counts<R: Rng + ?Sized>(classes: &[(u64, u64)], n: usize, rng: &mut R) -> Vec<u64> {
    let mut taken = vec![0u64; classes.len()];
    let mut remaining: u64 = classes.iter().map(|&(k, c)| k * c).sum();
    for _ in 0..n {
        let mut threshold = rng.random_range(0..remaining);
        for (i, &(k, c)) in classes.iter().enumerate() {
            let w = (c - taken[i]) * k;
            if threshold < w {
                taken[i] += 1;
                remaining -= k;
                break;
            }
            threshold -= w;
        }
    }
    taken
}

/// Estimates per-degree-class inclusion probabilities by simulating `trials`
/// PPSWOR samples of size `n` from the integer-count population `dist` and
/// applying the smoothed frequency estimator `(U_k + 1) / (trials * N_k + 1)`,
/// where `U_k` counts sampled units of degree `k` across all replicates.
///
/// Replicates run in parallel on the rayon pool; each replicate `j` uses the
/// stream derived from `(seed, j)` and the tallies are summed in integer
/// space, so the result is identical for any worker count.
///
/// Units within a class are exchangeable, so replicates are drawn at class
/// level: the chain of class counts has exactly the unit-level law projected
/// onto classes (verified against [`exact_inclusion`] in the test suite).
pub fn estimate_inclusion_by_class<T: Scalar>(
    dist: &IntDegreeDistribution,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<InclusionMap<T>> {
    let population = dist.population();
    if n > population {
        return Err(Error::SampleExceedsPopulation { n, population });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let classes: Vec<(u64, u64)> = dist.counts().iter().map(|(&k, &c)| (k as u64, c)).collect();
    let totals: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream::rng(seed, &[j as u64]);
            draw_class_counts(&classes, n, &mut rng)
        })
        .reduce(
            || vec![0u64; classes.len()],
            |mut acc, counts| {
                for (a, c) in acc.iter_mut().zip(counts) {
                    *a += c;
                }
                acc
            },
        );
    let probs = classes
        .iter()
        .zip(&totals)
        .map(|(&(k, c), &u)| {
            let p = from_count_u64::<T>(u + 1) / from_count_u64::<T>(trials as u64 * c + 1);
            (k as usize, p)
        })
        .collect();
    InclusionMap::new(probs, n, population)
}

/// Per-unit smoothed inclusion-frequency estimates `(U_i + 1) / (trials + 1)`
/// over `trials` PPSWOR replicates, where `U_i` counts the replicates in
/// which unit `i` was sampled. Parallel and deterministic as
/// [`estimate_inclusion_by_class`].
pub fn fattorini_unit_probs<T: Scalar>(
    pop: &PopulationSizes,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<T>> {
    if n > pop.len() {
        return Err(Error::SampleExceedsPopulation {
            n,
            population: pop.len(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let hits: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream::rng(seed, &[j as u64]);
            let picked = draw_ppswor(pop, n, &mut rng).expect("n <= N checked above");
            let mut hit = vec![0u64; pop.len()];
            for idx in picked {
                hit[idx] = 1;
            }
            hit
        })
        .reduce(
            || vec![0u64; pop.len()],
            |mut acc, hit| {
                for (a, h) in acc.iter_mut().zip(hit) {
                    *a += h;
                }
                acc
            },
        );
    Ok(hits
        .iter()
        .map(|&u| from_count_u64::<T>(u + 1) / from_count_u64::<T>(trials as u64 + 1))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn dist(pairs: &[(usize, u64)]) -> IntDegreeDistribution {
        let population: u64 = pairs.iter().map(|&(_, c)| c).sum();
        IntDegreeDistribution::from_counts(pairs.iter().copied().collect(), population as usize)
            .unwrap()
    }

    // Literal enumeration over all ordered n-sequences; the independent
    // cross-check for the subset-DP oracle.
    fn brute_force_inclusion(sizes: &[usize], n: usize) -> Vec<f64> {
        fn recurse(
            sizes: &[usize],
            chosen: &mut Vec<usize>,
            prob: f64,
            remaining: f64,
            n: usize,
            pi: &mut [f64],
        ) {
            if chosen.len() == n {
                for &i in chosen.iter() {
                    pi[i] += prob;
                }
                return;
            }
            for i in 0..sizes.len() {
                if chosen.contains(&i) {
                    continue;
                }
                chosen.push(i);
                recurse(
                    sizes,
                    chosen,
                    prob * sizes[i] as f64 / remaining,
                    remaining - sizes[i] as f64,
                    n,
                    pi,
                );
                chosen.pop();
            }
        }
        let mut pi = vec![0.0; sizes.len()];
        let total: usize = sizes.iter().sum();
        recurse(sizes, &mut Vec::new(), 1.0, total as f64, n, &mut pi);
        pi
    }

    #[test]
    fn draw_exhaustive_is_permutation() {
        let pop = PopulationSizes::new(vec![1, 1, 2]).unwrap();
        let mut rng = stream::rng(3, &[]);
        let mut picked = draw_ppswor(&pop, 3, &mut rng).unwrap();
        picked.sort_unstable();
        assert_eq!(picked, vec![0, 1, 2]);
    }

    #[test]
    fn draw_rejects_oversized_sample() {
        let pop = PopulationSizes::new(vec![1, 1]).unwrap();
        let mut rng = stream::rng(0, &[]);
        assert!(matches!(
            draw_ppswor(&pop, 3, &mut rng),
            Err(Error::SampleExceedsPopulation {
                n: 3,
                population: 2
            })
        ));
    }

    #[test]
    fn draw_symmetric_pair_is_fair() {
        let pop = PopulationSizes::new(vec![1, 1]).unwrap();
        let trials = 20_000;
        let mut zero = 0usize;
        for j in 0..trials {
            let mut rng = stream::rng(11, &[j]);
            if draw_ppswor(&pop, 1, &mut rng).unwrap()[0] == 0 {
                zero += 1;
            }
        }
        let freq = zero as f64 / trials as f64;
        // 4 sigma around 0.5 at 20k trials.
        assert!((freq - 0.5).abs() < 4.0 * (0.25f64 / trials as f64).sqrt());
    }

    #[test]
    fn draw_first_step_matches_size_proportions() {
        let pop = PopulationSizes::new(vec![1, 1, 2]).unwrap();
        let trials = 40_000;
        let mut counts = [0usize; 3];
        for j in 0..trials {
            let mut rng = stream::rng(12, &[j]);
            counts[draw_ppswor(&pop, 1, &mut rng).unwrap()[0]] += 1;
        }
        for (i, expect) in [(0, 0.25), (1, 0.25), (2, 0.5)] {
            let freq = counts[i] as f64 / trials as f64;
            let se = (expect * (1.0 - expect) / trials as f64).sqrt();
            assert!(
                (freq - expect).abs() < 4.0 * se,
                "unit {i}: freq {freq} vs {expect}"
            );
        }
    }

    #[test]
    fn draw_is_deterministic_per_seed() {
        let pop = PopulationSizes::new(vec![2, 5, 1, 7, 3]).unwrap();
        let a = draw_ppswor(&pop, 4, &mut stream::rng(99, &[])).unwrap();
        let b = draw_ppswor(&pop, 4, &mut stream::rng(99, &[])).unwrap();
        let c = draw_ppswor(&pop, 4, &mut stream::rng(100, &[])).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn exact_inclusion_symmetric_pair() {
        let pop = PopulationSizes::new(vec![1, 1]).unwrap();
        let pi: Vec<f64> = exact_inclusion(&pop, 1).unwrap();
        assert_eq!(pi, vec![0.5, 0.5]);
    }

    #[test]
    fn exact_inclusion_pins_rational_values() {
        use num_rational::BigRational;
        use num_traits::FromPrimitive;
        let pop = PopulationSizes::new(vec![1, 1, 2]).unwrap();
        let pi: Vec<BigRational> = exact_inclusion(&pop, 2).unwrap();
        let frac =
            |n: i64, d: i64| BigRational::from_i64(n).unwrap() / BigRational::from_i64(d).unwrap();
        assert_eq!(pi, vec![frac(7, 12), frac(7, 12), frac(5, 6)]);
    }

    #[test]
    fn exact_inclusion_census_is_one() {
        let pop = PopulationSizes::new(vec![3, 1, 4, 1, 5]).unwrap();
        let pi: Vec<f64> = exact_inclusion(&pop, 5).unwrap();
        assert!(pi.iter().all(|&p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn exact_inclusion_rejects_large_population() {
        let pop = PopulationSizes::new(vec![1; 13]).unwrap();
        assert!(matches!(
            exact_inclusion::<f64>(&pop, 2),
            Err(Error::OracleLimitExceeded { .. })
        ));
    }

    #[test]
    fn exact_inclusion_matches_brute_force() {
        for sizes in [
            vec![1usize, 2],
            vec![1, 1, 2],
            vec![2, 3, 4],
            vec![1, 2, 3, 4],
            vec![2, 2, 5, 1, 3],
            vec![1, 1, 1, 2, 3, 3],
        ] {
            let pop = PopulationSizes::new(sizes.clone()).unwrap();
            for n in 1..=sizes.len() {
                let dp: Vec<f64> = exact_inclusion(&pop, n).unwrap();
                let bf = brute_force_inclusion(&sizes, n);
                for (a, b) in dp.iter().zip(&bf) {
                    assert!((a - b).abs() < 1e-12, "sizes {sizes:?} n {n}: {a} vs {b}");
                }
                let sum: f64 = dp.iter().sum();
                assert!((sum - n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_inclusion_monotone_in_size() {
        // All populations with N <= 8 drawn from sizes {1..4} (size profile
        // as a multiset), every sample size: pi must be non-decreasing in d.
        fn multisets(n: usize, max: usize) -> Vec<Vec<usize>> {
            fn rec(
                n: usize,
                min: usize,
                max: usize,
                cur: &mut Vec<usize>,
                out: &mut Vec<Vec<usize>>,
            ) {
                if n == 0 {
                    out.push(cur.clone());
                    return;
                }
                for s in min..=max {
                    cur.push(s);
                    rec(n - 1, s, max, cur, out);
                    cur.pop();
                }
            }
            let mut out = Vec::new();
            rec(n, 1, max, &mut Vec::new(), &mut out);
            out
        }
        for n_units in 1..=8 {
            for sizes in multisets(n_units, 4) {
                let pop = PopulationSizes::new(sizes.clone()).unwrap();
                for n in 1..=n_units {
                    let pi: Vec<f64> = exact_inclusion(&pop, n).unwrap();
                    for i in 0..sizes.len() {
                        for j in 0..sizes.len() {
                            if sizes[i] >= sizes[j] {
                                assert!(
                                    pi[i] >= pi[j] - 1e-12,
                                    "sizes {sizes:?} n {n}: pi[{i}]={} < pi[{j}]={}",
                                    pi[i],
                                    pi[j]
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn class_oracle_agrees_with_unit_oracle() {
        let d = dist(&[(1, 3), (2, 2), (5, 1)]);
        let pop = PopulationSizes::from_distribution(&d).unwrap();
        for n in 1..=6 {
            let unit: Vec<f64> = exact_inclusion(&pop, n).unwrap();
            let class: BTreeMap<usize, f64> = exact_class_inclusion(&d, n).unwrap();
            // Unit order is ascending by degree, so class boundaries are 3, 5, 6.
            assert!((class[&1] - unit[0]).abs() < 1e-12);
            assert!((class[&2] - unit[3]).abs() < 1e-12);
            assert!((class[&5] - unit[5]).abs() < 1e-12);
        }
    }

    #[test]
    fn class_oracle_census_and_sum() {
        let d = dist(&[(1, 5), (4, 5)]);
        let pi: BTreeMap<usize, f64> = exact_class_inclusion(&d, 10).unwrap();
        assert!(pi.values().all(|&p| (p - 1.0).abs() < 1e-12));
        for n in 1..=9 {
            let pi: BTreeMap<usize, f64> = exact_class_inclusion(&d, n).unwrap();
            let mass: f64 = pi.iter().map(|(&k, p)| d.count(k) as f64 * p).sum();
            assert!((mass - n as f64).abs() < 1e-9, "n {n}: mass {mass}");
        }
    }

    #[test]
    fn class_estimates_converge_to_oracle() {
        let d = dist(&[(1, 5), (4, 5)]);
        let n = 4;
        let trials = 50_000;
        let est: InclusionMap<f64> = estimate_inclusion_by_class(&d, n, trials, 2024).unwrap();
        let pop = PopulationSizes::from_distribution(&d).unwrap();
        let exact: Vec<f64> = exact_inclusion(&pop, n).unwrap();
        for (&k, &f) in est.probs() {
            // Any member of the class has the class probability.
            let offset = if k == 1 { 0 } else { 5 };
            let p = exact[offset];
            let c = d.count(k) as f64;
            let se = (p * (1.0 - p) / (trials as f64 * c)).sqrt();
            let smoothing = 1.0 / (trials as f64 * c + 1.0);
            assert!(
                (f - p).abs() <= 4.0 * se + smoothing,
                "degree {k}: {f} vs {p}"
            );
        }
    }

    #[test]
    fn census_class_estimate_is_one() {
        let d = dist(&[(1, 2)]);
        let est: InclusionMap<f64> = estimate_inclusion_by_class(&d, 2, 500, 7).unwrap();
        let f = *est.get(1).unwrap();
        assert!(f >= 0.999);
        assert_eq!(f, 1.0); // U = 2M exactly, so (2M+1)/(2M+1)
    }

    #[test]
    fn two_class_estimate_matches_first_draw_probabilities() {
        let d = dist(&[(1, 1), (2, 1)]);
        let est: InclusionMap<f64> = estimate_inclusion_by_class(&d, 1, 60_000, 5).unwrap();
        let se1 = (1.0f64 / 3.0 * 2.0 / 3.0 / 60_000.0).sqrt();
        assert!((est.get(1).unwrap() - 1.0 / 3.0).abs() < 4.0 * se1);
        assert!((est.get(2).unwrap() - 2.0 / 3.0).abs() < 4.0 * se1);
    }

    #[test]
    fn class_estimate_is_deterministic() {
        let d = dist(&[(1, 4), (3, 3), (7, 2)]);
        let a: InclusionMap<f64> = estimate_inclusion_by_class(&d, 5, 400, 31).unwrap();
        let b: InclusionMap<f64> = estimate_inclusion_by_class(&d, 5, 400, 31).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fattorini_census_is_exactly_one() {
        let pop = PopulationSizes::new(vec![2, 3, 4]).unwrap();
        let pi: Vec<f64> = fattorini_unit_probs(&pop, 3, 100, 1).unwrap();
        assert_eq!(pi, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn fattorini_symmetric_pair() {
        let pop = PopulationSizes::new(vec![1, 1]).unwrap();
        let pi: Vec<f64> = fattorini_unit_probs(&pop, 1, 10_000, 17).unwrap();
        assert!((pi[0] - 0.5).abs() < 0.02);
        assert!((pi[1] - 0.5).abs() < 0.02);
    }

    #[test]
    fn fattorini_matches_enumeration() {
        let pop = PopulationSizes::new(vec![1, 1, 2]).unwrap();
        let trials = 50_000;
        let pi: Vec<f64> = fattorini_unit_probs(&pop, 2, trials, 23).unwrap();
        let exact: Vec<f64> = exact_inclusion(&pop, 2).unwrap();
        for (est, p) in pi.iter().zip(&exact) {
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((est - p).abs() <= 4.0 * se + 1.0 / trials as f64);
        }
    }
}
