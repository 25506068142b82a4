//! Cross-entropy Monte Carlo search over top-k arrangements.
//!
//! The sampling distribution is a `k x n` matrix whose row `j` gives the
//! probability of each candidate occupying position `j`. A sample is drawn
//! position by position, without replacement, by inverse-CDF over the row
//! restricted to unused candidates. Each iteration keeps the elite fraction
//! of samples and moves every cell towards the elite's empirical frequency.
//!
//! Every sample has its own random stream derived from
//! `(seed, iteration, sample index)`, so results do not depend on how samples
//! are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AggregationProblem, FootruleObjective, RaflError};
use crate::ranked::RankedList;

/// Relative tolerance under which two objective values count as equal.
pub(crate) const TIE_EPSILON: f64 = 1e-12;

const MAX_DEFAULT_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CeConfig {
    /// Samples per iteration; `None` means `10 * k * candidates`, capped at
    /// 200 000.
    pub sample_size: Option<usize>,
    pub elite_fraction: f64,
    pub smoothing: f64,
    pub stall_limit: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl CeConfig {
    pub fn with_seed(seed: u64) -> Self {
        CeConfig {
            sample_size: None,
            elite_fraction: 0.1,
            smoothing: 0.25,
            stall_limit: 7,
            max_iterations: 1000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), RaflError> {
        let bad = |m: String| Err(RaflError::InvalidConfig(m));
        if self.sample_size == Some(0) {
            return bad("sample size must be positive".into());
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction < 1.0) {
            return bad(format!(
                "elite fraction must be in (0, 1), got {}",
                self.elite_fraction
            ));
        }
        if !(self.smoothing > 0.0 && self.smoothing <= 1.0) {
            return bad(format!(
                "smoothing must be in (0, 1], got {}",
                self.smoothing
            ));
        }
        if self.stall_limit == 0 {
            return bad("stall limit must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max iterations must be at least 1".into());
        }
        Ok(())
    }

    pub fn effective_sample_size(&self, problem: &AggregationProblem) -> usize {
        self.sample_size.unwrap_or_else(|| {
            (10 * problem.k() * problem.candidates().len()).clamp(1, MAX_DEFAULT_SAMPLES)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeOutcome {
    pub list: RankedList,
    pub objective: FootruleObjective,
    pub iterations: usize,
}

struct Distribution {
    k: usize,
    n: usize,
    /// row-major `k x n`
    probs: Vec<f64>,
    row_sums: Vec<f64>,
    /// per row, candidates by descending probability (ties by index)
    order: Vec<Vec<u32>>,
}

impl Distribution {
    fn uniform(k: usize, n: usize) -> Self {
        let mut d = Distribution {
            k,
            n,
            probs: vec![1.0 / n as f64; k * n],
            row_sums: Vec::new(),
            order: Vec::new(),
        };
        d.refresh();
        d
    }

    fn row(&self, j: usize) -> &[f64] {
        &self.probs[j * self.n..(j + 1) * self.n]
    }

    fn refresh(&mut self) {
        self.row_sums = (0..self.k).map(|j| self.row(j).iter().sum()).collect();
        self.order = (0..self.k)
            .map(|j| {
                let row = self.row(j);
                let mut idx: Vec<u32> = (0..self.n as u32).collect();
                idx.sort_by(|&a, &b| row[b as usize].total_cmp(&row[a as usize]).then(a.cmp(&b)));
                idx
            })
            .collect();
    }

    fn sample(&self, rng: &mut ChaCha8Rng, out: &mut Vec<u32>, used: &mut [bool]) {
        out.clear();
        used.iter_mut().for_each(|u| *u = false);
        for j in 0..self.k {
            let row = self.row(j);
            let used_mass: f64 = out.iter().map(|&c| row[c as usize]).sum();
            let remaining = self.row_sums[j] - used_mass;
            let u: f64 = rng.gen();
            let pick = if remaining > f64::MIN_POSITIVE {
                let target = u * remaining;
                let mut acc = 0.0;
                let mut last = None;
                let mut chosen = None;
                for &c in &self.order[j] {
                    if used[c as usize] {
                        continue;
                    }
                    let p = row[c as usize];
                    if p <= 0.0 {
                        // sorted descending: nothing with mass follows
                        break;
                    }
                    last = Some(c);
                    acc += p;
                    if acc > target {
                        chosen = Some(c);
                        break;
                    }
                }
                chosen.or(last)
            } else {
                None
            };
            let pick = pick.unwrap_or_else(|| {
                // no mass left among unused candidates: uniform over them
                let free: Vec<u32> = (0..self.n as u32).filter(|&c| !used[c as usize]).collect();
                free[((u * free.len() as f64) as usize).min(free.len() - 1)]
            });
            used[pick as usize] = true;
            out.push(pick);
        }
    }

    fn update(&mut self, elite: &[&[u32]], smoothing: f64) {
        let share = 1.0 / elite.len() as f64;
        let mut freq = vec![0.0; self.k * self.n];
        for sample in elite {
            for (j, &c) in sample.iter().enumerate() {
                freq[j * self.n + c as usize] += share;
            }
        }
        for (p, f) in self.probs.iter_mut().zip(&freq) {
            *p = (1.0 - smoothing) * *p + smoothing * f;
        }
        self.refresh();
    }
}

fn sample_stream(seed: u64, iteration: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | (index as u64 & 0xffff_ffff));
    rng
}

fn cmp_scored(a: &(f64, Vec<u32>), b: &(f64, Vec<u32>)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1))
}

/// Minimizes the weighted footrule objective with the cross-entropy method.
///
/// The (padded) input lists join the first iteration's samples, so the
/// result is never worse than any input list. Stops after `stall_limit`
/// iterations without improvement or at `max_iterations`. Sample generation
/// and scoring run on the current rayon pool.
pub fn ce_aggregate(
    problem: &AggregationProblem,
    config: &CeConfig,
) -> Result<CeOutcome, RaflError> {
    config.validate()?;
    let k = problem.k();
    let n = problem.candidates().len();
    let sample_size = config.effective_sample_size(problem);
    let mut dist = Distribution::uniform(k, n);

    let mut best: Option<(f64, Vec<u32>)> = None;
    let mut stall = 0;
    let mut iterations = 0;

    for iteration in 0..config.max_iterations {
        iterations = iteration + 1;
        let mut pool: Vec<(f64, Vec<u32>)> = (0..sample_size)
            .into_par_iter()
            .map_init(
                || (Vec::with_capacity(k), vec![false; n]),
                |(buf, used), index| {
                    let mut rng = sample_stream(config.seed, iteration, index);
                    dist.sample(&mut rng, buf, used);
                    (problem.objective_of(buf), buf.clone())
                },
            )
            .collect();
        if iteration == 0 {
            for i in 0..problem.lists().len() {
                let order = problem.padded_input_order(i);
                pool.push((problem.objective_of(&order), order));
            }
        }

        let elite_len =
            ((config.elite_fraction * pool.len() as f64).ceil() as usize).clamp(1, pool.len());
        if elite_len < pool.len() {
            pool.select_nth_unstable_by(elite_len - 1, cmp_scored);
            pool.truncate(elite_len);
        }
        pool.sort_unstable_by(cmp_scored);

        let (top_value, top_order) = &pool[0];
        match &best {
            Some((value, order)) if *top_value >= value - TIE_EPSILON * value.max(1.0) => {
                if *top_value <= value + TIE_EPSILON * value.max(1.0) && top_order < order {
                    best = Some((*top_value, top_order.clone()));
                }
                stall += 1;
            }
            _ => {
                best = Some((*top_value, top_order.clone()));
                stall = 0;
            }
        }
        if stall >= config.stall_limit {
            break;
        }

        let elite: Vec<&[u32]> = pool.iter().map(|(_, o)| o.as_slice()).collect();
        dist.update(&elite, config.smoothing);
    }

    let (value, order) = best.expect("at least one iteration runs");
    Ok(CeOutcome {
        list: problem.to_ranked(&order),
        objective: FootruleObjective(value),
        iterations,
    })
}
