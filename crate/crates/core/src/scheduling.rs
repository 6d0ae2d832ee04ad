//! Multiuser scheduling inside one cluster.
//!
//! The improved greedy subset selection (IGSS) runs in two phases:
//!
//! 1. A greedy first set: seed with the strongest user, then repeatedly add
//!    the user that maximizes the MMSE sum-rate of the augmented set, stopping
//!    early when no addition helps.
//! 2. A swap sequence: drop the weakest member and admit the strongest
//!    remaining outsider, once per outsider, giving one candidate set per
//!    step. The candidate with the highest sum-rate wins.
//!
//! During the search every candidate is precoded with equal power loading.
//! User indices here are local to the cluster (`0..K_c`). All argmax/argmin
//! ties go to the lowest index.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelBlock;
use crate::error::{Error, Result};
use crate::linalg;
use crate::metrics::CostLedger;
use crate::precoding::{apply_powers, equal_power_load, weights, PrecoderKind};
use crate::rate::{cluster_rate, Interferer};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SchedulerKind {
    Igss,
    GreedyZf,
    Exhaustive,
}

/// One cluster's scheduling inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterProblem {
    /// `M_c x K_c` channels from the cluster's APs to all of its users.
    pub channels: ChannelBlock,
    pub rho: f64,
    pub noise_var: f64,
    pub power_budget: f64,
}

impl ClusterProblem {
    pub fn num_users(&self) -> usize {
        self.channels.num_ues()
    }

    /// Estimated channel power `||g_hat_k||^2` per user.
    pub fn channel_powers(&self) -> Vec<f64> {
        linalg::column_powers(&self.channels.hat)
    }

    fn check_size(&self, n_c: usize) -> Result<()> {
        if n_c == 0 || n_c > self.num_users() {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= n_c <= K_c, got n_c={n_c}, K_c={}",
                self.num_users()
            )));
        }
        Ok(())
    }

    /// Sum-rate of `set` under `kind` precoding with equal power loading.
    /// `interference` blocks span all `K_c` users and are sliced to `set`.
    pub fn set_rate(
        &self,
        set: &[usize],
        kind: PrecoderKind,
        interference: &[Interferer],
        ledger: &mut CostLedger,
    ) -> Result<f64> {
        let own = self.channels.columns(set);
        let w = weights(kind, &own.hat, self.noise_var, self.power_budget, ledger).map_err(
            |e| match e {
                Error::Singular { condition, .. } => Error::Singular {
                    users: set.to_vec(),
                    condition,
                },
                other => other,
            },
        )?;
        let p = apply_powers(&w, &equal_power_load(set.len(), self.power_budget));
        let sliced: Vec<Interferer> = interference
            .iter()
            .map(|i| Interferer {
                block: i.block.columns(set),
                precoder: i.precoder.clone(),
            })
            .collect();
        cluster_rate(&own, &p, &sliced, self.rho, self.noise_var, ledger)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedySet {
    pub users: Vec<usize>,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub selected: Vec<usize>,
    pub candidate_sets: Vec<Vec<usize>>,
    /// Rate of each candidate; `-inf` marks a candidate that could not be precoded.
    pub candidate_rates: Vec<f64>,
    pub best_rate: f64,
}

impl ScheduleResult {
    fn from_candidates(candidate_sets: Vec<Vec<usize>>, candidate_rates: Vec<f64>) -> Result<Self> {
        let best = argmax_first(&candidate_rates)
            .filter(|&i| candidate_rates[i].is_finite())
            .ok_or_else(|| Error::Singular {
                users: candidate_sets.first().cloned().unwrap_or_default(),
                condition: f64::INFINITY,
            })?;
        Ok(Self {
            selected: candidate_sets[best].clone(),
            best_rate: candidate_rates[best],
            candidate_sets,
            candidate_rates,
        })
    }
}

/// Index of the largest value; earliest index on ties.
fn argmax_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if !(v > values[b]) => {}
            _ => best = Some(i),
        }
    }
    best
}

fn argmax_by_power(users: &[usize], powers: &[f64]) -> usize {
    let mut best = users[0];
    for &u in &users[1..] {
        if powers[u] > powers[best] || (powers[u] == powers[best] && u < best) {
            best = u;
        }
    }
    best
}

fn argmin_by_power(users: &[usize], powers: &[f64]) -> usize {
    let mut best = users[0];
    for &u in &users[1..] {
        if powers[u] < powers[best] || (powers[u] == powers[best] && u < best) {
            best = u;
        }
    }
    best
}

fn greedy(
    problem: &ClusterProblem,
    n_c: usize,
    kind: PrecoderKind,
    ledger: &mut CostLedger,
) -> Result<GreedySet> {
    problem.check_size(n_c)?;
    let powers = problem.channel_powers();
    ledger.charge_real((8 * problem.channels.hat.len()) as u64);
    let all: Vec<usize> = (0..problem.num_users()).collect();
    let first = argmax_by_power(&all, &powers);
    let mut users = vec![first];
    let mut rate = problem.set_rate(&users, kind, &[], ledger)?;

    while users.len() < n_c {
        let mut best: Option<(usize, f64)> = None;
        for k in all.iter().copied().filter(|k| !users.contains(k)) {
            let mut trial = users.clone();
            trial.push(k);
            let r = match problem.set_rate(&trial, kind, &[], ledger) {
                Ok(r) => r,
                Err(Error::Singular { .. }) => continue,
                Err(e) => return Err(e),
            };
            if best.map_or(true, |(_, br)| r > br) {
                best = Some((k, r));
            }
        }
        match best {
            Some((k, r)) if r > rate => {
                users.push(k);
                rate = r;
            }
            _ => break,
        }
    }
    Ok(GreedySet { users, rate })
}

/// Greedy first set under MMSE precoding with equal power loading.
pub fn greedy_first_set(
    problem: &ClusterProblem,
    n_c: usize,
    ledger: &mut CostLedger,
) -> Result<GreedySet> {
    greedy(problem, n_c, PrecoderKind::Mmse, ledger)
}

/// The swap sequence seeded by `first_set`: each step drops the weakest
/// member and admits the strongest user not yet admitted. Returns
/// `K_c - |first_set| + 1` sets, the first being `first_set` itself.
pub fn swap_candidates(first_set: &[usize], powers: &[f64]) -> Vec<Vec<usize>> {
    let mut current = first_set.to_vec();
    let mut pool: Vec<usize> = (0..powers.len()).filter(|k| !first_set.contains(k)).collect();
    let mut sets = vec![current.clone()];
    if current.is_empty() {
        return sets;
    }
    while !pool.is_empty() {
        let removed = argmin_by_power(&current, powers);
        let admitted = argmax_by_power(&pool, powers);
        let slot = current.iter().position(|&u| u == removed).expect("member");
        current[slot] = admitted;
        pool.retain(|&u| u != admitted);
        sets.push(current.clone());
    }
    sets
}

fn score_all(
    problem: &ClusterProblem,
    sets: &[Vec<usize>],
    interference: &[Interferer],
    ledger: &mut CostLedger,
) -> Result<Vec<f64>> {
    sets.iter()
        .map(|s| match problem.set_rate(s, PrecoderKind::Mmse, interference, ledger) {
            Ok(r) => Ok(r),
            Err(Error::Singular { .. }) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e),
        })
        .collect()
}

/// IGSS: greedy first set, swap candidates, best candidate by sum-rate.
///
/// `interference` holds the other clusters' interim transmissions towards
/// all users of this cluster; pass an empty slice for a lone cluster.
pub fn igss_schedule(
    problem: &ClusterProblem,
    n_c: usize,
    interference: &[Interferer],
    ledger: &mut CostLedger,
) -> Result<ScheduleResult> {
    let first = greedy_first_set(problem, n_c, ledger)?;
    igss_from_first_set(problem, &first.users, interference, ledger)
}

/// Swap and selection phases of IGSS for an already computed first set.
pub fn igss_from_first_set(
    problem: &ClusterProblem,
    first_set: &[usize],
    interference: &[Interferer],
    ledger: &mut CostLedger,
) -> Result<ScheduleResult> {
    let sets = swap_candidates(first_set, &problem.channel_powers());
    let rates = score_all(problem, &sets, interference, ledger)?;
    ScheduleResult::from_candidates(sets, rates)
}

/// Number of `k`-subsets of an `n`-set, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Exhaustive search over every `n_c`-subset, scored like IGSS candidates.
pub fn exhaustive_schedule(
    problem: &ClusterProblem,
    n_c: usize,
    interference: &[Interferer],
    cap: u128,
    ledger: &mut CostLedger,
) -> Result<ScheduleResult> {
    problem.check_size(n_c)?;
    let count = binomial(problem.num_users(), n_c);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    let sets: Vec<Vec<usize>> = (0..problem.num_users()).combinations(n_c).collect();
    let rates = score_all(problem, &sets, interference, ledger)?;
    ScheduleResult::from_candidates(sets, rates)
}

/// Plain greedy selection under ZF precoding, without the swap phase.
pub fn greedy_zf_schedule(
    problem: &ClusterProblem,
    n_c: usize,
    ledger: &mut CostLedger,
) -> Result<ScheduleResult> {
    let set = greedy(problem, n_c, PrecoderKind::Zf, ledger)?;
    Ok(ScheduleResult {
        selected: set.users.clone(),
        candidate_sets: vec![set.users],
        candidate_rates: vec![set.rate],
        best_rate: set.rate,
    })
}
