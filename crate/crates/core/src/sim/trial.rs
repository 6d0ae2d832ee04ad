//! One Monte-Carlo trial: topology, channels, then scheduling, precoding,
//! power allocation and evaluation at every SNR point.

use serde::{Deserialize, Serialize};

use crate::channel::{draw_channels, ChannelSet};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::metrics::{signaling_load, Breakdown, CostLedger, Phase};
use crate::powerctl::{gd_allocate, GDTrace, GdProblem};
use crate::precoding::{apply_powers, equal_power_load, mmse_weights, weights, PrecoderKind};
use crate::rate::{cluster_rates, Interferer, RateContext};
use crate::scheduling::{
    exhaustive_schedule, greedy_first_set, greedy_zf_schedule, igss_from_first_set, ClusterProblem,
    SchedulerKind,
};
use crate::sim::config::{noise_variance, Mode, PowerRule, SimConfig};
use crate::topology::{generate_topology, NetworkTopology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Ok,
    Failed,
}

impl TrialStatus {
    pub fn label(&self) -> &'static str {
        match self {
            TrialStatus::Ok => "ok",
            TrialStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub snr_db: f64,
    pub mode: Mode,
    pub scheduler: SchedulerKind,
    pub power_rule: PowerRule,
    pub precoder: PrecoderKind,
    /// Network sum-rate in bits/s/Hz; NaN for failed trials.
    pub sum_rate: f64,
    pub cluster_rates: Vec<f64>,
    /// Scheduled UEs per cluster, as global UE indices.
    pub selected: Vec<Vec<usize>>,
    pub flops: u64,
    pub breakdown: Breakdown,
    pub signaling: u64,
    pub gd_iters: usize,
    pub gd_traces: Vec<GDTrace>,
    pub status: TrialStatus,
    pub error: Option<String>,
}

/// Topology and channel realization shared by every SNR point of a trial.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub seed: u64,
    pub topology: NetworkTopology,
    pub channels: ChannelSet,
    pub cluster_aps: Vec<Vec<usize>>,
    pub cluster_ues: Vec<Vec<usize>>,
}

impl TrialInstance {
    pub fn num_clusters(&self) -> usize {
        self.cluster_aps.len()
    }

    /// Channels from cluster `i`'s APs to the given global UEs.
    fn block(&self, i: usize, ues: &[usize]) -> crate::channel::ChannelBlock {
        self.channels.block(&self.cluster_aps[i], ues)
    }
}

pub fn trial_seed(config: &SimConfig, trial_index: usize) -> u64 {
    config.base_seed.wrapping_add(trial_index as u64)
}

pub fn build_instance(config: &SimConfig, trial_index: usize) -> Result<TrialInstance> {
    let seed = trial_seed(config, trial_index);
    let topology = generate_topology(seed, config.m, config.k, config.clusters(), config.side_length)?;
    let mut channels = draw_channels(seed, &topology, &config.large_scale, config.tau)?;
    if let Some(target) = config.mean_gain {
        channels.normalize_gain(target);
    }
    let c = topology.num_clusters();
    let cluster_aps = (0..c).map(|i| topology.cluster_aps(i)).collect();
    let cluster_ues = (0..c).map(|i| topology.cluster_ues(i)).collect();
    Ok(TrialInstance {
        seed,
        topology,
        channels,
        cluster_aps,
        cluster_ues,
    })
}

/// Result of one (trial, SNR) evaluation.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub cluster_rates: Vec<f64>,
    pub selected: Vec<Vec<usize>>,
    pub precoders: Vec<CMat>,
    pub gd_traces: Vec<GDTrace>,
    pub ledger: CostLedger,
}

impl PointOutcome {
    pub fn sum_rate(&self) -> f64 {
        self.cluster_rates.iter().sum()
    }
}

fn cluster_budget(config: &SimConfig, instance: &TrialInstance, c: usize) -> f64 {
    instance.cluster_aps[c].len() as f64 * config.symbol_power
}

/// Interim MMSE/EPL precoders on each cluster's greedy first set, used as
/// the interference picture while other clusters pick their final sets.
fn interim_interference(
    instance: &TrialInstance,
    problems: &[ClusterProblem],
    firsts: &[Vec<usize>],
    ledger: &mut CostLedger,
) -> Result<Vec<Vec<Interferer>>> {
    let c_count = instance.num_clusters();
    if c_count == 1 {
        return Ok(vec![Vec::new()]);
    }
    let mut interim = Vec::with_capacity(c_count);
    for (i, problem) in problems.iter().enumerate() {
        let own = problem.channels.columns(&firsts[i]);
        let w = mmse_weights(&own.hat, problem.noise_var, problem.power_budget, ledger)?;
        interim.push(apply_powers(&w, &equal_power_load(firsts[i].len(), problem.power_budget)));
    }
    Ok((0..c_count)
        .map(|c| {
            (0..c_count)
                .filter(|&i| i != c)
                .map(|i| Interferer {
                    block: instance.block(i, &instance.cluster_ues[c]),
                    precoder: interim[i].clone(),
                })
                .collect()
        })
        .collect())
}

fn schedule(
    config: &SimConfig,
    instance: &TrialInstance,
    problems: &[ClusterProblem],
    ledger: &mut CostLedger,
) -> Result<Vec<Vec<usize>>> {
    let n_c = config.scheduled_per_cluster();
    match config.scheduler {
        SchedulerKind::GreedyZf => problems
            .iter()
            .map(|p| greedy_zf_schedule(p, n_c, ledger).map(|r| r.selected))
            .collect(),
        SchedulerKind::Igss => {
            let firsts = problems
                .iter()
                .map(|p| greedy_first_set(p, n_c, ledger).map(|g| g.users))
                .collect::<Result<Vec<_>>>()?;
            let interference = interim_interference(instance, problems, &firsts, ledger)?;
            problems
                .iter()
                .zip(&firsts)
                .zip(&interference)
                .map(|((p, first), intf)| igss_from_first_set(p, first, intf, ledger).map(|r| r.selected))
                .collect()
        }
        SchedulerKind::Exhaustive => {
            let interference = if problems.len() > 1 {
                let firsts = problems
                    .iter()
                    .map(|p| greedy_first_set(p, n_c, ledger).map(|g| g.users))
                    .collect::<Result<Vec<_>>>()?;
                interim_interference(instance, problems, &firsts, ledger)?
            } else {
                vec![Vec::new()]
            };
            problems
                .iter()
                .zip(&interference)
                .map(|(p, intf)| {
                    exhaustive_schedule(p, n_c, intf, config.enumeration_cap, ledger).map(|r| r.selected)
                })
                .collect()
        }
    }
}

/// Runs scheduling, precoding, power allocation and evaluation at one SNR.
pub fn evaluate_point(config: &SimConfig, instance: &TrialInstance, snr_db: f64) -> Result<PointOutcome> {
    let c_count = instance.num_clusters();
    let noise = noise_variance(snr_db, config.m, config.symbol_power);
    let rho = config.symbol_power;
    let mut ledger = CostLedger::new(config.counters);
    ledger.add_signaling(signaling_load(&instance.topology));

    let problems: Vec<ClusterProblem> = (0..c_count)
        .map(|c| ClusterProblem {
            channels: instance.block(c, &instance.cluster_ues[c]),
            rho,
            noise_var: noise,
            power_budget: cluster_budget(config, instance, c),
        })
        .collect();

    ledger.set_phase(Phase::Scheduling);
    let local = schedule(config, instance, &problems, &mut ledger)?;
    let selected: Vec<Vec<usize>> = local
        .iter()
        .enumerate()
        .map(|(c, set)| set.iter().map(|&j| instance.cluster_ues[c][j]).collect())
        .collect();

    ledger.set_phase(Phase::Precoding);
    let mut ws = Vec::with_capacity(c_count);
    for c in 0..c_count {
        let own = instance.block(c, &selected[c]);
        let budget = cluster_budget(config, instance, c);
        let w = weights(config.precoder, &own.hat, noise, budget, &mut ledger).map_err(|e| match e {
            Error::Singular { condition, .. } => Error::Singular {
                users: selected[c].clone(),
                condition,
            },
            other => other,
        })?;
        ws.push(w);
    }

    ledger.set_phase(Phase::PowerAllocation);
    let epl: Vec<Vec<f64>> = (0..c_count)
        .map(|c| equal_power_load(selected[c].len(), cluster_budget(config, instance, c)))
        .collect();
    let mut amplitudes = epl.clone();
    let mut gd_traces = Vec::new();
    if config.power_rule == PowerRule::Gd {
        let epl_precoders: Vec<CMat> = (0..c_count).map(|i| apply_powers(&ws[i], &epl[i])).collect();
        for c in 0..c_count {
            let interferers = (0..c_count)
                .filter(|&i| i != c)
                .map(|i| Interferer {
                    block: instance.block(i, &selected[c]),
                    precoder: epl_precoders[i].clone(),
                })
                .collect();
            let problem = GdProblem {
                w: ws[c].clone(),
                channels: instance.block(c, &selected[c]),
                interferers,
                rho,
                noise_var: noise,
            };
            let budget = cluster_budget(config, instance, c);
            let trace = gd_allocate(&problem, &config.gd, &epl[c], budget, &mut ledger)?;
            amplitudes[c] = trace.final_d.clone();
            gd_traces.push(trace);
        }
    }

    let precoders: Vec<CMat> = (0..c_count).map(|c| apply_powers(&ws[c], &amplitudes[c])).collect();
    let ctx = RateContext {
        rho,
        noise_var: noise,
        blocks: (0..c_count)
            .map(|i| (0..c_count).map(|c| instance.block(i, &selected[c])).collect())
            .collect(),
        precoders: precoders.clone(),
    };
    let rates = cluster_rates(&ctx, &mut CostLedger::disabled())?;
    Ok(PointOutcome {
        cluster_rates: rates,
        selected,
        precoders,
        gd_traces,
        ledger,
    })
}

fn record_for(config: &SimConfig, trial: usize, seed: u64, snr_db: f64, signaling: u64) -> TrialRecord {
    TrialRecord {
        trial,
        seed,
        snr_db,
        mode: config.mode,
        scheduler: config.scheduler,
        power_rule: config.power_rule,
        precoder: config.precoder,
        sum_rate: f64::NAN,
        cluster_rates: Vec::new(),
        selected: Vec::new(),
        flops: 0,
        breakdown: Breakdown::default(),
        signaling,
        gd_iters: 0,
        gd_traces: Vec::new(),
        status: TrialStatus::Failed,
        error: None,
    }
}

/// All SNR points of one trial. Per-point failures are recorded, not raised.
pub fn run_trial(config: &SimConfig, trial_index: usize) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let seed = trial_seed(config, trial_index);
    let instance = match build_instance(config, trial_index) {
        Ok(i) => i,
        Err(e) => {
            return Ok(config
                .snr_grid
                .iter()
                .map(|&snr| {
                    let mut r = record_for(config, trial_index, seed, snr, 0);
                    r.error = Some(e.to_string());
                    r
                })
                .collect())
        }
    };
    let signaling = signaling_load(&instance.topology);
    Ok(config
        .snr_grid
        .iter()
        .map(|&snr| {
            let mut rec = record_for(config, trial_index, seed, snr, signaling);
            match evaluate_point(config, &instance, snr) {
                Ok(out) => {
                    rec.sum_rate = out.sum_rate();
                    rec.flops = out.ledger.flops();
                    rec.breakdown = out.ledger.breakdown();
                    rec.gd_iters = out.gd_traces.iter().map(|t| t.iterations_used).max().unwrap_or(0);
                    rec.cluster_rates = out.cluster_rates;
                    rec.selected = out.selected;
                    rec.gd_traces = out.gd_traces;
                    rec.status = TrialStatus::Ok;
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect())
}
