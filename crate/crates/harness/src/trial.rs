//! One Monte Carlo trial: draw a channel, support, symbols and noise from
//! per-trial RNG streams, run a detector, compare supports.

use std::time::Instant;

use rcsm_core::detectors::{
    cavi_detect, correlator_detect, exact_mixture_ml_detect, ml_ga_detect, CaviOptions, DetectionResult,
};
use rcsm_core::model::{
    binomial, im_bit_count, index_set_from_rank, qam_constellation, sample_channel, simulate_received_slot,
    transmit_slot, IndexVector, NoiseModel, ReceivedSlot,
};
use rcsm_core::numerics::{ComplexMatrix, RngStream};

use crate::config::{DetectorKind, ExperimentConfig};
use crate::{HarnessError, Result};

const STREAM_CHANNEL: u64 = 0;
const STREAM_SUPPORT: u64 = 1;
const STREAM_SYMBOLS: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Stream id for one of the four per-trial draws. Detector choice does not
/// enter, so different detectors see identical instances for a trial id.
fn stream(trial_id: u64, which: u64) -> u64 {
    trial_id * 4 + which
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialInstance {
    pub channel: ComplexMatrix,
    pub support: IndexVector,
    pub received: ReceivedSlot,
    pub noise: NoiseModel,
}

/// Number of subsets the support is drawn from.
pub fn support_population(cfg: &ExperimentConfig) -> Result<u128> {
    let d = cfg.dims;
    if cfg.all_subsets {
        binomial(d.l, d.k).ok_or_else(|| HarnessError::Config("C(L, K) overflows".into()))
    } else {
        Ok(1u128 << im_bit_count(d.l, d.k)?)
    }
}

pub fn generate_instance(cfg: &ExperimentConfig, trial_id: u64) -> Result<TrialInstance> {
    let d = cfg.dims;
    let noise = NoiseModel::from_db(cfg.snr_db)?;
    let constellation = qam_constellation(cfg.order)?;

    let channel = sample_channel(
        &mut RngStream::new(cfg.seed, stream(trial_id, STREAM_CHANNEL)),
        d.n,
        d.l,
    )?;
    let support = match &cfg.fixed_support {
        Some(x) => x.clone(),
        None => {
            let mut rng = RngStream::new(cfg.seed, stream(trial_id, STREAM_SUPPORT));
            let rank = rng.below(support_population(cfg)?);
            index_set_from_rank(rank, d.l, d.k)?
        }
    };
    let mut rng = RngStream::new(cfg.seed, stream(trial_id, STREAM_SYMBOLS));
    let signal = transmit_slot(&support, &d, &constellation, &mut rng)?;
    let mut rng = RngStream::new(cfg.seed, stream(trial_id, STREAM_NOISE));
    let received = simulate_received_slot(&channel, &signal, &noise, &mut rng)?;
    Ok(TrialInstance {
        channel,
        support,
        received,
        noise,
    })
}

pub fn detect(cfg: &ExperimentConfig, inst: &TrialInstance, record: bool) -> rcsm_core::Result<DetectionResult> {
    let (h, y, d) = (&inst.channel, &inst.received, &cfg.dims);
    match cfg.detector {
        DetectorKind::Correlator => correlator_detect(h, y, d.k),
        DetectorKind::MlGa => ml_ga_detect(h, y, d, &inst.noise),
        DetectorKind::Cavi => {
            let options = CaviOptions {
                step_size: cfg.step_size,
                iterations: cfg.iterations,
                initial_q: None,
                record_trajectory: record,
            };
            cavi_detect(h, y, d, &inst.noise, &options)
        }
        DetectorKind::ExactMixture => {
            let constellation = qam_constellation(cfg.order)?;
            exact_mixture_ml_detect(h, y, d, &inst.noise, &constellation)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub trial_id: u64,
    /// 1-based antenna indices.
    pub true_support: Vec<usize>,
    /// 1-based antenna indices.
    pub estimated_support: Vec<usize>,
    pub index_error: bool,
    /// Detector wall time; 0 when timing is off.
    pub wall_time_ns: u64,
}

/// Runs one trial; the timer covers the detector call only.
pub fn run_trial(cfg: &ExperimentConfig, trial_id: u64) -> Result<TrialResult> {
    let inst = generate_instance(cfg, trial_id)?;
    let start = Instant::now();
    let result = detect(cfg, &inst, false).map_err(|source| HarnessError::Trial { trial_id, source })?;
    let elapsed = start.elapsed().as_nanos() as u64;
    let estimated = result.estimate.one_based();
    let truth = inst.support.one_based();
    Ok(TrialResult {
        trial_id,
        index_error: estimated != truth,
        true_support: truth,
        estimated_support: estimated,
        wall_time_ns: if cfg.timing { elapsed } else { 0 },
    })
}
