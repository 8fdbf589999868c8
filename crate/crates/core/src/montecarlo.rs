//! Randomized campaigns comparing the robust design with the design that
//! trusts the channel estimates.
//!
//! Channel estimates are normalized Rayleigh draws. For every `(r, ε)` grid
//! cell and every channel pair both designs are computed and then attacked
//! with sampled channel errors from the `ε`-ball (plus the closed-form worst
//! errors). The same channel pairs are reused across all cells.
//!
//! Randomness flows from one root seed through keyed substreams, so a report
//! is bit-identical for a given config regardless of the rayon pool size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{self, check_feasibility, Beamformer, ChannelVector, RobustInstance};
use crate::rng::RandomStream;
use crate::solver::{self, BeamformerSolution};
use crate::worstcase::{self, SampleMode, SQUARED_TOL};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "r,epsilon,n_feasible,avg_guaranteed_energy,avg_empirical_min_energy,avg_nominal_energy,robust_outage_pct,nonrobust_outage_pct";

const DEFAULT_EPSILONS: [f64; 4] = [0.0, 0.1, 0.3, 0.5];
const DEFAULT_RATE_POINTS: usize = 12;
const DEFAULT_RATE_FRACTION: f64 = 0.95;

const STREAM_CHANNELS: u64 = 0;
const STREAM_TRIALS: u64 = 1;

/// Campaign configuration as written in a config file; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfigFile {
    pub n_antennas: Option<usize>,
    pub power: Option<f64>,
    pub sigma2: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub rate_grid: Option<Vec<f64>>,
    pub n_channels: Option<usize>,
    pub n_error_samples: Option<usize>,
    pub seed: Option<u64>,
    pub channel_norm: Option<f64>,
    pub sampling: Option<SampleMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_antennas: usize,
    pub power: f64,
    pub sigma2: f64,
    pub epsilons: Vec<f64>,
    pub rate_grid: Vec<f64>,
    pub n_channels: usize,
    pub n_error_samples: usize,
    pub seed: u64,
    /// `‖ĥ‖² = ‖ĝ‖²` after normalization.
    pub channel_norm: f64,
    pub sampling: SampleMode,
}

impl SimConfig {
    /// Four antennas, `P = 10`, `σ² = 1`, 100 channels × 100 error samples.
    pub fn with_defaults(seed: u64) -> Self {
        SimConfigFile {
            seed: Some(seed),
            ..Default::default()
        }
        .resolve()
        .expect("defaults are valid")
    }

    /// Upper end (exclusive) of the nominally feasible rate range,
    /// `log2(1 + P·‖h‖²/σ²)`.
    pub fn max_rate(&self) -> f64 {
        (1.0 + self.power * self.channel_norm / self.sigma2).log2()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: String| Err(Error::InvalidConfig { field, reason });
        if self.n_antennas == 0 {
            return bad("n_antennas", "must be >= 1".into());
        }
        for (field, v) in [
            ("power", self.power),
            ("sigma2", self.sigma2),
            ("channel_norm", self.channel_norm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(field, format!("must be finite and > 0, got {v}"));
            }
        }
        if self.n_channels == 0 {
            return bad("n_channels", "must be >= 1".into());
        }
        if self.n_error_samples == 0 {
            return bad("n_error_samples", "must be >= 1".into());
        }
        if self.epsilons.is_empty() {
            return bad("epsilons", "must not be empty".into());
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return bad("epsilons", format!("values must be finite and >= 0, got {e}"));
        }
        if self.rate_grid.is_empty() {
            return bad("rate_grid", "must not be empty".into());
        }
        let r_max = self.max_rate();
        if let Some(r) = self
            .rate_grid
            .iter()
            .find(|r| !(r.is_finite() && **r >= 0.0 && **r < r_max))
        {
            return bad("rate_grid", format!("{r} outside the feasible range [0, {r_max})"));
        }
        Ok(())
    }
}

impl SimConfigFile {
    /// Fill unset fields with defaults and validate.
    pub fn resolve(&self) -> Result<SimConfig> {
        let n_antennas = self.n_antennas.unwrap_or(4);
        let power = self.power.unwrap_or(10.0);
        let sigma2 = self.sigma2.unwrap_or(1.0);
        let channel_norm = self.channel_norm.unwrap_or(n_antennas as f64);
        let rate_grid = self.rate_grid.clone().unwrap_or_else(|| {
            let top = DEFAULT_RATE_FRACTION * (1.0 + power * channel_norm / sigma2).log2();
            (0..DEFAULT_RATE_POINTS)
                .map(|k| top * k as f64 / (DEFAULT_RATE_POINTS - 1) as f64)
                .collect()
        });
        let seed = self.seed.ok_or_else(|| Error::InvalidConfig {
            field: "seed",
            reason: "a seed is required".into(),
        })?;
        let cfg = SimConfig {
            n_antennas,
            power,
            sigma2,
            epsilons: self.epsilons.clone().unwrap_or_else(|| DEFAULT_EPSILONS.to_vec()),
            rate_grid,
            n_channels: self.n_channels.unwrap_or(100),
            n_error_samples: self.n_error_samples.unwrap_or(100),
            seed,
            channel_norm,
            sampling: self.sampling.unwrap_or(SampleMode::Interior),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// I.i.d. circularly symmetric complex Gaussian entries rescaled to `‖·‖² = norm2`.
pub fn gen_rayleigh_channel(n: usize, norm2: f64, rng: &mut RandomStream) -> ChannelVector {
    assert!(n >= 1 && norm2 > 0.0);
    loop {
        let v: Vec<_> = (0..n).map(|_| rng.complex_normal()).collect();
        let ns = crate::linalg::norm_sqr(&v);
        if ns > 0.0 {
            let s = (norm2 / ns).sqrt();
            return ChannelVector::from_vec_unchecked(crate::linalg::scale_real(&v, s));
        }
    }
}

/// How one design fared on one channel pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    pub guaranteed_energy: f64,
    pub nominal_energy: f64,
    pub empirical_min_energy: f64,
    pub empirical_min_rate: f64,
    /// Number of sampled rate-channel errors that violate the target.
    pub outage_samples: usize,
    /// The closed-form worst rate-channel error violates the target.
    pub worst_case_outage: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub n_samples: usize,
    /// `None` when the robust instance is infeasible.
    pub robust: Option<DesignOutcome>,
    /// `None` when even the `ε = 0` instance is infeasible.
    pub nonrobust: Option<DesignOutcome>,
}

struct ErrorDraws {
    dh: Vec<Vec<crate::Complex64>>,
    dg: Vec<Vec<crate::Complex64>>,
}

fn evaluate(
    inst: &RobustInstance,
    sol: &BeamformerSolution,
    draws: &ErrorDraws,
) -> Result<DesignOutcome> {
    let w: &Beamformer = &sol.w;
    let eps = inst.epsilon;
    let r_floor = inst.rate_target - SQUARED_TOL;

    let worst_g = worstcase::worst_error_vector(&inst.g_hat, eps, w)?;
    let worst_h = worstcase::worst_error_vector(&inst.h_hat, eps, w)?;

    let mut min_energy = model::harvested_energy(&inst.g_hat.perturbed(&worst_g.delta)?, w)?;
    for dg in &draws.dg {
        min_energy = min_energy.min(model::harvested_energy(&inst.g_hat.perturbed(dg)?, w)?);
    }

    let worst_rate = model::achieved_rate(&inst.h_hat.perturbed(&worst_h.delta)?, w, inst.sigma2)?;
    let mut min_rate = worst_rate;
    let mut outage_samples = 0;
    for dh in &draws.dh {
        let rate = model::achieved_rate(&inst.h_hat.perturbed(dh)?, w, inst.sigma2)?;
        if rate < r_floor {
            outage_samples += 1;
        }
        min_rate = min_rate.min(rate);
    }

    Ok(DesignOutcome {
        guaranteed_energy: worstcase::worst_case_energy(&inst.g_hat, eps, w)?,
        nominal_energy: sol.nominal_energy,
        empirical_min_energy: min_energy,
        empirical_min_rate: min_rate,
        outage_samples,
        worst_case_outage: worst_rate < r_floor,
    })
}

/// Design and attack both beamformers for one channel pair at one `(r, ε)`.
///
/// Both designs face the same sampled errors.
pub fn run_trial(
    config: &SimConfig,
    rate_target: f64,
    epsilon: f64,
    channels: &(ChannelVector, ChannelVector),
    rng: &mut RandomStream,
) -> Result<TrialResult> {
    let (h_hat, g_hat) = channels;
    let inst = RobustInstance::new(
        h_hat.clone(),
        g_hat.clone(),
        config.power,
        config.sigma2,
        rate_target,
        epsilon,
    )?;
    let n = inst.n();
    let draws = ErrorDraws {
        dh: (0..config.n_error_samples)
            .map(|_| worstcase::sample_ball(epsilon, n, config.sampling, rng).delta)
            .collect(),
        dg: (0..config.n_error_samples)
            .map(|_| worstcase::sample_ball(epsilon, n, config.sampling, rng).delta)
            .collect(),
    };

    let robust = if check_feasibility(&inst).feasible {
        let sol = solver::solve_dual_sdp(&inst)?;
        Some(evaluate(&inst, &sol, &draws)?)
    } else {
        None
    };
    let nonrobust = if check_feasibility(&inst.with_epsilon(0.0)).feasible {
        let sol = solver::solve_nonrobust(&inst)?;
        Some(evaluate(&inst, &sol, &draws)?)
    } else {
        None
    };

    Ok(TrialResult {
        n_samples: config.n_error_samples,
        robust,
        nonrobust,
    })
}

/// Aggregates for one `(r, ε)` cell. Averages are over robust-feasible
/// trials (`NaN` when there are none); non-robust outage is over trials where
/// the `ε = 0` design exists. Outage percentages count sampled errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub r: f64,
    pub epsilon: f64,
    pub n_feasible: usize,
    pub avg_guaranteed_energy: f64,
    pub avg_empirical_min_energy: f64,
    pub avg_nominal_energy: f64,
    pub robust_outage_pct: f64,
    pub nonrobust_outage_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub r: f64,
    pub epsilon: f64,
    pub channel: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub rows: Vec<SimRow>,
    pub sampling: SampleMode,
    pub failures: Vec<TrialFailure>,
}

impl SimReport {
    pub fn row(&self, r: f64, epsilon: f64) -> Option<&SimRow> {
        self.rows.iter().find(|row| row.r == r && row.epsilon == epsilon)
    }

    /// Rows for one `ε`, in rate-grid order.
    pub fn curve(&self, epsilon: f64) -> Vec<&SimRow> {
        self.rows.iter().filter(|row| row.epsilon == epsilon).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let fields = [
                fmt_f64(row.r),
                fmt_f64(row.epsilon),
                row.n_feasible.to_string(),
                fmt_f64(row.avg_guaranteed_energy),
                fmt_f64(row.avg_empirical_min_energy),
                fmt_f64(row.avg_nominal_energy),
                fmt_f64(row.robust_outage_pct),
                fmt_f64(row.nonrobust_outage_pct),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Default)]
struct CellTotals {
    n_feasible: usize,
    guaranteed: f64,
    empirical_min: f64,
    nominal: f64,
    robust_outages: usize,
    robust_samples: usize,
    nonrobust_outages: usize,
    nonrobust_samples: usize,
}

fn mean(sum: f64, count: usize) -> f64 {
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

fn pct(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * hits as f64 / total as f64
    }
}

/// Run every `(ε, r)` cell over `n_channels` shared channel pairs.
///
/// Rows are ordered by `ε` (outer) then `r`. Trials run on the current rayon
/// pool; aggregation follows trial index order.
pub fn run_campaign(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let channels: Vec<(ChannelVector, ChannelVector)> = (0..config.n_channels)
        .map(|i| {
            let mut rng = RandomStream::substream(config.seed, &[STREAM_CHANNELS, i as u64]);
            let h = gen_rayleigh_channel(config.n_antennas, config.channel_norm, &mut rng);
            let g = gen_rayleigh_channel(config.n_antennas, config.channel_norm, &mut rng);
            (h, g)
        })
        .collect();

    let cells: Vec<(f64, f64)> = config
        .epsilons
        .iter()
        .flat_map(|&eps| config.rate_grid.iter().map(move |&r| (r, eps)))
        .collect();
    let n_ch = config.n_channels;

    let results: Vec<Result<TrialResult>> = (0..cells.len() * n_ch)
        .into_par_iter()
        .map(|idx| {
            let (cell, ch) = (idx / n_ch, idx % n_ch);
            let (r, eps) = cells[cell];
            let mut rng =
                RandomStream::substream(config.seed, &[STREAM_TRIALS, cell as u64, ch as u64]);
            run_trial(config, r, eps, &channels[ch], &mut rng).map_err(|e| Error::Trial {
                index: idx,
                source: Box::new(e),
            })
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for (cell, &(r, eps)) in cells.iter().enumerate() {
        let mut t = CellTotals::default();
        for ch in 0..n_ch {
            match &results[cell * n_ch + ch] {
                Ok(trial) => {
                    if let Some(o) = &trial.robust {
                        t.n_feasible += 1;
                        t.guaranteed += o.guaranteed_energy;
                        t.empirical_min += o.empirical_min_energy;
                        t.nominal += o.nominal_energy;
                        t.robust_outages += o.outage_samples;
                        t.robust_samples += trial.n_samples;
                    }
                    if let Some(o) = &trial.nonrobust {
                        t.nonrobust_outages += o.outage_samples;
                        t.nonrobust_samples += trial.n_samples;
                    }
                }
                Err(e) => failures.push(TrialFailure {
                    r,
                    epsilon: eps,
                    channel: ch,
                    message: e.to_string(),
                }),
            }
        }
        rows.push(SimRow {
            r,
            epsilon: eps,
            n_feasible: t.n_feasible,
            avg_guaranteed_energy: mean(t.guaranteed, t.n_feasible),
            avg_empirical_min_energy: mean(t.empirical_min, t.n_feasible),
            avg_nominal_energy: mean(t.nominal, t.n_feasible),
            robust_outage_pct: pct(t.robust_outages, t.robust_samples),
            nonrobust_outage_pct: pct(t.nonrobust_outages, t.nonrobust_samples),
        });
    }

    Ok(SimReport {
        rows,
        sampling: config.sampling,
        failures,
    })
}

/// Harvested energy versus rate target for every uncertainty level.
pub fn fig2_sweep(config: &SimConfig) -> Result<SimReport> {
    run_campaign(config)
}

/// Outage versus rate target; the `ε = 0` level carries no uncertainty and is dropped.
pub fn fig3_sweep(config: &SimConfig) -> Result<SimReport> {
    let mut cfg = config.clone();
    cfg.epsilons.retain(|&e| e > 0.0);
    if cfg.epsilons.is_empty() {
        cfg.epsilons = config.epsilons.clone();
    }
    run_campaign(&cfg)
}
