//! Problem data for the three-node link: channel estimates, the transmit
//! beamformer, and the robust instance tying them to the power budget, noise
//! level, rate target and uncertainty radius.
//!
//! All quantities are linear (not dB) and rates are in bits per channel use.

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Complex64, Error, Result};

/// Energy-conversion efficiency at the energy receiver.
pub const ETA: f64 = 1.0;

/// Absolute tolerance on the feasibility margin; the boundary is feasible.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Complex channel vector (estimate or realization), serialized as `[[re, im], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelVector(Vec<Complex64>);

impl ChannelVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidField {
                field: "channel",
                reason: "must have at least one entry".into(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidField {
                field: "channel",
                reason: "entries must be finite".into(),
            });
        }
        Ok(Self(entries))
    }

    /// Real-valued channel, convenient for hand-written cases.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.0)
    }

    /// `selfᴴ w`
    pub fn inner(&self, w: &Beamformer) -> Result<Complex64> {
        check_dim("w", self.len(), w.len())?;
        Ok(linalg::inner(&self.0, w.entries()))
    }

    /// `self + delta`, the realized channel for an estimation error `delta`.
    pub fn perturbed(&self, delta: &[Complex64]) -> Result<Self> {
        check_dim("delta", self.len(), delta.len())?;
        Ok(Self(self.0.iter().zip(delta).map(|(a, b)| a + b).collect()))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }
}

/// Transmit weights; `‖w‖²` is the radiated power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Beamformer(Vec<Complex64>);

impl Beamformer {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidField {
                field: "w",
                reason: "must have at least one entry".into(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidField {
                field: "w",
                reason: "entries must be finite".into(),
            });
        }
        Ok(Self(entries))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }

    pub fn power(&self) -> f64 {
        linalg::norm_sqr(&self.0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self(linalg::scale(&self.0, c))
    }

    /// Rotate the global phase so that `g_hatᴴ w` is real and non-negative.
    ///
    /// Left unchanged when the inner product is exactly zero.
    pub fn canonicalized(&self, g_hat: &ChannelVector) -> Result<Self> {
        let ip = g_hat.inner(self)?;
        let mag = ip.norm();
        if mag == 0.0 {
            return Ok(self.clone());
        }
        Ok(self.scaled(ip.conj() / mag))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }
}

/// One robust design problem: estimates `ĥ`, `ĝ`, power budget `P`, noise
/// variance `σ²`, rate target `r` and uncertainty radius `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustInstance {
    pub h_hat: ChannelVector,
    pub g_hat: ChannelVector,
    pub power: f64,
    pub sigma2: f64,
    pub rate_target: f64,
    pub epsilon: f64,
}

impl RobustInstance {
    pub fn new(
        h_hat: ChannelVector,
        g_hat: ChannelVector,
        power: f64,
        sigma2: f64,
        rate_target: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let inst = Self {
            h_hat,
            g_hat,
            power,
            sigma2,
            rate_target,
            epsilon,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim("g_hat", self.h_hat.len(), self.g_hat.len())?;
        non_negative("power", self.power)?;
        non_negative("rate_target", self.rate_target)?;
        non_negative("epsilon", self.epsilon)?;
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::InvalidField {
                field: "sigma2",
                reason: format!("must be finite and > 0, got {}", self.sigma2),
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.h_hat.len()
    }

    /// Same instance with a different uncertainty radius.
    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidField {
            field,
            reason: format!("must be finite and >= 0, got {v}"),
        })
    }
}

pub(crate) fn check_dim(field: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            field,
            expected,
            found,
        })
    }
}

/// Minimum received signal power `σ²(2^r − 1)` that supports rate `r`.
pub fn rate_threshold(rate_target: f64, sigma2: f64) -> f64 {
    sigma2 * (rate_target * std::f64::consts::LN_2).exp_m1()
}

/// Harvested power `η|gᴴw|²`.
pub fn harvested_energy(g: &ChannelVector, w: &Beamformer) -> Result<f64> {
    Ok(ETA * g.inner(w)?.norm_sqr())
}

/// `log2(1 + |hᴴw|²/σ²)`
pub fn achieved_rate(h: &ChannelVector, w: &Beamformer, sigma2: f64) -> Result<f64> {
    let snr = h.inner(w)?.norm_sqr() / sigma2;
    Ok(snr.ln_1p() / std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `√P‖ĥ‖ − ε√P − σ√(2^r − 1)`
    pub margin: f64,
    pub feasible: bool,
}

/// Whether some full-power beamformer meets the rate target for every
/// channel error in the ball. The best case is the matched filter to `ĥ`.
pub fn check_feasibility(instance: &RobustInstance) -> FeasibilityReport {
    let sqrt_p = instance.power.sqrt();
    let margin = sqrt_p * instance.h_hat.norm()
        - instance.epsilon * sqrt_p
        - rate_threshold(instance.rate_target, instance.sigma2).sqrt();
    FeasibilityReport {
        margin,
        feasible: margin >= -FEASIBILITY_TOL,
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    n: usize,
    h_hat: Vec<Complex64>,
    g_hat: Vec<Complex64>,
    power: f64,
    sigma2: f64,
    rate_target: f64,
    epsilon: f64,
}

/// Parse an instance from its JSON form, validating every field.
pub fn parse_instance(text: &[u8]) -> Result<RobustInstance> {
    let raw: InstanceJson = serde_json::from_slice(text)?;
    if raw.n == 0 {
        return Err(Error::InvalidField {
            field: "n",
            reason: "must be >= 1".into(),
        });
    }
    check_dim("h_hat", raw.n, raw.h_hat.len())?;
    check_dim("g_hat", raw.n, raw.g_hat.len())?;
    let h_hat = ChannelVector::new(raw.h_hat).map_err(|e| rename(e, "h_hat"))?;
    let g_hat = ChannelVector::new(raw.g_hat).map_err(|e| rename(e, "g_hat"))?;
    RobustInstance::new(
        h_hat,
        g_hat,
        raw.power,
        raw.sigma2,
        raw.rate_target,
        raw.epsilon,
    )
}

pub fn serialize_instance(instance: &RobustInstance) -> Vec<u8> {
    let raw = InstanceJson {
        n: instance.n(),
        h_hat: instance.h_hat.entries().to_vec(),
        g_hat: instance.g_hat.entries().to_vec(),
        power: instance.power,
        sigma2: instance.sigma2,
        rate_target: instance.rate_target,
        epsilon: instance.epsilon,
    };
    serde_json::to_vec(&raw).expect("instance JSON is always serializable")
}

fn rename(e: Error, field: &'static str) -> Error {
    match e {
        Error::InvalidField { reason, .. } => Error::InvalidField { field, reason },
        other => other,
    }
}
