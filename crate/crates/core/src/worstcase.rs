//! Worst-case behaviour of a fixed beamformer over the channel-error ball
//! `{Δ : ‖Δ‖ ≤ ε}`.
//!
//! For an estimate `v̂` the smallest achievable amplitude `|(v̂ + Δ)ᴴw|` is
//! `|v̂ᴴw| − ε‖w‖` (triangle plus Cauchy-Schwarz), attained by an error
//! pointing against `w` with the phase of `v̂ᴴw`. When `ε‖w‖ ≥ |v̂ᴴw|` an
//! in-ball error nulls the inner product, so the exact minimum is clamped at 0.

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::model::{self, check_dim, Beamformer, ChannelVector, RobustInstance};
use crate::rng::RandomStream;
use crate::{Complex64, Error, Result};

/// Slack on `‖Δ‖ ≤ ε`.
pub const RADIUS_TOL: f64 = 1e-12;
/// Comparison tolerance on squared quantities (energies, rates).
pub const SQUARED_TOL: f64 = 1e-9;

/// A channel estimation error together with the ball radius it must respect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorVector {
    pub delta: Vec<Complex64>,
    pub radius_bound: f64,
}

impl ErrorVector {
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.delta)
    }

    pub fn within_bound(&self) -> bool {
        self.norm() <= self.radius_bound + RADIUS_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// Uniform over the solid ball.
    Interior,
    /// Uniform direction at radius exactly `ε`.
    Boundary,
}

/// Result of attacking a beamformer with sampled and closed-form errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryReport {
    pub n_samples: usize,
    pub min_energy: f64,
    pub min_rate: f64,
    pub closed_form_energy: f64,
    pub closed_form_rate_power: f64,
    pub rate_outage: bool,
    pub energy_bound_violated: bool,
}

fn ensure_nonzero(w: &Beamformer) -> Result<f64> {
    let n = w.norm();
    if n == 0.0 {
        Err(Error::ZeroBeamformer)
    } else {
        Ok(n)
    }
}

/// `min over ‖Δ‖ ≤ ε of |(v̂ + Δ)ᴴw|`, i.e. `max(|v̂ᴴw| − ε‖w‖, 0)`.
pub fn worst_case_amplitude(v_hat: &ChannelVector, epsilon: f64, w: &Beamformer) -> Result<f64> {
    let w_norm = ensure_nonzero(w)?;
    let nominal = v_hat.inner(w)?.norm();
    Ok((nominal - epsilon * w_norm).max(0.0))
}

/// Worst-case harvested energy over the error ball around `ĝ`.
pub fn worst_case_energy(g_hat: &ChannelVector, epsilon: f64, w: &Beamformer) -> Result<f64> {
    let amp = worst_case_amplitude(g_hat, epsilon, w)?;
    Ok(model::ETA * amp * amp)
}

/// Error vector attaining [`worst_case_amplitude`].
///
/// `Δ = −ρ·e^{−jψ}·w/‖w‖` with `ψ = arg(v̂ᴴw)` and `ρ = min(ε, |v̂ᴴw|/‖w‖)`;
/// the second branch is the clamped regime where the inner product is nulled.
pub fn worst_error_vector(v_hat: &ChannelVector, epsilon: f64, w: &Beamformer) -> Result<ErrorVector> {
    let w_norm = ensure_nonzero(w)?;
    let ip = v_hat.inner(w)?;
    let mag = ip.norm();
    let rho = epsilon.min(mag / w_norm);
    let phase = if mag > 0.0 {
        ip.conj() / mag
    } else {
        Complex64::new(1.0, 0.0)
    };
    let coeff = -phase * (rho / w_norm);
    Ok(ErrorVector {
        delta: linalg::scale(w.entries(), coeff),
        radius_bound: epsilon,
    })
}

/// Draw one error vector from the ball of radius `epsilon` in `C^n`.
///
/// The direction is a normalized standard complex Gaussian. In interior mode
/// the radius is `ε·u^(1/(2n))`, which makes the point uniform in the
/// `2n`-dimensional real ball.
pub fn sample_ball(epsilon: f64, n: usize, mode: SampleMode, rng: &mut RandomStream) -> ErrorVector {
    assert!(n >= 1, "sample_ball needs n >= 1");
    if epsilon == 0.0 {
        return ErrorVector {
            delta: vec![Complex64::new(0.0, 0.0); n],
            radius_bound: 0.0,
        };
    }
    let dir = loop {
        let v: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
        if linalg::norm_sqr(&v) > 0.0 {
            break v;
        }
    };
    let radius = match mode {
        SampleMode::Boundary => epsilon,
        SampleMode::Interior => epsilon * rng.uniform_open().powf(1.0 / (2 * n) as f64),
    };
    let s = radius / linalg::norm(&dir);
    ErrorVector {
        delta: linalg::scale_real(&dir, s),
        radius_bound: epsilon,
    }
}

/// Attack `w` with `n_samples` errors on each channel (half boundary, half
/// interior) plus the two closed-form worst-case errors.
pub fn adversarial_check(
    instance: &RobustInstance,
    w: &Beamformer,
    n_samples: usize,
    rng: &mut RandomStream,
) -> Result<AdversaryReport> {
    if n_samples == 0 {
        return Err(Error::InvalidField {
            field: "n_samples",
            reason: "must be >= 1".into(),
        });
    }
    let n = instance.n();
    check_dim("w", n, w.len())?;
    let eps = instance.epsilon;
    let (h_hat, g_hat) = (&instance.h_hat, &instance.g_hat);

    let closed_form_energy = worst_case_energy(g_hat, eps, w)?;
    let amp_h = worst_case_amplitude(h_hat, eps, w)?;
    let closed_form_rate_power = amp_h * amp_h;

    let energy_at = |delta: &[Complex64]| -> Result<f64> {
        model::harvested_energy(&g_hat.perturbed(delta)?, w)
    };
    let rate_at = |delta: &[Complex64]| -> Result<f64> {
        model::achieved_rate(&h_hat.perturbed(delta)?, w, instance.sigma2)
    };

    let mut min_energy = energy_at(&worst_error_vector(g_hat, eps, w)?.delta)?;
    let mut min_rate = rate_at(&worst_error_vector(h_hat, eps, w)?.delta)?;
    for i in 0..n_samples {
        let mode = if i % 2 == 0 {
            SampleMode::Boundary
        } else {
            SampleMode::Interior
        };
        let dg = sample_ball(eps, n, mode, rng);
        let dh = sample_ball(eps, n, mode, rng);
        min_energy = min_energy.min(energy_at(&dg.delta)?);
        min_rate = min_rate.min(rate_at(&dh.delta)?);
    }

    Ok(AdversaryReport {
        n_samples,
        min_energy,
        min_rate,
        closed_form_energy,
        closed_form_rate_power,
        rate_outage: min_rate < instance.rate_target - SQUARED_TOL,
        energy_bound_violated: min_energy < closed_form_energy - SQUARED_TOL,
    })
}
