//! Robust beamformer design.
//!
//! After the worst-case transform the design problem is
//!
//! ```text
//! maximize |ĝᴴw|²  s.t.  |ĥᴴw|² ≥ β,  ‖w‖² ≤ P,   β = (ε√P + σ√(2^r − 1))²
//! ```
//!
//! whose semidefinite relaxation is tight. Three independent routes solve it:
//!
//! * [`solve_dual_sdp`] minimizes the reduced Lagrange dual
//!   `f(λ) = P·λ_max(Ĝ + λĤ) − λβ` and recovers the rank-one primal from
//!   `(μI − λĤ)⁻¹ĝ`;
//! * [`solve_closed_form`] works directly in the plane spanned by `ĥ` and `ĝ`;
//! * [`solve_grid_oracle`] brute-forces the power split in that plane.
//!
//! [`verify_kkt`] audits any of them against the Lagrangian of the relaxation.

mod closed_form;
mod dual;
mod extract;
mod kkt;

use serde::{Deserialize, Serialize};

use crate::linalg::{Hermitian2, Plane};
use crate::model::{self, check_feasibility, Beamformer, ChannelVector, RobustInstance};
use crate::{Error, Result};

pub use closed_form::{solve_closed_form, solve_grid_oracle, solve_nonrobust};
pub use dual::{reduced_dual, solve_dual_sdp};
pub use extract::{extract_beamformer, outer_product};
pub use kkt::{verify_kkt, KktReport};

/// Residual tolerance for KKT conditions and the duality gap.
pub const KKT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    DualSdp,
    ClosedForm,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerSolution {
    pub w: Beamformer,
    /// `max(|ĝᴴw| − ε√P, 0)²`
    pub guaranteed_energy: f64,
    /// `|ĝᴴw|²`
    pub nominal_energy: f64,
    pub lambda: f64,
    pub mu: f64,
    pub duality_gap: f64,
    pub kkt_residuals: KktReport,
    pub path: SolverPath,
}

/// `(ε√P + σ√(2^r − 1))²`, the worst-case-safe received signal power.
pub fn beta(instance: &RobustInstance) -> f64 {
    let s = instance.epsilon * instance.power.sqrt()
        + model::rate_threshold(instance.rate_target, instance.sigma2).sqrt();
    s * s
}

/// Largest eigenvalue of `ĝĝᴴ + λĥĥᴴ`.
///
/// The matrix has rank at most two, so it is projected onto an orthonormal
/// basis of `span{ĝ, ĥ}` and the 2×2 characteristic equation is solved.
pub fn lambda_max_2d(g_hat: &ChannelVector, h_hat: &ChannelVector, lambda: f64) -> Result<f64> {
    model::check_dim("h_hat", g_hat.len(), h_hat.len())?;
    if g_hat.norm_sqr() == 0.0 && h_hat.norm_sqr() == 0.0 {
        return Err(Error::ZeroChannel("g_hat and h_hat"));
    }
    Ok(lambda_max_unchecked(g_hat, h_hat, lambda))
}

pub(crate) fn lambda_max_unchecked(g_hat: &ChannelVector, h_hat: &ChannelVector, lambda: f64) -> f64 {
    if g_hat.norm_sqr() == 0.0 {
        return (lambda * h_hat.norm_sqr()).max(0.0);
    }
    GainPlane::new(g_hat, h_hat).matrix(lambda).eigenvalues().0
}

/// `span{ĝ, ĥ}` with `u1 = ĝ/‖ĝ‖` and `ĥ = h1·u1 + h2·u2`.
pub(crate) struct GainPlane {
    pub plane: Plane,
    pub g_norm_sqr: f64,
}

impl GainPlane {
    pub fn new(g_hat: &ChannelVector, h_hat: &ChannelVector) -> Self {
        Self {
            plane: Plane::new(g_hat.entries(), h_hat.entries()),
            g_norm_sqr: g_hat.norm_sqr(),
        }
    }

    /// `Ĝ + λĤ` in plane coordinates.
    pub fn matrix(&self, lambda: f64) -> Hermitian2 {
        let (h1, h2) = (self.plane.c1, self.plane.c2);
        Hermitian2 {
            a: self.g_norm_sqr + lambda * h1.norm_sqr(),
            b: h1 * (lambda * h2),
            d: lambda * h2 * h2,
        }
    }

    pub fn h_norm_sqr(&self) -> f64 {
        self.plane.c1.norm_sqr() + self.plane.c2 * self.plane.c2
    }
}

/// Shared precondition screen for every solver route.
pub(crate) fn screen(instance: &RobustInstance) -> Result<()> {
    instance.validate()?;
    if instance.power <= 0.0 {
        return Err(Error::InvalidField {
            field: "power",
            reason: "must be > 0 to solve".into(),
        });
    }
    if instance.h_hat.norm_sqr() == 0.0 {
        return Err(Error::ZeroChannel("h_hat"));
    }
    if instance.g_hat.norm_sqr() == 0.0 {
        return Err(Error::ZeroChannel("g_hat"));
    }
    let rep = check_feasibility(instance);
    if !rep.feasible {
        return Err(Error::InfeasibleInstance { margin: rep.margin });
    }
    Ok(())
}

/// Canonicalize `w`, compute energies and the duality gap, and audit KKT.
pub(crate) fn finish(
    instance: &RobustInstance,
    w: Beamformer,
    lambda: f64,
    mu: f64,
    path: SolverPath,
) -> Result<BeamformerSolution> {
    let w = w.canonicalized(&instance.g_hat)?;
    let amp = instance.g_hat.inner(&w)?.norm();
    let guaranteed = (amp - instance.epsilon * instance.power.sqrt()).max(0.0);
    let nominal_energy = model::ETA * amp * amp;
    let dual_value = mu * instance.power - lambda * beta(instance);
    let diff = (dual_value - nominal_energy).abs();
    let duality_gap = if nominal_energy > 0.0 {
        diff / nominal_energy
    } else {
        diff
    };
    let mut sol = BeamformerSolution {
        w,
        guaranteed_energy: model::ETA * guaranteed * guaranteed,
        nominal_energy,
        lambda,
        mu,
        duality_gap,
        kkt_residuals: KktReport::default(),
        path,
    };
    sol.kkt_residuals = verify_kkt(instance, &sol);
    Ok(sol)
}
