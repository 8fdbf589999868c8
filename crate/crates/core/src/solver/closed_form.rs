//! Solution inside `span{ĥ, ĝ}`.
//!
//! Any component of `w` orthogonal to both channels wastes power, so with
//! `u1 = ĥ/‖ĥ‖` and `ĝ = g1·u1 + g2·u2` the problem reduces to choosing the
//! real power split `x² + y² = P` that maximizes `|g1|x + g2·y` subject to
//! `x ≥ x_min = √β/‖ĥ‖`, with the phase of `g1` applied to the `u1` part.

use super::{beta, finish, screen, BeamformerSolution, SolverPath};
use crate::linalg::Plane;
use crate::model::{Beamformer, RobustInstance};
use crate::{Complex64, Error, Result};

struct Reduced {
    plane: Plane,
    h_norm_sqr: f64,
    /// `|g1|`
    g1: f64,
    g2: f64,
    /// unit phase of `g1`
    phase: Complex64,
    x_min: f64,
    sqrt_p: f64,
}

impl Reduced {
    fn new(instance: &RobustInstance) -> Self {
        let plane = Plane::new(instance.h_hat.entries(), instance.g_hat.entries());
        let h_norm_sqr = instance.h_hat.norm_sqr();
        let sqrt_p = instance.power.sqrt();
        let g1 = plane.c1.norm();
        let phase = if g1 > 0.0 {
            plane.c1 / g1
        } else {
            Complex64::new(1.0, 0.0)
        };
        // margin in [-tol, 0) may push x_min a hair past √P
        let x_min = (beta(instance).sqrt() / h_norm_sqr.sqrt()).min(sqrt_p);
        Self {
            g2: plane.c2,
            plane,
            h_norm_sqr,
            g1,
            phase,
            x_min,
            sqrt_p,
        }
    }

    fn objective(&self, x: f64, y: f64) -> f64 {
        self.g1 * x + self.g2 * y
    }

    fn beamformer(&self, x: f64, y: f64) -> Beamformer {
        Beamformer::from_vec_unchecked(self.plane.lift(self.phase * x, Complex64::new(y, 0.0)))
    }

    fn y_for(&self, x: f64) -> f64 {
        (self.sqrt_p * self.sqrt_p - x * x).max(0.0).sqrt()
    }

    /// Multipliers from the stationarity conditions in the plane.
    ///
    /// Inactive rate constraint: `λ = 0`, `μ = ‖ĝ‖²`. Active: the `u2` row
    /// gives `μ = g2·s/y` and the `u1` row `λ = (μx − |g1|s)/(‖ĥ‖²x)`, with
    /// `s = |g1|x + g2·y`. A vanishing `y` leaves them undetermined; `λ = 0`
    /// is reported and the KKT audit shows the resulting residual.
    fn multipliers(&self, x: f64, y: f64, active: bool) -> (f64, f64) {
        let g_norm_sqr = self.g1 * self.g1 + self.g2 * self.g2;
        if !active || y <= 0.0 || x <= 0.0 {
            return (0.0, g_norm_sqr);
        }
        let s = self.objective(x, y);
        let mu = self.g2 * s / y;
        let lambda = (mu * x - self.g1 * s) / (self.h_norm_sqr * x);
        (lambda.max(0.0), mu)
    }

    fn unconstrained(&self) -> (f64, f64) {
        let g_norm = self.g1.hypot(self.g2);
        (self.sqrt_p * self.g1 / g_norm, self.sqrt_p * self.g2 / g_norm)
    }
}

/// Closed-form optimum of the power split in `span{ĥ, ĝ}`.
pub fn solve_closed_form(instance: &RobustInstance) -> Result<BeamformerSolution> {
    screen(instance)?;
    let red = Reduced::new(instance);
    let (xu, yu) = red.unconstrained();
    let (x, y, active) = if xu >= red.x_min {
        (xu, yu, false)
    } else {
        (red.x_min, red.y_for(red.x_min), true)
    };
    let (lambda, mu) = red.multipliers(x, y, active);
    finish(instance, red.beamformer(x, y), lambda, mu, SolverPath::ClosedForm)
}

/// Brute-force search over `resolution` evenly spaced `x ∈ [x_min, √P]`.
pub fn solve_grid_oracle(instance: &RobustInstance, resolution: usize) -> Result<BeamformerSolution> {
    if resolution < 100 {
        return Err(Error::InvalidField {
            field: "resolution",
            reason: format!("must be >= 100, got {resolution}"),
        });
    }
    screen(instance)?;
    let red = Reduced::new(instance);
    let span = red.sqrt_p - red.x_min;
    let (best_x, _) = (0..resolution)
        .map(|k| {
            let x = if k + 1 == resolution {
                red.sqrt_p
            } else {
                red.x_min + span * (k as f64) / ((resolution - 1) as f64)
            };
            (x, red.objective(x, red.y_for(x)))
        })
        .fold((red.x_min, f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        });
    let y = red.y_for(best_x);
    let active = red.unconstrained().0 < red.x_min;
    let (lambda, mu) = red.multipliers(best_x, y, active);
    finish(instance, red.beamformer(best_x, y), lambda, mu, SolverPath::Grid)
}

/// Design as if the estimates were exact (`ε = 0`).
pub fn solve_nonrobust(instance: &RobustInstance) -> Result<BeamformerSolution> {
    solve_closed_form(&instance.with_epsilon(0.0))
}
