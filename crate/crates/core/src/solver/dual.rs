//! Reduced Lagrange dual of the relaxation and rank-one primal recovery.
//!
//! Maximizing the Lagrangian over `W ⪰ 0` is bounded only when
//! `μ ≥ λ_max(Ĝ + λĤ)`, and the dual is then minimized with `μ` at that
//! bound, leaving the convex scalar function `f(λ) = P·λ_max(Ĝ + λĤ) − λβ`.
//! At the minimizer the primal optimum is rank one along `Q⁻¹ĝ` with
//! `Q = μI − λĤ ≻ 0`.

use super::{beta, finish, screen, solve_closed_form, BeamformerSolution, GainPlane, SolverPath, KKT_TOL};
use crate::model::{Beamformer, RobustInstance};
use crate::{Complex64, Error, Result};

const GOLDEN_TOL: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 128;
/// `Q` counts as singular when its smallest eigenvalue falls below this times `μ`.
const SINGULAR_REL: f64 = 1e-10;

/// `f(λ) = P·λ_max(Ĝ + λĤ) − λβ`.
pub fn reduced_dual(instance: &RobustInstance, lambda: f64) -> f64 {
    let plane = GainPlane::new(&instance.g_hat, &instance.h_hat);
    Dual::new(instance, plane).value(lambda)
}

struct Dual {
    plane: GainPlane,
    power: f64,
    beta: f64,
}

impl Dual {
    fn new(instance: &RobustInstance, plane: GainPlane) -> Self {
        Self {
            plane,
            power: instance.power,
            beta: beta(instance),
        }
    }

    fn value(&self, lambda: f64) -> f64 {
        self.power * self.plane.matrix(lambda).eigenvalues().0 - lambda * self.beta
    }

    /// Right derivative of `f` where `λ_max` is simple: `P·|ĥᴴv|² − β`.
    fn slope(&self, lambda: f64) -> f64 {
        let v = self.plane.matrix(lambda).top_eigenvector();
        let (h1, h2) = (self.plane.plane.c1, self.plane.plane.c2);
        let hv = h1.conj() * v[0] + v[1] * h2;
        self.power * hv.norm_sqr() - self.beta
    }

    fn bracket(&self) -> Result<f64> {
        let mut hi = 1.0_f64;
        for _ in 0..MAX_DOUBLINGS {
            let step = 1e-3 * hi;
            if self.value(hi + step) > self.value(hi) {
                return Ok(hi + step);
            }
            hi *= 2.0;
        }
        Err(Error::ToleranceNotReached {
            what: "dual bracket",
            value: hi,
        })
    }

    fn golden(&self, mut a: f64, mut b: f64) -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut x1 = b - INV_PHI * (b - a);
        let mut x2 = a + INV_PHI * (b - a);
        let mut f1 = self.value(x1);
        let mut f2 = self.value(x2);
        for _ in 0..400 {
            if b - a < GOLDEN_TOL * (1.0 + 0.5 * (a + b)) {
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - INV_PHI * (b - a);
                f1 = self.value(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + INV_PHI * (b - a);
                f2 = self.value(x2);
            }
        }
        0.5 * (a + b)
    }

    /// Refine a golden-section estimate to the sign change of the slope.
    ///
    /// Function values are flat to rounding near a smooth minimum, so the
    /// golden bracket only pins `λ*` to about `√ε_mach`; the slope is
    /// monotone and bisects to full precision. Returns the upper end, where
    /// the rate constraint holds.
    fn polish(&self, guess: f64) -> f64 {
        let mut step = 1e-9 * (1.0 + guess);
        let mut lo = (guess - step).max(0.0);
        let mut hi = guess + step;
        for _ in 0..200 {
            if lo == 0.0 || self.slope(lo) <= 0.0 {
                break;
            }
            step *= 4.0;
            lo = (lo - step).max(0.0);
        }
        let mut step = 1e-9 * (1.0 + guess);
        for _ in 0..200 {
            if self.slope(hi) >= 0.0 {
                break;
            }
            step *= 4.0;
            hi += step;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.slope(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Solve through the reduced dual and rank-one recovery.
///
/// Falls back to [`solve_closed_form`] (reporting `path = closed_form`) when
/// `Q` is numerically singular or the feasible set collapses to the matched
/// filter of `ĥ`, where no finite multiplier exists.
pub fn solve_dual_sdp(instance: &RobustInstance) -> Result<BeamformerSolution> {
    screen(instance)?;
    let plane = GainPlane::new(&instance.g_hat, &instance.h_hat);
    let dual = Dual::new(instance, plane);
    let power = instance.power;
    let sqrt_p = power.sqrt();
    let g_norm_sqr = dual.plane.g_norm_sqr;

    // Rate constraint inactive at the matched filter to ĝ.
    if power * dual.plane.plane.c1.norm_sqr() >= dual.beta {
        let w = Beamformer::from_vec_unchecked(
            instance.g_hat.entries().iter().map(|z| z * (sqrt_p / g_norm_sqr.sqrt())).collect(),
        );
        return verified(instance, w, 0.0, g_norm_sqr);
    }

    // Only ĥ's matched filter is feasible.
    if dual.beta >= power * dual.plane.h_norm_sqr() * (1.0 - 1e-12) {
        return fallback(instance);
    }

    let hi = dual.bracket()?;
    let lambda = dual.polish(dual.golden(0.0, hi));
    let m = dual.plane.matrix(lambda);
    let mu = m.eigenvalues().0;

    let min_eig = mu - lambda * dual.plane.h_norm_sqr();
    if min_eig < SINGULAR_REL * mu {
        return fallback(instance);
    }

    // Q = μI − λĤ restricted to the plane; ĝ = ‖ĝ‖·u1.
    let q = crate::linalg::Hermitian2 {
        a: mu - lambda * dual.plane.plane.c1.norm_sqr(),
        b: -(dual.plane.plane.c1 * (lambda * dual.plane.plane.c2)),
        d: mu - lambda * dual.plane.plane.c2 * dual.plane.plane.c2,
    };
    let d = q.solve([Complex64::new(g_norm_sqr.sqrt(), 0.0), Complex64::new(0.0, 0.0)]);
    let d_norm = (d[0].norm_sqr() + d[1].norm_sqr()).sqrt();
    let s = sqrt_p / d_norm;
    let w = Beamformer::from_vec_unchecked(dual.plane.plane.lift(d[0] * s, d[1] * s));
    verified(instance, w, lambda, mu)
}

fn fallback(instance: &RobustInstance) -> Result<BeamformerSolution> {
    solve_closed_form(instance)
}

fn verified(instance: &RobustInstance, w: Beamformer, lambda: f64, mu: f64) -> Result<BeamformerSolution> {
    let sol = finish(instance, w, lambda, mu, SolverPath::DualSdp)?;
    let scale = (instance.power * mu).max(1.0);
    let worst = sol.kkt_residuals.max_residual();
    if worst > KKT_TOL * scale {
        return Err(Error::ToleranceNotReached {
            what: "KKT residual",
            value: worst,
        });
    }
    if sol.duality_gap > KKT_TOL {
        return Err(Error::ToleranceNotReached {
            what: "duality gap",
            value: sol.duality_gap,
        });
    }
    Ok(sol)
}
