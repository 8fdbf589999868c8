use serde::{Deserialize, Serialize};

use super::{beta, lambda_max_unchecked, BeamformerSolution};
use crate::linalg;
use crate::model::RobustInstance;

/// KKT residuals of the relaxation at `W = wwᴴ` with multipliers `(λ, μ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// Violation of `Tr(ĤW) ≥ β` and `Tr(W) ≤ P`.
    pub primal_feas: f64,
    /// `max(0, λ_max(Ĝ + λĤ − μI))`, plus any negative multiplier.
    pub dual_feas: f64,
    /// `λ·|Tr(ĤW) − β|`
    pub comp_slack_rate: f64,
    /// `μ·|Tr(W) − P|`
    pub comp_slack_power: f64,
    /// `‖(Ĝ + λĤ − μI)w‖`
    pub stationarity: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.primal_feas,
            self.dual_feas,
            self.comp_slack_rate,
            self.comp_slack_power,
            self.stationarity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn verify_kkt(instance: &RobustInstance, solution: &BeamformerSolution) -> KktReport {
    let w = solution.w.entries();
    let (g, h) = (instance.g_hat.entries(), instance.h_hat.entries());
    let (lambda, mu) = (solution.lambda, solution.mu);
    let b = beta(instance);

    let gw = linalg::inner(g, w);
    let hw = linalg::inner(h, w);
    let rate_power = hw.norm_sqr();
    let tx_power = linalg::norm_sqr(w);

    let primal_feas = (b - rate_power).max(0.0) + (tx_power - instance.power).max(0.0);
    let lmax = lambda_max_unchecked(&instance.g_hat, &instance.h_hat, lambda.max(0.0));
    let dual_feas = (lmax - mu).max(0.0) + (-lambda).max(0.0) + (-mu).max(0.0);

    let resid: Vec<_> = (0..w.len())
        .map(|i| g[i] * gw + h[i] * (hw * lambda) - w[i] * mu)
        .collect();

    KktReport {
        primal_feas,
        dual_feas,
        comp_slack_rate: lambda.abs() * (rate_power - b).abs(),
        comp_slack_power: mu.abs() * (tx_power - instance.power).abs(),
        stationarity: linalg::norm(&resid),
    }
}
