#![allow(dead_code)]

use robeam::montecarlo::gen_rayleigh_channel;
use robeam::{Complex64, RandomStream, RobustInstance};

pub const DIMS: [usize; 4] = [2, 3, 4, 8];

/// Random feasible instance: normalized Rayleigh estimates (`‖·‖² = N`),
/// `P = 10`, `σ² = 1`, `ε ∈ [0, 0.5]`, `r` uniform on the feasible range.
pub fn random_instance(rng: &mut RandomStream, n: usize) -> RobustInstance {
    let h = gen_rayleigh_channel(n, n as f64, rng);
    let g = gen_rayleigh_channel(n, n as f64, rng);
    let (power, sigma2): (f64, f64) = (10.0, 1.0);
    let eps = 0.5 * rng.uniform();
    let amp = power.sqrt() * (h.norm() - eps);
    let r_max = (1.0 + amp * amp / sigma2).log2();
    let r = r_max * rng.uniform();
    RobustInstance::new(h, g, power, sigma2, r, eps).unwrap()
}

/// Haar-ish random unitary from Gram-Schmidt on complex Gaussian columns.
pub fn random_unitary(rng: &mut RandomStream, n: usize) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
        for c in &cols {
            let ip: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= ip * y;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    cols
}

/// `U x` where `u` holds the columns of `U`.
pub fn apply(u: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|i| (0..n).map(|j| u[j][i] * x[j]).sum())
        .collect()
}

/// `min over unit φ of ‖a − e^{jφ} b‖`.
pub fn phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let ip: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let ph = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * ph).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
