use nalgebra::DMatrix;

use crate::model::Beamformer;
use crate::{Complex64, Error, Result};

/// `w wᴴ` as a dense matrix.
pub fn outer_product(w: &Beamformer) -> DMatrix<Complex64> {
    let v = w.entries();
    DMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// Principal eigenpair of a Hermitian PSD matrix as a beamformer `√λ₁·v₁`,
/// together with the rank-one defect `λ₂/λ₁`.
pub fn extract_beamformer(w_mat: &DMatrix<Complex64>) -> Result<(Beamformer, f64)> {
    assert!(w_mat.is_square(), "extract_beamformer needs a square matrix");
    let eig = w_mat.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = order[0];
    let l1 = eig.eigenvalues[top];
    if !(l1 > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let l2 = order.get(1).map_or(0.0, |&i| eig.eigenvalues[i].max(0.0));
    let s = l1.sqrt();
    let w = eig.eigenvectors.column(top).iter().map(|z| z * s).collect();
    Ok((Beamformer::new(w)?, l2 / l1))
}
