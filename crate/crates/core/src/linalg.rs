//! Small dense complex helpers shared by the solver routes.

use crate::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `aᴴb`
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn scale(a: &[Complex64], c: Complex64) -> Vec<Complex64> {
    a.iter().map(|x| x * c).collect()
}

pub fn scale_real(a: &[Complex64], c: f64) -> Vec<Complex64> {
    a.iter().map(|x| x * c).collect()
}

/// `alpha·a + beta·b`
pub fn combine(alpha: Complex64, a: &[Complex64], beta: Complex64, b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
}

/// Orthonormal pair built from `first` and the component of `second`
/// orthogonal to it.
///
/// `second = c1·u1 + c2·u2` with `c2 = ‖residual‖ ≥ 0` real. When `second` is
/// collinear with `first` (or zero) `u2` is `None` and `c2 = 0`.
#[derive(Debug, Clone)]
pub struct Plane {
    pub u1: Vec<Complex64>,
    pub u2: Option<Vec<Complex64>>,
    pub c1: Complex64,
    pub c2: f64,
}

impl Plane {
    /// `first` must be nonzero.
    pub fn new(first: &[Complex64], second: &[Complex64]) -> Self {
        let n1 = norm(first);
        debug_assert!(n1 > 0.0);
        let u1 = scale_real(first, 1.0 / n1);
        let c1 = inner(&u1, second);
        let mut resid = combine(Complex64::new(1.0, 0.0), second, -c1, &u1);
        // one reorthogonalization pass keeps u1ᴴu2 at rounding level
        let corr = inner(&u1, &resid);
        for (r, u) in resid.iter_mut().zip(&u1) {
            *r -= corr * u;
        }
        let c1 = c1 + corr;
        let c2 = norm(&resid);
        let tiny = 1e-14 * norm(second).max(f64::MIN_POSITIVE);
        if c2 <= tiny {
            Self { u1, u2: None, c1, c2: 0.0 }
        } else {
            let u2 = scale_real(&resid, 1.0 / c2);
            Self { u1, u2: Some(u2), c1, c2 }
        }
    }

    /// Lift plane coordinates `(a, b)` back to the ambient space.
    pub fn lift(&self, a: Complex64, b: Complex64) -> Vec<Complex64> {
        match &self.u2 {
            Some(u2) => combine(a, &self.u1, b, u2),
            None => scale(&self.u1, a),
        }
    }
}

/// Hermitian 2×2 matrix `[[a, b], [conj(b), d]]`.
#[derive(Debug, Clone, Copy)]
pub struct Hermitian2 {
    pub a: f64,
    pub b: Complex64,
    pub d: f64,
}

impl Hermitian2 {
    /// Eigenvalues `(largest, smallest)` from the characteristic equation.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a + self.d);
        let half_diff = 0.5 * (self.a - self.d);
        let r = half_diff.hypot(self.b.norm());
        (mean + r, mean - r)
    }

    /// Unit eigenvector for the largest eigenvalue.
    pub fn top_eigenvector(&self) -> [Complex64; 2] {
        let (lmax, _) = self.eigenvalues();
        // two algebraically equivalent forms; keep the better conditioned one
        let v1 = [self.b, Complex64::new(lmax - self.a, 0.0)];
        let v2 = [Complex64::new(lmax - self.d, 0.0), self.b.conj()];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n == 0.0 {
            // scalar multiple of identity
            return [Complex64::new(1.0, 0.0), ZERO];
        }
        let s = 1.0 / n.sqrt();
        [v[0] * s, v[1] * s]
    }

    /// Solve `M x = rhs`; caller guarantees nonsingularity.
    pub fn solve(&self, rhs: [Complex64; 2]) -> [Complex64; 2] {
        let det = self.a * self.d - self.b.norm_sqr();
        let x0 = (rhs[0] * self.d - self.b * rhs[1]) / det;
        let x1 = (rhs[1] * self.a - self.b.conj() * rhs[0]) / det;
        [x0, x1]
    }
}
