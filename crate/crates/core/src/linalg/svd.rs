//! One-sided Jacobi SVD.
//!
//! Only singular values and right singular vectors are produced; that is all
//! the kernel computations and operator norms need.

use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector, ONE, ZERO};

const MAX_SWEEPS: usize = 80;

/// Singular values (descending) and the matching right singular vectors as
/// the columns of `v`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn new(a: &ComplexMatrix) -> Self {
        let (m, n) = a.shape();
        let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
        let mut v: Vec<Vec<Complex64>> = (0..n)
            .map(|j| {
                let mut e = vec![ZERO; n];
                e[j] = ONE;
                e
            })
            .collect();

        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                    let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                    let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, &b)| a.conj() * b).sum();
                    let g = gamma.norm();
                    if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = (gamma / g).conj();
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut cols, p, q, phase, c, s);
                    rotate(&mut v, p, q, phase, c, s);
                }
            }
            if !rotated {
                break;
            }
        }

        let mut order: Vec<(usize, f64)> = cols
            .iter()
            .enumerate()
            .map(|(j, col)| (j, col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
            .collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

        let mut vm = ComplexMatrix::zeros(n, n);
        for (dst, &(src, _)) in order.iter().enumerate() {
            for i in 0..n {
                vm[(i, dst)] = v[src][i];
            }
        }
        Self {
            singular_values: order.iter().map(|&(_, s)| s).collect(),
            v: vm,
        }
    }

    pub fn max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Right singular vectors whose singular value is `<= tol * σ_max`.
    pub fn kernel(&self, tol: f64) -> Vec<ComplexVector> {
        let cutoff = tol * self.max();
        self.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= cutoff)
            .map(|(j, _)| self.v.column(j))
            .collect()
    }
}

// columns p, q <- [p, e^{iφ} q] · [[c, s], [-s, c]]
fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, phase: Complex64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y * phase;
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    Svd::new(a).singular_values
}

/// Orthonormal basis of the numerical kernel of `m`: right singular vectors
/// with singular value `<= tol * σ_max`. A zero matrix has the whole space as
/// kernel.
pub fn nullspace(m: &ComplexMatrix, tol: f64) -> Vec<ComplexVector> {
    let svd = Svd::new(m);
    if svd.max() == 0.0 {
        return (0..m.cols()).map(|j| ComplexVector::basis(m.cols(), j)).collect();
    }
    svd.kernel(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, frobenius_norm, subspace_distance};

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(nullspace(&ComplexMatrix::identity(2), 1e-10).is_empty());
    }

    #[test]
    fn diagonal_kernel() {
        let k = nullspace(&ComplexMatrix::diag(&[ONE, ZERO]), 1e-10);
        assert_eq!(k.len(), 1);
        assert!(subspace_distance(&k, &[ComplexVector::basis(2, 1)], 2) < 1e-14);
    }

    #[test]
    fn zz_minus_identity_kernel() {
        let m = ComplexMatrix::diag(&[ZERO, c64(-2.0, 0.0), c64(-2.0, 0.0), ZERO]);
        let k = nullspace(&m, 1e-10);
        let expected = [ComplexVector::basis(4, 0), ComplexVector::basis(4, 3)];
        assert_eq!(k.len(), 2);
        assert!(subspace_distance(&k, &expected, 4) < 1e-14);
    }

    #[test]
    fn singular_values_of_complex_matrix() {
        // [[1, i], [i, 1]] = (1 + i X) has singular values |1 ± i| = √2.
        let m = ComplexMatrix::from_vec(2, 2, vec![ONE, c64(0.0, 1.0), c64(0.0, 1.0), ONE]).unwrap();
        let s = singular_values(&m);
        assert!((s[0] - 2f64.sqrt()).abs() < 1e-14 && (s[1] - 2f64.sqrt()).abs() < 1e-14);
        // [[1, 1], [0, 0]] has singular values √2, 0.
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        let svd = Svd::new(&m);
        assert!((svd.singular_values[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(svd.singular_values[1] < 1e-15);
        let k = svd.kernel(1e-10);
        assert_eq!(k.len(), 1);
        assert!(frobenius_norm(&crate::linalg::unvec(&m.mul_vec(&k[0]), 2, 1).unwrap()) < 1e-15);
    }

    #[test]
    fn tall_and_wide_inputs() {
        let tall = ComplexMatrix::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(nullspace(&tall, 1e-10).is_empty());
        let wide = tall.transpose();
        let k = nullspace(&wide, 1e-10);
        assert_eq!(k.len(), 1);
        assert!(wide.mul_vec(&k[0]).norm() < 1e-14);
    }
}
