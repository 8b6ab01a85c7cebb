//! Complex Schur decomposition: Householder reduction to Hessenberg form,
//! then single-shift QR sweeps with Wilkinson shifts and deflation.

use num_complex::Complex64;

use super::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// `M = Q T Q†` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

impl Schur {
    /// Diagonal of `T`, in the order the iteration deflated them.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.q * &self.t) * &self.q.adjoint()
    }
}

/// Eigenvalues (with algebraic multiplicity) and the unitary Schur basis.
pub fn eig(m: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let s = schur(m)?;
    Ok((s.eigenvalues(), s.q))
}

pub fn schur(m: &ComplexMatrix) -> Result<Schur> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "schur",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    if n == 0 {
        return Ok(Schur { q, t: h });
    }
    hessenberg(&mut h, &mut q);
    qr_iterate(&mut h, &mut q)?;
    Ok(Schur { q, t: h })
}

fn hessenberg(h: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 { ONE } else { v[0] / v[0].norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;

        // H <- P H
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)])
                .sum();
            let s = s * beta;
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * s;
            }
        }
        // H <- H P, Q <- Q P
        for mat in [&mut *h, &mut *q] {
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| mat[(i, k + 1 + r)] * vr)
                    .sum();
                let s = s * beta;
                for (r, vr) in v.iter().enumerate() {
                    mat[(i, k + 1 + r)] -= s * vr.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, y.conj() / y.norm());
    }
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let mu1 = half_tr + disc;
    let mu2 = half_tr - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn qr_iterate(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let max_total = 100 * n.max(1);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    while hi > 0 {
        // Locate the top of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > max_total {
            return Err(Error::NoConvergence {
                iterations: total - 1,
                residual: h[(hi, hi - 1)].norm(),
            });
        }

        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + h[(hi, hi - 1)].re.abs() * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        rots.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = ZERO;
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            for i in 0..=(k + 1) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + s.conj() * y;
                h[(i, k + 1)] = -s * x + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + s.conj() * y;
                q[(i, k + 1)] = -s * x + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(())
}
