//! Quantum operations in Kraus form, `Φ(X) = Σ A_i X A_i†`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius_norm, kron, vec, ComplexMatrix, ComplexVector, Svd};

/// Default tolerance for the trace-preserving and unital residuals.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-10;

/// Tolerance used by [`DensityMatrix::new`] for Hermiticity, trace and
/// positivity.
pub const DENSITY_TOL: f64 = 1e-10;

/// Outcome of checking the trace-preserving (`Σ A†A = I`) and unital
/// (`Σ AA† = I`) conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub trace_preserving: bool,
    /// `‖Σ A_i† A_i − I‖`
    pub trace_preserving_residual: f64,
    pub unital: bool,
    /// `‖Σ A_i A_i† − I‖`
    pub unital_residual: f64,
    pub bistochastic: bool,
    /// Number of linearly independent Kraus operators.
    pub effective_count: usize,
    pub tol: f64,
}

/// An ordered, non-empty list of `N×N` Kraus operators.
///
/// The validation report at [`DEFAULT_VALIDATION_TOL`] is computed once at
/// construction and cached; analysis routines that need a bistochastic
/// channel consult it through [`KrausSet::require_bistochastic`].
#[derive(Debug, Clone)]
pub struct KrausSet {
    label: String,
    dim: usize,
    operators: Vec<ComplexMatrix>,
    report: ValidationReport,
}

impl KrausSet {
    pub fn new(label: impl Into<String>, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidParameter("a Kraus set needs at least one operator".into()))?;
        if !first.is_square() || first.rows() == 0 {
            return Err(Error::NotSquare {
                op: "KrausSet::new",
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let dim = first.rows();
        for a in &operators {
            if a.shape() != (dim, dim) {
                return Err(Error::ShapeMismatch {
                    op: "KrausSet::new",
                    left: (dim, dim),
                    right: a.shape(),
                });
            }
        }
        let mut set = Self {
            label: label.into(),
            dim,
            operators,
            report: ValidationReport {
                trace_preserving: false,
                trace_preserving_residual: f64::INFINITY,
                unital: false,
                unital_residual: f64::INFINITY,
                bistochastic: false,
                effective_count: 0,
                tol: DEFAULT_VALIDATION_TOL,
            },
        };
        set.report = set.validate(DEFAULT_VALIDATION_TOL);
        Ok(set)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// The cached report at the default tolerance.
    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn is_bistochastic(&self) -> bool {
        self.report.bistochastic
    }

    pub fn require_bistochastic(&self) -> Result<()> {
        if self.report.bistochastic {
            Ok(())
        } else {
            Err(Error::NotBistochastic {
                tp_residual: self.report.trace_preserving_residual,
                unital_residual: self.report.unital_residual,
            })
        }
    }

    /// Checks the trace-preserving and unital conditions at `tol`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let id = ComplexMatrix::identity(self.dim);
        let mut ada = ComplexMatrix::zeros(self.dim, self.dim);
        let mut aad = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.operators {
            let ad = a.adjoint();
            ada = &ada + &(&ad * a);
            aad = &aad + &(a * &ad);
        }
        let tp = frobenius_norm(&(&ada - &id));
        let un = frobenius_norm(&(&aad - &id));
        let vecs: Vec<ComplexVector> = self.operators.iter().map(vec).collect();
        let effective_count = linalg::gram_schmidt(&vecs, 1e-12 * vecs.iter().map(ComplexVector::norm).fold(0.0, f64::max)).len();
        ValidationReport {
            trace_preserving: tp <= tol,
            trace_preserving_residual: tp,
            unital: un <= tol,
            unital_residual: un,
            bistochastic: tp <= tol && un <= tol,
            effective_count,
            tol,
        }
    }

    fn check_dim(&self, op: &'static str, x: &ComplexMatrix) -> Result<()> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::ShapeMismatch {
                op,
                left: (self.dim, self.dim),
                right: x.shape(),
            });
        }
        Ok(())
    }

    /// `Φ(X) = Σ A_i X A_i†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim("apply", x)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.operators {
            out = &out + &(&(a * x) * &a.adjoint());
        }
        Ok(out)
    }

    /// `Φ†(X) = Σ A_i† X A_i`, the adjoint under the Hilbert–Schmidt inner product.
    pub fn apply_adjoint(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim("apply_adjoint", x)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.operators {
            out = &out + &(&(&a.adjoint() * x) * a);
        }
        Ok(out)
    }

    /// The `N²×N²` matrix `Σ conj(A_i) ⊗ A_i` acting on column-stacked operators.
    pub fn superoperator(&self) -> Superoperator {
        let n2 = self.dim * self.dim;
        let mut m = ComplexMatrix::zeros(n2, n2);
        for a in &self.operators {
            m = &m + &kron(&a.conj(), a);
        }
        Superoperator {
            dim: self.dim,
            matrix: m,
        }
    }

    /// `sup ‖Φ(X)‖ / ‖X‖` under the Frobenius norm, i.e. the largest singular
    /// value of the superoperator matrix.
    pub fn operator_norm(&self) -> f64 {
        Svd::new(self.superoperator().matrix()).max()
    }

    /// The channel `X ↦ Σ (V A_i V†) X (V A_i V†)†`.
    pub fn conjugated_by(&self, v: &ComplexMatrix) -> Result<Self> {
        self.check_dim("conjugated_by", v)?;
        let vd = v.adjoint();
        let ops = self.operators.iter().map(|a| &(v * a) * &vd).collect();
        Self::new(self.label.clone(), ops)
    }
}

/// Matrix of a superoperator in the column-stacking convention, so that
/// `matrix · vec(X) = vec(Φ(X))`.
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub const CONVENTION: &'static str = "column-stacking";

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::ShapeMismatch {
                op: "Superoperator::apply",
                left: (self.dim, self.dim),
                right: x.shape(),
            });
        }
        linalg::unvec(&self.matrix.mul_vec(&vec(x)), self.dim, self.dim)
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`. Violations are reported, never repaired.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidDensity(format!(
                "expected a non-empty square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(DENSITY_TOL) {
            return Err(Error::InvalidDensity("matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let min_eig = min_hermitian_eigenvalue(&matrix)?;
        if min_eig < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "matrix is not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix already known to be a state, e.g. the image of a state
    /// under a bistochastic channel.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `I / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        if (psi.norm() - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "state vector has norm {}, expected 1",
                psi.norm()
            )));
        }
        Ok(Self {
            matrix: psi.outer(psi),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Frobenius distance to another state.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        linalg::frobenius_distance(&self.matrix, &other.matrix)
    }
}

pub(crate) fn min_hermitian_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let (vals, _) = linalg::eig(m)?;
    Ok(vals.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, frobenius_inner};
    use approx::assert_abs_diff_eq;

    fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn phase_flip(p: f64) -> KrausSet {
        let i2 = ComplexMatrix::identity(2);
        KrausSet::new("phase_flip", vec![i2.scale_real(p.sqrt()), z().scale_real((1.0 - p).sqrt())]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(phase_flip(0.75).validate(1e-10).bistochastic);

        let half = KrausSet::new("half", vec![ComplexMatrix::identity(2).scale_real(0.5)]).unwrap();
        let r = half.validate(1e-10);
        assert!(!r.trace_preserving && !r.bistochastic);
        assert_abs_diff_eq!(r.trace_preserving_residual, 0.75 * 2f64.sqrt(), epsilon = 1e-15);

        let g = 0.5f64.sqrt();
        let damping = KrausSet::new(
            "amplitude_damping",
            vec![
                ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, g]).unwrap(),
                ComplexMatrix::from_real(2, 2, &[0.0, g, 0.0, 0.0]).unwrap(),
            ],
        )
        .unwrap();
        let r = damping.validate(1e-10);
        assert!(r.trace_preserving);
        assert!(!r.unital);
        assert!(!r.bistochastic);
        // Σ AA† = diag(1.5, 0.5)
        assert_abs_diff_eq!(r.unital_residual, 0.5 * 2f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(damping.require_bistochastic(), Err(Error::NotBistochastic { .. })));
    }

    #[test]
    fn effective_count_detects_redundancy() {
        let i2 = ComplexMatrix::identity(2).scale_real(0.5f64.sqrt());
        let k = KrausSet::new("dup", vec![i2.clone(), i2]).unwrap();
        assert_eq!(k.report().effective_count, 1);
        assert!(k.is_bistochastic());
    }

    #[test]
    fn construction_errors() {
        assert!(KrausSet::new("empty", vec![]).is_err());
        assert!(KrausSet::new("rect", vec![ComplexMatrix::zeros(2, 3)]).is_err());
        assert!(KrausSet::new(
            "mixed",
            vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]
        )
        .is_err());
    }

    #[test]
    fn apply_examples() {
        let k = phase_flip(0.75);
        let out = k.apply(&ComplexMatrix::identity(2)).unwrap();
        assert!(linalg::frobenius_distance(&out, &ComplexMatrix::identity(2)) < 1e-15);
        let plus = ComplexMatrix::from_real(2, 2, &[0.5; 4]).unwrap();
        let out = k.apply(&plus).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.5, 0.25, 0.25, 0.5]).unwrap();
        assert!(linalg::frobenius_distance(&out, &expected) < 1e-15);

        let id = KrausSet::new("id", vec![ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(id.apply(&plus).unwrap(), plus);
        assert!(id.apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let zc = KrausSet::new("z", vec![z()]).unwrap();
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(zc.apply_adjoint(&x).unwrap(), expected);
        let k = phase_flip(0.3);
        let out = k.apply_adjoint(&ComplexMatrix::identity(2)).unwrap();
        assert!(linalg::frobenius_distance(&out, &ComplexMatrix::identity(2)) < 1e-15);
        assert!(k.apply_adjoint(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn superoperator_examples() {
        let id = KrausSet::new("id", vec![ComplexMatrix::identity(2)]).unwrap();
        assert_eq!(*id.superoperator().matrix(), ComplexMatrix::identity(4));
        let zc = KrausSet::new("z", vec![z()]).unwrap();
        let one = c64(1.0, 0.0);
        assert_eq!(*zc.superoperator().matrix(), ComplexMatrix::diag(&[one, -one, -one, one]));
        let p = 0.75;
        let s = phase_flip(p).superoperator();
        let q = c64(2.0 * p - 1.0, 0.0);
        assert!(linalg::frobenius_distance(s.matrix(), &ComplexMatrix::diag(&[one, q, q, one])) < 1e-15);
    }

    #[test]
    fn operator_norm_examples() {
        assert_abs_diff_eq!(phase_flip(0.75).operator_norm(), 1.0, epsilon = 1e-12);
        let half = KrausSet::new("half", vec![ComplexMatrix::identity(2).scale_real(0.5)]).unwrap();
        assert_abs_diff_eq!(half.operator_norm(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(phase_flip(0.5).operator_norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn adjoint_pairing_on_fixed_pair() {
        let k = phase_flip(0.3);
        let zm = ComplexMatrix::from_vec(2, 2, vec![c64(1.0, 2.0), c64(0.5, -1.0), c64(0.0, 3.0), c64(-2.0, 0.0)]).unwrap();
        let y = ComplexMatrix::from_vec(2, 2, vec![c64(0.1, 0.0), c64(1.5, 1.0), c64(-0.7, 0.2), c64(0.0, 1.0)]).unwrap();
        let lhs = frobenius_inner(&k.apply_adjoint(&zm).unwrap(), &y).unwrap();
        let rhs = frobenius_inner(&zm, &k.apply(&y).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap()).is_ok());
        // trace 2
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        // not Hermitian
        assert!(DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.0, 0.5]).unwrap()).is_err());
        // negative eigenvalue: diag(1.5, -0.5)
        assert!(DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap()).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
        let mm = DensityMatrix::maximally_mixed(3);
        assert!(DensityMatrix::new(mm.matrix().clone()).is_ok());
        assert!(DensityMatrix::pure(&ComplexVector::basis(2, 0)).is_ok());
        assert!(DensityMatrix::pure(&ComplexVector::zeros(2)).is_err());
    }
}
