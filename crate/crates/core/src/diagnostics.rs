//! The full structural check of a bistochastic channel, as run by `qmc check`.
//!
//! Every item is a property that holds for all bistochastic channels, so a
//! failure points at a numerical problem or a mis-specified channel:
//!
//! * the superoperator has operator norm 1, spectral radius 1, and 1 is an
//!   eigenvalue;
//! * no Jordan chains on the unit circle;
//! * `E(1)` is orthogonal to every other peripheral eigenspace and every
//!   interior generalized eigenspace;
//! * the numerical kernel of `Φ − I` and the joint commutant of the Kraus
//!   operators span the same space;
//! * when the channel is `{√(1−p) I} ∪ rest` with `Σ_rest AA† = pI`, the only
//!   peripheral eigenvalue is 1.
//!
//! The intertwiner test `{X : X A_i = λ A_i X}` is reported at every
//! peripheral `λ`, but only its `λ = 1` case counts towards `passed`.

use num_complex::Complex64;

use crate::catalog::{identity_mixture_check, IdentityMixture};
use crate::channel::KrausSet;
use crate::error::Result;
use crate::limits::{classify_spectrum, Category};
use crate::linalg::c64;
use crate::spectral::{
    intertwiner_eigenspace, fixed_space_commutant, matrix_subspace_distance, spectrum, JordanDiagnostic,
    OrthogonalityReport, SpectralData, Tolerances,
};

/// Bound for `|‖Φ‖ − 1|`, `max|λ| − 1` and the distance from 1 to the spectrum.
pub const NORM_TOL: f64 = 1e-9;
/// Relative rank tolerance of the Jordan-chain test.
pub const JORDAN_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCheck {
    pub operator_norm: f64,
    pub max_modulus: f64,
    pub distance_to_one: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntertwinerCheck {
    pub lambda: Complex64,
    pub candidate_dim: usize,
    pub numerical_dim: usize,
    pub distance: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedSpaceCheck {
    pub kernel_dim: usize,
    pub commutant_dim: usize,
    pub distance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityMixtureCheck {
    pub result: IdentityMixture,
    /// `None` when the hypothesis does not apply.
    pub only_one_peripheral: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub label: String,
    pub dim: usize,
    pub category: Category,
    pub peripheral: Vec<(Complex64, usize)>,
    pub g1: usize,
    pub norm: NormCheck,
    pub jordan: Vec<JordanDiagnostic>,
    pub orthogonality: OrthogonalityReport,
    pub fixed_space: FixedSpaceCheck,
    pub intertwiners: Vec<IntertwinerCheck>,
    pub identity_mixture: IdentityMixtureCheck,
    pub spectral: SpectralData,
}

impl Diagnostics {
    pub fn jordan_passed(&self) -> bool {
        self.jordan.iter().all(|j| j.diagonalizable_at_lambda)
    }

    pub fn intertwiner_at_one(&self) -> Option<&IntertwinerCheck> {
        self.intertwiners.iter().find(|c| (c.lambda - c64(1.0, 0.0)).norm() < 1e-12)
    }

    pub fn passed(&self) -> bool {
        self.norm.passed
            && self.jordan_passed()
            && self.orthogonality.passed
            && self.fixed_space.passed
            && self.intertwiner_at_one().is_some_and(|c| c.agrees)
            && self.identity_mixture.only_one_peripheral != Some(false)
    }
}

pub fn run_diagnostics(k: &KrausSet, tol: &Tolerances) -> Result<Diagnostics> {
    let sd = spectrum(k, tol)?;

    let operator_norm = k.operator_norm();
    let max_modulus = sd.max_modulus();
    let distance_to_one = sd.distance_to_one();
    let norm = NormCheck {
        operator_norm,
        max_modulus,
        distance_to_one,
        passed: (operator_norm - 1.0).abs() <= NORM_TOL
            && max_modulus <= 1.0 + NORM_TOL
            && distance_to_one <= NORM_TOL,
    };

    let peripheral: Vec<(Complex64, usize)> = sd.peripheral().map(|c| (c.value, c.multiplicity)).collect();

    let mut loose = sd.clone();
    loose.tolerances = tol.with_rank(JORDAN_RANK_TOL.max(tol.rank));
    let jordan = peripheral
        .iter()
        .map(|&(lambda, _)| loose.jordan(lambda))
        .collect::<Result<Vec<_>>>()?;

    let orthogonality = sd.orthogonality()?;

    let commutant = fixed_space_commutant(k, tol)?;
    let distance = matrix_subspace_distance(&commutant, &sd.fixed_space_basis);
    let fixed_space = FixedSpaceCheck {
        kernel_dim: sd.fixed_space_basis.len(),
        commutant_dim: commutant.len(),
        distance,
        passed: distance <= tol.subspace,
    };

    // λ = 1 first, whatever the cluster mean says.
    let mut lambdas = vec![c64(1.0, 0.0)];
    lambdas.extend(
        peripheral
            .iter()
            .map(|p| p.0)
            .filter(|l| (l - c64(1.0, 0.0)).norm() > tol.cluster),
    );
    let intertwiners = lambdas
        .into_iter()
        .map(|lambda| {
            intertwiner_eigenspace(k, lambda, tol).map(|r| IntertwinerCheck {
                lambda,
                candidate_dim: r.basis.len(),
                numerical_dim: r.numerical.len(),
                distance: r.distance,
                agrees: r.agrees_with_numerical,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let im = identity_mixture_check(k);
    let identity_mixture = IdentityMixtureCheck {
        result: im,
        only_one_peripheral: im.applies.then_some(peripheral.len() == 1),
    };

    let class = classify_spectrum(sd);
    Ok(Diagnostics {
        label: k.label().to_string(),
        dim: k.dim(),
        category: class.category,
        g1: class.g1,
        peripheral,
        norm,
        jordan,
        orthogonality,
        fixed_space,
        intertwiners,
        identity_mixture,
        spectral: class.evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_passes() {
        let tol = Tolerances::default();
        for e in catalog::standard_entries() {
            let d = run_diagnostics(&e.channel, &tol).unwrap();
            assert!(d.passed(), "{}: {d:#?}", e.name);
        }
    }

    #[test]
    fn z_conjugation_intertwiner_at_minus_one() {
        let d = run_diagnostics(&catalog::make_z_conjugation().unwrap(), &Tolerances::default()).unwrap();
        assert_eq!(d.intertwiners.len(), 2);
        let minus = &d.intertwiners[1];
        assert!((minus.lambda + c64(1.0, 0.0)).norm() < 1e-10);
        assert!(minus.agrees && minus.candidate_dim == 2);
    }
}
