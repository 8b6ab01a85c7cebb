//! Spectrum of a bistochastic channel's superoperator and the structure of
//! its eigenspaces.
//!
//! The fixed-point space `E(1) = ker(Φ − I)` is computed twice, by two
//! independent routes: as the numerical kernel of the superoperator matrix
//! minus the identity, and as the joint commutant `{X : X A_i = A_i X}` of
//! the Kraus operators. For a bistochastic channel the two agree.
//!
//! Jordan structure is never computed directly. Instead, the absence of
//! Jordan chains at `λ` is detected by comparing `dim ker(Φ − λI)` with
//! `dim ker((Φ − λI)²)`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::KrausSet;
use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, frobenius_inner, gram_schmidt, kron, nullspace, subspace_distance, unvec, vec, ComplexMatrix,
    ComplexVector,
};

/// Numerical thresholds used by the spectral analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative rank tolerance: singular values `<= rank * σ_max` count as zero.
    pub rank: f64,
    /// Eigenvalues with `|λ| >= 1 − peripheral` lie on the unit circle.
    pub peripheral: f64,
    /// Eigenvalues closer than this are grouped into one cluster.
    pub cluster: f64,
    /// Bound for subspace distances and overlaps to count as agreement.
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            peripheral: 1e-8,
            cluster: 1e-7,
            subspace: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn with_rank(self, rank: f64) -> Self {
        Self { rank, ..self }
    }
}

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCluster {
    /// Mean of the members; projected onto the unit circle when peripheral.
    pub value: Complex64,
    /// Number of members, i.e. the algebraic multiplicity.
    pub multiplicity: usize,
    pub peripheral: bool,
}

/// Spectral summary of a bistochastic channel.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// All `N²` eigenvalues with multiplicity, ordered by [`spectral_order`].
    pub eigenvalues: Vec<Complex64>,
    /// Clusters, in the same order.
    pub clusters: Vec<EigenCluster>,
    /// Orthonormal basis `Z_1 … Z_g(1)` of `ker(Φ − I)`.
    pub fixed_space_basis: Vec<ComplexMatrix>,
    pub tolerances: Tolerances,
    dim: usize,
    superop: ComplexMatrix,
}

impl SpectralData {
    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superop
    }

    /// The peripheral clusters `Λ₁`.
    pub fn peripheral(&self) -> impl Iterator<Item = &EigenCluster> {
        self.clusters.iter().filter(|c| c.peripheral)
    }

    /// Number of distinct peripheral eigenvalues `|Λ₁|`.
    pub fn peripheral_count(&self) -> usize {
        self.peripheral().count()
    }

    /// `g(1) = dim ker(Φ − I)`.
    pub fn g1(&self) -> usize {
        self.fixed_space_basis.len()
    }

    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Distance from 1 to the nearest eigenvalue.
    pub fn distance_to_one(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| (z - c64(1.0, 0.0)).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Peripheral cluster values other than 1.
    pub fn peripheral_except_one(&self) -> Vec<Complex64> {
        self.peripheral()
            .filter(|c| !is_one(c.value, self.tolerances.cluster))
            .map(|c| c.value)
            .collect()
    }

    /// The cluster containing the eigenvalue nearest to `lambda`, if that
    /// eigenvalue is within `within`.
    pub fn cluster_near(&self, lambda: Complex64, within: f64) -> Option<&EigenCluster> {
        let nearest = self
            .eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| (a - lambda).norm().total_cmp(&(b - lambda).norm()))?;
        if (nearest - lambda).norm() > within {
            return None;
        }
        self.clusters
            .iter()
            .min_by(|a, b| (a.value - nearest).norm().total_cmp(&(b.value - nearest).norm()))
    }

    /// Orthonormal basis (as vectors of length `N²`) of `ker(Φ − λI)`.
    pub fn eigenspace(&self, lambda: Complex64) -> Vec<ComplexVector> {
        kernel_basis(&self.superop.shift_diagonal(lambda), self.tolerances.rank)
    }

    /// Orthonormal basis of the generalized eigenspace of a cluster:
    /// `ker((Φ − αI)^k)` for the smallest `k <= m(α)` reaching dimension
    /// `m(α)`.
    pub fn invariant_subspace(&self, cluster: &EigenCluster) -> Result<Vec<ComplexVector>> {
        let shifted = self.superop.shift_diagonal(cluster.value);
        let mut power = shifted.clone();
        let mut basis = kernel_basis(&power, self.tolerances.rank);
        for _ in 1..cluster.multiplicity {
            if basis.len() >= cluster.multiplicity {
                break;
            }
            power = power.checked_mul(&shifted)?;
            basis = kernel_basis(&power, self.tolerances.rank);
        }
        Ok(basis)
    }

    /// Jordan-structure diagnostic at the cluster nearest `lambda`.
    pub fn jordan(&self, lambda: Complex64) -> Result<JordanDiagnostic> {
        let cluster = *self
            .cluster_near(lambda, JORDAN_MATCH_TOL)
            .ok_or(Error::NotInSpectrum(lambda))?;
        let shifted = self.superop.shift_diagonal(cluster.value);
        let g = kernel_basis(&shifted, self.tolerances.rank).len();
        let g2 = kernel_basis(&shifted.checked_mul(&shifted)?, self.tolerances.rank).len();
        Ok(JordanDiagnostic {
            lambda: cluster.value,
            m: cluster.multiplicity,
            g,
            g2,
            diagonalizable_at_lambda: g == g2,
        })
    }

    /// Overlaps between `E(1)` and every other peripheral eigenspace and
    /// every interior generalized eigenspace.
    pub fn orthogonality(&self) -> Result<OrthogonalityReport> {
        let fixed: Vec<ComplexVector> = self.fixed_space_basis.iter().map(vec).collect();
        let mut entries = Vec::new();
        for cluster in &self.clusters {
            if cluster.peripheral && is_one(cluster.value, self.tolerances.cluster) {
                continue;
            }
            let other = if cluster.peripheral {
                self.eigenspace(cluster.value)
            } else {
                self.invariant_subspace(cluster)?
            };
            let max_overlap = fixed
                .iter()
                .flat_map(|z| other.iter().map(move |y| z.inner(y).norm()))
                .fold(0.0, f64::max);
            entries.push(OverlapEntry {
                lambda: cluster.value,
                peripheral: cluster.peripheral,
                subspace_dim: other.len(),
                max_overlap,
            });
        }
        let max_overlap = entries.iter().map(|e| e.max_overlap).fold(0.0, f64::max);
        Ok(OrthogonalityReport {
            entries,
            max_overlap,
            passed: max_overlap <= self.tolerances.subspace,
        })
    }
}

/// Eigenvalues supplied to [`SpectralData::jordan`] must be this close to a
/// computed eigenvalue.
pub const JORDAN_MATCH_TOL: f64 = 1e-6;

/// Algebraic and geometric multiplicity data at one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanDiagnostic {
    pub lambda: Complex64,
    /// Algebraic multiplicity (cluster size).
    pub m: usize,
    /// `dim ker(Φ − λI)`
    pub g: usize,
    /// `dim ker((Φ − λI)²)`
    pub g2: usize,
    /// No Jordan chains at `λ`, i.e. `g == g2`.
    pub diagonalizable_at_lambda: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEntry {
    pub lambda: Complex64,
    pub peripheral: bool,
    pub subspace_dim: usize,
    /// `max |⟨Z, Y⟩|` over the two orthonormal bases.
    pub max_overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub entries: Vec<OverlapEntry>,
    pub max_overlap: f64,
    pub passed: bool,
}

/// Result of testing the candidate eigenspace `{X : X A_i = λ A_i X ∀i}`
/// against the numerical eigenspace `ker(Φ − λI)`.
#[derive(Debug, Clone)]
pub struct IntertwinerReport {
    pub lambda: Complex64,
    /// Orthonormal basis of the candidate space.
    pub basis: Vec<ComplexMatrix>,
    /// Orthonormal basis of `ker(Φ − λI)`.
    pub numerical: Vec<ComplexMatrix>,
    /// Frobenius distance between the two orthogonal projectors.
    pub distance: f64,
    pub agrees_with_numerical: bool,
}

/// Ordering used for every list of eigenvalues: modulus descending, then
/// phase in `(−π, π]` ascending.
pub fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| phase(*a).total_cmp(&phase(*b)))
}

/// Argument in `(−π, π]`.
pub fn phase(z: Complex64) -> f64 {
    let p = z.im.atan2(z.re);
    if p <= -PI {
        PI
    } else {
        p
    }
}

fn is_one(z: Complex64, tol: f64) -> bool {
    (z - c64(1.0, 0.0)).norm() <= tol
}

fn kernel_basis(m: &ComplexMatrix, rank_tol: f64) -> Vec<ComplexVector> {
    gram_schmidt(&nullspace(m, rank_tol), 1e-12)
}

/// Groups eigenvalues by single linkage at distance `tol`.
pub fn cluster_eigenvalues(values: &[Complex64], tol: f64, peripheral_tol: f64) -> Vec<EigenCluster> {
    let mut sorted = values.to_vec();
    sorted.sort_by(spectral_order);
    let n = sorted.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (sorted[i] - sorted[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(sorted[i]),
            None => groups.push((root, vec![sorted[i]])),
        }
    }
    let mut clusters: Vec<EigenCluster> = groups
        .into_iter()
        .map(|(_, members)| {
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            let peripheral = mean.norm() >= 1.0 - peripheral_tol;
            EigenCluster {
                value: if peripheral && mean.norm() > 0.0 { mean / mean.norm() } else { mean },
                multiplicity: members.len(),
                peripheral,
            }
        })
        .collect();
    clusters.sort_by(|a, b| spectral_order(&a.value, &b.value));
    clusters
}

/// Spectrum, peripheral clusters and fixed-point basis of a bistochastic
/// channel.
pub fn spectrum(k: &KrausSet, tol: &Tolerances) -> Result<SpectralData> {
    k.require_bistochastic()?;
    let superop = k.superoperator().into_matrix();
    let (mut eigenvalues, _) = linalg::eig(&superop)?;
    eigenvalues.sort_by(spectral_order);
    let clusters = cluster_eigenvalues(&eigenvalues, tol.cluster, tol.peripheral);
    let n = k.dim();
    let fixed_space_basis = kernel_basis(&superop.shift_diagonal(c64(1.0, 0.0)), tol.rank)
        .iter()
        .map(|v| unvec(v, n, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralData {
        eigenvalues,
        clusters,
        fixed_space_basis,
        tolerances: *tol,
        dim: n,
        superop,
    })
}

/// Stacks `Aᵀ ⊗ I − λ (I ⊗ A)` over all Kraus operators; its kernel is
/// `{X : X A = λ A X for every A}`.
fn intertwiner_system(k: &KrausSet, lambda: Complex64) -> ComplexMatrix {
    let n = k.dim();
    let n2 = n * n;
    let id = ComplexMatrix::identity(n);
    let mut stacked = ComplexMatrix::zeros(n2 * k.operators().len(), n2);
    for (b, a) in k.operators().iter().enumerate() {
        let block = &kron(&a.transpose(), &id) - &kron(&id, a).scale(lambda);
        for i in 0..n2 {
            for j in 0..n2 {
                stacked[(b * n2 + i, j)] = block[(i, j)];
            }
        }
    }
    stacked
}

fn as_matrices(basis: &[ComplexVector], n: usize) -> Result<Vec<ComplexMatrix>> {
    basis.iter().map(|v| unvec(v, n, n)).collect()
}

/// Orthonormal basis of the joint commutant `{X : X A_i = A_i X ∀i}`, which
/// equals `ker(Φ − I)` for a bistochastic channel.
pub fn fixed_space_commutant(k: &KrausSet, tol: &Tolerances) -> Result<Vec<ComplexMatrix>> {
    k.require_bistochastic()?;
    let basis = kernel_basis(&intertwiner_system(k, c64(1.0, 0.0)), tol.rank);
    as_matrices(&basis, k.dim())
}

/// Compares `{X : X A_i = λ A_i X ∀i}` with `ker(Φ − λI)` for a `λ` on the
/// unit circle.
///
/// For `λ = 1` the two spaces provably coincide. For other `λ` this is only
/// a hypothesis, and the report says whether it held for this channel.
pub fn intertwiner_eigenspace(k: &KrausSet, lambda: Complex64, tol: &Tolerances) -> Result<IntertwinerReport> {
    k.require_bistochastic()?;
    if (lambda.norm() - 1.0).abs() > tol.peripheral {
        return Err(Error::NotPeripheral(lambda));
    }
    let n = k.dim();
    let candidate = kernel_basis(&intertwiner_system(k, lambda), tol.rank);
    let superop = k.superoperator().into_matrix();
    let numerical = kernel_basis(&superop.shift_diagonal(lambda), tol.rank);
    let distance = subspace_distance(&candidate, &numerical, n * n);
    Ok(IntertwinerReport {
        lambda,
        basis: as_matrices(&candidate, n)?,
        numerical: as_matrices(&numerical, n)?,
        distance,
        agrees_with_numerical: distance <= tol.subspace,
    })
}

pub fn jordan_diagnostic(k: &KrausSet, lambda: Complex64, tol: &Tolerances) -> Result<JordanDiagnostic> {
    spectrum(k, tol)?.jordan(lambda)
}

pub fn orthogonality_check(k: &KrausSet, tol: &Tolerances) -> Result<OrthogonalityReport> {
    spectrum(k, tol)?.orthogonality()
}

/// Projector distance between two orthonormal sets of `N×N` matrices.
pub fn matrix_subspace_distance(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    let dim = a.iter().chain(b).next().map_or(0, |m| m.rows() * m.cols());
    let va: Vec<ComplexVector> = a.iter().map(vec).collect();
    let vb: Vec<ComplexVector> = b.iter().map(vec).collect();
    subspace_distance(&va, &vb, dim)
}

/// `max |⟨X, Y⟩ − δ_XY|` over an orthonormal set.
pub fn orthonormality_defect(basis: &[ComplexMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let ip = frobenius_inner(x, y).expect("basis elements share a shape");
            worst = worst.max((ip - c64(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli(name: char) -> ComplexMatrix {
        let (o, z, i) = (c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0));
        let e = match name {
            'i' => [o, z, z, o],
            'x' => [z, o, o, z],
            'y' => [z, -i, i, z],
            'z' => [o, z, z, -o],
            _ => unreachable!(),
        };
        ComplexMatrix::from_vec(2, 2, e.to_vec()).unwrap()
    }

    fn mix(label: &str, terms: &[(f64, char)]) -> KrausSet {
        KrausSet::new(label, terms.iter().map(|&(w, p)| pauli(p).scale_real(w.sqrt())).collect()).unwrap()
    }

    fn phase_flip() -> KrausSet {
        mix("phase_flip", &[(0.75, 'i'), (0.25, 'z')])
    }

    fn z_conj() -> KrausSet {
        mix("z", &[(1.0, 'z')])
    }

    fn depolarizing() -> KrausSet {
        let p = 0.5;
        mix("depolarizing", &[(1.0 - p, 'i'), (p / 3.0, 'x'), (p / 3.0, 'y'), (p / 3.0, 'z')])
    }

    fn close(a: Complex64, re: f64, im: f64) -> bool {
        (a - c64(re, im)).norm() < 1e-10
    }

    #[test]
    fn phase_flip_spectrum() {
        let s = spectrum(&phase_flip(), &Tolerances::default()).unwrap();
        let ev = &s.eigenvalues;
        assert!(close(ev[0], 1.0, 0.0) && close(ev[1], 1.0, 0.0));
        assert!(close(ev[2], 0.5, 0.0) && close(ev[3], 0.5, 0.0));
        assert_eq!(s.peripheral_count(), 1);
        assert_eq!(s.clusters[0].multiplicity, 2);
        assert_eq!(s.g1(), 2);
        let x1 = ComplexMatrix::diag(&[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let x2 = ComplexMatrix::diag(&[c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert!(matrix_subspace_distance(&s.fixed_space_basis, &[x1, x2]) < 1e-10);
        assert!(orthonormality_defect(&s.fixed_space_basis) < 1e-12);
    }

    #[test]
    fn z_conjugation_spectrum() {
        let s = spectrum(&z_conj(), &Tolerances::default()).unwrap();
        assert_eq!(s.peripheral_count(), 2);
        assert_eq!(s.g1(), 2);
        let vals: Vec<Complex64> = s.peripheral().map(|c| c.value).collect();
        assert!(close(vals[0], 1.0, 0.0) && close(vals[1], -1.0, 0.0));
    }

    #[test]
    fn depolarizing_spectrum() {
        let s = spectrum(&depolarizing(), &Tolerances::default()).unwrap();
        assert_eq!(s.peripheral_count(), 1);
        assert_eq!(s.g1(), 1);
        let id = ComplexMatrix::identity(2).scale_real(1.0 / 2f64.sqrt());
        assert!(matrix_subspace_distance(&s.fixed_space_basis, &[id]) < 1e-10);
        // 1 − 4p/3 with p = 1/2
        assert_eq!(s.clusters[1].multiplicity, 3);
        assert!(close(s.clusters[1].value, 1.0 / 3.0, 0.0));
    }

    #[test]
    fn spectrum_rejects_non_bistochastic() {
        let half = KrausSet::new("half", vec![ComplexMatrix::identity(2).scale_real(0.5)]).unwrap();
        assert!(matches!(
            spectrum(&half, &Tolerances::default()),
            Err(Error::NotBistochastic { .. })
        ));
        assert!(fixed_space_commutant(&half, &Tolerances::default()).is_err());
    }

    #[test]
    fn commutant_examples() {
        let tol = Tolerances::default();
        let pf = fixed_space_commutant(&phase_flip(), &tol).unwrap();
        let x1 = ComplexMatrix::diag(&[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let x2 = ComplexMatrix::diag(&[c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert!(matrix_subspace_distance(&pf, &[x1, x2]) < 1e-10);

        let dep = fixed_space_commutant(&depolarizing(), &tol).unwrap();
        assert_eq!(dep.len(), 1);

        let id = KrausSet::new("id", vec![ComplexMatrix::identity(3)]).unwrap();
        assert_eq!(fixed_space_commutant(&id, &tol).unwrap().len(), 9);
    }

    #[test]
    fn intertwiner_examples() {
        let tol = Tolerances::default();
        for k in [phase_flip(), z_conj(), depolarizing()] {
            let r = intertwiner_eigenspace(&k, c64(1.0, 0.0), &tol).unwrap();
            assert!(r.agrees_with_numerical, "{}", k.label());
        }
        let r = intertwiner_eigenspace(&z_conj(), c64(-1.0, 0.0), &tol).unwrap();
        assert!(r.agrees_with_numerical);
        assert!(matrix_subspace_distance(
            &r.basis,
            &[pauli('x').scale_real(0.5f64.sqrt()), pauli('y').scale_real(0.5f64.sqrt())]
        ) < 1e-10);

        let r = intertwiner_eigenspace(&phase_flip(), c64(-1.0, 0.0), &tol).unwrap();
        assert!(r.basis.is_empty() && r.numerical.is_empty() && r.agrees_with_numerical);

        assert!(matches!(
            intertwiner_eigenspace(&phase_flip(), c64(0.5, 0.0), &tol),
            Err(Error::NotPeripheral(_))
        ));
    }

    #[test]
    fn jordan_examples() {
        let tol = Tolerances::default();
        let j = jordan_diagnostic(&phase_flip(), c64(1.0, 0.0), &tol).unwrap();
        assert_eq!((j.m, j.g, j.g2, j.diagonalizable_at_lambda), (2, 2, 2, true));
        let j = jordan_diagnostic(&z_conj(), c64(-1.0, 0.0), &tol).unwrap();
        assert_eq!((j.m, j.g, j.g2), (2, 2, 2));
        let j = jordan_diagnostic(&phase_flip(), c64(0.5, 0.0), &tol).unwrap();
        assert_eq!((j.m, j.g), (2, 2));
        assert!(matches!(
            jordan_diagnostic(&phase_flip(), c64(0.7, 0.0), &tol),
            Err(Error::NotInSpectrum(_))
        ));
    }

    #[test]
    fn orthogonality_examples() {
        let tol = Tolerances::default();
        for k in [z_conj(), phase_flip(), depolarizing()] {
            let r = orthogonality_check(&k, &tol).unwrap();
            assert!(r.passed, "{}: {:?}", k.label(), r);
            assert!(r.max_overlap < 1e-12);
            assert_eq!(r.entries.len(), 1);
            assert_eq!(r.entries[0].subspace_dim, if k.label() == "depolarizing" { 3 } else { 2 });
        }
    }

    #[test]
    fn clustering_groups_and_orders() {
        let vals = [
            c64(0.5, 0.0),
            c64(1.0, 1e-12),
            c64(-1.0, 0.0),
            c64(1.0, -1e-12),
            c64(0.5 + 1e-9, 0.0),
        ];
        let c = cluster_eigenvalues(&vals, 1e-7, 1e-8);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].multiplicity, 2);
        assert!(c[0].peripheral && close(c[0].value, 1.0, 0.0));
        assert!(c[1].peripheral && close(c[1].value, -1.0, 0.0));
        assert!(!c[2].peripheral && c[2].multiplicity == 2);
    }

    #[test]
    fn phase_is_half_open() {
        assert_eq!(phase(c64(-1.0, -0.0)), PI);
        assert_eq!(phase(c64(-1.0, 0.0)), PI);
    }
}
