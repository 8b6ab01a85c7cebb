//! Long-time behaviour of `ρ(t) = Φ^t ρ(0)`.
//!
//! Both limits are closed-form orthogonal projections onto the fixed-point
//! space `E(1)` with orthonormal basis `Z_1 … Z_g`:
//!
//! ```text
//! ρ(∞) = Σ_l ⟨Z_l, ρ(0)⟩ Z_l
//! ```
//!
//! The Cesàro limit `lim (1/t) Σ_{n=1..t} Φ^n ρ(0)` always equals this
//! projection. The strict limit `lim Φ^t ρ(0)` equals it only when 1 is the
//! sole eigenvalue on the unit circle; otherwise [`strict_limit`] refuses
//! with [`Error::PeripheralObstruction`].
//!
//! [`evolve`] and [`empirical_cesaro`] iterate the channel directly and serve
//! as brute-force oracles for the projections.

use std::fmt;

use crate::channel::{DensityMatrix, KrausSet};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance, frobenius_inner, ComplexMatrix};
use crate::spectral::{spectrum, SpectralData, Tolerances};

/// The four limiting-behaviour categories of a bistochastic channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    /// Converges to `I/N` from every initial state.
    MaximallyMixed = 1,
    /// Converges, to a limit that depends on the initial state.
    StateDependent = 2,
    /// No strict limit; the Cesàro average is `I/N` from every initial state.
    CesaroMaximallyMixed = 3,
    /// No strict limit; the Cesàro average depends on the initial state.
    CesaroStateDependent = 4,
}

impl Category {
    pub fn from_counts(peripheral_count: usize, g1: usize) -> Self {
        match (peripheral_count <= 1, g1 <= 1) {
            (true, true) => Category::MaximallyMixed,
            (true, false) => Category::StateDependent,
            (false, true) => Category::CesaroMaximallyMixed,
            (false, false) => Category::CesaroStateDependent,
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Category::MaximallyMixed),
            2 => Some(Category::StateDependent),
            3 => Some(Category::CesaroMaximallyMixed),
            4 => Some(Category::CesaroStateDependent),
            _ => None,
        }
    }

    /// Whether `Φ^t ρ(0)` converges for every initial state.
    pub fn has_strict_limit(self) -> bool {
        matches!(self, Category::MaximallyMixed | Category::StateDependent)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "category {}", self.number())
    }
}

#[derive(Debug, Clone)]
pub struct ChannelClass {
    pub category: Category,
    /// Distinct peripheral eigenvalues `|Λ₁|`.
    pub peripheral_count: usize,
    pub g1: usize,
    pub evidence: SpectralData,
}

pub fn classify(k: &KrausSet, tol: &Tolerances) -> Result<ChannelClass> {
    let evidence = spectrum(k, tol)?;
    Ok(classify_spectrum(evidence))
}

pub fn classify_spectrum(evidence: SpectralData) -> ChannelClass {
    let peripheral_count = evidence.peripheral_count();
    let g1 = evidence.g1();
    ChannelClass {
        category: Category::from_counts(peripheral_count, g1),
        peripheral_count,
        g1,
        evidence,
    }
}

/// `Σ_l ⟨Z_l, X⟩ Z_l` for an orthonormal family `Z_l`.
pub fn project(basis: &[ComplexMatrix], x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
    for z in basis {
        let c = frobenius_inner(z, x)?;
        out = out.checked_add(&z.scale(c))?;
    }
    Ok(out)
}

fn check_state_dim(k: &KrausSet, rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != k.dim() {
        return Err(Error::ShapeMismatch {
            op: "initial state",
            left: (k.dim(), k.dim()),
            right: (rho.dim(), rho.dim()),
        });
    }
    Ok(())
}

fn projected_state(sd: &SpectralData, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let p = project(&sd.fixed_space_basis, rho0.matrix())?;
    DensityMatrix::new(p).map_err(|e| Error::Numerical(format!("projection onto the fixed space is not a state: {e}")))
}

/// `lim Φ^t ρ(0)`, defined when 1 is the only peripheral eigenvalue.
pub fn strict_limit(k: &KrausSet, rho0: &DensityMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    let sd = spectrum(k, tol)?;
    strict_limit_with(&sd, rho0)
}

pub fn strict_limit_with(sd: &SpectralData, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if rho0.dim() != sd.dim() {
        return Err(Error::ShapeMismatch {
            op: "initial state",
            left: (sd.dim(), sd.dim()),
            right: (rho0.dim(), rho0.dim()),
        });
    }
    let others = sd.peripheral_except_one();
    if !others.is_empty() {
        return Err(Error::PeripheralObstruction { others });
    }
    projected_state(sd, rho0)
}

/// `lim (1/t) Σ_{n=1..t} Φ^n ρ(0)`, the orthogonal projection of `ρ(0)` onto
/// `E(1)`. Exists for every bistochastic channel.
pub fn cesaro_limit(k: &KrausSet, rho0: &DensityMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    check_state_dim(k, rho0)?;
    let sd = spectrum(k, tol)?;
    projected_state(&sd, rho0)
}

pub fn cesaro_limit_with(sd: &SpectralData, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if rho0.dim() != sd.dim() {
        return Err(Error::ShapeMismatch {
            op: "initial state",
            left: (sd.dim(), sd.dim()),
            right: (rho0.dim(), rho0.dim()),
        });
    }
    projected_state(sd, rho0)
}

/// States `ρ(1) … ρ(t)` and, when a reference was given, their Frobenius
/// distances to it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<DensityMatrix>,
    pub distances_to_limit: Option<Vec<f64>>,
    /// Set when the run ended before the requested horizon because the
    /// state stopped moving.
    pub stopped_early: bool,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectories are non-empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Stop once `‖ρ(t) − ρ(t−1)‖ < stall_tol` for `stall_steps` consecutive steps.
    pub early_stop: bool,
    pub stall_tol: f64,
    pub stall_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            early_stop: false,
            stall_tol: 1e-12,
            stall_steps: 5,
        }
    }
}

pub fn evolve(
    k: &KrausSet,
    rho0: &DensityMatrix,
    t: usize,
    reference: Option<&DensityMatrix>,
) -> Result<Trajectory> {
    evolve_with(k, rho0, t, reference, EvolveOptions::default())
}

pub fn evolve_with(
    k: &KrausSet,
    rho0: &DensityMatrix,
    t: usize,
    reference: Option<&DensityMatrix>,
    opts: EvolveOptions,
) -> Result<Trajectory> {
    k.require_bistochastic()?;
    check_state_dim(k, rho0)?;
    if let Some(r) = reference {
        check_state_dim(k, r)?;
    }
    if t == 0 {
        return Err(Error::InvalidParameter("evolve needs at least one step".into()));
    }
    let mut states = Vec::with_capacity(t);
    let mut distances = reference.map(|_| Vec::with_capacity(t));
    let mut current = rho0.matrix().clone();
    let mut stalled = 0usize;
    let mut stopped_early = false;
    for step in 1..=t {
        let next = k.apply(&current)?;
        if opts.early_stop {
            if frobenius_distance(&next, &current) < opts.stall_tol {
                stalled += 1;
            } else {
                stalled = 0;
            }
        }
        current = next;
        if let (Some(d), Some(r)) = (distances.as_mut(), reference) {
            d.push(frobenius_distance(&current, r.matrix()));
        }
        states.push(DensityMatrix::new_unchecked(current.clone()));
        if opts.early_stop && stalled >= opts.stall_steps && step < t {
            stopped_early = true;
            break;
        }
    }
    Ok(Trajectory {
        states,
        distances_to_limit: distances,
        stopped_early,
    })
}

/// Running average `(1/t) Σ_{n=1..t} Φ^n ρ(0)`.
pub fn empirical_cesaro(k: &KrausSet, rho0: &DensityMatrix, t: usize) -> Result<DensityMatrix> {
    Ok(empirical_cesaro_checkpoints(k, rho0, &[t])?.pop().expect("one checkpoint"))
}

/// Running averages at each horizon in `horizons` (ascending), from a single
/// pass over the trajectory.
pub fn empirical_cesaro_checkpoints(
    k: &KrausSet,
    rho0: &DensityMatrix,
    horizons: &[usize],
) -> Result<Vec<DensityMatrix>> {
    k.require_bistochastic()?;
    check_state_dim(k, rho0)?;
    if horizons.first().is_none_or(|&t| t == 0) || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "horizons must be positive and strictly increasing".into(),
        ));
    }
    let n = k.dim();
    let mut sum = ComplexMatrix::zeros(n, n);
    let mut current = rho0.matrix().clone();
    let mut out = Vec::with_capacity(horizons.len());
    let mut next_checkpoint = horizons.iter().peekable();
    let last = *horizons.last().expect("non-empty");
    for step in 1..=last {
        current = k.apply(&current)?;
        sum = &sum + &current;
        if next_checkpoint.peek() == Some(&&step) {
            next_checkpoint.next();
            out.push(DensityMatrix::new_unchecked(sum.scale_real(1.0 / step as f64)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn phase_flip(p: f64) -> KrausSet {
        KrausSet::new(
            "phase_flip",
            vec![ComplexMatrix::identity(2).scale_real(p.sqrt()), z().scale_real((1.0 - p).sqrt())],
        )
        .unwrap()
    }

    fn plus_state() -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.5; 4]).unwrap()).unwrap()
    }

    fn golden_state() -> DensityMatrix {
        DensityMatrix::new(
            ComplexMatrix::from_vec(2, 2, vec![c64(0.6, 0.0), c64(0.2, 0.1), c64(0.2, -0.1), c64(0.4, 0.0)]).unwrap(),
        )
        .unwrap()
    }

    fn diag_state(a: f64, b: f64) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::diag(&[c64(a, 0.0), c64(b, 0.0)])).unwrap()
    }

    #[test]
    fn category_table() {
        assert_eq!(Category::from_counts(1, 1), Category::MaximallyMixed);
        assert_eq!(Category::from_counts(1, 3), Category::StateDependent);
        assert_eq!(Category::from_counts(2, 1), Category::CesaroMaximallyMixed);
        assert_eq!(Category::from_counts(4, 2), Category::CesaroStateDependent);
        for n in 1..=4 {
            assert_eq!(Category::from_number(n).unwrap().number(), n);
        }
        assert!(Category::from_number(5).is_none());
    }

    #[test]
    fn strict_limit_dephases() {
        let tol = Tolerances::default();
        let lim = strict_limit(&phase_flip(0.75), &golden_state(), &tol).unwrap();
        assert!(lim.distance(&diag_state(0.6, 0.4)) < 1e-12);
        let fixed = diag_state(0.3, 0.7);
        let lim = strict_limit(&phase_flip(0.75), &fixed, &tol).unwrap();
        assert!(lim.distance(&fixed) < 1e-12);
    }

    #[test]
    fn strict_limit_refuses_peripheral_obstruction() {
        let zc = KrausSet::new("z", vec![z()]).unwrap();
        let err = strict_limit(&zc, &plus_state(), &Tolerances::default()).unwrap_err();
        match err {
            Error::PeripheralObstruction { others } => {
                assert_eq!(others.len(), 1);
                assert!((others[0] + c64(1.0, 0.0)).norm() < 1e-10);
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn cesaro_examples() {
        let tol = Tolerances::default();
        let zc = KrausSet::new("z", vec![z()]).unwrap();
        let lim = cesaro_limit(&zc, &plus_state(), &tol).unwrap();
        assert!(lim.distance(&diag_state(0.5, 0.5)) < 1e-12);
        let mm = DensityMatrix::maximally_mixed(2);
        assert!(cesaro_limit(&phase_flip(0.3), &mm, &tol).unwrap().distance(&mm) < 1e-12);
        let bad = DensityMatrix::maximally_mixed(3);
        assert!(cesaro_limit(&zc, &bad, &tol).is_err());
    }

    #[test]
    fn evolve_examples() {
        // Off-diagonal decays as (2p − 1)^t = 0.5^t.
        let target = diag_state(0.5, 0.5);
        let traj = evolve(&phase_flip(0.75), &plus_state(), 10, Some(&target)).unwrap();
        let d = traj.distances_to_limit.as_ref().unwrap();
        for w in d.windows(2) {
            assert!((w[1] / w[0] - 0.5).abs() < 1e-10);
        }

        // Z-conjugation flips the sign of the off-diagonal each step.
        let zc = KrausSet::new("z", vec![z()]).unwrap();
        let traj = evolve(&zc, &plus_state(), 4, Some(&plus_state())).unwrap();
        let d = traj.distances_to_limit.unwrap();
        let off = 2f64.sqrt() * 0.5; // ‖ρ − ZρZ‖ = 2‖off-diagonal part‖ = 2 · (√2 · 0.5)
        let expected = [2.0 * off, 0.0, 2.0 * off, 0.0];
        for (a, b) in d.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{d:?}");
        }

        let id = KrausSet::new("id", vec![ComplexMatrix::identity(2)]).unwrap();
        let traj = evolve(&id, &golden_state(), 3, None).unwrap();
        assert!(traj.states.iter().all(|s| s == &golden_state()));
        assert!(traj.distances_to_limit.is_none());

        assert!(evolve(&id, &golden_state(), 0, None).is_err());
    }

    #[test]
    fn evolve_early_stop() {
        let id = KrausSet::new("id", vec![ComplexMatrix::identity(2)]).unwrap();
        let opts = EvolveOptions {
            early_stop: true,
            ..EvolveOptions::default()
        };
        let traj = evolve_with(&id, &golden_state(), 100, None, opts).unwrap();
        assert!(traj.stopped_early);
        assert_eq!(traj.states.len(), 5);
    }

    #[test]
    fn empirical_examples() {
        let zc = KrausSet::new("z", vec![z()]).unwrap();
        let avg = empirical_cesaro(&zc, &plus_state(), 10_000).unwrap();
        assert!(avg.distance(&diag_state(0.5, 0.5)) < 1e-12);
        let mm = DensityMatrix::maximally_mixed(2);
        for t in [1, 7, 50] {
            assert!(empirical_cesaro(&phase_flip(0.3), &mm, t).unwrap().distance(&mm) < 1e-14);
        }
        let avg = empirical_cesaro(&phase_flip(0.75), &golden_state(), 100).unwrap();
        assert!(avg.distance(&diag_state(0.6, 0.4)) < 1e-2);
        assert!(empirical_cesaro_checkpoints(&zc, &plus_state(), &[10, 5]).is_err());
        assert!(empirical_cesaro_checkpoints(&zc, &plus_state(), &[]).is_err());
    }
}
