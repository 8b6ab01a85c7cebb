//! Named bistochastic channels used as golden inputs.
//!
//! Pauli convention: `σx = [[0,1],[1,0]]`, `σy = [[0,−i],[i,0]]`,
//! `σz = [[1,0],[0,−1]]`.

use std::collections::BTreeMap;
use std::fmt;

use crate::channel::KrausSet;
use crate::error::{Error, Result};
use crate::limits::Category;
use crate::linalg::{c64, frobenius_norm, kron, ComplexMatrix, ZERO};
use crate::random;

pub const RANDOM_MIXTURE_WEIGHT_TOL: f64 = 1e-12;
pub const RANDOM_MIXTURE_UNITARY_TOL: f64 = 1e-10;
pub const IDENTITY_MIXTURE_TOL: f64 = 1e-10;

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).expect("2x2")
}

/// Controlled-not on two qubits, control first, basis `|c t⟩ ↦ index 2c + t`.
pub fn cnot() -> ComplexMatrix {
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    ];
    ComplexMatrix::from_real(4, 4, &m).expect("4x4")
}

fn open_unit(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name}: p must lie in (0, 1), got {p}")))
    }
}

fn two_term(label: &str, p: f64, other: ComplexMatrix) -> Result<KrausSet> {
    open_unit(label, p)?;
    KrausSet::new(
        label,
        vec![ComplexMatrix::identity(2).scale_real(p.sqrt()), other.scale_real((1.0 - p).sqrt())],
    )
}

/// `Φ(X) = pX + (1−p) ZXZ`.
pub fn make_phase_flip(p: f64) -> Result<KrausSet> {
    two_term("phase_flip", p, pauli_z())
}

/// `Φ(X) = pX + (1−p) σx X σx`.
pub fn make_bit_flip(p: f64) -> Result<KrausSet> {
    two_term("bit_flip", p, pauli_x())
}

/// `Φ(X) = pX + (1−p) σy X σy`.
pub fn make_bit_phase_flip(p: f64) -> Result<KrausSet> {
    two_term("bit_phase_flip", p, pauli_y())
}

/// Qubit depolarizing channel `{√(1−p) I, √(p/3) σx, √(p/3) σy, √(p/3) σz}`.
pub fn make_depolarizing(p: f64) -> Result<KrausSet> {
    open_unit("depolarizing", p)?;
    let w = (p / 3.0).sqrt();
    KrausSet::new(
        "depolarizing",
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli_x().scale_real(w),
            pauli_y().scale_real(w),
            pauli_z().scale_real(w),
        ],
    )
}

/// Equal mixture of the identity and a rotation by π/3.
pub fn make_random_unitary_example() -> Result<KrausSet> {
    let s = 3f64.sqrt() / 2.0;
    let u = ComplexMatrix::from_real(2, 2, &[0.5, -s, s, 0.5]).expect("2x2");
    make_random_unitary_mixture(&[0.5, 0.5], &[ComplexMatrix::identity(2), u])
        .map(|k| k.with_label("random_unitary_example"))
}

/// The unitary channel `X ↦ ZXZ`.
pub fn make_z_conjugation() -> Result<KrausSet> {
    KrausSet::new("z_conjugation", vec![pauli_z()])
}

/// Two-qubit mixture `{√p CNOT, √(1−p) Z⊗I}`.
pub fn make_cnot_mixture(p: f64) -> Result<KrausSet> {
    open_unit("cnot_mixture", p)?;
    make_random_unitary_mixture(&[p, 1.0 - p], &[cnot(), kron(&pauli_z(), &ComplexMatrix::identity(2))])
        .map(|k| k.with_label("cnot_mixture"))
}

/// Two-qubit mixture of CNOT, `Z⊗I` and `I⊗X` with seeded random weights.
pub fn make_random_cnot_mixture(seed: u64) -> Result<KrausSet> {
    use rand::Rng;
    let mut rng = random::seeded_rng(seed);
    let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let id = ComplexMatrix::identity(2);
    let unitaries = [cnot(), kron(&pauli_z(), &id), kron(&id, &pauli_x())];
    make_random_unitary_mixture(&weights, &unitaries).map(|k| k.with_label(format!("cnot_random_seed_{seed}")))
}

/// `{√w_i U_i}` for positive weights summing to 1 and unitary `U_i`.
pub fn make_random_unitary_mixture(weights: &[f64], unitaries: &[ComplexMatrix]) -> Result<KrausSet> {
    if weights.len() != unitaries.len() || weights.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} unitaries",
            weights.len(),
            unitaries.len()
        )));
    }
    if let Some(w) = weights.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter(format!("weights must be positive, got {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > RANDOM_MIXTURE_WEIGHT_TOL {
        return Err(Error::InvalidParameter(format!("weights sum to {total}, not 1")));
    }
    for (i, u) in unitaries.iter().enumerate() {
        if !u.is_unitary(RANDOM_MIXTURE_UNITARY_TOL) {
            return Err(Error::InvalidParameter(format!("matrix {i} is not unitary")));
        }
    }
    let ops = weights.iter().zip(unitaries).map(|(w, u)| u.scale_real(w.sqrt())).collect();
    KrausSet::new("random_unitary_mixture", ops)
}

/// Result of testing whether a channel has the form `{√(1−p) I} ∪ rest`
/// with `Σ_rest A A† = pI`, `0 < p < 1`. Such channels have 1 as their only
/// peripheral eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityMixture {
    pub applies: bool,
    pub p: f64,
    /// `‖Σ_rest A A† − pI‖`, or infinity when no identity component exists.
    pub residual: f64,
}

fn identity_coefficient(a: &ComplexMatrix) -> Option<num_complex::Complex64> {
    let n = a.rows();
    let c = a[(0, 0)];
    let off = a.checked_sub(&ComplexMatrix::identity(n).scale(c)).ok()?;
    (frobenius_norm(&off) <= IDENTITY_MIXTURE_TOL).then_some(c)
}

pub fn identity_mixture_check(k: &KrausSet) -> IdentityMixture {
    let n = k.dim();
    let mut identity_weight = 0.0;
    let mut found = false;
    let mut sum = ComplexMatrix::zeros(n, n);
    for a in k.operators() {
        match identity_coefficient(a) {
            Some(c) if c.norm() > IDENTITY_MIXTURE_TOL => {
                found = true;
                identity_weight += c.norm_sqr();
            }
            _ => sum = &sum + &(a * &a.adjoint()),
        }
    }
    if !found {
        return IdentityMixture {
            applies: false,
            p: 0.0,
            residual: f64::INFINITY,
        };
    }
    let p = 1.0 - identity_weight;
    let residual = frobenius_norm(&(&sum - &ComplexMatrix::identity(n).scale_real(p)));
    IdentityMixture {
        applies: residual <= IDENTITY_MIXTURE_TOL && p > IDENTITY_MIXTURE_TOL && p < 1.0 - IDENTITY_MIXTURE_TOL,
        p,
        residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Stated in the literature the catalog follows.
    Literature,
    /// Computed from the spectrum.
    Derived,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Literature => "literature",
            Source::Derived => "derived",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedCategory {
    pub category: Category,
    pub source: Source,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub parameters: BTreeMap<String, f64>,
    pub channel: KrausSet,
    pub expected: Vec<ExpectedCategory>,
}

impl CatalogEntry {
    pub fn expected_from(&self, source: Source) -> Option<Category> {
        self.expected.iter().find(|e| e.source == source).map(|e| e.category)
    }

    /// `(claimed, derived)` when the literature claim and the derived
    /// category disagree.
    pub fn conflict(&self) -> Option<(Category, Category)> {
        match (self.expected_from(Source::Literature), self.expected_from(Source::Derived)) {
            (Some(p), Some(d)) if p != d => Some((p, d)),
            _ => None,
        }
    }
}

pub const NAMES: [&str; 8] = [
    "phase_flip",
    "bit_flip",
    "bit_phase_flip",
    "depolarizing",
    "random_unitary_example",
    "z_conjugation",
    "cnot_mixture",
    "cnot_random",
];

/// The deterministic channels (everything but `cnot_random`) at their
/// default parameters.
pub fn standard_entries() -> Vec<CatalogEntry> {
    NAMES
        .iter()
        .filter(|n| **n != "cnot_random")
        .map(|n| entry(n, &BTreeMap::new()).expect("defaults are valid"))
        .collect()
}

fn expect(claimed: Option<u8>, derived: Option<u8>) -> Vec<ExpectedCategory> {
    let mut out = Vec::new();
    if let Some(c) = claimed.and_then(Category::from_number) {
        out.push(ExpectedCategory {
            category: c,
            source: Source::Literature,
        });
    }
    if let Some(c) = derived.and_then(Category::from_number) {
        out.push(ExpectedCategory {
            category: c,
            source: Source::Derived,
        });
    }
    out
}

/// Category expectations recorded for a catalog name; empty for unknown
/// names.
pub fn expected_categories(name: &str) -> Vec<ExpectedCategory> {
    match name {
        "phase_flip" | "bit_flip" => expect(Some(2), Some(2)),
        "bit_phase_flip" | "random_unitary_example" => expect(Some(1), Some(2)),
        "depolarizing" => expect(None, Some(1)),
        "z_conjugation" | "cnot_mixture" | "cnot_random" => expect(None, Some(4)),
        _ => Vec::new(),
    }
}

/// Build a catalog channel by name. `params` may override `p` (and `seed`
/// for `cnot_random`); unknown keys are rejected.
pub fn entry(name: &str, params: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    let (allowed, default): (&[&str], &[(&str, f64)]) = match name {
        "phase_flip" | "bit_flip" | "bit_phase_flip" => (&["p"], &[("p", 0.75)]),
        "depolarizing" | "cnot_mixture" => (&["p"], &[("p", 0.5)]),
        "random_unitary_example" | "z_conjugation" => (&[], &[]),
        "cnot_random" => (&["seed"], &[("seed", 0.0)]),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown catalog channel {name:?}; known: {}",
                NAMES.join(", ")
            )))
        }
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParameter(format!("{name} takes no parameter {k:?}")));
    }
    let mut parameters: BTreeMap<String, f64> = default.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    parameters.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
    let p = parameters.get("p").copied().unwrap_or(0.0);

    let channel = match name {
        "phase_flip" => make_phase_flip(p)?,
        "bit_flip" => make_bit_flip(p)?,
        "bit_phase_flip" => make_bit_phase_flip(p)?,
        "depolarizing" => make_depolarizing(p)?,
        "random_unitary_example" => make_random_unitary_example()?,
        "z_conjugation" => make_z_conjugation()?,
        "cnot_mixture" => make_cnot_mixture(p)?,
        "cnot_random" => {
            let seed = parameters["seed"];
            if !(seed >= 0.0 && seed.fract() == 0.0 && seed < 2f64.powi(53)) {
                return Err(Error::InvalidParameter(format!("seed must be a non-negative integer, got {seed}")));
            }
            make_random_cnot_mixture(seed as u64)?
        }
        _ => unreachable!(),
    };
    let name = NAMES.iter().find(|n| **n == name).expect("name was matched above");
    Ok(CatalogEntry {
        name,
        parameters,
        expected: expected_categories(name),
        channel,
    })
}
