//! Discrete-time coined quantum walks on regular graphs.
//!
//! The Hilbert space is coin ⊗ position with basis `|a, v⟩` stored at index
//! `a·V + v`. One step is `U = S·(C ⊗ I_V)`: toss the coin, then move along
//! the port labelled by the coin value. The shift `S` is given by a port
//! table: the entry for `(v, a)` holds `(w, b)`, meaning that leaving `v`
//! through port `a` lands on `w` with coin value `b`. On a cycle, port 0
//! points to `v + 1` and port 1 to `v − 1`, and the walker arrives holding
//! the port that points back where it came from.
//!
//! With decoherence `p > 0` the coin is measured in its computational basis
//! with probability `p` after each step, which gives the bistochastic channel
//! `{√(1−p) U} ∪ {√p (P_k ⊗ I) U}`.

use num_complex::Complex64;

use crate::channel::{DensityMatrix, KrausSet};
use crate::error::{Error, Result};
use crate::limits::{cesaro_limit, empirical_cesaro_checkpoints};
use crate::linalg::{kron, schur, ComplexMatrix, ComplexVector};
use crate::spectral::Tolerances;

pub const UNITARY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;
pub const DISTRIBUTION_TOL: f64 = 1e-8;
/// Eigenphases closer than this are treated as equal when forming the
/// time-averaged distribution.
pub const EIGENPHASE_CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum Graph {
    Cycle(usize),
    Regular {
        nodes: usize,
        degree: usize,
        /// `ports[v·degree + a] = (w, b)`.
        ports: Vec<(usize, usize)>,
    },
}

impl Graph {
    pub fn nodes(&self) -> usize {
        match self {
            Graph::Cycle(n) => *n,
            Graph::Regular { nodes, .. } => *nodes,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Graph::Cycle(_) => 2,
            Graph::Regular { degree, .. } => *degree,
        }
    }

    /// The port table, materialized for cycles.
    pub fn ports(&self) -> Vec<(usize, usize)> {
        match self {
            Graph::Cycle(n) => (0..*n).flat_map(|v| [((v + 1) % n, 1), ((v + n - 1) % n, 0)]).collect(),
            Graph::Regular { ports, .. } => ports.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (v, d) = (self.nodes(), self.degree());
        if v == 0 || d == 0 {
            return Err(Error::InvalidWalk("graph needs at least one node and one port".into()));
        }
        let ports = self.ports();
        if ports.len() != v * d {
            return Err(Error::InvalidWalk(format!(
                "expected {} port entries ({v} nodes x degree {d}), got {}",
                v * d,
                ports.len()
            )));
        }
        let mut hit = vec![false; v * d];
        for (i, &(w, b)) in ports.iter().enumerate() {
            if w >= v || b >= d {
                return Err(Error::InvalidWalk(format!(
                    "port entry {i} points to node {w}, coin {b}, outside {v} nodes x {d} coins"
                )));
            }
            let slot = w * d + b;
            if hit[slot] {
                return Err(Error::InvalidWalk(format!(
                    "node {w}, coin {b} is reached twice; the shift is not a permutation"
                )));
            }
            hit[slot] = true;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct WalkSpec {
    pub graph: Graph,
    pub coin: ComplexMatrix,
    /// Probability of measuring the coin after each step.
    pub decoherence_p: f64,
}

impl WalkSpec {
    pub fn new(graph: Graph, coin: ComplexMatrix, decoherence_p: f64) -> Result<Self> {
        let spec = Self {
            graph,
            coin,
            decoherence_p,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        let d = self.graph.degree();
        if self.coin.shape() != (d, d) {
            return Err(Error::InvalidWalk(format!(
                "coin is {}x{}, graph degree is {d}",
                self.coin.rows(),
                self.coin.cols()
            )));
        }
        if !self.coin.is_unitary(UNITARY_TOL) {
            return Err(Error::InvalidWalk("coin is not unitary".into()));
        }
        if !(0.0..=1.0).contains(&self.decoherence_p) {
            return Err(Error::InvalidWalk(format!(
                "decoherence probability {} is outside [0, 1]",
                self.decoherence_p
            )));
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.graph.nodes()
    }

    pub fn degree(&self) -> usize {
        self.graph.degree()
    }

    pub fn dim(&self) -> usize {
        self.nodes() * self.degree()
    }

    pub fn is_unitary(&self) -> bool {
        self.decoherence_p == 0.0
    }
}

/// Pure walker state over `|a, v⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    amplitudes: ComplexVector,
    degree: usize,
    nodes: usize,
}

impl WalkState {
    pub fn new(amplitudes: ComplexVector, degree: usize, nodes: usize) -> Result<Self> {
        if amplitudes.dim() != degree * nodes {
            return Err(Error::InvalidWalk(format!(
                "state has {} amplitudes, walk space has dimension {}",
                amplitudes.dim(),
                degree * nodes
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidWalk("state has non-finite amplitudes".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidWalk(format!("state has norm {norm}, not 1")));
        }
        Ok(Self {
            amplitudes,
            degree,
            nodes,
        })
    }

    /// `|coin, node⟩`.
    pub fn localized(coin: usize, node: usize, degree: usize, nodes: usize) -> Result<Self> {
        if coin >= degree || node >= nodes {
            return Err(Error::InvalidWalk(format!(
                "|{coin}, {node}⟩ is outside {degree} coins x {nodes} nodes"
            )));
        }
        Self::new(ComplexVector::basis(degree * nodes, coin * nodes + node), degree, nodes)
    }

    pub fn for_spec(spec: &WalkSpec, amplitudes: ComplexVector) -> Result<Self> {
        Self::new(amplitudes, spec.degree(), spec.nodes())
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::pure(&self.amplitudes).expect("unit vector")
    }

    /// Relabel node `v` as `v + k (mod V)`.
    pub fn rotate_nodes(&self, k: usize) -> Self {
        let (d, n) = (self.degree, self.nodes);
        let mut out = ComplexVector::zeros(d * n);
        for a in 0..d {
            for v in 0..n {
                out[a * n + (v + k) % n] = self.amplitudes[a * n + v];
            }
        }
        Self {
            amplitudes: out,
            degree: d,
            nodes: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    pub probabilities: Vec<f64>,
}

impl PositionDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.iter().any(|p| !p.is_finite() || *p < -DISTRIBUTION_TOL) {
            return Err(Error::Numerical(format!("negative or non-finite probability in {probabilities:?}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::Numerical(format!("position distribution sums to {total}")));
        }
        Ok(Self { probabilities })
    }

    pub fn nodes(&self) -> usize {
        self.probabilities.len()
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Probability at node `v` moved to node `v + k (mod V)`.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.nodes();
        let mut out = vec![0.0; n];
        for (v, p) in self.probabilities.iter().enumerate() {
            out[(v + k) % n] = *p;
        }
        Self { probabilities: out }
    }
}

fn amplitude_distribution(amps: &[Complex64], degree: usize, nodes: usize) -> Vec<f64> {
    let mut p = vec![0.0; nodes];
    for a in 0..degree {
        for (v, pv) in p.iter_mut().enumerate() {
            *pv += amps[a * nodes + v].norm_sqr();
        }
    }
    p
}

/// `P(v) = Σ_a |⟨a, v|ψ⟩|²`.
pub fn position_distribution(state: &WalkState) -> Result<PositionDistribution> {
    PositionDistribution::new(amplitude_distribution(
        state.amplitudes.as_slice(),
        state.degree,
        state.nodes,
    ))
}

/// `P(v) = Σ_a ⟨a, v|ρ|a, v⟩`.
pub fn position_distribution_of_density(
    rho: &DensityMatrix,
    degree: usize,
    nodes: usize,
) -> Result<PositionDistribution> {
    if rho.dim() != degree * nodes {
        return Err(Error::InvalidWalk(format!(
            "density matrix has dimension {}, walk space has dimension {}",
            rho.dim(),
            degree * nodes
        )));
    }
    let m = rho.matrix();
    let mut p = vec![0.0; nodes];
    for a in 0..degree {
        for (v, pv) in p.iter_mut().enumerate() {
            let i = a * nodes + v;
            *pv += m[(i, i)].re;
        }
    }
    PositionDistribution::new(p)
}

/// The shift permutation `S|a, v⟩ = |b, w⟩`.
pub fn shift_matrix(graph: &Graph) -> Result<ComplexMatrix> {
    graph.validate()?;
    let (n, d) = (graph.nodes(), graph.degree());
    let mut s = ComplexMatrix::zeros(n * d, n * d);
    for (i, (w, b)) in graph.ports().into_iter().enumerate() {
        let (v, a) = (i / d, i % d);
        s[(b * n + w, a * n + v)] = Complex64::new(1.0, 0.0);
    }
    Ok(s)
}

fn coined_unitary(spec: &WalkSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let s = shift_matrix(&spec.graph)?;
    Ok(&s * &kron(&spec.coin, &ComplexMatrix::identity(spec.nodes())))
}

/// `U = S·(C ⊗ I_V)` for a walk without decoherence.
pub fn build_walk_unitary(spec: &WalkSpec) -> Result<ComplexMatrix> {
    if !spec.is_unitary() {
        return Err(Error::InvalidWalk(format!(
            "the walk has decoherence p = {}; use build_walk_channel",
            spec.decoherence_p
        )));
    }
    coined_unitary(spec)
}

/// `{√(1−p) U} ∪ {√p (P_k ⊗ I_V) U}`; terms with zero weight are dropped.
pub fn build_walk_channel(spec: &WalkSpec) -> Result<KrausSet> {
    let u = coined_unitary(spec)?;
    let p = spec.decoherence_p;
    let (d, n) = (spec.degree(), spec.nodes());
    let mut ops = Vec::with_capacity(d + 1);
    if p < 1.0 {
        ops.push(u.scale_real((1.0 - p).sqrt()));
    }
    if p > 0.0 {
        for k in 0..d {
            let mut proj = ComplexMatrix::zeros(d, d);
            proj[(k, k)] = Complex64::new(1.0, 0.0);
            let pk = kron(&proj, &ComplexMatrix::identity(n));
            ops.push((&pk * &u).scale_real(p.sqrt()));
        }
    }
    KrausSet::new(format!("walk_{}x{}_p{}", d, n, p), ops)
}

/// Eigenvectors of `U` grouped by eigenphase.
struct EigenGroups {
    vectors: Vec<ComplexVector>,
    groups: Vec<Vec<usize>>,
}

fn eigen_groups(u: &ComplexMatrix) -> Result<EigenGroups> {
    let s = schur(u)?;
    let lambdas = s.eigenvalues();
    let n = lambdas.len();
    // single-linkage clustering by union-find
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (lambdas[i] - lambdas[j]).norm() <= EIGENPHASE_CLUSTER_TOL {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    Ok(EigenGroups {
        vectors: (0..n).map(|j| s.q.column(j)).collect(),
        groups,
    })
}

fn check_state(spec: &WalkSpec, alpha0: &WalkState) -> Result<()> {
    if alpha0.degree != spec.degree() || alpha0.nodes != spec.nodes() {
        return Err(Error::InvalidWalk(format!(
            "state is for {} coins x {} nodes, walk has {} x {}",
            alpha0.degree,
            alpha0.nodes,
            spec.degree(),
            spec.nodes()
        )));
    }
    Ok(())
}

/// Long-time average of the position distribution of a unitary walk:
///
/// ```text
/// P∞(v) = Σ_{i,j: λ_i = λ_j} Σ_a a_i a_j* ⟨a,v|ψ_i⟩⟨ψ_j|a,v⟩,   a_j = ⟨ψ_j|α₀⟩
/// ```
///
/// Grouping equal eigenvalues, this is `Σ_c Σ_a |⟨a,v|P_c α₀⟩|²` with `P_c`
/// the spectral projector of eigenvalue cluster `c`.
pub fn walk_limit_distribution(spec: &WalkSpec, alpha0: &WalkState) -> Result<PositionDistribution> {
    check_state(spec, alpha0)?;
    let u = build_walk_unitary(spec)?;
    let eg = eigen_groups(&u)?;
    let dim = spec.dim();
    let mut p = vec![0.0; spec.nodes()];
    for group in &eg.groups {
        let mut beta = ComplexVector::zeros(dim);
        for &i in group {
            let a = eg.vectors[i].inner(&alpha0.amplitudes);
            beta.axpy(a, &eg.vectors[i]);
        }
        for (pv, q) in p.iter_mut().zip(amplitude_distribution(beta.as_slice(), spec.degree(), spec.nodes())) {
            *pv += q;
        }
    }
    PositionDistribution::new(p)
}

/// The same double sum over *all* pairs `(i, j)`. This collapses to the
/// initial position distribution, which is what the eigenvalue restriction
/// in [`walk_limit_distribution`] removes.
pub fn unrestricted_pair_sum(spec: &WalkSpec, alpha0: &WalkState) -> Result<PositionDistribution> {
    check_state(spec, alpha0)?;
    let u = build_walk_unitary(spec)?;
    let eg = eigen_groups(&u)?;
    let mut total = ComplexVector::zeros(spec.dim());
    for v in &eg.vectors {
        total.axpy(v.inner(&alpha0.amplitudes), v);
    }
    PositionDistribution::new(amplitude_distribution(total.as_slice(), spec.degree(), spec.nodes()))
}

/// `position_distribution(cesaro_limit(U · U†, |α₀⟩⟨α₀|))`, through the
/// superoperator route.
pub fn walk_limit_via_channel(
    spec: &WalkSpec,
    alpha0: &WalkState,
    tol: &Tolerances,
) -> Result<PositionDistribution> {
    check_state(spec, alpha0)?;
    let k = build_walk_channel(spec)?;
    let lim = cesaro_limit(&k, &alpha0.density(), tol)?;
    position_distribution_of_density(&lim, spec.degree(), spec.nodes())
}

/// `(1/t) Σ_{n=1..t} P_n(v|α₀)`.
pub fn empirical_time_avg(spec: &WalkSpec, alpha0: &WalkState, t: usize) -> Result<PositionDistribution> {
    Ok(empirical_time_avg_checkpoints(spec, alpha0, &[t])?.pop().expect("one checkpoint"))
}

/// Time averages at each horizon in `horizons` (ascending) from one run.
/// Unitary walks evolve the state vector; decoherent walks evolve the
/// density matrix.
pub fn empirical_time_avg_checkpoints(
    spec: &WalkSpec,
    alpha0: &WalkState,
    horizons: &[usize],
) -> Result<Vec<PositionDistribution>> {
    check_state(spec, alpha0)?;
    if horizons.first().is_none_or(|&t| t == 0) || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "horizons must be positive and strictly increasing".into(),
        ));
    }
    let (d, n) = (spec.degree(), spec.nodes());
    if !spec.is_unitary() {
        let k = build_walk_channel(spec)?;
        return empirical_cesaro_checkpoints(&k, &alpha0.density(), horizons)?
            .iter()
            .map(|rho| position_distribution_of_density(rho, d, n))
            .collect();
    }
    let u = build_walk_unitary(spec)?;
    let mut psi = alpha0.amplitudes.clone();
    let mut sum = vec![0.0; n];
    let mut out = Vec::with_capacity(horizons.len());
    let mut next = horizons.iter().peekable();
    let last = *horizons.last().expect("non-empty");
    for step in 1..=last {
        psi = u.mul_vec(&psi);
        for (s, p) in sum.iter_mut().zip(amplitude_distribution(psi.as_slice(), d, n)) {
            *s += p;
        }
        if next.peek() == Some(&&step) {
            next.next();
            out.push(PositionDistribution::new(sum.iter().map(|s| s / step as f64).collect())?);
        }
    }
    Ok(out)
}

/// `|α₀⟩` with equal amplitude on every `|a, v⟩`.
pub fn uniform_state(degree: usize, nodes: usize) -> Result<WalkState> {
    let n = degree * nodes;
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    WalkState::new(ComplexVector::new(vec![amp; n]), degree, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{hadamard, pauli_x};
    use crate::linalg::frobenius_distance;

    fn hadamard_cycle(n: usize, p: f64) -> WalkSpec {
        WalkSpec::new(Graph::Cycle(n), hadamard(), p).unwrap()
    }

    #[test]
    fn identity_coin_on_two_cycle_is_a_permutation() {
        let spec = WalkSpec::new(Graph::Cycle(2), ComplexMatrix::identity(2), 0.0).unwrap();
        let u = build_walk_unitary(&spec).unwrap();
        for i in 0..4 {
            let row: Vec<f64> = u.row(i).iter().map(|z| z.re).collect();
            assert_eq!(row.iter().filter(|&&x| x == 1.0).count(), 1);
            assert_eq!(row.iter().filter(|&&x| x == 0.0).count(), 3);
        }
    }

    #[test]
    fn hadamard_unitary() {
        let u = build_walk_unitary(&hadamard_cycle(4, 0.0)).unwrap();
        assert_eq!(u.shape(), (8, 8));
        let err = frobenius_distance(&(&u.adjoint() * &u), &ComplexMatrix::identity(8));
        assert!(err < 1e-12);
    }

    #[test]
    fn flip_coin_never_returns_in_two_steps_on_odd_cycles() {
        for n in [3, 5, 7] {
            let spec = WalkSpec::new(Graph::Cycle(n), pauli_x(), 0.0).unwrap();
            let u = build_walk_unitary(&spec).unwrap();
            let u2 = &u * &u;
            for a in 0..2 {
                for b in 0..2 {
                    for v in 0..n {
                        assert_eq!(u2[(a * n + v, b * n + v)].norm(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn port_tables_are_checked() {
        let bad = Graph::Regular {
            nodes: 2,
            degree: 1,
            ports: vec![(1, 0), (1, 0)],
        };
        assert!(bad.validate().is_err());
        let short = Graph::Regular {
            nodes: 2,
            degree: 1,
            ports: vec![(1, 0)],
        };
        assert!(short.validate().is_err());
        let out_of_range = Graph::Regular {
            nodes: 2,
            degree: 1,
            ports: vec![(1, 0), (2, 0)],
        };
        assert!(out_of_range.validate().is_err());
        let ok = Graph::Regular {
            nodes: 2,
            degree: 1,
            ports: vec![(1, 0), (0, 0)],
        };
        assert!(WalkSpec::new(ok, ComplexMatrix::identity(1), 0.0).is_ok());
        assert!(WalkSpec::new(Graph::Cycle(3), ComplexMatrix::identity(2).scale_real(2.0), 0.0).is_err());
        assert!(WalkSpec::new(Graph::Cycle(3), hadamard(), 1.5).is_err());
    }

    #[test]
    fn channel_term_counts() {
        assert_eq!(build_walk_channel(&hadamard_cycle(4, 0.0)).unwrap().operators().len(), 1);
        let full = build_walk_channel(&hadamard_cycle(4, 1.0)).unwrap();
        assert_eq!(full.operators().len(), 2);
        assert!(full.is_bistochastic());
        assert!(build_walk_channel(&hadamard_cycle(4, 0.1)).unwrap().is_bistochastic());
        assert!(build_walk_unitary(&hadamard_cycle(4, 0.1)).is_err());
    }

    #[test]
    fn distributions() {
        let p = position_distribution(&WalkState::localized(0, 0, 2, 4).unwrap()).unwrap();
        assert_eq!(p.probabilities, vec![1.0, 0.0, 0.0, 0.0]);
        let u = position_distribution(&uniform_state(2, 4).unwrap()).unwrap();
        assert!(u.probabilities.iter().all(|x| (x - 0.25).abs() < 1e-15));
        let mm = position_distribution_of_density(&DensityMatrix::maximally_mixed(8), 2, 4).unwrap();
        assert!(mm.probabilities.iter().all(|x| (x - 0.25).abs() < 1e-15));
        assert!(position_distribution_of_density(&DensityMatrix::maximally_mixed(6), 2, 4).is_err());
    }

    #[test]
    fn limit_on_two_cycle() {
        let spec = WalkSpec::new(Graph::Cycle(2), ComplexMatrix::identity(2), 0.0).unwrap();
        let a0 = WalkState::localized(0, 0, 2, 2).unwrap();
        let lim = walk_limit_distribution(&spec, &a0).unwrap();
        assert!((lim.probabilities[0] - 0.5).abs() < 1e-12);
        let emp = empirical_time_avg(&spec, &a0, 10_000).unwrap();
        assert!(lim.l1_distance(&emp) < 1e-12);
    }

    #[test]
    fn hadamard_limit_matches_oracles() {
        let spec = hadamard_cycle(4, 0.0);
        let a0 = WalkState::localized(0, 0, 2, 4).unwrap();
        let lim = walk_limit_distribution(&spec, &a0).unwrap();
        let emp = empirical_time_avg(&spec, &a0, 10_000).unwrap();
        assert!(lim.l1_distance(&emp) <= 5e-3, "{lim:?} vs {emp:?}");
        let via = walk_limit_via_channel(&spec, &a0, &Tolerances::default()).unwrap();
        assert!(lim.max_distance(&via) <= 1e-8);
        let raw = unrestricted_pair_sum(&spec, &a0).unwrap();
        assert!(raw.l1_distance(&position_distribution(&a0).unwrap()) < 1e-10);
        assert!(raw.l1_distance(&lim) > 1e-3);
    }

    #[test]
    fn eigenvector_start_is_stationary() {
        let spec = hadamard_cycle(4, 0.0);
        let u = build_walk_unitary(&spec).unwrap();
        let eg = eigen_groups(&u).unwrap();
        let psi = WalkState::for_spec(&spec, eg.vectors[3].clone()).unwrap();
        let lim = walk_limit_distribution(&spec, &psi).unwrap();
        assert!(lim.max_distance(&position_distribution(&psi).unwrap()) < 1e-10);
    }

    #[test]
    fn one_step_average() {
        let spec = hadamard_cycle(4, 0.0);
        let a0 = WalkState::localized(0, 0, 2, 4).unwrap();
        let u = build_walk_unitary(&spec).unwrap();
        let one = WalkState::for_spec(&spec, u.mul_vec(a0.amplitudes())).unwrap();
        let avg = empirical_time_avg(&spec, &a0, 1).unwrap();
        assert!(avg.max_distance(&position_distribution(&one).unwrap()) < 1e-15);
        assert!(empirical_time_avg(&spec, &a0, 0).is_err());
    }

    #[test]
    fn rotation_equivariance() {
        let spec = hadamard_cycle(5, 0.0);
        let a0 = WalkState::localized(1, 2, 2, 5).unwrap();
        let lim = walk_limit_distribution(&spec, &a0).unwrap();
        let rot = walk_limit_distribution(&spec, &a0.rotate_nodes(1)).unwrap();
        assert!(rot.max_distance(&lim.rotated(1)) < 1e-8);
    }
}
