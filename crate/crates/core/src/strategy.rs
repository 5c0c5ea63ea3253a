//! Conjugate-basis test projectors and verification strategies.
//!
//! A conjugate-basis (CB) test for the maximally entangled state
//! |Φ⟩ = d^{-1/2} Σ|jj⟩ measures Alice in a basis B and Bob in the
//! conjugated basis B*, passing on equal outcomes; the pass projector is
//!
//! ```text
//! P(B) = Σ_{|ψ⟩∈B} |ψ⟩⟨ψ| ⊗ |ψ*⟩⟨ψ*|
//! ```
//!
//! A strategy is a probability-weighted set of such tests. Its verification
//! operator Ω = Σ p_l P_l always has top eigenvalue 1 with eigenvector |Φ⟩;
//! the second eigenvalue β(Ω) and the spectral gap ν(Ω) = 1 - β(Ω) control
//! how many tests verification needs. This module computes Ω and its
//! spectrum, classifies strategies (parsimonious / optimal / perfect /
//! homogeneous / singular), certifies 2-designs, mixes in the trivial test
//! to reach a target β, and recovers the underlying basis from a rank-d
//! separable projector.

use crate::bases::{Basis, BasisError};
use crate::linalg::{self, ComplexMatrix, LinalgError, Spectrum, C64};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

/// Absolute tolerance on eigenvalue comparisons used for classification.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Eigenvalues at or below this threshold mark a singular strategy.
const SINGULAR_TOL: f64 = 1e-10;

/// Seed for the generic real combination used in basis recovery.
const RECOVERY_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid weights: {0}")]
    WeightError(String),

    #[error("lambda {lambda} outside [1/(d+1), 1) = [{min}, 1) for d={d}")]
    LambdaOutOfRange { lambda: f64, min: f64, d: usize },

    #[error("strategy is not optimal (beta = {beta}, need 1/(d+1))")]
    NotOptimalStrategy { beta: f64 },

    #[error("pass rate {rate} outside [{min}, 1]")]
    RateOutOfRange { rate: f64, min: f64 },

    #[error("projector is not of conjugate-basis form (verification residual {residual:e})")]
    NotConjugateBasisForm { residual: f64 },

    #[error("basis recovery hit a degenerate combination even after reseeding")]
    DegenerateRecovery,

    #[error("projector precondition failed: {0}")]
    ProjectorPrecondition(String),

    #[error(transparent)]
    Basis(#[from] BasisError),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The maximally entangled ket |Φ⟩ = d^{-1/2} Σ_j |jj⟩.
pub fn max_entangled_ket(d: usize) -> Vec<C64> {
    let scale = 1.0 / (d as f64).sqrt();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for j in 0..d {
        v[j * d + j] = C64::new(scale, 0.0);
    }
    v
}

/// The projector |Φ⟩⟨Φ|.
pub fn max_entangled_projector(d: usize) -> ComplexMatrix {
    let phi = max_entangled_ket(d);
    ComplexMatrix::outer(&phi, &phi)
}

/// A two-outcome test projector on the bipartite space, with |Φ⟩ in its
/// pass eigenspace.
#[derive(Debug, Clone)]
pub struct TestProjector {
    d: usize,
    matrix: ComplexMatrix,
    rank: usize,
    source_basis: Option<Basis>,
}

impl TestProjector {
    /// The conjugate-basis test projector P(B).
    pub fn cb_projector(basis: &Basis) -> Self {
        let d = basis.dim();
        let mut matrix = ComplexMatrix::zeros(d * d, d * d);
        for ket in basis.kets() {
            let conj: Vec<C64> = ket.iter().map(|a| a.conj()).collect();
            let v = linalg::kron_vec(ket, &conj);
            let outer = ComplexMatrix::outer(&v, &v);
            matrix = matrix.add(&outer);
        }
        Self {
            d,
            matrix,
            rank: d,
            source_basis: Some(basis.clone()),
        }
    }

    /// The trivial test: the identity operator, which every state passes.
    pub fn trivial(d: usize) -> Self {
        Self {
            d,
            matrix: ComplexMatrix::identity(d * d),
            rank: d * d,
            source_basis: None,
        }
    }

    /// Wrap an arbitrary projector matrix, computing its rank as the number
    /// of eigenvalues above 1/2.
    pub fn from_matrix(d: usize, matrix: ComplexMatrix) -> Result<Self, StrategyError> {
        if matrix.rows() != d * d || matrix.cols() != d * d {
            return Err(StrategyError::DimensionMismatch {
                context: format!("projector must be {0}x{0}", d * d),
            });
        }
        if !matrix.is_projector(1e-9) {
            return Err(StrategyError::ProjectorPrecondition(
                "matrix is not a projector at tolerance 1e-9".into(),
            ));
        }
        let spec = linalg::hermitian_eig(&matrix, 1e-9)?;
        let rank = spec.eigenvalues.iter().filter(|&&x| x > 0.5).count();
        Ok(Self {
            d,
            matrix,
            rank,
            source_basis: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn source_basis(&self) -> Option<&Basis> {
        self.source_basis.as_ref()
    }

    pub fn is_trivial(&self) -> bool {
        self.source_basis.is_none() && self.rank == self.d * self.d
    }

    /// `max |(P|Φ⟩ - |Φ⟩)[i]|`: how far the target state is from being fixed.
    pub fn target_residual(&self) -> f64 {
        let phi = max_entangled_ket(self.d);
        self.matrix
            .apply(&phi)
            .iter()
            .zip(&phi)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// True iff `tr[(P₁ - |Φ⟩⟨Φ|)(P₂ - |Φ⟩⟨Φ|)] <= 1e-9`.
///
/// For CB projectors this holds exactly when the underlying bases are
/// mutually unbiased. Both projectors are assumed to fix |Φ⟩.
pub fn orthogonality_check(p1: &TestProjector, p2: &TestProjector) -> bool {
    debug_assert!(p1.target_residual() < 1e-9 && p2.target_residual() < 1e-9);
    let phi = max_entangled_projector(p1.dim());
    let a = p1.matrix().sub(&phi);
    let b = p2.matrix().sub(&phi);
    a.mul(&b).trace().re <= 1e-9
}

/// A weighted set of bases defining a CB strategy.
#[derive(Debug, Clone)]
pub struct WeightedBasisSet {
    entries: Vec<(Basis, f64)>,
}

impl WeightedBasisSet {
    pub fn new(entries: Vec<(Basis, f64)>) -> Result<Self, StrategyError> {
        if entries.is_empty() {
            return Err(StrategyError::WeightError("empty basis set".into()));
        }
        let d = entries[0].0.dim();
        for (b, w) in &entries {
            if b.dim() != d {
                return Err(StrategyError::DimensionMismatch {
                    context: format!("basis of dimension {} mixed with dimension {d}", b.dim()),
                });
            }
            if *w < 0.0 {
                return Err(StrategyError::WeightError(format!("negative weight {w}")));
            }
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(StrategyError::WeightError(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { entries })
    }

    pub fn uniform(bases: Vec<Basis>) -> Result<Self, StrategyError> {
        let g = bases.len();
        if g == 0 {
            return Err(StrategyError::WeightError("empty basis set".into()));
        }
        let w = 1.0 / g as f64;
        // Distribute rounding so the weights sum to exactly 1.
        let mut weights = vec![w; g];
        let correction = 1.0 - w * g as f64;
        weights[0] += correction;
        Ok(Self {
            entries: bases.into_iter().zip(weights).collect(),
        })
    }

    pub fn entries(&self) -> &[(Basis, f64)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries[0].0.dim()
    }
}

/// Classification flags of a strategy.
///
/// * `parsimonious` — β = 1/g for g tests;
/// * `optimal` — β = 1/(d+1), the floor for separable strategies;
/// * `perfect` — both at once (forces g = d+1 MUB);
/// * `homogeneous` — Ω = |Φ⟩⟨Φ| + λ(1 - |Φ⟩⟨Φ|);
/// * `singular` — Ω has a zero eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrategyFlags {
    pub parsimonious: bool,
    pub optimal: bool,
    pub perfect: bool,
    pub homogeneous: bool,
    pub singular: bool,
}

/// A verification strategy: weighted tests with the cached operator Ω,
/// its spectrum, β, ν, and classification flags.
#[derive(Debug, Clone)]
pub struct Strategy {
    d: usize,
    tests: Vec<(TestProjector, f64)>,
    omega: ComplexMatrix,
    spectrum: Spectrum,
    beta: f64,
    nu: f64,
    flags: StrategyFlags,
}

impl Strategy {
    fn from_tests(d: usize, tests: Vec<(TestProjector, f64)>) -> Result<Self, StrategyError> {
        let total: f64 = tests.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(StrategyError::WeightError(format!(
                "probabilities sum to {total}"
            )));
        }
        let mut omega = ComplexMatrix::zeros(d * d, d * d);
        for (test, p) in &tests {
            if test.dim() != d {
                return Err(StrategyError::DimensionMismatch {
                    context: format!(
                        "test of dimension {} in a dimension-{d} strategy",
                        test.dim()
                    ),
                });
            }
            omega = omega.add(&test.matrix().scale_re(*p));
        }
        let spectrum = linalg::hermitian_eig(&omega, 1e-9)?;

        let top = spectrum.eigenvalues[0];
        let phi = max_entangled_ket(d);
        let fixed_residual: f64 = omega
            .apply(&phi)
            .iter()
            .zip(&phi)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if (top - 1.0).abs() > 1e-9 || fixed_residual > 1e-9 {
            return Err(StrategyError::ProjectorPrecondition(format!(
                "verification operator does not fix |Φ⟩ (top eigenvalue {top}, residual {fixed_residual:e})"
            )));
        }

        let beta = spectrum.eigenvalues.get(1).copied().unwrap_or(0.0);
        let nu = 1.0 - beta;
        let g = tests.len();
        let parsimonious = (beta - 1.0 / g as f64).abs() <= CLASSIFY_TOL;
        let optimal = (beta - 1.0 / (d as f64 + 1.0)).abs() <= CLASSIFY_TOL;
        let min_eig = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        let singular = min_eig <= SINGULAR_TOL;

        let phi_proj = max_entangled_projector(d);
        let homogeneous_target =
            phi_proj.add(&ComplexMatrix::identity(d * d).sub(&phi_proj).scale_re(beta));
        let homogeneous = omega.max_abs_diff(&homogeneous_target) <= 1e-9;

        let flags = StrategyFlags {
            parsimonious,
            optimal,
            perfect: parsimonious && optimal,
            homogeneous,
            singular,
        };
        Ok(Self {
            d,
            tests,
            omega,
            spectrum,
            beta,
            nu,
            flags,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn tests(&self) -> &[(TestProjector, f64)] {
        &self.tests
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn flags(&self) -> StrategyFlags {
        self.flags
    }

    /// Mix in the trivial test so the result is homogeneous with β = λ.
    ///
    /// Requires this strategy to be optimal and 1/(d+1) ≤ λ < 1; the trivial
    /// test gets probability p = ((d+1)λ - 1)/d and all existing tests are
    /// scaled by 1 - p. At λ = 1/(d+1) the strategy is returned unchanged.
    pub fn homogenize(&self, lambda: f64) -> Result<Self, StrategyError> {
        if !self.flags.optimal {
            return Err(StrategyError::NotOptimalStrategy { beta: self.beta });
        }
        let d = self.d as f64;
        let min = 1.0 / (d + 1.0);
        if lambda < min - 1e-12 || lambda >= 1.0 {
            return Err(StrategyError::LambdaOutOfRange {
                lambda,
                min,
                d: self.d,
            });
        }
        let p = (((d + 1.0) * lambda - 1.0) / d).max(0.0);
        if p == 0.0 {
            return Ok(self.clone());
        }
        let mut tests: Vec<(TestProjector, f64)> = self
            .tests
            .iter()
            .map(|(t, q)| (t.clone(), q * (1.0 - p)))
            .collect();
        tests.push((TestProjector::trivial(self.d), p));
        // Absorb rounding into the trivial test so probabilities sum to 1.
        let total: f64 = tests.iter().map(|(_, q)| q).sum();
        tests.last_mut().unwrap().1 += 1.0 - total;
        Self::from_tests(self.d, tests)
    }

    /// Worst-case probability that a state with infidelity ε passes one
    /// test: `1 - ν(Ω)ε`, together with a state achieving it.
    pub fn max_pass_probability(&self, epsilon: f64) -> (f64, ComplexMatrix) {
        assert!((0.0..=1.0).contains(&epsilon), "epsilon must lie in [0, 1]");
        let phi_proj = max_entangled_projector(self.d);
        let v = self.beta_eigenvector();
        let witness_part = ComplexMatrix::outer(&v, &v);
        let witness = phi_proj
            .scale_re(1.0 - epsilon)
            .add(&witness_part.scale_re(epsilon));
        (1.0 - self.nu * epsilon, witness)
    }

    /// An eigenvector of Ω with eigenvalue β, orthogonal to |Φ⟩.
    fn beta_eigenvector(&self) -> Vec<C64> {
        if self.beta < 1.0 - 1e-9 {
            return self.spectrum.eigenvector(1);
        }
        // β is degenerate with the top eigenvalue; pick any direction of the
        // top eigenspace orthogonal to |Φ⟩.
        let phi = max_entangled_ket(self.d);
        for k in 0..self.spectrum.eigenvalues.len() {
            if (self.spectrum.eigenvalues[k] - 1.0).abs() > 1e-9 {
                break;
            }
            let mut v = self.spectrum.eigenvector(k);
            let overlap = linalg::inner(&phi, &v);
            for (x, p) in v.iter_mut().zip(&phi) {
                *x -= overlap * p;
            }
            let n = linalg::norm(&v);
            if n > 1e-6 {
                for x in &mut v {
                    *x /= n;
                }
                return v;
            }
        }
        unreachable!("top eigenspace of a strategy with β = 1 has dimension >= 2");
    }

    /// Fidelity inferred from the pass rate of an optimal strategy:
    /// `F = ((d+1)·rate - 1)/d`.
    pub fn fidelity_from_pass_rate(&self, rate: f64) -> Result<f64, StrategyError> {
        if !self.flags.optimal {
            return Err(StrategyError::NotOptimalStrategy { beta: self.beta });
        }
        let d = self.d as f64;
        let min = 1.0 / (d + 1.0);
        if rate < min - 1e-12 || rate > 1.0 + 1e-12 {
            return Err(StrategyError::RateOutOfRange { rate, min });
        }
        Ok(((d + 1.0) * rate - 1.0) / d)
    }

    /// JSON form `{d, tests: [{basis|"trivial", p}], beta, nu, flags}`.
    pub fn to_json(&self) -> Value {
        let tests: Vec<Value> = self
            .tests
            .iter()
            .map(|(t, p)| match t.source_basis() {
                Some(b) => json!({ "basis": b.to_json(), "p": p }),
                None => json!({ "basis": "trivial", "p": p }),
            })
            .collect();
        json!({
            "d": self.d,
            "tests": tests,
            "beta": self.beta,
            "nu": self.nu,
            "flags": self.flags,
        })
    }
}

/// Build the CB strategy of a weighted basis set, with spectrum and flags.
pub fn build_strategy(wbs: &WeightedBasisSet) -> Result<Strategy, StrategyError> {
    let d = wbs.dim();
    let tests: Vec<(TestProjector, f64)> = wbs
        .entries()
        .iter()
        .map(|(b, p)| (TestProjector::cb_projector(b), *p))
        .collect();
    Strategy::from_tests(d, tests)
}

/// Convenience: the uniform MUB strategy on `g` bases in dimension `d`.
pub fn mub_strategy(d: usize, g: usize) -> Result<Strategy, StrategyError> {
    let bases = crate::bases::mub_set(d, g)?;
    build_strategy(&WeightedBasisSet::uniform(bases)?)
}

/// True iff the weighted kets form a complex projective 2-design, i.e.
/// Σ p_l P(B_l) equals (1 + d|Φ⟩⟨Φ|)/(d+1) entrywise within `tol`.
pub fn is_2design(wbs: &WeightedBasisSet, tol: f64) -> bool {
    let d = wbs.dim();
    let mut omega = ComplexMatrix::zeros(d * d, d * d);
    for (b, p) in wbs.entries() {
        omega = omega.add(&TestProjector::cb_projector(b).matrix().scale_re(*p));
    }
    let target = ComplexMatrix::identity(d * d)
        .add(&max_entangled_projector(d).scale_re(d as f64))
        .scale_re(1.0 / (d as f64 + 1.0));
    omega.max_abs_diff(&target) <= tol
}

/// Recover the unique basis B with P = P(B) from a rank-d projector that
/// fixes |Φ⟩.
///
/// The support of P is mapped to a d-dimensional space of d×d matrices via
/// |a⟩⊗|b⟩ ↔ |a⟩⟨b*|; a generic real Hermitian combination of that space is
/// simultaneously diagonal in B, so one eigendecomposition produces the
/// candidate kets. The candidate is verified by rebuilding P(B); failure
/// means P is not of conjugate-basis form.
pub fn recover_basis(p: &TestProjector) -> Result<Basis, StrategyError> {
    use rand::{Rng, SeedableRng};

    let d = p.dim();
    if p.rank() != d {
        return Err(StrategyError::ProjectorPrecondition(format!(
            "rank {} != d = {d}",
            p.rank()
        )));
    }
    let residual = p.target_residual();
    if residual > 1e-9 {
        return Err(StrategyError::ProjectorPrecondition(format!(
            "projector does not fix |Φ⟩ (residual {residual:e})"
        )));
    }

    let spec = linalg::hermitian_eig(p.matrix(), 1e-9)?;
    let support: Vec<Vec<C64>> = (0..d).map(|k| spec.eigenvector(k)).collect();

    // Seeded weights keep recovery deterministic; a degenerate combination
    // (eigenvalue gap < 1e-8) triggers one reseed before giving up.
    let mut hspec = None;
    for attempt in 0..2 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(RECOVERY_SEED + attempt);
        let coeffs: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 0.1).collect();

        // Reshape each support vector into a d×d matrix and Hermitize the
        // weighted sum; the result lies in span{|ψ⟩⟨ψ| : ψ ∈ B} whenever P
        // is of CB form.
        let mut combo = ComplexMatrix::zeros(d, d);
        for (vec, c) in support.iter().zip(&coeffs) {
            let reshaped = ComplexMatrix::from_fn(d, d, |a, b| vec[a * d + b]);
            combo = combo.add(&reshaped.scale_re(*c));
        }
        let herm = combo.add(&combo.dagger()).scale_re(0.5);
        let candidate_spec = linalg::hermitian_eig(&herm, 1e-9)?;

        let min_gap = candidate_spec
            .eigenvalues
            .windows(2)
            .map(|w| (w[0] - w[1]).abs())
            .fold(f64::INFINITY, f64::min);
        if min_gap >= 1e-8 {
            hspec = Some(candidate_spec);
            break;
        }
    }
    let hspec = hspec.ok_or(StrategyError::DegenerateRecovery)?;

    let kets: Vec<Vec<C64>> = (0..d).map(|k| hspec.eigenvector(k)).collect();
    let candidate = Basis::new(kets, "recovered")?.canonicalized();
    let rebuilt = TestProjector::cb_projector(&candidate);
    let deviation = rebuilt.matrix().max_abs_diff(p.matrix());
    if deviation <= 1e-8 {
        Ok(candidate)
    } else {
        Err(StrategyError::NotConjugateBasisForm {
            residual: deviation,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{self, mub_set};

    fn qubit_pauli_projector(which: char) -> ComplexMatrix {
        let p = bases::weyl_pair(2).unwrap();
        let (op, sign) = match which {
            'z' => (p.z.clone(), 1.0),
            'x' => (p.x.clone(), 1.0),
            // Y⊗Y carries the minus sign from conjugation: (1 - Y⊗Y)/2.
            'y' => (p.x.mul(&p.z).scale(C64::new(0.0, 1.0)), -1.0),
            _ => unreachable!(),
        };
        ComplexMatrix::identity(4)
            .add(&linalg::kron(&op, &op).scale_re(sign))
            .scale_re(0.5)
    }

    #[test]
    fn cb_projector_matches_qubit_pauli_forms() {
        let bases = mub_set(2, 3).unwrap();
        for (b, which) in bases.iter().zip(['z', 'x', 'y']) {
            let p = TestProjector::cb_projector(b);
            let expected = qubit_pauli_projector(which);
            assert!(
                p.matrix().max_abs_diff(&expected) < 1e-12,
                "basis {} vs (1{}{}⊗{})/2",
                b.label(),
                if which == 'y' { '-' } else { '+' },
                which,
                which
            );
        }
    }

    #[test]
    fn cb_projector_fixes_target_and_has_rank_d() {
        for d in 2..=5 {
            let b = Basis::random(d, 17).unwrap();
            let p = TestProjector::cb_projector(&b);
            assert!(p.target_residual() < 1e-9, "d={d}");
            assert_eq!(p.rank(), d);
            assert!(p.matrix().is_projector(1e-9));
            assert!((p.matrix().trace().re - d as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn qubit_mub_strategy_is_perfect() {
        let s = mub_strategy(2, 3).unwrap();
        assert!((s.beta() - 1.0 / 3.0).abs() < 1e-9);
        let f = s.flags();
        assert!(f.parsimonious && f.optimal && f.perfect && f.homogeneous);
        // Ω = (1 + 2|Φ⟩⟨Φ|)/3: spectrum (1, 1/3, 1/3, 1/3).
        let expected = [1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (got, want) in s.spectrum().eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn complete_mub_strategy_is_optimal_d5() {
        let s = mub_strategy(5, 6).unwrap();
        assert!((s.beta() - 1.0 / 6.0).abs() < 1e-9);
        assert!((s.nu() - 5.0 / 6.0).abs() < 1e-9);
        assert!(s.flags().optimal && s.flags().perfect);
        assert!(!s.flags().singular);
    }

    #[test]
    fn two_mub_strategy_is_parsimonious_not_optimal() {
        let s = mub_strategy(7, 2).unwrap();
        assert!((s.beta() - 0.5).abs() < 1e-9);
        assert!(s.flags().parsimonious);
        assert!(!s.flags().optimal);
        assert!(s.flags().singular);
    }

    #[test]
    fn perturbed_weights_break_parsimony() {
        let bases = mub_set(3, 4).unwrap();
        let g = bases.len() as f64;
        let mut weights = vec![1.0 / g; bases.len()];
        weights[1] += 0.01;
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let wbs = WeightedBasisSet::new(bases.into_iter().zip(weights).collect()).unwrap();
        let s = build_strategy(&wbs).unwrap();
        assert!(!s.flags().parsimonious);
        assert!(!s.flags().optimal);
    }

    #[test]
    fn non_mub_bases_break_parsimony() {
        // Uniform weights but one basis not unbiased with the others.
        let mut bases = mub_set(3, 3).unwrap();
        bases[2] = Basis::random(3, 99).unwrap();
        let wbs = WeightedBasisSet::uniform(bases).unwrap();
        let s = build_strategy(&wbs).unwrap();
        assert!(!s.flags().parsimonious);
    }

    #[test]
    fn uniform_mub_strategies_hit_one_over_g() {
        // g pairwise-MUB bases with uniform weights give β = 1/g.
        for d in 2..=7usize {
            for g in [2usize, 3] {
                let s = mub_strategy(d, g).unwrap();
                assert!((s.beta() - 1.0 / g as f64).abs() < 1e-9, "d={d} g={g}");
                assert!(s.flags().parsimonious);
            }
        }
        for d in [2usize, 3, 5, 7] {
            let s = mub_strategy(d, d + 1).unwrap();
            assert!((s.beta() - 1.0 / (d as f64 + 1.0)).abs() < 1e-9, "d={d}");
        }
    }

    #[test]
    fn optimal_flag_iff_two_design() {
        // Complete MUB: both hold; a perturbed prefix: neither.
        for d in [2usize, 3] {
            let complete = mub_set(d, d + 1).unwrap();
            let wbs = WeightedBasisSet::uniform(complete.clone()).unwrap();
            assert_eq!(
                build_strategy(&wbs).unwrap().flags().optimal,
                is_2design(&wbs, 1e-9)
            );
            assert!(is_2design(&wbs, 1e-9));

            let mut weights = vec![1.0 / (d as f64 + 1.0); d + 1];
            weights[0] += 0.01;
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let perturbed =
                WeightedBasisSet::new(complete.into_iter().zip(weights).collect()).unwrap();
            assert_eq!(
                build_strategy(&perturbed).unwrap().flags().optimal,
                is_2design(&perturbed, 1e-9)
            );
            assert!(!is_2design(&perturbed, 1e-9));
        }
    }

    #[test]
    fn trace_of_omega_is_d() {
        for (d, g) in [(2, 2), (3, 3), (5, 6), (6, 3)] {
            let s = mub_strategy(d, g).unwrap();
            assert!(
                (s.omega().trace().re - d as f64).abs() < 1e-9,
                "d={d} g={g}"
            );
        }
    }

    #[test]
    fn overlap_inequality_and_orthogonality() {
        // tr[P(B₁)P(B₂)] >= 1, equality iff mutually unbiased.
        let mub = mub_set(3, 4).unwrap();
        let p0 = TestProjector::cb_projector(&mub[0]);
        let p1 = TestProjector::cb_projector(&mub[1]);
        let overlap = p0.matrix().mul(p1.matrix()).trace().re;
        assert!((overlap - 1.0).abs() < 1e-9);
        assert!(orthogonality_check(&p0, &p1));

        // Same basis: tr P̄² = d - 1 > 0.
        assert!(!orthogonality_check(&p0, &p0));
        let self_overlap = p0.matrix().mul(p0.matrix()).trace().re;
        assert!((self_overlap - 3.0).abs() < 1e-9);

        // A slightly rotated basis is neither orthogonal nor below the bound.
        let rotated = Basis::random(3, 5).unwrap();
        let pr = TestProjector::cb_projector(&rotated);
        let cross = p0.matrix().mul(pr.matrix()).trace().re;
        assert!(cross > 1.0 + 1e-6);
        assert!(!orthogonality_check(&p0, &pr));

        // tr[P(B₁)P(B₂)] >= 1 for arbitrary basis pairs.
        for d in 2..=4usize {
            for seed in 0..4u64 {
                let a = TestProjector::cb_projector(&Basis::random(d, 300 + seed).unwrap());
                let b = TestProjector::cb_projector(&Basis::random(d, 400 + seed).unwrap());
                let overlap = a.matrix().mul(b.matrix()).trace().re;
                assert!(overlap >= 1.0 - 1e-9, "d={d} seed={seed} overlap={overlap}");
            }
        }
    }

    #[test]
    fn two_design_certificate() {
        for d in [2usize, 3] {
            let complete = mub_set(d, d + 1).unwrap();
            let wbs = WeightedBasisSet::uniform(complete).unwrap();
            assert!(is_2design(&wbs, 1e-9), "complete MUB at d={d}");
        }
        let single = WeightedBasisSet::uniform(vec![Basis::computational(3).unwrap()]).unwrap();
        assert!(!is_2design(&single, 1e-9));
    }

    #[test]
    fn homogenize_reaches_target_beta() {
        // d=2, λ=1/2 → p=1/4, spectrum (1, 1/2, 1/2, 1/2).
        let s = mub_strategy(2, 3).unwrap();
        let h = s.homogenize(0.5).unwrap();
        assert!((h.beta() - 0.5).abs() < 1e-9);
        assert!(h.flags().homogeneous);
        let last = h.tests().last().unwrap();
        assert!(last.0.is_trivial());
        assert!((last.1 - 0.25).abs() < 1e-12);
        let expected = [1.0, 0.5, 0.5, 0.5];
        for (got, want) in h.spectrum().eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9);
        }

        // d=5, λ=1/e → p = (6/e - 1)/5.
        let s5 = mub_strategy(5, 6).unwrap();
        let lam = 1.0 / std::f64::consts::E;
        let h5 = s5.homogenize(lam).unwrap();
        assert!((h5.beta() - lam).abs() < 1e-9);
        let p = h5.tests().last().unwrap().1;
        let expected_p = (6.0 / std::f64::consts::E - 1.0) / 5.0;
        assert!(
            (p - expected_p).abs() < 1e-12,
            "p={p} expected {expected_p}"
        );

        // Boundary λ = 1/(d+1): unchanged.
        let unchanged = s.homogenize(1.0 / 3.0).unwrap();
        assert_eq!(unchanged.tests().len(), s.tests().len());

        assert!(matches!(
            s.homogenize(0.2),
            Err(StrategyError::LambdaOutOfRange { .. })
        ));
        assert!(matches!(
            s.homogenize(1.0),
            Err(StrategyError::LambdaOutOfRange { .. })
        ));
        let not_optimal = mub_strategy(3, 2).unwrap();
        assert!(matches!(
            not_optimal.homogenize(0.5),
            Err(StrategyError::NotOptimalStrategy { .. })
        ));
    }

    #[test]
    fn max_pass_probability_with_witness() {
        let s = mub_strategy(2, 3).unwrap();
        let (p0, _) = s.max_pass_probability(0.0);
        assert!((p0 - 1.0).abs() < 1e-12);

        let (p, witness) = s.max_pass_probability(0.3);
        assert!((p - 0.8).abs() < 1e-12);
        let achieved = s.omega().mul(&witness).trace().re;
        assert!((achieved - p).abs() < 1e-9);
        // The witness is a valid state with the stated infidelity.
        assert!((witness.trace().re - 1.0).abs() < 1e-9);
        let phi = max_entangled_ket(2);
        let fid = linalg::inner(&phi, &witness.apply(&phi)).re;
        assert!((fid - 0.7).abs() < 1e-9);
    }

    #[test]
    fn fidelity_from_pass_rate_checks() {
        let s = mub_strategy(2, 3).unwrap();
        assert!((s.fidelity_from_pass_rate(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.fidelity_from_pass_rate(0.9).unwrap() - 0.85).abs() < 1e-12);
        // Maximally mixed input: rate 1/d → F = 1/d².
        assert!((s.fidelity_from_pass_rate(0.5).unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(
            s.fidelity_from_pass_rate(0.1),
            Err(StrategyError::RateOutOfRange { .. })
        ));
        let two = mub_strategy(2, 2).unwrap();
        assert!(matches!(
            two.fidelity_from_pass_rate(0.9),
            Err(StrategyError::NotOptimalStrategy { .. })
        ));
    }

    #[test]
    fn recover_basis_round_trips() {
        let comp = Basis::computational(2).unwrap();
        let p = TestProjector::cb_projector(&comp);
        let rec = recover_basis(&p).unwrap();
        assert!(rec.max_ket_deviation(&comp.canonicalized()) < 1e-9);

        let fourier = Basis::fourier(3).unwrap();
        let p = TestProjector::cb_projector(&fourier);
        let rec = recover_basis(&p).unwrap();
        assert!(rec.max_ket_deviation(&fourier.canonicalized()) < 1e-7);

        for d in 2..=6 {
            let b = Basis::random(d, 1000 + d as u64).unwrap();
            let rec = recover_basis(&TestProjector::cb_projector(&b)).unwrap();
            assert!(rec.max_ket_deviation(&b) < 1e-7, "d={d}");
        }
    }

    #[test]
    fn recover_basis_rejects_bad_projectors() {
        // Rank-2 projector at d=2 that does not fix |Φ⟩.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e00 = vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let bell_plus = vec![
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
        ];
        let m = ComplexMatrix::outer(&e00, &e00).add(&ComplexMatrix::outer(&bell_plus, &bell_plus));
        let p = TestProjector::from_matrix(2, m).unwrap();
        assert!(matches!(
            recover_basis(&p),
            Err(StrategyError::ProjectorPrecondition(_))
        ));

        // Rank-2 projector that fixes |Φ⟩ but is not of CB form:
        // |Φ⟩⟨Φ| + |01⟩⟨01|.
        let phi = max_entangled_ket(2);
        let e01 = vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let m = ComplexMatrix::outer(&phi, &phi).add(&ComplexMatrix::outer(&e01, &e01));
        let p = TestProjector::from_matrix(2, m).unwrap();
        assert!(matches!(
            recover_basis(&p),
            Err(StrategyError::NotConjugateBasisForm { .. })
        ));
    }

    #[test]
    fn strategy_json_shape() {
        let s = mub_strategy(2, 3).unwrap().homogenize(0.5).unwrap();
        let v = s.to_json();
        assert_eq!(v["d"], 2);
        assert_eq!(v["tests"].as_array().unwrap().len(), 4);
        assert_eq!(v["tests"][3]["basis"], "trivial");
        assert!(v["flags"]["homogeneous"].as_bool().unwrap());
        let beta = v["beta"].as_f64().unwrap();
        assert!((beta - 0.5).abs() < 1e-9);
    }

    #[test]
    fn strategies_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Strategy>();
        assert_send_sync::<TestProjector>();
        assert_send_sync::<WeightedBasisSet>();
    }

    #[test]
    fn weighted_basis_set_validation() {
        let b = Basis::computational(2).unwrap();
        assert!(matches!(
            WeightedBasisSet::new(vec![(b.clone(), 0.5)]),
            Err(StrategyError::WeightError(_))
        ));
        assert!(matches!(
            WeightedBasisSet::new(vec![(b.clone(), -0.5), (b.clone(), 1.5)]),
            Err(StrategyError::WeightError(_))
        ));
        let b3 = Basis::computational(3).unwrap();
        assert!(matches!(
            WeightedBasisSet::new(vec![(b, 0.5), (b3, 0.5)]),
            Err(StrategyError::DimensionMismatch { .. })
        ));
    }
}
