//! Monte Carlo simulation of the verification protocol on i.i.d. noisy
//! states.
//!
//! Each round draws a test l with probability p_l and passes it with the
//! exact probability tr(P_l ρ); acceptance statistics are the observable,
//! so measurement outcomes are never simulated at the two-party level.
//! The RNG is ChaCha8, a counter-based generator seeded from a single
//! 64-bit value, so runs are reproducible and tallies from split runs
//! merge associatively.

use crate::linalg::{self, ComplexMatrix};
use crate::strategy::{max_entangled_ket, max_entangled_projector, Strategy, StrategyError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("epsilon {epsilon} outside [0, {max}] for d = {d}")]
    EpsilonOutOfRange { epsilon: f64, max: f64, d: usize },

    #[error("dimension mismatch: strategy d = {strategy_d}, state d = {state_d}")]
    DimensionMismatch { strategy_d: usize, state_d: usize },

    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Which construction produced a noisy state model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateKind {
    Depolarized,
    WorstCase,
    CustomDensity,
}

/// A density matrix with known infidelity to |Φ⟩.
#[derive(Debug, Clone)]
pub struct NoisyStateModel {
    pub kind: StateKind,
    pub d: usize,
    pub epsilon: f64,
    density: ComplexMatrix,
}

impl NoisyStateModel {
    pub fn density(&self) -> &ComplexMatrix {
        &self.density
    }

    /// Fidelity ⟨Φ|ρ|Φ⟩.
    pub fn fidelity(&self) -> f64 {
        let phi = max_entangled_ket(self.d);
        linalg::inner(&phi, &self.density.apply(&phi)).re
    }

    /// Wrap an explicit density matrix (trace 1, PSD within tolerance).
    pub fn custom(d: usize, density: ComplexMatrix) -> Result<Self, SimError> {
        let trace = density.trace().re;
        if (trace - 1.0).abs() > 1e-10 || !density.is_hermitian(1e-10) {
            return Err(SimError::Strategy(StrategyError::ProjectorPrecondition(
                format!("density must be Hermitian with trace 1 (trace = {trace})"),
            )));
        }
        let mut model = Self {
            kind: StateKind::CustomDensity,
            d,
            epsilon: 0.0,
            density,
        };
        model.epsilon = 1.0 - model.fidelity();
        Ok(model)
    }
}

/// The isotropic state `(1-q)|Φ⟩⟨Φ| + q·I/d²` with q chosen so the
/// fidelity is exactly 1 - ε. Valid for 0 <= ε <= 1 - 1/d².
pub fn depolarized_state(d: usize, epsilon: f64) -> Result<NoisyStateModel, SimError> {
    let max = 1.0 - 1.0 / (d * d) as f64;
    if !(0.0..=1.0).contains(&epsilon) || epsilon > max {
        return Err(SimError::EpsilonOutOfRange { epsilon, max, d });
    }
    let q = epsilon / max;
    let density = max_entangled_projector(d)
        .scale_re(1.0 - q)
        .add(&ComplexMatrix::identity(d * d).scale_re(q / (d * d) as f64));
    Ok(NoisyStateModel {
        kind: StateKind::Depolarized,
        d,
        epsilon,
        density,
    })
}

/// The state maximizing the pass probability at infidelity ε:
/// `σ* = (1-ε)|Φ⟩⟨Φ| + ε|v_β⟩⟨v_β|` with v_β a β-eigenvector of Ω, so that
/// `tr(Ωσ*) = 1 - ν(Ω)ε`.
pub fn worst_case_state(strategy: &Strategy, epsilon: f64) -> NoisyStateModel {
    debug_assert!((0.0..=1.0).contains(&epsilon));
    let (_, density) = strategy.max_pass_probability(epsilon);
    NoisyStateModel {
        kind: StateKind::WorstCase,
        d: strategy.dim(),
        epsilon,
        density,
    }
}

/// Tallies of a protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub trials: u64,
    pub passes: u64,
    /// Per-test (uses, passes), indexed like the strategy's test list.
    pub per_test: Vec<(u64, u64)>,
}

impl RunResult {
    pub fn pass_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.passes as f64 / self.trials as f64
        }
    }

    /// Binomial standard error of the pass rate.
    pub fn stderr(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.pass_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Merge tallies from independent runs; order-independent.
    pub fn merge(&self, other: &RunResult) -> RunResult {
        assert_eq!(
            self.per_test.len(),
            other.per_test.len(),
            "merging incompatible runs"
        );
        RunResult {
            seed: self.seed.min(other.seed),
            trials: self.trials + other.trials,
            passes: self.passes + other.passes,
            per_test: self
                .per_test
                .iter()
                .zip(&other.per_test)
                .map(|((u1, p1), (u2, p2))| (u1 + u2, p1 + p2))
                .collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "trials": self.trials,
            "passes": self.passes,
            "per_test": self.per_test,
        })
    }
}

/// Run `n` rounds of the protocol: draw a test by its probability, pass
/// with probability tr(P_l ρ). Deterministic for a given seed.
pub fn run_protocol(
    strategy: &Strategy,
    model: &NoisyStateModel,
    n: u64,
    seed: u64,
) -> Result<RunResult, SimError> {
    if strategy.dim() != model.d {
        return Err(SimError::DimensionMismatch {
            strategy_d: strategy.dim(),
            state_d: model.d,
        });
    }
    let pass_probs: Vec<f64> = strategy
        .tests()
        .iter()
        .map(|(t, _)| t.matrix().mul(model.density()).trace().re.clamp(0.0, 1.0))
        .collect();
    let weights: Vec<f64> = strategy.tests().iter().map(|(_, p)| *p).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0u64;
    let mut per_test = vec![(0u64, 0u64); weights.len()];
    for _ in 0..n {
        let mut u: f64 = rng.random();
        let mut test_index = weights.len() - 1;
        for (l, w) in weights.iter().enumerate() {
            if u < *w {
                test_index = l;
                break;
            }
            u -= w;
        }
        per_test[test_index].0 += 1;
        if rng.random::<f64>() < pass_probs[test_index] {
            per_test[test_index].1 += 1;
            passes += 1;
        }
    }
    Ok(RunResult {
        seed,
        trials: n,
        passes,
        per_test,
    })
}

/// Analytic single-round pass probability tr(Ωρ).
pub fn analytic_pass_probability(strategy: &Strategy, model: &NoisyStateModel) -> f64 {
    strategy.omega().mul(model.density()).trace().re
}

/// Estimate the fidelity from a run of an optimal strategy via
/// `F = ((d+1)·rate - 1)/d`, with the propagated binomial standard error.
pub fn estimate_fidelity(strategy: &Strategy, result: &RunResult) -> Result<(f64, f64), SimError> {
    let rate = result.pass_rate();
    let estimate =
        strategy.fidelity_from_pass_rate(rate.clamp(1.0 / (strategy.dim() as f64 + 1.0), 1.0))?;
    let d = strategy.dim() as f64;
    let stderr = (d + 1.0) / d * result.stderr();
    Ok((estimate, stderr))
}
