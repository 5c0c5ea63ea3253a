//! Robustness-of-entanglement quantities for bipartite pure states.
//!
//! For a state with Schmidt coefficients s₀ ≥ s₁ ≥ ... the closed forms are
//!
//! ```text
//! E_R = (Σ_j s_j)² - 1       robustness of entanglement
//! R   = D s₀ s₁              random robustness, D = d²
//! T   = (Σ_j s_j)²           minimal trace of a dominating separable test
//! ```
//!
//! and they bound the second eigenvalue of any separable verification
//! strategy: β(Ω) ≥ E_R/(D-1), and β(Ω) ≥ s₀s₁/(1+s₀s₁) for homogeneous Ω.
//! The latter is witnessed by the partial transpose, which has an
//! eigenvalue equal to -s₀s₁.

use crate::linalg::{self, ComplexMatrix, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RobustnessError {
    #[error("invalid Schmidt vector: {0}")]
    InvalidSchmidt(String),

    #[error("dimension {d} too large for the PPT witness (limit {limit})")]
    DimensionTooLarge { d: usize, limit: usize },
}

/// Maximum local dimension for which the PPT witness builds the d²×d² state.
const PPT_DIM_LIMIT: usize = 12;

/// Nonincreasing Schmidt coefficients of a bipartite pure state,
/// normalized so Σ s_j² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtVector {
    coeffs: Vec<f64>,
}

impl SchmidtVector {
    /// Sorts the input nonincreasing and renormalizes when Σ s² is within
    /// 1e-8 of 1; rejects negative entries or badly normalized data.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self, RobustnessError> {
        if coeffs.len() < 2 {
            return Err(RobustnessError::InvalidSchmidt(format!(
                "need at least 2 coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&s| s < 0.0 || !s.is_finite()) {
            return Err(RobustnessError::InvalidSchmidt(
                "coefficients must be finite and nonnegative".into(),
            ));
        }
        let norm_sq: f64 = coeffs.iter().map(|s| s * s).sum();
        if (norm_sq - 1.0).abs() > 1e-8 {
            return Err(RobustnessError::InvalidSchmidt(format!(
                "squared coefficients sum to {norm_sq}, not 1"
            )));
        }
        let scale = norm_sq.sqrt();
        for s in &mut coeffs {
            *s /= scale;
        }
        coeffs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { coeffs })
    }

    /// The maximally entangled state: all coefficients 1/√d.
    pub fn maximally_entangled(d: usize) -> Result<Self, RobustnessError> {
        Self::new(vec![1.0 / (d as f64).sqrt(); d])
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// The state Σ s_j |jj⟩ as a d²-dimensional ket.
    pub fn to_ket(&self) -> Vec<C64> {
        let d = self.dim();
        let mut ket = vec![C64::new(0.0, 0.0); d * d];
        for (j, s) in self.coeffs.iter().enumerate() {
            ket[j * d + j] = C64::new(*s, 0.0);
        }
        ket
    }
}

/// Robustness quantities and the induced β lower bounds.
#[derive(Debug, Clone, Copy)]
pub struct RobustnessReport {
    pub e_r: f64,
    pub random_robustness: f64,
    pub t: f64,
    /// β(Ω) ≥ (T - 1)/(D - 1) for any separable strategy.
    pub beta_lower_separable: f64,
    /// β(Ω) ≥ s₀s₁/(1 + s₀s₁) for homogeneous separable strategies.
    pub beta_lower_homogeneous: f64,
    /// Dimension of the whole Hilbert space, D = d².
    pub big_d: usize,
}

/// Evaluate the closed-form robustness quantities of a Schmidt vector.
pub fn robustness_quantities(s: &SchmidtVector) -> RobustnessReport {
    let d = s.dim();
    let big_d = d * d;
    let sum: f64 = s.coeffs().iter().sum();
    let t = sum * sum;
    let e_r = t - 1.0;
    let s0s1 = s.coeffs()[0] * s.coeffs()[1];
    RobustnessReport {
        e_r,
        random_robustness: big_d as f64 * s0s1,
        t,
        beta_lower_separable: e_r / (big_d as f64 - 1.0),
        beta_lower_homogeneous: s0s1 / (1.0 + s0s1),
        big_d,
    }
}

/// Numeric witness of the homogeneous bound: builds |Ψ⟩ = Σ s_j|jj⟩,
/// partial-transposes its projector, and returns the negative of the
/// minimal eigenvalue. Equals s₀s₁ up to eigensolver accuracy.
pub fn ppt_beta_witness(s: &SchmidtVector) -> Result<f64, RobustnessError> {
    let d = s.dim();
    if d > PPT_DIM_LIMIT {
        return Err(RobustnessError::DimensionTooLarge {
            d,
            limit: PPT_DIM_LIMIT,
        });
    }
    let ket = s.to_ket();
    let rho = ComplexMatrix::outer(&ket, &ket);
    let pt = linalg::partial_transpose_b(&rho, d)
        .expect("state projector has the right shape by construction");
    let spec = linalg::hermitian_eig(&pt, 1e-9)
        .expect("partial transpose of a Hermitian matrix is Hermitian");
    let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(-min)
}
