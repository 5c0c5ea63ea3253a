//! Closed-form test counts, fidelity bounds, and one-test thresholds for
//! the nonadversarial and adversarial verification scenarios.
//!
//! All quantities are elementary functions of (ε, δ) and either the
//! spectral gap ν(Ω) (nonadversarial, singular adversarial) or the
//! homogeneous parameter λ = β(Ω). Ceiling evaluations guard against
//! floating-point boundary error: log-ratio results within 1e-9 of an
//! integer are confirmed by direct power comparison before rounding.
//!
//! The `approx_*` functions are asymptotic expansions; they are never used
//! inside the exact paths.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("domain error: {0}")]
    Domain(String),
}

fn check_open_unit(name: &str, x: f64) -> Result<(), CountError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(CountError::Domain(format!(
            "{name} = {x} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Which verification scenario a [`CountPlan`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Nonadversarial,
    AdversarialSingular,
    AdversarialHomogeneous,
}

/// Inputs and outputs of a test-count computation.
#[derive(Debug, Clone)]
pub struct CountPlan {
    pub scenario: Scenario,
    pub epsilon: f64,
    pub delta: f64,
    /// ν(Ω) for the nonadversarial and singular scenarios, λ = β(Ω) for the
    /// homogeneous adversarial scenario.
    pub nu_or_lambda: f64,
    pub tests: u64,
    pub one_test: bool,
    pub k_star: Option<u64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
}

/// Relative slack used when comparing powers against δ at ceiling
/// boundaries, so identities like (1-νε)^N = δ evaluate exactly.
const POWER_SLACK: f64 = 1e-12;

fn power_le(q: f64, n: u64, delta: f64) -> bool {
    q.powi(n as i32) <= delta * (1.0 + POWER_SLACK)
}

/// Ceiling with a snap: values within 1e-9 of an integer round to it.
fn ceil_guard(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * (1.0f64).max(x.abs() * 1e-3) {
        nearest
    } else {
        x.ceil()
    }
}

/// Minimum number of tests in the nonadversarial scenario:
/// `N = ⌈ln δ / ln(1 - νε)⌉`, the smallest N with `(1-νε)^N <= δ`.
pub fn tests_nonadversarial(epsilon: f64, delta: f64, nu: f64) -> Result<u64, CountError> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(CountError::Domain(format!("nu = {nu} must lie in (0, 1]")));
    }
    let q = 1.0 - nu * epsilon;
    if q <= 0.0 {
        return Ok(1);
    }
    // Seed with the log formula, then settle the boundary by direct power
    // comparison in both directions.
    let ratio = delta.ln() / q.ln();
    let mut n = ratio.ceil().max(1.0) as u64;
    while n > 1 && power_le(q, n - 1, delta) {
        n -= 1;
    }
    while !power_le(q, n, delta) {
        n += 1;
    }
    Ok(n)
}

/// One test suffices in the nonadversarial scenario iff `νε + δ >= 1`.
pub fn one_test_nonadversarial(epsilon: f64, delta: f64, nu: f64) -> bool {
    nu * epsilon + delta >= 1.0
}

/// Fidelity bound for a singular strategy after `N` passed tests in the
/// adversarial scenario:
/// `F = 1 - min{(1-δ)/(Nδν), 1/((N+1)δ), 1}`.
///
/// The returned flag is true when the bound is an equality (ν >= 1/2)
/// rather than an upper bound.
pub fn fidelity_bound_singular(n: u64, delta: f64, nu: f64) -> Result<(f64, bool), CountError> {
    if n == 0 {
        return Err(CountError::Domain("need N >= 1".into()));
    }
    check_open_unit("delta", delta)?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(CountError::Domain(format!("nu = {nu} must lie in (0, 1]")));
    }
    let nf = n as f64;
    let first = (1.0 - delta) / (nf * delta * nu);
    let second = 1.0 / ((nf + 1.0) * delta);
    let value = 1.0 - first.min(second).min(1.0);
    Ok((value, nu >= 0.5))
}

/// Minimum number of tests for a singular strategy in the adversarial
/// scenario: `min{⌈(1-δ)/(νδε)⌉, ⌈1/(δε) - 1⌉}`.
pub fn tests_adversarial_singular(epsilon: f64, delta: f64, nu: f64) -> Result<u64, CountError> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(CountError::Domain(format!("nu = {nu} must lie in (0, 1]")));
    }
    let a = ceil_guard((1.0 - delta) / (nu * delta * epsilon));
    let b = ceil_guard(1.0 / (delta * epsilon) - 1.0);
    Ok((a.min(b).max(1.0)) as u64)
}

/// `η_k` and `ζ_k`, the pass-statistics coefficients of the homogeneous
/// adversarial analysis.
#[derive(Debug, Clone, Copy)]
pub struct EtaZeta {
    pub n: u64,
    pub lambda: f64,
    pub k: u64,
    pub eta: f64,
    pub zeta: f64,
}

/// `η_k = (kλ^{k-1} + (N+1-k)λ^k)/(N+1)` and
/// `ζ_k = ((N+1-k)λ^k)/(N+1)` for `0 <= k <= N+1`.
pub fn eta_zeta(n: u64, lambda: f64, k: u64) -> EtaZeta {
    debug_assert!(k <= n + 1);
    let nf = n as f64;
    let kf = k as f64;
    let pow_km1 = if k == 0 {
        0.0
    } else {
        lambda.powi(k as i32 - 1)
    };
    let pow_k = lambda.powi(k as i32);
    let eta = (kf * pow_km1 + (nf + 1.0 - kf) * pow_k) / (nf + 1.0);
    let zeta = ((nf + 1.0 - kf) * pow_k) / (nf + 1.0);
    EtaZeta {
        n,
        lambda,
        k,
        eta,
        zeta,
    }
}

/// Details of a homogeneous adversarial fidelity evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FidelityParts {
    pub fidelity: f64,
    pub k: u64,
    pub p1: f64,
    pub p2: f64,
}

/// Minimum fidelity guaranteed by a homogeneous strategy with parameter λ
/// after `N` passed tests at significance level δ:
///
/// ```text
/// F(N, δ, λ) = 0                                 if δ <= λ^N
///            = δ^{-1}[p₁ζ_k(λ) + p₂ζ_{k+1}(λ)]   otherwise
/// ```
///
/// where k is the largest integer with `η_k(λ) >= δ` and p₁ + p₂ = 1 solve
/// `p₁η_k + p₂η_{k+1} = δ`.
pub fn min_fidelity_adversarial(n: u64, delta: f64, lambda: f64) -> Result<f64, CountError> {
    Ok(min_fidelity_adversarial_parts(n, delta, lambda)?.fidelity)
}

/// As [`min_fidelity_adversarial`], exposing k, p₁, p₂.
pub fn min_fidelity_adversarial_parts(
    n: u64,
    delta: f64,
    lambda: f64,
) -> Result<FidelityParts, CountError> {
    if n == 0 {
        return Err(CountError::Domain("need N >= 1".into()));
    }
    check_open_unit("delta", delta)?;
    check_open_unit("lambda", lambda)?;
    if delta <= lambda.powi(n as i32) {
        return Ok(FidelityParts {
            fidelity: 0.0,
            k: 0,
            p1: 1.0,
            p2: 0.0,
        });
    }
    // Largest k with η_k >= δ, by scanning; monotonicity of η in k is not
    // assumed. η_0 = 1 > δ, and η_{N+1} = λ^N < δ here, so k <= N exists.
    let mut k = n + 1;
    loop {
        if eta_zeta(n, lambda, k).eta >= delta {
            break;
        }
        k -= 1;
    }
    let low = eta_zeta(n, lambda, k);
    let high = eta_zeta(n, lambda, k + 1);
    let p1 = (delta - high.eta) / (low.eta - high.eta);
    let p2 = 1.0 - p1;
    let fidelity = (p1 * low.zeta + p2 * high.zeta) / delta;
    Ok(FidelityParts {
        fidelity,
        k,
        p1,
        p2,
    })
}

/// The closed form of `F(1, δ, λ)`, kept as an independent cross-check of
/// the piecewise evaluator.
pub fn min_fidelity_adversarial_one_test(delta: f64, lambda: f64) -> Result<f64, CountError> {
    check_open_unit("delta", delta)?;
    check_open_unit("lambda", lambda)?;
    if delta <= lambda {
        Ok(0.0)
    } else if delta <= (1.0 + lambda) / 2.0 {
        Ok(lambda * (delta - lambda) / (delta * (1.0 - lambda)))
    } else {
        Ok((delta * (2.0 - lambda) - 1.0) / (delta * (1.0 - lambda)))
    }
}

/// One test suffices for a homogeneous strategy in the adversarial scenario
/// iff `λ(δ-λ)/(δ(1-λ)) >= 1 - ε`.
///
/// The condition is also necessary when δ <= (1+λ)/2. It implies δ > λ, so
/// it returns false whenever λ >= δ.
pub fn one_test_adversarial(epsilon: f64, delta: f64, lambda: f64) -> bool {
    lambda * (delta - lambda) / (delta * (1.0 - lambda)) >= 1.0 - epsilon
}

/// `Ñ(ε, δ, λ, k)`, the candidate test count minimized over k.
fn n_tilde(epsilon: f64, delta: f64, lambda: f64, k: u64) -> f64 {
    let f = 1.0 - epsilon;
    let nu = 1.0 - lambda;
    let kf = k as f64;
    (kf * nu * nu * delta * f + lambda.powi(k as i32 + 1) + lambda * delta * (kf * nu - 1.0))
        / (lambda * nu * delta * epsilon)
}

/// Minimum number of tests for a homogeneous strategy in the adversarial
/// scenario: `N = ⌈Ñ(ε, δ, λ, k*)⌉` with k* the largest integer satisfying
/// `δ <= λ^k / (F + λε)`.
pub fn tests_adversarial_homogeneous(
    epsilon: f64,
    delta: f64,
    lambda: f64,
) -> Result<CountPlan, CountError> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    check_open_unit("lambda", lambda)?;
    let f = 1.0 - epsilon;
    let threshold = delta * (f + lambda * epsilon);
    // Largest k with λ^k >= δ(F + λε); k = 0 always qualifies since
    // F + λε < 1. Seed with the log formula, settle boundaries directly.
    let qualifies = |k: u64| lambda.powi(k as i32) >= threshold * (1.0 - POWER_SLACK);
    let mut k = (threshold.ln() / lambda.ln()).floor().max(0.0) as u64;
    while k > 0 && !qualifies(k) {
        k -= 1;
    }
    while qualifies(k + 1) {
        k += 1;
    }
    let n = ceil_guard(n_tilde(epsilon, delta, lambda, k)).max(1.0) as u64;
    Ok(CountPlan {
        scenario: Scenario::AdversarialHomogeneous,
        epsilon,
        delta,
        nu_or_lambda: lambda,
        tests: n,
        one_test: one_test_adversarial(epsilon, delta, lambda),
        k_star: Some(k),
        p1: None,
        p2: None,
    })
}

/// Exhaustive minimization of Ñ over k, for cross-checking the k* rule.
pub fn tests_adversarial_homogeneous_oracle(
    epsilon: f64,
    delta: f64,
    lambda: f64,
) -> Result<u64, CountError> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    check_open_unit("lambda", lambda)?;
    let k_max = (delta.ln() / lambda.ln()).ceil() as u64 + 2;
    let best = (0..=k_max)
        .map(|k| n_tilde(epsilon, delta, lambda, k))
        .fold(f64::INFINITY, f64::min);
    Ok(ceil_guard(best).max(1.0) as u64)
}

/// Number of tests certifying entanglement of |Φ⟩ in the nonadversarial
/// scenario: the general count at ε = (d-1)/d.
pub fn entanglement_tests_nonadversarial(d: usize, delta: f64, nu: f64) -> Result<u64, CountError> {
    if d < 2 {
        return Err(CountError::Domain(format!("d = {d} must be >= 2")));
    }
    let epsilon = (d as f64 - 1.0) / d as f64;
    tests_nonadversarial(epsilon, delta, nu)
}

/// The same count for the optimal strategy ν = d/(d+1), evaluated through
/// the reduced closed form `⌈ln δ / (ln 2 - ln(d+1))⌉`.
pub fn entanglement_tests_nonadversarial_optimal(d: usize, delta: f64) -> Result<u64, CountError> {
    if d < 2 {
        return Err(CountError::Domain(format!("d = {d} must be >= 2")));
    }
    check_open_unit("delta", delta)?;
    let ratio = delta.ln() / (2.0f64.ln() - ((d + 1) as f64).ln());
    Ok(ceil_guard(ratio).max(1.0) as u64)
}

/// Number of tests certifying entanglement of |Φ⟩ in the adversarial
/// scenario. λ = 0 is the singular entangling-test strategy,
/// `⌈d(1-δ)/((d-1)δ)⌉`; λ > 0 delegates to the homogeneous count at
/// ε = (d-1)/d.
pub fn entanglement_tests_adversarial(
    d: usize,
    delta: f64,
    lambda: f64,
) -> Result<u64, CountError> {
    if d < 2 {
        return Err(CountError::Domain(format!("d = {d} must be >= 2")));
    }
    check_open_unit("delta", delta)?;
    if !(0.0..1.0).contains(&lambda) {
        return Err(CountError::Domain(format!(
            "lambda = {lambda} must lie in [0, 1)"
        )));
    }
    if lambda == 0.0 {
        let df = d as f64;
        return Ok(ceil_guard(df * (1.0 - delta) / ((df - 1.0) * delta)).max(1.0) as u64);
    }
    let epsilon = (d as f64 - 1.0) / d as f64;
    Ok(tests_adversarial_homogeneous(epsilon, delta, lambda)?.tests)
}

/// The λ minimizing the small-δ adversarial entanglement count: the unique
/// root of `1 + (d-1)λ + ln λ = 0` in (0, 1), found by bisection.
pub fn lambda_star(d: usize) -> Result<f64, CountError> {
    if d < 2 {
        return Err(CountError::Domain(format!("d = {d} must be >= 2")));
    }
    let f = |x: f64| 1.0 + (d as f64 - 1.0) * x + x.ln();
    // f is strictly increasing on (0, 1) with f(0+) = -∞ and f(1-) = d > 0.
    let mut lo = 1e-12;
    let mut hi = 1.0 - 1e-12;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The one-test entanglement-certification threshold of the adversarial
/// scenario at significance level δ.
#[derive(Debug, Clone, Copy)]
pub struct OneTestThreshold {
    pub delta: f64,
    /// Smallest local dimension at which one test can certify entanglement.
    pub d_star: u64,
}

impl OneTestThreshold {
    /// The admissible interval `[λ₋, λ₊]` of β(Ω) at dimension `d >= d*`:
    /// `λ± = ((d+1)δ ± √((d+1)²δ² - 4dδ)) / (2d)`.
    pub fn lambda_bounds(&self, d: u64) -> Result<(f64, f64), CountError> {
        if d < self.d_star {
            return Err(CountError::Domain(format!(
                "d = {d} below the one-test threshold d* = {}",
                self.d_star
            )));
        }
        let df = d as f64;
        let delta = self.delta;
        let disc = (df + 1.0).powi(2) * delta * delta - 4.0 * df * delta;
        if disc < -1e-12 {
            return Err(CountError::Domain(format!(
                "negative discriminant {disc} at d = {d}; threshold inconsistent"
            )));
        }
        let root = disc.max(0.0).sqrt();
        let low = ((df + 1.0) * delta - root) / (2.0 * df);
        let high = ((df + 1.0) * delta + root) / (2.0 * df);
        Ok((low, high))
    }

    /// Equivalent form of the dimension condition: `δ >= 4d/(d+1)²`.
    pub fn dimension_admits_one_test(&self, d: u64) -> bool {
        let df = d as f64;
        self.delta >= 4.0 * df / (df + 1.0).powi(2)
    }
}

/// `d* = ⌈(2 + 2√(1-δ) - δ)/δ⌉`, the smallest dimension at which one test
/// certifies entanglement adversarially at significance level δ <= 1/2.
pub fn one_test_threshold(delta: f64) -> Result<OneTestThreshold, CountError> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(CountError::Domain(format!(
            "delta = {delta} must lie in (0, 1/2]"
        )));
    }
    let d_star = ceil_guard((2.0 + 2.0 * (1.0 - delta).sqrt() - delta) / delta) as u64;
    Ok(OneTestThreshold { delta, d_star })
}

/// Asymptotic count for δ → 0 at fixed λ: `(F + λε)/(λε ln λ) · ln δ`.
pub fn approx_tests_small_delta(epsilon: f64, delta: f64, lambda: f64) -> f64 {
    let f = 1.0 - epsilon;
    (f + lambda * epsilon) / (lambda * epsilon * lambda.ln()) * delta.ln()
}

/// Asymptotic count in the high-precision limit ε, δ → 0:
/// `ln δ / (λε ln λ)`, minimized (to `e·ε⁻¹·ln δ⁻¹`) at λ = 1/e.
pub fn approx_tests_high_precision(epsilon: f64, delta: f64, lambda: f64) -> f64 {
    delta.ln() / (lambda * epsilon * lambda.ln())
}

/// Asymptotic adversarial entanglement count for δ ≪ λ:
/// `(1 + (d-1)λ)/((d-1)λ ln λ) · ln δ`.
pub fn approx_entanglement_tests_adversarial(d: usize, delta: f64, lambda: f64) -> f64 {
    let df = d as f64;
    (1.0 + (df - 1.0) * lambda) / ((df - 1.0) * lambda * lambda.ln()) * delta.ln()
}

/// Asymptotic adversarial entanglement count at λ = 1/(d-1), d >= 3:
/// `2 ln δ⁻¹ / ln(d-1)`. Derived under the assumption δ ≪ λ.
pub fn approx_entanglement_tests_inverse_dim(d: usize, delta: f64) -> f64 {
    2.0 * (1.0 / delta).ln() / ((d as f64) - 1.0).ln()
}
