//! Construction, classification, and evaluation of verification strategies
//! for maximally entangled states built from local projective measurements.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! bases  ──►  strategy  ──►  sim
//!   │            │
//! linalg      counting, robustness
//! ```
//!
//! * [`linalg`] — dense complex matrices, Kronecker products, partial
//!   trace/transpose, and a Jacobi eigensolver for Hermitian matrices.
//! * [`bases`] — orthonormal bases, Heisenberg-Weyl operators, and mutually
//!   unbiased basis (MUB) sets.
//! * [`strategy`] — conjugate-basis test projectors, verification operators
//!   Ω with their spectra, strategy classification, 2-design certificates,
//!   and basis recovery from separable projectors.
//! * [`counting`] — closed-form test counts and fidelity bounds for the
//!   nonadversarial and adversarial scenarios, entanglement-detection
//!   counts, and one-test thresholds.
//! * [`robustness`] — robustness-of-entanglement quantities from Schmidt
//!   coefficients and the induced lower bounds on β(Ω).
//! * [`sim`] — seeded Monte Carlo simulation of the verification protocol
//!   on i.i.d. noisy states.

pub mod bases;
pub mod counting;
pub mod linalg;
pub mod robustness;
pub mod sim;
pub mod strategy;

pub use bases::{Basis, BasisError, WeylPair};
pub use counting::{CountError, CountPlan, EtaZeta, OneTestThreshold, Scenario};
pub use linalg::{ComplexMatrix, LinalgError, Spectrum, C64};
pub use robustness::{RobustnessError, RobustnessReport, SchmidtVector};
pub use sim::{NoisyStateModel, RunResult, SimError, StateKind};
pub use strategy::{Strategy, StrategyError, StrategyFlags, TestProjector, WeightedBasisSet};
