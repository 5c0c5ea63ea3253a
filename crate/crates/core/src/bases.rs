//! Orthonormal bases, Heisenberg-Weyl operators, and mutually unbiased
//! basis (MUB) sets.
//!
//! The generalized Pauli operators
//!
//! ```text
//! Z|j⟩ = ω^j |j⟩,    X|j⟩ = |j+1 mod d⟩,    ω = e^{2πi/d}
//! ```
//!
//! supply the measurement bases used everywhere else: the eigenbases of
//! Z, X, and XZ are mutually unbiased for every d ≥ 2, and for prime d the
//! eigenbases of Z, X, XZ, XZ², ..., XZ^{d-1} form a complete set of d+1
//! MUB. Unbiasedness is always certified numerically after construction
//! rather than assumed.

use crate::linalg::{self, ComplexMatrix, LinalgError, C64};
use serde_json::{json, Value};
use thiserror::Error;

/// Orthonormality tolerance enforced on every constructed basis.
pub const GRAM_TOL: f64 = 1e-10;

/// Tolerance of the post-hoc mutual-unbiasedness certificate.
pub const MUB_CERT_TOL: f64 = 1e-8;

/// Amplitudes below this threshold count as zero when fixing ket phases.
const PHASE_FIX_TOL: f64 = 1e-8;

/// Tolerance used when ordering kets lexicographically; coordinates closer
/// than this are treated as tied and the comparison moves on.
const ORDER_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("invalid dimension d={d}; need d >= 2")]
    InvalidDimension { d: usize },

    #[error("unsupported MUB request: g={g} bases at non-prime d={d} (only g <= 3 available)")]
    UnsupportedDimension { d: usize, g: usize },

    #[error("unbiasedness certificate failed for bases {i} and {j}: worst overlap deviation {deviation:e}")]
    UnbiasednessViolation { i: usize, j: usize, deviation: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("kets are not orthonormal: Gram residual {residual:e} > {tol:e}")]
    NotOrthonormal { residual: f64, tol: f64 },

    #[error("malformed basis serialization: {0}")]
    Malformed(String),

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An ordered set of `d` orthonormal kets in the local space.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    d: usize,
    kets: Vec<Vec<C64>>,
    label: String,
}

impl Basis {
    /// Build a basis from explicit kets, checking orthonormality to 1e-10.
    pub fn new(kets: Vec<Vec<C64>>, label: impl Into<String>) -> Result<Self, BasisError> {
        let d = kets.len();
        if d < 2 {
            return Err(BasisError::InvalidDimension { d });
        }
        for ket in &kets {
            if ket.len() != d {
                return Err(BasisError::DimensionMismatch {
                    context: format!("ket of length {} in a dimension-{d} basis", ket.len()),
                });
            }
        }
        let basis = Self {
            d,
            kets,
            label: label.into(),
        };
        let residual = basis.gram_residual();
        if residual > GRAM_TOL {
            return Err(BasisError::NotOrthonormal {
                residual,
                tol: GRAM_TOL,
            });
        }
        Ok(basis)
    }

    /// The computational basis |0⟩, ..., |d-1⟩.
    pub fn computational(d: usize) -> Result<Self, BasisError> {
        if d < 2 {
            return Err(BasisError::InvalidDimension { d });
        }
        let kets = (0..d)
            .map(|j| {
                let mut ket = vec![C64::new(0.0, 0.0); d];
                ket[j] = C64::new(1.0, 0.0);
                ket
            })
            .collect();
        Self::new(kets, "computational")
    }

    /// The Fourier basis: ket k has amplitudes ω^{jk}/√d.
    pub fn fourier(d: usize) -> Result<Self, BasisError> {
        if d < 2 {
            return Err(BasisError::InvalidDimension { d });
        }
        let scale = 1.0 / (d as f64).sqrt();
        let kets = (0..d)
            .map(|k| {
                (0..d)
                    .map(|j| {
                        C64::from_polar(
                            scale,
                            2.0 * std::f64::consts::PI * (j * k % d) as f64 / d as f64,
                        )
                    })
                    .collect()
            })
            .collect();
        Self::new(kets, "fourier")
    }

    /// A pseudorandom (Haar-like) basis in canonical order, for experiments
    /// and round-trip tests. Deterministic for a given seed.
    pub fn random(d: usize, seed: u64) -> Result<Self, BasisError> {
        use rand::{Rng, SeedableRng};
        if d < 2 {
            return Err(BasisError::InvalidDimension { d });
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut kets: Vec<Vec<C64>> = Vec::with_capacity(d);
        while kets.len() < d {
            let mut v: Vec<C64> = (0..d)
                .map(|_| {
                    C64::new(
                        rng.random::<f64>() * 2.0 - 1.0,
                        rng.random::<f64>() * 2.0 - 1.0,
                    )
                })
                .collect();
            // Two Gram-Schmidt passes keep the Gram residual near machine precision.
            for _ in 0..2 {
                for prev in &kets {
                    let overlap = linalg::inner(prev, &v);
                    for (x, p) in v.iter_mut().zip(prev) {
                        *x -= overlap * p;
                    }
                }
            }
            let n = linalg::norm(&v);
            if n < 1e-6 {
                continue;
            }
            for x in &mut v {
                *x /= n;
            }
            kets.push(v);
        }
        Ok(Self {
            d,
            kets,
            label: format!("random-{seed}"),
        }
        .canonicalized())
    }

    /// Eigenbasis of a unitary, kets sorted by eigenvalue phase and each ket
    /// phase-fixed so its first nonzero amplitude is real positive.
    pub fn eigenbasis_of(u: &ComplexMatrix, label: impl Into<String>) -> Result<Self, BasisError> {
        let eig = linalg::unitary_eig(u, crate::linalg::STRUCTURE_TOL)?;
        let d = u.rows();
        let kets: Vec<Vec<C64>> = (0..d)
            .map(|k| fix_phase(eig.eigenvectors.column(k)))
            .collect();
        Self::new(kets, label)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kets(&self) -> &[Vec<C64>] {
        &self.kets
    }

    pub fn ket(&self, j: usize) -> &[C64] {
        &self.kets[j]
    }

    /// Worst deviation of the Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.d {
            for j in 0..self.d {
                let overlap = linalg::inner(&self.kets[i], &self.kets[j]);
                let target = if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                worst = worst.max((overlap - target).norm());
            }
        }
        worst
    }

    /// Entrywise complex conjugate of every ket, in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self {
            d: self.d,
            kets: self
                .kets
                .iter()
                .map(|k| k.iter().map(|a| a.conj()).collect())
                .collect(),
            label: format!("{}*", self.label),
        }
    }

    /// Canonical form: each ket phase-fixed, kets sorted by tolerance-aware
    /// lexicographic order on (re, im) coordinates. Used to compare bases
    /// that may differ only by ket order and overall ket phases.
    pub fn canonicalized(&self) -> Self {
        let mut kets: Vec<Vec<C64>> = self.kets.iter().cloned().map(fix_phase).collect();
        kets.sort_by(|a, b| lex_cmp(a, b));
        Self {
            d: self.d,
            kets,
            label: self.label.clone(),
        }
    }

    /// Greatest entrywise distance to another basis, compared ket by ket.
    pub fn max_ket_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d, "comparing bases of different dimension");
        let mut worst = 0.0_f64;
        for (a, b) in self.kets.iter().zip(&other.kets) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }

    /// Serialize to a JSON array of kets, each ket an array of [re, im] pairs.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.kets
                .iter()
                .map(|ket| Value::Array(ket.iter().map(|a| json!([a.re, a.im])).collect()))
                .collect(),
        )
    }

    /// Parse the serialization produced by [`Basis::to_json`].
    pub fn from_json(value: &Value, label: impl Into<String>) -> Result<Self, BasisError> {
        let rows = value
            .as_array()
            .ok_or_else(|| BasisError::Malformed("expected an array of kets".into()))?;
        let mut kets = Vec::with_capacity(rows.len());
        for row in rows {
            let amps = row
                .as_array()
                .ok_or_else(|| BasisError::Malformed("expected an array of amplitudes".into()))?;
            let mut ket = Vec::with_capacity(amps.len());
            for amp in amps {
                let pair = amp
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| BasisError::Malformed("amplitude must be [re, im]".into()))?;
                let re = pair[0]
                    .as_f64()
                    .ok_or_else(|| BasisError::Malformed("re not a number".into()))?;
                let im = pair[1]
                    .as_f64()
                    .ok_or_else(|| BasisError::Malformed("im not a number".into()))?;
                ket.push(C64::new(re, im));
            }
            kets.push(ket);
        }
        Self::new(kets, label)
    }
}

/// Multiply a ket by a global phase so its first amplitude with magnitude
/// above the noise floor becomes real positive.
fn fix_phase(mut ket: Vec<C64>) -> Vec<C64> {
    if let Some(lead) = ket.iter().find(|a| a.norm() > PHASE_FIX_TOL).copied() {
        let phase = lead.conj() / lead.norm();
        for a in &mut ket {
            *a *= phase;
        }
        // The leading amplitude is now real by construction.
        if let Some(first) = ket.iter_mut().find(|a| a.norm() > PHASE_FIX_TOL) {
            first.im = 0.0;
        }
    }
    ket
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for (x, y) in a.iter().zip(b) {
        if (x.re - y.re).abs() > ORDER_TOL {
            return x.re.partial_cmp(&y.re).unwrap();
        }
        if (x.im - y.im).abs() > ORDER_TOL {
            return x.im.partial_cmp(&y.im).unwrap();
        }
    }
    Ordering::Equal
}

/// The generalized Pauli pair Z, X on a d-dimensional space.
#[derive(Debug, Clone)]
pub struct WeylPair {
    pub d: usize,
    pub z: ComplexMatrix,
    pub x: ComplexMatrix,
    pub omega: C64,
}

impl WeylPair {
    /// The product XZ^m (X for m = 0).
    pub fn xz_power(&self, m: usize) -> ComplexMatrix {
        let mut out = self.x.clone();
        for _ in 0..m {
            out = out.mul(&self.z);
        }
        out
    }
}

/// Construct Z and X with `Z|j⟩ = ω^j|j⟩` and `X|j⟩ = |j+1 mod d⟩`.
pub fn weyl_pair(d: usize) -> Result<WeylPair, BasisError> {
    if d < 2 {
        return Err(BasisError::InvalidDimension { d });
    }
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / d as f64);
    let z = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / d as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut x = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        x[((j + 1) % d, j)] = C64::new(1.0, 0.0);
    }
    Ok(WeylPair { d, z, x, omega })
}

/// True iff every cross overlap satisfies `||⟨ψ|φ⟩|² - 1/d| <= tol`.
pub fn is_mutually_unbiased(b1: &Basis, b2: &Basis, tol: f64) -> Result<bool, BasisError> {
    Ok(unbiasedness_deviation(b1, b2)? <= tol)
}

/// Worst deviation of `|⟨ψ|φ⟩|²` from 1/d over all ket pairs.
pub fn unbiasedness_deviation(b1: &Basis, b2: &Basis) -> Result<f64, BasisError> {
    if b1.dim() != b2.dim() {
        return Err(BasisError::DimensionMismatch {
            context: format!("bases of dimension {} and {}", b1.dim(), b2.dim()),
        });
    }
    let d = b1.dim();
    let target = 1.0 / d as f64;
    let mut worst = 0.0_f64;
    for psi in b1.kets() {
        for phi in b2.kets() {
            let overlap = linalg::inner(psi, phi).norm_sqr();
            worst = worst.max((overlap - target).abs());
        }
    }
    Ok(worst)
}

/// Construct `g` pairwise mutually unbiased bases.
///
/// For any d ≥ 2 up to three bases are available (eigenbases of Z, X, XZ).
/// For prime d the list continues with XZ², ..., XZ^{d-1}, giving the
/// complete set of d+1 MUB for g = d+1. Every returned set is certified
/// pairwise unbiased at 1e-8; a certificate failure signals a bug or a
/// genuine degeneracy and is reported as an error.
pub fn mub_set(d: usize, g: usize) -> Result<Vec<Basis>, BasisError> {
    if d < 2 {
        return Err(BasisError::InvalidDimension { d });
    }
    let max_g = if is_prime(d) { d + 1 } else { 3 };
    if g < 2 || g > max_g {
        return Err(BasisError::UnsupportedDimension { d, g });
    }

    let pair = weyl_pair(d)?;
    let mut bases = Vec::with_capacity(g);
    bases.push(Basis::eigenbasis_of(&pair.z, "Z")?);
    for m in 0..g.saturating_sub(1) {
        let label = match m {
            0 => "X".to_string(),
            1 => "XZ".to_string(),
            _ => format!("XZ^{m}"),
        };
        bases.push(Basis::eigenbasis_of(&pair.xz_power(m), label)?);
    }

    for i in 0..bases.len() {
        for j in (i + 1)..bases.len() {
            let deviation = unbiasedness_deviation(&bases[i], &bases[j])?;
            if deviation > MUB_CERT_TOL {
                return Err(BasisError::UnbiasednessViolation { i, j, deviation });
            }
        }
    }
    Ok(bases)
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_pair_qubit_matches_paulis() {
        let p = weyl_pair(2).unwrap();
        // Z = diag(1, -1), X = [[0,1],[1,0]]; sin(π) leaves ~1e-16 residue.
        assert!((p.z[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((p.z[(1, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((p.x[(0, 1)] - C64::new(1.0, 0.0)).norm() == 0.0);
        assert!((p.x[(1, 0)] - C64::new(1.0, 0.0)).norm() == 0.0);

        // iXZ equals Pauli Y = [[0, -i], [i, 0]].
        let y = p.x.mul(&p.z).scale(C64::new(0.0, 1.0));
        assert!((y[(0, 1)] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((y[(1, 0)] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn weyl_pair_qutrit_and_commutation() {
        let p = weyl_pair(3).unwrap();
        assert!((p.z[(1, 1)] - p.omega).norm() < 1e-15);
        assert!((p.z[(2, 2)] - p.omega * p.omega).norm() < 1e-14);
        for d in 2..=7 {
            let p = weyl_pair(d).unwrap();
            // Weyl commutation: ZX = ω XZ.
            let lhs = p.z.mul(&p.x);
            let rhs = p.x.mul(&p.z).scale(p.omega);
            assert!(lhs.max_abs_diff(&rhs) < 1e-12, "d={d}");
        }
        assert!(matches!(
            weyl_pair(1),
            Err(BasisError::InvalidDimension { .. })
        ));
    }

    #[test]
    fn conjugate_basis_behavior() {
        let comp = Basis::computational(3).unwrap();
        assert!(comp.conjugate().max_ket_deviation(&comp) == 0.0);

        let fourier = Basis::fourier(3).unwrap();
        let conj = fourier.conjugate();
        // ω ↦ ω⁻¹ in every amplitude.
        for (k, ket) in conj.kets().iter().enumerate() {
            for (j, amp) in ket.iter().enumerate() {
                let expected = C64::from_polar(
                    1.0 / 3f64.sqrt(),
                    -2.0 * std::f64::consts::PI * ((j * k) % 3) as f64 / 3.0,
                );
                assert!((amp - expected).norm() < 1e-12);
            }
        }
        // Involution.
        assert!(conj.conjugate().max_ket_deviation(&fourier) == 0.0);
    }

    #[test]
    fn mutual_unbiasedness_checks() {
        for d in [2, 3, 4, 6] {
            let comp = Basis::computational(d).unwrap();
            let fourier = Basis::fourier(d).unwrap();
            assert!(
                is_mutually_unbiased(&comp, &fourier, 1e-12).unwrap(),
                "d={d}"
            );
            assert!(!is_mutually_unbiased(&comp, &comp, 1e-8).unwrap());
        }
        let p = weyl_pair(5).unwrap();
        let bz = Basis::eigenbasis_of(&p.z, "Z").unwrap();
        let bxz = Basis::eigenbasis_of(&p.xz_power(1), "XZ").unwrap();
        assert!(is_mutually_unbiased(&bz, &bxz, 1e-8).unwrap());

        let b2 = Basis::computational(2).unwrap();
        let b3 = Basis::computational(3).unwrap();
        assert!(matches!(
            is_mutually_unbiased(&b2, &b3, 1e-8),
            Err(BasisError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigenbasis_of_z_is_computational() {
        let p = weyl_pair(4).unwrap();
        let b = Basis::eigenbasis_of(&p.z, "Z").unwrap();
        let comp = Basis::computational(4).unwrap();
        assert!(b.max_ket_deviation(&comp) < 1e-12);
    }

    #[test]
    fn eigenbasis_of_x_is_fourier_set() {
        // The shift operator's eigenvectors are the Fourier kets, possibly
        // in a different order; canonical forms coincide.
        for d in [3usize, 5] {
            let p = weyl_pair(d).unwrap();
            let b = Basis::eigenbasis_of(&p.x, "X").unwrap().canonicalized();
            let fourier = Basis::fourier(d).unwrap().canonicalized();
            assert!(b.max_ket_deviation(&fourier) < 1e-10, "d={d}");
        }
    }

    #[test]
    fn eigenbasis_of_xz_qubit_matches_y_eigenvectors() {
        let p = weyl_pair(2).unwrap();
        let b = Basis::eigenbasis_of(&p.xz_power(1), "XZ").unwrap();
        // XZ = -iY; eigenvectors of Y are (1, ±i)/√2. Phase convention makes
        // the first amplitude real positive.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for ket in b.kets() {
            assert!((ket[0].re - s).abs() < 1e-10 && ket[0].im.abs() < 1e-12);
            assert!((ket[1].norm() - s).abs() < 1e-10);
            assert!(ket[1].re.abs() < 1e-10, "second amplitude should be ±i/√2");
        }
    }

    #[test]
    fn mub_set_complete_for_primes() {
        for d in [2usize, 3, 5, 7, 11] {
            let bases = mub_set(d, d + 1).unwrap();
            assert_eq!(bases.len(), d + 1);
            for i in 0..bases.len() {
                for j in (i + 1)..bases.len() {
                    assert!(
                        is_mutually_unbiased(&bases[i], &bases[j], 1e-8).unwrap(),
                        "d={d} pair ({i},{j})"
                    );
                }
            }
            for b in &bases {
                assert!(b.gram_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn mub_set_three_bases_any_dimension() {
        for d in [4usize, 6, 8, 9, 10, 12] {
            let bases = mub_set(d, 3).unwrap();
            assert_eq!(bases.len(), 3);
            for i in 0..3 {
                for j in (i + 1)..3 {
                    assert!(
                        is_mutually_unbiased(&bases[i], &bases[j], 1e-8).unwrap(),
                        "d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn mub_set_rejects_unsupported_requests() {
        assert!(matches!(
            mub_set(6, 4),
            Err(BasisError::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            mub_set(9, 4),
            Err(BasisError::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            mub_set(5, 7),
            Err(BasisError::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            mub_set(5, 1),
            Err(BasisError::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            mub_set(1, 2),
            Err(BasisError::InvalidDimension { .. })
        ));
    }

    #[test]
    fn mub_set_deterministic() {
        let a = mub_set(5, 6).unwrap();
        let b = mub_set(5, 6).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.kets(), y.kets());
        }
    }

    #[test]
    fn basis_json_round_trip_is_exact() {
        for d in [2usize, 3, 5] {
            let bases = mub_set(d, 3).unwrap();
            for b in &bases {
                let value = b.to_json();
                let back = Basis::from_json(&value, b.label()).unwrap();
                assert_eq!(b.kets(), back.kets());
                // Through an actual string as well.
                let text = serde_json::to_string(&value).unwrap();
                let reparsed: Value = serde_json::from_str(&text).unwrap();
                let back2 = Basis::from_json(&reparsed, b.label()).unwrap();
                assert_eq!(b.kets(), back2.kets());
            }
        }
    }

    #[test]
    fn random_basis_is_orthonormal_and_canonical() {
        for d in 2..=6 {
            let b = Basis::random(d, 42).unwrap();
            assert!(b.gram_residual() < 1e-10, "d={d}");
            let again = Basis::random(d, 42).unwrap();
            assert_eq!(b.kets(), again.kets());
            assert!(b.canonicalized().max_ket_deviation(&b) == 0.0);
        }
    }

    #[test]
    fn rejects_non_orthonormal_kets() {
        let kets = vec![
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ];
        assert!(matches!(
            Basis::new(kets, "bad"),
            Err(BasisError::NotOrthonormal { .. })
        ));
    }
}
