//! Dense complex linear algebra for operators on small Hilbert spaces.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Matrices stay small (local dimension at most 64, so at most
//! a few thousand rows for bipartite operators), which lets the Hermitian
//! eigensolver be a plain cyclic Jacobi iteration with no external
//! dependencies.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Default tolerance for structure predicates (hermiticity, unitarity, ...).
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Fixed generic phase for the Hermitian combination used to eigendecompose
/// unitaries: `H = αU + ᾱU†`. Deliberately a truncated value rather than
/// exactly π/4: an exact eighth-turn phase would make eigenvalue pairs with
/// arg μ₁ + arg μ₂ = -π/2 collide exactly in H.
#[allow(clippy::approx_constant)]
const UNITARY_COMBO_PHASE: f64 = 0.7853981;

/// Second phase used to split eigenvalue clusters that the first combination
/// leaves unresolved. Offset by π/2 so no pair of distinct unitary
/// eigenvalues can collide under both combinations.
const UNITARY_COMBO_PHASE_ALT: f64 = UNITARY_COMBO_PHASE + std::f64::consts::FRAC_PI_2;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian within tolerance {tol:e} (residual {residual:e})")]
    NotHermitian { tol: f64, residual: f64 },

    #[error("matrix is not unitary within tolerance {tol:e} (residual {residual:e})")]
    NotUnitary { tol: f64, residual: f64 },

    #[error("unitary spectrum is degenerate: eigenvalue separation {separation:e} <= 1e-6")]
    DegenerateSpectrum { separation: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("Jacobi iteration failed to converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add: shape mismatch"
        );
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "sub: shape mismatch"
        );
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * factor)
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "mul: inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply: dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "diff: shape mismatch"
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A[i,j] - conj(A[j,i])| <= tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_residual() <= tol
    }

    fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian and `max |(P² - P)[i,j]| <= tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.mul(self).max_abs_diff(self) <= tol
    }

    /// `max |(U†U - I)[i,j]| <= tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitary_residual() <= tol
    }

    fn unitary_residual(&self) -> f64 {
        self.dagger()
            .mul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Inner product ⟨u|v⟩ with conjugation on the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "inner: dimension mismatch");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of vectors `u ⊗ v`.
pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

/// Partial trace over the second tensor factor of a `d²×d²` matrix.
pub fn partial_trace_b(a: &ComplexMatrix, d: usize) -> Result<ComplexMatrix, LinalgError> {
    check_bipartite(a, d)?;
    Ok(ComplexMatrix::from_fn(d, d, |i, k| {
        (0..d).map(|j| a[(i * d + j, k * d + j)]).sum()
    }))
}

/// Partial transpose over the second tensor factor of a `d²×d²` matrix.
pub fn partial_transpose_b(a: &ComplexMatrix, d: usize) -> Result<ComplexMatrix, LinalgError> {
    check_bipartite(a, d)?;
    Ok(ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        a[(i * d + l, k * d + j)]
    }))
}

fn check_bipartite(a: &ComplexMatrix, d: usize) -> Result<(), LinalgError> {
    if a.rows() != d * d || a.cols() != d * d {
        return Err(LinalgError::DimensionMismatch {
            context: format!(
                "expected {0}x{0} matrix for local dimension {d}, got {1}x{2}",
                d * d,
                a.rows(),
                a.cols()
            ),
        });
    }
    Ok(())
}

/// Real spectrum of a Hermitian matrix, eigenvalues sorted nonincreasing,
/// eigenvectors as the matching columns of an orthonormal matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `max |(V diag(λ) V† - A)[i,j]|` for the matrix this was computed from.
    pub fn reconstruction_residual(&self, a: &ComplexMatrix) -> f64 {
        let v = &self.eigenvectors;
        let lambda = ComplexMatrix::diag(
            &self
                .eigenvalues
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect::<Vec<_>>(),
        );
        v.mul(&lambda).mul(&v.dagger()).max_abs_diff(a)
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm drops below
/// `1e-13 * ‖A‖_F`. Errors with [`LinalgError::NotHermitian`] when the input
/// fails `is_hermitian(tol)`.
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<Spectrum, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch {
            context: format!("eigendecomposition of {}x{} matrix", a.rows(), a.cols()),
        });
    }
    if !a.is_hermitian(tol) {
        return Err(LinalgError::NotHermitian {
            tol,
            residual: a.hermitian_residual(),
        });
    }

    let n = a.rows();
    let mut work = a.clone();
    let mut vecs = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = 1e-13 * scale;

    let max_sweeps = 100;
    let mut converged = scale == 0.0 || n == 1;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut work, &mut vecs, p, q);
            }
        }
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += work[(i, j)].norm_sqr();
                }
            }
        }
        converged = off.sqrt() <= target;
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: max_sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation zeroing the (p, q) entry of `a`.
///
/// The rotation is G = V·R with V = diag(1, e^{-iφ}) absorbing the phase of
/// a[p][q] and R the classic real Jacobi rotation; `vecs` accumulates the
/// product of all rotations.
fn rotate(a: &mut ComplexMatrix, vecs: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let m = apq.norm();
    if m < 1e-300 {
        return;
    }
    let phase = apq / m; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * m);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G[p,p]=c, G[p,q]=s, G[q,p]=-s·e^{-iφ}, G[q,q]=c·e^{-iφ}
    let gqp = -s * phase.conj();
    let gqq = c * phase.conj();

    let n = a.rows();
    // A <- A·G (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * gqp;
        a[(k, q)] = akp * s + akq * gqq;
    }
    // A <- G†·A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * gqp.conj();
        a[(q, k)] = apk * s + aqk * gqq.conj();
    }
    // The 2x2 block is now diagonal up to roundoff.
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = vecs[(k, p)];
        let vkq = vecs[(k, q)];
        vecs[(k, p)] = vkp * c + vkq * gqp;
        vecs[(k, q)] = vkp * s + vkq * gqq;
    }
}

/// Eigendecomposition of a unitary matrix: unit-modulus eigenvalues and an
/// orthonormal eigenbasis, sorted by eigenvalue phase in `[0, 2π)`.
#[derive(Debug, Clone)]
pub struct UnitaryEig {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: ComplexMatrix,
}

/// Eigendecompose a unitary via the Hermitian combination `H = αU + ᾱU†`
/// with a fixed generic phase α.
///
/// The combination can map distinct unitary eigenvalues μ₁ ≠ μ₂ to nearly
/// equal real values whenever arg μ₁ + arg μ₂ ≈ -2 arg α; clusters of
/// near-degenerate H-eigenvalues are therefore re-split with a second
/// combination whose phase is offset by π/2, which no pair can collide
/// under as well. Each resulting vector is verified to be an eigenvector of
/// `U` to 1e-8.
pub fn unitary_eig(u: &ComplexMatrix, tol: f64) -> Result<UnitaryEig, LinalgError> {
    if !u.is_unitary(tol) {
        return Err(LinalgError::NotUnitary {
            tol,
            residual: u.unitary_residual(),
        });
    }
    let n = u.rows();
    let alpha = C64::from_polar(1.0, UNITARY_COMBO_PHASE);
    let h = u.scale(alpha).add(&u.dagger().scale(alpha.conj()));
    let spec = hermitian_eig(&h, 1e-8)?;

    // Columns in nondecreasing H-eigenvalue order simplify the cluster scan.
    let mut columns: Vec<Vec<C64>> = (0..n).rev().map(|k| spec.eigenvector(k)).collect();
    let h_vals: Vec<f64> = spec.eigenvalues.iter().rev().copied().collect();

    const CLUSTER_GAP: f64 = 1e-4;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && h_vals[end + 1] - h_vals[end] <= CLUSTER_GAP {
            end += 1;
        }
        if end > start {
            refine_cluster(u, &mut columns, start, end);
        }
        start = end + 1;
    }

    // Rayleigh quotients and residuals against U itself.
    let mut pairs: Vec<(C64, Vec<C64>)> = Vec::with_capacity(n);
    let mut worst_residual = 0.0_f64;
    for col in columns {
        let uv = u.apply(&col);
        let mu = inner(&col, &uv);
        let residual: f64 = uv
            .iter()
            .zip(&col)
            .map(|(a, b)| (a - mu * b).norm())
            .fold(0.0, f64::max);
        worst_residual = worst_residual.max(residual);
        pairs.push((mu, col));
    }

    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            min_sep = min_sep.min((pairs[i].0 - pairs[j].0).norm());
        }
    }
    if min_sep <= 1e-6 {
        return Err(LinalgError::DegenerateSpectrum {
            separation: min_sep,
        });
    }
    if worst_residual > 1e-8 {
        // Residuals this large with separated eigenvalues indicate the
        // combination could not isolate the eigenspaces.
        return Err(LinalgError::DegenerateSpectrum {
            separation: worst_residual,
        });
    }

    // Sort by eigenvalue phase in [0, 2π), tolerating small negative noise
    // around phase 0 so that eigenvalue 1 sorts first.
    pairs.sort_by(|a, b| {
        let pa = wrap_phase(a.0);
        let pb = wrap_phase(b.0);
        pa.partial_cmp(&pb).unwrap()
    });

    let eigenvalues: Vec<C64> = pairs.iter().map(|(mu, _)| *mu).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok(UnitaryEig {
        eigenvalues,
        eigenvectors,
    })
}

fn wrap_phase(mu: C64) -> f64 {
    let phase = mu.arg();
    if phase < -1e-6 {
        phase + 2.0 * std::f64::consts::PI
    } else {
        phase
    }
}

/// Re-split an H-eigenvalue cluster `columns[start..=end]` using the second
/// combination phase, restricted to the cluster subspace.
fn refine_cluster(u: &ComplexMatrix, columns: &mut [Vec<C64>], start: usize, end: usize) {
    let k = end - start + 1;
    let n = u.rows();
    let sub = ComplexMatrix::from_fn(n, k, |i, j| columns[start + j][i]);
    let w = sub.dagger().mul(&u.mul(&sub));
    let alpha = C64::from_polar(1.0, UNITARY_COMBO_PHASE_ALT);
    let h2 = w.scale(alpha).add(&w.dagger().scale(alpha.conj()));
    // h2 is k×k and Hermitian by construction up to roundoff.
    if let Ok(spec) = hermitian_eig(&h2, 1e-8) {
        let rotated = sub.mul(&spec.eigenvectors);
        for j in 0..k {
            columns[start + j] = rotated.column(j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = c(rng.random::<f64>() * 2.0 - 1.0, 0.0);
            for j in (i + 1)..n {
                let z = c(
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                );
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        a
    }

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let h = random_hermitian(n, rng);
        let spec = hermitian_eig(&h, 1e-9).unwrap();
        spec.eigenvectors
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let z = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let zz = kron(&z, &z);
        let expected = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!(zz.max_abs_diff(&expected) == 0.0);
    }

    #[test]
    fn kron_xx_fixes_bell_state() {
        let x = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        );
        let xx = kron(&x, &x);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let out = xx.apply(&bell);
        for (a, b) in out.iter().zip(&bell) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn eig_diagonal_input_sorted() {
        let a = ComplexMatrix::diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let spec = hermitian_eig(&a, 1e-10).unwrap();
        assert_eq!(spec.eigenvalues, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn eig_depolarized_projector_spectrum() {
        // (1 + 2|Φ⟩⟨Φ|)/3 at d=2 has spectrum (1, 1/3, 1/3, 1/3).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let proj = ComplexMatrix::outer(&phi, &phi);
        let a = ComplexMatrix::identity(4)
            .add(&proj.scale_re(2.0))
            .scale_re(1.0 / 3.0);
        let spec = hermitian_eig(&a, 1e-10).unwrap();
        let expected = [1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (got, want) in spec.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[4, 9, 16, 25, 36] {
            let a = random_hermitian(n, &mut rng);
            let spec = hermitian_eig(&a, 1e-10).unwrap();
            assert!(spec.reconstruction_residual(&a) < 1e-9, "n={n}");
            let v = &spec.eigenvectors;
            let gram = v.dagger().mul(v);
            assert!(
                gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10,
                "n={n}"
            );
            let trace: f64 = a.trace().re;
            let sum: f64 = spec.eigenvalues.iter().sum();
            assert!((trace - sum).abs() < 1e-9);
        }
    }

    #[test]
    fn eig_invariant_under_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[4, 9] {
            let a = random_hermitian(n, &mut rng);
            let u = random_unitary(n, &mut rng);
            let b = u.mul(&a).mul(&u.dagger());
            let sa = hermitian_eig(&a, 1e-9).unwrap();
            let sb = hermitian_eig(&b, 1e-9).unwrap();
            for (x, y) in sa.eigenvalues.iter().zip(&sb.eigenvalues) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
        );
        assert!(matches!(
            hermitian_eig(&a, 1e-10),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn unitary_eig_fourier_from_shift() {
        // X at d=3 has the Fourier vectors (1, ω^k, ω^{2k})/√3 as eigenbasis.
        let d = 3;
        let mut x = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            x[((j + 1) % d, j)] = c(1.0, 0.0);
        }
        let eig = unitary_eig(&x, 1e-10).unwrap();
        for k in 0..d {
            let v = eig.eigenvectors.column(k);
            let uv = x.apply(&v);
            let mu = eig.eigenvalues[k];
            for (a, b) in uv.iter().zip(&v) {
                assert!((a - mu * b).norm() < 1e-10);
            }
            for amp in &v {
                assert!((amp.norm() - 1.0 / (d as f64).sqrt()).abs() < 1e-10);
            }
        }
        // Phases sorted ascending: 1, ω, ω².
        assert!((eig.eigenvalues[0] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn unitary_eig_handles_near_degenerate_combination() {
        // At d=4 the shift operator's eigenvalues {1, i, -1, -i} nearly
        // collide pairwise under the fixed first combination phase.
        let d = 4;
        let mut x = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            x[((j + 1) % d, j)] = c(1.0, 0.0);
        }
        let eig = unitary_eig(&x, 1e-10).unwrap();
        for k in 0..d {
            let v = eig.eigenvectors.column(k);
            let uv = x.apply(&v);
            let mu = eig.eigenvalues[k];
            let res: f64 = uv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - mu * b).norm())
                .fold(0.0, f64::max);
            assert!(res < 1e-8, "residual {res}");
        }
    }

    #[test]
    fn unitary_eig_rejects_degenerate_and_nonunitary() {
        let i2 = ComplexMatrix::identity(2);
        assert!(matches!(
            unitary_eig(&i2, 1e-10),
            Err(LinalgError::DegenerateSpectrum { .. })
        ));
        let a = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0); 4]);
        assert!(matches!(
            unitary_eig(&a, 1e-10),
            Err(LinalgError::NotUnitary { .. })
        ));
    }

    #[test]
    fn partial_ops_on_bell_projector() {
        let d = 2;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let rho = ComplexMatrix::outer(&phi, &phi);

        let marginal = partial_trace_b(&rho, d).unwrap();
        let expected = ComplexMatrix::identity(d).scale_re(0.5);
        assert!(marginal.max_abs_diff(&expected) < 1e-15);

        let pt = partial_transpose_b(&rho, d).unwrap();
        let spec = hermitian_eig(&pt, 1e-10).unwrap();
        let min = spec.eigenvalues.last().copied().unwrap();
        assert!((min + 0.5).abs() < 1e-12, "minimal eigenvalue {min}");

        let id4 = ComplexMatrix::identity(4);
        assert!(partial_transpose_b(&id4, 2).unwrap().max_abs_diff(&id4) == 0.0);
    }

    #[test]
    fn partial_transpose_is_involution_and_trace_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..=4usize {
            let a = random_hermitian(d * d, &mut rng);
            let twice = partial_transpose_b(&partial_transpose_b(&a, d).unwrap(), d).unwrap();
            assert!(twice.max_abs_diff(&a) < 1e-14);

            let x = random_hermitian(d, &mut rng);
            let y = random_hermitian(d, &mut rng);
            let traced = partial_trace_b(&kron(&x, &y), d).unwrap();
            let expected = x.scale(y.trace());
            assert!(traced.max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn partial_ops_reject_bad_dimensions() {
        let a = ComplexMatrix::identity(6);
        assert!(matches!(
            partial_trace_b(&a, 2),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            partial_transpose_b(&a, 2),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }
}
