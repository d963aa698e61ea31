//! Dense complex linear algebra: matrices, LU with partial pivoting, a
//! 1-norm condition estimator, and Householder bidiagonalization.
//!
//! The matrices in this crate are dense, square in every solver path, and of
//! moderate size (`P <= a few thousand`), so the kernels are written directly
//! over row-major storage with contiguous inner loops rather than pulling in
//! an external linear algebra stack. The bidiagonalization `M = Q_L B Q_R^H`
//! (with `B` real upper bidiagonal) is the workhorse of the regularized
//! solver: once it is available, the shifted normal equations
//! `(M^H M + eps I) h = M^H f` reduce to a real symmetric tridiagonal solve
//! per shift.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::Error;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// The `rows x cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix entry by entry from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// True for square matrices.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row `r` as a contiguous slice.
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Mutable row `r`.
    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// The raw row-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Matrix-vector product `A x`.
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Conjugate-transposed product `A^H x`.
    pub fn conj_transpose_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.rows, "matvec dimension mismatch");
        let mut y = vec![ZERO; self.cols];
        for r in 0..self.rows {
            let xr = x[r];
            for (yc, a) in y.iter_mut().zip(self.row(r)) {
                *yc += a.conj() * xr;
            }
        }
        y
    }

    /// The induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0f64; self.cols];
        for r in 0..self.rows {
            for (s, a) in sums.iter_mut().zip(self.row(r)) {
                *s += a.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// The Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Euclidean norm of a complex vector.
pub fn vector_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean norm of `x - y`.
pub fn vector_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len(), "vector dimension mismatch");
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// An LU factorization with partial pivoting: `P A = L U` with `L` unit
/// lower triangular. `L` and `U` share the storage of the eliminated matrix;
/// `pivots[k]` records the row swapped into position `k` at step `k`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: CMatrix,
    pivots: Vec<usize>,
}

impl LuFactors {
    /// Eliminates `a` in place. Fails with a singular-system error (carrying
    /// the elimination step) when every candidate pivot of some step is
    /// exactly zero.
    pub fn factor(mut a: CMatrix) -> Result<Self, Error> {
        assert!(a.is_square(), "LU factorization requires a square matrix");
        let n = a.rows;
        let mut pivots = vec![0usize; n];

        for k in 0..n {
            // Partial pivoting: the largest remaining entry of column k.
            let mut best = k;
            let mut best_mag = a[(k, k)].norm_sqr();
            for i in k + 1..n {
                let mag = a[(i, k)].norm_sqr();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag == 0.0 {
                return Err(Error::SingularSystem { pivot_step: k });
            }
            pivots[k] = best;
            if best != k {
                for c in 0..n {
                    a.data.swap(k * n + c, best * n + c);
                }
            }

            // Eliminate below the pivot; multipliers overwrite the column.
            let (upper, lower) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n..(k + 1) * n];
            let pivot = pivot_row[k];
            for row in lower.chunks_exact_mut(n) {
                let m = row[k] / pivot;
                row[k] = m;
                if m != ZERO {
                    for (x, y) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *x -= m * y;
                    }
                }
            }
        }

        Ok(LuFactors { lu: a, pivots })
    }

    /// Dimension of the factored matrix.
    pub fn n(&self) -> usize {
        self.lu.rows
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(b.len(), n, "solve dimension mismatch");
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        // Forward substitution with unit lower triangular L.
        for k in 1..n {
            let row = self.lu.row(k);
            let s: Complex64 = row[..k].iter().zip(&x[..k]).map(|(a, b)| a * b).sum();
            x[k] -= s;
        }
        // Back substitution with U.
        for k in (0..n).rev() {
            let row = self.lu.row(k);
            let s: Complex64 = row[k + 1..].iter().zip(&x[k + 1..]).map(|(a, b)| a * b).sum();
            x[k] = (x[k] - s) / row[k];
        }
        x
    }

    /// Solves `A^H y = b` using the same factors: `A^H = U^H L^H P`.
    pub fn solve_conj_transpose(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(b.len(), n, "solve dimension mismatch");
        let mut y = b.to_vec();
        // U^H is lower triangular.
        for k in 0..n {
            let mut s = ZERO;
            for j in 0..k {
                s += self.lu[(j, k)].conj() * y[j];
            }
            y[k] = (y[k] - s) / self.lu[(k, k)].conj();
        }
        // L^H is unit upper triangular.
        for k in (0..n).rev() {
            let mut s = ZERO;
            for j in k + 1..n {
                s += self.lu[(j, k)].conj() * y[j];
            }
            y[k] -= s;
        }
        // Undo the row permutation: apply the recorded swaps in reverse.
        for k in (0..n).rev() {
            y.swap(k, self.pivots[k]);
        }
        y
    }
}

/// Estimates `||A^{-1}||_1` from an LU factorization with the classic
/// Hager/LINPACK power method on the 1-norm, plus the alternating-sign probe
/// used by LAPACK's estimator as a safeguard.
pub fn inverse_one_norm_estimate(lu: &LuFactors) -> f64 {
    let n = lu.n();
    if n == 0 {
        return 0.0;
    }
    let inv_n = 1.0 / n as f64;
    let mut x = vec![Complex64::new(inv_n, 0.0); n];
    let mut est = 0.0f64;

    for iter in 0..5 {
        let y = lu.solve(&x);
        let y_norm1: f64 = y.iter().map(|v| v.norm()).sum();
        est = est.max(y_norm1);

        // Complex sign vector of y.
        let xi: Vec<Complex64> =
            y.iter().map(|v| if v.norm() == 0.0 { ONE } else { v / v.norm() }).collect();
        let z = lu.solve_conj_transpose(&xi);

        let mut j = 0;
        let mut z_max = 0.0;
        for (i, v) in z.iter().enumerate() {
            let mag = v.norm();
            if mag > z_max {
                z_max = mag;
                j = i;
            }
        }
        // Convergence test: the new search direction no longer improves on
        // the current probe.
        let z_dot_x: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
        if iter > 0 && z_max <= z_dot_x {
            break;
        }
        x = vec![ZERO; n];
        x[j] = ONE;
    }

    // Alternating probe, scaled as in the reference estimator.
    if n > 1 {
        let mut alt = Vec::with_capacity(n);
        for i in 0..n {
            let mag = 1.0 + i as f64 / (n - 1) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            alt.push(Complex64::new(sign * mag, 0.0));
        }
        let y = lu.solve(&alt);
        let alt_est = 2.0 * y.iter().map(|v| v.norm()).sum::<f64>() / (3.0 * n as f64);
        est = est.max(alt_est);
    }
    est
}

/// A complex Householder reflector `H = I - tau v v^H` with `v = (1, tail)`,
/// mapping a given vector onto `beta e_1` with real `beta`.
struct Reflector {
    beta: f64,
    tau: Complex64,
    /// Scale applied to the tail of the input vector to obtain the tail of
    /// `v` (the leading component of `v` is 1).
    tail_scale: Complex64,
}

/// Builds the reflector for the segment `(alpha, tail)` where `tail_norm_sqr`
/// is `||tail||^2`. When `tau == 0` the reflector is the identity and the
/// tail must be left untouched.
fn make_reflector(alpha: Complex64, tail_norm_sqr: f64) -> Reflector {
    if tail_norm_sqr == 0.0 && alpha.im == 0.0 {
        // Already real with a zero tail: nothing to do.
        return Reflector { beta: alpha.re, tau: ZERO, tail_scale: ONE };
    }
    let anorm = (alpha.norm_sqr() + tail_norm_sqr).sqrt();
    // Choose the sign that avoids cancellation in alpha - beta.
    let beta = if alpha.re >= 0.0 { -anorm } else { anorm };
    let tau = Complex64::new((beta - alpha.re) / beta, alpha.im / beta);
    let tail_scale = ONE / (alpha - Complex64::new(beta, 0.0));
    Reflector { beta, tau, tail_scale }
}

/// Householder bidiagonalization `M = Q_L B Q_R^H` of a square complex
/// matrix, with `B` real upper bidiagonal.
///
/// The left reflectors `H_j` (zeroing column `j` below the diagonal) are
/// stored in the strictly lower triangle of `factors`; the right reflectors
/// `R_j` (zeroing row `j` right of the superdiagonal and making it real) are
/// stored to the right of the superdiagonal. Both store the tail of a vector
/// `v` whose leading component is an implicit 1.
#[derive(Debug, Clone)]
pub struct Bidiagonal {
    factors: CMatrix,
    tau_left: Vec<Complex64>,
    tau_right: Vec<Complex64>,
    diag: Vec<f64>,
    superdiag: Vec<f64>,
}

impl Bidiagonal {
    /// Factors a square matrix. Always succeeds: rank deficiency simply
    /// shows up as zero diagonal entries of `B`.
    pub fn factor(a: &CMatrix) -> Self {
        assert!(a.is_square(), "bidiagonalization requires a square matrix");
        let n = a.rows();
        let mut m = a.clone();
        let mut tau_left = vec![ZERO; n];
        let mut tau_right = vec![ZERO; n.saturating_sub(1)];
        let mut diag = vec![0.0; n];
        let mut superdiag = vec![0.0; n.saturating_sub(1)];
        let mut s = vec![ZERO; n];

        for j in 0..n {
            // --- Left reflector: zero column j below the diagonal. ---
            let alpha = m[(j, j)];
            let mut tail_sq = 0.0;
            for r in j + 1..n {
                tail_sq += m[(r, j)].norm_sqr();
            }
            let refl = make_reflector(alpha, tail_sq);
            diag[j] = refl.beta;
            tau_left[j] = refl.tau;
            if refl.tau != ZERO {
                for r in j + 1..n {
                    let v = m[(r, j)] * refl.tail_scale;
                    m[(r, j)] = v;
                }
            }

            // Apply H_j = I - tau v v^H to the trailing columns, two
            // row-contiguous passes: s = v^H A, then A -= tau v s.
            if refl.tau != ZERO && j + 1 < n {
                let width = n - j - 1;
                let acc = &mut s[..width];
                acc.fill(ZERO);
                for r in j..n {
                    let v_r = if r == j { ONE } else { m[(r, j)] };
                    let row = &m.data[r * n + j + 1..r * n + n];
                    let coef = v_r.conj();
                    for (a, entry) in acc.iter_mut().zip(row) {
                        *a += coef * entry;
                    }
                }
                for r in j..n {
                    let v_r = if r == j { ONE } else { m[(r, j)] };
                    let coef = refl.tau * v_r;
                    let row = &mut m.data[r * n + j + 1..r * n + n];
                    for (entry, a) in row.iter_mut().zip(acc.iter()) {
                        *entry -= coef * *a;
                    }
                }
            }

            // --- Right reflector: make the superdiagonal real and zero the
            // rest of row j. Acting from the right, R_j is derived from the
            // column reflector of the conjugated row segment. ---
            if j + 1 < n {
                let alpha_r = m[(j, j + 1)].conj();
                let mut tail_sq = 0.0;
                for c in j + 2..n {
                    tail_sq += m[(j, c)].norm_sqr();
                }
                let refl = make_reflector(alpha_r, tail_sq);
                superdiag[j] = refl.beta;
                tau_right[j] = refl.tau;
                if refl.tau != ZERO {
                    for c in j + 2..n {
                        let v = m[(j, c)].conj() * refl.tail_scale;
                        m[(j, c)] = v;
                    }
                }

                // Apply R_j = I - conj(tau) v v^H to the trailing rows:
                // per row, one dot product and one axpy, both contiguous.
                if refl.tau != ZERO {
                    let sigma_conj = refl.tau.conj();
                    // Copy v (row j, cols j+1..) since rows below alias m.
                    let width = n - j - 1;
                    let vbuf = &mut s[..width];
                    vbuf[0] = ONE;
                    for t in 1..width {
                        vbuf[t] = m[(j, j + 1 + t)];
                    }
                    for r in j + 1..n {
                        let row = &mut m.data[r * n + j + 1..r * n + n];
                        let mut coef = ZERO;
                        for (entry, v) in row.iter().zip(vbuf.iter()) {
                            coef += *entry * *v;
                        }
                        coef *= sigma_conj;
                        if coef != ZERO {
                            for (entry, v) in row.iter_mut().zip(vbuf.iter()) {
                                *entry -= coef * v.conj();
                            }
                        }
                    }
                }
            }
        }

        Bidiagonal { factors: m, tau_left, tau_right, diag, superdiag }
    }

    /// Dimension of the factored matrix.
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Diagonal of `B` (real by construction).
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Superdiagonal of `B` (real by construction, length `n - 1`).
    pub fn superdiag(&self) -> &[f64] {
        &self.superdiag
    }

    /// Reflects `y` with the left reflector `j`: `y <- (I - coef v v^H) y`
    /// where `v` lives in column `j`, rows `j..`.
    fn reflect_left(&self, j: usize, coef: Complex64, y: &mut [Complex64]) {
        if coef == ZERO {
            return;
        }
        let n = self.n();
        let mut s = y[j];
        for r in j + 1..n {
            s += self.factors[(r, j)].conj() * y[r];
        }
        y[j] -= coef * s;
        for r in j + 1..n {
            y[r] -= coef * self.factors[(r, j)] * s;
        }
    }

    /// Reflects `y` with the right reflector `j`: the vector `v` lives in
    /// row `j`, columns `j+1..`, leading 1 implicit at component `j+1`.
    fn reflect_right(&self, j: usize, coef: Complex64, y: &mut [Complex64]) {
        if coef == ZERO {
            return;
        }
        let n = self.n();
        let mut s = y[j + 1];
        for c in j + 2..n {
            s += self.factors[(j, c)].conj() * y[c];
        }
        y[j + 1] -= coef * s;
        for c in j + 2..n {
            y[c] -= coef * self.factors[(j, c)] * s;
        }
    }

    /// `y <- Q_L^H y`.
    pub fn apply_qlt(&self, y: &mut [Complex64]) {
        for j in 0..self.n() {
            self.reflect_left(j, self.tau_left[j], y);
        }
    }

    /// `y <- Q_L y`.
    pub fn apply_ql(&self, y: &mut [Complex64]) {
        for j in (0..self.n()).rev() {
            self.reflect_left(j, self.tau_left[j].conj(), y);
        }
    }

    /// `y <- Q_R y`.
    pub fn apply_qr(&self, y: &mut [Complex64]) {
        for j in (0..self.tau_right.len()).rev() {
            self.reflect_right(j, self.tau_right[j].conj(), y);
        }
    }

    /// `y <- Q_R^H y`.
    pub fn apply_qrt(&self, y: &mut [Complex64]) {
        for j in 0..self.tau_right.len() {
            self.reflect_right(j, self.tau_right[j], y);
        }
    }

    /// `B x` for the real bidiagonal factor.
    pub fn b_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        let mut y = vec![ZERO; n];
        for i in 0..n {
            y[i] = x[i] * self.diag[i];
            if i + 1 < n {
                y[i] += x[i + 1] * self.superdiag[i];
            }
        }
        y
    }

    /// `B^T x`.
    pub fn bt_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        let mut y = vec![ZERO; n];
        for i in 0..n {
            y[i] = x[i] * self.diag[i];
            if i > 0 {
                y[i] += x[i - 1] * self.superdiag[i - 1];
            }
        }
        y
    }

    /// Solves the shifted normal equations `(B^T B + eps I) w = c` with a
    /// real LDL^T factorization of the symmetric tridiagonal matrix.
    /// Requires `eps > 0` so the system is positive definite.
    pub fn solve_shifted_normal(&self, eps: f64, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert!(eps > 0.0, "shift must be positive");
        assert_eq!(c.len(), n);
        let d = &self.diag;
        let e = &self.superdiag;

        // Tridiagonal entries of B^T B + eps I.
        let mut main = vec![0.0f64; n];
        for i in 0..n {
            main[i] = d[i] * d[i] + eps;
            if i > 0 {
                main[i] += e[i - 1] * e[i - 1];
            }
        }
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| d[i] * e[i]).collect();

        // LDL^T factorization (positive definite, no pivoting needed).
        let mut dd = vec![0.0f64; n];
        let mut l = vec![0.0f64; n.saturating_sub(1)];
        dd[0] = main[0];
        for i in 1..n {
            l[i - 1] = off[i - 1] / dd[i - 1];
            dd[i] = main[i] - l[i - 1] * off[i - 1];
        }

        // Forward substitution, diagonal scaling, back substitution.
        let mut w = c.to_vec();
        for i in 1..n {
            let corr = w[i - 1] * l[i - 1];
            w[i] -= corr;
        }
        for i in 0..n {
            w[i] /= dd[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let corr = w[i + 1] * l[i];
            w[i] -= corr;
        }
        w
    }

    /// Power-iteration estimate of `||B^T B||_2 = sigma_max(B)^2`.
    pub fn normal_matrix_norm_estimate(&self) -> f64 {
        let n = self.n();
        let mut x = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
        let mut lambda = 0.0f64;
        for _ in 0..40 {
            let y = self.b_matvec(&x);
            lambda = y.iter().map(|v| v.norm_sqr()).sum::<f64>();
            let z = self.bt_matvec(&y);
            let z_norm = vector_norm(&z);
            if z_norm == 0.0 {
                return 0.0;
            }
            let inv = 1.0 / z_norm;
            for (xi, zi) in x.iter_mut().zip(&z) {
                *xi = zi * inv;
            }
        }
        lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() as f64 / u64::MAX as f64) * 2.0 - 1.0
    }

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| Complex64::new(uniform(&mut rng), uniform(&mut rng)))
    }

    fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex64::new(uniform(&mut rng), uniform(&mut rng))).collect()
    }

    #[test]
    fn lu_solves_a_known_2x2_system() {
        // A = [[2, i], [0, 1]] has solution x = (1 - i/2, 1) for b = (2, 1)
        // ... computed by hand: x2 = 1, 2 x1 + i = 2 => x1 = (2 - i)/2.
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = Complex64::new(2.0, 0.0);
        a[(0, 1)] = Complex64::new(0.0, 1.0);
        a[(1, 1)] = Complex64::new(1.0, 0.0);
        let lu = LuFactors::factor(a).unwrap();
        let x = lu.solve(&[Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!((x[0] - Complex64::new(1.0, -0.5)).norm() < 1e-15);
        assert!((x[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lu_residual_is_tiny_on_random_systems() {
        for seed in 0..5 {
            let n = 40;
            let a = random_matrix(n, seed);
            let b = random_vector(n, seed + 100);
            let lu = LuFactors::factor(a.clone()).unwrap();
            let x = lu.solve(&b);
            let r = a.matvec(&x);
            let resid = vector_distance(&r, &b);
            assert!(resid <= 1e-11 * vector_norm(&b), "residual {resid} too large");
        }
    }

    #[test]
    fn lu_detects_exactly_singular_matrices() {
        // Two identical rows: elimination zeroes the whole second row.
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = ONE;
        a[(0, 1)] = Complex64::new(2.0, 1.0);
        a[(1, 0)] = ONE;
        a[(1, 1)] = Complex64::new(2.0, 1.0);
        match LuFactors::factor(a) {
            Err(Error::SingularSystem { pivot_step }) => assert_eq!(pivot_step, 1),
            other => panic!("expected singular system, got {other:?}"),
        }
    }

    #[test]
    fn conj_transpose_solve_matches_explicit_adjoint() {
        for seed in 0..4 {
            let n = 23;
            let a = random_matrix(n, seed);
            let b = random_vector(n, seed + 7);
            let lu = LuFactors::factor(a.clone()).unwrap();
            let y = lu.solve_conj_transpose(&b);
            // Oracle: form A^H densely and solve with a fresh factorization.
            let ah = CMatrix::from_fn(n, n, |r, c| a[(c, r)].conj());
            let oracle = LuFactors::factor(ah).unwrap().solve(&b);
            let diff = vector_distance(&y, &oracle);
            assert!(diff <= 1e-10 * vector_norm(&oracle), "adjoint solve differs by {diff}");
        }
    }

    #[test]
    fn condition_estimate_recovers_diagonal_inverse_norm() {
        // diag(1, 1e-8): the inverse 1-norm is exactly 1e8.
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = ONE;
        a[(1, 1)] = Complex64::new(1e-8, 0.0);
        let lu = LuFactors::factor(a).unwrap();
        let est = inverse_one_norm_estimate(&lu);
        assert!((est - 1e8).abs() <= 1e-2 * 1e8, "estimate {est}");
    }

    #[test]
    fn condition_estimate_is_exact_for_identity() {
        let lu = LuFactors::factor(CMatrix::identity(6)).unwrap();
        let est = inverse_one_norm_estimate(&lu);
        assert!((est - 1.0).abs() < 1e-12, "estimate {est}");
    }

    #[test]
    fn condition_estimate_never_exceeds_true_inverse_norm_by_much() {
        // The Hager estimator is a lower bound up to roundoff; sanity-check
        // against the exact inverse 1-norm on small random matrices.
        for seed in 10..14 {
            let n = 12;
            let a = random_matrix(n, seed);
            let lu = LuFactors::factor(a.clone()).unwrap();
            // Exact inverse norm column by column.
            let mut exact = 0.0f64;
            for c in 0..n {
                let mut e = vec![ZERO; n];
                e[c] = ONE;
                let col = lu.solve(&e);
                exact = exact.max(col.iter().map(|v| v.norm()).sum());
            }
            let est = inverse_one_norm_estimate(&lu);
            assert!(est <= exact * (1.0 + 1e-10), "estimate {est} above exact {exact}");
            assert!(est >= 0.3 * exact, "estimate {est} far below exact {exact}");
        }
    }

    /// Rebuilds `M x` from the factorization as `Q_L (B (Q_R^H x))`.
    fn factored_matvec(bd: &Bidiagonal, x: &[Complex64]) -> Vec<Complex64> {
        let mut w = x.to_vec();
        bd.apply_qrt(&mut w);
        let mut y = bd.b_matvec(&w);
        bd.apply_ql(&mut y);
        y
    }

    #[test]
    fn bidiagonalization_reconstructs_the_matrix_action() {
        for n in [1usize, 2, 3, 7, 20] {
            let a = random_matrix(n, 42 + n as u64);
            let bd = Bidiagonal::factor(&a);
            for seed in 0..3 {
                let x = random_vector(n, 1000 + seed);
                let direct = a.matvec(&x);
                let via_factors = factored_matvec(&bd, &x);
                let diff = vector_distance(&direct, &via_factors);
                let scale = vector_norm(&direct).max(1.0);
                assert!(diff <= 1e-12 * scale * n as f64, "n = {n}: mismatch {diff}");
            }
        }
    }

    #[test]
    fn bidiagonal_factor_is_real_by_type_and_unitary_round_trip_holds() {
        let n = 15;
        let a = random_matrix(n, 7);
        let bd = Bidiagonal::factor(&a);
        assert_eq!(bd.diag().len(), n);
        assert_eq!(bd.superdiag().len(), n - 1);

        // Q_L Q_L^H = I and Q_R Q_R^H = I, checked on random vectors.
        let x = random_vector(n, 99);
        let mut y = x.clone();
        bd.apply_qlt(&mut y);
        bd.apply_ql(&mut y);
        assert!(vector_distance(&x, &y) <= 1e-13 * vector_norm(&x) * n as f64);
        let mut z = x.clone();
        bd.apply_qr(&mut z);
        bd.apply_qrt(&mut z);
        assert!(vector_distance(&x, &z) <= 1e-13 * vector_norm(&x) * n as f64);
    }

    #[test]
    fn shifted_normal_solve_matches_dense_normal_equations() {
        for n in [1usize, 4, 17] {
            let a = random_matrix(n, 5 + n as u64);
            let f = random_vector(n, 81 + n as u64);
            let bd = Bidiagonal::factor(&a);
            let eps = 1e-3;

            // Factored path: w solves (B^T B + eps) w = B^T Q_L^H f, then
            // h = Q_R w solves (M^H M + eps) h = M^H f.
            let mut g = f.clone();
            bd.apply_qlt(&mut g);
            let c = bd.bt_matvec(&g);
            let w = bd.solve_shifted_normal(eps, &c);
            let mut h = w;
            bd.apply_qr(&mut h);

            // Dense oracle: form M^H M + eps I and M^H f directly.
            let mut normal = CMatrix::zeros(n, n);
            for r in 0..n {
                for c2 in 0..n {
                    let mut s = ZERO;
                    for t in 0..n {
                        s += a[(t, r)].conj() * a[(t, c2)];
                    }
                    normal[(r, c2)] = s;
                }
                normal[(r, r)] += Complex64::new(eps, 0.0);
            }
            let rhs = a.conj_transpose_matvec(&f);
            let oracle = LuFactors::factor(normal).unwrap().solve(&rhs);

            let diff = vector_distance(&h, &oracle);
            let scale = vector_norm(&oracle).max(1.0);
            assert!(diff <= 1e-9 * scale, "n = {n}: Tikhonov paths differ by {diff}");
        }
    }

    #[test]
    fn residual_norm_is_invariant_under_the_unitary_factors() {
        let n = 12;
        let a = random_matrix(n, 3);
        let f = random_vector(n, 4);
        let bd = Bidiagonal::factor(&a);
        let mut g = f.clone();
        bd.apply_qlt(&mut g);
        let c = bd.bt_matvec(&g);
        let w = bd.solve_shifted_normal(1e-2, &c);

        // ||B w - g|| must equal ||M h - f|| with h = Q_R w.
        let bw = bd.b_matvec(&w);
        let internal = vector_distance(&bw, &g);
        let mut h = w;
        bd.apply_qr(&mut h);
        let mh = a.matvec(&h);
        let external = vector_distance(&mh, &f);
        assert!(
            (internal - external).abs() <= 1e-12 * external.max(1.0),
            "residual norms differ: {internal} vs {external}"
        );
    }

    #[test]
    fn normal_norm_estimate_matches_exact_singular_value_on_diagonal() {
        // Diagonal matrix: sigma_max^2 is the largest squared entry.
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 0)] = Complex64::new(2.0, 0.0);
        a[(1, 1)] = Complex64::new(-5.0, 0.0);
        a[(2, 2)] = Complex64::new(1.0, 0.0);
        let bd = Bidiagonal::factor(&a);
        let est = bd.normal_matrix_norm_estimate();
        assert!((est - 25.0).abs() <= 1e-6 * 25.0, "estimate {est}");
    }

    #[test]
    fn matrix_norms_match_hand_values() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = Complex64::new(3.0, 4.0); // |.| = 5
        a[(0, 1)] = Complex64::new(0.0, -2.0); // |.| = 2
        a[(1, 0)] = ONE;
        a[(1, 1)] = ZERO;
        assert!((a.one_norm() - 6.0).abs() < 1e-15); // column 0: 5 + 1
        assert!((a.frobenius_norm() - 30.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn matvec_and_adjoint_matvec_are_consistent() {
        // <A x, y> == <x, A^H y> for random data.
        let n = 9;
        let a = random_matrix(n, 17);
        let x = random_vector(n, 18);
        let y = random_vector(n, 19);
        let ax = a.matvec(&x);
        let ahy = a.conj_transpose_matvec(&y);
        let lhs: Complex64 = ax.iter().zip(&y).map(|(u, v)| u * v.conj()).sum();
        let rhs: Complex64 = x.iter().zip(&ahy).map(|(u, v)| u * v.conj()).sum();
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }
}
