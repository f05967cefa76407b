//! Dense complex linear algebra for Hermitian positive-definite matrices.
//!
//! The detectors only ever need three things from a covariance matrix
//! `R = Σ w_l h_l h_l^H + N0·I`: its inverse, its log-determinant, and the
//! ability to move both along a rank-1 direction in O(N²). This module
//! provides exactly that, plus the seeded Gaussian sampler used everywhere.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Relative tolerance for Hermitian checks on inputs.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Smallest admissible `1 + c·h^H A^{-1} h` in a rank-1 update.
pub const SINGULAR_GUARD: f64 = 1e-12;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid(format!("matrix dimensions must be positive, got {rows}x{cols}"));
        }
        if data.len() != rows * cols {
            return invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(scale, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds an `n x k` matrix from `k` columns of length `n`.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let Some(first) = columns.first() else {
            return invalid("need at least one column");
        };
        let rows = first.len();
        if columns.iter().any(|c| c.len() != rows) {
            return invalid("columns have different lengths");
        }
        let mut data = Vec::with_capacity(rows * columns.len());
        for r in 0..rows {
            for col in columns {
                data.push(col[r]);
            }
        }
        Self::new(rows, columns.len(), data)
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = rel_tol * self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Replaces the matrix by `(M + M^H)/2`.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        let n = self.rows;
        for i in 0..n {
            let d = self[(i, i)].re;
            self[(i, i)] = Complex64::new(d, 0.0);
            for j in i + 1..n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    /// Adds `weight · v v^H` to a square matrix.
    pub fn add_outer(&mut self, v: &[Complex64], weight: f64) {
        assert!(self.is_square() && v.len() == self.rows);
        let n = self.rows;
        for i in 0..n {
            let vi = v[i] * weight;
            let row = &mut self.data[i * n..(i + 1) * n];
            for (d, vj) in row.iter_mut().zip(v) {
                *d += vi * vj.conj();
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// `a^H b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Inverse and log-determinant of a Hermitian positive-definite matrix.
///
/// The stored inverse is kept exactly Hermitian: every update writes the
/// upper triangle and mirrors it.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianFactor {
    inverse: ComplexMatrix,
    log_det: f64,
}

/// Scalars shared by the inverse and log-det halves of a rank-1 update.
#[derive(Debug, Clone)]
pub struct Rank1Terms {
    /// `A^{-1} h`.
    pub projected: Vec<Complex64>,
    /// `h^H A^{-1} h`, real for Hermitian `A`.
    pub gain: f64,
}

impl Rank1Terms {
    /// `1 + c·h^H A^{-1} h`.
    pub fn denominator(&self, c: f64) -> f64 {
        1.0 + c * self.gain
    }
}

impl HermitianFactor {
    /// Factor of `scale · I`.
    pub fn scaled_identity(n: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return invalid(format!("scale must be positive and finite, got {scale}"));
        }
        Ok(Self {
            inverse: ComplexMatrix::scaled_identity(n, 1.0 / scale),
            log_det: n as f64 * scale.ln(),
        })
    }

    pub fn dim(&self) -> usize {
        self.inverse.rows()
    }

    pub fn inverse(&self) -> &ComplexMatrix {
        &self.inverse
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn rank1_terms(&self, h: &[Complex64]) -> Result<Rank1Terms> {
        if h.len() != self.dim() {
            return invalid(format!(
                "vector of length {} does not match factor dimension {}",
                h.len(),
                self.dim()
            ));
        }
        let projected = self.inverse.mul_vec(h);
        let gain = inner(h, &projected).re;
        Ok(Rank1Terms { projected, gain })
    }

    /// Moves the factor from `A` to `A + c·h h^H` given precomputed terms for `h`.
    pub fn apply_rank1(&mut self, terms: &Rank1Terms, c: f64) -> Result<()> {
        if c == 0.0 {
            return Ok(());
        }
        let den = terms.denominator(c);
        if !(den > SINGULAR_GUARD) {
            return Err(Error::SingularUpdate { denominator: den });
        }
        let nu = c / den;
        let u = &terms.projected;
        let n = self.dim();
        for i in 0..n {
            let ui = u[i] * nu;
            let diag = self.inverse[(i, i)].re - ui.re * u[i].re - ui.im * u[i].im;
            self.inverse[(i, i)] = Complex64::new(diag, 0.0);
            for j in i + 1..n {
                let v = self.inverse[(i, j)] - ui * u[j].conj();
                self.inverse[(i, j)] = v;
                self.inverse[(j, i)] = v.conj();
            }
        }
        self.log_det += den.ln();
        Ok(())
    }
}

/// Cholesky-based inverse and log-determinant of a Hermitian PD matrix.
pub fn invert_and_logdet(a: &ComplexMatrix) -> Result<HermitianFactor> {
    if !a.is_square() {
        return invalid(format!("expected a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    if !a.is_hermitian(HERMITIAN_TOL) {
        return invalid("matrix is not Hermitian");
    }
    let n = a.rows();
    // Lower-triangular L with A = L L^H.
    let mut l = ComplexMatrix::zeros(n, n);
    let mut log_det = 0.0;
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        log_det += 2.0 * ljj.ln();
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }

    // Forward substitution for L^{-1} (lower triangular).
    let mut linv = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        linv[(j, j)] = Complex64::new(1.0 / l[(j, j)].re, 0.0);
        for i in j + 1..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..i {
                s += l[(i, k)] * linv[(k, j)];
            }
            linv[(i, j)] = -s / l[(i, i)].re;
        }
    }

    // A^{-1} = L^{-H} L^{-1}; only the upper triangle is computed.
    let mut inverse = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..n {
                s += linv[(k, i)].conj() * linv[(k, j)];
            }
            if i == j {
                inverse[(i, i)] = Complex64::new(s.re, 0.0);
            } else {
                inverse[(i, j)] = s;
                inverse[(j, i)] = s.conj();
            }
        }
    }
    Ok(HermitianFactor { inverse, log_det })
}

/// `(A + c·h h^H)^{-1}` and its log-determinant via the matrix inversion lemma.
pub fn rank1_inverse_update(f: &HermitianFactor, h: &[Complex64], c: f64) -> Result<HermitianFactor> {
    let terms = f.rank1_terms(h)?;
    let mut out = f.clone();
    out.apply_rank1(&terms, c)?;
    Ok(out)
}

/// `ln det(A + c·h h^H) = ln det A + ln(1 + c·h^H A^{-1} h)`.
pub fn rank1_logdet_update(f: &HermitianFactor, h: &[Complex64], c: f64) -> Result<f64> {
    let terms = f.rank1_terms(h)?;
    let den = terms.denominator(c);
    if !(den > SINGULAR_GUARD) {
        return Err(Error::SingularUpdate { denominator: den });
    }
    Ok(f.log_det + den.ln())
}

/// `Re(y^H A^{-1} y)`.
pub fn quadratic_form(y: &[Complex64], f: &HermitianFactor) -> Result<f64> {
    if y.len() != f.dim() {
        return invalid(format!(
            "vector of length {} does not match factor dimension {}",
            y.len(),
            f.dim()
        ));
    }
    Ok(inner(y, &f.inverse.mul_vec(y)).re)
}

/// Seeded random stream keyed by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id selecting an independent keystream,
/// so trial `t` of a run can be regenerated without replaying trials `0..t`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// One CSCG draw with total variance `variance`.
    pub fn cscg(&mut self, variance: f64) -> Complex64 {
        let s = (variance / 2.0).sqrt();
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    }

    pub fn cscg_vec(&mut self, len: usize, variance: f64) -> Vec<Complex64> {
        (0..len).map(|_| self.cscg(variance)).collect()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u128) -> u128 {
        assert!(n > 0, "empty range");
        self.rng.random_range(0..n)
    }

    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        self.rng.random_range(0..n)
    }
}

/// Matrix of i.i.d. CSCG entries with total variance `variance`.
pub fn sample_cscg(rng: &mut RngStream, rows: usize, cols: usize, variance: f64) -> Result<ComplexMatrix> {
    if !(variance > 0.0 && variance.is_finite()) {
        return invalid(format!("variance must be positive, got {variance}"));
    }
    if rows == 0 || cols == 0 {
        return invalid("matrix dimensions must be positive");
    }
    let data = (0..rows * cols).map(|_| rng.cscg(variance)).collect();
    ComplexMatrix::new(rows, cols, data)
}
