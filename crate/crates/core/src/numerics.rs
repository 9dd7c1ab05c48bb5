//! Small dense linear-algebra kernels.
//!
//! Only what the physics needs is here: a full eigendecomposition of real
//! symmetric tridiagonal matrices (the collective `Jx` operator in the Dicke
//! basis is one) and the singular values of a complex matrix (the Schmidt
//! coefficients of a bipartite amplitude grid).
//!
//! Singular values go through the Hermitian Gram matrix: it is reduced to
//! tridiagonal form with complex Householder reflections, the off-diagonal
//! phases are gauged away, and the resulting real tridiagonal matrix is
//! diagonalized with implicit-shift QL.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Gram eigenvalues below this are treated as exact zeros before `sqrt`.
pub const GRAM_EIGENVALUE_FLOOR: f64 = 1e-14;

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidInput("tridiagonal matrix of dimension 0".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "off-diagonal has length {}, expected {}",
                offdiag.len(),
                diag.len() - 1
            )));
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite tridiagonal entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        match row.abs_diff(col) {
            0 => self.diag[row],
            1 => self.offdiag[row.min(col)],
            _ => 0.0,
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }
}

/// Eigendecomposition of a real symmetric matrix.
///
/// `vectors` is row-major `n x n`; column `k` is the unit eigenvector for
/// `values[k]`. Values are ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl SymEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Component `row` of eigenvector `k`.
    pub fn component(&self, row: usize, k: usize) -> f64 {
        self.vectors[row * self.dim() + k]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim()).map(|row| self.component(row, k)).collect()
    }
}

/// Full eigendecomposition of a symmetric tridiagonal matrix by implicit QL.
pub fn eig_sym_tridiag(m: &SymTridiag) -> Result<SymEigen> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidInput("tridiagonal matrix of dimension 0".into()));
    }
    let mut values = m.diag.clone();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql_implicit(&mut values, &m.offdiag, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = z[row * n + old_col];
        }
    }
    Ok(SymEigen {
        values: sorted_values,
        vectors,
    })
}

/// Eigenvalues only (ascending) of a symmetric tridiagonal matrix.
pub fn eigvals_sym_tridiag(m: &SymTridiag) -> Result<Vec<f64>> {
    let mut values = m.diag.clone();
    tql_implicit(&mut values, &m.offdiag, None)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Implicit-shift QL on a tridiagonal matrix. `d` is overwritten with the
/// (unsorted) eigenvalues; when `z` is given (row-major `n x n`), its columns
/// are rotated along so that identity input yields the eigenvectors.
fn tql_implicit(d: &mut [f64], offdiag: &[f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // e[i] couples i and i + 1; e[n - 1] is scratch.
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(offdiag);

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence(MAX_QL_ITERATIONS));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let upper = z[k * n + i + 1];
                        let lower = z[k * n + i];
                        z[k * n + i + 1] = s * lower + c * upper;
                        z[k * n + i] = c * lower - s * upper;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&mut self, factor: Complex64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues (ascending) of a Hermitian matrix. Only the lower triangle
/// is trusted; the input is assumed Hermitian.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::InvalidInput(format!(
            "Hermitian eigenvalues of a non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() == 0 {
        return Err(Error::InvalidInput("matrix of dimension 0".into()));
    }
    eigvals_sym_tridiag(&hermitian_to_tridiag(a))
}

/// Householder reduction of a Hermitian matrix to a real symmetric
/// tridiagonal matrix with the same spectrum.
fn hermitian_to_tridiag(a: &ComplexMatrix) -> SymTridiag {
    let n = a.rows();
    let zero = Complex64::new(0.0, 0.0);
    // Mirror the lower triangle so round-off asymmetry in the input is ignored.
    let mut h = ComplexMatrix::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)].conj() });
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x_norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if x_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * x_norm;

        for (t, i) in (k + 1..n).enumerate() {
            v[t] = h[(i, k)];
        }
        v[0] -= alpha;
        let v_norm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            continue;
        }
        for z in &mut v[..len] {
            *z /= v_norm;
        }

        // w = S v on the trailing block S = h[k+1.., k+1..].
        for t in 0..len {
            let mut acc = zero;
            for u in 0..len {
                acc += h[(k + 1 + t, k + 1 + u)] * v[u];
            }
            w[t] = acc;
        }
        let vw: Complex64 = (0..len).map(|t| v[t].conj() * w[t]).sum();

        // (I - 2vv*) S (I - 2vv*) = S - 2 v w* - 2 w v* + 4 (v*w) v v*
        for t in 0..len {
            for u in 0..len {
                let delta = -2.0 * v[t] * w[u].conj() - 2.0 * w[t] * v[u].conj()
                    + 4.0 * vw * v[t] * v[u].conj();
                h[(k + 1 + t, k + 1 + u)] += delta;
            }
        }
        h[(k + 1, k)] = alpha;
        h[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            h[(i, k)] = zero;
            h[(k, i)] = zero;
        }
    }

    let diag = (0..n).map(|i| h[(i, i)].re).collect();
    // Diagonal phase similarity makes each off-diagonal real and nonnegative.
    let offdiag = (0..n.saturating_sub(1)).map(|i| h[(i + 1, i)].norm()).collect();
    SymTridiag { diag, offdiag }
}

/// Singular values of `a`, descending and nonnegative.
///
/// Computed from the spectrum of the smaller Gram matrix (`a a*` or `a* a`),
/// with eigenvalues under [`GRAM_EIGENVALUE_FLOOR`] set to zero.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidInput("singular values of an empty matrix".into()));
    }
    let gram = if a.rows() <= a.cols() {
        a.matmul(&a.adjoint())?
    } else {
        a.adjoint().matmul(a)?
    };
    let mut sigma: Vec<f64> = hermitian_eigenvalues(&gram)?
        .into_iter()
        .map(|lambda| {
            if lambda < GRAM_EIGENVALUE_FLOOR {
                0.0
            } else {
                lambda.sqrt()
            }
        })
        .collect();
    sigma.reverse();
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruction_error(m: &SymTridiag, eig: &SymEigen) -> f64 {
        let n = m.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| eig.component(i, k) * eig.values[k] * eig.component(j, k))
                    .sum();
                worst = worst.max((r - m.get(i, j)).abs());
            }
        }
        worst
    }

    fn orthonormality_error(eig: &SymEigen) -> f64 {
        let n = eig.dim();
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|i| eig.component(i, a) * eig.component(i, b)).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - expected).abs());
            }
        }
        worst
    }

    /// det(M - x I) for a tridiagonal matrix via the three-term recurrence.
    fn char_poly(m: &SymTridiag, x: f64) -> f64 {
        let (mut prev, mut cur) = (1.0, m.diag()[0] - x);
        for i in 1..m.dim() {
            let next = (m.diag()[i] - x) * cur - m.offdiag()[i - 1].powi(2) * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn one_by_one_is_identity() {
        let m = SymTridiag::new(vec![0.0], vec![]).unwrap();
        let eig = eig_sym_tridiag(&m).unwrap();
        assert_eq!(eig.values, vec![0.0]);
        assert_eq!(eig.vectors, vec![1.0]);
    }

    #[test]
    fn spin_half_jx() {
        let m = SymTridiag::new(vec![0.0, 0.0], vec![0.5]).unwrap();
        let eig = eig_sym_tridiag(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(eig.values[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn spin_one_jx_matches_characteristic_polynomial() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = SymTridiag::new(vec![0.0; 3], vec![h, h]).unwrap();
        // Brute-force root scan of det(M - xI) = -x^3 + x.
        let mut roots = Vec::new();
        let steps = 400_000;
        let (lo, hi) = (-1.5, 1.5);
        let dx = (hi - lo) / steps as f64;
        for s in 0..steps {
            let (a, b) = (lo + s as f64 * dx, lo + (s + 1) as f64 * dx);
            let (fa, fb) = (char_poly(&m, a), char_poly(&m, b));
            if fa == 0.0 || fa * fb < 0.0 {
                roots.push(0.5 * (a + b));
            }
        }
        assert_eq!(roots.len(), 3);
        let eig = eig_sym_tridiag(&m).unwrap();
        for (got, root) in eig.values.iter().zip(&roots) {
            assert_abs_diff_eq!(*got, *root, epsilon = 1e-5);
        }
        assert_abs_diff_eq!(eig.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[2], 1.0, epsilon = 1e-14);
        assert!(reconstruction_error(&m, &eig) < 1e-14);
    }

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(matches!(
            SymTridiag::new(vec![], vec![]),
            Err(Error::InvalidInput(_))
        ));
        assert!(SymTridiag::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiag::new(vec![f64::NAN], vec![]).is_err());
        assert!(matches!(
            singular_values(&ComplexMatrix::zeros(0, 3)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn handles_decoupled_blocks() {
        let m = SymTridiag::new(vec![3.0, 1.0, -2.0, 5.0], vec![0.0, 0.7, 0.0]).unwrap();
        let eig = eig_sym_tridiag(&m).unwrap();
        assert!(reconstruction_error(&m, &eig) < 1e-14);
        assert!(orthonormality_error(&eig) < 1e-14);
        assert_abs_diff_eq!(eig.values[3], 5.0, epsilon = 1e-15);
    }

    #[test]
    fn random_tridiagonal_up_to_201() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[2usize, 5, 17, 64, 130, 201] {
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let off: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
            let m = SymTridiag::new(diag, off).unwrap();
            let eig = eig_sym_tridiag(&m).unwrap();
            let scale = m.max_abs_entry();
            assert!(reconstruction_error(&m, &eig) <= 1e-10 * scale, "n = {n}");
            assert!(orthonormality_error(&eig) <= 1e-10, "n = {n}");
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn tridiagonal_reconstructs(entries in prop::collection::vec(-10.0f64..10.0, 1..80)) {
            let n = entries.len().div_ceil(2);
            let diag = entries[..n].to_vec();
            let mut off = entries[n..].to_vec();
            off.resize(n - 1, 0.25);
            let m = SymTridiag::new(diag, off).unwrap();
            let eig = eig_sym_tridiag(&m).unwrap();
            let scale = m.max_abs_entry().max(f64::MIN_POSITIVE);
            prop_assert!(reconstruction_error(&m, &eig) <= 1e-10 * scale);
            prop_assert!(orthonormality_error(&eig) <= 1e-10);
            let values_only = eigvals_sym_tridiag(&m).unwrap();
            for (a, b) in values_only.iter().zip(&eig.values) {
                prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn singular_values_of_simple_matrices() {
        let one = ComplexMatrix::new(1, 1, vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(singular_values(&one).unwrap(), vec![1.0]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let d = ComplexMatrix::new(2, 2, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, h)]).unwrap();
        let sv = singular_values(&d).unwrap();
        assert_abs_diff_eq!(sv[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(sv[1], h, epsilon = 1e-15);
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn nalgebra_gram_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)]);
        let gram = &m * m.adjoint();
        let mut vals: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(|x, y| y.total_cmp(x));
        vals
    }

    #[test]
    fn random_4x4_matches_independent_gram_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 4, 4);
            let sv = singular_values(&a).unwrap();
            let oracle = nalgebra_gram_eigenvalues(&a);
            for (s, lambda) in sv.iter().zip(&oracle) {
                assert_abs_diff_eq!(*s, lambda.max(0.0).sqrt(), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rectangular_and_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(r, k) in &[(3usize, 7usize), (9, 2), (21, 21), (41, 11)] {
            let a = random_matrix(&mut rng, r, k);
            let sv = singular_values(&a).unwrap();
            assert_eq!(sv.len(), r.min(k));
            assert!(sv.windows(2).all(|w| w[0] >= w[1]));
            let total: f64 = sv.iter().map(|s| s * s).sum();
            let fro = a.frobenius_norm_sqr();
            assert!((total - fro).abs() <= 1e-12 * fro, "{r}x{k}");
        }
    }

    #[test]
    fn rank_one_has_single_nonzero_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u: Vec<Complex64> = (0..7).map(|_| c(rng.random(), rng.random())).collect();
        let v: Vec<Complex64> = (0..5).map(|_| c(rng.random(), rng.random())).collect();
        let mut a = ComplexMatrix::from_fn(7, 5, |i, j| u[i] * v[j]);
        let norm = a.frobenius_norm_sqr().sqrt();
        a.scale(c(1.0 / norm, 0.0));
        let sv = singular_values(&a).unwrap();
        assert_abs_diff_eq!(sv[0], 1.0, epsilon = 1e-10);
        assert!(sv[1..].iter().all(|&s| s <= 1e-10));
    }

    #[test]
    fn hermitian_reduction_preserves_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(&mut rng, 12, 12);
        let h = a.matmul(&a.adjoint()).unwrap();
        let ours = hermitian_eigenvalues(&h).unwrap();
        let mut oracle = nalgebra_gram_eigenvalues(&a);
        oracle.reverse();
        for (x, y) in ours.iter().zip(&oracle) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-10);
        }
    }
}
