//! Dense complex linear algebra for the small Hermitian problems in this crate.
//!
//! Everything here works on square row-major matrices of `Complex64`. The
//! eigensolver is a cyclic complex Jacobi method: for the dimensions we care
//! about (a few up to a few hundred) it is accurate to machine precision and
//! its output is made deterministic by canonicalizing every eigenspace.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::model::{DensityMatrix, HermitianOperator};
use crate::{Error, Result};

pub type C64 = Complex64;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-12;
const SVD_MAX_SWEEPS: usize = 80;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row vectors, rejecting ragged or empty input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Shape("matrix has no rows".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {dim}", r.len())));
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Outer product |v⟩⟨v|.
    pub fn projector(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute column sum, an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |A - A†|` entrywise.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| self[(r / m, c / m)] * other[(r % m, c % m)])
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum entrywise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of a unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `max - min`.
    pub fn width(&self) -> f64 {
        self.max() - self.min()
    }

    /// `V diag(e) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        matrix_function(self, |x| C64::new(x, 0.0))
    }

    /// `V† A V`, i.e. `A` expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.eigenvectors;
        &(&v.adjoint() * a) * v
    }

    /// `V A V†`, the inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.eigenvectors;
        &(v * a) * &v.adjoint()
    }
}

pub fn eig_hermitian(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    eig_hermitian_matrix(h.matrix())
}

/// Jacobi eigendecomposition of a matrix the caller knows to be Hermitian.
pub(crate) fn eig_hermitian_matrix(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a[(p, q)].norm_sqr();
            }
        }
        s.sqrt()
    };

    // Once the off-diagonal mass drops under the threshold a couple of extra
    // sweeps take it to rounding level (Jacobi converges quadratically).
    let mut polish = 2;
    let mut converged = off_norm(&a) <= JACOBI_TOL * scale;
    let mut sweeps = 0;
    while !(converged && polish == 0) {
        if converged {
            polish -= 1;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence { dim: n });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        let off = off_norm(&a);
        if off <= f64::EPSILON * scale * 0.5 {
            converged = true;
            polish = 0;
        } else if off <= JACOBI_TOL * scale {
            converged = true;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();

    canonicalize_eigenspaces(&eigenvalues, &mut vectors);

    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| vectors[j][i]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase that makes the pivot real, followed by a real rotation.
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_c = phase.conj();

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q); A <- G† A G, V <- V G.
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = ph_c * (-s);
    let g_qq = ph_c * c;
    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Replaces the basis of every (numerically) degenerate eigenspace by the
/// Gram-Schmidt orthonormalization of its projections of the standard basis
/// vectors, taken in index order, then fixes each vector's phase so its
/// largest component is real and positive.
fn canonicalize_eigenspaces(eigenvalues: &[f64], vectors: &mut [Vec<C64>]) {
    let n = eigenvalues.len();
    let scale = eigenvalues.iter().fold(1.0_f64, |m, e| m.max(e.abs()));
    let tol = 1e-11 * scale;

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let basis = canonical_basis(&vectors[start..end], n);
            for (slot, b) in vectors[start..end].iter_mut().zip(basis) {
                *slot = b;
            }
        }
        start = end;
    }

    for vec in vectors.iter_mut() {
        fix_phase(vec);
    }
}

fn canonical_basis(span: &[Vec<C64>], n: usize) -> Vec<Vec<C64>> {
    let g = span.len();
    // Column k of the projector onto the span is P e_k.
    let project = |k: usize| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); n];
        for u in span {
            let coeff = u[k].conj();
            for (o, x) in out.iter_mut().zip(u) {
                *o += x * coeff;
            }
        }
        out
    };

    for threshold in [1e-3, 1e-12] {
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(g);
        for k in 0..n {
            if basis.len() == g {
                break;
            }
            let mut w = project(k);
            for _ in 0..2 {
                for b in &basis {
                    let overlap: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= overlap * bi;
                    }
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > threshold {
                basis.push(w.into_iter().map(|z| z / norm).collect());
            }
        }
        if basis.len() == g {
            return basis;
        }
    }
    span.to_vec()
}

fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("maximum is attained");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// `V diag(f(e_j)) V†`.
pub fn matrix_function(s: &SpectralDecomposition, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let n = s.dim();
    let vals: Vec<C64> = s.eigenvalues.iter().map(|&x| f(x)).collect();
    let v = &s.eigenvectors;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += v[(i, k)] * vals[k] * v[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// `exp(-i t H)` by spectral calculus.
pub fn unitary_evolution(s: &SpectralDecomposition, t: f64) -> ComplexMatrix {
    matrix_function(s, |x| C64::from_polar(1.0, -x * t))
}

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
///
/// Working on the columns directly avoids forming `A†A`, so small singular
/// values keep their relative accuracy.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    let nsq = |x: &[C64]| -> f64 { x.iter().map(|z| z.norm_sqr()).sum() };

    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = nsq(&cols[i]);
                let beta = nsq(&cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                let ci = &mut left[i];
                let cj = &mut right[0];
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let yj = *y * phase;
                    let xi = *x;
                    *x = xi * c - yj * s;
                    *y = xi * s + yj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| nsq(c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Sum of singular values.
pub fn nuclear_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Principal square root of a density matrix, clipping negative dust.
pub fn sqrt_psd(s: &SpectralDecomposition) -> ComplexMatrix {
    matrix_function(s, |x| C64::new(x.max(0.0).sqrt(), 0.0))
}

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)`, evaluated as the trace norm of `√ρ √σ`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let a = sqrt_psd(rho.spectrum());
    let b = sqrt_psd(sigma.spectrum());
    Ok(nuclear_norm(&(&a * &b)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_density, validate_hermitian};
    use crate::random::{random_density, random_hermitian, rng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input_sorts_eigenvalues() {
        let h = validate_hermitian(ComplexMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        let s = eig_hermitian(&h).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        // permutation vectors: e1, e2, e0
        let expected =
            ComplexMatrix::from_real_rows(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(s.eigenvectors.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let h = validate_hermitian(ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        let s = eig_hermitian(&h).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let minus = s.vector(0);
        let plus = s.vector(1);
        // up to a global phase
        assert!((minus[0] * minus[1].conj() + 0.5).norm() < 1e-14);
        assert!((plus[0].norm() - r).abs() < 1e-14);
        assert!((plus[0] * plus[1].conj() - 0.5).norm() < 1e-14);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let mut r = rng(7);
        for _ in 0..20 {
            let h = random_hermitian(&mut r, 6, 3.0);
            let s = eig_hermitian(&h).unwrap();
            let rec = s.reconstruct();
            let rel = (&rec - h.matrix()).frobenius_norm() / h.matrix().frobenius_norm();
            assert!(rel < 1e-9, "relative reconstruction error {rel}");
            let vv = &s.eigenvectors.adjoint() * &s.eigenvectors;
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let tr = h.matrix().trace().re;
            let sum: f64 = s.eigenvalues.iter().sum();
            assert!((sum - tr).abs() <= 1e-9 * (1.0 + tr.abs()));
        }
    }

    #[test]
    fn degenerate_spaces_are_canonical() {
        // identity: canonical basis is the standard basis whatever the input order
        let h = validate_hermitian(ComplexMatrix::identity(4)).unwrap();
        let s = eig_hermitian(&h).unwrap();
        assert!(s.eigenvectors.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);

        // a rotated degenerate matrix gives the same output twice
        let mut r = rng(11);
        let u = random_density(&mut r, 4, 4).spectrum().eigenvectors.clone();
        let d = ComplexMatrix::diag(&[1.0, 1.0, 2.0, 5.0]);
        let m = &(&u * &d) * &u.adjoint();
        let h = validate_hermitian(m).unwrap();
        let a = eig_hermitian(&h).unwrap();
        let b = eig_hermitian(&h).unwrap();
        assert_eq!(a, b);
        let rel = (&a.reconstruct() - h.matrix()).frobenius_norm();
        assert!(rel < 1e-12);
    }

    #[test]
    fn phase_fix_makes_largest_component_real_positive() {
        let mut r = rng(3);
        let h = random_hermitian(&mut r, 5, 1.0);
        let s = eig_hermitian(&h).unwrap();
        for j in 0..5 {
            let v = s.vector(j);
            let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let p = v.iter().position(|z| z.norm() >= max - 1e-12).unwrap();
            assert!(v[p].re > 0.0 && v[p].im == 0.0);
        }
    }

    #[test]
    fn identity_function_round_trips() {
        let h = validate_hermitian(ComplexMatrix::diag(&[1.0, 2.0])).unwrap();
        let s = eig_hermitian(&h).unwrap();
        let m = matrix_function(&s, |x| c(x, 0.0));
        assert!(m.max_abs_diff(&ComplexMatrix::diag(&[1.0, 2.0])) < 1e-15);
    }

    #[test]
    fn exponential_of_sigma_z() {
        let h = validate_hermitian(ComplexMatrix::diag(&[1.0, -1.0])).unwrap();
        let s = eig_hermitian(&h).unwrap();
        let u = unitary_evolution(&s, 1.0);
        assert!((u[(0, 0)] - C64::from_polar(1.0, -1.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - C64::from_polar(1.0, 1.0)).norm() < 1e-15);
        let uu = &u.adjoint() * &u;
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn evolution_is_unitary_for_random_generators() {
        let mut r = rng(5);
        for (k, d) in (2..7).enumerate() {
            let h = random_hermitian(&mut r, d, 5.0);
            let s = eig_hermitian(&h).unwrap();
            let u = unitary_evolution(&s, 0.37 * (k as f64 + 1.0));
            let uu = &u.adjoint() * &u;
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(d)) <= 1e-10);
        }
    }

    #[test]
    fn square_root_squares_back() {
        let mut r = rng(9);
        for d in 2..6 {
            let rho = random_density(&mut r, d, d);
            let root = sqrt_psd(rho.spectrum());
            let back = &root * &root;
            let rel = (&back - rho.matrix()).frobenius_norm() / rho.matrix().frobenius_norm();
            assert!(rel < 1e-9);
        }
    }

    #[test]
    fn fidelity_identical_and_orthogonal() {
        let zero = validate_density(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        let one = validate_density(ComplexMatrix::diag(&[0.0, 1.0])).unwrap();
        assert!((uhlmann_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-10);
        assert!(uhlmann_fidelity(&zero, &one).unwrap().abs() < 1e-15);

        let mut r = rng(1);
        let rho = random_density(&mut r, 4, 3);
        assert!((uhlmann_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_matches_qubit_closed_form() {
        let mut r = rng(21);
        for _ in 0..50 {
            let rho = random_density(&mut r, 2, 2);
            let sigma = random_density(&mut r, 2, 2);
            let f = uhlmann_fidelity(&rho, &sigma).unwrap();
            let f_sym = uhlmann_fidelity(&sigma, &rho).unwrap();
            // F = Tr√(√ρσ√ρ); its square is Tr[ρσ] + 2√(det ρ det σ) for qubits
            let overlap = (rho.matrix() * sigma.matrix()).trace().re;
            let det = |m: &ComplexMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
            let closed = overlap + 2.0 * (det(rho.matrix()) * det(sigma.matrix())).max(0.0).sqrt();
            assert!((f * f - closed).abs() < 1e-8, "{} vs {}", f * f, closed);
            assert!((f - f_sym).abs() < 1e-9);
        }
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = validate_density(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        let b = validate_density(ComplexMatrix::diag(&[1.0, 0.0, 0.0])).unwrap();
        assert!(matches!(uhlmann_fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn singular_values_of_scaled_unitary() {
        let mut r = rng(4);
        let u = random_density(&mut r, 5, 5).spectrum().eigenvectors.clone();
        let d = ComplexMatrix::diag(&[3.0, 1e-6, 2.0, 0.5, 1e-3]);
        let m = &(&u * &d) * &u.adjoint().scale(c(0.0, 1.0));
        let sv = singular_values(&m);
        let expected = [3.0, 2.0, 0.5, 1e-3, 1e-6];
        for (a, b) in sv.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14 * 3.0, "{a} vs {b}");
        }
    }

    #[test]
    fn kron_of_paulis() {
        let z = ComplexMatrix::diag(&[1.0, -1.0]);
        let zz = z.kron(&z);
        assert!(zz.max_abs_diff(&ComplexMatrix::diag(&[1.0, -1.0, -1.0, 1.0])) == 0.0);
    }
}
