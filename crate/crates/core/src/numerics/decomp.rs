//! Symmetric eigendecomposition and thin SVD.
//!
//! The SVD of a tall matrix A (m >= k) goes through the k x k Gram matrix
//! A^T A: a cyclic Jacobi sweep diagonalizes it, singular values are the
//! square roots of its eigenvalues, and left singular vectors are recovered
//! as A v / s. Appearance stacks are 1024 x 6, so the k x k eigenproblem is
//! tiny and the O(D k^2) recovery dominates.

use crate::error::{Error, Result};
use crate::numerics::matrix::{dot, norm2, Matrix};
use crate::scalar::{real, Real};

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone)]
pub struct SymEig<T> {
    /// Eigenvalues, descending.
    pub values: Vec<T>,
    /// Eigenvectors as columns, aligned with `values`.
    pub vectors: Matrix<T>,
}

#[derive(Debug, Clone)]
pub struct ThinSvd<T> {
    /// Left singular vectors, m x k with orthonormal columns.
    pub u: Matrix<T>,
    /// Singular values, descending and nonnegative.
    pub s: Vec<T>,
    /// Right singular vectors, k x k orthonormal.
    pub v: Matrix<T>,
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps run until the off-diagonal norm falls below a threshold relative
/// to the Frobenius norm of the input. Input asymmetry beyond a small
/// magnitude-scaled tolerance is rejected.
pub fn sym_eig<T: Real>(s: &Matrix<T>) -> Result<SymEig<T>> {
    if s.rows() != s.cols() {
        return Err(Error::invalid_input(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.is_finite() {
        return Err(Error::invalid_input("matrix has non-finite entries"));
    }
    let n = s.rows();
    let scale = s.max_abs().max(T::one());
    for i in 0..n {
        for j in 0..i {
            if (s.get(i, j) - s.get(j, i)).abs() > T::SYM_TOL * scale {
                return Err(Error::invalid_input("matrix is not symmetric"));
            }
        }
    }
    let half = T::from_f64(0.5).unwrap();
    let sym = Matrix::from_fn(n, n, |i, j| (s.get(i, j) + s.get(j, i)) * half);
    let (vectors, values) = jacobi(sym)?;
    Ok(sort_and_orient(vectors, values))
}

/// Thin SVD of a tall matrix (m >= k): A = U diag(s) V^T.
///
/// Columns of U for singular values within `Real::RANK_TOL` of zero
/// (relative to the largest) are completed to an orthonormal set, so U^T U
/// is the identity even for rank-deficient input.
pub fn thin_svd<T: Real>(a: &Matrix<T>) -> Result<ThinSvd<T>> {
    let (m, k) = (a.rows(), a.cols());
    if m < k {
        return Err(Error::invalid_input(format!(
            "thin SVD needs rows >= cols, got {}x{}",
            m, k
        )));
    }
    if !a.is_finite() {
        return Err(Error::invalid_input("matrix has non-finite entries"));
    }
    let eig = {
        let (vectors, values) = jacobi(a.gram())?;
        sort_and_orient(vectors, values)
    };
    let mut v = eig.vectors;
    let s: Vec<T> = eig.values.iter().map(|l| l.max(T::zero()).sqrt()).collect();
    let s_max = s.first().copied().unwrap_or_else(T::zero);
    let cutoff = T::RANK_TOL * s_max;

    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut recovered = false;
        if s[i] > cutoff && s[i] > T::zero() {
            let mut col = a.mul_vec(&v.col(i));
            let inv = s[i].recip();
            for x in col.iter_mut() {
                *x = *x * inv;
            }
            orthogonalize(&mut col, &u_cols);
            let norm = norm2(&col);
            // A vanishing residual means this direction is already spanned:
            // the singular value was roundoff masquerading as rank.
            if norm > real::<T>(0.5) {
                for x in col.iter_mut() {
                    *x = *x / norm;
                }
                if flip_to_positive(&mut col) {
                    let mut vc = v.col(i);
                    for x in vc.iter_mut() {
                        *x = -*x;
                    }
                    v.set_col(i, &vc);
                }
                u_cols.push(col);
                recovered = true;
            }
        }
        if !recovered {
            let mut col = complete_column(m, &u_cols)?;
            flip_to_positive(&mut col);
            u_cols.push(col);
        }
    }
    Ok(ThinSvd { u: Matrix::from_cols(&u_cols)?, s, v })
}

/// Left singular vectors of `a` for the `max_cols` largest singular values
/// above the rank cutoff, together with those singular values. Unlike
/// [`thin_svd`] this never pads rank-deficient directions and accepts any
/// shape, which is what subspace fitting needs.
pub fn dominant_left_singular<T: Real>(a: &Matrix<T>, max_cols: usize) -> Result<(Matrix<T>, Vec<T>)> {
    if !a.is_finite() {
        return Err(Error::invalid_input("matrix has non-finite entries"));
    }
    let eig = {
        let (vectors, values) = jacobi(a.gram())?;
        sort_and_orient(vectors, values)
    };
    let s: Vec<T> = eig.values.iter().map(|l| l.max(T::zero()).sqrt()).collect();
    let s_max = s.first().copied().unwrap_or_else(T::zero);
    let cutoff = T::RANK_TOL * s_max;
    let rank = s.iter().take_while(|&&x| x > cutoff && x > T::zero()).count();
    let keep = rank.min(max_cols);

    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(keep);
    for i in 0..keep {
        let mut col = a.mul_vec(&eig.vectors.col(i));
        let inv = s[i].recip();
        for x in col.iter_mut() {
            *x = *x * inv;
        }
        orthogonalize(&mut col, &u_cols);
        let norm = norm2(&col);
        // A vanishing residual means the remaining directions are roundoff:
        // the true rank ends here.
        if norm <= real::<T>(0.5) {
            return Ok((columns_or_empty(u_cols, a.rows())?, s[..i].to_vec()));
        }
        for x in col.iter_mut() {
            *x = *x / norm;
        }
        flip_to_positive(&mut col);
        u_cols.push(col);
    }
    let u = columns_or_empty(u_cols, a.rows())?;
    Ok((u, s[..keep].to_vec()))
}

fn columns_or_empty<T: Real>(cols: Vec<Vec<T>>, rows: usize) -> Result<Matrix<T>> {
    if cols.is_empty() {
        Ok(Matrix::zeros(rows, 0))
    } else {
        Matrix::from_cols(&cols)
    }
}

/// One cyclic Jacobi pass structure: rotations zero each off-diagonal pair
/// in turn, and sweeps repeat until the off-diagonal norm is negligible.
fn jacobi<T: Real>(mut a: Matrix<T>) -> Result<(Matrix<T>, Vec<T>)> {
    let n = a.rows();
    let mut q = Matrix::identity(n);
    if n <= 1 {
        let values = (0..n).map(|i| a.get(i, i)).collect();
        return Ok((q, values));
    }
    let scale = a.frobenius_norm();
    if scale == T::zero() {
        return Ok((q, vec![T::zero(); n]));
    }
    let target = T::JACOBI_TOL * scale;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) < target {
            let values = (0..n).map(|i| a.get(i, i)).collect();
            return Ok((q, values));
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }
    if off_norm(&a) < target {
        let values = (0..n).map(|i| a.get(i, i)).collect();
        return Ok((q, values));
    }
    Err(Error::InvalidState("Jacobi eigensolver did not converge".into()))
}

fn off_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut acc = T::zero();
    for p in 0..n {
        for r in 0..n {
            if p != r {
                let x = a.get(p, r);
                acc += x * x;
            }
        }
    }
    acc.sqrt()
}

fn rotate<T: Real>(a: &mut Matrix<T>, q: &mut Matrix<T>, p: usize, r: usize) {
    let apr = a.get(p, r);
    if apr == T::zero() {
        return;
    }
    let app = a.get(p, p);
    let arr = a.get(r, r);
    let diff = arr - app;
    let two = T::from_f64(2.0).unwrap();
    // 100 * |a_pr| negligible next to the diagonal gap means the exact
    // rotation angle underflows; fall back to the small-angle tangent.
    let t = if apr.abs() * T::from_f64(100.0).unwrap() < T::epsilon() * diff.abs() {
        apr / diff
    } else {
        let theta = diff / (two * apr);
        let abs_t = (theta.abs() + (T::one() + theta * theta).sqrt()).recip();
        if theta < T::zero() {
            -abs_t
        } else {
            abs_t
        }
    };
    let c = (T::one() + t * t).sqrt().recip();
    let s = t * c;
    let n = a.rows();

    a.set(p, p, app - t * apr);
    a.set(r, r, arr + t * apr);
    a.set(p, r, T::zero());
    a.set(r, p, T::zero());
    for k in 0..n {
        if k == p || k == r {
            continue;
        }
        let akp = a.get(k, p);
        let akr = a.get(k, r);
        let new_p = c * akp - s * akr;
        let new_r = s * akp + c * akr;
        a.set(k, p, new_p);
        a.set(p, k, new_p);
        a.set(k, r, new_r);
        a.set(r, k, new_r);
    }
    for k in 0..n {
        let qkp = q.get(k, p);
        let qkr = q.get(k, r);
        q.set(k, p, c * qkp - s * qkr);
        q.set(k, r, s * qkp + c * qkr);
    }
}

fn sort_and_orient<T: Real>(vectors: Matrix<T>, values: Vec<T>) -> SymEig<T> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite eigenvalues"));
    let sorted_values: Vec<T> = order.iter().map(|&i| values[i]).collect();
    let mut cols: Vec<Vec<T>> = order.iter().map(|&i| vectors.col(i)).collect();
    for col in cols.iter_mut() {
        flip_to_positive(col);
    }
    let vectors = if n == 0 {
        Matrix::zeros(0, 0)
    } else {
        Matrix::from_cols(&cols).expect("columns share the matrix height")
    };
    SymEig { values: sorted_values, vectors }
}

/// Makes the largest-magnitude entry positive; returns whether it flipped.
fn flip_to_positive<T: Real>(col: &mut [T]) -> bool {
    let mut best = 0usize;
    for (i, x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if !col.is_empty() && col[best] < T::zero() {
        for x in col.iter_mut() {
            *x = -*x;
        }
        true
    } else {
        false
    }
}

fn orthogonalize<T: Real>(col: &mut [T], basis: &[Vec<T>]) {
    for b in basis {
        let proj = dot(col, b);
        for (x, y) in col.iter_mut().zip(b.iter()) {
            *x = *x - proj * *y;
        }
    }
}

/// Deterministic orthonormal completion: the first coordinate vector with a
/// substantial residual against the existing columns, normalized.
fn complete_column<T: Real>(m: usize, basis: &[Vec<T>]) -> Result<Vec<T>> {
    let quarter = T::from_f64(0.25).unwrap();
    for j in 0..m {
        let mut col = vec![T::zero(); m];
        col[j] = T::one();
        orthogonalize(&mut col, basis);
        let n2 = dot(&col, &col);
        if n2 > quarter {
            let inv = n2.sqrt().recip();
            for x in col.iter_mut() {
                *x = *x * inv;
            }
            return Ok(col);
        }
    }
    Err(Error::InvalidState("could not complete orthonormal basis".into()))
}
