//! Subspaces of R^D and distances between them.
//!
//! A linear subspace is held as an orthonormal basis U (D x r). Principal
//! angles between two subspaces come from the singular values of U_x^T U_y:
//! cos(theta_i) = sigma_i, with the angles sorted ascending in [0, pi/2].
//! The geodesic distance on the Grassmann manifold is ||theta||_2 and the
//! projection distance is ||sin(theta)||_2.
//!
//! An affine subspace adds an origin mu, and the combined distance between
//! two affine subspaces augments the geodesic term with a Mahalanobis-style
//! penalty on the origin offset delta = mu_x - mu_y:
//!
//!   d(A, B) = d_G(U_a, U_b) + alpha * delta^T (2I - U_a U_a^T - U_b U_b^T) delta
//!
//! evaluated matrix-free as 2||delta||^2 - ||U_a^T delta||^2 - ||U_b^T delta||^2.

use crate::error::{Error, Result};
use crate::numerics::{dot, sym_eig, Matrix};
use crate::scalar::{real, Real};

/// Linear subspace spanned by orthonormal basis columns.
#[derive(Debug, Clone)]
pub struct LinearSubspace<T> {
    basis: Matrix<T>,
}

impl<T: Real> LinearSubspace<T> {
    /// Wraps a D x r basis, validating finiteness and orthonormality.
    pub fn new(basis: Matrix<T>) -> Result<Self> {
        if !basis.is_finite() {
            return Err(Error::invalid_input("basis has non-finite entries"));
        }
        if basis.cols() > basis.rows() {
            return Err(Error::invalid_input(format!(
                "basis rank {} exceeds ambient dimension {}",
                basis.cols(),
                basis.rows()
            )));
        }
        let gram = basis.gram();
        for i in 0..basis.cols() {
            for j in 0..basis.cols() {
                let expect = if i == j { T::one() } else { T::zero() };
                if (gram.get(i, j) - expect).abs() > T::ORTHO_TOL {
                    return Err(Error::invalid_input("basis columns are not orthonormal"));
                }
            }
        }
        Ok(LinearSubspace { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }
}

/// Affine subspace: origin plus a linear span.
#[derive(Debug, Clone)]
pub struct AffineSubspace<T> {
    origin: Vec<T>,
    span: LinearSubspace<T>,
}

impl<T: Real> AffineSubspace<T> {
    pub fn new(origin: Vec<T>, span: LinearSubspace<T>) -> Result<Self> {
        if origin.len() != span.ambient_dim() {
            return Err(Error::invalid_input(format!(
                "origin dimension {} does not match ambient dimension {}",
                origin.len(),
                span.ambient_dim()
            )));
        }
        if origin.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid_input("origin has non-finite entries"));
        }
        Ok(AffineSubspace { origin, span })
    }

    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    pub fn span(&self) -> &LinearSubspace<T> {
        &self.span
    }

    pub fn ambient_dim(&self) -> usize {
        self.span.ambient_dim()
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }
}

/// Principal angles between two subspaces, ascending in [0, pi/2].
///
/// Returns min(rank_x, rank_y) angles; singular values of U_x^T U_y are
/// clamped into [0, 1] before acos so roundoff cannot push them outside the
/// domain.
pub fn principal_angles<T: Real>(x: &LinearSubspace<T>, y: &LinearSubspace<T>) -> Result<Vec<T>> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::invalid_input(format!(
            "ambient dimensions differ: {} vs {}",
            x.ambient_dim(),
            y.ambient_dim()
        )));
    }
    let l = x.rank().min(y.rank());
    if l == 0 {
        return Ok(Vec::new());
    }
    let c = x.basis().tr_mul(y.basis());
    // Work with the smaller Gram factor of C; its eigenvalues are sigma^2.
    let g = if c.rows() <= c.cols() {
        c.transpose().gram()
    } else {
        c.gram()
    };
    let eig = sym_eig(&g)?;
    // Eigenvalues are sorted descending, so the angles come out ascending.
    // Singular values within a few machine epsilons of 1 are treated as
    // exactly 1: the Gram route cannot distinguish them from 1, and acos
    // would amplify that roundoff into phantom angles near 1e-8.
    let snap = T::one() - real::<T>(32.0) * T::epsilon();
    let angles: Vec<T> = eig
        .values
        .iter()
        .map(|l2| {
            let sigma = l2.max(T::zero()).sqrt().min(T::one());
            if sigma >= snap {
                T::zero()
            } else {
                sigma.acos()
            }
        })
        .collect();
    Ok(angles)
}

/// Geodesic (arc-length) distance: l2 norm of the principal angles.
pub fn geodesic_distance<T: Real>(x: &LinearSubspace<T>, y: &LinearSubspace<T>) -> Result<T> {
    let angles = principal_angles(x, y)?;
    Ok(dot(&angles, &angles).sqrt())
}

/// Projection distance: l2 norm of the principal angle sines.
pub fn projection_distance<T: Real>(x: &LinearSubspace<T>, y: &LinearSubspace<T>) -> Result<T> {
    let angles = principal_angles(x, y)?;
    let mut acc = T::zero();
    for a in angles {
        let s = a.sin();
        acc += s * s;
    }
    Ok(acc.sqrt())
}

/// Quadratic origin-offset term delta^T (2I - U_a U_a^T - U_b U_b^T) delta,
/// computed matrix-free. Nonnegative because the middle matrix is PSD.
fn origin_penalty<T: Real>(a: &AffineSubspace<T>, b: &AffineSubspace<T>) -> T {
    let delta: Vec<T> = a
        .origin()
        .iter()
        .zip(b.origin().iter())
        .map(|(p, q)| *p - *q)
        .collect();
    let two = T::from_f64(2.0).unwrap();
    let pa = a.span().basis().tr_mul_vec(&delta);
    let pb = b.span().basis().tr_mul_vec(&delta);
    let quad = two * dot(&delta, &delta) - dot(&pa, &pa) - dot(&pb, &pb);
    quad.max(T::zero())
}

/// Combined affine-subspace distance: geodesic term plus `alpha` times the
/// origin penalty.
pub fn affine_distance<T: Real>(a: &AffineSubspace<T>, b: &AffineSubspace<T>, alpha: T) -> Result<T> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::invalid_input(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    if !alpha.is_finite() || alpha < T::zero() {
        return Err(Error::invalid_input(format!(
            "alpha must be finite and nonnegative, got {}",
            alpha
        )));
    }
    let geo = geodesic_distance(a.span(), b.span())?;
    Ok(geo + alpha * origin_penalty(a, b))
}

/// Symmetric Kullback-Leibler distance between the probabilistic subspace
/// models N(mu_i, sigma^2 I + U_i U_i^T), specialized to orthonormal bases
/// of equal rank n:
///
///   J = (1 / 2 sigma^2) delta^T (2I - U_1 U_1^T - U_2 U_2^T) delta
///     + (1 / (2 sigma^2 (sigma^2 + 1))) (2n - 2 ||U_1^T U_2||_F^2)
pub fn kl_distance<T: Real>(a: &AffineSubspace<T>, b: &AffineSubspace<T>, sigma_sq: T) -> Result<T> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::invalid_input(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    if a.rank() != b.rank() {
        return Err(Error::invalid_input(format!(
            "KL distance needs equal ranks, got {} vs {}",
            a.rank(),
            b.rank()
        )));
    }
    if !(sigma_sq > T::zero()) || !sigma_sq.is_finite() {
        return Err(Error::invalid_input(format!(
            "sigma^2 must be finite and positive, got {}",
            sigma_sq
        )));
    }
    let two = T::from_f64(2.0).unwrap();
    let n = T::from_usize(a.rank()).unwrap();
    let quad = origin_penalty(a, b);
    let c = a.span().basis().tr_mul(b.span().basis());
    let trace = c.frobenius_norm().powi(2);
    let term1 = quad / (two * sigma_sq);
    let term2 = (two * n - two * trace) / (two * sigma_sq * (sigma_sq + T::one()));
    Ok(term1 + term2)
}
