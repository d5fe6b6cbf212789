//! Independent oracles for the acceptance gate.
//!
//! Expected values are computed on plain `Vec<Vec<f64>>` dense matrices by
//! deliberately different routes than the library (classical largest-pivot
//! Jacobi, Gauss-Jordan inversion, explicit D x D covariances), and result
//! CSVs are re-parsed and scored here without touching the library readers,
//! so agreement is meaningful evidence.

use grasstrack::numerics::{Matrix, RandomSource};

/// Row-major dense matrix.
pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    let mut t = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    let mut out = zeros(r, c);
    for i in 0..r {
        for p in 0..k {
            for j in 0..c {
                out[i][j] += a[i][p] * b[p][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn scale(a: &Mat, k: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * k).collect()).collect()
}

pub fn trace(a: &Mat) -> f64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn frob(a: &Mat) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Matrix inverse by Gauss-Jordan elimination with partial pivoting.
pub fn gauss_jordan_inverse(a: &Mat) -> Mat {
    let n = a.len();
    let mut work = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| work[i][col].abs().total_cmp(&work[j][col].abs()))
            .unwrap();
        assert!(work[pivot][col].abs() > 1e-12, "singular matrix in oracle");
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let p = work[col][col];
        for j in 0..n {
            work[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = work[i][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                work[i][j] -= f * work[col][j];
                inv[i][j] -= f * inv[col][j];
            }
        }
    }
    inv
}

/// Classical Jacobi eigendecomposition (largest off-diagonal pivot each
/// step, rotations applied as explicit dense products). Returns eigenvalues
/// in descending order and the matching eigenvectors as columns.
pub fn classical_jacobi(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    let mut s = a.clone();
    let mut v = identity(n);
    let tol = 1e-14 * frob(a).max(1.0);
    for _ in 0..200 * n * n {
        let mut p = 0;
        let mut q = 1;
        let mut max = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                if s[i][j].abs() > max {
                    max = s[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if n < 2 || max <= tol {
            break;
        }
        let theta = 0.5 * (s[q][q] - s[p][p]) / s[p][q];
        let t = if theta >= 0.0 {
            1.0 / (theta + (1.0 + theta * theta).sqrt())
        } else {
            -1.0 / (-theta + (1.0 + theta * theta).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let sn = t * c;
        let mut rot = identity(n);
        rot[p][p] = c;
        rot[q][q] = c;
        rot[p][q] = sn;
        rot[q][p] = -sn;
        s = matmul(&matmul(&transpose(&rot), &s), &rot);
        v = matmul(&v, &rot);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j][j].total_cmp(&s[i][i]));
    let values: Vec<f64> = order.iter().map(|&i| s[i][i]).collect();
    let mut vectors = zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row][new_col] = v[row][old_col];
        }
    }
    (values, vectors)
}

/// Gaussian covariance sigma^2 I + U U^T as an explicit dense matrix.
pub fn dense_covariance(u: &Mat, sigma_sq: f64) -> Mat {
    let d = u.len();
    add(&scale(&identity(d), sigma_sq), &matmul(u, &transpose(u)))
}

/// The printed two-term distance evaluated with explicit D x D matrices:
/// quadratic term Delta^T (2I - U1 U1^T - U2 U2^T) Delta / (2 sigma^2) plus
/// trace term (2n - 2 tr(U1^T U2 U2^T U1)) / (2 sigma^2 (sigma^2 + 1)).
pub fn dense_kl_printed(mu1: &[f64], u1: &Mat, mu2: &[f64], u2: &Mat, sigma_sq: f64) -> f64 {
    let d = mu1.len();
    let n = u1[0].len();
    let m = sub(
        &scale(&identity(d), 2.0),
        &add(&matmul(u1, &transpose(u1)), &matmul(u2, &transpose(u2))),
    );
    let delta: Vec<f64> = mu1.iter().zip(mu2).map(|(a, b)| a - b).collect();
    let quad = dot(&delta, &matvec(&m, &delta)) / (2.0 * sigma_sq);
    let cross = matmul(&transpose(u1), u2);
    let tr = (2.0 * n as f64 - 2.0 * frob(&cross).powi(2)) / (2.0 * sigma_sq * (sigma_sq + 1.0));
    quad + tr
}

/// Exact symmetric KL divergence between N(mu1, C1) and N(mu2, C2) with
/// C_i = sigma^2 I + U_i U_i^T, fully dense:
/// J = tr(C1^-1 C2 + C2^-1 C1 - 2I)/2 + Delta^T (C1^-1 + C2^-1) Delta / 2.
pub fn exact_sym_kl(mu1: &[f64], u1: &Mat, mu2: &[f64], u2: &Mat, sigma_sq: f64) -> f64 {
    let d = mu1.len();
    let c1 = dense_covariance(u1, sigma_sq);
    let c2 = dense_covariance(u2, sigma_sq);
    let c1i = gauss_jordan_inverse(&c1);
    let c2i = gauss_jordan_inverse(&c2);
    let tr = trace(&add(&matmul(&c1i, &c2), &matmul(&c2i, &c1))) - 2.0 * d as f64;
    let delta: Vec<f64> = mu1.iter().zip(mu2).map(|(a, b)| a - b).collect();
    let quad = dot(&delta, &matvec(&add(&c1i, &c2i), &delta));
    0.5 * tr + 0.5 * quad
}

/// Random d x r matrix with orthonormal columns (Gaussian draws followed by
/// twice-iterated modified Gram-Schmidt).
pub fn random_orthonormal(rng: &mut RandomSource, d: usize, r: usize) -> Mat {
    assert!(r <= d);
    'attempt: loop {
        let mut cols: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..d).map(|_| rng.next_gaussian(0.0, 1.0).unwrap()).collect())
            .collect();
        for j in 0..r {
            for _ in 0..2 {
                for i in 0..j {
                    let p = dot(&cols[j], &cols[i]);
                    let prev = cols[i].clone();
                    for (x, y) in cols[j].iter_mut().zip(&prev) {
                        *x -= p * y;
                    }
                }
            }
            let norm = dot(&cols[j], &cols[j]).sqrt();
            if norm < 1e-8 {
                continue 'attempt;
            }
            for x in cols[j].iter_mut() {
                *x /= norm;
            }
        }
        let mut m = zeros(d, r);
        for (j, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m[i][j] = x;
            }
        }
        return m;
    }
}

pub fn random_vector(rng: &mut RandomSource, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.next_gaussian(0.0, 1.0).unwrap()).collect()
}

/// Bridges a dense oracle matrix into the library's matrix type.
pub fn to_library(a: &Mat) -> Matrix<f64> {
    let flat: Vec<f64> = a.iter().flat_map(|r| r.iter().copied()).collect();
    Matrix::from_row_major(a.len(), a[0].len(), flat).unwrap()
}

/// Frobenius norm of (I - U1 U1^T) U2, an upper bound on sin(theta_i) for
/// every principal angle between the spans. The sine route keeps full
/// precision near zero, where a cosine-based angle floors at ~1.5e-8.
pub fn span_residual(u1: &Mat, u2: &Mat) -> f64 {
    let proj = matmul(u1, &matmul(&transpose(u1), u2));
    frob(&sub(u2, &proj))
}

/// One result row as re-parsed by the harness.
pub struct Row {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub w: i64,
    pub h: i64,
}

pub fn parse_records(text: &str) -> Vec<Row> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("frame,x,y,s,w,h,score"), "unexpected records header");
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 7, "bad record row {:?}", l);
            Row {
                frame: f[0].parse().unwrap(),
                x: f[1].parse().unwrap(),
                y: f[2].parse().unwrap(),
                w: f[4].parse().unwrap(),
                h: f[5].parse().unwrap(),
            }
        })
        .collect()
}

pub fn parse_truth(text: &str) -> Vec<[i64; 4]> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<i64> = l.split(',').map(|v| v.trim().parse().unwrap()).collect();
            assert_eq!(f.len(), 4, "bad truth row {:?}", l);
            [f[0], f[1], f[2], f[3]]
        })
        .collect()
}

/// Per-frame center location error, centers taken as top-left + half size.
pub fn center_errors(rows: &[Row], truth: &[[i64; 4]]) -> Vec<f64> {
    assert_eq!(rows.len(), truth.len(), "record/truth length mismatch");
    rows.iter()
        .zip(truth)
        .enumerate()
        .map(|(i, (r, t))| {
            assert_eq!(r.frame, i + 1, "records must cover frames in order");
            let dx = (r.x + r.w as f64 / 2.0) - (t[0] as f64 + t[2] as f64 / 2.0);
            let dy = (r.y + r.h as f64 / 2.0) - (t[1] as f64 + t[3] as f64 / 2.0);
            (dx * dx + dy * dy).sqrt()
        })
        .collect()
}
