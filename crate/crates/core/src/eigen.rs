//! Dense Hermitian eigensolver.
//!
//! Householder reduction to Hermitian tridiagonal form, a diagonal phase
//! similarity that makes the off-diagonal real, then implicit QL with
//! Wilkinson-style shifts on the real symmetric tridiagonal matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Complex64, Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Square Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Checks Hermitian symmetry to `1e-12` of the largest entry.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Config("matrix data length is not n*n"));
        }
        let scale = data.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        for i in 0..n {
            for j in 0..=i {
                let d = (data[i * n + j] - data[j * n + i].conj()).norm();
                if d > 1e-12 * scale.max(f64::MIN_POSITIVE) || !data[i * n + j].is_finite() {
                    return Err(Error::Config("matrix is not Hermitian"));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_real_symmetric(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(n, data.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Eigen-decomposition result. `vectors` is row-major with eigenvector `k`
/// in column `k`, matching `values[k]`; values are sorted descending.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Complex64>>,
}

/// Eigenvalues (descending) and optionally eigenvectors of a Hermitian matrix.
pub fn eigh(a: &HermitianMatrix, want_vectors: bool) -> Result<Decomposition> {
    let n = a.n;
    if n == 0 {
        return Ok(Decomposition { values: Vec::new(), vectors: want_vectors.then(Vec::new) });
    }
    let mut work = a.data.clone();
    let mut q = want_vectors.then(|| identity(n));
    let (mut d, offdiag) = tridiagonalize(&mut work, n, q.as_deref_mut());

    // D^H T D with real off-diagonal |e_k|
    let mut phase = vec![Complex64::new(1.0, 0.0); n];
    let mut e = vec![0.0; n];
    for k in 0..n - 1 {
        let mag = offdiag[k].norm();
        e[k] = mag;
        phase[k + 1] = if mag > 0.0 { phase[k] * (offdiag[k] / mag) } else { phase[k] };
    }

    let mut z = want_vectors.then(|| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });
    tql_implicit(&mut d, &mut e, z.as_deref_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let vectors = match (q, z) {
        (Some(q), Some(z)) => {
            // V = Q diag(phase) Z, columns permuted into descending order
            let mut v = vec![Complex64::new(0.0, 0.0); n * n];
            for r in 0..n {
                let qrow = &q[r * n..(r + 1) * n];
                let scaled: Vec<Complex64> = qrow.iter().zip(&phase).map(|(a, p)| a * p).collect();
                for (col, &src) in order.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (s, zk) in scaled.iter().zip(&z[src * n..(src + 1) * n]) {
                        acc += s * zk;
                    }
                    v[r * n + col] = acc;
                }
            }
            Some(v)
        }
        _ => None,
    };
    Ok(Decomposition { values, vectors })
}

/// Largest `||A v_k - lambda_k v_k||_2` over all eigenpairs.
pub fn max_residual(a: &HermitianMatrix, dec: &Decomposition) -> Option<f64> {
    let v = dec.vectors.as_ref()?;
    let n = a.n;
    // column sums of |A V - V diag(lambda)|^2, accumulated row by row
    let mut sq = vec![0.0; n];
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for (k, r) in row.iter_mut().enumerate() {
            *r = -v[i * n + k] * dec.values[k];
        }
        for j in 0..n {
            let aij = a.data[i * n + j];
            for (r, vj) in row.iter_mut().zip(&v[j * n..(j + 1) * n]) {
                *r += aij * vj;
            }
        }
        for (s, r) in sq.iter_mut().zip(&row) {
            *s += r.norm_sqr();
        }
    }
    Some(sq.into_iter().fold(0.0f64, |m, s| m.max(libm::sqrt(s))))
}

fn identity(n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::new(1.0, 0.0);
    }
    m
}

/// In-place Householder reduction. Returns the real diagonal and the complex
/// sub-diagonal `a[k+1][k]`. When `q` is given it is post-multiplied by
/// every reflector, so on return `A = Q T Q^H`.
fn tridiagonalize(a: &mut [Complex64], n: usize, mut q: Option<&mut [Complex64]>) -> (Vec<f64>, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let tail: f64 = (lo + 1..n).map(|r| a[r * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[lo * n + k];
        let sigma = libm::sqrt(tail + x0.norm_sqr());
        let unit = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -unit * sigma;

        // v = (x - alpha e1) / ||x - alpha e1||
        for r in lo..n {
            v[r] = a[r * n + k];
        }
        v[lo] -= alpha;
        let vnorm = libm::sqrt((lo..n).map(|r| v[r].norm_sqr()).sum::<f64>());
        for x in &mut v[lo..n] {
            *x /= vnorm;
        }

        // p = A22 v, w = p - (v^H p) v, A22 -= 2 (v w^H + w v^H)
        for r in lo..n {
            let row = &a[r * n..(r + 1) * n];
            let mut acc = zero;
            for c in lo..n {
                acc += row[c] * v[c];
            }
            p[r] = acc;
        }
        let kappa: f64 = (lo..n).map(|r| (v[r].conj() * p[r]).re).sum();
        for r in lo..n {
            p[r] -= v[r] * kappa;
        }
        for r in lo..n {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut a[r * n..(r + 1) * n];
            for c in lo..n {
                row[c] -= (vr * p[c].conj() + wr * v[c].conj()) * 2.0;
            }
        }
        a[lo * n + k] = alpha;
        a[k * n + lo] = alpha.conj();
        for r in lo + 1..n {
            a[r * n + k] = zero;
            a[k * n + r] = zero;
        }

        if let Some(q) = q.as_deref_mut() {
            for r in 0..n {
                let row = &mut q[r * n..(r + 1) * n];
                let mut t = zero;
                for c in lo..n {
                    t += row[c] * v[c];
                }
                for c in lo..n {
                    row[c] -= t * v[c].conj() * 2.0;
                }
            }
        }
    }
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    let e = (0..n.saturating_sub(1)).map(|i| a[(i + 1) * n + i]).collect();
    (d, e)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `e[i]` couples `i`
/// and `i+1`; `e[n-1]` is scratch. `z` accumulates the rotations stored
/// transposed: row `i` of `z` is column `i` of the eigenvector matrix.
fn tql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n > 0 {
        e[n - 1] = 0.0;
    }
    // absolute deflation floor; rank-deficient input leaves pairs of
    // near-zero diagonals that the relative test alone never splits
    let norm = d.iter().zip(e.iter()).fold(0.0f64, |acc, (a, b)| acc.max(libm::fabs(*a) + libm::fabs(*b)));
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = libm::fabs(d[m]) + libm::fabs(d[m + 1]);
                if libm::fabs(e[m]) + dd == dd || libm::fabs(e[m]) <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence { solver: "tridiagonal QL", index: l, iterations: iter - 1 });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
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
                    let (head, tail) = z.split_at_mut((i + 1) * n);
                    let zi = &mut head[i * n..];
                    let zn = &mut tail[..n];
                    for (a, b) in zi.iter_mut().zip(zn.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
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
