//! Small dense eigenvalue helper for Hermitian matrices.
//!
//! A complex Hermitian matrix H = A + iB is embedded into the real symmetric
//! matrix [[A, -B], [B, A]], whose spectrum is that of H with every
//! eigenvalue doubled. The real problem is then solved with cyclic Jacobi
//! rotations, which is plenty for the small reductions this crate needs.

use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix (row-major, dim x dim), sorted
/// descending.
pub(crate) fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(entries.len(), dim * dim);
    let n = 2 * dim;
    let mut m = vec![0.0f64; n * n];
    for i in 0..dim {
        for j in 0..dim {
            let e = entries[i * dim + j];
            m[i * n + j] = e.re;
            m[(dim + i) * n + (dim + j)] = e.re;
            m[i * n + (dim + j)] = -e.im;
            m[(dim + i) * n + j] = e.im;
        }
    }
    let mut eig = jacobi_symmetric_eigenvalues(n, &mut m);
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // Every eigenvalue of H appears twice in the embedding.
    eig.into_iter().step_by(2).collect()
}

fn jacobi_symmetric_eigenvalues(n: usize, m: &mut [f64]) -> Vec<f64> {
    let scale: f64 = m
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p * n + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= tol {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}
