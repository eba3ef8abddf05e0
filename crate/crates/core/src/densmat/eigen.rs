//! Eigenvalues of Hermitian matrices.
//!
//! A complex Hermitian matrix `H = A + iB` is embedded as the real symmetric
//! matrix `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled. The real problem is solved by Householder
//! tridiagonalization followed by implicit-shift QL iteration.

use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix given in row-major order, ascending.
///
/// The Hermiticity of the input is the caller's responsibility; only the
/// Hermitian part `(M + M^dag)/2` influences the result.
pub fn hermitian_eigenvalues(mat: &[Complex64], dim: usize) -> Vec<f64> {
    assert_eq!(mat.len(), dim * dim);
    if dim == 0 {
        return Vec::new();
    }
    let n = 2 * dim;
    let mut a = vec![0.0f64; n * n];
    for i in 0..dim {
        for j in 0..dim {
            // Hermitian part of the input.
            let h = 0.5 * (mat[i * dim + j] + mat[j * dim + i].conj());
            a[i * n + j] = h.re;
            a[i * n + (dim + j)] = -h.im;
            a[(dim + i) * n + j] = h.im;
            a[(dim + i) * n + (dim + j)] = h.re;
        }
    }
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    ql_implicit(&mut d, &mut e);
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Every eigenvalue of the embedding appears twice; keep one of each pair.
    (0..dim).map(|k| 0.5 * (d[2 * k] + d[2 * k + 1])).collect()
}

/// Householder reduction of a real symmetric matrix to tridiagonal form.
/// Returns the diagonal and the subdiagonal (first entry unused).
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i;
        let mut h = 0.0;
        if l > 1 {
            let mut scale = 0.0;
            for k in 0..l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l - 1];
            } else {
                for k in 0..l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l - 1];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l - 1] = f - g;
                let mut f_acc = 0.0;
                for j in 0..l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l - 1];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n == 0 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 64, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Deflate: an off-diagonal element underflowed mid-sweep.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let m = vec![
            c(3.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-1.0, 0.0),
        ];
        let ev = hermitian_eigenvalues(&m, 2);
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let m = vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let ev = hermitian_eigenvalues(&m, 2);
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_trace_matches_eigenvalue_sum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let dim = 24;
        let mut m = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                if i == j {
                    m[i * dim + j] = c(v.re, 0.0);
                } else {
                    m[i * dim + j] = v;
                    m[j * dim + i] = v.conj();
                }
            }
        }
        let trace: f64 = (0..dim).map(|i| m[i * dim + i].re).sum();
        let ev = hermitian_eigenvalues(&m, dim);
        let sum: f64 = ev.iter().sum();
        assert!((trace - sum).abs() < 1e-9, "trace {trace} vs sum {sum}");
    }
}
