//! Small dense complex matrices: Kronecker products, Paulis and a cyclic
//! Jacobi eigensolver for Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn from_real(n: usize, entries: &[f64]) -> CMat {
    CMat::from_row_iterator(n, n, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn pauli_x() -> CMat {
    from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMat {
    from_real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// `cos θ·σ_z + sin θ·σ_x`.
pub fn xz_observable(theta: f64) -> CMat {
    pauli_z() * c(theta.cos(), 0.0) + pauli_x() * c(theta.sin(), 0.0)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all<'a>(ms: impl IntoIterator<Item = &'a CMat>) -> CMat {
    ms.into_iter().fold(identity(1), |acc, m| kron(&acc, m))
}

/// Projectors `(I ± O)/2` onto the `+1` (answer 0) and `−1` (answer 1)
/// eigenspaces of a dichotomic observable.
pub fn binary_projectors(observable: &CMat) -> Vec<CMat> {
    let id = identity(observable.nrows());
    let half = c(0.5, 0.0);
    vec![(&id + observable) * half, (&id - observable) * half]
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

pub fn trace_re(m: &CMat) -> f64 {
    m.trace().re
}

/// `Tr(a·b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut s = c(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, ascending. The matrix `R + iM` is
/// embedded as the real symmetric `[[R, −M], [M, R]]`, whose spectrum is
/// that of the original with every eigenvalue doubled, and diagonalised by
/// cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(invalid!("eigenvalues need a square matrix"));
    }
    let scale = m.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    if !is_hermitian(m, 1e-10 * scale) {
        return Err(invalid!("matrix is not Hermitian"));
    }
    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            let (re, im) = ((z.re + m[(j, i)].re) / 2.0, (z.im - m[(j, i)].im) / 2.0);
            a[i * size + j] = re;
            a[(i + n) * size + (j + n)] = re;
            a[i * size + (j + n)] = -im;
            a[(i + n) * size + j] = im;
        }
    }
    let mut eig = jacobi_symmetric(&mut a, size);
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig.into_iter().step_by(2).collect())
}

fn jacobi_symmetric(a: &mut [f64], n: usize) -> Vec<f64> {
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

pub fn min_eigenvalue(m: &CMat) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn pauli_spectra() {
        close(&hermitian_eigenvalues(&pauli_z()).unwrap(), &[-1.0, 1.0]);
        close(&hermitian_eigenvalues(&pauli_y()).unwrap(), &[-1.0, 1.0]);
        let xx = kron(&pauli_x(), &pauli_x());
        close(&hermitian_eigenvalues(&xx).unwrap(), &[-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(hermitian_eigenvalues(&m).is_err());
    }

    #[test]
    fn agrees_with_library_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 3, 6, 9] {
            let g = CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let h = &g + g.adjoint();
            let mine = hermitian_eigenvalues(&h).unwrap();
            let mut lib: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            lib.sort_by(|a, b| a.total_cmp(b));
            close(&mine, &lib);
        }
    }

    #[test]
    fn projectors_of_observables() {
        let p = binary_projectors(&xz_observable(0.3));
        assert!(max_abs_diff(&(&p[0] * &p[0]), &p[0]) < 1e-12);
        assert!(max_abs_diff(&(&p[0] + &p[1]), &identity(2)) < 1e-12);
        assert!((trace_product(&p[0], &p[1])).norm() < 1e-12);
    }
}
