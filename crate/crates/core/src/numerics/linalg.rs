use num_complex::Complex64;

use super::{ComplexMatrix, LogValue};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
const PSD_NEGATIVE_TOL: f64 = 1e-10;

fn check_hermitian(m: &ComplexMatrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::domain(format!(
            "{what}: matrix is {}x{}, not square",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::domain(format!("{what}: matrix is not Hermitian")));
    }
    Ok(())
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// columns are the matching eigenvectors.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(m, "hermitian_eigen")?;
    let n = m.rows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > JACOBI_OFF_DIAGONAL_TOL * scale {
        return Err(Error::domain("Jacobi eigensolver did not converge"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// One unitary rotation `A <- U^H A U` annihilating `A[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    // phase-rotate q so the pivot is real, then a real Jacobi rotation
    let phase = (apq / r).conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase * -s;
    let u_qq = phase * c;

    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|(values, _)| values)
}

/// `ln det(m)` of a Hermitian positive definite matrix via Cholesky.
pub fn logdet_hermitian_pd(m: &ComplexMatrix) -> Result<f64> {
    check_hermitian(m, "logdet_hermitian_pd")?;
    cholesky_logdet_unchecked(m)
}

/// Cholesky log-determinant without the Hermitian check; only the lower
/// triangle of `m` is read.
pub(crate) fn cholesky_logdet_unchecked(m: &ComplexMatrix) -> Result<f64> {
    let n = m.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    let mut logdet = 0.0;
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::domain(format!(
                "Cholesky failed at pivot {j}: matrix not positive definite"
            )));
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        logdet += 2.0 * ljj.ln();
        for i in j + 1..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Ok(logdet)
}

/// Hermitian square root `S` of a positive semidefinite matrix, `S S^H = m`.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(m)?;
    let floor = -PSD_NEGATIVE_TOL * m.max_abs().max(1.0);
    if let Some(&bad) = values.iter().find(|&&x| x < floor) {
        return Err(Error::domain(format!(
            "matrix_sqrt_psd: negative eigenvalue {bad}"
        )));
    }
    let n = m.rows();
    let roots: Vec<f64> = values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| vectors[(i, k)] * roots[k] * vectors[(j, k)].conj())
            .sum()
    }))
}

/// Determinant of a real `n x n` row-major matrix as a [`LogValue`].
///
/// Rows are normalized by their largest entry before LU with partial
/// pivoting, so entries spanning many orders of magnitude are tolerated. An
/// exactly zero pivot yields an exact zero.
pub fn det_real(entries: &[f64], n: usize) -> Result<LogValue> {
    if entries.len() != n * n || n == 0 {
        return Err(Error::domain(format!(
            "det_real: expected {}x{} entries, got {}",
            n,
            n,
            entries.len()
        )));
    }
    if entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("det_real: non-finite entry"));
    }
    let mut a = entries.to_vec();
    let mut result = LogValue::ONE;
    for i in 0..n {
        let row = &mut a[i * n..(i + 1) * n];
        let scale = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return Ok(LogValue::ZERO);
        }
        row.iter_mut().for_each(|x| *x /= scale);
        result *= LogValue::from_f64(scale);
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        let pivot = a[pivot_row * n + col];
        if pivot == 0.0 {
            return Ok(LogValue::ZERO);
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            result = -result;
        }
        result *= LogValue::from_f64(pivot);
        for i in col + 1..n {
            let factor = a[i * n + col] / pivot;
            if factor != 0.0 {
                for k in col..n {
                    a[i * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    Ok(result)
}
