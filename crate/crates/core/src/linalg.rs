//! Dense complex matrices and the small amount of linear algebra the rest of
//! the crate needs: Kronecker products, Hermiticity checks and a cyclic
//! Jacobi eigensolver for small Hermitian matrices.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

/// Construction-invariant tolerance.
pub const TOL_CONSTRUCT: f64 = 1e-12;
/// Tolerance for derived equalities.
pub const TOL_DERIVED: f64 = 1e-10;
/// Tolerance for optimization-adjacent checks.
pub const TOL_OPT: f64 = 1e-9;

pub fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    C64::new(1.0, 0.0)
}

pub fn identity(dim: usize) -> CMat {
    Array2::eye(dim)
}

pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Max absolute entry of a matrix.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Max absolute entrywise difference.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs_diff(m, &dagger(m))
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.nrows() == m.ncols() && hermiticity_defect(m) <= tol
}

/// Kronecker product; the left factor occupies the more significant index.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    ndarray::linalg::kron(a, b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn matvec(m: &CMat, v: &CVec) -> CVec {
    m.dot(v)
}

pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMat) -> C64 {
    m.diag().sum()
}

/// Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in ascending order with eigenvectors as
/// matching columns. Intended for small dimensions (state validation is
/// capped at 64).
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut a = m.clone();
    let mut v = identity(n);

    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * (1.0 + max_abs(m)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                // Unitary 2x2 rotation zeroing the (p,q) element of the
                // Hermitian matrix: diagonalize [[app, apq], [apq*, aqq]].
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let abs_apq = apq.norm();
                let phase = apq / abs_apq;
                let tau = (aqq - app) / (2.0 * abs_apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns: col_p' = c*col_p - s*conj(phase)... applied as
                // a[(i,p)], a[(i,q)] updates with the complex phase folded in.
                let sp = phase * s;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * sp.conj();
                    a[(i, q)] = aip * sp + aiq * c;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * sp;
                    a[(q, j)] = apj * sp.conj() + aqj * c;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * sp.conj();
                    v[(i, q)] = vip * sp + viq * c;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|&(e, _)| e).collect();
    let mut vectors = CMat::zeros((n, n));
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    (eigenvalues, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{sigma_x, sigma_y, sigma_z};

    #[test]
    fn kron_identity() {
        let i2 = identity(2);
        let i4 = kron(&i2, &i2);
        assert_eq!(max_abs_diff(&i4, &identity(4)), 0.0);
    }

    #[test]
    fn kron_diagonal() {
        let zz = kron(&sigma_z(), &sigma_z());
        let expected = CMat::from_diag(&CVec::from(vec![
            cone(),
            -cone(),
            -cone(),
            cone(),
        ]));
        assert_eq!(max_abs_diff(&zz, &expected), 0.0);
    }

    #[test]
    fn kron_squares_to_identity() {
        // direct multiplication oracle for sigma_x (x) sigma_z
        let xz = kron(&sigma_x(), &sigma_z());
        let sq = xz.dot(&xz);
        assert!(max_abs_diff(&sq, &identity(4)) <= TOL_CONSTRUCT);
    }

    #[test]
    fn jacobi_diagonalizes_pauli_combination() {
        let m = sigma_x().mapv(|z| z * 0.3)
            + sigma_y().mapv(|z| z * -0.8)
            + sigma_z().mapv(|z| z * 0.6);
        let (evals, evecs) = hermitian_eigen(&m);
        let r = (0.3_f64 * 0.3 + 0.8 * 0.8 + 0.6 * 0.6).sqrt();
        assert!((evals[0] + r).abs() < 1e-12);
        assert!((evals[1] - r).abs() < 1e-12);
        // eigenvector residual
        for k in 0..2 {
            let v = evecs.column(k).to_owned();
            let mv = m.dot(&v);
            let res: f64 = mv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b * evals[k]).norm())
                .fold(0.0, f64::max);
            assert!(res < 1e-12, "residual {res}");
        }
    }

    #[test]
    fn jacobi_random_hermitian_8x8() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 8;
        let mut m = CMat::zeros((n, n));
        for i in 0..n {
            m[(i, i)] = C64::new(rng.gen::<f64>(), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        let (evals, evecs) = hermitian_eigen(&m);
        // reconstruction oracle: V diag(e) V^dag = M
        let mut rec = CMat::zeros((n, n));
        for k in 0..n {
            let v = evecs.column(k);
            for i in 0..n {
                for j in 0..n {
                    rec[(i, j)] += v[i] * v[j].conj() * evals[k];
                }
            }
        }
        assert!(max_abs_diff(&rec, &m) < 1e-10);
        // trace preserved
        let tr: f64 = evals.iter().sum();
        assert!((tr - trace(&m).re).abs() < 1e-10);
    }
}
