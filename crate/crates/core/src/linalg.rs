//! Thin wrappers around nalgebra for the few dense factorisations we need.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix given in row-major order. The input is
/// symmetrised first so that roundoff-level anti-Hermitian parts cannot
/// derail the tridiagonalisation.
pub fn hermitian_eigenvalues(side: usize, elems: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(elems.len(), side * side);
    let mut m = DMatrix::from_fn(side, side, |r, c| elems[r * side + c]);
    let adj = m.adjoint();
    m += adj;
    m.scale_mut(0.5);
    m.symmetric_eigen().eigenvalues.as_slice().to_vec()
}

/// Least-squares solution of an overdetermined complex system via the
/// normal equations; fine for the tiny, well-conditioned systems used in
/// loop-weight recovery.
pub fn lstsq(rows: &[Vec<Complex64>], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let m = rows.len();
    if m == 0 || m != rhs.len() {
        return None;
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) || m < n {
        return None;
    }
    let a = DMatrix::from_fn(m, n, |r, c| rows[r][c]);
    let b = DVector::from_fn(m, |r, _| rhs[r]);
    let ata = a.adjoint() * &a;
    let atb = a.adjoint() * b;
    ata.lu().solve(&atb).map(|x| x.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_known_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let elems = vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)];
        let mut eigs = hermitian_eigenvalues(2, &elems);
        eigs.sort_by(f64::total_cmp);
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        // Vandermonde rows in z, solution (1, 2, 1).
        let zs = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.3, 0.4)];
        let truth = [c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)];
        let rows: Vec<Vec<Complex64>> = zs.iter().map(|z| vec![c(1.0, 0.0), *z, z * z]).collect();
        let rhs: Vec<Complex64> = rows
            .iter()
            .map(|r| r.iter().zip(&truth).map(|(a, b)| a * b).sum())
            .collect();
        let sol = lstsq(&rows, &rhs).unwrap();
        for (s, t) in sol.iter().zip(&truth) {
            assert!((s - t).norm() < 1e-10);
        }
    }
}
