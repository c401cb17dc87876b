//! Cyclic Jacobi eigen-decomposition for 4×4 symmetric matrices.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-9;
const CONVERGENCE_TOLERANCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order; column `i` of `vectors` belongs to `values[i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricEigen4 {
    pub values: Vector4<f64>,
    pub vectors: Matrix4<f64>,
}

fn off_diagonal_norm(a: &Matrix4<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    libm::sqrt(s)
}

/// Diagonalizes a symmetric 4×4 matrix by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-13 · ‖K‖_F`. Inputs whose asymmetry exceeds `1e-9 · ‖K‖_F` are
/// rejected.
pub fn eigh4(k: &Matrix4<f64>) -> Result<SymmetricEigen4> {
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries"));
    }
    let scale = k.norm();
    let asym = (k - k.transpose()).abs().max();
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = (k + k.transpose()) * 0.5;
    let mut v = Matrix4::<f64>::identity();
    let target = CONVERGENCE_TOLERANCE * scale;

    let mut converged = off_diagonal_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                // A <- Jᵀ A J with J the plane rotation in (p, q)
                for r in 0..4 {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..4 {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..4 {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence);
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let mut values = Vector4::zeros();
    let mut vectors = Matrix4::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a[(src, src)];
        vectors.set_column(dst, &v.column(src));
    }
    Ok(SymmetricEigen4 { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn check_decomposition(k: &Matrix4<f64>, e: &SymmetricEigen4) {
        let scale = k.norm().max(1e-300);
        for i in 0..4 {
            let v = e.vectors.column(i);
            let resid = (k * v - v * e.values[i]).norm();
            assert!(resid <= 1e-10 * scale, "residual {resid} for eigenpair {i}");
        }
        assert!((e.vectors.transpose() * e.vectors - Matrix4::identity()).abs().max() < 1e-12);
        for i in 1..4 {
            assert!(e.values[i - 1] <= e.values[i]);
        }
    }

    #[test]
    fn diagonal_input() {
        let k = Matrix4::from_diagonal(&Vector4::new(3.0, 1.0, 4.0, 2.0));
        let e = eigh4(&k).unwrap();
        assert_eq!(e.values, Vector4::new(1.0, 2.0, 3.0, 4.0));
        // eigenvector for 1.0 is the second axis, etc.
        assert_eq!(e.vectors.column(0).abs(), Vector4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(e.vectors.column(3).abs(), Vector4::new(0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn zero_matrix() {
        let e = eigh4(&Matrix4::zeros()).unwrap();
        assert_eq!(e.values, Vector4::zeros());
    }

    #[test]
    fn rejects_asymmetric() {
        let mut k = Matrix4::identity();
        k[(0, 1)] = 0.5;
        assert!(matches!(eigh4(&k), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn recovers_constructed_spectrum() {
        // V from a QR factorization of a fixed dense matrix
        let m = Matrix4::new(
            0.3, -1.2, 0.7, 2.0, 1.1, 0.4, -0.6, 0.2, -0.9, 0.8, 1.5, -0.3, 0.25, -0.35, 0.45, 1.3,
        );
        let v = m.qr().q();
        let d = Vector4::new(-2.5, 0.125, 0.5, 7.0);
        let k = v.transpose() * Matrix4::from_diagonal(&d) * v;
        let e = eigh4(&k).unwrap();
        assert_abs_diff_eq!(e.values, d, epsilon = 1e-11);
        check_decomposition(&k, &e);
    }

    proptest! {
        #[test]
        fn matches_reference_solver(entries in prop::array::uniform10(-10.0f64..10.0)) {
            let mut k = Matrix4::zeros();
            let mut it = entries.iter();
            for i in 0..4 {
                for j in i..4 {
                    let x = *it.next().unwrap();
                    k[(i, j)] = x;
                    k[(j, i)] = x;
                }
            }
            let e = eigh4(&k).unwrap();
            check_decomposition(&k, &e);
            let mut reference: [f64; 4] = nalgebra::SymmetricEigen::new(k).eigenvalues.into();
            reference.sort_by(f64::total_cmp);
            for (got, want) in e.values.iter().zip(reference) {
                prop_assert!((got - want).abs() < 1e-10 * k.norm());
            }
        }
    }
}
