//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot entry `a_pq` with a
//! diagonal unitary and then applies the classic real Jacobi rotation, so
//! one step zeroes `a_pq` exactly.

use num_complex::Complex64;

use super::matrix::{c, ComplexMatrix, Ket, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// Convergence threshold on the off-diagonal Frobenius norm, relative to
/// `max(1, ||H||_F)`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// Eigenvector `k` with the largest-magnitude component real positive.
    pub fn vector(&self, k: usize) -> Ket {
        let n = self.vectors.dim();
        let amps: Vec<Complex64> = (0..n).map(|i| self.vectors[(i, k)]).collect();
        Ket::normalized(amps).expect("eigenvectors are unit vectors").with_canonical_phase()
    }

    /// `sum_k lambda_k |v_k><v_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda = ComplexMatrix::diagonal(&self.values);
        &(&self.vectors * &lambda) * &self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn eigensystem(h: &ComplexMatrix) -> Result<Eigensystem> {
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITIAN_TOL * (1.0 + h.max_abs()) {
        return Err(Error::NotHermitian(deviation));
    }
    let n = h.dim();
    // symmetrize so the iteration works on an exactly Hermitian matrix
    let mut a = ComplexMatrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let frob = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOL * frob.max(1.0);

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        // phase convention: largest-magnitude component real positive
        let amps: Vec<Complex64> = (0..n).map(|i| v[(i, k)]).collect();
        let ket = Ket::normalized(amps).expect("unitary columns").with_canonical_phase();
        for (i, z) in ket.amplitudes().iter().enumerate() {
            vectors[(i, col)] = *z;
        }
    }
    Ok(Eigensystem { values, vectors })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    // J = D R with D = diag(1, e^{-i phi}), R = [[c, s], [-s, c]] on (p, q):
    //   J_pp = c, J_pq = s, J_qp = -s e^{-i phi}, J_qq = c e^{-i phi}
    let em = phase.conj();
    let j_pp = c(cs);
    let j_pq = c(sn);
    let j_qp = -em * sn;
    let j_qq = em * cs;

    // A <- A J (columns p, q)
    for i in 0..n {
        let (aip, aiq) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = aip * j_pp + aiq * j_qp;
        a[(i, q)] = aip * j_pq + aiq * j_qq;
    }
    // A <- J^dagger A (rows p, q)
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = c(0.0);
    a[(q, p)] = c(0.0);
    a[(p, p)] = c(a[(p, p)].re);
    a[(q, q)] = c(a[(q, q)].re);
    // V <- V J
    for i in 0..n {
        let (vip, viq) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = vip * j_pp + viq * j_qp;
        v[(i, q)] = vip * j_pq + viq * j_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        &g + &g.adjoint()
    }

    fn check(h: &ComplexMatrix, es: &Eigensystem) {
        let v = &es.vectors;
        let hv = h * v;
        let vl = v * &ComplexMatrix::diagonal(&es.values);
        assert!((&hv - &vl).max_abs() < 1e-10);
        let gram = &v.adjoint() * v;
        assert!((&gram - &ComplexMatrix::identity(h.dim())).max_abs() < 1e-10);
        assert!((&es.reconstruct() - h).max_abs() < 1e-10);
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_spectrum() {
        let es = eigensystem(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(es.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn random_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            for _ in 0..50 {
                let h = random_hermitian(&mut rng, n);
                let es = eigensystem(&h).unwrap();
                check(&h, &es);
            }
        }
    }

    #[test]
    fn pauli_y() {
        let y = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => c(0.0),
        });
        let es = eigensystem(&y).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-14 && (es.values[1] - 1.0).abs() < 1e-14);
        check(&y, &es);
    }

    #[test]
    fn degenerate_spectrum() {
        let h = ComplexMatrix::diagonal(&[2.0, -1.0, 2.0, -1.0]);
        let es = eigensystem(&h).unwrap();
        assert_eq!(es.values, vec![-1.0, -1.0, 2.0, 2.0]);
        check(&h, &es);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(eigensystem(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigenvector_phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(&mut rng, 4);
        let es = eigensystem(&h).unwrap();
        for k in 0..4 {
            let v = es.vector(k);
            let big = v.amplitudes().iter().map(|a| a.norm()).fold(0.0, f64::max);
            let lead = v.amplitudes().iter().find(|a| a.norm() >= big - 1e-12).unwrap();
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }
}
