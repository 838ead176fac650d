//! Small dense complex matrices and kets.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation from Hermiticity for observables.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation from unit norm for kets.
pub const NORM_TOL: f64 = 1e-12;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self::from_fn(dim, |i, j| c(rows[i][j]))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = c(*v);
        }
        m
    }

    /// `|ket><ket|`.
    pub fn outer(ket: &Ket) -> Self {
        let a = ket.amplitudes();
        Self::from_fn(a.len(), |i, j| a[i] * a[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest off-diagonal entry modulus.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    worst = worst.max(self[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, ket: &Ket) -> Vec<Complex64> {
        let a = ket.amplitudes();
        assert_eq!(a.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * a[j]).sum())
            .collect()
    }

    /// `<ket|self|ket>`.
    pub fn expectation(&self, ket: &Ket) -> Complex64 {
        let hv = self.apply(ket);
        ket.amplitudes().iter().zip(&hv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Real part of `<ket|self|ket>`, for Hermitian operators.
    pub fn expectation_real(&self, ket: &Ket) -> f64 {
        self.expectation(ket).re
    }

    /// Compression onto the span of `basis`: entries `<b_i|self|b_j>`.
    pub fn restrict(&self, basis: &[Ket]) -> Self {
        let images: Vec<Vec<Complex64>> = basis.iter().map(|b| self.apply(b)).collect();
        Self::from_fn(basis.len(), |i, j| {
            basis[i]
                .amplitudes()
                .iter()
                .zip(&images[j])
                .map(|(a, b)| a.conj() * b)
                .sum()
        })
    }

    /// `<u|self|v>` for kets.
    pub fn element(&self, u: &Ket, v: &Ket) -> Complex64 {
        let hv = self.apply(v);
        u.amplitudes().iter().zip(&hv).map(|(a, b)| a.conj() * b).sum()
    }

    /// Real parts as nested rows.
    pub fn real_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)].re).collect()).collect()
    }

    pub fn imag_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)].im).collect()).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    /// Accepts already normalized amplitudes only.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_of(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes the given amplitudes; fails on the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_of(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| c(x)).collect())
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![c(0.0); dim];
        amplitudes[k] = c(1.0);
        Self { amplitudes }
    }

    /// Haar-random pure state: normalized i.i.d. standard complex Gaussians.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        loop {
            let amplitudes: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect();
            if let Ok(k) = Self::normalized(amplitudes) {
                return k;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amplitudes)
    }

    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &Ket) -> Ket {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ket { amplitudes }
    }

    /// Same ray with the largest-magnitude component real and positive
    /// (first such component on ties).
    pub fn with_canonical_phase(&self) -> Ket {
        let max = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let pivot = self
            .amplitudes
            .iter()
            .position(|a| a.norm() >= max - 1e-12)
            .unwrap_or(0);
        let z = self.amplitudes[pivot];
        let phase = if z.norm() > 0.0 { z.conj() / z.norm() } else { c(1.0) };
        Ket {
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// `|<self|other>|` close to one.
    pub fn same_ray(&self, other: &Ket, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }
}

fn norm_of(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// JSON form of a matrix: explicit real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim(),
            re: m.real_rows(),
            im: m.imag_rows(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        let ok = j.re.len() == j.dim
            && j.im.len() == j.dim
            && j.re.iter().chain(&j.im).all(|r| r.len() == j.dim);
        if !ok {
            return Err(Error::InvalidArgument("matrix JSON has inconsistent shape".into()));
        }
        Ok(ComplexMatrix::from_fn(j.dim, |r, s| Complex64::new(j.re[r][s], j.im[r][s])))
    }
}

/// JSON form of a ket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KetJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&Ket> for KetJson {
    fn from(k: &Ket) -> Self {
        Self {
            dim: k.dim(),
            re: k.amplitudes().iter().map(|a| a.re).collect(),
            im: k.amplitudes().iter().map(|a| a.im).collect(),
        }
    }
}

impl TryFrom<KetJson> for Ket {
    type Error = Error;
    fn try_from(j: KetJson) -> Result<Self> {
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(Error::InvalidArgument("ket JSON has inconsistent shape".into()));
        }
        Ket::new(j.re.iter().zip(&j.im).map(|(&r, &i)| Complex64::new(r, i)).collect())
    }
}
