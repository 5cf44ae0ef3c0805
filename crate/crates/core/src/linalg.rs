//! Small dense and banded linear algebra used by the solvers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Dimension above which [`spectral_radius`] switches to the power method.
pub const DENSE_EIGEN_MAX_DIM: usize = 200;

/// Banded matrix with `kl` sub- and `ku` super-diagonals, factored in place
/// by Gaussian elimination without pivoting.
///
/// The operators assembled here are diagonally dominant, which keeps
/// elimination without pivoting stable and the band structure intact.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    // row-major band storage: entry (i, j) lives at i * width + (j + kl - i)
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * self.width() + (j + self.kl - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`; panics if the entry is outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band"));
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let j0 = i.saturating_sub(self.kl);
            let j1 = (i + self.ku).min(self.n - 1);
            let row = &self.data[i * self.width()..(i + 1) * self.width()];
            let mut acc = 0.0;
            for j in j0..=j1 {
                acc += row[j + self.kl - i] * x[j];
            }
            *yi = acc;
        }
    }

    /// Factors `A = LU` with unit-diagonal `L`.
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let (kl, ku, w) = (self.kl, self.ku, self.width());
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let pivot = self.data[k * w + kl];
            if !(pivot.abs() > 1e-14 * scale) {
                return Err(Error::Singular(format!(
                    "zero pivot {pivot:e} at row {k} of {n}"
                )));
            }
            let i_end = (k + kl).min(n - 1);
            let j_end = (k + ku).min(n - 1);
            for i in k + 1..=i_end {
                let lik_slot = i * w + (k + kl - i);
                let lik = self.data[lik_slot] / pivot;
                if lik == 0.0 {
                    continue;
                }
                self.data[lik_slot] = lik;
                for j in k + 1..=j_end {
                    let ukj = self.data[k * w + (j + kl - k)];
                    self.data[i * w + (j + kl - i)] -= lik * ukj;
                }
            }
        }
        Ok(BandedLu { lu: self })
    }
}

/// LU factors of a [`BandedMatrix`], reusable for any number of solves.
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let m = &self.lu;
        let (n, kl, ku, w) = (m.n, m.kl, m.ku, m.width());
        assert_eq!(b.len(), n);
        for i in 0..n {
            let j0 = i.saturating_sub(kl);
            let row = &m.data[i * w..(i + 1) * w];
            let mut acc = b[i];
            for j in j0..i {
                acc -= row[j + kl - i] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let j1 = (i + ku).min(n - 1);
            let row = &m.data[i * w..(i + 1) * w];
            let mut acc = b[i];
            for j in i + 1..=j1 {
                acc -= row[j + kl - i] * b[j];
            }
            b[i] = acc / row[kl];
        }
    }
}

/// Spectral radius from the full set of eigenvalues (real Schur form).
pub fn spectral_radius_dense(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidParameter("matrix must be square".into()));
    }
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let schur = m
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let radius = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    Ok(radius)
}

/// Spectral radius by the power method applied to the matrix itself:
/// `ρ = lim ‖A^k‖^{1/k}`, with `k` doubled by repeated squaring until the
/// estimate stagnates to relative `rel_tol`.
///
/// Matrix powers, unlike vector iterates, converge to the radius even when
/// several eigenvalues share the largest modulus (e.g. `±ρ` pairs, which
/// the parallel Schwarz iteration produces).
pub fn spectral_radius_power(m: &DMatrix<f64>, rel_tol: f64) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidParameter("matrix must be square".into()));
    }
    let norm = |a: &DMatrix<f64>| a.iter().fold(0.0f64, |s, v| s + v * v).sqrt();
    let mut power = m.clone();
    // log of the scale factored out of `power`, which equals A^k / e^{log_scale}
    let mut log_scale = 0.0f64;
    let mut k = 1.0f64;
    let mut prev = f64::NAN;
    for _ in 0..60 {
        let nrm = norm(&power);
        if nrm == 0.0 {
            return Ok(0.0);
        }
        if !nrm.is_finite() {
            return Err(Error::Numerical("power iteration overflowed".into()));
        }
        log_scale += nrm.ln();
        power /= nrm;
        let estimate = (log_scale / k).exp();
        if (estimate - prev).abs() <= rel_tol * estimate {
            return Ok(estimate);
        }
        prev = estimate;
        power = &power * &power;
        log_scale *= 2.0;
        k *= 2.0;
    }
    Ok(prev)
}

/// Spectral radius: dense eigenvalues for small matrices, the power method
/// above [`DENSE_EIGEN_MAX_DIM`].
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() <= DENSE_EIGEN_MAX_DIM {
        spectral_radius_dense(m)
    } else {
        spectral_radius_power(m, 1e-12)
    }
}
