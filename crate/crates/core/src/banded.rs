//! Symmetric banded matrices, banded Cholesky, and a largest-eigenpair solver
//! for symmetric-definite banded pencils.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric matrix stored by its lower band; `bw` is the half-bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded {
    n: usize,
    bw: usize,
    /// Row-major, `data[i * (bw + 1) + (i - j)] = A[i][j]` for `i - bw <= j <= i`.
    data: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBanded {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bw).then(|| i * (self.bw + 1) + (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to the symmetric pair `(i, j)`/`(j, i)`; panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bw));
        self.data[s] += v;
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SymBanded, b: f64) -> SymBanded {
        assert_eq!(self.n, other.n);
        let bw = self.bw.max(other.bw);
        let mut out = SymBanded::zeros(self.n, bw);
        for i in 0..self.n {
            for j in i.saturating_sub(bw)..=i {
                let v = a * self.get(i, j) + b * other.get(i, j);
                if v != 0.0 {
                    out.add(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            y[i] += row[0] * x[i];
            for j in lo..i {
                let v = row[i - j];
                y[i] += v * x[j];
                y[j] += v * x[i];
            }
        }
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Symmetric permutation `P A P^T` returned densely; `perm[new] = old`.
    pub fn permuted_dense(&self, perm: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(perm[i], perm[j]))
    }

    pub fn cholesky(&self) -> Option<BandCholesky> {
        BandCholesky::factor(self)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lower-triangular banded factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    fn factor(a: &SymBanded) -> Option<Self> {
        let (n, bw) = (a.n, a.bw);
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut sum = a.data[i * w + (i - j)];
                let plo = lo.max(j.saturating_sub(bw));
                for p in plo..j {
                    sum -= l[i * w + (i - p)] * l[j * w + (j - p)];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return None;
                    }
                    l[i * w] = sum.sqrt();
                } else {
                    l[i * w + (i - j)] = sum / l[j * w];
                }
            }
        }
        Some(BandCholesky { n, bw, data: l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for p in i.saturating_sub(bw)..i {
                s -= self.data[i * w + (i - p)] * y[p];
            }
            y[i] = s / self.data[i * w];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for r in i + 1..(i + bw + 1).min(n) {
                s -= self.data[r * w + (r - i)] * y[r];
            }
            y[i] = s / self.data[i * w];
        }
        y
    }

    /// `ln det A`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.data[i * (self.bw + 1)].ln()).sum::<f64>()
    }
}

/// Largest eigenvalue of the symmetric-definite pencil `T x = alpha B x`.
#[derive(Debug, Clone)]
pub struct PencilEigen {
    pub alpha: f64,
    /// `B`-normalized eigenvector.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

const MAX_BISECTION: usize = 200;
const INVERSE_STEPS: usize = 4;

/// Computes the largest eigenpair of `(t, b)` on banded storage.
///
/// `alpha > alpha_max` exactly when `alpha B - T` admits a Cholesky factor,
/// so bisection on factorization success brackets the eigenvalue from above.
/// Inverse iteration at the successful shift supplies Rayleigh-quotient lower
/// bounds and the eigenvector. `upper_guess` need not be an upper bound; it is
/// enlarged until the factorization succeeds.
pub fn largest_eigenpair_banded(
    t: &SymBanded,
    b: &SymBanded,
    upper_guess: f64,
    start: Option<&[f64]>,
) -> Result<PencilEigen> {
    let n = t.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty pencil".into()));
    }
    b.cholesky()
        .ok_or(Error::FactorizationFailure("kinetic matrix"))?;

    let shifted = |alpha: f64| b.combine(alpha, t, -1.0).cholesky();
    let scale = t.max_abs() / b.max_abs().max(f64::MIN_POSITIVE);

    let mut hi = upper_guess;
    let mut fac = shifted(hi);
    let mut step = scale.max(hi.abs()).max(f64::MIN_POSITIVE);
    let mut grow = 0;
    while fac.is_none() {
        hi += step;
        step *= 2.0;
        grow += 1;
        if grow > 200 || !hi.is_finite() {
            return Err(Error::NoConvergence { iterations: grow });
        }
        fac = shifted(hi);
    }
    let mut fac = fac.expect("factor present");

    let mut x: Vec<f64> = match start {
        Some(s) if s.len() == n && s.iter().any(|v| *v != 0.0) => s.to_vec(),
        _ => (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect(),
    };
    let mut rayleigh = 0.0;
    let inverse = |fac: &BandCholesky, x: &mut Vec<f64>, rq: &mut f64| {
        let bx = b.matvec(x);
        let mut y = fac.solve(&bx);
        let nb = b.quad_form(&y).sqrt();
        y.iter_mut().for_each(|v| *v /= nb);
        *rq = t.quad_form(&y);
        *x = y;
    };
    for _ in 0..INVERSE_STEPS {
        inverse(&fac, &mut x, &mut rayleigh);
    }
    let mut lo = rayleigh.min(hi);

    let mut iterations = 0;
    while iterations < MAX_BISECTION {
        let width = hi - lo;
        let mag = hi.abs().max(lo.abs()).max(1e-300);
        if width <= 1e-13 * mag {
            break;
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shifted(mid) {
            Some(f) => {
                hi = mid;
                fac = f;
                inverse(&fac, &mut x, &mut rayleigh);
                lo = lo.max(rayleigh.min(hi));
            }
            None => lo = mid,
        }
    }
    for _ in 0..INVERSE_STEPS {
        inverse(&fac, &mut x, &mut rayleigh);
    }
    if !rayleigh.is_finite() {
        return Err(Error::NoConvergence { iterations });
    }
    Ok(PencilEigen {
        alpha: rayleigh,
        vector: x,
        iterations,
    })
}

/// Dense reference path: `B = L L^T`, symmetric eigensolve of `L^-1 T L^-T`.
pub fn largest_eigenpair_dense(t: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<PencilEigen> {
    let chol = nalgebra::Cholesky::new(b.clone())
        .ok_or(Error::FactorizationFailure("kinetic matrix"))?;
    let l = chol.l();
    let lt_inv_t = l
        .solve_lower_triangular(t)
        .ok_or(Error::FactorizationFailure("triangular solve"))?;
    let c = l
        .solve_lower_triangular(&lt_inv_t.transpose())
        .ok_or(Error::FactorizationFailure("triangular solve"))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(c);
    let (imax, alpha) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let y = eig.eigenvectors.column(imax).into_owned();
    let x = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(Error::FactorizationFailure("triangular solve"))?;
    let nb = (x.transpose() * b * &x)[(0, 0)].sqrt();
    Ok(PencilEigen {
        alpha,
        vector: x.iter().map(|v| v / nb).collect(),
        iterations: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, d: f64, o: f64) -> SymBanded {
        let mut m = SymBanded::zeros(n, 1);
        for i in 0..n {
            m.add(i, i, d);
            if i > 0 {
                m.add(i, i - 1, o);
            }
        }
        m
    }

    #[test]
    fn cholesky_solves() {
        let a = tridiag(50, 4.0, -1.0);
        let x: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x);
        let sol = a.cholesky().unwrap().solve(&b);
        for (u, v) in sol.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(tridiag(10, 1.0, -1.0).combine(1.0, &tridiag(10, -0.5, 0.0), 1.0).cholesky().is_none());
    }

    #[test]
    fn diagonal_pencil() {
        let mut t = SymBanded::zeros(2, 1);
        t.add(0, 0, 1.0);
        t.add(1, 1, -1.0);
        let b = tridiag(2, 1.0, 0.0);
        let e = largest_eigenpair_banded(&t, &b, 0.0, None).unwrap();
        assert!((e.alpha - 1.0).abs() < 1e-13);
        assert!(e.vector[0].abs() > 0.999_999 && e.vector[1].abs() < 1e-6);
    }

    #[test]
    fn banded_matches_dense_on_laplacian() {
        // -Laplacian eigenvalues 2 - 2cos(j pi/(n+1)); largest of (-A, I) is -min.
        let n = 40;
        let a = tridiag(n, 2.0, -1.0);
        let t = a.combine(-1.0, &a, 0.0);
        let b = tridiag(n, 1.0, 0.0);
        let e = largest_eigenpair_banded(&t, &b, 10.0, None).unwrap();
        let exact = -(2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos());
        assert!((e.alpha - exact).abs() < 1e-13);
        let d = largest_eigenpair_dense(&t.to_dense(), &b.to_dense()).unwrap();
        assert!((d.alpha - exact).abs() < 1e-12);
    }
}
