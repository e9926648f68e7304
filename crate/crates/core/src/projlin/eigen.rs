//! Real eigen-decomposition for loxodromic matrices of size <= 4, via
//! characteristic-polynomial root isolation (critical-point bracketing plus
//! Newton polish) and pivoted-elimination nullspaces. No general eigensolver
//! is involved; inputs outside the real-split loxodromic regime are rejected.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::numeric::real_roots;

/// Result of a loxodromic eigen-decomposition: real eigenvalues sorted by
/// strictly decreasing absolute value, unit eigenvectors, and the per-pair
/// residuals `||A v - lambda v||`.
#[derive(Debug, Clone)]
pub struct EigenSplit {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl EigenSplit {
    pub fn log_moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.abs().ln()).collect()
    }
}

/// Coefficients of det(xI - A) as `c[0] + c[1] x + ... + c[n] x^n`, from
/// sums of principal minors. Each minor is evaluated by partially pivoted
/// elimination, whose Schur complements keep the small eigenvalues at full
/// relative accuracy even when the spectrum spans many orders of magnitude
/// (trace-power recurrences lose them to cancellation at scale eps l1^n).
pub fn characteristic_polynomial(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut sign = -1.0;
    for k in 1..=n {
        let mut sum = 0.0;
        for subset in k_subsets(n, k) {
            sum += principal_minor(a, &subset);
        }
        coeffs[n - k] = sign * sum;
        sign = -sign;
    }
    coeffs
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn principal_minor(a: &DMatrix<f64>, idx: &[usize]) -> f64 {
    let k = idx.len();
    let mut m = vec![[0.0f64; 4]; k];
    for (i, &ri) in idx.iter().enumerate() {
        for (j, &rj) in idx.iter().enumerate() {
            m[i][j] = a[(ri, rj)];
        }
    }
    let mut det = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in (col + 1)..k {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in (col + 1)..k {
            let f = m[r][col] / m[col][col];
            for c in col..k {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Eigen-decomposition of an invertible real matrix (n <= 4) whose spectrum
/// is real with pairwise distinct absolute values. `tau_gap` is the relative
/// modulus-gap tolerance, `tau_eig` bounds the relative eigenpair residual.
pub fn eigen_real(a: &DMatrix<f64>, tau_gap: f64, tau_eig: f64) -> Result<EigenSplit> {
    let n = a.nrows();
    if n != a.ncols() || n == 0 || n > 4 {
        return Err(GeomError::Precondition(format!(
            "eigen_real expects square n <= 4, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let coeffs = characteristic_polynomial(a);
    if coeffs[0].abs() < 1e-300 {
        return Err(GeomError::Precondition("matrix is singular".into()));
    }
    let mut roots = real_roots(&coeffs);
    if roots.len() != n {
        return Err(GeomError::NotLoxodromic(format!(
            "{} real eigenvalues found, need {}",
            roots.len(),
            n
        )));
    }
    roots.sort_by(|x, y| y.abs().partial_cmp(&x.abs()).unwrap());
    for w in roots.windows(2) {
        let gap = (w[0].abs() - w[1].abs()) / w[0].abs().max(1e-300);
        if gap < tau_gap {
            return Err(GeomError::NotLoxodromic(format!(
                "relative modulus gap {gap:.3e} below tolerance"
            )));
        }
    }
    let norm_a = a.norm();
    let mut eigenvectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &lambda in &roots {
        let v = eigenvector_for(a, lambda)?;
        let res = (a * DMatrix::from_column_slice(n, 1, &v) * 1.0
            - DMatrix::from_column_slice(n, 1, &v) * lambda)
            .norm();
        if res > tau_eig * norm_a.max(1.0) {
            return Err(GeomError::NotLoxodromic(format!(
                "eigenpair residual {res:.3e} above tolerance for lambda {lambda:.6e}"
            )));
        }
        eigenvectors.push(v);
        residuals.push(res);
    }
    Ok(EigenSplit {
        eigenvalues: roots,
        eigenvectors,
        residuals,
    })
}

/// Unit vector spanning the (numerical) nullspace of A - lambda I, from
/// full-pivot Gaussian elimination, then one inverse-iteration polish.
fn eigenvector_for(a: &DMatrix<f64>, lambda: f64) -> Result<Vec<f64>> {
    let n = a.nrows();
    let mut b = a.clone();
    for i in 0..n {
        b[(i, i)] -= lambda;
    }
    let v0 = nullspace_full_pivot(&b);
    // one step of inverse iteration sharpens the vector when the shifted
    // matrix is not exactly singular in floats
    let shifted = {
        let mut s = a.clone();
        let bump = 0.0;
        for i in 0..n {
            s[(i, i)] -= lambda + bump;
        }
        s
    };
    let rhs = DMatrix::from_column_slice(n, 1, &v0);
    let refined = shifted.clone().lu().solve(&rhs).map(|w| {
        let nw = w.norm();
        (0..n).map(|i| w[(i, 0)] / nw).collect::<Vec<f64>>()
    });
    let cand = refined.unwrap_or(v0.clone());
    let resid = |v: &[f64]| -> f64 {
        let x = DMatrix::from_column_slice(n, 1, v);
        (a * &x - &x * lambda).norm()
    };
    Ok(if resid(&cand) <= resid(&v0) { cand } else { v0 })
}

fn nullspace_full_pivot(b: &DMatrix<f64>) -> Vec<f64> {
    let n = b.nrows();
    let mut m = b.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for step in 0..n {
        // full pivot search in the trailing block
        let mut best = (step, step, 0.0);
        for i in step..n {
            for j in step..n {
                if m[(i, j)].abs() > best.2 {
                    best = (i, j, m[(i, j)].abs());
                }
            }
        }
        if best.2 < 1e-300 {
            break;
        }
        m.swap_rows(step, best.0);
        m.swap_columns(step, best.1);
        col_perm.swap(step, best.1);
        // the last elimination step would zero out the (near-singular)
        // trailing entry; stop before using a negligible pivot
        if step == n - 1 {
            break;
        }
        for i in (step + 1)..n {
            let f = m[(i, step)] / m[(step, step)];
            for j in step..n {
                m[(i, j)] -= f * m[(step, j)];
            }
        }
        rank += 1;
    }
    // back-substitute with the last variable free
    let mut x = vec![0.0; n];
    x[n - 1] = 1.0;
    for i in (0..rank).rev() {
        let mut s = 0.0;
        for j in (i + 1)..n {
            s += m[(i, j)] * x[j];
        }
        x[i] = -s / m[(i, i)];
    }
    let mut v = vec![0.0; n];
    for (pos, &orig) in col_perm.iter().enumerate() {
        v[orig] = x[pos];
    }
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}
