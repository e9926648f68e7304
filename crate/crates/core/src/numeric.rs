//! Small dense numeric kernels: real polynomial roots (degree <= 4) by
//! critical-point bracketing, symmetric Jacobi eigensolver, and one-sided
//! Jacobi singular values. Everything here works on tiny fixed-size problems.

/// Real roots of a polynomial with coefficients `c[0] + c[1] x + ... + c[n] x^n`,
/// found by recursively isolating roots between critical points and polishing
/// with bisection + Newton. Returns roots in ascending order.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let c = trim(coeffs);
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-c[0] / c[1]],
        _ => {
            let deriv: Vec<f64> = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| a * i as f64)
                .collect();
            let crit = real_roots(&deriv);
            isolate_and_polish(&c, &crit)
        }
    }
}

fn trim(coeffs: &[f64]) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().map_or(false, |a| *a == 0.0) {
        c.pop();
    }
    c
}

fn eval(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &a in c.iter().rev() {
        acc = acc * x + a;
    }
    acc
}

fn eval_deriv(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &a) in c.iter().enumerate().skip(1).rev() {
        acc = acc * x + a * i as f64;
    }
    acc
}

/// Cauchy-style bound on the modulus of any root.
fn root_bound(c: &[f64]) -> f64 {
    let an = c[c.len() - 1].abs();
    let m = c[..c.len() - 1]
        .iter()
        .fold(0.0_f64, |m, &a| m.max(a.abs()));
    1.0 + m / an
}

fn isolate_and_polish(c: &[f64], crit: &[f64]) -> Vec<f64> {
    let bound = root_bound(c);
    let mut nodes = vec![-bound];
    for &x in crit {
        if x > -bound && x < bound {
            nodes.push(x);
        }
    }
    nodes.push(bound);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut roots = Vec::new();
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa == 0.0 {
            push_root(&mut roots, a);
        } else if fb == 0.0 {
            push_root(&mut roots, b);
        } else if fa * fb < 0.0 {
            push_root(&mut roots, refine(c, a, b));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

fn push_root(roots: &mut Vec<f64>, x: f64) {
    let tol = 1e-13 * (1.0 + x.abs());
    if !roots.iter().any(|r| (r - x).abs() < tol) {
        roots.push(x);
    }
}

/// Bisection all the way down to relative machine width, then a short
/// guarded Newton polish that only keeps improvements of |p|.
fn refine(c: &[f64], mut a: f64, mut b: f64) -> f64 {
    let mut fa = eval(c, a);
    for _ in 0..220 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break; // interval no longer representable
        }
        let fm = eval(c, m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let mut x = 0.5 * (a + b);
    let mut fx = eval(c, x).abs();
    for _ in 0..4 {
        let d = eval_deriv(c, x);
        if d == 0.0 {
            break;
        }
        let xn = x - eval(c, x) / d;
        if !xn.is_finite() {
            break;
        }
        let fxn = eval(c, xn).abs();
        if fxn < fx {
            x = xn;
            fx = fxn;
        } else {
            break;
        }
    }
    x
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues descending, eigenvectors as columns).
pub fn jacobi_symmetric(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-15 * frob(&m).max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let vecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (eigs, vecs)
}

fn frob(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Singular values of an N x m matrix (rows = samples) by one-sided Jacobi
/// orthogonalization of the columns. Accurate for small singular values,
/// unlike forming the Gram matrix. Returns values in descending order.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = rows[0].len();
    let n = rows.len();
    // columns
    let mut u: Vec<Vec<f64>> = (0..m).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for k in 0..n {
                    app += u[p][k] * u[p][k];
                    aqq += u[q][k] * u[q][k];
                    apq += u[p][k] * u[q][k];
                }
                if apq.abs() <= 1e-17 * (app * aqq).sqrt().max(1e-300) {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (up, uq) = (u[p][k], u[q][k]);
                    u[p][k] = c * up - s * uq;
                    u[q][k] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = u
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// FNV-1a 64-bit hash, used to stamp output files with their config.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
