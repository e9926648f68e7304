//! Boundary regularity exponents: the exact power-law exponent at an
//! attracting fixed point from the restricted eigenvalue logs, the adapted
//! affine chart in which the tangent line is the horizontal axis, and a
//! log-log least-squares fit of the exponent from boundary samples.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};

use crate::error::{GeomError, Result};
use crate::foliation::{extract_leaf, leaf_sample_angles, xi1_two_arg, Leaf};
use crate::frenet::{boundary_point_of_word, FlagTable};
use crate::group::{evaluate4, SurfaceRep, Word};
use crate::projlin::{eigen_real, PlanarPoint};

/// Exponent at the attracting fixed point of a plane dynamic with ordered
/// eigenvalue logs l1 > l2 > l3: alpha = (l1 - l3) / (l1 - l2).
pub fn alpha_exact(l1: f64, l2: f64, l3: f64, tau_gap: f64) -> Result<f64> {
    if l1 - l2 < tau_gap || l2 - l3 < tau_gap {
        return Err(GeomError::DegenerateGap(format!(
            "log gaps {:.3e}, {:.3e}",
            l1 - l2,
            l2 - l3
        )));
    }
    Ok((l1 - l3) / (l1 - l2))
}

/// Adapted planar chart of a loxodromic 3x3 plane map: the attracting fixed
/// point sits at the origin, the repelling plane is the line at infinity,
/// the invariant tangent direction is the horizontal axis and the
/// [top]-[bottom] eigenline meets the chart in the vertical axis. In these
/// coordinates the map acts by diag(l2/l1, l3/l1).
pub struct AdaptedChart {
    basis_inv: Matrix3<f64>,
    flip_y: f64,
    pub log_eigs: [f64; 3],
}

impl AdaptedChart {
    pub fn project(&self, plane_point: &Vector3<f64>) -> PlanarPoint {
        let u = self.basis_inv * plane_point;
        PlanarPoint::new(u[1] / u[0], self.flip_y * u[2] / u[0])
    }
}

/// Build the adapted chart of `a` and place the samples into it, requiring
/// the samples to land in the closed upper half-plane.
pub fn adapted_chart(
    a: &Matrix3<f64>,
    samples: &[Vector3<f64>],
    tau_gap: f64,
    tau_eig: f64,
) -> Result<(AdaptedChart, Vec<PlanarPoint>)> {
    let split = eigen_real(
        &DMatrix::from_iterator(3, 3, a.iter().cloned()),
        tau_gap,
        tau_eig,
    )?;
    if split.eigenvalues.iter().any(|l| *l == 0.0) {
        return Err(GeomError::NotLoxodromic("zero eigenvalue".into()));
    }
    let mut v = Matrix3::zeros();
    for (j, col) in split.eigenvectors.iter().enumerate() {
        for i in 0..3 {
            v[(i, j)] = col[i];
        }
    }
    let basis_inv = v
        .try_inverse()
        .ok_or_else(|| GeomError::NotLoxodromic("eigenbasis is singular".into()))?;
    let mut chart = AdaptedChart {
        basis_inv,
        flip_y: 1.0,
        log_eigs: [
            split.eigenvalues[0].abs().ln(),
            split.eigenvalues[1].abs().ln(),
            split.eigenvalues[2].abs().ln(),
        ],
    };
    // orient the vertical axis so the domain lies in the upper half-plane
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut projected: Vec<PlanarPoint> = Vec::with_capacity(samples.len());
    for s in samples {
        let p = chart.project(s);
        if p[1] > 0.0 {
            pos += 1;
        } else if p[1] < 0.0 {
            neg += 1;
        }
        projected.push(p);
    }
    if neg > pos {
        chart.flip_y = -1.0;
        for p in projected.iter_mut() {
            p[1] = -p[1];
        }
        std::mem::swap(&mut pos, &mut neg);
    }
    if neg > 0 && pos > 0 {
        let crossers = neg.min(pos);
        if crossers as f64 > 0.05 * samples.len() as f64 {
            return Err(GeomError::OrientationFail(format!(
                "{crossers} of {} samples on the wrong side of the tangent axis",
                samples.len()
            )));
        }
    }
    Ok((chart, projected))
}

/// Result of a power-law fit at a boundary fixed point.
#[derive(Debug, Clone)]
pub struct ModelFit {
    pub alpha_hat: f64,
    pub alpha_exact: Option<f64>,
    pub r_squared: f64,
    pub samples_used: usize,
    pub window_radius: f64,
    /// |alpha_left - alpha_right| / alpha_hat
    pub branch_asymmetry: f64,
}

/// Least-squares slope of log d(p, tangent axis) against log d(p, origin),
/// over the decade window [r, 10 r] with r at the 5th percentile of the
/// available distances. Both half-branches are fitted and averaged.
pub fn alpha_fit(chart_samples: &[PlanarPoint], min_window: usize) -> Result<ModelFit> {
    let mut usable: Vec<(f64, f64, f64)> = chart_samples
        .iter()
        .filter(|p| p[1].abs() > 1e-300 && p.norm() > 1e-13)
        .map(|p| (p.norm(), p[1].abs(), p[0]))
        .collect();
    if usable.len() < min_window {
        return Err(GeomError::InsufficientSamples {
            have: usable.len(),
            need: min_window,
        });
    }
    usable.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let r5 = usable[(usable.len() as f64 * 0.05) as usize].0;
    let window: Vec<&(f64, f64, f64)> = usable
        .iter()
        .filter(|(r, _, _)| *r >= r5 && *r <= 10.0 * r5)
        .collect();
    if window.len() < min_window {
        return Err(GeomError::InsufficientSamples {
            have: window.len(),
            need: min_window,
        });
    }
    let fit = |pts: &[&(f64, f64, f64)]| -> Option<(f64, f64)> {
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (r, d, _) in pts {
            let x = r.ln();
            let y = d.ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
        }
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-300 {
            return None;
        }
        let slope = (n * sxy - sx * sy) / denom;
        let ss_tot = syy - sy * sy / n;
        let intercept = (sy - slope * sx) / n;
        let mut ss_res = 0.0;
        for (r, d, _) in pts {
            let e = d.ln() - (slope * r.ln() + intercept);
            ss_res += e * e;
        }
        let r2 = if ss_tot > 1e-300 {
            1.0 - ss_res / ss_tot
        } else {
            1.0
        };
        Some((slope, r2))
    };
    let left: Vec<&(f64, f64, f64)> = window.iter().filter(|(_, _, x)| *x < 0.0).cloned().collect();
    let right: Vec<&(f64, f64, f64)> =
        window.iter().filter(|(_, _, x)| *x > 0.0).cloned().collect();
    let combined = fit(&window).ok_or(GeomError::InsufficientSamples {
        have: window.len(),
        need: min_window,
    })?;
    let (alpha_hat, r2, asym) = match (fit(&left), fit(&right)) {
        (Some((al, _)), Some((ar, _))) => {
            let avg = 0.5 * (al + ar);
            (avg, combined.1, (al - ar).abs() / avg.abs().max(1e-300))
        }
        _ => (combined.0, combined.1, 0.0),
    };
    Ok(ModelFit {
        alpha_hat,
        alpha_exact: None,
        r_squared: r2,
        samples_used: window.len(),
        window_radius: r5,
        branch_asymmetry: asym,
    })
}

/// Boundary samples of the leaf of gamma+ accumulating at a chosen fixed
/// point of the restricted dynamic, generated by iterating the word image on
/// seed boundary points from both sides. Returns in-plane coordinates.
pub fn leaf_samples_near_fixed_point(
    table: &FlagTable,
    leaf: &Leaf,
    word_matrix: &Matrix4<f64>,
    seeds: &[f64],
    iterations: usize,
    tau_inc: f64,
) -> Result<Vec<Vector3<f64>>> {
    let mut out = Vec::with_capacity(seeds.len() * (iterations + 1));
    for &y in seeds {
        let p0 = xi1_two_arg(table, leaf.x.angle, y, tau_inc)?;
        let mut v = p0.as_vec4();
        for _ in 0..=iterations {
            out.push(leaf.plane_coords(
                &crate::projlin::HomPoint::from_vec4(v).expect("iterated point is nonzero"),
            ));
            v = word_matrix * v;
            v /= v.norm();
        }
    }
    Ok(out)
}

/// Exact and fitted exponents at the two controlled boundary points of a
/// loxodromic word: the attracting point of the inverse restricted to the
/// attracting leaf (eigenvalue logs l1, l2, l3 give (l1-l3)/(l2-l3)) and the
/// bottom point on the repelling leaf (logs l2, l3, l4 give (l2-l4)/(l3-l4)).
/// Exponent equality across the two leaves holds exactly on the zero locus
/// of the spectral constraint polynomial.
#[derive(Debug, Clone)]
pub struct ModellingCheck {
    pub word: Word,
    pub alpha_plus_exact: f64,
    pub alpha_minus_exact: f64,
    pub alpha_plus_fit: Option<ModelFit>,
    pub alpha_minus_fit: Option<ModelFit>,
}

impl ModellingCheck {
    pub fn exact_mismatch(&self) -> f64 {
        (self.alpha_plus_exact - self.alpha_minus_exact).abs()
    }
}

pub fn modelling_constraint_check(
    rep4: &SurfaceRep,
    table: &FlagTable,
    w: &Word,
    with_fit: bool,
    tau_gap: f64,
    tau_eig: f64,
    tau_inc: f64,
) -> Result<ModellingCheck> {
    if w.is_empty() {
        return Err(GeomError::Precondition(
            "modelling check needs a nonempty word".into(),
        ));
    }
    let m = evaluate4(rep4, w)?;
    let split = eigen_real(
        &DMatrix::from_iterator(4, 4, m.iter().cloned()),
        tau_gap,
        tau_eig,
    )?;
    let l: Vec<f64> = split.log_moduli();
    // model at xi2(w-) meet xi3(w+) on the attracting leaf: restriction of
    // the inverse to the top-3 eigenspace, logs (-l3, -l2, -l1)
    let alpha_plus = alpha_exact(-l[2], -l[1], -l[0], tau_gap)?;
    // model at xi1(w-) on the repelling leaf: restriction of the inverse to
    // the bottom-3 eigenspace, logs (-l4, -l3, -l2)
    let alpha_minus = alpha_exact(-l[3], -l[2], -l[1], tau_gap)?;

    let (fit_p, fit_m) = if with_fit {
        let rep2 = table.base2();
        let base_rep = SurfaceRep {
            kind: crate::group::RepKind::Rank2(*rep2),
            relator_residual: 0.0,
        };
        let plus = fit_at_leaf_point(rep4, &base_rep, table, w, true, tau_gap, tau_eig, tau_inc)
            .ok();
        let minus =
            fit_at_leaf_point(rep4, &base_rep, table, w, false, tau_gap, tau_eig, tau_inc).ok();
        (plus, minus)
    } else {
        (None, None)
    };
    Ok(ModellingCheck {
        word: w.clone(),
        alpha_plus_exact: alpha_plus,
        alpha_minus_exact: alpha_minus,
        alpha_plus_fit: fit_p,
        alpha_minus_fit: fit_m,
    })
}

/// Empirical exponent at the attracting fixed point of w on its own leaf
/// (`at_plus` = true fits at xi1 of the word's repelling partner inside the
/// attracting leaf; false fits at xi1(w-) inside the repelling leaf).
#[allow(clippy::too_many_arguments)]
fn fit_at_leaf_point(
    rep4: &SurfaceRep,
    rep2: &SurfaceRep,
    table: &FlagTable,
    w: &Word,
    at_plus: bool,
    tau_gap: f64,
    tau_eig: f64,
    tau_inc: f64,
) -> Result<ModelFit> {
    // the fixed point under examination is the attracting point of the
    // inverse dynamic restricted to the corresponding leaf
    let (leaf_word, iterate_word) = if at_plus {
        (w.clone(), w.inverse())
    } else {
        (w.inverse(), w.clone())
    };
    let leaf_angle = boundary_point_of_word(rep2, &leaf_word, tau_gap)?.angle;
    let accum_angle = boundary_point_of_word(rep2, &iterate_word, tau_gap)?.angle;
    let sample_angles = leaf_sample_angles(table, &[leaf_angle], 48);
    let leaf = extract_leaf(table, leaf_angle, &sample_angles, tau_inc)?;
    let m4 = evaluate4(rep4, &iterate_word)?;

    // seeds on both sides of the accumulation point
    let mut seeds = Vec::new();
    for k in 1..=14 {
        let off = 0.02 * 1.35_f64.powi(k);
        if off > 1.2 {
            break;
        }
        for s in [-1.0, 1.0] {
            let angle = (accum_angle + s * off).rem_euclid(2.0 * std::f64::consts::PI);
            let snapped = table.get(table.nearest(angle)).0.angle;
            if crate::frenet::circle_distance(snapped, leaf_angle) > 1e-6
                && crate::frenet::circle_distance(snapped, accum_angle) > 1e-4
            {
                seeds.push(snapped);
            }
        }
    }
    seeds.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let samples = leaf_samples_near_fixed_point(table, &leaf, &m4, &seeds, 3, tau_inc)?;

    // restrict the iterate to the leaf plane to build the adapted chart
    let p = &leaf.plane_basis;
    let mut a3 = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            a3[(i, j)] = p[i].dot(&(m4 * p[j]));
        }
    }
    let (chart, projected) = adapted_chart(&a3, &samples, tau_gap, tau_eig)?;
    let mut fit = alpha_fit(&projected, 10)?;
    fit.alpha_exact = Some(alpha_exact(
        chart.log_eigs[0],
        chart.log_eigs[1],
        chart.log_eigs[2],
        tau_gap,
    )?);
    Ok(fit)
}
