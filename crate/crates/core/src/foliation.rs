//! Leaves of the codimension-1 foliation: the two-argument boundary map, the
//! developing-map formula, leaf extraction and frame normalization into a
//! reference projective plane, Hausdorff comparison of normalized leaves,
//! convexity diagnostics, and the contracting-iteration example showing a
//! non-closed point of the space of convex domains.

use nalgebra::{Matrix3, Vector2, Vector3, Vector4};

use crate::error::{GeomError, Result};
use crate::frenet::{circle_distance, BoundaryPoint, FlagTable};
use crate::projlin::{frame_map, FrameRP2, HomPoint, PlanarPoint};

/// Boundary samples of one leaf: for each boundary label y the point
/// xi3(x) meet xi2(y), and xi1(x) itself at y = x, all lying on the leaf's
/// carrier plane.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub x: BoundaryPoint,
    pub plane: crate::projlin::Covector,
    pub plane_basis: [Vector4<f64>; 3],
    /// ordered by the boundary angle of y
    pub boundary: Vec<(BoundaryPoint, HomPoint)>,
}

impl Leaf {
    /// In-plane coordinates of a boundary point (components in `plane_basis`).
    pub fn plane_coords(&self, p: &HomPoint) -> Vector3<f64> {
        let v = p.as_vec4();
        Vector3::new(
            self.plane_basis[0].dot(&v),
            self.plane_basis[1].dot(&v),
            self.plane_basis[2].dot(&v),
        )
    }

    pub fn max_plane_residual(&self) -> f64 {
        self.boundary
            .iter()
            .map(|(_, p)| self.plane.pair(p).abs())
            .fold(0.0, f64::max)
    }
}

/// The two-argument boundary map: xi3(t) meet xi2(t') away from the
/// diagonal, xi1(t) on it.
pub fn xi1_two_arg(table: &FlagTable, t: f64, t_prime: f64, tau_inc: f64) -> Result<HomPoint> {
    let (bt, ft) = table.lookup(t)?;
    if circle_distance(bt.angle, t_prime) < table.dedup_tol {
        return Ok(ft.p1.clone());
    }
    let (_, fy) = table.lookup(t_prime)?;
    crate::projlin::meet_plane_line(&ft.p3, &fy.p2, tau_inc)
}

/// Boundary identification between two leaves: the point of dev(x) labelled
/// y is sent to the point of dev(x') labelled y.
pub fn xi_identification(
    table: &FlagTable,
    _x: f64,
    x_prime: f64,
    y: f64,
    tau_inc: f64,
) -> Result<HomPoint> {
    xi1_two_arg(table, x_prime, y, tau_inc)
}

/// The developing-map formula on a distinct triple: the meet of the line
/// through xi1(t+), xi1_{t+}(t-) with the line through xi1_{t-}(t+),
/// xi1_{t+}(t0). Both lines lie in the plane xi3(t+).
pub fn dev_point(table: &FlagTable, triple: (f64, f64, f64), tau_inc: f64) -> Result<HomPoint> {
    let (tp, t0, tm) = triple;
    let sep = circle_distance(tp, t0)
        .min(circle_distance(t0, tm))
        .min(circle_distance(tp, tm));
    if sep < table.dedup_tol {
        return Err(GeomError::DegenerateTriple(format!(
            "triple separation {sep:.3e}"
        )));
    }
    let (_, flag_p) = table.lookup(tp)?;
    let plane = &flag_p.p3;
    let basis = plane.plane_basis();
    let coords = |p: &HomPoint| -> Vector3<f64> {
        let v = p.as_vec4();
        Vector3::new(basis[0].dot(&v), basis[1].dot(&v), basis[2].dot(&v))
    };
    let a = coords(&flag_p.p1);
    let b = coords(&xi1_two_arg(table, tp, tm, tau_inc)?);
    let c = coords(&xi1_two_arg(table, tm, tp, tau_inc)?);
    let d = coords(&xi1_two_arg(table, tp, t0, tau_inc)?);
    let l1 = a.cross(&b);
    let l2 = c.cross(&d);
    let p = l1.cross(&l2);
    if p.norm() < tau_inc * l1.norm().max(1e-300) * l2.norm().max(1e-300) {
        return Err(GeomError::DegenerateIncidence(
            "developing-map lines are numerically parallel".into(),
        ));
    }
    let v4 = basis[0] * p[0] + basis[1] * p[1] + basis[2] * p[2];
    HomPoint::from_vec4(v4)
}

/// Sample angles for leaf boundaries: a uniform grid snapped to the nearest
/// tabulated angles, topped up with unused tabulated angles, plus the given
/// leaf angles. Leaves compared against each other must be sampled over one
/// shared angle set, which is why the compared leaf angles come in here.
pub fn leaf_sample_angles(table: &FlagTable, leaf_angles: &[f64], n: usize) -> Vec<f64> {
    let tab = table.angles();
    let mut used = vec![false; tab.len()];
    let mut picked: Vec<f64> = Vec::new();
    for i in 0..n {
        let g = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let j = table.nearest(g);
        if !used[j] {
            used[j] = true;
            picked.push(tab[j]);
        }
    }
    let mut j = 0;
    while picked.len() < n.min(tab.len()) {
        if !used[j] {
            used[j] = true;
            picked.push(tab[j]);
        }
        j += 1;
    }
    for &a in leaf_angles {
        if let Ok((b, _)) = table.lookup(a) {
            let k = table.nearest(b.angle);
            if !used[k] {
                used[k] = true;
                picked.push(tab[k]);
            }
        }
    }
    picked.sort_by(|x, y| x.partial_cmp(y).unwrap());
    picked
}

/// Extract a leaf over an explicit set of tabulated sample angles. The point
/// at y = x (the flag point xi1(x)) is always present exactly once.
pub fn extract_leaf(
    table: &FlagTable,
    x: f64,
    sample_angles: &[f64],
    tau_inc: f64,
) -> Result<Leaf> {
    let (bx, fx) = {
        let (b, f) = table.lookup(x)?;
        (b.clone(), f.clone())
    };
    let x = bx.angle;
    let mut boundary: Vec<(BoundaryPoint, HomPoint)> = Vec::with_capacity(sample_angles.len() + 1);
    let mut has_diagonal = false;
    for &y in sample_angles {
        let by = table.lookup(y)?.0.clone();
        if circle_distance(by.angle, x) < table.dedup_tol {
            if has_diagonal {
                continue;
            }
            has_diagonal = true;
            boundary.push((by, fx.p1.clone()));
        } else {
            let p = xi1_two_arg(table, x, by.angle, tau_inc)?;
            boundary.push((by, p));
        }
    }
    if !has_diagonal {
        boundary.push((bx.clone(), fx.p1.clone()));
    }
    boundary.sort_by(|p, q| p.0.angle.partial_cmp(&q.0.angle).unwrap());
    Ok(Leaf {
        x: bx,
        plane: fx.p3.clone(),
        plane_basis: fx.p3.plane_basis(),
        boundary,
    })
}

/// Affine charts of the reference projective plane, tried in order when a
/// normalized polygon crosses a chart's line at infinity.
pub fn charts() -> [(Vector3<f64>, Vector3<f64>, Vector3<f64>); 4] {
    let s2 = std::f64::consts::SQRT_2;
    let s6 = 6.0_f64.sqrt();
    [
        (
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
        ),
        (
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        ),
        (
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(1.0, 0.0, 0.0),
        ),
        (
            Vector3::new(1.0, 1.0, 1.0) / 3.0_f64.sqrt(),
            Vector3::new(1.0, -1.0, 0.0) / s2,
            Vector3::new(1.0, 1.0, -2.0) / s6,
        ),
    ]
}

/// A leaf carried into the reference projective plane: the four frame points
/// go to the reference frame and the boundary becomes a planar polygon in
/// the first affine chart that contains it.
#[derive(Debug, Clone)]
pub struct NormalizedLeaf {
    pub leaf_angle: f64,
    pub base_angles: [f64; 4],
    pub chart_polygon: Vec<PlanarPoint>,
    /// boundary labels matching chart_polygon
    pub polygon_angles: Vec<f64>,
    pub norm_map: Matrix3<f64>,
    pub chart_index: usize,
    pub frame_chart_points: [PlanarPoint; 4],
}

impl NormalizedLeaf {
    /// Chart coordinates of an in-plane point under this normalization.
    pub fn chart_point(&self, plane_coords: &Vector3<f64>) -> PlanarPoint {
        let v = self.norm_map * plane_coords;
        let (c, a1, a2) = charts()[self.chart_index];
        let d = c.dot(&v);
        Vector2::new(a1.dot(&v) / d, a2.dot(&v) / d)
    }
}

pub fn normalize_leaf(
    table: &FlagTable,
    leaf: &Leaf,
    base_angles: &[f64; 4],
    reference: &FrameRP2,
    tau_inc: f64,
    tau_gp: f64,
) -> Result<NormalizedLeaf> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if circle_distance(base_angles[i], base_angles[j]) < table.dedup_tol {
                return Err(GeomError::DegenerateFrame(
                    "frame base points must be pairwise distinct".into(),
                ));
            }
        }
    }
    // base angles are sorted so the frame respects the boundary's cyclic
    // order; matching the reference frame's cyclic order keeps the image in
    // the bounded component of the conic pencil through the frame
    let mut sorted_base = *base_angles;
    sorted_base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut frame_pts = [Vector3::zeros(); 4];
    for (i, &xb) in sorted_base.iter().enumerate() {
        let p = xi1_two_arg(table, leaf.x.angle, xb, tau_inc)?;
        frame_pts[i] = leaf.plane_coords(&p);
    }
    let frame = FrameRP2::new(frame_pts, tau_gp)?;
    let m = frame_map(&frame, reference)?;
    let mapped: Vec<Vector3<f64>> = leaf
        .boundary
        .iter()
        .map(|(_, p)| m * leaf.plane_coords(p))
        .collect();
    let frame_mapped: Vec<Vector3<f64>> = frame_pts.iter().map(|p| m * p).collect();
    let mut chosen = None;
    'chart: for (ci, (c, a1, a2)) in charts().iter().enumerate() {
        let mut sign = 0.0;
        for v in &mapped {
            let d = c.dot(v);
            if d.abs() < 1e-9 * v.norm() {
                continue 'chart;
            }
            if sign == 0.0 {
                sign = d.signum();
            } else if d.signum() != sign {
                continue 'chart;
            }
        }
        chosen = Some((ci, *c, *a1, *a2));
        break;
    }
    let (chart_index, c, a1, a2) = chosen.ok_or(GeomError::UnboundedInChart)?;
    let project = |v: &Vector3<f64>| -> PlanarPoint {
        let d = c.dot(v);
        Vector2::new(a1.dot(v) / d, a2.dot(v) / d)
    };
    let chart_polygon: Vec<PlanarPoint> = mapped.iter().map(project).collect();
    let polygon_angles: Vec<f64> = leaf.boundary.iter().map(|(b, _)| b.angle).collect();
    let frame_chart_points = [
        project(&frame_mapped[0]),
        project(&frame_mapped[1]),
        project(&frame_mapped[2]),
        project(&frame_mapped[3]),
    ];
    Ok(NormalizedLeaf {
        leaf_angle: leaf.x.angle,
        base_angles: sorted_base,
        chart_polygon,
        polygon_angles,
        norm_map: m,
        chart_index,
        frame_chart_points,
    })
}

fn point_segment_distance(p: &PlanarPoint, a: &PlanarPoint, b: &PlanarPoint) -> f64 {
    let ab = b - a;
    let den = ab.norm_squared();
    if den < 1e-300 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / den).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn min_distance_to_polygon(p: &PlanarPoint, poly: &[PlanarPoint]) -> f64 {
    let n = poly.len();
    if n == 1 {
        return (p - poly[0]).norm();
    }
    let mut best = f64::INFINITY;
    for i in 0..n {
        let d = point_segment_distance(p, &poly[i], &poly[(i + 1) % n]);
        if d < best {
            best = d;
        }
    }
    best
}

/// Directed Hausdorff distance: sup over vertices of `p` of the
/// point-to-edge distance to the closed polygonal curve `q`.
pub fn directed_hausdorff(p: &[PlanarPoint], q: &[PlanarPoint]) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(GeomError::EmptyInput("hausdorff distance".into()));
    }
    Ok(p.iter()
        .map(|v| min_distance_to_polygon(v, q))
        .fold(0.0, f64::max))
}

/// Hausdorff distance between closed polygonal curves: the max of the two
/// directed distances, each taken vertex-to-edge.
pub fn hausdorff_distance(p: &[PlanarPoint], q: &[PlanarPoint]) -> Result<f64> {
    Ok(directed_hausdorff(p, q)?.max(directed_hausdorff(q, p)?))
}

/// Comparison of two normalized leaves.
#[derive(Debug, Clone)]
pub struct LeafComparison {
    pub t: f64,
    pub t_prime: f64,
    pub hausdorff: f64,
    /// nearest-distance profile from the first polygon's vertices
    pub residual_profile: Vec<f64>,
}

pub fn compare_leaves(a: &NormalizedLeaf, b: &NormalizedLeaf) -> Result<LeafComparison> {
    let profile: Vec<f64> = a
        .chart_polygon
        .iter()
        .map(|v| min_distance_to_polygon(v, &b.chart_polygon))
        .collect();
    Ok(LeafComparison {
        t: a.leaf_angle,
        t_prime: b.leaf_angle,
        hausdorff: hausdorff_distance(&a.chart_polygon, &b.chart_polygon)?,
        residual_profile: profile,
    })
}

/// Hausdorff distances between consecutive leaves over an angle grid, all
/// sampled over one shared angle set.
pub fn leaf_continuity_scan(
    table: &FlagTable,
    grid: &[f64],
    base_angles: &[f64; 4],
    reference: &FrameRP2,
    samples: usize,
    tau_inc: f64,
    tau_gp: f64,
) -> Result<Vec<LeafComparison>> {
    if grid.len() < 2 {
        return Ok(Vec::new());
    }
    let sample_angles = leaf_sample_angles(table, grid, samples);
    let mut normalized = Vec::with_capacity(grid.len());
    for &t in grid {
        let leaf = extract_leaf(table, t, &sample_angles, tau_inc)?;
        normalized.push(normalize_leaf(
            table, &leaf, base_angles, reference, tau_inc, tau_gp,
        )?);
    }
    let mut out = Vec::with_capacity(grid.len() - 1);
    for w in normalized.windows(2) {
        out.push(compare_leaves(&w[0], &w[1])?);
    }
    Ok(out)
}

/// Convexity diagnostics of a closed chart polygon.
#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub convex: bool,
    pub reflex_count: usize,
    /// min over vertices of |sin(turn angle)| (strict-convexity proxy)
    pub min_turn_margin: f64,
    pub max_exterior_angle: f64,
    /// max difference of consecutive exterior angles (C^1 proxy)
    pub max_angle_jump: f64,
}

pub fn convexity_report(polygon: &[PlanarPoint]) -> Result<ConvexityReport> {
    let n = polygon.len();
    if n < 5 {
        return Err(GeomError::Precondition(
            "convexity report needs at least 5 vertices".into(),
        ));
    }
    let mut crosses = Vec::with_capacity(n);
    let mut angles = Vec::with_capacity(n);
    let mut margins = Vec::with_capacity(n);
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let c = polygon[(i + 2) % n];
        let e1 = b - a;
        let e2 = c - b;
        let cross = e1[0] * e2[1] - e1[1] * e2[0];
        let dot = e1.dot(&e2);
        crosses.push(cross);
        angles.push(cross.atan2(dot));
        margins.push(cross.abs() / (e1.norm() * e2.norm()).max(1e-300));
    }
    let pos = crosses.iter().filter(|c| **c > 0.0).count();
    let neg = crosses.iter().filter(|c| **c < 0.0).count();
    let reflex = pos.min(neg);
    let mut max_jump: f64 = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        max_jump = max_jump.max((angles[i] - angles[j]).abs());
    }
    Ok(ConvexityReport {
        convex: reflex == 0,
        reflex_count: reflex,
        min_turn_margin: margins.iter().cloned().fold(f64::INFINITY, f64::min),
        max_exterior_angle: angles.iter().map(|a| a.abs()).fold(0.0, f64::max),
        max_angle_jump: max_jump,
    })
}

/// Sub-domain of the standard invariant conic y^2 = x z used by the
/// contracting-iteration example: the arc |s| <= s_cut around the repelling
/// fixed point in the rational parameterization s -> [s^2 : s : 1], closed
/// by the chord between the arc endpoints. In the affine chart
/// (u, v) -> [u : v : 1 - u] the full conic is the circle of radius 1/2
/// centered at (1/2, 0).
#[derive(Debug, Clone)]
pub struct ConicArcDomain {
    pub s_cut: f64,
}

impl ConicArcDomain {
    /// The half-domain cut by the vertical diameter: the cut chord joins the
    /// conic points s = -1 and s = 1.
    pub fn half() -> Self {
        Self { s_cut: 1.0 }
    }
}

fn conic_chart_point(theta: f64) -> PlanarPoint {
    // circle-angle parameterization; s = tan(theta/2)
    Vector2::new(0.5 - 0.5 * theta.cos(), 0.5 * theta.sin())
}

/// Distances d_H(A^k domain, conic) for k = 0..=n. The matrix must be
/// diagonal with positive entries preserving the standard conic
/// (l2^2 = l1 l3); the conic parameter then transforms linearly (s to m s
/// with m = l1/l2) and each iterate is again an arc of the same conic closed
/// by a chord, which is sampled exactly. A polygon representation of the
/// domain cannot work here: the iterates of any inscribed polygon converge
/// to a segment, not to the full conic region.
pub fn benzecri_iterate(
    domain: &ConicArcDomain,
    a: &Matrix3<f64>,
    n: usize,
    target_samples: usize,
) -> Result<Vec<f64>> {
    for i in 0..3 {
        for j in 0..3 {
            if i != j && a[(i, j)].abs() > 1e-12 * a.norm() {
                return Err(GeomError::Precondition(
                    "iteration matrix must be diagonal in the conic's basis".into(),
                ));
            }
        }
    }
    let (l1, l2, l3) = (a[(0, 0)], a[(1, 1)], a[(2, 2)]);
    if l1 <= 0.0 || l2 <= 0.0 || l3 <= 0.0 {
        return Err(GeomError::Precondition(
            "iteration matrix must have positive eigenvalues".into(),
        ));
    }
    if (l2 * l2 - l1 * l3).abs() > 1e-9 * (l1 * l3).max(1.0) {
        return Err(GeomError::Precondition(
            "iteration matrix must preserve the conic (l2^2 = l1 l3)".into(),
        ));
    }
    let multiplier = l1 / l2;
    let m = target_samples.max(16);
    let grid: Vec<f64> = (0..m)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / m as f64)
        .collect();
    let mut out = Vec::with_capacity(n + 1);
    let mut s_cut = domain.s_cut;
    for _k in 0..=n {
        let theta_cut = 2.0 * s_cut.atan();
        let mut arc: Vec<f64> = vec![-theta_cut];
        arc.extend(grid.iter().cloned().filter(|t| t.abs() < theta_cut));
        arc.push(theta_cut);
        arc.sort_by(|x, y| x.partial_cmp(y).unwrap());
        arc.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        let poly: Vec<PlanarPoint> = arc.iter().map(|&t| conic_chart_point(t)).collect();
        let mut tgt_angles: Vec<f64> = grid.clone();
        tgt_angles.push(-theta_cut);
        tgt_angles.push(theta_cut);
        tgt_angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
        tgt_angles.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        let target: Vec<PlanarPoint> = tgt_angles.iter().map(|&t| conic_chart_point(t)).collect();
        for p in poly.iter().chain(target.iter()) {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(GeomError::UnboundedInChart);
            }
        }
        out.push(hausdorff_distance(&poly, &target)?);
        s_cut *= multiplier;
        if !s_cut.is_finite() {
            return Err(GeomError::UnboundedInChart);
        }
    }
    Ok(out)
}

/// Algebraic conic fit through planar points, from the smallest singular
/// pair of the design matrix with rows (x^2, xy, y^2, x, y, 1).
#[derive(Debug, Clone)]
pub struct ConicFit {
    pub coeffs: [f64; 6],
    /// smallest singular value of the design matrix, scaled by 1/sqrt(n)
    pub residual: f64,
    /// sigma_min / sigma_max
    pub relative_residual: f64,
}

pub fn fit_conic(points: &[PlanarPoint]) -> Result<ConicFit> {
    if points.len() < 6 {
        return Err(GeomError::InsufficientSamples {
            have: points.len(),
            need: 6,
        });
    }
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let (x, y) = (p[0], p[1]);
            vec![x * x, x * y, y * y, x, y, 1.0]
        })
        .collect();
    let sv = crate::numeric::singular_values(&rows);
    let mut gram = vec![vec![0.0; 6]; 6];
    for r in &rows {
        for i in 0..6 {
            for j in 0..6 {
                gram[i][j] += r[i] * r[j];
            }
        }
    }
    let (_, vecs) = crate::numeric::jacobi_symmetric(&gram);
    let v = &vecs[5];
    Ok(ConicFit {
        coeffs: [v[0], v[1], v[2], v[3], v[4], v[5]],
        residual: sv[5] / (points.len() as f64).sqrt(),
        relative_residual: sv[5] / sv[0].max(1e-300),
    })
}

pub fn conic_value(coeffs: &[f64; 6], p: &PlanarPoint) -> f64 {
    let (x, y) = (p[0], p[1]);
    coeffs[0] * x * x + coeffs[1] * x * y + coeffs[2] * y * y + coeffs[3] * x + coeffs[4] * y
        + coeffs[5]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frenet::{boundary_point_of_word, build_flag_table};
    use crate::group::{evaluate2, evaluate4, fuchsian_octagon_rep, lift_principal, Word};
    use crate::projlin::LineRP3;

    fn setup() -> (crate::group::SurfaceRep, crate::group::SurfaceRep, FlagTable) {
        let rep2 = fuchsian_octagon_rep();
        let rep4 = lift_principal(&rep2).unwrap();
        let table = build_flag_table(&rep4, &rep2, 3, 1e-6, 1e-8).unwrap();
        (rep2, rep4, table)
    }

    fn generator_angles(rep2: &crate::group::SurfaceRep) -> Vec<f64> {
        ["a", "A", "b", "B", "c", "C", "d", "D"]
            .iter()
            .map(|s| {
                boundary_point_of_word(rep2, &Word::parse(s).unwrap(), 1e-6)
                    .unwrap()
                    .angle
            })
            .collect()
    }

    fn base_angles(rep2: &crate::group::SurfaceRep) -> [f64; 4] {
        let mut base = [0.0; 4];
        for (i, s) in ["ab", "bc", "cd", "AB"].iter().enumerate() {
            base[i] = boundary_point_of_word(rep2, &Word::parse(s).unwrap(), 1e-6)
                .unwrap()
                .angle;
        }
        base
    }

    #[test]
    fn two_arg_map_diagonal_and_meet() {
        let (_, _, table) = setup();
        let t = table.get(0).0.angle;
        let p = xi1_two_arg(&table, t, t, 1e-9).unwrap();
        assert!(p.projective_distance(&table.get(0).1.p1) < 1e-14);

        let y = table.get(5).0.angle;
        let q = xi1_two_arg(&table, t, y, 1e-9).unwrap();
        assert!(table.get(0).1.p3.pair(&q).abs() < 1e-9);
        assert!(table.get(5).1.p2.containment_residual(&q) < 1e-9);
    }

    #[test]
    fn two_arg_coordinate_case_on_the_model_curve() {
        // the osculating plane at angle 0 ([1:0], covector e4) meets the
        // osculating line at angle pi ([0:1], span{e3, e4}) in [e3]
        let f0 = crate::frenet::veronese_flag(&crate::frenet::BoundaryPoint::from_angle(0.0));
        let fpi = crate::frenet::veronese_flag(&crate::frenet::BoundaryPoint::from_angle(
            std::f64::consts::PI,
        ));
        let p = crate::projlin::meet_plane_line(&f0.p3, &fpi.p2, 1e-9).unwrap();
        let e3 = HomPoint::new(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(p.projective_distance(&e3) < 1e-12);
    }

    #[test]
    fn two_arg_dual_osculation_convergence() {
        // xi1_t(t') approaches xi1(t) as t' approaches t along a dynamical
        // sequence of tabulated conjugate fixed points
        let rep2 = fuchsian_octagon_rep();
        let rep4 = lift_principal(&rep2).unwrap();
        // n stops at 4: the approach is quadratic in the pairing of the
        // osculating line with the plane, so n = 5 already needs incidences
        // at the 1e-12 scale that f64 meets cannot extract
        let g = Word::parse("a").unwrap();
        let v = Word::parse("b").unwrap();
        let mut words: Vec<Word> = crate::group::enumerate_words(1);
        for n in 1..=4 {
            words.push(v.conjugate_by(&g.pow(n)));
        }
        let table =
            crate::frenet::build_flag_table_for_words(&rep4, &rep2, &words, 1e-6, 1e-8).unwrap();
        let t = boundary_point_of_word(&rep2, &g, 1e-6).unwrap().angle;
        let target = table.lookup(t).unwrap().1.p1.clone();
        let mut last = f64::INFINITY;
        for n in 1..=4 {
            let tp = boundary_point_of_word(&rep2, &v.conjugate_by(&g.pow(n)), 1e-6)
                .unwrap()
                .angle;
            let p = xi1_two_arg(&table, t, tp, 1e-11).unwrap();
            let d = p.projective_distance(&target);
            assert!(d < last, "dual osculation not monotone at n={n}: {d}");
            last = d;
        }
    }

    #[test]
    fn dev_point_cases() {
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        assert!(matches!(
            dev_point(&table, (angles[0], angles[1], angles[1]), 1e-9),
            Err(GeomError::DegenerateTriple(_))
        ));
        let p = dev_point(&table, (angles[0], angles[2], angles[4]), 1e-9).unwrap();
        let plane = &table.lookup(angles[0]).unwrap().1.p3;
        assert!(plane.pair(&p).abs() < 1e-8);

        // interior: the developed point lies inside the leaf polygon
        let samples = leaf_sample_angles(&table, &angles, 64);
        let leaf = extract_leaf(&table, angles[0], &samples, 1e-9).unwrap();
        let nl = normalize_leaf(
            &table,
            &leaf,
            &base_angles(&rep2),
            &FrameRP2::unit_circle(),
            1e-9,
            1e-8,
        )
        .unwrap();
        let q = nl.chart_point(&leaf.plane_coords(&p));
        let poly = &nl.chart_polygon;
        let mut pos = 0;
        let mut neg = 0;
        for i in 0..poly.len() {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            let cr = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
            if cr > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        assert!(pos == 0 || neg == 0, "developed point must be inside the leaf");
    }

    #[test]
    fn leaf_extraction_plane_incidence_and_conic() {
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let samples = leaf_sample_angles(&table, &angles[..1], 64);
        let leaf = extract_leaf(&table, angles[0], &samples, 1e-9).unwrap();
        assert_eq!(leaf.boundary.len(), samples.len());
        assert!(leaf.max_plane_residual() < 1e-8);

        let nl = normalize_leaf(
            &table,
            &leaf,
            &base_angles(&rep2),
            &FrameRP2::unit_circle(),
            1e-9,
            1e-8,
        )
        .unwrap();
        let fit = fit_conic(&nl.chart_polygon).unwrap();
        assert!(
            fit.relative_residual < 1e-8,
            "conic residual {}",
            fit.relative_residual
        );

        // strict convexity: no collinear triple among the samples
        let report = convexity_report(&nl.chart_polygon).unwrap();
        assert!(report.convex);
        assert!(report.min_turn_margin > 1e-10, "{}", report.min_turn_margin);
    }

    #[test]
    fn normalize_leaf_against_own_frame_is_identity() {
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let samples = leaf_sample_angles(&table, &angles[..1], 48);
        let leaf = extract_leaf(&table, angles[0], &samples, 1e-9).unwrap();
        let base = base_angles(&rep2);
        let mut sorted = base;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut pts = [Vector3::zeros(); 4];
        for (i, &xb) in sorted.iter().enumerate() {
            let p = xi1_two_arg(&table, leaf.x.angle, xb, 1e-9).unwrap();
            pts[i] = leaf.plane_coords(&p);
        }
        let own = FrameRP2::new(pts, 1e-8).unwrap();
        let nl = normalize_leaf(&table, &leaf, &base, &own, 1e-9, 1e-8).unwrap();
        assert!(
            (nl.norm_map - Matrix3::identity()).norm() < 1e-10,
            "self-normalization map {:?}",
            nl.norm_map
        );
    }

    #[test]
    fn leaf_equivariance() {
        // extract_leaf(g x) = rho(g) . extract_leaf(x) pointwise
        let rep2 = fuchsian_octagon_rep();
        let rep4 = lift_principal(&rep2).unwrap();
        let table = build_flag_table(&rep4, &rep2, 4, 1e-6, 1e-8).unwrap();
        let g = Word::parse("b").unwrap();
        let m2 = evaluate2(rep2.gens2().unwrap(), &g);
        let m4 = evaluate4(&rep4, &g).unwrap();

        let x = boundary_point_of_word(&rep2, &Word::parse("a").unwrap(), 1e-6)
            .unwrap()
            .angle;
        let gx = crate::frenet::act_on_angle(&m2, x);
        let sample: Vec<f64> = generator_angles(&rep2);
        let image_sample: Vec<f64> = sample
            .iter()
            .map(|&y| crate::frenet::act_on_angle(&m2, y))
            .collect();
        let leaf = extract_leaf(&table, x, &sample, 1e-9).unwrap();
        let leaf_img = extract_leaf(&table, gx, &image_sample, 1e-9).unwrap();
        for (y, p) in &leaf.boundary {
            let target_angle = crate::frenet::act_on_angle(&m2, y.angle);
            let q = leaf_img
                .boundary
                .iter()
                .min_by(|u, v| {
                    circle_distance(u.0.angle, target_angle)
                        .partial_cmp(&circle_distance(v.0.angle, target_angle))
                        .unwrap()
                })
                .unwrap();
            assert!(circle_distance(q.0.angle, target_angle) < 1e-7);
            let img = HomPoint::from_vec4(m4 * p.as_vec4()).unwrap();
            assert!(
                img.projective_distance(&q.1) < 1e-7,
                "leaf equivariance residual {}",
                img.projective_distance(&q.1)
            );
        }
    }

    #[test]
    fn xi_identification_composes_and_stays_on_conic() {
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let (x, x1, x2) = (angles[0], angles[2], angles[4]);
        let samples = leaf_sample_angles(&table, &angles, 48);
        let y0 = samples[7];
        let a = xi1_two_arg(&table, x, y0, 1e-9).unwrap();
        let b = xi_identification(&table, x, x, y0, 1e-9).unwrap();
        assert!(a.projective_distance(&b) < 1e-14);
        // composition Xi_{x1 -> x2} . Xi_{x -> x1} = Xi_{x -> x2} on labels
        for &y in samples.iter().take(16) {
            let composed = xi_identification(&table, x1, x2, y, 1e-9).unwrap();
            let direct = xi_identification(&table, x, x2, y, 1e-9).unwrap();
            assert!(composed.projective_distance(&direct) < 1e-8);
        }
        // image lands on the target leaf's conic
        let leaf2 = extract_leaf(&table, x2, &samples, 1e-9).unwrap();
        let nl2 = normalize_leaf(
            &table,
            &leaf2,
            &base_angles(&rep2),
            &FrameRP2::unit_circle(),
            1e-9,
            1e-8,
        )
        .unwrap();
        let fit = fit_conic(&nl2.chart_polygon).unwrap();
        let y = samples[3];
        let img = xi_identification(&table, x, x2, y, 1e-9).unwrap();
        let q = nl2.chart_point(&leaf2.plane_coords(&img));
        let scale: f64 = fit.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!(conic_value(&fit.coeffs, &q).abs() / scale < 1e-8);
    }

    #[test]
    fn xi_identification_continuity_scan() {
        // adjacent samples map to adjacent targets: jumps bounded by 10x
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let (x, x1) = (angles[0], angles[3]);
        let samples = leaf_sample_angles(&table, &angles, 96);
        let leaf = extract_leaf(&table, x, &samples, 1e-9).unwrap();
        let nl = normalize_leaf(
            &table,
            &leaf,
            &base_angles(&rep2),
            &FrameRP2::unit_circle(),
            1e-9,
            1e-8,
        )
        .unwrap();
        let leaf1 = extract_leaf(&table, x1, &samples, 1e-9).unwrap();
        let nl1 = normalize_leaf(
            &table,
            &leaf1,
            &base_angles(&rep2),
            &FrameRP2::unit_circle(),
            1e-9,
            1e-8,
        )
        .unwrap();
        let mut max_ratio: f64 = 0.0;
        for i in 0..(nl.chart_polygon.len() - 1) {
            let src_jump = (nl.chart_polygon[i + 1] - nl.chart_polygon[i]).norm();
            let dst_jump = (nl1.chart_polygon[i + 1] - nl1.chart_polygon[i]).norm();
            if src_jump > 1e-12 {
                max_ratio = max_ratio.max(dst_jump / src_jump);
            }
        }
        assert!(max_ratio < 10.0, "continuity ratio {max_ratio}");
    }

    #[test]
    fn normalize_leaf_identity_and_errors() {
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let samples = leaf_sample_angles(&table, &angles[..1], 48);
        let leaf = extract_leaf(&table, angles[0], &samples, 1e-9).unwrap();
        let base = base_angles(&rep2);
        let nl =
            normalize_leaf(&table, &leaf, &base, &FrameRP2::unit_circle(), 1e-9, 1e-8).unwrap();

        // coincident base entries are rejected
        let bad = [base[0], base[0], base[2], base[3]];
        assert!(matches!(
            normalize_leaf(&table, &leaf, &bad, &FrameRP2::unit_circle(), 1e-9, 1e-8),
            Err(GeomError::DegenerateFrame(_))
        ));

        // frame points land on the reference within tolerance
        for (fp, rp) in nl
            .frame_chart_points
            .iter()
            .zip(FrameRP2::unit_circle().points().iter())
        {
            let r = Vector2::new(rp[0] / rp[2], rp[1] / rp[2]);
            assert!((fp - r).norm() < 1e-9, "frame fidelity {}", (fp - r).norm());
        }
    }

    #[test]
    fn fuchsian_leaves_all_agree() {
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let samples = leaf_sample_angles(&table, &angles, 64);
        let base = base_angles(&rep2);
        let reference = FrameRP2::unit_circle();
        let normalized: Vec<NormalizedLeaf> = angles
            .iter()
            .map(|&t| {
                let leaf = extract_leaf(&table, t, &samples, 1e-9).unwrap();
                normalize_leaf(&table, &leaf, &base, &reference, 1e-9, 1e-8).unwrap()
            })
            .collect();
        for i in 0..normalized.len() {
            for j in (i + 1)..normalized.len() {
                let cmp = compare_leaves(&normalized[i], &normalized[j]).unwrap();
                assert!(
                    cmp.hausdorff < 1e-6,
                    "leaves {i} {j} differ by {}",
                    cmp.hausdorff
                );
            }
        }
    }

    #[test]
    fn hausdorff_examples() {
        let circle = |r: f64, n: usize| -> Vec<PlanarPoint> {
            (0..n)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    Vector2::new(r * t.cos(), r * t.sin())
                })
                .collect()
        };
        let p = circle(1.0, 512);
        assert_eq!(hausdorff_distance(&p, &p).unwrap(), 0.0);
        let q = circle(2.0, 512);
        let d = hausdorff_distance(&p, &q).unwrap();
        assert!((d - 1.0).abs() < 1e-3, "concentric circles: {d}");

        // directed distances differ: a small disc hugging the boundary of the
        // unit disc is near the big curve everywhere, but not conversely
        let shifted: Vec<PlanarPoint> = circle(0.1, 256)
            .into_iter()
            .map(|v| v + Vector2::new(0.85, 0.0))
            .collect();
        let d1 = directed_hausdorff(&p, &shifted).unwrap();
        let d2 = directed_hausdorff(&shifted, &p).unwrap();
        assert!((d1 - d2).abs() > 0.5, "directed distances {d1} vs {d2}");
        assert!((hausdorff_distance(&p, &shifted).unwrap() - d1.max(d2)).abs() < 1e-15);

        assert!(hausdorff_distance(&p, &[]).is_err());
    }

    #[test]
    fn continuity_scan_trivial_cases() {
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let base = base_angles(&rep2);
        let single = leaf_continuity_scan(
            &table,
            &angles[..1],
            &base,
            &FrameRP2::unit_circle(),
            32,
            1e-9,
            1e-8,
        )
        .unwrap();
        assert!(single.is_empty());

        let scan = leaf_continuity_scan(
            &table,
            &angles[..4],
            &base,
            &FrameRP2::unit_circle(),
            32,
            1e-9,
            1e-8,
        )
        .unwrap();
        assert_eq!(scan.len(), 3);
        for c in &scan {
            assert!(c.hausdorff < 1e-6, "Fuchsian leaves are constant");
        }
    }

    #[test]
    fn convexity_report_cases() {
        let n = 64;
        let poly: Vec<PlanarPoint> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Vector2::new(t.cos(), t.sin())
            })
            .collect();
        let rep = convexity_report(&poly).unwrap();
        assert!(rep.convex);
        assert_eq!(rep.reflex_count, 0);
        assert!(rep.min_turn_margin > 1e-3);

        let mut dented = poly.clone();
        dented[10] *= 0.2;
        let rep = convexity_report(&dented).unwrap();
        assert!(!rep.convex);
        assert!(rep.reflex_count > 0);

        assert!(convexity_report(&poly[..4]).is_err());
    }

    #[test]
    fn benzecri_iteration_examples() {
        let a = Matrix3::from_diagonal(&Vector3::new(
            std::f64::consts::E,
            1.0,
            1.0 / std::f64::consts::E,
        ));
        let ds = benzecri_iterate(&ConicArcDomain::half(), &a, 12, 256).unwrap();
        assert!(ds[0] > 0.0, "k = 0 distance must be positive");
        assert!(ds[10] < 1e-3, "d at k=10 is {}", ds[10]);
        for k in 2..12 {
            assert!(ds[k + 1] <= ds[k] + 1e-12, "not monotone at {k}");
        }

        let id = Matrix3::identity();
        let ds = benzecri_iterate(&ConicArcDomain::half(), &id, 5, 128).unwrap();
        for k in 1..=5 {
            assert!((ds[k] - ds[0]).abs() < 1e-14, "identity keeps d constant");
        }
    }

    #[test]
    fn leaf_boundary_lines_support() {
        // the supporting line xi3(y) meet xi3(x) passes through the boundary
        // point of dev(x) labelled y
        let (rep2, _, table) = setup();
        let angles = generator_angles(&rep2);
        let x = angles[0];
        let y = angles[3];
        let fx = table.lookup(x).unwrap().1.clone();
        let fy = table.lookup(y).unwrap().1.clone();
        let support: LineRP3 = crate::projlin::meet_planes(&fx.p3, &fy.p3, 1e-9).unwrap();
        let p = xi1_two_arg(&table, x, y, 1e-9).unwrap();
        assert!(support.containment_residual(&p) < 1e-8);
    }
}
