//! Projective linear algebra kernel over RP^2 and RP^3: homogeneous points,
//! hyperplanes, lines, frames, incidence operations, and the symmetric-power
//! representations that tie SL(2,R) to SL(4,R).

pub mod eigen;

use nalgebra::{DVector, Matrix2, Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{GeomError, Result};

pub use eigen::{eigen_real, EigenSplit};

/// A point of RP^2 or RP^3 in homogeneous coordinates, stored at unit
/// Euclidean norm with the first nonzero entry positive so projective
/// equality is plain vector distance.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoint {
    coords: DVector<f64>,
}

impl HomPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.len() != 3 && coords.len() != 4 {
            return Err(GeomError::Precondition(format!(
                "homogeneous point must have 3 or 4 coordinates, got {}",
                coords.len()
            )));
        }
        let v = DVector::from_column_slice(coords);
        let n = v.norm();
        if n < 1e-300 {
            return Err(GeomError::Precondition("zero homogeneous vector".into()));
        }
        Ok(Self {
            coords: canonical_sign(v / n),
        })
    }

    pub fn from_vec4(v: Vector4<f64>) -> Result<Self> {
        Self::new(v.as_slice())
    }

    pub fn from_vec3(v: Vector3<f64>) -> Result<Self> {
        Self::new(v.as_slice())
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn as_vec4(&self) -> Vector4<f64> {
        Vector4::from_column_slice(self.coords.as_slice())
    }

    pub fn as_vec3(&self) -> Vector3<f64> {
        Vector3::from_column_slice(self.coords.as_slice())
    }

    /// sin of the angle between the two lines in R^n, computed as the wedge
    /// norm ||u ^ v|| (stable near zero, unlike sqrt(1 - cos^2)).
    pub fn projective_distance(&self, other: &HomPoint) -> f64 {
        wedge_norm(&self.coords, &other.coords)
    }
}

fn wedge_norm(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let w = u[i] * v[j] - u[j] * v[i];
            s += w * w;
        }
    }
    s.sqrt()
}

fn canonical_sign(v: DVector<f64>) -> DVector<f64> {
    for &x in v.iter() {
        if x != 0.0 {
            return if x < 0.0 { -v } else { v };
        }
    }
    v
}

/// Annihilator of a hyperplane (a plane in RP^3 or a line in RP^2),
/// normalized like a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    coeffs: DVector<f64>,
}

impl Covector {
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        let p = HomPoint::new(coeffs)?;
        Ok(Self { coeffs: p.coords })
    }

    pub fn from_vec4(v: Vector4<f64>) -> Result<Self> {
        Self::new(v.as_slice())
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn as_vec4(&self) -> Vector4<f64> {
        Vector4::from_column_slice(self.coeffs.as_slice())
    }

    pub fn pair(&self, p: &HomPoint) -> f64 {
        self.coeffs.dot(p.coords())
    }

    pub fn projective_distance(&self, other: &Covector) -> f64 {
        wedge_norm(&self.coeffs, &other.coeffs)
    }

    /// Orthonormal basis of the annihilated hyperplane (4 -> 4x3 columns).
    pub fn plane_basis(&self) -> [Vector4<f64>; 3] {
        let w = self.as_vec4();
        // start from the three standard vectors least aligned with w
        let mut idx: Vec<usize> = (0..4).collect();
        idx.sort_by(|&i, &j| w[i].abs().partial_cmp(&w[j].abs()).unwrap());
        let mut basis: Vec<Vector4<f64>> = Vec::with_capacity(3);
        for &i in idx.iter().take(3) {
            let mut e = Vector4::zeros();
            e[i] = 1.0;
            let mut v = e - w * w.dot(&e);
            for b in &basis {
                v -= b * b.dot(&v);
            }
            // re-orthogonalize once for stability
            v -= w * w.dot(&v);
            for b in &basis {
                v -= b * b.dot(&v);
            }
            basis.push(v / v.norm());
        }
        [basis[0], basis[1], basis[2]]
    }
}

/// A projective line in RP^3: a 2-dimensional linear subspace of R^4 with an
/// orthonormal spanning pair.
#[derive(Debug, Clone)]
pub struct LineRP3 {
    basis: [Vector4<f64>; 2],
}

impl LineRP3 {
    pub fn from_span(a: Vector4<f64>, b: Vector4<f64>) -> Result<Self> {
        let na = a.norm();
        if na < 1e-300 {
            return Err(GeomError::Precondition("zero span vector".into()));
        }
        let u = a / na;
        let mut v = b - u * u.dot(&b);
        v -= u * u.dot(&v);
        let nv = v.norm();
        if nv < 1e-12 * b.norm().max(1.0) {
            return Err(GeomError::DegenerateIncidence(
                "line span vectors are proportional".into(),
            ));
        }
        Ok(Self { basis: [u, v / nv] })
    }

    pub fn basis(&self) -> &[Vector4<f64>; 2] {
        &self.basis
    }

    pub fn contains(&self, p: &HomPoint, tol: f64) -> bool {
        self.containment_residual(p) < tol
    }

    /// Distance from the point to its projection onto the span.
    pub fn containment_residual(&self, p: &HomPoint) -> f64 {
        let v = p.as_vec4();
        let proj = self.basis[0] * self.basis[0].dot(&v) + self.basis[1] * self.basis[1].dot(&v);
        (v - proj).norm()
    }

    /// Subspace distance via principal angles, sqrt(sum sin^2 theta_i),
    /// computed stably as the residual of projecting one basis onto the other.
    pub fn subspace_distance(&self, other: &LineRP3) -> f64 {
        let mut s = 0.0;
        for u in &self.basis {
            let proj =
                other.basis[0] * other.basis[0].dot(u) + other.basis[1] * other.basis[1].dot(u);
            s += (u - proj).norm_squared();
        }
        s.sqrt()
    }
}

/// Four points of RP^2 in general position: every 3 of the 4 are linearly
/// independent above the `tau_gp` determinant tolerance.
#[derive(Debug, Clone)]
pub struct FrameRP2 {
    points: [Vector3<f64>; 4],
}

impl FrameRP2 {
    pub fn new(points: [Vector3<f64>; 4], tau_gp: f64) -> Result<Self> {
        let normed: Vec<Vector3<f64>> = points.iter().map(|p| p / p.norm()).collect();
        for skip in 0..4 {
            let cols: Vec<&Vector3<f64>> = normed
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, v)| v)
                .collect();
            let m = Matrix3::from_columns(&[*cols[0], *cols[1], *cols[2]]);
            if m.determinant().abs() < tau_gp {
                return Err(GeomError::DegenerateFrame(format!(
                    "triple omitting index {skip} has |det| {:.3e} < {tau_gp:.1e}",
                    m.determinant().abs()
                )));
            }
        }
        Ok(Self {
            points: [normed[0], normed[1], normed[2], normed[3]],
        })
    }

    pub fn standard() -> Self {
        Self::new(
            [
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(0.0, 1.0, 0.0),
                Vector3::new(0.0, 0.0, 1.0),
                Vector3::new(1.0, 1.0, 1.0),
            ],
            1e-8,
        )
        .expect("standard frame is in general position")
    }

    /// Four points on the unit circle of the z = 1 chart. Projectively a copy
    /// of the standard frame that keeps frame-normalized domains bounded.
    pub fn unit_circle() -> Self {
        Self::new(
            [
                Vector3::new(1.0, 0.0, 1.0),
                Vector3::new(0.0, 1.0, 1.0),
                Vector3::new(-1.0, 0.0, 1.0),
                Vector3::new(0.0, -1.0, 1.0),
            ],
            1e-8,
        )
        .expect("circle frame is in general position")
    }

    pub fn points(&self) -> &[Vector3<f64>; 4] {
        &self.points
    }
}

/// Intersection point of a plane and a line in RP^3.
pub fn meet_plane_line(plane: &Covector, line: &LineRP3, tau_inc: f64) -> Result<HomPoint> {
    let w = plane.as_vec4();
    let c0 = w.dot(&line.basis()[0]);
    let c1 = w.dot(&line.basis()[1]);
    let scale = (c0 * c0 + c1 * c1).sqrt();
    if scale < tau_inc {
        return Err(GeomError::DegenerateIncidence(
            "line lies in the plane (pairing has rank 0)".into(),
        ));
    }
    let p = line.basis()[0] * c1 - line.basis()[1] * c0;
    HomPoint::from_vec4(p)
}

/// Intersection line of two planes in RP^3.
pub fn meet_planes(p1: &Covector, p2: &Covector, tau_inc: f64) -> Result<LineRP3> {
    let a = p1.as_vec4();
    let b = p2.as_vec4();
    let b_perp = b - a * a.dot(&b);
    if b_perp.norm() < tau_inc {
        return Err(GeomError::DegenerateIncidence(
            "planes are projectively equal".into(),
        ));
    }
    // kernel of the 2x4 [a; b]: complement of span(a, b_perp)
    let u = b_perp / b_perp.norm();
    let mut basis: Vec<Vector4<f64>> = Vec::with_capacity(2);
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&i, &j| {
        (a[i].abs() + u[i].abs())
            .partial_cmp(&(a[j].abs() + u[j].abs()))
            .unwrap()
    });
    for &i in &idx {
        let mut e = Vector4::zeros();
        e[i] = 1.0;
        let mut v = e - a * a.dot(&e) - u * u.dot(&e);
        for bb in &basis {
            v -= bb * bb.dot(&v);
        }
        v = v - a * a.dot(&v) - u * u.dot(&v);
        for bb in &basis {
            v -= bb * bb.dot(&v);
        }
        if v.norm() > 0.5 {
            basis.push(v / v.norm());
            if basis.len() == 2 {
                break;
            }
        }
    }
    LineRP3::from_span(basis[0], basis[1])
}

/// Line through two distinct points of RP^3.
pub fn join_points(a: &HomPoint, b: &HomPoint) -> Result<LineRP3> {
    if a.projective_distance(b) < 1e-12 {
        return Err(GeomError::DegenerateIncidence(
            "join of projectively equal points".into(),
        ));
    }
    LineRP3::from_span(a.as_vec4(), b.as_vec4())
}

/// The unique det-1 projective map of RP^2 sending `src.points[i]` to
/// `dst.points[i]`. Uniqueness is by simple transitivity on 4-ples in general
/// position; in odd dimension det = 1 fixes the scale outright.
pub fn frame_map(src: &FrameRP2, dst: &FrameRP2) -> Result<Matrix3<f64>> {
    let weights = |f: &FrameRP2| -> Result<Matrix3<f64>> {
        let m = Matrix3::from_columns(&f.points()[..3]);
        let lu = m.lu();
        let c = lu
            .solve(&f.points()[3])
            .ok_or_else(|| GeomError::DegenerateFrame("frame solve failed".into()))?;
        Ok(Matrix3::from_columns(&[
            f.points()[0] * c[0],
            f.points()[1] * c[1],
            f.points()[2] * c[2],
        ]))
    };
    let ms = weights(src)?;
    let md = weights(dst)?;
    let m = md * ms
        .try_inverse()
        .ok_or_else(|| GeomError::DegenerateFrame("singular frame matrix".into()))?;
    let det = m.determinant();
    if det.abs() < 1e-300 {
        return Err(GeomError::DegenerateFrame("frame map is singular".into()));
    }
    Ok(m / det.cbrt())
}

/// Action of a 2x2 matrix on degree-3 monomials (x^3, x^2 y, x y^2, y^3):
/// `sym_cube(A) . veronese(p) = veronese(A p)`. Multiplicative, det 1 for
/// det-1 input, and diag(l, 1/l) maps to diag(l^3, l, 1/l, 1/l^3).
pub fn sym_cube(m: &Matrix2<f64>) -> Matrix4<f64> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    Matrix4::new(
        a * a * a,
        3.0 * a * a * b,
        3.0 * a * b * b,
        b * b * b,
        a * a * c,
        a * a * d + 2.0 * a * b * c,
        2.0 * a * b * d + b * b * c,
        b * b * d,
        a * c * c,
        2.0 * a * c * d + b * c * c,
        a * d * d + 2.0 * b * c * d,
        b * d * d,
        c * c * c,
        3.0 * c * c * d,
        3.0 * c * d * d,
        d * d * d,
    )
}

/// Degree-2 analogue of `sym_cube` in the basis (x^2, x y, y^2).
pub fn sym_square(m: &Matrix2<f64>) -> Matrix3<f64> {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    Matrix3::new(
        a * a,
        2.0 * a * b,
        b * b,
        a * c,
        a * d + b * c,
        b * d,
        c * c,
        2.0 * c * d,
        d * d,
    )
}

/// Veronese embedding RP^1 -> RP^3 by monomial evaluation [x:y] -> [x^3 : x^2 y : x y^2 : y^3].
pub fn veronese_point(x: f64, y: f64) -> Result<HomPoint> {
    HomPoint::new(&[x * x * x, x * x * y, x * y * y, y * y * y])
}

/// Annihilator of the three vectors: the generalized cross product in R^4,
/// computed from 3x3 minors.
pub fn cross4(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> Vector4<f64> {
    let minor = |i: usize, j: usize, k: usize| -> f64 {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i])
            + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    Vector4::new(
        minor(1, 2, 3),
        -minor(0, 2, 3),
        minor(0, 1, 3),
        -minor(0, 1, 2),
    )
}

/// A planar point in some fixed affine chart.
pub type PlanarPoint = nalgebra::Vector2<f64>;

/// Convex hull, in a 3D affine chart, of a planar convex polygon together
/// with an apex off its carrier plane. The hull's vertex set is the polygon's
/// vertices plus the apex.
pub fn cone_lift(
    polygon: &[Vector3<f64>],
    apex: &Vector3<f64>,
    tol: f64,
) -> Result<Vec<Vector3<f64>>> {
    if polygon.len() < 3 {
        return Err(GeomError::EmptyInput(
            "cone lift needs a polygon with at least 3 vertices".into(),
        ));
    }
    // carrier plane from the first three vertices
    let n = (polygon[1] - polygon[0]).cross(&(polygon[2] - polygon[0]));
    let nn = n.norm();
    if nn < 1e-14 {
        return Err(GeomError::Precondition("polygon is degenerate".into()));
    }
    let n = n / nn;
    let d = n.dot(apex) - n.dot(&polygon[0]);
    let scale = polygon
        .iter()
        .map(|p| (p - polygon[0]).norm())
        .fold(0.0_f64, f64::max)
        .max(1.0);
    if d.abs() < tol * scale {
        return Err(GeomError::DegenerateApex);
    }
    let mut verts = polygon.to_vec();
    verts.push(*apex);
    Ok(verts)
}
