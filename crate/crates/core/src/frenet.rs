//! Sampled hyperconvex flag curve on the boundary circle of the surface
//! group: exact Veronese flags for the Fuchsian representation, attracting
//! flags of word images in general, assembled into a deduplicated table
//! indexed by the boundary angle of the base Fuchsian representation.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2, Vector4};
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::group::{evaluate2, evaluate4, SurfaceRep, Word};
use crate::numeric::singular_values;
use crate::projlin::{cross4, eigen_real, Covector, HomPoint, LineRP3};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// A point of the boundary circle, coordinatized by the base Fuchsian
/// representation: the projective line RP^1 unfolded to [0, 2pi) by doubling
/// the line angle.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    pub angle: f64,
    pub word: Option<Word>,
}

impl BoundaryPoint {
    pub fn from_angle(angle: f64) -> Self {
        Self {
            angle: angle.rem_euclid(TAU),
            word: None,
        }
    }

    /// Direction vector of the underlying line in RP^1.
    pub fn direction(&self) -> Vector2<f64> {
        let half = self.angle / 2.0;
        Vector2::new(half.cos(), half.sin())
    }
}

pub fn angle_of_direction(v: &Vector2<f64>) -> f64 {
    let th = v[1].atan2(v[0]).rem_euclid(std::f64::consts::PI);
    2.0 * th
}

/// Distance on the boundary circle (angles mod 2pi).
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Mobius action of a 2x2 matrix on a boundary angle.
pub fn act_on_angle(m: &Matrix2<f64>, angle: f64) -> f64 {
    let v = BoundaryPoint::from_angle(angle).direction();
    angle_of_direction(&(m * v))
}

/// Attracting fixed point of a hyperbolic 2x2 matrix on RP^1, as a boundary
/// angle. The repelling point is the attracting point of the inverse.
pub fn boundary_point_of_word(rep2: &SurfaceRep, w: &Word, tau_gap: f64) -> Result<BoundaryPoint> {
    let gens = rep2.gens2().ok_or_else(|| {
        GeomError::Precondition("boundary points need a rank-2 representation".into())
    })?;
    let m = evaluate2(gens, w);
    let v = attracting_vector2(&m, tau_gap)?;
    Ok(BoundaryPoint {
        angle: angle_of_direction(&v),
        word: Some(w.clone()),
    })
}

pub fn attracting_vector2(m: &Matrix2<f64>, tau_gap: f64) -> Result<Vector2<f64>> {
    let tr = m.trace();
    let disc = tr * tr - 4.0 * m.determinant();
    if disc <= tau_gap {
        return Err(GeomError::NotLoxodromic(format!(
            "2x2 trace {tr:.6} is not hyperbolic"
        )));
    }
    let lambda = (tr + tr.signum() * disc.sqrt()) / 2.0;
    let a = m[(0, 0)];
    let b = m[(0, 1)];
    let c = m[(1, 0)];
    let d = m[(1, 1)];
    let v1 = Vector2::new(b, lambda - a);
    let v2 = Vector2::new(lambda - d, c);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    Ok(v / v.norm())
}

/// A flag of RP^3: nested point, line and plane attached to a boundary point.
#[derive(Debug, Clone)]
pub struct FlagRP3 {
    pub p1: HomPoint,
    pub p2: LineRP3,
    pub p3: Covector,
}

impl FlagRP3 {
    /// Max of the two nesting residuals: p1 in p2, and p2 in ker(p3).
    pub fn nesting_residual(&self) -> f64 {
        let r1 = self.p2.containment_residual(&self.p1);
        let w = self.p3.as_vec4();
        let r2 = w
            .dot(&self.p2.basis()[0])
            .abs()
            .max(w.dot(&self.p2.basis()[1]).abs());
        r1.max(r2)
    }
}

/// Exact flag of the Veronese curve at a boundary point: the curve point,
/// its osculating line, and the osculating plane.
pub fn veronese_flag(b: &BoundaryPoint) -> FlagRP3 {
    let v = b.direction();
    let (x, y) = (v[0], v[1]);
    let p1 = HomPoint::new(&[x * x * x, x * x * y, x * y * y, y * y * y])
        .expect("veronese point of a unit direction is nonzero");
    let dx = Vector4::new(3.0 * x * x, 2.0 * x * y, y * y, 0.0);
    let dy = Vector4::new(0.0, x * x, 2.0 * x * y, 3.0 * y * y);
    let p2 = LineRP3::from_span(dx, dy).expect("osculating directions are independent");
    let p3 = Covector::new(&[y * y * y, -3.0 * x * y * y, 3.0 * x * x * y, -x * x * x])
        .expect("osculating covector is nonzero");
    FlagRP3 { p1, p2, p3 }
}

/// Attracting flag of a loxodromic word image: spans of the top one, two and
/// three eigenvectors. For symmetric-cube lifts the eigenbasis is taken as
/// the symmetric cube of the 2x2 eigenbasis, which stays accurate for long
/// words; otherwise it comes from the quartic eigen-decomposition.
pub fn flag_of_word(rep4: &SurfaceRep, w: &Word, tau_gap: f64, tau_eig: f64) -> Result<FlagRP3> {
    let basis = eigenbasis4(rep4, w, tau_gap, tau_eig)?;
    flag_from_basis(&basis)
}

fn flag_from_basis(v: &Matrix4<f64>) -> Result<FlagRP3> {
    let v1 = v.column(0).into_owned();
    let v2 = v.column(1).into_owned();
    let v3 = v.column(2).into_owned();
    let p1 = HomPoint::from_vec4(v1)?;
    let p2 = LineRP3::from_span(v1, v2)?;
    let w = cross4(&v1, &v2, &v3);
    let p3 = Covector::from_vec4(w)?;
    Ok(FlagRP3 { p1, p2, p3 })
}

/// Basis adapted to the attracting filtration of the word image: the span of
/// the first k columns is the top-k eigenspace for k = 1..3 (via the
/// rank-2 route the later columns are orthonormalized, not eigenvectors).
pub fn eigenbasis4(
    rep4: &SurfaceRep,
    w: &Word,
    tau_gap: f64,
    tau_eig: f64,
) -> Result<Matrix4<f64>> {
    if let Some(g2) = rep4.gens2() {
        let m2 = evaluate2(g2, w);
        let vp = attracting_vector2(&m2, tau_gap)?;
        let inv = Matrix2::new(m2[(1, 1)], -m2[(0, 1)], -m2[(1, 0)], m2[(0, 0)]) / m2.determinant();
        let vm = attracting_vector2(&inv, tau_gap)?;
        if vp[0] * vm[1] - vp[1] * vm[0] == 0.0 {
            return Err(GeomError::NotLoxodromic(format!(
                "eigenvectors of {w} collapsed"
            )));
        }
        // orthonormalize before cubing: an upper-triangular basis change has
        // upper-triangular symmetric cube, so the flag's filtration is the
        // same, and the cube of a near-degenerate eigenbasis would otherwise
        // destroy the plane covector
        let mut q2 = vm - vp * vp.dot(&vm);
        q2 /= q2.norm();
        Ok(crate::projlin::sym_cube(&Matrix2::new(
            vp[0], q2[0], vp[1], q2[1],
        )))
    } else {
        let m = evaluate4(rep4, w)?;
        let split = eigen_real(
            &DMatrix::from_iterator(4, 4, m.iter().cloned()),
            tau_gap,
            tau_eig,
        )?;
        let mut v = Matrix4::zeros();
        for (j, col) in split.eigenvectors.iter().enumerate() {
            for i in 0..4 {
                v[(i, j)] = col[i];
            }
        }
        Ok(v)
    }
}

/// Sampled flag curve: one entry per distinct attracting fixed point, sorted
/// by boundary angle.
#[derive(Debug, Clone)]
pub struct FlagTable {
    entries: Vec<(BoundaryPoint, FlagRP3)>,
    base2: [Matrix2<f64>; 4],
    pub skipped_words: usize,
    pub dedup_tol: f64,
}

impl FlagTable {
    pub fn entries(&self) -> &[(BoundaryPoint, FlagRP3)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn base2(&self) -> &[Matrix2<f64>; 4] {
        &self.base2
    }

    pub fn angles(&self) -> Vec<f64> {
        self.entries.iter().map(|(b, _)| b.angle).collect()
    }

    /// Index of the tabulated angle nearest to `angle` on the circle.
    pub fn nearest(&self, angle: f64) -> usize {
        let mut best = (0usize, f64::INFINITY);
        for (i, (b, _)) in self.entries.iter().enumerate() {
            let d = circle_distance(b.angle, angle);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Entry whose angle matches within the deduplication tolerance.
    pub fn lookup(&self, angle: f64) -> Result<&(BoundaryPoint, FlagRP3)> {
        let i = self.nearest(angle);
        let e = &self.entries[i];
        if circle_distance(e.0.angle, angle) > self.dedup_tol.max(1e-7) {
            return Err(GeomError::Precondition(format!(
                "angle {angle:.9} is not tabulated"
            )));
        }
        Ok(e)
    }

    pub fn get(&self, i: usize) -> &(BoundaryPoint, FlagRP3) {
        &self.entries[i]
    }

    /// Assemble a table from prepared entries (sorted by angle on input).
    pub fn from_entries(
        mut entries: Vec<(BoundaryPoint, FlagRP3)>,
        base2: [Matrix2<f64>; 4],
        dedup_tol: f64,
    ) -> Self {
        entries.sort_by(|x, y| x.0.angle.partial_cmp(&y.0.angle).unwrap());
        Self {
            entries,
            base2,
            skipped_words: 0,
            dedup_tol,
        }
    }
}

/// Build the flag table from all words up to `max_len`.
pub fn build_flag_table(
    rep4: &SurfaceRep,
    rep2_base: &SurfaceRep,
    max_len: usize,
    tau_gap: f64,
    tau_eig: f64,
) -> Result<FlagTable> {
    let words = crate::group::enumerate_words(max_len);
    build_flag_table_for_words(rep4, rep2_base, &words, tau_gap, tau_eig)
}

/// Build the flag table from an explicit word list (used to tabulate
/// conjugates and other structured samples).
pub fn build_flag_table_for_words(
    rep4: &SurfaceRep,
    rep2_base: &SurfaceRep,
    words: &[Word],
    tau_gap: f64,
    tau_eig: f64,
) -> Result<FlagTable> {
    let base2 = *rep2_base.gens2().ok_or_else(|| {
        GeomError::Precondition("flag table needs a rank-2 base representation".into())
    })?;
    let dedup_tol = 1e-8;
    let computed: Vec<Option<(BoundaryPoint, FlagRP3)>> = words
        .par_iter()
        .map(|w| {
            let b = boundary_point_of_word(rep2_base, w, tau_gap).ok()?;
            let flag = flag_of_word(rep4, w, tau_gap, tau_eig).ok()?;
            if flag.nesting_residual() > 1e-7 {
                return None;
            }
            Some((b, flag))
        })
        .collect();
    let skipped = computed.iter().filter(|c| c.is_none()).count();
    // words arrive in length order, so on angle collisions the shortest word
    // wins (smaller accumulated error)
    let mut sorted: Vec<(BoundaryPoint, FlagRP3)> = computed.into_iter().flatten().collect();
    sorted.sort_by_key(|x| x.0.word.as_ref().map_or(0, |w| w.len()));
    let mut entries: Vec<(BoundaryPoint, FlagRP3)> = Vec::new();
    for (b, f) in sorted {
        let dup = entries
            .iter()
            .any(|(eb, _)| circle_distance(eb.angle, b.angle) < dedup_tol);
        if !dup {
            entries.push((b, f));
        }
    }
    entries.sort_by(|x, y| x.0.angle.partial_cmp(&y.0.angle).unwrap());
    Ok(FlagTable {
        entries,
        base2,
        skipped_words: skipped,
        dedup_tol,
    })
}

/// Max projective distance between rho(w) . flag(x) and flag(w . x) over all
/// tabulated x whose image angle is also tabulated.
pub fn check_equivariance(rep4: &SurfaceRep, table: &FlagTable, w: &Word) -> Result<f64> {
    if table.is_empty() {
        return Err(GeomError::EmptyInput("flag table".into()));
    }
    if w.is_empty() {
        return Ok(0.0);
    }
    let m4 = evaluate4(rep4, w)?;
    let m2 = evaluate2(table.base2(), w);
    let mut max_res: f64 = 0.0;
    let mut pairs = 0;
    for (b, flag) in table.entries() {
        let target_angle = act_on_angle(&m2, b.angle);
        let j = table.nearest(target_angle);
        let (tb, tflag) = table.get(j);
        if circle_distance(tb.angle, target_angle) > table.dedup_tol {
            continue;
        }
        pairs += 1;
        let img1 = HomPoint::from_vec4(m4 * flag.p1.as_vec4())?;
        let r1 = img1.projective_distance(&tflag.p1);
        let img2 = LineRP3::from_span(m4 * flag.p2.basis()[0], m4 * flag.p2.basis()[1])?;
        let r2 = img2.subspace_distance(&tflag.p2);
        // covectors transform by the inverse transpose
        let w3 = m4
            .transpose()
            .try_inverse()
            .ok_or_else(|| GeomError::Precondition("word image is singular".into()))?
            * flag.p3.as_vec4();
        let r3 = Covector::from_vec4(w3)?.projective_distance(&tflag.p3);
        max_res = max_res.max(r1).max(r2).max(r3);
    }
    if pairs == 0 {
        return Err(GeomError::NoOverlap);
    }
    Ok(max_res)
}

/// Randomized general-position checks on a flag table: triples of planes
/// meet in a single projective point, and xi1(x) + xi1(y) + xi2(z) spans all
/// of R^4. Margins are the relevant smallest singular values.
#[derive(Debug, Clone)]
pub struct GeneralPositionReport {
    pub trials: usize,
    pub min_triple_margin: f64,
    pub min_direct_sum_margin: f64,
    pub failures: usize,
}

pub fn check_general_position(
    table: &FlagTable,
    trials: usize,
    margin_tol: f64,
    min_separation: f64,
    rng: &mut impl rand::Rng,
) -> Result<GeneralPositionReport> {
    if trials == 0 {
        return Ok(GeneralPositionReport {
            trials: 0,
            min_triple_margin: f64::INFINITY,
            min_direct_sum_margin: f64::INFINITY,
            failures: 0,
        });
    }
    if table.len() < 4 {
        return Err(GeomError::Precondition(
            "general-position checks need at least 4 flags".into(),
        ));
    }
    let n = table.len();
    let mut min_triple = f64::INFINITY;
    let mut min_direct = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..trials {
        // margins vanish as sampled boundary points collide (osculation), so
        // triples are drawn with a minimum pairwise circle separation
        let mut idx = [0usize; 3];
        let mut tries = 0;
        loop {
            for slot in idx.iter_mut() {
                *slot = rng.gen_range(0..n);
            }
            let a0 = table.get(idx[0]).0.angle;
            let a1 = table.get(idx[1]).0.angle;
            let a2 = table.get(idx[2]).0.angle;
            let sep = circle_distance(a0, a1)
                .min(circle_distance(a1, a2))
                .min(circle_distance(a0, a2));
            tries += 1;
            if sep > min_separation || tries > 1000 {
                break;
            }
        }
        let flags: Vec<&FlagRP3> = idx.iter().map(|&i| &table.get(i).1).collect();
        let plane_rows: Vec<Vec<f64>> = flags
            .iter()
            .map(|f| f.p3.as_vec4().as_slice().to_vec())
            .collect();
        let sv = singular_values(&plane_rows);
        let triple_margin = sv[2];
        let span_rows = vec![
            flags[0].p1.as_vec4().as_slice().to_vec(),
            flags[1].p1.as_vec4().as_slice().to_vec(),
            flags[2].p2.basis()[0].as_slice().to_vec(),
            flags[2].p2.basis()[1].as_slice().to_vec(),
        ];
        let sv2 = singular_values(&span_rows);
        let direct_margin = sv2[3];
        if triple_margin < margin_tol || direct_margin < margin_tol {
            failures += 1;
        }
        min_triple = min_triple.min(triple_margin);
        min_direct = min_direct.min(direct_margin);
    }
    Ok(GeneralPositionReport {
        trials,
        min_triple_margin: min_triple,
        min_direct_sum_margin: min_direct,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate_words, fuchsian_octagon_rep, lift_principal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reps() -> (SurfaceRep, SurfaceRep) {
        let rep2 = fuchsian_octagon_rep();
        let rep4 = lift_principal(&rep2).unwrap();
        (rep2, rep4)
    }

    #[test]
    fn boundary_point_examples() {
        let (rep2, _) = reps();
        let w = Word::parse("a").unwrap();
        let b = boundary_point_of_word(&rep2, &w, 1e-6).unwrap();
        assert!(b.angle >= 0.0 && b.angle < TAU);

        // equivariance: fixed point of g a g^-1 is g . (fixed point of a)
        let g = Word::parse("bc").unwrap();
        let conj = w.conjugate_by(&g);
        let bc = boundary_point_of_word(&rep2, &conj, 1e-6).unwrap();
        let m = evaluate2(rep2.gens2().unwrap(), &g);
        let expect = act_on_angle(&m, b.angle);
        assert!(circle_distance(bc.angle, expect) < 1e-9);

        assert!(boundary_point_of_word(&rep2, &Word::identity(), 1e-6).is_err());
    }

    #[test]
    fn veronese_flag_coordinate_cases() {
        // angle 0 is [1:0]
        let f = veronese_flag(&BoundaryPoint::from_angle(0.0));
        assert!(f.p1.projective_distance(&HomPoint::new(&[1.0, 0.0, 0.0, 0.0]).unwrap()) < 1e-14);
        assert!(f.p3.projective_distance(&Covector::new(&[0.0, 0.0, 0.0, 1.0]).unwrap()) < 1e-14);
        // angle pi is [0:1]
        let f = veronese_flag(&BoundaryPoint::from_angle(std::f64::consts::PI));
        assert!(f.p1.projective_distance(&HomPoint::new(&[0.0, 0.0, 0.0, 1.0]).unwrap()) < 1e-12);
        assert!(f.p3.projective_distance(&Covector::new(&[1.0, 0.0, 0.0, 0.0]).unwrap()) < 1e-12);
        for k in 0..32 {
            let f = veronese_flag(&BoundaryPoint::from_angle(0.1 + 0.19 * k as f64));
            assert!(f.nesting_residual() < 1e-10);
        }
    }

    #[test]
    fn flag_of_word_matches_veronese_for_fuchsian() {
        let (rep2, rep4) = reps();
        for w in enumerate_words(2) {
            let b = boundary_point_of_word(&rep2, &w, 1e-6).unwrap();
            let fw = flag_of_word(&rep4, &w, 1e-6, 1e-8).unwrap();
            let fv = veronese_flag(&b);
            assert!(
                fw.p1.projective_distance(&fv.p1) < 1e-7,
                "xi1 mismatch for {w}"
            );
            assert!(fw.p2.subspace_distance(&fv.p2) < 1e-7, "xi2 mismatch for {w}");
            assert!(
                fw.p3.projective_distance(&fv.p3) < 1e-7,
                "xi3 mismatch for {w}"
            );
        }
    }

    #[test]
    fn flag_of_word_powers_and_inverse() {
        let (_, rep4) = reps();
        let w = Word::parse("ab").unwrap();
        let f1 = flag_of_word(&rep4, &w, 1e-6, 1e-8).unwrap();
        let f2 = flag_of_word(&rep4, &w.pow(2), 1e-6, 1e-8).unwrap();
        assert!(f1.p1.projective_distance(&f2.p1) < 1e-10);
        assert!(f1.p2.subspace_distance(&f2.p2) < 1e-10);
        assert!(f1.p3.projective_distance(&f2.p3) < 1e-10);

        // xi1 of the inverse word is the bottom eigenline: the cube of the
        // repelling eigendirection of the 2x2 image
        let (rep2, _) = reps();
        let m2 = evaluate2(rep2.gens2().unwrap(), &w.inverse());
        let vm = attracting_vector2(&m2, 1e-6).unwrap();
        let finv = flag_of_word(&rep4, &w.inverse(), 1e-6, 1e-8).unwrap();
        let bottom = HomPoint::new(&[
            vm[0] * vm[0] * vm[0],
            vm[0] * vm[0] * vm[1],
            vm[0] * vm[1] * vm[1],
            vm[1] * vm[1] * vm[1],
        ])
        .unwrap();
        assert!(finv.p1.projective_distance(&bottom) < 1e-10);
    }

    #[test]
    fn table_build_and_dedup() {
        let (rep2, rep4) = reps();
        let t1 = build_flag_table(&rep4, &rep2, 1, 1e-6, 1e-8).unwrap();
        assert_eq!(t1.len(), 8, "8 distinct axes for generators and inverses");
        let angles = t1.angles();
        for w in angles.windows(2) {
            assert!(w[1] > w[0], "angles strictly increasing");
        }

        let t2 = build_flag_table(&rep4, &rep2, 2, 1e-6, 1e-8).unwrap();
        assert!(t2.len() > 8);
        for (b, f) in t2.entries() {
            let fv = veronese_flag(b);
            assert!(f.p1.projective_distance(&fv.p1) < 1e-7);
        }
    }

    #[test]
    fn equivariance_residuals() {
        let (rep2, rep4) = reps();
        let table = build_flag_table(&rep4, &rep2, 3, 1e-6, 1e-8).unwrap();
        assert!(check_equivariance(&rep4, &table, &Word::identity()).unwrap() == 0.0);
        let res = check_equivariance(&rep4, &table, &Word::parse("a").unwrap()).unwrap();
        assert!(res < 1e-7, "equivariance residual {res}");
    }

    #[test]
    fn osculation_along_dynamical_sequences() {
        // spans xi1(g^n x1) + xi1(g^n x2) approach xi2(g+) monotonically
        let (rep2, rep4) = reps();
        let g = Word::parse("a").unwrap();
        let m4 = evaluate4(&rep4, &g).unwrap();
        let gplus = boundary_point_of_word(&rep2, &g, 1e-6).unwrap();
        let target = flag_of_word(&rep4, &g, 1e-6, 1e-8).unwrap();
        let x1 = veronese_flag(&BoundaryPoint::from_angle(gplus.angle + 0.9)).p1;
        let x2 = veronese_flag(&BoundaryPoint::from_angle(gplus.angle - 0.7)).p1;
        let mut v1 = x1.as_vec4();
        let mut v2 = x2.as_vec4();
        let mut last = f64::INFINITY;
        for n in 1..=6 {
            v1 = m4 * v1;
            v2 = m4 * v2;
            v1 /= v1.norm();
            v2 /= v2.norm();
            let span = LineRP3::from_span(v1, v2).unwrap();
            let d = span.subspace_distance(&target.p2);
            assert!(d < last, "osculation distance not decreasing at n={n}");
            last = d;
        }
    }

    #[test]
    fn general_position_margins() {
        let (rep2, rep4) = reps();
        let table = build_flag_table(&rep4, &rep2, 2, 1e-6, 1e-8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let rep = check_general_position(&table, 200, 1e-6, 0.05, &mut rng).unwrap();
        assert_eq!(rep.failures, 0);
        assert!(rep.min_triple_margin > 1e-6);
        assert!(rep.min_direct_sum_margin > 1e-6);

        let empty = check_general_position(&table, 0, 1e-6, 0.05, &mut rng).unwrap();
        assert_eq!(empty.trials, 0);
    }

    #[test]
    fn duplicated_flag_is_flagged() {
        let (rep2, rep4) = reps();
        let table = build_flag_table(&rep4, &rep2, 1, 1e-6, 1e-8).unwrap();
        // corrupt: reuse the flag of entry 0 at every angle
        let flag0 = table.get(0).1.clone();
        let entries: Vec<(BoundaryPoint, FlagRP3)> = table
            .entries()
            .iter()
            .map(|(b, _)| (b.clone(), flag0.clone()))
            .collect();
        let bad = FlagTable::from_entries(entries, *table.base2(), 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rep = check_general_position(&bad, 50, 1e-6, 0.05, &mut rng).unwrap();
        assert!(rep.failures > 0, "degenerate table must be flagged");
        assert!(rep.min_triple_margin < 1e-9);
    }
}
