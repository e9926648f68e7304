//! Jordan projections of word images, the eigenvalue constraint polynomial
//! and its ratio form, the diagonal-form reduction for symplectic spectra,
//! the factored witness polynomial separating principal spectra, and sampled
//! limit-cone directions in the Weyl chamber.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::group::{enumerate_words, evaluate, SurfaceRep, Word};
use crate::numeric::singular_values;
use crate::projlin::eigen_real;

/// Sorted logarithms of the absolute eigenvalues of a loxodromic matrix,
/// landing in the closed Weyl chamber (decreasing entries, zero sum).
pub fn jordan_projection(m: &DMatrix<f64>, tau_gap: f64, tau_eig: f64) -> Result<[f64; 4]> {
    if m.nrows() != 4 {
        return Err(GeomError::Precondition("jordan projection needs 4x4".into()));
    }
    let split = eigen_real(m, tau_gap, tau_eig)?;
    let l = split.log_moduli();
    zero_sum_projected([l[0], l[1], l[2], l[3]])
}

/// Enforce the det-1 constraint sum(l) = 0. Drift below the gate is
/// eliminated by projecting onto the zero-sum hyperplane (the constraint is
/// exact mathematically; the drift is determinant rounding on non-normal
/// matrices). Larger drift signals a corrupted matrix product and rejects
/// the input.
fn zero_sum_projected(mut l: [f64; 4]) -> Result<[f64; 4]> {
    let sum: f64 = l.iter().sum();
    if sum.abs() > 1e-5 {
        return Err(GeomError::Precondition(format!(
            "log-eigenvalue sum {sum:.3e} drifts from 0; matrix product is unreliable"
        )));
    }
    let shift = sum / 4.0;
    for x in l.iter_mut() {
        *x -= shift;
    }
    Ok(l)
}

fn require_sorted(l: &[f64; 4]) -> Result<()> {
    if l[0] > l[1] && l[1] > l[2] && l[2] > l[3] {
        Ok(())
    } else {
        Err(GeomError::NotSorted)
    }
}

/// The homogeneous degree-2 constraint on log-eigenvalue vectors:
/// (l1 - l3)(l3 - l4) - (l2 - l4)(l2 - l3).
/// Vanishes exactly on spectra whose boundary exponents match across the
/// attracting and repelling leaves.
pub fn eq1_residual(l: &[f64; 4]) -> Result<f64> {
    require_sorted(l)?;
    Ok((l[0] - l[2]) * (l[2] - l[3]) - (l[1] - l[3]) * (l[1] - l[2]))
}

/// The two boundary-exponent ratios (l1 - l3)/(l1 - l2) and
/// (l2 - l4)/(l3 - l4); both equal 2 exactly for principal (ellipse-type)
/// spectra.
pub fn ellipse_ratios(l: &[f64; 4], tau_gap: f64) -> Result<(f64, f64)> {
    require_sorted(l)?;
    let d1 = l[0] - l[1];
    let d2 = l[2] - l[3];
    if d1 < tau_gap || d2 < tau_gap {
        return Err(GeomError::DegenerateGap(format!(
            "ratio denominators {d1:.3e}, {d2:.3e}"
        )));
    }
    Ok(((l[0] - l[2]) / d1, (l[1] - l[3]) / d2))
}

/// If the vector has symplectic pairing (l1 + l4 = l2 + l3 = 0) and
/// satisfies the constraint polynomial, it is proportional to (3, 1, -1, -3)
/// and the underlying matrix is conjugate to diag(m^3, m, 1/m, 1/m^3);
/// returns that multiplier m.
pub fn diagonal_form_check(l: &[f64; 4], tol: f64) -> Result<Option<f64>> {
    require_sorted(l)?;
    let scale = l[0].abs().max(1.0);
    let symplectic = (l[0] + l[3]).abs() < tol * scale && (l[1] + l[2]).abs() < tol * scale;
    if !symplectic {
        return Ok(None);
    }
    let res = eq1_residual(l)?;
    if res.abs() > tol * scale * scale {
        return Ok(None);
    }
    let lambda = l[1].exp();
    // confirm l is proportional to (3, 1, -1, -3)
    let model = [3.0 * l[1], l[1], -l[1], -3.0 * l[1]];
    for (a, b) in l.iter().zip(model.iter()) {
        if (a - b).abs() > tol * scale {
            return Ok(None);
        }
    }
    Ok(Some(lambda))
}

/// The witness polynomial F(a1,..,a4) = prod over ordered pairs (i,j)
/// (including i = j) of (a_i - a_j^3). It vanishes on every principal
/// spectrum (m^3, m, 1/m, 1/m^3) but not at diag(3, 2, 1/2, 1/3), which
/// separates principal tuples from general symplectic ones. Evaluated in
/// log-magnitude form to survive the huge dynamic range of long words.
pub fn fuchsian_witness(eigs: &[f64; 4]) -> Result<f64> {
    if eigs.iter().any(|a| *a == 0.0) {
        return Err(GeomError::Precondition(
            "witness polynomial needs nonzero eigenvalues".into(),
        ));
    }
    let mut log_abs = 0.0_f64;
    let mut sign = 1.0_f64;
    for &ai in eigs {
        for &aj in eigs {
            let f = ai - aj * aj * aj;
            if f == 0.0 {
                return Ok(0.0);
            }
            log_abs += f.abs().ln();
            sign *= f.signum();
        }
    }
    if log_abs > 700.0 {
        return Ok(sign * f64::INFINITY);
    }
    Ok(sign * log_abs.exp())
}

/// Spectrum data of one word.
#[derive(Debug, Clone)]
pub struct SpectrumRecord {
    pub word: Word,
    /// log moduli, decreasing, sum 0
    pub lambda: [f64; 4],
    /// eigenvalues themselves, by decreasing modulus
    pub eigenvalues: [f64; 4],
    pub eq1_residual: f64,
    /// residual of the unit-normalized lambda vector
    pub eq1_residual_unit: f64,
    pub ellipse_ratios: (f64, f64),
    pub witness: f64,
}

/// Per-word spectra over all words up to max_len. Words whose eigen-data
/// fails validation (complex spectrum, weak gaps, or log-sum drift beyond
/// 1e-9, which signals an ill-conditioned product) are skipped and counted.
pub fn spectra_scan(
    rep4: &SurfaceRep,
    max_len: usize,
    tau_gap: f64,
    tau_eig: f64,
) -> (Vec<SpectrumRecord>, usize) {
    let words = enumerate_words(max_len);
    let results: Vec<Option<SpectrumRecord>> = words
        .par_iter()
        .map(|w| spectrum_of_word(rep4, w, tau_gap, tau_eig).ok())
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    (results.into_iter().flatten().collect(), skipped)
}

pub fn spectrum_of_word(
    rep4: &SurfaceRep,
    w: &Word,
    tau_gap: f64,
    tau_eig: f64,
) -> Result<SpectrumRecord> {
    // symmetric-cube lifts: take the multiplier from the 2x2 image, which
    // keeps full relative precision on the small eigenvalues of long words
    let (lambda, eigenvalues) = if let Some(g2) = rep4.gens2() {
        let m2 = crate::group::evaluate2(g2, w);
        let tr = m2.trace();
        let disc = tr * tr - 4.0 * m2.determinant();
        if disc <= tau_gap {
            return Err(GeomError::NotLoxodromic(format!(
                "word {w} is not hyperbolic in the base representation"
            )));
        }
        let mu = (tr + tr.signum() * disc.sqrt()) / 2.0;
        let eigenvalues = [mu * mu * mu, mu, 1.0 / mu, 1.0 / (mu * mu * mu)];
        let l = mu.abs().ln();
        ([3.0 * l, l, -l, -3.0 * l], eigenvalues)
    } else {
        let m = evaluate(rep4, w);
        let split = eigen_real(&m, tau_gap, tau_eig)?;
        let l = split.log_moduli();
        let lambda = zero_sum_projected([l[0], l[1], l[2], l[3]])?;
        let eigenvalues = [
            split.eigenvalues[0],
            split.eigenvalues[1],
            split.eigenvalues[2],
            split.eigenvalues[3],
        ];
        (lambda, eigenvalues)
    };
    let norm = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
    let unit = [
        lambda[0] / norm,
        lambda[1] / norm,
        lambda[2] / norm,
        lambda[3] / norm,
    ];
    Ok(SpectrumRecord {
        word: w.clone(),
        lambda,
        eigenvalues,
        eq1_residual: eq1_residual(&lambda)?,
        eq1_residual_unit: eq1_residual(&unit)?,
        ellipse_ratios: ellipse_ratios(&lambda, tau_gap)?,
        witness: fuchsian_witness(&eigenvalues)?,
    })
}

/// Unit directions of Jordan projections in the Weyl chamber.
#[derive(Debug, Clone)]
pub struct ConeSampleSet {
    pub directions: Vec<[f64; 4]>,
    pub words: Vec<Word>,
}

pub fn limit_cone_sample(
    rep4: &SurfaceRep,
    max_len: usize,
    tau_gap: f64,
    tau_eig: f64,
) -> ConeSampleSet {
    let (records, _) = spectra_scan(rep4, max_len, tau_gap, tau_eig);
    let mut directions = Vec::with_capacity(records.len());
    let mut words = Vec::with_capacity(records.len());
    for r in records {
        let norm = r.lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        directions.push([
            r.lambda[0] / norm,
            r.lambda[1] / norm,
            r.lambda[2] / norm,
            r.lambda[3] / norm,
        ]);
        words.push(r.word);
    }
    ConeSampleSet { directions, words }
}

/// Numerical rank of the direction span at a relative singular-value
/// threshold, together with the singular-value profile. A full cone has
/// rank 3 (directions live in the zero-sum hyperplane); a single spectral
/// ray has rank 1.
pub fn cone_dimension(cs: &ConeSampleSet, rel_threshold: f64) -> Result<(usize, Vec<f64>)> {
    if cs.directions.is_empty() {
        return Err(GeomError::EmptyInput("cone sample set".into()));
    }
    let rows: Vec<Vec<f64>> = cs.directions.iter().map(|d| d.to_vec()).collect();
    let sv = singular_values(&rows);
    let rank = sv.iter().filter(|s| **s > rel_threshold * sv[0]).count();
    Ok((rank, sv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{bend, fuchsian_octagon_rep, lift_principal, separating_curve};
    use crate::projlin::sym_cube;
    use nalgebra::{Matrix2, Matrix4};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dm4(m: &Matrix4<f64>) -> DMatrix<f64> {
        DMatrix::from_iterator(4, 4, m.iter().cloned())
    }

    #[test]
    fn jordan_projection_examples() {
        let d = dm4(&Matrix4::from_diagonal(&nalgebra::Vector4::new(
            3.0,
            2.0,
            0.5,
            1.0 / 3.0,
        )));
        let l = jordan_projection(&d, 1e-6, 1e-8).unwrap();
        let e = [3.0_f64.ln(), 2.0_f64.ln(), -(2.0_f64.ln()), -(3.0_f64.ln())];
        for (a, b) in l.iter().zip(e.iter()) {
            assert!((a - b).abs() < 1e-12);
        }

        let s = sym_cube(&Matrix2::new(2.0, 0.0, 0.0, 0.5));
        let l = jordan_projection(&dm4(&s), 1e-6, 1e-8).unwrap();
        let ln2 = 2.0_f64.ln();
        let expect = [3.0 * ln2, ln2, -ln2, -3.0 * ln2];
        for (a, b) in l.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn jordan_projection_conjugation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let base = Matrix4::from_diagonal(&nalgebra::Vector4::new(3.0, 2.0, 0.5, 1.0 / 3.0));
        let l0 = jordan_projection(&dm4(&base), 1e-6, 1e-8).unwrap();
        for _ in 0..100 {
            let mut g = Matrix4::zeros();
            for i in 0..4 {
                for j in 0..4 {
                    g[(i, j)] = rng.gen_range(-1.0f64..1.0);
                }
            }
            if g.determinant().abs() < 1e-2 {
                continue;
            }
            let m = g * base * g.try_inverse().unwrap();
            let l = jordan_projection(&dm4(&m), 1e-6, 1e-8).unwrap();
            for (a, b) in l.iter().zip(l0.iter()) {
                assert!((a - b).abs() < 1e-8, "conjugation moved lambda: {a} vs {b}");
            }
        }
    }

    #[test]
    fn eq1_values_and_homogeneity() {
        assert!(eq1_residual(&[3.0, 1.0, -1.0, -3.0]).unwrap().abs() < 1e-15);

        let l = [3.0_f64.ln(), 2.0_f64.ln(), -(2.0_f64.ln()), -(3.0_f64.ln())];
        let r = eq1_residual(&l).unwrap();
        assert!((r - (-1.7575)).abs() < 1e-3, "residual {r}");

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut v: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0f64..2.0)).collect();
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if v.windows(2).any(|w| w[0] - w[1] < 1e-3) {
                continue;
            }
            let l = [v[0], v[1], v[2], v[3]];
            let l2 = [2.0 * v[0], 2.0 * v[1], 2.0 * v[2], 2.0 * v[3]];
            let r1 = eq1_residual(&l).unwrap();
            let r2 = eq1_residual(&l2).unwrap();
            assert!((r2 - 4.0 * r1).abs() < 1e-12 * r1.abs().max(1.0));
        }

        assert!(matches!(
            eq1_residual(&[1.0, 2.0, -1.0, -2.0]),
            Err(GeomError::NotSorted)
        ));
    }

    #[test]
    fn eq1_ratio_equivalence_on_zero_locus() {
        // the ratio form (l1-l3)/(l2-l3) = (l2-l4)/(l3-l4) holds iff the
        // homogeneous residual vanishes, tested straddling the locus
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let a = rng.gen_range(0.2f64..2.0);
            let b = rng.gen_range(0.2f64..2.0);
            // construct gaps (alpha, beta, gamma) with beta^2 = alpha*gamma
            // exactly on the locus, then perturb
            let gamma = b * b / a;
            let perturb = if rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen_range(0.01f64..0.1)
            };
            let gaps = [a, b, gamma + perturb];
            let l4 = -(3.0 * gaps[2] + 2.0 * gaps[1] + gaps[0]) / 4.0;
            let l = [
                l4 + gaps[2] + gaps[1] + gaps[0],
                l4 + gaps[2] + gaps[1],
                l4 + gaps[2],
                l4,
            ];
            let res = eq1_residual(&l).unwrap();
            let lhs = (l[0] - l[2]) / (l[1] - l[2]);
            let rhs = (l[1] - l[3]) / (l[2] - l[3]);
            let ratio_equal = (lhs - rhs).abs() < 1e-9;
            let res_zero = res.abs() < 1e-9 * (l[1] - l[2]) * (l[2] - l[3]);
            assert_eq!(ratio_equal, res_zero, "l = {l:?}");
        }
    }

    #[test]
    fn ratio_examples() {
        let (r1, r2) = ellipse_ratios(&[3.0, 1.0, -1.0, -3.0], 1e-6).unwrap();
        assert!((r1 - 2.0).abs() < 1e-15 && (r2 - 2.0).abs() < 1e-15);
        let (r1, r2) = ellipse_ratios(&[4.0, 1.0, 0.0, -5.0], 1e-6).unwrap();
        assert!((r1 - 4.0 / 3.0).abs() < 1e-15);
        assert!((r2 - 6.0 / 5.0).abs() < 1e-15);
        assert!(matches!(
            ellipse_ratios(&[1.0, 1.0 - 1e-9, 0.0, -2.0], 1e-6),
            Err(_)
        ));
    }

    #[test]
    fn diagonal_form_examples() {
        let m = diagonal_form_check(&[3.0, 1.0, -1.0, -3.0], 1e-9).unwrap();
        assert!((m.unwrap() - std::f64::consts::E).abs() < 1e-12);

        // symplectic pairing holds but the constraint fails
        let l = [3.0_f64.ln(), 2.0_f64.ln(), -(2.0_f64.ln()), -(3.0_f64.ln())];
        assert!(diagonal_form_check(&l, 1e-9).unwrap().is_none());

        // gaps (1, 2, 1): beta^2 = 4 != alpha*gamma = 1
        assert!(diagonal_form_check(&[2.0, 1.0, -1.0, -2.0], 1e-9)
            .unwrap()
            .is_none());
    }

    #[test]
    fn witness_examples() {
        let f = fuchsian_witness(&[3.0, 2.0, 0.5, 1.0 / 3.0]).unwrap();
        assert!(f.abs() > 1e-6, "witness at the symplectic anchor: {f}");
        let f = fuchsian_witness(&[8.0, 2.0, 0.5, 0.125]).unwrap();
        assert!(f.abs() < 1e-12, "witness vanishes on the principal tuple");
        let f = fuchsian_witness(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(f, 0.0, "any entry 1 kills the diagonal factor");
    }

    #[test]
    fn witness_is_symmetric_via_root_reconstruction() {
        // reconstruct the multiset from elementary symmetric values (the
        // characteristic polynomial of the diagonal matrix) and re-evaluate
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let mut a: Vec<f64> = (0..4)
                .map(|_| {
                    let v: f64 = rng.gen_range(0.3f64..3.0);
                    v
                })
                .collect();
            a.sort_by(|x, y| y.partial_cmp(x).unwrap());
            a[1] = a[0] / rng.gen_range(1.5f64..2.0);
            a[2] = a[1] / rng.gen_range(1.5f64..2.0);
            a[3] = a[2] / rng.gen_range(1.5f64..2.0);
            let direct = fuchsian_witness(&[a[0], a[1], a[2], a[3]]).unwrap();
            // char poly x^4 - e1 x^3 + e2 x^2 - e3 x + e4
            let e1 = a.iter().sum::<f64>();
            let e2 = a[0] * a[1] + a[0] * a[2] + a[0] * a[3] + a[1] * a[2] + a[1] * a[3]
                + a[2] * a[3];
            let e3 = a[0] * a[1] * a[2] + a[0] * a[1] * a[3] + a[0] * a[2] * a[3]
                + a[1] * a[2] * a[3];
            let e4 = a[0] * a[1] * a[2] * a[3];
            let roots = crate::numeric::real_roots(&[e4, -e3, e2, -e1, 1.0]);
            assert_eq!(roots.len(), 4);
            let rec = fuchsian_witness(&[roots[3], roots[2], roots[1], roots[0]]).unwrap();
            assert!(
                (direct - rec).abs() < 1e-6 * direct.abs().max(1.0),
                "witness not symmetric: {direct} vs {rec}"
            );
        }
    }

    #[test]
    fn scans_on_fuchsian_and_bent() {
        let rep4 = lift_principal(&fuchsian_octagon_rep()).unwrap();
        let (records, skipped) = spectra_scan(&rep4, 3, 1e-6, 1e-8);
        assert_eq!(skipped, 0, "all short Fuchsian words are loxodromic");
        for r in &records {
            assert!(r.eq1_residual.abs() < 1e-8, "word {}", r.word);
            assert!((r.ellipse_ratios.0 - 2.0).abs() < 1e-8);
            assert!((r.ellipse_ratios.1 - 2.0).abs() < 1e-8);
        }
        let cs = limit_cone_sample(&rep4, 3, 1e-6, 1e-8);
        let (rank, sv) = cone_dimension(&cs, 1e-6).unwrap();
        assert_eq!(rank, 1, "principal spectra are collinear, sv = {sv:?}");
        let ray = {
            let n = (9.0f64 + 1.0 + 1.0 + 9.0).sqrt();
            [3.0 / n, 1.0 / n, -1.0 / n, -3.0 / n]
        };
        for d in &cs.directions {
            for i in 0..4 {
                assert!(
                    (d[i] - ray[i]).abs() < 1e-8,
                    "direction {d:?} off the principal ray"
                );
            }
        }

        let (empty, _) = spectra_scan(&rep4, 0, 1e-6, 1e-8);
        assert!(empty.is_empty());

        let bent = bend(
            &rep4,
            &separating_curve(),
            &[1.0, 0.0, 0.0, -1.0],
            0.1,
            1e-6,
            1e-8,
        )
        .unwrap();
        let (records, _skipped) = spectra_scan(&bent, 3, 1e-6, 1e-8);
        let max_unit = records
            .iter()
            .map(|r| r.eq1_residual_unit.abs())
            .fold(0.0, f64::max);
        assert!(max_unit > 1e-3, "bent rep must break the constraint: {max_unit}");
        let cs = limit_cone_sample(&bent, 3, 1e-6, 1e-8);
        let (rank, _) = cone_dimension(&cs, 1e-6).unwrap();
        assert!(rank >= 2, "bent cone must open up");
    }

    #[test]
    fn lambda_power_scaling() {
        let rep4 = lift_principal(&fuchsian_octagon_rep()).unwrap();
        let w = Word::parse("ab").unwrap();
        let l1 = spectrum_of_word(&rep4, &w, 1e-6, 1e-8).unwrap().lambda;
        for n in 2..=4usize {
            let ln = spectrum_of_word(&rep4, &w.pow(n), 1e-6, 1e-8).unwrap().lambda;
            for i in 0..4 {
                assert!(
                    (ln[i] - n as f64 * l1[i]).abs() < 1e-7 * (1.0 + ln[i].abs()),
                    "lambda(w^{n}) != {n} lambda(w) at {i}"
                );
            }
        }
        // the matrix-level projection agrees on a moderate word
        let lm = jordan_projection(&evaluate(&rep4, &w), 1e-6, 1e-8).unwrap();
        for i in 0..4 {
            assert!((lm[i] - l1[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn cone_dimension_cases() {
        let ray = ConeSampleSet {
            directions: vec![[0.67, 0.22, -0.22, -0.67]; 5],
            words: vec![Word::identity(); 5],
        };
        assert_eq!(cone_dimension(&ray, 1e-6).unwrap().0, 1);

        // three independent zero-sum directions span the chamber's span
        let spread = ConeSampleSet {
            directions: vec![
                [3.0, 1.0, -1.0, -3.0],
                [4.0, 1.0, -2.0, -3.0],
                [5.0, 2.0, -3.0, -4.0],
            ],
            words: vec![Word::identity(); 3],
        };
        assert_eq!(cone_dimension(&spread, 1e-6).unwrap().0, 3);

        let empty = ConeSampleSet {
            directions: vec![],
            words: vec![],
        };
        assert!(cone_dimension(&empty, 1e-6).is_err());
    }
}
