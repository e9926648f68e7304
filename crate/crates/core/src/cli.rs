//! Batch commands behind the binary: build representations, extract and
//! compare leaves, scan spectra and cone directions, fit boundary exponents,
//! and run the contracting-iteration demo. All outputs are CSV tables and
//! SVG figures stamped with the config hash.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::config::RunConfig;
use crate::error::{GeomError, Result};
use crate::foliation::{
    benzecri_iterate, compare_leaves, extract_leaf, fit_conic, leaf_sample_angles, normalize_leaf,
    ConicArcDomain, NormalizedLeaf,
};
use crate::frenet::{boundary_point_of_word, build_flag_table, FlagTable};
use crate::group::{
    bend, fuchsian_octagon_rep, lift_principal, load_rep, reduced_word_count, save_rep,
    separating_curve, BendMeta, SurfaceRep, Word,
};
use crate::projlin::{FrameRP2, PlanarPoint};
use crate::regularity::modelling_constraint_check;
use crate::report::{fmt_f64, CsvWriter, SvgPlot};
use crate::spectra::{cone_dimension, spectra_scan, ConeSampleSet};

/// Hard ceiling on the number of word evaluations a scan may request.
pub const WORD_GUARD: u64 = 10_000_000;

pub fn guard_word_count(max_len: usize) -> Result<()> {
    let n = reduced_word_count(max_len);
    if n > WORD_GUARD {
        return Err(GeomError::Precondition(format!(
            "max_len {max_len} needs {n} word evaluations, above the {WORD_GUARD} guard"
        )));
    }
    Ok(())
}

/// Build and save a representation. `kind` is "fuchsian" or "bent".
pub fn cmd_build_rep(
    kind: &str,
    eps: f64,
    direction: &[f64; 4],
    out: &Path,
    tol: &crate::config::Tolerances,
) -> Result<()> {
    let rep2 = fuchsian_octagon_rep();
    let rep4 = lift_principal(&rep2)?;
    let (rep, meta) = match kind {
        "fuchsian" => (rep4, None),
        "bent" => {
            let bent = bend(
                &rep4,
                &separating_curve(),
                direction,
                eps,
                tol.tau_gap,
                tol.tau_eig,
            )?;
            (
                bent,
                Some(BendMeta {
                    eps,
                    direction: *direction,
                }),
            )
        }
        other => {
            return Err(GeomError::Precondition(format!(
                "unknown representation kind '{other}'"
            )))
        }
    };
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    save_rep(&rep, kind, meta, out)?;
    println!(
        "wrote {} ({kind}, rank 4, relator residual {:.3e})",
        out.display(),
        rep.relator_residual
    );
    Ok(())
}

pub struct Session {
    pub rep: SurfaceRep,
    pub base: SurfaceRep,
    pub table: FlagTable,
    pub config: RunConfig,
}

/// Load the representation and build the flag table over the canonical
/// boundary coordinates of the base Fuchsian representation.
pub fn open_session(config: &RunConfig) -> Result<Session> {
    config.validate()?;
    guard_word_count(config.max_word_len)?;
    let rep = load_rep(&config.rep_path)?;
    if rep.rank() != 4 {
        return Err(GeomError::Precondition(
            "pipelines need a rank-4 representation file".into(),
        ));
    }
    let base = fuchsian_octagon_rep();
    let table = build_flag_table(
        &rep,
        &base,
        config.max_word_len,
        config.tolerances.tau_gap,
        config.tolerances.tau_eig,
    )?;
    Ok(Session {
        rep,
        base,
        table,
        config: config.clone(),
    })
}

fn default_leaf_angles(base: &SurfaceRep) -> Vec<f64> {
    ["a", "A", "b", "B", "c", "C", "d", "D"]
        .iter()
        .map(|s| {
            boundary_point_of_word(base, &Word::parse(s).unwrap(), 1e-6)
                .unwrap()
                .angle
        })
        .collect()
}

fn snapped_base_angles(table: &FlagTable, requested: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, a) in requested.iter().enumerate() {
        out[i] = table.get(table.nearest(*a)).0.angle;
    }
    out
}

/// Extract, normalize and compare the configured leaves; write per-leaf CSVs
/// and SVGs, the pairwise Hausdorff matrix, and the flag-table export.
pub fn cmd_leaves(config: &RunConfig) -> Result<()> {
    let s = open_session(config)?;
    let hash = config.hash();
    let out = &config.output_dir;
    std::fs::create_dir_all(out)?;

    let leaf_angles = if config.leaf_angles.is_empty() {
        default_leaf_angles(&s.base)
    } else {
        config.leaf_angles.clone()
    };
    let leaf_angles: Vec<f64> = leaf_angles
        .iter()
        .map(|a| s.table.get(s.table.nearest(*a)).0.angle)
        .collect();
    let base_angles = snapped_base_angles(&s.table, &config.base_angles);
    let reference = FrameRP2::unit_circle();
    let samples = leaf_sample_angles(&s.table, &leaf_angles, config.leaf_samples);

    let mut normalized: Vec<NormalizedLeaf> = Vec::new();
    for (i, &t) in leaf_angles.iter().enumerate() {
        let leaf = extract_leaf(&s.table, t, &samples, config.tolerances.tau_inc)?;
        let nl = normalize_leaf(
            &s.table,
            &leaf,
            &base_angles,
            &reference,
            config.tolerances.tau_inc,
            config.tolerances.tau_gp,
        )?;

        let mut csv = CsvWriter::new(hash, &["y_angle", "px", "py", "pz", "chart_x", "chart_y"]);
        for ((b, p), q) in leaf.boundary.iter().zip(nl.chart_polygon.iter()) {
            let pc = leaf.plane_coords(p);
            csv.row(&[
                fmt_f64(b.angle),
                fmt_f64(pc[0]),
                fmt_f64(pc[1]),
                fmt_f64(pc[2]),
                fmt_f64(q[0]),
                fmt_f64(q[1]),
            ]);
        }
        csv.write(&out.join(format!("leaf_{i:02}.csv")))?;

        let mut plot = SvgPlot::new(&nl.chart_polygon);
        plot.polyline(&nl.chart_polygon, "#1f3b73", true);
        plot.points(&nl.frame_chart_points, "#c0392b", 3.0);
        plot.caption(&format!(
            "leaf {i:02} angle {:.6} chart {}",
            nl.leaf_angle, nl.chart_index
        ));
        plot.write(&out.join(format!("leaf_{i:02}.svg")))?;
        normalized.push(nl);
    }

    // pairwise Hausdorff matrix
    let mut cols = vec!["t_angle".to_string()];
    cols.extend(normalized.iter().map(|nl| fmt_f64(nl.leaf_angle)));
    let col_refs: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    let mut csv = CsvWriter::new(hash, &col_refs);
    let mut max_off = 0.0_f64;
    for a in &normalized {
        let mut row = vec![fmt_f64(a.leaf_angle)];
        for b in &normalized {
            let d = compare_leaves(a, b)?.hausdorff;
            if a.leaf_angle != b.leaf_angle {
                max_off = max_off.max(d);
            }
            row.push(fmt_f64(d));
        }
        csv.row(&row);
    }
    csv.write(&out.join("leaves_hausdorff.csv"))?;

    export_flag_table(&s.table, hash, &out.join("flags.csv"))?;

    let conic_worst = normalized
        .iter()
        .map(|nl| fit_conic(&nl.chart_polygon).map(|f| f.relative_residual))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0_f64, f64::max);
    println!(
        "leaves: {} leaves x {} samples, max off-diagonal d_H = {:.3e}, worst conic residual = {:.3e}, table skipped {} words",
        normalized.len(),
        samples.len(),
        max_off,
        conic_worst,
        s.table.skipped_words
    );
    Ok(())
}

pub fn export_flag_table(table: &FlagTable, hash: u64, path: &Path) -> Result<()> {
    let mut csv = CsvWriter::new(
        hash,
        &[
            "angle", "word", "xi1_0", "xi1_1", "xi1_2", "xi1_3", "xi2_a0", "xi2_a1", "xi2_a2",
            "xi2_a3", "xi2_b0", "xi2_b1", "xi2_b2", "xi2_b3", "xi3_0", "xi3_1", "xi3_2", "xi3_3",
        ],
    );
    for (b, f) in table.entries() {
        let mut row = vec![
            fmt_f64(b.angle),
            b.word.as_ref().map_or(String::new(), |w| w.to_string()),
        ];
        row.extend(f.p1.coords().iter().map(|x| fmt_f64(*x)));
        row.extend(f.p2.basis()[0].iter().map(|x| fmt_f64(*x)));
        row.extend(f.p2.basis()[1].iter().map(|x| fmt_f64(*x)));
        row.extend(f.p3.coeffs().iter().map(|x| fmt_f64(*x)));
        csv.row(&row);
    }
    csv.write(path)
}

/// Spectra scan: per-word CSV, cone-direction CSV and the cone figure.
pub fn cmd_spectra(config: &RunConfig) -> Result<()> {
    let s = open_session(config)?;
    let hash = config.hash();
    let out = &config.output_dir;
    std::fs::create_dir_all(out)?;
    let t = &config.tolerances;

    let (records, skipped) = spectra_scan(&s.rep, config.max_word_len, t.tau_gap, t.tau_eig);
    let mut csv = CsvWriter::new(
        hash,
        &[
            "word",
            "l1",
            "l2",
            "l3",
            "l4",
            "eq1_residual",
            "ratio1",
            "ratio2",
            "witness",
        ],
    );
    let mut max_unit = 0.0_f64;
    for r in &records {
        max_unit = max_unit.max(r.eq1_residual_unit.abs());
        csv.row(&[
            r.word.to_string(),
            fmt_f64(r.lambda[0]),
            fmt_f64(r.lambda[1]),
            fmt_f64(r.lambda[2]),
            fmt_f64(r.lambda[3]),
            fmt_f64(r.eq1_residual),
            fmt_f64(r.ellipse_ratios.0),
            fmt_f64(r.ellipse_ratios.1),
            fmt_f64(r.witness),
        ]);
    }
    csv.write(&out.join("spectra.csv"))?;

    let mut directions = Vec::with_capacity(records.len());
    let mut words = Vec::with_capacity(records.len());
    for r in &records {
        let norm = r.lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        directions.push([
            r.lambda[0] / norm,
            r.lambda[1] / norm,
            r.lambda[2] / norm,
            r.lambda[3] / norm,
        ]);
        words.push(r.word.clone());
    }
    let cone = ConeSampleSet { directions, words };
    let mut csv = CsvWriter::new(hash, &["word", "d1", "d2", "d3", "d4"]);
    for (w, d) in cone.words.iter().zip(cone.directions.iter()) {
        csv.row(&[
            w.to_string(),
            fmt_f64(d[0]),
            fmt_f64(d[1]),
            fmt_f64(d[2]),
            fmt_f64(d[3]),
        ]);
    }
    csv.write(&out.join("cone.csv"))?;

    let (rank, sv) = cone_dimension(&cone, 1e-6)?;
    cone_figure(&cone, &out.join("cone.svg"))?;
    println!(
        "spectra: {} words ({} skipped), max unit-normalized |eq1 residual| = {:.3e}, cone rank = {} (sv {:.3e} {:.3e} {:.3e})",
        cone.words.len(),
        skipped,
        max_unit,
        rank,
        sv[0],
        sv.get(1).copied().unwrap_or(0.0),
        sv.get(2).copied().unwrap_or(0.0),
    );
    Ok(())
}

/// Project cone directions onto the gap simplex (l1-l2, l2-l3, l3-l4) and
/// draw them in barycentric coordinates.
fn cone_figure(cone: &ConeSampleSet, path: &Path) -> Result<()> {
    let corners = [
        PlanarPoint::new(0.0, 0.0),
        PlanarPoint::new(1.0, 0.0),
        PlanarPoint::new(0.5, 3.0_f64.sqrt() / 2.0),
    ];
    let mut pts = Vec::with_capacity(cone.directions.len());
    for d in &cone.directions {
        let g = [d[0] - d[1], d[1] - d[2], d[2] - d[3]];
        let s: f64 = g.iter().sum();
        if s <= 0.0 {
            continue;
        }
        let p = corners[0] * (g[0] / s) + corners[1] * (g[1] / s) + corners[2] * (g[2] / s);
        pts.push(p);
    }
    let mut frame: Vec<PlanarPoint> = corners.to_vec();
    frame.push(corners[0]);
    let mut plot = SvgPlot::new(&frame);
    plot.polyline(&frame, "#888888", false);
    plot.points(&pts, "#1f3b73", 1.6);
    plot.caption("spectral gap directions (barycentric)");
    plot.write(path)
}

/// Exact and fitted boundary exponents for one word.
pub fn cmd_model_fit(config: &RunConfig, word: &str) -> Result<()> {
    let w = Word::parse(word)?;
    if w.is_empty() {
        return Err(GeomError::Precondition(
            "model fit needs a nonempty word".into(),
        ));
    }
    let s = open_session(config)?;
    let t = &config.tolerances;
    let check = modelling_constraint_check(
        &s.rep,
        &s.table,
        &w,
        true,
        t.tau_gap,
        t.tau_eig,
        t.tau_inc,
    )?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out)?;
    let mut csv = CsvWriter::new(
        config.hash(),
        &[
            "word",
            "point_type",
            "alpha_exact",
            "alpha_hat",
            "r2",
            "window_r",
        ],
    );
    for (tag, exact, fit) in [
        ("plus_leaf", check.alpha_plus_exact, &check.alpha_plus_fit),
        ("minus_leaf", check.alpha_minus_exact, &check.alpha_minus_fit),
    ] {
        let (hat, r2, wr) = fit
            .as_ref()
            .map(|f| (f.alpha_hat, f.r_squared, f.window_radius))
            .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        csv.row(&[
            check.word.to_string(),
            tag.to_string(),
            fmt_f64(exact),
            fmt_f64(hat),
            fmt_f64(r2),
            fmt_f64(wr),
        ]);
    }
    csv.write(&out.join("modelfit.csv"))?;
    println!(
        "model fit {}: exact alpha ({:.9}, {:.9}), mismatch {:.3e}",
        check.word,
        check.alpha_plus_exact,
        check.alpha_minus_exact,
        check.exact_mismatch()
    );
    Ok(())
}

/// The contracting-iteration demo on the half-conic domain.
pub fn cmd_benzecri_demo(config: &RunConfig, steps: usize) -> Result<()> {
    let a = Matrix3::from_diagonal(&Vector3::new(
        std::f64::consts::E,
        1.0,
        1.0 / std::f64::consts::E,
    ));
    let ds = benzecri_iterate(&ConicArcDomain::half(), &a, steps, 256)?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out)?;
    let mut csv = CsvWriter::new(config.hash(), &["k", "hausdorff"]);
    for (k, d) in ds.iter().enumerate() {
        csv.row(&[k.to_string(), fmt_f64(*d)]);
    }
    csv.write(&out.join("benzecri.csv"))?;

    // figure: target circle and the first few iterates
    let circle: Vec<PlanarPoint> = (0..256)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 256.0;
            PlanarPoint::new(0.5 - 0.5 * t.cos(), 0.5 * t.sin())
        })
        .collect();
    let mut plot = SvgPlot::new(&circle);
    plot.polyline(&circle, "#888888", true);
    let mut s_cut = 1.0_f64;
    for k in 0..steps.min(6) {
        let theta = 2.0 * s_cut.atan();
        let arc: Vec<PlanarPoint> = (0..200)
            .map(|i| {
                let t = -theta + 2.0 * theta * i as f64 / 199.0;
                PlanarPoint::new(0.5 - 0.5 * t.cos(), 0.5 * t.sin())
            })
            .collect();
        let shade = 40 + 30 * k;
        plot.polyline(&arc, &format!("rgb({shade},{shade},200)"), true);
        s_cut *= std::f64::consts::E;
    }
    plot.caption("iterates of the cut domain against the invariant conic");
    plot.write(&out.join("benzecri.svg"))?;

    let final_d = ds.last().copied().unwrap_or(f64::NAN);
    println!(
        "benzecri demo: {} steps, d_H sequence {:.3e} -> {:.3e}",
        steps,
        ds.first().copied().unwrap_or(f64::NAN),
        final_d
    );
    Ok(())
}
