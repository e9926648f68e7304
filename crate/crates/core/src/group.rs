//! Genus-2 surface group machinery: freely reduced words over the standard
//! generators, the discrete faithful SL(2,R) representation built from the
//! regular hyperbolic octagon, its principal (symmetric-cube) lift to
//! SL(4,R), and bending deformations along the separating curve [a1,b1].

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::error::{GeomError, Result};
use crate::projlin::{eigen_real, sym_cube};

/// One of the four standard generators or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    /// generator index 0..4 for a1, b1, a2, b2
    pub gen: u8,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    fn symbol(self) -> char {
        let c = [b'a', b'b', b'c', b'd'][self.gen as usize];
        if self.inverse {
            (c - 32) as char
        } else {
            c as char
        }
    }
}

/// A freely reduced word in the surface group generators. The empty word is
/// the identity; `Word::new` rejects unreduced input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        for w in letters.windows(2) {
            if w[0] == w[1].inv() {
                return Err(GeomError::Precondition(format!(
                    "word is not freely reduced at {}{}",
                    w[0].symbol(),
                    w[1].symbol()
                )));
            }
        }
        Ok(Self { letters })
    }

    pub fn identity() -> Self {
        Self { letters: vec![] }
    }

    pub fn generator(gen: u8, inverse: bool) -> Self {
        Self {
            letters: vec![Letter { gen, inverse }],
        }
    }

    /// Freely reduced concatenation.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last().map_or(false, |&last| last == l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn pow(&self, n: usize) -> Word {
        let mut w = Word::identity();
        for _ in 0..n {
            w = w.concat(self);
        }
        w
    }

    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.inverse())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Parse from the compact form used in CSV output and on the CLI:
    /// lowercase a,b,c,d are the generators a1,b1,a2,b2 and uppercase their inverses.
    pub fn parse(s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for ch in s.chars() {
            let (gen, inverse) = match ch {
                'a' => (0, false),
                'b' => (1, false),
                'c' => (2, false),
                'd' => (3, false),
                'A' => (0, true),
                'B' => (1, true),
                'C' => (2, true),
                'D' => (3, true),
                _ => {
                    return Err(GeomError::Precondition(format!(
                        "unknown letter '{ch}' in word"
                    )))
                }
            };
            letters.push(Letter { gen, inverse });
        }
        Word::new(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

/// All freely reduced nonempty words of length <= `max_len`, ordered by
/// length then lexicographically by (generator index, inverse flag).
pub fn enumerate_words(max_len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (0..4u8)
        .flat_map(|g| {
            [
                Letter {
                    gen: g,
                    inverse: false,
                },
                Letter {
                    gen: g,
                    inverse: true,
                },
            ]
        })
        .collect();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &alphabet {
                if w.last().map_or(false, |&last| last == l.inv()) {
                    continue;
                }
                let mut nw = w.clone();
                nw.push(l);
                next.push(nw);
            }
        }
        out.extend(next.iter().cloned().map(|letters| Word { letters }));
        frontier = next;
    }
    out
}

/// Number of freely reduced words of length exactly n (8 * 7^(n-1) for n >= 1).
pub fn reduced_word_count(max_len: usize) -> u64 {
    let mut total = 0u64;
    let mut layer = 8u64;
    for _ in 1..=max_len {
        total += layer;
        layer = layer.saturating_mul(7);
    }
    total
}

/// Generator images of the surface group, at rank 2 or 4. Rank-4 reps that
/// are symmetric-cube lifts keep their SL(2,R) source so that long words can
/// be evaluated through the 2x2 representation and cubed, which is far better
/// conditioned than chaining 4x4 products.
#[derive(Debug, Clone)]
pub enum RepKind {
    Rank2([Matrix2<f64>; 4]),
    Rank4 {
        gens: [Matrix4<f64>; 4],
        sym_cube_of: Option<[Matrix2<f64>; 4]>,
    },
}

#[derive(Debug, Clone)]
pub struct SurfaceRep {
    pub kind: RepKind,
    /// Backward-relative relator residual ||rho(r) - sign I||_F / (||K1||_F ||K2||_F)
    /// where K1, K2 are the images of the two commutators.
    pub relator_residual: f64,
}

impl SurfaceRep {
    pub fn rank(&self) -> usize {
        match &self.kind {
            RepKind::Rank2(_) => 2,
            RepKind::Rank4 { .. } => 4,
        }
    }

    pub fn gens2(&self) -> Option<&[Matrix2<f64>; 4]> {
        match &self.kind {
            RepKind::Rank2(g) => Some(g),
            RepKind::Rank4 { sym_cube_of, .. } => sym_cube_of.as_ref(),
        }
    }

    pub fn gens4(&self) -> Option<&[Matrix4<f64>; 4]> {
        match &self.kind {
            RepKind::Rank4 { gens, .. } => Some(gens),
            RepKind::Rank2(_) => None,
        }
    }
}

fn letter_matrix2(gens: &[Matrix2<f64>; 4], l: Letter) -> Matrix2<f64> {
    let m = gens[l.gen as usize];
    if l.inverse {
        // adjugate form: exact inverse for det-1 matrices
        Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / m.determinant()
    } else {
        m
    }
}

fn letter_matrix4(gens: &[Matrix4<f64>; 4], l: Letter) -> Matrix4<f64> {
    let m = gens[l.gen as usize];
    if l.inverse {
        m.try_inverse().expect("generator is invertible")
    } else {
        m
    }
}

/// Word image under the 2x2 part of a representation.
pub fn evaluate2(gens: &[Matrix2<f64>; 4], w: &Word) -> Matrix2<f64> {
    let mut m = Matrix2::identity();
    for &l in w.letters() {
        m *= letter_matrix2(gens, l);
    }
    m
}

/// Word image under a representation. Rank-4 lifts route through the 2x2
/// representation and a single symmetric cube.
pub fn evaluate(rep: &SurfaceRep, w: &Word) -> DMatrix<f64> {
    match &rep.kind {
        RepKind::Rank2(g) => {
            let m = evaluate2(g, w);
            DMatrix::from_iterator(2, 2, m.iter().cloned())
        }
        RepKind::Rank4 { gens, sym_cube_of } => {
            let m = match sym_cube_of {
                Some(g2) => sym_cube(&evaluate2(g2, w)),
                None => {
                    let mut m = Matrix4::identity();
                    for &l in w.letters() {
                        m *= letter_matrix4(gens, l);
                    }
                    m
                }
            };
            DMatrix::from_iterator(4, 4, m.iter().cloned())
        }
    }
}

pub fn evaluate4(rep: &SurfaceRep, w: &Word) -> Result<Matrix4<f64>> {
    match &rep.kind {
        RepKind::Rank4 { gens, sym_cube_of } => Ok(match sym_cube_of {
            Some(g2) => sym_cube(&evaluate2(g2, w)),
            None => {
                let mut m = Matrix4::identity();
                for &l in w.letters() {
                    m *= letter_matrix4(gens, l);
                }
                m
            }
        }),
        RepKind::Rank2(_) => Err(GeomError::Precondition(
            "rank-4 representation required".into(),
        )),
    }
}

/// The separating curve [a1, b1] used for bending.
pub fn separating_curve() -> Word {
    let a1 = Word::generator(0, false);
    let b1 = Word::generator(1, false);
    a1.concat(&b1).concat(&a1.inverse()).concat(&b1.inverse())
}

fn relator_words() -> (Word, Word) {
    let a1 = Word::generator(0, false);
    let b1 = Word::generator(1, false);
    let a2 = Word::generator(2, false);
    let b2 = Word::generator(3, false);
    let comm = |x: &Word, y: &Word| x.concat(y).concat(&x.inverse()).concat(&y.inverse());
    (comm(&a1, &b1), comm(&a2, &b2))
}

fn relator_residual_of(rep: &SurfaceRep) -> f64 {
    let (c1, c2) = relator_words();
    let k1 = evaluate(rep, &c1);
    let k2 = evaluate(rep, &c2);
    let n = k1.nrows();
    let prod = &k1 * &k2;
    let id = DMatrix::<f64>::identity(n, n);
    let res = (&prod - &id).norm().min((&prod + &id).norm());
    res / (k1.norm() * k2.norm()).max(1.0)
}

/// Discrete faithful SL(2,R) representation of the genus-2 surface group
/// from the regular hyperbolic octagon with vertex angle pi/4. The octagon
/// side-pairing translations are the rotated copies
/// `g_k = r(k pi/4) T r(-k pi/4)` of one hyperbolic translation T through the
/// base point with trace 2(1 + sqrt 2); the standard generators are words in
/// the g_k chosen so that [a1,b1][a2,b2] reduces to the octagon relation in
/// the free group:
///   a1 = g0, b1 = g1^-1, a2 = g1^-1 g0 g2, b2 = g3^-1 g2.
pub fn fuchsian_octagon_rep() -> SurfaceRep {
    let cosh = 1.0 + 2.0_f64.sqrt();
    let sinh = (cosh * cosh - 1.0).sqrt();
    let t = Matrix2::new(cosh, sinh, sinh, cosh);
    let rot = |phi: f64| {
        let (s, c) = (phi / 2.0).sin_cos();
        Matrix2::new(c, s, -s, c)
    };
    let g: Vec<Matrix2<f64>> = (0..4)
        .map(|k| {
            let r = rot(k as f64 * std::f64::consts::FRAC_PI_4);
            r * t * r.transpose()
        })
        .collect();
    let inv = |m: &Matrix2<f64>| Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]);
    let a1 = g[0];
    let b1 = inv(&g[1]);
    let a2 = inv(&g[1]) * g[0] * g[2];
    let b2 = inv(&g[3]) * g[2];
    let mut rep = SurfaceRep {
        kind: RepKind::Rank2([a1, b1, a2, b2]),
        relator_residual: 0.0,
    };
    rep.relator_residual = relator_residual_of(&rep);
    rep
}

/// Symmetric-cube lift of a rank-2 representation to SL(4,R).
pub fn lift_principal(rep2: &SurfaceRep) -> Result<SurfaceRep> {
    let g2 = match &rep2.kind {
        RepKind::Rank2(g) => *g,
        RepKind::Rank4 { .. } => {
            return Err(GeomError::Precondition(
                "lift_principal expects a rank-2 representation".into(),
            ))
        }
    };
    let gens = [
        sym_cube(&g2[0]),
        sym_cube(&g2[1]),
        sym_cube(&g2[2]),
        sym_cube(&g2[3]),
    ];
    let mut rep = SurfaceRep {
        kind: RepKind::Rank4 {
            gens,
            sym_cube_of: Some(g2),
        },
        relator_residual: 0.0,
    };
    rep.relator_residual = relator_residual_of(&rep);
    Ok(rep)
}

/// Bending deformation along the separating curve [a1, b1]: a1, b1 are kept
/// and a2, b2 are conjugated by c = exp(eps * diag(direction)) taken in the
/// eigenbasis of rho([a1,b1]). Because c commutes with rho([a1,b1]) the
/// relator is preserved. The direction lives in the Cartan algebra, so its
/// components must sum to zero.
pub fn bend(
    rep4: &SurfaceRep,
    curve: &Word,
    direction: &[f64; 4],
    eps: f64,
    tau_gap: f64,
    tau_eig: f64,
) -> Result<SurfaceRep> {
    let gens = match &rep4.kind {
        RepKind::Rank4 { gens, .. } => *gens,
        RepKind::Rank2(_) => {
            return Err(GeomError::Precondition(
                "bend expects a rank-4 representation".into(),
            ))
        }
    };
    if curve != &separating_curve() {
        return Err(GeomError::Precondition(
            "bending is supported along the separating curve [a1,b1] only".into(),
        ));
    }
    let sum: f64 = direction.iter().sum();
    if sum.abs() > 1e-12 {
        return Err(GeomError::BadDirection(format!(
            "direction components sum to {sum:.3e}, need 0"
        )));
    }
    if eps == 0.0 {
        let mut rep = SurfaceRep {
            kind: RepKind::Rank4 {
                gens,
                sym_cube_of: rep4.gens2().copied(),
            },
            relator_residual: 0.0,
        };
        rep.relator_residual = relator_residual_of(&rep);
        return Ok(rep);
    }
    let curve_mat = evaluate4(rep4, curve)?;
    let split = eigen_real(
        &DMatrix::from_iterator(4, 4, curve_mat.iter().cloned()),
        tau_gap,
        tau_eig,
    )?;
    let mut v = Matrix4::zeros();
    for (j, col) in split.eigenvectors.iter().enumerate() {
        for i in 0..4 {
            v[(i, j)] = col[i];
        }
    }
    let vinv = v
        .try_inverse()
        .ok_or_else(|| GeomError::NotLoxodromic("eigenbasis is singular".into()))?;
    let mut exp_d = Matrix4::zeros();
    for i in 0..4 {
        exp_d[(i, i)] = (eps * direction[i]).exp();
    }
    let c = v * exp_d * vinv;
    let cinv = v
        * Matrix4::from_diagonal(&nalgebra::Vector4::new(
            (-eps * direction[0]).exp(),
            (-eps * direction[1]).exp(),
            (-eps * direction[2]).exp(),
            (-eps * direction[3]).exp(),
        ))
        * vinv;
    let bent = [gens[0], gens[1], c * gens[2] * cinv, c * gens[3] * cinv];
    let mut rep = SurfaceRep {
        kind: RepKind::Rank4 {
            gens: bent,
            sym_cube_of: None,
        },
        relator_residual: 0.0,
    };
    rep.relator_residual = relator_residual_of(&rep);
    Ok(rep)
}

/// On-disk representation format shared by all CLI commands.
#[derive(Debug, Serialize, Deserialize)]
pub struct RepFile {
    pub rank: usize,
    /// row-major generator matrices for a1, b1, a2, b2
    pub generators: Vec<Vec<f64>>,
    pub meta: RepMeta,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct RepMeta {
    #[serde(default)]
    pub kind: String,
    #[serde(default)]
    pub relator_residual: f64,
    /// present when the rank-4 generators are symmetric cubes of these 2x2 matrices
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sym_cube_of: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bend: Option<BendMeta>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BendMeta {
    pub eps: f64,
    pub direction: [f64; 4],
}

pub fn save_rep(rep: &SurfaceRep, kind: &str, bend_meta: Option<BendMeta>, path: &Path) -> Result<()> {
    let (rank, generators, sym_of) = match &rep.kind {
        RepKind::Rank2(g) => (
            2,
            g.iter().map(|m| row_major2(m)).collect::<Vec<_>>(),
            None,
        ),
        RepKind::Rank4 { gens, sym_cube_of } => (
            4,
            gens.iter().map(|m| row_major4(m)).collect::<Vec<_>>(),
            sym_cube_of
                .as_ref()
                .map(|g2| g2.iter().map(|m| row_major2(m)).collect::<Vec<_>>()),
        ),
    };
    let file = RepFile {
        rank,
        generators,
        meta: RepMeta {
            kind: kind.to_string(),
            relator_residual: rep.relator_residual,
            sym_cube_of: sym_of,
            bend: bend_meta,
        },
    };
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_rep(path: &Path) -> Result<SurfaceRep> {
    let data = std::fs::read_to_string(path)?;
    let file: RepFile = serde_json::from_str(&data)?;
    let kind = match file.rank {
        2 => {
            let g = parse_gens2(&file.generators)?;
            RepKind::Rank2(g)
        }
        4 => {
            let mut gens = [Matrix4::zeros(); 4];
            if file.generators.len() != 4 {
                return Err(GeomError::Precondition("need 4 generators".into()));
            }
            for (k, rows) in file.generators.iter().enumerate() {
                if rows.len() != 16 {
                    return Err(GeomError::Precondition(
                        "rank-4 generators need 16 entries".into(),
                    ));
                }
                for i in 0..4 {
                    for j in 0..4 {
                        gens[k][(i, j)] = rows[4 * i + j];
                    }
                }
            }
            let sym_cube_of = match &file.meta.sym_cube_of {
                Some(g2) => Some(parse_gens2(g2)?),
                None => None,
            };
            RepKind::Rank4 { gens, sym_cube_of }
        }
        r => {
            return Err(GeomError::Precondition(format!(
                "unsupported rank {r} in representation file"
            )))
        }
    };
    let mut rep = SurfaceRep {
        kind,
        relator_residual: 0.0,
    };
    rep.relator_residual = relator_residual_of(&rep);
    Ok(rep)
}

fn parse_gens2(flat: &[Vec<f64>]) -> Result<[Matrix2<f64>; 4]> {
    if flat.len() != 4 {
        return Err(GeomError::Precondition("need 4 generators".into()));
    }
    let mut g = [Matrix2::zeros(); 4];
    for (k, rows) in flat.iter().enumerate() {
        if rows.len() != 4 {
            return Err(GeomError::Precondition(
                "rank-2 generators need 4 entries".into(),
            ));
        }
        g[k] = Matrix2::new(rows[0], rows[1], rows[2], rows[3]);
    }
    Ok(g)
}

fn row_major2(m: &Matrix2<f64>) -> Vec<f64> {
    vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

fn row_major4(m: &Matrix4<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            v.push(m[(i, j)]);
        }
    }
    v
}
