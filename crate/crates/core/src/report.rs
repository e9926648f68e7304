//! Deterministic CSV and SVG emission. Every CSV starts with a comment line
//! carrying the config hash, then a header row; floats print in shortest
//! round-trip form so identical runs are byte-identical.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::projlin::PlanarPoint;

pub struct CsvWriter {
    buf: Vec<u8>,
}

impl CsvWriter {
    pub fn new(config_hash: u64, columns: &[&str]) -> Self {
        let mut buf = Vec::new();
        writeln!(buf, "# config_hash={config_hash:016x}").unwrap();
        writeln!(buf, "{}", columns.join(",")).unwrap();
        Self { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        writeln!(self.buf, "{}", fields.join(",")).unwrap();
    }

    pub fn write(self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.buf)?;
        Ok(())
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

/// Minimal SVG plot: polylines and marked points in a fixed viewport.
pub struct SvgPlot {
    width: f64,
    height: f64,
    margin: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    body: String,
}

impl SvgPlot {
    pub fn new(points: &[PlanarPoint]) -> Self {
        let mut xmin = f64::INFINITY;
        let mut xmax = f64::NEG_INFINITY;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for p in points {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymin = ymin.min(p[1]);
            ymax = ymax.max(p[1]);
        }
        if !xmin.is_finite() {
            xmin = -1.0;
            xmax = 1.0;
            ymin = -1.0;
            ymax = 1.0;
        }
        let pad_x = 0.05 * (xmax - xmin).max(1e-9);
        let pad_y = 0.05 * (ymax - ymin).max(1e-9);
        Self {
            width: 640.0,
            height: 640.0,
            margin: 20.0,
            xmin: xmin - pad_x,
            xmax: xmax + pad_x,
            ymin: ymin - pad_y,
            ymax: ymax + pad_y,
            body: String::new(),
        }
    }

    fn map(&self, p: &PlanarPoint) -> (f64, f64) {
        let sx = (self.width - 2.0 * self.margin) / (self.xmax - self.xmin);
        let sy = (self.height - 2.0 * self.margin) / (self.ymax - self.ymin);
        let s = sx.min(sy);
        (
            self.margin + (p[0] - self.xmin) * s,
            self.height - self.margin - (p[1] - self.ymin) * s,
        )
    }

    pub fn polyline(&mut self, points: &[PlanarPoint], color: &str, close: bool) {
        let mut d = String::new();
        for (i, p) in points.iter().enumerate() {
            let (x, y) = self.map(p);
            if i == 0 {
                d.push_str(&format!("M {x:.3} {y:.3} "));
            } else {
                d.push_str(&format!("L {x:.3} {y:.3} "));
            }
        }
        if close {
            d.push('Z');
        }
        self.body.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n"
        ));
    }

    pub fn points(&mut self, points: &[PlanarPoint], color: &str, radius: f64) {
        for p in points {
            let (x, y) = self.map(p);
            self.body.push_str(&format!(
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{radius}\" fill=\"{color}\"/>\n"
            ));
        }
    }

    pub fn caption(&mut self, text: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            self.margin,
            self.height - 4.0,
            text
        ));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let doc = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        );
        std::fs::write(path, doc)?;
        Ok(())
    }
}
