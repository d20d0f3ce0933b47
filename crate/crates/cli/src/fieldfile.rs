//! The `EBF1` text format for node-sampled fields on a sphere grid.
//!
//! ```text
//! EBF1 n=<n> domain=sphere nt=<n_theta> np=<n_phi>
//! <2n² numbers: Re, Im of each entry, row-major>   (one line per node, row-major (b, a))
//! ```
//!
//! Numbers carry 17 significant digits, so a write/read round trip
//! reproduces every `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use eigenbundle::linalg::c;
use eigenbundle::{CMatrix, MatrixField, Point, SphereGrid};

use crate::error::CliError;
use crate::report::write_atomically;

pub const MAGIC: &str = "EBF1";

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub n: usize,
    pub grid: SphereGrid,
    /// One matrix per grid node, in node-index order.
    pub samples: Vec<CMatrix>,
}

impl FieldFile {
    /// Evaluate a sphere field at every node of `grid`.
    pub fn sample(field: &MatrixField, grid: &SphereGrid) -> eigenbundle::Result<Self> {
        let samples = (0..grid.node_count())
            .map(|k| field.eval(&Point::Sphere(grid.node(k))).map_err(|e| eigenbundle::Error::AtNode { node: k, source: Box::new(e) }))
            .collect::<eigenbundle::Result<Vec<_>>>()?;
        Ok(Self { n: field.dim(), grid: grid.clone(), samples })
    }

    pub fn render(&self) -> String {
        let mut out = format!("{MAGIC} n={} domain=sphere nt={} np={}\n", self.n, self.grid.n_theta(), self.grid.n_phi());
        for m in &self.samples {
            let mut first = true;
            for i in 0..self.n {
                for j in 0..self.n {
                    let z = m[(i, j)];
                    for x in [z.re, z.im] {
                        if !first {
                            out.push(' ');
                        }
                        first = false;
                        let _ = write!(out, "{x:.16e}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let fail = |line: usize, message: String| CliError::FieldFile { path: path.to_path_buf(), line, message };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| fail(1, "empty file".into()))?;
        let mut words = header.split_whitespace();
        if words.next() != Some(MAGIC) {
            return Err(fail(1, format!("expected header starting with {MAGIC}")));
        }
        let (mut n, mut nt, mut np, mut domain) = (None, None, None, None);
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| fail(1, format!("malformed header field '{w}'")))?;
            let num = || v.parse::<usize>().map_err(|_| fail(1, format!("'{k}' must be a positive integer")));
            match k {
                "n" => n = Some(num()?),
                "nt" => nt = Some(num()?),
                "np" => np = Some(num()?),
                "domain" => domain = Some(v),
                _ => return Err(fail(1, format!("unknown header field '{k}'"))),
            }
        }
        if domain != Some("sphere") {
            return Err(fail(1, "only domain=sphere is supported".into()));
        }
        let (n, nt, np) = match (n, nt, np) {
            (Some(n), Some(nt), Some(np)) if n > 0 => (n, nt, np),
            _ => return Err(fail(1, "header needs n, nt and np".into())),
        };
        let grid = SphereGrid::new(nt, np).map_err(|e| fail(1, e.to_string()))?;
        let mut samples = Vec::with_capacity(grid.node_count());
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let xs = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| fail(lineno, format!("not a number: '{t}'"))))
                .collect::<Result<Vec<_>, _>>()?;
            if xs.len() != 2 * n * n {
                return Err(fail(lineno, format!("expected {} numbers, found {}", 2 * n * n, xs.len())));
            }
            samples.push(CMatrix::from_fn(n, n, |r, col| {
                let k = 2 * (r * n + col);
                c(xs[k], xs[k + 1])
            }));
        }
        if samples.len() != grid.node_count() {
            return Err(fail(
                samples.len() + 1,
                format!("expected {} node lines, found {}", grid.node_count(), samples.len()),
            ));
        }
        Ok(Self { n, grid, samples })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomically(path, self.render().as_bytes())
    }

    /// The piecewise-constant field that returns the nearest node's sample.
    pub fn into_field(self, label: impl Into<String>) -> eigenbundle::Result<MatrixField> {
        MatrixField::sampled(self.grid, self.samples, label)
    }
}
