//! Plain-text grid files.
//!
//! ```text
//! thindisk v1
//! cart N M            (or: polar N M beta0)
//! N lines of N comma-separated values; line j holds i = 0..N-1
//! hole                (polar only, optional) followed by one line of N values
//! slopes              (optional) followed by two more blocks of N lines
//!                     and, after a hole block, two more ring lines
//! ```
//!
//! Values are written with 17 significant digits so that they read back exactly.

use std::fmt::Write as _;

use ndarray::{Array1, Array2};

use crate::density::{DensityField, FieldGrid, HoleRing, SlopeSource};
use crate::error::{Error, Result};
use crate::grid::{CartesianGrid, PolarGrid};

pub const MAGIC: &str = "thindisk v1";

#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub grid: FieldGrid,
    pub values: Array2<f64>,
    pub hole: Option<Array1<f64>>,
    pub slopes: Option<[Array2<f64>; 2]>,
    pub hole_slopes: Option<[Array1<f64>; 2]>,
}

fn format_error(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

impl GridFile {
    /// A single array on a grid, e.g. one force component.
    pub fn from_array(grid: FieldGrid, values: Array2<f64>) -> Self {
        Self { grid, values, hole: None, slopes: None, hole_slopes: None }
    }

    pub fn from_density(field: &DensityField, with_slopes: bool) -> Self {
        let (a, b) = field.slopes();
        Self {
            grid: field.grid().clone(),
            values: field.values().clone(),
            hole: field.hole().map(|h| h.values.clone()),
            slopes: with_slopes.then(|| [a.clone(), b.clone()]),
            hole_slopes: field
                .hole()
                .filter(|_| with_slopes)
                .map(|h| [h.radial_slopes.clone(), h.angular_slopes.clone()]),
        }
    }

    /// Density field from the file; missing slopes are differenced.
    pub fn into_density(self) -> Result<DensityField> {
        match (&self.grid, self.slopes) {
            (FieldGrid::Cartesian(g), None) => DensityField::from_cartesian_values(g, self.values),
            (FieldGrid::Polar(g), None) => {
                let hole = self.hole.ok_or_else(|| format_error("polar density needs a hole block"))?;
                DensityField::from_polar_values(g, self.values, hole)
            }
            (grid, Some(slopes)) => {
                let hole = match grid {
                    FieldGrid::Cartesian(_) => None,
                    FieldGrid::Polar(_) => {
                        let values = self.hole.ok_or_else(|| format_error("polar density needs a hole block"))?;
                        let [dr, dt] = self.hole_slopes.ok_or_else(|| format_error("missing hole slopes"))?;
                        Some(HoleRing { values, radial_slopes: dr, angular_slopes: dt })
                    }
                };
                DensityField::from_parts(self.grid, self.values, slopes, hole, SlopeSource::Analytic)
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        match &self.grid {
            FieldGrid::Cartesian(g) => {
                let _ = writeln!(s, "cart {} {}", g.n(), num(g.half_width()));
            }
            FieldGrid::Polar(g) => {
                let _ = writeln!(s, "polar {} {} {}", g.n(), num(g.outer_radius()), num(g.beta0()));
            }
        }
        write_block(&mut s, &self.values);
        if let Some(h) = &self.hole {
            let _ = writeln!(s, "hole");
            write_line(&mut s, h.iter());
        }
        if let Some([a, b]) = &self.slopes {
            let _ = writeln!(s, "slopes");
            write_block(&mut s, a);
            write_block(&mut s, b);
            if let Some([p, q]) = &self.hole_slopes {
                let _ = writeln!(s, "hole");
                write_line(&mut s, p.iter());
                write_line(&mut s, q.iter());
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate();
        let mut next = |what: &str| {
            lines
                .next()
                .map(|(k, l)| (k + 1, l))
                .ok_or_else(|| format_error(format!("unexpected end of file, expected {what}")))
        };
        let (_, magic) = next("header")?;
        if magic != MAGIC {
            return Err(format_error(format!("bad header line {magic:?}, expected {MAGIC:?}")));
        }
        let (ln, geometry) = next("grid line")?;
        let words: Vec<&str> = geometry.split_whitespace().collect();
        let parse_n = |w: &str| w.parse::<usize>().map_err(|_| format_error(format!("line {ln}: bad N {w:?}")));
        let parse_f = |w: &str| w.parse::<f64>().map_err(|_| format_error(format!("line {ln}: bad number {w:?}")));
        let grid = match words.as_slice() {
            ["cart", n, m] => FieldGrid::Cartesian(CartesianGrid::new(parse_f(m)?, parse_n(n)?)?),
            ["polar", n, m, b] => FieldGrid::Polar(PolarGrid::new(parse_f(m)?, parse_n(n)?, parse_f(b)?)?),
            _ => return Err(format_error(format!("line {ln}: expected `cart N M` or `polar N M beta0`"))),
        };
        let n = grid.n();
        let polar = matches!(grid, FieldGrid::Polar(_));
        let body: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .skip(2)
            .collect();
        let mut cursor = Cursor { lines: &body, pos: 0, n };
        let values = cursor.block()?;
        let mut hole = None;
        let mut slopes = None;
        let mut hole_slopes = None;
        if polar && cursor.take_sentinel("hole") {
            hole = Some(Array1::from(cursor.line()?));
        }
        if cursor.take_sentinel("slopes") {
            slopes = Some([cursor.block()?, cursor.block()?]);
            if polar && cursor.take_sentinel("hole") {
                hole_slopes = Some([Array1::from(cursor.line()?), Array1::from(cursor.line()?)]);
            }
        }
        if let Some((ln, l)) = cursor.lines.get(cursor.pos) {
            return Err(format_error(format!("line {ln}: unexpected content {l:?}")));
        }
        Ok(Self { grid, values, hole, slopes, hole_slopes })
    }
}

struct Cursor<'a> {
    lines: &'a [(usize, &'a str)],
    pos: usize,
    n: usize,
}

impl Cursor<'_> {
    fn take_sentinel(&mut self, word: &str) -> bool {
        if self.lines.get(self.pos).map(|l| l.1) == Some(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn line(&mut self) -> Result<Vec<f64>> {
        let (ln, l) = *self
            .lines
            .get(self.pos)
            .ok_or_else(|| format_error("unexpected end of file inside a value block"))?;
        self.pos += 1;
        let v = l
            .split(',')
            .map(|w| w.trim().parse::<f64>().map_err(|_| format_error(format!("line {ln}: bad value {w:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != self.n {
            return Err(format_error(format!("line {ln}: expected {} values, got {}", self.n, v.len())));
        }
        Ok(v)
    }

    fn block(&mut self) -> Result<Array2<f64>> {
        let n = self.n;
        let mut a = Array2::zeros((n, n));
        for j in 0..n {
            for (i, v) in self.line()?.into_iter().enumerate() {
                a[[i, j]] = v;
            }
        }
        Ok(a)
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_line<'a>(s: &mut String, values: impl Iterator<Item = &'a f64>) {
    let cells: Vec<String> = values.map(|&v| num(v)).collect();
    let _ = writeln!(s, "{}", cells.join(","));
}

fn write_block(s: &mut String, a: &Array2<f64>) {
    for j in 0..a.ncols() {
        write_line(s, a.column(j).iter());
    }
}
