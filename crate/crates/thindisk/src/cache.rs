//! Binary dumps of kernel tables, so that large grids are tabulated once.
//!
//! Layout, all little-endian: magic `TDKC`, version `u32`, coordinate tag `u8`
//! (0 Cartesian, 1 polar), three azimuthal form bytes (polar only, else zero),
//! table count `u32`, `N` as `u64`, `M` and `β₀` as `f64`, then every table in
//! row-major order.

use ndarray::Array2;

use crate::cartesian_kernels::KernelTables;
use crate::error::{Error, Result};
use crate::grid::{CartesianGrid, PolarGrid};
use crate::polar_kernels::{AzimuthalForm, PolarKernelTables};

const MAGIC: &[u8; 4] = b"TDKC";
const VERSION: u32 = 1;

#[derive(Debug)]
pub enum CachedTables {
    Cartesian(KernelTables),
    Polar(PolarKernelTables),
}

fn form_byte(f: AzimuthalForm) -> u8 {
    match f {
        AzimuthalForm::Derived => 0,
        AzimuthalForm::Printed => 1,
    }
}

fn push_header(out: &mut Vec<u8>, tag: u8, forms: [u8; 3], count: u32, n: usize, m: f64, beta0: f64) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(tag);
    out.extend_from_slice(&forms);
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&m.to_le_bytes());
    out.extend_from_slice(&beta0.to_le_bytes());
}

fn push_tables(out: &mut Vec<u8>, tables: &[Array2<f64>]) {
    for t in tables {
        for v in t.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
}

pub fn encode_cartesian(tables: &KernelTables) -> Vec<u8> {
    let g = tables.grid();
    let raw = tables.raw();
    let mut out = Vec::with_capacity(40 + raw.len() * raw[0].len() * 8);
    push_header(&mut out, 0, [0; 3], raw.len() as u32, g.n(), g.half_width(), 0.0);
    push_tables(&mut out, raw);
    out
}

pub fn encode_polar(tables: &PolarKernelTables) -> Vec<u8> {
    let g = tables.grid();
    let (regular, hole) = tables.raw();
    let forms = tables.azimuthal_forms().map(form_byte);
    let mut out = Vec::new();
    push_header(&mut out, 1, forms, (regular.len() + hole.len()) as u32, g.n(), g.outer_radius(), g.beta0());
    push_tables(&mut out, regular);
    push_tables(&mut out, hole);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8]> {
        let end = self.pos + k;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format(format!("kernel cache truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn table(&mut self, rows: usize, cols: usize) -> Result<Array2<f64>> {
        let data = (0..rows * cols).map(|_| self.f64()).collect::<Result<Vec<_>>>()?;
        Ok(Array2::from_shape_vec((rows, cols), data).expect("shape"))
    }
}

pub fn decode(bytes: &[u8]) -> Result<CachedTables> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("not a kernel cache file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported kernel cache version {version}")));
    }
    let tag = r.take(1)?[0];
    let forms_raw: [u8; 3] = r.take(3)?.try_into().expect("3 bytes");
    let count = r.u32()? as usize;
    let n = usize::try_from(r.u64()?).map_err(|_| Error::Format("grid size overflows".into()))?;
    let m = r.f64()?;
    let beta0 = r.f64()?;
    let cached = match tag {
        0 => {
            let grid = CartesianGrid::new(m, n)?;
            if count != 6 {
                return Err(Error::Format(format!("expected 6 Cartesian tables, found {count}")));
            }
            let tables = (0..count).map(|_| r.table(2 * n, 2 * n)).collect::<Result<Vec<_>>>()?;
            CachedTables::Cartesian(KernelTables::from_raw(grid, tables)?)
        }
        1 => {
            let grid = PolarGrid::new(m, n, beta0)?;
            if count != 12 {
                return Err(Error::Format(format!("expected 12 polar tables, found {count}")));
            }
            let mut forms = [AzimuthalForm::Derived; 3];
            for (f, b) in forms.iter_mut().zip(forms_raw) {
                *f = match b {
                    0 => AzimuthalForm::Derived,
                    1 => AzimuthalForm::Printed,
                    _ => return Err(Error::Format(format!("unknown azimuthal form byte {b}"))),
                };
            }
            let regular = (0..6).map(|_| r.table(2 * n, n)).collect::<Result<Vec<_>>>()?;
            let hole = (0..6).map(|_| r.table(n, n)).collect::<Result<Vec<_>>>()?;
            CachedTables::Polar(PolarKernelTables::from_raw(grid, forms, regular, hole)?)
        }
        t => return Err(Error::Format(format!("unknown coordinate tag {t}"))),
    };
    if r.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after kernel tables".into()));
    }
    Ok(cached)
}
