//! Text, CSV and binary formats for index sets, nodes, grids and coefficients.
//!
//! Floating point values are written with Rust's shortest round-trip
//! formatting, so every file output reads back bit-exactly.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::mindex::{build_index_set, MultiIndexSet, PNorm};
use crate::nodes::NodeSystem;
use crate::tubes::TubeDecomposition;

/// Magic bytes of the binary coefficient format.
pub const FNT1_MAGIC: &[u8; 4] = b"FNT1";

fn csv_error(err: csv::Error) -> Error {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
            other => Error::Parse(format!("{other:?}")),
        }
    } else {
        Error::Parse(err.to_string())
    }
}

fn p_label(p: Option<PNorm>) -> String {
    p.map_or_else(|| "-".to_string(), |p| p.to_string())
}

/// Writes the header `m n p` followed by one space-separated index per line.
///
/// Sets built from arbitrary indices carry no `p` and write `-` instead.
pub fn write_index_set<W: Write>(mut out: W, set: &MultiIndexSet) -> Result<()> {
    writeln!(out, "{} {} {}", set.m(), set.n(), p_label(set.p()))?;
    let mut line = String::new();
    for alpha in set.iter() {
        line.clear();
        for (i, a) in alpha.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&a.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parses the format of [`write_index_set`].
///
/// When the header names a `p`, the listed indices must coincide with
/// `A_{m,n,p}` and the returned set carries that `p`.
pub fn read_index_set<R: BufRead>(input: R) -> Result<MultiIndexSet> {
    let mut lines = input.lines();
    let header = loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::Parse("empty index set file".into())),
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [m, n, p] = fields[..] else {
        return Err(Error::Parse(format!("expected header `m n p`, got `{header}`")));
    };
    let m: usize = m.parse().map_err(|_| Error::Parse(format!("invalid m `{m}`")))?;
    let n: u32 = n.parse().map_err(|_| Error::Parse(format!("invalid n `{n}`")))?;
    let p = match p {
        "-" => None,
        other => Some(other.parse::<PNorm>()?),
    };
    let mut indices = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let alpha = line
            .split_whitespace()
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", k + 2)))?;
        indices.push(alpha);
    }
    let set = MultiIndexSet::from_indices(m, &indices)?;
    match p {
        None => Ok(set),
        Some(p) => {
            let expected = build_index_set(m, n as i64, p)?;
            if expected.as_flat() != set.as_flat() {
                return Err(Error::Parse(format!(
                    "listed indices do not form A_{{{m},{n},{p}}}"
                )));
            }
            Ok(expected)
        }
    }
}

/// One CSV row per tube projection (`T1`, `T2`, ...) and a final `entropy` row.
///
/// Rows differ in length; the first field is the label.
pub fn write_tubes_csv<W: Write>(out: W, tubes: &TubeDecomposition) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    for (axis, t) in tubes.projections().iter().enumerate() {
        let mut row = vec![format!("T{}", axis + 1)];
        row.extend(t.iter().map(usize::to_string));
        w.write_record(&row).map_err(csv_error)?;
    }
    let mut row = vec!["entropy".to_string()];
    row.extend(tubes.entropy().iter().map(usize::to_string));
    w.write_record(&row).map_err(csv_error)?;
    w.flush()?;
    Ok(())
}

/// A single `value` column.
pub fn write_values_csv<W: Write>(out: W, header: &str, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([header]).map_err(csv_error)?;
    for v in values {
        w.write_record([v.to_string()]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_nodes_csv<W: Write>(out: W, nodes: &NodeSystem) -> Result<()> {
    write_values_csv(out, "node", nodes.points())
}

/// Flat row-major points, one row per point with columns `x1..xm`.
pub fn write_points_csv<W: Write>(out: W, m: usize, points: &[f64]) -> Result<()> {
    if m == 0 || points.len() % m != 0 {
        return Err(Error::LengthMismatch {
            expected: m * points.len().div_ceil(m.max(1)),
            actual: points.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record((1..=m).map(|i| format!("x{i}"))).map_err(csv_error)?;
    for row in points.chunks(m) {
        w.write_record(row.iter().map(f64::to_string)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// The grid of a set, row `i` holding the point of index `i`.
pub fn write_grid_csv<W: Write>(out: W, set: &MultiIndexSet, grid: &[f64]) -> Result<()> {
    if grid.len() != set.len() * set.m() {
        return Err(Error::LengthMismatch {
            expected: set.len() * set.m(),
            actual: grid.len(),
        });
    }
    write_points_csv(out, set.m(), grid)
}

/// Index tuple and coefficient per row, header `a1..am,value`.
pub fn write_coefficients_csv<W: Write>(out: W, set: &MultiIndexSet, coeffs: &[f64]) -> Result<()> {
    if coeffs.len() != set.len() {
        return Err(Error::LengthMismatch {
            expected: set.len(),
            actual: coeffs.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=set.m()).map(|i| format!("a{i}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(csv_error)?;
    let mut row = Vec::with_capacity(set.m() + 1);
    for (alpha, c) in set.iter().zip(coeffs) {
        row.clear();
        row.extend(alpha.iter().map(u32::to_string));
        row.push(c.to_string());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(field: &str, line: u64) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: invalid number `{field}`")))
}

/// Reads numeric CSV rows of a fixed width, skipping a non-numeric header row.
///
/// Returns the values flattened row by row.
pub fn read_numeric_csv<R: Read>(input: R, width: Option<usize>) -> Result<(usize, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut values = Vec::new();
    let mut cols = width;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            if let Some(w) = cols {
                if record.len() != w {
                    return Err(Error::Parse(format!(
                        "header has {} columns, expected {w}",
                        record.len()
                    )));
                }
            } else {
                cols = Some(record.len());
            }
            continue;
        }
        let w = *cols.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Parse(format!(
                "line {line}: expected {w} columns, got {}",
                record.len()
            )));
        }
        for field in record.iter() {
            values.push(parse_f64(field, line)?);
        }
    }
    Ok((cols.unwrap_or(width.unwrap_or(0)), values))
}

/// Reads a single-column CSV of values, such as samples aligned with a grid.
pub fn read_values_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    Ok(read_numeric_csv(input, Some(1))?.1)
}

/// Reads points with `m` columns, flattened row-major.
pub fn read_points_csv<R: Read>(input: R, m: usize) -> Result<Vec<f64>> {
    Ok(read_numeric_csv(input, Some(m))?.1)
}

/// Reads the output of [`write_coefficients_csv`] as indices and values.
pub fn read_coefficients_csv<R: Read>(input: R) -> Result<(Vec<Vec<u32>>, Vec<f64>)> {
    let (cols, flat) = read_numeric_csv(input, None)?;
    if cols < 2 {
        return Err(Error::Parse("coefficient CSV needs index columns and a value".into()));
    }
    let mut indices = Vec::with_capacity(flat.len() / cols);
    let mut values = Vec::with_capacity(flat.len() / cols);
    for row in flat.chunks(cols) {
        let alpha = row[..cols - 1]
            .iter()
            .map(|&a| {
                if a >= 0.0 && a.fract() == 0.0 && a <= u32::MAX as f64 {
                    Ok(a as u32)
                } else {
                    Err(Error::Parse(format!("invalid multi-index entry {a}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        indices.push(alpha);
        values.push(row[cols - 1]);
    }
    Ok((indices, values))
}

/// Reorders CSV coefficients onto the positions of `set`.
///
/// Indices absent from the file are an error; so are indices outside `set`.
pub fn align_coefficients(set: &MultiIndexSet, indices: &[Vec<u32>], values: &[f64]) -> Result<Vec<f64>> {
    if indices.len() != set.len() {
        return Err(Error::LengthMismatch {
            expected: set.len(),
            actual: indices.len(),
        });
    }
    let mut out = vec![f64::NAN; set.len()];
    let mut seen = vec![false; set.len()];
    for (alpha, &v) in indices.iter().zip(values) {
        let pos = set
            .position(alpha)
            .ok_or_else(|| Error::NotASubset(alpha.clone()))?;
        if std::mem::replace(&mut seen[pos], true) {
            return Err(Error::Parse(format!("duplicate index {alpha:?}")));
        }
        out[pos] = v;
    }
    Ok(out)
}

/// Header and payload of an `FNT1` coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub struct Fnt1 {
    pub m: u32,
    pub n: u32,
    /// `NaN` for sets without a `p`, `+∞` for the box.
    pub p: f64,
    pub coeffs: Vec<f64>,
}

impl Fnt1 {
    pub fn new(set: &MultiIndexSet, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != set.len() {
            return Err(Error::LengthMismatch {
                expected: set.len(),
                actual: coeffs.len(),
            });
        }
        Ok(Fnt1 {
            m: set.m() as u32,
            n: set.n(),
            p: set.p().map_or(f64::NAN, PNorm::value),
            coeffs,
        })
    }

    /// Rebuilds `A_{m,n,p}`; fails for files without a `p`.
    pub fn index_set(&self) -> Result<MultiIndexSet> {
        if self.p.is_nan() {
            return Err(Error::InvalidArgument(
                "FNT1 file carries no p; the index set cannot be rebuilt".into(),
            ));
        }
        let set = build_index_set(self.m as usize, self.n as i64, PNorm::new(self.p)?)?;
        if set.len() != self.coeffs.len() {
            return Err(Error::LengthMismatch {
                expected: set.len(),
                actual: self.coeffs.len(),
            });
        }
        Ok(set)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(FNT1_MAGIC)?;
        out.write_all(&self.m.to_le_bytes())?;
        out.write_all(&self.n.to_le_bytes())?;
        out.write_all(&self.p.to_le_bytes())?;
        out.write_all(&(self.coeffs.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * self.coeffs.len());
        for c in &self.coeffs {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        out.write_all(&buf)?;
        out.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(mut input: R) -> Result<Self> {
        let mut head = [0u8; 28];
        input
            .read_exact(&mut head)
            .map_err(|_| Error::Parse("truncated FNT1 header".into()))?;
        if &head[..4] != FNT1_MAGIC {
            return Err(Error::Parse("missing FNT1 magic".into()));
        }
        let m = u32::from_le_bytes(head[4..8].try_into().unwrap());
        let n = u32::from_le_bytes(head[8..12].try_into().unwrap());
        let p = f64::from_le_bytes(head[12..20].try_into().unwrap());
        let len = u64::from_le_bytes(head[20..28].try_into().unwrap());
        let len = usize::try_from(len).map_err(|_| Error::Parse("FNT1 length overflow".into()))?;
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if body.len() != 8 * len {
            return Err(Error::Parse(format!(
                "FNT1 body holds {} bytes, expected {}",
                body.len(),
                8 * len
            )));
        }
        let coeffs = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Fnt1 { m, n, p, coeffs })
    }
}

/// True if the bytes start with the `FNT1` magic.
pub fn is_fnt1(bytes: &[u8]) -> bool {
    bytes.starts_with(FNT1_MAGIC)
}
