//! CSV readers and writers for every on-disk format.
//!
//! Files may open with `# key=value` comment lines. Readers collect them as
//! metadata; a GridSet file, for instance, carries its step as `# delta=...`.
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back yields bit-identical values.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use projlab_core::additive::GridSet;
use projlab_core::blowup::WeightedPointSet;
use projlab_core::product::ProductLikeSet;
use projlab_core::{DirectionSet, Point, PointSet2D, ScalarSet, Scale};

use crate::error::{LabError, LabResult};

pub type Meta = BTreeMap<String, String>;

/// A parsed CSV file: metadata, header and rows tagged with line numbers.
#[derive(Debug, Clone)]
pub struct Table {
    pub meta: Meta,
    pub header: Vec<String>,
    pub rows: Vec<(u64, Vec<String>)>,
}

pub fn read_table(path: &Path) -> LabResult<Table> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let mut meta = Meta::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let Some(comment) = t.strip_prefix('#') else { break };
        if let Some((k, v)) = comment.split_once('=') {
            let key = k.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(LabError::at_line(path, i as u64 + 1, "malformed metadata line"));
            }
            meta.insert(key.to_string(), v.trim().to_string());
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, &text, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(String::is_empty) {
        return Err(LabError::io(path, "missing CSV header"));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, &text, e))?;
        let line = rec.position().map_or(0, |p| line_of(&text, p.byte()));
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { meta, header, rows })
}

/// 1-based line of the first data line at or after a byte offset. The
/// reader's own line counter skips blank lines, so it is not used.
fn line_of(text: &str, byte: u64) -> u64 {
    let end = (byte as usize).min(text.len());
    let mut line = text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() as u64 + 1;
    for l in text[end..].lines() {
        let t = l.trim();
        if !t.is_empty() && !t.starts_with('#') {
            break;
        }
        line += 1;
    }
    line
}

fn csv_error(path: &Path, text: &str, e: csv::Error) -> LabError {
    match e.position() {
        Some(p) => LabError::at_line(path, line_of(text, p.byte()), e),
        None => LabError::io(path, e),
    }
}

impl Table {
    pub fn expect_header(&self, path: &Path, expected: &[&str]) -> LabResult<()> {
        if self.header.iter().map(String::as_str).eq(expected.iter().copied()) {
            Ok(())
        } else {
            Err(LabError::io(
                path,
                format!("expected header `{}`, found `{}`", expected.join(","), self.header.join(",")),
            ))
        }
    }

    pub fn f64_at(&self, path: &Path, row: usize, col: usize) -> LabResult<f64> {
        let (line, fields) = &self.rows[row];
        let raw = &fields[col];
        match raw.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(LabError::at_line(
                path,
                *line,
                format!("column `{}`: `{raw}` is not a finite number", self.header[col]),
            )),
        }
    }

    pub fn int_at<T: std::str::FromStr>(&self, path: &Path, row: usize, col: usize) -> LabResult<T> {
        let (line, fields) = &self.rows[row];
        let raw = &fields[col];
        raw.parse::<T>().map_err(|_| {
            LabError::at_line(path, *line, format!("column `{}`: `{raw}` is not an integer", self.header[col]))
        })
    }

    fn column_f64(&self, path: &Path, col: usize) -> LabResult<Vec<f64>> {
        (0..self.rows.len()).map(|r| self.f64_at(path, r, col)).collect()
    }

    fn xy(&self, path: &Path) -> LabResult<Vec<Point>> {
        (0..self.rows.len())
            .map(|r| Ok(Point::new(self.f64_at(path, r, 0)?, self.f64_at(path, r, 1)?)))
            .collect()
    }
}

pub fn read_points(path: &Path) -> LabResult<(PointSet2D, Meta)> {
    let t = read_table(path)?;
    t.expect_header(path, &["x", "y"])?;
    Ok((PointSet2D::new(t.xy(path)?)?, t.meta))
}

pub fn read_scalars(path: &Path) -> LabResult<(ScalarSet, Meta)> {
    let t = read_table(path)?;
    t.expect_header(path, &["v"])?;
    Ok((ScalarSet::from_values(t.column_f64(path, 0)?)?, t.meta))
}

pub fn read_directions(path: &Path) -> LabResult<DirectionSet> {
    let t = read_table(path)?;
    t.expect_header(path, &["theta"])?;
    Ok(DirectionSet::from_angles(&t.column_f64(path, 0)?))
}

pub fn read_gridset(path: &Path) -> LabResult<GridSet> {
    let t = read_table(path)?;
    t.expect_header(path, &["k"])?;
    let step = match t.meta.get("delta") {
        Some(raw) => raw
            .parse::<f64>()
            .map_err(|_| LabError::io(path, format!("metadata delta `{raw}` is not a number")))?,
        None => return Err(LabError::io(path, "missing `# delta=` metadata line")),
    };
    let ks = (0..t.rows.len()).map(|r| t.int_at(path, r, 0)).collect::<LabResult<Vec<i64>>>()?;
    Ok(GridSet::new(step, ks)?)
}

pub fn read_pairs(path: &Path) -> LabResult<(Vec<(usize, usize)>, Meta)> {
    let t = read_table(path)?;
    t.expect_header(path, &["a_index", "b_index"])?;
    let pairs = (0..t.rows.len())
        .map(|r| Ok((t.int_at(path, r, 0)?, t.int_at(path, r, 1)?)))
        .collect::<LabResult<Vec<_>>>()?;
    Ok((pairs, t.meta))
}

/// Rows `b,a` grouped by `b` into fibers (base in increasing order).
pub fn read_product_rows(path: &Path) -> LabResult<(ScalarSet, Vec<ScalarSet>, Meta)> {
    let t = read_table(path)?;
    t.expect_header(path, &["b", "a"])?;
    let mut rows = Vec::with_capacity(t.rows.len());
    for r in 0..t.rows.len() {
        rows.push((t.f64_at(path, r, 0)?, t.f64_at(path, r, 1)?));
    }
    if rows.is_empty() {
        return Err(LabError::io(path, "no rows"));
    }
    rows.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let mut base = Vec::new();
    let mut fibers: Vec<Vec<f64>> = Vec::new();
    for (b, a) in rows {
        if base.last() != Some(&b) {
            base.push(b);
            fibers.push(Vec::new());
        }
        fibers.last_mut().expect("pushed above").push(a);
    }
    let fibers = fibers
        .into_iter()
        .map(ScalarSet::from_values)
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ScalarSet::from_values(base)?, fibers, t.meta))
}

pub fn read_product(path: &Path, delta: Scale, s: f64, tau: f64) -> LabResult<ProductLikeSet> {
    let (base, fibers, _) = read_product_rows(path)?;
    Ok(ProductLikeSet::assemble(base, fibers, delta, s, tau)?)
}

pub fn read_weighted(path: &Path) -> LabResult<(WeightedPointSet, Meta)> {
    let t = read_table(path)?;
    t.expect_header(path, &["x", "y", "w"])?;
    let pts = t.xy(path)?;
    let w = t.column_f64(path, 2)?;
    Ok((WeightedPointSet::new(PointSet2D::new(pts)?, w)?, t.meta))
}

pub fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Writes `# key=value` lines, a header and rows.
pub fn write_csv<I>(path: &Path, meta: &[(&str, String)], header: &[&str], rows: I) -> LabResult<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut buf = Vec::new();
    for (k, v) in meta {
        buf.extend_from_slice(format!("# {k}={v}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(|e| LabError::io(path, e))?;
        for row in rows {
            w.write_record(&row).map_err(|e| LabError::io(path, e))?;
        }
        w.flush().map_err(|e| LabError::io(path, e))?;
    }
    fs::write(path, buf).map_err(|e| LabError::io(path, e))
}

pub fn write_points(path: &Path, set: &PointSet2D, meta: &[(&str, String)]) -> LabResult<()> {
    write_csv(path, meta, &["x", "y"], set.iter().map(|p| vec![fmt(p.x), fmt(p.y)]))
}

pub fn write_scalars(path: &Path, set: &ScalarSet, meta: &[(&str, String)]) -> LabResult<()> {
    write_csv(path, meta, &["v"], set.iter().map(|v| vec![fmt(v)]))
}

pub fn write_directions(path: &Path, dirs: &DirectionSet) -> LabResult<()> {
    write_csv(path, &[], &["theta"], dirs.iter().map(|e| vec![fmt(e.theta())]))
}

pub fn write_gridset(path: &Path, set: &GridSet) -> LabResult<()> {
    write_csv(
        path,
        &[("delta", fmt(set.step()))],
        &["k"],
        set.members().iter().map(|k| vec![k.to_string()]),
    )
}

pub fn write_pairs(path: &Path, pairs: &[(usize, usize)], meta: &[(&str, String)]) -> LabResult<()> {
    write_csv(path, meta, &["a_index", "b_index"], pairs.iter().map(|(a, b)| vec![a.to_string(), b.to_string()]))
}

pub fn write_product(path: &Path, set: &ProductLikeSet) -> LabResult<()> {
    let meta = [
        ("delta", fmt(set.delta().value())),
        ("s", fmt(set.s())),
        ("tau", fmt(set.tau())),
    ];
    write_csv(path, &meta, &["b", "a"], set.points().iter().map(|p| vec![fmt(p.y), fmt(p.x)]))
}

pub fn write_weighted(path: &Path, mu: &WeightedPointSet) -> LabResult<()> {
    write_csv(
        path,
        &[],
        &["x", "y", "w"],
        mu.points().iter().zip(mu.weights()).map(|(p, w)| vec![fmt(p.x), fmt(p.y), fmt(*w)]),
    )
}
