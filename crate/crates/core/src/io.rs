//! File formats: matrices as CSV with a one-line `# rows=R cols=C name=NAME`
//! header, summary statistics and nested results as JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RgmError};
use crate::model::{Dimensions, Mask, Matrix, SummaryStatistics};

/// Serde adapter writing a matrix as a list of rows.
pub mod rows {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::model::Matrix;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }

    pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// An empty list yields a `0 x 0` matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix, String> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err("ragged matrix rows".into());
        }
        Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
    }
}

/// Serde adapter writing a boolean mask as rows of 0/1.
pub mod mask_rows {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::model::Mask;

    pub fn serialize<S: Serializer>(m: &Mask, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<u8>> = m.row_iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mask, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged mask rows"));
        }
        if rows.iter().flatten().any(|&v| v > 1) {
            return Err(D::Error::custom("mask entries must be 0 or 1"));
        }
        Ok(Mask::from_fn(rows.len(), ncols, |i, j| rows[i][j] == 1))
    }
}

/// Render a matrix as header-plus-CSV text. Values use 17 significant
/// digits, which round-trips every finite `f64`.
pub fn matrix_to_csv(m: &Matrix, name: &str) -> String {
    let mut out = format!("# rows={} cols={} name={}\n", m.nrows(), m.ncols(), name);
    for row in m.row_iter() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{v:.16e}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

pub fn mask_to_csv(m: &Mask, name: &str) -> String {
    let mut out = format!("# rows={} cols={} name={}\n", m.nrows(), m.ncols(), name);
    for row in m.row_iter() {
        let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parse header-plus-CSV text; returns the matrix and its declared name.
pub fn matrix_from_csv(text: &str, origin: &Path) -> Result<(Matrix, String)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| RgmError::format(origin, "missing header line"))?;
    let body = header
        .strip_prefix("# ")
        .ok_or_else(|| RgmError::format(origin, "header must start with '# '"))?;
    let (mut rows, mut cols, mut name) = (None, None, None);
    for field in body.split_whitespace() {
        match field.split_once('=') {
            Some(("rows", v)) => rows = v.parse::<usize>().ok(),
            Some(("cols", v)) => cols = v.parse::<usize>().ok(),
            Some(("name", v)) => name = Some(v.to_string()),
            _ => return Err(RgmError::format(origin, format!("unexpected header field '{field}'"))),
        }
    }
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => return Err(RgmError::format(origin, "header needs rows= and cols=")),
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        seen += 1;
        let before = data.len();
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| RgmError::format(origin, format!("line {}: cannot parse '{cell}'", i + 2)))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(RgmError::format(
                origin,
                format!("line {}: expected {cols} values, found {}", i + 2, data.len() - before),
            ));
        }
    }
    if seen != rows && !(cols == 0 && seen == 0) {
        return Err(RgmError::format(origin, format!("expected {rows} rows, found {seen}")));
    }
    Ok((Matrix::from_row_slice(rows, cols, &data), name.unwrap_or_default()))
}

pub fn write_matrix(path: &Path, m: &Matrix, name: &str) -> Result<()> {
    fs::write(path, matrix_to_csv(m, name)).map_err(|e| RgmError::io(path, e))
}

pub fn write_mask(path: &Path, m: &Mask, name: &str) -> Result<()> {
    fs::write(path, mask_to_csv(m, name)).map_err(|e| RgmError::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).map_err(|e| RgmError::io(path, e))?;
    Ok(matrix_from_csv(&text, path)?.0)
}

/// Reads a 0/1 matrix; any other value is an error.
pub fn read_mask(path: &Path) -> Result<Mask> {
    let m = read_matrix(path)?;
    if m.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(RgmError::format(path, "mask entries must be 0 or 1"));
    }
    Ok(m.map(|v| v == 1.0))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsFile {
    n: usize,
    p: usize,
    k: usize,
    l: usize,
    #[serde(with = "rows")]
    s_yy: Matrix,
    #[serde(with = "rows")]
    s_yx: Matrix,
    #[serde(with = "rows")]
    s_yu: Matrix,
    #[serde(with = "rows")]
    s_xx: Matrix,
    #[serde(with = "rows")]
    s_xu: Matrix,
    #[serde(with = "rows")]
    s_uu: Matrix,
}

/// A list-of-rows JSON array cannot carry a column count when it has no
/// rows, so blocks are re-shaped from the declared dimensions.
fn reshape(m: Matrix, rows: usize, cols: usize) -> Matrix {
    if m.is_empty() {
        Matrix::zeros(rows, cols)
    } else {
        m
    }
}

pub fn stats_to_json(stats: &SummaryStatistics) -> String {
    let Dimensions { p, k, l, n } = stats.dims;
    let file = StatsFile {
        n,
        p,
        k,
        l,
        s_yy: stats.s_yy.clone(),
        s_yx: stats.s_yx.clone(),
        s_yu: stats.s_yu.clone(),
        s_xx: stats.s_xx.clone(),
        s_xu: stats.s_xu.clone(),
        s_uu: stats.s_uu.clone(),
    };
    serde_json::to_string_pretty(&file).expect("statistics serialize")
}

pub fn stats_from_json(text: &str, origin: &Path) -> Result<SummaryStatistics> {
    let f: StatsFile = serde_json::from_str(text).map_err(|e| RgmError::format(origin, e.to_string()))?;
    let stats = SummaryStatistics::new(
        reshape(f.s_yy, f.p, f.p),
        reshape(f.s_yx, f.p, f.k),
        reshape(f.s_yu, f.p, f.l),
        reshape(f.s_xx, f.k, f.k),
        reshape(f.s_xu, f.k, f.l),
        reshape(f.s_uu, f.l, f.l),
        f.n,
    )?;
    let d = stats.dims;
    if (d.p, d.k, d.l) != (f.p, f.k, f.l) {
        return Err(RgmError::format(origin, "declared p/k/l disagree with the matrices"));
    }
    Ok(stats)
}

pub fn write_stats(path: &Path, stats: &SummaryStatistics) -> Result<()> {
    fs::write(path, stats_to_json(stats)).map_err(|e| RgmError::io(path, e))
}

pub fn read_stats(path: &Path) -> Result<SummaryStatistics> {
    let text = fs::read_to_string(path).map_err(|e| RgmError::io(path, e))?;
    stats_from_json(&text, path)
}
