//! Dense matrix files.
//!
//! JSON: `{"rows": r, "cols": c, "data": [row-major values]}`.
//! Text: a `rows cols` header line followed by `rows` lines of
//! whitespace-separated values; lines starting with `#` are ignored.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl MatrixFile {
    pub fn from_mat(m: &Mat) -> Self {
        let data = (0..m.nrows()).flat_map(|i| m.row(i).iter().copied().collect::<Vec<_>>()).collect();
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_mat(&self) -> Result<Mat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Shape(format!(
                "matrix file declares {}×{} but holds {} values",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(Mat::from_row_slice(self.rows, self.cols, &self.data))
    }
}

pub fn to_json_string(m: &Mat) -> Result<String> {
    Ok(serde_json::to_string(&MatrixFile::from_mat(m))?)
}

pub fn from_json_str(s: &str) -> Result<Mat> {
    serde_json::from_str::<MatrixFile>(s)?.to_mat()
}

pub fn write_json(path: &Path, m: &Mat) -> Result<()> {
    fs::write(path, to_json_string(m)? + "\n")?;
    Ok(())
}

pub fn to_text(m: &Mat) -> String {
    let mut s = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:e}")).collect();
        s += &row.join(" ");
        s.push('\n');
    }
    s
}

pub fn from_text(s: &str) -> Result<Mat> {
    let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Shape("empty matrix text".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Shape(format!("bad header `{header}`"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Shape(format!("header must be `rows cols`, got `{header}`")));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Shape(format!("bad value `{t}` on data line {}", i + 1))))
            .collect::<Result<_>>()?;
        if vals.len() != cols {
            return Err(Error::Shape(format!("data line {} has {} values, expected {cols}", i + 1, vals.len())));
        }
        data.extend(vals);
    }
    MatrixFile { rows, cols, data }.to_mat()
}

/// Reads JSON when the extension is `.json`, text otherwise.
pub fn read_matrix(path: &Path) -> Result<Mat> {
    let s = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        from_json_str(&s)
    } else {
        from_text(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_row_major() {
        let m = Mat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(to_json_string(&m).unwrap(), r#"{"rows":2,"cols":3,"data":[1.0,2.0,3.0,4.0,5.0,6.0]}"#);
        assert_eq!(from_json_str(&to_json_string(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let m = Mat::from_fn(3, 2, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0));
        assert_eq!(from_text(&to_text(&m)).unwrap(), m);
        assert_eq!(from_text("# c\n1 2\n3 4\n").unwrap(), Mat::from_row_slice(1, 2, &[3.0, 4.0]));
    }

    #[test]
    fn malformed_inputs() {
        assert!(from_json_str(r#"{"rows":2,"cols":2,"data":[1.0]}"#).is_err());
        assert!(from_text("").is_err());
        assert!(from_text("2\n1 2\n").is_err());
        assert!(from_text("1 2\n1\n").is_err());
        assert!(from_text("2 1\n1\n").is_err());
        assert!(from_text("1 1\nx\n").is_err());
    }
}
