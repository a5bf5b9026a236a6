//! Row-major rectangular grid of per-pixel voltages.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid dimensions mismatch: {0}×{1} vs {2}×{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("non-finite value at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// N×M matrix of volts, indexed `(row, col)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageGrid {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl VoltageGrid {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        assert!(n_rows >= 1 && n_cols >= 1, "grid must be at least 1×1");
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut g = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                g[(i, j)] = f(i, j);
            }
        }
        g
    }

    /// Builds from a row-major value vector. Length must equal `n_rows * n_cols`.
    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self, GridError> {
        if data.len() != n_rows * n_cols {
            return Err(GridError::DimensionMismatch(n_rows, n_cols, 1, data.len()));
        }
        for (k, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(GridError::NonFinite(k / n_cols, k % n_cols));
            }
        }
        Ok(Self { n_rows, n_cols, data })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows && self.n_cols == other.n_cols
    }

    /// Row-major flattening; index `k` maps to pixel `(k / n_cols, k % n_cols)`.
    pub fn flatten(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        let nc = self.n_cols;
        self.data.iter().enumerate().map(move |(k, &v)| ((k / nc, k % nc), v))
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, &v| a.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Quarter-turn counterclockwise: entry (i, j) moves to (n−1−j, i).
    pub fn rotated90(&self) -> Self {
        assert_eq!(self.n_rows, self.n_cols, "rotation requires a square grid");
        let n = self.n_rows;
        Self::from_fn(n, n, |i, j| self[(j, n - 1 - i)])
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                if j > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{:.16e}", self[(i, j)]);
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), GridError> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Parses comma-separated rows; `#`-prefixed comment lines at the top
    /// (or anywhere) and blank lines are skipped.
    pub fn from_csv_str(text: &str) -> Result<Self, GridError> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Result<Vec<f64>, _> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect();
            let row = row.map_err(|e| GridError::Format {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(GridError::Format {
                        line: idx + 1,
                        msg: format!("expected {} fields, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(GridError::Format {
                line: 0,
                msg: "no data rows".into(),
            });
        }
        let n_rows = rows.len();
        let n_cols = rows[0].len();
        Self::from_vec(n_rows, n_cols, rows.concat())
    }

    pub fn read_csv(path: &Path) -> Result<Self, GridError> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

impl std::ops::Index<(usize, usize)> for VoltageGrid {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for VoltageGrid {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n_cols + j]
    }
}
