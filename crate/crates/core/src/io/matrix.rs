//! Dense rating matrices for the recommendation experiment.

use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Default standard deviation of observed ratings around the matrix entry.
pub const DEFAULT_NOISE_SD: f64 = 0.796;

/// Row-major `rows x cols` matrix of mean ratings.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub noise_sd: f64,
}

impl RatingMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, noise_sd: f64) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::domain(format!(
                "rating matrix needs at least 2 rows and 2 columns, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::domain(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("rating matrix entries must be finite"));
        }
        if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
            return Err(Error::domain(format!(
                "noise_sd must be non-negative, got {noise_sd}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            values,
            noise_sd,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    /// Writes the matrix as headerless CSV.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(",")).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Reads a headerless numeric CSV (one user per row, one item per column).
///
/// Ragged rows and non-numeric cells are reported with 1-based row and column.
pub fn load_rating_matrix(path: impl AsRef<Path>, noise_sd: f64) -> Result<RatingMatrix> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Parse {
                path: path.to_path_buf(),
                row: 0,
                column: 0,
                message: format!("{other:?}"),
            },
        })?;

    let parse_err = |row: usize, column: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        column,
        message,
    };

    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| parse_err(row, 0, e.to_string()))?;
        let expected = *cols.get_or_insert(record.len());
        if record.len() != expected {
            return Err(parse_err(
                row,
                record.len().min(expected) + 1,
                format!("expected {expected} columns, found {}", record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(row, j + 1, format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(
                    row,
                    j + 1,
                    format!("not a finite number: {cell:?}"),
                ));
            }
            values.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    RatingMatrix::new(rows, cols, values, noise_sd).map_err(|e| parse_err(rows, 0, e.to_string()))
}

/// Low-rank stand-in for a completed ratings matrix: `U V^T` with standard
/// normal factors, min-max rescaled to `[0, 5]`.
pub fn synthetic_rating_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rank: usize,
    noise_sd: f64,
    rng: &mut R,
) -> Result<RatingMatrix> {
    if rank == 0 {
        return Err(Error::domain("rank must be at least 1"));
    }
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(rng)).collect() };
    let u = draw(rows * rank);
    let v = draw(cols * rank);
    let mut values: Vec<f64> = (0..rows)
        .flat_map(|i| {
            let (u, v) = (&u, &v);
            (0..cols).map(move |j| (0..rank).map(|r| u[i * rank + r] * v[j * rank + r]).sum())
        })
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for x in &mut values {
        *x = if span > 0.0 {
            5.0 * (*x - lo) / span
        } else {
            2.5
        };
    }
    RatingMatrix::new(rows, cols, values, noise_sd)
}
