use crate::exactnum::{ExactReal, IntervalReal, Rational};
use crate::{Error, Result};

/// Dense matrix of exact reals, row-major. Structural zeros are exact
/// literals, so block-diagonal and extension constructions stay exact.
#[derive(Debug, Clone)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactReal>,
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ExactReal>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(ExactMatrix { rows, cols, entries })
    }

    pub fn from_rationals(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.into_iter().map(ExactReal::literal).collect(),
        )
    }

    pub fn row_vector(entries: Vec<ExactReal>) -> Result<Self> {
        let n = entries.len();
        Self::new(1, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactReal {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[ExactReal] {
        &self.entries
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut out = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).clone());
            }
        }
        ExactMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: out,
        }
    }

    /// All entries as exact rationals, when the matrix is fully literal.
    pub fn as_rationals(&self) -> Option<Vec<Rational>> {
        self.entries.iter().map(|e| e.exact_rational()).collect()
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(|e| e.is_exact())
    }

    /// Certified interval snapshot of every entry at the given width.
    pub fn eval_all(&self, width: &Rational) -> Result<Vec<IntervalReal>> {
        self.entries.iter().map(|e| e.eval(width)).collect()
    }

    /// Tightest snapshot the generators currently support.
    pub fn eval_tightest_all(&self) -> Vec<IntervalReal> {
        self.entries.iter().map(|e| e.eval_tightest()).collect()
    }
}
