use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square matrix of reals, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self { n, values }
    }

    /// Builds a matrix from nested rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Argument(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Self { n, values })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.values[i * self.n + j] = value;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, value: f64) {
        self.set(i, j, value);
        self.set(j, i, value);
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n: self.n, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Largest entrywise absolute difference.
    pub fn sup_distance(&self, other: &SquareMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Argument(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Checks symmetry and a zero diagonal, exactly.
    pub fn check_dissimilarity(&self) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::Argument(format!(
                    "nonzero diagonal entry at ({i}, {i}): {}",
                    self.get(i, i)
                )));
            }
            for j in (i + 1)..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return Err(Error::Argument(format!(
                        "asymmetric entries at ({i}, {j}): {} vs {}",
                        self.get(i, j),
                        self.get(j, i)
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Serialize for SquareMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SquareMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SquareMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
