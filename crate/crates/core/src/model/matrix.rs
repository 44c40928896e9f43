use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense `n x n` table of pair costs, row-major.
///
/// Entries may be `f64::INFINITY` to mark a missing edge when the matrix is
/// used as a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn filled(n: usize, value: f64) -> Self {
        let mut data = vec![value; n * n];
        for u in 0..n {
            data[u * n + u] = 0.0;
        }
        CostMatrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                data.push(if u == v { 0.0 } else { f(u, v) });
            }
        }
        CostMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (u, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "matrix row {u} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(CostMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, w: f64) {
        self.data[u * self.n + v] = w;
    }

    pub fn set_sym(&mut self, u: usize, v: usize, w: f64) {
        self.set(u, v, w);
        self.set(v, u, w);
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CostMatrix {
            n: self.n,
            data: self.data.iter().map(|w| w * factor).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| (u + 1..self.n).all(|v| self.get(u, v) == self.get(v, u)))
    }

    /// Checks for a zero diagonal and nonnegative, non-NaN entries.
    pub fn check_costs(&self, name: &str, allow_infinite: bool) -> Result<()> {
        for u in 0..self.n {
            if self.get(u, u) != 0.0 {
                return Err(Error::InvalidInput(format!("{name}({u},{u}) must be 0")));
            }
            for v in 0..self.n {
                let w = self.get(u, v);
                if w.is_nan() || w < 0.0 || (!allow_infinite && w.is_infinite()) {
                    return Err(Error::InvalidInput(format!(
                        "{name}({u},{v}) = {w} is not a nonnegative finite cost"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for CostMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        CostMatrix::from_rows(rows)
    }
}

impl From<CostMatrix> for Vec<Vec<f64>> {
    fn from(m: CostMatrix) -> Self {
        m.rows()
    }
}
