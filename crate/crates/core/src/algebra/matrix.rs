use super::field::Scalar;
use crate::error::{Error, Result};

/// Largest number of entries accepted for a dense matrix.
pub const MAX_MATRIX_ENTRIES: usize = 4_000_000;

/// Row-major dense matrix with opaque row and column labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix<F> {
    rows: usize,
    cols: usize,
    entries: Vec<F>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl<F: Scalar> DenseMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let n = rows.saturating_mul(cols);
        if n > MAX_MATRIX_ENTRIES {
            return Err(Error::MatrixTooLarge {
                rows,
                cols,
                ceiling: MAX_MATRIX_ENTRIES,
            });
        }
        Ok(DenseMatrix {
            rows,
            cols,
            entries: vec![F::zero(); n],
            row_labels: (0..rows).map(|i| i.to_string()).collect(),
            col_labels: (0..cols).map(|j| j.to_string()).collect(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Schema("ragged matrix rows".into()));
        }
        let mut m = Self::zeros(r, c)?;
        m.entries = rows.into_iter().flatten().collect();
        Ok(m)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, F::one());
        }
        Ok(m)
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        if rows.len() != self.rows || cols.len() != self.cols {
            return Err(Error::Schema(
                "label count does not match matrix dimensions".into(),
            ));
        }
        self.row_labels = rows;
        self.col_labels = cols;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Schema(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).clone() + a.clone() * b.clone();
                        out.set(i, j, v);
                    }
                }
            }
        }
        out.row_labels = self.row_labels.clone();
        out.col_labels = other.col_labels.clone();
        Ok(out)
    }

    /// Rank by Gaussian elimination over the scalar field.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<F>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let inv = a[rank][col].try_inv().expect("pivot is nonzero");
            for j in col..self.cols {
                a[rank][j] = a[rank][j].clone() * inv.clone();
            }
            let pivot_row = a[rank].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == rank || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for j in col..self.cols {
                    if !pivot_row[j].is_zero() {
                        row[j] = row[j].clone() - factor.clone() * pivot_row[j].clone();
                    }
                }
            }
            rank += 1;
            if rank == a.len() {
                break;
            }
        }
        rank
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> DenseMatrix<G> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows).expect("same entry count");
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    /// Rows and columns reordered: `out[i][j] = self[row_perm[i]][col_perm[j]]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.cols).expect("same entry count");
        for (i, &pi) in row_perm.iter().enumerate() {
            for (j, &pj) in col_perm.iter().enumerate() {
                out.set(i, j, self.get(pi, pj).clone());
            }
        }
        out.row_labels = row_perm
            .iter()
            .map(|&i| self.row_labels[i].clone())
            .collect();
        out.col_labels = col_perm
            .iter()
            .map(|&j| self.col_labels[j].clone())
            .collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Fp31;

    #[test]
    fn identity_and_zero_ranks() {
        assert_eq!(DenseMatrix::<Fp31>::identity(3).unwrap().rank(), 3);
        assert_eq!(DenseMatrix::<Fp31>::zeros(2, 4).unwrap().rank(), 0);
        assert_eq!(DenseMatrix::<Fp31>::zeros(0, 0).unwrap().rank(), 0);
    }

    #[test]
    fn dependent_rows() {
        let f = |v: i64| Fp31::from_signed(v);
        let m = DenseMatrix::from_rows(vec![
            vec![f(1), f(2), f(3)],
            vec![f(2), f(4), f(6)],
            vec![f(0), f(1), f(-1)],
        ])
        .unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.transpose().rank(), 2);
    }

    #[test]
    fn size_ceiling() {
        assert!(matches!(
            DenseMatrix::<Fp31>::zeros(3000, 3000),
            Err(Error::MatrixTooLarge { .. })
        ));
    }
}
