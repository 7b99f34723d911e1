use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("shape mismatch: {op} of {left} and {right}")]
    Shape {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("integer overflow")]
    Overflow,
    #[error("matrix is not square: {0}")]
    NotSquare(String),
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
    #[error("ragged rows")]
    Ragged,
}

/// Dense integer matrix with checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// `cols` is needed to type matrices with no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self, MatrixError> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Ragged);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn shape_text(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    fn shape_err(&self, op: &'static str, other: &Self) -> MatrixError {
        MatrixError::Shape {
            op,
            left: self.shape_text(),
            right: other.shape_text(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(self.shape_err("product", other));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a
                        .checked_mul(other.get(k, j))
                        .ok_or(MatrixError::Overflow)?;
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = cell.checked_add(v).ok_or(MatrixError::Overflow)?;
                }
            }
        }
        Ok(out)
    }

    fn zip(
        &self,
        other: &Self,
        op: &'static str,
        f: fn(i64, i64) -> Option<i64>,
    ) -> Result<Self, MatrixError> {
        if self.shape() != other.shape() {
            return Err(self.shape_err(op, other));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b).ok_or(MatrixError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip(other, "sum", i64::checked_add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.zip(other, "difference", i64::checked_sub)
    }

    pub fn neg(&self) -> Result<Self, MatrixError> {
        let data = self
            .data
            .iter()
            .map(|&a| a.checked_neg().ok_or(MatrixError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Block diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> Result<i64, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.shape_text()));
        }
        let n = self.rows;
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k * n + k] == 0 {
                let Some(r) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                    return Ok(0);
                };
                for j in 0..n {
                    a.swap(k * n + j, r * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i * n + j]
                        .checked_mul(a[k * n + k])
                        .and_then(|x| x.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                        .ok_or(MatrixError::Overflow)?;
                    a[i * n + j] = v / prev;
                }
                a[i * n + k] = 0;
            }
            prev = a[k * n + k];
        }
        let d = if n == 0 { 1 } else { sign * a[n * n - 1] };
        i64::try_from(d).map_err(|_| MatrixError::Overflow)
    }

    /// Inverse of a unimodular matrix, by integer row reduction.
    pub fn unimodular_inverse(&self) -> Result<Self, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.shape_text()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let row_op =
            |m: &mut IntMatrix, dst: usize, src: usize, q: i64| -> Result<(), MatrixError> {
                for j in 0..m.cols {
                    let v = m
                        .get(dst, j)
                        .checked_sub(q.checked_mul(m.get(src, j)).ok_or(MatrixError::Overflow)?)
                        .ok_or(MatrixError::Overflow)?;
                    m.set(dst, j, v);
                }
                Ok(())
            };
        let swap = |m: &mut IntMatrix, r1: usize, r2: usize| {
            for j in 0..m.cols {
                m.data.swap(r1 * m.cols + j, r2 * m.cols + j);
            }
        };
        for k in 0..n {
            // Euclid down column k until a single nonzero entry remains
            loop {
                let pivot = (k..n)
                    .filter(|&r| a.get(r, k) != 0)
                    .min_by_key(|&r| a.get(r, k).unsigned_abs());
                let Some(pr) = pivot else {
                    return Err(MatrixError::NotUnimodular);
                };
                swap(&mut a, k, pr);
                swap(&mut inv, k, pr);
                let mut done = true;
                for r in k + 1..n {
                    let q = a.get(r, k) / a.get(k, k);
                    if q != 0 {
                        row_op(&mut a, r, k, q)?;
                        row_op(&mut inv, r, k, q)?;
                    }
                    if a.get(r, k) != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            match a.get(k, k) {
                1 => {}
                -1 => {
                    row_op(&mut a, k, k, 2)?;
                    row_op(&mut inv, k, k, 2)?;
                }
                _ => return Err(MatrixError::NotUnimodular),
            }
        }
        for k in (0..n).rev() {
            for r in 0..k {
                let q = a.get(r, k);
                if q != 0 {
                    row_op(&mut a, r, k, q)?;
                    row_op(&mut inv, r, k, q)?;
                }
            }
        }
        debug_assert!(a.is_identity());
        Ok(inv)
    }

    pub fn is_unimodular(&self) -> bool {
        matches!(self.det(), Ok(1) | Ok(-1))
    }
}

/// First line is the shape, then one bracketed row per line.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)?;
        for row in self.to_rows() {
            let cells: Vec<String> = row.iter().map(i64::to_string).collect();
            write!(f, "\n[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols).unwrap()
    }

    #[test]
    fn products_and_sums() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.add(&b).unwrap(), m(&[&[1, 3], &[4, 4]]));
        assert!(a.mul(&m(&[&[1, 2, 3]])).is_err());
        let big = m(&[&[i64::MAX]]);
        assert_eq!(big.add(&big), Err(MatrixError::Overflow));
    }

    #[test]
    fn determinants() {
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), Ok(-1));
        assert_eq!(m(&[&[2, 1, 1], &[3, 2, 1], &[2, 1, 2]]).det(), Ok(1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), Ok(0));
        assert_eq!(IntMatrix::zeros(0, 0).det(), Ok(1));
    }

    #[test]
    fn inverses() {
        let a = m(&[&[2, 1, 1], &[3, 2, 1], &[2, 1, 2]]);
        let inv = a.unimodular_inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&a).unwrap().is_identity());
        let p = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(p.unimodular_inverse().unwrap(), p);
        assert_eq!(
            m(&[&[2, 0], &[0, 1]]).unimodular_inverse(),
            Err(MatrixError::NotUnimodular)
        );
        assert_eq!(
            m(&[&[1, 2], &[2, 4]]).unimodular_inverse(),
            Err(MatrixError::NotUnimodular)
        );
        assert!(IntMatrix::zeros(0, 0)
            .unimodular_inverse()
            .unwrap()
            .is_identity());
    }

    #[test]
    fn display() {
        assert_eq!(IntMatrix::identity(2).to_string(), "2x2\n[1, 0]\n[0, 1]");
        assert_eq!(IntMatrix::zeros(0, 3).to_string(), "0x3");
    }
}
