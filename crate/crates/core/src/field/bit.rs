use std::fmt;

use crate::error::{Error, Result};
use crate::field::{AffineMap, FieldSpec};

/// An element `x -> Ax + b` of AGL(n, F2) for n <= 7, with `A` stored by columns
/// (column `j` is the image of `e_{j+1}`) and vectors packed with `x1` as bit 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitAffine {
    n: u8,
    cols: [u8; 7],
    b: u8,
}

impl BitAffine {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 7, "BitAffine supports at most 7 variables");
        let mut cols = [0u8; 7];
        for (j, c) in cols.iter_mut().enumerate().take(n) {
            *c = 1 << j;
        }
        Self { n: n as u8, cols, b: 0 }
    }

    pub fn translation_by(n: usize, b: u8) -> Self {
        let mut t = Self::identity(n);
        t.b = b & Self::vec_mask(n);
        t
    }

    fn vec_mask(n: usize) -> u8 {
        ((1u16 << n) - 1) as u8
    }

    /// Builds the map from column images; fails if the columns are dependent.
    pub fn from_columns(n: usize, columns: &[u8], b: u8) -> Result<Self> {
        if n == 0 || n > 7 {
            return Err(Error::VariableCount(n));
        }
        if columns.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: columns.len(),
            });
        }
        let mask = Self::vec_mask(n);
        if columns.iter().any(|&c| c & !mask != 0) || b & !mask != 0 {
            return Err(Error::DimensionMismatch(n, 8));
        }
        let mut cols = [0u8; 7];
        cols[..n].copy_from_slice(columns);
        let map = Self { n: n as u8, cols, b };
        if map.rank() != n {
            return Err(Error::SingularMatrix);
        }
        Ok(map)
    }

    /// Builds the map from rows: bit `j` of `rows[i]` is `A[i][j]`.
    pub fn from_rows(n: usize, rows: &[u8], b: u8) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: rows.len(),
            });
        }
        let cols: Vec<u8> = (0..n)
            .map(|j| {
                rows.iter()
                    .enumerate()
                    .fold(0u8, |c, (i, &r)| c | (((r >> j) & 1) << i))
            })
            .collect();
        Self::from_columns(n, &cols, b)
    }

    /// Inverse of [`matrix_key`](Self::matrix_key).
    pub fn from_matrix_key(n: usize, key: u64, b: u8) -> Result<Self> {
        let rows: Vec<u8> = (0..n)
            .map(|i| ((key >> (i * n)) & u64::from(Self::vec_mask(n))) as u8)
            .collect();
        Self::from_rows(n, &rows, b)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn columns(&self) -> &[u8] {
        &self.cols[..self.n as usize]
    }

    #[inline]
    pub fn translation(&self) -> u8 {
        self.b
    }

    pub fn rows(&self) -> Vec<u8> {
        (0..self.n())
            .map(|i| {
                self.columns()
                    .iter()
                    .enumerate()
                    .fold(0u8, |r, (j, &c)| r | (((c >> i) & 1) << j))
            })
            .collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        (self.cols[j] >> i) & 1
    }

    /// The matrix part alone, row-major: bit `i*n + j` holds `A[i][j]`.
    pub fn matrix_key(&self) -> u64 {
        self.rows()
            .iter()
            .enumerate()
            .fold(0u64, |k, (i, &r)| k | (u64::from(r) << (i * self.n())))
    }

    #[inline]
    pub fn linear_image(&self, x: u8) -> u8 {
        let mut y = 0u8;
        let mut bits = x;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            y ^= self.cols[j];
        }
        y
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.linear_image(x) ^ self.b
    }

    /// `self ∘ other`, i.e. `x -> self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n(), other.n()));
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        let mut cols = [0u8; 7];
        for (j, c) in cols.iter_mut().enumerate().take(self.n()) {
            *c = self.linear_image(other.cols[j]);
        }
        Self {
            n: self.n,
            cols,
            b: self.linear_image(other.b) ^ self.b,
        }
    }

    pub fn linear_part(&self) -> Self {
        Self { b: 0, ..*self }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n();
        // Gauss-Jordan on rows of [A | I]
        let mut rows: Vec<(u8, u8)> = self
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, 1u8 << i))
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&i| (rows[i].0 >> col) & 1 == 1)
                .expect("BitAffine is invertible by construction");
            rows.swap(col, pivot);
            let p = rows[col];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != col && (row.0 >> col) & 1 == 1 {
                    row.0 ^= p.0;
                    row.1 ^= p.1;
                }
            }
        }
        let inv_rows: Vec<u8> = rows.iter().map(|r| r.1).collect();
        let mut inv = Self::from_rows(n, &inv_rows, 0).expect("inverse is invertible");
        inv.b = inv.linear_image(self.b);
        inv
    }

    fn rank(&self) -> usize {
        let mut basis: Vec<u8> = Vec::new();
        for &c in self.columns() {
            let mut v = c;
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis.len()
    }

    pub fn to_affine_map(&self, field: std::sync::Arc<FieldSpec>) -> Result<AffineMap> {
        if field.q() != 2 {
            return Err(Error::FieldMismatch(field.q(), 2));
        }
        let n = self.n();
        let a: Vec<u8> = (0..n * n).map(|k| self.entry(k / n, k % n)).collect();
        let b: Vec<u8> = (0..n).map(|i| (self.b >> i) & 1).collect();
        AffineMap::new(field, n, a, b)
    }
}

impl TryFrom<&AffineMap> for BitAffine {
    type Error = Error;

    fn try_from(map: &AffineMap) -> Result<Self> {
        if map.field().q() != 2 {
            return Err(Error::FieldMismatch(map.field().q(), 2));
        }
        let n = map.n();
        if n > 7 {
            return Err(Error::VariableCount(n));
        }
        let rows: Vec<u8> = (0..n)
            .map(|i| (0..n).fold(0u8, |r, j| r | (map.entry(i, j) << j)))
            .collect();
        let b = (0..n).fold(0u8, |v, i| v | (map.translation()[i] << i));
        Self::from_rows(n, &rows, b)
    }
}

impl fmt::Debug for BitAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitAffine(")?;
        for (i, r) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.n() {
                write!(f, "{}", (r >> j) & 1)?;
            }
        }
        write!(f, " | ")?;
        for i in 0..self.n() {
            write!(f, "{}", (self.b >> i) & 1)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_rejected() {
        assert_eq!(
            BitAffine::from_rows(2, &[0b11, 0b11], 0),
            Err(Error::SingularMatrix)
        );
        assert!(BitAffine::from_rows(3, &[0b001, 0b010], 0).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let a = BitAffine::from_rows(3, &[0b011, 0b110, 0b100], 0b101).unwrap();
        let id = BitAffine::identity(3);
        assert_eq!(a.compose(&id).unwrap(), a);
        assert_eq!(a.compose(&a.inverse()).unwrap(), id);
        assert_eq!(a.inverse().compose(&a).unwrap(), id);
        for x in 0..8u8 {
            assert_eq!(a.inverse().apply(a.apply(x)), x);
        }
    }

    #[test]
    fn swap_then_translate() {
        // (swap, 0) ∘ (I, e1) = (swap, e2)
        let swap = BitAffine::from_rows(2, &[0b10, 0b01], 0).unwrap();
        let t = BitAffine::translation_by(2, 0b01);
        let expect = BitAffine::from_rows(2, &[0b10, 0b01], 0b10).unwrap();
        assert_eq!(swap.compose(&t).unwrap(), expect);
    }

    #[test]
    fn matrix_key_round_trip() {
        let a = BitAffine::from_rows(6, &[0b000010, 0b000100, 0b001000, 0b010000, 0b100000, 0b000001], 0)
            .unwrap();
        let k = a.matrix_key();
        assert_eq!(BitAffine::from_matrix_key(6, k, 0).unwrap(), a);
    }
}
