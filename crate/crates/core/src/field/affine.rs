use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Largest dimension whose elements still pack into a `u128` key (4 bits per entry).
pub const MAX_KEY_DIM: usize = 5;

/// An element `x -> Ax + b` of AGL(n, q). `A` is row-major.
#[derive(Clone)]
pub struct AffineMap {
    field: Arc<FieldSpec>,
    n: usize,
    a: Vec<u8>,
    b: Vec<u8>,
}

impl PartialEq for AffineMap {
    fn eq(&self, other: &Self) -> bool {
        self.field.q() == other.field.q() && self.n == other.n && self.a == other.a && self.b == other.b
    }
}

impl Eq for AffineMap {}

fn mat_mul(f: &FieldSpec, n: usize, x: &[u8], y: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0u8;
            for k in 0..n {
                acc = f.add(acc, f.mul(x[i * n + k], y[k * n + j]));
            }
            out[i * n + j] = acc;
        }
    }
    out
}

fn mat_vec(f: &FieldSpec, n: usize, x: &[u8], v: &[u8]) -> Vec<u8> {
    (0..n)
        .map(|i| (0..n).fold(0u8, |acc, k| f.add(acc, f.mul(x[i * n + k], v[k]))))
        .collect()
}

/// Gauss-Jordan inverse; `None` if singular.
fn mat_inverse(f: &FieldSpec, n: usize, a: &[u8]) -> Option<Vec<u8>> {
    let mut m: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut row = a[i * n..(i + 1) * n].to_vec();
            row.extend((0..n).map(|j| u8::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| m[i][col] != 0)?;
        m.swap(col, pivot);
        let inv = f.inv(m[col][col])?;
        for v in m[col].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let prow = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && row[col] != 0 {
                let factor = row[col];
                for (v, &p) in row.iter_mut().zip(&prow) {
                    *v = f.sub(*v, f.mul(factor, p));
                }
            }
        }
    }
    Some(m.into_iter().flat_map(|row| row[n..].to_vec()).collect())
}

impl AffineMap {
    /// Validates shapes and entries and checks that `A` has a two-sided inverse.
    pub fn new(field: Arc<FieldSpec>, n: usize, a: Vec<u8>, b: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch(0, 1));
        }
        if a.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: a.len(),
            });
        }
        if b.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let q = field.q();
        if a.iter().chain(&b).any(|&e| u32::from(e) >= q) {
            return Err(Error::Parse(format!("entry outside GF({q})")));
        }
        let inv = mat_inverse(&field, n, &a).ok_or(Error::SingularMatrix)?;
        let id: Vec<u8> = (0..n * n).map(|k| u8::from(k / n == k % n)).collect();
        if mat_mul(&field, n, &a, &inv) != id || mat_mul(&field, n, &inv, &a) != id {
            return Err(Error::SingularMatrix);
        }
        Ok(Self { field, n, a, b })
    }

    pub fn identity(field: Arc<FieldSpec>, n: usize) -> Self {
        let a = (0..n * n).map(|k| u8::from(k / n == k % n)).collect();
        Self {
            field,
            n,
            a,
            b: vec![0; n],
        }
    }

    pub fn linear(field: Arc<FieldSpec>, n: usize, a: Vec<u8>) -> Result<Self> {
        Self::new(field, n, a, vec![0; n])
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[u8] {
        &self.a
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.a[i * self.n + j]
    }

    pub fn translation(&self) -> &[u8] {
        &self.b
    }

    pub fn with_translation(&self, b: Vec<u8>) -> Result<Self> {
        Self::new(self.field.clone(), self.n, self.a.clone(), b)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field.q() != other.field.q() {
            return Err(Error::FieldMismatch(self.field.q(), other.field.q()));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// `self ∘ other = (A1 A2, A1 b2 + b1)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        let f = &self.field;
        let a = mat_mul(f, self.n, &self.a, &other.a);
        let ab = mat_vec(f, self.n, &self.a, &other.b);
        let b = ab.iter().zip(&self.b).map(|(&x, &y)| f.add(x, y)).collect();
        Self {
            field: self.field.clone(),
            n: self.n,
            a,
            b,
        }
    }

    pub fn inverse(&self) -> Self {
        let f = &self.field;
        let inv = mat_inverse(f, self.n, &self.a).expect("AffineMap is invertible by construction");
        let ib = mat_vec(f, self.n, &inv, &self.b);
        Self {
            field: self.field.clone(),
            n: self.n,
            a: inv,
            b: ib.into_iter().map(|x| f.neg(x)).collect(),
        }
    }

    pub fn apply(&self, x: &[u8]) -> Vec<u8> {
        let f = &self.field;
        mat_vec(f, self.n, &self.a, x)
            .into_iter()
            .zip(&self.b)
            .map(|(y, &c)| f.add(y, c))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.b.iter().all(|&v| v == 0)
            && self
                .a
                .iter()
                .enumerate()
                .all(|(k, &v)| v == u8::from(k / self.n == k % self.n))
    }

    /// Packs `A` (row-major) followed by `b` at four bits per entry.
    pub fn key(&self) -> Result<u128> {
        if self.n > MAX_KEY_DIM {
            return Err(Error::TooLarge(format!(
                "dimension {} exceeds key capacity {MAX_KEY_DIM}",
                self.n
            )));
        }
        Ok(self
            .a
            .iter()
            .chain(&self.b)
            .enumerate()
            .fold(0u128, |k, (i, &e)| k | (u128::from(e) << (4 * i))))
    }

    pub(crate) fn from_key_unchecked(field: Arc<FieldSpec>, n: usize, key: u128) -> Self {
        let entry = |i: usize| ((key >> (4 * i)) & 0xf) as u8;
        Self {
            field,
            n,
            a: (0..n * n).map(entry).collect(),
            b: (n * n..n * n + n).map(entry).collect(),
        }
    }

    /// Matrix in the text format `r0c0 r0c1;r1c0 r1c1`, entries formatted by the field.
    pub fn format_matrix(&self) -> String {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.field.format_element(self.entry(i, j)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn format_vector(&self) -> String {
        self.b
            .iter()
            .map(|&e| self.field.format_element(e))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the matrix text format (rows separated by `;`, entries by whitespace or `,`).
    pub fn parse(field: Arc<FieldSpec>, matrix: &str, vector: Option<&str>) -> Result<Self> {
        let rows: Vec<Vec<u8>> = matrix
            .split(';')
            .map(|row| {
                row.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|e| field.parse_element(e))
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix must be square".into()));
        }
        let b = match vector {
            Some(v) => v
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|e| field.parse_element(e))
                .collect::<Result<Vec<u8>>>()?,
            None => vec![0; n],
        };
        Self::new(field, n, rows.concat(), b)
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AGL({},{}) [{} | {}]",
            self.n,
            self.field.q(),
            self.format_matrix(),
            self.format_vector()
        )
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={} b={}", self.format_matrix(), self.format_vector())
    }
}
