//! Finite fields, affine groups over them and two-element generating sets.

mod affine;
mod bit;
mod gf;

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

pub use affine::{AffineMap, MAX_KEY_DIM};
pub use bit::BitAffine;
pub use gf::{FieldSpec, QuadraticExtension, MAX_Q};

use crate::error::{Error, Result};

/// Default closure cap for the brute-force group checks.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000_000;

/// `|GL(n, q)| = prod_{i<n} (q^n - q^i)`.
pub fn gl_order(n: u32, q: u64) -> u128 {
    let qn = u128::from(q).pow(n);
    (0..n).map(|i| qn - u128::from(q).pow(i)).product()
}

/// `|AGL(n, q)| = q^n |GL(n, q)|`.
pub fn agl_order(n: u32, q: u64) -> u128 {
    u128::from(q).pow(n) * gl_order(n, q)
}

fn matrix_with(n: usize, entries: &[(usize, usize, u8)]) -> Vec<u8> {
    let mut a = vec![0u8; n * n];
    for &(i, j, v) in entries {
        a[i * n + j] = v;
    }
    a
}

fn unit_vector(n: usize, i: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    v[i] = 1;
    v
}

/// The pair of matrices generating GL(n, q), returned with zero translations.
///
/// * `n >= 3`: `A = I + E_{n1} + (alpha - 1) E_{22}` and the cyclic shift
///   `B = E_{12} + E_{23} + ... + E_{n1}`.
/// * `n = 2, q = 2`: `(0 1; 1 1)` and `(1 1; 0 1)`.
/// * `n = 2, q >= 3`: `(0 -alpha; 1 beta+beta^q)` and `diag(alpha, 1)`, with `beta` a
///   generator of GF(q^2)^* of norm `alpha` (see [`QuadraticExtension`]).
pub fn gl_generators(n: usize, field: &Arc<FieldSpec>) -> Result<(AffineMap, AffineMap)> {
    if n < 2 {
        return Err(Error::DimensionMismatch(n, 2));
    }
    let f = field.clone();
    let alpha = field.alpha();
    if n >= 3 {
        let mut a_entries: Vec<(usize, usize, u8)> = (0..n).map(|i| (i, i, 1)).collect();
        a_entries.push((n - 1, 0, 1));
        a_entries[1] = (1, 1, alpha);
        let mut b_entries: Vec<(usize, usize, u8)> = (0..n - 1).map(|i| (i, i + 1, 1)).collect();
        b_entries.push((n - 1, 0, 1));
        let a = AffineMap::linear(f.clone(), n, matrix_with(n, &a_entries))?;
        let b = AffineMap::linear(f, n, matrix_with(n, &b_entries))?;
        return Ok((a, b));
    }
    if field.q() == 2 {
        let a = AffineMap::linear(f.clone(), 2, vec![0, 1, 1, 1])?;
        let b = AffineMap::linear(f, 2, vec![1, 1, 0, 1])?;
        return Ok((a, b));
    }
    let (_, trace) = QuadraticExtension::new(field).generator_with_norm_alpha();
    let a = AffineMap::linear(f.clone(), 2, vec![0, field.neg(alpha), 1, trace])?;
    let b = AffineMap::linear(f, 2, vec![alpha, 0, 0, 1])?;
    Ok((a, b))
}

/// The pair generating AGL(n, q).
///
/// * `n >= 3`: `(A, e1)` and `(B, 0)` with `A, B` from [`gl_generators`].
/// * `n = 2, q = 2`: `((0 1; 1 1), 0)` and `((1 1; 0 1), e1)`.
/// * `n = 2, q >= 3`: `(A, 0)` and `(B, e2)`.
pub fn agl_generators(n: usize, field: &Arc<FieldSpec>) -> Result<(AffineMap, AffineMap)> {
    let (a, b) = gl_generators(n, field)?;
    if n >= 3 {
        Ok((a.with_translation(unit_vector(n, 0))?, b))
    } else if field.q() == 2 {
        Ok((a, b.with_translation(unit_vector(2, 0))?))
    } else {
        Ok((a, b.with_translation(unit_vector(2, 1))?))
    }
}

fn check_gens(gens: &[AffineMap]) -> Result<()> {
    let first = gens
        .first()
        .ok_or_else(|| Error::Precondition("at least one generator required".into()))?;
    for g in &gens[1..] {
        if g.field().q() != first.field().q() {
            return Err(Error::FieldMismatch(first.field().q(), g.field().q()));
        }
        if g.n() != first.n() {
            return Err(Error::DimensionMismatch(first.n(), g.n()));
        }
    }
    Ok(())
}

/// All elements of the group generated by `gens`, by breadth-first closure under
/// right multiplication. Keys are those of [`AffineMap::key`].
pub fn closure(gens: &[AffineMap], cap: usize) -> Result<Vec<u128>> {
    check_gens(gens)?;
    let field = gens[0].field().clone();
    let n = gens[0].n();
    let id = AffineMap::identity(field, n);
    let mut seen: HashSet<u128> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(id.key()?);
    order.push(id.key()?);
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose_unchecked(g);
            let k = y.key()?;
            if seen.insert(k) {
                if seen.len() > cap {
                    return Err(Error::ClosureCap(cap));
                }
                order.push(k);
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Size of the group generated by `gens`.
pub fn generate_group(gens: &[AffineMap], cap: usize) -> Result<usize> {
    Ok(closure(gens, cap)?.len())
}

/// Multiplicative order of a single element (bounded by `cap`).
pub fn element_order(x: &AffineMap, cap: usize) -> Result<usize> {
    let mut y = x.clone();
    let mut ord = 1;
    while !y.is_identity() {
        y = y.compose_unchecked(x);
        ord += 1;
        if ord > cap {
            return Err(Error::ClosureCap(cap));
        }
    }
    Ok(ord)
}

/// Maximum element order over the generated group. The group is cyclic iff this equals
/// its size.
pub fn max_element_order(gens: &[AffineMap], cap: usize) -> Result<usize> {
    let keys = closure(gens, cap)?;
    let field = gens[0].field().clone();
    let n = gens[0].n();
    let mut best = 1;
    for k in keys {
        let x = AffineMap::from_key_unchecked(field.clone(), n, k);
        best = best.max(element_order(&x, cap)?);
    }
    Ok(best)
}
