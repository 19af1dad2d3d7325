//! Small finite fields GF(p^k), q <= 16, with full operation tables.
//!
//! Elements are encoded as integers `sum c_i p^i`, the base-`p` digits being the
//! coefficients of the polynomial-basis representation.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_Q: u32 = 16;

/// Conway polynomials for the supported extension fields, low coefficient first.
fn conway_modulus(p: u32, k: u32) -> Option<Vec<u32>> {
    match (p, k) {
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (2, 4) => Some(vec![1, 1, 0, 0, 1]),
        (3, 2) => Some(vec![2, 2, 1]),
        _ => None,
    }
}

fn factor_prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut k = 0;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    q: u32,
    modulus: Option<Vec<u32>>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    exp: Vec<u8>,
    log: Vec<u8>,
    alpha: u8,
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self> {
        if q > MAX_Q {
            return Err(Error::UnsupportedField(q));
        }
        let (p, k) = factor_prime_power(q).ok_or(Error::UnsupportedField(q))?;
        let modulus = if k > 1 {
            Some(conway_modulus(p, k).ok_or(Error::UnsupportedField(q))?)
        } else {
            None
        };
        let digits = |mut e: u32| -> Vec<u32> {
            (0..k)
                .map(|_| {
                    let d = e % p;
                    e /= p;
                    d
                })
                .collect()
        };
        let encode = |d: &[u32]| -> u32 { d.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&sum) as u8;
                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * k as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                if let Some(m) = &modulus {
                    for deg in (k as usize..prod.len()).rev() {
                        let c = prod[deg];
                        if c != 0 {
                            for (i, &mi) in m.iter().enumerate() {
                                let idx = deg - k as usize + i;
                                prod[idx] = (prod[idx] + (p - c) * mi) % p;
                            }
                        }
                    }
                }
                mul[(a * q + b) as usize] = encode(&prod[..k as usize]) as u8;
            }
        }
        let neg: Vec<u8> = (0..q)
            .map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap() as u8)
            .collect();
        let mut spec = Self {
            p,
            k,
            q,
            modulus,
            add,
            mul,
            neg,
            exp: Vec::new(),
            log: Vec::new(),
            alpha: 0,
        };
        // smallest generator of the multiplicative group; for extensions the Conway
        // polynomial makes X (encoded as p) primitive
        let alpha = if k > 1 {
            p as u8
        } else {
            (1..q as u8)
                .find(|&a| spec.mult_order(a) == q - 1)
                .expect("prime field has a primitive root")
        };
        if spec.mult_order(alpha) != q - 1 {
            return Err(Error::UnsupportedField(q));
        }
        spec.alpha = alpha;
        let mut exp = Vec::with_capacity(qs - 1);
        let mut log = vec![0u8; qs];
        let mut x = 1u8;
        for i in 0..q - 1 {
            exp.push(x);
            log[x as usize] = i as u8;
            x = spec.mul(x, alpha);
        }
        spec.exp = exp;
        spec.log = log;
        Ok(spec)
    }

    fn mult_order(&self, a: u8) -> u32 {
        if a == 0 {
            return 0;
        }
        let mut x = a;
        let mut ord = 1;
        while x != 1 {
            x = self.mul(x, a);
            ord += 1;
        }
        ord
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients (low degree first) for extension fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    /// The fixed generator of the multiplicative group.
    pub fn alpha(&self) -> u8 {
        self.alpha
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u8) -> Option<u8> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize] as u32;
        Some(self.exp(((self.q - 1 - l) % (self.q - 1)) as usize))
    }

    /// `alpha^i`.
    pub fn exp(&self, i: usize) -> u8 {
        self.exp[i % (self.q as usize - 1)]
    }

    /// Discrete log base alpha of a nonzero element.
    pub fn log(&self, a: u8) -> Option<usize> {
        (a != 0).then(|| self.log[a as usize] as usize)
    }

    pub fn pow(&self, a: u8, mut e: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Textual form of an element: its integer value in a prime field, `a^i` otherwise.
    pub fn format_element(&self, a: u8) -> String {
        if self.k == 1 || a == 0 {
            a.to_string()
        } else {
            format!("a^{}", self.log[a as usize])
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<u8> {
        let s = s.trim();
        if let Some(e) = s.strip_prefix("a^") {
            let i: usize = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            return Ok(self.exp(i));
        }
        let v: u32 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad field element {s:?}")))?;
        if self.k > 1 && v > 1 {
            return Err(Error::Parse(format!(
                "extension-field entries must be 0, 1 or a^i, got {s:?}"
            )));
        }
        if v >= self.q {
            return Err(Error::Parse(format!("{v} is not an element of GF({})", self.q)));
        }
        Ok(v as u8)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)?;
        if let Some(m) = &self.modulus {
            write!(f, " mod {m:?}")?;
        }
        write!(f, " alpha={}", self.alpha)
    }
}

/// GF(q^2) built as GF(q)[t]/(t^2 - c1 t - c0). Only used to obtain `beta + beta^q`.
#[derive(Clone, Debug)]
pub struct QuadraticExtension<'a> {
    base: &'a FieldSpec,
    c0: u8,
    c1: u8,
}

impl<'a> QuadraticExtension<'a> {
    /// Uses the first irreducible `t^2 - c1 t - c0` in `(c0, c1)` lexicographic order.
    pub fn new(base: &'a FieldSpec) -> Self {
        let q = base.q() as u8;
        for c0 in 0..q {
            for c1 in 0..q {
                let has_root = (0..q).any(|x| {
                    let v = base.sub(base.sub(base.mul(x, x), base.mul(c1, x)), c0);
                    v == 0
                });
                if !has_root {
                    return Self { base, c0, c1 };
                }
            }
        }
        unreachable!("every finite field has an irreducible quadratic")
    }

    pub fn mul(&self, a: (u8, u8), b: (u8, u8)) -> (u8, u8) {
        let f = self.base;
        // (a0 + a1 t)(b0 + b1 t) = a0b0 + (a0b1 + a1b0) t + a1b1 t^2
        let t2 = f.mul(a.1, b.1);
        let c0 = f.add(f.mul(a.0, b.0), f.mul(t2, self.c0));
        let c1 = f.add(f.add(f.mul(a.0, b.1), f.mul(a.1, b.0)), f.mul(t2, self.c1));
        (c0, c1)
    }

    pub fn pow(&self, a: (u8, u8), mut e: u64) -> (u8, u8) {
        let mut base = a;
        let mut acc = (1u8, 0u8);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn order(&self, a: (u8, u8)) -> u64 {
        if a == (0, 0) {
            return 0;
        }
        let mut x = a;
        let mut ord = 1;
        while x != (1, 0) {
            x = self.mul(x, a);
            ord += 1;
        }
        ord
    }

    /// The first generator of GF(q^2)^* (ordered by `a0 + a1 q`) whose norm
    /// `beta^(q+1)` equals the base field's alpha, together with `beta + beta^q`.
    pub fn generator_with_norm_alpha(&self) -> ((u8, u8), u8) {
        let f = self.base;
        let q = f.q() as u64;
        let full = q * q - 1;
        for a1 in 0..q as u8 {
            for a0 in 0..q as u8 {
                let beta = (a0, a1);
                if self.order(beta) != full {
                    continue;
                }
                let norm = self.pow(beta, q + 1);
                debug_assert_eq!(norm.1, 0);
                if norm.0 != f.alpha() {
                    continue;
                }
                let conj = self.pow(beta, q);
                let trace = (f.add(beta.0, conj.0), f.add(beta.1, conj.1));
                debug_assert_eq!(trace.1, 0, "trace must lie in the base field");
                return (beta, trace.0);
            }
        }
        unreachable!("a primitive element of norm alpha always exists")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supported_fields_have_consistent_tables() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = FieldSpec::new(q).unwrap();
            for a in 0..q as u8 {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "GF({q}) inverse of {a}");
                    assert_eq!(f.exp(f.log(a).unwrap()), a);
                }
            }
            assert_eq!(f.mult_order(f.alpha()), q - 1);
            assert_eq!(f.exp(q as usize - 1), 1);
            // distributivity spot check
            for a in 0..q as u8 {
                for b in 0..q as u8 {
                    let c = (a + b) % q as u8;
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn unsupported_fields() {
        for q in [0, 1, 6, 10, 12, 17, 25, 32] {
            assert!(FieldSpec::new(q).is_err(), "q={q}");
        }
    }

    #[test]
    fn element_text() {
        let f = FieldSpec::new(4).unwrap();
        assert_eq!(f.format_element(f.alpha()), "a^1");
        assert_eq!(f.parse_element("a^2").unwrap(), f.mul(f.alpha(), f.alpha()));
        assert!(f.parse_element("3").is_err());
        let g = FieldSpec::new(5).unwrap();
        assert_eq!(g.format_element(4), "4");
        assert!(g.parse_element("5").is_err());
    }

    #[test]
    fn quadratic_extension_generator() {
        for q in [3, 4, 5, 7] {
            let f = FieldSpec::new(q).unwrap();
            let ext = QuadraticExtension::new(&f);
            let (beta, trace) = ext.generator_with_norm_alpha();
            assert_eq!(ext.order(beta), (q as u64).pow(2) - 1);
            assert!((trace as u32) < q);
        }
    }
}
