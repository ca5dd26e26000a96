//! Arithmetic in GF(p^e) for p^e <= 2^16.
//!
//! Elements are carried as integers in `[0, q)`: the base-p digits of the
//! integer are the coefficients of the element as a polynomial in `x` modulo
//! the field's irreducible modulus (digit 0 is the constant term). The integer
//! value doubles as the element's position in the fixed enumeration
//! `α_0 = 0, α_1, …, α_{q-1}`, so share files and wire messages can store
//! symbols as plain little-endian integers.
//!
//! Multiplication goes through log/antilog tables built once when the field
//! is constructed. Addition is XOR in characteristic 2, modular addition in
//! prime fields, and digit-wise for odd-characteristic extensions.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree {0} out of range 1..=16")]
    BadDegree(u32),
    #[error("field order {p}^{e} exceeds 2^16")]
    TooLarge { p: u32, e: u32 },
    #[error("no irreducible polynomial of degree {e} over GF({p}) found")]
    NoIrreducible { p: u32, e: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {e} over GF({p})")]
    BadModulus { p: u32, e: u32 },
    #[error("value {value} is not an element of GF({q})")]
    OutOfRange { value: u64, q: usize },
    #[error("inversion of zero")]
    ZeroInverse,
}

/// A field element, stored as its enumeration index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    /// The enumeration index `i` such that this element is `α_i`.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α{}", self.0)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Inner {
    p: u32,
    e: u32,
    q: usize,
    modulus: Vec<u16>,
    log: Vec<u16>,
    exp: Vec<u16>,
    // only for odd-characteristic extension fields small enough to tabulate
    add_table: Option<Vec<u16>>,
    fact: Vec<u32>,
    inv_fact: Vec<u32>,
}

/// Handle to a finite field GF(p^e). Cheap to clone; immutable after
/// construction.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.inner.p)
            .field("e", &self.inner.e)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.e == other.inner.e
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `C(j, i) mod p` by Lucas' theorem. Returns 0 when `i > j`.
pub fn binom_mod_p(j: u64, i: u64, p: u32) -> u64 {
    if i > j {
        return 0;
    }
    let p = p as u64;
    let (mut j, mut i) = (j, i);
    let mut acc = 1u64;
    while i > 0 || j > 0 {
        let (jd, id) = (j % p, i % p);
        if id > jd {
            return 0;
        }
        acc = acc * small_binom_mod(jd, id, p) % p;
        j /= p;
        i /= p;
    }
    acc
}

// C(a, b) mod p for a < p, via the multiplicative formula.
fn small_binom_mod(a: u64, b: u64, p: u64) -> u64 {
    let b = b.min(a - b);
    let (mut num, mut den) = (1u64, 1u64);
    for k in 0..b {
        num = num * ((a - k) % p) % p;
        den = den * ((k + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

fn pow_mod(mut b: u64, mut k: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}

// Polynomials over GF(p) as coefficient vectors, low degree first.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = pow_mod(b[db] as u64, p as u64 - 2, p as u64);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = (*r.last().unwrap() as u64 * lead_inv) % p as u64;
        for (k, &bk) in b.iter().enumerate() {
            let sub = factor * bk as u64 % p as u64;
            let slot = &mut r[shift + k];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = (v % p as u64) as u32;
        v /= p as u64;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u64 {
    d.iter()
        .rev()
        .fold(0u64, |acc, &x| acc * p as u64 + x as u64)
}

/// Trial division by every monic polynomial of degree 1..=e/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let e = modulus.len() - 1;
    if e == 1 {
        return true;
    }
    for deg in 1..=e / 2 {
        let count = (p as u64).pow(deg as u32);
        for low in 0..count {
            let mut divisor = digits(low, p, deg);
            divisor.push(1);
            if poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn default_modulus(p: u32, e: u32) -> Result<Vec<u32>, FieldError> {
    match (p, e) {
        (2, 4) => return Ok(vec![1, 1, 0, 0, 1]),
        (2, 8) => return Ok(vec![1, 1, 0, 1, 1, 0, 0, 0, 1]),
        _ => {}
    }
    let count = (p as u64).pow(e);
    for low in 0..count {
        let mut m = digits(low, p, e as usize);
        m.push(1);
        if is_irreducible(&m, p) {
            return Ok(m);
        }
    }
    Err(FieldError::NoIrreducible { p, e })
}

impl Field {
    /// GF(p^e) with the canonical modulus: x^4+x+1 for GF(16),
    /// x^8+x^4+x^3+x+1 for GF(256), otherwise the smallest monic irreducible
    /// polynomial when its low coefficients are read as a base-p integer.
    pub fn new(p: u32, e: u32) -> Result<Field, FieldError> {
        Self::check_size(p, e)?;
        let modulus = default_modulus(p, e)?;
        Self::build(p, e, modulus)
    }

    /// GF(p^e) with an explicit modulus (e+1 coefficients, constant term
    /// first), as read from a share header.
    pub fn with_modulus(p: u32, e: u32, modulus: &[u16]) -> Result<Field, FieldError> {
        Self::check_size(p, e)?;
        let m: Vec<u32> = modulus.iter().map(|&c| c as u32).collect();
        if m.len() != e as usize + 1
            || m[e as usize] != 1
            || m.iter().any(|&c| c >= p)
            || !is_irreducible(&m, p)
        {
            return Err(FieldError::BadModulus { p, e });
        }
        Self::build(p, e, m)
    }

    pub fn gf16() -> Field {
        Field::new(2, 4).expect("GF(16)")
    }

    pub fn gf256() -> Field {
        Field::new(2, 8).expect("GF(256)")
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Field, FieldError> {
        if !(2..=MAX_ORDER).contains(&q) {
            return Err(FieldError::TooLarge { p: q as u32, e: 1 });
        }
        let mut p = 2u64;
        while !q.is_multiple_of(p) {
            p += 1;
        }
        let mut e = 0u32;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            e += 1;
        }
        if r != 1 {
            return Err(FieldError::NotPrime(q as u32));
        }
        Field::new(p as u32, e)
    }

    fn check_size(p: u32, e: u32) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if !(1..=16).contains(&e) {
            return Err(FieldError::BadDegree(e));
        }
        match (p as u64).checked_pow(e) {
            Some(q) if q <= MAX_ORDER => Ok(()),
            _ => Err(FieldError::TooLarge { p, e }),
        }
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Result<Field, FieldError> {
        let q = (p as usize).pow(e);
        let width = e as usize;
        let slow_mul = |a: u64, b: u64| -> u64 {
            let (da, db) = (digits(a, p, width), digits(b, p, width));
            let mut prod = vec![0u32; 2 * width - 1];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            let mut r = poly_rem(&prod, &modulus, p);
            r.resize(width, 0);
            undigits(&r, p)
        };

        // smallest generator of the multiplicative group
        let mut exp = Vec::with_capacity(2 * (q - 1));
        let mut log = vec![0u16; q];
        let mut found = false;
        for g in 1..q as u64 {
            exp.clear();
            let mut x = 1u64;
            for _ in 0..q - 1 {
                exp.push(x as u16);
                x = slow_mul(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() == q - 1 && x == 1 {
                found = true;
                break;
            }
        }
        if !found {
            return Err(FieldError::BadModulus { p, e });
        }
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u16;
        }
        let head: Vec<u16> = exp.clone();
        exp.extend_from_slice(&head);

        let add_table = if p != 2 && e > 1 && q <= 1024 {
            let mut t = vec![0u16; q * q];
            for a in 0..q {
                for b in 0..q {
                    t[a * q + b] = digit_add(a as u64, b as u64, p, width) as u16;
                }
            }
            Some(t)
        } else {
            None
        };

        let mut fact = vec![1u32; p as usize];
        for k in 1..p as usize {
            fact[k] = ((fact[k - 1] as u64 * k as u64) % p as u64) as u32;
        }
        let inv_fact = fact
            .iter()
            .map(|&f| pow_mod(f as u64, p as u64 - 2, p as u64) as u32)
            .collect();

        Ok(Field {
            inner: Arc::new(Inner {
                p,
                e,
                q,
                modulus: modulus.iter().map(|&c| c as u16).collect(),
                log,
                exp,
                add_table,
                fact,
                inv_fact,
            }),
        })
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.inner.q
    }

    /// Modulus coefficients, constant term first, length e+1.
    pub fn modulus(&self) -> &[u16] {
        &self.inner.modulus
    }

    /// Bits of information per symbol, `log2 q`.
    pub fn bits_per_symbol(&self) -> f64 {
        (self.inner.q as f64).log2()
    }

    /// Bytes used to store one symbol: `ceil(ceil(log2 q) / 8)`.
    pub fn symbol_bytes(&self) -> usize {
        let bits = usize::BITS - (self.inner.q - 1).leading_zeros();
        (bits as usize).div_ceil(8).max(1)
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    #[inline]
    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// The element `α_i`.
    pub fn elem(&self, i: u64) -> Result<Fe, FieldError> {
        if i < self.inner.q as u64 {
            Ok(Fe(i as u16))
        } else {
            Err(FieldError::OutOfRange {
                value: i,
                q: self.inner.q,
            })
        }
    }

    /// `α_i`, panicking when `i >= q`.
    #[inline]
    pub fn alpha(&self, i: usize) -> Fe {
        assert!(i < self.inner.q, "α_{i} outside GF({})", self.inner.q);
        Fe(i as u16)
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.index() < self.inner.q
    }

    /// Image of the integer `n` in the prime subfield.
    #[inline]
    pub fn from_int(&self, n: u64) -> Fe {
        Fe((n % self.inner.p as u64) as u16)
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.inner.q).map(|i| Fe(i as u16))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.inner.q) as u16)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.inner.q) as u16)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.inner;
        if inner.p == 2 {
            Fe(a.0 ^ b.0)
        } else if inner.e == 1 {
            Fe(((a.0 as u32 + b.0 as u32) % inner.p) as u16)
        } else if let Some(t) = &inner.add_table {
            Fe(t[a.index() * inner.q + b.index()])
        } else {
            Fe(digit_add(a.0 as u64, b.0 as u64, inner.p, inner.e as usize) as u16)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let inner = &*self.inner;
        if inner.p == 2 || a.0 == 0 {
            a
        } else if inner.e == 1 {
            Fe((inner.p - a.0 as u32) as u16)
        } else {
            let d = digits(a.0 as u64, inner.p, inner.e as usize);
            let n: Vec<u32> = d.iter().map(|&x| (inner.p - x) % inner.p).collect();
            Fe(undigits(&n, inner.p) as u16)
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        if self.inner.p == 2 {
            Fe(a.0 ^ b.0)
        } else {
            self.add(a, self.neg(b))
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let inner = &*self.inner;
        let s = inner.log[a.index()] as usize + inner.log[b.index()] as usize;
        Fe(inner.exp[s])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let inner = &*self.inner;
        let l = inner.log[a.index()] as usize;
        Ok(Fe(inner.exp[(inner.q - 1 - l) % (inner.q - 1)]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, k: u64) -> Fe {
        if k == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let inner = &*self.inner;
        let order = (inner.q - 1) as u64;
        let l = inner.log[a.index()] as u64;
        Fe(inner.exp[((l * (k % order)) % order) as usize])
    }

    /// `C(j, i)` reduced into the prime subfield.
    pub fn binom(&self, j: u64, i: u64) -> Fe {
        if i > j {
            return Fe::ZERO;
        }
        let p = self.inner.p as u64;
        let (mut j, mut i) = (j, i);
        let mut acc = 1u64;
        while i > 0 || j > 0 {
            let (jd, id) = ((j % p) as usize, (i % p) as usize);
            if id > jd {
                return Fe::ZERO;
            }
            let inner = &*self.inner;
            acc = acc * inner.fact[jd] as u64 % p * inner.inv_fact[id] as u64 % p
                * inner.inv_fact[jd - id] as u64
                % p;
            j /= p;
            i /= p;
        }
        self.from_int(acc)
    }

    pub fn sum<I: IntoIterator<Item = Fe>>(&self, it: I) -> Fe {
        it.into_iter().fold(Fe::ZERO, |acc, x| self.add(acc, x))
    }

    /// Dot product of two equal-length slices.
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .fold(Fe::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

fn digit_add(a: u64, b: u64, p: u32, width: usize) -> u64 {
    let (da, db) = (digits(a, p, width), digits(b, p, width));
    let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
    undigits(&s, p)
}
