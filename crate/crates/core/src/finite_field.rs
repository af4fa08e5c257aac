//! Small finite fields `F_q`, `q = p^e`, in a dense polynomial basis.
//!
//! An [`FqSpec`] describes the field (characteristic, degree and defining
//! polynomial) and owns the arithmetic. Elements are plain [`FqElem`] handles
//! that only make sense together with the spec that produced them; the
//! container types (series, jets, Laurent elements) carry the spec and reject
//! operands from a different field with [`Error::SpecMismatch`].
//!
//! Element handles are ordered lexicographically by their coefficient vector
//! `(c_0, c_1, ..., c_{e-1})`, so `FqElem(0)` is zero and enumeration is just
//! counting.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Default upper bound on the field order.
pub const DEFAULT_MAX_ORDER: u32 = 256;

/// Hard ceiling for user configured bounds; keeps the operation tables small.
pub const HARD_MAX_ORDER: u32 = 1024;

/// An element of `F_q`, meaningful relative to its [`FqSpec`].
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(u16);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Callers keep `index < q`.
    #[inline]
    pub(crate) fn from_index_unchecked(index: usize) -> FqElem {
        FqElem(index as u16)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Built-in defining polynomials (low-to-high coefficients, monic).
const BUILTIN_POLYS: &[(u32, u32, &[u32])] = &[
    (4, 2, &[1, 1, 1]),
    (8, 2, &[1, 1, 0, 1]),
    (9, 3, &[1, 0, 1]),
    (16, 2, &[1, 1, 0, 0, 1]),
    (25, 5, &[2, 1, 1]),
    (27, 3, &[1, 2, 0, 1]),
];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// The field `F_q` with its operation tables.
#[derive(Clone)]
pub struct FqSpec {
    p: u32,
    e: u32,
    q: u32,
    poly: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl PartialEq for FqSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.poly == other.poly
    }
}

impl Eq for FqSpec {}

impl Hash for FqSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.poly.hash(state);
    }
}

impl fmt::Debug for FqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FqSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("poly", &self.poly)
            .finish()
    }
}

impl FqSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, vec![0, 1])
    }

    /// `F_p[x]/(poly)`; `poly` is low-to-high and must be monic and irreducible.
    pub fn new(p: u32, poly: Vec<u32>) -> Result<Self> {
        Self::with_bound(p, poly, DEFAULT_MAX_ORDER)
    }

    pub fn with_bound(p: u32, poly: Vec<u32>, max_order: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidCharacteristic(p as u64));
        }
        if poly.len() < 2 {
            return Err(Error::InvalidField(
                "defining polynomial must have degree >= 1".into(),
            ));
        }
        if poly.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!(
                "coefficients must be residues mod {p}"
            )));
        }
        if *poly.last().unwrap() != 1 {
            return Err(Error::InvalidField(
                "defining polynomial must be monic".into(),
            ));
        }
        let e = (poly.len() - 1) as u32;
        let q = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        let bound = max_order.min(HARD_MAX_ORDER) as u64;
        if q > bound {
            return Err(Error::InvalidField(format!(
                "q = {q} exceeds the bound {bound}"
            )));
        }
        if !is_irreducible(p, &poly) {
            return Err(Error::InvalidField(format!(
                "{poly:?} is reducible over F_{p}"
            )));
        }
        Ok(Self::build(p, e, q as u32, poly))
    }

    /// Prime fields and the built-in extension fields.
    pub fn builtin(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q as u64)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        if e == 1 {
            return Self::prime(p as u32);
        }
        BUILTIN_POLYS
            .iter()
            .find(|(bq, _, _)| *bq == q)
            .map(|(_, bp, poly)| {
                debug_assert_eq!(*bp as u64, p);
                Self::new(p as u32, poly.to_vec())
            })
            .unwrap_or_else(|| {
                Err(Error::InvalidField(format!(
                    "no built-in defining polynomial for q = {q}; declare one in the config file"
                )))
            })
    }

    fn build(p: u32, e: u32, q: u32, poly: Vec<u32>) -> Self {
        let qs = q as usize;
        let mut spec = FqSpec {
            p,
            e,
            q,
            poly,
            add: vec![0; qs * qs],
            mul: vec![0; qs * qs],
            neg: vec![0; qs],
            inv: vec![0; qs],
        };
        let digits: Vec<Vec<u32>> = (0..q).map(|i| spec.decode(i)).collect();
        for a in 0..qs {
            let da = &digits[a];
            let neg: Vec<u32> = da.iter().map(|&c| (p - c) % p).collect();
            spec.neg[a] = spec.encode(&neg) as u16;
            for b in 0..qs {
                let db = &digits[b];
                let sum: Vec<u32> = da.iter().zip(db).map(|(x, y)| (x + y) % p).collect();
                spec.add[a * qs + b] = spec.encode(&sum) as u16;
                spec.mul[a * qs + b] = spec.encode(&spec.poly_mulmod(da, db)) as u16;
            }
        }
        for a in 1..qs {
            let b = (1..qs)
                .find(|&b| spec.mul[a * qs + b] == spec.one().0)
                .unwrap();
            spec.inv[a] = b as u16;
        }
        spec
    }

    fn encode(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().fold(0, |acc, &c| acc * self.p + c)
    }

    fn decode(&self, mut index: u32) -> Vec<u32> {
        let mut out = vec![0; self.e as usize];
        for slot in out.iter_mut().rev() {
            *slot = index % self.p;
            index /= self.p;
        }
        out
    }

    fn poly_mulmod(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for deg in (e..2 * e).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &m) in self.poly[..e].iter().enumerate() {
                let idx = deg - e + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        prod.truncate(e);
        prod.into_iter().map(|c| c as u32).collect()
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn defining_poly(&self) -> &[u32] {
        &self.poly
    }

    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    #[inline]
    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    #[inline]
    pub fn from_int(&self, n: u64) -> FqElem {
        FqElem(((n % self.p as u64) * (self.q / self.p) as u64) as u16)
    }

    /// Inverse of `from_int` on the prime subfield.
    pub fn to_prime(&self, a: FqElem) -> Option<u32> {
        let step = self.q / self.p;
        (a.0 as u32).is_multiple_of(step).then(|| a.0 as u32 / step)
    }

    /// Builds an element from its residues `c_0..c_{e-1}` (polynomial basis).
    pub fn elem(&self, coeffs: &[u32]) -> Result<FqElem> {
        if coeffs.len() != self.e as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidField(format!(
                "expected {} residues mod {}, got {coeffs:?}",
                self.e, self.p
            )));
        }
        Ok(FqElem(self.encode(coeffs) as u16))
    }

    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        self.decode(a.0 as u32)
    }

    /// The generator `x` of the polynomial basis.
    pub fn generator(&self) -> FqElem {
        if self.e == 1 {
            return self.one();
        }
        let mut c = vec![0; self.e as usize];
        c[1] = 1;
        FqElem(self.encode(&c) as u16)
    }

    /// Checked handle conversion for raw indices.
    pub fn from_index(&self, index: usize) -> Option<FqElem> {
        (index < self.q as usize).then_some(FqElem(index as u16))
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.add[a.index() * self.q as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.mul[a.index() * self.q as usize + b.index()])
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FqElem(self.inv[a.index()]))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElem, mut exp: u64) -> FqElem {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// All `q` elements, zero first, lexicographic in the coefficient vector.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + Clone {
        (0..self.q as u16).map(FqElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FqElem> + Clone {
        (1..self.q as u16).map(FqElem)
    }

    /// Renders an element as an integer (prime fields) or `[c0,...]`.
    pub fn render(&self, a: FqElem) -> String {
        if self.e == 1 {
            a.0.to_string()
        } else {
            let parts: Vec<String> = self.coeffs(a).iter().map(u32::to_string).collect();
            format!("[{}]", parts.join(","))
        }
    }

    /// Parses the [`render`](Self::render) format.
    pub fn parse_elem(&self, s: &str) -> Result<FqElem> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|err| Error::Parse(format!("bad field element {s:?}: {err}")))?;
            return self.elem(&coeffs);
        }
        let n: u64 = s
            .parse()
            .map_err(|err| Error::Parse(format!("bad field element {s:?}: {err}")))?;
        if self.e == 1 && n >= self.p as u64 {
            return Err(Error::Parse(format!("{n} is not a residue mod {}", self.p)));
        }
        if self.e > 1 && n >= self.p as u64 {
            return Err(Error::Parse(format!(
                "{n} is not in the prime subfield; use [c0,...,c{}]",
                self.e - 1
            )));
        }
        Ok(self.from_int(n))
    }
}

/// Rejects polynomials with a monic factor of degree `<= deg/2`.
fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let deg = poly.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                div.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            div.push(1);
            if poly_rem(p, poly, &div).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(p: u32, num: &[u32], monic_div: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let p = p as u64;
    let dd = monic_div.len() - 1;
    for deg in (dd..r.len()).rev() {
        let c = r[deg] % p;
        if c == 0 {
            continue;
        }
        for (i, &m) in monic_div.iter().enumerate() {
            let idx = deg - dd + i;
            r[idx] = (r[idx] + (p - c) * m as u64) % p;
        }
    }
    r.truncate(dd);
    r.into_iter().map(|c| c as u32).collect()
}
