//! Truncated power series `F_q[t]/(t^T)` and their unit group.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finite_field::{FqElem, FqSpec};

/// A power series over `F_q` known exactly modulo `t^prec`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    field: Arc<FqSpec>,
    coeffs: Vec<FqElem>,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(t^{})", self, self.prec())
    }
}

pub(crate) fn same_field(a: &Arc<FqSpec>, b: &Arc<FqSpec>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::SpecMismatch)
    }
}

impl TruncSeries {
    /// Wraps a coefficient vector; `coeffs[i]` is the coefficient of `t^i`.
    pub fn new(field: Arc<FqSpec>, coeffs: Vec<FqElem>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InsufficientPrecision {
                needed: 1,
                available: 0,
            });
        }
        Ok(TruncSeries { field, coeffs })
    }

    /// Builds a series from the first `prec` entries of `coeffs`, padding with zeros.
    pub fn from_coeffs(field: Arc<FqSpec>, coeffs: &[FqElem], prec: usize) -> Result<Self> {
        let mut v: Vec<FqElem> = coeffs.iter().copied().take(prec).collect();
        v.resize(prec, FqElem::ZERO);
        Self::new(field, v)
    }

    pub fn zero(field: Arc<FqSpec>, prec: usize) -> Result<Self> {
        Self::new(field, vec![FqElem::ZERO; prec])
    }

    pub fn constant(field: Arc<FqSpec>, c: FqElem, prec: usize) -> Result<Self> {
        Self::monomial(field, c, 0, prec)
    }

    pub fn one(field: Arc<FqSpec>, prec: usize) -> Result<Self> {
        let one = field.one();
        Self::constant(field, one, prec)
    }

    /// `c * t^deg` modulo `t^prec`.
    pub fn monomial(field: Arc<FqSpec>, c: FqElem, deg: usize, prec: usize) -> Result<Self> {
        let mut v = vec![FqElem::ZERO; prec];
        if deg < prec {
            v[deg] = c;
        }
        Self::new(field, v)
    }

    pub fn field(&self) -> &Arc<FqSpec> {
        &self.field
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Option<FqElem> {
        self.coeffs.get(i).copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    /// Value at `t = 0`.
    pub fn eval0(&self) -> FqElem {
        self.coeffs[0]
    }

    pub fn truncate(&self, prec: usize) -> Result<Self> {
        if prec > self.prec() || prec == 0 {
            return Err(Error::InsufficientPrecision {
                needed: prec.max(1),
                available: self.prec(),
            });
        }
        Ok(TruncSeries {
            field: self.field.clone(),
            coeffs: self.coeffs[..prec].to_vec(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(TruncSeries {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(TruncSeries {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        TruncSeries {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, c: FqElem) -> Self {
        let f = &self.field;
        TruncSeries {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Product at precision `min(prec(self), prec(other))`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let prec = self.prec().min(other.prec());
        let mut out = vec![FqElem::ZERO; prec];
        mul_into(
            &self.field,
            &self.coeffs[..prec],
            &other.coeffs[..prec],
            &mut out,
        );
        Ok(TruncSeries {
            field: self.field.clone(),
            coeffs: out,
        })
    }

    /// Multiplicative inverse modulo `t^prec`.
    pub fn inv(&self) -> Result<Self> {
        let f = &self.field;
        let c0_inv = f.inv(self.coeffs[0]).map_err(|_| Error::NonUnit)?;
        let n = self.prec();
        let mut out = vec![FqElem::ZERO; n];
        out[0] = c0_inv;
        for i in 1..n {
            let mut acc = FqElem::ZERO;
            for j in 1..=i {
                acc = f.add(acc, f.mul(self.coeffs[j], out[i - j]));
            }
            out[i] = f.neg(f.mul(acc, c0_inv));
        }
        Ok(TruncSeries {
            field: self.field.clone(),
            coeffs: out,
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = TruncSeries::one(self.field.clone(), self.prec()).unwrap();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).unwrap();
            }
        }
        acc
    }

    /// Canonical byte key: characteristic, degree, precision, coefficient indices.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(12 + 2 * self.prec());
        key.extend_from_slice(&self.field.characteristic().to_le_bytes());
        key.extend_from_slice(&self.field.degree().to_le_bytes());
        key.extend_from_slice(&(self.prec() as u32).to_le_bytes());
        for c in &self.coeffs {
            key.extend_from_slice(&(c.index() as u16).to_le_bytes());
        }
        key
    }

    /// Parses `c0+c1*t+c2*t^2+...` (terms in any order, `-` allowed) modulo `t^prec`.
    pub fn parse(field: Arc<FqSpec>, literal: &str, prec: usize) -> Result<Self> {
        let mut coeffs = vec![FqElem::ZERO; prec.max(1)];
        let text: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::Parse("empty series literal".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0usize;
        let mut negative = false;
        let mut current = String::new();
        for ch in text.chars() {
            match ch {
                '[' => {
                    depth += 1;
                    current.push(ch);
                }
                ']' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| Error::Parse("unbalanced ']'".into()))?;
                    current.push(ch);
                }
                '+' | '-' if depth == 0 => {
                    if !current.is_empty() {
                        terms.push((negative, std::mem::take(&mut current)));
                    } else if !terms.is_empty() || negative {
                        return Err(Error::Parse(format!("dangling sign in {literal:?}")));
                    }
                    negative = ch == '-';
                }
                _ => current.push(ch),
            }
        }
        if current.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {literal:?}")));
        }
        terms.push((negative, current));

        for (negative, term) in terms {
            let (coeff_text, deg) = split_term(&term)?;
            let c = match coeff_text {
                Some(text) => field.parse_elem(text)?,
                None => field.one(),
            };
            let c = if negative { field.neg(c) } else { c };
            if deg < coeffs.len() {
                coeffs[deg] = field.add(coeffs[deg], c);
            }
        }
        coeffs.truncate(prec.max(1));
        Self::new(field, coeffs)
    }
}

fn split_term(term: &str) -> Result<(Option<&str>, usize)> {
    let bad = || Error::Parse(format!("bad series term {term:?}"));
    let (coeff, var) = match term.find('t') {
        None => return Ok((Some(term), 0)),
        Some(pos) => (&term[..pos], &term[pos..]),
    };
    let coeff = match coeff {
        "" => None,
        c => Some(c.strip_suffix('*').ok_or_else(bad)?),
    };
    let deg = match var {
        "t" => 1,
        v => v
            .strip_prefix("t^")
            .ok_or_else(bad)?
            .parse::<usize>()
            .map_err(|_| bad())?,
    };
    Ok((coeff, deg))
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = &self.field;
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                out.write_str("+")?;
            }
            first = false;
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            if i == 0 {
                out.write_str(&f.render(c))?;
            } else if c == f.one() {
                out.write_str(&var)?;
            } else {
                write!(out, "{}*{}", f.render(c), var)?;
            }
        }
        if first {
            out.write_str("0")?;
        }
        Ok(())
    }
}

/// Cauchy product of equal-length slices, truncated to `out.len()`.
pub(crate) fn mul_into(f: &FqSpec, a: &[FqElem], b: &[FqElem], out: &mut [FqElem]) {
    let n = out.len();
    out.iter_mut().for_each(|c| *c = FqElem::ZERO);
    for (i, &x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
}

/// A series with nonzero constant term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitClass(TruncSeries);

impl UnitClass {
    pub fn new(series: TruncSeries) -> Result<Self> {
        if series.is_unit() {
            Ok(UnitClass(series))
        } else {
            Err(Error::NonUnit)
        }
    }

    pub fn series(&self) -> &TruncSeries {
        &self.0
    }

    pub fn into_series(self) -> TruncSeries {
        self.0
    }

    pub fn inv(&self) -> UnitClass {
        UnitClass(self.0.inv().expect("units are invertible"))
    }

    pub fn mul(&self, other: &UnitClass) -> Result<UnitClass> {
        Ok(UnitClass(self.0.mul(&other.0)?))
    }
}

/// Advances `coeffs[from..]` as a base-q odometer (last position fastest).
/// Returns `false` after wrapping around.
#[inline]
pub(crate) fn odometer_step(q: usize, coeffs: &mut [FqElem], from: usize) -> bool {
    for i in (from..coeffs.len()).rev() {
        let next = coeffs[i].index() + 1;
        if next < q {
            coeffs[i] = FqElem::from_index_unchecked(next);
            return true;
        }
        coeffs[i] = FqElem::ZERO;
    }
    false
}

/// Default cap on the number of units an enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

/// `(q - 1) * q^(prec - 1)`, saturating.
pub fn unit_count(q: u64, prec: usize) -> u128 {
    let mut n = (q - 1) as u128;
    for _ in 1..prec {
        n = n.saturating_mul(q as u128);
    }
    n
}

pub fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// Iterator over the units of `F_q[t]/(t^prec)` sharing a fixed coefficient
/// prefix, in lexicographic coefficient order.
pub struct UnitIter {
    field: Arc<FqSpec>,
    current: Vec<FqElem>,
    fixed: usize,
    done: bool,
}

impl Iterator for UnitIter {
    type Item = UnitClass;

    fn next(&mut self) -> Option<UnitClass> {
        if self.done {
            return None;
        }
        let item = UnitClass(TruncSeries {
            field: self.field.clone(),
            coeffs: self.current.clone(),
        });
        let q = self.field.order() as usize;
        if self.fixed == 0 {
            // position 0 ranges over F_q^x only
            if !odometer_step(q, &mut self.current, 1) {
                let next = self.current[0].index() + 1;
                if next < q {
                    self.current[0] = FqElem::from_index_unchecked(next);
                } else {
                    self.done = true;
                }
            }
        } else if !odometer_step(q, &mut self.current, self.fixed) {
            self.done = true;
        }
        Some(item)
    }
}

/// All units modulo `t^prec`, lexicographic in `(c_0, c_1, ...)`.
pub fn unit_enumerate(field: Arc<FqSpec>, prec: usize, budget: u128) -> Result<UnitIter> {
    if prec == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    check_budget(unit_count(field.order() as u64, prec), budget)?;
    let mut current = vec![FqElem::ZERO; prec];
    current[0] = FqElem::from_index_unchecked(1);
    Ok(UnitIter {
        field,
        current,
        fixed: 0,
        done: false,
    })
}

/// Units whose leading coefficients equal `prefix`; `prefix[0]` must be nonzero.
///
/// Prefixes of a common length partition the unit group: distinct prefixes
/// give disjoint ranges and all nonzero-led prefixes together cover it.
pub fn unit_enumerate_with_prefix(
    field: Arc<FqSpec>,
    prec: usize,
    prefix: &[FqElem],
) -> Result<UnitIter> {
    if prefix.is_empty() || prefix.len() > prec {
        return Err(Error::ShapeMismatch(format!(
            "prefix length {} must be in 1..={prec}",
            prefix.len()
        )));
    }
    if prefix[0].is_zero() {
        return Err(Error::NonUnit);
    }
    let mut current = prefix.to_vec();
    current.resize(prec, FqElem::ZERO);
    Ok(UnitIter {
        field,
        current,
        fixed: prefix.len(),
        done: false,
    })
}

/// The unit prefixes of length `depth` (clamped to `1..=prec`).
pub fn unit_prefixes(field: &FqSpec, prec: usize, depth: usize) -> Vec<Vec<FqElem>> {
    let depth = depth.clamp(1, prec.max(1));
    let q = field.order() as usize;
    let mut out = Vec::new();
    for c0 in field.nonzero_elements() {
        let mut prefix = vec![FqElem::ZERO; depth];
        prefix[0] = c0;
        loop {
            out.push(prefix.clone());
            if !odometer_step(q, &mut prefix, 1) {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn fld(q: u32) -> Arc<FqSpec> {
        Arc::new(FqSpec::builtin(q).unwrap())
    }

    fn lit(f: &Arc<FqSpec>, s: &str, prec: usize) -> TruncSeries {
        TruncSeries::parse(f.clone(), s, prec).unwrap()
    }

    #[test]
    fn products() {
        let f3 = fld(3);
        assert_eq!(
            lit(&f3, "1+t", 3).mul(&lit(&f3, "1-t", 3)).unwrap(),
            lit(&f3, "1+2*t^2", 3)
        );
        let f2 = fld(2);
        assert_eq!(
            lit(&f2, "1+t", 3).mul(&lit(&f2, "1+t", 3)).unwrap(),
            lit(&f2, "1+t^2", 3)
        );
        let g = lit(&f3, "2+t+2*t^3", 5);
        assert_eq!(g.mul(&TruncSeries::one(f3.clone(), 5).unwrap()).unwrap(), g);
    }

    #[test]
    fn precision_is_minimum() {
        let f = fld(5);
        let a = lit(&f, "1+t+t^2+t^3", 6);
        let b = lit(&f, "2+t", 3);
        assert_eq!(a.mul(&b).unwrap().prec(), 3);
        assert_eq!(a.add(&b).unwrap().prec(), 3);
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = TruncSeries::one(fld(2), 3).unwrap();
        let b = TruncSeries::one(fld(3), 3).unwrap();
        assert_eq!(a.mul(&b), Err(Error::SpecMismatch));
        assert_eq!(a.add(&b), Err(Error::SpecMismatch));
    }

    #[test]
    fn inverses() {
        let f2 = fld(2);
        assert_eq!(
            lit(&f2, "1+t", 4).inv().unwrap(),
            lit(&f2, "1+t+t^2+t^3", 4)
        );
        let f3 = fld(3);
        assert_eq!(
            lit(&f3, "1-t", 4).inv().unwrap(),
            lit(&f3, "1+t+t^2+t^3", 4)
        );
        // (1+t)(1+2t+t^2) = 1 + 3t + 3t^2 + t^3 = 1 mod (3, t^3)
        assert_eq!(lit(&f3, "1+t", 3).inv().unwrap(), lit(&f3, "1+2*t+t^2", 3));
        assert_eq!(lit(&f3, "2", 3).inv().unwrap(), lit(&f3, "2", 3));
        assert_eq!(lit(&f3, "t", 3).inv(), Err(Error::NonUnit));
        assert_eq!(UnitClass::new(lit(&f3, "2*t", 3)), Err(Error::NonUnit));
    }

    #[test]
    fn eval_at_zero() {
        let f3 = fld(3);
        assert_eq!(lit(&f3, "1+t", 3).eval0(), f3.one());
        assert_eq!(lit(&f3, "t", 3).eval0(), f3.zero());
        assert_eq!(lit(&f3, "2+t^2", 3).eval0(), f3.from_int(2));
    }

    #[test]
    fn unit_enumeration_counts() {
        let f2 = fld(2);
        let units: HashSet<_> = unit_enumerate(f2.clone(), 3, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .map(|u| u.into_series())
            .collect();
        let expected: HashSet<_> = ["1", "1+t", "1+t^2", "1+t+t^2"]
            .iter()
            .map(|s| lit(&f2, s, 3))
            .collect();
        assert_eq!(units, expected);

        let f3 = fld(3);
        let t1: Vec<_> = unit_enumerate(f3.clone(), 1, u128::MAX).unwrap().collect();
        assert_eq!(t1.len(), 2);
        assert_eq!(t1[0].series(), &lit(&f3, "1", 1));
        assert_eq!(t1[1].series(), &lit(&f3, "2", 1));
        assert_eq!(unit_enumerate(f3.clone(), 2, u128::MAX).unwrap().count(), 6);

        for q in [2u32, 3, 4, 5] {
            for prec in 1..=5 {
                let f = fld(q);
                let all: Vec<_> = unit_enumerate(f, prec, u128::MAX).unwrap().collect();
                let distinct: HashSet<_> = all.iter().cloned().collect();
                assert_eq!(all.len() as u128, unit_count(q as u64, prec));
                assert_eq!(distinct.len(), all.len());
                let keys: Vec<_> = all.iter().map(|u| u.series().coeffs().to_vec()).collect();
                assert!(keys.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
            }
        }
    }

    #[test]
    fn enumeration_budget() {
        let f = fld(3);
        assert!(matches!(
            unit_enumerate(f, 10, 1000),
            Err(Error::BudgetExceeded {
                needed: 39366,
                budget: 1000
            })
        ));
    }

    #[test]
    fn prefix_partitions_are_disjoint_and_exhaustive() {
        let f = fld(3);
        let full: HashSet<_> = unit_enumerate(f.clone(), 4, u128::MAX).unwrap().collect();
        for depth in 1..=4 {
            let mut seen = HashSet::new();
            for prefix in unit_prefixes(&f, 4, depth) {
                for u in unit_enumerate_with_prefix(f.clone(), 4, &prefix).unwrap() {
                    assert!(seen.insert(u), "overlapping partitions");
                }
            }
            assert_eq!(seen, full);
        }
    }

    #[test]
    fn unit_group_closure_and_inverse_involution() {
        for q in [2u32, 3, 4] {
            for prec in 1..=6 {
                if unit_count(q as u64, prec) > 5000 {
                    continue;
                }
                let f = fld(q);
                let units: Vec<_> = unit_enumerate(f.clone(), prec, u128::MAX)
                    .unwrap()
                    .collect();
                let set: HashSet<_> = units.iter().cloned().collect();
                for u in &units {
                    let inv = u.inv();
                    assert!(set.contains(&inv));
                    assert_eq!(&inv.inv(), u);
                    assert!(
                        u.mul(&inv).unwrap().series()
                            == &TruncSeries::one(f.clone(), prec).unwrap()
                    );
                }
                for (a, b) in units.iter().zip(units.iter().rev()).take(50) {
                    assert!(set.contains(&a.mul(b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn literal_round_trip_extension_field() {
        let f = fld(9);
        let s = lit(&f, "[1,2]+t+[0,1]*t^3", 5);
        assert_eq!(s.to_string(), "[1,2]+t+[0,1]*t^3");
        assert_eq!(lit(&f, &s.to_string(), 5), s);
        assert!(TruncSeries::parse(f.clone(), "1++t", 3).is_err());
        assert!(TruncSeries::parse(f.clone(), "1+t^x", 3).is_err());
        assert_eq!(TruncSeries::zero(f, 3).unwrap().to_string(), "0");
    }

    #[test]
    fn canonical_keys_distinguish_precision() {
        let f = fld(2);
        assert_ne!(
            lit(&f, "1", 2).canonical_key(),
            lit(&f, "1", 3).canonical_key()
        );
        assert_eq!(
            lit(&f, "1+t", 3).canonical_key(),
            lit(&f, "t+1", 3).canonical_key()
        );
    }
}
