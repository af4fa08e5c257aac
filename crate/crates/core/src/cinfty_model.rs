//! A finite-precision slice of `C_inf`: truncated Laurent series in a
//! uniformizer `u` over `F_q`, together with the Anderson-Thakur function and
//! the functional equations of the Carlitz module and its prolongations.
//!
//! Convention: `zeta` is the fixed `(q-1)`-st root of `-theta` and
//! `u := zeta^-1`, so `zeta = u^-1` and `theta = -u^-(q-1)`. Every quantity
//! below then lives in `F_q((u))`.
//!
//! Each [`UInftyElem`] knows its coefficients for exponents below `uprec`
//! (or all of them when exact). Products follow the rule
//! `[vx, A) * [vy, B) -> [vx + vy, min(A + vy, B + vx))`, and comparisons are
//! made only where both sides are known.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::binomials::lucas;
use crate::error::{Error, Result};
use crate::finite_field::{FqElem, FqSpec};
use crate::power_series::same_field;

/// A Laurent series in `u` known below `uprec` (or exactly, when `uprec` is `None`).
#[derive(Clone, PartialEq, Eq)]
pub struct UInftyElem {
    field: Arc<FqSpec>,
    /// Exponent of `coeffs[0]`. For zero elements known to `U`, `val == U`.
    val: i64,
    coeffs: Vec<FqElem>,
    uprec: Option<i64>,
}

impl fmt::Debug for UInftyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!(
                    "{}*u^{}",
                    self.field.render(c),
                    self.val + i as i64
                ));
            }
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        match self.uprec {
            Some(u) => write!(f, "{} + O(u^{u})", terms.join(" + ")),
            None => write!(f, "{}", terms.join(" + ")),
        }
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Outcome of comparing two elements on their common known window.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Agreement {
    Equal,
    Differ,
    /// No exponent is known on both sides with a nonzero coefficient on either.
    Vacuous,
}

impl UInftyElem {
    /// `sum coeffs[i] u^(val + i)`, known below `uprec`.
    pub fn new(field: Arc<FqSpec>, val: i64, coeffs: Vec<FqElem>, uprec: Option<i64>) -> Self {
        UInftyElem {
            field,
            val,
            coeffs,
            uprec,
        }
        .normalized()
    }

    pub fn exact_zero(field: Arc<FqSpec>) -> Self {
        UInftyElem {
            field,
            val: 0,
            coeffs: Vec::new(),
            uprec: None,
        }
    }

    /// `O(u^uprec)`.
    pub fn zero_to(field: Arc<FqSpec>, uprec: i64) -> Self {
        UInftyElem {
            field,
            val: uprec,
            coeffs: Vec::new(),
            uprec: Some(uprec),
        }
    }

    /// The exact monomial `c u^exp`.
    pub fn monomial(field: Arc<FqSpec>, c: FqElem, exp: i64) -> Self {
        Self::new(field, exp, vec![c], None)
    }

    pub fn one(field: Arc<FqSpec>) -> Self {
        let one = field.one();
        Self::monomial(field, one, 0)
    }

    /// `theta = -u^-(q-1)`.
    pub fn theta(field: Arc<FqSpec>) -> Self {
        let minus_one = field.neg(field.one());
        let q = field.order() as i64;
        Self::monomial(field, minus_one, -(q - 1))
    }

    /// `zeta = (-theta)^(1/(q-1)) = u^-1`.
    pub fn zeta(field: Arc<FqSpec>) -> Self {
        let one = field.one();
        Self::monomial(field, one, -1)
    }

    fn normalized(mut self) -> Self {
        if let Some(u) = self.uprec {
            let keep = (u - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(i) => {
                self.coeffs.drain(..i);
                self.val += i as i64;
                if self.uprec.is_none() {
                    while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                        self.coeffs.pop();
                    }
                }
            }
            None => {
                self.coeffs.clear();
                self.val = self.uprec.unwrap_or(0);
            }
        }
        self
    }

    pub fn field(&self) -> &Arc<FqSpec> {
        &self.field
    }

    /// Lowest exponent with a nonzero coefficient (or `uprec` for a zero known to `uprec`).
    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn uprec(&self) -> Option<i64> {
        self.uprec
    }

    pub fn is_exact(&self) -> bool {
        self.uprec.is_none()
    }

    /// True when no nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `u^exp`, or `None` above the known window.
    pub fn coeff(&self, exp: i64) -> Option<FqElem> {
        if self.uprec.is_some_and(|u| exp >= u) {
            return None;
        }
        if exp < self.val {
            return Some(FqElem::ZERO);
        }
        Some(
            self.coeffs
                .get((exp - self.val) as usize)
                .copied()
                .unwrap_or(FqElem::ZERO),
        )
    }

    /// Forgets everything at or above `uprec`.
    pub fn with_uprec(&self, uprec: i64) -> Self {
        let u = min_prec(self.uprec, Some(uprec));
        Self::new(self.field.clone(), self.val, self.coeffs.clone(), u)
    }

    /// Replaces the coefficient of `u^exp`; used to build perturbed inputs.
    pub fn with_coeff(&self, exp: i64, c: FqElem) -> Result<Self> {
        if self.uprec.is_some_and(|u| exp >= u) {
            return Err(Error::ShapeMismatch(format!(
                "u^{exp} is outside the known window"
            )));
        }
        let lo = self.val.min(exp);
        let hi = (self.val + self.coeffs.len() as i64).max(exp + 1);
        let mut coeffs = vec![FqElem::ZERO; (hi - lo) as usize];
        for (i, &x) in self.coeffs.iter().enumerate() {
            coeffs[(self.val - lo) as usize + i] = x;
        }
        coeffs[(exp - lo) as usize] = c;
        Ok(Self::new(self.field.clone(), lo, coeffs, self.uprec))
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let f = &self.field;
        let uprec = min_prec(self.uprec, other.uprec);
        if self.is_zero() && other.is_zero() {
            return Ok(match uprec {
                Some(u) => Self::zero_to(self.field.clone(), u),
                None => Self::exact_zero(self.field.clone()),
            });
        }
        let ends = |x: &Self| x.val + x.coeffs.len() as i64;
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for x in [self, other] {
            if !x.is_zero() {
                lo = lo.min(x.val);
                hi = hi.max(ends(x));
            }
        }
        if let Some(u) = uprec {
            hi = hi.min(u);
        }
        let len = (hi - lo).max(0) as usize;
        let mut coeffs = vec![FqElem::ZERO; len];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            let e = lo + i as i64;
            let a = self.coeff(e).unwrap_or(FqElem::ZERO);
            let b = other.coeff(e).unwrap_or(FqElem::ZERO);
            *slot = if subtract { f.sub(a, b) } else { f.add(a, b) };
        }
        Ok(Self::new(self.field.clone(), lo, coeffs, uprec))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.neg(self.field.one()))
    }

    pub fn scale(&self, c: FqElem) -> Self {
        if c.is_zero() {
            return match self.uprec {
                Some(_) if self.is_zero() => self.clone(),
                // c * x is exactly zero only where x is known; outside it is unknown anyway
                Some(u) => Self::zero_to(self.field.clone(), u),
                None => Self::exact_zero(self.field.clone()),
            };
        }
        let f = &self.field;
        let coeffs = self.coeffs.iter().map(|&a| f.mul(a, c)).collect();
        Self::new(self.field.clone(), self.val, coeffs, self.uprec)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let exact_zero = |x: &Self| x.is_exact() && x.is_zero();
        if exact_zero(self) || exact_zero(other) {
            return Ok(Self::exact_zero(self.field.clone()));
        }
        let val = self.val + other.val;
        let uprec = min_prec(
            self.uprec.map(|a| a + other.val),
            other.uprec.map(|b| b + self.val),
        );
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero_to(
                self.field.clone(),
                uprec.expect("inexact zero operand"),
            ));
        }
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = match uprec {
            Some(u) => full.min((u - val).max(0) as usize),
            None => full,
        };
        let f = &self.field;
        let mut coeffs = vec![FqElem::ZERO; len];
        for (i, &x) in self.coeffs.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(x, y));
            }
        }
        Ok(Self::new(self.field.clone(), val, coeffs, uprec))
    }

    /// Multiplicative inverse. An element `c u^v (1 + ...)` known below `A`
    /// has its inverse known below `A - 2v`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let c0_inv = f.inv(self.coeffs[0])?;
        let v = self.val;
        let n = match self.uprec {
            None if self.coeffs.len() == 1 => {
                return Ok(Self::monomial(self.field.clone(), c0_inv, -v));
            }
            None => return Err(Error::UnboundedInverse),
            Some(a) => (a - v) as usize,
        };
        let mut out = vec![FqElem::ZERO; n];
        out[0] = c0_inv;
        for i in 1..n {
            let mut acc = FqElem::ZERO;
            for j in 1..=i.min(self.coeffs.len() - 1) {
                acc = f.add(acc, f.mul(self.coeffs[j], out[i - j]));
            }
            out[i] = f.neg(f.mul(acc, c0_inv));
        }
        Ok(Self::new(
            self.field.clone(),
            -v,
            out,
            self.uprec.map(|a| a - 2 * v),
        ))
    }

    /// The q-power Frobenius `x -> x^q`: `sum a_i u^i -> sum a_i u^(iq)`
    /// (coefficients in `F_q` are fixed), known below `q * uprec`.
    pub fn frobenius_q(&self) -> Self {
        let q = self.field.order() as i64;
        if self.is_zero() {
            return match self.uprec {
                Some(u) => Self::zero_to(self.field.clone(), q * u),
                None => Self::exact_zero(self.field.clone()),
            };
        }
        let len = (self.coeffs.len() - 1) * q as usize + 1;
        let mut coeffs = vec![FqElem::ZERO; len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * q as usize] = c;
        }
        Self::new(
            self.field.clone(),
            q * self.val,
            coeffs,
            self.uprec.map(|u| q * u),
        )
    }

    pub fn pow(&self, exp: u64) -> Result<Self> {
        let mut acc = Self::one(self.field.clone());
        for _ in 0..exp {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Compares on the common known window `(-inf, min(uprec))`.
    pub fn agreement(&self, other: &Self) -> Result<Agreement> {
        same_field(&self.field, &other.field)?;
        let bound = min_prec(self.uprec, other.uprec);
        let diff = self.sub(other)?;
        if !diff.is_zero() {
            return Ok(Agreement::Differ);
        }
        let informative = |x: &Self| match bound {
            None => true,
            Some(b) => !x.is_zero() && x.val < b,
        };
        if bound.is_none() || informative(self) || informative(other) {
            Ok(Agreement::Equal)
        } else {
            Ok(Agreement::Vacuous)
        }
    }

    /// `(exponent, coefficient)` pairs of the known nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.val + i as i64, c))
    }

    /// Coefficients for exponents `val..uprec` (or to the last nonzero term).
    pub fn raw_coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }
}

/// A power series in `t` whose coefficients are [`UInftyElem`]s, known
/// modulo `t^tprec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateSeries {
    field: Arc<FqSpec>,
    entries: Vec<UInftyElem>,
}

impl TateSeries {
    pub fn new(field: Arc<FqSpec>, entries: Vec<UInftyElem>) -> Result<Self> {
        for e in &entries {
            same_field(&field, e.field())?;
        }
        Ok(TateSeries { field, entries })
    }

    pub fn zero(field: Arc<FqSpec>, tprec: usize) -> Self {
        let entries = vec![UInftyElem::exact_zero(field.clone()); tprec];
        TateSeries { field, entries }
    }

    pub fn field(&self) -> &Arc<FqSpec> {
        &self.field
    }

    pub fn tprec(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[UInftyElem] {
        &self.entries
    }

    pub fn entry(&self, n: usize) -> &UInftyElem {
        &self.entries[n]
    }

    pub fn truncate(&self, tprec: usize) -> Self {
        TateSeries {
            field: self.field.clone(),
            entries: self.entries[..tprec.min(self.tprec())].to_vec(),
        }
    }

    pub fn with_entry(&self, n: usize, value: UInftyElem) -> Self {
        let mut out = self.clone();
        out.entries[n] = value;
        out
    }

    /// `D^(j)` in `t`: entry `i` is `C(i + j, j) * entry(i + j)`.
    pub fn hyperderiv(&self, j: usize) -> Self {
        let f = &self.field;
        let p = f.characteristic() as u64;
        let len = self.tprec().saturating_sub(j);
        let entries = (0..len)
            .map(|i| self.entries[i + j].scale(f.from_int(lucas((i + j) as u64, j as u64, p))))
            .collect();
        TateSeries {
            field: self.field.clone(),
            entries,
        }
    }

    /// `tau` applied coefficientwise (t-linear extension of Frobenius).
    pub fn frobenius(&self) -> Self {
        TateSeries {
            field: self.field.clone(),
            entries: self.entries.iter().map(UInftyElem::frobenius_q).collect(),
        }
    }

    /// `t * self`, same t-precision is lost by one at the top.
    pub fn shift_t(&self) -> Self {
        let mut entries = Vec::with_capacity(self.tprec());
        if self.tprec() > 0 {
            entries.push(UInftyElem::exact_zero(self.field.clone()));
            entries.extend(self.entries[..self.tprec() - 1].iter().cloned());
        }
        TateSeries {
            field: self.field.clone(),
            entries,
        }
    }

    pub fn scale_by(&self, x: &UInftyElem) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.mul(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(TateSeries {
            field: self.field.clone(),
            entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TateSeries {
            field: self.field.clone(),
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TateSeries {
            field: self.field.clone(),
            entries,
        })
    }

    /// `(t - theta) * self`.
    pub fn mul_t_minus_theta(&self) -> Result<Self> {
        let theta = UInftyElem::theta(self.field.clone());
        self.shift_t().sub(&self.scale_by(&theta)?)
    }
}

/// Running tally of entrywise comparisons.
#[derive(Default)]
struct Tally {
    informative: usize,
    differ: bool,
}

impl Tally {
    fn record(&mut self, a: &UInftyElem, b: &UInftyElem) -> Result<()> {
        match a.agreement(b)? {
            Agreement::Equal => self.informative += 1,
            Agreement::Differ => self.differ = true,
            Agreement::Vacuous => {}
        }
        Ok(())
    }

    fn verdict(self) -> Result<bool> {
        if self.differ {
            Ok(false)
        } else if self.informative == 0 {
            Err(Error::WindowEmpty)
        } else {
            Ok(true)
        }
    }
}

/// The Anderson-Thakur function
/// `omega = zeta * prod_{i>=0} (1 - t / theta^(q^i))^-1` modulo `t^tprec`,
/// every coefficient known on `[-1, uprec)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaSeries {
    series: TateSeries,
    uprec: i64,
}

impl std::ops::Deref for OmegaSeries {
    type Target = TateSeries;

    fn deref(&self) -> &TateSeries {
        &self.series
    }
}

impl OmegaSeries {
    pub fn series(&self) -> &TateSeries {
        &self.series
    }

    pub fn uprec(&self) -> i64 {
        self.uprec
    }

    /// Factor indices `i` that can touch exponents below `uprec`.
    pub fn factor_count(q: u64, uprec: i64) -> usize {
        // factor i is 1 + (terms of u-valuation >= (q-1) q^i), shifted by zeta = u^-1
        let mut count = 0usize;
        let mut shift = (q - 1) as i128;
        while shift < uprec as i128 + 1 {
            count += 1;
            shift *= q as i128;
        }
        count
    }
}

/// Computes `omega` modulo `t^tprec`, exact on `[-1, uprec)`.
///
/// `1 / theta^(q^i) = -u^((q-1) q^i)`, so factor `i` expands as
/// `sum_n (-1)^n u^(n (q-1) q^i) t^n`. Only factors with `(q-1) q^i <= uprec`
/// can reach exponents below `uprec` after the shift by `zeta`.
pub fn compute_omega(field: Arc<FqSpec>, tprec: usize, uprec: i64) -> Result<OmegaSeries> {
    if tprec == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    if uprec < 1 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    let f = &field;
    let q = f.order() as u64;
    // product of factors as t-series with u-power-series coefficients on [0, width)
    let width = (uprec + 1) as usize;
    let mut prod: Vec<Vec<FqElem>> = vec![vec![FqElem::ZERO; width]; tprec];
    prod[0][0] = f.one();
    let minus_one = f.neg(f.one());
    for i in 0..OmegaSeries::factor_count(q, uprec) {
        let step = ((q - 1) * q.pow(i as u32)) as usize;
        // multiply by sum_n (-1)^n u^(n*step) t^n, i.e. prod_n += (-u^step) * prod_(n-1) cumulatively
        for n in 1..tprec {
            let (lower, upper) = prod.split_at_mut(n);
            let prev = &lower[n - 1];
            let cur = &mut upper[0];
            for e in (0..width).rev().filter(|&e| e >= step) {
                let add = f.mul(minus_one, prev[e - step]);
                cur[e] = f.add(cur[e], add);
            }
        }
    }
    let entries = prod
        .into_iter()
        .map(|coeffs| UInftyElem::new(field.clone(), -1, coeffs, Some(uprec)))
        .collect();
    Ok(OmegaSeries {
        series: TateSeries {
            field: field.clone(),
            entries,
        },
        uprec,
    })
}

/// Checks `tau(omega) = (t - theta) omega` entrywise on the known windows.
pub fn verify_carlitz_equation(omega: &TateSeries) -> Result<bool> {
    let lhs = omega.frobenius();
    let rhs = omega.mul_t_minus_theta()?;
    let mut tally = Tally::default();
    for (a, b) in lhs.entries().iter().zip(rhs.entries()) {
        tally.record(a, b)?;
    }
    tally.verdict()
}

/// The defining row `(omega, D^(1) omega, ..., D^(k) omega)` of `rho_[k](omega)`,
/// all truncated to t-precision `tprec(omega) - k`.
pub fn omega_jet_rows(omega: &TateSeries, k: usize) -> Result<Vec<TateSeries>> {
    if omega.tprec() <= k {
        return Err(Error::InsufficientPrecision {
            needed: k + 1,
            available: omega.tprec(),
        });
    }
    let tprec = omega.tprec() - k;
    Ok((0..=k)
        .map(|j| omega.hyperderiv(j).truncate(tprec))
        .collect())
}

/// Checks `tau(rho_[k](omega)) = rho_[k](t - theta) * rho_[k](omega)` on
/// given jet rows: `tau(D^j omega) = (t - theta) D^j omega + D^(j-1) omega`.
pub fn verify_prolongation_rows(rows: &[TateSeries]) -> Result<bool> {
    let Some(first) = rows.first() else {
        return Err(Error::ShapeMismatch("no jet rows".into()));
    };
    let field = first.field().clone();
    let tprec = rows.iter().map(TateSeries::tprec).min().unwrap_or(0);
    let mut tally = Tally::default();
    for (j, row) in rows.iter().enumerate() {
        let row = row.truncate(tprec);
        let lhs = row.frobenius();
        let mut rhs = row.mul_t_minus_theta()?;
        if j > 0 {
            rhs = rhs.add(&rows[j - 1].truncate(tprec))?;
        }
        same_field(&field, row.field())?;
        for (a, b) in lhs.entries().iter().zip(rhs.entries()) {
            tally.record(a, b)?;
        }
    }
    tally.verdict()
}

/// The rigid analytic trivialization identity for the `k`-th prolongation.
pub fn verify_prolongation_trivialization(omega: &TateSeries, k: usize) -> Result<bool> {
    verify_prolongation_rows(&omega_jet_rows(omega, k)?)
}

/// The `t`-action of the `k`-th prolongation: `theta * Id - S + Id * tau`,
/// with `S` the superdiagonal of ones.
#[derive(Clone, Debug)]
pub struct ProlongationAction {
    field: Arc<FqSpec>,
    k: usize,
}

impl ProlongationAction {
    pub fn new(field: Arc<FqSpec>, k: usize) -> Self {
        ProlongationAction { field, k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Smallest `r` with `(Theta_k - theta Id)^r = 0`.
    pub fn nilpotency_order(&self) -> usize {
        let n = self.k + 1;
        // powers of -S over the integers; only the support matters
        let shift = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            let mut out = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i + 1 < n {
                        out[i][j] -= m[i + 1][j];
                    }
                }
            }
            out
        };
        let mut m: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        for r in 1..=n + 1 {
            m = shift(&m);
            if m.iter().flatten().all(|&x| x == 0) {
                return r;
            }
        }
        unreachable!("shift matrices are nilpotent")
    }

    /// `Theta_k h = theta h - S h` on a column of `k + 1` Tate series.
    pub fn apply_linear(&self, h: &[TateSeries]) -> Result<Vec<TateSeries>> {
        self.check_column(h)?;
        let theta = UInftyElem::theta(self.field.clone());
        (0..=self.k)
            .map(|r| {
                let scaled = h[r].scale_by(&theta)?;
                if r < self.k {
                    scaled.sub(&h[r + 1].truncate(scaled.tprec()))
                } else {
                    Ok(scaled)
                }
            })
            .collect()
    }

    /// The full `t`-action `Theta_k h + tau(h)`.
    pub fn apply(&self, h: &[TateSeries]) -> Result<Vec<TateSeries>> {
        let lin = self.apply_linear(h)?;
        lin.iter()
            .zip(h)
            .map(|(l, x)| l.add(&x.frobenius().truncate(l.tprec())))
            .collect()
    }

    fn check_column(&self, h: &[TateSeries]) -> Result<()> {
        if h.len() != self.k + 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected a column of {} series, got {}",
                self.k + 1,
                h.len()
            )));
        }
        for x in h {
            same_field(&self.field, x.field())?;
        }
        Ok(())
    }
}

/// Checks `Theta_k h + tau(h) = t h`, the defining relation of the
/// Tate-module series space, on a column `h` of `k + 1` series.
pub fn verify_hhat_membership(k: usize, h: &[TateSeries]) -> Result<bool> {
    let Some(first) = h.first() else {
        return Err(Error::ShapeMismatch("empty column".into()));
    };
    let action = ProlongationAction::new(first.field().clone(), k);
    let tprec = h.iter().map(TateSeries::tprec).min().unwrap_or(0);
    let h: Vec<TateSeries> = h.iter().map(|x| x.truncate(tprec)).collect();
    let lhs = action.apply(&h)?;
    let mut tally = Tally::default();
    let all_exact_zero = h
        .iter()
        .all(|x| x.entries().iter().all(|e| e.is_exact() && e.is_zero()));
    for (l, x) in lhs.iter().zip(&h) {
        let rhs = x.shift_t();
        for (a, b) in l.entries().iter().zip(rhs.entries()) {
            tally.record(a, b)?;
        }
    }
    if all_exact_zero {
        return Ok(!tally.differ);
    }
    tally.verdict()
}

/// Column `c` of `rho_[k](omega)`: `(D^c omega, ..., D^1 omega, omega, 0, ..., 0)`.
pub fn omega_jet_column(omega: &TateSeries, k: usize, c: usize) -> Result<Vec<TateSeries>> {
    if c > k {
        return Err(Error::ShapeMismatch(format!(
            "column {c} out of range for k = {k}"
        )));
    }
    let rows = omega_jet_rows(omega, k)?;
    let tprec = rows[0].tprec();
    Ok((0..=k)
        .map(|r| match r.cmp(&c) {
            Ordering::Greater => TateSeries::zero(omega.field().clone(), tprec),
            _ => rows[c - r].clone(),
        })
        .collect())
}

/// The table `C(i+j, j) * (D^(i+j) omega)(0)` for `i <= n`, `j <= k`.
pub fn torsion_generators(omega: &TateSeries, n: usize, k: usize) -> Result<Vec<Vec<UInftyElem>>> {
    if omega.tprec() <= n + k {
        return Err(Error::InsufficientPrecision {
            needed: n + k + 1,
            available: omega.tprec(),
        });
    }
    let f = omega.field();
    let p = f.characteristic() as u64;
    Ok((0..=n)
        .map(|i| {
            (0..=k)
                .map(|j| {
                    let c = lucas((i + j) as u64, j as u64, p);
                    // (D^l omega)(0) is the t^l coefficient of omega
                    omega.entry(i + j).scale(f.from_int(c))
                })
                .collect()
        })
        .collect())
}
