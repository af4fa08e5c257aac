//! Image orders and density estimates for the `t`-adic representations
//! attached to the prolongations of the Carlitz module and to its tensor
//! powers.
//!
//! The Galois group is replaced by the unit group `F_q[[t]]^x` (the Carlitz
//! representation is onto it), so the prolongation representation becomes
//! `a -> rho_[k](a)` and the tensor power representation becomes `a -> a^d`.

mod counting;
mod motivic;
mod zariski;

pub use motivic::{motivic_group_check, ToeplitzGroup};
pub use zariski::{
    zariski_rank_certificate, zariski_rank_on_points, RankReport, RelationTerm, UnitSampling,
    EXHAUSTIVE_UNIT_LIMIT, SAMPLED_POINTS, ZARISKI_DEFAULT_SEED,
};

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;

use crate::binomials::vanishes;
use crate::error::{Error, Result};
use crate::finite_field::{is_prime, FqElem, FqSpec};
use crate::hyperderivatives::{jet_at, jet_slice, JetMatrix};
use crate::power_series::{mul_into, UnitClass};

/// `rho_[k](a)` at uniform precision `n`.
pub fn galois_rep(a: &UnitClass, k: usize, n: usize) -> Result<JetMatrix> {
    jet_at(k, a.series(), n)
}

/// An order of the shape `unit_part * q^exponent`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct ImageOrder {
    pub unit_part: u64,
    pub q: u64,
    pub exponent: u64,
}

impl ImageOrder {
    pub fn to_biguint(&self) -> BigUint {
        BigUint::from(self.unit_part) * BigUint::from(self.q).pow(self.exponent as u32)
    }

    /// `log_q` of the order as a real number.
    pub fn log_q(&self) -> f64 {
        self.exponent as f64 + log_base(self.unit_part, self.q)
    }

    /// Splits a raw count as `unit_part * q^E` for the expected `unit_part`.
    pub fn from_count(count: u64, q: u64, unit_part: u64) -> Result<Self> {
        let malformed =
            || Error::MalformedOrder(format!("{count} (unit part {unit_part}, q = {q})"));
        if unit_part == 0 || !count.is_multiple_of(unit_part) {
            return Err(malformed());
        }
        let mut rest = count / unit_part;
        let mut exponent = 0;
        while rest > 1 {
            if !rest.is_multiple_of(q) {
                return Err(malformed());
            }
            rest /= q;
            exponent += 1;
        }
        if rest != 1 {
            return Err(malformed());
        }
        Ok(ImageOrder {
            unit_part,
            q,
            exponent,
        })
    }
}

impl fmt::Display for ImageOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_biguint())
    }
}

fn log_base(x: u64, q: u64) -> f64 {
    if x == 1 {
        0.0
    } else {
        (x as f64).ln() / (q as f64).ln()
    }
}

/// Number of distinct `rho_[k](a) mod t^n` over units `a mod t^(n+k)`.
pub fn image_order_brute(
    field: &FqSpec,
    k: usize,
    n: usize,
    budget: u128,
    threads: usize,
) -> Result<u64> {
    image_order_brute_at(field, k, n, n + k, budget, threads)
}

/// As [`image_order_brute`], enumerating units modulo `t^enum_prec` instead.
///
/// Any `enum_prec >= n + k` gives the same count; larger values only repeat
/// every image point more often.
pub fn image_order_brute_at(
    field: &FqSpec,
    k: usize,
    n: usize,
    enum_prec: usize,
    budget: u128,
    threads: usize,
) -> Result<u64> {
    if n == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    if enum_prec < n + k {
        return Err(Error::InsufficientPrecision {
            needed: n + k,
            available: enum_prec,
        });
    }
    counting::count_distinct_keys(field, enum_prec, (k + 1) * n, budget, threads, &|a, key| {
        jet_slice(field, k, a, n, key)
    })
}

/// Coefficient indices `l` in `[n, n+k-1]` of `a` that are still visible in
/// `rho_[k](a) mod t^n`: those with `C(l, j) != 0 mod p` for some
/// `l-n+1 <= j <= k`.
pub fn extra_indices(p: u64, k: usize, n: usize) -> Vec<u64> {
    let (n, k) = (n as u64, k as u64);
    (n..n + k)
        .filter(|&l| (l - n + 1..=k).any(|j| !vanishes(l, j, p)))
        .collect()
}

/// `(q-1) * q^(n-1+|extra|)`.
pub fn image_order_formula(field: &FqSpec, k: usize, n: usize) -> Result<ImageOrder> {
    if n == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    let q = field.order() as u64;
    let extra = extra_indices(field.characteristic() as u64, k, n).len() as u64;
    Ok(ImageOrder {
        unit_part: q - 1,
        q,
        exponent: n as u64 - 1 + extra,
    })
}

/// `log_q D(N) / (N dim)` kept as the exact pair (exponent, unit part).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DensityEstimate {
    pub exponent: u64,
    pub unit_part: u64,
    pub q: u64,
    pub denominator: u64,
}

impl DensityEstimate {
    pub fn new(order: &ImageOrder, n: usize, dim: usize) -> Self {
        DensityEstimate {
            exponent: order.exponent,
            unit_part: order.unit_part,
            q: order.q,
            denominator: (n * dim) as u64,
        }
    }

    /// The integer part `E / (N dim)`, exactly.
    pub fn exponent_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.exponent, self.denominator)
    }

    pub fn value(&self) -> f64 {
        (self.exponent as f64 + log_base(self.unit_part, self.q)) / self.denominator as f64
    }
}

/// Density estimate for a row of a table.
pub fn density_estimate(row: &ImageRow) -> Option<DensityEstimate> {
    row.estimate
}

/// The sandwich `(q-1)q^(N-1) <= D(N) <= (q-1)q^(N+k-1)` in density form.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityBounds {
    pub lower_exponent: Ratio<u64>,
    pub upper_exponent: Ratio<u64>,
    /// `log_q(q-1) / (N(k+1))`, added to both ends.
    pub unit_term: f64,
}

impl DensityBounds {
    pub fn lower(&self) -> f64 {
        ratio_f64(&self.lower_exponent) + self.unit_term
    }

    pub fn upper(&self) -> f64 {
        ratio_f64(&self.upper_exponent) + self.unit_term
    }

    /// Checks the exact exponent part of an estimate.
    pub fn contains(&self, est: &DensityEstimate) -> bool {
        let r = est.exponent_ratio();
        self.lower_exponent <= r && r <= self.upper_exponent
    }
}

fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn density_bounds(k: usize, n: usize, q: u64) -> DensityBounds {
    let den = (n * (k + 1)) as u64;
    DensityBounds {
        lower_exponent: Ratio::new(n as u64 - 1, den),
        upper_exponent: Ratio::new((n + k - 1) as u64, den),
        unit_term: log_base(q - 1, q) / den as f64,
    }
}

/// The level `m` with `{C(i+j, j) omega_(i+j)}` generating the `t^m`-torsion
/// extension, for `i <= n` and `j <= k`.
///
/// Also checks that every level `l <= m` is reached, which is what makes
/// the generated extension the full `t^m`-torsion field.
pub fn torsion_level_m(p: u64, n: u64, k: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::InvalidCharacteristic(p));
    }
    let reached = |l: u64| {
        let lo = l.saturating_sub(n);
        let hi = k.min(l);
        lo <= hi && (lo..=hi).any(|j| !vanishes(l, j, p))
    };
    let m = (0..=n + k).rev().find(|&l| reached(l)).unwrap_or(0);
    if let Some(missing) = (0..=m).find(|&l| !reached(l)) {
        return Err(Error::SegmentViolation {
            p,
            n,
            k,
            m,
            missing,
        });
    }
    Ok(m)
}

/// Splits `d = p^e * d'` with `d'` prime to `p`; returns `(p^e, d')`.
pub fn split_p_part(d: u64, p: u64) -> (u64, u64) {
    let (mut pe, mut rest) = (1, d);
    while rest % p == 0 {
        rest /= p;
        pe *= p;
    }
    (pe, rest)
}

/// Number of `d'`-th powers in `F_q^x`.
pub fn tensor_unit_part(q: u64, d: u64, p: u64) -> u64 {
    let (_, d1) = split_p_part(d, p);
    (q - 1) / d1.gcd(&(q - 1))
}

fn pow_slice(
    f: &FqSpec,
    a: &[FqElem],
    mut exp: u64,
    out: &mut [FqElem],
    scratch: &mut [Vec<FqElem>; 2],
) {
    out.iter_mut().for_each(|c| *c = FqElem::ZERO);
    out[0] = f.one();
    let [base, tmp] = scratch;
    base.clear();
    base.extend_from_slice(a);
    while exp > 0 {
        if exp & 1 == 1 {
            mul_into(f, out, base, tmp);
            out.copy_from_slice(tmp);
        }
        exp >>= 1;
        if exp > 0 {
            mul_into(f, base, base, tmp);
            base.copy_from_slice(tmp);
        }
    }
}

/// Number of distinct `a^d mod t^n` over units `a mod t^n`.
pub fn tensor_image_order_brute(
    field: &FqSpec,
    d: u64,
    n: usize,
    budget: u128,
    threads: usize,
) -> Result<u64> {
    if d == 0 {
        return Err(Error::Config("tensor power d must be positive".into()));
    }
    if n == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    counting::count_distinct_keys(field, n, n, budget, threads, &|a, key| {
        let mut scratch = [Vec::with_capacity(n), vec![FqElem::ZERO; n]];
        pow_slice(field, a, d, key, &mut scratch)
    })
}

/// `w * q^floor((n-1)/p^e)`.
pub fn tensor_image_order_formula(field: &FqSpec, d: u64, n: usize) -> Result<ImageOrder> {
    if d == 0 {
        return Err(Error::Config("tensor power d must be positive".into()));
    }
    if n == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    let q = field.order() as u64;
    let p = field.characteristic() as u64;
    let (pe, _) = split_p_part(d, p);
    Ok(ImageOrder {
        unit_part: tensor_unit_part(q, d, p),
        q,
        exponent: (n as u64 - 1) / pe,
    })
}

/// Which image orders a table computes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Brute,
    Formula,
    Both,
}

impl Mode {
    pub fn brute(self) -> bool {
        matches!(self, Mode::Brute | Mode::Both)
    }

    pub fn formula(self) -> bool {
        matches!(self, Mode::Formula | Mode::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Brute => "brute",
            Mode::Formula => "formula",
            Mode::Both => "both",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Mode::Brute),
            "formula" => Ok(Mode::Formula),
            "both" => Ok(Mode::Both),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// The representation whose images are counted.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `a -> rho_[k](a)`, image group of dimension `k+1`.
    Prolongation { k: usize },
    /// `a -> a^d`, image group of dimension 1.
    TensorPower { d: u64 },
}

impl Family {
    pub fn dimension(&self) -> usize {
        match *self {
            Family::Prolongation { k } => k + 1,
            Family::TensorPower { .. } => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DensityProblem {
    pub field: Arc<FqSpec>,
    pub family: Family,
    pub n_max: usize,
    pub mode: Mode,
    pub budget: u128,
    pub threads: usize,
}

impl DensityProblem {
    /// Units enumerated by the brute-force count at level `n`.
    pub fn units_needed(&self, n: usize) -> u128 {
        let q = self.field.order() as u64;
        match self.family {
            Family::Prolongation { k } => crate::power_series::unit_count(q, n + k),
            Family::TensorPower { .. } => crate::power_series::unit_count(q, n),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageRow {
    pub n: usize,
    pub d_brute: Option<u64>,
    pub d_formula: Option<ImageOrder>,
    /// `|extra_indices|`; absent for tensor powers.
    pub extra_m: Option<u64>,
    pub estimate: Option<DensityEstimate>,
}

impl ImageRow {
    /// False only when both counts exist and disagree.
    pub fn matches(&self) -> bool {
        match (self.d_brute, &self.d_formula) {
            (Some(b), Some(f)) => BigUint::from(b) == f.to_biguint(),
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageTable {
    pub family: Family,
    pub q: u64,
    pub mode: Mode,
    pub rows: Vec<ImageRow>,
}

impl ImageTable {
    /// Level of the first row where brute force and formula disagree.
    pub fn first_mismatch(&self) -> Option<usize> {
        self.rows.iter().find(|r| !r.matches()).map(|r| r.n)
    }
}

/// Builds the table for `N = 1..=n_max`.
///
/// A malformed brute-force count (not `unit * q^E`) is reported as
/// [`Error::MalformedOrder`]; when the formula is also computed the row is
/// kept and flagged by [`ImageTable::first_mismatch`] instead.
pub fn image_table(problem: &DensityProblem) -> Result<ImageTable> {
    let field = &problem.field;
    let q = field.order() as u64;
    let p = field.characteristic() as u64;
    let dim = problem.family.dimension();
    if problem.mode.brute() {
        // fail before doing any work; the last level is the largest
        crate::power_series::check_budget(problem.units_needed(problem.n_max), problem.budget)?;
    }
    let mut rows = Vec::with_capacity(problem.n_max);
    for n in 1..=problem.n_max {
        let (d_brute, d_formula, extra_m, unit_part) = match problem.family {
            Family::Prolongation { k } => {
                let brute = if problem.mode.brute() {
                    Some(image_order_brute(
                        field,
                        k,
                        n,
                        problem.budget,
                        problem.threads,
                    )?)
                } else {
                    None
                };
                let formula = problem
                    .mode
                    .formula()
                    .then(|| image_order_formula(field, k, n))
                    .transpose()?;
                (
                    brute,
                    formula,
                    Some(extra_indices(p, k, n).len() as u64),
                    q - 1,
                )
            }
            Family::TensorPower { d } => {
                let brute = if problem.mode.brute() {
                    Some(tensor_image_order_brute(
                        field,
                        d,
                        n,
                        problem.budget,
                        problem.threads,
                    )?)
                } else {
                    None
                };
                let formula = problem
                    .mode
                    .formula()
                    .then(|| tensor_image_order_formula(field, d, n))
                    .transpose()?;
                (brute, formula, None, tensor_unit_part(q, d, p))
            }
        };
        let order = match (&d_formula, d_brute) {
            (Some(f), _) => *f,
            (None, Some(b)) => ImageOrder::from_count(b, q, unit_part)?,
            (None, None) => unreachable!("every mode computes at least one order"),
        };
        rows.push(ImageRow {
            n,
            d_brute,
            d_formula,
            extra_m,
            estimate: Some(DensityEstimate::new(&order, n, dim)),
        });
    }
    Ok(ImageTable {
        family: problem.family,
        q,
        mode: problem.mode,
        rows,
    })
}

/// Formula table for `a -> a^d` up to `n_max`.
pub fn tensor_density(field: Arc<FqSpec>, d: u64, n_max: usize) -> Result<ImageTable> {
    image_table(&DensityProblem {
        field,
        family: Family::TensorPower { d },
        n_max,
        mode: Mode::Formula,
        budget: crate::power_series::DEFAULT_ENUMERATION_BUDGET,
        threads: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_series::{unit_enumerate, TruncSeries, DEFAULT_ENUMERATION_BUDGET};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn field(q: u32) -> Arc<FqSpec> {
        Arc::new(FqSpec::builtin(q).unwrap())
    }

    fn series(f: &Arc<FqSpec>, lit: &str, prec: usize) -> TruncSeries {
        TruncSeries::parse(f.clone(), lit, prec).unwrap()
    }

    /// Independent count: build each jet with the public series API and
    /// dedupe the canonical byte keys.
    fn oracle_image_order(f: &Arc<FqSpec>, k: usize, n: usize) -> u64 {
        let mut seen = HashSet::new();
        for a in unit_enumerate(f.clone(), n + k, u128::MAX).unwrap() {
            seen.insert(galois_rep(&a, k, n).unwrap().canonical_key());
        }
        seen.len() as u64
    }

    fn oracle_tensor_order(f: &Arc<FqSpec>, d: u64, n: usize) -> u64 {
        let mut seen = HashSet::new();
        for a in unit_enumerate(f.clone(), n, u128::MAX).unwrap() {
            seen.insert(a.series().pow(d).canonical_key());
        }
        seen.len() as u64
    }

    #[test]
    fn galois_rep_examples() {
        let f = field(2);
        let a = UnitClass::new(series(&f, "1+t+t^2", 3)).unwrap();
        let m = galois_rep(&a, 1, 2).unwrap();
        assert_eq!(m.rows()[0], series(&f, "1+t", 2));
        assert_eq!(m.rows()[1], series(&f, "1", 2));
        let one = UnitClass::new(TruncSeries::one(f.clone(), 6).unwrap()).unwrap();
        assert_eq!(
            galois_rep(&one, 2, 4).unwrap(),
            JetMatrix::identity(f.clone(), 2, 4).unwrap()
        );
        let k0 = galois_rep(&a, 0, 3).unwrap();
        assert_eq!(k0.rows(), &[a.series().clone()]);
        assert!(matches!(
            galois_rep(&a, 1, 3),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn image_order_examples() {
        let f2 = field(2);
        let f3 = field(3);
        assert_eq!(image_order_brute(&f2, 1, 2, u128::MAX, 1).unwrap(), 2);
        assert_eq!(image_order_brute(&f3, 1, 2, u128::MAX, 1).unwrap(), 18);
        for n in 1..=8 {
            assert_eq!(
                image_order_brute(&f2, 0, n, u128::MAX, 1).unwrap(),
                1 << (n - 1)
            );
        }
        assert!(extra_indices(2, 1, 2).is_empty());
        assert_eq!(extra_indices(3, 1, 2), vec![2]);
        assert_eq!(
            image_order_formula(&f2, 1, 2).unwrap().to_biguint(),
            2u32.into()
        );
        assert_eq!(
            image_order_formula(&f3, 1, 2).unwrap().to_biguint(),
            18u32.into()
        );
        for p in [2, 3, 5] {
            for n in 1..20 {
                assert!(extra_indices(p, 0, n).is_empty());
            }
        }
    }

    #[test]
    fn fast_count_matches_series_oracle() {
        for q in [2u32, 3, 4] {
            let f = field(q);
            for k in 0..=2 {
                for n in 1..=4 {
                    if crate::power_series::unit_count(q as u64, n + k) > 20_000 {
                        continue;
                    }
                    assert_eq!(
                        image_order_brute(&f, k, n, u128::MAX, 2).unwrap(),
                        oracle_image_order(&f, k, n),
                        "q={q} k={k} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn brute_equals_formula_small() {
        for q in [2u32, 3, 4] {
            let f = field(q);
            for k in 0..=3 {
                for n in 1..=6 {
                    if crate::power_series::unit_count(q as u64, n + k) > 200_000 {
                        continue;
                    }
                    let b = image_order_brute(&f, k, n, u128::MAX, 0).unwrap();
                    let form = image_order_formula(&f, k, n).unwrap();
                    assert_eq!(BigUint::from(b), form.to_biguint(), "q={q} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn enumeration_precision_is_sufficient() {
        for q in [2u32, 3] {
            let f = field(q);
            for k in 0..=2 {
                for n in 1..=3 {
                    let base = image_order_brute(&f, k, n, u128::MAX, 1).unwrap();
                    let wider = image_order_brute_at(&f, k, n, n + k + 2, u128::MAX, 1).unwrap();
                    assert_eq!(base, wider);
                }
            }
        }
        assert!(matches!(
            image_order_brute_at(&field(2), 2, 3, 4, u128::MAX, 1),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn extra_indices_are_contiguous_from_n() {
        for p in [2, 3, 5, 7] {
            for k in 0..8 {
                for n in 1..80 {
                    let e = extra_indices(p, k, n);
                    let expect: Vec<u64> = (n as u64..n as u64 + e.len() as u64).collect();
                    assert_eq!(e, expect, "p={p} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn extra_count_matches_torsion_level() {
        for p in [2, 3, 5, 7] {
            for k in 0..7 {
                for n in 1..60u64 {
                    let m = torsion_level_m(p, n - 1, k).unwrap();
                    assert_eq!(
                        m,
                        n - 1 + extra_indices(p, k as usize, n as usize).len() as u64
                    );
                }
            }
        }
    }

    #[test]
    fn torsion_level_examples() {
        for p in [2, 3, 5] {
            for n in 0..10 {
                assert_eq!(torsion_level_m(p, n, 0).unwrap(), n);
            }
        }
        assert_eq!(torsion_level_m(2, 1, 1).unwrap(), 1);
        assert_eq!(torsion_level_m(3, 1, 1).unwrap(), 2);
        assert!(matches!(
            torsion_level_m(4, 1, 1),
            Err(Error::InvalidCharacteristic(4))
        ));
    }

    #[test]
    fn torsion_level_stays_in_range() {
        for p in [2, 3, 5, 7] {
            for k in 0..=6 {
                for n in 0..=64 {
                    let m = torsion_level_m(p, n, k).unwrap();
                    assert!(n <= m && m <= n + k);
                }
            }
        }
    }

    #[test]
    fn density_estimate_and_bounds() {
        let f = field(2);
        let order = image_order_formula(&f, 1, 16).unwrap();
        let est = DensityEstimate::new(&order, 16, 2);
        let b = density_bounds(1, 16, 2);
        assert_eq!(b.lower_exponent, Ratio::new(15, 32));
        assert_eq!(b.upper_exponent, Ratio::new(1, 2));
        assert_eq!(b.unit_term, 0.0);
        assert!(b.contains(&est));
        assert!(b.lower() <= est.value() && est.value() <= b.upper());

        let f3 = field(3);
        let order = image_order_formula(&f3, 0, 5).unwrap();
        let est = DensityEstimate::new(&order, 5, 1);
        assert_eq!(est.exponent, 4);
        assert!((est.value() - (4.0 + 2f64.ln() / 3f64.ln()) / 5.0).abs() < 1e-12);
    }

    #[test]
    fn from_count_splits_or_rejects() {
        assert_eq!(ImageOrder::from_count(18, 3, 2).unwrap().exponent, 2);
        assert_eq!(ImageOrder::from_count(1, 2, 1).unwrap().exponent, 0);
        assert!(matches!(
            ImageOrder::from_count(12, 3, 2),
            Err(Error::MalformedOrder(_))
        ));
        assert!(matches!(
            ImageOrder::from_count(9, 3, 2),
            Err(Error::MalformedOrder(_))
        ));
    }

    #[test]
    fn tensor_examples() {
        let f2 = field(2);
        let f3 = field(3);
        assert_eq!(
            tensor_image_order_brute(&f2, 2, 3, u128::MAX, 1).unwrap(),
            2
        );
        assert_eq!(
            tensor_image_order_brute(&f2, 2, 1, u128::MAX, 1).unwrap(),
            1
        );
        assert_eq!(
            tensor_image_order_brute(&f3, 3, 4, u128::MAX, 1).unwrap(),
            6
        );
        assert_eq!(
            tensor_image_order_formula(&f3, 3, 4).unwrap().to_biguint(),
            6u32.into()
        );
        assert_eq!(split_p_part(18, 3), (9, 2));
        assert_eq!(tensor_unit_part(4, 6, 2), 1);
        assert_eq!(tensor_unit_part(5, 2, 5), 2);
    }

    #[test]
    fn tensor_brute_equals_formula_and_oracle() {
        for q in [2u32, 3, 4] {
            let f = field(q);
            for d in [1u64, 2, 3, 4, 6, 9] {
                for n in 1..=6 {
                    let b = tensor_image_order_brute(&f, d, n, u128::MAX, 2).unwrap();
                    assert_eq!(
                        BigUint::from(b),
                        tensor_image_order_formula(&f, d, n).unwrap().to_biguint()
                    );
                    if n <= 4 {
                        assert_eq!(b, oracle_tensor_order(&f, d, n));
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_density_limits() {
        let t = tensor_density(field(3), 9, 400).unwrap();
        let last = t.rows.last().unwrap().estimate.unwrap();
        assert!((last.value() - 1.0 / 9.0).abs() < 0.01);
        let t = tensor_density(field(3), 2, 400).unwrap();
        assert!((t.rows.last().unwrap().estimate.unwrap().value() - 1.0).abs() < 0.01);
        assert!(t.rows.iter().all(|r| r.extra_m.is_none()));
    }

    #[test]
    fn table_modes_and_mismatch() {
        let problem = DensityProblem {
            field: field(2),
            family: Family::Prolongation { k: 1 },
            n_max: 6,
            mode: Mode::Both,
            budget: DEFAULT_ENUMERATION_BUDGET,
            threads: 1,
        };
        let t = image_table(&problem).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.first_mismatch(), None);
        let brute_only = image_table(&DensityProblem {
            mode: Mode::Brute,
            ..problem.clone()
        })
        .unwrap();
        assert_eq!(
            brute_only
                .rows
                .iter()
                .map(|r| r.estimate)
                .collect::<Vec<_>>(),
            t.rows.iter().map(|r| r.estimate).collect::<Vec<_>>()
        );
        let mut bad = t.clone();
        bad.rows[3].d_brute = Some(7);
        assert_eq!(bad.first_mismatch(), Some(4));
        let big = DensityProblem {
            budget: 10,
            ..problem
        };
        assert!(matches!(
            image_table(&big),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn formula_density_trend() {
        for k in [1usize, 2] {
            let problem = DensityProblem {
                field: field(2),
                family: Family::Prolongation { k },
                n_max: 200,
                mode: Mode::Formula,
                budget: 0,
                threads: 1,
            };
            let t = image_table(&problem).unwrap();
            for row in &t.rows {
                let est = row.estimate.unwrap();
                assert!(density_bounds(k, row.n, 2).contains(&est));
                assert!((est.value() - 1.0 / (k + 1) as f64).abs() <= 1.0 / row.n as f64);
            }
        }
    }

    fn unit_strategy(q: u32, prec: usize) -> impl Strategy<Value = Vec<u32>> {
        (1..q, proptest::collection::vec(0..q, prec - 1)).prop_map(|(c0, mut rest)| {
            rest.insert(0, c0);
            rest
        })
    }

    fn unit_from(f: &Arc<FqSpec>, idx: &[u32]) -> UnitClass {
        let coeffs = idx
            .iter()
            .map(|&i| f.from_index(i as usize).unwrap())
            .collect();
        UnitClass::new(TruncSeries::new(f.clone(), coeffs).unwrap()).unwrap()
    }

    proptest! {
        #[test]
        fn galois_rep_is_multiplicative(
            q in prop::sample::select(vec![2u32, 3, 4]),
            k in 0usize..4,
            seed_a in unit_strategy(4, 12),
            seed_b in unit_strategy(4, 12),
        ) {
            let f = field(q);
            let clip = |v: &[u32]| v.iter().enumerate()
                .map(|(i, &c)| if i == 0 { 1 + (c - 1) % (q - 1) } else { c % q })
                .collect::<Vec<_>>();
            let a = unit_from(&f, &clip(&seed_a));
            let b = unit_from(&f, &clip(&seed_b));
            let n = 12 - k;
            let ab = a.mul(&b).unwrap();
            let lhs = galois_rep(&ab, k, n).unwrap();
            let rhs = galois_rep(&a, k, n).unwrap().mul(&galois_rep(&b, k, n).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sandwich_holds(q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]), k in 0usize..10, n in 1usize..300) {
            let f = FqSpec::builtin(q as u32).unwrap();
            let o = image_order_formula(&f, k, n).unwrap();
            prop_assert!(n as u64 - 1 <= o.exponent && o.exponent <= (n + k - 1) as u64);
            prop_assert_eq!(o.unit_part, q - 1);
        }
    }
}
