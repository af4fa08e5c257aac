//! Finite rank certificate for Zariski density of the image of `rho_[k]`.
//!
//! A candidate relation is `P = sum_{m, s} c_(m,s) t^s X^m` with `X^m` a
//! monomial in `X_0..X_k` of total degree `<= deg` and `s <= tdeg`. The
//! linear map `c -> (P(a, D^(1) a, ..., D^(k) a) mod t^n)_a` over a set of
//! units `a` has zero kernel exactly when no such relation vanishes on the
//! whole set.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::finite_field::{FqElem, FqSpec};
use crate::hyperderivatives::jet_slice;
use crate::power_series::{check_budget, mul_into, unit_count, unit_enumerate, TruncSeries};

/// Unit sets up to this size are used exhaustively.
pub const EXHAUSTIVE_UNIT_LIMIT: u128 = 100_000;
/// Number of pseudorandom units drawn above [`EXHAUSTIVE_UNIT_LIMIT`].
pub const SAMPLED_POINTS: usize = 4096;
pub const ZARISKI_DEFAULT_SEED: u64 = 0x5EED_CA71;
/// Cap on `points * n * unknowns` field entries.
pub const LINEAR_ALGEBRA_BUDGET: u128 = 500_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UnitSampling {
    Exhaustive,
    Sampled { seed: u64, count: usize },
    Given,
}

/// One term `coeff * t^t_power * X^exponents` of a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTerm {
    pub exponents: Vec<u32>,
    pub t_power: usize,
    pub coeff: FqElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub unknowns: usize,
    pub points: usize,
    pub sampling: UnitSampling,
    /// A nonzero relation vanishing on every point, when one exists.
    pub relation: Option<Vec<RelationTerm>>,
}

impl RankReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.unknowns
    }
}

/// Exponent vectors in `vars` variables of total degree `<= deg`, ordered by
/// degree and then lexicographically (descending in `X_0`).
pub fn monomials(vars: usize, deg: usize) -> Vec<Vec<u32>> {
    fn rec(vars: usize, remaining: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == vars {
            prefix.push(remaining as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e as u32);
            rec(vars, remaining - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=deg {
        rec(vars, total, &mut Vec::new(), &mut out);
    }
    out
}

/// Incremental row echelon form over `F_q`.
struct Echelon<'a> {
    f: &'a FqSpec,
    cols: usize,
    /// `pivots[c]` is a row with leading 1 in column `c` and zeros before it.
    pivots: Vec<Option<Vec<FqElem>>>,
    rank: usize,
}

impl<'a> Echelon<'a> {
    fn new(f: &'a FqSpec, cols: usize) -> Self {
        Echelon {
            f,
            cols,
            pivots: vec![None; cols],
            rank: 0,
        }
    }

    fn is_full(&self) -> bool {
        self.rank == self.cols
    }

    fn insert(&mut self, mut row: Vec<FqElem>) {
        let f = self.f;
        for c in 0..self.cols {
            let x = row[c];
            if x.is_zero() {
                continue;
            }
            match &self.pivots[c] {
                Some(p) => {
                    for i in c..self.cols {
                        row[i] = f.sub(row[i], f.mul(x, p[i]));
                    }
                }
                None => {
                    let inv = f.inv(x).expect("nonzero");
                    for v in &mut row[c..] {
                        *v = f.mul(*v, inv);
                    }
                    self.pivots[c] = Some(row);
                    self.rank += 1;
                    return;
                }
            }
        }
    }

    /// A nonzero kernel vector, if the rank is deficient.
    fn kernel_vector(&self) -> Option<Vec<FqElem>> {
        let free = (0..self.cols).rev().find(|&c| self.pivots[c].is_none())?;
        let f = self.f;
        let mut x = vec![FqElem::ZERO; self.cols];
        x[free] = f.one();
        for c in (0..self.cols).rev() {
            if let Some(p) = &self.pivots[c] {
                let mut acc = FqElem::ZERO;
                for i in c + 1..self.cols {
                    acc = f.add(acc, f.mul(p[i], x[i]));
                }
                x[c] = f.neg(acc);
            }
        }
        Some(x)
    }
}

fn rank_over_points<'p>(
    field: &Arc<FqSpec>,
    k: usize,
    deg: usize,
    tdeg: usize,
    n: usize,
    points: impl Iterator<Item = &'p [FqElem]>,
    point_count: usize,
    sampling: UnitSampling,
) -> Result<RankReport> {
    let f: &FqSpec = field;
    let monos = monomials(k + 1, deg);
    let unknowns = monos.len() * (tdeg + 1);
    check_budget(
        point_count as u128 * n as u128 * unknowns as u128,
        LINEAR_ALGEBRA_BUDGET,
    )?;
    let mut ech = Echelon::new(f, unknowns);
    let mut jets = vec![FqElem::ZERO; (k + 1) * n];
    let mut values = vec![vec![FqElem::ZERO; n]; monos.len()];
    let mut tmp = vec![FqElem::ZERO; n];
    let mut used = 0;
    for a in points {
        used += 1;
        if a.len() < n + k {
            return Err(Error::InsufficientPrecision {
                needed: n + k,
                available: a.len(),
            });
        }
        jet_slice(f, k, a, n, &mut jets);
        for (m, exps) in monos.iter().enumerate() {
            let v = &mut values[m];
            v.iter_mut().for_each(|c| *c = FqElem::ZERO);
            v[0] = f.one();
            for (var, &e) in exps.iter().enumerate() {
                let x = &jets[var * n..(var + 1) * n];
                for _ in 0..e {
                    mul_into(f, v, x, &mut tmp);
                    v.copy_from_slice(&tmp);
                }
            }
        }
        for i in 0..n {
            if ech.is_full() {
                break;
            }
            let mut row = vec![FqElem::ZERO; unknowns];
            for (m, v) in values.iter().enumerate() {
                for s in 0..=tdeg.min(i) {
                    row[m * (tdeg + 1) + s] = v[i - s];
                }
            }
            ech.insert(row);
        }
    }
    let relation = ech.kernel_vector().map(|x| {
        x.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(col, &coeff)| RelationTerm {
                exponents: monos[col / (tdeg + 1)].clone(),
                t_power: col % (tdeg + 1),
                coeff,
            })
            .collect()
    });
    Ok(RankReport {
        rank: ech.rank,
        unknowns,
        points: used,
        sampling,
        relation,
    })
}

/// Rank of the evaluation map over all units mod `t^(n+k)` when there are at
/// most [`EXHAUSTIVE_UNIT_LIMIT`] of them, else over [`SAMPLED_POINTS`]
/// units drawn from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn zariski_rank_certificate(
    field: Arc<FqSpec>,
    k: usize,
    deg: usize,
    tdeg: usize,
    n: usize,
    seed: u64,
) -> Result<RankReport> {
    if n == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    let prec = n + k;
    let q = field.order() as usize;
    let total = unit_count(q as u64, prec);
    if total <= EXHAUSTIVE_UNIT_LIMIT {
        let units: Vec<TruncSeries> = unit_enumerate(field.clone(), prec, total)?
            .map(|u| u.into_series())
            .collect();
        rank_over_points(
            &field,
            k,
            deg,
            tdeg,
            n,
            units.iter().map(|u| u.coeffs()),
            units.len(),
            UnitSampling::Exhaustive,
        )
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let units: Vec<Vec<FqElem>> = (0..SAMPLED_POINTS)
            .map(|_| {
                (0..prec)
                    .map(|i| {
                        let idx = if i == 0 {
                            rng.gen_range(1..q)
                        } else {
                            rng.gen_range(0..q)
                        };
                        field.from_index(idx).expect("index below q")
                    })
                    .collect()
            })
            .collect();
        rank_over_points(
            &field,
            k,
            deg,
            tdeg,
            n,
            units.iter().map(|u| u.as_slice()),
            units.len(),
            UnitSampling::Sampled {
                seed,
                count: SAMPLED_POINTS,
            },
        )
    }
}

/// The same rank computation over an explicit point set.
pub fn zariski_rank_on_points(
    field: Arc<FqSpec>,
    k: usize,
    deg: usize,
    tdeg: usize,
    n: usize,
    points: &[TruncSeries],
) -> Result<RankReport> {
    for p in points {
        if **p.field() != *field {
            return Err(Error::SpecMismatch);
        }
    }
    rank_over_points(
        &field,
        k,
        deg,
        tdeg,
        n,
        points.iter().map(|p| p.coeffs()),
        points.len(),
        UnitSampling::Given,
    )
}
