//! Hyperdifferential operators `D^(n)` with respect to `t` and the jet map
//! `f -> (f, D^(1) f, ..., D^(k) f)`.
//!
//! A [`JetMatrix`] stores the defining row of the upper-triangular Toeplitz
//! matrix: entry `(i, i + j)` is `rows[j]`, everything below the diagonal is
//! zero. Multiplying two such matrices is a Cauchy product of their rows, and
//! the jet map is a ring homomorphism into them.

use std::sync::Arc;

use crate::binomials::lucas;
use crate::error::{Error, Result};
use crate::finite_field::{FqElem, FqSpec};
use crate::power_series::{same_field, TruncSeries};

/// Result of applying `D^(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HyperDeriv {
    /// Known modulo `t^(prec - n)`.
    Exact(TruncSeries),
    /// `n >= prec`: nothing is known, the zero series at precision 1 stands in.
    PrecisionExhausted(TruncSeries),
}

impl HyperDeriv {
    pub fn series(&self) -> &TruncSeries {
        match self {
            HyperDeriv::Exact(s) | HyperDeriv::PrecisionExhausted(s) => s,
        }
    }

    pub fn into_series(self) -> TruncSeries {
        match self {
            HyperDeriv::Exact(s) | HyperDeriv::PrecisionExhausted(s) => s,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, HyperDeriv::PrecisionExhausted(_))
    }
}

/// Writes coefficients `0..out.len()` of `D^(n)` applied to `src`:
/// `out[i] = C(i + n, n) * src[i + n]`.
#[inline]
pub(crate) fn hyperderiv_slice(field: &FqSpec, n: usize, src: &[FqElem], out: &mut [FqElem]) {
    let p = field.characteristic() as u64;
    for (i, slot) in out.iter_mut().enumerate() {
        let x = src[i + n];
        *slot = if x.is_zero() {
            FqElem::ZERO
        } else {
            let c = lucas((i + n) as u64, n as u64, p);
            field.mul(field.from_int(c), x)
        };
    }
}

/// `D^(n) f`, known modulo `t^(prec(f) - n)`.
pub fn hyperderiv(n: usize, f: &TruncSeries) -> HyperDeriv {
    let field = f.field();
    if n >= f.prec() {
        return HyperDeriv::PrecisionExhausted(TruncSeries::zero(field.clone(), 1).unwrap());
    }
    let mut out = vec![FqElem::ZERO; f.prec() - n];
    hyperderiv_slice(field, n, f.coeffs(), &mut out);
    HyperDeriv::Exact(TruncSeries::new(field.clone(), out).unwrap())
}

/// `D^(n) f` truncated to `prec`; errors if `f` is too short.
fn hyperderiv_to(n: usize, f: &TruncSeries, prec: usize) -> Result<TruncSeries> {
    if f.prec() < prec + n {
        return Err(Error::InsufficientPrecision {
            needed: prec + n,
            available: f.prec(),
        });
    }
    let mut out = vec![FqElem::ZERO; prec];
    hyperderiv_slice(f.field(), n, f.coeffs(), &mut out);
    TruncSeries::new(f.field().clone(), out)
}

/// Upper-triangular Toeplitz matrix `(a_0, a_1, ..., a_k)` over `F_q[t]/(t^prec)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetMatrix {
    rows: Vec<TruncSeries>,
}

impl JetMatrix {
    /// Builds a jet matrix from its defining row; all entries must share
    /// field and precision.
    pub fn from_rows(rows: Vec<TruncSeries>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::ShapeMismatch("a jet matrix needs at least one row".into()))?;
        for r in &rows[1..] {
            same_field(first.field(), r.field())?;
            if r.prec() != first.prec() {
                return Err(Error::ShapeMismatch(format!(
                    "row precisions differ ({} vs {})",
                    r.prec(),
                    first.prec()
                )));
            }
        }
        Ok(JetMatrix { rows })
    }

    pub fn identity(field: Arc<FqSpec>, k: usize, prec: usize) -> Result<Self> {
        let mut rows = vec![TruncSeries::one(field.clone(), prec)?];
        for _ in 0..k {
            rows.push(TruncSeries::zero(field.clone(), prec)?);
        }
        Ok(JetMatrix { rows })
    }

    pub fn k(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn prec(&self) -> usize {
        self.rows[0].prec()
    }

    pub fn field(&self) -> &Arc<FqSpec> {
        self.rows[0].field()
    }

    pub fn rows(&self) -> &[TruncSeries] {
        &self.rows
    }

    pub fn diagonal(&self) -> &TruncSeries {
        &self.rows[0]
    }

    /// Matrix entry `(i, j)`, zero below the diagonal.
    pub fn entry(&self, i: usize, j: usize) -> TruncSeries {
        if j >= i {
            self.rows[j - i].clone()
        } else {
            TruncSeries::zero(self.field().clone(), self.prec()).unwrap()
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.rows[0].is_unit()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        same_field(self.field(), other.field())?;
        if self.k() != other.k() || self.prec() != other.prec() {
            return Err(Error::ShapeMismatch(format!(
                "(k={}, prec={}) vs (k={}, prec={})",
                self.k(),
                self.prec(),
                other.k(),
                other.prec()
            )));
        }
        Ok(())
    }

    /// Product of Toeplitz matrices: `c_j = sum_{i<=j} a_i b_{j-i}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut rows = Vec::with_capacity(self.rows.len());
        for j in 0..=self.k() {
            let mut acc = TruncSeries::zero(self.field().clone(), self.prec())?;
            for i in 0..=j {
                acc = acc.add(&self.rows[i].mul(&other.rows[j - i])?)?;
            }
            rows.push(acc);
        }
        Ok(JetMatrix { rows })
    }

    /// Inverse inside the Toeplitz group; requires a unit diagonal.
    pub fn inv(&self) -> Result<Self> {
        let a0_inv = self.rows[0].inv()?;
        let mut rows = vec![a0_inv.clone()];
        for j in 1..=self.k() {
            // sum_{i=0..j} a_i c_{j-i} = 0  =>  c_j = -a0^{-1} sum_{i=1..j} a_i c_{j-i}
            let mut acc = TruncSeries::zero(self.field().clone(), self.prec())?;
            for i in 1..=j {
                acc = acc.add(&self.rows[i].mul(&rows[j - i])?)?;
            }
            rows.push(acc.mul(&a0_inv)?.neg());
        }
        Ok(JetMatrix { rows })
    }

    /// Dense `(k+1) x (k+1)` matrix view.
    pub fn to_dense(&self) -> Vec<Vec<TruncSeries>> {
        (0..=self.k())
            .map(|i| (0..=self.k()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Canonical key of the full row tuple.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = (self.k() as u32).to_le_bytes().to_vec();
        for r in &self.rows {
            key.extend(r.canonical_key());
        }
        key
    }
}

/// `rho_[k](f)` at the uniform precision `prec(f) - k`.
pub fn jet(k: usize, f: &TruncSeries) -> Result<JetMatrix> {
    if f.prec() <= k {
        return Err(Error::InsufficientPrecision {
            needed: k + 1,
            available: f.prec(),
        });
    }
    jet_at(k, f, f.prec() - k)
}

/// `rho_[k](f)` with every entry known modulo `t^prec`; needs `prec(f) >= prec + k`.
pub fn jet_at(k: usize, f: &TruncSeries, prec: usize) -> Result<JetMatrix> {
    if prec == 0 {
        return Err(Error::InsufficientPrecision {
            needed: 1,
            available: 0,
        });
    }
    let rows = (0..=k)
        .map(|j| hyperderiv_to(j, f, prec))
        .collect::<Result<Vec<_>>>()?;
    Ok(JetMatrix { rows })
}

/// Writes the jet rows of `a` (row-major, `(k+1) * prec` entries) into `out`.
/// `a` must hold at least `prec + k` coefficients.
#[inline]
pub(crate) fn jet_slice(field: &FqSpec, k: usize, a: &[FqElem], prec: usize, out: &mut [FqElem]) {
    for j in 0..=k {
        hyperderiv_slice(field, j, a, &mut out[j * prec..(j + 1) * prec]);
    }
}

/// Generalized Leibniz rule `D^(n)(fg) = sum_i D^(i) f * D^(n-i) g`.
pub fn verify_leibniz(n: usize, f: &TruncSeries, g: &TruncSeries) -> Result<bool> {
    let prec = f.prec().min(g.prec());
    if prec <= n {
        return Err(Error::InsufficientPrecision {
            needed: n + 1,
            available: prec,
        });
    }
    let out = prec - n;
    let lhs = hyperderiv_to(n, &f.mul(g)?, out)?;
    let mut rhs = TruncSeries::zero(f.field().clone(), out)?;
    for i in 0..=n {
        let term = hyperderiv_to(i, f, out)?.mul(&hyperderiv_to(n - i, g, out)?)?;
        rhs = rhs.add(&term)?;
    }
    Ok(lhs == rhs)
}

/// Iteration rule `D^(n) D^(m) = C(n+m, n) D^(n+m)`.
pub fn verify_iteration(n: usize, m: usize, f: &TruncSeries) -> Result<bool> {
    if f.prec() <= n + m {
        return Err(Error::InsufficientPrecision {
            needed: n + m + 1,
            available: f.prec(),
        });
    }
    let out = f.prec() - n - m;
    let inner = hyperderiv(m, f).into_series();
    let lhs = hyperderiv_to(n, &inner, out)?;
    let field = f.field();
    let c = lucas((n + m) as u64, n as u64, field.characteristic() as u64);
    let rhs = hyperderiv_to(n + m, f, out)?.scale(field.from_int(c));
    Ok(lhs == rhs)
}

/// Taylor identity `f = sum_i (D^(i) f)(0) t^i`.
pub fn verify_taylor(f: &TruncSeries) -> Result<bool> {
    let coeffs: Vec<FqElem> = (0..f.prec())
        .map(|i| hyperderiv(i, f).series().eval0())
        .collect();
    Ok(TruncSeries::new(f.field().clone(), coeffs)? == *f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fld(q: u32) -> Arc<FqSpec> {
        Arc::new(FqSpec::builtin(q).unwrap())
    }

    fn lit(f: &Arc<FqSpec>, s: &str, prec: usize) -> TruncSeries {
        TruncSeries::parse(f.clone(), s, prec).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let f3 = fld(3);
        assert_eq!(
            hyperderiv(1, &lit(&f3, "t^2", 4)),
            HyperDeriv::Exact(lit(&f3, "2*t", 3))
        );
        let f2 = fld(2);
        assert_eq!(
            hyperderiv(1, &lit(&f2, "t^2", 4)).into_series(),
            lit(&f2, "0", 3)
        );
        assert_eq!(
            hyperderiv(2, &lit(&f2, "t^3", 5)).into_series(),
            lit(&f2, "t", 3)
        );
    }

    #[test]
    fn exhausted_precision_is_flagged() {
        let f = fld(5);
        let d = hyperderiv(4, &lit(&f, "1+t", 3));
        assert!(d.is_exhausted());
        assert_eq!(d.series(), &lit(&f, "0", 1));
        assert!(!hyperderiv(2, &lit(&f, "1+t", 3)).is_exhausted());
    }

    #[test]
    fn jet_examples() {
        let f = fld(5);
        let theta_bar = f.from_int(3);
        let lin = lit(&f, "t", 3)
            .sub(&TruncSeries::constant(f.clone(), theta_bar, 3).unwrap())
            .unwrap();
        let j = jet(1, &lin).unwrap();
        assert_eq!(j.prec(), 2);
        assert_eq!(j.rows()[0], lit(&f, "t-3", 2));
        assert_eq!(j.rows()[1], lit(&f, "1", 2));

        let g = lit(&f, "1+2*t+t^3", 4);
        assert_eq!(jet(0, &g).unwrap().rows(), std::slice::from_ref(&g));

        let one = TruncSeries::one(f.clone(), 6).unwrap();
        let j = jet(2, &one).unwrap();
        assert_eq!(j, JetMatrix::identity(f.clone(), 2, 4).unwrap());

        assert!(matches!(
            jet(3, &lit(&f, "1", 3)),
            Err(Error::InsufficientPrecision { .. })
        ));
        assert!(matches!(
            jet_at(2, &lit(&f, "1", 5), 4),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn jet_products() {
        let f3 = fld(3);
        let t = lit(&f3, "t", 4);
        let jt = jet(1, &t).unwrap();
        let sq = jt.mul(&jt).unwrap();
        assert_eq!(sq.rows(), &[lit(&f3, "t^2", 3), lit(&f3, "2*t", 3)]);
        assert_eq!(sq, jet(1, &lit(&f3, "t^2", 4)).unwrap());

        let id = JetMatrix::identity(f3.clone(), 1, 3).unwrap();
        assert_eq!(jt.mul(&id).unwrap(), jt);

        // (1+t)(1+2t) = 1 + 2t^2 over F_3; jet at T=4 needs input precision 6
        let a = lit(&f3, "1+t", 6);
        let b = lit(&f3, "1+2*t", 6);
        let lhs = jet(2, &a).unwrap().mul(&jet(2, &b).unwrap()).unwrap();
        let rhs = jet(2, &lit(&f3, "1+2*t^2", 6)).unwrap();
        assert_eq!(lhs.prec(), 4);
        assert_eq!(lhs, rhs);
        // hand expansion: D1(1+2t^2) = 4t = t, D2(1+2t^2) = 2
        assert_eq!(rhs.rows()[1], lit(&f3, "t", 4));
        assert_eq!(rhs.rows()[2], lit(&f3, "2", 4));
    }

    #[test]
    fn jet_shape_mismatch() {
        let f = fld(3);
        let a = JetMatrix::identity(f.clone(), 1, 3).unwrap();
        let b = JetMatrix::identity(f.clone(), 2, 3).unwrap();
        let c = JetMatrix::identity(f.clone(), 1, 4).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::ShapeMismatch(_))));
        assert!(matches!(a.mul(&c), Err(Error::ShapeMismatch(_))));
        let d = JetMatrix::identity(fld(2), 1, 3).unwrap();
        assert_eq!(a.mul(&d), Err(Error::SpecMismatch));
    }

    #[test]
    fn jet_inverses() {
        let f = fld(3);
        let id = JetMatrix::identity(f.clone(), 2, 4).unwrap();
        assert_eq!(id.inv().unwrap(), id);

        let a = lit(&f, "1+t", 5);
        let inv = jet(1, &a).unwrap().inv().unwrap();
        assert_eq!(inv, jet(1, &a.inv().unwrap()).unwrap());

        let c = JetMatrix::from_rows(vec![lit(&f, "2", 3), lit(&f, "0", 3)]).unwrap();
        let ci = c.inv().unwrap();
        assert_eq!(ci.rows(), &[lit(&f, "2", 3), lit(&f, "0", 3)]);

        let singular = JetMatrix::from_rows(vec![lit(&f, "t", 3), lit(&f, "1", 3)]).unwrap();
        assert_eq!(singular.inv(), Err(Error::NonUnit));
    }

    #[test]
    fn dense_view_is_upper_triangular_toeplitz() {
        let f = fld(5);
        let j = jet(2, &lit(&f, "1+t+3*t^2+t^4", 7)).unwrap();
        let m = j.to_dense();
        for i in 0..3 {
            for c in 0..3 {
                if c < i {
                    assert!(m[i][c].is_zero());
                } else {
                    assert_eq!(m[i][c], j.rows()[c - i]);
                }
            }
        }
    }

    #[test]
    fn calculus_identity_examples() {
        let f2 = fld(2);
        let g = lit(&f2, "1+t+t^3+t^4+t^7", 10);
        assert!(verify_iteration(1, 1, &g).unwrap());
        // D1 D1 g = 0 in characteristic 2
        let dd = hyperderiv(1, &hyperderiv(1, &g).into_series()).into_series();
        assert!(dd.is_zero());
        let one = TruncSeries::one(f2.clone(), 10).unwrap();
        for n in 0..10 {
            assert!(verify_leibniz(n, &g, &one).unwrap());
        }
        assert!(verify_taylor(&lit(&f2, "1+t+t^2", 3)).unwrap());
        assert!(matches!(
            verify_leibniz(10, &g, &one),
            Err(Error::InsufficientPrecision { .. })
        ));
        assert!(matches!(
            verify_iteration(5, 5, &g),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn leibniz_detects_wrong_rule() {
        // Sanity: the plain product rule D(fg) = D(f) g + f D(g) is the n=1 case,
        // but D2(fg) != D2(f) g + f D2(g) in general (the middle term matters).
        let f = fld(3);
        let a = lit(&f, "t", 8);
        let lhs = hyperderiv_to(2, &a.mul(&a).unwrap(), 6).unwrap();
        let wrong = hyperderiv_to(2, &a, 6)
            .unwrap()
            .mul(&a.truncate(6).unwrap())
            .unwrap()
            .scale(f.from_int(2));
        assert_ne!(lhs, wrong);
        assert!(verify_leibniz(2, &a, &a).unwrap());
    }
}
