//! The Toeplitz group `{ rho_[k]-shaped matrices with unit diagonal }` over
//! `F_q[[t]]/t^prec`: upper triangular Toeplitz matrices whose first row is
//! `(a_0, a_1, ..., a_k)` with `a_0` a unit. It has `k+1` free row
//! parameters, hence dimension `k+1`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::finite_field::{FqElem, FqSpec};
use crate::hyperderivatives::JetMatrix;
use crate::power_series::TruncSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzGroup {
    field: Arc<FqSpec>,
    k: usize,
    prec: usize,
}

impl ToeplitzGroup {
    pub fn new(field: Arc<FqSpec>, k: usize, prec: usize) -> Result<Self> {
        if prec == 0 {
            return Err(Error::InsufficientPrecision {
                needed: 1,
                available: 0,
            });
        }
        Ok(ToeplitzGroup { field, k, prec })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn dimension(&self) -> usize {
        self.k + 1
    }

    pub fn identity(&self) -> JetMatrix {
        JetMatrix::identity(self.field.clone(), self.k, self.prec)
            .expect("prec checked at construction")
    }

    pub fn contains(&self, m: &JetMatrix) -> bool {
        **m.field() == *self.field && m.k() == self.k && m.prec() == self.prec && m.is_invertible()
    }

    /// Uniform element: a unit diagonal and arbitrary superdiagonals.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> JetMatrix {
        let q = self.field.order() as usize;
        let rows = (0..=self.k)
            .map(|j| {
                let coeffs = (0..self.prec)
                    .map(|i| {
                        let idx = if i == 0 && j == 0 {
                            rng.gen_range(1..q)
                        } else {
                            rng.gen_range(0..q)
                        };
                        self.field.from_index(idx).expect("index below q")
                    })
                    .collect::<Vec<FqElem>>();
                TruncSeries::new(self.field.clone(), coeffs).expect("prec > 0")
            })
            .collect();
        JetMatrix::from_rows(rows).expect("rows share field and precision")
    }
}

/// Checks the group law on `samples`: membership, closure under products,
/// inverses with `m * m^-1 = 1`, associativity on consecutive triples, and
/// that the dimension is `k+1`.
pub fn motivic_group_check(group: &ToeplitzGroup, samples: &[JetMatrix]) -> bool {
    let id = group.identity();
    if group.dimension() != group.k() + 1 || !group.contains(&id) {
        return false;
    }
    if !samples.iter().all(|m| group.contains(m)) {
        return false;
    }
    for a in samples {
        let Ok(inv) = a.inv() else { return false };
        if !group.contains(&inv) {
            return false;
        }
        let (Ok(l), Ok(r)) = (a.mul(&inv), inv.mul(a)) else {
            return false;
        };
        if l != id || r != id {
            return false;
        }
        for b in samples {
            match a.mul(b) {
                Ok(ab) if group.contains(&ab) => {}
                _ => return false,
            }
        }
    }
    for w in samples.windows(3) {
        let lhs = w[0].mul(&w[1]).and_then(|x| x.mul(&w[2]));
        let rhs = w[1].mul(&w[2]).and_then(|x| w[0].mul(&x));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) if l == r => {}
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois_density::galois_rep;
    use crate::power_series::unit_enumerate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(q: u32) -> Arc<FqSpec> {
        Arc::new(FqSpec::builtin(q).unwrap())
    }

    #[test]
    fn random_samples_form_a_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2, 3, 4] {
            for k in 0..=3 {
                let g = ToeplitzGroup::new(field(q), k, 6).unwrap();
                assert_eq!(g.dimension(), k + 1);
                let samples: Vec<_> = (0..12).map(|_| g.random_element(&mut rng)).collect();
                assert!(motivic_group_check(&g, &samples));
            }
        }
    }

    #[test]
    fn galois_image_lies_in_group() {
        let f = field(3);
        let g = ToeplitzGroup::new(f.clone(), 2, 3).unwrap();
        let image: Vec<_> = unit_enumerate(f, 5, u128::MAX)
            .unwrap()
            .map(|a| galois_rep(&a, 2, 3).unwrap())
            .collect();
        assert_eq!(image.len(), 162);
        assert!(image.iter().all(|m| g.contains(m)));
        assert!(motivic_group_check(&g, &image[..20]));
    }

    #[test]
    fn non_unit_diagonal_is_rejected() {
        let f = field(2);
        let g = ToeplitzGroup::new(f.clone(), 1, 3).unwrap();
        let t = TruncSeries::parse(f.clone(), "t", 3).unwrap();
        let m = JetMatrix::from_rows(vec![t.clone(), t]).unwrap();
        assert!(!g.contains(&m));
        assert!(!motivic_group_check(&g, &[g.identity(), m]));
        let wrong_shape = JetMatrix::identity(f, 2, 3).unwrap();
        assert!(!motivic_group_check(&g, &[wrong_shape]));
    }
}
