//! Partitioned enumeration of unit groups with mergeable distinct-key sets.
//!
//! Units modulo `t^prec` are split by a fixed coefficient prefix; every
//! partition is walked by its own worker into a local set and the sets are
//! merged by union. Union is associative and commutative, so the final count
//! does not depend on how many threads ran or in which order partitions
//! finished.

use std::collections::HashSet;
use std::hash::Hash;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::finite_field::{FqElem, FqSpec};
use crate::power_series::{check_budget, odometer_step, unit_count, unit_prefixes};

/// Target number of partitions; more than any realistic thread count.
const TARGET_PARTITIONS: u128 = 256;

fn partition_depth(q: u64, prec: usize) -> usize {
    let mut depth = 1;
    let mut parts = (q - 1) as u128;
    while depth < prec && parts < TARGET_PARTITIONS {
        depth += 1;
        parts *= q as u128;
    }
    depth
}

fn bits_per_coeff(q: u64) -> u32 {
    64 - (q - 1).leading_zeros()
}

fn run_in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

fn collect_distinct<K, P>(
    field: &FqSpec,
    prec: usize,
    key_len: usize,
    threads: usize,
    fill_key: &(dyn Fn(&[FqElem], &mut [FqElem]) + Sync),
    pack: P,
) -> Result<usize>
where
    K: Eq + Hash + Send,
    P: Fn(&[FqElem]) -> K + Sync,
{
    let q = field.order() as usize;
    let depth = partition_depth(q as u64, prec);
    let prefixes = unit_prefixes(field, prec, depth);
    let count = run_in_pool(threads, || {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut local = HashSet::new();
                let mut unit = prefix.clone();
                unit.resize(prec, FqElem::ZERO);
                let mut key = vec![FqElem::ZERO; key_len];
                loop {
                    fill_key(&unit, &mut key);
                    local.insert(pack(&key));
                    if !odometer_step(q, &mut unit, depth) {
                        break;
                    }
                }
                local
            })
            .reduce(HashSet::new, |mut a, b| {
                if a.len() < b.len() {
                    return merge(b, a);
                }
                a.extend(b);
                a
            })
            .len()
    })?;
    Ok(count)
}

fn merge<K: Eq + Hash>(mut big: HashSet<K>, small: HashSet<K>) -> HashSet<K> {
    big.extend(small);
    big
}

/// Number of distinct keys `fill_key(a)` over all units `a` modulo `t^prec`.
///
/// `fill_key` writes a canonical key of `key_len` field elements.
pub(crate) fn count_distinct_keys(
    field: &FqSpec,
    prec: usize,
    key_len: usize,
    budget: u128,
    threads: usize,
    fill_key: &(dyn Fn(&[FqElem], &mut [FqElem]) + Sync),
) -> Result<u64> {
    check_budget(unit_count(field.order() as u64, prec), budget)?;
    let bits = bits_per_coeff(field.order() as u64);
    let count = if key_len as u32 * bits <= 128 {
        collect_distinct(field, prec, key_len, threads, fill_key, |key| {
            key.iter()
                .fold(0u128, |acc, c| (acc << bits) | c.index() as u128)
        })?
    } else {
        collect_distinct(field, prec, key_len, threads, fill_key, |key| {
            key.iter().map(|c| c.index() as u16).collect::<Box<[u16]>>()
        })?
    };
    Ok(count as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_choice() {
        assert_eq!(partition_depth(2, 1), 1);
        assert_eq!(partition_depth(2, 20), 9);
        assert_eq!(partition_depth(256, 5), 2);
    }

    #[test]
    fn identity_key_counts_all_units() {
        for q in [2u32, 3, 4] {
            let f = FqSpec::builtin(q).unwrap();
            for prec in 1..=6 {
                let n =
                    count_distinct_keys(&f, prec, prec, u128::MAX, 2, &|a, k| k.copy_from_slice(a))
                        .unwrap();
                assert_eq!(n as u128, unit_count(q as u64, prec));
            }
        }
    }

    #[test]
    fn wide_keys_take_the_boxed_path() {
        let f = FqSpec::builtin(3).unwrap();
        // 70 coefficients * 2 bits > 128
        let n = count_distinct_keys(&f, 4, 70, u128::MAX, 1, &|a, k| {
            k.iter_mut().for_each(|c| *c = FqElem::ZERO);
            k[69] = a[1];
        })
        .unwrap();
        assert_eq!(n, 3);
    }

    #[test]
    fn thread_count_does_not_change_counts() {
        let f = FqSpec::builtin(4).unwrap();
        let key = |a: &[FqElem], k: &mut [FqElem]| {
            k[0] = a[0];
            k[1] = a[3];
        };
        let one = count_distinct_keys(&f, 6, 2, u128::MAX, 1, &key).unwrap();
        let four = count_distinct_keys(&f, 6, 2, u128::MAX, 4, &key).unwrap();
        assert_eq!(one, 12);
        assert_eq!(one, four);
    }

    #[test]
    fn budget_is_enforced() {
        let f = FqSpec::builtin(2).unwrap();
        assert!(matches!(
            count_distinct_keys(&f, 30, 1, 1000, 1, &|_, _| {}),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
