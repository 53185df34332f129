use crate::error::{Error, Result};

/// Largest number of kernel evaluations performed by exact enumeration.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// `C(n, k)` in 128-bit arithmetic, saturating.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = match acc.checked_mul((n - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub(crate) fn check_cap(count: u128, what: &str) -> Result<()> {
    if count > ENUMERATION_CAP {
        Err(Error::Capacity(format!(
            "{what} needs {count} kernel evaluations, above the enumeration cap {ENUMERATION_CAP}"
        )))
    } else {
        Ok(())
    }
}

/// Visit every increasing `k`-subset of `items` in lexicographic order.
pub fn for_each_combination<F: FnMut(&[usize])>(items: &[usize], k: usize, mut f: F) {
    let n = items.len();
    if k > n {
        return;
    }
    if k == 0 {
        f(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen: Vec<usize> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&chosen);
        let mut p = k;
        while p > 0 && idx[p - 1] == n - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            return;
        }
        idx[p - 1] += 1;
        for q in p..k {
            idx[q] = idx[q - 1] + 1;
        }
        for q in (p - 1)..k {
            chosen[q] = items[idx[q]];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(50, 2), 1225);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(100, 50), 100_891_344_545_564_193_334_812_497_256);
    }

    #[test]
    fn combinations_are_enumerated_once() {
        let items: Vec<usize> = (0..6).collect();
        let mut count = 0;
        let mut last: Vec<usize> = Vec::new();
        for_each_combination(&items, 3, |c| {
            assert!(c.windows(2).all(|w| w[0] < w[1]));
            assert!(last.as_slice() < c);
            last = c.to_vec();
            count += 1;
        });
        assert_eq!(count, 20);
    }
}
