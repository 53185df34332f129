/// Neumaier-compensated accumulator. Merging two accumulators keeps both
/// compensation terms, so a fixed merge tree yields a fixed result.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Pairwise merge in a fixed binary tree: the shape depends only on `parts.len()`.
pub fn tree_merge<T, F>(mut parts: Vec<T>, merge: F) -> Option<T>
where
    F: Fn(&mut T, &T),
{
    if parts.is_empty() {
        return None;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                merge(&mut a, &b);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_catastrophic_cancellation() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn tree_merge_is_shape_fixed() {
        let parts: Vec<NeumaierSum> = (0..7)
            .map(|k| std::iter::once(0.1 * k as f64).collect())
            .collect();
        let a = tree_merge(parts.clone(), |x, y| x.merge(y)).unwrap();
        let b = tree_merge(parts, |x, y| x.merge(y)).unwrap();
        assert_eq!(a.value().to_bits(), b.value().to_bits());
        assert!((a.value() - 2.1).abs() < 1e-15);
    }
}
