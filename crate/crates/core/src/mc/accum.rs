//! Per-replicate accumulators for the remainder components.

use crate::bound_core::MomentEstimate;
use crate::models::DecompositionSample;
use crate::numeric::NeumaierSum;

/// First and second raw sums of one scalar.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    s: NeumaierSum,
    s2: NeumaierSum,
}

impl Moments {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.s.add(x);
        self.s2.add(x * x);
    }

    pub fn merge(&mut self, o: &Moments) {
        self.s.merge(&o.s);
        self.s2.merge(&o.s2);
    }

    pub fn mean(&self, count: u64) -> f64 {
        if count == 0 {
            return 0.0;
        }
        self.s.value() / count as f64
    }

    /// Plug-in standard error of the mean.
    pub fn std_error(&self, count: u64) -> f64 {
        if count < 2 {
            return 0.0;
        }
        let r = count as f64;
        let m = self.mean(count);
        let var = (self.s2.value() / r - m * m).max(0.0) * r / (r - 1.0);
        (var / r).sqrt()
    }

    pub fn estimate(&self, count: u64) -> MomentEstimate {
        MomentEstimate { value: self.mean(count), std_error: self.std_error(count), replicates: count }
    }
}

/// Sums over replicates for one index `i`: `g_i²`, `g_i⁴`, `d_i²`, `d_i⁴`,
/// `g_i² d_i²` with `d_i = Δ − Δ_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IndexMoments {
    g2: NeumaierSum,
    g4: NeumaierSum,
    d2: NeumaierSum,
    d4: NeumaierSum,
    g2d2: NeumaierSum,
}

impl IndexMoments {
    fn add(&mut self, g: f64, d: f64) {
        let (g2, d2) = (g * g, d * d);
        self.g2.add(g2);
        self.g4.add(g2 * g2);
        self.d2.add(d2);
        self.d4.add(d2 * d2);
        self.g2d2.add(g2 * d2);
    }

    fn merge(&mut self, o: &IndexMoments) {
        self.g2.merge(&o.g2);
        self.g4.merge(&o.g4);
        self.d2.merge(&o.d2);
        self.d4.merge(&o.d4);
        self.g2d2.merge(&o.g2d2);
    }

    /// `‖g_i‖₂ ‖d_i‖₂` with its delta-method standard error.
    fn product_norm(&self, count: u64) -> (f64, f64) {
        let r = count as f64;
        let (a, b) = (self.g2.value() / r, self.d2.value() / r);
        if a <= 0.0 || b <= 0.0 {
            return (0.0, 0.0);
        }
        let value = (a * b).sqrt();
        let var_a = (self.g4.value() / r - a * a).max(0.0);
        let var_b = (self.d4.value() / r - b * b).max(0.0);
        let cov = self.g2d2.value() / r - a * b;
        let (da, db) = (0.5 * (b / a).sqrt(), 0.5 * (a / b).sqrt());
        let var = (da * da * var_a + db * db * var_b + 2.0 * da * db * cov).max(0.0);
        (value, (var / r).sqrt())
    }
}

/// Everything needed from a run apart from the raw `T`/`W` vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    pub count: u64,
    /// Exponent of the `E|Δ|^p` accumulator.
    pub p: f64,
    pub w: Moments,
    pub abs_w_delta: Moments,
    pub abs_delta: Moments,
    /// Accumulates `Δ²`; its mean is `‖Δ‖₂²`.
    pub delta_sq: Moments,
    pub abs_delta_p: Moments,
    /// Accumulates `Σ_i weight |g_i (Δ − Δ_i)|` per replicate.
    pub g_delta_diff: Moments,
    pub per_index: Vec<IndexMoments>,
    pub index_weight: f64,
    /// `(|z| + 1)/3` per requested `z`.
    pub delta_levels: Vec<f64>,
    pub delta_tail: Vec<u64>,
    /// `(|z| − 2)/3` per requested `z`.
    pub wg_levels: Vec<f64>,
    /// `[z][i]` counts of `|W − g_i| > (|z| − 2)/3`.
    pub w_minus_g_tail: Vec<Vec<u64>>,
    pub has_variants: bool,
}

impl Accumulator {
    pub fn new(z_grid: &[f64], p: f64) -> Self {
        Self {
            count: 0,
            p,
            w: Moments::default(),
            abs_w_delta: Moments::default(),
            abs_delta: Moments::default(),
            delta_sq: Moments::default(),
            abs_delta_p: Moments::default(),
            g_delta_diff: Moments::default(),
            per_index: Vec::new(),
            index_weight: 1.0,
            delta_levels: z_grid.iter().map(|z| (z.abs() + 1.0) / 3.0).collect(),
            delta_tail: vec![0; z_grid.len()],
            wg_levels: z_grid.iter().map(|z| (z.abs() - 2.0) / 3.0).collect(),
            w_minus_g_tail: vec![Vec::new(); z_grid.len()],
            has_variants: false,
        }
    }

    pub fn add(&mut self, s: &DecompositionSample) {
        self.count += 1;
        let d = s.delta;
        self.w.add(s.w);
        self.abs_w_delta.add((s.w * d).abs());
        self.abs_delta.add(d.abs());
        self.delta_sq.add(d * d);
        self.abs_delta_p.add(d.abs().powf(self.p));
        for (k, &level) in self.delta_levels.iter().enumerate() {
            if d.abs() > level {
                self.delta_tail[k] += 1;
            }
        }
        if s.delta_i.is_empty() {
            return;
        }
        self.has_variants = true;
        self.index_weight = s.index_weight;
        if self.per_index.is_empty() {
            self.per_index = vec![IndexMoments::default(); s.g.len()];
            for row in &mut self.w_minus_g_tail {
                *row = vec![0; s.g.len()];
            }
        }
        let mut sum = NeumaierSum::new();
        for (i, (&g, &di)) in s.g.iter().zip(&s.delta_i).enumerate() {
            let diff = d - di;
            sum.add((g * diff).abs());
            self.per_index[i].add(g, diff);
            for (k, &level) in self.wg_levels.iter().enumerate() {
                if (s.w - g).abs() > level {
                    self.w_minus_g_tail[k][i] += 1;
                }
            }
        }
        self.g_delta_diff.add(s.index_weight * sum.value());
    }

    pub fn merge(&mut self, o: &Accumulator) {
        self.count += o.count;
        self.w.merge(&o.w);
        self.abs_w_delta.merge(&o.abs_w_delta);
        self.abs_delta.merge(&o.abs_delta);
        self.delta_sq.merge(&o.delta_sq);
        self.abs_delta_p.merge(&o.abs_delta_p);
        self.g_delta_diff.merge(&o.g_delta_diff);
        if o.has_variants {
            self.has_variants = true;
            self.index_weight = o.index_weight;
            if self.per_index.is_empty() {
                self.per_index = vec![IndexMoments::default(); o.per_index.len()];
                for row in &mut self.w_minus_g_tail {
                    *row = vec![0; o.per_index.len()];
                }
            }
            for (a, b) in self.per_index.iter_mut().zip(&o.per_index) {
                a.merge(b);
            }
            for (ra, rb) in self.w_minus_g_tail.iter_mut().zip(&o.w_minus_g_tail) {
                for (a, b) in ra.iter_mut().zip(rb) {
                    *a += b;
                }
            }
        }
        for (a, b) in self.delta_tail.iter_mut().zip(&o.delta_tail) {
            *a += b;
        }
    }

    pub fn e_abs_w_delta(&self) -> MomentEstimate {
        self.abs_w_delta.estimate(self.count)
    }

    pub fn e_abs_delta(&self) -> MomentEstimate {
        self.abs_delta.estimate(self.count)
    }

    pub fn e_abs_delta_p(&self) -> MomentEstimate {
        self.abs_delta_p.estimate(self.count)
    }

    /// `‖Δ‖₂` with a delta-method standard error.
    pub fn delta_l2(&self) -> MomentEstimate {
        let m = self.delta_sq.estimate(self.count);
        let value = m.value.max(0.0).sqrt();
        let se = if value > 0.0 { m.std_error / (2.0 * value) } else { 0.0 };
        MomentEstimate { value, std_error: se, replicates: self.count }
    }

    /// `Σ E|g_i (Δ − Δ_i)|`
    pub fn sum_g_delta_diff(&self) -> MomentEstimate {
        self.g_delta_diff.estimate(self.count)
    }

    /// `Σ ‖g_i‖₂ ‖Δ − Δ_i‖₂`; per-index standard errors are added linearly.
    pub fn sum_g_l2_delta_l2(&self) -> MomentEstimate {
        let mut v = NeumaierSum::new();
        let mut se = 0.0;
        for m in &self.per_index {
            let (a, b) = m.product_norm(self.count);
            v.add(a);
            se += b;
        }
        MomentEstimate {
            value: self.index_weight * v.value(),
            std_error: self.index_weight * se,
            replicates: self.count,
        }
    }

    /// `P(|Δ| > (|z_k| + 1)/3)`
    pub fn delta_tail(&self, k: usize) -> MomentEstimate {
        binomial_estimate(self.delta_tail[k], self.count)
    }

    /// `P(|W − g_i| > (|z_k| − 2)/3)` for every listed index.
    pub fn w_minus_g_tail(&self, k: usize) -> Vec<MomentEstimate> {
        self.w_minus_g_tail[k].iter().map(|&c| binomial_estimate(c, self.count)).collect()
    }
}

fn binomial_estimate(hits: u64, count: u64) -> MomentEstimate {
    if count == 0 {
        return MomentEstimate::exact(0.0);
    }
    let p = hits as f64 / count as f64;
    MomentEstimate { value: p, std_error: (p * (1.0 - p) / count as f64).sqrt(), replicates: count }
}
