//! Kolmogorov distances: empirical, two-sample, and exact for lattice laws.

use crate::numeric::normal_cdf;
use serde::Serialize;

/// Empirical Kolmogorov distance with a distribution-free confidence radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub distance: f64,
    pub replicates: u64,
    pub dkw_radius: f64,
}

/// DKW radius `√(ln(2/α) / (2R))`.
pub fn dkw_radius(replicates: u64, alpha: f64) -> f64 {
    if replicates == 0 {
        return 1.0;
    }
    ((2.0 / alpha).ln() / (2.0 * replicates as f64)).sqrt()
}

/// Sort with `−∞` first and `NaN` rejected by `total_cmp` ordering last.
pub fn sort_samples(xs: &mut [f64]) {
    xs.sort_by(f64::total_cmp);
}

/// `max_i max(i/R − Φ(t_(i)), Φ(t_(i)) − (i−1)/R)` over sorted samples.
pub fn empirical_ks_vs_normal(sorted: &[f64], alpha: f64) -> KsResult {
    let r = sorted.len();
    let rf = r as f64;
    let mut d: f64 = 0.0;
    for (k, &t) in sorted.iter().enumerate() {
        let phi = normal_cdf(t);
        d = d.max((k + 1) as f64 / rf - phi).max(phi - k as f64 / rf);
    }
    KsResult { distance: d.clamp(0.0, 1.0), replicates: r as u64, dkw_radius: dkw_radius(r as u64, alpha) }
}

/// Two-sample statistic `sup_z |F_a(z) − F_b(z)|` over sorted inputs. The
/// radius is the sum of the two one-sample radii.
pub fn empirical_ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> KsResult {
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < na && a[i].total_cmp(&x).is_le() {
            i += 1;
        }
        while j < nb && b[j].total_cmp(&x).is_le() {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    if na > 0 && nb > 0 && (i < na || j < nb) {
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let replicates = na.min(nb) as u64;
    KsResult {
        distance: d.clamp(0.0, 1.0),
        replicates,
        dkw_radius: dkw_radius(na as u64, alpha) + dkw_radius(nb as u64, alpha),
    }
}

/// Exact `sup_z |F(z) − Φ(z)|` for a finite law given as sorted `(atom, mass)`.
pub fn ks_exact_discrete(atoms: &[(f64, f64)]) -> f64 {
    let mut below = 0.0;
    let mut d: f64 = 0.0;
    for &(x, p) in atoms {
        let phi = normal_cdf(x);
        d = d.max((phi - below).abs());
        below += p;
        d = d.max((below - phi).abs());
    }
    d
}

/// Law of `Σ ε_i / √n` for `n` Rademacher signs, atoms ascending.
pub fn rademacher_sum_law(n: u64) -> Vec<(f64, f64)> {
    let nf = n as f64;
    let ln_total = nf * std::f64::consts::LN_2;
    let ln_fact = |k: f64| libm::lgamma(k + 1.0);
    (0..=n)
        .map(|k| {
            let kf = k as f64;
            let mass = (ln_fact(nf) - ln_fact(kf) - ln_fact(nf - kf) - ln_total).exp();
            ((2.0 * kf - nf) / nf.sqrt(), mass)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_at_zero() {
        let r = empirical_ks_vs_normal(&[0.0; 10], 1e-4);
        assert!((r.distance - 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_infinity_counts_in_lower_tail() {
        let r = empirical_ks_vs_normal(&[f64::NEG_INFINITY, f64::NEG_INFINITY], 1e-4);
        assert_eq!(r.distance, 1.0);
    }

    #[test]
    fn matches_brute_force_grid() {
        let xs = [-1.3, -0.2, 0.0, 0.0, 0.4, 1.1, 2.5];
        let r = empirical_ks_vs_normal(&xs, 1e-4);
        let n = xs.len() as f64;
        let mut brute: f64 = 0.0;
        for &x in &xs {
            let le = xs.iter().filter(|&&y| y <= x).count() as f64 / n;
            let lt = xs.iter().filter(|&&y| y < x).count() as f64 / n;
            brute = brute.max((le - normal_cdf(x)).abs()).max((lt - normal_cdf(x)).abs());
        }
        assert!((r.distance - brute).abs() < 1e-15);
    }

    #[test]
    fn two_sample_extremes() {
        let a = [0.1, 0.5, 0.9];
        assert_eq!(empirical_ks_two_sample(&a, &a, 1e-4).distance, 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 10.0).collect();
        assert_eq!(empirical_ks_two_sample(&a, &b, 1e-4).distance, 1.0);
    }

    #[test]
    fn dkw_radius_at_acceptance_size() {
        assert!((dkw_radius(100_000, 1e-4) - 0.007_04).abs() < 1e-5);
        assert!((dkw_radius(400_000, 1e-4) * 2.0 - dkw_radius(100_000, 1e-4)).abs() < 1e-15);
    }

    #[test]
    fn rademacher_exact_distance() {
        let law = rademacher_sum_law(100);
        let total: f64 = law.iter().map(|a| a.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let atom = law[50].1;
        assert!((atom - 0.079_589_237_387_178_78).abs() < 1e-12);
        assert!((ks_exact_discrete(&law) - 0.03979).abs() < 5e-6);
    }
}
