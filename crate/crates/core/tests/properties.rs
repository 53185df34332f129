use berry_esseen::app_bounds::{
    counterexample_report, lstat_311, multisample_38, ustat_nonuniform_33, ustat_uniform_31, LStatBoundInputs,
    MultiBoundInputs, UStatBoundInputs,
};
use berry_esseen::bound_core::min_lower_bound_holds;
use berry_esseen::dist::Distribution;
use berry_esseen::models::lstat::lstat_value;
use berry_esseen::models::multisample::multisample_value;
use berry_esseen::models::ustat::ustat_value;
use berry_esseen::models::{Kernel, LStatModel, LStatSpec, MultiUStatSpec, Observations, UStatSpec, Weight};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn sample(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec(-5.0f64..5.0, len).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
}

proptest! {
    #[test]
    fn ustat_permutation_invariant((xs, ys) in sample(3..14)) {
        for kernel in [Kernel::Variance, Kernel::Product, Kernel::Sum] {
            let spec = UStatSpec::new(kernel, Distribution::StdNormal, xs.len()).unwrap();
            prop_assert!(close(ustat_value(&spec, &xs).unwrap(), ustat_value(&spec, &ys).unwrap(), 1e-12));
        }
    }

    #[test]
    fn lstat_permutation_invariant((xs, ys) in sample(4..30)) {
        let spec = LStatSpec::new(Weight::Identity, Distribution::StdNormal, xs.len()).unwrap();
        prop_assert!(close(lstat_value(&spec, &xs).unwrap(), lstat_value(&spec, &ys).unwrap(), 1e-12));
    }

    #[test]
    fn multisample_permutation_invariant((xs, xs2) in sample(2..9), (ys, ys2) in sample(2..9)) {
        let spec = MultiUStatSpec::wilcoxon(Distribution::Uniform01, xs.len(), ys.len()).unwrap();
        let a = multisample_value(&spec, &Observations { groups: vec![xs, ys] }).unwrap();
        let b = multisample_value(&spec, &Observations { groups: vec![xs2, ys2] }).unwrap();
        prop_assert!(close(a, b, 1e-12));
    }

    #[test]
    fn min_inequality(a in 0.0f64..50.0, b in 0.0f64..50.0, p in 2.0001f64..=3.0) {
        prop_assert!(min_lower_bound_holds(a, b, p));
    }

    #[test]
    fn bounds_scale_invariant(c in 1e-3f64..1e3, z in 0.0f64..10.0) {
        let u = UStatBoundInputs::from_spec(&UStatSpec::new(Kernel::Variance, Distribution::Exponential1, 30).unwrap(), 3.0).unwrap();
        let us = u.scaled(c);
        prop_assert!(close(ustat_uniform_31(&u).unwrap().known, ustat_uniform_31(&us).unwrap().known, 1e-12));
        let (a, b) = (ustat_nonuniform_33(&u, z).unwrap(), ustat_nonuniform_33(&us, z).unwrap());
        prop_assert!(close(a.known, b.known, 1e-12) && close(a.c_coeff, b.c_coeff, 1e-12));
        let m = MultiBoundInputs::from_spec(&MultiUStatSpec::wilcoxon(Distribution::Uniform01, 40, 25).unwrap(), 3.0).unwrap();
        prop_assert!(close(multisample_38(&m, z).unwrap().known, multisample_38(&m.scaled(c), z).unwrap().known, 1e-12));
        let model = LStatModel::new(LStatSpec::new(Weight::Identity, Distribution::Uniform01, 50).unwrap()).unwrap();
        let l = LStatBoundInputs::from_model(&model, 3.0).unwrap();
        prop_assert!(close(lstat_311(&l, z).unwrap().known, lstat_311(&l.scaled(c), z).unwrap().known, 1e-12));
    }
}

#[test]
fn bracket_is_order_epsilon() {
    let rows = counterexample_report(&[1e-2, 5e-3, 2e-3]).unwrap();
    for r in rows {
        let k = r.bg_bracket / r.epsilon;
        assert!((2.0..3.0).contains(&k), "bracket/ε = {k} at ε = {}", r.epsilon);
    }
}
