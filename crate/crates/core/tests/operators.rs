use ghyper::fd::FdConfig;
use ghyper::gkz::apply_operator;
use ghyper::{CoefficientVector, Complex64, GkzSystem, LinearDifferentialOperator, MonomialBasis, Result};
use proptest::prelude::*;

fn sum(x: &LinearDifferentialOperator, y: &LinearDifferentialOperator) -> LinearDifferentialOperator {
    LinearDifferentialOperator::new(x.terms.iter().chain(&y.terms).cloned().collect())
}

fn smooth(w: f64) -> impl Fn(&CoefficientVector) -> Result<Complex64> + Sync {
    move |a: &CoefficientVector| {
        let s: Complex64 = a.values().iter().enumerate().map(|(k, v)| v * (0.3 + 0.1 * k as f64) * w).sum();
        Ok(s.exp() + s * s * 0.5)
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn application_is_linear(raw in proptest::collection::vec(-1.0f64..1.0, 6), w in 0.5f64..1.5) {
        let basis = MonomialBasis::new(3, 2).unwrap();
        let sys = GkzSystem::new(basis.clone()).unwrap();
        let a = CoefficientVector::from_real(&basis, &raw).unwrap();
        let fd = FdConfig::default();
        let (f, g) = (smooth(1.0), smooth(w));
        let f_plus_g = |a: &CoefficientVector| Ok(f(a)? + g(a)?);
        let ops: Vec<&LinearDifferentialOperator> = sys.box_operators.iter().chain(&sys.euler_operators).collect();
        for pair in ops.windows(2) {
            let (x, y) = (pair[0], pair[1]);
            let joint = apply_operator(&sum(x, y), &f, &a, &fd).unwrap();
            let apart = apply_operator(x, &f, &a, &fd).unwrap().value + apply_operator(y, &f, &a, &fd).unwrap().value;
            prop_assert!((joint.value - apart).norm() <= 1e-6 * joint.scale.max(1.0));

            let together = apply_operator(x, &f_plus_g, &a, &fd).unwrap();
            let split = apply_operator(x, &f, &a, &fd).unwrap().value + apply_operator(x, &g, &a, &fd).unwrap().value;
            prop_assert!((together.value - split).norm() <= 1e-6 * together.scale.max(1.0));
        }
    }
}
