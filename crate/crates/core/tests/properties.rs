use num_complex::Complex64;
use proptest::prelude::*;

use qtcc::cmaes::CmaState;
use qtcc::floquet::{floquet_propagate, ising_template, FloquetSchedule, Mode, NoiseSpec};
use qtcc::qml::{
    feature_readout, parabolic_encode, target_function, training_loss, vqkan_angle, BSplineBasis,
    EncodedInput, ModelKind, ModelSpec,
};
use qtcc::qrc::{fit_filter, input_operator};
use qtcc::quantum::{PauliString, Statevector};
use qtcc::rng::RngStream;

fn unit4() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0..=1.0f64)
}

fn state(n: usize) -> impl Strategy<Value = Statevector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_filter_map(
        "zero vector",
        |v| {
            Statevector::from_amplitudes(
                v.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            )
            .ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_readout_round_trip(u in unit4()) {
        let back = feature_readout(&parabolic_encode(&u).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&u) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn target_invariant_under_reflection(u in unit4(), i in 0usize..4) {
        let mut v = u;
        v[i] = 1.0 - v[i];
        let a = target_function(&EncodedInput::new(u).unwrap());
        let b = target_function(&EncodedInput::new(v).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn spline_partition_and_support(x in -0.1..0.35f64, cells in 1usize..8, degree in 0usize..4) {
        let basis = BSplineBasis::new(0.0, 0.25, cells, degree).unwrap();
        let values = basis.evaluate(x);
        prop_assert_eq!(values.len(), cells + degree);
        prop_assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(values.iter().all(|v| *v >= -1e-15));
        let xc = x.clamp(0.0, 0.25);
        for (l, v) in values.iter().enumerate() {
            let (lo, hi) = basis.support(l);
            if xc < lo || xc > hi {
                prop_assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn angle_in_range(x in prop::array::uniform4(-1.0..1.5f64), c in prop::collection::vec(-3.0..3.0f64, 8)) {
        let basis = BSplineBasis::new(0.0, 0.25, 5, 3).unwrap();
        let (angle, clamps) = vqkan_angle(&x, &c, &basis).unwrap();
        prop_assert!((0.0..=4.0 * std::f64::consts::PI).contains(&angle));
        prop_assert!(clamps <= 4);
    }

    #[test]
    fn ry_gates_preserve_norm(s in state(3), q in 0usize..3, c in 0usize..3, angle in -7.0..7.0f64) {
        let mut s = s;
        s.apply_ry(q, angle).unwrap();
        if c != q {
            s.apply_controlled_ry(c, q, angle).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_expectation_bounded(s in state(3), idx in 0usize..64, coef in -2.0..2.0f64) {
        let chars = ['I', 'X', 'Y', 'Z'];
        let label: String = (0..3).map(|k| chars[(idx >> (2 * k)) % 4]).collect();
        let p = PauliString::parse(&label, coef).unwrap();
        let e = s.expectation(&[p]).unwrap();
        prop_assert!(e.abs() <= coef.abs() + 1e-12);
    }

    #[test]
    fn floquet_keeps_norm(coefs in prop::collection::vec(-1.0..1.0f64, 14), eta in 0.0..0.5f64, seed in any::<u64>()) {
        let schedule = FloquetSchedule::new(ising_template(4).unwrap(), 1.0, 4, 0.001).unwrap();
        let spec = NoiseSpec::uniform(coefs, eta).unwrap();
        let mut rng = RngStream::from_seed(seed);
        let out = floquet_propagate(&Statevector::zero(4).unwrap(), &schedule, &spec, 3, &mut rng, |_| {}).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn input_operator_weights(x in -1.0..=1.0f64) {
        let p = input_operator(x).unwrap();
        prop_assert!((p.p0 + p.p1 - 1.0).abs() < 1e-15);
        prop_assert!(p.p0 >= 0.0 && p.p1 >= 0.0);
    }

    #[test]
    fn filter_solves_consistent_systems(w in prop::collection::vec(-2.0..2.0f64, 3), seed in any::<u64>()) {
        let mut rng = RngStream::from_seed(seed);
        let v = nalgebra::DMatrix::from_fn(12, 3, |_, _| rng.uniform(-1.0, 1.0));
        let y: Vec<f64> = (&v * nalgebra::DVector::from_column_slice(&w)).iter().copied().collect();
        let fitted = fit_filter(&v, &y, 1e-12).unwrap();
        for (a, b) in fitted.iter().zip(&w) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn cma_covariance_symmetric_positive(seed in any::<u64>(), dim in 1usize..6) {
        let mut state = CmaState::new(&vec![0.5; dim], 0.4).unwrap();
        let mut rng = RngStream::from_seed(seed);
        let mut best = f64::INFINITY;
        for _ in 0..15 {
            let c = state.ask(&mut rng);
            let f: Vec<f64> = c.iter().map(|x| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum()).collect();
            state.tell(&c, &f).unwrap();
            let cov = state.covariance();
            prop_assert!((cov - cov.transpose()).abs().max() <= 1e-12 * cov.abs().max());
            prop_assert!(nalgebra::SymmetricEigen::new(cov.clone()).eigenvalues.min() > 0.0);
            let now = state.best().unwrap().1;
            prop_assert!(now <= best);
            best = now;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn training_loss_finite_under_probes(seed in any::<u64>(), h in 1e-6..1e-2f64, vqkan in any::<bool>()) {
        let kind = if vqkan { ModelKind::Vqkan } else { ModelKind::Qnn };
        let spec = ModelSpec::standard(kind).unwrap();
        let mut rng = RngStream::from_seed(seed);
        let points = qtcc::qml::sample_points(3, 0.0, 0.25, &mut rng).unwrap();
        let mut params: Vec<f64> = (0..spec.n_params()).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let base = training_loss(&spec, &params, &points, Mode::Qtcc, 2, &mut rng).unwrap().value;
        let i = (seed as usize) % params.len();
        params[i] += h;
        let probe = training_loss(&spec, &params, &points, Mode::Noiseless, 1, &mut rng).unwrap().value;
        prop_assert!(base.is_finite() && probe.is_finite());
    }
}
