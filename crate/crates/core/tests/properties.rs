//! Randomized invariants of the linear-algebra core and the channel family.

use divlab_core::{
    apply_ad, bloch_to_state, choi_of, hermitian_eig, interval_map, trace_distance, trace_norm,
    BlochVector, ComplexMatrix, DensityMatrix, JCParams, SurvivalRatio,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn bloch() -> impl Strategy<Value = BlochVector> {
    (0.0f64..=1.0, 0.0f64..=PI, 0.0f64..2.0 * PI)
        .prop_map(|(r, theta, phi)| BlochVector::new(r, theta, phi).unwrap())
}

fn qubit() -> impl Strategy<Value = DensityMatrix> {
    bloch().prop_map(|b| bloch_to_state(&b).unwrap())
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_map(move |v| {
        let mut m = ComplexMatrix::zeros(dim).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = Complex64::new(v[2 * (i * dim + j)], v[2 * (i * dim + j) + 1]);
            }
        }
        (m + m.adjoint()) * 0.5
    })
}

/// Random two-qubit state `A A^dagger / tr`.
fn two_qubit() -> impl Strategy<Value = DensityMatrix> {
    proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let mut a = ComplexMatrix::zeros(4).unwrap();
        for k in 0..16 {
            a[(k / 4, k % 4)] = Complex64::new(v[2 * k], v[2 * k + 1]);
        }
        let m = a.matmul(&a.adjoint());
        let tr = m.trace().re.max(1e-12);
        DensityMatrix::new(m * (1.0 / tr)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn trace_distance_is_symmetric(a in qubit(), b in qubit()) {
        let (x, y) = (trace_distance(&a, &b).unwrap(), trace_distance(&b, &a).unwrap());
        prop_assert!((x - y).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&x));
    }

    #[test]
    fn trace_distance_triangle(a in qubit(), b in qubit(), c in qubit()) {
        let ac = trace_distance(&a, &c).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-10);
    }

    #[test]
    fn two_qubit_triangle(a in two_qubit(), b in two_qubit(), c in two_qubit()) {
        let ac = trace_distance(&a, &c).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-10);
    }

    #[test]
    fn damping_contracts(a in qubit(), b in qubit(), g in -1.0f64..=1.0) {
        let ratio = SurvivalRatio::new(g);
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&apply_ad(&ratio, &a).unwrap(), &apply_ad(&ratio, &b).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-10);
    }

    #[test]
    fn trace_norm_is_homogeneous(m in hermitian(4), c in -10.0f64..10.0) {
        let lhs = trace_norm(&(m * c)).unwrap();
        let rhs = c.abs() * trace_norm(&m).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn eigen_decomposition_contract(m in hermitian(4)) {
        let e = hermitian_eig(&m).unwrap();
        let sum: f64 = e.values().iter().sum();
        prop_assert!((sum - m.trace().re).abs() <= 1e-10);
        prop_assert!(e.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(e.reconstruct().max_abs_diff(&m) <= 1e-10);
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(4).unwrap()) <= 1e-10);
    }

    #[test]
    fn qubit_eigen_decomposition_contract(m in hermitian(2)) {
        let e = hermitian_eig(&m).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&m) <= 1e-10);
    }

    #[test]
    fn bloch_states_are_valid(b in bloch()) {
        let rho = bloch_to_state(&b).unwrap();
        prop_assert!(DensityMatrix::new(*rho.matrix()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn interval_maps_compose(t in 0.0f64..6.0, t1 in 0.001f64..0.5, t2 in 0.001f64..0.5,
                             gamma0 in 0.1f64..3.0, lambda in 0.5f64..3.0) {
        let p = JCParams::new(gamma0, lambda).unwrap();
        let whole = interval_map(t, t1 + t2, &p, 1e-8);
        let first = interval_map(t, t1, &p, 1e-8);
        let second = interval_map(t + t1, t2, &p, 1e-8);
        if let (Some(w), Some(a), Some(b)) = (whole.value(), first.value(), second.value()) {
            // Relative to the size of the factors, which can be large near zeros of G.
            prop_assert!((w - a * b).abs() <= 1e-10 * (a * b).abs().max(1.0));
        }
    }

    #[test]
    fn choi_is_trace_one_hermitian(g in -2.0f64..2.0) {
        let c = choi_of(&SurvivalRatio::new(g)).unwrap();
        prop_assert!(c.matrix.is_hermitian());
        prop_assert!((c.matrix.trace().re - 1.0).abs() <= 1e-10);
        let norm = trace_norm(&c.matrix).unwrap();
        prop_assert!((norm - (g * g).max(1.0)).abs() <= 1e-10);
    }
}
