//! Property tests for the discrete operators and estimators.

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use qclab::beltrami::mori_exponent;
use qclab::field::{apply_multiplier, FrequencyMultiplier};
use qclab::regularity::{holder_seminorm, DistanceMode};
use qclab::transforms::beurling;
use qclab::{Domain, Field, GridSpec};

const N: usize = 32;

fn grid() -> GridSpec {
    GridSpec::new(Complex64::new(0.0, 0.0), 2.0, N).unwrap()
}

fn field_strategy() -> impl Strategy<Value = Field> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), N * N)
        .prop_map(|v| Field::new(grid(), v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn remove_mean(f: &Field) -> Field {
    let m = f.mean();
    f.map(|v| v - m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn beurling_is_an_isometry_on_mean_zero_fields(f in field_strategy()) {
        let f = remove_mean(&f);
        assert_relative_eq!(beurling(&f).l2_norm(), f.l2_norm(), max_relative = 1e-10);
    }

    #[test]
    fn adjoint_inverts_beurling(f in field_strategy()) {
        let adjoint = FrequencyMultiplier::new(
            |q| if q.is_zero() { Complex64::new(0.0, 0.0) } else { q.complex() / q.complex().conj() },
            Complex64::new(0.0, 0.0),
        );
        let f = remove_mean(&f);
        let back = apply_multiplier(&beurling(&f), &adjoint);
        prop_assert!(back.relative_l2_error(&f).unwrap() < 1e-10);
    }

    #[test]
    fn beurling_commutes_with_cell_shifts(f in field_strategy(), dr in 0..N, dc in 0..N) {
        let shift = |g: &Field| {
            let vals: Vec<Complex64> = (0..N * N)
                .map(|i| g.get((i / N + N - dr) % N, (i % N + N - dc) % N))
                .collect();
            Field::new(grid(), vals).unwrap()
        };
        let lhs = beurling(&shift(&f));
        let rhs = shift(&beurling(&f));
        prop_assert!(lhs.relative_l2_error(&rhs).unwrap() < 1e-10);
    }

    #[test]
    fn interpolation_reproduces_node_values(f in field_strategy(), r in 0..N, c in 0..N) {
        let v = f.interpolate(f.grid().node(r, c)).unwrap();
        prop_assert!((v - f.get(r, c)).norm() < 1e-12);
    }

    #[test]
    fn mori_exponent_decreases_in_k(a in 0.0f64..0.99, b in 0.0f64..0.99) {
        let (ea, eb) = (mori_exponent(a).unwrap(), mori_exponent(b).unwrap());
        prop_assert!(ea > 0.0 && ea <= 1.0);
        if a < b {
            prop_assert!(ea > eb);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seminorm_is_deterministic_and_grows_with_pairs(seed in any::<u64>()) {
        let g = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 128).unwrap();
        let f = Field::sample(g, |z| Complex64::new(z.norm_sqr().sqrt(), 0.0)).unwrap();
        let dom = Domain::unit_disc();
        let small = holder_seminorm(&f, &dom, 0.5, 1000, DistanceMode::Euclidean, seed).unwrap();
        let large = holder_seminorm(&f, &dom, 0.5, 4000, DistanceMode::Euclidean, seed).unwrap();
        let again = holder_seminorm(&f, &dom, 0.5, 4000, DistanceMode::Euclidean, seed).unwrap();
        prop_assert!(small.value <= large.value);
        prop_assert_eq!(large.value, again.value);
    }
}
