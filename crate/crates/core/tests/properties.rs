use proptest::prelude::*;

use axireg::diagnostics::{criterion_a, criterion_b, energy_budget};
use axireg::elliptic::StreamSolver;
use axireg::grid::{make_grid, GridSpec, Parity, ScalarField};
use axireg::io::{decode_snapshot, encode_snapshot};
use axireg::State;

fn field(g: &std::sync::Arc<axireg::Grid>, c: &[f64]) -> ScalarField {
    ScalarField::from_fn(g, Parity::Even, |r, z| {
        let tz = 2.0 * std::f64::consts::PI * z;
        (1.0 - r * r) * (c[0] + c[1] * r * r + c[2] * tz.cos() + c[3] * (2.0 * tz).sin())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn solve_is_linear(a in proptest::collection::vec(-1.0..1.0f64, 4),
                       b in proptest::collection::vec(-1.0..1.0f64, 4),
                       s in -3.0..3.0f64) {
        let g = make_grid(GridSpec::new(1.0, 1.0, 12, 8)).unwrap();
        let solver = StreamSolver::new(&g);
        let (fa, fb) = (field(&g, &a), field(&g, &b));
        let combo = fa.zip(&fb, Parity::Even, |x, y| x + s * y);
        let lhs = solver.solve(&combo).unwrap();
        let (pa, pb) = (solver.solve(&fa).unwrap(), solver.solve(&fb).unwrap());
        let rhs = pa.zip(&pb, Parity::Even, |x, y| x + s * y);
        let scale = 1.0 + rhs.max_abs();
        prop_assert!(lhs.zip(&rhs, Parity::Even, |x, y| x - y).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn monitors_are_nonnegative(a in proptest::collection::vec(-1.0..1.0f64, 4),
                                b in proptest::collection::vec(-1.0..1.0f64, 4)) {
        let g = make_grid(GridSpec::new(1.0, 1.0, 12, 8)).unwrap();
        let omega1 = field(&g, &b);
        let psi1 = StreamSolver::new(&g).solve(&omega1).unwrap();
        let st = State::new(field(&g, &a), omega1, psi1, 0.0).unwrap();
        let e = energy_budget(&st);
        prop_assert!(e.energy >= 0.0 && e.gradient >= 0.0 && e.weighted >= 0.0);
        prop_assert!(criterion_a(&st) >= 0.0 && criterion_b(&st) >= 0.0);
    }

    #[test]
    fn snapshot_roundtrip_is_exact(a in proptest::collection::vec(-1e3..1e3f64, 4), t in 0.0..10.0f64) {
        let g = make_grid(GridSpec::new(1.3, 0.7, 6, 4)).unwrap();
        let mut st = State::zeros(&g, t);
        st.u1 = field(&g, &a);
        let bytes = encode_snapshot(&st, 0.01);
        let back = decode_snapshot(&bytes, std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(back.state.u1.values(), st.u1.values());
        prop_assert_eq!(back.state.t.to_bits(), t.to_bits());
    }
}
