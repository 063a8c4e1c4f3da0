use fractal_calc::calculus::{fractal_integral, GridFunction};
use fractal_calc::cantor::{covering_measure, generate, generate_levels, hausdorff_dimension, CantorSpec};
use fractal_calc::expr::Expr;
use fractal_calc::fde::warp_time;
use fractal_calc::staircase::{build_staircase, StaircaseTable};
use proptest::prelude::*;

fn table(mu: f64, depth: u32) -> StaircaseTable {
    let alpha = hausdorff_dimension(mu).unwrap();
    build_staircase(&CantorSpec::new(mu, depth).unwrap(), alpha, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_counts_and_lengths(mu in 0.05f64..0.95, depth in 0u32..12) {
        let set = generate(&CantorSpec::new(mu, depth).unwrap());
        prop_assert_eq!(set.len(), 1usize << depth);
        let r = (1.0 - mu) / 2.0;
        for iv in set.intervals() {
            prop_assert!((iv.len() - r.powi(depth as i32)).abs() <= 1e-12);
        }
        let want = (1.0 - mu).powi(depth as i32);
        prop_assert!((covering_measure(&set) - want).abs() <= 1e-12 * want.max(1e-300));
    }

    #[test]
    fn levels_are_nested(mu in 0.05f64..0.95, depth in 1u32..9) {
        let levels = generate_levels(&CantorSpec::new(mu, depth).unwrap());
        for pair in levels.windows(2) {
            let (coarse, fine) = (&pair[0], &pair[1]);
            for iv in fine.intervals() {
                let parent = coarse.intervals().iter().any(|p| p.a <= iv.a && iv.b <= p.b);
                prop_assert!(parent, "[{}, {}] has no parent", iv.a, iv.b);
            }
        }
    }

    #[test]
    fn dimension_decreases_with_removed_fraction(a in 0.01f64..0.98, gap in 0.001f64..0.01) {
        let b = (a + gap).min(0.99);
        prop_assert!(hausdorff_dimension(b).unwrap() < hausdorff_dimension(a).unwrap());
    }

    #[test]
    fn staircase_is_monotone(mu in 0.1f64..0.9, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let table = table(mu, 10);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(table.eval(lo).unwrap() <= table.eval(hi).unwrap());
    }

    #[test]
    fn warp_inverts_the_staircase(t in 0.0f64..1.0) {
        let table = table(0.2, 10);
        let s = table.eval(t).unwrap();
        let back = warp_time(&table, s).unwrap();
        prop_assert!(back <= t + 1e-12);
        prop_assert!((table.eval(back).unwrap() - s).abs() <= 1e-12);
    }

    #[test]
    fn integral_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, lo in 0.0f64..0.5, hi in 0.5f64..1.0) {
        let table = table(0.2, 8);
        let f = GridFunction::sample(&table, |t, _| t * t);
        let g = GridFunction::sample(&table, |_, s| s.sin());
        let combined = f.combine(a, &g, b).unwrap();
        let lhs = fractal_integral(&combined, lo, hi).unwrap();
        let rhs = a * fractal_integral(&f, lo, hi).unwrap() + b * fractal_integral(&g, lo, hi).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn symbolic_derivative_matches_finite_difference(x in 0.2f64..2.0) {
        for src in ["y^3 - 2*y", "exp(-y) * sin(y)", "ln(y) / (1 + y^2)", "sqrt(y) + pow(y, 2.5)"] {
            let e = Expr::parse(src).unwrap();
            let f = e.bind(&["y"]).unwrap();
            let df = e.derivative("y").bind(&["y"]).unwrap();
            let h = 1e-6;
            let fd = (f.eval(&[x + h]) - f.eval(&[x - h])) / (2.0 * h);
            prop_assert!((df.eval(&[x]) - fd).abs() <= 1e-6 * (1.0 + fd.abs()), "{}", src);
        }
    }
}
