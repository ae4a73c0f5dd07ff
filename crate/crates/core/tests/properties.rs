//! Randomized structural properties of the operators: algebraic
//! identities that must hold for every admissible input, checked over
//! generated fields, orders, and angles.

use frac2d::fracderiv::FracOrder;
use frac2d::specfun::{gamma, gamma_ratio};
use frac2d::{
    caputo_closed_form, commutes_check, exp_generator_series, rl_closed_form,
    rl_fractional_integral, rotate_polynomial, Axis, Point, PowerSum, PowerTerm, QuadratureSpec,
    ScalarField,
};
use proptest::prelude::*;

fn small_poly() -> impl Strategy<Value = PowerSum> {
    // up to 4 terms, integer exponents <= 6, coefficients in [-3, 3]
    proptest::collection::vec(
        (-3.0f64..3.0, 0usize..=6, 0usize..=6),
        1..=4,
    )
    .prop_map(|terms| {
        PowerSum::new(
            terms
                .into_iter()
                .map(|(c, bx, by)| PowerTerm::new(c, bx as f64, by as f64))
                .collect(),
        )
    })
}

fn fractional_order() -> impl Strategy<Value = f64> {
    prop_oneof![0.05f64..0.95, 1.05f64..1.95]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Gamma(z + 1) = z Gamma(z) away from poles and overflow.
    #[test]
    fn gamma_recurrence(z in 0.05f64..60.0) {
        let g = gamma(z).unwrap();
        let g1 = gamma(z + 1.0).unwrap();
        prop_assert!((g1 - z * g).abs() <= 1e-11 * g1.abs().max(1.0));
    }

    // Reflection: Gamma(z) Gamma(1 - z) sin(pi z) = pi on (0, 1).
    #[test]
    fn gamma_reflection(z in 0.02f64..0.98) {
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap() * (std::f64::consts::PI * z).sin();
        prop_assert!((lhs - std::f64::consts::PI).abs() <= 1e-10);
    }

    // The power rule is linear: D^a (u f + v g) = u D^a f + v D^a g.
    #[test]
    fn rl_power_rule_linear(
        f in small_poly(),
        g in small_poly(),
        u in -2.0f64..2.0,
        v in -2.0f64..2.0,
        alpha in fractional_order(),
    ) {
        let order = FracOrder::new(alpha).unwrap();
        let combo = f.scale(u).add(&g.scale(v));
        let lhs = rl_closed_form(&combo, Axis::X, &order).unwrap();
        let rhs = rl_closed_form(&f, Axis::X, &order)
            .unwrap()
            .scale(u)
            .add(&rl_closed_form(&g, Axis::X, &order).unwrap().scale(v));
        let scale = lhs.max_abs_coeff().max(rhs.max_abs_coeff()).max(1.0);
        prop_assert!(lhs.coeff_distance(&rhs) <= 1e-11 * scale);
    }

    // D^ax_x and D^ay_y commute on polynomials.
    #[test]
    fn axes_commute(
        f in small_poly(),
        ax in 0.05f64..0.95,
        ay in 0.05f64..0.95,
    ) {
        prop_assert!(commutes_check(&f, ax, ay).unwrap());
    }

    // Caputo annihilates integer monomials of degree below ceil(alpha).
    #[test]
    fn caputo_kills_low_powers(alpha in 1.05f64..1.95, c in -5.0f64..5.0) {
        let order = FracOrder::new(alpha).unwrap();
        for b in [0.0, 1.0] {
            let out = caputo_closed_form(&PowerSum::monomial(c, b, 2.0), Axis::X, &order).unwrap();
            prop_assert!(out.is_zero(0.0));
        }
    }

    // exp(phi L) by series agrees with the linear substitution
    // (x, y) -> (x cos phi + y sin phi, -x sin phi + y cos phi).
    #[test]
    fn generator_series_matches_substitution(
        f in small_poly(),
        phi in -std::f64::consts::FRAC_PI_4..std::f64::consts::FRAC_PI_4,
    ) {
        let series = exp_generator_series(&f, phi, 60, 1e-14);
        prop_assert!(series.converged);
        let subst = rotate_polynomial(&f, phi).unwrap();
        let scale = subst.max_abs_coeff().max(1.0);
        prop_assert!(series.sum.coeff_distance(&subst) <= 1e-10 * scale);
    }

    // Semigroup of fractional integration on the closed form:
    // I^a I^b = I^{a+b}, termwise via the power rule at negative order.
    #[test]
    fn integral_semigroup_closed_form(
        f in small_poly(),
        a in 0.1f64..1.5,
        b in 0.1f64..1.5,
    ) {
        let step1 = rl_closed_form(&f, Axis::X, &FracOrder::new(-a).unwrap()).unwrap();
        let step2 = rl_closed_form(&step1, Axis::X, &FracOrder::new(-b).unwrap()).unwrap();
        let direct = rl_closed_form(&f, Axis::X, &FracOrder::new(-a - b).unwrap()).unwrap();
        let scale = direct.max_abs_coeff().max(1.0);
        prop_assert!(step2.coeff_distance(&direct) <= 1e-11 * scale);
    }

    // Quadrature fractional integral of x^beta y^lam reproduces
    // Gamma(beta+1)/Gamma(beta+a+1) x^{beta+a} y^lam, including the
    // singular range beta in (-0.5, 0].
    #[test]
    fn fractional_integral_power_rule(
        beta in -0.5f64..2.0,
        lam in 0.0f64..2.0,
        a in 0.2f64..1.5,
        x in 0.3f64..2.5,
        y in 0.3f64..2.5,
    ) {
        let f = ScalarField::from_power_sum(PowerSum::monomial(1.0, beta, lam));
        let q = QuadratureSpec::default();
        let got = rl_fractional_integral(&f, Axis::X, a, Point::new(x, y), &q).unwrap();
        let want = gamma_ratio(beta + 1.0, beta + a + 1.0).unwrap()
            * x.powf(beta + a)
            * y.powf(lam);
        prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0));
    }
}
