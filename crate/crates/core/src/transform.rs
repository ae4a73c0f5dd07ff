//! Transformation of fractional derivatives under frame rotation: the
//! conjugated (rotated-axis) derivative and the first-order laws
//!
//!   RL:     D^a_{x'} f' =  D^a_x f + phi (a D^{a-1}_x D1_y f + y f(0,y) x^{-a-1}/Gamma(-a)) + O(phi^2)
//!   Caputo: ^C D^a_{x'} f' = ^C D^a_x f + phi (a D^{a-1}_x D1_y f + x^{1-a} D1_y f(0,y)/Gamma(1-a)) + O(phi^2)
//!
//! with opposite sign and x <-> y swapped for the y-axis versions. Both
//! hold for rotation scalars (L f = 0); the precondition is checked
//! numerically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{in_wedge, pullback, Axis, Point, Rotation, ScalarField};
use crate::fracderiv::{
    frac_deriv, rl_fractional_integral, rl_via_bridge, DerivKind, FracOrder,
};
use crate::quadrature::QuadratureSpec;
use crate::specfun::recip_gamma;

/// Scalar-precondition tolerance: |L f| <= SCALAR_TOL * (1 + |grad f|).
pub const SCALAR_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransformReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub phi: f64,
    /// residual(phi) / residual(phi/2); present when requested.
    #[serde(rename = "ratio")]
    pub richardson_ratio: Option<f64>,
}

impl TransformReport {
    fn new(lhs: f64, rhs: f64, phi: f64) -> Self {
        TransformReport {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            phi,
            richardson_ratio: None,
        }
    }
}

/// |L f| at p, normalized by 1 + |grad f|.
pub fn scalar_residual(f: &ScalarField, p: Point) -> Result<f64> {
    let fx = f.partial(1, 0, p)?;
    let fy = f.partial(0, 1, p)?;
    let l = p.y * fx - p.x * fy;
    Ok(l.abs() / (1.0 + (fx * fx + fy * fy).sqrt()))
}

fn ensure_scalar(f: &ScalarField, p: Point) -> Result<()> {
    let r = scalar_residual(f, p)?;
    if r > SCALAR_TOL {
        return Err(Error::Precondition(format!(
            "field `{}` is not a rotation scalar at ({}, {}): |L f| residual {r:.3e}",
            f.name(),
            p.x,
            p.y
        )));
    }
    Ok(())
}

/// D^a (RL or Caputo) along the primed axis of the pulled-back field,
/// evaluated at rotated-frame coordinates `p_prime`.
pub fn frac_deriv_rotated_axis(
    f: &ScalarField,
    rot: &Rotation,
    kind: DerivKind,
    axis: Axis,
    order: &FracOrder,
    p_prime: Point,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !p_prime.in_open_quadrant() {
        return Err(Error::Domain(format!(
            "rotated-frame point ({}, {}) is outside the open first quadrant; the primed integration segment is undefined",
            p_prime.x, p_prime.y
        )));
    }
    let g = pullback(f, rot);
    frac_deriv(&g, kind, axis, order.alpha(), p_prime, q)
}

/// Right-hand side of the infinitesimal RL law at `p`.
fn rl_rhs(
    f: &ScalarField,
    axis: Axis,
    alpha: f64,
    phi: f64,
    p: Point,
    q: &QuadratureSpec,
) -> Result<f64> {
    let base = frac_deriv(f, DerivKind::RiemannLiouville, axis, alpha, p, q)?;
    let cross = match axis {
        Axis::X => f.partial_field(0, 1),
        Axis::Y => f.partial_field(1, 0),
    };
    let mid = frac_deriv(&cross, DerivKind::RiemannLiouville, axis, alpha - 1.0, p, q)?;
    let rg = recip_gamma(-alpha)?;
    let boundary = if rg == 0.0 {
        0.0
    } else {
        match axis {
            Axis::X => p.y * f.trace_x(p.y)? * p.x.powf(-alpha - 1.0) * rg,
            Axis::Y => p.x * f.trace_y(p.x)? * p.y.powf(-alpha - 1.0) * rg,
        }
    };
    let first_order = alpha * mid + boundary;
    Ok(match axis {
        Axis::X => base + phi * first_order,
        Axis::Y => base - phi * first_order,
    })
}

/// Right-hand side of the infinitesimal Caputo law at `p`.
fn caputo_rhs(
    f: &ScalarField,
    axis: Axis,
    alpha: f64,
    phi: f64,
    p: Point,
    q: &QuadratureSpec,
) -> Result<f64> {
    let base = frac_deriv(f, DerivKind::Caputo, axis, alpha, p, q)?;
    let cross = match axis {
        Axis::X => f.partial_field(0, 1),
        Axis::Y => f.partial_field(1, 0),
    };
    let mid = frac_deriv(&cross, DerivKind::RiemannLiouville, axis, alpha - 1.0, p, q)?;
    let rg = recip_gamma(1.0 - alpha)?;
    let boundary = if rg == 0.0 {
        0.0
    } else {
        match axis {
            Axis::X => p.x.powf(1.0 - alpha) * cross.trace_x(p.y)? * rg,
            Axis::Y => p.y.powf(1.0 - alpha) * cross.trace_y(p.x)? * rg,
        }
    };
    let first_order = alpha * mid + boundary;
    Ok(match axis {
        Axis::X => base + phi * first_order,
        Axis::Y => base - phi * first_order,
    })
}

fn check_wedge(rot: &Rotation, p: Point) -> Result<Point> {
    if !in_wedge(rot, p) {
        return Err(Error::Domain(format!(
            "point ({}, {}) leaves the validity wedge under rotation by {}",
            p.x,
            p.y,
            rot.phi()
        )));
    }
    Ok(rot.apply(p))
}

fn infinitesimal_law(
    f: &ScalarField,
    kind: DerivKind,
    axis: Axis,
    order: &FracOrder,
    phi: f64,
    p: Point,
    q: &QuadratureSpec,
    richardson: bool,
) -> Result<TransformReport> {
    let alpha = order.alpha();
    ensure_scalar(f, p)?;
    let rot = Rotation::new(phi);
    let p_prime = check_wedge(&rot, p)?;
    if let Some(m) = order.integer_order() {
        // Integer orders: the law must reduce to the classical gradient
        // transformation; the report compares the general right-hand side
        // against that reduction (Gamma factors kill the boundary term).
        if m != 1 {
            return Err(Error::Order(format!(
                "infinitesimal law at integer order only supports alpha = 1, got {alpha}"
            )));
        }
        let classical = match axis {
            Axis::X => f.partial(1, 0, p)? + phi * f.partial(0, 1, p)?,
            Axis::Y => f.partial(0, 1, p)? - phi * f.partial(1, 0, p)?,
        };
        let rhs = match kind {
            DerivKind::RiemannLiouville => rl_rhs(f, axis, 1.0, phi, p, q)?,
            DerivKind::Caputo => caputo_rhs(f, axis, 1.0, phi, p, q)?,
        };
        return Ok(TransformReport::new(classical, rhs, phi));
    }
    match kind {
        DerivKind::RiemannLiouville => {
            if !(alpha > 0.0 && alpha < 2.0) {
                return Err(Error::Order(format!(
                    "RL law needs 0 < alpha < 1 or 1 < alpha < 2, got {alpha}"
                )));
            }
        }
        DerivKind::Caputo => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Order(format!(
                    "Caputo law needs 0 < alpha < 1, got {alpha}"
                )));
            }
        }
    }
    let lhs = frac_deriv_rotated_axis(f, &rot, kind, axis, order, p_prime, q)?;
    let rhs = match kind {
        DerivKind::RiemannLiouville => rl_rhs(f, axis, alpha, phi, p, q)?,
        DerivKind::Caputo => caputo_rhs(f, axis, alpha, phi, p, q)?,
    };
    let mut report = TransformReport::new(lhs, rhs, phi);
    if richardson {
        let half = infinitesimal_law(f, kind, axis, order, phi / 2.0, p, q, false)?;
        if half.residual > f64::MIN_POSITIVE {
            report.richardson_ratio = Some(report.residual / half.residual);
        }
    }
    Ok(report)
}

/// Infinitesimal RL law, with optional Richardson ratio between phi and
/// phi/2 (a ratio near 4 certifies the O(phi^2) residual).
pub fn infinitesimal_rl(
    f: &ScalarField,
    axis: Axis,
    order: &FracOrder,
    phi: f64,
    p: Point,
    q: &QuadratureSpec,
    richardson: bool,
) -> Result<TransformReport> {
    infinitesimal_law(f, DerivKind::RiemannLiouville, axis, order, phi, p, q, richardson)
}

/// Infinitesimal Caputo law (0 < alpha < 1).
pub fn infinitesimal_caputo(
    f: &ScalarField,
    axis: Axis,
    order: &FracOrder,
    phi: f64,
    p: Point,
    q: &QuadratureSpec,
    richardson: bool,
) -> Result<TransformReport> {
    infinitesimal_law(f, DerivKind::Caputo, axis, order, phi, p, q, richardson)
}

/// Both sides of the two commutator identities behind the RL law.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CommutatorSides {
    /// [x, D^a_x] D1_y f, by operator composition.
    pub x_comm_lhs: f64,
    /// -a D^{a-1}_x D1_y f, the closed expression.
    pub x_comm_rhs: f64,
    /// [D1_x, D^a_x] (y f), by operator composition.
    pub d1_comm_lhs: f64,
    /// y f(0,y) x^{-a-1} / Gamma(-a), the closed expression.
    pub d1_comm_rhs: f64,
}

pub fn commutator_x_with_frac(
    f: &ScalarField,
    alpha: f64,
    p: Point,
    q: &QuadratureSpec,
) -> Result<CommutatorSides> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Order(format!(
            "commutator identities need 0 < alpha < 1, got {alpha}"
        )));
    }
    let order = FracOrder::new(alpha)?;
    let g = f.partial_field(0, 1); // D1_y f
    // [x, D^a_x] g: both derivative applications through the bridge
    // quadrature so the left side is genuinely numerical.
    let x_comm_lhs = p.x * rl_via_bridge(&g, Axis::X, &order, p, q)?
        - rl_via_bridge(&g.times_coord(Axis::X), Axis::X, &order, p, q)?;
    let x_comm_rhs = -alpha * rl_fractional_integral(&g, Axis::X, 1.0 - alpha, p, q)?;

    // [D1_x, D^a_x] (y f) = D^{a+1}_x (y f) - D^a_x D1_x (y f)
    let yf = f.times_coord(Axis::Y);
    let up = FracOrder::new(alpha + 1.0)?;
    let d1_comm_lhs = rl_via_bridge(&yf, Axis::X, &up, p, q)?
        - rl_via_bridge(&yf.partial_field(1, 0), Axis::X, &order, p, q)?;
    let rg = recip_gamma(-alpha)?;
    let d1_comm_rhs = p.y * f.trace_x(p.y)? * p.x.powf(-alpha - 1.0) * rg;
    Ok(CommutatorSides {
        x_comm_lhs,
        x_comm_rhs,
        d1_comm_lhs,
        d1_comm_rhs,
    })
}

/// Exact scalar invariance of the Laplacian: (D2_{x'} + D2_{y'}) f' at the
/// rotated point against (D2_x + D2_y) f at the original point. Holds at
/// every angle, not just to first order.
pub fn laplacian_invariance(
    f: &ScalarField,
    phi: f64,
    p: Point,
    _q: &QuadratureSpec,
) -> Result<TransformReport> {
    let rot = Rotation::new(phi);
    let p_prime = rot.apply(p);
    let g = pullback(f, &rot);
    let lhs = g.partial(2, 0, p_prime)? + g.partial(0, 2, p_prime)?;
    let rhs = f.partial(2, 0, p)? + f.partial(0, 2, p)?;
    Ok(TransformReport::new(lhs, rhs, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PowerSum, PowerTerm};
    use approx::assert_relative_eq;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn rotated_axis_monomial_closed_form() {
        // For f whose rotated form is x'^b y'^l, the primed derivative obeys
        // the power rule in primed coordinates. Build f as the pullback
        // inverse: f(x,y) = (c x + s y)^2 (-s x + c y) so f' = x'^2 y'.
        let phi = 0.1f64;
        let (c, s) = (phi.cos(), phi.sin());
        let f = ScalarField::from_power_sum(
            PowerSum::monomial(1.0, 2.0, 0.0)
                .compose_linear(c, s, -s, c)
                .unwrap()
                .mul(&PowerSum::monomial(1.0, 0.0, 1.0).compose_linear(c, s, -s, c).unwrap()),
        );
        let rot = Rotation::new(phi);
        let order = FracOrder::new(0.5).unwrap();
        let pp = Point::new(1.3, 0.8);
        let got = frac_deriv_rotated_axis(
            &f,
            &rot,
            DerivKind::RiemannLiouville,
            Axis::X,
            &order,
            pp,
            &q(),
        )
        .unwrap();
        // Gamma(3)/Gamma(2.5) x'^{1.5} y'
        let want = crate::specfun::gamma_ratio(3.0, 2.5).unwrap() * pp.x.powf(1.5) * pp.y;
        assert_relative_eq!(got, want, max_relative = 1e-10);
    }

    #[test]
    fn rotated_axis_scalar_integer_order() {
        let f = ScalarField::r2();
        let rot = Rotation::new(0.4);
        let order = FracOrder::new(2.0).unwrap();
        let got = frac_deriv_rotated_axis(
            &f,
            &rot,
            DerivKind::RiemannLiouville,
            Axis::X,
            &order,
            Point::new(0.9, 1.4),
            &q(),
        )
        .unwrap();
        assert_relative_eq!(got, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn rl_law_quadratic_residual() {
        let f = ScalarField::r2();
        let order = FracOrder::new(0.5).unwrap();
        let p = Point::new(1.0, 1.0);
        let rep = infinitesimal_rl(&f, Axis::X, &order, 0.04, p, &q(), true).unwrap();
        let ratio = rep.richardson_ratio.unwrap();
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
        // y-axis law as well
        let rep_y = infinitesimal_rl(&f, Axis::Y, &order, 0.04, p, &q(), true).unwrap();
        let ratio_y = rep_y.richardson_ratio.unwrap();
        assert!((3.0..=5.0).contains(&ratio_y), "ratio {ratio_y}");
    }

    #[test]
    fn caputo_law_quadratic_residual() {
        let f = ScalarField::r2();
        let order = FracOrder::new(0.5).unwrap();
        let rep =
            infinitesimal_caputo(&f, Axis::X, &order, 0.04, Point::new(1.0, 1.0), &q(), true)
                .unwrap();
        let ratio = rep.richardson_ratio.unwrap();
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn caputo_law_constant_field_trivial() {
        let f = ScalarField::constant(1.0);
        let order = FracOrder::new(0.5).unwrap();
        let rep =
            infinitesimal_caputo(&f, Axis::X, &order, 0.03, Point::new(1.0, 1.0), &q(), false)
                .unwrap();
        assert!(rep.lhs.abs() < 1e-10 && rep.rhs.abs() < 1e-10);
    }

    #[test]
    fn gradient_reduction_at_integer_order() {
        let f = ScalarField::r2();
        let order = FracOrder::new(1.0).unwrap();
        for &axis in &[Axis::X, Axis::Y] {
            let rep =
                infinitesimal_rl(&f, axis, &order, 0.02, Point::new(1.5, 0.8), &q(), false)
                    .unwrap();
            assert!(rep.residual <= 1e-12, "residual {}", rep.residual);
        }
    }

    #[test]
    fn non_scalar_field_rejected() {
        let f = ScalarField::from_power_sum(PowerSum::monomial(1.0, 1.0, 0.0));
        let order = FracOrder::new(0.5).unwrap();
        let err = infinitesimal_rl(&f, Axis::X, &order, 0.02, Point::new(1.0, 1.0), &q(), false);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn wedge_violation_is_domain_error() {
        let f = ScalarField::r2();
        let order = FracOrder::new(0.5).unwrap();
        let err =
            infinitesimal_rl(&f, Axis::X, &order, 0.04, Point::new(1.0, 0.001), &q(), false);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn commutator_identities_on_r2() {
        let p = Point::new(1.0, 1.0);
        let sides = commutator_x_with_frac(&ScalarField::r2(), 0.5, p, &q()).unwrap();
        // [x, D^0.5_x] D1_y r2 = -0.5 * 2y x^{0.5}/Gamma(1.5) = -1.1283791671
        assert_relative_eq!(sides.x_comm_rhs, -1.128_379_167_095_512_6, max_relative = 1e-9);
        assert_relative_eq!(sides.x_comm_lhs, sides.x_comm_rhs, max_relative = 1e-7);
        assert_relative_eq!(sides.d1_comm_lhs, sides.d1_comm_rhs, max_relative = 1e-7);
    }

    #[test]
    fn commutator_vanishing_trace() {
        // f = x y has zero x = 0 trace, so [D1_x, D^a_x](y f) = 0
        let f = ScalarField::from_power_sum(PowerSum::monomial(1.0, 1.0, 1.0));
        let sides = commutator_x_with_frac(&f, 0.5, Point::new(1.2, 0.9), &q()).unwrap();
        assert_eq!(sides.d1_comm_rhs, 0.0);
        assert!(sides.d1_comm_lhs.abs() < 1e-7, "lhs {}", sides.d1_comm_lhs);
    }

    #[test]
    fn laplacian_invariant_at_finite_angles() {
        let cases: Vec<(ScalarField, f64)> = vec![
            (ScalarField::r2(), 4.0),
            (
                ScalarField::from_power_sum(PowerSum::monomial(1.0, 3.0, 1.0)),
                12.0, // 6xy at (1, 2)
            ),
            (ScalarField::r4(), 32.0), // 16 r^2 at (1, 1)
        ];
        let points = [Point::new(1.0, 2.0), Point::new(1.0, 2.0), Point::new(1.0, 1.0)];
        for ((f, want), p) in cases.iter().zip(points.iter()) {
            for &phi in &[0.1, 0.3, 0.7] {
                let rep = laplacian_invariance(f, phi, *p, &q()).unwrap();
                assert_relative_eq!(rep.lhs, *want, max_relative = 1e-9);
                assert!(rep.residual <= 1e-8 * want.abs(), "residual {}", rep.residual);
            }
        }
    }

    #[test]
    fn axis_swap_symmetry() {
        // swapping x <-> y in the field and negating phi maps the x-law
        // onto the y-law
        let f = ScalarField::from_power_sum(PowerSum::new(vec![
            PowerTerm::new(1.0, 2.0, 0.0),
            PowerTerm::new(1.0, 0.0, 2.0),
        ]));
        let order = FracOrder::new(0.4).unwrap();
        let p = Point::new(1.1, 0.9);
        let swapped = Point::new(0.9, 1.1);
        let rx = infinitesimal_rl(&f, Axis::X, &order, 0.03, p, &q(), false).unwrap();
        let ry = infinitesimal_rl(&f, Axis::Y, &order, -0.03, swapped, &q(), false).unwrap();
        assert_relative_eq!(rx.lhs, ry.lhs, max_relative = 1e-9);
        assert_relative_eq!(rx.rhs, ry.rhs, max_relative = 1e-9);
    }
}
