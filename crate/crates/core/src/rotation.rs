//! The SO(2) generator L = y d/dx - x d/dy acting on power sums, its
//! exponential as an operator series, exact polynomial rotation, and the
//! commutator identities the operator algebra must satisfy.

use crate::error::{Error, Result};
use crate::field::{binom_f, Axis, PowerSum, PowerTerm};

pub const DEFAULT_MAX_SERIES_TERMS: usize = 60;
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;

/// L applied termwise: c x^b y^l -> c b x^{b-1} y^{l+1} - c l x^{b+1} y^{l-1}.
pub fn apply_generator(ps: &PowerSum) -> PowerSum {
    let mut terms = Vec::with_capacity(2 * ps.terms().len());
    for t in ps.terms() {
        if t.bx != 0.0 {
            terms.push(PowerTerm::new(t.coeff * t.bx, t.bx - 1.0, t.by + 1.0));
        }
        if t.by != 0.0 {
            terms.push(PowerTerm::new(-t.coeff * t.by, t.bx + 1.0, t.by - 1.0));
        }
    }
    PowerSum::new(terms)
}

#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub sum: PowerSum,
    pub terms_used: usize,
    /// Sup coefficient norm of the last term added.
    pub tail_estimate: f64,
    pub converged: bool,
}

/// e^{phi L} ps = sum_k phi^k / k! L^k ps, truncated when the added term's
/// coefficient sup-norm drops below `tol` or after `max_terms` terms.
pub fn exp_generator_series(
    ps: &PowerSum,
    phi: f64,
    max_terms: usize,
    tol: f64,
) -> SeriesResult {
    let mut sum = ps.clone();
    let mut current = ps.clone();
    let mut factor = 1.0;
    let mut tail = 0.0;
    let mut used = 1;
    let mut converged = false;
    for k in 1..=max_terms {
        current = apply_generator(&current);
        factor *= phi / k as f64;
        let term = current.scale(factor);
        tail = term.max_abs_coeff();
        used = k + 1;
        if tail <= tol {
            converged = true;
            break;
        }
        sum = sum.add(&term);
    }
    SeriesResult {
        sum,
        terms_used: used,
        tail_estimate: tail,
        converged,
    }
}

/// Exact rotation of a polynomial by substitution
/// x -> cos(phi) x + sin(phi) y, y -> -sin(phi) x + cos(phi) y,
/// which is e^{phi L} in closed form.
pub fn rotate_polynomial(ps: &PowerSum, phi: f64) -> Result<PowerSum> {
    if !ps.is_polynomial() {
        return Err(Error::Domain(
            "symbolic rotation needs non-negative integer exponents; rotate at evaluation time via pullback".into(),
        ));
    }
    let (c, s) = (phi.cos(), phi.sin());
    ps.compose_linear(c, s, -s, c)
}

/// Lemma check: e^{phi L}(A B) = (e^{phi L} A)(e^{phi L} B), plus the
/// integer Leibniz expansion L^n(AB) = sum_k C(n,k) L^k A L^{n-k} B for
/// n <= 4.
pub fn check_product_rule(a: &PowerSum, b: &PowerSum, phi: f64, tol: f64) -> bool {
    let lhs = exp_generator_series(&a.mul(b), phi, DEFAULT_MAX_SERIES_TERMS, DEFAULT_SERIES_TOL);
    let ra = exp_generator_series(a, phi, DEFAULT_MAX_SERIES_TERMS, DEFAULT_SERIES_TOL);
    let rb = exp_generator_series(b, phi, DEFAULT_MAX_SERIES_TERMS, DEFAULT_SERIES_TOL);
    let rhs = ra.sum.mul(&rb.sum);
    let scale = lhs.sum.max_abs_coeff().max(rhs.max_abs_coeff()).max(1.0);
    if lhs.sum.coeff_distance(&rhs) > tol * scale {
        return false;
    }
    // integer-order Leibniz expansion of L^n on the product
    let mut la = vec![a.clone()];
    let mut lb = vec![b.clone()];
    for _ in 0..4 {
        la.push(apply_generator(la.last().unwrap()));
        lb.push(apply_generator(lb.last().unwrap()));
    }
    let mut lab = a.mul(b);
    for n in 1..=4usize {
        lab = apply_generator(&lab);
        let mut rhs_n = PowerSum::zero();
        for k in 0..=n {
            rhs_n = rhs_n.add(&la[k].mul(&lb[n - k]).scale(binom_f(n, k)));
        }
        let scale_n = lab.max_abs_coeff().max(rhs_n.max_abs_coeff()).max(1.0);
        if lab.coeff_distance(&rhs_n) > 1e-12 * scale_n {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct CommutatorCheck {
    pub name: String,
    pub max_err: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct CommutatorReport {
    pub checks: Vec<CommutatorCheck>,
}

impl CommutatorReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn test_family() -> Vec<PowerSum> {
    vec![
        PowerSum::monomial(1.0, 1.0, 0.0),
        PowerSum::monomial(1.0, 0.0, 1.0),
        PowerSum::monomial(1.0, 1.0, 1.0),
        PowerSum::monomial(1.0, 3.0, 1.0),
        PowerSum::new(vec![
            PowerTerm::new(1.0, 2.0, 0.0),
            PowerTerm::new(1.0, 0.0, 2.0),
        ]),
        PowerSum::monomial(1.0, 2.0, 2.0),
        PowerSum::new(vec![
            PowerTerm::new(1.0, 0.0, 0.0),
            PowerTerm::new(1.0, 1.0, 0.0),
            PowerTerm::new(2.0, 0.0, 1.0),
        ]),
    ]
}

/// Verifies, coefficientwise on a fixed polynomial family:
/// [D1_x, L] = -D1_y, [D1_y, L] = +D1_x, [D2_x, L] = -2 D1_x D1_y,
/// [D2_y, L] = +2 D1_x D1_y, [D2_x + D2_y, L] = 0, and the conjugation
/// e^{phi L} L e^{-phi L} = L.
pub fn commutator_integer_checks(tol: f64) -> CommutatorReport {
    let family = test_family();
    let phi = 0.3;
    type OpPair = (&'static str, Box<dyn Fn(&PowerSum) -> (PowerSum, PowerSum)>);
    let commut = |ps: &PowerSum, d: &dyn Fn(&PowerSum) -> PowerSum| -> PowerSum {
        // [D, L] ps = D(L ps) - L(D ps)
        d(&apply_generator(ps)).sub(&apply_generator(&d(ps)))
    };
    let checks: Vec<OpPair> = vec![
        (
            "[Dx, L] = -Dy",
            Box::new(move |ps| {
                (
                    commut(ps, &|s: &PowerSum| s.partial(Axis::X, 1)),
                    ps.partial(Axis::Y, 1).scale(-1.0),
                )
            }),
        ),
        (
            "[Dy, L] = +Dx",
            Box::new(move |ps| {
                (
                    commut(ps, &|s: &PowerSum| s.partial(Axis::Y, 1)),
                    ps.partial(Axis::X, 1),
                )
            }),
        ),
        (
            "[Dxx, L] = -2 Dx Dy",
            Box::new(move |ps| {
                (
                    commut(ps, &|s: &PowerSum| s.partial(Axis::X, 2)),
                    ps.partial_xy(1, 1).scale(-2.0),
                )
            }),
        ),
        (
            "[Dyy, L] = +2 Dx Dy",
            Box::new(move |ps| {
                (
                    commut(ps, &|s: &PowerSum| s.partial(Axis::Y, 2)),
                    ps.partial_xy(1, 1).scale(2.0),
                )
            }),
        ),
        (
            "[Dxx + Dyy, L] = 0",
            Box::new(move |ps| {
                (
                    commut(ps, &|s: &PowerSum| {
                        s.partial(Axis::X, 2).add(&s.partial(Axis::Y, 2))
                    }),
                    PowerSum::zero(),
                )
            }),
        ),
        (
            "exp(phi L) L exp(-phi L) = L",
            Box::new(move |ps| {
                let inner =
                    exp_generator_series(ps, -phi, DEFAULT_MAX_SERIES_TERMS, DEFAULT_SERIES_TOL);
                let mid = apply_generator(&inner.sum);
                let outer =
                    exp_generator_series(&mid, phi, DEFAULT_MAX_SERIES_TERMS, DEFAULT_SERIES_TOL);
                (outer.sum, apply_generator(ps))
            }),
        ),
    ];
    let mut report = CommutatorReport::default();
    for (name, f) in checks {
        let mut max_err = 0.0f64;
        for ps in &family {
            let (lhs, rhs) = f(ps);
            let scale = lhs.max_abs_coeff().max(rhs.max_abs_coeff()).max(1.0);
            max_err = max_err.max(lhs.coeff_distance(&rhs) / scale);
        }
        report.checks.push(CommutatorCheck {
            name: name.to_string(),
            pass: max_err <= tol,
            max_err,
        });
    }
    report
}
