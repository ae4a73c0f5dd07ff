//! Scalar fields on the open first quadrant, power-sum symbolic algebra,
//! passive plane rotations.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Exponents closer than this are merged when normalizing power sums,
/// and an exponent this close to an integer is treated as one.
pub const EXP_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Strictly inside the open first quadrant.
    pub fn in_open_quadrant(&self) -> bool {
        self.x > 0.0 && self.y > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    pub fn coord(self, p: Point) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
        }
    }
}

/// Passive rotation of the coordinate frame by `phi`:
/// x' = x cos(phi) + y sin(phi), y' = -x sin(phi) + y cos(phi).
#[derive(Clone, Copy, Debug)]
pub struct Rotation {
    phi: f64,
    cos: f64,
    sin: f64,
}

impl Rotation {
    pub fn new(phi: f64) -> Self {
        Rotation {
            phi,
            cos: phi.cos(),
            sin: phi.sin(),
        }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn cos(&self) -> f64 {
        self.cos
    }

    pub fn sin(&self) -> f64 {
        self.sin
    }

    /// Row-major matrix [[c, s], [-s, c]].
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.cos, self.sin], [-self.sin, self.cos]]
    }

    /// Coordinates of a fixed point in the rotated frame.
    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.cos * p.x + self.sin * p.y,
            -self.sin * p.x + self.cos * p.y,
        )
    }

    /// Original-frame coordinates from rotated-frame ones.
    pub fn inverse_apply(&self, p: Point) -> Point {
        Point::new(
            self.cos * p.x - self.sin * p.y,
            self.sin * p.x + self.cos * p.y,
        )
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            phi: -self.phi,
            cos: self.cos,
            sin: -self.sin,
        }
    }
}

/// Rotated-frame coordinates of `p` under `rot`.
pub fn rotate_point(rot: &Rotation, p: Point) -> Point {
    rot.apply(p)
}

/// True when `p` is strictly inside the first quadrant in *both* frames,
/// i.e. both lower limits of integration stay at the origin side.
pub fn in_wedge(rot: &Rotation, p: Point) -> bool {
    p.in_open_quadrant() && rot.apply(p).in_open_quadrant()
}

/// x^e with real e: errors on negative base with non-integer exponent and
/// on zero base with negative exponent.
pub fn pow_real(base: f64, expo: f64) -> Result<f64> {
    let r = expo.round();
    let is_int = (expo - r).abs() <= EXP_MERGE_TOL;
    if base > 0.0 {
        return Ok(base.powf(expo));
    }
    if base == 0.0 {
        if expo > EXP_MERGE_TOL {
            return Ok(0.0);
        }
        if is_int && r == 0.0 {
            return Ok(1.0);
        }
        return Err(Error::Domain(format!(
            "0 raised to non-positive exponent {expo}"
        )));
    }
    if is_int {
        Ok(base.powi(r as i32))
    } else {
        Err(Error::Domain(format!(
            "negative base {base} with non-integer exponent {expo}"
        )))
    }
}

pub(crate) fn exp_is_nonneg_int(e: f64) -> bool {
    let r = e.round();
    (e - r).abs() <= EXP_MERGE_TOL && r >= -0.5
}

/// One monomial c * x^bx * y^by.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub bx: f64,
    pub by: f64,
}

impl PowerTerm {
    pub fn new(coeff: f64, bx: f64, by: f64) -> Self {
        PowerTerm { coeff, bx, by }
    }
}

/// Finite sum of real-exponent monomials, kept normalized: terms sorted by
/// (bx, by), exponents within `EXP_MERGE_TOL` merged, exact-zero
/// coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PowerSum {
    terms: Vec<PowerTerm>,
}

impl PowerSum {
    pub fn new(terms: Vec<PowerTerm>) -> Self {
        let mut s = PowerSum { terms };
        s.normalize();
        s
    }

    pub fn zero() -> Self {
        PowerSum::default()
    }

    pub fn constant(c: f64) -> Self {
        PowerSum::new(vec![PowerTerm::new(c, 0.0, 0.0)])
    }

    pub fn monomial(coeff: f64, bx: f64, by: f64) -> Self {
        PowerSum::new(vec![PowerTerm::new(coeff, bx, by)])
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    fn normalize(&mut self) {
        self.terms.retain(|t| t.coeff != 0.0);
        // Cluster on bx first (exponents produced by different operator
        // orderings can differ by a few ulps), canonicalize each cluster
        // to its first bx, then sort and merge within the cluster on by.
        self.terms.sort_by(|a, b| a.bx.total_cmp(&b.bx));
        let mut out: Vec<PowerTerm> = Vec::with_capacity(self.terms.len());
        let terms = std::mem::take(&mut self.terms);
        let mut i = 0;
        while i < terms.len() {
            let bx = terms[i].bx;
            let mut j = i;
            while j < terms.len() && (terms[j].bx - bx).abs() <= EXP_MERGE_TOL {
                j += 1;
            }
            let mut cluster: Vec<PowerTerm> = terms[i..j]
                .iter()
                .map(|t| PowerTerm::new(t.coeff, bx, t.by))
                .collect();
            cluster.sort_by(|a, b| a.by.total_cmp(&b.by));
            for t in cluster {
                if let Some(last) = out.last_mut() {
                    if last.bx == t.bx && (last.by - t.by).abs() <= EXP_MERGE_TOL {
                        last.coeff += t.coeff;
                        continue;
                    }
                }
                out.push(t);
            }
            i = j;
        }
        out.retain(|t| t.coeff != 0.0);
        self.terms = out;
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += t.coeff * pow_real(p.x, t.bx)? * pow_real(p.y, t.by)?;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &PowerSum) -> PowerSum {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        PowerSum::new(terms)
    }

    pub fn sub(&self, other: &PowerSum) -> PowerSum {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> PowerSum {
        PowerSum::new(
            self.terms
                .iter()
                .map(|t| PowerTerm::new(c * t.coeff, t.bx, t.by))
                .collect(),
        )
    }

    pub fn mul(&self, other: &PowerSum) -> PowerSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(PowerTerm::new(a.coeff * b.coeff, a.bx + b.bx, a.by + b.by));
            }
        }
        PowerSum::new(terms)
    }

    /// n-th integer partial derivative along `axis`.
    pub fn partial(&self, axis: Axis, n: usize) -> PowerSum {
        let mut terms = self.terms.clone();
        for _ in 0..n {
            let mut next = Vec::with_capacity(terms.len());
            for t in terms {
                let b = match axis {
                    Axis::X => t.bx,
                    Axis::Y => t.by,
                };
                if b.abs() <= EXP_MERGE_TOL {
                    continue;
                }
                match axis {
                    Axis::X => next.push(PowerTerm::new(t.coeff * b, t.bx - 1.0, t.by)),
                    Axis::Y => next.push(PowerTerm::new(t.coeff * b, t.bx, t.by - 1.0)),
                }
            }
            terms = next;
        }
        PowerSum::new(terms)
    }

    /// Mixed derivative d^{i+j} / dx^i dy^j.
    pub fn partial_xy(&self, i: usize, j: usize) -> PowerSum {
        self.partial(Axis::X, i).partial(Axis::Y, j)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.abs()))
    }

    /// Sup-norm of coefficient difference after aligning exponents.
    pub fn coeff_distance(&self, other: &PowerSum) -> f64 {
        self.sub(other).max_abs_coeff()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs_coeff() <= tol
    }

    /// All exponents non-negative integers (a genuine polynomial).
    pub fn is_polynomial(&self) -> bool {
        self.terms
            .iter()
            .all(|t| exp_is_nonneg_int(t.bx) && exp_is_nonneg_int(t.by))
    }

    /// Total degree, or None for the empty sum / non-polynomials.
    pub fn total_degree(&self) -> Option<f64> {
        self.terms
            .iter()
            .map(|t| t.bx + t.by)
            .fold(None, |m, d| Some(m.map_or(d, |m: f64| m.max(d))))
    }

    /// Substitute x -> a X + b Y, y -> c X + d Y and expand binomially.
    /// Requires all exponents to be non-negative integers.
    pub fn compose_linear(&self, a: f64, b: f64, c: f64, d: f64) -> Result<PowerSum> {
        if !self.is_polynomial() {
            return Err(Error::Domain(
                "linear substitution needs non-negative integer exponents".into(),
            ));
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            let i = t.bx.round() as usize;
            let j = t.by.round() as usize;
            for k in 0..=i {
                for l in 0..=j {
                    let coeff = t.coeff
                        * binom_f(i, k)
                        * binom_f(j, l)
                        * a.powi(k as i32)
                        * b.powi((i - k) as i32)
                        * c.powi(l as i32)
                        * d.powi((j - l) as i32);
                    terms.push(PowerTerm::new(coeff, (k + l) as f64, (i - k + j - l) as f64));
                }
            }
        }
        Ok(PowerSum::new(terms))
    }

    /// Parse `"c,bx,by; c,bx,by; ..."` (newlines also separate terms,
    /// `#` starts a comment).
    pub fn parse(input: &str) -> Result<PowerSum> {
        let mut terms = Vec::new();
        for raw in input.split(|c| c == ';' || c == '\n') {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!(
                    "power term `{line}` must have 3 comma-separated fields"
                )));
            }
            let nums: Result<Vec<f64>> = parts
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number `{s}` in term `{line}`")))
                })
                .collect();
            let nums = nums?;
            terms.push(PowerTerm::new(nums[0], nums[1], nums[2]));
        }
        if terms.is_empty() {
            return Err(Error::Parse("no power terms found".into()));
        }
        Ok(PowerSum::new(terms))
    }
}

impl fmt::Display for PowerSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{}*x^{}*y^{}", t.coeff, t.bx, t.by))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub(crate) fn binom_f(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// n-th derivative of a 1D function by central differences (binomial
/// stencil with half-step offsets); falls back to a one-sided forward
/// stencil when a node leaves the function's domain.
pub(crate) fn fd_derivative(g: &dyn Fn(f64) -> Result<f64>, x: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return g(x);
    }
    let h = x.abs().max(1.0) * f64::EPSILON.powf(1.0 / (n as f64 + 2.0));
    let central = || -> Result<f64> {
        let mut acc = 0.0;
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let off = (n as f64 / 2.0 - k as f64) * h;
            acc += sign * binom_f(n, k) * g(x + off)?;
        }
        Ok(acc / h.powi(n as i32))
    };
    match central() {
        Ok(v) => Ok(v),
        Err(Error::Domain(_)) => {
            let mut acc = 0.0;
            for k in 0..=n {
                let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom_f(n, k) * g(x + k as f64 * h)?;
            }
            Ok(acc / h.powi(n as i32))
        }
        Err(e) => Err(e),
    }
}

type EvalFn = dyn Fn(f64, f64) -> Result<f64> + Send + Sync;
type PartialFn = dyn Fn(usize, usize, f64, f64) -> Result<f64> + Send + Sync;
type TraceFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// A scalar field on the open first quadrant. Analytic partials and
/// boundary traces are attached when known; otherwise finite differences
/// and direct boundary evaluation are used.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<EvalFn>,
    partial: Option<Arc<PartialFn>>,
    trace_x: Option<Arc<TraceFn>>,
    trace_y: Option<Arc<TraceFn>>,
    /// Exact symbolic representation, when the field has one; closed-form
    /// operator paths use it instead of quadrature.
    power_sum: Option<PowerSum>,
    name: String,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("analytic_partials", &self.partial.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        ScalarField {
            eval: Arc::new(f),
            partial: None,
            trace_x: None,
            trace_y: None,
            power_sum: None,
            name: name.into(),
        }
    }

    pub fn with_partials<F>(mut self, pf: F) -> Self
    where
        F: Fn(usize, usize, f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.partial = Some(Arc::new(pf));
        self
    }

    pub fn with_trace_x<F>(mut self, tf: F) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.trace_x = Some(Arc::new(tf));
        self
    }

    pub fn with_trace_y<F>(mut self, tf: F) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.trace_y = Some(Arc::new(tf));
        self
    }

    pub fn from_power_sum(ps: PowerSum) -> Self {
        let name = format!("powersum[{ps}]");
        let p_eval = ps.clone();
        let p_partial = ps.clone();
        let p_tx = ps.clone();
        let p_ty = ps.clone();
        let mut f = ScalarField::new(name, move |x, y| p_eval.eval(Point::new(x, y)))
            .with_partials(move |i, j, x, y| p_partial.partial_xy(i, j).eval(Point::new(x, y)))
            .with_trace_x(move |y| p_tx.eval(Point::new(0.0, y)))
            .with_trace_y(move |x| p_ty.eval(Point::new(x, 0.0)));
        f.power_sum = Some(ps);
        f
    }

    pub fn power_sum(&self) -> Option<&PowerSum> {
        self.power_sum.as_ref()
    }

    pub fn constant(c: f64) -> Self {
        let mut f = ScalarField::from_power_sum(PowerSum::constant(c));
        f.name = format!("const{c}");
        f
    }

    /// x^2 + y^2
    pub fn r2() -> Self {
        let mut f = ScalarField::from_power_sum(PowerSum::new(vec![
            PowerTerm::new(1.0, 2.0, 0.0),
            PowerTerm::new(1.0, 0.0, 2.0),
        ]));
        f.name = "r2".into();
        f
    }

    /// (x^2 + y^2)^2
    pub fn r4() -> Self {
        let mut f = ScalarField::from_power_sum(PowerSum::new(vec![
            PowerTerm::new(1.0, 4.0, 0.0),
            PowerTerm::new(2.0, 2.0, 2.0),
            PowerTerm::new(1.0, 0.0, 4.0),
        ]));
        f.name = "r4".into();
        f
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partial.is_some()
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        (self.eval)(p.x, p.y)
    }

    /// d^{i+j} f / dx^i dy^j at `p`.
    pub fn partial(&self, i: usize, j: usize, p: Point) -> Result<f64> {
        if i == 0 && j == 0 {
            return self.eval(p);
        }
        if let Some(pf) = &self.partial {
            return pf(i, j, p.x, p.y);
        }
        let this = self.clone();
        let y = p.y;
        fd_derivative(
            &move |u| {
                let inner = this.clone();
                fd_derivative(&move |v| inner.eval(Point::new(u, v)), y, j)
            },
            p.x,
            i,
        )
    }

    /// f(0, y): the x = 0 boundary trace.
    pub fn trace_x(&self, y: f64) -> Result<f64> {
        match &self.trace_x {
            Some(tf) => tf(y),
            None => self.eval(Point::new(0.0, y)),
        }
    }

    /// f(x, 0): the y = 0 boundary trace.
    pub fn trace_y(&self, x: f64) -> Result<f64> {
        match &self.trace_y {
            Some(tf) => tf(x),
            None => self.eval(Point::new(x, 0.0)),
        }
    }

    /// The field d^{i+j} f / dx^i dy^j as a field in its own right.
    pub fn partial_field(&self, i: usize, j: usize) -> ScalarField {
        let name = format!("d{i}x_d{j}y({})", self.name);
        let base = self.clone();
        let base2 = self.clone();
        let base3 = self.clone();
        let base4 = self.clone();
        let mut f = ScalarField::new(name, move |x, y| base.partial(i, j, Point::new(x, y)))
            .with_partials(move |a, b, x, y| base2.partial(i + a, j + b, Point::new(x, y)))
            .with_trace_x(move |y| base3.partial(i, j, Point::new(0.0, y)))
            .with_trace_y(move |x| base4.partial(i, j, Point::new(x, 0.0)));
        f.power_sum = self.power_sum.as_ref().map(|ps| ps.partial_xy(i, j));
        f
    }

    /// The field (coordinate along `axis`) * f, partials by the product rule.
    pub fn times_coord(&self, axis: Axis) -> ScalarField {
        let name = format!("{axis}*({})", self.name);
        let base = self.clone();
        let base2 = self.clone();
        let base3 = self.clone();
        let base4 = self.clone();
        let f = ScalarField::new(name, move |x, y| {
            Ok(axis.coord(Point::new(x, y)) * base.eval(Point::new(x, y))?)
        });
        let f = f.with_partials(move |i, j, x, y| {
            let p = Point::new(x, y);
            let lead = axis.coord(p) * base2.partial(i, j, p)?;
            let k = match axis {
                Axis::X => i,
                Axis::Y => j,
            };
            if k == 0 {
                Ok(lead)
            } else {
                let lower = match axis {
                    Axis::X => base2.partial(i - 1, j, p)?,
                    Axis::Y => base2.partial(i, j - 1, p)?,
                };
                Ok(lead + k as f64 * lower)
            }
        });
        let mut f = match axis {
            Axis::X => f
                .with_trace_x(|_| Ok(0.0))
                .with_trace_y(move |x| Ok(x * base3.trace_y(x)?)),
            Axis::Y => f
                .with_trace_x(move |y| Ok(y * base4.trace_x(y)?))
                .with_trace_y(|_| Ok(0.0)),
        };
        f.power_sum = self.power_sum.as_ref().map(|ps| {
            let coord = match axis {
                Axis::X => PowerSum::monomial(1.0, 1.0, 0.0),
                Axis::Y => PowerSum::monomial(1.0, 0.0, 1.0),
            };
            ps.mul(&coord)
        });
        f
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        let name = format!("{c}*({})", self.name);
        let base = self.clone();
        let base2 = self.clone();
        let base3 = self.clone();
        let base4 = self.clone();
        let mut f = ScalarField::new(name, move |x, y| Ok(c * base.eval(Point::new(x, y))?))
            .with_partials(move |i, j, x, y| Ok(c * base2.partial(i, j, Point::new(x, y))?))
            .with_trace_x(move |y| Ok(c * base3.trace_x(y)?))
            .with_trace_y(move |x| Ok(c * base4.trace_y(x)?));
        f.power_sum = self.power_sum.as_ref().map(|ps| ps.scale(c));
        f
    }
}

/// The pulled-back field f' = f ∘ R^{-1}: the same physical field expressed
/// in the rotated coordinates. Partials transport through the chain rule
/// d/dx' = c d/dx + s d/dy, d/dy' = -s d/dx + c d/dy.
pub fn pullback(f: &ScalarField, rot: &Rotation) -> ScalarField {
    let name = format!("pullback({}, phi={})", f.name, rot.phi());
    let r = *rot;
    let base = f.clone();
    let base2 = f.clone();
    let base3 = f.clone();
    let base4 = f.clone();
    let mut g = ScalarField::new(name, move |x, y| {
        base.eval(r.inverse_apply(Point::new(x, y)))
    })
    .with_partials(move |i, j, x, y| {
        let q = r.inverse_apply(Point::new(x, y));
        let (c, s) = (r.cos(), r.sin());
        let mut acc = 0.0;
        for a in 0..=i {
            for b in 0..=j {
                let w = binom_f(i, a)
                    * binom_f(j, b)
                    * c.powi(a as i32)
                    * s.powi((i - a) as i32)
                    * (-s).powi(b as i32)
                    * c.powi((j - b) as i32);
                if w == 0.0 {
                    continue;
                }
                acc += w * base2.partial(a + b, (i - a) + (j - b), q)?;
            }
        }
        Ok(acc)
    })
    .with_trace_x(move |y| base3.eval(r.inverse_apply(Point::new(0.0, y))))
    .with_trace_y(move |x| base4.eval(r.inverse_apply(Point::new(x, 0.0))));
    // polynomial fields rotate exactly: f(R^{-1}(X,Y)) expands binomially
    g.power_sum = f.power_sum().and_then(|ps| {
        ps.compose_linear(rot.cos(), -rot.sin(), rot.sin(), rot.cos())
            .ok()
    });
    g
}
