//! Weighted quadrature for integrals of the form
//!
//!   I = \int_0^x g(u) (x - u)^p du,   p > -1,
//!
//! where g may itself carry an algebraic singularity of unknown exponent
//! at u = 0. Two schemes:
//!
//! * tanh-sinh (double-exponential): handles endpoint singularities at
//!   *both* ends regardless of exponent; this is the default.
//! * Gauss-Jacobi with weight (1-t)^p: optimal when g is smooth on [0, x],
//!   only algebraically convergent when g is singular at 0.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

pub const DEFAULT_NODES: usize = 64;

/// Truncation point of the tanh-sinh sum in the s = (pi/2) sinh(kh)
/// variable. Endpoint distances decay like exp(-2s); 140 pushes the
/// truncated mass below f64 resolution even for exponents near -1.
const TS_SMAX: f64 = 140.0;

const GJ_EPS: f64 = 3e-14;
const GJ_MAXIT: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    TanhSinh,
    GaussJacobi,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes: DEFAULT_NODES,
            scheme: Scheme::TanhSinh,
        }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        QuadratureSpec {
            nodes,
            ..QuadratureSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 4 || self.nodes > 4096 {
            return Err(Error::Quadrature(format!(
                "node count {} outside [4, 4096]",
                self.nodes
            )));
        }
        Ok(())
    }
}

/// Per-node data for tanh-sinh on (-1, 1): distances to the endpoints,
/// (1-t)/2 and (1+t)/2, computed in a cancellation-free form, plus the
/// weight including the interval jacobian 1/2.
struct TsNode {
    dp: f64, // (1 - t)/2
    dm: f64, // (1 + t)/2
    w: f64,
}

static TS_CACHE: Lazy<RwLock<HashMap<usize, Arc<Vec<TsNode>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

#[allow(clippy::type_complexity)]
static GJ_CACHE: Lazy<RwLock<HashMap<(usize, u64), Arc<(Vec<f64>, Vec<f64>)>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn ts_nodes(nodes: usize) -> Arc<Vec<TsNode>> {
    if let Some(v) = TS_CACHE.read().unwrap().get(&nodes) {
        return v.clone();
    }
    let half = std::f64::consts::FRAC_PI_2;
    let k_max = (nodes / 2).max(2) as i64;
    let h = (2.0 * TS_SMAX / std::f64::consts::PI).asinh() / k_max as f64;
    let mut v = Vec::with_capacity(2 * k_max as usize + 1);
    for k in -k_max..=k_max {
        let kh = k as f64 * h;
        let s = half * kh.sinh();
        let dp = 1.0 / ((2.0 * s).exp() + 1.0);
        let dm = 1.0 / ((-2.0 * s).exp() + 1.0);
        let c = s.cosh();
        let w = h * half * kh.cosh() / (c * c) / 2.0;
        v.push(TsNode { dp, dm, w });
    }
    let v = Arc::new(v);
    TS_CACHE.write().unwrap().insert(nodes, v.clone());
    v
}

/// Gauss-Jacobi nodes/weights on [-1, 1] for weight (1-t)^alf (1+t)^bet,
/// Newton iteration on the recurrence (roots come out in descending order).
fn gaujac(n: usize, alf: f64, bet: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let nf = n as f64;
    let alfbet = alf + bet;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let ln_norm =
        ln_gamma(alf + nf)? + ln_gamma(bet + nf)? - ln_gamma(nf + 1.0)? - ln_gamma(nf + alfbet + 1.0)?;
    for i in 0..n {
        let mut z = match i {
            0 => {
                let an = alf / nf;
                let bn = bet / nf;
                let r1 = (1.0 + alf) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
                let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
                1.0 - r1 / r2
            }
            1 => {
                let r1 = (4.1 + alf) / ((1.0 + alf) * (1.0 + 0.156 * alf));
                let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * alf) / nf;
                let r3 = 1.0 + 0.012 * bet * (1.0 + 0.25 * alf.abs()) / nf;
                x[0] - (1.0 - x[0]) * r1 * r2 * r3
            }
            2 => {
                let r1 = (1.67 + 0.28 * alf) / (1.0 + 0.37 * alf);
                let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
                let r3 = 1.0 + 8.0 * bet / ((6.28 + bet) * nf * nf);
                x[1] - (x[0] - x[1]) * r1 * r2 * r3
            }
            _ if i == n - 2 => {
                let r1 = (1.0 + 0.235 * bet) / (0.766 + 0.119 * bet);
                let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
                let r3 = 1.0 / (1.0 + 20.0 * alf / ((7.5 + alf) * nf * nf));
                x[n - 3] + (x[n - 3] - x[n - 4]) * r1 * r2 * r3
            }
            _ if i == n - 1 => {
                let r1 = (1.0 + 0.37 * bet) / (1.67 + 0.28 * bet);
                let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
                let r3 = 1.0 / (1.0 + 8.0 * alf / ((6.28 + alf) * nf * nf));
                x[n - 2] + (x[n - 2] - x[n - 3]) * r1 * r2 * r3
            }
            _ => 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3],
        };
        let mut converged = false;
        let mut temp = 0.0;
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..GJ_MAXIT {
            temp = 2.0 + alfbet;
            let mut p1 = (alf - bet + temp * z) / 2.0;
            p2 = 1.0;
            for j in 2..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                temp = 2.0 * jf + alfbet;
                let a = 2.0 * jf * (jf + alfbet) * (temp - 2.0);
                let b = (temp - 1.0) * (alf * alf - bet * bet + temp * (temp - 2.0) * z);
                let c = 2.0 * (jf - 1.0 + alf) * (jf - 1.0 + bet) * temp;
                p1 = (b * p2 - c * p3) / a;
            }
            pp = (nf * (alf - bet - temp * z) * p1 + 2.0 * (nf + alf) * (nf + bet) * p2)
                / (temp * (1.0 - z * z));
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= GJ_EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Quadrature(format!(
                "Gauss-Jacobi Newton iteration failed to converge for node {i} (n = {n}, alpha = {alf})"
            )));
        }
        x[i] = z;
        w[i] = ln_norm.exp() * temp * 2f64.powf(alfbet) / (pp * p2);
    }
    Ok((x, w))
}

fn gj_rule(nodes: usize, p: f64) -> Result<Arc<(Vec<f64>, Vec<f64>)>> {
    if nodes < 8 {
        return Err(Error::Quadrature(
            "Gauss-Jacobi rule needs at least 8 nodes".into(),
        ));
    }
    let key = (nodes, p.to_bits());
    if let Some(v) = GJ_CACHE.read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let rule = Arc::new(gaujac(nodes, p, 0.0)?);
    GJ_CACHE.write().unwrap().insert(key, rule.clone());
    Ok(rule)
}

/// \int_0^x g(u) (x - u)^p du for x > 0, p > -1.
pub fn singular_upper_integral(
    spec: &QuadratureSpec,
    x: f64,
    p: f64,
    g: &dyn Fn(f64) -> Result<f64>,
) -> Result<f64> {
    spec.validate()?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "upper limit must be positive, got {x}"
        )));
    }
    if !(p > -1.0) {
        return Err(Error::Quadrature(format!(
            "singularity exponent {p} not integrable (need p > -1)"
        )));
    }
    match spec.scheme {
        Scheme::TanhSinh => {
            let rule = ts_nodes(spec.nodes);
            let mut acc = 0.0;
            for node in rule.iter() {
                let u = x * node.dm;
                let sing = (x * node.dp).powf(p);
                if sing == 0.0 {
                    continue;
                }
                let gv = g(u)?;
                let term = node.w * gv * sing;
                if term.is_finite() {
                    acc += term;
                }
            }
            let v = x * acc;
            if !v.is_finite() {
                return Err(Error::Quadrature(
                    "tanh-sinh sum is non-finite (divergent integrand?)".into(),
                ));
            }
            Ok(v)
        }
        Scheme::GaussJacobi => {
            let rule = gj_rule(spec.nodes, p)?;
            let (t, w) = (&rule.0, &rule.1);
            let mut acc = 0.0;
            for (&ti, &wi) in t.iter().zip(w.iter()) {
                let u = x * (1.0 + ti) / 2.0;
                acc += wi * g(u)?;
            }
            let v = (x / 2.0).powf(p + 1.0) * acc;
            if !v.is_finite() {
                return Err(Error::Quadrature(
                    "Gauss-Jacobi sum is non-finite (divergent integrand?)".into(),
                ));
            }
            Ok(v)
        }
    }
}
