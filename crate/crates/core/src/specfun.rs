//! Gamma-function kernels used throughout the crate.
//!
//! Lanczos approximation (g = 7, 9 terms) with reflection for the left
//! half-line. The reciprocal-gamma convention matters a lot here: every
//! power-rule coefficient is of the form Gamma(b+1)/Gamma(b-a+1) and the
//! ratio is defined to be exactly zero whenever the denominator argument
//! sits on a pole of Gamma.

use crate::error::{Error, Result};

/// Arguments closer than this to a non-positive integer count as poles.
pub const POLE_TOL: f64 = 1e-12;

/// Gamma overflows f64 just above this argument.
pub const MAX_GAMMA_ARG: f64 = 170.624_376_956_302_7;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;
const LN_SQRT_TWO_PI: f64 = 0.918_938_533_204_672_74;

/// True when `z` is within `POLE_TOL` of a non-positive integer.
pub fn is_gamma_pole(z: f64) -> bool {
    z <= POLE_TOL && (z - z.round()).abs() <= POLE_TOL
}

/// sin(pi z) with exact argument reduction, so the sign is right even for
/// large |z| where naive `(PI * z).sin()` has lost every bit.
pub fn sin_pi(z: f64) -> f64 {
    let n = z.round();
    let r = z - n;
    let s = (std::f64::consts::PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

fn lanczos_sum(x: f64) -> f64 {
    // x >= 0.5, evaluated at shifted argument x-1
    let z = x - 1.0;
    let mut a = LANCZOS_P[0];
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        a += p / (z + i as f64);
    }
    a
}

fn gamma_positive(x: f64) -> f64 {
    // valid for x >= 0.5; the power is split in two so that t^{z+1/2}
    // does not overflow before the exp(-t) factor pulls it back down
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let half_pow = t.powf((z + 0.5) / 2.0);
    SQRT_TWO_PI * half_pow * (half_pow * (-t).exp()) * lanczos_sum(x)
}

/// Gamma(z). Errors at poles and where the result overflows f64.
pub fn gamma(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {z}")));
    }
    if is_gamma_pole(z) {
        return Err(Error::GammaPole { z });
    }
    if z > MAX_GAMMA_ARG {
        return Err(Error::GammaOverflow { z });
    }
    if z >= 0.5 {
        Ok(gamma_positive(z))
    } else {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let denom = sin_pi(z) * gamma_positive(1.0 - z);
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::GammaPole { z });
        }
        Ok(std::f64::consts::PI / denom)
    }
}

/// ln Gamma(z) for strictly positive z.
pub fn ln_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("ln_gamma needs z > 0, got {z}")));
    }
    if z < 0.5 {
        // small positive arguments never overflow, take the direct route
        return Ok(gamma_positive(z + 1.0).ln() - z.ln());
    }
    let zz = z - 1.0;
    let t = zz + LANCZOS_G + 0.5;
    Ok(LN_SQRT_TWO_PI + (zz + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// 1/Gamma(z), entire: returns exactly 0.0 at the poles of Gamma.
pub fn recip_gamma(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!(
            "recip_gamma of non-finite argument {z}"
        )));
    }
    if is_gamma_pole(z) {
        return Ok(0.0);
    }
    if z > MAX_GAMMA_ARG {
        // Gamma overflows but its reciprocal is a clean (sub)normal
        return Ok((-ln_gamma(z)?).exp());
    }
    Ok(1.0 / gamma(z)?)
}

/// Gamma(p)/Gamma(q) with the power-rule convention: zero when q is a pole,
/// an error when p is. Uses log space when both arguments are large so that
/// finite ratios of overflowing values still come out right.
pub fn gamma_ratio(p: f64, q: f64) -> Result<f64> {
    if is_gamma_pole(p) {
        return Err(Error::GammaPole { z: p });
    }
    if is_gamma_pole(q) {
        return Ok(0.0);
    }
    if p > 20.0 && q > 20.0 {
        return Ok((ln_gamma(p)? - ln_gamma(q)?).exp());
    }
    Ok(gamma(p)? / gamma(q)?)
}
