//! Taylor expansion about an ordinary point `z0` from given `(H(z0), H'(z0))`.
//!
//! With `h = z - z0` and scaled terms `c_n h^n` the coefficients obey
//!
//! ```text
//! 𝒫_n c_n = 𝒬_n c_{n-1} + ℛ_n c_{n-2} + 𝒮_n c_{n-3},   n ≥ 2.
//! ```

use num_complex::Complex64;

use crate::error::{HeunError, Result};
use crate::estimate::{error_indicator, series_tail_indicator, Termination};
use crate::params::{EvalResult, HeunParams, Settings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourTermCoeffs {
    pub p: Complex64,
    pub q: Complex64,
    pub r: Complex64,
    pub s: Complex64,
}

pub fn four_term_coeffs(p: &HeunParams, z0: Complex64, n: usize) -> FourTermCoeffs {
    let nf = n as f64;
    let sum = p.gamma + p.delta + p.epsilon;
    let a = p.a;
    FourTermCoeffs {
        p: -nf * (nf - 1.0) * z0 * (z0 - 1.0) * (z0 - a),
        q: (nf - 1.0)
            * ((sum + 3.0 * (nf - 2.0)) * z0 * z0
                + ((a + 1.0) * (4.0 - 2.0 * nf - p.gamma) - p.epsilon - a * p.delta) * z0
                + a * (p.gamma + nf - 2.0)),
        r: ((nf - 2.0) * (2.0 * sum + 3.0 * (nf - 3.0)) + p.alpha * p.beta) * z0
            - p.q
            - (nf - 2.0) * ((a + 1.0) * (p.gamma + nf - 3.0) + p.epsilon + a * p.delta),
        s: (nf - 3.0) * (sum + nf - 4.0) + p.alpha * p.beta,
    }
}

/// Value and derivative at `z` of the solution with `H(z0) = h0`,
/// `H'(z0) = h0p`.
pub fn taylor_eval(
    p: &HeunParams,
    z0: Complex64,
    h0: Complex64,
    h0p: Complex64,
    z: Complex64,
    settings: &Settings,
) -> Result<EvalResult> {
    let radius = p.singular_distance(z0);
    let h = z - z0;
    if radius == 0.0 || !(h.norm() < radius) {
        return Err(HeunError::DomainError { z, radius });
    }
    let zero = Complex64::new(0.0, 0.0);
    if h == zero {
        let k = four_term_coeffs(p, z0, 2);
        let ddf = 2.0 * (k.q * h0p + k.r * h0) / k.p;
        let r = error_indicator(p, z, h0, h0p, ddf, 1, h0p.norm());
        return Ok(EvalResult {
            f: h0,
            df: h0p,
            r,
            n_terms: 1,
        });
    }

    let h2 = h * h;
    let h3 = h2 * h;
    let hinv = 1.0 / h;
    let (mut t3, mut t2, mut t1) = (zero, h0, h * h0p);
    let mut f = t2 + t1;
    let mut s1 = t1;
    let mut s2 = zero;
    let mut stop = Termination::new(3, s1 * hinv);
    for n in 2..=settings.max_terms {
        let k = four_term_coeffs(p, z0, n);
        let t = (h * k.q * t1 + h2 * k.r * t2 + h3 * k.s * t3) / k.p;
        let nf = n as f64;
        f += t;
        s1 += nf * t;
        s2 += nf * (nf - 1.0) * t;
        t3 = t2;
        t2 = t1;
        t1 = t;
        if stop.update(s1 * hinv, t.norm()) {
            let df = s1 * hinv;
            let ddf = s2 * hinv * hinv;
            let r = error_indicator(p, z, f, df, ddf, n, t.norm());
            return Ok(EvalResult {
                f,
                df,
                r,
                n_terms: n + 1,
            });
        }
    }
    Err(HeunError::NonConvergence {
        at: z,
        max_terms: settings.max_terms,
        n_terms: settings.max_terms + 1,
        r: series_tail_indicator(settings.max_terms, t1.norm(), f.norm()),
    })
}
