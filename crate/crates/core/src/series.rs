//! Frobenius series of HeunL and HeunS about the origin.
//!
//! Terms are generated in the scaled form `t_n = b_n z^n`, which keeps the
//! recurrence well inside the floating-point range for any `|z| < R_0`:
//!
//! ```text
//! P_n t_n = z Q_n t_{n-1} + z^2 R_n t_{n-2}
//! ```
//!
//! For `γ ∈ {0, -1, ...}` HeunL carries a logarithmic part starting at
//! the power `1 - γ`; HeunS with `γ = 1` has the same structure starting at
//! the power 0. Both go through [`log_sums`].

use num_complex::Complex64;

use crate::error::{HeunError, Result};
use crate::estimate::{error_indicator, series_tail_indicator, Termination};
use crate::params::{EvalResult, HeunParams, Settings};

/// Coefficients of the three-term recurrence at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeTermCoeffs {
    pub p: Complex64,
    pub q: Complex64,
    pub r: Complex64,
}

/// Coupling of the logarithmic part into the regular part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoupling {
    pub s: Complex64,
    pub t: Complex64,
    pub u: Complex64,
}

pub fn recurrence_pqr(p: &HeunParams, n: usize) -> ThreeTermCoeffs {
    let nf = n as f64;
    ThreeTermCoeffs {
        p: p.a * nf * (p.gamma - 1.0 + nf),
        q: p.q
            + (nf - 1.0) * ((p.a + 1.0) * (p.gamma + nf - 2.0) + p.epsilon + p.a * p.delta),
        r: -(nf - 2.0 + p.alpha) * (nf - 2.0 + p.beta),
    }
}

pub fn log_coupling(p: &HeunParams, n: usize) -> LogCoupling {
    let nf = n as f64;
    LogCoupling {
        s: p.a * (1.0 - p.gamma - 2.0 * nf),
        t: p.epsilon + p.a * p.delta + (p.a + 1.0) * (p.gamma + 2.0 * nf - 3.0),
        u: 4.0 - 2.0 * nf - p.alpha - p.beta,
    }
}

/// HeunL and its derivative from the series at the origin.
pub fn series_hl_at_zero(p: &HeunParams, z: Complex64, settings: &Settings) -> Result<EvalResult> {
    hl_series(p, z, z.arg(), settings)
}

/// HeunS and its derivative from the series at the origin, principal branch.
pub fn series_hs_at_zero(p: &HeunParams, z: Complex64, settings: &Settings) -> Result<EvalResult> {
    hs_series(p, z, z.arg(), settings)
}

/// Partial sums returned by the series engines.
struct Sums {
    f: Complex64,
    df: Complex64,
    ddf: Complex64,
    /// index of the last term
    n: usize,
    last_term: f64,
}

fn check_domain(p: &HeunParams, z: Complex64) -> Result<()> {
    let radius = p.r0();
    if z.norm() >= radius || !z.re.is_finite() || !z.im.is_finite() {
        return Err(HeunError::DomainError { z, radius });
    }
    Ok(())
}

fn log_of(z: Complex64, arg: f64) -> Complex64 {
    Complex64::new(z.norm().ln(), arg)
}

/// `arg` selects the branch of `log z` for the logarithmic cases; it must be
/// congruent to `z.arg()` modulo 2π.
pub(crate) fn hl_series(
    p: &HeunParams,
    z: Complex64,
    arg: f64,
    settings: &Settings,
) -> Result<EvalResult> {
    check_domain(p, z)?;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let nsp = nonpositive_gamma_gap(p);

    if z == zero {
        // Hl(0) = 1; Hl'(0) = b_1 unless z log z dominates the derivative
        if nsp == Some(1) {
            return Ok(EvalResult {
                f: one,
                df: Complex64::new(f64::NAN, f64::NAN),
                r: f64::INFINITY,
                n_terms: 1,
            });
        }
        let c1 = recurrence_pqr(p, 1);
        let df = c1.q / c1.p;
        let r = error_indicator(p, zero, one, df, zero, 0, 0.0);
        return Ok(EvalResult {
            f: one,
            df,
            r,
            n_terms: 1,
        });
    }

    let sums = match nsp {
        None => regular_sums(p, z, settings.max_terms)?,
        Some(nsp) => {
            let start = |c1: Complex64, c2: Complex64| {
                // a·nsp·s_nsp = c_{nsp-1}[q - γ(ε+aδ-a-1)] - c_{nsp-2}[(1+γ)(2-δ-ε)+αβ]
                let k1 = p.q - p.gamma * (p.epsilon + p.a * p.delta - p.a - 1.0);
                let k2 = (1.0 + p.gamma) * (2.0 - p.delta - p.epsilon) + p.alpha * p.beta;
                (z * c1 * k1 - z * z * c2 * k2) / (p.a * nsp as f64)
            };
            log_sums(p, z, log_of(z, arg), nsp, start, settings.max_terms)?
        }
    };
    Ok(finish(p, z, sums))
}

pub(crate) fn hs_series(
    p: &HeunParams,
    z: Complex64,
    arg: f64,
    settings: &Settings,
) -> Result<EvalResult> {
    check_domain(p, z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(HeunError::DomainError { z, radius: p.r0() });
    }
    let log_z = log_of(z, arg);
    if p.gamma_is_one() {
        let start = |_: Complex64, _: Complex64| Complex64::new(1.0, 0.0);
        let sums = log_sums(p, z, log_z, 0, start, settings.max_terms)?;
        return Ok(finish(p, z, sums));
    }
    // HeunS = z^{1-γ} Hl(a, q-(γ-1)(ε+aδ), β-γ+1, α-γ+1, 2-γ, δ; z)
    let inner = hl_series(&p.second_solution_params(), z, arg, settings)?;
    let exponent = 1.0 - p.gamma;
    let prefactor = (exponent * log_z).exp();
    Ok(EvalResult {
        f: prefactor * inner.f,
        df: prefactor * (exponent * inner.f / z + inner.df),
        r: prefactor.norm() * inner.r,
        n_terms: inner.n_terms,
    })
}

/// `1 - γ` when `γ ∈ {0, -1, ...}`.
fn nonpositive_gamma_gap(p: &HeunParams) -> Option<usize> {
    if p.gamma_is_nonpositive_integer() {
        Some((1.0 - p.gamma.re) as usize)
    } else {
        None
    }
}

fn finish(p: &HeunParams, z: Complex64, s: Sums) -> EvalResult {
    let r = error_indicator(p, z, s.f, s.df, s.ddf, s.n, s.last_term);
    EvalResult {
        f: s.f,
        df: s.df,
        r,
        n_terms: s.n + 1,
    }
}

fn non_convergence(z: Complex64, max_terms: usize, last: f64, f: Complex64) -> HeunError {
    HeunError::NonConvergence {
        at: z,
        max_terms,
        n_terms: max_terms + 1,
        r: series_tail_indicator(max_terms, last, f.norm()),
    }
}

fn regular_sums(p: &HeunParams, z: Complex64, max_terms: usize) -> Result<Sums> {
    let z2 = z * z;
    let zinv = 1.0 / z;
    let mut t2 = Complex64::new(0.0, 0.0);
    let mut t1 = Complex64::new(1.0, 0.0);
    let mut f = t1;
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    let mut stop = Termination::new(2, s1);
    for n in 1..=max_terms {
        let k = recurrence_pqr(p, n);
        let t = (z * k.q * t1 + z2 * k.r * t2) / k.p;
        let nf = n as f64;
        f += t;
        s1 += nf * t;
        s2 += nf * (nf - 1.0) * t;
        t2 = t1;
        t1 = t;
        if stop.update(s1 * zinv, t.norm()) {
            return Ok(Sums {
                f,
                df: s1 * zinv,
                ddf: s2 * zinv * zinv,
                n,
                last_term: t.norm(),
            });
        }
    }
    Err(non_convergence(z, max_terms, t1.norm(), f))
}

/// Sums `Σ c_n z^n + log z Σ s_n z^n` where `s_n = 0` below `nsp`,
/// `c_nsp = 0`, `s_nsp` comes from `start(c̃_{nsp-1}, c̃_{nsp-2})` (scaled
/// terms) and both parts follow the coupled recurrences above `nsp`.
fn log_sums(
    p: &HeunParams,
    z: Complex64,
    log_z: Complex64,
    nsp: usize,
    start: impl Fn(Complex64, Complex64) -> Complex64,
    max_terms: usize,
) -> Result<Sums> {
    let zero = Complex64::new(0.0, 0.0);
    let z2 = z * z;
    let zinv = 1.0 / z;
    let log_norm = log_z.norm();

    let (mut c1, mut s1) = if nsp == 0 {
        (zero, start(zero, zero))
    } else {
        (Complex64::new(1.0, 0.0), zero)
    };
    let (mut c2, mut s2) = (zero, zero);
    // Σ c̃, Σ n c̃, Σ n(n-1) c̃ and the same for s̃
    let (mut c_sum0, mut c_sum1, mut c_sum2) = (c1, zero, zero);
    let (mut s_sum0, mut s_sum1, mut s_sum2) = (s1, zero, zero);
    let derivative = |c1: Complex64, s1: Complex64, s0: Complex64| (c1 + log_z * s1 + s0) * zinv;
    let mut stop = Termination::new(2, derivative(c_sum1, s_sum1, s_sum0));

    for n in 1..=max_terms {
        let k = recurrence_pqr(p, n);
        let (c, s) = if n < nsp {
            ((z * k.q * c1 + z2 * k.r * c2) / k.p, zero)
        } else if n == nsp {
            (zero, start(c1, c2))
        } else {
            let s = (z * k.q * s1 + z2 * k.r * s2) / k.p;
            let l = log_coupling(p, n);
            let c = (z * k.q * c1 + z2 * k.r * c2 + l.s * s + z * l.t * s1 + z2 * l.u * s2) / k.p;
            (c, s)
        };
        let nf = n as f64;
        c_sum0 += c;
        c_sum1 += nf * c;
        c_sum2 += nf * (nf - 1.0) * c;
        s_sum0 += s;
        s_sum1 += nf * s;
        s_sum2 += nf * (nf - 1.0) * s;
        c2 = c1;
        c1 = c;
        s2 = s1;
        s1 = s;

        let df = derivative(c_sum1, s_sum1, s_sum0);
        let magnitude = c.norm() + log_norm * s.norm();
        if stop.update(df, magnitude) && n > nsp + 1 {
            return Ok(Sums {
                f: c_sum0 + log_z * s_sum0,
                df,
                ddf: (c_sum2 + log_z * s_sum2 + 2.0 * s_sum1 - s_sum0) * zinv * zinv,
                n,
                last_term: magnitude,
            });
        }
    }
    Err(non_convergence(
        z,
        max_terms,
        c1.norm() + log_norm * s1.norm(),
        c_sum0 + log_z * s_sum0,
    ))
}
