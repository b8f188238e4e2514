//! Error indicators for truncated series and the shared termination rule.

use num_complex::Complex64;

use crate::error::{HeunError, Result};
use crate::params::{HeunParams, MACHINE_EPSILON};

/// Below this value of `|q - αβz|` the equation-based indicator loses too
/// many digits and the series-tail indicator is used instead.
pub const APEX_THRESHOLD: f64 = 0.01;

/// `|Ĥ(z) - f|`, where `Ĥ` is the value the equation itself implies from
/// `f'` and `f''`:
///
/// ```text
/// Ĥ = { z(z-1)(z-a) f'' + [γ(z-1)(z-a) + δz(z-a) + εz(z-1)] f' } / (q - αβz)
/// ```
pub fn residual_indicator(
    p: &HeunParams,
    z: Complex64,
    f: Complex64,
    df: Complex64,
    ddf: Complex64,
) -> Result<f64> {
    let apex = p.q - p.alpha * p.beta * z;
    if apex.norm() < APEX_THRESHOLD {
        return Err(HeunError::NearApexLoss);
    }
    let zm1 = z - 1.0;
    let zma = z - p.a;
    let second = if z == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        z * zm1 * zma * ddf
    };
    let first = (p.gamma * zm1 * zma + p.delta * z * zma + p.epsilon * z * zm1) * df;
    let implied = (second + first) / apex;
    Ok((implied - f).norm())
}

/// `√N |t_N| + ε N |S_N|` for the last term `t_N` and partial sum `S_N`.
pub fn series_tail_indicator(n_terms: usize, last_term: f64, partial_sum: f64) -> f64 {
    let n = n_terms as f64;
    n.sqrt() * last_term + MACHINE_EPSILON * n * partial_sum
}

/// Picks the equation-based indicator away from the apex point and the
/// tail indicator near it. `n` is the index of the last term used.
pub(crate) fn error_indicator(
    p: &HeunParams,
    z: Complex64,
    f: Complex64,
    df: Complex64,
    ddf: Complex64,
    n: usize,
    last_term: f64,
) -> f64 {
    match residual_indicator(p, z, f, df, ddf) {
        Ok(r) if r.is_finite() => r,
        _ => series_tail_indicator(n.max(1), last_term, f.norm()),
    }
}

/// Stops a summation once the derivative partial sum no longer changes in
/// floating point and the last term is below machine epsilon.
///
/// The condition has to hold for `window` consecutive indices, the order of
/// the recurrence: an isolated zero coefficient (e.g. `q = 0` makes `b_1`
/// vanish) must not end the series early.
pub(crate) struct Termination {
    window: usize,
    quiet: usize,
    last: Complex64,
}

impl Termination {
    pub(crate) fn new(window: usize, start: Complex64) -> Self {
        Termination {
            window,
            quiet: 0,
            last: start,
        }
    }

    pub(crate) fn update(&mut self, derivative_sum: Complex64, term_magnitude: f64) -> bool {
        let same = derivative_sum.re.to_bits() == self.last.re.to_bits()
            && derivative_sum.im.to_bits() == self.last.im.to_bits();
        self.last = derivative_sum;
        if same && term_magnitude < MACHINE_EPSILON {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= self.window
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn closed_form_params() -> HeunParams {
        HeunParams::real(4.0, 2.25, 1.5, 1.5, 0.5, 2.0).unwrap()
    }

    // h(z) = 2/(sqrt(4-z)(1-z)) and its first two derivatives
    fn h_triple(z: Complex64) -> (Complex64, Complex64, Complex64) {
        let s = (4.0 - z).sqrt();
        let h = 2.0 / (s * (1.0 - z));
        let g = 0.5 / (4.0 - z) + 1.0 / (1.0 - z);
        let gp = 0.5 / ((4.0 - z) * (4.0 - z)) + 1.0 / ((1.0 - z) * (1.0 - z));
        let hp = h * g;
        let hpp = hp * g + h * gp;
        (h, hp, hpp)
    }

    #[test]
    fn closed_form_has_negligible_residual() {
        let p = closed_form_params();
        let z = c(0.5, 0.0);
        let (f, df, ddf) = h_triple(z);
        assert!(residual_indicator(&p, z, f, df, ddf).unwrap() <= 1e-13);
        let z = c(-3.0, 2.5);
        let (f, df, ddf) = h_triple(z);
        assert!(residual_indicator(&p, z, f, df, ddf).unwrap() <= 1e-13);
    }

    #[test]
    fn near_apex_is_rejected() {
        let p = closed_form_params();
        // q - αβz = 0.005 at z = (2.25 - 0.005)/2.25
        let z = c((2.25 - 0.005) / 2.25, 0.0);
        assert_eq!(
            residual_indicator(&p, z, c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            Err(HeunError::NearApexLoss)
        );
    }

    #[test]
    fn tail_indicator_values() {
        assert_eq!(series_tail_indicator(1, 0.0, 0.0), 0.0);
        let v = series_tail_indicator(100, 1e-16, 1.0);
        assert!((v - (1e-15 + 100.0 * MACHINE_EPSILON)).abs() < 1e-30);
        assert!((v - 2.32e-14).abs() < 1e-16);
        let v = series_tail_indicator(4, 1e-17, 10.0);
        assert!((v - (2e-17 + 40.0 * MACHINE_EPSILON)).abs() < 1e-30);
    }

    #[test]
    fn isolated_zero_term_does_not_terminate() {
        let mut t = Termination::new(2, c(1.0, 0.0));
        assert!(!t.update(c(1.0, 0.0), 0.0));
        assert!(!t.update(c(1.5, 0.0), 0.1));
        assert!(!t.update(c(1.5, 0.0), 0.0));
        assert!(t.update(c(1.5, 0.0), 0.0));
    }

    proptest! {
        #[test]
        fn tail_indicator_is_monotone(
            n in 1usize..10_000, dn in 0usize..100,
            t in 0.0f64..1.0, dt in 0.0f64..1.0,
            s in 0.0f64..1e3, ds in 0.0f64..1e3,
        ) {
            let base = series_tail_indicator(n, t, s);
            prop_assert!(series_tail_indicator(n + dn, t, s) >= base);
            prop_assert!(series_tail_indicator(n, t + dt, s) >= base);
            prop_assert!(series_tail_indicator(n, t, s + ds) >= base);
        }

        #[test]
        fn exact_solution_data_gives_roundoff_residual(
            ar in 0.5f64..3.0, ai in -1.0f64..1.0,
            qr in -2.0f64..2.0, qi in -2.0f64..2.0,
            al in -2.0f64..2.0, be in -2.0f64..2.0,
            ga in -2.0f64..2.0, de in -2.0f64..2.0,
            zr in 0.0f64..1.0, theta in -3.1f64..3.1,
            fr in -1.0f64..1.0, fi in -1.0f64..1.0,
            dr in -1.0f64..1.0, di in -1.0f64..1.0,
        ) {
            let p = HeunParams::new(c(ar, ai), c(qr, qi), c(al, 0.3), c(be, -0.2), c(ga, 0.1), c(de, 0.4)).unwrap();
            // far from the finite singular points and the apex
            let radius = 2.0 * p.r_inf() * (1.0 + 4.0 * zr);
            let z = Complex64::from_polar(radius, theta);
            let apex = p.q - p.alpha * p.beta * z;
            prop_assume!(apex.norm() >= 1.0);
            let f = c(fr, fi);
            let df = c(dr, di);
            let zm1 = z - 1.0;
            let zma = z - p.a;
            let lin = p.gamma * zm1 * zma + p.delta * z * zma + p.epsilon * z * zm1;
            let ddf = -(lin * df + (p.alpha * p.beta * z - p.q) * f) / (z * zm1 * zma);
            let r = residual_indicator(&p, z, f, df, ddf).unwrap();
            let bound = 64.0 * MACHINE_EPSILON * (f.norm() + (z * z * z * ddf).norm());
            prop_assert!(r <= bound, "r = {r:e}, bound = {bound:e}");
        }
    }
}
