//! Parameters of the Heun equation
//!
//! ```text
//! H'' + (γ/z + δ/(z-1) + ε/(z-a)) H' + (αβz - q)/(z(z-1)(z-a)) H = 0,
//! α + β + 1 = γ + δ + ε,
//! ```
//!
//! and the small value types shared by every evaluator.

use num_complex::Complex64;

use crate::error::{HeunError, Result};

/// Machine epsilon of binary64.
pub const MACHINE_EPSILON: f64 = f64::EPSILON;

/// Default continuation ratio between step length and distance to the
/// nearest singular point.
pub const DEFAULT_KAPPA: f64 = 0.5;

/// Default cap on the number of terms of a single power series.
pub const DEFAULT_MAX_TERMS: usize = 20_000;

/// Which local solution at `z = 0` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    /// The solution normalized to one at the origin.
    HeunL,
    /// The second Frobenius solution at the origin.
    HeunS,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::HeunL => "hl",
            FunctionKind::HeunS => "hs",
        }
    }
}

/// The tuple `(a, q, α, β, γ, δ, ε)`; `ε` is always derived from the
/// Fuchsian relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParams {
    pub a: Complex64,
    pub q: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
    pub epsilon: Complex64,
}

impl HeunParams {
    pub fn new(
        a: Complex64,
        q: Complex64,
        alpha: Complex64,
        beta: Complex64,
        gamma: Complex64,
        delta: Complex64,
    ) -> Result<Self> {
        let inputs = [a, q, alpha, beta, gamma, delta];
        if inputs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(HeunError::InvalidParams(
                "all parameters must be finite".into(),
            ));
        }
        if a == Complex64::new(0.0, 0.0) || a == Complex64::new(1.0, 0.0) {
            return Err(HeunError::InvalidParams(format!(
                "a = {a} coincides with a singular point (0 or 1)"
            )));
        }
        let epsilon = alpha + beta + 1.0 - gamma - delta;
        if !epsilon.re.is_finite() || !epsilon.im.is_finite() {
            return Err(HeunError::InvalidParams("epsilon overflows".into()));
        }
        Ok(HeunParams {
            a,
            q,
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
        })
    }

    /// Convenience constructor from real parameters.
    pub fn real(a: f64, q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::new(c(a), c(q), c(alpha), c(beta), c(gamma), c(delta))
    }

    /// Radius of convergence of the series at the origin, `min{1, |a|}`.
    pub fn r0(&self) -> f64 {
        self.a.norm().min(1.0)
    }

    /// `min{1, |a-1|}`, the size of the neighbourhood of `z = 1`.
    pub fn r_one(&self) -> f64 {
        (self.a - 1.0).norm().min(1.0)
    }

    /// `min{|a|, |1-a|}`, the size of the neighbourhood of `z = a`.
    pub fn r_a(&self) -> f64 {
        self.a.norm().min((1.0 - self.a).norm())
    }

    /// `max{1, |a|}`; the exterior of this circle is the vicinity of infinity.
    pub fn r_inf(&self) -> f64 {
        self.a.norm().max(1.0)
    }

    /// Distance from `z` to the nearest finite singular point.
    pub fn singular_distance(&self, z: Complex64) -> f64 {
        z.norm().min((z - 1.0).norm()).min((z - self.a).norm())
    }

    /// `γ ∈ {0, -1, -2, ...}`: the analytic solution at the origin needs a
    /// logarithmic companion.
    pub fn gamma_is_nonpositive_integer(&self) -> bool {
        is_nonpositive_integer(self.gamma)
    }

    pub fn gamma_is_one(&self) -> bool {
        self.gamma == Complex64::new(1.0, 0.0)
    }

    /// Whether the single-valued function of this kind is cut along
    /// `(-∞, 0)`.
    pub fn has_origin_cut(&self, kind: FunctionKind) -> bool {
        match kind {
            FunctionKind::HeunL => self.gamma_is_nonpositive_integer(),
            FunctionKind::HeunS => !self.gamma_is_nonpositive_integer(),
        }
    }

    /// Parameters of the HeunL factor in `HeunS = z^{1-γ} HeunL(...)`.
    pub fn second_solution_params(&self) -> HeunParams {
        let g1 = self.gamma - 1.0;
        HeunParams::new(
            self.a,
            self.q - g1 * (self.epsilon + self.a * self.delta),
            self.beta - g1,
            self.alpha - g1,
            2.0 - self.gamma,
            self.delta,
        )
        .expect("transform of valid parameters is valid")
    }

    /// Local problem at `z = 1`, in the variable `1 - z`.
    pub fn at_one(&self) -> HeunParams {
        HeunParams::new(
            1.0 - self.a,
            self.alpha * self.beta - self.q,
            self.alpha,
            self.beta,
            self.delta,
            self.gamma,
        )
        .expect("transform of valid parameters is valid")
    }

    /// Local problem at `z = a`, in the variable `(a - z)/a`.
    pub fn at_a(&self) -> HeunParams {
        HeunParams::new(
            (self.a - 1.0) / self.a,
            self.alpha * self.beta - self.q / self.a,
            self.alpha,
            self.beta,
            self.epsilon,
            self.gamma,
        )
        .expect("transform of valid parameters is valid")
    }

    /// Local problem at infinity, in the variable `1/z` after removing the
    /// factor `z^{-α}`.
    pub fn at_infinity(&self) -> HeunParams {
        let Self {
            a,
            q,
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
        } = *self;
        HeunParams::new(
            1.0 / a,
            (q + alpha * (delta - beta)) / a + alpha * (epsilon - beta),
            alpha,
            alpha - gamma + 1.0,
            alpha - beta + 1.0,
            delta,
        )
        .expect("transform of valid parameters is valid")
    }

    /// Bit patterns of the twelve real components of `(a, q, α, β, γ, δ)`.
    pub fn bits(&self) -> [u64; 12] {
        let v = [
            self.a, self.q, self.alpha, self.beta, self.gamma, self.delta,
        ];
        let mut out = [0u64; 12];
        for (i, c) in v.iter().enumerate() {
            out[2 * i] = c.re.to_bits();
            out[2 * i + 1] = c.im.to_bits();
        }
        out
    }
}

pub(crate) fn is_nonpositive_integer(x: Complex64) -> bool {
    x.im == 0.0 && x.re <= 0.0 && x.re.fract() == 0.0
}

/// Value, derivative, error indicator and number of series terms consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub f: Complex64,
    pub df: Complex64,
    pub r: f64,
    pub n_terms: usize,
}

/// Tunables shared by all evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub kappa: f64,
    pub max_terms: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            kappa: DEFAULT_KAPPA,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl Settings {
    pub fn new(kappa: f64, max_terms: usize) -> Result<Self> {
        if !(0.05..=0.9).contains(&kappa) {
            return Err(HeunError::InvalidParams(format!(
                "kappa = {kappa} outside [0.05, 0.9]"
            )));
        }
        if max_terms < 3 {
            return Err(HeunError::InvalidParams("max_terms must be at least 3".into()));
        }
        Ok(Settings { kappa, max_terms })
    }
}

/// Replaces a negative zero imaginary part by `+0` so that points on the
/// real axis take the upper-side branch of `arg`.
pub(crate) fn canonical(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}
