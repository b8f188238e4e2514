//! Entry points that pick an algorithm for each argument.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::connection::{eval_near_a, eval_near_infinity, eval_near_one, ConnectionCache};
use crate::continuation::{basic, eval_along_path, hs_at_origin, Path};
use crate::error::{HeunError, Result};
use crate::geometry::{classify, PointClass, Singularity};
use crate::params::{canonical, EvalResult, FunctionKind, HeunParams, Settings};
use crate::series::{hl_series, hs_series};

/// Algorithm that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// The value at the origin.
    Origin,
    /// Series at the origin.
    Series,
    /// Continuation along the default path.
    Basic,
    /// Upper-side limit on a branch cut.
    OnCut,
    NearOne { cached: bool },
    NearA { cached: bool },
    NearInfinity { sector: usize, cached: bool },
    /// Continuation along a caller-supplied path.
    Path,
}

impl Route {
    pub fn name(&self) -> String {
        let cached = |base: &str, cached: bool| {
            if cached {
                format!("{base}_cached")
            } else {
                base.to_string()
            }
        };
        match *self {
            Route::Origin => "origin".into(),
            Route::Series => "series".into(),
            Route::Basic => "basic".into(),
            Route::OnCut => "on_cut".into(),
            Route::NearOne { cached: c } => cached("near_one", c),
            Route::NearA { cached: c } => cached("near_a", c),
            Route::NearInfinity { sector, cached: c } => cached(&format!("near_inf_{sector}"), c),
            Route::Path => "path".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub result: EvalResult,
    pub route: Route,
}

/// Settings plus the connection coefficients computed so far.
#[derive(Debug, Default)]
pub struct Evaluator {
    settings: Settings,
    cache: ConnectionCache,
}

impl Evaluator {
    pub fn new(settings: Settings) -> Self {
        Evaluator {
            settings,
            cache: ConnectionCache::new(),
        }
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    /// Changing the settings drops every cached coefficient.
    pub fn set_settings(&mut self, settings: Settings) {
        if settings != self.settings {
            self.cache.clear();
        }
        self.settings = settings;
    }

    pub fn cache(&self) -> &ConnectionCache {
        &self.cache
    }

    pub fn classify(&self, p: &HeunParams, kind: FunctionKind, z: Complex64) -> PointClass {
        classify(p, kind, z, &self.cache)
    }

    pub fn evaluate(&self, p: &HeunParams, kind: FunctionKind, z: Complex64) -> Result<Evaluation> {
        let z = canonical(z);
        let s = &self.settings;
        let (result, route) = match self.classify(p, kind, z) {
            PointClass::Singular(Singularity::Zero) => {
                let r = match kind {
                    FunctionKind::HeunL => hl_series(p, z, 0.0, s)?,
                    FunctionKind::HeunS => hs_at_origin(p)?,
                };
                (r, Route::Origin)
            }
            PointClass::Singular(_) => return Err(HeunError::SingularPoint { z }),
            PointClass::OnCut(_) => (basic(p, kind, z, s)?, Route::OnCut),
            PointClass::NearOne { cached } => (
                eval_near_one(p, kind, z, &self.cache, s)?,
                Route::NearOne { cached },
            ),
            PointClass::NearA { cached } => (
                eval_near_a(p, kind, z, &self.cache, s)?,
                Route::NearA { cached },
            ),
            PointClass::NearInfinity { sector, cached, .. } => (
                eval_near_infinity(p, kind, z, &self.cache, s)?,
                Route::NearInfinity { sector, cached },
            ),
            PointClass::Regular if z.norm() <= s.kappa * p.r0() => {
                let r = match kind {
                    FunctionKind::HeunL => hl_series(p, z, z.arg(), s)?,
                    FunctionKind::HeunS => hs_series(p, z, z.arg(), s)?,
                };
                (r, Route::Series)
            }
            PointClass::Regular => (basic(p, kind, z, s)?, Route::Basic),
        };
        Ok(Evaluation { result, route })
    }

    pub fn heunl(&self, p: &HeunParams, z: Complex64) -> Result<EvalResult> {
        self.evaluate(p, FunctionKind::HeunL, z).map(|e| e.result)
    }

    pub fn heuns(&self, p: &HeunParams, z: Complex64) -> Result<EvalResult> {
        self.evaluate(p, FunctionKind::HeunS, z).map(|e| e.result)
    }

    pub fn heunl_multivalued(&self, p: &HeunParams, path: &Path) -> Result<EvalResult> {
        eval_along_path(p, FunctionKind::HeunL, path, &self.settings)
    }

    pub fn heuns_multivalued(&self, p: &HeunParams, path: &Path) -> Result<EvalResult> {
        eval_along_path(p, FunctionKind::HeunS, path, &self.settings)
    }
}

fn shared() -> &'static Evaluator {
    static SHARED: OnceLock<Evaluator> = OnceLock::new();
    SHARED.get_or_init(Evaluator::default)
}

/// HeunL with default settings and a process-wide coefficient cache.
pub fn heunl(p: &HeunParams, z: Complex64) -> Result<EvalResult> {
    shared().heunl(p, z)
}

/// HeunS with default settings and a process-wide coefficient cache.
pub fn heuns(p: &HeunParams, z: Complex64) -> Result<EvalResult> {
    shared().heuns(p, z)
}

pub fn heunl_multivalued(p: &HeunParams, path: &Path) -> Result<EvalResult> {
    shared().heunl_multivalued(p, path)
}

pub fn heuns_multivalued(p: &HeunParams, path: &Path) -> Result<EvalResult> {
    shared().heuns_multivalued(p, path)
}
