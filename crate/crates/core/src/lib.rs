//! Numerical evaluation of the local Heun functions HeunL and HeunS, and
//! their first derivatives, anywhere in the complex plane.
//!
//! ```
//! use heun::{heunl, HeunParams};
//! use num_complex::Complex64;
//!
//! // Hl(4, 9/4; 3/2, 3/2, 1/2, 2; z) = 2/(sqrt(4-z)(1-z))
//! let p = HeunParams::real(4.0, 2.25, 1.5, 1.5, 0.5, 2.0).unwrap();
//! let r = heunl(&p, Complex64::new(-5.0, 0.0)).unwrap();
//! assert!((r.f.re - 1.0 / 9.0).abs() < 1e-14);
//! ```

pub mod api;
pub mod connection;
pub mod continuation;
pub mod error;
pub mod estimate;
pub mod geometry;
pub mod params;
pub mod series;
pub mod taylor;

pub use api::{heunl, heunl_multivalued, heuns, heuns_multivalued, Evaluation, Evaluator, Route};
pub use connection::{ConnectionCache, ConnectionCoefficients, ConnectionKey, Region, Site};
pub use continuation::{build_default_path, continue_segment, eval_along_path, hl_basic, hs_basic, Path};
pub use error::{HeunError, Result};
pub use estimate::{residual_indicator, series_tail_indicator};
pub use geometry::{classify, BranchCutSet, PointClass, SectorMap};
pub use params::{EvalResult, FunctionKind, HeunParams, Settings};
pub use series::{series_hl_at_zero, series_hs_at_zero};
pub use taylor::taylor_eval;
