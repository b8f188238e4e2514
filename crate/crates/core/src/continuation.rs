//! Analytic continuation along polylines and the single-valued evaluators
//! built on the default path.

use num_complex::Complex64;

use crate::error::{HeunError, Result};
use crate::geometry::{segment_meets_ray, BranchCutSet, Cut};
use crate::params::{canonical, EvalResult, FunctionKind, HeunParams, Settings};
use crate::series::{hl_series, hs_series};
use crate::taylor::taylor_eval;

/// Relative floor on the step radius; below it the path is declared too
/// close to a singular point.
pub const PATH_FLOOR: f64 = 1e-12;

/// A polyline starting at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    waypoints: Vec<Complex64>,
}

fn segment_distance(from: Complex64, to: Complex64, point: Complex64) -> f64 {
    let d = to - from;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (point - from).norm();
    }
    let t = ((point - from) * d.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (from + d * t - point).norm()
}

impl Path {
    /// Validates a complete waypoint list; the first element must be 0.
    pub fn new(p: &HeunParams, waypoints: Vec<Complex64>) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let waypoints: Vec<Complex64> = waypoints.into_iter().map(canonical).collect();
        match waypoints.first() {
            Some(&w) if w == zero => {}
            _ => return Err(HeunError::InvalidPath("a path must start at 0".into())),
        }
        for (k, &w) in waypoints.iter().enumerate().skip(1) {
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(HeunError::InvalidPath(format!("waypoint {k} is not finite")));
            }
            if w == zero || w == one || w == p.a {
                return Err(HeunError::InvalidPath(format!(
                    "waypoint {k} = {w} is a singular point"
                )));
            }
        }
        for (k, pair) in waypoints.windows(2).enumerate() {
            let (from, to) = (pair[0], pair[1]);
            if segment_distance(from, to, one) == 0.0 || segment_distance(from, to, p.a) == 0.0 {
                return Err(HeunError::InvalidPath(format!(
                    "segment {k} passes through a singular point"
                )));
            }
            if k > 0 && segment_distance(from, to, zero) == 0.0 {
                return Err(HeunError::InvalidPath(format!(
                    "segment {k} passes through the origin"
                )));
            }
        }
        Ok(Path { waypoints })
    }

    /// Path through `points` with the leading origin implied.
    pub fn from_points(p: &HeunParams, points: &[Complex64]) -> Result<Self> {
        let mut waypoints = Vec::with_capacity(points.len() + 1);
        waypoints.push(Complex64::new(0.0, 0.0));
        waypoints.extend_from_slice(points);
        Self::new(p, waypoints)
    }

    /// The same path with one more waypoint.
    pub fn extended(&self, p: &HeunParams, z: Complex64) -> Result<Self> {
        let mut waypoints = self.waypoints.clone();
        waypoints.push(z);
        Self::new(p, waypoints)
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn end(&self) -> Complex64 {
        *self.waypoints.last().expect("paths are never empty")
    }

    /// Direction angle of every segment.
    pub fn directions(&self) -> Vec<f64> {
        self.waypoints
            .windows(2)
            .map(|w| (w[1] - w[0]).arg())
            .collect()
    }

    /// `arg z` at the end point, followed continuously from the direction of
    /// the first segment. Each straight segment off the origin changes the
    /// argument by exactly `Arg(w_{k+1}/w_k)`.
    pub fn final_arg(&self) -> f64 {
        if self.waypoints.len() < 2 {
            return 0.0;
        }
        let mut arg = self.waypoints[1].arg();
        for w in self.waypoints[1..].windows(2) {
            arg += canonical(w[1] / w[0]).arg();
        }
        arg
    }
}

/// Steps from `start = (z_p, f, f')` to `target` along a straight line with
/// step length `κ·R_p`. The returned `r` and `n_terms` count only the steps
/// taken here.
pub fn continue_segment(
    p: &HeunParams,
    start: (Complex64, Complex64, Complex64),
    target: Complex64,
    settings: &Settings,
) -> Result<EvalResult> {
    let (mut z, mut f, mut df) = start;
    let mut r = 0.0;
    let mut n_terms = 0;
    let direction = Complex64::from_polar(1.0, (target - z).arg());
    let floor = PATH_FLOOR * (1.0 + p.a.norm());
    while z != target {
        let radius = p.singular_distance(z);
        if radius < floor {
            return Err(HeunError::PathTooClose {
                at: z,
                radius,
                n_terms,
                r,
            });
        }
        let step = settings.kappa * radius;
        let next = if (target - z).norm() <= step {
            target
        } else {
            z + direction * step
        };
        let res = taylor_eval(p, z, f, df, next, settings).map_err(|e| e.accumulate(n_terms, r))?;
        r += res.r;
        n_terms += res.n_terms;
        f = res.f;
        df = res.df;
        z = next;
    }
    Ok(EvalResult { f, df, r, n_terms })
}

/// The straight path `[0, z]` with detours around 1 and `a` wherever it
/// passes closer than half their separation.
pub fn build_default_path(p: &HeunParams, z: Complex64) -> Result<Path> {
    let z = canonical(z);
    let one = Complex64::new(1.0, 0.0);
    if z == one || z == p.a {
        return Err(HeunError::SingularPoint { z });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Path::new(p, vec![z]);
    }
    if let Some(ray) = BranchCutSet::all(p).containing(z) {
        if ray.cut != Cut::Origin {
            return Err(HeunError::OnCut { z });
        }
    }
    let (zeta1, zeta2) = if p.a.norm() < 1.0 { (p.a, one) } else { (one, p.a) };
    let separation = (zeta1 - zeta2).norm();
    let mut waypoints = vec![Complex64::new(0.0, 0.0)];
    for zeta in [zeta1, zeta2] {
        let radius = zeta.norm().min(separation);
        let t = (zeta * z.conj()).re / z.norm_sqr();
        if !(t > 0.0 && t < 1.0) {
            continue;
        }
        let d = (zeta - z * t).norm();
        if d < 0.5 * radius {
            let side = if (z / zeta).im < 0.0 { -1.0 } else { 1.0 };
            let mut offset = (0.5 * radius).min((z - zeta).norm());
            let normal = Complex64::i() * Complex64::from_polar(side, z.arg());
            // keep to the side of the negative real axis where z lies
            let last = *waypoints.last().unwrap();
            let crosses = |w: Complex64| {
                let neg = Complex64::new(-1.0, 0.0);
                segment_meets_ray(last, w, Complex64::new(0.0, 0.0), neg)
                    && last != Complex64::new(0.0, 0.0)
                    || segment_meets_ray(w, z, Complex64::new(0.0, 0.0), neg)
            };
            if !crosses(last + (z - last) * 0.5) {
                for _ in 0..60 {
                    if !crosses(zeta + normal * offset) {
                        break;
                    }
                    offset *= 0.5;
                }
            }
            waypoints.push(zeta + normal * offset);
        }
    }
    waypoints.push(z);
    Path::new(p, waypoints)
}

/// HeunS at the origin: zero when `Re(1-γ) > 0`, unbounded otherwise.
pub(crate) fn hs_at_origin(p: &HeunParams) -> Result<EvalResult> {
    let z = Complex64::new(0.0, 0.0);
    let exponent = 1.0 - p.gamma;
    if exponent.re <= 0.0 {
        return Err(HeunError::SingularPoint { z });
    }
    let (df, r) = if p.gamma == z {
        (Complex64::new(1.0, 0.0), 0.0)
    } else if p.gamma.re < 0.0 {
        (z, 0.0)
    } else {
        (Complex64::new(f64::NAN, f64::NAN), f64::INFINITY)
    };
    Ok(EvalResult {
        f: z,
        df,
        r,
        n_terms: 1,
    })
}

/// Multi-valued evaluation: continues the local solution at the origin
/// along `path`.
pub fn eval_along_path(
    p: &HeunParams,
    kind: FunctionKind,
    path: &Path,
    settings: &Settings,
) -> Result<EvalResult> {
    let w = path.waypoints();
    if w.len() < 2 {
        return match kind {
            FunctionKind::HeunL => hl_series(p, w[0], 0.0, settings),
            FunctionKind::HeunS => hs_at_origin(p),
        };
    }
    let theta = w[1].arg();
    match kind {
        FunctionKind::HeunL => continue_from_origin(p, path, theta, settings, hl_series),
        FunctionKind::HeunS if p.gamma_is_one() => {
            continue_from_origin(p, path, theta, settings, hs_series)
        }
        FunctionKind::HeunS => {
            // z^{1-γ} Hl(transformed): continue the analytic factor, then apply
            // the power with the argument accumulated along the path
            let inner = continue_from_origin(
                &p.second_solution_params(),
                path,
                theta,
                settings,
                hl_series,
            )?;
            let z = path.end();
            let exponent = 1.0 - p.gamma;
            let log_z = Complex64::new(z.norm().ln(), path.final_arg());
            let prefactor = (exponent * log_z).exp();
            Ok(EvalResult {
                f: prefactor * inner.f,
                df: prefactor * (exponent * inner.f / z + inner.df),
                r: prefactor.norm() * inner.r,
                n_terms: inner.n_terms,
            })
        }
    }
}

type SeriesAtZero = fn(&HeunParams, Complex64, f64, &Settings) -> Result<EvalResult>;

fn continue_from_origin(
    p: &HeunParams,
    path: &Path,
    theta: f64,
    settings: &Settings,
    series: SeriesAtZero,
) -> Result<EvalResult> {
    let w = path.waypoints();
    let start_radius = settings.kappa * p.r0();
    let z1 = if w[1].norm() <= start_radius {
        w[1]
    } else {
        Complex64::from_polar(start_radius, theta)
    };
    let first = series(p, z1, theta, settings)?;
    let mut acc = first;
    let mut z = z1;
    for &target in &w[1..] {
        let step = continue_segment(p, (z, acc.f, acc.df), target, settings)
            .map_err(|e| e.accumulate(acc.n_terms, acc.r))?;
        acc = EvalResult {
            f: step.f,
            df: step.df,
            r: acc.r + step.r,
            n_terms: acc.n_terms + step.n_terms,
        };
        z = target;
    }
    Ok(acc)
}

/// Upper-side limit for points on a cut other than `(-∞, 0)`: approach along
/// the normal from a point off the cut.
fn upper_limit_path(p: &HeunParams, kind: FunctionKind, z: Complex64) -> Result<Option<Path>> {
    let cuts = BranchCutSet::new(p, kind);
    let ray = match cuts.containing(z) {
        Some(ray) if ray.cut != Cut::Origin => ray,
        _ => return Ok(None),
    };
    let h = 0.5 * p.singular_distance(z).min(cuts.distance_to_others(z));
    let w = z + ray.upper_normal() * h;
    let path = build_default_path(p, w)?.extended(p, z)?;
    Ok(Some(path))
}

pub(crate) fn basic(
    p: &HeunParams,
    kind: FunctionKind,
    z: Complex64,
    settings: &Settings,
) -> Result<EvalResult> {
    let z = canonical(z);
    if z == Complex64::new(1.0, 0.0) || z == p.a {
        return Err(HeunError::SingularPoint { z });
    }
    if z == Complex64::new(0.0, 0.0) {
        return match kind {
            FunctionKind::HeunL => hl_series(p, z, 0.0, settings),
            FunctionKind::HeunS => hs_at_origin(p),
        };
    }
    if let Some(path) = upper_limit_path(p, kind, z)? {
        return eval_along_path(p, kind, &path, settings);
    }
    if z.norm() <= settings.kappa * p.r0() {
        return match kind {
            FunctionKind::HeunL => hl_series(p, z, z.arg(), settings),
            FunctionKind::HeunS => hs_series(p, z, z.arg(), settings),
        };
    }
    eval_along_path(p, kind, &build_default_path(p, z)?, settings)
}

/// Single-valued HeunL over the default path.
pub fn hl_basic(p: &HeunParams, z: Complex64, settings: &Settings) -> Result<EvalResult> {
    basic(p, FunctionKind::HeunL, z, settings)
}

/// Single-valued HeunS over the default path.
pub fn hs_basic(p: &HeunParams, z: Complex64, settings: &Settings) -> Result<EvalResult> {
    basic(p, FunctionKind::HeunS, z, settings)
}
