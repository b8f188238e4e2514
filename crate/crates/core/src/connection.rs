//! Representations near `z = 1`, `z = a` and `z = ∞` as combinations of
//! local solutions of transformed equations, matched to the basic
//! evaluator at one regular point.
//!
//! | site | local variable | transformed parameters |
//! |------|----------------|------------------------|
//! | 1    | `1 - z`        | `(1-a, αβ-q, α, β, δ, γ)` |
//! | a    | `(a - z)/a`    | `((a-1)/a, αβ-q/a, α, β, ε, γ)` |
//! | ∞    | `1/z`, times `z^{-α}` | `(1/a, (q+α(δ-β))/a+α(ε-β), α, α-γ+1, α-β+1, δ)` |

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::RwLock;

use num_complex::Complex64;

use crate::continuation::{hl_basic, hs_basic};
use crate::error::{HeunError, Result};
use crate::geometry::{
    region_a, region_one, segment_meets_ray, ConnectionCacheView, SectorMap, C_INF,
};
use crate::params::{canonical, EvalResult, FunctionKind, HeunParams, Settings};
use crate::series::{hl_series, hs_series};

/// Relative determinant below which a matching system is rejected.
pub const DET_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    One,
    A,
    Infinity,
}

/// Which coefficient set of a site is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// One set serves the whole neighbourhood.
    Whole,
    Upper,
    Lower,
    /// Sector index at infinity.
    Sector(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConnectionKey {
    pub kind: FunctionKind,
    pub site: Site,
    pub region: Region,
    pub params: [u64; 12],
}

impl ConnectionKey {
    pub fn new(kind: FunctionKind, site: Site, region: Region, p: &HeunParams) -> Self {
        ConnectionKey {
            kind,
            site,
            region,
            params: p.bits(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionCoefficients {
    pub c1: Complex64,
    pub c2: Complex64,
    pub matched_at: Complex64,
    /// bound on `|c1 f1 + c2 f2 - f0|` at the matching point
    pub r_match: f64,
    /// series terms spent on the match
    pub n_terms: usize,
}

/// In-memory store of matched coefficients, safe to share between threads.
#[derive(Debug, Default)]
pub struct ConnectionCache {
    map: RwLock<HashMap<ConnectionKey, ConnectionCoefficients>>,
}

impl ConnectionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &ConnectionKey) -> Option<ConnectionCoefficients> {
        self.map.read().unwrap().get(key).copied()
    }

    /// Keeps the first value stored under `key`.
    pub fn insert(&self, key: ConnectionKey, coefficients: ConnectionCoefficients) {
        self.map.write().unwrap().entry(key).or_insert(coefficients);
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().unwrap().clear();
    }

    /// Cached coefficients, or the result of `compute` which is then stored.
    /// The flag is true when `compute` ran. Errors are passed through and
    /// nothing is stored.
    pub fn lookup_or_compute(
        &self,
        key: ConnectionKey,
        compute: impl FnOnce() -> Result<ConnectionCoefficients>,
    ) -> Result<(ConnectionCoefficients, bool)> {
        if let Some(found) = self.get(&key) {
            return Ok((found, false));
        }
        let computed = compute()?;
        self.insert(key, computed);
        Ok((computed, true))
    }
}

impl ConnectionCacheView for ConnectionCache {
    fn contains(&self, key: &ConnectionKey) -> bool {
        self.map.read().unwrap().contains_key(key)
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn region_sign(region: Region) -> f64 {
    match region {
        Region::Lower => -1.0,
        _ => 1.0,
    }
}

pub fn matching_point_one(p: &HeunParams, region: Region) -> Complex64 {
    let a = canonical(p.a);
    let s = if a.im == 0.0 && a.re > 0.0 && a.re < 1.0 {
        region_sign(region)
    } else {
        -sign(a.im)
    };
    Complex64::new(0.5, s * FRAC_1_SQRT_2)
}

/// Matching point for the representation at `a`. For non-real `a` the
/// point is moved to the other side of `a/2` when the segment joining it to
/// `a` would cross a cut of the function or of the local solutions.
pub fn matching_point_a(p: &HeunParams, kind: FunctionKind, region: Region) -> Complex64 {
    let a = canonical(p.a);
    if a.im == 0.0 && (a.re < 0.0 || a.re > 1.0) {
        return a / 2.0 + Complex64::new(0.0, region_sign(region) * FRAC_1_SQRT_2);
    }
    let s = a / a.norm() * sign(a.im);
    let m = a / 2.0 + Complex64::i() * s * FRAC_1_SQRT_2;
    let flipped = a / 2.0 - Complex64::i() * s * FRAC_1_SQRT_2;
    if crosses_cut_towards_a(p, kind, m) && !crosses_cut_towards_a(p, kind, flipped) {
        flipped
    } else {
        m
    }
}

/// Cuts of the function or of the local solutions at `site` that the two do
/// not share, as `(origin, direction)` rays. The representation at `site`
/// only holds on points reached from the matching point without crossing one.
fn unshared_cuts(p: &HeunParams, kind: FunctionKind, site: Site) -> Vec<(Complex64, Complex64)> {
    let a = p.a;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    match site {
        Site::One => {
            let mut rays = vec![(a, a), (a, a - 1.0)];
            if !p.has_origin_cut(kind) {
                rays.push((zero, -one));
            }
            rays
        }
        Site::A => {
            let mut rays = vec![(one, one), (zero, -a), (one, one - a)];
            if p.has_origin_cut(kind) {
                rays.push((zero, -one));
            }
            rays
        }
        Site::Infinity => Vec::new(),
    }
}

fn crosses_cut_towards_a(p: &HeunParams, kind: FunctionKind, m: Complex64) -> bool {
    unshared_cuts(p, kind, Site::A)
        .iter()
        .any(|&(o, d)| segment_meets_ray(m, p.a, o, d))
}

/// Whether the representation at `site` is valid at `z`: the segment from
/// the matching point to `z` meets no cut that the function and the local
/// solutions do not share.
pub fn represents(p: &HeunParams, kind: FunctionKind, site: Site, z: Complex64) -> bool {
    let z = canonical(z);
    let m = match site {
        Site::One => matching_point_one(p, region_one(p, z)),
        Site::A => matching_point_a(p, kind, region_a(p, z)),
        Site::Infinity => return true,
    };
    !unshared_cuts(p, kind, site)
        .iter()
        .any(|&(o, d)| segment_meets_ray(m, z, o, d))
}

pub fn matching_point_infinity(p: &HeunParams, sector: usize) -> Complex64 {
    let omega = SectorMap::new(p).mean_angle(sector);
    Complex64::from_polar(C_INF * p.r_inf(), omega)
}

/// The local pair (HeunL, HeunS) of a transformed problem at `v`. Inside
/// the series disc the branch of `v^{1-γ}` and `log v` follows `arg_v`.
fn local_pair(
    p: &HeunParams,
    v: Complex64,
    arg_v: f64,
    settings: &Settings,
) -> Result<(EvalResult, EvalResult)> {
    if v.norm() <= settings.kappa * p.r0() {
        Ok((
            hl_series(p, v, arg_v, settings)?,
            hs_series(p, v, arg_v, settings)?,
        ))
    } else {
        Ok((hl_basic(p, v, settings)?, hs_basic(p, v, settings)?))
    }
}

fn original(p: &HeunParams, kind: FunctionKind, z: Complex64, settings: &Settings) -> Result<EvalResult> {
    match kind {
        FunctionKind::HeunL => hl_basic(p, z, settings),
        FunctionKind::HeunS => hs_basic(p, z, settings),
    }
}

/// Basis values `(g, g')` in the original variable, with their error
/// indicators.
struct Basis {
    g: [Complex64; 2],
    dg: [Complex64; 2],
    r: [f64; 2],
    n_terms: usize,
}

fn solve(basis: &Basis, f0: &EvalResult, matched_at: Complex64) -> Result<ConnectionCoefficients> {
    let [x1, x2] = basis.g;
    let [y1, y2] = basis.dg;
    let det = x1 * y2 - x2 * y1;
    let scale = (x1.norm_sqr() + x2.norm_sqr()).sqrt() * (y1.norm_sqr() + y2.norm_sqr()).sqrt();
    if !(det.norm() >= DET_TOLERANCE * scale) {
        return Err(HeunError::IllConditioned {
            det: det.norm(),
            scale,
        });
    }
    let c1 = (f0.f * y2 - x2 * f0.df) / det;
    let c2 = (x1 * f0.df - f0.f * y1) / det;
    let residual = (c1 * x1 + c2 * x2 - f0.f).norm();
    Ok(ConnectionCoefficients {
        c1,
        c2,
        matched_at,
        r_match: c1.norm() * basis.r[0] + c2.norm() * basis.r[1] + f0.r + residual,
        n_terms: basis.n_terms + f0.n_terms,
    })
}

/// Local basis near a finite site: `g_i(z) = f_i(v(z))` with `v = (s - z)/scale`.
fn finite_basis(
    local: &HeunParams,
    site: Complex64,
    scale: Complex64,
    z: Complex64,
    settings: &Settings,
) -> Result<Basis> {
    let v = canonical((site - z) / scale);
    let (f1, f2) = local_pair(local, v, v.arg(), settings)?;
    Ok(Basis {
        g: [f1.f, f2.f],
        dg: [-f1.df / scale, -f2.df / scale],
        r: [f1.r, f2.r],
        n_terms: f1.n_terms + f2.n_terms,
    })
}

/// Local basis at infinity: `g_i(z) = z^{-α} f_i(1/z)`. `arg_z` fixes the
/// branch of `z^{-α}`; the local variable takes the opposite argument.
fn infinity_basis(
    p: &HeunParams,
    z: Complex64,
    arg_z: f64,
    settings: &Settings,
) -> Result<Basis> {
    let local = p.at_infinity();
    let u = 1.0 / z;
    let (f1, f2) = local_pair(&local, u, -arg_z, settings)?;
    let prefactor = (-p.alpha * Complex64::new(z.norm().ln(), arg_z)).exp();
    let d = |f: &EvalResult| -prefactor / z * (f.df / z + p.alpha * f.f);
    Ok(Basis {
        g: [prefactor * f1.f, prefactor * f2.f],
        dg: [d(&f1), d(&f2)],
        r: [prefactor.norm() * f1.r, prefactor.norm() * f2.r],
        n_terms: f1.n_terms + f2.n_terms,
    })
}

pub fn match_at_one(
    p: &HeunParams,
    kind: FunctionKind,
    region: Region,
    settings: &Settings,
) -> Result<ConnectionCoefficients> {
    let m = matching_point_one(p, region);
    let f0 = original(p, kind, m, settings)?;
    let basis = finite_basis(&p.at_one(), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), m, settings)?;
    solve(&basis, &f0, m)
}

pub fn match_at_a(
    p: &HeunParams,
    kind: FunctionKind,
    region: Region,
    settings: &Settings,
) -> Result<ConnectionCoefficients> {
    let m = matching_point_a(p, kind, region);
    let f0 = original(p, kind, m, settings)?;
    let basis = finite_basis(&p.at_a(), p.a, p.a, m, settings)?;
    solve(&basis, &f0, m)
}

pub fn match_at_infinity(
    p: &HeunParams,
    kind: FunctionKind,
    sector: usize,
    settings: &Settings,
) -> Result<ConnectionCoefficients> {
    let m = matching_point_infinity(p, sector);
    let f0 = original(p, kind, m, settings)?;
    let basis = infinity_basis(p, m, m.arg(), settings)?;
    solve(&basis, &f0, m)
}

fn combine(basis: &Basis, coeffs: &ConnectionCoefficients, fresh: bool) -> EvalResult {
    let (c1, c2) = (coeffs.c1, coeffs.c2);
    EvalResult {
        f: c1 * basis.g[0] + c2 * basis.g[1],
        df: c1 * basis.dg[0] + c2 * basis.dg[1],
        r: c1.norm() * basis.r[0] + c2.norm() * basis.r[1] + coeffs.r_match,
        n_terms: basis.n_terms + if fresh { coeffs.n_terms } else { 0 },
    }
}

/// Evaluation near `z = 1`; the first call for a key also pays for the match.
/// Evaluation near `z = 1`. Only meaningful where [`represents`] holds.
pub fn eval_near_one(
    p: &HeunParams,
    kind: FunctionKind,
    z: Complex64,
    cache: &ConnectionCache,
    settings: &Settings,
) -> Result<EvalResult> {
    let z = canonical(z);
    let one = Complex64::new(1.0, 0.0);
    if z == one {
        return Err(HeunError::SingularPoint { z });
    }
    let region = region_one(p, z);
    let key = ConnectionKey::new(kind, Site::One, region, p);
    let (coeffs, fresh) = cache.lookup_or_compute(key, || match_at_one(p, kind, region, settings))?;
    let basis = finite_basis(&p.at_one(), one, one, z, settings)?;
    Ok(combine(&basis, &coeffs, fresh))
}

/// Evaluation near `z = a`. Only meaningful where [`represents`] holds.
pub fn eval_near_a(
    p: &HeunParams,
    kind: FunctionKind,
    z: Complex64,
    cache: &ConnectionCache,
    settings: &Settings,
) -> Result<EvalResult> {
    let z = canonical(z);
    if z == p.a {
        return Err(HeunError::SingularPoint { z });
    }
    let region = region_a(p, z);
    let key = ConnectionKey::new(kind, Site::A, region, p);
    let (coeffs, fresh) = cache.lookup_or_compute(key, || match_at_a(p, kind, region, settings))?;
    let basis = finite_basis(&p.at_a(), p.a, p.a, z, settings)?;
    Ok(combine(&basis, &coeffs, fresh))
}

/// Evaluation in the vicinity of infinity. Points on the negative real axis
/// take the sector just above it and the upper-side branch of `z^{-α}`.
pub fn eval_near_infinity(
    p: &HeunParams,
    kind: FunctionKind,
    z: Complex64,
    cache: &ConnectionCache,
    settings: &Settings,
) -> Result<EvalResult> {
    let z = canonical(z);
    let arg_z = z.arg();
    let sector = SectorMap::new(p)
        .locate_upper(arg_z)
        .ok_or(HeunError::OnCut { z })?;
    let key = ConnectionKey::new(kind, Site::Infinity, Region::Sector(sector as u8), p);
    let (coeffs, fresh) = cache.lookup_or_compute(key, || match_at_infinity(p, kind, sector, settings))?;
    let basis = infinity_basis(p, z, arg_z, settings)?;
    Ok(combine(&basis, &coeffs, fresh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sector_of, NEAR_CACHED};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn closed_form_params() -> HeunParams {
        HeunParams::real(4.0, 2.25, 1.5, 1.5, 0.5, 2.0).unwrap()
    }

    fn h(z: Complex64) -> Complex64 {
        2.0 / ((4.0 - z).sqrt() * (1.0 - z))
    }

    fn settings() -> Settings {
        Settings::default()
    }

    fn rel(x: Complex64, y: Complex64) -> f64 {
        (x - y).norm() / y.norm()
    }

    #[test]
    fn matching_points() {
        let p = closed_form_params();
        assert_eq!(matching_point_one(&p, Region::Whole), c(0.5, 0.0));
        assert_eq!(matching_point_a(&p, FunctionKind::HeunL, Region::Upper), c(2.0, FRAC_1_SQRT_2));
        assert_eq!(matching_point_a(&p, FunctionKind::HeunL, Region::Lower), c(2.0, -FRAC_1_SQRT_2));
        let half = HeunParams::real(0.5, 0.3, 1.0, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(matching_point_one(&half, Region::Lower), c(0.5, -FRAC_1_SQRT_2));
        let m = matching_point_infinity(&p, sector_of(&p, c(0.0, 20.0)).unwrap().0);
        assert!((m - c(0.0, 8.0)).norm() < 1e-14);
    }

    #[test]
    fn matched_pairs_reproduce_the_function() {
        let p = closed_form_params();
        let s = settings();
        let one = c(1.0, 0.0);
        for kind in [FunctionKind::HeunL, FunctionKind::HeunS] {
            let cases = [
                (match_at_one(&p, kind, Region::Whole, &s).unwrap(), Site::One),
                (match_at_a(&p, kind, Region::Upper, &s).unwrap(), Site::A),
                (match_at_infinity(&p, kind, 0, &s).unwrap(), Site::Infinity),
            ];
            for (coeffs, site) in cases {
                let m = coeffs.matched_at;
                let basis = match site {
                    Site::One => finite_basis(&p.at_one(), one, one, m, &s),
                    Site::A => finite_basis(&p.at_a(), p.a, p.a, m, &s),
                    Site::Infinity => infinity_basis(&p, m, m.arg(), &s),
                }
                .unwrap();
                let f0 = original(&p, kind, m, &s).unwrap();
                let value = coeffs.c1 * basis.g[0] + coeffs.c2 * basis.g[1];
                assert!((value - f0.f).norm() <= coeffs.r_match);
                let slope = coeffs.c1 * basis.dg[0] + coeffs.c2 * basis.dg[1];
                assert!((slope - f0.df).norm() <= 1e-12 * (1.0 + f0.df.norm()));
                assert!(coeffs.n_terms > f0.n_terms);
            }
        }
    }

    #[test]
    fn near_one_matches_closed_form() {
        let p = closed_form_params();
        let cache = ConnectionCache::new();
        let r = eval_near_one(&p, FunctionKind::HeunL, c(0.99, 0.0), &cache, &settings()).unwrap();
        assert!(rel(r.f, c(115.27808354084691, 0.0)) < 1e-11);
        assert!(r.r < 1e-9);
    }

    #[test]
    fn near_a_matches_closed_form() {
        let p = closed_form_params();
        let cache = ConnectionCache::new();
        let z = c(4.0, 0.01);
        let r = eval_near_a(&p, FunctionKind::HeunL, z, &cache, &settings()).unwrap();
        assert!(rel(r.f, h(z)) < 1e-11);
        assert!((r.f - c(-4.729706139646244, -4.698279520778163)).norm() < 1e-9);
        let z = c(4.0, -0.01);
        let r = eval_near_a(&p, FunctionKind::HeunL, z, &cache, &settings()).unwrap();
        assert!(rel(r.f, h(z)) < 1e-11);
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn near_infinity_matches_closed_form() {
        let p = closed_form_params();
        let cache = ConnectionCache::new();
        let s = settings();
        for z in [c(0.0, 20.0), c(-20.0, 0.0), c(30.0, -50.0), c(-45.0, 1.0), c(-45.0, -1.0)] {
            let r = eval_near_infinity(&p, FunctionKind::HeunL, z, &cache, &s).unwrap();
            assert!(rel(r.f, h(z)) < 1e-12, "{z}: {} vs {}", r.f, h(z));
            let hd = h(z) * (0.5 / (4.0 - z) + 1.0 / (1.0 - z));
            assert!(rel(r.df, hd) < 1e-11, "{z}");
        }
        let r = eval_near_infinity(&p, FunctionKind::HeunL, c(0.0, 20.0), &cache, &s).unwrap();
        assert!((r.f - c(-0.013149040747, 0.017781180954)).norm() < 1e-11);
    }

    #[test]
    fn half_plane_pairs_differ_for_a_inside_unit_interval() {
        let p = HeunParams::real(0.5, 0.3, 1.2, 0.8, 0.5, 1.1).unwrap();
        let s = settings();
        let up = match_at_one(&p, FunctionKind::HeunL, Region::Upper, &s).unwrap();
        let down = match_at_one(&p, FunctionKind::HeunL, Region::Lower, &s).unwrap();
        assert!((up.c1 - down.c1).norm() + (up.c2 - down.c2).norm() > 1e-6);
    }

    #[test]
    fn three_sector_pairs_for_complex_a() {
        let p = HeunParams::new(c(0.0, 1.5), c(0.3, 0.1), c(1.2, 0.0), c(0.8, 0.3), c(0.5, 0.0), c(1.1, 0.0)).unwrap();
        let s = settings();
        let pairs: Vec<_> = (0..3)
            .map(|k| match_at_infinity(&p, FunctionKind::HeunL, k, &s).unwrap())
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                assert!((pairs[i].c1 - pairs[j].c1).norm() + (pairs[i].c2 - pairs[j].c2).norm() > 1e-8);
            }
        }
    }

    #[test]
    fn overlap_agreement_fixed_params() {
        let p = HeunParams::new(c(1.7, -0.9), c(0.4, 0.6), c(0.9, -0.4), c(1.3, 0.5), c(0.6, 0.3), c(-0.7, 0.2)).unwrap();
        let s = settings();
        let cache = ConnectionCache::new();
        for kind in [FunctionKind::HeunL, FunctionKind::HeunS] {
            for k in 0..10 {
                let t = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / 10.0);
                let z = 1.0 + 0.2 * p.r_one() * t;
                let a = eval_near_one(&p, kind, z, &cache, &s).unwrap();
                let b = original(&p, kind, z, &s).unwrap();
                assert!((a.f - b.f).norm() / (1.0 + b.f.norm()) < 1e-9, "one {kind:?} {z}");
                let z = p.a + 0.2 * p.r_a() * t;
                let a = eval_near_a(&p, kind, z, &cache, &s).unwrap();
                let b = original(&p, kind, z, &s).unwrap();
                assert!((a.f - b.f).norm() / (1.0 + b.f.norm()) < 1e-9, "a {kind:?} {z}");
                let z = 1.5 * C_INF * p.r_inf() * t;
                let a = eval_near_infinity(&p, kind, z, &cache, &s).unwrap();
                let b = original(&p, kind, z, &s).unwrap();
                assert!((a.f - b.f).norm() / (1.0 + b.f.norm()) < 1e-9, "inf {kind:?} {z}");
            }
        }
    }

    #[test]
    fn warm_cache_is_transparent() {
        let p = closed_form_params();
        let s = settings();
        let z = c(4.0, 0.01);
        let cold = eval_near_a(&p, FunctionKind::HeunL, z, &ConnectionCache::new(), &s).unwrap();
        let cache = ConnectionCache::new();
        let first = eval_near_a(&p, FunctionKind::HeunL, z, &cache, &s).unwrap();
        let second = eval_near_a(&p, FunctionKind::HeunL, z, &cache, &s).unwrap();
        assert_eq!((cold.f, cold.df, cold.r), (second.f, second.df, second.r));
        assert_eq!(first, cold);
        assert!(second.n_terms < first.n_terms);
        let _ = NEAR_CACHED;
    }

    #[test]
    fn keys_are_bit_exact() {
        let p = closed_form_params();
        let q = HeunParams::real(4.0, 2.25 + f64::EPSILON * 2.0, 1.5, 1.5, 0.5, 2.0).unwrap();
        let k1 = ConnectionKey::new(FunctionKind::HeunL, Site::A, Region::Upper, &p);
        let k2 = ConnectionKey::new(FunctionKind::HeunL, Site::A, Region::Upper, &q);
        assert_ne!(k1, k2);
        let cache = ConnectionCache::new();
        let s = settings();
        eval_near_a(&p, FunctionKind::HeunL, c(4.0, 0.01), &cache, &s).unwrap();
        eval_near_a(&q, FunctionKind::HeunL, c(4.0, 0.01), &cache, &s).unwrap();
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn failures_are_not_cached() {
        let cache = ConnectionCache::new();
        let p = closed_form_params();
        let key = ConnectionKey::new(FunctionKind::HeunL, Site::One, Region::Whole, &p);
        let mut calls = 0;
        for _ in 0..2 {
            let res = cache.lookup_or_compute(key, || {
                calls += 1;
                Err(HeunError::IllConditioned { det: 0.0, scale: 1.0 })
            });
            assert!(res.is_err());
        }
        assert_eq!(calls, 2);
        assert!(cache.is_empty());
    }

    #[test]
    fn singular_sites_are_rejected() {
        let p = closed_form_params();
        let cache = ConnectionCache::new();
        assert!(matches!(
            eval_near_one(&p, FunctionKind::HeunL, c(1.0, 0.0), &cache, &settings()),
            Err(HeunError::SingularPoint { .. })
        ));
        assert!(matches!(
            eval_near_a(&p, FunctionKind::HeunL, c(4.0, 0.0), &cache, &settings()),
            Err(HeunError::SingularPoint { .. })
        ));
    }

    #[test]
    fn matching_point_a_avoids_the_origin_cut() {
        let a = c(-0.2, -0.4);
        let p = HeunParams::new(a, c(0.3, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(0.5, 0.3), c(1.0, 0.0)).unwrap();
        let l = matching_point_a(&p, FunctionKind::HeunL, Region::Whole);
        let s = matching_point_a(&p, FunctionKind::HeunS, Region::Whole);
        assert!(l.im > 0.0 && l.re < 0.0);
        assert!(s.im < 0.0);
        assert!(represents(&p, FunctionKind::HeunS, Site::A, a + 0.05));
    }

    #[test]
    fn representation_stops_at_unshared_cuts() {
        let a = c(-1.156, 0.169);
        let p = HeunParams::new(a, c(0.3, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(0.5, 0.3), c(1.0, 0.0)).unwrap();
        let below = c(-1.2, -0.03);
        assert!(represents(&p, FunctionKind::HeunL, Site::A, below));
        assert!(!represents(&p, FunctionKind::HeunS, Site::A, below));
        assert!(represents(&p, FunctionKind::HeunS, Site::A, c(-1.2, 0.1)));
        let cache = ConnectionCache::new();
        let z = c(-1.2, 0.1);
        let near = eval_near_a(&p, FunctionKind::HeunS, z, &cache, &settings()).unwrap();
        let basic = hs_basic(&p, z, &settings()).unwrap();
        assert!(rel(near.f, basic.f) < 1e-10);
    }
}

