//! Branch cuts, sectors at infinity and point classification.
//!
//! The single-valued functions are cut along `(1, +∞)`, along the ray from
//! `a` in the direction `arg a`, and, when the function branches at the
//! origin, along `(-∞, 0)`. All three cuts are radial, so every point off
//! the cuts can be joined to the origin by a segment that crosses none of
//! them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::connection::{represents, ConnectionKey, Region, Site};
use crate::params::{canonical, FunctionKind, HeunParams};

/// Relative radius (of `R_1` or `R_a`) below which the near-singularity
/// representation is used when the matching coefficients are unknown.
pub const NEAR_UNCACHED: f64 = 0.05;
/// Same, when the coefficients are already cached.
pub const NEAR_CACHED: f64 = 0.25;
/// Matching radius at infinity in units of `R_∞`.
pub const C_INF: f64 = 2.0;
/// Multiple of `C_∞ R_∞` beyond which infinity is handled by the local
/// representation when the coefficients are unknown.
pub const FAR_UNCACHED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Singularity {
    Zero,
    One,
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cut {
    /// `(-∞, 0)`
    Origin,
    /// `(1, +∞)`
    One,
    /// from `a` to `e^{i arg a} ∞`
    A,
}

/// A cut stored as its origin and direction angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutRay {
    pub cut: Cut,
    pub origin: Complex64,
    pub direction: f64,
}

impl CutRay {
    fn unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.direction)
    }

    /// Exact membership: the cross product with the direction vanishes and
    /// the point lies strictly beyond the origin.
    pub fn contains(&self, z: Complex64) -> bool {
        match self.cut {
            Cut::Origin => z.im == 0.0 && z.re < 0.0,
            Cut::One => z.im == 0.0 && z.re > 1.0,
            Cut::A => {
                let a = self.origin;
                let cross = z.im * a.re - z.re * a.im;
                cross == 0.0 && (z * a.conj()).re > a.norm_sqr()
            }
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        let w = (z - self.origin) * self.unit().conj();
        if w.re <= 0.0 {
            w.norm()
        } else {
            w.im.abs()
        }
    }

    /// Unit normal pointing to the side whose limit is used for points on
    /// the cut: the side with positive imaginary part, or the
    /// counter-clockwise side for a vertical ray.
    pub fn upper_normal(&self) -> Complex64 {
        let n = Complex64::i() * self.unit();
        if self.direction.cos() < 0.0 {
            -n
        } else {
            n
        }
    }
}

/// The cuts of one single-valued function.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCutSet {
    pub rays: Vec<CutRay>,
}

impl BranchCutSet {
    pub fn new(p: &HeunParams, kind: FunctionKind) -> Self {
        let mut rays = Vec::with_capacity(3);
        if p.has_origin_cut(kind) {
            rays.push(CutRay {
                cut: Cut::Origin,
                origin: Complex64::new(0.0, 0.0),
                direction: PI,
            });
        }
        rays.push(CutRay {
            cut: Cut::One,
            origin: Complex64::new(1.0, 0.0),
            direction: 0.0,
        });
        rays.push(CutRay {
            cut: Cut::A,
            origin: p.a,
            direction: p.a.arg(),
        });
        BranchCutSet { rays }
    }

    /// All three cuts, regardless of whether the function branches at 0.
    pub fn all(p: &HeunParams) -> Self {
        let mut set = Self::new(p, FunctionKind::HeunL);
        if !set.rays.iter().any(|r| r.cut == Cut::Origin) {
            set.rays.insert(
                0,
                CutRay {
                    cut: Cut::Origin,
                    origin: Complex64::new(0.0, 0.0),
                    direction: PI,
                },
            );
        }
        set
    }

    pub fn containing(&self, z: Complex64) -> Option<CutRay> {
        let z = canonical(z);
        self.rays.iter().copied().find(|r| r.contains(z))
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.rays
            .iter()
            .map(|r| r.distance(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance to the cuts that do not contain `z`.
    pub fn distance_to_others(&self, z: Complex64) -> f64 {
        self.rays
            .iter()
            .filter(|r| !r.contains(z))
            .map(|r| r.distance(z))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Angular sectors into which the cuts split the vicinity of infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMap {
    /// Sorted boundary angles starting at `-π` (which stands for `π`).
    bounds: Vec<f64>,
}

impl SectorMap {
    pub fn new(p: &HeunParams) -> Self {
        let mut bounds = vec![-PI, 0.0];
        let phi = canonical(p.a).arg();
        if phi != 0.0 && phi != PI {
            bounds.push(phi);
        }
        bounds.sort_by(|x, y| x.partial_cmp(y).unwrap());
        SectorMap { bounds }
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Angular interval of sector `k`.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        let lo = self.bounds[k];
        let hi = self.bounds.get(k + 1).copied().unwrap_or(PI);
        (lo, hi)
    }

    /// Angle of the mean line of sector `k`.
    pub fn mean_angle(&self, k: usize) -> f64 {
        let (lo, hi) = self.interval(k);
        0.5 * (lo + hi)
    }

    /// Sector containing the direction `theta ∈ (-π, π]`, or `None` when
    /// `theta` is a cut direction.
    pub fn locate(&self, theta: f64) -> Option<usize> {
        if theta == PI || self.bounds.contains(&theta) {
            return None;
        }
        (0..self.len()).find(|&k| {
            let (lo, hi) = self.interval(k);
            lo < theta && theta < hi
        })
    }

    /// Like [`locate`](Self::locate), but the direction `π` is assigned to the
    /// sector just below it, the upper-side limit of the negative real axis.
    pub fn locate_upper(&self, theta: f64) -> Option<usize> {
        if theta == PI {
            Some(self.len() - 1)
        } else {
            self.locate(theta)
        }
    }
}

/// Anything that can tell whether matching coefficients are already known.
pub trait ConnectionCacheView {
    fn contains(&self, key: &ConnectionKey) -> bool;
}

/// A view with nothing cached.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCache;

impl ConnectionCacheView for NoCache {
    fn contains(&self, _key: &ConnectionKey) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointClass {
    Regular,
    Singular(Singularity),
    OnCut(Cut),
    NearOne { cached: bool },
    NearA { cached: bool },
    NearInfinity { sector: usize, omega: f64, cached: bool },
}

/// Half-plane selector for the representation at `z = 1`.
pub fn region_one(p: &HeunParams, z: Complex64) -> Region {
    let a = canonical(p.a);
    if a.im == 0.0 && a.re > 0.0 && a.re < 1.0 {
        half_plane(z)
    } else {
        Region::Whole
    }
}

/// Half-plane selector for the representation at `z = a`.
pub fn region_a(p: &HeunParams, z: Complex64) -> Region {
    let a = canonical(p.a);
    if a.im == 0.0 && (a.re < 0.0 || a.re > 1.0) {
        half_plane(z)
    } else {
        Region::Whole
    }
}

fn half_plane(z: Complex64) -> Region {
    if z.im < 0.0 {
        Region::Lower
    } else {
        Region::Upper
    }
}

/// Sector of a point in the vicinity of infinity together with the angle of
/// its mean line.
pub fn sector_of(p: &HeunParams, z: Complex64) -> Option<(usize, f64)> {
    let map = SectorMap::new(p);
    let k = map.locate(canonical(z).arg())?;
    Some((k, map.mean_angle(k)))
}

fn cross(x: Complex64, y: Complex64) -> f64 {
    x.re * y.im - x.im * y.re
}

/// Whether the segment `[from, to]` meets the ray `origin + t·direction`.
pub fn segment_meets_ray(from: Complex64, to: Complex64, origin: Complex64, direction: Complex64) -> bool {
    let e = to - from;
    let denom = cross(direction, e);
    if denom == 0.0 {
        return false;
    }
    let w = from - origin;
    let t = cross(w, e) / denom;
    let u = cross(w, direction) / denom;
    t >= 0.0 && (0.0..=1.0).contains(&u)
}

/// Decides which algorithm serves `z`. Deterministic for fixed inputs and
/// cache contents.
pub fn classify(
    p: &HeunParams,
    kind: FunctionKind,
    z: Complex64,
    cache: &dyn ConnectionCacheView,
) -> PointClass {
    let z = canonical(z);
    if z == Complex64::new(0.0, 0.0) {
        return PointClass::Singular(Singularity::Zero);
    }
    if z == Complex64::new(1.0, 0.0) {
        return PointClass::Singular(Singularity::One);
    }
    if z == p.a {
        return PointClass::Singular(Singularity::A);
    }
    if let Some(ray) = BranchCutSet::new(p, kind).containing(z) {
        return PointClass::OnCut(ray.cut);
    }

    let key = |site, region| ConnectionKey::new(kind, site, region, p);

    let r1 = p.r_one();
    let d1 = (z - 1.0).norm();
    if d1 < NEAR_CACHED * r1 {
        let cached = cache.contains(&key(Site::One, region_one(p, z)));
        let limit = if cached { NEAR_CACHED } else { NEAR_UNCACHED };
        if d1 < limit * r1 && represents(p, kind, Site::One, z) {
            return PointClass::NearOne { cached };
        }
    }

    let ra = p.r_a();
    let da = (z - p.a).norm();
    if da < NEAR_CACHED * ra {
        let cached = cache.contains(&key(Site::A, region_a(p, z)));
        let limit = if cached { NEAR_CACHED } else { NEAR_UNCACHED };
        if da < limit * ra && represents(p, kind, Site::A, z) {
            return PointClass::NearA { cached };
        }
    }

    let far = C_INF * p.r_inf();
    if z.norm() > far {
        let map = SectorMap::new(p);
        if let Some(sector) = map.locate_upper(z.arg()) {
            let cached = cache.contains(&key(Site::Infinity, Region::Sector(sector as u8)));
            let limit = if cached { 1.0 } else { FAR_UNCACHED };
            if z.norm() > limit * far {
                return PointClass::NearInfinity {
                    sector,
                    omega: map.mean_angle(sector),
                    cached,
                };
            }
        }
    }

    PointClass::Regular
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{ConnectionCache, ConnectionCoefficients};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn closed_form_params() -> HeunParams {
        HeunParams::real(4.0, 2.25, 1.5, 1.5, 0.5, 2.0).unwrap()
    }

    #[test]
    fn cut_geometry() {
        let p = HeunParams::new(c(2.0, 2.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)).unwrap();
        let cuts = BranchCutSet::new(&p, FunctionKind::HeunS);
        assert_eq!(cuts.rays.len(), 3);
        assert_eq!(cuts.rays[0].direction, PI);
        assert_eq!(cuts.rays[1].direction, 0.0);
        assert_eq!(cuts.rays[2].direction, p.a.arg());
        assert_eq!(cuts.containing(c(3.0, 3.0)).map(|r| r.cut), Some(Cut::A));
        assert_eq!(cuts.containing(c(1.0, 1.0)), None);
        assert_eq!(cuts.containing(c(5.0, 0.0)).map(|r| r.cut), Some(Cut::One));
        assert_eq!(cuts.containing(c(-5.0, 0.0)).map(|r| r.cut), Some(Cut::Origin));
        assert_eq!(cuts.containing(c(-5.0, -0.0)).map(|r| r.cut), Some(Cut::Origin));
        // HeunL with generic gamma does not branch at the origin
        let cuts = BranchCutSet::new(&p, FunctionKind::HeunL);
        assert_eq!(cuts.containing(c(-5.0, 0.0)), None);
    }

    #[test]
    fn upper_normals() {
        let p = closed_form_params();
        let all = BranchCutSet::all(&p);
        for ray in &all.rays {
            let n = ray.upper_normal();
            assert!((n - c(0.0, 1.0)).norm() < 1e-15, "{:?}", ray.cut);
        }
        let ray = CutRay { cut: Cut::A, origin: c(0.0, 2.0), direction: PI / 2.0 };
        assert!((ray.upper_normal() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ray_distance() {
        let ray = CutRay { cut: Cut::One, origin: c(1.0, 0.0), direction: 0.0 };
        assert_eq!(ray.distance(c(5.0, 0.5)), 0.5);
        assert_eq!(ray.distance(c(1.0, -3.0)), 3.0);
        assert_eq!(ray.distance(c(-2.0, 4.0)), 5.0);
    }

    #[test]
    fn two_sectors_for_real_a() {
        let map = SectorMap::new(&closed_form_params());
        assert_eq!(map.len(), 2);
        let mut omegas: Vec<f64> = (0..2).map(|k| map.mean_angle(k)).collect();
        omegas.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(omegas, vec![-PI / 2.0, PI / 2.0]);
    }

    #[test]
    fn three_sectors_for_a_equal_i() {
        let p = HeunParams::new(c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)).unwrap();
        let map = SectorMap::new(&p);
        assert_eq!(map.len(), 3);
        let mut omegas: Vec<f64> = (0..3).map(|k| map.mean_angle(k)).collect();
        omegas.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let expected = [-PI / 2.0, PI / 4.0, 3.0 * PI / 4.0];
        for (o, e) in omegas.iter().zip(expected) {
            assert!((o - e).abs() < 1e-15);
        }
        assert_eq!(map.locate(PI / 2.0), None);
        assert_eq!(map.locate(0.0), None);
        assert_eq!(map.locate(PI), None);
    }

    #[test]
    fn sector_of_upper_half_plane_point() {
        let (_, omega) = sector_of(&closed_form_params(), c(0.0, 20.0)).unwrap();
        assert_eq!(omega, PI / 2.0);
        assert_eq!(sector_of(&closed_form_params(), c(20.0, 0.0)), None);
    }

    #[test]
    fn classification_examples() {
        let p = closed_form_params();
        let hl = FunctionKind::HeunL;
        assert_eq!(classify(&p, hl, c(0.99, 0.0), &NoCache), PointClass::NearOne { cached: false });
        assert_eq!(classify(&p, hl, c(0.5, 0.0), &NoCache), PointClass::Regular);
        assert_eq!(classify(&p, hl, c(1.0, 0.0), &NoCache), PointClass::Singular(Singularity::One));
        assert_eq!(classify(&p, hl, c(4.0, 0.0), &NoCache), PointClass::Singular(Singularity::A));
        assert_eq!(classify(&p, hl, c(0.0, 0.0), &NoCache), PointClass::Singular(Singularity::Zero));
        assert_eq!(classify(&p, hl, c(6.0, 0.0), &NoCache), PointClass::OnCut(Cut::One));
        assert_eq!(classify(&p, hl, c(-6.0, 0.0), &NoCache), PointClass::Regular);
        assert_eq!(classify(&p, FunctionKind::HeunS, c(-6.0, 0.0), &NoCache), PointClass::OnCut(Cut::Origin));
        // 20 < 5 * 2 * 4 without cache
        assert_eq!(classify(&p, hl, c(0.0, 20.0), &NoCache), PointClass::Regular);
        assert!(matches!(classify(&p, hl, c(0.0, 41.0), &NoCache), PointClass::NearInfinity { cached: false, .. }));
    }

    #[test]
    fn cached_coefficients_widen_the_neighbourhood() {
        let p = closed_form_params();
        let hl = FunctionKind::HeunL;
        let cache = ConnectionCache::new();
        let z = c(0.0, 20.0);
        let (sector, omega) = sector_of(&p, z).unwrap();
        let dummy = ConnectionCoefficients {
            c1: c(1.0, 0.0),
            c2: c(0.0, 0.0),
            matched_at: c(0.0, 8.0),
            r_match: 0.0,
            n_terms: 0,
        };
        cache.insert(ConnectionKey::new(hl, Site::Infinity, Region::Sector(sector as u8), &p), dummy);
        assert_eq!(
            classify(&p, hl, z, &cache),
            PointClass::NearInfinity { sector, omega, cached: true }
        );
        // the other sector is still unknown
        assert_eq!(classify(&p, hl, c(0.0, -20.0), &cache), PointClass::Regular);
        // and the cache does not leak into the other function kind
        assert_eq!(classify(&p, FunctionKind::HeunS, z, &cache), PointClass::Regular);

        let z = c(4.0, 0.5);
        assert_eq!(classify(&p, hl, z, &cache), PointClass::Regular);
        cache.insert(ConnectionKey::new(hl, Site::A, Region::Upper, &p), dummy);
        assert_eq!(classify(&p, hl, z, &cache), PointClass::NearA { cached: true });
        assert_eq!(classify(&p, hl, c(4.0, -0.5), &cache), PointClass::Regular);
    }

    #[test]
    fn classify_is_pure() {
        let p = closed_form_params();
        for z in [c(0.3, 0.2), c(0.97, 0.01), c(3.9, 0.1), c(-50.0, 3.0), c(2.0, 0.0)] {
            let a = classify(&p, FunctionKind::HeunL, z, &NoCache);
            let b = classify(&p, FunctionKind::HeunL, z, &NoCache);
            assert_eq!(a, b);
        }
    }
}
