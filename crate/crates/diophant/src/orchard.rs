//! Visibility through an orchard planted on the pseudo-lattice `(bZ + s) x (aZ + r)`.
//!
//! A tree stands at `(x, y) = (b n + s, a m + r)` with `0 < x <= depth`. The
//! ray from the origin with slope `xi` is blocked by a tree when its distance
//! to the line is at most the tree's radius. In vertical mode the distance is
//! `|xi x - y|`, which turns blocking into a Diophantine inequality; in
//! Euclidean mode it is that quantity divided by `sqrt(1 + xi^2)`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::asymptotic::admissible;
use crate::cf::Real;
use crate::congruence::Constraint;
use crate::enclosure::{rat_ceil, rat_floor, rat_to_f64, refine_capped, Enclosure};
use crate::error::{Error, Result};
use crate::json;
use crate::scan::{abs_interval, enclosure, Window};

/// How tree radii are assigned.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RadiusModel {
    /// Radius `ab / (4x)` for the tree at abscissa `x`.
    Asymptotic,
    /// The same radius for every tree.
    Uniform(#[serde(serialize_with = "json::rat")] BigRational),
}

/// Distance used for blocking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DistanceMode {
    Euclidean,
    Vertical,
}

/// Trees with `0 < x <= depth` outside the glade, optionally cut to a sector and a disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrchardScene {
    pub constraint: Constraint,
    pub radius_model: RadiusModel,
    pub depth: u64,
    #[serde(serialize_with = "json::rat")]
    pub glade_radius: BigRational,
    pub mode: DistanceMode,
    /// Keep only trees with `|y| <= theta x`.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_rat")]
    pub sector: Option<BigRational>,
    /// Keep only trees with `x^2 + y^2 <= R^2`.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_rat")]
    pub disk: Option<BigRational>,
}

fn opt_rat<S: serde::Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn ri(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Integer square root rounded down of a nonnegative rational.
fn isqrt_floor(x: &BigRational) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let f = rat_floor(x);
    let mut s = f.sqrt();
    while ri(&s + 1u32) * ri(&s + 1u32) <= *x {
        s += 1u32;
    }
    s
}

impl OrchardScene {
    /// Validated scene; rejects scenes in which some tree's disk contains the origin.
    pub fn new(constraint: Constraint, radius_model: RadiusModel, depth: u64, glade_radius: BigRational, mode: DistanceMode) -> Result<Self> {
        let scene = OrchardScene {
            constraint,
            radius_model,
            depth,
            glade_radius,
            mode,
            sector: None,
            disk: None,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn with_sector(mut self, theta: BigRational) -> Result<Self> {
        self.sector = Some(theta);
        self.validate()?;
        Ok(self)
    }

    pub fn with_disk(mut self, radius: BigRational) -> Result<Self> {
        self.disk = Some(radius);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::pre("depth must be positive"));
        }
        if self.glade_radius.is_negative() {
            return Err(Error::pre("glade radius must be nonnegative"));
        }
        if let RadiusModel::Uniform(r) = &self.radius_model {
            if !r.is_positive() {
                return Err(Error::pre("tree radius must be positive"));
            }
        }
        if self.sector.as_ref().is_some_and(|t| !t.is_positive()) || self.disk.as_ref().is_some_and(|d| !d.is_positive()) {
            return Err(Error::pre("sector and disk bounds must be positive"));
        }
        for x in admissible(&self.constraint, self.depth) {
            let rho = self.radius(x);
            if ri(x) > rho {
                if matches!(self.radius_model, RadiusModel::Uniform(_)) {
                    break;
                }
                continue;
            }
            let ymax = isqrt_floor(&(&rho * &rho - ri(x * x)));
            for y in self.column(&-&ymax, &ymax) {
                if self.keeps(x, &y) && ri(x * x) + ri(&y * &y) <= &rho * &rho {
                    return Err(Error::pre(format!("the tree at ({x}, {y}) covers the origin")));
                }
            }
        }
        Ok(())
    }

    /// Radius of the tree at abscissa `x`.
    pub fn radius(&self, x: u64) -> BigRational {
        match &self.radius_model {
            RadiusModel::Asymptotic => BigRational::new(BigInt::from(self.constraint.ab()), BigInt::from(4 * x)),
            RadiusModel::Uniform(r) => r.clone(),
        }
    }

    /// Whether a lattice point is a tree of the scene (ignoring the depth).
    pub fn keeps(&self, x: u64, y: &BigInt) -> bool {
        let d2 = ri(x * x) + ri(y * y);
        if d2 <= &self.glade_radius * &self.glade_radius {
            return false;
        }
        if let Some(t) = &self.sector {
            if ri(y.abs()) > t * ri(x) {
                return false;
            }
        }
        if let Some(d) = &self.disk {
            if d2 > d * d {
                return false;
            }
        }
        true
    }

    /// Values `y = a m + r` with `lo <= y <= hi`.
    fn column(&self, lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
        let (a, r) = (BigInt::from(self.constraint.a), BigInt::from(self.constraint.r));
        let mut m = rat_ceil(&BigRational::new(lo - &r, a.clone()));
        let mut out = Vec::new();
        loop {
            let y = &a * &m + &r;
            if y > *hi {
                return out;
            }
            out.push(y);
            m += 1u32;
        }
    }

    /// Trees with `|y| <= ymax`, in increasing `(x, y)` order.
    pub fn trees(&self, ymax: u64) -> Vec<(u64, BigInt)> {
        let yb = BigInt::from(ymax);
        admissible(&self.constraint, self.depth)
            .flat_map(|x| self.column(&-&yb, &yb).into_iter().filter(move |y| self.keeps(x, y)).map(move |y| (x, y)))
            .collect()
    }
}

/// Outcome of a visibility query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Visible,
    BlockedBy {
        x: u64,
        #[serde(serialize_with = "json::big")]
        y: BigInt,
        distance: Enclosure,
        #[serde(serialize_with = "json::rat")]
        radius: BigRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VisibilityResult {
    pub verdict: Verdict,
    /// Columns `x` examined.
    pub scanned: u64,
    pub mode: DistanceMode,
}

/// Per-precision data shared by the scans.
struct Geometry {
    w: Window<BigInt>,
    /// `sqrt(1 + xi^2)` for Euclidean mode, 1 for vertical mode.
    stretch: Enclosure,
    /// Exact slope when rational.
    exact: Option<BigRational>,
}

fn geometry<R: Real + ?Sized>(scene: &OrchardScene, slope: &R, bits: u32) -> Result<Geometry> {
    let w = Window::build(slope, None, bits)?;
    let exact = slope.exact_value();
    let stretch = match scene.mode {
        DistanceMode::Vertical => Enclosure::from_int(1),
        DistanceMode::Euclidean => {
            let x = match &exact {
                Some(v) => Enclosure::exact(v),
                None => slope.enclose(bits)?,
            };
            x.mul(&x).add_int(&BigInt::one()).sqrt(bits + 4)
        }
    };
    Ok(Geometry { w, stretch, exact })
}

enum Decision {
    Blocks(Enclosure),
    Clear,
    Unknown,
}

impl Geometry {
    /// Vertical offset `|xi x - y|` as an enclosure.
    fn vertical(&self, lo: &BigInt, hi: &BigInt) -> Enclosure {
        let (l, h) = abs_interval(lo, hi);
        enclosure(&l, &h, &self.w.den)
    }

    fn distance(&self, v: &Enclosure, bits: u32) -> Enclosure {
        if self.stretch.is_exact() && self.stretch.lo() == BigRational::one() {
            v.clone()
        } else {
            v.div(&self.stretch, bits + 4)
        }
    }

    /// Compare the distance of a tree with offset `v` to `rho`.
    fn decide(&self, mode: DistanceMode, v: &Enclosure, rho: &BigRational, bits: u32) -> Decision {
        if let (Some(xi), DistanceMode::Euclidean) = (&self.exact, mode) {
            // Exact comparison of squares for rational slopes.
            let v2 = v.lo() * v.lo();
            let bound = rho * rho * (BigRational::one() + xi * xi);
            return if v2 <= bound {
                Decision::Blocks(self.distance(v, bits))
            } else {
                Decision::Clear
            };
        }
        let thr = self.stretch.mul_rat(rho);
        if v.hi_le(&thr.lo()) {
            Decision::Blocks(self.distance(v, bits))
        } else if v.lo_gt(&thr.hi()) {
            Decision::Clear
        } else {
            Decision::Unknown
        }
    }
}

fn scan_visibility<R: Real + ?Sized>(scene: &OrchardScene, slope: &R, bits: u32) -> Result<Option<VisibilityResult>> {
    let g = geometry(scene, slope, bits)?;
    let c = &scene.constraint;
    let (a, r) = (BigInt::from(c.a), BigInt::from(c.r));
    let den = BigRational::from_integer(g.w.den.clone());
    let mut scanned = 0;
    for x in admissible(c, scene.depth) {
        scanned += 1;
        let rho = scene.radius(x);
        let limit = rat_floor(&(g.stretch.mul_rat(&rho).hi() * &den)) + 1u32;
        let xb = BigInt::from(x);
        let mut found: Option<(BigInt, Enclosure)> = None;
        let mut unknown = false;
        g.w.offsets(&xb, &a, &r, &limit, |m, lo, hi| {
            let y = &a * &m + &r;
            if !scene.keeps(x, &y) || found.is_some() {
                return;
            }
            match g.decide(scene.mode, &g.vertical(&lo, &hi), &rho, bits) {
                Decision::Blocks(d) => found = Some((y, d)),
                Decision::Clear => {}
                Decision::Unknown => unknown = true,
            }
        });
        if unknown {
            return Ok(None);
        }
        if let Some((y, distance)) = found {
            return Ok(Some(VisibilityResult {
                verdict: Verdict::BlockedBy { x, y, distance, radius: rho },
                scanned,
                mode: scene.mode,
            }));
        }
    }
    Ok(Some(VisibilityResult {
        verdict: Verdict::Visible,
        scanned,
        mode: scene.mode,
    }))
}

fn check_slope<R: Real + ?Sized>(scene: &OrchardScene, slope: &R) -> Result<()> {
    if let (RadiusModel::Uniform(_), Some(theta)) = (&scene.radius_model, &scene.sector) {
        let e = slope.enclose(64)?.abs();
        if !e.hi_le(theta) {
            return Err(Error::pre("slope outside the angular extent of the scene"));
        }
    }
    Ok(())
}

const START_BITS: u32 = 96;

/// First blocking tree in increasing `x`, or `Visible`.
///
/// A `Visible` verdict is confirmed by a second full scan at twice the precision.
pub fn visibility<R: Real + ?Sized>(scene: &OrchardScene, slope: &R) -> Result<VisibilityResult> {
    check_slope(scene, slope)?;
    let start = START_BITS + 4 * (64 - scene.depth.leading_zeros());
    let mut used = 0;
    let res = refine_capped(start, |b| {
        used = b;
        scan_visibility(scene, slope, b)
    })?;
    if res.verdict == Verdict::Visible {
        let again = refine_capped(2 * used, |b| scan_visibility(scene, slope, b))?;
        if again.verdict != Verdict::Visible {
            return Err(Error::Indeterminate { cap_bits: 2 * used });
        }
    }
    Ok(res)
}

/// Smallest distance from the line to a tree of the scene, `None` without trees.
///
/// With uniform radius `rho` the horizon in this direction is visible exactly
/// when `rho` is below this value.
pub fn min_blocking_radius<R: Real + ?Sized>(scene: &OrchardScene, slope: &R) -> Result<Option<Enclosure>> {
    if !matches!(scene.radius_model, RadiusModel::Uniform(_)) {
        return Err(Error::pre("minimal blocking radius needs the uniform radius model"));
    }
    check_slope(scene, slope)?;
    let start = START_BITS + 4 * (64 - scene.depth.leading_zeros());
    refine_capped(start, |bits| {
        let g = geometry(scene, slope, bits)?;
        let c = &scene.constraint;
        let (a, r) = (BigInt::from(c.a), BigInt::from(c.r));
        let limit = &g.w.den * &a + 1u32;
        let g2 = &scene.glade_radius * &scene.glade_radius;
        let mut best: Option<Enclosure> = None;
        for x in admissible(c, scene.depth) {
            let xb = BigInt::from(x);
            let mut ys: Vec<(BigInt, Enclosure)> = Vec::new();
            g.w.offsets(&xb, &a, &r, &limit, |m, lo, hi| ys.push((&a * &m + &r, g.vertical(&lo, &hi))));
            // Nearest trees just outside the glade in this column.
            let edge = isqrt_floor(&(&g2 - ri(x * x)));
            for y in [&edge + 1u32, -(&edge + 1u32)] {
                let m = rat_floor(&BigRational::new(&y - &r, a.clone()));
                for mm in [m.clone(), m + 1u32] {
                    let yy = &a * &mm + &r;
                    if ys.iter().all(|(v, _)| *v != yy) {
                        let (lo, hi) = g.w.target(&xb, &yy);
                        ys.push((yy.clone(), g.vertical(&lo, &hi)));
                    }
                }
            }
            for (y, v) in ys {
                if !scene.keeps(x, &y) {
                    continue;
                }
                let d = g.distance(&v, bits);
                best = Some(match best {
                    None => d,
                    Some(b) => b.min(&d),
                });
            }
        }
        Ok(Some(best.map(|b| b.round_out(bits))))
    })
}

/// Worst case of the Polya disk argument over a slope grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyaReport {
    #[serde(serialize_with = "json::rat")]
    pub radius: BigRational,
    pub disk: u64,
    pub blocked: usize,
    pub total: usize,
    /// Indices of slopes not blocked.
    pub unblocked: Vec<usize>,
    /// Smallest `radius - distance` over blocked slopes.
    pub worst_margin: Option<Enclosure>,
}

/// Rays with the given slopes against trees `(b n, a m)`, `n >= 1`, inside the disk of radius `N`.
///
/// The default radius is `ab / N`.
pub fn polya_baseline<R: Real>(c: &Constraint, big_n: u64, slopes: &[R], radius: Option<BigRational>) -> Result<PolyaReport> {
    if !c.is_homogeneous() {
        return Err(Error::pre("the disk baseline needs r = s = 0"));
    }
    if big_n < c.ab() {
        return Err(Error::pre("need N >= ab"));
    }
    let radius = radius.unwrap_or_else(|| BigRational::new(c.ab().into(), big_n.into()));
    let scene = OrchardScene::new(*c, RadiusModel::Uniform(radius.clone()), big_n, BigRational::zero(), DistanceMode::Euclidean)?.with_disk(ri(big_n))?;
    let mut blocked = 0;
    let mut unblocked = Vec::new();
    let mut worst: Option<Enclosure> = None;
    for (i, s) in slopes.iter().enumerate() {
        let d = min_blocking_radius(&scene, s)?;
        match d {
            Some(d) if d.hi_le(&radius) => {
                blocked += 1;
                let margin = d.neg().add_rat(&radius);
                worst = Some(match worst {
                    None => margin,
                    Some(w) => w.min(&margin),
                });
            }
            _ => unblocked.push(i),
        }
    }
    Ok(PolyaReport {
        radius,
        disk: big_n,
        blocked,
        total: slopes.len(),
        unblocked,
        worst_margin: worst,
    })
}

/// Largest depth accepted by [`render`].
pub const RENDER_CAP: u64 = 400;

fn fmt(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// SVG of the trees with `|y| <= depth`, the glade and a ray per slope.
pub fn render(scene: &OrchardScene, slopes: &[f64]) -> Result<String> {
    if scene.depth > RENDER_CAP {
        return Err(Error::pre(format!("depth above the render cap {RENDER_CAP}")));
    }
    let d = scene.depth as f64;
    let unit = 20.0;
    let (w, h) = ((d + 1.0) * unit, (2.0 * d + 2.0) * unit);
    let px = |x: f64| fmt((x + 0.5) * unit);
    let py = |y: f64| fmt((d + 1.0 - y) * unit);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt(w),
        fmt(h),
        fmt(w),
        fmt(h)
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, fmt(w), fmt(h));
    let g = rat_to_f64(&scene.glade_radius);
    if g > 0.0 {
        let _ = writeln!(
            out,
            r#"<circle class="glade" cx="{}" cy="{}" r="{}" fill="none" stroke="gray" stroke-dasharray="4 2"/>"#,
            px(0.0),
            py(0.0),
            fmt(g * unit)
        );
    }
    let _ = writeln!(out, r#"<g class="trees" fill="forestgreen">"#);
    for (x, y) in scene.trees(scene.depth) {
        let rho = rat_to_f64(&scene.radius(x));
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            px(x as f64),
            py(y.to_f64().unwrap_or(0.0)),
            fmt(rho * unit)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="rays" stroke="crimson" stroke-width="1">"#);
    for &s in slopes {
        // Clip the ray to |y| <= depth.
        let x_end = if s.abs() * d > d { d / s.abs() } else { d };
        let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, px(0.0), py(0.0), px(x_end), py(s * x_end));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<circle class="origin" cx="{}" cy="{}" r="2" fill="black"/>"#, px(0.0), py(0.0));
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotic::brute_hits;
    use crate::cf::RealSpec;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn odd() -> Constraint {
        Constraint::new(2, 2, 1, 1).unwrap()
    }

    #[test]
    fn odd_lattice_scene_blocks_sqrt2() {
        let scene = OrchardScene::new(odd(), RadiusModel::Asymptotic, 10_000, BigRational::zero(), DistanceMode::Euclidean).unwrap();
        let v = visibility(&scene, &RealSpec::sqrt(2).unwrap()).unwrap();
        match v.verdict {
            Verdict::BlockedBy {
                x, ref distance, ref radius, ..
            } => {
                assert!(x < 100);
                assert!(distance.hi_le(radius));
            }
            Verdict::Visible => panic!("sqrt 2 should be blocked"),
        }
    }

    #[test]
    fn two_thirds_is_visible_outside_the_glade() {
        let scene = OrchardScene::new(odd(), RadiusModel::Asymptotic, 10_000, rat(5, 1), DistanceMode::Vertical).unwrap();
        let v = visibility(&scene, &RealSpec::rational(2, 3).unwrap()).unwrap();
        assert_eq!(v.verdict, Verdict::Visible);
        assert_eq!(v.scanned, 5000);
        // Without the glade the tree at (1, 1) blocks: |2/3 - 1| <= 1.
        let open = OrchardScene::new(odd(), RadiusModel::Asymptotic, 10_000, BigRational::zero(), DistanceMode::Vertical).unwrap();
        assert!(matches!(
            visibility(&open, &RealSpec::rational(2, 3).unwrap()).unwrap().verdict,
            Verdict::BlockedBy { x: 1, .. }
        ));
    }

    #[test]
    fn horizontal_ray_misses_offset_rows() {
        // Rows y = 3m + 1 stay at distance >= 1 from the line y = 0.
        let c = Constraint::new(3, 1, 1, 0).unwrap();
        for mode in [DistanceMode::Vertical, DistanceMode::Euclidean] {
            let scene = OrchardScene::new(c, RadiusModel::Uniform(rat(99, 100)), 500, BigRational::zero(), mode).unwrap();
            assert_eq!(visibility(&scene, &RealSpec::rational(0, 1).unwrap()).unwrap().verdict, Verdict::Visible);
            let m = min_blocking_radius(&scene, &RealSpec::rational(0, 1).unwrap()).unwrap().unwrap();
            assert!(m.contains(&rat(1, 1)));
        }
    }

    #[test]
    fn origin_covering_scenes_are_rejected() {
        let c = Constraint::new(1, 1, 0, 0).unwrap();
        assert!(OrchardScene::new(c, RadiusModel::Uniform(rat(3, 2)), 10, BigRational::zero(), DistanceMode::Euclidean).is_err());
        assert!(OrchardScene::new(c, RadiusModel::Uniform(rat(1, 2)), 10, BigRational::zero(), DistanceMode::Euclidean).is_ok());
        // The glade removes the offending trees.
        assert!(OrchardScene::new(c, RadiusModel::Uniform(rat(3, 2)), 10, rat(2, 1), DistanceMode::Euclidean).is_ok());
    }

    #[test]
    fn min_radius_matches_visibility_and_vertical_oracle() {
        let x = RealSpec::sqrt(2).unwrap();
        let scene = OrchardScene::new(odd(), RadiusModel::Uniform(rat(1, 100)), 1000, BigRational::zero(), DistanceMode::Vertical).unwrap();
        let m = min_blocking_radius(&scene, &x).unwrap().unwrap();
        // Oracle: min over odd N <= 1000 of dist(N sqrt 2, 2Z + 1).
        let w = Window::build(&x, None, 128).unwrap();
        let mut best: Option<Enclosure> = None;
        for n in (1..=1000u64).step_by(2) {
            let (lo, hi, _) = w.distance(&BigInt::from(n), &BigInt::from(2), &BigInt::from(1));
            let e = enclosure(&lo, &hi, &w.den);
            best = Some(best.map_or(e.clone(), |b| b.min(&e)));
        }
        assert!(m.overlaps(&best.unwrap()));
        for rho in [m.lo() * rat(999, 1000), m.hi() * rat(1001, 1000)] {
            let s = OrchardScene {
                radius_model: RadiusModel::Uniform(rho.clone()),
                ..scene.clone()
            };
            let visible = visibility(&s, &x).unwrap().verdict == Verdict::Visible;
            assert_eq!(visible, m.lo_gt(&rho), "rho {rho}");
        }
        let shallow = OrchardScene { depth: 100, ..scene.clone() };
        let m2 = min_blocking_radius(&shallow, &x).unwrap().unwrap();
        assert!(m.certainly_le(&m2) || m.overlaps(&m2));
    }

    #[test]
    fn euclidean_is_vertical_over_stretch() {
        let x = RealSpec::sqrt(3).unwrap();
        let mk = |mode| OrchardScene::new(odd(), RadiusModel::Uniform(rat(1, 10)), 300, BigRational::zero(), mode).unwrap();
        let v = min_blocking_radius(&mk(DistanceMode::Vertical), &x).unwrap().unwrap();
        let e = min_blocking_radius(&mk(DistanceMode::Euclidean), &x).unwrap().unwrap();
        assert!((v.mid_f64() / e.mid_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_blocking_is_a_quarter_factor_hit() {
        let slopes = [
            RealSpec::sqrt(2).unwrap(),
            RealSpec::sqrt(3).unwrap(),
            RealSpec::sqrt(5).unwrap(),
            RealSpec::sqrt(7).unwrap(),
            RealSpec::golden(),
            RealSpec::surd(1, 7, 3).unwrap(),
            RealSpec::surd(-1, 5, 2).unwrap(),
            RealSpec::surd(2, 11, 5).unwrap(),
            RealSpec::surd(0, 13, 4).unwrap(),
            RealSpec::surd(3, 17, 7).unwrap(),
        ];
        let constraints = [odd(), Constraint::new(3, 4, 1, 2).unwrap()];
        for c in constraints {
            for x in &slopes {
                let scene = OrchardScene::new(c, RadiusModel::Asymptotic, 2000, BigRational::zero(), DistanceMode::Vertical).unwrap();
                let v = visibility(&scene, x).unwrap();
                let hits = brute_hits(x, &c, &rat(1, 4), 2000).unwrap();
                match v.verdict {
                    Verdict::BlockedBy { x: bx, y, .. } => {
                        let first = &hits[0];
                        assert_eq!(BigInt::from(bx), first.denominator, "{x}");
                        assert!(hits.iter().any(|h| h.denominator == BigInt::from(bx) && h.numerator == y));
                    }
                    Verdict::Visible => assert!(hits.is_empty()),
                }
            }
        }
    }

    #[test]
    fn polya_disk() {
        let c = Constraint::new(1, 1, 0, 0).unwrap();
        let grid: Vec<RealSpec> = (1..=100).map(|k| RealSpec::rational(k, 101).unwrap()).collect();
        let rep = polya_baseline(&c, 10, &grid, None).unwrap();
        assert_eq!(rep.blocked, 100);
        assert!(!rep.worst_margin.unwrap().lo().is_negative());
        let thin = polya_baseline(&c, 10, &grid, Some(rat(1, 100))).unwrap();
        assert!(!thin.unblocked.is_empty());
        // A lattice direction is blocked at distance 0.
        let diag = polya_baseline(&c, 10, &[RealSpec::rational(1, 1).unwrap()], None).unwrap();
        assert!(diag.worst_margin.unwrap().contains(&rat(1, 10)));
        assert!(polya_baseline(&odd(), 10, &grid, None).is_err());
    }

    #[test]
    fn render_counts_and_determinism() {
        let scene = OrchardScene::new(odd(), RadiusModel::Asymptotic, 30, BigRational::zero(), DistanceMode::Euclidean).unwrap();
        let svg = render(&scene, &[2f64.sqrt()]).unwrap();
        let trees = svg.split("<g class=\"trees\"").nth(1).unwrap().split("</g>").next().unwrap();
        assert_eq!(trees.matches("<circle").count(), 15 * 30);
        assert_eq!(svg, render(&scene, &[2f64.sqrt()]).unwrap());
        let empty = OrchardScene::new(
            Constraint::new(2, 50, 1, 40).unwrap(),
            RadiusModel::Asymptotic,
            30,
            BigRational::zero(),
            DistanceMode::Euclidean,
        )
        .unwrap();
        let svg = render(&empty, &[]).unwrap();
        assert_eq!(
            svg.split("<g class=\"trees\"")
                .nth(1)
                .unwrap()
                .split("</g>")
                .next()
                .unwrap()
                .matches("<circle")
                .count(),
            0
        );
        let sector = OrchardScene::new(odd(), RadiusModel::Uniform(rat(1, 5)), 30, BigRational::zero(), DistanceMode::Euclidean)
            .unwrap()
            .with_sector(rat(1, 2))
            .unwrap();
        for (x, y) in sector.trees(30) {
            assert!(ri(y.abs()) <= rat(1, 2) * ri(x));
        }
        assert!(visibility(&sector, &RealSpec::sqrt(2).unwrap()).is_err());
    }
}
