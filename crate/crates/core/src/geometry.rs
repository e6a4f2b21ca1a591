//! Convex polygons and the radial description of `B_r(x) ∩ Ω`.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for collinear vertices and for boundary membership.
pub const GEOMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(omega: f64) -> Self {
        Self::new(omega.cos(), omega.sin())
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Axis-aligned box `[min.x, max.x] × [min.y, max.y]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn translate(&self, v: Point) -> Self {
        Self::new(self.min + v, self.max + v)
    }
}

/// Outward unit normal `n` and offset `c`; the closed half-plane is `n·y ≤ c`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct HalfPlane {
    normal: Point,
    offset: f64,
}

/// A bounded convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    area: f64,
    planes: Vec<HalfPlane>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DomainFile {
    Object { vertices: Vec<Point> },
    Bare(Vec<Point>),
}

#[derive(Serialize)]
struct DomainFileOut<'a> {
    vertices: &'a [Point],
}

impl ConvexPolygon {
    /// Validates and wraps a counterclockwise vertex list.
    ///
    /// Collinear vertices are allowed up to [`GEOMETRY_TOL`] relative to the
    /// adjacent edge lengths; repeated vertices, clockwise order, reflex
    /// corners and self-winding are rejected.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("need at least 3 vertices, got {n}")));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex coordinate".into()));
        }
        let scale = vertices.iter().map(|p| p.x.abs().max(p.y.abs())).fold(0.0, f64::max).max(1.0);
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i].dist(vertices[j]) <= GEOMETRY_TOL * scale {
                    return Err(Error::InvalidPolygon(format!("vertices {i} and {j} coincide")));
                }
            }
        }

        let area2: f64 = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
        if area2 <= 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "signed area {} is not positive (vertices must be counterclockwise)",
                0.5 * area2
            )));
        }

        let mut turning = 0.0;
        for i in 0..n {
            let e0 = vertices[(i + 1) % n] - vertices[i];
            let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            let c = e0.cross(e1);
            if c < -GEOMETRY_TOL * e0.norm() * e1.norm() {
                return Err(Error::InvalidPolygon(format!("reflex corner at vertex {}", (i + 1) % n)));
            }
            turning += c.atan2(e0.dot(e1));
        }
        if (turning - TAU).abs() > 1e-6 {
            return Err(Error::InvalidPolygon(format!(
                "boundary winds {:.3} turns; a convex polygon winds exactly once",
                turning / TAU
            )));
        }

        let planes = (0..n)
            .map(|i| {
                let a = vertices[i];
                let e = vertices[(i + 1) % n] - a;
                let len = e.norm();
                let normal = Point::new(e.y / len, -e.x / len);
                HalfPlane { normal, offset: normal.dot(a) }
            })
            .collect();

        Ok(Self { vertices, area: 0.5 * area2, planes })
    }

    /// Convex hull (Andrew's monotone chain) of arbitrary points, dropping
    /// collinear boundary points.
    pub fn convex_hull(points: &[Point]) -> Result<Self> {
        let mut pts: Vec<Point> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::InvalidPolygon("hull needs at least 3 distinct points".into()));
        }
        let turn = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
        let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
        let mut floor = 2;
        for (i, &p) in pts.iter().chain(pts.iter().rev().skip(1)).enumerate() {
            if i == pts.len() {
                // The upper chain must never pop back into the finished lower one.
                floor = hull.len() + 1;
            }
            while hull.len() >= floor && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        Self::new(hull)
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        Self::new(vec![
            Point::new(0.0, 0.0),
            Point::new(width, 0.0),
            Point::new(width, height),
            Point::new(0.0, height),
        ])
    }

    /// Regular `n`-gon inscribed in the circle of radius `circumradius`
    /// about `center`, with a vertex at angle `phase`.
    pub fn regular(n: usize, circumradius: f64, center: Point, phase: f64) -> Result<Self> {
        let verts = (0..n)
            .map(|i| center + Point::from_angle(phase + TAU * i as f64 / n as f64) * circumradius)
            .collect();
        Self::new(verts)
    }

    /// Regular hexagon with the given side, centered at the origin, with a
    /// vertex on the positive x-axis.
    pub fn hexagon(side: f64) -> Result<Self> {
        Self::regular(6, side, Point::new(0.0, 0.0), 0.0)
    }

    pub fn equilateral_triangle(side: f64) -> Result<Self> {
        Self::new(vec![
            Point::new(0.0, 0.0),
            Point::new(side, 0.0),
            Point::new(0.5 * side, 0.5 * 3f64.sqrt() * side),
        ])
    }

    /// `n`-gon approximation of the disk of radius `radius` at the origin.
    pub fn disk(radius: f64, n: usize) -> Result<Self> {
        Self::regular(n, radius, Point::new(0.0, 0.0), 0.0)
    }

    /// Parses `{"vertices": [[x, y], ...]}` or a bare `[[x, y], ...]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: DomainFile = serde_json::from_str(text)?;
        match parsed {
            DomainFile::Object { vertices } | DomainFile::Bare(vertices) => Self::new(vertices),
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DomainFileOut { vertices: &self.vertices }).expect("points serialize")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let w = a.cross(b);
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        Point::new(cx / (6.0 * self.area), cy / (6.0 * self.area))
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        BoundingBox::new(min, max)
    }

    pub fn translate(&self, v: Point) -> Self {
        Self::new(self.vertices.iter().map(|&p| p + v).collect()).expect("translation keeps validity")
    }

    /// Distance from `x` to the boundary, positive inside and negative
    /// outside (exact inside; a lower bound on the distance outside).
    pub fn signed_distance(&self, x: Point) -> f64 {
        self.planes.iter().map(|h| h.offset - h.normal.dot(x)).fold(f64::INFINITY, f64::min)
    }

    /// Membership in the closed polygon, with boundary points (and points
    /// within [`GEOMETRY_TOL`] of it) counted as inside.
    pub fn contains(&self, x: Point) -> bool {
        self.signed_distance(x) >= -GEOMETRY_TOL
    }

    /// Distance from `x` along the unit direction `omega` to `∂Ω`.
    pub fn ray_exit_distance(&self, x: Point, omega: Point) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("point ({}, {}) lies outside the polygon", x.x, x.y)));
        }
        if (omega.norm() - 1.0).abs() > GEOMETRY_TOL {
            return Err(Error::Domain(format!("direction has norm {}, expected 1", omega.norm())));
        }
        Ok(self.exit_distance_unchecked(x, omega))
    }

    pub(crate) fn exit_distance_unchecked(&self, x: Point, omega: Point) -> f64 {
        self.planes
            .iter()
            .filter_map(|h| {
                let along = h.normal.dot(omega);
                (along > 0.0).then(|| ((h.offset - h.normal.dot(x)) / along).max(0.0))
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `R(ω) = min(r, ray_exit_distance(x, ω))` on the uniform grid
    /// `ω_i = 2πi / n_angles`.
    pub fn radial_cap(&self, x: Point, r: f64, n_angles: usize) -> Result<RadialCap> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("cap radius must be positive, got {r}")));
        }
        if n_angles < 8 {
            return Err(Error::Domain(format!("need at least 8 angles, got {n_angles}")));
        }
        if !self.contains(x) {
            return Err(Error::Domain(format!("point ({}, {}) lies outside the polygon", x.x, x.y)));
        }
        let samples = (0..n_angles)
            .map(|i| {
                let omega = TAU * i as f64 / n_angles as f64;
                (omega, self.exit_distance_unchecked(x, Point::from_angle(omega)).min(r))
            })
            .collect();
        Ok(RadialCap { center: x, r, samples })
    }

    /// Sorted angles in `[0, 2π)` where the radial function of
    /// `B_r(x) ∩ Ω` may fail to be smooth: directions of vertices strictly
    /// inside the disk and crossings of the circle `|y − x| = r` with `∂Ω`.
    /// Between consecutive breakpoints `R(ω)` is either the constant `r` or the
    /// distance to a single edge line.
    pub fn cap_breakpoints(&self, x: Point, r: f64) -> Vec<f64> {
        let wrap = |a: f64| {
            let w = a.rem_euclid(TAU);
            if w >= TAU { 0.0 } else { w }
        };
        let mut angles = Vec::new();
        for &v in &self.vertices {
            let d = v - x;
            let len = d.norm();
            if len > GEOMETRY_TOL && len < r {
                angles.push(wrap(d.y.atan2(d.x)));
            }
        }
        for (a, b) in self.edges() {
            // |a + s(b − a) − x|² = r²
            let e = b - a;
            let f = a - x;
            let qa = e.dot(e);
            let qb = 2.0 * f.dot(e);
            let qc = f.dot(f) - r * r;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            for s in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if (-1e-14..=1.0 + 1e-14).contains(&s) {
                    let p = a + e * s - x;
                    if p.norm() > GEOMETRY_TOL {
                        angles.push(wrap(p.y.atan2(p.x)));
                    }
                }
            }
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        if angles.len() > 1 && (TAU - angles[angles.len() - 1] + angles[0]) < 1e-13 {
            angles.pop();
        }
        angles
    }
}

/// Samples of the radial function of `B_r(center) ∩ Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialCap {
    pub center: Point,
    pub r: f64,
    /// `(ω, R(ω))` pairs.
    pub samples: Vec<(f64, f64)>,
}

impl RadialCap {
    /// Whether `y` lies in the star-shaped region `{center + ρω : ρ < R(ω)}`,
    /// reading `R` from the nearest sample in angle.
    pub fn covers(&self, y: Point) -> bool {
        let d = y - self.center;
        let n = self.samples.len();
        let omega = d.y.atan2(d.x).rem_euclid(TAU);
        let idx = ((omega / TAU * n as f64).round() as usize) % n;
        d.norm() < self.samples[idx].1
    }
}
