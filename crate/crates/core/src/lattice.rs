//! The triangular lattice `Γ = {n₁γ₁ + n₂γ₂}`, `γ₁ = (2r, 0)`, `γ₂ = (r, √3 r)`,
//! and the shift search that packs at least `|Ω| / (2√3 r²)` of its points
//! into a domain.
//!
//! The count `#(Ω ∩ (Γ + b))` averages to exactly `|Ω| / |cell|` over shifts
//! `b` in the fundamental cell, so some shift meets the average. The search
//! scans a grid of shifts in cell coordinates and keeps the best one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, ConvexPolygon, Point};

/// Initial shift grid resolution per cell direction.
pub const INITIAL_GRID: usize = 32;
/// Number of ×2 grid refinements before giving up.
pub const MAX_REFINEMENTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangularLattice {
    r: f64,
    pub shift: Point,
}

impl TriangularLattice {
    pub fn new(r: f64) -> Result<Self> {
        Self::with_shift(r, Point::default())
    }

    pub fn with_shift(r: f64, shift: Point) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("lattice spacing parameter must be positive, got {r}")));
        }
        Ok(Self { r, shift })
    }

    pub fn shifted(&self, shift: Point) -> Self {
        Self { r: self.r, shift }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gamma1(&self) -> Point {
        Point::new(2.0 * self.r, 0.0)
    }

    pub fn gamma2(&self) -> Point {
        Point::new(self.r, 3f64.sqrt() * self.r)
    }

    /// `|γ₁ × γ₂| = 2√3 r²`.
    pub fn cell_area(&self) -> f64 {
        self.gamma1().cross(self.gamma2()).abs()
    }

    pub fn point(&self, n1: i64, n2: i64) -> Point {
        self.gamma1() * n1 as f64 + self.gamma2() * n2 as f64 + self.shift
    }

    /// Maps cell coordinates `t ∈ [0, 1)²` to the shift `t₁γ₁ + t₂γ₂`.
    pub fn cell_shift(&self, t1: f64, t2: f64) -> Point {
        self.gamma1() * t1 + self.gamma2() * t2
    }

    /// All lattice points in the closed box.
    pub fn points_in_box(&self, bbox: &BoundingBox) -> Vec<Point> {
        let row = 3f64.sqrt() * self.r;
        let lo2 = ((bbox.min.y - self.shift.y) / row).floor() as i64 - 1;
        let hi2 = ((bbox.max.y - self.shift.y) / row).ceil() as i64 + 1;
        let mut out = Vec::new();
        for n2 in lo2..=hi2 {
            let x0 = self.shift.x + self.r * n2 as f64;
            let lo1 = ((bbox.min.x - x0) / (2.0 * self.r)).floor() as i64 - 1;
            let hi1 = ((bbox.max.x - x0) / (2.0 * self.r)).ceil() as i64 + 1;
            for n1 in lo1..=hi1 {
                let p = self.point(n1, n2);
                if bbox.contains(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Lattice points lying in the closed polygon.
    pub fn points_in_domain(&self, p: &ConvexPolygon) -> Vec<Point> {
        self.points_in_box(&p.bounding_box()).into_iter().filter(|&x| p.contains(x)).collect()
    }
}

/// `#(Ω ∩ (Γ + b))` for the lattice basis of `lat` and shift `b` (the
/// lattice's own shift is replaced by `b`).
pub fn count_in_domain(lat: &TriangularLattice, p: &ConvexPolygon, b: Point) -> usize {
    lat.shifted(b).points_in_domain(p).len()
}

/// Points of a shifted lattice packed into a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingResult {
    pub points: Vec<Point>,
    pub r: f64,
    pub b: Point,
    pub count: usize,
    /// `|Ω| / (2√3 r²)`.
    pub guaranteed_min: f64,
}

impl PackingResult {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        min_pairwise_distance(&self.points)
    }
}

pub fn min_pairwise_distance(points: &[Point]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.min(points[i].dist(points[j]));
        }
    }
    d
}

/// `|Ω| / (2√3 r²)`.
pub fn guaranteed_count(area: f64, r: f64) -> f64 {
    area / (2.0 * 3f64.sqrt() * r * r)
}

/// The smallest integer count the averaging argument forces: `ceil(m)`, or
/// `m` itself when `m` is an integer.
pub fn required_count(guaranteed_min: f64) -> usize {
    guaranteed_min.ceil() as usize
}

/// Searches shifts `b = t₁γ₁ + t₂γ₂` on an `N × N` grid of `t ∈ [0, 1)²`
/// (`N = 32`, doubled up to four times) for the largest count, ties broken by
/// the lexicographically smallest `(t₁, t₂)`. Succeeds once the best count
/// reaches [`required_count`].
///
/// When the grid never sees the required count and that count is at most one
/// (tiny domains), the shift placing a lattice point at the centroid is used.
pub fn find_shift(p: &ConvexPolygon, r: f64) -> Result<PackingResult> {
    let lat = TriangularLattice::new(r)?;
    let guaranteed_min = guaranteed_count(p.area(), r);
    let required = required_count(guaranteed_min);

    let mut n = INITIAL_GRID;
    let mut best_seen = 0;
    for _ in 0..=MAX_REFINEMENTS {
        let (count, t1, t2) = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let (t1, t2) = (i as f64 / n as f64, j as f64 / n as f64);
                (count_in_domain(&lat, p, lat.cell_shift(t1, t2)), i, j)
            })
            .reduce(
                || (0, usize::MAX, usize::MAX),
                |a, b| match a.0.cmp(&b.0) {
                    std::cmp::Ordering::Greater => a,
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Equal => {
                        if (a.1, a.2) <= (b.1, b.2) {
                            a
                        } else {
                            b
                        }
                    }
                },
            );
        best_seen = best_seen.max(count);
        if count >= required && count > 0 {
            let b = lat.cell_shift(t1 as f64 / n as f64, t2 as f64 / n as f64);
            let points = lat.shifted(b).points_in_domain(p);
            return Ok(PackingResult { count: points.len(), points, r, b, guaranteed_min });
        }
        n *= 2;
    }

    if required <= 1 {
        let c = p.centroid();
        let (t1, t2) = cell_coordinates(&lat, c);
        let b = lat.cell_shift(t1, t2);
        let points = lat.shifted(b).points_in_domain(p);
        if points.len() >= required {
            return Ok(PackingResult { count: points.len(), points, r, b, guaranteed_min });
        }
    }

    Err(Error::Computation(format!(
        "no shift on a {}×{} grid reaches the guaranteed count {required} \
         (|Ω| = {}, r = {r}, best count {best_seen}); this indicates a counting bug",
        n / 2,
        n / 2,
        p.area()
    )))
}

/// Cell coordinates of `x` reduced to `[0, 1)²`.
fn cell_coordinates(lat: &TriangularLattice, x: Point) -> (f64, f64) {
    // x = t₁γ₁ + t₂γ₂ with γ₁ = (2r, 0), γ₂ = (r, √3 r)
    let t2 = x.y / (3f64.sqrt() * lat.r());
    let t1 = (x.x - lat.r() * t2) / (2.0 * lat.r());
    (t1.rem_euclid(1.0), t2.rem_euclid(1.0))
}

/// The winning packing from [`find_shift`], with the `2r` separation checked.
pub fn packing_points(p: &ConvexPolygon, r: f64) -> Result<PackingResult> {
    let packing = find_shift(p, r)?;
    let d = packing.min_pairwise_distance();
    if d < 2.0 * r * (1.0 - 1e-12) {
        return Err(Error::Computation(format!("packed points are {d} apart, closer than 2r = {}", 2.0 * r)));
    }
    if let Some(x) = packing.points.iter().find(|&&x| !p.contains(x)) {
        return Err(Error::Computation(format!("packed point ({}, {}) left the domain", x.x, x.y)));
    }
    Ok(packing)
}
