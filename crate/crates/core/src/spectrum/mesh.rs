//! Unstructured triangle meshes of convex polygons.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point};

/// Interior seed points closer than this multiple of `h` to `∂Ω` are dropped.
const BOUNDARY_CLEARANCE: f64 = 0.6;
/// Triangles with an edge longer than this multiple of `h` get a centroid.
const LONG_EDGE: f64 = 1.4;
const MAX_REFINE_ROUNDS: usize = 10;
/// Triangles with area below this multiple of `h²` are discarded as slivers.
const SLIVER_AREA: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex-index triples.
    pub triangles: Vec<[usize; 3]>,
    pub h: f64,
    /// Vertices `0..n_boundary` lie on `∂Ω`.
    pub n_boundary: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshQuality {
    /// Smallest interior angle, in degrees.
    pub min_angle_deg: f64,
    pub max_edge: f64,
    pub min_area: f64,
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a)
}

impl TriangleMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn quality(&self) -> MeshQuality {
        let mut q = MeshQuality { min_angle_deg: 180.0, max_edge: 0.0, min_area: f64::INFINITY };
        for t in 0..self.n_triangles() {
            let p = self.corners(t);
            q.min_area = q.min_area.min(signed_area(p[0], p[1], p[2]));
            for i in 0..3 {
                let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
                q.max_edge = q.max_edge.max(a.dist(b));
                let (u, v) = (b - a, c - a);
                let angle = u.cross(v).abs().atan2(u.dot(v)).to_degrees();
                q.min_angle_deg = q.min_angle_deg.min(angle);
            }
        }
        q
    }

    /// Edges used by exactly one triangle, as ordered vertex pairs.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(usize, usize), (usize, (usize, usize))> = HashMap::new();
        for tri in &self.triangles {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let e = count.entry((a.min(b), a.max(b))).or_insert((0, (a, b)));
                e.0 += 1;
            }
        }
        let mut edges: Vec<_> = count.into_values().filter(|&(n, _)| n == 1).map(|(_, e)| e).collect();
        edges.sort_unstable();
        edges
    }

    /// Red refinement: every triangle is split into four through its edge
    /// midpoints, halving `h`. The P1 space of the result contains that of
    /// `self`. Boundary vertices are renumbered to come first.
    pub fn refine_uniform(&self) -> TriangleMesh {
        let boundary: std::collections::HashSet<(usize, usize)> =
            self.boundary_edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        let mut vertices = self.vertices.clone();
        let mut on_boundary: Vec<bool> = (0..vertices.len()).map(|i| i < self.n_boundary).collect();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>, on_boundary: &mut Vec<bool>| {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                vertices.push((vertices[a] + vertices[b]) * 0.5);
                on_boundary.push(boundary.contains(&key));
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices, &mut on_boundary);
            let bc = mid(b, c, &mut vertices, &mut on_boundary);
            let ca = mid(c, a, &mut vertices, &mut on_boundary);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        let order: Vec<usize> = (0..vertices.len())
            .filter(|&i| on_boundary[i])
            .chain((0..vertices.len()).filter(|&i| !on_boundary[i]))
            .collect();
        let mut new_index = vec![0; vertices.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        TriangleMesh {
            vertices: order.iter().map(|&i| vertices[i]).collect(),
            triangles: triangles.into_iter().map(|t| t.map(|i| new_index[i])).collect(),
            h: 0.5 * self.h,
            n_boundary: on_boundary.iter().filter(|&&b| b).count(),
        }
    }

    /// OFF text: header, counts, vertex lines `x y 0`, face lines `3 i j k`.
    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        let _ = writeln!(s, "{} {} 0", self.n_vertices(), self.n_triangles());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {} 0", v.x, v.y);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

/// Largest distance from the kept chain of boundary vertices to `∂Ω`.
fn boundary_tolerance(h: f64) -> f64 {
    (h * h).min(0.05 * h)
}

/// Indices of the polygon vertices kept on the mesh boundary. Runs of nearly
/// collinear short edges (fine polygonal approximations of curves) are
/// replaced by chords of length about `h` deviating at most
/// [`boundary_tolerance`] from the dropped vertices.
fn kept_corners(p: &ConvexPolygon, h: f64) -> Vec<usize> {
    let v = p.vertices();
    let n = v.len();
    let tol = boundary_tolerance(h);
    let exterior = |i: usize| {
        let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        let (e0, e1) = (b - a, c - b);
        e0.cross(e1).atan2(e0.dot(e1))
    };
    // Start at the sharpest corner so that genuine corners are kept.
    let start = (0..n).fold(0, |best, i| if exterior(i) > exterior(best) + 1e-12 { i } else { best });
    let chord_ok = |i: usize, j: usize| {
        let (a, b) = (v[i % n], v[j % n]);
        let len = a.dist(b);
        if len > h {
            return false;
        }
        let dir = (b - a) * (1.0 / len);
        (i + 1..j).all(|k| dir.cross(v[k % n] - a).abs() <= tol)
    };
    let mut kept = vec![start];
    let mut i = start;
    let end = start + n;
    while i < end {
        let mut j = i + 1;
        while j < end && chord_ok(i, j + 1) {
            j += 1;
        }
        if j < end {
            kept.push(j % n);
        }
        i = j;
    }
    // A short closing chord is merged into its predecessor when possible.
    if kept.len() > 3 {
        let last = *kept.last().unwrap();
        if v[last].dist(v[start]) < 0.5 * h {
            let prev = kept[kept.len() - 2];
            let prev_pos = if prev < start { prev + n } else { prev };
            let (a, b) = (v[prev], v[start]);
            let len = a.dist(b);
            let dir = (b - a) * (1.0 / len);
            if len <= 1.5 * h && (prev_pos + 1..end).all(|k| dir.cross(v[k % n] - a).abs() <= tol) {
                kept.pop();
            }
        }
    }
    kept
}

fn boundary_points(p: &ConvexPolygon, h: f64) -> Vec<Point> {
    let v = p.vertices();
    let kept = kept_corners(p, h);
    let mut pts = Vec::new();
    for (idx, &i) in kept.iter().enumerate() {
        let (a, b) = (v[i], v[kept[(idx + 1) % kept.len()]]);
        let k = ((a.dist(b) / h) - 1e-9).ceil().max(1.0) as usize;
        pts.extend((0..k).map(|t| a + (b - a) * (t as f64 / k as f64)));
    }
    pts
}

fn interior_points(p: &ConvexPolygon, h: f64) -> Vec<Point> {
    // The grid is anchored at the centroid, which is always a seed.
    let bb = p.bounding_box();
    let c = p.centroid();
    let dy = h * 3f64.sqrt() / 2.0;
    let j_lo = ((bb.min.y - c.y) / dy).floor() as i64;
    let j_hi = ((bb.max.y - c.y) / dy).ceil() as i64;
    let i_lo = ((bb.min.x - c.x) / h).floor() as i64 - 1;
    let i_hi = ((bb.max.x - c.x) / h).ceil() as i64 + 1;
    let mut pts = Vec::new();
    for j in j_lo..=j_hi {
        let y = c.y + j as f64 * dy;
        let offset = if j.rem_euclid(2) == 1 { 0.5 * h } else { 0.0 };
        for i in i_lo..=i_hi {
            let q = Point::new(c.x + offset + i as f64 * h, y);
            if p.signed_distance(q) >= BOUNDARY_CLEARANCE * h {
                pts.push(q);
            }
        }
    }
    pts
}

fn triangulate(points: &[Point], h: f64) -> Result<Vec<[usize; 3]>> {
    let input: Vec<delaunator::Point> = points.iter().map(|p| delaunator::Point { x: p.x, y: p.y }).collect();
    let tri = delaunator::triangulate(&input);
    if tri.triangles.is_empty() {
        return Err(Error::Mesh("Delaunay triangulation produced no triangles".into()));
    }
    let min_area = SLIVER_AREA * h * h;
    let mut out = Vec::with_capacity(tri.triangles.len() / 3);
    for t in tri.triangles.chunks_exact(3) {
        let (a, b, c) = (t[0], t[1], t[2]);
        let area = signed_area(points[a], points[b], points[c]);
        if area.abs() < min_area {
            continue;
        }
        out.push(if area > 0.0 { [a, b, c] } else { [a, c, b] });
    }
    Ok(out)
}

/// Triangulates, then inserts the centroid of every triangle with an edge
/// longer than `1.4h` until none is left.
fn refine(points: &mut Vec<Point>, h: f64) -> Result<Vec<[usize; 3]>> {
    for _ in 0..MAX_REFINE_ROUNDS {
        let tris = triangulate(points, h)?;
        let before = points.len();
        for t in &tris {
            let [a, b, c] = t.map(|i| points[i]);
            if a.dist(b).max(b.dist(c)).max(c.dist(a)) > LONG_EDGE * h {
                points.push((a + b + c) * (1.0 / 3.0));
            }
        }
        if points.len() == before {
            return Ok(tris);
        }
    }
    Err(Error::Mesh(format!("edge-length refinement did not settle in {MAX_REFINE_ROUNDS} rounds")))
}

/// Moves each interior vertex to the area-weighted mean of the centroids of
/// its incident triangles.
fn lloyd_pass(points: &mut [Point], triangles: &[[usize; 3]], n_boundary: usize) {
    let mut acc = vec![(Point::new(0.0, 0.0), 0.0); points.len()];
    for t in triangles {
        let [a, b, c] = t.map(|i| points[i]);
        let area = signed_area(a, b, c);
        let centroid = (a + b + c) * (1.0 / 3.0);
        for &i in t {
            acc[i].0 = acc[i].0 + centroid * area;
            acc[i].1 += area;
        }
    }
    for (i, p) in points.iter_mut().enumerate().skip(n_boundary) {
        if acc[i].1 > 0.0 {
            *p = acc[i].0 * (1.0 / acc[i].1);
        }
    }
}

/// Triangulates `p` with target edge length `h`.
///
/// Boundary vertices subdivide the polygon edges into pieces of length at
/// most `h` (fine runs of nearly collinear edges are first coarsened to
/// chords within `min(h², h/20)` of `∂Ω`); interior vertices come from a triangular grid of spacing `h` kept
/// `0.6h` away from the boundary, anchored at the centroid. Triangles with
/// overlong edges receive their centroid as an extra vertex, and one smoothing
/// pass of the interior vertices precedes the final triangulation.
pub fn mesh_polygon(p: &ConvexPolygon, h: f64) -> Result<TriangleMesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Mesh(format!("mesh size must be positive, got {h}")));
    }
    if h >= p.diameter() / 2.0 {
        return Err(Error::Mesh(format!(
            "mesh size {h} must be below half the diameter {}",
            p.diameter()
        )));
    }
    if p.area() < h * h {
        return Err(Error::Mesh(format!("domain area {} is below h² = {}", p.area(), h * h)));
    }
    let mut vertices = boundary_points(p, h);
    let n_boundary = vertices.len();
    vertices.extend(interior_points(p, h));

    let first = refine(&mut vertices, h)?;
    lloyd_pass(&mut vertices, &first, n_boundary);
    let triangles = refine(&mut vertices, h)?;

    let mut used = vec![false; vertices.len()];
    for t in &triangles {
        for &i in t {
            used[i] = true;
        }
    }
    if let Some(i) = used.iter().position(|&u| !u) {
        return Err(Error::Mesh(format!("vertex {i} is not part of any triangle")));
    }
    Ok(TriangleMesh { vertices, triangles, h, n_boundary })
}
