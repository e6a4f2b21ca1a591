//! Radial Bessel test functions and their Rayleigh quotients.
//!
//! The profile is `F(ρ) = ρ^{1−d/2} J_{d/2−1}(ρ j_{d/2−1} / r)` for `ρ < r` and
//! zero beyond. Centered at a point `x` of a convex domain, its Rayleigh
//! quotient over `B_r(x) ∩ Ω` is at most `j²/r²`, with equality when the whole
//! disk lies in `Ω`. Functions on centers `2r` apart have disjoint supports,
//! so the largest individual quotient bounds the quotient of every linear
//! combination, and therefore bounds `μ_l` for `l` centers.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point};
use crate::lattice::min_pairwise_distance;
use crate::quadrature::GaussLegendre;
use crate::special_functions::{self as sf, bessel_zero, gamma_fn};

pub const DEFAULT_N_ANGLES: usize = 256;
pub const DEFAULT_N_RADIAL: usize = 128;
/// Relative slack on `quotient ≤ j²/r²` absorbing quadrature error.
pub const CERTIFICATE_RTOL: f64 = 1e-8;

/// The test profile `F` in dimension `d` with support radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestProfile {
    pub d: u32,
    pub r: f64,
    pub nu: f64,
    pub jnu: f64,
}

impl TestProfile {
    pub fn new(d: u32, r: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("profile needs dimension d ≥ 2, got {d}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("support radius must be positive, got {r}")));
        }
        let nu = 0.5 * d as f64 - 1.0;
        Ok(Self { d, r, nu, jnu: bessel_zero(nu)? })
    }

    /// The planar profile `J₀(ρ j₀ / r)`.
    pub fn planar(r: f64) -> Result<Self> {
        Self::new(2, r)
    }

    /// `j²/r²`, the bound on every Rayleigh quotient.
    pub fn eigenvalue_bound(&self) -> f64 {
        (self.jnu / self.r).powi(2)
    }

    fn wavenumber(&self) -> f64 {
        self.jnu / self.r
    }

    /// `(F(ρ), F'(ρ))`, both zero for `ρ ≥ r`.
    pub fn eval(&self, rho: f64) -> (f64, f64) {
        if rho >= self.r {
            return (0.0, 0.0);
        }
        let k = self.wavenumber();
        if rho <= 0.0 {
            // lim ρ^{-ν} J_ν(kρ) = k^ν / (2^ν Γ(ν+1))
            let f0 = (0.5 * k).powf(self.nu) / gamma_fn(self.nu + 1.0).expect("ν ≥ 0");
            return (f0, 0.0);
        }
        let e = sf::eval(self.nu, k * rho);
        let scale = rho.powf(-self.nu);
        (scale * e.j, -k * scale * e.j_next)
    }

    /// Per-ray integrals `(∫₀ᴿ F'² ρ^{d−1} dρ, ∫₀ᴿ F² ρ^{d−1} dρ)` with an
    /// `n`-point Gauss–Legendre rule.
    pub fn ray_integrals(&self, radius: f64, rule: &GaussLegendre) -> (f64, f64) {
        let radius = radius.min(self.r);
        if radius <= 0.0 {
            return (0.0, 0.0);
        }
        let power = self.d as i32 - 1;
        rule.mapped(0.0, radius).fold((0.0, 0.0), |(num, den), (rho, w)| {
            let (f, df) = self.eval(rho);
            let jac = rho.powi(power);
            (num + w * df * df * jac, den + w * f * f * jac)
        })
    }
}

/// `(F, F')` at `rho`.
pub fn profile_eval(tp: &TestProfile, rho: f64) -> (f64, f64) {
    tp.eval(rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayleighQuotient {
    pub numerator: f64,
    pub denominator: f64,
    pub quotient: f64,
}

/// Angular nodes and weights for `∫_{S¹} g(ω) dω` adapted to `B_r(x) ∩ Ω`.
///
/// With no breakpoints the radial function is constant and the periodic
/// trapezoid rule on `n_angles` points is exact. Otherwise each arc between
/// breakpoints, on which `R(ω)` is smooth, gets its own Gauss–Legendre rule
/// with a share of `n_angles` proportional to its length (at least 8 nodes).
pub fn angular_rule(p: &ConvexPolygon, center: Point, r: f64, n_angles: usize) -> Vec<(f64, f64)> {
    let breaks = p.cap_breakpoints(center, r);
    if breaks.is_empty() {
        let w = TAU / n_angles as f64;
        return (0..n_angles).map(|i| (w * i as f64, w)).collect();
    }
    let mut nodes = Vec::with_capacity(n_angles + 8 * breaks.len());
    for (i, &a) in breaks.iter().enumerate() {
        let b = if i + 1 < breaks.len() { breaks[i + 1] } else { breaks[0] + TAU };
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let m = ((n_angles as f64 * len / TAU).ceil() as usize).max(8);
        nodes.extend(GaussLegendre::new(m).mapped(a, b));
    }
    nodes
}

/// Rayleigh quotient of the profile centered at `center`, integrated in
/// polar coordinates over `B_r(center) ∩ Ω` (planar profiles only).
pub fn rayleigh_quotient(
    tp: &TestProfile,
    p: &ConvexPolygon,
    center: Point,
    n_angles: usize,
    n_radial: usize,
) -> Result<RayleighQuotient> {
    if tp.d != 2 {
        return Err(Error::Precondition(format!("Rayleigh quotients are computed for d = 2 only, got d = {}", tp.d)));
    }
    if n_angles < 64 || n_radial < 64 {
        return Err(Error::Precondition(format!(
            "need n_angles ≥ 64 and n_radial ≥ 64, got {n_angles} and {n_radial}"
        )));
    }
    if !p.contains(center) {
        return Err(Error::Domain(format!("center ({}, {}) lies outside the domain", center.x, center.y)));
    }
    let radial = GaussLegendre::new(n_radial);
    let (numerator, denominator) = angular_rule(p, center, tp.r, n_angles)
        .into_iter()
        .map(|(omega, w)| {
            let reach = p.exit_distance_unchecked(center, Point::from_angle(omega)).min(tp.r);
            let (num, den) = tp.ray_integrals(reach, &radial);
            (w * num, w * den)
        })
        .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    if denominator < 1e-14 {
        return Err(Error::Precondition(format!(
            "test function support is degenerate (∫F² = {denominator:e})"
        )));
    }
    Ok(RayleighQuotient { numerator, denominator, quotient: numerator / denominator })
}

/// Test functions on centers pairwise at least `2r` apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionPack {
    pub profile: TestProfile,
    pub centers: Vec<Point>,
    pub quotients: Vec<f64>,
}

impl TestFunctionPack {
    /// Computes the quotient of every center (in parallel).
    pub fn build(
        profile: TestProfile,
        p: &ConvexPolygon,
        centers: Vec<Point>,
        n_angles: usize,
        n_radial: usize,
    ) -> Result<Self> {
        check_separation(&centers, profile.r)?;
        let quotients = centers
            .par_iter()
            .map(|&c| rayleigh_quotient(&profile, p, c, n_angles, n_radial).map(|q| q.quotient))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { profile, centers, quotients })
    }

    pub fn r(&self) -> f64 {
        self.profile.r
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

fn check_separation(centers: &[Point], r: f64) -> Result<()> {
    let d = min_pairwise_distance(centers);
    if d < 2.0 * r * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "centers are {d} apart, closer than 2r = {}; supports would overlap",
            2.0 * r
        )));
    }
    Ok(())
}

/// The largest quotient of the pack: an upper bound for `μ_l`, `l` the number
/// of centers. Fails if it exceeds `j²/r²` beyond quadrature slack.
pub fn certified_upper_bound(pack: &TestFunctionPack) -> Result<f64> {
    if pack.is_empty() {
        return Err(Error::Precondition("an empty pack certifies nothing".into()));
    }
    if pack.quotients.len() != pack.centers.len() {
        return Err(Error::Precondition("one quotient per center required".into()));
    }
    check_separation(&pack.centers, pack.r())?;
    let max = pack.quotients.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bound = pack.profile.eigenvalue_bound();
    if !(max <= bound * (1.0 + CERTIFICATE_RTOL)) {
        return Err(Error::Certificate(format!("largest quotient {max} exceeds j²/r² = {bound}")));
    }
    Ok(max)
}
