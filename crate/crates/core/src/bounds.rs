//! Lower bounds for the Neumann counting function and the end-to-end
//! verification of `N_N(Ω, λ) ≥ |Ω| λ / (2√3 j₀²)` for convex polygons.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::lattice::packing_points;
use crate::special_functions::{bessel_zero, gamma_fn, j0_zero};
use crate::spectrum::{pairs_for_lambda, NeumannSpectrum};
use crate::test_functions::{certified_upper_bound, TestFunctionPack, TestProfile, DEFAULT_N_ANGLES, DEFAULT_N_RADIAL};

/// Largest dimension accepted by the coefficient formulas.
pub const MAX_DIMENSION: u32 = 24;
/// Relative `λ` slack for counting-function checks against FEM spectra.
pub const FEM_LAMBDA_SLACK: f64 = 0.02;
/// Relative slack for the eigenvalue form of the bound with FEM spectra.
pub const FEM_EIGENVALUE_SLACK: f64 = 0.01;
/// Optimal packing density in the plane, `π/√12`; a diagnostic constant.
pub const DELTA_2: f64 = 0.906_899_682_117_108_9;

fn check_dimension(d: u32) -> Result<()> {
    if !(1..=MAX_DIMENSION).contains(&d) {
        return Err(Error::Domain(format!("dimension must lie in 1..={MAX_DIMENSION}, got {d}")));
    }
    Ok(())
}

/// `|B₁| = π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: u32) -> Result<f64> {
    check_dimension(d)?;
    Ok(PI.powf(0.5 * d as f64) / gamma_fn(0.5 * d as f64 + 1.0)?)
}

/// Weyl coefficient `|B₁| / (2π)^d`.
pub fn polya_coefficient(d: u32) -> Result<f64> {
    Ok(unit_ball_volume(d)? / (2.0 * PI).powi(d as i32))
}

/// `2/(d+2)` times the Weyl coefficient.
pub fn kroger_coefficient(d: u32) -> Result<f64> {
    Ok(2.0 / (d as f64 + 2.0) * polya_coefficient(d)?)
}

/// `1 / (2√3 j₀²)`.
pub fn convex_coefficient() -> f64 {
    1.0 / (2.0 * 3f64.sqrt() * j0_zero().powi(2))
}

fn check_area_lambda(area: f64, lambda: f64) -> Result<()> {
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::Domain(format!("area must be positive, got {area}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("λ must be finite and ≥ 0, got {lambda}")));
    }
    Ok(())
}

/// `(Pólya, Kröger)` values `c · |Ω| λ^{d/2}`.
pub fn bound_values(area: f64, lambda: f64, d: u32) -> Result<(f64, f64)> {
    check_area_lambda(area, lambda)?;
    let scale = area * lambda.powf(0.5 * d as f64);
    Ok((polya_coefficient(d)? * scale, kroger_coefficient(d)? * scale))
}

/// `|Ω| λ / (2√3 j₀²)`.
pub fn convex_bound(area: f64, lambda: f64) -> Result<f64> {
    check_area_lambda(area, lambda)?;
    Ok(area * lambda * convex_coefficient())
}

/// The bound in eigenvalue form, `μ_{l+1} ≤ 2√3 j₀² l / |Ω|`, with 1% slack
/// for FEM spectra.
pub fn eigenvalue_form_check(s: &NeumannSpectrum, l: usize) -> Result<bool> {
    if l == 0 {
        return Err(Error::Precondition("the eigenvalue form starts at l = 1".into()));
    }
    let mu = s.mu(l + 1).ok_or_else(|| {
        Error::Range(format!("μ_{} requested but only {} eigenvalues are available", l + 1, s.len()))
    })?;
    let threshold = l as f64 / (convex_coefficient() * s.domain_area());
    let slack = if s.is_fem() { 1.0 + FEM_EIGENVALUE_SLACK } else { 1.0 };
    Ok(mu <= threshold * slack)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub n_angles: usize,
    pub n_radial: usize,
    /// Relative `λ` slack for the FEM cross-check; analytic spectra use none.
    pub fem_lambda_slack: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_angles: DEFAULT_N_ANGLES, n_radial: DEFAULT_N_RADIAL, fem_lambda_slack: FEM_LAMBDA_SLACK }
    }
}

/// One `(Ω, λ)` row of the verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub area: f64,
    #[serde(rename = "n_N")]
    pub n_n: usize,
    #[serde(rename = "bound_polya")]
    pub polya: f64,
    #[serde(rename = "bound_kroger")]
    pub kroger: f64,
    #[serde(rename = "bound_convex")]
    pub convex: f64,
    pub packing_l: usize,
    /// Largest Rayleigh quotient of the test functions, an upper bound for
    /// `μ_l`; `None` when the packing is empty.
    pub certificate: Option<f64>,
    pub pass: bool,
}

impl BoundReport {
    pub const COLUMNS: [&'static str; 9] =
        ["lambda", "area", "n_N", "bound_polya", "bound_kroger", "bound_convex", "packing_l", "certificate", "pass"];

    /// How far `N_N` exceeds the convex bound.
    pub fn margin(&self) -> f64 {
        self.n_n as f64 - self.convex
    }
}

/// Runs the constructive proof at `λ` and compares it with `spectrum`:
///
/// 1. `r = j₀/√λ`, and a shifted triangular lattice of spacing `2r` gives
///    `l ≥ |Ω|λ/(2√3 j₀²)` points of `Ω` pairwise `2r` apart;
/// 2. the Bessel test functions on those points have Rayleigh quotients at
///    most `j₀²/r² = λ`, so `μ_l ≤ λ`;
/// 3. the spectrum must agree: `N_N(λ(1+s)) ≥ l`, with `s` the FEM slack
///    (zero for closed-form spectra), otherwise an error is returned.
///
/// `pass` records `N_N(λ) ≥ |Ω|λ/(2√3 j₀²)`.
pub fn verify_main_theorem(
    p: &ConvexPolygon,
    lambda: f64,
    spectrum: &NeumannSpectrum,
    opts: &VerifyOptions,
) -> Result<BoundReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    let area = p.area();
    let area_gap = (spectrum.domain_area() - area).abs() / area;
    if area_gap > 1e-3 {
        return Err(Error::Precondition(format!(
            "spectrum is for a domain of area {}, not {area}",
            spectrum.domain_area()
        )));
    }
    let convex = convex_bound(area, lambda)?;
    let (polya, kroger) = bound_values(area, lambda, 2)?;

    let r = j0_zero() / lambda.sqrt();
    let packing = packing_points(p, r)?;
    let l = packing.len();
    if (l as f64) < convex - 1e-9 {
        return Err(Error::Certificate(format!("packing has {l} points, fewer than the guaranteed {convex}")));
    }
    let certificate = if l > 0 {
        let pack = TestFunctionPack::build(TestProfile::planar(r)?, p, packing.points, opts.n_angles, opts.n_radial)?;
        Some(certified_upper_bound(&pack)?)
    } else {
        None
    };

    let n_n = spectrum.counting_function(lambda)?;
    let slack = if spectrum.is_fem() { opts.fem_lambda_slack } else { 0.0 };
    let n_slack = spectrum.counting_function(lambda * (1.0 + slack))?;
    if n_slack < l {
        return Err(Error::Certificate(format!(
            "spectrum has only {n_slack} eigenvalues ≤ {} but {l} test functions certify μ_{l} ≤ {lambda}",
            lambda * (1.0 + slack)
        )));
    }
    Ok(BoundReport { lambda, area, n_n, polya, kroger, convex, packing_l: l, certificate, pass: n_n as f64 >= convex })
}

/// [`verify_main_theorem`] against a FEM spectrum on a mesh of size `h`, with
/// enough eigenpairs for the slackened counting function at `λ`.
pub fn verify_with_fem(p: &ConvexPolygon, lambda: f64, h: f64, opts: &VerifyOptions) -> Result<BoundReport> {
    let spectrum = NeumannSpectrum::fem(p, h, pairs_for_lambda(p, lambda * (1.0 + opts.fem_lambda_slack)))?;
    verify_main_theorem(p, lambda, &spectrum, opts)
}

/// Levenshtein's bound `j_{d/2}^d / (2^{2d} Γ(d/2 + 1)²)` on the sphere
/// packing density in dimension `d`.
pub fn levenshtein_density(d: u32) -> Result<f64> {
    check_dimension(d)?;
    let j = bessel_zero(0.5 * d as f64)?;
    let g = gamma_fn(0.5 * d as f64 + 1.0)?;
    Ok(j.powi(d as i32) / (2f64.powi(2 * d as i32) * g * g))
}

/// One dimension of the comparison between the lattice-packing bound and
/// Kröger's bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimComparison {
    pub d: u32,
    pub kroger_coeff: f64,
    pub levenshtein_density: f64,
    /// `δ_d / (|B₁| j_{d/2−1}^d)` with `δ_d` replaced by Levenshtein's bound:
    /// an upper bound for the coefficient of the lattice-packing bound.
    pub remark_rhs: f64,
    /// `remark_rhs < kroger_coeff`.
    pub strict: bool,
}

impl DimComparison {
    pub const COLUMNS: [&'static str; 5] = ["d", "kroger_coeff", "levenshtein_density", "remark_rhs", "strict"];
}

pub fn dim_comparison(d: u32) -> Result<DimComparison> {
    let kroger_coeff = kroger_coefficient(d)?;
    let levenshtein = levenshtein_density(d)?;
    let jd = bessel_zero(0.5 * d as f64 - 1.0)?;
    let remark_rhs = levenshtein / (unit_ball_volume(d)? * jd.powi(d as i32));
    Ok(DimComparison {
        d,
        kroger_coeff,
        levenshtein_density: levenshtein,
        remark_rhs,
        strict: remark_rhs < kroger_coeff,
    })
}

/// [`dim_comparison`] for `d_min ..= d_max`, `3 ≤ d_min ≤ d_max ≤ 24`.
pub fn highdim_table(d_min: u32, d_max: u32) -> Result<Vec<DimComparison>> {
    if !(3 <= d_min && d_min <= d_max && d_max <= MAX_DIMENSION) {
        return Err(Error::Domain(format!("need 3 ≤ d_min ≤ d_max ≤ {MAX_DIMENSION}, got {d_min}..{d_max}")));
    }
    (d_min..=d_max).map(dim_comparison).collect()
}
