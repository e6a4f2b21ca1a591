//! Neumann eigenvalues of convex polygons: P1 finite elements on an
//! unstructured mesh, plus closed-form spectra of rectangles.

pub mod assembly;
pub mod eigen;
pub mod mesh;
pub mod sparse;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use assembly::assemble;
pub use eigen::{solve_eigs, Eigenpairs};
pub use mesh::{mesh_polygon, TriangleMesh};

use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::output::fmt_num;

/// FEM counting functions are trusted up to this fraction of the largest
/// computed eigenvalue.
pub const FEM_TRUST_FRACTION: f64 = 0.8;
/// Eigenvalues within this relative distance of `λ` count as `≤ λ`.
pub const TIE_RTOL: f64 = 1e-9;

/// Sorted Neumann eigenvalues `0 = μ₁ ≤ μ₂ ≤ …`, repeated by multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeumannSpectrum {
    eigenvalues: Vec<f64>,
    /// Mesh size for FEM spectra, `None` for closed-form ones.
    mesh_h: Option<f64>,
    domain_area: f64,
    /// Largest `λ` for which [`NeumannSpectrum::counting_function`] answers.
    trust_limit: f64,
}

impl NeumannSpectrum {
    /// Validates and wraps a computed list of eigenvalues.
    pub fn new(mut eigenvalues: Vec<f64>, mesh_h: Option<f64>, domain_area: f64, trust_limit: f64) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Precondition("a spectrum needs at least one eigenvalue".into()));
        }
        if eigenvalues.iter().any(|m| !m.is_finite() || *m < -1e-8) {
            return Err(Error::Precondition("eigenvalues must be finite and ≥ −1e-8".into()));
        }
        if !(domain_area > 0.0) || !(trust_limit >= 0.0) {
            return Err(Error::Precondition("area must be positive and the trust limit nonnegative".into()));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self { eigenvalues, mesh_h, domain_area, trust_limit })
    }

    /// The exact spectrum `π²(m²/a² + n²/b²)`, `m, n ≥ 0`, of the `a × b`
    /// rectangle, complete up to `cutoff`.
    pub fn rectangle_analytic(a: f64, b: f64, cutoff: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("rectangle sides must be positive, got {a} × {b}")));
        }
        if !(cutoff >= 0.0 && cutoff.is_finite()) {
            return Err(Error::Domain(format!("cutoff must be finite and ≥ 0, got {cutoff}")));
        }
        let mut values = Vec::new();
        let m_max = (a * cutoff.sqrt() / PI).floor() as u64;
        for m in 0..=m_max {
            let x = PI * PI * (m * m) as f64 / (a * a);
            let n_max = (b * (cutoff - x).max(0.0).sqrt() / PI).floor() as u64 + 1;
            for n in 0..=n_max {
                let mu = x + PI * PI * (n * n) as f64 / (b * b);
                if mu <= cutoff {
                    values.push(mu);
                }
            }
        }
        Self::new(values, None, a * b, cutoff)
    }

    /// FEM spectrum with the `m_lowest` smallest eigenvalues on a mesh of size `h`.
    pub fn fem(p: &ConvexPolygon, h: f64, m_lowest: usize) -> Result<Self> {
        Ok(fem_eigenpairs(p, h, m_lowest)?.0)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `μ_k`, 1-based.
    pub fn mu(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.eigenvalues.get(i).copied())
    }

    pub fn mesh_h(&self) -> Option<f64> {
        self.mesh_h
    }

    pub fn is_fem(&self) -> bool {
        self.mesh_h.is_some()
    }

    pub fn domain_area(&self) -> f64 {
        self.domain_area
    }

    pub fn trust_limit(&self) -> f64 {
        self.trust_limit
    }

    /// `N_N(λ) = #{k : μ_k ≤ λ}`; zero for `λ < 0`.
    pub fn counting_function(&self, lambda: f64) -> Result<usize> {
        if lambda.is_nan() {
            return Err(Error::Domain("λ is NaN".into()));
        }
        if lambda < 0.0 {
            return Ok(0);
        }
        if lambda > self.trust_limit {
            return Err(Error::Range(format!(
                "λ = {lambda} exceeds the trusted range ≤ {} of this spectrum ({} eigenvalues); compute more",
                self.trust_limit,
                self.len()
            )));
        }
        let threshold = lambda + TIE_RTOL * lambda.max(1.0);
        Ok(self.eigenvalues.partition_point(|&mu| mu <= threshold))
    }

    /// CSV with columns `k, mu_k` (1-based `k`).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,mu_k\n");
        for (i, mu) in self.eigenvalues.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i + 1, fmt_num(*mu)));
        }
        s
    }
}

/// Meshes, assembles and solves; returns the spectrum with the mesh and the
/// eigenpairs. The trust limit is `0.8 μ_m`.
pub fn fem_eigenpairs(p: &ConvexPolygon, h: f64, m_lowest: usize) -> Result<(NeumannSpectrum, TriangleMesh, Eigenpairs)> {
    let mesh = mesh_polygon(p, h)?;
    let (k, m) = assemble(&mesh)?;
    let pairs = solve_eigs(&k, &m, m_lowest)?;
    let top = *pairs.values.last().expect("at least one pair");
    let spectrum = NeumannSpectrum::new(pairs.values.clone(), Some(h), mesh.area(), FEM_TRUST_FRACTION * top)?;
    Ok((spectrum, mesh, pairs))
}

/// Number of eigenpairs to request so that a FEM spectrum is trusted up to
/// `lambda`: the two-term Weyl estimate at `λ/0.8`, padded by 25% and 10.
pub fn pairs_for_lambda(p: &ConvexPolygon, lambda: f64) -> usize {
    let top = lambda.max(0.0) / FEM_TRUST_FRACTION;
    let weyl = p.area() * top / (4.0 * PI) + p.perimeter() * top.sqrt() / (4.0 * PI);
    (1.25 * weyl).ceil() as usize + 10
}
