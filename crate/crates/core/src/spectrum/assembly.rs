//! P1 stiffness and mass matrices.

use rayon::prelude::*;

use super::mesh::TriangleMesh;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

pub type Local = [[f64; 3]; 3];

/// Element stiffness `∫∇φ_i·∇φ_j` and mass `∫φ_iφ_j` of one triangle.
pub fn element_matrices(p: [crate::geometry::Point; 3]) -> Result<(Local, Local)> {
    let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
    if !(area > 0.0) {
        return Err(Error::Mesh(format!("triangle with non-positive area {area:e}")));
    }
    // ∇φ_i is the inward normal of the opposite edge scaled by 1/(2A).
    let grads: [(f64, f64); 3] = std::array::from_fn(|i| {
        let e = p[(i + 2) % 3] - p[(i + 1) % 3];
        (-e.y / (2.0 * area), e.x / (2.0 * area))
    });
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (grads[i].0 * grads[j].0 + grads[i].1 * grads[j].1);
            m[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    Ok((k, m))
}

/// Global `(K, M)`. Element matrices are computed in parallel and summed in
/// triangle order, so the result is deterministic.
pub fn assemble(mesh: &TriangleMesh) -> Result<(CsrMatrix, CsrMatrix)> {
    let elements = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| element_matrices(mesh.corners(t)).map_err(|e| Error::Mesh(format!("triangle {t}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut kt = Vec::with_capacity(9 * elements.len());
    let mut mt = Vec::with_capacity(9 * elements.len());
    for (tri, (ke, me)) in mesh.triangles.iter().zip(&elements) {
        for a in 0..3 {
            for b in 0..3 {
                kt.push((tri[a], tri[b], ke[a][b]));
                mt.push((tri[a], tri[b], me[a][b]));
            }
        }
    }
    let n = mesh.n_vertices();
    Ok((CsrMatrix::from_triplets(n, kt), CsrMatrix::from_triplets(n, mt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexPolygon, Point};
    use crate::spectrum::mesh::mesh_polygon;

    #[test]
    fn reference_triangle() {
        let (k, m) = element_matrices([Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]).unwrap();
        let expected_k = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            assert!(k[i].iter().sum::<f64>().abs() < 1e-15);
            for j in 0..3 {
                assert!((k[i][j] - expected_k[i][j]).abs() < 1e-15);
                let mij = if i == j { 2.0 } else { 1.0 } * 0.5 / 12.0;
                assert!((m[i][j] - mij).abs() < 1e-16);
            }
        }
        assert!(element_matrices([Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn constants_and_partition_of_unity() {
        for p in [ConvexPolygon::hexagon(1.0).unwrap(), ConvexPolygon::disk(1.0, 256).unwrap()] {
            let mesh = mesh_polygon(&p, 0.1).unwrap();
            let (k, m) = assemble(&mesh).unwrap();
            let n = mesh.n_vertices();
            let ones = vec![1.0; n];
            let mut y = vec![0.0; n];
            k.mul_vec(&ones, &mut y);
            assert!(y.iter().all(|v| v.abs() < 1e-12));
            m.mul_vec(&ones, &mut y);
            let total: f64 = y.iter().sum();
            assert!((total - mesh.area()).abs() < 1e-12);
            assert_eq!(k.asymmetry(), 0.0);
            assert_eq!(m.asymmetry(), 0.0);
        }
    }

    #[test]
    fn stiffness_energy_of_a_linear_function() {
        // ∫|∇(2x − y)|² = 5|Ω|, reproduced exactly by P1.
        let p = ConvexPolygon::rectangle(2.0, 1.0).unwrap();
        let mesh = mesh_polygon(&p, 0.1).unwrap();
        let (k, _) = assemble(&mesh).unwrap();
        let u: Vec<f64> = mesh.vertices.iter().map(|v| 2.0 * v.x - v.y).collect();
        let mut ku = vec![0.0; u.len()];
        k.mul_vec(&u, &mut ku);
        let energy: f64 = u.iter().zip(&ku).map(|(a, b)| a * b).sum();
        assert!((energy - 5.0 * mesh.area()).abs() < 1e-10);
    }
}
