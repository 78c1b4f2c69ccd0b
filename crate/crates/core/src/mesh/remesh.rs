//! Conservative Delaunay edge flips for triangle meshes in R^3.

use std::collections::HashMap;

use nalgebra::{DVector, Vector3};

use super::SimplicialMesh;
use crate::error::{Error, Result};

/// Outcome of one remeshing pass.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlipLog {
    pub flips: usize,
    /// Largest relative mass change caused by a single flip.
    pub max_mass_change: f64,
    /// Net relative mass change over the pass.
    pub net_mass_change: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct FlipOptions {
    /// Per-flip bound on |Δ area| / total area.
    pub max_mass_change: f64,
    /// Minimum cosine between the two face normals (near-flat hinges only).
    pub min_normal_cos: f64,
    pub max_sweeps: usize,
}

impl Default for FlipOptions {
    fn default() -> Self {
        Self {
            max_mass_change: 1e-3,
            min_normal_cos: 0.9,
            max_sweeps: 8,
        }
    }
}

fn tri_area(p: &[Vector3<f64>], f: [usize; 3]) -> f64 {
    0.5 * (p[f[1]] - p[f[0]]).cross(&(p[f[2]] - p[f[0]])).norm()
}

fn tri_normal(p: &[Vector3<f64>], f: [usize; 3]) -> Vector3<f64> {
    (p[f[1]] - p[f[0]]).cross(&(p[f[2]] - p[f[0]])).normalize()
}

fn angle_at(p: &[Vector3<f64>], apex: usize, a: usize, b: usize) -> f64 {
    let u = p[a] - p[apex];
    let v = p[b] - p[apex];
    u.angle(&v)
}

/// Flips interior edges whose opposite angles sum beyond π, keeping only
/// flips on near-flat hinges that change the mass by less than
/// `opts.max_mass_change` of the total. Requires m = 2, S = 3.
pub fn delaunay_flips(mesh: &SimplicialMesh, opts: &FlipOptions) -> Result<(SimplicialMesh, FlipLog)> {
    let (p, mut faces) = match (mesh.positions3(), mesh.triangles()) {
        (Some(p), Some(f)) => (p, f),
        _ => return Err(Error::InvalidMesh("edge flips need a triangle mesh in R^3".into())),
    };
    let total: f64 = faces.iter().map(|&f| tri_area(&p, f)).sum();
    let mut log = FlipLog::default();
    for _ in 0..opts.max_sweeps {
        let mut flipped = 0;
        // directed edge -> (face, opposite vertex)
        let mut half: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for a in 0..3 {
                half.insert((f[a], f[(a + 1) % 3]), (fi, f[(a + 2) % 3]));
            }
        }
        let mut touched = vec![false; faces.len()];
        let mut keys: Vec<(usize, usize)> = half.keys().copied().filter(|&(a, b)| a < b).collect();
        keys.sort_unstable();
        for (a, b) in keys {
            let (Some(&(f1, c)), Some(&(f2, d))) = (half.get(&(a, b)), half.get(&(b, a))) else {
                continue;
            };
            if touched[f1] || touched[f2] || c == d {
                continue;
            }
            if half.contains_key(&(c, d)) || half.contains_key(&(d, c)) {
                continue;
            }
            if angle_at(&p, c, a, b) + angle_at(&p, d, a, b) <= std::f64::consts::PI + 1e-12 {
                continue;
            }
            if tri_normal(&p, faces[f1]).dot(&tri_normal(&p, faces[f2])) < opts.min_normal_cos {
                continue;
            }
            // (a,b,c) and (b,a,d) become (c,d,b) and (d,c,a)
            let n1 = [c, d, b];
            let n2 = [d, c, a];
            let before = tri_area(&p, faces[f1]) + tri_area(&p, faces[f2]);
            let after = tri_area(&p, n1) + tri_area(&p, n2);
            let rel = (after - before).abs() / total;
            if rel >= opts.max_mass_change || after <= 1e-12 * before {
                continue;
            }
            let old_n = tri_normal(&p, faces[f1]) + tri_normal(&p, faces[f2]);
            if tri_normal(&p, n1).dot(&old_n) <= 0.0 || tri_normal(&p, n2).dot(&old_n) <= 0.0 {
                continue;
            }
            faces[f1] = n1;
            faces[f2] = n2;
            touched[f1] = true;
            touched[f2] = true;
            log.flips += 1;
            log.max_mass_change = log.max_mass_change.max(rel);
            flipped += 1;
        }
        if flipped == 0 {
            break;
        }
    }
    let new_total: f64 = faces.iter().map(|&f| tri_area(&p, f)).sum();
    log.net_mass_change = (new_total - total) / total;
    let verts: Vec<DVector<f64>> = mesh.vertices().to_vec();
    let out = SimplicialMesh::new(verts, faces.iter().map(|f| f.to_vec()).collect())?;
    Ok((out, log))
}

/// Smallest inradius-to-circumradius ratio (scaled so equilateral is 1).
pub fn min_quality(mesh: &SimplicialMesh) -> f64 {
    let (Some(p), Some(faces)) = (mesh.positions3(), mesh.triangles()) else {
        return f64::NAN;
    };
    faces
        .iter()
        .map(|&f| {
            let a = (p[f[1]] - p[f[2]]).norm();
            let b = (p[f[0]] - p[f[2]]).norm();
            let c = (p[f[0]] - p[f[1]]).norm();
            let s = 0.5 * (a + b + c);
            // 2 r / R = 8 (s-a)(s-b)(s-c) / (a b c)
            8.0 * (s - a) * (s - b) * (s - c) / (a * b * c)
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn flat_bad_diagonal_gets_flipped() {
        // thin rhombus split along its long diagonal
        let p = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, -0.2, 0.0),
            Vector3::new(2.0, 0.0, 0.0),
            Vector3::new(1.0, 0.2, 0.0),
        ];
        let m = SimplicialMesh::from_triangles(&p, &[[0, 2, 3], [2, 0, 1]]).unwrap();
        let (out, log) = delaunay_flips(&m, &FlipOptions::default()).unwrap();
        assert_eq!(log.flips, 1);
        assert!(min_quality(&out) > min_quality(&m));
        assert!((out.total_volume() - m.total_volume()).abs() < 1e-14);
    }

    #[test]
    fn icosphere_is_already_delaunay() {
        let m = shapes::icosphere(2, 1.0);
        let (_, log) = delaunay_flips(&m, &FlipOptions::default()).unwrap();
        assert_eq!(log.flips, 0);
    }

    #[test]
    fn flips_preserve_orientation_and_mass() {
        let m = shapes::ellipsoid(3, [1.0, 1.0, 0.2]);
        let (out, log) = delaunay_flips(&m, &FlipOptions::default()).unwrap();
        assert!(log.max_mass_change < 1e-3);
        assert!(out.non_manifold_facets().is_empty());
        assert!(!out.boundary_vertices().iter().any(|&b| b));
    }
}
