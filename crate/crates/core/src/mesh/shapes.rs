//! Mesh generators for the analytic test shapes.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DVector, Vector3};

use super::SimplicialMesh;
use crate::error::Result;

/// Icosahedron subdivided `refinement` times, vertices on the sphere of
/// the given radius, faces oriented outward. Refinement k has
/// `10 * 4^k + 2` vertices.
pub fn icosphere(refinement: usize, radius: f64) -> SimplicialMesh {
    let (verts, faces) = icosphere_raw(refinement);
    let verts: Vec<Vector3<f64>> = verts.into_iter().map(|v| v * radius).collect();
    SimplicialMesh::from_triangles(&verts, &faces).expect("icosphere is valid")
}

/// Unit-radius icosphere positions and faces.
pub fn icosphere_raw(refinement: usize) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|c| Vector3::new(c[0], c[1], c[2]).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..refinement {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vector3<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut verts);
            let bc = midpoint(f[1], f[2], &mut verts);
            let ca = midpoint(f[2], f[0], &mut verts);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    (verts, faces)
}

/// Icosphere scaled to the axis-aligned ellipsoid with semi-axes `axes`.
pub fn ellipsoid(refinement: usize, axes: [f64; 3]) -> SimplicialMesh {
    let (verts, faces) = icosphere_raw(refinement);
    let verts: Vec<Vector3<f64>> = verts
        .into_iter()
        .map(|v| Vector3::new(v.x * axes[0], v.y * axes[1], v.z * axes[2]))
        .collect();
    SimplicialMesh::from_triangles(&verts, &faces).expect("ellipsoid is valid")
}

/// Torus of revolution about the z-axis, `nu` samples around the axis
/// and `nv` around the tube. Faces oriented outward.
pub fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> SimplicialMesh {
    let mut verts = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        for j in 0..nv {
            let v = 2.0 * PI * j as f64 / nv as f64;
            let rho = major + minor * v.cos();
            verts.push(Vector3::new(rho * u.cos(), rho * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    SimplicialMesh::from_triangles(&verts, &faces).expect("torus is valid")
}

/// Open cylinder of the given radius around the z-axis, z in
/// `[-height/2, height/2]`, with `nz + 1` rings of `nu` vertices.
pub fn cylinder(radius: f64, height: f64, nu: usize, nz: usize) -> SimplicialMesh {
    let mut verts = Vec::with_capacity(nu * (nz + 1));
    for k in 0..=nz {
        let z = -0.5 * height + height * k as f64 / nz as f64;
        // stagger alternate rings to keep triangles near-equilateral
        let shift = if k % 2 == 1 { 0.5 } else { 0.0 };
        for i in 0..nu {
            let u = 2.0 * PI * (i as f64 + shift) / nu as f64;
            verts.push(Vector3::new(radius * u.cos(), radius * u.sin(), z));
        }
    }
    let id = |k: usize, i: usize| k * nu + (i % nu);
    let mut faces = Vec::with_capacity(2 * nu * nz);
    for k in 0..nz {
        for i in 0..nu {
            if k % 2 == 0 {
                faces.push([id(k, i), id(k, i + 1), id(k + 1, i)]);
                faces.push([id(k, i + 1), id(k + 1, i + 1), id(k + 1, i)]);
            } else {
                faces.push([id(k, i), id(k + 1, i + 1), id(k + 1, i)]);
                faces.push([id(k, i), id(k, i + 1), id(k + 1, i + 1)]);
            }
        }
    }
    SimplicialMesh::from_triangles(&verts, &faces).expect("cylinder is valid")
}

/// Planar patch `[-n h/2, n h/2]^2` in the plane z = 0 of R^3, made of
/// `n x n` squares each split along the same diagonal.
pub fn flat_grid(n: usize, spacing: f64) -> SimplicialMesh {
    let half = 0.5 * n as f64 * spacing;
    let mut verts = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            verts.push(Vector3::new(
                -half + i as f64 * spacing,
                -half + j as f64 * spacing,
                0.0,
            ));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    SimplicialMesh::from_triangles(&verts, &faces).expect("grid is valid")
}

/// Closed polygon with `n` vertices on the circle `center + r (cos t e1 +
/// sin t e2)`; `e1`, `e2` must be orthonormal.
pub fn circle(n: usize, radius: f64, center: &DVector<f64>, e1: &DVector<f64>, e2: &DVector<f64>) -> SimplicialMesh {
    let verts: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            center + e1 * (radius * t.cos()) + e2 * (radius * t.sin())
        })
        .collect();
    let segs = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    SimplicialMesh::new(verts, segs).expect("circle is valid")
}

/// Unit circle in the plane of R^2.
pub fn unit_circle_r2(n: usize) -> SimplicialMesh {
    circle(
        n,
        1.0,
        &DVector::zeros(2),
        &DVector::from_vec(vec![1.0, 0.0]),
        &DVector::from_vec(vec![0.0, 1.0]),
    )
}

/// Latitude circle at elevation angle `latitude` on the unit sphere of
/// R^3; latitude 0 is the equator, a great circle.
pub fn latitude_circle(n: usize, latitude: f64) -> SimplicialMesh {
    circle(
        n,
        latitude.cos(),
        &DVector::from_vec(vec![0.0, 0.0, latitude.sin()]),
        &DVector::from_vec(vec![1.0, 0.0, 0.0]),
        &DVector::from_vec(vec![0.0, 1.0, 0.0]),
    )
}

/// Pads every vertex with zeros up to dimension `s`.
pub fn embed(mesh: &SimplicialMesh, s: usize) -> Result<SimplicialMesh> {
    let old = mesh.ambient_dim();
    SimplicialMesh::with_orientation(
        mesh.vertices()
            .iter()
            .map(|v| DVector::from_fn(s, |i, _| if i < old { v[i] } else { 0.0 }))
            .collect(),
        mesh.simplices().to_vec(),
        mesh.orientation().to_vec(),
    )
}

/// Translates every vertex.
pub fn translated(mesh: &SimplicialMesh, shift: &DVector<f64>) -> SimplicialMesh {
    mesh.map_vertices(|v| v + shift)
        .expect("translation preserves validity")
}

/// Scales every vertex about the origin.
pub fn scaled(mesh: &SimplicialMesh, factor: f64) -> SimplicialMesh {
    mesh.map_vertices(|v| v * factor).expect("scaling preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        for k in 0..5 {
            let m = icosphere(k, 1.0);
            assert_eq!(m.num_vertices(), 10 * 4usize.pow(k as u32) + 2);
            assert_eq!(m.num_simplices(), 20 * 4usize.pow(k as u32));
            assert!(m.non_manifold_facets().is_empty());
            assert!(!m.boundary_vertices().iter().any(|&b| b));
        }
    }

    #[test]
    fn icosphere_is_outward_oriented() {
        let m = icosphere(2, 1.0);
        let p = m.positions3().unwrap();
        for f in m.triangles().unwrap() {
            let n = (p[f[1]] - p[f[0]]).cross(&(p[f[2]] - p[f[0]]));
            assert!(n.dot(&(p[f[0]] + p[f[1]] + p[f[2]])) > 0.0);
        }
    }

    #[test]
    fn torus_is_closed_and_outward() {
        let m = torus(2.0, 0.5, 24, 12);
        assert!(!m.boundary_vertices().iter().any(|&b| b));
        let p = m.positions3().unwrap();
        for f in m.triangles().unwrap() {
            let c = (p[f[0]] + p[f[1]] + p[f[2]]) / 3.0;
            let n = (p[f[1]] - p[f[0]]).cross(&(p[f[2]] - p[f[0]]));
            let core = Vector3::new(c.x, c.y, 0.0).normalize() * 2.0;
            assert!(n.dot(&(c - core)) > 0.0);
        }
    }

    #[test]
    fn cylinder_area_approaches_lateral_area() {
        let m = cylinder(0.5, 2.0, 64, 40);
        let exact = 2.0 * PI * 0.5 * 2.0;
        assert!((m.total_volume() - exact).abs() / exact < 2e-3);
    }

    #[test]
    fn circle_length() {
        let m = unit_circle_r2(1000);
        assert!((m.total_volume() - 2.0 * PI).abs() < 1e-4);
    }
}
