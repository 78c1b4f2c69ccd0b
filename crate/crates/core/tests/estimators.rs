//! Estimator oracles on analytic shapes.

use varimin::ambient::AmbientManifold;
use varimin::curvature_tensor::{recover_b, TestScalarDictionary};
use varimin::first_variation::{lp_norm, mean_curvature_kernel, mean_curvature_mesh, Component};
use varimin::mesh::{shapes, SimplicialMesh};
use varimin::monotonicity::{check_bounds, BoundOptions, Lemma};
use varimin::{varifold_from_mesh, QuadratureRule};

fn centroid(mesh: &SimplicialMesh) -> varimin::DiscreteVarifold {
    varifold_from_mesh(mesh, QuadratureRule::Centroid, None).unwrap()
}

fn kernel_vs_mesh(mesh: &SimplicialMesh, eps: f64) -> f64 {
    let v = centroid(mesh);
    let a = mean_curvature_mesh(&v).unwrap();
    let b = mean_curvature_kernel(&v, eps).unwrap();
    a.interior_indices()
        .into_iter()
        .filter(|&i| !b.near_boundary[i])
        .map(|i| {
            let (ha, hb) = (a.h[i].as_ref().unwrap(), b.h[i].as_ref().unwrap());
            (ha - hb).norm() / ha.norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn kernel_agrees_with_mesh_estimator() {
    let sphere = kernel_vs_mesh(&shapes::icosphere(4, 1.0), 0.15);
    let torus = kernel_vs_mesh(&shapes::torus(1.0, 0.4, 192, 64), 0.15);
    assert!(sphere < 0.08, "sphere {sphere}");
    assert!(torus < 0.08, "torus {torus}");
}

#[test]
fn curvature_scaling_law() {
    let base = centroid(&shapes::icosphere(3, 1.0));
    let f = mean_curvature_mesh(&base).unwrap();
    let h0 = f.norms(Component::Euclidean)[0];
    for p in [2.5, 3.0, 4.0] {
        let e0 = lp_norm(&f, &base, p, Component::Euclidean, false).unwrap();
        for lambda in [0.5, 2.0] {
            let v = centroid(&shapes::icosphere(3, lambda));
            let g = mean_curvature_mesh(&v).unwrap();
            let h = g.norms(Component::Euclidean)[0];
            assert!((h * lambda / h0 - 1.0).abs() < 0.05);
            let e = lp_norm(&g, &v, p, Component::Euclidean, false).unwrap();
            assert!(
                (e / (lambda.powf(2.0 - p) * e0) - 1.0).abs() < 0.05,
                "p {p} lambda {lambda}"
            );
        }
    }
}

fn trace_error(mesh: &SimplicialMesh, eps: f64) -> f64 {
    let v = centroid(mesh);
    let h = mean_curvature_mesh(&v).unwrap();
    let t = recover_b(&v, &TestScalarDictionary::standard(3, eps)).unwrap();
    assert!(t.flagged.iter().all(|f| !f));
    t.trace_h()
        .iter()
        .zip(&h.h)
        .map(|(a, b)| {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            (a - b).norm() / b.norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn torus_trace_tightens_under_refinement() {
    let coarse = trace_error(&shapes::torus(1.0, 0.4, 96, 32), 0.2);
    let fine = trace_error(&shapes::torus(1.0, 0.4, 192, 64), 0.2);
    assert!(coarse < 0.1 && fine < 0.1, "{coarse} {fine}");
    assert!(fine < coarse);
}

#[test]
fn second_fundamental_form_is_symmetric_on_sphere() {
    let v = centroid(&shapes::icosphere(4, 1.0));
    let t = recover_b(&v, &TestScalarDictionary::standard(3, 0.3)).unwrap();
    assert!(t.a_asymmetry() < 0.1, "{}", t.a_asymmetry());
}

#[test]
fn great_circle_has_small_a_but_not_small_b() {
    let amb = AmbientManifold::sphere(2, 1.0);
    let v = varifold_from_mesh(&shapes::latitude_circle(1000, 0.0), QuadratureRule::Vertex, None)
        .unwrap()
        .conform_to_ambient(amb)
        .unwrap();
    let t = recover_b(&v, &TestScalarDictionary::standard(3, 0.1)).unwrap();
    let usable = t.usable();
    assert!(!usable.is_empty());
    let (an, bn) = (t.a_norms(), t.b_norms());
    // correction magnitude m/r = 1
    assert!(usable.iter().all(|&i| an[i] < 0.1));
    assert!(usable.iter().all(|&i| bn[i] > 0.5));
}

#[test]
fn eccentric_ellipsoid_passes_constant_free_lemma() {
    for axes in [[1.0, 1.0, 0.2], [1.0, 0.3, 0.3], [2.0, 0.5, 0.25]] {
        let v = varifold_from_mesh(&shapes::ellipsoid(3, axes), QuadratureRule::Vertex, None).unwrap();
        let f = mean_curvature_mesh(&v).unwrap();
        let reports = check_bounds(&v, &f, 3.0, &BoundOptions::default()).unwrap();
        let lemma = reports.iter().find(|r| r.lemma == Lemma::MassByDiameter).unwrap();
        assert!(lemma.passed() && lemma.margin >= 1.0, "{axes:?}: {lemma:?}");
    }
}
