//! Randomized invariants across modules.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use varimin::curvature_tensor::{a_from_b_atom, b_from_a_atom, TestScalarDictionary};
use varimin::energy::{energy, mesh_energy, EnergyField, EnergySpec, Form};
use varimin::first_variation::{first_variation, mean_curvature_mesh, TestVectorField};
use varimin::mesh::{io, shapes};
use varimin::monotonicity::{check_bounds, check_fundamental, monotone_profile, BoundOptions, BoundStatus, Cutoff};
use varimin::{
    varifold_from_mesh, AmbientManifold, CompactSubset, DiscreteVarifold, Metric, PlaneProjector, QuadratureRule,
    Tensor3, VarifoldAtom,
};

fn vec3() -> impl Strategy<Value = DVector<f64>> {
    prop::array::uniform3(-2.0..2.0f64).prop_map(|a| DVector::from_column_slice(&a))
}

fn rotation() -> impl Strategy<Value = DMatrix<f64>> {
    prop::array::uniform9(-1.0..1.0f64)
        .prop_filter("well conditioned", |a| {
            DMatrix::from_column_slice(3, 3, a).determinant().abs() > 0.05
        })
        .prop_map(|a| {
            let q = DMatrix::from_column_slice(3, 3, &a).qr().q();
            if q.determinant() < 0.0 {
                -q
            } else {
                q
            }
        })
}

fn atom() -> impl Strategy<Value = VarifoldAtom> {
    (vec3(), vec3(), vec3(), 0.01..2.0f64).prop_filter_map("independent spanning set", |(x, a, b, w)| {
        let p = PlaneProjector::from_spanning(&[a, b]).ok()?;
        Some(VarifoldAtom { x, p, w })
    })
}

fn varifold(max: usize) -> impl Strategy<Value = DiscreteVarifold> {
    prop::collection::vec(atom(), 1..max).prop_map(|atoms| DiscreteVarifold::new(atoms, 2).unwrap())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_laws(vs in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 5), 1..4)) {
        let span: Vec<DVector<f64>> = vs.iter().map(|v| DVector::from_vec(v.clone())).collect();
        if let Ok(p) = PlaneProjector::from_spanning(&span) {
            let (sym, idem, tr) = p.law_defects();
            prop_assert!(sym <= 1e-12 && idem <= 1e-10 && tr <= 1e-10, "{sym} {idem} {tr}");
            prop_assert_eq!(p.rank(), span.len());
        }
    }

    #[test]
    fn sphere_tangent_projector(n in 1usize..4, r in 0.3..3.0f64, raw in prop::collection::vec(-1.0..1.0f64, 4)) {
        let amb = AmbientManifold::sphere(n, r);
        let y = DVector::from_vec(raw[..n + 1].to_vec());
        prop_assume!(y.norm() > 1e-3);
        let x = amb.project(&y);
        let q = amb.tangent_projector(&x).unwrap();
        prop_assert!((&q - q.transpose()).abs().max() <= 1e-10);
        prop_assert!((&q * &q - &q).abs().max() <= 1e-10);
        prop_assert!((q.trace() - n as f64).abs() <= 1e-10);
        for nu in amb.normals(&x) {
            prop_assert!((&q * nu).norm() <= 1e-10);
        }
        // dQ against central differences along the embedding directions
        let dq = amb.dq(&x).unwrap();
        let h = 1e-6;
        for k in 0..=n {
            let mut e = DVector::zeros(n + 1);
            e[k] = h;
            let fd = (amb.tangent_projector_unchecked(&(&x + &e)) - amb.tangent_projector_unchecked(&(&x - &e))) / (2.0 * h);
            for i in 0..=n {
                for j in 0..=n {
                    prop_assert!((fd[(i, j)] - dq.get(i, j, k)).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn correction_is_normal_with_magnitude_m_over_r(
        r in 0.3..3.0f64, y in vec3(), a in vec3(), b in vec3(), m in 1usize..3,
    ) {
        let amb = AmbientManifold::sphere(2, r);
        prop_assume!(y.norm() > 1e-3);
        let x = amb.project(&y);
        let q = amb.tangent_projector(&x).unwrap();
        let span: Vec<DVector<f64>> = [a, b].iter().take(m).map(|v| &q * v).collect();
        let Ok(p) = PlaneProjector::from_spanning(&span) else { return Ok(()) };
        let c = amb.curvature_correction(&x, &p).unwrap();
        prop_assert!((&q * &c).norm() <= 1e-8);
        prop_assert!(close(c.norm(), m as f64 / r, 1e-8));
    }

    #[test]
    fn subset_boundary_projection(kind in 0usize..2, r0 in 0.2..2.0f64, gap in 0.1..2.0f64, x in vec3()) {
        let subset = if kind == 0 { CompactSubset::ball(r0) } else { CompactSubset::shell(r0, r0 + gap) };
        prop_assume!(x.norm() > 1e-6);
        prop_assert!(subset.contains(&subset.project_to_boundary(&x), 1e-10));
        prop_assert!(subset.contains(&subset.project(&x), 1e-10));
        prop_assert!(subset.has_interior());
    }

    #[test]
    fn mass_is_additive(a in varifold(12), b in varifold(12)) {
        let ab = a.concat(&b).unwrap();
        prop_assert!(close(ab.mass(), a.mass() + b.mass(), 1e-12));
    }

    #[test]
    fn ball_mass_is_monotone(v in varifold(20), x0 in vec3(), mut radii in prop::collection::vec(0.0..5.0f64, 2..8)) {
        radii.sort_by(f64::total_cmp);
        let masses: Vec<f64> = radii.iter().map(|&r| v.ball_mass(&x0, r)).collect();
        prop_assert!(masses.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(masses.iter().all(|&m| m <= v.mass() * (1.0 + 1e-12)));
        prop_assert!(close(v.ball_mass(&x0, 100.0), v.mass(), 1e-12));
    }

    #[test]
    fn rigid_motion_preserves_mass_diameter_ball_mass(
        v in varifold(16), rot in rotation(), t in vec3(), x0 in vec3(), rho in 0.1..3.0f64,
    ) {
        let moved = v.transformed(&rot, &t).unwrap();
        prop_assert!(close(moved.mass(), v.mass(), 1e-12));
        let (d0, d1) = (v.support_diameter(Metric::Euclidean).unwrap(), moved.support_diameter(Metric::Euclidean).unwrap());
        prop_assert!((d0 - d1).abs() <= 1e-10 * (1.0 + d0));
        let y0 = &rot * &x0 + &t;
        // boundary ties can flip under rounding; compare only away from them
        let gap = v.atoms().iter().map(|a| ((&a.x - &x0).norm() - rho).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-9);
        prop_assert!(close(moved.ball_mass(&y0, rho), v.ball_mass(&x0, rho), 1e-12));
        for (a, b) in v.atoms().iter().zip(moved.atoms()) {
            let expect = &rot * a.p.matrix() * rot.transpose();
            prop_assert!((b.p.matrix() - expect).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn position_field_variation_is_m_times_mass(v in varifold(24), x0 in vec3()) {
        let dv = first_variation(&v, &TestVectorField::position(&x0));
        prop_assert!(close(dv, 2.0 * v.mass(), 1e-12));
    }

    #[test]
    fn a_b_roundtrip(y in vec3(), a in vec3(), b in vec3(), raw in prop::collection::vec(-1.0..1.0f64, 27), sphere in any::<bool>()) {
        let amb = if sphere { AmbientManifold::sphere(2, 1.3) } else { AmbientManifold::euclidean(3) };
        prop_assume!(y.norm() > 1e-3);
        let x = amb.project(&y);
        let q = amb.tangent_projector(&x).unwrap();
        let Ok(pp) = PlaneProjector::from_spanning(&[&q * a, &q * b]) else { return Ok(()) };
        prop_assume!(pp.rank() == 2 || !sphere);
        let p = pp.matrix();
        let nperp = DMatrix::identity(3, 3) - p;
        let raw = Tensor3::from_flat(3, raw).unwrap();
        // admissible A: symmetric in (i, j), tangent in i, j and normal in k
        let a = Tensor3::from_fn(3, |i, j, k| {
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        acc += p[(i, a)] * p[(j, b)] * nperp[(k, c)] * 0.5 * (raw.get(a, b, c) + raw.get(b, a, c));
                    }
                }
            }
            acc
        });
        let dq = amb.dq(&x).unwrap();
        let back = a_from_b_atom(&b_from_a_atom(&a, p, &dq), p, &dq);
        prop_assert!(back.max_abs_diff(&a) <= 1e-10);
    }

    #[test]
    fn cutoff_profiles(t in 0.0..1.5f64, cubic in any::<bool>()) {
        let c = if cubic { Cutoff::cubic() } else { Cutoff::quartic() };
        let (phi, dphi) = c.eval(t);
        prop_assert!(dphi <= 0.0);
        prop_assert!((0.0..=1.0).contains(&phi));
        if t <= 0.5 { prop_assert_eq!(phi, 1.0); }
        if t >= 1.0 { prop_assert_eq!(phi, 0.0); }
    }

    #[test]
    fn off_roundtrip(axes in prop::array::uniform3(0.3..2.0f64)) {
        let mesh = shapes::ellipsoid(1, axes);
        let back = io::parse_off(&io::format_off(&mesh)).unwrap();
        prop_assert_eq!(back.vertices(), mesh.vertices());
        prop_assert_eq!(back.simplices(), mesh.simplices());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mesh_curvature_is_rotation_equivariant(axes in prop::array::uniform3(0.5..1.5f64), rot in rotation(), t in vec3()) {
        let mesh = shapes::ellipsoid(2, axes);
        let moved = mesh.map_vertices(|x| &rot * x + &t).unwrap();
        let h0 = mean_curvature_mesh(&varifold_from_mesh(&mesh, QuadratureRule::Centroid, None).unwrap()).unwrap();
        let h1 = mean_curvature_mesh(&varifold_from_mesh(&moved, QuadratureRule::Centroid, None).unwrap()).unwrap();
        for (a, b) in h0.h.iter().zip(&h1.h) {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            prop_assert!((&rot * a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn energy_scaling_and_weight_linearity(r in 0.3..3.0f64, lambda in 0.2..5.0f64, p in 2.2..6.0f64) {
        let spec = EnergySpec::power(Form::Mean, p, 1.0);
        let mesh = shapes::icosphere(2, r);
        let e0 = mesh_energy(&mesh, &spec).unwrap();
        let e1 = mesh_energy(&shapes::scaled(&mesh, lambda), &spec).unwrap();
        prop_assert!(close(e1, lambda.powf(2.0 - p) * e0, 1e-2));

        let v = varifold_from_mesh(&mesh, QuadratureRule::Vertex, None).unwrap();
        let f = mean_curvature_mesh(&v).unwrap();
        let base = energy(&v, EnergyField::Mean(&f), &spec).unwrap();
        let heavy = energy(&v.scale_weights(lambda).unwrap(), EnergyField::Mean(&f), &spec).unwrap();
        prop_assert!(close(heavy, lambda * base, 1e-12));
    }

    #[test]
    fn monotone_profile_is_nondecreasing_and_bounded(r in 0.5..2.0f64, k in 0usize..162, mut radii in prop::collection::vec(0.05..3.0f64, 2..8)) {
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let mesh = shapes::icosphere(2, r);
        let v = varifold_from_mesh(&mesh, QuadratureRule::Vertex, None).unwrap();
        let f = mean_curvature_mesh(&v).unwrap();
        let x0 = mesh.vertices()[k % mesh.num_vertices()].clone();
        let prof = monotone_profile(&v, &f, &x0, &radii, Cutoff::quartic()).unwrap();
        prop_assert!(prof.i.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12)));
        prop_assert!(prof.j.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12) + 1e-15));
        prop_assert!(prof.i.iter().all(|&i| i <= v.mass() * (1.0 + 1e-12)));
    }

    #[test]
    fn fundamental_margin_is_scale_invariant(lambda in 0.5..2.0f64, k in 0usize..642, p in 2.5..5.0f64) {
        let base = shapes::icosphere(3, 1.0);
        let x0 = base.vertices()[k % base.num_vertices()].clone();
        let margin = |s: f64| {
            let v = varifold_from_mesh(&shapes::scaled(&base, s), QuadratureRule::Vertex, None).unwrap();
            let f = mean_curvature_mesh(&v).unwrap();
            check_fundamental(&v, &f, &(&x0 * s), 0.5 * s, p).unwrap().margin
        };
        prop_assert!(close(margin(lambda), margin(1.0), 1e-2));
    }

    #[test]
    fn bound_status_agrees_with_margin(r in 0.3..3.0f64, p in 2.2..6.0f64) {
        let v = varifold_from_mesh(&shapes::icosphere(2, r), QuadratureRule::Vertex, None).unwrap();
        let f = mean_curvature_mesh(&v).unwrap();
        for rep in check_bounds(&v, &f, p, &BoundOptions::default()).unwrap() {
            match rep.status {
                BoundStatus::Pass => prop_assert!(rep.margin >= 1.0),
                BoundStatus::Fail => prop_assert!(rep.margin < 1.0),
                _ => prop_assert!(rep.margin.is_nan()),
            }
        }
    }

    #[test]
    fn dictionary_derivatives_match_differences(x in vec3(), x0 in vec3(), a in vec3(), b in vec3(), t in 0usize..10) {
        let dict = TestScalarDictionary::standard(3, 2.5);
        let Ok(pp) = PlaneProjector::from_spanning(&[a, b]) else { return Ok(()) };
        let p = pp.matrix();
        let t = t % dict.len();
        let d = dict.d_phi(t, &x, p, &x0);
        let h = 1e-6;
        for j in 0..3 {
            let mut e = DVector::zeros(3);
            e[j] = h;
            let fd = (dict.phi(t, &(&x + &e), p, &x0) - dict.phi(t, &(&x - &e), p, &x0)) / (2.0 * h);
            prop_assert!((fd - d[j]).abs() <= 1e-7 * (1.0 + d[j].abs()), "{fd} vs {}", d[j]);
        }
    }
}
