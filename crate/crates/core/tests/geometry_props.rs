//! Randomized property suites for the hyperboloid kernel: sheet closure,
//! metric axioms, exp/log inversion, ball-model agreement, boundary-field
//! asymptotics, isometry invariance, and transport identities.
//!
//! Points are generated by shooting geodesics from the origin, so every
//! suite exercises the numerically delicate regime (radii up to 5, pairwise
//! distances up to 10) rather than a neighborhood of the base point.

use hyperq::{
    dist, exp_map, from_ball, log_map, minkowski_inner, parallel_transport, radial_field,
    tangent_basis, to_ball, BoundaryDir, HPoint, LorentzIsometry, TangentVec,
};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Geodesic shot from the origin: direction from the weight vector `w`
/// (degenerate weights fall back to the origin itself), length `r`.
fn point_from(n: usize, w: &[f64], r: f64) -> HPoint {
    let o = HPoint::origin(n);
    let basis = tangent_basis(&o);
    let mut v = TangentVec::zero(o.clone());
    for (b, &c) in basis.iter().zip(w) {
        v = v.add(&b.scale(c));
    }
    let nrm = v.norm();
    if nrm < 1e-6 {
        return o;
    }
    exp_map(&o, &v.scale(r / nrm))
}

/// Unit tangent at `p` spanned by the weights, or None when they cancel.
fn unit_tangent_at(p: &HPoint, w: &[f64]) -> Option<TangentVec> {
    let basis = tangent_basis(p);
    let mut v = TangentVec::zero(p.clone());
    for (b, &c) in basis.iter().zip(w) {
        v = v.add(&b.scale(c));
    }
    if v.norm() < 1e-3 {
        return None;
    }
    Some(v.normalized().unwrap())
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn point_strategy(n: usize, rmax: f64) -> impl Strategy<Value = HPoint> {
    (weights(n), 0.0f64..rmax).prop_map(move |(w, r)| point_from(n, &w, r))
}

/// Two points of a shared dimension in {2, 3}, plus spare weight vectors and
/// a seed, which is everything any suite below needs.
#[allow(clippy::type_complexity)]
fn scene(rmax: f64) -> impl Strategy<Value = (HPoint, HPoint, Vec<f64>, Vec<f64>, u64)> {
    (2usize..=3).prop_flat_map(move |n| {
        (
            point_strategy(n, rmax),
            point_strategy(n, rmax),
            weights(n),
            weights(n),
            any::<u64>(),
        )
    })
}

fn sheet_defect(p: &HPoint) -> f64 {
    (minkowski_inner(p.coords(), p.coords()).unwrap() + 1.0).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn produced_points_satisfy_the_sheet_constraint((p, q, _, _, _) in scene(5.0)) {
        for pt in [&p, &q] {
            prop_assert!(sheet_defect(pt) < 1e-9);
            prop_assert!(pt.coords()[0] > 0.0);
        }
        // Geodesic interpolation and the ball round trip stay on the sheet.
        let mid = exp_map(&p, &log_map(&p, &q).scale(0.5));
        prop_assert!(sheet_defect(&mid) < 1e-9);
        prop_assert!(sheet_defect(&from_ball(&to_ball(&p))) < 1e-9);
    }

    #[test]
    fn exp_inverts_log((p, q, _, _, _) in scene(5.0)) {
        let back = exp_map(&p, &log_map(&p, &q));
        prop_assert!(dist(&back, &q) < 1e-8);
    }

    #[test]
    fn metric_axioms_hold((p, q, w, _, r) in scene(5.0)) {
        let m = point_from(p.dim(), &w, (r % 1000) as f64 / 200.0);
        prop_assert!(dist(&p, &q) >= 0.0);
        // Symmetry is exact: both orders evaluate the same products in the
        // same index order.
        prop_assert_eq!(dist(&p, &q).to_bits(), dist(&q, &p).to_bits());
        let slack = 1e-10 * (1.0 + dist(&p, &m) + dist(&m, &q));
        prop_assert!(dist(&p, &q) <= dist(&p, &m) + dist(&m, &q) + slack);
        prop_assert_eq!(dist(&p, &p), 0.0);
    }

    #[test]
    fn exp_moves_by_the_tangent_norm((p, _, w, _, _) in scene(3.0), t in 0.0f64..10.0) {
        if let Some(h) = unit_tangent_at(&p, &w) {
            let q = exp_map(&p, &h.scale(t));
            prop_assert!((dist(&p, &q) - t).abs() < 1e-8);
        }
    }

    #[test]
    fn ball_model_agrees_with_the_hyperboloid((p, q, _, _, _) in scene(5.0)) {
        let (u, v) = (to_ball(&p), to_ball(&q));
        prop_assert!(u.coords().norm() < 1.0);
        prop_assert!(dist(&from_ball(&u), &p) < 1e-8);
        // Independent ball-model distance:
        // cosh d = 1 + 2 |u - v|^2 / ((1 - |u|^2)(1 - |v|^2)).
        let du = (u.coords() - v.coords()).norm_squared();
        let den = (1.0 - u.coords().norm_squared()) * (1.0 - v.coords().norm_squared());
        let ball_d = (1.0 + 2.0 * du / den).max(1.0).acosh();
        prop_assert!((ball_d - dist(&p, &q)).abs() < 1e-8);
    }

    #[test]
    fn radial_fields_are_unit_ray_limits((y, p, w, _, _) in scene(2.0)) {
        if let Some(dir) = unit_tangent_at(&y, &w) {
            let xi = BoundaryDir::new(y.clone(), dir.clone()).unwrap();
            let field = radial_field(&xi, &p);
            prop_assert!((field.norm() - 1.0).abs() < 1e-9);
            // The normalized log of a point far out on the ray toward xi
            // converges to the field.
            let far = exp_map(&y, &dir.scale(30.0));
            let toward = log_map(&p, &far).normalized().unwrap();
            prop_assert!(toward.add(&field.scale(-1.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn isometries_preserve_distances_angles_and_fields((p, q, w, w2, seed) in scene(2.0)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = LorentzIsometry::random(p.dim(), 1.5, &mut rng);
        let (gp, gq) = (g.apply_point(&p), g.apply_point(&q));
        prop_assert!((dist(&gp, &gq) - dist(&p, &q)).abs() < 1e-8);

        if dist(&p, &q) > 1e-3 {
            if let Some(h) = unit_tangent_at(&p, &w) {
                // Angle at p between the geodesic to q and the direction h.
                let toward = log_map(&p, &q).normalized().unwrap();
                let angle = toward.inner(&h);
                let g_toward = log_map(&gp, &gq).normalized().unwrap();
                let g_angle = g_toward.inner(&g.apply_tangent(&h));
                prop_assert!((angle - g_angle).abs() < 1e-8);
            }
        }
        if let Some(dir) = unit_tangent_at(&q, &w2) {
            let xi = BoundaryDir::new(q.clone(), dir).unwrap();
            let pushed = g.apply_tangent(&radial_field(&xi, &p));
            let of_pushed = radial_field(&g.apply_boundary(&xi), &gp);
            prop_assert!(pushed.add(&of_pushed.scale(-1.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn transport_is_an_isometry_of_tangent_spaces(
        (p, q, w, w2, _) in scene(3.0),
        s in -5.0f64..5.0,
        t in -5.0f64..5.0,
    ) {
        let (Some(a), Some(b)) = (unit_tangent_at(&p, &w), unit_tangent_at(&p, &w2)) else {
            return Ok(());
        };
        let (v, u) = (a.scale(s), b.scale(t));
        let moved = parallel_transport(&v, &q);
        prop_assert!((moved.norm() - v.norm()).abs() < 1e-9 * (1.0 + v.norm()));
        let back = parallel_transport(&moved, &p);
        prop_assert!(back.add(&v.scale(-1.0)).norm() < 1e-8 * (1.0 + v.norm()));
        let moved_u = parallel_transport(&u, &q);
        let scale = 1.0 + v.norm() * u.norm();
        prop_assert!((moved_u.inner(&moved) - u.inner(&v)).abs() < 1e-8 * scale);
    }

    #[test]
    fn tangent_bases_are_orthonormal_and_reconstructive((p, _, w, _, _) in scene(4.0)) {
        let basis = tangent_basis(&p);
        prop_assert_eq!(basis.len(), p.dim());
        for (i, bi) in basis.iter().enumerate() {
            prop_assert!(
                minkowski_inner(bi.vec(), p.coords()).unwrap().abs() < 1e-9
            );
            for (j, bj) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((bi.inner(bj) - want).abs() < 1e-9);
            }
        }
        // Coefficient expansion inverts on a generic tangent vector.
        let mut v = TangentVec::zero(p.clone());
        for (b, &c) in basis.iter().zip(&w) {
            v = v.add(&b.scale(3.0 * c));
        }
        let coords = v.basis_coords(&basis);
        let mut rebuilt = TangentVec::zero(p.clone());
        for (b, &c) in basis.iter().zip(coords.iter()) {
            rebuilt = rebuilt.add(&b.scale(c));
        }
        prop_assert!(rebuilt.add(&v.scale(-1.0)).norm() < 1e-9 * (1.0 + v.norm()));
    }
}
