use super::*;
use crate::group::{group_mul, pseudoherm_transform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(c: &[f64]) -> Point<f64> {
    Point::from_coords(c).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn close_up_to_sign(a: &[f64], b: &[f64], tol: f64) -> bool {
    let neg: Vec<f64> = b.iter().map(|v| -v).collect();
    close(a, b, tol) || close(a, &neg, tol)
}

fn projector(basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = basis[0].len();
    (0..m)
        .map(|i| (0..m).map(|j| basis.iter().map(|v| v[i] * v[j]).sum()).collect())
        .collect()
}

/// `a·x + b·y + t + d = 0` with the example's parameters.
const EX: ([f64; 2], [f64; 2], f64) = ([1.0, -2.0], [0.5, 0.0], 3.0);

fn ex_surface() -> Surface {
    Surface::hyperplane(&EX.0, &EX.1, 1.0, EX.2).unwrap()
}

fn ex_point(x: [f64; 2], y: [f64; 2]) -> Point<f64> {
    let (a, b, d) = EX;
    let t = -(a[0] * x[0] + a[1] * x[1] + b[0] * y[0] + b[1] * y[1] + d);
    pt(&[x[0], x[1], y[0], y[1], t])
}

#[test]
fn hyperplane_normals_match_closed_form() {
    let s = ex_surface();
    let (a, b, _) = EX;
    let scale = (1.0 + a[0] * a[0] + a[1] * a[1] + b[0] * b[0] + b[1] * b[1]).sqrt();
    for (x, y) in [([0.2, -0.7], [1.1, 0.4]), ([-1.5, 0.0], [0.3, -2.0])] {
        let p = ex_point(x, y);
        let n = s.euclidean_normal(&p).unwrap();
        let expected: Vec<f64> = [a[0], a[1], b[0], b[1], 1.0].iter().map(|v| v / scale).collect();
        assert!(close(&n, &expected, 1e-14));
        let nh = s.horizontal_normal_raw(&p).unwrap();
        let expected_nh: Vec<f64> = [a[0] + y[0], a[1] + y[1], b[0] - x[0], b[1] - x[1]]
            .iter()
            .map(|v| v / scale)
            .collect();
        assert!(close(nh.components(), &expected_nh, 1e-14));
        let data = s.point_data(&p, CHAR_TOL).unwrap();
        let direct = 1.0 / expected_nh.iter().map(|v| (v * scale).powi(2)).sum::<f64>().sqrt();
        assert!((data.td_h.unwrap() - direct).abs() < 1e-12);
        assert!((norm(&data.normal) - 1.0).abs() < 1e-12);
        assert!((data.nu_h.unwrap().norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn hyperplane_has_its_characteristic_point() {
    let s = ex_surface();
    let (a, b, d) = EX;
    let p0 = pt(&[b[0], b[1], -a[0], -a[1], -d]);
    assert!(s.is_characteristic(&p0, CHAR_TOL).unwrap());
    assert!(!s.is_characteristic(&ex_point([b[0] + 0.01, b[1]], [-a[0], -a[1]]), CHAR_TOL).unwrap());
    assert!(matches!(s.horizontal_tangent_basis(&p0), Err(Error::Characteristic(_))));
    let data = s.point_data(&p0, CHAR_TOL).unwrap();
    assert!(data.characteristic && data.nu_h.is_none() && data.td_h.is_none());

    // general c
    let (a, b, c, d) = ([0.4, 1.0, -0.3], [2.0, -0.5, 0.1], 2.5, -1.0);
    let s = Surface::hyperplane(&a, &b, c, d).unwrap();
    let mut coords: Vec<f64> = b.iter().map(|v| v / c).collect();
    coords.extend(a.iter().map(|v| -v / c));
    coords.push(-d / c);
    assert!(s.is_characteristic(&pt(&coords), CHAR_TOL).unwrap());
}

#[test]
fn characteristic_scan_finds_single_point() {
    let s = ex_surface();
    let (a, b, _) = EX;
    let mut hits = Vec::new();
    let ticks: Vec<f64> = (0..=20).map(|i| -2.5 + 0.25 * i as f64).collect();
    for &x1 in &ticks {
        for &x2 in &ticks {
            for &y1 in &ticks {
                for &y2 in &ticks {
                    let p = ex_point([x1, x2], [y1, y2]);
                    if s.is_characteristic(&p, CHAR_TOL).unwrap() {
                        hits.push(p.coords());
                    }
                }
            }
        }
    }
    assert_eq!(hits.len(), 1);
    assert!(close(&hits[0][..4], &[b[0], b[1], -a[0], -a[1]], 1e-12));
}

#[test]
fn h0_is_characteristic_at_origin_only() {
    let s = Surface::h0(2).unwrap();
    assert_eq!(s.horizontal_normal_raw(&Point::origin(2)).unwrap().norm(), 0.0);
    assert!(!s.is_characteristic(&pt(&[1.0, 0.0, 0.0, 0.0, 0.0]), CHAR_TOL).unwrap());
}

#[test]
fn flat_t_graph_normal_points_down() {
    let s = Surface::t_graph(2, Poly::zero(4)).unwrap();
    let p = pt(&[0.3, -0.1, 2.0, 0.5, 0.0]);
    assert_eq!(s.euclidean_normal(&p).unwrap(), vec![0.0, 0.0, 0.0, 0.0, -1.0]);
    assert!(s.membership_residual(&p) == 0.0);
    let lifted = pt(&[0.3, -0.1, 2.0, 0.5, 1e-3]);
    assert!((s.membership_residual(&lifted) - 1e-3).abs() < 1e-18);
    assert!(matches!(s.euclidean_normal(&lifted), Err(Error::NotOnSurface { .. })));
}

#[test]
fn saddle_contains_origin() {
    let s = Surface::saddle(2).unwrap();
    assert_eq!(s.membership_residual(&Point::origin(2)), 0.0);
    assert!(s.is_characteristic(&Point::origin(2), CHAR_TOL).unwrap());
}

#[test]
fn vertical_hyperplane_basis_matches_explicit_span() {
    let (a, b, c) = ([1.5, -0.5, 0.25], [0.75, 2.0, -1.0], 0.3);
    let s = Surface::vertical_hyperplane(&a, &b, c).unwrap();
    let n = 3;
    // a point with ⟨(x, y), (a, b)⟩ = c
    let scale = c / (a.iter().chain(&b).map(|v| v * v).sum::<f64>());
    let mut coords: Vec<f64> = a.iter().chain(&b).map(|v| v * scale).collect();
    coords[1] += 0.7 * a[0];
    coords[0] -= 0.7 * a[1];
    coords.push(-4.0);
    let p = pt(&coords);
    let data = s.point_data(&p, CHAR_TOL).unwrap();
    assert!(!data.characteristic);
    assert_eq!(data.td_h, Some(0.0));
    let ab: Vec<f64> = a.iter().chain(&b).copied().collect();
    let ab_len = norm(&ab);
    let unit: Vec<f64> = ab.iter().map(|v| v / ab_len).collect();
    assert!(close(data.nu_h.unwrap().components(), &unit, 1e-14));

    let basis: Vec<Vec<f64>> = s
        .horizontal_tangent_basis(&p)
        .unwrap()
        .into_iter()
        .map(|v| v.components().to_vec())
        .collect();
    assert_eq!(basis.len(), 2 * n - 1);
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((dot(&basis[i], &basis[j]) - target).abs() < 1e-12);
        }
    }
    // a_i X_1 − a_1 X_i and b_j X_1 − a_1 Y_j
    let mut explicit = Vec::new();
    for i in 1..n {
        let mut v = vec![0.0; 2 * n];
        v[0] = a[i];
        v[i] = -a[0];
        explicit.push(v);
    }
    for j in 0..n {
        let mut v = vec![0.0; 2 * n];
        v[0] += b[j];
        v[n + j] -= a[0];
        explicit.push(v);
    }
    let explicit = pivoted_gram_schmidt(&explicit, 2 * n - 1, 1e-12);
    let (p1, p2) = (projector(&basis), projector(&explicit));
    for (r1, r2) in p1.iter().zip(&p2) {
        assert!(close(r1, r2, 1e-12));
    }
}

#[test]
fn tangent_basis_is_deterministic_and_sign_normalized() {
    let s = ex_surface();
    let p = ex_point([0.3, 0.9], [-0.4, 1.2]);
    let b1 = s.horizontal_tangent_basis(&p).unwrap();
    let b2 = s.horizontal_tangent_basis(&p).unwrap();
    assert_eq!(b1, b2);
    let nu = s.horizontal_normal(&p).unwrap();
    for v in &b1 {
        assert!(v.components().iter().find(|c| c.abs() > 1e-12).unwrap() > &0.0);
        assert!(v.dot(&nu).unwrap().abs() < 1e-12);
    }
}

#[test]
fn t_graph_and_level_set_agree() {
    let n = 2;
    let u = Poly::from_terms(
        4,
        vec![
            (0.3, vec![1, 0, 0, 0]),
            (-0.2, vec![0, 0, 0, 1]),
            (0.1, vec![1, 0, 1, 0]),
            (0.5, vec![0, 2, 0, 0]),
        ],
    )
    .unwrap();
    let graph = Surface::t_graph(n, u.clone()).unwrap();
    // f = t − u(z), the opposite orientation
    let m = 2 * n + 1;
    let subs: Vec<Poly<f64>> = (0..2 * n).map(|i| Poly::var(m, i).unwrap()).collect();
    let f = &Poly::var(m, 2 * n).unwrap() - &u.compose(&subs).unwrap();
    let level = Surface::implicit(n, f, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let p = graph.chart_point(&z).unwrap();
        assert!(level.membership_residual(&p) < 1e-14);
        let (d1, d2) = (graph.point_data(&p, CHAR_TOL).unwrap(), level.point_data(&p, CHAR_TOL).unwrap());
        assert!(close_up_to_sign(&d1.normal, &d2.normal, 1e-10));
        assert_eq!(d1.characteristic, d2.characteristic);
        if let (Some(a), Some(b)) = (&d1.nu_h, &d2.nu_h) {
            assert!(close_up_to_sign(a.components(), b.components(), 1e-10));
            assert!((d1.td_h.unwrap().abs() - d2.td_h.unwrap().abs()).abs() < 1e-10);
        }
    }
}

#[test]
fn intrinsic_graph_normal_and_frames_match_ambient_route() {
    let n = 2;
    let phi = Poly::from_terms(
        4,
        vec![
            (0.4, vec![1, 0, 0, 1]),
            (-0.3, vec![0, 1, 1, 0]),
            (0.2, vec![0, 0, 0, 2]),
            (0.7, vec![2, 0, 0, 0]),
            (-0.1, vec![0, 0, 0, 0]),
        ],
    )
    .unwrap();
    let s = Surface::intrinsic_y1(n, phi, BoxDomain::cube(4, 2.0)).unwrap();
    let g = s.intrinsic_graph().unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let q: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let p = g.lift_psi(&q).unwrap();
        assert!(s.membership_residual(&p) < 1e-14);
        assert!(close(&project_pi(&p), &q, 1e-13));
        assert_eq!(s.chart_point(&q).unwrap(), p);
        let nu = g.normal(&q).unwrap();
        let ambient = s.horizontal_normal(&p).unwrap();
        assert!(close_up_to_sign(nu.components(), ambient.components(), 1e-10));
        let frames: Vec<Vec<f64>> = g.frames(&q).unwrap().into_iter().map(|v| v.components().to_vec()).collect();
        let frames = pivoted_gram_schmidt(&frames, 2 * n - 1, 1e-12);
        let basis: Vec<Vec<f64>> = s
            .horizontal_tangent_basis(&p)
            .unwrap()
            .into_iter()
            .map(|v| v.components().to_vec())
            .collect();
        for (r1, r2) in projector(&frames).iter().zip(&projector(&basis)) {
            assert!(close(r1, r2, 1e-10));
        }
    }
}

#[test]
fn helicoid_is_never_characteristic() {
    let s = Surface::helicoid();
    for (r, th) in [(0.0, 0.0), (1.5, 0.3), (-2.0, 4.0), (0.7, -2.2)] {
        let p = s.chart_point(&[r, th]).unwrap();
        assert!(s.membership_residual(&p) < 1e-15);
        let data = s.point_data(&p, CHAR_TOL).unwrap();
        assert!(!data.characteristic);
        // cross product against the defining-function gradient
        let jet = s.defining_jet(&p).unwrap();
        let g = norm(&jet.gradient);
        let unit: Vec<f64> = jet.gradient.iter().map(|v| v / g).collect();
        assert!(close(&data.normal, &unit, 1e-14));
        // the ruling direction is tangent
        let w = HVec::new(&[th.cos()], &[th.sin()]).unwrap();
        assert!(w.dot(data.nu_h.as_ref().unwrap()).unwrap().abs() < 1e-14);
    }
}

#[test]
fn translating_h0_gives_the_expected_hyperplane() {
    let q = pt(&[0.5, -1.0, 2.0, 0.25, 3.0]);
    let moved = Surface::h0(2).unwrap().left_translated(&q).unwrap();
    // ⟨(ā, b̄), (x̄, ȳ)⟩ + t + d = 0 with (ā, b̄) = (−ȳ_q, x̄_q), d = −t_q
    let expected = Surface::hyperplane(&[-2.0, -0.25], &[0.5, -1.0], 1.0, -3.0).unwrap();
    assert_eq!(moved.defining_poly(), expected.defining_poly());
    let p = pt(&[0.1, 0.2, 0.3, 0.4, 0.0]);
    let image = group_mul(&q, &p).unwrap();
    assert!(moved.membership_residual(&image) < 1e-14);
}

#[test]
fn transformed_surfaces_carry_their_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = BlockRotation::random(1, &mut rng).unwrap();
    let q = pt(&[0.3, -0.8, 1.7]);
    let s = Surface::helicoid();
    let t1 = s.left_translated(&q).unwrap();
    let t2 = s.dilated(2.5).unwrap();
    let t3 = s.rotated(&r).unwrap();
    for (rr, th) in [(0.4, 0.2), (-1.0, 1.3)] {
        let p = s.chart_point(&[rr, th]).unwrap();
        let p1 = group_mul(&q, &p).unwrap();
        let p2 = crate::group::dilate(2.5, &p).unwrap();
        let p3 = pseudoherm_transform(&r, &p).unwrap();
        assert!(t1.membership_residual(&p1) < 1e-14);
        assert!(t2.membership_residual(&p2) < 1e-14);
        assert!(t3.membership_residual(&p3) < 1e-14);
        assert!(t1.defining_value(&p1).unwrap().abs() < 1e-14);
        // the helicoid's pulled-back jet stays consistent with finite differences
        let jet = t3.defining_jet(&p3).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            let mut c = p3.coords();
            c[k] += h;
            let up = t3.defining_value(&pt(&c)).unwrap();
            c[k] -= 2.0 * h;
            let down = t3.defining_value(&pt(&c)).unwrap();
            assert!(((up - down) / (2.0 * h) - jet.gradient[k]).abs() < 1e-8);
        }
    }
    let saddle = Surface::saddle(2).unwrap();
    let scaled = saddle.dilated(0.5).unwrap();
    assert!(matches!(scaled.kind(), SurfaceKind::Implicit { region: None, .. }));
    let p = saddle.chart_point(&[0.2, -0.3, 0.5, 0.1]).unwrap();
    assert!(scaled.membership_residual(&crate::group::dilate(0.5, &p).unwrap()) < 1e-15);
}

#[test]
fn construction_errors() {
    assert!(Surface::vertical_hyperplane(&[0.0], &[0.0], 1.0).is_err());
    assert!(matches!(
        Surface::implicit(1, Poly::constant(3, 2.0), None),
        Err(Error::DegenerateGradient(_))
    ));
    assert!(Surface::t_graph(2, Poly::zero(3)).is_err());
    assert!(BoxDomain::new(vec![1.0], vec![0.0]).is_err());
    let s = Surface::intrinsic_y1(1, Poly::zero(2), BoxDomain::cube(2, 1.0)).unwrap();
    assert_eq!(s.membership_residual(&pt(&[5.0, 0.0, 0.0])), f64::INFINITY);
    assert!(matches!(s.euclidean_normal(&pt(&[5.0, 0.0, 0.0])), Err(Error::OutOfDomain(_))));
}
