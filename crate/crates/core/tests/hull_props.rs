mod common;

use containment_core::hull::{edge_distance, hull_of_offsets, margins};
use containment_core::{LeaderModel, Pose, Trajectory, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type P = (f64, f64);

fn seg_dist(p: P, a: P, b: P) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let s = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    (p.0 - a.0 - s * dx).hypot(p.1 - a.1 - s * dy)
}

fn line_dist(p: P, a: P, b: P) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let s = ((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy);
    (p.0 - a.0 - s * dx).hypot(p.1 - a.1 - s * dy)
}

fn boundary_dist(p: P, poly: &[P]) -> f64 {
    (0..poly.len()).map(|k| seg_dist(p, poly[k], poly[(k + 1) % poly.len()])).fold(f64::INFINITY, f64::min)
}

fn inside(p: P, poly: &[P]) -> bool {
    (0..poly.len()).all(|k| {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0
    })
}

fn model(offsets: Vec<Pose<f64>>, mu: f64) -> LeaderModel<f64> {
    LeaderModel::new(Trajectory::Stationary { pose: Pose::zero() }, offsets, mu).unwrap()
}

/// Points in the scaled polygon (vertices, edge points, convex combinations)
/// and points outside the original one.
fn samples(rng: &mut impl Rng, orig: &[P], scaled: &[P], count: usize) -> (Vec<P>, Vec<P>) {
    let k = scaled.len();
    let mut ins: Vec<P> = scaled.to_vec();
    while ins.len() < count {
        if rng.gen_bool(0.5) {
            let e = rng.gen_range(0..k);
            let (a, b) = (scaled[e], scaled[(e + 1) % k]);
            let s: f64 = rng.gen();
            ins.push((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)));
        } else {
            let w: Vec<f64> = (0..k).map(|_| rng.gen::<f64>().powi(3)).collect();
            let tot: f64 = w.iter().sum();
            ins.push(scaled.iter().zip(&w).fold((0.0, 0.0), |acc, (p, wi)| (acc.0 + p.0 * wi / tot, acc.1 + p.1 * wi / tot)));
        }
    }
    let reach = orig.iter().map(|p| p.0.hypot(p.1)).fold(0.0, f64::max) * 1.5;
    let mut outs = Vec::with_capacity(count);
    while outs.len() < count {
        let p = (rng.gen_range(-reach..reach), rng.gen_range(-reach..reach));
        if !inside(p, orig) {
            outs.push(p);
        }
    }
    (ins, outs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn scaled_hull_keeps_alpha_p_clear_of_the_outside(seed in any::<u64>(), m in 3usize..7, mu in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = common::random_formation(&mut rng, m);
        let model = model(offsets, mu);
        let alpha = margins(&model).unwrap().alpha_p;
        let hull = hull_of_offsets(&model.position_offsets()).unwrap();
        let orig: Vec<P> = hull.vertices().iter().map(|v| (v.x, v.y)).collect();
        let scaled: Vec<P> = orig.iter().map(|p| (mu * p.0, mu * p.1)).collect();
        let (ins, outs) = samples(&mut rng, &orig, &scaled, 2000);
        // Distance from a point inside to the complement is its distance to the boundary.
        let d_in = ins.iter().map(|&p| boundary_dist(p, &orig)).fold(f64::INFINITY, f64::min);
        let d_out = outs.iter().map(|&p| boundary_dist(p, &scaled)).fold(f64::INFINITY, f64::min);
        prop_assert!(d_in >= alpha - 1e-12 && d_out >= alpha - 1e-12, "{d_in} {d_out} {alpha}");
        // The bound is attained on the closest paired edges.
        prop_assert!(d_in <= alpha + 1e-9);
    }

    #[test]
    fn alpha_p_is_linear_in_one_minus_mu(seed in any::<u64>(), m in 3usize..7, mu in 0.01f64..0.99) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = common::random_formation(&mut rng, m);
        let at = |mu: f64| margins(&model(offsets.clone(), mu)).unwrap();
        let (a, half) = (at(mu), at(0.5));
        prop_assert!((a.alpha_p / (1.0 - mu) - half.alpha_p / 0.5).abs() <= 1e-12 * half.alpha_p.max(1.0));
        let min_theta = offsets.iter().map(|d| d.theta.abs()).fold(f64::INFINITY, f64::min);
        prop_assert!((a.alpha_theta - (1.0 - mu) * min_theta).abs() <= 1e-15);
    }

    #[test]
    fn scaling_commutes_with_taking_the_hull(seed in any::<u64>(), m in 3usize..7, mu in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = model(common::random_formation(&mut rng, m), mu).position_offsets();
        let scaled_pts: Vec<_> = pts.iter().map(|p| p.scale(mu)).collect();
        let a = hull_of_offsets(&scaled_pts).unwrap();
        let b = hull_of_offsets(&pts).unwrap().scale_about(Vec2::zero(), mu);
        prop_assert_eq!(a.len(), b.len());
        for (u, v) in a.vertices().iter().zip(b.vertices()) {
            prop_assert!((u.x - v.x).abs() < 1e-14 && (u.y - v.y).abs() < 1e-14);
        }
        let orig_area = hull_of_offsets(&pts).unwrap().area();
        prop_assert!((a.area() - mu * mu * orig_area).abs() <= 1e-12 * orig_area);
    }

    #[test]
    fn edge_distance_matches_point_to_line(x1 in -5.0f64..5.0, y1 in -5.0f64..5.0,
                                           x2 in -5.0f64..5.0, y2 in -5.0f64..5.0, mu in 0.0f64..1.0) {
        prop_assume!((x1 - x2).hypot(y1 - y2) > 1e-3);
        prop_assume!((x1 * y2 - x2 * y1).abs() > 1e-6);
        let got = edge_distance(Vec2::new(x1, y1), Vec2::new(x2, y2), mu).unwrap();
        // Distance from the scaled edge's line to the original edge's line.
        let want = line_dist((mu * x1, mu * y1), (x1, y1), (x2, y2));
        prop_assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }
}

#[test]
fn nested_hulls_under_time_varying_center() {
    use containment_core::hull::leader_hull;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let offsets = common::random_formation(&mut rng, 5);
    let model = LeaderModel::new(
        Trajectory::Circle { center: Vec2::zero(), radius: 2.0, omega: 0.5, theta0: 0.0, spin: false },
        offsets,
        0.4,
    )
    .unwrap();
    let alpha = margins(&model).unwrap().alpha_p;
    for k in 0..20 {
        let t = 0.37 * k as f64;
        let outer = leader_hull(&model, t, false).unwrap();
        let inner = leader_hull(&model, t, true).unwrap();
        for v in inner.vertices() {
            assert!(outer.clearance(*v) >= alpha - 1e-12);
        }
    }
}
