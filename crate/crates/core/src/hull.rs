//! Convex-hull geometry of the leader formation: the original hull, its
//! μ-dilation about the formation center, the parallel-edge distances between
//! the two and the resulting margins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leaders::LeaderModel;
use crate::pose::Vec2;
use crate::scalar::Real;

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon<T> {
    vertices: Vec<Vec2<T>>,
}

/// Closed orientation interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaInterval<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HullMargins<T> {
    pub alpha_p: T,
    pub alpha_theta: T,
}

impl<T: Real> ConvexPolygon<T> {
    /// Accepts vertices already in strictly convex counterclockwise order.
    pub fn from_ccw(vertices: Vec<Vec2<T>>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateFormation(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let k = vertices.len();
        for i in 0..k {
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            let c = vertices[(i + 2) % k];
            if !((b - a).cross(c - b) > T::zero()) {
                return Err(Error::DegenerateFormation(format!(
                    "vertices are not strictly convex counterclockwise at vertex {}",
                    (i + 1) % k
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges `(v_i, v_{i+1})` in counterclockwise order, wrapping last to first.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2<T>, Vec2<T>)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }

    /// Central dilation `v ↦ center + μ (v - center)`.
    pub fn scale_about(&self, center: Vec2<T>, mu: T) -> Self {
        debug_assert!(mu > T::zero());
        Self { vertices: self.vertices.iter().map(|&v| center + (v - center).scale(mu)).collect() }
    }

    pub fn translate(&self, by: Vec2<T>) -> Self {
        Self { vertices: self.vertices.iter().map(|&v| v + by).collect() }
    }

    /// Smallest signed distance from `p` to the edge lines; positive inside.
    pub fn clearance(&self, p: Vec2<T>) -> T {
        self.edges()
            .map(|(a, b)| (b - a).cross(p - a) / (b - a).norm())
            .fold(T::infinity(), T::min)
    }

    /// True iff `p` is inside the polygon or within `tol` of it.
    pub fn contains_point(&self, p: Vec2<T>, tol: T) -> bool {
        self.clearance(p) >= -tol
    }

    pub fn area(&self) -> T {
        let half = T::lit(0.5);
        self.edges().map(|(a, b)| a.cross(b)).sum::<T>() * half
    }

    pub fn edge_lengths(&self) -> Vec<T> {
        self.edges().map(|(a, b)| (b - a).norm()).collect()
    }
}

/// Counterclockwise convex hull (monotone chain), dropping interior and
/// collinear points.
pub fn hull_of_offsets<T: Real>(points: &[Vec2<T>]) -> Result<ConvexPolygon<T>> {
    if points.len() < 3 {
        return Err(Error::DegenerateFormation(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::DegenerateFormation("non-finite offset".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap())
    });
    pts.dedup();

    let turn = |o: Vec2<T>, a: Vec2<T>, b: Vec2<T>| (a - o).cross(b - o);
    let mut hull: Vec<Vec2<T>> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero()
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(Error::DegenerateFormation("offsets are collinear".into()));
    }
    ConvexPolygon::from_ccw(hull)
}

/// Distance between the original edge through offsets `d_i, d_j` and its
/// μ-scaled copy: `(1-μ) |d_jx d_iy - d_ix d_jy| / ‖d_j - d_i‖`.
///
/// The second factor is the distance from the formation center to the edge
/// line, so the result is linear in `1-μ`.
pub fn edge_distance<T: Real>(d_i: Vec2<T>, d_j: Vec2<T>, mu: T) -> Result<T> {
    let dx = d_i.x - d_j.x;
    let dy = d_j.y - d_i.y;
    let denom = (dy * dy + dx * dx).sqrt();
    if denom == T::zero() {
        return Err(Error::DegenerateEdge);
    }
    let a = d_j.x * d_i.y;
    let b = d_i.x * d_j.y;
    let numer = (a - b).abs();
    if numer <= T::epsilon() * (a.abs() + b.abs()) {
        return Err(Error::ZeroDistance);
    }
    Ok((T::one() - mu) * (numer / denom))
}

/// `α_p` is the smallest edge distance around the counterclockwise hull of the
/// position offsets; `α_θ = (1-μ) min_j |d_jθ|`.
pub fn margins<T: Real>(model: &LeaderModel<T>) -> Result<HullMargins<T>> {
    let hull = hull_of_offsets(&model.position_offsets())?;
    let mut alpha_p = T::infinity();
    for (a, b) in hull.edges() {
        alpha_p = alpha_p.min(edge_distance(a, b, model.mu())?);
    }
    let min_abs_theta = model
        .offsets()
        .iter()
        .map(|d| d.theta.abs())
        .fold(T::infinity(), T::min);
    Ok(HullMargins { alpha_p, alpha_theta: (T::one() - model.mu()) * min_abs_theta })
}

/// Hull of leader positions at time `t`; with `scaled`, the hull of the
/// μ-scaled targets instead.
pub fn leader_hull<T: Real>(model: &LeaderModel<T>, t: T, scaled: bool) -> Result<ConvexPolygon<T>> {
    let base = hull_of_offsets(&model.position_offsets())?;
    let base = if scaled { base.scale_about(Vec2::zero(), model.mu()) } else { base };
    Ok(base.translate(model.eval_center(t).eta.position()))
}

/// `[θ_c(t) + s·min d_θ, θ_c(t) + s·max d_θ]` with `s = μ` when scaled, else 1.
pub fn theta_interval<T: Real>(model: &LeaderModel<T>, t: T, scaled: bool) -> ThetaInterval<T> {
    let s = if scaled { model.mu() } else { T::one() };
    let theta_c = model.eval_center(t).eta.theta;
    let (lo, hi) = model.offsets().iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), d| {
        (lo.min(d.theta), hi.max(d.theta))
    });
    ThetaInterval { lo: theta_c + s * lo, hi: theta_c + s * hi }
}

impl<T: Real> ThetaInterval<T> {
    pub fn contains(&self, theta: T, tol: T) -> bool {
        theta >= self.lo - tol && theta <= self.hi + tol
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaders::Trajectory;
    use crate::pose::Pose;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn unit_square() -> ConvexPolygon<f64> {
        hull_of_offsets(&[v(1.0, 1.0), v(-1.0, 1.0), v(-1.0, -1.0), v(1.0, -1.0)]).unwrap()
    }

    /// Independent oracle: minimum distance from points sampled along the
    /// scaled edge to the original edge line, via projection onto the line.
    fn point_to_line_oracle(d_i: Vec2<f64>, d_j: Vec2<f64>, mu: f64) -> f64 {
        let dir = d_j - d_i;
        let len = dir.norm();
        (0..=100)
            .map(|k| {
                let s = k as f64 / 100.0;
                let p = (d_i + dir.scale(s)).scale(mu);
                let w = p - d_i;
                let along = w.dot(dir) / (len * len);
                let foot = d_i + dir.scale(along);
                (p - foot).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn hull_examples() {
        let sq = unit_square();
        assert_eq!(sq.len(), 4);
        assert!(sq.area() > 0.0, "counterclockwise");
        let with_center =
            hull_of_offsets(&[v(1.0, 1.0), v(-1.0, 1.0), v(0.0, 0.0), v(-1.0, -1.0), v(1.0, -1.0)])
                .unwrap();
        assert_eq!(with_center.len(), 4);
        assert!(!with_center.vertices().contains(&v(0.0, 0.0)));
        assert!(matches!(
            hull_of_offsets(&[v(0.0, 0.0), v(1.0, 1.0), v(2.0, 2.0)]),
            Err(Error::DegenerateFormation(_))
        ));
        assert!(matches!(hull_of_offsets(&[v(0.0, 0.0), v(1.0, 1.0)]), Err(Error::DegenerateFormation(_))));
    }

    #[test]
    fn collinear_boundary_points_dropped() {
        let h = hull_of_offsets(&[v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0), v(1.0, 1.0)]).unwrap();
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn scale_examples() {
        let half = unit_square().scale_about(Vec2::zero(), 0.5);
        for p in half.vertices() {
            assert_eq!((p.x.abs(), p.y.abs()), (0.5, 0.5));
        }
        let tri = hull_of_offsets(&[v(2.0, 0.0), v(0.0, 2.0), v(-2.0, -2.0)]).unwrap();
        let s = tri.scale_about(Vec2::zero(), 0.25);
        for want in [v(0.5, 0.0), v(0.0, 0.5), v(-0.5, -0.5)] {
            assert!(s.vertices().contains(&want));
        }
    }

    #[test]
    fn edge_distance_examples() {
        let (di, dj) = (v(1.0, 1.0), v(-1.0, 1.0));
        let d = edge_distance(di, dj, 0.5).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        assert!((d - point_to_line_oracle(di, dj, 0.5)).abs() < 1e-10);
        assert!((edge_distance(di, dj, 0.9).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(edge_distance(v(1.0, 0.0), v(-1.0, 0.0), 0.5), Err(Error::ZeroDistance));
        assert_eq!(edge_distance(v(1.0, 0.0), v(1.0, 0.0), 0.5), Err(Error::DegenerateEdge));
    }

    #[test]
    fn edge_distance_asymmetric_offsets_match_oracle() {
        // Offsets whose x and y differ, so a mixed-up denominator would show.
        for (di, dj) in [(v(3.0, 0.5), v(-0.5, 2.0)), (v(-2.0, -1.0), v(1.5, -3.0)), (v(0.2, 4.0), v(-3.0, 0.1))] {
            for mu in [0.1, 0.5, 0.77] {
                let d = edge_distance(di, dj, mu).unwrap();
                assert!((d - point_to_line_oracle(di, dj, mu)).abs() < 1e-10);
            }
        }
    }

    fn model(offsets: Vec<Pose<f64>>, mu: f64) -> LeaderModel<f64> {
        LeaderModel::new(Trajectory::Stationary { pose: Pose::zero() }, offsets, mu).unwrap()
    }

    #[test]
    fn margins_examples() {
        let sq = model(
            vec![
                Pose::new(1.0, 1.0, -0.2),
                Pose::new(-1.0, 1.0, 0.1),
                Pose::new(-1.0, -1.0, 0.3),
                Pose::new(1.0, -1.0, 0.4),
            ],
            0.5,
        );
        let m = margins(&sq).unwrap();
        assert!((m.alpha_p - 0.5).abs() < 1e-15);
        assert!((m.alpha_theta - 0.05).abs() < 1e-15);

        let with_zero = model(
            vec![Pose::new(1.0, 1.0, 0.0), Pose::new(-1.0, 1.0, 0.1), Pose::new(0.0, -1.0, -0.3)],
            0.5,
        );
        assert_eq!(margins(&with_zero).unwrap().alpha_theta, 0.0);

        // Equilateral triangle with circumradius 1: inradius 0.5.
        let tri: Vec<Pose<f64>> = (0..3)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_2 + k as f64 * 2.0 * std::f64::consts::PI / 3.0;
                Pose::new(a.cos(), a.sin(), 0.1)
            })
            .collect();
        let m = margins(&model(tri, 0.5)).unwrap();
        assert!((m.alpha_p - 0.25).abs() < 1e-12);
    }

    #[test]
    fn contains_examples() {
        let sq = hull_of_offsets(&[v(1.0, 0.0), v(0.0, 1.0), v(-1.0, 0.0), v(0.0, -1.0)]).unwrap();
        let unit = unit_square();
        assert!(unit.contains_point(v(0.0, 0.0), 0.0));
        assert!(!unit.contains_point(v(2.0, 0.0), 0.0));
        assert!(unit.contains_point(v(1.0 + 1e-9, 0.0), 1e-6));
        assert!(!unit.contains_point(v(1.0 + 1e-3, 0.0), 1e-6));
        assert!(sq.contains_point(v(0.5, 0.5), 0.0));
    }

    #[test]
    fn theta_interval_examples() {
        let m = model(vec![Pose::new(1.0, 0.0, -0.2), Pose::new(0.0, 1.0, 0.3), Pose::new(-1.0, -1.0, 0.0)], 0.5);
        let i = theta_interval(&m, 0.0, true);
        assert!((i.lo + 0.1).abs() < 1e-15 && (i.hi - 0.15).abs() < 1e-15);

        let shifted = LeaderModel::new(
            Trajectory::Stationary { pose: Pose::new(0.0, 0.0, 1.0) },
            m.offsets().to_vec(),
            0.5,
        )
        .unwrap();
        let i = theta_interval(&shifted, 0.0, false);
        assert!((i.lo - 0.8).abs() < 1e-15 && (i.hi - 1.3).abs() < 1e-15);

        let single = LeaderModel::new(
            Trajectory::Stationary { pose: Pose::new(0.0, 0.0, 1.0) },
            vec![Pose::new(1.0, 0.0, 0.0)],
            0.5,
        )
        .unwrap();
        let i = theta_interval(&single, 0.0, true);
        assert_eq!((i.lo, i.hi), (1.0, 1.0));
    }

    #[test]
    fn leader_hull_translates_with_center() {
        let m = LeaderModel::new(
            Trajectory::Stationary { pose: Pose::new(5.0, -1.0, 0.0) },
            vec![Pose::new(1.0, 1.0, 0.0), Pose::new(-1.0, 1.0, 0.0), Pose::new(0.0, -1.0, 0.0)],
            0.5,
        )
        .unwrap();
        let h = leader_hull(&m, 0.0, true).unwrap();
        assert!(h.vertices().contains(&v(5.5, -0.5)));
        assert!(h.contains_point(v(5.0, -1.0), 0.0));
    }
}
