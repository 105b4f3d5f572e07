#![allow(dead_code)]

use containment_core::{InteractionGraph, LeaderModel, Pose, Trajectory};
use rand::Rng;

/// Random graph with `n ≤ max_n` followers and `m ≤ max_m` leaders that
/// satisfies Assumption 1 (rejection sampling through the library's own
/// checker, so graphs that fail it are never returned).
pub fn random_graph(rng: &mut impl Rng, max_n: usize, max_m: usize) -> InteractionGraph {
    loop {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=max_m);
        let p_ff = rng.gen_range(0.15..0.7);
        let p_lf = rng.gen_range(0.1..0.5);
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                if rng.gen_bool(p_ff) {
                    edges.push((i, j));
                }
            }
            for l in n + 1..=n + m {
                if rng.gen_bool(p_lf) {
                    edges.push((l, i));
                }
            }
        }
        let g = InteractionGraph::new(n, m, &edges).expect("well-formed edges");
        if g.check_assumption1().holds() {
            return g;
        }
    }
}

/// Offsets whose planar parts are the vertices of a convex polygon strictly
/// enclosing the origin, with headings of both signs.
pub fn random_formation(rng: &mut impl Rng, m: usize) -> Vec<Pose<f64>> {
    loop {
        let mut angles: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let r = rng.gen_range(0.5..3.0);
        let offsets: Vec<Pose<f64>> = angles
            .iter()
            .map(|a| {
                let rr = r * rng.gen_range(0.8..1.2);
                Pose::new(rr * a.cos(), rr * a.sin(), rng.gen_range(-0.6..0.6))
            })
            .collect();
        let model = LeaderModel::new(Trajectory::Stationary { pose: Pose::zero() }, offsets.clone(), 0.5).unwrap();
        if matches!(model.check_assumption3(), Ok(r) if r.holds()) {
            return offsets;
        }
    }
}

/// Square matrix determinant by Laplace expansion along the first row.
pub fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[0][j] * det(&minor(a, 0, j))
        })
        .sum()
}

pub fn minor(a: &[Vec<f64>], r: usize, c: usize) -> Vec<Vec<f64>> {
    a.iter()
        .enumerate()
        .filter(|&(i, _)| i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
        .collect()
}

/// Inverse via the classical adjugate: `A⁻¹ = adj(A) / det(A)`.
pub fn adjugate_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let d = det(a);
    if n == 1 {
        return vec![vec![1.0 / d]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * det(&minor(a, j, i)) / d
                })
                .collect()
        })
        .collect()
}
