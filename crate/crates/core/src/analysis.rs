//! Centralized quantities used to certify convergence: the containment error
//! `ξ_F`, the filtered error `S_F`, the Lyapunov value `V1` and its
//! exponential envelope. None of this is available to an individual agent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, LaplacianPartition};
use crate::leaders::LeaderModel;
use crate::observer::{stacked_coupling, AgentState, Gains};
use crate::pose::{stacked_norm, Pose};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnosticsFrame<T> {
    pub t: T,
    pub xi: Vec<Pose<T>>,
    pub xi_dot: Vec<Pose<T>>,
    pub big_s: Vec<Pose<T>>,
    /// Stacked coupling signals, each computed by its own agent.
    pub s_stack: Vec<Pose<T>>,
    pub v1: T,
    pub envelope: T,
}

/// Comparison-principle bound on `V1(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Envelope<T> {
    pub v1_0: T,
    pub lambda1: T,
    /// `n² γ1 η̄_c`.
    pub forcing: T,
    pub gamma2: T,
}

/// `P η̃_L(t)` blockwise: each follower's limit pose as a convex combination of
/// the scaled leader targets.
pub fn limit_target<T: Real>(partition: &LaplacianPartition<T>, model: &LeaderModel<T>, t: T) -> Vec<Pose<T>> {
    let (targets, _) = model.scaled_targets(t);
    partition.projection.kron3_apply(&targets)
}

/// `ξ_F = η_F + (L1⁻¹L2 ⊗ I3) η̃_L = η_F - P η̃_L`.
pub fn xi<T: Real>(
    states: &[AgentState<T>],
    partition: &LaplacianPartition<T>,
    model: &LeaderModel<T>,
    t: T,
) -> Vec<Pose<T>> {
    states.iter().zip(limit_target(partition, model, t)).map(|(s, target)| s.eta - target).collect()
}

/// `ξ̇_F = φ_F - P η̇̃_L`.
pub fn xi_dot<T: Real>(
    states: &[AgentState<T>],
    partition: &LaplacianPartition<T>,
    model: &LeaderModel<T>,
    t: T,
) -> Vec<Pose<T>> {
    let c = model.eval_center(t);
    let rates = partition.projection.kron3_apply(&vec![c.d1; model.m()]);
    states.iter().zip(rates).map(|(s, r)| s.phi - r).collect()
}

/// `S_F = ρ_F - P η̈̃_L + g1 (φ_F - P η̇̃_L) + g2 (η_F - P η̃_L)`.
pub fn big_s<T: Real>(
    states: &[AgentState<T>],
    partition: &LaplacianPartition<T>,
    model: &LeaderModel<T>,
    gains: &Gains<T>,
    t: T,
) -> Vec<Pose<T>> {
    let (targets, c) = model.scaled_targets(t);
    let p = &partition.projection;
    let m = model.m();
    let pos = p.kron3_apply(&targets);
    let vel = p.kron3_apply(&vec![c.d1; m]);
    let acc = p.kron3_apply(&vec![c.d2; m]);
    states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.rho - acc[i]) + (s.phi - vel[i]) * gains.g1 + (s.eta - pos[i]) * gains.g2)
        .collect()
}

/// Stacked coupling signal assembled centrally from the Laplacian blocks:
/// `(L1⊗I3)(ρ + g1 φ + g2 η) + (L2⊗I3)(η̈̃_L + g1 η̇̃_L + g2 η̃_L)`.
pub fn centralized_coupling<T: Real>(
    states: &[AgentState<T>],
    partition: &LaplacianPartition<T>,
    model: &LeaderModel<T>,
    gains: &Gains<T>,
    t: T,
) -> Vec<Pose<T>> {
    let (targets, c) = model.scaled_targets(t);
    let own: Vec<Pose<T>> = states.iter().map(|s| s.rho + s.phi * gains.g1 + s.eta * gains.g2).collect();
    let lead: Vec<Pose<T>> = targets.iter().map(|&p| c.d2 + c.d1 * gains.g1 + p * gains.g2).collect();
    partition
        .l1
        .kron3_apply(&own)
        .into_iter()
        .zip(partition.l2.kron3_apply(&lead))
        .map(|(a, b)| a + b)
        .collect()
}

/// `V1 = ½ S_Fᵀ (L1⊗I3) S_F`.
pub fn v1<T: Real>(big_s: &[Pose<T>], partition: &LaplacianPartition<T>) -> T {
    let l1s = partition.l1.kron3_apply(big_s);
    T::lit(0.5) * big_s.iter().zip(&l1s).map(|(a, b)| a.dot(*b)).sum::<T>()
}

/// `λ1 = 2 g3 λ_min²(L1) / λ_max(L1)`.
pub fn lambda1<T: Real>(gains: &Gains<T>, partition: &LaplacianPartition<T>) -> T {
    T::lit(2.0) * gains.g3 * partition.min_eig_l1 * partition.min_eig_l1 / partition.max_eig_l1
}

impl<T: Real> Envelope<T> {
    pub fn new(v1_0: T, gains: &Gains<T>, partition: &LaplacianPartition<T>, eta_bar: T) -> Self {
        let n = T::from_count(partition.n());
        Self { v1_0, lambda1: lambda1(gains, partition), forcing: n * n * gains.gamma1 * eta_bar, gamma2: gains.gamma2 }
    }

    /// `e^{-λ1 t} V1(0) + n² γ1 η̄ · k(t)` with `k = t e^{-λ1 t}` when
    /// `λ1 = γ2` and `(e^{-λ1 t} - e^{-γ2 t}) / (γ2 - λ1)` otherwise.
    pub fn at(&self, t: T) -> T {
        let decay = (-self.lambda1 * t).exp();
        let gap = self.gamma2 - self.lambda1;
        let kernel = if gap.abs() <= T::lit(1e-9) * self.lambda1.max(self.gamma2) {
            t * decay
        } else {
            (decay - (-self.gamma2 * t).exp()) / gap
        };
        decay * self.v1_0 + self.forcing * kernel
    }

    /// `V1 ≤ envelope·(1 + 1e-6) + 1e-12`.
    pub fn dominates(&self, t: T, v1: T) -> bool {
        v1 <= self.at(t) * (T::one() + T::lit(1e-6)) + T::lit(1e-12)
    }
}

/// Free-function form of [`Envelope::at`].
pub fn envelope<T: Real>(
    v1_0: T,
    t: T,
    gains: &Gains<T>,
    partition: &LaplacianPartition<T>,
    eta_bar: T,
) -> T {
    Envelope::new(v1_0, gains, partition, eta_bar).at(t)
}

/// Least-squares slope of `ln(value)` against time.
pub fn exp_rate<T: Real>(series: &[(T, T)]) -> Result<T> {
    if series.len() < 10 {
        return Err(Error::InvalidParameter(format!("exp_rate needs at least 10 samples, got {}", series.len())));
    }
    if let Some(index) = series.iter().position(|&(_, v)| !(v > T::zero())) {
        return Err(Error::NonPositiveValue { index });
    }
    let k = T::from_count(series.len());
    let mean_t = series.iter().map(|&(t, _)| t).sum::<T>() / k;
    let mean_y = series.iter().map(|&(_, v)| v.ln()).sum::<T>() / k;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for &(t, v) in series {
        let dt = t - mean_t;
        sxy += dt * (v.ln() - mean_y);
        sxx += dt * dt;
    }
    Ok(sxy / sxx)
}

impl<T: Real> DiagnosticsFrame<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        graph: &InteractionGraph,
        partition: &LaplacianPartition<T>,
        model: &LeaderModel<T>,
        gains: &Gains<T>,
        states: &[AgentState<T>],
        t: T,
        envelope: &Envelope<T>,
    ) -> Result<Self> {
        let big_s = big_s(states, partition, model, gains, t);
        Ok(Self {
            t,
            xi: xi(states, partition, model, t),
            xi_dot: xi_dot(states, partition, model, t),
            s_stack: stacked_coupling(graph, states, model, gains, t)?,
            v1: v1(&big_s, partition),
            big_s,
            envelope: envelope.at(t),
        })
    }

    pub fn xi_norm(&self) -> T {
        stacked_norm(&self.xi)
    }

    pub fn big_s_norm(&self) -> T {
        stacked_norm(&self.big_s)
    }

    /// `‖(L1⊗I3) S_F - s_F‖ / (1 + ‖s_F‖)`.
    pub fn identity_residual(&self, partition: &LaplacianPartition<T>) -> T {
        let lhs = partition.l1.kron3_apply(&self.big_s);
        let diff: Vec<Pose<T>> = lhs.iter().zip(&self.s_stack).map(|(a, b)| *a - *b).collect();
        stacked_norm(&diff) / (T::one() + stacked_norm(&self.s_stack))
    }

    pub fn envelope_holds(&self) -> bool {
        self.v1 <= self.envelope * (T::one() + T::lit(1e-6)) + T::lit(1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leaders::Trajectory;
    use crate::linalg::Matrix;

    fn gains() -> Gains<f64> {
        Gains { g1: 1.5, g2: 0.7, g3: 1.0, g4: 1.0, gamma1: 1.0, gamma2: 1.0 }
    }

    fn triangle(traj: Trajectory<f64>, mu: f64) -> LeaderModel<f64> {
        LeaderModel::new(
            traj,
            vec![Pose::new(2.0, 0.0, 0.3), Pose::new(-1.0, 1.5, -0.2), Pose::new(-1.0, -1.5, 0.1)],
            mu,
        )
        .unwrap()
    }

    #[test]
    fn limit_target_examples() {
        let star = InteractionGraph::new(1, 3, &[(2, 1), (3, 1), (4, 1)]).unwrap();
        let model = triangle(Trajectory::Stationary { pose: Pose::new(1.0, 1.0, 0.0) }, 0.5);
        let target = limit_target(&star.partition().unwrap(), &model, 0.0);
        let centroid: Pose<f64> =
            (0..3).map(|j| model.eval_scaled_leader(j, 0.0).unwrap()).sum::<Pose<f64>>() * (1.0 / 3.0);
        assert!((target[0] - centroid).max_abs() < 1e-14);

        let path = InteractionGraph::new(2, 1, &[(1, 2), (3, 2)]).unwrap();
        let one = LeaderModel::new(Trajectory::Stationary { pose: Pose::zero() }, vec![Pose::new(2.0, 4.0, 0.2)], 0.5)
            .unwrap();
        let target = limit_target(&path.partition().unwrap(), &one, 0.0);
        for t in &target {
            assert!((*t - Pose::new(1.0, 2.0, 0.1)).max_abs() < 1e-14);
        }

        let g = InteractionGraph::new(2, 3, &[(1, 2), (3, 1), (4, 2), (5, 2)]).unwrap();
        let p = g.partition().unwrap();
        assert_eq!(limit_target(&p, &model, 0.0), limit_target(&p, &model, 12.5));
    }

    #[test]
    fn xi_examples() {
        let g = InteractionGraph::new(1, 3, &[(2, 1), (3, 1), (4, 1)]).unwrap();
        let p = g.partition().unwrap();
        let model = triangle(Trajectory::Stationary { pose: Pose::zero() }, 0.5);
        let target = limit_target(&p, &model, 0.0)[0];
        let at_limit = [AgentState::at_rest(target)];
        assert!(stacked_norm(&xi(&at_limit, &p, &model, 0.0)) < 1e-15);
        let off = [AgentState::at_rest(target + Pose::new(1.0, 0.0, 0.0))];
        assert!((xi(&off, &p, &model, 0.0)[0] - Pose::new(1.0, 0.0, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn big_s_stationary_is_g2_xi() {
        let g = InteractionGraph::new(2, 3, &[(1, 2), (3, 1), (4, 2), (5, 2)]).unwrap();
        let p = g.partition().unwrap();
        let model = triangle(Trajectory::Stationary { pose: Pose::new(0.3, 0.1, 0.0) }, 0.5);
        let states = [AgentState::at_rest(Pose::new(1.0, 2.0, 0.5)), AgentState::at_rest(Pose::new(-1.0, 0.0, 0.1))];
        let s = big_s(&states, &p, &model, &gains(), 0.0);
        let x = xi(&states, &p, &model, 0.0);
        for (a, b) in s.iter().zip(&x) {
            assert!((*a - *b * gains().g2).max_abs() < 1e-14);
        }
    }

    #[test]
    fn big_s_zero_at_limit_with_matched_rates() {
        let g = InteractionGraph::new(2, 3, &[(1, 2), (3, 1), (4, 2), (5, 2)]).unwrap();
        let p = g.partition().unwrap();
        let model = triangle(
            Trajectory::Circle { center: crate::pose::Vec2::zero(), radius: 2.0, omega: 0.5, theta0: 0.0, spin: true },
            0.5,
        );
        let t = 2.2;
        let c = model.eval_center(t);
        let states: Vec<_> =
            limit_target(&p, &model, t).into_iter().map(|e| AgentState::new(e, c.d1, c.d2)).collect();
        assert!(stacked_norm(&big_s(&states, &p, &model, &gains(), t)) < 1e-13);
    }

    #[test]
    fn v1_examples() {
        let star = InteractionGraph::new(1, 3, &[(2, 1), (3, 1), (4, 1)]).unwrap();
        let p = star.partition().unwrap();
        assert_eq!(v1(&[Pose::zero()], &p), 0.0);
        assert_eq!(v1(&[Pose::new(1.0, 0.0, 0.0)], &p), 1.5);
    }

    #[test]
    fn envelope_examples() {
        let p = InteractionGraph::new(2, 1, &[(1, 2), (3, 2)]).unwrap().partition::<f64>().unwrap();
        let g = gains();
        assert_eq!(envelope(3.0, 0.0, &g, &p, 0.7), 3.0);

        let l1 = lambda1(&g, &p);
        let pure = envelope(3.0, 2.0, &g, &p, 0.0);
        assert!((pure - 3.0 * (-l1 * 2.0).exp()).abs() < 1e-15);

        // Continuity across the λ1 = γ2 branch.
        for eps in [1e-6, -1e-6] {
            let gg = Gains { gamma2: l1 * (1.0 + eps), ..g };
            let near = envelope(3.0, 2.0, &gg, &p, 0.7);
            let at = envelope(3.0, 2.0, &Gains { gamma2: l1, ..g }, &p, 0.7);
            assert!((near - at).abs() < 1e-5 * at, "{near} vs {at}");
        }
    }

    #[test]
    fn exp_rate_examples() {
        let decay: Vec<(f64, f64)> = (0..50).map(|k| (k as f64 * 0.1, (-2.0 * k as f64 * 0.1).exp())).collect();
        assert!((exp_rate(&decay).unwrap() + 2.0).abs() < 1e-9);
        let flat: Vec<(f64, f64)> = (0..20).map(|k| (k as f64, 4.2)).collect();
        assert!(exp_rate(&flat).unwrap().abs() < 1e-15);
        let mut bad = flat.clone();
        bad[3].1 = 0.0;
        assert_eq!(exp_rate(&bad), Err(Error::NonPositiveValue { index: 3 }));
        assert!(exp_rate(&flat[..5]).is_err());
    }

    /// Dense `A ⊗ I3` applied to a flattened stacked vector.
    fn dense_kron_apply(a: &Matrix<f64>, v: &[Pose<f64>]) -> Vec<f64> {
        let flat: Vec<f64> = v.iter().flat_map(|p| p.to_array()).collect();
        let k = Matrix::from_fn(3 * a.rows(), 3 * a.cols(), |r, c| {
            if r % 3 == c % 3 {
                a[(r / 3, c / 3)]
            } else {
                0.0
            }
        });
        k.mul_vec(&flat)
    }

    #[test]
    fn xi_matches_dense_kronecker() {
        let g = InteractionGraph::new(3, 3, &[(1, 2), (2, 3), (4, 1), (5, 3), (6, 3)]).unwrap();
        let p = g.partition().unwrap();
        let model = triangle(
            Trajectory::Lissajous {
                center: Pose::zero(),
                amplitude: Pose::new(1.0, 2.0, 0.1),
                frequency: Pose::new(0.3, 0.5, 0.7),
                phase: Pose::zero(),
            },
            0.4,
        );
        let t = 3.3;
        let states: Vec<_> = (0..3)
            .map(|i| {
                let f = i as f64;
                AgentState::new(Pose::new(f, -f, 0.1 * f), Pose::new(0.2, f, 0.0), Pose::new(-f, 0.5, 1.0))
            })
            .collect();
        // ξ = η + (L1⁻¹L2 ⊗ I3) η̃, applied as an explicit dense 3n×3m product.
        let l1_inv_l2 = p.projection.scaled(-1.0);
        let (targets, _) = model.scaled_targets(t);
        let shift = dense_kron_apply(&l1_inv_l2, &targets);
        let want: Vec<f64> = states.iter().flat_map(|s| s.eta.to_array()).zip(shift).map(|(a, b)| a + b).collect();
        let got: Vec<f64> = xi(&states, &p, &model, t).iter().flat_map(|p| p.to_array()).collect();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
