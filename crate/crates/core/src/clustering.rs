//! Trust engine: proximity test, exponential trust smoothing, and the
//! thresholded same-cluster decision.
//!
//! Trust is stored per destination agent `k` and only for `l ∈ N_k^-`; the
//! diagonal entries of B, F and E are implicitly one and never stored.

use crate::model::Topology;
use crate::vecops;

/// `b_lk(i) = 1` iff `‖ψ_l - w_k‖² ≤ α`.
#[inline]
pub fn proximity_test(psi_l: &[f64], w_k_prev: &[f64], alpha: f64) -> bool {
    vecops::dist_sq(psi_l, w_k_prev) <= alpha
}

/// `f(i) = ν f(i-1) + (1-ν) b(i)`.
#[inline]
pub fn trust_update(f_prev: f64, b_now: bool, nu: f64) -> f64 {
    let b = if b_now { 1.0 } else { 0.0 };
    // clamp absorbs the last-ulp overshoot of ν·1 + (1-ν)·1
    (nu * f_prev + (1.0 - nu) * b).clamp(0.0, 1.0)
}

/// `e = 1` iff `f ≥ γ`.
#[inline]
pub fn cluster_decision(f_now: f64, gamma: f64) -> bool {
    f_now >= gamma
}

/// Number of consecutive negative tests that take a fully trusted link
/// (`f = 1`) to a negative decision.
pub fn decision_delay(nu: f64, gamma: f64) -> usize {
    let ratio = gamma.ln() / nu.ln();
    // with the inclusive threshold, ν^n = γ still keeps the link
    let mut n = ratio.floor() as usize + 1;
    // guard against ln round-off either side of an integer ratio
    while n > 1 && nu.powi(n as i32 - 1) < gamma {
        n -= 1;
    }
    while nu.powi(n as i32) >= gamma {
        n += 1;
    }
    n
}

/// Trust state of one directed link `l → k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustLink {
    pub neighbor: usize,
    pub b: bool,
    pub f: f64,
    pub e: bool,
}

/// B_i, F_i, E_i restricted to the topology's off-diagonal links.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustMatrices {
    columns: Vec<Vec<TrustLink>>,
}

impl TrustMatrices {
    /// `F_{-1} = B_{-1} = E_{-1} = I`.
    pub fn identity(topology: &Topology) -> Self {
        let columns = (0..topology.n_agents())
            .map(|k| {
                topology
                    .neighbors_excl(k)
                    .map(|l| TrustLink {
                        neighbor: l,
                        b: false,
                        f: 0.0,
                        e: false,
                    })
                    .collect()
            })
            .collect();
        TrustMatrices { columns }
    }

    pub fn n_agents(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[TrustLink] {
        &self.columns[k]
    }

    pub(crate) fn column_mut(&mut self, k: usize) -> &mut [TrustLink] {
        &mut self.columns[k]
    }

    /// Test, smooth and decide every link into `k`. `candidate(l)` is the
    /// vector agent `k` received from `l` this round.
    pub fn update_column<'a, F>(
        &mut self,
        k: usize,
        w_k_prev: &[f64],
        alpha: f64,
        nu: f64,
        gamma: f64,
        candidate: F,
    ) where
        F: Fn(usize) -> &'a [f64],
    {
        update_links(&mut self.columns[k], w_k_prev, alpha, nu, gamma, candidate);
    }

    /// `N_{k,i}`: agent `k` plus every neighbor with `e_lk = 1`, sorted.
    pub fn believed_neighborhood(&self, k: usize) -> Vec<usize> {
        believed_neighborhood(&self.columns[k], k)
    }

    fn dense<F: Fn(&TrustLink) -> f64>(&self, get: F) -> Vec<Vec<f64>> {
        let n = self.columns.len();
        let mut out = vec![vec![0.0; n]; n];
        for (k, col) in self.columns.iter().enumerate() {
            out[k][k] = 1.0;
            for link in col {
                out[link.neighbor][k] = get(link);
            }
        }
        out
    }

    /// Dense F_i, indexed `[l][k]`.
    pub fn dense_f(&self) -> Vec<Vec<f64>> {
        self.dense(|t| t.f)
    }

    /// Dense E_i as 0/1, indexed `[l][k]`.
    pub fn dense_e(&self) -> Vec<Vec<f64>> {
        self.dense(|t| t.e as u8 as f64)
    }

    /// Dense B_i as 0/1, indexed `[l][k]`.
    pub fn dense_b(&self) -> Vec<Vec<f64>> {
        self.dense(|t| t.b as u8 as f64)
    }
}

pub(crate) fn update_links<'a, F>(
    links: &mut [TrustLink],
    w_k_prev: &[f64],
    alpha: f64,
    nu: f64,
    gamma: f64,
    candidate: F,
) where
    F: Fn(usize) -> &'a [f64],
{
    for link in links.iter_mut() {
        link.b = proximity_test(candidate(link.neighbor), w_k_prev, alpha);
        link.f = trust_update(link.f, link.b, nu);
        link.e = cluster_decision(link.f, gamma);
    }
}

pub fn believed_neighborhood(links: &[TrustLink], k: usize) -> Vec<usize> {
    let mut out: Vec<usize> = links.iter().filter(|t| t.e).map(|t| t.neighbor).collect();
    out.push(k);
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Topology;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Unrolled trust: ν^{i+1} f(-1) + (1-ν) Σ_j ν^j b(i-j).
    fn unrolled(f_init: f64, bs: &[bool], nu: f64) -> f64 {
        let i = bs.len();
        let mut acc = nu.powi(i as i32) * f_init;
        for j in 0..i {
            if bs[i - 1 - j] {
                acc += (1.0 - nu) * nu.powi(j as i32);
            }
        }
        acc
    }

    #[test]
    fn proximity_examples() {
        assert!(proximity_test(&[0.3, 0.1], &[0.3, 0.1], 0.015));
        let w = [0.0, 0.0];
        assert!(proximity_test(&[0.014f64.sqrt(), 0.0], &w, 0.015));
        assert!(!proximity_test(&[0.016f64.sqrt(), 0.0], &w, 0.015));
    }

    #[test]
    fn trust_update_examples() {
        assert_eq!(trust_update(1.0, true, 0.98), 1.0);
        assert!((trust_update(1.0, false, 0.98) - 0.98).abs() < 1e-15);
        let mut f = 0.0;
        for i in 0..200 {
            f = trust_update(f, true, 0.98);
            let closed = 1.0 - 0.98f64.powi(i + 1);
            assert!((f - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn decision_examples() {
        assert!(cluster_decision(0.6, 0.5));
        assert!(cluster_decision(0.5, 0.5));
        assert!(!cluster_decision(0.49, 0.5));
    }

    #[test]
    fn hysteresis_delay_matches_direct_simulation() {
        for &(nu, gamma) in &[
            (0.98, 0.5),
            (0.9, 0.5),
            (0.95, 0.3),
            (0.5, 0.25),
            (0.99, 0.9),
        ] {
            let mut f = 1.0;
            let mut n = 0;
            while cluster_decision(f, gamma) {
                f = trust_update(f, false, nu);
                n += 1;
            }
            assert_eq!(decision_delay(nu, gamma), n, "nu={nu} gamma={gamma}");
        }
        assert_eq!(decision_delay(0.98, 0.5), 35);
    }

    #[test]
    fn identity_initialization_isolates_everyone() {
        let topo = Topology::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let t = TrustMatrices::identity(&topo);
        for k in 0..4 {
            assert_eq!(t.believed_neighborhood(k), vec![k]);
        }
        let e = t.dense_e();
        for (l, row) in e.iter().enumerate() {
            for (k, &x) in row.iter().enumerate() {
                assert_eq!(x, (l == k) as u8 as f64);
            }
        }
    }

    #[test]
    fn believed_neighborhood_matches_true_cluster() {
        let links = vec![
            TrustLink {
                neighbor: 1,
                b: true,
                f: 0.9,
                e: true,
            },
            TrustLink {
                neighbor: 3,
                b: false,
                f: 0.1,
                e: false,
            },
            TrustLink {
                neighbor: 4,
                b: true,
                f: 0.7,
                e: true,
            },
        ];
        assert_eq!(believed_neighborhood(&links, 2), vec![1, 2, 4]);
    }

    #[test]
    fn closed_form_consistency_on_random_streams() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let nu = rng.random_range(0.5..0.999);
            let f0: f64 = rng.random();
            let bs: Vec<bool> = (0..1000).map(|_| rng.random_bool(0.6)).collect();
            let mut f = f0;
            for &b in &bs {
                f = trust_update(f, b, nu);
            }
            assert!((f - unrolled(f0, &bs, nu)).abs() <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn trust_stays_in_unit_interval(
            f0 in 0.0f64..=1.0,
            nu in 0.001f64..0.999,
            bs in prop::collection::vec(any::<bool>(), 0..300),
        ) {
            let mut f = f0;
            for b in bs {
                f = trust_update(f, b, nu);
                prop_assert!((0.0..=1.0).contains(&f));
            }
        }

        #[test]
        fn constant_inputs_are_monotone(f0 in 0.0f64..=1.0, nu in 0.01f64..0.99) {
            let (mut up, mut down) = (f0, f0);
            for _ in 0..100 {
                let nu_up = trust_update(up, true, nu);
                let nu_down = trust_update(down, false, nu);
                prop_assert!(nu_up >= up && nu_down <= down);
                prop_assert!((nu_down - nu * down).abs() < 1e-15);
                up = nu_up;
                down = nu_down;
            }
        }
    }
}
