//! Twin-symmetric Nash equilibria of a twins game.
//!
//! Pure candidates are every profile in which both twins of each cluster
//! agree. With two strategies, mixed candidates solve the per-cluster
//! indifference conditions `g_i(p) = 0` in the cluster probabilities
//! `p in [0,1]^K` (probability of strategy 1): for each split of the clusters
//! into "fixed at 0", "fixed at 1" and "interior", the interior equations are
//! seeded from a grid and refined by damped Newton. Every candidate is kept
//! only if it verifies as an equilibrium of the full 2K-player game.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::solve_dense;
use crate::nfg::NormalFormGame;
use crate::reduce::{Twin, TwinsLabeling};

use super::{deviation_payoffs, verify_ne, Equilibrium, EquilibriumList, MixedProfile, SolverConfig};

const MAX_SEEDS: usize = 16;
const MAX_GRID_POINTS: usize = 200_000;
const NEWTON_ITERS: usize = 100;
const FD_STEP: f64 = 1e-7;
const DEDUP_TOL: f64 = 1e-7;

struct Search<'a> {
    game: &'a NormalFormGame,
    labeling: &'a TwinsLabeling,
    n_strategies: usize,
    config: &'a SolverConfig,
    list: EquilibriumList,
    best_failure: Option<(f64, Vec<Vec<f64>>)>,
}

impl Search<'_> {
    fn k(&self) -> usize {
        self.labeling.k()
    }

    /// Twin-symmetric profile from one distribution per cluster.
    fn profile(&self, cluster_dists: &[Vec<f64>]) -> MixedProfile {
        let mut dists = vec![Vec::new(); self.game.n_players];
        for (i, d) in cluster_dists.iter().enumerate() {
            for t in [Twin::First, Twin::Second] {
                dists[self.labeling.player(i, t)] = d.clone();
            }
        }
        MixedProfile { dists }
    }

    fn binary_profile(&self, p: &[f64]) -> MixedProfile {
        let d: Vec<Vec<f64>> = p.iter().map(|&q| vec![1.0 - q, q]).collect();
        self.profile(&d)
    }

    fn consider(&mut self, cluster_dists: &[Vec<f64>]) -> Result<()> {
        let profile = self.profile(cluster_dists);
        let (ok, eps) = verify_ne(self.game, &profile, self.config.verify_eps)?;
        if ok {
            let pure = profile.as_pure().is_some();
            self.list.push_unique(Equilibrium { profile, pure, twin_symmetric: true, epsilon: eps }, DEDUP_TOL);
        } else if self.best_failure.as_ref().is_none_or(|(b, _)| eps < *b) {
            self.best_failure = Some((eps, cluster_dists.to_vec()));
        }
        Ok(())
    }

    /// `g_i(p)`: advantage of strategy 1 over 0 for the first twin of cluster i.
    fn residual(&self, p: &[f64]) -> Vec<f64> {
        let profile = self.binary_profile(p);
        (0..self.k())
            .map(|i| {
                let dev = deviation_payoffs(self.game, &profile, self.labeling.player(i, Twin::First))
                    .expect("profile matches game");
                dev[1] - dev[0]
            })
            .collect()
    }

    fn pure_candidates(&mut self) -> Result<()> {
        let k = self.k();
        let s = self.n_strategies;
        let total = s.checked_pow(k as u32).unwrap_or(usize::MAX);
        if total > self.config.max_profiles {
            return Err(Error::Size { profiles: total, cap: self.config.max_profiles });
        }
        for code in 0..total {
            let mut c = code;
            let dists: Vec<Vec<f64>> = (0..k)
                .map(|_| {
                    let mut d = vec![0.0; s];
                    d[c % s] = 1.0;
                    c /= s;
                    d
                })
                .collect();
            self.consider(&dists)?;
        }
        Ok(())
    }

    fn mixed_binary(&mut self) -> Result<()> {
        let k = self.k();
        let scale = self.game.payoffs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol = self.config.newton_tol * scale;
        let patterns = 3usize.pow(k as u32);
        for code in 0..patterns {
            // 0 -> fixed at 0, 1 -> fixed at 1, 2 -> interior
            let mut c = code;
            let kinds: Vec<usize> = (0..k)
                .map(|_| {
                    let v = c % 3;
                    c /= 3;
                    v
                })
                .collect();
            let interior: Vec<usize> = (0..k).filter(|&i| kinds[i] == 2).collect();
            if interior.is_empty() {
                continue;
            }
            let base: Vec<f64> = kinds
                .iter()
                .map(|&v| match v {
                    0 => 0.0,
                    1 => 1.0,
                    _ => 0.5,
                })
                .collect();
            for seed in self.seeds(&base, &interior) {
                let p = self.newton(seed, &interior, tol);
                let dists: Vec<Vec<f64>> = p.iter().map(|&q| vec![1.0 - q, q]).collect();
                self.consider(&dists)?;
            }
        }
        Ok(())
    }

    /// Grid points whose interior residual norm is a local minimum.
    fn seeds(&self, base: &[f64], interior: &[usize]) -> Vec<Vec<f64>> {
        let dim = interior.len();
        let mut res = self.config.grid_resolution.max(2);
        while (res - 1).checked_pow(dim as u32).is_none_or(|n| n > MAX_GRID_POINTS) && res > 4 {
            res /= 2;
        }
        let side = res - 1;
        let total = side.pow(dim as u32);
        let coord = |idx: usize| -> Vec<usize> {
            let mut c = idx;
            (0..dim)
                .map(|_| {
                    let v = c % side;
                    c /= side;
                    v
                })
                .collect()
        };
        let point = |cell: &[usize]| -> Vec<f64> {
            let mut p = base.to_vec();
            for (&i, &g) in interior.iter().zip(cell) {
                p[i] = (g + 1) as f64 / res as f64;
            }
            p
        };
        let norms: Vec<f64> = (0..total)
            .map(|idx| {
                let r = self.residual(&point(&coord(idx)));
                interior.iter().map(|&i| r[i] * r[i]).sum::<f64>()
            })
            .collect();
        let mut minima: Vec<(f64, usize)> = Vec::new();
        for idx in 0..total {
            let cell = coord(idx);
            let mut stride = 1;
            let mut is_min = true;
            for &g in cell.iter() {
                if g > 0 && norms[idx - stride] < norms[idx] {
                    is_min = false;
                }
                if g + 1 < side && norms[idx + stride] < norms[idx] {
                    is_min = false;
                }
                stride *= side;
            }
            if is_min {
                minima.push((norms[idx], idx));
            }
        }
        minima.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        minima.truncate(MAX_SEEDS);
        minima.into_iter().map(|(_, idx)| point(&coord(idx))).collect()
    }

    /// Damped Newton on the interior equations, staying inside [0, 1].
    fn newton(&self, mut p: Vec<f64>, interior: &[usize], tol: f64) -> Vec<f64> {
        let dim = interior.len();
        let norm = |r: &[f64]| interior.iter().map(|&i| r[i] * r[i]).sum::<f64>();
        let mut r = self.residual(&p);
        let mut current = norm(&r);
        for _ in 0..NEWTON_ITERS {
            if interior.iter().all(|&i| r[i].abs() <= tol) {
                break;
            }
            let mut jac = vec![0.0; dim * dim];
            for (col, &j) in interior.iter().enumerate() {
                let h = if p[j] + FD_STEP <= 1.0 { FD_STEP } else { -FD_STEP };
                let mut q = p.clone();
                q[j] += h;
                let rq = self.residual(&q);
                for (row, &i) in interior.iter().enumerate() {
                    jac[row * dim + col] = (rq[i] - r[i]) / h;
                }
            }
            let rhs: Vec<f64> = interior.iter().map(|&i| -r[i]).collect();
            let Some(step) = solve_dense(jac, dim, rhs, 1e-14) else {
                break;
            };
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-8 {
                let mut q = p.clone();
                for (&i, d) in interior.iter().zip(&step) {
                    q[i] = (q[i] + t * d).clamp(0.0, 1.0);
                }
                let rq = self.residual(&q);
                let nq = norm(&rq);
                if nq < current {
                    p = q;
                    r = rq;
                    current = nq;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        p
    }

    /// Twin-symmetric replicator dynamics from the uniform profile; reports the
    /// end point as a candidate.
    fn replicator(&mut self) -> Result<()> {
        let k = self.k();
        let s = self.n_strategies;
        let scale = self.game.payoffs.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        let mut x: Vec<Vec<f64>> = vec![vec![1.0 / s as f64; s]; k];
        for _ in 0..self.config.replicator_steps {
            let profile = self.profile(&x);
            let mut next = x.clone();
            for i in 0..k {
                let u = deviation_payoffs(self.game, &profile, self.labeling.player(i, Twin::First))?;
                let avg: f64 = u.iter().zip(&x[i]).map(|(a, b)| a * b).sum();
                for (sj, xi) in next[i].iter_mut().enumerate() {
                    *xi += self.config.replicator_step * *xi * (u[sj] - avg) / scale;
                    *xi = xi.max(0.0);
                }
                let total: f64 = next[i].iter().sum();
                next[i].iter_mut().for_each(|v| *v /= total);
            }
            x = next;
        }
        self.consider(&x)
    }
}

/// Twin-symmetric equilibria of a twins game: all pure ones, plus mixed ones
/// for two-strategy games (or replicator-dynamics candidates otherwise).
pub fn find_tsne(game: &NormalFormGame, labeling: &TwinsLabeling, config: &SolverConfig) -> Result<EquilibriumList> {
    game.validate()?;
    labeling.validate(game.n_players)?;
    let n_strategies = game.strategies[0];
    if game.strategies.iter().any(|&s| s != n_strategies) {
        return invalid("twins game players must share one strategy set");
    }
    let mut search = Search {
        game,
        labeling,
        n_strategies,
        config,
        list: EquilibriumList::default(),
        best_failure: None,
    };
    search.pure_candidates()?;
    if n_strategies == 2 {
        search.mixed_binary()?;
    } else {
        search.replicator()?;
    }
    if search.list.is_empty() {
        let (best_epsilon, best_candidate) = search
            .best_failure
            .map_or((f64::INFINITY, None), |(e, c)| (e, Some(c)));
        return Err(Error::SolverFailure { best_epsilon, best_candidate });
    }
    let mut list = search.list;
    list.sort();
    Ok(list)
}
