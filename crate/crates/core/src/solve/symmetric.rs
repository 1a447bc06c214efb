//! Symmetric mixed equilibria of symmetric two-strategy games.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::nfg::NormalFormGame;

use super::{verify_ne, Equilibrium, EquilibriumList, MixedProfile, SolverConfig};

const GRID: usize = 1024;
const BISECTION_TOL: f64 = 1e-10;

/// For a symmetric two-strategy game, `table[s][m]` is the payoff of a player
/// choosing `s` while `m` of the other players choose strategy 1.
pub fn symmetric_payoff_table(game: &NormalFormGame, tol: f64) -> Result<[Vec<f64>; 2]> {
    game.validate()?;
    if game.strategies.iter().any(|&s| s != 2) {
        return invalid("symmetric solver needs two strategies per player");
    }
    let k = game.n_players;
    let mut table = [vec![f64::NAN; k], vec![f64::NAN; k]];
    let scale = game.payoffs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (_, profile) in game.profiles() {
        let ones = profile.iter().filter(|&&s| s == 1).count();
        for (p, &s) in profile.iter().enumerate() {
            let others = ones - usize::from(s == 1);
            let u = game.payoff(&profile, p);
            let slot = &mut table[s][others];
            if slot.is_nan() {
                *slot = u;
            } else if (*slot - u).abs() > tol * scale {
                return invalid("game payoffs are not invariant under player permutation");
            }
        }
    }
    Ok(table)
}

fn binomial_weights(n: usize, p: f64) -> Vec<f64> {
    // C(n, m) p^m (1 - p)^(n - m), by the multiplicative recurrence.
    let mut w = vec![0.0; n + 1];
    let q = 1.0 - p;
    let mut c = 1.0;
    for (m, slot) in w.iter_mut().enumerate() {
        let mut term = c;
        for _ in 0..m {
            term *= p;
        }
        for _ in 0..n - m {
            term *= q;
        }
        *slot = term;
        c = c * (n - m) as f64 / (m + 1) as f64;
    }
    w
}

/// Gain from playing strategy 1 over strategy 0 when all others mix with `p`.
fn advantage(diff: &[f64], p: f64) -> f64 {
    binomial_weights(diff.len() - 1, p).iter().zip(diff).map(|(w, d)| w * d).sum()
}

/// All symmetric equilibria `p` (probability of strategy 1), found as sign
/// changes of the indifference polynomial on a 1/1024 grid refined by
/// bisection, plus consistent boundary points.
pub fn symmetric_msne_2strategy(game: &NormalFormGame, config: &SolverConfig) -> Result<EquilibriumList> {
    let [f0, f1] = symmetric_payoff_table(game, config.tie_tol)?;
    let diff: Vec<f64> = f1.iter().zip(&f0).map(|(a, b)| a - b).collect();
    let mut list = EquilibriumList::default();

    let mut candidates: Vec<f64> = Vec::new();
    if diff.iter().all(|d| d.abs() <= config.tie_tol) {
        list.degenerate = true;
        candidates.extend([0.0, 1.0]);
    } else {
        let g = |p: f64| advantage(&diff, p);
        if g(0.0) <= config.verify_eps {
            candidates.push(0.0);
        }
        if g(1.0) >= -config.verify_eps {
            candidates.push(1.0);
        }
        let grid: Vec<f64> = (0..=GRID).map(|i| g(i as f64 / GRID as f64)).collect();
        for i in 0..GRID {
            let (lo_v, hi_v) = (grid[i], grid[i + 1]);
            if i > 0 && lo_v == 0.0 {
                candidates.push(i as f64 / GRID as f64);
                continue;
            }
            if (lo_v < 0.0 && hi_v > 0.0) || (lo_v > 0.0 && hi_v < 0.0) {
                let (mut lo, mut hi) = (i as f64 / GRID as f64, (i + 1) as f64 / GRID as f64);
                let lo_sign = lo_v > 0.0;
                while hi - lo > BISECTION_TOL {
                    let mid = 0.5 * (lo + hi);
                    if (g(mid) > 0.0) == lo_sign {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                candidates.push(0.5 * (lo + hi));
            }
        }
    }

    for p in candidates {
        let profile = MixedProfile { dists: vec![vec![1.0 - p, p]; game.n_players] };
        let (ok, eps) = verify_ne(game, &profile, config.verify_eps)?;
        if ok {
            let pure = p == 0.0 || p == 1.0;
            list.push_unique(Equilibrium { profile, pure, twin_symmetric: false, epsilon: eps }, 1e-9);
        }
    }
    list.sort();
    Ok(list)
}
