//! Equilibrium computation for small normal-form games.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::nfg::NormalFormGame;

mod bimatrix;
mod pure;
mod symmetric;
mod tsne;

pub use bimatrix::bimatrix_all_ne;
pub use pure::enumerate_pure_ne;
pub use symmetric::{symmetric_msne_2strategy, symmetric_payoff_table};
pub use tsne::find_tsne;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Maximum best-response gain accepted for an equilibrium.
    pub verify_eps: f64,
    /// Residual target for Newton refinement of mixed twin-symmetric equilibria.
    pub newton_tol: f64,
    /// Grid resolution used to seed the mixed search (cells per unit).
    pub grid_resolution: usize,
    /// Upper bound on pure profiles scanned exhaustively.
    pub max_profiles: usize,
    /// Payoff differences below this count as ties.
    pub tie_tol: f64,
    pub replicator_steps: usize,
    pub replicator_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            verify_eps: 1e-8,
            newton_tol: 1e-10,
            grid_resolution: 64,
            max_profiles: 1 << 20,
            tie_tol: 1e-9,
            replicator_steps: 100_000,
            replicator_step: 1e-2,
        }
    }
}

/// One probability vector per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedProfile {
    pub dists: Vec<Vec<f64>>,
}

impl MixedProfile {
    pub fn new(dists: Vec<Vec<f64>>) -> Result<Self> {
        for (p, d) in dists.iter().enumerate() {
            if d.is_empty() || d.iter().any(|&x| !(x >= 0.0)) || (d.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return invalid(format!("player {p} distribution is not a probability vector"));
            }
        }
        Ok(Self { dists })
    }

    pub fn pure(profile: &[usize], strategies: &[usize]) -> Self {
        let dists = profile
            .iter()
            .zip(strategies)
            .map(|(&s, &n)| {
                let mut d = vec![0.0; n];
                d[s] = 1.0;
                d
            })
            .collect();
        Self { dists }
    }

    pub fn uniform(strategies: &[usize]) -> Self {
        Self { dists: strategies.iter().map(|&n| vec![1.0 / n as f64; n]).collect() }
    }

    /// The pure profile if every player puts probability 1 on one strategy.
    pub fn as_pure(&self) -> Option<Vec<usize>> {
        self.dists.iter().map(|d| d.iter().position(|&x| x == 1.0)).collect()
    }

    fn check(&self, game: &NormalFormGame) -> Result<()> {
        if self.dists.len() != game.n_players
            || self.dists.iter().zip(&game.strategies).any(|(d, &n)| d.len() != n)
        {
            return invalid("mixed profile does not match the game's dimensions");
        }
        Ok(())
    }

    fn cmp_lex(&self, other: &Self) -> Ordering {
        self.dists
            .iter()
            .flatten()
            .zip(other.dists.iter().flatten())
            .map(|(a, b)| b.partial_cmp(a).unwrap_or(Ordering::Equal))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.dists
            .iter()
            .flatten()
            .zip(other.dists.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub profile: MixedProfile,
    pub pure: bool,
    pub twin_symmetric: bool,
    /// Largest gain any player could obtain by a unilateral pure deviation.
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EquilibriumList {
    pub equilibria: Vec<Equilibrium>,
    /// Set when ties or singular support systems were met during the search.
    pub degenerate: bool,
}

impl EquilibriumList {
    pub fn len(&self) -> usize {
        self.equilibria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equilibria.is_empty()
    }

    /// Adds `eq` unless an equilibrium within `tol` (max-norm) is present.
    pub(crate) fn push_unique(&mut self, eq: Equilibrium, tol: f64) -> bool {
        if self.equilibria.iter().any(|e| e.profile.max_abs_diff(&eq.profile) <= tol) {
            return false;
        }
        self.equilibria.push(eq);
        true
    }

    /// Deterministic order: lexicographic over flattened probabilities,
    /// higher probability on earlier strategies first.
    pub(crate) fn sort(&mut self) {
        self.equilibria.sort_by(|a, b| a.profile.cmp_lex(&b.profile));
    }
}

/// Expected payoff of each player when all players mix independently.
pub fn expected_payoffs(game: &NormalFormGame, profile: &MixedProfile) -> Result<Vec<f64>> {
    profile.check(game)?;
    let n = game.n_players;
    let mut out = vec![0.0; n];
    for (i, p) in game.profiles() {
        let w: f64 = p.iter().enumerate().map(|(q, &s)| profile.dists[q][s]).product();
        if w == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(&game.payoffs[i * n..(i + 1) * n]) {
            *o += w * v;
        }
    }
    Ok(out)
}

/// Expected payoff of each pure strategy of `player` against the others' mix.
pub fn deviation_payoffs(game: &NormalFormGame, profile: &MixedProfile, player: usize) -> Result<Vec<f64>> {
    profile.check(game)?;
    if player >= game.n_players {
        return invalid("player out of range");
    }
    let n = game.n_players;
    let mut out = vec![0.0; game.strategies[player]];
    for (i, p) in game.profiles() {
        let w: f64 = p
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != player)
            .map(|(q, &s)| profile.dists[q][s])
            .product();
        if w != 0.0 {
            out[p[player]] += w * game.payoffs[i * n + player];
        }
    }
    Ok(out)
}

/// Best pure deviation gain of `player` and the (lowest-index) best response.
pub fn best_response_gain(game: &NormalFormGame, profile: &MixedProfile, player: usize) -> Result<(f64, usize)> {
    let dev = deviation_payoffs(game, profile, player)?;
    let current: f64 = dev.iter().zip(&profile.dists[player]).map(|(u, x)| u * x).sum();
    let (best, best_u) = dev
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (s, &u)| if u > acc.1 { (s, u) } else { acc });
    Ok((best_u - current, best))
}

/// Whether no player can gain more than `eps`; also returns the largest gain.
pub fn verify_ne(game: &NormalFormGame, profile: &MixedProfile, eps: f64) -> Result<(bool, f64)> {
    let mut worst = f64::NEG_INFINITY;
    for p in 0..game.n_players {
        worst = worst.max(best_response_gain(game, profile, p)?.0);
    }
    Ok((worst <= eps, worst))
}
