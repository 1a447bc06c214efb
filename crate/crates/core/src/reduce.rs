//! Reduced games: the 2K-player twins game, the K-player cluster game, and
//! the hierarchical group reduction of a symmetric game.
//!
//! In the twins game cluster i is played by players `2i` and `2i + 1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::game::{PayoffModel, PureProfile};
use crate::learn::{ClusterDistributions, RegressorSet};
use crate::nfg::NormalFormGame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Twin {
    First,
    Second,
}

impl Twin {
    pub fn other(self) -> Self {
        match self {
            Twin::First => Twin::Second,
            Twin::Second => Twin::First,
        }
    }

    fn offset(self) -> usize {
        match self {
            Twin::First => 0,
            Twin::Second => 1,
        }
    }
}

/// Player indices of the two twins of every cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinsLabeling {
    pub pairs: Vec<[usize; 2]>,
}

impl TwinsLabeling {
    pub fn standard(k: usize) -> Self {
        Self { pairs: (0..k).map(|i| [2 * i, 2 * i + 1]).collect() }
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn player(&self, cluster: usize, twin: Twin) -> usize {
        self.pairs[cluster][twin.offset()]
    }

    /// Checks that the pairs partition `0..n_players`.
    pub fn validate(&self, n_players: usize) -> Result<()> {
        let mut seen = vec![false; n_players];
        for p in self.pairs.iter().flatten() {
            if *p >= n_players || seen[*p] {
                return invalid("twins labeling is not a perfect pairing of the players");
            }
            seen[*p] = true;
        }
        if seen.iter().any(|s| !s) || 2 * self.pairs.len() != n_players {
            return invalid("twins labeling is not a perfect pairing of the players");
        }
        Ok(())
    }
}

/// Cluster distributions seen by the focal twin of `cluster`.
///
/// The own cluster is a point mass on the other twin's strategy, which stands
/// for the rest of the cluster. Any other cluster is a point mass when its
/// twins agree and half/half on their two strategies otherwise. The focal
/// twin's own strategy never enters.
pub fn twins_instantiation(
    cluster: usize,
    twin_strategies: &[usize],
    focal: Twin,
    n_strategies: usize,
) -> Result<ClusterDistributions> {
    if !twin_strategies.len().is_multiple_of(2) || twin_strategies.is_empty() {
        return invalid("twin profile must have 2K entries");
    }
    let k = twin_strategies.len() / 2;
    if cluster >= k {
        return invalid(format!("cluster {cluster} out of range 0..{k}"));
    }
    if twin_strategies.iter().any(|&s| s >= n_strategies) {
        return invalid("twin strategy out of range");
    }
    let mut probs = vec![0.0; k * n_strategies];
    for j in 0..k {
        let row = &mut probs[j * n_strategies..(j + 1) * n_strategies];
        if j == cluster {
            row[twin_strategies[2 * j + focal.other().offset()]] = 1.0;
        } else {
            row[twin_strategies[2 * j]] += 0.5;
            row[twin_strategies[2 * j + 1]] += 0.5;
        }
    }
    Ok(ClusterDistributions { k, n_strategies, probs })
}

/// The 2K-player twins game of a learned regressor set.
pub fn build_twins_game(reg: &RegressorSet) -> Result<(NormalFormGame, TwinsLabeling)> {
    reg.validate()?;
    let k = reg.k;
    let s = reg.n_strategies;
    let game = NormalFormGame::from_fn(vec![s; 2 * k], |profile| {
        let mut out = Vec::with_capacity(2 * k);
        for player in 0..2 * k {
            let cluster = player / 2;
            let focal = if player % 2 == 0 { Twin::First } else { Twin::Second };
            let dists = twins_instantiation(cluster, profile, focal, s)?;
            out.push(reg.predict_payoff(cluster, profile[player], &dists));
        }
        Ok(out)
    })?;
    Ok((game, TwinsLabeling::standard(k)))
}

/// The K-player game: player i's payoff for cluster strategies `s` is the
/// regressor prediction with every cluster a point mass on its strategy.
pub fn build_kplayer_game(reg: &RegressorSet) -> Result<NormalFormGame> {
    reg.validate()?;
    let s = reg.n_strategies;
    NormalFormGame::from_fn(vec![s; reg.k], |profile| {
        let dists = ClusterDistributions::point_masses(profile, s);
        let monomials = dists.monomials();
        Ok((0..reg.k)
            .map(|i| reg.predict_from_monomials(i, profile[i], &monomials))
            .collect())
    })
}

/// Index range of the agents in group `g` when `n_agents` are split into
/// `groups` contiguous equal blocks.
pub fn group_members(n_agents: usize, groups: usize, g: usize) -> core::ops::Range<usize> {
    let size = n_agents / groups;
    g * size..(g + 1) * size
}

/// Hierarchical reduction of a symmetric N-agent game into `groups` players:
/// every agent in a group plays the group's strategy and the group's payoff
/// is that of its first agent in the original game.
pub fn build_wel_game<G: PayoffModel + ?Sized>(game: &G, groups: usize) -> Result<NormalFormGame> {
    let d = game.descriptor();
    if groups == 0 || !d.n_agents.is_multiple_of(groups) {
        return invalid(format!("{groups} groups do not divide {} agents", d.n_agents));
    }
    NormalFormGame::from_fn(vec![d.n_strategies; groups], |profile| {
        let mut full = vec![0usize; d.n_agents];
        for (g, &s) in profile.iter().enumerate() {
            for a in group_members(d.n_agents, groups, g) {
                full[a] = s;
            }
        }
        let payoffs = game.payoffs(&PureProfile(full))?;
        Ok((0..groups)
            .map(|g| payoffs[group_members(d.n_agents, groups, g).start])
            .collect())
    })
}
