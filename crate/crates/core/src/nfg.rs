//! Explicit normal-form games with a dense payoff tensor.
//!
//! Pure profiles are ordered lexicographically with player 0 varying
//! fastest: `index = s_0 + n_0 * (s_1 + n_1 * (s_2 + ...))`. The flat payoff
//! array stores `n_players` entries per profile, in that profile order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormGame {
    pub n_players: usize,
    pub strategies: Vec<usize>,
    pub payoffs: Vec<f64>,
}

impl NormalFormGame {
    pub fn new(strategies: Vec<usize>, payoffs: Vec<f64>) -> Result<Self> {
        let g = Self { n_players: strategies.len(), strategies, payoffs };
        g.validate()?;
        Ok(g)
    }

    /// Builds the tensor by evaluating `f` on every pure profile.
    pub fn from_fn<F>(strategies: Vec<usize>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Result<Vec<f64>>,
    {
        let n_players = strategies.len();
        if n_players == 0 || strategies.contains(&0) {
            return invalid("every player needs at least one strategy");
        }
        let n_profiles: usize = strategies.iter().product();
        let mut payoffs = Vec::with_capacity(n_profiles * n_players);
        let mut profile = vec![0usize; n_players];
        for _ in 0..n_profiles {
            let v = f(&profile)?;
            if v.len() != n_players {
                return invalid("payoff vector length differs from player count");
            }
            payoffs.extend_from_slice(&v);
            advance(&mut profile, &strategies);
        }
        Self::new(strategies, payoffs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_players == 0 || self.strategies.len() != self.n_players {
            return invalid("player count mismatch");
        }
        if self.strategies.contains(&0) {
            return invalid("every player needs at least one strategy");
        }
        let want = self.n_profiles() * self.n_players;
        if self.payoffs.len() != want {
            return invalid(format!("payoff tensor has {} entries, expected {want}", self.payoffs.len()));
        }
        if self.payoffs.iter().any(|v| !v.is_finite()) {
            return invalid("non-finite payoff");
        }
        Ok(())
    }

    pub fn n_profiles(&self) -> usize {
        self.strategies.iter().product()
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strategies)
            .rev()
            .fold(0, |acc, (&s, &n)| acc * n + s)
    }

    pub fn profile_at(&self, mut index: usize) -> Vec<usize> {
        self.strategies
            .iter()
            .map(|&n| {
                let s = index % n;
                index /= n;
                s
            })
            .collect()
    }

    pub fn payoff_vector(&self, profile: &[usize]) -> &[f64] {
        let i = self.profile_index(profile) * self.n_players;
        &self.payoffs[i..i + self.n_players]
    }

    pub fn payoff(&self, profile: &[usize], player: usize) -> f64 {
        self.payoffs[self.profile_index(profile) * self.n_players + player]
    }

    /// Stride of `player`'s strategy in the profile index.
    pub fn stride(&self, player: usize) -> usize {
        self.strategies[..player].iter().product()
    }

    /// Iterates `(index, profile)` over all pure profiles in tensor order.
    pub fn profiles(&self) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
        let mut profile = vec![0usize; self.n_players];
        (0..self.n_profiles()).map(move |i| {
            let current = profile.clone();
            advance(&mut profile, &self.strategies);
            (i, current)
        })
    }
}

fn advance(profile: &mut [usize], strategies: &[usize]) {
    for (s, &n) in profile.iter_mut().zip(strategies) {
        *s += 1;
        if *s < n {
            return;
        }
        *s = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip_player_zero_fastest() {
        let g = NormalFormGame::from_fn(vec![2, 3, 2], |p| Ok(vec![p[0] as f64, p[1] as f64, p[2] as f64])).unwrap();
        assert_eq!(g.profile_at(1), vec![1, 0, 0]);
        assert_eq!(g.profile_at(2), vec![0, 1, 0]);
        for (i, p) in g.profiles() {
            assert_eq!(g.profile_index(&p), i);
            assert_eq!(g.payoff_vector(&p), &[p[0] as f64, p[1] as f64, p[2] as f64]);
        }
    }

    #[test]
    fn rejects_wrong_size() {
        assert!(NormalFormGame::new(vec![2, 2], vec![0.0; 7]).is_err());
    }
}
