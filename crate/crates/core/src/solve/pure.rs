use crate::error::{Error, Result};
use crate::nfg::NormalFormGame;

use super::{Equilibrium, EquilibriumList, MixedProfile, SolverConfig};

/// Every pure profile at which no player gains more than `verify_eps` by a
/// unilateral deviation.
pub fn enumerate_pure_ne(game: &NormalFormGame, config: &SolverConfig) -> Result<EquilibriumList> {
    game.validate()?;
    let n_profiles = game.n_profiles();
    if n_profiles > config.max_profiles {
        return Err(Error::Size { profiles: n_profiles, cap: config.max_profiles });
    }
    let n = game.n_players;
    let strides: alloc::vec::Vec<usize> = (0..n).map(|p| game.stride(p)).collect();
    let mut list = EquilibriumList::default();
    for (idx, profile) in game.profiles() {
        let mut worst = 0.0f64;
        for p in 0..n {
            let current = game.payoffs[idx * n + p];
            let base = idx - profile[p] * strides[p];
            for alt in 0..game.strategies[p] {
                let gain = game.payoffs[(base + alt * strides[p]) * n + p] - current;
                if gain.abs() <= config.tie_tol && alt != profile[p] {
                    list.degenerate = true;
                }
                worst = worst.max(gain);
            }
        }
        if worst <= config.verify_eps {
            list.equilibria.push(Equilibrium {
                profile: MixedProfile::pure(&profile, &game.strategies),
                pure: true,
                twin_symmetric: false,
                epsilon: worst,
            });
        }
    }
    list.sort();
    Ok(list)
}
