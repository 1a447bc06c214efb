//! Support enumeration for two-player games.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::linalg::solve_dense;
use crate::nfg::NormalFormGame;

use super::{verify_ne, Equilibrium, EquilibriumList, MixedProfile, SolverConfig};

const PIVOT_TOL: f64 = 1e-12;

fn subsets(n: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1 << n))
        .filter(move |m| m.count_ones() as usize == size)
        .map(move |m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
}

/// Mix over `cols` that makes the opponent indifferent across `rows`, where
/// `payoff(r, c)` is the opponent's payoff. Returns the mix and the common value.
fn indifference_mix(
    rows: &[usize],
    cols: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
) -> Option<(Vec<f64>, f64)> {
    let k = cols.len();
    let dim = k + 1;
    let mut a = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    for (eq, &r) in rows.iter().enumerate() {
        for (v, &c) in cols.iter().enumerate() {
            a[eq * dim + v] = payoff(r, c);
        }
        a[eq * dim + k] = -1.0;
    }
    for v in 0..k {
        a[k * dim + v] = 1.0;
    }
    b[k] = 1.0;
    let sol = solve_dense(a, dim, b, PIVOT_TOL)?;
    let value = sol[k];
    Some((sol[..k].to_vec(), value))
}

fn clean(mix: &mut [f64], tol: f64) -> bool {
    if mix.iter().any(|&x| x < -tol) {
        return false;
    }
    for x in mix.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = mix.iter().sum();
    for x in mix.iter_mut() {
        *x /= total;
    }
    true
}

/// All Nash equilibria of a nondegenerate bimatrix game by enumerating
/// equal-size support pairs. Degenerate games yield a representative subset
/// and set the `degenerate` flag.
pub fn bimatrix_all_ne(game: &NormalFormGame, config: &SolverConfig) -> Result<EquilibriumList> {
    game.validate()?;
    if game.n_players != 2 {
        return invalid("support enumeration needs exactly two players");
    }
    let (m, n) = (game.strategies[0], game.strategies[1]);
    if m > 20 || n > 20 {
        return invalid("bimatrix game too large for support enumeration");
    }
    let row_u = |i: usize, j: usize| game.payoff(&[i, j], 0);
    let col_u = |i: usize, j: usize| game.payoff(&[i, j], 1);
    let tol = config.verify_eps;

    let mut list = EquilibriumList::default();
    for size in 1..=m.min(n) {
        for rows in subsets(m, size) {
            for cols in subsets(n, size) {
                // Column mix makes the row player indifferent on `rows`.
                let Some((y_s, v)) = indifference_mix(&rows, &cols, row_u) else {
                    list.degenerate = true;
                    continue;
                };
                let Some((x_s, w)) = indifference_mix(&cols, &rows, |c, r| col_u(r, c)) else {
                    list.degenerate = true;
                    continue;
                };
                let (mut x_s, mut y_s) = (x_s, y_s);
                if !clean(&mut x_s, tol) || !clean(&mut y_s, tol) {
                    continue;
                }
                let mut x = vec![0.0; m];
                let mut y = vec![0.0; n];
                for (&r, &p) in rows.iter().zip(&x_s) {
                    x[r] = p;
                }
                for (&c, &p) in cols.iter().zip(&y_s) {
                    y[c] = p;
                }
                let row_best = (0..m).all(|i| (0..n).map(|j| row_u(i, j) * y[j]).sum::<f64>() <= v + tol);
                let col_best = (0..n).all(|j| (0..m).map(|i| col_u(i, j) * x[i]).sum::<f64>() <= w + tol);
                if !row_best || !col_best {
                    continue;
                }
                let profile = MixedProfile { dists: vec![x, y] };
                let (ok, eps) = verify_ne(game, &profile, tol)?;
                if !ok {
                    continue;
                }
                let pure = profile.as_pure().is_some();
                list.push_unique(Equilibrium { profile, pure, twin_symmetric: false, epsilon: eps }, 1e-9);
            }
        }
    }

    // More pure best responses than support size means the game is degenerate.
    for eq in &list.equilibria {
        let x = &eq.profile.dists[0];
        let y = &eq.profile.dists[1];
        let row_vals: Vec<f64> = (0..m).map(|i| (0..n).map(|j| row_u(i, j) * y[j]).sum()).collect();
        let col_vals: Vec<f64> = (0..n).map(|j| (0..m).map(|i| col_u(i, j) * x[i]).sum()).collect();
        let ties = |vals: &[f64]| {
            let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            vals.iter().filter(|&&u| best - u <= config.tie_tol).count()
        };
        let support = |d: &[f64]| d.iter().filter(|&&p| p > 0.0).count();
        if ties(&row_vals) > support(y) || ties(&col_vals) > support(x) {
            list.degenerate = true;
        }
    }
    list.sort();
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> NormalFormGame {
        NormalFormGame::from_fn(vec![2, 2], |p| Ok(vec![a[p[0]][p[1]], b[p[0]][p[1]]])).unwrap()
    }

    #[test]
    fn coordination_has_three_equilibria() {
        let g = two_by_two([[2.0, 0.0], [0.0, 1.0]], [[2.0, 0.0], [0.0, 1.0]]);
        let ne = bimatrix_all_ne(&g, &SolverConfig::default()).unwrap();
        assert_eq!(ne.len(), 3);
        assert!(!ne.degenerate);
        let mixed = ne.equilibria.iter().find(|e| !e.pure).unwrap();
        // row player mixes so column is indifferent: 2x = 1 - x
        assert!((mixed.profile.dists[0][0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((mixed.profile.dists[1][0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_strategies_unique() {
        let g = two_by_two([[3.0, 0.0], [4.0, 1.0]], [[3.0, 4.0], [0.0, 1.0]]);
        let ne = bimatrix_all_ne(&g, &SolverConfig::default()).unwrap();
        assert_eq!(ne.len(), 1);
        assert_eq!(ne.equilibria[0].profile.as_pure(), Some(vec![1, 1]));
    }

    #[test]
    fn matching_pennies_mixed_only() {
        let g = two_by_two([[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]]);
        let ne = bimatrix_all_ne(&g, &SolverConfig::default()).unwrap();
        assert_eq!(ne.len(), 1);
        assert_eq!(ne.equilibria[0].profile.dists, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn requires_two_players() {
        let g = NormalFormGame::from_fn(vec![2, 2, 2], |_| Ok(vec![0.0; 3])).unwrap();
        assert!(bimatrix_all_ne(&g, &SolverConfig::default()).is_err());
    }
}
