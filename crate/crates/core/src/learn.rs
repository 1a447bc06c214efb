//! Learning the cluster-based payoff model from observations.
//!
//! Agents are embedded by their mean payoff per strategy, clustered with
//! k-means, and for every (cluster, strategy) pair a linear regressor is fit
//! whose features are the `|S|^K` products of per-cluster strategy
//! proportions plus a constant. Among several k-means restarts, the
//! clustering whose regressors have the lowest squared error wins.
//!
//! Cluster strategy vectors `s = (s_0, .., s_{K-1})` are indexed
//! lexicographically with cluster 0 most significant:
//! `index = sum_j s_j * |S|^(K-1-j)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{ObservationSet, PureProfile};
use crate::linalg::{min_norm_lstsq, DEFAULT_RANK_TOL};
use crate::rng::StreamRng;

pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_KMEANS_ITERS: usize = 100;

/// Assignment of N agents to K nonempty clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub k: usize,
}

impl Clustering {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        let c = Self { assignment, k };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return invalid("clustering needs at least one cluster");
        }
        let mut seen = vec![false; self.k];
        for &c in &self.assignment {
            if c >= self.k {
                return invalid(format!("cluster index {c} out of range 0..{}", self.k));
            }
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return invalid(format!("cluster {empty} is empty"));
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.assignment.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |&(_, &c)| c == cluster)
            .map(|(a, _)| a)
    }

    /// True if both clusterings induce the same partition of the agents.
    pub fn same_partition(&self, other: &Clustering) -> bool {
        if self.assignment.len() != other.assignment.len() || self.k != other.k {
            return false;
        }
        let mut map = vec![usize::MAX; self.k];
        let mut used = vec![false; other.k];
        for (&a, &b) in self.assignment.iter().zip(&other.assignment) {
            if map[a] == usize::MAX {
                if used[b] {
                    return false;
                }
                map[a] = b;
                used[b] = true;
            } else if map[a] != b {
                return false;
            }
        }
        true
    }
}

/// Per-agent mean payoff for each strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub n_agents: usize,
    pub n_strategies: usize,
    pub values: Vec<f64>,
    /// Entries where the agent never played the strategy; these hold the
    /// agent's overall mean payoff instead.
    pub imputed: Vec<bool>,
}

impl FeatureMatrix {
    pub fn get(&self, agent: usize, strategy: usize) -> f64 {
        self.values[agent * self.n_strategies + strategy]
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.values[agent * self.n_strategies..(agent + 1) * self.n_strategies]
    }

    pub fn is_imputed(&self, agent: usize, strategy: usize) -> bool {
        self.imputed[agent * self.n_strategies + strategy]
    }

    pub fn any_imputed(&self) -> bool {
        self.imputed.iter().any(|&b| b)
    }
}

pub fn agent_features(obs: &ObservationSet) -> Result<FeatureMatrix> {
    if obs.is_empty() {
        return invalid("cannot build features from an empty observation set");
    }
    let n = obs.descriptor.n_agents;
    let s = obs.descriptor.n_strategies;
    let mut sums = vec![0.0; n * s];
    let mut counts = vec![0usize; n * s];
    for o in &obs.observations {
        for (a, (&st, &pay)) in o.profile.0.iter().zip(&o.payoffs).enumerate() {
            sums[a * s + st] += pay;
            counts[a * s + st] += 1;
        }
    }
    let mut values = vec![0.0; n * s];
    let mut imputed = vec![false; n * s];
    for a in 0..n {
        let row = a * s..(a + 1) * s;
        let overall = sums[row.clone()].iter().sum::<f64>() / obs.len() as f64;
        for idx in row {
            if counts[idx] == 0 {
                values[idx] = overall;
                imputed[idx] = true;
            } else {
                values[idx] = sums[idx] / counts[idx] as f64;
            }
        }
    }
    Ok(FeatureMatrix { n_agents: n, n_strategies: s, values, imputed })
}

/// Standardizes each agent's payoffs to zero mean and unit variance across
/// observations. Agents with constant payoffs are only centered.
pub fn normalize_payoffs(obs: &ObservationSet) -> ObservationSet {
    let n = obs.descriptor.n_agents;
    let m = obs.len() as f64;
    let mut out = obs.clone();
    for a in 0..n {
        let mean = obs.observations.iter().map(|o| o.payoffs[a]).sum::<f64>() / m;
        let var = obs.observations.iter().map(|o| (o.payoffs[a] - mean) * (o.payoffs[a] - mean)).sum::<f64>() / m;
        let sd = libm::sqrt(var);
        for o in &mut out.observations {
            o.payoffs[a] -= mean;
            if sd > 0.0 {
                o.payoffs[a] /= sd;
            }
        }
    }
    out
}

/// Result of one k-means run, with its starting point for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansRun {
    pub clustering: Clustering,
    /// Random partition the run started from (may contain empty clusters).
    pub initial_assignment: Vec<usize>,
    pub initial_sse: f64,
    pub sse: f64,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn centroids(f: &FeatureMatrix, assignment: &[usize], k: usize) -> (Vec<f64>, Vec<usize>) {
    let d = f.n_strategies;
    let mut c = vec![0.0; k * d];
    let mut sizes = vec![0usize; k];
    for (a, &cl) in assignment.iter().enumerate() {
        sizes[cl] += 1;
        for (acc, v) in c[cl * d..(cl + 1) * d].iter_mut().zip(f.row(a)) {
            *acc += v;
        }
    }
    for (cl, &size) in sizes.iter().enumerate() {
        if size > 0 {
            for v in &mut c[cl * d..(cl + 1) * d] {
                *v /= size as f64;
            }
        }
    }
    (c, sizes)
}

/// Sum over agents of the squared distance to their cluster mean.
pub fn within_cluster_sse(f: &FeatureMatrix, assignment: &[usize], k: usize) -> f64 {
    let d = f.n_strategies;
    let (c, _) = centroids(f, assignment, k);
    assignment
        .iter()
        .enumerate()
        .map(|(a, &cl)| sq_dist(f.row(a), &c[cl * d..(cl + 1) * d]))
        .sum()
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(f: &FeatureMatrix, assignment: &mut [usize], k: usize) {
    let d = f.n_strategies;
    loop {
        let (c, sizes) = centroids(f, assignment, k);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let donor = assignment
            .iter()
            .enumerate()
            .filter(|&(_, &cl)| sizes[cl] > 1)
            .map(|(a, &cl)| (a, sq_dist(f.row(a), &c[cl * d..(cl + 1) * d])))
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        match donor {
            Some((a, _)) => assignment[a] = empty,
            None => return,
        }
    }
}

/// Lloyd's algorithm from a random partition.
pub fn kmeans_run<R: Rng + ?Sized>(
    features: &FeatureMatrix,
    k: usize,
    rng: &mut R,
    max_iters: usize,
) -> Result<KMeansRun> {
    let n = features.n_agents;
    if k == 0 || k > n {
        return invalid(format!("k = {k} must be in 1..={n}"));
    }
    let d = features.n_strategies;
    let initial_assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let initial_sse = within_cluster_sse(features, &initial_assignment, k);

    let mut assignment = initial_assignment.clone();
    repair_empty(features, &mut assignment, k);
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let (c, _) = centroids(features, &assignment, k);
        let mut changed = false;
        for (a, slot) in assignment.iter_mut().enumerate() {
            let x = features.row(a);
            let mut best = *slot;
            let mut best_d = sq_dist(x, &c[best * d..(best + 1) * d]);
            for cl in 0..k {
                let dist = sq_dist(x, &c[cl * d..(cl + 1) * d]);
                if dist < best_d {
                    best = cl;
                    best_d = dist;
                }
            }
            if best != *slot {
                *slot = best;
                changed = true;
            }
        }
        repair_empty(features, &mut assignment, k);
        if !changed {
            break;
        }
    }
    let sse = within_cluster_sse(features, &assignment, k);
    Ok(KMeansRun {
        clustering: Clustering::new(assignment, k)?,
        initial_assignment,
        initial_sse,
        sse,
        iterations,
    })
}

pub fn kmeans<R: Rng + ?Sized>(
    features: &FeatureMatrix,
    k: usize,
    rng: &mut R,
    max_iters: usize,
) -> Result<Clustering> {
    kmeans_run(features, k, rng, max_iters).map(|r| r.clustering)
}

/// Strategy distribution of every cluster, `probs[j * |S| + s] = P_j(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterDistributions {
    pub k: usize,
    pub n_strategies: usize,
    pub probs: Vec<f64>,
}

impl ClusterDistributions {
    pub fn new(k: usize, n_strategies: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != k * n_strategies {
            return invalid("distribution table has the wrong size");
        }
        for j in 0..k {
            let row = &probs[j * n_strategies..(j + 1) * n_strategies];
            if row.iter().any(|&p| !(p >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return invalid(format!("cluster {j} distribution is not a probability vector"));
            }
        }
        Ok(Self { k, n_strategies, probs })
    }

    /// Point mass on `strategies[j]` for each cluster j.
    pub fn point_masses(strategies: &[usize], n_strategies: usize) -> Self {
        let k = strategies.len();
        let mut probs = vec![0.0; k * n_strategies];
        for (j, &s) in strategies.iter().enumerate() {
            probs[j * n_strategies + s] = 1.0;
        }
        Self { k, n_strategies, probs }
    }

    pub fn get(&self, cluster: usize, strategy: usize) -> f64 {
        self.probs[cluster * self.n_strategies + strategy]
    }

    pub fn cluster(&self, cluster: usize) -> &[f64] {
        &self.probs[cluster * self.n_strategies..(cluster + 1) * self.n_strategies]
    }

    /// Products `prod_j P_j(s_j)` for every cluster strategy vector, in
    /// lexicographic order.
    pub fn monomials(&self) -> Vec<f64> {
        let s = self.n_strategies;
        let mut out = vec![1.0];
        for j in 0..self.k {
            let p = self.cluster(j);
            out = out.iter().flat_map(|&m| p.iter().map(move |&q| m * q)).collect();
        }
        debug_assert_eq!(out.len(), s.pow(self.k as u32));
        out
    }
}

/// Proportion of each cluster's agents playing each strategy in `profile`.
pub fn empirical_cluster_distribution(
    profile: &PureProfile,
    clustering: &Clustering,
    n_strategies: usize,
) -> Result<ClusterDistributions> {
    if profile.len() != clustering.n_agents() {
        return invalid("profile and clustering disagree on the number of agents");
    }
    let k = clustering.k;
    let mut counts = vec![0.0; k * n_strategies];
    for (&s, &c) in profile.0.iter().zip(&clustering.assignment) {
        if s >= n_strategies {
            return invalid(format!("strategy {s} out of range"));
        }
        counts[c * n_strategies + s] += 1.0;
    }
    let sizes = clustering.sizes();
    for j in 0..k {
        for v in &mut counts[j * n_strategies..(j + 1) * n_strategies] {
            *v /= sizes[j] as f64;
        }
    }
    Ok(ClusterDistributions { k, n_strategies, probs: counts })
}

/// Coefficients of all `K * |S|` payoff regressors. Equation `i * |S| + s`
/// predicts the payoff of an agent in cluster i playing s; its last entry is
/// the constant offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorSet {
    pub k: usize,
    pub n_strategies: usize,
    pub equations: Vec<Vec<f64>>,
}

impl RegressorSet {
    pub fn n_profiles(&self) -> usize {
        self.n_strategies.pow(self.k as u32)
    }

    pub fn zeros(k: usize, n_strategies: usize) -> Self {
        let width = n_strategies.pow(k as u32) + 1;
        Self { k, n_strategies, equations: vec![vec![0.0; width]; k * n_strategies] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n_strategies < 2 {
            return invalid("regressor set needs K >= 1 and |S| >= 2");
        }
        let width = self.n_profiles() + 1;
        if self.equations.len() != self.k * self.n_strategies
            || self.equations.iter().any(|e| e.len() != width)
        {
            return invalid(format!(
                "expected {} equations of {width} coefficients",
                self.k * self.n_strategies
            ));
        }
        if self.equations.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("non-finite regressor coefficient");
        }
        Ok(())
    }

    /// Lexicographic index of a cluster strategy vector.
    pub fn profile_index(&self, strategies: &[usize]) -> usize {
        strategies.iter().fold(0, |acc, &s| acc * self.n_strategies + s)
    }

    pub fn equation(&self, cluster: usize, strategy: usize) -> &[f64] {
        &self.equations[cluster * self.n_strategies + strategy]
    }

    pub fn equation_mut(&mut self, cluster: usize, strategy: usize) -> &mut Vec<f64> {
        &mut self.equations[cluster * self.n_strategies + strategy]
    }

    pub fn offset(&self, cluster: usize, strategy: usize) -> f64 {
        *self.equation(cluster, strategy).last().unwrap()
    }

    pub fn coefficient(&self, cluster: usize, strategy: usize, strategies: &[usize]) -> f64 {
        self.equation(cluster, strategy)[self.profile_index(strategies)]
    }

    pub fn predict_from_monomials(&self, cluster: usize, strategy: usize, monomials: &[f64]) -> f64 {
        let eq = self.equation(cluster, strategy);
        let (beta, offset) = eq.split_at(eq.len() - 1);
        beta.iter().zip(monomials).map(|(b, m)| b * m).sum::<f64>() + offset[0]
    }

    /// Predicted payoff of an agent in `cluster` playing `strategy` when the
    /// clusters mix independently according to `dists`.
    pub fn predict_payoff(&self, cluster: usize, strategy: usize, dists: &ClusterDistributions) -> f64 {
        self.predict_from_monomials(cluster, strategy, &dists.monomials())
    }
}

/// One regression problem per (cluster, strategy) pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegressionDataset {
    /// Monomials followed by a trailing constant 1.
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub k: usize,
    pub n_strategies: usize,
    pub datasets: Vec<RegressionDataset>,
}

impl RegressionData {
    pub fn dataset(&self, cluster: usize, strategy: usize) -> &RegressionDataset {
        &self.datasets[cluster * self.n_strategies + strategy]
    }

    pub fn n_instances(&self) -> usize {
        self.datasets.iter().map(|d| d.targets.len()).sum()
    }

    fn missing(&self) -> Vec<(usize, usize)> {
        (0..self.k)
            .flat_map(|i| (0..self.n_strategies).map(move |s| (i, s)))
            .filter(|&(i, s)| self.dataset(i, s).targets.is_empty())
            .collect()
    }
}

/// One data instance per agent per observation, filed under the agent's
/// cluster and played strategy.
pub fn build_regression_data(obs: &ObservationSet, clustering: &Clustering) -> Result<RegressionData> {
    let s = obs.descriptor.n_strategies;
    if clustering.n_agents() != obs.descriptor.n_agents {
        return invalid("clustering and observations disagree on the number of agents");
    }
    clustering.validate()?;
    let k = clustering.k;
    let mut datasets = vec![RegressionDataset::default(); k * s];
    for o in &obs.observations {
        let dists = empirical_cluster_distribution(&o.profile, clustering, s)?;
        let mut row = dists.monomials();
        row.push(1.0);
        for ((&st, &pay), &c) in o.profile.0.iter().zip(&o.payoffs).zip(&clustering.assignment) {
            let ds = &mut datasets[c * s + st];
            ds.rows.push(row.clone());
            ds.targets.push(pay);
        }
    }
    let data = RegressionData { k, n_strategies: s, datasets };
    let missing = data.missing();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing, clustering: Some(clustering.assignment.clone()) });
    }
    Ok(data)
}

/// Minimum-norm least-squares fit of every regressor equation.
pub fn fit_regressors(data: &RegressionData) -> Result<RegressorSet> {
    let missing = data.missing();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing, clustering: None });
    }
    let width = data.n_strategies.pow(data.k as u32) + 1;
    let equations = data
        .datasets
        .iter()
        .map(|ds| {
            let flat: Vec<f64> = ds.rows.concat();
            min_norm_lstsq(&flat, ds.targets.len(), width, &ds.targets, DEFAULT_RANK_TOL).solution
        })
        .collect();
    Ok(RegressorSet { k: data.k, n_strategies: data.n_strategies, equations })
}

/// Squared error and R^2 of `reg` over a prepared regression data set.
pub fn data_sse(reg: &RegressorSet, data: &RegressionData) -> (f64, f64) {
    let mut sse = 0.0;
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..data.k {
        for s in 0..data.n_strategies {
            let ds = data.dataset(i, s);
            for (row, &y) in ds.rows.iter().zip(&ds.targets) {
                let pred = reg.predict_from_monomials(i, s, &row[..row.len() - 1]);
                sse += (pred - y) * (pred - y);
                sum += y;
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    let tss: f64 = data
        .datasets
        .iter()
        .flat_map(|d| d.targets.iter())
        .map(|y| (y - mean) * (y - mean))
        .sum();
    let r2 = if tss > 0.0 {
        1.0 - sse / tss
    } else if sse == 0.0 {
        1.0
    } else {
        0.0
    };
    (sse, r2)
}

/// Sum of squared errors over all instances and the coefficient of determination.
pub fn model_sse(reg: &RegressorSet, obs: &ObservationSet, clustering: &Clustering) -> Result<(f64, f64)> {
    reg.validate()?;
    if reg.k != clustering.k || reg.n_strategies != obs.descriptor.n_strategies {
        return invalid("regressor set does not match clustering or observations");
    }
    let data = build_regression_data(obs, clustering)?;
    Ok(data_sse(reg, &data))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub clustering: Clustering,
    pub regressors: RegressorSet,
    pub sse: f64,
    pub r2: f64,
}

impl ClusterModel {
    pub fn validate(&self) -> Result<()> {
        self.clustering.validate()?;
        self.regressors.validate()?;
        if self.regressors.k != self.clustering.k {
            return invalid("model clustering and regressors disagree on K");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Standardize each agent's payoffs before learning.
    pub normalize: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self { k: 2, restarts: DEFAULT_RESTARTS, max_iters: DEFAULT_KMEANS_ITERS, normalize: false }
    }
}

/// Outcome of every restart alongside the selected model.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnReport {
    pub model: ClusterModel,
    /// SSE per restart; `None` where the clustering lacked coverage.
    pub restart_sse: Vec<Option<f64>>,
    pub best_restart: usize,
}

/// k-means + regression restarts, keeping the lowest-SSE model. Restarts
/// whose clustering leaves a (cluster, strategy) pair without data are
/// skipped; if all of them fail, the first coverage error is returned.
pub fn learn_model_report<R: RngCore + ?Sized>(
    obs: &ObservationSet,
    config: &LearnConfig,
    rng: &mut R,
) -> Result<LearnReport> {
    use rand::SeedableRng;

    obs.validate()?;
    if config.restarts == 0 {
        return invalid("restarts must be at least 1");
    }
    let normalized;
    let obs = if config.normalize {
        normalized = normalize_payoffs(obs);
        &normalized
    } else {
        obs
    };
    let features = agent_features(obs)?;
    let seeds: Vec<u64> = (0..config.restarts).map(|_| rng.next_u64()).collect();

    let mut best: Option<(usize, ClusterModel)> = None;
    let mut first_err = None;
    let mut restart_sse = Vec::with_capacity(seeds.len());
    for (r, &seed) in seeds.iter().enumerate() {
        let mut stream = StreamRng::seed_from_u64(seed);
        let clustering = kmeans(&features, config.k, &mut stream, config.max_iters)?;
        let data = match build_regression_data(obs, &clustering) {
            Ok(d) => d,
            Err(e @ Error::Coverage { .. }) => {
                first_err.get_or_insert(e);
                restart_sse.push(None);
                continue;
            }
            Err(e) => return Err(e),
        };
        let regressors = fit_regressors(&data)?;
        let (sse, r2) = data_sse(&regressors, &data);
        restart_sse.push(Some(sse));
        if best.as_ref().is_none_or(|(_, m)| sse < m.sse) {
            best = Some((r, ClusterModel { clustering, regressors, sse, r2 }));
        }
    }
    match best {
        Some((best_restart, model)) => Ok(LearnReport { model, restart_sse, best_restart }),
        None => Err(first_err.expect("at least one restart ran")),
    }
}

pub fn learn_model<R: RngCore + ?Sized>(
    obs: &ObservationSet,
    config: &LearnConfig,
    rng: &mut R,
) -> Result<ClusterModel> {
    learn_model_report(obs, config, rng).map(|r| r.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameDescriptor, GameKind, Observation};

    fn descriptor(n: usize, s: usize) -> GameDescriptor {
        GameDescriptor { n_agents: n, n_strategies: s, kind: GameKind::Vendor }
    }

    #[test]
    fn single_observation_features() {
        let obs = ObservationSet {
            descriptor: descriptor(2, 2),
            observations: vec![Observation { profile: PureProfile(vec![0, 1]), payoffs: vec![7.0, -2.0] }],
        };
        let f = agent_features(&obs).unwrap();
        assert_eq!(f.get(0, 0), 7.0);
        assert!(!f.is_imputed(0, 0));
        assert!(f.is_imputed(0, 1));
        assert_eq!(f.get(0, 1), 7.0);
        assert_eq!(f.get(1, 1), -2.0);
    }

    #[test]
    fn features_average_payoffs() {
        let obs = ObservationSet {
            descriptor: descriptor(1, 2),
            observations: vec![
                Observation { profile: PureProfile(vec![1]), payoffs: vec![2.0] },
                Observation { profile: PureProfile(vec![1]), payoffs: vec![4.0] },
                Observation { profile: PureProfile(vec![0]), payoffs: vec![-1.0] },
            ],
        };
        let f = agent_features(&obs).unwrap();
        assert_eq!(f.get(0, 1), 3.0);
        assert_eq!(f.get(0, 0), -1.0);
        assert!(!f.any_imputed());
    }

    #[test]
    fn empty_observations_rejected() {
        let obs = ObservationSet { descriptor: descriptor(2, 2), observations: vec![] };
        assert!(agent_features(&obs).is_err());
    }

    #[test]
    fn cluster_proportions() {
        let c = Clustering::new(vec![0, 0, 0, 0, 1], 2).unwrap();
        let d = empirical_cluster_distribution(&PureProfile(vec![0, 0, 1, 1, 1]), &c, 2).unwrap();
        assert_eq!(d.cluster(0), &[0.5, 0.5]);
        assert_eq!(d.cluster(1), &[0.0, 1.0]);
    }

    #[test]
    fn monomial_order_is_lexicographic() {
        let d = ClusterDistributions::new(2, 2, vec![0.25, 0.75, 0.5, 0.5]).unwrap();
        let m = d.monomials();
        assert_eq!(m, vec![0.125, 0.125, 0.375, 0.375]);
        let r = RegressorSet::zeros(2, 2);
        assert_eq!(r.profile_index(&[1, 0]), 2);
    }

    #[test]
    fn clustering_rejects_empty_cluster() {
        assert!(Clustering::new(vec![0, 0, 2], 3).is_err());
        assert!(Clustering::new(vec![0, 3], 3).is_err());
    }

    #[test]
    fn same_partition_up_to_labels() {
        let a = Clustering::new(vec![0, 1, 1, 0], 2).unwrap();
        let b = Clustering::new(vec![1, 0, 0, 1], 2).unwrap();
        let c = Clustering::new(vec![1, 0, 1, 1], 2).unwrap();
        assert!(a.same_partition(&b));
        assert!(!a.same_partition(&c));
    }
}
