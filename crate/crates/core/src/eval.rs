//! Strategy assignment, simulated play, and regret evaluation on the
//! original N-agent game, plus the model-free baselines.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{ObservationSet, PayoffModel, PureProfile, SantaFeSpec};
use crate::learn::Clustering;
use crate::reduce::group_members;

/// Method that produced an assignment plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Cluster-level learning baseline.
    Cll,
    /// Agent-level learning baseline.
    All,
    /// Equilibrium of the K-player cluster game.
    KPlayer,
    /// Twin-symmetric equilibrium of the 2K-player twins game.
    Twins,
    /// Symmetric mixed equilibrium of the hierarchical reduction into `k` groups.
    Wel(usize),
    /// Lowest-regret equilibrium of the `k`-group reduction.
    WelBest(usize),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Cll => f.write_str("CLL"),
            Method::All => f.write_str("ALL"),
            Method::KPlayer => f.write_str("kplayer-NE"),
            Method::Twins => f.write_str("twins-TSNE"),
            Method::Wel(k) => write!(f, "WEL-{k}"),
            Method::WelBest(k) => write!(f, "WEL-{k}-best"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let parsed = match lower.as_str() {
            "cll" => Some(Method::Cll),
            "all" => Some(Method::All),
            "kplayer-ne" | "k-player" | "kplayer" => Some(Method::KPlayer),
            "twins-tsne" | "2k-player" | "twins" => Some(Method::Twins),
            other => other.strip_prefix("wel-").and_then(|rest| match rest.strip_suffix("-best") {
                Some(k) => k.parse().ok().map(Method::WelBest),
                None => rest.parse().ok().map(Method::Wel),
            }),
        };
        parsed
            .filter(|m| !matches!(m, Method::Wel(0) | Method::WelBest(0)))
            .ok_or_else(|| Error::InvalidInput(format!("unknown method {s:?}")))
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A mixed strategy for every agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentPlan {
    pub dists: Vec<Vec<f64>>,
    pub method: Method,
}

impl AssignmentPlan {
    pub fn validate(&self, n_agents: usize, n_strategies: usize) -> Result<()> {
        if self.dists.len() != n_agents {
            return invalid(format!("plan covers {} agents, game has {n_agents}", self.dists.len()));
        }
        for (a, d) in self.dists.iter().enumerate() {
            if d.len() != n_strategies
                || d.iter().any(|&p| !(p >= 0.0))
                || (d.iter().sum::<f64>() - 1.0).abs() > 1e-9
            {
                return invalid(format!("agent {a} has an invalid distribution"));
            }
        }
        Ok(())
    }

    /// Every agent gets its cluster's distribution.
    pub fn from_clusters(clustering: &Clustering, cluster_dists: &[Vec<f64>], method: Method) -> Self {
        let dists = clustering.assignment.iter().map(|&c| cluster_dists[c].clone()).collect();
        Self { dists, method }
    }

    /// Every agent of contiguous group g gets `group_dists[g]`.
    pub fn from_groups(n_agents: usize, group_dists: &[Vec<f64>], method: Method) -> Self {
        let groups = group_dists.len();
        let mut dists = vec![Vec::new(); n_agents];
        for (g, d) in group_dists.iter().enumerate() {
            for a in group_members(n_agents, groups, g) {
                dists[a] = d.clone();
            }
        }
        Self { dists, method }
    }

    pub fn pure(strategies: &[usize], n_strategies: usize, method: Method) -> Self {
        let dists = strategies
            .iter()
            .map(|&s| {
                let mut d = vec![0.0; n_strategies];
                d[s] = 1.0;
                d
            })
            .collect();
        Self { dists, method }
    }
}

fn argmax_lowest(values: impl Iterator<Item = Option<f64>>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (s, v) in values.enumerate() {
        if let Some(v) = v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((s, v));
            }
        }
    }
    best.map(|(s, _)| s)
}

/// Agent-level learning: each agent adopts the strategy with its highest
/// observed mean payoff. Unplayed strategies are ignored; ties go to the
/// lowest index.
pub fn baseline_all(obs: &ObservationSet) -> Result<AssignmentPlan> {
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
    let mut choice = Vec::with_capacity(n);
    for a in 0..n {
        let means = (0..s).map(|st| {
            let i = a * s + st;
            (counts[i] > 0).then(|| sums[i] / counts[i] as f64)
        });
        match argmax_lowest(means) {
            Some(best) => choice.push(best),
            None => return invalid(format!("agent {a} has no observations")),
        }
    }
    Ok(AssignmentPlan::pure(&choice, s, Method::All))
}

/// Cluster-level learning: every member of a cluster adopts the strategy with
/// the highest mean payoff over all member instances.
pub fn baseline_cll(obs: &ObservationSet, clustering: &Clustering) -> Result<AssignmentPlan> {
    let s = obs.descriptor.n_strategies;
    if clustering.n_agents() != obs.descriptor.n_agents {
        return invalid("clustering and observations disagree on the number of agents");
    }
    let k = clustering.k;
    let mut sums = vec![0.0; k * s];
    let mut counts = vec![0usize; k * s];
    for o in &obs.observations {
        for ((&st, &pay), &c) in o.profile.0.iter().zip(&o.payoffs).zip(&clustering.assignment) {
            sums[c * s + st] += pay;
            counts[c * s + st] += 1;
        }
    }
    let missing: Vec<(usize, usize)> = (0..k)
        .flat_map(|c| (0..s).map(move |st| (c, st)))
        .filter(|&(c, st)| counts[c * s + st] == 0)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing, clustering: Some(clustering.assignment.clone()) });
    }
    let cluster_choice: Vec<usize> = (0..k)
        .map(|c| argmax_lowest((0..s).map(|st| Some(sums[c * s + st] / counts[c * s + st] as f64))).unwrap())
        .collect();
    let per_agent: Vec<usize> = clustering.assignment.iter().map(|&c| cluster_choice[c]).collect();
    Ok(AssignmentPlan::pure(&per_agent, s, Method::Cll))
}

/// Profiles and payoffs of repeated play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayRecord {
    pub profiles: Vec<PureProfile>,
    pub payoffs: Vec<Vec<f64>>,
}

impl PlayRecord {
    pub fn iterations(&self) -> usize {
        self.profiles.len()
    }
}

fn sample_from<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (s, &p) in dist.iter().enumerate() {
        cum += p;
        if u < cum {
            return s;
        }
    }
    // rounding left u above the final cumulative sum
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Plays the plan for `iterations` rounds, sampling every agent independently.
pub fn assign_and_simulate<G, R>(game: &G, plan: &AssignmentPlan, iterations: usize, rng: &mut R) -> Result<PlayRecord>
where
    G: PayoffModel + ?Sized,
    R: Rng + ?Sized,
{
    let d = game.descriptor();
    plan.validate(d.n_agents, d.n_strategies)?;
    if iterations == 0 {
        return invalid("need at least one iteration");
    }
    let mut profiles = Vec::with_capacity(iterations);
    let mut payoffs = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let profile = PureProfile(plan.dists.iter().map(|dist| sample_from(dist, rng)).collect());
        payoffs.push(game.payoffs(&profile)?);
        profiles.push(profile);
    }
    Ok(PlayRecord { profiles, payoffs })
}

/// Average per-round gap between the best fixed pure strategy in hindsight
/// (others' play unchanged) and what the agent actually earned.
pub fn external_regret<G: PayoffModel + ?Sized>(game: &G, record: &PlayRecord, agent: usize) -> Result<f64> {
    let d = game.descriptor();
    if record.profiles.is_empty() || record.profiles.len() != record.payoffs.len() {
        return invalid("play record is empty or inconsistent");
    }
    if agent >= d.n_agents {
        return invalid("agent out of range");
    }
    let mut totals = vec![0.0; d.n_strategies];
    let mut realized = 0.0;
    for (profile, pay) in record.profiles.iter().zip(&record.payoffs) {
        for (alt, t) in totals.iter_mut().enumerate() {
            *t += game.counterfactual_payoff(profile, agent, alt)?;
        }
        realized += pay[agent];
    }
    let best = totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((best - realized) / record.iterations() as f64)
}

/// Mean payoff and mean external regret over all agents and rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaySummary {
    pub mean_payoff: f64,
    pub mean_regret: f64,
}

pub fn summarize<G: PayoffModel + ?Sized>(game: &G, record: &PlayRecord) -> Result<PlaySummary> {
    let n = game.descriptor().n_agents;
    let t = record.iterations() as f64;
    let mean_payoff = record.payoffs.iter().flatten().sum::<f64>() / (t * n as f64);
    let mut regret = 0.0;
    for a in 0..n {
        regret += external_regret(game, record, a)?;
    }
    Ok(PlaySummary { mean_payoff, mean_regret: regret / n as f64 })
}

/// Symmetric mixed equilibrium of the Santa Fe game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueMsne {
    /// Visit probability.
    pub p: f64,
    /// True when no interior indifference point exists and `p` is 0 or 1.
    pub boundary: bool,
}

/// `P[Bin(n, p) <= m]`.
pub fn binomial_cdf(n: usize, p: f64, m: i64) -> f64 {
    if m < 0 {
        return 0.0;
    }
    if m as usize >= n {
        return 1.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let ln_p = libm::log(p);
    let ln_q = libm::log1p(-p);
    let ln_n1 = libm::lgamma(n as f64 + 1.0);
    (0..=m as usize)
        .map(|k| {
            let ln_c = ln_n1 - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0);
            libm::exp(ln_c + k as f64 * ln_p + (n - k) as f64 * ln_q)
        })
        .sum::<f64>()
        .min(1.0)
}

/// Expected advantage of visiting over staying home when the other N - 1
/// agents visit independently with probability `p`.
pub fn santafe_visit_advantage(spec: &SantaFeSpec, p: f64) -> f64 {
    let n = spec.n_agents - 1;
    let cap = spec.comfortable_capacity() as i64;
    let fits = binomial_cdf(n, p, cap - 1);
    spec.u_visit_fits * fits + spec.u_visit_full * (1.0 - fits) - spec.u_home
}

/// Visit probability at which a single agent is indifferent, by bisection.
pub fn santafe_true_msne(spec: &SantaFeSpec) -> TrueMsne {
    let h = |p: f64| santafe_visit_advantage(spec, p);
    if h(1.0) >= 0.0 {
        return TrueMsne { p: 1.0, boundary: true };
    }
    if h(0.0) <= 0.0 {
        return TrueMsne { p: 0.0, boundary: true };
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    TrueMsne { p: 0.5 * (lo + hi), boundary: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameDescriptor, GameKind, Observation};
    use crate::rng::StreamRng;
    use rand::SeedableRng;

    fn obs_one_agent(rows: &[(usize, f64)]) -> ObservationSet {
        ObservationSet {
            descriptor: GameDescriptor { n_agents: 1, n_strategies: 2, kind: GameKind::Vendor },
            observations: rows
                .iter()
                .map(|&(s, p)| Observation { profile: PureProfile(vec![s]), payoffs: vec![p] })
                .collect(),
        }
    }

    #[test]
    fn all_picks_argmax_and_breaks_ties_low() {
        let plan = baseline_all(&obs_one_agent(&[(0, 3.0), (1, 5.0)])).unwrap();
        assert_eq!(plan.dists[0], vec![0.0, 1.0]);
        let plan = baseline_all(&obs_one_agent(&[(0, 2.0), (1, 2.0)])).unwrap();
        assert_eq!(plan.dists[0], vec![1.0, 0.0]);
        // never played strategy 0: excluded even though its "mean" is unknown
        let plan = baseline_all(&obs_one_agent(&[(1, -9.0)])).unwrap();
        assert_eq!(plan.dists[0], vec![0.0, 1.0]);
        assert!(baseline_all(&obs_one_agent(&[])).is_err());
    }

    #[test]
    fn cll_single_cluster() {
        let obs = obs_one_agent(&[(0, -2.0), (1, 4.0)]);
        let c = Clustering::new(vec![0], 1).unwrap();
        let plan = baseline_cll(&obs, &c).unwrap();
        assert_eq!(plan.dists[0], vec![0.0, 1.0]);
        let short = obs_one_agent(&[(0, -2.0)]);
        assert!(matches!(baseline_cll(&short, &c), Err(Error::Coverage { .. })));
    }

    #[test]
    fn method_names_roundtrip() {
        for m in [Method::Cll, Method::All, Method::KPlayer, Method::Twins, Method::Wel(5), Method::WelBest(2)] {
            let s = alloc::format!("{m}");
            assert_eq!(s.parse::<Method>().unwrap(), m);
        }
        assert!("WEL-0".parse::<Method>().is_err());
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn staying_home_with_room_costs_four() {
        let bar = SantaFeSpec::new(10, 0.6, (4.0, -6.0, 0.0)).unwrap();
        let mut dists = vec![vec![1.0, 0.0]; 10];
        for d in dists.iter_mut().take(3) {
            *d = vec![0.0, 1.0];
        }
        let plan = AssignmentPlan { dists, method: Method::All };
        let rec = assign_and_simulate(&bar, &plan, 5, &mut StreamRng::seed_from_u64(1)).unwrap();
        assert!(rec.profiles.iter().all(|p| p == &rec.profiles[0]));
        assert_eq!(external_regret(&bar, &rec, 9).unwrap(), 4.0);
        assert_eq!(external_regret(&bar, &rec, 0).unwrap(), 0.0);
    }

    #[test]
    fn true_msne_boundaries_and_monotonicity() {
        let dominant = SantaFeSpec { n_agents: 10, capacity_fraction: 0.5, u_visit_fits: 4.0, u_visit_full: 1.0, u_home: 0.0 };
        assert_eq!(santafe_true_msne(&dominant), TrueMsne { p: 1.0, boundary: true });
        let p5 = santafe_true_msne(&SantaFeSpec::new(10, 0.5, (4.0, -6.0, 0.0)).unwrap());
        let p6 = santafe_true_msne(&SantaFeSpec::new(10, 0.6, (4.0, -6.0, 0.0)).unwrap());
        assert!(!p5.boundary && !p6.boundary);
        assert!(p5.p < p6.p);
    }

    #[test]
    fn binomial_cdf_edges() {
        assert_eq!(binomial_cdf(9, 0.3, -1), 0.0);
        assert_eq!(binomial_cdf(9, 0.3, 9), 1.0);
        assert!((binomial_cdf(2, 0.5, 0) - 0.25).abs() < 1e-15);
        assert!((binomial_cdf(2, 0.5, 1) - 0.75).abs() < 1e-14);
    }
}
