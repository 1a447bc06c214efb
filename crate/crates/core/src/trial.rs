//! Experiment protocol: per-trial generation, learning, solving and
//! evaluation of every method, aggregated into a result table.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::eval::{
    assign_and_simulate, baseline_all, baseline_cll, summarize, AssignmentPlan, Method, PlayRecord, PlaySummary,
};
use crate::game::{generate_observations, sample_vendor_game, Game, ObservationSet, PayoffModel, SantaFeSpec, VISIT};
use crate::learn::{learn_model_report, ClusterModel, LearnConfig};
use crate::reduce::{build_kplayer_game, build_twins_game, build_wel_game, Twin};
use crate::rng::{derive_seed, stream};
use crate::solve::{
    bimatrix_all_ne, enumerate_pure_ne, find_tsne, symmetric_msne_2strategy, EquilibriumList, SolverConfig,
};

/// Underlying game family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum GameConfig {
    /// A fresh random vendor game is drawn for every trial.
    Vendor { n_agents: usize, n_types: usize, n_locations: usize, sigma2: f64 },
    /// One fixed bar game per capacity fraction.
    Santafe {
        n_agents: usize,
        capacities: Vec<f64>,
        /// Payoffs for visiting with room, visiting a crowded bar, staying home.
        #[serde(default = "default_utilities")]
        utilities: [f64; 3],
    },
}

fn default_utilities() -> [f64; 3] {
    [4.0, -6.0, 0.0]
}

impl GameConfig {
    pub fn n_agents(&self) -> usize {
        match self {
            GameConfig::Vendor { n_agents, .. } | GameConfig::Santafe { n_agents, .. } => *n_agents,
        }
    }

    /// Capacity fraction per setting; `None` for the single vendor setting.
    pub fn settings(&self) -> Vec<Option<f64>> {
        match self {
            GameConfig::Vendor { .. } => vec![None],
            GameConfig::Santafe { capacities, .. } => capacities.iter().map(|&c| Some(c)).collect(),
        }
    }

    pub fn santafe_spec(&self, capacity: f64) -> Result<SantaFeSpec> {
        match self {
            GameConfig::Santafe { n_agents, utilities: [fits, full, home], .. } => {
                SantaFeSpec::new(*n_agents, capacity, (*fits, *full, *home))
            }
            GameConfig::Vendor { .. } => invalid("not a Santa Fe configuration"),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GameConfig::Vendor { n_agents, n_types, n_locations, sigma2 } => {
                if *n_agents == 0 {
                    return invalid("n_agents must be positive");
                }
                if *n_types < 2 {
                    return invalid("vendor games need at least two product types");
                }
                if *n_locations < 2 {
                    return invalid("vendor games need at least two locations");
                }
                if !(*sigma2 >= 0.0) || !sigma2.is_finite() {
                    return invalid("sigma2 must be finite and nonnegative");
                }
                Ok(())
            }
            GameConfig::Santafe { capacities, .. } => {
                if capacities.is_empty() {
                    return invalid("at least one capacity is required");
                }
                for &c in capacities {
                    self.santafe_spec(c)?;
                }
                Ok(())
            }
        }
    }
}

fn default_restarts() -> usize {
    10
}

fn default_iterations() -> usize {
    100
}

fn default_methods() -> Vec<Method> {
    vec![Method::Cll, Method::All, Method::KPlayer, Method::Twins]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    /// Number of clusters.
    pub k: usize,
    /// Observed profiles per trial.
    pub observations: usize,
    pub trials: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Rounds of simulated play per evaluation.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Standardize each agent's payoffs before learning.
    #[serde(default)]
    pub normalize: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        let n = self.game.n_agents();
        if self.k == 0 || self.k > n {
            return invalid(format!("k must lie in 1..={n}"));
        }
        for (name, v) in [
            ("observations", self.observations),
            ("trials", self.trials),
            ("restarts", self.restarts),
            ("iterations", self.iterations),
        ] {
            if v == 0 {
                return invalid(format!("{name} must be positive"));
            }
        }
        if self.methods.is_empty() {
            return invalid("no methods selected");
        }
        for m in &self.methods {
            if let Method::Wel(g) | Method::WelBest(g) = m {
                if *g > n {
                    return invalid(format!("{m} needs at most {n} groups"));
                }
            }
        }
        let s = &self.solver;
        if !(s.verify_eps >= 0.0) || !(s.newton_tol > 0.0) || !(s.tie_tol >= 0.0) || s.grid_resolution == 0 {
            return invalid("solver tolerances must be positive");
        }
        Ok(())
    }

    pub fn learn_config(&self) -> LearnConfig {
        LearnConfig { k: self.k, restarts: self.restarts, normalize: self.normalize, ..LearnConfig::default() }
    }
}

/// Evaluation of one candidate plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEval {
    pub plan: AssignmentPlan,
    pub summary: PlaySummary,
}

/// Everything produced for one method within one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    /// Equilibria of the reduced game, when the method solves one.
    pub equilibria: Option<EquilibriumList>,
    pub candidates: Vec<CandidateEval>,
    /// Index into `candidates` of the reported plan.
    pub selected: Option<usize>,
    /// Simulated play of the reported plan.
    pub record: Option<PlayRecord>,
    pub error: Option<String>,
}

impl MethodOutcome {
    fn failed(method: Method, err: &Error) -> Self {
        Self { method, equilibria: None, candidates: Vec::new(), selected: None, record: None, error: Some(err.to_string()) }
    }

    pub fn selected_candidate(&self) -> Option<&CandidateEval> {
        self.selected.map(|i| &self.candidates[i])
    }
}

/// Full output of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub setting: usize,
    pub capacity: Option<f64>,
    pub trial: usize,
    pub game: Option<Game>,
    pub observations: Option<ObservationSet>,
    pub model: Option<ClusterModel>,
    pub methods: Vec<MethodOutcome>,
    /// Failure before any method could run.
    pub error: Option<String>,
}

impl TrialOutcome {
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.methods.iter().any(|m| m.error.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub setting: usize,
    pub capacity: Option<f64>,
    pub trial: usize,
    pub method: Method,
    pub status: Status,
    pub mean_payoff: Option<f64>,
    pub mean_regret: Option<f64>,
    pub n_equilibria: Option<usize>,
    /// Mean probability of visiting the bar under the reported plan.
    pub visit_prob: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMeta {
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub meta: ResultMeta,
    pub rows: Vec<ResultRow>,
}

/// Averages over the successful trials of one setting and method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub setting: usize,
    pub capacity: Option<f64>,
    pub method: Method,
    pub ok: usize,
    pub failed: usize,
    pub mean_payoff: f64,
    pub mean_regret: f64,
    pub visit_prob_mean: Option<f64>,
    pub visit_prob_std: Option<f64>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

impl ResultTable {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.status == Status::Failed)
    }

    /// One row per (setting, method) in first-appearance order.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut keys: Vec<(usize, Method)> = Vec::new();
        for r in &self.rows {
            if !keys.contains(&(r.setting, r.method)) {
                keys.push((r.setting, r.method));
            }
        }
        keys.into_iter()
            .map(|(setting, method)| {
                let rows: Vec<&ResultRow> =
                    self.rows.iter().filter(|r| r.setting == setting && r.method == method).collect();
                let ok: Vec<&&ResultRow> = rows.iter().filter(|r| r.status == Status::Ok).collect();
                let avg = |f: fn(&ResultRow) -> Option<f64>| {
                    let v: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
                    if v.is_empty() {
                        f64::NAN
                    } else {
                        mean_std(&v).0
                    }
                };
                let visits: Vec<f64> = ok.iter().filter_map(|r| r.visit_prob).collect();
                let (vm, vs) = if visits.is_empty() {
                    (None, None)
                } else {
                    let (m, s) = mean_std(&visits);
                    (Some(m), Some(s))
                };
                SummaryRow {
                    setting,
                    capacity: rows[0].capacity,
                    method,
                    ok: ok.len(),
                    failed: rows.len() - ok.len(),
                    mean_payoff: avg(|r| r.mean_payoff),
                    mean_regret: avg(|r| r.mean_regret),
                    visit_prob_mean: vm,
                    visit_prob_std: vs,
                }
            })
            .collect()
    }

    pub fn find_summary(&self, setting: usize, method: Method) -> Option<SummaryRow> {
        self.summary().into_iter().find(|s| s.setting == setting && s.method == method)
    }
}

// Seed path components, one per random stage of a trial.
const STAGE_GAME: u64 = 0;
const STAGE_OBSERVE: u64 = 1;
const STAGE_LEARN: u64 = 2;
const STAGE_EVAL: u64 = 3;

/// Which candidate a method reports when it yields several plans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Highest mean regret; guards against optimistic equilibrium choice.
    Worst,
    /// Lowest mean regret.
    Best,
}

/// Candidate plans of one method and the equilibria they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodPlans {
    pub plans: Vec<AssignmentPlan>,
    pub equilibria: Option<EquilibriumList>,
    pub selection: Selection,
}

/// Simulates every candidate (candidate `i` uses the stream `seed / i`) and
/// reports the one picked by `selection`.
pub fn evaluate_plans<G: PayoffModel + ?Sized>(
    game: &G,
    method: Method,
    planned: MethodPlans,
    iterations: usize,
    seed: u64,
) -> Result<MethodOutcome> {
    if planned.plans.is_empty() {
        return Err(Error::SolverFailure { best_epsilon: f64::INFINITY, best_candidate: None });
    }
    let mut candidates = Vec::with_capacity(planned.plans.len());
    let mut chosen: Option<(usize, f64, PlayRecord)> = None;
    for (i, plan) in planned.plans.into_iter().enumerate() {
        let record = assign_and_simulate(game, &plan, iterations, &mut stream(seed, &[i as u64]))?;
        let summary = summarize(game, &record)?;
        let r = summary.mean_regret;
        let better = match (&chosen, planned.selection) {
            (None, _) => true,
            (Some((_, best, _)), Selection::Worst) => r > *best,
            (Some((_, best, _)), Selection::Best) => r < *best,
        };
        if better {
            chosen = Some((i, r, record));
        }
        candidates.push(CandidateEval { plan, summary });
    }
    let (idx, _, record) = chosen.expect("at least one candidate");
    Ok(MethodOutcome {
        method,
        equilibria: planned.equilibria,
        candidates,
        selected: Some(idx),
        record: Some(record),
        error: None,
    })
}

fn cluster_plans(model: &ClusterModel, eqs: &EquilibriumList, method: Method, twins: bool) -> Vec<AssignmentPlan> {
    let k = model.clustering.k;
    eqs.equilibria
        .iter()
        .map(|e| {
            let dists: Vec<Vec<f64>> = (0..k)
                .map(|c| {
                    let player = if twins { 2 * c + Twin::First as usize } else { c };
                    e.profile.dists[player].clone()
                })
                .collect();
            AssignmentPlan::from_clusters(&model.clustering, &dists, method)
        })
        .collect()
}

fn group_plans(n_agents: usize, eqs: &EquilibriumList, method: Method) -> Vec<AssignmentPlan> {
    eqs.equilibria.iter().map(|e| AssignmentPlan::from_groups(n_agents, &e.profile.dists, method)).collect()
}

fn no_equilibrium(list: &EquilibriumList) -> Result<()> {
    if list.is_empty() {
        return Err(Error::SolverFailure { best_epsilon: f64::INFINITY, best_candidate: None });
    }
    Ok(())
}

/// Plans to evaluate for one method, the equilibria they came from, and
/// whether the worst or best of them is reported.
fn method_plans<G: PayoffModel + ?Sized>(
    method: Method,
    game: &G,
    obs: &ObservationSet,
    model: core::result::Result<&ClusterModel, &Error>,
    solver: &SolverConfig,
) -> Result<MethodPlans> {
    let planned = |plans, equilibria, selection| Ok(MethodPlans { plans, equilibria, selection });
    let n = game.descriptor().n_agents;
    match method {
        Method::All => planned(vec![baseline_all(obs)?], None, Selection::Worst),
        Method::Cll => {
            let model = model.map_err(Clone::clone)?;
            planned(vec![baseline_cll(obs, &model.clustering)?], None, Selection::Worst)
        }
        Method::Twins => {
            let model = model.map_err(Clone::clone)?;
            let (twins, labeling) = build_twins_game(&model.regressors)?;
            let eqs = find_tsne(&twins, &labeling, solver)?;
            no_equilibrium(&eqs)?;
            planned(cluster_plans(model, &eqs, method, true), Some(eqs), Selection::Worst)
        }
        Method::KPlayer => {
            let model = model.map_err(Clone::clone)?;
            let kgame = build_kplayer_game(&model.regressors)?;
            let eqs = if kgame.n_players == 2 {
                bimatrix_all_ne(&kgame, solver)?
            } else {
                enumerate_pure_ne(&kgame, solver)?
            };
            no_equilibrium(&eqs)?;
            planned(cluster_plans(model, &eqs, method, false), Some(eqs), Selection::Worst)
        }
        Method::Wel(groups) => {
            let wel = build_wel_game(game, groups)?;
            let eqs = symmetric_msne_2strategy(&wel, solver)?;
            no_equilibrium(&eqs)?;
            planned(group_plans(n, &eqs, method), Some(eqs), Selection::Worst)
        }
        Method::WelBest(groups) => {
            let wel = build_wel_game(game, groups)?;
            let mut eqs = if wel.n_players == 2 {
                bimatrix_all_ne(&wel, solver)?
            } else {
                enumerate_pure_ne(&wel, solver)?
            };
            if let Ok(sym) = symmetric_msne_2strategy(&wel, solver) {
                eqs.degenerate |= sym.degenerate;
                for e in sym.equilibria {
                    eqs.push_unique(e, 1e-9);
                }
            }
            eqs.sort();
            no_equilibrium(&eqs)?;
            planned(group_plans(n, &eqs, method), Some(eqs), Selection::Best)
        }
    }
}

/// Solves whatever `method` requires and returns its candidate plans.
/// Model-based methods need `model`.
pub fn plan_method<G: PayoffModel + ?Sized>(
    method: Method,
    game: &G,
    obs: &ObservationSet,
    model: Option<&ClusterModel>,
    solver: &SolverConfig,
) -> Result<MethodPlans> {
    let missing = Error::InvalidInput(format!("{method} needs a learned model"));
    method_plans(method, game, obs, model.ok_or(&missing), solver)
}

/// Mean probability of strategy 1 (visiting, in the bar game) across agents.
pub fn visit_probability(plan: &AssignmentPlan) -> f64 {
    plan.dists.iter().map(|d| d[VISIT]).sum::<f64>() / plan.dists.len() as f64
}

/// Runs one trial of one setting. Stage failures are recorded in the outcome.
pub fn run_trial(config: &ExperimentConfig, setting: usize, trial: usize) -> TrialOutcome {
    let capacity = config.game.settings().get(setting).copied().flatten();
    let mut outcome = TrialOutcome {
        setting,
        capacity,
        trial,
        game: None,
        observations: None,
        model: None,
        methods: Vec::new(),
        error: None,
    };
    let (s, t) = (setting as u64, trial as u64);

    let game = match &config.game {
        GameConfig::Vendor { n_agents, n_types, n_locations, sigma2 } => {
            let mut rng = stream(config.seed, &[s, t, STAGE_GAME]);
            sample_vendor_game(*n_agents, *n_types, *n_locations, *sigma2, &mut rng).map(Game::Vendor)
        }
        GameConfig::Santafe { .. } => match capacity {
            Some(c) => config.game.santafe_spec(c).map(Game::Santafe),
            None => invalid("setting index out of range"),
        },
    };
    let game = match game {
        Ok(g) => g,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return outcome;
        }
    };

    let obs = generate_observations(&game, config.observations, &mut stream(config.seed, &[s, t, STAGE_OBSERVE]));
    let obs = match obs {
        Ok(o) => o,
        Err(e) => {
            outcome.error = Some(e.to_string());
            outcome.game = Some(game);
            return outcome;
        }
    };

    let model = learn_model_report(&obs, &config.learn_config(), &mut stream(config.seed, &[s, t, STAGE_LEARN]))
        .map(|r| r.model);

    for (mi, &method) in config.methods.iter().enumerate() {
        let seed = derive_seed(config.seed, &[s, t, STAGE_EVAL, mi as u64]);
        let result = method_plans(method, &game, &obs, model.as_ref(), &config.solver)
            .and_then(|planned| evaluate_plans(&game, method, planned, config.iterations, seed));
        outcome.methods.push(result.unwrap_or_else(|e| MethodOutcome::failed(method, &e)));
    }

    outcome.game = Some(game);
    outcome.observations = Some(obs);
    outcome.model = model.ok();
    outcome
}

/// Table rows for one trial, one per configured method.
pub fn trial_rows(config: &ExperimentConfig, outcome: &TrialOutcome) -> Vec<ResultRow> {
    let santafe = matches!(config.game, GameConfig::Santafe { .. });
    config
        .methods
        .iter()
        .map(|&method| {
            let base = ResultRow {
                setting: outcome.setting,
                capacity: outcome.capacity,
                trial: outcome.trial,
                method,
                status: Status::Failed,
                mean_payoff: None,
                mean_regret: None,
                n_equilibria: None,
                visit_prob: None,
                error: outcome.error.clone(),
            };
            let Some(m) = outcome.methods.iter().find(|m| m.method == method) else {
                return base;
            };
            let n_equilibria = m.equilibria.as_ref().map(|e| e.len());
            match m.selected_candidate() {
                Some(c) => ResultRow {
                    status: Status::Ok,
                    mean_payoff: Some(c.summary.mean_payoff),
                    mean_regret: Some(c.summary.mean_regret),
                    n_equilibria,
                    visit_prob: santafe.then(|| visit_probability(&c.plan)),
                    error: None,
                    ..base
                },
                None => ResultRow { n_equilibria, error: m.error.clone(), ..base },
            }
        })
        .collect()
}

/// Runs every trial of every setting in order. `on_trial` sees each outcome
/// as soon as it is complete, which lets callers persist it.
pub fn run_experiment<F>(config: &ExperimentConfig, mut on_trial: F) -> Result<ResultTable>
where
    F: FnMut(&TrialOutcome) -> Result<()>,
{
    config.validate()?;
    let mut rows = Vec::new();
    for setting in 0..config.game.settings().len() {
        for trial in 0..config.trials {
            let outcome = run_trial(config, setting, trial);
            on_trial(&outcome)?;
            rows.extend(trial_rows(config, &outcome));
        }
    }
    Ok(ResultTable { meta: ResultMeta { config: config.clone() }, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_vendor() -> ExperimentConfig {
        ExperimentConfig {
            game: GameConfig::Vendor { n_agents: 8, n_types: 2, n_locations: 2, sigma2: 0.5 },
            k: 2,
            observations: 10,
            trials: 2,
            restarts: 3,
            iterations: 20,
            solver: SolverConfig::default(),
            seed: 7,
            methods: default_methods(),
            normalize: false,
        }
    }

    #[test]
    fn rows_cover_every_method_and_trial() {
        let table = run_experiment(&tiny_vendor(), |_| Ok(())).unwrap();
        assert_eq!(table.rows.len(), 2 * 4);
        let summary = table.summary();
        assert_eq!(summary.len(), 4);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = tiny_vendor();
        let a = run_experiment(&cfg, |_| Ok(())).unwrap();
        let b = run_experiment(&cfg, |_| Ok(())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = tiny_vendor();
        cfg.k = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_vendor();
        cfg.methods = vec![Method::Wel(20)];
        assert!(cfg.validate().is_err());
        let mut cfg = tiny_vendor();
        cfg.game = GameConfig::Santafe { n_agents: 10, capacities: vec![1.2], utilities: default_utilities() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn wel_on_vendor_game_is_a_recorded_failure() {
        let mut cfg = tiny_vendor();
        cfg.trials = 1;
        cfg.methods = vec![Method::Wel(2), Method::All];
        let table = run_experiment(&cfg, |_| Ok(())).unwrap();
        assert_eq!(table.rows[0].status, Status::Failed);
        assert!(table.rows[0].error.is_some());
        assert_eq!(table.rows[1].status, Status::Ok);
        assert!(table.has_failures());
    }
}
