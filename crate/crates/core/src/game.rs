//! The underlying N-agent games: the vendor location game and the Santa Fe
//! bar game, plus random instance generation and observation sampling.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Retry cap for drawing a type matrix that contains a complement.
pub const TYPE_MATRIX_RETRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Vendor,
    Santafe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameDescriptor {
    pub n_agents: usize,
    pub n_strategies: usize,
    pub kind: GameKind,
}

impl GameDescriptor {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return invalid("game must have at least one agent");
        }
        if self.n_strategies < 2 {
            return invalid("game must have at least two strategies");
        }
        Ok(())
    }

    pub fn check_profile(&self, profile: &PureProfile) -> Result<()> {
        if profile.len() != self.n_agents {
            return invalid(format!(
                "profile has {} strategies, game has {} agents",
                profile.len(),
                self.n_agents
            ));
        }
        if let Some(&s) = profile.0.iter().find(|&&s| s >= self.n_strategies) {
            return invalid(format!("strategy {s} out of range 0..{}", self.n_strategies));
        }
        Ok(())
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return invalid("ragged matrix rows");
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_consistent(&self) -> bool {
        self.data.len() == self.rows * self.cols
    }
}

/// One pure strategy per agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PureProfile(pub Vec<usize>);

impl PureProfile {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn with(&self, agent: usize, strategy: usize) -> Self {
        let mut p = self.clone();
        p.0[agent] = strategy;
        p
    }
}

impl From<Vec<usize>> for PureProfile {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// A payoff function over pure profiles of N agents that share one strategy set.
pub trait PayoffModel {
    fn descriptor(&self) -> GameDescriptor;

    /// Payoff of every agent under `profile`.
    fn payoffs(&self, profile: &PureProfile) -> Result<Vec<f64>>;

    /// Payoff `agent` would get by switching to `alt` with everyone else fixed.
    fn counterfactual_payoff(&self, profile: &PureProfile, agent: usize, alt: usize) -> Result<f64> {
        let d = self.descriptor();
        check_deviation(&d, profile, agent, alt)?;
        Ok(self.payoffs(&profile.with(agent, alt))?[agent])
    }
}

fn check_deviation(d: &GameDescriptor, profile: &PureProfile, agent: usize, alt: usize) -> Result<()> {
    d.check_profile(profile)?;
    if agent >= d.n_agents {
        return invalid(format!("agent {agent} out of range 0..{}", d.n_agents));
    }
    if alt >= d.n_strategies {
        return invalid(format!("strategy {alt} out of range 0..{}", d.n_strategies));
    }
    Ok(())
}

/// Vendors choosing locations; co-located vendors affect each other through
/// the pairwise interaction matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VendorGameSpec {
    /// Mean impact of product type j on product type i.
    pub type_matrix: Matrix,
    /// `A(x, y)`: impact of vendor y on vendor x. The diagonal is unused.
    pub interaction_matrix: Matrix,
    pub bias: Vec<f64>,
    pub agent_type: Vec<usize>,
    pub n_locations: usize,
    pub sigma2: f64,
}

impl VendorGameSpec {
    pub fn n_agents(&self) -> usize {
        self.bias.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.bias.len();
        if n == 0 {
            return invalid("vendor game needs at least one agent");
        }
        if self.n_locations < 2 {
            return invalid("vendor game needs at least two locations");
        }
        if !(self.sigma2 >= 0.0) {
            return invalid("sigma2 must be nonnegative");
        }
        let t = &self.type_matrix;
        if !t.is_consistent() || t.rows != t.cols || t.rows == 0 {
            return invalid("type matrix must be square and nonempty");
        }
        let a = &self.interaction_matrix;
        if !a.is_consistent() || a.rows != n || a.cols != n {
            return invalid(format!("interaction matrix must be {n}x{n}"));
        }
        if self.agent_type.len() != n {
            return invalid("agent_type length must equal the number of agents");
        }
        if self.agent_type.iter().any(|&ty| ty >= t.rows) {
            return invalid("agent type index out of range");
        }
        if self.bias.iter().chain(a.data.iter()).any(|v| !v.is_finite()) {
            return invalid("vendor game entries must be finite");
        }
        Ok(())
    }

    /// Payoff of every vendor: its bias plus the impacts of all other vendors
    /// sharing its location.
    pub fn payoffs(&self, profile: &PureProfile) -> Result<Vec<f64>> {
        self.descriptor().check_profile(profile)?;
        let s = profile.as_slice();
        Ok((0..s.len()).map(|x| self.payoff_at(s, x, s[x])).collect())
    }

    fn payoff_at(&self, s: &[usize], x: usize, location: usize) -> f64 {
        let row = self.interaction_matrix.row(x);
        let mut total = self.bias[x];
        for (y, (&sy, &a)) in s.iter().zip(row).enumerate() {
            if y != x && sy == location {
                total += a;
            }
        }
        total
    }
}

impl PayoffModel for VendorGameSpec {
    fn descriptor(&self) -> GameDescriptor {
        GameDescriptor {
            n_agents: self.n_agents(),
            n_strategies: self.n_locations,
            kind: GameKind::Vendor,
        }
    }

    fn payoffs(&self, profile: &PureProfile) -> Result<Vec<f64>> {
        VendorGameSpec::payoffs(self, profile)
    }

    fn counterfactual_payoff(&self, profile: &PureProfile, agent: usize, alt: usize) -> Result<f64> {
        check_deviation(&self.descriptor(), profile, agent, alt)?;
        Ok(self.payoff_at(profile.as_slice(), agent, alt))
    }
}

/// Santa Fe (El Farol) bar game. Strategy 0 stays home, strategy 1 visits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SantaFeSpec {
    pub n_agents: usize,
    pub capacity_fraction: f64,
    pub u_visit_fits: f64,
    pub u_visit_full: f64,
    pub u_home: f64,
}

pub const HOME: usize = 0;
pub const VISIT: usize = 1;

impl SantaFeSpec {
    pub fn new(n_agents: usize, capacity_fraction: f64, utilities: (f64, f64, f64)) -> Result<Self> {
        let spec = Self {
            n_agents,
            capacity_fraction,
            u_visit_fits: utilities.0,
            u_visit_full: utilities.1,
            u_home: utilities.2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return invalid("Santa Fe game needs at least one agent");
        }
        if !(self.capacity_fraction > 0.0 && self.capacity_fraction < 1.0) {
            return invalid("capacity fraction must lie in (0, 1)");
        }
        if ![self.u_visit_fits, self.u_visit_full, self.u_home].iter().all(|u| u.is_finite()) {
            return invalid("utilities must be finite");
        }
        if !(self.u_visit_fits > self.u_home && self.u_home > self.u_visit_full) {
            return invalid("utilities must satisfy visit-fits > home > visit-full");
        }
        Ok(())
    }

    /// Number of visitors that fit comfortably, `floor(c * N)`.
    pub fn comfortable_capacity(&self) -> usize {
        // Guard against products like 0.7 * 10 = 6.999...
        libm::floor(self.capacity_fraction * self.n_agents as f64 + 1e-9) as usize
    }

    fn visit_payoff(&self, visitors: usize) -> f64 {
        if visitors <= self.comfortable_capacity() {
            self.u_visit_fits
        } else {
            self.u_visit_full
        }
    }

    pub fn payoffs(&self, profile: &PureProfile) -> Result<Vec<f64>> {
        self.descriptor().check_profile(profile)?;
        let visitors = profile.0.iter().filter(|&&s| s == VISIT).count();
        let visit = self.visit_payoff(visitors);
        Ok(profile
            .0
            .iter()
            .map(|&s| if s == VISIT { visit } else { self.u_home })
            .collect())
    }
}

impl PayoffModel for SantaFeSpec {
    fn descriptor(&self) -> GameDescriptor {
        GameDescriptor { n_agents: self.n_agents, n_strategies: 2, kind: GameKind::Santafe }
    }

    fn payoffs(&self, profile: &PureProfile) -> Result<Vec<f64>> {
        SantaFeSpec::payoffs(self, profile)
    }

    fn counterfactual_payoff(&self, profile: &PureProfile, agent: usize, alt: usize) -> Result<f64> {
        check_deviation(&self.descriptor(), profile, agent, alt)?;
        if alt == HOME {
            return Ok(self.u_home);
        }
        let others = profile
            .0
            .iter()
            .enumerate()
            .filter(|&(y, &s)| y != agent && s == VISIT)
            .count();
        Ok(self.visit_payoff(others + 1))
    }
}

/// Either of the supported underlying games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Game {
    Vendor(VendorGameSpec),
    Santafe(SantaFeSpec),
}

impl Game {
    pub fn validate(&self) -> Result<()> {
        match self {
            Game::Vendor(g) => g.validate(),
            Game::Santafe(g) => g.validate(),
        }
    }
}

impl PayoffModel for Game {
    fn descriptor(&self) -> GameDescriptor {
        match self {
            Game::Vendor(g) => g.descriptor(),
            Game::Santafe(g) => g.descriptor(),
        }
    }

    fn payoffs(&self, profile: &PureProfile) -> Result<Vec<f64>> {
        match self {
            Game::Vendor(g) => g.payoffs(profile),
            Game::Santafe(g) => g.payoffs(profile),
        }
    }

    fn counterfactual_payoff(&self, profile: &PureProfile, agent: usize, alt: usize) -> Result<f64> {
        match self {
            Game::Vendor(g) => g.counterfactual_payoff(profile, agent, alt),
            Game::Santafe(g) => g.counterfactual_payoff(profile, agent, alt),
        }
    }
}

/// Pairwise relation between two product types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Neutral,
    Substitute,
    Complement,
}

/// Draws an off-diagonal relation: neutral 0.1, substitute 0.45, complement 0.45.
pub fn sample_relation<R: Rng + ?Sized>(rng: &mut R) -> Relation {
    let u: f64 = rng.random();
    if u < 0.1 {
        Relation::Neutral
    } else if u < 0.55 {
        Relation::Substitute
    } else {
        Relation::Complement
    }
}

fn relation_mean<R: Rng + ?Sized>(relation: Relation, rng: &mut R) -> f64 {
    match relation {
        Relation::Neutral => 0.0,
        Relation::Substitute => rng.random_range(-3.0..=0.0),
        Relation::Complement => rng.random_range(0.0..=3.0),
    }
}

/// Samples the type interaction matrix: a substitute diagonal, random
/// off-diagonal relations, and at least one complement.
pub fn sample_type_matrix<R: Rng + ?Sized>(n_types: usize, rng: &mut R) -> Result<Matrix> {
    if n_types < 2 {
        return Err(Error::Generation(format!(
            "{n_types} product type(s) cannot contain a complementary interaction"
        )));
    }
    for _ in 0..TYPE_MATRIX_RETRIES {
        let mut t = Matrix::zeros(n_types, n_types);
        let mut has_complement = false;
        for i in 0..n_types {
            for j in 0..n_types {
                let relation = if i == j { Relation::Substitute } else { sample_relation(rng) };
                has_complement |= relation == Relation::Complement;
                t.set(i, j, relation_mean(relation, rng));
            }
        }
        if has_complement {
            return Ok(t);
        }
    }
    Err(Error::Generation(format!(
        "no complementary interaction after {TYPE_MATRIX_RETRIES} draws"
    )))
}

/// Builds a vendor game from given types: biases uniform on [-1, 1] and each
/// `A(x, y)`, `x != y`, drawn once from `Normal(T(type x, type y), sigma2)`.
pub fn sample_vendor_interactions<R: Rng + ?Sized>(
    type_matrix: Matrix,
    agent_type: Vec<usize>,
    n_locations: usize,
    sigma2: f64,
    rng: &mut R,
) -> Result<VendorGameSpec> {
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return invalid("sigma2 must be finite and nonnegative");
    }
    let n = agent_type.len();
    let sd = libm::sqrt(sigma2);
    let bias: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mut a = Matrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let mean = type_matrix.get(agent_type[x], agent_type[y]);
            let normal = Normal::new(mean, sd).map_err(|e| Error::Generation(format!("{e}")))?;
            a.set(x, y, normal.sample(rng));
        }
    }
    let spec = VendorGameSpec {
        type_matrix,
        interaction_matrix: a,
        bias,
        agent_type,
        n_locations,
        sigma2,
    };
    spec.validate()?;
    Ok(spec)
}

/// Samples a complete random vendor game. Types are assigned in equal shares
/// (up to rounding) and shuffled across agents.
pub fn sample_vendor_game<R: Rng + ?Sized>(
    n_agents: usize,
    n_types: usize,
    n_locations: usize,
    sigma2: f64,
    rng: &mut R,
) -> Result<VendorGameSpec> {
    if n_agents == 0 {
        return invalid("vendor game needs at least one agent");
    }
    let t = sample_type_matrix(n_types, rng)?;
    let mut types: Vec<usize> = (0..n_agents).map(|x| x % n_types).collect();
    types.shuffle(rng);
    sample_vendor_interactions(t, types, n_locations, sigma2, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub profile: PureProfile,
    pub payoffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub descriptor: GameDescriptor,
    pub observations: Vec<Observation>,
}

impl ObservationSet {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.descriptor.validate()?;
        for (m, obs) in self.observations.iter().enumerate() {
            self.descriptor
                .check_profile(&obs.profile)
                .map_err(|e| Error::InvalidInput(format!("observation {m}: {e}")))?;
            if obs.payoffs.len() != obs.profile.len() {
                return invalid(format!(
                    "observation {m}: {} payoffs for {} agents",
                    obs.payoffs.len(),
                    obs.profile.len()
                ));
            }
            if obs.payoffs.iter().any(|p| !p.is_finite()) {
                return invalid(format!("observation {m}: non-finite payoff"));
            }
        }
        Ok(())
    }
}

/// Samples `m` profiles with every agent uniform over the strategy set.
pub fn generate_observations<G, R>(game: &G, m: usize, rng: &mut R) -> Result<ObservationSet>
where
    G: PayoffModel + ?Sized,
    R: Rng + ?Sized,
{
    let descriptor = game.descriptor();
    descriptor.validate()?;
    if m == 0 {
        return invalid("need at least one observation");
    }
    let mut observations = Vec::with_capacity(m);
    for _ in 0..m {
        let profile = PureProfile(
            (0..descriptor.n_agents)
                .map(|_| rng.random_range(0..descriptor.n_strategies))
                .collect(),
        );
        let payoffs = game.payoffs(&profile)?;
        observations.push(Observation { profile, payoffs });
    }
    Ok(ObservationSet { descriptor, observations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;
    use rand::SeedableRng;

    fn small_vendor(bias: Vec<f64>, a: &[&[f64]]) -> VendorGameSpec {
        let n = bias.len();
        VendorGameSpec {
            type_matrix: Matrix::from_rows(&[&[-1.0]]).unwrap(),
            interaction_matrix: Matrix::from_rows(a).unwrap(),
            bias,
            agent_type: vec![0; n],
            n_locations: 2,
            sigma2: 0.0,
        }
    }

    fn bar() -> SantaFeSpec {
        SantaFeSpec::new(10, 0.6, (4.0, -6.0, 0.0)).unwrap()
    }

    #[test]
    fn lone_vendor_gets_bias() {
        let g = small_vendor(vec![2.5], &[&[0.0]]);
        assert_eq!(g.payoffs(&PureProfile(vec![1])).unwrap(), vec![2.5]);
    }

    #[test]
    fn separated_vendors_get_bias() {
        let g = small_vendor(vec![1.0, -1.0], &[&[9.0, 3.0], &[4.0, 9.0]]);
        assert_eq!(g.payoffs(&PureProfile(vec![0, 1])).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn three_colocated_vendors_match_pairwise_sum() {
        let a: &[&[f64]] = &[&[100.0, 1.5, -2.0], &[0.25, 100.0, 3.0], &[-1.0, 0.5, 100.0]];
        let g = small_vendor(vec![1.0, 2.0, 3.0], a);
        let got = g.payoffs(&PureProfile(vec![0, 0, 0])).unwrap();
        // brute force over ordered pairs, skipping the diagonal
        let mut want = vec![1.0, 2.0, 3.0];
        for (x, w) in want.iter_mut().enumerate() {
            for y in (0..3).filter(|&y| y != x) {
                *w += a[x][y];
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn vendor_dimension_mismatch_is_rejected() {
        let g = small_vendor(vec![1.0, 2.0], &[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(g.payoffs(&PureProfile(vec![0])), Err(Error::InvalidInput(_))));
        assert!(matches!(g.payoffs(&PureProfile(vec![0, 2])), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn santafe_capacity_outcomes() {
        let g = bar();
        let six: Vec<usize> = (0..10).map(|x| usize::from(x < 6)).collect();
        let p = g.payoffs(&PureProfile(six)).unwrap();
        assert_eq!(&p[..6], &[4.0; 6]);
        assert_eq!(&p[6..], &[0.0; 4]);

        let seven: Vec<usize> = (0..10).map(|x| usize::from(x < 7)).collect();
        let p = g.payoffs(&PureProfile(seven)).unwrap();
        assert_eq!(&p[..7], &[-6.0; 7]);
        assert_eq!(&p[7..], &[0.0; 3]);

        assert_eq!(g.payoffs(&PureProfile(vec![0; 10])).unwrap(), vec![0.0; 10]);
    }

    #[test]
    fn comfortable_capacity_floors() {
        for (c, want) in [(0.4, 4), (0.5, 5), (0.6, 6), (0.7, 7), (0.65, 6), (0.05, 0)] {
            let g = SantaFeSpec::new(10, c, (4.0, -6.0, 0.0)).unwrap();
            assert_eq!(g.comfortable_capacity(), want, "c = {c}");
        }
    }

    #[test]
    fn santafe_rejects_bad_preferences() {
        assert!(SantaFeSpec::new(10, 0.5, (0.0, -6.0, 4.0)).is_err());
        assert!(SantaFeSpec::new(10, 1.0, (4.0, -6.0, 0.0)).is_err());
    }

    #[test]
    fn counterfactual_identity_and_home() {
        let g = bar();
        let prof = PureProfile(vec![1; 10]);
        for a in 0..10 {
            assert_eq!(g.counterfactual_payoff(&prof, a, HOME).unwrap(), 0.0);
            assert_eq!(
                g.counterfactual_payoff(&prof, a, VISIT).unwrap(),
                g.payoffs(&prof).unwrap()[a]
            );
        }
        assert!(g.counterfactual_payoff(&prof, 10, 0).is_err());
        assert!(g.counterfactual_payoff(&prof, 0, 2).is_err());
    }

    #[test]
    fn vendor_counterfactual_matches_full_reevaluation() {
        let mut rng = StreamRng::seed_from_u64(3);
        let g = sample_vendor_game(3, 2, 3, 1.0, &mut rng).unwrap();
        for code in 0..27usize {
            let prof = PureProfile(vec![code % 3, (code / 3) % 3, code / 9]);
            for agent in 0..3 {
                for alt in 0..3 {
                    let full = g.payoffs(&prof.with(agent, alt)).unwrap()[agent];
                    assert_eq!(g.counterfactual_payoff(&prof, agent, alt).unwrap(), full);
                }
            }
        }
    }

    #[test]
    fn zero_variance_single_type_copies_type_mean() {
        let mut rng = StreamRng::seed_from_u64(11);
        let t = Matrix::from_rows(&[&[-1.75, 2.0], &[0.5, -0.5]]).unwrap();
        let g = sample_vendor_interactions(t, vec![0; 6], 2, 0.0, &mut rng).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                if x != y {
                    assert_eq!(g.interaction_matrix.get(x, y), -1.75);
                }
            }
        }
    }

    #[test]
    fn vendor_sampling_is_deterministic() {
        let a = sample_vendor_game(20, 2, 2, 1.5, &mut StreamRng::seed_from_u64(5)).unwrap();
        let b = sample_vendor_game(20, 2, 2, 1.5, &mut StreamRng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn type_matrix_shape() {
        let mut rng = StreamRng::seed_from_u64(1);
        for _ in 0..50 {
            let t = sample_type_matrix(3, &mut rng).unwrap();
            for i in 0..3 {
                assert!((-3.0..=0.0).contains(&t.get(i, i)));
            }
            let off_positive = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .any(|(i, j)| i != j && t.get(i, j) > 0.0);
            assert!(off_positive);
        }
        assert!(matches!(sample_type_matrix(1, &mut rng), Err(Error::Generation(_))));
    }

    #[test]
    fn relation_frequencies() {
        let mut rng = StreamRng::seed_from_u64(99);
        let draws = 10_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            match sample_relation(&mut rng) {
                Relation::Neutral => counts[0] += 1,
                Relation::Substitute => counts[1] += 1,
                Relation::Complement => counts[2] += 1,
            }
        }
        let frac = |c: usize| c as f64 / draws as f64;
        assert!((frac(counts[0]) - 0.1).abs() < 0.02);
        assert!((frac(counts[1]) - 0.45).abs() < 0.03);
        assert!((frac(counts[2]) - 0.45).abs() < 0.03);
    }

    #[test]
    fn single_observation_is_consistent() {
        let g = bar();
        let obs = generate_observations(&g, 1, &mut StreamRng::seed_from_u64(2)).unwrap();
        assert_eq!(obs.len(), 1);
        let o = &obs.observations[0];
        assert_eq!(o.profile.len(), 10);
        assert!(o.profile.0.iter().all(|&s| s < 2));
        assert_eq!(o.payoffs, g.payoffs(&o.profile).unwrap());
        obs.validate().unwrap();
    }

    #[test]
    fn observations_are_uniform_and_reproducible() {
        let g = bar();
        let a = generate_observations(&g, 10_000, &mut StreamRng::seed_from_u64(8)).unwrap();
        let b = generate_observations(&g, 10_000, &mut StreamRng::seed_from_u64(8)).unwrap();
        assert_eq!(a, b);
        for agent in 0..10 {
            let zeros = a.observations.iter().filter(|o| o.profile.0[agent] == 0).count();
            assert!((zeros as f64 / 10_000.0 - 0.5).abs() < 0.02);
        }
        assert!(generate_observations(&g, 0, &mut StreamRng::seed_from_u64(8)).is_err());
    }
}
