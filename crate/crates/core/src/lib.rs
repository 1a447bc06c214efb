//! Cluster-based approximation of many-player normal-form games.
//!
//! The crate learns a clustered payoff model from observed pure strategy
//! profiles, builds the reduced "twins" game (two players per cluster) and
//! the plain K-player game, solves them, and evaluates the resulting
//! strategy assignments on the original N-agent game.
//!
//! Everything here is `no_std` with `alloc`; file formats, persistence and
//! the command-line tool live in the `twinsgame` crate.

#![cfg_attr(not(test), no_std)]
// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod game;
pub mod learn;
pub mod linalg;
pub mod nfg;
pub mod reduce;
pub mod rng;
pub mod solve;
pub mod trial;

pub use error::{Error, Result};
pub use eval::{AssignmentPlan, Method, PlayRecord};
pub use game::{
    Game, GameDescriptor, GameKind, Matrix, Observation, ObservationSet, PayoffModel, PureProfile,
    SantaFeSpec, VendorGameSpec,
};
pub use learn::{ClusterDistributions, ClusterModel, Clustering, FeatureMatrix, LearnConfig, RegressorSet};
pub use nfg::NormalFormGame;
pub use reduce::{Twin, TwinsLabeling};
pub use solve::{Equilibrium, EquilibriumList, MixedProfile, SolverConfig};
pub use trial::{ExperimentConfig, GameConfig, ResultRow, ResultTable};
