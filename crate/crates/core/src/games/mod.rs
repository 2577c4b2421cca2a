//! The prepare-and-measure guessing game.
//!
//! Alice receives `x ∈ X`, sends `ψ_x`, Bob measures and outputs `y ∈ X`.
//! `g(x) = ⟨ψ_x, E({x}) ψ_x⟩` is the probability of a correct guess and `G`
//! its uniform average over the tested inputs. In dimension `n` the effects
//! sum to at most the identity, so `Σ_x g(x) ≤ n` and `G ≤ n/|X|`; in
//! `ℓ²(X)` with `X` uncountable, `g ≡ 1`.

pub mod chain;
pub mod epsilon;
pub mod finite;
pub mod linalg;
pub mod nonseparable;
pub mod seesaw;

use serde::{Deserialize, Serialize};

use crate::hilbert::Label;

pub use chain::{chain_decode, chain_encode, ChainState};
pub use epsilon::{grid_strategy, play_epsilon, EpsilonStrategy, GridStrategy, MetricDescriptor, MetricKind};
pub use finite::{orthogonal_encoding, play_finite, random_strategy, FiniteStrategy, MixedStrategy};
pub use nonseparable::{play_nonseparable, SpanProjection};
pub use seesaw::{optimize_finite, SeesawConfig, SeesawTrace};

/// Slack allowed on `g ≤ 1`, `Σ g ≤ n` and `G ≤ n/|X|`.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    NonSeparable,
    Finite,
    Mixed,
    Grid,
    Chain,
}

/// Per-input guessing probabilities and their average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub kind: StrategyKind,
    /// Hilbert-space dimension, `None` for `ℓ²(X)`.
    pub dim: Option<usize>,
    pub inputs: Vec<String>,
    pub g: Vec<f64>,
    /// Uniform average of `g`.
    pub mean: f64,
    pub epsilon: Option<Label>,
    pub metric: Option<MetricKind>,
    /// Largest `Pr(y = x' | ψ_x)` over `x' ≠ x`, when computed.
    pub max_cross: Option<f64>,
}

impl GameReport {
    pub fn new(kind: StrategyKind, dim: Option<usize>, inputs: Vec<String>, g: Vec<f64>) -> Self {
        let mean = if g.is_empty() {
            0.0
        } else {
            g.iter().sum::<f64>() / g.len() as f64
        };
        GameReport {
            kind,
            dim,
            inputs,
            g,
            mean,
            epsilon: None,
            metric: None,
            max_cross: None,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.g.len()
    }

    /// `Σ_x g(x)`.
    pub fn guessing_mass(&self) -> f64 {
        self.g.iter().sum()
    }

    /// `n/|X|` for finite-dimensional strategies.
    pub fn dimension_bound(&self) -> Option<f64> {
        self.dim.map(|n| (n as f64 / self.num_inputs() as f64).min(1.0))
    }

    /// `G ≤ n/|X|` and `Σ g ≤ n`, within [`BOUND_TOLERANCE`]. Relaxed
    /// (`ε`) games are not constrained by the dimension and always pass.
    pub fn respects_dimension_bound(&self) -> bool {
        if self.epsilon.is_some() {
            return true;
        }
        match self.dim {
            Some(n) => {
                self.guessing_mass() <= n as f64 + BOUND_TOLERANCE
                    && self.mean <= self.dimension_bound().unwrap_or(1.0) + BOUND_TOLERANCE
            }
            None => true,
        }
    }
}
