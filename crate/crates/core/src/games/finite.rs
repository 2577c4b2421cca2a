//! Finite-dimensional strategies: `n`-dimensional states and one effect per
//! input. The completion effect `1 − Σ E_x` ("no guess") is implicit.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{basis_vector, eigh, normalize, vnorm, CMat, CVec};
use super::{GameReport, StrategyKind};
use crate::sample::amplitude;
use crate::{Error, Result};

/// Lowest eigenvalue allowed for an effect, and slack on `Σ E_x ⪯ 1`.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Slack on `‖ψ_x‖ = 1`.
pub const STATE_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteStrategy {
    pub dim: usize,
    pub states: Vec<CVec>,
    pub effects: Vec<CMat>,
}

fn check_effects(dim: usize, effects: &[CMat]) -> Result<()> {
    let mut total = CMat::zeros(dim);
    for (x, e) in effects.iter().enumerate() {
        if e.dim() != dim {
            return Err(Error::InvalidStrategy(format!(
                "effect {x} is {}x{}, expected {dim}x{dim}",
                e.dim(),
                e.dim()
            )));
        }
        let defect = e.max_hermitian_defect();
        if defect > PSD_TOLERANCE {
            return Err(Error::InvalidStrategy(format!(
                "effect {x} is not Hermitian (defect {defect:e})"
            )));
        }
        let min = eigh(e).min();
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidStrategy(format!(
                "effect {x} is not positive (min eigenvalue {min:e})"
            )));
        }
        total = total.add(e);
    }
    let max = eigh(&total).max();
    if max > 1.0 + PSD_TOLERANCE {
        return Err(Error::InvalidStrategy(format!(
            "effects sum beyond the identity (max eigenvalue {max})"
        )));
    }
    Ok(())
}

impl FiniteStrategy {
    pub fn new(dim: usize, states: Vec<CVec>, effects: Vec<CMat>) -> Result<Self> {
        let s = FiniteStrategy { dim, states, effects };
        s.validate()?;
        Ok(s)
    }

    pub fn num_inputs(&self) -> usize {
        self.states.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidStrategy("dimension must be positive".into()));
        }
        if self.states.is_empty() || self.states.len() != self.effects.len() {
            return Err(Error::InvalidStrategy(format!(
                "{} states but {} effects",
                self.states.len(),
                self.effects.len()
            )));
        }
        for (x, s) in self.states.iter().enumerate() {
            if s.len() != self.dim {
                return Err(Error::InvalidStrategy(format!(
                    "state {x} has length {}, expected {}",
                    s.len(),
                    self.dim
                )));
            }
            let norm = vnorm(s);
            if (norm - 1.0).abs() > STATE_NORM_TOLERANCE {
                return Err(Error::InvalidStrategy(format!("state {x} has norm {norm}")));
            }
        }
        check_effects(self.dim, &self.effects)
    }

    /// `⟨ψ_x, E_y ψ_x⟩`.
    pub fn probability(&self, outcome: usize, input: usize) -> f64 {
        self.effects[outcome].quad_form(&self.states[input])
    }

    /// `g(x) = ⟨ψ_x, E_x ψ_x⟩`.
    pub fn guess_probability(&self, input: usize) -> f64 {
        self.probability(input, input)
    }

    /// `G` without validating the strategy first. Used to expose what an
    /// invalid strategy would claim.
    pub fn mean_guess_unchecked(&self) -> f64 {
        let k = self.num_inputs();
        (0..k).map(|x| self.guess_probability(x)).sum::<f64>() / k as f64
    }

    /// The same effects with every state replaced by a density matrix.
    pub fn to_mixed(&self) -> MixedStrategy {
        MixedStrategy {
            dim: self.dim,
            states: self.states.iter().map(|s| CMat::outer(s)).collect(),
            effects: self.effects.clone(),
        }
    }
}

fn check_inputs(inputs: &[usize], count: usize) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &x in inputs {
        if x >= count {
            return Err(Error::InvalidStrategy(format!(
                "input {x} has no state (strategy has {count})"
            )));
        }
        if !seen.insert(x) {
            return Err(Error::DuplicateInput(crate::Label::integer(x as i64)));
        }
    }
    Ok(())
}

/// `g(x) = ⟨ψ_x, E_x ψ_x⟩` for each requested input index.
pub fn play_finite(strategy: &FiniteStrategy, inputs: &[usize]) -> Result<GameReport> {
    strategy.validate()?;
    check_inputs(inputs, strategy.num_inputs())?;
    let g = inputs.iter().map(|&x| strategy.guess_probability(x)).collect();
    Ok(GameReport::new(
        StrategyKind::Finite,
        Some(strategy.dim),
        inputs.iter().map(|x| x.to_string()).collect(),
        g,
    ))
}

/// Plays every input of the strategy.
pub fn play_all(strategy: &FiniteStrategy) -> Result<GameReport> {
    let inputs: Vec<usize> = (0..strategy.num_inputs()).collect();
    play_finite(strategy, &inputs)
}

/// Density-matrix encoding with the same POVM model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    pub dim: usize,
    pub states: Vec<CMat>,
    pub effects: Vec<CMat>,
}

impl MixedStrategy {
    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() || self.states.len() != self.effects.len() {
            return Err(Error::InvalidStrategy(
                "states and effects differ in count".into(),
            ));
        }
        for (x, rho) in self.states.iter().enumerate() {
            let e = eigh(rho);
            if rho.dim() != self.dim
                || e.min() < -PSD_TOLERANCE
                || (rho.trace().re - 1.0).abs() > STATE_NORM_TOLERANCE * self.dim as f64
            {
                return Err(Error::InvalidStrategy(format!(
                    "state {x} is not a density matrix"
                )));
            }
        }
        check_effects(self.dim, &self.effects)
    }
}

/// `g(x) = tr(E_x ρ_x)`.
pub fn play_mixed(strategy: &MixedStrategy) -> Result<GameReport> {
    strategy.validate()?;
    let g = strategy
        .states
        .iter()
        .zip(&strategy.effects)
        .map(|(rho, e)| e.trace_product(rho))
        .collect();
    Ok(GameReport::new(
        StrategyKind::Mixed,
        Some(strategy.dim),
        (0..strategy.states.len()).map(|x| x.to_string()).collect(),
        g,
    ))
}

/// Inputs `0..n` go to orthogonal basis states measured projectively; the
/// rest reuse `e_0` with a zero effect. Attains `G = min(n, k)/k`.
pub fn orthogonal_encoding(dim: usize, num_inputs: usize) -> FiniteStrategy {
    let states = (0..num_inputs)
        .map(|x| basis_vector(dim, if x < dim { x } else { 0 }))
        .collect();
    let effects = (0..num_inputs)
        .map(|x| {
            if x < dim {
                CMat::outer(&basis_vector(dim, x))
            } else {
                CMat::zeros(dim)
            }
        })
        .collect();
    FiniteStrategy { dim, states, effects }
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> CVec {
    let v: Vec<Complex64> = (0..dim).map(|_| amplitude(rng)).collect();
    normalize(&v).expect("nonzero vector")
}

/// A random valid strategy.
///
/// Effects are `S^{-1/2} A_x S^{-1/2}` for random positive `A_x` with
/// `S = Σ A_x`, then scaled by a factor in `(1/2, 1]`. States are random or,
/// with probability 1/2, the top eigenvector of their own effect, which
/// pushes `G` toward the bound.
pub fn random_strategy<R: Rng>(rng: &mut R, dim: usize, num_inputs: usize) -> FiniteStrategy {
    let positives: Vec<CMat> = (0..num_inputs)
        .map(|_| {
            let rank = rng.gen_range(1..=dim);
            (0..rank).fold(CMat::zeros(dim), |acc, _| {
                let v: Vec<Complex64> = (0..dim).map(|_| amplitude(rng)).collect();
                acc.add(&CMat::outer(&v))
            })
        })
        .collect();
    let total = positives.iter().fold(CMat::zeros(dim), |acc, a| acc.add(a));
    let inv_sqrt = eigh(&total).map(|x| if x > 1e-12 { 1.0 / x.sqrt() } else { 0.0 });
    let shrink = rng.gen_range(0.5..=1.0);
    let effects: Vec<CMat> = positives
        .iter()
        .map(|a| {
            let e = inv_sqrt.matmul(a).matmul(&inv_sqrt).scale(shrink);
            // symmetrize away rounding
            e.add(&e.adjoint()).scale(0.5)
        })
        .collect();
    let states = effects
        .iter()
        .map(|e| {
            if rng.gen_bool(0.5) {
                eigh(e).top_vector()
            } else {
                random_state(rng, dim)
            }
        })
        .collect();
    FiniteStrategy { dim, states, effects }
}
