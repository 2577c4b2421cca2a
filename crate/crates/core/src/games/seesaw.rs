//! Seesaw search for the best finite-dimensional strategy.
//!
//! Alternates two steps from random pure states:
//!
//! * states fixed: propose the pretty-good (square-root) measurement,
//!   rescaled into a valid POVM, and keep it if `G` does not drop;
//! * POVM fixed: move each state to the top eigenvector of its effect.
//!
//! Both steps are non-decreasing, so `G` is monotone along the trace. The
//! result is a lower bound on the optimum; `n/|X|` is the matching upper
//! bound.

use rand::Rng;

use super::finite::{play_all, random_state, FiniteStrategy};
use super::linalg::{eigh, CMat, CVec};
use super::GameReport;
use crate::exec::Execution;
use crate::sample::trial_rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawConfig {
    pub iterations: usize,
    /// Stop once an iteration improves `G` by less than this.
    pub tolerance: f64,
    pub restarts: usize,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            iterations: 500,
            tolerance: 1e-10,
            restarts: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeesawTrace {
    pub strategy: FiniteStrategy,
    /// `G` after initialization and after each iteration.
    pub history: Vec<f64>,
}

impl SeesawTrace {
    pub fn final_value(&self) -> f64 {
        *self.history.last().expect("history starts non-empty")
    }

    pub fn is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Square-root measurement for equiprobable pure states, rescaled so the
/// effects sum to at most the identity.
pub fn pretty_good_measurement(states: &[CVec]) -> Vec<CMat> {
    let dim = states[0].len();
    let weight = 1.0 / states.len() as f64;
    let rho = states
        .iter()
        .fold(CMat::zeros(dim), |acc, s| acc.add(&CMat::outer(s).scale(weight)));
    let r = eigh(&rho).map(|x| if x > 1e-14 { 1.0 / x.sqrt() } else { 0.0 });
    let effects: Vec<CMat> = states
        .iter()
        .map(|s| {
            let v = r.apply(s);
            CMat::outer(&v).scale(weight)
        })
        .collect();
    let total = effects.iter().fold(CMat::zeros(dim), |acc, e| acc.add(e));
    let max = eigh(&total).max();
    if max > 1.0 {
        effects.iter().map(|e| e.scale(1.0 / max)).collect()
    } else {
        effects
    }
}

fn mean_guess(states: &[CVec], effects: &[CMat]) -> f64 {
    states
        .iter()
        .zip(effects)
        .map(|(s, e)| e.quad_form(s))
        .sum::<f64>()
        / states.len() as f64
}

/// Runs the seesaw from the given initial states.
pub fn seesaw(initial: Vec<CVec>, config: &SeesawConfig) -> SeesawTrace {
    let mut states = initial;
    let mut effects = pretty_good_measurement(&states);
    let mut value = mean_guess(&states, &effects);
    let mut history = vec![value];

    for _ in 0..config.iterations {
        let previous = value;

        for (s, e) in states.iter_mut().zip(&effects) {
            let candidate = eigh(e).top_vector();
            if e.quad_form(&candidate) > e.quad_form(s) {
                *s = candidate;
            }
        }
        value = mean_guess(&states, &effects);

        let proposal = pretty_good_measurement(&states);
        let proposed = mean_guess(&states, &proposal);
        if proposed >= value {
            effects = proposal;
            value = proposed;
        }

        history.push(value);
        if value - previous < config.tolerance {
            break;
        }
    }

    SeesawTrace {
        strategy: FiniteStrategy {
            dim: states[0].len(),
            states,
            effects,
        },
        history,
    }
}

/// One seesaw run per restart, restart `i` seeded by `(seed, i)`.
pub fn seesaw_restarts(
    dim: usize,
    num_inputs: usize,
    seed: u64,
    config: &SeesawConfig,
    exec: Execution,
) -> Result<Vec<SeesawTrace>> {
    if dim == 0 || num_inputs == 0 {
        return Err(Error::InvalidParameter(
            "dimension and number of inputs must be positive".into(),
        ));
    }
    let restarts = config.restarts.max(1);
    Ok(exec.map(restarts, |i| {
        let mut rng = trial_rng(seed, i as u64);
        let init = random_states(&mut rng, dim, num_inputs);
        seesaw(init, config)
    }))
}

fn random_states<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Vec<CVec> {
    (0..count).map(|_| random_state(rng, dim)).collect()
}

/// Best strategy over all restarts (earliest restart wins ties).
pub fn optimize_finite(
    dim: usize,
    num_inputs: usize,
    seed: u64,
    config: &SeesawConfig,
    exec: Execution,
) -> Result<(FiniteStrategy, GameReport)> {
    let traces = seesaw_restarts(dim, num_inputs, seed, config, exec)?;
    let best = best_trace(traces);
    let report = play_all(&best.strategy)?;
    Ok((best.strategy, report))
}

pub fn best_trace(traces: Vec<SeesawTrace>) -> SeesawTrace {
    traces
        .into_iter()
        .reduce(|best, t| {
            if t.final_value() > best.final_value() {
                t
            } else {
                best
            }
        })
        .expect("at least one restart")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_of_orthonormal_basis_is_projective() {
        let states: Vec<CVec> = (0..3).map(|i| super::super::linalg::basis_vector(3, i)).collect();
        let effects = pretty_good_measurement(&states);
        for (i, e) in effects.iter().enumerate() {
            assert!((e.quad_form(&states[i]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_two_inputs_reaches_one() {
        let (_, report) = optimize_finite(2, 2, 1, &SeesawConfig::default(), Execution::Sequential).unwrap();
        assert!((report.mean - 1.0).abs() < 1e-9, "{}", report.mean);
    }

    #[test]
    fn traces_are_monotone() {
        let config = SeesawConfig {
            restarts: 6,
            ..Default::default()
        };
        for t in seesaw_restarts(3, 7, 2, &config, Execution::Sequential).unwrap() {
            assert!(t.is_monotone(), "{:?}", t.history);
            t.strategy.validate().unwrap();
        }
    }

    #[test]
    fn restarts_are_execution_independent() {
        let config = SeesawConfig {
            restarts: 4,
            ..Default::default()
        };
        let a = seesaw_restarts(2, 3, 17, &config, Execution::Sequential).unwrap();
        let b = seesaw_restarts(2, 3, 17, &config, Execution::Parallel).unwrap();
        let fa: Vec<f64> = a.iter().map(|t| t.final_value()).collect();
        let fb: Vec<f64> = b.iter().map(|t| t.final_value()).collect();
        assert_eq!(fa, fb);
    }

    #[test]
    fn rejects_empty_problem() {
        assert!(optimize_finite(0, 3, 0, &SeesawConfig::default(), Execution::Sequential).is_err());
        assert!(optimize_finite(2, 0, 0, &SeesawConfig::default(), Execution::Sequential).is_err());
    }
}
