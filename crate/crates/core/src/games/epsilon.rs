//! The relaxed game `g_ε(x) = Pr(y ∈ B_ε(x) | ψ_x)` with
//! `B_ε(x) = {x' : d(x, x') < ε}`.
//!
//! On a bounded interval with the usual metric finitely many orthogonal
//! states already give `g_ε ≡ 1`. Under the discrete metric with `ε ≤ 1`
//! every ball is a singleton and the game is the sharp one.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::chain::{chain_decode, chain_encode, ChainState};
use super::finite::FiniteStrategy;
use super::linalg::{basis_vector, CMat};
use super::{GameReport, StrategyKind};
use crate::hilbert::Label;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Standard,
    Discrete,
    Dyadic,
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(MetricKind::Standard),
            "discrete" => Ok(MetricKind::Discrete),
            "dyadic" => Ok(MetricKind::Dyadic),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MetricKind::Standard => "standard",
            MetricKind::Discrete => "discrete",
            MetricKind::Dyadic => "dyadic",
        })
    }
}

/// A metric on the rationals, evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricDescriptor {
    /// `|x − y|` on `[lo, hi]`.
    Standard { lo: Label, hi: Label },
    /// `0` on the diagonal, `1` elsewhere.
    Discrete,
    /// `2^{-k}` with `k` the first binary digit where `x` and `y` differ
    /// (`k = 0` for different integer parts). An ultrametric.
    Dyadic,
}

impl MetricDescriptor {
    pub fn unit_interval() -> Self {
        MetricDescriptor::Standard {
            lo: Label::zero(),
            hi: Label::one(),
        }
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            MetricDescriptor::Standard { .. } => MetricKind::Standard,
            MetricDescriptor::Discrete => MetricKind::Discrete,
            MetricDescriptor::Dyadic => MetricKind::Dyadic,
        }
    }

    pub fn distance(&self, x: &Label, y: &Label) -> Label {
        match self {
            MetricDescriptor::Standard { .. } => (x - y).abs(),
            MetricDescriptor::Discrete => {
                if x == y {
                    Label::zero()
                } else {
                    Label::one()
                }
            }
            MetricDescriptor::Dyadic => match first_differing_digit(x, y) {
                None => Label::zero(),
                Some(k) => Label::dyadic(k),
            },
        }
    }

    pub fn in_ball(&self, center: &Label, point: &Label, epsilon: &Label) -> bool {
        &self.distance(center, point) < epsilon
    }
}

/// Position of the first differing binary digit of `x` and `y`: 0 when the
/// integer parts differ, `k ≥ 1` for the `k`-th fractional digit.
fn first_differing_digit(x: &Label, y: &Label) -> Option<u32> {
    if x == y {
        return None;
    }
    if x.floor() != y.floor() {
        return Some(0);
    }
    let fx = x - x.floor();
    let fy = y - y.floor();
    let (dx, dy) = (fx.denom().clone(), fy.denom().clone());
    let (mut rx, mut ry) = (fx.numer().clone(), fy.numer().clone());
    let mut k = 0u32;
    loop {
        k += 1;
        rx <<= 1u32;
        ry <<= 1u32;
        let bx = rx >= dx;
        let by = ry >= dy;
        if bx != by {
            return Some(k);
        }
        if bx {
            rx -= &dx;
            ry -= &dy;
        }
    }
}

/// Cell encoding of a bounded interval.
///
/// `cells = ⌊(hi − lo)/ε⌋ + 1`, so every cell is narrower than `ε` and any two
/// points of a cell, in particular a point and its cell's midpoint, are
/// closer than `ε`. Cells are half-open `[lo + kw, lo + (k+1)w)` except the
/// last, which also contains `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridStrategy {
    pub lo: Label,
    pub hi: Label,
    pub width: Label,
    pub midpoints: Vec<Label>,
    pub strategy: FiniteStrategy,
}

impl GridStrategy {
    pub fn cells(&self) -> usize {
        self.midpoints.len()
    }

    pub fn cell_of(&self, x: &Label) -> Result<usize> {
        if x < &self.lo || x > &self.hi {
            return Err(Error::OutOfRange {
                value: x.to_string(),
                range: format!("[{}, {}]", self.lo, self.hi),
            });
        }
        let k = ((x - &self.lo) / &self.width).floor();
        let k: usize = k.numer().try_into().expect("cell index fits");
        Ok(k.min(self.cells() - 1))
    }
}

pub fn grid_strategy(lo: Label, hi: Label, epsilon: &Label) -> Result<GridStrategy> {
    if lo >= hi {
        return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
    }
    if epsilon <= &Label::zero() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let length = &hi - &lo;
    let cells_label = (&length / epsilon).floor() + Label::one();
    let cells: usize = cells_label
        .numer()
        .try_into()
        .map_err(|_| Error::InvalidParameter("too many cells".into()))?;
    let width = &length / &cells_label;
    let half = Label::ratio(1, 2);
    let midpoints = (0..cells)
        .map(|k| &lo + &width * (Label::integer(k as i64) + &half))
        .collect();
    let strategy = FiniteStrategy {
        dim: cells,
        states: (0..cells).map(|k| basis_vector(cells, k)).collect(),
        effects: (0..cells).map(|k| CMat::outer(&basis_vector(cells, k))).collect(),
    };
    Ok(GridStrategy {
        lo,
        hi,
        width,
        midpoints,
        strategy,
    })
}

/// Who plays the relaxed game.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonStrategy {
    /// Interval cells, guess = cell midpoint.
    Grid(GridStrategy),
    /// Input `outcomes[i]` is sent as state `i`; outcome `k` guesses `outcomes[k]`.
    Finite {
        strategy: FiniteStrategy,
        outcomes: Vec<Label>,
    },
    /// `x ∈ [0,1)` sent as its first `sites` binary digits, measured in the
    /// computational basis and decoded to a dyadic rational.
    Chain { sites: usize },
}

pub fn play_epsilon(
    metric: &MetricDescriptor,
    strategy: &EpsilonStrategy,
    epsilon: &Label,
    inputs: &[Label],
) -> Result<GameReport> {
    if epsilon <= &Label::zero() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let mut seen = BTreeSet::new();
    for x in inputs {
        if !seen.insert(x) {
            return Err(Error::DuplicateInput(x.clone()));
        }
    }

    let (kind, dim, g) = match strategy {
        EpsilonStrategy::Grid(grid) => {
            grid.strategy.validate()?;
            let mut g = Vec::with_capacity(inputs.len());
            for x in inputs {
                let cell = grid.cell_of(x)?;
                let mut p = 0.0;
                for (k, mid) in grid.midpoints.iter().enumerate() {
                    if metric.in_ball(x, mid, epsilon) {
                        p += grid.strategy.probability(k, cell);
                    }
                }
                g.push(p);
            }
            (StrategyKind::Grid, Some(grid.cells()), g)
        }
        EpsilonStrategy::Finite { strategy, outcomes } => {
            strategy.validate()?;
            if outcomes.len() != strategy.num_inputs() {
                return Err(Error::InvalidStrategy(format!(
                    "{} outcome labels for {} inputs",
                    outcomes.len(),
                    strategy.num_inputs()
                )));
            }
            let mut g = Vec::with_capacity(inputs.len());
            for x in inputs {
                let i = outcomes
                    .iter()
                    .position(|o| o == x)
                    .ok_or_else(|| Error::InvalidParameter(format!("input {x} is not an outcome label")))?;
                let mut p = 0.0;
                for (k, y) in outcomes.iter().enumerate() {
                    if metric.in_ball(x, y, epsilon) {
                        p += strategy.probability(k, i);
                    }
                }
                g.push(p);
            }
            (StrategyKind::Finite, Some(strategy.dim), g)
        }
        EpsilonStrategy::Chain { sites } => {
            let mut g = Vec::with_capacity(inputs.len());
            for x in inputs {
                let psi = chain_encode(x, *sites)?.to_ket();
                let mut p = 0.0;
                for (key, amp) in psi.iter() {
                    debug_assert_eq!(key.denom(), &BigInt::one());
                    let guess = chain_decode(&ChainState::from_index(key.numer(), *sites));
                    if metric.in_ball(x, &guess, epsilon) {
                        p += amp.norm_sqr();
                    }
                }
                g.push(p);
            }
            (StrategyKind::Chain, None, g)
        }
    };

    let mut report = GameReport::new(kind, dim, inputs.iter().map(|x| x.to_string()).collect(), g);
    report.epsilon = Some(epsilon.clone());
    report.metric = Some(metric.kind());
    Ok(report)
}
