//! The `ℓ²(X)` strategy: `ψ_x = χ_{x}` and `E(S)` the projection onto
//! `span{χ_x : x ∈ S}`. Every guess is correct with probability exactly one.

use std::collections::BTreeSet;

use super::{GameReport, StrategyKind};
use crate::hilbert::{characteristic_state, Ket, Label};
use crate::{Error, Result};

/// `E(S)` for a finite outcome set `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanProjection {
    outcomes: BTreeSet<Label>,
}

impl SpanProjection {
    pub fn new<I: IntoIterator<Item = Label>>(outcomes: I) -> Self {
        SpanProjection {
            outcomes: outcomes.into_iter().collect(),
        }
    }

    pub fn singleton(x: Label) -> Self {
        SpanProjection::new([x])
    }

    /// Keeps the components of `psi` indexed by `S`.
    pub fn apply(&self, psi: &Ket) -> Ket {
        Ket::from_pairs(
            psi.iter()
                .filter(|(k, _)| self.outcomes.contains(*k))
                .map(|(k, a)| (k.clone(), *a)),
        )
    }

    /// `Pr(y ∈ S | ψ) = ⟨ψ, E(S) ψ⟩`.
    pub fn probability(&self, psi: &Ket) -> f64 {
        psi.inner(&self.apply(psi)).re
    }

    /// Number of basis vectors `χ_x` fixed by the projection.
    pub fn rank(&self) -> usize {
        self.outcomes.len()
    }
}

/// `g(x) = ⟨χ_x, E({x}) χ_x⟩` for every input, plus the largest cross
/// probability `Pr(y = x' | χ_x)`, `x' ≠ x`.
pub fn play_nonseparable(inputs: &[Label]) -> Result<GameReport> {
    let mut seen = BTreeSet::new();
    for x in inputs {
        if !seen.insert(x) {
            return Err(Error::DuplicateInput(x.clone()));
        }
    }
    let states: Vec<Ket> = inputs.iter().cloned().map(characteristic_state).collect();
    let projections: Vec<SpanProjection> = inputs.iter().cloned().map(SpanProjection::singleton).collect();
    let g = states
        .iter()
        .zip(&projections)
        .map(|(s, e)| e.probability(s))
        .collect();
    let mut max_cross = 0.0f64;
    for (i, s) in states.iter().enumerate() {
        for (j, e) in projections.iter().enumerate() {
            if i != j {
                max_cross = max_cross.max(e.probability(s));
            }
        }
    }
    let mut report = GameReport::new(
        StrategyKind::NonSeparable,
        None,
        inputs.iter().map(|x| x.to_string()).collect(),
        g,
    );
    report.max_cross = Some(max_cross);
    Ok(report)
}
