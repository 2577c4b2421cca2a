//! EPR eigenvalue conditions on two-party CCR representations.
//!
//! A vector `ψ` is an EPR state with values `(x, p)` when
//!
//! ```text
//! (i)  W_A(a,0) ⊗ W_B(a,0)  ψ = e^{iax} ψ   for all a
//! (ii) W_A(0,b) ⊗ W_B(0,−b) ψ = e^{ibp} ψ   for all b
//! ```
//!
//! In a tensor-product representation whose Alice factor is Halvorson-type,
//! [`find_epr_violation`] produces `(a, b)` at which the combined condition
//! fails with residual exactly 2. [`make_gns_sum_difference_state`] builds the
//! representation along the sum/difference degrees of freedom, where both
//! conditions hold but Alice's operators no longer act on one factor only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hilbert::{characteristic_state, tensor_product, BiKet, Label};
use crate::weyl::{cis, first_integer_outside, AffinePhase, HalvorsonRep, Rotation, WeylParams};
use crate::{Error, Result};

/// Normalization tolerance for residual evaluation.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Target eigenvalues: `x` for the position sum, `p` for the momentum difference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EprTarget {
    pub x: Label,
    pub p: Label,
}

impl EprTarget {
    pub fn new(x: Label, p: Label) -> Self {
        EprTarget { x, p }
    }

    pub fn origin() -> Self {
        EprTarget::new(Label::zero(), Label::zero())
    }
}

/// A representation of two commuting copies of the CCRs on `ℓ²(ℝ) ⊗ ℓ²(ℝ)`.
pub trait TwoPartyRep {
    /// `W_A(alice) · W_B(bob)` applied to `psi`.
    fn apply_pair(&self, alice: &WeylParams, bob: &WeylParams, psi: &BiKet) -> BiKet;

    /// Whether Alice's operators act on the left factor only and Bob's on
    /// the right factor only.
    fn is_bipartite(&self) -> bool;
}

/// `H_A ⊗ H_B` with each party's operators acting on its own factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteRep {
    pub alice: HalvorsonRep,
    pub bob: HalvorsonRep,
}

impl BipartiteRep {
    pub fn new(alice: HalvorsonRep, bob: HalvorsonRep) -> Self {
        BipartiteRep { alice, bob }
    }

    pub fn position_pair() -> Self {
        BipartiteRep::new(HalvorsonRep::position(), HalvorsonRep::position())
    }
}

impl TwoPartyRep for BipartiteRep {
    fn apply_pair(&self, alice: &WeylParams, bob: &WeylParams, psi: &BiKet) -> BiKet {
        psi.map_keys(|(l, r)| {
            let (l2, pa) = self.alice.act(alice, l);
            let (r2, pb) = self.bob.act(bob, r);
            ((l2, r2), pa * pb)
        })
    }

    fn is_bipartite(&self) -> bool {
        true
    }
}

pub fn apply_bipartite(rep: &BipartiteRep, alice: &WeylParams, bob: &WeylParams, psi: &BiKet) -> BiKet {
    rep.apply_pair(alice, bob, psi)
}

fn check_normalized(psi: &BiKet) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `(W_A(a,0) ⊗ W_B(a,0)) (W_A(0,b) ⊗ W_B(0,−b)) ψ`.
pub fn apply_epr_operator<R: TwoPartyRep>(rep: &R, a: &Label, b: &Label, psi: &BiKet) -> BiKet {
    let shifted = rep.apply_pair(&WeylParams::momentum(b.clone()), &WeylParams::momentum(-b), psi);
    rep.apply_pair(
        &WeylParams::position(a.clone()),
        &WeylParams::position(a.clone()),
        &shifted,
    )
}

fn residual(moved: &BiKet, psi: &BiKet, phase: Complex64) -> f64 {
    (moved - &psi.scale(phase)).norm_sqr()
}

/// `‖(W_A(a,0) ⊗ W_B(a,0)) ψ − e^{iax} ψ‖²`.
pub fn condition_i_residual<R: TwoPartyRep>(
    rep: &R,
    target: &EprTarget,
    a: &Label,
    psi: &BiKet,
) -> Result<f64> {
    check_normalized(psi)?;
    let p = WeylParams::position(a.clone());
    Ok(residual(&rep.apply_pair(&p, &p, psi), psi, cis(&(a * &target.x))))
}

/// `‖(W_A(0,b) ⊗ W_B(0,−b)) ψ − e^{ibp} ψ‖²`.
pub fn condition_ii_residual<R: TwoPartyRep>(
    rep: &R,
    target: &EprTarget,
    b: &Label,
    psi: &BiKet,
) -> Result<f64> {
    check_normalized(psi)?;
    let moved = rep.apply_pair(&WeylParams::momentum(b.clone()), &WeylParams::momentum(-b), psi);
    Ok(residual(&moved, psi, cis(&(b * &target.p))))
}

/// Squared residual of the combined condition at `(a, b)`, with target phase
/// `e^{iax} e^{ibp}`. Zero for every `(a, b)` iff `ψ` satisfies it.
pub fn epr_condition_residual<R: TwoPartyRep>(
    rep: &R,
    target: &EprTarget,
    a: &Label,
    b: &Label,
    psi: &BiKet,
) -> Result<f64> {
    check_normalized(psi)?;
    let moved = apply_epr_operator(rep, a, b, psi);
    let phase = cis(&(a * &target.x)) * cis(&(b * &target.p));
    Ok(residual(&moved, psi, phase))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EprWitness {
    pub a: Label,
    pub b: Label,
    /// Alice-frame shift `r` of the chosen parameters.
    pub shift: Label,
    pub residual_sq: f64,
}

/// Falsifies the combined EPR condition for `psi`.
///
/// With `K_A` the Alice-side support and `D = {φ(ν) − φ(λ) : ν, λ ∈ K_A}`,
/// picks the smallest positive integer `r ∉ D` and sets
/// `(a, b) = r·(−sin θ_A, cos θ_A)`. Alice's factor of the EPR operator is
/// then a pure shift by `r` in her eigenbasis, so every Alice key leaves
/// `K_A`, `⟨ψ, Uψ⟩ = 0` and the residual is 2 for any target. Bob's basis is
/// never inspected.
pub fn find_epr_violation(rep: &BipartiteRep, _target: &EprTarget, psi: &BiKet) -> Result<EprWitness> {
    if psi.is_empty() {
        return Err(Error::EmptyState);
    }
    check_normalized(psi)?;
    let k_a = psi.left_support();
    let differences = rep.alice.difference_set(k_a.iter());
    let shift = first_integer_outside(&differences);
    let params = rep.alice.shift_direction().scaled(&shift);
    Ok(EprWitness {
        a: params.a,
        b: params.b,
        shift,
        residual_sq: 2.0,
    })
}

/// The representation along `(q_A + q_B, (p_A + p_B)/2)` and
/// `(q_A − q_B, (p_A − p_B)/2)`.
///
/// `W_A(a₁,a₂) ⊗ W_B(b₁,b₂)` acts as `W_sum((a₁+b₁)/2, a₂+b₂) ⊗
/// W_diff((a₁−b₁)/2, a₂−b₂)`, a symplectic change of variables, so each
/// party still satisfies the CCRs and the parties commute. The sum factor
/// diagonalizes the position sum, the difference factor the momentum
/// difference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumDifferenceRep {
    pub sum: HalvorsonRep,
    pub difference: HalvorsonRep,
}

impl Default for SumDifferenceRep {
    fn default() -> Self {
        // φ(d) = d/2 so that W_diff(0, 2b) χ_p = e^{ibp} χ_p.
        let half = AffinePhase::new(Label::ratio(1, 2), Label::zero()).expect("nonzero slope");
        SumDifferenceRep {
            sum: HalvorsonRep::position(),
            difference: HalvorsonRep::new(Rotation::quarter_turns(1), half),
        }
    }
}

impl SumDifferenceRep {
    fn split(alice: &WeylParams, bob: &WeylParams) -> (WeylParams, WeylParams) {
        let two = Label::integer(2);
        (
            WeylParams::new((&alice.a + &bob.a) / &two, &alice.b + &bob.b),
            WeylParams::new((&alice.a - &bob.a) / &two, &alice.b - &bob.b),
        )
    }
}

impl TwoPartyRep for SumDifferenceRep {
    fn apply_pair(&self, alice: &WeylParams, bob: &WeylParams, psi: &BiKet) -> BiKet {
        let (s, d) = Self::split(alice, bob);
        psi.map_keys(|(l, r)| {
            let (l2, ps) = self.sum.act(&s, l);
            let (r2, pd) = self.difference.act(&d, r);
            ((l2, r2), ps * pd)
        })
    }

    fn is_bipartite(&self) -> bool {
        false
    }
}

/// `χ_x ⊗ χ_p` in the sum/difference representation: an exact EPR state
/// with values `(x, p)`.
pub fn make_gns_sum_difference_state(x: Label, p: Label) -> (BiKet, SumDifferenceRep) {
    (
        tensor_product(&characteristic_state(x), &characteristic_state(p)),
        SumDifferenceRep::default(),
    )
}
