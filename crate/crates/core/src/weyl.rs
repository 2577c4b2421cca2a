//! Halvorson-type representations of the Weyl CCRs on `ℓ²(ℝ)`.
//!
//! Convention, for the unrotated representation with phase function `φ`:
//!
//! ```text
//! W(a,0) χ_λ = e^{i a φ(λ)} χ_λ
//! W(0,b) χ_λ = χ_μ            where φ(μ) = φ(λ) + b
//! W(a,b)     = e^{-iab/2} W(a,0) W(0,b)
//! ```
//!
//! so that `W(a,b) χ_λ = e^{iab/2} e^{iaφ(λ)} χ_μ` and
//! `W(a₁,a₂) W(b₁,b₂) = e^{i(a₁b₂ − a₂b₁)/2} W(a₁+b₁, a₂+b₂)`.
//!
//! A representation rotated by `θ` acts with `W_θ(a,b) := W(R(−θ)(a,b))`.
//! Rotations are symplectic, so the CCRs survive, and `W_θ(cos θ, sin θ)` is
//! the diagonal direction. Only rotations with rational cosine and sine are
//! representable, which keeps every key exact.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hilbert::{Ket, Label};
use crate::{Error, Result};

/// Phase-space displacement `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylParams {
    pub a: Label,
    pub b: Label,
}

impl WeylParams {
    pub fn new(a: Label, b: Label) -> Self {
        WeylParams { a, b }
    }

    pub fn zero() -> Self {
        WeylParams::new(Label::zero(), Label::zero())
    }

    /// Shorthand for integer displacements.
    pub fn ints(a: i64, b: i64) -> Self {
        WeylParams::new(Label::integer(a), Label::integer(b))
    }

    pub fn position(a: Label) -> Self {
        WeylParams::new(a, Label::zero())
    }

    pub fn momentum(b: Label) -> Self {
        WeylParams::new(Label::zero(), b)
    }

    pub fn scaled(&self, r: &Label) -> Self {
        WeylParams::new(&self.a * r, &self.b * r)
    }

    pub fn neg(&self) -> Self {
        WeylParams::new(-&self.a, -&self.b)
    }

    /// `a₁b₂ − a₂b₁`.
    pub fn symplectic(&self, other: &WeylParams) -> Label {
        &self.a * &other.b - &self.b * &other.a
    }
}

impl std::ops::Add for &WeylParams {
    type Output = WeylParams;
    fn add(self, rhs: &WeylParams) -> WeylParams {
        WeylParams::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

/// `e^{i·arg}` for an exact argument.
pub fn cis(arg: &Label) -> Complex64 {
    Complex64::from_polar(1.0, arg.to_f64())
}

/// An exact rotation `(cos θ, sin θ)` with `cos² + sin² = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rotation {
    cos: Label,
    sin: Label,
}

impl Rotation {
    pub fn new(cos: Label, sin: Label) -> Result<Self> {
        if &cos * &cos + &sin * &sin != Label::one() {
            return Err(Error::NotOnUnitCircle {
                cos: Box::new(cos),
                sin: Box::new(sin),
            });
        }
        Ok(Rotation { cos, sin })
    }

    pub fn identity() -> Self {
        Rotation {
            cos: Label::one(),
            sin: Label::zero(),
        }
    }

    /// `θ = k·π/2`.
    pub fn quarter_turns(k: u32) -> Self {
        let (c, s) = match k % 4 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        };
        Rotation {
            cos: Label::integer(c),
            sin: Label::integer(s),
        }
    }

    /// `cos θ = x/h`, `sin θ = y/h` for a Pythagorean triple `x² + y² = h²`.
    pub fn pythagorean(x: i64, y: i64, h: i64) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParameter("hypotenuse must be nonzero".into()));
        }
        Rotation::new(Label::ratio(x, h), Label::ratio(y, h))
    }

    pub fn cos(&self) -> &Label {
        &self.cos
    }

    pub fn sin(&self) -> &Label {
        &self.sin
    }

    /// The angle in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        let t = self.sin.to_f64().atan2(self.cos.to_f64());
        if t < 0.0 {
            t + std::f64::consts::TAU
        } else {
            t
        }
    }

    /// `R(−θ)·(a,b)`: coordinates of `p` in the rotated frame.
    pub fn to_frame(&self, p: &WeylParams) -> WeylParams {
        WeylParams::new(
            &self.cos * &p.a + &self.sin * &p.b,
            &self.cos * &p.b - &self.sin * &p.a,
        )
    }

    /// `R(θ)·(a,b)`, inverse of [`Rotation::to_frame`].
    pub fn from_frame(&self, p: &WeylParams) -> WeylParams {
        WeylParams::new(
            &self.cos * &p.a - &self.sin * &p.b,
            &self.sin * &p.a + &self.cos * &p.b,
        )
    }
}

impl std::str::FromStr for Rotation {
    type Err = Error;

    /// `0`, `pi/2`, `pi`, `3pi/2`, or an exact pair `cos,sin` such as `3/5,4/5`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match t.as_str() {
            "0" => return Ok(Rotation::quarter_turns(0)),
            "pi/2" => return Ok(Rotation::quarter_turns(1)),
            "pi" => return Ok(Rotation::quarter_turns(2)),
            "3pi/2" => return Ok(Rotation::quarter_turns(3)),
            _ => {}
        }
        let bad = || Error::InvalidParameter(format!("unrecognized rotation {s:?}"));
        let (c, sn) = t.split_once(',').ok_or_else(bad)?;
        Rotation::new(c.parse().map_err(|_| bad())?, sn.parse().map_err(|_| bad())?)
    }
}

/// `φ(λ) = slope·λ + offset` with nonzero slope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePhase {
    slope: Label,
    offset: Label,
}

impl AffinePhase {
    pub fn new(slope: Label, offset: Label) -> Result<Self> {
        if slope.is_zero() {
            return Err(Error::DegeneratePhase);
        }
        Ok(AffinePhase { slope, offset })
    }

    pub fn identity() -> Self {
        AffinePhase {
            slope: Label::one(),
            offset: Label::zero(),
        }
    }

    pub fn eval(&self, lambda: &Label) -> Label {
        &self.slope * lambda + &self.offset
    }

    /// Label displacement `Δ` such that `φ(λ + Δ) = φ(λ) + shift`.
    pub fn label_shift(&self, shift: &Label) -> Label {
        shift / &self.slope
    }
}

/// A representation in which `W(cos θ, sin θ)` has the orthonormal eigenbasis
/// `{χ_λ}` with eigenphases `e^{i r φ(λ)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalvorsonRep {
    rotation: Rotation,
    phase: AffinePhase,
}

impl Default for HalvorsonRep {
    fn default() -> Self {
        HalvorsonRep::position()
    }
}

impl HalvorsonRep {
    pub fn new(rotation: Rotation, phase: AffinePhase) -> Self {
        HalvorsonRep { rotation, phase }
    }

    /// Position eigenstates exist, `θ = 0`.
    pub fn position() -> Self {
        HalvorsonRep::new(Rotation::identity(), AffinePhase::identity())
    }

    /// Momentum eigenstates exist, `θ = π/2`.
    pub fn momentum() -> Self {
        HalvorsonRep::new(Rotation::quarter_turns(1), AffinePhase::identity())
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rotation
    }

    pub fn phase(&self) -> &AffinePhase {
        &self.phase
    }

    pub fn theta(&self) -> f64 {
        self.rotation.angle()
    }

    /// `(cos θ, sin θ)`, the direction whose Weyl operators are diagonal.
    pub fn diagonal_direction(&self) -> WeylParams {
        WeylParams::new(self.rotation.cos.clone(), self.rotation.sin.clone())
    }

    /// `(−sin θ, cos θ)`, the direction whose Weyl operators are pure shifts.
    pub fn shift_direction(&self) -> WeylParams {
        WeylParams::new(-&self.rotation.sin, self.rotation.cos.clone())
    }

    /// `W(p) χ_λ = phase · χ_μ`; returns `(μ, phase)`.
    pub fn act(&self, p: &WeylParams, lambda: &Label) -> (Label, Complex64) {
        let q = self.rotation.to_frame(p);
        let mu = lambda + self.phase.label_shift(&q.b);
        let arg = &q.a * &q.b / Label::integer(2) + &q.a * self.phase.eval(lambda);
        (mu, cis(&arg))
    }

    pub fn apply(&self, p: &WeylParams, psi: &Ket) -> Ket {
        psi.map_keys(|lambda| self.act(p, lambda))
    }

    /// `{φ(μ) − φ(λ) : μ, λ ∈ keys}`.
    pub fn difference_set<'a, I>(&self, keys: I) -> BTreeSet<Label>
    where
        I: IntoIterator<Item = &'a Label>,
    {
        let phis: Vec<Label> = keys.into_iter().map(|k| self.phase.eval(k)).collect();
        let mut out = BTreeSet::new();
        for m in &phis {
            for l in &phis {
                out.insert(m - l);
            }
        }
        out
    }
}

/// The smallest positive integer outside `set`.
pub fn first_integer_outside(set: &BTreeSet<Label>) -> Label {
    let mut r = 1i64;
    loop {
        let candidate = Label::integer(r);
        if !set.contains(&candidate) {
            return candidate;
        }
        r += 1;
    }
}

pub fn apply_weyl(rep: &HalvorsonRep, p: &WeylParams, psi: &Ket) -> Ket {
    rep.apply(p, psi)
}

/// A representation whose `W(cos θ, sin θ)` is diagonal.
pub fn rotated_rep(rotation: Rotation) -> HalvorsonRep {
    HalvorsonRep::new(rotation, AffinePhase::identity())
}

/// `⟨χ_μ, W(0,b) χ_λ⟩`. Nonzero exactly when `W(0,b)` carries `λ` onto `μ`.
pub fn eigenbasis_overlap(rep: &HalvorsonRep, b: &Label, mu: &Label, lambda: &Label) -> Complex64 {
    let (image, phase) = rep.act(&WeylParams::momentum(b.clone()), lambda);
    if &image == mu {
        phase
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Parameters that rule out `psi` being an eigenvector of the shift-direction
/// Weyl operators.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumWitness {
    /// Displacement `r` along [`HalvorsonRep::shift_direction`].
    pub b: Label,
    /// The full Weyl parameters `r·(−sin θ, cos θ)`.
    pub params: WeylParams,
    /// `‖W ψ − e^{iγ} ψ‖²` for every `γ`.
    pub residual_sq_lower_bound: f64,
}

/// Finds `r` outside the difference set of `φ` over `supp ψ`. Then
/// `W(r·(−sin θ, cos θ)) ψ` has support disjoint from `ψ`, the overlap is
/// exactly zero and `ψ` cannot be an eigenvector.
pub fn find_momentum_eigenvector_violation(rep: &HalvorsonRep, psi: &Ket) -> Result<MomentumWitness> {
    if psi.is_empty() {
        return Err(Error::EmptyState);
    }
    let differences = rep.difference_set(psi.support());
    let b = first_integer_outside(&differences);
    let params = rep.shift_direction().scaled(&b);
    Ok(MomentumWitness {
        b,
        params,
        residual_sq_lower_bound: 2.0 * psi.norm_sqr(),
    })
}

/// `‖W(p) ψ − e^{iγ} ψ‖²` evaluated directly.
pub fn eigen_residual_sq(rep: &HalvorsonRep, p: &WeylParams, psi: &Ket, gamma: f64) -> f64 {
    let moved = rep.apply(p, psi);
    let target = psi.scale(Complex64::from_polar(1.0, gamma));
    (&moved - &target).norm_sqr()
}
