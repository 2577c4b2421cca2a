//! Exact labels and finitely supported vectors in `ℓ²(X)`.
//!
//! Keys are exact rationals so that support membership, disjointness and
//! translation are decided without rounding. Amplitudes are `Complex64`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational index standing in for a real number.
///
/// Always kept in lowest terms with a positive denominator, so equality and
/// hashing are structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(BigRational);

impl Label {
    /// `numer / denom`. Panics if `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Label(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(value: i64) -> Self {
        Label(BigRational::from_integer(value.into()))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Self {
        Label(BigRational::new(numer, denom))
    }

    pub fn zero() -> Self {
        Label(BigRational::zero())
    }

    pub fn one() -> Self {
        Label(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Label(self.0.abs())
    }

    pub fn floor(&self) -> Self {
        Label(self.0.floor())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    /// Nearest `f64`. Only used to evaluate phases and report distances.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `2^-k` for `k ≥ 0`.
    pub fn dyadic(k: u32) -> Self {
        Label(BigRational::new(BigInt::one(), BigInt::one() << k))
    }
}

impl From<BigRational> for Label {
    fn from(value: BigRational) -> Self {
        Label(value)
    }
}

impl From<i64> for Label {
    fn from(value: i64) -> Self {
        Label::integer(value)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as an exact rational")]
pub struct ParseLabelError(String);

impl FromStr for Label {
    type Err = ParseLabelError;

    /// Accepts `p`, `p/q` and finite decimals such as `-0.125`, all exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseLabelError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Label(BigRational::new(n, d)));
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let digits: BigInt = format!("{int_digits}{frac}").parse().map_err(|_| err())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let value = BigRational::new(digits, scale);
            return Ok(Label(if negative { -value } else { value }));
        }
        let n: BigInt = t.parse().map_err(|_| err())?;
        Ok(Label(BigRational::from_integer(n)))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! label_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Label> for &Label {
            type Output = Label;
            fn $method(self, rhs: &Label) -> Label {
                Label((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Label> for Label {
            type Output = Label;
            fn $method(self, rhs: Label) -> Label {
                Label(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Label> for Label {
            type Output = Label;
            fn $method(self, rhs: &Label) -> Label {
                Label(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Label> for &Label {
            type Output = Label;
            fn $method(self, rhs: Label) -> Label {
                Label((&self.0).$method(rhs.0))
            }
        }
    };
}

label_binop!(Add, add);
label_binop!(Sub, sub);
label_binop!(Mul, mul);
label_binop!(Div, div);

impl Neg for Label {
    type Output = Label;
    fn neg(self) -> Label {
        Label(-self.0)
    }
}

impl Neg for &Label {
    type Output = Label;
    fn neg(self) -> Label {
        Label(-&self.0)
    }
}

/// A finitely supported complex vector keyed by `K`.
///
/// Exact-zero amplitudes are never stored, so the key set is the support.
#[derive(Clone, PartialEq, Default)]
pub struct SparseVector<K: Ord> {
    amplitudes: BTreeMap<K, Complex64>,
}

/// A vector in `ℓ²(ℝ)`.
pub type Ket = SparseVector<Label>;

/// A vector in `ℓ²(ℝ) ⊗ ℓ²(ℝ)`, keyed by (Alice index, Bob index).
pub type BiKet = SparseVector<(Label, Label)>;

impl<K: Ord + Clone> SparseVector<K> {
    pub fn new() -> Self {
        SparseVector {
            amplitudes: BTreeMap::new(),
        }
    }

    /// Builds a vector from `(key, amplitude)` pairs; repeated keys accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (K, Complex64)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (k, a) in pairs {
            v.add_amplitude(k, a);
        }
        v
    }

    pub fn basis(key: K) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(key, Complex64::new(1.0, 0.0));
        SparseVector { amplitudes }
    }

    pub fn add_amplitude(&mut self, key: K, amplitude: Complex64) {
        let slot = self.amplitudes.entry(key.clone()).or_insert(Complex64::zero());
        *slot += amplitude;
        if slot.is_zero() {
            self.amplitudes.remove(&key);
        }
    }

    pub fn amplitude(&self, key: &K) -> Complex64 {
        self.amplitudes.get(key).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn contains(&self, key: &K) -> bool {
        self.amplitudes.contains_key(key)
    }

    pub fn support(&self) -> impl Iterator<Item = &K> + '_ {
        self.amplitudes.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Complex64)> + '_ {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().fold(0.0, |acc, a| acc + a.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`. Sums over the common support.
    pub fn inner(&self, other: &Self) -> Complex64 {
        if self.len() <= other.len() {
            self.amplitudes
                .iter()
                .filter_map(|(k, a)| other.amplitudes.get(k).map(|b| a.conj() * b))
                .sum()
        } else {
            other
                .amplitudes
                .iter()
                .filter_map(|(k, b)| self.amplitudes.get(k).map(|a| a.conj() * b))
                .sum()
        }
    }

    /// True when the supports share no key; then `inner` is exactly zero.
    pub fn is_disjoint(&self, other: &Self) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.amplitudes.keys().all(|k| !large.amplitudes.contains_key(k))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_pairs(self.amplitudes.iter().map(|(k, a)| (k.clone(), a * factor)))
    }

    pub fn normalized(&self) -> crate::Result<Self> {
        let norm = self.norm();
        if self.is_empty() || norm == 0.0 {
            return Err(crate::Error::EmptyState);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    /// Drops amplitudes with modulus `<= threshold`. A threshold of zero keeps
    /// the vector unchanged since exact zeros are never stored.
    pub fn pruned(&self, threshold: f64) -> Self {
        SparseVector {
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|(_, a)| a.norm() > threshold)
                .map(|(k, a)| (k.clone(), *a))
                .collect(),
        }
    }

    /// Applies a key map with a per-key phase, i.e. a monomial operator.
    /// The map must be injective on the support for the result to be unitary.
    pub fn map_keys<K2: Ord + Clone, F>(&self, mut f: F) -> SparseVector<K2>
    where
        F: FnMut(&K) -> (K2, Complex64),
    {
        SparseVector::from_pairs(self.amplitudes.iter().map(|(k, a)| {
            let (k2, phase) = f(k);
            (k2, a * phase)
        }))
    }

    /// Largest amplitude difference when both vectors have exactly the same
    /// support, `None` if the supports differ.
    pub fn max_deviation(&self, other: &Self) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for ((k1, a1), (k2, a2)) in self.amplitudes.iter().zip(other.amplitudes.iter()) {
            if k1 != k2 {
                return None;
            }
            worst = worst.max((a1 - a2).norm());
        }
        Some(worst)
    }
}

impl<K: Ord + Clone + fmt::Debug> fmt::Debug for SparseVector<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.amplitudes.iter()).finish()
    }
}

impl<K: Ord + Clone> Add for &SparseVector<K> {
    type Output = SparseVector<K>;
    fn add(self, rhs: &SparseVector<K>) -> SparseVector<K> {
        let mut out = self.clone();
        for (k, a) in rhs.amplitudes.iter() {
            out.add_amplitude(k.clone(), *a);
        }
        out
    }
}

impl<K: Ord + Clone> Sub for &SparseVector<K> {
    type Output = SparseVector<K>;
    fn sub(self, rhs: &SparseVector<K>) -> SparseVector<K> {
        let mut out = self.clone();
        for (k, a) in rhs.amplitudes.iter() {
            out.add_amplitude(k.clone(), -a);
        }
        out
    }
}

impl BiKet {
    /// Alice-side support `{λ : ∃μ, ψ(λ, μ) ≠ 0}`.
    pub fn left_support(&self) -> BTreeSet<Label> {
        self.amplitudes.keys().map(|(l, _)| l.clone()).collect()
    }

    pub fn right_support(&self) -> BTreeSet<Label> {
        self.amplitudes.keys().map(|(_, r)| r.clone()).collect()
    }
}

/// `⟨u, v⟩ = Σ conj(u(x)) v(x)` over the common support.
pub fn inner_product(u: &Ket, v: &Ket) -> Complex64 {
    u.inner(v)
}

/// `(u ⊗ v)(λ, μ) = u(λ) v(μ)`.
pub fn tensor_product(u: &Ket, v: &Ket) -> BiKet {
    BiKet::from_pairs(
        u.iter()
            .flat_map(|(l, a)| v.iter().map(move |(r, b)| ((l.clone(), r.clone()), a * b))),
    )
}

/// The characteristic function of `{x}`: amplitude 1 at `x`, zero elsewhere.
pub fn characteristic_state(x: Label) -> Ket {
    Ket::basis(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn labels_reduce_to_canonical_form() {
        let a = Label::ratio(6, -4);
        assert_eq!(a, Label::ratio(-3, 2));
        assert_eq!(a.denom(), &BigInt::from(2));
        assert_eq!(a.to_string(), "-3/2");
    }

    #[test]
    fn label_parsing() {
        assert_eq!("22/7".parse::<Label>().unwrap(), Label::ratio(22, 7));
        assert_eq!("0.125".parse::<Label>().unwrap(), Label::ratio(1, 8));
        assert_eq!("-0.5".parse::<Label>().unwrap(), Label::ratio(-1, 2));
        assert_eq!("-3".parse::<Label>().unwrap(), Label::integer(-3));
        assert!("1/0".parse::<Label>().is_err());
        assert!("1.2.3".parse::<Label>().is_err());
        assert!("abc".parse::<Label>().is_err());
    }

    #[test]
    fn label_serde_is_textual() {
        let json = serde_json::to_string(&Label::ratio(5, 16)).unwrap();
        assert_eq!(json, "\"5/16\"");
        let back: Label = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Label::ratio(5, 16));
    }

    #[test]
    fn basis_overlaps() {
        let half = characteristic_state(Label::ratio(1, 2));
        let third = characteristic_state(Label::ratio(1, 3));
        assert_eq!(inner_product(&half, &half), c(1.0));
        assert_eq!(inner_product(&half, &third), c(0.0));
        assert!(half.is_disjoint(&third));
    }

    #[test]
    fn plus_minus_states_are_orthogonal() {
        let s = FRAC_1_SQRT_2;
        let plus = Ket::from_pairs([(Label::integer(0), c(s)), (Label::integer(1), c(s))]);
        let minus = Ket::from_pairs([(Label::integer(0), c(s)), (Label::integer(1), c(-s))]);
        // s*s - s*s by hand
        assert_eq!(inner_product(&plus, &minus), c(0.0));
        assert!((plus.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn characteristic_state_of_fraction() {
        let k = characteristic_state(Label::ratio(22, 7));
        assert_eq!(k.len(), 1);
        assert_eq!(k.amplitude(&Label::ratio(22, 7)), c(1.0));
        assert_eq!(k.norm(), 1.0);
        assert_eq!(characteristic_state(Label::zero()).norm(), 1.0);
    }

    #[test]
    fn tensor_of_basis_states() {
        let z = characteristic_state(Label::zero());
        let t = tensor_product(&z, &z);
        assert_eq!(t.len(), 1);
        assert_eq!(t.amplitude(&(Label::zero(), Label::zero())), c(1.0));
    }

    #[test]
    fn tensor_is_bilinear() {
        let s = FRAC_1_SQRT_2;
        let u = Ket::from_pairs([(Label::integer(0), c(s)), (Label::integer(1), c(s))]);
        let v = characteristic_state(Label::integer(2));
        let t = tensor_product(&u, &v);
        let keys: Vec<_> = t.support().cloned().collect();
        assert_eq!(
            keys,
            vec![
                (Label::integer(0), Label::integer(2)),
                (Label::integer(1), Label::integer(2))
            ]
        );
        for (_, a) in t.iter() {
            assert_eq!(*a, c(s));
        }
        assert_eq!(t.left_support().len(), 2);
        assert_eq!(t.right_support().len(), 1);
    }

    #[test]
    fn zero_amplitudes_are_dropped() {
        let mut k = characteristic_state(Label::integer(3));
        k.add_amplitude(Label::integer(3), c(-1.0));
        assert!(k.is_empty());
        let u = characteristic_state(Label::integer(1));
        let diff = &u - &u;
        assert!(diff.is_empty());
        assert_eq!(k.normalized(), Err(crate::Error::EmptyState));
    }

    #[test]
    fn pruning_with_zero_threshold_is_identity() {
        let k = Ket::from_pairs([(Label::integer(0), c(1e-300)), (Label::integer(1), c(1.0))]);
        assert_eq!(k.pruned(0.0), k);
        assert_eq!(k.pruned(1e-200).len(), 1);
    }

    #[test]
    fn max_deviation_requires_same_support() {
        let a = characteristic_state(Label::integer(0));
        let b = characteristic_state(Label::integer(1));
        assert_eq!(a.max_deviation(&b), None);
        assert_eq!(a.max_deviation(&a.scale(c(1.5))), Some(0.5));
    }
}
