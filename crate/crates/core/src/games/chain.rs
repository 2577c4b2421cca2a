//! Binary spin-chain encoding of inputs in `[0, 1)`.
//!
//! `x ↦` the first `N` binary digits of `x`, i.e. a computational-basis
//! state of `N` qubits. Dyadic rationals use their terminating expansion.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::hilbert::{Ket, Label};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainState {
    bits: Vec<bool>,
}

impl ChainState {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        ChainState { bits }
    }

    /// Inverse of [`ChainState::index`] for a chain of `sites` qubits.
    pub fn from_index(index: &BigInt, sites: usize) -> Self {
        let bits = (0..sites).map(|k| index.bit((sites - 1 - k) as u64)).collect();
        ChainState { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn sites(&self) -> usize {
        self.bits.len()
    }

    /// Basis index with the first site as the most significant bit.
    pub fn index(&self) -> BigInt {
        self.bits
            .iter()
            .fold(BigInt::zero(), |acc, &b| (acc << 1u32) + if b { 1 } else { 0 })
    }

    /// The computational-basis state, keyed by its index.
    pub fn to_ket(&self) -> Ket {
        Ket::basis(Label::from_bigints(self.index(), BigInt::one()))
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// First `sites` binary digits of `x ∈ [0, 1)`.
pub fn chain_encode(x: &Label, sites: usize) -> Result<ChainState> {
    if x.is_negative() || x >= &Label::one() {
        return Err(Error::OutOfRange {
            value: x.to_string(),
            range: "[0, 1)".into(),
        });
    }
    if sites == 0 {
        return Err(Error::InvalidParameter("a chain needs at least one site".into()));
    }
    let denom = x.denom().clone();
    let mut rem = x.numer().clone();
    let mut bits = Vec::with_capacity(sites);
    for _ in 0..sites {
        rem <<= 1u32;
        if rem >= denom {
            rem -= &denom;
            bits.push(true);
        } else {
            bits.push(false);
        }
    }
    Ok(ChainState { bits })
}

/// `Σ_k b_k 2^{-k}`.
pub fn chain_decode(state: &ChainState) -> Label {
    Label::from_bigints(state.index(), BigInt::one() << state.sites())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_half() {
        let s = chain_encode(&Label::ratio(1, 2), 3).unwrap();
        assert_eq!(s.to_bit_string(), "100");
        assert_eq!(chain_decode(&s), Label::ratio(1, 2));
    }

    #[test]
    fn one_third() {
        let x = Label::ratio(1, 3);
        let s = chain_encode(&x, 4).unwrap();
        assert_eq!(s.to_bit_string(), "0101");
        let d = chain_decode(&s);
        assert_eq!(d, Label::ratio(5, 16));
        assert_eq!(&x - &d, Label::ratio(1, 48));
        assert!(&x - &d < Label::dyadic(4));
    }

    #[test]
    fn zero_is_all_zero() {
        for n in [1, 5, 64] {
            let s = chain_encode(&Label::zero(), n).unwrap();
            assert!(s.bits().iter().all(|b| !b));
            assert_eq!(chain_decode(&s), Label::zero());
        }
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            chain_encode(&Label::one(), 3),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            chain_encode(&Label::ratio(-1, 4), 3),
            Err(Error::OutOfRange { .. })
        ));
        assert!(chain_encode(&Label::ratio(1, 4), 0).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let s = chain_encode(&Label::ratio(11, 13), 20).unwrap();
        assert_eq!(ChainState::from_index(&s.index(), 20), s);
        let k = s.to_ket();
        assert_eq!(k.len(), 1);
    }
}
