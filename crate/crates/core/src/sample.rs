//! Seeded random inputs for sweeps, tests and benches.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, index)`, so a
//! sweep gives the same numbers whether it runs sequentially or on rayon.

use num_bigint::RandBigInt;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hilbert::{BiKet, Ket, Label};
use crate::weyl::WeylParams;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `n/d` with `|n| ≤ max_numer` and `1 ≤ d ≤ max_denom`.
pub fn small_label<R: Rng>(rng: &mut R, max_numer: i64, max_denom: i64) -> Label {
    Label::ratio(
        rng.gen_range(-max_numer..=max_numer),
        rng.gen_range(1..=max_denom),
    )
}

/// A rational in `[0, 1)` with denominator at most `max_denom`.
pub fn unit_interval_label<R: Rng>(rng: &mut R, max_denom: i64) -> Label {
    let d = rng.gen_range(1..=max_denom);
    Label::ratio(rng.gen_range(0..d), d)
}

/// A rational whose numerator and denominator have up to `bits` bits.
pub fn wide_label<R: Rng>(rng: &mut R, bits: u64) -> Label {
    let n = rng.gen_bigint(bits);
    let mut d = rng.gen_biguint(bits);
    if d == 0u32.into() {
        d = 1u32.into();
    }
    Label::from_bigints(n, d.into())
}

pub fn small_params<R: Rng>(rng: &mut R) -> WeylParams {
    WeylParams::new(small_label(rng, 12, 6), small_label(rng, 12, 6))
}

pub fn amplitude<R: Rng>(rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm_sqr() > 1e-6 {
            return z;
        }
    }
}

fn distinct_labels<R: Rng>(rng: &mut R, count: usize, max_numer: i64, max_denom: i64) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::with_capacity(count);
    while out.len() < count {
        let l = small_label(rng, max_numer, max_denom);
        if !out.contains(&l) {
            out.push(l);
        }
    }
    out
}

/// A unit-norm ket with exactly `support` distinct rational keys.
pub fn random_ket<R: Rng>(rng: &mut R, support: usize) -> Ket {
    let keys = distinct_labels(rng, support, 40, 9);
    Ket::from_pairs(keys.into_iter().map(|k| (k, amplitude(rng))))
        .normalized()
        .expect("nonzero amplitudes")
}

/// A unit-norm biket with `support` distinct key pairs.
pub fn random_biket<R: Rng>(rng: &mut R, support: usize) -> BiKet {
    let mut keys: Vec<(Label, Label)> = Vec::with_capacity(support);
    while keys.len() < support {
        let k = (small_label(rng, 20, 5), small_label(rng, 20, 5));
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    BiKet::from_pairs(keys.into_iter().map(|k| (k, amplitude(rng))))
        .normalized()
        .expect("nonzero amplitudes")
}

/// A unit-norm biket supported on the line `λ + μ = x`, which therefore
/// satisfies condition (i) exactly in the position/position representation.
pub fn sum_constrained_biket<R: Rng>(rng: &mut R, support: usize, x: &Label) -> BiKet {
    let lefts = distinct_labels(rng, support, 20, 5);
    BiKet::from_pairs(lefts.into_iter().map(|l| {
        let r = x - &l;
        ((l, r), amplitude(rng))
    }))
    .normalized()
    .expect("nonzero amplitudes")
}

/// `count` pairwise distinct rationals in `[0, 1)`.
pub fn distinct_unit_labels<R: Rng>(rng: &mut R, count: usize, max_denom: i64) -> Vec<Label> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let l = unit_interval_label(rng, max_denom);
        if seen.insert(l.clone()) {
            out.push(l);
        }
    }
    out
}

/// `k / 2^m` in `[0, 1)` with `m ≤ max_bits`.
pub fn dyadic_label<R: Rng>(rng: &mut R, max_bits: u32) -> Label {
    let m = rng.gen_range(0..=max_bits);
    let k = rng.gen_biguint(u64::from(m));
    Label::from_bigints(k.into(), num_bigint::BigInt::from(1u8) << m)
}

/// `count` pairwise distinct small rationals.
pub fn distinct_inputs<R: Rng>(rng: &mut R, count: usize) -> Vec<Label> {
    let mut v = distinct_labels(rng, count, 1000, 97);
    v.shuffle(rng);
    v
}
