//! Counter-based deterministic random streams.
//!
//! Every random quantity in a run is drawn from a stream keyed by what the
//! draw is for — `(seed, purpose, step, observer, neighbor, channel)` — not
//! from one sequential generator. Keyed streams make results independent of
//! evaluation order, so per-agent work can be parallelized or skipped
//! (e.g. the reactive controller never reads control noise) without
//! perturbing any other draw.

use crate::vec::VecM;

/// splitmix64 finalizer; the workhorse behind both keying and generation.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

/// Stream purpose tags; part of the key so distinct uses of one run seed
/// never collide.
pub mod tag {
    pub const INIT: u64 = 0x696e_6974; // "init"
    pub const NOISE: u64 = 0x006e_6f69_7365; // "noise"
    pub const CELL: u64 = 0x6365_6c6c; // "cell"
}

/// A deterministic sequential stream derived from a key.
#[derive(Clone, Debug)]
pub struct KeyedStream {
    state: u64,
}

impl KeyedStream {
    /// Fold the key words into a stream state. Equal keys give equal
    /// streams; differing in any word gives an unrelated stream.
    pub fn from_key(words: &[u64]) -> Self {
        let mut state = 0x243F_6A88_85A3_08D3; // pi digits, nothing-up-my-sleeve
        for (i, w) in words.iter().enumerate() {
            state = mix64(state ^ mix64(w.wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1))));
        }
        KeyedStream { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    fn next_open_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.next_u64() >> 11) + 1) as f64 * SCALE
    }

    /// Uniform in [lo, hi).
    pub fn next_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    /// Standard normal via Box-Muller.
    pub fn next_standard_normal(&mut self) -> f64 {
        let u1 = self.next_open_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Isotropic N(0, sigma^2 I) draw of dimension `m`.
    pub fn next_normal_vec(&mut self, m: usize, sigma: f64) -> VecM {
        VecM::from_components((0..m).map(|_| self.next_standard_normal() * sigma).collect())
    }
}

/// Derive the run seed for cell `index` of a multi-run command (compare,
/// sweep) from the master seed. Counter-based: cell k's seed depends only on
/// `(master, k)`, so adding cells or arms never perturbs existing ones.
pub fn derive_run_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master ^ tag::CELL) ^ mix64(index.wrapping_add(1)))
}
