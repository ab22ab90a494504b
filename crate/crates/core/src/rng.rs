//! Counter-based, splittable random number streams.
//!
//! Streams are keyed by an arbitrary list of 64-bit parts (master seed,
//! replicate index, record index, variable tag); equal keys always produce
//! the same sequence regardless of thread scheduling, so parallel simulation
//! is reproducible by construction.
//!
//! Each output is a strengthened SplitMix64 finalizer applied to the key
//! state combined with a draw counter. Two finalizer rounds with distinct
//! odd constants give full avalanche between nearby keys/counters.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const MIX_1: u64 = 0xbf58_476d_1ce4_e5b9;
const MIX_2: u64 = 0x94d0_49bb_1331_11eb;
const MIX_3: u64 = 0xff51_afd7_ed55_8ccd;
const MIX_4: u64 = 0xc4ce_b9fe_1a85_ec53;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

#[inline]
fn mix2(mut z: u64) -> u64 {
    z = (z ^ (z >> 33)).wrapping_mul(MIX_3);
    z = (z ^ (z >> 33)).wrapping_mul(MIX_4);
    z ^ (z >> 33)
}

/// A keyed counter-based generator.
#[derive(Debug, Clone)]
pub struct KeyedRng {
    state: u64,
    counter: u64,
}

impl KeyedRng {
    /// Build a stream from key parts. Part order matters.
    pub fn from_parts(parts: &[u64]) -> Self {
        let mut state = GOLDEN;
        for (i, &p) in parts.iter().enumerate() {
            state = mix(state ^ p.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN)));
        }
        KeyedRng { state, counter: 0 }
    }

    /// Derive an independent child stream tagged by `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        KeyedRng { state: mix(self.state ^ mix2(tag.wrapping_add(GOLDEN))), counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter += 1;
        mix2(self.state ^ mix(c.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Unbiased uniform index in `0..n` (Lemire's method).
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        loop {
            let x = self.next_u64();
            let m = (x as u128).wrapping_mul(n as u128);
            let low = m as u64;
            if low >= n.wrapping_neg() % n {
                return (m >> 64) as usize;
            }
        }
    }

    /// Standard normal via Box–Muller (two uniforms per pair, second half
    /// discarded; simulation draws are uniform-dominated so this is fine).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = loop {
            let u = self.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
