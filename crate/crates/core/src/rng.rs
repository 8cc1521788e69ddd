//! Counter-based random number generation over addressable substreams.
//!
//! Every stochastic operation in this crate draws from a substream identified
//! by a root seed plus a path of nonnegative integers. A draw is a pure
//! function of `(root, path, counter)`, so results are replayable and do not
//! depend on thread scheduling: parallel workers address disjoint paths
//! instead of sharing a mutable generator.

use crate::normal::normal_quantile_unchecked;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const LANE: u64 = 0x2545_f491_4f6c_dd1d;

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Identifier of one noise substream: a root seed plus a derivation path.
///
/// Identical `(root, path)` pairs reproduce identical draws; distinct paths
/// yield statistically independent substreams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngSeed {
    root: u64,
    path: Vec<u64>,
    // 128-bit key derived incrementally from (root, path).
    k0: u64,
    k1: u64,
}

impl RngSeed {
    pub fn new(root: u64) -> Self {
        let k0 = mix64(root ^ GOLDEN);
        let k1 = mix64(root.wrapping_add(LANE));
        RngSeed {
            root,
            path: Vec::new(),
            k0,
            k1,
        }
    }

    /// Descend one level in the derivation tree.
    pub fn child(&self, index: u64) -> Self {
        let (k0, k1) = derive(self.k0, self.k1, index);
        let mut path = self.path.clone();
        path.push(index);
        RngSeed {
            root: self.root,
            path,
            k0,
            k1,
        }
    }

    /// Substream for `child(index)` without materializing the path vector.
    /// Hot loops (one draw per candidate) use this.
    pub fn stream(&self, index: u64) -> Substream {
        let (k0, k1) = derive(self.k0, self.k1, index);
        Substream { k0, k1, counter: 0 }
    }

    /// Substream addressed by this seed itself.
    pub fn rng(&self) -> Substream {
        Substream {
            k0: self.k0,
            k1: self.k1,
            counter: 0,
        }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }
}

#[inline]
fn derive(k0: u64, k1: u64, index: u64) -> (u64, u64) {
    let t = mix64(index.wrapping_add(GOLDEN));
    let n0 = mix64(k0 ^ t);
    let n1 = mix64(k1.wrapping_add(t).wrapping_add(LANE));
    (n0, n1)
}

/// A deterministic stream of draws keyed by a substream identifier.
///
/// Output `i` is `mix(key, i)`; the only mutable state is the counter.
#[derive(Debug, Clone)]
pub struct Substream {
    k0: u64,
    k1: u64,
    counter: u64,
}

impl Substream {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter += 1;
        mix64(self.k0 ^ mix64(c.wrapping_mul(GOLDEN).wrapping_add(self.k1)))
    }

    /// Uniform on the open interval (0, 1), one of 2^53 equispaced midpoints.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal via inverse-CDF transform of a substream uniform.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        normal_quantile_unchecked(self.uniform())
    }

    /// Normal with the given mean and standard deviation.
    #[inline]
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }
}
