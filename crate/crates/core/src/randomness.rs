//! Deterministic shared randomness.
//!
//! Everything downstream of a seed is a pure function of that seed: per-atom
//! exponential clocks keyed by atom label, and a lazily extended stream of
//! time-ordered marked Poisson events. Sub-streams are separated by a domain
//! string so that, for example, clock randomness never collides with event
//! randomness under the same seed.
//!
//! The mixer is FNV-1a absorption followed by two rounds of the splitmix64
//! finalizer; the generator name reported in run metadata is
//! [`GENERATOR_NAME`].

use crate::dist::{AtomId, Universe};

/// Name recorded in output metadata so runs can be reproduced.
pub const GENERATOR_NAME: &str = "splitmix64-fnv1a";

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer: full-avalanche bijection on u64.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(init: u64, bytes: &[u8]) -> u64 {
    let mut h = init;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derive the sub-stream value for (seed, domain, payload). Distinct
/// domains get unrelated outputs under the same seed.
pub fn derive(seed: u64, domain: &str, payload: &[u8]) -> u64 {
    let mut h = fnv1a(FNV_OFFSET, domain.as_bytes());
    h = fnv1a(h ^ 0xff, payload);
    mix64(mix64(h ^ seed).wrapping_add(GOLDEN))
}

/// Map a u64 to the open interval (0, 1); both endpoints are unreachable,
/// so logs of these values are always finite and nonzero.
pub fn unit_open(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Uniform index in 0..n via the high bits of a 128-bit product. The bias
/// is below n / 2^64, far under anything observable here.
pub fn uniform_index(x: u64, n: usize) -> usize {
    ((x as u128 * n as u128) >> 64) as usize
}

/// Strictly positive Exp(1) variate from a u64.
fn exp1(x: u64) -> f64 {
    -unit_open(x).ln()
}

/// A plain splitmix64 sequence, used where a consumable stream of words is
/// more convenient than keyed derivation (search restarts, star coupling).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    pub fn next_unit(&mut self) -> f64 {
        unit_open(self.next_u64())
    }

    pub fn next_index(&mut self, n: usize) -> usize {
        uniform_index(self.next_u64(), n)
    }
}

/// One independent Exp(1) clock per atom, keyed by the atom's label (not
/// its index), so the same label draws the same clock in any universe.
#[derive(Clone, Debug)]
pub struct ClockTable {
    universe: Universe,
    seed: u64,
    clocks: Vec<f64>,
}

impl ClockTable {
    pub fn generate(universe: &Universe, seed: u64) -> ClockTable {
        let clocks = universe
            .labels()
            .iter()
            .map(|label| exp1(derive(seed, "clock", label.as_bytes())))
            .collect();
        ClockTable {
            universe: universe.clone(),
            seed,
            clocks,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn clock(&self, atom: AtomId) -> f64 {
        self.clocks[atom.0 as usize]
    }

    pub fn clocks(&self) -> &[f64] {
        &self.clocks
    }
}

/// A marked Poisson event: arrival time, an atom drawn uniformly from the
/// universe, and a height drawn uniformly from (0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonEvent {
    pub time: f64,
    pub atom: AtomId,
    pub height: f64,
}

/// Lazily extended stream of events with Exp(rate = |universe|)
/// inter-arrival times. Event k is a pure function of (seed, universe, k):
/// recreating the stream replays it exactly.
#[derive(Clone, Debug)]
pub struct PoissonStream {
    universe: Universe,
    seed: u64,
    next_index: u64,
    time: f64,
}

impl PoissonStream {
    pub fn new(universe: &Universe, seed: u64) -> PoissonStream {
        PoissonStream {
            universe: universe.clone(),
            seed,
            next_index: 0,
            time: 0.0,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Events consumed so far.
    pub fn position(&self) -> u64 {
        self.next_index
    }

    pub fn rate(&self) -> f64 {
        self.universe.len() as f64
    }

    fn field(&self, k: u64, tag: u8) -> u64 {
        let mut payload = [0u8; 9];
        payload[..8].copy_from_slice(&k.to_le_bytes());
        payload[8] = tag;
        derive(self.seed, "stream", &payload)
    }

    pub fn next_event(&mut self) -> PoissonEvent {
        let k = self.next_index;
        self.next_index += 1;
        let dt = exp1(self.field(k, 0)) / self.rate();
        let mut t = self.time + dt;
        if t <= self.time {
            // Guard exact ties from underflow; times must strictly increase.
            t = f64::from_bits(self.time.to_bits() + 1);
        }
        self.time = t;
        let atom = AtomId(uniform_index(self.field(k, 1), self.universe.len()) as u32);
        let height = unit_open(self.field(k, 2));
        PoissonEvent {
            time: t,
            atom,
            height,
        }
    }
}

/// Per-replicate sampler seed for Monte Carlo loops.
pub fn replicate_seed(master: u64, replicate: u64) -> u64 {
    derive(master, "replicate", &replicate.to_le_bytes())
}
