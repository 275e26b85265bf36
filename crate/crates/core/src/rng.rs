//! Counter-based random streams.
//!
//! Every draw in a simulation comes from a ChaCha8 stream whose key is
//! derived from `(seed, link label)` and whose stream id is the trial index.
//! A trial therefore sees the same numbers no matter which worker runs it or
//! in what order, and two experiments that share a seed share their channel
//! realizations trial by trial (common random numbers).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which physical link (or auxiliary quantity) a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkLabel {
    /// Satellite to Bob; Eve's satellite link is taken equal to it.
    Satellite,
    RelayBob(u32),
    RelayEve(u32),
    /// Artificial-noise coefficients of relay `k`.
    ArtificialNoise(u32),
    /// Direct draw of relay `k`'s residual interference from its modeled law.
    ModeledResidual(u32),
}

impl LinkLabel {
    fn code(self) -> u64 {
        let (tag, idx) = match self {
            LinkLabel::Satellite => (1u64, 0u32),
            LinkLabel::RelayBob(k) => (2, k),
            LinkLabel::RelayEve(k) => (3, k),
            LinkLabel::ArtificialNoise(k) => (4, k),
            LinkLabel::ModeledResidual(k) => (5, k),
        };
        (tag << 32) | idx as u64
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Factory for the per-(trial, link) streams of one global seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStreams {
    seed: u64,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn key(&self, link: LinkLabel) -> [u8; 32] {
        let mut state = self.seed ^ link.code().wrapping_mul(0xD6E8_FEB8_6659_FD93);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        key
    }

    pub fn stream(&self, trial: u64, link: LinkLabel) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key(link));
        rng.set_stream(trial);
        rng
    }
}
