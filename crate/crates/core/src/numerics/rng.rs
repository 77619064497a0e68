use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream tags used by the drivers when forking purpose-specific streams.
pub mod purpose {
    pub const PROPOSAL: u64 = 1;
    pub const SUBSET: u64 = 2;
    pub const ACCEPTANCE: u64 = 3;
    pub const INITIAL_STATE: u64 = 4;
    pub const INSTANCE: u64 = 5;
    pub const MULTIPLICITY: u64 = 6;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for item `index` of a family rooted at `base`. Depends only on
/// `(base, index)`, so growing the family never changes earlier members.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id mapped onto ChaCha's native stream
/// counter, so distinct ids never share key-stream blocks.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream for `tag`, independent of how far `self` has advanced.
    pub fn fork(&self, tag: u64) -> RngStream {
        RngStream::new(self.seed, derive_seed(self.stream_id, tag))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
