//! Randomly shifted Halton points for multistart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u8; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Mixes a seed with a stream id (splitmix64 finalizer).
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) struct ShiftedHalton {
    shift: Vec<f64>,
    index: usize,
    rng: ChaCha8Rng,
}

impl ShiftedHalton {
    pub(crate) fn new(dims: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dims).map(|_| rng.gen::<f64>()).collect();
        Self { shift, index: 0, rng }
    }

    /// Next point in `(0, 1)^dims`.
    pub(crate) fn next_point(&mut self) -> Vec<f64> {
        self.index += 1;
        let idx = self.index;
        let mut out = Vec::with_capacity(self.shift.len());
        for d in 0..self.shift.len() {
            let v = match PRIMES.get(d) {
                Some(&base) => (halton::number(base, idx) + self.shift[d]).fract(),
                None => self.rng.gen::<f64>(),
            };
            out.push(v.clamp(1e-6, 1.0 - 1e-6));
        }
        out
    }
}
