//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 keystream. The 256-bit key is expanded from
//! `(master_seed, purpose)` with SplitMix64 and the 64-bit ChaCha stream id
//! is the trial index, so a value is addressed by
//! `(master_seed, purpose, trial_index, word_position)`. Workers can
//! regenerate any trial independently of scheduling order.
//!
//! Bit-equality is promised within one build; the samplers layered on top
//! (`rand_distr`) may change between dependency versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Independent sub-streams of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Purpose {
    Matrix,
    Deformation,
    LimitLaw,
    Bootstrap,
    Auxiliary,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Matrix => 0x4d41_5452_4958_0001,
            Purpose::Deformation => 0x4445_464f_524d_0002,
            Purpose::LimitLaw => 0x4c49_4d49_5400_0003,
            Purpose::Bootstrap => 0x424f_4f54_0000_0004,
            Purpose::Auxiliary => 0x4155_5800_0000_0005,
        }
    }
}

/// SplitMix64 step; also used as a 64-bit mixer.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key(master_seed: u64, purpose: Purpose) -> [u8; 32] {
    let mut state = master_seed ^ purpose.tag();
    let mut out = [0u8; 32];
    for chunk in out.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    out
}

/// Stream for `(master_seed, purpose, trial)` positioned at word 0.
pub fn stream(master_seed: u64, trial: u64, purpose: Purpose) -> TrialRng {
    let mut rng = ChaCha8Rng::from_seed(key(master_seed, purpose));
    rng.set_stream(trial);
    rng
}

/// Same stream positioned at a given 32-bit word offset.
pub fn stream_at(master_seed: u64, trial: u64, purpose: Purpose, word: u128) -> TrialRng {
    let mut rng = stream(master_seed, trial, purpose);
    rng.set_word_pos(word);
    rng
}

/// Compact 64-bit seed recorded with each trial.
pub fn derived_seed(master_seed: u64, trial: u64) -> u64 {
    let mut s = master_seed ^ 0xD1B5_4A32_D192_ED03;
    let a = splitmix64(&mut s);
    let mut t = trial ^ a;
    splitmix64(&mut t)
}
