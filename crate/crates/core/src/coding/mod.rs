//! Outer code of the iterative receiver: a rate-1/2 recursive systematic
//! convolutional code, its log-MAP BCJR decoder, and a random interleaver.
//!
//! Bits are bipolar: `+1` is logical one, `-1` logical zero. The encoder
//! emits `(systematic, parity)` pairs and terminates the trellis in the zero
//! state with `memory` tail steps, so `K` info bits give `2 (K + memory)`
//! coded bits.

mod bcjr;
mod interleaver;
mod trellis;

pub use bcjr::{bcjr_decode, BcjrOutput};
pub use interleaver::Interleaver;
pub use trellis::{rsc_encode, viterbi_decode, Trellis};
