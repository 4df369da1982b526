use rand::seq::SliceRandom;

use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Fixed permutation: `interleave(v)[i] = v[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
    seed: Option<u64>,
}

impl Interleaver {
    /// Uniformly random permutation (Fisher-Yates on a ChaCha8 stream).
    pub fn random(len: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(&mut rng_from_seed(seed));
        Interleaver {
            perm,
            seed: Some(seed),
        }
    }

    pub fn identity(len: usize) -> Self {
        Interleaver {
            perm: (0..len).collect(),
            seed: None,
        }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Config("not a permutation".into()));
            }
        }
        Ok(Interleaver { perm, seed: None })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, v: &[T]) -> Result<Vec<T>> {
        Error::check_len(self.perm.len(), v.len())?;
        Ok(self.perm.iter().map(|&p| v[p]).collect())
    }

    pub fn deinterleave<T: Copy + Default>(&self, v: &[T]) -> Result<Vec<T>> {
        Error::check_len(self.perm.len(), v.len())?;
        let mut out = vec![T::default(); v.len()];
        for (&p, &x) in self.perm.iter().zip(v) {
            out[p] = x;
        }
        Ok(out)
    }

    /// FNV-1a over the little-endian permutation entries.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &p in &self.perm {
            for byte in (p as u64).to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}
