use crate::{Error, Result};

/// State machine of a recursive systematic convolutional encoder.
///
/// The register holds `a_{t-1} .. a_{t-m}` with `a_{t-1}` in the most
/// significant bit. Polynomials are in the usual octal notation, highest
/// bit for `D^0`: `7 = 1 + D + D^2`, `5 = 1 + D^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trellis {
    memory: usize,
    feedback: u32,
    feedforward: u32,
    next: Vec<[usize; 2]>,
    parity: Vec<[u8; 2]>,
}

impl Trellis {
    /// The (5/7) code: feedback `7`, feedforward `5`, memory 2.
    pub fn rsc_5_7() -> Self {
        Self::recursive_systematic(0o7, 0o5).expect("valid polynomials")
    }

    pub fn recursive_systematic(feedback: u32, feedforward: u32) -> Result<Self> {
        if feedback < 2 || feedback & (feedback - 1) == 0 {
            return Err(Error::Config(format!(
                "invalid feedback polynomial {feedback:o}"
            )));
        }
        let memory = (31 - feedback.leading_zeros()) as usize;
        if feedforward == 0 || feedforward >= 1 << (memory + 1) {
            return Err(Error::Config(format!(
                "invalid feedforward polynomial {feedforward:o}"
            )));
        }
        let coeff = |poly: u32, j: usize| (poly >> (memory - j)) & 1;
        let states = 1usize << memory;
        let mut next = Vec::with_capacity(states);
        let mut parity = Vec::with_capacity(states);
        for state in 0..states {
            let reg = |j: usize| ((state >> (memory - j)) & 1) as u32;
            let fb: u32 = (1..=memory).fold(0, |acc, j| acc ^ (coeff(feedback, j) & reg(j)));
            let ff: u32 = (1..=memory).fold(0, |acc, j| acc ^ (coeff(feedforward, j) & reg(j)));
            let mut nx = [0; 2];
            let mut par = [0; 2];
            for u in 0..2u32 {
                let a = u ^ fb;
                nx[u as usize] = ((a as usize) << (memory - 1)) | (state >> 1);
                par[u as usize] = ((coeff(feedforward, 0) & a) ^ ff) as u8;
            }
            next.push(nx);
            parity.push(par);
        }
        Ok(Trellis {
            memory,
            feedback,
            feedforward,
            next,
            parity,
        })
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    /// Next state from `state` on logical input `u`.
    #[inline]
    pub fn next_state(&self, state: usize, u: usize) -> usize {
        self.next[state][u]
    }

    /// Logical parity output from `state` on logical input `u`.
    #[inline]
    pub fn parity(&self, state: usize, u: usize) -> u8 {
        self.parity[state][u]
    }

    /// Logical input that feeds a zero into the register from `state`.
    pub fn terminating_input(&self, state: usize) -> usize {
        (0..2)
            .find(|&u| self.next[state][u] >> (self.memory - 1) == 0)
            .expect("one input always clears the feedback")
    }

    pub fn polynomials(&self) -> (u32, u32) {
        (self.feedback, self.feedforward)
    }
}

fn to_logical(b: i8) -> usize {
    usize::from(b > 0)
}

fn to_bipolar(u: usize) -> i8 {
    if u == 1 {
        1
    } else {
        -1
    }
}

/// Encodes bipolar info bits into terminated `(systematic, parity)` pairs.
pub fn rsc_encode(trellis: &Trellis, info: &[i8]) -> Vec<i8> {
    let mut out = Vec::with_capacity(2 * (info.len() + trellis.memory()));
    let mut state = 0;
    let mut step = |u: usize, state: &mut usize| {
        out.push(to_bipolar(u));
        out.push(to_bipolar(trellis.parity(*state, u) as usize));
        *state = trellis.next_state(*state, u);
    };
    for &b in info {
        step(to_logical(b), &mut state);
    }
    for _ in 0..trellis.memory() {
        let u = trellis.terminating_input(state);
        step(u, &mut state);
    }
    debug_assert_eq!(state, 0);
    out
}

/// Hard-decision Viterbi decoding of a terminated codeword; returns the
/// info bits without the tail.
pub fn viterbi_decode(trellis: &Trellis, received: &[i8]) -> Result<Vec<i8>> {
    if !received.len().is_multiple_of(2) || received.len() < 2 * trellis.memory() {
        return Err(Error::LengthMismatch {
            expected: (received.len() / 2).max(trellis.memory()) * 2,
            actual: received.len(),
        });
    }
    let steps = received.len() / 2;
    let ns = trellis.num_states();
    let mut metric = vec![u64::MAX; ns];
    metric[0] = 0;
    let mut back: Vec<Vec<(usize, usize)>> = Vec::with_capacity(steps);
    for t in 0..steps {
        let (sys, par) = (to_logical(received[2 * t]), to_logical(received[2 * t + 1]));
        let mut next_metric = vec![u64::MAX; ns];
        let mut from = vec![(0, 0); ns];
        for (s, &m) in metric.iter().enumerate() {
            if m == u64::MAX {
                continue;
            }
            for u in 0..2 {
                let cost = u64::from(u != sys) + u64::from(trellis.parity(s, u) as usize != par);
                let n = trellis.next_state(s, u);
                if m + cost < next_metric[n] {
                    next_metric[n] = m + cost;
                    from[n] = (s, u);
                }
            }
        }
        metric = next_metric;
        back.push(from);
    }
    let mut state = 0;
    let mut bits = vec![0i8; steps];
    for t in (0..steps).rev() {
        let (prev, u) = back[t][state];
        bits[t] = to_bipolar(u);
        state = prev;
    }
    bits.truncate(steps - trellis.memory());
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn five_seven_transitions() {
        let t = Trellis::rsc_5_7();
        assert_eq!(t.memory(), 2);
        assert_eq!(t.num_states(), 4);
        for s in 0..4 {
            assert_ne!(t.next_state(s, 0), t.next_state(s, 1));
            assert_ne!(t.parity(s, 0), t.parity(s, 1));
        }
    }

    #[test]
    fn zero_input_stays_zero() {
        let t = Trellis::rsc_5_7();
        let out = rsc_encode(&t, &[-1; 10]);
        assert_eq!(out.len(), 24);
        assert!(out.iter().all(|&b| b == -1));
    }

    #[test]
    fn impulse_response_hand_trace() {
        // a_t = u_t ^ a_{t-1} ^ a_{t-2} -> 1,1,0,1,1,0,1,1
        // p_t = a_t ^ a_{t-2}          -> 1,1,1,0,1,1,0,1
        let t = Trellis::rsc_5_7();
        let mut info = vec![-1i8; 8];
        info[0] = 1;
        let out = rsc_encode(&t, &info);
        let parity: Vec<i8> = out.iter().skip(1).step_by(2).take(8).copied().collect();
        assert_eq!(parity, vec![1, 1, 1, -1, 1, 1, -1, 1]);
        let sys: Vec<i8> = out.iter().step_by(2).take(8).copied().collect();
        assert_eq!(sys, info);
    }

    #[test]
    fn encode_viterbi_round_trip() {
        let t = Trellis::rsc_5_7();
        let mut rng = crate::rng::rng_from_seed(17);
        for len in [1, 2, 5, 64, 300] {
            let info: Vec<i8> = (0..len)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect();
            let coded = rsc_encode(&t, &info);
            assert_eq!(coded.len(), 2 * (len + 2));
            assert_eq!(viterbi_decode(&t, &coded).unwrap(), info);
        }
        assert!(viterbi_decode(&t, &[1, 1, 1]).is_err());
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(Trellis::recursive_systematic(0o4, 0o5).is_err());
        assert!(Trellis::recursive_systematic(0o7, 0o17).is_err());
        assert!(Trellis::recursive_systematic(0o7, 0).is_err());
    }
}
