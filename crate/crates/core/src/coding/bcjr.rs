use super::Trellis;
use crate::{Error, Result};

/// Output of one log-MAP decoding pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BcjrOutput {
    /// A-posteriori LLRs of the info bits, one per trellis step (tail included).
    pub info_post: Vec<f64>,
    /// Extrinsic LLRs of the coded bits in `(systematic, parity)` order.
    pub ext_coded: Vec<f64>,
}

/// Jacobian logarithm `ln(e^a + e^b)`.
#[inline]
fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Log-MAP BCJR over a trellis terminated in the zero state.
///
/// All three inputs are per trellis step. `llr_apriori` is prior knowledge of
/// the info bits; the systematic extrinsic excludes both it and `llr_sys`.
pub fn bcjr_decode(
    trellis: &Trellis,
    llr_sys: &[f64],
    llr_par: &[f64],
    llr_apriori: &[f64],
) -> Result<BcjrOutput> {
    let n = llr_sys.len();
    Error::check_len(n, llr_par.len())?;
    Error::check_len(n, llr_apriori.len())?;
    if n < trellis.memory() {
        return Err(Error::LengthMismatch {
            expected: trellis.memory(),
            actual: n,
        });
    }
    let ns = trellis.num_states();
    let bip = |b: usize| if b == 1 { 1.0 } else { -1.0 };
    let gamma = |t: usize, s: usize, u: usize| {
        0.5 * (bip(u) * (llr_sys[t] + llr_apriori[t])
            + bip(trellis.parity(s, u) as usize) * llr_par[t])
    };

    let mut alpha = vec![f64::NEG_INFINITY; (n + 1) * ns];
    alpha[0] = 0.0;
    for t in 0..n {
        let (cur, nxt) = alpha.split_at_mut((t + 1) * ns);
        let cur = &cur[t * ns..];
        let nxt = &mut nxt[..ns];
        for (s, &a) in cur.iter().enumerate() {
            if a == f64::NEG_INFINITY {
                continue;
            }
            for u in 0..2 {
                let to = trellis.next_state(s, u);
                nxt[to] = max_star(nxt[to], a + gamma(t, s, u));
            }
        }
        let norm = nxt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        nxt.iter_mut().for_each(|a| *a -= norm);
    }

    let mut beta = vec![f64::NEG_INFINITY; (n + 1) * ns];
    beta[n * ns] = 0.0;
    for t in (0..n).rev() {
        let (cur, nxt) = beta.split_at_mut((t + 1) * ns);
        let cur = &mut cur[t * ns..];
        let nxt = &nxt[..ns];
        for (s, b) in cur.iter_mut().enumerate() {
            for u in 0..2 {
                let to = trellis.next_state(s, u);
                if nxt[to] != f64::NEG_INFINITY {
                    *b = max_star(*b, nxt[to] + gamma(t, s, u));
                }
            }
        }
        let norm = cur.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        cur.iter_mut().for_each(|b| *b -= norm);
    }

    let mut info_post = Vec::with_capacity(n);
    let mut ext_coded = Vec::with_capacity(2 * n);
    for t in 0..n {
        let mut info = [f64::NEG_INFINITY; 2];
        let mut par = [f64::NEG_INFINITY; 2];
        for s in 0..ns {
            let a = alpha[t * ns + s];
            if a == f64::NEG_INFINITY {
                continue;
            }
            for u in 0..2 {
                let b = beta[(t + 1) * ns + trellis.next_state(s, u)];
                if b == f64::NEG_INFINITY {
                    continue;
                }
                let m = a + gamma(t, s, u) + b;
                info[u] = max_star(info[u], m);
                let p = trellis.parity(s, u) as usize;
                par[p] = max_star(par[p], m);
            }
        }
        let post = info[1] - info[0];
        info_post.push(post);
        ext_coded.push(post - llr_sys[t] - llr_apriori[t]);
        ext_coded.push(par[1] - par[0] - llr_par[t]);
    }
    Ok(BcjrOutput {
        info_post,
        ext_coded,
    })
}
