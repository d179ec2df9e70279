//! The non-density sequence space: words over growing alphabets `I_n = {0..N_n}`
//! with `N_n = n 2^n` and scales `eps_1 = 1`, `eps_{n+1} = 2^{-N_n} eps_n`.
//!
//! All scales are exact powers of two, so they are stored as integer exponents.

use crate::error::{Error, Result};

/// Smallest binary exponent we accept before a distance would leave the normal range.
const MIN_EXP: i64 = -1022;

/// Cap on the number of materialized words.
pub const MAX_WORDS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpace {
    depth: usize,
    /// `eps_n = 2^{-eps_exp[n-1]}`.
    eps_exp: Vec<i64>,
}

/// Exact `2^e` for exponents in the normal range.
pub fn pow2(e: i64) -> f64 {
    debug_assert!((MIN_EXP..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// `N_n = n 2^n`.
pub fn alphabet_max(n: usize) -> u64 {
    (n as u64) << n
}

impl SequenceSpace {
    pub fn new(depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::domain("sequence space depth must be at least 1"));
        }
        let mut eps_exp = Vec::with_capacity(depth);
        let mut e = 0i64;
        for n in 1..=depth {
            eps_exp.push(e);
            // smallest distance at level n is eps_n 2^{-N_n}
            let floor = e + alphabet_max(n) as i64;
            if -floor < MIN_EXP || n > 60 {
                return Err(Error::Precision(format!(
                    "eps_{n} 2^-N_{n} = 2^-{floor} underflows double precision"
                )));
            }
            e = floor;
        }
        Ok(SequenceSpace { depth, eps_exp })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `log2 eps_n` for `1 <= n <= depth`.
    pub fn log2_eps(&self, n: usize) -> f64 {
        -(self.eps_exp[n - 1] as f64)
    }

    pub fn eps(&self, n: usize) -> f64 {
        pow2(-self.eps_exp[n - 1])
    }

    /// Level distance `d_n(i, j)`.
    pub fn level_dist(&self, n: usize, i: u32, j: u32) -> f64 {
        if i == j {
            return 0.0;
        }
        let e = self.eps_exp[n - 1];
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if a == 0 {
            pow2(-e - b as i64)
        } else {
            pow2(-e - a as i64) + pow2(-e - b as i64)
        }
    }

    /// Distance between two words of equal length.
    pub fn dist(&self, a: &[u32], b: &[u32]) -> f64 {
        match a.iter().zip(b).position(|(x, y)| x != y) {
            None => 0.0,
            Some(m) => self.level_dist(m + 1, a[m], b[m]),
        }
    }

    /// Number of words of length `depth`.
    pub fn word_count(&self) -> u128 {
        (1..=self.depth).map(|n| alphabet_max(n) as u128 + 1).product()
    }

    /// All words of length `depth` in lexicographic order.
    pub fn words(&self) -> Result<Vec<Vec<u32>>> {
        let count = self.word_count();
        if count > MAX_WORDS as u128 {
            return Err(Error::Depth(format!(
                "depth {} has {count} words, above the cap of {MAX_WORDS}",
                self.depth
            )));
        }
        let mut out: Vec<Vec<u32>> = vec![Vec::new()];
        for n in 1..=self.depth {
            let top = alphabet_max(n) as u32;
            let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
            for w in &out {
                for s in 0..=top {
                    let mut v = w.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// The radius `r_n = eps_n 2^{-i_n}` attached to a word at level `n`.
    pub fn nondensity_radius(&self, word: &[u32], n: usize) -> f64 {
        pow2(-self.eps_exp[n - 1] - word[n - 1] as i64)
    }

    /// Covering centres for `B(w, 2r)` by three balls of radius `r`, following the
    /// doubling argument. Returns `None` when the construction is undefined
    /// (coarsest level with `k = 1`, or `r` finer than the truncation).
    pub fn doubling_centres(&self, w: &[u32], r: f64) -> Option<Vec<Vec<u32>>> {
        if !(r > 0.0) || r >= 1.0 {
            return None;
        }
        // eps_{n+1} <= r < eps_n
        let n = (1..=self.depth).find(|&n| {
            let next = pow2(-self.eps_exp[n - 1] - alphabet_max(n) as i64);
            next <= r && r < self.eps(n)
        })?;
        let lr = r.log2() - self.log2_eps(n);
        // 2^{-k} eps_n <= r < 2^{-k+1} eps_n
        let mut k = (-lr).ceil() as i64;
        if pow2(-self.eps_exp[n - 1] - k) > r {
            k += 1;
        }
        if pow2(-self.eps_exp[n - 1] - k + 1) <= r {
            k -= 1;
        }
        let mut a = w.to_vec();
        let mut b = w.to_vec();
        if k > 1 {
            a[n - 1] = 0;
            b[n - 1] = (k - 1) as u32;
        } else {
            if n < 2 {
                return None;
            }
            a[n - 2] = 0;
            b[n - 2] = alphabet_max(n - 1) as u32;
        }
        Some(vec![w.to_vec(), a, b])
    }
}
