//! Exponential shifts and seeded per-purpose random substreams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a random substream is used for. Part of the stream id so that
/// different consumers never share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    Hierarchy = 1,
    Decomposition = 2,
    Routing = 3,
    Generator = 4,
    Demand = 5,
    Pairs = 6,
}

/// A master seed from which independent ChaCha streams are split off,
/// one per `(purpose, level, copy)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substreams {
    seed: u64,
}

const COPY_BITS: u32 = 48;

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Substreams { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for one `(purpose, level, copy)`; `level < 256`, `copy < 2^48`.
    pub fn stream(&self, purpose: Purpose, level: usize, copy: u64) -> ChaCha8Rng {
        debug_assert!(level < 256);
        debug_assert!(copy < 1 << COPY_BITS);
        let id = (purpose as u64) << 56 | (level as u64 & 0xff) << COPY_BITS | copy;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }

    /// A statistically unrelated family, e.g. for the k-th rebuild attempt.
    pub fn derive(&self, k: u64) -> Substreams {
        Substreams { seed: splitmix64(self.seed ^ splitmix64(k.wrapping_add(0x5851_f42d))) }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-vertex head starts drawn from `Exp(mean)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftVector {
    delta: Vec<f64>,
    mean: f64,
}

impl ShiftVector {
    /// Wraps injected values (tests, replay). All entries must be finite and `>= 0`.
    pub fn from_values(delta: Vec<f64>, mean: f64) -> Result<Self> {
        check_scale(mean)?;
        if let Some(bad) = delta.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::InvalidParam(format!("negative or non-finite shift {bad}")));
        }
        Ok(ShiftVector { delta, mean })
    }

    pub fn values(&self) -> &[f64] {
        &self.delta
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.delta.iter().copied().fold(0.0, f64::max)
    }
}

pub(crate) fn check_scale(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidScale(d))
    }
}

/// Inverse CDF of `Exp(mean)` at `u in (0, 1]`.
pub fn exp_inverse_cdf(u: f64, mean: f64) -> f64 {
    let x = -u.ln();
    if x <= 0.0 {
        0.0
    } else {
        x * mean
    }
}

/// Draws `n` independent `Exp(mean)` values.
pub fn sample_shifts<R: Rng + ?Sized>(rng: &mut R, n: usize, mean: f64) -> Result<ShiftVector> {
    check_scale(mean)?;
    let delta = (0..n)
        .map(|_| {
            // gen::<f64>() is in [0, 1); flip it onto (0, 1].
            let u = 1.0 - rng.gen::<f64>();
            exp_inverse_cdf(u, mean)
        })
        .collect();
    Ok(ShiftVector { delta, mean })
}

/// Shift cap `9 * mean * ln n`; `None` for `n < 2`, where no cap applies.
pub fn shift_cap(n: usize, mean: f64) -> Option<f64> {
    (n >= 2).then(|| 9.0 * mean * (n as f64).ln())
}

pub(crate) const RESAMPLE_BUDGET: usize = 32;

/// Like [`sample_shifts`] but redraws the whole vector until every entry is
/// at most [`shift_cap`].
pub fn sample_capped_shifts<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    mean: f64,
) -> Result<ShiftVector> {
    let cap = shift_cap(n, mean);
    for _ in 0..RESAMPLE_BUDGET {
        let s = sample_shifts(rng, n, mean)?;
        if cap.is_none_or(|c| s.max() <= c) {
            return Ok(s);
        }
    }
    Err(Error::ResampleBudget { what: "shift cap", budget: RESAMPLE_BUDGET })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_at_one_is_zero() {
        assert_eq!(exp_inverse_cdf(1.0, 3.0), 0.0);
        assert!(exp_inverse_cdf(f64::MIN_POSITIVE, 1.0) > 700.0);
    }

    #[test]
    fn rejects_nonpositive_scale() {
        let mut rng = Substreams::new(1).stream(Purpose::Decomposition, 0, 0);
        assert!(matches!(sample_shifts(&mut rng, 3, 0.0), Err(Error::InvalidScale(_))));
        assert!(matches!(sample_shifts(&mut rng, 3, -1.0), Err(Error::InvalidScale(_))));
    }

    #[test]
    fn empirical_mean() {
        let mut rng = Substreams::new(7).stream(Purpose::Decomposition, 0, 0);
        let s = sample_shifts(&mut rng, 100_000, 1.0).unwrap();
        let mean = s.values().iter().sum::<f64>() / s.len() as f64;
        // 3 sigma = 3 / sqrt(1e5) ~ 0.0095
        assert!((0.99..=1.01).contains(&mean), "mean {mean}");
        assert!(s.values().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn scaling_by_power_of_two_is_exact() {
        let streams = Substreams::new(42);
        let one = sample_shifts(&mut streams.stream(Purpose::Decomposition, 2, 5), 500, 1.0).unwrap();
        let four = sample_shifts(&mut streams.stream(Purpose::Decomposition, 2, 5), 500, 4.0).unwrap();
        for (a, b) in one.values().iter().zip(four.values()) {
            assert_eq!(4.0 * a, *b);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let s = Substreams::new(9);
        let draw = |mut r: ChaCha8Rng| (0..4).map(|_| r.gen()).collect::<Vec<u64>>();
        let a = draw(s.stream(Purpose::Hierarchy, 3, 1));
        assert_eq!(a, draw(s.stream(Purpose::Hierarchy, 3, 1)));
        assert_ne!(a[0], a[1]);
        let x: u64 = s.stream(Purpose::Hierarchy, 3, 2).gen();
        let y: u64 = s.stream(Purpose::Hierarchy, 4, 1).gen();
        let z: u64 = s.derive(1).stream(Purpose::Hierarchy, 3, 1).gen();
        assert_ne!(a[0], x);
        assert_ne!(a[0], y);
        assert_ne!(a[0], z);
    }

    #[test]
    fn capped_shifts_respect_cap() {
        let mut rng = Substreams::new(3).stream(Purpose::Decomposition, 1, 0);
        for _ in 0..50 {
            let s = sample_capped_shifts(&mut rng, 4, 2.0).unwrap();
            assert!(s.max() <= shift_cap(4, 2.0).unwrap());
        }
        assert_eq!(shift_cap(1, 2.0), None);
    }
}
