//! Reproducible vertex-label streams.
//!
//! Labels come from ChaCha8 keyed by a 64-bit seed, with the 64-bit ChaCha
//! stream id selecting one of 2^64 independent sequences. Uniform labels use
//! rand's integer `Uniform`, which rejects out-of-zone draws and has no
//! modulo bias.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An endless iterator of labels uniform on `0..m`.
#[derive(Debug, Clone)]
pub struct VertexStream {
    rng: ChaCha8Rng,
    dist: Uniform<u32>,
}

impl VertexStream {
    pub fn new(seed: u64, stream: u64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("vertex count M must be at least 1"));
        }
        let m = u32::try_from(m).map_err(|_| Error::config("vertex count M exceeds u32"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let dist = Uniform::new(0, m).map_err(|e| Error::config(e.to_string()))?;
        Ok(Self { rng, dist })
    }
}

impl Iterator for VertexStream {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        Some(self.dist.sample(&mut self.rng))
    }
}

/// The first `n` labels of stream `(seed, stream)` over `0..m`.
pub fn vertex_stream(seed: u64, stream: u64, m: usize, n: usize) -> Result<Vec<u32>> {
    Ok(VertexStream::new(seed, stream, m)?.take(n).collect())
}

/// Stream id of shard `shard` under a caller-chosen base stream.
///
/// Unique for `base < 2^40` and `shard < 2^24`.
pub fn shard_stream(base: u64, shard: usize) -> u64 {
    (base << 24).wrapping_add(shard as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_in_range() {
        let v = vertex_stream(42, 0, 3, 5).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.iter().all(|&g| g < 3));
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            vertex_stream(42, 0, 3, 500).unwrap(),
            vertex_stream(42, 0, 3, 500).unwrap()
        );
    }

    #[test]
    fn streams_differ() {
        let a = vertex_stream(42, 0, 3, 1000).unwrap();
        let b = vertex_stream(42, 1, 3, 1000).unwrap();
        assert!(a.iter().zip(&b).any(|(x, y)| x != y));
    }

    #[test]
    fn zero_vertices_rejected() {
        assert!(matches!(
            vertex_stream(1, 0, 0, 3),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn roughly_uniform() {
        let n = 60_000;
        let mut counts = [0usize; 3];
        for g in VertexStream::new(7, 3, 3).unwrap().take(n) {
            counts[g as usize] += 1;
        }
        for c in counts {
            // binomial sd is ~115
            assert!((c as f64 - 20_000.0).abs() < 600.0, "{counts:?}");
        }
    }

    #[test]
    fn single_vertex_stream_is_all_zero() {
        assert!(vertex_stream(9, 9, 1, 100).unwrap().iter().all(|&g| g == 0));
    }
}
