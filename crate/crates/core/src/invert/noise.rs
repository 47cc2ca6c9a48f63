use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::ScalarGrid3;

/// Factor `τ_{ijk}` uniform on `[−τ, τ]`, drawn from a counter-based stream
/// keyed by `(seed, i, j, k)`: the draw for a node never depends on which
/// other nodes were drawn before it.
pub fn noise_factor(seed: u64, idx: [usize; 3], tau: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx[0] as u64);
    // two 32-bit words per draw; j and k are far below 2^31
    rng.set_word_pos((((idx[1] as u128) << 32) | idx[2] as u128) << 1);
    tau * (2.0 * rng.gen::<f64>() - 1.0)
}

/// Multiplicative noise `ξ^τ = ξ + τ_{ijk} ξ`, so `‖ξ^τ − ξ‖∞ ≤ τ‖ξ‖∞`.
pub fn synth_noise(xi: &ScalarGrid3, tau: f64, seed: u64) -> Result<ScalarGrid3> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::domain(format!("noise level {tau} must be non-negative")));
    }
    if tau == 0.0 {
        return Ok(xi.clone());
    }
    let g = xi.geometry();
    let values = xi
        .values
        .iter()
        .enumerate()
        .map(|(n, v)| v * (1.0 + noise_factor(seed, g.unravel(n), tau)))
        .collect();
    ScalarGrid3::new(g, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Geometry;
    use crate::C64;

    fn field() -> ScalarGrid3 {
        let g = Geometry::new([0.0; 3], [0.1; 3], [5, 6, 7]).unwrap();
        ScalarGrid3::from_fn(g, |x| C64::new(1.0 + x.x, x.y - x.z))
    }

    #[test]
    fn zero_level_is_identity() {
        assert_eq!(synth_noise(&field(), 0.0, 3).unwrap(), field());
        assert!(synth_noise(&field(), -0.1, 3).is_err());
    }

    #[test]
    fn pointwise_bound_and_spread() {
        let xi = field();
        let noisy = synth_noise(&xi, 0.05, 11).unwrap();
        let mut lo: f64 = 1.0;
        let mut hi: f64 = -1.0;
        for (a, b) in xi.values.iter().zip(&noisy.values) {
            if a.norm() > 0.0 {
                let r = (b - a).norm() / a.norm();
                assert!(r <= 0.05 + 1e-15);
                let t = ((b - a) / a).re;
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        // 210 uniform draws cover most of [−τ, τ]
        assert!(lo < -0.04 && hi > 0.04);
    }

    #[test]
    fn keyed_by_index_not_order() {
        let g = field().geometry();
        let forward: Vec<f64> = (0..g.len()).map(|n| noise_factor(5, g.unravel(n), 0.1)).collect();
        let mut order: Vec<usize> = (0..g.len()).collect();
        order.reverse();
        order.rotate_left(17);
        for n in order {
            assert_eq!(noise_factor(5, g.unravel(n), 0.1), forward[n]);
        }
        assert_ne!(noise_factor(6, [0, 0, 0], 0.1), noise_factor(5, [0, 0, 0], 0.1));
        assert_ne!(noise_factor(5, [0, 0, 1], 0.1), noise_factor(5, [0, 1, 0], 0.1));
    }
}
