//! Mollified second derivative of sin(x) as δ shrinks, and under noise.

use droplet_probe::mollify::mollified_deriv_1d;
use droplet_probe::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> droplet_probe::Result<()> {
    let h = 0.0005;
    let xs: Vec<f64> = (0..4000).map(|i| i as f64 * h).collect();
    let clean: Vec<C64> = xs.iter().map(|x| C64::new(x.sin(), 0.0)).collect();
    for delta in [0.08, 0.04, 0.02] {
        let d = mollified_deriv_1d(&clean, h, delta, 2)?;
        let err = d.values.iter().enumerate().map(|(i, v)| (v.re + xs[i + d.offset].sin()).abs()).fold(0.0, f64::max);
        println!("delta {delta:<5} max |D2 - (-sin)| = {err:.2e}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for tau in [1e-4, 1e-3, 1e-2] {
        let noisy: Vec<C64> = clean.iter().map(|v| v * (1.0 + tau * (2.0 * rng.gen::<f64>() - 1.0))).collect();
        let d = mollified_deriv_1d(&noisy, h, 0.04, 2)?;
        let err = d.values.iter().enumerate().map(|(i, v)| (v.re + xs[i + d.offset].sin()).abs()).fold(0.0, f64::max);
        println!("tau {tau:<6} delta 0.04 max error {err:.2e}");
    }
    Ok(())
}
