//! Smooth RBF model of k0 from scattered samples.

use droplet_probe::forward::MediumField;
use droplet_probe::invert::fit_k0_rbf;
use droplet_probe::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> droplet_probe::Result<()> {
    let medium = MediumField::rational2();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut draw = || Vec3::from_fn(|_, _| rng.gen_range(-0.25..0.25));
    for n in [20, 80, 320] {
        let samples: Vec<(Vec3, f64)> = (0..n).map(|_| draw()).map(|x| (x, medium.k0(&x).re)).collect();
        let fit = fit_k0_rbf(&samples)?;
        let err = (0..500)
            .map(|_| draw())
            .map(|x| (fit.eval(&x) - medium.k0(&x).re).abs())
            .fold(0.0, f64::max);
        println!("{n:>4} samples: max off-sample error {err:.2e}");
    }
    Ok(())
}
