//! Manufactured-solution checks of both forward solvers.
//!
//! Run with `cargo run --release --example manufactured -- [n] [seed]`.

use std::time::Instant;

use droplet_probe::eigensys::omega_1;
use droplet_probe::forward::{default_theta, manufactured, Layout, QuadOrders};

fn main() -> droplet_probe::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let orders = QuadOrders::default();

    let t = Instant::now();
    let (rep, _) = manufactured::run_unperturbed(n, seed, &Layout::default(), omega_1(), &default_theta(), orders)?;
    println!("unperturbed: L2 = {:.4}  spheres = {:?}  far-field rel = {:.2e}  ({:.1?})",
        rep.l2_error, rep.spheres, rep.far_field_rel.unwrap_or(f64::NAN), t.elapsed());

    let t = Instant::now();
    let (rep, _) = manufactured::run_perturbed(n, seed, &Layout::perturbed(), omega_1(), &default_theta(), 0.01, orders)?;
    println!("perturbed:   L2 = {:.4}  spheres = {:?}  ({:.1?})", rep.l2_error, rep.spheres, t.elapsed());
    Ok(())
}
