//! Scan and reconstruction on a small slab of the rational2 medium.
//!
//! `cargo run --release --example pipeline -- [half-width] [points]`

use std::time::Instant;

use droplet_probe::config::RunConfig;
use droplet_probe::invert::CubePlan;
use droplet_probe::run;

fn main() -> droplet_probe::Result<()> {
    let mut args = std::env::args().skip(1);
    let half: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(25);
    let cfg = RunConfig {
        plan: CubePlan {
            half,
            n,
            slice_x3: Some(0.0),
            slab_half_planes: 6,
            ..CubePlan::default()
        },
        taus: vec![0.0, 1e-4],
        ..RunConfig::default()
    };
    cfg.validate()?;
    let t = Instant::now();
    let (xi, report) = run::scan(&cfg, false)?;
    println!("scanned {:?} positions in {:.1?}; v_inf = {:?}", xi.geometry().dims, t.elapsed(), report.reference_far_field);
    for tau in cfg.sorted_taus() {
        let r = run::invert_one(&cfg, &xi, tau)?;
        let s = r.slice.expect("slice plane");
        println!(
            "tau {tau:<6} slice GRE {:.4}  PRE max {:.4}  interior GRE {:.4}",
            s.gre, s.pre_max, r.interior.gre
        );
    }
    Ok(())
}
