//! Newtonian-potential eigen table and the contrast constants it implies.

use droplet_probe::eigensys::{contrast_constant, eigen_table};

fn main() -> droplet_probe::Result<()> {
    println!("{:>2} {:>10} {:>10} {:>11} {:>10} {:>12}", "n", "mu", "lambda", "omega^2", "int e", "C_n(0.01)");
    for m in eigen_table(5)? {
        println!(
            "{:>2} {:>10.4} {:>10.4} {:>11.4} {:>10.4} {:>12.4e}",
            m.n,
            m.mu,
            m.lambda,
            m.omega_sq,
            m.e_integral,
            contrast_constant(m.n, 0.01, 0.95)?
        );
    }
    Ok(())
}
