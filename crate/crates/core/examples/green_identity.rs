//! Volume potential of an RBF atom from its surface representation,
//! checked against brute-force ball quadrature.

use droplet_probe::eigensys::omega_1;
use droplet_probe::forward::QuadOrders;
use droplet_probe::kernels::{BoundarySurface, HelmKernel, RbfAtom};
use droplet_probe::quad::ball_rule_about;
use droplet_probe::{Vec3, C64};

fn main() -> droplet_probe::Result<()> {
    let w = omega_1();
    let kernel = HelmKernel::new(w);
    let surface = BoundarySurface::new(QuadOrders::default().sphere, Vec3::zeros(), 1.0);
    let atom = RbfAtom::new(Vec3::new(0.3, -0.2, 0.5), w);
    for x in [Vec3::zeros(), Vec3::new(-0.4, 0.1, 0.2), Vec3::new(0.0, 0.7, -0.5)] {
        let fast = surface.integral(&atom, &x)? - atom.particular(&x);
        let rule = ball_rule_about(48, 32, Vec3::zeros(), 1.0, x)?;
        let slow: C64 = rule.integrate(|y| kernel.phi(&x, y).unwrap() * atom.value(y));
        println!("x = {:?}: surface {fast:.6}  volume {slow:.6}  rel {:.1e}", [x.x, x.y, x.z], (fast - slow).norm() / slow.norm());
    }
    Ok(())
}
