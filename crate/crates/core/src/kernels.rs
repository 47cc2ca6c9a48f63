//! Helmholtz fundamental solution and the `1 + r` radial basis.
//!
//! Green's identity turns the volume potential of each basis atom into a
//! surface integral over a sphere plus its particular solution.

use std::borrow::Cow;
use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quad::{sphere_rule, sphere_rule_about_pole, SphereRule};
use crate::{C64, Vec3};

/// Radius below which the particular solution switches to its Taylor series.
pub const R_TINY: f64 = 1e-4;

/// Relative distance to a boundary sphere below which regular surface
/// quadrature is refused.
pub const D_MIN_RATIO: f64 = 0.05;

/// Default relative offset of the exterior point used in boundary-limit mode.
pub const BOUNDARY_OFFSET: f64 = 0.1;

/// `Φ_ω(x, y) = e^{iω|x-y|} / (4π|x-y|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmKernel {
    pub omega: f64,
}

impl HelmKernel {
    pub fn new(omega: f64) -> Self {
        assert!(omega > 0.0, "frequency must be positive");
        Self { omega }
    }

    pub fn phi(&self, x: &Vec3, y: &Vec3) -> Result<C64> {
        let r = (x - y).norm();
        if r == 0.0 {
            return Err(Error::Coincident([x.x, x.y, x.z]));
        }
        Ok(self.phi_r(r))
    }

    #[inline]
    pub(crate) fn phi_r(&self, r: f64) -> C64 {
        C64::from_polar(1.0 / (4.0 * PI * r), self.omega * r)
    }

    /// `∂Φ_ω(x, y)/∂ν(y)` for a unit normal `nu` at `y`.
    pub fn phi_normal_deriv(&self, x: &Vec3, y: &Vec3, nu: &Vec3) -> Result<C64> {
        let d = y - x;
        let r = d.norm();
        if r == 0.0 {
            return Err(Error::Coincident([x.x, x.y, x.z]));
        }
        Ok(self.phi_and_normal_deriv(r, d.dot(nu)).1)
    }

    /// `(Φ, ∂_νΦ)` from `r = |y - x|` and `(y - x)·ν`.
    #[inline]
    pub(crate) fn phi_and_normal_deriv(&self, r: f64, d_dot_nu: f64) -> (C64, C64) {
        let phase = C64::from_polar(1.0, self.omega * r);
        let inv = 1.0 / (4.0 * PI * r);
        let phi = phase * inv;
        let radial = phase * C64::new(-1.0, self.omega * r) * (inv / (r * r));
        (phi, radial * d_dot_nu)
    }
}

/// Radial basis atom `f_k(x) = 1 + |x - x_k|` at frequency `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfAtom {
    pub center: Vec3,
    pub omega: f64,
}

impl RbfAtom {
    pub fn new(center: Vec3, omega: f64) -> Self {
        Self { center, omega }
    }

    pub fn value(&self, x: &Vec3) -> f64 {
        1.0 + (x - self.center).norm()
    }

    /// `f̂_k`, the real particular solution of `Δf̂ + ω²f̂ = f_k`.
    pub fn particular(&self, x: &Vec3) -> f64 {
        particular_radial(self.omega, (x - self.center).norm()).0
    }

    pub fn particular_grad(&self, x: &Vec3) -> Vec3 {
        let d = x - self.center;
        let r = d.norm();
        if r == 0.0 {
            return Vec3::zeros();
        }
        d * (particular_radial(self.omega, r).1 / r)
    }
}

/// `(f̂(r), f̂'(r))` with
/// `f̂(r) = (1 + r)/ω² - 2(1 - cos ωr)/(ω⁴ r)`.
///
/// The removable singularity at `r = 0` is handled by a four-term Taylor
/// expansion of the cosine quotient for `r < R_TINY`.
pub fn particular_radial(omega: f64, r: f64) -> (f64, f64) {
    let w2 = omega * omega;
    if r < R_TINY {
        let wr2 = w2 * r * r;
        let value = 1.0 / w2 + r.powi(3) * (1.0 / 12.0 - wr2 / 360.0 + wr2 * wr2 / 20160.0);
        let deriv = r * r * (0.25 - wr2 / 72.0 + wr2 * wr2 / 2880.0);
        return (value, deriv);
    }
    let w4 = w2 * w2;
    let s = (omega * r).sin();
    let one_minus_cos = 2.0 * (0.5 * omega * r).sin().powi(2);
    let value = (1.0 + r) / w2 - 2.0 * one_minus_cos / (w4 * r);
    let deriv = 1.0 / w2 - 2.0 * (omega * r * s - one_minus_cos) / (w4 * r * r);
    (value, deriv)
}

/// How the target point relates to the boundary sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceMode {
    /// Target off the surface by at least `D_MIN_RATIO · radius`.
    Interior,
    /// Target on the surface; evaluated through an exterior point offset by
    /// `offset · radius` along the outward radial direction.
    BoundaryLimit { offset: f64 },
}

/// Integrand `Φ ∂_ν f̂ - ∂_νΦ f̂` at one surface node.
#[inline]
fn green_integrand(kernel: &HelmKernel, atom: &RbfAtom, x: &Vec3, y: &Vec3, nu: &Vec3) -> C64 {
    let d = y - x;
    let r = d.norm();
    let (phi, dphi) = kernel.phi_and_normal_deriv(r, d.dot(nu));
    let fhat = atom.particular(y);
    let dfhat = atom.particular_grad(y).dot(nu);
    phi * dfhat - dphi * fhat
}

/// `𝒥(x) = ∮ [Φ_ω(x,y) ∂_ν f̂(y) - ∂_νΦ_ω(x,y) f̂(y)] dσ(y)`.
///
/// Interior mode integrates with `boundary` directly and refuses targets
/// closer than `D_MIN_RATIO · radius` to the surface. Boundary-limit mode
/// returns the on-surface (principal value) integral: the exterior limit,
/// taken at `x̃ = c + (1 + offset) r (x - c)/|x - c|` with a pole-graded rule,
/// plus the double-layer jump `f̂(x)/2`.
pub fn green_surface_integral(
    atom: &RbfAtom,
    boundary: &SphereRule,
    x: &Vec3,
    mode: SurfaceMode,
) -> Result<C64> {
    let kernel = HelmKernel::new(atom.omega);
    match mode {
        SurfaceMode::Interior => {
            let dist = boundary.distance_to(x);
            let threshold = D_MIN_RATIO * boundary.radius;
            if dist < threshold * (1.0 - 1e-9) {
                return Err(Error::NearSingular {
                    distance: dist,
                    radius: boundary.radius,
                    threshold,
                });
            }
            Ok(boundary.integrate(|y, nu| green_integrand(&kernel, atom, x, y, nu)))
        }
        SurfaceMode::BoundaryLimit { offset } => {
            if offset <= 0.0 {
                return Err(Error::domain("boundary-limit offset must be positive"));
            }
            let radial = x - boundary.center;
            let rn = radial.norm();
            if rn == 0.0 || (rn - boundary.radius).abs() > 1e-9 * boundary.radius.max(1.0) {
                return Err(Error::domain("boundary-limit target must lie on the boundary sphere"));
            }
            let dir = radial / rn;
            let x_out = boundary.center + dir * (boundary.radius * (1.0 + offset));
            let order = graded_order_for(offset, boundary_order(boundary));
            let rule = sphere_rule_about_pole(order, boundary.center, boundary.radius, &dir);
            let exterior = rule.integrate(|y, nu| green_integrand(&kernel, atom, &x_out, y, nu));
            Ok(exterior + 0.5 * atom.particular(x))
        }
    }
}

/// Recover `N` from a `2N²`-node product rule.
fn boundary_order(rule: &SphereRule) -> usize {
    (((rule.len() / 2) as f64).sqrt().round() as usize).max(1)
}

/// Polar order that resolves a near-singularity at relative distance `d`.
fn graded_order_for(d: f64, base: usize) -> usize {
    let needed = (6.0 / d.max(1e-3).sqrt()).ceil() as usize;
    base.max(needed).min(96)
}

/// A boundary sphere together with the policy for choosing a surface rule
/// per target: the shared product rule far from the surface, a pole-graded
/// rule aligned with the target when it comes close.
#[derive(Debug, Clone)]
pub struct BoundarySurface {
    pub rule: SphereRule,
    pub near_ratio: f64,
    pub near_order: usize,
}

impl BoundarySurface {
    pub fn new(order: usize, center: Vec3, radius: f64) -> Self {
        Self {
            rule: sphere_rule(order, center, radius),
            near_ratio: 0.5,
            near_order: (2 * order).max(24),
        }
    }

    pub fn center(&self) -> Vec3 {
        self.rule.center
    }

    pub fn radius(&self) -> f64 {
        self.rule.radius
    }

    /// Guard against targets on or too near the surface.
    pub fn check_target(&self, x: &Vec3) -> Result<()> {
        let dist = self.rule.distance_to(x);
        let threshold = D_MIN_RATIO * self.rule.radius;
        if dist < threshold * (1.0 - 1e-9) {
            return Err(Error::NearSingular {
                distance: dist,
                radius: self.rule.radius,
                threshold,
            });
        }
        Ok(())
    }

    fn is_near(&self, x: &Vec3) -> bool {
        self.rule.distance_to(x) < self.near_ratio * self.rule.radius
    }

    fn graded_rule(&self, x: &Vec3) -> SphereRule {
        let dir = x - self.rule.center;
        let rel = self.rule.distance_to(x) / self.rule.radius;
        let order = graded_order_for(rel, self.near_order);
        sphere_rule_about_pole(order, self.rule.center, self.rule.radius, &dir)
    }

    /// Surface rule suited to a target: the shared rule when far, a graded
    /// rule centred on the target's radial direction when near.
    pub fn rule_for(&self, x: &Vec3) -> Cow<'_, SphereRule> {
        if self.is_near(x) {
            Cow::Owned(self.graded_rule(x))
        } else {
            Cow::Borrowed(&self.rule)
        }
    }

    /// `𝒥` for one atom at one target, choosing the rule by proximity.
    pub fn integral(&self, atom: &RbfAtom, x: &Vec3) -> Result<C64> {
        self.check_target(x)?;
        let kernel = HelmKernel::new(atom.omega);
        let value = if self.is_near(x) {
            self.graded_rule(x)
                .integrate(|y, nu| green_integrand(&kernel, atom, x, y, nu))
        } else {
            self.rule.integrate(|y, nu| green_integrand(&kernel, atom, x, y, nu))
        };
        Ok(value)
    }

    /// Matrix `J[i][ℓ] = 𝒥_ℓ(targets[i])` over all atoms centred at
    /// `atom_centers`. Targets using the shared rule are evaluated through
    /// two dense products; near targets get their own graded rule.
    pub fn matrix(&self, targets: &[Vec3], atom_centers: &[Vec3], omega: f64) -> Result<DMatrix<C64>> {
        for x in targets {
            self.check_target(x)?;
        }
        let kernel = HelmKernel::new(omega);
        let n_a = atom_centers.len();
        let mut out = DMatrix::<C64>::zeros(targets.len(), n_a);

        let (far, near): (Vec<usize>, Vec<usize>) =
            (0..targets.len()).partition(|&i| !self.is_near(&targets[i]));

        if !far.is_empty() {
            let rows: Vec<Vec3> = far.iter().map(|&i| targets[i]).collect();
            let block = shared_rule_matrix(&kernel, &self.rule, &rows, atom_centers);
            for (bi, &i) in far.iter().enumerate() {
                for l in 0..n_a {
                    out[(i, l)] = block[(bi, l)];
                }
            }
        }
        for &i in &near {
            let x = targets[i];
            let rule = self.graded_rule(&x);
            let row = single_target_row(&kernel, &rule, &x, atom_centers);
            for (l, v) in row.into_iter().enumerate() {
                out[(i, l)] = v;
            }
        }
        Ok(out)
    }
}

/// Particular solution values and normal derivatives at every rule node for
/// every atom: `(f̂, ∂_ν f̂)` as `nodes × atoms` real matrices.
pub(crate) fn particular_on_rule(
    rule: &SphereRule,
    atom_centers: &[Vec3],
    omega: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = rule.len();
    let n_a = atom_centers.len();
    let mut fh = DMatrix::<f64>::zeros(m, n_a);
    let mut dfh = DMatrix::<f64>::zeros(m, n_a);
    for (l, c) in atom_centers.iter().enumerate() {
        for (j, (y, nu)) in rule.points.iter().zip(&rule.normals).enumerate() {
            let d = y - c;
            let r = d.norm();
            let (v, dv) = particular_radial(omega, r);
            fh[(j, l)] = v;
            dfh[(j, l)] = if r > 0.0 { dv * d.dot(nu) / r } else { 0.0 };
        }
    }
    (fh, dfh)
}

/// Weighted kernels `[w Φ(x_i, y_j) | -w ∂_νΦ(x_i, y_j)]` as real and
/// imaginary `targets × 2·nodes` matrices.
pub(crate) fn kernel_rows(
    kernel: &HelmKernel,
    rule: &SphereRule,
    targets: &[Vec3],
) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = rule.len();
    let mut re = DMatrix::<f64>::zeros(targets.len(), 2 * m);
    let mut im = DMatrix::<f64>::zeros(targets.len(), 2 * m);
    for (i, x) in targets.iter().enumerate() {
        for (j, ((y, nu), &w)) in rule.points.iter().zip(&rule.normals).zip(&rule.weights).enumerate() {
            let d = y - x;
            let r = d.norm();
            let (phi, dphi) = kernel.phi_and_normal_deriv(r, d.dot(nu));
            re[(i, j)] = w * phi.re;
            im[(i, j)] = w * phi.im;
            re[(i, m + j)] = -w * dphi.re;
            im[(i, m + j)] = -w * dphi.im;
        }
    }
    (re, im)
}

/// Stack `[∂_ν f̂; f̂]` into one `2·nodes × atoms` matrix matching [`kernel_rows`].
pub(crate) fn stacked_particular(rule: &SphereRule, atom_centers: &[Vec3], omega: f64) -> DMatrix<f64> {
    let (fh, dfh) = particular_on_rule(rule, atom_centers, omega);
    let m = rule.len();
    let mut stacked = DMatrix::<f64>::zeros(2 * m, atom_centers.len());
    stacked.rows_mut(0, m).copy_from(&dfh);
    stacked.rows_mut(m, m).copy_from(&fh);
    stacked
}

pub(crate) fn shared_rule_matrix(
    kernel: &HelmKernel,
    rule: &SphereRule,
    targets: &[Vec3],
    atom_centers: &[Vec3],
) -> DMatrix<C64> {
    let (k_re, k_im) = kernel_rows(kernel, rule, targets);
    let stacked = stacked_particular(rule, atom_centers, kernel.omega);
    let re = &k_re * &stacked;
    let im = &k_im * &stacked;
    DMatrix::from_fn(targets.len(), atom_centers.len(), |i, l| C64::new(re[(i, l)], im[(i, l)]))
}

fn single_target_row(kernel: &HelmKernel, rule: &SphereRule, x: &Vec3, atom_centers: &[Vec3]) -> Vec<C64> {
    let weighted: Vec<(C64, C64)> = rule
        .points
        .iter()
        .zip(&rule.normals)
        .zip(&rule.weights)
        .map(|((y, nu), &w)| {
            let d = y - x;
            let (phi, dphi) = kernel.phi_and_normal_deriv(d.norm(), d.dot(nu));
            (phi * w, dphi * w)
        })
        .collect();
    atom_centers
        .iter()
        .map(|c| {
            let mut acc = C64::new(0.0, 0.0);
            for ((y, nu), (phi, dphi)) in rule.points.iter().zip(&rule.normals).zip(&weighted) {
                let d = y - c;
                let r = d.norm();
                let (v, dv) = particular_radial(kernel.omega, r);
                let dn = if r > 0.0 { dv * d.dot(nu) / r } else { 0.0 };
                acc += phi * dn - dphi * v;
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{ball_rule_about, sphere_rule};

    fn omega1() -> f64 {
        crate::eigensys::omega_1()
    }

    #[test]
    fn phi_magnitude_and_static_limit() {
        let k = HelmKernel::new(1e-12);
        let x = Vec3::zeros();
        let y = Vec3::new(0.0, 0.6, 0.8);
        assert!((k.phi(&x, &y).unwrap() - C64::new(1.0 / (4.0 * PI), 0.0)).norm() < 1e-12);
        let k = HelmKernel::new(3.7);
        let y = Vec3::new(0.3, -0.2, 0.5);
        let r = y.norm();
        assert!((k.phi(&x, &y).unwrap().norm() - 1.0 / (4.0 * PI * r)).abs() < 1e-15);
        assert!(matches!(k.phi(&y, &y), Err(Error::Coincident(_))));
        assert!(k.phi_normal_deriv(&y, &y, &Vec3::z()).is_err());
    }

    #[test]
    fn phi_normal_derivative_matches_finite_difference() {
        let k = HelmKernel::new(omega1());
        let x = Vec3::new(0.1, 0.2, -0.1);
        let y = Vec3::new(0.6, -0.3, 0.4);
        let nu = Vec3::new(1.0, 2.0, -0.5).normalize();
        let h = 1e-5;
        let fd = (k.phi(&x, &(y + nu * h)).unwrap() - k.phi(&x, &(y - nu * h)).unwrap()) / (2.0 * h);
        let an = k.phi_normal_deriv(&x, &y, &nu).unwrap();
        assert!((fd - an).norm() < 1e-8, "{fd} vs {an}");
    }

    #[test]
    fn particular_solution_limits() {
        let w = omega1();
        let (v0, d0) = particular_radial(w, 0.0);
        assert!((v0 - 1.0 / (w * w)).abs() < 1e-15);
        assert_eq!(d0, 0.0);
        let (v1, _) = particular_radial(w, 1.0);
        let direct = 2.0 / (w * w) - 2.0 * (1.0 - w.cos()) / w.powi(4);
        assert!((v1 - direct).abs() < 1e-14);
        // series and closed form agree across the switch radius
        for &r in &[0.9 * R_TINY, R_TINY, 1.1 * R_TINY, 3e-4] {
            let (a, da) = particular_radial(w, r);
            let w2 = w * w;
            let closed = (1.0 + r) / w2 - 2.0 * (1.0 - (w * r).cos()) / (w2 * w2 * r);
            assert!((a - closed).abs() < 1e-11, "r={r}");
            assert!((da - 0.25 * r * r).abs() < 1e-9);
        }
    }

    #[test]
    fn surface_integral_interior_guard() {
        let atom = RbfAtom::new(Vec3::new(0.1, 0.0, 0.0), omega1());
        let rule = sphere_rule(20, Vec3::zeros(), 1.0);
        let x = Vec3::new(0.0, 0.0, 0.97);
        assert!(matches!(
            green_surface_integral(&atom, &rule, &x, SurfaceMode::Interior),
            Err(Error::NearSingular { .. })
        ));
    }

    #[test]
    fn green_identity_for_centered_atom() {
        // x_k = x = 0: volume side is ∫₀¹ e^{iωr} r (1 + r) dr
        let w = omega1();
        let atom = RbfAtom::new(Vec3::zeros(), w);
        let rule = sphere_rule(20, Vec3::zeros(), 1.0);
        let x = Vec3::zeros();
        let j = green_surface_integral(&atom, &rule, &x, SurfaceMode::Interior).unwrap();
        let lhs = j - atom.particular(&x);
        // antiderivative of e^{iωr}(r + r²)
        let i = C64::new(0.0, 1.0);
        let a = i * w;
        let prim = |r: f64| -> C64 {
            let e = (a * r).exp();
            e * ((r + r * r) / a - (1.0 + 2.0 * r) / (a * a) + 2.0 / (a * a * a))
        };
        let exact = prim(1.0) - prim(0.0);
        assert!((lhs - exact).norm() / exact.norm() < 1e-10, "{lhs} vs {exact}");
    }

    #[test]
    fn green_identity_off_center() {
        let w = omega1();
        let kernel = HelmKernel::new(w);
        let rule = sphere_rule(20, Vec3::zeros(), 1.0);
        let atom = RbfAtom::new(Vec3::new(0.3, -0.2, 0.1), w);
        let x = Vec3::new(-0.2, 0.25, 0.3);
        let j = green_surface_integral(&atom, &rule, &x, SurfaceMode::Interior).unwrap();
        let vol = ball_rule_about(48, 32, Vec3::zeros(), 1.0, x).unwrap();
        let oracle: C64 = vol.integrate(|y| kernel.phi_r((y - x).norm()) * atom.value(y));
        let lhs = j - atom.particular(&x);
        assert!((lhs - oracle).norm() / oracle.norm() < 1e-4, "{lhs} vs {oracle}");
    }

    #[test]
    fn exterior_target_sees_only_the_volume_potential() {
        let w = omega1();
        let kernel = HelmKernel::new(w);
        let z = Vec3::new(0.2, 0.3, 0.6);
        let eps = 0.01;
        let rule = sphere_rule(20, z, eps);
        let atom = RbfAtom::new(Vec3::new(-0.1, 0.1, 0.2), w);
        let x = Vec3::new(0.25, 0.3, 0.62);
        let j = green_surface_integral(&atom, &rule, &x, SurfaceMode::Interior).unwrap();
        let vol = crate::quad::ball_rule(16, 16, z, eps);
        let oracle: C64 = vol.integrate(|y| kernel.phi_r((y - x).norm()) * atom.value(y));
        assert!((j - oracle).norm() / oracle.norm() < 1e-8, "{j} vs {oracle}");
        // magnitude of the droplet integral is O(ε³) here, far below area × sup
        let sup = 1.0 / (4.0 * PI * 0.01);
        assert!(j.norm() < 4.0 * PI * eps * eps * sup);
    }

    #[test]
    fn linear_in_particular_solution() {
        let w = omega1();
        let rule = sphere_rule(12, Vec3::zeros(), 1.0);
        let atom = RbfAtom::new(Vec3::new(0.1, 0.1, 0.1), w);
        let x = Vec3::new(0.2, -0.3, 0.1);
        let kernel = HelmKernel::new(w);
        let single = rule.integrate(|y, nu| green_integrand(&kernel, &atom, &x, y, nu));
        let doubled = rule.integrate(|y, nu| green_integrand(&kernel, &atom, &x, y, nu) * 2.0);
        assert!((doubled - single * 2.0).norm() < 1e-12 * single.norm().max(1.0));
    }

    #[test]
    fn boundary_limit_is_the_jump_average() {
        let w = omega1();
        let z = Vec3::new(0.2, 0.3, 0.6);
        let eps = 0.01;
        let rule = sphere_rule(20, z, eps);
        let atom = RbfAtom::new(Vec3::new(-0.1, 0.1, 0.2), w);
        let dir = Vec3::new(1.0, -1.0, 2.0).normalize();
        let x = z + dir * eps;
        let on = green_surface_integral(&atom, &rule, &x, SurfaceMode::BoundaryLimit { offset: 0.02 }).unwrap();

        // interior and exterior limits from the volume identity
        let kernel = HelmKernel::new(w);
        let vol = crate::quad::ball_rule(24, 24, z, eps);
        let exterior: C64 = vol.integrate(|y| kernel.phi_r((y - x).norm()) * atom.value(y));
        let expected = exterior + 0.5 * atom.particular(&x);
        assert!((on - expected).norm() / expected.norm() < 5e-2, "{on} vs {expected}");
    }

    #[test]
    fn boundary_limit_converges_as_offset_shrinks() {
        let w = omega1();
        let z = Vec3::new(0.0, 0.1, -0.2);
        let rule = sphere_rule(20, z, 0.01);
        let atom = RbfAtom::new(Vec3::new(0.3, 0.0, 0.1), w);
        let x = z + Vec3::new(0.0, 0.6, 0.8) * 0.01;
        let vals: Vec<C64> = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&o| green_surface_integral(&atom, &rule, &x, SurfaceMode::BoundaryLimit { offset: o }).unwrap())
            .collect();
        let diffs: Vec<f64> = vals.windows(2).map(|p| (p[1] - p[0]).norm()).collect();
        assert!(diffs[1] < diffs[0] && diffs[2] < diffs[1], "{diffs:?}");
    }

    #[test]
    fn boundary_matrix_matches_pointwise_integrals() {
        let w = omega1();
        let surf = BoundarySurface::new(16, Vec3::zeros(), 1.0);
        let targets = vec![Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.0, 0.9, 0.0), Vec3::new(-0.6, 0.1, 0.6)];
        let centers = vec![Vec3::new(0.3, 0.1, 0.0), Vec3::new(-0.5, 0.2, 0.1)];
        let m = surf.matrix(&targets, &centers, w).unwrap();
        for (i, x) in targets.iter().enumerate() {
            for (l, c) in centers.iter().enumerate() {
                let v = surf.integral(&RbfAtom::new(*c, w), x).unwrap();
                assert!((m[(i, l)] - v).norm() < 1e-12 * v.norm().max(1.0));
            }
        }
    }
}
