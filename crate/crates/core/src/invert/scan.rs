use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{
    sample_collocation_with, CollocatedDroplet, Droplet, DropletContrast, Exclusion, Layout, MediumField, PerturbedBase, QuadOrders,
    UnperturbedSolver,
};
use crate::grid::{Geometry, ScalarGrid3};
use crate::{Vec3, C64};

/// Droplet parameters shared by every scan position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DropletTemplate {
    pub eps: f64,
    pub h: f64,
    pub kbar1: f64,
}

impl Default for DropletTemplate {
    fn default() -> Self {
        Self {
            eps: 0.01,
            h: 0.95,
            kbar1: 1.0,
        }
    }
}

impl DropletTemplate {
    pub fn at(&self, z: Vec3) -> Result<Droplet> {
        Droplet::with_params(z, self.eps, self.h, self.kbar1)
    }
}

/// Which far field plays the role of `v^∞` in `ξ = v^∞ − u_z^∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Perturbed system with a neutralized droplet. It shares every
    /// discretization choice with `u_z^∞`, so only the droplet's own signal
    /// survives the difference.
    NeutralizedDroplet,
    /// Separate solve of the unperturbed system on the same collocation set.
    Unperturbed,
}

/// How each droplet position is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropletModel {
    /// Full perturbed system with the field in `D_z` read off the atoms.
    Expansion,
    /// One collocated unknown at the droplet centre, far field by
    /// reciprocity. Smooth in `z`.
    Collocated,
}

/// Discretization of the per-position forward solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSettings {
    pub n_colloc: usize,
    pub seed: u64,
    pub layout: Layout,
    pub orders: QuadOrders,
    pub reference: Reference,
    pub droplet_model: DropletModel,
    /// Region kept free of collocation points, before dilation by `2ε`.
    /// Defaults to the bounding box of the scanned grid.
    pub exclusion_box: Option<[[f64; 3]; 2]>,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            n_colloc: 200,
            seed: 7,
            layout: Layout::perturbed(),
            orders: QuadOrders::default(),
            reference: Reference::NeutralizedDroplet,
            droplet_model: DropletModel::Collocated,
            exclusion_box: None,
        }
    }
}

/// Droplet-independent state of a contrast scan.
#[derive(Debug)]
pub struct ContrastScanner {
    base: PerturbedBase,
    collocated: Option<CollocatedDroplet>,
    template: DropletTemplate,
    v_inf: C64,
    region: [Vec3; 2],
}

impl ContrastScanner {
    /// Builds the shared collocation set (free of the dilated scan region)
    /// and solves for the reference far field once.
    pub fn new(
        medium: &MediumField,
        template: DropletTemplate,
        region: [Vec3; 2],
        omega: f64,
        theta: &Vec3,
        settings: &ScanSettings,
    ) -> Result<Self> {
        template.at(Vec3::zeros())?;
        let exclusion = Exclusion::scan_box(region[0], region[1], template.eps);
        let colloc = sample_collocation_with(settings.n_colloc, settings.seed, &settings.layout, &[exclusion])?;
        let base = PerturbedBase::new(medium, &colloc, omega, theta, settings.orders)?;
        let v_inf = match settings.reference {
            Reference::NeutralizedDroplet => {
                // The neutralized matrix does not depend on the droplet.
                let probe = template.at(Vec3::zeros())?;
                let sol = base.solve_with_matrix(base.base.clone(), None)?;
                base.far_field(&sol, &probe, DropletContrast::Neutralized)
            }
            Reference::Unperturbed => {
                let solver = UnperturbedSolver::new(medium, &colloc, omega, settings.orders)?;
                let sol = solver.solve(&base.theta, None)?;
                crate::forward::far_field_unperturbed(&sol, &-base.theta, settings.orders)
            }
        };
        let collocated = match settings.droplet_model {
            DropletModel::Expansion => None,
            DropletModel::Collocated => Some(CollocatedDroplet::new(&base)?),
        };
        Ok(Self {
            base,
            collocated,
            template,
            v_inf,
            region,
        })
    }

    /// Back-scattered reference far field `v^∞(−θ)`.
    pub fn reference(&self) -> C64 {
        self.v_inf
    }

    pub fn base(&self) -> &PerturbedBase {
        &self.base
    }

    /// `u_z^∞(−θ)` for a droplet centred at `z`.
    pub fn droplet_far_field(&self, z: &Vec3) -> Result<C64> {
        Ok(self.v_inf - self.xi(z)?)
    }

    /// `ξ(z) = v^∞(−θ) − u_z^∞(−θ)`.
    pub fn xi(&self, z: &Vec3) -> Result<C64> {
        let at = |e: Error| Error::AtPosition {
            center: [z.x, z.y, z.z],
            source: Box::new(e),
        };
        let droplet = self.template.at(*z).map_err(at)?;
        let inside = (0..3).all(|k| z[k] >= self.region[0][k] - 1e-12 && z[k] <= self.region[1][k] + 1e-12);
        if !inside {
            return Err(at(Error::domain("droplet centre lies outside the scan region")));
        }
        match &self.collocated {
            Some(c) => Ok(c.solve(&self.base, &droplet)?.contrast),
            None => {
                let sol = self.base.solve(&droplet, DropletContrast::Physical, None)?;
                Ok(self.v_inf - self.base.far_field(&sol, &droplet, DropletContrast::Physical))
            }
        }
    }

    /// Scans every node of `grid` in parallel. Results land in slots by
    /// index, so the output does not depend on scheduling. `progress` is
    /// called once per finished node.
    pub fn scan(&self, grid: &Geometry, progress: Option<&(dyn Fn() + Sync)>) -> Result<ScalarGrid3> {
        let slots: Vec<Result<C64>> = (0..grid.len())
            .into_par_iter()
            .map(|n| {
                let r = self.xi(&grid.point(grid.unravel(n)));
                if let Some(p) = progress {
                    p();
                }
                r
            })
            .collect();
        let values = slots.into_iter().collect::<Result<Vec<_>>>()?;
        ScalarGrid3::new(*grid, values)
    }
}

/// Checks that every node keeps its droplet inside `B(0,1)`.
pub fn check_scan_grid(grid: &Geometry, template: &DropletTemplate) -> Result<()> {
    for z in grid.points() {
        if z.norm() + template.eps >= 1.0 {
            return Err(Error::Droplet {
                center: [z.x, z.y, z.z],
                eps: template.eps,
                reason: "droplet leaves the unit ball".into(),
            });
        }
    }
    Ok(())
}

/// `ξ` on every node of `grid`: `v^∞` once, `u_z^∞` per node.
pub fn scan_contrast(
    medium: &MediumField,
    template: DropletTemplate,
    grid: &Geometry,
    omega: f64,
    theta: &Vec3,
    settings: &ScanSettings,
) -> Result<ScalarGrid3> {
    check_scan_grid(grid, &template)?;
    let region = match settings.exclusion_box {
        Some([lo, hi]) => [Vec3::from(lo), Vec3::from(hi)],
        None => [Vec3::from(grid.origin), Vec3::from(grid.upper())],
    };
    ContrastScanner::new(medium, template, region, omega, theta, settings)?.scan(grid, None)
}
