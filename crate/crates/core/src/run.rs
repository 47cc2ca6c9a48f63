//! Command drivers behind the `droplet-probe` binary.
//!
//! Each driver validates its config before computing anything and writes
//! into an [`OutDir`] that never overwrites. Every artifact carries the config
//! hash. JSON reports have a `config_sha256` field and CSVs start with a
//! `# config_sha256=` comment line. Binary grids are listed with their own
//! digests in the JSON report that produced them. Wall-clock data goes
//! only to `run.log`, so all other artifacts are byte-identical across
//! reruns of the same config.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{OutDir, RunConfig};
use crate::eigensys::{eigen_table, EigenMode};
use crate::error::{Error, Result};
use crate::forward::manufactured::{self, ManufacturedReport};
use crate::grid::{Geometry, Grid3, GridValue, RealGrid3, ScalarGrid3};
use crate::invert::{
    exact_k0, metrics, reconstruct_k0, refine, synth_noise, ContrastScanner, Metrics, Reconstruction,
};
use crate::Vec3;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// File written by a command, with its digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRef {
    pub name: String,
    pub sha256: String,
}

/// Wall-clock sidecar; the only place timestamps appear.
#[derive(Debug, Default)]
pub struct RunLog {
    lines: Vec<String>,
    start: Option<Instant>,
}

impl RunLog {
    pub fn start(command: &str, config_hash: &str) -> Self {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            lines: vec![format!("command={command} config_sha256={config_hash} started_unix={now}")],
            start: Some(Instant::now()),
        }
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        let t = self.start.map(|s| s.elapsed().as_secs_f64()).unwrap_or(0.0);
        self.lines.push(format!("[{t:10.3}s] {}", msg.into()));
    }

    pub fn finish(mut self, out: &OutDir) -> Result<PathBuf> {
        self.note("done");
        out.write("run.log", (self.lines.join("\n") + "\n").as_bytes())
    }
}

fn write_grid<T: GridValue>(out: &OutDir, name: &str, g: &Grid3<T>) -> Result<ArtifactRef> {
    let bytes = g.to_bytes();
    out.write(name, &bytes)?;
    Ok(ArtifactRef {
        name: name.to_string(),
        sha256: sha256_hex(&bytes),
    })
}

fn write_json<T: Serialize>(out: &OutDir, name: &str, value: &T) -> Result<ArtifactRef> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    bytes.push(b'\n');
    out.write(name, &bytes)?;
    Ok(ArtifactRef {
        name: name.to_string(),
        sha256: sha256_hex(&bytes),
    })
}

fn csv_bytes(hash: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut buf = format!("# config_sha256={hash}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let fail = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(header).map_err(fail)?;
        for r in rows {
            w.write_record(&r).map_err(fail)?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(buf)
}

/// Fixed-point with 12 significant digits.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (11 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `n,mu,lambda,omega_sq,e_integral` rows for the first `n_max` modes.
pub fn eig_table_csv(n_max: usize, config_hash: &str) -> Result<(Vec<EigenMode>, Vec<u8>)> {
    if n_max == 0 {
        return Err(Error::domain("n-max must be at least 1"));
    }
    let modes = eigen_table(n_max)?;
    let rows = modes.iter().map(|m| {
        vec![
            m.n.to_string(),
            sig12(m.mu),
            sig12(m.lambda),
            sig12(m.omega_sq),
            sig12(m.e_integral),
        ]
    });
    let bytes = csv_bytes(config_hash, &["n", "mu", "lambda", "omega_sq", "e_integral"], rows)?;
    Ok((modes, bytes))
}

/// Pass thresholds of the manufactured checks.
#[derive(Debug, Clone, Serialize)]
pub struct ForwardThresholds {
    pub unperturbed_l2: f64,
    pub unperturbed_sphere_rms: f64,
    pub perturbed_l2: f64,
    pub perturbed_sphere_rms: f64,
}

impl Default for ForwardThresholds {
    fn default() -> Self {
        Self {
            unperturbed_l2: 0.08,
            unperturbed_sphere_rms: 0.1,
            perturbed_l2: 0.1,
            perturbed_sphere_rms: 0.01,
        }
    }
}

/// Which manufactured check to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ForwardCase {
    Unperturbed,
    Perturbed,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub case: ForwardCase,
    pub report: ManufacturedReport,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForwardValidation {
    pub config_sha256: String,
    pub config: RunConfig,
    pub thresholds: ForwardThresholds,
    pub cases: Vec<CaseResult>,
}

impl ForwardValidation {
    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    /// `case,n,seed,l2_error,sphere_radius,sphere_max,sphere_rms`, one row per probe sphere.
    pub fn csv(&self) -> Result<Vec<u8>> {
        let rows = self.cases.iter().flat_map(|c| {
            let r = &c.report;
            let case = match c.case {
                ForwardCase::Unperturbed => "unperturbed",
                ForwardCase::Perturbed => "perturbed",
            };
            r.spheres.iter().map(move |s| {
                vec![
                    case.to_string(),
                    r.n.to_string(),
                    r.seed.to_string(),
                    format!("{}", r.l2_error),
                    format!("{}", s.radius),
                    format!("{}", s.max),
                    format!("{}", s.rms),
                ]
            })
        });
        csv_bytes(
            &self.config_sha256,
            &["case", "n", "seed", "l2_error", "sphere_radius", "sphere_max", "sphere_rms"],
            rows,
        )
    }
}

/// Manufactured checks at the configured collocation; `None` runs both.
pub fn validate_forward(cfg: &RunConfig, case: Option<ForwardCase>) -> Result<ForwardValidation> {
    cfg.validate()?;
    let omega = cfg.omega()?;
    let theta = cfg.theta_vec();
    let c = &cfg.collocation;
    let th = ForwardThresholds::default();
    let rms_ok = |r: &ManufacturedReport, t: f64| r.spheres.iter().all(|s| s.rms <= t);
    let wanted = match case {
        Some(k) => vec![k],
        None => vec![ForwardCase::Unperturbed, ForwardCase::Perturbed],
    };
    let mut cases = Vec::new();
    for k in wanted {
        let (report, pass) = match k {
            ForwardCase::Unperturbed => {
                let (r, _) = manufactured::run_unperturbed(c.n, c.seed, &c.layout, omega, &theta, cfg.orders)?;
                let ok = r.l2_error <= th.unperturbed_l2 && rms_ok(&r, th.unperturbed_sphere_rms);
                (r, ok)
            }
            ForwardCase::Perturbed => {
                let (r, _) = manufactured::run_perturbed(
                    c.n,
                    c.seed,
                    &c.perturbed_layout,
                    omega,
                    &theta,
                    cfg.droplet.eps,
                    cfg.orders,
                )?;
                let ok = r.l2_error <= th.perturbed_l2 && rms_ok(&r, th.perturbed_sphere_rms);
                (r, ok)
            }
        };
        cases.push(CaseResult { case: k, report, pass });
    }
    Ok(ForwardValidation {
        config_sha256: cfg.hash(),
        config: cfg.clone(),
        thresholds: th,
        cases,
    })
}

/// Report of a contrast scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config_sha256: String,
    pub config: RunConfig,
    pub omega: f64,
    /// `v^∞(−θ)` as `[re, im]`.
    pub reference_far_field: [f64; 2],
    pub dims: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub grid: ArtifactRef,
}

/// Scans the configured plan and returns `ξ` with its report.
pub fn scan(cfg: &RunConfig, progress: bool) -> Result<(ScalarGrid3, ScanReport)> {
    cfg.validate()?;
    let medium = cfg.medium.build()?;
    let omega = cfg.omega()?;
    let settings = cfg.scan_settings()?;
    let geo = cfg.plan.scan_geometry()?;
    let region = cfg.plan.region()?;
    let scanner = ContrastScanner::new(
        &medium,
        cfg.droplet,
        [Vec3::from(region[0]), Vec3::from(region[1])],
        omega,
        &cfg.theta_vec(),
        &settings,
    )?;
    let done = AtomicUsize::new(0);
    let total = geo.len();
    let tick = || {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if k % (total / 20).max(1) == 0 || k == total {
            eprintln!("scan: {k}/{total}");
        }
    };
    let xi = scanner.scan(&geo, progress.then_some(&tick as &(dyn Fn() + Sync)))?;
    let v = scanner.reference();
    let report = ScanReport {
        config_sha256: cfg.hash(),
        config: cfg.clone(),
        omega,
        reference_far_field: [v.re, v.im],
        dims: geo.dims,
        origin: geo.origin,
        spacing: geo.spacing,
        grid: ArtifactRef {
            name: "xi.xig".into(),
            sha256: sha256_hex(&xi.to_bytes()),
        },
    };
    Ok((xi, report))
}

pub fn write_scan(out: &OutDir, xi: &ScalarGrid3, report: &ScanReport) -> Result<()> {
    let grid = write_grid(out, &report.grid.name, xi)?;
    debug_assert_eq!(grid, report.grid);
    write_json(out, "scan.json", report)?;
    Ok(())
}

/// Per-τ reconstruction summary written by `invert`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub config_sha256: String,
    pub config: RunConfig,
    pub tau: f64,
    pub omega: f64,
    pub delta: f64,
    /// Metrics over every valid node of the δ-interior.
    pub interior: MetricsRecord,
    /// Metrics on the reported `x₃` plane, when the plan has one.
    pub slice: Option<MetricsRecord>,
    pub slice_x3: Option<f64>,
    pub valid_fraction: f64,
    pub imag_residual_max: f64,
    pub dims: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub k0_num: ArtifactRef,
    pub k0_imag_residual: ArtifactRef,
    pub pre: ArtifactRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub gre: f64,
    pub pre_max: f64,
    pub pre_mean: f64,
    pub n_valid: usize,
    pub n_total: usize,
}

impl From<Metrics> for MetricsRecord {
    fn from(m: Metrics) -> Self {
        Self {
            gre: m.gre,
            pre_max: m.pre_max,
            pre_mean: m.pre_mean,
            n_valid: m.n_valid,
            n_total: m.n_total,
        }
    }
}

/// Everything `invert` computes for one noise level.
#[derive(Debug, Clone)]
pub struct InversionResult {
    pub tau: f64,
    pub reconstruction: Reconstruction,
    pub exact: RealGrid3,
    pub pre: RealGrid3,
    pub interior: Metrics,
    pub slice: Option<Metrics>,
}

/// Index of the plane `x₃ = x3` in a geometry, if it is a node.
pub fn plane_index(g: &Geometry, x3: f64) -> Option<usize> {
    g.nearest(2, x3).filter(|&k| (g.coord(2, k) - x3).abs() < 1e-9)
}

fn slice_of(g: &Geometry, k: usize) -> Result<Geometry> {
    g.crop([0, 0, k], [g.dims[0], g.dims[1], 1])
}

/// Full inversion of `xi` at one noise level, with metrics.
pub fn invert_one(cfg: &RunConfig, xi: &ScalarGrid3, tau: f64) -> Result<InversionResult> {
    let medium = cfg.medium.build()?;
    let omega = cfg.omega()?;
    let noisy = synth_noise(xi, tau, cfg.noise_seed)?;
    let fine = refine(&noisy, cfg.plan.refine_factor, cfg.spline_end)?;
    let rec = reconstruct_k0(&fine, cfg.delta, omega, cfg.xi_floor)?;
    let exact = exact_k0(&medium, rec.geometry());
    let (interior, pre) = metrics(&rec, &exact)?;
    let slice = match cfg.plan.slice_x3.and_then(|x3| plane_index(&rec.geometry(), x3)) {
        None => None,
        Some(k) => {
            let sl = slice_of(&rec.geometry(), k)?;
            let sub = Reconstruction {
                k0_num: rec.k0_num.restrict(&sl)?,
                k0_imag_residual: rec.k0_imag_residual.restrict(&sl)?,
                valid: plane_mask(&rec.valid, &rec.geometry(), k),
            };
            Some(metrics(&sub, &exact.restrict(&sl)?)?.0)
        }
    };
    Ok(InversionResult {
        tau,
        reconstruction: rec,
        exact,
        pre,
        interior,
        slice,
    })
}

fn plane_mask(valid: &[bool], g: &Geometry, k: usize) -> Vec<bool> {
    (0..g.dims[0])
        .flat_map(|i| (0..g.dims[1]).map(move |j| valid[g.index(i, j, k)]))
        .collect()
}

/// File-name tag for a noise level, e.g. `tau0.05`.
pub fn tau_tag(tau: f64) -> String {
    format!("tau{tau}")
}

/// Runs every configured noise level on `xi` and writes per-τ artifacts.
pub fn invert(cfg: &RunConfig, xi: &ScalarGrid3, out: &OutDir) -> Result<Vec<ReconstructionReport>> {
    cfg.validate()?;
    let omega = cfg.omega()?;
    let mut reports = Vec::new();
    for tau in cfg.sorted_taus() {
        let r = invert_one(cfg, xi, tau)?;
        let tag = tau_tag(tau);
        let g = r.reconstruction.geometry();
        let k0_num = write_grid(out, &format!("k0_{tag}.xig"), &r.reconstruction.k0_num)?;
        let k0_imag = write_grid(out, &format!("k0_imag_{tag}.xig"), &r.reconstruction.k0_imag_residual)?;
        let pre = write_grid(out, &format!("pre_{tag}.xig"), &r.pre)?;
        let report = ReconstructionReport {
            config_sha256: cfg.hash(),
            config: cfg.clone(),
            tau,
            omega,
            delta: cfg.delta,
            interior: r.interior.clone().into(),
            slice: r.slice.clone().map(Into::into),
            slice_x3: cfg.plan.slice_x3,
            valid_fraction: r.reconstruction.valid_fraction(),
            imag_residual_max: r
                .reconstruction
                .k0_imag_residual
                .values
                .iter()
                .filter(|v| v.is_finite())
                .fold(0.0, |a: f64, b| a.max(*b)),
            dims: g.dims,
            origin: g.origin,
            spacing: g.spacing,
            k0_num,
            k0_imag_residual: k0_imag,
            pre,
        };
        write_json(out, &format!("reconstruction_{tag}.json"), &report)?;
        reports.push(report);
    }
    Ok(reports)
}

/// Reads the contrast grid named by the config.
pub fn load_input(cfg: &RunConfig) -> Result<ScalarGrid3> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::domain("no input grid given (set `input` or pass --input)"))?;
    if !path.is_file() {
        return Err(Error::Io {
            path: path.clone(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "input grid not found"),
        });
    }
    Ok(crate::grid::AnyGrid::read(path)?.into_complex())
}

/// Comparison table and slice exports across reconstruction reports.
pub fn report(inputs: &[PathBuf], out: &OutDir) -> Result<Vec<PathBuf>> {
    if inputs.is_empty() {
        return Err(Error::domain("report needs at least one reconstruction report"));
    }
    let mut loaded = Vec::new();
    for p in inputs {
        let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        let r: ReconstructionReport =
            serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
        loaded.push((p.clone(), r));
    }
    let first = &loaded[0].1;
    for (p, r) in &loaded[1..] {
        if r.dims != first.dims || r.origin != first.origin || r.spacing != first.spacing {
            return Err(Error::Grid(format!("{} has a different grid geometry", p.display())));
        }
    }
    loaded.sort_by(|a, b| a.1.tau.total_cmp(&b.1.tau));
    let hash = combined_hash(loaded.iter().map(|(_, r)| r.config_sha256.as_str()));

    let mut header = vec!["metric".to_string()];
    header.extend(loaded.iter().map(|(_, r)| format!("tau={}", r.tau)));
    let metric_rows: [(&str, fn(&ReconstructionReport) -> f64); 8] = [
        ("gre_slice", |r| r.slice.as_ref().map_or(f64::NAN, |m| m.gre)),
        ("pre_max_slice", |r| r.slice.as_ref().map_or(f64::NAN, |m| m.pre_max)),
        ("pre_mean_slice", |r| r.slice.as_ref().map_or(f64::NAN, |m| m.pre_mean)),
        ("gre_interior", |r| r.interior.gre),
        ("pre_max_interior", |r| r.interior.pre_max),
        ("pre_mean_interior", |r| r.interior.pre_mean),
        ("valid_fraction", |r| r.valid_fraction),
        ("imag_residual_max", |r| r.imag_residual_max),
    ];
    let rows = metric_rows.iter().map(|(name, f)| {
        let mut row = vec![name.to_string()];
        row.extend(loaded.iter().map(|(_, r)| format!("{}", f(r))));
        row
    });
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut written = vec![out.write("gre_table.csv", &csv_bytes(&hash, &header_refs, rows)?)?];

    for (path, r) in &loaded {
        let Some(x3) = r.slice_x3 else { continue };
        let dir = path.parent().unwrap_or(Path::new("."));
        let k0 = RealGrid3::read(&dir.join(&r.k0_num.name))?;
        let pre = RealGrid3::read(&dir.join(&r.pre.name))?;
        let Some(k) = plane_index(&k0.geometry(), x3) else { continue };
        let medium = r.config.medium.build()?;
        let g = k0.geometry();
        let rows = (0..g.dims[0]).flat_map(|i| {
            let (k0, pre, medium) = (&k0, &pre, &medium);
            (0..g.dims[1]).map(move |j| {
                let x = g.point([i, j, k]);
                vec![
                    format!("{}", x.x),
                    format!("{}", x.y),
                    format!("{}", medium.k0(&x).re),
                    format!("{}", k0.get(i, j, k)),
                    format!("{}", pre.get(i, j, k)),
                ]
            })
        });
        let bytes = csv_bytes(&r.config_sha256, &["x1", "x2", "k0_exact", "k0_num", "pre"], rows)?;
        written.push(out.write(&format!("slice_{}.csv", tau_tag(r.tau)), &bytes)?);
    }
    Ok(written)
}

fn combined_hash<'a>(hashes: impl Iterator<Item = &'a str>) -> String {
    let mut all: Vec<&str> = hashes.collect();
    all.dedup();
    if all.len() == 1 {
        all[0].to_string()
    } else {
        sha256_hex(all.join(",").as_bytes())
    }
}

/// `validate_forward.json` and `validate_forward.csv`.
pub fn write_validation(out: &OutDir, v: &ForwardValidation) -> Result<ArtifactRef> {
    out.write("validate_forward.csv", &v.csv()?)?;
    write_json(out, "validate_forward.json", v)
}

/// Writes the eigen table into `out` as `eig_table.csv`.
pub fn write_eig_table(out: &OutDir, bytes: &[u8]) -> Result<PathBuf> {
    out.write("eig_table.csv", bytes)
}
