//! Configuration-driven trichotomy sweeps with machine-readable CSV output.
//!
//! A sweep solves the mixed problem on `Ω_ε` for every `(α, ε)` pair of the
//! grid plus one unperturbed reference per mesh rule, and emits one CSV row
//! per eigenvalue. Cells are independent and may run in parallel
//! (`STEKLOV_THREADS` caps the worker count); rows are buffered and written
//! in a deterministic order regardless of completion order, and all floats
//! are printed with 17 significant digits so the files round-trip exactly.

use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::geometry::{DomainSpec, GeometryError, ProfileKind, ProfileSpec};
use crate::mesh::{Mesh, MeshError, MeshResolution};
use crate::perturb::LimitDescriptor;
use crate::problem::{solve_steklov_with, SolverConfig, SteklovError, SteklovMode};

/// Fixed, versioned CSV schema.
pub const CSV_HEADER: &str = "alpha,eps,n,mu_eps,mu0,c_b,predicted,ratio,residual,dofs,ms";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid sweep grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("reference solve failed: {0}")]
    Reference(#[from] SteklovError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The sweep grid and solver knobs.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub profile: ProfileKind,
    pub amplitude: f64,
    pub alphas: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub n_modes: usize,
    pub nx_per_period: usize,
    pub rows: usize,
    pub tol: f64,
    pub out: Option<String>,
    pub seed: u64,
    /// When false (the default) the `ms` column prints 0, keeping reruns
    /// byte-identical.
    pub timings: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            profile: ProfileKind::TriangleWave,
            amplitude: 1.0,
            alphas: vec![2.0, 1.0, 0.5],
            eps_list: vec![0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0],
            n_modes: 2,
            nx_per_period: 8,
            rows: 64,
            tol: 1e-9,
            out: None,
            seed: 42,
            timings: false,
        }
    }
}

impl SweepConfig {
    /// Parses a flat `key = value` file (`#` starts a comment). Unknown
    /// keys are errors; omitted keys keep their defaults.
    pub fn parse(text: &str) -> Result<SweepConfig, SweepError> {
        let mut config = SweepConfig::default();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SweepError::Config { line: index + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "profile" => config.profile = parse_profile(value).map_err(err)?,
                "amplitude" => config.amplitude = parse_num(value).map_err(err)?,
                "alphas" => config.alphas = parse_list(value).map_err(err)?,
                "eps" => config.eps_list = parse_list(value).map_err(err)?,
                "n_modes" => config.n_modes = parse_num::<usize>(value).map_err(err)?,
                "nx_per_period" => config.nx_per_period = parse_num(value).map_err(err)?,
                "rows" => config.rows = parse_num(value).map_err(err)?,
                "tol" => config.tol = parse_num(value).map_err(err)?,
                "out" => config.out = Some(value.to_string()),
                "seed" => config.seed = parse_num(value).map_err(err)?,
                "timings" => config.timings = parse_num(value).map_err(err)?,
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.n_modes < 1 {
            return Err(SweepError::Grid("n_modes must be at least 1".into()));
        }
        if self.alphas.is_empty() || self.eps_list.is_empty() {
            return Err(SweepError::Grid("alphas and eps must be nonempty".into()));
        }
        for &eps in &self.eps_list {
            let periods = 1.0 / eps;
            if eps <= 0.0 || (periods - periods.round()).abs() > 1e-9 * periods {
                return Err(SweepError::Grid(format!(
                    "eps = {eps} does not divide the unit width into whole periods"
                )));
            }
        }
        Ok(())
    }

    pub fn profile_spec(&self) -> ProfileSpec {
        ProfileSpec { kind: self.profile, amplitude: self.amplitude }
    }

    /// Columns of the ε = 0 reference mesh: the per-period rule applied to
    /// the finest ε of the grid, so the reference matches the finest cell.
    pub fn reference_nx(&self) -> usize {
        let min_eps = self.eps_list.iter().cloned().fold(f64::INFINITY, f64::min);
        let periods = (1.0 / min_eps).round() as usize;
        self.nx_per_period * periods
    }
}

fn parse_profile(value: &str) -> Result<ProfileKind, String> {
    match value {
        "triangle" | "triangle-wave" => Ok(ProfileKind::TriangleWave),
        "raised-cosine" | "cosine" => Ok(ProfileKind::RaisedCosine),
        "zero" | "flat" => Ok(ProfileKind::Zero),
        other => Err(format!("unknown profile {other:?}")),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse {value:?}"))
}

fn parse_list(value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(|v| parse_num(v.trim())).collect()
}

/// One CSV row: eigenvalue `n` of the mixed problem on `Ω_ε`, its
/// unperturbed reference, and the regime prediction. Reference rows carry
/// `alpha = eps = 0`; failed cells carry `n = -1` and NaN values.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub alpha: f64,
    pub eps: f64,
    pub n: i64,
    pub mu_eps: f64,
    pub mu0: f64,
    pub c_b: f64,
    pub predicted: f64,
    pub ratio: Option<f64>,
    pub residual: f64,
    pub dofs: usize,
    pub ms: u128,
}

/// Round-trip-exact float formatting (17 significant digits).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            format_float(self.alpha),
            format_float(self.eps),
            self.n,
            format_float(self.mu_eps),
            format_float(self.mu0),
            format_float(self.c_b),
            format_float(self.predicted),
            self.ratio.map(format_float).unwrap_or_default(),
            format_float(self.residual),
            self.dofs,
            self.ms,
        )
    }
}

pub fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for record in records {
        out.push_str(&record.to_csv_row());
        out.push('\n');
    }
    out
}

struct CellOutcome {
    records: Vec<SweepRecord>,
    error: Option<String>,
}

/// Runs the sweep; returns rows in deterministic order (reference rows
/// first, then α outer, ε inner, mode index innermost). Solver errors
/// abort only their own cell, recorded as an `n = -1` row.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>, SweepError> {
    config.validate()?;
    let profile = config.profile_spec();
    let c_b = profile.c_b();
    let solver = SolverConfig { n_modes: config.n_modes, tol: config.tol };

    // unperturbed reference, one per mesh rule
    let start = Instant::now();
    let flat = DomainSpec::unperturbed(1.0, 1.0);
    let mesh = Mesh::build_strip(&flat, &MeshResolution::new(config.reference_nx(), config.rows))?;
    let dofs = mesh.n_vertices();
    let reference = solve_steklov_with(&Arc::new(mesh), SteklovMode::Mixed, solver)?;
    let reference_ms = elapsed_ms(start, config.timings);

    let mut records: Vec<SweepRecord> = (0..config.n_modes)
        .map(|n| SweepRecord {
            alpha: 0.0,
            eps: 0.0,
            n: n as i64,
            mu_eps: reference.lambdas[n],
            mu0: reference.lambdas[n],
            c_b,
            predicted: reference.lambdas[n],
            ratio: Some(1.0),
            residual: reference.residuals[n],
            dofs,
            ms: reference_ms,
        })
        .collect();

    let cells: Vec<(f64, f64)> = config
        .alphas
        .iter()
        .flat_map(|&alpha| config.eps_list.iter().map(move |&eps| (alpha, eps)))
        .collect();

    let run_cell = |&(alpha, eps): &(f64, f64)| -> CellOutcome {
        let start = Instant::now();
        let outcome = solve_cell(config, &reference.lambdas, c_b, alpha, eps, solver);
        match outcome {
            Ok(mut records) => {
                let ms = elapsed_ms(start, config.timings);
                for r in &mut records {
                    r.ms = ms;
                }
                CellOutcome { records, error: None }
            }
            Err(message) => CellOutcome {
                records: vec![SweepRecord {
                    alpha,
                    eps,
                    n: -1,
                    mu_eps: f64::NAN,
                    mu0: f64::NAN,
                    c_b,
                    predicted: f64::NAN,
                    ratio: None,
                    residual: f64::NAN,
                    dofs: 0,
                    ms: elapsed_ms(start, config.timings),
                }],
                error: Some(message),
            },
        }
    };

    let outcomes: Vec<CellOutcome> = match thread_pool() {
        Some(pool) => pool.install(|| {
            use rayon::prelude::*;
            cells.par_iter().map(run_cell).collect()
        }),
        None => {
            use rayon::prelude::*;
            cells.par_iter().map(run_cell).collect()
        }
    };

    for (cell, outcome) in cells.iter().zip(outcomes) {
        if let Some(message) = outcome.error {
            eprintln!("cell (alpha = {}, eps = {}) failed: {message}", cell.0, cell.1);
        }
        records.extend(outcome.records);
    }
    Ok(records)
}

fn solve_cell(
    config: &SweepConfig,
    mu0: &[f64],
    c_b: f64,
    alpha: f64,
    eps: f64,
    solver: SolverConfig,
) -> Result<Vec<SweepRecord>, String> {
    let profile = config.profile_spec();
    let domain = DomainSpec::new(1.0, 1.0, alpha, eps, profile).map_err(|e| e.to_string())?;
    let resolution = MeshResolution::per_period(&domain, config.nx_per_period, config.rows)
        .map_err(|e| e.to_string())?;
    let mesh = Arc::new(Mesh::build_strip(&domain, &resolution).map_err(|e| e.to_string())?);
    let dofs = mesh.n_vertices();
    let spectrum =
        solve_steklov_with(&mesh, SteklovMode::Mixed, solver).map_err(|e| e.to_string())?;
    let limit = LimitDescriptor::new(&domain);
    Ok((0..config.n_modes)
        .map(|n| {
            let predicted = limit.predicted_limit(mu0[n]);
            SweepRecord {
                alpha,
                eps,
                n: n as i64,
                mu_eps: spectrum.lambdas[n],
                mu0: mu0[n],
                c_b,
                predicted,
                ratio: limit.ratio_defined().then(|| spectrum.lambdas[n] / predicted),
                residual: spectrum.residuals[n],
                dofs,
                ms: 0,
            }
        })
        .collect())
}

fn elapsed_ms(start: Instant, timings: bool) -> u128 {
    if timings {
        start.elapsed().as_millis()
    } else {
        0
    }
}

/// Worker pool honoring `STEKLOV_THREADS`; `None` means rayon's default.
fn thread_pool() -> Option<rayon::ThreadPool> {
    let threads: usize = std::env::var("STEKLOV_THREADS").ok()?.parse().ok()?;
    rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().ok()
}

/// Connecting-map diagnostics table: `‖E_ε u‖_ε` against its predicted
/// limit (`‖u‖_0` for α > 1, `‖u‖_γ` at α = 1), plus the Jacobian
/// certificate, for `u` the interpolant of `x₁ + x₂`.
#[derive(Debug, Clone)]
pub struct EmapRecord {
    pub alpha: f64,
    pub eps: f64,
    pub norm_e: f64,
    pub target: f64,
    pub gap: f64,
    pub jacobian_min: f64,
    pub jacobian_max: f64,
}

pub const EMAP_HEADER: &str = "alpha,eps,norm_e,target,gap,jac_min,jac_max";

impl EmapRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            format_float(self.alpha),
            format_float(self.eps),
            format_float(self.norm_e),
            format_float(self.target),
            format_float(self.gap),
            format_float(self.jacobian_min),
            format_float(self.jacobian_max),
        )
    }
}

pub fn emap_to_csv(records: &[EmapRecord]) -> String {
    let mut out = String::from(EMAP_HEADER);
    out.push('\n');
    for record in records {
        out.push_str(&record.to_csv_row());
        out.push('\n');
    }
    out
}

/// Runs the connecting-map study over an `(α, ε)` grid.
///
/// Meshes follow the `h ≤ ε²` rule (grid spacing at most ε² in both
/// directions), which keeps the nodal-transport error beneath the
/// perturbation signal.
pub fn run_emap(
    alphas: &[f64],
    eps_list: &[f64],
    k_hat: f64,
    profile: ProfileSpec,
) -> Result<Vec<EmapRecord>, SweepError> {
    use crate::fem::{fe_norms, EdgeWeight, FeFunction};
    use crate::mesh::TagSet;
    use crate::perturb::{apply_e, ConnectingMap, Regime};

    let flat_mesh = Arc::new(Mesh::build_strip(
        &DomainSpec::unperturbed(1.0, 1.0),
        &MeshResolution::new(64, 64),
    )?);
    let u = FeFunction::interpolate(Arc::clone(&flat_mesh), |p| p[0] + p[1]);
    let norm0 = fe_norms(&u, TagSet::ALL, &EdgeWeight::One)
        .map_err(SteklovError::from)?
        .combined;

    let mut records = Vec::new();
    for &alpha in alphas {
        for &eps in eps_list {
            let domain = DomainSpec::new(1.0, 1.0, alpha, eps, profile)?;
            let limit = LimitDescriptor::new(&domain);
            let target = match limit.regime {
                Regime::Critical => {
                    let weight = EdgeWeight::PerTag { gamma: limit.c_b, sigma: 1.0 };
                    fe_norms(&u, TagSet::ALL, &weight).map_err(SteklovError::from)?.combined
                }
                _ => norm0,
            };
            let map = ConnectingMap::new(&domain, k_hat)
                .map_err(|e| SweepError::Grid(e.to_string()))?;
            let resolution = emap_resolution(&domain)?;
            let eps_mesh = Arc::new(Mesh::build_strip(&domain, &resolution)?);
            let transported =
                apply_e(&u, &eps_mesh, &map).map_err(|e| SweepError::Grid(e.to_string()))?;
            let norm_e = fe_norms(&transported, TagSet::ALL, &EdgeWeight::One)
                .map_err(SteklovError::from)?
                .combined;
            let certificate = map.certificate();
            records.push(EmapRecord {
                alpha,
                eps,
                norm_e,
                target,
                gap: (norm_e - target).abs(),
                jacobian_min: certificate.min_det,
                jacobian_max: certificate.max_det,
            });
        }
    }
    Ok(records)
}

/// The `h ≤ ε²` mesh rule: grid spacing at most ε², columns still honoring
/// the kink-resolution requirement.
pub fn emap_resolution(domain: &DomainSpec) -> Result<MeshResolution, SweepError> {
    let periods = domain
        .periods()
        .ok_or_else(|| SweepError::Grid(format!("w/eps = {} not integral", 1.0 / domain.eps)))?
        as usize;
    let spacing = domain.eps * domain.eps;
    let needed = (1.0 / spacing).ceil() as usize;
    let step = 2 * periods;
    let nx = needed.div_ceil(step) * step;
    let nx = nx.max(8 * periods);
    let rows = needed.max(8);
    Ok(MeshResolution::new(nx, rows))
}
