//! Plain-text experiment configuration.
//!
//! Files hold one `key = value` pair per line; `#` starts a comment and
//! blank lines are skipped. Every key has a default, so an empty file (or
//! none at all) is a valid configuration. Unknown keys are errors.

use std::path::PathBuf;

use chebjac::{OrderingChoice, SolveOptions, SpectralBounds, StencilSpec};

use crate::Failure;

/// Model problems the harness can build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemId {
    Laplace2dNeumann,
    Poisson3dSphere,
    Poisson3dSphereOctant,
    Poisson2dExp,
}

impl ProblemId {
    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Laplace2dNeumann => "laplace2d-neumann",
            ProblemId::Poisson3dSphere => "poisson3d-sphere",
            ProblemId::Poisson3dSphereOctant => "poisson3d-sphere-octant",
            ProblemId::Poisson2dExp => "poisson2d-exp",
        }
    }

    pub fn dims(self) -> usize {
        match self {
            ProblemId::Laplace2dNeumann | ProblemId::Poisson2dExp => 2,
            _ => 3,
        }
    }
}

fn parse_problem(value: &str) -> Result<ProblemId, Failure> {
    match value {
        "laplace2d-neumann" => Ok(ProblemId::Laplace2dNeumann),
        "poisson3d-sphere" => Ok(ProblemId::Poisson3dSphere),
        "poisson3d-sphere-octant" => Ok(ProblemId::Poisson3dSphereOctant),
        "poisson2d-exp" => Ok(ProblemId::Poisson2dExp),
        other => Err(Failure::Config(format!(
            "unknown problem {other:?}; expected laplace2d-neumann, poisson3d-sphere, \
             poisson3d-sphere-octant, or poisson2d-exp"
        ))),
    }
}

/// Discretization selector; `Combo` reads the `combo_*` keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilChoice {
    FivePoint,
    SevenPoint,
    NinePoint,
    SeventeenPoint,
    Combo,
}

fn parse_stencil(value: &str) -> Result<StencilChoice, Failure> {
    match value {
        "five-point" => Ok(StencilChoice::FivePoint),
        "seven-point" => Ok(StencilChoice::SevenPoint),
        "nine-point" => Ok(StencilChoice::NinePoint),
        "seventeen-point" => Ok(StencilChoice::SeventeenPoint),
        "combo" => Ok(StencilChoice::Combo),
        other => Err(Failure::Config(format!(
            "unknown stencil {other:?}; expected five-point, seven-point, nine-point, \
             seventeen-point, or combo"
        ))),
    }
}

/// One entry of a method list. `Sor(None)` means the grid-size optimal
/// factor; `sor:<omega>` pins it.
#[derive(Clone, Debug, PartialEq)]
pub enum MethodSpec {
    Jacobi,
    GaussSeidel,
    Sor(Option<f64>),
    Cjm,
}

impl MethodSpec {
    /// File-safe name used for residual CSVs and summary rows.
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Jacobi => "jacobi".into(),
            MethodSpec::GaussSeidel => "gauss-seidel".into(),
            MethodSpec::Sor(None) => "sor-opt".into(),
            MethodSpec::Sor(Some(w)) => format!("sor-{w}"),
            MethodSpec::Cjm => "cjm".into(),
        }
    }
}

fn parse_method(token: &str) -> Result<MethodSpec, Failure> {
    if let Some(rest) = token.strip_prefix("sor:") {
        let w: f64 = rest
            .parse()
            .map_err(|e| Failure::Config(format!("bad relaxation factor {rest:?}: {e}")))?;
        return Ok(MethodSpec::Sor(Some(w)));
    }
    match token {
        "jacobi" => Ok(MethodSpec::Jacobi),
        "gauss-seidel" => Ok(MethodSpec::GaussSeidel),
        "sor" => Ok(MethodSpec::Sor(None)),
        "cjm" => Ok(MethodSpec::Cjm),
        other => Err(Failure::Config(format!(
            "unknown method {other:?}; expected jacobi, gauss-seidel, sor, sor:<omega>, or cjm"
        ))),
    }
}

fn parse_ordering(value: &str) -> Result<OrderingChoice, Failure> {
    match value {
        "default" => Ok(OrderingChoice::Default),
        "natural" => Ok(OrderingChoice::Natural),
        "lebedev-finogenov" => Ok(OrderingChoice::LebedevFinogenov),
        "interleaved" => Ok(OrderingChoice::Interleaved),
        other => Err(Failure::Config(format!(
            "unknown ordering {other:?}; expected default, natural, lebedev-finogenov, \
             or interleaved"
        ))),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Failure::Config(format!("bad value for {key}: {e}")))
}

fn flag(key: &str, value: &str) -> Result<bool, Failure> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Failure::Config(format!(
            "bad value for {key}: expected true or false, got {other:?}"
        ))),
    }
}

/// Keys (defaults in parentheses):
/// `problem` (laplace2d-neumann), `n` (64), `stencil` (five-point in 2D,
/// seven-point in 3D), `combo_a` (2), `combo_b` (3), `combo_wide` (false),
/// `method` (cjm), `methods` (jacobi,sor,cjm), `sigma` (1e-10),
/// `cycle_size` (from sigma), `ordering` (default), `tol` (1e-10),
/// `max_cycles` (100), `max_iters` (200000), `seed` (12698085, `0x` hex
/// accepted), `charge` (1.0), `radius` (quarter edge for the sphere, half
/// for the octant), `kappa_min`/`kappa_max` (operator's own bounds),
/// `out_dir` (.), `schedule_out` (out_dir/schedule.txt), `schedule_in`
/// (none), `round_up_pow2` (false).
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    pub n: usize,
    pub stencil: Option<StencilChoice>,
    pub combo_a: u32,
    pub combo_b: u32,
    pub combo_wide: bool,
    pub method: MethodSpec,
    pub methods: Vec<MethodSpec>,
    pub sigma: f64,
    pub cycle_size: Option<u32>,
    pub ordering: OrderingChoice,
    pub tol: f64,
    pub max_cycles: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub charge: f64,
    pub radius: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub out_dir: PathBuf,
    pub schedule_out: Option<PathBuf>,
    pub schedule_in: Option<PathBuf>,
    pub round_up_pow2: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let opts = SolveOptions::default();
        ExperimentConfig {
            problem: ProblemId::Laplace2dNeumann,
            n: 64,
            stencil: None,
            combo_a: 2,
            combo_b: 3,
            combo_wide: false,
            method: MethodSpec::Cjm,
            methods: vec![MethodSpec::Jacobi, MethodSpec::Sor(None), MethodSpec::Cjm],
            sigma: 1e-10,
            cycle_size: None,
            ordering: OrderingChoice::Default,
            tol: opts.tol,
            max_cycles: opts.max_cycles,
            max_iters: opts.max_iters,
            seed: opts.seed,
            charge: 1.0,
            radius: None,
            kappa_min: None,
            kappa_max: None,
            out_dir: PathBuf::from("."),
            schedule_out: None,
            schedule_in: None,
            round_up_pow2: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self, Failure> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::Config(format!("line {}: expected key = value, got {line:?}", idx + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| e.prefix(&format!("line {}", idx + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        match key {
            "problem" => self.problem = parse_problem(value)?,
            "n" => self.n = num(key, value)?,
            "stencil" => self.stencil = Some(parse_stencil(value)?),
            "combo_a" => self.combo_a = num(key, value)?,
            "combo_b" => self.combo_b = num(key, value)?,
            "combo_wide" => self.combo_wide = flag(key, value)?,
            "method" => self.method = parse_method(value)?,
            "methods" => {
                let parsed: Result<Vec<_>, _> = value
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(parse_method)
                    .collect();
                let parsed = parsed?;
                if parsed.is_empty() {
                    return Err(Failure::Config("methods list is empty".into()));
                }
                self.methods = parsed;
            }
            "sigma" => self.sigma = num(key, value)?,
            "cycle_size" => self.cycle_size = Some(num(key, value)?),
            "ordering" => self.ordering = parse_ordering(value)?,
            "tol" => self.tol = num(key, value)?,
            "max_cycles" => self.max_cycles = num(key, value)?,
            "max_iters" => self.max_iters = num(key, value)?,
            "seed" => {
                self.seed = match value.strip_prefix("0x") {
                    Some(hex) => u64::from_str_radix(hex, 16)
                        .map_err(|e| Failure::Config(format!("bad value for seed: {e}")))?,
                    None => num(key, value)?,
                }
            }
            "charge" => self.charge = num(key, value)?,
            "radius" => self.radius = Some(num(key, value)?),
            "kappa_min" => self.kappa_min = Some(num(key, value)?),
            "kappa_max" => self.kappa_max = Some(num(key, value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "schedule_out" => self.schedule_out = Some(PathBuf::from(value)),
            "schedule_in" => self.schedule_in = Some(PathBuf::from(value)),
            "round_up_pow2" => self.round_up_pow2 = flag(key, value)?,
            other => {
                return Err(Failure::Config(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    /// The configured stencil, defaulting to the canonical second-order
    /// family for the problem's dimensionality.
    pub fn stencil_spec(&self) -> Result<StencilSpec, Failure> {
        let choice = self.stencil.unwrap_or(if self.problem.dims() == 3 {
            StencilChoice::SevenPoint
        } else {
            StencilChoice::FivePoint
        });
        let spec = match choice {
            StencilChoice::FivePoint => StencilSpec::five_point(),
            StencilChoice::SevenPoint => StencilSpec::seven_point(),
            StencilChoice::NinePoint => StencilSpec::nine_point(),
            StencilChoice::SeventeenPoint => StencilSpec::seventeen_point(),
            StencilChoice::Combo => {
                StencilSpec::combo(self.combo_a, self.combo_b, self.combo_wide)
                    .map_err(|e| Failure::Config(e.to_string()))?
            }
        };
        if spec.dims() != self.problem.dims() {
            return Err(Failure::Config(format!(
                "stencil is {}-dimensional but problem {} is {}-dimensional",
                spec.dims(),
                self.problem.name(),
                self.problem.dims()
            )));
        }
        Ok(spec)
    }

    /// Explicit spectral bounds, when both overrides are present.
    pub fn bounds_override(&self) -> Result<Option<SpectralBounds>, Failure> {
        match (self.kappa_min, self.kappa_max) {
            (None, None) => Ok(None),
            (Some(lo), Some(hi)) => SpectralBounds::new(lo, hi)
                .map(Some)
                .map_err(|e| Failure::Config(e.to_string())),
            _ => Err(Failure::Config(
                "kappa_min and kappa_max must be overridden together".into(),
            )),
        }
    }

    pub fn sphere_radius(&self) -> f64 {
        self.radius.unwrap_or(match self.problem {
            ProblemId::Poisson3dSphereOctant => 0.5,
            _ => 0.25,
        })
    }

    pub fn solve_options(&self) -> SolveOptions {
        let mut opts = SolveOptions::default();
        opts.tol = self.tol;
        opts.max_cycles = self.max_cycles;
        opts.max_iters = self.max_iters;
        opts.seed = self.seed;
        opts
    }

    pub fn schedule_path(&self) -> PathBuf {
        self.schedule_out
            .clone()
            .unwrap_or_else(|| self.out_dir.join("schedule.txt"))
    }
}
