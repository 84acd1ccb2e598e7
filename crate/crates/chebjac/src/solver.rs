//! Iteration drivers: weighted-Jacobi sweeps, scheduled cycles of them,
//! and the classical Jacobi / Gauss-Seidel / SOR baselines.
//!
//! All methods share one residual convention: the successive-difference
//! max norm max|u^{n+1} - u^n| over unknowns, compared against an absolute
//! tolerance. The scheduled solver additionally reports the a-priori
//! contraction bound its cycle was built from, which is the number the
//! whole approach exists to deliver: the cost of the solve is known before
//! the first sweep runs.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chebyshev::{amplification_bound, make_weights, min_cycle_size};
use crate::error::{Error, Result};
use crate::grid::{BoundaryFn, FaceBc, Field, Grid, Layout};
use crate::ordering::{apply_ordering, default_plan, interleaved, lebedev_finogenov, natural, OrderingPlan};
use crate::stencil::{SpectralBounds, StencilSpec};

/// A discretized linear problem: operator, right-hand side, and optionally
/// the exact solution for error reporting.
#[derive(Clone)]
pub struct Problem {
    grid: Grid,
    stencil: StencilSpec,
    rhs: Field,
    analytic: Option<BoundaryFn>,
}

impl Problem {
    pub fn new(
        grid: Grid,
        stencil: StencilSpec,
        rhs: Field,
        analytic: Option<BoundaryFn>,
    ) -> Result<Problem> {
        if stencil.dims() != grid.dims() {
            return Err(Error::config(format!(
                "{}-d stencil on a {}-d grid",
                stencil.dims(),
                grid.dims()
            )));
        }
        if !grid.same_shape(rhs.grid()) {
            return Err(Error::config("rhs field shape does not match the grid"));
        }
        let mut finite = true;
        rhs.for_each_unknown(|_, _, _, v| finite &= v.is_finite());
        if !finite {
            return Err(Error::config("rhs contains non-finite values"));
        }
        // Cell-layout Dirichlet ghosts are one-face affine extrapolations;
        // corner ghosts reached by diagonal taps would stack two of them.
        if grid.layout() == Layout::Cell && stencil.has_diagonal_taps() {
            for a in 0..grid.dims() {
                if grid.bc(a).has_dirichlet() {
                    return Err(Error::config(
                        "stencils with diagonal taps need vertex layout on Dirichlet axes",
                    ));
                }
            }
        }
        Ok(Problem {
            grid,
            stencil,
            rhs,
            analytic,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn stencil(&self) -> &StencilSpec {
        &self.stencil
    }

    pub fn rhs(&self) -> &Field {
        &self.rhs
    }

    pub fn analytic(&self) -> Option<&BoundaryFn> {
        self.analytic.as_ref()
    }

    /// Max-norm error of `u` against the attached exact solution.
    pub fn max_error(&self, u: &Field) -> Option<f64> {
        let f = self.analytic.as_ref()?;
        let g = &self.grid;
        let mut mx = 0.0f64;
        u.for_each_unknown(|i, j, k, v| {
            let (x, y, z) = (g.coord(0, i), g.coord(1, j), g.coord(2, k));
            mx = mx.max((v - f(x, y, z)).abs());
        });
        Some(mx)
    }
}

/// How to size a scheduled cycle.
#[derive(Clone, Copy, Debug)]
pub enum CycleTarget {
    /// Pick the smallest M whose end-of-cycle bound is <= sigma.
    Sigma(f64),
    /// Use exactly M sweeps per cycle.
    ExplicitM(u32),
}

/// Which permutation to schedule the weights with.
#[derive(Clone, Debug)]
pub enum OrderingChoice {
    /// Pairing recurrence for power-of-two M, max/min interleave otherwise.
    Default,
    Natural,
    LebedevFinogenov,
    Interleaved,
    Explicit(OrderingPlan),
}

impl OrderingChoice {
    fn resolve(&self, m: u32) -> Result<OrderingPlan> {
        match self {
            OrderingChoice::Default => default_plan(m),
            OrderingChoice::Natural => Ok(natural(m)),
            OrderingChoice::LebedevFinogenov => {
                if !m.is_power_of_two() {
                    return Err(Error::Ordering(format!(
                        "pairing ordering needs a power-of-two cycle, got M = {m}"
                    )));
                }
                lebedev_finogenov(m.trailing_zeros())
            }
            OrderingChoice::Interleaved => interleaved(m),
            OrderingChoice::Explicit(plan) => Ok(plan.clone()),
        }
    }
}

/// Classical single-weight methods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassicMethod {
    Jacobi,
    GaussSeidel,
    Sor(f64),
}

/// Knobs shared by all solves.
#[derive(Clone)]
pub struct SolveOptions {
    /// Absolute successive-difference tolerance.
    pub tol: f64,
    /// Cycle budget for scheduled solves.
    pub max_cycles: usize,
    /// Sweep budget for classical solves.
    pub max_iters: usize,
    /// Record every n-th residual; the first and last are always kept.
    pub record_stride: usize,
    /// Seed for the mean-free random guess on singular problems.
    pub seed: u64,
    /// Override the default initial guess.
    pub initial_guess: Option<Field>,
    /// Build the schedule from these bounds instead of the operator's own.
    pub bounds_override: Option<SpectralBounds>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_cycles: 100,
            max_iters: 200_000,
            record_stride: 1,
            seed: 0x00c1_c1e5,
            initial_guess: None,
            bounds_override: None,
        }
    }
}

/// What a solve did, iteration by iteration.
#[derive(Clone, Debug)]
pub struct SolverReport {
    /// Recorded (iteration, residual) pairs; nonempty on success.
    pub history: Vec<(usize, f64)>,
    /// Sweeps actually performed.
    pub iterations: usize,
    /// A-priori end-of-cycle contraction, when a schedule predicted one.
    pub predicted_bound: Option<f64>,
    /// Last recorded residual over the first.
    pub achieved_reduction: f64,
    pub converged: bool,
    /// Seconds spent iterating; never written into exported data.
    pub wall_time: f64,
}

/// Writes the residual history as a two-column CSV.
pub fn write_residual_csv<W: std::io::Write>(report: &SolverReport, out: &mut W) -> Result<()> {
    writeln!(out, "iteration,residual")?;
    for &(n, r) in &report.history {
        writeln!(out, "{n},{r}")?;
    }
    Ok(())
}

/// Classical optimal SOR factor 2/(1 + sin(pi/N)) for an N-zone axis.
/// Valid only for consistently ordered operators (second-order stencils,
/// lexicographic sweeps); other cases need an empirical sweep.
pub fn sor_optimal_omega(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("need N >= 2 zones, got {n}")));
    }
    Ok(2.0 / (1.0 + (std::f64::consts::PI / n as f64).sin()))
}

/// One out-of-place weighted-Jacobi sweep u + omega d^-1 (b - A u).
/// `u` must carry a halo at least as deep as the stencil's reach and, on
/// vertex layouts, already hold its Dirichlet boundary values
/// (see [`Field::set_dirichlet_nodes`]).
pub fn weighted_jacobi_sweep(problem: &Problem, u: &Field, omega: f64) -> Result<Field> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::config(format!("weight must be positive, got {omega}")));
    }
    if u.reach() < problem.stencil().reach() {
        return Err(Error::config("field halo shallower than the stencil reach"));
    }
    if !problem.grid().same_shape(u.grid()) {
        return Err(Error::config("field shape does not match the problem grid"));
    }
    let mut cur = u.clone();
    let mut next = u.clone();
    let r = jacobi_sweep_kernel(&mut cur, problem, &mut next, omega);
    if !r.is_finite() {
        return Err(Error::Diverged {
            iteration: 1,
            omega,
            residual: r,
            limit: f64::INFINITY,
        });
    }
    Ok(next)
}

/// Scheduled-cycle solve: sizes the cycle from `target`, builds and orders
/// the weights, and sweeps until the residual drops below `opts.tol` or
/// the cycle budget runs out. Singular (all-Neumann) problems start from a
/// seeded mean-free random guess and get their mean re-projected out at
/// every cycle boundary.
pub fn cjm_solve(
    problem: &Problem,
    target: CycleTarget,
    choice: &OrderingChoice,
    opts: &SolveOptions,
) -> Result<(Field, SolverReport)> {
    let bounds = match opts.bounds_override {
        Some(b) => b,
        None => problem.stencil().kappa_bounds(problem.grid())?,
    };
    let m = match target {
        CycleTarget::Sigma(sigma) => min_cycle_size(sigma, &bounds)?,
        CycleTarget::ExplicitM(m) => {
            if m == 0 {
                return Err(Error::config("cycle size must be >= 1"));
            }
            m
        }
    };
    let schedule = apply_ordering(&make_weights(m, &bounds)?, &choice.resolve(m)?)?;
    let predicted = amplification_bound(m, &bounds)?.bound;
    drive(
        problem,
        Drive::Jacobi(schedule.weights()),
        Some(predicted),
        opts.max_cycles.saturating_mul(m as usize),
        opts,
    )
}

/// Classical baselines sharing the residual bookkeeping of [`cjm_solve`].
/// Gauss-Seidel runs the SOR path with omega = 1, so the two produce
/// bit-identical iterates.
pub fn classic_solve(
    problem: &Problem,
    method: ClassicMethod,
    opts: &SolveOptions,
) -> Result<(Field, SolverReport)> {
    let drive_kind = match method {
        ClassicMethod::Jacobi => Drive::Jacobi(&[1.0]),
        ClassicMethod::GaussSeidel => Drive::Sor(1.0),
        ClassicMethod::Sor(omega) => {
            if !(omega.is_finite() && omega > 0.0 && omega < 2.0) {
                return Err(Error::config(format!(
                    "SOR stability requires 0 < omega < 2, got {omega}"
                )));
            }
            Drive::Sor(omega)
        }
    };
    drive(problem, drive_kind, None, opts.max_iters, opts)
}

enum Drive<'a> {
    /// Out-of-place sweeps cycling through a weight schedule.
    Jacobi(&'a [f64]),
    /// In-place lexicographic sweeps with one fixed weight.
    Sor(f64),
}

fn drive(
    problem: &Problem,
    kind: Drive<'_>,
    predicted_bound: Option<f64>,
    max_total: usize,
    opts: &SolveOptions,
) -> Result<(Field, SolverReport)> {
    if !(opts.tol.is_finite() && opts.tol >= 0.0) {
        return Err(Error::config(format!("tolerance must be >= 0, got {}", opts.tol)));
    }
    if max_total == 0 {
        return Err(Error::config("iteration budget must be >= 1"));
    }
    let stride = opts.record_stride.max(1);
    let singular = problem.grid().is_pure_neumann();
    // Mean re-projection boundary: every cycle for scheduled sweeps, every
    // sweep for the classical methods.
    let project_every = match kind {
        Drive::Jacobi(ws) => ws.len(),
        Drive::Sor(_) => 1,
    };

    let t0 = Instant::now();
    let mut u = initial_field(problem, opts)?;
    let mut scratch = match kind {
        Drive::Jacobi(_) => Some(u.clone()),
        Drive::Sor(_) => None,
    };

    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut first_res = 0.0f64;
    let mut res = 0.0f64;
    let mut converged = false;
    let mut n = 0usize;
    while n < max_total {
        let omega = match kind {
            Drive::Jacobi(ws) => ws[n % ws.len()],
            Drive::Sor(w) => w,
        };
        res = match kind {
            Drive::Jacobi(_) => {
                let next = scratch.as_mut().expect("jacobi drive owns a scratch field");
                let r = jacobi_sweep_kernel(&mut u, problem, next, omega);
                std::mem::swap(&mut u, next);
                r
            }
            Drive::Sor(_) => sor_sweep_kernel(&mut u, problem, omega),
        };
        n += 1;
        if n == 1 {
            if res == 0.0 {
                // Already the discrete fixed point: converged at iteration 0.
                history.push((0, 0.0));
                converged = true;
                n = 0;
                break;
            }
            first_res = res;
        }
        let limit = 1e12 * first_res;
        if !res.is_finite() || res > limit {
            return Err(Error::Diverged {
                iteration: n,
                omega,
                residual: res,
                limit,
            });
        }
        if n == 1 || n % stride == 0 {
            history.push((n, res));
        }
        if res <= opts.tol {
            converged = true;
            break;
        }
        if singular && n % project_every == 0 {
            u.subtract_unknown_mean();
        }
    }
    if history.last().map(|&(last, _)| last) != Some(n) {
        history.push((n, res));
    }
    let achieved_reduction = if first_res == 0.0 {
        1.0
    } else {
        history.last().expect("history is nonempty").1 / first_res
    };
    Ok((
        u,
        SolverReport {
            history,
            iterations: n,
            predicted_bound,
            achieved_reduction,
            converged,
            wall_time: t0.elapsed().as_secs_f64(),
        },
    ))
}

/// Default initial guess: zeros (with Dirichlet boundary data installed on
/// vertex layouts); for singular problems a seeded uniform field with the
/// mean removed, so every error mode is present but the null-space
/// constant is not.
fn initial_field(problem: &Problem, opts: &SolveOptions) -> Result<Field> {
    let grid = problem.grid();
    let reach = problem.stencil().reach();
    let mut u = Field::zeros(grid, reach)?;
    match &opts.initial_guess {
        Some(g) => {
            if !grid.same_shape(g.grid()) {
                return Err(Error::config("initial guess shape does not match the grid"));
            }
            u.map_unknowns(|i, j, k, _| g.at(i, j, k));
        }
        None => {
            if grid.is_pure_neumann() {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                u.map_unknowns(|_, _, _, _| rng.random::<f64>() - 0.5);
                u.subtract_unknown_mean();
            }
        }
    }
    u.set_dirichlet_nodes();
    Ok(u)
}

/// Dispatches one weighted-Jacobi sweep to the family kernel; returns the
/// max |du| over unknowns, infinite when any update went non-finite.
fn jacobi_sweep_kernel(u: &mut Field, problem: &Problem, out: &mut Field, omega: f64) -> f64 {
    u.fill_ghosts();
    let spec = problem.stencil();
    let h = problem.grid().h();
    let f = omega / spec.diagonal_coeff(h);
    let (a, b) = (spec.a() as f64, spec.b() as f64);
    if spec.dims() == 3 {
        jacobi_seven(u, problem.rhs(), out, f, h)
    } else if spec.is_wide() {
        jacobi_wide(u, problem.rhs(), out, a, b, f, h)
    } else {
        jacobi_compact(u, problem.rhs(), out, a, b, f, h)
    }
}

/// Dispatches one in-place lexicographic SOR sweep; Gauss-Seidel semantics
/// come from reading already-updated low neighbors in place. Ghosts are
/// refreshed once per sweep from the pre-sweep state.
fn sor_sweep_kernel(u: &mut Field, problem: &Problem, omega: f64) -> f64 {
    u.fill_ghosts();
    let spec = problem.stencil();
    let g = problem.grid();
    let h = g.h();
    let f = omega / spec.diagonal_coeff(h);
    // A halo snapshot is only a faithful Gauss-Seidel neighbor when every
    // mirrored source either is the cell being updated or comes later in
    // the sweep. Neumann faces break that for diagonal taps, reach-2
    // stencils, and vertex layouts (the high-face mirror lands on an
    // already-updated node), so those go through live-resolving reads.
    let neumann = (0..g.dims()).any(|a| g.bc(a).has_neumann());
    let hazard = neumann
        && (spec.has_diagonal_taps() || spec.reach() == 2 || g.layout() == Layout::Vertex);
    if hazard {
        return sor_live(u, problem, f, h);
    }
    let (a, b) = (spec.a() as f64, spec.b() as f64);
    if spec.dims() == 3 {
        sor_seven(u, problem.rhs(), f, h)
    } else if spec.is_wide() {
        sor_wide(u, problem.rhs(), a, b, f, h)
    } else {
        sor_compact(u, problem.rhs(), a, b, f, h)
    }
}

/// Resolves a stencil tap site to its current value: in-range sites read
/// directly, Neumann taps chase the mirror to the live interior value,
/// and vertex Dirichlet taps read the stored boundary sample. Cell
/// Dirichlet taps never reach here (reach-1 self-folds stay on the fused
/// kernels).
fn resolve_live(u: &Field, s0: isize, s1: isize, s2: isize) -> f64 {
    let g = u.grid();
    let mut s = [s0, s1, s2];
    for a in 0..g.dims() {
        let n = g.zones(a) as isize;
        let (lo, hi) = g.unknown_range(a);
        while s[a] < lo || s[a] > hi {
            let side_lo = s[a] < lo;
            let face = if side_lo { &g.bc(a).lo } else { &g.bc(a).hi };
            match (g.layout(), face) {
                (_, FaceBc::Dirichlet(_)) => return u.at(s[0], s[1], s[2]),
                (Layout::Vertex, FaceBc::Neumann) => {
                    s[a] = if side_lo { -s[a] } else { 2 * n - s[a] };
                }
                (Layout::Cell, FaceBc::Neumann) => {
                    s[a] = if side_lo { -s[a] - 1 } else { 2 * n - 1 - s[a] };
                }
            }
        }
    }
    u.at(s[0], s[1], s[2])
}

/// Lexicographic SOR with live neighbor resolution for the hazard cases
/// described in `sor_sweep_kernel`. Scalar accessor speed; every
/// benchmarked configuration stays on the fused kernels.
fn sor_live(u: &mut Field, problem: &Problem, f: f64, h: f64) -> f64 {
    let g = u.grid().clone();
    let spec = problem.stencil();
    let rhs = problem.rhs();
    let (a, b) = (spec.a() as f64, spec.b() as f64);
    let h2 = h * h;
    let dims = g.dims();
    let wide = dims == 2 && spec.reach() == 2;
    let (i0, i1) = g.unknown_range(0);
    let (j0, j1) = g.unknown_range(1);
    let (k0, k1) = if dims == 3 {
        g.unknown_range(2)
    } else {
        (0, 0)
    };
    let mut mx = 0.0f64;
    let mut finite = true;
    for i in i0..=i1 {
        for j in j0..=j1 {
            for k in k0..=k1 {
                let c = u.at(i, j, k);
                let lap = {
                    let lv = |di: isize, dj: isize, dk: isize| {
                        resolve_live(u, i + di, j + dj, k + dk)
                    };
                    if dims == 3 {
                        let s = lv(-1, 0, 0)
                            + lv(1, 0, 0)
                            + lv(0, -1, 0)
                            + lv(0, 1, 0)
                            + lv(0, 0, -1)
                            + lv(0, 0, 1);
                        (s - 6.0 * c) * (1.0 / h2)
                    } else if wide {
                        let ax2 = lv(-2, 0, 0) + lv(2, 0, 0) + lv(0, -2, 0) + lv(0, 2, 0);
                        let ax1 = lv(-1, 0, 0) + lv(1, 0, 0) + lv(0, -1, 0) + lv(0, 1, 0);
                        let co2 = lv(-2, -2, 0) + lv(-2, 2, 0) + lv(2, -2, 0) + lv(2, 2, 0);
                        let dg1 = lv(-1, -1, 0) + lv(-1, 1, 0) + lv(1, -1, 0) + lv(1, 1, 0);
                        (-2.0 * a * ax2 + 32.0 * a * ax1 - (b - a) * co2
                            + 16.0 * (b - a) * dg1
                            - 60.0 * (a + b) * c)
                            * (1.0 / (24.0 * b * h2))
                    } else {
                        let sides = lv(-1, 0, 0) + lv(1, 0, 0) + lv(0, -1, 0) + lv(0, 1, 0);
                        let diags = lv(-1, -1, 0) + lv(-1, 1, 0) + lv(1, -1, 0) + lv(1, 1, 0);
                        (2.0 * a * sides + (b - a) * diags - 4.0 * (a + b) * c)
                            * (1.0 / (2.0 * b * h2))
                    }
                };
                let du = f * (rhs.at(i, j, k) - lap);
                finite &= du.is_finite();
                mx = mx.max(du.abs());
                u.set(i, j, k, c + du);
            }
        }
    }
    if finite {
        mx
    } else {
        f64::INFINITY
    }
}

#[inline]
fn row(fld: &Field, i: isize, j: isize, k: isize, len: usize) -> &[f64] {
    let s = fld.idx(i, j, k);
    &fld.data()[s..s + len]
}

fn jacobi_compact(
    u: &Field,
    rhs: &Field,
    out: &mut Field,
    a: f64,
    b: f64,
    f: f64,
    h: f64,
) -> f64 {
    let g = u.grid();
    let (i0, i1) = g.unknown_range(0);
    let (j0, j1) = g.unknown_range(1);
    let w = (j1 - j0 + 1) as usize;
    let h2 = h * h;
    let scale = 1.0 / (2.0 * b * h2);
    let (ca, cd, cc) = (2.0 * a, b - a, -4.0 * (a + b));
    let mut mx = 0.0f64;
    let mut finite = true;
    for i in i0..=i1 {
        let rc = row(u, i, j0 - 1, 0, w + 2);
        let rn = row(u, i + 1, j0 - 1, 0, w + 2);
        let rs = row(u, i - 1, j0 - 1, 0, w + 2);
        let rr = row(rhs, i, j0, 0, w);
        let o0 = out.idx(i, j0, 0);
        let ro = &mut out.data_mut()[o0..o0 + w];
        for jj in 0..w {
            let c = rc[jj + 1];
            let sides = rs[jj + 1] + rn[jj + 1] + rc[jj] + rc[jj + 2];
            let diags = rs[jj] + rs[jj + 2] + rn[jj] + rn[jj + 2];
            let lap = (ca * sides + cd * diags + cc * c) * scale;
            let du = f * (rr[jj] - lap);
            finite &= du.is_finite();
            mx = mx.max(du.abs());
            ro[jj] = c + du;
        }
    }
    if finite {
        mx
    } else {
        f64::INFINITY
    }
}

fn jacobi_wide(u: &Field, rhs: &Field, out: &mut Field, a: f64, b: f64, f: f64, h: f64) -> f64 {
    let g = u.grid();
    let (i0, i1) = g.unknown_range(0);
    let (j0, j1) = g.unknown_range(1);
    let w = (j1 - j0 + 1) as usize;
    let h2 = h * h;
    let inv = 1.0 / (24.0 * b * h2);
    let (c_ax2, c_ax1, c_co2, c_dg1, c_c) = (
        -2.0 * a,
        32.0 * a,
        -(b - a),
        16.0 * (b - a),
        -60.0 * (a + b),
    );
    let mut mx = 0.0f64;
    let mut finite = true;
    for i in i0..=i1 {
        let rm2 = row(u, i - 2, j0 - 2, 0, w + 4);
        let rm1 = row(u, i - 1, j0 - 2, 0, w + 4);
        let rc = row(u, i, j0 - 2, 0, w + 4);
        let rp1 = row(u, i + 1, j0 - 2, 0, w + 4);
        let rp2 = row(u, i + 2, j0 - 2, 0, w + 4);
        let rr = row(rhs, i, j0, 0, w);
        let o0 = out.idx(i, j0, 0);
        let ro = &mut out.data_mut()[o0..o0 + w];
        for jj in 0..w {
            let c = rc[jj + 2];
            let ax2 = rm2[jj + 2] + rp2[jj + 2] + rc[jj] + rc[jj + 4];
            let ax1 = rm1[jj + 2] + rp1[jj + 2] + rc[jj + 1] + rc[jj + 3];
            let co2 = rm2[jj] + rm2[jj + 4] + rp2[jj] + rp2[jj + 4];
            let dg1 = rm1[jj + 1] + rm1[jj + 3] + rp1[jj + 1] + rp1[jj + 3];
            let lap = (c_ax2 * ax2 + c_ax1 * ax1 + c_co2 * co2 + c_dg1 * dg1 + c_c * c) * inv;
            let du = f * (rr[jj] - lap);
            finite &= du.is_finite();
            mx = mx.max(du.abs());
            ro[jj] = c + du;
        }
    }
    if finite {
        mx
    } else {
        f64::INFINITY
    }
}

fn jacobi_seven(u: &Field, rhs: &Field, out: &mut Field, f: f64, h: f64) -> f64 {
    let g = u.grid();
    let (i0, i1) = g.unknown_range(0);
    let (j0, j1) = g.unknown_range(1);
    let (k0, k1) = g.unknown_range(2);
    let w = (k1 - k0 + 1) as usize;
    let h2 = h * h;
    let inv = 1.0 / h2;
    let mut mx = 0.0f64;
    let mut finite = true;
    for i in i0..=i1 {
        for j in j0..=j1 {
            let rc = row(u, i, j, k0 - 1, w + 2);
            let rw = row(u, i - 1, j, k0, w);
            let re = row(u, i + 1, j, k0, w);
            let rs = row(u, i, j - 1, k0, w);
            let rn = row(u, i, j + 1, k0, w);
            let rr = row(rhs, i, j, k0, w);
            let o0 = out.idx(i, j, k0);
            let ro = &mut out.data_mut()[o0..o0 + w];
            for kk in 0..w {
                let c = rc[kk + 1];
                let s = rw[kk] + re[kk] + rs[kk] + rn[kk] + rc[kk] + rc[kk + 2];
                let lap = (s - 6.0 * c) * inv;
                let du = f * (rr[kk] - lap);
                finite &= du.is_finite();
                mx = mx.max(du.abs());
                ro[kk] = c + du;
            }
        }
    }
    if finite {
        mx
    } else {
        f64::INFINITY
    }
}

fn sor_compact(u: &mut Field, rhs: &Field, a: f64, b: f64, f: f64, h: f64) -> f64 {
    let g = u.grid().clone();
    let (i0, i1) = g.unknown_range(0);
    let (j0, j1) = g.unknown_range(1);
    let w = (j1 - j0 + 1) as usize;
    let s0 = u.stride(0);
    let h2 = h * h;
    let scale = 1.0 / (2.0 * b * h2);
    let (ca, cd, cc) = (2.0 * a, b - a, -4.0 * (a + b));
    let mut mx = 0.0f64;
    let mut finite = true;
    for i in i0..=i1 {
        let cb = u.idx(i, j0, 0);
        let rr = {
            let s = rhs.idx(i, j0, 0);
            &rhs.data()[s..s + w]
        };
        let data = u.data_mut();
        let (head, rest) = data.split_at_mut(cb);
        let (crow, tail) = rest.split_at_mut(w);
        let rs = &head[cb - s0 - 1..cb - s0 - 1 + w + 2];
        let rn = &tail[s0 - w - 1..s0 - w - 1 + w + 2];
        let wghost = head[cb - 1];
        let eghost = tail[0];
        for jj in 0..w {
            let c = crow[jj];
            let west = if jj == 0 { wghost } else { crow[jj - 1] };
            let east = if jj + 1 < w { crow[jj + 1] } else { eghost };
            let sides = rs[jj + 1] + rn[jj + 1] + west + east;
            let diags = rs[jj] + rs[jj + 2] + rn[jj] + rn[jj + 2];
            let lap = (ca * sides + cd * diags + cc * c) * scale;
            let du = f * (rr[jj] - lap);
            finite &= du.is_finite();
            mx = mx.max(du.abs());
            crow[jj] = c + du;
        }
    }
    if finite {
        mx
    } else {
        f64::INFINITY
    }
}

fn sor_seven(u: &mut Field, rhs: &Field, f: f64, h: f64) -> f64 {
    let g = u.grid().clone();
    let (i0, i1) = g.unknown_range(0);
    let (j0, j1) = g.unknown_range(1);
    let (k0, k1) = g.unknown_range(2);
    let w = (k1 - k0 + 1) as usize;
    let s0 = u.stride(0);
    let s1 = u.stride(1);
    let h2 = h * h;
    let inv = 1.0 / h2;
    let mut mx = 0.0f64;
    let mut finite = true;
    for i in i0..=i1 {
        for j in j0..=j1 {
            let cb = u.idx(i, j, k0);
            let rr = {
                let s = rhs.idx(i, j, k0);
                &rhs.data()[s..s + w]
            };
            let data = u.data_mut();
            let (head, rest) = data.split_at_mut(cb);
            let (crow, tail) = rest.split_at_mut(w);
            let riw = &head[cb - s0..cb - s0 + w];
            let rie = &tail[s0 - w..s0 - w + w];
            let rjs = &head[cb - s1..cb - s1 + w];
            let rjn = &tail[s1 - w..s1 - w + w];
            let dghost = head[cb - 1];
            let ughost = tail[0];
            for kk in 0..w {
                let c = crow[kk];
                let down = if kk == 0 { dghost } else { crow[kk - 1] };
                let up = if kk + 1 < w { crow[kk + 1] } else { ughost };
                let s = riw[kk] + rie[kk] + rjs[kk] + rjn[kk] + down + up;
                let lap = (s - 6.0 * c) * inv;
                let du = f * (rr[kk] - lap);
                finite &= du.is_finite();
                mx = mx.max(du.abs());
                crow[kk] = c + du;
            }
        }
    }
    if finite {
        mx
    } else {
        f64::INFINITY
    }
}

/// Wide-reach SOR is off every benchmarked path; plain element indexing
/// keeps it obviously correct.
fn sor_wide(u: &mut Field, rhs: &Field, a: f64, b: f64, f: f64, h: f64) -> f64 {
    let g = u.grid().clone();
    let (i0, i1) = g.unknown_range(0);
    let (j0, j1) = g.unknown_range(1);
    let h2 = h * h;
    let inv = 1.0 / (24.0 * b * h2);
    let (c_ax2, c_ax1, c_co2, c_dg1, c_c) = (
        -2.0 * a,
        32.0 * a,
        -(b - a),
        16.0 * (b - a),
        -60.0 * (a + b),
    );
    let mut mx = 0.0f64;
    let mut finite = true;
    for i in i0..=i1 {
        for j in j0..=j1 {
            let c = u.at(i, j, 0);
            let ax2 = u.at(i - 2, j, 0) + u.at(i + 2, j, 0) + u.at(i, j - 2, 0) + u.at(i, j + 2, 0);
            let ax1 = u.at(i - 1, j, 0) + u.at(i + 1, j, 0) + u.at(i, j - 1, 0) + u.at(i, j + 1, 0);
            let co2 = u.at(i - 2, j - 2, 0)
                + u.at(i - 2, j + 2, 0)
                + u.at(i + 2, j - 2, 0)
                + u.at(i + 2, j + 2, 0);
            let dg1 = u.at(i - 1, j - 1, 0)
                + u.at(i - 1, j + 1, 0)
                + u.at(i + 1, j - 1, 0)
                + u.at(i + 1, j + 1, 0);
            let lap = (c_ax2 * ax2 + c_ax1 * ax1 + c_co2 * co2 + c_dg1 * dg1 + c_c * c) * inv;
            let du = f * (rhs.at(i, j, 0) - lap);
            finite &= du.is_finite();
            mx = mx.max(du.abs());
            u.set(i, j, 0, c + du);
        }
    }
    if finite {
        mx
    } else {
        f64::INFINITY
    }
}
