//! Experiment orchestration: problem construction, schedule plumbing, and
//! the weights/solve/bench/predict subcommands.

use std::fs;
use std::path::PathBuf;

use chebjac::{
    amplification_bound, apply_ordering, cjm_solve, classic_solve, default_plan, explicit,
    interleaved, laplace2d_neumann, lebedev_finogenov, make_weights, min_cycle_size, natural,
    parse_schedule, poisson2d_exp, poisson3d_sphere, poisson3d_sphere_octant, sor_optimal_omega,
    write_residual_csv, write_schedule, ClassicMethod, CycleTarget, Error, OrderingChoice,
    OrderingPlan, OrderingTag, Problem, SolverReport, SpectralBounds, WeightSchedule,
};

use crate::config::{ExperimentConfig, MethodSpec, ProblemId};
use crate::Failure;

/// Divergence keeps exit code 1; everything else a solver can report about
/// its inputs is a configuration problem.
fn lift(e: Error) -> Failure {
    match e {
        Error::Diverged { .. } => Failure::Run(e.to_string()),
        other => Failure::Config(other.to_string()),
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &PathBuf, contents: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    fs::write(path, contents)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<Problem, Failure> {
    let spec = cfg.stencil_spec()?;
    let built = match cfg.problem {
        ProblemId::Laplace2dNeumann => laplace2d_neumann(cfg.n, spec),
        ProblemId::Poisson2dExp => poisson2d_exp(cfg.n, spec),
        ProblemId::Poisson3dSphere => poisson3d_sphere(cfg.n, cfg.charge, cfg.sphere_radius()),
        ProblemId::Poisson3dSphereOctant => {
            poisson3d_sphere_octant(cfg.n, cfg.charge, cfg.sphere_radius())
        }
    };
    built.map_err(lift)
}

/// A resolved scheduled-relaxation setup: cycle size, the bounds the
/// weights are built from, and the ordering to apply.
pub struct ScheduledRun {
    pub m: u32,
    pub bounds: SpectralBounds,
    pub choice: OrderingChoice,
}

/// Resolution order: an explicit schedule file wins, then `cycle_size`,
/// then the smallest cycle meeting `sigma`. Bounds come from the file, the
/// `kappa_*` overrides, or the operator itself.
pub fn scheduled_run(problem: &Problem, cfg: &ExperimentConfig) -> Result<ScheduledRun, Failure> {
    if let Some(path) = &cfg.schedule_in {
        let sched = parse_schedule(&read(path)?).map_err(lift)?;
        let choice = match sched.ordering() {
            OrderingTag::NaturalDescending => OrderingChoice::Natural,
            OrderingTag::LebedevFinogenov => OrderingChoice::LebedevFinogenov,
            OrderingTag::Interleaved => OrderingChoice::Interleaved,
            OrderingTag::Explicit => OrderingChoice::Explicit(rank_plan(&sched)?),
        };
        return Ok(ScheduledRun {
            m: sched.m(),
            bounds: sched.bounds(),
            choice,
        });
    }
    let bounds = match cfg.bounds_override()? {
        Some(b) => b,
        None => problem
            .stencil()
            .kappa_bounds(problem.grid())
            .map_err(lift)?,
    };
    let mut m = match cfg.cycle_size {
        Some(m) => m,
        None => min_cycle_size(cfg.sigma, &bounds).map_err(lift)?,
    };
    if cfg.round_up_pow2 {
        m = m.next_power_of_two();
    }
    Ok(ScheduledRun {
        m,
        bounds,
        choice: cfg.ordering.clone(),
    })
}

/// Recover the permutation behind a schedule stored in applied order: each
/// weight's 1-based rank in the descending natural order. Exact because
/// the weights are pairwise distinct.
fn rank_plan(sched: &WeightSchedule) -> Result<OrderingPlan, Failure> {
    let mut desc = sched.weights().to_vec();
    desc.sort_by(|a, b| b.total_cmp(a));
    let perm: Vec<u32> = sched
        .weights()
        .iter()
        .map(|w| {
            desc.iter()
                .position(|d| d.total_cmp(w).is_eq())
                .expect("weight came from the same list") as u32
                + 1
        })
        .collect();
    explicit(perm).map_err(lift)
}

fn plan_for(choice: &OrderingChoice, m: u32) -> Result<OrderingPlan, Failure> {
    match choice {
        OrderingChoice::Default => default_plan(m).map_err(lift),
        OrderingChoice::Natural => Ok(natural(m)),
        OrderingChoice::LebedevFinogenov => {
            if !m.is_power_of_two() {
                return Err(Failure::Config(format!(
                    "the pairing order needs a power-of-two cycle size, got {m} \
                     (hint: --round-up-pow2)"
                )));
            }
            lebedev_finogenov(m.trailing_zeros()).map_err(lift)
        }
        OrderingChoice::Interleaved => interleaved(m).map_err(lift),
        OrderingChoice::Explicit(p) => Ok(p.clone()),
    }
}

pub fn weights(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let problem = build_problem(cfg)?;
    let run = scheduled_run(&problem, cfg)?;
    let plan = plan_for(&run.choice, run.m)?;
    let sched = make_weights(run.m, &run.bounds).map_err(lift)?;
    let sched = apply_ordering(&sched, &plan).map_err(lift)?;
    let profile = amplification_bound(run.m, &run.bounds).map_err(lift)?;
    let path = cfg.schedule_path();
    write(&path, write_schedule(&sched).as_bytes())?;
    println!("problem = {}", cfg.problem.name());
    println!("n = {}", cfg.n);
    println!("kappa_min = {:e}", run.bounds.kappa_min);
    println!("kappa_max = {:e}", run.bounds.kappa_max);
    println!("cycle_size = {}", run.m);
    println!("ordering = {}", plan.name());
    println!("bound = {:.6e}", profile.bound);
    println!("schedule = {}", path.display());
    Ok(())
}

pub fn predict(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let problem = build_problem(cfg)?;
    let run = scheduled_run(&problem, cfg)?;
    let profile = amplification_bound(run.m, &run.bounds).map_err(lift)?;
    println!("problem = {}", cfg.problem.name());
    println!("n = {}", cfg.n);
    println!("kappa_min = {:e}", run.bounds.kappa_min);
    println!("kappa_max = {:e}", run.bounds.kappa_max);
    if cfg.cycle_size.is_none() && cfg.schedule_in.is_none() {
        println!("sigma = {:e}", cfg.sigma);
    }
    println!("cycle_size = {}", run.m);
    println!("bound = {:.6e}", profile.bound);
    println!("per_iteration_rate = {:.9}", profile.per_iteration_bound());
    Ok(())
}

/// One method's result; divergence is recorded rather than propagated so a
/// comparison matrix can finish.
enum Outcome {
    Done(SolverReport),
    Diverged {
        iteration: usize,
        residual: f64,
        message: String,
    },
}

struct Ran {
    label: String,
    display: String,
    outcome: Outcome,
}

fn run_method(
    problem: &Problem,
    method: &MethodSpec,
    cfg: &ExperimentConfig,
) -> Result<Ran, Failure> {
    let mut opts = cfg.solve_options();
    let (display, raw) = match method {
        MethodSpec::Jacobi => (
            "jacobi".to_string(),
            classic_solve(problem, ClassicMethod::Jacobi, &opts),
        ),
        MethodSpec::GaussSeidel => (
            "gauss-seidel".to_string(),
            classic_solve(problem, ClassicMethod::GaussSeidel, &opts),
        ),
        MethodSpec::Sor(given) => {
            let omega = match given {
                Some(w) => *w,
                None => sor_optimal_omega(cfg.n).map_err(lift)?,
            };
            (
                format!("sor(w={omega:.5})"),
                classic_solve(problem, ClassicMethod::Sor(omega), &opts),
            )
        }
        MethodSpec::Cjm => {
            let run = scheduled_run(problem, cfg)?;
            opts.bounds_override = Some(run.bounds);
            (
                format!("cjm(M={})", run.m),
                cjm_solve(problem, CycleTarget::ExplicitM(run.m), &run.choice, &opts),
            )
        }
    };
    let outcome = match raw {
        Ok((_, report)) => Outcome::Done(report),
        Err(e @ Error::Diverged { .. }) => {
            let message = e.to_string();
            match e {
                Error::Diverged {
                    iteration,
                    residual,
                    ..
                } => Outcome::Diverged {
                    iteration,
                    residual,
                    message,
                },
                _ => unreachable!(),
            }
        }
        Err(other) => return Err(lift(other)),
    };
    Ok(Ran {
        label: method.label(),
        display,
        outcome,
    })
}

fn final_residual(report: &SolverReport) -> f64 {
    report.history.last().map(|&(_, r)| r).unwrap_or(f64::NAN)
}

fn write_csv(cfg: &ExperimentConfig, label: &str, report: &SolverReport) -> Result<PathBuf, Failure> {
    let path = cfg.out_dir.join(format!("{label}.csv"));
    let mut buf = Vec::new();
    write_residual_csv(report, &mut buf).map_err(lift)?;
    write(&path, &buf)?;
    Ok(path)
}

pub fn solve(cfg: &ExperimentConfig) -> Result<(), Failure> {
    if cfg.schedule_in.is_some() && cfg.method != MethodSpec::Cjm {
        return Err(Failure::Config(
            "schedule_in applies only to method = cjm".into(),
        ));
    }
    let problem = build_problem(cfg)?;
    let ran = run_method(&problem, &cfg.method, cfg)?;
    match ran.outcome {
        Outcome::Done(report) => {
            let path = write_csv(cfg, &ran.label, &report)?;
            println!("problem = {}", cfg.problem.name());
            println!("n = {}", cfg.n);
            println!("method = {}", ran.display);
            if let Some(b) = report.predicted_bound {
                println!("predicted_bound = {b:.6e}");
            }
            println!("iterations = {}", report.iterations);
            println!("final_residual = {:e}", final_residual(&report));
            println!("reduction = {:.6e}", report.achieved_reduction);
            println!("converged = {}", report.converged);
            println!("wall_time_s = {:.3}", report.wall_time);
            println!("residual_csv = {}", path.display());
            Ok(())
        }
        Outcome::Diverged { message, .. } => Err(Failure::Run(message)),
    }
}

pub fn bench(cfg: &ExperimentConfig) -> Result<(), Failure> {
    if cfg.methods.is_empty() {
        return Err(Failure::Config("methods list is empty".into()));
    }
    let problem = build_problem(cfg)?;
    // Identical seeds give every method the identical initial guess.
    let mut rans = Vec::with_capacity(cfg.methods.len());
    for method in &cfg.methods {
        rans.push(run_method(&problem, method, cfg)?);
    }
    let jacobi_iters = rans
        .iter()
        .find(|r| r.label == "jacobi")
        .and_then(|r| match &r.outcome {
            Outcome::Done(report) => Some(report.iterations),
            Outcome::Diverged { .. } => None,
        });

    let mut summary =
        String::from("method,iterations,final_residual,reduction,speedup_vs_jacobi,status\n");
    println!(
        "{:<18} {:>10} {:>15} {:>12} {:>8} {:<10} {:>9}",
        "method", "iterations", "final_residual", "reduction", "speedup", "status", "wall_s"
    );
    let mut diverged = Vec::new();
    for ran in &rans {
        match &ran.outcome {
            Outcome::Done(report) => {
                write_csv(cfg, &ran.label, report)?;
                let status = if report.converged {
                    "converged"
                } else {
                    "budget"
                };
                let speedup = jacobi_iters
                    .map(|j| format!("{:.2}", j as f64 / report.iterations as f64))
                    .unwrap_or_default();
                let res = final_residual(report);
                summary.push_str(&format!(
                    "{},{},{:e},{:e},{},{}\n",
                    ran.label, report.iterations, res, report.achieved_reduction, speedup, status
                ));
                println!(
                    "{:<18} {:>10} {:>15.3e} {:>12.3e} {:>8} {:<10} {:>9.3}",
                    ran.display,
                    report.iterations,
                    res,
                    report.achieved_reduction,
                    speedup,
                    status,
                    report.wall_time
                );
            }
            Outcome::Diverged {
                iteration,
                residual,
                ..
            } => {
                diverged.push(ran.display.clone());
                summary.push_str(&format!(
                    "{},{},{:e},,,diverged\n",
                    ran.label, iteration, residual
                ));
                println!(
                    "{:<18} {:>10} {:>15.3e} {:>12} {:>8} {:<10} {:>9}",
                    ran.display, iteration, residual, "", "", "diverged", ""
                );
            }
        }
    }
    let summary_path = cfg.out_dir.join("summary.csv");
    write(&summary_path, summary.as_bytes())?;
    println!("summary_csv = {}", summary_path.display());
    if diverged.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("diverged: {}", diverged.join(", "))))
    }
}
