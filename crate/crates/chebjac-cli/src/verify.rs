//! Named invariant suites. Each check prints one machine-readable line
//! `suite/check: pass|fail <measurements>`; any failure turns into exit
//! code 1 after the whole suite has run.

use std::f64::consts::PI;

use chebjac::{
    amplification, amplification_bound, apply_ordering, default_plan, geometric_mean_inverse,
    harmonic_mean, interleaved, laplace2d_neumann, lebedev_finogenov, make_weights,
    min_cycle_size, parse_schedule, rescale_kappa, write_schedule, AxisBc, Grid, Layout,
    SpectralBounds, StencilSpec,
};

use crate::Failure;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

pub fn run(suite: &str) -> Result<(), Failure> {
    type Suite = (&'static str, fn() -> Vec<Check>);
    let all: [Suite; 4] = [
        ("weights", weights_suite),
        ("orderings", orderings_suite),
        ("bounds", bounds_suite),
        ("theorems", theorems_suite),
    ];
    let chosen: Vec<Suite> = match suite {
        "all" => all.to_vec(),
        name => {
            let found = all.iter().find(|(n, _)| *n == name);
            match found {
                Some(&s) => vec![s],
                None => {
                    return Err(Failure::Config(format!(
                        "unknown suite {name:?}; expected weights, orderings, bounds, \
                         theorems, or all"
                    )))
                }
            }
        }
    };
    let mut total = 0usize;
    let mut failed = 0usize;
    for (name, f) in chosen {
        for c in f() {
            total += 1;
            let status = if c.pass { "pass" } else { "fail" };
            println!("{name}/{}: {status} {}", c.name, c.detail);
            if !c.pass {
                failed += 1;
            }
        }
    }
    println!("checks = {total}, failed = {failed}");
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Run(format!("{failed} verification check(s) failed")))
    }
}

fn weights_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let b = SpectralBounds::new(0.05, 2.0).unwrap();

    let s = make_weights(16, &b).unwrap();
    let worst = s
        .weights()
        .iter()
        .fold(0.0f64, |a, &w| a.max(amplification(1.0 / w, &s).abs()));
    out.push(check(
        "roots-invert-weights",
        worst < 1e-12,
        format!("max_amplification={worst:.3e} need<1e-12"),
    ));

    let descending = s.weights().windows(2).all(|w| w[0] > w[1]);
    out.push(check(
        "natural-order-descending",
        descending,
        format!("strictly_descending={descending}"),
    ));

    let m = 32u32;
    let s32 = make_weights(m, &b).unwrap();
    let bound = amplification_bound(m, &b).unwrap().bound;
    let mut sup = 0.0f64;
    for n in 0..=m {
        let k = 0.05 + ((PI * n as f64 / m as f64).cos() + 1.0) * (2.0 - 0.05) / 2.0;
        sup = sup.max(amplification(k, &s32).abs());
    }
    for i in 0..=4096 {
        let k = 0.05 + (2.0 - 0.05) * i as f64 / 4096.0;
        sup = sup.max(amplification(k, &s32).abs());
    }
    let gap = (sup - bound).abs() / bound;
    out.push(check(
        "equioscillation-attains-the-bound",
        gap < 1e-10,
        format!("rel_gap={gap:.3e} need<1e-10"),
    ));

    let plan = default_plan(m).unwrap();
    let scheduled = apply_ordering(&s32, &plan).unwrap();
    let back = parse_schedule(&write_schedule(&scheduled)).unwrap();
    let same = back.m() == scheduled.m()
        && back.weights() == scheduled.weights()
        && back.bounds() == scheduled.bounds()
        && back.ordering() == scheduled.ordering();
    out.push(check(
        "schedule-file-round-trip",
        same,
        format!("identical={same}"),
    ));
    out
}

fn orderings_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let tables: [(&'static str, u32, &[u32]); 4] = [
        ("pairing-table-m2", 1, &[1, 2]),
        ("pairing-table-m4", 2, &[1, 4, 2, 3]),
        ("pairing-table-m8", 3, &[1, 8, 4, 5, 2, 7, 3, 6]),
        (
            "pairing-table-m16",
            4,
            &[1, 16, 8, 9, 4, 13, 5, 12, 2, 15, 7, 10, 3, 14, 6, 11],
        ),
    ];
    for (name, r, want) in tables {
        let got = lebedev_finogenov(r).unwrap();
        out.push(check(
            name,
            got.perm() == want,
            format!("perm={:?}", got.perm()),
        ));
    }

    let il = interleaved(8).unwrap();
    out.push(check(
        "interleave-table-m8",
        il.perm() == [1, 8, 4, 6, 3, 7, 2, 5],
        format!("perm={:?}", il.perm()),
    ));

    let mut valid = true;
    for m in [5u32, 12, 33] {
        let mut perm = default_plan(m).unwrap().perm().to_vec();
        perm.sort_unstable();
        valid &= perm == (1..=m).collect::<Vec<_>>();
    }
    out.push(check(
        "permutations-are-bijections",
        valid,
        format!("sizes_5_12_33_valid={valid}"),
    ));

    let b = SpectralBounds::new(0.05, 2.0).unwrap();
    let sched = make_weights(16, &b).unwrap();
    let plan = lebedev_finogenov(4).unwrap();
    let scheduled = apply_ordering(&sched, &plan).unwrap();
    let consistent = scheduled
        .weights()
        .iter()
        .zip(plan.perm())
        .all(|(&w, &p)| w == sched.weights()[p as usize - 1]);
    out.push(check(
        "applied-order-matches-permutation",
        consistent,
        format!("consistent={consistent}"),
    ));
    out
}

fn bounds_suite() -> Vec<Check> {
    let mut out = Vec::new();

    let problem = laplace2d_neumann(256, StencilSpec::five_point()).unwrap();
    let nb = problem
        .stencil()
        .kappa_bounds(problem.grid())
        .unwrap();
    out.push(check(
        "five-point-symbol-max",
        nb.kappa_max == 2.0,
        format!("kappa_max={} want=2", nb.kappa_max),
    ));
    let want = 3.76491e-5;
    let rel = (nb.kappa_min - want).abs() / want;
    out.push(check(
        "neumann-256-kappa-min",
        rel <= 1e-5,
        format!("kappa_min={:.6e} rel_err={rel:.3e} need<=1e-5", nb.kappa_min),
    ));
    let kt0 = rescale_kappa(0.0, &nb).unwrap();
    out.push(check(
        "rescaled-zero",
        (kt0 + 1.00004).abs() < 0.5e-5,
        format!("value={kt0:.6} want=-1.00004"),
    ));

    let grid = Grid::unit(Layout::Vertex, 2, 8, vec![AxisBc::neumann(); 2]).unwrap();
    let k9 = StencilSpec::nine_point().kappa_bounds(&grid).unwrap().kappa_max;
    out.push(check(
        "compact-blend-symbol-max",
        k9 == 8.0 / 5.0,
        format!("kappa_max={k9} want=8/5"),
    ));
    let k17 = StencilSpec::seventeen_point()
        .kappa_bounds(&grid)
        .unwrap()
        .kappa_max;
    out.push(check(
        "wide-blend-symbol-max",
        k17 == 64.0 / 45.0,
        format!("kappa_max={k17} want=64/45"),
    ));

    let grid3 = Grid::unit(Layout::Vertex, 3, 8, vec![AxisBc::neumann(); 3]).unwrap();
    let k7 = StencilSpec::seven_point().kappa_bounds(&grid3).unwrap().kappa_max;
    out.push(check(
        "seven-point-symbol-max",
        k7 == 2.0,
        format!("kappa_max={k7} want=2"),
    ));
    out
}

fn theorems_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let b = SpectralBounds::new(0.01, 2.0).unwrap();

    let want = (0.01 + 2.0) / 2.0;
    let mut gap = 0.0f64;
    for m in [3u32, 16, 1000] {
        let s = make_weights(m, &b).unwrap();
        gap = gap.max((harmonic_mean(&s) - want).abs() / want);
    }
    out.push(check(
        "harmonic-mean-identity",
        gap < 1e-12,
        format!("rel_err={gap:.3e} need<1e-12"),
    ));

    let g = geometric_mean_inverse(&make_weights(4096, &b).unwrap());
    let limit = ((2.0f64.sqrt() + 0.01f64.sqrt()) / 2.0).powi(2);
    let lim_gap = (g - limit).abs() / limit;
    out.push(check(
        "geometric-mean-limit",
        lim_gap < 1e-3,
        format!("rel_err={lim_gap:.3e} need<1e-3"),
    ));

    let problem = laplace2d_neumann(256, StencilSpec::five_point()).unwrap();
    let nb = problem.stencil().kappa_bounds(problem.grid()).unwrap();
    let mut minimal = true;
    for sigma in [1e-6f64, 1e-8, 1e-10] {
        let m = min_cycle_size(sigma, &nb).unwrap();
        let at = amplification_bound(m, &nb).unwrap().bound;
        let below = amplification_bound(m - 1, &nb).unwrap().bound;
        minimal &= at <= sigma && below > sigma;
    }
    out.push(check(
        "cycle-size-minimality",
        minimal,
        format!("bound(M)<=sigma<bound(M-1)={minimal}"),
    ));
    out
}
