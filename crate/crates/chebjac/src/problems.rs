//! Ready-made model problems for benchmarks and verification runs.
//!
//! Each constructor returns a fully assembled [`Problem`]: grid, stencil,
//! right-hand side, and (where one exists) the analytic solution used for
//! error reporting.

use std::sync::Arc;

use crate::error::Result;
use crate::grid::{AxisBc, FaceBc, Field, Grid, Layout};
use crate::solver::Problem;
use crate::stencil::StencilSpec;

/// Default total charge of the ball source.
pub const DEFAULT_CHARGE: f64 = 1.0;
/// Default ball radius for the centered full-cube problem.
pub const DEFAULT_RADIUS: f64 = 0.25;
/// Default ball radius for the symmetry-reduced octant problem.
pub const DEFAULT_OCTANT_RADIUS: f64 = 0.5;

/// Potential of a uniformly charged ball: quadratic inside the ball,
/// `charge / r` outside. Continuous with continuous gradient at `r = radius`.
fn ball_potential(
    center: [f64; 3],
    charge: f64,
    radius: f64,
) -> impl Fn(f64, f64, f64) -> f64 + Clone + Send + Sync + 'static {
    move |x, y, z| {
        let dx = x - center[0];
        let dy = y - center[1];
        let dz = z - center[2];
        let r = (dx * dx + dy * dy + dz * dz).sqrt();
        if r < radius {
            charge * (3.0 * radius * radius - r * r) / (2.0 * radius * radius * radius)
        } else {
            charge / r
        }
    }
}

fn ball_density(charge: f64, radius: f64) -> f64 {
    -3.0 * charge / (radius * radius * radius)
}

fn check_ball(charge: f64, radius: f64) -> Result<()> {
    if !charge.is_finite() {
        return Err(crate::error::Error::config("charge must be finite"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(crate::error::Error::config("radius must be positive"));
    }
    Ok(())
}

/// Zero-source all-Neumann problem on the unit square, cell-centered with
/// `n` zones per side. Every iterate should decay toward a constant; with
/// the solver's mean-zero gauge that constant is zero. Used to measure
/// pure error contraction without a forcing term.
pub fn laplace2d_neumann(n: usize, stencil: StencilSpec) -> Result<Problem> {
    let grid = Grid::unit(Layout::Cell, 2, n, vec![AxisBc::neumann(); 2])?;
    let rhs = Field::zeros(&grid, 1)?;
    Problem::new(grid, stencil, rhs, None)
}

/// Uniformly charged ball centered in the unit cube, vertex layout with
/// `n` zones per side and the 7-point stencil. Dirichlet data and the
/// reference solution are the exact ball potential.
pub fn poisson3d_sphere(n: usize, charge: f64, radius: f64) -> Result<Problem> {
    check_ball(charge, radius)?;
    let pot = ball_potential([0.5, 0.5, 0.5], charge, radius);
    let bc = AxisBc::dirichlet(pot.clone());
    let grid = Grid::unit(Layout::Vertex, 3, n, vec![bc.clone(), bc.clone(), bc])?;
    let mut rhs = Field::zeros(&grid, 1)?;
    let rho = ball_density(charge, radius);
    {
        let g = grid.clone();
        rhs.map_unknowns(|i, j, k, _| {
            let dx = g.coord(0, i) - 0.5;
            let dy = g.coord(1, j) - 0.5;
            let dz = g.coord(2, k) - 0.5;
            if (dx * dx + dy * dy + dz * dz).sqrt() < radius {
                rho
            } else {
                0.0
            }
        });
    }
    Problem::new(grid, StencilSpec::seven_point(), rhs, Some(Arc::new(pot)))
}

/// One octant of the charged-ball problem, mapped to the unit cube with the
/// ball centered at the origin corner. Cell-centered with `n` zones per
/// side; the low face of every axis is a reflection plane (Neumann), the
/// high faces carry the exact potential (Dirichlet). `n` zones here resolve
/// the same physics as `2n` zones of the full centered problem.
pub fn poisson3d_sphere_octant(n: usize, charge: f64, radius: f64) -> Result<Problem> {
    check_ball(charge, radius)?;
    let pot = ball_potential([0.0, 0.0, 0.0], charge, radius);
    let axis = AxisBc {
        lo: FaceBc::Neumann,
        hi: FaceBc::dirichlet(pot.clone()),
    };
    let grid = Grid::unit(Layout::Cell, 3, n, vec![axis.clone(), axis.clone(), axis])?;
    let mut rhs = Field::zeros(&grid, 1)?;
    let rho = ball_density(charge, radius);
    {
        let g = grid.clone();
        rhs.map_unknowns(|i, j, k, _| {
            let x = g.coord(0, i);
            let y = g.coord(1, j);
            let z = g.coord(2, k);
            if (x * x + y * y + z * z).sqrt() < radius {
                rho
            } else {
                0.0
            }
        });
    }
    Problem::new(grid, StencilSpec::seven_point(), rhs, Some(Arc::new(pot)))
}

/// Smooth 2D Dirichlet problem with solution `-exp(x * y)` on the unit
/// square, vertex layout with `n` zones per side. For the compact
/// fourth-order stencil the right-hand side carries the standard
/// `h^2 / 12` Laplacian-of-source correction; without it that stencil
/// would be limited to second order.
pub fn poisson2d_exp(n: usize, stencil: StencilSpec) -> Result<Problem> {
    let solution = |x: f64, y: f64, _z: f64| -(x * y).exp();
    let bc = AxisBc::dirichlet(solution);
    let grid = Grid::unit(Layout::Vertex, 2, n, vec![bc.clone(), bc])?;
    let mut rhs = Field::zeros(&grid, 1)?;
    let correct = stencil.is_compact_fourth_order();
    let h2_12 = grid.h() * grid.h() / 12.0;
    {
        let g = grid.clone();
        rhs.map_unknowns(|i, j, _, _| {
            let x = g.coord(0, i);
            let y = g.coord(1, j);
            let s2 = x * x + y * y;
            let e = (x * y).exp();
            let f = -s2 * e;
            if correct {
                let lap_f = -e * (s2 * s2 + 8.0 * x * y + 4.0);
                f + h2_12 * lap_f
            } else {
                f
            }
        });
    }
    Problem::new(grid, stencil, rhs, Some(Arc::new(solution)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inf_norm_diff;
    use crate::stencil::SpectralBounds;

    fn truncation_inf_norm(problem: &Problem) -> f64 {
        let analytic = problem.analytic().expect("problem has a reference solution");
        let grid = problem.grid();
        let mut exact = Field::zeros(grid, problem.stencil().reach()).unwrap();
        {
            let g = grid.clone();
            exact.map_unknowns(|i, j, k, _| {
                analytic(g.coord(0, i), g.coord(1, j), g.coord(2, k))
            });
        }
        exact.set_dirichlet_nodes();
        exact.fill_ghosts();
        let lap = problem.stencil().apply_laplacian(&exact).unwrap();
        inf_norm_diff(&lap, problem.rhs()).unwrap()
    }

    #[test]
    fn exp_problem_pins_boundary_and_source_values() {
        let p = poisson2d_exp(8, StencilSpec::five_point()).unwrap();
        let analytic = p.analytic().unwrap();
        assert_eq!(analytic(0.0, 0.0, 0.0), -1.0);
        let h = p.grid().h();
        let (x, y) = (3.0 * h, 5.0 * h);
        let expect = -(x * x + y * y) * (x * y).exp();
        assert!((p.rhs().at(3, 5, 0) - expect).abs() < 1e-15);

        let p9 = poisson2d_exp(8, StencilSpec::nine_point()).unwrap();
        let lap_f = -(x * y).exp() * ((x * x + y * y).powi(2) + 8.0 * x * y + 4.0);
        let expect9 = expect + h * h / 12.0 * lap_f;
        assert!((p9.rhs().at(3, 5, 0) - expect9).abs() < 1e-15);
    }

    #[test]
    fn source_free_ball_is_the_zero_problem() {
        let p = poisson3d_sphere(8, 0.0, 0.25).unwrap();
        let mut all_zero = true;
        p.rhs().for_each_unknown(|_, _, _, v| all_zero &= v == 0.0);
        assert!(all_zero);
        let zeros = Field::zeros(p.grid(), 1).unwrap();
        assert_eq!(p.max_error(&zeros), Some(0.0));
    }

    #[test]
    fn octant_sources_and_boundary_match_the_ball() {
        let n = 16;
        let p = poisson3d_sphere_octant(n, 1.0, 0.5).unwrap();
        let rho = -3.0 / (0.5f64.powi(3));
        // First cell center sits at distance sqrt(3)/(2n) < radius.
        assert_eq!(p.rhs().at(0, 0, 0), rho);
        let analytic = p.analytic().unwrap();
        assert!((analytic(1.0, 0.0, 0.0) - 1.0).abs() < 1e-15);
        // Quarter-wave low modes: same spectral floor as the full problem
        // at twice the resolution.
        let b = p.stencil().kappa_bounds(p.grid()).unwrap();
        let full = SpectralBounds {
            kappa_min: 2.0 * (std::f64::consts::PI / (4.0 * n as f64)).sin().powi(2),
            kappa_max: 2.0,
        };
        assert!((b.kappa_min - full.kappa_min).abs() < 1e-15 * full.kappa_min);
        assert_eq!(b.kappa_max, full.kappa_max);
    }

    #[test]
    fn mehrstellen_correction_restores_fourth_order_truncation() {
        let t5_32 = truncation_inf_norm(&poisson2d_exp(32, StencilSpec::five_point()).unwrap());
        let t5_64 = truncation_inf_norm(&poisson2d_exp(64, StencilSpec::five_point()).unwrap());
        let r5 = t5_32 / t5_64;
        assert!((3.4..4.6).contains(&r5), "five-point ratio {r5}");

        let t9_32 = truncation_inf_norm(&poisson2d_exp(32, StencilSpec::nine_point()).unwrap());
        let t9_64 = truncation_inf_norm(&poisson2d_exp(64, StencilSpec::nine_point()).unwrap());
        let r9 = t9_32 / t9_64;
        assert!((13.0..19.0).contains(&r9), "nine-point ratio {r9}");
    }
}
