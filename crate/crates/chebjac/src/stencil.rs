//! Discrete Laplacians: tap application, diagonal coefficients, mode
//! symbols, and spectral bounds.
//!
//! Two generalized families cover everything. The compact (reach-1) family
//! blends axial and diagonal second-order discretizations,
//!
//! ```text
//! [ 2a (sides) + (b-a) (diagonals) - 4(a+b) (center) ] / (2 b h^2)
//! ```
//!
//! and the wide (reach-2) family does the same at fourth order,
//!
//! ```text
//! [ -2a (axial +-2) + 32a (axial +-1) - (b-a) (corners +-2)
//!   + 16(b-a) (diagonals +-1) - 60(a+b) (center) ] / (24 b h^2).
//! ```
//!
//! The named stencils are members: the 5-point operator is compact (1,1),
//! the compact fourth-order 9-point operator is compact (2,3), and the wide
//! 17-point operator is wide (1,2). The 7-point operator is the standard
//! second-order 3D discretization.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// Stencil family tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    FivePoint2D,
    SevenPoint3D,
    NinePoint2D,
    SeventeenPoint2D,
    /// Parameterized blend; `wide` selects the reach-2 fourth-order family.
    GeneralCombo { wide: bool },
}

/// A concrete Laplacian discretization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StencilSpec {
    family: Family,
    a: u32,
    b: u32,
}

/// Extremal values of the preconditioned symbol over admissible grid modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBounds {
    pub kappa_min: f64,
    pub kappa_max: f64,
}

impl SpectralBounds {
    pub fn new(kappa_min: f64, kappa_max: f64) -> Result<Self> {
        if !(kappa_min.is_finite() && kappa_max.is_finite()) || kappa_min <= 0.0 {
            return Err(Error::config(format!(
                "spectral bounds must be finite with kappa_min > 0 (got {kappa_min}, {kappa_max})"
            )));
        }
        if kappa_max < kappa_min {
            return Err(Error::config(format!(
                "kappa_max {kappa_max} < kappa_min {kappa_min}"
            )));
        }
        Ok(SpectralBounds {
            kappa_min,
            kappa_max,
        })
    }
}

impl StencilSpec {
    pub fn five_point() -> Self {
        StencilSpec {
            family: Family::FivePoint2D,
            a: 1,
            b: 1,
        }
    }

    pub fn seven_point() -> Self {
        StencilSpec {
            family: Family::SevenPoint3D,
            a: 0,
            b: 1,
        }
    }

    pub fn nine_point() -> Self {
        StencilSpec {
            family: Family::NinePoint2D,
            a: 2,
            b: 3,
        }
    }

    pub fn seventeen_point() -> Self {
        StencilSpec {
            family: Family::SeventeenPoint2D,
            a: 1,
            b: 2,
        }
    }

    /// Blend weights a/b with a <= b (a convex combination). `wide` selects
    /// the fourth-order reach-2 family.
    pub fn combo(a: u32, b: u32, wide: bool) -> Result<Self> {
        if b == 0 || a > b {
            return Err(Error::config(format!(
                "combo stencil requires 1 <= b and a <= b, got a={a}, b={b}"
            )));
        }
        Ok(StencilSpec {
            family: Family::GeneralCombo { wide },
            a,
            b,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn dims(&self) -> usize {
        match self.family {
            Family::SevenPoint3D => 3,
            _ => 2,
        }
    }

    /// Halo layers the stencil reads.
    pub fn reach(&self) -> usize {
        if self.is_wide() {
            2
        } else {
            1
        }
    }

    pub(crate) fn is_wide(&self) -> bool {
        matches!(
            self.family,
            Family::SeventeenPoint2D | Family::GeneralCombo { wide: true }
        )
    }

    /// True for the compact blend (2,3), which is fourth-order accurate when
    /// the source term is corrected by h^2/12 times its Laplacian.
    pub fn is_compact_fourth_order(&self) -> bool {
        !self.is_wide() && self.dims() == 2 && self.a == 2 && self.b == 3
    }

    /// True when the stencil couples diagonal neighbors, which constrains
    /// how boundary data can be folded on cell layouts.
    pub fn has_diagonal_taps(&self) -> bool {
        match self.family {
            Family::SevenPoint3D | Family::FivePoint2D => false,
            _ => self.is_wide() || self.b != self.a,
        }
    }

    /// Coefficient of the center tap in the discrete Laplacian.
    pub fn diagonal_coeff(&self, h: f64) -> f64 {
        let h2 = h * h;
        let (a, b) = (self.a as f64, self.b as f64);
        match self.family {
            Family::SevenPoint3D => -6.0 / h2,
            _ if self.is_wide() => -60.0 * (a + b) / (24.0 * b * h2),
            _ => -4.0 * (a + b) / (2.0 * b * h2),
        }
    }

    /// Symbol of the diagonally preconditioned operator at per-axis phases
    /// theta_i = k_i h_i; an error mode at theta contracts by 1 - w kappa
    /// under one sweep with weight w.
    pub(crate) fn symbol_theta(&self, theta: &[f64]) -> f64 {
        let (a, b) = (self.a as f64, self.b as f64);
        match self.family {
            Family::SevenPoint3D => {
                let s: f64 = theta.iter().map(|t| (0.5 * t).sin().powi(2)).sum();
                (2.0 / 3.0) * s
            }
            _ if self.is_wide() => {
                let (tx, ty) = (theta[0], theta[1]);
                let axial2 = tx.sin().powi(2) + ty.sin().powi(2);
                let axial1 = (0.5 * tx).sin().powi(2) + (0.5 * ty).sin().powi(2);
                let corner2 = 1.0 - (2.0 * tx).cos() * (2.0 * ty).cos();
                let diag1 = 1.0 - tx.cos() * ty.cos();
                (-2.0 * a * axial2 + 32.0 * a * axial1 - (b - a) * corner2
                    + 16.0 * (b - a) * diag1)
                    / (15.0 * (a + b))
            }
            _ => {
                let (tx, ty) = (theta[0], theta[1]);
                let axial = (0.5 * tx).sin().powi(2) + (0.5 * ty).sin().powi(2);
                let diag = 1.0 - tx.cos() * ty.cos();
                (2.0 * a / (a + b)) * axial + ((b - a) / (a + b)) * diag
            }
        }
    }

    /// Symbol at wavevector k with spacings h (theta_i = k_i h_i).
    pub fn kappa_symbol(&self, k: &[f64], h: &[f64]) -> f64 {
        let theta: Vec<f64> = k.iter().zip(h).map(|(ki, hi)| ki * hi).collect();
        self.symbol_theta(&theta)
    }

    /// Extremal symbol values over the grid's admissible modes.
    ///
    /// kappa_max is the symbol maximized over phase patterns that are pi or
    /// 0 per axis; for every named family the all-pi pattern attains it
    /// (the diagonal coupling vanishes there), while strongly diagonal
    /// blends (b > 2a) peak with one axis at pi. kappa_min places each axis
    /// at its lowest admissible phase: pi/N when both faces are Dirichlet,
    /// pi/(2N) when exactly one is (quarter-wave modes of the folded
    /// operator), and 0 when both are Neumann. The all-Neumann constant
    /// mode lies in the null space and is excluded, so there one axis is
    /// promoted to pi/N, whichever yields the smallest symbol.
    pub fn kappa_bounds(&self, grid: &Grid) -> Result<SpectralBounds> {
        let dims = self.dims();
        if grid.dims() != dims {
            return Err(Error::config(format!(
                "{:?} is {}-dimensional but the grid has {} dims",
                self.family,
                dims,
                grid.dims()
            )));
        }
        let mut kappa_max = self.symbol_theta(&vec![std::f64::consts::PI; dims]);
        for a in 0..dims {
            let mut t = vec![0.0f64; dims];
            t[a] = std::f64::consts::PI;
            kappa_max = kappa_max.max(self.symbol_theta(&t));
        }

        let mut theta = vec![0.0f64; dims];
        let mut all_neumann = true;
        for a in 0..dims {
            let bc = grid.bc(a);
            let n = grid.zones(a) as f64;
            theta[a] = match (bc.lo.is_dirichlet(), bc.hi.is_dirichlet()) {
                (true, true) => std::f64::consts::PI / n,
                (false, false) => 0.0,
                _ => std::f64::consts::PI / (2.0 * n),
            };
            if bc.has_dirichlet() {
                all_neumann = false;
            }
        }
        let kappa_min = if all_neumann {
            let mut best = f64::INFINITY;
            for a in 0..dims {
                let mut t = vec![0.0f64; dims];
                t[a] = std::f64::consts::PI / grid.zones(a) as f64;
                best = best.min(self.symbol_theta(&t));
            }
            best
        } else {
            self.symbol_theta(&theta)
        };
        SpectralBounds::new(kappa_min, kappa_max)
    }

    /// Applies the discrete Laplacian over the unknowns; the halo of `u`
    /// must already be filled. The result's halo is zero.
    pub fn apply_laplacian(&self, u: &Field) -> Result<Field> {
        if u.reach() < self.reach() {
            return Err(Error::config(format!(
                "stencil reach {} exceeds field halo {}",
                self.reach(),
                u.reach()
            )));
        }
        if u.grid().dims() != self.dims() {
            return Err(Error::config("stencil dims do not match field dims"));
        }
        let mut out = Field::zeros(u.grid(), u.reach())?;
        let h2 = u.grid().h() * u.grid().h();
        let (a, b) = (self.a as f64, self.b as f64);
        match self.family {
            Family::SevenPoint3D => {
                let inv = 1.0 / h2;
                out.map_unknowns(|i, j, k, _| {
                    let s = u.at(i - 1, j, k)
                        + u.at(i + 1, j, k)
                        + u.at(i, j - 1, k)
                        + u.at(i, j + 1, k)
                        + u.at(i, j, k - 1)
                        + u.at(i, j, k + 1);
                    (s - 6.0 * u.at(i, j, k)) * inv
                });
            }
            _ if self.is_wide() => {
                let inv = 1.0 / (24.0 * b * h2);
                out.map_unknowns(|i, j, _, _| {
                    let axial2 =
                        u.at(i - 2, j, 0) + u.at(i + 2, j, 0) + u.at(i, j - 2, 0) + u.at(i, j + 2, 0);
                    let axial1 =
                        u.at(i - 1, j, 0) + u.at(i + 1, j, 0) + u.at(i, j - 1, 0) + u.at(i, j + 1, 0);
                    let corner2 = u.at(i - 2, j - 2, 0)
                        + u.at(i - 2, j + 2, 0)
                        + u.at(i + 2, j - 2, 0)
                        + u.at(i + 2, j + 2, 0);
                    let diag1 = u.at(i - 1, j - 1, 0)
                        + u.at(i - 1, j + 1, 0)
                        + u.at(i + 1, j - 1, 0)
                        + u.at(i + 1, j + 1, 0);
                    (-2.0 * a * axial2 + 32.0 * a * axial1 - (b - a) * corner2
                        + 16.0 * (b - a) * diag1
                        - 60.0 * (a + b) * u.at(i, j, 0))
                        * inv
                });
            }
            _ => {
                let inv = 1.0 / (2.0 * b * h2);
                out.map_unknowns(|i, j, _, _| {
                    let sides =
                        u.at(i - 1, j, 0) + u.at(i + 1, j, 0) + u.at(i, j - 1, 0) + u.at(i, j + 1, 0);
                    let diags = u.at(i - 1, j - 1, 0)
                        + u.at(i - 1, j + 1, 0)
                        + u.at(i + 1, j - 1, 0)
                        + u.at(i + 1, j + 1, 0);
                    (2.0 * a * sides + (b - a) * diags - 4.0 * (a + b) * u.at(i, j, 0)) * inv
                });
            }
        }
        Ok(out)
    }
}
